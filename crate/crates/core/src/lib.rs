//! Mutation testing of C functions with a grey-box fuzzer.
//!
//! The pipeline per function under test: parse its declarations, generate
//! mutants, synthesize differential drivers and seed files, then fuzz each
//! mutant until it is killed or its budget runs out.

pub mod c_model;
pub mod campaign;
pub mod cbody;
pub mod cli;
pub mod driver_synth;
pub mod fuzz;
pub mod instrument;
pub mod lexer;
pub mod mutagen;
pub mod seedgen;
