/* Support library for generated drivers and instrumented subjects. */
#ifndef MOTIF_RUNTIME_H
#define MOTIF_RUNTIME_H

#include <stddef.h>
#include <stdint.h>
#include <stdio.h>

/* exit status when the input file cannot be read */
#define MOTIF_EXIT_BAD_INPUT 97

void load_file(const char *path, size_t needed);
void get_value(void *dst, size_t n);
void seek_data_index(size_t i);
int compare_value(const void *a, const void *b, size_t n);
void safe_abort(void);

void motif_checkpoint(const char *token);
void motif_log_to_stderr(void);
void printf_struct(const char *label, const void *p, size_t n);

void __motif_cov(uint16_t id);

#endif
