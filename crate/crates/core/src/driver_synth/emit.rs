use std::fmt::Write;

use super::{input_slots, CheckpointChannel, DriverError, DriverKind, DriverSpec, GeneratedDriver, InputSlot};
use crate::c_model::{render_declarations, render_type, CType, Role, TypeRenderer};
use crate::mutagen::MUTANT_PREFIX;

pub const RUNTIME_HEADER: &str = "motif_runtime.h";

const ORIG: &str = "origin_";
const MUT: &str = "mut_";

struct Ctx<'a> {
    spec: &'a DriverSpec,
    slots: Vec<InputSlot>,
}

impl<'a> Ctx<'a> {
    fn new(spec: &'a DriverSpec) -> Result<Self, DriverError> {
        let slots = input_slots(&spec.signature, &spec.env, &spec.abi, &spec.lengths)?;
        if !matches!(spec.env.resolve(&spec.signature.return_type)?, CType::Void) {
            crate::c_model::layout_of(&spec.signature.return_type, &spec.env, &spec.abi)?;
        }
        Ok(Ctx { spec, slots })
    }

    fn name(&self) -> &str {
        &self.spec.signature.name
    }

    fn returns_value(&self) -> bool {
        !matches!(self.spec.env.resolve(&self.spec.signature.return_type), Ok(CType::Void))
    }

    fn returns_pointer(&self) -> bool {
        matches!(self.spec.env.resolve(&self.spec.signature.return_type), Ok(CType::Pointer { .. }))
    }

    fn consumed(&self) -> u64 {
        self.slots.iter().map(|s| s.size).sum()
    }

    fn head(&self, out: &mut String, callees: &[String]) {
        let _ = writeln!(out, "/* generated driver for {} */", self.name());
        let _ = writeln!(out, "#include \"{RUNTIME_HEADER}\"\n");
        let decls = render_declarations(&self.spec.env, false);
        if !decls.is_empty() {
            out.push_str(&decls);
            out.push('\n');
        }
        let r = TypeRenderer::default();
        for c in callees {
            let _ = writeln!(out, "{};", r.prototype(&self.spec.signature, c));
        }
        out.push('\n');
    }

    fn statics(&self, out: &mut String, prefixes: &[&str]) {
        let mut any = false;
        for prefix in prefixes {
            for s in self.slots.iter().filter(|s| s.count.is_some()) {
                let ty = CType::array(s.value_type.clone(), s.count.unwrap_or(1));
                let _ = writeln!(out, "static {};", render_type(&ty, &format!("{prefix}{}", s.param)));
                any = true;
            }
        }
        if any {
            out.push('\n');
        }
    }

    fn locals(&self, out: &mut String, prefixes: &[&str]) {
        for prefix in prefixes {
            for s in self.slots.iter().filter(|s| s.count.is_none()) {
                let _ = writeln!(out, "    {};", render_type(&s.value_type, &format!("{prefix}{}", s.param)));
            }
        }
        if self.returns_value() {
            for prefix in prefixes {
                let _ = writeln!(out, "    {};", render_type(&self.spec.signature.return_type, &format!("{prefix}return")));
            }
        }
        out.push('\n');
    }

    fn addr(&self, s: &InputSlot, prefix: &str) -> String {
        if s.count.is_some() {
            format!("{prefix}{}", s.param)
        } else {
            format!("&{prefix}{}", s.param)
        }
    }

    fn open_main(&self, out: &mut String) {
        out.push_str("int main(int argc, char **argv)\n{\n");
        if self.spec.checkpoint_channel == CheckpointChannel::Stderr {
            out.push_str("    motif_log_to_stderr();\n");
        }
    }

    fn load(&self, out: &mut String) {
        let needed = if self.slots.is_empty() {
            "0".to_string()
        } else {
            self.slots.iter().map(|s| format!("sizeof({ORIG}{})", s.param)).collect::<Vec<_>>().join(" + ")
        };
        let _ = writeln!(out, "    load_file(argc > 1 ? argv[1] : NULL, {needed});");
    }

    fn fill(&self, out: &mut String, prefix: &str) {
        for s in &self.slots {
            let _ = writeln!(out, "    get_value({}, sizeof({prefix}{}));", self.addr(s, prefix), s.param);
        }
    }

    fn call(&self, out: &mut String, prefix: &str, callee: &str, before: &str, after: &str) {
        let args: Vec<String> = self.slots.iter().map(|s| format!("{prefix}{}", s.param)).collect();
        let _ = writeln!(out, "    motif_checkpoint(\"{before}\");");
        if self.returns_value() {
            let _ = writeln!(out, "    {prefix}return = {callee}({});", args.join(", "));
        } else {
            let _ = writeln!(out, "    {callee}({});", args.join(", "));
        }
        let _ = writeln!(out, "    motif_checkpoint(\"{after}\");");
    }

    fn compare(&self, out: &mut String) {
        for s in self.slots.iter().filter(|s| !self.spec.exclude_compare.contains(&s.param)) {
            let _ = writeln!(
                out,
                "    ret += compare_value({}, {}, sizeof({ORIG}{}));",
                self.addr(s, ORIG),
                self.addr(s, MUT),
                s.param
            );
        }
        if self.returns_pointer() {
            let _ = writeln!(out, "    ret += ({ORIG}return == NULL) != ({MUT}return == NULL);");
        } else if self.returns_value() {
            let _ = writeln!(out, "    ret += compare_value(&{ORIG}return, &{MUT}return, sizeof({ORIG}return));");
        }
    }

    fn differential(&self, second: &str) -> String {
        let name = self.name();
        let mut out = String::new();
        self.head(&mut out, &[name.to_string(), second.to_string()]);
        self.statics(&mut out, &[ORIG, MUT]);
        self.open_main(&mut out);
        out.push_str("    int ret = 0;\n");
        self.locals(&mut out, &[ORIG, MUT]);
        self.load(&mut out);
        out.push('\n');
        self.fill(&mut out, ORIG);
        self.call(&mut out, ORIG, name, "CALL_ORIG", "RET_ORIG");
        if let Some(snippet) = &self.spec.reset_snippet {
            for line in snippet.lines() {
                let _ = writeln!(out, "    {line}");
            }
        }
        out.push('\n');
        out.push_str("    seek_data_index(0);\n");
        self.fill(&mut out, MUT);
        self.call(&mut out, MUT, second, "CALL_MUT", "RET_MUT");
        out.push('\n');
        self.compare(&mut out);
        out.push_str("    if (ret != 0) {\n        motif_checkpoint(\"DIFF\");\n        safe_abort();\n    }\n");
        out.push_str("    motif_checkpoint(\"EQ\");\n    return 0;\n}\n");
        out
    }

    /// Print statement for `expr`; `index` is passed before the value when
    /// the label holds a `%zu`.
    fn print_value(&self, out: &mut String, label: &str, ty: &CType, expr: &str, index: Option<&str>, indent: &str) {
        let tyname = render_type(ty, "");
        let idx = index.map(|i| format!("{i}, ")).unwrap_or_default();
        let (conv, arg) = match self.spec.env.resolve(ty) {
            Ok(CType::Bool | CType::Int { signed: false, .. }) => ("%llu", format!("(unsigned long long){expr}")),
            Ok(CType::Char | CType::Int { .. } | CType::Enum(_)) => ("%lld", format!("(long long){expr}")),
            Ok(CType::Float32 | CType::Float64) => ("%.17g", format!("(double){expr}")),
            Ok(CType::Pointer { .. }) => ("%s", format!("{expr} ? \"non-null\" : \"NULL\"")),
            _ => {
                let _ = writeln!(out, "{indent}printf_struct(\"{label} ({tyname})=\", &{expr}, sizeof({expr}));");
                return;
            }
        };
        let _ = writeln!(out, "{indent}printf(\"{label} ({tyname}) = {conv}\\n\", {idx}{arg});");
    }

    fn print_outputs(&self, out: &mut String) {
        for s in &self.slots {
            let role = self.spec.signature.param(&s.param).map(|p| p.role).unwrap_or_default();
            if role == Role::Input {
                continue;
            }
            let var = format!("{ORIG}{}", s.param);
            match s.count {
                None | Some(1) => {
                    let expr = if s.count.is_some() { format!("{var}[0]") } else { var };
                    self.print_value(out, &s.param, &s.value_type, &expr, None, "    ");
                }
                Some(n) => {
                    let scalar = matches!(
                        self.spec.env.resolve(&s.value_type),
                        Ok(CType::Bool | CType::Char | CType::Int { .. } | CType::Enum(_) | CType::Float32 | CType::Float64)
                    );
                    if scalar {
                        let _ = writeln!(out, "    for (size_t i = 0; i < {n}; i++)");
                        let label = format!("{}[%zu]", s.param);
                        self.print_value(out, &label, &s.value_type, &format!("{var}[i]"), Some("i"), "        ");
                    } else {
                        let tyname = render_type(&s.value_type, "");
                        let _ = writeln!(out, "    printf_struct(\"{} ({tyname}[{n}])=\", {var}, sizeof({var}));", s.param);
                    }
                }
            }
        }
        if self.returns_value() {
            self.print_value(out, "return", &self.spec.signature.return_type, &format!("{ORIG}return"), None, "    ");
        }
    }
}

/// Differential driver: original and `mut_` variant on identical inputs.
pub fn gen_fuzzing_driver(spec: &DriverSpec) -> Result<GeneratedDriver, DriverError> {
    let ctx = Ctx::new(spec)?;
    let source = ctx.differential(&format!("{MUTANT_PREFIX}{}", ctx.name()));
    Ok(GeneratedDriver { kind: DriverKind::Fuzzing, source, consumed_input_bytes: ctx.consumed() })
}

/// The fuzzing driver with both calls going to the original function.
pub fn gen_false_positive_driver(spec: &DriverSpec) -> Result<GeneratedDriver, DriverError> {
    let ctx = Ctx::new(spec)?;
    let source = ctx.differential(ctx.name());
    Ok(GeneratedDriver { kind: DriverKind::FalsePositive, source, consumed_input_bytes: ctx.consumed() })
}

/// Calls the original once and prints every output.
pub fn gen_test_driver(spec: &DriverSpec) -> Result<GeneratedDriver, DriverError> {
    let ctx = Ctx::new(spec)?;
    let mut out = String::new();
    ctx.head(&mut out, &[ctx.name().to_string()]);
    ctx.statics(&mut out, &[ORIG]);
    ctx.open_main(&mut out);
    ctx.locals(&mut out, &[ORIG]);
    ctx.load(&mut out);
    out.push('\n');
    ctx.fill(&mut out, ORIG);
    ctx.call(&mut out, ORIG, ctx.name(), "CALL_ORIG", "RET_ORIG");
    out.push('\n');
    ctx.print_outputs(&mut out);
    out.push_str("    return 0;\n}\n");
    Ok(GeneratedDriver { kind: DriverKind::Test, source: out, consumed_input_bytes: ctx.consumed() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c_model::{parse_declarations, ParseConfig};

    fn spec(src: &str, f: &str) -> DriverSpec {
        let env = parse_declarations(src, &ParseConfig::default()).unwrap().env;
        DriverSpec::new(env.signatures[f].clone(), env)
    }

    fn reads(src: &str) -> Vec<String> {
        src.lines()
            .filter_map(|l| l.trim().strip_prefix("get_value("))
            .map(|l| l.replace(MUT, ORIG))
            .collect()
    }

    #[test]
    fn void_function_compares_returns_only() {
        let d = gen_fuzzing_driver(&spec("int f(void);", "f")).unwrap();
        assert_eq!(d.consumed_input_bytes, 0);
        assert!(d.source.contains("load_file(argc > 1 ? argv[1] : NULL, 0);"));
        assert_eq!(d.source.matches("compare_value(").count(), 1);
        assert!(d.source.contains("mut_return = mut_f();"));
    }

    #[test]
    fn false_positive_is_textual_rename() {
        let s = spec("typedef struct { int k; } T; int f(T *p, int n);", "f");
        let fz = gen_fuzzing_driver(&s).unwrap();
        let fp = gen_false_positive_driver(&s).unwrap();
        assert_eq!(fp.source, fz.source.replace("mut_f(", "f("));
    }

    #[test]
    fn drivers_share_read_sequence() {
        let s = spec("struct P { char c; double d; }; long f(struct P *p, unsigned char b[4], short k);", "f");
        let fz = gen_fuzzing_driver(&s).unwrap();
        let t = gen_test_driver(&s).unwrap();
        let r = reads(&fz.source);
        assert_eq!(r.len(), 6);
        assert_eq!(r[..3], r[3..]);
        assert_eq!(reads(&t.source), r[..3]);
        assert_eq!(fz.consumed_input_bytes, 16 + 4 + 2);
    }

    #[test]
    fn exclusion_and_pointer_return() {
        let mut s = spec("char *f(char *s, int n);", "f");
        s.exclude_compare.insert("n".into());
        let d = gen_fuzzing_driver(&s).unwrap();
        assert!(!d.source.contains("&origin_n, &mut_n"));
        assert!(d.source.contains("(origin_return == NULL) != (mut_return == NULL)"));
    }

    #[test]
    fn test_driver_prints_elements() {
        let mut s = spec("void f(int *out, double x);", "f");
        s.lengths.lengths.insert("out".into(), 3);
        let d = gen_test_driver(&s).unwrap();
        assert!(d.source.contains("for (size_t i = 0; i < 3; i++)"));
        assert!(d.source.contains("printf(\"out[%zu] (int) = %lld\\n\", i, (long long)origin_out[i]);"));
        assert!(d.source.contains("printf(\"x (double) = %.17g\\n\", (double)origin_x);"));
        assert!(!d.source.contains("return ("));
    }

    #[test]
    fn reset_snippet_between_calls() {
        let mut s = spec("int f(int x);", "f");
        s.reset_snippet = Some("counter = 0;".into());
        let d = gen_fuzzing_driver(&s).unwrap();
        let a = d.source.find("RET_ORIG").unwrap();
        let b = d.source.find("counter = 0;").unwrap();
        let c = d.source.find("seek_data_index(0)").unwrap();
        assert!(a < b && b < c);
    }
}
