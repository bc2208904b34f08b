//! Print types and environments back as C.

use std::fmt::Write;

use super::{CType, Decl, EnumDef, FunctionSignature, IntWidth, Param, Record, TypeEnvironment};

/// Renders C declarations with a fixed indentation unit.
#[derive(Debug, Clone, Copy)]
pub struct TypeRenderer {
    pub indent: usize,
}

impl Default for TypeRenderer {
    fn default() -> Self {
        TypeRenderer { indent: 4 }
    }
}

/// Declaration of `name` with type `ty` (`name` may be empty for an
/// abstract declarator).
pub fn render_type(ty: &CType, name: &str) -> String {
    TypeRenderer::default().declaration(ty, name, 0)
}

/// Print every type declaration (and optionally every prototype) in
/// declaration order.
pub fn render_declarations(env: &TypeEnvironment, with_functions: bool) -> String {
    let r = TypeRenderer::default();
    let mut out = String::new();
    for decl in &env.order {
        match decl {
            Decl::Typedef(name) => {
                let _ = writeln!(out, "typedef {};", r.declaration(&env.typedefs[name], name, 0));
            }
            Decl::Tag(tag) => {
                let _ = writeln!(out, "{};", r.declaration(&env.tags[tag], "", 0));
            }
            Decl::Function(name) if with_functions => {
                let _ = writeln!(out, "{};", r.prototype(&env.signatures[name], name));
            }
            Decl::Function(_) => {}
        }
    }
    out
}

fn int_name(signed: bool, width: IntWidth) -> &'static str {
    match (signed, width) {
        (true, IntWidth::W8) => "signed char",
        (false, IntWidth::W8) => "unsigned char",
        (true, IntWidth::W16) => "short",
        (false, IntWidth::W16) => "unsigned short",
        (true, IntWidth::W32) => "int",
        (false, IntWidth::W32) => "unsigned int",
        (true, IntWidth::W64) => "long long",
        (false, IntWidth::W64) => "unsigned long long",
    }
}

impl TypeRenderer {
    /// `ty name` with C's inside-out declarator syntax.
    pub fn declaration(&self, ty: &CType, name: &str, level: usize) -> String {
        match ty {
            CType::Pointer { pointee } => {
                let inner = if matches!(pointee.as_ref(), CType::Array { .. }) { format!("(*{name})") } else { format!("*{name}") };
                self.declaration(pointee, &inner, level)
            }
            CType::Array { element, length } => self.declaration(element, &format!("{name}[{length}]"), level),
            base => {
                let spec = self.specifier(base, level);
                if name.is_empty() {
                    spec
                } else {
                    format!("{spec} {name}")
                }
            }
        }
    }

    /// Prototype of `sig` under the given function name.
    pub fn prototype(&self, sig: &FunctionSignature, name: &str) -> String {
        let params = if sig.params.is_empty() {
            "void".to_string()
        } else {
            sig.params.iter().map(|p| self.param(p)).collect::<Vec<_>>().join(", ")
        };
        self.declaration(&sig.return_type, &format!("{name}({params})"), 0)
    }

    fn param(&self, p: &Param) -> String {
        match (&p.ty, p.array_decl) {
            (CType::Pointer { pointee }, true) => {
                let dim = p.pointed_length.map(|n| n.to_string()).unwrap_or_default();
                self.declaration(pointee, &format!("{}[{dim}]", p.name), 0)
            }
            _ => self.declaration(&p.ty, &p.name, 0),
        }
    }

    fn specifier(&self, ty: &CType, level: usize) -> String {
        match ty {
            CType::Void => "void".into(),
            CType::Bool => "_Bool".into(),
            CType::Char => "char".into(),
            CType::Int { signed, width } => int_name(*signed, *width).into(),
            CType::Float32 => "float".into(),
            CType::Float64 => "double".into(),
            CType::Alias { name } => name.clone(),
            CType::Enum(EnumDef { tag, enumerators }) => {
                let mut s = tag.as_ref().map_or_else(|| "enum".to_string(), |t| format!("enum {t}"));
                if let Some(list) = enumerators {
                    let pad = " ".repeat(self.indent * (level + 1));
                    s.push_str(" {\n");
                    for (i, e) in list.iter().enumerate() {
                        let sep = if i + 1 == list.len() { "" } else { "," };
                        let _ = writeln!(s, "{pad}{} = {}{sep}", e.name, e.value);
                    }
                    s.push_str(&" ".repeat(self.indent * level));
                    s.push('}');
                }
                s
            }
            CType::Struct(rec) => self.record("struct", rec, level),
            CType::Union(rec) => self.record("union", rec, level),
            CType::Pointer { .. } | CType::Array { .. } => unreachable!("derived types have no specifier"),
        }
    }

    fn record(&self, kw: &str, rec: &Record, level: usize) -> String {
        let mut s = rec.tag.as_ref().map_or_else(|| kw.to_string(), |t| format!("{kw} {t}"));
        if let Some(fields) = &rec.fields {
            let pad = " ".repeat(self.indent * (level + 1));
            s.push_str(" {\n");
            for f in fields {
                let _ = writeln!(s, "{pad}{};", self.declaration(&f.ty, &f.name, level + 1));
            }
            s.push_str(&" ".repeat(self.indent * level));
            s.push('}');
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c_model::{parse_declarations, ParseConfig};

    #[test]
    fn inside_out_declarators() {
        let i = CType::int(true, IntWidth::W32);
        assert_eq!(render_type(&CType::pointer(i.clone()), "p"), "int *p");
        assert_eq!(render_type(&CType::array(CType::array(i.clone(), 3), 2), "m"), "int m[2][3]");
        assert_eq!(render_type(&CType::pointer(CType::array(i.clone(), 3)), "p"), "int (*p)[3]");
        assert_eq!(render_type(&CType::array(CType::pointer(i), 4), "a"), "int *a[4]");
    }

    #[test]
    fn prototypes_keep_array_syntax() {
        let src = "int s(const unsigned char buf[8], int rest[]);";
        let env = parse_declarations(src, &ParseConfig::default()).unwrap().env;
        let out = render_declarations(&env, true);
        assert_eq!(out, "int s(unsigned char buf[8], int rest[]);\n");
    }

    #[test]
    fn nested_record_layout_of_text() {
        let src = "typedef struct { int kind; union { float f; char c[3]; } u; } T;";
        let env = parse_declarations(src, &ParseConfig::default()).unwrap().env;
        let want = "typedef struct {\n    int kind;\n    union {\n        float f;\n        char c[3];\n    } u;\n} T;\n";
        assert_eq!(render_declarations(&env, false), want);
    }
}
