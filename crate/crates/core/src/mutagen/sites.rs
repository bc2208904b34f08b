use std::collections::BTreeSet;

use super::{MutagenError, MutationSite, Operator};
use crate::c_model::{CType, FunctionSignature, TypeEnvironment};
use crate::cbody::{Stmt, StmtParser, TokenizedSource, C_KEYWORDS};
use crate::lexer::{self, TokenKind};

/// Context that sharpens token-level site discovery.
#[derive(Debug, Clone, Default)]
pub struct SiteOptions {
    /// Typedef names, so `T *p` is read as a declaration rather than a product.
    pub type_names: BTreeSet<String>,
    /// Identifiers that are not scalars (pointer or aggregate parameters);
    /// unary insertion skips them.
    pub non_scalar: BTreeSet<String>,
}

impl SiteOptions {
    pub fn from_env(env: &TypeEnvironment, sig: Option<&FunctionSignature>) -> Self {
        let type_names = env.typedefs.keys().cloned().collect();
        let non_scalar = sig
            .map(|s| {
                s.params
                    .iter()
                    .filter(|p| {
                        !matches!(
                            env.resolve(&p.ty),
                            Ok(CType::Bool | CType::Char | CType::Int { .. } | CType::Float32 | CType::Float64 | CType::Enum(_))
                        )
                    })
                    .map(|p| p.name.clone())
                    .collect()
            })
            .unwrap_or_default();
        SiteOptions { type_names, non_scalar }
    }
}

const ASSIGN_OPS: &[&str] = &["=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<=", ">>="];

struct Scan<'a, 's> {
    ts: &'a TokenizedSource<'s>,
    parser: StmtParser<'a, 's>,
    opts: &'a SiteOptions,
    function: &'a str,
    /// Token indices inside declarations but outside initializers.
    declarator_tokens: BTreeSet<usize>,
}

impl Scan<'_, '_> {
    fn is_keyword(&self, t: &str) -> bool {
        C_KEYWORDS.contains(&t)
    }

    fn is_type(&self, t: &str) -> bool {
        self.parser.is_type_name(t)
    }

    /// Token `k` ends an operand, so an operator after it is binary.
    fn ends_operand(&self, k: usize) -> bool {
        let t = self.ts.text(k);
        match self.ts.kind(k) {
            Some(TokenKind::Int | TokenKind::Float | TokenKind::Str | TokenKind::Char) => true,
            Some(TokenKind::Ident) => !self.is_keyword(t) && !self.is_type(t),
            Some(TokenKind::Punct) => match t {
                "]" => true,
                ")" => !self.is_cast_close(k),
                "++" | "--" => k > 0 && self.ends_operand(k - 1),
                _ => false,
            },
            _ => false,
        }
    }

    fn is_cast_close(&self, close: usize) -> bool {
        let mut depth = 0usize;
        let mut open = None;
        for i in (0..=close).rev() {
            match self.ts.text(i) {
                ")" => depth += 1,
                "(" => {
                    depth -= 1;
                    if depth == 0 {
                        open = Some(i);
                        break;
                    }
                }
                _ => {}
            }
        }
        let Some(open) = open else { return false };
        if open + 1 >= close {
            return false;
        }
        let first = self.ts.text(open + 1);
        let starts_type = self.is_type(first) || matches!(first, "struct" | "union" | "enum");
        starts_type
            && (open + 1..close).all(|i| self.ts.kind(i) == Some(TokenKind::Ident) || self.ts.text(i) == "*")
    }

    fn binary_at(&self, k: usize) -> bool {
        k > 0 && self.ends_operand(k - 1)
    }

    fn uoi_candidate(&self, k: usize) -> bool {
        let t = self.ts.text(k);
        if self.ts.kind(k) != Some(TokenKind::Ident)
            || self.is_keyword(t)
            || self.is_type(t)
            || t == self.function
            || self.opts.non_scalar.contains(t)
        {
            return false;
        }
        let next = self.ts.text(k + 1);
        if ASSIGN_OPS.contains(&next) || matches!(next, "(" | "++" | "--" | "." | "->" | "[" | ":") {
            return false;
        }
        let prev = self.ts.text(k - 1);
        if matches!(prev, "." | "->" | "++" | "--" | "goto" | "sizeof" | "struct" | "union" | "enum") {
            return false;
        }
        if matches!(prev, "&" | "*") && !self.binary_at(k - 1) {
            return false;
        }
        true
    }
}

fn collect_declarators(ts: &TokenizedSource<'_>, body: &Stmt, out: &mut BTreeSet<usize>) {
    body.walk(&mut |s| {
        if let Stmt::Decl { range } = s {
            let mut depth = 0i32;
            let mut in_init = false;
            for i in range.clone() {
                let t = ts.text(i);
                match t {
                    "(" | "[" | "{" => depth += 1,
                    ")" | "]" | "}" => depth -= 1,
                    _ => {}
                }
                if depth == 0 && t == "=" {
                    in_init = true;
                    out.insert(i);
                    continue;
                }
                if depth == 0 && (t == "," || t == ";") {
                    in_init = false;
                }
                if !in_init {
                    out.insert(i);
                }
            }
        }
    });
}

/// Every site of an enabled operator inside `function`'s body, ordered by
/// byte offset.
pub fn enumerate_sites(
    file: &str,
    source: &str,
    function: &str,
    operators: &[Operator],
    opts: &SiteOptions,
) -> Result<Vec<MutationSite>, MutagenError> {
    let ts = TokenizedSource::new(source)?;
    let def = ts.find_definition(function)?;
    let parser = StmtParser::new(&ts, &opts.type_names);
    let body = parser.body(&def)?;
    let mut declarator_tokens = BTreeSet::new();
    collect_declarators(&ts, &body, &mut declarator_tokens);
    let scan = Scan { ts: &ts, parser: StmtParser::new(&ts, &opts.type_names), opts, function, declarator_tokens };
    let enabled = |op: Operator| operators.contains(&op);

    let mut sites = Vec::new();
    let mut push = |op: Operator, span: std::ops::Range<usize>| {
        sites.push(MutationSite {
            file: file.to_string(),
            function: function.to_string(),
            start: span.start,
            end: span.end,
            kind: op.site_kind(),
            operator: op,
            original: source[span].to_string(),
        });
    };

    for k in def.body.start + 1..def.body.end - 1 {
        if scan.declarator_tokens.contains(&k) {
            continue;
        }
        let tok = &ts.toks[k];
        let t = tok.text(source);
        let span = tok.span.clone();
        match tok.kind {
            TokenKind::Punct => {
                let binary = scan.binary_at(k);
                if enabled(Operator::Aor) && Operator::Aor.class().contains(&t) && binary {
                    push(Operator::Aor, span);
                } else if enabled(Operator::Ror) && Operator::Ror.class().contains(&t) {
                    push(Operator::Ror, span);
                } else if enabled(Operator::Lcr) && Operator::Lcr.class().contains(&t) {
                    push(Operator::Lcr, span);
                } else if enabled(Operator::Bwr) && Operator::Bwr.class().contains(&t) && binary {
                    push(Operator::Bwr, span);
                }
            }
            TokenKind::Int if enabled(Operator::Icr) => {
                if lexer::parse_int_literal(t).is_some() {
                    push(Operator::Icr, span);
                }
            }
            TokenKind::Ident if enabled(Operator::Uoi) && scan.uoi_candidate(k) => push(Operator::Uoi, span),
            _ => {}
        }
    }
    if enabled(Operator::Sdl) {
        body.walk(&mut |s| {
            if let Stmt::Expr { range } = s {
                push(Operator::Sdl, ts.span(range.clone()));
            }
        });
    }
    sites.sort_by_key(|s| (s.start, s.kind));
    Ok(sites)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mutagen::SiteKind;

    fn sites(src: &str, ops: &[Operator]) -> Vec<(SiteKind, String)> {
        enumerate_sites("t.c", src, "f", ops, &SiteOptions::default())
            .unwrap()
            .into_iter()
            .map(|s| (s.kind, s.original))
            .collect()
    }

    #[test]
    fn one_aor_site_at_plus() {
        assert_eq!(sites("int f(int a,int b){return a+b;}", &[Operator::Aor]), [(SiteKind::BinaryArith, "+".to_string())]);
    }

    #[test]
    fn no_relational_tokens_no_sites() {
        assert!(sites("int f(void){return 0;}", &[Operator::Ror]).is_empty());
    }

    #[test]
    fn if_statement_with_ror_and_sdl() {
        let got = sites("int f(int x){int y = 0; if (x <= 0) y++; return y;}", &[Operator::Ror, Operator::Sdl]);
        assert_eq!(got, [(SiteKind::Relational, "<=".to_string()), (SiteKind::Statement, "y++;".to_string())]);
    }

    #[test]
    fn unary_operators_are_not_binary_sites() {
        let src = "int f(int a, int *p){int *q = &a; return -a + *p - (int)-a & ~a;}";
        let got = sites(src, &[Operator::Aor, Operator::Bwr]);
        let texts: Vec<_> = got.iter().map(|(_, t)| t.as_str()).collect();
        assert_eq!(texts, ["+", "-", "&"]);
    }

    #[test]
    fn comments_and_literals_are_masked() {
        let src = "int f(int a){ /* a+b */ const char *s = \"x<y\"; return a; // a-b\n}";
        assert!(sites(src, &[Operator::Aor, Operator::Ror]).is_empty());
    }

    #[test]
    fn constants_outside_declarators() {
        let src = "int f(int a){int buf[4] = {1}; return a + 0x10 + buf[2];}";
        let got: Vec<_> = sites(src, &[Operator::Icr]).into_iter().map(|(_, t)| t).collect();
        assert_eq!(got, ["1", "0x10", "2"]);
    }

    #[test]
    fn uoi_skips_lvalues_calls_and_members() {
        let src = "int g(int); int f(int a, int b){ a = b; a += g(b); s.x = b; return a; }";
        let got: Vec<_> = sites(src, &[Operator::Uoi]).into_iter().map(|(_, t)| t).collect();
        assert_eq!(got, ["b", "b", "b", "a"]);
    }

    #[test]
    fn typedef_names_make_declarations() {
        let src = "int f(int a){ T *p = 0; return a * 2; }";
        let opts = SiteOptions { type_names: ["T".to_string()].into(), ..Default::default() };
        let got = enumerate_sites("t.c", src, "f", &[Operator::Aor], &opts).unwrap();
        assert_eq!(got.len(), 1);
        assert_eq!(src[got[0].start..].chars().next(), Some('*'));
        assert!(got[0].start > src.find("return").unwrap());
    }

    #[test]
    fn ordered_by_offset_and_deterministic() {
        let src = "int f(int a,int b){ if (a < b && a > 0) a = a - b | 1; return a; }";
        let a = enumerate_sites("t.c", src, "f", &Operator::ALL, &SiteOptions::default()).unwrap();
        let b = enumerate_sites("t.c", src, "f", &Operator::ALL, &SiteOptions::default()).unwrap();
        assert_eq!(a, b);
        assert!(a.windows(2).all(|w| (w[0].start, w[0].kind) <= (w[1].start, w[1].kind)));
    }

    #[test]
    fn missing_function_is_parse_failure() {
        let e = enumerate_sites("t.c", "int g(void){return 0;}", "f", &Operator::ALL, &SiteOptions::default());
        assert!(matches!(e, Err(MutagenError::ParseFailure(_))));
    }
}
