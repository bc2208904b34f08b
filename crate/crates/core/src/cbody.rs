//! Token-level view of C function bodies: locating definitions and
//! splitting bodies into statements. No expression parsing is done; this is
//! enough for statement deletion, site discovery and block instrumentation.

use std::collections::BTreeSet;
use std::ops::Range;

use thiserror::Error;

use crate::lexer::{self, LexError, Location, Token, TokenKind};

pub const C_KEYWORDS: &[&str] = &[
    "auto", "break", "case", "char", "const", "continue", "default", "do", "double", "else", "enum", "extern", "float",
    "for", "goto", "if", "inline", "int", "long", "register", "restrict", "return", "short", "signed", "sizeof",
    "static", "struct", "switch", "typedef", "union", "unsigned", "void", "volatile", "while", "_Bool", "bool",
    "_Alignof", "_Static_assert", "_Noreturn", "_Thread_local", "_Atomic",
];

const TYPE_START: &[&str] = &[
    "char", "short", "int", "long", "signed", "unsigned", "float", "double", "_Bool", "bool", "void", "struct", "union",
    "enum", "const", "volatile", "static", "register", "extern", "auto", "_Thread_local", "int8_t", "int16_t",
    "int32_t", "int64_t", "uint8_t", "uint16_t", "uint32_t", "uint64_t", "size_t", "ssize_t", "ptrdiff_t",
    "intptr_t", "uintptr_t",
];

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ScanError {
    #[error(transparent)]
    Lex(#[from] LexError),
    #[error("{location}: {message}")]
    Syntax { location: Location, message: String },
    #[error("function `{0}` has no definition in this source")]
    NoDefinition(String),
}

/// A tokenized source file. `toks` holds significant tokens only.
#[derive(Debug, Clone)]
pub struct TokenizedSource<'s> {
    pub src: &'s str,
    pub toks: Vec<Token>,
}

impl<'s> TokenizedSource<'s> {
    pub fn new(src: &'s str) -> Result<Self, ScanError> {
        Ok(TokenizedSource { src, toks: lexer::significant(lexer::tokenize(src)?) })
    }

    pub fn text(&self, i: usize) -> &'s str {
        self.toks.get(i).map_or("", |t| t.text(self.src))
    }

    pub fn kind(&self, i: usize) -> Option<TokenKind> {
        self.toks.get(i).map(|t| t.kind)
    }

    fn error<T>(&self, i: usize, message: impl Into<String>) -> Result<T, ScanError> {
        let offset = self.toks.get(i).map_or(self.src.len(), |t| t.span.start);
        Err(ScanError::Syntax { location: Location::at(self.src, offset), message: message.into() })
    }

    /// Index of the token closing the bracket opened at `open`.
    pub fn matching(&self, open: usize) -> Result<usize, ScanError> {
        let (o, c) = match self.text(open) {
            "(" => ("(", ")"),
            "[" => ("[", "]"),
            "{" => ("{", "}"),
            _ => return self.error(open, "not an opening bracket"),
        };
        let mut depth = 0usize;
        for i in open..self.toks.len() {
            let t = self.text(i);
            if t == o {
                depth += 1;
            } else if t == c {
                depth -= 1;
                if depth == 0 {
                    return Ok(i);
                }
            }
        }
        self.error(open, format!("unbalanced `{o}`"))
    }

    /// All function definitions at file scope, in source order.
    pub fn function_definitions(&self) -> Result<Vec<FunctionDef>, ScanError> {
        let mut out = Vec::new();
        let mut i = 0;
        while i < self.toks.len() {
            match self.text(i) {
                "{" => {
                    let close = self.matching(i)?;
                    if let Some(def) = self.definition_ending_at(i, close) {
                        out.push(def);
                    }
                    i = close + 1;
                }
                "(" | "[" => i = self.matching(i)? + 1,
                _ => i += 1,
            }
        }
        Ok(out)
    }

    fn definition_ending_at(&self, body_open: usize, body_close: usize) -> Option<FunctionDef> {
        // skip trailing attributes between `)` and `{`
        let mut j = body_open.checked_sub(1)?;
        while self.text(j) == ")" {
            let open = self.matching_backward(j)?;
            let before = open.checked_sub(1)?;
            if matches!(self.text(before), "__attribute__" | "__attribute") {
                j = before.checked_sub(1)?;
                continue;
            }
            if self.kind(before) == Some(TokenKind::Ident) && !C_KEYWORDS.contains(&self.text(before)) {
                return Some(FunctionDef {
                    name: self.text(before).to_string(),
                    name_tok: before,
                    params: open..j + 1,
                    body: body_open..body_close + 1,
                });
            }
            return None;
        }
        None
    }

    fn matching_backward(&self, close: usize) -> Option<usize> {
        let mut depth = 0usize;
        for i in (0..=close).rev() {
            match self.text(i) {
                ")" => depth += 1,
                "(" => {
                    depth -= 1;
                    if depth == 0 {
                        return Some(i);
                    }
                }
                _ => {}
            }
        }
        None
    }

    pub fn find_definition(&self, name: &str) -> Result<FunctionDef, ScanError> {
        self.function_definitions()?
            .into_iter()
            .find(|d| d.name == name)
            .ok_or_else(|| ScanError::NoDefinition(name.to_string()))
    }

    /// Byte span covering tokens `range`.
    pub fn span(&self, range: Range<usize>) -> Range<usize> {
        self.toks[range.start].span.start..self.toks[range.end - 1].span.end
    }
}

/// Token indices of one function definition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionDef {
    pub name: String,
    pub name_tok: usize,
    /// `(` .. `)` inclusive.
    pub params: Range<usize>,
    /// `{` .. `}` inclusive.
    pub body: Range<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LabelKind {
    Case,
    Default,
    Named,
}

/// Statement tree over token indices. Ranges are half-open token ranges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Stmt {
    Compound { range: Range<usize>, items: Vec<Stmt> },
    If { range: Range<usize>, cond: Range<usize>, then: Box<Stmt>, else_kw: Option<usize>, els: Option<Box<Stmt>> },
    While { range: Range<usize>, cond: Range<usize>, body: Box<Stmt> },
    DoWhile { range: Range<usize>, body: Box<Stmt>, cond: Range<usize> },
    For { range: Range<usize>, header: Range<usize>, body: Box<Stmt> },
    Switch { range: Range<usize>, cond: Range<usize>, body: Box<Stmt> },
    Labeled { range: Range<usize>, kind: LabelKind, colon: usize, stmt: Box<Stmt> },
    Expr { range: Range<usize> },
    Decl { range: Range<usize> },
    Jump { range: Range<usize> },
    Empty { range: Range<usize> },
}

impl Stmt {
    pub fn range(&self) -> &Range<usize> {
        match self {
            Stmt::Compound { range, .. }
            | Stmt::If { range, .. }
            | Stmt::While { range, .. }
            | Stmt::DoWhile { range, .. }
            | Stmt::For { range, .. }
            | Stmt::Switch { range, .. }
            | Stmt::Labeled { range, .. }
            | Stmt::Expr { range }
            | Stmt::Decl { range }
            | Stmt::Jump { range }
            | Stmt::Empty { range } => range,
        }
    }

    /// Pre-order traversal.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a Stmt)) {
        f(self);
        match self {
            Stmt::Compound { items, .. } => items.iter().for_each(|s| s.walk(f)),
            Stmt::If { then, els, .. } => {
                then.walk(f);
                if let Some(e) = els {
                    e.walk(f);
                }
            }
            Stmt::While { body, .. } | Stmt::DoWhile { body, .. } | Stmt::For { body, .. } | Stmt::Switch { body, .. } => {
                body.walk(f)
            }
            Stmt::Labeled { stmt, .. } => stmt.walk(f),
            _ => {}
        }
    }
}

/// Splits function bodies into statements.
pub struct StmtParser<'a, 's> {
    ts: &'a TokenizedSource<'s>,
    type_names: &'a BTreeSet<String>,
}

impl<'a, 's> StmtParser<'a, 's> {
    pub fn new(ts: &'a TokenizedSource<'s>, type_names: &'a BTreeSet<String>) -> Self {
        StmtParser { ts, type_names }
    }

    pub fn is_type_name(&self, t: &str) -> bool {
        TYPE_START.contains(&t) || self.type_names.contains(t)
    }

    /// Parse the compound statement starting at token `open` (a `{`).
    pub fn body(&self, def: &FunctionDef) -> Result<Stmt, ScanError> {
        let (stmt, end) = self.statement(def.body.start)?;
        debug_assert_eq!(end, def.body.end);
        Ok(stmt)
    }

    /// Parse one statement at `i`; returns it and the index after it.
    pub fn statement(&self, i: usize) -> Result<(Stmt, usize), ScanError> {
        let ts = self.ts;
        let t = ts.text(i);
        if i >= ts.toks.len() {
            return ts.error(i, "unexpected end of input in statement");
        }
        match t {
            "{" => {
                let close = ts.matching(i)?;
                let mut items = Vec::new();
                let mut j = i + 1;
                while j < close {
                    let (s, next) = self.statement(j)?;
                    items.push(s);
                    j = next;
                }
                Ok((Stmt::Compound { range: i..close + 1, items }, close + 1))
            }
            "if" => {
                let cond = self.paren_group(i + 1)?;
                let (then, mut next) = self.statement(cond.end)?;
                let (else_kw, els) = if ts.text(next) == "else" {
                    let kw = next;
                    let (e, n) = self.statement(next + 1)?;
                    next = n;
                    (Some(kw), Some(Box::new(e)))
                } else {
                    (None, None)
                };
                Ok((Stmt::If { range: i..next, cond, then: Box::new(then), else_kw, els }, next))
            }
            "while" => {
                let cond = self.paren_group(i + 1)?;
                let (body, next) = self.statement(cond.end)?;
                Ok((Stmt::While { range: i..next, cond, body: Box::new(body) }, next))
            }
            "for" => {
                let header = self.paren_group(i + 1)?;
                let (body, next) = self.statement(header.end)?;
                Ok((Stmt::For { range: i..next, header, body: Box::new(body) }, next))
            }
            "switch" => {
                let cond = self.paren_group(i + 1)?;
                let (body, next) = self.statement(cond.end)?;
                Ok((Stmt::Switch { range: i..next, cond, body: Box::new(body) }, next))
            }
            "do" => {
                let (body, next) = self.statement(i + 1)?;
                if ts.text(next) != "while" {
                    return ts.error(next, "expected `while` after do body");
                }
                let cond = self.paren_group(next + 1)?;
                if ts.text(cond.end) != ";" {
                    return ts.error(cond.end, "expected `;` after do-while");
                }
                let end = cond.end + 1;
                Ok((Stmt::DoWhile { range: i..end, body: Box::new(body), cond }, end))
            }
            "case" | "default" => {
                let colon = self.label_colon(i)?;
                let (stmt, next) = self.labeled_target(colon + 1)?;
                let kind = if t == "case" { LabelKind::Case } else { LabelKind::Default };
                Ok((Stmt::Labeled { range: i..next, kind, colon, stmt: Box::new(stmt) }, next))
            }
            ";" => Ok((Stmt::Empty { range: i..i + 1 }, i + 1)),
            "return" | "break" | "continue" | "goto" => {
                let end = self.semicolon(i)?;
                Ok((Stmt::Jump { range: i..end + 1 }, end + 1))
            }
            _ if ts.kind(i) == Some(TokenKind::Ident) && ts.text(i + 1) == ":" && !self.is_type_name(t) => {
                let (stmt, next) = self.labeled_target(i + 2)?;
                Ok((Stmt::Labeled { range: i..next, kind: LabelKind::Named, colon: i + 1, stmt: Box::new(stmt) }, next))
            }
            _ => {
                let end = self.semicolon(i)?;
                let range = i..end + 1;
                if self.is_declaration_start(i) {
                    Ok((Stmt::Decl { range }, end + 1))
                } else {
                    Ok((Stmt::Expr { range }, end + 1))
                }
            }
        }
    }

    /// A label directly followed by `}` labels nothing; model it as empty.
    fn labeled_target(&self, i: usize) -> Result<(Stmt, usize), ScanError> {
        if self.ts.text(i) == "}" {
            return Ok((Stmt::Empty { range: i..i }, i));
        }
        self.statement(i)
    }

    fn is_declaration_start(&self, i: usize) -> bool {
        let ts = self.ts;
        let t = ts.text(i);
        if t == "typedef" || t == "_Static_assert" {
            return true;
        }
        if !self.is_type_name(t) {
            return false;
        }
        // `T * x` or `T x`; a typedef name followed by an operator is an expression
        if TYPE_START.contains(&t) {
            return true;
        }
        let next = ts.text(i + 1);
        ts.kind(i + 1) == Some(TokenKind::Ident) || next == "*" || next == "("
    }

    fn paren_group(&self, open: usize) -> Result<Range<usize>, ScanError> {
        if self.ts.text(open) != "(" {
            return self.ts.error(open, "expected `(`");
        }
        Ok(open..self.ts.matching(open)? + 1)
    }

    fn semicolon(&self, mut i: usize) -> Result<usize, ScanError> {
        let ts = self.ts;
        while i < ts.toks.len() {
            match ts.text(i) {
                ";" => return Ok(i),
                "(" | "[" | "{" => i = ts.matching(i)? + 1,
                "}" => return ts.error(i, "expected `;`"),
                _ => i += 1,
            }
        }
        ts.error(i, "expected `;`")
    }

    fn label_colon(&self, mut i: usize) -> Result<usize, ScanError> {
        let ts = self.ts;
        let mut ternary = 0usize;
        while i < ts.toks.len() {
            match ts.text(i) {
                "?" => ternary += 1,
                ":" if ternary > 0 => ternary -= 1,
                ":" => return Ok(i),
                "(" | "[" => i = ts.matching(i)?,
                ";" | "{" | "}" => return ts.error(i, "expected `:` after label"),
                _ => {}
            }
            i += 1;
        }
        ts.error(i, "expected `:`")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<String> {
        let ts = TokenizedSource::new(src).unwrap();
        let def = &ts.function_definitions().unwrap()[0];
        let names = BTreeSet::new();
        let body = StmtParser::new(&ts, &names).body(def).unwrap();
        let mut out = Vec::new();
        body.walk(&mut |s| {
            let k = match s {
                Stmt::Compound { .. } => "block",
                Stmt::If { .. } => "if",
                Stmt::While { .. } => "while",
                Stmt::DoWhile { .. } => "do",
                Stmt::For { .. } => "for",
                Stmt::Switch { .. } => "switch",
                Stmt::Labeled { .. } => "label",
                Stmt::Expr { .. } => "expr",
                Stmt::Decl { .. } => "decl",
                Stmt::Jump { .. } => "jump",
                Stmt::Empty { .. } => "empty",
            };
            out.push(k.to_string());
        });
        out
    }

    #[test]
    fn finds_definitions_not_prototypes() {
        let src = "int p(int);\nstatic int f(int a) { return a; }\nstruct s { int x; };\nvoid g(void) __attribute__((noinline)) { }";
        let ts = TokenizedSource::new(src).unwrap();
        let defs = ts.function_definitions().unwrap();
        let names: Vec<_> = defs.iter().map(|d| d.name.as_str()).collect();
        assert_eq!(names, ["f", "g"]);
    }

    #[test]
    fn statement_kinds() {
        let src = "int f(int x) { int y = 0; if (x <= 0) y++; else { y--; } for (;;) break; \
                   switch (x) { case 1: y = 2; default: ; } do x--; while (x); end: return y; }";
        assert_eq!(
            kinds(src),
            [
                "block", "decl", "if", "expr", "block", "expr", "for", "jump", "switch", "block", "label", "expr", "label",
                "empty", "do", "expr", "label", "jump"
            ]
        );
    }

    #[test]
    fn typedef_names_start_declarations() {
        let src = "int f(void) { T *p; a * b; return 0; }";
        let ts = TokenizedSource::new(src).unwrap();
        let def = ts.find_definition("f").unwrap();
        let names: BTreeSet<String> = ["T".to_string()].into();
        let body = StmtParser::new(&ts, &names).body(&def).unwrap();
        let Stmt::Compound { items, .. } = body else { panic!() };
        assert!(matches!(items[0], Stmt::Decl { .. }));
        assert!(matches!(items[1], Stmt::Expr { .. }));
    }

    #[test]
    fn missing_definition() {
        let ts = TokenizedSource::new("int f(void);").unwrap();
        assert_eq!(ts.find_definition("f"), Err(ScanError::NoDefinition("f".into())));
    }
}
