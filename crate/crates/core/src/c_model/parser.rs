//! Recursive-descent parser for the supported declaration subset.

use indexmap::IndexMap;

use super::{CModelError, CType, Decl, EnumDef, Enumerator, Field, FunctionSignature, IntWidth, Param, Record, Role, TypeEnvironment};
use crate::lexer::{self, Location, Token, TokenKind};

#[derive(Debug, Clone, Copy)]
pub struct ParseConfig {
    /// Skip preprocessor lines instead of reporting them as syntax errors.
    pub strip_directives: bool,
}

impl Default for ParseConfig {
    fn default() -> Self {
        ParseConfig { strip_directives: true }
    }
}

/// Result of parsing: the environment plus per-declaration diagnostics.
#[derive(Debug, Clone, Default)]
pub struct Parsed {
    pub env: TypeEnvironment,
    pub diagnostics: Vec<CModelError>,
}

/// Parse `source` into a [`TypeEnvironment`].
///
/// Only lexical failures abort the whole parse. Anything else is reported
/// for the offending declaration and parsing resumes at the next one.
pub fn parse_declarations(source: &str, config: &ParseConfig) -> Result<Parsed, CModelError> {
    let tokens = lexer::tokenize(source)?;
    let mut diagnostics = Vec::new();
    let mut kept = Vec::with_capacity(tokens.len());
    for t in tokens {
        match t.kind {
            TokenKind::Comment => {}
            TokenKind::Directive if config.strip_directives => {}
            TokenKind::Directive => diagnostics.push(CModelError::Syntax {
                location: Location::at(source, t.span.start),
                message: "preprocessor directive in preprocessed input".into(),
            }),
            _ => kept.push(t),
        }
    }
    let mut p = Parser { src: source, toks: kept, pos: 0, env: TypeEnvironment::default(), constants: IndexMap::new() };
    while !p.at_end() {
        let start = p.pos;
        if let Err(e) = p.external_decl() {
            diagnostics.push(e);
            p.pos = start;
            p.recover();
        }
    }
    Ok(Parsed { env: p.env, diagnostics })
}

struct Parser<'s> {
    src: &'s str,
    toks: Vec<Token>,
    pos: usize,
    env: TypeEnvironment,
    constants: IndexMap<String, i64>,
}

struct Declarator {
    name: Option<String>,
    ty: CType,
    /// Present when the declarator declares a function.
    params: Option<Vec<Param>>,
    array_dims_on_name: Vec<u64>,
    location: usize,
}

type PResult<T> = Result<T, CModelError>;

const QUALIFIERS: &[&str] = &["const", "volatile", "restrict", "__restrict", "__restrict__", "__const", "__volatile__"];
const STORAGE: &[&str] = &[
    "static", "extern", "inline", "__inline", "__inline__", "register", "auto", "_Noreturn", "__extension__", "_Thread_local",
];
const TYPE_KEYWORDS: &[&str] = &["void", "char", "short", "int", "long", "signed", "unsigned", "float", "double", "_Bool", "bool"];

/// Fixed-width aliases recognized without a header.
fn builtin_type(name: &str) -> Option<CType> {
    use IntWidth::*;
    let t = match name {
        "int8_t" => CType::int(true, W8),
        "int16_t" => CType::int(true, W16),
        "int32_t" => CType::int(true, W32),
        "int64_t" | "ssize_t" | "ptrdiff_t" | "intptr_t" => CType::int(true, W64),
        "uint8_t" => CType::int(false, W8),
        "uint16_t" => CType::int(false, W16),
        "uint32_t" => CType::int(false, W32),
        "uint64_t" | "size_t" | "uintptr_t" => CType::int(false, W64),
        _ => return None,
    };
    Some(t)
}

impl<'s> Parser<'s> {
    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn peek_text(&self) -> Option<&'s str> {
        self.toks.get(self.pos).map(|t| t.text(self.src))
    }

    fn peek_at(&self, k: usize) -> Option<&'s str> {
        self.toks.get(self.pos + k).map(|t| t.text(self.src))
    }

    fn peek_is(&self, s: &str) -> bool {
        self.peek_text() == Some(s)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.src.len(), |t| t.span.start)
    }

    fn loc(&self, offset: usize) -> Location {
        Location::at(self.src, offset)
    }

    fn syntax<T>(&self, message: impl Into<String>) -> PResult<T> {
        Err(CModelError::Syntax { location: self.loc(self.offset()), message: message.into() })
    }

    fn unsupported<T>(&self, offset: usize, construct: &str) -> PResult<T> {
        Err(CModelError::Unsupported { location: self.loc(offset), construct: construct.into() })
    }

    fn eat(&mut self, s: &str) -> bool {
        if self.peek_is(s) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> PResult<()> {
        if self.eat(s) {
            Ok(())
        } else {
            let found = self.peek_text().unwrap_or("end of input");
            self.syntax(format!("expected `{s}`, found `{found}`"))
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.toks.get(self.pos) {
            Some(t) if t.kind == TokenKind::Ident => {
                self.pos += 1;
                Ok(t.text(self.src).to_string())
            }
            _ => self.syntax("expected identifier"),
        }
    }

    fn is_type_name(&self, name: &str) -> bool {
        self.env.typedefs.contains_key(name) || builtin_type(name).is_some()
    }

    fn starts_type(&self) -> bool {
        match self.peek_text() {
            Some(t) => {
                TYPE_KEYWORDS.contains(&t)
                    || QUALIFIERS.contains(&t)
                    || matches!(t, "struct" | "union" | "enum" | "_Atomic")
                    || self.is_type_name(t)
            }
            None => false,
        }
    }

    /// Skip past the declaration that failed to parse.
    fn recover(&mut self) {
        let mut depth = 0i32;
        let mut body_follows_paren = false;
        while let Some(t) = self.peek_text() {
            self.pos += 1;
            match t {
                "(" | "[" => depth += 1,
                ")" | "]" => depth -= 1,
                "{" => {
                    if depth == 0 {
                        body_follows_paren = self.pos >= 2 && self.toks[self.pos - 2].text(self.src) == ")";
                    }
                    depth += 1;
                }
                "}" => {
                    depth -= 1;
                    if depth == 0 {
                        if self.eat(";") || body_follows_paren {
                            return;
                        }
                    }
                }
                ";" if depth == 0 => return,
                _ => {}
            }
        }
    }

    fn skip_attributes(&mut self) -> PResult<()> {
        while matches!(self.peek_text(), Some("__attribute__") | Some("__attribute") | Some("__asm__") | Some("__asm")) {
            self.pos += 1;
            self.skip_balanced("(", ")")?;
        }
        Ok(())
    }

    fn skip_balanced(&mut self, open: &str, close: &str) -> PResult<()> {
        self.expect(open)?;
        let mut depth = 1;
        while depth > 0 {
            match self.peek_text() {
                None => return self.syntax(format!("unbalanced `{open}`")),
                Some(t) if t == open => depth += 1,
                Some(t) if t == close => depth -= 1,
                _ => {}
            }
            self.pos += 1;
        }
        Ok(())
    }

    fn external_decl(&mut self) -> PResult<()> {
        if self.eat(";") {
            return Ok(());
        }
        let is_typedef = self.eat("typedef");
        let (base, defined_tag) = self.decl_specifiers()?;
        if self.eat(";") {
            if let Some(tag) = defined_tag {
                self.env.order.push(Decl::Tag(tag));
            } else if is_typedef {
                return self.syntax("typedef without a name");
            }
            return Ok(());
        }
        let mut first = true;
        loop {
            let d = self.declarator(&base, false)?;
            self.skip_attributes()?;
            let name = d.name.clone().expect("named declarator");
            if is_typedef {
                if d.params.is_some() {
                    return self.unsupported(d.location, "function type typedef");
                }
                let ty = apply_dims(d.ty, &d.array_dims_on_name);
                self.check_array_lengths(&ty, d.location)?;
                if self.env.typedefs.insert(name.clone(), ty).is_none() {
                    self.env.order.push(Decl::Typedef(name));
                }
            } else if let Some(params) = d.params {
                if !d.array_dims_on_name.is_empty() {
                    return self.unsupported(d.location, "function returning array");
                }
                let sig = FunctionSignature { name: name.clone(), params, return_type: d.ty };
                let is_definition = first && self.peek_is("{");
                if self.env.signatures.insert(name.clone(), sig).is_none() {
                    self.env.order.push(Decl::Function(name));
                }
                if is_definition {
                    self.skip_balanced("{", "}")?;
                    return Ok(());
                }
            } else {
                // object declaration: a tag defined inline must still be printed
                if first {
                    if let Some(tag) = &defined_tag {
                        self.env.order.push(Decl::Tag(tag.clone()));
                    }
                }
                if self.eat("=") {
                    self.skip_initializer()?;
                }
            }
            first = false;
            if self.eat(",") {
                continue;
            }
            if self.eat(";") {
                return Ok(());
            }
            return self.syntax("expected `,` or `;` after declarator");
        }
    }

    fn skip_initializer(&mut self) -> PResult<()> {
        let mut depth = 0i32;
        while let Some(t) = self.peek_text() {
            match t {
                "(" | "[" | "{" => depth += 1,
                ")" | "]" | "}" => depth -= 1,
                "," | ";" if depth == 0 => return Ok(()),
                _ => {}
            }
            self.pos += 1;
        }
        self.syntax("unterminated initializer")
    }

    /// Parse specifiers and qualifiers. Returns the base type and the tag
    /// of a struct/union/enum defined (with a body) by these specifiers.
    fn decl_specifiers(&mut self) -> PResult<(CType, Option<String>)> {
        let start = self.offset();
        let mut words: Vec<&str> = Vec::new();
        let mut base: Option<CType> = None;
        let mut defined_tag = None;
        loop {
            self.skip_attributes()?;
            let Some(t) = self.peek_text() else { break };
            if QUALIFIERS.contains(&t) || STORAGE.contains(&t) {
                self.pos += 1;
            } else if t == "_Atomic" {
                return self.unsupported(self.offset(), "_Atomic");
            } else if t == "typedef" {
                return self.syntax("misplaced `typedef`");
            } else if TYPE_KEYWORDS.contains(&t) {
                words.push(t);
                self.pos += 1;
            } else if matches!(t, "struct" | "union" | "enum") && base.is_none() && words.is_empty() {
                let (ty, tag) = self.tagged_specifier()?;
                base = Some(ty);
                defined_tag = tag;
            } else if self.is_type_name(t) && base.is_none() && words.is_empty() {
                self.pos += 1;
                base = Some(if self.env.typedefs.contains_key(t) {
                    CType::alias(t)
                } else {
                    builtin_type(t).expect("builtin")
                });
            } else {
                break;
            }
        }
        if let Some(b) = base {
            if !words.is_empty() {
                return self.syntax("conflicting type specifiers");
            }
            return Ok((b, defined_tag));
        }
        if words.is_empty() {
            return match self.toks.get(self.pos) {
                Some(t) if t.kind == TokenKind::Ident => self.syntax(format!("unknown type name `{}`", t.text(self.src))),
                _ => self.syntax("expected type specifier"),
            };
        }
        keywords_to_type(&words).ok_or_else(|| CModelError::Syntax {
            location: self.loc(start),
            message: format!("invalid type specifier combination `{}`", words.join(" ")),
        }).map(|t| (t, None))
    }

    fn tagged_specifier(&mut self) -> PResult<(CType, Option<String>)> {
        let kw = self.peek_text().unwrap();
        self.pos += 1;
        self.skip_attributes()?;
        let tag = match self.toks.get(self.pos) {
            Some(t) if t.kind == TokenKind::Ident => {
                self.pos += 1;
                Some(t.text(self.src).to_string())
            }
            _ => None,
        };
        if !self.peek_is("{") {
            let Some(tag) = tag else { return self.syntax(format!("`{kw}` without tag or body")) };
            let ty = match kw {
                "struct" => CType::Struct(Record { tag: Some(tag), fields: None }),
                "union" => CType::Union(Record { tag: Some(tag), fields: None }),
                _ => CType::Enum(EnumDef { tag: Some(tag), enumerators: None }),
            };
            return Ok((ty, None));
        }
        let ty = if kw == "enum" {
            CType::Enum(EnumDef { tag: tag.clone(), enumerators: Some(self.enum_body()?) })
        } else {
            let fields = self.record_body()?;
            let rec = Record { tag: tag.clone(), fields: Some(fields) };
            if kw == "struct" {
                CType::Struct(rec)
            } else {
                CType::Union(rec)
            }
        };
        self.skip_attributes()?;
        if let Some(tag) = &tag {
            self.env.tags.insert(tag.clone(), ty.clone());
        }
        Ok((ty, tag))
    }

    fn enum_body(&mut self) -> PResult<Vec<Enumerator>> {
        self.expect("{")?;
        let mut out = Vec::new();
        let mut next = 0i64;
        while !self.eat("}") {
            let name = self.ident()?;
            if self.eat("=") {
                next = self.const_expr()?;
            }
            if self.constants.contains_key(&name) {
                return self.syntax(format!("redefinition of enumerator `{name}`"));
            }
            self.constants.insert(name.clone(), next);
            out.push(Enumerator { name, value: next });
            next += 1;
            if !self.eat(",") {
                self.expect("}")?;
                break;
            }
        }
        if out.is_empty() {
            return self.syntax("empty enum");
        }
        Ok(out)
    }

    fn record_body(&mut self) -> PResult<Vec<Field>> {
        self.expect("{")?;
        let mut fields: Vec<Field> = Vec::new();
        while !self.eat("}") {
            let spec_start = self.offset();
            let (base, _) = self.decl_specifiers()?;
            if self.peek_is(";") {
                if matches!(base, CType::Struct(_) | CType::Union(_)) {
                    return self.unsupported(spec_start, "anonymous member");
                }
                return self.syntax("declaration does not declare a field");
            }
            loop {
                if self.peek_is(":") {
                    return self.unsupported(self.offset(), "bitfield");
                }
                let d = self.declarator(&base, false)?;
                if self.peek_is(":") {
                    return self.unsupported(self.offset(), "bitfield");
                }
                if d.params.is_some() {
                    return self.unsupported(d.location, "function member");
                }
                let name = d.name.expect("named declarator");
                let ty = apply_dims(d.ty, &d.array_dims_on_name);
                self.check_array_lengths(&ty, d.location)?;
                if fields.iter().any(|f| f.name == name) {
                    return Err(CModelError::Syntax { location: self.loc(d.location), message: format!("duplicate field `{name}`") });
                }
                fields.push(Field { name, ty });
                self.skip_attributes()?;
                if !self.eat(",") {
                    break;
                }
            }
            self.expect(";")?;
        }
        Ok(fields)
    }

    fn check_array_lengths(&self, ty: &CType, at: usize) -> PResult<()> {
        if let CType::Array { element, length } = ty {
            if *length == 0 {
                return self.unsupported(at, "zero-length array");
            }
            self.check_array_lengths(element, at)?;
        }
        Ok(())
    }

    fn declarator(&mut self, base: &CType, abstract_ok: bool) -> PResult<Declarator> {
        let mut ty = base.clone();
        while self.eat("*") {
            ty = CType::pointer(ty);
            while let Some(t) = self.peek_text() {
                if t == "_Atomic" {
                    return self.unsupported(self.offset(), "_Atomic");
                }
                if QUALIFIERS.contains(&t) {
                    self.pos += 1;
                } else {
                    break;
                }
            }
        }
        self.skip_attributes()?;
        if self.peek_is("(") && matches!(self.peek_at(1), Some("*") | Some("^") | Some("(")) {
            let at = self.offset();
            let save = self.pos;
            self.skip_balanced("(", ")")?;
            let construct = if self.peek_is("(") { "function pointer" } else { "parenthesized declarator" };
            self.pos = save;
            return self.unsupported(at, construct);
        }
        let location = self.offset();
        let name = match self.toks.get(self.pos) {
            Some(t) if t.kind == TokenKind::Ident && !self.is_keyword(t.text(self.src)) => {
                self.pos += 1;
                Some(t.text(self.src).to_string())
            }
            _ if abstract_ok => None,
            _ => return self.syntax("expected declarator name"),
        };
        let mut dims = Vec::new();
        let mut params = None;
        loop {
            if self.peek_is("[") {
                let at = self.offset();
                self.pos += 1;
                while self.peek_text().is_some_and(|t| QUALIFIERS.contains(&t) || t == "static") {
                    self.pos += 1;
                }
                if self.eat("]") {
                    dims.push(None);
                    continue;
                }
                let len = match self.const_expr() {
                    Ok(v) => v,
                    Err(_) => return self.unsupported(at, "variable length array"),
                };
                self.expect("]")?;
                if len < 0 {
                    return self.syntax("negative array length");
                }
                dims.push(Some(len as u64));
            } else if self.peek_is("(") && params.is_none() && dims.is_empty() {
                params = Some(self.param_list()?);
            } else {
                break;
            }
        }
        // unsized dims only allowed in parameter position, handled by the caller
        let mut fixed = Vec::new();
        for (i, d) in dims.iter().enumerate() {
            match d {
                Some(n) => fixed.push(*n),
                None if i == 0 && abstract_ok => fixed.push(0),
                None => return self.unsupported(location, "flexible or unsized array"),
            }
        }
        Ok(Declarator { name, ty, params, array_dims_on_name: fixed, location })
    }

    fn is_keyword(&self, t: &str) -> bool {
        TYPE_KEYWORDS.contains(&t)
            || QUALIFIERS.contains(&t)
            || STORAGE.contains(&t)
            || matches!(t, "struct" | "union" | "enum" | "typedef")
    }

    fn param_list(&mut self) -> PResult<Vec<Param>> {
        self.expect("(")?;
        if self.eat(")") {
            return Ok(Vec::new());
        }
        if self.peek_is("void") && self.peek_at(1) == Some(")") {
            self.pos += 2;
            return Ok(Vec::new());
        }
        let mut params = Vec::new();
        loop {
            if self.peek_is("...") {
                return self.unsupported(self.offset(), "variadic function");
            }
            if !self.starts_type() {
                return match self.toks.get(self.pos) {
                    Some(t) if t.kind == TokenKind::Ident => self.syntax(format!("unknown type name `{}`", t.text(self.src))),
                    _ => self.syntax("expected parameter declaration"),
                };
            }
            let (base, _) = self.decl_specifiers()?;
            let d = self.declarator(&base, true)?;
            if d.params.is_some() {
                return self.unsupported(d.location, "function pointer");
            }
            let name = d.name.unwrap_or_else(|| format!("arg{}", params.len()));
            let (ty, pointed_length, array_decl) = match d.array_dims_on_name.split_first() {
                None => (d.ty, None, false),
                Some((&first, rest)) => {
                    let elem = apply_dims(d.ty, rest);
                    self.check_array_lengths(&elem, d.location)?;
                    (CType::pointer(elem), (first > 0).then_some(first), true)
                }
            };
            if ty == CType::Void {
                return self.syntax("parameter of type void");
            }
            params.push(Param { name, ty, role: Role::Auto, pointed_length, array_decl });
            if self.eat(")") {
                break;
            }
            self.expect(",")?;
        }
        Ok(params)
    }

    // --- constant expressions -------------------------------------------

    fn const_expr(&mut self) -> PResult<i64> {
        self.const_binary(0)
    }

    fn const_binary(&mut self, min_prec: u8) -> PResult<i64> {
        let mut lhs = self.const_unary()?;
        loop {
            let Some(op) = self.peek_text() else { break };
            let prec = match op {
                "|" => 1,
                "^" => 2,
                "&" => 3,
                "<<" | ">>" => 4,
                "+" | "-" => 5,
                "*" | "/" | "%" => 6,
                _ => break,
            };
            if prec < min_prec {
                break;
            }
            self.pos += 1;
            let rhs = self.const_binary(prec + 1)?;
            lhs = match op {
                "|" => lhs | rhs,
                "^" => lhs ^ rhs,
                "&" => lhs & rhs,
                "<<" => lhs.checked_shl(rhs as u32).unwrap_or(0),
                ">>" => lhs.checked_shr(rhs as u32).unwrap_or(0),
                "+" => lhs.wrapping_add(rhs),
                "-" => lhs.wrapping_sub(rhs),
                "*" => lhs.wrapping_mul(rhs),
                "/" | "%" if rhs == 0 => return self.syntax("division by zero in constant expression"),
                "/" => lhs / rhs,
                _ => lhs % rhs,
            };
        }
        Ok(lhs)
    }

    fn const_unary(&mut self) -> PResult<i64> {
        let Some(tok) = self.toks.get(self.pos).cloned() else { return self.syntax("expected constant") };
        let text = tok.text(self.src);
        self.pos += 1;
        match (tok.kind, text) {
            (TokenKind::Punct, "-") => Ok(self.const_unary()?.wrapping_neg()),
            (TokenKind::Punct, "+") => self.const_unary(),
            (TokenKind::Punct, "~") => Ok(!self.const_unary()?),
            (TokenKind::Punct, "(") => {
                let v = self.const_expr()?;
                self.expect(")")?;
                Ok(v)
            }
            (TokenKind::Int, _) => match lexer::parse_int_literal(text) {
                Some((v, _)) => Ok(v as i64),
                None => {
                    self.pos -= 1;
                    self.syntax(format!("bad integer literal `{text}`"))
                }
            },
            (TokenKind::Char, _) => {
                let inner = &text[1..text.len() - 1];
                let v = match inner {
                    "\\0" => 0,
                    "\\n" => 10,
                    "\\t" => 9,
                    "\\\\" => 92,
                    "\\'" => 39,
                    s if s.len() == 1 => s.as_bytes()[0] as i64,
                    _ => {
                        self.pos -= 1;
                        return self.syntax("unsupported character constant");
                    }
                };
                Ok(v)
            }
            (TokenKind::Ident, name) => match self.constants.get(name) {
                Some(v) => Ok(*v),
                None => {
                    self.pos -= 1;
                    self.syntax(format!("`{name}` is not a constant"))
                }
            },
            _ => {
                self.pos -= 1;
                self.syntax("expected constant")
            }
        }
    }
}

/// `int a[2][3]` declares an array of 2 arrays of 3 ints.
fn apply_dims(base: CType, dims: &[u64]) -> CType {
    dims.iter().rev().fold(base, |ty, &n| CType::array(ty, n))
}

fn keywords_to_type(words: &[&str]) -> Option<CType> {
    use IntWidth::*;
    let count = |w: &str| words.iter().filter(|x| **x == w).count();
    let signed = count("signed");
    let unsigned = count("unsigned");
    let long = count("long");
    let short = count("short");
    let (int, chr) = (count("int"), count("char"));
    if signed + unsigned > 1 || long > 2 || short > 1 || int > 1 || chr > 1 {
        return None;
    }
    let others: Vec<&&str> = words
        .iter()
        .filter(|w| !matches!(**w, "signed" | "unsigned" | "long" | "short" | "int" | "char"))
        .collect();
    if let [single] = others.as_slice() {
        if words.len() == 1 || (**single == "double" && long == 1 && words.len() == 2) {
            return match **single {
                "void" => Some(CType::Void),
                "_Bool" | "bool" => Some(CType::Bool),
                "float" => Some(CType::Float32),
                // long double is outside the modeled kinds
                "double" if long == 0 => Some(CType::Float64),
                _ => None,
            };
        }
        return None;
    }
    if !others.is_empty() {
        return None;
    }
    let is_signed = unsigned == 0;
    if chr == 1 {
        if long + short + int > 0 {
            return None;
        }
        return Some(if signed + unsigned == 0 { CType::Char } else { CType::int(is_signed, W8) });
    }
    if short == 1 {
        return (long == 0).then(|| CType::int(is_signed, W16));
    }
    Some(match long {
        0 => CType::int(is_signed, W32),
        _ => CType::int(is_signed, W64),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(src: &str) -> Parsed {
        parse_declarations(src, &ParseConfig::default()).unwrap()
    }

    #[test]
    fn typedef_and_prototype() {
        let p = parse("typedef int myint; int f(myint x);");
        assert!(p.diagnostics.is_empty(), "{:?}", p.diagnostics);
        assert_eq!(p.env.typedefs["myint"], CType::int(true, IntWidth::W32));
        let f = &p.env.signatures["f"];
        assert_eq!(f.params.len(), 1);
        assert_eq!(f.params[0].name, "x");
        assert_eq!(f.params[0].ty, CType::alias("myint"));
        assert_eq!(f.return_type, CType::int(true, IntWidth::W32));
    }

    #[test]
    fn function_pointer_parameter_is_diagnosed() {
        let p = parse("void g(int (*cb)(int)); int ok(void);");
        assert_eq!(p.diagnostics.len(), 1);
        match &p.diagnostics[0] {
            CModelError::Unsupported { construct, location } => {
                assert_eq!(construct, "function pointer");
                assert_eq!(location.line, 1);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(!p.env.signatures.contains_key("g"));
        assert!(p.env.signatures.contains_key("ok"));
    }

    #[test]
    fn keyword_combinations() {
        use IntWidth::*;
        let cases = [
            ("unsigned", CType::int(false, W32)),
            ("long long", CType::int(true, W64)),
            ("unsigned long int", CType::int(false, W64)),
            ("short", CType::int(true, W16)),
            ("unsigned char", CType::int(false, W8)),
            ("signed char", CType::int(true, W8)),
            ("char", CType::Char),
            ("_Bool", CType::Bool),
            ("double", CType::Float64),
        ];
        for (src, want) in cases {
            let p = parse(&format!("typedef {src} t;"));
            assert_eq!(p.env.typedefs["t"], want, "{src}");
        }
        assert!(!parse("typedef long double t;").diagnostics.is_empty());
        assert!(!parse("typedef short long t;").diagnostics.is_empty());
    }

    #[test]
    fn unsupported_constructs() {
        let cases = [
            ("struct s { int a : 3; };", "bitfield"),
            ("int v(int n, ...);", "variadic function"),
            ("typedef _Atomic int ai;", "_Atomic"),
            ("struct s { int n; int a[]; };", "flexible or unsized array"),
            ("struct s { union { int a; float b; }; };", "anonymous member"),
            ("int f(int n, int a[n]);", "variable length array"),
        ];
        for (src, construct) in cases {
            let p = parse(src);
            assert!(
                matches!(&p.diagnostics[..], [CModelError::Unsupported { construct: c, .. }] if c == construct),
                "{src}: {:?}",
                p.diagnostics
            );
        }
    }

    #[test]
    fn definitions_are_skipped_and_recorded() {
        let p = parse("static int add(int a, int b) { if (a) { return a + b; } return b; }\nint after(void);");
        assert!(p.diagnostics.is_empty());
        assert_eq!(p.env.signatures["add"].params.len(), 2);
        assert!(p.env.signatures.contains_key("after"));
    }

    #[test]
    fn recovery_continues_after_bad_definition() {
        let p = parse("void bad(int (*f)(void)) { return; }\nint good(int x) { return x; }");
        assert_eq!(p.diagnostics.len(), 1);
        assert!(p.env.signatures.contains_key("good"));
    }

    #[test]
    fn array_params_decay() {
        let p = parse("int s(const unsigned char buf[8], int m[][3], char *t);");
        let sig = &p.env.signatures["s"];
        assert_eq!(sig.params[0].ty, CType::pointer(CType::int(false, IntWidth::W8)));
        assert_eq!(sig.params[0].pointed_length, Some(8));
        assert!(sig.params[0].array_decl);
        assert_eq!(sig.params[1].ty, CType::pointer(CType::array(CType::int(true, IntWidth::W32), 3)));
        assert_eq!(sig.params[1].pointed_length, None);
        assert!(!sig.params[2].array_decl);
    }

    #[test]
    fn enum_values_and_constant_dims() {
        let p = parse("enum e { A, B = 5, C, D = B * 2 }; typedef int arr[C + 1];");
        assert!(p.diagnostics.is_empty(), "{:?}", p.diagnostics);
        let CType::Enum(EnumDef { enumerators: Some(list), .. }) = &p.env.tags["e"] else { panic!() };
        let vals: Vec<i64> = list.iter().map(|e| e.value).collect();
        assert_eq!(vals, [0, 5, 6, 10]);
        assert_eq!(p.env.typedefs["arr"], CType::array(CType::int(true, IntWidth::W32), 7));
    }

    #[test]
    fn unknown_type_names_are_diagnosed_per_declaration() {
        let p = parse("int f(FILE *fp); int g(int);");
        assert_eq!(p.diagnostics.len(), 1);
        assert!(p.env.signatures.contains_key("g"));
        assert_eq!(p.env.signatures["g"].params[0].name, "arg0");
    }

    #[test]
    fn directives_stripped_or_reported() {
        let src = "#include <stdio.h>\nint f(void);";
        assert!(parse(src).diagnostics.is_empty());
        let strict = parse_declarations(src, &ParseConfig { strip_directives: false }).unwrap();
        assert_eq!(strict.diagnostics.len(), 1);
        assert!(strict.env.signatures.contains_key("f"));
    }

    #[test]
    fn lexical_failure_is_global() {
        assert!(parse_declarations("int f(void); /*", &ParseConfig::default()).is_err());
    }

    #[test]
    fn duplicate_fields_rejected() {
        let p = parse("struct s { int a; char a; };");
        assert!(matches!(&p.diagnostics[..], [CModelError::Syntax { .. }]));
    }
}
