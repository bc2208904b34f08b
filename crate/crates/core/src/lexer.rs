//! A small C tokenizer shared by the declaration parser, the mutant
//! generator and the coverage instrumenter.
//!
//! Every token keeps its byte span in the original text so that source
//! rewriting can splice replacements without re-printing the file.

use std::fmt;
use std::ops::Range;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TokenKind {
    Ident,
    /// Integer literal (decimal, octal or hex, optional suffix).
    Int,
    Float,
    Str,
    Char,
    Punct,
    Comment,
    /// A whole preprocessor line, including continuations.
    Directive,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub span: Range<usize>,
}

impl Token {
    pub fn text<'a>(&self, src: &'a str) -> &'a str {
        &src[self.span.clone()]
    }

    pub fn is(&self, src: &str, text: &str) -> bool {
        self.text(src) == text
    }
}

/// 1-based line/column of a byte offset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Location {
    pub line: usize,
    pub column: usize,
}

impl Location {
    pub fn at(src: &str, offset: usize) -> Self {
        let offset = offset.min(src.len());
        let before = &src[..offset];
        let line = before.matches('\n').count() + 1;
        let column = offset - before.rfind('\n').map_or(0, |i| i + 1) + 1;
        Location { line, column }
    }
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("{location}: {message}")]
pub struct LexError {
    pub location: Location,
    pub offset: usize,
    pub message: String,
}

const PUNCTUATORS: &[&str] = &[
    "...", "<<=", ">>=", "->", "++", "--", "<<", ">>", "<=", ">=", "==", "!=", "&&", "||", "*=",
    "/=", "%=", "+=", "-=", "&=", "^=", "|=", "##",
];

/// Tokenize `src`. Comments and directives are returned as tokens; callers
/// filter them as needed (see [`significant`]).
pub fn tokenize(src: &str) -> Result<Vec<Token>, LexError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let mut line_start = true;
    let err = |offset: usize, message: &str| LexError {
        location: Location::at(src, offset),
        offset,
        message: message.to_string(),
    };

    while i < bytes.len() {
        let c = bytes[i];
        if c == b'\n' {
            line_start = true;
            i += 1;
            continue;
        }
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if c == b'#' && line_start {
            // directive runs to end of line, honoring backslash continuations
            while i < bytes.len() && bytes[i] != b'\n' {
                if bytes[i] == b'\\' && i + 1 < bytes.len() && bytes[i + 1] == b'\n' {
                    i += 2;
                    continue;
                }
                i += 1;
            }
            out.push(Token { kind: TokenKind::Directive, span: start..i });
            continue;
        }
        line_start = false;

        if c == b'/' && bytes.get(i + 1) == Some(&b'/') {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            out.push(Token { kind: TokenKind::Comment, span: start..i });
            continue;
        }
        if c == b'/' && bytes.get(i + 1) == Some(&b'*') {
            match src[i + 2..].find("*/") {
                Some(end) => i = i + 2 + end + 2,
                None => return Err(err(start, "unterminated comment")),
            }
            out.push(Token { kind: TokenKind::Comment, span: start..i });
            continue;
        }
        if c == b'"' || c == b'\'' {
            i += 1;
            loop {
                match bytes.get(i) {
                    None | Some(b'\n') => {
                        return Err(err(start, "unterminated literal"));
                    }
                    Some(b'\\') => i += 2,
                    Some(&q) if q == c => {
                        i += 1;
                        break;
                    }
                    Some(_) => i += 1,
                }
            }
            let kind = if c == b'"' { TokenKind::Str } else { TokenKind::Char };
            out.push(Token { kind, span: start..i });
            continue;
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            // wide / prefixed literals: L"..", u8"..", U'..'
            if matches!(bytes.get(i), Some(b'"') | Some(b'\'')) && matches!(&src[start..i], "L" | "u" | "U" | "u8") {
                let q = bytes[i];
                i += 1;
                while i < bytes.len() && bytes[i] != q {
                    if bytes[i] == b'\\' {
                        i += 1;
                    }
                    if bytes.get(i) == Some(&b'\n') {
                        return Err(err(start, "unterminated literal"));
                    }
                    i += 1;
                }
                if i >= bytes.len() {
                    return Err(err(start, "unterminated literal"));
                }
                i += 1;
                let kind = if q == b'"' { TokenKind::Str } else { TokenKind::Char };
                out.push(Token { kind, span: start..i });
                continue;
            }
            out.push(Token { kind: TokenKind::Ident, span: start..i });
            continue;
        }
        if c.is_ascii_digit() || (c == b'.' && bytes.get(i + 1).is_some_and(u8::is_ascii_digit)) {
            let hex = c == b'0' && matches!(bytes.get(i + 1), Some(b'x') | Some(b'X'));
            let mut float = false;
            while i < bytes.len() {
                let b = bytes[i];
                let exp = if hex { matches!(b, b'p' | b'P') } else { matches!(b, b'e' | b'E') };
                if exp && matches!(bytes.get(i + 1), Some(b'+') | Some(b'-')) {
                    float = true;
                    i += 2;
                } else if b == b'.' {
                    float = true;
                    i += 1;
                } else if b.is_ascii_alphanumeric() || b == b'_' {
                    if exp {
                        float = true;
                    }
                    i += 1;
                } else {
                    break;
                }
            }
            let kind = if float { TokenKind::Float } else { TokenKind::Int };
            out.push(Token { kind, span: start..i });
            continue;
        }
        let rest = &src[i..];
        let len = PUNCTUATORS
            .iter()
            .find(|p| rest.starts_with(**p))
            .map_or_else(|| rest.chars().next().map_or(1, char::len_utf8), |p| p.len());
        if !c.is_ascii() {
            return Err(err(start, "unexpected non-ASCII character"));
        }
        i += len;
        out.push(Token { kind: TokenKind::Punct, span: start..i });
    }
    Ok(out)
}

/// Tokens without comments and directives.
pub fn significant(tokens: Vec<Token>) -> Vec<Token> {
    tokens
        .into_iter()
        .filter(|t| !matches!(t.kind, TokenKind::Comment | TokenKind::Directive))
        .collect()
}

/// Parse the value of an integer literal, returning the value and its suffix.
pub fn parse_int_literal(text: &str) -> Option<(u64, &str)> {
    let split = text
        .char_indices()
        .find(|&(i, ch)| {
            let hex = text.starts_with("0x") || text.starts_with("0X");
            match ch {
                'u' | 'U' | 'l' | 'L' => !(hex && i < 2),
                _ => false,
            }
        })
        .map_or(text.len(), |(i, _)| i);
    let (digits, suffix) = text.split_at(split);
    let value = if let Some(h) = digits.strip_prefix("0x").or_else(|| digits.strip_prefix("0X")) {
        u64::from_str_radix(h, 16).ok()?
    } else if digits.len() > 1 && digits.starts_with('0') {
        u64::from_str_radix(&digits[1..], 8).ok()?
    } else {
        digits.parse().ok()?
    };
    Some((value, suffix))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn texts(src: &str) -> Vec<&str> {
        tokenize(src).unwrap().iter().map(|t| t.text(src)).collect::<Vec<_>>()
    }

    #[test]
    fn splits_punctuators_longest_first() {
        assert_eq!(texts("a<<=b->c++"), ["a", "<<=", "b", "->", "c", "++"]);
        assert_eq!(texts("x<=0"), ["x", "<=", "0"]);
    }

    #[test]
    fn comments_strings_and_directives_are_single_tokens() {
        let src = "#include <x.h>\nint /* a+b */ s = \"a+b\"; // c<d\nchar c='+';";
        let toks = tokenize(src).unwrap();
        let kinds: Vec<_> = toks.iter().map(|t| t.kind).collect();
        assert_eq!(kinds[0], TokenKind::Directive);
        assert!(kinds.contains(&TokenKind::Comment));
        assert!(kinds.contains(&TokenKind::Str));
        assert!(kinds.contains(&TokenKind::Char));
        assert!(!toks.iter().any(|t| t.kind == TokenKind::Punct && t.text(src) == "+"));
    }

    #[test]
    fn number_classes() {
        let src = "1 0x1F 017 10u 1.5 1e3 0x1p-3 .5f 3UL";
        let kinds: Vec<_> = tokenize(src).unwrap().iter().map(|t| t.kind).collect();
        use TokenKind::*;
        assert_eq!(kinds, [Int, Int, Int, Int, Float, Float, Float, Float, Int]);
        assert_eq!(parse_int_literal("0x1F"), Some((31, "")));
        assert_eq!(parse_int_literal("017"), Some((15, "")));
        assert_eq!(parse_int_literal("10u"), Some((10, "u")));
        assert_eq!(parse_int_literal("3UL"), Some((3, "UL")));
        assert_eq!(parse_int_literal("0"), Some((0, "")));
    }

    #[test]
    fn unterminated_comment_is_an_error() {
        let e = tokenize("int x; /* oops").unwrap_err();
        assert_eq!(e.location, Location { line: 1, column: 8 });
    }

    #[test]
    fn location_is_one_based() {
        let src = "ab\ncd";
        assert_eq!(Location::at(src, 0), Location { line: 1, column: 1 });
        assert_eq!(Location::at(src, 4), Location { line: 2, column: 2 });
    }
}
