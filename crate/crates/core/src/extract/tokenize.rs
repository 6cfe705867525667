use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TokenKind {
    Word,
    Number,
    Punct,
    Symbol,
}

/// A token with half-open offsets counted in Unicode scalar values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub text: String,
    pub start: usize,
    pub end: usize,
    pub kind: TokenKind,
}

fn is_apostrophe(c: char) -> bool {
    matches!(c, '\'' | '\u{2019}')
}

fn is_punctuation(c: char) -> bool {
    if c.is_ascii() {
        return c.is_ascii_punctuation() && !matches!(c, '$' | '+' | '<' | '=' | '>' | '^' | '`' | '|' | '~');
    }
    matches!(
        c,
        '\u{00A1}' | '\u{00A7}' | '\u{00AB}' | '\u{00B6}' | '\u{00B7}' | '\u{00BB}' | '\u{00BF}'
            | '\u{2010}'..='\u{2027}'
            | '\u{2030}'..='\u{205E}'
            | '\u{3001}'..='\u{3003}'
    )
}

/// Split text into word, number, punctuation and symbol tokens.
///
/// Words are maximal runs of letters, keeping an apostrophe that sits
/// between two letters (`l'usine`). Numbers are maximal runs of digits.
/// Every other non-whitespace character is a token of its own.
pub fn tokenize(text: &str) -> Vec<Token> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let kind = if c.is_alphabetic() {
            i += 1;
            while i < chars.len() {
                if chars[i].is_alphabetic() {
                    i += 1;
                } else if is_apostrophe(chars[i])
                    && chars.get(i + 1).is_some_and(|n| n.is_alphabetic())
                {
                    i += 2;
                } else {
                    break;
                }
            }
            TokenKind::Word
        } else if c.is_numeric() {
            while i < chars.len() && chars[i].is_numeric() {
                i += 1;
            }
            TokenKind::Number
        } else {
            i += 1;
            if is_punctuation(c) {
                TokenKind::Punct
            } else {
                TokenKind::Symbol
            }
        };
        tokens.push(Token {
            text: chars[start..i].iter().collect(),
            start,
            end: i,
            kind,
        });
    }
    tokens
}

/// Case folding used for case-insensitive matching.
pub fn fold(s: &str) -> String {
    s.chars().flat_map(char::to_lowercase).collect()
}

/// Case-fold and collapse whitespace runs to single spaces.
pub fn normalize_surface(s: &str) -> String {
    fold(s).split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Substring by scalar-value offsets.
pub fn slice_chars(text: &str, start: usize, end: usize) -> String {
    text.chars().skip(start).take(end.saturating_sub(start)).collect()
}
