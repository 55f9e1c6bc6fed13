//! Tokenization of text streams and symbol alphabets.

use std::collections::HashMap;

use clap::ValueEnum;
use serde::Serialize;

use crate::error::CliError;

/// How an input file is split into tokens.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TokenMode {
    /// Every Unicode scalar value is a token; decoding concatenates them.
    Chars,
    /// Whitespace-separated words; decoding joins with single spaces and a final newline.
    Words,
    /// One token per line; decoding writes each token followed by a newline.
    Lines,
}

pub fn tokenize(text: &str, mode: TokenMode) -> Vec<String> {
    match mode {
        TokenMode::Chars => text.chars().map(String::from).collect(),
        TokenMode::Words => text.split_whitespace().map(str::to_owned).collect(),
        TokenMode::Lines => text.lines().map(str::to_owned).collect(),
    }
}

pub fn detokenize<S: AsRef<str>>(tokens: &[S], mode: TokenMode) -> String {
    let mut out = String::new();
    match mode {
        TokenMode::Chars => tokens.iter().for_each(|t| out.push_str(t.as_ref())),
        TokenMode::Words => {
            for (i, t) in tokens.iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                out.push_str(t.as_ref());
            }
            if !tokens.is_empty() {
                out.push('\n');
            }
        }
        TokenMode::Lines => tokens.iter().for_each(|t| {
            out.push_str(t.as_ref());
            out.push('\n');
        }),
    }
    out
}

/// Newline-delimited symbol list; the symbol on line `i` has rank `i` (1-based).
#[derive(Debug, Clone)]
pub struct Alphabet {
    symbols: Vec<String>,
    index: HashMap<String, usize>,
}

impl Alphabet {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let symbols: Vec<String> = text.lines().map(str::to_owned).collect();
        if symbols.is_empty() {
            return Err(CliError::Usage("alphabet file is empty".into()));
        }
        let mut index = HashMap::with_capacity(symbols.len());
        for (i, s) in symbols.iter().enumerate() {
            if index.insert(s.clone(), i + 1).is_some() {
                return Err(CliError::Usage(format!(
                    "duplicate alphabet symbol {s:?} on line {}",
                    i + 1
                )));
            }
        }
        Ok(Alphabet { symbols, index })
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn rank(&self, token: &str) -> Result<usize, CliError> {
        self.index
            .get(token)
            .copied()
            .ok_or_else(|| CliError::Usage(format!("token {token:?} is not in the alphabet")))
    }

    pub fn symbol(&self, rank: usize) -> &str {
        &self.symbols[rank - 1]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_round_trip() {
        let text = "the cat\nsat on the mat\n";
        for mode in [TokenMode::Words, TokenMode::Lines] {
            let t = tokenize(text, mode);
            assert_eq!(tokenize(&detokenize(&t, mode), mode), t);
        }
        assert_eq!(
            detokenize(&tokenize("banana", TokenMode::Chars), TokenMode::Chars),
            "banana"
        );
    }

    #[test]
    fn alphabet_ranks_by_line() {
        let a = Alphabet::parse("a\nb\nn\nx\n").unwrap();
        assert_eq!(a.len(), 4);
        assert_eq!(a.rank("n").unwrap(), 3);
        assert_eq!(a.symbol(2), "b");
        assert!(a.rank("z").is_err());
        assert!(Alphabet::parse("").is_err());
        assert!(Alphabet::parse("a\na\n").is_err());
    }
}
