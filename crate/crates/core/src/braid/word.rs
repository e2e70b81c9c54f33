//! Braid words: loop generators `a j k` (strand j once around strand k)
//! and half twists `s i` (adjacent strands i, i+1 traded), either with an
//! optional `^-1`. Indices are 1-based in text and 0-based internally.
//!
//! Words are read left to right: in `a12 a23` the `a12` motion runs first.

use std::fmt;

use crate::error::BraidError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Generator {
    /// Strand at position `j` travels once around the strand at position
    /// `k`; indices 0-based, `j != k`.
    Loop { j: usize, k: usize, inverse: bool },
    /// Half twist trading the strands at positions `i` and `i + 1`.
    HalfTwist { i: usize, inverse: bool },
}

impl Generator {
    pub fn inverse(&self) -> Generator {
        match *self {
            Generator::Loop { j, k, inverse } => Generator::Loop {
                j,
                k,
                inverse: !inverse,
            },
            Generator::HalfTwist { i, inverse } => Generator::HalfTwist {
                i,
                inverse: !inverse,
            },
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Generator::Loop { j, k, inverse } => {
                write!(f, "a{}{}", j + 1, k + 1)?;
                if inverse {
                    write!(f, "^-1")?;
                }
                Ok(())
            }
            Generator::HalfTwist { i, inverse } => {
                write!(f, "s{}", i + 1)?;
                if inverse {
                    write!(f, "^-1")?;
                }
                Ok(())
            }
        }
    }
}

/// A braid word over `strands` strands inducing the identity permutation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BraidWord {
    strands: usize,
    tokens: Vec<Generator>,
}

impl BraidWord {
    /// Builds a word from tokens, enforcing purity.
    pub fn new(strands: usize, tokens: Vec<Generator>) -> Result<Self, BraidError> {
        let word = BraidWord { strands, tokens };
        if !word.is_pure() {
            return Err(BraidError::NotPure);
        }
        Ok(word)
    }

    pub fn empty(strands: usize) -> Self {
        BraidWord {
            strands,
            tokens: Vec::new(),
        }
    }

    pub fn strands(&self) -> usize {
        self.strands
    }

    pub fn tokens(&self) -> &[Generator] {
        &self.tokens
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// The permutation of strand positions induced by the word (identity
    /// for pure words).
    pub fn permutation(&self) -> Vec<usize> {
        let mut perm: Vec<usize> = (0..self.strands).collect();
        for token in &self.tokens {
            if let Generator::HalfTwist { i, .. } = token {
                perm.swap(*i, *i + 1);
            }
        }
        perm
    }

    pub fn is_pure(&self) -> bool {
        self.permutation().iter().enumerate().all(|(i, &p)| i == p)
    }

    /// The inverse word: tokens reversed and individually inverted.
    pub fn inverse(&self) -> BraidWord {
        BraidWord {
            strands: self.strands,
            tokens: self.tokens.iter().rev().map(|t| t.inverse()).collect(),
        }
    }

    /// Concatenation; both operands must already be pure.
    pub fn concat(&self, other: &BraidWord) -> Result<BraidWord, BraidError> {
        if self.strands != other.strands {
            return Err(BraidError::SyntaxError {
                position: 0,
                message: format!(
                    "cannot concatenate words over {} and {} strands",
                    self.strands, other.strands
                ),
            });
        }
        let mut tokens = self.tokens.clone();
        tokens.extend(other.tokens.iter().copied());
        BraidWord::new(self.strands, tokens)
    }
}

impl fmt::Display for BraidWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for token in &self.tokens {
            if !first {
                write!(f, " ")?;
            }
            write!(f, "{token}")?;
            first = false;
        }
        Ok(())
    }
}

/// Parses a whitespace-separated braid word. Tokens are `a<j><k>` with two
/// single digits or `a<j>,<k>` for larger indices, `s<i>`, each optionally
/// suffixed `^-1`. A word that permutes the strands is rejected.
pub fn parse_braid(text: &str, strands: usize) -> Result<BraidWord, BraidError> {
    let mut tokens = Vec::new();
    for (position, raw) in text.split_whitespace().enumerate() {
        let (body, inverse) = match raw.strip_suffix("^-1") {
            Some(b) => (b, true),
            None => (raw, false),
        };
        let syntax = |message: String| BraidError::SyntaxError { position, message };
        let check_index = |v: usize| -> Result<usize, BraidError> {
            if v == 0 || v > strands {
                Err(BraidError::IndexOutOfRange {
                    position,
                    index: v,
                    strands,
                })
            } else {
                Ok(v - 1)
            }
        };
        if let Some(rest) = body.strip_prefix('a') {
            let (j, k) = if let Some((a, b)) = rest.split_once(',') {
                let j: usize = a
                    .parse()
                    .map_err(|_| syntax(format!("bad strand index {a:?}")))?;
                let k: usize = b
                    .parse()
                    .map_err(|_| syntax(format!("bad strand index {b:?}")))?;
                (j, k)
            } else {
                let digits: Vec<char> = rest.chars().collect();
                if digits.len() != 2 || !digits.iter().all(|c| c.is_ascii_digit()) {
                    return Err(syntax(format!(
                        "expected two digits or j,k after 'a', got {rest:?}"
                    )));
                }
                (
                    digits[0].to_digit(10).unwrap() as usize,
                    digits[1].to_digit(10).unwrap() as usize,
                )
            };
            if j == k {
                return Err(syntax(format!("loop generator needs distinct strands, got a{j}{k}")));
            }
            tokens.push(Generator::Loop {
                j: check_index(j)?,
                k: check_index(k)?,
                inverse,
            });
        } else if let Some(rest) = body.strip_prefix('s') {
            let i: usize = rest
                .parse()
                .map_err(|_| syntax(format!("bad twist index {rest:?}")))?;
            if i == 0 || i >= strands {
                return Err(BraidError::IndexOutOfRange {
                    position,
                    index: i,
                    strands,
                });
            }
            tokens.push(Generator::HalfTwist {
                i: i - 1,
                inverse,
            });
        } else {
            return Err(syntax(format!("unrecognized token {raw:?}")));
        }
    }
    BraidWord::new(strands, tokens)
}
