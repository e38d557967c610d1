//! Location-occupancy state formulas.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::VerifyError;
use crate::ta::Network;

/// A positive boolean combination of "automaton `A` is in location `L`".
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StateFormula {
    Atom { automaton: String, location: String },
    And(Vec<StateFormula>),
    Or(Vec<StateFormula>),
}

impl StateFormula {
    pub fn atom(automaton: impl Into<String>, location: impl Into<String>) -> Self {
        StateFormula::Atom {
            automaton: automaton.into(),
            location: location.into(),
        }
    }

    /// Parses `A.L`, `&&`/`and`, `||`/`or` and parentheses. `&&` binds
    /// tighter than `||`.
    pub fn parse(text: &str) -> Result<Self, VerifyError> {
        let tokens = tokenize(text)?;
        let mut p = Parser { tokens, pos: 0 };
        let f = p.disjunction()?;
        match p.tokens.get(p.pos) {
            None => Ok(f),
            Some((offset, tok)) => Err(VerifyError::FormulaSyntax {
                offset: *offset,
                message: format!("unexpected `{}`", tok.text()),
            }),
        }
    }

    /// Resolves names against `net`.
    pub fn resolve(&self, net: &Network) -> Result<ResolvedFormula, VerifyError> {
        Ok(match self {
            StateFormula::Atom { automaton, location } => {
                let (a, aut) = net
                    .automaton(automaton)
                    .ok_or_else(|| VerifyError::UnknownName(automaton.clone()))?;
                let qualified = format!("{automaton}.{location}");
                let l = aut
                    .location_index(location)
                    .or_else(|| aut.location_index(&qualified))
                    .ok_or(VerifyError::UnknownName(qualified))?;
                ResolvedFormula::Atom(a, l)
            }
            StateFormula::And(fs) => ResolvedFormula::And(fs.iter().map(|f| f.resolve(net)).collect::<Result<_, _>>()?),
            StateFormula::Or(fs) => ResolvedFormula::Or(fs.iter().map(|f| f.resolve(net)).collect::<Result<_, _>>()?),
        })
    }

    /// Evaluates the formula on a location vector of `net`.
    pub fn evaluate(&self, net: &Network, locs: &[usize]) -> Result<bool, VerifyError> {
        Ok(self.resolve(net)?.eval(locs))
    }

    /// Atoms in the order they appear.
    pub fn atoms(&self) -> Vec<(&str, &str)> {
        match self {
            StateFormula::Atom { automaton, location } => vec![(automaton, location)],
            StateFormula::And(fs) | StateFormula::Or(fs) => fs.iter().flat_map(|f| f.atoms()).collect(),
        }
    }
}

impl StateFormula {
    fn write(&self, f: &mut fmt::Formatter<'_>, nested: bool) -> fmt::Result {
        let (fs, op) = match self {
            StateFormula::Atom { automaton, location } => return write!(f, "{automaton}.{location}"),
            StateFormula::And(fs) => (fs, "&&"),
            StateFormula::Or(fs) => (fs, "||"),
        };
        if nested {
            f.write_str("(")?;
        }
        for (i, x) in fs.iter().enumerate() {
            if i > 0 {
                write!(f, " {op} ")?;
            }
            x.write(f, true)?;
        }
        if nested {
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Display for StateFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, false)
    }
}

/// A formula with names replaced by `(automaton, location)` indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ResolvedFormula {
    Atom(usize, usize),
    And(Vec<ResolvedFormula>),
    Or(Vec<ResolvedFormula>),
}

impl ResolvedFormula {
    pub fn eval(&self, locs: &[usize]) -> bool {
        match self {
            ResolvedFormula::Atom(a, l) => locs[*a] == *l,
            ResolvedFormula::And(fs) => fs.iter().all(|f| f.eval(locs)),
            ResolvedFormula::Or(fs) => fs.iter().any(|f| f.eval(locs)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Name(String),
    And,
    Or,
    Open,
    Close,
}

impl Token {
    fn text(&self) -> String {
        match self {
            Token::Name(n) => n.clone(),
            Token::And => "&&".into(),
            Token::Or => "||".into(),
            Token::Open => "(".into(),
            Token::Close => ")".into(),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>, VerifyError> {
    let mut out = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '(' => {
                out.push((i, Token::Open));
                i += 1;
            }
            ')' => {
                out.push((i, Token::Close));
                i += 1;
            }
            '&' | '|' => {
                if bytes.get(i + 1) != Some(&bytes[i]) {
                    return Err(VerifyError::FormulaSyntax {
                        offset: i,
                        message: format!("expected `{c}{c}`"),
                    });
                }
                out.push((i, if c == '&' { Token::And } else { Token::Or }));
                i += 2;
            }
            c if c.is_ascii_alphanumeric() || c == '_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || matches!(bytes[i], b'_' | b'.')) {
                    i += 1;
                }
                let word = &text[start..i];
                let tok = match word {
                    "and" => Token::And,
                    "or" => Token::Or,
                    _ => Token::Name(word.to_string()),
                };
                out.push((start, tok));
            }
            _ => {
                return Err(VerifyError::FormulaSyntax {
                    offset: i,
                    message: format!("unexpected character `{c}`"),
                })
            }
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
}

impl Parser {
    fn end_offset(&self) -> usize {
        self.tokens.last().map(|(o, t)| o + t.text().len()).unwrap_or(0)
    }

    fn disjunction(&mut self) -> Result<StateFormula, VerifyError> {
        let mut parts = vec![self.conjunction()?];
        while matches!(self.tokens.get(self.pos), Some((_, Token::Or))) {
            self.pos += 1;
            parts.push(self.conjunction()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            StateFormula::Or(parts)
        })
    }

    fn conjunction(&mut self) -> Result<StateFormula, VerifyError> {
        let mut parts = vec![self.primary()?];
        while matches!(self.tokens.get(self.pos), Some((_, Token::And))) {
            self.pos += 1;
            parts.push(self.primary()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            StateFormula::And(parts)
        })
    }

    fn primary(&mut self) -> Result<StateFormula, VerifyError> {
        let Some((offset, tok)) = self.tokens.get(self.pos).cloned() else {
            return Err(VerifyError::FormulaSyntax {
                offset: self.end_offset(),
                message: "unexpected end of formula".into(),
            });
        };
        self.pos += 1;
        match tok {
            Token::Open => {
                let f = self.disjunction()?;
                match self.tokens.get(self.pos) {
                    Some((_, Token::Close)) => {
                        self.pos += 1;
                        Ok(f)
                    }
                    _ => Err(VerifyError::FormulaSyntax {
                        offset: self.tokens.get(self.pos).map(|t| t.0).unwrap_or(self.end_offset()),
                        message: "expected `)`".into(),
                    }),
                }
            }
            Token::Name(name) => match name.split_once('.') {
                Some((a, l)) if !a.is_empty() && !l.is_empty() => Ok(StateFormula::atom(a, l)),
                _ => Err(VerifyError::FormulaSyntax {
                    offset,
                    message: format!("expected `Automaton.Location`, got `{name}`"),
                }),
            },
            other => Err(VerifyError::FormulaSyntax {
                offset,
                message: format!("unexpected `{}`", other.text()),
            }),
        }
    }
}
