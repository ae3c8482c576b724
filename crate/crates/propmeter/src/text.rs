//! Canonical plain-text instance format.
//!
//! The format is line-oriented and whitespace-delimited. Blank lines and
//! lines starting with `#` are ignored. Grammar:
//!
//! ```text
//! vars <n>
//! var <j> <lower> <upper> <cont|int>     (n lines, j = 0..n-1 in order)
//! cons <m>
//! con <i> <lhs> <rhs> <t> (<var> <coef>){t}   (m lines, i = 0..m-1 in order)
//! ```
//!
//! Numbers use Rust's shortest round-trip `f64` formatting, so writing and
//! re-parsing reproduces every coefficient and bound bit for bit.
//! Infinities are spelled `inf` and `-inf` (`+inf` is accepted on input).

use std::fmt::Write as _;

use thiserror::Error;

use crate::ext::ExtReal;
use crate::model::{LinearConstraint, ModelError, ProblemInstance, VariableDomain};

#[derive(Debug, Error, PartialEq)]
pub enum TextError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: {source}")]
    Model { line: usize, source: ModelError },
    #[error("unexpected end of input: {expected}")]
    UnexpectedEnd { expected: String },
}

/// Serializes an instance in the canonical text format.
pub fn write_instance(instance: &ProblemInstance) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "vars {}", instance.num_vars());
    for (j, d) in instance.domains().iter().enumerate() {
        let kind = if d.is_integer() { "int" } else { "cont" };
        let _ = writeln!(out, "var {j} {} {} {kind}", d.lower(), d.upper());
    }
    let _ = writeln!(out, "cons {}", instance.num_constraints());
    for (i, c) in instance.constraints().iter().enumerate() {
        let _ = write!(out, "con {i} {} {} {}", c.lhs(), c.rhs(), c.terms().len());
        for &(j, coef) in c.terms() {
            let _ = write!(out, " {j} {coef}");
        }
        out.push('\n');
    }
    out
}

struct Lines<'a> {
    tokens: Vec<(usize, Vec<&'a str>)>,
    pos: usize,
}

impl<'a> Lines<'a> {
    fn new(input: &'a str) -> Self {
        let tokens = input
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split_whitespace().collect::<Vec<_>>()))
            .filter(|(_, t)| !t.is_empty() && !t[0].starts_with('#'))
            .collect();
        Lines { tokens, pos: 0 }
    }

    fn next(&mut self, expected: &str) -> Result<(usize, &[&'a str]), TextError> {
        let item = self
            .tokens
            .get(self.pos)
            .ok_or_else(|| TextError::UnexpectedEnd {
                expected: expected.to_string(),
            })?;
        self.pos += 1;
        Ok((item.0, &item.1))
    }

    fn finished(&self) -> Option<usize> {
        self.tokens.get(self.pos).map(|(line, _)| *line)
    }
}

fn parse_ext(line: usize, token: &str) -> Result<ExtReal, TextError> {
    token.parse::<ExtReal>().map_err(|_| TextError::Syntax {
        line,
        message: format!("expected a number or inf/-inf, found {token:?}"),
    })
}

fn parse_count(line: usize, token: &str, what: &str) -> Result<usize, TextError> {
    token.parse::<usize>().map_err(|_| TextError::Syntax {
        line,
        message: format!("expected {what}, found {token:?}"),
    })
}

/// Parses the canonical text format.
pub fn parse_instance(input: &str) -> Result<ProblemInstance, TextError> {
    let mut lines = Lines::new(input);

    let (line, tokens) = lines.next("vars header")?;
    if tokens.len() != 2 || tokens[0] != "vars" {
        return Err(TextError::Syntax {
            line,
            message: "expected `vars <n>`".into(),
        });
    }
    let n = parse_count(line, tokens[1], "a variable count")?;

    let mut domains = Vec::with_capacity(n);
    for j in 0..n {
        let (line, tokens) = lines.next("a var line")?;
        if tokens.len() != 5 || tokens[0] != "var" {
            return Err(TextError::Syntax {
                line,
                message: "expected `var <j> <lower> <upper> <cont|int>`".into(),
            });
        }
        if parse_count(line, tokens[1], "a variable index")? != j {
            return Err(TextError::Syntax {
                line,
                message: format!("variable lines must be in order; expected index {j}"),
            });
        }
        let lower = parse_ext(line, tokens[2])?;
        let upper = parse_ext(line, tokens[3])?;
        let is_integer = match tokens[4] {
            "cont" => false,
            "int" => true,
            other => {
                return Err(TextError::Syntax {
                    line,
                    message: format!("expected cont or int, found {other:?}"),
                })
            }
        };
        domains.push(
            VariableDomain::new(lower, upper, is_integer)
                .map_err(|source| TextError::Model { line, source })?,
        );
    }

    let (line, tokens) = lines.next("cons header")?;
    if tokens.len() != 2 || tokens[0] != "cons" {
        return Err(TextError::Syntax {
            line,
            message: "expected `cons <m>`".into(),
        });
    }
    let m = parse_count(line, tokens[1], "a constraint count")?;

    let mut constraints = Vec::with_capacity(m);
    for i in 0..m {
        let (line, tokens) = lines.next("a con line")?;
        if tokens.len() < 5 || tokens[0] != "con" {
            return Err(TextError::Syntax {
                line,
                message: "expected `con <i> <lhs> <rhs> <t> <var> <coef> ...`".into(),
            });
        }
        if parse_count(line, tokens[1], "a constraint index")? != i {
            return Err(TextError::Syntax {
                line,
                message: format!("constraint lines must be in order; expected index {i}"),
            });
        }
        let lhs = parse_ext(line, tokens[2])?;
        let rhs = parse_ext(line, tokens[3])?;
        let t = parse_count(line, tokens[4], "a term count")?;
        if tokens.len() != 5 + 2 * t {
            return Err(TextError::Syntax {
                line,
                message: format!("expected {t} variable/coefficient pairs", t = t),
            });
        }
        let mut terms = Vec::with_capacity(t);
        for k in 0..t {
            let var = parse_count(line, tokens[5 + 2 * k], "a variable index")?;
            let coef = tokens[6 + 2 * k]
                .parse::<f64>()
                .map_err(|_| TextError::Syntax {
                    line,
                    message: format!("expected a coefficient, found {:?}", tokens[6 + 2 * k]),
                })?;
            terms.push((var, coef));
        }
        constraints.push(
            LinearConstraint::new(terms, lhs, rhs)
                .map_err(|source| TextError::Model { line, source })?,
        );
    }

    if let Some(line) = lines.finished() {
        return Err(TextError::Syntax {
            line,
            message: "unexpected content after constraints".into(),
        });
    }

    ProblemInstance::new(domains, constraints)
        .map_err(|source| TextError::Model { line: 0, source })
}
