//! DIMACS CNF reading and writing.
//!
//! The parser is deliberately lenient about whitespace, `c` comment lines,
//! and the trailing `%`/`0` footer some benchmark archives append, but it
//! insists on a well-formed header and in-range, zero-terminated clauses.

use std::fmt::Write as _;

use crate::cnf::{CnfFormula, Literal};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum DimacsError {
    #[error("malformed header: {0:?} (expected \"p cnf <vars> <clauses>\")")]
    MalformedHeader(String),
    #[error("literal {literal} on line {line} is out of range for {num_vars} variables")]
    VariableOutOfRange {
        literal: i64,
        line: usize,
        num_vars: usize,
    },
    #[error("unterminated clause at end of input (missing 0)")]
    UnterminatedClause,
    #[error("token {0:?} on line {1} is not a literal")]
    BadToken(String, usize),
    #[error("expected {declared} clauses, found {found}")]
    ClauseCountMismatch { declared: usize, found: usize },
}

pub fn parse_dimacs(text: &str) -> Result<CnfFormula, DimacsError> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses: Vec<Vec<Literal>> = Vec::new();
    let mut current: Vec<Literal> = Vec::new();
    let mut in_clause = false;

    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        let lineno = lineno + 1;
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('%') {
            // Benchmark-archive footer; everything after it is trailer.
            break;
        }
        if line.starts_with('p') {
            let fields: Vec<&str> = line.split_whitespace().collect();
            let parsed = match fields.as_slice() {
                ["p", "cnf", vars, cls] => vars
                    .parse::<usize>()
                    .ok()
                    .zip(cls.parse::<usize>().ok()),
                _ => None,
            };
            match parsed {
                Some(hdr) if header.is_none() => header = Some(hdr),
                _ => return Err(DimacsError::MalformedHeader(line.to_string())),
            }
            continue;
        }
        let (num_vars, _) = header
            .ok_or_else(|| DimacsError::MalformedHeader(format!("missing before {line:?}")))?;
        for token in line.split_whitespace() {
            let code: i64 = token
                .parse()
                .map_err(|_| DimacsError::BadToken(token.to_string(), lineno))?;
            match Literal::from_dimacs(code) {
                None => {
                    clauses.push(std::mem::take(&mut current));
                    in_clause = false;
                }
                Some(lit) => {
                    if lit.var > num_vars {
                        return Err(DimacsError::VariableOutOfRange {
                            literal: code,
                            line: lineno,
                            num_vars,
                        });
                    }
                    current.push(lit);
                    in_clause = true;
                }
            }
        }
    }

    if in_clause {
        return Err(DimacsError::UnterminatedClause);
    }
    let (num_vars, declared) =
        header.ok_or_else(|| DimacsError::MalformedHeader("missing".to_string()))?;
    if clauses.len() != declared {
        return Err(DimacsError::ClauseCountMismatch {
            declared,
            found: clauses.len(),
        });
    }
    Ok(CnfFormula::new(num_vars, clauses).expect("range checked during parse"))
}

pub fn write_dimacs(formula: &CnfFormula) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "p cnf {} {}",
        formula.num_vars(),
        formula.num_clauses()
    );
    for clause in formula.clauses() {
        for lit in clause {
            let _ = write!(out, "{} ", lit.to_dimacs());
        }
        let _ = writeln!(out, "0");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnf::clause;

    #[test]
    fn parse_single_unit_clause() {
        let f = parse_dimacs("p cnf 1 1\n1 0").unwrap();
        assert_eq!(f.num_vars(), 1);
        assert_eq!(f.clauses(), &[clause(&[1])]);
    }

    #[test]
    fn parse_two_three_clauses() {
        let f = parse_dimacs("p cnf 3 2\n1 2 3 0\n-1 -2 -3 0").unwrap();
        assert_eq!(f.clauses(), &[clause(&[1, 2, 3]), clause(&[-1, -2, -3])]);
    }

    #[test]
    fn parse_rejects_out_of_range() {
        assert_eq!(
            parse_dimacs("p cnf 1 1\n2 0"),
            Err(DimacsError::VariableOutOfRange {
                literal: 2,
                line: 2,
                num_vars: 1
            })
        );
    }

    #[test]
    fn parse_rejects_bad_header_and_missing_terminator() {
        assert!(matches!(
            parse_dimacs("p dnf 1 1\n1 0"),
            Err(DimacsError::MalformedHeader(_))
        ));
        assert_eq!(
            parse_dimacs("p cnf 2 1\n1 2"),
            Err(DimacsError::UnterminatedClause)
        );
    }

    #[test]
    fn parse_tolerates_comments_layout_and_footer() {
        let text = "c generated\nc seed 7\np cnf 2 2\n1\n-2 0\n2 1 0\n%\n0\n";
        let f = parse_dimacs(text).unwrap();
        assert_eq!(f.clauses(), &[clause(&[1, -2]), clause(&[2, 1])]);
    }

    #[test]
    fn parse_supports_empty_clause() {
        let f = parse_dimacs("p cnf 1 2\n0\n1 0").unwrap();
        assert_eq!(f.clauses(), &[clause(&[]), clause(&[1])]);
    }

    #[test]
    fn round_trip_preserves_order() {
        let f = crate::cnf::CnfFormula::new(
            4,
            vec![clause(&[3, -1, 2]), clause(&[]), clause(&[-4, 4, 1])],
        )
        .unwrap();
        assert_eq!(parse_dimacs(&write_dimacs(&f)).unwrap(), f);
    }
}
