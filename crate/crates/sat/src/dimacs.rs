//! DIMACS CNF reading and writing.

use std::fmt::Write as _;

use thiserror::Error;

use crate::lit::Lit;
use crate::solver::Solver;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DimacsError {
    #[error("line {line}: missing or malformed `p cnf` header")]
    BadHeader { line: usize },
    #[error("line {line}: invalid literal `{token}`")]
    BadLiteral { line: usize, token: String },
    #[error("line {line}: literal {lit} exceeds declared variable count {vars}")]
    VarOutOfRange { line: usize, lit: i32, vars: usize },
    #[error("header declares {declared} clauses but {found} were found")]
    ClauseCount { declared: usize, found: usize },
    #[error("last clause is not terminated by 0")]
    Unterminated,
}

/// A parsed CNF: declared variable count and the clause list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cnf {
    pub num_vars: usize,
    pub clauses: Vec<Vec<Lit>>,
}

/// Writes `p cnf <vars> <clauses>` followed by one zero-terminated clause per line.
pub fn write_dimacs<C: AsRef<[Lit]>>(num_vars: usize, clauses: &[C]) -> String {
    let mut out = String::with_capacity(16 + clauses.len() * 12);
    writeln!(out, "p cnf {} {}", num_vars, clauses.len()).unwrap();
    for c in clauses {
        for l in c.as_ref() {
            write!(out, "{} ", l.to_dimacs()).unwrap();
        }
        out.push_str("0\n");
    }
    out
}

pub fn parse_dimacs(text: &str) -> Result<Cnf, DimacsError> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses = Vec::new();
    let mut current = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
            continue;
        }
        if line.starts_with('p') {
            let parts: Vec<&str> = line.split_whitespace().collect();
            let parsed = match parts.as_slice() {
                ["p", "cnf", v, c] => v.parse().ok().zip(c.parse().ok()),
                _ => None,
            };
            if header.is_some() || parsed.is_none() {
                return Err(DimacsError::BadHeader { line: line_no });
            }
            header = parsed;
            continue;
        }
        let Some((vars, _)) = header else {
            return Err(DimacsError::BadHeader { line: line_no });
        };
        for token in line.split_whitespace() {
            let x: i32 = token.parse().map_err(|_| DimacsError::BadLiteral {
                line: line_no,
                token: token.to_string(),
            })?;
            if x == 0 {
                clauses.push(std::mem::take(&mut current));
            } else if x.unsigned_abs() as usize > vars {
                return Err(DimacsError::VarOutOfRange {
                    line: line_no,
                    lit: x,
                    vars,
                });
            } else {
                current.push(Lit::from_dimacs(x));
            }
        }
    }
    let Some((num_vars, declared)) = header else {
        return Err(DimacsError::BadHeader { line: 0 });
    };
    if !current.is_empty() {
        return Err(DimacsError::Unterminated);
    }
    if clauses.len() != declared {
        return Err(DimacsError::ClauseCount {
            declared,
            found: clauses.len(),
        });
    }
    Ok(Cnf { num_vars, clauses })
}

impl Solver {
    /// Problem clauses (never learnt ones) in insertion order, as DIMACS text.
    pub fn export_dimacs(&self) -> String {
        let mut clauses: Vec<&[Lit]> = self.problem_clauses().iter().map(Vec::as_slice).collect();
        if self.num_clauses() > clauses.len() {
            clauses.push(&[]);
        }
        write_dimacs(self.num_vars(), &clauses)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_multiline_clauses() {
        let cnf = parse_dimacs("c hello\np cnf 3 2\n1 -2\n 3 0 -1 0\n").unwrap();
        assert_eq!(cnf.num_vars, 3);
        assert_eq!(cnf.clauses.len(), 2);
        assert_eq!(cnf.clauses[0].len(), 3);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(parse_dimacs("1 0\n"), Err(DimacsError::BadHeader { .. })));
        assert!(matches!(
            parse_dimacs("p cnf 1 1\n2 0\n"),
            Err(DimacsError::VarOutOfRange { .. })
        ));
        assert!(matches!(
            parse_dimacs("p cnf 1 2\n1 0\n"),
            Err(DimacsError::ClauseCount { .. })
        ));
        assert_eq!(parse_dimacs("p cnf 1 1\n1\n"), Err(DimacsError::Unterminated));
    }

    #[test]
    fn export_excludes_learnt_clauses() {
        let mut s = Solver::with_seed(0);
        // PHP(3,2): forces learning before UNSAT
        let v = |p: i32, h: i32| p * 2 + h + 1;
        for p in 0..3 {
            s.add_clause(&[Lit::from_dimacs(v(p, 0)), Lit::from_dimacs(v(p, 1))]);
        }
        for h in 0..2 {
            for p in 0..3 {
                for q in p + 1..3 {
                    s.add_clause(&[Lit::from_dimacs(-v(p, h)), Lit::from_dimacs(-v(q, h))]);
                }
            }
        }
        let before = s.export_dimacs();
        s.solve(std::time::Duration::from_secs(5));
        assert_eq!(s.export_dimacs(), before);
        let cnf = parse_dimacs(&before).unwrap();
        assert_eq!(cnf.clauses.len(), 9);
        assert_eq!(cnf.num_vars, 6);
        assert_eq!(cnf.clauses, s.problem_clauses());
    }
}
