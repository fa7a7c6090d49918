//! Read-twice monotone CNF and its edge-cover reading.
//!
//! Each clause becomes a vertex and each variable an edge joining the clauses
//! it occurs in: two occurrences give a normal edge, one a dangling edge and
//! none a free edge. An assignment satisfies the formula exactly when its true
//! variables form an edge cover.

use thiserror::Error;

use crate::counter::{estimate_count, Accuracy, ApproxCount, CountError};
use crate::graph::{Graph, VertexId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CnfError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: literal {literal} is negative; formula is not monotone")]
    NotMonotone { line: usize, literal: i64 },
    #[error("variable {var} occurs in {occurrences} clauses; formula is not read-twice")]
    NotReadTwice { var: usize, occurrences: usize },
    #[error("clause {clause} is empty (unsatisfiable clause)")]
    EmptyClause { clause: usize },
    #[error("variable {var} is outside 1..={num_vars}")]
    VariableOutOfRange { var: usize, num_vars: usize },
}

/// A monotone CNF in which every variable occurs in at most two clauses.
/// Variables are numbered from 1; each clause is sorted and duplicate-free.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RtwMonCnf {
    num_vars: usize,
    clauses: Vec<Vec<usize>>,
}

impl RtwMonCnf {
    /// Validates and normalizes. A literal repeated inside one clause counts
    /// once, since `x ∨ x` is `x`.
    pub fn new(num_vars: usize, clauses: Vec<Vec<usize>>) -> Result<Self, CnfError> {
        let mut occurrences = vec![0usize; num_vars + 1];
        let mut normalized = Vec::with_capacity(clauses.len());
        for (idx, mut clause) in clauses.into_iter().enumerate() {
            clause.sort_unstable();
            clause.dedup();
            if clause.is_empty() {
                return Err(CnfError::EmptyClause { clause: idx + 1 });
            }
            for &var in &clause {
                if var == 0 || var > num_vars {
                    return Err(CnfError::VariableOutOfRange { var, num_vars });
                }
                occurrences[var] += 1;
            }
            normalized.push(clause);
        }
        if let Some((var, &n)) = occurrences.iter().enumerate().find(|(_, &n)| n > 2) {
            return Err(CnfError::NotReadTwice {
                var,
                occurrences: n,
            });
        }
        Ok(Self {
            num_vars,
            clauses: normalized,
        })
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn clauses(&self) -> &[Vec<usize>] {
        &self.clauses
    }

    /// DIMACS text accepted by [`parse_cnf`].
    pub fn render(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.num_vars, self.clauses.len());
        for clause in &self.clauses {
            for var in clause {
                out.push_str(&format!("{var} "));
            }
            out.push_str("0\n");
        }
        out
    }
}

/// Parses the positive-literal subset of DIMACS CNF. Lines starting with `c`
/// are comments and a line starting with `%` ends the input. Clauses may span
/// lines and must each be terminated by `0`.
pub fn parse_cnf(text: &str) -> Result<RtwMonCnf, CnfError> {
    let parse_err = |line: usize, message: String| CnfError::Parse { line, message };

    let mut header: Option<(usize, usize)> = None;
    let mut clauses: Vec<Vec<usize>> = Vec::new();
    let mut current: Vec<usize> = Vec::new();
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('%') {
            break;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(parse_err(line_no, "duplicate header".into()));
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let parsed = match fields.as_slice() {
                ["p", "cnf", v, c] => v.parse::<usize>().ok().zip(c.parse::<usize>().ok()),
                _ => None,
            };
            header = Some(parsed.ok_or_else(|| {
                parse_err(
                    line_no,
                    format!("malformed header `{line}`, expected `p cnf <vars> <clauses>`"),
                )
            })?);
            continue;
        }
        let (num_vars, _) =
            header.ok_or_else(|| parse_err(line_no, "clause before `p cnf` header".into()))?;
        for token in line.split_whitespace() {
            let literal: i64 = token
                .parse()
                .map_err(|_| parse_err(line_no, format!("invalid literal `{token}`")))?;
            if literal < 0 {
                return Err(CnfError::NotMonotone {
                    line: line_no,
                    literal,
                });
            }
            if literal == 0 {
                if current.is_empty() {
                    return Err(CnfError::EmptyClause {
                        clause: clauses.len() + 1,
                    });
                }
                clauses.push(std::mem::take(&mut current));
                continue;
            }
            let var = literal as usize;
            if var > num_vars {
                return Err(parse_err(
                    line_no,
                    format!("variable {var} exceeds declared count {num_vars}"),
                ));
            }
            current.push(var);
        }
    }

    let (num_vars, num_clauses) =
        header.ok_or_else(|| parse_err(last_line.max(1), "missing `p cnf` header".into()))?;
    if !current.is_empty() {
        return Err(parse_err(
            last_line,
            "last clause is not terminated by 0".into(),
        ));
    }
    if clauses.len() != num_clauses {
        return Err(parse_err(
            last_line,
            format!(
                "header declares {num_clauses} clauses, found {}",
                clauses.len()
            ),
        ));
    }
    RtwMonCnf::new(num_vars, clauses)
}

/// Clause `i` becomes vertex `i`; variable `j` becomes edge `j - 1`.
pub fn to_graph(phi: &RtwMonCnf) -> Graph {
    let mut homes: Vec<Vec<usize>> = vec![Vec::new(); phi.num_vars + 1];
    for (c, clause) in phi.clauses.iter().enumerate() {
        for &var in clause {
            homes[var].push(c);
        }
    }
    let mut g = Graph::with_vertices(phi.clauses.len());
    for home in &homes[1..] {
        let added = match home.as_slice() {
            [] => Ok(g.add_free()),
            [c] => g.add_dangling(VertexId(*c)),
            [a, b] => g.add_normal(VertexId(*a), VertexId(*b)),
            _ => unreachable!("read-twice is checked on construction"),
        };
        // Clauses are deduplicated, so the two homes are distinct vertices.
        added.expect("valid formula maps to a valid graph");
    }
    g
}

/// Approximate number of satisfying assignments, within `1 ± ε`.
pub fn count_solutions(phi: &RtwMonCnf, accuracy: Accuracy) -> Result<ApproxCount, CountError> {
    estimate_count(&to_graph(phi), accuracy)
}
