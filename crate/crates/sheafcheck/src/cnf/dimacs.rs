//! DIMACS CNF and WDIMACS (weighted CNF) readers and writers.
//!
//! The accepted dialect is the classic one: `c` comment lines, a
//! `p cnf <nvars> <nclauses>` header, then clauses as signed integers
//! terminated by `0`. Clauses may span lines. Variables are named
//! `"1"`..`"<nvars>"` in the resulting vocabulary. WDIMACS uses the
//! `p wcnf <nvars> <nclauses> <top>` header and prefixes every clause with
//! a weight; a weight equal to `top` marks the clause as hard.

use thiserror::Error;

use super::{CnfFormula, Literal, Rational, Var, Vocabulary, WeightedClause, WeightedCnf};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DimacsError {
    #[error("line {line}: expected `p cnf <nvars> <nclauses>` header, found {found:?}")]
    MalformedHeader { line: usize, found: String },
    #[error("missing `p cnf` header")]
    MissingHeader,
    #[error("line {line}: unexpected token {token:?}")]
    UnexpectedToken { line: usize, token: String },
    #[error("line {line}: literal {literal} out of range (formula declares {nvars} variables)")]
    LiteralOutOfRange { line: usize, literal: i64, nvars: usize },
    #[error("line {line}: empty clause")]
    EmptyClause { line: usize },
    #[error("line {line}: clause not terminated by 0 before end of input")]
    UnterminatedClause { line: usize },
    #[error("header declares {declared} clauses but {found} were read")]
    ClauseCountMismatch { declared: usize, found: usize },
    #[error("line {line}: clause weight {weight} exceeds top {top}")]
    WeightAboveTop { line: usize, weight: i64, top: i64 },
    #[error("line {line}: negative clause weight {weight}")]
    NegativeWeight { line: usize, weight: i64 },
    #[error("cannot emit non-integer clause weight {0}")]
    NonIntegerWeight(Rational),
}

struct Header {
    nvars: usize,
    nclauses: usize,
    top: Option<i64>,
    line: usize,
}

fn parse_header(text: &str, kind: &str) -> Result<(Header, Vec<(usize, String)>), DimacsError> {
    let mut header = None;
    let mut body = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if header.is_none() {
            let fields: Vec<&str> = line.split_whitespace().collect();
            let want_fields = if kind == "wcnf" { 5 } else { 4 };
            let ok = fields.len() == want_fields && fields[0] == "p" && fields[1] == kind;
            let parsed = if ok {
                let nvars = fields[2].parse::<usize>().ok();
                let nclauses = fields[3].parse::<usize>().ok();
                let top = if kind == "wcnf" {
                    fields[4].parse::<i64>().ok().map(Some)
                } else {
                    Some(None)
                };
                match (nvars, nclauses, top) {
                    (Some(nv), Some(nc), Some(t)) => Some(Header {
                        nvars: nv,
                        nclauses: nc,
                        top: t,
                        line: line_no,
                    }),
                    _ => None,
                }
            } else {
                None
            };
            match parsed {
                Some(h) => header = Some(h),
                None => {
                    return Err(DimacsError::MalformedHeader {
                        line: line_no,
                        found: line.to_string(),
                    })
                }
            }
        } else {
            body.push((line_no, line.to_string()));
        }
    }
    let header = header.ok_or(DimacsError::MissingHeader)?;
    Ok((header, body))
}

fn parse_literal_token(
    token: &str,
    line: usize,
    nvars: usize,
) -> Result<i64, DimacsError> {
    let value: i64 = token.parse().map_err(|_| DimacsError::UnexpectedToken {
        line,
        token: token.to_string(),
    })?;
    if value != 0 && value.unsigned_abs() as usize > nvars {
        return Err(DimacsError::LiteralOutOfRange { line, literal: value, nvars });
    }
    Ok(value)
}

fn literal_from_int(value: i64) -> Literal {
    Literal {
        var: Var(value.unsigned_abs() as usize - 1),
        negated: value < 0,
    }
}

/// Parse DIMACS CNF text into a formula with vocabulary `"1"`..`"nvars"`.
pub fn parse_dimacs(text: &str) -> Result<CnfFormula, DimacsError> {
    let (header, body) = parse_header(text, "cnf")?;
    let mut formula = CnfFormula::new(Vocabulary::numbered(header.nvars));
    let mut current: Vec<Literal> = Vec::new();
    let mut current_line = header.line;
    for (line_no, line) in body {
        for token in line.split_whitespace() {
            let value = parse_literal_token(token, line_no, header.nvars)?;
            if value == 0 {
                if current.is_empty() {
                    return Err(DimacsError::EmptyClause { line: line_no });
                }
                formula
                    .add_clause(current.drain(..))
                    .expect("literals validated against header");
            } else {
                current.push(literal_from_int(value));
                current_line = line_no;
            }
        }
    }
    if !current.is_empty() {
        return Err(DimacsError::UnterminatedClause { line: current_line });
    }
    if formula.clauses().len() != header.nclauses {
        return Err(DimacsError::ClauseCountMismatch {
            declared: header.nclauses,
            found: formula.clauses().len(),
        });
    }
    Ok(formula)
}

/// Write a formula in DIMACS CNF. Variable names are dropped; position in
/// the vocabulary determines the DIMACS index.
pub fn emit_dimacs(formula: &CnfFormula) -> String {
    let mut out = format!(
        "p cnf {} {}\n",
        formula.num_vars(),
        formula.clauses().len()
    );
    for clause in formula.clauses() {
        for lit in clause.literals() {
            let v = lit.var.0 as i64 + 1;
            out.push_str(&format!("{} ", if lit.negated { -v } else { v }));
        }
        out.push_str("0\n");
    }
    out
}

/// Parse WDIMACS text. Clauses whose weight equals `top` become hard
/// clauses (stored with weight zero); all other weights must lie in
/// `0..top`.
pub fn parse_wdimacs(text: &str) -> Result<WeightedCnf, DimacsError> {
    let (header, body) = parse_header(text, "wcnf")?;
    let top = header.top.expect("wcnf header carries top");
    let mut base = CnfFormula::new(Vocabulary::numbered(header.nvars));
    let mut weighted = Vec::new();
    let mut current: Vec<Literal> = Vec::new();
    let mut weight: Option<i64> = None;
    let mut current_line = header.line;
    for (line_no, line) in body {
        for token in line.split_whitespace() {
            if weight.is_none() {
                let w: i64 = token.parse().map_err(|_| DimacsError::UnexpectedToken {
                    line: line_no,
                    token: token.to_string(),
                })?;
                if w < 0 {
                    return Err(DimacsError::NegativeWeight { line: line_no, weight: w });
                }
                if w > top {
                    return Err(DimacsError::WeightAboveTop { line: line_no, weight: w, top });
                }
                weight = Some(w);
                current_line = line_no;
                continue;
            }
            let value = parse_literal_token(token, line_no, header.nvars)?;
            if value == 0 {
                if current.is_empty() {
                    return Err(DimacsError::EmptyClause { line: line_no });
                }
                let w = weight.take().expect("weight read before clause end");
                let hard = w == top;
                base.add_clause(current.drain(..))
                    .expect("literals validated against header");
                weighted.push(WeightedClause {
                    weight: if hard { Rational::new(0, 1) } else { Rational::new(w, 1) },
                    hard,
                });
            } else {
                current.push(literal_from_int(value));
            }
        }
    }
    if weight.is_some() || !current.is_empty() {
        return Err(DimacsError::UnterminatedClause { line: current_line });
    }
    if base.clauses().len() != header.nclauses {
        return Err(DimacsError::ClauseCountMismatch {
            declared: header.nclauses,
            found: base.clauses().len(),
        });
    }
    WeightedCnf::new(base, weighted).map_err(|_| DimacsError::MissingHeader)
}

/// Write WDIMACS. Soft weights must be integers; `top` is one more than
/// the total soft weight, and hard clauses are written with weight `top`.
pub fn emit_wdimacs(weighted: &WeightedCnf) -> Result<String, DimacsError> {
    let mut soft_total: i64 = 0;
    for wc in weighted.weighted_clauses() {
        if !wc.hard {
            if !wc.weight.is_integer() {
                return Err(DimacsError::NonIntegerWeight(wc.weight));
            }
            soft_total += wc.weight.to_integer();
        }
    }
    let top = soft_total + 1;
    let base = weighted.base();
    let mut out = format!(
        "p wcnf {} {} {}\n",
        base.num_vars(),
        base.clauses().len(),
        top
    );
    for (clause, wc) in base.clauses().iter().zip(weighted.weighted_clauses()) {
        let w = if wc.hard { top } else { wc.weight.to_integer() };
        out.push_str(&w.to_string());
        for lit in clause.literals() {
            let v = lit.var.0 as i64 + 1;
            out.push_str(&format!(" {}", if lit.negated { -v } else { v }));
        }
        out.push_str(" 0\n");
    }
    Ok(out)
}
