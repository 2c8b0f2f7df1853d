//! Exact weighted MAX-SAT by exhaustive sweep.
//!
//! The objective counts soft-clause weights only; hard clauses are
//! constraints and contribute nothing to the score. Ties between optimal
//! assignments break toward the lexicographically smallest bit pattern so
//! results are reproducible.

use num_traits::Zero;

use super::{Assignment, CnfError, CnfFormula, Rational};

/// Weight and hardness of one clause of a [`WeightedCnf`], positionally
/// aligned with the base formula's clause list.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WeightedClause {
    pub weight: Rational,
    pub hard: bool,
}

/// A CNF formula with per-clause non-negative weights and hard flags.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedCnf {
    base: CnfFormula,
    weighted: Vec<WeightedClause>,
}

impl WeightedCnf {
    pub fn new(base: CnfFormula, weighted: Vec<WeightedClause>) -> Result<Self, CnfError> {
        if base.clauses().is_empty() {
            return Err(CnfError::NoClauses);
        }
        assert_eq!(
            base.clauses().len(),
            weighted.len(),
            "one weight entry per clause"
        );
        for wc in &weighted {
            if wc.weight < Rational::zero() {
                return Err(CnfError::NegativeWeight(wc.weight));
            }
        }
        Ok(Self { base, weighted })
    }

    /// All clauses soft with the given weights.
    pub fn soft(base: CnfFormula, weights: Vec<Rational>) -> Result<Self, CnfError> {
        let weighted = weights
            .into_iter()
            .map(|weight| WeightedClause { weight, hard: false })
            .collect();
        Self::new(base, weighted)
    }

    pub fn base(&self) -> &CnfFormula {
        &self.base
    }

    pub fn weighted_clauses(&self) -> &[WeightedClause] {
        &self.weighted
    }

    pub fn total_soft_weight(&self) -> Rational {
        self.weighted
            .iter()
            .filter(|wc| !wc.hard)
            .map(|wc| wc.weight)
            .sum()
    }
}

/// Optimal solution of a weighted MAX-SAT instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaxSatSolution {
    pub assignment: Assignment,
    pub achieved_weight: Rational,
    pub satisfied_clauses: Vec<usize>,
}

/// Maximize the summed weight of satisfied soft clauses subject to all hard
/// clauses holding. Errors if the hard clauses are jointly unsatisfiable.
pub fn max_sat(weighted: &WeightedCnf) -> Result<MaxSatSolution, CnfError> {
    let base = weighted.base();
    if base.num_vars() > super::MAX_ENUMERATION_VARS {
        return Err(CnfError::TooManyVariables(
            base.num_vars(),
            super::MAX_ENUMERATION_VARS,
        ));
    }
    let n = base.num_vars();
    let mut best: Option<(Assignment, Rational)> = None;
    for pattern in 0..1u64 << n {
        let assignment = Assignment::from_pattern(pattern, n);
        let hard_ok = base
            .clauses()
            .iter()
            .zip(&weighted.weighted)
            .filter(|(_, wc)| wc.hard)
            .all(|(clause, _)| {
                clause
                    .literals()
                    .iter()
                    .any(|l| assignment.get(l.var) != l.negated)
            });
        if !hard_ok {
            continue;
        }
        let score: Rational = base
            .clauses()
            .iter()
            .zip(&weighted.weighted)
            .filter(|(clause, wc)| {
                !wc.hard
                    && clause
                        .literals()
                        .iter()
                        .any(|l| assignment.get(l.var) != l.negated)
            })
            .map(|(_, wc)| wc.weight)
            .sum();
        // Strict improvement keeps the first (lexicographically smallest)
        // optimal assignment.
        if best.as_ref().map_or(true, |(_, w)| score > *w) {
            best = Some((assignment, score));
        }
    }
    let (assignment, achieved_weight) = best.ok_or(CnfError::HardClausesUnsatisfiable)?;
    let satisfied_clauses = base
        .clauses()
        .iter()
        .enumerate()
        .filter(|(_, clause)| {
            clause
                .literals()
                .iter()
                .any(|l| assignment.get(l.var) != l.negated)
        })
        .map(|(i, _)| i)
        .collect();
    Ok(MaxSatSolution {
        assignment,
        achieved_weight,
        satisfied_clauses,
    })
}
