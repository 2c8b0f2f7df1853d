//! Propositional substrate: CNF formulas over a named variable vocabulary,
//! exact model enumeration/counting, conjunction, and the relative
//! consistency measure (models of `p AND q` divided by `2^V`).
//!
//! Everything here is exhaustive by design. Enumeration sweeps all `2^V`
//! assignments and is capped at [`MAX_ENUMERATION_VARS`] variables; this
//! keeps the implementation trivially auditable at the scale the rest of
//! the crate operates on.

mod dimacs;
mod maxsat;
mod prop;

pub use dimacs::{emit_dimacs, emit_wdimacs, parse_dimacs, parse_wdimacs, DimacsError};
pub use maxsat::{max_sat, MaxSatSolution, WeightedClause, WeightedCnf};
pub use prop::{parse_prop, tseitin, PropFormula, PropParseError, TSEITIN_PREFIX};

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

/// Exact rational scalar used for weights, measures, and ratings.
pub type Rational = num_rational::Ratio<i64>;

/// Largest vocabulary for which exhaustive enumeration is permitted.
pub const MAX_ENUMERATION_VARS: usize = 24;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CnfError {
    #[error("duplicate variable name {0:?} in vocabulary")]
    DuplicateVariable(String),
    #[error("empty variable name in vocabulary")]
    EmptyVariableName,
    #[error("unknown variable {0:?}")]
    UnknownVariable(String),
    #[error("variable index {0} out of range for vocabulary of size {1}")]
    VariableOutOfRange(usize, usize),
    #[error("clause has no literals")]
    EmptyClause,
    #[error("assignment covers {got} variables, formula has {want}")]
    VocabularyMismatch { got: usize, want: usize },
    #[error("vocabulary has {0} variables, exhaustive operations allow at most {1}")]
    TooManyVariables(usize, usize),
    #[error("atom name {0:?} uses the reserved auxiliary prefix {1:?}")]
    ReservedName(String, &'static str),
    #[error("hard clauses are jointly unsatisfiable")]
    HardClausesUnsatisfiable,
    #[error("weighted formula must contain at least one clause")]
    NoClauses,
    #[error("clause weight must be non-negative, got {0}")]
    NegativeWeight(Rational),
}

/// A variable, identified by its 0-based position in a formula's vocabulary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(pub usize);

/// Ordered list of named variables. Names are unique and non-empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    names: Vec<String>,
    by_name: BTreeMap<String, usize>,
}

impl Vocabulary {
    pub fn new<I, S>(names: I) -> Result<Self, CnfError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        let mut by_name = BTreeMap::new();
        for (i, name) in names.iter().enumerate() {
            if name.is_empty() {
                return Err(CnfError::EmptyVariableName);
            }
            if by_name.insert(name.clone(), i).is_some() {
                return Err(CnfError::DuplicateVariable(name.clone()));
            }
        }
        Ok(Self { names, by_name })
    }

    /// Vocabulary `"1"`, `"2"`, .., `"n"`, as produced by the DIMACS parser.
    pub fn numbered(n: usize) -> Self {
        let names: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
        let by_name = names
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
        Self { names, by_name }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, var: Var) -> &str {
        &self.names[var.0]
    }

    pub fn var(&self, name: &str) -> Option<Var> {
        self.by_name.get(name).copied().map(Var)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }
}

/// A variable or its negation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub var: Var,
    pub negated: bool,
}

impl Literal {
    pub fn pos(var: Var) -> Self {
        Self { var, negated: false }
    }

    pub fn neg(var: Var) -> Self {
        Self { var, negated: true }
    }

    pub fn complement(self) -> Self {
        Self { var: self.var, negated: !self.negated }
    }
}

/// Disjunction of literals. Literals are kept sorted and duplicate-free;
/// a clause containing both `x` and `!x` is retained but is tautological.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Clause {
    literals: Vec<Literal>,
}

impl Clause {
    pub fn new<I: IntoIterator<Item = Literal>>(literals: I) -> Result<Self, CnfError> {
        let mut literals: Vec<Literal> = literals.into_iter().collect();
        literals.sort();
        literals.dedup();
        if literals.is_empty() {
            return Err(CnfError::EmptyClause);
        }
        Ok(Self { literals })
    }

    pub fn literals(&self) -> &[Literal] {
        &self.literals
    }

    /// True when the clause contains some variable both plain and negated.
    pub fn is_tautology(&self) -> bool {
        self.literals
            .windows(2)
            .any(|w| w[0].var == w[1].var && w[0].negated != w[1].negated)
    }

    /// Variables mentioned by the clause, deduplicated, in index order.
    pub fn variables(&self) -> Vec<Var> {
        let mut vars: Vec<Var> = self.literals.iter().map(|l| l.var).collect();
        vars.dedup();
        vars
    }

    fn eval(&self, assignment: &Assignment) -> bool {
        self.literals
            .iter()
            .any(|l| assignment.get(l.var) != l.negated)
    }
}

/// A total assignment of truth values over some vocabulary, stored in
/// vocabulary order. The first variable is the most significant bit of the
/// pattern used for lexicographic ordering.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Assignment {
    values: Vec<bool>,
}

impl Assignment {
    pub fn new(values: Vec<bool>) -> Self {
        Self { values }
    }

    /// Decode `pattern` into an assignment over `n` variables, variable 0
    /// taking the most significant of the low `n` bits.
    pub fn from_pattern(pattern: u64, n: usize) -> Self {
        let values = (0..n).map(|i| pattern >> (n - 1 - i) & 1 == 1).collect();
        Self { values }
    }

    pub fn bit_pattern(&self) -> u64 {
        self.values
            .iter()
            .fold(0u64, |acc, &b| acc << 1 | u64::from(b))
    }

    pub fn get(&self, var: Var) -> bool {
        self.values[var.0]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.values {
            write!(f, "{}", if *b { '1' } else { '0' })?;
        }
        Ok(())
    }
}

/// A CNF formula: an ordered clause list over a vocabulary. The vocabulary
/// may contain variables that occur in no clause.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CnfFormula {
    vocabulary: Vocabulary,
    clauses: Vec<Clause>,
}

impl CnfFormula {
    pub fn new(vocabulary: Vocabulary) -> Self {
        Self { vocabulary, clauses: Vec::new() }
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocabulary
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn num_vars(&self) -> usize {
        self.vocabulary.len()
    }

    pub fn add_clause<I: IntoIterator<Item = Literal>>(
        &mut self,
        literals: I,
    ) -> Result<(), CnfError> {
        let clause = Clause::new(literals)?;
        for lit in clause.literals() {
            if lit.var.0 >= self.vocabulary.len() {
                return Err(CnfError::VariableOutOfRange(lit.var.0, self.vocabulary.len()));
            }
        }
        self.clauses.push(clause);
        Ok(())
    }

    /// Add a clause given `(name, negated)` pairs.
    pub fn add_clause_named(&mut self, literals: &[(&str, bool)]) -> Result<(), CnfError> {
        let lits = literals
            .iter()
            .map(|(name, negated)| {
                self.vocabulary
                    .var(name)
                    .map(|var| Literal { var, negated: *negated })
                    .ok_or_else(|| CnfError::UnknownVariable((*name).to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        self.add_clause(lits)
    }

    /// True iff every clause has a literal made true by `assignment`.
    pub fn evaluate(&self, assignment: &Assignment) -> Result<bool, CnfError> {
        if assignment.len() != self.vocabulary.len() {
            return Err(CnfError::VocabularyMismatch {
                got: assignment.len(),
                want: self.vocabulary.len(),
            });
        }
        Ok(self.clauses.iter().all(|c| c.eval(assignment)))
    }

    fn check_enumerable(&self) -> Result<(), CnfError> {
        if self.vocabulary.len() > MAX_ENUMERATION_VARS {
            return Err(CnfError::TooManyVariables(
                self.vocabulary.len(),
                MAX_ENUMERATION_VARS,
            ));
        }
        Ok(())
    }

    /// All satisfying assignments, in lexicographic order of bit patterns
    /// (variable 0 most significant, false before true).
    pub fn enumerate_models(&self) -> Result<Vec<Assignment>, CnfError> {
        self.check_enumerable()?;
        let n = self.vocabulary.len();
        let mut models = Vec::new();
        for pattern in 0..1u64 << n {
            let a = Assignment::from_pattern(pattern, n);
            if self.clauses.iter().all(|c| c.eval(&a)) {
                models.push(a);
            }
        }
        Ok(models)
    }

    pub fn count_models(&self) -> Result<u64, CnfError> {
        self.check_enumerable()?;
        let n = self.vocabulary.len();
        let mut count = 0;
        for pattern in 0..1u64 << n {
            let a = Assignment::from_pattern(pattern, n);
            if self.clauses.iter().all(|c| c.eval(&a)) {
                count += 1;
            }
        }
        Ok(count)
    }

    pub fn is_satisfiable(&self) -> Result<bool, CnfError> {
        self.check_enumerable()?;
        let n = self.vocabulary.len();
        for pattern in 0..1u64 << n {
            let a = Assignment::from_pattern(pattern, n);
            if self.clauses.iter().all(|c| c.eval(&a)) {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Conjunction of two formulas. Vocabularies are merged by variable
    /// name: `self`'s vocabulary first, then `other`'s new names in order.
    pub fn conjoin(&self, other: &Self) -> Self {
        let mut names: Vec<String> = self.vocabulary.names.clone();
        for name in &other.vocabulary.names {
            if !self.vocabulary.by_name.contains_key(name) {
                names.push(name.clone());
            }
        }
        let vocabulary = Vocabulary::new(names).expect("merged names stay unique");
        let mut merged = CnfFormula::new(vocabulary);
        for clause in &self.clauses {
            merged.clauses.push(clause.clone());
        }
        for clause in &other.clauses {
            let lits = clause.literals().iter().map(|l| {
                let name = other.vocabulary.name(l.var);
                let var = merged.vocabulary.var(name).expect("merged vocabulary");
                Literal { var, negated: l.negated }
            });
            merged
                .clauses
                .push(Clause::new(lits).expect("clause stays non-empty"));
        }
        merged
    }

    /// Number of models of `self AND other` divided by `2^V`, where `V` is
    /// the size of the merged vocabulary (unused variables included).
    pub fn relative_consistency(&self, other: &Self) -> Result<Rational, CnfError> {
        let merged = self.conjoin(other);
        merged.check_enumerable()?;
        let count = merged.count_models()? as i64;
        Ok(Rational::new(count, 1i64 << merged.num_vars()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// The four-variable demo formula (w|!x)(w|y)(x|!y)(x|y|!z) used
    /// throughout the test suite, over vocabulary [w, x, y, z].
    pub(crate) fn wxyz_formula() -> CnfFormula {
        let vocab = Vocabulary::new(["w", "x", "y", "z"]).unwrap();
        let mut f = CnfFormula::new(vocab);
        f.add_clause_named(&[("w", false), ("x", true)]).unwrap();
        f.add_clause_named(&[("w", false), ("y", false)]).unwrap();
        f.add_clause_named(&[("x", false), ("y", true)]).unwrap();
        f.add_clause_named(&[("x", false), ("y", false), ("z", true)])
            .unwrap();
        f
    }

    fn assignment(bits: &[bool]) -> Assignment {
        Assignment::new(bits.to_vec())
    }

    #[test]
    fn evaluate_wxyz() {
        let f = wxyz_formula();
        assert!(f
            .evaluate(&assignment(&[true, false, false, false]))
            .unwrap());
        assert!(!f
            .evaluate(&assignment(&[false, false, false, false]))
            .unwrap());
    }

    #[test]
    fn evaluate_empty_conjunction_is_true() {
        let f = CnfFormula::new(Vocabulary::new(["a", "b"]).unwrap());
        assert!(f.evaluate(&assignment(&[false, true])).unwrap());
    }

    #[test]
    fn evaluate_rejects_mismatched_assignment() {
        let f = wxyz_formula();
        assert_eq!(
            f.evaluate(&assignment(&[true])),
            Err(CnfError::VocabularyMismatch { got: 1, want: 4 })
        );
    }

    #[test]
    fn enumerate_wxyz_models() {
        let f = wxyz_formula();
        let models = f.enumerate_models().unwrap();
        let expect = [
            [true, false, false, false],
            [true, true, false, false],
            [true, true, false, true],
            [true, true, true, false],
            [true, true, true, true],
        ];
        assert_eq!(models.len(), 5);
        for (m, e) in models.iter().zip(expect.iter()) {
            assert_eq!(m.values(), e);
        }
        assert_eq!(f.count_models().unwrap(), 5);
    }

    #[test]
    fn contradiction_has_no_models() {
        let vocab = Vocabulary::new(["x"]).unwrap();
        let mut f = CnfFormula::new(vocab);
        f.add_clause_named(&[("x", false)]).unwrap();
        f.add_clause_named(&[("x", true)]).unwrap();
        assert!(f.enumerate_models().unwrap().is_empty());
        assert_eq!(f.count_models().unwrap(), 0);
    }

    #[test]
    fn unconstrained_formula_has_all_models() {
        let f = CnfFormula::new(Vocabulary::new(["a", "b"]).unwrap());
        assert_eq!(f.enumerate_models().unwrap().len(), 4);
    }

    #[test]
    fn enumeration_cap_enforced() {
        let names: Vec<String> = (0..25).map(|i| format!("v{i}")).collect();
        let f = CnfFormula::new(Vocabulary::new(names).unwrap());
        assert_eq!(
            f.count_models(),
            Err(CnfError::TooManyVariables(25, MAX_ENUMERATION_VARS))
        );
    }

    #[test]
    fn conjoin_merges_by_name() {
        let mut p = CnfFormula::new(Vocabulary::new(["x"]).unwrap());
        p.add_clause_named(&[("x", false)]).unwrap();
        let mut q = CnfFormula::new(Vocabulary::new(["y"]).unwrap());
        q.add_clause_named(&[("y", false)]).unwrap();
        let m = p.conjoin(&q);
        assert_eq!(m.vocabulary().names(), ["x", "y"]);
        let models = m.enumerate_models().unwrap();
        assert_eq!(models.len(), 1);
        assert_eq!(models[0].values(), [true, true]);
    }

    #[test]
    fn conjoin_shared_variable_contradiction() {
        let mut p = CnfFormula::new(Vocabulary::new(["x"]).unwrap());
        p.add_clause_named(&[("x", false)]).unwrap();
        let mut q = CnfFormula::new(Vocabulary::new(["x"]).unwrap());
        q.add_clause_named(&[("x", true)]).unwrap();
        assert_eq!(p.conjoin(&q).count_models().unwrap(), 0);
    }

    #[test]
    fn conjoin_disjunction_with_unit() {
        let mut p = CnfFormula::new(Vocabulary::new(["x", "y"]).unwrap());
        p.add_clause_named(&[("x", false), ("y", false)]).unwrap();
        let mut q = CnfFormula::new(Vocabulary::new(["y"]).unwrap());
        q.add_clause_named(&[("y", true)]).unwrap();
        let models = p.conjoin(&q).enumerate_models().unwrap();
        assert_eq!(models.len(), 1);
        assert_eq!(models[0].values(), [true, false]);
    }

    #[test]
    fn relative_consistency_examples() {
        let mut p = CnfFormula::new(Vocabulary::new(["x"]).unwrap());
        p.add_clause_named(&[("x", false)]).unwrap();
        let mut q = CnfFormula::new(Vocabulary::new(["x"]).unwrap());
        q.add_clause_named(&[("x", true)]).unwrap();
        assert_eq!(p.relative_consistency(&q).unwrap(), Rational::new(0, 1));
        assert_eq!(p.relative_consistency(&p).unwrap(), Rational::new(1, 2));

        let free_p = CnfFormula::new(Vocabulary::new(["x", "y"]).unwrap());
        let free_q = CnfFormula::new(Vocabulary::new(["x", "y"]).unwrap());
        assert_eq!(
            free_p.relative_consistency(&free_q).unwrap(),
            Rational::new(1, 1)
        );
    }

    #[test]
    fn tautological_clause_flagged_and_retained() {
        let vocab = Vocabulary::new(["x"]).unwrap();
        let mut f = CnfFormula::new(vocab);
        f.add_clause(vec![Literal::pos(Var(0)), Literal::neg(Var(0))])
            .unwrap();
        assert_eq!(f.clauses().len(), 1);
        assert!(f.clauses()[0].is_tautology());
        assert_eq!(f.count_models().unwrap(), 2);
    }

    #[test]
    fn duplicate_literals_deduplicated() {
        let clause = Clause::new(vec![Literal::pos(Var(0)), Literal::pos(Var(0))]).unwrap();
        assert_eq!(clause.literals().len(), 1);
        assert!(!clause.is_tautology());
    }

    #[test]
    fn empty_clause_rejected() {
        assert_eq!(Clause::new(vec![]), Err(CnfError::EmptyClause));
    }

    #[test]
    fn vocabulary_rejects_duplicates() {
        assert_eq!(
            Vocabulary::new(["x", "x"]).unwrap_err(),
            CnfError::DuplicateVariable("x".into())
        );
    }

    #[test]
    fn assignment_pattern_round_trip() {
        let a = Assignment::from_pattern(0b1010, 4);
        assert_eq!(a.values(), [true, false, true, false]);
        assert_eq!(a.bit_pattern(), 0b1010);
        assert_eq!(a.to_string(), "1010");
    }
}
