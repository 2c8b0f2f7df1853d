//! Propositional formulas and their CNF conversion.
//!
//! [`tseitin`] produces an equisatisfiable CNF with one auxiliary variable
//! per connective node (negation is folded into literals). Every gate is
//! defined by a full biconditional, so each model of the source formula
//! extends to exactly one model of the CNF; projecting the CNF's models
//! onto the original atoms therefore recovers the source model set with
//! multiplicities intact. That property is what lets downstream model
//! counting treat converted formulas interchangeably with native CNF.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use super::{CnfError, CnfFormula, Literal, Var, Vocabulary};

/// Name prefix reserved for auxiliary variables introduced by [`tseitin`].
pub const TSEITIN_PREFIX: &str = "__t";

/// A propositional formula over named atoms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PropFormula {
    Atom(String),
    Not(Box<PropFormula>),
    And(Box<PropFormula>, Box<PropFormula>),
    Or(Box<PropFormula>, Box<PropFormula>),
    Implies(Box<PropFormula>, Box<PropFormula>),
    Iff(Box<PropFormula>, Box<PropFormula>),
}

impl PropFormula {
    pub fn atom(name: impl Into<String>) -> Self {
        PropFormula::Atom(name.into())
    }

    pub fn not(f: PropFormula) -> Self {
        PropFormula::Not(Box::new(f))
    }

    pub fn and(a: PropFormula, b: PropFormula) -> Self {
        PropFormula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: PropFormula, b: PropFormula) -> Self {
        PropFormula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: PropFormula, b: PropFormula) -> Self {
        PropFormula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: PropFormula, b: PropFormula) -> Self {
        PropFormula::Iff(Box::new(a), Box::new(b))
    }

    /// Atom names used in the formula, sorted.
    pub fn atoms(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<String>) {
        match self {
            PropFormula::Atom(a) => {
                out.insert(a.clone());
            }
            PropFormula::Not(f) => f.collect_atoms(out),
            PropFormula::And(a, b)
            | PropFormula::Or(a, b)
            | PropFormula::Implies(a, b)
            | PropFormula::Iff(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    /// Truth value under an atom valuation. Unknown atoms error.
    pub fn evaluate<F>(&self, valuation: &F) -> Result<bool, CnfError>
    where
        F: Fn(&str) -> Option<bool>,
    {
        Ok(match self {
            PropFormula::Atom(a) => {
                valuation(a).ok_or_else(|| CnfError::UnknownVariable(a.clone()))?
            }
            PropFormula::Not(f) => !f.evaluate(valuation)?,
            PropFormula::And(a, b) => a.evaluate(valuation)? && b.evaluate(valuation)?,
            PropFormula::Or(a, b) => a.evaluate(valuation)? || b.evaluate(valuation)?,
            PropFormula::Implies(a, b) => !a.evaluate(valuation)? || b.evaluate(valuation)?,
            PropFormula::Iff(a, b) => a.evaluate(valuation)? == b.evaluate(valuation)?,
        })
    }
}

impl fmt::Display for PropFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PropFormula::Atom(a) => write!(f, "{a}"),
            PropFormula::Not(x) => write!(f, "!({x})"),
            PropFormula::And(a, b) => write!(f, "({a} & {b})"),
            PropFormula::Or(a, b) => write!(f, "({a} | {b})"),
            PropFormula::Implies(a, b) => write!(f, "({a} -> {b})"),
            PropFormula::Iff(a, b) => write!(f, "({a} <-> {b})"),
        }
    }
}

/// Convert a propositional formula to CNF over `atom_vocabulary` (which
/// must cover the formula's atoms and may declare extra, unused atoms).
/// Auxiliary variables are appended after the declared atoms and carry the
/// [`TSEITIN_PREFIX`] name prefix.
pub fn tseitin(formula: &PropFormula, atom_vocabulary: &[String]) -> Result<CnfFormula, CnfError> {
    for name in atom_vocabulary {
        if name.starts_with(TSEITIN_PREFIX) {
            return Err(CnfError::ReservedName(name.clone(), TSEITIN_PREFIX));
        }
    }
    let declared: BTreeSet<&String> = atom_vocabulary.iter().collect();
    for atom in formula.atoms() {
        if !declared.contains(&atom) {
            return Err(CnfError::UnknownVariable(atom));
        }
    }

    let mut builder = TseitinBuilder {
        names: atom_vocabulary.to_vec(),
        clauses: Vec::new(),
        next_aux: 0,
    };
    let root = builder.encode(formula)?;
    builder.clauses.push(vec![root]);

    let mut cnf = CnfFormula::new(Vocabulary::new(builder.names)?);
    for clause in builder.clauses {
        cnf.add_clause(clause)?;
    }
    Ok(cnf)
}

struct TseitinBuilder {
    names: Vec<String>,
    clauses: Vec<Vec<Literal>>,
    next_aux: usize,
}

impl TseitinBuilder {
    fn fresh(&mut self) -> Literal {
        let var = Var(self.names.len());
        self.names.push(format!("{TSEITIN_PREFIX}{}", self.next_aux));
        self.next_aux += 1;
        Literal::pos(var)
    }

    fn atom(&self, name: &str) -> Result<Literal, CnfError> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| Literal::pos(Var(i)))
            .ok_or_else(|| CnfError::UnknownVariable(name.to_string()))
    }

    /// Returns a literal equivalent to the subformula, emitting gate
    /// definition clauses along the way.
    fn encode(&mut self, formula: &PropFormula) -> Result<Literal, CnfError> {
        Ok(match formula {
            PropFormula::Atom(name) => self.atom(name)?,
            PropFormula::Not(inner) => self.encode(inner)?.complement(),
            PropFormula::And(a, b) => {
                let (a, b) = (self.encode(a)?, self.encode(b)?);
                let g = self.fresh();
                self.clauses.push(vec![g.complement(), a]);
                self.clauses.push(vec![g.complement(), b]);
                self.clauses.push(vec![g, a.complement(), b.complement()]);
                g
            }
            PropFormula::Or(a, b) => {
                let (a, b) = (self.encode(a)?, self.encode(b)?);
                let g = self.fresh();
                self.clauses.push(vec![g.complement(), a, b]);
                self.clauses.push(vec![g, a.complement()]);
                self.clauses.push(vec![g, b.complement()]);
                g
            }
            PropFormula::Implies(a, b) => {
                let (a, b) = (self.encode(a)?, self.encode(b)?);
                let g = self.fresh();
                self.clauses.push(vec![g.complement(), a.complement(), b]);
                self.clauses.push(vec![g, a]);
                self.clauses.push(vec![g, b.complement()]);
                g
            }
            PropFormula::Iff(a, b) => {
                let (a, b) = (self.encode(a)?, self.encode(b)?);
                let g = self.fresh();
                self.clauses.push(vec![g.complement(), a.complement(), b]);
                self.clauses.push(vec![g.complement(), a, b.complement()]);
                self.clauses.push(vec![g, a, b]);
                self.clauses.push(vec![g, a.complement(), b.complement()]);
                g
            }
        })
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PropParseError {
    #[error("column {0}: unexpected character {1:?}")]
    UnexpectedChar(usize, char),
    #[error("column {0}: expected {1}")]
    Expected(usize, &'static str),
    #[error("unexpected end of input")]
    UnexpectedEnd,
    #[error("column {0}: trailing input")]
    TrailingInput(usize),
}

/// Parse the textual formula syntax used by claim encodings:
/// atoms `[A-Za-z_][A-Za-z0-9_]*`, `!`, `&`, `|`, `->` (right-associative),
/// `<->`, and parentheses. Precedence: `!` > `&` > `|` > `->` > `<->`.
pub fn parse_prop(text: &str) -> Result<PropFormula, PropParseError> {
    let tokens = lex(text)?;
    let mut parser = Parser { tokens, pos: 0 };
    let formula = parser.iff()?;
    if parser.pos < parser.tokens.len() {
        return Err(PropParseError::TrailingInput(parser.tokens[parser.pos].1));
    }
    Ok(formula)
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Atom(String),
    Not,
    And,
    Or,
    Implies,
    Iff,
    LParen,
    RParen,
}

fn lex(text: &str) -> Result<Vec<(Token, usize)>, PropParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '(' => {
                tokens.push((Token::LParen, col));
                i += 1;
            }
            ')' => {
                tokens.push((Token::RParen, col));
                i += 1;
            }
            '!' | '~' => {
                tokens.push((Token::Not, col));
                i += 1;
            }
            '&' => {
                tokens.push((Token::And, col));
                i += 1;
            }
            '|' => {
                tokens.push((Token::Or, col));
                i += 1;
            }
            '-' => {
                if chars.get(i + 1) == Some(&'>') {
                    tokens.push((Token::Implies, col));
                    i += 2;
                } else {
                    return Err(PropParseError::UnexpectedChar(col, c));
                }
            }
            '<' => {
                if chars.get(i + 1) == Some(&'-') && chars.get(i + 2) == Some(&'>') {
                    tokens.push((Token::Iff, col));
                    i += 3;
                } else {
                    return Err(PropParseError::UnexpectedChar(col, c));
                }
            }
            _ if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                tokens.push((Token::Atom(chars[start..i].iter().collect()), col));
            }
            _ => return Err(PropParseError::UnexpectedChar(col, c)),
        }
    }
    Ok(tokens)
}

struct Parser {
    tokens: Vec<(Token, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(t, _)| t)
    }

    fn iff(&mut self) -> Result<PropFormula, PropParseError> {
        let mut left = self.implies()?;
        while self.peek() == Some(&Token::Iff) {
            self.pos += 1;
            let right = self.implies()?;
            left = PropFormula::iff(left, right);
        }
        Ok(left)
    }

    fn implies(&mut self) -> Result<PropFormula, PropParseError> {
        let left = self.or()?;
        if self.peek() == Some(&Token::Implies) {
            self.pos += 1;
            let right = self.implies()?;
            return Ok(PropFormula::implies(left, right));
        }
        Ok(left)
    }

    fn or(&mut self) -> Result<PropFormula, PropParseError> {
        let mut left = self.and()?;
        while self.peek() == Some(&Token::Or) {
            self.pos += 1;
            let right = self.and()?;
            left = PropFormula::or(left, right);
        }
        Ok(left)
    }

    fn and(&mut self) -> Result<PropFormula, PropParseError> {
        let mut left = self.unary()?;
        while self.peek() == Some(&Token::And) {
            self.pos += 1;
            let right = self.unary()?;
            left = PropFormula::and(left, right);
        }
        Ok(left)
    }

    fn unary(&mut self) -> Result<PropFormula, PropParseError> {
        match self.tokens.get(self.pos).cloned() {
            Some((Token::Not, _)) => {
                self.pos += 1;
                Ok(PropFormula::not(self.unary()?))
            }
            Some((Token::LParen, col)) => {
                self.pos += 1;
                let inner = self.iff()?;
                if self.peek() == Some(&Token::RParen) {
                    self.pos += 1;
                    Ok(inner)
                } else {
                    Err(PropParseError::Expected(col, "closing parenthesis"))
                }
            }
            Some((Token::Atom(name), _)) => {
                self.pos += 1;
                Ok(PropFormula::atom(name))
            }
            Some((_, col)) => Err(PropParseError::Expected(col, "atom, `!`, or `(`")),
            None => Err(PropParseError::UnexpectedEnd),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn atom_models(f: &PropFormula, atoms: &[String]) -> BTreeSet<Vec<bool>> {
        // Truth-table sweep; the oracle side of the conversion tests.
        let n = atoms.len();
        let mut out = BTreeSet::new();
        for pattern in 0..1u64 << n {
            let bits: Vec<bool> = (0..n).map(|i| pattern >> (n - 1 - i) & 1 == 1).collect();
            let valuation = |name: &str| {
                atoms
                    .iter()
                    .position(|a| a == name)
                    .map(|i| bits[i])
            };
            if f.evaluate(&valuation).unwrap() {
                out.insert(bits);
            }
        }
        out
    }

    fn cnf_projections(f: &PropFormula, atoms: &[String]) -> Vec<Vec<bool>> {
        let cnf = tseitin(f, atoms).unwrap();
        cnf.enumerate_models()
            .unwrap()
            .iter()
            .map(|m| m.values()[..atoms.len()].to_vec())
            .collect()
    }

    fn names(list: &[&str]) -> Vec<String> {
        list.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn bare_atom_needs_no_auxiliaries() {
        let cnf = tseitin(&PropFormula::atom("x"), &names(&["x"])).unwrap();
        assert_eq!(cnf.num_vars(), 1);
        assert_eq!(cnf.clauses().len(), 1);
    }

    #[test]
    fn implication_projects_to_truth_table() {
        let f = PropFormula::implies(PropFormula::atom("x"), PropFormula::atom("y"));
        let atoms = names(&["x", "y"]);
        let projected: BTreeSet<Vec<bool>> = cnf_projections(&f, &atoms).into_iter().collect();
        let expect: BTreeSet<Vec<bool>> = [
            vec![false, false],
            vec![false, true],
            vec![true, true],
        ]
        .into_iter()
        .collect();
        assert_eq!(projected, expect);
        assert_eq!(expect, atom_models(&f, &atoms));
    }

    #[test]
    fn contradiction_is_unsatisfiable() {
        let f = PropFormula::and(
            PropFormula::atom("x"),
            PropFormula::not(PropFormula::atom("x")),
        );
        let cnf = tseitin(&f, &names(&["x"])).unwrap();
        assert_eq!(cnf.count_models().unwrap(), 0);
    }

    #[test]
    fn models_extend_uniquely_over_auxiliaries() {
        let f = PropFormula::iff(
            PropFormula::or(PropFormula::atom("a"), PropFormula::atom("b")),
            PropFormula::not(PropFormula::atom("c")),
        );
        let atoms = names(&["a", "b", "c"]);
        let projections = cnf_projections(&f, &atoms);
        let set: BTreeSet<Vec<bool>> = projections.iter().cloned().collect();
        assert_eq!(projections.len(), set.len(), "one CNF model per source model");
        assert_eq!(set, atom_models(&f, &atoms));
    }

    #[test]
    fn unused_declared_atoms_stay_in_vocabulary() {
        let cnf = tseitin(&PropFormula::atom("a"), &names(&["a", "spare"])).unwrap();
        assert_eq!(cnf.num_vars(), 2);
        assert_eq!(cnf.count_models().unwrap(), 2);
    }

    #[test]
    fn reserved_prefix_rejected() {
        let err = tseitin(&PropFormula::atom("__t0"), &names(&["__t0"])).unwrap_err();
        assert_eq!(err, CnfError::ReservedName("__t0".into(), TSEITIN_PREFIX));
    }

    #[test]
    fn undeclared_atom_rejected() {
        let err = tseitin(&PropFormula::atom("x"), &names(&["y"])).unwrap_err();
        assert_eq!(err, CnfError::UnknownVariable("x".into()));
    }

    #[test]
    fn parser_handles_precedence_and_parens() {
        let f = parse_prop("!a & b | c -> d <-> e").unwrap();
        assert_eq!(f.to_string(), "((((!(a) & b) | c) -> d) <-> e)");
        let g = parse_prop("a -> b -> c").unwrap();
        assert_eq!(g.to_string(), "(a -> (b -> c))");
        let h = parse_prop("(a | b) & !(c <-> d)").unwrap();
        assert_eq!(h.to_string(), "((a | b) & !((c <-> d)))");
    }

    #[test]
    fn parser_reports_errors_with_columns() {
        assert_eq!(parse_prop("a @ b"), Err(PropParseError::UnexpectedChar(3, '@')));
        assert_eq!(parse_prop("a &"), Err(PropParseError::UnexpectedEnd));
        assert_eq!(parse_prop("a b"), Err(PropParseError::TrailingInput(3)));
        assert_eq!(
            parse_prop("(a"),
            Err(PropParseError::Expected(1, "closing parenthesis"))
        );
    }

    #[test]
    fn parsed_formula_round_trips_through_semantics() {
        let f = parse_prop("flat -> sky_red").unwrap();
        let atoms = names(&["flat", "sky_red"]);
        assert_eq!(
            atom_models(&f, &atoms),
            cnf_projections(&f, &atoms).into_iter().collect()
        );
    }
}
