//! Global consistency measures over rated claim networks.
//!
//! Pairwise ratings r in 0..=10 become truth values r/10 and discrepancies
//! d = 1 - r/10. The consistency radius is the worst discrepancy in scope;
//! the consistency filtration is the single-linkage merge tree obtained by
//! sweeping the discrepancy threshold; cycle reports score each
//! fundamental cycle with the Łukasiewicz conjunction of its edge truth
//! values, an upper bound on joint consistency that pairwise ratings alone
//! cannot rule out. Maximal consistent subsets of logically encoded claims
//! are solved exactly with a selector-variable group MAX-SAT encoding.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};
use thiserror::Error;

use crate::cnf::{
    max_sat, CnfError, CnfFormula, Literal, Rational, Vocabulary, WeightedClause, WeightedCnf,
    MAX_ENUMERATION_VARS,
};

/// Name prefix reserved for claim selector variables.
pub const SELECTOR_PREFIX: &str = "__sel_";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConsistencyError {
    #[error("truth value {0} outside [0, 1]")]
    OutOfRange(Rational),
    #[error("discrepancy {0} outside [0, 1] for pair ({1}, {2})")]
    BadDiscrepancy(Rational, String, String),
    #[error("self-edge on node {0}")]
    SelfEdge(String),
    #[error("unknown node {0}")]
    UnknownNode(String),
    #[error("scope contains unknown edge ({0}, {1})")]
    UnknownEdge(String, String),
    #[error("consistency radius needs a non-empty edge scope")]
    EmptyScope,
    #[error("graph needs at least one node")]
    NoNodes,
    #[error("claim id {0} appears more than once")]
    DuplicateClaim(String),
    #[error("claim weight for {0} must be positive")]
    NonPositiveWeight(String),
    #[error("hard background is unsatisfiable on its own")]
    BackgroundUnsatisfiable,
    #[error("claim atom {0} collides with the selector prefix")]
    ReservedAtom(String),
    #[error("group encoding needs {0} variables, at most {1} supported")]
    TooManyVariables(usize, usize),
    #[error(transparent)]
    Cnf(#[from] CnfError),
}

/// A rational in [0, 1]; the Łukasiewicz carrier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct TruthValue(Rational);

impl TruthValue {
    pub fn new(value: Rational) -> Result<Self, ConsistencyError> {
        if value < Rational::zero() || value > Rational::one() {
            return Err(ConsistencyError::OutOfRange(value));
        }
        Ok(Self(value))
    }

    /// Map a 0..=10 rating onto [0, 1].
    pub fn from_rating(rating: u8) -> Self {
        Self(Rational::new(i64::from(rating.min(10)), 10))
    }

    pub fn value(self) -> Rational {
        self.0
    }
}

/// Łukasiewicz conjunction: max(0, a + b - 1).
pub fn luk_and(a: TruthValue, b: TruthValue) -> TruthValue {
    TruthValue((a.0 + b.0 - Rational::one()).max(Rational::zero()))
}

/// Łukasiewicz disjunction: min(1, a + b).
pub fn luk_or(a: TruthValue, b: TruthValue) -> TruthValue {
    TruthValue((a.0 + b.0).min(Rational::one()))
}

/// Łukasiewicz implication: min(1, 1 - a + b).
pub fn luk_implies(a: TruthValue, b: TruthValue) -> TruthValue {
    TruthValue((Rational::one() - a.0 + b.0).min(Rational::one()))
}

/// Undirected graph of claims with per-pair discrepancies d = 1 - r/10.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscrepancyGraph {
    nodes: Vec<String>,
    edges: BTreeMap<(String, String), Rational>,
}

fn edge_key(a: &str, b: &str) -> (String, String) {
    if a <= b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

impl DiscrepancyGraph {
    pub fn new<I, S>(nodes: I) -> Result<Self, ConsistencyError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut nodes: Vec<String> = nodes.into_iter().map(Into::into).collect();
        nodes.sort();
        nodes.dedup();
        if nodes.is_empty() {
            return Err(ConsistencyError::NoNodes);
        }
        Ok(Self { nodes, edges: BTreeMap::new() })
    }

    pub fn add_edge(&mut self, a: &str, b: &str, discrepancy: Rational) -> Result<(), ConsistencyError> {
        if a == b {
            return Err(ConsistencyError::SelfEdge(a.to_string()));
        }
        for node in [a, b] {
            if !self.nodes.iter().any(|n| n == node) {
                return Err(ConsistencyError::UnknownNode(node.to_string()));
            }
        }
        if discrepancy < Rational::zero() || discrepancy > Rational::one() {
            return Err(ConsistencyError::BadDiscrepancy(
                discrepancy,
                a.to_string(),
                b.to_string(),
            ));
        }
        self.edges.insert(edge_key(a, b), discrepancy);
        Ok(())
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn edges(&self) -> &BTreeMap<(String, String), Rational> {
        &self.edges
    }

    pub fn discrepancy(&self, a: &str, b: &str) -> Option<Rational> {
        self.edges.get(&edge_key(a, b)).copied()
    }

    /// Worst (largest) discrepancy among the scoped edges.
    pub fn consistency_radius(
        &self,
        scope: &[(String, String)],
    ) -> Result<Rational, ConsistencyError> {
        if scope.is_empty() {
            return Err(ConsistencyError::EmptyScope);
        }
        let mut radius = Rational::zero();
        for (a, b) in scope {
            let d = self
                .discrepancy(a, b)
                .ok_or_else(|| ConsistencyError::UnknownEdge(a.clone(), b.clone()))?;
            radius = radius.max(d);
        }
        Ok(radius)
    }

    /// Radius over every rated edge.
    pub fn radius_over_all_edges(&self) -> Result<Rational, ConsistencyError> {
        let scope: Vec<(String, String)> = self.edges.keys().cloned().collect();
        self.consistency_radius(&scope)
    }

    /// Single-linkage merge tree over the discrepancy threshold sweep.
    /// Edges are processed in (discrepancy, lexicographic pair) order; an
    /// edge joining two distinct components records a merge event.
    pub fn consistency_filtration(&self) -> ConsistencyFiltration {
        let mut order: Vec<(&(String, String), &Rational)> = self.edges.iter().collect();
        order.sort_by(|(ka, da), (kb, db)| da.cmp(db).then_with(|| ka.cmp(kb)));

        let mut components: BTreeMap<String, usize> = BTreeMap::new();
        let mut members: Vec<BTreeSet<String>> = Vec::new();
        for node in &self.nodes {
            components.insert(node.clone(), members.len());
            members.push([node.clone()].into_iter().collect());
        }

        let mut events = Vec::new();
        for ((a, b), &threshold) in order {
            let (ca, cb) = (components[a], components[b]);
            if ca == cb {
                continue;
            }
            let left = members[ca].clone();
            let right = members[cb].clone();
            let merged: BTreeSet<String> = left.union(&right).cloned().collect();
            for node in &merged {
                components.insert(node.clone(), members.len());
            }
            members.push(merged.clone());
            events.push(MergeEvent {
                threshold,
                edge: (a.clone(), b.clone()),
                left: left.into_iter().collect(),
                right: right.into_iter().collect(),
                merged: merged.into_iter().collect(),
            });
        }

        let mut final_components: BTreeMap<usize, BTreeSet<String>> = BTreeMap::new();
        for (node, comp) in &components {
            final_components
                .entry(*comp)
                .or_default()
                .insert(node.clone());
        }
        ConsistencyFiltration {
            merges: events,
            components: final_components
                .into_values()
                .map(|set| set.into_iter().collect())
                .collect(),
        }
    }

    /// Fundamental cycles of the subgraph with discrepancy <= threshold,
    /// each scored with the Łukasiewicz conjunction of its edge truth
    /// values (r/10 = 1 - d). A score of 1 marks a cycle whose joint
    /// consistency the pairwise ratings leave untested.
    pub fn cycle_report(&self, threshold: Rational) -> Vec<CycleScore> {
        let kept: Vec<(&String, &String, Rational)> = self
            .edges
            .iter()
            .filter(|(_, &d)| d <= threshold)
            .map(|((a, b), &d)| (a, b, d))
            .collect();

        // BFS spanning forest, nodes and edges visited in sorted order.
        let mut adjacency: BTreeMap<&String, Vec<(&String, Rational)>> = BTreeMap::new();
        for (a, b, d) in &kept {
            adjacency.entry(a).or_default().push((b, *d));
            adjacency.entry(b).or_default().push((a, *d));
        }
        for list in adjacency.values_mut() {
            list.sort();
        }

        let mut parent: BTreeMap<&String, Option<&String>> = BTreeMap::new();
        let mut tree_edges: BTreeSet<(String, String)> = BTreeSet::new();
        for root in &self.nodes {
            if parent.contains_key(root) {
                continue;
            }
            parent.insert(root, None);
            let mut queue = std::collections::VecDeque::from([root]);
            while let Some(node) = queue.pop_front() {
                if let Some(neighbors) = adjacency.get(node) {
                    for (next, _) in neighbors {
                        if !parent.contains_key(*next) {
                            parent.insert(next, Some(node));
                            tree_edges.insert(edge_key(node, next));
                            queue.push_back(next);
                        }
                    }
                }
            }
        }

        let path_to_root = |start: &String| -> Vec<String> {
            let mut path = vec![start.clone()];
            let mut cursor = start;
            while let Some(up) = parent[cursor] {
                path.push(up.clone());
                cursor = up;
            }
            path
        };

        let mut cycles = Vec::new();
        for (a, b, _) in &kept {
            if tree_edges.contains(&edge_key(a, b)) {
                continue;
            }
            // Fundamental cycle: tree paths to the lowest common ancestor
            // plus the chord (a, b).
            let pa = path_to_root(a);
            let pb = path_to_root(b);
            let in_pa: BTreeSet<&String> = pa.iter().collect();
            let lca_idx_b = pb
                .iter()
                .position(|n| in_pa.contains(n))
                .expect("paths meet at the component root");
            let lca = pb[lca_idx_b].clone();
            let mut nodes: Vec<String> = pa
                .iter()
                .take_while(|n| **n != lca)
                .cloned()
                .collect();
            nodes.push(lca);
            let mut tail: Vec<String> = pb.iter().take(lca_idx_b).cloned().collect();
            tail.reverse();
            nodes.extend(tail);

            let mut edges = Vec::new();
            let mut score = TruthValue(Rational::one());
            for i in 0..nodes.len() {
                let u = &nodes[i];
                let v = &nodes[(i + 1) % nodes.len()];
                let d = self.discrepancy(u, v).expect("cycle edges are rated");
                let (x, y) = edge_key(u, v);
                edges.push((x, y, d));
                score = luk_and(score, TruthValue(Rational::one() - d));
            }

            // Canonical rotation: smallest node first, smaller neighbor
            // second.
            let min_pos = nodes
                .iter()
                .enumerate()
                .min_by_key(|(_, n)| n.clone())
                .map(|(i, _)| i)
                .unwrap_or(0);
            nodes.rotate_left(min_pos);
            if nodes.len() > 2 && nodes[1] > nodes[nodes.len() - 1] {
                nodes[1..].reverse();
            }
            edges.sort();

            cycles.push(CycleScore {
                nodes,
                edges,
                score: score.value(),
                jointly_untested: score.value() == Rational::one(),
            });
        }
        cycles.sort_by(|a, b| a.nodes.cmp(&b.nodes));
        cycles
    }
}

/// One merge of the single-linkage sweep.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MergeEvent {
    pub threshold: Rational,
    pub edge: (String, String),
    pub left: Vec<String>,
    pub right: Vec<String>,
    pub merged: Vec<String>,
}

/// The full merge tree: events in threshold order plus the terminal
/// components (one per connected component of the rated graph).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConsistencyFiltration {
    pub merges: Vec<MergeEvent>,
    pub components: Vec<Vec<String>>,
}

/// A fundamental cycle with its joint-consistency score.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleScore {
    /// Cycle vertices in traversal order, canonically rotated.
    pub nodes: Vec<String>,
    /// Cycle edges as sorted (a, b, discrepancy) triples.
    pub edges: Vec<(String, String, Rational)>,
    /// Łukasiewicz conjunction of the edge truth values.
    pub score: Rational,
    /// Pairwise ratings alone cannot refute joint inconsistency here.
    pub jointly_untested: bool,
}

/// Outcome of the claim-level maximal-consistency computation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaximalSubsetResult {
    pub kept: Vec<String>,
    pub dropped: Vec<String>,
    pub achieved_weight: Rational,
}

/// Keep a maximum-weight subset of claims whose conjoined encodings are
/// satisfiable together with the hard background.
///
/// Group encoding: each claim gets a fresh selector variable; each clause
/// of the claim's encoding becomes the hard clause (!selector OR clause);
/// the selector itself is a soft unit clause carrying the claim's weight;
/// background clauses are hard. A claim is kept iff its selector is true
/// in the optimal assignment, so claims succeed or fail atomically.
pub fn maximal_consistent_subset(
    claims: &[(String, CnfFormula)],
    weights: &[Rational],
    hard_background: &CnfFormula,
) -> Result<MaximalSubsetResult, ConsistencyError> {
    assert_eq!(claims.len(), weights.len(), "one weight per claim");
    let mut seen = BTreeSet::new();
    for ((id, _), weight) in claims.iter().zip(weights) {
        if !seen.insert(id.clone()) {
            return Err(ConsistencyError::DuplicateClaim(id.clone()));
        }
        if *weight <= Rational::zero() {
            return Err(ConsistencyError::NonPositiveWeight(id.clone()));
        }
    }

    if !hard_background.is_satisfiable()? {
        return Err(ConsistencyError::BackgroundUnsatisfiable);
    }

    // Merge all atom vocabularies, then append one selector per claim.
    let mut merged = hard_background.clone();
    for (_, encoding) in claims {
        merged = merged.conjoin(encoding);
    }
    let atom_count = merged.num_vars();
    let mut names: Vec<String> = merged.vocabulary().names().to_vec();
    for name in &names {
        if name.starts_with(SELECTOR_PREFIX) {
            return Err(ConsistencyError::ReservedAtom(name.clone()));
        }
    }
    for (id, _) in claims {
        names.push(format!("{SELECTOR_PREFIX}{id}"));
    }
    let total_vars = names.len();
    if total_vars > MAX_ENUMERATION_VARS {
        return Err(ConsistencyError::TooManyVariables(
            total_vars,
            MAX_ENUMERATION_VARS,
        ));
    }

    let vocabulary = Vocabulary::new(names)?;
    let mut base = CnfFormula::new(vocabulary);
    let mut weighted = Vec::new();

    for clause in hard_background.clauses() {
        let lits: Vec<Literal> = clause
            .literals()
            .iter()
            .map(|l| remap(hard_background, &base, *l))
            .collect();
        base.add_clause(lits)?;
        weighted.push(WeightedClause { weight: Rational::zero(), hard: true });
    }
    for (claim_idx, (_, encoding)) in claims.iter().enumerate() {
        let selector = Literal::pos(crate::cnf::Var(atom_count + claim_idx));
        for clause in encoding.clauses() {
            let mut lits: Vec<Literal> = clause
                .literals()
                .iter()
                .map(|l| remap(encoding, &base, *l))
                .collect();
            lits.push(selector.complement());
            base.add_clause(lits)?;
            weighted.push(WeightedClause { weight: Rational::zero(), hard: true });
        }
        base.add_clause([selector])?;
        weighted.push(WeightedClause { weight: weights[claim_idx], hard: false });
    }

    let solution = max_sat(&WeightedCnf::new(base, weighted)?)?;
    let mut kept = Vec::new();
    let mut dropped = Vec::new();
    for (claim_idx, (id, _)) in claims.iter().enumerate() {
        if solution.assignment.get(crate::cnf::Var(atom_count + claim_idx)) {
            kept.push(id.clone());
        } else {
            dropped.push(id.clone());
        }
    }
    Ok(MaximalSubsetResult {
        kept,
        dropped,
        achieved_weight: solution.achieved_weight,
    })
}

fn remap(from: &CnfFormula, to: &CnfFormula, lit: Literal) -> Literal {
    let name = from.vocabulary().name(lit.var);
    let var = to
        .vocabulary()
        .var(name)
        .expect("merged vocabulary covers all claim atoms");
    Literal { var, negated: lit.negated }
}
