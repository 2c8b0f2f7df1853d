//! Simplicial topology of a CNF formula.
//!
//! [`clause_complex`] turns each clause's variable set into a simplex (with
//! nested clause supports absorbed) and closes downward; [`dowker_dual`]
//! swaps the roles of clauses and variables over the same incidence
//! relation. Open sets are the up-closed families of faces of the face
//! poset, and [`SimplicialComplex::betti`] computes homology ranks over
//! GF(2) from boundary-matrix ranks.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::cnf::CnfFormula;

/// Hard cap on the number of faces a complex may have. Downward closure is
/// computed eagerly, so the cap applies at construction time.
pub const MAX_FACES: usize = 10_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TopologyError {
    #[error("formula has no clauses")]
    EmptyFormula,
    #[error("simplex must have at least one vertex")]
    EmptySimplex,
    #[error("complex would have more than {0} faces")]
    TooManyFaces(usize),
    #[error("{0} is not a face of the complex")]
    NotAFace(Simplex),
    #[error("cell {0} is unknown to the complex")]
    UnknownCell(Simplex),
    #[error("cell family is not up-closed: {0} has a coface outside the family")]
    NotOpen(Simplex),
}

/// A simplex: a sorted, duplicate-free, non-empty set of vertex names.
///
/// Ordering is by dimension first, then lexicographically by vertices, so
/// sorted containers list faces bottom-up.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Simplex {
    vertices: Vec<String>,
}

impl Simplex {
    pub fn new<I, S>(vertices: I) -> Result<Self, TopologyError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut vertices: Vec<String> = vertices.into_iter().map(Into::into).collect();
        vertices.sort();
        vertices.dedup();
        if vertices.is_empty() {
            return Err(TopologyError::EmptySimplex);
        }
        Ok(Self { vertices })
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    /// Number of vertices minus one.
    pub fn dimension(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn is_subset_of(&self, other: &Simplex) -> bool {
        // Both sides sorted; a linear merge scan suffices.
        let mut it = other.vertices.iter();
        self.vertices
            .iter()
            .all(|v| it.by_ref().any(|w| w == v))
    }

    pub fn contains_vertex(&self, name: &str) -> bool {
        self.vertices.binary_search_by(|v| v.as_str().cmp(name)).is_ok()
    }

    /// All non-empty proper and improper subsets.
    fn subsets(&self) -> Vec<Simplex> {
        let n = self.vertices.len();
        let mut out = Vec::with_capacity((1usize << n) - 1);
        for mask in 1u32..1 << n {
            let vertices: Vec<String> = (0..n)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| self.vertices[i].clone())
                .collect();
            out.push(Simplex { vertices });
        }
        out
    }

    /// Codimension-one faces; empty for vertices.
    pub fn boundary_faces(&self) -> Vec<Simplex> {
        if self.vertices.len() == 1 {
            return Vec::new();
        }
        (0..self.vertices.len())
            .map(|skip| {
                let vertices = self
                    .vertices
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| *i != skip)
                    .map(|(_, v)| v.clone())
                    .collect();
                Simplex { vertices }
            })
            .collect()
    }
}

impl PartialOrd for Simplex {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Simplex {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.vertices
            .len()
            .cmp(&other.vertices.len())
            .then_with(|| self.vertices.cmp(&other.vertices))
    }
}

impl fmt::Display for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.vertices.join(","))
    }
}

/// An abstract simplicial complex, stored as its maximal simplices plus the
/// eagerly computed downward closure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplicialComplex {
    maximal: Vec<Simplex>,
    faces: BTreeSet<Simplex>,
}

impl SimplicialComplex {
    /// Build from generating simplices. Simplices contained in another are
    /// absorbed; the rest become the maximal faces.
    pub fn from_maximal<I>(simplices: I) -> Result<Self, TopologyError>
    where
        I: IntoIterator<Item = Simplex>,
    {
        let mut candidates: Vec<Simplex> = simplices.into_iter().collect();
        candidates.sort();
        candidates.dedup();
        let maximal: Vec<Simplex> = candidates
            .iter()
            .filter(|s| {
                !candidates
                    .iter()
                    .any(|t| t != *s && s.is_subset_of(t))
            })
            .cloned()
            .collect();
        let mut faces = BTreeSet::new();
        for simplex in &maximal {
            for sub in simplex.subsets() {
                faces.insert(sub);
                if faces.len() > MAX_FACES {
                    return Err(TopologyError::TooManyFaces(MAX_FACES));
                }
            }
        }
        Ok(Self { maximal, faces })
    }

    pub fn maximal_simplices(&self) -> &[Simplex] {
        &self.maximal
    }

    pub fn faces(&self) -> &BTreeSet<Simplex> {
        &self.faces
    }

    pub fn has_face(&self, simplex: &Simplex) -> bool {
        self.faces.contains(simplex)
    }

    pub fn dimension(&self) -> usize {
        self.maximal.iter().map(Simplex::dimension).max().unwrap_or(0)
    }

    pub fn vertices(&self) -> Vec<String> {
        self.faces
            .iter()
            .take_while(|s| s.dimension() == 0)
            .map(|s| s.vertices[0].clone())
            .collect()
    }

    /// The up-set of `simplex`: every face containing it.
    pub fn up_set(&self, simplex: &Simplex) -> Result<OpenSet, TopologyError> {
        if !self.has_face(simplex) {
            return Err(TopologyError::NotAFace(simplex.clone()));
        }
        let cells = self
            .faces
            .iter()
            .filter(|f| simplex.is_subset_of(f))
            .cloned()
            .collect();
        Ok(OpenSet { cells })
    }

    /// The whole complex as an open set.
    pub fn whole(&self) -> OpenSet {
        OpenSet { cells: self.faces.clone() }
    }

    /// True iff `cells` is up-closed in the face poset. Errors on cells
    /// that are not faces.
    pub fn is_open(&self, cells: &BTreeSet<Simplex>) -> Result<bool, TopologyError> {
        for cell in cells {
            if !self.has_face(cell) {
                return Err(TopologyError::UnknownCell(cell.clone()));
            }
        }
        Ok(cells.iter().all(|cell| {
            self.faces
                .iter()
                .filter(|f| cell.is_subset_of(f))
                .all(|coface| cells.contains(coface))
        }))
    }

    /// Validate an arbitrary cell family as an open set of this complex.
    pub fn open_from_cells(&self, cells: BTreeSet<Simplex>) -> Result<OpenSet, TopologyError> {
        if !self.is_open(&cells)? {
            let witness = cells
                .iter()
                .find(|cell| {
                    self.faces
                        .iter()
                        .any(|f| cell.is_subset_of(f) && !cells.contains(f))
                })
                .cloned()
                .expect("non-open set has a witness cell");
            return Err(TopologyError::NotOpen(witness));
        }
        Ok(OpenSet { cells })
    }

    pub fn face_poset(&self) -> FacePoset<'_> {
        FacePoset { complex: self }
    }

    /// GF(2) Betti numbers `b_0 .. b_max_dim`. Dimensions above the
    /// complex's dimension report zero.
    pub fn betti(&self, max_dim: usize) -> BettiNumbers {
        let mut by_dim: BTreeMap<usize, Vec<&Simplex>> = BTreeMap::new();
        for face in &self.faces {
            by_dim.entry(face.dimension()).or_default().push(face);
        }
        let rank_of_boundary = |k: usize| -> usize {
            if k == 0 {
                return 0;
            }
            let (Some(rows), Some(cols)) = (by_dim.get(&(k - 1)), by_dim.get(&k)) else {
                return 0;
            };
            let row_index: BTreeMap<&Simplex, usize> =
                rows.iter().enumerate().map(|(i, s)| (*s, i)).collect();
            let width = (cols.len() + 63) / 64;
            let mut matrix: Vec<Vec<u64>> = vec![vec![0u64; width]; rows.len()];
            for (j, face) in cols.iter().enumerate() {
                for sub in face.boundary_faces() {
                    let i = row_index[&sub];
                    matrix[i][j / 64] |= 1u64 << (j % 64);
                }
            }
            gf2_rank(matrix)
        };
        let b = (0..=max_dim)
            .map(|k| {
                let n_k = by_dim.get(&k).map_or(0, Vec::len);
                n_k.saturating_sub(rank_of_boundary(k) + rank_of_boundary(k + 1))
            })
            .collect();
        BettiNumbers { b }
    }

    /// Text export: one maximal simplex per line, vertices comma-joined.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for simplex in &self.maximal {
            out.push_str(&simplex.vertices.join(","));
            out.push('\n');
        }
        out
    }
}

/// Row-reduce a GF(2) bit matrix and return its rank.
fn gf2_rank(mut rows: Vec<Vec<u64>>) -> usize {
    let mut rank = 0;
    let width = rows.first().map_or(0, Vec::len);
    let mut pivot_rows: Vec<(usize, Vec<u64>)> = Vec::new();
    for row_idx in 0..rows.len() {
        let mut row = std::mem::take(&mut rows[row_idx]);
        loop {
            let Some(lead) = leading_bit(&row, width) else {
                break;
            };
            if let Some((_, pivot)) = pivot_rows.iter().find(|(l, _)| *l == lead) {
                for (a, b) in row.iter_mut().zip(pivot) {
                    *a ^= *b;
                }
            } else {
                pivot_rows.push((lead, row));
                rank += 1;
                break;
            }
        }
    }
    rank
}

fn leading_bit(row: &[u64], width: usize) -> Option<usize> {
    (0..width).find_map(|block| {
        let bits = row[block];
        if bits == 0 {
            None
        } else {
            Some(block * 64 + bits.trailing_zeros() as usize)
        }
    })
}

/// The face poset of a complex: faces ordered by containment.
pub struct FacePoset<'a> {
    complex: &'a SimplicialComplex,
}

impl FacePoset<'_> {
    pub fn elements(&self) -> impl Iterator<Item = &Simplex> {
        self.complex.faces.iter()
    }

    pub fn leq(&self, a: &Simplex, b: &Simplex) -> bool {
        a.is_subset_of(b)
    }

    /// Covering pairs: `a < b` with `dim b = dim a + 1`.
    pub fn covers(&self) -> Vec<(&Simplex, &Simplex)> {
        let mut out = Vec::new();
        for b in &self.complex.faces {
            for a in b.boundary_faces() {
                let a_ref = self
                    .complex
                    .faces
                    .get(&a)
                    .expect("closure contains boundary faces");
                out.push((a_ref, b));
            }
        }
        out.sort();
        out
    }
}

/// An up-closed set of faces: an open set of the Alexandrov topology on
/// the face poset. Instances are only handed out validated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpenSet {
    cells: BTreeSet<Simplex>,
}

impl OpenSet {
    pub fn empty() -> Self {
        Self { cells: BTreeSet::new() }
    }

    pub fn cells(&self) -> &BTreeSet<Simplex> {
        &self.cells
    }

    pub fn contains(&self, cell: &Simplex) -> bool {
        self.cells.contains(cell)
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn is_subset_of(&self, other: &OpenSet) -> bool {
        self.cells.is_subset(&other.cells)
    }

    /// Unions of open sets are open.
    pub fn union(&self, other: &OpenSet) -> OpenSet {
        OpenSet {
            cells: self.cells.union(&other.cells).cloned().collect(),
        }
    }

    /// Intersections of open sets are open (Alexandrov: arbitrary ones).
    pub fn intersection(&self, other: &OpenSet) -> OpenSet {
        OpenSet {
            cells: self.cells.intersection(&other.cells).cloned().collect(),
        }
    }

    /// Distinct vertex names mentioned by the cells.
    pub fn vertex_support(&self) -> BTreeSet<String> {
        self.cells
            .iter()
            .flat_map(|c| c.vertices().iter().cloned())
            .collect()
    }
}

/// GF(2) Betti numbers indexed by dimension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BettiNumbers {
    pub b: Vec<usize>,
}

impl BettiNumbers {
    /// Alternating sum over all computed dimensions.
    pub fn euler_characteristic(&self) -> i64 {
        self.b
            .iter()
            .enumerate()
            .map(|(k, &bk)| if k % 2 == 0 { bk as i64 } else { -(bk as i64) })
            .sum()
    }
}

impl fmt::Display for BettiNumbers {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .b
            .iter()
            .enumerate()
            .map(|(k, bk)| format!("b{k}={bk}"))
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// The clause complex of a formula: the downward closure of the clauses'
/// variable sets, with nested supports absorbed into maximal simplices.
pub fn clause_complex(formula: &CnfFormula) -> Result<SimplicialComplex, TopologyError> {
    if formula.clauses().is_empty() {
        return Err(TopologyError::EmptyFormula);
    }
    let simplices = formula
        .clauses()
        .iter()
        .map(|clause| {
            Simplex::new(
                clause
                    .variables()
                    .into_iter()
                    .map(|v| formula.vocabulary().name(v).to_string()),
            )
            .expect("clauses are non-empty")
        })
        .collect::<Vec<_>>();
    SimplicialComplex::from_maximal(simplices)
}

/// The Dowker dual: for each variable, the set of clause indices using it
/// becomes a simplex over vertices `c1`, `c2`, ... (1-based clause index).
pub fn dowker_dual(formula: &CnfFormula) -> Result<SimplicialComplex, TopologyError> {
    if formula.clauses().is_empty() {
        return Err(TopologyError::EmptyFormula);
    }
    let mut per_variable: BTreeMap<usize, Vec<String>> = BTreeMap::new();
    for (idx, clause) in formula.clauses().iter().enumerate() {
        for var in clause.variables() {
            per_variable
                .entry(var.0)
                .or_default()
                .push(format!("c{}", idx + 1));
        }
    }
    let simplices = per_variable
        .into_values()
        .map(|clauses| Simplex::new(clauses).expect("variable occurs in some clause"))
        .collect::<Vec<_>>();
    SimplicialComplex::from_maximal(simplices)
}
