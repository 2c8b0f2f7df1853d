//! The Boolean assignment sheaf of a CNF formula.
//!
//! Each face of the clause complex carries a stalk: the assignments to the
//! face's variables that satisfy every clause whose variable set fits
//! inside the face. Restriction is projection onto a subface. A section
//! over an open set picks one stalk member per cell so that all
//! restrictions agree; sections over the whole complex are exactly the
//! satisfying assignments of the formula.
//!
//! Section enumeration works on the maximal cells of the open set: a
//! compatible family is determined by its values there, subject to
//! agreement on the variables of every shared cell *inside the open set*.
//! Two maximal cells that overlap only outside the open set are genuinely
//! unconstrained against each other, so their shared variables may differ
//! between the two cells; collapsing them to a single variable pool would
//! undercount sections and break the gluing law.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::cnf::{Assignment, Clause, CnfError, CnfFormula};
use crate::topology::{clause_complex, OpenSet, Simplex, SimplicialComplex, TopologyError};

/// Cap on the distinct variables an open set may mention during section
/// enumeration.
pub const MAX_SECTION_VARS: usize = 20;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SheafError {
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error(transparent)]
    Cnf(#[from] CnfError),
    #[error("open set mentions {0} variables, sections allow at most {1}")]
    TooManyVariables(usize, usize),
    #[error("{to} is not a subface of {from}")]
    ContainmentViolated { from: Simplex, to: Simplex },
    #[error("open set {0} is not contained in {1}")]
    NotContained(String, String),
    #[error("section does not match the open set it claims to cover")]
    SectionShapeMismatch,
}

/// A partial Boolean assignment: values for the vertex names of one face.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct PartialAssignment {
    values: BTreeMap<String, bool>,
}

impl PartialAssignment {
    pub fn new(values: BTreeMap<String, bool>) -> Self {
        Self { values }
    }

    pub fn get(&self, name: &str) -> Option<bool> {
        self.values.get(name).copied()
    }

    pub fn variables(&self) -> impl Iterator<Item = &String> {
        self.values.keys()
    }

    pub fn values(&self) -> &BTreeMap<String, bool> {
        &self.values
    }

    /// Project onto the variables of `to`, which must all be present.
    pub fn restrict(&self, to: &Simplex) -> Result<PartialAssignment, SheafError> {
        let mut values = BTreeMap::new();
        for v in to.vertices() {
            match self.values.get(v) {
                Some(b) => {
                    values.insert(v.clone(), *b);
                }
                None => {
                    return Err(SheafError::ContainmentViolated {
                        from: Simplex::new(self.values.keys().cloned())
                            .expect("stalk members are non-empty"),
                        to: to.clone(),
                    })
                }
            }
        }
        Ok(PartialAssignment { values })
    }

    fn agrees_on(&self, other: &PartialAssignment, vars: &BTreeSet<String>) -> bool {
        vars.iter().all(|v| self.values.get(v) == other.values.get(v))
    }

    fn satisfies(&self, clause: &Clause, formula: &CnfFormula) -> bool {
        clause.literals().iter().any(|lit| {
            let name = formula.vocabulary().name(lit.var);
            self.values.get(name) == Some(&!lit.negated)
        })
    }
}

/// The stalk over one face: every assignment of the face's variables that
/// satisfies the clauses constraining the face.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stalk {
    pub face: Simplex,
    pub members: Vec<PartialAssignment>,
}

/// A compatible choice of one stalk member per cell of an open set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalSection {
    data: BTreeMap<Simplex, PartialAssignment>,
}

impl LocalSection {
    pub fn data(&self) -> &BTreeMap<Simplex, PartialAssignment> {
        &self.data
    }

    pub fn value_at(&self, cell: &Simplex) -> Option<&PartialAssignment> {
        self.data.get(cell)
    }

    /// One-line dump: `face=bits;...` with cells in face order and bits in
    /// the face's sorted vertex order.
    pub fn dump_line(&self) -> String {
        let parts: Vec<String> = self
            .data
            .iter()
            .map(|(face, value)| {
                let bits: String = face
                    .vertices()
                    .iter()
                    .map(|v| if value.get(v) == Some(true) { '1' } else { '0' })
                    .collect();
                format!("{}={}", face.vertices().join(","), bits)
            })
            .collect();
        parts.join(";")
    }
}

/// The assignment sheaf over the clause complex of a formula.
#[derive(Debug, Clone)]
pub struct ClauseSheaf {
    formula: CnfFormula,
    complex: SimplicialComplex,
    /// Face -> indices of the clauses whose variable set fits in the face.
    constraints: BTreeMap<Simplex, Vec<usize>>,
}

/// Build the sheaf of a formula with at least one clause.
pub fn build_sheaf(formula: &CnfFormula) -> Result<ClauseSheaf, SheafError> {
    let complex = clause_complex(formula)?;
    let clause_supports: Vec<Simplex> = formula
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
        .collect();
    let mut constraints = BTreeMap::new();
    for face in complex.faces() {
        let indices: Vec<usize> = clause_supports
            .iter()
            .enumerate()
            .filter(|(_, support)| support.is_subset_of(face))
            .map(|(i, _)| i)
            .collect();
        constraints.insert(face.clone(), indices);
    }
    Ok(ClauseSheaf {
        formula: formula.clone(),
        complex,
        constraints,
    })
}

impl ClauseSheaf {
    pub fn formula(&self) -> &CnfFormula {
        &self.formula
    }

    pub fn complex(&self) -> &SimplicialComplex {
        &self.complex
    }

    /// Indices of the clauses constraining `face`.
    pub fn constraint_clauses(&self, face: &Simplex) -> Result<&[usize], SheafError> {
        self.constraints
            .get(face)
            .map(Vec::as_slice)
            .ok_or_else(|| TopologyError::NotAFace(face.clone()).into())
    }

    /// Enumerate the stalk over `face`, members in bit-pattern order of the
    /// face's sorted vertices (first vertex most significant).
    pub fn stalk(&self, face: &Simplex) -> Result<Stalk, SheafError> {
        let clause_indices = self.constraint_clauses(face)?;
        let vars = face.vertices();
        let n = vars.len();
        let mut members = Vec::new();
        for pattern in 0..1u64 << n {
            let values: BTreeMap<String, bool> = vars
                .iter()
                .enumerate()
                .map(|(i, v)| (v.clone(), pattern >> (n - 1 - i) & 1 == 1))
                .collect();
            let candidate = PartialAssignment { values };
            let ok = clause_indices
                .iter()
                .all(|&ci| candidate.satisfies(&self.formula.clauses()[ci], &self.formula));
            if ok {
                members.push(candidate);
            }
        }
        Ok(Stalk { face: face.clone(), members })
    }

    fn validate_open(&self, set: &OpenSet) -> Result<(), SheafError> {
        if !self.complex.is_open(set.cells())? {
            let witness = set
                .cells()
                .iter()
                .next()
                .cloned()
                .expect("non-open sets are non-empty");
            return Err(TopologyError::NotOpen(witness).into());
        }
        Ok(())
    }

    /// All sections over an open set, in a deterministic order: components
    /// are enumerated independently and combined as a product, with the
    /// later component cycling fastest.
    pub fn sections(&self, set: &OpenSet) -> Result<Vec<LocalSection>, SheafError> {
        self.validate_open(set)?;
        if set.is_empty() {
            return Ok(vec![LocalSection { data: BTreeMap::new() }]);
        }
        let support = set.vertex_support();
        if support.len() > MAX_SECTION_VARS {
            return Err(SheafError::TooManyVariables(support.len(), MAX_SECTION_VARS));
        }

        // Maximal cells of the open set (no proper coface inside it).
        let maximal: Vec<&Simplex> = set
            .cells()
            .iter()
            .filter(|cell| {
                !set.cells()
                    .iter()
                    .any(|other| *cell != other && cell.is_subset_of(other))
            })
            .collect();

        // Variables on which each pair of maximal cells must agree: the
        // union of the variables of every cell of the set lying inside
        // both. Overlap outside the set imposes nothing.
        let shared: BTreeMap<(usize, usize), BTreeSet<String>> = {
            let mut out = BTreeMap::new();
            for i in 0..maximal.len() {
                for j in i + 1..maximal.len() {
                    let mut vars = BTreeSet::new();
                    for cell in set.cells() {
                        if cell.is_subset_of(maximal[i]) && cell.is_subset_of(maximal[j]) {
                            vars.extend(cell.vertices().iter().cloned());
                        }
                    }
                    if !vars.is_empty() {
                        out.insert((i, j), vars);
                    }
                }
            }
            out
        };

        // Union-find over maximal cells; linked iff they share set-cells.
        let mut parent: Vec<usize> = (0..maximal.len()).collect();
        fn find(parent: &mut Vec<usize>, i: usize) -> usize {
            if parent[i] != i {
                let root = find(parent, parent[i]);
                parent[i] = root;
            }
            parent[i]
        }
        for &(i, j) in shared.keys() {
            let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
            if ri != rj {
                let lo = ri.min(rj);
                parent[ri.max(rj)] = lo;
            }
        }
        let mut components: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for i in 0..maximal.len() {
            let root = find(&mut parent, i);
            components.entry(root).or_default().push(i);
        }

        // Backtracking enumeration per component.
        let stalks: Vec<Stalk> = maximal
            .iter()
            .map(|cell| self.stalk(cell))
            .collect::<Result<_, _>>()?;
        let mut per_component: Vec<Vec<Vec<usize>>> = Vec::new();
        for member_cells in components.values() {
            let mut complete: Vec<Vec<usize>> = Vec::new();
            let mut choice: Vec<usize> = Vec::new();
            enumerate_component(
                member_cells,
                &stalks,
                &shared,
                &mut choice,
                &mut complete,
            );
            per_component.push(complete);
        }

        // Cartesian product across components, last component fastest.
        let mut sections = Vec::new();
        let mut indices = vec![0usize; per_component.len()];
        if per_component.iter().any(Vec::is_empty) {
            return Ok(Vec::new());
        }
        loop {
            let mut data: BTreeMap<Simplex, PartialAssignment> = BTreeMap::new();
            for ((member_cells, tuples), &pick) in
                components.values().zip(&per_component).zip(&indices)
            {
                for (slot, &cell_idx) in member_cells.iter().enumerate() {
                    let member = &stalks[cell_idx].members[tuples[pick][slot]];
                    data.insert(maximal[cell_idx].clone(), member.clone());
                }
            }
            // Fill every non-maximal cell by restriction from any maximal
            // coface; agreement constraints make the choice immaterial.
            for cell in set.cells() {
                if data.contains_key(cell) {
                    continue;
                }
                let host = maximal
                    .iter()
                    .position(|m| cell.is_subset_of(m))
                    .expect("every cell of an up-closed set sits under a maximal cell");
                let value = data[maximal[host]]
                    .restrict(cell)
                    .expect("cell is a subface of its host");
                data.insert(cell.clone(), value);
            }
            sections.push(LocalSection { data });

            let mut digit = indices.len();
            loop {
                if digit == 0 {
                    return Ok(sections);
                }
                digit -= 1;
                indices[digit] += 1;
                if indices[digit] < per_component[digit].len() {
                    break;
                }
                indices[digit] = 0;
            }
        }
    }

    /// All sections over `larger` whose restriction to `s`'s open set is
    /// `s`. The result may be empty.
    pub fn extend(
        &self,
        section: &LocalSection,
        within: &OpenSet,
        larger: &OpenSet,
    ) -> Result<Vec<LocalSection>, SheafError> {
        self.validate_open(within)?;
        self.validate_open(larger)?;
        if !within.is_subset_of(larger) {
            return Err(SheafError::NotContained(
                format!("{} cells", within.len()),
                format!("{} cells", larger.len()),
            ));
        }
        let covered: BTreeSet<&Simplex> = section.data.keys().collect();
        let expected: BTreeSet<&Simplex> = within.cells().iter().collect();
        if covered != expected {
            return Err(SheafError::SectionShapeMismatch);
        }
        Ok(self
            .sections(larger)?
            .into_iter()
            .filter(|candidate| {
                within
                    .cells()
                    .iter()
                    .all(|cell| candidate.data[cell] == section.data[cell])
            })
            .collect())
    }

    /// Sections over the whole complex, reported as total assignments over
    /// the formula's vocabulary. Vocabulary variables that occur in no
    /// clause are unconstrained and are expanded explicitly, so the result
    /// is always set-equal to model enumeration.
    pub fn global_sections(&self) -> Result<Vec<Assignment>, SheafError> {
        if self.formula.num_vars() > crate::cnf::MAX_ENUMERATION_VARS {
            return Err(CnfError::TooManyVariables(
                self.formula.num_vars(),
                crate::cnf::MAX_ENUMERATION_VARS,
            )
            .into());
        }
        let support = self.complex.whole().vertex_support();
        if support.len() > MAX_SECTION_VARS {
            // Fall back to the formula itself: the global sections of this
            // sheaf coincide with its models by construction.
            return Ok(self.formula.enumerate_models()?);
        }
        let sections = self.sections(&self.complex.whole())?;
        let vocab = self.formula.vocabulary();
        let missing: Vec<usize> = (0..vocab.len())
            .filter(|&i| !support.contains(vocab.name(crate::cnf::Var(i))))
            .collect();
        let mut out: Vec<Assignment> = Vec::new();
        for section in &sections {
            let mut base = vec![false; vocab.len()];
            for (cell, value) in &section.data {
                if cell.dimension() == 0 {
                    let name = &cell.vertices()[0];
                    let var = vocab.var(name).expect("complex vertices are variables");
                    base[var.0] = value.get(name).expect("vertex value present");
                }
            }
            for wildcard in 0..1u64 << missing.len() {
                let mut values = base.clone();
                for (bit, &var_idx) in missing.iter().enumerate() {
                    values[var_idx] = wildcard >> (missing.len() - 1 - bit) & 1 == 1;
                }
                out.push(Assignment::new(values));
            }
        }
        out.sort();
        out.dedup();
        Ok(out)
    }
}

fn enumerate_component(
    member_cells: &[usize],
    stalks: &[Stalk],
    shared: &BTreeMap<(usize, usize), BTreeSet<String>>,
    choice: &mut Vec<usize>,
    complete: &mut Vec<Vec<usize>>,
) {
    if choice.len() == member_cells.len() {
        complete.push(choice.clone());
        return;
    }
    let slot = choice.len();
    let cell_idx = member_cells[slot];
    'members: for (mi, member) in stalks[cell_idx].members.iter().enumerate() {
        for (prev_slot, &prev_pick) in choice.iter().enumerate() {
            let prev_idx = member_cells[prev_slot];
            let key = (prev_idx.min(cell_idx), prev_idx.max(cell_idx));
            if let Some(vars) = shared.get(&key) {
                let prev_member = &stalks[prev_idx].members[prev_pick];
                if !member.agrees_on(prev_member, vars) {
                    continue 'members;
                }
            }
        }
        choice.push(mi);
        enumerate_component(member_cells, stalks, shared, choice, complete);
        choice.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnf::Vocabulary;

    fn wxyz_formula() -> CnfFormula {
        let vocab = Vocabulary::new(["w", "x", "y", "z"]).unwrap();
        let mut f = CnfFormula::new(vocab);
        f.add_clause_named(&[("w", false), ("x", true)]).unwrap();
        f.add_clause_named(&[("w", false), ("y", false)]).unwrap();
        f.add_clause_named(&[("x", false), ("y", true)]).unwrap();
        f.add_clause_named(&[("x", false), ("y", false), ("z", true)])
            .unwrap();
        f
    }

    fn sx(names: &[&str]) -> Simplex {
        Simplex::new(names.iter().copied()).unwrap()
    }

    #[test]
    fn constraint_map_matches_clause_supports() {
        let sheaf = build_sheaf(&wxyz_formula()).unwrap();
        assert_eq!(sheaf.constraint_clauses(&sx(&["x", "y"])).unwrap(), &[2]);
        assert_eq!(sheaf.constraint_clauses(&sx(&["y"])).unwrap(), &[] as &[usize]);
        assert_eq!(
            sheaf.constraint_clauses(&sx(&["x", "y", "z"])).unwrap(),
            &[2, 3]
        );
    }

    #[test]
    fn stalk_sizes_on_wxyz() {
        let sheaf = build_sheaf(&wxyz_formula()).unwrap();
        assert_eq!(sheaf.stalk(&sx(&["y"])).unwrap().members.len(), 2);
        let xy = sheaf.stalk(&sx(&["x", "y"])).unwrap();
        assert_eq!(xy.members.len(), 3);
        // x=F, y=T falsifies (x | !y).
        assert!(!xy.members.iter().any(|m| {
            m.get("x") == Some(false) && m.get("y") == Some(true)
        }));
        let wx = sheaf.stalk(&sx(&["w", "x"])).unwrap();
        assert_eq!(wx.members.len(), 3);
        assert!(!wx.members.iter().any(|m| {
            m.get("w") == Some(false) && m.get("x") == Some(true)
        }));
    }

    #[test]
    fn restriction_is_projection() {
        let sheaf = build_sheaf(&wxyz_formula()).unwrap();
        let xyz = sheaf.stalk(&sx(&["x", "y", "z"])).unwrap();
        let member = xyz
            .members
            .iter()
            .find(|m| {
                m.get("x") == Some(true) && m.get("y") == Some(false) && m.get("z") == Some(false)
            })
            .unwrap();
        let projected = member.restrict(&sx(&["x", "y"])).unwrap();
        assert_eq!(projected.get("x"), Some(true));
        assert_eq!(projected.get("y"), Some(false));
        assert_eq!(projected.values().len(), 2);

        // Identity restriction.
        assert_eq!(member.restrict(&sx(&["x", "y", "z"])).unwrap(), *member);

        // Projection lands in the target stalk.
        let all_true = xyz
            .members
            .iter()
            .find(|m| m.values().values().all(|&b| b))
            .unwrap();
        let y_val = all_true.restrict(&sx(&["y"])).unwrap();
        assert!(sheaf.stalk(&sx(&["y"])).unwrap().members.contains(&y_val));
    }

    #[test]
    fn restriction_requires_containment() {
        let sheaf = build_sheaf(&wxyz_formula()).unwrap();
        let xy = sheaf.stalk(&sx(&["x", "y"])).unwrap();
        let err = xy.members[0].restrict(&sx(&["w"])).unwrap_err();
        assert!(matches!(err, SheafError::ContainmentViolated { .. }));
    }

    #[test]
    fn sections_over_up_y_number_seven() {
        let sheaf = build_sheaf(&wxyz_formula()).unwrap();
        let up_y = sheaf.complex().up_set(&sx(&["y"])).unwrap();
        let sections = sheaf.sections(&up_y).unwrap();
        assert_eq!(sections.len(), 7);
        // Every section fixes all four variables through its two maximal
        // cells {w,y} and {x,y,z}.
        for s in &sections {
            let wy = s.value_at(&sx(&["w", "y"])).unwrap();
            let xyz = s.value_at(&sx(&["x", "y", "z"])).unwrap();
            assert_eq!(wy.get("y"), xyz.get("y"), "shared vertex y must agree");
        }
    }

    #[test]
    fn sections_over_maximal_up_set_match_stalk() {
        let sheaf = build_sheaf(&wxyz_formula()).unwrap();
        let sigma = sx(&["x", "y", "z"]);
        let up = sheaf.complex().up_set(&sigma).unwrap();
        let sections = sheaf.sections(&up).unwrap();
        let stalk = sheaf.stalk(&sigma).unwrap();
        assert_eq!(sections.len(), stalk.members.len());
        for (section, member) in sections.iter().zip(&stalk.members) {
            assert_eq!(section.value_at(&sigma).unwrap(), member);
        }
    }

    #[test]
    fn empty_open_set_has_one_section() {
        let sheaf = build_sheaf(&wxyz_formula()).unwrap();
        let sections = sheaf.sections(&OpenSet::empty()).unwrap();
        assert_eq!(sections.len(), 1);
        assert!(sections[0].data().is_empty());
    }

    #[test]
    fn disconnected_overlap_is_unconstrained() {
        // Hollow triangle (v|a)(a|b)(b|v): the open set up(a) + up(b)
        // reaches the vertex v through two edges but does not contain {v},
        // so the two edge values of v are independent.
        let mut f = CnfFormula::new(Vocabulary::new(["v", "a", "b"]).unwrap());
        f.add_clause_named(&[("v", false), ("a", false)]).unwrap();
        f.add_clause_named(&[("a", false), ("b", false)]).unwrap();
        f.add_clause_named(&[("b", false), ("v", false)]).unwrap();
        let sheaf = build_sheaf(&f).unwrap();
        let u = sheaf
            .complex()
            .up_set(&sx(&["a"]))
            .unwrap()
            .union(&sheaf.complex().up_set(&sx(&["b"])).unwrap());
        let sections = sheaf.sections(&u).unwrap();
        assert_eq!(sections.len(), 8);

        // Two maximal cells with no shared cell in the set at all: the
        // sections are a plain product.
        let pair = sheaf
            .complex()
            .up_set(&sx(&["a", "v"]))
            .unwrap()
            .union(&sheaf.complex().up_set(&sx(&["b", "v"])).unwrap());
        assert_eq!(sheaf.sections(&pair).unwrap().len(), 9);
    }

    #[test]
    fn extension_examples_from_up_y() {
        let sheaf = build_sheaf(&wxyz_formula()).unwrap();
        let up_y = sheaf.complex().up_set(&sx(&["y"])).unwrap();
        let whole = sheaf.complex().whole();
        let sections = sheaf.sections(&up_y).unwrap();

        let pick = |w: bool, x: bool, y: bool, z: bool| {
            sections
                .iter()
                .find(|s| {
                    let wy = s.value_at(&sx(&["w", "y"])).unwrap();
                    let xyz = s.value_at(&sx(&["x", "y", "z"])).unwrap();
                    wy.get("w") == Some(w)
                        && xyz.get("x") == Some(x)
                        && xyz.get("y") == Some(y)
                        && xyz.get("z") == Some(z)
                })
                .expect("section exists")
                .clone()
        };

        // (F,T,T,T) satisfies the up(y) clauses but falsifies (w | !x).
        let blocked = pick(false, true, true, true);
        assert!(sheaf.extend(&blocked, &up_y, &whole).unwrap().is_empty());

        // (T,F,F,F) extends to exactly one global section.
        let unique = pick(true, false, false, false);
        let extensions = sheaf.extend(&unique, &up_y, &whole).unwrap();
        assert_eq!(extensions.len(), 1);

        // A global section trivially extends to itself.
        let global = &extensions[0];
        assert_eq!(sheaf.extend(global, &whole, &whole).unwrap().len(), 1);
    }

    #[test]
    fn extend_rejects_non_containment() {
        let sheaf = build_sheaf(&wxyz_formula()).unwrap();
        let up_y = sheaf.complex().up_set(&sx(&["y"])).unwrap();
        let up_w = sheaf.complex().up_set(&sx(&["w"])).unwrap();
        let s = sheaf.sections(&up_y).unwrap().remove(0);
        assert!(matches!(
            sheaf.extend(&s, &up_y, &up_w),
            Err(SheafError::NotContained(..))
        ));
    }

    #[test]
    fn global_sections_match_models() {
        let f = wxyz_formula();
        let sheaf = build_sheaf(&f).unwrap();
        let global = sheaf.global_sections().unwrap();
        let models = f.enumerate_models().unwrap();
        assert_eq!(global, models);
        assert_eq!(global.len(), 5);
    }

    #[test]
    fn unsatisfiable_formula_has_no_global_sections() {
        let mut f = CnfFormula::new(Vocabulary::new(["x"]).unwrap());
        f.add_clause_named(&[("x", false)]).unwrap();
        f.add_clause_named(&[("x", true)]).unwrap();
        let sheaf = build_sheaf(&f).unwrap();
        assert!(sheaf.global_sections().unwrap().is_empty());
    }

    #[test]
    fn unit_clause_formula_has_single_global_section() {
        let mut f = CnfFormula::new(Vocabulary::new(["x"]).unwrap());
        f.add_clause_named(&[("x", false)]).unwrap();
        let sheaf = build_sheaf(&f).unwrap();
        let global = sheaf.global_sections().unwrap();
        assert_eq!(global.len(), 1);
        assert_eq!(global[0].values(), [true]);
    }

    #[test]
    fn unused_vocabulary_variables_expand_as_wildcards() {
        let mut f = CnfFormula::new(Vocabulary::new(["x", "spare"]).unwrap());
        f.add_clause_named(&[("x", false)]).unwrap();
        let sheaf = build_sheaf(&f).unwrap();
        let global = sheaf.global_sections().unwrap();
        assert_eq!(global, f.enumerate_models().unwrap());
        assert_eq!(global.len(), 2);
    }

    #[test]
    fn section_dump_format() {
        let mut f = CnfFormula::new(Vocabulary::new(["x", "y"]).unwrap());
        f.add_clause_named(&[("x", false), ("y", false)]).unwrap();
        let sheaf = build_sheaf(&f).unwrap();
        let whole = sheaf.complex().whole();
        let sections = sheaf.sections(&whole).unwrap();
        assert_eq!(sections.len(), 3);
        assert_eq!(sections[0].dump_line(), "x=0;y=1;x,y=01");
    }
}
