//! The pasting ω-categories `M(K)` and a generic finite ω-category table.
//!
//! Members of `M(K)` are downward-closed cell sets; composition is union.
//! [`build_m`] seeds the table with the cells and saturates under every
//! defined composite.

use std::collections::VecDeque;
use std::sync::{Arc, Mutex, OnceLock};

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::path_complex::{
    cell_closure, cell_face, is_closed, Cell, CellSet, PathProduct, ShapeError, Sign,
};
use crate::report::{Check, Report};

/// Default ceiling on the number of members produced by [`build_m`].
pub const DEFAULT_MEMBER_BUDGET: usize = 2_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OmegaError {
    #[error(transparent)]
    Shape(#[from] ShapeError),
    #[error("presentation inconsistency: {0}")]
    Inconsistent(String),
    #[error("member budget of {0} exceeded")]
    Budget(usize),
    #[error("not composable at level {p}: {left} and {right}")]
    NotComposable { left: String, right: String, p: u32 },
    #[error("malformed table: {0}")]
    Malformed(String),
    #[error("no member with the given cell set")]
    UnknownSet,
}

/// A finite ω-category given by explicit tables.
///
/// Composites are stored for every level `p < top`; at levels `p >= top` every
/// element is its own face, so only `x #_p x = x` is defined there.
#[derive(Clone, Debug)]
pub struct OmegaTable {
    labels: Vec<String>,
    dims: Vec<u32>,
    faces: Vec<Vec<[u32; 2]>>,
    composites: FxHashMap<(u32, u32, u32), u32>,
    top: u32,
    by_minus: Vec<FxHashMap<u32, Vec<u32>>>,
    by_plus: Vec<FxHashMap<u32, Vec<u32>>>,
    ids: Vec<u32>,
}

impl OmegaTable {
    pub fn new(
        labels: Vec<String>,
        dims: Vec<u32>,
        faces: Vec<Vec<[u32; 2]>>,
        composites: FxHashMap<(u32, u32, u32), u32>,
    ) -> Result<Self, OmegaError> {
        let n = dims.len();
        if labels.len() != n || faces.len() != n {
            return Err(OmegaError::Malformed("column lengths differ".into()));
        }
        for (x, f) in faces.iter().enumerate() {
            if f.len() != dims[x] as usize {
                return Err(OmegaError::Malformed(format!(
                    "element {} has {} face levels but dimension {}",
                    labels[x],
                    f.len(),
                    dims[x]
                )));
            }
            if f.iter().flatten().any(|&y| y as usize >= n) {
                return Err(OmegaError::Malformed(format!(
                    "face of {} out of range",
                    labels[x]
                )));
            }
        }
        if composites
            .iter()
            .any(|(&(x, y, _), &z)| x as usize >= n || y as usize >= n || z as usize >= n)
        {
            return Err(OmegaError::Malformed("composite out of range".into()));
        }
        let top = dims.iter().copied().max().unwrap_or(0);
        let mut by_minus = vec![FxHashMap::default(); top as usize];
        let mut by_plus = vec![FxHashMap::default(); top as usize];
        for x in 0..n as u32 {
            for p in 0..top {
                let m = face_of(&faces, &dims, x, Sign::Minus, p);
                let q = face_of(&faces, &dims, x, Sign::Plus, p);
                by_minus[p as usize]
                    .entry(m)
                    .or_insert_with(Vec::new)
                    .push(x);
                by_plus[p as usize]
                    .entry(q)
                    .or_insert_with(Vec::new)
                    .push(x);
            }
        }
        Ok(OmegaTable {
            labels,
            dims,
            faces,
            composites,
            top,
            by_minus,
            by_plus,
            ids: (0..n as u32).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn top(&self) -> u32 {
        self.top
    }

    pub fn dim(&self, x: u32) -> u32 {
        self.dims[x as usize]
    }

    pub fn label(&self, x: u32) -> &str {
        &self.labels[x as usize]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// `d^sign_p x`; equals `x` when `p >= dim x`.
    pub fn face(&self, x: u32, sign: Sign, p: u32) -> u32 {
        face_of(&self.faces, &self.dims, x, sign, p)
    }

    /// `x #_p y` when defined.
    pub fn compose(&self, x: u32, y: u32, p: u32) -> Option<u32> {
        if p >= self.top {
            (x == y).then_some(x)
        } else {
            self.composites.get(&(x, y, p)).copied()
        }
    }

    pub fn try_compose(&self, x: u32, y: u32, p: u32) -> Result<u32, OmegaError> {
        self.compose(x, y, p)
            .ok_or_else(|| OmegaError::NotComposable {
                left: self.label(x).to_string(),
                right: self.label(y).to_string(),
                p,
            })
    }

    /// Elements `y` with `d^-_p y = d^+_p x`.
    pub fn right_partners(&self, x: u32, p: u32) -> &[u32] {
        if p >= self.top {
            return &self.ids[x as usize..x as usize + 1];
        }
        let z = self.face(x, Sign::Plus, p);
        self.by_minus[p as usize]
            .get(&z)
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// Elements `w` with `d^+_p w = d^-_p x`.
    pub fn left_partners(&self, x: u32, p: u32) -> &[u32] {
        if p >= self.top {
            return &self.ids[x as usize..x as usize + 1];
        }
        let z = self.face(x, Sign::Minus, p);
        self.by_plus[p as usize]
            .get(&z)
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// Stored composites as sorted `(x, y, p, z)` quadruples.
    pub fn composite_list(&self) -> Vec<[u32; 4]> {
        let mut v: Vec<[u32; 4]> = self
            .composites
            .iter()
            .map(|(&(x, y, p), &z)| [x, y, p, z])
            .collect();
        v.sort_unstable();
        v
    }

    pub fn composite_count(&self) -> usize {
        self.composites.len()
    }

    pub fn face_row(&self, x: u32) -> &[[u32; 2]] {
        &self.faces[x as usize]
    }

    /// Copy with `d^-_p x` and `d^+_p x` exchanged, for negative controls.
    pub fn with_swapped_face(&self, x: u32, p: u32) -> OmegaTable {
        let mut faces = self.faces.clone();
        faces[x as usize][p as usize].swap(0, 1);
        OmegaTable::new(
            self.labels.clone(),
            self.dims.clone(),
            faces,
            self.composites.clone(),
        )
        .expect("same shape as a valid table")
    }

    /// Copy with one stored composite redirected, for negative controls.
    pub fn with_redirected_composite(&self, key: (u32, u32, u32), z: u32) -> OmegaTable {
        let mut composites = self.composites.clone();
        composites.insert(key, z);
        OmegaTable::new(
            self.labels.clone(),
            self.dims.clone(),
            self.faces.clone(),
            composites,
        )
        .expect("same shape as a valid table")
    }
}

fn face_of(faces: &[Vec<[u32; 2]>], dims: &[u32], x: u32, sign: Sign, p: u32) -> u32 {
    if p >= dims[x as usize] {
        x
    } else {
        faces[x as usize][p as usize][sign.index()]
    }
}

/// Exhaustive audit of the ω-category axioms on a finite table.
pub fn check_omega_axioms(t: &OmegaTable) -> Report {
    let mut report = Report::new("omega-category axioms");
    let n = t.len() as u32;
    let top = t.top();
    let l = |x: u32| t.label(x).to_string();

    let mut c1 = Check::new("omega.composable iff matching faces");
    for (&(x, y, p), _) in &t.composites {
        c1.expect(
            t.face(x, Sign::Plus, p) == t.face(y, Sign::Minus, p),
            || {
                (
                    vec![l(x), l(y)],
                    format!("composite stored at level {p} without matching faces"),
                )
            },
        );
    }
    for x in 0..n {
        for p in 0..top {
            for &y in t.right_partners(x, p) {
                c1.expect(t.compose(x, y, p).is_some(), || {
                    (
                        vec![l(x), l(y)],
                        format!("matching faces at level {p} but no composite"),
                    )
                });
            }
        }
    }
    report.push(c1);

    let mut c2 = Check::new("omega.faces of faces");
    for x in 0..n {
        for p in 0..=top {
            for a in Sign::BOTH {
                let f = t.face(x, a, p);
                for q in 0..=top {
                    for b in Sign::BOTH {
                        let lhs = t.face(f, b, q);
                        let rhs = if q < p { t.face(x, b, q) } else { f };
                        c2.expect(lhs == rhs, || {
                            (
                                vec![l(x)],
                                format!("d{b}_{q} d{a}_{p} gives {} expected {}", l(lhs), l(rhs)),
                            )
                        });
                    }
                }
            }
        }
    }
    report.push(c2);

    let mut c3 = Check::new("omega.faces of composites");
    for (&(x, y, p), &z) in &t.composites {
        c3.expect(
            t.face(z, Sign::Minus, p) == t.face(x, Sign::Minus, p),
            || (vec![l(x), l(y)], format!("d-_{p} of composite")),
        );
        c3.expect(t.face(z, Sign::Plus, p) == t.face(y, Sign::Plus, p), || {
            (vec![l(x), l(y)], format!("d+_{p} of composite"))
        });
        for q in (0..=top).filter(|&q| q != p) {
            for b in Sign::BOTH {
                let expect = t.compose(t.face(x, b, q), t.face(y, b, q), p);
                c3.expect(expect == Some(t.face(z, b, q)), || {
                    (
                        vec![l(x), l(y)],
                        format!("d{b}_{q} of #_{p} composite is {:?}", expect.map(l)),
                    )
                });
            }
        }
    }
    report.push(c3);

    let mut c4 = Check::new("omega.units");
    for x in 0..n {
        for p in 0..=top {
            let lu = t.compose(t.face(x, Sign::Minus, p), x, p);
            let ru = t.compose(x, t.face(x, Sign::Plus, p), p);
            c4.expect(lu == Some(x) && ru == Some(x), || {
                (vec![l(x)], format!("unit law at level {p}"))
            });
        }
    }
    report.push(c4);

    let mut c5 = Check::new("omega.associativity");
    for (&(x, y, p), &xy) in &t.composites {
        for &z in t.right_partners(y, p) {
            let lhs = t.compose(xy, z, p);
            let rhs = t.compose(y, z, p).and_then(|yz| t.compose(x, yz, p));
            c5.expect(lhs.is_some() && lhs == rhs, || {
                (
                    vec![l(x), l(y), l(z)],
                    format!("at level {p}: {:?} vs {:?}", lhs.map(l), rhs.map(l)),
                )
            });
        }
    }
    report.push(c5);

    let mut c6 = Check::new("omega.interchange");
    for x in 0..n {
        for p in 0..top {
            for q in 0..top {
                if p == q {
                    continue;
                }
                for &y in t.right_partners(x, q) {
                    let Some(xy) = t.compose(x, y, q) else {
                        continue;
                    };
                    for &x2 in t.right_partners(x, p) {
                        let Some(xx2) = t.compose(x, x2, p) else {
                            continue;
                        };
                        for &y2 in t.right_partners(x2, q) {
                            let Some(yy2) = t.compose(y, y2, p) else {
                                continue;
                            };
                            let Some(x2y2) = t.compose(x2, y2, q) else {
                                continue;
                            };
                            let lhs = t.compose(xy, x2y2, p);
                            let rhs = t.compose(xx2, yy2, q);
                            if let (Some(a), Some(b)) = (lhs, rhs) {
                                c6.expect(a == b, || {
                                    (
                                        vec![l(x), l(y), l(x2), l(y2)],
                                        format!("levels p={p} q={q}: {} vs {}", l(a), l(b)),
                                    )
                                });
                            }
                        }
                    }
                }
            }
        }
    }
    report.push(c6);

    let mut c7 = Check::new("omega.dimension");
    for x in 0..n {
        let d = t.dim(x);
        let least = (0..=top)
            .find(|&p| t.face(x, Sign::Minus, p) == x && t.face(x, Sign::Plus, p) == x)
            .unwrap_or(top);
        let below_differs = (0..d).all(|p| t.faces[x as usize][p as usize] != [x, x]);
        c7.expect(least == d && below_differs, || {
            (
                vec![l(x)],
                format!("stored dim {d}, least fixed level {least}"),
            )
        });
    }
    report.push(c7);
    report
}

/// How a member arises from the generators.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Witness {
    Atom(String),
    Compose { left: u32, right: u32, level: u32 },
}

#[derive(Clone, Debug)]
pub struct Member {
    pub set: CellSet,
    pub dim: u32,
    pub witness: Witness,
    pub alt_witness: Option<Witness>,
}

/// The materialized ω-category `M(K)`.
#[derive(Debug)]
pub struct MCategory {
    shape: PathProduct,
    members: Vec<Member>,
    index: FxHashMap<CellSet, u32>,
    cell_members: Vec<u32>,
    nodes: Vec<Node>,
    alt_nodes: Vec<Option<Node>>,
    table: OmegaTable,
}

/// A witness with atoms resolved to cell indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Node {
    Cell(usize),
    Compose(u32, u32, u32),
}

/// Straight-line evaluation of one member from cell values; the last step is the result.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Program {
    pub steps: Vec<Step>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Step {
    Cell(usize),
    Compose(usize, usize, u32),
}

impl Program {
    pub fn eval(
        &self,
        cell: impl Fn(usize) -> u32,
        mut compose: impl FnMut(u32, u32, u32) -> Option<u32>,
    ) -> Option<u32> {
        let mut vals: Vec<u32> = Vec::with_capacity(self.steps.len());
        for s in &self.steps {
            let v = match *s {
                Step::Cell(c) => cell(c),
                Step::Compose(a, b, p) => compose(vals[a], vals[b], p)?,
            };
            vals.push(v);
        }
        vals.last().copied()
    }

    /// Cells read by the program.
    pub fn cells(&self) -> impl Iterator<Item = usize> + '_ {
        self.steps.iter().filter_map(|s| match s {
            Step::Cell(c) => Some(*c),
            _ => None,
        })
    }
}

struct Proto {
    set: CellSet,
    faces: Vec<[CellSet; 2]>,
    witness: ProtoWitness,
    alt: Option<ProtoWitness>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum ProtoWitness {
    Atom(usize),
    Compose(usize, usize, u32),
}

pub fn build_m(shape: &PathProduct) -> Result<MCategory, OmegaError> {
    build_m_with_budget(shape, DEFAULT_MEMBER_BUDGET)
}

pub fn build_m_with_budget(shape: &PathProduct, budget: usize) -> Result<MCategory, OmegaError> {
    shape.check_size()?;
    let top = shape.arity();
    let mut protos: Vec<Proto> = Vec::new();
    let mut index: FxHashMap<CellSet, usize> = FxHashMap::default();
    let mut queue: VecDeque<usize> = VecDeque::new();

    for (ci, cell) in shape.cells().iter().enumerate() {
        let set = cell_closure(shape, cell);
        let faces = (0..top)
            .map(|p| {
                [
                    cell_face(shape, cell, Sign::Minus, p),
                    cell_face(shape, cell, Sign::Plus, p),
                ]
            })
            .collect();
        index.insert(set, protos.len());
        queue.push_back(protos.len());
        protos.push(Proto {
            set,
            faces,
            witness: ProtoWitness::Atom(ci),
            alt: None,
        });
    }

    // left_by[p][z]: entries with d+_p = z; right_by[p][z]: entries with d-_p = z
    let mut left_by: Vec<FxHashMap<CellSet, Vec<usize>>> = vec![FxHashMap::default(); top];
    let mut right_by: Vec<FxHashMap<CellSet, Vec<usize>>> = vec![FxHashMap::default(); top];

    while let Some(e) = queue.pop_front() {
        for p in 0..top {
            let plus = protos[e].faces[p][1];
            let minus = protos[e].faces[p][0];
            let rights = right_by[p].get(&plus).cloned().unwrap_or_default();
            for r in rights {
                add_composite(shape, &mut protos, &mut index, &mut queue, e, r, p, budget)?;
            }
            let lefts = left_by[p].get(&minus).cloned().unwrap_or_default();
            for lft in lefts {
                add_composite(
                    shape,
                    &mut protos,
                    &mut index,
                    &mut queue,
                    lft,
                    e,
                    p,
                    budget,
                )?;
            }
            left_by[p].entry(plus).or_default().push(e);
            right_by[p].entry(minus).or_default().push(e);
        }
    }

    for pr in &protos {
        for f in pr.faces.iter().flatten() {
            if !index.contains_key(f) {
                return Err(OmegaError::Inconsistent(format!(
                    "face {:?} of {:?} is not a member",
                    f, pr.set
                )));
            }
        }
    }

    let dims: Vec<u32> = protos
        .iter()
        .map(|pr| {
            (0..top)
                .find(|&p| pr.faces[p][0] == pr.set && pr.faces[p][1] == pr.set)
                .unwrap_or(top) as u32
        })
        .collect();

    let mut order: Vec<usize> = (0..protos.len()).collect();
    order.sort_by(|&a, &b| (dims[a], protos[a].set).cmp(&(dims[b], protos[b].set)));
    let mut rank = vec![0u32; protos.len()];
    for (new, &old) in order.iter().enumerate() {
        rank[old] = new as u32;
    }
    let conv = |w: ProtoWitness| match w {
        ProtoWitness::Atom(ci) => Witness::Atom(shape.cell(ci).to_string()),
        ProtoWitness::Compose(a, b, p) => Witness::Compose {
            left: rank[a],
            right: rank[b],
            level: p,
        },
    };
    let members: Vec<Member> = order
        .iter()
        .map(|&old| Member {
            set: protos[old].set,
            dim: dims[old],
            witness: conv(protos[old].witness),
            alt_witness: protos[old].alt.map(conv),
        })
        .collect();
    let new_index: FxHashMap<CellSet, u32> = members
        .iter()
        .enumerate()
        .map(|(i, m)| (m.set, i as u32))
        .collect();
    let faces: Vec<Vec<[u32; 2]>> = order
        .iter()
        .map(|&old| {
            (0..dims[old] as usize)
                .map(|p| {
                    [
                        new_index[&protos[old].faces[p][0]],
                        new_index[&protos[old].faces[p][1]],
                    ]
                })
                .collect()
        })
        .collect();
    assemble(shape.clone(), members, faces)
}

#[allow(clippy::too_many_arguments)]
fn add_composite(
    shape: &PathProduct,
    protos: &mut Vec<Proto>,
    index: &mut FxHashMap<CellSet, usize>,
    queue: &mut VecDeque<usize>,
    x: usize,
    y: usize,
    p: usize,
    budget: usize,
) -> Result<(), OmegaError> {
    let top = shape.arity();
    let set = protos[x].set.union(&protos[y].set);
    let faces: Vec<[CellSet; 2]> = (0..top)
        .map(|q| {
            if q == p {
                [protos[x].faces[p][0], protos[y].faces[p][1]]
            } else {
                [
                    protos[x].faces[q][0].union(&protos[y].faces[q][0]),
                    protos[x].faces[q][1].union(&protos[y].faces[q][1]),
                ]
            }
        })
        .collect();
    let w = ProtoWitness::Compose(x, y, p as u32);
    if let Some(&e) = index.get(&set) {
        if protos[e].faces != faces {
            return Err(OmegaError::Inconsistent(format!(
                "two decompositions of {:?} disagree on faces",
                set
            )));
        }
        if protos[e].alt.is_none() && protos[e].witness != w && e != x && e != y {
            protos[e].alt = Some(w);
        }
        return Ok(());
    }
    if protos.len() >= budget {
        return Err(OmegaError::Budget(budget));
    }
    index.insert(set, protos.len());
    queue.push_back(protos.len());
    protos.push(Proto {
        set,
        faces,
        witness: w,
        alt: None,
    });
    Ok(())
}

fn member_label(shape: &PathProduct, set: &CellSet) -> String {
    let cells: Vec<Cell> = set.iter().map(|i| shape.cell(i)).collect();
    let maximal: Vec<String> = cells
        .iter()
        .filter(|c| {
            !cells
                .iter()
                .any(|d| d != *c && cell_closure(shape, d).contains(shape.index_of(c)))
        })
        .map(|c| c.to_string())
        .collect();
    if maximal.len() == 1 {
        maximal[0].clone()
    } else {
        format!("{{{}}}", maximal.join(","))
    }
}

fn assemble(
    shape: PathProduct,
    members: Vec<Member>,
    faces: Vec<Vec<[u32; 2]>>,
) -> Result<MCategory, OmegaError> {
    let index: FxHashMap<CellSet, u32> = members
        .iter()
        .enumerate()
        .map(|(i, m)| (m.set, i as u32))
        .collect();
    if index.len() != members.len() {
        return Err(OmegaError::Malformed("duplicate member keys".into()));
    }
    let dims: Vec<u32> = members.iter().map(|m| m.dim).collect();
    let top = dims.iter().copied().max().unwrap_or(0);
    let labels: Vec<String> = members
        .iter()
        .map(|m| member_label(&shape, &m.set))
        .collect();
    let face_at = |x: usize, s: Sign, p: u32| -> u32 {
        if p >= dims[x] {
            x as u32
        } else {
            faces[x][p as usize][s.index()]
        }
    };
    let mut composites = FxHashMap::default();
    for p in 0..top {
        let mut by_minus: FxHashMap<u32, Vec<u32>> = FxHashMap::default();
        for y in 0..members.len() {
            by_minus
                .entry(face_at(y, Sign::Minus, p))
                .or_default()
                .push(y as u32);
        }
        for x in 0..members.len() {
            let z = face_at(x, Sign::Plus, p);
            for &y in by_minus.get(&z).map(Vec::as_slice).unwrap_or(&[]) {
                let u = members[x].set.union(&members[y as usize].set);
                let id = *index.get(&u).ok_or_else(|| {
                    OmegaError::Inconsistent(format!(
                        "composite of {} and {} at level {p} missing",
                        labels[x], labels[y as usize]
                    ))
                })?;
                composites.insert((x as u32, y, p), id);
            }
        }
    }
    let cell_members = shape
        .cells()
        .iter()
        .map(|c| {
            index
                .get(&cell_closure(&shape, c))
                .copied()
                .ok_or_else(|| OmegaError::Inconsistent(format!("cell {c} has no member")))
        })
        .collect::<Result<Vec<u32>, _>>()?;
    let node = |w: &Witness| -> Result<Node, OmegaError> {
        Ok(match w {
            Witness::Atom(c) => Node::Cell(shape.index_of(&shape.parse_cell(c)?)),
            Witness::Compose { left, right, level } => {
                if *left as usize >= members.len() || *right as usize >= members.len() {
                    return Err(OmegaError::Malformed("witness out of range".into()));
                }
                Node::Compose(*left, *right, *level)
            }
        })
    };
    let nodes = members
        .iter()
        .map(|m| node(&m.witness))
        .collect::<Result<Vec<_>, _>>()?;
    let alt_nodes = members
        .iter()
        .map(|m| m.alt_witness.as_ref().map(node).transpose())
        .collect::<Result<Vec<_>, _>>()?;
    let table = OmegaTable::new(labels, dims, faces, composites)?;
    Ok(MCategory {
        shape,
        members,
        index,
        cell_members,
        nodes,
        alt_nodes,
        table,
    })
}

impl MCategory {
    pub fn shape(&self) -> &PathProduct {
        &self.shape
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn table(&self) -> &OmegaTable {
        &self.table
    }

    pub fn member(&self, x: u32) -> &Member {
        &self.members[x as usize]
    }

    pub fn members(&self) -> &[Member] {
        &self.members
    }

    pub fn lookup(&self, set: &CellSet) -> Option<u32> {
        self.index.get(set).copied()
    }

    /// The member generated by the cell with the given index.
    pub fn cell_member(&self, cell_index: usize) -> u32 {
        self.cell_members[cell_index]
    }

    pub fn cell_member_of(&self, cell: &Cell) -> u32 {
        self.cell_members[self.shape.index_of(cell)]
    }

    /// The member generated by the top-dimensional cell of a cube.
    pub fn top_member(&self) -> u32 {
        let top = Cell(vec![1; self.shape.arity()]);
        self.cell_member_of(&top)
    }

    pub fn dim(&self, x: u32) -> u32 {
        self.table.dim(x)
    }

    pub fn face(&self, x: u32, sign: Sign, p: u32) -> u32 {
        self.table.face(x, sign, p)
    }

    pub fn label(&self, x: u32) -> &str {
        self.table.label(x)
    }

    pub fn compose(&self, x: u32, y: u32, p: u32) -> Result<u32, OmegaError> {
        self.table.try_compose(x, y, p)
    }

    pub fn node(&self, x: u32) -> Node {
        self.nodes[x as usize]
    }

    pub fn alt_node(&self, x: u32) -> Option<Node> {
        self.alt_nodes[x as usize]
    }

    /// A straight-line program computing `x` from cell values, using the
    /// alternative witness at the root when `alt` is set and one exists.
    pub fn program(&self, x: u32, alt: bool) -> Program {
        let mut steps = Vec::new();
        let mut memo: FxHashMap<u32, usize> = FxHashMap::default();
        let root = if alt {
            self.alt_nodes[x as usize].unwrap_or(self.nodes[x as usize])
        } else {
            self.nodes[x as usize]
        };
        self.emit(root, &mut steps, &mut memo);
        Program { steps }
    }

    fn emit(&self, node: Node, steps: &mut Vec<Step>, memo: &mut FxHashMap<u32, usize>) -> usize {
        match node {
            Node::Cell(c) => {
                steps.push(Step::Cell(c));
                steps.len() - 1
            }
            Node::Compose(a, b, p) => {
                let ia = self.emit_member(a, steps, memo);
                let ib = self.emit_member(b, steps, memo);
                steps.push(Step::Compose(ia, ib, p));
                steps.len() - 1
            }
        }
    }

    fn emit_member(
        &self,
        x: u32,
        steps: &mut Vec<Step>,
        memo: &mut FxHashMap<u32, usize>,
    ) -> usize {
        if let Some(&i) = memo.get(&x) {
            return i;
        }
        let i = self.emit(self.nodes[x as usize], steps, memo);
        memo.insert(x, i);
        i
    }

    /// Values on every member of a map given on cells, extended along witnesses.
    pub fn extend<E>(
        &self,
        cell: impl Fn(usize) -> Result<u32, E>,
        mut compose: impl FnMut(u32, u32, u32) -> Result<u32, E>,
    ) -> Result<Vec<u32>, E> {
        let n = self.members.len();
        let mut vals: Vec<Option<u32>> = vec![None; n];
        // witnesses form a DAG; resolve with an explicit stack
        for start in 0..n as u32 {
            let mut stack = vec![start];
            while let Some(&x) = stack.last() {
                if vals[x as usize].is_some() {
                    stack.pop();
                    continue;
                }
                match self.nodes[x as usize] {
                    Node::Cell(c) => {
                        vals[x as usize] = Some(cell(c)?);
                        stack.pop();
                    }
                    Node::Compose(a, b, p) => match (vals[a as usize], vals[b as usize]) {
                        (Some(va), Some(vb)) => {
                            vals[x as usize] = Some(compose(va, vb, p)?);
                            stack.pop();
                        }
                        (va, vb) => {
                            if va.is_none() {
                                stack.push(a);
                            }
                            if vb.is_none() {
                                stack.push(b);
                            }
                        }
                    },
                }
            }
        }
        Ok(vals
            .into_iter()
            .map(|v| v.expect("every member evaluated"))
            .collect())
    }

    pub fn cells_of(&self, x: u32) -> Vec<Cell> {
        self.members[x as usize]
            .set
            .iter()
            .map(|i| self.shape.cell(i))
            .collect()
    }

    /// Structural checks specific to subsets: composition is union,
    /// witnesses reproduce their sets, faces of cells match the cell complex.
    pub fn check_sets(&self) -> Report {
        let mut report = Report::new(format!("M({}) set structure", self.shape));
        let l = |x: u32| self.label(x).to_string();
        let mut c = Check::new("omega.composition is union");
        for [x, y, p, z] in self.table.composite_list() {
            let u = self.members[x as usize]
                .set
                .union(&self.members[y as usize].set);
            c.expect(u == self.members[z as usize].set, || {
                (vec![l(x), l(y)], format!("level {p}"))
            });
        }
        report.push(c);
        let mut c = Check::new("omega.witness sets");
        for (i, m) in self.members.iter().enumerate() {
            let ok = match &m.witness {
                Witness::Atom(s) => match self.shape.parse_cell(s) {
                    Ok(cell) => cell_closure(&self.shape, &cell) == m.set,
                    Err(_) => false,
                },
                Witness::Compose { left, right, level } => {
                    self.table.compose(*left, *right, *level) == Some(i as u32)
                }
            };
            c.expect(ok && is_closed(&self.shape, &m.set), || {
                (
                    vec![l(i as u32)],
                    "witness does not reproduce the member".into(),
                )
            });
        }
        report.push(c);
        let mut c = Check::new("omega.cell faces match the cell complex");
        for (ci, cell) in self.shape.cells().iter().enumerate() {
            let x = self.cell_members[ci];
            for p in 0..self.shape.arity() {
                for s in Sign::BOTH {
                    let expect = cell_face(&self.shape, cell, s, p);
                    let got = self.members[self.face(x, s, p as u32) as usize].set;
                    c.expect(expect == got, || {
                        (vec![cell.to_string()], format!("d{s}_{p}"))
                    });
                }
            }
        }
        report.push(c);
        report
    }

    pub fn to_document(&self) -> MDocument {
        MDocument {
            shape: self.shape.clone(),
            members: self
                .members
                .iter()
                .enumerate()
                .map(|(i, m)| MemberDoc {
                    key: m
                        .set
                        .iter()
                        .map(|c| self.shape.cell(c).to_string())
                        .collect(),
                    dim: m.dim,
                    faces: self.table.face_row(i as u32).to_vec(),
                    witness: m.witness.clone(),
                    alt: m.alt_witness.clone(),
                })
                .collect(),
            compositions: self.table.composite_list(),
        }
    }

    /// Loads a document without recomputing anything; run the checkers to validate it.
    pub fn from_document(doc: &MDocument) -> Result<MCategory, OmegaError> {
        let shape = doc.shape.clone();
        shape.check_size()?;
        let mut members = Vec::with_capacity(doc.members.len());
        let mut faces = Vec::with_capacity(doc.members.len());
        for m in &doc.members {
            let mut set = CellSet::empty();
            for c in &m.key {
                set.insert(shape.index_of(&shape.parse_cell(c)?));
            }
            members.push(Member {
                set,
                dim: m.dim,
                witness: m.witness.clone(),
                alt_witness: m.alt.clone(),
            });
            faces.push(m.faces.clone());
        }
        let mut cat = assemble(shape, members, faces)?;
        let mut composites = FxHashMap::default();
        for &[x, y, p, z] in &doc.compositions {
            composites.insert((x, y, p), z);
        }
        let t = &cat.table;
        cat.table = OmegaTable::new(
            t.labels.clone(),
            t.dims.clone(),
            t.faces.clone(),
            composites,
        )?;
        Ok(cat)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("document serializes")
    }

    pub fn from_json(s: &str) -> Result<MCategory, OmegaError> {
        let doc: MDocument =
            serde_json::from_str(s).map_err(|e| OmegaError::Malformed(e.to_string()))?;
        MCategory::from_document(&doc)
    }

    /// Graphviz rendering of the face structure.
    pub fn to_dot(&self) -> String {
        let mut out = format!("digraph \"M({})\" {{\n  rankdir=BT;\n", self.shape);
        for x in 0..self.len() as u32 {
            out.push_str(&format!(
                "  m{x} [label=\"{}\\ndim {}\"];\n",
                self.label(x),
                self.dim(x)
            ));
        }
        for x in 0..self.len() as u32 {
            let d = self.dim(x);
            if d == 0 {
                continue;
            }
            for s in Sign::BOTH {
                let f = self.face(x, s, d - 1);
                out.push_str(&format!("  m{f} -> m{x} [label=\"d{s}\"];\n"));
            }
        }
        out.push_str("}\n");
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MemberDoc {
    pub key: Vec<String>,
    pub dim: u32,
    pub faces: Vec<[u32; 2]>,
    pub witness: Witness,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alt: Option<Witness>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MDocument {
    pub shape: PathProduct,
    pub members: Vec<MemberDoc>,
    /// `[x, y, p, x #_p y]`, sorted.
    pub compositions: Vec<[u32; 4]>,
}

/// The member `x × y` of `M(K×L)`, with its faces checked against the union of products of faces.
pub fn product_member(
    k: &MCategory,
    x: u32,
    l: &MCategory,
    y: u32,
    target: &MCategory,
) -> Result<u32, OmegaError> {
    let set = product_set(k, &k.members[x as usize].set, l, &l.members[y as usize].set);
    let z = target.lookup(&set).ok_or_else(|| {
        OmegaError::Inconsistent(format!(
            "product of {} and {} is not a member",
            k.label(x),
            l.label(y)
        ))
    })?;
    let top = target.table.top();
    for p in 0..top {
        for a in Sign::BOTH {
            let mut expect = CellSet::empty();
            for i in 0..=p {
                let fx = &k.members[k.face(x, a, i) as usize].set;
                let fy = &l.members[l.face(y, a.alternate(i as usize), p - i) as usize].set;
                expect = expect.union(&product_set(k, fx, l, fy));
            }
            if target.members[target.face(z, a, p) as usize].set != expect {
                return Err(OmegaError::Inconsistent(format!(
                    "face d{a}_{p} of {} x {} disagrees with the union of products of faces",
                    k.label(x),
                    l.label(y)
                )));
            }
        }
    }
    Ok(z)
}

pub fn product_set(k: &MCategory, a: &CellSet, l: &MCategory, b: &CellSet) -> CellSet {
    let nl = l.shape.cell_count();
    let _ = k;
    let mut out = CellSet::empty();
    for i in a.iter() {
        for j in b.iter() {
            out.insert(i * nl + j);
        }
    }
    out
}

static CACHE: OnceLock<Mutex<FxHashMap<PathProduct, Arc<MCategory>>>> = OnceLock::new();

/// Shared, memoized `M(K)`.
pub fn m_of(shape: &PathProduct) -> Result<Arc<MCategory>, OmegaError> {
    let cache = CACHE.get_or_init(|| Mutex::new(FxHashMap::default()));
    if let Some(m) = cache.lock().expect("cache lock").get(shape) {
        return Ok(m.clone());
    }
    let built = Arc::new(build_m(shape)?);
    let mut guard = cache.lock().expect("cache lock");
    Ok(guard.entry(shape.clone()).or_insert(built).clone())
}

/// `M(I^n)`.
pub fn m_cube(n: usize) -> Arc<MCategory> {
    m_of(&PathProduct::cube(n)).expect("cubes of small dimension build")
}

/// Member identified by a list of cell literals whose closure is the member.
pub fn member_by_cells(m: &MCategory, cells: &[&str]) -> Result<u32, OmegaError> {
    let mut set = CellSet::empty();
    for c in cells {
        let cell = m.shape.parse_cell(c)?;
        set = set.union(&cell_closure(&m.shape, &cell));
    }
    m.lookup(&set).ok_or(OmegaError::UnknownSet)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shape(s: &str) -> PathProduct {
        s.parse().unwrap()
    }

    #[test]
    fn small_counts() {
        assert_eq!(build_m(&shape("")).unwrap().len(), 1);
        assert_eq!(build_m(&shape("1")).unwrap().len(), 3);
        assert_eq!(build_m(&shape("2")).unwrap().len(), 6);
        assert_eq!(build_m(&shape("1x1")).unwrap().len(), 11);
    }

    #[test]
    fn composites_of_examples() {
        let m = build_m(&shape("2")).unwrap();
        let a = member_by_cells(&m, &["(1)"]).unwrap();
        let b = member_by_cells(&m, &["(3)"]).unwrap();
        let ab = m.compose(a, b, 0).unwrap();
        assert_eq!(ab, member_by_cells(&m, &["(1)", "(3)"]).unwrap());
        assert!(m.compose(b, a, 0).is_err());

        let sq = build_m(&shape("1x1")).unwrap();
        let left = member_by_cells(&sq, &["(0,1)"]).unwrap();
        let upper = member_by_cells(&sq, &["(1,2)"]).unwrap();
        let c = sq.compose(left, upper, 0).unwrap();
        assert_eq!(c, sq.face(sq.top_member(), Sign::Minus, 1));
        for x in 0..sq.len() as u32 {
            for p in 0..3 {
                assert_eq!(sq.compose(x, sq.face(x, Sign::Plus, p), p).unwrap(), x);
            }
        }
    }

    #[test]
    fn axioms_hold_on_small_shapes() {
        for s in ["", "1", "2", "1x1", "2x1", "1x2", "1x1x1", "3"] {
            let m = build_m(&shape(s)).unwrap();
            let r = check_omega_axioms(m.table());
            assert!(r.passed(), "{s}: {r}");
            let r = m.check_sets();
            assert!(r.passed(), "{s}: {r}");
        }
    }

    #[test]
    fn corrupted_face_is_detected() {
        let m = build_m(&shape("1x1")).unwrap();
        let bad = m.table().with_swapped_face(m.top_member(), 0);
        let r = check_omega_axioms(&bad);
        assert!(r.check("omega.faces of faces").unwrap().violation_count > 0);
    }

    #[test]
    fn document_round_trip() {
        let m = build_m(&shape("2x1")).unwrap();
        let json = m.to_json();
        let back = MCategory::from_json(&json).unwrap();
        assert_eq!(back.to_json(), json);
        assert!(check_omega_axioms(back.table()).passed());
    }

    #[test]
    fn product_of_interval_and_segment() {
        let k = build_m(&shape("2")).unwrap();
        let l = build_m(&shape("1")).unwrap();
        let kl = build_m(&shape("2x1")).unwrap();
        let seg = member_by_cells(&k, &["(1)", "(3)"]).unwrap();
        let z = product_member(&k, seg, &l, l.top_member(), &kl).unwrap();
        assert_eq!(kl.dim(z), 2);
    }

    #[test]
    fn budget_is_enforced() {
        assert_eq!(
            build_m_with_budget(&shape("1x1"), 5).unwrap_err(),
            OmegaError::Budget(5)
        );
    }
}
