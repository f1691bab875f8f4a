//! Morphisms between pasting ω-categories.
//!
//! A morphism is stored by its values on cells. [`MMorphism::total`] extends
//! it to all members along witnesses.

use std::sync::{Arc, OnceLock};

use thiserror::Error;

use crate::omega_pasting::{m_cube, m_of, product_member, MCategory, OmegaError};
use crate::path_complex::{cell_closure, Cell, CellSet, PathProduct, Sign};
use crate::report::{Check, Report};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MorphismError {
    #[error(transparent)]
    Omega(#[from] OmegaError),
    #[error("index {index} out of range for dimension {n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("cell map has {got} entries, source has {expected} cells")]
    WrongLength { got: usize, expected: usize },
    #[error("not a morphism: {0}")]
    NotAMorphism(String),
    #[error("morphisms do not compose")]
    Mismatch,
    #[error("folding check failed: {0}")]
    Fold(String),
}

pub struct MMorphism {
    source: Arc<MCategory>,
    target: Arc<MCategory>,
    cell_map: Vec<u32>,
    total: OnceLock<Result<Vec<u32>, MorphismError>>,
}

impl std::fmt::Debug for MMorphism {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MMorphism")
            .field("source", &self.source.shape().to_string())
            .field("target", &self.target.shape().to_string())
            .field("cell_map", &self.cell_map)
            .finish()
    }
}

impl Clone for MMorphism {
    fn clone(&self) -> Self {
        MMorphism::from_cells(
            self.source.clone(),
            self.target.clone(),
            self.cell_map.clone(),
        )
    }
}

impl PartialEq for MMorphism {
    fn eq(&self, other: &Self) -> bool {
        self.source.shape() == other.source.shape()
            && self.target.shape() == other.target.shape()
            && self.cell_map == other.cell_map
    }
}

impl MMorphism {
    fn from_cells(source: Arc<MCategory>, target: Arc<MCategory>, cell_map: Vec<u32>) -> Self {
        MMorphism {
            source,
            target,
            cell_map,
            total: OnceLock::new(),
        }
    }

    /// A morphism given on cells; fails unless it preserves all faces and composites.
    pub fn new(
        source: Arc<MCategory>,
        target: Arc<MCategory>,
        cell_map: Vec<u32>,
    ) -> Result<Self, MorphismError> {
        let expected = source.shape().cell_count();
        if cell_map.len() != expected {
            return Err(MorphismError::WrongLength {
                got: cell_map.len(),
                expected,
            });
        }
        let f = MMorphism::from_cells(source, target, cell_map);
        let report = f.check();
        if !report.passed() {
            let first = report.failures().next().expect("a failing check");
            let detail = first
                .violations
                .first()
                .map(|v| format!("{} at {}", v.detail, v.witness.join(",")))
                .unwrap_or_default();
            return Err(MorphismError::NotAMorphism(format!(
                "{}: {detail}",
                first.id
            )));
        }
        Ok(f)
    }

    pub fn identity(m: Arc<MCategory>) -> Self {
        let map = (0..m.shape().cell_count())
            .map(|c| m.cell_member(c))
            .collect();
        MMorphism::from_cells(m.clone(), m, map)
    }

    pub fn source(&self) -> &Arc<MCategory> {
        &self.source
    }

    pub fn target(&self) -> &Arc<MCategory> {
        &self.target
    }

    pub fn cell_map(&self) -> &[u32] {
        &self.cell_map
    }

    /// Values on all source members, memoized.
    pub fn total(&self) -> Result<&[u32], MorphismError> {
        self.total
            .get_or_init(|| {
                let t = self.target.table();
                self.source.extend(
                    |c| Ok(self.cell_map[c]),
                    |a, b, p| {
                        t.compose(a, b, p).ok_or_else(|| {
                            MorphismError::NotAMorphism(format!(
                                "images {} and {} not composable at level {p}",
                                t.label(a),
                                t.label(b)
                            ))
                        })
                    },
                )
            })
            .as_ref()
            .map(Vec::as_slice)
            .map_err(Clone::clone)
    }

    pub fn apply(&self, x: u32) -> Result<u32, MorphismError> {
        Ok(self.total()?[x as usize])
    }

    /// `self` after `first`.
    pub fn after(&self, first: &MMorphism) -> Result<MMorphism, MorphismError> {
        if first.target.shape() != self.source.shape() {
            return Err(MorphismError::Mismatch);
        }
        let total = self.total()?;
        let map = first.cell_map.iter().map(|&y| total[y as usize]).collect();
        Ok(MMorphism::from_cells(
            first.source.clone(),
            self.target.clone(),
            map,
        ))
    }

    /// Exhaustive check that faces, composites and alternative witnesses are respected.
    pub fn check(&self) -> Report {
        let mut report = Report::new(format!(
            "morphism M({}) -> M({})",
            self.source.shape(),
            self.target.shape()
        ));
        let mut c = Check::new("morphism.total");
        let total = match self.total() {
            Ok(t) => t.to_vec(),
            Err(e) => {
                c.fail(vec![], e.to_string());
                report.push(c);
                return report;
            }
        };
        c.pass();
        report.push(c);
        let s = self.source.table();
        let t = self.target.table();
        let l = |x: u32| s.label(x).to_string();
        let mut c = Check::new("morphism.faces");
        for x in 0..s.len() as u32 {
            for p in 0..=s.top().max(t.top()) {
                for a in Sign::BOTH {
                    let lhs = total[s.face(x, a, p) as usize];
                    let rhs = t.face(total[x as usize], a, p);
                    c.expect(lhs == rhs, || (vec![l(x)], format!("d{a}_{p}")));
                }
            }
        }
        report.push(c);
        let mut c = Check::new("morphism.composites");
        for [x, y, p, z] in s.composite_list() {
            let img = t.compose(total[x as usize], total[y as usize], p);
            c.expect(img == Some(total[z as usize]), || {
                (vec![l(x), l(y)], format!("level {p}"))
            });
        }
        report.push(c);
        let mut c = Check::new("morphism.alternative witnesses");
        for x in 0..s.len() as u32 {
            if self.source.alt_node(x).is_some() {
                let prog = self.source.program(x, true);
                let v = prog.eval(|cell| self.cell_map[cell], |a, b, p| t.compose(a, b, p));
                c.expect(v == Some(total[x as usize]), || {
                    (vec![l(x)], "alternative witness disagrees".into())
                });
            }
        }
        report.push(c);
        report
    }

    /// Members in the image.
    pub fn image(&self) -> Result<Vec<u32>, MorphismError> {
        let mut v = self.total()?.to_vec();
        v.sort_unstable();
        v.dedup();
        Ok(v)
    }
}

/// Image of a cell under `∂̌^a_i`: insert a vertex coordinate at position `i` (1-based).
pub fn face_cell(i: usize, a: Sign, cell: &[u32]) -> Vec<u32> {
    let mut v = cell.to_vec();
    v.insert(i - 1, if a == Sign::Minus { 0 } else { 2 });
    v
}

/// Image of a cell under `ε̌_i`: delete coordinate `i`.
pub fn degen_cell(i: usize, cell: &[u32]) -> Vec<u32> {
    let mut v = cell.to_vec();
    v.remove(i - 1);
    v
}

/// Image of a cell under `Γ̌^a_i`: merge coordinates `i, i+1` by min (`+`) or max (`-`).
pub fn conn_cell(i: usize, a: Sign, cell: &[u32]) -> Vec<u32> {
    let mut v = cell.to_vec();
    let (x, y) = (v[i - 1], v[i]);
    v[i - 1] = if a == Sign::Plus { x.min(y) } else { x.max(y) };
    v.remove(i);
    v
}

/// Image of a cell under `ι̌^a_i` into the doubled shape.
pub fn iota_cell(i: usize, a: Sign, cell: &[u32]) -> Vec<u32> {
    let mut v = cell.to_vec();
    if a == Sign::Plus {
        v[i - 1] += 2;
    }
    v
}

/// Underlying set of `μ̌_i(σ)` in the doubled shape.
pub fn mu_set(double: &PathProduct, i: usize, cell: &[u32]) -> CellSet {
    let mut v = cell.to_vec();
    match cell[i - 1] {
        0 => cell_closure(double, &Cell(v)),
        2 => {
            v[i - 1] = 4;
            cell_closure(double, &Cell(v))
        }
        _ => {
            v[i - 1] = 1;
            let a = cell_closure(double, &Cell(v.clone()));
            v[i - 1] = 3;
            a.union(&cell_closure(double, &Cell(v)))
        }
    }
}

/// `I^{i-1} x [0,2] x I^{n-i}`.
pub fn doubled_cube(i: usize, n: usize) -> PathProduct {
    PathProduct::cube(n)
        .with_factor(i - 1, 2)
        .expect("length 2 is valid")
}

fn cell_morphism(
    source: Arc<MCategory>,
    target: Arc<MCategory>,
    f: impl Fn(&[u32]) -> CellSet,
) -> Result<MMorphism, MorphismError> {
    let map = source
        .shape()
        .cells()
        .iter()
        .map(|c| {
            target
                .lookup(&f(c.components()))
                .ok_or(MorphismError::Omega(OmegaError::UnknownSet))
        })
        .collect::<Result<Vec<_>, _>>()?;
    MMorphism::new(source, target, map)
}

fn closure_of(shape: &PathProduct, comps: Vec<u32>) -> CellSet {
    cell_closure(shape, &Cell(comps))
}

/// `∂̌^a: M(I^0) -> M(I)`.
pub fn base_face(a: Sign) -> Result<MMorphism, MorphismError> {
    let k = PathProduct::cube(1);
    cell_morphism(m_cube(0), m_cube(1), |c| closure_of(&k, face_cell(1, a, c)))
}

/// `ε̌: M(I) -> M(I^0)`.
pub fn base_degen() -> Result<MMorphism, MorphismError> {
    let k = PathProduct::cube(0);
    cell_morphism(m_cube(1), m_cube(0), |c| closure_of(&k, degen_cell(1, c)))
}

/// `Γ̌^a: M(I^2) -> M(I)`.
pub fn base_conn(a: Sign) -> Result<MMorphism, MorphismError> {
    let k = PathProduct::cube(1);
    cell_morphism(m_cube(2), m_cube(1), |c| closure_of(&k, conn_cell(1, a, c)))
}

/// `ι̌^a: M(I) -> M([0,2])`.
pub fn base_iota(a: Sign) -> Result<MMorphism, MorphismError> {
    let d = doubled_cube(1, 1);
    cell_morphism(m_cube(1), m_of(&d)?, |c| closure_of(&d, iota_cell(1, a, c)))
}

/// `μ̌: M(I) -> M([0,2])`.
pub fn base_mu() -> Result<MMorphism, MorphismError> {
    let d = doubled_cube(1, 1);
    cell_morphism(m_cube(1), m_of(&d)?, |c| mu_set(&d, 1, c))
}

/// `f ⊗ g`, acting on product cells by `σ × τ ↦ f(σ) × g(τ)`.
pub fn tensor_morphism(f: &MMorphism, g: &MMorphism) -> Result<MMorphism, MorphismError> {
    let source = m_of(&f.source.shape().product(g.source.shape()))?;
    let target = m_of(&f.target.shape().product(g.target.shape()))?;
    let ng = g.source.shape().cell_count();
    let map = (0..source.shape().cell_count())
        .map(|c| {
            product_member(
                &f.target,
                f.cell_map[c / ng],
                &g.target,
                g.cell_map[c % ng],
                &target,
            )
        })
        .collect::<Result<Vec<_>, _>>()?;
    MMorphism::new(source, target, map)
}

fn sandwich(i: usize, n: usize, base: MMorphism, width: usize) -> Result<MMorphism, MorphismError> {
    let left = MMorphism::identity(m_cube(i - 1));
    let right = MMorphism::identity(m_cube(n - (i - 1) - width));
    tensor_morphism(&tensor_morphism(&left, &base)?, &right)
}

fn check_index(i: usize, lo: usize, hi: usize, n: usize) -> Result<(), MorphismError> {
    if i < lo || i > hi {
        Err(MorphismError::IndexOutOfRange { index: i, n })
    } else {
        Ok(())
    }
}

/// `∂̌^a_i: M(I^{n-1}) -> M(I^n)`, `1 <= i <= n`.
pub fn std_face(i: usize, a: Sign, n: usize) -> Result<MMorphism, MorphismError> {
    check_index(i, 1, n, n)?;
    sandwich(i, n - 1, base_face(a)?, 0)
}

/// `ε̌_i: M(I^n) -> M(I^{n-1})`, `1 <= i <= n`.
pub fn std_degen(i: usize, n: usize) -> Result<MMorphism, MorphismError> {
    check_index(i, 1, n, n)?;
    sandwich(i, n, base_degen()?, 1)
}

/// `Γ̌^a_i: M(I^n) -> M(I^{n-1})`, `1 <= i <= n-1`.
pub fn std_conn(i: usize, a: Sign, n: usize) -> Result<MMorphism, MorphismError> {
    check_index(i, 1, n.saturating_sub(1), n)?;
    sandwich(i, n, base_conn(a)?, 2)
}

/// `ι̌^a_i: M(I^n) -> M(I^{i-1} x [0,2] x I^{n-i})`.
pub fn std_iota(i: usize, a: Sign, n: usize) -> Result<MMorphism, MorphismError> {
    check_index(i, 1, n, n)?;
    sandwich(i, n, base_iota(a)?, 1)
}

/// `μ̌_i: M(I^n) -> M(I^{i-1} x [0,2] x I^{n-i})`.
pub fn std_mu(i: usize, n: usize) -> Result<MMorphism, MorphismError> {
    check_index(i, 1, n, n)?;
    sandwich(i, n, base_mu()?, 1)
}

/// The globe `F_n`: `I^n` and its faces `d^a_p I^n`, `p < n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Globe {
    pub n: usize,
    pub elements: Vec<u32>,
}

pub fn globe(n: usize) -> Globe {
    let m = m_cube(n);
    let top = m.top_member();
    let mut elements = vec![top];
    for p in 0..n as u32 {
        for a in Sign::BOTH {
            elements.push(m.face(top, a, p));
        }
    }
    elements.sort_unstable();
    elements.dedup();
    Globe { n, elements }
}

/// `Φ̌_n` from the closed formula: `I^n ↦ I^n` and `σ × d^a_0 I × I^p ↦ d^a_p I^n`.
pub fn phi_closed_form(n: usize) -> Result<MMorphism, MorphismError> {
    let m = m_cube(n);
    let top = m.top_member();
    let map = m
        .shape()
        .cells()
        .iter()
        .map(|c| {
            let comps = c.components();
            match comps.iter().rposition(|&v| v % 2 == 0) {
                None => top,
                Some(k) => {
                    let a = if comps[k] == 0 {
                        Sign::Minus
                    } else {
                        Sign::Plus
                    };
                    m.face(top, a, (n - 1 - k) as u32)
                }
            }
        })
        .collect();
    MMorphism::new(m.clone(), m, map)
}

/// `ψ̌_i = id^{i-1} ⊗ ψ̌ ⊗ id^{n-i-1}` on `M(I^n)`, from the two-dimensional `ψ̌`.
pub fn psi_check_i(psi: &MMorphism, i: usize, n: usize) -> Result<MMorphism, MorphismError> {
    check_index(i, 1, n.saturating_sub(1), n)?;
    sandwich(i, n, psi.clone(), 2)
}

/// `Φ̌_n = Ψ̌_n ... Ψ̌_1` with `Ψ̌_r = ψ̌_1 ... ψ̌_{r-1}`, all as composites of functions.
pub fn phi_from_psi(psi: &MMorphism, n: usize) -> Result<MMorphism, MorphismError> {
    let mut acc = MMorphism::identity(m_cube(n));
    for r in 1..=n {
        for i in (1..r).rev() {
            acc = psi_check_i(psi, i, n)?.after(&acc)?;
        }
    }
    Ok(acc)
}

#[derive(Debug)]
pub struct PhiCheck {
    pub phi: MMorphism,
    pub globe: Globe,
}

/// Computes `Φ̌_n` by the closed formula and by the `ψ̌` chain, and checks
/// that they agree, that the result is idempotent, and that its image is `F_n`.
pub fn phi_check(n: usize, psi: &MMorphism) -> Result<PhiCheck, MorphismError> {
    let closed = phi_closed_form(n)?;
    let chain = phi_from_psi(psi, n)?;
    if closed.cell_map() != chain.cell_map() {
        return Err(MorphismError::Fold(format!(
            "closed formula and ψ̌ chain differ for n = {n}"
        )));
    }
    let twice = closed.after(&closed)?;
    if twice.cell_map() != closed.cell_map() {
        return Err(MorphismError::Fold("not idempotent".into()));
    }
    let g = globe(n);
    if closed.image()? != g.elements || g.elements.len() != 2 * n + 1 {
        return Err(MorphismError::Fold(format!(
            "image differs from the {n}-globe"
        )));
    }
    Ok(PhiCheck {
        phi: closed,
        globe: g,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::omega_pasting::member_by_cells;

    #[test]
    fn base_cases() {
        let e = base_degen().unwrap();
        assert_eq!(e.apply(m_cube(1).top_member()).unwrap(), 0);
        let mu = base_mu().unwrap();
        let d = mu.target().clone();
        assert_eq!(
            mu.apply(m_cube(1).top_member()).unwrap(),
            member_by_cells(&d, &["(1)", "(3)"]).unwrap()
        );
        for a in Sign::BOTH {
            let g = base_conn(a).unwrap();
            let sq = m_cube(2);
            let i = m_cube(1);
            assert_eq!(g.apply(sq.top_member()).unwrap(), i.top_member());
            let v = if a == Sign::Plus { "(0,0)" } else { "(2,2)" };
            let expect = if a == Sign::Plus { "(0)" } else { "(2)" };
            assert_eq!(
                g.apply(member_by_cells(&sq, &[v]).unwrap()).unwrap(),
                member_by_cells(&i, &[expect]).unwrap()
            );
        }
    }

    #[test]
    fn tensor_matches_cell_formulas() {
        for n in 1..=3 {
            for i in 1..=n {
                for a in Sign::BOTH {
                    let f = std_face(i, a, n).unwrap();
                    let t = f.target().clone();
                    for (c, cell) in f.source().shape().cells().iter().enumerate() {
                        assert_eq!(
                            f.cell_map()[c],
                            t.cell_member_of(&Cell(face_cell(i, a, cell.components())))
                        );
                    }
                    let io = std_iota(i, a, n).unwrap();
                    let t = io.target().clone();
                    for (c, cell) in io.source().shape().cells().iter().enumerate() {
                        assert_eq!(
                            io.cell_map()[c],
                            t.cell_member_of(&Cell(iota_cell(i, a, cell.components())))
                        );
                    }
                }
                let mu = std_mu(i, n).unwrap();
                let d = doubled_cube(i, n);
                for (c, cell) in mu.source().shape().cells().iter().enumerate() {
                    assert_eq!(
                        Some(mu.cell_map()[c]),
                        mu.target().lookup(&mu_set(&d, i, cell.components()))
                    );
                }
            }
            for i in 1..n {
                for a in Sign::BOTH {
                    let g = std_conn(i, a, n).unwrap();
                    let t = g.target().clone();
                    for (c, cell) in g.source().shape().cells().iter().enumerate() {
                        assert_eq!(
                            g.cell_map()[c],
                            t.cell_member_of(&Cell(conn_cell(i, a, cell.components())))
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn degeneracy_retracts_face() {
        for n in 1..=3 {
            for i in 1..=n {
                for a in Sign::BOTH {
                    let id = std_degen(i, n)
                        .unwrap()
                        .after(&std_face(i, a, n).unwrap())
                        .unwrap();
                    assert_eq!(id, MMorphism::identity(m_cube(n - 1)));
                }
            }
        }
    }

    #[test]
    fn tensor_identities_and_interchange() {
        let id1 = MMorphism::identity(m_cube(1));
        assert_eq!(
            tensor_morphism(&id1, &id1).unwrap(),
            MMorphism::identity(m_cube(2))
        );
        let f = base_face(Sign::Minus).unwrap();
        let e = base_degen().unwrap();
        let lhs = tensor_morphism(&e, &id1)
            .unwrap()
            .after(&tensor_morphism(&f, &id1).unwrap())
            .unwrap();
        let rhs = tensor_morphism(&e.after(&f).unwrap(), &id1.after(&id1).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
        assert_eq!(
            tensor_morphism(&f, &id1).unwrap(),
            std_face(1, Sign::Minus, 2).unwrap()
        );
    }

    #[test]
    fn closed_form_examples() {
        let phi = phi_closed_form(2).unwrap();
        let m = m_cube(2);
        let top = m.top_member();
        assert_eq!(phi.apply(top).unwrap(), top);
        assert_eq!(
            phi.apply(member_by_cells(&m, &["(0,1)"]).unwrap()).unwrap(),
            m.face(top, Sign::Minus, 1)
        );
        assert_eq!(
            phi.apply(member_by_cells(&m, &["(1,0)"]).unwrap()).unwrap(),
            member_by_cells(&m, &["(0,0)"]).unwrap()
        );
        assert_eq!(globe(3).elements.len(), 7);
        assert_eq!(
            phi_closed_form(3).unwrap().image().unwrap(),
            globe(3).elements
        );
    }

    #[test]
    fn rejects_non_morphisms() {
        let m = m_cube(1);
        // send the edge to itself but swap its endpoints
        let map = vec![m.cell_member(2), m.cell_member(1), m.cell_member(0)];
        assert!(MMorphism::new(m.clone(), m, map).is_err());
    }
}
