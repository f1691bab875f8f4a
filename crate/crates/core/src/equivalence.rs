//! The comparison maps `A: γλX -> X` and `B: G -> λγG`, shells, and the
//! reconstruction of an element from its boundary and its folding.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use rustc_hash::FxHashMap;
use thiserror::Error;

use crate::cubical_core::{
    check_morphism, face_word, CubicalCategory, CubicalError, Elem, SampleConfig,
};
use crate::folding::{psi, Phi};
use crate::gamma::GammaCategory;
use crate::nerve::{check_nerve_map, nerve_map, Nerve};
use crate::omega_pasting::{m_of, OmegaTable};
use crate::path_complex::{PathProduct, Sign};
use crate::report::{Check, Report};
use crate::standard_morphisms::{base_mu, MMorphism};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EquivalenceError {
    #[error(transparent)]
    Cubical(#[from] CubicalError),
    #[error("not a shell: {0}")]
    NotAShell(String),
    #[error("boundary mismatch: {0}")]
    BoundaryMismatch(String),
    #[error("incompatible pair: {0}")]
    IncompatiblePair(String),
}

/// An `n`-shell `(z^-_1, z^+_1, ..., z^-_n, z^+_n)` in grade `n-1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Shell {
    entries: Vec<Elem>,
}

impl Shell {
    /// Validates the compatibility `∂^a_i z^b_j = ∂^b_{j-1} z^a_i` for `i < j`.
    pub fn new(g: &dyn CubicalCategory, entries: Vec<Elem>) -> Result<Self, EquivalenceError> {
        if entries.is_empty() || entries.len() % 2 != 0 {
            return Err(EquivalenceError::NotAShell(format!(
                "{} entries",
                entries.len()
            )));
        }
        let n = entries.len() / 2;
        if entries.iter().any(|z| z.n() + 1 != n) {
            return Err(EquivalenceError::NotAShell(format!(
                "entries must have grade {}",
                n - 1
            )));
        }
        let s = Shell { entries };
        if let Some(msg) = s.violation(g)? {
            return Err(EquivalenceError::NotAShell(msg));
        }
        Ok(s)
    }

    fn violation(&self, g: &dyn CubicalCategory) -> Result<Option<String>, CubicalError> {
        let n = self.n();
        for j in 1..=n {
            for i in 1..j {
                for a in Sign::BOTH {
                    for b in Sign::BOTH {
                        if g.face(self.get(j, b), i, a)? != g.face(self.get(i, a), j - 1, b)? {
                            return Ok(Some(format!("faces ({i}{a}, {j}{b}) disagree")));
                        }
                    }
                }
            }
        }
        Ok(None)
    }

    pub fn n(&self) -> usize {
        self.entries.len() / 2
    }

    /// `z^a_i`.
    pub fn get(&self, i: usize, a: Sign) -> Elem {
        self.entries[2 * (i - 1) + a.index()]
    }

    pub fn entries(&self) -> &[Elem] {
        &self.entries
    }
}

impl fmt::Display for Shell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.entries.iter().map(Elem::to_string).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// `∂x = (∂^-_1 x, ∂^+_1 x, ..., ∂^-_n x, ∂^+_n x)`.
pub fn shell_boundary(g: &dyn CubicalCategory, x: Elem) -> Result<Shell, CubicalError> {
    let mut entries = Vec::with_capacity(2 * x.n());
    for i in 1..=x.n() {
        for a in Sign::BOTH {
            entries.push(g.face(x, i, a)?);
        }
    }
    Ok(Shell { entries })
}

/// Folding `ψ_j` on shells, defined entrywise; the result is re-validated.
pub fn shell_psi(g: &dyn CubicalCategory, z: &Shell, j: usize) -> Result<Shell, EquivalenceError> {
    let n = z.n();
    crate::cubical_core::check_index("fold", j, 1, n.saturating_sub(1), n)?;
    let mut entries = Vec::with_capacity(2 * n);
    for i in 1..=n {
        for a in Sign::BOTH {
            let w = if i < j {
                psi(g, j - 1, z.get(i, a))?
            } else if i == j {
                match a {
                    Sign::Minus => g.compose(z.get(j, Sign::Minus), z.get(j + 1, Sign::Plus), j)?,
                    Sign::Plus => g.compose(z.get(j + 1, Sign::Minus), z.get(j, Sign::Plus), j)?,
                }
            } else if i == j + 1 {
                g.degen(g.face(z.get(j + 1, a), j, a)?, j)?
            } else {
                psi(g, j, z.get(i, a))?
            };
            entries.push(w);
        }
    }
    let w = Shell { entries };
    if let Some(msg) = w.violation(g)? {
        return Err(EquivalenceError::NotAShell(format!("folded shell: {msg}")));
    }
    Ok(w)
}

/// Indices `j` of the `ψ_j` making up `Φ_n`, in order of application.
pub fn phi_word(n: usize) -> Vec<usize> {
    (1..=n).rev().flat_map(|r| 1..r).collect()
}

/// `Φ_n` on shells.
pub fn shell_phi(g: &dyn CubicalCategory, z: &Shell) -> Result<Shell, EquivalenceError> {
    let mut w = z.clone();
    for j in phi_word(z.n()) {
        w = shell_psi(g, &w, j)?;
    }
    Ok(w)
}

/// `θy = (ε_j z^-_j ∘_{j+1} Γ^+_j z^+_{j+1}) ∘_j y ∘_j (Γ^-_j z^-_{j+1} ∘_{j+1} ε_j z^+_j)`.
pub fn theta(
    g: &dyn CubicalCategory,
    z: &Shell,
    y: Elem,
    j: usize,
) -> Result<Elem, EquivalenceError> {
    let target = shell_psi(g, z, j)?;
    if shell_boundary(g, y)? != target {
        return Err(EquivalenceError::BoundaryMismatch(format!(
            "{} is not a filler of the folded shell",
            g.label(y)
        )));
    }
    let left = g.compose(
        g.degen(z.get(j, Sign::Minus), j)?,
        g.conn(z.get(j + 1, Sign::Plus), j, Sign::Plus)?,
        j + 1,
    )?;
    let right = g.compose(
        g.conn(z.get(j + 1, Sign::Minus), j, Sign::Minus)?,
        g.degen(z.get(j, Sign::Plus), j)?,
        j + 1,
    )?;
    let ly = g.compose(left, y, j)?;
    Ok(g.compose(ly, right, j)?)
}

/// The unique `x` with `∂x = z` and `Φ_n x = y`.
pub fn reconstruct(g: &dyn CubicalCategory, z: &Shell, y: Elem) -> Result<Elem, EquivalenceError> {
    let word = phi_word(z.n());
    let mut shells = vec![z.clone()];
    for &j in &word {
        let next = shell_psi(g, shells.last().expect("nonempty"), j)?;
        shells.push(next);
    }
    if shell_boundary(g, y)? != *shells.last().expect("nonempty") || Phi(g, y.n(), y)? != y {
        return Err(EquivalenceError::IncompatiblePair(format!(
            "{} does not fold {}",
            g.label(y),
            z
        )));
    }
    let mut x = y;
    for (k, &j) in word.iter().enumerate().rev() {
        x = theta(g, &shells[k], x, j)?;
    }
    Ok(x)
}

/// All `n`-shells in grade `n-1`, in lexicographic order.
pub fn enumerate_shells(g: &dyn CubicalCategory, n: usize) -> Result<Vec<Shell>, CubicalError> {
    let pool = g.elements(n - 1);
    let mut out = Vec::new();
    let mut cur: Vec<Elem> = Vec::with_capacity(2 * n);
    fn rec(
        g: &dyn CubicalCategory,
        pool: &[Elem],
        n: usize,
        cur: &mut Vec<Elem>,
        out: &mut Vec<Shell>,
    ) -> Result<(), CubicalError> {
        if cur.len() == 2 * n {
            out.push(Shell {
                entries: cur.clone(),
            });
            return Ok(());
        }
        let j = cur.len() / 2 + 1;
        let b = if cur.len() % 2 == 0 {
            Sign::Minus
        } else {
            Sign::Plus
        };
        'cand: for &c in pool {
            for i in 1..j {
                for a in Sign::BOTH {
                    let zi = cur[2 * (i - 1) + a.index()];
                    if g.face(c, i, a)? != g.face(zi, j - 1, b)? {
                        continue 'cand;
                    }
                }
            }
            cur.push(c);
            rec(g, pool, n, cur, out)?;
            cur.pop();
        }
        Ok(())
    }
    rec(g, &pool, n, &mut cur, &mut out)?;
    Ok(out)
}

/// `A`: evaluation of a folded element on the top cell.
pub fn a_value(lx: &Nerve, x: Elem) -> u32 {
    lx.hom(x).value(lx.cube(x.n()).top_member())
}

/// `A` on every element of `γλX`, indexed like the γ table.
pub fn a_map(lx: &Nerve, gamma: &GammaCategory) -> Vec<u32> {
    gamma.reps().iter().map(|&r| a_value(lx, r)).collect()
}

/// Whether `f` is an isomorphism of tables `s -> t`.
pub fn check_table_iso(s: &OmegaTable, t: &OmegaTable, f: &[u32], check: &mut Check) {
    if s.len() != t.len() || f.iter().copied().collect::<BTreeSet<_>>().len() != s.len() {
        check.fail(
            vec![],
            format!("not a bijection: {} vs {} elements", s.len(), t.len()),
        );
        return;
    }
    let top = s.top().max(t.top());
    for x in 0..s.len() as u32 {
        let fx = f[x as usize];
        check.expect(s.dim(x) == t.dim(fx), || {
            (vec![s.label(x).into()], "dimension".into())
        });
        for p in 0..top {
            for a in Sign::BOTH {
                let ok = f[s.face(x, a, p) as usize] == t.face(fx, a, p);
                check.expect(ok, || (vec![s.label(x).into()], format!("d{a}_{p}")));
            }
        }
        for y in 0..s.len() as u32 {
            for p in 0..top {
                let lhs = s.compose(x, y, p).map(|z| f[z as usize]);
                let rhs = t.compose(fx, f[y as usize], p);
                check.expect(lhs == rhs, || {
                    (vec![s.label(x).into(), s.label(y).into()], format!("#_{p}"))
                });
            }
        }
    }
}

/// `B`: the homomorphism `M(I^n) -> γG` with `σ ↦ Φ_m ∂_σ x`, on cells.
pub fn b_assignment(
    g: &dyn CubicalCategory,
    gamma: &GammaCategory,
    x: Elem,
) -> Result<Vec<u32>, CubicalError> {
    PathProduct::cube(x.n())
        .cells()
        .iter()
        .map(|c| {
            let y = face_word(c.components()).apply(g, x)?;
            gamma.element_of(g, Phi(g, y.n(), y)?)
        })
        .collect()
}

/// `B` on every grade, as elements of `λγG`.
pub fn b_map(
    g: &dyn CubicalCategory,
    gamma: &GammaCategory,
    lgg: &Nerve,
) -> Result<Vec<Vec<Elem>>, CubicalError> {
    (0..=g.kmax().min(lgg.kmax()))
        .map(|n| {
            g.elements(n)
                .into_iter()
                .map(|x| {
                    let a = b_assignment(g, gamma, x)?;
                    lgg.find(n, &a).ok_or_else(|| {
                        CubicalError::Inconsistent(format!(
                            "B({}) is not a homomorphism",
                            g.label(x)
                        ))
                    })
                })
                .collect()
        })
        .collect()
}

/// Checks of `B: G -> λγG` and of the boundary-and-folding bijection on a cubical category.
pub fn cubical_roundtrip_report(
    g: &dyn CubicalCategory,
    gamma: &GammaCategory,
    theta_grades: usize,
    cfg: &SampleConfig,
) -> Report {
    let mut r = Report::new("cubical round trip");
    let lgg = match Nerve::new(Arc::new(gamma.table().clone()), g.kmax()) {
        Ok(n) => n,
        Err(e) => {
            let mut c = Check::new("lambda gamma G");
            c.fail(vec![], e.to_string());
            r.push(c);
            return r;
        }
    };
    // A ∘ γB = id
    let mut aob = Check::new("A o gamma B = id");
    for (k, &x) in gamma.reps().iter().enumerate() {
        match b_assignment(g, gamma, x) {
            Ok(a) => {
                let cube = PathProduct::cube(x.n());
                let top = a[cube.index_of(&cube.top_cells()[0])];
                aob.expect(top == k as u32, || {
                    (vec![g.label(x)], format!("B(x)(I^n) is element {top}"))
                });
            }
            Err(e) => aob.fail(vec![g.label(x)], e.to_string()),
        }
    }
    r.push(aob);
    match b_map(g, gamma, &lgg) {
        Ok(b) => {
            let mut bij = Check::new("B bijective");
            for (n, row) in b.iter().enumerate() {
                let distinct = row.iter().collect::<BTreeSet<_>>().len();
                bij.expect(
                    distinct == row.len() && row.len() == lgg.grade_size(n),
                    || {
                        (
                            vec![format!("grade {n}")],
                            format!("{distinct} distinct values, {} targets", lgg.grade_size(n)),
                        )
                    },
                );
            }
            r.push(bij);
            r.push(check_morphism(
                g,
                &lgg,
                |x| b.get(x.n()).and_then(|row| row.get(x.id as usize)).copied(),
                cfg,
                "B homomorphism",
            ));
        }
        Err(e) => {
            let mut c = Check::new("B homomorphism");
            c.fail(vec![], e.to_string());
            r.push(c);
        }
    }
    r.extend(shell_report(g, theta_grades, cfg));
    r
}

/// The boundary-and-folding bijection and the `θ` retractions, on grades `1..=max_n`.
pub fn shell_report(g: &dyn CubicalCategory, max_n: usize, cfg: &SampleConfig) -> Report {
    let mut r = Report::new("shells");
    let mut bij = Check::new("boundary and folding determine x");
    let mut tp = Check::new("theta after psi_j is identity");
    let mut pt = Check::new("psi_j after theta is identity");
    let mut recon = Check::new("reconstruct from boundary and folding");
    let mut compat = Check::new("shell compatibility of boundaries");
    let mut commute = Check::new("boundary commutes with psi_j");
    let mut sampled = false;
    let run = (|| -> Result<(), EquivalenceError> {
        for n in 1..=max_n.min(g.kmax()) {
            let elems = g.elements(n);
            let mut by_boundary: FxHashMap<Shell, Vec<Elem>> = FxHashMap::default();
            let mut pairs = FxHashMap::default();
            for &x in &elems {
                let z = shell_boundary(g, x)?;
                compat.expect(z.violation(g)?.is_none(), || {
                    (vec![g.label(x)], "boundary is not a shell".into())
                });
                let key = (z.clone(), Phi(g, n, x)?);
                if let Some(prev) = pairs.insert(key, x) {
                    bij.fail(vec![g.label(prev), g.label(x)], "same boundary and folding");
                } else {
                    bij.pass();
                }
                by_boundary.entry(z).or_default().push(x);
            }
            let shells = enumerate_shells(g, n)?;
            let (shells, s) = cfg.choose(shells, 4 * n as u64, 8000 + n as u64);
            sampled |= s;
            let mut pullback = 0usize;
            for z in &shells {
                let folded = shell_phi(g, z)?;
                for &y in by_boundary.get(&folded).map(Vec::as_slice).unwrap_or(&[]) {
                    if Phi(g, n, y)? != y {
                        continue;
                    }
                    pullback += 1;
                    match reconstruct(g, z, y) {
                        Ok(x) => {
                            let ok = shell_boundary(g, x)? == *z && Phi(g, n, x)? == y;
                            recon.expect(ok, || {
                                (vec![z.to_string(), g.label(y)], "wrong element".into())
                            });
                        }
                        Err(e) => recon.fail(vec![z.to_string(), g.label(y)], e.to_string()),
                    }
                }
                for j in 1..n {
                    let w = shell_psi(g, z, j)?;
                    for &y in by_boundary.get(&w).map(Vec::as_slice).unwrap_or(&[]) {
                        let v = theta(g, z, y, j).and_then(|t| Ok(psi(g, j, t)?));
                        pt.expect(v.as_ref().ok() == Some(&y), || {
                            (vec![z.to_string(), g.label(y)], format!("{v:?}"))
                        });
                    }
                }
            }
            if !s {
                let fillers = pairs.len();
                bij.expect(pullback == fillers, || {
                    (
                        vec![format!("grade {n}")],
                        format!("pull-back has {pullback} pairs, grade has {fillers}"),
                    )
                });
            }
            for &x in &elems {
                let z = shell_boundary(g, x)?;
                for j in 1..n {
                    let p = psi(g, j, x)?;
                    let v = theta(g, &z, p, j);
                    tp.expect(v.as_ref().ok() == Some(&x), || {
                        (vec![g.label(x)], format!("j = {j}: {v:?}"))
                    });
                    let ok = shell_psi(g, &z, j)? == shell_boundary(g, p)?;
                    commute.expect(ok, || (vec![g.label(x)], format!("j = {j}")));
                }
            }
        }
        Ok(())
    })();
    if let Err(e) = run {
        bij.fail(vec![], e.to_string());
    }
    for c in [bij, recon, tp, pt, compat, commute] {
        r.push(c.sampled(sampled));
    }
    r
}

/// Checks of `A: γλX -> X` for a pasting shape, and of its naturality along `μ̌`.
pub fn omega_roundtrip_report(
    shape: &PathProduct,
    kmax: usize,
    cfg: &SampleConfig,
) -> Result<Report, CubicalError> {
    let m = m_of(shape).map_err(|e| CubicalError::Inconsistent(e.to_string()))?;
    let x = Arc::new(m.table().clone());
    let lx = Nerve::new(x.clone(), kmax)?;
    let gamma = GammaCategory::new(&lx)?;
    let mut r = Report::new(format!("round trip for {shape}"));
    let mut ax = crate::omega_pasting::check_omega_axioms(gamma.table());
    ax.checks
        .iter_mut()
        .for_each(|c| c.id = format!("gamma {}", c.id));
    r.extend(ax);
    let mut iso = Check::new("A isomorphism onto X");
    check_table_iso(gamma.table(), &x, &a_map(&lx, &gamma), &mut iso);
    r.push(iso);
    r.push(naturality_check()?);
    r.extend(cubical_roundtrip_report(&lx, &gamma, 2, cfg));
    Ok(r)
}

/// `A_Y ∘ γλf = f ∘ A_X` for `f = μ̌: M(I) -> M([0,2])`.
pub fn naturality_check() -> Result<Check, CubicalError> {
    let f: MMorphism = base_mu().map_err(|e| CubicalError::Inconsistent(e.to_string()))?;
    let fx = f
        .total()
        .map_err(|e| CubicalError::Inconsistent(e.to_string()))?
        .to_vec();
    let lx = Nerve::new(Arc::new(f.source().table().clone()), 2)?;
    let ly = Nerve::new(Arc::new(f.target().table().clone()), 2)?;
    let gx = GammaCategory::new(&lx)?;
    let gy = GammaCategory::new(&ly)?;
    let lf = nerve_map(&lx, &ly, |v| fx[v as usize])?;
    let mut c = Check::new("A natural along mu");
    let functorial = check_nerve_map(&lx, &ly, |v| fx[v as usize]);
    for chk in functorial.failures() {
        c.fail(
            vec![],
            format!("lambda f is not a cubical morphism: {}", chk.id),
        );
    }
    for (k, &rep) in gx.reps().iter().enumerate() {
        let image = Elem::new(rep.n(), lf[rep.n()][rep.id as usize] as usize);
        let gk = gy.element_of(&ly, image)?;
        let lhs = a_value(&ly, gy.rep(gk));
        let rhs = fx[a_value(&lx, rep) as usize];
        c.expect(lhs == rhs, || {
            (vec![format!("element {k}")], format!("{lhs} != {rhs}"))
        });
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nerve(shape: &str, kmax: usize) -> Nerve {
        Nerve::new(
            Arc::new(m_of(&shape.parse().unwrap()).unwrap().table().clone()),
            kmax,
        )
        .unwrap()
    }

    #[test]
    fn face_word_of_left_edge() {
        let w = face_word(&[0, 1]);
        assert_eq!(w.to_string(), "d-1");
        assert!(face_word(&[1, 1]).is_empty());
    }

    #[test]
    fn theta_inverts_psi_on_squares() {
        let g = nerve("1x1", 2);
        for x in g.elements(2) {
            let z = shell_boundary(&g, x).unwrap();
            let p = psi(&g, 1, x).unwrap();
            assert_eq!(theta(&g, &z, p, 1).unwrap(), x);
            assert_eq!(reconstruct(&g, &z, Phi(&g, 2, x).unwrap()).unwrap(), x);
        }
    }

    #[test]
    fn theta_rejects_wrong_boundary() {
        let g = nerve("1x1", 2);
        let xs = g.elements(2);
        let z = shell_boundary(&g, xs[0]).unwrap();
        let bad = xs
            .iter()
            .copied()
            .find(|&y| shell_boundary(&g, y).unwrap() != shell_psi(&g, &z, 1).unwrap())
            .unwrap();
        assert!(matches!(
            theta(&g, &z, bad, 1),
            Err(EquivalenceError::BoundaryMismatch(_))
        ));
    }

    #[test]
    fn interval_round_trip() {
        let r = omega_roundtrip_report(&"1".parse().unwrap(), 2, &SampleConfig::default()).unwrap();
        assert!(r.passed(), "{r}");
    }
}
