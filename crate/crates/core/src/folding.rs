//! Folding operations `ψ_i`, `Ψ_r`, `Φ_m`, their generalisations, and the
//! relations they satisfy in any cubical ω-category.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cubical_core::{
    compare, composable_pairs, degen_pow, face_pow, CubicalCategory, CubicalError, Elem,
    SampleConfig,
};
use crate::path_complex::Sign;
use crate::report::{Check, Report};

fn range(op: &'static str, i: usize, lo: usize, hi: usize, n: usize) -> Result<(), CubicalError> {
    crate::cubical_core::check_index(op, i, lo, hi, n)
}

/// `ψ_i x = Γ^+_i ∂^-_{i+1} x ∘_{i+1} x ∘_{i+1} Γ^-_i ∂^+_{i+1} x`, for `1 <= i <= n-1`.
pub fn psi(g: &dyn CubicalCategory, i: usize, x: Elem) -> Result<Elem, CubicalError> {
    let n = x.n();
    range("fold", i, 1, n.saturating_sub(1), n)?;
    let left = g.conn(g.face(x, i + 1, Sign::Minus)?, i, Sign::Plus)?;
    let right = g.conn(g.face(x, i + 1, Sign::Plus)?, i, Sign::Minus)?;
    let lx = g.compose(left, x, i + 1)?;
    g.compose(lx, right, i + 1)
}

/// `ψ_{r-1} ψ_{r-2} ... ψ_l x`; the identity when `l >= r`.
pub fn psi_range(
    g: &dyn CubicalCategory,
    r: usize,
    l: usize,
    mut x: Elem,
) -> Result<Elem, CubicalError> {
    for i in l..r {
        x = psi(g, i, x)?;
    }
    Ok(x)
}

/// `Ψ_r = ψ_{r-1} ... ψ_1`, for `1 <= r <= n`.
#[allow(non_snake_case)]
pub fn Psi(g: &dyn CubicalCategory, r: usize, x: Elem) -> Result<Elem, CubicalError> {
    range("Psi", r, 1, x.n().max(1), x.n())?;
    psi_range(g, r, 1, x)
}

/// `Φ_m = Ψ_1 Ψ_2 ... Ψ_m`, for `m <= n`.
#[allow(non_snake_case)]
pub fn Phi(g: &dyn CubicalCategory, m: usize, mut x: Elem) -> Result<Elem, CubicalError> {
    range("Phi", m, 0, x.n(), x.n())?;
    for r in (1..=m).rev() {
        x = Psi(g, r, x)?;
    }
    Ok(x)
}

/// `x ∈ Im ε_1^k`, decided by the retraction `ε_1^k (∂^-_1)^k`.
pub fn in_image_of_degen_pow(
    g: &dyn CubicalCategory,
    x: Elem,
    k: usize,
) -> Result<bool, CubicalError> {
    if k == 0 {
        return Ok(true);
    }
    if x.n() < k {
        return Ok(false);
    }
    Ok(degen_pow(g, face_pow(g, x, Sign::Minus, k)?, k)? == x)
}

/// Whether `∂^a_m x ∈ Im ε_1^{m-1}` for every `1 <= m <= n` and sign.
pub fn is_folded(g: &dyn CubicalCategory, x: Elem) -> Result<bool, CubicalError> {
    for m in 1..=x.n() {
        for a in Sign::BOTH {
            if !in_image_of_degen_pow(g, g.face(x, m, a)?, m - 1)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// A generalised `ψ_i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Atom {
    Psi,
    /// `ε_i ∂^a_i`
    DegenFace(Sign),
    /// `ε_i ∂^a_{i+1}`
    DegenNextFace(Sign),
}

impl Atom {
    pub const ALL: [Atom; 5] = [
        Atom::Psi,
        Atom::DegenFace(Sign::Minus),
        Atom::DegenFace(Sign::Plus),
        Atom::DegenNextFace(Sign::Minus),
        Atom::DegenNextFace(Sign::Plus),
    ];

    pub fn apply(&self, g: &dyn CubicalCategory, i: usize, x: Elem) -> Result<Elem, CubicalError> {
        match *self {
            Atom::Psi => psi(g, i, x),
            Atom::DegenFace(a) => {
                range("fold", i, 1, x.n().saturating_sub(1), x.n())?;
                g.degen(g.face(x, i, a)?, i)
            }
            Atom::DegenNextFace(a) => {
                range("fold", i, 1, x.n().saturating_sub(1), x.n())?;
                g.degen(g.face(x, i + 1, a)?, i)
            }
        }
    }

    fn show(&self, i: usize) -> String {
        match self {
            Atom::Psi => format!("psi{i}"),
            Atom::DegenFace(a) => format!("e{i}d{a}{i}"),
            Atom::DegenNextFace(a) => format!("e{i}d{a}{}", i + 1),
        }
    }
}

/// A generalised `Φ_m = Ψ'_1 ... Ψ'_m` with `Ψ'_r = ψ'_{r-1} ... ψ'_1`.
///
/// `groups[r-1][i-1]` is the atom used for `ψ'_i` inside `Ψ'_r`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FoldingExpr {
    pub groups: Vec<Vec<Atom>>,
}

impl FoldingExpr {
    pub fn new(groups: Vec<Vec<Atom>>) -> Result<Self, CubicalError> {
        for (k, g) in groups.iter().enumerate() {
            if g.len() != k {
                return Err(CubicalError::GradeMismatch(format!(
                    "group {} has {} atoms, expected {}",
                    k + 1,
                    g.len(),
                    k
                )));
            }
        }
        Ok(FoldingExpr { groups })
    }

    /// The genuine `Φ_m`.
    pub fn phi(m: usize) -> Self {
        FoldingExpr {
            groups: (0..m).map(|k| vec![Atom::Psi; k]).collect(),
        }
    }

    pub fn m(&self) -> usize {
        self.groups.len()
    }

    pub fn is_genuine(&self) -> bool {
        self.groups.iter().flatten().all(|a| *a == Atom::Psi)
    }

    /// Every generalised `Φ_m`, in a fixed order starting with the genuine one.
    pub fn all(m: usize) -> Vec<FoldingExpr> {
        let slots = m * m.saturating_sub(1) / 2;
        let mut out = Vec::new();
        let total = Atom::ALL.len().pow(slots as u32);
        for code in 0..total {
            let mut c = code;
            let groups = (0..m)
                .map(|k| {
                    (0..k)
                        .map(|_| {
                            let a = Atom::ALL[c % Atom::ALL.len()];
                            c /= Atom::ALL.len();
                            a
                        })
                        .collect()
                })
                .collect();
            out.push(FoldingExpr { groups });
        }
        out
    }
}

impl fmt::Display for FoldingExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .groups
            .iter()
            .enumerate()
            .map(|(k, g)| {
                let atoms: Vec<String> = g
                    .iter()
                    .enumerate()
                    .rev()
                    .map(|(i, a)| a.show(i + 1))
                    .collect();
                if atoms.is_empty() {
                    format!("Psi{}", k + 1)
                } else {
                    format!("({})", atoms.join(" "))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// Right-to-left evaluation of a generalised `Φ_m`.
pub fn eval_generalized(
    g: &dyn CubicalCategory,
    e: &FoldingExpr,
    mut x: Elem,
) -> Result<Elem, CubicalError> {
    if e.m() > x.n() {
        return Err(CubicalError::GradeMismatch(format!(
            "{e} does not act on grade {}",
            x.n()
        )));
    }
    for group in e.groups.iter().rev() {
        for (k, atom) in group.iter().enumerate() {
            x = atom.apply(g, k + 1, x)?;
        }
    }
    Ok(x)
}

struct Suite {
    checks: Vec<(Check, bool)>,
}

impl Suite {
    fn slot(&mut self, id: &str) -> &mut (Check, bool) {
        if let Some(k) = self.checks.iter().position(|(c, _)| c.id == id) {
            return &mut self.checks[k];
        }
        self.checks.push((Check::new(id), false));
        self.checks.last_mut().expect("just pushed")
    }

    fn rel(
        &mut self,
        id: &str,
        witness: impl FnOnce() -> Vec<String>,
        lhs: Result<Elem, CubicalError>,
        rhs: Result<Elem, CubicalError>,
    ) {
        compare(&mut self.slot(id).0, witness, lhs, rhs);
    }

    fn truth(
        &mut self,
        id: &str,
        witness: impl FnOnce() -> Vec<String>,
        v: Result<bool, CubicalError>,
        detail: &str,
    ) {
        let c = &mut self.slot(id).0;
        match v {
            Ok(true) => c.pass(),
            Ok(false) => c.fail(witness(), detail.to_string()),
            Err(e) if e.is_truncation() => c.skip(),
            Err(e) => c.fail(witness(), e.to_string()),
        }
    }

    fn mark(&mut self, ids: &[&str], sampled: bool) {
        for id in ids {
            self.slot(id).1 |= sampled;
        }
    }

    fn into_report(self, title: &str) -> Report {
        let mut r = Report::new(title);
        for (c, s) in self.checks {
            r.push(c.sampled(s));
        }
        r
    }
}

const R_33_I: [&str; 8] = [
    "psi_j e_i = e_i psi_(j-1), i<j",
    "psi_j e_j = psi_j e_(j+1) = psi_j G_j = e_j",
    "psi_j e_i = e_i psi_j, i>j+1",
    "d_i psi_j = psi_(j-1) d_i, i<j",
    "d_j psi_j",
    "d_(j+1) psi_j = e_j d_j d_(j+1)",
    "d_i psi_j = psi_j d_i, i>j+1",
    "psi_i idempotent",
];

/// Checks the relations among foldings, faces, degeneracies, connections and composites.
pub fn relation_suite(g: &dyn CubicalCategory, cfg: &SampleConfig) -> Report {
    let mut s = Suite { checks: Vec::new() };
    if let Err(e) = run_suite(g, cfg, &mut s) {
        s.slot("folding.structure").0.fail(vec![], e.to_string());
    }
    s.into_report("folding relations")
}

fn run_suite(
    g: &dyn CubicalCategory,
    cfg: &SampleConfig,
    s: &mut Suite,
) -> Result<(), CubicalError> {
    use Sign::{Minus, Plus};
    let kmax = g.kmax();
    let lab = |x: Elem| g.label(x);
    for n in 0..=kmax {
        let w = (20 * (n + 2) * (n + 2) * (n + 2)) as u64;
        let (xs, sampled) = cfg.choose(g.elements(n), w, 1000 + n as u64);
        for x in xs {
            let wit = || vec![lab(x)];
            for j in 1..=n {
                for i in 1..j {
                    let lhs = g.degen(x, i).and_then(|y| psi(g, j, y));
                    let rhs = psi(g, j - 1, x).and_then(|y| g.degen(y, i));
                    s.rel(R_33_I[0], wit, lhs, rhs);
                }
                let e = g.degen(x, j);
                s.rel(
                    R_33_I[1],
                    wit,
                    g.degen(x, j).and_then(|y| psi(g, j, y)),
                    e.clone(),
                );
                s.rel(
                    R_33_I[1],
                    wit,
                    g.degen(x, j + 1).and_then(|y| psi(g, j, y)),
                    e.clone(),
                );
                for a in Sign::BOTH {
                    s.rel(
                        R_33_I[1],
                        wit,
                        g.conn(x, j, a).and_then(|y| psi(g, j, y)),
                        e.clone(),
                    );
                }
            }
            for j in 1..n {
                for i in (j + 2)..=(n + 1) {
                    let lhs = g.degen(x, i).and_then(|y| psi(g, j, y));
                    let rhs = psi(g, j, x).and_then(|y| g.degen(y, i));
                    s.rel(R_33_I[2], wit, lhs, rhs);
                }
                let p = psi(g, j, x);
                for a in Sign::BOTH {
                    for i in 1..j {
                        let lhs = p.clone().and_then(|y| g.face(y, i, a));
                        let rhs = g.face(x, i, a).and_then(|y| psi(g, j - 1, y));
                        s.rel(R_33_I[3], wit, lhs, rhs);
                    }
                    let lhs = p.clone().and_then(|y| g.face(y, j + 1, a));
                    let rhs = g
                        .face(x, j + 1, a)
                        .and_then(|y| g.face(y, j, a))
                        .and_then(|y| g.degen(y, j));
                    s.rel(R_33_I[5], wit, lhs, rhs);
                    for i in (j + 2)..=n {
                        let lhs = p.clone().and_then(|y| g.face(y, i, a));
                        let rhs = g.face(x, i, a).and_then(|y| psi(g, j, y));
                        s.rel(R_33_I[6], wit, lhs, rhs);
                    }
                }
                let lhs = p.clone().and_then(|y| g.face(y, j, Minus));
                let rhs = g
                    .face(x, j, Minus)
                    .and_then(|u| g.face(x, j + 1, Plus).and_then(|v| g.compose(u, v, j)));
                s.rel(R_33_I[4], wit, lhs, rhs);
                let lhs = p.clone().and_then(|y| g.face(y, j, Plus));
                let rhs = g
                    .face(x, j + 1, Minus)
                    .and_then(|u| g.face(x, j, Plus).and_then(|v| g.compose(u, v, j)));
                s.rel(R_33_I[4], wit, lhs, rhs);
                s.rel(
                    R_33_I[7],
                    wit,
                    p.clone().and_then(|y| psi(g, j, y)),
                    p.clone(),
                );
                let image = p.clone().map(|y| y == x);
                let pred = (|| {
                    Ok(
                        crate::cubical_core::in_image_of_degen(g, g.face(x, j + 1, Minus)?, j)?
                            && crate::cubical_core::in_image_of_degen(
                                g,
                                g.face(x, j + 1, Plus)?,
                                j,
                            )?,
                    )
                })();
                let agree = image.and_then(|a| pred.map(|b| a == b));
                s.truth(
                    "image of psi_i",
                    wit,
                    agree,
                    "membership test disagrees with the image",
                );
            }
            s.rel(
                "Psi_1 e_1 = e_1",
                wit,
                g.degen(x, 1).and_then(|y| Psi(g, 1, y)),
                g.degen(x, 1),
            );
            for r in 2..=(n + 1) {
                let lhs = g.degen(x, 1).and_then(|y| Psi(g, r, y));
                let rhs = Psi(g, r - 1, x).and_then(|y| g.degen(y, 1));
                s.rel("Psi_r e_1 = e_1 Psi_(r-1)", wit, lhs, rhs);
                for i in 2..=r {
                    let lhs = g.degen(x, i).and_then(|y| Psi(g, r, y));
                    let rhs = Psi(g, r - 1, x).and_then(|y| g.degen(y, i - 1));
                    s.rel("Psi_r e_i = e_(i-1) Psi_(r-1), 1<i<=r", wit, lhs, rhs);
                }
            }
            for r in 1..=n {
                for a in Sign::BOTH {
                    for i in (r + 1)..=n {
                        let lhs = Psi(g, r, x).and_then(|y| g.face(y, i, a));
                        let rhs = g.face(x, i, a).and_then(|y| Psi(g, r, y));
                        s.rel("d_i Psi_r = Psi_r d_i, i>r", wit, lhs, rhs);
                    }
                    let lhs = Psi(g, r, x).and_then(|y| g.face(y, r, a));
                    let rhs = face_pow(g, x, a, r).and_then(|y| degen_pow(g, y, r - 1));
                    s.rel("d_r Psi_r = e_1^(r-1) d_1^r", wit, lhs, rhs);
                }
            }
            // Phi_m against degeneracies, connections and faces
            for m in 1..=(n + 1) {
                for i in 1..=m {
                    let lhs = g.degen(x, i).and_then(|y| Phi(g, m, y));
                    let rhs = Phi(g, m - 1, x).and_then(|y| g.degen(y, 1));
                    s.rel("Phi_m e_i = e_1 Phi_(m-1)", wit, lhs, rhs);
                }
                for i in 1..m.min(n + 1) {
                    for a in Sign::BOTH {
                        let lhs = g.conn(x, i, a).and_then(|y| Phi(g, m, y));
                        let rhs = Phi(g, m - 1, x).and_then(|y| g.degen(y, 1));
                        s.rel("Phi_m G_i = e_1 Phi_(m-1)", wit, lhs, rhs);
                    }
                }
            }
            for m in 1..=n {
                for a in Sign::BOTH {
                    for i in (m + 1)..=n {
                        let lhs = Phi(g, m, x).and_then(|y| g.face(y, i, a));
                        let rhs = g.face(x, i, a).and_then(|y| Phi(g, m, y));
                        s.rel("d_i Phi_m = Phi_m d_i, i>m", wit, lhs, rhs);
                    }
                    let lhs = Phi(g, m, x).and_then(|y| g.face(y, m, a));
                    let rhs = face_pow(g, x, a, m).and_then(|y| degen_pow(g, y, m - 1));
                    s.rel("d_m Phi_m = e_1^(m-1) d_1^m", wit, lhs, rhs);
                }
            }
            // folded elements
            let f = Phi(g, n, x);
            s.rel(
                "Phi_n idempotent",
                wit,
                f.clone().and_then(|y| Phi(g, n, y)),
                f.clone(),
            );
            let agree = f
                .clone()
                .and_then(|y| is_folded(g, x).map(|b| b == (y == x)));
            s.truth(
                "image of Phi_n",
                wit,
                agree,
                "folded test disagrees with the image",
            );
            if let Ok(y) = f {
                let wy = || vec![lab(x), lab(y)];
                for m in 1..=n {
                    for a in Sign::BOTH {
                        let fm = face_pow(g, y, a, m);
                        s.rel(
                            "faces of folded elements",
                            wy,
                            g.face(y, m, a),
                            fm.clone().and_then(|z| degen_pow(g, z, m - 1)),
                        );
                        let lhs = g.face(y, m, a).and_then(|z| g.degen(z, m));
                        s.rel(
                            "faces of folded elements",
                            wy,
                            lhs,
                            fm.and_then(|z| degen_pow(g, z, m)),
                        );
                    }
                }
                for i in 1..=n {
                    for a in Sign::BOTH {
                        s.truth(
                            "folded elements closed under faces and degeneracies",
                            wy,
                            g.face(y, i, a).and_then(|z| is_folded(g, z)),
                            "face not folded",
                        );
                        let v = g
                            .face(y, i, a)
                            .and_then(|z| g.degen(z, i))
                            .and_then(|z| is_folded(g, z));
                        s.truth(
                            "folded elements closed under faces and degeneracies",
                            wy,
                            v,
                            "e_i d_i image not folded",
                        );
                    }
                }
                s.truth(
                    "folded elements closed under faces and degeneracies",
                    wy,
                    g.degen(y, 1).and_then(|z| is_folded(g, z)),
                    "e_1 image not folded",
                );
            }
            // relations among the psi_i
            for i in 1..n {
                for m in (i + 1)..=n {
                    let lhs = psi(g, i, x).and_then(|y| Phi(g, m, y));
                    s.rel("Phi_m psi_i = Phi_m", wit, lhs, Phi(g, m, x));
                }
            }
            for i in 1..=n {
                for a in Sign::BOTH {
                    let lhs = g.conn(x, i, a).and_then(|y| psi(g, i, y));
                    s.rel("psi_i G_i = e_i", wit, lhs, g.degen(x, i));
                }
            }
        }
        let ids: Vec<String> = s.checks.iter().map(|(c, _)| c.id.clone()).collect();
        let refs: Vec<&str> = ids.iter().map(String::as_str).collect();
        s.mark(&refs, sampled);
    }
    // relations among the psi_i, sampled separately since they are cheap
    for n in 3..=kmax {
        let (xs, sampled) = cfg.choose(g.elements(n), (n - 2) as u64, 3000 + n as u64);
        for x in xs {
            let wit = || vec![lab(x)];
            for i in 1..n {
                for j in (i + 2)..n {
                    let lhs = psi(g, j, x).and_then(|y| psi(g, i, y));
                    let rhs = psi(g, i, x).and_then(|y| psi(g, j, y));
                    s.rel("psi_i psi_j = psi_j psi_i, |i-j|>=2", wit, lhs, rhs);
                }
                if i > 1 {
                    let lhs = psi(g, i, x)
                        .and_then(|y| psi(g, i - 1, y))
                        .and_then(|y| psi(g, i, y));
                    let rhs = psi(g, i - 1, x)
                        .and_then(|y| psi(g, i, y))
                        .and_then(|y| psi(g, i - 1, y));
                    s.rel("folding braid", wit, lhs, rhs);
                }
            }
        }
        s.mark(
            &["psi_i psi_j = psi_j psi_i, |i-j|>=2", "folding braid"],
            sampled,
        );
    }
    // composites
    for n in 1..=kmax {
        let pairs = composable_pairs(g, n)?;
        let (pairs, sampled) = cfg.choose(pairs, (4 * n + 4) as u64, 2000 + n as u64);
        for (x, y, j) in pairs {
            let wit = || vec![lab(x), lab(y), format!("direction {j}")];
            let xy = g.compose(x, y, j);
            if is_folded(g, x)? && is_folded(g, y)? {
                s.truth(
                    "folded elements closed under composition",
                    wit,
                    xy.clone().and_then(|z| is_folded(g, z)),
                    "composite not folded",
                );
            }
            for i in 1..n {
                let lhs = xy.clone().and_then(|z| psi(g, i, z));
                let (id, rhs) = if j == i {
                    let rhs = (|| {
                        let a =
                            g.compose(psi(g, i, x)?, g.degen(g.face(y, i + 1, Plus)?, i)?, i + 1)?;
                        let b =
                            g.compose(g.degen(g.face(x, i + 1, Minus)?, i)?, psi(g, i, y)?, i + 1)?;
                        g.compose(a, b, i)
                    })();
                    ("psi_i of a composite, j=i", rhs)
                } else if j == i + 1 {
                    let rhs = (|| {
                        let a =
                            g.compose(g.degen(g.face(x, i, Minus)?, i)?, psi(g, i, y)?, i + 1)?;
                        let b =
                            g.compose(psi(g, i, x)?, g.degen(g.face(y, i, Plus)?, i)?, i + 1)?;
                        g.compose(a, b, i)
                    })();
                    ("psi_i of a composite, j=i+1", rhs)
                } else {
                    let rhs = (|| g.compose(psi(g, i, x)?, psi(g, i, y)?, j))();
                    ("psi_i of a composite, other j", rhs)
                };
                s.rel(id, wit, lhs, rhs);
            }
        }
        s.mark(
            &[
                "folded elements closed under composition",
                "psi_i of a composite, j=i",
                "psi_i of a composite, j=i+1",
                "psi_i of a composite, other j",
            ],
            sampled,
        );
    }
    Ok(())
}

/// Distinct operators among `Ψ_{1,l(1)} ... Ψ_{m,l(m)}`, compared pointwise on grade `n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PermutationCount {
    pub m: usize,
    pub composites: usize,
    pub distinct: usize,
    pub expected: usize,
}

impl PermutationCount {
    pub fn matches_factorial(&self) -> bool {
        self.distinct == self.expected
    }
}

pub fn permutation_count(
    g: &dyn CubicalCategory,
    m: usize,
    n: usize,
) -> Result<PermutationCount, CubicalError> {
    if m > n {
        return Err(CubicalError::GradeMismatch(format!(
            "m = {m} exceeds grade {n}"
        )));
    }
    let xs = g.elements(n);
    let mut choices: Vec<Vec<usize>> = vec![vec![]];
    for r in 1..=m {
        choices = choices
            .into_iter()
            .flat_map(|c| {
                (1..=r).map(move |l| {
                    let mut c = c.clone();
                    c.push(l);
                    c
                })
            })
            .collect();
    }
    let mut seen: BTreeSet<Vec<u32>> = BTreeSet::new();
    for ls in &choices {
        let values = xs
            .iter()
            .map(|&x| {
                let mut y = x;
                for r in (1..=m).rev() {
                    y = psi_range(g, r, ls[r - 1], y)?;
                }
                Ok(y.id)
            })
            .collect::<Result<Vec<_>, CubicalError>>()?;
        seen.insert(values);
    }
    Ok(PermutationCount {
        m,
        composites: choices.len(),
        distinct: seen.len(),
        expected: (1..=m).product(),
    })
}

/// Check that every generalised `Φ_m` other than `Φ_m` lands in `Im ε_1` on grade `m`.
pub fn generalized_report(g: &dyn CubicalCategory, m: usize, cfg: &SampleConfig) -> Report {
    let mut c = Check::new("generalised Phi_m lands in Im e_1");
    let (xs, sampled) = cfg.choose(
        g.elements(m),
        FoldingExpr::all(m).len() as u64,
        3000 + m as u64,
    );
    for e in FoldingExpr::all(m).into_iter().filter(|e| !e.is_genuine()) {
        for &x in &xs {
            let v = eval_generalized(g, &e, x)
                .and_then(|y| crate::cubical_core::in_image_of_degen(g, y, 1));
            match v {
                Ok(true) => c.pass(),
                Ok(false) => c.fail(
                    vec![e.to_string(), g.label(x)],
                    "value not in the image of e_1",
                ),
                Err(err) if err.is_truncation() => c.skip(),
                Err(err) => c.fail(vec![e.to_string(), g.label(x)], err.to_string()),
            }
        }
    }
    let mut r = Report::new("generalised foldings");
    r.push(c.sampled(sampled));
    r
}

/// `ψ̌ = ψ_1(id)` read off the nerve of `M(I^2)` as a morphism `M(I^2) -> M(I^2)`.
pub fn operational_psi() -> Result<crate::standard_morphisms::MMorphism, CubicalError> {
    let m = crate::omega_pasting::m_cube(2);
    let g = crate::nerve::Nerve::new(std::sync::Arc::new(m.table().clone()), 2)?;
    let cells: Vec<u32> = (0..m.shape().cell_count())
        .map(|c| m.cell_member(c))
        .collect();
    let id = g.find(2, &cells).ok_or_else(|| {
        CubicalError::Inconsistent("identity square missing from the nerve".into())
    })?;
    let folded = psi(&g, 1, id)?;
    crate::standard_morphisms::MMorphism::new(m.clone(), m, g.hom(folded).assignment.clone())
        .map_err(|e| CubicalError::Inconsistent(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nerve::Nerve;
    use crate::omega_pasting::m_of;
    use std::sync::Arc;

    fn nerve(shape: &str, kmax: usize) -> Nerve {
        Nerve::new(
            Arc::new(m_of(&shape.parse().unwrap()).unwrap().table().clone()),
            kmax,
        )
        .unwrap()
    }

    #[test]
    fn suite_on_small_nerves() {
        for (shape, k) in [("", 3), ("1", 4), ("2", 3)] {
            let g = nerve(shape, k);
            let r = relation_suite(&g, &SampleConfig::default());
            assert!(r.passed(), "{shape}: {r}");
        }
    }

    #[test]
    fn identity_square_is_folded() {
        let g = nerve("1x1", 2);
        let m = g.cube(2).clone();
        let id = g.element_from_cells(2, |c| m.cell_member_of(c)).unwrap();
        assert!(!is_folded(&g, id).unwrap());
        assert_eq!(Phi(&g, 1, id).unwrap(), id);
        let folded = Phi(&g, 2, id).unwrap();
        assert!(is_folded(&g, folded).unwrap());
        let closed = crate::standard_morphisms::phi_closed_form(2).unwrap();
        assert_eq!(g.hom(folded).assignment, closed.cell_map());
    }

    #[test]
    fn genuine_expression_matches_phi() {
        let g = nerve("1x1", 2);
        for x in g.elements(2) {
            assert_eq!(
                eval_generalized(&g, &FoldingExpr::phi(2), x).unwrap(),
                Phi(&g, 2, x).unwrap()
            );
        }
        assert_eq!(FoldingExpr::all(3).len(), 125);
        assert_eq!(FoldingExpr::phi(3).to_string(), "Psi1 (psi1) (psi2 psi1)");
    }
}
