//! The globular ω-category `γG` of a cubical ω-category, assembled from the
//! folded parts `Φ_n(G_n)` identified along `ε_1`.

use rustc_hash::FxHashMap;

use crate::cubical_core::{
    composable_pairs, degen_pow, face_pow, in_image_of_degen, CubicalCategory, CubicalError, Elem,
    SampleConfig,
};
use crate::folding::{is_folded, Phi};
use crate::omega_pasting::{check_omega_axioms, OmegaTable};
use crate::path_complex::Sign;
use crate::report::{Check, Report};

/// `d^a_p` of the ω-category structure on `Φ_n(G_n)`.
pub fn level_face(
    g: &dyn CubicalCategory,
    x: Elem,
    a: Sign,
    p: usize,
) -> Result<Elem, CubicalError> {
    let n = x.n();
    if p >= n {
        return Ok(x);
    }
    degen_pow(g, face_pow(g, x, a, n - p)?, n - p)
}

/// `x #_p y` in `Φ_n(G_n)`.
pub fn level_compose(
    g: &dyn CubicalCategory,
    x: Elem,
    y: Elem,
    p: usize,
) -> Result<Elem, CubicalError> {
    let n = x.n();
    if y.n() != n {
        return Err(CubicalError::GradeMismatch(format!("{x} and {y}")));
    }
    if p >= n {
        return if x == y {
            Ok(x)
        } else {
            Err(CubicalError::NotComposable {
                dir: 0,
                left: x,
                right: y,
            })
        };
    }
    g.compose(x, y, n - p)
}

/// Lowest-level representative along `ε_1`.
pub fn canonical(g: &dyn CubicalCategory, mut x: Elem) -> Result<Elem, CubicalError> {
    while x.n() > 0 && in_image_of_degen(g, x, 1)? {
        x = g.face(x, 1, Sign::Minus)?;
    }
    Ok(x)
}

/// `{x ∈ G_n : x folded}`, asserted equal to the image of `Φ_n`.
pub fn folded_part(g: &dyn CubicalCategory, n: usize) -> Result<Vec<Elem>, CubicalError> {
    let mut out = Vec::new();
    let mut image = Vec::new();
    for x in g.elements(n) {
        if is_folded(g, x)? {
            out.push(x);
        }
        image.push(Phi(g, n, x)?);
    }
    image.sort();
    image.dedup();
    if image != out {
        return Err(CubicalError::Inconsistent(format!(
            "folded elements of grade {n} differ from the image of Phi_{n}"
        )));
    }
    Ok(out)
}

/// `γG` over canonical representatives, as an ω-category table.
pub struct GammaCategory {
    reps: Vec<Elem>,
    index: FxHashMap<Elem, u32>,
    table: OmegaTable,
}

impl GammaCategory {
    pub fn new(g: &dyn CubicalCategory) -> Result<Self, CubicalError> {
        let mut reps = Vec::new();
        for n in 0..=g.kmax() {
            for x in folded_part(g, n)? {
                if n == 0 || !in_image_of_degen(g, x, 1)? {
                    reps.push(x);
                }
            }
        }
        let index: FxHashMap<Elem, u32> = reps
            .iter()
            .enumerate()
            .map(|(k, &x)| (x, k as u32))
            .collect();
        let find = |x: Elem| -> Result<u32, CubicalError> {
            let c = canonical(g, x)?;
            index.get(&c).copied().ok_or_else(|| {
                CubicalError::Inconsistent(format!("{} has no representative", g.label(c)))
            })
        };
        let dims: Vec<u32> = reps.iter().map(|x| x.grade).collect();
        let labels: Vec<String> = reps.iter().map(|&x| g.label(x)).collect();
        let faces = reps
            .iter()
            .map(|&x| {
                (0..x.n())
                    .map(|p| {
                        Ok([
                            find(level_face(g, x, Sign::Minus, p)?)?,
                            find(level_face(g, x, Sign::Plus, p)?)?,
                        ])
                    })
                    .collect::<Result<Vec<_>, CubicalError>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        let top = dims.iter().copied().max().unwrap_or(0) as usize;
        let mut composites = FxHashMap::default();
        for (kx, &x) in reps.iter().enumerate() {
            for (ky, &y) in reps.iter().enumerate() {
                for p in 0..top {
                    let level = x.n().max(y.n()).max(p + 1);
                    let lx = degen_pow(g, x, level - x.n())?;
                    let ly = degen_pow(g, y, level - y.n())?;
                    if level_face(g, lx, Sign::Plus, p)? != level_face(g, ly, Sign::Minus, p)? {
                        continue;
                    }
                    let z = find(level_compose(g, lx, ly, p)?)?;
                    composites.insert((kx as u32, ky as u32, p as u32), z);
                }
            }
        }
        let table = OmegaTable::new(labels, dims, faces, composites)
            .map_err(|e| CubicalError::Inconsistent(e.to_string()))?;
        Ok(GammaCategory { reps, index, table })
    }

    pub fn table(&self) -> &OmegaTable {
        &self.table
    }

    pub fn into_table(self) -> OmegaTable {
        self.table
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    /// Canonical representative of element `k`.
    pub fn rep(&self, k: u32) -> Elem {
        self.reps[k as usize]
    }

    pub fn reps(&self) -> &[Elem] {
        &self.reps
    }

    /// Element of `γG` represented by a folded `x`.
    pub fn element_of(&self, g: &dyn CubicalCategory, x: Elem) -> Result<u32, CubicalError> {
        let c = canonical(g, x)?;
        self.index
            .get(&c)
            .copied()
            .ok_or_else(|| CubicalError::Inconsistent(format!("{} is not folded", g.label(x))))
    }

    /// The representative of element `k` lifted to level `n` by `ε_1`.
    pub fn at_level(
        &self,
        g: &dyn CubicalCategory,
        k: u32,
        n: usize,
    ) -> Result<Elem, CubicalError> {
        let x = self.rep(k);
        if n < x.n() {
            return Err(CubicalError::GradeMismatch(format!(
                "{} lives above level {n}",
                g.label(x)
            )));
        }
        degen_pow(g, x, n - x.n())
    }
}

/// Structural checks on `γG` beyond the ω-category axioms.
pub fn gamma_report(g: &dyn CubicalCategory, gamma: &GammaCategory, cfg: &SampleConfig) -> Report {
    let mut report = check_omega_axioms(gamma.table());
    report.title = "gamma".into();
    let mut hom = Check::new("gamma.e1 is a homomorphism");
    let mut ident = Check::new("gamma.identification along e1");
    let mut inj = Check::new("gamma.e1 injective on folded parts");
    let mut sampled = false;
    let run = (|| -> Result<(), CubicalError> {
        for n in 0..g.kmax() {
            let folded = folded_part(g, n)?;
            let mut seen = FxHashMap::default();
            for &x in &folded {
                let e = g.degen(x, 1)?;
                if let Some(prev) = seen.insert(e, x) {
                    inj.fail(vec![g.label(prev), g.label(x)], "same image under e_1");
                } else {
                    inj.pass();
                }
                for p in 0..=n + 1 {
                    for a in Sign::BOTH {
                        let ok = g.degen(level_face(g, x, a, p)?, 1)? == level_face(g, e, a, p)?;
                        hom.expect(ok, || (vec![g.label(x)], format!("d{a}_{p}")));
                    }
                }
            }
            let pairs: Vec<_> = composable_pairs(g, n)?
                .into_iter()
                .filter(|&(x, y, _)| {
                    is_folded(g, x).unwrap_or(false) && is_folded(g, y).unwrap_or(false)
                })
                .collect();
            let (pairs, s) = cfg.choose(pairs, 1, 5000 + n as u64);
            sampled |= s;
            for (x, y, j) in pairs {
                let p = n - j;
                let lhs = g.degen(level_compose(g, x, y, p)?, 1)?;
                let rhs = level_compose(g, g.degen(x, 1)?, g.degen(y, 1)?, p)?;
                hom.expect(lhs == rhs, || {
                    (vec![g.label(x), g.label(y)], format!("#_{p}"))
                });
            }
        }
        for m in 1..=g.kmax() {
            for x in folded_part(g, m)? {
                for n in 0..m {
                    if level_face(g, x, Sign::Minus, n)? == x
                        && level_face(g, x, Sign::Plus, n)? == x
                    {
                        let lowered = degen_pow(g, face_pow(g, x, Sign::Minus, m - n)?, m - n)?;
                        ident.expect(lowered == x, || (vec![g.label(x)], format!("level {n}")));
                    }
                }
            }
        }
        Ok(())
    })();
    if let Err(e) = run {
        hom.fail(vec![], e.to_string());
    }
    report.push(hom.sampled(sampled));
    report.push(ident);
    report.push(inj);
    report
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
    fn counts() {
        for (shape, k, count) in [("", 1, 1), ("1", 2, 3), ("2", 2, 6), ("1x1", 3, 11)] {
            let g = nerve(shape, k);
            let gamma = GammaCategory::new(&g).unwrap();
            assert_eq!(gamma.len(), count, "{shape}");
            let r = gamma_report(&g, &gamma, &SampleConfig::default());
            assert!(r.passed(), "{r}");
        }
    }

    #[test]
    fn grade_zero_is_everything() {
        let g = nerve("1x1", 2);
        assert_eq!(folded_part(&g, 0).unwrap().len(), g.grade_size(0));
        assert_eq!(folded_part(&g, 2).unwrap().len(), 11);
    }
}
