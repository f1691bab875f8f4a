//! Cubical ω-categories with connections: the abstract interface, an axiom
//! auditor, grid composites and words in the generating operations.

use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::path_complex::{PathProduct, Sign};
use crate::report::{Check, Report};
use crate::standard_morphisms::{conn_cell, degen_cell, face_cell};

/// An element of grade `grade`, identified by its index in that grade.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Elem {
    pub grade: u32,
    pub id: u32,
}

impl Elem {
    pub fn new(grade: usize, id: usize) -> Self {
        Elem {
            grade: grade as u32,
            id: id as u32,
        }
    }

    pub fn n(&self) -> usize {
        self.grade as usize
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}#{}", self.grade, self.id)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CubicalError {
    #[error("{op} index {index} out of range at grade {grade}")]
    IndexOutOfRange {
        op: &'static str,
        index: usize,
        grade: usize,
    },
    #[error("grade {grade} lies beyond the truncation bound {kmax}")]
    BeyondTruncation { grade: usize, kmax: usize },
    #[error("not composable in direction {dir}: {left} and {right}")]
    NotComposable { dir: usize, left: Elem, right: Elem },
    #[error("grade mismatch: {0}")]
    GradeMismatch(String),
    #[error("unknown element {0}")]
    UnknownElement(Elem),
    #[error("inconsistent structure: {0}")]
    Inconsistent(String),
    #[error("grid not composable: {0}")]
    GridNotComposable(String),
    #[error("undecided: {0}")]
    Undecided(String),
    #[error("enumeration overflow after {0} elements")]
    Overflow(usize),
}

impl CubicalError {
    pub fn is_truncation(&self) -> bool {
        matches!(self, CubicalError::BeyondTruncation { .. })
    }
}

/// A cubical ω-category with connections, materialized up to grade `kmax`.
///
/// `face(x, i, a)` is `∂^a_i x`; `degen(x, i)` is `ε_i x` into the next grade
/// (`1 <= i <= n+1` for `x` of grade `n`); `conn(x, i, a)` is `Γ^a_i x`
/// (`1 <= i <= n`); `compose(x, y, i)` is `x ∘_i y`.
pub trait CubicalCategory {
    fn kmax(&self) -> usize;
    fn grade_size(&self, n: usize) -> usize;
    fn face(&self, x: Elem, i: usize, a: Sign) -> Result<Elem, CubicalError>;
    fn degen(&self, x: Elem, i: usize) -> Result<Elem, CubicalError>;
    fn conn(&self, x: Elem, i: usize, a: Sign) -> Result<Elem, CubicalError>;
    fn compose(&self, x: Elem, y: Elem, i: usize) -> Result<Elem, CubicalError>;

    fn label(&self, x: Elem) -> String {
        x.to_string()
    }

    fn elements(&self, n: usize) -> Vec<Elem> {
        (0..self.grade_size(n)).map(|k| Elem::new(n, k)).collect()
    }

    /// All `y` with `∂^-_i y = ∂^+_i x`.
    fn right_partners(&self, x: Elem, i: usize) -> Result<Vec<Elem>, CubicalError> {
        let target = self.face(x, i, Sign::Plus)?;
        let mut out = Vec::new();
        for y in self.elements(x.n()) {
            if self.face(y, i, Sign::Minus)? == target {
                out.push(y);
            }
        }
        Ok(out)
    }
}

pub(crate) fn check_index(
    op: &'static str,
    i: usize,
    lo: usize,
    hi: usize,
    grade: usize,
) -> Result<(), CubicalError> {
    if i < lo || i > hi {
        Err(CubicalError::IndexOutOfRange {
            op,
            index: i,
            grade,
        })
    } else {
        Ok(())
    }
}

/// `x ∈ Im ε_i`, decided by the retraction `ε_i ∂^-_i`.
pub fn in_image_of_degen(g: &dyn CubicalCategory, x: Elem, i: usize) -> Result<bool, CubicalError> {
    if x.n() == 0 || i > x.n() {
        return Ok(false);
    }
    Ok(g.degen(g.face(x, i, Sign::Minus)?, i)? == x)
}

/// Iterated `ε_1^k x`.
pub fn degen_pow(g: &dyn CubicalCategory, mut x: Elem, k: usize) -> Result<Elem, CubicalError> {
    for _ in 0..k {
        x = g.degen(x, 1)?;
    }
    Ok(x)
}

/// Iterated `(∂^a_1)^k x`.
pub fn face_pow(
    g: &dyn CubicalCategory,
    mut x: Elem,
    a: Sign,
    k: usize,
) -> Result<Elem, CubicalError> {
    for _ in 0..k {
        x = g.face(x, 1, a)?;
    }
    Ok(x)
}

/// Exhaustive-versus-sampled policy for relation suites.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SampleConfig {
    pub exhaustive_limit: u64,
    pub sample_size: u64,
    pub seed: u64,
}

impl Default for SampleConfig {
    fn default() -> Self {
        SampleConfig {
            exhaustive_limit: 100_000,
            sample_size: 10_000,
            seed: 0x5eed,
        }
    }
}

impl SampleConfig {
    pub fn with_seed(seed: u64) -> Self {
        SampleConfig {
            seed,
            ..Default::default()
        }
    }

    /// Never samples.
    pub fn exhaustive() -> Self {
        SampleConfig {
            exhaustive_limit: u64::MAX,
            ..Default::default()
        }
    }

    /// Keeps all items when `items * weight` is within the limit, otherwise a
    /// seeded uniform subset sized to about `sample_size` instances.
    pub fn choose<T: Clone>(&self, items: Vec<T>, weight: u64, salt: u64) -> (Vec<T>, bool) {
        let weight = weight.max(1);
        if (items.len() as u64).saturating_mul(weight) <= self.exhaustive_limit {
            return (items, false);
        }
        let want = (self.sample_size.div_ceil(weight))
            .max(1)
            .min(items.len() as u64) as usize;
        let mut rng =
            ChaCha8Rng::seed_from_u64(self.seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15));
        let mut idx = sample(&mut rng, items.len(), want).into_vec();
        idx.sort_unstable();
        (idx.into_iter().map(|k| items[k].clone()).collect(), true)
    }
}

/// Records the comparison of two sides of a relation.
pub fn compare(
    check: &mut Check,
    witness: impl FnOnce() -> Vec<String>,
    lhs: Result<Elem, CubicalError>,
    rhs: Result<Elem, CubicalError>,
) {
    match (lhs, rhs) {
        (Ok(a), Ok(b)) => {
            if a == b {
                check.pass()
            } else {
                check.fail(witness(), format!("{a} != {b}"))
            }
        }
        (Err(e), _) | (_, Err(e)) if e.is_truncation() => check.skip(),
        (Err(e), _) | (_, Err(e)) => check.fail(witness(), e.to_string()),
    }
}

/// Composable pairs `(a, b)` with `a ∘_j b` defined at grade `n`, for every direction `j`.
pub fn composable_pairs(
    g: &dyn CubicalCategory,
    n: usize,
) -> Result<Vec<(Elem, Elem, usize)>, CubicalError> {
    let mut out = Vec::new();
    for a in g.elements(n) {
        for j in 1..=n {
            for b in g.right_partners(a, j)? {
                out.push((a, b, j));
            }
        }
    }
    Ok(out)
}

/// Checks the cubical identities on every grade up to the truncation bound.
pub fn check_cubical_axioms(g: &dyn CubicalCategory, cfg: &SampleConfig) -> Report {
    let mut report = Report::new("cubical axioms");
    match audit(g, cfg, &mut report) {
        Ok(()) => {}
        Err(e) => {
            let mut c = Check::new("cubical.structure");
            c.fail(vec![], e.to_string());
            report.push(c);
        }
    }
    report
}

fn audit(
    g: &dyn CubicalCategory,
    cfg: &SampleConfig,
    report: &mut Report,
) -> Result<(), CubicalError> {
    use Sign::{Minus, Plus};
    let kmax = g.kmax();
    let lab = |x: Elem| g.label(x);
    let mut sampled_any = [false; 24];

    let mut c = vec![
        Check::new("faces commute"),
        Check::new("degeneracies commute"),
        Check::new("faces of degeneracies"),
        Check::new("connections commute"),
        Check::new("repeated connection"),
        Check::new("connections of degeneracies"),
        Check::new("connection of degeneracy at same index"),
        Check::new("faces of connections"),
        Check::new("faces of connections, same sign"),
        Check::new("faces of connections, opposite sign"),
    ];
    for n in 0..=kmax {
        let w = (4 * n * n + 8 * (n + 2) * (n + 2)) as u64;
        let (xs, sampled) = cfg.choose(g.elements(n), w, n as u64);
        for k in 0..10 {
            sampled_any[k] |= sampled;
        }
        for x in xs {
            let wit = || vec![lab(x)];
            for i in 1..=n {
                for j in (i + 1)..=n {
                    for a in Sign::BOTH {
                        for b in Sign::BOTH {
                            let lhs = g.face(x, j, b).and_then(|y| g.face(y, i, a));
                            let rhs = g.face(x, i, a).and_then(|y| g.face(y, j - 1, b));
                            compare(&mut c[0], wit, lhs, rhs);
                        }
                    }
                }
            }
            for j in 1..=n + 1 {
                for i in 1..=j {
                    let lhs = g.degen(x, j).and_then(|y| g.degen(y, i));
                    let rhs = g.degen(x, i).and_then(|y| g.degen(y, j + 1));
                    compare(&mut c[1], wit, lhs, rhs);
                }
            }
            for j in 1..=n + 1 {
                for i in 1..=n + 1 {
                    for a in Sign::BOTH {
                        let lhs = g.degen(x, j).and_then(|y| g.face(y, i, a));
                        let rhs = if i < j {
                            g.face(x, i, a).and_then(|y| g.degen(y, j - 1))
                        } else if i > j {
                            g.face(x, i - 1, a).and_then(|y| g.degen(y, j))
                        } else {
                            Ok(x)
                        };
                        compare(&mut c[2], wit, lhs, rhs);
                    }
                }
            }
            // connections
            for j in 1..=n {
                for i in 1..j {
                    for a in Sign::BOTH {
                        for b in Sign::BOTH {
                            let lhs = g.conn(x, j, b).and_then(|y| g.conn(y, i, a));
                            let rhs = g.conn(x, i, a).and_then(|y| g.conn(y, j + 1, b));
                            compare(&mut c[3], wit, lhs, rhs);
                        }
                    }
                }
            }
            for i in 1..=n {
                for a in Sign::BOTH {
                    let lhs = g.conn(x, i, a).and_then(|y| g.conn(y, i, a));
                    let rhs = g.conn(x, i, a).and_then(|y| g.conn(y, i + 1, a));
                    compare(&mut c[4], wit, lhs, rhs);
                }
            }
            for j in 1..=n + 1 {
                for i in 1..=n + 1 {
                    for a in Sign::BOTH {
                        let lhs = g.degen(x, j).and_then(|y| g.conn(y, i, a));
                        let rhs = if i < j {
                            g.conn(x, i, a).and_then(|y| g.degen(y, j + 1))
                        } else if i > j {
                            g.conn(x, i - 1, a).and_then(|y| g.degen(y, j))
                        } else {
                            g.degen(x, j).and_then(|y| g.degen(y, j))
                        };
                        compare(&mut c[if i == j { 6 } else { 5 }], wit, lhs, rhs);
                        if i == j {
                            let lhs = g.degen(x, j).and_then(|y| g.degen(y, j));
                            let rhs = g.degen(x, j).and_then(|y| g.degen(y, j + 1));
                            compare(&mut c[6], wit, lhs, rhs);
                        }
                    }
                }
            }
            for j in 1..=n {
                for i in 1..=n + 1 {
                    for a in Sign::BOTH {
                        for b in Sign::BOTH {
                            let lhs = g.conn(x, j, b).and_then(|y| g.face(y, i, a));
                            if i < j {
                                let rhs = g.face(x, i, a).and_then(|y| g.conn(y, j - 1, b));
                                compare(&mut c[7], wit, lhs, rhs);
                            } else if i > j + 1 {
                                let rhs = g.face(x, i - 1, a).and_then(|y| g.conn(y, j, b));
                                compare(&mut c[7], wit, lhs, rhs);
                            } else if a == b {
                                compare(&mut c[8], wit, lhs, Ok(x));
                            } else {
                                let rhs = g.face(x, j, a).and_then(|y| g.degen(y, j));
                                compare(&mut c[9], wit, lhs, rhs);
                            }
                        }
                    }
                }
            }
        }
    }

    // composites
    let mut d = vec![
        Check::new("composition domain"),
        Check::new("faces of composites"),
        Check::new("units"),
        Check::new("associativity"),
        Check::new("interchange"),
        Check::new("degeneracies of composites"),
        Check::new("connections of composites"),
        Check::new("transport, plus"),
        Check::new("transport, minus"),
        Check::new("connection cancellation"),
    ];
    for n in 1..=kmax {
        let pairs = composable_pairs(g, n)?;
        let (pairs, sampled) = cfg.choose(pairs, (8 * (n + 2) * (n + 2)) as u64, 100 + n as u64);
        for k in 10..20 {
            sampled_any[k] |= sampled;
        }
        for &(a, b, j) in &pairs {
            let wit = || vec![lab(a), lab(b), format!("direction {j}")];
            let ab = g.compose(a, b, j);
            if let Err(e) = &ab {
                d[0].fail(wit(), e.to_string());
                continue;
            }
            d[0].pass();
            let ab = ab?;
            compare(&mut d[1], wit, g.face(ab, j, Minus), g.face(a, j, Minus));
            compare(&mut d[1], wit, g.face(ab, j, Plus), g.face(b, j, Plus));
            for i in (1..=n).filter(|&i| i != j) {
                for al in Sign::BOTH {
                    let lhs = g.face(ab, i, al);
                    let dj = if i < j { j - 1 } else { j };
                    let rhs = g
                        .face(a, i, al)
                        .and_then(|fa| g.face(b, i, al).and_then(|fb| g.compose(fa, fb, dj)));
                    compare(&mut d[1], wit, lhs, rhs);
                }
            }
            // associativity with every right partner of b
            for c3 in g.right_partners(b, j)? {
                let lhs = g.compose(ab, c3, j);
                let rhs = g.compose(b, c3, j).and_then(|bc| g.compose(a, bc, j));
                compare(
                    &mut d[3],
                    || vec![lab(a), lab(b), lab(c3), format!("direction {j}")],
                    lhs,
                    rhs,
                );
            }
            // degeneracies and connections of composites
            for i in 1..=n + 1 {
                let lhs = g.degen(ab, i);
                let rhs = if i <= j {
                    g.degen(a, i)
                        .and_then(|x| g.degen(b, i).and_then(|y| g.compose(x, y, j + 1)))
                } else {
                    g.degen(a, i)
                        .and_then(|x| g.degen(b, i).and_then(|y| g.compose(x, y, j)))
                };
                compare(&mut d[5], wit, lhs, rhs);
            }
            for i in (1..=n).filter(|&i| i != j) {
                for al in Sign::BOTH {
                    let lhs = g.conn(ab, i, al);
                    let dir = if i < j { j + 1 } else { j };
                    let rhs = g
                        .conn(a, i, al)
                        .and_then(|x| g.conn(b, i, al).and_then(|y| g.compose(x, y, dir)));
                    compare(&mut d[6], wit, lhs, rhs);
                }
            }
            let plus = (|| {
                let grid = vec![
                    vec![g.conn(a, j, Plus)?, g.degen(a, j)?],
                    vec![g.degen(a, j + 1)?, g.conn(b, j, Plus)?],
                ];
                compose_matrix(g, &grid, j, j + 1)
            })();
            compare(&mut d[7], wit, g.conn(ab, j, Plus), plus);
            let minus = (|| {
                let grid = vec![
                    vec![g.conn(a, j, Minus)?, g.degen(b, j + 1)?],
                    vec![g.degen(b, j)?, g.conn(b, j, Minus)?],
                ];
                compose_matrix(g, &grid, j, j + 1)
            })();
            compare(&mut d[8], wit, g.conn(ab, j, Minus), minus);
        }
        // units and connection cancellation over single elements
        let (xs, _) = cfg.choose(g.elements(n), 4 * n as u64 + 4, 200 + n as u64);
        for x in xs {
            let wit = || vec![lab(x)];
            for j in 1..=n {
                let lu = g
                    .face(x, j, Minus)
                    .and_then(|y| g.degen(y, j))
                    .and_then(|e| g.compose(e, x, j));
                compare(&mut d[2], wit, lu, Ok(x));
                let ru = g
                    .face(x, j, Plus)
                    .and_then(|y| g.degen(y, j))
                    .and_then(|e| g.compose(x, e, j));
                compare(&mut d[2], wit, ru, Ok(x));
                let lhs = g
                    .conn(x, j, Plus)
                    .and_then(|p| g.conn(x, j, Minus).and_then(|m| g.compose(p, m, j)));
                compare(&mut d[9], wit, lhs, g.degen(x, j + 1));
                let lhs = g
                    .conn(x, j, Plus)
                    .and_then(|p| g.conn(x, j, Minus).and_then(|m| g.compose(p, m, j + 1)));
                compare(&mut d[9], wit, lhs, g.degen(x, j));
            }
        }
        // domain converse: non-matching pairs must be rejected
        let all = g.elements(n);
        let total = (all.len() * all.len()) as u64;
        let pairs: Vec<(usize, usize)> = if total <= cfg.exhaustive_limit {
            (0..all.len())
                .flat_map(|x| (0..all.len()).map(move |y| (x, y)))
                .collect()
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ (300 + n as u64));
            sampled_any[10] = true;
            (0..cfg.sample_size)
                .map(|_| (rng.gen_range(0..all.len()), rng.gen_range(0..all.len())))
                .collect()
        };
        for (x, y) in pairs {
            let (a, b) = (all[x], all[y]);
            for j in 1..=n {
                if g.face(a, j, Plus)? != g.face(b, j, Minus)? {
                    let rejected =
                        matches!(g.compose(a, b, j), Err(CubicalError::NotComposable { .. }));
                    d[0].expect(rejected, || {
                        (
                            vec![lab(a), lab(b)],
                            format!("composite in direction {j} without matching faces"),
                        )
                    });
                }
            }
        }
        // interchange over quadruples with all four inner composites defined
        let mut quads = Vec::new();
        for a in g.elements(n) {
            for i in 1..=n {
                for j in (1..=n).filter(|&j| j != i) {
                    for b in g.right_partners(a, i)? {
                        for c3 in g.right_partners(a, j)? {
                            for d4 in g.right_partners(c3, i)? {
                                if g.face(b, j, Plus)? == g.face(d4, j, Minus)? {
                                    quads.push((a, b, c3, d4, i, j));
                                }
                            }
                        }
                    }
                }
            }
        }
        let (quads, sampled) = cfg.choose(quads, 1, 400 + n as u64);
        sampled_any[14] |= sampled;
        for (a, b, c3, d4, i, j) in quads {
            let lhs = g
                .compose(a, b, i)
                .and_then(|x| g.compose(c3, d4, i).and_then(|y| g.compose(x, y, j)));
            let rhs = g
                .compose(a, c3, j)
                .and_then(|x| g.compose(b, d4, j).and_then(|y| g.compose(x, y, i)));
            compare(
                &mut d[4],
                || {
                    vec![
                        lab(a),
                        lab(b),
                        lab(c3),
                        lab(d4),
                        format!("directions {i},{j}"),
                    ]
                },
                lhs,
                rhs,
            );
        }
    }
    for (k, chk) in c.into_iter().chain(d).enumerate() {
        report.push(chk.sampled(sampled_any[k]));
    }
    Ok(())
}

/// An entry of a grid: an element, or an identity filled in from its neighbours.
/// Whether `f: G -> H` commutes with every operation inside both truncations.
pub fn check_morphism<F>(
    g: &dyn CubicalCategory,
    h: &dyn CubicalCategory,
    f: F,
    cfg: &SampleConfig,
    id: &str,
) -> Check
where
    F: Fn(Elem) -> Option<Elem>,
{
    let mut c = Check::new(id);
    let kmax = g.kmax().min(h.kmax());
    let mut sampled = false;
    for n in 0..=kmax {
        let (xs, s) = cfg.choose(g.elements(n), (6 * n + 4) as u64, 7000 + n as u64);
        sampled |= s;
        for x in xs {
            let fx = f(x);
            let w = || vec![g.label(x)];
            for i in 1..=n {
                for a in Sign::BOTH {
                    let ok =
                        g.face(x, i, a).ok().and_then(&f) == fx.and_then(|y| h.face(y, i, a).ok());
                    c.expect(ok, || (w(), format!("face {i}{a}")));
                    if n < kmax {
                        let ok = g.conn(x, i, a).ok().and_then(&f)
                            == fx.and_then(|y| h.conn(y, i, a).ok());
                        c.expect(ok, || (w(), format!("connection {i}{a}")));
                    }
                }
                if let Ok(ys) = g.right_partners(x, i) {
                    for y in ys {
                        let lhs = g.compose(x, y, i).ok().and_then(&f);
                        let rhs = fx.zip(f(y)).and_then(|(u, v)| h.compose(u, v, i).ok());
                        c.expect(lhs == rhs, || {
                            (vec![g.label(x), g.label(y)], format!("composite {i}"))
                        });
                    }
                }
            }
            if n < kmax {
                for i in 1..=n + 1 {
                    let ok = g.degen(x, i).ok().and_then(&f) == fx.and_then(|y| h.degen(y, i).ok());
                    c.expect(ok, || (w(), format!("degeneracy {i}")));
                }
            }
        }
    }
    c.sampled(sampled)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GridEntry {
    Elem(Elem),
    /// An element of `Im ε_i`, an identity for the row direction (written `-`).
    RowIdentity,
    /// An element of `Im ε_j`, an identity for the column direction (written `|`).
    ColIdentity,
}

/// Replaces identity placeholders by the identities their neighbours force.
pub fn fill_grid(
    g: &dyn CubicalCategory,
    grid: &[Vec<GridEntry>],
    i: usize,
    j: usize,
) -> Result<Vec<Vec<Elem>>, CubicalError> {
    let rows = grid.len();
    let cols = grid.first().map_or(0, Vec::len);
    let mut out: Vec<Vec<Option<Elem>>> = grid
        .iter()
        .map(|r| {
            r.iter()
                .map(|e| {
                    if let GridEntry::Elem(x) = e {
                        Some(*x)
                    } else {
                        None
                    }
                })
                .collect()
        })
        .collect();
    loop {
        let mut progress = false;
        let mut missing = false;
        for r in 0..rows {
            for c in 0..cols {
                if out[r][c].is_some() {
                    continue;
                }
                let v = match grid[r][c] {
                    GridEntry::RowIdentity => {
                        if c + 1 < cols && out[r][c + 1].is_some() {
                            Some(g.degen(g.face(out[r][c + 1].unwrap(), i, Sign::Minus)?, i)?)
                        } else if c > 0 && out[r][c - 1].is_some() {
                            Some(g.degen(g.face(out[r][c - 1].unwrap(), i, Sign::Plus)?, i)?)
                        } else {
                            None
                        }
                    }
                    GridEntry::ColIdentity => {
                        if r + 1 < rows && out[r + 1][c].is_some() {
                            Some(g.degen(g.face(out[r + 1][c].unwrap(), j, Sign::Minus)?, j)?)
                        } else if r > 0 && out[r - 1][c].is_some() {
                            Some(g.degen(g.face(out[r - 1][c].unwrap(), j, Sign::Plus)?, j)?)
                        } else {
                            None
                        }
                    }
                    GridEntry::Elem(_) => unreachable!(),
                };
                if v.is_some() {
                    out[r][c] = v;
                    progress = true;
                } else {
                    missing = true;
                }
            }
        }
        if !missing {
            return Ok(out
                .into_iter()
                .map(|r| r.into_iter().map(Option::unwrap).collect())
                .collect());
        }
        if !progress {
            return Err(CubicalError::GridNotComposable(
                "identity entries cannot be determined".into(),
            ));
        }
    }
}

/// The composite of a grid whose rows compose in direction `i` and whose
/// columns compose in direction `j`; both evaluation orders must agree.
pub fn compose_matrix(
    g: &dyn CubicalCategory,
    grid: &[Vec<Elem>],
    i: usize,
    j: usize,
) -> Result<Elem, CubicalError> {
    let rows = grid.len();
    if rows == 0 || grid[0].is_empty() || grid.iter().any(|r| r.len() != grid[0].len()) {
        return Err(CubicalError::GridNotComposable(
            "grid is not rectangular".into(),
        ));
    }
    let cols = grid[0].len();
    let fold = |items: &mut dyn Iterator<Item = Elem>,
                dir: usize,
                what: &str|
     -> Result<Elem, CubicalError> {
        let mut acc: Option<Elem> = None;
        for (k, x) in items.enumerate() {
            acc = Some(match acc {
                None => x,
                Some(a) => g.compose(a, x, dir).map_err(|e| {
                    CubicalError::GridNotComposable(format!("{what}, position {k}: {e}"))
                })?,
            });
        }
        Ok(acc.expect("nonempty"))
    };
    let row_vals = (0..rows)
        .map(|r| fold(&mut grid[r].iter().copied(), i, &format!("row {r}")))
        .collect::<Result<Vec<_>, _>>()?;
    let by_rows = fold(&mut row_vals.into_iter(), j, "stacking rows")?;
    let col_vals = (0..cols)
        .map(|c| {
            fold(
                &mut (0..rows).map(|r| grid[r][c]),
                j,
                &format!("column {c}"),
            )
        })
        .collect::<Result<Vec<_>, _>>()?;
    let by_cols = fold(&mut col_vals.into_iter(), i, "joining columns")?;
    if by_rows != by_cols {
        return Err(CubicalError::Inconsistent(format!(
            "grid evaluation orders disagree: {by_rows} vs {by_cols}"
        )));
    }
    Ok(by_rows)
}

/// A generating operation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Op {
    Face(usize, Sign),
    Degen(usize),
    Conn(usize, Sign),
}

impl fmt::Display for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Op::Face(i, a) => write!(f, "d{a}{i}"),
            Op::Degen(i) => write!(f, "e{i}"),
            Op::Conn(i, a) => write!(f, "g{a}{i}"),
        }
    }
}

impl FromStr for Op {
    type Err = CubicalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || CubicalError::GradeMismatch(format!("malformed operation {s:?}"));
        let (head, rest) = s.split_at(1.min(s.len()));
        let signed = |r: &str| -> Result<(Sign, usize), CubicalError> {
            let (sg, idx) = r.split_at(1.min(r.len()));
            let a = match sg {
                "-" => Sign::Minus,
                "+" => Sign::Plus,
                _ => return Err(bad()),
            };
            Ok((a, idx.parse().map_err(|_| bad())?))
        };
        match head {
            "d" => signed(rest).map(|(a, i)| Op::Face(i, a)),
            "g" => signed(rest).map(|(a, i)| Op::Conn(i, a)),
            "e" => rest.parse().map(Op::Degen).map_err(|_| bad()),
            _ => Err(bad()),
        }
    }
}

impl Op {
    /// Grade after applying to an element of grade `n`, if the index is valid there.
    pub fn target(&self, n: usize) -> Option<usize> {
        match *self {
            Op::Face(i, _) => (i >= 1 && i <= n).then(|| n - 1),
            Op::Degen(i) => (i >= 1 && i <= n + 1).then_some(n + 1),
            Op::Conn(i, _) => (i >= 1 && i <= n).then_some(n + 1),
        }
    }

    pub fn apply(&self, g: &dyn CubicalCategory, x: Elem) -> Result<Elem, CubicalError> {
        match *self {
            Op::Face(i, a) => g.face(x, i, a),
            Op::Degen(i) => g.degen(x, i),
            Op::Conn(i, a) => g.conn(x, i, a),
        }
    }

    /// Action on a cell of the target cube of the underlying morphism.
    fn cell_action(&self, cell: &[u32]) -> Vec<u32> {
        match *self {
            Op::Face(i, a) => face_cell(i, a, cell),
            Op::Degen(i) => degen_cell(i, cell),
            Op::Conn(i, a) => conn_cell(i, a, cell),
        }
    }
}

/// A word in the generating operations, applied right to left.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OpWord(pub Vec<Op>);

impl fmt::Display for OpWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "id");
        }
        let parts: Vec<String> = self.0.iter().map(Op::to_string).collect();
        write!(f, "{}", parts.join(" "))
    }
}

impl FromStr for OpWord {
    type Err = CubicalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if t.is_empty() || t == "id" {
            return Ok(OpWord::default());
        }
        t.split_whitespace()
            .map(str::parse)
            .collect::<Result<Vec<_>, _>>()
            .map(OpWord)
    }
}

/// Default rewrite step budget for normalization.
pub const REWRITE_BUDGET: usize = 10_000;
/// Largest grade at which the semantic comparison of words is attempted.
pub const SEMANTIC_GRADE_LIMIT: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Decision {
    NormalForm,
    Semantic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub equal: bool,
    pub by: Decision,
}

impl OpWord {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Grade of the result for an input of grade `n`, if well graded.
    pub fn target(&self, n: usize) -> Option<usize> {
        self.0.iter().rev().try_fold(n, |k, op| op.target(k))
    }

    /// Grades at every intermediate stage, rightmost first.
    pub fn grades(&self, n: usize) -> Option<Vec<usize>> {
        let mut out = vec![n];
        let mut k = n;
        for op in self.0.iter().rev() {
            k = op.target(k)?;
            out.push(k);
        }
        Some(out)
    }

    pub fn apply(&self, g: &dyn CubicalCategory, x: Elem) -> Result<Elem, CubicalError> {
        if self.target(x.n()).is_none() {
            return Err(CubicalError::GradeMismatch(format!(
                "word {self} does not act on grade {}",
                x.n()
            )));
        }
        self.0.iter().rev().try_fold(x, |y, op| op.apply(g, y))
    }

    /// The underlying cube map: for each cell of the target cube, its image in the source cube.
    pub fn cell_action(&self, n: usize) -> Result<Vec<Vec<u32>>, CubicalError> {
        let m = self.target(n).ok_or_else(|| {
            CubicalError::GradeMismatch(format!("word {self} does not act on grade {n}"))
        })?;
        Ok(PathProduct::cube(m)
            .cells()
            .into_iter()
            .map(|c| self.0.iter().fold(c.0, |cell, op| op.cell_action(&cell)))
            .collect())
    }

    /// Rewrites to the form `ε...ε Γ...Γ ∂...∂` using the face, degeneracy and connection identities.
    ///
    /// Degeneracies are strictly decreasing, connections non-increasing with
    /// equal indices only for opposite signs, faces strictly increasing.
    pub fn normalize(&self, n: usize, budget: usize) -> Result<OpWord, CubicalError> {
        if self.target(n).is_none() {
            return Err(CubicalError::GradeMismatch(format!(
                "word {self} does not act on grade {n}"
            )));
        }
        let mut w = self.0.clone();
        let mut steps = 0;
        'outer: loop {
            for k in 0..w.len().saturating_sub(1) {
                if let Some(rep) = rewrite(w[k], w[k + 1]) {
                    w.splice(k..k + 2, rep);
                    steps += 1;
                    if steps > budget {
                        return Err(CubicalError::Undecided(format!(
                            "rewrite budget {budget} exhausted on {self}"
                        )));
                    }
                    continue 'outer;
                }
            }
            return Ok(OpWord(w));
        }
    }
}

fn rewrite(l: Op, r: Op) -> Option<Vec<Op>> {
    use Op::*;
    Some(match (l, r) {
        (Face(i, a), Face(j, b)) if i >= j => vec![Face(j, b), Face(i + 1, a)],
        (Face(i, a), Degen(j)) => {
            if i < j {
                vec![Degen(j - 1), Face(i, a)]
            } else if i > j {
                vec![Degen(j), Face(i - 1, a)]
            } else {
                vec![]
            }
        }
        (Face(i, a), Conn(j, b)) => {
            if i < j {
                vec![Conn(j - 1, b), Face(i, a)]
            } else if i > j + 1 {
                vec![Conn(j, b), Face(i - 1, a)]
            } else if a == b {
                vec![]
            } else {
                vec![Degen(j), Face(j, a)]
            }
        }
        (Conn(i, a), Degen(j)) => {
            if i < j {
                vec![Degen(j + 1), Conn(i, a)]
            } else if i > j {
                vec![Degen(j), Conn(i - 1, a)]
            } else {
                vec![Degen(j + 1), Degen(j)]
            }
        }
        (Degen(i), Degen(j)) if i <= j => vec![Degen(j + 1), Degen(i)],
        (Conn(i, a), Conn(j, b)) if i < j => vec![Conn(j + 1, b), Conn(i, a)],
        (Conn(i, a), Conn(j, b)) if i == j && a == b => vec![Conn(i + 1, a), Conn(i, a)],
        _ => return None,
    })
}

/// Decides whether two words acting on grade `n` denote the same operation.
pub fn opword_equal(v: &OpWord, w: &OpWord, n: usize) -> Result<Verdict, CubicalError> {
    let (tv, tw) = (v.target(n), w.target(n));
    if tv.is_none() || tw.is_none() || tv != tw {
        return Err(CubicalError::GradeMismatch(format!(
            "{v} and {w} differ in grading on grade {n}"
        )));
    }
    let nv = v.normalize(n, REWRITE_BUDGET);
    let nw = w.normalize(n, REWRITE_BUDGET);
    if let (Ok(a), Ok(b)) = (&nv, &nw) {
        if a == b {
            return Ok(Verdict {
                equal: true,
                by: Decision::NormalForm,
            });
        }
    }
    if n.max(tv.unwrap()) > SEMANTIC_GRADE_LIMIT {
        return Err(CubicalError::Undecided(format!(
            "{v} vs {w}: normal forms differ and grade is too large"
        )));
    }
    Ok(Verdict {
        equal: v.cell_action(n)? == w.cell_action(n)?,
        by: Decision::Semantic,
    })
}

/// Compares two words by their action on every element of grade `n` of `g`.
pub fn opword_equal_on(
    g: &dyn CubicalCategory,
    v: &OpWord,
    w: &OpWord,
    n: usize,
) -> Result<bool, CubicalError> {
    for x in g.elements(n) {
        if v.apply(g, x)? != w.apply(g, x)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A seeded random well-graded word on grade `n` with all intermediate grades at most `kmax`.
pub fn random_word(rng: &mut impl Rng, n: usize, max_len: usize, kmax: usize) -> OpWord {
    let len = rng.gen_range(0..=max_len);
    let mut ops_rev = Vec::with_capacity(len);
    let mut k = n;
    for _ in 0..len {
        let mut choices = Vec::new();
        for i in 1..=k {
            for a in Sign::BOTH {
                choices.push(Op::Face(i, a));
            }
        }
        if k < kmax {
            for i in 1..=k + 1 {
                choices.push(Op::Degen(i));
            }
            for i in 1..=k {
                for a in Sign::BOTH {
                    choices.push(Op::Conn(i, a));
                }
            }
        }
        if choices.is_empty() {
            break;
        }
        let op = choices[rng.gen_range(0..choices.len())];
        k = op.target(k).expect("chosen valid");
        ops_rev.push(op);
    }
    ops_rev.reverse();
    OpWord(ops_rev)
}

/// The face word `∂_σ` of a cell of `I^n`, in increasing-index form.
pub fn face_word(cell: &[u32]) -> OpWord {
    OpWord(
        cell.iter()
            .enumerate()
            .filter(|(_, &v)| v % 2 == 0)
            .map(|(k, &v)| Op::Face(k + 1, if v == 0 { Sign::Minus } else { Sign::Plus }))
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> OpWord {
        s.parse().unwrap()
    }

    #[test]
    fn parse_and_display() {
        let x = w("d-1 e2 g+1");
        assert_eq!(x.to_string(), "d-1 e2 g+1");
        assert_eq!(w("id"), OpWord::default());
        assert!("q1".parse::<OpWord>().is_err());
    }

    #[test]
    fn grading() {
        assert_eq!(w("d-1 d+2").target(2), Some(0));
        assert_eq!(w("d+3").target(2), None);
        assert_eq!(w("e3").target(2), Some(3));
        assert_eq!(w("g+2").target(1), None);
    }

    #[test]
    fn known_equalities() {
        let v = opword_equal(&w("d-1 d+2"), &w("d+1 d-1"), 2).unwrap();
        assert!(v.equal);
        assert_eq!(v.by, Decision::NormalForm);
        assert!(opword_equal(&w("e1 e1"), &w("e2 e1"), 0).unwrap().equal);
        assert!(!opword_equal(&w("d-1"), &w("d+1"), 1).unwrap().equal);
        assert_eq!(w("d-1 e1").normalize(3, 100).unwrap(), OpWord::default());
        assert_eq!(w("d+1 g-1").normalize(1, 100).unwrap(), w("e1 d+1"));
    }

    #[test]
    fn face_words_are_normal() {
        let cube = PathProduct::cube(3);
        for c in cube.cells() {
            let fw = face_word(c.components());
            assert_eq!(fw.normalize(3, 100).unwrap(), fw);
            let m = c.dim();
            let top = PathProduct::cube(m).index_of(&crate::path_complex::Cell(vec![1; m]));
            assert_eq!(fw.cell_action(3).unwrap()[top], c.components());
        }
    }

    #[test]
    fn normalization_is_idempotent_and_sound() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..2000 {
            let n = rng.gen_range(0..=3);
            let x = random_word(&mut rng, n, 6, 5);
            let nf = x.normalize(n, REWRITE_BUDGET).unwrap();
            assert_eq!(nf.normalize(n, REWRITE_BUDGET).unwrap(), nf);
            assert_eq!(
                nf.cell_action(n).unwrap(),
                x.cell_action(n).unwrap(),
                "{x} vs {nf}"
            );
        }
    }

    #[test]
    fn sampling_policy() {
        let cfg = SampleConfig::default();
        let (all, s) = cfg.choose((0..100).collect::<Vec<_>>(), 10, 1);
        assert!(!s && all.len() == 100);
        let (some, s) = cfg.choose((0..1_000_000).collect::<Vec<_>>(), 1, 1);
        assert!(s && some.len() == 10_000);
        let (again, _) = cfg.choose((0..1_000_000).collect::<Vec<_>>(), 1, 1);
        assert_eq!(some, again);
    }
}
