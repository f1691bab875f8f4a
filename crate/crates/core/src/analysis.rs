//! Thin elements and commutative shells.

use std::collections::VecDeque;
use std::fmt;

use rustc_hash::FxHashMap;
use serde_json::{json, Value};
use thiserror::Error;

use crate::cubical_core::{in_image_of_degen, CubicalCategory, CubicalError, Elem};
use crate::equivalence::{phi_word, shell_boundary, shell_phi, shell_psi, EquivalenceError, Shell};
use crate::folding::Phi;
use crate::nerve::Nerve;
use crate::path_complex::Sign;
use crate::report::{Check, Report};

pub const DEFAULT_SEARCH_BUDGET: usize = 10_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AnalysisError {
    #[error("not thin: {0}")]
    NotThin(String),
    #[error("exhausted({0})")]
    Exhausted(usize),
    #[error(transparent)]
    Cubical(#[from] CubicalError),
    #[error(transparent)]
    Equivalence(#[from] EquivalenceError),
}

/// `Φ_n x ∈ Im ε_1`. Grade 0 elements are never thin.
pub fn is_thin(g: &dyn CubicalCategory, x: Elem) -> Result<bool, CubicalError> {
    if x.n() == 0 {
        return Ok(false);
    }
    in_image_of_degen(g, Phi(g, x.n(), x)?, 1)
}

/// Thinness read off the nerve: the value on the top cell has dimension below `n`.
pub fn is_thin_by_dimension(g: &Nerve, x: Elem) -> bool {
    let top = g.cube(x.n()).top_member();
    (g.target().dim(g.hom(x).value(top)) as usize) < x.n()
}

/// A composite of images of degeneracies and connections.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ThinWitness {
    Degen {
        i: usize,
        y: Elem,
    },
    Conn {
        i: usize,
        sign: Sign,
        z: Elem,
    },
    Compose {
        dir: usize,
        left: Box<ThinWitness>,
        right: Box<ThinWitness>,
    },
}

impl ThinWitness {
    pub fn eval(&self, g: &dyn CubicalCategory) -> Result<Elem, CubicalError> {
        match self {
            ThinWitness::Degen { i, y } => g.degen(*y, *i),
            ThinWitness::Conn { i, sign, z } => g.conn(*z, *i, *sign),
            ThinWitness::Compose { dir, left, right } => {
                g.compose(left.eval(g)?, right.eval(g)?, *dir)
            }
        }
    }

    pub fn leaves(&self) -> usize {
        match self {
            ThinWitness::Compose { left, right, .. } => left.leaves() + right.leaves(),
            _ => 1,
        }
    }

    fn compose(self, other: ThinWitness, dir: usize) -> ThinWitness {
        ThinWitness::Compose {
            dir,
            left: Box::new(self),
            right: Box::new(other),
        }
    }

    pub fn to_json(&self, g: &dyn CubicalCategory) -> Value {
        match self {
            ThinWitness::Degen { i, y } => json!({ "op": format!("e{i}"), "arg": g.label(*y) }),
            ThinWitness::Conn { i, sign, z } => {
                json!({ "op": format!("g{sign}{i}"), "arg": g.label(*z) })
            }
            ThinWitness::Compose { dir, left, right } => {
                json!({ "op": format!("o{dir}"), "left": left.to_json(g), "right": right.to_json(g) })
            }
        }
    }
}

impl fmt::Display for ThinWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ThinWitness::Degen { i, y } => write!(f, "e{i}({y})"),
            ThinWitness::Conn { i, sign, z } => write!(f, "g{sign}{i}({z})"),
            ThinWitness::Compose { dir, left, right } => write!(f, "({left} o{dir} {right})"),
        }
    }
}

/// How `thin_decompose` looks for a witness.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Strategy {
    /// Unfold `x` through the `θ` composites that invert the foldings.
    #[default]
    Constructive,
    /// Breadth-first search over composites of generators, capped at `budget` nodes.
    Search { budget: usize },
}

pub fn thin_decompose(
    g: &dyn CubicalCategory,
    x: Elem,
    strategy: Strategy,
) -> Result<ThinWitness, AnalysisError> {
    if !is_thin(g, x)? {
        return Err(AnalysisError::NotThin(g.label(x)));
    }
    let w = match strategy {
        Strategy::Constructive => constructive_witness(g, x)?,
        Strategy::Search { budget } => search_witness(g, x, budget)?,
    };
    debug_assert_eq!(w.eval(g).ok(), Some(x));
    Ok(w)
}

fn theta_witness(z: &Shell, core: ThinWitness, j: usize) -> ThinWitness {
    let left = ThinWitness::Degen {
        i: j,
        y: z.get(j, Sign::Minus),
    }
    .compose(
        ThinWitness::Conn {
            i: j,
            sign: Sign::Plus,
            z: z.get(j + 1, Sign::Plus),
        },
        j + 1,
    );
    let right = ThinWitness::Conn {
        i: j,
        sign: Sign::Minus,
        z: z.get(j + 1, Sign::Minus),
    }
    .compose(
        ThinWitness::Degen {
            i: j,
            y: z.get(j, Sign::Plus),
        },
        j + 1,
    );
    left.compose(core, j).compose(right, j)
}

fn constructive_witness(g: &dyn CubicalCategory, x: Elem) -> Result<ThinWitness, AnalysisError> {
    let n = x.n();
    let word = phi_word(n);
    let mut shells = vec![shell_boundary(g, x)?];
    for &j in &word {
        let next = shell_psi(g, shells.last().expect("nonempty"), j)?;
        shells.push(next);
    }
    let folded = Phi(g, n, x)?;
    let mut w = ThinWitness::Degen {
        i: 1,
        y: g.face(folded, 1, Sign::Minus)?,
    };
    for (k, &j) in word.iter().enumerate().rev() {
        w = theta_witness(&shells[k], w, j);
    }
    Ok(w)
}

/// Degeneracy and connection images in grade `n`, each with its generator.
pub fn degenerate_generators(
    g: &dyn CubicalCategory,
    n: usize,
) -> Result<Vec<(Elem, ThinWitness)>, CubicalError> {
    let mut out = Vec::new();
    if n == 0 {
        return Ok(out);
    }
    for y in g.elements(n - 1) {
        for i in 1..=n {
            out.push((g.degen(y, i)?, ThinWitness::Degen { i, y }));
        }
        for i in 1..n {
            for sign in Sign::BOTH {
                out.push((g.conn(y, i, sign)?, ThinWitness::Conn { i, sign, z: y }));
            }
        }
    }
    Ok(out)
}

fn search_witness(
    g: &dyn CubicalCategory,
    x: Elem,
    budget: usize,
) -> Result<ThinWitness, AnalysisError> {
    let n = x.n();
    let mut found: FxHashMap<Elem, ThinWitness> = FxHashMap::default();
    let mut order: Vec<Elem> = Vec::new();
    let mut queue = VecDeque::new();
    for (e, w) in degenerate_generators(g, n)? {
        if let std::collections::hash_map::Entry::Vacant(v) = found.entry(e) {
            v.insert(w);
            queue.push_back(e);
        }
    }
    let mut nodes = found.len();
    while let Some(e) = queue.pop_front() {
        if e == x {
            return Ok(found[&x].clone());
        }
        order.push(e);
        for &other in &order {
            for dir in 1..=n {
                for (a, b) in [(e, other), (other, e)] {
                    let Ok(c) = g.compose(a, b, dir) else {
                        continue;
                    };
                    nodes += 1;
                    if nodes > budget {
                        return Err(AnalysisError::Exhausted(budget));
                    }
                    if !found.contains_key(&c) {
                        let w = found[&a].clone().compose(found[&b].clone(), dir);
                        found.insert(c, w);
                        queue.push_back(c);
                    }
                }
            }
        }
    }
    Err(AnalysisError::Exhausted(budget))
}

/// `(Φ_n z)^-_1 = (Φ_n z)^+_1`.
pub fn is_commutative_shell(g: &dyn CubicalCategory, z: &Shell) -> Result<bool, EquivalenceError> {
    let w = shell_phi(g, z)?;
    Ok(w.get(1, Sign::Minus) == w.get(1, Sign::Plus))
}

/// Whether a filler takes equal values on `d^-_{n-1} I^n` and `d^+_{n-1} I^n`.
pub fn hemispheres_agree(g: &Nerve, x: Elem) -> bool {
    let n = x.n();
    let m = g.cube(n);
    let top = m.top_member();
    let h = g.hom(x);
    h.value(m.face(top, Sign::Minus, (n - 1) as u32))
        == h.value(m.face(top, Sign::Plus, (n - 1) as u32))
}

/// Counts for one grade of a nerve.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct Census {
    pub grade: usize,
    pub elements: usize,
    pub thin: usize,
    pub commutative_boundaries: usize,
    pub witness_leaves_max: usize,
}

pub fn census(g: &Nerve, n: usize) -> Result<Census, AnalysisError> {
    let mut c = Census {
        grade: n,
        elements: 0,
        thin: 0,
        commutative_boundaries: 0,
        witness_leaves_max: 0,
    };
    for x in g.elements(n) {
        c.elements += 1;
        if n >= 1 && is_commutative_shell(g, &shell_boundary(g, x)?)? {
            c.commutative_boundaries += 1;
        }
        if is_thin(g, x)? {
            c.thin += 1;
            let w = thin_decompose(g, x, Strategy::Constructive)?;
            c.witness_leaves_max = c.witness_leaves_max.max(w.leaves());
        }
    }
    Ok(c)
}

/// Thinness, witnesses and commutative shells on grades `1..=max_n`.
pub fn analysis_report(g: &Nerve, max_n: usize, budget: Option<usize>) -> Report {
    let mut r = Report::new("thin elements and commutative shells");
    let mut def = Check::new("thin iff top value has lower dimension");
    let mut wit = Check::new("thin elements are degenerate composites");
    let mut fwd = Check::new("degenerate generators are thin");
    let mut shells = Check::new("commutative shell iff hemispheres agree");
    let mut search = budget.map(|b| Check::new(format!("search finds witnesses within {b} nodes")));
    let run = (|| -> Result<(), AnalysisError> {
        for n in 1..=max_n.min(g.kmax()) {
            for x in g.elements(n) {
                let thin = is_thin(g, x)?;
                def.expect(thin == is_thin_by_dimension(g, x), || {
                    (vec![g.label(x)], format!("is_thin = {thin}"))
                });
                if thin {
                    match thin_decompose(g, x, Strategy::Constructive) {
                        Ok(w) => wit.expect(w.eval(g).ok() == Some(x), || {
                            (vec![g.label(x)], format!("{w} evaluates elsewhere"))
                        }),
                        Err(e) => wit.fail(vec![g.label(x)], e.to_string()),
                    }
                    if let (Some(chk), Some(b)) = (search.as_mut(), budget) {
                        match thin_decompose(g, x, Strategy::Search { budget: b }) {
                            Ok(w) => chk.expect(w.eval(g).ok() == Some(x), || {
                                (vec![g.label(x)], format!("{w}"))
                            }),
                            Err(e) => chk.fail(vec![g.label(x)], e.to_string()),
                        }
                    }
                }
                let comm = is_commutative_shell(g, &shell_boundary(g, x)?)?;
                shells.expect(comm == hemispheres_agree(g, x), || {
                    (vec![g.label(x)], format!("commutative = {comm}"))
                });
            }
            for (e, w) in degenerate_generators(g, n)? {
                fwd.expect(is_thin(g, e)?, || {
                    (vec![g.label(e)], format!("{w} is not thin"))
                });
            }
        }
        Ok(())
    })();
    if let Err(e) = run {
        def.fail(vec![], e.to_string());
    }
    r.push(def);
    r.push(wit);
    r.push(fwd);
    r.push(shells);
    if let Some(chk) = search {
        r.push(chk);
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::omega_pasting::m_of;
    use std::sync::Arc;

    fn nerve(shape: &str, kmax: usize) -> Nerve {
        Nerve::new(
            Arc::new(m_of(&shape.parse().unwrap()).unwrap().table().clone()),
            kmax,
        )
        .unwrap()
    }

    fn identity(g: &Nerve, n: usize) -> Elem {
        let m = g.cube(n).clone();
        let cells: Vec<u32> = (0..m.shape().cells().len())
            .map(|k| m.cell_member(k))
            .collect();
        g.find(n, &cells).unwrap()
    }

    #[test]
    fn degenerate_and_identity() {
        let g = nerve("1x1", 3);
        let id = identity(&g, 2);
        assert!(!is_thin(&g, id).unwrap());
        assert!(matches!(
            thin_decompose(&g, id, Strategy::Constructive),
            Err(AnalysisError::NotThin(_))
        ));
        assert!(!is_commutative_shell(&g, &shell_boundary(&g, id).unwrap()).unwrap());
        let y = g.elements(1)[0];
        let e = g.degen(y, 1).unwrap();
        assert!(is_thin(&g, e).unwrap());
        assert!(is_commutative_shell(&g, &shell_boundary(&g, e).unwrap()).unwrap());
        let w = thin_decompose(&g, e, Strategy::Search { budget: 10 }).unwrap();
        assert_eq!(w.leaves(), 1);
    }

    #[test]
    fn connection_cancellation_witness() {
        let g = nerve("1x1", 3);
        let z = g.elements(1)[2];
        let c = g
            .compose(
                g.conn(z, 1, Sign::Plus).unwrap(),
                g.conn(z, 1, Sign::Minus).unwrap(),
                2,
            )
            .unwrap();
        assert_eq!(c, g.degen(z, 1).unwrap());
        assert!(is_thin(&g, c).unwrap());
    }

    #[test]
    fn report_on_square() {
        let g = nerve("1x1", 3);
        let r = analysis_report(&g, 2, Some(DEFAULT_SEARCH_BUDGET));
        assert!(r.passed(), "{r}");
    }
}
