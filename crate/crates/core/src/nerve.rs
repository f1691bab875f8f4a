//! The cubical nerve `λX` of a finite ω-category: grade `n` is the set of
//! homomorphisms `M(I^n) -> X`.

use std::sync::{Arc, Mutex, OnceLock};

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::cubical_core::{check_index, CubicalCategory, CubicalError, Elem};
use crate::omega_pasting::{m_cube, m_of, MCategory, OmegaTable, Program};
use crate::path_complex::{Cell, PathProduct, Sign};
use crate::report::{Check, Report};
use crate::standard_morphisms::{doubled_cube, std_conn, std_degen, std_face, std_mu, MMorphism};

/// Default cap on the number of homomorphisms enumerated per grade.
pub const DEFAULT_HOM_CAP: usize = 500_000;

/// A homomorphism `M(K) -> X`, stored by its values on cells and on all members.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CubeHom {
    pub assignment: Vec<u32>,
    pub values: Vec<u32>,
}

impl CubeHom {
    /// Image of a member of `M(K)`.
    pub fn value(&self, member: u32) -> u32 {
        self.values[member as usize]
    }

    /// The restriction `h ∘ f` along a morphism into the domain of `h`, on cells.
    pub fn precompose(&self, f: &MMorphism) -> Vec<u32> {
        f.cell_map()
            .iter()
            .map(|&m| self.values[m as usize])
            .collect()
    }
}

fn morphism_err(e: impl std::fmt::Display) -> CubicalError {
    CubicalError::Inconsistent(e.to_string())
}

struct CellPlan {
    cell: usize,
    dim: u32,
    /// `(p, sign, program of d^sign_p σ)` for every `p < dim`.
    faces: Vec<(u32, Sign, Program)>,
}

/// Extends an assignment on cells to all members and checks the alternative witnesses.
pub fn extend_hom(
    m: &MCategory,
    x: &OmegaTable,
    assignment: Vec<u32>,
) -> Result<CubeHom, CubicalError> {
    let values = m.extend(
        |c| Ok(assignment[c]),
        |a, b, p| {
            x.compose(a, b, p).ok_or_else(|| {
                CubicalError::Inconsistent(format!(
                    "{} #{p} {} undefined in target",
                    x.label(a),
                    x.label(b)
                ))
            })
        },
    )?;
    for y in 0..m.len() as u32 {
        if let Some(crate::omega_pasting::Node::Compose(a, b, p)) = m.alt_node(y) {
            let alt = x.compose(values[a as usize], values[b as usize], p);
            if alt != Some(values[y as usize]) {
                return Err(CubicalError::Inconsistent(format!(
                    "member {} evaluates differently along its two witnesses",
                    m.label(y)
                )));
            }
        }
    }
    Ok(CubeHom { assignment, values })
}

/// Checks that an assignment on cells respects the cell relations of `M(K)`.
pub fn is_hom_assignment(m: &MCategory, x: &OmegaTable, assignment: &[u32]) -> bool {
    let shape = m.shape();
    shape.cells().iter().enumerate().all(|(c, cell)| {
        let q = cell.dim() as u32;
        let y = assignment[c];
        if x.dim(y) > q {
            return false;
        }
        (0..q).all(|p| {
            Sign::BOTH.iter().all(|&a| {
                let f = m.face(m.cell_member(c), a, p);
                m.program(f, false)
                    .eval(|k| assignment[k], |u, v, r| x.compose(u, v, r))
                    == Some(x.face(y, a, p))
            })
        })
    })
}

/// All homomorphisms `M(K) -> X` in canonical order, or an overflow error past `cap`.
pub fn enumerate_homs(
    m: &MCategory,
    x: &OmegaTable,
    cap: usize,
) -> Result<Vec<CubeHom>, CubicalError> {
    let shape = m.shape();
    let cells = shape.cells();
    let mut order: Vec<usize> = (0..cells.len()).collect();
    order.sort_by_key(|&c| (cells[c].dim(), c));
    let plans: Vec<CellPlan> = order
        .iter()
        .map(|&c| {
            let q = cells[c].dim() as u32;
            let faces = (0..q)
                .rev()
                .flat_map(|p| Sign::BOTH.into_iter().map(move |a| (p, a)))
                .map(|(p, a)| (p, a, m.program(m.face(m.cell_member(c), a, p), false)))
                .collect();
            CellPlan {
                cell: c,
                dim: q,
                faces,
            }
        })
        .collect();
    let top_q = plans.last().map_or(0, |p| p.dim);
    // candidates by dimension bound and top faces
    let mut by_faces: Vec<FxHashMap<(u32, u32), Vec<u32>>> =
        vec![FxHashMap::default(); top_q as usize + 1];
    let mut points: Vec<u32> = Vec::new();
    for y in 0..x.len() as u32 {
        let d = x.dim(y);
        if d == 0 {
            points.push(y);
        }
        for q in d.max(1)..=top_q {
            let key = (x.face(y, Sign::Minus, q - 1), x.face(y, Sign::Plus, q - 1));
            by_faces[q as usize].entry(key).or_default().push(y);
        }
    }
    let mut assignment = vec![u32::MAX; cells.len()];
    let mut out = Vec::new();
    let mut stack: Vec<(usize, Vec<u32>, usize)> = Vec::new();
    let candidates = |k: usize, assignment: &[u32]| -> Vec<u32> {
        let plan = &plans[k];
        if plan.dim == 0 {
            return points.clone();
        }
        let eval = |prog: &Program| prog.eval(|c| assignment[c], |u, v, r| x.compose(u, v, r));
        let lo = eval(&plan.faces[0].2);
        let hi = eval(&plan.faces[1].2);
        let (Some(lo), Some(hi)) = (lo, hi) else {
            return Vec::new();
        };
        let Some(list) = by_faces[plan.dim as usize].get(&(lo, hi)) else {
            return Vec::new();
        };
        let lower: Vec<(u32, Sign, Option<u32>)> = plan.faces[2..]
            .iter()
            .map(|(p, a, prog)| (*p, *a, eval(prog)))
            .collect();
        list.iter()
            .copied()
            .filter(|&y| lower.iter().all(|&(p, a, v)| v == Some(x.face(y, a, p))))
            .collect()
    };
    if plans.is_empty() {
        return Ok(vec![extend_hom(m, x, Vec::new())?]);
    }
    stack.push((0, candidates(0, &assignment), 0));
    while let Some((k, cands, pos)) = stack.last_mut() {
        let k = *k;
        if *pos >= cands.len() {
            assignment[plans[k].cell] = u32::MAX;
            stack.pop();
            continue;
        }
        assignment[plans[k].cell] = cands[*pos];
        *pos += 1;
        if k + 1 == plans.len() {
            if out.len() >= cap {
                return Err(CubicalError::Overflow(out.len()));
            }
            out.push(extend_hom(m, x, assignment.clone())?);
        } else {
            let next = candidates(k + 1, &assignment);
            stack.push((k + 1, next, 0));
        }
    }
    Ok(out)
}

struct Grade {
    m: Arc<MCategory>,
    homs: Vec<CubeHom>,
    index: FxHashMap<Vec<u32>, u32>,
    /// `[x][i-1][sign]`
    faces: Vec<u32>,
    /// `[x][i-1]`, present below the truncation bound
    degens: Vec<u32>,
    /// `[x][i-1][sign]`, present below the truncation bound
    conns: Vec<u32>,
    /// per direction: `∂^-_i` value to elements
    by_minus: Vec<FxHashMap<u32, Vec<u32>>>,
}

struct ComposeData {
    double: Arc<MCategory>,
    /// per cell of the doubled shape: `(from_right, cell index in I^n)`
    source: Vec<(bool, usize)>,
    /// per cell of `I^n`: program of `μ̌_i(σ)` over cells of the doubled shape
    programs: Vec<Program>,
}

/// The nerve `λX` truncated at grade `kmax`.
pub struct Nerve {
    target: Arc<OmegaTable>,
    kmax: usize,
    grades: Vec<Grade>,
    compose_data: Vec<Vec<OnceLock<ComposeData>>>,
    composites: Mutex<FxHashMap<(u32, u32, u32, u32), u32>>,
}

impl Nerve {
    pub fn new(target: Arc<OmegaTable>, kmax: usize) -> Result<Self, CubicalError> {
        Self::with_cap(target, kmax, DEFAULT_HOM_CAP)
    }

    pub fn with_cap(
        target: Arc<OmegaTable>,
        kmax: usize,
        cap: usize,
    ) -> Result<Self, CubicalError> {
        let mut grades = Vec::with_capacity(kmax + 1);
        for n in 0..=kmax {
            let m = m_cube(n);
            let homs = enumerate_homs(&m, &target, cap)?;
            let index = homs
                .iter()
                .enumerate()
                .map(|(k, h)| (h.assignment.clone(), k as u32))
                .collect();
            grades.push(Grade {
                m,
                homs,
                index,
                faces: Vec::new(),
                degens: Vec::new(),
                conns: Vec::new(),
                by_minus: Vec::new(),
            });
        }
        for n in 0..=kmax {
            let mut faces = Vec::new();
            let mut by_minus = vec![FxHashMap::default(); n];
            if n > 0 {
                let maps: Vec<[MMorphism; 2]> = (1..=n)
                    .map(|i| Ok([std_face(i, Sign::Minus, n)?, std_face(i, Sign::Plus, n)?]))
                    .collect::<Result<_, crate::standard_morphisms::MorphismError>>()
                    .map_err(morphism_err)?;
                for (x, h) in grades[n].homs.iter().enumerate() {
                    for (i, pair) in maps.iter().enumerate() {
                        for f in pair {
                            let y = lookup(&grades[n - 1], h.precompose(f), n - 1)?;
                            faces.push(y);
                        }
                        by_minus[i]
                            .entry(faces[faces.len() - 2])
                            .or_insert_with(Vec::new)
                            .push(x as u32);
                    }
                }
            }
            let mut degens = Vec::new();
            let mut conns = Vec::new();
            if n < kmax {
                let ds = (1..=n + 1)
                    .map(|i| std_degen(i, n + 1))
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(morphism_err)?;
                let cs = (1..=n)
                    .flat_map(|i| Sign::BOTH.into_iter().map(move |a| std_conn(i, a, n + 1)))
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(morphism_err)?;
                for h in &grades[n].homs {
                    for f in &ds {
                        degens.push(lookup(&grades[n + 1], h.precompose(f), n + 1)?);
                    }
                    for f in &cs {
                        conns.push(lookup(&grades[n + 1], h.precompose(f), n + 1)?);
                    }
                }
            }
            let g = &mut grades[n];
            g.faces = faces;
            g.degens = degens;
            g.conns = conns;
            g.by_minus = by_minus;
        }
        let compose_data = (0..=kmax)
            .map(|n| (0..n).map(|_| OnceLock::new()).collect())
            .collect();
        Ok(Nerve {
            target,
            kmax,
            grades,
            compose_data,
            composites: Mutex::new(FxHashMap::default()),
        })
    }

    /// `λ M(K)` with the default truncation `dim K + 1`.
    pub fn of_shape(shape: &PathProduct) -> Result<Self, CubicalError> {
        let m = m_of(shape).map_err(morphism_err)?;
        let t = Arc::new(m.table().clone());
        Nerve::new(t, shape.arity() + 1)
    }

    pub fn target(&self) -> &Arc<OmegaTable> {
        &self.target
    }

    pub fn hom(&self, x: Elem) -> &CubeHom {
        &self.grades[x.n()].homs[x.id as usize]
    }

    pub fn homs(&self, n: usize) -> &[CubeHom] {
        &self.grades[n].homs
    }

    /// `M(I^n)` for a grade in range.
    pub fn cube(&self, n: usize) -> &Arc<MCategory> {
        &self.grades[n].m
    }

    /// Element with the given values on the cells of `I^n`.
    pub fn find(&self, n: usize, assignment: &[u32]) -> Option<Elem> {
        self.grades
            .get(n)?
            .index
            .get(assignment)
            .map(|&k| Elem::new(n, k as usize))
    }

    /// The identity-like element sending each cell of `I^n` to a member of the target.
    pub fn element_from_cells(&self, n: usize, f: impl Fn(&Cell) -> u32) -> Option<Elem> {
        let a: Vec<u32> = PathProduct::cube(n).cells().iter().map(f).collect();
        self.find(n, &a)
    }

    /// `x ∘ f` for a morphism `f: M(I^k) -> M(I^n)`.
    pub fn precompose(&self, x: Elem, f: &MMorphism) -> Result<Elem, CubicalError> {
        let k = f.source().shape().arity();
        if f.target().shape() != &PathProduct::cube(x.n()) || !f.source().shape().is_cube() {
            return Err(CubicalError::GradeMismatch(format!(
                "morphism does not act on grade {}",
                x.n()
            )));
        }
        self.bound(k)?;
        lookup(&self.grades[k], self.hom(x).precompose(f), k).map(|z| Elem::new(k, z as usize))
    }

    fn bound(&self, n: usize) -> Result<(), CubicalError> {
        if n > self.kmax {
            Err(CubicalError::BeyondTruncation {
                grade: n,
                kmax: self.kmax,
            })
        } else {
            Ok(())
        }
    }

    fn valid(&self, x: Elem) -> Result<(), CubicalError> {
        self.bound(x.n())?;
        if x.id as usize >= self.grades[x.n()].homs.len() {
            return Err(CubicalError::UnknownElement(x));
        }
        Ok(())
    }

    fn compose_data(&self, n: usize, i: usize) -> Result<&ComposeData, CubicalError> {
        if let Some(d) = self.compose_data[n][i - 1].get() {
            return Ok(d);
        }
        let shape = doubled_cube(i, n);
        let double = m_of(&shape).map_err(morphism_err)?;
        let cube = PathProduct::cube(n);
        let source = shape
            .cells()
            .iter()
            .map(|c| {
                let mut v = c.0.clone();
                let right = v[i - 1] > 2;
                if right {
                    v[i - 1] -= 2;
                }
                (right, cube.index_of(&Cell(v)))
            })
            .collect();
        let mu = std_mu(i, n).map_err(morphism_err)?;
        let programs = mu
            .cell_map()
            .iter()
            .map(|&t| double.program(t, false))
            .collect();
        let data = ComposeData {
            double,
            source,
            programs,
        };
        Ok(self.compose_data[n][i - 1].get_or_init(|| data))
    }

    /// The homomorphism on `M(I^{i-1} x [0,2] x I^{n-i})` restricting to `x` and `y`.
    pub fn amalgamate(
        &self,
        x: Elem,
        y: Elem,
        i: usize,
    ) -> Result<(Arc<MCategory>, CubeHom), CubicalError> {
        self.check_composable(x, y, i)?;
        let data = self.compose_data(x.n(), i)?;
        let (hx, hy) = (self.hom(x), self.hom(y));
        let assignment: Vec<u32> = data
            .source
            .iter()
            .map(|&(right, c)| {
                if right {
                    hy.assignment[c]
                } else {
                    hx.assignment[c]
                }
            })
            .collect();
        let h = extend_hom(&data.double, &self.target, assignment)?;
        Ok((data.double.clone(), h))
    }

    fn check_composable(&self, x: Elem, y: Elem, i: usize) -> Result<(), CubicalError> {
        self.valid(x)?;
        self.valid(y)?;
        if x.grade != y.grade {
            return Err(CubicalError::GradeMismatch(format!("{x} and {y}")));
        }
        check_index("composition", i, 1, x.n(), x.n())?;
        if self.face(x, i, Sign::Plus)? != self.face(y, i, Sign::Minus)? {
            return Err(CubicalError::NotComposable {
                dir: i,
                left: x,
                right: y,
            });
        }
        Ok(())
    }

    /// Elements of grade `n` as a document keyed by member index.
    pub fn to_document(&self) -> NerveDocument {
        NerveDocument {
            target: self.target.labels().to_vec(),
            kmax: self.kmax,
            grades: self
                .grades
                .iter()
                .enumerate()
                .map(|(n, g)| GradeDoc {
                    n,
                    homs: g.homs.iter().map(|h| h.assignment.clone()).collect(),
                    faces: g.faces.clone(),
                    degeneracies: g.degens.clone(),
                    connections: g.conns.clone(),
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_document()).expect("nerve serializes")
    }
}

fn lookup(g: &Grade, assignment: Vec<u32>, n: usize) -> Result<u32, CubicalError> {
    g.index.get(&assignment).copied().ok_or_else(|| {
        CubicalError::Inconsistent(format!(
            "induced map on grade {n} is not an enumerated homomorphism"
        ))
    })
}

impl CubicalCategory for Nerve {
    fn kmax(&self) -> usize {
        self.kmax
    }

    fn grade_size(&self, n: usize) -> usize {
        self.grades.get(n).map_or(0, |g| g.homs.len())
    }

    fn face(&self, x: Elem, i: usize, a: Sign) -> Result<Elem, CubicalError> {
        self.valid(x)?;
        let n = x.n();
        check_index("face", i, 1, n, n)?;
        let k = (x.id as usize * n + i - 1) * 2 + a.index();
        Ok(Elem::new(n - 1, self.grades[n].faces[k] as usize))
    }

    fn degen(&self, x: Elem, i: usize) -> Result<Elem, CubicalError> {
        self.valid(x)?;
        let n = x.n();
        check_index("degeneracy", i, 1, n + 1, n)?;
        self.bound(n + 1)?;
        let k = x.id as usize * (n + 1) + i - 1;
        Ok(Elem::new(n + 1, self.grades[n].degens[k] as usize))
    }

    fn conn(&self, x: Elem, i: usize, a: Sign) -> Result<Elem, CubicalError> {
        self.valid(x)?;
        let n = x.n();
        check_index("connection", i, 1, n, n)?;
        self.bound(n + 1)?;
        let k = (x.id as usize * n + i - 1) * 2 + a.index();
        Ok(Elem::new(n + 1, self.grades[n].conns[k] as usize))
    }

    fn compose(&self, x: Elem, y: Elem, i: usize) -> Result<Elem, CubicalError> {
        self.check_composable(x, y, i)?;
        let key = (x.grade, x.id, y.id, i as u32);
        if let Some(&z) = self.composites.lock().expect("composite cache").get(&key) {
            return Ok(Elem::new(x.n(), z as usize));
        }
        let data = self.compose_data(x.n(), i)?;
        let (hx, hy) = (self.hom(x), self.hom(y));
        let cell = |c: usize| {
            let (right, k) = data.source[c];
            if right {
                hy.assignment[k]
            } else {
                hx.assignment[k]
            }
        };
        let t = &self.target;
        let assignment = data
            .programs
            .iter()
            .map(|p| {
                p.eval(cell, |u, v, r| t.compose(u, v, r)).ok_or_else(|| {
                    CubicalError::Inconsistent("amalgamated map is not a homomorphism".into())
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let z = lookup(&self.grades[x.n()], assignment, x.n())?;
        self.composites
            .lock()
            .expect("composite cache")
            .insert(key, z);
        Ok(Elem::new(x.n(), z as usize))
    }

    fn label(&self, x: Elem) -> String {
        match self
            .grades
            .get(x.n())
            .and_then(|g| g.homs.get(x.id as usize))
        {
            Some(h) => {
                let top = self.grades[x.n()].m.top_member();
                format!("{x}<{}>", self.target.label(h.value(top)))
            }
            None => x.to_string(),
        }
    }

    fn right_partners(&self, x: Elem, i: usize) -> Result<Vec<Elem>, CubicalError> {
        let f = self.face(x, i, Sign::Plus)?;
        Ok(self.grades[x.n()].by_minus[i - 1]
            .get(&f.id)
            .map(|v| v.iter().map(|&y| Elem::new(x.n(), y as usize)).collect())
            .unwrap_or_default())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradeDoc {
    pub n: usize,
    /// values on the cells of `I^n`, in cell order, as target member indices
    pub homs: Vec<Vec<u32>>,
    pub faces: Vec<u32>,
    pub degeneracies: Vec<u32>,
    pub connections: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NerveDocument {
    pub target: Vec<String>,
    pub kmax: usize,
    pub grades: Vec<GradeDoc>,
}

/// `λf` for a map `f` of targets given on elements: applied to each grade.
pub fn nerve_map(
    source: &Nerve,
    target: &Nerve,
    f: impl Fn(u32) -> u32,
) -> Result<Vec<Vec<u32>>, CubicalError> {
    (0..=source.kmax.min(target.kmax))
        .map(|n| {
            source
                .homs(n)
                .iter()
                .map(|h| {
                    lookup(
                        &target.grades[n],
                        h.assignment.iter().map(|&v| f(v)).collect(),
                        n,
                    )
                })
                .collect()
        })
        .collect()
}

/// Checks that `λf` commutes with faces, degeneracies, connections and composites.
pub fn check_nerve_map(source: &Nerve, target: &Nerve, f: impl Fn(u32) -> u32) -> Report {
    let mut report = Report::new("nerve functoriality");
    let mut c = Check::new("nerve.map commutes with operations");
    let map = match nerve_map(source, target, f) {
        Ok(m) => m,
        Err(e) => {
            c.fail(vec![], e.to_string());
            report.push(c);
            return report;
        }
    };
    let kmax = source.kmax.min(target.kmax);
    let fm = |x: Elem| Elem::new(x.n(), map[x.n()][x.id as usize] as usize);
    for n in 0..=kmax {
        for x in source.elements(n) {
            let w = || vec![source.label(x)];
            for i in 1..=n {
                for a in Sign::BOTH {
                    let ok = source.face(x, i, a).map(fm).ok() == target.face(fm(x), i, a).ok();
                    c.expect(ok, || (w(), format!("face {i}{a}")));
                    if n < kmax {
                        let ok = source.conn(x, i, a).map(fm).ok() == target.conn(fm(x), i, a).ok();
                        c.expect(ok, || (w(), format!("connection {i}{a}")));
                    }
                }
            }
            if n < kmax {
                for i in 1..=n + 1 {
                    let ok = source.degen(x, i).map(fm).ok() == target.degen(fm(x), i).ok();
                    c.expect(ok, || (w(), format!("degeneracy {i}")));
                }
            }
            for i in 1..=n {
                if let Ok(ys) = source.right_partners(x, i) {
                    for y in ys {
                        let ok = source.compose(x, y, i).map(fm).ok()
                            == target.compose(fm(x), fm(y), i).ok();
                        c.expect(ok, || {
                            (
                                vec![source.label(x), source.label(y)],
                                format!("composite {i}"),
                            )
                        });
                    }
                }
            }
        }
    }
    report.push(c);
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cubical_core::{check_cubical_axioms, SampleConfig};

    fn table(shape: &str) -> Arc<OmegaTable> {
        Arc::new(m_of(&shape.parse().unwrap()).unwrap().table().clone())
    }

    #[test]
    fn small_enumerations() {
        let x = table("1");
        assert_eq!(enumerate_homs(&m_cube(0), &x, 10).unwrap().len(), 2);
        assert_eq!(enumerate_homs(&m_cube(1), &x, 10).unwrap().len(), 3);
        assert_eq!(enumerate_homs(&m_cube(1), &table(""), 10).unwrap().len(), 1);
        assert_eq!(
            enumerate_homs(&m_cube(2), &x, 2),
            Err(CubicalError::Overflow(2))
        );
    }

    #[test]
    fn nerve_of_interval() {
        let g = Nerve::new(table("1"), 3).unwrap();
        assert_eq!(g.grade_size(0), 2);
        assert_eq!(g.grade_size(1), 3);
        let r = check_cubical_axioms(&g, &SampleConfig::default());
        assert!(r.passed(), "{r}");
    }

    #[test]
    fn enumerated_maps_are_homs() {
        let m = m_cube(2);
        let x = table("1x1");
        for h in enumerate_homs(&m, &x, 10_000).unwrap() {
            assert!(is_hom_assignment(&m, &x, &h.assignment));
        }
    }
}
