//! Path categories, reversal, internal homs by enumeration, and the tensor
//! relations for products of cubes.

use std::collections::BTreeSet;
use std::sync::Arc;

use rustc_hash::FxHashMap;

use crate::cubical_core::{
    check_cubical_axioms, check_index, check_morphism, CubicalCategory, CubicalError, Elem,
    SampleConfig,
};
use crate::nerve::{nerve_map, Nerve, DEFAULT_HOM_CAP};
use crate::omega_pasting::{m_cube, product_member, MCategory};
use crate::path_complex::{Cell, PathProduct, Sign};
use crate::report::{Check, Report};
use crate::standard_morphisms::base_mu;

/// `P^n H`: grade `r` is `H_{n+r}`, operations shifted by `n`.
pub struct PathCategory<'a> {
    base: &'a dyn CubicalCategory,
    shift: usize,
}

pub fn path_cat(base: &dyn CubicalCategory, shift: usize) -> PathCategory<'_> {
    assert!(
        shift <= base.kmax(),
        "shift {shift} exceeds truncation {}",
        base.kmax()
    );
    PathCategory { base, shift }
}

impl PathCategory<'_> {
    pub fn lift(&self, x: Elem) -> Elem {
        Elem::new(x.n() + self.shift, x.id as usize)
    }

    pub fn lower(&self, x: Elem) -> Elem {
        Elem::new(x.n() - self.shift, x.id as usize)
    }

    pub fn shift(&self) -> usize {
        self.shift
    }
}

impl CubicalCategory for PathCategory<'_> {
    fn kmax(&self) -> usize {
        self.base.kmax() - self.shift
    }

    fn grade_size(&self, n: usize) -> usize {
        self.base.grade_size(n + self.shift)
    }

    fn face(&self, x: Elem, i: usize, a: Sign) -> Result<Elem, CubicalError> {
        check_index("face", i, 1, x.n(), x.n())?;
        Ok(self.lower(self.base.face(self.lift(x), self.shift + i, a)?))
    }

    fn degen(&self, x: Elem, i: usize) -> Result<Elem, CubicalError> {
        check_index("degeneracy", i, 1, x.n() + 1, x.n())?;
        Ok(self.lower(self.base.degen(self.lift(x), self.shift + i)?))
    }

    fn conn(&self, x: Elem, i: usize, a: Sign) -> Result<Elem, CubicalError> {
        check_index("connection", i, 1, x.n(), x.n())?;
        Ok(self.lower(self.base.conn(self.lift(x), self.shift + i, a)?))
    }

    fn compose(&self, x: Elem, y: Elem, i: usize) -> Result<Elem, CubicalError> {
        check_index("composition", i, 1, x.n(), x.n())?;
        Ok(self.lower(
            self.base
                .compose(self.lift(x), self.lift(y), self.shift + i)?,
        ))
    }

    fn label(&self, x: Elem) -> String {
        self.base.label(self.lift(x))
    }
}

/// How connections are renumbered under reversal.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConnConvention {
    SignPreserved,
    SignSwapped,
}

/// `TH`: same elements, directions numbered in reverse order.
pub struct Reverse<'a> {
    base: &'a dyn CubicalCategory,
    convention: ConnConvention,
}

pub fn reverse(base: &dyn CubicalCategory, convention: ConnConvention) -> Reverse<'_> {
    Reverse { base, convention }
}

impl Reverse<'_> {
    pub fn convention(&self) -> ConnConvention {
        self.convention
    }
}

impl CubicalCategory for Reverse<'_> {
    fn kmax(&self) -> usize {
        self.base.kmax()
    }

    fn grade_size(&self, n: usize) -> usize {
        self.base.grade_size(n)
    }

    fn face(&self, x: Elem, i: usize, a: Sign) -> Result<Elem, CubicalError> {
        check_index("face", i, 1, x.n(), x.n())?;
        self.base.face(x, x.n() + 1 - i, a)
    }

    fn degen(&self, x: Elem, i: usize) -> Result<Elem, CubicalError> {
        check_index("degeneracy", i, 1, x.n() + 1, x.n())?;
        self.base.degen(x, x.n() + 2 - i)
    }

    fn conn(&self, x: Elem, i: usize, a: Sign) -> Result<Elem, CubicalError> {
        check_index("connection", i, 1, x.n(), x.n())?;
        let a = match self.convention {
            ConnConvention::SignPreserved => a,
            ConnConvention::SignSwapped => a.flip(),
        };
        self.base.conn(x, x.n() + 1 - i, a)
    }

    fn compose(&self, x: Elem, y: Elem, i: usize) -> Result<Elem, CubicalError> {
        check_index("composition", i, 1, x.n(), x.n())?;
        self.base.compose(x, y, x.n() + 1 - i)
    }

    fn label(&self, x: Elem) -> String {
        self.base.label(x)
    }
}

/// The reversal whose connection convention passes the axiom auditor, with both audits.
pub fn reverse_audited<'a>(
    base: &'a dyn CubicalCategory,
    cfg: &SampleConfig,
) -> (Option<Reverse<'a>>, Vec<(ConnConvention, Report)>) {
    let mut audits = Vec::new();
    for convention in [ConnConvention::SignPreserved, ConnConvention::SignSwapped] {
        let t = reverse(base, convention);
        let r = check_cubical_axioms(&t, cfg);
        let ok = r.passed();
        audits.push((convention, r));
        if ok {
            return (Some(t), audits);
        }
    }
    (None, audits)
}

/// A morphism `G -> P^m H`: for each grade `r`, the images of `G_r` in `H_{r+m}`.
pub type HomMap = Vec<Vec<Elem>>;

/// All cubical morphisms `g -> h` on the common truncation, up to `cap`.
pub fn enumerate_morphisms(
    g: &dyn CubicalCategory,
    h: &dyn CubicalCategory,
    cap: usize,
) -> Result<Vec<HomMap>, CubicalError> {
    let top = g.kmax().min(h.kmax());
    let mut by_faces: Vec<FxHashMap<Vec<Elem>, Vec<Elem>>> = Vec::new();
    for r in 0..=top {
        let mut idx: FxHashMap<Vec<Elem>, Vec<Elem>> = FxHashMap::default();
        for c in h.elements(r) {
            idx.entry(faces_of(h, c)?).or_default().push(c);
        }
        by_faces.push(idx);
    }
    // forced[r][x]: (source, op) pairs with op(source) = x
    let mut forced: Vec<Vec<Vec<(Elem, Forcing)>>> = vec![Vec::new()];
    forced[0] = vec![Vec::new(); g.grade_size(0)];
    for r in 1..=top {
        let mut row = vec![Vec::new(); g.grade_size(r)];
        for y in g.elements(r - 1) {
            for i in 1..=r {
                row[g.degen(y, i)?.id as usize].push((y, Forcing::Degen(i)));
            }
            for i in 1..r {
                for a in Sign::BOTH {
                    row[g.conn(y, i, a)?.id as usize].push((y, Forcing::Conn(i, a)));
                }
            }
        }
        forced.push(row);
    }
    let mut st = Search {
        g,
        h,
        top,
        by_faces,
        forced,
        out: Vec::new(),
        cap,
        cur: vec![Vec::new(); top + 1],
    };
    st.grade(0)?;
    Ok(st.out)
}

#[derive(Clone, Copy, Debug)]
enum Forcing {
    Degen(usize),
    Conn(usize, Sign),
}

fn faces_of(g: &dyn CubicalCategory, x: Elem) -> Result<Vec<Elem>, CubicalError> {
    let mut v = Vec::with_capacity(2 * x.n());
    for i in 1..=x.n() {
        for a in Sign::BOTH {
            v.push(g.face(x, i, a)?);
        }
    }
    Ok(v)
}

struct Search<'a> {
    g: &'a dyn CubicalCategory,
    h: &'a dyn CubicalCategory,
    top: usize,
    by_faces: Vec<FxHashMap<Vec<Elem>, Vec<Elem>>>,
    forced: Vec<Vec<Vec<(Elem, Forcing)>>>,
    out: Vec<HomMap>,
    cap: usize,
    cur: HomMap,
}

impl Search<'_> {
    fn grade(&mut self, r: usize) -> Result<(), CubicalError> {
        if r > self.top {
            if self.out.len() >= self.cap {
                return Err(CubicalError::Overflow(self.cap));
            }
            self.out.push(self.cur.clone());
            return Ok(());
        }
        self.cur[r].clear();
        self.element(r, 0)
    }

    fn element(&mut self, r: usize, k: usize) -> Result<(), CubicalError> {
        let (g, h) = (self.g, self.h);
        if k == g.grade_size(r) {
            if self.compositions_hold(r)? {
                self.grade(r + 1)?;
            }
            return Ok(());
        }
        let x = Elem::new(r, k);
        let mut key = Vec::with_capacity(2 * r);
        for i in 1..=r {
            for a in Sign::BOTH {
                let f = g.face(x, i, a)?;
                key.push(self.cur[r - 1][f.id as usize]);
            }
        }
        let mut candidates = self.by_faces[r].get(&key).cloned().unwrap_or_default();
        for &(y, op) in &self.forced[r][k] {
            let fy = self.cur[r - 1][y.id as usize];
            let v = match op {
                Forcing::Degen(i) => h.degen(fy, i)?,
                Forcing::Conn(i, a) => h.conn(fy, i, a)?,
            };
            candidates.retain(|&c| c == v);
        }
        for c in candidates {
            self.cur[r].push(c);
            self.element(r, k + 1)?;
            self.cur[r].pop();
        }
        Ok(())
    }

    fn compositions_hold(&self, r: usize) -> Result<bool, CubicalError> {
        let f = |x: Elem| self.cur[r][x.id as usize];
        for x in self.g.elements(r) {
            for i in 1..=r {
                for y in self.g.right_partners(x, i)? {
                    let z = self.g.compose(x, y, i)?;
                    if self.h.compose(f(x), f(y), i).ok() != Some(f(z)) {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }
}

/// Grades `0..=m_max` of the internal hom, as morphisms `G -> P^m H`.
pub struct InternalHom {
    pub grades: Vec<Vec<HomMap>>,
}

pub fn internal_hom(
    g: &dyn CubicalCategory,
    h: &dyn CubicalCategory,
    m_max: usize,
    cap: usize,
) -> Result<InternalHom, CubicalError> {
    let grades = (0..=m_max.min(h.kmax()))
        .map(|m| enumerate_morphisms(g, &path_cat(h, m), cap))
        .collect::<Result<_, _>>()?;
    Ok(InternalHom { grades })
}

/// `∂^a_i f` for a morphism `f: G -> P^m H` and `i <= m`, as a map into `P^{m-1} H`.
pub fn hom_face(
    h: &dyn CubicalCategory,
    f: &HomMap,
    m: usize,
    i: usize,
    a: Sign,
) -> Result<HomMap, CubicalError> {
    check_index("face", i, 1, m, m)?;
    f.iter()
        .enumerate()
        .map(|(r, row)| {
            row.iter()
                .map(|&y| {
                    Ok(Elem::new(
                        r,
                        h.face(Elem::new(r + m, y.id as usize), i, a)?.id as usize,
                    ))
                })
                .collect()
        })
        .collect()
}

/// `G` cut down to grades `0..=kmax`.
struct Truncation<'a> {
    base: &'a dyn CubicalCategory,
    kmax: usize,
}

impl CubicalCategory for Truncation<'_> {
    fn kmax(&self) -> usize {
        self.kmax
    }

    fn grade_size(&self, n: usize) -> usize {
        self.base.grade_size(n)
    }

    fn face(&self, x: Elem, i: usize, a: Sign) -> Result<Elem, CubicalError> {
        self.base.face(x, i, a)
    }

    fn degen(&self, x: Elem, i: usize) -> Result<Elem, CubicalError> {
        self.beyond(x.n() + 1)?;
        self.base.degen(x, i)
    }

    fn conn(&self, x: Elem, i: usize, a: Sign) -> Result<Elem, CubicalError> {
        self.beyond(x.n() + 1)?;
        self.base.conn(x, i, a)
    }

    fn compose(&self, x: Elem, y: Elem, i: usize) -> Result<Elem, CubicalError> {
        self.base.compose(x, y, i)
    }

    fn label(&self, x: Elem) -> String {
        self.base.label(x)
    }
}

impl Truncation<'_> {
    fn beyond(&self, grade: usize) -> Result<(), CubicalError> {
        if grade > self.kmax {
            return Err(CubicalError::BeyondTruncation {
                grade,
                kmax: self.kmax,
            });
        }
        Ok(())
    }
}

/// Faces of homotopies are morphisms into the lower path category.
pub fn internal_hom_report(
    g: &dyn CubicalCategory,
    h: &dyn CubicalCategory,
    hom: &InternalHom,
    cfg: &SampleConfig,
) -> Report {
    let mut r = Report::new("internal hom");
    for (m, maps) in hom.grades.iter().enumerate().skip(1) {
        let mut c = Check::new(format!("faces of grade {m} homotopies are morphisms"));
        let lower = path_cat(h, m - 1);
        for f in maps {
            let source = Truncation {
                base: g,
                kmax: f.len() - 1,
            };
            for i in 1..=m {
                for a in Sign::BOTH {
                    match hom_face(h, f, m, i, a) {
                        Ok(d) => {
                            let sub = check_morphism(
                                &source,
                                &lower,
                                |x| d.get(x.n()).and_then(|row| row.get(x.id as usize)).copied(),
                                cfg,
                                "face",
                            );
                            c.expect(sub.status() != crate::report::Status::Fail, || {
                                (vec![format!("face {i}{a}")], "not a morphism".into())
                            });
                        }
                        Err(e) => c.fail(vec![], e.to_string()),
                    }
                }
            }
        }
        r.push(c);
    }
    r
}

/// The bimorphism `χ(x, y) = x × y` from `λM(I^m)` and `λM(I^n)` into `λM(I^{m+n})`.
pub struct CubeTensor {
    pub left: Nerve,
    pub right: Nerve,
    pub target: Nerve,
    ml: Arc<MCategory>,
    mr: Arc<MCategory>,
    mt: Arc<MCategory>,
}

impl CubeTensor {
    pub fn new(m: usize, n: usize, kmax: usize) -> Result<Self, CubicalError> {
        let (ml, mr, mt) = (m_cube(m), m_cube(n), m_cube(m + n));
        let nerve = |c: &Arc<MCategory>| Nerve::new(Arc::new(c.table().clone()), kmax);
        Ok(CubeTensor {
            left: nerve(&ml)?,
            right: nerve(&mr)?,
            target: nerve(&mt)?,
            ml,
            mr,
            mt,
        })
    }

    /// `χ(x, y)`, or `None` when the product assignment is not in the target nerve.
    pub fn chi(&self, x: Elem, y: Elem) -> Result<Option<Elem>, CubicalError> {
        let (p, q) = (x.n(), y.n());
        if p + q > self.target.kmax() {
            return Err(CubicalError::BeyondTruncation {
                grade: p + q,
                kmax: self.target.kmax(),
            });
        }
        let (cp, cq) = (self.left.cube(p), self.right.cube(q));
        let (hx, hy) = (self.left.hom(x), self.right.hom(y));
        let mut assignment = Vec::new();
        for c in PathProduct::cube(p + q).cells() {
            let (a, b) = c.components().split_at(p);
            let vx = hx.value(cp.cell_member_of(&Cell(a.to_vec())));
            let vy = hy.value(cq.cell_member_of(&Cell(b.to_vec())));
            let v = product_member(&self.ml, vx, &self.mr, vy, &self.mt)
                .map_err(|e| CubicalError::Inconsistent(e.to_string()))?;
            assignment.push(v);
        }
        Ok(self.target.find(p + q, &assignment))
    }
}

fn relation(
    c: &mut Check,
    lhs: Result<Option<Elem>, CubicalError>,
    rhs: Result<Option<Elem>, CubicalError>,
    w: impl FnOnce() -> Vec<String>,
) {
    match (lhs, rhs) {
        (Err(e), _) | (_, Err(e)) if e.is_truncation() => c.skip(),
        (Ok(Some(l)), Ok(Some(r))) => c.expect(l == r, || (w(), format!("{l} != {r}"))),
        (l, r) => c.fail(w(), format!("{l:?} vs {r:?}")),
    }
}

/// The tensor relations for `χ` and generation of `M(I^{m+n})` by products of cells.
pub fn tensor_cells_check(m: usize, n: usize, kmax: usize) -> Result<Report, CubicalError> {
    let t = CubeTensor::new(m, n, kmax)?;
    let (f, g, a) = (&t.left, &t.right, &t.target);
    let mut r = Report::new(format!("tensor relations for {m} and {n}"));
    let mut faces = Check::new("tensor faces");
    let mut degens = Check::new("tensor degeneracies");
    let mut conns = Check::new("tensor connections");
    let mut left = Check::new("tensor composition on the left");
    let mut right = Check::new("tensor composition on the right");
    let mut middle = Check::new("tensor middle degeneracy");
    let mut defined = Check::new("chi lands in the target nerve");
    let chi = |x: Elem, y: Elem| t.chi(x, y);
    let chi_of = |x: Result<Elem, CubicalError>,
                  y: Result<Elem, CubicalError>|
     -> Result<Option<Elem>, CubicalError> { chi(x?, y?) };
    let on = |z: Result<Option<Elem>, CubicalError>,
              op: &dyn Fn(Elem) -> Result<Elem, CubicalError>|
     -> Result<Option<Elem>, CubicalError> {
        match z? {
            Some(z) => op(z).map(Some),
            None => Ok(None),
        }
    };
    for p in 0..=kmax {
        for q in 0..=kmax - p {
            for x in f.elements(p) {
                for y in g.elements(q) {
                    let xy = chi(x, y);
                    let w = || vec![f.label(x), g.label(y)];
                    defined.expect(matches!(xy, Ok(Some(_))), || (w(), format!("{xy:?}")));
                    let nn = p + q;
                    for i in 1..=nn {
                        for s in Sign::BOTH {
                            let rhs = if i <= p {
                                chi_of(f.face(x, i, s), Ok(y))
                            } else {
                                chi_of(Ok(x), g.face(y, i - p, s))
                            };
                            relation(&mut faces, on(xy.clone(), &|z| a.face(z, i, s)), rhs, w);
                            let rhs = if i <= p {
                                chi_of(f.conn(x, i, s), Ok(y))
                            } else {
                                chi_of(Ok(x), g.conn(y, i - p, s))
                            };
                            relation(&mut conns, on(xy.clone(), &|z| a.conn(z, i, s)), rhs, w);
                        }
                    }
                    for i in 1..=nn + 1 {
                        let lhs = on(xy.clone(), &|z| a.degen(z, i));
                        if i <= p + 1 {
                            relation(&mut degens, lhs.clone(), chi_of(f.degen(x, i), Ok(y)), w);
                        }
                        if i >= p + 1 {
                            relation(&mut degens, lhs, chi_of(Ok(x), g.degen(y, i - p)), w);
                        }
                    }
                    relation(
                        &mut middle,
                        chi_of(f.degen(x, p + 1), Ok(y)),
                        chi_of(Ok(x), g.degen(y, 1)),
                        w,
                    );
                    for i in 1..=p {
                        for x2 in f.right_partners(x, i)? {
                            let lhs = chi_of(f.compose(x, x2, i), Ok(y));
                            let rhs = (|| match (chi(x, y)?, chi(x2, y)?) {
                                (Some(u), Some(v)) => a.compose(u, v, i).map(Some),
                                _ => Ok(None),
                            })();
                            relation(&mut left, lhs, rhs, || {
                                vec![f.label(x), f.label(x2), g.label(y)]
                            });
                        }
                    }
                    for j in 1..=q {
                        for y2 in g.right_partners(y, j)? {
                            let lhs = chi_of(Ok(x), g.compose(y, y2, j));
                            let rhs = (|| match (chi(x, y)?, chi(x, y2)?) {
                                (Some(u), Some(v)) => a.compose(u, v, p + j).map(Some),
                                _ => Ok(None),
                            })();
                            relation(&mut right, lhs, rhs, || {
                                vec![f.label(x), g.label(y), g.label(y2)]
                            });
                        }
                    }
                }
            }
        }
    }
    for c in [defined, faces, degens, conns, left, right, middle] {
        r.push(c);
    }
    r.push(generation_check(&t.ml, &t.mr, &t.mt));
    Ok(r)
}

/// Products of cells are exactly the cells of the product, and they generate every member.
pub fn generation_check(ml: &MCategory, mr: &MCategory, mt: &MCategory) -> Check {
    let mut c = Check::new("products of cells generate the product");
    let mut seed = BTreeSet::new();
    for a in ml.shape().cells() {
        for b in mr.shape().cells() {
            match product_member(ml, ml.cell_member_of(&a), mr, mr.cell_member_of(&b), mt) {
                Ok(v) => {
                    seed.insert(v);
                }
                Err(e) => c.fail(vec![a.to_string(), b.to_string()], e.to_string()),
            }
        }
    }
    let cells: BTreeSet<u32> = (0..mt.shape().cells().len())
        .map(|k| mt.cell_member(k))
        .collect();
    c.expect(seed == cells, || {
        (
            vec![],
            format!("{} products, {} cells", seed.len(), cells.len()),
        )
    });
    let t = mt.table();
    let mut closure = seed.clone();
    let mut frontier: Vec<u32> = seed.into_iter().collect();
    while let Some(e) = frontier.pop() {
        let known: Vec<u32> = closure.iter().copied().collect();
        for o in known {
            for p in 0..t.top() {
                for z in [t.compose(e, o, p), t.compose(o, e, p)]
                    .into_iter()
                    .flatten()
                {
                    if closure.insert(z) {
                        frontier.push(z);
                    }
                }
            }
        }
    }
    c.expect(closure.len() == mt.len(), || {
        (
            vec![],
            format!("closure has {} of {} members", closure.len(), mt.len()),
        )
    });
    c
}

/// Path and reversal views of a nerve: reindexing, axioms, involution, functoriality.
pub fn views_report(h: &Nerve, cfg: &SampleConfig) -> Result<Report, CubicalError> {
    let mut r = Report::new("path and reversal views");
    let p1 = path_cat(h, 1);
    let mut reindex = Check::new("path view reindexes operations");
    reindex.expect(p1.grade_size(0) == h.grade_size(1), || {
        (vec![], "grade 0 differs from grade 1".into())
    });
    for x in p1.elements(1) {
        for a in Sign::BOTH {
            let ok = p1.lift(p1.face(x, 1, a)?) == h.face(p1.lift(x), 2, a)?;
            reindex.expect(ok, || (vec![p1.label(x)], format!("face 1{a}")));
        }
    }
    r.push(reindex);
    let mut ax = check_cubical_axioms(&p1, cfg);
    ax.checks
        .iter_mut()
        .for_each(|c| c.id = format!("path {}", c.id));
    r.extend(ax);
    let (t, audits) = reverse_audited(h, cfg);
    let mut conv = Check::new("reversal passes the axiom auditor");
    match &t {
        Some(t) => {
            conv.pass();
            conv = conv.with_note(format!("{:?}", t.convention()));
        }
        None => conv.fail(vec![], "no connection convention passes"),
    }
    for (convention, rep) in &audits {
        for f in rep.failures() {
            conv = conv.with_note(format!("{convention:?}: {}", f.id));
        }
    }
    r.push(conv);
    if let Some(t) = &t {
        let tt = reverse(t, t.convention());
        let id = Some;
        let c = check_morphism(&tt, h, id, cfg, "reversal is an involution");
        r.push(c);
        let mut d = Check::new("reversal reindexes faces");
        for x in h.elements(2) {
            for a in Sign::BOTH {
                d.expect(t.face(x, 1, a)? == h.face(x, 2, a)?, || {
                    (vec![h.label(x)], format!("face 1{a}"))
                });
            }
        }
        r.push(d);
    }
    Ok(r)
}

/// `P^1` applied to the nerve of `μ̌: M(I) -> M([0,2])` is a morphism.
pub fn path_functoriality(kmax: usize, cfg: &SampleConfig) -> Result<Check, CubicalError> {
    let f = base_mu().map_err(|e| CubicalError::Inconsistent(e.to_string()))?;
    let fx = f
        .total()
        .map_err(|e| CubicalError::Inconsistent(e.to_string()))?
        .to_vec();
    let lx = Nerve::new(Arc::new(f.source().table().clone()), kmax)?;
    let ly = Nerve::new(Arc::new(f.target().table().clone()), kmax)?;
    let lf = nerve_map(&lx, &ly, |v| fx[v as usize])?;
    let (px, py) = (path_cat(&lx, 1), path_cat(&ly, 1));
    let map = |x: Elem| {
        lf.get(x.n() + 1)
            .and_then(|row| row.get(x.id as usize))
            .map(|&v| Elem::new(x.n(), v as usize))
    };
    Ok(check_morphism(
        &px,
        &py,
        map,
        cfg,
        "path view is functorial",
    ))
}

/// Default enumeration cap for internal homs.
pub const DEFAULT_INTERNAL_HOM_CAP: usize = DEFAULT_HOM_CAP;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::omega_pasting::m_of;

    fn nerve(shape: &str, kmax: usize) -> Nerve {
        Nerve::new(
            Arc::new(m_of(&shape.parse().unwrap()).unwrap().table().clone()),
            kmax,
        )
        .unwrap()
    }

    #[test]
    fn path_view_reindexes() {
        let h = nerve("1x1", 3);
        let p = path_cat(&h, 1);
        assert_eq!(p.grade_size(0), h.grade_size(1));
        assert_eq!(p.kmax(), 2);
        let r = check_cubical_axioms(&p, &SampleConfig::default());
        assert!(r.passed(), "{r}");
    }

    #[test]
    fn reversal() {
        let h = nerve("1x1", 3);
        let r = views_report(&h, &SampleConfig::default()).unwrap();
        assert!(r.passed(), "{r}");
    }

    #[test]
    fn internal_hom_counts() {
        let point = nerve("", 2);
        let hom = internal_hom(&point, &point, 0, 10).unwrap();
        assert_eq!(hom.grades[0].len(), 1);
        let i = nerve("1", 3);
        let hom = internal_hom(&i, &i, 2, DEFAULT_INTERNAL_HOM_CAP).unwrap();
        let counts: Vec<usize> = hom.grades.iter().map(Vec::len).collect();
        assert_eq!(counts[0], 3);
        let r = internal_hom_report(&i, &i, &hom, &SampleConfig::default());
        assert!(r.passed(), "{r}");
    }

    #[test]
    fn tensor_of_intervals() {
        let r = tensor_cells_check(1, 1, 3).unwrap();
        assert!(r.passed(), "{r}");
    }

    #[test]
    fn functoriality() {
        let c = path_functoriality(3, &SampleConfig::default()).unwrap();
        assert_ne!(c.status(), crate::report::Status::Fail);
    }
}
