//! Products of directed paths: shapes, cells and their faces.
//!
//! A cell of `[0,n1] x ... x [0,nk]` is stored as a vector of interval
//! coordinates: vertex `{m}` is `2m` and the edge `[m-1,m]` is `2m-1`.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Upper bound on the number of cells of a shape handled by [`CellSet`].
pub const MAX_CELLS: usize = 256;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ShapeError {
    #[error("path length must be at least 1, got {0}")]
    ZeroLength(u32),
    #[error("malformed shape literal {0:?}")]
    Malformed(String),
    #[error("shape has {0} cells, more than the supported {MAX_CELLS}")]
    TooLarge(usize),
    #[error("malformed cell literal {0:?}")]
    MalformedCell(String),
    #[error("cell {cell} does not lie in shape {shape}")]
    OutOfShape { cell: String, shape: String },
    #[error("cell {0} has no faces")]
    NoFaces(String),
}

/// Orientation of a face or connection.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    Minus,
    Plus,
}

impl Sign {
    pub const BOTH: [Sign; 2] = [Sign::Minus, Sign::Plus];

    pub fn flip(self) -> Sign {
        match self {
            Sign::Minus => Sign::Plus,
            Sign::Plus => Sign::Minus,
        }
    }

    /// `(-)^k self`.
    pub fn alternate(self, k: usize) -> Sign {
        if k % 2 == 0 {
            self
        } else {
            self.flip()
        }
    }

    pub fn index(self) -> usize {
        match self {
            Sign::Minus => 0,
            Sign::Plus => 1,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Minus => '-',
            Sign::Plus => '+',
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

/// A product of directed paths `[0,n1] x ... x [0,nk]`; the empty product is `I^0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct PathProduct {
    lengths: Vec<u32>,
    strides: Vec<usize>,
}

impl PathProduct {
    pub fn new(lengths: Vec<u32>) -> Result<Self, ShapeError> {
        if let Some(&bad) = lengths.iter().find(|&&l| l == 0) {
            return Err(ShapeError::ZeroLength(bad));
        }
        let mut strides = vec![1usize; lengths.len()];
        let mut acc = 1usize;
        for i in (0..lengths.len()).rev() {
            strides[i] = acc;
            acc = acc.saturating_mul(2 * lengths[i] as usize + 1);
        }
        Ok(PathProduct { lengths, strides })
    }

    /// The standard cube `I^n`.
    pub fn cube(n: usize) -> Self {
        PathProduct::new(vec![1; n]).expect("unit lengths are valid")
    }

    pub fn lengths(&self) -> &[u32] {
        &self.lengths
    }

    pub fn arity(&self) -> usize {
        self.lengths.len()
    }

    pub fn cell_count(&self) -> usize {
        self.lengths.iter().map(|&l| 2 * l as usize + 1).product()
    }

    /// The product shape `self x other`.
    pub fn product(&self, other: &PathProduct) -> PathProduct {
        let mut l = self.lengths.clone();
        l.extend_from_slice(&other.lengths);
        PathProduct::new(l).expect("lengths already validated")
    }

    /// The shape with factor `i` (0-based) replaced by `[0,len]`.
    pub fn with_factor(&self, i: usize, len: u32) -> Result<PathProduct, ShapeError> {
        let mut l = self.lengths.clone();
        l[i] = len;
        PathProduct::new(l)
    }

    pub fn is_cube(&self) -> bool {
        self.lengths.iter().all(|&l| l == 1)
    }

    pub fn contains(&self, cell: &Cell) -> bool {
        cell.0.len() == self.arity() && cell.0.iter().zip(&self.lengths).all(|(&v, &l)| v <= 2 * l)
    }

    pub fn index_of(&self, cell: &Cell) -> usize {
        debug_assert!(self.contains(cell));
        cell.0
            .iter()
            .zip(&self.strides)
            .map(|(&v, &s)| v as usize * s)
            .sum()
    }

    pub fn cell(&self, index: usize) -> Cell {
        let mut rest = index;
        let comps = self
            .strides
            .iter()
            .map(|&s| {
                let v = rest / s;
                rest %= s;
                v as u32
            })
            .collect();
        Cell(comps)
    }

    /// All cells in lexicographic order of their encodings.
    pub fn cells(&self) -> Vec<Cell> {
        (0..self.cell_count()).map(|i| self.cell(i)).collect()
    }

    /// Cells of full dimension.
    pub fn top_cells(&self) -> Vec<Cell> {
        self.cells()
            .into_iter()
            .filter(|c| c.dim() == self.arity())
            .collect()
    }

    pub fn stride(&self, i: usize) -> usize {
        self.strides[i]
    }

    pub fn check_size(&self) -> Result<(), ShapeError> {
        let n = self.cell_count();
        if n > MAX_CELLS {
            Err(ShapeError::TooLarge(n))
        } else {
            Ok(())
        }
    }

    pub fn parse_cell(&self, s: &str) -> Result<Cell, ShapeError> {
        let cell: Cell = s.parse()?;
        if !self.contains(&cell) {
            return Err(ShapeError::OutOfShape {
                cell: cell.to_string(),
                shape: self.to_string(),
            });
        }
        Ok(cell)
    }
}

impl fmt::Display for PathProduct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.lengths.iter().map(|l| l.to_string()).collect();
        write!(f, "{}", parts.join("x"))
    }
}

impl FromStr for PathProduct {
    type Err = ShapeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if t.is_empty() {
            return Ok(PathProduct::default());
        }
        let lengths = t
            .split('x')
            .map(|p| p.trim().parse::<u32>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| ShapeError::Malformed(s.to_string()))?;
        PathProduct::new(lengths)
    }
}

impl Serialize for PathProduct {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for PathProduct {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A cell in interval coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cell(pub Vec<u32>);

impl Cell {
    pub fn components(&self) -> &[u32] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.iter().filter(|&&v| v % 2 == 1).count()
    }

    pub fn product(&self, other: &Cell) -> Cell {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Cell(v)
    }

    /// Codimension-one faces with the alternating sign rule.
    pub fn signed_faces(&self, sign: Sign) -> Result<Vec<Cell>, ShapeError> {
        if self.dim() == 0 {
            return Err(ShapeError::NoFaces(self.to_string()));
        }
        let mut out = Vec::new();
        let mut j = 0;
        for (pos, &v) in self.0.iter().enumerate() {
            if v % 2 == 0 {
                continue;
            }
            j += 1;
            // odd j: d- replacement is negative; even j: d+ replacement is negative
            let local = if j % 2 == 1 { sign } else { sign.flip() };
            let mut c = self.0.clone();
            c[pos] = match local {
                Sign::Minus => v - 1,
                Sign::Plus => v + 1,
            };
            out.push(Cell(c));
        }
        out.sort();
        Ok(out)
    }

    /// All codimension-one faces.
    pub fn faces(&self) -> Vec<Cell> {
        let mut out = Vec::new();
        for (pos, &v) in self.0.iter().enumerate() {
            if v % 2 == 1 {
                for w in [v - 1, v + 1] {
                    let mut c = self.0.clone();
                    c[pos] = w;
                    out.push(Cell(c));
                }
            }
        }
        out
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|v| v.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl FromStr for Cell {
    type Err = ShapeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ShapeError::MalformedCell(s.to_string());
        let t = s.trim();
        let inner = t
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(bad)?;
        if inner.trim().is_empty() {
            return Ok(Cell(Vec::new()));
        }
        inner
            .split(',')
            .map(|p| p.trim().parse::<u32>().map_err(|_| bad()))
            .collect::<Result<Vec<_>, _>>()
            .map(Cell)
    }
}

/// A set of cell indices of a fixed shape, as a 256-bit set.
///
/// Ordering compares the ascending lists of indices lexicographically, which
/// matches lexicographic order of the sorted cell encodings.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct CellSet([u64; 4]);

impl CellSet {
    pub fn empty() -> Self {
        CellSet([0; 4])
    }

    pub fn singleton(i: usize) -> Self {
        let mut s = CellSet::empty();
        s.insert(i);
        s
    }

    pub fn insert(&mut self, i: usize) {
        assert!(i < MAX_CELLS, "cell index {i} out of range");
        self.0[i / 64] |= 1u64 << (i % 64);
    }

    pub fn contains(&self, i: usize) -> bool {
        i < MAX_CELLS && self.0[i / 64] & (1u64 << (i % 64)) != 0
    }

    pub fn union(&self, other: &CellSet) -> CellSet {
        let mut w = self.0;
        for (a, b) in w.iter_mut().zip(other.0.iter()) {
            *a |= b;
        }
        CellSet(w)
    }

    pub fn intersection(&self, other: &CellSet) -> CellSet {
        let mut w = self.0;
        for (a, b) in w.iter_mut().zip(other.0.iter()) {
            *a &= b;
        }
        CellSet(w)
    }

    pub fn is_subset(&self, other: &CellSet) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| a & !b == 0)
    }

    pub fn len(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..4).flat_map(move |k| {
            let mut w = self.0[k];
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(64 * k + b)
                }
            })
        })
    }

    pub fn words(&self) -> [u64; 4] {
        self.0
    }
}

impl Ord for CellSet {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.iter().cmp(other.iter())
    }
}

impl PartialOrd for CellSet {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for CellSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// A downward-closed set of cells of a shape.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subcomplex {
    pub cells: BTreeSet<Cell>,
}

impl Subcomplex {
    pub fn to_set(&self, shape: &PathProduct) -> CellSet {
        let mut s = CellSet::empty();
        for c in &self.cells {
            s.insert(shape.index_of(c));
        }
        s
    }

    pub fn from_set(shape: &PathProduct, set: &CellSet) -> Subcomplex {
        Subcomplex {
            cells: set.iter().map(|i| shape.cell(i)).collect(),
        }
    }

    pub fn is_closed(&self) -> bool {
        self.cells
            .iter()
            .all(|c| c.faces().iter().all(|f| self.cells.contains(f)))
    }
}

/// Downward closure of a set of cells.
pub fn closure(shape: &PathProduct, set: &CellSet) -> CellSet {
    let mut out = *set;
    let mut stack: Vec<usize> = set.iter().collect();
    while let Some(i) = stack.pop() {
        let c = shape.cell(i);
        for (pos, &v) in c.0.iter().enumerate() {
            if v % 2 == 1 {
                let s = shape.stride(pos);
                for j in [i - s, i + s] {
                    if !out.contains(j) {
                        out.insert(j);
                        stack.push(j);
                    }
                }
            }
        }
    }
    out
}

pub fn is_closed(shape: &PathProduct, set: &CellSet) -> bool {
    closure(shape, set) == *set
}

/// Components of the face `d^sign_p` of a one-factor cell `v`, as a closed set of coordinates.
fn factor_face(v: u32, sign: Sign, p: usize) -> Vec<u32> {
    if v % 2 == 0 {
        vec![v]
    } else if p == 0 {
        match sign {
            Sign::Minus => vec![v - 1],
            Sign::Plus => vec![v + 1],
        }
    } else {
        vec![v - 1, v, v + 1]
    }
}

fn face_rec(comps: &[u32], sign: Sign, p: usize, out: &mut Vec<Vec<u32>>, prefix: &mut Vec<u32>) {
    let Some((&v, rest)) = comps.split_first() else {
        out.push(prefix.clone());
        return;
    };
    for i in 0..=p {
        for w in factor_face(v, sign, i) {
            prefix.push(w);
            face_rec(rest, sign.alternate(i), p - i, out, prefix);
            prefix.pop();
        }
    }
}

/// The underlying set of `d^sign_p(cell)` in `M(K)`.
pub fn cell_face(shape: &PathProduct, cell: &Cell, sign: Sign, p: usize) -> CellSet {
    let mut out = Vec::new();
    face_rec(&cell.0, sign, p, &mut out, &mut Vec::new());
    let mut set = CellSet::empty();
    for comps in out {
        set.insert(shape.index_of(&Cell(comps)));
    }
    set
}

/// The closure of a single cell.
pub fn cell_closure(shape: &PathProduct, cell: &Cell) -> CellSet {
    closure(shape, &CellSet::singleton(shape.index_of(cell)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cells_of(shape: &PathProduct, set: &CellSet) -> Vec<String> {
        set.iter().map(|i| shape.cell(i).to_string()).collect()
    }

    #[test]
    fn cell_counts() {
        assert_eq!(PathProduct::cube(1).cells().len(), 3);
        assert_eq!(PathProduct::cube(2).cells().len(), 9);
        let k: PathProduct = "2".parse().unwrap();
        let names: Vec<String> = k.cells().iter().map(|c| c.to_string()).collect();
        assert_eq!(names, ["(0)", "(1)", "(2)", "(3)", "(4)"]);
    }

    #[test]
    fn shape_grammar() {
        let k: PathProduct = "2x1".parse().unwrap();
        assert_eq!(k.lengths(), &[2, 1]);
        assert_eq!(k.to_string(), "2x1");
        let empty: PathProduct = "".parse().unwrap();
        assert_eq!(empty.arity(), 0);
        assert_eq!(empty.cell_count(), 1);
        assert!("0x1".parse::<PathProduct>().is_err());
        assert!("ax1".parse::<PathProduct>().is_err());
        let c: Cell = "(1,0,2)".parse().unwrap();
        assert_eq!(c.components(), &[1, 0, 2]);
        assert_eq!(c.to_string(), "(1,0,2)");
    }

    #[test]
    fn signed_faces_of_square() {
        let sq = Cell(vec![1, 1]);
        let neg: Vec<String> = sq
            .signed_faces(Sign::Minus)
            .unwrap()
            .iter()
            .map(|c| c.to_string())
            .collect();
        assert_eq!(neg, ["(0,1)", "(1,2)"]);
        let pos: Vec<String> = sq
            .signed_faces(Sign::Plus)
            .unwrap()
            .iter()
            .map(|c| c.to_string())
            .collect();
        assert_eq!(pos, ["(1,0)", "(2,1)"]);
        assert_eq!(
            Cell(vec![1]).signed_faces(Sign::Plus).unwrap(),
            vec![Cell(vec![2])]
        );
        assert!(Cell(vec![0, 2]).signed_faces(Sign::Minus).is_err());
    }

    #[test]
    fn square_faces() {
        let k = PathProduct::cube(2);
        let sq = Cell(vec![1, 1]);
        let d = cell_face(&k, &sq, Sign::Minus, 1);
        assert_eq!(
            cells_of(&k, &d),
            ["(0,0)", "(0,1)", "(0,2)", "(1,2)", "(2,2)"]
        );
        let d0 = cell_face(&k, &sq, Sign::Minus, 0);
        assert_eq!(cells_of(&k, &d0), ["(0,0)"]);
        let d0p = cell_face(&k, &sq, Sign::Plus, 0);
        assert_eq!(cells_of(&k, &d0p), ["(2,2)"]);
        assert_eq!(cell_face(&k, &sq, Sign::Plus, 2), cell_closure(&k, &sq));
    }

    #[test]
    fn cube_vertex_face() {
        let k = PathProduct::cube(3);
        let top = Cell(vec![1, 1, 1]);
        let d = cell_face(&k, &top, Sign::Minus, 0);
        assert_eq!(cells_of(&k, &d), ["(0,0,0)"]);
    }

    #[test]
    fn faces_are_closed_and_nested() {
        for lens in [vec![2, 2, 1], vec![1, 1, 1], vec![2, 1]] {
            let k = PathProduct::new(lens).unwrap();
            for c in k.cells() {
                for s in Sign::BOTH {
                    for p in 0..c.dim() {
                        let face = cell_face(&k, &c, s, p);
                        assert!(is_closed(&k, &face), "cell {c} sign {s} p {p}");
                        assert!(face.is_subset(&cell_face(&k, &c, s, p + 1)));
                        assert!(!face.contains(k.index_of(&c)));
                    }
                }
            }
        }
    }

    #[test]
    fn signed_faces_partition() {
        let k = PathProduct::new(vec![2, 1, 1]).unwrap();
        for c in k.cells().into_iter().filter(|c| c.dim() > 0) {
            let neg = c.signed_faces(Sign::Minus).unwrap();
            let pos = c.signed_faces(Sign::Plus).unwrap();
            let mut all: Vec<Cell> = neg.iter().chain(pos.iter()).cloned().collect();
            all.sort();
            let mut expected = c.faces();
            expected.sort();
            assert_eq!(all, expected);
            assert!(neg.iter().all(|f| !pos.contains(f)));
        }
    }

    #[test]
    fn cellset_order_is_lexicographic() {
        let a = CellSet::singleton(3);
        let mut b = CellSet::singleton(3);
        b.insert(200);
        let c = CellSet::singleton(4);
        assert!(a < b && b < c);
    }
}
