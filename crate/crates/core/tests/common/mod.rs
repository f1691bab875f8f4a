//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use cubical_omega::path_complex::{CellSet, PathProduct};
use cubical_omega::Sign;

/// Downward closure computed from codimension-one faces only.
pub fn down(shape: &PathProduct, seeds: impl IntoIterator<Item = usize>) -> CellSet {
    let mut out = CellSet::empty();
    let mut stack: Vec<usize> = seeds.into_iter().collect();
    while let Some(i) = stack.pop() {
        if out.contains(i) {
            continue;
        }
        out.insert(i);
        for f in shape.cell(i).faces() {
            stack.push(shape.index_of(&f));
        }
    }
    out
}

fn signed_boundary(shape: &PathProduct, cells: &[usize], sign: Sign) -> BTreeSet<usize> {
    let mut out = BTreeSet::new();
    for &c in cells {
        for f in shape.cell(c).signed_faces(sign).unwrap() {
            out.insert(shape.index_of(&f));
        }
    }
    out
}

/// `d^a_p x`: the p-cells of x that are not `-a` faces of (p+1)-cells of x,
/// together with the maximal cells of dimension below p, closed downwards.
pub fn face(shape: &PathProduct, x: &CellSet, a: Sign, p: usize) -> CellSet {
    let cells: Vec<usize> = x.iter().collect();
    let dim = |i: usize| shape.cell(i).dim();
    let xp: Vec<usize> = cells.iter().copied().filter(|&c| dim(c) == p).collect();
    let xp1: Vec<usize> = cells.iter().copied().filter(|&c| dim(c) == p + 1).collect();
    let removed = signed_boundary(shape, &xp1, a.flip());
    let mut seeds: Vec<usize> = xp.into_iter().filter(|c| !removed.contains(c)).collect();
    for &c in &cells {
        if dim(c) < p {
            let is_max = !cells
                .iter()
                .any(|&d| d != c && down(shape, [d]).contains(c));
            if is_max {
                seeds.push(c);
            }
        }
    }
    if cells.iter().all(|&c| dim(c) <= p) {
        return *x;
    }
    down(shape, seeds)
}

pub struct OracleMember {
    pub faces: Vec<[CellSet; 2]>,
    pub dim: usize,
}

/// Members reachable from the cells by binary union along matching faces.
pub fn reachable(shape: &PathProduct) -> BTreeMap<CellSet, OracleMember> {
    let top = shape.arity();
    let mk = |x: &CellSet| {
        let faces: Vec<[CellSet; 2]> = (0..top)
            .map(|p| {
                [
                    face(shape, x, Sign::Minus, p),
                    face(shape, x, Sign::Plus, p),
                ]
            })
            .collect();
        let dim = (0..top).find(|&p| faces[p] == [*x, *x]).unwrap_or(top);
        OracleMember { faces, dim }
    };
    let mut members: BTreeMap<CellSet, OracleMember> = BTreeMap::new();
    for i in 0..shape.cell_count() {
        let x = down(shape, [i]);
        let m = mk(&x);
        members.insert(x, m);
    }
    loop {
        let keys: Vec<CellSet> = members.keys().copied().collect();
        let mut fresh = Vec::new();
        for x in &keys {
            for y in &keys {
                for p in 0..top {
                    if members[x].faces[p][1] == members[y].faces[p][0] {
                        let u = x.union(y);
                        if !members.contains_key(&u) && !fresh.contains(&u) {
                            fresh.push(u);
                        }
                    }
                }
            }
        }
        if fresh.is_empty() {
            return members;
        }
        for u in fresh {
            let m = mk(&u);
            members.insert(u, m);
        }
    }
}

/// Number of downward-closed cell sets, including the empty one.
pub fn downset_count(shape: &PathProduct) -> u64 {
    let mut cells: Vec<usize> = (0..shape.cell_count()).collect();
    cells.sort_by_key(|&c| shape.cell(c).dim());
    fn go(shape: &PathProduct, cells: &[usize], k: usize, chosen: &mut CellSet) -> u64 {
        if k == cells.len() {
            return 1;
        }
        let c = cells[k];
        let mut total = go(shape, cells, k + 1, chosen);
        let ok = shape
            .cell(c)
            .faces()
            .iter()
            .all(|f| chosen.contains(shape.index_of(f)));
        if ok {
            let saved = *chosen;
            chosen.insert(c);
            total += go(shape, cells, k + 1, chosen);
            *chosen = saved;
        }
        total
    }
    go(shape, &cells, 0, &mut CellSet::empty())
}
