mod common;

use cubical_omega::omega_pasting::build_m;
use cubical_omega::path_complex::{is_closed, PathProduct};
use cubical_omega::Sign;

fn compare(shape: &str) -> usize {
    let k: PathProduct = shape.parse().unwrap();
    let m = build_m(&k).unwrap();
    let oracle = common::reachable(&k);
    assert_eq!(m.len(), oracle.len(), "member count of {shape}");
    for (set, om) in &oracle {
        assert!(is_closed(&k, set));
        let x = m.lookup(set).expect("oracle member present");
        assert_eq!(m.dim(x) as usize, om.dim);
        for p in 0..k.arity() {
            for s in Sign::BOTH {
                let f = m.face(x, s, p as u32);
                assert_eq!(
                    m.member(f).set,
                    om.faces[p][s.index()],
                    "{shape}: face {s}{p} of {}",
                    m.label(x)
                );
            }
        }
    }
    m.len()
}

#[test]
fn cube_three_matches_oracle() {
    assert_eq!(compare("1x1x1"), 57);
}

#[test]
fn small_shapes_match_oracle() {
    for s in ["", "1", "2", "1x1", "2x1", "1x2", "3", "2x2", "1x1x2"] {
        compare(s);
    }
}

#[test]
fn cube_three_downsets() {
    let k = PathProduct::cube(3);
    let total = common::downset_count(&k);
    let members = common::reachable(&k).len() as u64;
    assert!(members < total);
    assert_eq!(total, 15_936);
}
