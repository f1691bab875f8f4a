use std::collections::HashSet;
use std::sync::{Arc, OnceLock};

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cubical_omega::analysis::{degenerate_generators, is_thin, is_thin_by_dimension};
use cubical_omega::cubical_core::{random_word, CubicalCategory, Elem, REWRITE_BUDGET};
use cubical_omega::equivalence::{reconstruct, shell_boundary};
use cubical_omega::folding::Phi;
use cubical_omega::nerve::Nerve;
use cubical_omega::omega_pasting::m_of;
use cubical_omega::tensor_hom::{internal_hom, reverse, ConnConvention, DEFAULT_INTERNAL_HOM_CAP};
use cubical_omega::{PathProduct, Sign};

fn nerve(shape: &str, kmax: usize) -> Nerve {
    Nerve::new(
        Arc::new(m_of(&shape.parse().unwrap()).unwrap().table().clone()),
        kmax,
    )
    .unwrap()
}

fn cube3() -> &'static Nerve {
    static N: OnceLock<Nerve> = OnceLock::new();
    N.get_or_init(|| nerve("1x1x1", 3))
}

fn square() -> &'static Nerve {
    static N: OnceLock<Nerve> = OnceLock::new();
    N.get_or_init(|| nerve("1x1", 3))
}

fn element(g: &Nerve, n: usize, seed: usize) -> Elem {
    Elem::new(n, seed % g.grade_size(n))
}

fn sign(b: bool) -> Sign {
    if b {
        Sign::Plus
    } else {
        Sign::Minus
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn normalization_is_idempotent_and_sound(seed in any::<u64>(), n in 0usize..=3, pick in any::<usize>()) {
        let g = cube3();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = random_word(&mut rng, n, 6, 3);
        let nf = w.normalize(n, REWRITE_BUDGET).unwrap();
        prop_assert_eq!(&nf.normalize(n, REWRITE_BUDGET).unwrap(), &nf);
        prop_assert_eq!(nf.target(n), w.target(n));
        let x = element(g, n, pick);
        prop_assert_eq!(w.apply(g, x).unwrap(), nf.apply(g, x).unwrap());
    }

    #[test]
    fn phi_is_idempotent(n in 0usize..=3, pick in any::<usize>()) {
        let g = cube3();
        let x = element(g, n, pick);
        let once = Phi(g, n, x).unwrap();
        prop_assert_eq!(Phi(g, n, once).unwrap(), once);
    }

    #[test]
    fn thin_iff_lower_dimension(n in 0usize..=3, pick in any::<usize>()) {
        let g = cube3();
        let x = element(g, n, pick);
        prop_assert_eq!(is_thin(g, x).unwrap(), is_thin_by_dimension(g, x));
    }

    #[test]
    fn boundary_and_folding_reconstruct(n in 1usize..=3, pick in any::<usize>()) {
        let g = square();
        let x = element(g, n, pick);
        let z = shell_boundary(g, x).unwrap();
        let y = Phi(g, n, x).unwrap();
        prop_assert_eq!(reconstruct(g, &z, y).unwrap(), x);
    }

    #[test]
    fn reversal_is_an_involution(n in 1usize..=3, pick in any::<usize>(), i in 1usize..=3, plus in any::<bool>()) {
        let g = square();
        let t = reverse(g, ConnConvention::SignPreserved);
        let tt = reverse(&t, ConnConvention::SignPreserved);
        let x = element(g, n, pick);
        let a = sign(plus);
        let i = 1 + (i - 1) % n;
        prop_assert_eq!(tt.face(x, i, a).ok(), g.face(x, i, a).ok());
        if n < 3 {
            prop_assert_eq!(tt.degen(x, i).ok(), g.degen(x, i).ok());
            prop_assert_eq!(tt.conn(x, i, a).ok(), g.conn(x, i, a).ok());
        }
    }

    #[test]
    fn shapes_round_trip_through_text(lengths in proptest::collection::vec(1u32..=9, 0..4)) {
        let p = PathProduct::new(lengths).unwrap();
        let back: PathProduct = p.to_string().parse().unwrap();
        prop_assert_eq!(back, p);
    }
}

#[test]
fn composites_of_degenerate_generators_are_thin() {
    let g = square();
    let mut rng = ChaCha8Rng::seed_from_u64(0x7417);
    for n in 1..=3 {
        let mut pool: Vec<Elem> = degenerate_generators(g, n)
            .unwrap()
            .into_iter()
            .map(|(x, _)| x)
            .collect();
        let mut seen: HashSet<Elem> = pool.iter().copied().collect();
        let mut composed = 0;
        for _ in 0..1_000 {
            let x = pool[rng.gen_range(0..pool.len())];
            let y = pool[rng.gen_range(0..pool.len())];
            let i = rng.gen_range(1..=n);
            if let Ok(z) = g.compose(x, y, i) {
                composed += 1;
                assert!(is_thin(g, z).unwrap(), "{} is not thin", g.label(z));
                if seen.insert(z) {
                    pool.push(z);
                }
            }
        }
        assert!(composed > 0, "no composable pairs at grade {n}");
    }
}

#[test]
fn internal_hom_counts() {
    let counts = |shape: &str, kmax: usize| -> Vec<usize> {
        let g = nerve(shape, kmax);
        internal_hom(&g, &g, 2, DEFAULT_INTERNAL_HOM_CAP)
            .unwrap()
            .grades
            .iter()
            .map(Vec::len)
            .collect()
    };
    assert_eq!(counts("", 3), [1, 1, 1]);
    assert_eq!(counts("1", 3), [3, 6, 20]);
    assert_eq!(counts("2", 3), [10, 50, 887]);
}
