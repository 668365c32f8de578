use mwdkit::blockmat::{random_block, CohenMaps, Derived};
use mwdkit::fourier::{ft_samples, interp_signal};
use mwdkit::signals::{gaussian, inner, tf_shift};
use mwdkit::{BlockMatrix, Complex64, Grid};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn block(seed: u64, d: usize) -> BlockMatrix {
    random_block(&mut ChaCha8Rng::seed_from_u64(seed), d, 2.0, 0.2, false)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn interchange_rule_is_an_involution(seed in any::<u64>(), d in 1usize..=2) {
        let a = block(seed, d);
        let back = a.derived(Derived::C1).derived(Derived::C1);
        prop_assert!(back.approx_eq(&a, 1e-12));
    }

    #[test]
    fn sharp_is_an_involution(seed in any::<u64>(), d in 1usize..=2) {
        let a = block(seed, d);
        prop_assert!(a.sharp().sharp().approx_eq(&a, 1e-8));
    }

    #[test]
    fn inverse_composes_to_identity(seed in any::<u64>(), d in 1usize..=2) {
        let a = block(seed, d);
        let i = a.mul(&a.inverse_block_matrix());
        let eye = DMatrix::<f64>::identity(2 * d, 2 * d);
        prop_assert!((i.entries() - eye).amax() < 1e-9);
    }

    #[test]
    fn cohen_translation_forms_agree(
        t in 0.05f64..0.95,
        z in prop::array::uniform2(-3.0f64..3.0),
        w in prop::array::uniform2(-3.0f64..3.0),
    ) {
        let maps = CohenMaps::new(&DMatrix::from_element(1, 1, t)).unwrap();
        let a = maps.tcal(&w, &z);
        let b = maps.tcal_via_u(&w, &z).unwrap();
        prop_assert!((a[0] - b[0]).abs() < 1e-10 && (a[1] - b[1]).abs() < 1e-10);
    }

    #[test]
    fn centered_dft_round_trips(seed in any::<u64>(), log_n in 3u32..9) {
        let n = 1usize << log_n;
        let g = Grid::new(1, n, (n as f64).sqrt()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        use rand::Rng;
        let x: Vec<Complex64> = (0..n).map(|_| Complex64::new(rng.gen(), rng.gen())).collect();
        let back = ft_samples(&ft_samples(&x, &g, false), &g.dual(), true);
        let err = x.iter().zip(&back).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        prop_assert!(err < 1e-12);
    }

    #[test]
    fn interpolation_is_exact_at_nodes(seed in any::<u64>(), j in 0usize..64) {
        let g = Grid::new(1, 64, 8.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        use rand::Rng;
        let s: Vec<Complex64> = (0..64).map(|_| Complex64::new(rng.gen(), rng.gen())).collect();
        prop_assert_eq!(interp_signal(&g, &s, &[g.point(j)]), s[j]);
    }

    #[test]
    fn time_frequency_shifts_are_unitary(x0 in -2.0f64..2.0, w0 in -2.0f64..2.0) {
        let g = Grid::new(1, 256, 16.0).unwrap();
        let phi = gaussian(1.0, 1).unwrap();
        let shifted = tf_shift(&phi, &[x0], &[w0]).unwrap();
        let a = inner(&phi, &phi, &g).unwrap();
        let b = inner(&shifted, &shifted, &g).unwrap();
        prop_assert!((a - b).norm() < 1e-12);
    }
}
