use isospec::analysis::{log_transform, pearson};
use isospec::measures::{cond_hm, econd_hm, harmonic_mean, svg, TopK};
use isospec::spectral::{singular_values, Spectrum};
use isospec::synth::gaussian_space;
use proptest::prelude::*;

fn spectrum() -> impl Strategy<Value = Spectrum> {
    prop::collection::vec(1e-3f64..1e3, 2..30).prop_map(|mut v| {
        v.sort_by(|a, b| b.total_cmp(a));
        Spectrum::new("s", v).unwrap()
    })
}

fn scaled(s: &Spectrum, c: f64) -> Spectrum {
    Spectrum::new("s", s.sigma().iter().map(|v| v * c).collect()).unwrap()
}

proptest! {
    #[test]
    fn pearson_affine_invariance(
        xs in prop::collection::vec(-100.0f64..100.0, 5..40),
        a in 0.01f64..100.0,
        b in -100.0f64..100.0,
        seed in 0u64..1000,
    ) {
        let ys: Vec<f64> = xs.iter().enumerate().map(|(i, x)| x * 0.3 + ((i as u64 * 31 + seed) % 17) as f64).collect();
        let Ok(r) = pearson(&xs, &ys) else { return Ok(()) };
        let mapped: Vec<f64> = xs.iter().map(|x| a * x + b).collect();
        let neg: Vec<f64> = xs.iter().map(|x| -x).collect();
        prop_assert!((pearson(&mapped, &ys).unwrap() - r).abs() <= 1e-12);
        prop_assert!((pearson(&neg, &ys).unwrap() + r).abs() <= 1e-12);
        prop_assert!((-1.0..=1.0).contains(&r));
    }

    #[test]
    fn log_preserves_order(xs in prop::collection::vec(1e-9f64..1e9, 1..50)) {
        let ls = log_transform(&xs).unwrap();
        for i in 0..xs.len() {
            for j in 0..xs.len() {
                prop_assert_eq!(xs[i] < xs[j], ls[i] < ls[j]);
            }
        }
    }

    #[test]
    fn harmonic_mean_bounds(a in 1.0f64..1e8, b in 1.0f64..1e8) {
        let h = harmonic_mean(a, b).unwrap();
        let lo = a.min(b);
        prop_assert!(lo * (1.0 - 1e-12) <= h && h <= 2.0 * lo * (1.0 + 1e-12));
    }

    #[test]
    fn condition_measures_are_scale_invariant(a in spectrum(), b in spectrum(), c in 1e-3f64..1e3) {
        let base = cond_hm(&a, &b).unwrap().value;
        prop_assert!((cond_hm(&scaled(&a, c), &b).unwrap().value - base).abs() <= 1e-9 * base);
        let base = econd_hm(&a, &b).unwrap().value;
        prop_assert!((econd_hm(&scaled(&a, c), &b).unwrap().value - base).abs() <= 1e-9 * base);
    }

    #[test]
    fn svg_shifts_under_scaling(a in spectrum(), c in 1.5f64..100.0) {
        // ln σ moves by ln c in every coordinate
        let v = svg(&scaled(&a, c), &a, TopK::All).unwrap().value;
        let want = a.d() as f64 * c.ln().powi(2);
        prop_assert!((v - want).abs() <= 1e-9 * want);
    }

    #[test]
    fn measures_are_symmetric(a in spectrum(), b in spectrum()) {
        prop_assert_eq!(svg(&a, &b, TopK::All).unwrap().value, svg(&b, &a, TopK::All).unwrap().value);
        prop_assert_eq!(cond_hm(&a, &b).unwrap().value, cond_hm(&b, &a).unwrap().value);
    }
}

#[test]
fn spectra_of_scaled_spaces_scale() {
    let x = gaussian_space("x", 200, 10, 1);
    let mut m = x.matrix().to_owned();
    m *= 3.0;
    let y = isospec::EmbeddingSpace::from_matrix("y", m).unwrap();
    let (a, b) = (singular_values(&x).unwrap(), singular_values(&y).unwrap());
    for (s, t) in a.sigma().iter().zip(b.sigma()) {
        assert!((3.0 * s - t).abs() <= 1e-12 * t);
    }
}
