use std::sync::Arc;

use lfwave::analysis::{chi, fourier_with, Domain, Grid, OmegaSet, SampledFunction, TransformMethod};
use lfwave::characterization::{project_reducing, standard_cases, t_k};
use lfwave::frame::{reconstruction_form, GeneratorSet, Ranges};
use lfwave::sequence::{seq_fourier, seq_translate, Sequence};
use lfwave::{u_of_n, FieldSpec, KNumber};
use num_complex::Complex;
use proptest::prelude::*;

fn field(p: u32) -> Arc<FieldSpec> {
    Arc::new(FieldSpec::prime(p).unwrap())
}

fn knumber(p: u32) -> impl Strategy<Value = KNumber> {
    (-6i64..6, prop::collection::vec(0..p, 0..7)).prop_map(move |(lo, d)| KNumber::from_digits(&field(p), lo, d))
}

/// A small grid together with a vector of values long enough for it.
fn grid_and_values() -> impl Strategy<Value = (Grid, Vec<Complex<f64>>)> {
    (prop::sample::select(vec![2u32, 3, 5]), 1u32..3, 1u32..3).prop_flat_map(|(p, m, n)| {
        let g = Grid::new(field(p), m, n).unwrap();
        let len = g.len();
        (Just(g), prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64).prop_map(|(a, b)| Complex::new(a, b)), len))
    })
}

fn max_diff(a: &[Complex<f64>], b: &[Complex<f64>]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn ultrametric(x in knumber(3), y in knumber(3)) {
        let (a, b, sum) = (x.norm(), y.norm(), x.add(&y).norm());
        prop_assert!(sum <= a.max(b));
        if a != b {
            prop_assert_eq!(sum, a.max(b));
        }
    }

    #[test]
    fn norm_is_multiplicative(x in knumber(2), y in knumber(2)) {
        prop_assert_eq!(x.mul(&y).norm(), x.norm() * y.norm());
    }

    #[test]
    fn plancherel_and_inversion((g, v) in grid_and_values()) {
        let f = SampledFunction::new(&g, Domain::Time, v).unwrap();
        let fast = fourier_with(&f, TransformMethod::Fast).unwrap();
        let naive = fourier_with(&f, TransformMethod::Naive).unwrap();
        prop_assert!((fast.norm() - f.norm()).abs() <= 1e-12 * f.norm().max(1.0));
        prop_assert!(max_diff(fast.values(), naive.values()) < 1e-12);
        prop_assert!(max_diff(fast.inv_fourier().unwrap().values(), f.values()) < 1e-12);
    }

    #[test]
    fn translation_is_an_isometry_and_multiplies_by_the_character(
        p in prop::sample::select(vec![2u32, 3]),
        coeffs in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 9),
        m in 0u64..9,
    ) {
        let g = Grid::new(field(p), 2, 2).unwrap();
        let f = g.field().clone();
        let limit = g.integer_cells() as u64;
        let z: Sequence<f64> = Sequence::from_pairs(
            &f,
            coeffs.iter().take(limit as usize).enumerate().map(|(n, &(a, b))| (n as u64, Complex::new(a, b))),
        );
        let m = m % limit;
        let moved = seq_translate(&z, m);
        prop_assert!((moved.norm_sqr() - z.norm_sqr()).abs() < 1e-12);
        prop_assert!(moved.max_index().unwrap_or(0) < limit);
        let um = u_of_n(&f, m);
        let zh = seq_fourier(&z, &g).unwrap();
        let mh = seq_fourier(&moved, &g).unwrap();
        for c in 0..g.len() {
            let phase = chi::<f64>(&um.mul(&g.freq_point(c)));
            prop_assert!((mh.value(c) - zh.value(c) * phase).norm() < 1e-12);
        }
    }

    #[test]
    fn exponent_shift_cancels_in_the_mixed_form(
        t in -2.0..2.0f64,
        seed in 0u64..1000,
    ) {
        let g = Grid::new(field(2), 2, 2).unwrap();
        let ranges = Ranges::full(&g);
        let cases = standard_cases::<f64>(&g, 0.4, seed).unwrap();
        let case = &cases[1];
        let f = SampledFunction::from_fn(&g, Domain::Frequency, |c| Complex::new((c as f64 * 0.7).sin(), 0.3));
        let h = SampledFunction::from_fn(&g, Domain::Frequency, |c| Complex::new(0.2, (c as f64).cos()));
        let base = reconstruction_form(&f, &h, &case.primal, &case.dual, &ranges).unwrap();
        let primal = case.primal.with_exponent(case.primal.exponent() + t);
        let dual = case.dual.with_exponent(case.dual.exponent() - t);
        let shifted = reconstruction_form(&f, &h, &primal, &dual, &ranges).unwrap();
        prop_assert!((base - shifted).norm() < 1e-12);
    }

    #[test]
    fn scaling_a_generator_up_never_improves_t0(
        ell in 0usize..2,
        a in 1.0..4.0f64,
        b in 1.0..4.0f64,
        seed in 0u64..1000,
    ) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let g = Grid::new(field(2), 2, 3).unwrap();
        let ranges = Ranges::full(&g);
        let cases = standard_cases::<f64>(&g, 0.0, seed).unwrap();
        let case = &cases[2];
        let deviation = |lambda: f64| {
            let primal = case.primal.map_generator(ell, |f| f.scale(Complex::new(lambda, 0.0))).unwrap();
            let sym = t_k(&primal, &case.dual, 0, &ranges).unwrap();
            sym.values.iter().flatten().map(|v| (v - 1.0).norm()).fold(0.0, f64::max)
        };
        prop_assert!(deviation(hi) >= deviation(lo) - 1e-12);
    }

    #[test]
    fn projection_is_idempotent_and_self_adjoint(
        (g, v) in grid_and_values(),
        leading in 1u32..5,
    ) {
        let omega = if leading < g.q() {
            OmegaSet::sector(&g, &[leading]).unwrap()
        } else {
            OmegaSet::full(&g)
        };
        let f = SampledFunction::new(&g, Domain::Time, v.clone()).unwrap();
        let h = SampledFunction::new(&g, Domain::Time, v.iter().rev().map(|z| z.conj()).collect()).unwrap();
        let pf = project_reducing(&f, &omega).unwrap();
        let ppf = project_reducing(&pf, &omega).unwrap();
        prop_assert!(max_diff(pf.values(), ppf.values()) < 1e-12);
        let ph = project_reducing(&h, &omega).unwrap();
        let lhs = pf.to_frequency().inner(&h.to_frequency()).unwrap();
        let rhs = f.to_frequency().inner(&ph.to_frequency()).unwrap();
        prop_assert!((lhs - rhs).norm() < 1e-12);
    }
}

#[test]
fn haar_generators_are_coset_indicators() {
    let g = Grid::new(field(3), 2, 2).unwrap();
    let haar = GeneratorSet::<f64>::haar(&g, 0.0, lfwave::frame::Side::Primal);
    let f = g.field();
    for ell in 0..3u64 {
        let shift = u_of_n(f, ell);
        let spectrum = haar.generator(ell as usize).unwrap();
        for c in 0..g.len() {
            let inside = g.freq_point(c).sub(&shift).norm() <= 1.0;
            assert_eq!(spectrum.value(c), Complex::new(if inside { 1.0 } else { 0.0 }, 0.0));
        }
    }
}

#[test]
fn scaling_function_alone_is_a_valid_system() {
    use lfwave::characterization::{check_nwbf, CheckOptions};
    use lfwave::frame::bessel_bounds;
    // with no wavelets the symbol reduces to the psi_0 product
    let g = Grid::new(field(2), 2, 2).unwrap();
    let one = SampledFunction::from_fn(&g, Domain::Frequency, |_| Complex::new(1.0, 0.0));
    let primal = GeneratorSet::primal(one.clone(), vec![], 0.0).unwrap();
    let dual = GeneratorSet::dual(one, vec![], 0.0).unwrap();
    assert_eq!(primal.wavelets(), 0);
    let b = bessel_bounds(&primal, &Ranges::full(&g), None).unwrap();
    assert!(b.upper > 0.0);
    let report = check_nwbf(&primal, &dual, &OmegaSet::full(&g), &CheckOptions::new(&g)).unwrap();
    assert_eq!(report.symbol.per_k.len(), 4);
    assert_eq!(report.verdicts.symbol, report.verdicts.reconstruction);
}
