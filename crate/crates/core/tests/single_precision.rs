use std::sync::Arc;

use lfwave::analysis::{Domain, Grid, OmegaSet, SampledFunction};
use lfwave::characterization::{check_nwbf, CheckOptions, Tolerances};
use lfwave::frame::{bessel_bounds, GeneratorSet, Ranges, Side};
use lfwave::FieldSpec;
use num_complex::Complex;

fn grid() -> Grid {
    Grid::new(Arc::new(FieldSpec::prime(2).unwrap()), 3, 3).unwrap()
}

#[test]
fn transform_round_trip_in_f32() {
    let g = grid();
    let f = SampledFunction::<f32>::from_fn(&g, Domain::Time, |c| Complex::new((c as f32).sin(), 0.5));
    let back = f.fourier().unwrap().inv_fourier().unwrap();
    let worst = f.values().iter().zip(back.values()).map(|(a, b)| (a - b).norm()).fold(0.0f32, f32::max);
    assert!(worst < 1e-5, "{worst}");
    assert!((f.fourier().unwrap().norm() - f.norm()).abs() < 1e-5);
}

#[test]
fn haar_checks_out_in_f32() {
    let g = grid();
    let primal = GeneratorSet::<f32>::haar(&g, 0.0, Side::Primal);
    let dual = GeneratorSet::<f32>::haar(&g, 0.0, Side::Dual);
    let b = bessel_bounds(&primal, &Ranges::full(&g), None).unwrap();
    assert!((b.upper - 1.0).abs() < 1e-4 && (b.lower - 1.0).abs() < 1e-4);
    let mut options = CheckOptions::new(&g);
    options.tolerances = Tolerances { unitary: 1e-5, identity: 1e-5 };
    options.battery = 4;
    let report = check_nwbf(&primal, &dual, &OmegaSet::full(&g), &options).unwrap();
    assert!(report.overall, "{:?}", report.verdicts);
}
