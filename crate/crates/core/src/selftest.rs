//! Invariant suites for every module, run together by `lfwave selftest`.

use std::fmt::Write as _;
use std::sync::Arc;
use std::time::Instant;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analysis::{chi_n, fourier_with, inv_fourier, Domain, Grid, OmegaSet, SampledFunction, TransformMethod};
use crate::characterization::{
    check_nwbf, lemma31_check, lemma32_check, standard_cases, t_k, theorem_equivalence_harness, CheckOptions,
};
use crate::error::Result;
use crate::finite_field::FieldSpec;
use crate::frame::{bessel_bounds, GeneratorSet, Ranges, Side};
use crate::local_field::{kappa, u_of_n, KNumber, Valuation};
use crate::sequence::{seq_fourier, seq_inv_fourier, seq_translate, Sequence};

/// Outcome of one suite.
#[derive(Debug, Clone, serde::Serialize)]
pub struct SuiteResult {
    pub name: &'static str,
    pub checks: usize,
    pub failures: Vec<String>,
    /// Largest numerical deviation seen by the floating-point checks.
    pub max_deviation: f64,
    pub seconds: f64,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct SelftestSummary {
    pub p: u32,
    pub m: u32,
    pub n: u32,
    pub suites: Vec<SuiteResult>,
    pub seconds: f64,
}

impl SelftestSummary {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(SuiteResult::passed)
    }

    /// Fixed-width summary table, one row per suite.
    pub fn table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "selftest p={} M={} N={}", self.p, self.m, self.n);
        let _ = writeln!(out, "{:<18} {:>7} {:>8} {:>12} {:>9}  status", "suite", "checks", "failed", "max dev", "seconds");
        for s in &self.suites {
            let _ = writeln!(
                out,
                "{:<18} {:>7} {:>8} {:>12.3e} {:>9.3}  {}",
                s.name,
                s.checks,
                s.failures.len(),
                s.max_deviation,
                s.seconds,
                if s.passed() { "PASS" } else { "FAIL" }
            );
            for f in &s.failures {
                let _ = writeln!(out, "    {f}");
            }
        }
        let _ = writeln!(
            out,
            "total {:.3} s: {}",
            self.seconds,
            if self.passed() { "PASS" } else { "FAIL" }
        );
        out
    }
}

/// Collects checks for one suite.
struct Suite {
    name: &'static str,
    checks: usize,
    failures: Vec<String>,
    max_deviation: f64,
    start: Instant,
}

impl Suite {
    fn new(name: &'static str) -> Self {
        Self { name, checks: 0, failures: Vec::new(), max_deviation: 0.0, start: Instant::now() }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn close(&mut self, dev: f64, tol: f64, what: &str) {
        self.max_deviation = self.max_deviation.max(dev);
        self.check(dev <= tol, || format!("{what}: deviation {dev:.3e} > {tol:.0e}"));
    }

    fn run(&mut self, body: impl FnOnce(&mut Self) -> Result<()>) {
        if let Err(e) = body(self) {
            self.checks += 1;
            self.failures.push(format!("error: {e}"));
        }
    }

    fn finish(self) -> SuiteResult {
        SuiteResult {
            name: self.name,
            checks: self.checks,
            failures: self.failures,
            max_deviation: self.max_deviation,
            seconds: self.start.elapsed().as_secs_f64(),
        }
    }
}

fn random_function(grid: &Grid, domain: Domain, rng: &mut ChaCha8Rng) -> SampledFunction<f64> {
    let values = (0..grid.len())
        .map(|_| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    SampledFunction::new(grid, domain, values).expect("one value per cell")
}

fn max_diff(a: &SampledFunction<f64>, b: &SampledFunction<f64>) -> f64 {
    a.values().iter().zip(b.values()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn field_suite(p: u32) -> SuiteResult {
    let mut s = Suite::new("finite_field");
    for c in [1, 2] {
        let f = match FieldSpec::with_default_modulus(p, c) {
            Ok(f) => f,
            Err(e) => {
                s.check(false, || format!("GF({p}^{c}): {e}"));
                continue;
            }
        };
        let q = f.q();
        for a in 0..q {
            s.check(f.add_idx(a, f.neg_idx(a)) == 0, || format!("GF({q}): {a} + (-{a}) != 0"));
            if a != 0 {
                s.check(f.mul_idx(a, f.inv_idx(a)) == 1, || format!("GF({q}): {a} * {a}^-1 != 1"));
            }
            for b in 0..q {
                s.check(f.add_idx(a, b) == f.add_idx(b, a), || format!("GF({q}): + not commutative"));
                s.check(f.mul_idx(a, b) == f.mul_idx(b, a), || format!("GF({q}): * not commutative"));
                for d in 0..q {
                    let lhs = f.mul_idx(a, f.add_idx(b, d));
                    let rhs = f.add_idx(f.mul_idx(a, b), f.mul_idx(a, d));
                    s.check(lhs == rhs, || format!("GF({q}): distributivity fails at {a},{b},{d}"));
                    s.check(
                        f.mul_idx(a, f.mul_idx(b, d)) == f.mul_idx(f.mul_idx(a, b), d),
                        || format!("GF({q}): * not associative at {a},{b},{d}"),
                    );
                }
            }
        }
    }
    s.finish()
}

fn random_knumber(f: &Arc<FieldSpec>, rng: &mut ChaCha8Rng) -> KNumber {
    let lo = rng.gen_range(-4..4);
    let digits = (0..rng.gen_range(0..6)).map(|_| rng.gen_range(0..f.q())).collect();
    KNumber::from_digits(f, lo, digits)
}

fn local_suite(field: &Arc<FieldSpec>) -> SuiteResult {
    let mut s = Suite::new("local_field");
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..500 {
        let x = random_knumber(field, &mut rng);
        let y = random_knumber(field, &mut rng);
        s.check(x.add(&y).norm() <= x.norm().max(y.norm()), || format!("ultrametric fails for {x}, {y}"));
        let prod = x.norm() * y.norm();
        s.close((x.mul(&y).norm() - prod).abs() / prod.max(f64::MIN_POSITIVE), 1e-15, "norm multiplicativity");
    }
    let q = field.q() as u64;
    for k in 0..=3u32 {
        for r in 0..16u64 {
            for t in 0..16u64.min(q.pow(k)) {
                let lhs = u_of_n(field, r * q.pow(k) + t);
                let rhs = u_of_n(field, r).p_shift(-(k as i64)).add(&u_of_n(field, t));
                s.check(lhs == rhs, || format!("u({r} q^{k} + {t}) != u({r}) p^-{k} + u({t})"));
            }
        }
    }
    for k in 0..256u64 {
        let oracle = if k == 0 {
            Valuation::Infinite
        } else {
            let mut j = 0;
            while k % q.pow(j + 1) == 0 {
                j += 1;
            }
            Valuation::Finite(j as i64)
        };
        s.check(kappa(field.q(), k) == oracle, || format!("kappa({k})"));
    }
    s.finish()
}

fn analysis_suite(grid: &Grid) -> SuiteResult {
    let mut s = Suite::new("analysis");
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    // characters u(n), n < q^M, are orthonormal on the time cells of D
    let integer_cells: Vec<usize> =
        (0..grid.len()).filter(|&c| grid.time_point(c).norm() <= 1.0).collect();
    let h = grid.cell_measure::<f64>(Domain::Time);
    let count = grid.q_pow(grid.m()) as u64;
    let table: Vec<Vec<Complex<f64>>> = (0..count)
        .map(|n| integer_cells.iter().map(|&c| chi_n::<f64>(n, &grid.time_point(c))).collect())
        .collect();
    let mut worst = 0f64;
    for a in 0..table.len() {
        for b in 0..table.len() {
            let g: Complex<f64> = table[a].iter().zip(&table[b]).map(|(x, y)| x * y.conj()).sum::<Complex<f64>>() * h;
            let target = if a == b { 1.0 } else { 0.0 };
            worst = worst.max((g - target).norm());
        }
    }
    s.close(worst, 1e-12, "character orthonormality");
    s.run(|s| {
        for _ in 0..10 {
            let f = random_function(grid, Domain::Time, &mut rng);
            let fast = fourier_with(&f, TransformMethod::Fast)?;
            let naive = fourier_with(&f, TransformMethod::Naive)?;
            s.close((fast.norm() - f.norm()).abs() / f.norm(), 1e-12, "Plancherel");
            s.close(max_diff(&fast, &naive), 1e-12, "fast vs naive transform");
            s.close(max_diff(&inv_fourier(&fast)?, &f), 1e-12, "inversion");
        }
        Ok(())
    });
    s.finish()
}

fn sequence_suite(grid: &Grid) -> SuiteResult {
    let mut s = Suite::new("sequence_space");
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let field = grid.field().clone();
    let limit = grid.integer_cells() as u64;
    s.run(|s| {
        for _ in 0..10 {
            let z: Sequence<f64> = Sequence::from_pairs(
                &field,
                (0..limit).map(|n| (n, Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))),
            );
            let zh = seq_fourier(&z, grid)?;
            s.close((zh.norm_sqr() - z.norm_sqr()).abs() / z.norm_sqr(), 1e-12, "Parseval");
            s.close(seq_inv_fourier(&zh)?.max_distance(&z), 1e-12, "sequence inversion");
            let m = rng.gen_range(0..limit);
            let moved = seq_fourier(&seq_translate(&z, m), grid)?;
            let um = u_of_n(&field, m);
            let expected = zh.map(|c, v| v * crate::analysis::chi::<f64>(&um.mul(&grid.freq_point(c))));
            s.close(max_diff(&moved, &expected), 1e-12, "translation intertwining");
        }
        Ok(())
    });
    s.finish()
}

fn frame_suite(grid: &Grid) -> SuiteResult {
    let mut s = Suite::new("frame_lab");
    s.run(|s| {
        let ranges = Ranges::full(grid);
        let haar = GeneratorSet::<f64>::haar(grid, 0.0, Side::Primal);
        let b = bessel_bounds(&haar, &ranges, None)?;
        s.close((b.lower - 1.0).abs().max((b.upper - 1.0).abs()), 1e-8, "Haar frame bounds");
        let doubled = haar.map_generator(1, |f| f.scale(Complex::new(2.0, 0.0)))?;
        let b = bessel_bounds(&doubled, &ranges, None)?;
        s.close((b.upper - 4.0).abs(), 1e-6, "doubled Bessel bound");
        s.close((b.upper_power - b.upper).abs() / b.upper, 1e-8, "power iteration vs Jacobi");
        Ok(())
    });
    s.finish()
}

fn characterization_suite(grid: &Grid) -> SuiteResult {
    let mut s = Suite::new("characterization");
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    s.run(|s| {
        let options = CheckOptions::new(grid);
        let ranges = options.ranges;
        let primal = GeneratorSet::<f64>::haar(grid, 0.0, Side::Primal);
        let dual = GeneratorSet::<f64>::haar(grid, 0.0, Side::Dual);
        let mut worst = 0f64;
        for k in 0..ranges.k_max {
            let sym = t_k(&primal, &dual, k, &ranges)?;
            let target = if k == 0 { 1.0f64 } else { 0.0 };
            for v in sym.values.iter().flatten() {
                worst = worst.max((v - target).norm());
            }
        }
        s.close(worst, 1e-12, "Haar symbols");
        let two = |f: &SampledFunction<f64>| f.scale(Complex::new(2.0, 0.0));
        let t0 = t_k(&primal.map_generator(1, two)?, &dual.map_generator(1, two)?, 0, &ranges)?;
        let dev = t0.values.iter().flatten().map(|v| (v - 1.0).norm()).fold(0.0, f64::max);
        s.close((dev - 3.0).abs(), 1e-12, "doubled t_0 deviation");
        let lemma_ranges = Ranges { j_max: 3.min(ranges.j_max), ..ranges };
        for _ in 0..20 {
            let f = random_function(grid, Domain::Frequency, &mut rng);
            let g = random_function(grid, Domain::Frequency, &mut rng);
            let e = lemma31_check(&primal, &g, &lemma_ranges)?;
            s.close(e.deviation, 1e-10, "energy identity");
            let m = lemma32_check(&primal, &dual, &f, &g, &ranges)?;
            s.close(m.deviation, 1e-10, "mixed identity");
        }
        let omega = OmegaSet::full(grid);
        let report = check_nwbf(&primal, &dual, &omega, &options)?;
        s.check(report.overall, || format!("Haar check reports {}", report.status));
        let cases = standard_cases(grid, 0.0, 1)?;
        let summary = theorem_equivalence_harness(&cases, &omega, &options)?;
        s.check(summary.agreements == cases.len(), || {
            format!("equivalence harness agrees on {}/{}", summary.agreements, cases.len())
        });
        Ok(())
    });
    s.finish()
}

fn report_suite(p: u32, m: u32, n: u32) -> SuiteResult {
    let mut s = Suite::new("cli_report");
    let text = format!(
        r#"{{"field": {{"p": {p}}}, "grid": {{"m": {m}, "n": {n}}},
            "primal": {{"kind": "haar"}}, "dual": {{"kind": "haar"}}, "battery": 5}}"#
    );
    s.run(|s| {
        let cfg = crate::report::RunConfig::from_json(&text, ".")?;
        let a = crate::report::run(&cfg)?;
        let b = crate::report::run(&cfg)?;
        s.check(a.exit_code() == 0, || "Haar run does not pass".into());
        s.check(a.json == b.json, || "reports differ between identical runs".into());
        let again = crate::report::config_from_report(&a.json, ".")?;
        s.check(crate::report::run(&again)?.json == a.json, || "embedded config does not reproduce".into());
        Ok(())
    });
    s.finish()
}

/// Runs every suite on `GF(p)((x))` with an `M x N` grid.
pub fn run_selftest(p: u32, m: u32, n: u32) -> Result<SelftestSummary> {
    let start = Instant::now();
    let field = Arc::new(FieldSpec::prime(p)?);
    let grid = Grid::new(field.clone(), m, n)?;
    let suites = vec![
        field_suite(p),
        local_suite(&field),
        analysis_suite(&grid),
        sequence_suite(&grid),
        frame_suite(&grid),
        characterization_suite(&grid),
        report_suite(p, m, n),
    ];
    Ok(SelftestSummary { p, m, n, suites, seconds: start.elapsed().as_secs_f64() })
}
