//! Run configuration, orchestration of the bi-frame checks and deterministic
//! JSON reports.

use std::io;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::ser::Serialize;
use serde::Deserialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::analysis::{Domain, Grid, OmegaSet, SampledFunction, MAX_CELLS};
use crate::characterization::{check_nwbf, CheckOptions, CheckReport, Tolerances};
use crate::error::{Error, Result};
use crate::finite_field::FieldSpec;
use crate::frame::{bessel_bounds, GeneratorSet, Ranges, Side};
use crate::finite_field::MAX_DEGREE;

#[derive(Debug, Clone, PartialEq, serde::Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldConfig {
    pub p: u32,
    #[serde(default = "one_u32")]
    pub c: u32,
    /// Coefficients of the modulus, constant term first.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<Vec<u32>>,
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub m: u32,
    pub n: u32,
}

/// Truncation; omitted bounds take the largest value the grid supports.
#[derive(Debug, Clone, Copy, PartialEq, Default, serde::Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RangesConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j_max: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_max: Option<u64>,
}

/// An adjustment applied to built-in or loaded generators, in order.
#[derive(Debug, Clone, PartialEq, serde::Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase")]
pub enum Modifier {
    /// Multiply generator `ell` by `factor`.
    Scale { ell: usize, factor: f64 },
    /// Translate the spectrum of generator `ell` by `u(k)`.
    Shift { ell: usize, k: u64 },
    /// Multiply every generator by one seeded unimodular phase per cell.
    Phase { seed: u64 },
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GeneratorConfig {
    /// `psi_0^ = 1_D`, `psi_l^ = 1_{u(l)+D}` for `l < q`.
    Haar {
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        modifiers: Vec<Modifier>,
    },
    /// Haar with generator `ell` multiplied by `factor`.
    Scaled {
        #[serde(default = "one_usize")]
        ell: usize,
        factor: f64,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        modifiers: Vec<Modifier>,
    },
    /// Spectra from an `ell,cell,re,im` table, relative to the config file.
    File {
        path: String,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        modifiers: Vec<Modifier>,
    },
}

impl GeneratorConfig {
    fn modifiers(&self) -> &[Modifier] {
        match self {
            GeneratorConfig::Haar { modifiers }
            | GeneratorConfig::Scaled { modifiers, .. }
            | GeneratorConfig::File { modifiers, .. } => modifiers,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, serde::Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum OmegaConfig {
    #[default]
    Full,
    Empty,
    /// Nonzero cells whose leading digit index is listed.
    Sector { leading: Vec<u32> },
    /// The cells of the ring of integers (a ball, not dilation invariant).
    Integers,
    /// Every cell outside the ring of integers (not dilation invariant).
    Nonintegers,
    /// Explicit cells; dilation invariance is enforced unless `unchecked`.
    Cells {
        cells: Vec<usize>,
        #[serde(default)]
        unchecked: bool,
    },
}

/// A complete run description.
#[derive(Debug, Clone, PartialEq, serde::Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub field: FieldConfig,
    pub grid: GridConfig,
    #[serde(default)]
    pub ranges: RangesConfig,
    #[serde(default)]
    pub s: f64,
    pub primal: GeneratorConfig,
    pub dual: GeneratorConfig,
    #[serde(default)]
    pub omega: OmegaConfig,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_battery")]
    pub battery: usize,
    /// Directory that relative generator paths are resolved against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

fn one_u32() -> u32 {
    1
}

fn one_usize() -> usize {
    1
}

fn default_battery() -> usize {
    20
}

/// Everything a run needs, built from a validated [`RunConfig`].
#[derive(Debug, Clone)]
pub struct Setup {
    pub grid: Grid,
    pub primal: GeneratorSet<f64>,
    pub dual: GeneratorSet<f64>,
    pub omega: OmegaSet,
    pub options: CheckOptions,
}

impl RunConfig {
    /// Parses JSON text; structural problems carry line and column.
    pub fn from_json(text: &str, base_dir: impl Into<PathBuf>) -> Result<Self> {
        let mut cfg: RunConfig = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        cfg.base_dir = base_dir.into();
        Ok(cfg)
    }

    /// Checks every constraint and builds the run, reporting all violations
    /// at once.
    pub fn build(&self) -> Result<Setup> {
        let mut problems = Vec::new();
        let field = match build_field(&self.field) {
            Ok(f) => Some(Arc::new(f)),
            Err(e) => {
                problems.push(format!("field: {e}"));
                None
            }
        };
        if self.grid.m == 0 || self.grid.n == 0 {
            problems.push(format!("grid: M = {} and N = {} must both be at least 1", self.grid.m, self.grid.n));
        }
        if !self.s.is_finite() {
            problems.push(format!("s = {} is not finite", self.s));
        }
        for (name, t) in [("unitary", self.tolerances.unitary), ("identity", self.tolerances.identity)] {
            if !(t.is_finite() && t > 0.0) {
                problems.push(format!("tolerances.{name} = {t} must be positive"));
            }
        }
        let grid = match (&field, self.grid.m >= 1 && self.grid.n >= 1) {
            (Some(f), true) => match Grid::new(f.clone(), self.grid.m, self.grid.n) {
                Ok(g) => Some(g),
                Err(e) => {
                    problems.push(format!("grid: {e} (at most {MAX_CELLS} cells)"));
                    None
                }
            },
            _ => None,
        };
        let Some(grid) = grid else {
            return Err(Error::Config(problems));
        };
        let full = Ranges::full(&grid);
        let ranges = Ranges {
            j_max: self.ranges.j_max.unwrap_or(full.j_max),
            k_max: self.ranges.k_max.unwrap_or(full.k_max),
        };
        if ranges.j_max > full.j_max {
            problems.push(format!(
                "ranges.j_max = {} violates J_max <= M + N - 2 = {}",
                ranges.j_max, full.j_max
            ));
        }
        if ranges.k_max == 0 || ranges.k_max > full.k_max {
            problems.push(format!(
                "ranges.k_max = {} violates 1 <= K_max <= q^N = {}",
                ranges.k_max, full.k_max
            ));
        }
        let primal = collect(&mut problems, "primal", build_generators(&self.primal, &grid, self.s, Side::Primal, &self.base_dir));
        let dual = collect(&mut problems, "dual", build_generators(&self.dual, &grid, self.s, Side::Dual, &self.base_dir));
        if let (Some(p), Some(d)) = (&primal, &dual) {
            if p.wavelets() != d.wavelets() {
                problems.push(format!(
                    "primal has {} wavelet generators but dual has {}",
                    p.wavelets(),
                    d.wavelets()
                ));
            }
        }
        let omega = collect(&mut problems, "omega", build_omega(&self.omega, &grid));
        match (primal, dual, omega) {
            (Some(primal), Some(dual), Some(omega)) if problems.is_empty() => Ok(Setup {
                options: CheckOptions {
                    ranges,
                    tolerances: self.tolerances,
                    seed: self.seed,
                    battery: self.battery,
                },
                grid,
                primal,
                dual,
                omega,
            }),
            _ => Err(Error::Config(problems)),
        }
    }
}

fn collect<T>(problems: &mut Vec<String>, what: &str, r: Result<T>) -> Option<T> {
    match r {
        Ok(v) => Some(v),
        Err(Error::Config(list)) => {
            problems.extend(list.into_iter().map(|p| format!("{what}: {p}")));
            None
        }
        Err(e) => {
            problems.push(format!("{what}: {e}"));
            None
        }
    }
}

fn build_field(cfg: &FieldConfig) -> Result<FieldSpec> {
    if cfg.c == 0 || cfg.c as usize > MAX_DEGREE {
        return Err(Error::Range(format!("extension degree c = {} must lie in 1 ..= {MAX_DEGREE}", cfg.c)));
    }
    match &cfg.modulus {
        Some(m) => FieldSpec::new(cfg.p, cfg.c, Some(m)),
        None => FieldSpec::with_default_modulus(cfg.p, cfg.c),
    }
}

/// Reads and validates a configuration file.
pub fn load_config(path: impl AsRef<Path>) -> Result<RunConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(io::Error::new(e.kind(), format!("{}: {e}", path.display()))))?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let cfg = RunConfig::from_json(&text, base).map_err(|e| match e {
        Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
        other => other,
    })?;
    cfg.build()?;
    Ok(cfg)
}

fn shift_spectrum(grid: &Grid, f: &SampledFunction<f64>, k: u64) -> Result<SampledFunction<f64>> {
    let off = grid
        .lattice_offset(k)
        .ok_or_else(|| Error::Range(format!("shift u({k}) leaves the frequency window (k < q^M = {})", grid.q_pow(grid.m()))))?;
    let mut out = SampledFunction::zeros(grid, Domain::Frequency);
    for c in 0..grid.len() {
        out.values_mut()[grid.cell_add(c, off)] = f.value(c);
    }
    Ok(out)
}

/// Builds one side's generators from its specification.
pub fn build_generators(
    spec: &GeneratorConfig,
    grid: &Grid,
    s: f64,
    side: Side,
    base_dir: &Path,
) -> Result<GeneratorSet<f64>> {
    let mut gen = match spec {
        GeneratorConfig::Haar { .. } => GeneratorSet::haar(grid, s, side),
        GeneratorConfig::Scaled { ell, factor, .. } => {
            let haar = GeneratorSet::haar(grid, s, side);
            if *ell > haar.wavelets() {
                return Err(Error::Range(format!("scaled generator {ell} of {}", haar.wavelets())));
            }
            haar.map_generator(*ell, |f| f.scale(Complex::new(*factor, 0.0)))?
        }
        GeneratorConfig::File { path, .. } => {
            let full = base_dir.join(path);
            let file = std::fs::File::open(&full)
                .map_err(|e| Error::Io(io::Error::new(e.kind(), format!("{}: {e}", full.display()))))?;
            let mut spectra = crate::table::read_generators(file, grid)?.into_iter();
            let psi0 = spectra.next().expect("at least one generator");
            match side {
                Side::Primal => GeneratorSet::primal(psi0, spectra.collect(), s)?,
                Side::Dual => GeneratorSet::dual(psi0, spectra.collect(), s)?,
            }
        }
    };
    let mut problems = Vec::new();
    for m in spec.modifiers() {
        let step = match m {
            Modifier::Scale { ell, factor } => gen.map_generator(*ell, |f| f.scale(Complex::new(*factor, 0.0))),
            Modifier::Shift { ell, k } => match shift_spectrum(grid, &SampledFunction::zeros(grid, Domain::Frequency), *k) {
                Ok(_) => gen.map_generator(*ell, |f| shift_spectrum(grid, f, *k).expect("offset checked")),
                Err(e) => Err(e),
            },
            Modifier::Phase { seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                let mut out = Ok(gen.clone());
                for ell in 0..=gen.wavelets() {
                    let phases: Vec<Complex<f64>> = (0..grid.len())
                        .map(|_| Complex::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU)))
                        .collect();
                    out = out.and_then(|g: GeneratorSet<f64>| g.map_generator(ell, |f| f.map(|c, v| v * phases[c])));
                }
                out
            }
        };
        match step {
            Ok(g) => gen = g,
            Err(e) => problems.push(format!("modifier {m:?}: {e}")),
        }
    }
    if problems.is_empty() {
        Ok(gen)
    } else {
        Err(Error::Config(problems))
    }
}

fn build_omega(cfg: &OmegaConfig, grid: &Grid) -> Result<OmegaSet> {
    match cfg {
        OmegaConfig::Full => Ok(OmegaSet::full(grid)),
        OmegaConfig::Empty => Ok(OmegaSet::empty(grid)),
        OmegaConfig::Sector { leading } => {
            if let Some(d) = leading.iter().find(|&&d| d == 0 || d >= grid.q()) {
                return Err(Error::Range(format!("leading digit {d} must lie in 1 .. q = {}", grid.q())));
            }
            OmegaSet::sector(grid, leading)
        }
        OmegaConfig::Integers | OmegaConfig::Nonintegers => {
            let inside = matches!(cfg, OmegaConfig::Integers);
            let member = (0..grid.len())
                .map(|c| (grid.freq_point(c).norm() <= 1.0) == inside)
                .collect();
            OmegaSet::new_unchecked(grid, member)
        }
        OmegaConfig::Cells { cells, unchecked } => {
            let mut member = vec![false; grid.len()];
            for &c in cells {
                *member
                    .get_mut(c)
                    .ok_or_else(|| Error::Range(format!("cell {c} outside a grid of {} cells", grid.len())))? = true;
            }
            if *unchecked {
                OmegaSet::new_unchecked(grid, member)
            } else {
                OmegaSet::new(grid, member)
            }
        }
    }
}

/// Pretty JSON whose floats carry 17 significant digits.
struct ExactFloats<'a>(PrettyFormatter<'a>);

impl Formatter for ExactFloats<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_array(writer)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_array(writer)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(writer, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_array_value(writer)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_object(writer)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_object(writer)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(writer, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_object_value(writer)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_object_value(writer)
    }
}

/// Serializes with fixed key order (struct order) and 17-digit floats.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, ExactFloats(PrettyFormatter::new()));
    value
        .serialize(&mut ser)
        .map_err(|e| Error::Parse(format!("serializing report: {e}")))?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}

#[derive(serde::Serialize)]
struct ReportDocument<'a> {
    config: &'a RunConfig,
    report: &'a CheckReport,
}

/// A finished run.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub report: CheckReport,
    /// The report with its configuration embedded.
    pub json: String,
}

impl RunOutcome {
    /// 0 when the overall verdict passes, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.report.overall {
            0
        } else {
            1
        }
    }
}

/// Builds and checks the configured pair.
pub fn run(config: &RunConfig) -> Result<RunOutcome> {
    let setup = config.build()?;
    let report = check_nwbf(&setup.primal, &setup.dual, &setup.omega, &setup.options)?;
    let json = to_json(&ReportDocument { config, report: &report })?;
    Ok(RunOutcome { report, json })
}

/// Recovers the configuration embedded in a report.
pub fn config_from_report(json: &str, base_dir: impl Into<PathBuf>) -> Result<RunConfig> {
    let doc: serde_json::Value = serde_json::from_str(json).map_err(|e| Error::Parse(e.to_string()))?;
    let cfg = doc
        .get("config")
        .ok_or_else(|| Error::Parse("report has no embedded config".into()))?;
    let mut cfg: RunConfig = serde_json::from_value(cfg.clone()).map_err(|e| Error::Parse(e.to_string()))?;
    cfg.base_dir = base_dir.into();
    Ok(cfg)
}

#[derive(serde::Serialize)]
struct BoundsDocument {
    ranges: Ranges,
    omega_cells: usize,
    s: f64,
    primal: crate::frame::BesselBounds<f64>,
    dual: crate::frame::BesselBounds<f64>,
}

/// Frame bounds of both sides on the configured spectral set, as JSON.
pub fn bounds_json(config: &RunConfig) -> Result<String> {
    let setup = config.build()?;
    let r = &setup.options.ranges;
    let doc = BoundsDocument {
        ranges: *r,
        omega_cells: setup.omega.count(),
        s: config.s,
        primal: bessel_bounds(&setup.primal, r, Some(&setup.omega))?,
        dual: bessel_bounds(&setup.dual, r, Some(&setup.omega))?,
    };
    to_json(&doc)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "field": {"p": 2},
        "grid": {"m": 3, "n": 3},
        "primal": {"kind": "haar"},
        "dual": {"kind": "haar"},
        "battery": 3
    }"#;

    #[test]
    fn minimal_config_runs() {
        let cfg = RunConfig::from_json(MINIMAL, ".").unwrap();
        assert_eq!(cfg.field.c, 1);
        let out = run(&cfg).unwrap();
        assert_eq!(out.exit_code(), 0);
        assert_eq!(out.report.status, "pass");
        assert!(out.json.contains("\"status\": \"pass\""));
    }

    #[test]
    fn all_violations_are_listed() {
        let text = r#"{
            "field": {"p": 2},
            "grid": {"m": 2, "n": 2},
            "ranges": {"j_max": 9, "k_max": 5},
            "s": 0.0,
            "primal": {"kind": "scaled", "ell": 4, "factor": 2.0},
            "dual": {"kind": "haar"},
            "omega": {"kind": "cells", "cells": [99]}
        }"#;
        let cfg = RunConfig::from_json(text, ".").unwrap();
        let Err(Error::Config(list)) = cfg.build() else { panic!("expected config errors") };
        assert_eq!(list.len(), 4, "{list:#?}");
        assert!(list.iter().any(|p| p.contains("K_max <= q^N")));
        assert!(list.iter().any(|p| p.contains("J_max <= M + N - 2")));
    }

    #[test]
    fn unknown_generator_lists_builtins() {
        let text = MINIMAL.replace(r#""primal": {"kind": "haar"}"#, r#""primal": {"kind": "mexican"}"#);
        let err = RunConfig::from_json(&text, ".").unwrap_err().to_string();
        assert!(err.contains("haar") && err.contains("scaled") && err.contains("file"), "{err}");
        assert!(err.contains("line"), "{err}");
    }

    #[test]
    fn floats_have_seventeen_digits() {
        let s = to_json(&vec![0.1f64, 3.0]).unwrap();
        assert!(s.contains("1.0000000000000001e-1"), "{s}");
        assert!(s.contains("3.0000000000000000e0"), "{s}");
        let back: Vec<f64> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, vec![0.1, 3.0]);
    }

    #[test]
    fn report_is_deterministic_and_round_trips() {
        let cfg = RunConfig::from_json(MINIMAL, ".").unwrap();
        let a = run(&cfg).unwrap().json;
        let b = run(&cfg).unwrap().json;
        assert_eq!(a, b);
        let again = config_from_report(&a, ".").unwrap();
        assert_eq!(run(&again).unwrap().json, a);
    }
}
