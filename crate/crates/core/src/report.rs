//! Verification suites producing `(suite, params, measured, expected, tol,
//! pass)` rows, plus their CSV and JSON renderings.

use std::collections::BTreeMap;
use std::path::PathBuf;

use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dh_orbit::{dh_closed_form, DhQuadrature};
use crate::error::{Error, Result};
use crate::exterior::{
    anticommutator_violations, supertrace, supertrace_berezin_bridge_check, CliffordWord, Coefficient, Exact, Scale,
};
use crate::fit::ExpansionFit;
use crate::heat_gaussian::{chain_relative_error, random_chains, semigroup_defect, LineRule};
use crate::lie_su2::{kirillov_residual, HighestWeight};
use crate::toeplitz::{
    leading_symbol_residual, poisson_commutator_residual, product_defect, quantize, Symbol, ToeplitzConfig,
};
use crate::torsion::{consistency_grid, consistency_row, nondegeneracy_min, w0_exact, w1_exact};
use crate::w_evaluator::{calibrate, w0_calibrated, w1_by_weight_shift, WGrids, CALIBRATION_TARGET, DEFAULT_STEPS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Toeplitz,
    Kirillov,
    Dh,
    Clifford,
    Gauss,
    W0,
    Torsion,
    Nondeg,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Toeplitz => "toeplitz",
            Suite::Kirillov => "kirillov",
            Suite::Dh => "dh",
            Suite::Clifford => "clifford",
            Suite::Gauss => "gauss",
            Suite::W0 => "w0",
            Suite::Torsion => "torsion",
            Suite::Nondeg => "nondeg",
        }
    }

    /// Tolerance names and defaults understood by the suite.
    pub fn tolerances(self) -> &'static [(&'static str, f64)] {
        match self {
            Suite::Toeplitz => &[("slope", 0.15), ("r2", 0.98), ("diagonal", 1e-9)],
            Suite::Kirillov => &[("residual", 1e-7)],
            Suite::Dh => &[("residual", 1e-10)],
            Suite::Clifford => &[],
            Suite::Gauss => &[("relative", 1e-6), ("semigroup", 1e-10)],
            Suite::W0 => &[("w0", 1e-3), ("w1", 1e-2)],
            Suite::Torsion => &[],
            Suite::Nondeg => &[("zero", 1e-6), ("ratio", 1e-3)],
        }
    }

    fn default_a_max(self) -> u32 {
        match self {
            Suite::Kirillov => 10,
            Suite::Torsion => 6,
            _ => 5,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

/// Settings that may come from flags or from a JSON file; every field is
/// optional so the two can be merged.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigOverrides {
    pub p_list: Option<Vec<usize>>,
    pub symbol: Option<String>,
    pub a_max: Option<u32>,
    pub grid_order: Option<usize>,
    pub m_max: Option<usize>,
    pub chains: Option<usize>,
    pub seed: Option<u64>,
    pub sphere_order: Option<usize>,
    pub n_phi: Option<usize>,
    pub t_nodes: Option<usize>,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    pub output: Option<PathBuf>,
    pub format: Option<OutputFormat>,
    pub timestamp: Option<bool>,
}

impl ConfigOverrides {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// Fields set here win over `base`.
    pub fn over(self, base: ConfigOverrides) -> ConfigOverrides {
        let mut tolerances = base.tolerances;
        tolerances.extend(self.tolerances);
        ConfigOverrides {
            p_list: self.p_list.or(base.p_list),
            symbol: self.symbol.or(base.symbol),
            a_max: self.a_max.or(base.a_max),
            grid_order: self.grid_order.or(base.grid_order),
            m_max: self.m_max.or(base.m_max),
            chains: self.chains.or(base.chains),
            seed: self.seed.or(base.seed),
            sphere_order: self.sphere_order.or(base.sphere_order),
            n_phi: self.n_phi.or(base.n_phi),
            t_nodes: self.t_nodes.or(base.t_nodes),
            tolerances,
            output: self.output.or(base.output),
            format: self.format.or(base.format),
            timestamp: self.timestamp.or(base.timestamp),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub suite: Suite,
    pub p_list: Vec<usize>,
    pub symbol: String,
    pub a_max: u32,
    pub grid_order: usize,
    pub m_max: usize,
    pub chains: usize,
    pub seed: u64,
    pub w_grids: WGrids,
    pub toeplitz: ToeplitzConfig,
    pub tolerances: BTreeMap<String, f64>,
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
    pub timestamp: bool,
}

impl RunConfig {
    pub fn new(suite: Suite, o: ConfigOverrides) -> Result<Self> {
        let w = WGrids::default();
        let cfg = RunConfig {
            suite,
            p_list: o.p_list.unwrap_or_else(|| vec![8, 16, 32, 64]),
            symbol: o.symbol.unwrap_or_else(|| "u2".into()),
            a_max: o.a_max.unwrap_or(suite.default_a_max()),
            grid_order: o.grid_order.unwrap_or(16),
            m_max: o.m_max.unwrap_or(3),
            chains: o.chains.unwrap_or(100),
            seed: o.seed.unwrap_or(2024),
            w_grids: WGrids {
                sphere_order: o.sphere_order.unwrap_or(w.sphere_order),
                n_phi: o.n_phi.unwrap_or(w.n_phi),
                t_nodes: o.t_nodes.unwrap_or(w.t_nodes),
            },
            toeplitz: ToeplitzConfig::default(),
            tolerances: o.tolerances,
            output: o.output,
            format: o.format.unwrap_or_default(),
            timestamp: o.timestamp.unwrap_or(false),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        if self.p_list.is_empty() || self.p_list.contains(&0) || self.p_list.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config(format!("p-list {:?} must be strictly increasing and positive", self.p_list)));
        }
        let known = self.suite.tolerances();
        for (k, v) in &self.tolerances {
            if !known.iter().any(|(name, _)| name == k) {
                return Err(Error::Config(format!("suite {} has no tolerance named {k:?}", self.suite.name())));
            }
            if !(*v > 0.0) || !v.is_finite() {
                return Err(Error::Config(format!("tolerance {k} = {v} must be positive")));
            }
        }
        if self.m_max == 0 || self.m_max > 3 {
            return Err(Error::Config(format!("m-max {} outside 1..=3", self.m_max)));
        }
        Symbol::from_name(&self.symbol).map_err(|e| Error::Config(e.to_string()))?;
        Ok(())
    }

    pub fn tol(&self, name: &str) -> f64 {
        self.tolerances.get(name).copied().unwrap_or_else(|| {
            self.suite.tolerances().iter().find(|(k, _)| *k == name).map(|(_, v)| *v).expect("declared tolerance")
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub suite: String,
    pub params: String,
    pub measured: f64,
    pub expected: f64,
    pub tol: f64,
    pub pass: bool,
}

impl ReportRow {
    /// `pass = |measured − expected| ≤ tol`.
    pub fn close(suite: Suite, params: String, measured: f64, expected: f64, tol: f64) -> Self {
        let pass = (measured - expected).abs() <= tol;
        ReportRow { suite: suite.name().into(), params, measured, expected, tol, pass }
    }

    /// A row whose pass flag follows its own criterion (slope fits,
    /// threshold tests).
    pub fn declared(suite: Suite, params: String, measured: f64, expected: f64, tol: f64, pass: bool) -> Self {
        ReportRow { suite: suite.name().into(), params, measured, expected, tol, pass }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub suite: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
    pub rows: Vec<ReportRow>,
}

/// Twelve significant digits.
pub fn fmt12(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.11e}")
    } else {
        format!("{x}")
    }
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ReportRow> {
        self.rows.iter().filter(|r| !r.pass)
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(["suite", "params", "measured", "expected", "tol", "pass"]).map_err(io)?;
        for r in &self.rows {
            let pass = if r.pass { "true" } else { "false" };
            w.write_record([&r.suite, &r.params, &fmt12(r.measured), &fmt12(r.expected), &fmt12(r.tol), pass])
                .map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
    }

    pub fn to_json(&self) -> Result<String> {
        let round = |x: f64| fmt12(x).parse::<f64>().unwrap_or(x);
        let rounded = Report {
            rows: self
                .rows
                .iter()
                .map(|r| ReportRow {
                    measured: round(r.measured),
                    expected: round(r.expected),
                    tol: round(r.tol),
                    ..r.clone()
                })
                .collect(),
            ..self.clone()
        };
        serde_json::to_string_pretty(&rounded).map(|s| s + "\n").map_err(|e| Error::Io(e.to_string()))
    }

    pub fn render(&self, format: OutputFormat) -> Result<String> {
        match format {
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Json => self.to_json(),
        }
    }
}

/// Runs the configured suite; rows come back sorted by parameters.
pub fn run(cfg: &RunConfig) -> Result<Report> {
    let mut rows = match cfg.suite {
        Suite::Toeplitz => toeplitz_rows(cfg)?,
        Suite::Kirillov => kirillov_rows(cfg)?,
        Suite::Dh => dh_rows(cfg)?,
        Suite::Clifford => clifford_rows(cfg)?,
        Suite::Gauss => gauss_rows(cfg)?,
        Suite::W0 => w0_rows(cfg)?,
        Suite::Torsion => torsion_rows(cfg)?,
        Suite::Nondeg => nondeg_rows(cfg)?,
    };
    rows.sort_by(|a, b| (&a.suite, &a.params).cmp(&(&b.suite, &b.params)));
    let timestamp = cfg
        .timestamp
        .then(|| std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0));
    Ok(Report { suite: cfg.suite.name().into(), timestamp, rows })
}

fn p_label(p_list: &[usize]) -> String {
    p_list.iter().map(|p| p.to_string()).collect::<Vec<_>>().join("/")
}

fn fit_row(cfg: &RunConfig, name: &str, fit: &ExpansionFit, slope_tol: f64) -> ReportRow {
    let params = format!("{name} p={}", p_label(&fit.p_list));
    match fit.slope() {
        Some(slope) => {
            let pass = fit.accepts(-1.0, slope_tol, cfg.tol("r2"));
            ReportRow::declared(Suite::Toeplitz, params, slope, -1.0, slope_tol, pass)
        }
        // residuals at round-off: nothing to fit, the defect itself is zero
        None => ReportRow::close(Suite::Toeplitz, params, fit.max_residual(), 0.0, cfg.toeplitz.zero_floor),
    }
}

fn toeplitz_rows(cfg: &RunConfig) -> Result<Vec<ReportRow>> {
    let h = Symbol::from_name(&cfg.symbol)?;
    let slope = cfg.tol("slope");
    // the commutator law carries a second-order term of its own; its band is
    // a third wider
    let bracket_slope = slope * 4.0 / 3.0;
    let mut rows = vec![
        fit_row(
            cfg,
            &format!("trace symbol={}", cfg.symbol),
            &leading_symbol_residual(&h, &cfg.p_list, &cfg.toeplitz)?,
            slope,
        ),
        fit_row(cfg, "product u·u", &product_defect(&Symbol::Z, &Symbol::Z, &cfg.p_list, &cfg.toeplitz)?, slope),
        fit_row(
            cfg,
            "bracket x,y",
            &poisson_commutator_residual(&Symbol::X, &Symbol::Y, &cfg.p_list, &cfg.toeplitz)?,
            bracket_slope,
        ),
    ];
    let per_p = cfg
        .p_list
        .par_iter()
        .map(|&p| {
            let basis = cfg.toeplitz.basis(p)?;
            let mut out = vec![ReportRow::close(
                Suite::Toeplitz,
                format!("dimension p={p:03}"),
                basis.dim() as f64,
                (p + 1) as f64,
                0.0,
            )];
            if p <= 32 {
                let t = quantize(&Symbol::Z, &basis)?;
                let worst = (0..=p)
                    .map(|k| (t.entries[(k, k)] - (2.0 * k as f64 - p as f64) / (p as f64 + 2.0)).norm())
                    .fold(0.0, f64::max);
                out.push(ReportRow::close(
                    Suite::Toeplitz,
                    format!("spin-diagonal p={p:03}"),
                    worst,
                    0.0,
                    cfg.tol("diagonal"),
                ));
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    rows.extend(per_p.into_iter().flatten());
    Ok(rows)
}

/// 50 points of `[0.05, 3]`.
pub fn kirillov_times() -> Vec<f64> {
    (0..50).map(|k| 0.05 + 2.95 * k as f64 / 49.0).collect()
}

fn kirillov_rows(cfg: &RunConfig) -> Result<Vec<ReportRow>> {
    let dh = DhQuadrature::default();
    let times = kirillov_times();
    (0..=cfg.a_max)
        .into_par_iter()
        .map(|a| {
            let worst = times
                .iter()
                .map(|&t| kirillov_residual(HighestWeight::new(a), t, &dh))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .fold(0.0, f64::max);
            Ok(ReportRow::close(Suite::Kirillov, format!("a={a:02} t=50pts"), worst, 0.0, cfg.tol("residual")))
        })
        .collect()
}

fn dh_rows(cfg: &RunConfig) -> Result<Vec<ReportRow>> {
    let dh = DhQuadrature::default();
    let mut rows = Vec::new();
    for mass in [0.5, 1.0, 2.5, 6.0, 11.0] {
        for t in [0.3, 1.1, 2.9] {
            let v = dh.evaluate(mass, t)?;
            let exact = dh_closed_form(mass, t);
            let miss = (v.value - exact).norm();
            rows.push(ReportRow::close(Suite::Dh, format!("mass={mass} t={t}"), miss, 0.0, cfg.tol("residual")));
        }
    }
    Ok(rows)
}

fn clifford_rows(cfg: &RunConfig) -> Result<Vec<ReportRow>> {
    let unit = Scale::<Exact>::unit();
    let mut rows = Vec::new();
    for m in 1..=cfg.m_max {
        let bad = anticommutator_violations(m, &unit)?;
        rows.push(ReportRow::close(Suite::Clifford, format!("anticommutators m={m}"), bad as f64, 0.0, 0.0));
        let mut wrong = 0;
        for w in CliffordWord::monomials(m) {
            let st = supertrace(&w.operator(&unit)?)?;
            wrong += usize::from(st.is_zero() == w.is_full());
        }
        rows.push(ReportRow::close(Suite::Clifford, format!("monomial-words m={m}"), wrong as f64, 0.0, 0.0));
    }
    for m in 1..=6 {
        let st = supertrace(&CliffordWord::full(m).operator(&unit)?)?;
        let expected = (-2i64).pow(m as u32);
        let pass = st == Exact::from_i64(expected);
        rows.push(ReportRow::declared(
            Suite::Clifford,
            format!("full-word m={m}"),
            st.to_complex(1.0).re,
            expected as f64,
            0.0,
            pass,
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for s in [1, 2] {
        let scale = Scale::<Exact>::exact_integer(s)?;
        let mut nonzero = 0;
        let mut nontrivial = 0;
        for k in 0..100 {
            let m = 1 + k % cfg.m_max;
            let w = if k % 2 == 0 { CliffordWord::random(m, &mut rng) } else { CliffordWord::random_full(m, &mut rng) };
            nonzero += usize::from(!supertrace_berezin_bridge_check(&w, &scale)?.is_zero());
            nontrivial += usize::from(!supertrace(&w.operator(&scale)?)?.is_zero());
        }
        rows.push(ReportRow::close(Suite::Clifford, format!("bridge s={s} words=100"), nonzero as f64, 0.0, 0.0));
        rows.push(ReportRow::declared(
            Suite::Clifford,
            format!("bridge-nontrivial s={s} words=100"),
            nontrivial as f64,
            50.0,
            0.0,
            nontrivial >= 50,
        ));
    }
    Ok(rows)
}

fn gauss_rows(cfg: &RunConfig) -> Result<Vec<ReportRow>> {
    let rule = LineRule::oracle();
    let chains = random_chains(cfg.chains, 2, cfg.seed)?;
    let mut rows = chains
        .par_iter()
        .enumerate()
        .map(|(k, c)| {
            let err = chain_relative_error(c, &rule)?;
            Ok(ReportRow::declared(
                Suite::Gauss,
                format!("chain={k:03} j={}", c.len()),
                err,
                0.0,
                cfg.tol("relative"),
                err < cfg.tol("relative"),
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    for (s, t, x, z) in [(0.3, 0.5, 0.1, -0.4), (1.0, 2.0, 1.5, 0.0), (0.05, 0.2, -0.3, 0.2), (2.5, 0.7, -1.0, 2.0)] {
        rows.push(ReportRow::close(
            Suite::Gauss,
            format!("semigroup s={s} t={t} x={x} z={z}"),
            semigroup_defect(s, t, x, z, &rule),
            0.0,
            cfg.tol("semigroup"),
        ));
    }
    Ok(rows)
}

fn w0_rows(cfg: &RunConfig) -> Result<Vec<ReportRow>> {
    let g = &cfg.w_grids;
    let cal = calibrate(g)?;
    let mut rows = vec![ReportRow::close(
        Suite::W0,
        "calibration a=1 b=0".into(),
        (cal.factor * cal.raw).re,
        CALIBRATION_TARGET,
        cfg.tol("w0") * CALIBRATION_TARGET,
    )];
    for (a, b) in [(2, 1), (3, 1), (1, 2)] {
        let v = w0_calibrated(a, b, g, &cal)?.value;
        let exact = w0_exact(a, b)?.to_f64();
        rows.push(ReportRow::close(Suite::W0, format!("w0 a={a} b={b}"), v, exact, cfg.tol("w0") * exact));
    }
    for (a, b) in [(1, 0), (2, 1)] {
        let v = w1_by_weight_shift(a, b, 0, 0, g, &DEFAULT_STEPS)?;
        let exact = w1_exact(a, b, 0, 0)?.to_f64();
        rows.push(ReportRow::close(Suite::W0, format!("w1 a={a} b={b} a'=0 b'=0"), v, exact, cfg.tol("w1") * exact));
    }
    Ok(rows)
}

fn torsion_rows(cfg: &RunConfig) -> Result<Vec<ReportRow>> {
    consistency_grid(cfg.a_max)
        .par_iter()
        .map(|d| {
            let r = consistency_row(d)?;
            let params = format!(
                "a={} b={} a'={:+} b'={:+} w0={} w1={} c3={} c2={}",
                d.a, d.b, d.a_shift, d.b_shift, r.w0, r.w1, r.coefficients[0], r.coefficients[1]
            );
            Ok(ReportRow::close(Suite::Torsion, params, if r.consistent { 1.0 } else { 0.0 }, 1.0, 0.0))
        })
        .collect()
}

fn nondeg_rows(cfg: &RunConfig) -> Result<Vec<ReportRow>> {
    let zero = cfg.tol("zero");
    let mut rows = (0..=cfg.a_max)
        .flat_map(|a| (0..=cfg.a_max).map(move |b| (a, b)))
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&(a, b)| {
            let min = nondegeneracy_min(a, b, cfg.grid_order)?;
            let expected = (a as f64 - b as f64).powi(2);
            Ok(ReportRow::declared(
                Suite::Nondeg,
                format!("min a={a} b={b}"),
                min,
                expected,
                zero,
                (min < zero) == (a == b),
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let ratio = nondegeneracy_min(3, 1, cfg.grid_order)? / nondegeneracy_min(2, 0, cfg.grid_order)?;
    rows.push(ReportRow::close(Suite::Nondeg, "ratio (3,1)/(2,0)".into(), ratio, 1.0, cfg.tol("ratio")));
    Ok(rows)
}
