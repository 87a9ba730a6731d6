//! Run configuration: a single JSON document, validated into a [`Plan`].
//!
//! ```json
//! {
//!   "mode": "cdma-sinr",
//!   "scenario": {
//!     "transmitters": [{"alpha": 1.0, "signature_kind": "iid", "power": {"atoms": [[1.0, 1.0]]}}],
//!     "channel": {"independent": [{"atoms": [[1.0, 1.0]]}]},
//!     "noise_variance": 0.1
//!   },
//!   "snr_grid": [10.0],
//!   "output": {"path": "out.csv", "format": "csv"}
//! }
//! ```

use std::path::PathBuf;

use serde::Deserialize;
use serde_json::Value;
use stieltjes_core::{
    CdmaScenario, ChainOptions, HalfPlanePoint, JointChannelSpec, MeasureSpec, SignatureKind, SolverConfig,
    SpectralMeasure, TransmitterSpec, DEFAULT_SINR_EPSILON,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    FreeSum,
    FreeProduct,
    CdmaSinr,
    CdmaStieltjes,
    MonteCarlo,
    Compare,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Ensemble {
    Sum,
    Product,
    Cdma,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum ZGridSpec {
    Points(Vec<[f64; 2]>),
    Linear(LinearZGrid),
}

/// `points` values from `(re[0], im[0])` to `(re[1], im[1])` inclusive.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct LinearZGrid {
    re: [f64; 2],
    im: [f64; 2],
    points: usize,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum SnrGridSpec {
    Values(Vec<f64>),
    Range(SnrRange),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SnrRange {
    start: f64,
    stop: f64,
    step: f64,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SolverSpec {
    tolerance: Option<f64>,
    max_iterations: Option<usize>,
    damping: Option<f64>,
    #[serde(default)]
    check_uniqueness: bool,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct McSpec {
    n: Option<usize>,
    trials: Option<usize>,
    seed: Option<u64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct OutputSpec {
    path: Option<PathBuf>,
    format: Option<Format>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChainSpec {
    grid_points: Option<usize>,
    margin: Option<f64>,
    epsilon: Option<f64>,
    atoms: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    mode: Option<Mode>,
    scenario: Option<Value>,
    z_grid: Option<ZGridSpec>,
    snr_grid: Option<SnrGridSpec>,
    solver: Option<SolverSpec>,
    mc: Option<McSpec>,
    output: Option<OutputSpec>,
    epsilon: Option<f64>,
    power_level: Option<f64>,
    chain: Option<ChainSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TransmitterCfg {
    alpha: f64,
    signature_kind: SignatureKind,
    power: MeasureSpec,
}

/// Monte Carlo settings after defaults and command-line overrides.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McSettings {
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
}

impl Default for McSettings {
    fn default() -> Self {
        Self { n: 256, trials: 20, seed: 1 }
    }
}

/// Command-line overrides applied on top of the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub n: Option<usize>,
}

#[derive(Debug, Clone)]
pub enum Problem {
    Sum(Vec<SpectralMeasure>),
    Product(Vec<SpectralMeasure>),
    Cdma(CdmaScenario),
}

impl Problem {
    pub fn ensemble(&self) -> Ensemble {
        match self {
            Problem::Sum(_) => Ensemble::Sum,
            Problem::Product(_) => Ensemble::Product,
            Problem::Cdma(_) => Ensemble::Cdma,
        }
    }
}

/// A validated, ready-to-run configuration.
#[derive(Debug, Clone)]
pub struct Plan {
    pub mode: Mode,
    pub problem: Problem,
    pub z_grid: Vec<HalfPlanePoint>,
    pub snr_grid: Vec<f64>,
    pub solver: SolverConfig,
    pub mc: McSettings,
    pub chain: ChainOptions,
    pub epsilon: f64,
    pub power_level: Option<f64>,
    pub output: Option<PathBuf>,
    pub format: Format,
}

/// Collects violations instead of stopping at the first.
#[derive(Default)]
struct Report(Vec<String>);

impl Report {
    fn push(&mut self, msg: impl Into<String>) {
        self.0.push(msg.into());
    }

    fn missing(&mut self, field: &str) {
        self.push(format!("missing field `{field}`"));
    }

    fn take<T: for<'de> Deserialize<'de>>(&mut self, field: &str, value: Value) -> Option<T> {
        serde_json::from_value(value).map_err(|e| self.push(format!("`{field}`: {e}"))).ok()
    }
}

fn build_measures(report: &mut Report, scenario: &mut serde_json::Map<String, Value>) -> Option<Vec<SpectralMeasure>> {
    let Some(list) = scenario.remove("measures") else {
        report.missing("scenario.measures");
        return None;
    };
    let specs: Vec<MeasureSpec> = report.take("scenario.measures", list)?;
    if specs.is_empty() {
        report.push("`scenario.measures` must not be empty");
        return None;
    }
    let mut out = Vec::new();
    for (i, spec) in specs.iter().enumerate() {
        match spec.build::<f64>() {
            Ok(m) => out.push(m),
            Err(e) => report.push(format!("`scenario.measures[{i}]`: {e}")),
        }
    }
    (out.len() == specs.len()).then_some(out)
}

fn build_cdma(report: &mut Report, scenario: &mut serde_json::Map<String, Value>) -> Option<CdmaScenario> {
    let transmitters = match scenario.remove("transmitters") {
        None => {
            report.missing("scenario.transmitters");
            None
        }
        Some(Value::Array(items)) => {
            if items.is_empty() {
                report.push("`scenario.transmitters` must not be empty");
            }
            let mut out = Vec::new();
            for (i, item) in items.into_iter().enumerate() {
                let field = format!("scenario.transmitters[{i}]");
                let Some(cfg) = report.take::<TransmitterCfg>(&field, item) else { continue };
                let power = cfg.power.build::<f64>().map_err(|e| report.push(format!("`{field}.power`: {e}"))).ok();
                if cfg.signature_kind == SignatureKind::Isometric && cfg.alpha > 1.0 {
                    report.push(format!("`{field}`: isometric requires alpha <= 1"));
                    continue;
                }
                if let Some(power) = power {
                    match TransmitterSpec::new(cfg.alpha, cfg.signature_kind, power) {
                        Ok(t) => out.push(t),
                        Err(e) => report.push(format!("`{field}`: {e}")),
                    }
                }
            }
            Some(out)
        }
        Some(_) => {
            report.push("`scenario.transmitters` must be a list");
            None
        }
    };
    let channel = match scenario.remove("channel") {
        None => {
            report.missing("scenario.channel");
            None
        }
        Some(v) => report
            .take::<JointChannelSpec>("scenario.channel", v)
            .and_then(|spec| spec.build::<f64>().map_err(|e| report.push(format!("`scenario.channel`: {e}"))).ok()),
    };
    let noise = match scenario.remove("noise_variance") {
        None => {
            report.missing("scenario.noise_variance");
            None
        }
        Some(v) => report.take::<f64>("scenario.noise_variance", v),
    };
    let (transmitters, channel, noise) = (transmitters?, channel?, noise?);
    if transmitters.is_empty() {
        return None;
    }
    CdmaScenario::new(transmitters, channel, noise).map_err(|e| report.push(format!("`scenario`: {e}"))).ok()
}

fn z_grid(report: &mut Report, spec: ZGridSpec) -> Vec<HalfPlanePoint> {
    let raw: Vec<[f64; 2]> = match spec {
        ZGridSpec::Points(p) => p,
        ZGridSpec::Linear(l) => {
            if l.points == 0 {
                report.push("`z_grid.points` must be positive");
            }
            let step = |a: [f64; 2], k: usize| {
                if l.points <= 1 {
                    a[0]
                } else {
                    a[0] + (a[1] - a[0]) * k as f64 / (l.points - 1) as f64
                }
            };
            (0..l.points).map(|k| [step(l.re, k), step(l.im, k)]).collect()
        }
    };
    if raw.is_empty() {
        report.push("`z_grid` must not be empty");
    }
    let mut out = Vec::new();
    for (i, [re, im]) in raw.into_iter().enumerate() {
        match HalfPlanePoint::new(re, im) {
            Ok(z) => out.push(z),
            Err(e) => report.push(format!("`z_grid[{i}]`: {e}")),
        }
    }
    out
}

fn snr_grid(report: &mut Report, spec: SnrGridSpec) -> Vec<f64> {
    let out = match spec {
        SnrGridSpec::Values(v) => v,
        SnrGridSpec::Range(r) => {
            if !(r.step > 0.0) || r.stop < r.start {
                report.push("`snr_grid` range needs step > 0 and stop >= start");
                Vec::new()
            } else {
                let count = ((r.stop - r.start) / r.step + 1e-9).floor() as usize + 1;
                (0..count).map(|k| r.start + r.step * k as f64).collect()
            }
        }
    };
    if out.is_empty() {
        report.push("`snr_grid` must not be empty");
    }
    if out.iter().any(|v| !v.is_finite()) {
        report.push("`snr_grid` values must be finite");
    }
    out
}

fn solver(report: &mut Report, spec: SolverSpec) -> SolverConfig {
    let d = SolverConfig::default();
    let cfg = SolverConfig {
        tolerance: spec.tolerance.unwrap_or(d.tolerance),
        max_iterations: spec.max_iterations.unwrap_or(d.max_iterations),
        damping: spec.damping.unwrap_or(d.damping),
        check_uniqueness: spec.check_uniqueness,
    };
    if let Err(e) = cfg.validate() {
        report.push(format!("`solver`: {e}"));
    }
    cfg
}

fn chain(report: &mut Report, spec: ChainSpec) -> ChainOptions {
    let d = ChainOptions::default();
    let opts = ChainOptions {
        grid: None,
        grid_points: spec.grid_points.unwrap_or(d.grid_points),
        margin: spec.margin.unwrap_or(d.margin),
        epsilon: spec.epsilon,
        atoms: spec.atoms.unwrap_or(d.atoms),
    };
    if opts.grid_points < 2 || opts.atoms == 0 || !(opts.margin >= 0.0) || opts.epsilon.is_some_and(|e| !(e > 0.0)) {
        report.push("`chain` needs grid_points >= 2, atoms >= 1, margin >= 0 and epsilon > 0");
    }
    opts
}

/// Parses and validates a configuration document. On failure returns every
/// violation found.
pub fn plan(text: &str, overrides: &Overrides) -> Result<Plan, Vec<String>> {
    let raw: RawConfig = serde_json::from_str(text).map_err(|e| vec![format!("invalid config: {e}")])?;
    let mut report = Report::default();

    let mode = raw.mode;
    if mode.is_none() {
        report.missing("mode");
    }
    let mut scenario = match raw.scenario {
        Some(Value::Object(map)) => Some(map),
        Some(_) => {
            report.push("`scenario` must be an object");
            None
        }
        None => {
            report.missing("scenario");
            None
        }
    };

    let kind =
        scenario.as_mut().and_then(|s| s.remove("kind")).and_then(|v| report.take::<Ensemble>("scenario.kind", v));
    let ensemble = match mode {
        Some(Mode::FreeSum) => Some(Ensemble::Sum),
        Some(Mode::FreeProduct) => Some(Ensemble::Product),
        Some(Mode::CdmaSinr | Mode::CdmaStieltjes) => Some(Ensemble::Cdma),
        Some(Mode::MonteCarlo | Mode::Compare) => {
            if kind.is_none() {
                report.missing("scenario.kind");
            }
            kind
        }
        None => None,
    };
    if let (Some(k), Some(e)) = (kind, ensemble) {
        if k != e {
            report.push(format!("`scenario.kind` {k:?} does not match mode"));
        }
    }

    let problem = match (ensemble, scenario.as_mut()) {
        (Some(Ensemble::Sum), Some(s)) => build_measures(&mut report, s).map(Problem::Sum),
        (Some(Ensemble::Product), Some(s)) => build_measures(&mut report, s).map(Problem::Product),
        (Some(Ensemble::Cdma), Some(s)) => build_cdma(&mut report, s).map(Problem::Cdma),
        _ => None,
    };
    if let Some(s) = &scenario {
        for key in s.keys() {
            report.push(format!("unknown field `scenario.{key}`"));
        }
    }
    if let Some(Problem::Product(ms)) = &problem {
        if ms.len() < 2 {
            report.push("`scenario.measures` needs at least two factors for a product");
        }
        if matches!(mode, Some(Mode::MonteCarlo | Mode::Compare)) && ms.len() != 2 {
            report.push("Monte Carlo product ensembles take exactly two measures");
        }
        if matches!(mode, Some(Mode::MonteCarlo | Mode::Compare)) {
            if let Some(i) = ms.iter().position(|m| !m.is_nonnegative()) {
                report.push(format!("`scenario.measures[{i}]`: Monte Carlo products need nonnegative factors"));
            }
        }
    }

    let z_grid = raw.z_grid.map(|g| z_grid(&mut report, g));
    let snr_grid = raw.snr_grid.map(|g| snr_grid(&mut report, g));
    match mode {
        Some(Mode::FreeSum | Mode::FreeProduct | Mode::CdmaStieltjes) if z_grid.is_none() => report.missing("z_grid"),
        Some(Mode::MonteCarlo | Mode::Compare) => {
            let cdma = ensemble == Some(Ensemble::Cdma);
            if z_grid.is_none() && !(cdma && snr_grid.is_some()) {
                report.missing(if cdma { "z_grid` or `snr_grid" } else { "z_grid" });
            }
            if z_grid.is_some() && snr_grid.is_some() {
                report.push("give either `z_grid` or `snr_grid`, not both");
            }
        }
        _ => {}
    }
    if snr_grid.is_some() && ensemble != Some(Ensemble::Cdma) {
        report.push("`snr_grid` only applies to CDMA scenarios");
    }

    let solver = solver(&mut report, raw.solver.unwrap_or_default());
    let chain = chain(&mut report, raw.chain.unwrap_or_default());
    let mc_spec = raw.mc.unwrap_or_default();
    let d = McSettings::default();
    let mc = McSettings {
        n: overrides.n.or(mc_spec.n).unwrap_or(d.n),
        trials: overrides.trials.or(mc_spec.trials).unwrap_or(d.trials),
        seed: overrides.seed.or(mc_spec.seed).unwrap_or(d.seed),
    };
    if mc.n == 0 || mc.trials == 0 {
        report.push("`mc.n` and `mc.trials` must be positive");
    }
    let epsilon = raw.epsilon.unwrap_or(DEFAULT_SINR_EPSILON);
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        report.push("`epsilon` must be positive");
    }
    if raw.power_level.is_some_and(|p| !(p >= 0.0 && p.is_finite())) {
        report.push("`power_level` must be finite and >= 0");
    }
    let output = raw.output.unwrap_or_default();

    if !report.0.is_empty() {
        return Err(report.0);
    }
    Ok(Plan {
        mode: mode.expect("checked"),
        problem: problem.expect("checked"),
        z_grid: z_grid.unwrap_or_default(),
        snr_grid: snr_grid.unwrap_or_default(),
        solver,
        mc,
        chain,
        epsilon,
        power_level: raw.power_level,
        output: overrides.output.clone().or(output.path),
        format: overrides.format.or(output.format).unwrap_or(Format::Csv),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn errors(text: &str) -> Vec<String> {
        plan(text, &Overrides::default()).unwrap_err()
    }

    #[test]
    fn accepts_a_sum_config() {
        let p = plan(
            r#"{"mode": "free-sum", "scenario": {"measures": [{"atoms": [[2.0, 1.0]]}, {"family": "uniform", "a": 0, "b": 1, "atom_count": 8}]},
                "z_grid": {"re": [0, 0], "im": [0.1, 2], "points": 20}}"#,
            &Overrides::default(),
        )
        .unwrap();
        assert_eq!(p.z_grid.len(), 20);
        assert_eq!(p.format, Format::Csv);
        assert!((p.z_grid[19].im() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn collects_several_violations() {
        let e = errors(
            r#"{"mode": "cdma-sinr", "scenario": {"transmitters": [{"alpha": 1.5, "signature_kind": "isometric", "power": {"atoms": [[1, 1]]}}],
                "channel": {"independent": [{"atoms": [[1, 1]]}]}}}"#,
        );
        assert!(e.iter().any(|v| v.contains("isometric requires alpha <= 1")), "{e:?}");
        assert!(e.iter().any(|v| v.contains("missing field `scenario.noise_variance`")), "{e:?}");
    }

    #[test]
    fn snr_ranges_include_the_stop() {
        let mut r = Report::default();
        let g = snr_grid(&mut r, SnrGridSpec::Range(SnrRange { start: 0.0, stop: 20.0, step: 2.0 }));
        assert_eq!(g.len(), 11);
        assert_eq!(g[10], 20.0);
    }

    #[test]
    fn overrides_win() {
        let o = Overrides { seed: Some(9), n: Some(64), format: Some(Format::Json), ..Overrides::default() };
        let p = plan(
            r#"{"mode": "monte-carlo", "scenario": {"kind": "sum", "measures": [{"atoms": [[1, 1]]}]},
                "z_grid": [[0, 1]], "mc": {"n": 8, "seed": 1, "trials": 3}}"#,
            &o,
        )
        .unwrap();
        assert_eq!(p.mc, McSettings { n: 64, trials: 3, seed: 9 });
        assert_eq!(p.format, Format::Json);
    }

    #[test]
    fn rejects_unknown_and_bad_fields() {
        assert!(!errors(r#"{"mode": "free-sum", "scenario": {"measures": []}, "z_grid": [[0, -1]], "bogus": 1}"#)
            .is_empty());
        let e = errors(r#"{"mode": "free-sum", "scenario": {"measures": [{"atoms": [[1, 1]]}]}, "z_grid": [[0, -1]]}"#);
        assert!(e[0].contains("z_grid[0]"), "{e:?}");
    }
}
