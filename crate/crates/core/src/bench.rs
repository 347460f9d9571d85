//! Scripted experiments: fidelity panels comparing effective models with the
//! full Hamiltonian, and Wigner reconstructions across dephasing rates. Each
//! run produces a CSV table and a report with named pass/fail verdicts.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::{coarse_grain, fidelity_vs_full, FidelitySeries, TimeGrid};
use crate::hilbert::{coherent_state, excited, ground, number_state, FockSpace, StateVector};
use crate::linalg::real;
use crate::models::{HamiltonianKind, ModelParams};
use crate::tomography::{scan, MotionalState, Regime, Slice, TomographyConfig};

/// Samples per period of the fastest frequency in a fidelity run.
pub const SAMPLES_PER_PERIOD: usize = 20;

/// Dephasing rates of the tomography rows, in units of `nu`.
pub const GAMMA_GRID: [f64; 4] = [0.0004, 0.002, 0.01, 0.05];

/// `(|e>|alpha = 2> + |g>|n = 4>) / √2`: a coherent and a number component
/// entangled with the qubit.
pub fn toy_state(fock: FockSpace) -> Result<StateVector> {
    let upper = StateVector::tensor(&excited(), &coherent_state(real(2.0), fock)?)?;
    let lower = StateVector::tensor(&ground(), &number_state(4, fock)?)?;
    StateVector::superpose(&[(real(1.0), &upper), (real(1.0), &lower)])
}

/// A fidelity experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FidelitySpec {
    pub name: String,
    pub params: ModelParams,
    /// Span in units of `1/nu`.
    pub t_max: f64,
    /// Grid size; defaults to resolving the faster of `Omega` and `nu`.
    pub samples: Option<usize>,
    pub kinds: Vec<HamiltonianKind>,
}

pub const PANEL_NAMES: [&str; 5] = ["fig2", "fig3", "fig4", "fig5", "fig6"];

const PANEL_KINDS: [HamiltonianKind; 3] = [HamiltonianKind::Rsb, HamiltonianKind::Mc, HamiltonianKind::Tsrwa];

impl FidelitySpec {
    /// One of the five predefined panels, all over `nu t ∈ [0, 800]`.
    pub fn panel(name: &str) -> Result<Self> {
        let (omega, delta) = match name {
            "fig2" => (1.0, 0.0),
            "fig3" => (1.0, 0.3),
            "fig4" => (0.95, 0.3),
            "fig5" => (0.01, 1.0),
            "fig6" => (0.1, 1.0),
            other => {
                return Err(Error::InvalidParameter(format!(
                    "unknown panel '{other}' (expected one of {})",
                    PANEL_NAMES.join(", ")
                )))
            }
        };
        Ok(Self::custom(name, ModelParams::new(omega, delta), 800.0))
    }

    pub fn custom(name: &str, params: ModelParams, t_max: f64) -> Self {
        Self { name: name.to_string(), params, t_max, samples: None, kinds: PANEL_KINDS.to_vec() }
    }

    pub fn grid(&self) -> Result<TimeGrid> {
        match self.samples {
            Some(m) => TimeGrid::new(self.t_max, m),
            None => TimeGrid::resolving(self.t_max, self.params.omega.max(self.params.nu), SAMPLES_PER_PERIOD),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.grid()?;
        if self.kinds.is_empty() {
            return Err(Error::InvalidParameter("no Hamiltonian kinds requested".into()));
        }
        let mut seen = self.kinds.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.kinds.len() {
            return Err(Error::InvalidParameter("Hamiltonian kinds must be unique".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FidelityRun {
    pub spec: FidelitySpec,
    pub series: Vec<FidelitySeries>,
    pub seconds: f64,
}

impl FidelityRun {
    pub fn series(&self, kind: HamiltonianKind) -> Option<&FidelitySeries> {
        self.series.iter().find(|s| s.kind == kind)
    }

    /// Summary metrics keyed `<kind>.<stat>`, plus pairwise
    /// `max_raw_diff.<a>.<b>` and `<a>_minus_<b>.final_coarse`.
    pub fn metrics(&self) -> BTreeMap<String, f64> {
        let mut m = BTreeMap::new();
        for s in &self.series {
            let k = s.kind.name();
            if let Some(v) = s.min_coarse() {
                m.insert(format!("{k}.min_coarse"), v);
            }
            if let Some(v) = s.mean_coarse() {
                m.insert(format!("{k}.mean_coarse"), v);
            }
            if let Some(v) = s.final_coarse() {
                m.insert(format!("{k}.final_coarse"), v);
            }
            m.insert(format!("{k}.min_raw"), s.raw.iter().cloned().fold(f64::INFINITY, f64::min));
        }
        for (i, a) in self.series.iter().enumerate() {
            for b in &self.series[i + 1..] {
                let diff = a.raw.iter().zip(&b.raw).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
                m.insert(format!("max_raw_diff.{}.{}", a.kind.name(), b.kind.name()), diff);
            }
        }
        let kinds: Vec<HamiltonianKind> = self.series.iter().map(|s| s.kind).collect();
        with_differences(m, &kinds)
    }

    /// Columns `nu_t,kind,fidelity_raw,fidelity_coarse`. The coarse column
    /// holds the mean of the window containing the sample and is empty past
    /// the last full window.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["nu_t", "kind", "fidelity_raw", "fidelity_coarse"]).map_err(csv_err)?;
        for s in &self.series {
            for (t, f) in s.times.iter().zip(&s.raw) {
                let coarse = s.coarse_at(*t).map(|v| v.to_string()).unwrap_or_default();
                w.write_record([t.to_string(), s.kind.name().to_string(), f.to_string(), coarse])
                    .map_err(csv_err)?;
            }
        }
        into_string(w)
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

fn into_string(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(std::io::Error::other(e)))
}

/// Evolves the toy state under every requested model and coarse-grains the
/// overlaps. Models run in parallel; results keep the requested order.
pub fn run_fidelity_panel(spec: &FidelitySpec) -> Result<FidelityRun> {
    spec.validate()?;
    let start = Instant::now();
    let grid = spec.grid()?;
    let psi0 = toy_state(spec.params.fock())?;
    let series = spec
        .kinds
        .par_iter()
        .map(|&kind| {
            let raw = fidelity_vs_full(kind, &spec.params, &psi0, &grid)?;
            coarse_grain(&raw, &spec.params)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FidelityRun { spec: spec.clone(), series, seconds: start.elapsed().as_secs_f64() })
}

/// Built-in checks for a predefined panel, written against its own metrics.
pub fn panel_criteria(name: &str) -> Vec<Criterion> {
    let lines: &[&str] = match name {
        "fig2" => &[
            "fig2_tsrwa_floor: tsrwa.min_coarse >= 0.99",
            "fig2_mc_floor: mc.min_coarse >= 0.99",
            "fig2_mc_tsrwa_identical: max_raw_diff.mc.tsrwa <= 1e-10",
            "fig2_rsb_poor: rsb.min_coarse < 0.9",
        ],
        "fig3" => &["fig3_tsrwa_floor: tsrwa.min_coarse >= 0.95", "fig3_tsrwa_beats_mc: tsrwa_minus_mc.final_coarse >= 0"],
        "fig4" => &["fig4_tsrwa_floor: tsrwa.min_coarse >= 0.99"],
        "fig5" => &[
            "fig5_rsb_beats_tsrwa: rsb_minus_tsrwa.final_coarse >= 0",
            "fig5_rsb_beats_mc: rsb_minus_mc.final_coarse >= 0",
            "fig5_tsrwa_floor: tsrwa.min_coarse >= 0.98",
        ],
        "fig6" => &["fig6_tsrwa_floor: tsrwa.min_coarse >= 0.98"],
        _ => &[],
    };
    lines.iter().map(|l| l.parse().expect("built-in criterion")).collect()
}

/// Adds `<a>_minus_<b>.final_coarse` for every ordered pair of kinds.
fn with_differences(mut m: BTreeMap<String, f64>, kinds: &[HamiltonianKind]) -> BTreeMap<String, f64> {
    for a in kinds {
        for b in kinds {
            if a == b {
                continue;
            }
            let fa = m.get(&format!("{}.final_coarse", a.name())).copied();
            let fb = m.get(&format!("{}.final_coarse", b.name())).copied();
            if let (Some(x), Some(y)) = (fa, fb) {
                m.insert(format!("{}_minus_{}.final_coarse", a.name(), b.name()), x - y);
            }
        }
    }
    m
}

/// A tomography sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WignerSpec {
    pub name: String,
    pub state: MotionalState,
    pub gammas: Vec<f64>,
    pub regimes: Vec<Regime>,
    pub slices: Vec<Slice>,
    /// Slice coordinates run over `[-extent, extent]`.
    pub extent: f64,
    pub points: usize,
    pub config: TomographyConfig,
}

impl WignerSpec {
    /// Cat state of amplitude 2 on both slices, both regimes, the default
    /// dephasing grid. The extent keeps `|alpha|²` inside the cutoff/4 guard
    /// band for the default cutoff.
    pub fn fig1() -> Self {
        Self {
            name: "fig1".into(),
            state: MotionalState::Cat(real(2.0)),
            gammas: GAMMA_GRID.to_vec(),
            regimes: Regime::BOTH.to_vec(),
            slices: Slice::BOTH.to_vec(),
            extent: 3.5,
            points: 41,
            config: TomographyConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.config.validate()?;
        if self.gammas.iter().any(|g| !(*g >= 0.0) || !g.is_finite()) {
            return Err(Error::InvalidParameter("dephasing rates must be non-negative".into()));
        }
        if self.gammas.is_empty() || self.regimes.is_empty() || self.slices.is_empty() || self.points == 0 {
            return Err(Error::InvalidParameter("wigner run needs gammas, regimes, slices and points".into()));
        }
        if !(self.extent >= 0.0) {
            return Err(Error::InvalidParameter(format!("slice extent must be non-negative, got {}", self.extent)));
        }
        Ok(())
    }

    fn slice_points(&self) -> Vec<(Slice, f64, C64)> {
        self.slices
            .iter()
            .flat_map(|&s| s.points(-self.extent, self.extent, self.points).into_iter().map(move |(c, a)| (s, c, a)))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WignerRow {
    pub regime: Regime,
    pub gamma: f64,
    pub slice: Slice,
    pub coord: f64,
    pub w_reconstructed: f64,
    pub w_analytic: f64,
    pub fit_residual: f64,
}

/// Results of one `(regime, gamma)` row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WignerBlock {
    pub regime: Regime,
    pub gamma: f64,
    pub rows: Vec<WignerRow>,
    pub failures: Vec<String>,
}

impl WignerBlock {
    /// Largest `|w_reconstructed - w_analytic|` over all slices.
    pub fn linf(&self) -> f64 {
        self.rows.iter().map(|r| (r.w_reconstructed - r.w_analytic).abs()).fold(0.0, f64::max)
    }

    pub fn min_w(&self, slice: Slice) -> Option<f64> {
        self.rows.iter().filter(|r| r.slice == slice).map(|r| r.w_reconstructed).reduce(f64::min)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WignerRun {
    pub spec: WignerSpec,
    pub blocks: Vec<WignerBlock>,
    pub seconds: f64,
}

/// Stable text form of a rate, used in metric names and CSV.
pub fn gamma_label(g: f64) -> String {
    g.to_string()
}

impl WignerRun {
    pub fn block(&self, regime: Regime, gamma: f64) -> Option<&WignerBlock> {
        self.blocks.iter().find(|b| b.regime == regime && b.gamma == gamma)
    }

    /// Metrics keyed `<regime>.<stat>@<gamma>`; `linf_gap@<gamma>` is fast
    /// minus slow when both regimes ran.
    pub fn metrics(&self) -> BTreeMap<String, f64> {
        let mut m = BTreeMap::new();
        for b in &self.blocks {
            let g = gamma_label(b.gamma);
            let r = b.regime.name();
            m.insert(format!("{r}.linf@{g}"), b.linf());
            for s in &self.spec.slices {
                if let Some(v) = b.min_w(*s) {
                    m.insert(format!("{r}.min_w_{}@{g}", s.name()), v);
                }
            }
            m.insert(format!("{r}.failed_points@{g}"), b.failures.len() as f64);
        }
        for &g in &self.spec.gammas {
            if let (Some(f), Some(s)) = (self.block(Regime::Fast, g), self.block(Regime::Slow, g)) {
                m.insert(format!("linf_gap@{}", gamma_label(g)), f.linf() - s.linf());
            }
        }
        m
    }

    /// Columns `regime,gamma_over_nu,slice,coord,w_reconstructed,w_analytic`.
    pub fn to_csv(&self) -> Result<String> {
        self.rows_csv(|_| true)
    }

    /// Same schema, restricted to one dephasing rate.
    pub fn to_csv_gamma(&self, gamma: f64) -> Result<String> {
        self.rows_csv(|b| b.gamma == gamma)
    }

    fn rows_csv(&self, keep: impl Fn(&WignerBlock) -> bool) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["regime", "gamma_over_nu", "slice", "coord", "w_reconstructed", "w_analytic"])
            .map_err(csv_err)?;
        for b in self.blocks.iter().filter(|b| keep(b)) {
            for r in &b.rows {
                w.write_record([
                    r.regime.name().to_string(),
                    gamma_label(r.gamma),
                    r.slice.name().to_string(),
                    r.coord.to_string(),
                    r.w_reconstructed.to_string(),
                    r.w_analytic.to_string(),
                ])
                .map_err(csv_err)?;
            }
        }
        into_string(w)
    }
}

fn run_block(spec: &WignerSpec, regime: Regime, gamma: f64) -> Result<WignerBlock> {
    let pts = spec.slice_points();
    let alphas: Vec<C64> = pts.iter().map(|p| p.2).collect();
    let res = scan(&spec.state, &alphas, regime, gamma, &spec.config)?;
    let mut found = res.points.into_iter().peekable();
    let mut rows = Vec::new();
    for (slice, coord, alpha) in pts {
        if let Some(p) = found.next_if(|p| p.sample.alpha == alpha) {
            rows.push(WignerRow {
                regime,
                gamma,
                slice,
                coord,
                w_reconstructed: p.sample.w,
                w_analytic: spec.state.analytic_wigner(alpha),
                fit_residual: p.fit.residual,
            });
        }
    }
    let failures = res.failures.into_iter().map(|f| format!("alpha = {}: {}", f.alpha, f.reason)).collect();
    Ok(WignerBlock { regime, gamma, rows, failures })
}

/// Reconstructs the slices for every `(regime, gamma)` pair. Pairs run in
/// parallel; blocks come back regime-major in the spec's order.
pub fn run_wigner_rows(spec: &WignerSpec) -> Result<WignerRun> {
    spec.validate()?;
    let start = Instant::now();
    let jobs: Vec<(Regime, f64)> =
        spec.regimes.iter().flat_map(|&r| spec.gammas.iter().map(move |&g| (r, g))).collect();
    let blocks = jobs.par_iter().map(|&(r, g)| run_block(spec, r, g)).collect::<Result<Vec<_>>>()?;
    Ok(WignerRun { spec: spec.clone(), blocks, seconds: start.elapsed().as_secs_f64() })
}

/// Built-in checks for a tomography sweep over `gammas`.
pub fn wigner_criteria(gammas: &[f64]) -> Vec<Criterion> {
    let mut out = Vec::new();
    for &g in gammas {
        let l = gamma_label(g);
        out.push(format!("fast_not_worse@{l}: linf_gap@{l} <= 0"));
        if g == 0.01 {
            out.push(format!("slow_negativity_lost@{l}: slow.min_w_im@{l} >= -0.01"));
            out.push(format!("fast_negativity_kept@{l}: fast.min_w_im@{l} < -0.05"));
        }
    }
    out.iter().map(|l| l.parse().expect("built-in criterion")).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Comparison {
    Ge,
    Gt,
    Le,
    Lt,
}

impl Comparison {
    pub fn holds(&self, observed: f64, threshold: f64) -> bool {
        match self {
            Comparison::Ge => observed >= threshold,
            Comparison::Gt => observed > threshold,
            Comparison::Le => observed <= threshold,
            Comparison::Lt => observed < threshold,
        }
    }

    pub fn symbol(&self) -> &'static str {
        match self {
            Comparison::Ge => ">=",
            Comparison::Gt => ">",
            Comparison::Le => "<=",
            Comparison::Lt => "<",
        }
    }
}

/// `name: metric op threshold`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Criterion {
    pub name: String,
    pub metric: String,
    pub op: Comparison,
    pub threshold: f64,
}

impl FromStr for Criterion {
    type Err = String;

    fn from_str(line: &str) -> std::result::Result<Self, String> {
        let (name, rule) = line.split_once(':').ok_or("expected 'name: metric op threshold'")?;
        let parts: Vec<&str> = rule.split_whitespace().collect();
        let [metric, op, threshold] = parts[..] else {
            return Err(format!("expected 'metric op threshold', got '{}'", rule.trim()));
        };
        let op = match op {
            ">=" => Comparison::Ge,
            ">" => Comparison::Gt,
            "<=" => Comparison::Le,
            "<" => Comparison::Lt,
            other => return Err(format!("unknown comparison '{other}'")),
        };
        let threshold: f64 = threshold.parse().map_err(|_| format!("bad threshold '{threshold}'"))?;
        let name = name.trim();
        if name.is_empty() {
            return Err("empty criterion name".into());
        }
        Ok(Criterion { name: name.to_string(), metric: metric.to_string(), op, threshold })
    }
}

/// One criterion per non-empty line; `#` starts a comment.
pub fn parse_criteria(text: &str) -> Result<Vec<Criterion>> {
    let mut out: Vec<Criterion> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let c: Criterion = line.parse().map_err(|reason| Error::MalformedCriteria { line: i + 1, reason })?;
        if out.iter().any(|o| o.name == c.name) {
            return Err(Error::MalformedCriteria { line: i + 1, reason: format!("duplicate name '{}'", c.name) });
        }
        out.push(c);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub threshold: f64,
    /// `None` when the metric was not produced, which counts as a failure.
    pub observed: Option<f64>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub criteria: Vec<Criterion>,
    pub verdicts: Vec<Verdict>,
}

impl Evaluation {
    pub fn all_pass(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }

    /// 0 when every criterion passes, 1 otherwise.
    pub fn status(&self) -> i32 {
        if self.all_pass() {
            0
        } else {
            1
        }
    }

    pub fn table(&self) -> String {
        let width = self.criteria.iter().map(|c| c.name.len()).max().unwrap_or(9).max(9);
        let mut out = format!("{:<width$}  {:<32}  {:>12}  {:>14}  verdict\n", "criterion", "metric", "threshold", "observed");
        for (c, v) in self.criteria.iter().zip(&self.verdicts) {
            let observed = v.observed.map(|x| format!("{x:.6e}")).unwrap_or_else(|| "missing".into());
            let _ = writeln!(
                out,
                "{:<width$}  {:<32}  {:>2} {:>9}  {:>14}  {}",
                c.name,
                c.metric,
                c.op.symbol(),
                c.threshold,
                observed,
                if v.pass { "PASS" } else { "FAIL" }
            );
        }
        out
    }

    pub fn by_name(&self) -> BTreeMap<String, Verdict> {
        self.criteria.iter().zip(&self.verdicts).map(|(c, v)| (c.name.clone(), v.clone())).collect()
    }
}

pub fn evaluate(metrics: &BTreeMap<String, f64>, criteria: &[Criterion]) -> Evaluation {
    let verdicts = criteria
        .iter()
        .map(|c| {
            let observed = metrics.get(&c.metric).copied();
            let pass = observed.is_some_and(|x| c.op.holds(x, c.threshold));
            Verdict { threshold: c.threshold, observed, pass }
        })
        .collect();
    Evaluation { criteria: criteria.to_vec(), verdicts }
}

/// Machine-readable summary of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub name: String,
    /// Effective configuration, echoed verbatim for reproducibility.
    pub config: serde_json::Value,
    pub metrics: BTreeMap<String, f64>,
    pub criteria: BTreeMap<String, Verdict>,
    pub seconds: f64,
}

impl RunReport {
    pub fn new(name: &str, config: serde_json::Value, metrics: BTreeMap<String, f64>, eval: &Evaluation, seconds: f64) -> Self {
        Self { name: name.to_string(), config, metrics, criteria: eval.by_name(), seconds }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Writes through a sibling temporary file and a rename, so readers never see
/// a partial file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let file_name = path
        .file_name()
        .ok_or_else(|| Error::InvalidParameter(format!("'{}' is not a file path", path.display())))?;
    let tmp = dir.join(format!(".{}.{}.tmp", file_name.to_string_lossy(), std::process::id()));
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path).inspect_err(|_| {
        let _ = fs::remove_file(&tmp);
    })?;
    Ok(())
}
