//! Parameter sweeps producing one CSV row per point and method.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use resolvability::asymptotic::{
    build_fixed_type_code, build_general_code, build_type_code, iid_size, source_size, type_distribution,
    FixedTypeParams, GeneralParams, IidParams,
};
use resolvability::singleshot::BOUND_TOL;
use resolvability::types::TypeClass;
use resolvability::{
    build_codebook, entropy, mutual_information, product_channel, required_size, Budget, Channel, CodeSize,
    Distribution, Error, SupportMask,
};

use crate::baseline::random_baseline;
use crate::instance::{load_instance, InputSpec, Instance};
use crate::HarnessError;

/// Bumped whenever the column set or order changes.
pub const CSV_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Singleshot,
    FixedType,
    General,
    Iid,
    Source,
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "singleshot" => Ok(Mode::Singleshot),
            "fixed-type" => Ok(Mode::FixedType),
            "general" => Ok(Mode::General),
            "iid" => Ok(Mode::Iid),
            "source" => Ok(Mode::Source),
            _ => Err(format!(
                "unknown mode {s:?} (singleshot, fixed-type, general, iid, source)"
            )),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Singleshot => "singleshot",
            Mode::FixedType => "fixed-type",
            Mode::General => "general",
            Mode::Iid => "iid",
            Mode::Source => "source",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    N,
    L,
    Epsilon,
}

impl FromStr for Axis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "n" => Ok(Axis::N),
            "L" => Ok(Axis::L),
            "epsilon" => Ok(Axis::Epsilon),
            _ => Err(format!("unknown axis {s:?} (n, L, epsilon)")),
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::N => "n",
            Axis::L => "L",
            Axis::Epsilon => "epsilon",
        })
    }
}

/// Construction parameters. In `source` mode `epsilon` is the learning
/// rate of the type code and `tau_prime` its threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params {
    pub n: usize,
    pub epsilon: f64,
    pub epsilon_prime: f64,
    pub tau: f64,
    pub tau_prime: f64,
    pub alpha: f64,
    pub nu: f64,
    /// Codebook length override; per-type length in `general` and `iid`.
    pub size: Option<usize>,
    /// Type-code length override.
    pub type_size: Option<usize>,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            n: 1,
            epsilon: 0.25,
            epsilon_prime: 0.25,
            tau: 0.1,
            tau_prime: 0.1,
            alpha: 0.2,
            nu: 0.05,
            size: None,
            type_size: None,
        }
    }
}

impl Params {
    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: String| Err(HarnessError::Config(m));
        if self.n == 0 {
            return bad("n must be at least 1".into());
        }
        for (name, v) in [("epsilon", self.epsilon), ("epsilon_prime", self.epsilon_prime)] {
            if !(v > 0.0 && v <= 0.5) {
                return bad(format!("{name} = {v} is outside (0, 1/2]"));
            }
        }
        if !(0.0..=1.0).contains(&self.tau) {
            return bad(format!("tau = {} is outside [0, 1]", self.tau));
        }
        if !(self.tau_prime > 0.0 && self.tau_prime <= 1.0) {
            return bad(format!("tau_prime = {} is outside (0, 1]", self.tau_prime));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return bad(format!("alpha = {} must be positive", self.alpha));
        }
        if !(self.nu > 0.0 && self.nu <= 0.5) {
            return bad(format!("nu = {} is outside (0, 1/2]", self.nu));
        }
        if self.size == Some(0) || self.type_size == Some(0) {
            return bad("codebook lengths must be at least 1".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    /// Instance file path or shorthand (`bsc:<p>`, `noiseless:<k>`).
    pub channel: String,
    pub input: InputSpec,
    pub mode: Mode,
    pub params: Params,
    /// Adds baseline rows when set.
    pub seed: Option<u64>,
    pub budget: Budget,
    /// Worker threads; `None` uses all cores.
    pub jobs: Option<usize>,
    /// Adds a wall-time column, which makes the CSV run-dependent.
    pub timing: bool,
}

impl ExperimentConfig {
    pub fn new(channel: impl Into<String>, mode: Mode) -> Self {
        ExperimentConfig {
            channel: channel.into(),
            input: InputSpec::Uniform,
            mode,
            params: Params::default(),
            seed: None,
            budget: Budget::DEFAULT,
            jobs: None,
            timing: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Mwu,
    Baseline,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Mwu => "mwu",
            Method::Baseline => "baseline",
        })
    }
}

/// One CSV row. Quantities that do not apply are NaN and print empty.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub axis_value: f64,
    pub mode: Mode,
    pub method: Method,
    pub n: usize,
    pub size: usize,
    pub epsilon: f64,
    pub measured_tv: f64,
    pub theorem_bound: f64,
    pub d_max: f64,
    pub complement_mass: f64,
    pub size_formula: f64,
    /// `(1/n) ln L`.
    pub rate: f64,
    /// `I(P, W)` for channel modes (`I(T, W)` for fixed-type), `H(P_T)` for
    /// source mode.
    pub reference: f64,
    pub status: String,
    pub wall_time: f64,
}

impl ResultRow {
    fn skipped(axis_value: f64, mode: Mode, params: &Params, why: &Error) -> Self {
        ResultRow {
            axis_value,
            mode,
            method: Method::Mwu,
            n: params.n,
            size: 0,
            epsilon: params.epsilon,
            measured_tv: f64::NAN,
            theorem_bound: f64::NAN,
            d_max: f64::NAN,
            complement_mass: f64::NAN,
            size_formula: f64::NAN,
            rate: f64::NAN,
            reference: f64::NAN,
            status: format!("skipped: {why}"),
            wall_time: f64::NAN,
        }
    }
}

/// What a baseline at the same point draws from.
#[derive(Debug, Clone)]
pub struct BaselineSetup {
    pub input: Distribution,
    pub channel: Channel,
}

/// A construction at one parameter point.
#[derive(Debug, Clone)]
pub struct PointResult {
    pub size: usize,
    pub tv: f64,
    pub bound: f64,
    pub d_max: f64,
    pub complement_mass: f64,
    pub size_formula: f64,
    pub reference: f64,
    /// The code in its text format.
    pub code: String,
    pub baseline: BaselineSetup,
}

pub fn iid_input(p: &Distribution, n: usize, budget: Budget) -> Result<Distribution, Error> {
    if n == 1 {
        return Ok(p.clone());
    }
    p.iid_power(&p.alphabet().power(n, budget)?)
}

/// `p` restricted to its support and the memoryless channel on that support.
pub fn support_setup(w: &Channel, p: &Distribution, budget: Budget) -> Result<BaselineSetup, Error> {
    let support = p.support();
    let inputs = p.alphabet().subset(support.iter().copied())?;
    let channel = if p.alphabet().as_power().is_some() {
        w.memoryless_on(&inputs, budget)?
    } else {
        w.restrict_inputs(&inputs)?
    };
    let input = Distribution::new(inputs, support.iter().map(|&x| p.get(x)).collect())?;
    Ok(BaselineSetup { input, channel })
}

/// The type of length `n` closest to `n·p`, by largest remainder.
pub fn nearest_type(p: &Distribution, n: usize) -> Result<TypeClass, Error> {
    let scaled: Vec<f64> = p.mass().iter().map(|&m| m * n as f64).collect();
    let mut counts: Vec<usize> = scaled.iter().map(|v| v.floor() as usize).collect();
    let mut order: Vec<usize> = (0..counts.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = scaled[a] - scaled[a].floor();
        let rb = scaled[b] - scaled[b].floor();
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    let missing = n.saturating_sub(counts.iter().sum());
    for &i in order.iter().take(missing) {
        counts[i] += 1;
    }
    TypeClass::new(p.alphabet().clone(), counts)
}

/// Builds the code for `mode` at `params` and evaluates it exactly.
pub fn build_point(
    mode: Mode,
    w: &Channel,
    p: &Distribution,
    params: &Params,
    budget: Budget,
) -> Result<PointResult, Error> {
    let n = params.n;
    let size = CodeSize::from(params.size);
    let info = mutual_information(p, w)?;
    match mode {
        Mode::Singleshot => {
            let pn = iid_input(p, n, budget)?;
            let wn = if n == 1 {
                w.clone()
            } else {
                product_channel(w, n, budget)?
            };
            let full = SupportMask::full(wn.input().clone(), wn.output().clone());
            let c = build_codebook(&pn, &wn, &full, params.epsilon, size)?;
            Ok(PointResult {
                size: c.codebook.len(),
                tv: c.tv(),
                bound: c.bound(),
                d_max: c.d_max(),
                complement_mass: c.view().complement_mass(),
                size_formula: required_size(c.d_max(), wn.output().len(), params.epsilon)? as f64,
                reference: info,
                code: c.codebook.to_text(),
                baseline: BaselineSetup { input: pn, channel: wn },
            })
        }
        Mode::FixedType => {
            let t = nearest_type(p, n)?;
            let power = p.alphabet().power(n, budget)?;
            let cond = Distribution::uniform(power.subset(t.members(budget)?)?);
            let fixed = FixedTypeParams {
                alpha: params.alpha,
                tau: params.tau,
                epsilon: params.epsilon,
                size,
                budget,
            };
            let code = build_fixed_type_code(&t, &cond, w, fixed)?;
            let r = &code.report;
            Ok(PointResult {
                size: r.size,
                tv: r.tv,
                bound: r.bound,
                d_max: r.d_max,
                complement_mass: r.complement_mass,
                size_formula: r.size_formula,
                reference: r.mutual_information,
                code: code.codebook.to_text(),
                baseline: BaselineSetup {
                    input: code.sets.input_dist.clone(),
                    channel: code.sets.channel.clone(),
                },
            })
        }
        Mode::General | Mode::Iid => {
            let pn = iid_input(p, n, budget)?;
            let general = GeneralParams {
                epsilon: params.epsilon,
                epsilon_prime: params.epsilon_prime,
                tau: params.tau,
                tau_prime: params.tau_prime,
                alpha: params.alpha,
                type_size: params.type_size.into(),
                size,
                budget,
            };
            let g = build_general_code(&pn, w, general)?;
            let r = &g.report;
            let size_formula = if mode == Mode::Iid {
                let iid = IidParams {
                    epsilon: params.epsilon,
                    tau: params.tau,
                    alpha: params.alpha,
                    nu: params.nu,
                    budget,
                };
                iid_size(p, w, n, iid)?.size
            } else {
                r.size_formula
            };
            Ok(PointResult {
                size: r.product_size,
                tv: r.tv,
                bound: r.bound,
                d_max: r.max_d_max,
                complement_mass: g.fixed_reports().map(|f| f.complement_mass).fold(0.0, f64::max),
                size_formula,
                reference: info,
                code: g.code.to_text(),
                baseline: support_setup(w, &pn, budget)?,
            })
        }
        Mode::Source => {
            let pn = iid_input(p, n, budget)?;
            let td = type_distribution(&pn)?;
            let code_size = CodeSize::from(params.type_size.or(params.size));
            let code = build_type_code(td.mass(), params.epsilon, params.tau_prime, code_size)?;
            let c = &code.construction;
            Ok(PointResult {
                size: code.len(),
                tv: code.tv(),
                bound: c.bound(),
                d_max: c.d_max(),
                complement_mass: code.dropped_mass(),
                size_formula: source_size(td.types().len(), params.tau_prime, params.epsilon)? as f64,
                reference: entropy(td.mass()),
                code: c.codebook.to_text(),
                baseline: BaselineSetup {
                    input: td.mass().clone(),
                    channel: Channel::identity(td.type_alphabet().clone()),
                },
            })
        }
    }
}

fn is_skippable(e: &Error) -> bool {
    matches!(
        e,
        Error::BudgetExceeded { .. } | Error::EmptyTypicalSet | Error::EmptySupport
    )
}

fn point_params(base: &Params, axis: Axis, value: f64) -> Result<Params, HarnessError> {
    let mut p = *base;
    let as_count = |what: &str| {
        if value >= 1.0 && value.fract() == 0.0 && value <= u32::MAX as f64 {
            Ok(value as usize)
        } else {
            Err(HarnessError::Config(format!(
                "{what} must be a positive integer, got {value}"
            )))
        }
    };
    match axis {
        Axis::N => p.n = as_count("n")?,
        Axis::L => p.size = Some(as_count("L")?),
        Axis::Epsilon => p.epsilon = value,
    }
    p.validate()?;
    Ok(p)
}

/// Runs one sweep point: the MWU row, then a baseline row when seeded.
pub fn run_point(
    config: &ExperimentConfig,
    instance: &Instance,
    axis: Axis,
    value: f64,
) -> Result<Vec<ResultRow>, HarnessError> {
    let params = point_params(&config.params, axis, value)?;
    let p = instance.input(&config.input)?;
    let start = Instant::now();
    let m = match build_point(config.mode, &instance.channel, &p, &params, config.budget) {
        Ok(m) => m,
        Err(e) if is_skippable(&e) => return Ok(vec![ResultRow::skipped(value, config.mode, &params, &e)]),
        Err(e) => return Err(e.into()),
    };
    let elapsed = start.elapsed().as_secs_f64();
    if m.tv.is_nan() || m.tv > m.bound + BOUND_TOL {
        return Err(HarnessError::BoundViolation {
            mode: config.mode.to_string(),
            axis: axis.to_string(),
            value,
            tv: m.tv,
            bound: m.bound,
        });
    }
    let rate = (m.size as f64).ln() / params.n as f64;
    let mut rows = vec![ResultRow {
        axis_value: value,
        mode: config.mode,
        method: Method::Mwu,
        n: params.n,
        size: m.size,
        epsilon: params.epsilon,
        measured_tv: m.tv,
        theorem_bound: m.bound,
        d_max: m.d_max,
        complement_mass: m.complement_mass,
        size_formula: m.size_formula,
        rate,
        reference: m.reference,
        status: "ok".into(),
        wall_time: elapsed,
    }];
    if let Some(seed) = config.seed {
        let start = Instant::now();
        let b = random_baseline(&m.baseline.input, &m.baseline.channel, m.size, seed)?;
        rows.push(ResultRow {
            method: Method::Baseline,
            measured_tv: b.tv,
            theorem_bound: f64::NAN,
            d_max: f64::NAN,
            complement_mass: f64::NAN,
            size_formula: f64::NAN,
            wall_time: start.elapsed().as_secs_f64(),
            ..rows[0].clone()
        });
    }
    Ok(rows)
}

/// Runs every point of the sweep in parallel. Rows come back sorted by axis
/// value.
pub fn run_sweep(config: &ExperimentConfig, axis: Axis, values: &[f64]) -> Result<Vec<ResultRow>, HarnessError> {
    config.params.validate()?;
    let instance = load_instance(&config.channel)?;
    instance.input(&config.input)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs.unwrap_or(0))
        .build()
        .map_err(|e| HarnessError::Config(e.to_string()))?;
    let rows: Vec<Vec<ResultRow>> = pool.install(|| {
        values
            .par_iter()
            .map(|&v| run_point(config, &instance, axis, v))
            .collect::<Result<_, _>>()
    })?;
    let mut rows: Vec<ResultRow> = rows.into_iter().flatten().collect();
    // Stable, so a point's MWU row stays ahead of its baseline row.
    rows.sort_by(|a, b| a.axis_value.total_cmp(&b.axis_value));
    Ok(rows)
}

pub const COLUMNS: [&str; 15] = [
    "axis_value",
    "mode",
    "method",
    "n",
    "L",
    "epsilon",
    "measured_tv",
    "theorem_bound",
    "d_max",
    "complement_mass",
    "size_formula",
    "rate",
    "reference",
    "status",
    "wall_time",
];

fn num(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else if v.is_infinite() {
        if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{v:.11e}")
    }
}

/// Writes the rows with a version comment and a fixed header. The
/// `wall_time` column is only present when `timing` is set.
pub fn write_csv<W: Write>(mut out: W, axis: Axis, rows: &[ResultRow], timing: bool) -> Result<(), HarnessError> {
    writeln!(out, "# resolv sweep v{CSV_VERSION} axis={axis}").map_err(|e| HarnessError::Io {
        path: "<csv>".into(),
        source: e,
    })?;
    let mut w = csv::Writer::from_writer(out);
    let width = if timing { COLUMNS.len() } else { COLUMNS.len() - 1 };
    w.write_record(&COLUMNS[..width])?;
    for r in rows {
        let mut record = vec![
            num(r.axis_value),
            r.mode.to_string(),
            r.method.to_string(),
            r.n.to_string(),
            r.size.to_string(),
            num(r.epsilon),
            num(r.measured_tv),
            num(r.theorem_bound),
            num(r.d_max),
            num(r.complement_mass),
            num(r.size_formula),
            num(r.rate),
            num(r.reference),
            r.status.clone(),
        ];
        if timing {
            record.push(num(r.wall_time));
        }
        w.write_record(&record)?;
    }
    w.flush().map_err(|e| HarnessError::Io {
        path: "<csv>".into(),
        source: e,
    })?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nearest_type_rounds_to_n() {
        let p = Distribution::new(resolvability::Alphabet::numeric(3).unwrap(), vec![0.5, 0.3, 0.2]).unwrap();
        assert_eq!(nearest_type(&p, 4).unwrap().counts(), &[2, 1, 1]);
        assert_eq!(nearest_type(&p, 10).unwrap().counts(), &[5, 3, 2]);
    }

    #[test]
    fn number_format() {
        assert_eq!(num(0.25), "2.50000000000e-1");
        assert_eq!(num(f64::NAN), "");
        assert_eq!(num(f64::INFINITY), "inf");
    }

    #[test]
    fn axis_values_are_checked() {
        let base = Params::default();
        assert!(point_params(&base, Axis::N, 2.5).is_err());
        assert!(point_params(&base, Axis::Epsilon, 0.75).is_err());
        assert_eq!(point_params(&base, Axis::L, 7.0).unwrap().size, Some(7));
    }
}
