//! Parameter sweeps over the analytic and stochastic engines.

use pcopo_correlations::{
    angle_grids, entanglement_map_of, is_below_threshold, min_variance_of, spectral_intensity, threshold, twin_beams_of,
    twin_raw_variance, AngleSearch, CorrelationError, DuanBound, MomentSet,
};
use pcopo_langevin::{analytic_intracavity_map, intracavity_variance_map, run_ensemble, SimConfig};
use pcopo_model::ModelParams;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, WorkbenchError};

/// Environment variable holding the default worker count.
pub const WORKERS_ENV: &str = "PCOPO_WORKERS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    Intensity,
    Spectrum,
    Threshold,
    MinVariance,
    DuanMap,
    ReidMap,
    TwinBeams,
    VarianceMap,
    Simulate,
}

impl Observable {
    pub const ALL: [Observable; 9] = [
        Observable::Intensity,
        Observable::Spectrum,
        Observable::Threshold,
        Observable::MinVariance,
        Observable::DuanMap,
        Observable::ReidMap,
        Observable::TwinBeams,
        Observable::VarianceMap,
        Observable::Simulate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Observable::Intensity => "intensity",
            Observable::Spectrum => "spectrum",
            Observable::Threshold => "threshold",
            Observable::MinVariance => "min_variance",
            Observable::DuanMap => "duan_map",
            Observable::ReidMap => "reid_map",
            Observable::TwinBeams => "twin_beams",
            Observable::VarianceMap => "variance_map",
            Observable::Simulate => "simulate",
        }
    }

    /// Linearized observables only exist below threshold; the threshold
    /// and the full stochastic dynamics do not care.
    pub fn needs_below_threshold(self) -> bool {
        !matches!(self, Observable::Threshold | Observable::Simulate)
    }

    pub fn supports(self, engine: Engine) -> bool {
        match self {
            Observable::Simulate => engine == Engine::Langevin,
            Observable::VarianceMap => true,
            _ => engine == Engine::Analytic,
        }
    }

    pub fn columns(self, engine: Engine) -> Vec<&'static str> {
        match self {
            Observable::Intensity => vec!["intensity"],
            Observable::Spectrum => vec!["omega", "n"],
            Observable::Threshold => vec!["threshold"],
            Observable::MinVariance => vec!["min_variance", "theta", "phi"],
            Observable::DuanMap => vec!["theta", "phi", "duan_sum", "duan_bound", "entangled"],
            Observable::ReidMap => vec!["theta", "phi", "reid_product", "entangled"],
            Observable::TwinBeams => vec!["raw_variance", "shot_noise", "normalized"],
            Observable::VarianceMap => match engine {
                Engine::Both => vec!["theta", "phi", "variance", "variance_analytic"],
                _ => vec!["theta", "phi", "variance"],
            },
            Observable::Simulate => vec!["k", "signal", "pump"],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    #[default]
    Analytic,
    Langevin,
    Both,
}

impl Engine {
    pub fn name(self) -> &'static str {
        match self {
            Engine::Analytic => "analytic",
            Engine::Langevin => "langevin",
            Engine::Both => "both",
        }
    }

    pub fn stochastic(self) -> bool {
        self != Engine::Analytic
    }
}

/// One sweep axis. Several names form a zipped axis whose points are tuples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub names: Vec<String>,
    pub values: Vec<Vec<f64>>,
}

impl Axis {
    pub fn single(name: &str, values: Vec<f64>) -> Self {
        Self {
            names: vec![name.to_string()],
            values: values.into_iter().map(|v| vec![v]).collect(),
        }
    }

    /// `start, start + step, ...` up to `stop` inclusive.
    pub fn range(name: &str, start: f64, stop: f64, step: f64) -> Result<Self> {
        Ok(Self::single(name, expand_range(start, stop, step)?))
    }
}

pub fn expand_range(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(start.is_finite() && stop.is_finite() && step.is_finite() && step > 0.0 && stop >= start) {
        return Err(WorkbenchError::validation(
            "range",
            format!("need finite start <= stop and step > 0, got [{start}, {stop}, {step}]"),
        ));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..n).map(|i| start + i as f64 * step).collect())
}

/// Settings of the individual observables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ObservableOptions {
    pub omega_min: f64,
    pub omega_max: f64,
    pub omega_points: usize,
    pub n_theta: usize,
    pub n_phi: usize,
    pub weight: f64,
    pub bound: DuanBound,
}

impl Default for ObservableOptions {
    fn default() -> Self {
        Self {
            omega_min: -4.0,
            omega_max: 4.0,
            omega_points: 801,
            n_theta: 91,
            n_phi: 91,
            weight: 1.0,
            bound: DuanBound::default(),
        }
    }
}

impl ObservableOptions {
    pub fn omega_grid(&self) -> Vec<f64> {
        let n = self.omega_points;
        if n == 1 {
            return vec![self.omega_min];
        }
        (0..n)
            .map(|i| self.omega_min + (self.omega_max - self.omega_min) * i as f64 / (n - 1) as f64)
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega_min.is_finite() && self.omega_max.is_finite() && self.omega_max >= self.omega_min) {
            return Err(WorkbenchError::validation("omega_min", "need finite omega_min <= omega_max"));
        }
        if self.omega_points == 0 {
            return Err(WorkbenchError::validation("omega_points", "must be positive"));
        }
        if self.n_theta == 0 || self.n_phi == 0 {
            return Err(WorkbenchError::validation("n_theta", "angle grids must be nonempty"));
        }
        if !(self.weight.is_finite() && self.weight != 0.0) {
            return Err(WorkbenchError::validation("weight", "must be finite and nonzero"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub axes: Vec<Axis>,
    pub observable: Observable,
    pub engine: Engine,
    pub output_path: Option<String>,
    /// `E` as a fraction of each point's own threshold.
    pub e_relative: Option<f64>,
    pub options: ObservableOptions,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            axes: Vec::new(),
            observable: Observable::Intensity,
            engine: Engine::Analytic,
            output_path: None,
            e_relative: None,
            options: ObservableOptions::default(),
        }
    }
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if !self.observable.supports(self.engine) {
            return Err(WorkbenchError::EngineMismatch {
                observable: self.observable.name().into(),
                engine: self.engine.name().into(),
            });
        }
        let mut seen = Vec::new();
        for axis in &self.axes {
            if axis.names.is_empty() {
                return Err(WorkbenchError::validation("axes", "axis without a parameter name"));
            }
            for name in &axis.names {
                if !ModelParams::FIELD_NAMES.contains(&name.as_str()) {
                    return Err(WorkbenchError::UnknownParameter(name.clone()));
                }
                if seen.contains(name) {
                    return Err(WorkbenchError::validation(name.clone(), "appears on more than one axis"));
                }
                if name == "E" && self.e_relative.is_some() {
                    return Err(WorkbenchError::validation("E", "cannot sweep E together with E_relative"));
                }
                seen.push(name.clone());
            }
            if axis.values.is_empty() {
                return Err(WorkbenchError::validation(axis.names.join(","), "empty value list"));
            }
            for v in &axis.values {
                if v.len() != axis.names.len() {
                    return Err(WorkbenchError::validation(
                        axis.names.join(","),
                        format!("point {v:?} does not match {} names", axis.names.len()),
                    ));
                }
                if v.iter().any(|x| !x.is_finite()) {
                    return Err(WorkbenchError::validation(axis.names.join(","), "non-finite value"));
                }
            }
        }
        if let Some(r) = self.e_relative {
            if !(r.is_finite() && r >= 0.0) {
                return Err(WorkbenchError::validation("E_relative", format!("must be finite and nonnegative, got {r}")));
            }
        }
        self.options.validate()
    }

    pub fn point_count(&self) -> usize {
        self.axes.iter().map(|a| a.values.len()).product()
    }

    /// Grid points in row-major order (first axis slowest), before `E_relative`.
    pub fn points(&self, base: &ModelParams) -> Result<Vec<ModelParams>> {
        let mut out = vec![*base];
        for axis in &self.axes {
            let mut next = Vec::with_capacity(out.len() * axis.values.len());
            for p in &out {
                for v in &axis.values {
                    let mut q = *p;
                    for (name, &x) in axis.names.iter().zip(v) {
                        if !q.set(name, x) {
                            return Err(WorkbenchError::UnknownParameter(name.clone()));
                        }
                    }
                    next.push(q);
                }
            }
            out = next;
        }
        Ok(out)
    }

    /// Applies `E_relative` to a grid point.
    pub fn resolve(&self, p: &ModelParams) -> Result<ModelParams> {
        match self.e_relative {
            Some(r) => Ok(p.with_e(r * threshold(p)?)),
            None => Ok(*p),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointStatus {
    Ok,
    AboveThreshold,
}

impl PointStatus {
    pub fn name(self) -> &'static str {
        match self {
            PointStatus::Ok => "ok",
            PointStatus::AboveThreshold => "above_threshold",
        }
    }
}

/// Self-describing result of one sweep point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub params: ModelParams,
    pub e_relative: Option<f64>,
    pub observable: Observable,
    pub engine: Engine,
    pub status: PointStatus,
    pub columns: Vec<String>,
    #[serde(with = "nan_as_null")]
    pub rows: Vec<Vec<f64>>,
    /// Standard errors with the shape of `rows`; zero where exact.
    #[serde(with = "nan_as_null::option")]
    pub errors: Option<Vec<Vec<f64>>>,
    pub options: ObservableOptions,
    pub sim: Option<SimConfig>,
    pub seed: Option<u64>,
    pub code_version: String,
    pub timestamp: String,
}

impl ResultRecord {
    /// Equality on everything but the timestamp, with table cells compared
    /// bit for bit so NaN cells match.
    pub fn same_result(&self, other: &ResultRecord) -> bool {
        fn bits(t: &[Vec<f64>]) -> Vec<Vec<u64>> {
            t.iter().map(|r| r.iter().map(|v| v.to_bits()).collect()).collect()
        }
        let strip = |r: &ResultRecord| ResultRecord {
            rows: Vec::new(),
            errors: None,
            timestamp: String::new(),
            ..r.clone()
        };
        strip(self) == strip(other)
            && bits(&self.rows) == bits(&other.rows)
            && self.errors.as_deref().map(bits) == other.errors.as_deref().map(bits)
    }

    /// Rows as `(column, value)` lookups.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }
}

/// JSON has no NaN; undefined cells travel as `null`.
mod nan_as_null {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    type Table = Vec<Vec<f64>>;

    fn wrap(t: &Table) -> Vec<Vec<Option<f64>>> {
        t.iter().map(|r| r.iter().map(|v| (!v.is_nan()).then_some(*v)).collect()).collect()
    }

    fn unwrap(t: Vec<Vec<Option<f64>>>) -> Table {
        t.into_iter().map(|r| r.into_iter().map(|v| v.unwrap_or(f64::NAN)).collect()).collect()
    }

    pub fn serialize<S: Serializer>(t: &Table, s: S) -> Result<S::Ok, S::Error> {
        wrap(t).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Table, D::Error> {
        Ok(unwrap(Vec::deserialize(d)?))
    }

    pub mod option {
        use super::*;

        pub fn serialize<S: Serializer>(t: &Option<Table>, s: S) -> Result<S::Ok, S::Error> {
            t.as_ref().map(wrap).serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Table>, D::Error> {
            Ok(Option::<Vec<Vec<Option<f64>>>>::deserialize(d)?.map(unwrap))
        }
    }
}

pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");

fn flag(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

type Table = (Vec<Vec<f64>>, Option<Vec<Vec<f64>>>);

fn analytic_table(p: &ModelParams, spec: &SweepSpec) -> Result<Table> {
    let o = &spec.options;
    let rows = match spec.observable {
        Observable::Intensity => vec![vec![MomentSet::closed(p)?.n_plus]],
        Observable::Spectrum => o
            .omega_grid()
            .into_iter()
            .map(|w| Ok(vec![w, spectral_intensity(p, w)?]))
            .collect::<Result<_>>()?,
        Observable::Threshold => vec![vec![threshold(p)?]],
        Observable::MinVariance => {
            let m = min_variance_of(&MomentSet::closed(p)?, &AngleSearch::default())?;
            vec![vec![m.value, m.theta_star, m.phi_star]]
        }
        Observable::DuanMap | Observable::ReidMap => {
            let (th, ph) = angle_grids(o.n_theta, o.n_phi);
            let map = entanglement_map_of(&MomentSet::closed(p)?, &th, &ph, o.weight, o.bound)?;
            let mut rows = Vec::with_capacity(map.reports.len());
            for (i, &t) in th.iter().enumerate() {
                for (j, &f) in ph.iter().enumerate() {
                    let r = map.at(i, j);
                    rows.push(if spec.observable == Observable::DuanMap {
                        vec![t, f, r.duan_sum, r.duan_bound, flag(r.entangled_duan)]
                    } else {
                        vec![t, f, r.reid_product, flag(r.entangled_reid)]
                    });
                }
            }
            rows
        }
        Observable::TwinBeams => {
            let m = MomentSet::closed(p)?;
            match twin_beams_of(&m) {
                Ok(t) => vec![vec![t.raw_variance, t.shot_noise, t.normalized]],
                // empty cavity: no shot noise to normalize by
                Err(CorrelationError::DegenerateShotNoise(shot)) => vec![vec![twin_raw_variance(&m), shot, f64::NAN]],
                Err(e) => return Err(e.into()),
            }
        }
        Observable::VarianceMap => {
            let (th, ph) = angle_grids(o.n_theta, o.n_phi);
            let values = analytic_intracavity_map(p, &th, &ph)?;
            angle_rows(&th, &ph, |c| vec![values[c]])
        }
        Observable::Simulate => unreachable!("rejected by validation"),
    };
    Ok((rows, None))
}

fn angle_rows(th: &[f64], ph: &[f64], mut cell: impl FnMut(usize) -> Vec<f64>) -> Vec<Vec<f64>> {
    let mut rows = Vec::with_capacity(th.len() * ph.len());
    for (i, &t) in th.iter().enumerate() {
        for (j, &f) in ph.iter().enumerate() {
            let mut r = vec![t, f];
            r.extend(cell(i * ph.len() + j));
            rows.push(r);
        }
    }
    rows
}

fn stochastic_table(p: &ModelParams, sim: &SimConfig, spec: &SweepSpec) -> Result<Table> {
    let o = &spec.options;
    match spec.observable {
        Observable::Simulate => {
            let s = run_ensemble(p, sim)?;
            let rows = (0..s.k.len())
                .map(|j| vec![s.k[j], s.far_field_signal[j], s.far_field_pump[j]])
                .collect();
            let errs = (0..s.k.len())
                .map(|j| vec![0.0, s.far_field_signal_err[j], s.far_field_pump_err[j]])
                .collect();
            Ok((rows, Some(errs)))
        }
        Observable::VarianceMap => {
            let (th, ph) = angle_grids(o.n_theta, o.n_phi);
            let map = intracavity_variance_map(p, sim, &th, &ph)?;
            let analytic = if spec.engine == Engine::Both {
                Some(analytic_intracavity_map(p, &th, &ph)?)
            } else {
                None
            };
            let rows = angle_rows(&th, &ph, |c| {
                let mut v = vec![map.values[c]];
                if let Some(a) = &analytic {
                    v.push(a[c]);
                }
                v
            });
            let errs = angle_rows(&th, &ph, |c| {
                let mut v = vec![map.errors[c]];
                if analytic.is_some() {
                    v.push(0.0);
                }
                v
            })
            .into_iter()
            .map(|mut r| {
                r[0] = 0.0;
                r[1] = 0.0;
                r
            })
            .collect();
            Ok((rows, Some(errs)))
        }
        _ => unreachable!("rejected by validation"),
    }
}

/// Evaluates one grid point; `p` must already carry its resolved `E`.
pub fn evaluate_point(p: &ModelParams, sim: &SimConfig, spec: &SweepSpec, timestamp: &str) -> Result<ResultRecord> {
    let below = !spec.observable.needs_below_threshold() || is_below_threshold(p)?;
    let (rows, errors, status) = if !below {
        (Vec::new(), None, PointStatus::AboveThreshold)
    } else {
        let (rows, errors) = if spec.engine.stochastic() {
            stochastic_table(p, sim, spec)?
        } else {
            analytic_table(p, spec)?
        };
        (rows, errors, PointStatus::Ok)
    };
    Ok(ResultRecord {
        params: *p,
        e_relative: spec.e_relative,
        observable: spec.observable,
        engine: spec.engine,
        status,
        columns: spec.observable.columns(spec.engine).into_iter().map(String::from).collect(),
        rows,
        errors,
        options: spec.options.clone(),
        sim: spec.engine.stochastic().then(|| sim.clone()),
        seed: spec.engine.stochastic().then_some(sim.seed),
        code_version: CODE_VERSION.into(),
        timestamp: timestamp.into(),
    })
}

/// Worker count from [`WORKERS_ENV`], else the available parallelism.
pub fn default_workers() -> usize {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
}

pub fn timestamp_now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

/// Runs every grid point on a pool of `workers` threads; records come back in
/// grid order whatever the scheduling.
pub fn run_sweep_with(base: &ModelParams, sim: &SimConfig, spec: &SweepSpec, workers: usize) -> Result<Vec<ResultRecord>> {
    spec.validate()?;
    let points = spec.points(base)?;
    let stamp = timestamp_now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| WorkbenchError::validation("workers", e.to_string()))?;
    let results: Vec<Result<ResultRecord>> = pool.install(|| {
        points
            .par_iter()
            .map(|p| evaluate_point(&spec.resolve(p)?, sim, spec, &stamp))
            .collect()
    });
    results.into_iter().collect()
}

pub fn run_sweep(base: &ModelParams, sim: &SimConfig, spec: &SweepSpec) -> Result<Vec<ResultRecord>> {
    run_sweep_with(base, sim, spec, default_workers())
}
