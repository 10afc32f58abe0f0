//! Experiment specification: defaults, flat key-value config files, and
//! CLI overrides, merged with precedence CLI > file > defaults.
//!
//! Config files hold one `key = value` pair per line; blank lines and text
//! after `#` are ignored. Unknown keys are rejected so typos surface before
//! any computation starts.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use odemimo::modulation::Modulation;
use odemimo::rkcd::InitialValue;

use crate::error::HarnessError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    AnalyticVsSim,
    EtaSweep,
    TodeVsOde,
    GridSearch,
    DetectorRace,
    MseVsTk,
    DeltaStudy,
    SerVsSnr,
}

impl ExperimentKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::AnalyticVsSim => "analytic-vs-sim",
            Self::EtaSweep => "eta-sweep",
            Self::TodeVsOde => "tode-vs-ode",
            Self::GridSearch => "grid-search",
            Self::DetectorRace => "detector-race",
            Self::MseVsTk => "mse-vs-tk",
            Self::DeltaStudy => "delta-study",
            Self::SerVsSnr => "ser-vs-snr",
        }
    }

    pub fn parse(s: &str) -> Result<Self, HarnessError> {
        match s.to_ascii_lowercase().as_str() {
            "analytic-vs-sim" => Ok(Self::AnalyticVsSim),
            "eta-sweep" => Ok(Self::EtaSweep),
            "tode-vs-ode" => Ok(Self::TodeVsOde),
            "grid-search" => Ok(Self::GridSearch),
            "detector-race" => Ok(Self::DetectorRace),
            "mse-vs-tk" => Ok(Self::MseVsTk),
            "delta-study" => Ok(Self::DeltaStudy),
            "ser-vs-snr" => Ok(Self::SerVsSnr),
            other => Err(HarnessError::Config(format!("unknown experiment kind '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChannelSpec {
    Iid { variance: f64 },
    Kronecker { rho: f64 },
}

impl ChannelSpec {
    pub fn describe(&self) -> String {
        match self {
            Self::Iid { variance } => format!("iid (per-element variance {variance})"),
            Self::Kronecker { rho } => format!("kronecker (rho {rho})"),
        }
    }

    /// Average per-element channel power, used for the SNR mapping.
    pub fn element_power(&self) -> f64 {
        match self {
            Self::Iid { variance } => *variance,
            Self::Kronecker { .. } => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegKind {
    Constant,
    InverseDecay,
    ExpDecay,
}

impl RegKind {
    pub fn parse(s: &str) -> Result<Self, HarnessError> {
        match s.to_ascii_lowercase().as_str() {
            "constant" => Ok(Self::Constant),
            "inverse-decay" => Ok(Self::InverseDecay),
            "exp-decay" => Ok(Self::ExpDecay),
            other => Err(HarnessError::Config(format!(
                "unknown regularizer '{other}' (expected constant, inverse-decay, or exp-decay)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Solver {
    Euler,
    Rkcd,
    ExactMmse,
}

impl Solver {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Euler => "euler",
            Self::Rkcd => "rkcd",
            Self::ExactMmse => "exact-mmse",
        }
    }

    fn parse(s: &str) -> Result<Self, HarnessError> {
        match s.to_ascii_lowercase().as_str() {
            "euler" => Ok(Self::Euler),
            "rkcd" => Ok(Self::Rkcd),
            "exact-mmse" => Ok(Self::ExactMmse),
            other => Err(HarnessError::Config(format!(
                "unknown solver '{other}' (expected euler, rkcd, or exact-mmse)"
            ))),
        }
    }
}

/// Fully resolved experiment description. Every run is a pure function of
/// this struct; the seed is echoed into all outputs.
#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    pub n: usize,
    pub m: usize,
    pub sigma2: f64,
    pub modulation: Modulation,
    pub channel: ChannelSpec,
    /// Solver/reference regularization constant; None means matched to
    /// the noise variance.
    pub eta: Option<f64>,
    pub reg_kind: RegKind,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    pub t_max: f64,
    /// Spacing of recorded/evaluated times.
    pub record_dt: f64,
    pub trials: usize,
    pub seed: u64,
    pub out: PathBuf,
    /// 0 means the default rayon pool size.
    pub threads: usize,
    pub quad_tol: f64,
    pub eps_damp: f64,
    /// Iteration budget for the discrete detectors.
    pub iters: usize,
    /// Explicit step size for the stabilized detector (otherwise derived).
    pub h_override: Option<f64>,
    /// Horizon T of the integrated-MSE functional.
    pub horizon: f64,
    pub etas: Vec<f64>,
    pub alphas: Vec<f64>,
    pub deltas: Vec<f64>,
    pub solvers: Vec<Solver>,
    pub snrs_db: Vec<f64>,
    pub init: InitialValue,
}

impl ExperimentSpec {
    pub fn defaults(kind: ExperimentKind) -> Self {
        Self {
            kind,
            n: 8,
            m: 8,
            sigma2: 1.0,
            modulation: Modulation::Qpsk,
            channel: ChannelSpec::Iid { variance: 1.0 },
            eta: None,
            reg_kind: RegKind::InverseDecay,
            alpha: 500.0,
            beta: 2.0,
            gamma: 5.0,
            delta: 0.005,
            t_max: 3.0,
            record_dt: 0.05,
            trials: 1000,
            seed: 1,
            out: PathBuf::from(format!("{}.csv", kind.name())),
            threads: 0,
            quad_tol: 1e-8,
            eps_damp: 2.0,
            iters: 60,
            h_override: None,
            horizon: 0.8,
            etas: vec![0.05, 1.0, 10.0],
            alphas: vec![1.0, 10.0, 50.0, 100.0],
            deltas: vec![0.05, 0.01, 0.005],
            solvers: vec![Solver::Euler, Solver::Rkcd, Solver::ExactMmse],
            snrs_db: vec![0.0, 4.0, 8.0, 12.0, 16.0, 20.0],
            init: InitialValue::MatchedFilter,
        }
    }

    /// The regularization constant used by solvers and reference curves.
    pub fn solver_eta(&self) -> f64 {
        self.eta.unwrap_or(self.sigma2)
    }

    /// The schedule under study for the time-dependent experiments.
    pub fn regularizer(&self) -> Result<odemimo::regularizer::Regularizer, HarnessError> {
        use odemimo::regularizer::Regularizer;
        let reg = match self.reg_kind {
            RegKind::Constant => Regularizer::constant(self.solver_eta()),
            RegKind::InverseDecay => Regularizer::inverse_decay(self.alpha, self.sigma2),
            RegKind::ExpDecay => Regularizer::exp_decay(self.beta, self.gamma, self.sigma2),
        };
        reg.map_err(|e| HarnessError::Config(e.to_string()))
    }

    /// Full validation; called once before any computation.
    pub fn validate(&self) -> Result<(), HarnessError> {
        let fail = |msg: String| Err(HarnessError::Config(msg));
        if self.n == 0 || self.m == 0 {
            return fail(format!("antenna counts must be positive (n={}, m={})", self.n, self.m));
        }
        if !(self.sigma2 > 0.0) || !self.sigma2.is_finite() {
            return fail(format!("sigma2 must be positive (got {})", self.sigma2));
        }
        match self.channel {
            ChannelSpec::Iid { variance } => {
                if !(variance > 0.0) || !variance.is_finite() {
                    return fail(format!("channel variance must be positive (got {variance})"));
                }
            }
            ChannelSpec::Kronecker { rho } => {
                if !(0.0..1.0).contains(&rho) {
                    return fail(format!("rho must lie in [0, 1) (got {rho})"));
                }
            }
        }
        if let Some(eta) = self.eta {
            if !(eta > 0.0) || !eta.is_finite() {
                return fail(format!("eta must be positive (got {eta})"));
            }
        }
        for (name, v) in [
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("gamma", self.gamma),
            ("delta", self.delta),
            ("t_max", self.t_max),
            ("record_dt", self.record_dt),
            ("quad_tol", self.quad_tol),
            ("eps_damp", self.eps_damp),
            ("horizon", self.horizon),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return fail(format!("{name} must be positive (got {v})"));
            }
        }
        if let Some(h) = self.h_override {
            if !(h > 0.0) || !h.is_finite() {
                return fail(format!("h must be positive (got {h})"));
            }
        }
        if self.trials == 0 {
            return fail("trials must be at least 1".into());
        }
        if self.iters == 0 {
            return fail("iters must be at least 1".into());
        }
        let lists: [(&str, bool); 5] = [
            ("etas", self.etas.is_empty()),
            ("alphas", self.alphas.is_empty()),
            ("deltas", self.deltas.is_empty()),
            ("solvers", self.solvers.is_empty()),
            ("snrs", self.snrs_db.is_empty()),
        ];
        for (name, empty) in lists {
            if empty {
                return fail(format!("{name} must not be empty"));
            }
        }
        for &v in self.etas.iter().chain(&self.alphas).chain(&self.deltas) {
            if !(v > 0.0) || !v.is_finite() {
                return fail(format!("list entries must be positive (got {v})"));
            }
        }
        if self.snrs_db.iter().any(|v| !v.is_finite()) {
            return fail("snrs must be finite".into());
        }
        if self.kind == ExperimentKind::DetectorRace && self.solvers.len() < 2 {
            return fail("detector-race needs at least two solvers to compare".into());
        }
        Ok(())
    }
}

/// Partial settings from a config file or the command line.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub kind: Option<ExperimentKind>,
    pub n: Option<usize>,
    pub m: Option<usize>,
    pub sigma2: Option<f64>,
    pub modulation: Option<Modulation>,
    pub channel_kind: Option<String>,
    pub variance: Option<f64>,
    pub rho: Option<f64>,
    pub eta: Option<f64>,
    pub reg_kind: Option<RegKind>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub gamma: Option<f64>,
    pub delta: Option<f64>,
    pub t_max: Option<f64>,
    pub record_dt: Option<f64>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
    pub quad_tol: Option<f64>,
    pub eps_damp: Option<f64>,
    pub iters: Option<usize>,
    pub h: Option<f64>,
    pub horizon: Option<f64>,
    pub etas: Option<Vec<f64>>,
    pub alphas: Option<Vec<f64>>,
    pub deltas: Option<Vec<f64>>,
    pub solvers: Option<Vec<String>>,
    pub snrs: Option<Vec<f64>>,
    pub init: Option<String>,
}

fn parse_list<T: std::str::FromStr>(key: &str, value: &str) -> Result<Vec<T>, HarnessError> {
    value
        .split(',')
        .map(|item| {
            item.trim()
                .parse::<T>()
                .map_err(|_| HarnessError::Config(format!("{key}: cannot parse '{item}'")))
        })
        .collect()
}

fn parse_scalar<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, HarnessError> {
    value
        .parse::<T>()
        .map_err(|_| HarnessError::Config(format!("{key}: cannot parse '{value}'")))
}

impl Overrides {
    /// Reads a flat key-value config file.
    pub fn from_file(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            HarnessError::Config(format!("cannot read config {}: {e}", path.display()))
        })?;
        let mut pairs = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(HarnessError::Config(format!(
                    "{}:{}: expected 'key = value', got '{line}'",
                    path.display(),
                    lineno + 1
                )));
            };
            let key = key.trim().to_string();
            if pairs.insert(key.clone(), value.trim().to_string()).is_some() {
                return Err(HarnessError::Config(format!(
                    "{}:{}: duplicate key '{key}'",
                    path.display(),
                    lineno + 1
                )));
            }
        }

        let mut o = Overrides::default();
        for (key, value) in &pairs {
            match key.as_str() {
                "kind" => o.kind = Some(ExperimentKind::parse(value)?),
                "n" => o.n = Some(parse_scalar(key, value)?),
                "m" => o.m = Some(parse_scalar(key, value)?),
                "sigma2" => o.sigma2 = Some(parse_scalar(key, value)?),
                "modulation" => {
                    o.modulation = Some(
                        value
                            .parse::<Modulation>()
                            .map_err(|e| HarnessError::Config(e.to_string()))?,
                    )
                }
                "channel" => o.channel_kind = Some(value.clone()),
                "variance" => o.variance = Some(parse_scalar(key, value)?),
                "rho" => o.rho = Some(parse_scalar(key, value)?),
                "eta" => o.eta = Some(parse_scalar(key, value)?),
                "reg" => o.reg_kind = Some(RegKind::parse(value)?),
                "alpha" => o.alpha = Some(parse_scalar(key, value)?),
                "beta" => o.beta = Some(parse_scalar(key, value)?),
                "gamma" => o.gamma = Some(parse_scalar(key, value)?),
                "delta" => o.delta = Some(parse_scalar(key, value)?),
                "t_max" => o.t_max = Some(parse_scalar(key, value)?),
                "record_dt" => o.record_dt = Some(parse_scalar(key, value)?),
                "trials" => o.trials = Some(parse_scalar(key, value)?),
                "seed" => o.seed = Some(parse_scalar(key, value)?),
                "out" => o.out = Some(PathBuf::from(value)),
                "threads" => o.threads = Some(parse_scalar(key, value)?),
                "quad_tol" => o.quad_tol = Some(parse_scalar(key, value)?),
                "eps_damp" => o.eps_damp = Some(parse_scalar(key, value)?),
                "iters" => o.iters = Some(parse_scalar(key, value)?),
                "h" => o.h = Some(parse_scalar(key, value)?),
                "horizon" => o.horizon = Some(parse_scalar(key, value)?),
                "etas" => o.etas = Some(parse_list(key, value)?),
                "alphas" => o.alphas = Some(parse_list(key, value)?),
                "deltas" => o.deltas = Some(parse_list(key, value)?),
                "solvers" => {
                    o.solvers = Some(value.split(',').map(|s| s.trim().to_string()).collect())
                }
                "snrs" => o.snrs = Some(parse_list(key, value)?),
                "init" => o.init = Some(value.clone()),
                other => {
                    return Err(HarnessError::Config(format!(
                        "{}: unknown key '{other}'",
                        path.display()
                    )))
                }
            }
        }
        Ok(o)
    }

    /// Applies these settings on top of `spec`.
    pub fn apply(&self, spec: &mut ExperimentSpec) -> Result<(), HarnessError> {
        if let Some(kind) = self.kind {
            if kind != spec.kind {
                return Err(HarnessError::Config(format!(
                    "config kind '{}' conflicts with the requested experiment '{}'",
                    kind.name(),
                    spec.kind.name()
                )));
            }
        }
        macro_rules! take {
            ($($field:ident),*) => {
                $(if let Some(v) = &self.$field { spec.$field = v.clone(); })*
            };
        }
        take!(n, m, sigma2, modulation, alpha, beta, gamma, delta, t_max, record_dt, trials,
              seed, out, threads, quad_tol, eps_damp, iters, horizon, etas, alphas, deltas);
        if let Some(v) = self.eta {
            spec.eta = Some(v);
        }
        if let Some(v) = &self.reg_kind {
            spec.reg_kind = *v;
        }
        if let Some(v) = self.h {
            spec.h_override = Some(v);
        }
        if let Some(v) = &self.snrs {
            spec.snrs_db = v.clone();
        }
        if let Some(kind) = &self.channel_kind {
            spec.channel = match kind.to_ascii_lowercase().as_str() {
                "iid" => ChannelSpec::Iid { variance: self.variance.unwrap_or(1.0) },
                "kronecker" => ChannelSpec::Kronecker { rho: self.rho.unwrap_or(0.2) },
                other => {
                    return Err(HarnessError::Config(format!(
                        "unknown channel '{other}' (expected iid or kronecker)"
                    )))
                }
            };
        } else {
            // Parameter tweaks without a kind change.
            if let Some(v) = self.variance {
                if let ChannelSpec::Iid { variance } = &mut spec.channel {
                    *variance = v;
                }
            }
            if let Some(v) = self.rho {
                if let ChannelSpec::Kronecker { rho } = &mut spec.channel {
                    *rho = v;
                }
            }
        }
        if let Some(list) = &self.solvers {
            spec.solvers = list
                .iter()
                .map(|s| Solver::parse(s))
                .collect::<Result<_, _>>()?;
        }
        if let Some(init) = &self.init {
            spec.init = match init.to_ascii_lowercase().as_str() {
                "matched-filter" => InitialValue::MatchedFilter,
                "zero" => InitialValue::Zero,
                other => {
                    return Err(HarnessError::Config(format!(
                        "unknown init '{other}' (expected matched-filter or zero)"
                    )))
                }
            };
        }
        Ok(())
    }
}

/// defaults <- file <- cli, then validate.
pub fn resolve(
    kind: ExperimentKind,
    file: Option<&Path>,
    cli: &Overrides,
) -> Result<ExperimentSpec, HarnessError> {
    let mut spec = ExperimentSpec::defaults(kind);
    if let Some(path) = file {
        Overrides::from_file(path)?.apply(&mut spec)?;
    }
    cli.apply(&mut spec)?;
    spec.validate()?;
    Ok(spec)
}
