use std::path::PathBuf;

use iprep_core::rg::{ContinuationPolicy, RgModelSpec};
use iprep_core::tba::BoundaryRule;
use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Problems with the config itself; mapped to exit code 2.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct SchemaError(pub String);

fn schema(msg: impl Into<String>) -> SchemaError {
    SchemaError(msg.into())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    RgGapScaling,
    RgEigenvalueFlow,
    XyParentCheck,
    XyLiomBound,
    TbaSweep,
    XxzEdGaps,
    SmaleAudit,
    AdiabaticFidelity,
    EntanglementScan,
}

impl Experiment {
    pub const ALL: [Experiment; 9] = [
        Experiment::RgGapScaling,
        Experiment::RgEigenvalueFlow,
        Experiment::XyParentCheck,
        Experiment::XyLiomBound,
        Experiment::TbaSweep,
        Experiment::XxzEdGaps,
        Experiment::SmaleAudit,
        Experiment::AdiabaticFidelity,
        Experiment::EntanglementScan,
    ];

    pub fn name(self) -> String {
        serde_json::to_value(self).unwrap().as_str().unwrap().to_string()
    }

    pub fn summary(self) -> &'static str {
        match self {
            Experiment::RgGapScaling => "minimum parent gap along the continuation path versus N, with log-log fit",
            Experiment::RgEigenvalueFlow => "charge eigenvalues of all 2^N roots on a grid of couplings",
            Experiment::XyParentCheck => "dense spectra of mode-occupation parent Hamiltonians at random (gamma, h)",
            Experiment::XyLiomBound => "local-charge Gram structure and gap bound against dense parents",
            Experiment::TbaSweep => "Fermi velocity, dressed charge and magnetization over (Delta, h)",
            Experiment::XxzEdGaps => "sector gaps of the periodic XXZ chain and their size scaling",
            Experiment::SmaleAudit => "Smale separation radii against true root distances along a scan",
            Experiment::AdiabaticFidelity => "product-formula sweep of a parent Hamiltonian: doubling search and T sweep",
            Experiment::EntanglementScan => "half-chain entanglement of every joint eigenstate of the RG charges",
        }
    }

    /// Params with their defaults, as shown by `iprep list`.
    pub fn default_params(self) -> Value {
        let v = match self {
            Experiment::RgGapScaling => serde_json::to_value(GapScalingParams::default()),
            Experiment::RgEigenvalueFlow => serde_json::to_value(FlowParams::default()),
            Experiment::XyParentCheck => serde_json::to_value(XyParentParams::default()),
            Experiment::XyLiomBound => serde_json::to_value(LiomParams::default()),
            Experiment::TbaSweep => serde_json::to_value(TbaParams::default()),
            Experiment::XxzEdGaps => serde_json::to_value(EdGapParams::default()),
            Experiment::SmaleAudit => serde_json::to_value(SmaleParams::default()),
            Experiment::AdiabaticFidelity => serde_json::to_value(AdiabaticParams::default()),
            Experiment::EntanglementScan => serde_json::to_value(EntanglementParams::default()),
        };
        v.expect("params serialize")
    }

    /// Top-level fields that must be present besides `experiment`.
    pub fn required_fields(self) -> &'static [&'static str] {
        match self {
            Experiment::XyParentCheck | Experiment::XyLiomBound => &["seed"],
            _ => &[],
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default = "empty_object")]
    pub params: Value,
    /// Field overrides for the continuation policy.
    #[serde(default)]
    pub policy: Option<Value>,
}

fn empty_object() -> Value {
    Value::Object(Default::default())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    CentralSpin,
    ConstantSpacing,
    Random,
}

impl ModelKind {
    pub fn spec(self, n: usize, seed: Option<u64>) -> iprep_core::Result<RgModelSpec> {
        match self {
            ModelKind::CentralSpin => RgModelSpec::central_spin(n),
            ModelKind::ConstantSpacing => RgModelSpec::constant_spacing(n),
            ModelKind::Random => RgModelSpec::random_uniform(n, seed.expect("validated seed")),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GapScalingParams {
    pub model: ModelKind,
    pub n_min: usize,
    pub n_max: usize,
    pub slope_range: [f64; 2],
    /// Largest allowed |N gap - 1| per point.
    pub point_tolerance: f64,
    pub scan_limit: usize,
}

impl Default for GapScalingParams {
    fn default() -> Self {
        Self {
            model: ModelKind::CentralSpin,
            n_min: 4,
            n_max: 9,
            slope_range: [-1.2, -0.85],
            point_tolerance: 0.2,
            scan_limit: iprep_core::rg::DEFAULT_SCAN_LIMIT,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FlowParams {
    pub model: ModelKind,
    pub n: usize,
    /// End of the path; the model's default target when absent.
    pub g_max: Option<f64>,
    /// Recorded couplings, evenly spaced up to `g_max`.
    pub points: usize,
    /// Compare against joint diagonalization up to this N.
    pub ed_check_max_n: usize,
    pub scan_limit: usize,
}

impl Default for FlowParams {
    fn default() -> Self {
        Self {
            model: ModelKind::CentralSpin,
            n: 6,
            g_max: None,
            points: 10,
            ed_check_max_n: 8,
            scan_limit: iprep_core::rg::DEFAULT_SCAN_LIMIT,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct XyParentParams {
    pub n: usize,
    pub points: usize,
    pub patterns_per_point: usize,
    pub gamma_range: [f64; 2],
    pub h_range: [f64; 2],
    /// Points with |h - 1| below this are redrawn.
    pub critical_margin: f64,
    pub tolerance: f64,
}

impl Default for XyParentParams {
    fn default() -> Self {
        Self {
            n: 5,
            points: 20,
            patterns_per_point: 1,
            gamma_range: [0.05, 2.0],
            h_range: [0.0, 2.0],
            critical_margin: 0.05,
            tolerance: 1e-9,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LiomParams {
    pub n: usize,
    pub points: usize,
    pub patterns_per_point: usize,
    pub gamma_range: [f64; 2],
    pub h_range: [f64; 2],
    pub critical_margin: f64,
    /// Dense parent spectra are computed up to this N.
    pub dense_max_n: usize,
}

impl Default for LiomParams {
    fn default() -> Self {
        Self {
            n: 6,
            points: 10,
            patterns_per_point: 3,
            gamma_range: [0.05, 2.0],
            h_range: [0.0, 2.0],
            critical_margin: 0.05,
            dense_max_n: 6,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TbaParams {
    pub deltas: Vec<f64>,
    pub fields: Vec<f64>,
    pub grid: usize,
    pub boundary: BoundaryRule,
    /// Allowed deviation from the zero-field closed forms.
    pub zero_field_tolerance: f64,
}

impl Default for TbaParams {
    fn default() -> Self {
        Self {
            deltas: vec![0.1, 0.3, 0.5, 0.7],
            fields: vec![0.0, 0.05, 0.1],
            grid: 1024,
            boundary: BoundaryRule::default(),
            zero_field_tolerance: 1e-3,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EdGapParams {
    pub delta: f64,
    pub sizes: Vec<usize>,
    /// Down spins per site; `N * down_fraction` must be an integer.
    pub down_fraction: f64,
    pub max_sector_dim: usize,
    pub expected_slope: Option<f64>,
    pub slope_tolerance: f64,
}

impl Default for EdGapParams {
    fn default() -> Self {
        Self {
            delta: 0.5,
            sizes: vec![8, 12, 16, 20],
            down_fraction: 0.25,
            max_sector_dim: iprep_core::ed::DEFAULT_SECTOR_LIMIT,
            expected_slope: None,
            slope_tolerance: 0.15,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SmaleParams {
    pub model: ModelKind,
    pub n_min: usize,
    pub n_max: usize,
    /// Fractions of the path end where roots are audited; the end itself is always included.
    pub checkpoints: Vec<f64>,
    pub scan_limit: usize,
}

impl Default for SmaleParams {
    fn default() -> Self {
        Self {
            model: ModelKind::CentralSpin,
            n_min: 3,
            n_max: 6,
            checkpoints: vec![0.1, 0.3, 0.5, 0.8],
            scan_limit: iprep_core::rg::DEFAULT_SCAN_LIMIT,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AdiabaticParams {
    pub model: ModelKind,
    pub n: usize,
    pub g_end: f64,
    pub dt: f64,
    pub t_start: f64,
    pub threshold: f64,
    pub max_doublings: usize,
    /// Doublings in the T sweep that ends at the time found by the search.
    pub sweep_doublings: usize,
    /// Product-formula convergence study; 0 skips it.
    pub trotter_levels: usize,
    pub trotter_base_steps: usize,
    pub trotter_reference_factor: usize,
    pub trotter_time: f64,
    pub error_budget: f64,
}

impl Default for AdiabaticParams {
    fn default() -> Self {
        Self {
            model: ModelKind::CentralSpin,
            n: 4,
            g_end: 1.0,
            dt: 0.02,
            t_start: 1.0,
            threshold: 0.99,
            max_doublings: 10,
            sweep_doublings: 4,
            trotter_levels: 0,
            trotter_base_steps: 64,
            trotter_reference_factor: 16,
            trotter_time: 8.0,
            error_budget: 0.01,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EntanglementParams {
    pub model: ModelKind,
    pub n: usize,
    pub g: f64,
    /// 1-based sites of the subsystem; the first N/2 sites when absent.
    pub subsystem: Option<Vec<usize>>,
}

impl Default for EntanglementParams {
    fn default() -> Self {
        Self {
            model: ModelKind::CentralSpin,
            n: 8,
            g: 1.0,
            subsystem: None,
        }
    }
}

#[derive(Clone, Debug)]
pub enum Params {
    GapScaling(GapScalingParams),
    Flow(FlowParams),
    XyParent(XyParentParams),
    Liom(LiomParams),
    Tba(TbaParams),
    EdGaps(EdGapParams),
    Smale(SmaleParams),
    Adiabatic(AdiabaticParams),
    Entanglement(EntanglementParams),
}

/// A config that passed every check that does not need computation.
#[derive(Clone, Debug)]
pub struct Validated {
    pub config: ExperimentConfig,
    pub params: Params,
    pub policy_overrides: serde_json::Map<String, Value>,
}

impl Validated {
    /// Continuation policy for `spec` with the config's overrides applied.
    pub fn policy(&self, spec: &RgModelSpec) -> ContinuationPolicy {
        merge_policy(ContinuationPolicy::for_spec(spec), &self.policy_overrides).expect("validated policy")
    }

    pub fn seed(&self) -> Option<u64> {
        self.config.seed
    }
}

fn merge_policy(base: ContinuationPolicy, overrides: &serde_json::Map<String, Value>) -> Result<ContinuationPolicy, SchemaError> {
    let mut v = serde_json::to_value(base).expect("policy serializes");
    let obj = v.as_object_mut().expect("policy is an object");
    for (k, val) in overrides {
        obj.insert(k.clone(), val.clone());
    }
    let p: ContinuationPolicy = serde_json::from_value(v).map_err(|e| schema(format!("policy: {e}")))?;
    p.validate().map_err(|e| schema(format!("policy: {e}")))?;
    Ok(p)
}

pub fn parse(text: &str) -> Result<ExperimentConfig, SchemaError> {
    serde_json::from_str(text).map_err(|e| schema(format!("config: {e}")))
}

fn typed<T: serde::de::DeserializeOwned>(v: &Value) -> Result<T, SchemaError> {
    serde_json::from_value(v.clone()).map_err(|e| schema(format!("params: {e}")))
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), SchemaError> {
    if cond {
        Ok(())
    } else {
        Err(schema(msg()))
    }
}

fn check_range(name: &str, r: [f64; 2]) -> Result<(), SchemaError> {
    check(r[0].is_finite() && r[1].is_finite() && r[0] < r[1], || format!("{name} must be an increasing finite pair"))
}

fn check_model(model: ModelKind, seed: Option<u64>) -> Result<(), SchemaError> {
    check(model != ModelKind::Random || seed.is_some(), || "model \"random\" needs a seed".into())
}

fn check_sizes(lo: usize, hi: usize, min: usize) -> Result<(), SchemaError> {
    check(lo >= min && lo <= hi, || format!("need {min} <= n_min <= n_max, got {lo}..{hi}"))
}

pub fn validate(config: ExperimentConfig) -> Result<Validated, SchemaError> {
    if !config.params.is_object() {
        return Err(schema("params must be an object"));
    }
    let policy_overrides = match &config.policy {
        None => Default::default(),
        Some(Value::Object(m)) => m.clone(),
        Some(_) => return Err(schema("policy must be an object")),
    };
    merge_policy(ContinuationPolicy::default(), &policy_overrides)?;
    for field in config.experiment.required_fields() {
        check(*field != "seed" || config.seed.is_some(), || format!("{} needs a seed", config.experiment.name()))?;
    }
    let seed = config.seed;
    let p = &config.params;
    let params = match config.experiment {
        Experiment::RgGapScaling => {
            let q: GapScalingParams = typed(p)?;
            check_model(q.model, seed)?;
            check_sizes(q.n_min, q.n_max, 2)?;
            check(q.n_max - q.n_min >= 2, || "the fit needs at least three sizes".into())?;
            check_range("slope_range", q.slope_range)?;
            check(q.point_tolerance > 0.0, || "point_tolerance must be positive".into())?;
            Params::GapScaling(q)
        }
        Experiment::RgEigenvalueFlow => {
            let q: FlowParams = typed(p)?;
            check_model(q.model, seed)?;
            check(q.n >= 2, || "n must be >= 2".into())?;
            check(q.points >= 1, || "points must be >= 1".into())?;
            check(q.g_max.is_none_or(|g| g > 0.0 && g.is_finite()), || "g_max must be positive".into())?;
            Params::Flow(q)
        }
        Experiment::XyParentCheck => {
            let q: XyParentParams = typed(p)?;
            check(q.n >= 2, || "n must be >= 2".into())?;
            check(q.points >= 1 && q.patterns_per_point >= 1, || "points and patterns_per_point must be >= 1".into())?;
            check_range("gamma_range", q.gamma_range)?;
            check_range("h_range", q.h_range)?;
            check(q.tolerance > 0.0, || "tolerance must be positive".into())?;
            Params::XyParent(q)
        }
        Experiment::XyLiomBound => {
            let q: LiomParams = typed(p)?;
            check(q.n >= 2, || "n must be >= 2".into())?;
            check(q.points >= 1, || "points must be >= 1".into())?;
            check_range("gamma_range", q.gamma_range)?;
            check_range("h_range", q.h_range)?;
            Params::Liom(q)
        }
        Experiment::TbaSweep => {
            let q: TbaParams = typed(p)?;
            check(!q.deltas.is_empty() && !q.fields.is_empty(), || "deltas and fields must be non-empty".into())?;
            for &d in &q.deltas {
                for &h in &q.fields {
                    let input = iprep_core::tba::TbaInput { grid: q.grid, boundary: q.boundary, ..iprep_core::tba::TbaInput::new(d, h) };
                    input.validate().map_err(|e| schema(format!("params: {e}")))?;
                }
            }
            Params::Tba(q)
        }
        Experiment::XxzEdGaps => {
            let q: EdGapParams = typed(p)?;
            check(q.sizes.len() >= 3, || "the fit needs at least three sizes".into())?;
            check(q.delta.is_finite(), || "delta must be finite".into())?;
            check((0.0..=1.0).contains(&q.down_fraction), || "down_fraction must lie in [0, 1]".into())?;
            for &n in &q.sizes {
                let downs = n as f64 * q.down_fraction;
                check(n >= 2 && (downs - downs.round()).abs() < 1e-9, || {
                    format!("N = {n} times down_fraction {} is not an integer", q.down_fraction)
                })?;
            }
            Params::EdGaps(q)
        }
        Experiment::SmaleAudit => {
            let q: SmaleParams = typed(p)?;
            check_model(q.model, seed)?;
            check_sizes(q.n_min, q.n_max, 2)?;
            check(q.checkpoints.iter().all(|f| *f > 0.0 && *f < 1.0), || "checkpoints must lie in (0, 1)".into())?;
            Params::Smale(q)
        }
        Experiment::AdiabaticFidelity => {
            let q: AdiabaticParams = typed(p)?;
            check_model(q.model, seed)?;
            check(q.n >= 2, || "n must be >= 2".into())?;
            check(q.g_end > 0.0 && q.dt > 0.0 && q.t_start > 0.0 && q.trotter_time > 0.0, || {
                "g_end, dt, t_start and trotter_time must be positive".into()
            })?;
            check(q.threshold > 0.0 && q.threshold <= 1.0, || "threshold must lie in (0, 1]".into())?;
            check(q.error_budget > 0.0, || "error_budget must be positive".into())?;
            check(q.trotter_levels == 0 || q.trotter_levels >= 3, || "trotter_levels must be 0 or >= 3".into())?;
            Params::Adiabatic(q)
        }
        Experiment::EntanglementScan => {
            let q: EntanglementParams = typed(p)?;
            check_model(q.model, seed)?;
            check(q.n >= 2, || "n must be >= 2".into())?;
            check(q.g >= 0.0 && q.g.is_finite(), || "g must be >= 0".into())?;
            if let Some(sub) = &q.subsystem {
                check(sub.iter().all(|&s| s >= 1 && s <= q.n), || format!("subsystem sites must lie in 1..={}", q.n))?;
            }
            Params::Entanglement(q)
        }
    };
    Ok(Validated { config, params, policy_overrides })
}
