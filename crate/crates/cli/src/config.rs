//! Job configuration (TOML) and its validation.
//!
//! ```toml
//! [grid]
//! k_min = -5
//! k_max = 5
//! t_min = -1.5
//! t_max = 1.5
//! h = 0.01
//!
//! [net]
//! kind = "linear"          # linear | affine | propagated
//! a = 1.0
//! b = 1.0
//!
//! [family]
//! kind = "minmax"          # minmax | brlw | bilw
//! epsilon = 1              # minmax only
//! theta = [0.0, 0.3, 0.6]
//! ```
//!
//! See the README for the remaining tables.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use semidiscrete::curved::{LWParams, GENERICITY_TOL};
use semidiscrete::flat::DENOMINATOR_TOL;
use semidiscrete::holo::{
    make_affine_net, make_linear_net, propagate_net, GridSpec, HoloNet, NetError, PolyStrip, TauProfile,
};
use semidiscrete::surface::Epsilon;
use semidiscrete::OdeSettings;
use serde::Deserialize;

use crate::error::{numerical, validation, JobError};

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    pub grid: GridConfig,
    pub net: NetConfig,
    pub family: FamilyConfig,
    #[serde(default)]
    pub analyses: Analyses,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub tolerances: Tolerances,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub k_min: i64,
    pub k_max: i64,
    pub t_min: f64,
    pub t_max: f64,
    pub h: f64,
}

/// Complex numbers are written as `[re, im]`.
pub type C2 = [f64; 2];

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum NetConfig {
    /// `g = a·k + i·b·t`.
    Linear { a: f64, b: f64 },
    /// `g = offset + a·k + i·b·t`.
    Affine { a: f64, b: f64, offset: C2 },
    /// Polynomial base strip at `k_min` (coefficients in increasing degree),
    /// further strips by propagation from `seeds[i] = g(k_min + i + 1, t_min)`.
    Propagated {
        base: Vec<C2>,
        tau: f64,
        sigma: SigmaSpec,
        #[serde(default)]
        seeds: Vec<C2>,
    },
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum SigmaSpec {
    Constant(f64),
    PerGap(Vec<f64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyKind {
    Minmax,
    Brlw,
    Bilw,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyConfig {
    pub kind: FamilyKind,
    pub epsilon: Option<i32>,
    pub s: Option<f64>,
    pub lambda: Option<f64>,
    #[serde(default = "default_theta")]
    pub theta: Vec<f64>,
}

fn default_theta() -> Vec<f64> {
    vec![0.0]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Analyses {
    pub curvature: bool,
    pub singularity: bool,
    pub weingarten: bool,
}

impl Default for Analyses {
    fn default() -> Self {
        Analyses { curvature: true, singularity: true, weingarten: true }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: PathBuf,
    /// File stem shared by all artifacts of the job.
    pub name: String,
    pub obj: bool,
    pub ply: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { dir: PathBuf::from("out"), name: "surface".into(), obj: true, ply: true }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Relative threshold below which a curvature denominator counts as zero.
    pub inf_threshold: f64,
    /// Isothermic residual accepted for the net.
    pub net: f64,
    pub ode_step: f64,
    pub ode_error_budget: f64,
    /// Submanifold constraint tolerance checked before projecting.
    pub constraint: f64,
    /// Pass threshold for the Weingarten residual table.
    pub weingarten: f64,
    /// Spectral parameters used for the CMC 1 adjacency check.
    pub lambda_sweep: Vec<f64>,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            inf_threshold: 1e-10,
            net: 1e-8,
            ode_step: 1e-3,
            ode_error_budget: 1e-8,
            constraint: 1e-6,
            weingarten: 1e-6,
            lambda_sweep: vec![1e-2, -1e-2, 1e-3, -1e-3],
        }
    }
}

impl Tolerances {
    /// Sets a scalar tolerance by name, as given by `--tol NAME=VALUE`.
    pub fn set(&mut self, name: &str, value: f64) -> Result<(), JobError> {
        let slot = match name {
            "inf_threshold" => &mut self.inf_threshold,
            "net" => &mut self.net,
            "ode_step" => &mut self.ode_step,
            "ode_error_budget" => &mut self.ode_error_budget,
            "constraint" => &mut self.constraint,
            "weingarten" => &mut self.weingarten,
            _ => return Err(validation(format!("unknown tolerance '{name}'"))),
        };
        *slot = value;
        Ok(())
    }
}

impl JobConfig {
    pub fn from_toml(text: &str) -> Result<Self, JobError> {
        toml::from_str(text).map_err(|e| validation(format!("config does not parse: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, JobError> {
        let text = std::fs::read_to_string(path).map_err(|e| JobError::io(path, e))?;
        Self::from_toml(&text)
    }
}

/// The surface family after validation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    MinMax(Epsilon),
    /// Bryant-type surface in H³; the exported surface is `x`.
    BrLW { params: LWParams, lambda: f64 },
    /// Bianchi-type surface in S^{2,1}; the exported surface is the Gauss map `n`.
    BiLW { params: LWParams, lambda: f64 },
}

impl Family {
    pub fn describe(&self) -> String {
        match self {
            Family::MinMax(e) => format!("minmax epsilon={:+}", e.value()),
            Family::BrLW { params, lambda } => format!("brlw s={} lambda={lambda}", params.s),
            Family::BiLW { params, lambda } => format!("bilw s={} lambda={lambda}", params.s),
        }
    }

    pub fn curved(&self) -> Option<(LWParams, f64)> {
        match *self {
            Family::MinMax(_) => None,
            Family::BrLW { params, lambda } | Family::BiLW { params, lambda } => Some((params, lambda)),
        }
    }
}

/// A configuration whose preconditions have been checked, with its net built.
#[derive(Debug, Clone)]
pub struct Job {
    pub config: JobConfig,
    pub net: HoloNet,
    pub family: Family,
    pub solver: OdeSettings,
}

fn positive(name: &str, v: f64) -> Result<(), JobError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(validation(format!("tolerance {name} must be positive and finite, got {v}")))
    }
}

fn finite(name: &str, v: f64) -> Result<(), JobError> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(validation(format!("{name} must be finite, got {v}")))
    }
}

fn cx(v: C2) -> Complex64 {
    Complex64::new(v[0], v[1])
}

fn net_error(e: NetError) -> JobError {
    match e {
        NetError::StepFailure(_) | NetError::Collision { .. } => numerical(format!("net propagation: {e}")),
        e => validation(format!("net: {e}")),
    }
}

fn build_net(cfg: &NetConfig, grid: GridSpec, solver: &OdeSettings) -> Result<HoloNet, JobError> {
    match cfg {
        NetConfig::Linear { a, b } => make_linear_net(*a, *b, grid).map_err(net_error),
        NetConfig::Affine { a, b, offset } => make_affine_net(cx(*offset), *a, *b, grid).map_err(net_error),
        NetConfig::Propagated { base, tau, sigma, seeds } => {
            let gaps = grid.strips() - 1;
            let sigma = match sigma {
                SigmaSpec::Constant(s) => vec![*s; gaps],
                SigmaSpec::PerGap(v) => v.clone(),
            };
            if sigma.len() != gaps {
                return Err(validation(format!("net.sigma needs {gaps} values, got {}", sigma.len())));
            }
            if seeds.len() != gaps {
                return Err(validation(format!(
                    "propagated net needs {gaps} strip seeds (config or --seed-strips), got {}",
                    seeds.len()
                )));
            }
            if base.is_empty() {
                return Err(validation("net.base must list at least one coefficient"));
            }
            for (gap, s) in sigma.iter().enumerate() {
                if !(tau / s < 0.0) {
                    return Err(validation(format!(
                        "precondition τ/σ < 0 violated on strip gap {gap} (τ = {tau}, σ = {s})"
                    )));
                }
            }
            let seeds: Vec<Complex64> = seeds.iter().copied().map(cx).collect();
            let base = PolyStrip(base.iter().copied().map(cx).collect());
            propagate_net(base, TauProfile::Constant(*tau), sigma, &seeds, grid, solver).map_err(net_error)
        }
    }
}

fn check_lambda(net: &HoloNet, lambda: f64, what: &str) -> Result<(), JobError> {
    if lambda == 0.0 || !lambda.is_finite() {
        return Err(validation(format!("precondition λ ≠ 0 violated ({what} = {lambda})")));
    }
    for (gap, sigma) in net.sigma_values().iter().enumerate() {
        let gap_value = 1.0 - lambda * sigma;
        if gap_value.abs() < 1e-12 {
            return Err(validation(format!(
                "precondition 1 − λσ ≠ 0 violated on strip gap {gap} ({what} = {lambda}, σ = {sigma})"
            )));
        }
    }
    Ok(())
}

/// Checks every precondition and builds the net. Nothing else is computed.
pub fn validate(config: &JobConfig) -> Result<Job, JobError> {
    let t = &config.tolerances;
    positive("inf_threshold", t.inf_threshold)?;
    positive("net", t.net)?;
    positive("ode_step", t.ode_step)?;
    positive("ode_error_budget", t.ode_error_budget)?;
    positive("constraint", t.constraint)?;
    positive("weingarten", t.weingarten)?;
    let name = &config.output.name;
    if name.is_empty() || name.contains(['/', '\\']) || name.starts_with('.') {
        return Err(validation(format!("output.name '{name}' must be a plain file stem")));
    }
    let fam = &config.family;
    if fam.theta.is_empty() {
        return Err(validation("family.theta must list at least one value"));
    }
    for th in &fam.theta {
        finite("family.theta", *th)?;
    }
    let mut stems: Vec<String> = fam.theta.iter().map(|t| crate::job::member_stem(name, *t)).collect();
    stems.sort();
    stems.dedup();
    if stems.len() != fam.theta.len() {
        return Err(validation("family.theta values must differ in the first four decimals"));
    }
    let g = config.grid;
    let grid = GridSpec::new(g.k_min, g.k_max, g.t_min, g.t_max, g.h).map_err(|e| validation(format!("grid: {e}")))?;
    let solver = OdeSettings::new(t.ode_step, t.ode_error_budget).map_err(|e| validation(format!("solver: {e}")))?;
    let net = build_net(&config.net, grid, &solver)?;
    let report = semidiscrete::holo::validate_net(&net, t.net);
    if !report.pass {
        return Err(validation(format!(
            "net is not isothermic within {:e} (max residual {:e})",
            t.net, report.max_residual
        )));
    }

    let family = match fam.kind {
        FamilyKind::Minmax => {
            if fam.s.is_some() || fam.lambda.is_some() {
                return Err(validation("family.s and family.lambda do not apply to minmax"));
            }
            let e = fam.epsilon.ok_or_else(|| validation("family.epsilon is required for minmax"))?;
            let eps = Epsilon::from_sign(e).ok_or_else(|| validation(format!("family.epsilon must be ±1, got {e}")))?;
            check_denominator(&net, eps)?;
            Family::MinMax(eps)
        }
        FamilyKind::Brlw | FamilyKind::Bilw => {
            if fam.epsilon.is_some() {
                return Err(validation("family.epsilon applies to minmax only"));
            }
            let s = fam.s.ok_or_else(|| validation("family.s is required for brlw/bilw"))?;
            let lambda = fam.lambda.ok_or_else(|| validation("family.lambda is required for brlw/bilw"))?;
            let params = LWParams::new(s).map_err(|e| validation(e.to_string()))?;
            finite("family.lambda", lambda)?;
            check_lambda(&net, lambda, "λ")?;
            check_genericity(&net, s)?;
            if params.is_cmc1() {
                for l in &t.lambda_sweep {
                    check_lambda(&net, *l, "λ-sweep value")?;
                }
            }
            match fam.kind {
                FamilyKind::Brlw => Family::BrLW { params, lambda },
                _ => Family::BiLW { params, lambda },
            }
        }
    };
    Ok(Job { config: config.clone(), net, family, solver })
}

fn check_denominator(net: &HoloNet, eps: Epsilon) -> Result<(), JobError> {
    let grid = net.grid();
    for i in 0..grid.strips() {
        for j in 0..grid.samples() {
            if (1.0 + eps.value() * net.g(i, j).norm_sqr()).abs() < DENOMINATOR_TOL {
                return Err(validation(format!(
                    "precondition 1 + ε|g|² ≠ 0 violated at k = {}, t = {}",
                    grid.k(i),
                    grid.t(j)
                )));
            }
        }
    }
    Ok(())
}

fn check_genericity(net: &HoloNet, s: f64) -> Result<(), JobError> {
    let grid = net.grid();
    for i in 0..grid.strips() {
        for j in 0..grid.samples() {
            if (1.0 + s * net.g(i, j).norm_sqr()).abs() < GENERICITY_TOL {
                return Err(validation(format!(
                    "precondition 1 + s|g|² ≠ 0 violated at k = {}, t = {}",
                    grid.k(i),
                    grid.t(j)
                )));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const LINEAR: &str = r#"
[grid]
k_min = -2
k_max = 2
t_min = -1.0
t_max = 1.0
h = 0.05

[net]
kind = "linear"
a = 1.0
b = 1.0

[family]
kind = "minmax"
epsilon = 1
theta = [0.0, 0.3]
"#;

    #[test]
    fn parses_and_validates() {
        let cfg = JobConfig::from_toml(LINEAR).unwrap();
        assert_eq!(cfg.tolerances, Tolerances::default());
        let job = validate(&cfg).unwrap();
        assert_eq!(job.family, Family::MinMax(Epsilon::Plus));
        assert_eq!(job.net.grid().strips(), 5);
    }

    #[test]
    fn resonant_lambda_is_rejected() {
        let text = LINEAR.replace("kind = \"minmax\"\nepsilon = 1", "kind = \"bilw\"\ns = 0.5\nlambda = 1.0");
        let err = validate(&JobConfig::from_toml(&text).unwrap()).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("1 − λσ"), "{err}");
    }

    #[test]
    fn missing_and_unknown_fields() {
        let text = LINEAR.replace("epsilon = 1", "");
        assert!(validate(&JobConfig::from_toml(&text).unwrap()).unwrap_err().to_string().contains("epsilon"));
        let text = LINEAR.replace("epsilon = 1", "epsilon = 2");
        assert_eq!(validate(&JobConfig::from_toml(&text).unwrap()).unwrap_err().exit_code(), 2);
        let text = LINEAR.replace("h = 0.05", "h = 0.05\nbogus = 1");
        assert_eq!(JobConfig::from_toml(&text).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn maximal_sample_on_unit_circle_is_rejected() {
        let text = LINEAR.replace("epsilon = 1", "epsilon = -1");
        let err = validate(&JobConfig::from_toml(&text).unwrap()).unwrap_err();
        assert!(err.to_string().contains("1 + ε|g|²"), "{err}");
    }

    #[test]
    fn tolerance_override() {
        let mut t = Tolerances::default();
        t.set("constraint", 1e-5).unwrap();
        assert_eq!(t.constraint, 1e-5);
        assert!(t.set("nope", 1.0).is_err());
    }
}
