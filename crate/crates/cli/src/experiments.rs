use std::f64::consts::PI;

use geophase::engine::geometric_phase;
use geophase::exec;
use geophase::models::dirac::{solid_angle, Branch, DiracModel, SphericalPath};
use geophase::models::reflectionless::{
    reflectionless_phase_closed_form, transmission_phase_exact, ReflectionlessModel, ReflectionlessParameters,
};
use geophase::scattering::{s_matrix_eigenvalue, SplitHamiltonian};
use geophase::verification::{verify, Tier};
use geophase::{QuadratureScheme, TimeWindow};
use serde::Serialize;

use crate::config::{Direction, Experiment, ExperimentConfig, TierName};
use crate::error::CliError;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// One k of a reflectionless sweep. The first seven fields are the CSV columns.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseRow {
    pub k: f64,
    pub gamma_geo_closed: f64,
    pub gamma_geo_numeric: f64,
    pub delta0_rad: f64,
    pub delta_exact_rad: f64,
    pub abs_diff: f64,
    pub est_error: f64,
    pub gamma_dynamical: f64,
    pub phase_geometric_rad: f64,
    pub evaluations: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s_modulus: Option<f64>,
}

/// One circuit of a Dirac sweep. The first five fields are the CSV columns.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CircuitRow {
    pub theta: f64,
    pub omega_solid: f64,
    pub gamma_geo_numeric: f64,
    pub gamma_geo_closed: f64,
    pub abs_diff: f64,
    pub gamma_dynamical: f64,
    pub est_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionRow {
    pub criterion: String,
    pub measured: f64,
    pub target: f64,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", content = "rows", rename_all = "kebab-case")]
pub enum Rows {
    Phase(Vec<PhaseRow>),
    Circuit(Vec<CircuitRow>),
    Criteria(Vec<CriterionRow>),
}

impl Rows {
    pub fn len(&self) -> usize {
        match self {
            Rows::Phase(r) => r.len(),
            Rows::Circuit(r) => r.len(),
            Rows::Criteria(r) => r.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRecord {
    pub experiment: &'static str,
    pub tool_version: &'static str,
    pub config_digest: String,
    pub input: ExperimentConfig,
    #[serde(flatten)]
    pub rows: Rows,
    /// Sweep points dropped because they lie in the bound-state region `|k| < k1`.
    pub skipped_k: Vec<f64>,
}

impl ResultRecord {
    /// False only for an oracle-verify run with a failing criterion.
    pub fn passed(&self) -> bool {
        match &self.rows {
            Rows::Criteria(rows) => rows.iter().all(|r| r.passed),
            _ => true,
        }
    }
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<ResultRecord, CliError> {
    config.validate()?;
    let mut skipped_k = Vec::new();
    let rows = match config.experiment {
        Experiment::DiracCircuit => Rows::Circuit(dirac_circuit(config)?),
        Experiment::ReflectionlessPhase => Rows::Phase(reflectionless_sweep(config, false, &mut skipped_k)?),
        Experiment::SmatrixCompare => Rows::Phase(reflectionless_sweep(config, true, &mut skipped_k)?),
        Experiment::OracleVerify => Rows::Criteria(oracle_verify(config)),
    };
    Ok(ResultRecord {
        experiment: config.experiment.id(),
        tool_version: TOOL_VERSION,
        config_digest: config.digest()?,
        input: config.clone(),
        rows,
        skipped_k,
    })
}

fn dirac_circuit(config: &ExperimentConfig) -> Result<Vec<CircuitRow>, CliError> {
    let d = config.dirac.as_ref().expect("validated");
    let constants = config.constants;
    let scheme = config.scheme.unwrap_or_default();
    let window = TimeWindow::new(0.0, d.period)?;
    let hbar = constants.hbar;
    let rows = exec::try_map_ordered(&d.thetas, |&theta| -> Result<CircuitRow, CliError> {
        let path = SphericalPath::cone(d.omega, theta, d.period)?;
        let model = DiracModel::new(path.to_parameters(d.k, &constants, d.sector, d.branch), constants)?;
        let phase = geometric_phase(&model, d.k, &window, &scheme)?;
        let omega_solid = solid_angle(&path, &window, &scheme)?;
        let cap = 2.0 * PI * (1.0 - theta.cos());
        // The upper branch carries +hbar Omega / 2 up to the 2 pi hbar of its gauge.
        let gamma_geo_closed = match d.branch {
            Branch::Lower => -0.5 * hbar * cap,
            Branch::Upper => 0.5 * hbar * cap - 2.0 * PI * hbar,
        };
        Ok(CircuitRow {
            theta,
            omega_solid,
            gamma_geo_numeric: phase.gamma_geometric(),
            gamma_geo_closed,
            abs_diff: (phase.gamma_geometric() - gamma_geo_closed).abs(),
            gamma_dynamical: phase.gamma_dynamical(),
            est_error: phase.estimated_error(),
        })
    })?;
    Ok(rows)
}

fn reflectionless_sweep(config: &ExperimentConfig, via_s_matrix: bool, skipped: &mut Vec<f64>) -> Result<Vec<PhaseRow>, CliError> {
    let r = config.reflectionless.as_ref().expect("validated");
    let constants = config.constants;
    let params = match r.direction {
        Direction::Increasing => ReflectionlessParameters::uniform(r.k1, r.mass)?,
        Direction::Decreasing => ReflectionlessParameters::reversed(r.k1, r.mass)?,
    };
    let orientation = match r.direction {
        Direction::Increasing => 1.0,
        Direction::Decreasing => -1.0,
    };
    let model = ReflectionlessModel::new(params.clone(), constants)?;
    let scheme: QuadratureScheme = config.scheme.unwrap_or_else(|| model.recommended_scheme(r.half_length));
    let points = config.sweep.expect("validated").points();
    let (kept, dropped): (Vec<f64>, Vec<f64>) = points.into_iter().partition(|k| k.abs() >= r.k1);
    *skipped = dropped;
    let split = if via_s_matrix { Some(SplitHamiltonian::reflectionless(params.clone(), constants, r.half_length)?) } else { None };
    let hbar = constants.hbar;
    let rows = exec::try_map_ordered(&kept, |&k| -> Result<PhaseRow, CliError> {
        let (phase, s_modulus, numeric) = match &split {
            Some(split) => {
                let s = s_matrix_eigenvalue(split, k, &scheme)?;
                (s.phases, Some(s.value.norm()), s.phase_rad * hbar)
            }
            None => {
                let sweep_scheme = QuadratureScheme { space_truncation: r.half_length, ..scheme };
                let p = model.sweep_phase(k, &sweep_scheme)?;
                (p, None, p.gamma_geometric())
            }
        };
        let closed = orientation * reflectionless_phase_closed_form(&params, &constants, k)?;
        Ok(PhaseRow {
            k,
            gamma_geo_closed: closed,
            gamma_geo_numeric: numeric,
            delta0_rad: closed / hbar,
            delta_exact_rad: transmission_phase_exact(&params, k)?,
            abs_diff: (numeric - closed).abs(),
            est_error: phase.estimated_error(),
            gamma_dynamical: phase.gamma_dynamical(),
            phase_geometric_rad: phase.phase_geometric_rad(),
            evaluations: phase.evaluations(),
            s_modulus,
        })
    })?;
    Ok(rows)
}

fn oracle_verify(config: &ExperimentConfig) -> Vec<CriterionRow> {
    let tier = match config.verify.unwrap_or_default().tier {
        TierName::Fast => Tier::Fast,
        TierName::Full => Tier::Full,
    };
    verify(tier)
        .criteria
        .into_iter()
        .map(|c| CriterionRow { criterion: c.name.to_string(), measured: c.measured, target: c.target, passed: c.passed, detail: c.detail })
        .collect()
}
