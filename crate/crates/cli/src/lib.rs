//! Configuration and output formats behind the `geophase`
//! command line.

pub mod config;
pub mod error;
pub mod experiments;
pub mod output;
pub mod threads;

pub use config::ExperimentConfig;
pub use error::CliError;
pub use experiments::{run_experiment, ResultRecord};

use std::time::Instant;

use geophase::verification::CriterionReport;

const DETERMINISM_CONFIG: &str = r#"
experiment = "dirac-circuit"

[dirac]
thetas = [0.5, 1.0, 1.5]
"#;

fn render_once(config: &ExperimentConfig) -> Result<String, CliError> {
    output::render(&run_experiment(config)?, config::Format::Csv)
}

#[cfg(feature = "parallel")]
fn render_with_threads(config: &ExperimentConfig, threads: usize) -> Result<String, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Config(e.to_string()))?;
    pool.install(|| render_once(config))
}

#[cfg(not(feature = "parallel"))]
fn render_with_threads(config: &ExperimentConfig, _threads: usize) -> Result<String, CliError> {
    render_once(config)
}

/// Renders the same small experiment on one worker and on four and
/// checks that the CSV bodies are byte-identical.
pub fn determinism_check() -> CriterionReport {
    let start = Instant::now();
    let outcome = ExperimentConfig::parse(DETERMINISM_CONFIG)
        .and_then(|c| Ok((render_with_threads(&c, 1)?, render_with_threads(&c, 4)?)));
    let (passed, detail) = match outcome {
        Ok((a, b)) if a == b => (true, format!("{} bytes identical", a.len())),
        Ok(_) => (false, "outputs differ between worker counts".to_string()),
        Err(e) => (false, e.to_string()),
    };
    CriterionReport {
        name: "csv determinism",
        measured: if passed { 0.0 } else { 1.0 },
        target: 0.0,
        passed,
        detail,
        seconds: start.elapsed().as_secs_f64(),
    }
}
