use std::fmt::Write as _;
use std::path::Path;

use crate::config::Format;
use crate::error::CliError;
use crate::experiments::{ResultRecord, Rows};

pub const PHASE_HEADER: &str = "k,gamma_geo_closed,gamma_geo_numeric,delta0_rad,delta_exact_rad,abs_diff,est_error";
pub const CIRCUIT_HEADER: &str = "theta,omega_solid,gamma_geo_numeric,gamma_geo_closed,abs_diff";
pub const CRITERIA_HEADER: &str = "criterion,measured,target,passed";

fn line(out: &mut String, fields: &[String]) {
    out.push_str(&fields.join(","));
    out.push('\n');
}

fn num(x: f64) -> String {
    format!("{x:e}")
}

/// CSV body with the normative header. Numbers use the shortest
/// round-trip representation, so equal inputs give identical bytes.
pub fn to_csv(record: &ResultRecord) -> String {
    let mut out = String::new();
    match &record.rows {
        Rows::Phase(rows) => {
            writeln!(out, "{PHASE_HEADER}").expect("string write");
            for r in rows {
                line(
                    &mut out,
                    &[r.k, r.gamma_geo_closed, r.gamma_geo_numeric, r.delta0_rad, r.delta_exact_rad, r.abs_diff, r.est_error]
                        .map(num),
                );
            }
        }
        Rows::Circuit(rows) => {
            writeln!(out, "{CIRCUIT_HEADER}").expect("string write");
            for r in rows {
                line(&mut out, &[r.theta, r.omega_solid, r.gamma_geo_numeric, r.gamma_geo_closed, r.abs_diff].map(num));
            }
        }
        Rows::Criteria(rows) => {
            writeln!(out, "{CRITERIA_HEADER}").expect("string write");
            for r in rows {
                let name = r.criterion.replace(',', ";");
                line(&mut out, &[name, num(r.measured), num(r.target), r.passed.to_string()]);
            }
        }
    }
    out
}

pub fn to_json(record: &ResultRecord) -> Result<String, CliError> {
    serde_json::to_string_pretty(record).map(|s| s + "\n").map_err(|e| CliError::Output(e.to_string()))
}

pub fn render(record: &ResultRecord, format: Format) -> Result<String, CliError> {
    match format {
        Format::Csv => Ok(to_csv(record)),
        Format::Json => to_json(record),
    }
}

pub fn write(path: &Path, body: &str) -> Result<(), CliError> {
    std::fs::write(path, body).map_err(|e| CliError::Output(format!("{}: {e}", path.display())))
}
