//! Angle sweeps that tabulate scenario values along a measurement family,
//! emitting one CSV row per grid point.

use std::f64::consts::PI;

use povm_discrim_core::linalg::Ket;
use povm_discrim_core::measurements::{zoo, MeasurementSet};
use povm_discrim_core::optimize::SearchBudget;
use povm_discrim_core::scenarios::{
    closed_dbarms_two_qubit_projective, closed_dme_tilted_trine_maxent, optimize_scenario,
    Scenario,
};
use povm_discrim_core::{Error, Result};

/// One finished sweep: a CSV header, one numeric row per grid point, and any
/// solver warnings collected along the way.
#[derive(Debug, Clone)]
pub struct Sweep {
    pub header: &'static str,
    pub rows: Vec<Vec<f64>>,
    pub warnings: Vec<String>,
}

/// The sweepable measurement families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// Tilted trine against the reverse trine; compares the maximally
    /// entangled probe value with the freely optimized one.
    TiltedTrine,
    /// Two projective qubit measurements an angle apart; compares the
    /// entangled-probe optimum with the posted single-probe closed form.
    ProjectivePair,
}

impl Family {
    pub fn parse(name: &str) -> Result<Family> {
        match name {
            "tilted-trine" => Ok(Family::TiltedTrine),
            "projective-pair" => Ok(Family::ProjectivePair),
            other => Err(Error::Spec(format!(
                "unknown sweep family '{other}'; known families: tilted-trine, projective-pair"
            ))),
        }
    }
}

/// Monotone inclusive grid from `start` to `end` in steps of `step`.
fn grid(start: f64, end: f64, step: f64) -> Result<Vec<f64>> {
    if !start.is_finite() || !end.is_finite() || !step.is_finite() {
        return Err(Error::Spec("sweep bounds must be finite".into()));
    }
    if step <= 0.0 {
        return Err(Error::Spec(format!("sweep step must be positive, got {step}")));
    }
    if end < start {
        return Err(Error::Spec(format!(
            "sweep end {end} lies before start {start}"
        )));
    }
    // The slack keeps an endpoint that lands a rounding error past `end`.
    let count = ((end - start) / step + 1e-9).floor() as usize + 1;
    if count > 100_000 {
        return Err(Error::Spec(format!(
            "sweep would emit {count} rows; tighten the range or the step"
        )));
    }
    Ok((0..count).map(|k| start + step * k as f64).collect())
}

/// Runs the requested family over the grid.
pub fn run(
    family: Family,
    start: f64,
    end: f64,
    step: f64,
    budget: &SearchBudget,
) -> Result<Sweep> {
    let thetas = grid(start, end, step)?;
    match family {
        Family::TiltedTrine => tilted_trine(&thetas, budget),
        Family::ProjectivePair => projective_pair(&thetas, budget),
    }
}

fn tilted_trine(thetas: &[f64], budget: &SearchBudget) -> Result<Sweep> {
    let mut rows = Vec::with_capacity(thetas.len());
    let mut warnings = Vec::new();
    for &theta in thetas {
        // Out-of-domain angles surface as constructor errors here.
        let set = MeasurementSet::uniform(vec![
            zoo::right_asym_trine(theta)?,
            zoo::reverse_trine()?,
        ])?;
        let maxent = closed_dme_tilted_trine_maxent(theta)?;
        let result = optimize_scenario(&set, Scenario::DME, budget)?;
        for w in result.warnings {
            warnings.push(format!("theta {theta:.6}: {w}"));
        }
        rows.push(vec![theta, maxent, result.value, result.value - maxent]);
    }
    Ok(Sweep {
        header: "theta,dme_maxent,dme_general,gap",
        rows,
        warnings,
    })
}

fn projective_pair(thetas: &[f64], budget: &SearchBudget) -> Result<Sweep> {
    if let Some(&bad) = thetas.iter().find(|&&t| !(0.0..=PI).contains(&t)) {
        return Err(Error::Spec(format!(
            "projective-pair sweep needs angles in [0, pi], got {bad}"
        )));
    }
    let psi1 = Ket::basis(2, 0);
    let mut rows = Vec::with_capacity(thetas.len());
    let mut warnings = Vec::new();
    for &theta in thetas {
        let psi2 = Ket::real_qubit(theta);
        let (dbarms, _) = closed_dbarms_two_qubit_projective(&psi1, &psi2)?;
        let set = MeasurementSet::uniform(vec![
            zoo::projective_pair_from_ket("pair-a", &psi1)?,
            zoo::projective_pair_from_ket("pair-b", &psi2)?,
        ])?;
        let result = optimize_scenario(&set, Scenario::DME, budget)?;
        for w in result.warnings {
            warnings.push(format!("theta {theta:.6}: {w}"));
        }
        rows.push(vec![theta, result.value, dbarms, dbarms - result.value]);
    }
    Ok(Sweep {
        header: "theta,dme,dbarms,gap",
        rows,
        warnings,
    })
}

/// Renders rows at six decimals with dot decimal separators and LF endings.
pub fn to_csv(sweep: &Sweep) -> String {
    let mut out = String::from(sweep.header);
    out.push('\n');
    for row in &sweep.rows {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:.6}")).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_is_inclusive_and_keeps_rounded_endpoints() {
        assert_eq!(grid(0.0, 1.0, 0.25).unwrap().len(), 5);
        // -0.3 + 0.1 floats a hair above -0.2; the endpoint must survive.
        let negative = grid(-0.3, -0.2, 0.1).unwrap();
        assert_eq!(negative.len(), 2);
        assert!((negative[1] + 0.2).abs() < 1e-12);
        assert_eq!(grid(0.5, 0.5, 0.1).unwrap(), vec![0.5]);
    }

    #[test]
    fn grid_rejects_degenerate_requests() {
        assert!(grid(0.0, 1.0, 0.0).is_err());
        assert!(grid(0.0, 1.0, -0.1).is_err());
        assert!(grid(1.0, 0.5, 0.1).is_err());
        assert!(grid(f64::NAN, 1.0, 0.1).is_err());
        assert!(grid(0.0, 20.0, 1e-5).is_err(), "row cap enforced");
    }

    #[test]
    fn family_parse_lists_known_names_on_error() {
        assert_eq!(Family::parse("tilted-trine").unwrap(), Family::TiltedTrine);
        assert_eq!(
            Family::parse("projective-pair").unwrap(),
            Family::ProjectivePair
        );
        let err = Family::parse("nosuch").unwrap_err().to_string();
        assert!(err.contains("tilted-trine") && err.contains("projective-pair"));
    }

    #[test]
    fn csv_rendering_is_six_decimal_lf() {
        let sweep = Sweep {
            header: "a,b",
            rows: vec![vec![0.5, 1.0 / 3.0]],
            warnings: vec![],
        };
        assert_eq!(to_csv(&sweep), "a,b\n0.500000,0.333333\n");
    }
}
