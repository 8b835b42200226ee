//! Kraus-operator measurements, post-measurement states, and sets with priors.
//!
//! A measurement is an ordered list of Kraus operators `F_a` with
//! `sum_a F_a^dagger F_a = I`; the POVM element of outcome `a` is
//! `M_a = F_a^dagger F_a` and the post-measurement state is
//! `F_a rho F_a^dagger / Tr(rho M_a)`. Outcome order is significant: the
//! discrimination scenarios compare measurements label by label.

pub mod io;
pub mod zoo;

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix};
use crate::tol;

/// Named, ordered list of Kraus operators on a common dimension.
#[derive(Clone, Debug)]
pub struct KrausMeasurement {
    name: String,
    kraus: Vec<ComplexMatrix>,
    dim: usize,
}

/// Outcome of [`KrausMeasurement::validate`]: the worst completeness
/// deviation, where it occurs, and whether any entry is non-finite.
#[derive(Clone, Debug)]
pub struct ValidationReport {
    pub ok: bool,
    pub max_deviation: f64,
    pub worst_entry: (usize, usize),
    pub non_finite_entries: usize,
}

impl KrausMeasurement {
    /// Builds a measurement and checks completeness within 1e-10.
    pub fn new(name: impl Into<String>, kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let m = Self::new_unchecked(name, kraus)?;
        let report = m.validate();
        if !report.ok {
            return Err(Error::Incomplete(format!(
                "{}: sum F^dagger F deviates from identity by {:.3e} at entry {:?}{}",
                m.name,
                report.max_deviation,
                report.worst_entry,
                if report.non_finite_entries > 0 {
                    " (non-finite entries present)"
                } else {
                    ""
                }
            )));
        }
        Ok(m)
    }

    /// Builds without the completeness check, so that [`validate`] can
    /// report on deliberately broken inputs. Dimensions must still agree.
    ///
    /// [`validate`]: KrausMeasurement::validate
    pub fn new_unchecked(name: impl Into<String>, kraus: Vec<ComplexMatrix>) -> Result<Self> {
        if kraus.is_empty() {
            return Err(Error::TooFewMembers { needed: 1, got: 0 });
        }
        let dim = kraus[0].dim();
        for op in &kraus {
            if op.dim() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "Kraus operator dim {} differs from {}",
                    op.dim(),
                    dim
                )));
            }
        }
        Ok(Self {
            name: name.into(),
            kraus,
            dim,
        })
    }

    /// Reports the completeness deviation `max |(sum F^dagger F - I)_(ij)|`
    /// and counts non-finite entries. Never panics.
    pub fn validate(&self) -> ValidationReport {
        let mut non_finite = 0usize;
        let mut total = ComplexMatrix::zeros(self.dim);
        for op in &self.kraus {
            if op.has_non_finite() {
                non_finite += 1;
            }
            total = total.add(&op.adjoint().matmul(op));
        }
        let (max_deviation, worst_entry) = total.deviation_from_identity();
        ValidationReport {
            ok: non_finite == 0 && max_deviation <= tol::RECONSTRUCTION,
            max_deviation,
            worst_entry,
            non_finite_entries: non_finite,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_outcomes(&self) -> usize {
        self.kraus.len()
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    /// POVM elements `M_a = F_a^dagger F_a`.
    pub fn povm_elements(&self) -> Vec<ComplexMatrix> {
        self.kraus
            .iter()
            .map(|f| f.adjoint().matmul(f).hermitize())
            .collect()
    }

    /// Outcome probabilities `Tr(rho M_a)`.
    pub fn probabilities(&self, rho: &ComplexMatrix) -> Result<Vec<f64>> {
        if rho.dim() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "state dim {} vs measurement dim {}",
                rho.dim(),
                self.dim
            )));
        }
        Ok(self
            .povm_elements()
            .iter()
            .map(|m| m.trace_product_re(rho))
            .collect())
    }
}

/// Probability of outcome `a` and the normalized post-measurement state
/// `F rho F^dagger / p`. Outcomes with `p <= 1e-12` never occur and return
/// no state.
pub fn post_state(f_a: &ComplexMatrix, rho: &ComplexMatrix) -> Result<(f64, Option<ComplexMatrix>)> {
    if f_a.dim() != rho.dim() {
        return Err(Error::DimensionMismatch(format!(
            "Kraus dim {} vs state dim {}",
            f_a.dim(),
            rho.dim()
        )));
    }
    // Normalize by the trace of the matrix actually built: computing the
    // probability through Tr(F'F rho) instead drifts from Tr(F rho F') by
    // enough roundoff at tiny weights to fail the density validation.
    let unnorm = f_a.matmul(rho).matmul(&f_a.adjoint()).hermitize();
    let p = unnorm.trace().re;
    if p <= tol::PROB_FLOOR {
        return Ok((p.max(0.0), None));
    }
    let post = unnorm.scale(1.0 / p);
    Ok((p, Some(post)))
}

/// Applies `F_a (x) I` to a bipartite state: returns the outcome probability,
/// the normalized joint post state, and its reduction to the untouched side.
pub fn bipartite_post(
    f_a: &ComplexMatrix,
    rho_ab: &ComplexMatrix,
    dim_a: usize,
    dim_b: usize,
) -> Result<(f64, Option<ComplexMatrix>, Option<ComplexMatrix>)> {
    if f_a.dim() != dim_a {
        return Err(Error::DimensionMismatch(format!(
            "Kraus dim {} vs side dimension {}",
            f_a.dim(),
            dim_a
        )));
    }
    if rho_ab.dim() != dim_a * dim_b {
        return Err(Error::DimensionMismatch(format!(
            "joint state dim {} vs {}x{}",
            rho_ab.dim(),
            dim_a,
            dim_b
        )));
    }
    let big = f_a.tensor(&ComplexMatrix::identity(dim_b));
    let unnorm = big.matmul(rho_ab).matmul(&big.adjoint()).hermitize();
    let p = unnorm.trace().re;
    if p <= tol::PROB_FLOOR {
        return Ok((p.max(0.0), None, None));
    }
    let joint = unnorm.scale(1.0 / p);
    let reduced = linalg::partial_trace_a(&joint, dim_a, dim_b)?;
    Ok((p, Some(joint), Some(reduced)))
}

/// Measurements sharing a dimension, drawn with positive priors summing to 1.
/// Outcome counts may differ; value computations treat absent outcomes as
/// zero POVM elements.
#[derive(Clone, Debug)]
pub struct MeasurementSet {
    measurements: Vec<KrausMeasurement>,
    priors: Vec<f64>,
}

impl MeasurementSet {
    pub fn new(measurements: Vec<KrausMeasurement>, priors: Vec<f64>) -> Result<Self> {
        if measurements.is_empty() {
            return Err(Error::TooFewMembers { needed: 1, got: 0 });
        }
        if measurements.len() != priors.len() {
            return Err(Error::InvalidPriors(format!(
                "{} measurements but {} priors",
                measurements.len(),
                priors.len()
            )));
        }
        let dim = measurements[0].dim();
        for m in &measurements {
            if m.dim() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "measurement {} has dim {}, expected {}",
                    m.name(),
                    m.dim(),
                    dim
                )));
            }
        }
        for &p in &priors {
            if !p.is_finite() || p <= 0.0 {
                return Err(Error::InvalidPriors(format!(
                    "priors must be positive, got {p}"
                )));
            }
        }
        let total: f64 = priors.iter().sum();
        if (total - 1.0).abs() > tol::ALGEBRAIC {
            return Err(Error::InvalidPriors(format!(
                "priors sum to {total}, expected 1"
            )));
        }
        Ok(Self {
            measurements,
            priors,
        })
    }

    pub fn uniform(measurements: Vec<KrausMeasurement>) -> Result<Self> {
        let n = measurements.len();
        if n == 0 {
            return Err(Error::TooFewMembers { needed: 1, got: 0 });
        }
        Self::new(measurements, vec![1.0 / n as f64; n])
    }

    pub fn dim(&self) -> usize {
        self.measurements[0].dim()
    }

    pub fn len(&self) -> usize {
        self.measurements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.measurements.is_empty()
    }

    /// Largest outcome count across the set; shorter measurements are padded
    /// with zero elements up to this count during evaluation.
    pub fn max_outcomes(&self) -> usize {
        self.measurements
            .iter()
            .map(KrausMeasurement::n_outcomes)
            .max()
            .unwrap_or(0)
    }

    pub fn measurements(&self) -> &[KrausMeasurement] {
        &self.measurements
    }

    pub fn priors(&self) -> &[f64] {
        &self.priors
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Ket;
    use crate::sampling;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn scaled_trine_fails_validation_with_known_deviation() {
        let trine = zoo::trine().unwrap();
        let mut kraus = trine.kraus().to_vec();
        kraus[0] = kraus[0].scale(1.1);
        let broken = KrausMeasurement::new_unchecked("broken", kraus).unwrap();
        let report = broken.validate();
        assert!(!report.ok);
        // 1.1^2 * 2/3 - 2/3 lands on the top-left entry.
        assert!((report.max_deviation - 0.14).abs() < 1e-12);
        assert_eq!(report.worst_entry, (0, 0));
        assert!(KrausMeasurement::new("broken", broken.kraus().to_vec()).is_err());
    }

    #[test]
    fn projective_post_state_collapses() {
        let f = Ket::basis(2, 0).outer();
        let rho = Ket::real_qubit(FRAC_PI_2).outer();
        let (p, post) = post_state(&f, &rho).unwrap();
        assert!((p - 0.5).abs() < 1e-12);
        let post = post.unwrap();
        assert!(post.frobenius_distance(&Ket::basis(2, 0).outer()) < 1e-12);
    }

    #[test]
    fn impossible_outcome_returns_no_state() {
        let f = Ket::basis(2, 0).outer().scale((2.0f64 / 3.0).sqrt());
        let rho = Ket::basis(2, 1).outer();
        let (p, post) = post_state(&f, &rho).unwrap();
        assert!(p.abs() < 1e-12);
        assert!(post.is_none());
    }

    #[test]
    fn asymmetric_first_outcome_probability() {
        // First outcome of the right-asymmetric trine at theta = pi/6 seen
        // from |0>: alpha cos^2(pi/12).
        let theta = std::f64::consts::PI / 6.0;
        let m = zoo::right_asym_trine(theta).unwrap();
        let rho = Ket::basis(2, 0).outer();
        let (p, post) = post_state(&m.kraus()[0], &rho).unwrap();
        let (alpha, _, _) = zoo::right_asym_coefficients(theta).unwrap();
        assert!((p - alpha * (theta / 2.0).cos().powi(2)).abs() < 1e-12);
        assert!(post.unwrap().frobenius_distance(&rho) < 1e-12);
    }

    #[test]
    fn bell_projection_steers_bob() {
        let phi_plus = linalg::maximally_entangled(2).outer();
        let f = Ket::basis(2, 0).outer();
        let (p, _, reduced) = bipartite_post(&f, &phi_plus, 2, 2).unwrap();
        assert!((p - 0.5).abs() < 1e-12);
        let reduced = reduced.unwrap();
        assert!(reduced.frobenius_distance(&Ket::basis(2, 0).outer()) < 1e-12);

        // Real-amplitude projector: Bob is steered onto the same ket.
        let v_plus = zoo::trine_directions()[1].clone();
        let fv = v_plus.outer().scale((2.0f64 / 3.0).sqrt());
        let (_, _, reduced) = bipartite_post(&fv, &phi_plus, 2, 2).unwrap();
        assert!(reduced.unwrap().frobenius_distance(&v_plus.outer()) < 1e-10);
    }

    #[test]
    fn product_probe_does_not_steer() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let rho_a = sampling::random_density(2, 2, &mut rng).unwrap();
        let rho_b = sampling::random_density(2, 2, &mut rng).unwrap();
        let joint = rho_a.tensor(&rho_b);
        let m = zoo::trine().unwrap();
        for f in m.kraus() {
            let (p, _, reduced) = bipartite_post(f, &joint, 2, 2).unwrap();
            if p > tol::PROB_FLOOR {
                assert!(reduced.unwrap().frobenius_distance(&rho_b) < 1e-10);
            }
        }
    }

    #[test]
    fn probabilities_match_povm_and_sum_to_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for _ in 0..20 {
            let kraus = sampling::random_kraus_ops(3, 4, &mut rng);
            let m = KrausMeasurement::new("random", kraus).unwrap();
            let rho = sampling::random_density(3, 2, &mut rng).unwrap();
            let probs = m.probabilities(&rho).unwrap();
            let mut total = 0.0;
            for (f, &p_direct) in m.kraus().iter().zip(&probs) {
                let (p, _) = post_state(f, &rho).unwrap();
                assert!((p - p_direct).abs() < 1e-12);
                total += p;
            }
            assert!((total - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn set_priors_must_be_a_distribution() {
        let a = zoo::trine().unwrap();
        let b = zoo::reverse_trine().unwrap();
        assert!(MeasurementSet::new(vec![a.clone(), b.clone()], vec![0.5, 0.6]).is_err());
        assert!(MeasurementSet::new(vec![a.clone(), b.clone()], vec![1.0, 0.0]).is_err());
        let set = MeasurementSet::uniform(vec![a, b]).unwrap();
        assert_eq!(set.max_outcomes(), 3);
        assert_eq!(set.dim(), 2);
    }
}
