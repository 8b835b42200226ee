//! Constructors for the qubit trine family and its asymmetric variants.
//!
//! The base trine points three rank-one elements along coplanar directions
//! 120 degrees apart; the reverse trine uses the orthogonal complements.
//! Asymmetric variants dress outcomes with unitaries: a left factor leaves
//! the POVM element unchanged (it only rotates the post-measurement state),
//! while a right factor tilts the element itself, which forces the
//! coefficient formulas and angle ranges implemented here. Right-side
//! factors are realized as reflections, which makes `U = U^dagger` and keeps
//! a single angle consistent between the element (`U^dagger` acts) and the
//! stated mapping (`U` acts).

use crate::error::{Error, Result};
use crate::linalg::{C64, ComplexMatrix, Ket};
use crate::tol;
use std::f64::consts::PI;

use super::KrausMeasurement;

const TRINE_WEIGHT: f64 = 2.0 / 3.0;

/// The three trine directions: Bloch angles 0 and plus/minus 2 pi / 3 in the
/// x-z plane, i.e. `|0>`, `|v_+>`, `|v_->`.
pub fn trine_directions() -> [Ket; 3] {
    [
        Ket::real_qubit(0.0),
        Ket::real_qubit(2.0 * PI / 3.0),
        Ket::real_qubit(-2.0 * PI / 3.0),
    ]
}

/// `|phi(theta)> = cos(theta/2)|0> + sin(theta/2)|1>`, the tilted first
/// direction of the right-asymmetric variants.
pub fn phi_ket(theta: f64) -> Ket {
    Ket::real_qubit(theta)
}

/// `|psi(mu)> = cos(mu/2)|0> + sin(mu/2)|1>`, the tilted second direction of
/// the reverse-trine variants.
pub fn psi_ket(mu: f64) -> Ket {
    Ket::real_qubit(mu)
}

fn check_unitary(u: &ComplexMatrix, what: &str) -> Result<()> {
    if u.dim() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "{what} must be a 2x2 unitary, got dim {}",
            u.dim()
        )));
    }
    if !u.is_unitary(tol::ALGEBRAIC) {
        let dev = u.adjoint().matmul(u).deviation_from_identity().0;
        return Err(Error::NotUnitary(dev));
    }
    Ok(())
}

/// Reflection exchanging two kets with real, non-antipodal overlap:
/// `R = 2|b><b| - I` with `|b>` the normalized bisector. Antipodal pairs
/// fall back to the reflection through the hyperplane orthogonal to `u`,
/// which maps `u` to `-u` (the same ray). Being a reflection, `R = R^dagger`,
/// so the exchange holds from both sides.
pub fn reflection_swapping(u: &Ket, w: &Ket) -> Result<ComplexMatrix> {
    if u.dim() != w.dim() {
        return Err(Error::DimensionMismatch(format!(
            "ket dims {} vs {}",
            u.dim(),
            w.dim()
        )));
    }
    let overlap = u.inner(w);
    if overlap.im.abs() > 1e-9 {
        return Err(Error::Spec(format!(
            "reflection swap needs a real overlap, got imaginary part {}",
            overlap.im
        )));
    }
    let dim = u.dim();
    let mut bisector: Vec<C64> = (0..dim).map(|i| u.amp(i) + w.amp(i)).collect();
    let norm: f64 = bisector.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    let mut r = ComplexMatrix::zeros(dim);
    if norm < 1e-8 {
        // w = -u up to roundoff: reflect across the plane orthogonal to u.
        for i in 0..dim {
            for j in 0..dim {
                let base = if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
                r.set(i, j, base - 2.0 * u.amp(i) * u.amp(j).conj());
            }
        }
        return Ok(r);
    }
    for b in bisector.iter_mut() {
        *b /= norm;
    }
    for i in 0..dim {
        for j in 0..dim {
            let base = if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
            r.set(i, j, 2.0 * bisector[i] * bisector[j].conj() - base);
        }
    }
    Ok(r)
}

fn scaled_projector(coeff: f64, ket: &Ket) -> ComplexMatrix {
    ket.outer().scale(coeff.sqrt())
}

/// Symmetric three-outcome qubit measurement along the trine directions,
/// each element `sqrt(2/3) |t_a><t_a|`.
pub fn trine() -> Result<KrausMeasurement> {
    let dirs = trine_directions();
    KrausMeasurement::new(
        "trine",
        dirs.iter()
            .map(|d| scaled_projector(TRINE_WEIGHT, d))
            .collect(),
    )
}

/// Outcome-wise complement of the trine: `sqrt(2/3) |t_a^perp><t_a^perp|`.
pub fn reverse_trine() -> Result<KrausMeasurement> {
    let dirs = trine_directions();
    let mut kraus = Vec::with_capacity(3);
    for d in &dirs {
        kraus.push(scaled_projector(TRINE_WEIGHT, &d.qubit_orthogonal()?));
    }
    KrausMeasurement::new("reverse-trine", kraus)
}

/// Trine with a caller-supplied unitary on the left of each outcome. Left
/// factors cancel in `F^dagger F`, so the POVM elements equal the trine's;
/// only the post-measurement states move.
pub fn left_asym_trine(
    u1: &ComplexMatrix,
    u2: &ComplexMatrix,
    u3: &ComplexMatrix,
) -> Result<KrausMeasurement> {
    check_unitary(u1, "U1")?;
    check_unitary(u2, "U2")?;
    check_unitary(u3, "U3")?;
    let dirs = trine_directions();
    let kraus = vec![
        u1.matmul(&scaled_projector(TRINE_WEIGHT, &dirs[0])),
        u2.matmul(&scaled_projector(TRINE_WEIGHT, &dirs[1])),
        u3.matmul(&scaled_projector(TRINE_WEIGHT, &dirs[2])),
    ];
    KrausMeasurement::new("left-asym-trine", kraus)
}

/// Coefficients `(alpha, beta, gamma)` of the right-asymmetric trine:
/// `alpha = (1/2)/(cos^2(theta/2) - 1/4)`,
/// `beta = 1 - (alpha/2)(1 + (2/sqrt(3)) sin theta)`,
/// `gamma = 1 - (alpha/2)(1 - (2/sqrt(3)) sin theta)`.
/// Valid for `theta` in `(-pi/3, pi/3)` excluding 0 (0 is the plain trine).
pub fn right_asym_coefficients(theta: f64) -> Result<(f64, f64, f64)> {
    if !theta.is_finite() || theta <= -PI / 3.0 || theta >= PI / 3.0 || theta == 0.0 {
        return Err(Error::AngleOutOfRange {
            angle: theta,
            lo: -PI / 3.0,
            hi: PI / 3.0,
            exclusions: " excluding 0".into(),
        });
    }
    let alpha = 0.5 / ((theta / 2.0).cos().powi(2) - 0.25);
    let tilt = 2.0 / 3.0f64.sqrt() * theta.sin();
    let beta = 1.0 - alpha / 2.0 * (1.0 + tilt);
    let gamma = 1.0 - alpha / 2.0 * (1.0 - tilt);
    Ok((alpha, beta, gamma))
}

/// The reflection `U(theta)` with `U|0> = |phi(theta)>`; as a reflection it
/// also satisfies `U^dagger |0> = |phi(theta)>`.
pub fn right_tilt_unitary(theta: f64) -> ComplexMatrix {
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    ComplexMatrix::from_real_rows(&[vec![c, s], vec![s, -c]]).expect("2x2 rows are square")
}

/// Trine with the first outcome tilted from the right:
/// `sqrt(alpha) |0><0| U(theta)` plus reweighted second and third outcomes.
pub fn right_asym_trine(theta: f64) -> Result<KrausMeasurement> {
    let (alpha, beta, gamma) = right_asym_coefficients(theta)?;
    let dirs = trine_directions();
    let kraus = vec![
        scaled_projector(alpha, &dirs[0]).matmul(&right_tilt_unitary(theta)),
        scaled_projector(beta, &dirs[1]),
        scaled_projector(gamma, &dirs[2]),
    ];
    KrausMeasurement::new("right-asym-trine", kraus)
}

/// Combines the left and right dressings: first outcome tilted from the
/// right, second and third dressed from the left.
pub fn left_right_asym_trine(
    theta: f64,
    u2: &ComplexMatrix,
    u3: &ComplexMatrix,
) -> Result<KrausMeasurement> {
    let (alpha, beta, gamma) = right_asym_coefficients(theta)?;
    check_unitary(u2, "U2")?;
    check_unitary(u3, "U3")?;
    let dirs = trine_directions();
    let kraus = vec![
        scaled_projector(alpha, &dirs[0]).matmul(&right_tilt_unitary(theta)),
        u2.matmul(&scaled_projector(beta, &dirs[1])),
        u3.matmul(&scaled_projector(gamma, &dirs[2])),
    ];
    KrausMeasurement::new("left-right-asym-trine", kraus)
}

/// Coefficients `(a, b, c)` of the left-right asymmetric reverse trine:
/// `b = 1/(cos^2(mu/2) - sqrt(3) cos(mu/2) sin(mu/2))`,
/// `a = b (cos mu - sin mu / sqrt(3))`,
/// `c = -b (4/sqrt(3)) cos(mu/2) sin(mu/2)`.
/// Valid for `mu` in `(4 pi / 3, 2 pi)`. As printed these close the POVM
/// exactly over the whole interval (verified symbolically), so no square
/// adjustment is applied to `a`.
pub fn lra_reverse_coefficients(mu: f64) -> Result<(f64, f64, f64)> {
    if !mu.is_finite() || mu <= 4.0 * PI / 3.0 || mu >= 2.0 * PI {
        return Err(Error::AngleOutOfRange {
            angle: mu,
            lo: 4.0 * PI / 3.0,
            hi: 2.0 * PI,
            exclusions: String::new(),
        });
    }
    let (ch, sh) = ((mu / 2.0).cos(), (mu / 2.0).sin());
    let b = 1.0 / (ch * ch - 3.0f64.sqrt() * ch * sh);
    let a = b * (mu.cos() - mu.sin() / 3.0f64.sqrt());
    let c = -b * (4.0 / 3.0f64.sqrt()) * ch * sh;
    Ok((a, b, c))
}

/// The reflection `V2(mu)` exchanging `|v_+^perp>` and `|psi(mu)>`; the
/// second outcome of the reverse-trine variants applies it from the right.
pub fn lra_v2(mu: f64) -> Result<ComplexMatrix> {
    let v_plus_perp = trine_directions()[1].qubit_orthogonal()?;
    reflection_swapping(&v_plus_perp, &psi_ket(mu))
}

/// Reverse trine with the first and third outcomes dressed from the left by
/// `V1`, `V3` and the second tilted from the right by `V2(mu)`.
pub fn lra_reverse_trine(
    mu: f64,
    v1: &ComplexMatrix,
    v3: &ComplexMatrix,
) -> Result<KrausMeasurement> {
    let (a, b, c) = lra_reverse_coefficients(mu)?;
    check_unitary(v1, "V1")?;
    check_unitary(v3, "V3")?;
    let dirs = trine_directions();
    let one = Ket::basis(2, 1);
    let v_plus_perp = dirs[1].qubit_orthogonal()?;
    let v_minus_perp = dirs[2].qubit_orthogonal()?;
    let kraus = vec![
        v1.matmul(&scaled_projector(a, &one)),
        scaled_projector(b, &v_plus_perp).matmul(&lra_v2(mu)?),
        v3.matmul(&scaled_projector(c, &v_minus_perp)),
    ];
    KrausMeasurement::new("lra-reverse-trine", kraus)
}

/// Right-asymmetric trine with outcomes cycled to `(2, 3, 1)`.
pub fn relabel_m(theta: f64) -> Result<KrausMeasurement> {
    let base = right_asym_trine(theta)?;
    let k = base.kraus();
    KrausMeasurement::new("relabel-m", vec![k[1].clone(), k[2].clone(), k[0].clone()])
}

/// Left-right asymmetric trine with outcomes cycled to `(3, 1, 2)`.
pub fn relabel_n(
    big_theta: f64,
    u2: &ComplexMatrix,
    u3: &ComplexMatrix,
) -> Result<KrausMeasurement> {
    let base = left_right_asym_trine(big_theta, u2, u3)?;
    let k = base.kraus();
    KrausMeasurement::new("relabel-n", vec![k[2].clone(), k[0].clone(), k[1].clone()])
}

/// Right-asymmetric trine with the first two outcomes swapped: `(3, 2, 1)`.
pub fn relabel_r(theta: f64) -> Result<KrausMeasurement> {
    let base = right_asym_trine(theta)?;
    let k = base.kraus();
    KrausMeasurement::new("relabel-r", vec![k[2].clone(), k[1].clone(), k[0].clone()])
}

/// Left-right asymmetric reverse trine with outcomes reversed to `(3, 2, 1)`.
/// `v2` is caller-supplied to keep the outcome's right factor explicit, but
/// it must exchange `|v_+^perp>` with `|psi(mu)>` (the ray constraint that
/// makes the POVM close); [`lra_v2`] builds the canonical choice.
pub fn relabel_s(
    mu: f64,
    v1: &ComplexMatrix,
    v2: &ComplexMatrix,
    v3: &ComplexMatrix,
) -> Result<KrausMeasurement> {
    let (a, b, c) = lra_reverse_coefficients(mu)?;
    check_unitary(v1, "V1")?;
    check_unitary(v2, "V2")?;
    check_unitary(v3, "V3")?;
    let dirs = trine_directions();
    let v_plus_perp = dirs[1].qubit_orthogonal()?;
    let (mapped, _) = v_plus_perp.apply(v2);
    let mapped = Ket::from_unnormalized(mapped)?;
    if mapped.overlap_sqr(&psi_ket(mu)) < 1.0 - 1e-9 {
        return Err(Error::Spec(format!(
            "V2 must map the second reverse-trine direction onto the tilted \
             direction at mu = {mu}"
        )));
    }
    let one = Ket::basis(2, 1);
    let v_minus_perp = dirs[2].qubit_orthogonal()?;
    let kraus = vec![
        v3.matmul(&scaled_projector(c, &v_minus_perp)),
        scaled_projector(b, &v_plus_perp).matmul(v2),
        v1.matmul(&scaled_projector(a, &one)),
    ];
    KrausMeasurement::new("relabel-s", kraus)
}

/// Two-outcome projective qubit measurement along the Bloch direction
/// `(theta, phi)`.
pub fn projective_qubit(theta: f64, phi: f64) -> Result<KrausMeasurement> {
    let ket = Ket::qubit(theta, phi);
    let p = ket.outer();
    let q = ComplexMatrix::identity(2).sub(&p);
    KrausMeasurement::new("projective-qubit", vec![p, q])
}

/// Two-outcome projective measurement onto a pure state and its complement.
pub fn projective_pair_from_ket(name: &str, ket: &Ket) -> Result<KrausMeasurement> {
    let p = ket.outer();
    let q = ComplexMatrix::identity(ket.dim()).sub(&p);
    KrausMeasurement::new(name, vec![p, q])
}

/// The qutrit pair whose first measurement is the computational basis and
/// whose second mixes `|1>` and `|2>`; probing with `|0>` distinguishes them
/// perfectly in the plain single-system scenario.
pub fn projective_qutrit_pair() -> Result<(KrausMeasurement, KrausMeasurement)> {
    let basis: Vec<ComplexMatrix> = (0..3).map(|k| Ket::basis(3, k).outer()).collect();
    let first = KrausMeasurement::new("qutrit-basis", basis.clone())?;
    let mix = |sign: f64| -> ComplexMatrix {
        // (1/2)(|1> + sign|2>)(<1| + sign<2|) built from unnormalized kets.
        let mut m = ComplexMatrix::zeros(3);
        m.set(1, 1, C64::new(0.5, 0.0));
        m.set(1, 2, C64::new(0.5 * sign, 0.0));
        m.set(2, 1, C64::new(0.5 * sign, 0.0));
        m.set(2, 2, C64::new(0.5, 0.0));
        m
    };
    let second = KrausMeasurement::new(
        "qutrit-mixed",
        vec![mix(1.0), basis[0].clone(), mix(-1.0)],
    )?;
    Ok((first, second))
}
