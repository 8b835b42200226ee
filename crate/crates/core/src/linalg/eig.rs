//! Hermitian eigendecomposition: closed form at dimension 2, cyclic complex
//! Jacobi sweeps above that. Deterministic: no pivot choices depend on
//! floating-point ties beyond the fixed sweep order.

use super::{C64, ComplexMatrix, Ket};
use crate::error::{Error, Result};
use crate::tol;

const MAX_SWEEPS: usize = 100;

/// Eigenvalues (ascending) and matching eigenvectors of a Hermitian matrix.
///
/// The input must be Hermitian within [`tol::ALGEBRAIC`]; eigenvector order
/// inside a degenerate cluster is fixed by the deterministic sweep order and
/// carries no meaning.
pub fn herm_eigs(h: &ComplexMatrix) -> Result<(Vec<f64>, Vec<Ket>)> {
    let dev = h.hermiticity_deviation();
    if dev > tol::ALGEBRAIC {
        return Err(Error::NotHermitian(dev));
    }
    let (values, u) = herm_eigs_of_hermitized(h);
    let vectors = (0..h.dim())
        .map(|j| {
            let col: Vec<C64> = (0..h.dim()).map(|i| u.get(i, j)).collect();
            Ket::from_unnormalized(col).expect("eigenvector column has unit norm")
        })
        .map(|k| k.canonicalize())
        .collect();
    Ok((values, vectors))
}

/// Internal variant: hermitizes the input and returns the unitary of
/// eigenvector columns without per-column canonicalization.
pub(crate) fn herm_eigs_of_hermitized(h: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let a = h.hermitize();
    match a.dim() {
        0 => (Vec::new(), a),
        1 => (vec![a.get(0, 0).re], ComplexMatrix::identity(1)),
        2 => eig_2x2(&a),
        _ => jacobi(&a),
    }
}

fn eig_2x2(h: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let a = h.get(0, 0).re;
    let d = h.get(1, 1).re;
    let b = h.get(0, 1);
    let mid = 0.5 * (a + d);
    let rad = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
    let lo = mid - rad;
    let hi = mid + rad;
    let mut u = ComplexMatrix::zeros(2);
    if b.norm() <= f64::EPSILON * (a.abs() + d.abs() + 1.0) {
        // Already diagonal; order the basis by eigenvalue.
        if a <= d {
            u.set(0, 0, C64::new(1.0, 0.0));
            u.set(1, 1, C64::new(1.0, 0.0));
        } else {
            u.set(1, 0, C64::new(1.0, 0.0));
            u.set(0, 1, C64::new(1.0, 0.0));
        }
        return (vec![a.min(d), a.max(d)], u);
    }
    // (H - lambda)v = 0 has v = (b, lambda - a) up to normalization.
    for (j, lambda) in [lo, hi].iter().enumerate() {
        let v0 = b;
        let v1 = C64::new(lambda - a, 0.0);
        let norm = (v0.norm_sqr() + v1.norm_sqr()).sqrt();
        u.set(0, j, v0 / norm);
        u.set(1, j, v1 / norm);
    }
    (vec![lo, hi], u)
}

fn offdiag_frobenius(a: &ComplexMatrix) -> f64 {
    let d = a.dim();
    let mut acc = 0.0;
    for i in 0..d {
        for j in 0..d {
            if i != j {
                acc += a.get(i, j).norm_sqr();
            }
        }
    }
    acc.sqrt()
}

fn jacobi(h: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let d = h.dim();
    let mut a = h.clone();
    let mut q = ComplexMatrix::identity(d);
    let scale = a.max_abs_entry().max(1.0);
    let skip = tol::JACOBI_OFF * scale / ((d * d) as f64);

    for _ in 0..MAX_SWEEPS {
        if offdiag_frobenius(&a) <= tol::JACOBI_OFF * scale {
            break;
        }
        for p in 0..d {
            for r in (p + 1)..d {
                let apr = a.get(p, r);
                let abs = apr.norm();
                if abs <= skip {
                    continue;
                }
                // Phase that makes the (p, r) entry real, then a real Jacobi
                // rotation zeroing it. The combined unitary G differs from
                // the identity only in rows/columns p and r.
                let phase = apr / abs;
                let app = a.get(p, p).re;
                let arr = a.get(r, r).re;
                let tau = (arr - app) / (2.0 * abs);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // G[p][p] = c, G[p][r] = s, G[r][p] = -s conj(phase),
                // G[r][r] = c conj(phase).
                let gpp = C64::new(c, 0.0);
                let gpr = C64::new(s, 0.0);
                let grp = -phase.conj() * s;
                let grr = phase.conj() * c;
                // Columns: A <- A G.
                for i in 0..d {
                    let aip = a.get(i, p);
                    let air = a.get(i, r);
                    a.set(i, p, aip * gpp + air * grp);
                    a.set(i, r, aip * gpr + air * grr);
                }
                // Rows: A <- G† A.
                for j in 0..d {
                    let apj = a.get(p, j);
                    let arj = a.get(r, j);
                    a.set(p, j, gpp.conj() * apj + grp.conj() * arj);
                    a.set(r, j, gpr.conj() * apj + grr.conj() * arj);
                }
                // Accumulate eigenvectors: Q <- Q G.
                for i in 0..d {
                    let qip = q.get(i, p);
                    let qir = q.get(i, r);
                    q.set(i, p, qip * gpp + qir * grp);
                    q.set(i, r, qip * gpr + qir * grr);
                }
                // Stamp out roundoff drift on the zeroed pair.
                let fix = (a.get(p, r) + a.get(r, p).conj()) * 0.5;
                a.set(p, r, fix);
                a.set(r, p, fix.conj());
            }
        }
    }

    let mut order: Vec<usize> = (0..d).collect();
    let diag: Vec<f64> = (0..d).map(|i| a.get(i, i).re).collect();
    order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let mut u = ComplexMatrix::zeros(d);
    for (jnew, &jold) in order.iter().enumerate() {
        for i in 0..d {
            u.set(i, jnew, q.get(i, jold));
        }
    }
    (values, u)
}

fn from_spectrum(
    values: &[f64],
    u: &ComplexMatrix,
    f: impl Fn(f64) -> f64,
) -> ComplexMatrix {
    let d = u.dim();
    let mut out = ComplexMatrix::zeros(d);
    for (k, &lambda) in values.iter().enumerate() {
        let w = f(lambda);
        if w == 0.0 {
            continue;
        }
        for i in 0..d {
            let ui = u.get(i, k);
            if ui.re == 0.0 && ui.im == 0.0 {
                continue;
            }
            for j in 0..d {
                let v = out.get(i, j) + ui * u.get(j, k).conj() * w;
                out.set(i, j, v);
            }
        }
    }
    out
}

/// Positive part `sum_{lambda > 0} lambda |v><v|`.
pub fn positive_part(h: &ComplexMatrix) -> Result<ComplexMatrix> {
    let dev = h.hermiticity_deviation();
    if dev > tol::ALGEBRAIC {
        return Err(Error::NotHermitian(dev));
    }
    let (values, u) = herm_eigs_of_hermitized(h);
    Ok(from_spectrum(&values, &u, |x| x.max(0.0)))
}

/// Sum of the positive eigenvalues of a Hermitian matrix.
pub fn sum_positive_eigenvalues(h: &ComplexMatrix) -> Result<f64> {
    let dev = h.hermiticity_deviation();
    if dev > tol::ALGEBRAIC {
        return Err(Error::NotHermitian(dev));
    }
    let (values, _) = herm_eigs_of_hermitized(h);
    Ok(values.iter().filter(|&&x| x > 0.0).sum())
}

/// Largest eigenvalue of a Hermitian matrix.
pub fn max_eigenvalue(h: &ComplexMatrix) -> Result<f64> {
    let dev = h.hermiticity_deviation();
    if dev > tol::ALGEBRAIC {
        return Err(Error::NotHermitian(dev));
    }
    let (values, _) = herm_eigs_of_hermitized(h);
    Ok(*values.last().expect("nonempty spectrum"))
}

/// Square root of a positive semidefinite matrix; small negative eigenvalues
/// from roundoff are clipped to zero.
pub fn sqrt_psd(h: &ComplexMatrix) -> Result<ComplexMatrix> {
    let dev = h.hermiticity_deviation();
    if dev > tol::ALGEBRAIC {
        return Err(Error::NotHermitian(dev));
    }
    let (values, u) = herm_eigs_of_hermitized(h);
    Ok(from_spectrum(&values, &u, |x| x.max(0.0).sqrt()))
}

/// Pseudo-inverse square root of a positive semidefinite matrix together
/// with its support projector. Eigenvalues at or below
/// `max(1e-13 * lambda_max, 1e-300)` are treated as zero.
pub(crate) fn inv_sqrt_psd_internal(h: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let (values, u) = herm_eigs_of_hermitized(h);
    let lambda_max = values.last().copied().unwrap_or(0.0).max(0.0);
    let thresh = (1e-13 * lambda_max).max(1e-300);
    let t = from_spectrum(&values, &u, |x| {
        if x > thresh {
            1.0 / x.sqrt()
        } else {
            0.0
        }
    });
    let p = from_spectrum(&values, &u, |x| if x > thresh { 1.0 } else { 0.0 });
    (t, p)
}

/// Pseudo-inverse square root of a positive semidefinite matrix together
/// with its support projector.
pub fn inv_sqrt_psd(h: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let dev = h.hermiticity_deviation();
    if dev > tol::ALGEBRAIC {
        return Err(Error::NotHermitian(dev));
    }
    Ok(inv_sqrt_psd_internal(h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::gram_schmidt;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const TOL: f64 = 1e-10;

    fn reconstruct(values: &[f64], vectors: &[Ket]) -> ComplexMatrix {
        let d = vectors[0].dim();
        let mut out = ComplexMatrix::zeros(d);
        for (v, k) in values.iter().zip(vectors) {
            out = out.add(&k.outer().scale(*v));
        }
        out
    }

    fn random_hermitian(dim: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m.set(
                    i,
                    j,
                    C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
                );
            }
        }
        m.hermitize()
    }

    #[test]
    fn two_by_two_closed_form_matches_hand_value() {
        // H = |0><0|/2 - |+><+|/2 has eigenvalues +-sqrt(2)/4.
        let zero = Ket::basis(2, 0);
        let plus = Ket::qubit(std::f64::consts::FRAC_PI_2, 0.0);
        let h = zero.outer().scale(0.5).sub(&plus.outer().scale(0.5));
        let (values, vectors) = herm_eigs(&h).unwrap();
        let expect = std::f64::consts::SQRT_2 / 4.0;
        assert!((values[0] + expect).abs() < 1e-14);
        assert!((values[1] - expect).abs() < 1e-14);
        assert!(reconstruct(&values, &vectors).frobenius_distance(&h) < TOL);
    }

    #[test]
    fn random_hermitian_reconstructs_across_dims() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for dim in [2usize, 3, 4, 6, 8] {
            for _ in 0..20 {
                let h = random_hermitian(dim, &mut rng);
                let (values, vectors) = herm_eigs(&h).unwrap();
                assert!(
                    reconstruct(&values, &vectors).frobenius_distance(&h) < TOL,
                    "reconstruction failed at dim {dim}"
                );
                for w in values.windows(2) {
                    assert!(w[0] <= w[1] + 1e-14);
                }
                for i in 0..dim {
                    for j in (i + 1)..dim {
                        assert!(vectors[i].inner(&vectors[j]).norm() < 1e-9);
                    }
                }
            }
        }
    }

    #[test]
    fn jacobi_agrees_with_closed_form_at_dim_2() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let h = random_hermitian(2, &mut rng);
            let (closed, _) = herm_eigs_of_hermitized(&h);
            let (swept, _) = jacobi(&h);
            assert!((closed[0] - swept[0]).abs() < 1e-12);
            assert!((closed[1] - swept[1]).abs() < 1e-12);
        }
    }

    #[test]
    fn eigenvalues_invariant_under_unitary_conjugation() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let h = random_hermitian(3, &mut rng);
            let cols: Vec<Vec<C64>> = (0..3)
                .map(|_| {
                    (0..3)
                        .map(|_| {
                            C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
                        })
                        .collect()
                })
                .collect();
            let basis = gram_schmidt(&cols).unwrap();
            let mut u = ComplexMatrix::zeros(3);
            for (j, col) in basis.iter().enumerate() {
                for i in 0..3 {
                    u.set(i, j, col[i]);
                }
            }
            let conj = u.adjoint().matmul(&h).matmul(&u);
            let (v1, _) = herm_eigs(&h).unwrap();
            let (v2, _) = herm_eigs(&conj).unwrap();
            for (a, b) in v1.iter().zip(&v2) {
                assert!((a - b).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn non_hermitian_input_is_rejected() {
        let mut m = ComplexMatrix::zeros(2);
        m.set(0, 1, C64::new(1.0, 0.0));
        assert!(matches!(herm_eigs(&m), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn positive_part_splits_the_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..20 {
            let h = random_hermitian(4, &mut rng);
            let pos = positive_part(&h).unwrap();
            let neg = pos.sub(&h);
            let (pv, _) = herm_eigs_of_hermitized(&pos);
            let (nv, _) = herm_eigs_of_hermitized(&neg);
            assert!(pv[0] > -1e-10);
            assert!(nv[0] > -1e-10);
            let sum: f64 = sum_positive_eigenvalues(&h).unwrap();
            assert!((pos.trace().re - sum).abs() < 1e-10);
        }
    }

    #[test]
    fn inv_sqrt_inverts_on_support() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        // Rank-deficient PSD matrix: projector-weighted sum of two kets.
        let k0 = Ket::basis(3, 0);
        let k1 = Ket::basis(3, 1);
        let h = k0.outer().scale(0.7).add(&k1.outer().scale(0.3));
        let (t, p) = inv_sqrt_psd(&h).unwrap();
        let should_be_p = t.matmul(&h).matmul(&t);
        assert!(should_be_p.frobenius_distance(&p) < 1e-10);
        // Full-rank case: T H T = I.
        let g = random_hermitian(3, &mut rng);
        let full = g.matmul(&g.adjoint()).add(&ComplexMatrix::identity(3));
        let (t, p) = inv_sqrt_psd(&full).unwrap();
        assert!(p.frobenius_distance(&ComplexMatrix::identity(3)) < 1e-10);
        let (dev, _) = t.matmul(&full).matmul(&t).deviation_from_identity();
        assert!(dev < 1e-10);
    }

    #[test]
    fn sqrt_squares_back() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for _ in 0..10 {
            let g = random_hermitian(4, &mut rng);
            let psd = g.matmul(&g.adjoint());
            let root = sqrt_psd(&psd).unwrap();
            assert!(root.matmul(&root).frobenius_distance(&psd) < 1e-9);
        }
    }
}
