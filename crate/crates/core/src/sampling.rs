//! Seeded random kets, unitaries, densities, and measurements.
//!
//! All samplers take an explicit RNG so callers control reproducibility;
//! [`seeded_rng`] builds the stream cipher generator used throughout. Unitary
//! and isometry samples are rotation invariant (complex Gaussian entries
//! followed by Gram-Schmidt), so the induced measures are the uniform ones.

use crate::error::{Error, Result};
use crate::linalg::{C64, ComplexMatrix, Ket};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Deterministic generator for a seed; the same seed always yields the
/// same object stream.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard normal sample via Box-Muller.
fn gauss<R: Rng>(rng: &mut R) -> f64 {
    let u1: f64 = rng.random_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.random_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

fn gauss_c64<R: Rng>(rng: &mut R) -> C64 {
    C64::new(gauss(rng), gauss(rng))
}

/// Haar-random unit ket.
pub fn random_ket<R: Rng>(dim: usize, rng: &mut R) -> Ket {
    loop {
        let amps: Vec<C64> = (0..dim).map(|_| gauss_c64(rng)).collect();
        if let Ok(ket) = Ket::from_unnormalized(amps) {
            return ket;
        }
    }
}

fn orthonormal_columns<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> Vec<Vec<C64>> {
    let mut chosen: Vec<Vec<C64>> = Vec::with_capacity(cols);
    while chosen.len() < cols {
        let mut v: Vec<C64> = (0..rows).map(|_| gauss_c64(rng)).collect();
        for b in &chosen {
            let proj: C64 = b.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi -= proj * bi;
            }
        }
        let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-8 {
            continue;
        }
        for vi in v.iter_mut() {
            *vi /= norm;
        }
        chosen.push(v);
    }
    chosen
}

/// Haar-random unitary.
pub fn random_unitary<R: Rng>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let cols = orthonormal_columns(dim, dim, rng);
    let mut u = ComplexMatrix::zeros(dim);
    for (j, col) in cols.iter().enumerate() {
        for i in 0..dim {
            u.set(i, j, col[i]);
        }
    }
    u
}

/// Random density matrix of the given rank (Wishart construction).
pub fn random_density<R: Rng>(dim: usize, rank: usize, rng: &mut R) -> Result<ComplexMatrix> {
    if rank == 0 || rank > dim {
        return Err(Error::DimensionMismatch(format!(
            "density rank must be in 1..={dim}, got {rank}"
        )));
    }
    // G G^dagger with G of shape dim x rank, normalized to unit trace.
    let g: Vec<Vec<C64>> = (0..dim)
        .map(|_| (0..rank).map(|_| gauss_c64(rng)).collect())
        .collect();
    let mut rho = ComplexMatrix::zeros(dim);
    for i in 0..dim {
        for j in 0..dim {
            let acc: C64 = (0..rank).map(|k| g[i][k] * g[j][k].conj()).sum();
            rho.set(i, j, acc);
        }
    }
    let tr = rho.trace().re;
    Ok(rho.scale(1.0 / tr).hermitize())
}

/// Random pure density matrix.
pub fn random_pure_density<R: Rng>(dim: usize, rng: &mut R) -> ComplexMatrix {
    random_ket(dim, rng).outer()
}

/// Random Kraus operators `K_1..K_n` on dimension `dim` with
/// `sum K_k^dagger K_k = I` exactly to roundoff (block rows of a Haar
/// isometry from `C^dim` to `C^(n dim)`).
pub fn random_kraus_ops<R: Rng>(dim: usize, n_outcomes: usize, rng: &mut R) -> Vec<ComplexMatrix> {
    let cols = orthonormal_columns(n_outcomes * dim, dim, rng);
    (0..n_outcomes)
        .map(|k| {
            let mut op = ComplexMatrix::zeros(dim);
            for r in 0..dim {
                for c in 0..dim {
                    op.set(r, c, cols[c][k * dim + r]);
                }
            }
            op
        })
        .collect()
}

/// Random rank-one POVM with `n_outcomes >= dim` outcomes (rows of a Haar
/// isometry, one row per outcome).
pub fn random_rank_one_povm<R: Rng>(
    dim: usize,
    n_outcomes: usize,
    rng: &mut R,
) -> Result<Vec<ComplexMatrix>> {
    if n_outcomes < dim {
        return Err(Error::DimensionMismatch(format!(
            "rank-one POVM needs at least {dim} outcomes, got {n_outcomes}"
        )));
    }
    let cols = orthonormal_columns(n_outcomes, dim, rng);
    Ok((0..n_outcomes)
        .map(|k| {
            let mut m = ComplexMatrix::zeros(dim);
            for a in 0..dim {
                for b in 0..dim {
                    m.set(a, b, cols[a][k].conj() * cols[b][k]);
                }
            }
            m
        })
        .collect())
}

/// Random two-outcome projective qubit measurement `{|psi><psi|, I - |psi><psi|}`.
pub fn random_projective_qubit<R: Rng>(rng: &mut R) -> Vec<ComplexMatrix> {
    let psi = random_ket(2, rng);
    let p = psi.outer();
    let q = ComplexMatrix::identity(2).sub(&p);
    vec![p, q]
}

/// Positive weights bounded away from zero, for stress-testing ensembles.
pub fn random_weights<R: Rng>(n: usize, rng: &mut R) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(0.05..1.0)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tol;

    #[test]
    fn kets_are_normalized_and_deterministic() {
        let mut rng = seeded_rng(11);
        let a = random_ket(4, &mut rng);
        let norm: f64 = a.amps().iter().map(|x| x.norm_sqr()).sum();
        assert!((norm - 1.0).abs() < tol::ALGEBRAIC);

        let mut rng2 = seeded_rng(11);
        let b = random_ket(4, &mut rng2);
        for i in 0..4 {
            assert_eq!(a.amp(i).re.to_bits(), b.amp(i).re.to_bits());
            assert_eq!(a.amp(i).im.to_bits(), b.amp(i).im.to_bits());
        }
    }

    #[test]
    fn unitaries_are_unitary() {
        let mut rng = seeded_rng(3);
        for dim in [2usize, 3, 5] {
            let u = random_unitary(dim, &mut rng);
            assert!(u.is_unitary(1e-10), "dim {dim}");
        }
    }

    #[test]
    fn densities_validate() {
        let mut rng = seeded_rng(5);
        for (dim, rank) in [(2usize, 1usize), (2, 2), (3, 2), (4, 4)] {
            let rho = random_density(dim, rank, &mut rng).unwrap();
            rho.validate_density().unwrap();
        }
        assert!(random_density(2, 3, &mut rng).is_err());
        assert!(random_density(2, 0, &mut rng).is_err());
    }

    #[test]
    fn kraus_ops_are_complete() {
        let mut rng = seeded_rng(7);
        for (dim, n) in [(2usize, 2usize), (2, 3), (3, 4)] {
            let ops = random_kraus_ops(dim, n, &mut rng);
            let mut total = ComplexMatrix::zeros(dim);
            for op in &ops {
                total = total.add(&op.adjoint().matmul(op));
            }
            let (dev, _) = total.deviation_from_identity();
            assert!(dev < 1e-10, "dim {dim} n {n}: deviation {dev}");
        }
    }

    #[test]
    fn rank_one_povms_are_complete_rank_one() {
        let mut rng = seeded_rng(9);
        let povm = random_rank_one_povm(2, 4, &mut rng).unwrap();
        let mut total = ComplexMatrix::zeros(2);
        for m in &povm {
            total = total.add(m);
            let eigs = crate::linalg::herm_eigs(m).unwrap().0;
            let positive = eigs.iter().filter(|&&e| e > 1e-10).count();
            assert!(positive <= 1, "element has rank {positive}");
        }
        let (dev, _) = total.deviation_from_identity();
        assert!(dev < 1e-10);
        assert!(random_rank_one_povm(3, 2, &mut rng).is_err());
    }

    #[test]
    fn projective_qubits_are_projective() {
        let mut rng = seeded_rng(13);
        let povm = random_projective_qubit(&mut rng);
        let (dev, _) = povm[0].add(&povm[1]).deviation_from_identity();
        assert!(dev < tol::ALGEBRAIC);
        let sq = povm[0].matmul(&povm[0]);
        assert!(sq.frobenius_distance(&povm[0]) < tol::ALGEBRAIC);
    }
}
