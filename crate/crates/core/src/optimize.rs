//! Deterministic multi-start searches over probe kets and POVMs.
//!
//! Every search follows the same recipe: a coarse deterministic grid over
//! generalized spherical angles (plus a bank of structured starts and a
//! seeded batch of random starts), Nelder-Mead refinement from the best grid
//! cells, and a max-reduction with ties broken by lowest candidate index.
//! Given the same budget and seed the result is bitwise identical regardless
//! of thread count. Objectives built on max/min selections have kinks, which
//! is why refinement uses a simplex method rather than gradients.

use crate::error::{Error, Result};
use crate::linalg::{self, C64, ComplexMatrix, Ket};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::f64::consts::{FRAC_PI_2, PI};

/// Effort knobs for the multi-start searches.
///
/// `grid_resolution` fixes the total coarse-grid size at roughly
/// `grid_resolution^2` points spread evenly over the angle coordinates;
/// `starts` bounds the number of random starts; `max_steps` bounds
/// Nelder-Mead iterations per refinement; `tolerance` is the f-spread at
/// which a simplex is considered converged.
#[derive(Clone, Debug, PartialEq)]
pub struct SearchBudget {
    pub grid_resolution: usize,
    pub starts: usize,
    pub max_steps: usize,
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self {
            grid_resolution: 64,
            starts: 64,
            max_steps: 2000,
            tolerance: 1e-7,
            seed: 7,
        }
    }
}

impl SearchBudget {
    /// Reads `POVM_DISCRIM_BUDGET` (format `grid,starts,steps,tol`) if set,
    /// otherwise returns the default budget.
    pub fn from_env_or_default() -> Result<Self> {
        match std::env::var("POVM_DISCRIM_BUDGET") {
            Ok(raw) => Self::parse(&raw),
            Err(_) => Ok(Self::default()),
        }
    }

    /// Parses the `grid,starts,steps,tol` format used by the env knob.
    pub fn parse(raw: &str) -> Result<Self> {
        let parts: Vec<&str> = raw.split(',').map(str::trim).collect();
        if parts.len() != 4 {
            return Err(Error::InvalidBudget(format!(
                "expected grid,starts,steps,tol; got {raw:?}"
            )));
        }
        let grid: usize = parts[0]
            .parse()
            .map_err(|_| Error::InvalidBudget(format!("bad grid {:?}", parts[0])))?;
        let starts: usize = parts[1]
            .parse()
            .map_err(|_| Error::InvalidBudget(format!("bad starts {:?}", parts[1])))?;
        let steps: usize = parts[2]
            .parse()
            .map_err(|_| Error::InvalidBudget(format!("bad steps {:?}", parts[2])))?;
        let tol: f64 = parts[3]
            .parse()
            .map_err(|_| Error::InvalidBudget(format!("bad tolerance {:?}", parts[3])))?;
        if grid == 0 || steps == 0 || !tol.is_finite() || tol <= 0.0 {
            return Err(Error::InvalidBudget(format!(
                "grid and steps must be positive and tol finite positive; got {raw:?}"
            )));
        }
        Ok(Self {
            grid_resolution: grid,
            starts,
            max_steps: steps,
            tolerance: tol,
            seed: Self::default().seed,
        })
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_starts(mut self, starts: usize) -> Self {
        self.starts = starts;
        self
    }

    pub fn with_grid(mut self, grid: usize) -> Self {
        self.grid_resolution = grid;
        self
    }

    pub fn with_steps(mut self, steps: usize) -> Self {
        self.max_steps = steps;
        self
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tolerance = tol;
        self
    }
}

const TOP_K: usize = 8;

// ---------------------------------------------------------------------------
// Ket parameterization: generalized spherical angles with the global phase
// fixed by a real nonnegative leading amplitude.

/// Maps `2(dim-1)` angles to a unit ket: the first `dim-1` entries are
/// magnitude angles, the rest phases on amplitudes `1..dim`. Total in its
/// arguments: any real input yields a normalized ket.
pub fn ket_from_angles(angles: &[f64], dim: usize) -> Ket {
    debug_assert_eq!(angles.len(), 2 * (dim - 1));
    let (ts, phis) = angles.split_at(dim - 1);
    let mut amps = vec![C64::new(0.0, 0.0); dim];
    let mut prefix = 1.0f64;
    for k in 0..dim {
        let r = if k < dim - 1 {
            let r = prefix * ts[k].cos();
            prefix *= ts[k].sin();
            r
        } else {
            prefix
        };
        amps[k] = if k == 0 {
            C64::new(r, 0.0)
        } else {
            C64::from_polar(r, phis[k - 1])
        };
    }
    // The trig chain keeps the norm at 1 up to roundoff; renormalize exactly.
    Ket::from_unnormalized(amps).expect("spherical parameterization is normalized")
}

/// Inverse of [`ket_from_angles`] up to gauge: the returned angles reproduce
/// the ket's ray.
pub fn angles_from_ket(ket: &Ket) -> Vec<f64> {
    let canon = ket.canonicalize();
    let dim = canon.dim();
    let mut ts = Vec::with_capacity(dim - 1);
    let mut phis = Vec::with_capacity(dim - 1);
    let mut prefix = 1.0f64;
    for k in 0..dim - 1 {
        let r = canon.amp(k).norm();
        let t = if prefix < 1e-12 {
            0.0
        } else {
            (r / prefix).clamp(-1.0, 1.0).acos()
        };
        ts.push(t);
        prefix *= t.sin();
    }
    for k in 1..dim {
        let a = canon.amp(k);
        phis.push(if a.norm() < 1e-15 { 0.0 } else { a.im.atan2(a.re) });
    }
    ts.extend(phis);
    ts
}

fn grid_points_per_angle(n_params: usize, grid_resolution: usize) -> usize {
    let target = (grid_resolution as f64).powi(2);
    let per = target.powf(1.0 / n_params as f64).floor() as usize;
    per.clamp(1, grid_resolution)
}

fn angle_grid(dim: usize, grid_resolution: usize) -> Vec<Vec<f64>> {
    let n_params = 2 * (dim - 1);
    let per = grid_points_per_angle(n_params, grid_resolution);
    let mut t_values = Vec::with_capacity(per);
    let mut phi_values = Vec::with_capacity(per);
    for i in 0..per {
        if per == 1 {
            t_values.push(FRAC_PI_2 / 2.0);
            phi_values.push(0.0);
        } else {
            t_values.push(i as f64 * FRAC_PI_2 / (per - 1) as f64);
            phi_values.push(i as f64 * 2.0 * PI / per as f64);
        }
    }
    let total = per.pow(n_params as u32);
    let mut out = Vec::with_capacity(total);
    let mut index = vec![0usize; n_params];
    loop {
        let mut angles = Vec::with_capacity(n_params);
        for (slot, &i) in index.iter().enumerate() {
            if slot < dim - 1 {
                angles.push(t_values[i]);
            } else {
                angles.push(phi_values[i]);
            }
        }
        out.push(angles);
        // Mixed-radix increment.
        let mut carry = true;
        for slot in (0..n_params).rev() {
            if !carry {
                break;
            }
            index[slot] += 1;
            if index[slot] == per {
                index[slot] = 0;
            } else {
                carry = false;
            }
        }
        if carry {
            break;
        }
    }
    out
}

fn random_angles(dim: usize, count: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let n_params = 2 * (dim - 1);
    (0..count)
        .map(|_| {
            (0..n_params)
                .map(|slot| {
                    if slot < dim - 1 {
                        rng.random_range(0.0..FRAC_PI_2)
                    } else {
                        rng.random_range(0.0..2.0 * PI)
                    }
                })
                .collect()
        })
        .collect()
}

fn structured_ket_bank(dim: usize) -> Vec<Ket> {
    let mut bank: Vec<Ket> = (0..dim).map(|k| Ket::basis(dim, k)).collect();
    let uniform = vec![C64::new(1.0 / (dim as f64).sqrt(), 0.0); dim];
    bank.push(Ket::new(uniform).expect("uniform superposition is normalized"));
    bank
}

// ---------------------------------------------------------------------------
// Nelder-Mead simplex minimizer (deterministic, with stagnation restarts).

struct Simplex {
    points: Vec<(f64, Vec<f64>)>,
}

impl Simplex {
    fn init(
        f: &mut impl FnMut(&[f64]) -> Result<f64>,
        x0: &[f64],
        step: f64,
    ) -> Result<Self> {
        let n = x0.len();
        let mut points = Vec::with_capacity(n + 1);
        points.push((f(x0)?, x0.to_vec()));
        for i in 0..n {
            let mut x = x0.to_vec();
            x[i] += step;
            points.push((f(&x)?, x));
        }
        let mut s = Self { points };
        s.sort();
        Ok(s)
    }

    fn sort(&mut self) {
        self.points
            .sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite objective values"));
    }

    fn spread(&self) -> f64 {
        self.points.last().expect("nonempty").0 - self.points[0].0
    }
}

/// Minimizes `f` from `x0`. Returns the best value and point found within
/// `max_iter` iterations. Non-finite objective values abort the search.
fn nelder_mead_min(
    f: &mut impl FnMut(&[f64]) -> Result<f64>,
    x0: &[f64],
    step: f64,
    max_iter: usize,
    ftol: f64,
) -> Result<(f64, Vec<f64>)> {
    let n = x0.len();
    let mut best_overall: Option<(f64, Vec<f64>)> = None;
    let mut simplex = Simplex::init(f, x0, step)?;
    let mut iters = 0usize;
    let mut restarts = 0usize;

    while iters < max_iter {
        if simplex.spread() <= ftol {
            let best = simplex.points[0].clone();
            let improved = match &best_overall {
                Some((v, _)) => best.0 < v - ftol,
                None => true,
            };
            if improved {
                match &mut best_overall {
                    Some(slot) if slot.0 <= best.0 => {}
                    _ => best_overall = Some(best.clone()),
                }
            }
            if restarts >= 2 || !improved {
                break;
            }
            restarts += 1;
            simplex = Simplex::init(f, &best.1, step * 0.25)?;
            continue;
        }
        iters += 1;

        let worst = simplex.points[n].clone();
        let second = simplex.points[n - 1].0;
        let best = simplex.points[0].0;
        let mut centroid = vec![0.0; n];
        for (_, x) in &simplex.points[..n] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / n as f64;
            }
        }
        let shifted = |alpha: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&worst.1)
                .map(|(c, w)| c + alpha * (c - w))
                .collect()
        };

        let xr = shifted(1.0);
        let fr = f(&xr)?;
        if fr < best {
            let xe = shifted(2.0);
            let fe = f(&xe)?;
            simplex.points[n] = if fe < fr { (fe, xe) } else { (fr, xr) };
        } else if fr < second {
            simplex.points[n] = (fr, xr);
        } else {
            let (fc, xc) = if fr < worst.0 {
                let xc = shifted(0.5);
                (f(&xc)?, xc)
            } else {
                let xc = shifted(-0.5);
                (f(&xc)?, xc)
            };
            if fc < worst.0.min(fr) {
                simplex.points[n] = (fc, xc);
            } else {
                // Shrink toward the best vertex.
                let anchor = simplex.points[0].1.clone();
                for slot in simplex.points.iter_mut().skip(1) {
                    let x: Vec<f64> = anchor
                        .iter()
                        .zip(&slot.1)
                        .map(|(a, b)| a + 0.5 * (b - a))
                        .collect();
                    *slot = (f(&x)?, x);
                }
            }
        }
        simplex.sort();
    }

    let final_best = simplex.points[0].clone();
    Ok(match best_overall {
        Some(b) if b.0 <= final_best.0 => b,
        _ => final_best,
    })
}

// ---------------------------------------------------------------------------
// Shared candidate-pool search over angle-parameterized kets.

fn finite_or_err(v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFiniteObjective)
    }
}

fn search_over_kets<F>(
    objective: &F,
    dim: usize,
    budget: &SearchBudget,
    extra_bank: &[Ket],
    seed_salt: u64,
) -> Result<(f64, Ket)>
where
    F: Fn(&Ket) -> f64 + Sync,
{
    let mut pool: Vec<Vec<f64>> = angle_grid(dim, budget.grid_resolution);
    for ket in structured_ket_bank(dim).iter().chain(extra_bank) {
        pool.push(angles_from_ket(ket));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed ^ seed_salt);
    pool.extend(random_angles(dim, budget.starts, &mut rng));

    let evals: Vec<f64> = pool
        .par_iter()
        .map(|angles| objective(&ket_from_angles(angles, dim)))
        .collect();
    for &v in &evals {
        finite_or_err(v)?;
    }

    // Rank candidates best-first; ties resolve to the lowest pool index.
    let mut ranked: Vec<usize> = (0..pool.len()).collect();
    ranked.sort_by(|&i, &j| {
        evals[j]
            .partial_cmp(&evals[i])
            .expect("finite values")
            .then(i.cmp(&j))
    });
    let top: Vec<usize> = ranked.into_iter().take(TOP_K).collect();

    let per = grid_points_per_angle(2 * (dim - 1), budget.grid_resolution);
    let step = (FRAC_PI_2 / per.max(2) as f64).max(0.02);

    let refined: Vec<Result<(f64, Vec<f64>)>> = top
        .par_iter()
        .map(|&idx| {
            let mut f = |x: &[f64]| finite_or_err(-objective(&ket_from_angles(x, dim)));
            nelder_mead_min(&mut f, &pool[idx], step, budget.max_steps, budget.tolerance)
        })
        .collect();

    let mut best_val = evals[top[0]];
    let mut best_angles = pool[top[0]].clone();
    for r in refined {
        let (neg, x) = r?;
        let v = -neg;
        if v > best_val {
            best_val = v;
            best_angles = x;
        }
    }
    Ok((best_val, ket_from_angles(&best_angles, dim).canonicalize()))
}

/// Maximizes an objective over unit kets of the given dimension.
pub fn maximize_over_single_kets<F>(
    objective: F,
    dim: usize,
    budget: &SearchBudget,
) -> Result<(f64, Ket)>
where
    F: Fn(&Ket) -> f64 + Sync,
{
    maximize_over_single_kets_seeded(objective, dim, budget, &[])
}

/// Like [`maximize_over_single_kets`] with caller-supplied warm-start kets
/// added to the deterministic candidate pool.
pub fn maximize_over_single_kets_seeded<F>(
    objective: F,
    dim: usize,
    budget: &SearchBudget,
    seeds: &[Ket],
) -> Result<(f64, Ket)>
where
    F: Fn(&Ket) -> f64 + Sync,
{
    if dim < 2 {
        return Err(Error::DimensionMismatch(format!(
            "ket search needs dimension >= 2, got {dim}"
        )));
    }
    search_over_kets(&objective, dim, budget, seeds, 0x5157)
}

/// Maximizes an objective over bipartite pure states on `C^d (x) C^d`.
/// The candidate pool adds the maximally entangled state and, for qubits,
/// a Schmidt-diagonal family, as deterministic starts.
pub fn maximize_over_bipartite_kets<F>(
    objective: F,
    d: usize,
    budget: &SearchBudget,
) -> Result<(f64, Ket)>
where
    F: Fn(&Ket) -> f64 + Sync,
{
    maximize_over_bipartite_kets_seeded(objective, d, budget, &[])
}

/// Like [`maximize_over_bipartite_kets`] with caller-supplied warm-start
/// kets (dimension `d*d`) added to the candidate pool.
pub fn maximize_over_bipartite_kets_seeded<F>(
    objective: F,
    d: usize,
    budget: &SearchBudget,
    seeds: &[Ket],
) -> Result<(f64, Ket)>
where
    F: Fn(&Ket) -> f64 + Sync,
{
    if d < 2 {
        return Err(Error::DimensionMismatch(format!(
            "bipartite search needs local dimension >= 2, got {d}"
        )));
    }
    let mut bank = vec![linalg::maximally_entangled(d)];
    if d == 2 {
        for i in 0..=16 {
            bank.push(linalg::schmidt_diagonal_qubit(i as f64 * FRAC_PI_2 / 16.0));
        }
    }
    bank.extend_from_slice(seeds);
    search_over_kets(&objective, d * d, budget, &bank, 0xB19A)
}

// ---------------------------------------------------------------------------
// POVM search via isometry parameterization.

fn hermitian_from_params(x: &[f64], m: usize) -> ComplexMatrix {
    let mut h = ComplexMatrix::zeros(m);
    for i in 0..m {
        h.set(i, i, C64::new(x[i], 0.0));
    }
    let mut idx = m;
    for i in 0..m {
        for j in (i + 1)..m {
            let v = C64::new(x[idx], x[idx + 1]);
            idx += 2;
            h.set(i, j, v);
            h.set(j, i, v.conj());
        }
    }
    h
}

fn unitary_exp_ih(h: &ComplexMatrix) -> ComplexMatrix {
    let (values, u) = linalg::herm_eigs_of_hermitized(h);
    let m = h.dim();
    let mut out = ComplexMatrix::zeros(m);
    for (k, &lambda) in values.iter().enumerate() {
        let w = C64::from_polar(1.0, lambda);
        for i in 0..m {
            let ui = u.get(i, k);
            for j in 0..m {
                let v = out.get(i, j) + ui * u.get(j, k).conj() * w;
                out.set(i, j, v);
            }
        }
    }
    out
}

/// Completes `cols` (orthonormal after Gram-Schmidt) to a full unitary by
/// appending standard basis vectors and discarding dependents.
fn complete_to_unitary(cols: Vec<Vec<C64>>, m: usize) -> ComplexMatrix {
    let mut chosen: Vec<Vec<C64>> = Vec::with_capacity(m);
    let mut feed = cols;
    for k in 0..m {
        let mut e = vec![C64::new(0.0, 0.0); m];
        e[k] = C64::new(1.0, 0.0);
        feed.push(e);
    }
    for v in feed {
        if chosen.len() == m {
            break;
        }
        let mut w = v;
        for b in &chosen {
            let proj: C64 = b.iter().zip(&w).map(|(x, y)| x.conj() * y).sum();
            for (wi, bi) in w.iter_mut().zip(b) {
                *wi -= proj * bi;
            }
        }
        let norm = w.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-8 {
            continue;
        }
        for wi in w.iter_mut() {
            *wi /= norm;
        }
        chosen.push(w);
    }
    let mut u = ComplexMatrix::zeros(m);
    for (j, col) in chosen.iter().enumerate() {
        for i in 0..m {
            u.set(i, j, col[i]);
        }
    }
    u
}

fn uniform_base_isometry(d: usize, n: usize) -> Vec<Vec<C64>> {
    // Columns of the (n d) x d isometry stacking I/sqrt(n) blocks.
    let w = 1.0 / (n as f64).sqrt();
    (0..d)
        .map(|c| {
            let mut col = vec![C64::new(0.0, 0.0); n * d];
            for k in 0..n {
                col[k * d + c] = C64::new(w, 0.0);
            }
            col
        })
        .collect()
}

fn povm_base_isometry(povm: &[ComplexMatrix]) -> Result<Vec<Vec<C64>>> {
    let d = povm[0].dim();
    let n = povm.len();
    let roots: Vec<ComplexMatrix> = povm
        .iter()
        .map(linalg::sqrt_psd)
        .collect::<Result<_>>()?;
    Ok((0..d)
        .map(|c| {
            let mut col = vec![C64::new(0.0, 0.0); n * d];
            for (k, root) in roots.iter().enumerate() {
                for r in 0..d {
                    col[k * d + r] = root.get(r, c);
                }
            }
            col
        })
        .collect())
}

fn povm_from_unitary_cols(w: &ComplexMatrix, d: usize, n: usize) -> Vec<ComplexMatrix> {
    // First d columns of w form the isometry; block k gives M_k = V_k† V_k.
    (0..n)
        .map(|k| {
            let mut m = ComplexMatrix::zeros(d);
            for a in 0..d {
                for b in 0..d {
                    let mut acc = C64::new(0.0, 0.0);
                    for r in 0..d {
                        acc += w.get(k * d + r, a).conj() * w.get(k * d + r, b);
                    }
                    m.set(a, b, acc);
                }
            }
            m
        })
        .collect()
}

/// Maximizes an objective over `n_outcomes`-outcome POVMs in dimension `d`.
///
/// POVMs are parameterized as the column blocks of a `d n x d` isometry
/// `exp(iH) V0`; each seed POVM contributes its own base isometry `V0`
/// reached exactly at `H = 0`, and the remaining starts perturb a uniform
/// base. Used as a brute-force cross-check for the certified ensemble
/// solver.
pub fn maximize_over_povms<F>(
    objective: F,
    d: usize,
    n_outcomes: usize,
    budget: &SearchBudget,
    seed_povms: &[Vec<ComplexMatrix>],
) -> Result<(f64, Vec<ComplexMatrix>)>
where
    F: Fn(&[ComplexMatrix]) -> f64 + Sync,
{
    if d < 1 || n_outcomes < 1 {
        return Err(Error::DimensionMismatch(
            "POVM search needs d >= 1 and n_outcomes >= 1".into(),
        ));
    }
    let m = d * n_outcomes;
    let n_params = m * m;

    let mut bases: Vec<ComplexMatrix> =
        vec![complete_to_unitary(uniform_base_isometry(d, n_outcomes), m)];
    for povm in seed_povms {
        bases.push(complete_to_unitary(povm_base_isometry(povm)?, m));
    }

    // Start list: (base index, parameter vector). Zero vectors reproduce the
    // bases exactly; the rest are seeded random perturbations of base 0.
    let mut starts: Vec<(usize, Vec<f64>)> = bases
        .iter()
        .enumerate()
        .map(|(i, _)| (i, vec![0.0; n_params]))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed ^ 0x9051);
    while starts.len() < budget.starts.max(bases.len()) {
        let x: Vec<f64> = (0..n_params).map(|_| rng.random_range(-0.7..0.7)).collect();
        starts.push((0, x));
    }

    let eval = |base: &ComplexMatrix, x: &[f64]| -> f64 {
        let h = hermitian_from_params(x, m);
        let w = unitary_exp_ih(&h).matmul(base);
        objective(&povm_from_unitary_cols(&w, d, n_outcomes))
    };

    let results: Vec<Result<(f64, usize, Vec<f64>)>> = starts
        .par_iter()
        .map(|(base_idx, x0)| {
            let base = &bases[*base_idx];
            let mut f = |x: &[f64]| finite_or_err(-eval(base, x));
            let (neg, x) =
                nelder_mead_min(&mut f, x0, 0.2, budget.max_steps, budget.tolerance)?;
            Ok((-neg, *base_idx, x))
        })
        .collect();

    let mut best: Option<(f64, usize, usize, Vec<f64>)> = None;
    for (i, r) in results.into_iter().enumerate() {
        let (v, base_idx, x) = r?;
        let better = match &best {
            Some((bv, _, _, _)) => v > *bv,
            None => true,
        };
        if better {
            best = Some((v, i, base_idx, x));
        }
    }
    let (v, _, base_idx, x) = best.expect("at least one start");
    let h = hermitian_from_params(&x, m);
    let w = unitary_exp_ih(&h).matmul(&bases[base_idx]);
    Ok((v, povm_from_unitary_cols(&w, d, n_outcomes)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn budget_parses_and_rejects() {
        let b = SearchBudget::parse("32,16,500,1e-6").unwrap();
        assert_eq!(b.grid_resolution, 32);
        assert_eq!(b.starts, 16);
        assert_eq!(b.max_steps, 500);
        assert!((b.tolerance - 1e-6).abs() < 1e-18);
        assert!(SearchBudget::parse("32,16,500").is_err());
        assert!(SearchBudget::parse("a,b,c,d").is_err());
        assert!(SearchBudget::parse("0,1,1,1e-6").is_err());
    }

    #[test]
    fn angles_round_trip_through_kets() {
        for dim in [2usize, 3, 4] {
            let angles: Vec<f64> = (0..2 * (dim - 1))
                .map(|i| 0.3 + 0.37 * i as f64)
                .collect();
            let ket = ket_from_angles(&angles, dim);
            let back = ket_from_angles(&angles_from_ket(&ket), dim);
            assert!(
                (ket.overlap_sqr(&back) - 1.0).abs() < 1e-10,
                "round trip lost the ray at dim {dim}"
            );
        }
    }

    #[test]
    fn ket_search_finds_top_eigenvector() {
        // max <psi|H|psi> over kets is the top eigenvalue.
        let h = Ket::qubit(1.1, 0.4).outer().scale(0.9);
        let budget = SearchBudget::default().with_starts(8).with_steps(300);
        let (v, ket) = maximize_over_single_kets(
            |k: &Ket| h.trace_product_re(&k.outer()),
            2,
            &budget,
        )
        .unwrap();
        assert!((v - 0.9).abs() < 1e-6);
        assert!((ket.overlap_sqr(&Ket::qubit(1.1, 0.4)) - 1.0).abs() < 1e-5);
    }

    #[test]
    fn qutrit_search_reaches_basis_state() {
        let target = Ket::basis(3, 0).outer();
        let budget = SearchBudget::default().with_starts(8).with_steps(300);
        let (v, _) = maximize_over_single_kets(
            |k: &Ket| target.trace_product_re(&k.outer()),
            3,
            &budget,
        )
        .unwrap();
        assert!((v - 1.0).abs() < 1e-8);
    }

    #[test]
    fn bipartite_search_reaches_maximally_entangled_value() {
        // Overlap with the maximally entangled projector peaks at 1.
        let target = linalg::maximally_entangled(2).outer();
        let budget = SearchBudget::default()
            .with_grid(16)
            .with_starts(8)
            .with_steps(300);
        let (v, _) =
            maximize_over_bipartite_kets(|k: &Ket| target.trace_product_re(&k.outer()), 2, &budget)
                .unwrap();
        assert!((v - 1.0).abs() < 1e-6);
    }

    #[test]
    fn non_finite_objectives_abort() {
        let budget = SearchBudget::default().with_grid(4).with_starts(2).with_steps(50);
        let r = maximize_over_single_kets(|_k: &Ket| f64::NAN, 2, &budget);
        assert!(matches!(r, Err(Error::NonFiniteObjective)));
    }

    #[test]
    fn identical_seeds_are_bitwise_identical() {
        let h = Ket::qubit(0.8, 2.0).outer().scale(0.77);
        let obj = |k: &Ket| h.trace_product_re(&k.outer());
        let budget = SearchBudget::default().with_starts(16).with_steps(200);
        let (v1, k1) = maximize_over_single_kets(obj, 2, &budget).unwrap();
        let (v2, k2) = maximize_over_single_kets(obj, 2, &budget).unwrap();
        assert_eq!(v1.to_bits(), v2.to_bits());
        for i in 0..2 {
            assert_eq!(k1.amp(i).re.to_bits(), k2.amp(i).re.to_bits());
            assert_eq!(k1.amp(i).im.to_bits(), k2.amp(i).im.to_bits());
        }
    }

    #[test]
    fn povm_search_solves_two_state_discrimination() {
        // Helstrom value for |0>,|+> at equal priors: (1 + 1/sqrt(2)) / 2.
        let g1 = Ket::basis(2, 0).outer().scale(0.5);
        let g2 = Ket::qubit(std::f64::consts::FRAC_PI_2, 0.0).outer().scale(0.5);
        let budget = SearchBudget::default().with_starts(6).with_steps(1500);
        let (v, povm) = maximize_over_povms(
            |m: &[ComplexMatrix]| g1.trace_product_re(&m[0]) + g2.trace_product_re(&m[1]),
            2,
            2,
            &budget,
            &[],
        )
        .unwrap();
        let expect = 0.5 * (1.0 + std::f64::consts::FRAC_1_SQRT_2);
        assert!((v - expect).abs() < 1e-5, "got {v}, want {expect}");
        let total = povm[0].add(&povm[1]);
        let (dev, _) = total.deviation_from_identity();
        assert!(dev < 1e-9);
    }
}
