//! Weighted state ensembles and certified (anti)distinguishability values.
//!
//! The distinguishability of an ensemble `{rho_k, q_k}` is the maximum of
//! `sum_k q_k Tr(rho_k M_k)` over POVMs `{M_k}`; antidistinguishability
//! replaces the maximum with `sum_k q_k` minus the corresponding minimum
//! (naming a state that did not occur). Weights are positive but need not
//! sum to one. Every numeric solve returns a dual certificate: a Hermitian
//! operator whose trace bounds the optimum from the other side, so a small
//! primal-dual gap proves near-optimality without trusting the heuristic.

use crate::error::{Error, Result};
use crate::linalg::{self, C64, ComplexMatrix, Ket};
use crate::optimize::{self, SearchBudget};
use crate::sampling;
use crate::tol;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// States with strictly positive weights on a common dimension.
///
/// Members whose weight is at or below the probability floor are dropped at
/// construction; negative or non-finite weights are rejected.
#[derive(Clone, Debug)]
pub struct WeightedEnsemble {
    states: Vec<ComplexMatrix>,
    weights: Vec<f64>,
    dim: usize,
}

impl WeightedEnsemble {
    pub fn new(states: Vec<ComplexMatrix>, weights: Vec<f64>) -> Result<Self> {
        if states.len() != weights.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} states but {} weights",
                states.len(),
                weights.len()
            )));
        }
        if states.is_empty() {
            return Err(Error::TooFewMembers { needed: 1, got: 0 });
        }
        let dim = states[0].dim();
        let mut kept_states = Vec::with_capacity(states.len());
        let mut kept_weights = Vec::with_capacity(weights.len());
        for (state, &w) in states.iter().zip(&weights) {
            if state.dim() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "member dim {} differs from {}",
                    state.dim(),
                    dim
                )));
            }
            if !w.is_finite() || w < -tol::PROB_FLOOR {
                return Err(Error::InvalidWeight(format!(
                    "weights must be finite and nonnegative, got {w}"
                )));
            }
            if w <= tol::PROB_FLOOR {
                continue;
            }
            state.validate_density()?;
            kept_states.push(state.clone());
            kept_weights.push(w);
        }
        Ok(Self {
            states: kept_states,
            weights: kept_weights,
            dim,
        })
    }

    pub fn from_pure(kets: &[Ket], weights: &[f64]) -> Result<Self> {
        Self::new(kets.iter().map(Ket::outer).collect(), weights.to_vec())
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn states(&self) -> &[ComplexMatrix] {
        &self.states
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight_sum(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Weighted operators `G_k = q_k rho_k`, the objects the solvers consume.
    pub(crate) fn scaled_ops(&self) -> Vec<ComplexMatrix> {
        self.states
            .iter()
            .zip(&self.weights)
            .map(|(s, &w)| s.scale(w))
            .collect()
    }
}

/// Two-sided proof of optimality for a discrimination value: the primal is
/// attained by an explicit POVM, the dual operator bounds the optimum from
/// the other side, and `gap` is the distance between the two.
#[derive(Clone, Debug)]
pub struct DiscrimCertificate {
    pub primal_value: f64,
    pub dual_upper_bound: f64,
    pub dual_operator: ComplexMatrix,
    pub gap: f64,
    /// True when the gap closed within the acceptance threshold; false marks
    /// a certified bracket that is wider than requested.
    pub converged: bool,
}

fn check_weight(w: f64) -> Result<()> {
    if !w.is_finite() || w <= 0.0 {
        return Err(Error::InvalidWeight(format!(
            "weights must be positive, got {w}"
        )));
    }
    Ok(())
}

/// Optimal two-state discrimination value `q2 + sum_i max(lambda_i, 0)` over
/// the eigenvalues of `q1 rho1 - q2 rho2`. This positive-part form is valid
/// in any dimension; for qubits it coincides with the `q2 + lambda_max` form
/// because the difference operator has at most one positive eigenvalue
/// (see `qubit_pair_forms_agree`).
pub fn ds_pair(rho1: &ComplexMatrix, rho2: &ComplexMatrix, q1: f64, q2: f64) -> Result<f64> {
    check_weight(q1)?;
    check_weight(q2)?;
    rho1.validate_density()?;
    rho2.validate_density()?;
    if rho1.dim() != rho2.dim() {
        return Err(Error::DimensionMismatch(format!(
            "state dims {} vs {}",
            rho1.dim(),
            rho2.dim()
        )));
    }
    let diff = rho1.scale(q1).sub(&rho2.scale(q2));
    Ok(q2 + linalg::sum_positive_eigenvalues(&diff)?)
}

/// Closed form of [`ds_pair`] for pure states:
/// `((q1+q2) + sqrt((q1+q2)^2 - 4 q1 q2 |<psi1|psi2>|^2)) / 2`.
pub fn ds_pure_pair(psi1: &Ket, psi2: &Ket, q1: f64, q2: f64) -> Result<f64> {
    check_weight(q1)?;
    check_weight(q2)?;
    if psi1.dim() != psi2.dim() {
        return Err(Error::DimensionMismatch(format!(
            "ket dims {} vs {}",
            psi1.dim(),
            psi2.dim()
        )));
    }
    let s = psi1.overlap_sqr(psi2);
    let total = q1 + q2;
    let disc = (total * total - 4.0 * q1 * q2 * s).max(0.0);
    Ok(0.5 * (total + disc.sqrt()))
}

/// Perfect-exclusion test for three pure states from their pairwise squared
/// overlaps `x1 = |<psi1|psi2>|^2`, `x2 = |<psi1|psi3>|^2`,
/// `x3 = |<psi2|psi3>|^2`: antidistinguishable when `x1+x2+x3 <= 1` and
/// `(x1+x2+x3-1)^2 >= 4 x1 x2 x3`.
///
/// Both tests carry an absolute slack of 1e-12. The slack is not cosmetic:
/// every coplanar qubit triple satisfies the second condition with exact
/// equality, so a strict inequality would misclassify the entire real-
/// amplitude family under roundoff. For qubits the conditions are necessary
/// and sufficient; in higher dimensions they remain sufficient.
pub fn is_antidistinguishable_triple(psi1: &Ket, psi2: &Ket, psi3: &Ket) -> bool {
    let x1 = psi1.overlap_sqr(psi2);
    let x2 = psi1.overlap_sqr(psi3);
    let x3 = psi2.overlap_sqr(psi3);
    let s = x1 + x2 + x3;
    let sum_ok = s < 1.0 + tol::ALGEBRAIC;
    let disc_ok = (s - 1.0).powi(2) - 4.0 * x1 * x2 * x3 >= -tol::ALGEBRAIC;
    sum_ok && disc_ok
}

// ---------------------------------------------------------------------------
// Span reduction: restrict the solve to the combined support of the weighted
// operators. POVM mass outside the span contributes nothing to the objective,
// so the reduced problem has the same value; the basis also conditions the
// iteration when states are low-rank.

struct SpanReduction {
    basis: Vec<Ket>,
}

impl SpanReduction {
    fn of(ops: &[ComplexMatrix]) -> Result<Option<Self>> {
        let dim = ops[0].dim();
        let mut total = ComplexMatrix::zeros(dim);
        for op in ops {
            total = total.add(op);
        }
        let (values, vecs) = linalg::herm_eigs(&total.hermitize())?;
        let lambda_max = values.last().copied().unwrap_or(0.0).max(0.0);
        let thresh = (1e-12 * lambda_max).max(1e-300);
        let basis: Vec<Ket> = values
            .iter()
            .zip(vecs)
            .filter(|(&v, _)| v > thresh)
            .map(|(_, k)| k)
            .collect();
        if basis.len() == dim {
            Ok(None)
        } else {
            Ok(Some(Self { basis }))
        }
    }

    fn rank(&self) -> usize {
        self.basis.len()
    }

    fn compress(&self, op: &ComplexMatrix) -> ComplexMatrix {
        let r = self.rank();
        let mut out = ComplexMatrix::zeros(r);
        for i in 0..r {
            for j in 0..r {
                let mut acc = C64::new(0.0, 0.0);
                for a in 0..op.dim() {
                    for b in 0..op.dim() {
                        acc += self.basis[i].amp(a).conj() * op.get(a, b) * self.basis[j].amp(b);
                    }
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    fn lift(&self, op: &ComplexMatrix) -> ComplexMatrix {
        let d = self.basis[0].dim();
        let r = self.rank();
        let mut out = ComplexMatrix::zeros(d);
        for a in 0..d {
            for b in 0..d {
                let mut acc = C64::new(0.0, 0.0);
                for i in 0..r {
                    for j in 0..r {
                        acc += self.basis[i].amp(a) * op.get(i, j) * self.basis[j].amp(b).conj();
                    }
                }
                out.set(a, b, acc);
            }
        }
        out
    }

    fn support_projector(&self) -> ComplexMatrix {
        self.lift(&ComplexMatrix::identity(self.rank()))
    }
}

// ---------------------------------------------------------------------------
// Inner solver: maximize sum_k Tr(G_k M_k) over POVMs for PSD operators G_k.

fn objective_of(ops: &[ComplexMatrix], povm: &[ComplexMatrix]) -> f64 {
    ops.iter()
        .zip(povm)
        .map(|(g, m)| g.trace_product_re(m))
        .sum()
}

/// Dual repair: `Y = Herm(sum_k G_k M_k)` has `Tr Y` equal to the primal
/// but may violate `Y >= G_k`. Violations are patched greedily with
/// rank-one updates along the worst violating eigenvector, which costs only
/// the violation itself in trace; any residual after the iteration cap is
/// absorbed by a uniform shift. The patched operator is feasible, so its
/// trace is a valid upper bound.
fn dual_bound(ops: &[ComplexMatrix], povm: &[ComplexMatrix]) -> Result<(ComplexMatrix, f64)> {
    let d = ops[0].dim();
    let mut y = ComplexMatrix::zeros(d);
    for (g, m) in ops.iter().zip(povm) {
        y = y.add(&g.matmul(m));
    }
    let mut y = y.hermitize();
    for _ in 0..4 * d * ops.len() {
        let mut worst = 0.0f64;
        let mut direction = None;
        for g in ops {
            let slack = g.sub(&y).hermitize();
            let (values, vectors) = linalg::herm_eigs(&slack)?;
            let top = *values.last().expect("nonempty spectrum");
            if top > worst {
                worst = top;
                direction = Some(vectors.last().expect("nonempty spectrum").clone());
            }
        }
        let Some(v) = direction else { break };
        if worst <= 1e-15 {
            break;
        }
        y = y.add(&v.outer().scale(worst)).hermitize();
    }
    let mut mu = 0.0f64;
    for g in ops {
        mu = mu.max(linalg::max_eigenvalue(&g.sub(&y))?);
    }
    let mu = mu.max(0.0);
    let upper = y.trace().re + d as f64 * mu;
    let shifted = y.add(&ComplexMatrix::identity(d).scale(mu));
    Ok((shifted, upper))
}

fn srm_start(ops: &[ComplexMatrix]) -> Vec<ComplexMatrix> {
    let d = ops[0].dim();
    let mut total = ComplexMatrix::zeros(d);
    for op in ops {
        total = total.add(op);
    }
    let (t, p) = linalg::inv_sqrt_psd_internal(&total.hermitize());
    let mut povm: Vec<ComplexMatrix> = ops
        .iter()
        .map(|g| t.matmul(g).matmul(&t).hermitize())
        .collect();
    // Assign any co-support deficit to the heaviest operator.
    let deficit = ComplexMatrix::identity(d).sub(&p);
    if deficit.max_abs_entry() > 1e-14 {
        let k = argmax_trace(ops);
        povm[k] = povm[k].add(&deficit).hermitize();
    }
    povm
}

fn argmax_trace(ops: &[ComplexMatrix]) -> usize {
    let mut best = 0usize;
    let mut best_tr = f64::NEG_INFINITY;
    for (k, op) in ops.iter().enumerate() {
        let tr = op.trace().re;
        if tr > best_tr {
            best_tr = tr;
            best = k;
        }
    }
    best
}

/// One pass of the fixed-point ascent
/// `M_k <- T G_k M_k G_k T`, `T = (sum_j G_j M_j G_j)^(-1/2)`,
/// which preserves positivity and completeness.
fn ascent_step(ops: &[ComplexMatrix], povm: &mut Vec<ComplexMatrix>) {
    let d = ops[0].dim();
    let mut lambda = ComplexMatrix::zeros(d);
    let raw: Vec<ComplexMatrix> = ops
        .iter()
        .zip(povm.iter())
        .map(|(g, m)| g.matmul(m).matmul(g))
        .collect();
    for r in &raw {
        lambda = lambda.add(r);
    }
    let lambda = lambda.hermitize();
    let (t, p) = linalg::inv_sqrt_psd_internal(&lambda);
    let mut next: Vec<ComplexMatrix> = raw
        .iter()
        .map(|r| t.matmul(r).matmul(&t).hermitize())
        .collect();
    let deficit = ComplexMatrix::identity(d).sub(&p);
    if deficit.max_abs_entry() > 1e-14 {
        let k = argmax_trace(ops);
        next[k] = next[k].add(&deficit).hermitize();
    }
    *povm = next;
}

fn run_ascent(
    ops: &[ComplexMatrix],
    mut povm: Vec<ComplexMatrix>,
    max_steps: usize,
) -> (f64, Vec<ComplexMatrix>) {
    // The fixed point is not provably monotone, so keep the best iterate
    // seen; this also preserves the start's value as a floor.
    let mut best_value = objective_of(ops, &povm);
    let mut best_povm = povm.clone();
    let mut prev = best_value;
    let mut stale = 0usize;
    for _ in 0..max_steps {
        ascent_step(ops, &mut povm);
        let next = objective_of(ops, &povm);
        if next > best_value {
            best_value = next;
            best_povm = povm.clone();
        }
        if (next - prev).abs() <= 1e-15 * (1.0 + prev.abs()) {
            stale += 1;
            if stale >= 3 {
                break;
            }
        } else {
            stale = 0;
        }
        prev = next;
    }
    (best_value, best_povm)
}

struct MaxSolve {
    value: f64,
    povm: Vec<ComplexMatrix>,
    dual: ComplexMatrix,
    upper: f64,
}

/// Maximizes `sum_k Tr(G_k M_k)` over POVMs. Runs the fixed-point ascent
/// from the square-root-measurement start plus seeded random restarts,
/// checking the dual gap periodically and stopping each start once its gap
/// is certified or stops shrinking; if the best certified gap stays above
/// the target, falls back to the isometry-parameterized brute-force search.
/// Every dual repair bounds the global optimum, so the reported upper bound
/// is the smallest one seen anywhere.
fn solve_max(ops: &[ComplexMatrix], budget: &SearchBudget) -> Result<MaxSolve> {
    let d = ops[0].dim();
    let n = ops.len();
    let steps = budget.max_steps.clamp(50, 1000);
    let chunk = 64usize;

    // The problem is convex, so the square-root start with a long ascent
    // does the heavy lifting; random restarts are cheap insurance against
    // degenerate fixed points and get short caps.
    let mut candidates: Vec<(Vec<ComplexMatrix>, usize)> = vec![(srm_start(ops), steps * 50)];
    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed ^ 0xA5CE);
    let restarts = budget.starts.clamp(1, 8);
    for _ in 0..restarts {
        let kraus = sampling::random_kraus_ops(d, n, &mut rng);
        candidates.push((
            kraus
                .iter()
                .map(|k| k.adjoint().matmul(k).hermitize())
                .collect(),
            steps * 5,
        ));
    }

    let mut value = f64::NEG_INFINITY;
    let mut povm: Vec<ComplexMatrix> = Vec::new();
    let mut dual = ComplexMatrix::identity(d);
    let mut upper = f64::INFINITY;

    // Trivial single-outcome strategies are exact lower-bound anchors.
    for k in 0..n {
        let mut anchor = vec![ComplexMatrix::zeros(d); n];
        anchor[k] = ComplexMatrix::identity(d);
        let anchor_value = objective_of(ops, &anchor);
        if anchor_value > value {
            value = anchor_value;
            povm = anchor;
        }
    }

    'starts: for (start, hard_cap) in candidates {
        let mut current = start;
        let mut best_value = objective_of(ops, &current);
        let mut best_povm = current.clone();
        let mut spent = 0usize;
        let mut prev_gap = f64::INFINITY;
        let mut stalls = 0usize;
        while spent < hard_cap {
            let (chunk_value, chunk_povm) =
                run_ascent(ops, current.clone(), chunk.min(hard_cap - spent));
            spent += chunk;
            if chunk_value > best_value {
                best_value = chunk_value;
                best_povm = chunk_povm.clone();
            }
            current = chunk_povm;
            let (y, ub) = dual_bound(ops, &best_povm)?;
            if best_value > value {
                value = best_value;
                povm = best_povm.clone();
            }
            if ub < upper {
                upper = ub;
                dual = y;
            }
            if upper - value <= tol::SOLVER_GAP_TARGET {
                break 'starts;
            }
            let gap = ub - best_value;
            // Abort a start only when its gap is essentially frozen.
            if gap > 0.9999 * prev_gap {
                stalls += 1;
                if stalls >= 8 {
                    break;
                }
            } else {
                stalls = 0;
            }
            prev_gap = gap;
        }
    }

    if upper - value > tol::OPTIMIZATION {
        // Brute-force isometry search seeded with the ascent result.
        let fallback_budget = budget
            .clone()
            .with_starts(budget.starts.clamp(4, 16))
            .with_steps(budget.max_steps.clamp(200, 2000));
        let ops_owned: Vec<ComplexMatrix> = ops.to_vec();
        let (bf_value, bf_povm) = optimize::maximize_over_povms(
            move |m: &[ComplexMatrix]| objective_of(&ops_owned, m),
            d,
            n,
            &fallback_budget,
            &[povm.clone()],
        )?;
        if bf_value > value {
            let (bf_dual, bf_upper) = dual_bound(ops, &bf_povm)?;
            value = bf_value;
            povm = bf_povm;
            if bf_upper < upper {
                upper = bf_upper;
                dual = bf_dual;
            }
        }
    }

    Ok(MaxSolve {
        value,
        povm,
        dual,
        upper: upper.max(value),
    })
}

fn lift_solution(
    reduction: &Option<SpanReduction>,
    dim: usize,
    povm: Vec<ComplexMatrix>,
    dual: ComplexMatrix,
    heavy: usize,
) -> (Vec<ComplexMatrix>, ComplexMatrix) {
    match reduction {
        None => (povm, dual),
        Some(red) => {
            let mut lifted: Vec<ComplexMatrix> = povm.iter().map(|m| red.lift(m)).collect();
            let off_support = ComplexMatrix::identity(dim).sub(&red.support_projector());
            lifted[heavy] = lifted[heavy].add(&off_support).hermitize();
            (lifted, red.lift(&dual))
        }
    }
}

fn certificate(
    primal: f64,
    upper: f64,
    dual: ComplexMatrix,
) -> DiscrimCertificate {
    let gap = (upper - primal).max(0.0);
    DiscrimCertificate {
        primal_value: primal,
        dual_upper_bound: upper,
        dual_operator: dual,
        gap,
        converged: gap <= tol::OPTIMIZATION,
    }
}

/// Certified distinguishability of an ensemble: the optimal POVM, the value
/// `sum_k q_k Tr(rho_k M_k)` it attains, and a dual upper bound.
pub fn ds_general(
    ens: &WeightedEnsemble,
    budget: &SearchBudget,
) -> Result<(f64, Vec<ComplexMatrix>, DiscrimCertificate)> {
    if ens.len() < 2 {
        return Err(Error::TooFewMembers {
            needed: 2,
            got: ens.len(),
        });
    }
    let ops = ens.scaled_ops();
    let reduction = SpanReduction::of(&ops)?;
    let reduced_ops: Vec<ComplexMatrix> = match &reduction {
        None => ops.clone(),
        Some(red) => ops.iter().map(|g| red.compress(g)).collect(),
    };

    let solve = solve_max(&reduced_ops, budget)?;
    let heavy = argmax_trace(&reduced_ops);
    let (povm, dual) = lift_solution(&reduction, ens.dim(), solve.povm, solve.dual, heavy);

    // The value cannot exceed the total weight or undercut the heaviest
    // single weight; both clamps correspond to explicit feasible strategies.
    let sum_q = ens.weight_sum();
    let primal = solve.value.min(sum_q);
    let upper = solve.upper.clamp(primal, sum_q);
    let cert = certificate(primal, upper, dual);
    Ok((primal, povm, cert))
}

/// Tries to certify perfect exclusion of a qubit pure-state triple exactly:
/// each POVM element must be proportional to the projector orthogonal to its
/// state, so completeness reduces to a 4x3 linear system in the three
/// proportionality factors. Returns the solution when it exists.
fn perfect_qubit_triple_exclusion(
    ens: &WeightedEnsemble,
) -> Result<Option<Vec<ComplexMatrix>>> {
    if ens.dim() != 2 || ens.len() != 3 {
        return Ok(None);
    }
    let mut perps = Vec::with_capacity(3);
    for state in ens.states() {
        let (values, vecs) = linalg::herm_eigs(state)?;
        if values[0] > 1e-9 {
            return Ok(None); // mixed state; no rank-one reduction
        }
        let top = vecs.last().expect("qubit spectrum").clone();
        perps.push(top.qubit_orthogonal()?);
    }
    // Solve sum_k t_k P(perp_k) = I: one trace equation plus three Pauli
    // components, least squares via normal equations.
    let projs: Vec<ComplexMatrix> = perps.iter().map(Ket::outer).collect();
    let mut rows = [[0.0f64; 3]; 4];
    let rhs = [1.0f64, 0.0, 0.0, 0.0];
    for (k, p) in projs.iter().enumerate() {
        rows[0][k] = p.trace().re / 2.0;
        rows[1][k] = (p.get(0, 1) + p.get(1, 0)).re / 2.0;
        rows[2][k] = (p.get(1, 0) - p.get(0, 1)).im / 2.0;
        rows[3][k] = (p.get(0, 0) - p.get(1, 1)).re / 2.0;
    }
    let mut ata = [[0.0f64; 3]; 3];
    let mut atb = [0.0f64; 3];
    for i in 0..3 {
        for j in 0..3 {
            ata[i][j] = (0..4).map(|r| rows[r][i] * rows[r][j]).sum();
        }
        atb[i] = (0..4).map(|r| rows[r][i] * rhs[r]).sum();
    }
    let t = match solve_3x3(&ata, &atb) {
        Some(t) => t,
        None => return Ok(None),
    };
    if t.iter().any(|&x| x < -tol::ALGEBRAIC) {
        return Ok(None);
    }
    let t: Vec<f64> = t.iter().map(|&x| x.max(0.0)).collect();
    let mut total = ComplexMatrix::zeros(2);
    let povm: Vec<ComplexMatrix> = projs
        .iter()
        .zip(&t)
        .map(|(p, &tk)| p.scale(tk))
        .collect();
    for m in &povm {
        total = total.add(m);
    }
    let (residual, _) = total.deviation_from_identity();
    if residual > tol::RECONSTRUCTION {
        return Ok(None);
    }
    // Fold the roundoff residual into the largest element.
    let mut povm = povm;
    let k = t
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).expect("finite"))
        .map(|(i, _)| i)
        .unwrap_or(0);
    povm[k] = povm[k]
        .add(&ComplexMatrix::identity(2).sub(&total))
        .hermitize();
    Ok(Some(povm))
}

fn solve_3x3(a: &[[f64; 3]; 3], b: &[f64; 3]) -> Option<[f64; 3]> {
    let mut m = [[0.0f64; 4]; 3];
    for i in 0..3 {
        m[i][..3].copy_from_slice(&a[i]);
        m[i][3] = b[i];
    }
    for col in 0..3 {
        let pivot = (col..3).max_by(|&i, &j| {
            m[i][col]
                .abs()
                .partial_cmp(&m[j][col].abs())
                .expect("finite")
        })?;
        if m[pivot][col].abs() < 1e-14 {
            return None;
        }
        m.swap(col, pivot);
        for row in 0..3 {
            if row == col {
                continue;
            }
            let f = m[row][col] / m[col][col];
            for c in col..4 {
                m[row][c] -= f * m[col][c];
            }
        }
    }
    Some([m[0][3] / m[0][0], m[1][3] / m[1][1], m[2][3] / m[2][2]])
}

/// Certified antidistinguishability: `sum_k q_k` minus the certified minimum
/// of `sum_k q_k Tr(rho_k M_k)`. The dual operator satisfies `Z <= q_k rho_k`
/// for all `k`, so `sum_k q_k - Tr Z` upper-bounds the value.
pub fn as_general(
    ens: &WeightedEnsemble,
    budget: &SearchBudget,
) -> Result<(f64, Vec<ComplexMatrix>, DiscrimCertificate)> {
    if ens.len() < 2 {
        return Err(Error::TooFewMembers {
            needed: 2,
            got: ens.len(),
        });
    }
    let sum_q = ens.weight_sum();
    let dim = ens.dim();

    // Exact fast path: perfect exclusion of qubit pure triples closes the
    // gap to zero with the zero operator as dual (0 <= q_k rho_k always).
    if let Some(povm) = perfect_qubit_triple_exclusion(ens)? {
        let ops = ens.scaled_ops();
        let missed = objective_of(&ops, &povm).max(0.0);
        let primal = (sum_q - missed).min(sum_q);
        let cert = certificate(primal, sum_q, ComplexMatrix::zeros(dim));
        return Ok((primal, povm, cert));
    }

    let ops = ens.scaled_ops();
    let reduction = SpanReduction::of(&ops)?;
    let reduced_ops: Vec<ComplexMatrix> = match &reduction {
        None => ops.clone(),
        Some(red) => ops.iter().map(|g| red.compress(g)).collect(),
    };
    let r = reduced_ops[0].dim();

    // Minimize by maximizing the complements c I - G_k (all PSD by choice
    // of c); sum Tr(M_k) = r converts between the two objectives.
    let mut c = 0.0f64;
    for g in &reduced_ops {
        c = c.max(linalg::max_eigenvalue(g)?);
    }
    let shifted: Vec<ComplexMatrix> = reduced_ops
        .iter()
        .map(|g| ComplexMatrix::identity(r).scale(c).sub(g).hermitize())
        .collect();
    let solve = solve_max(&shifted, budget)?;

    let achieved_min = objective_of(&reduced_ops, &solve.povm).max(0.0);
    // Z = c I - Y' satisfies Z <= G_k whenever Y' >= c I - G_k; its trace
    // c r - Tr Y' lower-bounds the minimum. If that trace is negative the
    // zero operator is the better (and always feasible) certificate.
    let tr_z = c * r as f64 - solve.upper;
    let (z_reduced, certified_min_lower) = if tr_z >= 0.0 {
        (
            ComplexMatrix::identity(r).scale(c).sub(&solve.dual).hermitize(),
            tr_z,
        )
    } else {
        (ComplexMatrix::zeros(r), 0.0)
    };
    let heavy = argmax_trace(&shifted);
    let (povm, z) = lift_solution(&reduction, dim, solve.povm, z_reduced, heavy);

    let primal = (sum_q - achieved_min).min(sum_q).max(0.0);
    let upper = (sum_q - certified_min_lower).clamp(primal, sum_q);
    let cert = certificate(primal, upper, z);
    Ok((primal, povm, cert))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn trine_directions() -> [Ket; 3] {
        [
            Ket::real_qubit(0.0),
            Ket::real_qubit(2.0 * PI / 3.0),
            Ket::real_qubit(-2.0 * PI / 3.0),
        ]
    }

    #[test]
    fn pair_examples() {
        let zero = Ket::basis(2, 0).outer();
        let plus = Ket::real_qubit(FRAC_PI_2).outer();
        assert!((ds_pair(&zero, &zero, 0.5, 0.5).unwrap() - 0.5).abs() < 1e-12);
        let one = Ket::basis(2, 1).outer();
        assert!((ds_pair(&zero, &one, 1.0, 1.0).unwrap() - 2.0).abs() < 1e-12);
        let v = ds_pair(&zero, &plus, 0.5, 0.5).unwrap();
        assert!((v - 0.8535533905932737).abs() < 1e-12);
        assert!(ds_pair(&zero, &plus, 0.0, 0.5).is_err());
    }

    #[test]
    fn pure_pair_examples() {
        let zero = Ket::basis(2, 0);
        let one = Ket::basis(2, 1);
        assert!((ds_pure_pair(&zero, &one, 0.5, 0.5).unwrap() - 1.0).abs() < 1e-12);
        assert!((ds_pure_pair(&zero, &zero, 0.5, 0.5).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn pure_pair_matches_eigenvalue_form_on_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..1000 {
            let a = sampling::random_ket(2, &mut rng);
            let b = sampling::random_ket(2, &mut rng);
            let w = sampling::random_weights(2, &mut rng);
            let closed = ds_pure_pair(&a, &b, w[0], w[1]).unwrap();
            let eig = ds_pair(&a.outer(), &b.outer(), w[0], w[1]).unwrap();
            assert!(
                (closed - eig).abs() < 1e-10,
                "closed {closed} vs eigenvalue {eig}"
            );
        }
    }

    #[test]
    fn qubit_pair_forms_agree() {
        // For qubit pure pairs the difference operator has at most one
        // positive eigenvalue, so sum-of-positives equals the max form.
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for _ in 0..200 {
            let a = sampling::random_ket(2, &mut rng);
            let b = sampling::random_ket(2, &mut rng);
            let w = sampling::random_weights(2, &mut rng);
            let diff = a.outer().scale(w[0]).sub(&b.outer().scale(w[1]));
            let sum_pos = linalg::sum_positive_eigenvalues(&diff).unwrap();
            let max_eig = linalg::max_eigenvalue(&diff).unwrap().max(0.0);
            assert!((sum_pos - max_eig).abs() < 1e-12);
        }
    }

    #[test]
    fn triple_checker_examples() {
        let [t1, t2, t3] = trine_directions();
        assert!(is_antidistinguishable_triple(&t1, &t2, &t3));

        let zero = Ket::basis(2, 0);
        let plus = Ket::real_qubit(FRAC_PI_2);
        // Repeating |+> forces the overlap sum above 1.
        assert!(!is_antidistinguishable_triple(
            &zero,
            &plus,
            &Ket::real_qubit(FRAC_PI_2)
        ));
        assert!(!is_antidistinguishable_triple(
            &zero,
            &plus,
            &Ket::real_qubit(PI / 3.0)
        ));
    }

    #[test]
    fn triple_checker_boundary_cases() {
        // {|0>, |1>, |+>}: overlap sum is exactly 1 with vanishing product;
        // excluded by assigning the |+> outcome zero mass.
        let zero = Ket::basis(2, 0);
        let one = Ket::basis(2, 1);
        let plus = Ket::real_qubit(FRAC_PI_2);
        assert!(is_antidistinguishable_triple(&zero, &one, &plus));
        // Repeated state orthogonal to the third member is also excludable.
        assert!(is_antidistinguishable_triple(&zero, &one, &one));
        assert!(!is_antidistinguishable_triple(&zero, &zero, &zero));
    }

    fn quick_budget() -> SearchBudget {
        SearchBudget::default().with_starts(4).with_steps(400)
    }

    #[test]
    fn general_solver_matches_pair_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        for trial in 0..20 {
            let d = if trial % 2 == 0 { 2 } else { 3 };
            let r1 = sampling::random_density(d, 1 + trial % d, &mut rng).unwrap();
            let r2 = sampling::random_density(d, d, &mut rng).unwrap();
            let w = sampling::random_weights(2, &mut rng);
            let ens = WeightedEnsemble::new(vec![r1.clone(), r2.clone()], w.clone()).unwrap();
            let (value, povm, cert) = ds_general(&ens, &quick_budget()).unwrap();
            let pair = ds_pair(&r1, &r2, w[0], w[1]).unwrap();
            assert!(
                (value - pair).abs() < 1e-8,
                "trial {trial}: general {value} vs pair {pair}"
            );
            assert!(cert.gap <= 1e-6, "trial {trial}: gap {}", cert.gap);
            let mut total = ComplexMatrix::zeros(d);
            for m in &povm {
                total = total.add(m);
            }
            let (dev, _) = total.deviation_from_identity();
            assert!(dev < 1e-8);
        }
    }

    #[test]
    fn trine_triple_distinguishability_value() {
        // Symmetric qubit triple at equal weights 1/3: the square-root
        // measurement is optimal and the value is 2/3.
        let [t1, t2, t3] = trine_directions();
        let ens =
            WeightedEnsemble::from_pure(&[t1, t2, t3], &[1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0])
                .unwrap();
        let (value, _, cert) = ds_general(&ens, &quick_budget()).unwrap();
        assert!((value - 2.0 / 3.0).abs() < 1e-9, "value {value}");
        assert!(cert.gap <= 1e-9, "gap {}", cert.gap);
    }

    #[test]
    fn trine_triple_matches_brute_force() {
        let [t1, t2, t3] = trine_directions();
        let ens =
            WeightedEnsemble::from_pure(&[t1, t2, t3], &[1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0])
                .unwrap();
        let (value, _, _) = ds_general(&ens, &quick_budget()).unwrap();
        let ops = ens.scaled_ops();
        let budget = SearchBudget::default().with_starts(4).with_steps(600);
        let (brute, _) = optimize::maximize_over_povms(
            move |m: &[ComplexMatrix]| {
                ops.iter().zip(m).map(|(g, mk)| g.trace_product_re(mk)).sum()
            },
            2,
            3,
            &budget,
            &[],
        )
        .unwrap();
        assert!((value - brute).abs() < 1e-4, "solver {value} vs brute {brute}");
    }

    #[test]
    fn orthogonal_ensembles_are_perfect() {
        let kets: Vec<Ket> = (0..3).map(|k| Ket::basis(3, k)).collect();
        let weights = vec![0.7, 0.21, 1.3];
        let ens = WeightedEnsemble::from_pure(&kets, &weights).unwrap();
        let (value, _, cert) = ds_general(&ens, &quick_budget()).unwrap();
        let total: f64 = weights.iter().sum();
        assert!((value - total).abs() < 1e-9);
        assert!(cert.gap <= 1e-9);
    }

    #[test]
    fn exclusion_matches_pair_form_for_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        for trial in 0..15 {
            let a = sampling::random_ket(2, &mut rng);
            let b = sampling::random_ket(2, &mut rng);
            let w = sampling::random_weights(2, &mut rng);
            let ens = WeightedEnsemble::from_pure(&[a.clone(), b.clone()], &w).unwrap();
            let (value, _, cert) = as_general(&ens, &quick_budget()).unwrap();
            let pair = ds_pair(&a.outer(), &b.outer(), w[0], w[1]).unwrap();
            assert!(
                (value - pair).abs() < 1e-8,
                "trial {trial}: exclusion {value} vs pair {pair}"
            );
            assert!(cert.gap <= 1e-6);
        }
    }

    #[test]
    fn trine_triple_is_perfectly_excludable() {
        let [t1, t2, t3] = trine_directions();
        let ens = WeightedEnsemble::from_pure(&[t1, t2, t3], &[0.5, 0.5, 0.5]).unwrap();
        let (value, povm, cert) = as_general(&ens, &quick_budget()).unwrap();
        assert!((value - 1.5).abs() < 1e-9, "value {value}");
        assert!(cert.gap <= 1e-9);
        let mut total = ComplexMatrix::zeros(2);
        for m in &povm {
            total = total.add(m);
        }
        let (dev, _) = total.deviation_from_identity();
        assert!(dev < 1e-9);
    }

    #[test]
    fn non_excludable_triple_stays_below_total_weight() {
        let zero = Ket::basis(2, 0);
        let plus = Ket::real_qubit(FRAC_PI_2);
        let nu = Ket::real_qubit(PI / 3.0);
        assert!(!is_antidistinguishable_triple(&zero, &plus, &nu));
        let ens = WeightedEnsemble::from_pure(&[zero, plus, nu], &[0.4, 0.3, 0.3]).unwrap();
        let (value, _, cert) = as_general(&ens, &quick_budget()).unwrap();
        assert!(value < ens.weight_sum() - 1e-6, "value {value}");
        assert!(cert.gap <= 1e-6);
    }

    #[test]
    fn exclusion_agrees_with_triple_checker_on_random_triples() {
        let mut rng = ChaCha8Rng::seed_from_u64(59);
        let budget = quick_budget();
        for trial in 0..60 {
            let kets: Vec<Ket> = (0..3).map(|_| sampling::random_ket(2, &mut rng)).collect();
            let claimed = is_antidistinguishable_triple(&kets[0], &kets[1], &kets[2]);
            let w = sampling::random_weights(3, &mut rng);
            let ens = WeightedEnsemble::from_pure(&kets, &w).unwrap();
            let (value, _, _) = as_general(&ens, &budget).unwrap();
            let perfect = value >= ens.weight_sum() - tol::PERFECT;
            assert_eq!(
                claimed, perfect,
                "trial {trial}: checker {claimed}, solver reached {value} of {}",
                ens.weight_sum()
            );
        }
    }

    #[test]
    fn certificates_are_sound_on_random_ensembles() {
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        let budget = quick_budget();
        for trial in 0..24 {
            let d = 2 + trial % 3;
            let n = 2 + trial % 3;
            let states: Vec<ComplexMatrix> = (0..n)
                .map(|i| sampling::random_density(d, 1 + i % d, &mut rng).unwrap())
                .collect();
            let w = sampling::random_weights(n, &mut rng);
            let ens = WeightedEnsemble::new(states, w).unwrap();

            let (dv, _, dc) = ds_general(&ens, &budget).unwrap();
            assert!(dv <= dc.dual_upper_bound + 1e-9, "trial {trial} ds");
            assert!(dc.gap <= 1e-6, "trial {trial} ds gap {}", dc.gap);
            assert!(dv <= ens.weight_sum() + 1e-12);
            let max_w = ens.weights().iter().cloned().fold(0.0, f64::max);
            assert!(dv >= max_w - 1e-12, "trial {trial}: {dv} < {max_w}");

            let (av, _, ac) = as_general(&ens, &budget).unwrap();
            assert!(av <= ac.dual_upper_bound + 1e-9, "trial {trial} as");
            assert!(ac.gap <= 1e-6, "trial {trial} as gap {}", ac.gap);
            assert!((0.0..=ens.weight_sum() + 1e-12).contains(&av));
        }
    }

    #[test]
    fn dual_operator_is_feasible() {
        let mut rng = ChaCha8Rng::seed_from_u64(67);
        let budget = quick_budget();
        let states: Vec<ComplexMatrix> = (0..3)
            .map(|_| sampling::random_density(2, 2, &mut rng).unwrap())
            .collect();
        let w = sampling::random_weights(3, &mut rng);
        let ens = WeightedEnsemble::new(states.clone(), w.clone()).unwrap();

        let (_, _, dc) = ds_general(&ens, &budget).unwrap();
        for (s, &q) in states.iter().zip(&w) {
            let slack = dc.dual_operator.sub(&s.scale(q));
            let min_eig = linalg::herm_eigs(&slack.hermitize()).unwrap().0[0];
            assert!(min_eig > -1e-8, "Y - q rho has eigenvalue {min_eig}");
        }

        let (_, _, ac) = as_general(&ens, &budget).unwrap();
        for (s, &q) in states.iter().zip(&w) {
            let slack = s.scale(q).sub(&ac.dual_operator);
            let min_eig = linalg::herm_eigs(&slack.hermitize()).unwrap().0[0];
            assert!(min_eig > -1e-8, "q rho - Z has eigenvalue {min_eig}");
        }
    }

    #[test]
    fn zero_weight_members_are_dropped() {
        let zero = Ket::basis(2, 0);
        let plus = Ket::real_qubit(FRAC_PI_2);
        let ens = WeightedEnsemble::from_pure(&[zero, plus], &[0.7, 0.0]).unwrap();
        assert_eq!(ens.len(), 1);
        assert!(WeightedEnsemble::from_pure(
            &[Ket::basis(2, 0)],
            &[-0.1]
        )
        .is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn scaling_is_linear(seed in 0u64..1000, scale in 0.1f64..5.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = sampling::random_ket(2, &mut rng);
            let b = sampling::random_ket(2, &mut rng);
            let w = sampling::random_weights(2, &mut rng);
            let base = ds_pair(&a.outer(), &b.outer(), w[0], w[1]).unwrap();
            let scaled = ds_pair(&a.outer(), &b.outer(), scale * w[0], scale * w[1]).unwrap();
            prop_assert!((scaled - scale * base).abs() < 1e-9 * (1.0 + scale));
        }

        #[test]
        fn pair_value_within_bounds(seed in 0u64..1000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = sampling::random_density(3, 2, &mut rng).unwrap();
            let b = sampling::random_density(3, 3, &mut rng).unwrap();
            let w = sampling::random_weights(2, &mut rng);
            let v = ds_pair(&a, &b, w[0], w[1]).unwrap();
            let max_w = w[0].max(w[1]);
            prop_assert!(v >= max_w - 1e-12);
            prop_assert!(v <= w[0] + w[1] + 1e-12);
        }
    }
}
