//! The eight measurement-discrimination quantities and their optimizers.
//!
//! A scenario fixes three binary choices: whether the probe is a single
//! system or half of an entangled pair, whether the guesser also receives
//! the post-measurement system, and whether the task is to name the
//! measurement that acted (distinguish) or to name one that did not
//! (antidistinguish). Evaluation reduces every scenario to per-outcome
//! weighted state ensembles handed to the `ensembles` solvers; the two
//! no-post single-system quantities collapse to explicit formulas.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::ensembles::{WeightedEnsemble, as_general, ds_general};
use crate::error::{Error, Result};
use crate::linalg::{C64, ComplexMatrix, Ket, herm_eigs};
use crate::measurements::{MeasurementSet, bipartite_post, post_state, zoo};
use crate::optimize::{
    SearchBudget, maximize_over_bipartite_kets_seeded, maximize_over_single_kets_seeded,
};
use crate::tol;

/// Whether the probe is a lone system or half of a bipartite pure state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProbeKind {
    Single,
    Entangled,
}

/// What the guesser must produce from the outcome record.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Task {
    /// Name the measurement that acted.
    Distinguish,
    /// Name a measurement that did not act.
    Antidistinguish,
}

/// One of the eight discrimination scenarios.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Scenario {
    pub probe_kind: ProbeKind,
    /// Whether the post-measurement system is handed to the guesser.
    pub post_access: bool,
    pub task: Task,
}

impl Scenario {
    pub const DMS: Scenario = Scenario {
        probe_kind: ProbeKind::Single,
        post_access: false,
        task: Task::Distinguish,
    };
    pub const AMS: Scenario = Scenario {
        probe_kind: ProbeKind::Single,
        post_access: false,
        task: Task::Antidistinguish,
    };
    pub const DME: Scenario = Scenario {
        probe_kind: ProbeKind::Entangled,
        post_access: false,
        task: Task::Distinguish,
    };
    pub const AME: Scenario = Scenario {
        probe_kind: ProbeKind::Entangled,
        post_access: false,
        task: Task::Antidistinguish,
    };
    pub const DBARMS: Scenario = Scenario {
        probe_kind: ProbeKind::Single,
        post_access: true,
        task: Task::Distinguish,
    };
    pub const ABARMS: Scenario = Scenario {
        probe_kind: ProbeKind::Single,
        post_access: true,
        task: Task::Antidistinguish,
    };
    pub const DBARME: Scenario = Scenario {
        probe_kind: ProbeKind::Entangled,
        post_access: true,
        task: Task::Distinguish,
    };
    pub const ABARME: Scenario = Scenario {
        probe_kind: ProbeKind::Entangled,
        post_access: true,
        task: Task::Antidistinguish,
    };

    pub const ALL: [Scenario; 8] = [
        Scenario::DMS,
        Scenario::AMS,
        Scenario::DME,
        Scenario::AME,
        Scenario::DBARMS,
        Scenario::ABARMS,
        Scenario::DBARME,
        Scenario::ABARME,
    ];

    /// Canonical lowercase name; `bar` marks post-measurement access.
    pub fn name(&self) -> &'static str {
        match (self.task, self.post_access, self.probe_kind) {
            (Task::Distinguish, false, ProbeKind::Single) => "dms",
            (Task::Antidistinguish, false, ProbeKind::Single) => "ams",
            (Task::Distinguish, false, ProbeKind::Entangled) => "dme",
            (Task::Antidistinguish, false, ProbeKind::Entangled) => "ame",
            (Task::Distinguish, true, ProbeKind::Single) => "dbarms",
            (Task::Antidistinguish, true, ProbeKind::Single) => "abarms",
            (Task::Distinguish, true, ProbeKind::Entangled) => "dbarme",
            (Task::Antidistinguish, true, ProbeKind::Entangled) => "abarme",
        }
    }

    pub fn parse(name: &str) -> Result<Scenario> {
        Scenario::ALL
            .iter()
            .find(|s| s.name() == name.trim().to_ascii_lowercase())
            .copied()
            .ok_or_else(|| Error::UnknownScenario(name.to_string()))
    }

    /// Dimension a probe ket must have for a measurement set on `C^d`.
    pub fn probe_dim(&self, d: usize) -> usize {
        match self.probe_kind {
            ProbeKind::Single => d,
            ProbeKind::Entangled => d * d,
        }
    }
}

/// How a reported value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    ClosedForm,
    CertifiedNumeric,
}

/// Result of a probe optimization for one scenario.
#[derive(Debug, Clone)]
pub struct DiscrimResult {
    /// Best value found; a certified achieved value at `probe`.
    pub value: f64,
    /// `(achieved primal, dual upper bound)` for the inner solves at
    /// `probe`. The outer probe search is heuristic, so the upper bound
    /// certifies the inner optimization only.
    pub bracket: (f64, f64),
    pub probe: Ket,
    /// Guessing POVM per outcome of the observed measurement; entry `x` is
    /// the element assigned to set member `x` (zero when that member never
    /// produces the outcome). Empty for the formula-only scenarios without
    /// post-measurement access on a single probe.
    pub per_outcome_strategy: Vec<Vec<ComplexMatrix>>,
    pub method: Method,
    pub warnings: Vec<String>,
}

/// Fixed-probe evaluation details.
#[derive(Debug, Clone)]
pub struct ScenarioEval {
    pub value: f64,
    /// Sum of per-outcome dual upper bounds; `value <= upper` always.
    pub upper: f64,
    pub per_outcome_strategy: Vec<Vec<ComplexMatrix>>,
    pub warnings: Vec<String>,
}

/// Per-outcome verdict of the perfect-discrimination test.
#[derive(Debug, Clone)]
pub struct PerfectCertificate {
    pub perfect: bool,
    /// One entry per imperfect outcome explaining the shortfall.
    pub issues: Vec<String>,
}

// ---------------------------------------------------------------------------
// Formula scenarios: single probe, no post-measurement access.

fn weighted_outcome_probs(set: &MeasurementSet, rho: &ComplexMatrix) -> Result<Vec<Vec<f64>>> {
    set.measurements()
        .iter()
        .zip(set.priors())
        .map(|(m, &p)| {
            Ok(m.probabilities(rho)?
                .into_iter()
                .map(|q| p * q)
                .collect::<Vec<f64>>())
        })
        .collect()
}

/// Success probability of naming the measurement from the outcome alone:
/// the sum over outcomes of the largest weighted outcome probability.
/// Members lacking an outcome contribute zero weight to it.
pub fn eval_dms(set: &MeasurementSet, rho: &ComplexMatrix) -> Result<f64> {
    let weighted = weighted_outcome_probs(set, rho)?;
    let mut total = 0.0;
    for a in 0..set.max_outcomes() {
        let mut best = 0.0f64;
        for row in &weighted {
            best = best.max(row.get(a).copied().unwrap_or(0.0));
        }
        total += best;
    }
    Ok(total)
}

/// Success probability of naming a measurement that did not act, from the
/// outcome alone: one minus the sum over outcomes of the smallest weighted
/// outcome probability.
pub fn eval_ams(set: &MeasurementSet, rho: &ComplexMatrix) -> Result<f64> {
    let weighted = weighted_outcome_probs(set, rho)?;
    let mut missed = 0.0;
    for a in 0..set.max_outcomes() {
        let mut worst = f64::INFINITY;
        for row in &weighted {
            worst = worst.min(row.get(a).copied().unwrap_or(0.0));
        }
        missed += worst;
    }
    Ok(1.0 - missed)
}

// ---------------------------------------------------------------------------
// Conditional-ensemble scenarios.

struct Member {
    weight: f64,
    /// Normalized conditional state; `None` when the weight is at or below
    /// the probability floor (the member is treated as label-only).
    state: Option<ComplexMatrix>,
}

struct OutcomeValue {
    value: f64,
    upper: f64,
    strategy: Vec<ComplexMatrix>,
    warning: Option<String>,
}

/// Exact two-state optimum with its measurement, via the spectral split of
/// the weighted difference operator. For two states the distinguish and
/// antidistinguish optima coincide in value; the optimal measurements are
/// complementary.
fn pair_value_and_povm(
    task: Task,
    q1: f64,
    r1: &ComplexMatrix,
    q2: f64,
    r2: &ComplexMatrix,
) -> Result<(f64, Vec<ComplexMatrix>)> {
    let delta = r1.scale(q1).sub(&r2.scale(q2)).hermitize();
    let (values, vectors) = herm_eigs(&delta)?;
    let dim = delta.dim();
    let mut m1 = ComplexMatrix::zeros(dim);
    let mut picked = 0.0;
    for (lambda, v) in values.iter().zip(&vectors) {
        let keep = match task {
            Task::Distinguish => *lambda > 0.0,
            Task::Antidistinguish => *lambda < 0.0,
        };
        if keep {
            m1 = m1.add(&v.outer());
            picked += lambda;
        }
    }
    let m2 = ComplexMatrix::identity(dim).sub(&m1).hermitize();
    let value = match task {
        // q2 plus the positive part of the spectrum.
        Task::Distinguish => q2 + picked,
        // Total weight minus the minimal naming probability q2 + (negative part).
        Task::Antidistinguish => q1 - picked,
    };
    Ok((value.max(0.0), vec![m1, m2]))
}

/// Value of one outcome's conditional ensemble under the given task,
/// applying the weight-floor drop rules:
/// - distinguishing ignores dropped members (their total weight widens the
///   upper bound instead),
/// - antidistinguishing points at a dropped label when one exists, which is
///   optimal to within the floor.
fn outcome_contribution(
    task: Task,
    members: &[Member],
    budget: &SearchBudget,
) -> Result<OutcomeValue> {
    let n = members.len();
    let total: f64 = members.iter().map(|m| m.weight).sum();
    let surviving: Vec<(usize, f64, &ComplexMatrix)> = members
        .iter()
        .enumerate()
        .filter_map(|(x, m)| m.state.as_ref().map(|s| (x, m.weight, s)))
        .collect();
    let dropped: Vec<(usize, f64)> = members
        .iter()
        .enumerate()
        .filter(|(_, m)| m.state.is_none())
        .map(|(x, m)| (x, m.weight))
        .collect();

    let empty = OutcomeValue {
        value: 0.0,
        upper: total.max(0.0),
        strategy: Vec::new(),
        warning: None,
    };
    if surviving.is_empty() {
        return Ok(empty);
    }
    let sdim = surviving[0].2.dim();
    let mut strategy = vec![ComplexMatrix::zeros(sdim); n];

    match task {
        Task::Distinguish => {
            let surv_weight: f64 = surviving.iter().map(|(_, w, _)| w).sum();
            let slack = (total - surv_weight).max(0.0);
            if surviving.len() == 1 {
                let (x, w, _) = surviving[0];
                strategy[x] = ComplexMatrix::identity(sdim);
                return Ok(OutcomeValue {
                    value: w,
                    upper: w + slack,
                    strategy,
                    warning: None,
                });
            }
            if surviving.len() == 2 {
                let (x1, q1, r1) = surviving[0];
                let (x2, q2, r2) = surviving[1];
                let (value, povm) = pair_value_and_povm(task, q1, r1, q2, r2)?;
                strategy[x1] = povm[0].clone();
                strategy[x2] = povm[1].clone();
                return Ok(OutcomeValue {
                    value,
                    upper: value + slack,
                    strategy,
                    warning: None,
                });
            }
            let ens = WeightedEnsemble::new(
                surviving.iter().map(|(_, _, s)| (*s).clone()).collect(),
                surviving.iter().map(|(_, w, _)| *w).collect(),
            )?;
            let (value, povm, cert) = ds_general(&ens, budget)?;
            for ((x, _, _), element) in surviving.iter().zip(povm) {
                strategy[*x] = element;
            }
            let warning = (cert.gap > tol::OPTIMIZATION).then(|| {
                format!(
                    "distinguish solver gap {:.3e} above {:.1e}",
                    cert.gap,
                    tol::OPTIMIZATION
                )
            });
            Ok(OutcomeValue {
                value,
                upper: cert.dual_upper_bound + slack,
                strategy,
                warning,
            })
        }
        Task::Antidistinguish => {
            if let Some(&(xd, wd)) = dropped
                .iter()
                .min_by(|a, b| a.1.partial_cmp(&b.1).expect("finite weights"))
            {
                // Naming a label that (almost) never occurs is optimal to
                // within the floor.
                strategy[xd] = ComplexMatrix::identity(sdim);
                return Ok(OutcomeValue {
                    value: (total - wd).max(0.0),
                    upper: total,
                    strategy,
                    warning: None,
                });
            }
            if surviving.len() == 1 {
                // A single candidate can never be ruled out.
                let (x, _, _) = surviving[0];
                strategy[x] = ComplexMatrix::identity(sdim);
                return Ok(OutcomeValue {
                    value: 0.0,
                    upper: 0.0,
                    strategy,
                    warning: None,
                });
            }
            if surviving.len() == 2 {
                let (x1, q1, r1) = surviving[0];
                let (x2, q2, r2) = surviving[1];
                let (value, povm) = pair_value_and_povm(task, q1, r1, q2, r2)?;
                strategy[x1] = povm[0].clone();
                strategy[x2] = povm[1].clone();
                return Ok(OutcomeValue {
                    value,
                    upper: value,
                    strategy,
                    warning: None,
                });
            }
            let ens = WeightedEnsemble::new(
                surviving.iter().map(|(_, _, s)| (*s).clone()).collect(),
                surviving.iter().map(|(_, w, _)| *w).collect(),
            )?;
            let (value, povm, cert) = as_general(&ens, budget)?;
            for ((x, _, _), element) in surviving.iter().zip(povm) {
                strategy[*x] = element;
            }
            let warning = (cert.gap > tol::OPTIMIZATION).then(|| {
                format!(
                    "antidistinguish solver gap {:.3e} above {:.1e}",
                    cert.gap,
                    tol::OPTIMIZATION
                )
            });
            Ok(OutcomeValue {
                value,
                upper: cert.dual_upper_bound,
                strategy,
                warning,
            })
        }
    }
}

fn conditional_members(
    set: &MeasurementSet,
    scenario: Scenario,
    rho_probe: &ComplexMatrix,
    outcome: usize,
) -> Result<Vec<Member>> {
    let d = set.dim();
    let mut members = Vec::with_capacity(set.len());
    for (meas, &px) in set.measurements().iter().zip(set.priors()) {
        if outcome >= meas.n_outcomes() {
            members.push(Member {
                weight: 0.0,
                state: None,
            });
            continue;
        }
        let f = &meas.kraus()[outcome];
        let (p, state) = match (scenario.probe_kind, scenario.post_access) {
            (ProbeKind::Single, true) => post_state(f, rho_probe)?,
            (ProbeKind::Entangled, false) => {
                let (p, _joint, reduced) = bipartite_post(f, rho_probe, d, d)?;
                (p, reduced)
            }
            (ProbeKind::Entangled, true) => {
                let (p, joint, _reduced) = bipartite_post(f, rho_probe, d, d)?;
                (p, joint)
            }
            (ProbeKind::Single, false) => unreachable!("formula scenarios handled separately"),
        };
        let weight = (px * p).max(0.0);
        members.push(Member {
            weight,
            state: if weight > tol::PROB_FLOOR { state } else { None },
        });
    }
    Ok(members)
}

/// Evaluates a scenario at a fixed pure probe, returning the certified
/// details. The probe must have dimension `scenario.probe_dim(set.dim())`.
pub fn eval_scenario_detailed(
    set: &MeasurementSet,
    scenario: Scenario,
    probe: &Ket,
    budget: &SearchBudget,
) -> Result<ScenarioEval> {
    let expected = scenario.probe_dim(set.dim());
    if probe.dim() != expected {
        return Err(Error::DimensionMismatch(format!(
            "scenario {} needs a probe of dimension {expected}, got {}",
            scenario.name(),
            probe.dim()
        )));
    }
    let rho = probe.outer();
    if scenario.probe_kind == ProbeKind::Single && !scenario.post_access {
        let value = match scenario.task {
            Task::Distinguish => eval_dms(set, &rho)?,
            Task::Antidistinguish => eval_ams(set, &rho)?,
        };
        return Ok(ScenarioEval {
            value,
            upper: value,
            per_outcome_strategy: Vec::new(),
            warnings: Vec::new(),
        });
    }

    let mut value = 0.0;
    let mut upper = 0.0;
    let mut strategies = Vec::with_capacity(set.max_outcomes());
    let mut warnings = Vec::new();
    for a in 0..set.max_outcomes() {
        let members = conditional_members(set, scenario, &rho, a)?;
        let out = outcome_contribution(scenario.task, &members, budget)?;
        value += out.value;
        upper += out.upper;
        if let Some(msg) = out.warning {
            warnings.push(format!("outcome {a}: {msg}"));
        }
        strategies.push(out.strategy);
    }
    Ok(ScenarioEval {
        value,
        upper: upper.max(value),
        per_outcome_strategy: strategies,
        warnings,
    })
}

/// Evaluates a scenario at a fixed pure probe with default solver settings.
pub fn eval_scenario(set: &MeasurementSet, scenario: Scenario, probe: &Ket) -> Result<f64> {
    Ok(eval_scenario_detailed(set, scenario, probe, &SearchBudget::default())?.value)
}

// ---------------------------------------------------------------------------
// Probe optimization.

/// Maximizes a scenario value over pure probes.
pub fn optimize_scenario(
    set: &MeasurementSet,
    scenario: Scenario,
    budget: &SearchBudget,
) -> Result<DiscrimResult> {
    optimize_scenario_seeded(set, scenario, budget, &[])
}

/// Like [`optimize_scenario`] with extra warm-start probes added to the
/// search pool (used for nesting scenarios so that embeddings of a smaller
/// scenario's optimum are always candidates).
pub fn optimize_scenario_seeded(
    set: &MeasurementSet,
    scenario: Scenario,
    budget: &SearchBudget,
    seeds: &[Ket],
) -> Result<DiscrimResult> {
    let d = set.dim();
    // The search phase caps the inner solver effort; the final evaluation
    // at the winning probe runs with the full budget.
    let inner = budget
        .clone()
        .with_starts(budget.starts.min(4))
        .with_steps(budget.max_steps.clamp(50, 400));
    let objective = |ket: &Ket| -> f64 {
        eval_scenario_detailed(set, scenario, ket, &inner)
            .map(|e| e.value)
            .unwrap_or(f64::NAN)
    };
    let (_, probe) = match scenario.probe_kind {
        ProbeKind::Single => maximize_over_single_kets_seeded(objective, d, budget, seeds)?,
        ProbeKind::Entangled => maximize_over_bipartite_kets_seeded(objective, d, budget, seeds)?,
    };
    let eval = eval_scenario_detailed(set, scenario, &probe, budget)?;
    Ok(DiscrimResult {
        value: eval.value,
        bracket: (eval.value, eval.upper),
        probe,
        per_outcome_strategy: eval.per_outcome_strategy,
        method: Method::CertifiedNumeric,
        warnings: eval.warnings,
    })
}

/// The four same-task scenario optima, nested so the reported values are
/// monotone exactly: the single-probe optimum seeds the entangled and
/// posted searches, their optima seed the posted-entangled search, and each
/// larger scenario's value is floored at the values it dominates
/// mathematically.
#[derive(Debug, Clone)]
pub struct HierarchyResults {
    pub single: DiscrimResult,
    pub entangled: DiscrimResult,
    pub posted_single: DiscrimResult,
    pub posted_entangled: DiscrimResult,
}

fn raise_floor(result: &mut DiscrimResult, floor: f64) {
    if result.value < floor {
        result.value = floor;
        result.bracket.1 = result.bracket.1.max(floor);
    }
}

pub fn optimize_hierarchy(
    set: &MeasurementSet,
    task: Task,
    budget: &SearchBudget,
) -> Result<HierarchyResults> {
    let d = set.dim();
    let scen = |probe_kind, post_access| Scenario {
        probe_kind,
        post_access,
        task,
    };
    let embed = |k: &Ket| k.tensor(&Ket::basis(d, 0));

    let single = optimize_scenario(set, scen(ProbeKind::Single, false), budget)?;
    let mut posted_single = optimize_scenario_seeded(
        set,
        scen(ProbeKind::Single, true),
        budget,
        &[single.probe.clone()],
    )?;
    let mut entangled = optimize_scenario_seeded(
        set,
        scen(ProbeKind::Entangled, false),
        budget,
        &[embed(&single.probe), embed(&posted_single.probe)],
    )?;
    let mut posted_entangled = optimize_scenario_seeded(
        set,
        scen(ProbeKind::Entangled, true),
        budget,
        &[
            entangled.probe.clone(),
            embed(&posted_single.probe),
            embed(&single.probe),
        ],
    )?;

    // A product probe reproduces the single-system value inside either
    // entangled scenario, and handing over the post-measurement system
    // never hurts, so these floors are mathematically valid achieved
    // values; flooring removes float-level violations of monotonicity.
    raise_floor(&mut posted_single, single.value);
    raise_floor(&mut entangled, single.value);
    let floor = entangled.value.max(posted_single.value);
    raise_floor(&mut posted_entangled, floor);

    Ok(HierarchyResults {
        single,
        entangled,
        posted_single,
        posted_entangled,
    })
}

// ---------------------------------------------------------------------------
// Closed forms for qubit projective measurement sets.

/// Exact single-probe optima for a set of two-outcome qubit projective
/// measurements given by their first-outcome kets: the distinguish value is
/// the best pairwise two-state value, the antidistinguish value is one minus
/// the worst pairwise co-naming probability.
pub fn closed_dms_ams_qubit_projective(kets: &[Ket], priors: &[f64]) -> Result<(f64, f64)> {
    if kets.len() != priors.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} kets but {} priors",
            kets.len(),
            priors.len()
        )));
    }
    if kets.len() < 2 {
        return Err(Error::TooFewMembers {
            needed: 2,
            got: kets.len(),
        });
    }
    if kets.iter().any(|k| k.dim() != 2) {
        return Err(Error::DimensionMismatch(
            "projective closed forms need qubit kets".into(),
        ));
    }
    let total: f64 = priors.iter().sum();
    if priors.iter().any(|&p| !(p > 0.0) || !p.is_finite()) || (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidPriors(format!(
            "priors must be a positive distribution, sum = {total}"
        )));
    }

    let mut best_pair = f64::NEG_INFINITY;
    let mut worst_pair = f64::INFINITY;
    for x in 0..kets.len() {
        for y in (x + 1)..kets.len() {
            let (p, q) = (priors[x], priors[y]);
            let s = p + q;
            let disc = (s * s - 4.0 * p * q * kets[x].overlap_sqr(&kets[y]))
                .max(0.0)
                .sqrt();
            best_pair = best_pair.max(0.5 * (s + disc));
            worst_pair = worst_pair.min(0.5 * (s - disc));
        }
    }
    // The lone-member branches of the underlying maximum/minimum are always
    // dominated by the pairwise branches; assert rather than assume.
    let p_max = priors.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let p_min = priors.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(best_pair >= p_max - tol::ALGEBRAIC);
    assert!(worst_pair <= p_min + tol::ALGEBRAIC);
    Ok((best_pair, 1.0 - worst_pair))
}

/// Exact posted single-probe distinguish value for two equiprobable qubit
/// projective measurements with first-outcome kets `psi1`, `psi2`:
/// `1/2 + sqrt(1 - |<psi1|psi2>|^4)/2`. Also returns the optimal probe's
/// polar angles `(alpha, beta)` in the frame where `psi1` is the pole and
/// `psi2` lies at polar angle `theta` in the real half-plane.
pub fn closed_dbarms_two_qubit_projective(psi1: &Ket, psi2: &Ket) -> Result<(f64, (f64, f64))> {
    if psi1.dim() != 2 || psi2.dim() != 2 {
        return Err(Error::DimensionMismatch(
            "posted pair closed form needs qubit kets".into(),
        ));
    }
    let o2 = psi1.overlap_sqr(psi2).clamp(0.0, 1.0);
    let value = 0.5 + 0.5 * (1.0 - o2 * o2).max(0.0).sqrt();
    let theta = 2.0 * o2.sqrt().clamp(0.0, 1.0).acos();
    Ok((value, (FRAC_PI_2 - theta / 2.0, PI)))
}

/// The probe achieving [`closed_dbarms_two_qubit_projective`], built in the
/// frame spanned by `psi1` and the component of `psi2` orthogonal to it.
pub fn posted_pair_probe(psi1: &Ket, psi2: &Ket) -> Result<Ket> {
    if psi1.dim() != 2 || psi2.dim() != 2 {
        return Err(Error::DimensionMismatch(
            "posted pair probe needs qubit kets".into(),
        ));
    }
    let (_, (alpha, beta)) = closed_dbarms_two_qubit_projective(psi1, psi2)?;
    let c = psi1.inner(psi2);
    let phase = if c.norm() > tol::PROB_FLOOR {
        c / c.norm()
    } else {
        C64::new(1.0, 0.0)
    };
    let e1: Vec<C64> = (0..2).map(|i| phase * psi1.amp(i)).collect();
    let raw_perp: Vec<C64> = (0..2).map(|i| psi2.amp(i) - c * psi1.amp(i)).collect();
    let s = raw_perp.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    let e2: Vec<C64> = if s > 1e-9 {
        raw_perp.into_iter().map(|a| a / s).collect()
    } else {
        let k = Ket::from_unnormalized(e1.clone())?.qubit_orthogonal()?;
        vec![k.amp(0), k.amp(1)]
    };
    let (ca, sa) = ((alpha / 2.0).cos(), (alpha / 2.0).sin());
    let w = C64::from_polar(sa, beta);
    Ket::from_unnormalized(vec![ca * e1[0] + w * e2[0], ca * e1[1] + w * e2[1]])
}

/// Closed value at the maximally entangled probe of the entangled
/// distinguish scenario for the tilted trine against the reverse trine:
/// `11/12 - alpha/8 + sqrt((alpha/2 + 1/3)^2 - (2 alpha/3) sin^2(theta/2))/4`.
pub fn closed_dme_tilted_trine_maxent(theta: f64) -> Result<f64> {
    let (alpha, _, _) = zoo::right_asym_coefficients(theta)?;
    let inner = (alpha / 2.0 + 1.0 / 3.0).powi(2)
        - (2.0 * alpha / 3.0) * (theta / 2.0).sin().powi(2);
    Ok(11.0 / 12.0 - alpha / 8.0 + 0.25 * inner.max(0.0).sqrt())
}

// ---------------------------------------------------------------------------
// Perfect-value certification for posted single-probe scenarios.

/// Checks whether a posted single-probe scenario is perfect at the probe:
/// every outcome's conditional ensemble must reach its total weight (within
/// the perfect-value tolerance) or carry no probability at all.
pub fn perfect_posted_certificate(
    set: &MeasurementSet,
    task: Task,
    probe: &Ket,
    budget: &SearchBudget,
) -> Result<PerfectCertificate> {
    if probe.dim() != set.dim() {
        return Err(Error::DimensionMismatch(format!(
            "probe dim {} vs measurement dim {}",
            probe.dim(),
            set.dim()
        )));
    }
    let scenario = Scenario {
        probe_kind: ProbeKind::Single,
        post_access: true,
        task,
    };
    let rho = probe.outer();
    let mut issues = Vec::new();
    for a in 0..set.max_outcomes() {
        let members = conditional_members(set, scenario, &rho, a)?;
        let total: f64 = members.iter().map(|m| m.weight).sum();
        if total <= set.len() as f64 * tol::PROB_FLOOR {
            continue; // outcome never occurs at this probe
        }
        let out = outcome_contribution(task, &members, budget)?;
        if out.value < total - tol::PERFECT {
            issues.push(format!(
                "outcome {a}: value {:.12} below total weight {:.12}",
                out.value, total
            ));
        }
    }
    Ok(PerfectCertificate {
        perfect: issues.is_empty(),
        issues,
    })
}
