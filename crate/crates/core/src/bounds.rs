//! Closed-form results and the numeric sweeps they are checked against.
//!
//! Every named constant is re-derived from its defining equation by
//! bisection; nothing here is a transcribed decimal.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::ops::RangeInclusive;
use std::sync::OnceLock;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::roots::{bisect, first_root_in};
use crate::search_space::SearchSpace;
use crate::subspace::GrkEvaluator;

const XTOL: f64 = 1e-15;

/// Perturbation used to differentiate the optimality root with respect to γ.
const GAMMA_STEP: f64 = 1e-5;

/// Named constants of the partial-search bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundConstants {
    /// Minimiser of `f(α) = α - sin 2α` on `(0, π/4)`; equals `π/6`.
    pub f_argmin: f64,
    /// `f` at its minimiser, about `-0.3424`.
    pub f_min: f64,
    /// First-order advantage coefficient `-2 f_min`.
    pub epsilon: f64,
    /// GRK leading-order saving `-f_min`.
    pub c_grk: f64,
    /// Root of `1 - cos 4α - 4α sin 4α` in `(0, π/4)`.
    pub alpha0_lemma: f64,
    /// `dα/dγ` of the optimal query fraction at `γ = 0`.
    pub varepsilon_lemma: f64,
    /// `k_min / √N` for full Grover search in the large-`N` limit.
    pub grover_kmin_coeff: f64,
    /// Success probability at that `k_min`.
    pub grover_pr_at_kmin: f64,
    /// `E_min / √N` for full Grover search.
    pub grover_emin_coeff: f64,
    /// `√N` coefficient of the minimal expected iteration number.
    pub emin_sqrt_n_coeff: f64,
    /// `√b` coefficient of the minimal expected iteration number (negative).
    pub emin_sqrt_b_coeff: f64,
    /// The asymptotic branch loses to the few-blocks branch for
    /// `m > n/2 + crossover_offset`.
    pub crossover_offset: f64,
    /// Root `u` of `(1 + 2u) e^{-u} = 1`.
    pub saturation_root: f64,
    /// `E_min / √(N/l)` of outer parallel search as `l` grows.
    pub outer_coeff: f64,
    /// `k_min / √(N/n)` of hybrid search at `l = n`.
    pub hybrid_kmin_coeff: f64,
    /// Value of the two-QPU hybrid curve at `φ = π/4`, i.e. `2π/13`.
    pub hybrid_l2_floor: f64,
}

impl BoundConstants {
    /// Solves every defining equation from scratch.
    pub fn derive() -> Result<Self> {
        let f = |a: f64| a - (2.0 * a).sin();
        let f_argmin = bisect(|a| 1.0 - 2.0 * (2.0 * a).cos(), 0.0, FRAC_PI_4, XTOL)?;
        let f_min = f(f_argmin);
        let epsilon = -2.0 * f_min;

        let alpha0 = optimal_fraction(0.0, epsilon)?;
        let varepsilon = (optimal_fraction(GAMMA_STEP, epsilon)?
            - optimal_fraction(-GAMMA_STEP, epsilon)?)
            / (2.0 * GAMMA_STEP);

        // Full search: tan((2k+1)θ1) = 4θ1 k becomes tan y = 2y with y = 2k/√N.
        let y = first_root_in(|y| y.sin() - 2.0 * y * y.cos(), 0.1, FRAC_PI_2, 256, XTOL)?;
        let grover_kmin_coeff = y / 2.0;
        let grover_pr_at_kmin = y.sin().powi(2);
        let grover_emin_coeff = grover_kmin_coeff / grover_pr_at_kmin;

        let (s, c) = (2.0 * alpha0).sin_cos();
        let emin_sqrt_n_coeff = alpha0 / (s * s);
        let emin_sqrt_b_coeff =
            varepsilon / (s * s) - 2.0 * alpha0 * c * (2.0 * varepsilon + epsilon) / s.powi(3);

        let u = bisect(|u| (1.0 + 2.0 * u) * (-u).exp() - 1.0, 0.5, 3.0, XTOL)?;
        let outer_coeff = u.sqrt() / (2.0 * (1.0 - (-u).exp()));

        Ok(Self {
            f_argmin,
            f_min,
            epsilon,
            c_grk: -f_min,
            alpha0_lemma: alpha0,
            varepsilon_lemma: varepsilon,
            grover_kmin_coeff,
            grover_pr_at_kmin,
            grover_emin_coeff,
            emin_sqrt_n_coeff,
            emin_sqrt_b_coeff,
            crossover_offset: -emin_sqrt_n_coeff.log2(),
            saturation_root: u,
            outer_coeff,
            hybrid_kmin_coeff: u.sqrt() / 2.0,
            hybrid_l2_floor: hybrid_l2_curve(FRAC_PI_4),
        })
    }

    /// Process-wide instance, derived on first use.
    pub fn get() -> &'static Self {
        static CONSTANTS: OnceLock<BoundConstants> = OnceLock::new();
        CONSTANTS.get_or_init(|| Self::derive().expect("bound constants are well bracketed"))
    }
}

/// Stationarity condition of `α / (sin²2α + εγ sin 4α)`.
fn optimality_residual(alpha: f64, gamma: f64, epsilon: f64) -> f64 {
    let pr = (2.0 * alpha).sin().powi(2) + epsilon * gamma * (4.0 * alpha).sin();
    let d_pr = 2.0 * (4.0 * alpha).sin() + 4.0 * epsilon * gamma * (4.0 * alpha).cos();
    pr - alpha * d_pr
}

/// Optimal query fraction `α = k_tot / √N` for a given `γ`.
fn optimal_fraction(gamma: f64, epsilon: f64) -> Result<f64> {
    first_root_in(
        |a| optimality_residual(a, gamma, epsilon),
        0.1,
        FRAC_PI_4,
        256,
        XTOL,
    )
}

/// Residual of the zeroth-order optimality equation, `1 - cos 4α - 4α sin 4α`.
pub fn lemma_residual(alpha: f64) -> f64 {
    1.0 - (4.0 * alpha).cos() - 4.0 * alpha * (4.0 * alpha).sin()
}

/// Two-QPU hybrid curve `φ / (2(1 - (1 - sin⁴φ) cos⁴φ))`, in units of `√N`.
pub fn hybrid_l2_curve(phi: f64) -> f64 {
    phi / (2.0 * (1.0 - (1.0 - phi.sin().powi(4)) * phi.cos().powi(4)))
}

/// Minimum of [`hybrid_l2_curve`] on a uniform grid over `(0, π/2)`.
pub fn hybrid_l2_grid_minimum(points: usize) -> (f64, f64) {
    (1..points)
        .map(|i| {
            let phi = FRAC_PI_2 * i as f64 / points as f64;
            (phi, hybrid_l2_curve(phi))
        })
        .fold((f64::NAN, f64::INFINITY), |best, p| {
            if p.1 < best.1 {
                p
            } else {
                best
            }
        })
}

/// Continuous optimum of full Grover search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroverOptimum {
    pub k_min: f64,
    pub pr: f64,
    pub e_min: f64,
}

/// Solves `tan((2k+1)θ1) = 4θ1 k` for the expected-iteration minimiser of a
/// `2^n`-item database.
///
/// The stationary point exists only for `N >= 16`; smaller databases have
/// no interior minimum and yield a numerical error. Use
/// [`grover_integer_minimum`] there.
pub fn grover_kmin(n: u32) -> Result<GroverOptimum> {
    let space = SearchSpace::new(n, 0)?;
    let theta1 = space.angles::<f64>().theta1;
    // In x = (2k+1)θ1 the equation reads sin x = 2(x - θ1) cos x, which has
    // no poles; k >= 0 needs x >= θ1 and E decreases until x passes π/4.
    let x = bisect(
        |x| x.sin() - 2.0 * (x - theta1) * x.cos(),
        FRAC_PI_4.max(theta1),
        FRAC_PI_2,
        XTOL,
    )
    .map_err(|e| match e {
        Error::Numerical(detail) => Error::Numerical(format!(
            "no interior minimiser of k / sin²((2k+1)θ1) for N = 2^{n}: {detail}"
        )),
        other => other,
    })?;
    let k_min = (x / theta1 - 1.0) / 2.0;
    let pr = x.sin().powi(2);
    Ok(GroverOptimum {
        k_min,
        pr,
        e_min: k_min / pr,
    })
}

/// Integer minimiser of `k / sin²((2k+1)θ1)` over `k >= 1`.
pub fn grover_integer_minimum(n: u32) -> Result<(u64, f64)> {
    let space = SearchSpace::new(n, 0)?;
    let theta1 = space.angles::<f64>().theta1;
    let upper = (PI / (4.0 * theta1)).ceil() as u64 + 1;
    let mut best = (0, f64::INFINITY);
    for k in 1..=upper {
        let e = k as f64 / ((2 * k + 1) as f64 * theta1).sin().powi(2);
        if e < best.1 {
            best = (k, e);
        }
    }
    Ok(best)
}

/// Optimal GRK schedule `G_n G_m^k2 G_n^k1` for a given geometry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrkParameters {
    pub eta_k: f64,
    pub alpha_k: f64,
    /// `π√N/4 - η√b` before rounding.
    pub k1_real: f64,
    /// `α√b` before rounding.
    pub k2_real: f64,
    pub k1: u64,
    pub k2: u64,
}

/// `tan(2η/√K) = √(3K-4)/(K-2)` and `cos 2α = (K-2)/(2(K-1))`, with `k1, k2`
/// rounded half to even. Needs `K >= 3`.
pub fn grk_optimal_parameters(space: &SearchSpace) -> Result<GrkParameters> {
    let k = space.block_count();
    if k < 3 {
        return Err(Error::Parameter(format!(
            "GRK schedule needs at least 3 blocks, got K = {k} (with two blocks the first global run is omitted)"
        )));
    }
    let kf = k as f64;
    let eta_k = kf.sqrt() / 2.0 * (3.0 * kf - 4.0).sqrt().atan2(kf - 2.0);
    let alpha_k = 0.5 * ((kf - 2.0) / (2.0 * (kf - 1.0))).acos();
    let sqrt_n = (space.database_size() as f64).sqrt();
    let sqrt_b = (space.block_size() as f64).sqrt();
    let k1_real = PI * sqrt_n / 4.0 - eta_k * sqrt_b;
    let k2_real = alpha_k * sqrt_b;
    Ok(GrkParameters {
        eta_k,
        alpha_k,
        k1_real,
        k2_real,
        k1: k1_real.round_ties_even().max(0.0) as u64,
        k2: k2_real.round_ties_even().max(0.0) as u64,
    })
}

/// `sin²2α + εγ sin 4α` with `α = (k_tot - 1)/√N`, clamped to `[0, 1]`.
pub fn pr_max_bound(space: &SearchSpace, k_tot: u64) -> Result<f64> {
    if k_tot == 0 {
        return Err(Error::Parameter("k_tot must be at least 1".into()));
    }
    let alpha = (k_tot - 1) as f64 / (space.database_size() as f64).sqrt();
    Ok(probability_bound(alpha, space.angles::<f64>().gamma))
}

/// The first-order bound as a function of `α` and `γ`, clamped to `[0, 1]`.
pub fn probability_bound(alpha: f64, gamma: f64) -> f64 {
    let eps = BoundConstants::get().epsilon;
    ((2.0 * alpha).sin().powi(2) + eps * gamma * (4.0 * alpha).sin()).clamp(0.0, 1.0)
}

/// Query count minimising the expected iteration number, `α0√N + ε1√b`.
pub fn lemma_optimal_ktot(space: &SearchSpace) -> f64 {
    let c = BoundConstants::get();
    c.alpha0_lemma * (space.database_size() as f64).sqrt()
        + c.varepsilon_lemma * (space.block_size() as f64).sqrt()
}

/// Which branch of the minimal-expectation formula applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExpectationBranch {
    /// Many queries: `c_N √N + c_b √b`.
    Asymptotic,
    /// A single global query: `K - 8K²/N`.
    FewBlocks,
}

impl ExpectationBranch {
    pub fn label(self) -> &'static str {
        match self {
            ExpectationBranch::Asymptotic => "asymptotic",
            ExpectationBranch::FewBlocks => "few-blocks",
        }
    }
}

/// Both candidate values of the minimal expected iteration number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpectationBound {
    pub branch: ExpectationBranch,
    pub value: f64,
    pub asymptotic: f64,
    pub few_blocks: f64,
}

/// `c_N √N + c_b √b` for `m <= ⌊n/2⌋`, otherwise `K - 8K²/N`.
pub fn min_expected_bound(space: &SearchSpace) -> ExpectationBound {
    let c = BoundConstants::get();
    let n = space.database_size() as f64;
    let b = space.block_size() as f64;
    let k = space.block_count() as f64;
    let asymptotic = c.emin_sqrt_n_coeff * n.sqrt() + c.emin_sqrt_b_coeff * b.sqrt();
    let few_blocks = k - 8.0 * k * k / n;
    let branch = if space.m() <= space.n() / 2 {
        ExpectationBranch::Asymptotic
    } else {
        ExpectationBranch::FewBlocks
    };
    ExpectationBound {
        branch,
        value: match branch {
            ExpectationBranch::Asymptotic => asymptotic,
            ExpectationBranch::FewBlocks => few_blocks,
        },
        asymptotic,
        few_blocks,
    }
}

/// `π√N/4 - c_grk √b`: GRK with unit success probability.
pub fn grk_unit_reference(space: &SearchSpace) -> f64 {
    PI * (space.database_size() as f64).sqrt() / 4.0
        - BoundConstants::get().c_grk * (space.block_size() as f64).sqrt()
}

/// `⌈π√b/2⌉`: a local run beyond this only rotates back.
pub fn max_local_run(space: &SearchSpace) -> u64 {
    (PI * (space.block_size() as f64).sqrt() / 2.0).ceil() as u64
}

/// `⌈π√N/4⌉ + ⌈√b⌉`.
pub fn max_grk_queries(space: &SearchSpace) -> u64 {
    (PI * (space.database_size() as f64).sqrt() / 4.0).ceil() as u64
        + (space.block_size() as f64).sqrt().ceil() as u64
}

/// Best local-run length for a fixed total of `k_tot` GRK queries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrkSplit {
    pub k_tot: u64,
    pub k1: u64,
    pub k2: u64,
    pub pr: f64,
}

fn best_split(
    eval: &GrkEvaluator<f64>,
    locals: &[crate::Matrix3<f64>],
    k_tot: u64,
) -> Result<GrkSplit> {
    let mut best: Option<GrkSplit> = None;
    let k2_max = (k_tot - 1).min(locals.len() as u64 - 1);
    for k2 in 0..=k2_max {
        let k1 = k_tot - 1 - k2;
        let pr = eval.finish(k1, &locals[k2 as usize]).block_probability()?;
        if best.is_none_or(|b| pr > b.pr) {
            best = Some(GrkSplit { k_tot, k1, k2, pr });
        }
    }
    Ok(best.expect("k2 = 0 is always scanned"))
}

fn local_powers(eval: &GrkEvaluator<f64>, k2_max: u64) -> Vec<crate::Matrix3<f64>> {
    (0..=k2_max).map(|j| eval.model().local_power(j)).collect()
}

/// Maximises the GRK block probability over `k2` for a fixed `k_tot`,
/// with `k2 <= ⌈π√b/2⌉`. Ties keep the smaller `k2`.
pub fn grk_best_split(space: &SearchSpace, k_tot: u64) -> Result<GrkSplit> {
    if k_tot == 0 {
        return Err(Error::Parameter("k_tot must be at least 1".into()));
    }
    let eval = GrkEvaluator::<f64>::new(space, k_tot - 1);
    let locals = local_powers(&eval, max_local_run(space));
    best_split(&eval, &locals, k_tot)
}

/// One point of the probability-versus-queries comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Figure3Row {
    pub k_tot: u64,
    pub alpha: f64,
    /// Leading term `sin²2α`.
    pub leading: f64,
    /// First-order bound.
    pub bound: f64,
    /// Best GRK probability over `k2`.
    pub numeric: f64,
    pub k2_numeric: u64,
    /// `round(π√b/6)`.
    pub k2_analytic: u64,
    /// GRK probability with `k2_analytic`.
    pub numeric_at_analytic_k2: f64,
}

/// Bound versus numerically optimised GRK probability for each `k_tot`.
pub fn figure3_sweep(space: &SearchSpace, k_range: RangeInclusive<u64>) -> Result<Vec<Figure3Row>> {
    if k_range.is_empty() || *k_range.start() == 0 {
        return Err(Error::Parameter(
            "k_tot range must be non-empty and start at 1 or more".into(),
        ));
    }
    let eval = GrkEvaluator::<f64>::new(space, *k_range.end() - 1);
    let locals = local_powers(&eval, max_local_run(space));
    let sqrt_n = (space.database_size() as f64).sqrt();
    let gamma = space.angles::<f64>().gamma;
    let k2_analytic = (PI * (space.block_size() as f64).sqrt() / 6.0).round_ties_even() as u64;
    let analytic_local = eval.model().local_power(k2_analytic);
    let ks: Vec<u64> = k_range.collect();
    ks.par_iter()
        .map(|&k_tot| {
            let split = best_split(&eval, &locals, k_tot)?;
            let alpha = (k_tot - 1) as f64 / sqrt_n;
            let at_analytic = if k2_analytic < k_tot {
                eval.finish(k_tot - 1 - k2_analytic, &analytic_local)
                    .block_probability()?
            } else {
                f64::NAN
            };
            Ok(Figure3Row {
                k_tot,
                alpha,
                leading: (2.0 * alpha).sin().powi(2),
                bound: probability_bound(alpha, gamma),
                numeric: split.pr,
                k2_numeric: split.k2,
                k2_analytic,
                numeric_at_analytic_k2: at_analytic,
            })
        })
        .collect()
}

/// Minimal expected iteration number over GRK schedules of one geometry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrkMinimum {
    pub k1: u64,
    pub k2: u64,
    pub k_tot: u64,
    pub pr: f64,
    pub e_min: f64,
}

/// Scans `k1 + k2 + 1 <= ⌈π√N/4⌉ + ⌈√b⌉`, `k2 <= ⌈π√b/2⌉`. Ties go to the
/// smaller `k_tot`, then the smaller `k2`.
pub fn grk_min_expected(space: &SearchSpace) -> Result<GrkMinimum> {
    let k_max = max_grk_queries(space);
    let eval = GrkEvaluator::<f64>::new(space, k_max - 1);
    let k2_max = max_local_run(space).min(k_max - 1);
    let mut best: Option<GrkMinimum> = None;
    for k2 in 0..=k2_max {
        let local = eval.model().local_power(k2);
        for k1 in 0..k_max - k2 {
            let pr = eval.finish(k1, &local).block_probability()?;
            if pr <= 0.0 {
                continue;
            }
            let k_tot = k1 + k2 + 1;
            let e = k_tot as f64 / pr;
            let better = match best {
                None => true,
                Some(b) => e < b.e_min || (e == b.e_min && (k_tot, k2) < (b.k_tot, b.k2)),
            };
            if better {
                best = Some(GrkMinimum {
                    k1,
                    k2,
                    k_tot,
                    pr,
                    e_min: e,
                });
            }
        }
    }
    best.ok_or(Error::ZeroProbability)
}

/// One geometry of the minimal-expectation sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Figure4Row {
    pub n: u32,
    pub m: u32,
    pub numeric: GrkMinimum,
    pub bound: ExpectationBound,
    /// `π√N/4 - c_grk √b`.
    pub grk_reference: f64,
}

/// Numeric GRK minimum and both analytic branches for every `1 <= m < n`.
pub fn figure4_sweep(n: u32) -> Result<Vec<Figure4Row>> {
    (1..n)
        .into_par_iter()
        .map(|m| {
            let space = SearchSpace::new(n, m)?;
            Ok(Figure4Row {
                n,
                m,
                numeric: grk_min_expected(&space)?,
                bound: min_expected_bound(&space),
                grk_reference: grk_unit_reference(&space),
            })
        })
        .collect()
}
