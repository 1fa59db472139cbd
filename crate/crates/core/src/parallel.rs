//! Expected-iteration models of four ways to spread a search over `l` QPUs.
//!
//! Costs count oracle queries made by one QPU; classical verification is
//! free. All minima are integer scans, so reported optima are always
//! realisable query counts.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

use rayon::prelude::*;

use crate::bounds::{max_grk_queries, max_local_run, BoundConstants};
use crate::error::{Error, Result};
use crate::roots::first_root_in;
use crate::search_space::SearchSpace;
use crate::subspace::{GrkEvaluator, State3};

const INNER: &str = "inner parallel search definition (database split into power-of-two parts)";
const GRK_BASED: &str = "GRK-based parallel search definition (QPU count divides qubit count)";
const HYBRID: &str = "hybrid parallel search definition (QPU count divides qubit count)";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SchemeKind {
    /// Each QPU searches its own `N/l` slice.
    Inner,
    /// Every QPU runs the same full search; any hit wins.
    Outer,
    /// Each QPU finds `n/l` address bits by GRK; all must succeed.
    GrkBased,
    /// GRK on every QPU plus classical checks of each full outcome and of the
    /// assembled address.
    Hybrid,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 4] = [
        SchemeKind::Inner,
        SchemeKind::Outer,
        SchemeKind::GrkBased,
        SchemeKind::Hybrid,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SchemeKind::Inner => "inner",
            SchemeKind::Outer => "outer",
            SchemeKind::GrkBased => "grk",
            SchemeKind::Hybrid => "hybrid",
        }
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Optimal query counts of a scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Queries {
    /// `k` global iterations.
    Single { k: u64 },
    /// The GRK schedule `G_n G_m^k2 G_n^k1`.
    Grk { k1: u64, k2: u64 },
}

impl Queries {
    /// Oracle calls per QPU.
    pub fn total(self) -> u64 {
        match self {
            Queries::Single { k } => k,
            Queries::Grk { k1, k2 } => k1 + k2 + 1,
        }
    }
}

/// Optimum of one scheme at one QPU count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeResult {
    pub kind: SchemeKind,
    pub n: u32,
    pub l: u64,
    pub queries: Queries,
    pub e_min: f64,
    /// Overall success probability at the optimum.
    pub pr_at_opt: f64,
}

fn check_n(n: u32) -> Result<()> {
    SearchSpace::new(n, 0).map(|_| ())
}

fn sin2(x: f64) -> f64 {
    x.sin().powi(2)
}

/// Angle with `sin θ1' = √(l/N)`; `l` must be a power of two `<= N`.
fn inner_angle(n: u32, l: u64) -> Result<f64> {
    check_n(n)?;
    if l == 0 || !l.is_power_of_two() || l > 1u64 << n {
        return Err(Error::Constraint {
            definition: INNER,
            detail: format!("l = {l} is not a power of two between 1 and N = 2^{n}"),
        });
    }
    let r = l.trailing_zeros();
    Ok(crate::search_space::inv_sqrt_pow2::<f64>(n - r).asin())
}

/// `k / sin²((2k+1)θ1')`.
pub fn inner_expected(n: u32, l: u64, k: u64) -> Result<f64> {
    let theta = inner_angle(n, l)?;
    Ok(k as f64 / sin2((2 * k + 1) as f64 * theta))
}

/// Integer scan over `1 <= k <= ⌈π√(N/l)/4⌉ + 2`.
pub fn inner_min(n: u32, l: u64) -> Result<SchemeResult> {
    let theta = inner_angle(n, l)?;
    let upper = (PI / (4.0 * theta.sin())).ceil() as u64 + 2;
    let (k, pr) = scan_single(upper, |k| sin2((2 * k + 1) as f64 * theta));
    Ok(SchemeResult {
        kind: SchemeKind::Inner,
        n,
        l,
        queries: Queries::Single { k },
        e_min: k as f64 / pr,
        pr_at_opt: pr,
    })
}

fn outer_probability(theta1: f64, l: u64, k: u64) -> f64 {
    let miss = 1.0 - sin2((2 * k + 1) as f64 * theta1);
    1.0 - miss.powf(l as f64)
}

/// `k / (1 - (1 - sin²((2k+1)θ1))^l)`.
pub fn outer_expected(n: u32, l: u64, k: u64) -> Result<f64> {
    check_n(n)?;
    check_l(l)?;
    let theta1 = SearchSpace::new(n, 0)?.angles::<f64>().theta1;
    Ok(k as f64 / outer_probability(theta1, l, k))
}

/// Integer scan over `1 <= k <= ⌈π√N/4⌉`.
pub fn outer_min(n: u32, l: u64) -> Result<SchemeResult> {
    check_n(n)?;
    check_l(l)?;
    let theta1 = SearchSpace::new(n, 0)?.angles::<f64>().theta1;
    let upper = (PI * ((1u64 << n) as f64).sqrt() / 4.0).ceil() as u64;
    let (k, pr) = scan_single(upper, |k| outer_probability(theta1, l, k));
    Ok(SchemeResult {
        kind: SchemeKind::Outer,
        n,
        l,
        queries: Queries::Single { k },
        e_min: k as f64 / pr,
        pr_at_opt: pr,
    })
}

fn check_l(l: u64) -> Result<()> {
    if l == 0 {
        return Err(Error::Parameter("QPU count l must be at least 1".into()));
    }
    Ok(())
}

fn scan_single<F: Fn(u64) -> f64>(upper: u64, pr: F) -> (u64, f64) {
    let mut best = (1, pr(1));
    for k in 2..=upper.max(1) {
        let p = pr(k);
        if k as f64 / p < best.0 as f64 / best.1 {
            best = (k, p);
        }
    }
    best
}

/// The geometry each QPU searches under the GRK-based and hybrid schemes:
/// `m = n - n/l`, requiring `l | n`.
pub fn scheme_space(kind: SchemeKind, n: u32, l: u64) -> Result<SearchSpace> {
    let definition = match kind {
        SchemeKind::GrkBased => GRK_BASED,
        SchemeKind::Hybrid => HYBRID,
        other => {
            return Err(Error::Parameter(format!(
                "{other} search does not split the address into blocks"
            )))
        }
    };
    check_n(n)?;
    check_l(l)?;
    if l > n as u64 || !(n as u64).is_multiple_of(l) {
        return Err(Error::Constraint {
            definition,
            detail: format!("l = {l} does not divide n = {n}"),
        });
    }
    SearchSpace::new(n, n - (n as u64 / l) as u32)
}

fn grk_state(space: &SearchSpace, k1: u64, k2: u64) -> State3<f64> {
    GrkEvaluator::<f64>::new(space, k1).state(k1, k2)
}

fn grk_success(v: &State3<f64>, l: u64) -> Result<f64> {
    Ok(v.block_probability()?.powf(l as f64))
}

fn hybrid_success(v: &State3<f64>, l: u64) -> Result<f64> {
    let pb = v.block_probability()?;
    let pt = v.target_probability()?;
    Ok(1.0 - (1.0 - pb.powf(l as f64)) * (1.0 - pt).powf(l as f64))
}

/// `(1 + k1 + k2) / Pr^l` with `Pr` the GRK block probability.
pub fn grk_parallel_expected(n: u32, l: u64, k1: u64, k2: u64) -> Result<f64> {
    let space = scheme_space(SchemeKind::GrkBased, n, l)?;
    let pr = grk_success(&grk_state(&space, k1, k2), l)?;
    Ok((1 + k1 + k2) as f64 / pr)
}

/// `(1 + k1 + k2) / (1 - (1 - Pr_block^l)(1 - Pr_target)^l)`.
pub fn hybrid_expected(n: u32, l: u64, k1: u64, k2: u64) -> Result<f64> {
    let space = scheme_space(SchemeKind::Hybrid, n, l)?;
    let pr = hybrid_success(&grk_state(&space, k1, k2), l)?;
    Ok((1 + k1 + k2) as f64 / pr)
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    k1: u64,
    k2: u64,
    pr: f64,
    e: f64,
}

impl Candidate {
    fn key(&self) -> (u64, u64) {
        (self.k1 + self.k2, self.k2)
    }

    fn better(self, other: Self) -> Self {
        if self.e < other.e || (self.e == other.e && self.key() < other.key()) {
            self
        } else {
            other
        }
    }
}

/// Deterministic 2D scan; `success` maps a final GRK state to the overall
/// success probability.
fn scan_grk<F>(space: &SearchSpace, allow_k2: bool, success: F) -> Result<Candidate>
where
    F: Fn(&State3<f64>) -> Result<f64> + Sync,
{
    let k_max = max_grk_queries(space);
    let eval = GrkEvaluator::<f64>::new(space, k_max - 1);
    let k2_max = if allow_k2 {
        max_local_run(space).min(k_max - 1)
    } else {
        0
    };
    let best = (0..=k2_max)
        .into_par_iter()
        .map(|k2| -> Result<Option<Candidate>> {
            let local = eval.model().local_power(k2);
            let mut best: Option<Candidate> = None;
            for k1 in 0..k_max - k2 {
                let pr = success(&eval.finish(k1, &local))?;
                if pr <= 0.0 {
                    continue;
                }
                let c = Candidate {
                    k1,
                    k2,
                    pr,
                    e: (k1 + k2 + 1) as f64 / pr,
                };
                best = Some(best.map_or(c, |b| b.better(c)));
            }
            Ok(best)
        })
        .try_reduce(
            || None,
            |a, b| {
                Ok(match (a, b) {
                    (Some(a), Some(b)) => Some(a.better(b)),
                    (a, None) => a,
                    (None, b) => b,
                })
            },
        )?;
    best.ok_or(Error::ZeroProbability)
}

fn grk_result(kind: SchemeKind, n: u32, l: u64, c: Candidate) -> SchemeResult {
    SchemeResult {
        kind,
        n,
        l,
        queries: Queries::Grk { k1: c.k1, k2: c.k2 },
        e_min: c.e,
        pr_at_opt: c.pr,
    }
}

/// Minimum over `k1 + k2 + 1 <= ⌈π√N/4⌉ + ⌈√b⌉`, `k2 <= ⌈π√b/2⌉`.
pub fn grk_parallel_min(n: u32, l: u64) -> Result<SchemeResult> {
    let space = scheme_space(SchemeKind::GrkBased, n, l)?;
    let c = scan_grk(&space, true, |v| grk_success(v, l))?;
    Ok(grk_result(SchemeKind::GrkBased, n, l, c))
}

/// Same scan as [`grk_parallel_min`]; with `allow_k2 = false` only `k2 = 0`
/// is tried, which reduces each QPU to plain Grover search.
pub fn hybrid_min(n: u32, l: u64, allow_k2: bool) -> Result<SchemeResult> {
    let space = scheme_space(SchemeKind::Hybrid, n, l)?;
    let c = scan_grk(&space, allow_k2, |v| hybrid_success(v, l))?;
    Ok(grk_result(SchemeKind::Hybrid, n, l, c))
}

/// Dispatches to the per-scheme minimiser.
pub fn scheme_min(kind: SchemeKind, n: u32, l: u64, allow_k2: bool) -> Result<SchemeResult> {
    match kind {
        SchemeKind::Inner => inner_min(n, l),
        SchemeKind::Outer => outer_min(n, l),
        SchemeKind::GrkBased => grk_parallel_min(n, l),
        SchemeKind::Hybrid => hybrid_min(n, l, allow_k2),
    }
}

/// A `(scheme, l)` pair left out of a comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct Omission {
    pub kind: SchemeKind,
    pub l: u64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Comparison {
    pub results: Vec<SchemeResult>,
    pub omitted: Vec<Omission>,
}

impl Comparison {
    pub fn get(&self, kind: SchemeKind, l: u64) -> Option<&SchemeResult> {
        self.results.iter().find(|r| r.kind == kind && r.l == l)
    }
}

/// Every scheme at every `l`; pairs that break a scheme's definition are
/// reported in `omitted` instead of failing the whole comparison.
/// `allow_k2` is passed to [`hybrid_min`].
pub fn compare_schemes(n: u32, l_values: &[u64], allow_k2: bool) -> Result<Comparison> {
    check_n(n)?;
    let mut out = Comparison::default();
    for &l in l_values {
        for kind in SchemeKind::ALL {
            match scheme_min(kind, n, l, allow_k2) {
                Ok(r) => out.results.push(r),
                Err(Error::Constraint { definition, .. }) => out.omitted.push(Omission {
                    kind,
                    l,
                    reason: definition.to_string(),
                }),
                Err(e) => return Err(e),
            }
        }
    }
    Ok(out)
}

/// Large-`n` hybrid optimum at `l = n`: `(k_min, e_min)` equal to
/// `(√u/2, √u/(2(1-e^{-u})))·√(N/n)` with `(1 + 2u)e^{-u} = 1`.
pub fn hybrid_large_l_asymptotic(n: u32) -> Result<(f64, f64)> {
    check_n(n)?;
    let c = BoundConstants::get();
    let scale = ((1u64 << n) as f64 / n as f64).sqrt();
    Ok((c.hybrid_kmin_coeff * scale, c.outer_coeff * scale))
}

/// Two-QPU hybrid floor `(2π/13)·√N`.
pub fn hybrid_l2_lower_bound(n: u32) -> Result<f64> {
    check_n(n)?;
    Ok(BoundConstants::get().hybrid_l2_floor * ((1u64 << n) as f64).sqrt())
}

/// `E_min / √N` of GRK-based search with two QPUs as `n` grows:
/// `α / sin⁴2α` at the root of `tan 2α = 8α`.
pub fn grk_parallel_two_qpu_coeff() -> Result<f64> {
    let y = first_root_in(|y| y.sin() - 4.0 * y * y.cos(), 0.1, FRAC_PI_2, 256, 1e-15)?;
    Ok(y / 2.0 / y.sin().powi(4))
}

/// One row of the hybrid-versus-plain comparison at fixed `l`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HybridTableRow {
    pub n: u32,
    pub l: u64,
    /// Optimum with `k2 = 0`.
    pub plain: SchemeResult,
    /// Optimum with a local run allowed.
    pub with_local: SchemeResult,
}

/// Hybrid optima with and without a local run for each `n`.
pub fn hybrid_table(n_values: &[u32], l: u64) -> Result<Vec<HybridTableRow>> {
    n_values
        .iter()
        .map(|&n| {
            Ok(HybridTableRow {
                n,
                l,
                plain: hybrid_min(n, l, false)?,
                with_local: hybrid_min(n, l, true)?,
            })
        })
        .collect()
}
