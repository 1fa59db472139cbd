//! Exhaustive search over every composition of `k_tot` global/local queries.
//!
//! A sequence of `k_tot` queries is a `k_tot`-bit word, bit `i` giving the
//! kind of the `i`-th applied query (`0` = global, `1` = local). The search
//! walks the binary tree of prefixes depth first, so every shared prefix state
//! is computed once. The top levels of the tree are split across rayon
//! workers; the merge is a deterministic max-reduce, so results do not depend
//! on the worker count.

use std::cmp::Ordering;
use std::ops::RangeInclusive;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::search_space::SearchSpace;
use crate::sequence::{OperatorKind, OperatorSequence};
use crate::subspace::{block_success_probability, State3, Subspace};

/// Hard cap on `k_tot` (cost grows as `2^k_tot`).
pub const MAX_ENUMERATION_QUERIES: u32 = 30;

/// Sequences within this absolute distance of the maximum are co-optimal.
pub const TIE_TOLERANCE: f64 = 1e-9;

/// Number of top tree levels distributed across workers.
const SPLIT_DEPTH: u32 = 8;

/// Outcome of one exhaustive search.
#[derive(Debug, Clone, PartialEq)]
pub struct EnumerationResult<T> {
    pub k_tot: u32,
    pub pr_max: T,
    /// Co-optimal sequences, canonical representative first.
    pub optimal_sequences: Vec<OperatorSequence>,
    /// `k_tot / pr_max`.
    pub expected_iterations: T,
}

impl<T: Real> EnumerationResult<T> {
    /// The representative with the fewest runs, then the smallest bit string
    /// in application order (global before local).
    pub fn canonical(&self) -> &OperatorSequence {
        &self.optimal_sequences[0]
    }
}

#[derive(Debug, Clone, Copy)]
struct Leaf<T> {
    bits: u64,
    pr: T,
}

/// Per-subtree accumulator. Leaves ending in a global query and leaves ending
/// in a local query are tracked apart: the latter repeat a shorter prefix and
/// are only reported when nothing else reaches the maximum.
#[derive(Debug, Clone)]
struct Best<T> {
    max_global_end: T,
    global_end: Vec<Leaf<T>>,
    max_local_end: T,
    local_end: Vec<Leaf<T>>,
}

impl<T: Real> Best<T> {
    fn empty() -> Self {
        Self {
            max_global_end: T::neg_infinity(),
            global_end: Vec::new(),
            max_local_end: T::neg_infinity(),
            local_end: Vec::new(),
        }
    }

    fn offer(max: &mut T, pool: &mut Vec<Leaf<T>>, leaf: Leaf<T>, tol: T) {
        if leaf.pr > *max {
            *max = leaf.pr;
            let floor = *max - tol;
            pool.retain(|l| l.pr >= floor);
        }
        if leaf.pr >= *max - tol {
            pool.push(leaf);
        }
    }

    fn push(&mut self, leaf: Leaf<T>, ends_local: bool, tol: T) {
        if ends_local {
            Self::offer(&mut self.max_local_end, &mut self.local_end, leaf, tol);
        } else {
            Self::offer(&mut self.max_global_end, &mut self.global_end, leaf, tol);
        }
    }

    fn merge(mut self, other: Self, tol: T) -> Self {
        for leaf in other.global_end {
            Self::offer(&mut self.max_global_end, &mut self.global_end, leaf, tol);
        }
        for leaf in other.local_end {
            Self::offer(&mut self.max_local_end, &mut self.local_end, leaf, tol);
        }
        self
    }
}

struct Walker<'a, T> {
    model: &'a Subspace<T>,
    k_tot: u32,
    tol: T,
}

impl<T: Real> Walker<'_, T> {
    fn descend(&self, depth: u32, bits: u64, state: State3<T>, best: &mut Best<T>) -> Result<()> {
        if depth == self.k_tot {
            let pr = state.block_probability()?;
            let ends_local = depth > 0 && (bits >> (depth - 1)) & 1 == 1;
            best.push(Leaf { bits, pr }, ends_local, self.tol);
            return Ok(());
        }
        let g = self.model.step(OperatorKind::Global, &state);
        self.descend(depth + 1, bits, g, best)?;
        let l = self.model.step(OperatorKind::Local, &state);
        self.descend(depth + 1, bits | (1 << depth), l, best)
    }
}

fn bit_order(a: u64, b: u64, len: u32) -> Ordering {
    for i in 0..len {
        let (x, y) = ((a >> i) & 1, (b >> i) & 1);
        if x != y {
            return x.cmp(&y);
        }
    }
    Ordering::Equal
}

/// Exact maximum block success probability over all `2^k_tot` sequences.
pub fn enumerate_max_probability<T: Real>(
    space: &SearchSpace,
    k_tot: u32,
) -> Result<EnumerationResult<T>> {
    if k_tot == 0 {
        return Err(Error::Parameter("k_tot must be at least 1".into()));
    }
    if k_tot > MAX_ENUMERATION_QUERIES {
        return Err(Error::Resource(format!(
            "k_tot = {k_tot} exceeds the exhaustive-search cap of {MAX_ENUMERATION_QUERIES}"
        )));
    }
    let model = Subspace::<T>::new(space);
    let tol = T::of(TIE_TOLERANCE);
    let walker = Walker {
        model: &model,
        k_tot,
        tol,
    };
    let split = k_tot.min(SPLIT_DEPTH);

    let partials: Vec<Result<Best<T>>> = (0..1u64 << split)
        .into_par_iter()
        .map(|prefix| {
            let mut state = model.initial();
            for i in 0..split {
                let kind = if (prefix >> i) & 1 == 1 {
                    OperatorKind::Local
                } else {
                    OperatorKind::Global
                };
                state = model.step(kind, &state);
            }
            let mut best = Best::empty();
            walker.descend(split, prefix, state, &mut best)?;
            Ok(best)
        })
        .collect();

    let mut best = Best::empty();
    for partial in partials {
        best = best.merge(partial?, tol);
    }

    let pr_max = best.max_global_end.max(best.max_local_end);
    let floor = pr_max - tol;
    let mut leaves: Vec<Leaf<T>> = best
        .global_end
        .into_iter()
        .filter(|l| l.pr >= floor)
        .collect();
    if leaves.is_empty() {
        leaves = best
            .local_end
            .into_iter()
            .filter(|l| l.pr >= floor)
            .collect();
    }
    let mut sequences: Vec<(u64, OperatorSequence)> = leaves
        .iter()
        .map(|l| (l.bits, OperatorSequence::from_bits(l.bits, k_tot)))
        .collect();
    sequences.sort_by(|(ba, sa), (bb, sb)| {
        sa.runs()
            .len()
            .cmp(&sb.runs().len())
            .then_with(|| bit_order(*ba, *bb, k_tot))
    });

    if pr_max <= T::zero() {
        return Err(Error::ZeroProbability);
    }
    Ok(EnumerationResult {
        k_tot,
        pr_max,
        optimal_sequences: sequences.into_iter().map(|(_, s)| s).collect(),
        expected_iterations: T::of_u64(k_tot as u64) / pr_max,
    })
}

/// `k_tot / Pr` for a given sequence.
pub fn expected_iterations<T: Real>(space: &SearchSpace, seq: &OperatorSequence) -> Result<T> {
    let pr: T = block_success_probability(space, seq)?;
    if pr <= T::zero() {
        return Err(Error::ZeroProbability);
    }
    Ok(T::of_u64(seq.total_queries()) / pr)
}

/// Minimises `k_tot / Pr^max(k_tot)` over a query budget range; ties go to
/// the smaller `k_tot`.
pub fn min_expected_over_budget<T: Real>(
    space: &SearchSpace,
    k_range: RangeInclusive<u32>,
) -> Result<(u32, EnumerationResult<T>)> {
    if k_range.is_empty() {
        return Err(Error::Parameter("empty k_tot range".into()));
    }
    let mut best: Option<(u32, EnumerationResult<T>)> = None;
    for k in k_range {
        let r = enumerate_max_probability::<T>(space, k)?;
        let better = match &best {
            None => true,
            Some((_, b)) => r.expected_iterations < b.expected_iterations,
        };
        if better {
            best = Some((k, r));
        }
    }
    Ok(best.expect("non-empty range"))
}

/// True iff `seq` is `G_n G_m^k2 G_n^k1` for some `k1, k2 >= 0`.
pub fn is_grk_form(seq: &OperatorSequence) -> bool {
    use OperatorKind::{Global, Local};
    let kinds: Vec<(OperatorKind, u64)> = seq.runs().iter().map(|r| (r.kind, r.count)).collect();
    matches!(
        kinds.as_slice(),
        [(Global, _)] | [(Local, _), (Global, 1)] | [(Global, _), (Local, _), (Global, 1)]
    )
}

/// One `(m, k_tot)` cell of the optimal-sequence tables.
#[derive(Debug, Clone, PartialEq)]
pub struct TableRow<T> {
    pub n: u32,
    pub m: u32,
    pub k_tot: u32,
    pub sequence: OperatorSequence,
    /// Operator-product rendering of `sequence`.
    pub operator: String,
    pub pr_max: T,
    pub expected_iterations: T,
    pub is_grk_form: bool,
}

impl<T: Real> TableRow<T> {
    pub fn pr_percent(&self) -> T {
        self.pr_max * T::of(100.0)
    }
}

/// Renders a probability as a percentage with four decimals.
///
/// Rounding is to nearest on the exact binary value. A probability below one
/// never renders as `100.0000`; it is shown as `99.9999` instead.
pub fn render_percent(pr: f64) -> String {
    let text = format!("{:.4}", pr * 100.0);
    if pr < 1.0 && text == "100.0000" {
        "99.9999".to_string()
    } else {
        text
    }
}

/// Renders an expected iteration number with four decimals.
pub fn render_expected(e: f64) -> String {
    format!("{e:.4}")
}

/// One row per `(m, k_tot)`, `m` outermost.
pub fn table_sweep<T: Real>(
    n: u32,
    m_values: &[u32],
    k_values: &[u32],
) -> Result<Vec<TableRow<T>>> {
    let mut rows = Vec::with_capacity(m_values.len() * k_values.len());
    for &m in m_values {
        let space = SearchSpace::new(n, m)?;
        for &k in k_values {
            let r = enumerate_max_probability::<T>(&space, k)?;
            let sequence = r.canonical().clone();
            rows.push(TableRow {
                n,
                m,
                k_tot: k,
                operator: sequence.to_product(&space),
                is_grk_form: is_grk_form(&sequence),
                sequence,
                pr_max: r.pr_max,
                expected_iterations: r.expected_iterations,
            });
        }
    }
    Ok(rows)
}
