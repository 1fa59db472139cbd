//! Exact dynamics in the invariant subspace spanned by the target `|t⟩`, the
//! rest of the target block `|bt̄⟩`, and the non-target blocks `|b̄⟩`.
//!
//! Both Grover operators map this three-dimensional span onto itself, so a
//! real 3-vector carries the full state of any composition applied to the
//! uniform superposition.

use std::ops::Mul;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::search_space::{Angles, SearchSpace};
use crate::sequence::{OperatorKind, OperatorSequence};

/// Real amplitudes in the basis `(|t⟩, |bt̄⟩, |b̄⟩)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct State3<T> {
    pub amp_t: T,
    pub amp_bt: T,
    pub amp_bbar: T,
}

impl<T: Real> State3<T> {
    pub fn new(amp_t: T, amp_bt: T, amp_bbar: T) -> Self {
        Self {
            amp_t,
            amp_bt,
            amp_bbar,
        }
    }

    pub fn to_array(self) -> [T; 3] {
        [self.amp_t, self.amp_bt, self.amp_bbar]
    }

    pub fn from_array(a: [T; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    pub fn norm_sqr(&self) -> T {
        self.amp_t * self.amp_t + self.amp_bt * self.amp_bt + self.amp_bbar * self.amp_bbar
    }

    /// `1 - |⟨b̄|ψ⟩|²`: probability that a measurement lands in the target
    /// block.
    pub fn block_probability(&self) -> Result<T> {
        checked_probability(T::one() - self.amp_bbar * self.amp_bbar)
    }

    /// `|⟨t|ψ⟩|²`.
    pub fn target_probability(&self) -> Result<T> {
        checked_probability(self.amp_t * self.amp_t)
    }

    /// Largest absolute component difference.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        (self.amp_t - other.amp_t)
            .abs()
            .max((self.amp_bt - other.amp_bt).abs())
            .max((self.amp_bbar - other.amp_bbar).abs())
    }
}

/// Clamps a probability to `[0, 1]`, refusing values that overshoot by more
/// than [`Real::probability_slack`].
pub fn checked_probability<T: Real>(raw: T) -> Result<T> {
    let slack = T::probability_slack();
    if !raw.is_finite() || raw < -slack || raw > T::one() + slack {
        return Err(Error::Consistency(format!(
            "probability {raw} outside [0, 1]"
        )));
    }
    Ok(raw.max(T::zero()).min(T::one()))
}

/// Row-major real 3×3 matrix in the `(|t⟩, |bt̄⟩, |b̄⟩)` basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Matrix3<T> {
    pub rows: [[T; 3]; 3],
}

impl<T: Real> Matrix3<T> {
    pub fn new(rows: [[T; 3]; 3]) -> Self {
        Self { rows }
    }

    pub fn identity() -> Self {
        let (o, z) = (T::one(), T::zero());
        Self::new([[o, z, z], [z, o, z], [z, z, o]])
    }

    /// Rotation by `angle` in the `(|t⟩, |bt̄⟩)` plane, identity on `|b̄⟩`.
    pub fn plane_rotation(angle: T) -> Self {
        Self::plane_rotation_cs(angle.cos(), angle.sin())
    }

    fn plane_rotation_cs(c: T, s: T) -> Self {
        let (o, z) = (T::one(), T::zero());
        Self::new([[c, s, z], [-s, c, z], [z, z, o]])
    }

    pub fn transpose(&self) -> Self {
        let r = &self.rows;
        Self::new([
            [r[0][0], r[1][0], r[2][0]],
            [r[0][1], r[1][1], r[2][1]],
            [r[0][2], r[1][2], r[2][2]],
        ])
    }

    pub fn determinant(&self) -> T {
        let r = &self.rows;
        r[0][0] * (r[1][1] * r[2][2] - r[1][2] * r[2][1])
            - r[0][1] * (r[1][0] * r[2][2] - r[1][2] * r[2][0])
            + r[0][2] * (r[1][0] * r[2][1] - r[1][1] * r[2][0])
    }

    #[inline]
    pub fn apply(&self, v: &State3<T>) -> State3<T> {
        let r = &self.rows;
        State3::new(
            r[0][0] * v.amp_t + r[0][1] * v.amp_bt + r[0][2] * v.amp_bbar,
            r[1][0] * v.amp_t + r[1][1] * v.amp_bt + r[1][2] * v.amp_bbar,
            r[2][0] * v.amp_t + r[2][1] * v.amp_bt + r[2][2] * v.amp_bbar,
        )
    }

    /// Largest entry of `|MᵀM - I|`.
    pub fn orthogonality_defect(&self) -> T {
        let p = self.transpose() * *self;
        let id = Self::identity();
        let mut worst = T::zero();
        for i in 0..3 {
            for j in 0..3 {
                worst = worst.max((p.rows[i][j] - id.rows[i][j]).abs());
            }
        }
        worst
    }
}

impl<T: Real> Mul for Matrix3<T> {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        let mut out = [[T::zero(); 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = (0..3).fold(T::zero(), |acc, k| acc + self.rows[i][k] * rhs.rows[k][j]);
            }
        }
        Self::new(out)
    }
}

/// `|s_n⟩ = sinγ sinθ2 |t⟩ + sinγ cosθ2 |bt̄⟩ + cosγ |b̄⟩`.
pub fn initial_state<T: Real>(space: &SearchSpace) -> State3<T> {
    let a: Angles<T> = space.angles();
    State3::new(
        a.sin_gamma * a.sin_theta2,
        a.sin_gamma * a.cos_theta2,
        a.cos_gamma,
    )
}

/// Global Grover operator `G_n = D_n O_t` (a reflection, `det = -1`).
pub fn global_grover_matrix<T: Real>(space: &SearchSpace) -> Matrix3<T> {
    let a: Angles<T> = space.angles();
    let two = T::of(2.0);
    let (sg, cg, s2, c2) = (a.sin_gamma, a.cos_gamma, a.sin_theta2, a.cos_theta2);
    Matrix3::new([
        [
            T::one() - two * sg * sg * s2 * s2,
            two * sg * sg * s2 * c2,
            two * sg * cg * s2,
        ],
        [
            -two * sg * sg * s2 * c2,
            two * sg * sg * c2 * c2 - T::one(),
            two * sg * cg * c2,
        ],
        [
            -two * sg * cg * s2,
            two * sg * cg * c2,
            two * cg * cg - T::one(),
        ],
    ])
}

/// Local Grover operator `G_m = D_m O_t`: rotation by `2θ2` inside the
/// target block, identity on `|b̄⟩`.
pub fn local_grover_matrix<T: Real>(space: &SearchSpace) -> Matrix3<T> {
    let a: Angles<T> = space.angles();
    let two = T::of(2.0);
    let cos2 = a.cos_theta2 * a.cos_theta2 - a.sin_theta2 * a.sin_theta2;
    let sin2 = two * a.sin_theta2 * a.cos_theta2;
    Matrix3::plane_rotation_cs(cos2, sin2)
}

/// Precomputed operators for one search space.
#[derive(Debug, Clone, Copy)]
pub struct Subspace<T> {
    space: SearchSpace,
    angles: Angles<T>,
    global: Matrix3<T>,
    local: Matrix3<T>,
    initial: State3<T>,
}

impl<T: Real> Subspace<T> {
    pub fn new(space: &SearchSpace) -> Self {
        Self {
            space: *space,
            angles: space.angles(),
            global: global_grover_matrix(space),
            local: local_grover_matrix(space),
            initial: initial_state(space),
        }
    }

    pub fn space(&self) -> &SearchSpace {
        &self.space
    }

    pub fn angles(&self) -> &Angles<T> {
        &self.angles
    }

    pub fn global(&self) -> &Matrix3<T> {
        &self.global
    }

    pub fn local(&self) -> &Matrix3<T> {
        &self.local
    }

    pub fn initial(&self) -> State3<T> {
        self.initial
    }

    /// One query of the given kind.
    #[inline]
    pub fn step(&self, kind: OperatorKind, v: &State3<T>) -> State3<T> {
        match kind {
            OperatorKind::Global => self.global.apply(v),
            OperatorKind::Local => self.local.apply(v),
        }
    }

    /// `G_m^j` in closed form: a single rotation by `2jθ2`.
    pub fn local_power(&self, j: u64) -> Matrix3<T> {
        match j {
            0 => Matrix3::identity(),
            1 => self.local,
            _ => Matrix3::plane_rotation(T::of(2.0) * T::of_u64(j) * self.angles.theta2),
        }
    }

    /// `G_n^j |v⟩` by `j` successive products.
    pub fn global_power_apply(&self, j: u64, v: &State3<T>) -> State3<T> {
        (0..j).fold(*v, |acc, _| self.global.apply(&acc))
    }

    /// Applies `seq` to an arbitrary starting vector.
    pub fn apply_to(&self, seq: &OperatorSequence, start: &State3<T>) -> State3<T> {
        seq.runs().iter().fold(*start, |v, run| match run.kind {
            OperatorKind::Global => self.global_power_apply(run.count, &v),
            OperatorKind::Local => self.local_power(run.count).apply(&v),
        })
    }

    /// `S |s_n⟩`.
    pub fn apply(&self, seq: &OperatorSequence) -> State3<T> {
        self.apply_to(seq, &self.initial)
    }
}

/// `S |s_n⟩` with runs applied in stored (application) order.
pub fn apply_sequence<T: Real>(space: &SearchSpace, seq: &OperatorSequence) -> State3<T> {
    Subspace::new(space).apply(seq)
}

/// Probability of identifying the target block after `seq`.
pub fn block_success_probability<T: Real>(
    space: &SearchSpace,
    seq: &OperatorSequence,
) -> Result<T> {
    apply_sequence::<T>(space, seq).block_probability()
}

/// Probability of measuring the target item itself after `seq`.
pub fn full_target_probability<T: Real>(space: &SearchSpace, seq: &OperatorSequence) -> Result<T> {
    apply_sequence::<T>(space, seq).target_probability()
}

/// `sin²((2k+1)θ1)` for a database of `2^n` items.
pub fn grover_full_search_probability<T: Real>(n: u32, k: u64) -> T {
    let theta1 = crate::search_space::inv_sqrt_pow2::<T>(n).asin();
    let s = ((T::of(2.0) * T::of_u64(k) + T::one()) * theta1).sin();
    s * s
}

/// Block probability when only the global operator is used `k` times:
/// `sin²((2k+1)θ1) + (b-1)/(N-1) · cos²((2k+1)θ1)`.
pub fn grover_only_block_probability<T: Real>(space: &SearchSpace, k: u64) -> T {
    let a: Angles<T> = space.angles();
    let phase = (T::of(2.0) * T::of_u64(k) + T::one()) * a.theta1;
    let (s, c) = (phase.sin(), phase.cos());
    let b = T::of_u64(space.block_size());
    let n = T::of_u64(space.database_size());
    s * s + (b - T::one()) / (n - T::one()) * c * c
}

/// Evaluates the three-stage family `G_n G_m^k2 G_n^k1` for many `(k1, k2)`
/// pairs, caching `G_n^j |s_n⟩` for every `j` up to a limit.
#[derive(Debug, Clone)]
pub struct GrkEvaluator<T> {
    model: Subspace<T>,
    prefix: Vec<State3<T>>,
}

impl<T: Real> GrkEvaluator<T> {
    /// Caches global prefixes for `k1` in `0..=max_k1`.
    pub fn new(space: &SearchSpace, max_k1: u64) -> Self {
        let model = Subspace::new(space);
        let mut prefix = Vec::with_capacity(max_k1 as usize + 1);
        let mut v = model.initial();
        prefix.push(v);
        for _ in 0..max_k1 {
            v = model.global.apply(&v);
            prefix.push(v);
        }
        Self { model, prefix }
    }

    pub fn model(&self) -> &Subspace<T> {
        &self.model
    }

    pub fn max_k1(&self) -> u64 {
        self.prefix.len() as u64 - 1
    }

    /// State after `G_n^k1`.
    pub fn prefix(&self, k1: u64) -> State3<T> {
        self.prefix[k1 as usize]
    }

    /// Final state for `(k1, k2)` given a precomputed `G_m^k2`.
    #[inline]
    pub fn finish(&self, k1: u64, local_power: &Matrix3<T>) -> State3<T> {
        let v = local_power.apply(&self.prefix[k1 as usize]);
        self.model.global.apply(&v)
    }

    /// Final state of `G_n G_m^k2 G_n^k1 |s_n⟩`.
    pub fn state(&self, k1: u64, k2: u64) -> State3<T> {
        self.finish(k1, &self.model.local_power(k2))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn space(n: u32, m: u32) -> SearchSpace {
        SearchSpace::new(n, m).unwrap()
    }

    #[test]
    fn initial_state_examples() {
        let v: State3<f64> = initial_state(&space(8, 7));
        assert!((v.amp_bbar - 0.5f64.sqrt()).abs() < 1e-15);
        let v: State3<f64> = initial_state(&space(8, 2));
        assert!((v.amp_t - 1.0 / 16.0).abs() < 1e-16);
        assert!((v.norm_sqr() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn global_matrix_structure() {
        let s = space(8, 2);
        let g: Matrix3<f64> = global_grover_matrix(&s);
        assert!((g.rows[0][0] - (1.0 - 2.0 / 256.0)).abs() < 1e-15);
        assert!((g.determinant() + 1.0).abs() < 1e-12);
        assert!(g.orthogonality_defect() < 1e-12);
    }

    #[test]
    fn global_matrix_reduces_to_2d_rotation_when_blocks_are_single_items() {
        let s = space(1, 0);
        let g: Matrix3<f64> = global_grover_matrix(&s);
        let theta1 = s.angles::<f64>().theta1;
        // |bt̄⟩ is empty; on (|t⟩, |b̄⟩) the operator rotates by 2θ1.
        assert!((g.rows[0][0] - (2.0 * theta1).cos()).abs() < 1e-15);
        assert!((g.rows[0][2] - (2.0 * theta1).sin()).abs() < 1e-15);
        assert!((g.rows[2][0] + (2.0 * theta1).sin()).abs() < 1e-15);
        assert!((g.rows[2][2] - (2.0 * theta1).cos()).abs() < 1e-15);
    }

    #[test]
    fn local_matrix_structure() {
        let l: Matrix3<f64> = local_grover_matrix(&space(8, 2));
        assert_eq!(l.rows[2][2], 1.0);
        assert!((l.determinant() - 1.0).abs() < 1e-12);
        let l: Matrix3<f64> = local_grover_matrix(&space(5, 1));
        // 2θ2 = π/2
        assert!(l.rows[0][0].abs() < 1e-15);
        assert!((l.rows[0][1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn matrix_invariants_for_all_spaces() {
        for n in 1..=62 {
            for m in 0..n {
                let s = space(n, m);
                let g: Matrix3<f64> = global_grover_matrix(&s);
                let l: Matrix3<f64> = local_grover_matrix(&s);
                assert!(g.orthogonality_defect() < 1e-12, "{s}");
                assert!(l.orthogonality_defect() < 1e-12, "{s}");
                assert!((g.determinant() + 1.0).abs() < 1e-12, "{s}");
                assert!((l.determinant() - 1.0).abs() < 1e-12, "{s}");
            }
        }
    }

    #[test]
    fn local_power_matches_repeated_products() {
        let model = Subspace::<f64>::new(&space(9, 4));
        let mut v = model.initial();
        for _ in 0..37 {
            v = model.local().apply(&v);
        }
        let w = model.local_power(37).apply(&model.initial());
        assert!(v.max_abs_diff(&w) < 1e-13);
    }

    #[test]
    fn empty_sequence_probabilities() {
        let s = space(8, 2);
        let e = OperatorSequence::new();
        let pb: f64 = block_success_probability(&s, &e).unwrap();
        let pt: f64 = full_target_probability(&s, &e).unwrap();
        assert!((pb - 1.0 / 64.0).abs() < 1e-15);
        assert!((pt - 1.0 / 256.0).abs() < 1e-16);
    }

    #[test]
    fn table_entries_for_two_queries() {
        // G_8 G_2: local first, then global.
        let seq = OperatorSequence::grk(0, 1);
        let p: f64 = block_success_probability(&space(8, 2), &seq).unwrap();
        assert!((p - 0.105747).abs() < 5e-7);
        let p: f64 = block_success_probability(&space(8, 7), &seq).unwrap();
        assert!((p - 0.560089).abs() < 5e-7);
    }

    #[test]
    fn local_runs_leave_bbar_untouched() {
        let s = space(8, 3);
        let v0: State3<f64> = initial_state(&s);
        for k in [1, 2, 5, 100] {
            let v: State3<f64> = apply_sequence(&s, &OperatorSequence::local(k));
            assert!((v.amp_bbar - v0.amp_bbar).abs() < 1e-13);
        }
    }

    #[test]
    fn global_only_is_grover() {
        let p: f64 = grover_full_search_probability(8, 12);
        assert!((p - 0.9999).abs() < 1e-4);
        let p0: f64 = grover_full_search_probability(8, 0);
        assert!((p0 - 1.0 / 256.0).abs() < 1e-16);
        let s = space(8, 0);
        let via_model: f64 = block_success_probability(&s, &OperatorSequence::global(12)).unwrap();
        assert!((p - via_model).abs() < 1e-14);
    }

    #[test]
    fn grover_only_block_probability_examples() {
        let s = space(8, 2);
        let p0: f64 = grover_only_block_probability(&s, 0);
        assert!((p0 - 1.0 / 64.0).abs() < 1e-15);
        let p3: f64 = grover_only_block_probability(&s, 3);
        let via: f64 = block_success_probability(&s, &OperatorSequence::global(3)).unwrap();
        assert!((p3 - via).abs() < 1e-14);
        let s0 = space(7, 0);
        let a: f64 = grover_only_block_probability(&s0, 5);
        let b: f64 = grover_full_search_probability(7, 5);
        assert!((a - b).abs() < 1e-15);
    }

    #[test]
    fn probability_guard() {
        assert!(checked_probability(1.0 + 1e-12f64).unwrap() == 1.0);
        assert!(checked_probability(-1e-12f64).unwrap() == 0.0);
        assert!(matches!(
            checked_probability(1.1f64),
            Err(Error::Consistency(_))
        ));
        assert!(checked_probability(f64::NAN).is_err());
    }

    #[test]
    fn grk_evaluator_agrees_with_sequence_application() {
        let s = space(10, 4);
        let ev = GrkEvaluator::<f64>::new(&s, 40);
        for (k1, k2) in [(0, 0), (3, 2), (17, 5), (40, 0)] {
            let direct: State3<f64> = apply_sequence(&s, &OperatorSequence::grk(k1, k2));
            assert!(ev.state(k1, k2).max_abs_diff(&direct) < 1e-13);
        }
    }

    #[test]
    fn single_precision_dynamics() {
        let s = space(8, 2);
        let p: f32 = block_success_probability(&s, &OperatorSequence::grk(0, 1)).unwrap();
        assert!((p - 0.105747).abs() < 1e-5);
        let v: State3<f32> = apply_sequence(&s, &OperatorSequence::grk(200, 30));
        assert!((v.norm_sqr() - 1.0).abs() < 1e-4);
    }

    fn arb_sequence(max_runs: usize, max_count: u64) -> impl Strategy<Value = OperatorSequence> {
        prop::collection::vec((any::<bool>(), 1..=max_count), 0..=max_runs).prop_map(|runs| {
            OperatorSequence::from_runs(runs.into_iter().map(|(local, c)| {
                (
                    if local {
                        OperatorKind::Local
                    } else {
                        OperatorKind::Global
                    },
                    c,
                )
            }))
        })
    }

    proptest! {
        #[test]
        fn norm_is_conserved(seq in arb_sequence(10, 1000), n in 2u32..40, m_frac in 0.0f64..1.0) {
            let m = ((n as f64 - 1.0) * m_frac) as u32;
            let v: State3<f64> = apply_sequence(&space(n, m), &seq);
            prop_assert!((v.norm_sqr() - 1.0).abs() <= 1e-10);
        }

        #[test]
        fn appending_local_runs_keeps_bbar(seq in arb_sequence(6, 50), extra in 1u64..500, n in 2u32..30) {
            let s = space(n, n / 2);
            let v: State3<f64> = apply_sequence(&s, &seq);
            let mut longer = seq.clone();
            longer.push(OperatorKind::Local, extra);
            let w: State3<f64> = apply_sequence(&s, &longer);
            prop_assert!((v.amp_bbar - w.amp_bbar).abs() <= 1e-13);
        }

        #[test]
        fn two_and_three_dimensional_pictures_agree(n in 1u32..40, m_frac in 0.0f64..1.0, k in 0u64..300) {
            let m = ((n as f64 - 1.0) * m_frac) as u32;
            let closed: f64 = grover_full_search_probability(n, k);
            let model: f64 = full_target_probability(&space(n, m), &OperatorSequence::global(k)).unwrap();
            prop_assert!((closed - model).abs() <= 1e-12);
        }
    }
}
