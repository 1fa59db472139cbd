//! Brute-force state-vector simulator over all `2^n` basis states.
//!
//! Every operator here is a real reflection, so amplitudes stay real and are
//! stored as plain floats. Blocks are contiguous index ranges
//! `[j·b, (j+1)·b)`: the block index is the high `n - m` bits of an address.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::search_space::SearchSpace;
use crate::sequence::{OperatorKind, OperatorSequence};
use crate::subspace::{State3, Subspace};

/// Largest qubit count the simulator accepts.
pub const MAX_SIMULATED_QUBITS: u32 = 14;

/// Seed used when the caller does not pick one.
pub const DEFAULT_SEED: u64 = 42;

/// Full amplitude vector with a single marked item.
#[derive(Debug, Clone, PartialEq)]
pub struct FullState<T> {
    n: u32,
    target: u64,
    amplitudes: Vec<T>,
}

impl<T: Real> FullState<T> {
    /// Uniform superposition `|s_n⟩`.
    pub fn uniform(n: u32, target: u64) -> Result<Self> {
        if n == 0 || n > MAX_SIMULATED_QUBITS {
            return Err(Error::Resource(format!(
                "state-vector simulation supports 1..={MAX_SIMULATED_QUBITS} qubits, got {n}"
            )));
        }
        let size = 1u64 << n;
        if target >= size {
            return Err(Error::Parameter(format!(
                "target index {target} outside 0..{size}"
            )));
        }
        let amp = T::one() / T::of_u64(size).sqrt();
        Ok(Self {
            n,
            target,
            amplitudes: vec![amp; size as usize],
        })
    }

    /// Wraps explicit amplitudes; the length must be `2^n`.
    pub fn from_amplitudes(n: u32, target: u64, amplitudes: Vec<T>) -> Result<Self> {
        let mut s = Self::uniform(n, target)?;
        if amplitudes.len() != s.amplitudes.len() {
            return Err(Error::Parameter(format!(
                "expected {} amplitudes, got {}",
                s.amplitudes.len(),
                amplitudes.len()
            )));
        }
        s.amplitudes = amplitudes;
        Ok(s)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn target(&self) -> u64 {
        self.target
    }

    pub fn amplitudes(&self) -> &[T] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> T {
        self.amplitudes
            .iter()
            .fold(T::zero(), |acc, &a| acc + a * a)
    }

    /// Flips the sign of the target amplitude.
    pub fn apply_oracle(&mut self) {
        let t = self.target as usize;
        self.amplitudes[t] = -self.amplitudes[t];
    }

    /// `v <- 2·mean(v) - v` over the whole vector.
    pub fn apply_global_diffusion(&mut self) {
        reflect_about_mean(&mut self.amplitudes);
    }

    /// `v <- 2·mean_block(v) - v` inside every block of `2^m` items.
    /// With `m = 0` every block is a single item and this is the identity.
    pub fn apply_local_diffusion(&mut self, m: u32) -> Result<()> {
        if m >= self.n {
            return Err(Error::Parameter(format!(
                "block qubit count m = {m} must be smaller than n = {}",
                self.n
            )));
        }
        for block in self.amplitudes.chunks_mut(1 << m) {
            reflect_about_mean(block);
        }
        Ok(())
    }

    /// One query: the oracle followed by the matching diffusion.
    pub fn apply_query(&mut self, kind: OperatorKind, m: u32) -> Result<()> {
        self.apply_oracle();
        match kind {
            OperatorKind::Global => self.apply_global_diffusion(),
            OperatorKind::Local => self.apply_local_diffusion(m)?,
        }
        Ok(())
    }

    /// Coordinates in the `(|t⟩, |bt̄⟩, |b̄⟩)` basis.
    pub fn project(&self, m: u32) -> State3<T> {
        let b = 1usize << m;
        let t = self.target as usize;
        let start = t / b * b;
        let block = &self.amplitudes[start..start + b];
        let size = self.amplitudes.len();
        let in_block: T = block.iter().fold(T::zero(), |acc, &a| acc + a) - self.amplitudes[t];
        let total: T = self.amplitudes.iter().fold(T::zero(), |acc, &a| acc + a);
        let outside = total - in_block - self.amplitudes[t];
        let amp_bt = if b > 1 {
            in_block / T::of_u64(b as u64 - 1).sqrt()
        } else {
            T::zero()
        };
        State3::new(
            self.amplitudes[t],
            amp_bt,
            outside / T::of_u64((size - b) as u64).sqrt(),
        )
    }

    /// Total probability of the target's block.
    pub fn block_probability(&self, m: u32) -> T {
        let b = 1usize << m;
        let start = self.target as usize / b * b;
        self.amplitudes[start..start + b]
            .iter()
            .fold(T::zero(), |acc, &a| acc + a * a)
    }

    pub fn target_probability(&self) -> T {
        let a = self.amplitudes[self.target as usize];
        a * a
    }
}

fn reflect_about_mean<T: Real>(v: &mut [T]) {
    let sum = v.iter().fold(T::zero(), |acc, &a| acc + a);
    let twice_mean = T::of(2.0) * sum / T::of_u64(v.len() as u64);
    for a in v.iter_mut() {
        *a = twice_mean - *a;
    }
}

/// Result of running a sequence on the full state.
#[derive(Debug, Clone, PartialEq)]
pub struct Simulation<T> {
    pub block_probability: T,
    pub target_probability: T,
    pub projection: State3<T>,
    /// Squared norm outside the three-dimensional span.
    pub residual: T,
}

/// Applies `seq` to `|s_n⟩` query by query.
pub fn simulate_sequence<T: Real>(
    space: &SearchSpace,
    target: u64,
    seq: &OperatorSequence,
) -> Result<Simulation<T>> {
    let mut state = FullState::<T>::uniform(space.n(), target)?;
    for kind in seq.kinds() {
        state.apply_query(kind, space.m())?;
    }
    let projection = state.project(space.m());
    Ok(Simulation {
        block_probability: state.block_probability(space.m()),
        target_probability: state.target_probability(),
        residual: state.norm_sqr() - projection.norm_sqr(),
        projection,
    })
}

/// Outcome of a randomised comparison against the subspace model.
#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub n: u32,
    pub m: u32,
    pub sequences: usize,
    pub seed: u64,
    /// Largest amplitude difference over all sequences.
    pub max_deviation: f64,
    /// Largest squared norm left outside the span.
    pub max_residual: f64,
    pub worst_sequence: OperatorSequence,
    pub worst_target: u64,
}

/// Draws a random sequence of `1..=max_k` queries.
pub fn random_sequence<R: Rng>(rng: &mut R, max_k: u32) -> OperatorSequence {
    let len = rng.gen_range(1..=max_k.max(1));
    OperatorSequence::from_kinds((0..len).map(|_| {
        if rng.gen_bool(0.5) {
            OperatorKind::Local
        } else {
            OperatorKind::Global
        }
    }))
}

/// Runs `count` random sequences with random targets through both models
/// and fails on the first amplitude deviation above `tol`.
pub fn verify_subspace(
    n: u32,
    m: u32,
    count: usize,
    max_k: u32,
    tol: f64,
    seed: u64,
) -> Result<VerificationReport> {
    let space = SearchSpace::new(n, m)?;
    if n > MAX_SIMULATED_QUBITS {
        return Err(Error::Resource(format!(
            "state-vector simulation supports at most {MAX_SIMULATED_QUBITS} qubits, got {n}"
        )));
    }
    let model = Subspace::<f64>::new(&space);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = VerificationReport {
        n,
        m,
        sequences: count,
        seed,
        max_deviation: 0.0,
        max_residual: 0.0,
        worst_sequence: OperatorSequence::new(),
        worst_target: 0,
    };
    for _ in 0..count {
        let seq = random_sequence(&mut rng, max_k);
        let target = rng.gen_range(0..space.database_size());
        let sim = simulate_sequence::<f64>(&space, target, &seq)?;
        let deviation = model.apply(&seq).max_abs_diff(&sim.projection);
        if deviation > tol || deviation.is_nan() {
            return Err(Error::Verification {
                sequence: seq.to_tokens(),
                target,
                deviation,
                tol,
            });
        }
        if deviation >= report.max_deviation {
            report.max_deviation = deviation;
            report.worst_sequence = seq;
            report.worst_target = target;
        }
        report.max_residual = report.max_residual.max(sim.residual.abs());
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space(n: u32, m: u32) -> SearchSpace {
        SearchSpace::new(n, m).unwrap()
    }

    #[test]
    fn oracle_flips_only_the_target() {
        let mut s = FullState::<f64>::uniform(2, 3).unwrap();
        s.apply_oracle();
        assert_eq!(s.amplitudes(), &[0.5, 0.5, 0.5, -0.5]);
        s.apply_oracle();
        assert_eq!(s.amplitudes(), &[0.5; 4]);
    }

    #[test]
    fn diffusions_fix_uniform_and_are_involutions() {
        let mut s = FullState::<f64>::uniform(6, 5).unwrap();
        let u = s.clone();
        s.apply_global_diffusion();
        s.apply_local_diffusion(3).unwrap();
        for (a, b) in s.amplitudes().iter().zip(u.amplitudes()) {
            assert!((a - b).abs() < 1e-15);
        }
        s.apply_oracle();
        let marked = s.clone();
        s.apply_global_diffusion();
        s.apply_global_diffusion();
        for (a, b) in s.amplitudes().iter().zip(marked.amplitudes()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn local_diffusion_stays_in_block() {
        let mut amps = vec![0.0f64; 16];
        amps[4] = 1.0;
        let mut s = FullState::from_amplitudes(4, 0, amps).unwrap();
        s.apply_local_diffusion(2).unwrap();
        for (i, a) in s.amplitudes().iter().enumerate() {
            if !(4..8).contains(&i) {
                assert_eq!(*a, 0.0);
            }
        }
        assert!((s.amplitudes()[4] + 0.5).abs() < 1e-15);
        assert!((s.amplitudes()[5] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn oracle_overlap() {
        let mut s = FullState::<f64>::uniform(6, 17).unwrap();
        s.apply_oracle();
        assert!((s.amplitudes()[17] + 1.0 / 8.0).abs() < 1e-15);
    }

    #[test]
    fn empty_sequence_is_uniform() {
        let sim = simulate_sequence::<f64>(&space(8, 2), 100, &OperatorSequence::new()).unwrap();
        assert!((sim.block_probability - 1.0 / 64.0).abs() < 1e-15);
        assert!((sim.target_probability - 1.0 / 256.0).abs() < 1e-15);
    }

    #[test]
    fn tabulated_two_query_probability() {
        let seq: OperatorSequence = "l:1,g:1".parse().unwrap();
        for target in [0, 77, 255] {
            let sim = simulate_sequence::<f64>(&space(8, 2), target, &seq).unwrap();
            assert!((sim.block_probability - 0.105747).abs() < 5e-7);
        }
    }

    #[test]
    fn size_cap() {
        assert!(matches!(
            FullState::<f64>::uniform(15, 0),
            Err(Error::Resource(_))
        ));
        assert!(matches!(
            FullState::<f64>::uniform(4, 16),
            Err(Error::Parameter(_))
        ));
        assert!(matches!(
            verify_subspace(16, 3, 1, 4, 1e-10, 1),
            Err(Error::Resource(_))
        ));
    }

    #[test]
    fn verification_reports_seed_and_worst_case() {
        let r = verify_subspace(6, 3, 50, 20, 1e-10, DEFAULT_SEED).unwrap();
        assert_eq!(r.seed, 42);
        assert!(r.max_deviation <= 1e-10);
        assert!(r.max_residual <= 1e-12);
        assert!(!r.worst_sequence.is_empty());
    }

    #[test]
    fn verification_failure_names_sequence() {
        match verify_subspace(6, 3, 10, 20, -1.0, 7) {
            Err(Error::Verification { sequence, .. }) => assert!(!sequence.is_empty()),
            other => panic!("unexpected {other:?}"),
        }
    }
}
