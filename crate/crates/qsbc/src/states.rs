//! Qubit encodings, projective measurement, and the channel model.
//!
//! Three state families cover every protocol in the crate:
//!
//! * a non-orthogonal single-qubit pair |ψ₀⟩, |ψ₁⟩ with tunable overlap
//!   ⟨ψ₀|ψ₁⟩ = cos α ([`nonorthogonal_pair`]);
//! * the four conjugate-coding states |0⟩₀ = |0⟩, |1⟩₀ = |1⟩, |0⟩₁ = |+⟩,
//!   |1⟩₁ = |−⟩ ([`bb84_state`]);
//! * n-qubit relative-phase states (|x⟩ + (−1)^b |x⊕e⟩)/√2 ([`phase_state`]).
//!
//! Measurement is projective ([`measure_projective`], [`PureState::measure_qubit`])
//! and transmission noise is a per-qubit loss/flip channel ([`apply_channel`]):
//! a lost qubit is replaced by |0⟩ (its flag is recorded but hidden from the
//! verifier, which measures it like any other qubit), then a bit flip in the
//! computational basis is applied with the configured probability.
//!
//! All randomness is drawn from a caller-supplied seeded generator, so
//! sessions replay exactly.

use crate::bits::BitString;
use crate::linalg::{ComplexMatrix, C64};
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Unit-norm tolerance for state construction and deserialization.
pub const TOL_NORM: f64 = 1e-10;

/// Errors from state construction and measurement.
#[derive(Debug, Error)]
pub enum StateError {
    /// The overlap angle of a non-orthogonal pair must lie strictly inside
    /// (0, π).
    #[error("overlap angle {alpha} is outside the open interval (0, pi)")]
    InvalidAngle { alpha: f64 },
    /// A relative-phase state needs a non-zero shift string.
    #[error("relative-phase shift string must not be all zero")]
    ZeroShift,
    /// Operand dimensions are incompatible.
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: String, right: String },
    /// Amplitude vector of the wrong length or norm.
    #[error("invalid amplitude vector: {reason}")]
    BadAmplitudes { reason: String },
}

/// Pure quantum state of `qubit_count` qubits: 2^qubit_count complex
/// amplitudes at unit norm. Qubit 0 is the most significant index bit, so
/// tensor order and index order agree.
///
/// Serialization hex-encodes the little-endian bytes of each amplitude's
/// (re, im) pair, giving bit-exact round trips through JSON transcripts.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "PureStateRepr", try_from = "PureStateRepr")]
pub struct PureState {
    qubit_count: usize,
    amplitudes: Vec<C64>,
}

/// Wire form of [`PureState`].
#[derive(Serialize, Deserialize)]
struct PureStateRepr {
    qubits: usize,
    amplitudes_hex: String,
}

impl From<PureState> for PureStateRepr {
    fn from(s: PureState) -> Self {
        let mut bytes = Vec::with_capacity(s.amplitudes.len() * 16);
        for z in &s.amplitudes {
            bytes.extend_from_slice(&z.re.to_le_bytes());
            bytes.extend_from_slice(&z.im.to_le_bytes());
        }
        PureStateRepr {
            qubits: s.qubit_count,
            amplitudes_hex: hex::encode(bytes),
        }
    }
}

impl TryFrom<PureStateRepr> for PureState {
    type Error = String;
    fn try_from(repr: PureStateRepr) -> Result<Self, String> {
        let bytes = hex::decode(&repr.amplitudes_hex).map_err(|e| e.to_string())?;
        let dim = 1usize << repr.qubits;
        if bytes.len() != dim * 16 {
            return Err(format!(
                "expected {} amplitude bytes, got {}",
                dim * 16,
                bytes.len()
            ));
        }
        let amplitudes = bytes
            .chunks_exact(16)
            .map(|c| {
                C64::new(
                    f64::from_le_bytes(c[0..8].try_into().unwrap()),
                    f64::from_le_bytes(c[8..16].try_into().unwrap()),
                )
            })
            .collect();
        PureState::new(repr.qubits, amplitudes).map_err(|e| e.to_string())
    }
}

impl std::fmt::Debug for PureState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "PureState({} qubits) [", self.qubit_count)?;
        for (i, z) in self.amplitudes.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{:+.4}{:+.4}i", z.re, z.im)?;
        }
        write!(f, "]")
    }
}

impl PureState {
    /// Build a state, validating the amplitude count and unit norm
    /// (within [`TOL_NORM`]).
    pub fn new(qubit_count: usize, amplitudes: Vec<C64>) -> Result<Self, StateError> {
        if amplitudes.len() != 1 << qubit_count {
            return Err(StateError::BadAmplitudes {
                reason: format!(
                    "{} amplitudes for {} qubits (expected {})",
                    amplitudes.len(),
                    qubit_count,
                    1usize << qubit_count
                ),
            });
        }
        let norm_sq: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if (norm_sq.sqrt() - 1.0).abs() > TOL_NORM {
            return Err(StateError::BadAmplitudes {
                reason: format!("norm {} is not 1", norm_sq.sqrt()),
            });
        }
        Ok(Self {
            qubit_count,
            amplitudes,
        })
    }

    /// Build from an unnormalized amplitude vector by rescaling.
    pub fn normalized(qubit_count: usize, mut amplitudes: Vec<C64>) -> Result<Self, StateError> {
        let norm: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-300 {
            return Err(StateError::BadAmplitudes {
                reason: "zero vector".into(),
            });
        }
        for z in &mut amplitudes {
            *z /= norm;
        }
        Self::new(qubit_count, amplitudes)
    }

    /// Computational basis state |a₁…a_n⟩.
    pub fn computational(bits: &BitString) -> Self {
        let mut amplitudes = vec![C64::ZERO; 1 << bits.len()];
        amplitudes[bits.to_index()] = C64::ONE;
        Self {
            qubit_count: bits.len(),
            amplitudes,
        }
    }

    pub fn qubit_count(&self) -> usize {
        self.qubit_count
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    /// Inner product ⟨self|other⟩.
    pub fn inner(&self, other: &Self) -> C64 {
        debug_assert_eq!(self.qubit_count, other.qubit_count);
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Tensor product self ⊗ other.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut amplitudes = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                amplitudes.push(a * b);
            }
        }
        Self {
            qubit_count: self.qubit_count + other.qubit_count,
            amplitudes,
        }
    }

    /// Density operator |ψ⟩⟨ψ| as a matrix.
    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.amplitudes, &self.amplitudes)
    }

    fn qubit_mask(&self, qubit: usize) -> usize {
        assert!(qubit < self.qubit_count, "qubit index out of range");
        1 << (self.qubit_count - 1 - qubit)
    }

    /// Apply a bit flip (Pauli X) to one qubit.
    pub fn apply_x(&self, qubit: usize) -> Self {
        let mask = self.qubit_mask(qubit);
        let mut amplitudes = self.amplitudes.clone();
        for i in 0..amplitudes.len() {
            if i & mask == 0 {
                amplitudes.swap(i, i | mask);
            }
        }
        Self {
            qubit_count: self.qubit_count,
            amplitudes,
        }
    }

    /// Apply a CNOT with the given control and target qubits.
    pub fn apply_cnot(&self, control: usize, target: usize) -> Self {
        assert_ne!(control, target, "CNOT control and target must differ");
        let cmask = self.qubit_mask(control);
        let tmask = self.qubit_mask(target);
        let mut amplitudes = self.amplitudes.clone();
        for i in 0..amplitudes.len() {
            if i & cmask != 0 && i & tmask == 0 {
                amplitudes.swap(i, i | tmask);
            }
        }
        Self {
            qubit_count: self.qubit_count,
            amplitudes,
        }
    }

    /// Apply a single-qubit operator (2×2 matrix) to one qubit.
    pub fn apply_single_qubit(&self, qubit: usize, op: &ComplexMatrix) -> Self {
        assert_eq!(
            (op.rows(), op.cols()),
            (2, 2),
            "single-qubit operator must be 2x2"
        );
        let mask = self.qubit_mask(qubit);
        let mut amplitudes = self.amplitudes.clone();
        for i in 0..amplitudes.len() {
            if i & mask == 0 {
                let a0 = self.amplitudes[i];
                let a1 = self.amplitudes[i | mask];
                amplitudes[i] = op[(0, 0)] * a0 + op[(0, 1)] * a1;
                amplitudes[i | mask] = op[(1, 0)] * a0 + op[(1, 1)] * a1;
            }
        }
        Self {
            qubit_count: self.qubit_count,
            amplitudes,
        }
    }

    /// Probability of projecting one qubit onto a single-qubit state, and
    /// the collapsed (renormalized) post-state for that outcome.
    ///
    /// When the probability is numerically zero the post-state is `None`.
    pub fn project_qubit(&self, qubit: usize, onto: &PureState) -> (f64, Option<PureState>) {
        assert_eq!(
            onto.qubit_count, 1,
            "projection target must be a single qubit"
        );
        let mask = self.qubit_mask(qubit);
        let phi0 = onto.amplitudes[0];
        let phi1 = onto.amplitudes[1];
        let mut projected = vec![C64::ZERO; self.dim()];
        let mut prob = 0.0;
        for i in 0..self.dim() {
            if i & mask == 0 {
                let a0 = self.amplitudes[i];
                let a1 = self.amplitudes[i | mask];
                let overlap = phi0.conj() * a0 + phi1.conj() * a1;
                prob += overlap.norm_sqr();
                projected[i] = overlap * phi0;
                projected[i | mask] = overlap * phi1;
            }
        }
        let post = if prob > 1e-300 {
            let scale = prob.sqrt();
            for z in &mut projected {
                *z /= scale;
            }
            Some(Self {
                qubit_count: self.qubit_count,
                amplitudes: projected,
            })
        } else {
            None
        };
        (prob.min(1.0), post)
    }

    /// Measure one qubit in the computational (basis 0) or conjugate
    /// (basis 1) basis: returns the outcome bit and the collapsed state.
    pub fn measure_qubit<R: Rng>(&self, qubit: usize, basis: u8, rng: &mut R) -> (u8, PureState) {
        let (p0, post0) = self.project_qubit(qubit, &bb84_state(0, basis));
        if rng.random::<f64>() < p0 {
            (
                0,
                post0.expect("positive-probability branch has a post-state"),
            )
        } else {
            let (_p1, post1) = self.project_qubit(qubit, &bb84_state(1, basis));
            (
                1,
                post1.expect("positive-probability branch has a post-state"),
            )
        }
    }
}

/// The two non-orthogonal single-qubit states with overlap cos α:
/// |ψ_b⟩ = cos(α/2)|0⟩ + (−1)^b sin(α/2)|1⟩, for α strictly inside (0, π).
///
/// The embedding (real amplitudes, symmetric about |0⟩) is a convention;
/// only the angle matters physically.
pub fn nonorthogonal_pair(alpha: f64) -> Result<(PureState, PureState), StateError> {
    if !(alpha > 0.0 && alpha < std::f64::consts::PI) {
        return Err(StateError::InvalidAngle { alpha });
    }
    let c = C64::new((alpha / 2.0).cos(), 0.0);
    let s = C64::new((alpha / 2.0).sin(), 0.0);
    let psi0 = PureState::new(1, vec![c, s]).expect("unit norm by construction");
    let psi1 = PureState::new(1, vec![c, -s]).expect("unit norm by construction");
    Ok((psi0, psi1))
}

/// Conjugate-coding state |a⟩_b: basis 0 is computational (|0⟩, |1⟩), basis 1
/// is diagonal (|+⟩, |−⟩).
pub fn bb84_state(a: u8, b: u8) -> PureState {
    debug_assert!(a <= 1 && b <= 1);
    let amplitudes = match (a, b) {
        (0, 0) => vec![C64::ONE, C64::ZERO],
        (1, 0) => vec![C64::ZERO, C64::ONE],
        (a, _) => {
            let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            vec![h, if a == 0 { h } else { -h }]
        }
    };
    PureState {
        qubit_count: 1,
        amplitudes,
    }
}

/// Relative-phase state (|x⟩ + (−1)^b |x⊕e⟩)/√2 over n qubits, e ≠ 0ⁿ.
pub fn phase_state(x: &BitString, e: &BitString, b: u8) -> Result<PureState, StateError> {
    if x.len() != e.len() {
        return Err(StateError::DimensionMismatch {
            left: format!("x has {} bits", x.len()),
            right: format!("e has {} bits", e.len()),
        });
    }
    if e.weight() == 0 {
        return Err(StateError::ZeroShift);
    }
    let n = x.len();
    let mut amplitudes = vec![C64::ZERO; 1 << n];
    let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    amplitudes[x.to_index()] += h;
    amplitudes[x.xor(e).to_index()] += if b == 0 { h } else { -h };
    PureState::new(n, amplitudes)
}

/// Projective yes/no measurement of `state` against the target `onto`.
///
/// Hits with probability |⟨onto|state⟩|²; the post-state is the projection
/// (global phase preserved) on a hit and the orthogonal complement component
/// otherwise.
pub fn measure_projective<R: Rng>(
    state: &PureState,
    onto: &PureState,
    rng: &mut R,
) -> Result<(bool, PureState), StateError> {
    if state.qubit_count != onto.qubit_count {
        return Err(StateError::DimensionMismatch {
            left: format!("{} qubits", state.qubit_count),
            right: format!("{} qubits", onto.qubit_count),
        });
    }
    let overlap = onto.inner(state);
    let p = overlap.norm_sqr().min(1.0);
    if rng.random::<f64>() < p {
        let phase = overlap / overlap.norm();
        let amplitudes = onto.amplitudes.iter().map(|&z| phase * z).collect();
        Ok((
            true,
            PureState {
                qubit_count: state.qubit_count,
                amplitudes,
            },
        ))
    } else {
        let mut amplitudes: Vec<C64> = state
            .amplitudes
            .iter()
            .zip(&onto.amplitudes)
            .map(|(&s, &o)| s - overlap * o)
            .collect();
        let norm: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-300 {
            for z in &mut amplitudes {
                *z /= norm;
            }
            Ok((
                false,
                PureState {
                    qubit_count: state.qubit_count,
                    amplitudes,
                },
            ))
        } else {
            // state == onto up to phase and the miss branch was still drawn
            // (can only happen for p within rounding of 1); replay as a hit.
            Ok((true, state.clone()))
        }
    }
}

/// Per-qubit loss/flip channel.
///
/// Loss strikes first with `loss_prob` and replaces the qubit by |0⟩ (for
/// entangled registers this is simulated as a computational-basis collapse
/// of that qubit followed by a reset to |0⟩); the qubit is flagged lost but
/// the verifier is never shown the flag. A computational-basis bit flip
/// then follows with `flip_prob`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelModel {
    pub loss_prob: f64,
    pub flip_prob: f64,
}

impl ChannelModel {
    /// Noiseless channel.
    pub fn ideal() -> Self {
        Self {
            loss_prob: 0.0,
            flip_prob: 0.0,
        }
    }

    pub fn new(loss_prob: f64, flip_prob: f64) -> Result<Self, StateError> {
        for (name, p) in [("loss_prob", loss_prob), ("flip_prob", flip_prob)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(StateError::BadAmplitudes {
                    reason: format!("{name} = {p} is not a probability"),
                });
            }
        }
        Ok(Self {
            loss_prob,
            flip_prob,
        })
    }

    /// Per-qubit probability that the channel disturbs a qubit at all:
    /// 1 − (1−loss)(1−flip). Used as the verifier's error budget.
    pub fn disturbance_prob(&self) -> f64 {
        1.0 - (1.0 - self.loss_prob) * (1.0 - self.flip_prob)
    }
}

/// Send a sequence of states through the channel, qubit by qubit.
///
/// Each returned flag reports whether any qubit of that state was lost.
pub fn apply_channel<R: Rng>(
    qubits: &[PureState],
    ch: &ChannelModel,
    rng: &mut R,
) -> Vec<(PureState, bool)> {
    qubits
        .iter()
        .map(|state| {
            let mut out = state.clone();
            let mut lost = false;
            for q in 0..out.qubit_count() {
                if ch.loss_prob > 0.0 && rng.random::<f64>() < ch.loss_prob {
                    lost = true;
                    let (outcome, collapsed) = out.measure_qubit(q, 0, rng);
                    out = if outcome == 1 {
                        collapsed.apply_x(q)
                    } else {
                        collapsed
                    };
                }
                if ch.flip_prob > 0.0 && rng.random::<f64>() < ch.flip_prob {
                    out = out.apply_x(q);
                }
            }
            (out, lost)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    #[test]
    fn pair_at_right_angle_is_plus_minus() {
        let (p0, p1) = nonorthogonal_pair(PI / 2.0).unwrap();
        assert!((p0.amplitudes()[0].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((p0.amplitudes()[1].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((p1.amplitudes()[1].re + FRAC_1_SQRT_2).abs() < 1e-15);
        assert!(p0.inner(&p1).norm() < 1e-15);
    }

    #[test]
    fn pair_overlap_is_cos_alpha() {
        let (p0, p1) = nonorthogonal_pair(PI / 4.0).unwrap();
        assert!((p0.inner(&p1).re - (PI / 4.0).cos()).abs() < 1e-15);
        // Continuity toward α → 0: nearly identical states.
        let (q0, q1) = nonorthogonal_pair(1e-3).unwrap();
        assert!(q0.inner(&q1).re >= 1.0 - 1e-6);
    }

    #[test]
    fn pair_rejects_degenerate_angles() {
        for bad in [0.0, PI, -0.5, 4.0] {
            assert!(matches!(
                nonorthogonal_pair(bad),
                Err(StateError::InvalidAngle { .. })
            ));
        }
    }

    #[test]
    fn bb84_states_match_their_definitions() {
        assert_eq!(bb84_state(0, 0).amplitudes(), &[C64::ONE, C64::ZERO]);
        let plus = bb84_state(0, 1);
        assert!((plus.amplitudes()[0].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((plus.amplitudes()[1].re - FRAC_1_SQRT_2).abs() < 1e-15);
        let minus = bb84_state(1, 1);
        assert!((minus.amplitudes()[1].re + FRAC_1_SQRT_2).abs() < 1e-15);
        // Cross-basis overlaps are all 1/2 in probability.
        for a in 0..2u8 {
            for v in 0..2u8 {
                let p = bb84_state(a, 0).inner(&bb84_state(v, 1)).norm_sqr();
                assert!((p - 0.5).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn phase_state_small_cases() {
        let x0: BitString = "0".parse().unwrap();
        let e1: BitString = "1".parse().unwrap();
        let plus = phase_state(&x0, &e1, 0).unwrap();
        assert_eq!(plus, bb84_state(0, 1));
        let minus = phase_state(&x0, &e1, 1).unwrap();
        assert_eq!(minus, bb84_state(1, 1));

        let x: BitString = "00".parse().unwrap();
        let e: BitString = "11".parse().unwrap();
        let bell = phase_state(&x, &e, 0).unwrap();
        assert!((bell.amplitudes()[0].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((bell.amplitudes()[3].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!(bell.amplitudes()[1].norm() < 1e-15);
    }

    #[test]
    fn phase_state_rejects_zero_shift() {
        let x: BitString = "01".parse().unwrap();
        let e: BitString = "00".parse().unwrap();
        assert!(matches!(phase_state(&x, &e, 0), Err(StateError::ZeroShift)));
    }

    #[test]
    fn phase_state_shift_symmetry() {
        // ψ(x⊕e, e, b) = (−1)^b ψ(x, e, b).
        for b in 0..2u8 {
            for xi in 0..8usize {
                for ei in 1..8usize {
                    let x = BitString::from_index(xi, 3);
                    let e = BitString::from_index(ei, 3);
                    let s1 = phase_state(&x, &e, b).unwrap();
                    let s2 = phase_state(&x.xor(&e), &e, b).unwrap();
                    let sign = if b == 0 { 1.0 } else { -1.0 };
                    for (a1, a2) in s1.amplitudes().iter().zip(s2.amplitudes()) {
                        assert!((a1 - sign * a2).norm() < 1e-15);
                    }
                }
            }
        }
    }

    #[test]
    fn projective_measurement_edge_cases() {
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        let (p0, p1) = nonorthogonal_pair(PI / 2.0).unwrap();
        for _ in 0..50 {
            let (hit, post) = measure_projective(&p0, &p0, &mut rng).unwrap();
            assert!(hit);
            assert_eq!(post, p0);
            let (hit, _post) = measure_projective(&p0, &p1, &mut rng).unwrap();
            assert!(!hit, "orthogonal target must never hit");
        }
    }

    #[test]
    fn projective_measurement_rate_matches_overlap() {
        // |⟨ψ₁|ψ₀⟩|² = cos²(π/4) = 1/2 at α = π/4.
        let mut rng = ChaCha12Rng::seed_from_u64(2);
        let (p0, p1) = nonorthogonal_pair(PI / 4.0).unwrap();
        let trials = 100_000u32;
        let hits = (0..trials)
            .filter(|_| measure_projective(&p0, &p1, &mut rng).unwrap().0)
            .count() as f64;
        let rate = hits / trials as f64;
        let sigma = (0.5 * 0.5 / trials as f64).sqrt();
        assert!((rate - 0.5).abs() < 3.0 * sigma, "rate {rate} vs 1/2 ± 3σ");
    }

    #[test]
    fn ideal_channel_is_identity() {
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let states = vec![bb84_state(0, 1), bb84_state(1, 0)];
        let out = apply_channel(&states, &ChannelModel::ideal(), &mut rng);
        for ((s, lost), orig) in out.iter().zip(&states) {
            assert_eq!(s, orig);
            assert!(!lost);
        }
    }

    #[test]
    fn total_loss_resets_everything_to_zero() {
        let mut rng = ChaCha12Rng::seed_from_u64(4);
        let ch = ChannelModel::new(1.0, 0.0).unwrap();
        let states = vec![bb84_state(1, 0), bb84_state(0, 1), bb84_state(1, 1)];
        for (s, lost) in apply_channel(&states, &ch, &mut rng) {
            assert!(lost);
            // |0⟩ up to a global phase left over from the collapse.
            assert!((s.inner(&bb84_state(0, 0)).norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn flip_rate_concentrates_at_flip_prob() {
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let p = 0.3;
        let ch = ChannelModel::new(0.0, p).unwrap();
        let trials = 100_000usize;
        let states = vec![bb84_state(0, 0); trials];
        let flipped = apply_channel(&states, &ch, &mut rng)
            .iter()
            .filter(|(s, _)| *s == bb84_state(1, 0))
            .count() as f64;
        let rate = flipped / trials as f64;
        let sigma = (p * (1.0 - p) / trials as f64).sqrt();
        assert!((rate - p).abs() < 3.0 * sigma, "rate {rate} vs {p} ± 3σ");
    }

    #[test]
    fn cnot_and_x_act_on_the_right_qubits() {
        // |10⟩ --CNOT(0→1)--> |11⟩, then X on qubit 0 gives |01⟩.
        let s = PureState::computational(&"10".parse().unwrap());
        let after = s.apply_cnot(0, 1);
        assert_eq!(after, PureState::computational(&"11".parse().unwrap()));
        let flipped = after.apply_x(0);
        assert_eq!(flipped, PureState::computational(&"01".parse().unwrap()));
    }

    #[test]
    fn measure_qubit_collapses_bell_pair() {
        let mut rng = ChaCha12Rng::seed_from_u64(6);
        let x: BitString = "00".parse().unwrap();
        let e: BitString = "11".parse().unwrap();
        let bell = phase_state(&x, &e, 0).unwrap();
        for _ in 0..100 {
            let (outcome, post) = bell.measure_qubit(0, 0, &mut rng);
            // Perfect correlation: the second qubit collapses to the same bit.
            let (p_same, _) = post.project_qubit(1, &bb84_state(outcome, 0));
            assert!((p_same - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn serde_round_trip_is_bit_exact() {
        let (p0, _) = nonorthogonal_pair(0.37).unwrap();
        let json = serde_json::to_string(&p0).unwrap();
        let back: PureState = serde_json::from_str(&json).unwrap();
        assert_eq!(p0.amplitudes().len(), back.amplitudes().len());
        for (a, b) in p0.amplitudes().iter().zip(back.amplitudes()) {
            assert_eq!(a.re.to_bits(), b.re.to_bits());
            assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
    }
}
