//! Evidence-state density operators and how well they hide the committed bit.
//!
//! After an honest commit to bit b, the verifier holds the evidence register
//! but not the committer's random choices. Averaging those choices out gives
//! one density operator per committed bit; the trace distance between the
//! b = 0 and b = 1 operators bounds every strategy the verifier could use to
//! guess b early (the best guess succeeds with probability ½(1 + D), see
//! [`helstrom_advantage`]).
//!
//! The constructors here fix the commitment function to parity — the
//! maximally correlation-immune choice the closed-form distances assume:
//!
//! * [`rho_p1`] — product strings of a non-orthogonal pair; D = (sin α)ⁿ.
//! * [`sigma_p2`] — conjugate-coding strings, bases averaged; D = 2^(−n/2).
//! * [`tau_p3`] — conjugate-coding strings with a per-position reference
//!   qubit; D = (√3/2)ⁿ for every reference string c.
//! * [`rho_p6`] — relative-phase states, uniform over all (x, e ≠ 0).
//!
//! [`map_e1`] and [`map_e2`] are the two channels that transport the first
//! family onto the second at α = π/4, proving the pair of concealing bounds
//! are images of one another. All constructors are exponential in n and
//! guarded by dimension caps.

use crate::bits::BitString;
use crate::linalg::{eigh, tensor_all, trace_distance, ComplexMatrix, LinalgError, C64};
use crate::protocols::ProtocolId;
use crate::states::{bb84_state, nonorthogonal_pair, phase_state, StateError};
use rand::Rng;
use thiserror::Error;

/// Qubit caps for the density constructors (dimension 2^n or 4^n).
pub const MAX_QUBITS_P1: usize = 10;
pub const MAX_QUBITS_P2: usize = 8;
pub const MAX_QUBITS_P3: usize = 5;
pub const MAX_QUBITS_P6: usize = 6;
/// Total-qubit cap for the m-fold product in [`m_fold_bound_check`].
pub const MAX_QUBITS_M_FOLD: usize = 12;

/// Errors from density construction and distance analysis.
#[derive(Debug, Error)]
pub enum ConcealingError {
    /// The requested register is too large for dense simulation.
    #[error("{qubits} qubits exceeds the cap of {max_qubits} for this construction")]
    DimensionTooLarge { qubits: usize, max_qubits: usize },
    /// This protocol's closed-form distance needs the overlap angle.
    #[error("closed-form distance for {protocol} requires the overlap angle alpha")]
    MissingAlpha { protocol: ProtocolId },
    /// No closed-form distance is known for this protocol.
    #[error("no closed-form distance for {protocol}")]
    NoClosedForm { protocol: ProtocolId },
    /// No single-copy density constructor exists for this protocol.
    #[error("no evidence density constructor for {protocol}")]
    NoDensity { protocol: ProtocolId },
    /// A matrix failed density-operator validation.
    #[error("not a density operator: {reason}")]
    NotDensity { reason: String },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    State(#[from] StateError),
}

/// A validated density operator: Hermitian, positive semidefinite, unit
/// trace.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator {
    dim: usize,
    matrix: ComplexMatrix,
}

impl DensityOperator {
    /// Validate an arbitrary matrix as a density operator: square, Hermitian,
    /// unit trace, and PSD by full eigendecomposition. Use this on matrices
    /// from outside the crate; the internal constructors skip the (costly)
    /// spectral check because positivity holds by construction.
    pub fn new(matrix: ComplexMatrix) -> Result<Self, ConcealingError> {
        if matrix.rows() != matrix.cols() {
            return Err(ConcealingError::NotDensity {
                reason: format!("matrix is {}x{}, not square", matrix.rows(), matrix.cols()),
            });
        }
        let asym = matrix.hermitian_asymmetry();
        if asym > 1e-12 {
            return Err(ConcealingError::NotDensity {
                reason: format!("conjugate asymmetry {asym:.3e}"),
            });
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > 1e-10 || tr.im.abs() > 1e-12 {
            return Err(ConcealingError::NotDensity {
                reason: format!("trace {} + {}i is not 1", tr.re, tr.im),
            });
        }
        let spectrum = eigh(&matrix)?;
        if let Some(&lambda) = spectrum.eigenvalues.iter().find(|&&lambda| lambda < -1e-10) {
            return Err(ConcealingError::NotDensity {
                reason: format!("negative eigenvalue {lambda:.3e}"),
            });
        }
        Ok(Self {
            dim: matrix.rows(),
            matrix,
        })
    }

    /// Wrap a matrix that is a density operator by construction (sum of PSD
    /// terms with unit total weight). Debug builds still spot-check the
    /// cheap invariants.
    fn from_valid_parts(matrix: ComplexMatrix) -> Self {
        debug_assert_eq!(matrix.rows(), matrix.cols());
        debug_assert!((matrix.trace().re - 1.0).abs() < 1e-9, "trace drifted");
        debug_assert!(matrix.hermitian_asymmetry() < 1e-12, "symmetry drifted");
        Self {
            dim: matrix.rows(),
            matrix,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Trace distance ½·Tr|self − other|.
    pub fn distance(&self, other: &Self) -> Result<f64, ConcealingError> {
        Ok(trace_distance(&self.matrix, &other.matrix)?)
    }

    /// Tensor product with another density operator.
    pub fn tensor(&self, other: &Self) -> Self {
        Self::from_valid_parts(crate::linalg::tensor(&self.matrix, &other.matrix))
    }

    /// m-fold tensor power.
    pub fn tensor_power(&self, m: usize) -> Self {
        assert!(m >= 1, "tensor power needs at least one factor");
        let mut out = self.clone();
        for _ in 1..m {
            out = out.tensor(self);
        }
        out
    }
}

/// Σ over all n-bit strings a of parity b of ⊗_j M_{a_j}, where position j
/// contributes `factors0[j]` when a_j = 0 and `factors1[j]` when a_j = 1.
///
/// Uses the parity-class identity
/// 2·Σ_{parity(a)=b} ⊗_j M_{a_j} = ⊗_j (M₀+M₁) + (−1)^b ⊗_j (M₀−M₁),
/// collapsing 2^(n−1) Kronecker products into two.
fn parity_class_sum(
    factors0: &[ComplexMatrix],
    factors1: &[ComplexMatrix],
    b: u8,
) -> ComplexMatrix {
    debug_assert_eq!(factors0.len(), factors1.len());
    let sums: Vec<ComplexMatrix> = factors0
        .iter()
        .zip(factors1)
        .map(|(m0, m1)| m0.add(m1).expect("matching factor dimensions"))
        .collect();
    let diffs: Vec<ComplexMatrix> = factors0
        .iter()
        .zip(factors1)
        .map(|(m0, m1)| m0.sub(m1).expect("matching factor dimensions"))
        .collect();
    let total = tensor_all(&sums);
    let signed = tensor_all(&diffs);
    let combined = if b == 0 {
        total.add(&signed).expect("same dimensions")
    } else {
        total.sub(&signed).expect("same dimensions")
    };
    combined.scale(C64::new(0.5, 0.0))
}

/// Reorder the 2-dimensional tensor factors of a square matrix:
/// `positions[k]` is the new slot of old factor k. Used to convert the
/// interleaved (data, reference) pair layout into the blocked
/// data-then-reference layout.
fn permute_qubit_factors(m: &ComplexMatrix, positions: &[usize]) -> ComplexMatrix {
    let q = positions.len();
    let dim = 1usize << q;
    assert_eq!(m.rows(), dim, "matrix dimension must be 2^(factor count)");
    let map = |i: usize| -> usize {
        let mut out = 0usize;
        for (k, &p) in positions.iter().enumerate() {
            let bit = (i >> (q - 1 - k)) & 1;
            out |= bit << (q - 1 - p);
        }
        out
    };
    let mut out = ComplexMatrix::zeros(dim, dim);
    for r in 0..dim {
        let mr = map(r);
        for c in 0..dim {
            out[(mr, map(c))] = m[(r, c)];
        }
    }
    out
}

/// Projector |a⟩_b⟨a| onto a conjugate-coding state.
fn bb84_projector(a: u8, b: u8) -> ComplexMatrix {
    bb84_state(a, b).projector()
}

/// Evidence density for the non-orthogonal-pair protocol:
/// ρ_b = 2^(−(n−1)) Σ_{parity(a)=b} |ψ_a⟩⟨ψ_a| with |ψ_a⟩ = ⊗_j |ψ_{a_j}⟩.
pub fn rho_p1(n: usize, alpha: f64, b: u8) -> Result<DensityOperator, ConcealingError> {
    if n == 0 || n > MAX_QUBITS_P1 {
        return Err(ConcealingError::DimensionTooLarge {
            qubits: n,
            max_qubits: MAX_QUBITS_P1,
        });
    }
    let (psi0, psi1) = nonorthogonal_pair(alpha)?;
    let p0 = psi0.projector();
    let p1 = psi1.projector();
    let factors0 = vec![p0; n];
    let factors1 = vec![p1; n];
    let weight = (n as f64 - 1.0).exp2().recip();
    let matrix = parity_class_sum(&factors0, &factors1, b).scale(C64::new(weight, 0.0));
    Ok(DensityOperator::from_valid_parts(matrix))
}

/// Basis-averaged single-position operator ½(|v⟩₀⟨v| + |v⟩₁⟨v|).
fn basis_averaged(v: u8) -> ComplexMatrix {
    bb84_projector(v, 0)
        .add(&bb84_projector(v, 1))
        .expect("2x2 operands")
        .scale(C64::new(0.5, 0.0))
}

/// Evidence density for the conjugate-coding protocol:
/// σ_b = 2^(−(2n−1)) Σ_β Σ_{parity(a)=b} |a⟩_β⟨a|, the average over all
/// basis strings β of the string-state projectors.
///
/// The β average factors per position, so this is computed as
/// 2^(−(n−1)) Σ_{parity(a)=b} ⊗_j ½(|a_j⟩₀⟨a_j| + |a_j⟩₁⟨a_j|).
pub fn sigma_p2(n: usize, b: u8) -> Result<DensityOperator, ConcealingError> {
    if n == 0 || n > MAX_QUBITS_P2 {
        return Err(ConcealingError::DimensionTooLarge {
            qubits: n,
            max_qubits: MAX_QUBITS_P2,
        });
    }
    let factors0 = vec![basis_averaged(0); n];
    let factors1 = vec![basis_averaged(1); n];
    let weight = (n as f64 - 1.0).exp2().recip();
    let matrix = parity_class_sum(&factors0, &factors1, b).scale(C64::new(weight, 0.0));
    Ok(DensityOperator::from_valid_parts(matrix))
}

/// Basis-averaged (data, reference) pair operator
/// ½ Σ_β |a⟩_β⟨a| ⊗ |c⟩_β⟨c| — a 4×4 block, data qubit first.
fn pair_averaged(a: u8, c: u8) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(4, 4);
    for beta in 0..2u8 {
        let term = crate::linalg::tensor(&bb84_projector(a, beta), &bb84_projector(c, beta));
        out = out.add(&term).expect("4x4 operands");
    }
    out.scale(C64::new(0.5, 0.0))
}

/// Evidence density for the reference-qubit protocol on 2n qubits, blocked
/// as the n data qubits followed by the n reference qubits:
/// τ_b(c) = 2^(−(2n−1)) Σ_β Σ_{parity(a)=b} (⊗_j |a_j⟩_{β_j}⟨a_j|) ⊗ (⊗_j |c_j⟩_{β_j}⟨c_j|).
///
/// Internally the (data_j, reference_j) pairs are kept adjacent — there the
/// β average factors per pair — and the result is reordered into the blocked
/// layout at the end.
pub fn tau_p3(n: usize, c: &BitString, b: u8) -> Result<DensityOperator, ConcealingError> {
    if n == 0 || n > MAX_QUBITS_P3 {
        return Err(ConcealingError::DimensionTooLarge {
            qubits: n,
            max_qubits: MAX_QUBITS_P3,
        });
    }
    assert_eq!(c.len(), n, "reference string must have n bits");
    let factors0: Vec<ComplexMatrix> = (0..n).map(|j| pair_averaged(0, c.bit(j))).collect();
    let factors1: Vec<ComplexMatrix> = (0..n).map(|j| pair_averaged(1, c.bit(j))).collect();
    let weight = (n as f64 - 1.0).exp2().recip();
    let interleaved = parity_class_sum(&factors0, &factors1, b).scale(C64::new(weight, 0.0));
    // Interleaved order (d₁ r₁ d₂ r₂ …) → blocked order (d₁…d_n r₁…r_n).
    let mut positions = vec![0usize; 2 * n];
    for j in 0..n {
        positions[2 * j] = j;
        positions[2 * j + 1] = n + j;
    }
    Ok(DensityOperator::from_valid_parts(permute_qubit_factors(
        &interleaved,
        &positions,
    )))
}

/// Evidence density for the relative-phase protocol: the uniform mixture of
/// (|x⟩ + (−1)^b |x⊕e⟩)/√2 over all x and all e ≠ 0, with weight
/// 1/(2ⁿ(2ⁿ−1)) per (x, e) pair.
pub fn rho_p6(n: usize, b: u8) -> Result<DensityOperator, ConcealingError> {
    if n == 0 || n > MAX_QUBITS_P6 {
        return Err(ConcealingError::DimensionTooLarge {
            qubits: n,
            max_qubits: MAX_QUBITS_P6,
        });
    }
    let dim = 1usize << n;
    let weight = 1.0 / (dim as f64 * (dim as f64 - 1.0));
    let mut matrix = ComplexMatrix::zeros(dim, dim);
    for x_index in 0..dim {
        let x = BitString::from_index(x_index, n);
        for e_index in 1..dim {
            let e = BitString::from_index(e_index, n);
            let state = phase_state(&x, &e, b)?;
            matrix = matrix.add(&state.projector())?;
        }
    }
    Ok(DensityOperator::from_valid_parts(
        matrix.scale(C64::new(weight, 0.0)),
    ))
}

/// The 4×4 pair operator ϑ(c) = Z ⊗ |c⟩₀⟨c| + X ⊗ |c⟩₁⟨c| (data qubit
/// first) whose n-fold tensor product is, up to normalization, the
/// difference τ₀(c) − τ₁(c). Its trace norm 2√3 per pair yields the
/// closed-form distance (√3/2)ⁿ.
pub fn theta(c: u8) -> ComplexMatrix {
    let z = ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0]).expect("2x2");
    let x = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).expect("2x2");
    crate::linalg::tensor(&z, &bb84_projector(c, 0))
        .add(&crate::linalg::tensor(&x, &bb84_projector(c, 1)))
        .expect("4x4 operands")
}

/// The reflection V (angle 3π/8 column frame) whose n-fold conjugation
/// aligns the non-orthogonal pair at α = π/4 with the conjugate-coding
/// states: V|ψ₀⟩ = |0⟩₁ and V|ψ₁⟩ = |1⟩₀.
fn reflection_v() -> ComplexMatrix {
    let t = 3.0 * std::f64::consts::PI / 8.0;
    ComplexMatrix::from_real(2, 2, &[t.cos(), t.sin(), t.sin(), -t.cos()]).expect("2x2")
}

fn hadamard() -> ComplexMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::from_real(2, 2, &[h, h, h, -h]).expect("2x2")
}

fn qubit_count_of(dim: usize) -> usize {
    let n = dim.trailing_zeros() as usize;
    assert_eq!(1usize << n, dim, "dimension must be a power of two");
    n
}

/// First transport channel: conjugation by the local reflection V on every
/// qubit. Unitary, so trace distances are preserved exactly.
pub fn map_e1(rho: &DensityOperator) -> DensityOperator {
    let n = qubit_count_of(rho.dim());
    let v = tensor_all(&vec![reflection_v(); n]);
    let moved = v
        .mul(rho.matrix())
        .and_then(|m| m.mul(&v.dagger()))
        .expect("dimensions agree by construction");
    DensityOperator::from_valid_parts(moved)
}

/// Second transport channel: independently on each qubit, apply the
/// Hadamard with probability ½ — equivalently the uniform mixture
/// 2^(−n) Σ_S H_S ρ H_S over all qubit subsets S. A mixture of unitaries,
/// hence doubly stochastic and trace-distance non-increasing.
pub fn map_e2(rho: &DensityOperator) -> DensityOperator {
    let n = qubit_count_of(rho.dim());
    let half = C64::new(0.5, 0.0);
    let mut matrix = rho.matrix().clone();
    for q in 0..n {
        // One-qubit Hadamard embedded at position q.
        let mut factors = vec![ComplexMatrix::identity(2); n];
        factors[q] = hadamard();
        let h_q = tensor_all(&factors);
        let rotated = h_q
            .mul(&matrix)
            .and_then(|m| m.mul(&h_q))
            .expect("dimensions agree by construction");
        matrix = matrix.add(&rotated).expect("same dimensions").scale(half);
    }
    DensityOperator::from_valid_parts(matrix)
}

/// Closed-form trace distance between the b = 0 and b = 1 evidence
/// densities, where one is known.
pub fn closed_form_distance(
    protocol: ProtocolId,
    n: usize,
    alpha: Option<f64>,
) -> Result<f64, ConcealingError> {
    match protocol {
        ProtocolId::P1 => {
            let alpha = alpha.ok_or(ConcealingError::MissingAlpha { protocol })?;
            // Validate the angle exactly as the state constructor does.
            nonorthogonal_pair(alpha)?;
            Ok(alpha.sin().powi(n as i32))
        }
        ProtocolId::P2 => Ok((-(n as f64) / 2.0).exp2()),
        ProtocolId::P3 => Ok((3.0f64.sqrt() / 2.0).powi(n as i32)),
        ProtocolId::P5 | ProtocolId::P6 | ProtocolId::P8 => {
            Err(ConcealingError::NoClosedForm { protocol })
        }
    }
}

/// Build the (b = 0, b = 1) evidence pair for one session string.
pub fn evidence_pair(
    protocol: ProtocolId,
    n: usize,
    alpha: Option<f64>,
) -> Result<(DensityOperator, DensityOperator), ConcealingError> {
    match protocol {
        ProtocolId::P1 => {
            let alpha = alpha.ok_or(ConcealingError::MissingAlpha { protocol })?;
            Ok((rho_p1(n, alpha, 0)?, rho_p1(n, alpha, 1)?))
        }
        ProtocolId::P2 => Ok((sigma_p2(n, 0)?, sigma_p2(n, 1)?)),
        ProtocolId::P3 => {
            // The distance is independent of the reference string; fix 0ⁿ.
            let c = BitString::zeros(n);
            Ok((tau_p3(n, &c, 0)?, tau_p3(n, &c, 1)?))
        }
        ProtocolId::P6 => Ok((rho_p6(n, 0)?, rho_p6(n, 1)?)),
        ProtocolId::P5 | ProtocolId::P8 => Err(ConcealingError::NoDensity { protocol }),
    }
}

/// Exact m-fold distance against its single-copy linear bound: returns
/// (D(ρ₀^⊗m, ρ₁^⊗m), m·D(ρ₀, ρ₁)). The first never exceeds the second.
pub fn m_fold_bound_check(
    protocol: ProtocolId,
    n: usize,
    m: usize,
    alpha: Option<f64>,
) -> Result<(f64, f64), ConcealingError> {
    let (rho0, rho1) = evidence_pair(protocol, n, alpha)?;
    let single_qubits = qubit_count_of(rho0.dim());
    let total = single_qubits * m;
    if m == 0 || total > MAX_QUBITS_M_FOLD {
        return Err(ConcealingError::DimensionTooLarge {
            qubits: total,
            max_qubits: MAX_QUBITS_M_FOLD,
        });
    }
    let single = rho0.distance(&rho1)?;
    let exact = rho0.tensor_power(m).distance(&rho1.tensor_power(m))?;
    Ok((exact, m as f64 * single))
}

/// Exact and simulated advantage of the best early-guess measurement.
#[derive(Clone, Copy, Debug)]
pub struct HelstromAdvantage {
    /// Trace distance D, computed from the positive eigenspace of p − q.
    pub exact: f64,
    /// 2·(success rate) − 1 from simulating the optimal two-outcome
    /// measurement on equiprobable inputs.
    pub empirical: f64,
    /// Standard error of the empirical advantage.
    pub std_error: f64,
}

impl HelstromAdvantage {
    /// Whether the simulation agrees with the exact value within 4 standard
    /// errors.
    pub fn consistent(&self) -> bool {
        (self.exact - self.empirical).abs() <= 4.0 * self.std_error
    }
}

/// Optimal discrimination between two equiprobable density operators.
///
/// The best measurement projects onto the positive eigenspace P₊ of p − q
/// and guesses "p" on a hit; it succeeds with probability ½(1 + D). The
/// exact advantage 2·success − 1 = D = Tr(P₊(p − q)) is returned alongside
/// a Monte-Carlo estimate from `trials` simulated discriminations.
pub fn helstrom_advantage<R: Rng>(
    p: &DensityOperator,
    q: &DensityOperator,
    trials: u64,
    rng: &mut R,
) -> Result<HelstromAdvantage, ConcealingError> {
    let difference = p.matrix().sub(q.matrix())?;
    let spectrum = eigh(&difference)?;
    let projector = spectrum.map_eigenvalues(|lambda| if lambda > 0.0 { 1.0 } else { 0.0 });
    let exact = projector.mul(&difference)?.trace().re;

    // Per-state probability that the measurement lands in the positive
    // eigenspace (the "guess p" outcome).
    let hit_p = projector.mul(p.matrix())?.trace().re.clamp(0.0, 1.0);
    let hit_q = projector.mul(q.matrix())?.trace().re.clamp(0.0, 1.0);
    let mut successes = 0u64;
    for _ in 0..trials {
        let sent_p = rng.random::<bool>();
        let hit_prob = if sent_p { hit_p } else { hit_q };
        let guessed_p = rng.random::<f64>() < hit_prob;
        if guessed_p == sent_p {
            successes += 1;
        }
    }
    let rate = successes as f64 / trials as f64;
    let std_error = 2.0 * (rate * (1.0 - rate) / trials as f64).sqrt();
    Ok(HelstromAdvantage {
        exact,
        empirical: 2.0 * rate - 1.0,
        std_error,
    })
}
