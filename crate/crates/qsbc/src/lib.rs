//! Simulation laboratory for qubit-string bit commitment.
//!
//! A bit commitment has two phases: Alice first *commits* to a bit b by
//! handing Bob quantum evidence, and later *opens* by declaring b together
//! with the classical data that lets Bob check the evidence. The scheme is
//! *concealing* when Bob cannot read b out of the evidence early (the
//! commit-0 and commit-1 evidence density operators are close in trace
//! distance) and *binding* when Alice cannot reopen the other bit.
//!
//! The protocols simulated here all encode the committed bit through a
//! correlation-immune Boolean function F applied to classical n-bit strings,
//! and ship one qubit (or one small register) per string position:
//!
//! * [`protocols::ProtocolId::P1`] — each bit of a parity-constrained string
//!   is sent as one of two non-orthogonal single-qubit states.
//! * [`protocols::ProtocolId::P2`] — conjugate coding: each bit is sent in a
//!   random one of the two BB84 bases and the basis is revealed at opening.
//! * [`protocols::ProtocolId::P3`] — as P2, plus a public reference string
//!   sent in the same (hidden) bases.
//! * [`protocols::ProtocolId::P5`] — the committed bit lives in the *basis*
//!   string; the encoded bit values are published at commit time.
//! * [`protocols::ProtocolId::P6`] — the bit is a relative phase between two
//!   computational basis states of an n-qubit register.
//! * [`protocols::ProtocolId::P8`] — the channel-hardened variant: strings
//!   are expanded through a linear code derived in [`ecc`] so that honest
//!   channel noise is corrected while cheating flips stay detectable.
//!
//! The crate is organised bottom-up:
//!
//! * [`linalg`] — dense complex matrices, Hermitian eigendecomposition, SVD,
//!   matrix square roots and polar factors, trace norm/distance, fidelity.
//! * [`bits`] — bit strings with parity/indexing helpers.
//! * [`states`] — the concrete qubit encodings, projective measurement, and
//!   the lossy/flipping channel model.
//! * [`boolfn`] — correlation-immune Boolean functions (parity and friends)
//!   with an exact immunity-order verifier and uniform preimage sampling.
//! * [`concealing`] — evidence density operators for both commitment values,
//!   their exact trace distances (closed form and brute force), the optimal
//!   (Helstrom) measurement advantage, and the distance-preserving maps that
//!   transport the P1 analysis onto P2.
//! * [`protocols`] — executable commit/open/verify state machines, honest
//!   and cheating openings, and the super-channel attack on P8.
//! * [`attack`] — the purification (EPR) attack: Schmidt + polar
//!   decompositions produce the local unitary that reopens the other bit,
//!   together with its success fidelity and resource estimates.
//! * [`ecc`] — the GF(2) code construction (check matrix with an all-ones
//!   row → punctured dual code), syndrome decoding, the statistical
//!   independence property, and the guessing/binding probability formulas.
//!
//! Numerical contract: inputs are validated at 1e-12 (Hermitian symmetry),
//! decomposition residuals are accepted at 1e-9, reconstructions at 1e-8;
//! eigenvalues of nominally-PSD matrices in [−1e-10, 0) are clamped to zero
//! and anything below −1e-10 is rejected. All randomness flows through
//! explicitly seeded ChaCha12 generators so every run is reproducible.

pub mod attack;
pub mod bits;
pub mod boolfn;
pub mod concealing;
pub mod ecc;
pub mod linalg;
pub mod protocols;
pub mod states;
