//! Commitment sessions: commit / open / verify, plus the cheating openings.
//!
//! A session binds one bit b. [`commit`] draws the committer's random
//! strings, prepares evidence qubits, passes them through the channel, and
//! returns a [`SessionTranscript`] holding both sides' views. [`open`]
//! assembles the honest declaration; [`verify`] measures the evidence
//! against a declaration and records a [`Verdict`].
//!
//! Six protocols share this machinery:
//!
//! * **P1** — each string a⁽ⁱ⁾ satisfies F(a⁽ⁱ⁾) = b and is sent as the
//!   product of two fixed non-orthogonal states selected by its bits.
//! * **P2** — same strings, sent as conjugate-coding states in a privately
//!   random basis per qubit, revealed only at opening.
//! * **P3** — P2 plus a public reference bit c_j per position, encoded in
//!   the same basis as the data qubit; the matching reference measurement
//!   replaces any post-commit basis announcement.
//! * **P5** — the roles invert: the basis string carries the commitment
//!   (F(b⁽ⁱ⁾) = b) while the encoded bits a⁽ⁱ⁾ are published at commit.
//! * **P6** — one n-qubit state (|x⟩ + (−1)^b |x⊕e⟩)/√2 per string; the
//!   verifier checks b with a CNOT parity circuit on the e-support.
//! * **P8** — the strings are block-encoded with a linear code before
//!   conjugate coding, buying tolerance to a noisy channel.
//!
//! Two dishonest openings are provided for calibration:
//! [`bitflip_cheat_open`] (declare 1−b after flipping one bit per string)
//! and [`super_channel_cheat`] (alter declared codeword bits of a P8
//! session that secretly enjoyed a perfect channel).
//!
//! Acceptance under noise uses a transcript-level budget: with per-qubit
//! disturbance probability p = 1 − (1−loss)(1−flip), the verifier rejects
//! when the mismatch fraction exceeds p + 3·√(p(1−p)/total); a noiseless
//! configuration therefore tolerates no mismatch at all.

use crate::bits::BitString;
use crate::boolfn::{BoolFnError, BooleanFn};
use crate::ecc::{encode, syndrome_decode, EccError, LinearCode};
use crate::states::{
    apply_channel, bb84_state, measure_projective, nonorthogonal_pair, phase_state, ChannelModel,
    PureState, StateError,
};
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// The six commitment protocols implemented by this crate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProtocolId {
    P1,
    P2,
    P3,
    P5,
    P6,
    P8,
}

impl ProtocolId {
    pub const ALL: [ProtocolId; 6] = [
        ProtocolId::P1,
        ProtocolId::P2,
        ProtocolId::P3,
        ProtocolId::P5,
        ProtocolId::P6,
        ProtocolId::P8,
    ];
}

impl std::fmt::Display for ProtocolId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ProtocolId::P1 => "p1",
            ProtocolId::P2 => "p2",
            ProtocolId::P3 => "p3",
            ProtocolId::P5 => "p5",
            ProtocolId::P6 => "p6",
            ProtocolId::P8 => "p8",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for ProtocolId {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "p1" => Ok(ProtocolId::P1),
            "p2" => Ok(ProtocolId::P2),
            "p3" => Ok(ProtocolId::P3),
            "p5" => Ok(ProtocolId::P5),
            "p6" => Ok(ProtocolId::P6),
            "p8" => Ok(ProtocolId::P8),
            other => Err(format!(
                "unknown protocol {other:?} (expected p1|p2|p3|p5|p6|p8)"
            )),
        }
    }
}

/// Errors from session construction and the cheating openings.
#[derive(Debug, Error)]
pub enum ProtocolError {
    /// The transcript has no commit-phase data to open.
    #[error("session has no commit-phase evidence to open")]
    NotCommitted,
    /// The requested flip pattern does not fit the protocol's cheat shape.
    #[error("invalid flip pattern: {reason}")]
    InvalidFlipPattern { reason: String },
    /// Parameters are internally inconsistent for the chosen protocol.
    #[error("parameter mismatch: {reason}")]
    ParamMismatch { reason: String },
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    BoolFn(#[from] BoolFnError),
    #[error(transparent)]
    Ecc(#[from] EccError),
}

/// Everything a session needs before the first qubit is prepared.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolParams {
    pub protocol_id: ProtocolId,
    /// String length (qubits per string for P1/P2/P5; position pairs for
    /// P3; register width for P6; pre-encoding message length for P8).
    pub n: usize,
    /// Number of committed strings per session.
    pub m: usize,
    /// Overlap angle of the P1 state pair; ignored elsewhere.
    pub alpha: Option<f64>,
    /// Commitment function F with arity n.
    pub boolean_fn: BooleanFn,
    /// Channel the verifier budgets for (and, normally, the channel the
    /// evidence actually crosses).
    pub channel: ChannelModel,
    /// Derived linear code (P8 only).
    pub code: Option<LinearCode>,
    /// Seed recorded for reproducibility; the caller builds the session rng
    /// from it.
    pub seed: u64,
}

impl ProtocolParams {
    /// Check the cross-field rules for the chosen protocol.
    pub fn validate(&self) -> Result<(), ProtocolError> {
        if self.n == 0 || self.m == 0 {
            return Err(ProtocolError::ParamMismatch {
                reason: format!("n = {} and m = {} must both be positive", self.n, self.m),
            });
        }
        if self.boolean_fn.arity() != self.n {
            return Err(ProtocolError::ParamMismatch {
                reason: format!(
                    "commitment function arity {} does not match n = {}",
                    self.boolean_fn.arity(),
                    self.n
                ),
            });
        }
        match self.protocol_id {
            ProtocolId::P1 => {
                let alpha = self.alpha.ok_or(ProtocolError::ParamMismatch {
                    reason: "this protocol needs the overlap angle alpha".into(),
                })?;
                nonorthogonal_pair(alpha)?;
            }
            ProtocolId::P8 => {
                let code = self.code.as_ref().ok_or(ProtocolError::ParamMismatch {
                    reason: "this protocol needs a derived linear code".into(),
                })?;
                if !self.n.is_multiple_of(code.dimension()) {
                    return Err(ProtocolError::ParamMismatch {
                        reason: format!(
                            "code block size {} must divide n = {}",
                            code.dimension(),
                            self.n
                        ),
                    });
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// Qubits per committed string.
    pub fn qubits_per_string(&self) -> usize {
        match self.protocol_id {
            ProtocolId::P1 | ProtocolId::P2 | ProtocolId::P5 | ProtocolId::P6 => self.n,
            ProtocolId::P3 => 2 * self.n,
            ProtocolId::P8 => {
                let code = self.code.as_ref().expect("validated");
                (self.n / code.dimension()) * code.length()
            }
        }
    }

    /// Total evidence qubits in a session.
    pub fn total_qubits(&self) -> usize {
        self.m * self.qubits_per_string()
    }
}

/// The committer's private randomness, kept off the wire until opening.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PrivateRecord {
    /// Committed strings a⁽ⁱ⁾ (P1/P2/P3/P8); the published strings for P5
    /// live in [`PublicCommitData`] instead.
    pub a_strings: Vec<BitString>,
    /// Per-qubit basis strings (P2/P3: length n; P5: the committed basis
    /// strings; P8: length ζ).
    pub basis_strings: Vec<BitString>,
    /// P6 register values x⁽ⁱ⁾.
    pub x_strings: Vec<BitString>,
    /// P6 shift strings e⁽ⁱ⁾ (never zero).
    pub e_strings: Vec<BitString>,
    /// P8 concatenated codewords, ζ bits per string.
    pub codewords: Vec<BitString>,
}

/// Values published during the commit phase.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PublicCommitData {
    /// P3 reference strings c⁽ⁱ⁾.
    pub reference_strings: Vec<BitString>,
    /// P5 encoded-bit strings a⁽ⁱ⁾ (public by design).
    pub a_strings: Vec<BitString>,
}

/// A declaration made at opening time (honest or otherwise).
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Opening {
    pub declared_bit: u8,
    /// Declared strings a⁽ⁱ⁾ (P1/P2/P3/P8).
    pub a_strings: Vec<BitString>,
    /// Declared basis strings (P2/P3/P8), or the committed basis strings
    /// themselves (P5).
    pub basis_strings: Vec<BitString>,
    /// Declared shift strings (P6).
    pub e_strings: Vec<BitString>,
    /// Declared codewords (P8).
    pub codewords: Vec<BitString>,
}

/// Outcome of verification, with the first failed check as the reason.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub accepted: bool,
    pub reason: String,
}

impl Verdict {
    fn accept() -> Self {
        Self {
            accepted: true,
            reason: "all checks passed".into(),
        }
    }

    fn reject(reason: impl Into<String>) -> Self {
        Self {
            accepted: false,
            reason: reason.into(),
        }
    }
}

/// Full record of one commitment session: the committer's private inputs,
/// the verifier's received evidence, and (after the fact) the opening and
/// verdict. Serializes to JSON with bit-exact amplitude round-trips.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SessionTranscript {
    pub params: ProtocolParams,
    pub committed_bit: u8,
    pub private_record: PrivateRecord,
    /// Post-channel evidence held by the verifier: one entry per qubit,
    /// except P6 where each entry is one n-qubit register.
    pub evidence: Vec<PureState>,
    pub public_commit_data: PublicCommitData,
    pub opening: Option<Opening>,
    pub verdict: Option<Verdict>,
}

fn random_bits<R: Rng>(n: usize, rng: &mut R) -> BitString {
    let mut bits = BitString::zeros(n);
    for j in 0..n {
        bits.set(j, rng.random::<bool>() as u8);
    }
    bits
}

fn random_nonzero_bits<R: Rng>(n: usize, rng: &mut R) -> BitString {
    loop {
        let bits = random_bits(n, rng);
        if bits.weight() > 0 {
            return bits;
        }
    }
}

/// Run the commit phase: draw private strings, prepare evidence, and send
/// it through the channel recorded in `params`.
pub fn commit<R: Rng>(
    params: &ProtocolParams,
    b: u8,
    rng: &mut R,
) -> Result<SessionTranscript, ProtocolError> {
    let channel = params.channel;
    commit_with_channel_override(params, b, &channel, rng)
}

/// Commit, but route the evidence through `actual_channel` instead of the
/// channel the verifier budgets for. Honest sessions pass the same channel
/// twice; the codeword-protocol cheat passes a perfect one here while the
/// params (and hence the verifier's error allowance) assume noise.
pub fn commit_with_channel_override<R: Rng>(
    params: &ProtocolParams,
    b: u8,
    actual_channel: &ChannelModel,
    rng: &mut R,
) -> Result<SessionTranscript, ProtocolError> {
    params.validate()?;
    let b = b & 1;
    let n = params.n;
    let m = params.m;
    let f = &params.boolean_fn;
    let mut private = PrivateRecord::default();
    let mut public = PublicCommitData::default();
    let mut sent: Vec<PureState> = Vec::with_capacity(params.total_qubits());

    match params.protocol_id {
        ProtocolId::P1 => {
            let (psi0, psi1) = nonorthogonal_pair(params.alpha.expect("validated"))?;
            for _ in 0..m {
                let a = f.sample_preimage(b, rng)?;
                for j in 0..n {
                    sent.push(if a.bit(j) == 0 {
                        psi0.clone()
                    } else {
                        psi1.clone()
                    });
                }
                private.a_strings.push(a);
            }
        }
        ProtocolId::P2 => {
            for _ in 0..m {
                let a = f.sample_preimage(b, rng)?;
                let beta = random_bits(n, rng);
                for j in 0..n {
                    sent.push(bb84_state(a.bit(j), beta.bit(j)));
                }
                private.a_strings.push(a);
                private.basis_strings.push(beta);
            }
        }
        ProtocolId::P3 => {
            // Evidence layout per string: data, reference, data, reference, …
            for _ in 0..m {
                let a = f.sample_preimage(b, rng)?;
                let beta = random_bits(n, rng);
                let c = random_bits(n, rng);
                for j in 0..n {
                    sent.push(bb84_state(a.bit(j), beta.bit(j)));
                    sent.push(bb84_state(c.bit(j), beta.bit(j)));
                }
                private.a_strings.push(a);
                private.basis_strings.push(beta);
                public.reference_strings.push(c);
            }
        }
        ProtocolId::P5 => {
            for _ in 0..m {
                let basis = f.sample_preimage(b, rng)?;
                let a = random_bits(n, rng);
                for j in 0..n {
                    sent.push(bb84_state(a.bit(j), basis.bit(j)));
                }
                private.basis_strings.push(basis);
                public.a_strings.push(a);
            }
        }
        ProtocolId::P6 => {
            for _ in 0..m {
                let x = random_bits(n, rng);
                let e = random_nonzero_bits(n, rng);
                sent.push(phase_state(&x, &e, b)?);
                private.x_strings.push(x);
                private.e_strings.push(e);
            }
        }
        ProtocolId::P8 => {
            let code = params.code.as_ref().expect("validated");
            let blocks = n / code.dimension();
            let zeta = blocks * code.length();
            for _ in 0..m {
                let a = f.sample_preimage(b, rng)?;
                let mut codeword_bits = Vec::with_capacity(zeta);
                for block in 0..blocks {
                    let message = BitString::new(
                        (0..code.dimension())
                            .map(|j| a.bit(block * code.dimension() + j))
                            .collect(),
                    );
                    codeword_bits.extend(encode(code, &message)?.bits().to_vec());
                }
                let codeword = BitString::new(codeword_bits);
                let basis = random_bits(zeta, rng);
                for j in 0..zeta {
                    sent.push(bb84_state(codeword.bit(j), basis.bit(j)));
                }
                private.a_strings.push(a);
                private.basis_strings.push(basis);
                private.codewords.push(codeword);
            }
        }
    }

    let evidence = apply_channel(&sent, actual_channel, rng)
        .into_iter()
        .map(|(state, _lost)| state)
        .collect();
    Ok(SessionTranscript {
        params: params.clone(),
        committed_bit: b,
        private_record: private,
        evidence,
        public_commit_data: public,
        opening: None,
        verdict: None,
    })
}

/// Assemble the honest opening from the private record.
pub fn open(transcript: &SessionTranscript) -> Result<Opening, ProtocolError> {
    if transcript.evidence.is_empty() {
        return Err(ProtocolError::NotCommitted);
    }
    let p = &transcript.private_record;
    Ok(Opening {
        declared_bit: transcript.committed_bit,
        a_strings: p.a_strings.clone(),
        basis_strings: p.basis_strings.clone(),
        e_strings: p.e_strings.clone(),
        codewords: p.codewords.clone(),
    })
}

/// Mismatch allowance for `total` qubits under per-qubit disturbance
/// probability `p_ce`: p_ce plus three binomial standard deviations, and
/// exactly zero for a noiseless configuration.
fn error_budget(p_ce: f64, total: usize) -> f64 {
    if p_ce <= 0.0 {
        0.0
    } else {
        p_ce + 3.0 * (p_ce * (1.0 - p_ce) / total as f64).sqrt()
    }
}

/// Measure the evidence against an opening and record the verdict.
///
/// The evidence itself is not consumed: measurements run on clones, so a
/// transcript can be re-verified (e.g. against a different opening) for
/// analysis purposes.
pub fn verify<R: Rng>(
    transcript: &mut SessionTranscript,
    opening: &Opening,
    rng: &mut R,
) -> Verdict {
    let verdict = verdict_for(transcript, opening, rng);
    transcript.opening = Some(opening.clone());
    transcript.verdict = Some(verdict.clone());
    verdict
}

fn verdict_for<R: Rng>(transcript: &SessionTranscript, opening: &Opening, rng: &mut R) -> Verdict {
    let params = &transcript.params;
    let n = params.n;
    let m = params.m;
    let declared = opening.declared_bit & 1;
    let p_ce = params.channel.disturbance_prob();

    // Structural checks shared by the string protocols.
    let strings_ok = |strings: &[BitString], len: usize| {
        strings.len() == m && strings.iter().all(|s| s.len() == len)
    };

    match params.protocol_id {
        ProtocolId::P1 | ProtocolId::P2 | ProtocolId::P3 => {
            if !strings_ok(&opening.a_strings, n) {
                return Verdict::reject("opening does not declare m strings of n bits");
            }
            let needs_basis = params.protocol_id != ProtocolId::P1;
            if needs_basis && !strings_ok(&opening.basis_strings, n) {
                return Verdict::reject("opening does not declare m basis strings of n bits");
            }
            for a in &opening.a_strings {
                match params.boolean_fn.eval(a) {
                    Ok(v) if v == declared => {}
                    _ => {
                        return Verdict::reject(
                            "a declared string maps to the wrong commitment value",
                        )
                    }
                }
            }
            let mut mismatches = 0usize;
            let mut total = 0usize;
            let mut qubit = transcript.evidence.iter();
            for i in 0..m {
                let a = &opening.a_strings[i];
                for j in 0..n {
                    match params.protocol_id {
                        ProtocolId::P1 => {
                            let (psi0, psi1) = nonorthogonal_pair(params.alpha.expect("validated"))
                                .expect("validated");
                            let target = if a.bit(j) == 0 { &psi0 } else { &psi1 };
                            let state = qubit.next().expect("evidence length validated");
                            let (hit, _) = measure_projective(state, target, rng)
                                .expect("single-qubit evidence");
                            total += 1;
                            if !hit {
                                mismatches += 1;
                            }
                        }
                        ProtocolId::P2 => {
                            let basis = opening.basis_strings[i].bit(j);
                            let state = qubit.next().expect("evidence length validated");
                            let (outcome, _) = state.measure_qubit(0, basis, rng);
                            total += 1;
                            if outcome != a.bit(j) {
                                mismatches += 1;
                            }
                        }
                        ProtocolId::P3 => {
                            let basis = opening.basis_strings[i].bit(j);
                            let c = &transcript.public_commit_data.reference_strings[i];
                            let data = qubit.next().expect("evidence length validated");
                            let reference = qubit.next().expect("evidence length validated");
                            let (data_outcome, _) = data.measure_qubit(0, basis, rng);
                            let (ref_outcome, _) = reference.measure_qubit(0, basis, rng);
                            total += 2;
                            if data_outcome != a.bit(j) {
                                mismatches += 1;
                            }
                            if ref_outcome != c.bit(j) {
                                mismatches += 1;
                            }
                        }
                        _ => unreachable!(),
                    }
                }
            }
            let budget = error_budget(p_ce, total);
            if mismatches as f64 / total as f64 > budget {
                return Verdict::reject(format!(
                    "mismatch fraction {mismatches}/{total} exceeds the channel budget"
                ));
            }
            Verdict::accept()
        }
        ProtocolId::P5 => {
            if !strings_ok(&opening.basis_strings, n) {
                return Verdict::reject("opening does not declare m basis strings of n bits");
            }
            for basis in &opening.basis_strings {
                match params.boolean_fn.eval(basis) {
                    Ok(v) if v == declared => {}
                    _ => {
                        return Verdict::reject(
                            "a declared basis string maps to the wrong commitment value",
                        )
                    }
                }
            }
            let mut mismatches = 0usize;
            let total = m * n;
            for i in 0..m {
                let a = &transcript.public_commit_data.a_strings[i];
                let basis = &opening.basis_strings[i];
                for j in 0..n {
                    let state = &transcript.evidence[i * n + j];
                    let (outcome, _) = state.measure_qubit(0, basis.bit(j), rng);
                    if outcome != a.bit(j) {
                        mismatches += 1;
                    }
                }
            }
            let budget = error_budget(p_ce, total);
            if mismatches as f64 / total as f64 > budget {
                return Verdict::reject(format!(
                    "mismatch fraction {mismatches}/{total} exceeds the channel budget"
                ));
            }
            Verdict::accept()
        }
        ProtocolId::P6 => {
            if !strings_ok(&opening.e_strings, n)
                || opening.e_strings.iter().any(|e| e.weight() == 0)
            {
                return Verdict::reject("opening must declare m nonzero shift strings");
            }
            for i in 0..m {
                let e = &opening.e_strings[i];
                let support: Vec<usize> = (0..n).filter(|&j| e.bit(j) == 1).collect();
                let control = support[rng.random_range(0..support.len())];
                let mut state = transcript.evidence[i].clone();
                for &target in &support {
                    if target != control {
                        state = state.apply_cnot(control, target);
                    }
                }
                let (outcome, _) = state.measure_qubit(control, 1, rng);
                if outcome != declared {
                    return Verdict::reject(format!(
                        "parity circuit on string {i} contradicts the declared bit"
                    ));
                }
            }
            Verdict::accept()
        }
        ProtocolId::P8 => {
            let code = params.code.as_ref().expect("validated");
            let blocks = n / code.dimension();
            let zeta = blocks * code.length();
            if !strings_ok(&opening.a_strings, n)
                || !strings_ok(&opening.basis_strings, zeta)
                || !strings_ok(&opening.codewords, zeta)
            {
                return Verdict::reject("opening does not declare consistent codeword data");
            }
            for a in &opening.a_strings {
                match params.boolean_fn.eval(a) {
                    Ok(v) if v == declared => {}
                    _ => {
                        return Verdict::reject(
                            "a declared string maps to the wrong commitment value",
                        )
                    }
                }
            }
            let mut mismatches = 0usize;
            let total = m * zeta;
            for i in 0..m {
                let basis = &opening.basis_strings[i];
                let declared_word = &opening.codewords[i];
                let mut measured_bits = Vec::with_capacity(zeta);
                for j in 0..zeta {
                    let state = &transcript.evidence[i * zeta + j];
                    let (outcome, _) = state.measure_qubit(0, basis.bit(j), rng);
                    measured_bits.push(outcome);
                    if outcome != declared_word.bit(j) {
                        mismatches += 1;
                    }
                }
                let measured = BitString::new(measured_bits);
                for block in 0..blocks {
                    let word = BitString::new(
                        (0..code.length())
                            .map(|j| measured.bit(block * code.length() + j))
                            .collect(),
                    );
                    let Ok((message, _errors)) = syndrome_decode(code, &word) else {
                        return Verdict::reject(format!(
                            "block {block} of string {i} is beyond the correction radius"
                        ));
                    };
                    let declared_block = BitString::new(
                        (0..code.dimension())
                            .map(|j| opening.a_strings[i].bit(block * code.dimension() + j))
                            .collect(),
                    );
                    if message != declared_block {
                        return Verdict::reject(format!(
                            "block {block} of string {i} decodes to a different message"
                        ));
                    }
                }
            }
            let budget = error_budget(p_ce, total);
            if mismatches as f64 / total as f64 > budget {
                return Verdict::reject(format!(
                    "mismatch fraction {mismatches}/{total} exceeds the channel budget"
                ));
            }
            Verdict::accept()
        }
    }
}

/// A dishonest opening that declares 1−b after flipping exactly one bit
/// per committed string: the committed string's bit for P1, the string bit
/// plus the matching basis bit for P2/P3 (a same-basis flip would be
/// caught with certainty), and the committed basis bit for P5.
///
/// `flips[i]` is the flipped position inside string i. The relative-phase
/// and codeword protocols have no one-bit cheat of this shape.
pub fn bitflip_cheat_open(
    transcript: &SessionTranscript,
    flips: &[usize],
) -> Result<Opening, ProtocolError> {
    let params = &transcript.params;
    let n = params.n;
    if transcript.evidence.is_empty() {
        return Err(ProtocolError::NotCommitted);
    }
    if flips.len() != params.m {
        return Err(ProtocolError::InvalidFlipPattern {
            reason: format!("{} flips for {} strings", flips.len(), params.m),
        });
    }
    if let Some(&bad) = flips.iter().find(|&&p| p >= n) {
        return Err(ProtocolError::InvalidFlipPattern {
            reason: format!("position {bad} is outside a string of {n} bits"),
        });
    }
    let target_bit = 1 - transcript.committed_bit;
    let honest = open(transcript)?;

    match params.protocol_id {
        ProtocolId::P1 | ProtocolId::P2 | ProtocolId::P3 => {
            let mut a_strings = Vec::with_capacity(params.m);
            for (i, a) in honest.a_strings.iter().enumerate() {
                let flipped = a.with_flipped(flips[i]);
                if params.boolean_fn.eval(&flipped)? != target_bit {
                    return Err(ProtocolError::InvalidFlipPattern {
                        reason: format!(
                            "flipping bit {} of string {i} does not reach the opposite \
                             commitment value",
                            flips[i]
                        ),
                    });
                }
                a_strings.push(flipped);
            }
            let basis_strings = if params.protocol_id == ProtocolId::P1 {
                honest.basis_strings
            } else {
                honest
                    .basis_strings
                    .iter()
                    .enumerate()
                    .map(|(i, beta)| beta.with_flipped(flips[i]))
                    .collect()
            };
            Ok(Opening {
                declared_bit: target_bit,
                a_strings,
                basis_strings,
                ..Default::default()
            })
        }
        ProtocolId::P5 => {
            let mut basis_strings = Vec::with_capacity(params.m);
            for (i, basis) in honest.basis_strings.iter().enumerate() {
                let flipped = basis.with_flipped(flips[i]);
                if params.boolean_fn.eval(&flipped)? != target_bit {
                    return Err(ProtocolError::InvalidFlipPattern {
                        reason: format!(
                            "flipping basis bit {} of string {i} does not reach the opposite \
                             commitment value",
                            flips[i]
                        ),
                    });
                }
                basis_strings.push(flipped);
            }
            Ok(Opening {
                declared_bit: target_bit,
                basis_strings,
                ..Default::default()
            })
        }
        ProtocolId::P6 | ProtocolId::P8 => Err(ProtocolError::InvalidFlipPattern {
            reason: format!(
                "protocol {} has no single-bit-flip cheat",
                params.protocol_id
            ),
        }),
    }
}

/// The attack the codeword protocol is built to resist: the committer
/// secretly used a perfect channel (commit with a channel override) while
/// the verifier still budgets for `params.channel`, then alters the
/// declared codeword bits at the given global qubit positions.
///
/// Each altered position flips both the declared codeword bit and its
/// declared measurement basis (making the verifier's outcome there a coin
/// toss rather than a certain mismatch); the declared message for each
/// block is re-derived by decoding the altered codeword, falling back to
/// the honest message when the alteration is undecodable, and the declared
/// bit is the commitment value of the first string's derived message.
pub fn super_channel_cheat(
    transcript: &SessionTranscript,
    changes: &[usize],
) -> Result<Opening, ProtocolError> {
    let params = &transcript.params;
    if params.protocol_id != ProtocolId::P8 {
        return Err(ProtocolError::ParamMismatch {
            reason: "the super-channel cheat applies to the codeword protocol only".into(),
        });
    }
    if transcript.evidence.is_empty() {
        return Err(ProtocolError::NotCommitted);
    }
    let code = params.code.as_ref().expect("validated");
    let blocks = params.n / code.dimension();
    let zeta = blocks * code.length();
    let total = params.m * zeta;
    let mut seen = vec![false; total];
    for &pos in changes {
        if pos >= total {
            return Err(ProtocolError::InvalidFlipPattern {
                reason: format!("position {pos} is outside the {total} evidence qubits"),
            });
        }
        if std::mem::replace(&mut seen[pos], true) {
            return Err(ProtocolError::InvalidFlipPattern {
                reason: format!("position {pos} altered twice"),
            });
        }
    }

    let honest = open(transcript)?;
    let mut codewords = honest.codewords.clone();
    let mut basis_strings = honest.basis_strings.clone();
    for &pos in changes {
        let (i, j) = (pos / zeta, pos % zeta);
        codewords[i] = codewords[i].with_flipped(j);
        basis_strings[i] = basis_strings[i].with_flipped(j);
    }

    let mut a_strings = Vec::with_capacity(params.m);
    for (i, codeword) in codewords.iter().enumerate() {
        let mut message_bits = Vec::with_capacity(params.n);
        for block in 0..blocks {
            let word = BitString::new(
                (0..code.length())
                    .map(|j| codeword.bit(block * code.length() + j))
                    .collect(),
            );
            let block_message = match syndrome_decode(code, &word) {
                Ok((message, _)) => message,
                Err(EccError::DecodeFailure { .. }) => BitString::new(
                    (0..code.dimension())
                        .map(|j| honest.a_strings[i].bit(block * code.dimension() + j))
                        .collect(),
                ),
                Err(other) => return Err(other.into()),
            };
            message_bits.extend(block_message.bits().to_vec());
        }
        a_strings.push(BitString::new(message_bits));
    }
    let declared_bit = params.boolean_fn.eval(&a_strings[0])?;
    Ok(Opening {
        declared_bit,
        a_strings,
        basis_strings,
        codewords,
        ..Default::default()
    })
}
