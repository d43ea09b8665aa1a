//! Linear-code machinery for the noise-tolerant codeword protocol.
//!
//! The committed string is split into blocks and each block is encoded with
//! a code C derived from a base code C1: take C1's position-by-check matrix
//! H (which must contain exactly one all-ones row), drop that all-ones row,
//! and use the transpose of the remainder as the generator G̃. The derived
//! code inherits a statistical-independence property from C1: when any 2t
//! rows of H are linearly independent, any 2t−1 bits of a random codeword
//! reveal nothing about the committed bit ([`independence_check`] verifies
//! this by exact counting).
//!
//! [`bob_guess_probabilities`] and [`binding_margin`] evaluate the
//! concealing/binding trade-off formulas: how often a verifier who learns
//! each codeword bit with probability p_s can reconstruct a block parity,
//! and whether the correction radius t′ beats both honest channel noise and
//! a cheater exploiting the noise budget.

use crate::bits::BitString;
use crate::boolfn::BooleanFn;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

/// Largest code dimension for which exhaustive minimum-distance and
/// independence searches are run (cost 2^dimension per pass).
pub const MAX_CODE_DIMENSION: usize = 12;

/// Errors from code derivation, coding, and the probability formulas.
#[derive(Debug, Error)]
pub enum EccError {
    /// The base matrix must contain exactly one all-ones row.
    #[error("base matrix needs exactly one all-ones row, found {found}")]
    NoAllOnesRow { found: usize },
    /// Some required set of rows is linearly dependent.
    #[error("row dependence: {reason}")]
    RowDependence { reason: String },
    /// The word lies beyond the code's correction radius.
    #[error("word is not within {t_prime} errors of any codeword")]
    DecodeFailure { t_prime: usize },
    /// Input length does not match the expected code parameter.
    #[error("length {got} does not match the expected {expected}")]
    LengthMismatch { got: usize, expected: usize },
    /// Exhaustive search refused: the code dimension is too large.
    #[error("code dimension {dimension} exceeds the exhaustive-search cap of {max}")]
    DimensionTooLarge { dimension: usize, max: usize },
    /// The block size must divide the committed-string length.
    #[error("block size {block} does not divide the string length {n}")]
    DivisibilityViolation { n: usize, block: usize },
    /// Malformed base-code text or parameters.
    #[error("invalid base code: {reason}")]
    BadFormat { reason: String },
    /// A probability argument left [0,1], or p_cv was zero.
    #[error("{name} = {value} is not a valid probability here")]
    InvalidProbability { name: &'static str, value: f64 },
    /// The commitment function's arity does not match the code dimension.
    #[error("commitment function arity {got} does not match code dimension {expected}")]
    ArityMismatch { got: usize, expected: usize },
}

/// The base code C1, given as its η×(η−ξ) position-by-check matrix H with
/// error-correcting ability t. Exactly one row of H must be all ones, and
/// every set of 2t rows must be linearly independent; both are enforced by
/// [`derive_code`].
#[derive(Clone, Debug, PartialEq)]
pub struct BaseCodeSpec {
    pub eta: usize,
    pub xi: usize,
    pub t: usize,
    /// η rows of η−ξ bits each.
    pub h: Vec<BitString>,
}

impl BaseCodeSpec {
    /// Parse the plain-text format: a first line `eta xi t`, then η lines of
    /// η−ξ space-separated bits (one row of H per codeword position).
    pub fn from_text(text: &str) -> Result<Self, EccError> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or(EccError::BadFormat {
            reason: "empty file".into(),
        })?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(EccError::BadFormat {
                reason: format!("header {header:?} is not \"eta xi t\""),
            });
        }
        let parse = |s: &str, name: &str| {
            s.parse::<usize>().map_err(|_| EccError::BadFormat {
                reason: format!("{name} {s:?} is not a nonnegative integer"),
            })
        };
        let eta = parse(fields[0], "eta")?;
        let xi = parse(fields[1], "xi")?;
        let t = parse(fields[2], "t")?;
        if xi == 0 || eta <= xi {
            return Err(EccError::BadFormat {
                reason: format!("need eta > xi >= 1, got eta={eta} xi={xi}"),
            });
        }
        if t == 0 {
            return Err(EccError::BadFormat {
                reason: "t must be at least 1".into(),
            });
        }
        let width = eta - xi;
        let mut h = Vec::with_capacity(eta);
        for line in lines {
            let bits: Result<Vec<u8>, EccError> = line
                .split_whitespace()
                .map(|tok| match tok {
                    "0" => Ok(0),
                    "1" => Ok(1),
                    other => Err(EccError::BadFormat {
                        reason: format!("bad bit token {other:?}"),
                    }),
                })
                .collect();
            let bits = bits?;
            if bits.len() != width {
                return Err(EccError::BadFormat {
                    reason: format!("row has {} bits, expected {width}", bits.len()),
                });
            }
            h.push(BitString::new(bits));
        }
        if h.len() != eta {
            return Err(EccError::BadFormat {
                reason: format!("{} rows, expected eta = {eta}", h.len()),
            });
        }
        Ok(Self { eta, xi, t, h })
    }
}

/// Visit every k-subset of {0, …, n−1} in lexicographic order (the empty
/// subset once for k = 0; nothing when k > n).
fn for_each_subset(n: usize, k: usize, mut visit: impl FnMut(&[usize]) -> bool) {
    if k > n {
        return;
    }
    let mut subset: Vec<usize> = (0..k).collect();
    loop {
        if !visit(&subset) {
            return;
        }
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if subset[i] != i + n - k {
                subset[i] += 1;
                for j in i + 1..k {
                    subset[j] = subset[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Reduced row echelon form over GF(2).
///
/// Returns the reduced rows, the transform T with `rref = T·rows` (rows of T
/// say which input rows each output row combines), and the pivot columns.
fn rref_gf2(rows: &[BitString]) -> (Vec<BitString>, Vec<BitString>, Vec<usize>) {
    let height = rows.len();
    let width = if height == 0 { 0 } else { rows[0].len() };
    let mut work: Vec<BitString> = rows.to_vec();
    let mut transform: Vec<BitString> = (0..height)
        .map(|i| {
            let mut unit = BitString::zeros(height);
            unit.set(i, 1);
            unit
        })
        .collect();
    let mut pivots = Vec::new();
    let mut rank = 0usize;
    for col in 0..width {
        let Some(pivot_row) = (rank..height).find(|&r| work[r].bit(col) == 1) else {
            continue;
        };
        work.swap(rank, pivot_row);
        transform.swap(rank, pivot_row);
        for r in 0..height {
            if r != rank && work[r].bit(col) == 1 {
                work[r] = work[r].xor(&work[rank]);
                transform[r] = transform[r].xor(&transform[rank]);
            }
        }
        pivots.push(col);
        rank += 1;
        if rank == height {
            break;
        }
    }
    (work, transform, pivots)
}

/// The derived linear code: length η−1, dimension η−ξ, with generator
/// G̃ = (H′)ᵀ and a syndrome table covering every error of weight ≤ t′.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearCode {
    length: usize,
    dimension: usize,
    /// Generator rows: dimension × length.
    generator: Vec<BitString>,
    /// Parity constraints, one per row: (ξ−1) × length. Each row is
    /// orthogonal to every codeword (the transpose of the null-space basis
    /// H̃ of the generator).
    check: Vec<BitString>,
    t_prime: usize,
    /// Syndrome (as an integer index) → minimal-weight error pattern.
    syndrome_table: BTreeMap<usize, BitString>,
    /// Pivot columns of the generator's reduced form, paired with
    /// `recover_transform` to invert encoding: the message is the XOR of the
    /// transform rows selected by the codeword's pivot bits.
    pivots: Vec<usize>,
    recover_transform: Vec<BitString>,
}

impl LinearCode {
    pub fn length(&self) -> usize {
        self.length
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn t_prime(&self) -> usize {
        self.t_prime
    }

    pub fn generator(&self) -> &[BitString] {
        &self.generator
    }

    pub fn check(&self) -> &[BitString] {
        &self.check
    }

    /// Syndrome of a word: its inner product with every parity constraint,
    /// packed into an integer index.
    fn syndrome_index(&self, word: &BitString) -> usize {
        self.check
            .iter()
            .fold(0usize, |acc, row| (acc << 1) | word.dot(row) as usize)
    }
}

/// Build a code directly from independent generator rows, computing the
/// parity constraints (null-space basis), the correction radius t′ by
/// exhaustive minimum-distance search, and the syndrome table.
pub fn from_generator(generator: Vec<BitString>) -> Result<LinearCode, EccError> {
    let dimension = generator.len();
    if dimension == 0 {
        return Err(EccError::BadFormat {
            reason: "empty generator".into(),
        });
    }
    let length = generator[0].len();
    if generator.iter().any(|row| row.len() != length) {
        return Err(EccError::BadFormat {
            reason: "ragged generator rows".into(),
        });
    }
    if dimension > MAX_CODE_DIMENSION {
        return Err(EccError::DimensionTooLarge {
            dimension,
            max: MAX_CODE_DIMENSION,
        });
    }
    let (rref, transform, pivots) = rref_gf2(&generator);
    if pivots.len() != dimension {
        return Err(EccError::RowDependence {
            reason: format!("generator rank {} < dimension {dimension}", pivots.len()),
        });
    }

    // Null space: one basis vector per free column, with the pivot
    // coordinates filled from the reduced rows.
    let mut check = Vec::new();
    for free in (0..length).filter(|c| !pivots.contains(c)) {
        let mut v = BitString::zeros(length);
        v.set(free, 1);
        for (i, &p) in pivots.iter().enumerate() {
            v.set(p, rref[i].bit(free));
        }
        check.push(v);
    }
    debug_assert!(check.len() == length - dimension);
    debug_assert!(
        generator
            .iter()
            .all(|g| check.iter().all(|h| g.dot(h) == 0)),
        "generator and parity constraints must be orthogonal"
    );

    // Exhaustive minimum distance over all 2^dimension codewords.
    let mut min_weight = usize::MAX;
    for message_index in 1..1usize << dimension {
        let message = BitString::from_index(message_index, dimension);
        let weight = encode_rows(&generator, &message).weight();
        min_weight = min_weight.min(weight);
    }
    if min_weight == 0 {
        return Err(EccError::RowDependence {
            reason: "a nonzero message encodes to the zero codeword".into(),
        });
    }
    let t_prime = (min_weight - 1) / 2;

    let mut code = LinearCode {
        length,
        dimension,
        generator,
        check,
        t_prime,
        syndrome_table: BTreeMap::new(),
        pivots,
        recover_transform: transform,
    };
    code.syndrome_table = build_syndrome_table(&code);
    Ok(code)
}

/// Map every error pattern of weight ≤ t′ to its syndrome. Distinct
/// patterns within the correction radius never collide (the minimum
/// distance guarantees it).
fn build_syndrome_table(code: &LinearCode) -> BTreeMap<usize, BitString> {
    let mut table = BTreeMap::new();
    for weight in 0..=code.t_prime {
        for_each_subset(code.length, weight, |positions| {
            let mut pattern = BitString::zeros(code.length);
            for &p in positions {
                pattern.set(p, 1);
            }
            let syndrome = code.syndrome_index(&pattern);
            let stale = table.insert(syndrome, pattern);
            debug_assert!(
                stale.is_none(),
                "syndrome collision inside the correction radius"
            );
            true
        });
    }
    table
}

fn encode_rows(generator: &[BitString], message: &BitString) -> BitString {
    let mut out = BitString::zeros(generator[0].len());
    for (j, row) in generator.iter().enumerate() {
        if message.bit(j) == 1 {
            out = out.xor(row);
        }
    }
    out
}

/// Derive the working code from a base code: validate the all-ones-row and
/// row-independence requirements, drop the all-ones row, and transpose.
pub fn derive_code(base: &BaseCodeSpec) -> Result<LinearCode, EccError> {
    let width = base.eta - base.xi;
    if base.h.len() != base.eta || base.h.iter().any(|row| row.len() != width) {
        return Err(EccError::BadFormat {
            reason: format!("H must be {}x{width}", base.eta),
        });
    }
    let ones: Vec<usize> = (0..base.eta)
        .filter(|&r| base.h[r].weight() == width)
        .collect();
    if ones.len() != 1 {
        return Err(EccError::NoAllOnesRow { found: ones.len() });
    }

    // Any 2t rows independent ⟺ no nonempty subset of ≤ 2t rows XORs
    // to zero. Exhaustive over the (small) subset counts involved.
    let limit = (2 * base.t).min(base.eta);
    let mut dependent: Option<Vec<usize>> = None;
    for size in 1..=limit {
        for_each_subset(base.eta, size, |subset| {
            let mut acc = BitString::zeros(width);
            for &r in subset {
                acc = acc.xor(&base.h[r]);
            }
            if acc.weight() == 0 {
                dependent = Some(subset.to_vec());
                return false;
            }
            true
        });
        if let Some(rows) = dependent {
            return Err(EccError::RowDependence {
                reason: format!("rows {rows:?} of H sum to zero"),
            });
        }
    }

    // H′ = H without the all-ones row; the generator is its transpose.
    let keep: Vec<&BitString> = (0..base.eta)
        .filter(|&r| r != ones[0])
        .map(|r| &base.h[r])
        .collect();
    let generator: Vec<BitString> = (0..width)
        .map(|col| BitString::new(keep.iter().map(|row| row.bit(col)).collect()))
        .collect();
    from_generator(generator)
}

/// Encode a message block of `dimension` bits into a codeword of `length`
/// bits.
pub fn encode(code: &LinearCode, message: &BitString) -> Result<BitString, EccError> {
    if message.len() != code.dimension {
        return Err(EccError::LengthMismatch {
            got: message.len(),
            expected: code.dimension,
        });
    }
    Ok(encode_rows(&code.generator, message))
}

/// Correct up to t′ errors and return the decoded message with the number
/// of corrected positions. Words farther than t′ from every codeword fail.
pub fn syndrome_decode(
    code: &LinearCode,
    word: &BitString,
) -> Result<(BitString, usize), EccError> {
    if word.len() != code.length {
        return Err(EccError::LengthMismatch {
            got: word.len(),
            expected: code.length,
        });
    }
    let syndrome = code.syndrome_index(word);
    let pattern = code
        .syndrome_table
        .get(&syndrome)
        .ok_or(EccError::DecodeFailure {
            t_prime: code.t_prime,
        })?;
    let corrected = word.xor(pattern);
    // Invert the encoding: read the pivot coordinates and map them back
    // through the reduction transform.
    let mut message = BitString::zeros(code.dimension);
    for (j, &p) in code.pivots.iter().enumerate() {
        if corrected.bit(p) == 1 {
            message = message.xor(&code.recover_transform[j]);
        }
    }
    debug_assert_eq!(encode_rows(&code.generator, &message), corrected);
    Ok((message, pattern.weight()))
}

/// Exact statistical-independence check: for every set of 2t−1 codeword
/// positions, the joint distribution of those bits over uniform messages
/// must be identical conditioned on commit_fn(message) = 0 vs = 1.
///
/// Counting is exact (integer cross-multiplication, no tolerances) over all
/// 2^dimension messages, so the dimension is capped.
pub fn independence_check(
    code: &LinearCode,
    t: usize,
    commit_fn: &BooleanFn,
) -> Result<bool, EccError> {
    if code.dimension > MAX_CODE_DIMENSION {
        return Err(EccError::DimensionTooLarge {
            dimension: code.dimension,
            max: MAX_CODE_DIMENSION,
        });
    }
    if commit_fn.arity() != code.dimension {
        return Err(EccError::ArityMismatch {
            got: commit_fn.arity(),
            expected: code.dimension,
        });
    }
    if t == 0 {
        return Ok(true); // no positions to test
    }
    let subset_size = (2 * t - 1).min(code.length);
    if subset_size == 0 {
        return Ok(true);
    }

    // Precompute codewords and commitment classes.
    let count = 1usize << code.dimension;
    let mut codewords = Vec::with_capacity(count);
    let mut classes = Vec::with_capacity(count);
    let mut class_sizes = [0usize; 2];
    for idx in 0..count {
        let message = BitString::from_index(idx, code.dimension);
        let class = commit_fn.eval(&message).expect("arity checked above") as usize;
        class_sizes[class] += 1;
        classes.push(class);
        codewords.push(encode_rows(&code.generator, &message));
    }

    let mut independent = true;
    for_each_subset(code.length, subset_size, |subset| {
        let mut counts = vec![[0usize; 2]; 1 << subset_size];
        for idx in 0..count {
            let mut pattern = 0usize;
            for (pos, &col) in subset.iter().enumerate() {
                pattern |= (codewords[idx].bit(col) as usize) << pos;
            }
            counts[pattern][classes[idx]] += 1;
        }
        // Identical conditional distributions: cross-multiply to avoid
        // assuming the classes are the same size.
        for c in &counts {
            if c[0] * class_sizes[1] != c[1] * class_sizes[0] {
                independent = false;
                return false;
            }
        }
        true
    });
    Ok(independent)
}

/// Exact binomial coefficient, small enough arguments assumed.
fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 0..k {
        num *= (n - i) as u128;
        den *= (i + 1) as u128;
    }
    (num / den) as f64
}

/// Probability that a verifier who learns each codeword bit independently
/// with probability p_s can reconstruct commitment information:
/// per block p_max1 = Σ_{i=2t}^{η−1} C(η−1, i) p_sⁱ (1−p_s)^{η−1−i}
/// (knowing at least 2t coordinates), p_max = p_max1^(n/(η−ξ)) for all
/// blocks of one string, and P_max = 1 − (1−p_max)^m over m strings.
pub fn bob_guess_probabilities(
    eta: usize,
    xi: usize,
    t: usize,
    p_s: f64,
    n: usize,
    m: usize,
) -> Result<(f64, f64, f64), EccError> {
    if !(0.0..=1.0).contains(&p_s) {
        return Err(EccError::InvalidProbability {
            name: "p_s",
            value: p_s,
        });
    }
    if xi == 0 || eta <= xi {
        return Err(EccError::BadFormat {
            reason: format!("need eta > xi >= 1, got eta={eta} xi={xi}"),
        });
    }
    let block = eta - xi;
    if !n.is_multiple_of(block) {
        return Err(EccError::DivisibilityViolation { n, block });
    }
    let length = eta - 1;
    let mut p_max1 = 0.0;
    for i in (2 * t)..=length {
        p_max1 += binomial(length, i) * p_s.powi(i as i32) * (1.0 - p_s).powi((length - i) as i32);
    }
    let p_max1 = p_max1.min(1.0);
    let p_max = p_max1.powi((n / block) as i32);
    let p_overall = 1.0 - (1.0 - p_max).powi(m as i32);
    Ok((p_max1, p_max, p_overall))
}

/// Binding condition of the code against honest channel error p_ce and a
/// cheater whose per-alteration detection probability is p_cv: the radius
/// t′ must exceed both the expected honest error load (ξ−1)·p_ce and the
/// cheat headroom (η−ξ)·p_ce/p_cv − 1. Returns (satisfied, first
/// threshold, second threshold).
pub fn binding_margin(
    t_prime: usize,
    eta: usize,
    xi: usize,
    p_ce: f64,
    p_cv: f64,
) -> Result<(bool, f64, f64), EccError> {
    if !(0.0..=1.0).contains(&p_ce) {
        return Err(EccError::InvalidProbability {
            name: "p_ce",
            value: p_ce,
        });
    }
    if !(p_cv > 0.0 && p_cv <= 1.0) {
        return Err(EccError::InvalidProbability {
            name: "p_cv",
            value: p_cv,
        });
    }
    let lhs = (xi as f64 - 1.0) * p_ce;
    let rhs = (eta - xi) as f64 * p_ce / p_cv - 1.0;
    let t = t_prime as f64;
    Ok((t > lhs && t > rhs, lhs, rhs))
}
