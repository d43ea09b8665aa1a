//! Boolean commitment functions and their correlation immunity.
//!
//! Each protocol hides the committed bit b inside a bit string a with
//! F(a) = b for a public Boolean function F. The default choice is the
//! parity function, which is correlation-immune of maximal order n−1:
//! learning any proper subset of a's bits reveals nothing about b.
//!
//! [`correlation_immunity_order`] verifies that property by exact counting
//! over the full truth table, so it is exponential in the arity and guarded
//! by an arity cap.

use crate::bits::BitString;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest arity accepted by the exact correlation-immunity counter
/// (cost grows as roughly 4^arity).
pub const MAX_CI_ARITY: usize = 20;

/// Errors from Boolean-function construction and analysis.
#[derive(Debug, Error)]
pub enum BoolFnError {
    /// Functions of zero variables are not useful commitments.
    #[error("boolean function needs at least one input bit")]
    EmptyInput,
    /// Exact correlation-immunity counting is exponential; refuse huge
    /// arities instead of hanging.
    #[error("arity {arity} exceeds the exact-analysis cap of {max}")]
    ArityTooLarge { arity: usize, max: usize },
    /// No input maps to the requested output value.
    #[error("function never outputs {value}")]
    EmptyPreimage { value: u8 },
    /// Truth table text of the wrong length or alphabet.
    #[error("invalid truth table: {reason}")]
    BadTable { reason: String },
    /// Input length does not match the function arity.
    #[error("input has {got} bits, function takes {expected}")]
    ArityMismatch { got: usize, expected: usize },
}

/// Parity (XOR) of all bits in the string; errors on the empty string.
pub fn parity(bits: &BitString) -> Result<u8, BoolFnError> {
    if bits.is_empty() {
        return Err(BoolFnError::EmptyInput);
    }
    Ok(bits.parity())
}

/// How a [`BooleanFn`] computes its output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum BoolFnKind {
    /// XOR of all input bits.
    Parity,
    /// Ignores the input entirely (the degenerate, zero-immunity extreme).
    Constant(u8),
    /// Explicit truth table, indexed by the input's integer value
    /// (first bit most significant).
    Table(Vec<u8>),
}

/// A Boolean function F: {0,1}^arity → {0,1} used to bind a committed bit
/// to a string.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BooleanFn {
    arity: usize,
    kind: BoolFnKind,
}

impl BooleanFn {
    pub fn parity(arity: usize) -> Result<Self, BoolFnError> {
        if arity == 0 {
            return Err(BoolFnError::EmptyInput);
        }
        Ok(Self {
            arity,
            kind: BoolFnKind::Parity,
        })
    }

    pub fn constant(arity: usize, value: u8) -> Result<Self, BoolFnError> {
        if arity == 0 {
            return Err(BoolFnError::EmptyInput);
        }
        Ok(Self {
            arity,
            kind: BoolFnKind::Constant(value & 1),
        })
    }

    /// Build from an explicit truth table of length 2^arity.
    pub fn from_table(arity: usize, table: Vec<u8>) -> Result<Self, BoolFnError> {
        if arity == 0 {
            return Err(BoolFnError::EmptyInput);
        }
        if table.len() != 1 << arity {
            return Err(BoolFnError::BadTable {
                reason: format!(
                    "{} entries for arity {} (expected {})",
                    table.len(),
                    arity,
                    1usize << arity
                ),
            });
        }
        if table.iter().any(|&v| v > 1) {
            return Err(BoolFnError::BadTable {
                reason: "entries must be 0 or 1".into(),
            });
        }
        Ok(Self {
            arity,
            kind: BoolFnKind::Table(table),
        })
    }

    /// Parse a truth table from text: exactly 2^arity characters of `0`/`1`
    /// in row-major (input-index) order, whitespace ignored.
    pub fn from_table_text(arity: usize, text: &str) -> Result<Self, BoolFnError> {
        let mut table = Vec::with_capacity(1 << arity);
        for ch in text.chars() {
            match ch {
                '0' => table.push(0),
                '1' => table.push(1),
                c if c.is_whitespace() => {}
                c => {
                    return Err(BoolFnError::BadTable {
                        reason: format!("unexpected character {c:?}"),
                    })
                }
            }
        }
        Self::from_table(arity, table)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Evaluate F on an input string.
    pub fn eval(&self, input: &BitString) -> Result<u8, BoolFnError> {
        if input.len() != self.arity {
            return Err(BoolFnError::ArityMismatch {
                got: input.len(),
                expected: self.arity,
            });
        }
        Ok(match &self.kind {
            BoolFnKind::Parity => input.parity(),
            BoolFnKind::Constant(v) => *v,
            BoolFnKind::Table(t) => t[input.to_index()],
        })
    }

    /// Draw a uniformly random input with F(input) = value.
    pub fn sample_preimage<R: Rng>(
        &self,
        value: u8,
        rng: &mut R,
    ) -> Result<BitString, BoolFnError> {
        let value = value & 1;
        match &self.kind {
            BoolFnKind::Parity => {
                // Uniform over the parity class: free bits everywhere but the
                // last position, which is fixed to land in the class.
                let mut bits = BitString::zeros(self.arity);
                for j in 0..self.arity - 1 {
                    bits.set(j, rng.random::<bool>() as u8);
                }
                let partial = bits.parity();
                bits.set(self.arity - 1, partial ^ value);
                Ok(bits)
            }
            BoolFnKind::Constant(v) => {
                if *v != value {
                    return Err(BoolFnError::EmptyPreimage { value });
                }
                let mut bits = BitString::zeros(self.arity);
                for j in 0..self.arity {
                    bits.set(j, rng.random::<bool>() as u8);
                }
                Ok(bits)
            }
            BoolFnKind::Table(t) => {
                let matches: Vec<usize> = (0..t.len()).filter(|&i| t[i] == value).collect();
                if matches.is_empty() {
                    return Err(BoolFnError::EmptyPreimage { value });
                }
                let pick = matches[rng.random_range(0..matches.len())];
                Ok(BitString::from_index(pick, self.arity))
            }
        }
    }

    fn truth_table(&self) -> Vec<u8> {
        match &self.kind {
            BoolFnKind::Table(t) => t.clone(),
            _ => (0..1usize << self.arity)
                .map(|i| self.eval(&BitString::from_index(i, self.arity)).unwrap())
                .collect(),
        }
    }
}

/// Exact correlation-immunity order of F.
///
/// F is correlation-immune of order k when, for uniformly random input, the
/// output is statistically independent of every subset of at most k input
/// bits. This routine checks subsets of each size by exact integer counting
/// over the truth table and returns the largest k that passes (0 means some
/// single bit already correlates with the output; a constant function gets
/// arity, the maximum possible, vacuously).
///
/// Cost is Σ_k C(arity,k)·2^arity in the worst case — exponential — so the
/// arity is capped at [`MAX_CI_ARITY`].
pub fn correlation_immunity_order(f: &BooleanFn) -> Result<usize, BoolFnError> {
    if f.arity > MAX_CI_ARITY {
        return Err(BoolFnError::ArityTooLarge {
            arity: f.arity,
            max: MAX_CI_ARITY,
        });
    }
    let n = f.arity;
    let table = f.truth_table();
    let total_ones: usize = table.iter().map(|&v| v as usize).sum();

    // Independence for a subset S of size k: every pattern v of the S-bits
    // must see the same count of 1-outputs, namely total_ones / 2^k. Exact
    // integer arithmetic, no tolerances.
    for k in 1..=n {
        let mut all_subsets_pass = true;
        let mut subset: Vec<usize> = (0..k).collect();
        'subsets: loop {
            let mut counts = vec![0usize; 1 << k];
            for (idx, &out) in table.iter().enumerate() {
                if out == 1 {
                    let mut v = 0usize;
                    for (pos, &bit_index) in subset.iter().enumerate() {
                        // bit_index counts from the most significant input bit
                        if idx >> (n - 1 - bit_index) & 1 == 1 {
                            v |= 1 << pos;
                        }
                    }
                    counts[v] += 1;
                }
            }
            if counts.iter().any(|&c| c * (1 << k) != total_ones) {
                all_subsets_pass = false;
                break 'subsets;
            }
            // Next k-subset in lexicographic order.
            let mut i = k;
            loop {
                if i == 0 {
                    break 'subsets;
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
        if !all_subsets_pass {
            return Ok(k - 1);
        }
    }
    Ok(n)
}
