//! Exact rational annotations for amplitudes of the form ±√(n/d).
//!
//! The rational-amplitude theorem is exact, so states produced and consumed
//! by the fine-graining pipeline carry their squared amplitudes as integer
//! ratios over a common denominator, with a ±1 phase flag per entry. All
//! exact-mode operations (permutation unitaries, partial traces, Born
//! probabilities, equality tests) work on these annotations in integer
//! arithmetic; anything that would leave the representable set drops the
//! annotation and falls back to floating point.

use num_integer::Roots;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

/// Exact rational used throughout the solver and the exact pipeline.
pub type Rat = Ratio<i64>;

/// Squared amplitudes as `num[i]/den` with signs `±1`; the amplitude itself
/// is `sign[i] * sqrt(num[i]/den)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactAmplitudes {
    pub num: Vec<u64>,
    pub den: u64,
    pub signs: Vec<i8>,
}

impl ExactAmplitudes {
    /// All-real annotation from per-entry squared numerators over a common
    /// denominator. Zero entries keep sign +1.
    pub fn from_squares(num: Vec<u64>, den: u64, signs: Vec<i8>) -> crate::Result<Self> {
        if num.len() != signs.len() {
            return Err(crate::Error::ExactRequired(format!(
                "num has {} entries but signs has {}",
                num.len(),
                signs.len()
            )));
        }
        if den == 0 {
            return Err(crate::Error::ExactRequired("denominator is zero".into()));
        }
        if signs.iter().any(|s| *s != 1 && *s != -1) {
            return Err(crate::Error::ExactRequired("signs must be +1 or -1".into()));
        }
        let total: u64 = num.iter().sum();
        if total != den {
            return Err(crate::Error::ExactRequired(format!(
                "squared amplitudes sum to {total}/{den}, not 1"
            )));
        }
        Ok(Self { num, den, signs })
    }

    pub fn len(&self) -> usize {
        self.num.len()
    }

    pub fn is_empty(&self) -> bool {
        self.num.is_empty()
    }

    /// Amplitude value at `i` as a float.
    pub fn value(&self, i: usize) -> f64 {
        let m = (self.num[i] as f64 / self.den as f64).sqrt();
        f64::from(self.signs[i]) * m
    }

    /// Squared amplitude at `i` as an exact ratio.
    pub fn square(&self, i: usize) -> Rat {
        Rat::new(self.num[i] as i64, self.den as i64)
    }

    /// Reduced squared amplitude (num/den with gcd divided out).
    pub fn square_reduced(&self, i: usize) -> (u64, u64) {
        let g = num_integer::gcd(self.num[i], self.den);
        if g == 0 {
            return (0, 1);
        }
        (self.num[i] / g, self.den / g)
    }

    /// True when every entry is real nonnegative (no −1 phase on support).
    pub fn phase_free(&self) -> bool {
        self.num
            .iter()
            .zip(&self.signs)
            .all(|(n, s)| *n == 0 || *s == 1)
    }

    /// Entrywise equality up to one global sign; returns the sign when equal.
    pub fn equal_up_to_sign(&self, other: &Self) -> Option<i8> {
        if self.len() != other.len() {
            return None;
        }
        // Compare squares cross-multiplied so differing denominators compare
        // correctly, then align signs on the common support.
        let same_squares = (0..self.len()).all(|i| {
            self.num[i] as u128 * other.den as u128 == other.num[i] as u128 * self.den as u128
        });
        if !same_squares {
            return None;
        }
        let mut global: Option<i8> = None;
        for i in 0..self.len() {
            if self.num[i] == 0 {
                continue;
            }
            let rel = self.signs[i] * other.signs[i];
            match global {
                None => global = Some(rel),
                Some(g) if g != rel => return None,
                _ => {}
            }
        }
        Some(global.unwrap_or(1))
    }
}

/// √(r) as an exact rational, when r is a perfect square of a rational.
pub fn sqrt_rational(r: Rat) -> Option<Rat> {
    if r < Rat::from_integer(0) {
        return None;
    }
    let n = *r.numer() as u64;
    let d = *r.denom() as u64;
    let sn = n.sqrt();
    let sd = d.sqrt();
    if sn * sn == n && sd * sd == d {
        Some(Rat::new(sn as i64, sd as i64))
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_squares_rejects_bad_sum() {
        assert!(ExactAmplitudes::from_squares(vec![1, 1], 3, vec![1, 1]).is_err());
        assert!(ExactAmplitudes::from_squares(vec![1, 2], 3, vec![1, 1]).is_ok());
    }

    #[test]
    fn equal_up_to_sign_detects_global_flip() {
        let a = ExactAmplitudes::from_squares(vec![1, 0, 0, 1], 2, vec![1, 1, 1, 1]).unwrap();
        let b = ExactAmplitudes::from_squares(vec![1, 0, 0, 1], 2, vec![-1, 1, 1, -1]).unwrap();
        let c = ExactAmplitudes::from_squares(vec![1, 0, 0, 1], 2, vec![1, 1, 1, -1]).unwrap();
        assert_eq!(a.equal_up_to_sign(&b), Some(-1));
        assert_eq!(a.equal_up_to_sign(&a), Some(1));
        assert_eq!(a.equal_up_to_sign(&c), None);
    }

    #[test]
    fn sqrt_rational_perfect_and_imperfect() {
        assert_eq!(sqrt_rational(Rat::new(4, 9)), Some(Rat::new(2, 3)));
        assert_eq!(sqrt_rational(Rat::new(1, 1)), Some(Rat::from_integer(1)));
        assert_eq!(sqrt_rational(Rat::new(1, 2)), None);
    }
}
