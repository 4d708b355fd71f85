//! The exponential-sum data model.
//!
//! An [`ExpSum`] is a finite sum `Σ H_j e^{w_j z}` with nonzero complex
//! coefficients and distinct real frequencies, stored in increasing
//! frequency order. The normalized form `1 + H_1 e^{w_1 z} + ... + H_n e^{w_n z}`
//! with `0 < w_1 < ... < w_n` is what the rest of the crate works with;
//! [`ExpSum::normalize`] gets there from an arbitrary sum without changing the
//! zero set.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest accepted ratio between coefficient moduli.
pub const MAX_COEFF_RATIO: f64 = 1e300;

/// One term `coeff · e^{freq · z}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpTerm {
    pub coeff: Complex64,
    pub freq: f64,
}

impl ExpTerm {
    pub fn new(coeff: Complex64, freq: f64) -> Self {
        ExpTerm { coeff, freq }
    }
}

/// An exponential sum with terms sorted by strictly increasing frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpSum {
    terms: Vec<ExpTerm>,
    normalized: bool,
    // ln|H_j| and arg H_j, cached for the scaled evaluation frame
    log_abs: Vec<f64>,
    arg: Vec<f64>,
}

/// Result of [`ExpSum::normalize`]: `g(z) = prefactor · e^{shift·z} · sum(z)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Normalized {
    pub sum: ExpSum,
    pub shift: f64,
    pub prefactor: Complex64,
}

impl ExpSum {
    /// Builds a sum from terms in any order. Terms are sorted by frequency and
    /// validated: finite values, nonzero coefficients, distinct frequencies and
    /// a coefficient modulus ratio of at most [`MAX_COEFF_RATIO`].
    pub fn new(mut terms: Vec<ExpTerm>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidInput("exponential sum has no terms".into()));
        }
        for t in &terms {
            if !(t.coeff.re.is_finite() && t.coeff.im.is_finite() && t.freq.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "non-finite term ({}, freq {})",
                    t.coeff, t.freq
                )));
            }
            if t.coeff.norm() == 0.0 {
                return Err(Error::InvalidInput(format!(
                    "zero coefficient at frequency {}",
                    t.freq
                )));
            }
        }
        terms.sort_by(|a, b| a.freq.total_cmp(&b.freq));
        for pair in terms.windows(2) {
            let (a, b) = (pair[0].freq, pair[1].freq);
            if b - a <= 1e-12 * a.abs().max(b.abs()).max(1.0) {
                return Err(Error::InvalidInput(format!("duplicate frequency {a}")));
            }
        }
        let log_abs: Vec<f64> = terms.iter().map(|t| t.coeff.norm().ln()).collect();
        let (lo, hi) = log_abs
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
        if !lo.is_finite() || !hi.is_finite() || hi - lo > MAX_COEFF_RATIO.ln() {
            return Err(Error::InvalidInput(
                "coefficient moduli span more than 300 decades".into(),
            ));
        }
        let arg = terms.iter().map(|t| t.coeff.arg()).collect();
        let normalized = terms.len() >= 2
            && terms[0].freq == 0.0
            && terms[0].coeff == Complex64::new(1.0, 0.0);
        Ok(ExpSum { terms, normalized, log_abs, arg })
    }

    /// Builds a sum from `(coefficient, frequency)` pairs.
    pub fn from_pairs<I>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Complex64, f64)>,
    {
        Self::new(pairs.into_iter().map(|(c, w)| ExpTerm::new(c, w)).collect())
    }

    /// Builds `1 + Σ H_j e^{w_j z}` from the non-constant terms. All
    /// frequencies must be positive.
    pub fn normalized_from<I>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Complex64, f64)>,
    {
        let mut terms = vec![ExpTerm::new(Complex64::new(1.0, 0.0), 0.0)];
        for (c, w) in pairs {
            if !(w > 0.0) {
                return Err(Error::InvalidInput(format!(
                    "normalized sums need positive frequencies, got {w}"
                )));
            }
            terms.push(ExpTerm::new(c, w));
        }
        if terms.len() < 2 {
            return Err(Error::DegenerateSum);
        }
        Self::new(terms)
    }

    /// Real-coefficient shorthand for `normalized_from`.
    pub fn normalized_real(pairs: &[(f64, f64)]) -> Result<Self> {
        Self::normalized_from(pairs.iter().map(|&(h, w)| (Complex64::new(h, 0.0), w)))
    }

    pub fn terms(&self) -> &[ExpTerm] {
        &self.terms
    }

    pub fn term(&self, j: usize) -> &ExpTerm {
        &self.terms[j]
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Index of the last term; `n` in `1 + H_1 e^{w_1 z} + ... + H_n e^{w_n z}`.
    pub fn n(&self) -> usize {
        self.terms.len() - 1
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn freq(&self, j: usize) -> f64 {
        self.terms[j].freq
    }

    pub fn max_freq(&self) -> f64 {
        self.terms[self.n()].freq
    }

    pub fn min_freq(&self) -> f64 {
        self.terms[0].freq
    }

    pub(crate) fn log_abs(&self, j: usize) -> f64 {
        self.log_abs[j]
    }

    pub(crate) fn coeff_arg(&self, j: usize) -> f64 {
        self.arg[j]
    }

    /// Divides out the lowest-frequency term, producing the normalized form.
    pub fn normalize(&self) -> Result<Normalized> {
        if self.terms.len() < 2 {
            return Err(Error::DegenerateSum);
        }
        if self.normalized {
            return Ok(Normalized {
                sum: self.clone(),
                shift: 0.0,
                prefactor: Complex64::new(1.0, 0.0),
            });
        }
        let first = self.terms[0];
        let mut terms = Vec::with_capacity(self.terms.len());
        terms.push(ExpTerm::new(Complex64::new(1.0, 0.0), 0.0));
        for t in &self.terms[1..] {
            terms.push(ExpTerm::new(t.coeff / first.coeff, t.freq - first.freq));
        }
        Ok(Normalized {
            sum: ExpSum::new(terms)?,
            shift: first.freq,
            prefactor: first.coeff,
        })
    }

    /// The `order`-th derivative, as a (generally non-normalized) sum.
    /// Terms with zero frequency drop out.
    pub fn derivative(&self, order: u32) -> Result<ExpSum> {
        if order == 0 {
            return Ok(self.clone());
        }
        let terms: Vec<ExpTerm> = self
            .terms
            .iter()
            .filter(|t| t.freq != 0.0)
            .map(|t| ExpTerm::new(t.coeff * t.freq.powi(order as i32), t.freq))
            .collect();
        if terms.is_empty() {
            return Err(Error::DegenerateSum);
        }
        ExpSum::new(terms)
    }

    /// Parses the JSON problem format `{ "terms": [ { "re", "im", "freq" } ] }`.
    pub fn from_problem_json(text: &str) -> Result<Self> {
        let problem: ProblemFile = serde_json::from_str(text)
            .map_err(|e| Error::InvalidInput(format!("malformed problem file: {e}")))?;
        problem.into_sum()
    }

    pub fn to_problem(&self) -> ProblemFile {
        ProblemFile {
            terms: self
                .terms
                .iter()
                .map(|t| ProblemTerm { re: t.coeff.re, im: t.coeff.im, freq: t.freq })
                .collect(),
        }
    }
}

impl std::fmt::Display for ExpSum {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if t.coeff.im == 0.0 {
                write!(f, "{}", t.coeff.re)?;
            } else {
                write!(f, "({}{:+}i)", t.coeff.re, t.coeff.im)?;
            }
            if t.freq != 0.0 {
                write!(f, "·e^({}z)", t.freq)?;
            }
        }
        Ok(())
    }
}

/// On-disk problem description; the single ingestion format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemFile {
    pub terms: Vec<ProblemTerm>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemTerm {
    pub re: f64,
    pub im: f64,
    pub freq: f64,
}

impl ProblemFile {
    pub fn into_sum(self) -> Result<ExpSum> {
        ExpSum::new(
            self.terms
                .into_iter()
                .map(|t| ExpTerm::new(Complex64::new(t.re, t.im), t.freq))
                .collect(),
        )
    }
}
