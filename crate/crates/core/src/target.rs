//! Target-distribution bookkeeping and the quantile matcher.
//!
//! A discrete target with alphabet `a_1 < ... < a_q` and pmf `P_1..P_q`
//! induces quantile thresholds `c_0 = -inf < c_1 < ... < c_q = +inf` with
//! `c_k = Q^{-1}(1 - sum_{j<=k} P_j)`. Quantizing a standard Gaussian with
//! these thresholds reproduces the pmf exactly at every blocklength.

use crate::error::{Error, Result};
use crate::gauss::{q, q_inv};
use crate::operators::SensingOperator;
use crate::pm::{pm_encode, SourceMessage, SparseSignal};
use std::path::Path;

/// Discrete target distribution with precomputed quantile thresholds.
#[derive(Debug, Clone)]
pub struct TargetDistribution {
    symbols: Vec<f64>,
    pmf: Vec<f64>,
    /// c_0..c_q, with c_0 = -inf and c_q = +inf.
    thresholds: Vec<f64>,
    label: String,
}

const PMF_SUM_TOL: f64 = 1e-12;

impl TargetDistribution {
    /// Build from a sorted alphabet and a strictly positive pmf summing to 1.
    pub fn from_pmf(symbols: &[f64], pmf: &[f64]) -> Result<Self> {
        if symbols.len() != pmf.len() || symbols.len() < 2 {
            return Err(Error::invalid(
                "alphabet and pmf must have equal length >= 2",
            ));
        }
        if symbols.iter().any(|s| !s.is_finite()) {
            return Err(Error::invalid("symbols must be finite"));
        }
        if symbols.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("symbols must be distinct and ascending"));
        }
        if pmf.iter().any(|&p| !(p > 0.0) || !p.is_finite()) {
            return Err(Error::invalid("pmf entries must be positive"));
        }
        let total: f64 = pmf.iter().sum();
        if (total - 1.0).abs() > PMF_SUM_TOL {
            return Err(Error::invalid(format!(
                "pmf sums to {total}, expected 1 within {PMF_SUM_TOL:e}"
            )));
        }
        let qn = pmf.len();
        let mut thresholds = Vec::with_capacity(qn + 1);
        thresholds.push(f64::NEG_INFINITY);
        let mut cum = 0.0;
        for &p in &pmf[..qn - 1] {
            cum += p;
            thresholds.push(q_inv(1.0 - cum));
        }
        thresholds.push(f64::INFINITY);
        if thresholds.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("thresholds are not strictly increasing"));
        }
        let label = format!(
            "pmf[{}]",
            pmf.iter()
                .map(|p| format!("{p}"))
                .collect::<Vec<_>>()
                .join(",")
        );
        Ok(TargetDistribution {
            symbols: symbols.to_vec(),
            pmf: pmf.to_vec(),
            thresholds,
            label,
        })
    }

    /// Bernoulli(p_star) target over {0, 1}: the q = 2 special case.
    pub fn binary(p_star: f64) -> Result<Self> {
        if !(p_star > 0.0 && p_star < 1.0) {
            return Err(Error::invalid(format!(
                "binary target needs 0 < p* < 1, got {p_star}"
            )));
        }
        let mut t = Self::from_pmf(&[0.0, 1.0], &[1.0 - p_star, p_star])?;
        t.label = format!("binary[{p_star}]");
        Ok(t)
    }

    /// Read "(symbol probability)" pairs from a text file. Blank lines and
    /// lines starting with '#' are ignored.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())?;
        let mut symbols = Vec::new();
        let mut pmf = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace();
            let (sym, prob) = match (parts.next(), parts.next(), parts.next()) {
                (Some(s), Some(p), None) => (s, p),
                _ => {
                    return Err(Error::invalid(format!(
                        "line {}: expected 'symbol probability'",
                        lineno + 1
                    )))
                }
            };
            let sym: f64 = sym.parse().map_err(|_| {
                Error::invalid(format!("line {}: bad symbol '{sym}'", lineno + 1))
            })?;
            let prob: f64 = prob.parse().map_err(|_| {
                Error::invalid(format!("line {}: bad probability '{prob}'", lineno + 1))
            })?;
            symbols.push(sym);
            pmf.push(prob);
        }
        Self::from_pmf(&symbols, &pmf)
    }

    pub fn num_symbols(&self) -> usize {
        self.pmf.len()
    }

    pub fn symbols(&self) -> &[f64] {
        &self.symbols
    }

    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }

    /// Thresholds c_0..c_q including both infinite endpoints.
    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    /// Quantization interval (c_{k}, c_{k+1}] for 0-based symbol index k.
    pub fn interval(&self, k: usize) -> (f64, f64) {
        (self.thresholds[k], self.thresholds[k + 1])
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Shannon entropy in bits.
    pub fn entropy_bits(&self) -> f64 {
        entropy_bits(&self.pmf)
    }
}

/// Shannon entropy of a pmf, in bits.
pub fn entropy_bits(pmf: &[f64]) -> f64 {
    -pmf.iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| p * p.log2())
        .sum::<f64>()
}

/// KL divergence D(p_hat || p) in bits; +inf when p_hat puts mass where p has none.
pub fn kl_divergence_bits(p_hat: &[f64], p: &[f64]) -> Result<f64> {
    if p_hat.len() != p.len() {
        return Err(Error::dim("pmf supports differ in size".to_string()));
    }
    let mut acc = 0.0;
    for (&a, &b) in p_hat.iter().zip(p) {
        if a == 0.0 {
            continue;
        }
        if b == 0.0 {
            return Ok(f64::INFINITY);
        }
        acc += a * (a / b).log2();
    }
    Ok(acc)
}

/// Total variation distance between two pmfs on the same support.
pub fn total_variation(p: &[f64], q_: &[f64]) -> f64 {
    0.5 * p
        .iter()
        .zip(q_)
        .map(|(&a, &b)| (a - b).abs())
        .sum::<f64>()
}

/// A sequence over the target alphabet, stored as symbol indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TargetSequence {
    indices: Vec<u16>,
}

impl TargetSequence {
    pub fn from_indices(indices: Vec<u16>, t: &TargetDistribution) -> Result<Self> {
        if indices.iter().any(|&k| k as usize >= t.num_symbols()) {
            return Err(Error::invalid("symbol index outside alphabet"));
        }
        Ok(TargetSequence { indices })
    }

    /// Map raw symbol values back to alphabet indices (exact within 1e-9
    /// relative, for round-tripping through text formats).
    pub fn from_symbols(values: &[f64], t: &TargetDistribution) -> Result<Self> {
        let mut indices = Vec::with_capacity(values.len());
        for &v in values {
            let k = t
                .symbols
                .iter()
                .position(|&a| (a - v).abs() <= 1e-9 * a.abs().max(1.0))
                .ok_or_else(|| Error::invalid(format!("value {v} not in alphabet")))?;
            indices.push(k as u16);
        }
        Ok(TargetSequence { indices })
    }

    pub fn indices(&self) -> &[u16] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn to_symbols(&self, t: &TargetDistribution) -> Vec<f64> {
        self.indices.iter().map(|&k| t.symbols[k as usize]).collect()
    }

    /// Empirical pmf over the alphabet of `t`.
    pub fn empirical_pmf(&self, t: &TargetDistribution) -> Vec<f64> {
        let mut counts = vec![0usize; t.num_symbols()];
        for &k in &self.indices {
            counts[k as usize] += 1;
        }
        counts
            .into_iter()
            .map(|c| c as f64 / self.indices.len() as f64)
            .collect()
    }
}

/// Componentwise quantization: y_i = a_k iff c_{k-1} < z_i <= c_k.
pub fn quantize(z: &[f64], t: &TargetDistribution) -> TargetSequence {
    let inner = &t.thresholds[1..t.num_symbols()];
    let indices = z
        .iter()
        .map(|&zi| {
            assert!(zi.is_finite(), "quantize input must be finite");
            inner.partition_point(|&c| c < zi) as u16
        })
        .collect();
    TargetSequence { indices }
}

/// The matcher: PM-encode the source, project through the coding operator,
/// quantize. Returns the target sequence and the intermediate sparse signal.
pub fn match_source(
    u: &SourceMessage,
    op: &dyn SensingOperator,
    t: &TargetDistribution,
) -> Result<(TargetSequence, SparseSignal)> {
    let s = pm_encode(u);
    if s.len() != op.cols() {
        return Err(Error::dim(format!(
            "signal length {} vs operator cols {}",
            s.len(),
            op.cols()
        )));
    }
    let mut z = vec![0.0; op.rows()];
    op.forward_signal_into(&s, &mut z)?;
    Ok((quantize(&z, t), s))
}
