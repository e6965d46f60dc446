//! Position modulation: the bijection between blocks of source bits and
//! one-hot sections, plus hard decision and the section error rate.
//!
//! A source of `m = L log2(B)` bits is split into `L` groups. Each group is
//! read as a big-endian integer `v` and marks one position in a length-`B`
//! section: `v = 0` selects the rightmost entry, `v = B-1` the leftmost
//! (0-based index from the left is `B - 1 - v`).

use crate::error::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

/// A binary source message sectioned for position modulation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceMessage {
    bits: Vec<u8>,
    section_size: usize,
}

impl SourceMessage {
    /// `bits` must contain only 0/1 and have length divisible by log2(B).
    pub fn new(bits: Vec<u8>, section_size: usize) -> Result<Self> {
        let lb = section_bits(section_size)?;
        if bits.len() % lb != 0 || bits.is_empty() {
            return Err(Error::invalid(format!(
                "bit length {} is not a positive multiple of log2(B) = {lb}",
                bits.len()
            )));
        }
        if bits.iter().any(|&b| b > 1) {
            return Err(Error::invalid("bits must be 0 or 1"));
        }
        Ok(SourceMessage { bits, section_size })
    }

    /// Uniform random message with `sections` sections, reproducible from `seed`.
    pub fn random(sections: usize, section_size: usize, seed: u64) -> Result<Self> {
        let lb = section_bits(section_size)?;
        if sections == 0 {
            return Err(Error::invalid("need at least one section"));
        }
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
        let bits = (0..sections * lb).map(|_| rng.gen_range(0..=1u8)).collect();
        Ok(SourceMessage { bits, section_size })
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn section_size(&self) -> usize {
        self.section_size
    }

    pub fn num_sections(&self) -> usize {
        self.bits.len() / self.section_size.trailing_zeros() as usize
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }
}

/// Sparse one-hot signal: `L` sections of size `B`, stored as the per-section
/// position of the unit entry. Sections live contiguously in one length-N
/// buffer with `(l, b) -> l*B + b` indexing when densified.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseSignal {
    positions: Vec<u32>,
    section_size: usize,
}

impl SparseSignal {
    pub fn from_positions(positions: Vec<u32>, section_size: usize) -> Result<Self> {
        section_bits(section_size)?;
        if positions.is_empty() {
            return Err(Error::invalid("need at least one section"));
        }
        if positions.iter().any(|&p| p as usize >= section_size) {
            return Err(Error::invalid("position out of section range"));
        }
        Ok(SparseSignal { positions, section_size })
    }

    /// Validate a dense 0/1 vector: exactly one unit entry per section.
    pub fn from_dense(values: &[f64], section_size: usize) -> Result<Self> {
        section_bits(section_size)?;
        if values.is_empty() || values.len() % section_size != 0 {
            return Err(Error::invalid(format!(
                "dense length {} is not a positive multiple of B = {section_size}",
                values.len()
            )));
        }
        let mut positions = Vec::with_capacity(values.len() / section_size);
        for (l, sec) in values.chunks_exact(section_size).enumerate() {
            let mut pos = None;
            for (i, &v) in sec.iter().enumerate() {
                if v == 1.0 {
                    if pos.is_some() {
                        return Err(Error::invalid(format!(
                            "section {l} has multiple unit entries"
                        )));
                    }
                    pos = Some(i as u32);
                } else if v != 0.0 {
                    return Err(Error::invalid(format!(
                        "section {l} has non-binary entry {v}"
                    )));
                }
            }
            match pos {
                Some(p) => positions.push(p),
                None => {
                    return Err(Error::invalid(format!("section {l} has no unit entry")))
                }
            }
        }
        Ok(SparseSignal { positions, section_size })
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let b = self.section_size;
        let mut out = vec![0.0; self.positions.len() * b];
        for (l, &p) in self.positions.iter().enumerate() {
            out[l * b + p as usize] = 1.0;
        }
        out
    }

    pub fn positions(&self) -> &[u32] {
        &self.positions
    }

    pub fn section_size(&self) -> usize {
        self.section_size
    }

    pub fn num_sections(&self) -> usize {
        self.positions.len()
    }

    /// Total dense length N = L*B.
    pub fn len(&self) -> usize {
        self.positions.len() * self.section_size
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
}

/// Soft sectionwise estimate with entries in [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct SoftSignal {
    values: Vec<f64>,
    section_size: usize,
}

impl SoftSignal {
    pub fn new(values: Vec<f64>, section_size: usize) -> Result<Self> {
        section_bits(section_size)?;
        if values.is_empty() || values.len() % section_size != 0 {
            return Err(Error::invalid(format!(
                "soft length {} is not a positive multiple of B = {section_size}",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0 || *v > 1.0) {
            return Err(Error::invalid("soft entries must be finite in [0,1]"));
        }
        Ok(SoftSignal { values, section_size })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn section(&self, l: usize) -> &[f64] {
        &self.values[l * self.section_size..(l + 1) * self.section_size]
    }

    pub fn section_size(&self) -> usize {
        self.section_size
    }

    pub fn num_sections(&self) -> usize {
        self.values.len() / self.section_size
    }

    /// Largest deviation of a section sum from 1 (posterior-mean outputs of
    /// the denoiser satisfy this to numerical precision).
    pub fn max_section_sum_error(&self) -> f64 {
        self.values
            .chunks_exact(self.section_size)
            .map(|sec| (sec.iter().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

fn section_bits(section_size: usize) -> Result<usize> {
    if section_size < 2 || !section_size.is_power_of_two() {
        return Err(Error::invalid(format!(
            "section size must be a power of 2 and >= 2, got {section_size}"
        )));
    }
    Ok(section_size.trailing_zeros() as usize)
}

/// Map source bits to the one-hot signal.
pub fn pm_encode(u: &SourceMessage) -> SparseSignal {
    let b = u.section_size;
    let lb = b.trailing_zeros() as usize;
    let positions = u
        .bits
        .chunks_exact(lb)
        .map(|chunk| {
            let mut v = 0usize;
            for &bit in chunk {
                v = (v << 1) | bit as usize;
            }
            (b - 1 - v) as u32
        })
        .collect();
    SparseSignal { positions, section_size: b }
}

/// Exact inverse of [`pm_encode`].
pub fn pm_decode(s: &SparseSignal) -> SourceMessage {
    let b = s.section_size;
    let lb = b.trailing_zeros() as usize;
    let mut bits = Vec::with_capacity(s.positions.len() * lb);
    for &p in &s.positions {
        let v = b - 1 - p as usize;
        for k in (0..lb).rev() {
            bits.push(((v >> k) & 1) as u8);
        }
    }
    SourceMessage { bits, section_size: b }
}

/// Per-section argmax with ties broken toward the lowest index.
pub fn hard_decision(shat: &SoftSignal) -> SparseSignal {
    let b = shat.section_size;
    let positions = shat
        .values
        .chunks_exact(b)
        .map(|sec| {
            let mut best = 0usize;
            for (i, &v) in sec.iter().enumerate().skip(1) {
                if v > sec[best] {
                    best = i;
                }
            }
            best as u32
        })
        .collect();
    SparseSignal { positions, section_size: b }
}

/// Fraction of sections whose reconstruction differs from the reference.
pub fn section_error_rate(s: &SparseSignal, sbar: &SparseSignal) -> Result<f64> {
    if s.section_size != sbar.section_size || s.positions.len() != sbar.positions.len() {
        return Err(Error::dim(format!(
            "signal shapes differ: {}x{} vs {}x{}",
            s.positions.len(),
            s.section_size,
            sbar.positions.len(),
            sbar.section_size
        )));
    }
    let wrong = s
        .positions
        .iter()
        .zip(&sbar.positions)
        .filter(|(a, b)| a != b)
        .count();
    Ok(wrong as f64 / s.positions.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn msg(bits: &[u8], b: usize) -> SourceMessage {
        SourceMessage::new(bits.to_vec(), b).unwrap()
    }

    #[test]
    fn encode_worked_example() {
        // u = [00, 01, 11, 10, 01] -> s = [0001, 0010, 1000, 0100, 0010]
        let u = msg(&[0, 0, 0, 1, 1, 1, 1, 0, 0, 1], 4);
        let s = pm_encode(&u);
        let dense = s.to_dense();
        let expected = [
            0.0, 0.0, 0.0, 1.0, //
            0.0, 0.0, 1.0, 0.0, //
            1.0, 0.0, 0.0, 0.0, //
            0.0, 1.0, 0.0, 0.0, //
            0.0, 0.0, 1.0, 0.0,
        ];
        assert_eq!(dense, expected);
    }

    #[test]
    fn encode_b2() {
        let s = pm_encode(&msg(&[0], 2));
        assert_eq!(s.to_dense(), vec![0.0, 1.0]);
        let s = pm_encode(&msg(&[1], 2));
        assert_eq!(s.to_dense(), vec![1.0, 0.0]);
    }

    #[test]
    fn decode_worked_example() {
        let dense = [
            0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0,
            0.0, 0.0, 1.0, 0.0,
        ];
        let s = SparseSignal::from_dense(&dense, 4).unwrap();
        let u = pm_decode(&s);
        assert_eq!(u.bits(), &[0, 0, 0, 1, 1, 1, 1, 0, 0, 1]);
    }

    #[test]
    fn decode_rejects_malformed_sections() {
        assert!(SparseSignal::from_dense(&[0.0, 0.0], 2).is_err());
        assert!(SparseSignal::from_dense(&[1.0, 1.0], 2).is_err());
        assert!(SparseSignal::from_dense(&[0.5, 0.5], 2).is_err());
        assert!(SparseSignal::from_dense(&[1.0, 0.0, 0.0], 2).is_err());
    }

    #[test]
    fn message_validation() {
        assert!(SourceMessage::new(vec![0, 1, 0], 4).is_err()); // not divisible by 2
        assert!(SourceMessage::new(vec![0, 2], 2).is_err()); // non-bit
        assert!(SourceMessage::new(vec![0, 1], 3).is_err()); // B not a power of 2
        assert!(SourceMessage::new(vec![], 2).is_err());
    }

    #[test]
    fn round_trip_thousand_random_messages() {
        for seed in 0..1000u64 {
            let u = SourceMessage::random(16, 4, seed).unwrap();
            assert_eq!(pm_decode(&pm_encode(&u)), u);
        }
    }

    #[test]
    fn hard_decision_cases() {
        let s = SoftSignal::new(vec![0.1, 0.7, 0.15, 0.05], 4).unwrap();
        assert_eq!(hard_decision(&s).positions(), &[1]);
        // tie breaks to the lowest index
        let s = SoftSignal::new(vec![0.25, 0.25, 0.25, 0.25], 4).unwrap();
        assert_eq!(hard_decision(&s).positions(), &[0]);
        // one-hot input is a fixed point
        let s = SoftSignal::new(vec![0.0, 0.0, 1.0, 0.0], 4).unwrap();
        let hd = hard_decision(&s);
        assert_eq!(hd.to_dense(), s.values());
    }

    #[test]
    fn section_error_rate_cases() {
        let a = SparseSignal::from_positions(vec![0, 1, 2, 3], 4).unwrap();
        assert_eq!(section_error_rate(&a, &a).unwrap(), 0.0);
        let b = SparseSignal::from_positions(vec![0, 1, 2, 0], 4).unwrap();
        assert_eq!(section_error_rate(&a, &b).unwrap(), 0.25);
        let c = SparseSignal::from_positions(vec![0, 1], 4).unwrap();
        assert!(section_error_rate(&a, &c).is_err());
    }

    #[test]
    fn section_error_rate_matches_bruteforce() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(9);
        for _ in 0..50 {
            let l = 64;
            let pa: Vec<u32> = (0..l).map(|_| rng.gen_range(0..8)).collect();
            let pb: Vec<u32> = (0..l).map(|_| rng.gen_range(0..8)).collect();
            let a = SparseSignal::from_positions(pa.clone(), 8).unwrap();
            let b = SparseSignal::from_positions(pb.clone(), 8).unwrap();
            // brute force over dense sections
            let (da, db) = (a.to_dense(), b.to_dense());
            let mut wrong = 0;
            for l0 in 0..l {
                if da[l0 * 8..(l0 + 1) * 8] != db[l0 * 8..(l0 + 1) * 8] {
                    wrong += 1;
                }
            }
            let ser = section_error_rate(&a, &b).unwrap();
            assert_eq!(ser, wrong as f64 / l as f64);
            assert_eq!(ser, section_error_rate(&b, &a).unwrap());
        }
    }

    proptest! {
        #[test]
        fn prop_round_trip(b_pow in 1usize..5, l in 1usize..1024, seed in 0u64..1000) {
            let b = 1usize << b_pow;
            let u = SourceMessage::random(l, b, seed).unwrap();
            let s = pm_encode(&u);
            prop_assert_eq!(pm_decode(&s), u);
            // encode output satisfies the one-hot invariant by construction
            prop_assert!(SparseSignal::from_dense(&s.to_dense(), b).is_ok());
        }

        #[test]
        fn prop_hard_decision_invariants(l in 1usize..64, seed in 0u64..500) {
            let b = 4usize;
            let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
            let vals: Vec<f64> = (0..l * b).map(|_| rng.gen::<f64>()).collect();
            // normalize sections to [0,1]
            let s = SoftSignal::new(vals.clone(), b).unwrap();
            let hd = hard_decision(&s);
            prop_assert!(SparseSignal::from_dense(&hd.to_dense(), b).is_ok());
            // invariance under strictly monotone per-section rescale
            let rescaled: Vec<f64> = vals.iter().map(|v| v * 0.5 + 0.25).collect();
            let s2 = SoftSignal::new(rescaled, b).unwrap();
            prop_assert_eq!(hard_decision(&s2), hd);
        }
    }
}
