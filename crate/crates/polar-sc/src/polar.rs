//! Polar code construction, encoding, and message embedding.
//!
//! Codes are described by a [`CodeSpec`]: block length `n = 2^m`, message
//! length `k`, and a frozen-position mask selecting the `n - k` least
//! reliable synthesized channels. Reliability is estimated with the erasure
//! Bhattacharyya recursion `Z⁻ = 2Z − Z²`, `Z⁺ = Z²` seeded from a design
//! erasure probability, which is deterministic and easy to check by hand.
//!
//! Encoding multiplies the intermediate message `u` by the Kronecker power
//! of `[[1, 0], [1, 1]]` in natural bit order (no bit-reversal permutation);
//! the decoders in this crate use the matching schedule. Bits are plain
//! `u8` values in `{0, 1}`.

use crate::{Error, Result};

/// An `(n, k)` polar code: block length, message length, frozen mask.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeSpec {
    n: usize,
    k: usize,
    frozen: Vec<bool>,
}

impl CodeSpec {
    /// Builds a code by freezing the `n - k` positions with the largest
    /// Bhattacharyya parameter. Ties freeze the lower index.
    pub fn new(n: usize, k: usize, design_erasure: f64) -> Result<Self> {
        let frozen = construct_frozen_mask(n, k, design_erasure)?;
        Ok(CodeSpec { n, k, frozen })
    }

    /// Builds a code from an explicit frozen mask (`true` = frozen).
    pub fn with_frozen_mask(frozen: Vec<bool>) -> Result<Self> {
        let n = frozen.len();
        check_block_length(n)?;
        let k = frozen.iter().filter(|&&f| !f).count();
        if k == 0 {
            return Err(Error::InvalidParameter(
                "frozen mask leaves no information positions".into(),
            ));
        }
        Ok(CodeSpec { n, k, frozen })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Frozen mask in `u`-index order (`true` = frozen, decodes to 0).
    pub fn frozen(&self) -> &[bool] {
        &self.frozen
    }

    /// Information positions in ascending index order.
    pub fn info_positions(&self) -> Vec<usize> {
        (0..self.n).filter(|&i| !self.frozen[i]).collect()
    }

    /// Places `msg` on the information positions in ascending index order;
    /// frozen positions are 0.
    pub fn embed_message(&self, msg: &[u8]) -> Result<Vec<u8>> {
        if msg.len() != self.k {
            return Err(Error::LengthMismatch {
                what: "message",
                expected: self.k,
                actual: msg.len(),
            });
        }
        let mut u = vec![0u8; self.n];
        let mut next = 0;
        for (i, &frozen) in self.frozen.iter().enumerate() {
            if !frozen {
                u[i] = msg[next] & 1;
                next += 1;
            }
        }
        Ok(u)
    }

    /// Reads the information positions back out of a decoded `u` vector.
    /// Inverse of [`CodeSpec::embed_message`].
    pub fn extract_message(&self, u_hat: &[u8]) -> Result<Vec<u8>> {
        if u_hat.len() != self.n {
            return Err(Error::LengthMismatch {
                what: "decoded vector",
                expected: self.n,
                actual: u_hat.len(),
            });
        }
        Ok((0..self.n)
            .filter(|&i| !self.frozen[i])
            .map(|i| u_hat[i] & 1)
            .collect())
    }

    /// Encodes an intermediate message: `x = u · F^{⊗m}` over GF(2).
    ///
    /// Callers must put 0 on frozen positions (see `embed_message`).
    pub fn encode(&self, u: &[u8]) -> Result<Vec<u8>> {
        if u.len() != self.n {
            return Err(Error::LengthMismatch {
                what: "intermediate message",
                expected: self.n,
                actual: u.len(),
            });
        }
        debug_assert!(
            self.frozen
                .iter()
                .zip(u)
                .all(|(&frozen, &bit)| !frozen || bit == 0),
            "frozen positions must carry 0"
        );
        Ok(polar_transform(u))
    }
}

/// In-place butterfly computing `u · F^{⊗m}`, `F = [[1, 0], [1, 1]]`, in
/// natural order. The transform is its own inverse over GF(2).
pub fn polar_transform(u: &[u8]) -> Vec<u8> {
    let n = u.len();
    debug_assert!(n.is_power_of_two());
    let mut x: Vec<u8> = u.iter().map(|&b| b & 1).collect();
    let mut half = 1;
    while half < n {
        for base in (0..n).step_by(2 * half) {
            for j in base..base + half {
                x[j] ^= x[j + half];
            }
        }
        half *= 2;
    }
    x
}

/// Bhattacharyya parameters of the `n` synthesized channels in `u`-index
/// order, starting from `Z = design_erasure` and applying `log2(n)` levels
/// of `Z⁻ = 2Z − Z²` (index bit 0) / `Z⁺ = Z²` (index bit 1), most
/// significant index bit first.
pub fn bhattacharyya_profile(n: usize, design_erasure: f64) -> Result<Vec<f64>> {
    check_block_length(n)?;
    if !(design_erasure > 0.0 && design_erasure < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "design erasure must lie in (0, 1), got {design_erasure}"
        )));
    }
    let mut z = vec![design_erasure];
    while z.len() < n {
        let mut next = Vec::with_capacity(z.len() * 2);
        for &v in &z {
            next.push(2.0 * v - v * v);
            next.push(v * v);
        }
        z = next;
    }
    Ok(z)
}

/// Frozen mask with exactly `n - k` entries set: the `k` positions with the
/// smallest Bhattacharyya parameter carry information, equal values freeze
/// the lower index first.
pub fn construct_frozen_mask(n: usize, k: usize, design_erasure: f64) -> Result<Vec<bool>> {
    let z = bhattacharyya_profile(n, design_erasure)?;
    if k == 0 || k > n {
        return Err(Error::InvalidParameter(format!(
            "message length k={k} out of range 1..={n}"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| z[b].partial_cmp(&z[a]).unwrap().then(a.cmp(&b)));
    let mut frozen = vec![false; n];
    for &i in order.iter().take(n - k) {
        frozen[i] = true;
    }
    Ok(frozen)
}

fn check_block_length(n: usize) -> Result<()> {
    if n < 2 || !n.is_power_of_two() {
        return Err(Error::InvalidParameter(format!(
            "block length must be a power of two >= 2, got {n}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn bhattacharyya_profile_n4() {
        let z = bhattacharyya_profile(4, 0.5).unwrap();
        let expected = [0.9375, 0.5625, 0.4375, 0.0625];
        for (got, want) in z.iter().zip(expected) {
            assert!((got - want).abs() < 1e-15, "got {got}, want {want}");
        }
    }

    #[test]
    fn profile_stays_in_unit_interval() {
        for &e in &[0.01, 0.3, 0.5, 0.9] {
            let z = bhattacharyya_profile(64, e).unwrap();
            assert!(z.iter().all(|&v| (0.0..=1.0).contains(&v)));
        }
    }

    #[test]
    fn frozen_mask_n4_k2() {
        let frozen = construct_frozen_mask(4, 2, 0.5).unwrap();
        assert_eq!(frozen, vec![true, true, false, false]);
    }

    #[test]
    fn rate_one_code_has_no_frozen_positions() {
        let frozen = construct_frozen_mask(2, 2, 0.37).unwrap();
        assert_eq!(frozen, vec![false, false]);
    }

    #[test]
    fn frozen_count_is_exact() {
        for (n, k) in [(8, 1), (8, 5), (16, 9), (128, 64), (256, 200)] {
            let frozen = construct_frozen_mask(n, k, 0.5).unwrap();
            assert_eq!(frozen.iter().filter(|&&f| f).count(), n - k);
        }
    }

    #[test]
    fn construction_rejects_bad_parameters() {
        assert!(construct_frozen_mask(8, 0, 0.5).is_err());
        assert!(construct_frozen_mask(8, 9, 0.5).is_err());
        assert!(construct_frozen_mask(6, 3, 0.5).is_err());
        assert!(construct_frozen_mask(8, 4, 0.0).is_err());
        assert!(construct_frozen_mask(8, 4, 1.0).is_err());
    }

    #[test]
    fn encode_known_vectors_n4() {
        let spec = CodeSpec::new(4, 4, 0.5).unwrap();
        assert_eq!(spec.encode(&[0, 0, 0, 0]).unwrap(), vec![0, 0, 0, 0]);
        assert_eq!(spec.encode(&[0, 0, 0, 1]).unwrap(), vec![1, 1, 1, 1]);
        assert_eq!(spec.encode(&[1, 0, 0, 0]).unwrap(), vec![1, 0, 0, 0]);
    }

    #[test]
    fn encode_rejects_length_mismatch() {
        let spec = CodeSpec::new(4, 2, 0.5).unwrap();
        assert!(spec.encode(&[0, 0, 1]).is_err());
        assert!(spec.embed_message(&[1]).is_err());
        assert!(spec.extract_message(&[0, 0, 0]).is_err());
    }

    #[test]
    fn encode_is_linear_and_involutive() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let u: Vec<u8> = (0..32).map(|_| rng.random::<bool>() as u8).collect();
            let v: Vec<u8> = (0..32).map(|_| rng.random::<bool>() as u8).collect();
            let sum: Vec<u8> = u.iter().zip(&v).map(|(a, b)| a ^ b).collect();
            let xu = polar_transform(&u);
            let xv = polar_transform(&v);
            let xsum = polar_transform(&sum);
            let xor: Vec<u8> = xu.iter().zip(&xv).map(|(a, b)| a ^ b).collect();
            assert_eq!(xsum, xor);
            assert_eq!(polar_transform(&xu), u);
        }
    }

    #[test]
    fn embed_extract_examples() {
        let spec = CodeSpec::new(4, 2, 0.5).unwrap();
        assert_eq!(spec.info_positions(), vec![2, 3]);
        assert_eq!(spec.embed_message(&[1, 0]).unwrap(), vec![0, 0, 1, 0]);
        assert_eq!(spec.extract_message(&[0, 0, 1, 0]).unwrap(), vec![1, 0]);
        assert_eq!(spec.embed_message(&[0, 0]).unwrap(), vec![0, 0, 0, 0]);

        let identity = CodeSpec::new(4, 4, 0.5).unwrap();
        assert_eq!(identity.embed_message(&[1, 1, 0, 1]).unwrap(), vec![1, 1, 0, 1]);
        assert_eq!(identity.extract_message(&[1, 1, 0, 1]).unwrap(), vec![1, 1, 0, 1]);
    }

    #[test]
    fn embed_extract_round_trip_exhaustive_n8() {
        let spec = CodeSpec::new(8, 4, 0.5).unwrap();
        for m in 0u32..16 {
            let msg: Vec<u8> = (0..4).map(|b| ((m >> b) & 1) as u8).collect();
            let u = spec.embed_message(&msg).unwrap();
            assert_eq!(spec.extract_message(&u).unwrap(), msg);
        }
    }

    #[test]
    fn explicit_mask_constructor() {
        let spec = CodeSpec::with_frozen_mask(vec![true, false, true, false]).unwrap();
        assert_eq!(spec.k(), 2);
        assert_eq!(spec.info_positions(), vec![1, 3]);
        assert!(CodeSpec::with_frozen_mask(vec![true, true]).is_err());
        assert!(CodeSpec::with_frozen_mask(vec![false; 3]).is_err());
    }
}
