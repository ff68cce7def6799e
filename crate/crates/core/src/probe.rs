//! Stateless Paired-Sign Probe generator.
//!
//! A probe `z ∈ {0, ±1}^n` zeroes `r` entries (the indices permuted into the
//! top `r` slots), pairs the remaining indices by adjacent slots
//! `2u, 2u + 1` of a keyed permutation, and gives the two members of pair
//! `u` opposite signs. Every entry is computed from `(master_seed, k, i)`
//! alone; nothing of size `n` is stored.
//!
//! Seed material for probe `k` comes from [`PrfStream`] (SplitMix64 keyed by
//! the master seed and `k`); the word layout is documented in
//! `docs/probe-stream.md` and must stay bit-exact.

use serde::Serialize;

use crate::error::{Error, Result};

pub(crate) const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
pub(crate) const PROBE_DOMAIN: u64 = 0x7072_6f62_6500_0001;
pub(crate) const WALK_DOMAIN: u64 = 0x7761_6c6b_0000_0002;

/// Round keys drawn per probe; only the first [`ProbeKey::rounds`] are used.
pub const MAX_ROUNDS: usize = 10;
/// Feistel rounds for domains up to 2^14; below that width four rounds leave
/// a measurable position bias after cycle walking.
pub const SMALL_DOMAIN_ROUNDS: usize = 10;
/// Feistel rounds for wider domains.
pub const LARGE_DOMAIN_ROUNDS: usize = 4;
const SMALL_DOMAIN_MAX_HALF_BITS: u32 = 7;

/// Largest dimension [`ProbeKey::materialize`] will expand.
pub const MATERIALIZE_CAP: u64 = 1_000_000;

/// SplitMix64 output function (Stafford variant 13).
#[inline(always)]
pub(crate) fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Counter-mode pseudorandom stream over `(seed, domain, index)`.
///
/// The stream key is `mix64(mix64(seed ^ domain) ^ index·γ)`; word `j`
/// (0-based) is `mix64(key + (j + 1)·γ)` with γ the golden-ratio constant.
#[derive(Clone, Debug)]
pub struct PrfStream {
    key: u64,
    counter: u64,
}

impl PrfStream {
    pub fn new(seed: u64, domain: u64, index: u64) -> Self {
        let key = mix64(mix64(seed ^ domain) ^ index.wrapping_mul(GOLDEN_GAMMA));
        Self { key, counter: 0 }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(1);
        mix64(self.key.wrapping_add(self.counter.wrapping_mul(GOLDEN_GAMMA)))
    }

    /// Exactly uniform on `0..range` by widening multiply with rejection.
    pub fn below(&mut self, range: u64) -> u64 {
        assert!(range > 0);
        let threshold = range.wrapping_neg() % range;
        loop {
            let m = u128::from(self.next_u64()) * u128::from(range);
            if (m as u64) >= threshold {
                return (m >> 64) as u64;
            }
        }
    }
}

/// Smallest prime strictly greater than `x`.
pub fn next_prime_above(x: u64) -> u64 {
    let mut c = x + 1;
    while !primal_check::miller_rabin(c) {
        c += 1;
    }
    c
}

/// Per-dimension constants shared by every probe of one query.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProbeFamily {
    master_seed: u64,
    n: u64,
    prime: u64,
    half_bits: u32,
    rounds: usize,
}

impl ProbeFamily {
    pub fn new(master_seed: u64, n: u64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!("probe dimension must be at least 2, got {n}")));
        }
        if n > 1 << 62 {
            return Err(Error::InvalidParameter(format!("probe dimension {n} too large")));
        }
        // smallest w with 4^w >= n
        let mut half_bits = 1u32;
        while (1u128 << (2 * half_bits)) < u128::from(n) {
            half_bits += 1;
        }
        let rounds = if half_bits <= SMALL_DOMAIN_MAX_HALF_BITS { SMALL_DOMAIN_ROUNDS } else { LARGE_DOMAIN_ROUNDS };
        Ok(Self { master_seed, n, prime: next_prime_above(n / 2), half_bits, rounds })
    }

    pub fn dimension(&self) -> u64 {
        self.n
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn key(&self, k: u64) -> ProbeKey {
        let mut prf = PrfStream::new(self.master_seed, PROBE_DOMAIN, k);
        let coin = prf.next_u64();
        let r = if self.n % 2 == 1 {
            1
        } else if coin & 1 == 0 {
            0
        } else {
            2
        };
        let mut round_keys = [0u64; MAX_ROUNDS];
        for key in round_keys.iter_mut() {
            *key = prf.next_u64();
        }
        let a = 1 + prf.below(self.prime - 1);
        let b = prf.below(self.prime);
        ProbeKey {
            k,
            n: self.n,
            r,
            round_keys,
            rounds: self.rounds,
            half_bits: self.half_bits,
            half_mask: (1u64 << self.half_bits) - 1,
            a,
            b,
            p: self.prime,
        }
    }
}

/// Everything needed to evaluate one probe entry in O(1) expected time.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProbeKey {
    pub k: u64,
    pub n: u64,
    /// Number of zeroed entries: 1 for odd `n`, 0 or 2 for even `n`.
    pub r: u8,
    pub round_keys: [u64; MAX_ROUNDS],
    pub rounds: usize,
    half_bits: u32,
    half_mask: u64,
    pub a: u64,
    pub b: u64,
    pub p: u64,
}

/// One-shot derivation of probe `k`; prefer [`ProbeFamily`] in loops.
pub fn derive_probe(master_seed: u64, k: u64, n: u64) -> Result<ProbeKey> {
    Ok(ProbeFamily::new(master_seed, n)?.key(k))
}

impl ProbeKey {
    #[inline(always)]
    fn round(&self, x: u64, key: u64) -> u64 {
        mix64(x ^ key) & self.half_mask
    }

    #[inline(always)]
    fn encrypt(&self, x: u64) -> u64 {
        let mut left = x >> self.half_bits;
        let mut right = x & self.half_mask;
        for &key in &self.round_keys[..self.rounds] {
            let next = left ^ self.round(right, key);
            left = right;
            right = next;
        }
        (left << self.half_bits) | right
    }

    #[inline(always)]
    fn decrypt(&self, y: u64) -> u64 {
        let mut left = y >> self.half_bits;
        let mut right = y & self.half_mask;
        for &key in self.round_keys[..self.rounds].iter().rev() {
            let prev = right ^ self.round(left, key);
            right = left;
            left = prev;
        }
        (left << self.half_bits) | right
    }

    #[inline]
    pub(crate) fn permute_unchecked(&self, i: u64) -> u64 {
        let mut y = self.encrypt(i);
        while y >= self.n {
            y = self.encrypt(y);
        }
        y
    }

    #[inline]
    pub(crate) fn inverse_permute_unchecked(&self, y: u64) -> u64 {
        let mut x = self.decrypt(y);
        while x >= self.n {
            x = self.decrypt(x);
        }
        x
    }

    fn check(&self, i: u64) -> Result<()> {
        if i < self.n {
            Ok(())
        } else {
            Err(Error::NodeOutOfRange(i))
        }
    }

    pub fn permute(&self, i: u64) -> Result<u64> {
        self.check(i)?;
        Ok(self.permute_unchecked(i))
    }

    pub fn inverse_permute(&self, y: u64) -> Result<u64> {
        self.check(y)?;
        Ok(self.inverse_permute_unchecked(y))
    }

    pub fn is_active(&self, i: u64) -> Result<bool> {
        self.check(i)?;
        Ok(self.permute_unchecked(i) < self.n - u64::from(self.r))
    }

    /// Pair id `⌊π(i)/2⌋` of an active index.
    pub fn pair(&self, i: u64) -> Result<u64> {
        let slot = self.active_slot(i)?;
        Ok(slot / 2)
    }

    fn active_slot(&self, i: u64) -> Result<u64> {
        self.check(i)?;
        let slot = self.permute_unchecked(i);
        if slot >= self.n - u64::from(self.r) {
            return Err(Error::InactiveIndex { index: i });
        }
        Ok(slot)
    }

    /// The index matched with `i`: `π⁻¹(π(i) xor 1)`.
    pub fn partner(&self, i: u64) -> Result<u64> {
        let slot = self.active_slot(i)?;
        Ok(self.inverse_permute_unchecked(slot ^ 1))
    }

    /// Base bit of a pair: `((a·u + b) mod p) mod 2`.
    #[inline(always)]
    fn pair_bit(&self, pair: u64) -> u64 {
        let v = (u128::from(self.a) * u128::from(pair) + u128::from(self.b)) % u128::from(self.p);
        (v & 1) as u64
    }

    #[inline]
    pub(crate) fn entry_unchecked(&self, i: u64) -> i8 {
        let slot = self.permute_unchecked(i);
        if slot >= self.n - u64::from(self.r) {
            return 0;
        }
        if (self.pair_bit(slot >> 1) + (slot & 1)) & 1 == 0 {
            1
        } else {
            -1
        }
    }

    pub fn entry(&self, i: u64) -> Result<i8> {
        self.check(i)?;
        Ok(self.entry_unchecked(i))
    }

    /// Expands the whole sign vector. Test and debugging aid only.
    pub fn materialize(&self) -> Result<Vec<i8>> {
        if self.n > MATERIALIZE_CAP {
            return Err(Error::InvalidParameter(format!(
                "refusing to materialize a probe of dimension {} (cap {MATERIALIZE_CAP})",
                self.n
            )));
        }
        Ok((0..self.n).map(|i| self.entry_unchecked(i)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn odd_dimension_has_one_zero() {
        let pk = derive_probe(7, 0, 5).unwrap();
        assert_eq!(pk.r, 1);
        let z = pk.materialize().unwrap();
        assert_eq!(z.iter().filter(|&&x| x == 0).count(), 1);
    }

    #[test]
    fn even_parity_coin_is_fair() {
        let fam = ProbeFamily::new(7, 6).unwrap();
        let zeros = (0..10_000).filter(|&k| fam.key(k).r == 0).count();
        assert!((zeros as f64 / 10_000.0 - 0.5).abs() < 0.02);
        assert!((0..100).all(|k| matches!(fam.key(k).r, 0 | 2)));
    }

    #[test]
    fn derivation_is_deterministic() {
        assert_eq!(derive_probe(7, 3, 100).unwrap(), derive_probe(7, 3, 100).unwrap());
        assert_ne!(derive_probe(7, 3, 100).unwrap(), derive_probe(7, 4, 100).unwrap());
        assert_ne!(derive_probe(7, 3, 100).unwrap(), derive_probe(8, 3, 100).unwrap());
    }

    #[test]
    fn tiny_dimensions_are_rejected() {
        assert!(derive_probe(1, 0, 1).is_err());
        assert!(derive_probe(1, 0, 0).is_err());
    }

    #[test]
    fn primes() {
        assert_eq!(next_prime_above(0), 2);
        assert_eq!(next_prime_above(1), 2);
        assert_eq!(next_prime_above(2), 3);
        assert_eq!(next_prime_above(3), 5);
        assert_eq!(next_prime_above(50), 53);
        assert_eq!(next_prime_above(1_000_000), 1_000_003);
        for n in [2u64, 3, 7, 100, 4039, 1 << 33] {
            let fam = ProbeFamily::new(0, n).unwrap();
            assert!(fam.prime() > n / 2);
            assert!(primal_check::miller_rabin(fam.prime()));
        }
    }

    #[test]
    fn permutation_of_eight_is_a_bijection() {
        for k in 0..50 {
            let pk = derive_probe(11, k, 8).unwrap();
            let mut image: Vec<u64> = (0..8).map(|i| pk.permute(i).unwrap()).collect();
            image.sort_unstable();
            assert_eq!(image, (0..8).collect::<Vec<_>>());
        }
    }

    #[test]
    fn inverse_round_trip_on_thousand() {
        let pk = derive_probe(5, 9, 1000).unwrap();
        for i in 0..1000 {
            assert_eq!(pk.inverse_permute(pk.permute(i).unwrap()).unwrap(), i);
        }
    }

    #[test]
    fn wide_domain_round_trip() {
        let fam = ProbeFamily::new(5, 3_000_017).unwrap();
        let pk = fam.key(2);
        assert_eq!(pk.rounds, LARGE_DOMAIN_ROUNDS);
        for i in (0..3_000_017).step_by(9973) {
            assert_eq!(pk.inverse_permute_unchecked(pk.permute_unchecked(i)), i);
        }
    }

    #[test]
    fn out_of_range_errors() {
        let pk = derive_probe(5, 9, 10).unwrap();
        assert!(pk.permute(10).is_err());
        assert!(pk.inverse_permute(11).is_err());
        assert!(pk.entry(10).is_err());
    }

    #[test]
    fn two_node_pairing() {
        let fam = ProbeFamily::new(3, 2).unwrap();
        let mut saw = [false; 2];
        for k in 0..64 {
            let pk = fam.key(k);
            let z = pk.materialize().unwrap();
            if pk.r == 0 {
                assert_eq!(pk.partner(0).unwrap(), 1);
                assert_eq!(pk.partner(1).unwrap(), 0);
                assert!(z == vec![1, -1] || z == vec![-1, 1]);
                saw[0] = true;
            } else {
                assert_eq!(z, vec![0, 0]);
                assert!(matches!(pk.partner(0), Err(Error::InactiveIndex { .. })));
                saw[1] = true;
            }
        }
        assert!(saw[0] && saw[1]);
    }

    #[test]
    fn seven_nodes_form_three_pairs() {
        for k in 0..200 {
            let pk = derive_probe(21, k, 7).unwrap();
            let active: Vec<u64> = (0..7).filter(|&i| pk.is_active(i).unwrap()).collect();
            assert_eq!(active.len(), 6);
            let mut covered = [false; 7];
            let mut pairs = 0;
            for &i in &active {
                let j = pk.partner(i).unwrap();
                assert_ne!(i, j);
                assert_eq!(pk.partner(j).unwrap(), i);
                if i < j {
                    assert!(!covered[i as usize] && !covered[j as usize]);
                    covered[i as usize] = true;
                    covered[j as usize] = true;
                    pairs += 1;
                }
            }
            assert_eq!(pairs, 3);
        }
    }

    #[test]
    fn four_nodes_never_have_odd_zero_count() {
        for k in 0..500 {
            let z = derive_probe(2, k, 4).unwrap().materialize().unwrap();
            let zeros = z.iter().filter(|&&x| x == 0).count();
            assert!(zeros == 0 || zeros == 2);
        }
    }

    #[test]
    fn materialize_cap() {
        let pk = derive_probe(0, 0, MATERIALIZE_CAP + 1).unwrap();
        assert!(pk.materialize().is_err());
        assert!(pk.entry(MATERIALIZE_CAP).is_ok());
    }

    #[test]
    fn prf_below_is_in_range() {
        let mut prf = PrfStream::new(1, 2, 3);
        for range in [1u64, 2, 3, 1000, u64::MAX] {
            for _ in 0..100 {
                assert!(prf.below(range) < range);
            }
        }
    }

    proptest! {
        #[test]
        fn probe_structure(seed in any::<u64>(), k in any::<u64>(), n in 2u64..300) {
            let pk = derive_probe(seed, k, n).unwrap();
            prop_assert_eq!(pk.r == 1, n % 2 == 1);
            prop_assert!(pk.p > n / 2);
            prop_assert!(pk.a >= 1 && pk.a < pk.p && pk.b < pk.p);
            let z = pk.materialize().unwrap();
            prop_assert_eq!(z.iter().filter(|&&x| x == 0).count(), pk.r as usize);
            prop_assert_eq!(z.iter().map(|&x| i64::from(x)).sum::<i64>(), 0);
            for i in 0..n {
                prop_assert_eq!(pk.inverse_permute(pk.permute(i)?)?, i);
                let zero = pk.permute(i)? >= n - u64::from(pk.r);
                prop_assert_eq!(z[i as usize] == 0, zero);
                if !zero {
                    let j = pk.partner(i)?;
                    prop_assert_ne!(i, j);
                    prop_assert_eq!(pk.partner(j)?, i);
                    prop_assert_eq!(pk.pair(i)?, pk.pair(j)?);
                    prop_assert_eq!(z[i as usize], -z[j as usize]);
                }
            }
        }
    }
}
