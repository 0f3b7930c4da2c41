//! Keyed and unkeyed hash roles: a PRF into the scalar field, index
//! derivation into `[0, t)^k`, and the signature challenge.
//!
//! All three are built on SHA-512 with distinct ASCII domain tags, which are
//! part of the stable format:
//!
//! | role      | tag         | construction                                   |
//! |-----------|-------------|------------------------------------------------|
//! | PRF       | `E2IBS-PRF` | HMAC-SHA512(key, tag ‖ kind ‖ label), wide-reduced |
//! | indices   | `E2IBS-H1`  | SHA-512, read as `k` big-endian `log2 t`-bit chunks |
//! | challenge | `E2IBS-H2`  | SHA-512, wide-reduced                          |
//!
//! Index vectors are multisets: repeated indices are kept.

use hmac::{Hmac, Mac};
use sha2::{Digest, Sha512};

use crate::error::{Error, Result};
use crate::group::Group;

pub const PRF_TAG: &[u8] = b"E2IBS-PRF";
pub const H1_TAG: &[u8] = b"E2IBS-H1";
pub const H2_TAG: &[u8] = b"E2IBS-H2";

/// Bits available to [`h1_indices`] from one SHA-512 digest.
pub const H1_DIGEST_BITS: u32 = 512;

const PRF_KIND_INDEX: u8 = 0x00;
const PRF_KIND_IDENTITY: u8 = 0x01;

type HmacSha512 = Hmac<Sha512>;

/// `k` indices into the master public key, each below `t`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IndexVector {
    indices: Vec<u32>,
}

impl IndexVector {
    /// Checks every entry against `t`.
    pub fn new(indices: Vec<u32>, t: u32) -> Result<Self> {
        if let Some(bad) = indices.iter().find(|&&j| j >= t) {
            return Err(Error::Domain(format!("index {bad} outside [0, {t})")));
        }
        Ok(Self { indices })
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

/// `log2 t`, or a configuration error when `t` is not a power of two.
pub fn index_bits(t: u32) -> Result<u32> {
    if t == 0 || !t.is_power_of_two() {
        return Err(Error::Config(format!("t = {t} is not a power of two")));
    }
    Ok(t.trailing_zeros())
}

/// PRF keyed by a secret scalar, with output in `Z_p`.
pub fn prf<G: Group>(group: &G, key: &G::Scalar, label: &[u8]) -> Result<G::Scalar> {
    if label.is_empty() {
        return Err(Error::MalformedInput("PRF label must be non-empty".into()));
    }
    Ok(prf_raw(group, key, PRF_KIND_IDENTITY, label))
}

/// PRF evaluated at master-key index `i`, encoded as 8 bytes big-endian.
pub fn prf_index<G: Group>(group: &G, key: &G::Scalar, i: u64) -> G::Scalar {
    prf_raw(group, key, PRF_KIND_INDEX, &i.to_be_bytes())
}

fn prf_raw<G: Group>(group: &G, key: &G::Scalar, kind: u8, label: &[u8]) -> G::Scalar {
    let mut mac =
        HmacSha512::new_from_slice(&group.encode_scalar(key)).expect("HMAC accepts any key length");
    mac.update(PRF_TAG);
    mac.update(&[kind]);
    mac.update(label);
    let out = mac.finalize().into_bytes();
    group
        .scalar_from_wide_bytes(&out)
        .expect("SHA-512 output is 64 bytes")
}

/// Derives `k` indices in `[0, t)` from an identity, its commitment and an
/// optional sequence number.
pub fn h1_indices<G: Group>(
    group: &G,
    identity: &[u8],
    commitment: &G::Element,
    seq: Option<u64>,
    t: u32,
    k: u32,
) -> Result<IndexVector> {
    let bits = index_bits(t)?;
    if k == 0 {
        return Err(Error::Config("k must be at least 1".into()));
    }
    if u64::from(k) * u64::from(bits) > u64::from(H1_DIGEST_BITS) {
        return Err(Error::Config(format!(
            "k * log2(t) = {} exceeds the {H1_DIGEST_BITS}-bit digest",
            k * bits
        )));
    }

    let mut h = Sha512::new();
    h.update(H1_TAG);
    h.update((identity.len() as u64).to_be_bytes());
    h.update(identity);
    match seq {
        None => h.update([0u8]),
        Some(n) => {
            h.update([1u8]);
            h.update(n.to_be_bytes());
        }
    }
    h.update(group.encode_element(commitment));
    let digest = h.finalize();

    let indices = (0..k)
        .map(|i| read_bits_be(&digest, (i * bits) as usize, bits as usize))
        .collect();
    IndexVector::new(indices, t)
}

/// Reads `width <= 32` bits starting at bit `offset`, most significant bit
/// first.
fn read_bits_be(bytes: &[u8], offset: usize, width: usize) -> u32 {
    (offset..offset + width).fold(0u32, |acc, pos| {
        let bit = (bytes[pos / 8] >> (7 - pos % 8)) & 1;
        (acc << 1) | u32::from(bit)
    })
}

/// Signature challenge over a message and a commitment point.
pub fn h2_challenge<G: Group>(group: &G, message: &[u8], r: &G::Element) -> G::Scalar {
    let mut h = Sha512::new();
    h.update(H2_TAG);
    h.update((message.len() as u64).to_be_bytes());
    h.update(message);
    h.update(group.encode_element(r));
    group
        .scalar_from_wide_bytes(&h.finalize())
        .expect("SHA-512 output is 64 bytes")
}

/// The hash roles the scheme consumes. [`Sha512Suite`] is the only
/// production implementation; tests substitute fixed tables to reproduce
/// hand-computed examples on the toy group.
pub trait HashSuite<G: Group> {
    fn prf_index(&self, group: &G, msk: &G::Scalar, i: u64) -> G::Scalar;
    fn prf_identity(&self, group: &G, msk: &G::Scalar, identity: &[u8]) -> Result<G::Scalar>;
    fn indices(
        &self,
        group: &G,
        identity: &[u8],
        commitment: &G::Element,
        seq: Option<u64>,
        t: u32,
        k: u32,
    ) -> Result<IndexVector>;
    fn challenge(&self, group: &G, message: &[u8], r: &G::Element) -> G::Scalar;
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Sha512Suite;

impl<G: Group> HashSuite<G> for Sha512Suite {
    fn prf_index(&self, group: &G, msk: &G::Scalar, i: u64) -> G::Scalar {
        prf_index(group, msk, i)
    }

    fn prf_identity(&self, group: &G, msk: &G::Scalar, identity: &[u8]) -> Result<G::Scalar> {
        prf(group, msk, identity)
    }

    fn indices(
        &self,
        group: &G,
        identity: &[u8],
        commitment: &G::Element,
        seq: Option<u64>,
        t: u32,
        k: u32,
    ) -> Result<IndexVector> {
        h1_indices(group, identity, commitment, seq, t, k)
    }

    fn challenge(&self, group: &G, message: &[u8], r: &G::Element) -> G::Scalar {
        h2_challenge(group, message, r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::Ristretto;
    use rand_chacha::ChaCha20Rng;
    use rand_core::{RngCore, SeedableRng};
    use std::collections::HashSet;

    fn rng() -> ChaCha20Rng {
        ChaCha20Rng::seed_from_u64(0xE2)
    }

    #[test]
    fn prf_is_deterministic_and_rejects_empty_labels() {
        let g = Ristretto;
        let k = g.random_scalar(&mut rng());
        assert_eq!(prf(&g, &k, b"idx:1").unwrap(), prf(&g, &k, b"idx:1").unwrap());
        assert!(matches!(prf(&g, &k, b""), Err(Error::MalformedInput(_))));
    }

    #[test]
    fn prf_label_and_key_separation() {
        let g = Ristretto;
        let mut rng = rng();
        for _ in 0..1000 {
            let k1 = g.random_scalar(&mut rng);
            let k2 = g.random_scalar(&mut rng);
            assert_ne!(prf(&g, &k1, b"idx:1").unwrap(), prf(&g, &k1, b"idx:2").unwrap());
            assert_ne!(prf(&g, &k1, b"L").unwrap(), prf(&g, &k2, b"L").unwrap());
        }
    }

    #[test]
    fn index_and_identity_labels_never_collide() {
        let g = Ristretto;
        let k = g.random_scalar(&mut rng());
        for i in 0..64u64 {
            assert_ne!(prf_index(&g, &k, i), prf(&g, &k, &i.to_be_bytes()).unwrap());
        }
    }

    #[test]
    fn h1_paper_parameters() {
        let g = Ristretto;
        let c = g.mul_base(&g.random_scalar(&mut rng()));
        let v = h1_indices(&g, b"cell-0001", &c, None, 1024, 18).unwrap();
        assert_eq!(v.len(), 18);
        assert!(v.as_slice().iter().all(|&j| j < 1024));
        assert_eq!(v, h1_indices(&g, b"cell-0001", &c, None, 1024, 18).unwrap());
    }

    #[test]
    fn h1_chunks_are_big_endian_digest_bits() {
        // Recompute the digest independently and check the first chunks by
        // integer arithmetic rather than bit walking.
        let g = Ristretto;
        let c = g.generator();
        let v = h1_indices(&g, b"U", &c, Some(3), 1024, 18).unwrap();
        let mut h = Sha512::new();
        h.update(b"E2IBS-H1");
        h.update(1u64.to_be_bytes());
        h.update(b"U");
        h.update([1u8]);
        h.update(3u64.to_be_bytes());
        h.update(g.encode_element(&c));
        let d = h.finalize();
        let head = u64::from_be_bytes(d[..8].try_into().unwrap());
        assert_eq!(v.as_slice()[0] as u64, head >> 54);
        assert_eq!(v.as_slice()[1] as u64, (head >> 44) & 0x3FF);
        assert_eq!(v.as_slice()[5] as u64, (head >> 4) & 0x3FF);
    }

    #[test]
    fn h1_rejects_bad_configuration() {
        let g = Ristretto;
        let c = g.generator();
        assert!(matches!(h1_indices(&g, b"U", &c, None, 1000, 18), Err(Error::Config(_))));
        assert!(matches!(h1_indices(&g, b"U", &c, None, 1024, 0), Err(Error::Config(_))));
        // 52 * 10 = 520 bits > 512
        assert!(matches!(h1_indices(&g, b"U", &c, None, 1024, 52), Err(Error::Config(_))));
        assert!(h1_indices(&g, b"U", &c, None, 1024, 51).is_ok());
    }

    #[test]
    fn h1_sequence_number_separates_domains() {
        let g = Ristretto;
        let mut rng = rng();
        for _ in 0..100 {
            let mut id = [0u8; 9];
            rng.fill_bytes(&mut id);
            let c = g.mul_base(&g.random_scalar(&mut rng));
            let a = h1_indices(&g, &id, &c, Some(0), 1024, 18).unwrap();
            let b = h1_indices(&g, &id, &c, Some(1), 1024, 18).unwrap();
            let none = h1_indices(&g, &id, &c, None, 1024, 18).unwrap();
            assert_ne!(a, b);
            assert_ne!(a, none);
        }
    }

    #[test]
    fn h1_depends_on_whole_commitment() {
        let g = Ristretto;
        let mut rng = rng();
        let mut seen = HashSet::new();
        for _ in 0..200 {
            let c = g.mul_base(&g.random_scalar(&mut rng));
            seen.insert(h1_indices(&g, b"same", &c, None, 1024, 18).unwrap());
        }
        assert_eq!(seen.len(), 200);
    }

    #[test]
    fn h2_avalanche() {
        let g = Ristretto;
        let mut rng = rng();
        for _ in 0..1000 {
            let mut m = vec![0u8; 48];
            rng.fill_bytes(&mut m);
            let r = g.mul_base(&g.random_scalar(&mut rng));
            let r2 = g.mul_base(&g.random_scalar(&mut rng));
            let base = h2_challenge(&g, &m, &r);
            assert_eq!(base, h2_challenge(&g, &m, &r));
            let bit = (rng.next_u32() as usize) % (m.len() * 8);
            let mut flipped = m.clone();
            flipped[bit / 8] ^= 1 << (bit % 8);
            assert_ne!(base, h2_challenge(&g, &flipped, &r));
            assert_ne!(base, h2_challenge(&g, &m, &r2));
        }
    }
}
