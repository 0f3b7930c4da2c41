//! Prime-order group abstraction.
//!
//! Everything above this module is written against [`Group`], so the scheme
//! can run over the production curve ([`Ristretto`]), a small additive group
//! whose discrete logs are brute-forceable ([`ToyGroup`]), or either of those
//! wrapped in an operation counter ([`Counting`]).
//!
//! Scalars are integers modulo the group order `p`. Scalar and element
//! encodings are 32 bytes; scalars are little-endian.

mod counting;
mod ristretto;
mod toy;

use std::fmt::Debug;

use rand_core::{CryptoRng, RngCore};

use crate::error::{Error, Result};

pub use counting::{Counting, OpCounter};
pub use ristretto::Ristretto;
pub use toy::{ToyElement, ToyGroup, ToyScalar};

/// Length of a canonical scalar or element encoding.
pub const ENCODED_LEN: usize = 32;

/// Input length accepted by [`Group::scalar_from_wide_bytes`].
pub const WIDE_LEN: usize = 64;

/// A cyclic group of prime order `p` with a fixed generator `P`, written
/// additively, together with its scalar field `Z_p`.
pub trait Group {
    type Scalar: Copy + Eq + Debug + Send + Sync;
    type Element: Copy + Eq + Debug + Send + Sync;

    fn name(&self) -> &'static str;

    fn generator(&self) -> Self::Element;
    fn identity(&self) -> Self::Element;

    /// `k * x`.
    fn mul(&self, k: &Self::Scalar, x: &Self::Element) -> Self::Element;

    /// `k * P`. Backends may use a precomputed table.
    fn mul_base(&self, k: &Self::Scalar) -> Self::Element {
        self.mul(k, &self.generator())
    }

    /// `a * x + b * P`. Counted as two scalar multiplications and one
    /// addition regardless of how the backend evaluates it.
    fn double_mul_base(
        &self,
        a: &Self::Scalar,
        x: &Self::Element,
        b: &Self::Scalar,
    ) -> Self::Element {
        self.add(&self.mul(a, x), &self.mul_base(b))
    }

    fn add(&self, x: &Self::Element, y: &Self::Element) -> Self::Element;

    /// Left fold of [`Group::add`]; `n` elements cost `n - 1` additions and
    /// the empty sum is the identity.
    fn sum(&self, elements: &[Self::Element]) -> Self::Element {
        match elements.split_first() {
            None => self.identity(),
            Some((first, rest)) => rest.iter().fold(*first, |acc, e| self.add(&acc, e)),
        }
    }

    fn scalar_zero(&self) -> Self::Scalar;
    fn scalar_from_u64(&self, v: u64) -> Self::Scalar;
    fn scalar_add(&self, a: &Self::Scalar, b: &Self::Scalar) -> Self::Scalar;
    fn scalar_sub(&self, a: &Self::Scalar, b: &Self::Scalar) -> Self::Scalar;
    fn scalar_mul(&self, a: &Self::Scalar, b: &Self::Scalar) -> Self::Scalar;

    /// Reduces a 64-byte little-endian integer modulo `p`.
    fn scalar_from_wide_bytes(&self, bytes: &[u8]) -> Result<Self::Scalar>;

    fn encode_scalar(&self, s: &Self::Scalar) -> [u8; ENCODED_LEN];
    /// Rejects encodings of integers `>= p`.
    fn decode_scalar(&self, bytes: &[u8]) -> Result<Self::Scalar>;

    fn encode_element(&self, x: &Self::Element) -> [u8; ENCODED_LEN];
    /// Rejects non-canonical and off-group encodings.
    fn decode_element(&self, bytes: &[u8]) -> Result<Self::Element>;

    /// Uniform scalar by wide reduction of 64 random bytes.
    fn random_scalar<R: RngCore + CryptoRng>(&self, rng: &mut R) -> Self::Scalar {
        let mut wide = [0u8; WIDE_LEN];
        rng.fill_bytes(&mut wide);
        self.scalar_from_wide_bytes(&wide)
            .expect("wide buffer has the right length")
    }
}

pub(crate) fn check_wide_len(bytes: &[u8]) -> Result<&[u8; WIDE_LEN]> {
    bytes.try_into().map_err(|_| {
        Error::MalformedInput(format!(
            "wide scalar input must be {WIDE_LEN} bytes, got {}",
            bytes.len()
        ))
    })
}

pub(crate) fn check_encoded_len(bytes: &[u8], what: &str) -> Result<[u8; ENCODED_LEN]> {
    bytes.try_into().map_err(|_| {
        Error::Decode(format!(
            "{what} encoding must be {ENCODED_LEN} bytes, got {}",
            bytes.len()
        ))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand_chacha::ChaCha20Rng;
    use rand_core::SeedableRng;

    fn homomorphism<G: Group>(g: &G, rng: &mut ChaCha20Rng) {
        let a = g.random_scalar(rng);
        let b = g.random_scalar(rng);
        let x = g.mul_base(&g.random_scalar(rng));
        let lhs = g.mul(&g.scalar_add(&a, &b), &x);
        let rhs = g.add(&g.mul(&a, &x), &g.mul(&b, &x));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn homomorphism_holds_on_every_backend() {
        let mut rng = ChaCha20Rng::seed_from_u64(7);
        for _ in 0..64 {
            homomorphism(&Ristretto, &mut rng);
            homomorphism(&ToyGroup::new(23).unwrap(), &mut rng);
            homomorphism(&ToyGroup::new(7919).unwrap(), &mut rng);
            homomorphism(&Counting::new(Ristretto), &mut rng);
        }
    }

    #[test]
    fn sum_edge_cases() {
        let g = Ristretto;
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let x = g.mul_base(&g.random_scalar(&mut rng));
        assert_eq!(g.sum(&[]), g.identity());
        assert_eq!(g.sum(&[x]), x);
    }

    #[test]
    fn double_mul_base_matches_separate_ops() {
        let g = Ristretto;
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        for _ in 0..32 {
            let a = g.random_scalar(&mut rng);
            let b = g.random_scalar(&mut rng);
            let x = g.mul_base(&g.random_scalar(&mut rng));
            let expect = g.add(&g.mul(&a, &x), &g.mul_base(&b));
            assert_eq!(g.double_mul_base(&a, &x, &b), expect);
        }
    }

    proptest! {
        #[test]
        fn ristretto_add_commutes(a in any::<[u8; 32]>(), b in any::<[u8; 32]>()) {
            let g = Ristretto;
            let mut wa = [0u8; 64];
            wa[..32].copy_from_slice(&a);
            let mut wb = [0u8; 64];
            wb[..32].copy_from_slice(&b);
            let x = g.mul_base(&g.scalar_from_wide_bytes(&wa).unwrap());
            let y = g.mul_base(&g.scalar_from_wide_bytes(&wb).unwrap());
            prop_assert_eq!(g.add(&x, &y), g.add(&y, &x));
            prop_assert_eq!(g.add(&x, &g.identity()), x);
        }

        #[test]
        fn ristretto_element_round_trips(seed in any::<u64>()) {
            let g = Ristretto;
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            let x = g.mul_base(&g.random_scalar(&mut rng));
            let enc = g.encode_element(&x);
            prop_assert_eq!(g.decode_element(&enc).unwrap(), x);
            prop_assert_eq!(g.encode_element(&g.decode_element(&enc).unwrap()), enc);
        }

        #[test]
        fn decode_never_panics(bytes in proptest::collection::vec(any::<u8>(), 0..40)) {
            let g = Ristretto;
            if let Ok(x) = g.decode_element(&bytes) {
                prop_assert_eq!(&g.encode_element(&x)[..], &bytes[..]);
            }
            let _ = g.decode_scalar(&bytes);
        }
    }
}
