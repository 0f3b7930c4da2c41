use super::{check_encoded_len, check_wide_len, Group, ENCODED_LEN};
use crate::error::{Error, Result};

/// The additive group `Z_p` with generator `1`.
///
/// Discrete logs are trivial here (an element *is* its own discrete log),
/// which is what makes it useful: every identity the scheme relies on can be
/// checked by hand or by exhaustive search. Elements and scalars share the
/// representation but are kept as distinct types so the two roles cannot be
/// mixed up by accident.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ToyGroup {
    p: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ToyScalar(pub u64);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ToyElement(pub u64);

/// Largest accepted modulus; keeps every product inside `u128`.
pub const TOY_MAX_MODULUS: u64 = 1 << 62;

impl ToyGroup {
    /// `p` must be prime and at most [`TOY_MAX_MODULUS`].
    pub fn new(p: u64) -> Result<Self> {
        if !(2..=TOY_MAX_MODULUS).contains(&p) || !is_prime(p) {
            return Err(Error::Config(format!("toy modulus {p} is not a supported prime")));
        }
        Ok(Self { p })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn scalar(&self, v: u64) -> ToyScalar {
        ToyScalar(v % self.p)
    }

    pub fn element(&self, v: u64) -> ToyElement {
        ToyElement(v % self.p)
    }

    /// Exhaustive discrete log with respect to the generator.
    pub fn brute_force_dlog(&self, x: &ToyElement) -> Option<ToyScalar> {
        let mut acc = self.identity();
        for k in 0..self.p {
            if acc == *x {
                return Some(ToyScalar(k));
            }
            acc = self.add(&acc, &self.generator());
        }
        None
    }

    fn reduce_le(&self, bytes: &[u8]) -> u64 {
        let p = self.p as u128;
        bytes
            .iter()
            .rev()
            .fold(0u128, |acc, &b| ((acc << 8) | b as u128) % p) as u64
    }

    fn encode(v: u64) -> [u8; ENCODED_LEN] {
        let mut out = [0u8; ENCODED_LEN];
        out[..8].copy_from_slice(&v.to_le_bytes());
        out
    }

    fn decode(&self, bytes: &[u8], what: &str) -> Result<u64> {
        let arr = check_encoded_len(bytes, what)?;
        if arr[8..].iter().any(|&b| b != 0) {
            return Err(Error::Decode(format!("{what} out of range")));
        }
        let v = u64::from_le_bytes(arr[..8].try_into().unwrap());
        if v >= self.p {
            return Err(Error::Decode(format!("{what} {v} not below modulus {}", self.p)));
        }
        Ok(v)
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl Group for ToyGroup {
    type Scalar = ToyScalar;
    type Element = ToyElement;

    fn name(&self) -> &'static str {
        "toy"
    }

    fn generator(&self) -> ToyElement {
        ToyElement(1)
    }

    fn identity(&self) -> ToyElement {
        ToyElement(0)
    }

    fn mul(&self, k: &ToyScalar, x: &ToyElement) -> ToyElement {
        ToyElement(((k.0 as u128 * x.0 as u128) % self.p as u128) as u64)
    }

    fn add(&self, x: &ToyElement, y: &ToyElement) -> ToyElement {
        ToyElement(((x.0 as u128 + y.0 as u128) % self.p as u128) as u64)
    }

    fn scalar_zero(&self) -> ToyScalar {
        ToyScalar(0)
    }

    fn scalar_from_u64(&self, v: u64) -> ToyScalar {
        self.scalar(v)
    }

    fn scalar_add(&self, a: &ToyScalar, b: &ToyScalar) -> ToyScalar {
        ToyScalar(((a.0 as u128 + b.0 as u128) % self.p as u128) as u64)
    }

    fn scalar_sub(&self, a: &ToyScalar, b: &ToyScalar) -> ToyScalar {
        ToyScalar(((a.0 as u128 + self.p as u128 - b.0 as u128) % self.p as u128) as u64)
    }

    fn scalar_mul(&self, a: &ToyScalar, b: &ToyScalar) -> ToyScalar {
        ToyScalar(((a.0 as u128 * b.0 as u128) % self.p as u128) as u64)
    }

    fn scalar_from_wide_bytes(&self, bytes: &[u8]) -> Result<ToyScalar> {
        Ok(ToyScalar(self.reduce_le(check_wide_len(bytes)?)))
    }

    fn encode_scalar(&self, s: &ToyScalar) -> [u8; ENCODED_LEN] {
        Self::encode(s.0)
    }

    fn decode_scalar(&self, bytes: &[u8]) -> Result<ToyScalar> {
        self.decode(bytes, "scalar").map(ToyScalar)
    }

    fn encode_element(&self, x: &ToyElement) -> [u8; ENCODED_LEN] {
        Self::encode(x.0)
    }

    fn decode_element(&self, bytes: &[u8]) -> Result<ToyElement> {
        self.decode(bytes, "element").map(ToyElement)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::ChaCha20Rng;
    use rand_core::{RngCore, SeedableRng};

    fn wide(v: u64) -> [u8; 64] {
        let mut w = [0u8; 64];
        w[..8].copy_from_slice(&v.to_le_bytes());
        w
    }

    #[test]
    fn worked_values_p23() {
        let g = ToyGroup::new(23).unwrap();
        assert_eq!(g.scalar_from_wide_bytes(&[0u8; 64]).unwrap(), ToyScalar(0));
        assert_eq!(g.scalar_from_wide_bytes(&wide(23)).unwrap(), ToyScalar(0));
        assert_eq!(g.scalar_from_wide_bytes(&wide(50)).unwrap(), ToyScalar(4));
        assert_eq!(g.mul(&ToyScalar(5), &g.generator()), ToyElement(5));
        assert_eq!(g.mul_base(&ToyScalar(0)), g.identity());
        assert_eq!(g.add(&ToyElement(8), &ToyElement(7)), ToyElement(15));
        assert_eq!(g.sum(&[ToyElement(3), ToyElement(5)]), ToyElement(8));
        assert_eq!(g.sum(&[]), ToyElement(0));
    }

    #[test]
    fn wide_reduction_uses_all_64_bytes() {
        let g = ToyGroup::new(23).unwrap();
        // 2^504 mod 23: 2^11 = 2048 = 89*23 + 1, so 2^504 = 2^(11*45+9) = 2^9 = 512 = 22*23 + 6.
        let mut w = [0u8; 64];
        w[63] = 1;
        assert_eq!(g.scalar_from_wide_bytes(&w).unwrap(), ToyScalar(6));
    }

    #[test]
    fn rejects_composites_and_out_of_range_encodings() {
        assert!(ToyGroup::new(21).is_err());
        assert!(ToyGroup::new(1).is_err());
        let g = ToyGroup::new(23).unwrap();
        assert!(g.decode_element(&ToyGroup::encode(23)).is_err());
        let mut high = ToyGroup::encode(3);
        high[31] = 1;
        assert!(g.decode_element(&high).is_err());
        assert!(g.decode_element(&[0u8; 31]).is_err());
        assert_eq!(g.decode_element(&ToyGroup::encode(22)).unwrap(), ToyElement(22));
    }

    #[test]
    fn agrees_with_modular_arithmetic_and_dlog_oracle() {
        let p = 9973; // largest prime below 10^4
        let g = ToyGroup::new(p).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(99);
        for _ in 0..1000 {
            let a = rng.next_u64() % p;
            let b = rng.next_u64() % p;
            let x = rng.next_u64() % p;
            assert_eq!(g.mul(&ToyScalar(a), &ToyElement(x)).0, (a * x) % p);
            assert_eq!(g.add(&ToyElement(a), &ToyElement(b)).0, (a + b) % p);
            assert_eq!(g.scalar_sub(&ToyScalar(a), &ToyScalar(b)).0, (a + p - b) % p);
            assert_eq!(g.brute_force_dlog(&g.mul_base(&ToyScalar(a))), Some(ToyScalar(a)));
        }
    }
}
