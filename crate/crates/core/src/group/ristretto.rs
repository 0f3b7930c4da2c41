use curve25519_dalek::constants::RISTRETTO_BASEPOINT_POINT;
use curve25519_dalek::ristretto::{CompressedRistretto, RistrettoPoint};
use curve25519_dalek::scalar::Scalar;
use curve25519_dalek::traits::Identity;

use super::{check_encoded_len, check_wide_len, Group, ENCODED_LEN};
use crate::error::{Error, Result};

/// ristretto255: the prime-order quotient of Curve25519, order
/// `2^252 + 27742317777372353535851937790883648493`.
///
/// Point encodings are canonical; decoding rejects any other 32-byte string.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Ristretto;

impl Group for Ristretto {
    type Scalar = Scalar;
    type Element = RistrettoPoint;

    fn name(&self) -> &'static str {
        "ristretto255"
    }

    fn generator(&self) -> RistrettoPoint {
        RISTRETTO_BASEPOINT_POINT
    }

    fn identity(&self) -> RistrettoPoint {
        RistrettoPoint::identity()
    }

    fn mul(&self, k: &Scalar, x: &RistrettoPoint) -> RistrettoPoint {
        x * k
    }

    fn mul_base(&self, k: &Scalar) -> RistrettoPoint {
        RistrettoPoint::mul_base(k)
    }

    fn double_mul_base(&self, a: &Scalar, x: &RistrettoPoint, b: &Scalar) -> RistrettoPoint {
        // Only ever applied to public values (verification).
        RistrettoPoint::vartime_double_scalar_mul_basepoint(a, x, b)
    }

    fn add(&self, x: &RistrettoPoint, y: &RistrettoPoint) -> RistrettoPoint {
        x + y
    }

    fn scalar_zero(&self) -> Scalar {
        Scalar::ZERO
    }

    fn scalar_from_u64(&self, v: u64) -> Scalar {
        Scalar::from(v)
    }

    fn scalar_add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        a + b
    }

    fn scalar_sub(&self, a: &Scalar, b: &Scalar) -> Scalar {
        a - b
    }

    fn scalar_mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        a * b
    }

    fn scalar_from_wide_bytes(&self, bytes: &[u8]) -> Result<Scalar> {
        Ok(Scalar::from_bytes_mod_order_wide(check_wide_len(bytes)?))
    }

    fn encode_scalar(&self, s: &Scalar) -> [u8; ENCODED_LEN] {
        s.to_bytes()
    }

    fn decode_scalar(&self, bytes: &[u8]) -> Result<Scalar> {
        let arr = check_encoded_len(bytes, "scalar")?;
        Option::from(Scalar::from_canonical_bytes(arr))
            .ok_or_else(|| Error::Decode("scalar is not reduced modulo the group order".into()))
    }

    fn encode_element(&self, x: &RistrettoPoint) -> [u8; ENCODED_LEN] {
        x.compress().to_bytes()
    }

    fn decode_element(&self, bytes: &[u8]) -> Result<RistrettoPoint> {
        let arr = check_encoded_len(bytes, "element")?;
        CompressedRistretto(arr)
            .decompress()
            .ok_or_else(|| Error::Decode("not a canonical ristretto255 encoding".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_encodes_as_zeros() {
        let g = Ristretto;
        let enc = g.encode_element(&g.identity());
        assert_eq!(enc, [0u8; 32]);
        assert_eq!(g.decode_element(&enc).unwrap(), g.identity());
        assert_ne!(g.encode_element(&g.generator()), enc);
    }

    #[test]
    fn all_ff_is_rejected_deterministically() {
        let g = Ristretto;
        for _ in 0..3 {
            assert!(matches!(g.decode_element(&[0xFF; 32]), Err(Error::Decode(_))));
        }
    }

    #[test]
    fn wide_reduction() {
        let g = Ristretto;
        assert_eq!(g.scalar_from_wide_bytes(&[0u8; 64]).unwrap(), Scalar::ZERO);
        assert!(matches!(
            g.scalar_from_wide_bytes(&[0u8; 63]),
            Err(Error::MalformedInput(_))
        ));
        // The group order itself reduces to zero.
        const ORDER_LE: [u8; 32] = [
            0xed, 0xd3, 0xf5, 0x5c, 0x1a, 0x63, 0x12, 0x58, 0xd6, 0x9c, 0xf7, 0xa2, 0xde, 0xf9,
            0xde, 0x14, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00,
            0x00, 0x00, 0x00, 0x10,
        ];
        let mut wide = [0u8; 64];
        wide[..32].copy_from_slice(&ORDER_LE);
        assert!(g.decode_scalar(&ORDER_LE).is_err());
        assert_eq!(g.scalar_from_wide_bytes(&wide).unwrap(), Scalar::ZERO);
    }

    #[test]
    fn non_canonical_scalar_rejected() {
        let g = Ristretto;
        assert!(g.decode_scalar(&[0xFF; 32]).is_err());
        let one = g.encode_scalar(&Scalar::ONE);
        assert_eq!(g.decode_scalar(&one).unwrap(), Scalar::ONE);
    }
}
