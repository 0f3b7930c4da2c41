//! Split key generation.
//!
//! The signer contributes a secret `u1` and sends only `Q = u1 * P`. The PKG
//! answers with `z_U = sum of z_j + u2` over indices derived from the joint
//! commitment `C = Q + u2 * P` and a sequence number. The final key is
//! `x = u1 + z_U`, which the PKG never learns. Bumping the sequence number
//! changes the indices, so keys issued under an older number stop verifying
//! once verifiers move on.

use rand_core::{CryptoRng, RngCore};

use crate::e2ibs::{E2ibs, MasterKeyMaterial, MasterPublicKey, UserKey};
use crate::error::{Error, Result};
use crate::group::{Group, ENCODED_LEN};
use crate::hashing::HashSuite;

/// Length of an encoded [`PkgExtraction`]: `z_U ‖ B_U ‖ C_U ‖ seq`.
pub const EXTRACTION_LEN: usize = 3 * ENCODED_LEN + 8;

/// The signer's half of the key.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UserSecretShare<G: Group> {
    u1: G::Scalar,
    q: G::Element,
}

impl<G: Group> UserSecretShare<G> {
    pub fn from_secret(group: &G, u1: G::Scalar) -> Self {
        Self { u1, q: group.mul_base(&u1) }
    }

    pub fn secret(&self) -> &G::Scalar {
        &self.u1
    }

    /// `Q_U`, the value sent to the PKG.
    pub fn public(&self) -> &G::Element {
        &self.q
    }
}

/// The PKG's response to a blinded key request.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PkgExtraction<G: Group> {
    pub z_u: G::Scalar,
    pub b_u: G::Element,
    pub c_u: G::Element,
    pub seq: u64,
}

impl<G: Group> PkgExtraction<G> {
    pub fn to_bytes(&self, group: &G) -> [u8; EXTRACTION_LEN] {
        let mut out = [0u8; EXTRACTION_LEN];
        out[..32].copy_from_slice(&group.encode_scalar(&self.z_u));
        out[32..64].copy_from_slice(&group.encode_element(&self.b_u));
        out[64..96].copy_from_slice(&group.encode_element(&self.c_u));
        out[96..].copy_from_slice(&self.seq.to_be_bytes());
        out
    }

    pub fn from_bytes(group: &G, bytes: &[u8]) -> Result<Self> {
        if bytes.len() != EXTRACTION_LEN {
            return Err(Error::Decode(format!(
                "extraction record must be {EXTRACTION_LEN} bytes, got {}",
                bytes.len()
            )));
        }
        Ok(Self {
            z_u: group.decode_scalar(&bytes[..32])?,
            b_u: group.decode_element(&bytes[32..64])?,
            c_u: group.decode_element(&bytes[64..96])?,
            seq: u64::from_be_bytes(bytes[96..].try_into().unwrap()),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExtractionCheck {
    Accept,
    Reject,
}

impl<G: Group, H: HashSuite<G>> E2ibs<G, H> {
    pub fn user_keygen<R: RngCore + CryptoRng>(&self, rng: &mut R) -> UserSecretShare<G> {
        UserSecretShare::from_secret(self.group(), self.group().random_scalar(rng))
    }

    /// PKG side: answers a request carrying `Q_U` for `identity` under `seq`.
    pub fn extract_blind(
        &self,
        master: &MasterKeyMaterial<G>,
        identity: &[u8],
        q_u: &G::Element,
        seq: u64,
    ) -> Result<PkgExtraction<G>> {
        if identity.is_empty() {
            return Err(Error::MalformedInput("identity must be non-empty".into()));
        }
        let g = self.group();
        let u2 = self.hash().prf_identity(g, master.msk(), identity)?;
        let b_u = g.mul_base(&u2);
        let c_u = g.add(q_u, &b_u);
        let indices = self.indices(master.mpk(), identity, &c_u, Some(seq))?;
        let z_u = g.scalar_add(&self.secret_index_sum(master, &indices), &u2);
        Ok(PkgExtraction { z_u, b_u, c_u, seq })
    }

    /// `z_U` for an already-published commitment: everything the master
    /// secret determines about a split key, and nothing of `u1`.
    pub fn pkg_share(
        &self,
        master: &MasterKeyMaterial<G>,
        identity: &[u8],
        c_u: &G::Element,
        seq: u64,
    ) -> Result<G::Scalar> {
        let g = self.group();
        let u2 = self.hash().prf_identity(g, master.msk(), identity)?;
        let indices = self.indices(master.mpk(), identity, c_u, Some(seq))?;
        Ok(g.scalar_add(&self.secret_index_sum(master, &indices), &u2))
    }

    /// [`E2ibs::extract_blind`] on a wire-encoded `Q_U`.
    pub fn extract_blind_bytes(
        &self,
        master: &MasterKeyMaterial<G>,
        identity: &[u8],
        q_u: &[u8],
        seq: u64,
    ) -> Result<PkgExtraction<G>> {
        let q = self.group().decode_element(q_u)?;
        self.extract_blind(master, identity, &q, seq)
    }

    /// Signer side: checks `z_U * P == sum of Z_j + B_U` and `C_U == Q_U + B_U`.
    pub fn verify_extraction(
        &self,
        ext: &PkgExtraction<G>,
        share: &UserSecretShare<G>,
        identity: &[u8],
        mpk: &MasterPublicKey<G>,
    ) -> ExtractionCheck {
        let g = self.group();
        if g.add(&share.q, &ext.b_u) != ext.c_u {
            return ExtractionCheck::Reject;
        }
        let Ok(indices) = self.indices(mpk, identity, &ext.c_u, Some(ext.seq)) else {
            return ExtractionCheck::Reject;
        };
        let expected = g.add(&self.public_index_sum(mpk, &indices), &ext.b_u);
        if g.mul_base(&ext.z_u) == expected {
            ExtractionCheck::Accept
        } else {
            ExtractionCheck::Reject
        }
    }

    /// `x = u1 + z_U`, refused unless the extraction verifies.
    pub fn complete_key(
        &self,
        share: &UserSecretShare<G>,
        ext: &PkgExtraction<G>,
        identity: &[u8],
        mpk: &MasterPublicKey<G>,
    ) -> Result<UserKey<G>> {
        if self.verify_extraction(ext, share, identity, mpk) == ExtractionCheck::Reject {
            return Err(Error::RejectedExtraction);
        }
        let x = self.group().scalar_add(&share.u1, &ext.z_u);
        Ok(UserKey::from_parts(identity.to_vec(), Some(ext.seq), x, ext.c_u))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::e2ibs::toy_examples::{scheme as toy_scheme, Stub};
    use crate::e2ibs::SetupOptions;
    use crate::group::{Ristretto, ToyElement, ToyScalar};
    use rand_chacha::ChaCha20Rng;
    use rand_core::SeedableRng;

    #[test]
    fn worked_toy_values() {
        let (scheme, master) = toy_scheme(Stub::worked());
        let g = *scheme.group();
        let share = UserSecretShare::from_secret(&g, ToyScalar(6));
        assert_eq!(*share.public(), ToyElement(6));
        let ext = scheme.extract_blind(&master, b"U", share.public(), 0).unwrap();
        assert_eq!(ext.b_u, ToyElement(7));
        assert_eq!(ext.c_u, ToyElement(13));
        assert_eq!(ext.z_u, ToyScalar(15));
        let key = scheme.complete_key(&share, &ext, b"U", master.mpk()).unwrap();
        assert_eq!(*key.secret(), ToyScalar(21));
        assert!(scheme.key_equation_holds(master.mpk(), &key));

        let off_by_one = PkgExtraction { z_u: ToyScalar(16), ..ext };
        assert_eq!(
            scheme.verify_extraction(&off_by_one, &share, b"U", master.mpk()),
            ExtractionCheck::Reject
        );
        assert_eq!(
            scheme.complete_key(&share, &off_by_one, b"U", master.mpk()),
            Err(Error::RejectedExtraction)
        );
    }

    fn production() -> (E2ibs<Ristretto>, MasterKeyMaterial<Ristretto>, ChaCha20Rng) {
        let mut rng = ChaCha20Rng::seed_from_u64(21);
        let scheme = E2ibs::new(Ristretto);
        let master = scheme.setup(&mut rng, 256, 8, SetupOptions::insecure()).unwrap();
        (scheme, master, rng)
    }

    #[test]
    fn completed_keys_sign_like_direct_keys() {
        let (scheme, master, mut rng) = production();
        let share = scheme.user_keygen(&mut rng);
        let ext = scheme.extract_blind(&master, b"gnb", share.public(), 3).unwrap();
        assert_eq!(ext, scheme.extract_blind(&master, b"gnb", share.public(), 3).unwrap());
        assert_eq!(scheme.pkg_share(&master, b"gnb", &ext.c_u, 3).unwrap(), ext.z_u);
        let key = scheme.complete_key(&share, &ext, b"gnb", master.mpk()).unwrap();
        let mut nonce = scheme.precompute_nonce(&mut rng);
        let sig = scheme.sign(b"sib1", &key, &mut nonce).unwrap();
        assert!(scheme.verify(master.mpk(), b"gnb", Some(3), &ext.c_u, b"sib1", &sig).is_valid());

        // Without u1 the PKG's share alone does not verify.
        let pkg_only = UserKey::from_parts(b"gnb".to_vec(), Some(3), ext.z_u, ext.c_u);
        let mut nonce = scheme.precompute_nonce(&mut rng);
        let sig = scheme.sign(b"sib1", &pkg_only, &mut nonce).unwrap();
        assert!(!scheme.verify(master.mpk(), b"gnb", Some(3), &ext.c_u, b"sib1", &sig).is_valid());
    }

    #[test]
    fn seq_bump_changes_share() {
        let (scheme, master, mut rng) = production();
        let share = scheme.user_keygen(&mut rng);
        let a = scheme.extract_blind(&master, b"gnb", share.public(), 0).unwrap();
        let b = scheme.extract_blind(&master, b"gnb", share.public(), 1).unwrap();
        assert_eq!(a.c_u, b.c_u);
        assert_ne!(a.z_u, b.z_u);
    }

    #[test]
    fn substituted_blinding_point_is_rejected() {
        let (scheme, master, mut rng) = production();
        let share = scheme.user_keygen(&mut rng);
        let ext = scheme.extract_blind(&master, b"gnb", share.public(), 0).unwrap();
        for _ in 0..100 {
            let fake = PkgExtraction { b_u: Ristretto.mul_base(&Ristretto.random_scalar(&mut rng)), ..ext };
            assert_eq!(
                scheme.verify_extraction(&fake, &share, b"gnb", master.mpk()),
                ExtractionCheck::Reject
            );
        }
    }

    #[test]
    fn wire_record_round_trips() {
        let (scheme, master, mut rng) = production();
        let share = scheme.user_keygen(&mut rng);
        let ext = scheme.extract_blind(&master, b"gnb", share.public(), u64::MAX).unwrap();
        let bytes = ext.to_bytes(&Ristretto);
        assert_eq!(bytes.len(), 104);
        assert_eq!(&bytes[96..], &[0xFF; 8]);
        assert_eq!(PkgExtraction::from_bytes(&Ristretto, &bytes).unwrap(), ext);
        assert!(PkgExtraction::<Ristretto>::from_bytes(&Ristretto, &bytes[..103]).is_err());
        assert!(matches!(
            scheme.extract_blind_bytes(&master, b"gnb", &[0xFF; 32], 0),
            Err(Error::Decode(_))
        ));
    }
}
