//! Comparison schemes for benchmarking.
//!
//! `Schnorr` is a textbook key-prefixed Schnorr signature over the same group
//! and hash. `Hier2` chains two of them: an operator root key certifies the
//! base station's key, and the base station signs the message. Verifying a
//! `Hier2` signature checks the certificate and then the message, the cost
//! a one-link certificate chain adds over an implicit-certificate scheme.

use rand_core::{CryptoRng, RngCore};
use sha2::{Digest, Sha512};

use crate::e2ibs::SIGNATURE_LEN;
use crate::group::Group;

const SCHNORR_TAG: &[u8] = b"SCHNORR-H";
const CERT_TAG: &[u8] = b"HIER2-CERT";

#[derive(Clone, Debug)]
pub struct SchnorrKey<G: Group> {
    x: G::Scalar,
    pk: G::Element,
}

impl<G: Group> SchnorrKey<G> {
    pub fn generate<R: RngCore + CryptoRng>(group: &G, rng: &mut R) -> Self {
        let x = group.random_scalar(rng);
        Self { x, pk: group.mul_base(&x) }
    }

    pub fn public(&self) -> &G::Element {
        &self.pk
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SchnorrSig<G: Group> {
    pub s: G::Scalar,
    pub e: G::Scalar,
}

impl<G: Group> SchnorrSig<G> {
    pub fn to_bytes(&self, group: &G) -> [u8; SIGNATURE_LEN] {
        let mut out = [0u8; SIGNATURE_LEN];
        out[..32].copy_from_slice(&group.encode_scalar(&self.s));
        out[32..].copy_from_slice(&group.encode_scalar(&self.e));
        out
    }
}

fn challenge<G: Group>(group: &G, pk: &G::Element, r: &G::Element, m: &[u8]) -> G::Scalar {
    let digest = Sha512::new()
        .chain_update(SCHNORR_TAG)
        .chain_update(group.encode_element(pk))
        .chain_update((m.len() as u64).to_be_bytes())
        .chain_update(m)
        .chain_update(group.encode_element(r))
        .finalize();
    group
        .scalar_from_wide_bytes(&digest)
        .expect("SHA-512 output is 64 bytes")
}

#[derive(Clone, Debug, Default)]
pub struct Schnorr<G> {
    group: G,
}

impl<G: Group> Schnorr<G> {
    pub fn new(group: G) -> Self {
        Self { group }
    }

    pub fn group(&self) -> &G {
        &self.group
    }

    /// Samples the nonce and signs: one scalar multiplication.
    pub fn sign<R: RngCore + CryptoRng>(&self, rng: &mut R, key: &SchnorrKey<G>, m: &[u8]) -> SchnorrSig<G> {
        let g = &self.group;
        let r = g.random_scalar(rng);
        let e = challenge(g, &key.pk, &g.mul_base(&r), m);
        SchnorrSig { s: g.scalar_sub(&r, &g.scalar_mul(&e, &key.x)), e }
    }

    pub fn verify(&self, pk: &G::Element, m: &[u8], sig: &SchnorrSig<G>) -> bool {
        let g = &self.group;
        let r = g.double_mul_base(&sig.e, pk, &sig.s);
        challenge(g, pk, &r, m) == sig.e
    }
}

/// Root signature over a base station's key.
#[derive(Clone, Debug)]
pub struct Certificate<G: Group> {
    pub subject: Vec<u8>,
    pub subject_pk: G::Element,
    pub sig: SchnorrSig<G>,
}

impl<G: Group> Certificate<G> {
    fn body(group: &G, subject: &[u8], pk: &G::Element) -> Vec<u8> {
        let mut body = Vec::with_capacity(CERT_TAG.len() + subject.len() + 40);
        body.extend_from_slice(CERT_TAG);
        body.extend_from_slice(&(subject.len() as u64).to_be_bytes());
        body.extend_from_slice(subject);
        body.extend_from_slice(&group.encode_element(pk));
        body
    }
}

#[derive(Clone, Debug)]
pub struct Hier2<G> {
    inner: Schnorr<G>,
}

impl<G: Group> Hier2<G> {
    pub fn new(group: G) -> Self {
        Self { inner: Schnorr::new(group) }
    }

    pub fn group(&self) -> &G {
        self.inner.group()
    }

    pub fn certify<R: RngCore + CryptoRng>(
        &self,
        rng: &mut R,
        root: &SchnorrKey<G>,
        subject: &[u8],
        subject_pk: &G::Element,
    ) -> Certificate<G> {
        let body = Certificate::body(self.group(), subject, subject_pk);
        Certificate { subject: subject.to_vec(), subject_pk: *subject_pk, sig: self.inner.sign(rng, root, &body) }
    }

    pub fn sign<R: RngCore + CryptoRng>(&self, rng: &mut R, key: &SchnorrKey<G>, m: &[u8]) -> SchnorrSig<G> {
        self.inner.sign(rng, key, m)
    }

    /// Certificate first, then the message signature under the certified key.
    pub fn verify(&self, root_pk: &G::Element, cert: &Certificate<G>, m: &[u8], sig: &SchnorrSig<G>) -> bool {
        let body = Certificate::body(self.group(), &cert.subject, &cert.subject_pk);
        self.inner.verify(root_pk, &body, &cert.sig) && self.inner.verify(&cert.subject_pk, m, sig)
    }
}
