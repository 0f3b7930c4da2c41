//! Two-layer identity-based Schnorr signatures.
//!
//! A private key generator (PKG) holds a master scalar `msk` and publishes
//! `t` group elements `Z_i = z_i * P` with `z_i = PRF_msk(i)`. A user key
//! for identity `U` is the scalar
//!
//! ```text
//! x = z_{j_1} + ... + z_{j_k} + u        u = PRF_msk(U),  C = u * P
//! {j_1..j_k} = H1(U, C)
//! ```
//!
//! so anyone holding the master public key can recompute `x * P` from
//! `(U, C)` with `k` point additions. Signing is plain Schnorr under `x`;
//! the nonce commitment `R = r * P` can be computed ahead of time, leaving
//! only scalar arithmetic on the signing path.

use rand_core::{CryptoRng, RngCore};

use crate::error::{Error, Result};
use crate::group::{Group, ENCODED_LEN};
use crate::hashing::{index_bits, HashSuite, IndexVector, Sha512Suite, H1_DIGEST_BITS};

/// Master key size used by the deployed parameter set.
pub const DEFAULT_T: u32 = 1024;
/// Indices per identity used by the deployed parameter set.
pub const DEFAULT_K: u32 = 18;

/// Minimum `log2 C(t, k)` accepted by [`E2ibs::setup`] unless overridden.
///
/// The deployed `(1024, 18)` parameters give 127.3 bits, not 128, so the
/// default floor is 127 rather than the nominal security level.
pub const DEFAULT_MIN_SECURITY_BITS: f64 = 127.0;

/// Serialized signature length: `s ‖ h`.
pub const SIGNATURE_LEN: usize = 2 * ENCODED_LEN;

/// Magic prefix of an encoded master public key.
pub const MPK_MAGIC: &[u8; 8] = b"E2IBSMPK";

/// `log2 C(t, k)`: the size of the index space an attacker must search.
pub fn security_bits(t: u32, k: u32) -> Result<f64> {
    if k == 0 || k > t {
        return Err(Error::Domain(format!("need 1 <= k <= t, got t = {t}, k = {k}")));
    }
    // log2 C(t, k) = sum over i < k of log2((t - i) / (i + 1)); each term is
    // exact in f64 and k is small.
    let bits = (0..k)
        .map(|i| f64::from(t - i).log2() - f64::from(i + 1).log2())
        .sum();
    Ok(bits)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Params {
    t: u32,
    k: u32,
    security_bits: f64,
}

impl Params {
    pub fn new(t: u32, k: u32) -> Result<Self> {
        let bits = index_bits(t)?;
        let security_bits = security_bits(t, k)?;
        if u64::from(k) * u64::from(bits) > u64::from(H1_DIGEST_BITS) {
            return Err(Error::Config(format!(
                "k * log2(t) = {} exceeds the {H1_DIGEST_BITS}-bit index digest",
                k * bits
            )));
        }
        Ok(Self { t, k, security_bits })
    }

    pub fn t(&self) -> u32 {
        self.t
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn security_bits(&self) -> f64 {
        self.security_bits
    }

    pub fn require(&self, min_bits: f64) -> Result<()> {
        if self.security_bits < min_bits {
            return Err(Error::ParameterRejected {
                bits: self.security_bits,
                required: min_bits,
            });
        }
        Ok(())
    }
}

/// The published vector `Z_0 .. Z_{t-1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MasterPublicKey<G: Group> {
    params_t: u32,
    params_k: u32,
    elements: Vec<G::Element>,
}

impl<G: Group> MasterPublicKey<G> {
    pub fn new(params: &Params, elements: Vec<G::Element>) -> Result<Self> {
        if elements.len() != params.t() as usize {
            return Err(Error::MalformedInput(format!(
                "master public key needs {} elements, got {}",
                params.t(),
                elements.len()
            )));
        }
        Ok(Self { params_t: params.t(), params_k: params.k(), elements })
    }

    pub fn params(&self) -> Params {
        Params::new(self.params_t, self.params_k).expect("validated at construction")
    }

    pub fn t(&self) -> u32 {
        self.params_t
    }

    pub fn k(&self) -> u32 {
        self.params_k
    }

    pub fn elements(&self) -> &[G::Element] {
        &self.elements
    }

    pub fn get(&self, j: u32) -> Option<&G::Element> {
        self.elements.get(j as usize)
    }

    pub fn encoded_len(&self) -> usize {
        MPK_MAGIC.len() + 8 + self.elements.len() * ENCODED_LEN
    }

    /// `"E2IBSMPK" ‖ t (u32 BE) ‖ k (u32 BE) ‖ Z_0 ‖ .. ‖ Z_{t-1}`.
    pub fn to_bytes(&self, group: &G) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.encoded_len());
        out.extend_from_slice(MPK_MAGIC);
        out.extend_from_slice(&self.params_t.to_be_bytes());
        out.extend_from_slice(&self.params_k.to_be_bytes());
        for z in &self.elements {
            out.extend_from_slice(&group.encode_element(z));
        }
        out
    }

    /// Parses an encoding produced by [`MasterPublicKey::to_bytes`],
    /// returning the key and the number of bytes consumed.
    pub fn read_prefix(group: &G, bytes: &[u8]) -> Result<(Self, usize)> {
        let header = MPK_MAGIC.len() + 8;
        if bytes.len() < header || &bytes[..MPK_MAGIC.len()] != MPK_MAGIC {
            return Err(Error::Decode("missing master public key header".into()));
        }
        let t = u32::from_be_bytes(bytes[8..12].try_into().unwrap());
        let k = u32::from_be_bytes(bytes[12..16].try_into().unwrap());
        let params = Params::new(t, k).map_err(|e| Error::Decode(e.to_string()))?;
        let body_len = t as usize * ENCODED_LEN;
        let body = bytes
            .get(header..header + body_len)
            .ok_or_else(|| Error::Decode("truncated master public key".into()))?;
        let elements = body
            .chunks_exact(ENCODED_LEN)
            .map(|c| group.decode_element(c))
            .collect::<Result<Vec<_>>>()?;
        Ok((Self::new(&params, elements)?, header + body_len))
    }

    pub fn from_bytes(group: &G, bytes: &[u8]) -> Result<Self> {
        let (mpk, used) = Self::read_prefix(group, bytes)?;
        if used != bytes.len() {
            return Err(Error::Decode("trailing bytes after master public key".into()));
        }
        Ok(mpk)
    }
}

/// PKG secret state plus the public key derived from it.
#[derive(Clone, Debug)]
pub struct MasterKeyMaterial<G: Group> {
    msk: G::Scalar,
    mpk: MasterPublicKey<G>,
    z_cache: Option<Vec<G::Scalar>>,
}

impl<G: Group> MasterKeyMaterial<G> {
    pub fn msk(&self) -> &G::Scalar {
        &self.msk
    }

    pub fn mpk(&self) -> &MasterPublicKey<G> {
        &self.mpk
    }

    pub fn params(&self) -> Params {
        self.mpk.params()
    }

    pub fn has_cache(&self) -> bool {
        self.z_cache.is_some()
    }

    /// Discards the cached `z_i`; extraction falls back to the PRF.
    pub fn drop_cache(&mut self) {
        self.z_cache = None;
    }
}

/// A signing key bound to an identity (and, for re-issued keys, a sequence
/// number).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UserKey<G: Group> {
    identity: Vec<u8>,
    seq: Option<u64>,
    x: G::Scalar,
    commitment: G::Element,
}

impl<G: Group> UserKey<G> {
    /// Assembles a key from raw parts without checking the key equation.
    pub fn from_parts(
        identity: Vec<u8>,
        seq: Option<u64>,
        x: G::Scalar,
        commitment: G::Element,
    ) -> Self {
        Self { identity, seq, x, commitment }
    }

    pub fn identity(&self) -> &[u8] {
        &self.identity
    }

    pub fn seq(&self) -> Option<u64> {
        self.seq
    }

    pub fn secret(&self) -> &G::Scalar {
        &self.x
    }

    pub fn commitment(&self) -> &G::Element {
        &self.commitment
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Signature<G: Group> {
    pub s: G::Scalar,
    pub h: G::Scalar,
}

impl<G: Group> Signature<G> {
    pub fn to_bytes(&self, group: &G) -> [u8; SIGNATURE_LEN] {
        let mut out = [0u8; SIGNATURE_LEN];
        out[..ENCODED_LEN].copy_from_slice(&group.encode_scalar(&self.s));
        out[ENCODED_LEN..].copy_from_slice(&group.encode_scalar(&self.h));
        out
    }

    pub fn from_bytes(group: &G, bytes: &[u8]) -> Result<Self> {
        if bytes.len() != SIGNATURE_LEN {
            return Err(Error::Decode(format!(
                "signature must be {SIGNATURE_LEN} bytes, got {}",
                bytes.len()
            )));
        }
        Ok(Self {
            s: group.decode_scalar(&bytes[..ENCODED_LEN])?,
            h: group.decode_scalar(&bytes[ENCODED_LEN..])?,
        })
    }
}

/// A precomputed nonce `(r, R = r * P)`. Signing consumes it; a second use
/// fails with [`Error::NonceReuse`].
#[derive(Debug)]
pub struct NoncePacket<G: Group> {
    r: G::Scalar,
    commitment: G::Element,
    consumed: bool,
}

impl<G: Group> NoncePacket<G> {
    /// Builds a packet from a chosen `r`. Only meant for reproducing fixed
    /// examples; real nonces come from [`E2ibs::precompute_nonce`].
    pub fn from_secret(group: &G, r: G::Scalar) -> Self {
        Self { r, commitment: group.mul_base(&r), consumed: false }
    }

    pub fn commitment(&self) -> &G::Element {
        &self.commitment
    }

    pub fn secret(&self) -> &G::Scalar {
        &self.r
    }

    pub fn is_consumed(&self) -> bool {
        self.consumed
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Validity {
    Valid,
    Invalid,
}

impl Validity {
    pub fn is_valid(self) -> bool {
        self == Validity::Valid
    }
}

impl From<bool> for Validity {
    fn from(ok: bool) -> Self {
        if ok {
            Validity::Valid
        } else {
            Validity::Invalid
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SetupOptions {
    /// Floor on `log2 C(t, k)`; set to `0.0` to allow toy parameters.
    pub min_security_bits: f64,
    /// Keep all `z_i` in memory (`32 * t` bytes of secret state) so that
    /// extraction skips the PRF.
    pub cache_z: bool,
}

impl Default for SetupOptions {
    fn default() -> Self {
        Self { min_security_bits: DEFAULT_MIN_SECURITY_BITS, cache_z: false }
    }
}

impl SetupOptions {
    pub fn insecure() -> Self {
        Self { min_security_bits: 0.0, cache_z: false }
    }

    pub fn with_cache(mut self) -> Self {
        self.cache_z = true;
        self
    }
}

/// The scheme over a group backend and a hash suite.
#[derive(Clone, Debug, Default)]
pub struct E2ibs<G, H = Sha512Suite> {
    group: G,
    hash: H,
}

impl<G: Group> E2ibs<G> {
    pub fn new(group: G) -> Self {
        Self { group, hash: Sha512Suite }
    }
}

impl<G: Group, H: HashSuite<G>> E2ibs<G, H> {
    pub fn with_hash(group: G, hash: H) -> Self {
        Self { group, hash }
    }

    pub fn group(&self) -> &G {
        &self.group
    }

    pub fn hash(&self) -> &H {
        &self.hash
    }

    /// Samples `msk` and derives the master public key.
    pub fn setup<R: RngCore + CryptoRng>(
        &self,
        rng: &mut R,
        t: u32,
        k: u32,
        options: SetupOptions,
    ) -> Result<MasterKeyMaterial<G>> {
        let params = Params::new(t, k)?;
        params.require(options.min_security_bits)?;
        let msk = self.group.random_scalar(rng);
        self.master_from_secret(msk, &params, options.cache_z)
    }

    /// Derives the master key material for a given `msk`.
    pub fn master_from_secret(
        &self,
        msk: G::Scalar,
        params: &Params,
        cache_z: bool,
    ) -> Result<MasterKeyMaterial<G>> {
        let z: Vec<G::Scalar> = (0..u64::from(params.t()))
            .map(|i| self.hash.prf_index(&self.group, &msk, i))
            .collect();
        let elements = z.iter().map(|zi| self.group.mul_base(zi)).collect();
        Ok(MasterKeyMaterial {
            msk,
            mpk: MasterPublicKey::new(params, elements)?,
            z_cache: cache_z.then_some(z),
        })
    }

    pub fn indices(
        &self,
        mpk: &MasterPublicKey<G>,
        identity: &[u8],
        commitment: &G::Element,
        seq: Option<u64>,
    ) -> Result<IndexVector> {
        self.hash
            .indices(&self.group, identity, commitment, seq, mpk.t(), mpk.k())
    }

    /// `sum of z_j` over `indices`, repeats counted.
    pub(crate) fn secret_index_sum(
        &self,
        master: &MasterKeyMaterial<G>,
        indices: &IndexVector,
    ) -> G::Scalar {
        indices.as_slice().iter().fold(self.group.scalar_zero(), |acc, &j| {
            let zj = match &master.z_cache {
                Some(cache) => cache[j as usize],
                None => self.hash.prf_index(&self.group, &master.msk, u64::from(j)),
            };
            self.group.scalar_add(&acc, &zj)
        })
    }

    /// `sum of Z_j` over `indices`.
    pub fn public_index_sum(&self, mpk: &MasterPublicKey<G>, indices: &IndexVector) -> G::Element {
        let picked: Vec<G::Element> = indices
            .as_slice()
            .iter()
            .map(|&j| mpk.elements[j as usize])
            .collect();
        self.group.sum(&picked)
    }

    /// Issues the key for `identity`. Costs one scalar multiplication.
    pub fn extract(
        &self,
        master: &MasterKeyMaterial<G>,
        identity: &[u8],
        seq: Option<u64>,
    ) -> Result<UserKey<G>> {
        if identity.is_empty() {
            return Err(Error::MalformedInput("identity must be non-empty".into()));
        }
        let u = self.hash.prf_identity(&self.group, &master.msk, identity)?;
        let commitment = self.group.mul_base(&u);
        let indices = self.indices(&master.mpk, identity, &commitment, seq)?;
        let x = self
            .group
            .scalar_add(&self.secret_index_sum(master, &indices), &u);
        Ok(UserKey { identity: identity.to_vec(), seq, x, commitment })
    }

    /// Checks `x * P == sum of Z_j + C` for the key's own indices.
    pub fn key_equation_holds(&self, mpk: &MasterPublicKey<G>, key: &UserKey<G>) -> bool {
        match self.indices(mpk, &key.identity, &key.commitment, key.seq) {
            Ok(indices) => {
                let rhs = self
                    .group
                    .add(&self.public_index_sum(mpk, &indices), &key.commitment);
                self.group.mul_base(&key.x) == rhs
            }
            Err(_) => false,
        }
    }

    /// Offline half of signing.
    pub fn precompute_nonce<R: RngCore + CryptoRng>(&self, rng: &mut R) -> NoncePacket<G> {
        NoncePacket::from_secret(&self.group, self.group.random_scalar(rng))
    }

    /// Online half of signing: one hash and two scalar-field operations.
    pub fn sign(
        &self,
        message: &[u8],
        key: &UserKey<G>,
        nonce: &mut NoncePacket<G>,
    ) -> Result<Signature<G>> {
        if nonce.consumed {
            return Err(Error::NonceReuse);
        }
        nonce.consumed = true;
        let h = self.hash.challenge(&self.group, message, &nonce.commitment);
        let s = self
            .group
            .scalar_sub(&nonce.r, &self.group.scalar_mul(&h, &key.x));
        nonce.r = self.group.scalar_zero();
        Ok(Signature { s, h })
    }

    /// `R' = s * P + h * (sum of Z_j + C)`, the commitment an honest
    /// signature was made with.
    pub fn recompute_commitment(
        &self,
        mpk: &MasterPublicKey<G>,
        identity: &[u8],
        seq: Option<u64>,
        commitment: &G::Element,
        sig: &Signature<G>,
    ) -> Result<G::Element> {
        let indices = self.indices(mpk, identity, commitment, seq)?;
        let public_key = self
            .group
            .add(&self.public_index_sum(mpk, &indices), commitment);
        Ok(self.group.double_mul_base(&sig.h, &public_key, &sig.s))
    }

    /// Two scalar multiplications and `k + 1` point additions.
    pub fn verify(
        &self,
        mpk: &MasterPublicKey<G>,
        identity: &[u8],
        seq: Option<u64>,
        commitment: &G::Element,
        message: &[u8],
        sig: &Signature<G>,
    ) -> Validity {
        match self.recompute_commitment(mpk, identity, seq, commitment, sig) {
            Ok(r) => (self.hash.challenge(&self.group, message, &r) == sig.h).into(),
            Err(_) => Validity::Invalid,
        }
    }

    /// [`E2ibs::verify`] over wire encodings; undecodable input is invalid.
    pub fn verify_bytes(
        &self,
        mpk: &MasterPublicKey<G>,
        identity: &[u8],
        seq: Option<u64>,
        commitment: &[u8],
        message: &[u8],
        sig: &[u8],
    ) -> Validity {
        let (Ok(c), Ok(sig)) = (
            self.group.decode_element(commitment),
            Signature::from_bytes(&self.group, sig),
        ) else {
            return Validity::Invalid;
        };
        self.verify(mpk, identity, seq, &c, message, &sig)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{Counting, Ristretto};
    use rand_chacha::ChaCha20Rng;
    use rand_core::SeedableRng;

    fn small_master(seed: u64) -> (E2ibs<Ristretto>, MasterKeyMaterial<Ristretto>, ChaCha20Rng) {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let scheme = E2ibs::new(Ristretto);
        let master = scheme
            .setup(&mut rng, 256, 8, SetupOptions::insecure())
            .unwrap();
        (scheme, master, rng)
    }

    #[test]
    fn security_bits_small_cases() {
        assert!((security_bits(2, 1).unwrap() - 1.0).abs() < 1e-12);
        assert!((security_bits(4, 2).unwrap() - 6f64.log2()).abs() < 1e-12);
        assert!((security_bits(1024, 1024).unwrap()).abs() < 1e-9);
        assert!(matches!(security_bits(4, 5), Err(Error::Domain(_))));
        assert!(matches!(security_bits(4, 0), Err(Error::Domain(_))));
    }

    #[test]
    fn setup_rejects_weak_parameters_unless_overridden() {
        let scheme = E2ibs::new(Ristretto);
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let err = scheme.setup(&mut rng, 256, 8, SetupOptions::default()).unwrap_err();
        assert!(matches!(err, Error::ParameterRejected { .. }));
        assert!(matches!(
            scheme.setup(&mut rng, 1000, 18, SetupOptions::insecure()),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn setup_is_deterministic_under_seed() {
        let (_, a, _) = small_master(5);
        let (_, b, _) = small_master(5);
        assert_eq!(a.msk(), b.msk());
        assert_eq!(a.mpk(), b.mpk());
    }

    #[test]
    fn paper_parameters_produce_32_kib_key() {
        let scheme = E2ibs::new(Ristretto);
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let master = scheme
            .setup(&mut rng, DEFAULT_T, DEFAULT_K, SetupOptions::default())
            .unwrap();
        assert_eq!(master.mpk().elements().len(), 1024);
        assert_eq!(master.mpk().encoded_len() - 16, 32 * 1024);
        let bytes = master.mpk().to_bytes(&Ristretto);
        assert_eq!(&bytes[..8], b"E2IBSMPK");
        assert_eq!(MasterPublicKey::from_bytes(&Ristretto, &bytes).unwrap(), *master.mpk());
        let mut bad = bytes.clone();
        bad.push(0);
        assert!(MasterPublicKey::from_bytes(&Ristretto, &bad).is_err());
        assert!(MasterPublicKey::from_bytes(&Ristretto, &bytes[..bytes.len() - 1]).is_err());
    }

    #[test]
    fn extract_and_sign_round_trip() {
        let (scheme, master, mut rng) = small_master(9);
        let key = scheme.extract(&master, b"gnb-17", None).unwrap();
        assert_eq!(key, scheme.extract(&master, b"gnb-17", None).unwrap());
        assert!(scheme.key_equation_holds(master.mpk(), &key));
        for i in 0..50u8 {
            let msg = [i; 40];
            let mut nonce = scheme.precompute_nonce(&mut rng);
            let sig = scheme.sign(&msg, &key, &mut nonce).unwrap();
            let ok = scheme.verify(master.mpk(), b"gnb-17", None, key.commitment(), &msg, &sig);
            assert!(ok.is_valid());
            let bytes = sig.to_bytes(&Ristretto);
            assert_eq!(Signature::from_bytes(&Ristretto, &bytes).unwrap(), sig);
        }
    }

    #[test]
    fn cache_does_not_change_keys() {
        let scheme = E2ibs::new(Ristretto);
        let params = Params::new(256, 8).unwrap();
        let msk = Ristretto.scalar_from_u64(0xDEAD_BEEF);
        let cached = scheme.master_from_secret(msk, &params, true).unwrap();
        let plain = scheme.master_from_secret(msk, &params, false).unwrap();
        assert!(cached.has_cache() && !plain.has_cache());
        for id in [&b"a"[..], b"bb", b"cell"] {
            assert_eq!(
                scheme.extract(&cached, id, Some(4)).unwrap(),
                scheme.extract(&plain, id, Some(4)).unwrap()
            );
        }
    }

    #[test]
    fn empty_identity_and_nonce_reuse_are_errors() {
        let (scheme, master, mut rng) = small_master(11);
        assert!(matches!(scheme.extract(&master, b"", None), Err(Error::MalformedInput(_))));
        let key = scheme.extract(&master, b"x", None).unwrap();
        let mut nonce = scheme.precompute_nonce(&mut rng);
        scheme.sign(b"m1", &key, &mut nonce).unwrap();
        assert!(nonce.is_consumed());
        assert_eq!(scheme.sign(b"m2", &key, &mut nonce), Err(Error::NonceReuse));
    }

    #[test]
    fn nonces_do_not_repeat() {
        let scheme = E2ibs::new(Ristretto);
        let mut rng = ChaCha20Rng::seed_from_u64(12);
        let mut seen = std::collections::HashSet::new();
        for _ in 0..10_000 {
            let n = scheme.precompute_nonce(&mut rng);
            assert_eq!(*n.commitment(), Ristretto.mul_base(n.secret()));
            assert!(seen.insert(Ristretto.encode_scalar(n.secret())));
        }
    }

    #[test]
    fn malformed_wire_inputs_are_invalid() {
        let (scheme, master, mut rng) = small_master(13);
        let key = scheme.extract(&master, b"x", None).unwrap();
        let mut nonce = scheme.precompute_nonce(&mut rng);
        let sig = scheme.sign(b"m", &key, &mut nonce).unwrap().to_bytes(&Ristretto);
        let c = Ristretto.encode_element(key.commitment());
        let mpk = master.mpk();
        assert!(scheme.verify_bytes(mpk, b"x", None, &c, b"m", &sig).is_valid());
        assert!(!scheme.verify_bytes(mpk, b"x", None, &[0xFF; 32], b"m", &sig).is_valid());
        assert!(!scheme.verify_bytes(mpk, b"x", None, &c, b"m", &sig[..63]).is_valid());
        let mut big_s = sig;
        big_s[..32].copy_from_slice(&[0xFF; 32]);
        assert!(!scheme.verify_bytes(mpk, b"x", None, &c, b"m", &big_s).is_valid());
        assert!(!scheme.verify_bytes(mpk, b"x", Some(0), &c, b"m", &sig).is_valid());
    }

    #[test]
    fn operation_counts() {
        let scheme = E2ibs::new(Counting::new(Ristretto));
        let g = scheme.group();
        let mut rng = ChaCha20Rng::seed_from_u64(14);
        let master = scheme.setup(&mut rng, 1024, 18, SetupOptions::default()).unwrap();

        let (key, ops) = g.measure(|| scheme.extract(&master, b"cell", None).unwrap());
        assert_eq!(ops.scalar_mults, 1);

        let mut nonce = scheme.precompute_nonce(&mut rng);
        let (sig, ops) = g.measure(|| scheme.sign(b"msg", &key, &mut nonce).unwrap());
        assert_eq!(ops.scalar_mults, 0);
        assert_eq!(ops.point_adds, 0);

        let (ok, ops) =
            g.measure(|| scheme.verify(master.mpk(), b"cell", None, key.commitment(), b"msg", &sig));
        assert!(ok.is_valid());
        assert_eq!(ops.scalar_mults, 2);
        assert_eq!(ops.point_adds, 18 + 1);
    }
}

#[cfg(test)]
pub(crate) mod toy_examples {
    use super::*;
    use crate::group::{ToyElement, ToyGroup, ToyScalar};

    /// Hash suite with hand-picked outputs over `Z_23`.
    pub(crate) struct Stub {
        pub z: Vec<u64>,
        pub u: u64,
        pub indices: Vec<u32>,
        /// Challenge returned when the commitment equals `h_at.0`.
        pub h_at: (u64, u64),
    }

    impl Stub {
        pub(crate) fn worked() -> Self {
            Stub { z: vec![2, 3, 5, 11, 13, 17, 19, 1], u: 7, indices: vec![1, 2], h_at: (4, 2) }
        }
    }

    impl HashSuite<ToyGroup> for Stub {
        fn prf_index(&self, g: &ToyGroup, _: &ToyScalar, i: u64) -> ToyScalar {
            g.scalar(self.z[i as usize])
        }
        fn prf_identity(&self, g: &ToyGroup, _: &ToyScalar, _: &[u8]) -> Result<ToyScalar> {
            Ok(g.scalar(self.u))
        }
        fn indices(
            &self,
            _: &ToyGroup,
            _: &[u8],
            _: &ToyElement,
            _: Option<u64>,
            t: u32,
            _: u32,
        ) -> Result<IndexVector> {
            IndexVector::new(self.indices.clone(), t)
        }
        fn challenge(&self, g: &ToyGroup, _: &[u8], r: &ToyElement) -> ToyScalar {
            if r.0 == self.h_at.0 {
                g.scalar(self.h_at.1)
            } else {
                g.scalar(r.0 + 3)
            }
        }
    }

    pub(crate) fn scheme(stub: Stub) -> (E2ibs<ToyGroup, Stub>, MasterKeyMaterial<ToyGroup>) {
        let g = ToyGroup::new(23).unwrap();
        let scheme = E2ibs::with_hash(g, stub);
        let params = Params::new(8, 2).unwrap();
        let master = scheme.master_from_secret(ToyScalar(1), &params, false).unwrap();
        (scheme, master)
    }

    #[test]
    fn setup_publishes_z_times_generator() {
        let (_, master) = scheme(Stub::worked());
        assert_eq!(master.mpk().get(1), Some(&ToyElement(3)));
        assert_eq!(master.mpk().get(2), Some(&ToyElement(5)));
    }

    #[test]
    fn worked_extract_sign_verify() {
        let (scheme, master) = scheme(Stub::worked());
        let g = *scheme.group();
        let key = scheme.extract(&master, b"U", None).unwrap();
        assert_eq!(*key.secret(), ToyScalar(15));
        assert_eq!(*key.commitment(), ToyElement(7));
        assert_eq!(g.mul_base(key.secret()), g.add(&g.sum(&[ToyElement(3), ToyElement(5)]), &ToyElement(7)));

        let mut nonce = NoncePacket::from_secret(&g, ToyScalar(4));
        assert_eq!(*nonce.commitment(), ToyElement(4));
        let sig = scheme.sign(b"m", &key, &mut nonce).unwrap();
        assert_eq!(sig, Signature { s: ToyScalar(20), h: ToyScalar(2) });

        let r = scheme
            .recompute_commitment(master.mpk(), b"U", None, key.commitment(), &sig)
            .unwrap();
        assert_eq!(r, ToyElement(4));
        assert!(scheme.verify(master.mpk(), b"U", None, key.commitment(), b"m", &sig).is_valid());
        let forged = Signature { s: ToyScalar(21), h: ToyScalar(2) };
        assert!(!scheme.verify(master.mpk(), b"U", None, key.commitment(), b"m", &forged).is_valid());
    }

    #[test]
    fn duplicate_indices_count_twice() {
        let (scheme, master) = scheme(Stub { indices: vec![1, 1], ..Stub::worked() });
        let key = scheme.extract(&master, b"U", None).unwrap();
        assert_eq!(*key.secret(), ToyScalar(13));
        assert!(scheme.key_equation_holds(master.mpk(), &key));
    }

    #[test]
    fn zero_challenge_leaves_nonce() {
        // Commitment 4 maps to challenge 0.
        let (scheme, master) = scheme(Stub { h_at: (4, 0), ..Stub::worked() });
        let key = scheme.extract(&master, b"U", None).unwrap();
        let mut nonce = NoncePacket::from_secret(scheme.group(), ToyScalar(4));
        let sig = scheme.sign(b"m", &key, &mut nonce).unwrap();
        assert_eq!(sig.s, ToyScalar(4));
    }
}
