//! Base-station broadcast authentication.
//!
//! A gNB identity is its 36-bit NR cell id packed with a 32-bit expiry
//! (Unix seconds). The PKG issues the gNB a key for that identity; the gNB
//! signs `MIB ‖ SIB1` together with a signing time and validity window and
//! appends a 111-byte record to SIB1:
//!
//! ```text
//! offset  len  field
//!      0   64  signature s ‖ h
//!     64    9  packed identity
//!     73   32  gNB commitment C_U
//!    105    4  t_sign, low 32 bits of Unix milliseconds (BE)
//!    109    2  dt, validity window in milliseconds (BE)
//! ```
//!
//! UEs check, in this order: record shape, operator trust anchor, key expiry,
//! freshness, signature. The first failing check names the rejection.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, RwLock};

use crate::e2ibs::{E2ibs, MasterKeyMaterial, MasterPublicKey, NoncePacket, Signature, UserKey, SIGNATURE_LEN};
use crate::error::{Error, Result};
use crate::group::{Group, Ristretto, ENCODED_LEN};

pub type Scheme = E2ibs<Ristretto>;

/// Packed identity length.
pub const IDENTITY_LEN: usize = 9;
/// Serialized [`Sib1AuthPayload`] length.
pub const PAYLOAD_LEN: usize = SIGNATURE_LEN + IDENTITY_LEN + ENCODED_LEN + 4 + 2;
/// Exclusive upper bound on NR cell ids (36 bits).
pub const NRCELL_ID_LIMIT: u64 = 1 << 36;
/// Default gNB key lifetime.
pub const DEFAULT_KEY_VALIDITY_SECS: u32 = 600;
/// Default PKG key lifetime.
pub const DEFAULT_ANCHOR_VALIDITY_SECS: u32 = 365 * 24 * 3600;
/// Default tolerated clock skew between gNB and UE.
pub const DEFAULT_SKEW_MS: u64 = 50;

/// Magic prefix of an encoded trust anchor.
pub const ANCHOR_MAGIC: &[u8; 9] = b"E2IBSTRST";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BsIdentity {
    pub nrcell_id: u64,
    /// Unix seconds.
    pub expiry: u32,
}

impl BsIdentity {
    pub fn new(nrcell_id: u64, expiry: u32) -> Result<Self> {
        if nrcell_id >= NRCELL_ID_LIMIT {
            return Err(Error::MalformedInput(format!("NR cell id {nrcell_id:#x} exceeds 36 bits")));
        }
        Ok(Self { nrcell_id, expiry })
    }

    /// 72-bit big-endian field: cell id in bits 71..36, expiry in 35..4,
    /// low nibble zero.
    pub fn pack(&self) -> [u8; IDENTITY_LEN] {
        let v: u128 = (u128::from(self.nrcell_id) << 36) | (u128::from(self.expiry) << 4);
        let wide = v.to_be_bytes();
        wide[16 - IDENTITY_LEN..].try_into().unwrap()
    }

    pub fn unpack(bytes: &[u8]) -> Result<Self> {
        let arr: [u8; IDENTITY_LEN] = bytes
            .try_into()
            .map_err(|_| Error::MalformedInput(format!("identity must be {IDENTITY_LEN} bytes")))?;
        if arr[IDENTITY_LEN - 1] & 0x0F != 0 {
            return Err(Error::MalformedInput("identity padding bits set".into()));
        }
        let mut wide = [0u8; 16];
        wide[16 - IDENTITY_LEN..].copy_from_slice(&arr);
        let v = u128::from_be_bytes(wide);
        Ok(Self {
            nrcell_id: (v >> 36) as u64,
            expiry: (v >> 4) as u32,
        })
    }

    pub fn expiry_ms(&self) -> u64 {
        u64::from(self.expiry) * 1000
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Sib1AuthPayload {
    pub signature: Signature<Ristretto>,
    pub identity: BsIdentity,
    pub commitment: <Ristretto as Group>::Element,
    /// Low 32 bits of the signing time in Unix milliseconds.
    pub t_sign: u32,
    /// Validity window in milliseconds.
    pub dt: u16,
}

impl Sib1AuthPayload {
    pub fn to_bytes(&self) -> [u8; PAYLOAD_LEN] {
        let g = Ristretto;
        let mut out = [0u8; PAYLOAD_LEN];
        out[..64].copy_from_slice(&self.signature.to_bytes(&g));
        out[64..73].copy_from_slice(&self.identity.pack());
        out[73..105].copy_from_slice(&g.encode_element(&self.commitment));
        out[105..109].copy_from_slice(&self.t_sign.to_be_bytes());
        out[109..111].copy_from_slice(&self.dt.to_be_bytes());
        out
    }

    pub fn parse(bytes: &[u8]) -> Result<Self> {
        if bytes.len() != PAYLOAD_LEN {
            return Err(Error::MalformedInput(format!(
                "payload must be {PAYLOAD_LEN} bytes, got {}",
                bytes.len()
            )));
        }
        let g = Ristretto;
        Ok(Self {
            signature: Signature::from_bytes(&g, &bytes[..64])?,
            identity: BsIdentity::unpack(&bytes[64..73])?,
            commitment: g.decode_element(&bytes[73..105])?,
            t_sign: u32::from_be_bytes(bytes[105..109].try_into().unwrap()),
            dt: u16::from_be_bytes(bytes[109..111].try_into().unwrap()),
        })
    }
}

/// Bytes covered by the signature:
/// `len(MIB) (u16 BE) ‖ MIB ‖ SIB1 ‖ t_sign (u32 BE) ‖ dt (u16 BE)`.
pub fn signed_message(mib: &[u8], sib1: &[u8], t_sign: u32, dt: u16) -> Result<Vec<u8>> {
    let mib_len = u16::try_from(mib.len())
        .map_err(|_| Error::MalformedInput("MIB longer than 65535 bytes".into()))?;
    let mut m = Vec::with_capacity(2 + mib.len() + sib1.len() + 6);
    m.extend_from_slice(&mib_len.to_be_bytes());
    m.extend_from_slice(mib);
    m.extend_from_slice(sib1);
    m.extend_from_slice(&t_sign.to_be_bytes());
    m.extend_from_slice(&dt.to_be_bytes());
    Ok(m)
}

/// PKG side: issues a gNB key valid for `validity_secs` (default 600) from
/// `now` (Unix seconds).
pub fn issue_bs_key(
    scheme: &Scheme,
    master: &MasterKeyMaterial<Ristretto>,
    nrcell_id: u64,
    now: u32,
    validity_secs: Option<u32>,
) -> Result<(UserKey<Ristretto>, BsIdentity)> {
    let validity = validity_secs.unwrap_or(DEFAULT_KEY_VALIDITY_SECS);
    if validity == 0 {
        return Err(Error::Config("key validity must be positive".into()));
    }
    let expiry = now
        .checked_add(validity)
        .ok_or_else(|| Error::Config("expiry overflows the 32-bit timestamp".into()))?;
    let identity = BsIdentity::new(nrcell_id, expiry)?;
    let key = scheme.extract(master, &identity.pack(), None)?;
    Ok((key, identity))
}

/// gNB side: signs `MIB ‖ SIB1` at `t_sign_ms` (Unix milliseconds).
#[allow(clippy::too_many_arguments)]
pub fn build_payload(
    scheme: &Scheme,
    mib: &[u8],
    sib1: &[u8],
    key: &UserKey<Ristretto>,
    identity: &BsIdentity,
    nonce: &mut NoncePacket<Ristretto>,
    t_sign_ms: u64,
    dt_ms: u16,
) -> Result<Sib1AuthPayload> {
    if key.identity() != identity.pack() {
        return Err(Error::MalformedInput("key was not issued for this identity".into()));
    }
    if t_sign_ms > identity.expiry_ms() {
        return Err(Error::KeyExpired { expiry: identity.expiry_ms(), now: t_sign_ms });
    }
    let t_sign = t_sign_ms as u32;
    let message = signed_message(mib, sib1, t_sign, dt_ms)?;
    let signature = scheme.sign(&message, key, nonce)?;
    Ok(Sib1AuthPayload {
        signature,
        identity: *identity,
        commitment: *key.commitment(),
        t_sign,
        dt: dt_ms,
    })
}

/// An operator's PKG public key as provisioned on the UE.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrustAnchor {
    pub operator_id: Vec<u8>,
    pub mpk: MasterPublicKey<Ristretto>,
    /// Unix seconds.
    pub mpk_expiry: u32,
    /// Sequence number each cell's current key was issued under. Cells
    /// absent from the map use unsequenced keys. Not part of the anchor
    /// file.
    pub current_seq: BTreeMap<u64, u64>,
}

impl TrustAnchor {
    pub fn new(operator_id: impl Into<Vec<u8>>, mpk: MasterPublicKey<Ristretto>, mpk_expiry: u32) -> Self {
        Self { operator_id: operator_id.into(), mpk, mpk_expiry, current_seq: BTreeMap::new() }
    }

    pub fn with_seq(mut self, nrcell_id: u64, seq: u64) -> Self {
        self.current_seq.insert(nrcell_id, seq);
        self
    }

    /// `"E2IBSTRST" ‖ len (u16 BE) ‖ operator id ‖ master public key ‖ expiry (u32 BE)`.
    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let len = u16::try_from(self.operator_id.len())
            .map_err(|_| Error::MalformedInput("operator id too long".into()))?;
        let mut out = Vec::new();
        out.extend_from_slice(ANCHOR_MAGIC);
        out.extend_from_slice(&len.to_be_bytes());
        out.extend_from_slice(&self.operator_id);
        out.extend_from_slice(&self.mpk.to_bytes(&Ristretto));
        out.extend_from_slice(&self.mpk_expiry.to_be_bytes());
        Ok(out)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let rest = bytes
            .strip_prefix(ANCHOR_MAGIC.as_slice())
            .ok_or_else(|| Error::Decode("missing trust anchor header".into()))?;
        let len_bytes = rest
            .get(..2)
            .ok_or_else(|| Error::Decode("truncated trust anchor".into()))?;
        let len = u16::from_be_bytes(len_bytes.try_into().unwrap()) as usize;
        let operator_id = rest
            .get(2..2 + len)
            .ok_or_else(|| Error::Decode("truncated operator id".into()))?
            .to_vec();
        let rest = &rest[2 + len..];
        let (mpk, used) = MasterPublicKey::read_prefix(&Ristretto, rest)?;
        let tail: [u8; 4] = rest[used..]
            .try_into()
            .map_err(|_| Error::Decode("trust anchor must end with a 4-byte expiry".into()))?;
        Ok(Self::new(operator_id, mpk, u32::from_be_bytes(tail)))
    }
}

/// Operator id to trust anchor map. Lookups and rotation may race freely;
/// a lookup sees either the old anchor or the new one.
#[derive(Debug, Default)]
pub struct TrustStore {
    anchors: RwLock<HashMap<Vec<u8>, Arc<TrustAnchor>>>,
}

impl TrustStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_anchor(&self, anchor: TrustAnchor) {
        self.anchors
            .write()
            .unwrap()
            .insert(anchor.operator_id.clone(), Arc::new(anchor));
    }

    pub fn lookup(&self, operator_id: &[u8]) -> Option<Arc<TrustAnchor>> {
        self.anchors.read().unwrap().get(operator_id).cloned()
    }

    /// Replaces the anchor of an already-known operator, returning the old one.
    pub fn rotate(&self, anchor: TrustAnchor) -> Result<Arc<TrustAnchor>> {
        let mut map = self.anchors.write().unwrap();
        match map.get_mut(&anchor.operator_id) {
            Some(slot) => Ok(std::mem::replace(slot, Arc::new(anchor))),
            None => Err(Error::UnknownOperator),
        }
    }

    pub fn len(&self) -> usize {
        self.anchors.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RejectReason {
    Malformed,
    AnchorExpired,
    KeyExpired,
    Stale,
    BadSignature,
    UntrustedOperator,
}

impl RejectReason {
    pub fn as_str(self) -> &'static str {
        match self {
            RejectReason::Malformed => "malformed",
            RejectReason::AnchorExpired => "anchor-expired",
            RejectReason::KeyExpired => "key-expired",
            RejectReason::Stale => "stale",
            RejectReason::BadSignature => "bad-signature",
            RejectReason::UntrustedOperator => "untrusted-operator",
        }
    }
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Accepted,
    Rejected(RejectReason),
}

impl Verdict {
    pub fn is_accepted(self) -> bool {
        self == Verdict::Accepted
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Accepted => f.write_str("accepted"),
            Verdict::Rejected(r) => write!(f, "rejected({r})"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VerifierConfig {
    pub skew_ms: u64,
}

impl Default for VerifierConfig {
    fn default() -> Self {
        Self { skew_ms: DEFAULT_SKEW_MS }
    }
}

/// Full signing time closest to `now_ms` whose low 32 bits are `t_sign`.
pub fn reconstruct_t_sign(now_ms: u64, t_sign: u32) -> i128 {
    let behind = (now_ms as u32).wrapping_sub(t_sign) as i32;
    i128::from(now_ms) - i128::from(behind)
}

/// `true` when `now_ms` lies inside `[t_sign - skew, t_sign + dt + skew)`.
pub fn is_fresh(now_ms: u64, t_sign: u32, dt: u16, skew_ms: u64) -> bool {
    let signed_at = reconstruct_t_sign(now_ms, t_sign);
    let now = i128::from(now_ms);
    let skew = i128::from(skew_ms);
    now < signed_at + i128::from(dt) + skew && signed_at <= now + skew
}

/// UE side. Total on arbitrary bytes; `payload = None` models a SIB1 that
/// carries no authentication record.
pub fn verify_payload(
    store: &TrustStore,
    operator_id: &[u8],
    payload: Option<&[u8]>,
    mib: &[u8],
    sib1: &[u8],
    now_ms: u64,
    config: &VerifierConfig,
) -> Verdict {
    use RejectReason::*;

    let Some(Ok(p)) = payload.map(Sib1AuthPayload::parse) else {
        return Verdict::Rejected(Malformed);
    };
    let Some(anchor) = store.lookup(operator_id) else {
        return Verdict::Rejected(UntrustedOperator);
    };
    if now_ms > u64::from(anchor.mpk_expiry) * 1000 {
        return Verdict::Rejected(AnchorExpired);
    }
    if now_ms > p.identity.expiry_ms() {
        return Verdict::Rejected(KeyExpired);
    }
    if !is_fresh(now_ms, p.t_sign, p.dt, config.skew_ms) {
        return Verdict::Rejected(Stale);
    }
    let Ok(message) = signed_message(mib, sib1, p.t_sign, p.dt) else {
        return Verdict::Rejected(Malformed);
    };
    let seq = anchor.current_seq.get(&p.identity.nrcell_id).copied();
    let scheme = E2ibs::new(Ristretto);
    let ok = scheme.verify(
        &anchor.mpk,
        &p.identity.pack(),
        seq,
        &p.commitment,
        &message,
        &p.signature,
    );
    if ok.is_valid() {
        Verdict::Accepted
    } else {
        Verdict::Rejected(BadSignature)
    }
}
