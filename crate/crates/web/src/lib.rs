//! Browser bindings for the demo page in `www/`.
//!
//! Times cross the boundary as `f64` milliseconds so JS never has to deal
//! with BigInt.

use rand_chacha::ChaCha20Rng;
use rand_core::SeedableRng;
use wasm_bindgen::prelude::*;

use e2ibs::e2ibs::{E2ibs, SetupOptions, UserKey, DEFAULT_K, DEFAULT_T};
use e2ibs::group::Ristretto;
use e2ibs::protocol::{
    build_payload, is_fresh, issue_bs_key, verify_payload, BsIdentity, Scheme, TrustAnchor, TrustStore,
    VerifierConfig,
};

const OPERATOR: &[u8] = b"demo-operator";
const MIB: &[u8] = b"MIB sfn=512";

fn js_err(e: impl std::fmt::Display) -> JsValue {
    JsValue::from_str(&e.to_string())
}

/// Security level in bits, or NaN for parameters out of range.
#[wasm_bindgen]
pub fn security_bits(t: u32, k: u32) -> f64 {
    e2ibs::e2ibs::security_bits(t, k).unwrap_or(f64::NAN)
}

/// 1 where a payload signed at time 0 is still fresh `delay` ms later, 0
/// where it is stale. Delays run from `from_ms` to `to_ms` inclusive.
#[wasm_bindgen]
pub fn freshness_sweep(dt_ms: u16, skew_ms: u32, from_ms: i32, to_ms: i32, step_ms: u32) -> Vec<u8> {
    // Sign far from zero so negative delays don't underflow.
    const BASE: i64 = 1 << 40;
    let step = step_ms.max(1) as usize;
    (from_ms..=to_ms)
        .step_by(step)
        .map(|d| is_fresh((BASE + i64::from(d)) as u64, BASE as u32, dt_ms, u64::from(skew_ms)) as u8)
        .collect()
}

/// One PKG, one gNB key and one UE trust store.
#[wasm_bindgen]
pub struct Demo {
    scheme: Scheme,
    store: TrustStore,
    key: UserKey<Ristretto>,
    identity: BsIdentity,
    rng: ChaCha20Rng,
}

#[wasm_bindgen]
impl Demo {
    /// `now_s` is Unix seconds; the gNB key is valid for 600 s from then.
    #[wasm_bindgen(constructor)]
    pub fn new(seed: u32, nrcell_id: u32, now_s: u32) -> Result<Demo, JsValue> {
        let scheme = E2ibs::new(Ristretto);
        let mut rng = ChaCha20Rng::seed_from_u64(u64::from(seed));
        let master = scheme.setup(&mut rng, DEFAULT_T, DEFAULT_K, SetupOptions::default()).map_err(js_err)?;
        let (key, identity) = issue_bs_key(&scheme, &master, u64::from(nrcell_id), now_s, None).map_err(js_err)?;
        let store = TrustStore::new();
        let anchor_expiry = now_s.checked_add(24 * 3600).ok_or_else(|| js_err("now_s too large"))?;
        store.add_anchor(TrustAnchor::new(OPERATOR, master.mpk().clone(), anchor_expiry));
        Ok(Demo { scheme, store, key, identity, rng })
    }

    #[wasm_bindgen(getter)]
    pub fn key_expiry_ms(&self) -> f64 {
        self.identity.expiry_ms() as f64
    }

    #[wasm_bindgen(getter)]
    pub fn identity_hex(&self) -> String {
        hex::encode(self.identity.pack())
    }

    /// Returns the 111-byte authentication record for `sib1`.
    pub fn sign(&mut self, sib1: &str, t_sign_ms: f64, dt_ms: u16) -> Result<Vec<u8>, JsValue> {
        let mut nonce = self.scheme.precompute_nonce(&mut self.rng);
        let payload = build_payload(
            &self.scheme,
            MIB,
            sib1.as_bytes(),
            &self.key,
            &self.identity,
            &mut nonce,
            t_sign_ms as u64,
            dt_ms,
        )
        .map_err(js_err)?;
        Ok(payload.to_bytes().to_vec())
    }

    /// "accepted" or "rejected(reason)".
    pub fn verify(&self, payload: &[u8], sib1: &str, now_ms: f64) -> String {
        verify_payload(&self.store, OPERATOR, Some(payload), MIB, sib1.as_bytes(), now_ms as u64, &VerifierConfig::default())
            .to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const NOW_S: u32 = 1_700_000_000;

    #[test]
    fn sign_tamper_verify() {
        let mut d = Demo::new(1, 0x0165_53F1, NOW_S).unwrap();
        let t = f64::from(NOW_S) * 1000.0 + 10.0;
        let p = d.sign("cell barred: no", t, 1000).unwrap();
        assert_eq!(p.len(), 111);
        assert_eq!(d.verify(&p, "cell barred: no", t + 5.0), "accepted");
        assert_eq!(d.verify(&p, "cell barred: yes", t + 5.0), "rejected(bad-signature)");
        assert_eq!(d.verify(&p, "cell barred: no", t + 2000.0), "rejected(stale)");
        let mut flipped = p.clone();
        flipped[3] ^= 1;
        assert_eq!(d.verify(&flipped, "cell barred: no", t + 5.0), "rejected(bad-signature)");
        assert_eq!(d.verify(&p[..100], "cell barred: no", t + 5.0), "rejected(malformed)");
        assert_eq!(d.key_expiry_ms(), f64::from(NOW_S + 600) * 1000.0);
    }

    #[test]
    fn sweep_edges() {
        let s = freshness_sweep(100, 50, -60, 160, 10);
        // delays -60..=160 step 10: fresh for -50..=140, stale at -60 and 150, 160
        let fresh: Vec<i32> = (-60..=160).step_by(10).zip(&s).filter(|(_, &f)| f == 1).map(|(d, _)| d).collect();
        assert_eq!(fresh.first(), Some(&-50));
        assert_eq!(fresh.last(), Some(&140));
        assert!(security_bits(1024, 18) > 127.0);
        assert!(security_bits(0, 18).is_nan());
    }
}
