//! Deterministic actor simulation of SIB1 authentication.
//!
//! A scenario declares actors (PKG, AMF, gNB, UE, attacker) and a script of
//! timed actions. The clock only moves when the script says so and all
//! randomness comes from a seeded ChaCha20 stream, so a (scenario, seed) pair
//! always produces the same trace. The broadcast channel is a queue the
//! attacker may read, drop, rewrite or inject into.
//!
//! Traces and scripts are tab-separated text, one record per line.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use rand_chacha::ChaCha20Rng;
use rand_core::SeedableRng;
use sha2::{Digest, Sha256};

use crate::e2ibs::{MasterKeyMaterial, SetupOptions, UserKey, DEFAULT_K, DEFAULT_T};
use crate::error::{Error, Result};
use crate::group::{Group, Ristretto, ENCODED_LEN};
use crate::protocol::{
    build_payload, issue_bs_key, signed_message, verify_payload, BsIdentity, RejectReason,
    Scheme, Sib1AuthPayload, TrustAnchor, TrustStore, Verdict, VerifierConfig,
    DEFAULT_ANCHOR_VALIDITY_SECS, DEFAULT_KEY_VALIDITY_SECS,
};

/// Unix time (ms) that simulated time zero maps to.
pub const DEFAULT_START_UNIX_MS: u64 = 1_700_000_000_000;

const DIGEST_HEX_LEN: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Role {
    Pkg,
    Amf,
    Gnb,
    Ue,
    Attacker,
}

impl Role {
    fn as_str(self) -> &'static str {
        match self {
            Role::Pkg => "pkg",
            Role::Amf => "amf",
            Role::Gnb => "gnb",
            Role::Ue => "ue",
            Role::Attacker => "attacker",
        }
    }
}

impl FromStr for Role {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "pkg" => Role::Pkg,
            "amf" => Role::Amf,
            "gnb" => Role::Gnb,
            "ue" => Role::Ue,
            "attacker" => Role::Attacker,
            _ => return Err(Error::Config(format!("unknown role {s:?}"))),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActorDecl {
    pub id: String,
    pub role: Role,
    /// Operator id (PLMN) the actor belongs to. Unused for UEs and attackers.
    pub operator: String,
    /// `false` marks infrastructure run by the adversary.
    pub honest: bool,
}

impl ActorDecl {
    pub fn new(id: &str, role: Role, operator: &str) -> Self {
        Self { id: id.into(), role, operator: operator.into(), honest: role != Role::Attacker }
    }

    pub fn rogue(id: &str, role: Role, operator: &str) -> Self {
        Self { honest: false, ..Self::new(id, role, operator) }
    }
}

/// What a UE does after seeing a SIB1 without an authentication record.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum UePolicy {
    #[default]
    KeepLooking,
    ConnectUnauthenticated,
}

impl UePolicy {
    fn as_str(self) -> &'static str {
        match self {
            UePolicy::KeepLooking => "keep-looking",
            UePolicy::ConnectUnauthenticated => "connect-unauthenticated",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FrameField {
    Mib,
    Sib1,
    Payload,
}

impl FrameField {
    fn as_str(self) -> &'static str {
        match self {
            FrameField::Mib => "mib",
            FrameField::Sib1 => "sib1",
            FrameField::Payload => "payload",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Action {
    /// PKG samples its master key. UEs provisioned later get an anchor valid
    /// for `anchor_validity_s` from now.
    Setup { pkg: String, anchor_validity_s: u32 },
    /// Installs the PKG's anchor on a UE.
    Provision { ue: String, pkg: String },
    /// Single-party key issue, relayed by the AMF.
    RequestKey { gnb: String, amf: String, pkg: String, cell: u64, validity_s: Option<u32> },
    /// Split key issue under `seq`. The PKG publishes `seq` as the cell's
    /// current sequence number to every UE holding its anchor.
    RequestRobustKey { gnb: String, amf: String, pkg: String, cell: u64, seq: u64 },
    Broadcast { gnb: String, dt_ms: u16 },
    /// UE processes every queued frame.
    Deliver { ue: String },
    /// Attacker copies every queued frame.
    Capture { attacker: String },
    /// Attacker empties the queue.
    Drop { attacker: String },
    /// Attacker XORs `mask` into byte `offset` of `field` in every queued frame.
    Tamper { attacker: String, field: FrameField, offset: usize, mask: u8 },
    /// Attacker re-sends a captured frame verbatim.
    Replay { attacker: String, capture: usize },
    /// Attacker broadcasts a SIB1 without an authentication record.
    InjectUnsigned { attacker: String, operator: String },
    /// Attacker learns the PKG's master secret.
    CompromisePkg { attacker: String, pkg: String },
    /// With a compromised master secret, attacker signs under the commitment
    /// of the last captured payload, guessing the signer's share.
    Forge { attacker: String, attempts: u32 },
}

impl Action {
    fn fields(&self) -> Vec<String> {
        fn opt<T: ToString>(v: &Option<T>) -> String {
            v.as_ref().map_or_else(|| "-".into(), T::to_string)
        }
        match self {
            Action::Setup { pkg, anchor_validity_s } => {
                vec!["setup".into(), pkg.clone(), anchor_validity_s.to_string()]
            }
            Action::Provision { ue, pkg } => vec!["provision".into(), ue.clone(), pkg.clone()],
            Action::RequestKey { gnb, amf, pkg, cell, validity_s } => vec![
                "request-key".into(),
                gnb.clone(),
                amf.clone(),
                pkg.clone(),
                cell.to_string(),
                opt(validity_s),
            ],
            Action::RequestRobustKey { gnb, amf, pkg, cell, seq } => vec![
                "request-robust-key".into(),
                gnb.clone(),
                amf.clone(),
                pkg.clone(),
                cell.to_string(),
                seq.to_string(),
            ],
            Action::Broadcast { gnb, dt_ms } => vec!["broadcast".into(), gnb.clone(), dt_ms.to_string()],
            Action::Deliver { ue } => vec!["deliver".into(), ue.clone()],
            Action::Capture { attacker } => vec!["capture".into(), attacker.clone()],
            Action::Drop { attacker } => vec!["drop".into(), attacker.clone()],
            Action::Tamper { attacker, field, offset, mask } => vec![
                "tamper".into(),
                attacker.clone(),
                field.as_str().into(),
                offset.to_string(),
                mask.to_string(),
            ],
            Action::Replay { attacker, capture } => {
                vec!["replay".into(), attacker.clone(), capture.to_string()]
            }
            Action::InjectUnsigned { attacker, operator } => {
                vec!["inject-unsigned".into(), attacker.clone(), operator.clone()]
            }
            Action::CompromisePkg { attacker, pkg } => {
                vec!["compromise-pkg".into(), attacker.clone(), pkg.clone()]
            }
            Action::Forge { attacker, attempts } => {
                vec!["forge".into(), attacker.clone(), attempts.to_string()]
            }
        }
    }

    fn parse(fields: &[&str]) -> Result<Self> {
        fn num<T: FromStr>(s: &str) -> Result<T> {
            s.parse().map_err(|_| Error::Config(format!("bad number {s:?}")))
        }
        let arity = |n: usize| -> Result<()> {
            if fields.len() == n + 1 {
                Ok(())
            } else {
                Err(Error::Config(format!("{} takes {n} arguments", fields[0])))
            }
        };
        let s = |i: usize| fields[i].to_string();
        let Some(&verb) = fields.first() else {
            return Err(Error::Config("empty step".into()));
        };
        Ok(match verb {
            "setup" => {
                arity(2)?;
                Action::Setup { pkg: s(1), anchor_validity_s: num(fields[2])? }
            }
            "provision" => {
                arity(2)?;
                Action::Provision { ue: s(1), pkg: s(2) }
            }
            "request-key" => {
                arity(5)?;
                let validity_s = if fields[5] == "-" { None } else { Some(num(fields[5])?) };
                Action::RequestKey { gnb: s(1), amf: s(2), pkg: s(3), cell: num(fields[4])?, validity_s }
            }
            "request-robust-key" => {
                arity(5)?;
                Action::RequestRobustKey {
                    gnb: s(1),
                    amf: s(2),
                    pkg: s(3),
                    cell: num(fields[4])?,
                    seq: num(fields[5])?,
                }
            }
            "broadcast" => {
                arity(2)?;
                Action::Broadcast { gnb: s(1), dt_ms: num(fields[2])? }
            }
            "deliver" => {
                arity(1)?;
                Action::Deliver { ue: s(1) }
            }
            "capture" => {
                arity(1)?;
                Action::Capture { attacker: s(1) }
            }
            "drop" => {
                arity(1)?;
                Action::Drop { attacker: s(1) }
            }
            "tamper" => {
                arity(4)?;
                let field = match fields[2] {
                    "mib" => FrameField::Mib,
                    "sib1" => FrameField::Sib1,
                    "payload" => FrameField::Payload,
                    other => return Err(Error::Config(format!("unknown frame field {other:?}"))),
                };
                Action::Tamper { attacker: s(1), field, offset: num(fields[3])?, mask: num(fields[4])? }
            }
            "replay" => {
                arity(2)?;
                Action::Replay { attacker: s(1), capture: num(fields[2])? }
            }
            "inject-unsigned" => {
                arity(2)?;
                Action::InjectUnsigned { attacker: s(1), operator: s(2) }
            }
            "compromise-pkg" => {
                arity(2)?;
                Action::CompromisePkg { attacker: s(1), pkg: s(2) }
            }
            "forge" => {
                arity(2)?;
                Action::Forge { attacker: s(1), attempts: num(fields[2])? }
            }
            other => return Err(Error::Config(format!("unknown action {other:?}"))),
        })
    }

    /// Actor references paired with the role each must have.
    fn references(&self) -> Vec<(&String, Role)> {
        match self {
            Action::Setup { pkg, .. } => vec![(pkg, Role::Pkg)],
            Action::Provision { ue, pkg } => vec![(ue, Role::Ue), (pkg, Role::Pkg)],
            Action::RequestKey { gnb, amf, pkg, .. } | Action::RequestRobustKey { gnb, amf, pkg, .. } => {
                vec![(gnb, Role::Gnb), (amf, Role::Amf), (pkg, Role::Pkg)]
            }
            Action::Broadcast { gnb, .. } => vec![(gnb, Role::Gnb)],
            Action::Deliver { ue } => vec![(ue, Role::Ue)],
            Action::CompromisePkg { attacker, pkg } => vec![(attacker, Role::Attacker), (pkg, Role::Pkg)],
            Action::Capture { attacker }
            | Action::Drop { attacker }
            | Action::Tamper { attacker, .. }
            | Action::Replay { attacker, .. }
            | Action::InjectUnsigned { attacker, .. }
            | Action::Forge { attacker, .. } => vec![(attacker, Role::Attacker)],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub at_ms: u64,
    pub action: Action,
}

fn step(at_ms: u64, action: Action) -> Step {
    Step { at_ms, action }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub description: String,
    pub t: u32,
    pub k: u32,
    pub start_unix_ms: u64,
    pub policy: UePolicy,
    pub skew_ms: u64,
    pub actors: Vec<ActorDecl>,
    pub script: Vec<Step>,
    /// Expected UE verdicts in delivery order.
    pub expected: Vec<Verdict>,
}

impl Scenario {
    fn new(name: &str, description: &str, actors: Vec<ActorDecl>) -> Self {
        Self {
            name: name.into(),
            description: description.into(),
            t: DEFAULT_T,
            k: DEFAULT_K,
            start_unix_ms: DEFAULT_START_UNIX_MS,
            policy: UePolicy::default(),
            skew_ms: VerifierConfig::default().skew_ms,
            actors,
            script: Vec::new(),
            expected: Vec::new(),
        }
    }

    /// Whether any actor is run by the adversary.
    pub fn adversarial(&self) -> bool {
        self.actors.iter().any(|a| !a.honest)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut line = |fields: &[String]| {
            out.push_str(&fields.join("\t"));
            out.push('\n');
        };
        line(&["scenario".into(), self.name.clone()]);
        line(&["description".into(), self.description.clone()]);
        line(&["params".into(), self.t.to_string(), self.k.to_string()]);
        line(&["start".into(), self.start_unix_ms.to_string()]);
        line(&["policy".into(), self.policy.as_str().into()]);
        line(&["skew".into(), self.skew_ms.to_string()]);
        for a in &self.actors {
            line(&[
                "actor".into(),
                a.id.clone(),
                a.role.as_str().into(),
                a.operator.clone(),
                if a.honest { "honest" } else { "rogue" }.into(),
            ]);
        }
        for s in &self.script {
            let mut f = vec!["step".into(), s.at_ms.to_string()];
            f.extend(s.action.fields());
            line(&f);
        }
        for v in &self.expected {
            line(&["expect".into(), v.to_string()]);
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut sc = Scenario::new("", "", Vec::new());
        for (n, raw) in text.lines().enumerate() {
            if raw.trim().is_empty() || raw.starts_with('#') {
                continue;
            }
            let f: Vec<&str> = raw.split('\t').collect();
            let bad = || Error::Config(format!("line {}: malformed {:?}", n + 1, f[0]));
            let num = |s: &str| s.parse::<u64>().map_err(|_| bad());
            match (f[0], f.len()) {
                ("scenario", 2) => sc.name = f[1].into(),
                ("description", 2) => sc.description = f[1].into(),
                ("params", 3) => {
                    sc.t = num(f[1])? as u32;
                    sc.k = num(f[2])? as u32;
                }
                ("start", 2) => sc.start_unix_ms = num(f[1])?,
                ("skew", 2) => sc.skew_ms = num(f[1])?,
                ("policy", 2) => {
                    sc.policy = match f[1] {
                        "keep-looking" => UePolicy::KeepLooking,
                        "connect-unauthenticated" => UePolicy::ConnectUnauthenticated,
                        _ => return Err(bad()),
                    }
                }
                ("actor", 5) => {
                    let honest = match f[4] {
                        "honest" => true,
                        "rogue" => false,
                        _ => return Err(bad()),
                    };
                    sc.actors.push(ActorDecl { id: f[1].into(), role: f[2].parse()?, operator: f[3].into(), honest });
                }
                ("step", len) if len >= 3 => sc.script.push(Step { at_ms: num(f[1])?, action: Action::parse(&f[2..])? }),
                ("expect", 2) => sc.expected.push(parse_verdict(f[1]).ok_or_else(bad)?),
                _ => return Err(bad()),
            }
        }
        if sc.name.is_empty() {
            return Err(Error::Config("script has no scenario name".into()));
        }
        Ok(sc)
    }

    /// Checks actor references, roles and step ordering.
    pub fn validate(&self) -> Result<()> {
        let mut roles = HashMap::new();
        for a in &self.actors {
            if roles.insert(a.id.as_str(), a.role).is_some() {
                return Err(Error::Config(format!("actor {} declared twice", a.id)));
            }
        }
        let mut last = 0;
        for s in &self.script {
            if s.at_ms < last {
                return Err(Error::Config(format!("step at {} ms precedes step at {last} ms", s.at_ms)));
            }
            last = s.at_ms;
            for (id, want) in s.action.references() {
                match roles.get(id.as_str()) {
                    None => return Err(Error::Config(format!("unknown actor {id:?}"))),
                    Some(&r) if r != want => {
                        return Err(Error::Config(format!("actor {id} is a {}, not a {}", r.as_str(), want.as_str())))
                    }
                    Some(_) => {}
                }
            }
        }
        Ok(())
    }
}

fn parse_verdict(s: &str) -> Option<Verdict> {
    if s == "accepted" {
        return Some(Verdict::Accepted);
    }
    let reason = s.strip_prefix("rejected(")?.strip_suffix(')')?;
    parse_reason(reason).map(Verdict::Rejected)
}

fn parse_reason(s: &str) -> Option<RejectReason> {
    use RejectReason::*;
    [Malformed, AnchorExpired, KeyExpired, Stale, BadSignature, UntrustedOperator]
        .into_iter()
        .find(|r| r.as_str() == s)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EventKind {
    Setup,
    Provision,
    KeyRequest,
    KeyResponse,
    SeqPublished,
    BeginSigning,
    Broadcast,
    AuthenticationSuccessful,
    Rejected(RejectReason),
    KeepSearching,
    ConnectedUnauthenticated,
    Capture,
    Drop,
    Tamper,
    Inject,
    Compromise,
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            EventKind::Setup => "setup",
            EventKind::Provision => "provision",
            EventKind::KeyRequest => "key_request",
            EventKind::KeyResponse => "key_response",
            EventKind::SeqPublished => "seq_published",
            EventKind::BeginSigning => "begin_signing",
            EventKind::Broadcast => "broadcast",
            EventKind::AuthenticationSuccessful => "authentication_successful",
            EventKind::Rejected(r) => return write!(f, "rejected({r})"),
            EventKind::KeepSearching => "keep_searching",
            EventKind::ConnectedUnauthenticated => "connected_unauthenticated",
            EventKind::Capture => "capture",
            EventKind::Drop => "drop",
            EventKind::Tamper => "tamper",
            EventKind::Inject => "inject",
            EventKind::Compromise => "compromise",
        };
        f.write_str(s)
    }
}

impl FromStr for EventKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        use EventKind::*;
        let all = [
            Setup,
            Provision,
            KeyRequest,
            KeyResponse,
            SeqPublished,
            BeginSigning,
            Broadcast,
            AuthenticationSuccessful,
            KeepSearching,
            ConnectedUnauthenticated,
            Capture,
            Drop,
            Tamper,
            Inject,
            Compromise,
        ];
        if let Some(k) = all.into_iter().find(|k| k.to_string() == s) {
            return Ok(k);
        }
        s.strip_prefix("rejected(")
            .and_then(|r| r.strip_suffix(')'))
            .and_then(parse_reason)
            .map(Rejected)
            .ok_or_else(|| Error::Decode(format!("unknown event kind {s:?}")))
    }
}

/// One trace record.
///
/// `origin` is the actor whose frame the event concerns; for UE verdicts it
/// is whoever last put the frame on the air. `pk` is the gNB commitment
/// named by the frame, `digest` a truncated SHA-256 of the signed bytes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimEvent {
    pub time_ms: u64,
    pub kind: EventKind,
    pub actor: String,
    pub origin: String,
    pub honest: bool,
    pub pk: Option<[u8; ENCODED_LEN]>,
    pub digest: Option<String>,
    pub t_sign: Option<u32>,
}

pub const TRACE_HEADER: &str = "time_ms\tkind\tactor\torigin\thonest\tpk\tdigest\tt_sign";

impl SimEvent {
    pub fn to_tsv(&self) -> String {
        format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            self.time_ms,
            self.kind,
            self.actor,
            if self.origin.is_empty() { "-" } else { &self.origin },
            u8::from(self.honest),
            self.pk.map_or_else(|| "-".into(), hex::encode),
            self.digest.as_deref().unwrap_or("-"),
            self.t_sign.map_or_else(|| "-".into(), |t| t.to_string()),
        )
    }

    pub fn from_tsv(line: &str) -> Result<Self> {
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != 8 {
            return Err(Error::Decode(format!("trace line has {} fields, want 8", f.len())));
        }
        let bad = |what: &str| Error::Decode(format!("bad {what} in trace line"));
        let opt = |s: &str| (s != "-").then(|| s.to_string());
        let pk = match opt(f[5]) {
            None => None,
            Some(h) => {
                let v = hex::decode(h).map_err(|_| bad("pk"))?;
                Some(v.try_into().map_err(|_| bad("pk"))?)
            }
        };
        Ok(Self {
            time_ms: f[0].parse().map_err(|_| bad("time"))?,
            kind: f[1].parse()?,
            actor: f[2].into(),
            origin: opt(f[3]).unwrap_or_default(),
            honest: match f[4] {
                "1" => true,
                "0" => false,
                _ => return Err(bad("honest flag")),
            },
            pk,
            digest: opt(f[6]),
            t_sign: opt(f[7]).map(|t| t.parse()).transpose().map_err(|_| bad("t_sign"))?,
        })
    }
}

pub fn trace_to_tsv(trace: &[SimEvent]) -> String {
    let mut out = String::from(TRACE_HEADER);
    out.push('\n');
    for e in trace {
        out.push_str(&e.to_tsv());
        out.push('\n');
    }
    out
}

pub fn trace_from_tsv(text: &str) -> Result<Vec<SimEvent>> {
    text.lines()
        .filter(|l| !l.is_empty() && *l != TRACE_HEADER)
        .map(SimEvent::from_tsv)
        .collect()
}

/// A UE's decision about one frame.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UeVerdict {
    pub time_ms: u64,
    pub ue: String,
    /// Actor that last put the frame on the air.
    pub origin: String,
    /// `false` if the adversary produced or modified the frame.
    pub origin_honest: bool,
    pub verdict: Verdict,
}

#[derive(Clone, Debug)]
pub struct SimOutcome {
    pub trace: Vec<SimEvent>,
    pub verdicts: Vec<UeVerdict>,
}

impl SimOutcome {
    pub fn observed(&self) -> Vec<Verdict> {
        self.verdicts.iter().map(|v| v.verdict).collect()
    }

    pub fn matches(&self, scenario: &Scenario) -> bool {
        self.observed() == scenario.expected
    }

    /// Acceptances of frames produced or modified by the adversary.
    pub fn attacker_acceptances(&self) -> usize {
        self.verdicts
            .iter()
            .filter(|v| !v.origin_honest && v.verdict.is_accepted())
            .count()
    }

    pub fn trace_tsv(&self) -> String {
        trace_to_tsv(&self.trace)
    }
}

#[derive(Clone, Debug)]
struct Frame {
    origin: String,
    honest: bool,
    operator: String,
    mib: Vec<u8>,
    sib1: Vec<u8>,
    payload: Option<Vec<u8>>,
}

struct PkgState {
    master: MasterKeyMaterial<Ristretto>,
    anchor: TrustAnchor,
    provisioned: Vec<String>,
}

#[derive(Default)]
struct GnbState {
    key: Option<(UserKey<Ristretto>, BsIdentity)>,
    broadcasts: u64,
}

#[derive(Default)]
struct AttackerState {
    captured: Vec<Frame>,
    master: Option<(String, MasterKeyMaterial<Ristretto>)>,
}

struct World<'a> {
    sc: &'a Scenario,
    scheme: Scheme,
    rng: ChaCha20Rng,
    decls: HashMap<&'a str, &'a ActorDecl>,
    pkgs: HashMap<String, PkgState>,
    gnbs: HashMap<String, GnbState>,
    ues: BTreeMap<String, TrustStore>,
    attackers: HashMap<String, AttackerState>,
    channel: Vec<Frame>,
    now: u64,
    trace: Vec<SimEvent>,
    verdicts: Vec<UeVerdict>,
}

fn digest_hex(bytes: &[u8]) -> String {
    let mut h = hex::encode(Sha256::digest(bytes));
    h.truncate(DIGEST_HEX_LEN);
    h
}

fn frame_digest(frame: &Frame, p: &Sib1AuthPayload) -> String {
    match signed_message(&frame.mib, &frame.sib1, p.t_sign, p.dt) {
        Ok(m) => digest_hex(&m),
        Err(_) => "-".into(),
    }
}

impl<'a> World<'a> {
    fn new(sc: &'a Scenario, seed: u64) -> Self {
        Self {
            sc,
            scheme: Scheme::default(),
            rng: ChaCha20Rng::seed_from_u64(seed),
            decls: sc.actors.iter().map(|a| (a.id.as_str(), a)).collect(),
            pkgs: HashMap::new(),
            gnbs: sc
                .actors
                .iter()
                .filter(|a| a.role == Role::Gnb)
                .map(|a| (a.id.clone(), GnbState::default()))
                .collect(),
            ues: sc
                .actors
                .iter()
                .filter(|a| a.role == Role::Ue)
                .map(|a| (a.id.clone(), TrustStore::new()))
                .collect(),
            attackers: sc
                .actors
                .iter()
                .filter(|a| a.role == Role::Attacker)
                .map(|a| (a.id.clone(), AttackerState::default()))
                .collect(),
            channel: Vec::new(),
            now: 0,
            trace: Vec::new(),
            verdicts: Vec::new(),
        }
    }

    fn unix_ms(&self) -> u64 {
        self.sc.start_unix_ms + self.now
    }

    fn unix_s(&self) -> Result<u32> {
        u32::try_from(self.unix_ms() / 1000).map_err(|_| Error::Config("clock beyond 2106".into()))
    }

    fn decl(&self, id: &str) -> &'a ActorDecl {
        self.decls[id]
    }

    fn emit(&mut self, kind: EventKind, actor: &str, origin: &str) -> &mut SimEvent {
        let honest = self.decls.get(origin).or(self.decls.get(actor)).is_some_and(|d| d.honest);
        self.trace.push(SimEvent {
            time_ms: self.now,
            kind,
            actor: actor.into(),
            origin: origin.into(),
            honest,
            pk: None,
            digest: None,
            t_sign: None,
        });
        self.trace.last_mut().unwrap()
    }

    fn pkg(&self, id: &str) -> Result<&PkgState> {
        self.pkgs
            .get(id)
            .ok_or_else(|| Error::Config(format!("PKG {id} used before setup")))
    }

    fn run(mut self) -> Result<SimOutcome> {
        let sc = self.sc;
        for s in &sc.script {
            self.now = s.at_ms;
            self.apply(&s.action)?;
        }
        Ok(SimOutcome { trace: self.trace, verdicts: self.verdicts })
    }

    fn apply(&mut self, action: &Action) -> Result<()> {
        match action {
            Action::Setup { pkg, anchor_validity_s } => {
                let master = self.scheme.setup(&mut self.rng, self.sc.t, self.sc.k, SetupOptions::default().with_cache())?;
                let expiry = self
                    .unix_s()?
                    .checked_add(*anchor_validity_s)
                    .ok_or_else(|| Error::Config("anchor expiry overflows".into()))?;
                let anchor = TrustAnchor::new(self.decl(pkg).operator.as_bytes(), master.mpk().clone(), expiry);
                self.pkgs.insert(pkg.clone(), PkgState { master, anchor, provisioned: Vec::new() });
                self.emit(EventKind::Setup, pkg, pkg);
            }
            Action::Provision { ue, pkg } => {
                let anchor = self.pkg(pkg)?.anchor.clone();
                self.ues[ue].add_anchor(anchor);
                self.pkgs.get_mut(pkg).unwrap().provisioned.push(ue.clone());
                self.emit(EventKind::Provision, ue, pkg);
            }
            Action::RequestKey { gnb, amf, pkg, cell, validity_s } => {
                self.relay_request(gnb, amf, pkg);
                let now_s = self.unix_s()?;
                let (key, id) = issue_bs_key(&self.scheme, &self.pkg(pkg)?.master, *cell, now_s, *validity_s)?;
                let pk = self.scheme.group().encode_element(key.commitment());
                self.relay_response(gnb, amf, pkg, pk);
                self.gnbs.get_mut(gnb).unwrap().key = Some((key, id));
            }
            Action::RequestRobustKey { gnb, amf, pkg, cell, seq } => {
                let share = self.scheme.user_keygen(&mut self.rng);
                self.relay_request(gnb, amf, pkg);
                let id = BsIdentity::new(*cell, self.unix_s()?.saturating_add(DEFAULT_KEY_VALIDITY_SECS))?;
                let state = self.pkg(pkg)?;
                let ext = self.scheme.extract_blind(&state.master, &id.pack(), share.public(), *seq)?;
                // The record crosses the AMF as bytes.
                let wire = ext.to_bytes(self.scheme.group());
                let ext = crate::robust::PkgExtraction::from_bytes(self.scheme.group(), &wire)?;
                let key = self.scheme.complete_key(&share, &ext, &id.pack(), state.master.mpk())?;
                let pk = self.scheme.group().encode_element(&ext.c_u);
                self.relay_response(gnb, amf, pkg, pk);
                self.gnbs.get_mut(gnb).unwrap().key = Some((key, id));
                self.publish_seq(pkg, *cell, *seq);
            }
            Action::Broadcast { gnb, dt_ms } => self.broadcast(gnb, *dt_ms)?,
            Action::Deliver { ue } => self.deliver(ue),
            Action::Capture { attacker } => {
                let frames = self.channel.clone();
                self.attackers.get_mut(attacker).unwrap().captured.extend(frames);
                self.emit(EventKind::Capture, attacker, attacker);
            }
            Action::Drop { attacker } => {
                self.channel.clear();
                self.emit(EventKind::Drop, attacker, attacker);
            }
            Action::Tamper { attacker, field, offset, mask } => {
                for f in &mut self.channel {
                    let target = match field {
                        FrameField::Mib => Some(&mut f.mib),
                        FrameField::Sib1 => Some(&mut f.sib1),
                        FrameField::Payload => f.payload.as_mut(),
                    };
                    if let Some(byte) = target.and_then(|t| t.get_mut(*offset)) {
                        *byte ^= mask;
                        f.origin = attacker.clone();
                        f.honest = false;
                    }
                }
                self.emit(EventKind::Tamper, attacker, attacker);
            }
            Action::Replay { attacker, capture } => {
                let mut frame = self.attackers[attacker]
                    .captured
                    .get(*capture)
                    .cloned()
                    .ok_or_else(|| Error::Config(format!("{attacker} has no capture #{capture}")))?;
                frame.origin = attacker.clone();
                frame.honest = false;
                self.inject(attacker, frame);
            }
            Action::InjectUnsigned { attacker, operator } => {
                let frame = Frame {
                    origin: attacker.clone(),
                    honest: false,
                    operator: operator.clone(),
                    mib: b"MIB".to_vec(),
                    sib1: format!("SIB1 op={operator} fake").into_bytes(),
                    payload: None,
                };
                self.inject(attacker, frame);
            }
            Action::CompromisePkg { attacker, pkg } => {
                let master = self.pkg(pkg)?.master.clone();
                self.attackers.get_mut(attacker).unwrap().master = Some((pkg.clone(), master));
                self.emit(EventKind::Compromise, attacker, pkg);
            }
            Action::Forge { attacker, attempts } => self.forge(attacker, *attempts)?,
        }
        Ok(())
    }

    fn relay_request(&mut self, gnb: &str, amf: &str, pkg: &str) {
        self.emit(EventKind::KeyRequest, gnb, gnb);
        self.emit(EventKind::KeyRequest, amf, gnb);
        self.emit(EventKind::KeyRequest, pkg, gnb);
    }

    fn relay_response(&mut self, gnb: &str, amf: &str, pkg: &str, pk: [u8; ENCODED_LEN]) {
        for actor in [pkg, amf, gnb] {
            self.emit(EventKind::KeyResponse, actor, pkg).pk = Some(pk);
        }
    }

    fn publish_seq(&mut self, pkg: &str, cell: u64, seq: u64) {
        let state = self.pkgs.get_mut(pkg).unwrap();
        state.anchor.current_seq.insert(cell, seq);
        let anchor = state.anchor.clone();
        let targets = state.provisioned.clone();
        for ue in &targets {
            // Re-provision keeps the UE on the current per-cell policy.
            self.ues[ue].add_anchor(anchor.clone());
        }
        self.emit(EventKind::SeqPublished, pkg, pkg);
    }

    fn broadcast(&mut self, gnb: &str, dt_ms: u16) -> Result<()> {
        let decl = self.decl(gnb);
        let state = self.gnbs.get_mut(gnb).unwrap();
        let (key, id) = state
            .key
            .clone()
            .ok_or_else(|| Error::Config(format!("{gnb} broadcasts without a key")))?;
        state.broadcasts += 1;
        let mib = format!("MIB cell={}", id.nrcell_id).into_bytes();
        let sib1 = format!("SIB1 op={} cell={} n={}", decl.operator, id.nrcell_id, state.broadcasts).into_bytes();
        let mut nonce = self.scheme.precompute_nonce(&mut self.rng);
        let t_ms = self.unix_ms();
        let payload = build_payload(&self.scheme, &mib, &sib1, &key, &id, &mut nonce, t_ms, dt_ms)?;
        let pk = self.scheme.group().encode_element(&payload.commitment);
        let digest = digest_hex(&signed_message(&mib, &sib1, payload.t_sign, dt_ms)?);
        for kind in [EventKind::BeginSigning, EventKind::Broadcast] {
            let e = self.emit(kind, gnb, gnb);
            e.pk = Some(pk);
            e.digest = Some(digest.clone());
            e.t_sign = Some(payload.t_sign);
        }
        self.channel.push(Frame {
            origin: gnb.into(),
            honest: decl.honest,
            operator: decl.operator.clone(),
            mib,
            sib1,
            payload: Some(payload.to_bytes().to_vec()),
        });
        Ok(())
    }

    fn inject(&mut self, attacker: &str, frame: Frame) {
        let parsed = frame.payload.as_deref().and_then(|p| Sib1AuthPayload::parse(p).ok());
        let e = self.emit(EventKind::Inject, attacker, attacker);
        if let Some(p) = parsed {
            e.pk = Some(Ristretto.encode_element(&p.commitment));
            e.t_sign = Some(p.t_sign);
            e.digest = Some(frame_digest(&frame, &p));
        }
        self.channel.push(frame);
    }

    fn forge(&mut self, attacker: &str, attempts: u32) -> Result<()> {
        let state = &self.attackers[attacker];
        let (pkg, master) = state
            .master
            .clone()
            .ok_or_else(|| Error::Config(format!("{attacker} forges without a master secret")))?;
        let (victim, p) = state
            .captured
            .iter()
            .rev()
            .find_map(|f| Some((f.clone(), Sib1AuthPayload::parse(f.payload.as_deref()?).ok()?)))
            .ok_or_else(|| Error::Config(format!("{attacker} has no captured payload to target")))?;
        let identity = p.identity.pack();
        let seq = self.pkg(&pkg)?.anchor.current_seq.get(&p.identity.nrcell_id).copied().unwrap_or(0);
        let z_u = self.scheme.pkg_share(&master, &identity, &p.commitment, seq)?;
        let g = *self.scheme.group();
        for i in 0..attempts {
            // First attempt signs with z_U alone, the rest guess u1.
            let x = if i == 0 { z_u } else { g.scalar_add(&z_u, &g.random_scalar(&mut self.rng)) };
            let key = UserKey::from_parts(identity.to_vec(), Some(seq), x, p.commitment);
            let mut nonce = self.scheme.precompute_nonce(&mut self.rng);
            let sib1 = format!("SIB1 op={} cell={} forged={i}", victim.operator, p.identity.nrcell_id).into_bytes();
            let forged = build_payload(&self.scheme, &victim.mib, &sib1, &key, &p.identity, &mut nonce, self.unix_ms(), p.dt)?;
            let frame = Frame {
                origin: attacker.into(),
                honest: false,
                operator: victim.operator.clone(),
                mib: victim.mib.clone(),
                sib1,
                payload: Some(forged.to_bytes().to_vec()),
            };
            self.inject(attacker, frame);
        }
        Ok(())
    }

    fn deliver(&mut self, ue: &str) {
        let config = VerifierConfig { skew_ms: self.sc.skew_ms };
        let frames = std::mem::take(&mut self.channel);
        let now = self.unix_ms();
        for frame in frames {
            let verdict = verify_payload(
                &self.ues[ue],
                frame.operator.as_bytes(),
                frame.payload.as_deref(),
                &frame.mib,
                &frame.sib1,
                now,
                &config,
            );
            let parsed = frame.payload.as_deref().and_then(|p| Sib1AuthPayload::parse(p).ok());
            let kind = match verdict {
                Verdict::Accepted => EventKind::AuthenticationSuccessful,
                Verdict::Rejected(r) => EventKind::Rejected(r),
            };
            let e = self.emit(kind, ue, &frame.origin);
            e.honest = frame.honest;
            if let Some(p) = &parsed {
                e.pk = Some(Ristretto.encode_element(&p.commitment));
                e.t_sign = Some(p.t_sign);
                e.digest = Some(frame_digest(&frame, p));
            }
            if frame.payload.is_none() {
                let follow = match self.sc.policy {
                    UePolicy::KeepLooking => EventKind::KeepSearching,
                    UePolicy::ConnectUnauthenticated => EventKind::ConnectedUnauthenticated,
                };
                self.emit(follow, ue, &frame.origin).honest = frame.honest;
            }
            self.verdicts.push(UeVerdict {
                time_ms: self.now,
                ue: ue.into(),
                origin: frame.origin,
                origin_honest: frame.honest,
                verdict,
            });
        }
    }
}

/// Runs `scenario` with every random choice drawn from `seed`.
pub fn run_scenario(scenario: &Scenario, seed: u64) -> Result<SimOutcome> {
    scenario.validate()?;
    World::new(scenario, seed).run()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Correspondence {
    Pass,
    /// The first acceptance without a distinct matching honest signing.
    Fail(SimEvent),
}

impl Correspondence {
    pub fn is_pass(&self) -> bool {
        *self == Correspondence::Pass
    }
}

/// Every `authentication_successful` must follow a `begin_signing` by an
/// honest gNB with the same commitment, digest and signing time, and no UE
/// may accept the same signing twice.
pub fn assert_correspondence(trace: &[SimEvent]) -> Correspondence {
    type Key = ([u8; ENCODED_LEN], String, u32);
    let key = |e: &SimEvent| -> Option<Key> { Some((e.pk?, e.digest.clone()?, e.t_sign?)) };
    let mut signed: HashSet<Key> = HashSet::new();
    let mut accepted: HashSet<(String, Key)> = HashSet::new();
    for e in trace {
        match e.kind {
            EventKind::BeginSigning if e.honest => {
                if let Some(k) = key(e) {
                    signed.insert(k);
                }
            }
            EventKind::AuthenticationSuccessful => {
                let Some(k) = key(e) else {
                    return Correspondence::Fail(e.clone());
                };
                if !signed.contains(&k) || !accepted.insert((e.actor.clone(), k)) {
                    return Correspondence::Fail(e.clone());
                }
            }
            _ => {}
        }
    }
    Correspondence::Pass
}

const OPERATOR: &str = "00101";
const FOREIGN: &str = "99970";
const CELL: u64 = 0x0_1234_5001;
const YEAR: u32 = DEFAULT_ANCHOR_VALIDITY_SECS;

fn base_actors() -> Vec<ActorDecl> {
    vec![
        ActorDecl::new("pkg", Role::Pkg, OPERATOR),
        ActorDecl::new("amf", Role::Amf, OPERATOR),
        ActorDecl::new("gnb", Role::Gnb, OPERATOR),
        ActorDecl::new("ue", Role::Ue, ""),
    ]
}

fn with_attacker() -> Vec<ActorDecl> {
    let mut a = base_actors();
    a.push(ActorDecl::new("mallory", Role::Attacker, ""));
    a
}

fn bootstrap() -> Vec<Step> {
    vec![
        step(0, Action::Setup { pkg: "pkg".into(), anchor_validity_s: YEAR }),
        step(0, Action::Provision { ue: "ue".into(), pkg: "pkg".into() }),
        step(
            0,
            Action::RequestKey { gnb: "gnb".into(), amf: "amf".into(), pkg: "pkg".into(), cell: CELL, validity_s: None },
        ),
    ]
}

fn broadcast(at: u64, dt_ms: u16) -> Step {
    step(at, Action::Broadcast { gnb: "gnb".into(), dt_ms })
}

fn deliver(at: u64) -> Step {
    step(at, Action::Deliver { ue: "ue".into() })
}

fn mallory(at: u64, f: impl FnOnce(String) -> Action) -> Step {
    step(at, f("mallory".into()))
}

pub fn honest() -> Scenario {
    let mut actors = base_actors();
    actors.push(ActorDecl::new("ue2", Role::Ue, ""));
    let mut sc = Scenario::new(
        "honest",
        "periodic signed SIB1 to two UEs, including a key refresh",
        actors,
    );
    sc.script = bootstrap();
    sc.script.push(step(0, Action::Provision { ue: "ue2".into(), pkg: "pkg".into() }));
    for i in 0..5u64 {
        sc.script.push(broadcast(i * 160, 1000));
        sc.script.push(deliver(i * 160 + 3));
        sc.script.push(broadcast(i * 160 + 80, 1000));
        sc.script.push(step(i * 160 + 120, Action::Deliver { ue: "ue2".into() }));
    }
    sc.script.push(step(
        590_000,
        Action::RequestKey { gnb: "gnb".into(), amf: "amf".into(), pkg: "pkg".into(), cell: CELL, validity_s: None },
    ));
    sc.script.push(broadcast(601_000, 1000));
    sc.script.push(deliver(601_010));
    sc.expected = vec![Verdict::Accepted; 11];
    sc
}

pub fn fbs_unsigned() -> Scenario {
    let mut sc = Scenario::new("fbs_unsigned", "fake base station broadcasts SIB1 with no record", with_attacker());
    sc.script = bootstrap();
    sc.script.push(mallory(10, |a| Action::InjectUnsigned { attacker: a, operator: OPERATOR.into() }));
    sc.script.push(deliver(12));
    sc.expected = vec![Verdict::Rejected(RejectReason::Malformed)];
    sc
}

pub fn fbs_tamper() -> Scenario {
    let mut sc = Scenario::new("fbs_tamper", "attacker flips a SIB1 bit in flight", with_attacker());
    sc.script = bootstrap();
    sc.script.push(broadcast(10, 1000));
    sc.script.push(mallory(11, |a| Action::Tamper { attacker: a, field: FrameField::Sib1, offset: 5, mask: 0x01 }));
    sc.script.push(deliver(12));
    sc.expected = vec![Verdict::Rejected(RejectReason::BadSignature)];
    sc
}

pub fn replay_expired_key() -> Scenario {
    let mut sc = Scenario::new(
        "replay_expired_key",
        "captured payload replayed after the gNB key expired",
        with_attacker(),
    );
    sc.script = bootstrap();
    sc.script.push(broadcast(10, 1000));
    sc.script.push(mallory(11, |a| Action::Capture { attacker: a }));
    sc.script.push(deliver(12));
    sc.script.push(mallory(601_000, |a| Action::Replay { attacker: a, capture: 0 }));
    sc.script.push(deliver(601_001));
    sc.expected = vec![Verdict::Accepted, Verdict::Rejected(RejectReason::KeyExpired)];
    sc
}

pub fn relay_delay() -> Scenario {
    let mut sc = Scenario::new(
        "relay_delay",
        "attacker relays a captured payload 70 s later",
        with_attacker(),
    );
    sc.script = bootstrap();
    sc.script.push(broadcast(10, 1000));
    sc.script.push(mallory(11, |a| Action::Capture { attacker: a }));
    sc.script.push(mallory(11, |a| Action::Drop { attacker: a }));
    sc.script.push(mallory(70_010, |a| Action::Replay { attacker: a, capture: 0 }));
    sc.script.push(deliver(70_011));
    sc.expected = vec![Verdict::Rejected(RejectReason::Stale)];
    sc
}

pub fn seq_revoked() -> Scenario {
    let mut actors = base_actors();
    actors.push(ActorDecl::new("gnb_li", Role::Gnb, OPERATOR));
    let mut sc = Scenario::new(
        "seq_revoked",
        "a second key for the same cell under a higher seq revokes the first",
        actors,
    );
    let robust = |gnb: &str, seq| Action::RequestRobustKey {
        gnb: gnb.into(),
        amf: "amf".into(),
        pkg: "pkg".into(),
        cell: CELL,
        seq,
    };
    sc.script = vec![
        step(0, Action::Setup { pkg: "pkg".into(), anchor_validity_s: YEAR }),
        step(0, Action::Provision { ue: "ue".into(), pkg: "pkg".into() }),
        step(0, robust("gnb", 0)),
        broadcast(10, 1000),
        deliver(11),
        step(20, robust("gnb_li", 1)),
        broadcast(30, 1000),
        deliver(31),
        step(40, Action::Broadcast { gnb: "gnb_li".into(), dt_ms: 1000 }),
        deliver(41),
    ];
    sc.expected = vec![Verdict::Accepted, Verdict::Rejected(RejectReason::BadSignature), Verdict::Accepted];
    sc
}

/// Forgery attempts against a split key by an adversary holding the master secret.
pub const COMPROMISED_PKG_ATTEMPTS: u32 = 1000;

pub fn compromised_pkg() -> Scenario {
    let mut sc = Scenario::new(
        "compromised_pkg",
        "attacker with the master secret tries to sign under a split key's commitment",
        with_attacker(),
    );
    sc.script = vec![
        step(0, Action::Setup { pkg: "pkg".into(), anchor_validity_s: YEAR }),
        step(0, Action::Provision { ue: "ue".into(), pkg: "pkg".into() }),
        step(
            0,
            Action::RequestRobustKey { gnb: "gnb".into(), amf: "amf".into(), pkg: "pkg".into(), cell: CELL, seq: 0 },
        ),
        broadcast(10, 1000),
        mallory(11, |a| Action::Capture { attacker: a }),
        deliver(12),
        mallory(20, |a| Action::CompromisePkg { attacker: a, pkg: "pkg".into() }),
        mallory(30, |a| Action::Forge { attacker: a, attempts: COMPROMISED_PKG_ATTEMPTS }),
        deliver(31),
    ];
    sc.expected = std::iter::once(Verdict::Accepted)
        .chain(std::iter::repeat_n(Verdict::Rejected(RejectReason::BadSignature), COMPROMISED_PKG_ATTEMPTS as usize))
        .collect();
    sc
}

pub fn unknown_operator() -> Scenario {
    let mut actors = base_actors();
    actors.extend([
        ActorDecl::rogue("rogue_pkg", Role::Pkg, FOREIGN),
        ActorDecl::rogue("rogue_amf", Role::Amf, FOREIGN),
        ActorDecl::rogue("rogue_gnb", Role::Gnb, FOREIGN),
    ]);
    let mut sc = Scenario::new(
        "unknown_operator",
        "correctly signed SIB1 from an operator the UE has no anchor for",
        actors,
    );
    sc.script = bootstrap();
    sc.script.extend([
        step(0, Action::Setup { pkg: "rogue_pkg".into(), anchor_validity_s: YEAR }),
        step(
            0,
            Action::RequestKey {
                gnb: "rogue_gnb".into(),
                amf: "rogue_amf".into(),
                pkg: "rogue_pkg".into(),
                cell: CELL,
                validity_s: None,
            },
        ),
        step(10, Action::Broadcast { gnb: "rogue_gnb".into(), dt_ms: 1000 }),
        deliver(11),
    ]);
    sc.expected = vec![Verdict::Rejected(RejectReason::UntrustedOperator)];
    sc
}

pub fn anchor_expired() -> Scenario {
    let mut sc = Scenario::new(
        "anchor_expired",
        "validly signed SIB1 checked after the operator anchor lapsed",
        base_actors(),
    );
    sc.script = vec![
        step(0, Action::Setup { pkg: "pkg".into(), anchor_validity_s: 60 }),
        step(0, Action::Provision { ue: "ue".into(), pkg: "pkg".into() }),
        step(
            0,
            Action::RequestKey { gnb: "gnb".into(), amf: "amf".into(), pkg: "pkg".into(), cell: CELL, validity_s: None },
        ),
        broadcast(10, 1000),
        deliver(11),
        broadcast(61_000, 1000),
        deliver(61_002),
    ];
    sc.expected = vec![Verdict::Accepted, Verdict::Rejected(RejectReason::AnchorExpired)];
    sc
}

pub fn builtin_scenarios() -> Vec<Scenario> {
    vec![
        honest(),
        fbs_unsigned(),
        fbs_tamper(),
        replay_expired_key(),
        relay_delay(),
        seq_revoked(),
        compromised_pkg(),
        unknown_operator(),
        anchor_expired(),
    ]
}

pub fn builtin(name: &str) -> Option<Scenario> {
    builtin_scenarios().into_iter().find(|s| s.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(sc: &Scenario) -> SimOutcome {
        let out = run_scenario(sc, 7).unwrap();
        assert_eq!(out.observed(), sc.expected, "{}", sc.name);
        out
    }

    #[test]
    fn every_builtin_meets_expectations() {
        for sc in builtin_scenarios() {
            let out = run(&sc.clone());
            assert_eq!(out.attacker_acceptances(), 0, "{}", sc.name);
            assert!(assert_correspondence(&out.trace).is_pass(), "{}", sc.name);
            assert!(out.trace.windows(2).all(|w| w[0].time_ms <= w[1].time_ms));
        }
    }

    #[test]
    fn trace_is_deterministic_per_seed() {
        let sc = fbs_tamper();
        let a = run_scenario(&sc, 1).unwrap().trace_tsv();
        assert_eq!(a, run_scenario(&sc, 1).unwrap().trace_tsv());
        assert_ne!(a, run_scenario(&sc, 2).unwrap().trace_tsv());
    }

    #[test]
    fn trace_round_trips_through_tsv() {
        let out = run(&honest());
        let text = out.trace_tsv();
        assert!(text.starts_with(TRACE_HEADER));
        assert_eq!(trace_from_tsv(&text).unwrap(), out.trace);
        let acc = out.trace.iter().find(|e| e.kind == EventKind::AuthenticationSuccessful).unwrap();
        assert!(acc.pk.is_some() && acc.digest.as_ref().unwrap().len() == DIGEST_HEX_LEN);
    }

    #[test]
    fn amf_only_forwards() {
        let out = run(&honest());
        let amf: Vec<_> = out.trace.iter().filter(|e| e.actor == "amf").map(|e| e.kind).collect();
        assert_eq!(amf, [EventKind::KeyRequest, EventKind::KeyResponse].repeat(2));
    }

    #[test]
    fn fabricated_acceptance_is_caught() {
        let mut trace = run(&relay_delay()).trace;
        assert!(assert_correspondence(&trace).is_pass());
        let fake = SimEvent {
            time_ms: 80_000,
            kind: EventKind::AuthenticationSuccessful,
            actor: "ue".into(),
            origin: "mallory".into(),
            honest: false,
            pk: Some([7; 32]),
            digest: Some("00".repeat(8)),
            t_sign: Some(1),
        };
        trace.push(fake.clone());
        assert_eq!(assert_correspondence(&trace), Correspondence::Fail(fake));
    }

    #[test]
    fn replay_inside_window_breaks_injectivity() {
        // A verbatim relay within dt + skew is accepted by the protocol; the
        // correspondence check flags it as a second use of one signing.
        let mut sc = relay_delay();
        sc.name = "relay_fast".into();
        sc.script = bootstrap();
        sc.script.extend([
            broadcast(10, 1000),
            mallory(11, |a| Action::Capture { attacker: a }),
            deliver(12),
            mallory(500, |a| Action::Replay { attacker: a, capture: 0 }),
            deliver(501),
        ]);
        sc.expected = vec![Verdict::Accepted, Verdict::Accepted];
        let out = run(&sc);
        assert_eq!(out.attacker_acceptances(), 1);
        assert!(matches!(assert_correspondence(&out.trace), Correspondence::Fail(e) if e.time_ms == 501));
    }

    #[test]
    fn ue_policy_flag() {
        let mut sc = fbs_unsigned();
        let out = run(&sc);
        assert!(out.trace.iter().any(|e| e.kind == EventKind::KeepSearching));
        sc.policy = UePolicy::ConnectUnauthenticated;
        let out = run(&sc);
        assert!(out.trace.iter().any(|e| e.kind == EventKind::ConnectedUnauthenticated));
        assert!(!out.trace.iter().any(|e| e.kind == EventKind::KeepSearching));
    }

    #[test]
    fn unknown_actor_is_a_config_error() {
        let mut sc = honest();
        sc.script.push(step(700_000, Action::Deliver { ue: "ghost".into() }));
        assert!(matches!(run_scenario(&sc, 0), Err(Error::Config(_))));
        let mut sc = honest();
        sc.script.push(step(700_000, Action::Deliver { ue: "gnb".into() }));
        assert!(matches!(run_scenario(&sc, 0), Err(Error::Config(_))));
        let mut sc = honest();
        sc.script.push(step(1, Action::Deliver { ue: "ue".into() }));
        assert!(matches!(run_scenario(&sc, 0), Err(Error::Config(_))));
    }

    #[test]
    fn scripts_round_trip_through_text() {
        for sc in builtin_scenarios() {
            let text = sc.to_text();
            assert_eq!(Scenario::from_text(&text).unwrap(), sc, "{}", sc.name);
        }
        assert!(Scenario::from_text("scenario\tx\nstep\t0\tlaunch\tgnb\n").is_err());
        assert!(Scenario::from_text("step\t0\tdeliver\tue\n").is_err());
    }

    #[test]
    fn builtin_names_are_unique() {
        let names: HashSet<_> = builtin_scenarios().into_iter().map(|s| s.name).collect();
        assert_eq!(names.len(), builtin_scenarios().len());
        assert!(builtin("relay_delay").is_some());
        assert!(builtin("nope").is_none());
    }
}
