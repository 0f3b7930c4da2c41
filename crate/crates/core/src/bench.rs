//! Sign/verify timing for E2IBS against the Schnorr baselines.
//!
//! Every scheme signs and verifies the same messages on Ristretto255. Each
//! iteration is timed individually; reports carry medians with the median
//! absolute deviation. Signing time includes drawing the nonce for every
//! scheme. One iteration in [`SAMPLE_EVERY`] is also checked for correctness
//! (the signature verifies, a one-bit message change does not) so a fast but
//! broken implementation cannot produce a clean report.

use std::fmt;
use std::hint::black_box;
use std::str::FromStr;
use std::time::Instant;

use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};

use crate::baseline::{Hier2, Schnorr, SchnorrKey};
use crate::e2ibs::{E2ibs, MasterKeyMaterial, SetupOptions, SIGNATURE_LEN};
use crate::error::{Error, Result};
use crate::group::{Group, Ristretto, ENCODED_LEN};
use crate::protocol::{IDENTITY_LEN, PAYLOAD_LEN};

pub const WARMUP: usize = 100;
pub const MIN_ITERS: usize = 1000;
pub const SAMPLE_EVERY: usize = 100;
const MESSAGE_LEN: usize = 96;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SchemeKind {
    E2ibs,
    SchnorrPlain,
    Hier2,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 3] = [SchemeKind::E2ibs, SchemeKind::SchnorrPlain, SchemeKind::Hier2];

    pub fn as_str(self) -> &'static str {
        match self {
            SchemeKind::E2ibs => "e2ibs",
            SchemeKind::SchnorrPlain => "schnorr-plain",
            SchemeKind::Hier2 => "hier2",
        }
    }

    /// `"all"` expands to every scheme.
    pub fn parse_list(s: &str) -> Result<Vec<SchemeKind>> {
        if s == "all" {
            return Ok(Self::ALL.to_vec());
        }
        s.split(',').map(str::parse).collect()
    }
}

impl FromStr for SchemeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::Usage(format!("unknown scheme {s:?}; expected e2ibs, schnorr-plain, hier2 or all")))
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BenchConfig {
    pub iters: usize,
    pub t: u32,
    pub k: u32,
    pub seed: u64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self { iters: 10_000, t: crate::e2ibs::DEFAULT_T, k: crate::e2ibs::DEFAULT_K, seed: 0 }
    }
}

/// Median and median absolute deviation, in nanoseconds.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Stat {
    pub median_ns: f64,
    pub mad_ns: f64,
}

impl Stat {
    pub fn from_samples(samples: &[u64]) -> Self {
        if samples.is_empty() {
            return Self::default();
        }
        let mut v: Vec<f64> = samples.iter().map(|&x| x as f64).collect();
        let median_ns = median(&mut v);
        let mut dev: Vec<f64> = v.iter().map(|x| (x - median_ns).abs()).collect();
        Self { median_ns, mad_ns: median(&mut dev) }
    }
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchReport {
    pub scheme: SchemeKind,
    pub iters: usize,
    pub sign: Stat,
    pub verify: Stat,
    /// Sign plus verify, timed per iteration.
    pub e2e: Stat,
    pub sig_bytes: usize,
    pub pk_bytes: usize,
    /// Broadcast overhead; `None` for the bare baseline.
    pub payload_bytes: Option<usize>,
    pub extract_per_sec: Option<f64>,
    pub samples: u64,
    pub sample_failures: u64,
}

impl BenchReport {
    pub fn correct(&self) -> bool {
        self.sample_failures == 0 && self.samples > 0
    }
}

struct Timings {
    sign: Vec<u64>,
    verify: Vec<u64>,
    e2e: Vec<u64>,
    samples: u64,
    failures: u64,
}

/// Runs `WARMUP + iters` iterations of `step(m, rng, sampled)`, which signs
/// and verifies `m` and returns `(sign_ns, verify_ns, good)`. On sampled
/// iterations `good` must reflect the correctness check.
fn drive(
    cfg: &BenchConfig,
    rng: &mut ChaCha20Rng,
    mut step: impl FnMut(&[u8], &mut ChaCha20Rng, bool) -> (u64, u64, bool),
) -> Timings {
    let mut out = Timings {
        sign: Vec::with_capacity(cfg.iters),
        verify: Vec::with_capacity(cfg.iters),
        e2e: Vec::with_capacity(cfg.iters),
        samples: 0,
        failures: 0,
    };
    let mut m = [0u8; MESSAGE_LEN];
    for i in 0..WARMUP + cfg.iters {
        rng.fill_bytes(&mut m);
        let sampled = i >= WARMUP && (i - WARMUP).is_multiple_of(SAMPLE_EVERY);
        let (s, v, ok) = step(&m, rng, sampled);
        if i < WARMUP {
            continue;
        }
        out.sign.push(s);
        out.verify.push(v);
        out.e2e.push(s + v);
        if sampled {
            out.samples += 1;
            if !ok {
                out.failures += 1;
            }
        }
    }
    out
}

fn elapsed_ns(since: Instant) -> u64 {
    since.elapsed().as_nanos() as u64
}

fn flip(m: &[u8]) -> Vec<u8> {
    let mut v = m.to_vec();
    v[0] ^= 0x01;
    v
}

pub fn bench_scheme(kind: SchemeKind, cfg: &BenchConfig) -> Result<BenchReport> {
    if cfg.iters < MIN_ITERS {
        return Err(Error::Usage(format!("iters must be at least {MIN_ITERS}")));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed);
    let g = Ristretto;
    let (timings, sig_bytes, pk_bytes, payload_bytes, extract_per_sec) = match kind {
        SchemeKind::E2ibs => {
            let scheme = E2ibs::new(g);
            let master = scheme.setup(&mut rng, cfg.t, cfg.k, SetupOptions::default().with_cache())?;
            let identity = [0x5Au8; IDENTITY_LEN];
            let key = scheme.extract(&master, &identity, None)?;
            let mpk = master.mpk();
            let t = drive(cfg, &mut rng, |m, rng, sampled| {
                let t0 = Instant::now();
                let mut nonce = scheme.precompute_nonce(rng);
                let sig = scheme.sign(m, &key, &mut nonce).expect("fresh nonce");
                let sign_ns = elapsed_ns(t0);
                let t1 = Instant::now();
                let ok = black_box(scheme.verify(mpk, &identity, None, key.commitment(), m, &sig)).is_valid();
                let verify_ns = elapsed_ns(t1);
                let good = !sampled
                    || (ok && !scheme.verify(mpk, &identity, None, key.commitment(), &flip(m), &sig).is_valid());
                (sign_ns, verify_ns, good)
            });
            let rate = bench_extraction(&scheme, &master, cfg.iters.min(10_000), cfg.seed)?;
            (t, SIGNATURE_LEN, ENCODED_LEN, Some(PAYLOAD_LEN), Some(rate))
        }
        SchemeKind::SchnorrPlain => {
            let scheme = Schnorr::new(g);
            let key = SchnorrKey::generate(&g, &mut rng);
            let t = drive(cfg, &mut rng, |m, rng, sampled| {
                let t0 = Instant::now();
                let sig = scheme.sign(rng, &key, m);
                let sign_ns = elapsed_ns(t0);
                let t1 = Instant::now();
                let ok = black_box(scheme.verify(key.public(), m, &sig));
                let verify_ns = elapsed_ns(t1);
                let good = !sampled || (ok && !scheme.verify(key.public(), &flip(m), &sig));
                (sign_ns, verify_ns, good)
            });
            (t, SIGNATURE_LEN, ENCODED_LEN, None, None)
        }
        SchemeKind::Hier2 => {
            let scheme = Hier2::new(g);
            let root = SchnorrKey::generate(&g, &mut rng);
            let bs = SchnorrKey::generate(&g, &mut rng);
            let subject = [0x5Au8; IDENTITY_LEN];
            let cert = scheme.certify(&mut rng, &root, &subject, bs.public());
            let t = drive(cfg, &mut rng, |m, rng, sampled| {
                let t0 = Instant::now();
                let sig = scheme.sign(rng, &bs, m);
                let sign_ns = elapsed_ns(t0);
                let t1 = Instant::now();
                let ok = black_box(scheme.verify(root.public(), &cert, m, &sig));
                let verify_ns = elapsed_ns(t1);
                let good = !sampled || (ok && !scheme.verify(root.public(), &cert, &flip(m), &sig));
                (sign_ns, verify_ns, good)
            });
            // The broadcast also carries the certificate: its signature and
            // the subject identity, next to the same timestamp fields.
            let payload = 2 * SIGNATURE_LEN + ENCODED_LEN + IDENTITY_LEN + 6;
            (t, SIGNATURE_LEN, ENCODED_LEN, Some(payload), None)
        }
    };
    Ok(BenchReport {
        scheme: kind,
        iters: cfg.iters,
        sign: Stat::from_samples(&timings.sign),
        verify: Stat::from_samples(&timings.verify),
        e2e: Stat::from_samples(&timings.e2e),
        sig_bytes,
        pk_bytes,
        payload_bytes,
        extract_per_sec,
        samples: timings.samples,
        sample_failures: timings.failures,
    })
}

/// Random identities for extraction benchmarks, fixed by `seed`.
pub fn extraction_identities(n: usize, seed: u64) -> Vec<[u8; IDENTITY_LEN]> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed ^ 0xE7);
    (0..n)
        .map(|_| {
            let mut id = [0u8; IDENTITY_LEN];
            rng.fill_bytes(&mut id);
            id
        })
        .collect()
}

/// Key extractions per second over `iters` random identities. Uses the
/// master's secret cache when present.
pub fn bench_extraction<G: Group>(
    scheme: &E2ibs<G>,
    master: &MasterKeyMaterial<G>,
    iters: usize,
    seed: u64,
) -> Result<f64> {
    if iters == 0 {
        return Err(Error::Usage("iters must be positive".into()));
    }
    let ids = extraction_identities(iters, seed);
    let start = Instant::now();
    for id in &ids {
        black_box(scheme.extract(master, id, None)?);
    }
    Ok(iters as f64 / start.elapsed().as_secs_f64())
}

/// Throughput with the secret cache and without it, on the same identities.
pub fn extraction_ab<G: Group + Clone>(
    scheme: &E2ibs<G>,
    master: &MasterKeyMaterial<G>,
    iters: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    let cached = if master.has_cache() {
        master.clone()
    } else {
        scheme.master_from_secret(*master.msk(), &master.params(), true)?
    };
    let mut uncached = cached.clone();
    uncached.drop_cache();
    Ok((
        bench_extraction(scheme, &cached, iters, seed)?,
        bench_extraction(scheme, &uncached, iters, seed)?,
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableFormat {
    Csv,
    Text,
}

pub const CSV_HEADER: [&str; 14] = [
    "scheme",
    "iters",
    "sign_median_ns",
    "sign_mad_ns",
    "verify_median_ns",
    "verify_mad_ns",
    "e2e_median_ns",
    "e2e_mad_ns",
    "sig_bytes",
    "pk_bytes",
    "payload_bytes",
    "extract_per_sec",
    "samples",
    "sample_failures",
];

fn row(r: &BenchReport) -> [String; 14] {
    let opt = |v: Option<String>| v.unwrap_or_else(|| "-".into());
    [
        r.scheme.to_string(),
        r.iters.to_string(),
        format!("{:.0}", r.sign.median_ns),
        format!("{:.0}", r.sign.mad_ns),
        format!("{:.0}", r.verify.median_ns),
        format!("{:.0}", r.verify.mad_ns),
        format!("{:.0}", r.e2e.median_ns),
        format!("{:.0}", r.e2e.mad_ns),
        r.sig_bytes.to_string(),
        r.pk_bytes.to_string(),
        opt(r.payload_bytes.map(|b| b.to_string())),
        opt(r.extract_per_sec.map(|x| format!("{x:.0}"))),
        r.samples.to_string(),
        r.sample_failures.to_string(),
    ]
}

pub fn emit_table(reports: &[BenchReport], format: TableFormat) -> Result<String> {
    match format {
        TableFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let io = |e: csv::Error| Error::MalformedInput(e.to_string());
            w.write_record(CSV_HEADER).map_err(io)?;
            for r in reports {
                w.write_record(row(r)).map_err(io)?;
            }
            let bytes = w.into_inner().map_err(|e| Error::MalformedInput(e.to_string()))?;
            Ok(String::from_utf8(bytes).expect("CSV of ASCII fields"))
        }
        TableFormat::Text => {
            let rows: Vec<[String; 14]> = reports.iter().map(row).collect();
            let mut widths: Vec<usize> = CSV_HEADER.iter().map(|h| h.len()).collect();
            for r in &rows {
                for (w, cell) in widths.iter_mut().zip(r) {
                    *w = (*w).max(cell.len());
                }
            }
            let mut out = String::new();
            let mut line = |cells: &mut dyn Iterator<Item = &str>| {
                let padded: Vec<String> = cells.zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect();
                out.push_str(padded.join("  ").trim_end());
                out.push('\n');
            };
            line(&mut CSV_HEADER.iter().copied());
            for r in &rows {
                line(&mut r.iter().map(String::as_str));
            }
            Ok(out)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{Counting, ToyGroup};

    fn quick(kind: SchemeKind) -> BenchReport {
        bench_scheme(kind, &BenchConfig { iters: MIN_ITERS, ..Default::default() }).unwrap()
    }

    #[test]
    fn stat_median_and_mad() {
        let s = Stat::from_samples(&[1, 2, 3, 4, 100]);
        assert_eq!(s.median_ns, 3.0);
        assert_eq!(s.mad_ns, 1.0);
        assert_eq!(Stat::from_samples(&[4, 1, 3, 2]).median_ns, 2.5);
        assert_eq!(Stat::from_samples(&[]), Stat::default());
    }

    #[test]
    fn scheme_names() {
        assert_eq!(SchemeKind::parse_list("all").unwrap().len(), 3);
        assert_eq!(SchemeKind::parse_list("hier2,e2ibs").unwrap(), [SchemeKind::Hier2, SchemeKind::E2ibs]);
        assert!(matches!("bls".parse::<SchemeKind>(), Err(Error::Usage(_))));
    }

    #[test]
    fn too_few_iterations_rejected() {
        let cfg = BenchConfig { iters: 999, ..Default::default() };
        assert!(matches!(bench_scheme(SchemeKind::E2ibs, &cfg), Err(Error::Usage(_))));
    }

    #[test]
    fn e2ibs_report_shape() {
        let r = quick(SchemeKind::E2ibs);
        assert_eq!((r.sig_bytes, r.pk_bytes, r.payload_bytes), (64, 32, Some(111)));
        assert_eq!(r.samples, (MIN_ITERS / SAMPLE_EVERY) as u64);
        assert!(r.correct());
        assert!(r.extract_per_sec.unwrap() > 0.0);
        assert!(r.e2e.median_ns >= r.verify.median_ns);
    }

    #[test]
    fn table_formats() {
        let reports = [quick(SchemeKind::SchnorrPlain), quick(SchemeKind::Hier2)];
        let csv = emit_table(&reports, TableFormat::Csv).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0], CSV_HEADER.join(","));
        assert!(lines.iter().all(|l| l.split(',').count() == CSV_HEADER.len()));
        let again = emit_table(&reports[..1], TableFormat::Csv).unwrap();
        assert_eq!(again.lines().next(), Some(lines[0]));
        assert_eq!(again.lines().count(), 2);

        let text = emit_table(&reports, TableFormat::Text).unwrap();
        assert_eq!(text.lines().count(), 3);
        assert!(text.contains("schnorr-plain") && text.contains("hier2"));
    }

    #[test]
    fn extraction_is_one_mult_and_cache_helps() {
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        let counting = E2ibs::new(Counting::new(Ristretto));
        let master = counting.setup(&mut rng, 1024, 18, SetupOptions::default().with_cache()).unwrap();
        let (_, ops) = counting.group().measure(|| bench_extraction(&counting, &master, 50, 1).unwrap());
        assert_eq!(ops.scalar_mults, 50);

        let scheme = E2ibs::new(Ristretto);
        let master = scheme.setup(&mut rng, 1024, 18, SetupOptions::default()).unwrap();
        let (cached, uncached) = extraction_ab(&scheme, &master, 2000, 9).unwrap();
        assert!(cached >= uncached, "cached {cached:.0}/s < uncached {uncached:.0}/s");
        assert_eq!(extraction_identities(5, 3), extraction_identities(5, 3));
        assert_ne!(extraction_identities(5, 3), extraction_identities(5, 4));
    }

    #[test]
    fn toy_backend_extraction_runs() {
        let g = ToyGroup::new(9973).unwrap();
        let scheme = E2ibs::new(g);
        let master = scheme
            .setup(&mut ChaCha20Rng::seed_from_u64(0), 64, 4, SetupOptions::insecure())
            .unwrap();
        assert!(bench_extraction(&scheme, &master, 10, 0).unwrap() > 0.0);
    }
}
