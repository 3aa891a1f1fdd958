//! Size, pairing-count and timing report.

use std::time::Instant;

use omsig::groups::{self, codec};
use omsig::oms::{self, OmsParams};
use omsig::sas::{self, SasChain, SharedParams};
use omsig::signature::SIGNATURE_LEN;
use rand_chacha::ChaCha20Rng;
use serde::Serialize;
use serde_json::json;

use crate::args::BenchArgs;
use crate::error::{CliError, CliResult};
use crate::{make_rng, Output};

#[derive(Clone, Debug, Serialize)]
pub struct BenchRow {
    pub scheme: String,
    pub n: usize,
    pub pk_bytes: usize,
    pub sig_bytes: usize,
    pub apk_bytes: Option<usize>,
    pub pairings_per_verify: u64,
    pub sign_us: f64,
    /// Ordered scheme: aggregation plus verification from the key list.
    pub verify_us: f64,
    pub kagg_us: Option<f64>,
    /// Mean over `k` verifications; the ordered scheme reuses one apk.
    pub amortized_verify_us: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct BenchReport {
    pub k: usize,
    pub rows: Vec<BenchRow>,
}

fn mean_us<T>(k: usize, mut f: impl FnMut() -> T) -> f64 {
    let start = Instant::now();
    for _ in 0..k {
        std::hint::black_box(f());
    }
    start.elapsed().as_secs_f64() * 1e6 / k as f64
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    v[v.len() / 2]
}

fn check(cond: bool, what: String) -> CliResult<()> {
    if cond {
        Ok(())
    } else {
        Err(CliError::reject("bench-assert", what))
    }
}

/// Pairings consumed by one call, read off the instrumented counter.
fn pairings_of(f: impl FnOnce() -> bool) -> (u64, bool) {
    let before = groups::pairing_count();
    let ok = f();
    (groups::pairing_count() - before, ok)
}

fn oms_row(pp: &OmsParams, n: usize, k: usize, rng: &mut ChaCha20Rng) -> CliResult<BenchRow> {
    let m = oms::encode(format!("bench {n}").as_bytes());
    let signers: Vec<_> = (0..n).map(|_| oms::keygen(pp, rng)).collect();
    let mut chain = oms::OmsChain::new(m);
    let start = Instant::now();
    for s in &signers {
        chain.append(pp, s, rng).map_err(|e| CliError::reject("bench-assert", e.to_string()))?;
    }
    let sign_us = start.elapsed().as_secs_f64() * 1e6 / n as f64;
    let sig = chain.sig.expect("n >= 1");
    let apk = chain.apk(pp).map_err(|e| CliError::reject("bench-assert", e.to_string()))?;

    let (pairings, ok) = pairings_of(|| oms::verify(pp, &apk, &m, &sig));
    check(ok, format!("oms n={n}: aggregate does not verify"))?;
    check(pairings == 3, format!("oms n={n}: {pairings} pairings per verify, expected 3"))?;
    let sig_bytes = sig.to_bytes().len();
    check(sig_bytes == 3 * codec::G1_LEN, format!("oms n={n}: |σ| = {sig_bytes}"))?;
    let apk_bytes = apk.to_bytes().len();
    check(apk_bytes == 2 * codec::G2_LEN, format!("oms n={n}: |apk| = {apk_bytes}"))?;

    let keys = &chain.keys;
    let kagg_us = mean_us(k, || oms::kagg(pp, keys));
    // Interleaved so drift on a busy host hits both columns alike.
    let mut fresh = Vec::with_capacity(k);
    let mut cached = Vec::with_capacity(k);
    for _ in 0..k {
        fresh.push(mean_us(1, || oms::verify_with_list(pp, keys, &m, &sig)));
        cached.push(mean_us(1, || oms::verify(pp, &apk, &m, &sig)));
    }
    let verify_us = fresh.iter().sum::<f64>() / k as f64;
    let amortized_verify_us = cached.iter().sum::<f64>() / k as f64;
    if n == 16 {
        let (f, c) = (median(&mut fresh), median(&mut cached));
        check(
            c < f,
            format!("oms n=16: median cached-apk verify {c:.1}µs not below fresh {f:.1}µs"),
        )?;
    }
    Ok(BenchRow {
        scheme: "oms".into(),
        n,
        pk_bytes: signers[0].pk.to_bytes().len(),
        sig_bytes,
        apk_bytes: Some(apk_bytes),
        pairings_per_verify: pairings,
        sign_us,
        verify_us,
        kagg_us: Some(kagg_us),
        amortized_verify_us,
    })
}

fn sas_row(pp: &SharedParams, n: usize, k: usize, rng: &mut ChaCha20Rng) -> CliResult<BenchRow> {
    let signers: Vec<_> = (0..n).map(|_| sas::keygen(pp, rng)).collect();
    let mut chain = SasChain::new();
    let start = Instant::now();
    for (i, s) in signers.iter().enumerate() {
        let m = (0..pp.ell)
            .map(|j| groups::encode_message(format!("bench {i} {j}").as_bytes(), groups::SAS_TAG))
            .collect();
        chain.append(pp, s, m, rng).map_err(|e| CliError::reject("bench-assert", e.to_string()))?;
    }
    let sign_us = start.elapsed().as_secs_f64() * 1e6 / n as f64;
    let sig = chain.sig.expect("n >= 1");
    let name = format!("sas(ℓ={})", pp.ell);

    let (pairings, ok) = pairings_of(|| sas::verify(pp, &chain.keys, &chain.msgs, &sig));
    check(ok, format!("{name} n={n}: aggregate does not verify"))?;
    check(pairings == 3, format!("{name} n={n}: {pairings} pairings per verify, expected 3"))?;
    let sig_bytes = sig.to_bytes().len();
    check(sig_bytes == SIGNATURE_LEN, format!("{name} n={n}: |σ| = {sig_bytes}"))?;
    let pk_bytes = signers[0].pk.to_bytes().len();
    check(pk_bytes == pp.ell * codec::G2_LEN, format!("{name}: |pk| = {pk_bytes}"))?;

    let verify_us = mean_us(k, || sas::verify(pp, &chain.keys, &chain.msgs, &sig));
    Ok(BenchRow {
        scheme: name,
        n,
        pk_bytes,
        sig_bytes,
        apk_bytes: None,
        pairings_per_verify: pairings,
        sign_us,
        verify_us,
        kagg_us: None,
        amortized_verify_us: verify_us,
    })
}

pub fn report(n_list: &[usize], k: usize, rng: &mut ChaCha20Rng) -> CliResult<BenchReport> {
    if k == 0 {
        return Err(CliError::usage("bench", "-k must be positive"));
    }
    if n_list.is_empty() || n_list.contains(&0) {
        return Err(CliError::usage("bench", "chain lengths must be positive"));
    }
    let oms_pp = OmsParams::setup(rng);
    let sas_pp: Vec<SharedParams> = [1, 2]
        .iter()
        .map(|&ell| SharedParams::setup(ell, rng).expect("ℓ > 0"))
        .collect();
    let mut rows = Vec::new();
    for &n in n_list {
        rows.push(oms_row(&oms_pp, n, k, rng)?);
        for pp in &sas_pp {
            rows.push(sas_row(pp, n, k, rng)?);
        }
    }
    Ok(BenchReport { k, rows })
}

pub(crate) fn run(a: BenchArgs, out: &Output) -> CliResult<()> {
    let r = report(&a.n, a.k, &mut make_rng(a.seed))?;
    let mut lines = vec![format!(
        "{:<10} {:>4} {:>6} {:>6} {:>6} {:>3} {:>10} {:>10} {:>10} {:>12}",
        "scheme", "n", "|pk|", "|σ|", "|apk|", "#P", "sign µs", "verify µs", "kagg µs", "amortized µs"
    )];
    let opt = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:.1}"));
    for row in &r.rows {
        lines.push(format!(
            "{:<10} {:>4} {:>6} {:>6} {:>6} {:>3} {:>10.1} {:>10.1} {:>10} {:>12.1}",
            row.scheme,
            row.n,
            row.pk_bytes,
            row.sig_bytes,
            row.apk_bytes.map_or("-".to_string(), |b| b.to_string()),
            row.pairings_per_verify,
            row.sign_us,
            row.verify_us,
            opt(row.kagg_us),
            row.amortized_verify_us
        ));
    }
    out.emit(json!(r), lines.join("\n"));
    Ok(())
}
