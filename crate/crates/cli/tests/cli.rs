use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn omsig(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_omsig"))
        .args(args)
        .output()
        .expect("spawn omsig")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited")
}

fn ok(args: &[&str]) -> Output {
    let o = omsig(args);
    assert_eq!(code(&o), 0, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    o
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("json stdout")
}

fn stderr_tag(o: &Output) -> String {
    let s = String::from_utf8_lossy(&o.stderr);
    let start = s.find("error[").expect("tagged error") + 6;
    s[start..start + s[start..].find(']').unwrap()].to_string()
}

struct Fixture {
    dir: TempDir,
}

impl Fixture {
    fn new() -> Self {
        let f = Fixture {
            dir: tempfile::tempdir().unwrap(),
        };
        ok(&["setup", "--out", &f.s("pp.bin"), "--seed", "1"]);
        f
    }

    fn p(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn s(&self, name: &str) -> String {
        self.p(name).to_string_lossy().into_owned()
    }

    fn keygen(&self, i: usize, register: bool) -> String {
        let key = format!("k{i}.key");
        let seed = (100 + i).to_string();
        ok(&["oms", "keygen", "--pp", &self.s("pp.bin"), "--out", &self.s(&key), "--seed", &seed]);
        if register {
            ok(&["oms", "register", "--pp", &self.s("pp.bin"), "--key", &self.s(&key), "--registry", &self.s("reg.json")]);
        }
        key
    }

    fn append(&self, key: &str, list: &str, sig: &str, msg: &str) -> Output {
        omsig(&[
            "oms", "append", "--pp", &self.s("pp.bin"), "--key", &self.s(key), "--list", &self.s(list), "--sig",
            &self.s(sig), "--msg", msg, "--pos-auto",
        ])
    }
}

#[test]
fn happy_path_exits_zero() {
    let f = Fixture::new();
    let keys: Vec<_> = (1..=3).map(|i| f.keygen(i, true)).collect();
    for (i, k) in keys.iter().enumerate() {
        let o = f.append(k, "list.json", "sig.bin", "packet");
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        assert!(String::from_utf8_lossy(&o.stdout).contains(&format!("position {}", i + 1)));
    }
    let o = ok(&["--json", "oms", "kagg", "--pp", &f.s("pp.bin"), "--list", &f.s("list.json"), "--out", &f.s("apk.bin")]);
    assert_eq!(json(&o)["bytes"], 192);
    let o = ok(&[
        "--json", "oms", "verify", "--pp", &f.s("pp.bin"), "--apk", &f.s("apk.bin"), "--sig", &f.s("sig.bin"), "--msg",
        "packet",
    ]);
    assert_eq!(json(&o)["valid"], true);
    ok(&[
        "oms", "verify", "--pp", &f.s("pp.bin"), "--list", &f.s("list.json"), "--registry", &f.s("reg.json"), "--sig",
        &f.s("sig.bin"), "--msg", "packet",
    ]);
}

#[test]
fn permuted_list_apk_exits_one() {
    let f = Fixture::new();
    let keys: Vec<_> = (1..=3).map(|i| f.keygen(i, true)).collect();
    for k in &keys {
        assert_eq!(code(&f.append(k, "list.json", "sig.bin", "packet")), 0);
    }
    let mut list: Vec<String> = serde_json::from_slice(&std::fs::read(f.p("list.json")).unwrap()).unwrap();
    list.swap(0, 2);
    std::fs::write(f.p("perm.json"), serde_json::to_vec(&list).unwrap()).unwrap();
    ok(&["oms", "kagg", "--pp", &f.s("pp.bin"), "--list", &f.s("perm.json"), "--out", &f.s("perm.apk")]);
    let o = omsig(&[
        "oms", "verify", "--pp", &f.s("pp.bin"), "--apk", &f.s("perm.apk"), "--sig", &f.s("sig.bin"), "--msg", "packet",
    ]);
    assert_eq!(code(&o), 1);
    assert_eq!(stderr_tag(&o), "invalid");
}

#[test]
fn explicit_position_is_a_usage_error() {
    let f = Fixture::new();
    let keys: Vec<_> = (1..=3).map(|i| f.keygen(i, true)).collect();
    for k in &keys[..2] {
        assert_eq!(code(&f.append(k, "list.json", "sig.bin", "packet")), 0);
    }
    let before = std::fs::read(f.p("sig.bin")).unwrap();
    let o = omsig(&[
        "oms", "append", "--pp", &f.s("pp.bin"), "--key", &f.s(&keys[2]), "--list", &f.s("list.json"), "--sig",
        &f.s("sig.bin"), "--msg", "packet", "--pos", "7",
    ]);
    assert_eq!(code(&o), 2);
    assert_eq!(stderr_tag(&o), "pos-flag");
    assert_eq!(std::fs::read(f.p("sig.bin")).unwrap(), before);
}

#[test]
fn resigning_and_wrong_message_are_rejected() {
    let f = Fixture::new();
    let k = f.keygen(1, true);
    assert_eq!(code(&f.append(&k, "list.json", "sig.bin", "packet")), 0);
    let o = f.append(&k, "list.json", "sig.bin", "packet");
    assert_eq!((code(&o), stderr_tag(&o)), (1, "already-signed".into()));
    let k2 = f.keygen(2, true);
    let o = f.append(&k2, "list.json", "sig.bin", "other packet");
    assert_eq!((code(&o), stderr_tag(&o)), (1, "prior-invalid".into()));
}

#[test]
fn decode_failures_exit_three() {
    let f = Fixture::new();
    let k = f.keygen(1, false);
    let mut pp = std::fs::read(f.p("pp.bin")).unwrap();
    pp[0] ^= 1;
    std::fs::write(f.p("bad_pp.bin"), &pp).unwrap();
    let o = omsig(&["oms", "keygen", "--pp", &f.s("bad_pp.bin"), "--out", &f.s("x.key")]);
    assert_eq!((code(&o), stderr_tag(&o)), (3, "bad-header".into()));

    let mut pp = std::fs::read(f.p("pp.bin")).unwrap();
    pp.truncate(pp.len() - 1);
    std::fs::write(f.p("short_pp.bin"), &pp).unwrap();
    let o = omsig(&["oms", "keygen", "--pp", &f.s("short_pp.bin"), "--out", &f.s("x.key")]);
    assert_eq!((code(&o), stderr_tag(&o)), (3, "bad-length".into()));

    // A key file where an aggregate is expected.
    let o = omsig(&["oms", "verify", "--pp", &f.s("pp.bin"), "--apk", &f.s(&k), "--sig", &f.s(&k), "--msg", "x"]);
    assert_eq!(code(&o), 3);

    let o = omsig(&[
        "oms", "verify", "--pp", &f.s("pp.bin"), "--apk", &f.s(&k), "--sig", &f.s(&k), "--msg", "0x00", "--raw-scalar",
    ]);
    assert_eq!(code(&o), 3);
}

#[test]
fn usage_errors_exit_two() {
    let f = Fixture::new();
    let o = omsig(&["oms", "verify", "--pp", &f.s("pp.bin"), "--sig", &f.s("sig.bin"), "--msg", "x"]);
    assert_eq!(code(&o), 2);
    let o = omsig(&["oms", "keygen", "--pp", &f.s("missing.bin"), "--out", &f.s("x.key")]);
    assert_eq!((code(&o), stderr_tag(&o)), (2, "io".into()));
    let o = omsig(&["harness", "run", "--strategy", "nonsense"]);
    assert_eq!((code(&o), stderr_tag(&o)), (2, "strategy".into()));
}

#[test]
fn oms_commands_refuse_vector_parameters() {
    let f = Fixture::new();
    ok(&["setup", "--ell", "3", "--out", &f.s("pp3.bin")]);
    let o = omsig(&["oms", "keygen", "--pp", &f.s("pp3.bin"), "--out", &f.s("x.key")]);
    assert_eq!(code(&o), 3);
}

fn write_manifest(f: &Fixture, keys: &[String]) {
    let routers: Vec<Value> = keys
        .iter()
        .enumerate()
        .map(|(i, k)| serde_json::json!({"id": format!("r{i}"), "key": k}))
        .collect();
    let m = serde_json::json!({"routers": routers, "report": "out/report.json"});
    std::fs::write(f.p("path.json"), m.to_string()).unwrap();
    std::fs::write(f.p("packet.bin"), b"\x45\x00\x00\x54 payload").unwrap();
}

fn attest(f: &Fixture) -> Output {
    omsig(&[
        "--json", "oms", "attest-path", "--pp", &f.s("pp.bin"), "--topology", &f.s("path.json"), "--message",
        &f.s("packet.bin"), "--registry", &f.s("reg.json"), "--out-dir", &f.s("out"), "--cache-dir", &f.s("cache"),
    ])
}

#[test]
fn attest_path_verifies_every_prefix_and_caches() {
    let f = Fixture::new();
    let keys: Vec<_> = (1..=5).map(|i| f.keygen(i, true)).collect();
    write_manifest(&f, &keys);
    let o = attest(&f);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let report: Vec<Value> = serde_json::from_slice(&std::fs::read(f.p("out/report.json")).unwrap()).unwrap();
    assert_eq!(report.len(), 5);
    assert!(report.iter().all(|r| r["valid"] == true));

    let verify = || {
        ok(&[
            "--json", "oms", "verify", "--pp", &f.s("pp.bin"), "--list", &f.s("out/list.json"), "--cache-dir",
            &f.s("cache"), "--sig", &f.s("out/sig.bin"), "--msg-file", &f.s("packet.bin"),
        ])
    };
    let first = json(&verify())["cache"].clone();
    let second = json(&verify())["cache"].clone();
    assert_eq!(first["outcome"], "hit");
    assert_eq!(second["outcome"], "hit");
    assert_eq!(second["hits"].as_u64().unwrap(), first["hits"].as_u64().unwrap() + 1);
    assert_eq!(second["misses"], first["misses"]);
    ok(&[
        "oms", "verify", "--pp", &f.s("pp.bin"), "--apk", &f.s("out/apk.bin"), "--sig", &f.s("out/sig.bin"),
        "--msg-file", &f.s("packet.bin"),
    ]);
}

#[test]
fn attest_path_refuses_duplicate_router_key() {
    let f = Fixture::new();
    let mut keys: Vec<_> = (1..=3).map(|i| f.keygen(i, true)).collect();
    keys.push(keys[1].clone());
    write_manifest(&f, &keys);
    let o = attest(&f);
    assert_eq!((code(&o), stderr_tag(&o)), (1, "duplicate".into()));
    assert!(!f.p("out/sig.bin").exists());
}

#[test]
fn attest_path_requires_registration() {
    let f = Fixture::new();
    let mut keys: Vec<_> = (1..=2).map(|i| f.keygen(i, true)).collect();
    keys.push(f.keygen(3, false));
    write_manifest(&f, &keys);
    let o = attest(&f);
    assert_eq!((code(&o), stderr_tag(&o)), (1, "unregistered".into()));
}

#[test]
fn sas_chain_round_trip() {
    let f = Fixture::new();
    ok(&["setup", "--ell", "3", "--out", &f.s("sas.pp"), "--seed", "2"]);
    for i in 0..3 {
        let key = format!("s{i}.key");
        ok(&["sas", "keygen", "--pp", &f.s("sas.pp"), "--out", &f.s(&key)]);
        ok(&["sas", "register", "--pp", &f.s("sas.pp"), "--key", &f.s(&key), "--registry", &f.s("sreg.json")]);
        let msg = format!("hop {i}");
        ok(&["sas", "append", "--pp", &f.s("sas.pp"), "--key", &f.s(&key), "--chain", &f.s("chain.bin"), "--msg", &msg]);
    }
    let o = ok(&["--json", "sas", "verify", "--pp", &f.s("sas.pp"), "--chain", &f.s("chain.bin"), "--registry", &f.s("sreg.json")]);
    assert_eq!(json(&o)["n"], 3);

    let o = omsig(&[
        "sas", "append", "--pp", &f.s("sas.pp"), "--key", &f.s("s0.key"), "--chain", &f.s("chain.bin"), "--msg", "x",
    ]);
    assert_eq!((code(&o), stderr_tag(&o)), (1, "duplicate".into()));
    ok(&["sas", "keygen", "--pp", &f.s("sas.pp"), "--out", &f.s("z.key")]);
    let o = omsig(&[
        "sas", "append", "--pp", &f.s("sas.pp"), "--key", &f.s("z.key"), "--chain", &f.s("chain.bin"), "--raw-scalar",
        "--msg", "0", "--msg", "0", "--msg", "0",
    ]);
    assert_eq!((code(&o), stderr_tag(&o)), (1, "zero-message".into()));
}

#[test]
fn harness_run_reports_losing_adversaries() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.json");
    for scheme in ["sas", "oms"] {
        for strategy in ["honest-replay", "order-transposition", "unregistered-cosigner", "message-substitution"] {
            let o = ok(&[
                "--json", "harness", "run", "--scheme", scheme, "--strategy", strategy, "--seed", "3", "--out",
                out.to_str().unwrap(),
            ]);
            let v = json(&o);
            assert_eq!(v["adversary_wins"], false, "{scheme}/{strategy}");
            assert!(!v["audit"].as_array().unwrap().is_empty());
            let t: Value = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
            assert_eq!(t["strategy"], strategy);
        }
    }
    let o = omsig(&["harness", "run", "--scheme", "ds", "--strategy", "unregistered-cosigner"]);
    assert_eq!((code(&o), stderr_tag(&o)), (2, "unsupported".into()));
}

#[test]
fn bench_asserts_sizes_and_pairings() {
    let o = ok(&["--json", "bench", "--n", "1,2", "-k", "2", "--seed", "4"]);
    let v = json(&o);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 6);
    for r in rows {
        assert_eq!(r["sig_bytes"], 144);
        assert_eq!(r["pairings_per_verify"], 3);
    }
    let oms: Vec<_> = rows.iter().filter(|r| r["scheme"] == "oms").collect();
    assert!(oms.iter().all(|r| r["apk_bytes"] == 192 && r["pk_bytes"] == 192));
}
