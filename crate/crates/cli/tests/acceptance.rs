//! Acceptance checks for the `ffla` binary. Prints one `[PASS]` or `[FAIL]`
//! line per criterion and exits non-zero if any fails.

use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode, Output};
use std::time::Instant;

use ffla_core::matrix::io::{parse_matrix, write_sparse};
use ffla_core::matrix::sparse_corpus;
use ffla_core::{MatrixFormat, PrimeField};
use serde_json::Value;

type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

const P: u64 = 2_147_483_647;

fn ffla(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ffla"))
        .args(args)
        .output()
        .expect("spawn ffla")
}

fn path(p: &Path) -> &str {
    p.to_str().expect("utf-8 temp path")
}

fn json_result(args: &[&str]) -> Result<Value, String> {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let out = ffla(&all);
    ensure!(
        out.status.code() == Some(0),
        "`ffla {}` exited with {:?}: {}",
        args.join(" "),
        out.status.code(),
        String::from_utf8_lossy(&out.stdout)
    );
    let v: Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    Ok(v["result"].clone())
}

fn write_corpus(dir: &Path, count: usize) -> Vec<PathBuf> {
    let f = PrimeField::classic(P).unwrap();
    sparse_corpus(f, count, 20, 200, 0xc11)
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let p = dir.join(format!("m{i:02}.sms"));
            let mut buf = Vec::new();
            write_sparse(a, MatrixFormat::Sms, &mut buf).unwrap();
            fs::write(&p, buf).unwrap();
            p
        })
        .collect()
}

fn round_trips(dir: &Path, corpus: &[PathBuf]) -> Check {
    let f = PrimeField::classic(P).unwrap();
    for (i, sms) in corpus.iter().enumerate() {
        let mtx = dir.join(format!("rt{i}.mtx"));
        let back = dir.join(format!("rt{i}.sms"));
        let out = ffla(&[
            "convert",
            "--field",
            "2147483647",
            "--to",
            "mtx",
            path(sms),
            "--out",
            path(&mtx),
        ]);
        ensure!(out.status.success(), "convert to mtx failed for {}", sms.display());
        let out = ffla(&[
            "convert",
            "--field",
            "2147483647",
            "--to",
            "sms",
            path(&mtx),
            "--out",
            path(&back),
        ]);
        ensure!(out.status.success(), "convert back to sms failed");
        let (a, b) = (fs::read(sms).unwrap(), fs::read(&back).unwrap());
        ensure!(a == b, "SMS round trip of matrix {i} is not byte-identical");
        let m1 = parse_matrix(&String::from_utf8_lossy(&a), None, f).map_err(|e| e.to_string())?;
        let m2 = parse_matrix(&fs::read_to_string(&mtx).unwrap(), None, f).map_err(|e| e.to_string())?;
        ensure!(
            m1.to_sparse() == m2.to_sparse(),
            "MatrixMarket copy of matrix {i} differs"
        );
        let again = dir.join(format!("rt{i}b.mtx"));
        let out = ffla(&[
            "convert",
            "--field",
            "2147483647",
            "--to",
            "mtx",
            path(&back),
            "--out",
            path(&again),
        ]);
        ensure!(out.status.success(), "second conversion failed");
        ensure!(
            fs::read(&mtx).unwrap() == fs::read(&again).unwrap(),
            "MatrixMarket round trip of matrix {i} drifted"
        );
    }
    Ok(format!(
        "{} matrices SMS -> MatrixMarket -> SMS byte-identical",
        corpus.len()
    ))
}

fn reproducible(dir: &Path, corpus: &[PathBuf]) -> Check {
    let a = path(&corpus[3]);
    let dense = dir.join("A.txt");
    fs::write(&dense, "3 3\n2 1 0\n1 3 1\n0 1 4\n").unwrap();
    let rhs = dir.join("b.txt");
    fs::write(&rhs, "3 1\n1\n2\n3\n").unwrap();
    let runs: Vec<Vec<&str>> = vec![
        vec!["rank", "--field", "2147483647", "--algo", "blackbox", "--seed", "5", a],
        vec![
            "det",
            "--field",
            "2147483647",
            "--algo",
            "blackbox",
            "--seed",
            "5",
            a,
            "--format",
            "json",
        ],
        vec![
            "minpoly",
            "--field",
            "2147483647",
            "--algo",
            "blackbox",
            "--seed",
            "9",
            a,
        ],
        vec![
            "rank",
            "--field",
            "2147483647",
            "--algo",
            "hybrid",
            "--tau",
            "0.1",
            a,
            "--format",
            "json",
        ],
        vec![
            "solve",
            "--field",
            "65521",
            "--algo",
            "blackbox",
            "--seed",
            "3",
            path(&dense),
            path(&rhs),
        ],
        vec![
            "nullspace",
            "--field",
            "7",
            "--algo",
            "blackbox",
            "--seed",
            "3",
            path(&dense),
            "--format",
            "json",
        ],
        vec!["charpoly", "--field", "65521", path(&dense), "--format", "json"],
        vec![
            "bench",
            "mul",
            "--n",
            "128",
            "--levels",
            "0,1",
            "--strassen-threshold",
            "32",
            "--format",
            "json",
        ],
        vec!["selftest", "--seed", "4", "--format", "json"],
    ];
    for args in &runs {
        let (x, y) = (ffla(args), ffla(args));
        ensure!(
            x.stdout == y.stdout && x.status.code() == y.status.code(),
            "`ffla {}` is not reproducible",
            args.join(" ")
        );
        ensure!(!x.stdout.is_empty(), "`ffla {}` printed nothing", args.join(" "));
    }
    Ok(format!("{} command lines give identical bytes on repeat", runs.len()))
}

fn cross_route(corpus: &[PathBuf]) -> Check {
    let mut dets = 0;
    for (i, m) in corpus.iter().enumerate() {
        let m = path(m);
        let mut ranks = Vec::new();
        let mut det_values = Vec::new();
        for algo in ["dense", "sparse", "hybrid", "blackbox"] {
            let seed = (100 + i).to_string();
            let base = ["--field", "2147483647", "--algo", algo, "--seed", &seed, m];
            let mut r = vec!["rank"];
            r.extend(base);
            ranks.push(json_result(&r)?);
            let mut d = vec!["det"];
            d.extend(base);
            det_values.push(json_result(&d)?);
        }
        ensure!(ranks.windows(2).all(|w| w[0] == w[1]), "matrix {i}: ranks {ranks:?}");
        ensure!(
            det_values.windows(2).all(|w| w[0] == w[1]),
            "matrix {i}: determinants {det_values:?}"
        );
        if det_values[0] != Value::from(0) {
            dets += 1;
        }
    }
    Ok(format!(
        "{} matrices agree on dense, sparse, hybrid and blackbox rank and det ({dets} nonsingular)",
        corpus.len()
    ))
}

fn exit_codes(dir: &Path) -> Check {
    let id = dir.join("I.sms");
    fs::write(&id, "2 2 M\n1 1 1\n2 2 1\n0 0 0\n").unwrap();
    let out = ffla(&["rank", "--field", "65521", "--algo", "dense", path(&id)]);
    ensure!(out.status.code() == Some(0), "identity rank exit code");
    ensure!(
        String::from_utf8_lossy(&out.stdout).lines().next() == Some("2"),
        "identity rank is not 2"
    );

    let sing = dir.join("S.txt");
    fs::write(&sing, "2 2\n1 1\n1 1\n").unwrap();
    let rhs = dir.join("r.txt");
    fs::write(&rhs, "2 1\n0\n1\n").unwrap();
    let out = ffla(&["solve", "--algo", "dense", path(&sing), path(&rhs)]);
    ensure!(
        out.status.code() == Some(1),
        "inconsistent system should exit 1, got {:?}",
        out.status.code()
    );

    let out = ffla(&["rank", path(&dir.join("missing.sms")), "--format", "json"]);
    ensure!(out.status.code() == Some(2), "missing file should exit 2");
    let v: Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    ensure!(v["error"]["kind"].is_string(), "json error object missing");

    let out = ffla(&["det", "--field", "12", path(&id)]);
    ensure!(out.status.code() == Some(2), "composite modulus should exit 2");
    Ok("0 on success, 1 on verified failure, 2 on usage errors with JSON error objects".into())
}

fn selftest() -> Check {
    let start = Instant::now();
    let out = ffla(&["selftest"]);
    let secs = start.elapsed().as_secs_f64();
    ensure!(
        out.status.success(),
        "selftest failed:\n{}",
        String::from_utf8_lossy(&out.stdout)
    );
    ensure!(secs < 60.0, "selftest took {secs:.1}s");
    Ok(format!("selftest passed in {secs:.2}s"))
}

fn ac11() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let corpus = write_corpus(dir.path(), 50);
    let parts = [
        round_trips(dir.path(), &corpus)?,
        reproducible(dir.path(), &corpus)?,
        cross_route(&corpus)?,
        exit_codes(dir.path())?,
        selftest()?,
    ];
    Ok(parts.join("; "))
}

fn main() -> ExitCode {
    panic::set_hook(Box::new(|_| {}));
    let start = Instant::now();
    let out = panic::catch_unwind(AssertUnwindSafe(ac11)).unwrap_or_else(|_| Err("panicked".into()));
    let secs = start.elapsed().as_secs_f64();
    match out {
        Ok(detail) => {
            println!("[PASS] AC11 command-line interface: {detail} ({secs:.1}s)");
            ExitCode::SUCCESS
        }
        Err(detail) => {
            println!("[FAIL] AC11 command-line interface: {detail} ({secs:.1}s)");
            ExitCode::FAILURE
        }
    }
}
