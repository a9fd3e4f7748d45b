use std::cell::Cell;
use std::time::Instant;

use ffla_core::blackbox::{blackbox_det, blackbox_rank, lanczos_solve};
use ffla_core::dense_mm::{fgemm, gemm_classic, gemm_strassen};
use ffla_core::elimination::{determinant, ple, rank};
use ffla_core::matrix::{random_dense, random_matrix_with_rank, sparse_corpus};
use ffla_core::sparse_elim::{hybrid_elimination, reordered_elimination};
use ffla_core::tiny::{decode, encode, fgdp_dot, gf3_add, gf3_sub, m4rm_mul, redq, CountedWord, PackedGF2Matrix};
use ffla_core::{dense_charpoly, ExtField, MatMul, MulConfig, PrimeField, SeededRng};
use serde_json::json;

use crate::output::{CliError, Report};

type Check = Result<String, String>;

fn gf3_circuits() -> Check {
    for x in 0..3u8 {
        for y in 0..3u8 {
            let ops = Cell::new(0);
            let w = |(a, b): (u64, u64)| (CountedWord::new(a, &ops), CountedWord::new(b, &ops));
            let (s0, s1) = gf3_add(w(encode(x)), w(encode(y)));
            let add_ops = ops.replace(0);
            let (d0, d1) = gf3_sub(w(encode(x)), w(encode(y)));
            let sub_ops = ops.get();
            if decode((s0.value, s1.value)) != (x + y) % 3 || decode((d0.value, d1.value)) != (x + 3 - y) % 3 {
                return Err(format!("wrong result for ({x}, {y})"));
            }
            if add_ops != 6 || sub_ops != 6 {
                return Err(format!("({x}, {y}) took {add_ops}/{sub_ops} word operations"));
            }
        }
    }
    Ok("9 pairs, 6 word operations each".into())
}

fn redq_stress(rng: &mut SeededRng) -> Check {
    let primes = [2u64, 3, 5, 7, 13, 251, 4093, 65521];
    for _ in 0..10_000 {
        let p = primes[rng.index(primes.len())];
        let bits = 64 - p.leading_zeros() + rng.below(6) as u32;
        let q = 1u64 << bits;
        let ndig = 1 + rng.index((128 / bits as usize).min(12));
        let digits: Vec<u64> = (0..ndig).map(|_| rng.below(q)).collect();
        let r = digits.iter().rev().fold(0u128, |acc, &d| (acc << bits) | d as u128);
        let (_, mu) = redq(r, p, q, ndig - 1).map_err(|e| e.to_string())?;
        if mu.iter().zip(&digits).any(|(&m, &d)| m != d % p) {
            return Err(format!("digit mismatch for p = {p}, q = {q}"));
        }
    }
    Ok("10000 draws".into())
}

fn gf2_products(rng: &mut SeededRng) -> Check {
    for _ in 0..20 {
        let (m, k, n) = (1 + rng.index(200), 1 + rng.index(200), 1 + rng.index(200));
        let a = PackedGF2Matrix::random(m, k, rng);
        let b = PackedGF2Matrix::random(k, n, rng);
        let (c, _) = m4rm_mul(&a, &b, 1 + rng.index(8)).map_err(|e| e.to_string())?;
        if c != a.naive_mul(&b).map_err(|e| e.to_string())? {
            return Err(format!("{m}x{k}x{n} product differs"));
        }
    }
    Ok("20 four-Russians products".into())
}

fn packed_dots(rng: &mut SeededRng) -> Check {
    let mut fields = 0;
    for (p, k) in [(2u64, 8u32), (3, 5), (5, 3), (7, 2), (251, 1), (2, 12)] {
        let ext = ExtField::new(p, k, p + k as u64).map_err(|e| e.to_string())?;
        let order = ext.order() as u64;
        for _ in 0..50 {
            let n = rng.index(65);
            let mut draw = || -> Vec<_> {
                (0..n)
                    .map(|_| ext.from_code(rng.below(order) as u32).unwrap())
                    .collect()
            };
            let (u, v) = (draw(), draw());
            if fgdp_dot(&ext, &u, &v, None).map_err(|e| e.to_string())? != ext.dot(&u, &v) {
                return Err(format!("GF({p}^{k}) dot product differs"));
            }
        }
        fields += 1;
    }
    Ok(format!("{fields} extension fields"))
}

fn products(rng: &mut SeededRng) -> Check {
    for p in [3u64, 65521, 2_147_483_647] {
        let f = PrimeField::classic(p).unwrap();
        for _ in 0..40 {
            let (m, k, n) = (1 + rng.index(48), 1 + rng.index(48), 1 + rng.index(48));
            let a = random_dense(f, m, k, rng);
            let b = random_dense(f, k, n, rng);
            let want = gemm_classic(&a, &b, None).map_err(|e| e.to_string())?;
            let fg = fgemm(&a, &b, &MulConfig::default(), None).map_err(|e| e.to_string())?;
            let sw = gemm_strassen(&a, &b, &MulConfig::strassen(Some(2), 2), None).map_err(|e| e.to_string())?;
            if fg != want || sw != want {
                return Err(format!("p = {p}, {m}x{k}x{n} product differs"));
            }
        }
    }
    Ok("120 fgemm and Strassen-Winograd products".into())
}

fn factorizations(rng: &mut SeededRng) -> Check {
    let mm = MatMul::default();
    for p in [2u64, 7, 65521] {
        let f = PrimeField::classic(p).unwrap();
        for _ in 0..40 {
            let (m, n) = (1 + rng.index(40), 1 + rng.index(40));
            let r = rng.index(m.min(n) + 1);
            let a = random_matrix_with_rank(f, m, n, r, rng.next_u64()).map_err(|e| e.to_string())?;
            let d = ple(&a, &mm).map_err(|e| e.to_string())?;
            if d.rank != r || d.reconstruct().map_err(|e| e.to_string())? != a {
                return Err(format!("p = {p}, {m}x{n} rank {r} factorization wrong"));
            }
        }
        for _ in 0..20 {
            let n = 1 + rng.index(12);
            let a = random_dense(f, n, n, rng);
            let cp = dense_charpoly(&a).map_err(|e| e.to_string())?;
            let probe = rng.vector(&f, n);
            if a.eval_poly_vec(&cp, &probe)
                .map_err(|e| e.to_string())?
                .iter()
                .any(|&x| x != 0)
            {
                return Err(format!("p = {p}, charpoly does not annihilate"));
            }
        }
    }
    Ok("120 PLE factorizations, 60 Cayley-Hamilton probes".into())
}

fn routes(seed: u64) -> Check {
    let f = PrimeField::classic(2_147_483_647).unwrap();
    let mm = MatMul::default();
    let corpus = sparse_corpus(f, 12, 10, 80, seed);
    for (i, a) in corpus.iter().enumerate() {
        let d = a.to_dense();
        let (r, det) = (
            rank(&d, &mm).map_err(|e| e.to_string())?,
            determinant(&d, &mm).map_err(|e| e.to_string())?,
        );
        let re = reordered_elimination(a);
        let hy = hybrid_elimination(a, 0.2, 1 << 30).map_err(|e| e.to_string())?;
        let (bbr, _) = blackbox_rank(a, seed + i as u64).map_err(|e| e.to_string())?;
        let bbd = blackbox_det(a, seed + i as u64).map_err(|e| e.to_string())?;
        if re.rank != r || hy.rank != r || bbr != r {
            return Err(format!(
                "matrix {i}: rank {r} vs sparse {} hybrid {} blackbox {bbr}",
                re.rank, hy.rank
            ));
        }
        if re.det != Some(det) || hy.det != Some(det) || (bbd.certified && bbd.det != det) {
            return Err(format!("matrix {i}: determinants disagree"));
        }
        if det != 0 {
            let b = rng_vector(&f, a.rows(), seed + i as u64);
            let out = lanczos_solve(a, &b, seed).map_err(|e| e.to_string())?;
            if let Some(x) = out.value {
                if d.matvec(&x).map_err(|e| e.to_string())? != b {
                    return Err(format!("matrix {i}: unverified solution"));
                }
            }
        }
    }
    Ok(format!(
        "{} corpus matrices across dense, sparse, hybrid and blackbox routes",
        corpus.len()
    ))
}

fn rng_vector(f: &PrimeField, n: usize, seed: u64) -> Vec<i64> {
    SeededRng::new(seed).vector(f, n)
}

pub fn run(seed: u64) -> Result<Report, CliError> {
    let mut rng = SeededRng::new(seed);
    let checks: Vec<(&str, Box<dyn FnOnce(&mut SeededRng) -> Check>)> = vec![
        ("gf3_circuits", Box::new(|_| gf3_circuits())),
        ("redq", Box::new(redq_stress)),
        ("m4rm", Box::new(gf2_products)),
        ("fgdp", Box::new(packed_dots)),
        ("products", Box::new(products)),
        ("elimination", Box::new(factorizations)),
        ("routes", Box::new(move |_| routes(seed))),
    ];
    let mut results = Vec::new();
    let mut text = String::new();
    let mut failed = Vec::new();
    let mut phases = Vec::new();
    for (name, check) in checks {
        let start = Instant::now();
        let out = check(&mut rng);
        phases.push((name.to_string(), start.elapsed().as_secs_f64() * 1e3));
        let (ok, detail) = match out {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        text.push_str(&format!("[{}] {name}: {detail}\n", if ok { "ok" } else { "FAIL" }));
        if !ok {
            failed.push(name);
        }
        results.push(json!({"name": name, "ok": ok, "detail": detail}));
    }
    let mut rep = Report::new(
        "selftest",
        "various".into(),
        "oracle",
        json!({"passed": failed.is_empty(), "checks": results}),
        text,
    );
    rep.phases_ms = phases.into_iter().collect();
    if !failed.is_empty() {
        rep.failure = Some(format!("failing checks: {}", failed.join(", ")));
    }
    Ok(rep)
}
