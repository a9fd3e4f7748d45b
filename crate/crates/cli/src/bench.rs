use std::time::Instant;

use ffla_core::dense_mm::strassen_levels_for;
use ffla_core::elimination::{densify_triangle, ple, reduced_row_echelon, trsm, trtri, Diag, TriangularSpec, Uplo};
use ffla_core::matrix::{random_dense, random_matrix_with_rank, random_sparse};
use ffla_core::sparse_elim::{
    arrow_matrix, sparse_elimination, HybridConfig, PivotPolicy, SparseElimOptions, SparseElimination,
};
use ffla_core::tiny::{fgdp_dot, fgdp_q_for};
use ffla_core::{ExtField, MatMul, MulAlgorithm, SeededRng};
use serde_json::{json, Value};

use crate::args::BenchKind;
use crate::commands::Ctx;
use crate::output::{CliError, Report};

fn ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

pub fn run(ctx: &Ctx, kind: &BenchKind) -> Result<Report, CliError> {
    match kind {
        BenchKind::Mul { n } => mul(ctx, *n),
        BenchKind::Elim { n } => elim(ctx, *n),
        BenchKind::Sparse { n, density, arrow } => sparse(ctx, *n, *density, *arrow),
        BenchKind::Fgdp { .. } => unreachable!("needs an extension field context"),
    }
}

fn mul(ctx: &Ctx, n: usize) -> Result<Report, CliError> {
    let levels = ctx.opts.levels.clone().map(|l| l.0).unwrap_or_else(|| vec![0, 1, 2]);
    let mut rng = SeededRng::new(ctx.opts.seed);
    let a = random_dense(ctx.field, n, n, &mut rng);
    let b = random_dense(ctx.field, n, n, &mut rng);
    let threshold = ctx.opts.strassen_threshold;
    let cube = (n as f64).powi(3);
    let mut rows = Vec::new();
    let mut text = format!("n {n}, threshold {threshold}\nlevels  used  base_products  muls  muls/n^3\n");
    let mut phases = Vec::new();
    let mut reference = None;
    for &l in &levels {
        let mut cfg = ctx.mul_config()?;
        cfg.algorithm = MulAlgorithm::Strassen;
        cfg.max_levels = Some(l);
        let mm = MatMul::counting(cfg);
        let t = Instant::now();
        let c = mm.mul(&a, &b)?;
        phases.push((format!("levels_{l}"), ms(t)));
        match &reference {
            None => reference = Some(c),
            Some(r) if *r != c => {
                return Err(CliError::usage(format!(
                    "level {l} product disagrees with level {}",
                    levels[0]
                )))
            }
            _ => {}
        }
        let counts = mm.counts();
        let used = strassen_levels_for(n, n, n, threshold, Some(l));
        let ratio = counts.muls as f64 / cube;
        text.push_str(&format!(
            "{l}  {used}  {}  {}  {ratio:.6}\n",
            counts.base_products, counts.muls
        ));
        rows.push(json!({
            "levels": l,
            "levels_used": used,
            "base_products": counts.base_products,
            "muls": counts.muls,
            "adds": counts.adds,
            "muls_over_n3": ratio,
        }));
    }
    let mut rep = Report::new(
        "bench mul",
        ctx.opts.field.to_string(),
        "strassen",
        json!({"n": n, "threshold": threshold, "runs": rows}),
        text,
    );
    rep.phases_ms = phases.into_iter().collect();
    Ok(rep)
}

fn elim(ctx: &Ctx, n: usize) -> Result<Report, CliError> {
    let f = ctx.field;
    let mut rng = SeededRng::new(ctx.opts.seed);
    let a = random_matrix_with_rank(f, n, n, n, rng.next_u64())?;
    let b = random_dense(f, n, n, &mut rng);
    let mut t = densify_triangle(&random_dense(f, n, n, &mut rng), Uplo::Upper, Diag::NonUnit);
    for i in 0..n {
        t.set(i, i, f.from_u64(1 + i as u64 % (f.modulus() - 1)));
    }
    let cube = (n as f64).powi(3);
    let mut consts = serde_json::Map::new();
    let mut phases = Vec::new();
    let mut text = format!("n {n}; field operations / n^3\n");
    let kernels: [(&str, f64, Box<dyn Fn(&MatMul) -> ffla_core::Result<()>>); 5] = [
        ("gemm", 2.0, Box::new(|mm: &MatMul| mm.mul(&a, &b).map(|_| ()))),
        (
            "trsm",
            1.0,
            Box::new(|mm: &MatMul| trsm(&t, &b, TriangularSpec::left(Uplo::Upper, Diag::NonUnit), mm).map(|_| ())),
        ),
        ("ple", 2.0 / 3.0, Box::new(|mm: &MatMul| ple(&a, mm).map(|_| ()))),
        (
            "trtri",
            1.0 / 3.0,
            Box::new(|mm: &MatMul| trtri(&t, Uplo::Upper, Diag::NonUnit, mm).map(|_| ())),
        ),
        (
            "rref",
            2.0,
            Box::new(|mm: &MatMul| reduced_row_echelon(&a, mm).map(|_| ())),
        ),
    ];
    for (name, expected, kernel) in kernels {
        let mm = MatMul::counting(ffla_core::MulConfig::classic());
        let start = Instant::now();
        kernel(&mm)?;
        phases.push((name.to_string(), ms(start)));
        let k = mm.counts().field_ops() as f64 / cube;
        text.push_str(&format!("{name:6} {k:.4} (expected {expected:.4})\n"));
        consts.insert(name.into(), json!({"measured": k, "expected": expected}));
    }
    let mut rep = Report::new(
        "bench elim",
        ctx.opts.field.to_string(),
        "dense",
        json!({"n": n, "constants": consts}),
        text,
    );
    rep.phases_ms = phases.into_iter().collect();
    Ok(rep)
}

fn elimination_json(e: &SparseElimination) -> Value {
    json!({
        "rank": e.rank,
        "fill": e.fill,
        "switch": e.switch,
    })
}

fn sparse(ctx: &Ctx, n: usize, density: f64, arrow: bool) -> Result<Report, CliError> {
    let f = ctx.field;
    let a = if arrow {
        arrow_matrix(f, n)
    } else {
        random_sparse(f, n, n, density, &mut SeededRng::new(ctx.opts.seed))
    };
    let runs = [
        (
            "first_row",
            SparseElimOptions {
                policy: PivotPolicy::FirstRow,
                ..Default::default()
            },
        ),
        ("reordered", SparseElimOptions::default()),
        (
            "hybrid",
            SparseElimOptions {
                hybrid: Some(HybridConfig {
                    density_threshold: ctx.opts.tau,
                    memory_budget: ctx.opts.mem_budget,
                }),
                ..Default::default()
            },
        ),
    ];
    let mut out = serde_json::Map::new();
    let mut phases = Vec::new();
    let mut text = format!(
        "{} {n}x{n}, nnz {}\npolicy  rank  fill_in  cancellations  max_active_nnz\n",
        if arrow { "arrow" } else { "random" },
        a.nnz()
    );
    for (name, opts) in runs {
        let start = Instant::now();
        let e = sparse_elimination(&a, &opts)?;
        phases.push((name.to_string(), ms(start)));
        text.push_str(&format!(
            "{name}  {}  {}  {}  {}\n",
            e.rank, e.fill.fill_in, e.fill.cancellations, e.fill.max_active_nnz
        ));
        out.insert(name.into(), elimination_json(&e));
    }
    let mut rep = Report::new(
        "bench sparse",
        ctx.opts.field.to_string(),
        "sparse",
        json!({"n": n, "nnz": a.nnz(), "arrow": arrow, "policies": out}),
        text,
    );
    rep.phases_ms = phases.into_iter().collect();
    Ok(rep)
}

pub fn fgdp(opts: &crate::args::GlobalOpts, n: usize, trials: usize) -> Result<Report, CliError> {
    let (p, k) = (opts.field.p, opts.field.k);
    let ext = ExtField::new(p, k, opts.seed)?;
    let q = fgdp_q_for(p, k, n)?;
    let mut rng = SeededRng::new(opts.seed);
    let order = ext.order() as u64;
    let vecs: Vec<(Vec<_>, Vec<_>)> = (0..trials)
        .map(|_| {
            let mut draw = || -> Vec<_> {
                (0..n)
                    .map(|_| ext.from_code(rng.below(order) as u32).expect("code in range"))
                    .collect()
            };
            (draw(), draw())
        })
        .collect();
    let start = Instant::now();
    let packed: Vec<_> = vecs
        .iter()
        .map(|(u, v)| fgdp_dot(&ext, u, v, None))
        .collect::<ffla_core::Result<_>>()?;
    let t_packed = ms(start);
    let start = Instant::now();
    let direct: Vec<_> = vecs.iter().map(|(u, v)| ext.dot(u, v)).collect();
    let t_direct = ms(start);
    let mismatches = packed.iter().zip(&direct).filter(|(a, b)| a != b).count();
    let text = format!(
        "GF({}) n {n}, trials {trials}, q {q}, mismatches {mismatches}\n",
        opts.field
    );
    let mut rep = Report::new(
        "bench fgdp",
        opts.field.to_string(),
        "fgdp",
        json!({"n": n, "trials": trials, "q": q, "mismatches": mismatches}),
        text,
    );
    rep.phases_ms = [("packed".to_string(), t_packed), ("direct".to_string(), t_direct)]
        .into_iter()
        .collect();
    if mismatches > 0 {
        rep.failure = Some(format!(
            "{mismatches} packed dot products disagree with table arithmetic"
        ));
    }
    Ok(rep)
}
