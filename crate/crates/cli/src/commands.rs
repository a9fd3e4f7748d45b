use std::fs;
use std::io::{self, Read};
use std::path::Path;

use ffla_core::blackbox::{
    blackbox_det_with, blackbox_rank_with, invariant_factor_with, lanczos_solve, minpoly_montecarlo_with,
    nullspace_vector_with, wiedemann_solve, LasVegas,
};
use ffla_core::elimination::{
    determinant, nullspace_basis, rank, reduced_row_echelon, row_echelon, solve, SolveOutcome,
};
use ffla_core::matrix::io::{parse_dense_text, parse_matrix, parse_vector, to_string};
use ffla_core::sparse_elim::{hybrid_elimination, reordered_elimination, SparseElimination};
use ffla_core::{
    dense_charpoly, dense_minpoly, BlackboxOptions, DenseMatrix, MatMul, MatrixData, MulAlgorithm, MulConfig,
    PrimeField, SparseMatrix,
};
use serde_json::json;

use crate::args::{Command, GlobalOpts, Route, Solver};
use crate::output::{classic, matrix_json, matrix_text, poly_json, poly_text, vector_text, CliError, Report};
use crate::route::auto_route;

pub struct Ctx {
    pub opts: GlobalOpts,
    pub field: PrimeField,
}

impl Ctx {
    pub fn new(opts: GlobalOpts) -> Result<Self, CliError> {
        if opts.field.k != 1 {
            return Err(CliError::usage(format!(
                "GF({}) is an extension field; only `bench fgdp` works over extensions",
                opts.field
            )));
        }
        let field = PrimeField::classic(opts.field.p)?;
        Ok(Ctx { opts, field })
    }

    fn field_name(&self) -> String {
        self.opts.field.to_string()
    }

    pub fn mul_config(&self) -> Result<MulConfig, CliError> {
        let cfg = MulConfig {
            accumulator_bits: self.opts.beta,
            strassen_threshold: self.opts.strassen_threshold,
            ..MulConfig::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn blackbox_opts(&self) -> BlackboxOptions {
        BlackboxOptions::seeded(self.opts.seed)
    }

    fn read_text(&self, path: &Path) -> Result<String, CliError> {
        if path.as_os_str() == "-" {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s)?;
            Ok(s)
        } else {
            fs::read_to_string(path).map_err(|e| CliError {
                kind: "io".into(),
                message: format!("{}: {e}", path.display()),
            })
        }
    }

    pub fn load(&self, path: &Path) -> Result<MatrixData, CliError> {
        let text = self.read_text(path)?;
        parse_matrix(&text, self.opts.input_format, self.field).map_err(|e| CliError {
            kind: e.kind().into(),
            message: format!("{}: {e}", path.display()),
        })
    }

    /// A dense-text column (`n 1` header) or a bare list of values.
    fn load_vector(&self, path: &Path) -> Result<Vec<i64>, CliError> {
        let text = self.read_text(path)?;
        if let Ok(m) = parse_dense_text(&text, self.field) {
            if m.cols() == 1 {
                return Ok(m.column(0));
            }
            if m.rows() == 1 {
                return Ok(m.row(0).to_vec());
            }
        }
        parse_vector(&text, self.field).map_err(|e| CliError {
            kind: e.kind().into(),
            message: format!("{}: {e}", path.display()),
        })
    }

    /// Explicit route, or the automatic choice for `a`.
    fn route(&self, a: &MatrixData) -> Route {
        match self.opts.algo {
            Route::Auto => {
                let (m, n) = a.shape();
                let (r, why) = auto_route(m, n, a.nnz(), self.opts.mem_budget);
                eprintln!("ffla: auto route {}: {why}", r.name());
                r
            }
            r => r,
        }
    }

    fn unsupported(&self, command: &str, route: Route, supported: &str) -> CliError {
        CliError::usage(format!("`{command}` has no {} route; use {supported}", route.name()))
    }

    fn report(&self, command: &str, route: &str, result: serde_json::Value, text: String) -> Report {
        Report::new(command, self.field_name(), route, result, text)
    }
}

pub fn run(ctx: &Ctx, cmd: &Command) -> Result<Report, CliError> {
    match cmd {
        Command::Mul { a, b } => mul(ctx, a, b),
        Command::Rank { a } => rank_cmd(ctx, a),
        Command::Det { a } => det_cmd(ctx, a),
        Command::Solve { a, b, solver } => solve_cmd(ctx, a, b, *solver),
        Command::Echelon { a } => echelon_cmd(ctx, a, false),
        Command::Rref { a } => echelon_cmd(ctx, a, true),
        Command::Minpoly { a, draws } => minpoly_cmd(ctx, a, *draws),
        Command::Charpoly { a } => charpoly_cmd(ctx, a),
        Command::Nullspace { a } => nullspace_cmd(ctx, a),
        Command::Invfactor { a, k } => invfactor_cmd(ctx, a, *k),
        Command::Convert { a, to } => {
            let m = ctx.load(a)?;
            let text = to_string(&m, *to);
            Ok(ctx.report("convert", "none", json!(text), text))
        }
        Command::Bench { .. } | Command::Selftest => unreachable!("dispatched in main"),
    }
}

fn mul(ctx: &Ctx, a: &Path, b: &Path) -> Result<Report, CliError> {
    let a = ctx.load(a)?.to_dense();
    let b = ctx.load(b)?.to_dense();
    let mut cfg = ctx.mul_config()?;
    let name = match &ctx.opts.levels {
        Some(l) if l.0.len() != 1 => return Err(CliError::usage("`mul` takes a single --levels value")),
        Some(l) => {
            cfg.algorithm = MulAlgorithm::Strassen;
            cfg.max_levels = Some(l.0[0]);
            "strassen"
        }
        None => "fgemm",
    };
    let mm = MatMul::counting(cfg);
    let c = mm.mul(&a, &b)?;
    let mut r = ctx.report("mul", name, matrix_json(&c), matrix_text(&c));
    r.op_counts = Some(mm.counts());
    Ok(r)
}

fn sparse_route(ctx: &Ctx, a: &SparseMatrix, route: Route) -> Result<SparseElimination, CliError> {
    Ok(match route {
        Route::Sparse => reordered_elimination(a),
        _ => hybrid_elimination(a, ctx.opts.tau, ctx.opts.mem_budget)?,
    })
}

fn rank_cmd(ctx: &Ctx, path: &Path) -> Result<Report, CliError> {
    let a = ctx.load(path)?;
    let route = ctx.route(&a);
    let mut prob = None;
    let mut ops = None;
    let r = match route {
        Route::Dense => {
            let mm = MatMul::counting(ctx.mul_config()?);
            let r = rank(&a.to_dense(), &mm)?;
            ops = Some(mm.counts());
            r
        }
        Route::Sparse | Route::Hybrid => sparse_route(ctx, &a.to_sparse(), route)?.rank,
        Route::Blackbox => {
            let (r, rep) = blackbox_rank_with(&a.to_sparse(), &ctx.blackbox_opts())?;
            prob = Some(rep);
            r
        }
        Route::Auto => unreachable!(),
    };
    let mut rep = ctx.report("rank", route.name(), json!(r), r.to_string());
    rep.probability_report = prob;
    rep.op_counts = ops;
    Ok(rep)
}

fn det_cmd(ctx: &Ctx, path: &Path) -> Result<Report, CliError> {
    let a = ctx.load(path)?;
    let (m, n) = a.shape();
    if m != n {
        return Err(CliError::usage(format!("determinant of a non-square {m}x{n} matrix")));
    }
    let route = ctx.route(&a);
    let f = ctx.field;
    let mut prob = None;
    let mut ops = None;
    let mut failure = None;
    let d = match route {
        Route::Dense => {
            let mm = MatMul::counting(ctx.mul_config()?);
            let d = determinant(&a.to_dense(), &mm)?;
            ops = Some(mm.counts());
            d
        }
        Route::Sparse | Route::Hybrid => sparse_route(ctx, &a.to_sparse(), route)?.det.expect("square input"),
        Route::Blackbox => {
            let out = blackbox_det_with(&a.to_sparse(), &ctx.blackbox_opts())?;
            if !out.certified {
                failure = Some(format!(
                    "determinant not certified after {} preconditioner draws",
                    out.draws
                ));
            }
            prob = Some(out.report);
            out.det
        }
        Route::Auto => unreachable!(),
    };
    let d = f.to_classic(d);
    let mut rep = ctx.report("det", route.name(), json!(d), d.to_string());
    rep.probability_report = prob;
    rep.op_counts = ops;
    rep.failure = failure;
    Ok(rep)
}

fn las_vegas_result(f: &PrimeField, out: &LasVegas<Vec<i64>>) -> (serde_json::Value, String) {
    let failures: Vec<String> = out
        .failures
        .iter()
        .map(|k| {
            serde_json::to_value(k)
                .ok()
                .and_then(|v| v.as_str().map(String::from))
                .unwrap_or_default()
        })
        .collect();
    match &out.value {
        Some(x) => (
            json!({"status": "solved", "x": classic(f, x), "attempts": out.attempts, "failures": failures}),
            vector_text(f, x),
        ),
        None => (
            json!({"status": "failed", "x": null, "attempts": out.attempts, "failures": failures}),
            String::new(),
        ),
    }
}

fn solve_cmd(ctx: &Ctx, a: &Path, b: &Path, solver: Solver) -> Result<Report, CliError> {
    let a = ctx.load(a)?;
    let b = ctx.load_vector(b)?;
    if b.len() != a.shape().0 {
        return Err(CliError::usage(format!(
            "right-hand side has {} entries for a matrix with {} rows",
            b.len(),
            a.shape().0
        )));
    }
    let route = match ctx.route(&a) {
        Route::Hybrid if ctx.opts.algo == Route::Auto => Route::Dense,
        r => r,
    };
    let f = ctx.field;
    match route {
        Route::Dense => {
            let mm = MatMul::counting(ctx.mul_config()?);
            let out = solve(&a.to_dense(), &b, &mm)?;
            let mut rep = match out {
                SolveOutcome::Solution(x) => ctx.report(
                    "solve",
                    "dense",
                    json!({"status": "solved", "x": classic(&f, &x)}),
                    vector_text(&f, &x),
                ),
                SolveOutcome::Inconsistent => {
                    let mut r = ctx.report(
                        "solve",
                        "dense",
                        json!({"status": "inconsistent", "x": null}),
                        String::new(),
                    );
                    r.failure = Some("the system has no solution".into());
                    r
                }
            };
            rep.op_counts = Some(mm.counts());
            Ok(rep)
        }
        Route::Blackbox => {
            let s = a.to_sparse();
            let (out, name) = match solver {
                Solver::Lanczos => (lanczos_solve(&s, &b, ctx.opts.seed)?, "blackbox-lanczos"),
                Solver::Wiedemann => (wiedemann_solve(&s, &b, ctx.opts.seed)?, "blackbox-wiedemann"),
            };
            let (result, text) = las_vegas_result(&f, &out);
            let mut rep = ctx.report("solve", name, result, text);
            if !out.is_success() {
                rep.failure = Some(format!("no verified solution after {} attempts", out.attempts));
            }
            rep.probability_report = Some(out.report);
            Ok(rep)
        }
        r => Err(ctx.unsupported("solve", r, "--algo dense or blackbox")),
    }
}

fn dense_only(ctx: &Ctx, command: &str) -> Result<(), CliError> {
    match ctx.opts.algo {
        Route::Auto | Route::Dense => Ok(()),
        r => Err(ctx.unsupported(command, r, "--algo dense")),
    }
}

fn echelon_cmd(ctx: &Ctx, path: &Path, reduced: bool) -> Result<Report, CliError> {
    let a = ctx.load(path)?;
    let command = if reduced { "rref" } else { "echelon" };
    dense_only(ctx, command)?;
    let mm = MatMul::counting(ctx.mul_config()?);
    let a = a.to_dense();
    let (m, rank, pivots) = if reduced {
        let r = reduced_row_echelon(&a, &mm)?;
        (r.r, r.rank, r.pivot_cols)
    } else {
        let e = row_echelon(&a, &mm)?;
        (e.e, e.rank, e.pivot_cols)
    };
    let text = format!("rank {rank}\npivots {}\n{}", join(&pivots), matrix_text(&m));
    let mut rep = ctx.report(
        command,
        "dense",
        json!({"rank": rank, "pivot_cols": pivots, "matrix": matrix_json(&m)}),
        text,
    );
    rep.op_counts = Some(mm.counts());
    Ok(rep)
}

fn join(v: &[usize]) -> String {
    v.iter().map(usize::to_string).collect::<Vec<_>>().join(" ")
}

fn require_square(a: &MatrixData, command: &str) -> Result<(), CliError> {
    let (m, n) = a.shape();
    if m != n {
        return Err(CliError::usage(format!(
            "`{command}` needs a square matrix, got {m}x{n}"
        )));
    }
    Ok(())
}

/// Dense unless the automatic choice was blackbox.
fn dense_or_blackbox(ctx: &Ctx, command: &str, a: &MatrixData) -> Result<Route, CliError> {
    match ctx.route(a) {
        Route::Hybrid if ctx.opts.algo == Route::Auto => Ok(Route::Dense),
        r @ (Route::Dense | Route::Blackbox) => Ok(r),
        r => Err(ctx.unsupported(command, r, "--algo dense or blackbox")),
    }
}

fn minpoly_cmd(ctx: &Ctx, path: &Path, draws: usize) -> Result<Report, CliError> {
    let a = ctx.load(path)?;
    require_square(&a, "minpoly")?;
    match dense_or_blackbox(ctx, "minpoly", &a)? {
        Route::Dense => {
            let g = dense_minpoly(&a.to_dense())?;
            Ok(ctx.report("minpoly", "dense", poly_json(&g), poly_text(&g)))
        }
        _ => {
            let (g, prob) = minpoly_montecarlo_with(&a.to_sparse(), &ctx.blackbox_opts().draws(draws))?;
            let mut rep = ctx.report("minpoly", "blackbox", poly_json(&g), poly_text(&g));
            rep.probability_report = Some(prob);
            Ok(rep)
        }
    }
}

fn charpoly_cmd(ctx: &Ctx, path: &Path) -> Result<Report, CliError> {
    let a = ctx.load(path)?;
    require_square(&a, "charpoly")?;
    dense_only(ctx, "charpoly")?;
    let g = dense_charpoly(&a.to_dense())?;
    Ok(ctx.report("charpoly", "dense", poly_json(&g), poly_text(&g)))
}

fn nullspace_cmd(ctx: &Ctx, path: &Path) -> Result<Report, CliError> {
    let a = ctx.load(path)?;
    let f = ctx.field;
    match dense_or_blackbox(ctx, "nullspace", &a)? {
        Route::Dense => {
            let mm = MatMul::counting(ctx.mul_config()?);
            let basis: DenseMatrix = nullspace_basis(&a.to_dense(), &mm)?;
            let vecs: Vec<Vec<i64>> = (0..basis.cols()).map(|j| basis.column(j)).collect();
            let text = vecs.iter().map(|v| vector_text(&f, v)).collect::<Vec<_>>().join("\n");
            let json_vecs: Vec<Vec<u64>> = vecs.iter().map(|v| classic(&f, v)).collect();
            let mut rep = ctx.report(
                "nullspace",
                "dense",
                json!({"dimension": vecs.len(), "basis": json_vecs}),
                format!("dimension {}\n{text}", vecs.len()),
            );
            rep.op_counts = Some(mm.counts());
            Ok(rep)
        }
        _ => {
            require_square(&a, "nullspace --algo blackbox")?;
            let out = nullspace_vector_with(&a.to_sparse(), &ctx.blackbox_opts())?;
            let (result, text) = las_vegas_result(&f, &out);
            let mut rep = ctx.report("nullspace", "blackbox", result, text);
            if !out.is_success() {
                rep.failure = Some(format!("no verified kernel vector after {} attempts", out.attempts));
            }
            rep.probability_report = Some(out.report);
            Ok(rep)
        }
    }
}

fn invfactor_cmd(ctx: &Ctx, path: &Path, k: usize) -> Result<Report, CliError> {
    let a = ctx.load(path)?;
    require_square(&a, "invfactor")?;
    match ctx.opts.algo {
        Route::Auto | Route::Blackbox => {}
        r => return Err(ctx.unsupported("invfactor", r, "--algo blackbox")),
    }
    let (g, prob) = invariant_factor_with(&a.to_sparse(), k, &ctx.blackbox_opts())?;
    let mut rep = ctx.report("invfactor", "blackbox", poly_json(&g), poly_text(&g));
    rep.probability_report = Some(prob);
    Ok(rep)
}
