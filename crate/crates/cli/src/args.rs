use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ffla_core::MatrixFormat;

#[derive(Parser, Debug)]
#[command(name = "ffla", version, about = "Exact linear algebra over finite fields")]
pub struct Cli {
    #[command(flatten)]
    pub opts: GlobalOpts,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalOpts {
    /// Field as a prime `p` or a prime power `p^k`.
    #[arg(long, global = true, default_value = "65521")]
    pub field: FieldSpec,

    #[arg(long, global = true, value_enum, default_value_t = Route::Auto)]
    pub algo: Route,

    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Worker threads for dense kernels (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    pub format: OutputFormat,

    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Input matrix format; detected from the file when omitted.
    #[arg(long, global = true, value_parser = parse_matrix_format)]
    pub input_format: Option<MatrixFormat>,

    /// Strassen-Winograd recursion stops below this dimension.
    #[arg(long, global = true, default_value_t = 64)]
    pub strassen_threshold: usize,

    /// Strassen-Winograd levels; a comma list for `bench mul`.
    #[arg(long, global = true, value_parser = parse_levels)]
    pub levels: Option<Levels>,

    /// Accumulator width in bits for delayed reduction.
    #[arg(long, global = true, default_value_t = 62)]
    pub beta: u32,

    /// Density at which sparse elimination hands over to dense.
    #[arg(long, global = true, default_value_t = 0.2)]
    pub tau: f64,

    /// Dense-equivalent memory budget in bytes (suffixes K, M, G).
    #[arg(long, global = true, default_value = "1G", value_parser = parse_bytes)]
    pub mem_budget: u64,

    /// Report wall-clock timings (output is then no longer reproducible).
    #[arg(long, global = true)]
    pub timings: bool,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Product of two matrices.
    Mul {
        a: PathBuf,
        b: PathBuf,
    },
    /// Rank of a matrix.
    Rank {
        a: PathBuf,
    },
    /// Determinant of a square matrix.
    Det {
        a: PathBuf,
    },
    /// Solve `A x = b` for a dense-text right-hand side.
    Solve {
        a: PathBuf,
        b: PathBuf,
        /// Iterative solver used by the blackbox route.
        #[arg(long, value_enum, default_value_t = Solver::Lanczos)]
        solver: Solver,
    },
    /// Row-echelon form `E` with `X A = E`.
    Echelon {
        a: PathBuf,
    },
    /// Reduced row-echelon form.
    Rref {
        a: PathBuf,
    },
    /// Minimal polynomial of a square matrix.
    Minpoly {
        a: PathBuf,
        /// Random projections combined by lcm on the blackbox route.
        #[arg(long, default_value_t = 2)]
        draws: usize,
    },
    /// Characteristic polynomial of a square matrix.
    Charpoly {
        a: PathBuf,
    },
    /// Basis of the right nullspace.
    Nullspace {
        a: PathBuf,
    },
    /// Invariant factor `s_{k+1}` through a random rank-`k` update.
    Invfactor {
        a: PathBuf,
        #[arg(short, long)]
        k: usize,
    },
    /// Rewrite a matrix in another file format.
    Convert {
        a: PathBuf,
        #[arg(long, value_parser = parse_matrix_format)]
        to: MatrixFormat,
    },
    /// Operation-count and fill-in benchmarks.
    Bench {
        #[command(subcommand)]
        kind: BenchKind,
    },
    /// Quick end-to-end verification against brute-force oracles.
    Selftest,
}

#[derive(Subcommand, Debug, Clone)]
pub enum BenchKind {
    /// Base-case multiplication counts per Strassen-Winograd level.
    Mul {
        #[arg(long, default_value_t = 256)]
        n: usize,
    },
    /// Leading constants of the elimination kernels.
    Elim {
        #[arg(long, default_value_t = 128)]
        n: usize,
    },
    /// Fill-in of the pivoting policies on a random or arrow matrix.
    Sparse {
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = 0.005)]
        density: f64,
        #[arg(long)]
        arrow: bool,
    },
    /// Packed dot products over GF(p^k) against table arithmetic.
    Fgdp {
        #[arg(long, default_value_t = 64)]
        n: usize,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Route {
    Dense,
    Blackbox,
    Sparse,
    Hybrid,
    Auto,
}

impl Route {
    pub fn name(self) -> &'static str {
        match self {
            Route::Dense => "dense",
            Route::Blackbox => "blackbox",
            Route::Sparse => "sparse",
            Route::Hybrid => "hybrid",
            Route::Auto => "auto",
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Text,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Solver {
    Lanczos,
    Wiedemann,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FieldSpec {
    pub p: u64,
    pub k: u32,
}

impl FromStr for FieldSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (p, k) = match s.split_once('^') {
            Some((p, k)) => (p.trim(), k.trim()),
            None => (s.trim(), "1"),
        };
        let p: u64 = p.parse().map_err(|_| format!("`{s}` is not of the form p or p^k"))?;
        let k: u32 = k.parse().map_err(|_| format!("`{s}` is not of the form p or p^k"))?;
        if !ffla_core::field::is_prime(p) {
            return Err(format!("{p} is not prime"));
        }
        if k == 0 {
            return Err("extension degree must be at least 1".into());
        }
        Ok(FieldSpec { p, k })
    }
}

impl std::fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.k == 1 {
            write!(f, "{}", self.p)
        } else {
            write!(f, "{}^{}", self.p, self.k)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Levels(pub Vec<u32>);

fn parse_levels(s: &str) -> Result<Levels, String> {
    s.split(',')
        .map(|t| t.trim().parse::<u32>().map_err(|_| format!("bad level `{t}`")))
        .collect::<Result<Vec<_>, _>>()
        .map(Levels)
}

fn parse_matrix_format(s: &str) -> Result<MatrixFormat, String> {
    s.parse().map_err(|e: ffla_core::Error| e.to_string())
}

pub fn parse_bytes(s: &str) -> Result<u64, String> {
    let s = s.trim();
    let (num, mult) = match s.char_indices().last() {
        Some((i, c)) if c.is_ascii_alphabetic() => {
            let m = match c.to_ascii_uppercase() {
                'K' => 1u64 << 10,
                'M' => 1 << 20,
                'G' => 1 << 30,
                'T' => 1 << 40,
                'B' => 1,
                _ => return Err(format!("unknown size suffix in `{s}`")),
            };
            (&s[..i], m)
        }
        _ => (s, 1),
    };
    let n: u64 = num.trim().parse().map_err(|_| format!("bad size `{s}`"))?;
    n.checked_mul(mult).ok_or_else(|| format!("size `{s}` overflows"))
}
