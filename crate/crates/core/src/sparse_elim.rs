//! Sparse Gaussian elimination with the linear-pivoting reordering
//! heuristic, fill-in accounting and an optional switch to dense PLE once
//! the trailing submatrix is dense enough.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::dense_mm::MatMul;
use crate::elimination::ple;
use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::matrix::{DenseMatrix, Permutation, SparseMatrix, SparseRow};

pub const DEFAULT_DENSITY_THRESHOLD: f64 = 0.2;
/// 1 GiB of 8-byte entries.
pub const DEFAULT_MEMORY_BUDGET: u64 = 1 << 30;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PivotPolicy {
    /// Sparsest active row, then the entry of that row whose column has
    /// the fewest active nonzeros. Ties go to the lowest index.
    Reordered,
    /// Lowest-index nonzero row, its first nonzero entry.
    FirstRow,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HybridConfig {
    pub density_threshold: f64,
    /// Bytes allowed for the dense trailing block.
    pub memory_budget: u64,
}

impl Default for HybridConfig {
    fn default() -> Self {
        HybridConfig {
            density_threshold: DEFAULT_DENSITY_THRESHOLD,
            memory_budget: DEFAULT_MEMORY_BUDGET,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SparseElimOptions {
    pub policy: PivotPolicy,
    pub hybrid: Option<HybridConfig>,
    /// Keep the multipliers so that `L U` can be formed.
    pub keep_l: bool,
}

impl Default for SparseElimOptions {
    fn default() -> Self {
        SparseElimOptions {
            policy: PivotPolicy::Reordered,
            hybrid: None,
            keep_l: false,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct FillStats {
    /// Entries created at positions that are zero in the input.
    pub fill_in: u64,
    /// Entries that became exactly zero during an update.
    pub cancellations: u64,
    pub row_updates: u64,
    pub initial_nnz: usize,
    pub max_active_nnz: usize,
}

/// Where the hybrid run handed over to dense elimination.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SwitchPoint {
    /// Pivots found by the sparse phase.
    pub step: usize,
    pub rows: usize,
    pub cols: usize,
    pub nnz: usize,
    pub density: f64,
}

/// `A = P L U Q` with `L` unit lower triangular and `U` upper triangular
/// once rows are taken in `row_order` and columns in `col_order`.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseElimination {
    /// `(row, col, value)` per pivot, in elimination order.
    pub pivots: Vec<(usize, usize, i64)>,
    /// Row `k` is the `k`-th pivot row after elimination, indexed by the
    /// original columns.
    pub u: SparseMatrix,
    /// `m x rank` multipliers in original row order, when requested.
    pub l: Option<SparseMatrix>,
    /// Pivot rows in order, then the remaining rows.
    pub row_order: Vec<usize>,
    /// Pivot columns in order, then the remaining columns.
    pub col_order: Vec<usize>,
    pub rank: usize,
    /// Determinant for square inputs.
    pub det: Option<i64>,
    pub fill: FillStats,
    pub switch: Option<SwitchPoint>,
}

impl SparseElimination {
    /// `P` with `P^T A` taking rows in `row_order`.
    pub fn p(&self) -> Permutation {
        Permutation::from_images(self.row_order.clone())
            .expect("row order is a bijection")
            .inverse()
    }

    /// `Q` with `A Q^T` taking columns in `col_order`.
    pub fn q(&self) -> Permutation {
        Permutation::from_images(self.col_order.clone()).expect("column order is a bijection")
    }
}

struct Workspace {
    field: PrimeField,
    rows: Vec<SparseRow>,
    alive: Vec<bool>,
    col_done: Vec<bool>,
    col_rows: Vec<BTreeSet<usize>>,
    nnz: usize,
    fill: FillStats,
    l: Vec<(usize, usize, i64)>,
}

impl Workspace {
    fn new(a: &SparseMatrix) -> Self {
        let rows: Vec<SparseRow> = a.row_data().to_vec();
        let mut col_rows = vec![BTreeSet::new(); a.cols()];
        for (i, r) in rows.iter().enumerate() {
            for &(j, _) in r {
                col_rows[j].insert(i);
            }
        }
        let nnz = a.nnz();
        Workspace {
            field: *a.field(),
            rows,
            alive: vec![true; a.rows()],
            col_done: vec![false; a.cols()],
            col_rows,
            nnz,
            fill: FillStats {
                initial_nnz: nnz,
                max_active_nnz: nnz,
                ..FillStats::default()
            },
            l: Vec::new(),
        }
    }

    fn active_shape(&self) -> (usize, usize) {
        (
            self.alive.iter().filter(|&&x| x).count(),
            self.col_done.iter().filter(|&&x| !x).count(),
        )
    }

    fn choose(&self, policy: PivotPolicy) -> Option<(usize, usize)> {
        let live = (0..self.rows.len()).filter(|&i| self.alive[i] && !self.rows[i].is_empty());
        match policy {
            PivotPolicy::FirstRow => live.map(|i| (i, self.rows[i][0].0)).next(),
            PivotPolicy::Reordered => {
                let i = live.min_by_key(|&i| (self.rows[i].len(), i))?;
                let j = self.rows[i]
                    .iter()
                    .map(|&(j, _)| j)
                    .min_by_key(|&j| (self.col_rows[j].len(), j))?;
                Some((i, j))
            }
        }
    }

    /// `row_i -= l * row_k`, keeping the column index in step.
    fn update(&mut self, i: usize, k: usize, l: i64, original: &SparseMatrix, pivot_col: usize) {
        let f = self.field;
        let a = std::mem::take(&mut self.rows[i]);
        let b = &self.rows[k];
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut x, mut y) = (0, 0);
        while x < a.len() || y < b.len() {
            let ca = a.get(x).map_or(usize::MAX, |e| e.0);
            let cb = b.get(y).map_or(usize::MAX, |e| e.0);
            if ca < cb {
                out.push(a[x]);
                x += 1;
            } else if cb < ca {
                let v = f.neg(f.mul(l, b[y].1));
                out.push((cb, v));
                self.col_rows[cb].insert(i);
                self.nnz += 1;
                if original.row(i).binary_search_by_key(&cb, |e| e.0).is_err() {
                    self.fill.fill_in += 1;
                }
                y += 1;
            } else {
                let v = f.sub(a[x].1, f.mul(l, b[y].1));
                if v == 0 {
                    self.col_rows[ca].remove(&i);
                    self.nnz -= 1;
                    if ca != pivot_col {
                        self.fill.cancellations += 1;
                    }
                } else {
                    out.push((ca, v));
                }
                x += 1;
                y += 1;
            }
        }
        self.rows[i] = out;
        self.fill.row_updates += 1;
    }

    fn eliminate(&mut self, k: usize, c: usize, original: &SparseMatrix, step: usize, keep_l: bool) -> i64 {
        let f = self.field;
        let pv = self.rows[k]
            .iter()
            .find(|e| e.0 == c)
            .map(|e| e.1)
            .expect("pivot entry present");
        let inv = f.inv(pv).expect("pivot is nonzero");
        self.alive[k] = false;
        self.col_done[c] = true;
        for &(j, _) in &self.rows[k] {
            self.col_rows[j].remove(&k);
        }
        self.nnz -= self.rows[k].len();
        if keep_l {
            self.l.push((k, step, f.one()));
        }
        let targets: Vec<usize> = self.col_rows[c].iter().copied().collect();
        for i in targets {
            let aic = self.rows[i]
                .iter()
                .find(|e| e.0 == c)
                .map(|e| e.1)
                .expect("indexed entry");
            let l = f.mul(aic, inv);
            self.update(i, k, l, original, c);
            if keep_l {
                self.l.push((i, step, l));
            }
        }
        self.fill.max_active_nnz = self.fill.max_active_nnz.max(self.nnz);
        #[cfg(debug_assertions)]
        self.check_counts();
        pv
    }

    #[cfg(debug_assertions)]
    fn check_counts(&self) {
        let mut counts = vec![0usize; self.col_rows.len()];
        let mut nnz = 0;
        for (i, r) in self.rows.iter().enumerate() {
            if self.alive[i] {
                nnz += r.len();
                for &(j, _) in r {
                    counts[j] += 1;
                }
            }
        }
        assert_eq!(nnz, self.nnz);
        for (j, s) in self.col_rows.iter().enumerate() {
            assert_eq!(s.len(), counts[j]);
        }
    }
}

fn sign_of(order: &[usize]) -> i64 {
    Permutation::from_images(order.to_vec()).expect("bijection").sign()
}

fn should_switch(cfg: &HybridConfig, rows: usize, cols: usize, nnz: usize) -> Option<SwitchPoint> {
    let area = rows * cols;
    if area == 0 {
        return None;
    }
    let density = nnz as f64 / area as f64;
    let fits = (area as u64).saturating_mul(8) <= cfg.memory_budget;
    (density >= cfg.density_threshold && fits).then_some(SwitchPoint {
        step: 0,
        rows,
        cols,
        nnz,
        density,
    })
}

/// Elimination under the reordering heuristic, sparse throughout.
pub fn reordered_elimination(a: &SparseMatrix) -> SparseElimination {
    sparse_elimination(a, &SparseElimOptions::default()).expect("no hybrid configuration to reject")
}

/// Reordered elimination that hands the trailing block to dense PLE once
/// its density reaches `density_threshold` and it fits `memory_budget`.
pub fn hybrid_elimination(a: &SparseMatrix, density_threshold: f64, memory_budget: u64) -> Result<SparseElimination> {
    sparse_elimination(
        a,
        &SparseElimOptions {
            hybrid: Some(HybridConfig {
                density_threshold,
                memory_budget,
            }),
            ..SparseElimOptions::default()
        },
    )
}

pub fn sparse_elimination(a: &SparseMatrix, opts: &SparseElimOptions) -> Result<SparseElimination> {
    if let Some(h) = &opts.hybrid {
        if !(0.0..=1.0).contains(&h.density_threshold) {
            return Err(Error::config(format!(
                "density threshold {} outside [0, 1]",
                h.density_threshold
            )));
        }
    }
    let f = *a.field();
    let (m, n) = a.shape();
    let mut ws = Workspace::new(a);
    let mut pivots = Vec::new();
    let mut u_rows: Vec<SparseRow> = Vec::new();
    let mut switch = None;
    loop {
        if let Some(cfg) = &opts.hybrid {
            let (r, c) = ws.active_shape();
            if let Some(mut sp) = should_switch(cfg, r, c, ws.nnz) {
                sp.step = pivots.len();
                switch = Some(sp);
                break;
            }
        }
        let Some((k, c)) = ws.choose(opts.policy) else {
            break;
        };
        let step = pivots.len();
        let pv = ws.eliminate(k, c, a, step, opts.keep_l);
        pivots.push((k, c, pv));
        u_rows.push(ws.rows[k].clone());
    }

    let mut tail_rows: Vec<usize> = (0..m).filter(|&i| ws.alive[i]).collect();
    if switch.is_some() {
        let cols: Vec<usize> = (0..n).filter(|&j| !ws.col_done[j]).collect();
        let mut pos = vec![usize::MAX; n];
        for (t, &j) in cols.iter().enumerate() {
            pos[j] = t;
        }
        let mut s = DenseMatrix::zeros(f, tail_rows.len(), cols.len());
        for (t, &i) in tail_rows.iter().enumerate() {
            for &(j, v) in &ws.rows[i] {
                s.set_canonical(t, pos[j], v);
            }
        }
        let d = ple(&s, &MatMul::default())?;
        let mut order: Vec<usize> = (0..tail_rows.len()).collect();
        for (i, &p) in d.transpositions().iter().enumerate() {
            order.swap(i, p);
        }
        let base = pivots.len();
        for k in 0..d.rank {
            let lkk = d.l.get(k, k);
            let inv = f.inv(lkk)?;
            let row: SparseRow = (0..cols.len())
                .filter_map(|t| {
                    let e = d.e.get(k, t);
                    (e != 0).then(|| (cols[t], f.mul(lkk, e)))
                })
                .collect();
            pivots.push((tail_rows[order[k]], cols[d.pivot_cols[k]], lkk));
            u_rows.push(row);
            if opts.keep_l {
                for t in k..tail_rows.len() {
                    let v = d.l.get(t, k);
                    if v != 0 {
                        ws.l.push((tail_rows[order[t]], base + k, f.mul(v, inv)));
                    }
                }
            }
        }
        tail_rows = order[d.rank..].iter().map(|&t| tail_rows[t]).collect();
        tail_rows.sort_unstable();
    }

    let rank = pivots.len();
    let mut row_order: Vec<usize> = pivots.iter().map(|p| p.0).collect();
    row_order.extend(tail_rows);
    let mut col_order: Vec<usize> = pivots.iter().map(|p| p.1).collect();
    let mut used = vec![false; n];
    for &c in &col_order {
        used[c] = true;
    }
    col_order.extend((0..n).filter(|&j| !used[j]));

    let det = (m == n).then(|| {
        if rank < n {
            return f.zero();
        }
        let prod = pivots.iter().fold(f.one(), |acc, p| f.mul(acc, p.2));
        if sign_of(&row_order) * sign_of(&col_order) < 0 {
            f.neg(prod)
        } else {
            prod
        }
    });
    let u = SparseMatrix::from_triplets(
        f,
        rank,
        n,
        u_rows
            .iter()
            .enumerate()
            .flat_map(|(k, r)| r.iter().map(move |&(j, v)| (k, j, v))),
    )?;
    let l = if opts.keep_l {
        Some(SparseMatrix::from_triplets(f, m, rank, ws.l.iter().copied())?)
    } else {
        None
    };
    Ok(SparseElimination {
        pivots,
        u,
        l,
        row_order,
        col_order,
        rank,
        det,
        fill: ws.fill,
        switch,
    })
}

/// Dense first row and first column over a nonzero diagonal: first-row
/// pivoting fills the whole matrix, the reordering heuristic fills nothing.
pub fn arrow_matrix(field: PrimeField, n: usize) -> SparseMatrix {
    let mut t = Vec::with_capacity(3 * n);
    for i in 0..n {
        t.push((i, i, (i + 2) as i64));
        if i > 0 {
            t.push((0, i, 1));
            t.push((i, 0, 1));
        }
    }
    SparseMatrix::from_triplets(field, n, n, t).expect("indices in range")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elimination::{determinant, rank};
    use crate::matrix::random_sparse;
    use crate::rng::SeededRng;

    fn check_factors(a: &SparseMatrix, e: &SparseElimination) {
        let l = e.l.as_ref().unwrap().to_dense();
        let u = e.u.to_dense();
        assert_eq!(l.mul(&u).unwrap(), a.to_dense());
        // Triangular once permuted.
        let lt = l.select_rows(&e.row_order);
        assert!(lt.is_lower_triangular());
        for k in 0..e.rank {
            assert_eq!(lt.get(k, k), 1);
        }
        let ut = u.select_cols(&e.col_order);
        assert!(ut.is_upper_triangular());
        for (k, p) in e.pivots.iter().enumerate() {
            assert_eq!(ut.get(k, k), p.2);
        }
        let lu_perm = lt.mul(&ut).unwrap();
        assert_eq!(
            e.p().apply_rows(&e.q().apply_cols(&lu_perm).unwrap()).unwrap(),
            a.to_dense()
        );
    }

    #[test]
    fn diagonal_has_no_fill() {
        let f = PrimeField::classic(65521).unwrap();
        let d = SparseMatrix::from_dense(&DenseMatrix::diagonal(f, &[3, 0, 5, 7, 0, 1]));
        let e = reordered_elimination(&d);
        assert_eq!(e.rank, 4);
        assert_eq!(e.fill.fill_in, 0);
        assert_eq!(e.det, Some(0));
    }

    #[test]
    fn arrow_fill() {
        let f = PrimeField::classic(65521).unwrap();
        let a = arrow_matrix(f, 50);
        let mm = MatMul::default();
        let re = reordered_elimination(&a);
        let naive = sparse_elimination(
            &a,
            &SparseElimOptions {
                policy: PivotPolicy::FirstRow,
                ..SparseElimOptions::default()
            },
        )
        .unwrap();
        let dense = a.to_dense();
        assert_eq!(re.rank, rank(&dense, &mm).unwrap());
        assert_eq!(naive.rank, re.rank);
        assert_eq!(re.det, Some(determinant(&dense, &mm).unwrap()));
        assert_eq!(naive.det, re.det);
        assert_eq!(re.fill.fill_in, 0);
        assert!(naive.fill.fill_in > 1000);
    }

    #[test]
    fn random_against_ple() {
        let mut rng = SeededRng::new(71);
        let mm = MatMul::default();
        for p in [2u64, 3, 65521] {
            let f = PrimeField::classic(p).unwrap();
            for _ in 0..35 {
                let (m, n) = (1 + rng.index(60), 1 + rng.index(60));
                let a = random_sparse(f, m, n, 0.04 + 0.1 * rng.index(3) as f64, &mut rng);
                let dense = a.to_dense();
                let want = rank(&dense, &mm).unwrap();
                for opts in [
                    SparseElimOptions {
                        keep_l: true,
                        ..SparseElimOptions::default()
                    },
                    SparseElimOptions {
                        keep_l: true,
                        policy: PivotPolicy::FirstRow,
                        hybrid: None,
                    },
                    SparseElimOptions {
                        keep_l: true,
                        policy: PivotPolicy::Reordered,
                        hybrid: Some(HybridConfig {
                            density_threshold: 0.1,
                            memory_budget: DEFAULT_MEMORY_BUDGET,
                        }),
                    },
                ] {
                    let e = sparse_elimination(&a, &opts).unwrap();
                    assert_eq!(e.rank, want);
                    check_factors(&a, &e);
                }
                if m == n {
                    let det = determinant(&dense, &mm).unwrap();
                    assert_eq!(reordered_elimination(&a).det, Some(det));
                    assert_eq!(
                        hybrid_elimination(&a, 0.0, DEFAULT_MEMORY_BUDGET).unwrap().det,
                        Some(det)
                    );
                }
            }
        }
    }

    #[test]
    fn nonsingular_determinants() {
        let f = PrimeField::centered(65521).unwrap();
        let mm = MatMul::default();
        let mut rng = SeededRng::new(5);
        for _ in 0..20 {
            let n = 5 + rng.index(40);
            let mut a = random_sparse(f, n, n, 0.05, &mut rng).to_dense();
            for i in 0..n {
                a.set(i, (i * 7 + 3) % n, 1 + rng.index(100) as i64);
            }
            let s = SparseMatrix::from_dense(&a);
            let det = determinant(&a, &mm).unwrap();
            for tau in [0.1, 0.2, 0.5] {
                assert_eq!(
                    hybrid_elimination(&s, tau, DEFAULT_MEMORY_BUDGET).unwrap().det,
                    Some(det)
                );
            }
            assert_eq!(reordered_elimination(&s).det, Some(det));
        }
    }

    #[test]
    fn hybrid_degenerate_configs() {
        let f = PrimeField::classic(65521).unwrap();
        let mut rng = SeededRng::new(9);
        let a = random_sparse(f, 80, 80, 0.05, &mut rng);
        let never = hybrid_elimination(&a, 1.0, 0).unwrap();
        assert!(never.switch.is_none());
        let plain = reordered_elimination(&a);
        assert_eq!((never.rank, never.det, &never.u), (plain.rank, plain.det, &plain.u));
        let now = hybrid_elimination(&a, 0.0, DEFAULT_MEMORY_BUDGET).unwrap();
        assert_eq!(now.switch.as_ref().unwrap().step, 0);
        assert_eq!(now.rank, rank(&a.to_dense(), &MatMul::default()).unwrap());
        assert!(hybrid_elimination(&a, 1.5, 8).is_err());

        let big = random_sparse(f, 200, 200, 0.02, &mut rng);
        let want = rank(&big.to_dense(), &MatMul::default()).unwrap();
        for tau in [0.1, 0.2, 0.5] {
            let e = hybrid_elimination(&big, tau, DEFAULT_MEMORY_BUDGET).unwrap();
            assert_eq!(e.rank, want);
        }
    }

    /// Replays the pivot sequence densely and counts zero-to-nonzero
    /// transitions at positions that are zero in the input.
    fn dense_fill(a: &SparseMatrix, pivots: &[(usize, usize, i64)]) -> u64 {
        let f = *a.field();
        let orig = a.to_dense();
        let mut d = orig.clone();
        let mut done = vec![false; a.rows()];
        let mut fill = 0;
        for &(k, c, _) in pivots {
            done[k] = true;
            let inv = f.inv(d.get(k, c)).unwrap();
            for i in 0..a.rows() {
                if done[i] || d.get(i, c) == 0 {
                    continue;
                }
                let l = f.mul(d.get(i, c), inv);
                for j in 0..a.cols() {
                    let before = d.get(i, j);
                    let after = f.sub(before, f.mul(l, d.get(k, j)));
                    if before == 0 && after != 0 && orig.get(i, j) == 0 {
                        fill += 1;
                    }
                    d.set(i, j, after);
                }
            }
        }
        fill
    }

    #[test]
    fn fill_counter_recomputed() {
        let mut rng = SeededRng::new(77);
        for p in [3u64, 65521] {
            let f = PrimeField::classic(p).unwrap();
            for _ in 0..20 {
                let n = 5 + rng.index(40);
                let a = random_sparse(f, n, n + rng.index(5), 0.08, &mut rng);
                for policy in [PivotPolicy::Reordered, PivotPolicy::FirstRow] {
                    let e = sparse_elimination(
                        &a,
                        &SparseElimOptions {
                            policy,
                            ..SparseElimOptions::default()
                        },
                    )
                    .unwrap();
                    assert_eq!(e.fill.fill_in, dense_fill(&a, &e.pivots));
                }
            }
            let arrow = arrow_matrix(f, 30);
            let e = sparse_elimination(
                &arrow,
                &SparseElimOptions {
                    policy: PivotPolicy::FirstRow,
                    ..SparseElimOptions::default()
                },
            )
            .unwrap();
            assert_eq!(e.fill.fill_in, dense_fill(&arrow, &e.pivots));
        }
    }

    #[test]
    fn cancellation_is_tracked() {
        let f = PrimeField::classic(7).unwrap();
        // Row 1 equals row 0; eliminating leaves it empty.
        let a = SparseMatrix::from_dense(
            &DenseMatrix::from_rows(f, &[vec![1, 2, 3], vec![1, 2, 3], vec![0, 0, 4]]).unwrap(),
        );
        let e = reordered_elimination(&a);
        assert_eq!(e.rank, 2);
        assert_eq!(e.fill.cancellations, 1);
        assert_eq!(e.det, Some(0));
    }
}
