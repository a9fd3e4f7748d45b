use crate::args::Route;

/// Density above which a matrix is treated as dense.
pub const DENSE_DENSITY: f64 = 0.2;
/// Orders up to this always go dense.
pub const SMALL_ORDER: usize = 256;

/// Route for an `rows x cols` input with `nnz` nonzeros, plus the reason.
pub fn auto_route(rows: usize, cols: usize, nnz: usize, mem_budget: u64) -> (Route, String) {
    let n = rows.max(cols);
    let area = rows as u128 * cols as u128;
    let density = if area == 0 { 0.0 } else { nnz as f64 / area as f64 };
    let footprint = area * 8;
    if density > DENSE_DENSITY || n <= SMALL_ORDER {
        let why = if density > DENSE_DENSITY {
            format!("density {density:.4} > {DENSE_DENSITY}")
        } else {
            format!("order {n} <= {SMALL_ORDER}")
        };
        (Route::Dense, why)
    } else if footprint <= mem_budget as u128 {
        (
            Route::Hybrid,
            format!("sparse, dense footprint {footprint} B fits budget {mem_budget} B"),
        )
    } else {
        (
            Route::Blackbox,
            format!("sparse, dense footprint {footprint} B exceeds budget {mem_budget} B"),
        )
    }
}
