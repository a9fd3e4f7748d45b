//! Word-packed kernels for very small fields.

mod fgdp;
mod gf2;
mod gf3;
mod qadic;

pub use fgdp::fgdp_dot;
pub use gf2::{default_table_width, gf2_echelonize, gf2_rank, m4rm_mul, M4rmStats, PackedGF2Matrix};
pub use gf3::{decode, encode, gf3_add, gf3_neg, gf3_sub, BitslicedGF3Matrix, BoolWord, CountedWord, Planes};
pub use qadic::{
    fgdp_q_for, pack_qadic, packed_q_for, redq, redq_big, redq_digits, rightpacked_mul, unpack_qadic, QadicMatrix,
    QadicVector,
};
