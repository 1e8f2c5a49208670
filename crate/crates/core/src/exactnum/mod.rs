//! Modular integers and exact scaled cyclotomic numbers.
//!
//! Every identity for `N = 2^n` is checked in `ℤ[ω_M][1/2]` with `M = 2^max(n, 3)`,
//! which contains `√2` and hence the `2^(−n/2)` normalisation of the finite Fourier
//! transform.

mod cyclotomic;
pub mod ntheory;
mod zmod;

pub use cyclotomic::{cyc_arith, cyc_root, CycNum, CycOp, CycRing};
pub(crate) use cyclotomic::{align_scales, normalize_scale};
pub use ntheory::jacobi_symbol;
pub use zmod::{mod_inv, ZMod};

/// Ring order used by the exact backend for `N = 2^n`.
pub fn exact_order_for_qubits(n: u32) -> u64 {
    1u64 << n.max(3)
}
