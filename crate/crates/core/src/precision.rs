//! Process-wide floor for certified precision.
//!
//! Certified routines start refining at this many bits and double from there.
//! Results never depend on the floor, only the amount of work does.

use std::sync::atomic::{AtomicU32, Ordering};

pub const DEFAULT_PRECISION_BITS: u32 = 64;
pub const MIN_PRECISION_BITS: u32 = 40;
pub const PRECISION_ENV_VAR: &str = "RCL_PRECISION_BITS";

static FLOOR: AtomicU32 = AtomicU32::new(DEFAULT_PRECISION_BITS);

pub fn precision_floor() -> u32 {
    FLOOR.load(Ordering::Relaxed)
}

/// Sets the floor, clamping to [`MIN_PRECISION_BITS`]. Returns the value stored.
pub fn set_precision_floor(bits: u32) -> u32 {
    let bits = bits.max(MIN_PRECISION_BITS);
    FLOOR.store(bits, Ordering::Relaxed);
    bits
}

/// Reads [`PRECISION_ENV_VAR`] and applies it. Unparseable values are ignored.
pub fn init_from_env() -> u32 {
    match std::env::var(PRECISION_ENV_VAR)
        .ok()
        .and_then(|v| v.trim().parse::<u32>().ok())
    {
        Some(bits) => set_precision_floor(bits),
        None => precision_floor(),
    }
}
