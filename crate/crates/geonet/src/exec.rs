//! Parallel member executor.

use geonet_core::MemberExecutor;
use rayon::prelude::*;

/// Runs members on the rayon thread pool. Results come back in index
/// order, so reports do not depend on scheduling.
#[derive(Debug, Clone, Copy, Default)]
pub struct Rayon;

impl MemberExecutor for Rayon {
    fn map<R: Send, F: Fn(usize) -> R + Sync>(&self, n: usize, f: F) -> Vec<R> {
        (0..n).into_par_iter().map(|i| f(i)).collect()
    }
}
