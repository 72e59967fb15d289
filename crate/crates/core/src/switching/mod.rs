//! Factorizer for signings with many switchers.
//!
//! Even `n`: contract random vertex pairs into a `C4`-factorization whose
//! factors are rich in switcher components ([`even`]). Odd `n`: pull out a
//! high-discrepancy seed matching ([`seed`]), decompose the remaining crown
//! graph into `C4`-rich 2-factors ([`crown`]) and relabel until every factor
//! is switcher-rich ([`relabel`]). Either way each 2-factor is then split
//! into two matchings by applying switchers ([`split`]).

pub mod crown;
pub mod even;
pub mod pipeline;
pub mod relabel;
pub mod seed;
pub mod split;

pub use crown::{crown_decompose_odd, CrownCache, CrownMode, CrownOptions, CrownSource};
pub use even::{build_c4_factorization_even, ContractionScheme};
pub use pipeline::{factorize_many_switchers, SwitcherOptions};
pub use relabel::relabel_switcher_rich;
pub use seed::seed_matching;
pub use split::{split_two_factor, split_two_factor_unchecked, SplitCase, SplitResult};

use crate::census::SwitcherRecord;
use crate::signing::SignMatrix;
use crate::two_factor::TwoFactor;

/// The `C4` components of `f` that are switchers, in ascending order of
/// `(rows, cols)`.
pub fn switcher_components(m: &SignMatrix, f: &TwoFactor) -> Vec<SwitcherRecord> {
    let mut out: Vec<SwitcherRecord> = f
        .c4_components()
        .filter_map(|c| SwitcherRecord::classify(m, (c.xs()[0], c.xs()[1]), (c.ys()[0], c.ys()[1])))
        .collect();
    out.sort();
    out
}
