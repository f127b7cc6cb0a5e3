//! Time series, observables, delay-coordinate embeddings and empirical
//! measures.

mod embed;
mod empirical;
mod observable;
mod series;

pub use embed::{delay_embed, delay_embed_ordered, delay_map_apply, delay_map_apply_strided, CoordOrder, DelayParams};
pub(crate) use empirical::subsample_indices;
pub use empirical::{pushforward, state_measure, subsample, EmpiricalMeasure, DEFAULT_BURN_IN};
pub use observable::{observe, Monomial, Observable};
pub use series::{add_noise, TimeSeries};

pub(crate) fn format_f64(v: f64) -> String {
    // `Display` for f64 is the shortest string that parses back to the same bits.
    format!("{v}")
}
