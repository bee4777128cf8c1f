//! Deterministic resolvability codebooks.
//!
//! A codebook `C = (x_1, ..., x_L)` approximates the output `W_P` of a
//! channel `W` under input `P` by the uniform mixture `W_C` of the rows of
//! its codewords. Codewords are picked one at a time as best responses to a
//! Hedge (multiplicative weights) player over the output alphabet, which
//! bounds `d_var(W_P, W_C)` without any randomness. All quantities are exact
//! finite sums; logarithms are natural.

pub mod asymptotic;
pub mod codebook;
pub mod error;
pub mod hedge;
pub mod prob;
pub mod singleshot;
pub mod types;

pub use codebook::{Codebook, CodebookMeta};
pub use error::{Error, Result};
pub use prob::{
    channel_output, codebook_output, conditional_entropy, entropy, kl_divergence, mutual_information, product_channel,
    truncate, tv_distance, Alphabet, Budget, Channel, Distribution, SupportMask, TruncatedView,
};
pub use singleshot::{
    best_response, build_codebook, build_cost, required_size, singleshot_bound, verify_pointwise, CodeSize,
    Construction, ResolvabilityCost,
};
