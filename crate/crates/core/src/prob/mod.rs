//! Finite-alphabet probability primitives.

mod alphabet;
mod channel;
mod distribution;
mod info;
mod truncate;

pub use alphabet::{Alphabet, Budget};
pub use channel::{channel_output, codebook_output, product_channel, Channel};
pub use distribution::{Distribution, NORMALIZATION_TOL};
pub use info::{conditional_entropy, entropy, kl_divergence, mutual_information, tv_distance};
pub use truncate::{truncate, SupportMask, TruncatedView};

pub(crate) use alphabet::decode_into;
pub(crate) use channel::codebook_output_raw;
pub(crate) use info::tv_slices;
