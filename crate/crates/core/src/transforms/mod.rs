//! Concrete image dictionaries: blockwise orthonormal DCT for texture and a
//! critically-sampled orthonormal wavelet for cartoon content, plus the flat
//! binary coefficient dump format.
//!
//! Both backends are square Parseval tight frames (analysis is the exact
//! inverse of synthesis), so the combined pseudo-inverse reduces to halved
//! adjoints and image-scale solves never factor a Gram matrix.

mod coeffs;
mod dct;
mod wavelet;

pub use coeffs::{read_coeffs, write_coeffs, COEFF_MAGIC};
pub use dct::{block_dct_analyze, block_dct_synthesize, BlockDctDictionary};
pub use wavelet::{multiscale_analyze, multiscale_synthesize, WaveletDictionary};

/// Block size used by the texture dictionary unless overridden.
pub const DEFAULT_BLOCK: usize = 32;

/// Resolution levels used by the cartoon dictionary unless overridden.
pub const DEFAULT_LEVELS: usize = 6;
