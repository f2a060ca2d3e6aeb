//! Secret sharing on polar codes.
//!
//! A secret bit is placed at one information position `p` of a polar code;
//! the other information positions become shares and the frozen positions
//! carry public values. Which coalitions can recover the secret is decided by
//! linear algebra over GF(2) on the columns of the generator submatrix, or
//! equivalently by the dual code.
//!
//! Modules, bottom-up:
//!
//! - [`gf2`]: bit vectors, bit matrices, polar kernels
//! - [`channel`]: BEC, BSC and binary-input AWGN models
//! - [`construction`]: reliability ordering and code selection
//! - [`access`]: qualification, minimal access sets, dictators
//! - [`sharing`]: dealer, combiner, secrecy audit
//! - [`format`]: code and shares file formats
//! - [`transmission`]: Monte-Carlo delivery over a channel

pub mod access;
pub mod channel;
pub mod construction;
pub mod error;
pub mod format;
pub mod gf2;
pub mod sharing;
pub mod transmission;

pub use access::{AccessStructure, Coalition, Mode};
pub use channel::ChannelModel;
pub use construction::{build_code, CodeSpec};
pub use error::{Error, Result};
pub use gf2::{BitMatrix, BitVector};
pub use sharing::{deal, reconstruct, Dealing, Share, ShareBundle};
pub use transmission::{simulate, SimReport};
