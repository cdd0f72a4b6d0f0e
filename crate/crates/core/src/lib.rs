//! Channel coherence toolkit.
//!
//! Dense complex linear algebra, CPTP channels in Kraus and Choi form, the
//! state resource theory of coherence, a small interior-point SDP solver and
//! on top of those the channel coherence quantifiers: the coherence
//! generating power, a certified lower bound on the coherence boosting power,
//! the max-coherence of a channel and the diamond distance.

pub mod channel;
pub mod coherence;
pub mod error;
pub mod io;
pub mod linalg;
pub mod monotones;
pub mod random;
pub mod sdp;
pub mod verify;

pub use channel::{FreeSuperOp, QChannel, QState};
pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, EigDecomposition, C64};
pub use monotones::{analyze, MonotoneReport, SearchConfig};
pub use sdp::{SdpProblem, SdpSolution, SdpStatus};
