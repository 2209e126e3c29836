//! Resource equivalence between ensembles of depolarized copies of a pure
//! state.
//!
//! An ensemble `(N, F)` holds `N` copies of `F|ψ⟩⟨ψ| + (1−F)/(d−1)(I−|ψ⟩⟨ψ|)`.
//! For each operational task this crate gives the copy count `M` at which an
//! ensemble of fidelity `G` performs as well as a reference ensemble, and
//! combines the tasks into trade verdicts.

pub mod curve;
pub mod error;
pub mod linalg;
pub mod purification;
pub mod qcb;
pub mod qst;
pub mod rtp;
pub mod state;
pub mod tomography;
pub mod verdicts;

pub use curve::{fmt_sig, CurvePoint, CurveValue, EquivalenceCurve, Task};
pub use error::{Error, Result};
pub use purification::{classify_region, Region, RegionVerdict, Strength};
pub use state::{DensityOperator, Ensemble, PureState};
pub use verdicts::{all_curves, ambiguity_band, trade_verdict, Overall, TaskVerdict, TradeReport};
