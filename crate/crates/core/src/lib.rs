//! Exact classification of biderivations, derivations and commuting maps on
//! degree windows of the Virasoro, Witt and W(2,2) algebras.

pub mod algebra;
pub mod cli;
pub mod error;
pub mod io;
pub mod linalg;
pub mod maps;
pub mod scalar;
pub mod solver;

pub use algebra::{AlgebraKind, AlgebraSpec, BasisSymbol, Element};
pub use error::{Error, Result};
pub use maps::{BilinearMapWindow, Check, LinearMapWindow};
pub use scalar::Scalar;
pub use solver::{classify, ClassificationReport, ClassifyConfig, Problem};
