use thiserror::Error;

use crate::algebra::{AlgebraKind, BasisSymbol, Element};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("symbol {symbol} is not valid in {algebra}")]
    InvalidSymbol {
        symbol: BasisSymbol,
        algebra: AlgebraKind,
    },

    #[error("{op} is not defined for {algebra}")]
    UnsupportedAlgebra {
        op: &'static str,
        algebra: AlgebraKind,
    },

    #[error("symbol {symbol} lies outside the window of radius {radius}")]
    OutOfWindow { symbol: BasisSymbol, radius: u32 },

    #[error("degree index overflow: {0}")]
    IndexOverflow(String),

    #[error("window too small: {0}")]
    WindowTooSmall(String),

    #[error("core radius {core} exceeds window radius {window}")]
    InvalidCore { core: u32, window: u32 },

    #[error("map is not in the classified family: first failure at {args:?}, residual {residual}")]
    NotInClassifiedFamily {
        args: Vec<BasisSymbol>,
        residual: Element,
    },

    #[error("invalid map table: {0}")]
    InvalidMap(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
