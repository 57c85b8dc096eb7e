use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("degenerate segment: endpoints coincide at ({x1}, {x2})")]
    DegenerateSegment { x1: f64, x2: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("boundary function is not strictly decreasing: h({s}) = {hs} <= h({t}) = {ht}")]
    NotDecreasing { s: f64, hs: f64, t: f64, ht: f64 },

    #[error("root not bracketed on [{a}, {b}]: f(a) = {fa}, f(b) = {fb}")]
    RootNotBracketed { a: f64, b: f64, fa: f64, fb: f64 },

    #[error("polygon edge {index} has slope other than ±1")]
    BadEdgeSlope { index: usize },

    #[error("polygon is not simple: edges {first} and {second} intersect")]
    SelfIntersecting { first: usize, second: usize },

    #[error("could not decompose polygon part: {0}")]
    Decomposition(String),

    #[error("point ({x1}, {x2}) lies outside the domain closure")]
    OutsideDomain { x1: f64, x2: f64 },

    #[error("triangle part {part} is mapped by an even rotation; its covering squares would not be diamonds")]
    NonDiamondMotion { part: usize },

    #[error("value out of range: {0}")]
    OutOfRange(String),

    #[error("resource limit: {0}")]
    Resource(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }
}
