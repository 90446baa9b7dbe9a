use alloc::string::String;

use crate::color::Color;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("color {color} occupied at {vertex}")]
    ColorOccupied { vertex: u32, color: Color },
    #[error("loop rejected at vertex {vertex}")]
    Loop { vertex: u32 },
    #[error("vertex {vertex} out of range (vertex count {count})")]
    VertexOutOfRange { vertex: u32, count: usize },
    #[error("generator {color} is not an involution at point {point}")]
    NotInvolution { color: Color, point: u32 },
    #[error("permutation lengths disagree: {0} vs {1}")]
    SizeMismatch(usize, usize),
    #[error("diameter {diameter} does not exceed required {required}")]
    DiameterTooSmall { diameter: u64, required: u64 },
    #[error("net R_{part}: vertex {vertex} is {distance} away, bound {bound}")]
    Covering { part: usize, vertex: u32, distance: u64, bound: u64 },
    #[error("net R_{part}: vertices {a} and {b} are closer than {spacing}")]
    NetSpacing { part: usize, a: u32, b: u32, spacing: u64 },
    #[error("invalid schedule: {0}")]
    Schedule(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("stage {stage} infeasible: {reason}")]
    Infeasible { stage: u32, reason: String },
    #[error("budget exceeded: {what} needs {needed}, budget {budget}")]
    Budget { what: &'static str, needed: u64, budget: u64 },
    #[error("empty vertex set")]
    Empty,
    #[error("radius mismatch: {0} vs {1}")]
    RadiusMismatch(u32, u32),
    #[error("insufficient levels: {levels} (need an even and an odd Følner set beyond stage 1)")]
    InsufficientLevels { levels: u32 },
    #[error("value {0} outside [0, 1]")]
    OutOfUnitRange(f64),
    #[error("type not realized in region")]
    UnrealizedType,
    #[error("dihedral window too small: {0}")]
    TooSmall(u32),
    #[error("inconsistent type data: {0}")]
    Inconsistent(String),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
