//! Colored graphs as actions of four involutions: rooted balls and their
//! types, nets, the staged construction, and measures on type space.

#![no_std]
extern crate alloc;

pub mod action;
pub mod ball;
pub mod blocks;
pub mod color;
pub mod construction;
pub mod error;
pub mod exec;
pub mod graph;
pub mod measures;
pub mod nets;
pub mod typespace;
pub mod word;

pub use ball::{ball, canonical_code, BallCoder, BallType, Fingerprint, RootedBall};
pub use color::{Color, ColorSet};
pub use error::{Error, Result};
pub use graph::{ColorAdjacency, ColoredGraph, Role, VertexMeta};
pub use word::{nth_word, Word};
