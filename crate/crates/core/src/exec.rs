//! Per-vertex work over a frozen graph.

use alloc::vec::Vec;

use crate::ball::BallCoder;

/// Maps a function over vertex ids, giving each worker its own coder.
pub trait Executor: Sync {
    /// Results are in item order.
    fn map<T, F>(&self, items: &[u32], f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(&mut BallCoder, u32) -> T + Sync + Send;
}

/// Runs on the calling thread.
#[derive(Clone, Copy, Debug, Default)]
pub struct Sequential;

impl Executor for Sequential {
    fn map<T, F>(&self, items: &[u32], f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(&mut BallCoder, u32) -> T + Sync + Send,
    {
        let mut coder = BallCoder::new();
        items.iter().map(|&x| f(&mut coder, x)).collect()
    }
}
