//! Fixtures shared by the integration and acceptance targets.
#![allow(dead_code)]

/// Predicted classes (0-based) of one published eight-variant group.
pub const HARD_GROUP: [usize; 8] = [1, 1, 0, 0, 1, 2, 0, 1];

/// Published class distributions of one eight-variant group.
pub const SOFT_GROUP: [[f64; 3]; 8] = [
    [0.8, 0.1, 0.1],
    [0.62, 0.25, 0.13],
    [0.15, 0.8, 0.05],
    [0.3, 0.05, 0.65],
    [0.7, 0.15, 0.15],
    [0.05, 0.05, 0.9],
    [0.3, 0.4, 0.3],
    [0.95, 0.02, 0.03],
];

/// Column sums of `SOFT_GROUP` divided by 8, worked by hand.
pub const SOFT_GROUP_MEAN: [f64; 3] = [3.87 / 8.0, 1.82 / 8.0, 2.31 / 8.0];

pub mod oracles;

/// Published Fuzzy/RF block of the Chess table as
/// `(samples, accuracy, soft, hard)`.
pub const FUZZY_RF_BLOCK: [(usize, f64, f64, f64); 4] = [
    (19, 0.59, 0.8, 0.88),
    (31, 0.6, 0.75, 0.81),
    (49, 0.57, 0.74, 0.78),
    (61, 0.57, 0.73, 0.81),
];
