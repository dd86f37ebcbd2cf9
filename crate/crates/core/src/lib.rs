pub mod analysis;
pub mod error;
pub mod grids;
pub mod pipeline;
pub mod roots;
pub mod schmidt;
pub mod solvers;
pub mod special;
pub mod transverse;
pub mod units;
