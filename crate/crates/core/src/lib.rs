//! Lines on quartic K3 surfaces over finite fields of characteristic 3.

pub mod cli;
pub mod families;
pub mod gf3;
pub mod graph;
pub mod line_analysis;
pub mod linalg;
pub mod poly;
pub mod proj;
pub mod report;
pub mod solve;
pub mod surface;
