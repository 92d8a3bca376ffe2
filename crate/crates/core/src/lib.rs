//! Exact computations with representations up to homotopy of finite groupoids
//! and the simplicial vector bundles they integrate to.

pub mod doldkan;
pub mod exactla;
pub mod fixtures;
pub mod groupoid;
pub mod ordmaps;
pub mod report;
pub mod ruth;
pub mod sdp;
pub mod split;
pub mod svb;
