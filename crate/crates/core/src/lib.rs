//! Second-order statistics of dual-branch selection combining under
//! Nakagami-m fading with cochannel interference and noise.

pub mod specfun;
pub mod model;
pub mod analytic;
pub mod montecarlo;
pub mod cli;
