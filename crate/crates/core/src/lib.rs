pub mod samples;
pub mod exactla;
pub mod exec;
pub mod artin;
pub mod dgg;
pub mod grdalg;
pub mod lift;
pub mod limits;
pub mod perf;
