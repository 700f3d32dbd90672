pub mod dirac;
pub mod free;
pub mod reflectionless;
