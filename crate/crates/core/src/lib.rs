pub mod dist;
pub mod measures;
pub mod protocols;
pub mod quantum;
pub mod cli;
