pub mod multiport;
pub mod walkgraph;
pub mod sshmodel;
pub mod entangle;
pub mod experiments;
