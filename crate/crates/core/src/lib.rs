//! Latin-rectangle channel and slot hopping for coexisting body-area
//! networks: square construction, the collision model, brute-force checkers
//! and a superframe simulator.

pub mod analysis;
pub mod cli;
pub mod latin;
pub mod oracle;
pub mod sim;
