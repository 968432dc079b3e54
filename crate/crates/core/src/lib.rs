pub mod curve;
pub mod dist;
pub mod duality;
pub mod error;
pub mod normal;
pub mod pld;
pub mod mech;
pub mod cnd;
pub mod edgeworth;
pub mod account;
pub mod oracle;
pub mod census;
pub mod cli;
