//! Command-line front end and quantum box generation on top of
//! [`nsbox_core`].

pub mod cli;
pub mod json;
pub mod quantum;
