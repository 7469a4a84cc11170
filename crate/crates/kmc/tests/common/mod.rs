//! Shared support for the integration suites: an independent CTL oracle
//! and deterministic random corpora. Each test binary uses a subset.
#![allow(dead_code)]

pub mod gen;
pub mod oracle;
