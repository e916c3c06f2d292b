//! File formats, command line, scalability bench and HTTP service around
//! [`sqlsynth_core`].

pub mod bench;
pub mod cli;
pub mod clock;
pub mod csv_tables;
pub mod problem_file;
pub mod service;
