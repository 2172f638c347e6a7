//! On-disk formats: the text policy file and the sweep CSV.

pub mod policy_file;
pub mod sweep_csv;

pub use policy_file::{read_policy_file, write_policy_file, PolicyFile};
pub use sweep_csv::{write_sweep_csv, SweepRow, SWEEP_HEADER};
