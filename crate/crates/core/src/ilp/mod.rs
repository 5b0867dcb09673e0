//! The linearized model and its text serializations.

mod lp;
mod model;
mod mps;

pub use lp::{read_lp, write_lp};
pub use model::{build_ilp, x_name, y_name, z_name, Constraint, IlpModel, ObjectiveSense, RowSense};
pub use mps::{read_mps, write_mps, MpsFormat};
