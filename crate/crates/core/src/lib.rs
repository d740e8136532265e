pub mod error;
pub mod families;
pub mod hamiltonian;
pub mod hopf_lax;
pub mod inequalities;
pub mod io;
pub mod numeric;
pub mod par;
pub mod report;
pub mod space;
pub mod transport;

pub use error::{Error, Result};
pub use par::Exec;
