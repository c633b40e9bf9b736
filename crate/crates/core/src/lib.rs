//! Whitney finite elements on simplicial meshes of `R^4` with auxiliary-space
//! multigrid preconditioners for the `H(d)` problems `τ⟨u,v⟩ + ⟨du,dv⟩`.

pub mod auxprec;
pub mod error;
pub mod femspace;
pub mod interp;
pub mod krylov;
pub mod mesh;
pub mod mgscalar;
pub mod proxy4;
pub mod quadrature;
pub mod smoother;
pub mod sparse;

pub use error::{Error, Result};
