//! Numerical machinery for fractional dispersive equations `i u_t + D^a u = F`:
//! spectral propagators, Littlewood–Paley cutoffs, Bessel/Hankel radial operators,
//! stable Lévy densities, mixed space–time norms and a split-step cubic solver.

pub mod bessel;
pub mod cutoff;
pub mod decay;
pub mod error;
pub mod fit;
pub mod levy;
pub mod nls;
pub mod norms;
pub mod params;
pub mod quad;
pub mod radial;
pub mod scans;
pub mod spectral;
pub mod trials;

pub use error::{Error, Result};
pub use params::DispersionParams;
