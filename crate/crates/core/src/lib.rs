//! Whispering-gallery modes of a dielectric sphere, the rotational
//! coupling between the sphere's spin and the optical angular momentum
//! stored in those modes, and the resulting precession dynamics.

pub mod coupling;
pub mod dynamics;
pub mod specfun;
pub mod wgm;
