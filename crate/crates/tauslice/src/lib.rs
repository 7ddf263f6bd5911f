//! Exact computations with stable bound quivers: graded bases, τ-slices,
//! separated quivers, trivial extensions, Koszul checks and McKay examples.

pub mod corpus;
pub mod extensions;
pub mod graded;
pub mod iso;
pub mod koszul;
pub mod linalg;
pub mod mckay;
pub mod present;
pub mod quiver;
pub mod separated;
pub mod slices;
pub mod stability;
pub mod structalg;
