pub mod error;
pub mod linalg;
pub mod polyalg;
pub mod quad;
pub mod roots;
pub mod specfun;
pub mod sweep;
pub mod melem;
pub mod opmethod;
pub mod anharm;
pub mod wkb;
pub mod refsolve;
