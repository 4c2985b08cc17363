//! Reference elements, quadrature and degree-of-freedom maps.

mod bdm1;
mod dofmap;
mod map;
mod quadrature;

pub(crate) mod linalg;

pub use bdm1::{bdm1, bdm1_eval, ReferenceBasisBdm1, REF_EDGES, REF_NORMALS};
pub use dofmap::{build_dofmap, DofMap};
pub use map::{piola_map, AffineMap};
pub use quadrature::{gauss_legendre, quadrature, QuadratureRule};
