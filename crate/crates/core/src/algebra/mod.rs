//! Polynomial algebra over ℚ in cotangent variables.

pub mod groebner;
pub mod linear;
pub mod poly;

pub use groebner::{
    apply_syzygy, codim, determinant, groebner, is_groebner, minors, normal_form, s_polynomial,
    syzygy_module, Codim, ModuleElement, ModuleGb,
};
pub use poly::{gcd, is_squarefree, Monomial, Poly};
