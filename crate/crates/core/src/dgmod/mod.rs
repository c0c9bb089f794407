//! Semifree DG modules, tensor products with coefficient targets, graded
//! homs and their differential, null-homotopy solving, degree windows.

mod hom;
mod module;
mod slice;
mod tensor;

pub use hom::{
    apply, check_degrees, elementary_differential, hom_add, hom_basis, hom_differential, hom_differential_at,
    hom_is_zero, hom_left_mul, hom_neg, hom_space_size, hom_sub, same_hom, solve_null_homotopy, Certificate,
    GradedHom, Homotopy, MAX_UNKNOWNS,
};
pub use module::{ModuleElement, SemifreeModule};
pub use slice::ComplexSlice;
pub use tensor::Tensor;
