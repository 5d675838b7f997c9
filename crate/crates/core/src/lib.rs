//! Exact-arithmetic exterior calculus for polynomial foliations on
//! projective space: sparse rational polynomials with a finite-field mirror,
//! differential forms and vector fields, rational maps, pull-back
//! foliations, and point-level singularity analysis.

pub mod elimination;
pub mod exterior;
pub mod finite;
pub mod foliation;
pub mod gallery;
pub mod gcd;
pub mod identity_suite;
pub mod json;
pub mod linalg;
pub mod parse;
pub mod poly;
pub mod ratmap;
pub mod sample;
pub mod singular;

pub use exterior::{PForm, PVec};
pub use poly::Poly;

#[cfg(test)]
mod concurrency_contract {
    fn assert_shareable<T: Send + Sync>() {}

    #[test]
    fn values_are_send_and_sync() {
        assert_shareable::<crate::Poly>();
        assert_shareable::<crate::PForm>();
        assert_shareable::<crate::PVec>();
        assert_shareable::<crate::ratmap::RationalMap>();
        assert_shareable::<crate::foliation::Foliation1D>();
        assert_shareable::<crate::foliation::FoliationQ>();
        assert_shareable::<crate::singular::PointReport>();
    }
}
