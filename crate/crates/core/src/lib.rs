//! Exact-arithmetic homological algebra for S1-complexes.
//!
//! The crate computes, entirely over arbitrary-precision integers and
//! rationals, the three cyclic homology theories of a bounded S1-complex
//! (negative, periodic and quotient Laurent windows in the degree-2
//! variable `u`), spectral sequences of filtered S1-complexes, mapping
//! telescopes and direct-limit homology of stage systems, and it builds
//! Floer-style S1-complexes from orbit catalogs via local differential
//! rules.
//!
//! No floating point appears anywhere: homology groups are reported as
//! free rank plus invariant factors, certified by Smith normal form.
//!
//! ```
//! use psh_core::graded::Generator;
//! use psh_core::ring::coeff_from_i64;
//! use psh_core::s1::complex_from_entries;
//! use psh_core::{cyclic_homology, LaurentWindow, Ring};
//!
//! // hat in degree 1, check in degree 0, delta_1(hat) = 3 check:
//! // the Laurent-window homology is Z/3 in even degrees, 0 in odd.
//! let c = complex_from_entries(
//!     Ring::Z,
//!     vec![Generator::new("hat", 1), Generator::new("check", 0)],
//!     &[(1, "hat", "check", coeff_from_i64(3))],
//! )
//! .unwrap();
//! let h = cyclic_homology(&c, LaurentWindow::Periodic, -2, 2).unwrap();
//! assert_eq!(h[&0].to_string(), "Z/3");
//! assert!(h[&1].is_zero());
//! ```

pub mod builder;
pub mod filtration;
pub mod graded;
pub mod json;
pub mod laurent;
pub mod matrix;
pub mod presentation;
pub mod ring;
pub mod s1;
pub mod snf;
pub mod telescope;

pub use graded::{GradedModule, Generator};
pub use laurent::{cyclic_homology, LaurentWindow, TruncatedComplex};
pub use matrix::ExactMatrix;
pub use presentation::{homology_segment, AbelianGroupPresentation};
pub use ring::{Coeff, Ring};
pub use s1::{S1Complex, S1Homotopy, S1Map, VerifyOutcome};
pub use snf::{smith_normal_form, solve_preimage, SmithNormalForm};
