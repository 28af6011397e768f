//! Polynomial root finding with every branch counted.
//!
//! Solvers thread a [`BranchTrace`] through their control flow and record each
//! decision node, so the number of branches a run takes is measured rather
//! than asserted. The closed-form solvers for degrees 2 to 4 and the `t^d - S`
//! solver branch only when choosing Newton seeds; power iteration on the
//! companion matrix does not branch at all.

pub mod closed_form;
pub mod complexity;
pub mod error;
pub mod fractal;
pub mod newton;
pub mod poly;
pub mod power_iter;
pub mod report;
pub mod trace;
pub mod verify;

pub use num_complex::Complex64;

pub use closed_form::{quartic_resolvent, solve_cubic, solve_quadratic, solve_quartic, QuarticPath, QuarticResolvent};
pub use complexity::{max_cup_length, pairs_within_weight, smale_bound, verify_lemma_claim, CupLengthCertificate, GeneratorPair};
pub use error::{Error, Result};
pub use fractal::{render, sector_statistics, FractalGrid, Window};
pub use newton::{newton_root, select_seed, solve_pure_power, NewtonConfig, NewtonOutcome};
pub use poly::{has_repeated_roots, roots_to_poly, MonicPolynomial, RootTuple};
pub use power_iter::{companion, detect_equal_magnitude, power_iterate, solve_by_power_iteration, CompanionMatrix, PowerIterResult};
pub use report::{solve, Method, RootReport, SolveRequest};
pub use trace::{make_report, worst_case_branches, BranchTrace, ComplexityReport};
