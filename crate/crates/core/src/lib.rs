//! Chart-level verification engine for metallic pseudo-Riemannian
//! structures.
//!
//! The crate is organized bottom-up:
//!
//! - [`expr`]: expression trees with exact evaluation and symbolic
//!   differentiation — the backbone of everything else.
//! - [`fields`]: charts, metrics, endomorphism and vector fields with
//!   expression components.
//! - [`connection`]: connections as covariant-derivative operators,
//!   Christoffel symbols, torsion, Riemann curvature.
//! - [`metallic`]: σ±, projectors, metallic distributions, the associated
//!   tensor fields and the deformation suite.
//! - [`adapted`]: Schouten-van Kampen, Vrănceanu, Vidal and product
//!   conjugate connections with their torsion/metricity diagnostics.
//! - [`foliation`]: integrability and geodesic-invariance verdicts, induced
//!   leaf geometry, the Chen-type inequality.
//! - [`maps`]: metallic maps and leaf correspondence.
//! - [`norden`]: the complexified branch (p²+4q < 0).
//! - [`forms`]: differential forms, Hodge star and the conjugated operator
//!   calculus with its identity-conformance engine.

pub mod adapted;
pub mod connection;
pub mod error;
pub mod expr;
pub mod fields;
pub mod fixtures;
pub mod foliation;
pub mod forms;
pub mod maps;
pub mod metallic;
pub mod norden;
pub mod numeric;
pub mod sample;

pub use error::{EvalError, GeomError, ParseError};
pub use expr::ScalarExpr;
pub use fields::{Chart, EndoField, MetricField, VectorField};
pub use metallic::MetallicParams;
