//! Jet-based tensor calculus for 4-dimensional metrics and the conformal
//! Einstein test built on it.

pub mod conformal;
pub mod curvature;
pub mod definition;
pub mod einstein;
pub mod expr;
pub mod jet;
pub mod tensor;

pub use curvature::{GeometryError, GeometryFrame, MetricAtPoint};
pub use definition::{DefinitionError, MetricDefinition};
pub use expr::{parse, Chart, ParseError, ScalarExpr};
pub use jet::Jet4;
pub use tensor::JetTensor;
