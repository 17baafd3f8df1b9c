//! Lipschitz-free space computations on finite pointed metric spaces:
//! Kantorovich–Rubinstein norms with certificates, long trapezoid moduli,
//! octahedrality indices over molecules, the betweenness criterion for
//! differentiability of the norm, and the example spaces that go with them.

pub mod diff;
pub mod error;
pub mod format;
pub mod gallery;
pub mod ltp;
pub mod metric;
pub mod octa;
pub mod scalar;
pub mod transport;

pub use error::{Error, Result};
pub use metric::{PointId, PointedMetricSpace, Subset};
pub use scalar::{Mode, Scalar};
pub use transport::{LipschitzWitness, Measure, NormCertificate, TransportPlan};
