//! Degree-based topological indices on Erdős–Rényi random graphs.
//!
//! An index of the form `T_X(G) = Σ_{u<v, uv ∈ E} f(deg u) f(deg v)` is evaluated
//! on concrete graphs ([`index`]), its first two moments against the edge count
//! `T_1` are given in closed form ([`moments`]), and those closed forms are checked
//! by exhaustive enumeration over all labeled graphs ([`oracle`]) and by seeded
//! Monte Carlo ([`montecarlo`]).

pub mod error;
pub mod graph;
pub mod index;
pub mod moments;
pub mod montecarlo;
pub mod oracle;
pub mod stats;
pub mod vfunc;

pub use error::{Error, Result};
pub use graph::{Graph, ModelParams};
pub use index::{topo_index, topo_index_sum_form, IndexValue};
pub use moments::{MomentReport, SeriesControl};
pub use montecarlo::{MCConfig, MCResult};
pub use vfunc::VertexFunction;
