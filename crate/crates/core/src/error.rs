use thiserror::Error;

use crate::geometry::Point;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The active node set around `point` does not determine the polynomial
    /// space (moment matrix singular or too badly conditioned).
    #[error(
        "node deficiency at ({:.6e}, {:.6e}, {:.6e}): {active} active nodes, condition estimate {condition:.3e}",
        point[0], point[1], point[2]
    )]
    NodeDeficiency { point: Point, active: usize, condition: f64 },

    #[error("unsupported subdomain clip at node {node}: {reason}")]
    UnsupportedClip { node: usize, reason: String },

    #[error("assembly failed at node {node}: {source}")]
    Assembly {
        node: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("singular system: {0}")]
    Singular(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn at_node(self, node: usize) -> Self {
        match self {
            e @ (Error::Assembly { .. } | Error::UnsupportedClip { .. }) => e,
            other => Error::Assembly { node, source: Box::new(other) },
        }
    }
}
