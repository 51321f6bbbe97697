use thiserror::Error;

#[derive(Debug, Error)]
pub enum MisError {
    #[error("vertex {vertex} out of range for graph with {vertices} vertices")]
    VertexOutOfRange { vertex: u64, vertices: usize },
    #[error("self-loop on vertex {0}")]
    SelfLoop(u32),
    #[error("invalid solution: {0}")]
    InvalidSolution(String),
    #[error("malformed graph file at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
