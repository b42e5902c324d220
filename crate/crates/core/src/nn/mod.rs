//! Dense ReLU networks with exact reverse-mode gradients and Adam.

mod adam;
pub mod gradcheck;
mod model_io;
mod network;

pub use adam::{AdamConfig, AdamState};
pub use model_io::{ModelDocument, MODEL_FORMAT_VERSION};
pub use network::{mse, DenseNetwork, ForwardTrace, GradientSet, Layer};
pub(crate) use network::mse_grad;
