//! Embedding + LSTM and bidirectional LSTM classifiers, trained from scratch
//! with backpropagation through time and Adam.

mod adam;
mod classifier;
mod lstm;
mod train;

pub use adam::AdamState;
pub use classifier::{Architecture, Backprop, LstmClassifier, LstmGradients};
pub use lstm::{lstm_forward, Gate, LstmParams, Matrix};
pub use train::{train_neural, train_neural_with_history, NeuralConfig};
