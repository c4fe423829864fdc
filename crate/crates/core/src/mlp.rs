//! Feed-forward networks `head ∘ L_N ∘ act ∘ … ∘ act ∘ L_1`.

use alloc::string::String;
use alloc::vec::Vec;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use crate::affine::AffineMap;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MlpError {
    #[error("network has no layers")]
    NoLayers,
    #[error("input_dim must be positive")]
    ZeroInput,
    #[error("layer {layer} expects {expected} inputs but receives {got}")]
    DimensionChain { layer: usize, expected: usize, got: usize },
    #[error("unknown activation `{0}`")]
    UnknownActivation(String),
    #[error("unknown head `{0}`")]
    UnknownHead(String),
}

/// Hidden-layer activation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Activation {
    Relu,
    Identity,
    Sigmoid,
    Tanh,
}

impl Activation {
    pub fn parse(s: &str) -> Result<Self, MlpError> {
        match s {
            "relu" => Ok(Self::Relu),
            "identity" | "linear" | "none" => Ok(Self::Identity),
            "sigmoid" => Ok(Self::Sigmoid),
            "tanh" => Ok(Self::Tanh),
            other => Err(MlpError::UnknownActivation(other.into())),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Relu => "relu",
            Self::Identity => "identity",
            Self::Sigmoid => "sigmoid",
            Self::Tanh => "tanh",
        }
    }

    fn apply(self, v: f64) -> f64 {
        match self {
            Self::Relu => {
                if v >= 0.0 {
                    v
                } else {
                    0.0
                }
            }
            Self::Identity => v,
            Self::Sigmoid => 1.0 / (1.0 + libm::exp(-v)),
            Self::Tanh => libm::tanh(v),
        }
    }
}

/// Output head applied to the final logits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Head {
    IndexMax,
    Softmax,
}

impl Head {
    pub fn parse(s: &str) -> Result<Self, MlpError> {
        match s {
            "index_max" | "index-max" | "argmax" => Ok(Self::IndexMax),
            "softmax" => Ok(Self::Softmax),
            other => Err(MlpError::UnknownHead(other.into())),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::IndexMax => "index_max",
            Self::Softmax => "softmax",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MlpSpec {
    input_dim: usize,
    layers: Vec<AffineMap>,
    hidden_activation: Activation,
    head: Head,
}

impl MlpSpec {
    pub fn new(
        input_dim: usize,
        layers: Vec<AffineMap>,
        hidden_activation: Activation,
        head: Head,
    ) -> Result<Self, MlpError> {
        if input_dim == 0 {
            return Err(MlpError::ZeroInput);
        }
        if layers.is_empty() {
            return Err(MlpError::NoLayers);
        }
        let mut width = input_dim;
        for (i, layer) in layers.iter().enumerate() {
            if layer.cols() != width {
                return Err(MlpError::DimensionChain { layer: i, expected: layer.cols(), got: width });
            }
            width = layer.rows();
        }
        Ok(Self { input_dim, layers, hidden_activation, head })
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().map_or(0, AffineMap::rows)
    }

    pub fn layers(&self) -> &[AffineMap] {
        &self.layers
    }

    pub fn hidden_activation(&self) -> Activation {
        self.hidden_activation
    }

    pub fn head(&self) -> Head {
        self.head
    }

    /// Pre-head outputs of the last layer.
    pub fn logits(&self, x: &[f64]) -> Vec<f64> {
        let mut h = x.to_vec();
        let last = self.layers.len() - 1;
        for (i, layer) in self.layers.iter().enumerate() {
            h = layer.apply(&h);
            if i != last {
                h.iter_mut().for_each(|v| *v = self.hidden_activation.apply(*v));
            }
        }
        h
    }

    /// Index of the largest logit, lowest index on ties.
    pub fn predict(&self, x: &[f64]) -> usize {
        argmax(&self.logits(x))
    }

    pub fn softmax_output(&self, x: &[f64]) -> Vec<f64> {
        softmax(&self.logits(x))
    }
}

/// Lowest index attaining the maximum.
pub fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate().skip(1) {
        if x > v[best] {
            best = i;
        }
    }
    best
}

pub fn softmax(v: &[f64]) -> Vec<f64> {
    let m = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = v.iter().map(|x| libm::exp(x - m)).collect();
    let total: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / total).collect()
}
