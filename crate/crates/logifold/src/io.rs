//! Text formats for prediction matrices, ground truth, routing specs and
//! network weights.
//!
//! Prediction file:
//! ```text
//! # model_id=resnet labels=cat,dog,ship
//! test:0,0.1,0.7,0.2
//! test:1,0.9,0.05,0.05
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use logifold_core::{
    Activation, AffineMap, FuzzyLinearLogicalGraph, GroundTruth, Head, LinearLogicalGraph, MlpError, MlpSpec,
    PredictionMatrix,
};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Fractional digits written for probabilities.
pub const PROBABILITY_DIGITS: usize = 9;

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io { path: path.into(), source })
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| Error::Io { path: path.into(), source })
}

fn schema(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Schema { path: path.into(), line, message: message.into() }
}

/// Content lines with their 1-based numbers; blank lines are skipped.
fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().map(|(i, l)| (i + 1, l.trim_end_matches('\r'))).filter(|(_, l)| !l.trim().is_empty())
}

pub fn parse_predictions(text: &str, path: &Path) -> Result<PredictionMatrix> {
    let mut it = lines(text);
    let (_, header) = it.next().ok_or_else(|| schema(path, 1, "empty file"))?;
    let fields = header.strip_prefix('#').ok_or_else(|| schema(path, 1, "missing `# model_id=… labels=…` header"))?;
    let mut model_id = None;
    let mut labels = None;
    for field in fields.split_whitespace() {
        match field.split_once('=') {
            Some(("model_id", v)) => model_id = Some(v.to_string()),
            Some(("labels", v)) => labels = Some(v.split(',').map(str::to_string).collect::<Vec<_>>()),
            _ => return Err(schema(path, 1, format!("unexpected header field `{field}`"))),
        }
    }
    let model_id = model_id.filter(|m| !m.is_empty()).ok_or_else(|| schema(path, 1, "header lacks model_id"))?;
    let labels = labels.ok_or_else(|| schema(path, 1, "header lacks labels"))?;
    let mut ids = Vec::new();
    let mut rows = Vec::new();
    for (line, text) in it {
        let mut cells = text.split(',');
        let id = cells.next().unwrap_or_default().trim();
        if id.is_empty() {
            return Err(schema(path, line, "empty instance id"));
        }
        let row = cells
            .map(|c| c.trim().parse::<f64>().map_err(|_| schema(path, line, format!("bad probability `{c}`"))))
            .collect::<Result<Vec<_>>>()?;
        ids.push(id.to_string());
        rows.push(row);
    }
    Ok(PredictionMatrix::new(model_id, labels, ids, rows)?)
}

pub fn load_predictions(path: &Path) -> Result<PredictionMatrix> {
    parse_predictions(&read_text(path)?, path)
}

pub fn format_predictions(m: &PredictionMatrix) -> String {
    let mut out = format!("# model_id={} labels={}\n", m.model_id(), m.vocab().join(","));
    for (i, id) in m.instance_ids().iter().enumerate() {
        out.push_str(id);
        for p in m.row(i) {
            let _ = write!(out, ",{p:.prec$}", prec = PROBABILITY_DIGITS);
        }
        out.push('\n');
    }
    out
}

/// Ground truth as `instance_id,label` lines; `#` lines are comments.
pub fn parse_truth(text: &str, path: &Path) -> Result<GroundTruth> {
    let mut ids = Vec::new();
    let mut labels = Vec::new();
    for (line, text) in lines(text).filter(|(_, l)| !l.starts_with('#')) {
        let (id, label) = text.split_once(',').ok_or_else(|| schema(path, line, "expected `instance_id,label`"))?;
        let (id, label) = (id.trim(), label.trim());
        if id.is_empty() || label.is_empty() || label.contains(',') {
            return Err(schema(path, line, "expected `instance_id,label`"));
        }
        ids.push(id.to_string());
        labels.push(label.to_string());
    }
    Ok(GroundTruth::new(ids, labels)?)
}

pub fn load_truth(path: &Path) -> Result<GroundTruth> {
    parse_truth(&read_text(path)?, path)
}

/// A filter chart and the expert chart for each of its coarse labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoutingSpec {
    pub filter: String,
    pub experts: BTreeMap<String, String>,
}

/// `filter=<model_id>` then one `<coarse label>=<expert model_id>` per line.
pub fn parse_routing(text: &str, path: &Path) -> Result<RoutingSpec> {
    let mut filter = None;
    let mut experts = BTreeMap::new();
    for (line, text) in lines(text).filter(|(_, l)| !l.starts_with('#')) {
        let (key, value) = text.split_once('=').ok_or_else(|| schema(path, line, "expected `key=value`"))?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() || value.is_empty() {
            return Err(schema(path, line, "expected `key=value`"));
        }
        if key == "filter" {
            if filter.replace(value.to_string()).is_some() {
                return Err(schema(path, line, "filter given twice"));
            }
        } else if experts.insert(key.to_string(), value.to_string()).is_some() {
            return Err(schema(path, line, format!("coarse label `{key}` mapped twice")));
        }
    }
    let filter = filter.ok_or_else(|| schema(path, 0, "missing `filter=<model_id>` line"))?;
    Ok(RoutingSpec { filter, experts })
}

pub fn load_routing(path: &Path) -> Result<RoutingSpec> {
    parse_routing(&read_text(path)?, path)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayerFile {
    pub weights: Vec<Vec<f64>>,
    pub bias: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub activation: Option<String>,
}

/// Weight file: `{"input_dim": n, "head": "index_max" | "softmax",
/// "layers": [{"weights": [[…]], "bias": […], "activation": "relu"}, …]}`.
/// Hidden layers share one activation; the output layer's is `identity` or
/// omitted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MlpFile {
    pub input_dim: usize,
    pub head: String,
    pub layers: Vec<LayerFile>,
}

impl MlpFile {
    pub fn from_spec(mlp: &MlpSpec) -> Self {
        let last = mlp.layers().len() - 1;
        let layers = mlp
            .layers()
            .iter()
            .enumerate()
            .map(|(i, l)| LayerFile {
                weights: l.row_iter().map(<[f64]>::to_vec).collect(),
                bias: l.bias().to_vec(),
                activation: Some(if i == last { Activation::Identity } else { mlp.hidden_activation() }.name().into()),
            })
            .collect();
        Self { input_dim: mlp.input_dim(), head: mlp.head().name().into(), layers }
    }

    pub fn to_spec(&self) -> Result<MlpSpec> {
        let head = Head::parse(&self.head)?;
        let mut hidden: Option<Activation> = None;
        let last = self.layers.len().saturating_sub(1);
        let mut layers = Vec::with_capacity(self.layers.len());
        for (i, layer) in self.layers.iter().enumerate() {
            let activation = layer.activation.as_deref().map(Activation::parse).transpose()?;
            if i == last {
                if activation.is_some_and(|a| a != Activation::Identity) {
                    return Err(Error::Usage(format!("output layer {i} must not carry an activation")));
                }
            } else {
                let a = activation.unwrap_or(Activation::Relu);
                if hidden.is_some_and(|h| h != a) {
                    return Err(Error::Usage(format!("layer {i} mixes hidden activations")));
                }
                hidden = Some(a);
            }
            if layer.weights.len() != layer.bias.len() {
                return Err(MlpError::DimensionChain {
                    layer: i,
                    expected: layer.weights.len(),
                    got: layer.bias.len(),
                }
                .into());
            }
            layers.push(AffineMap::from_rows(&layer.weights, layer.bias.clone())?);
        }
        Ok(MlpSpec::new(self.input_dim, layers, hidden.unwrap_or(Activation::Relu), head)?)
    }
}

pub fn parse_mlp(text: &str, path: &Path) -> Result<MlpSpec> {
    let file: MlpFile = serde_json::from_str(text).map_err(|source| Error::Json { path: path.into(), source })?;
    file.to_spec()
}

pub fn load_mlp(path: &Path) -> Result<MlpSpec> {
    parse_mlp(&read_text(path)?, path)
}

pub fn format_mlp(mlp: &MlpSpec) -> String {
    serde_json::to_string_pretty(&MlpFile::from_spec(mlp)).expect("weights serialize") + "\n"
}

/// Serialized compiler output with the settings that produced it.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GraphFile {
    Crisp { seed: u64, graph: LinearLogicalGraph },
    Fuzzy { seed: u64, graph: FuzzyLinearLogicalGraph },
}

pub fn format_graph(graph: &GraphFile) -> String {
    serde_json::to_string_pretty(graph).expect("graphs serialize") + "\n"
}

pub fn load_graph(path: &Path) -> Result<GraphFile> {
    serde_json::from_str(&read_text(path)?).map_err(|source| Error::Json { path: PathBuf::from(path), source })
}
