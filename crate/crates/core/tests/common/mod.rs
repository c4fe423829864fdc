#![allow(dead_code)]

use logifold_core::{Activation, AffineMap, Head, MlpSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random network with uniform(-1, 1) weights and biases.
pub fn random_mlp(widths: &[usize], head: Head, seed: u64) -> MlpSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let layers = widths
        .windows(2)
        .map(|w| {
            let weights = (0..w[0] * w[1]).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let bias = (0..w[1]).map(|_| rng.gen_range(-1.0..1.0)).collect();
            AffineMap::new(w[1], w[0], weights, bias).unwrap()
        })
        .collect();
    MlpSpec::new(widths[0], layers, Activation::Relu, head).unwrap()
}

pub fn random_points(dim: usize, count: usize, scale: f64, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| (0..dim).map(|_| rng.gen_range(-scale..scale)).collect()).collect()
}

/// Smallest |value| among every hidden pre-activation, logit and pairwise
/// logit difference met by the direct forward pass: the distance to the
/// nearest decider boundary in decider output space.
pub fn boundary_margin(mlp: &MlpSpec, x: &[f64]) -> f64 {
    let mut h = x.to_vec();
    let mut margin = f64::INFINITY;
    let last = mlp.layers().len() - 1;
    for (i, layer) in mlp.layers().iter().enumerate() {
        h = layer.apply(&h);
        margin = h.iter().fold(margin, |m, v| m.min(v.abs()));
        if i != last {
            h.iter_mut().for_each(|v| *v = v.max(0.0));
        }
    }
    for i in 0..h.len() {
        for j in (i + 1)..h.len() {
            margin = margin.min((h[i] - h[j]).abs());
        }
    }
    margin
}

/// Reference forward pass written independently of `MlpSpec::logits`.
pub fn forward_logits(mlp: &MlpSpec, x: &[f64]) -> Vec<f64> {
    let mut h = x.to_vec();
    let n = mlp.layers().len();
    for (i, layer) in mlp.layers().iter().enumerate() {
        let mut next = Vec::with_capacity(layer.rows());
        for r in 0..layer.rows() {
            let mut acc = layer.bias()[r];
            for (w, v) in layer.row(r).iter().zip(&h) {
                acc += w * v;
            }
            next.push(if i + 1 < n && acc < 0.0 { 0.0 } else { acc });
        }
        h = next;
    }
    h
}

pub fn argmax_lowest(v: &[f64]) -> usize {
    let mut best = 0;
    for i in 1..v.len() {
        if v[i] > v[best] {
            best = i;
        }
    }
    best
}

pub fn softmax_ref(v: &[f64]) -> Vec<f64> {
    let m = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = v.iter().map(|x| (x - m).exp()).collect();
    let s: f64 = e.iter().sum();
    e.iter().map(|x| x / s).collect()
}
