use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{self, Stream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    #[default]
    Elu,
    Tanh,
    /// Pass-through; only used to check dropout scaling on a linear network.
    Identity,
}

impl Activation {
    #[inline]
    fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Elu => {
                if x >= 0.0 {
                    x
                } else {
                    x.exp_m1()
                }
            }
            Activation::Tanh => x.tanh(),
            Activation::Identity => x,
        }
    }

    /// Derivative expressed through the pre-activation `x` and output `y`.
    #[inline]
    fn derivative(self, x: f64, y: f64) -> f64 {
        match self {
            Activation::Elu => {
                if x >= 0.0 {
                    1.0
                } else {
                    y + 1.0
                }
            }
            Activation::Tanh => 1.0 - y * y,
            Activation::Identity => 1.0,
        }
    }
}

fn default_output_activation() -> Activation {
    Activation::Tanh
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpConfig {
    pub input_dim: usize,
    pub hidden_dims: Vec<usize>,
    pub output_dim: usize,
    pub dropout_p: f64,
    pub seed: u64,
    #[serde(default)]
    pub hidden_activation: Activation,
    #[serde(default = "default_output_activation")]
    pub output_activation: Activation,
}

impl MlpConfig {
    /// ELU hidden layers, tanh output, dropout 0.5, three hidden layers of 512.
    pub fn new(input_dim: usize, output_dim: usize) -> Self {
        MlpConfig {
            input_dim,
            hidden_dims: vec![512, 512, 512],
            output_dim,
            dropout_p: 0.5,
            seed: 0,
            hidden_activation: Activation::Elu,
            output_activation: Activation::Tanh,
        }
    }

    pub fn with_hidden(mut self, hidden: impl Into<Vec<usize>>) -> Self {
        self.hidden_dims = hidden.into();
        self
    }

    pub fn with_dropout(mut self, p: f64) -> Self {
        self.dropout_p = p;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.input_dim == 0 {
            return Err(Error::Config("input_dim must be positive".into()));
        }
        if self.output_dim == 0 {
            return Err(Error::Config("output_dim must be positive".into()));
        }
        if self.hidden_dims.is_empty() {
            return Err(Error::Config("hidden_dims must not be empty".into()));
        }
        if self.hidden_dims.contains(&0) {
            return Err(Error::Config("hidden layer sizes must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.dropout_p) {
            return Err(Error::Config(format!(
                "dropout_p must lie in [0, 1), got {}",
                self.dropout_p
            )));
        }
        Ok(())
    }

    /// `(in, out)` for every layer, input to output.
    pub fn layer_shapes(&self) -> Vec<(usize, usize)> {
        let mut dims = Vec::with_capacity(self.hidden_dims.len() + 2);
        dims.push(self.input_dim);
        dims.extend_from_slice(&self.hidden_dims);
        dims.push(self.output_dim);
        dims.windows(2).map(|w| (w[0], w[1])).collect()
    }
}

/// One affine layer. Weights are row-major `(out_dim, in_dim)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseParams {
    pub in_dim: usize,
    pub out_dim: usize,
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
}

impl DenseParams {
    pub fn zeros(in_dim: usize, out_dim: usize) -> Self {
        DenseParams {
            in_dim,
            out_dim,
            weights: vec![0.0; in_dim * out_dim],
            biases: vec![0.0; out_dim],
        }
    }

    /// `out = W x + b`, skipping zero inputs.
    fn affine(&self, x: &[f64], out: &mut Vec<f64>) {
        let nz: Vec<(usize, f64)> = x
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(i, v)| (i, *v))
            .collect();
        out.clear();
        out.extend(self.biases.iter().enumerate().map(|(o, &b)| {
            let row = &self.weights[o * self.in_dim..(o + 1) * self.in_dim];
            nz.iter().fold(b, |acc, &(i, v)| acc + row[i] * v)
        }));
    }
}

/// Weights and biases of every layer. Also used for gradients and Adam moments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpParams {
    pub layers: Vec<DenseParams>,
}

impl MlpParams {
    pub fn zeros_like(&self) -> Self {
        MlpParams {
            layers: self
                .layers
                .iter()
                .map(|l| DenseParams::zeros(l.in_dim, l.out_dim))
                .collect(),
        }
    }

    pub fn zeros_for(config: &MlpConfig) -> Self {
        MlpParams {
            layers: config
                .layer_shapes()
                .into_iter()
                .map(|(i, o)| DenseParams::zeros(i, o))
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.layers
            .iter()
            .map(|l| l.weights.len() + l.biases.len())
            .sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Flat view: per layer, weights then biases.
    pub fn values(&self) -> impl Iterator<Item = &f64> {
        self.layers
            .iter()
            .flat_map(|l| l.weights.iter().chain(l.biases.iter()))
    }

    pub fn values_mut(&mut self) -> impl Iterator<Item = &mut f64> {
        self.layers
            .iter_mut()
            .flat_map(|l| l.weights.iter_mut().chain(l.biases.iter_mut()))
    }

    /// Flat-index access, same order as [`MlpParams::values`].
    pub fn get_mut(&mut self, mut idx: usize) -> Option<&mut f64> {
        for layer in &mut self.layers {
            if idx < layer.weights.len() {
                return layer.weights.get_mut(idx);
            }
            idx -= layer.weights.len();
            if idx < layer.biases.len() {
                return layer.biases.get_mut(idx);
            }
            idx -= layer.biases.len();
        }
        None
    }

    pub fn same_shape(&self, other: &MlpParams) -> bool {
        self.layers.len() == other.layers.len()
            && self.layers.iter().zip(&other.layers).all(|(a, b)| {
                a.in_dim == b.in_dim
                    && a.out_dim == b.out_dim
                    && a.weights.len() == b.weights.len()
                    && a.biases.len() == b.biases.len()
            })
    }

    pub(crate) fn check_same_shape(&self, other: &MlpParams, what: &str) -> Result<()> {
        if self.same_shape(other) {
            Ok(())
        } else {
            Err(Error::Shape(format!("{what} do not match parameter shapes")))
        }
    }

    pub fn add_assign(&mut self, other: &MlpParams) {
        for (a, b) in self.values_mut().zip(other.values()) {
            *a += *b;
        }
    }

    pub fn scale(&mut self, factor: f64) {
        for v in self.values_mut() {
            *v *= factor;
        }
    }

    pub fn fill_zero(&mut self) {
        for v in self.values_mut() {
            *v = 0.0;
        }
    }

    pub fn all_finite(&self) -> bool {
        self.values().all(|v| v.is_finite())
    }
}

pub enum Mode<'a> {
    Eval,
    /// Training pass; dropout masks are drawn from the stream.
    Train(&'a mut Stream),
}

/// Everything a backward pass needs from the matching forward pass.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    input: Vec<f64>,
    /// Pre-activation of every layer.
    pre: Vec<Vec<f64>>,
    /// Activation of every layer (after dropout for hidden layers).
    post: Vec<Vec<f64>>,
    /// Per hidden layer: 0 or 1/(1-p). `None` for evaluation passes.
    masks: Option<Vec<Vec<f64>>>,
}

impl ForwardCache {
    pub fn output(&self) -> &[f64] {
        self.post.last().map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn is_training(&self) -> bool {
        self.masks.is_some()
    }

    pub fn masks(&self) -> Option<&[Vec<f64>]> {
        self.masks.as_deref()
    }
}

pub struct Backward {
    pub params: MlpParams,
    pub input: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mlp {
    config: MlpConfig,
    params: MlpParams,
}

impl Mlp {
    /// Glorot-uniform weights in `±sqrt(6 / (fan_in + fan_out))`, zero biases,
    /// drawn from the config seed.
    pub fn new(config: MlpConfig) -> Result<Self> {
        config.validate()?;
        let mut stream = rng::stream(config.seed, &[rng::INIT]);
        let layers = config
            .layer_shapes()
            .into_iter()
            .map(|(fan_in, fan_out)| {
                let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
                let mut layer = DenseParams::zeros(fan_in, fan_out);
                for w in &mut layer.weights {
                    *w = stream.random_range(-limit..=limit);
                }
                layer
            })
            .collect();
        Ok(Mlp {
            config,
            params: MlpParams { layers },
        })
    }

    pub fn from_parts(config: MlpConfig, params: MlpParams) -> Result<Self> {
        config.validate()?;
        let shapes = config.layer_shapes();
        if shapes.len() != params.layers.len() {
            return Err(Error::Shape(format!(
                "config has {} layers, params have {}",
                shapes.len(),
                params.layers.len()
            )));
        }
        for (k, ((i, o), layer)) in shapes.iter().zip(&params.layers).enumerate() {
            if layer.in_dim != *i
                || layer.out_dim != *o
                || layer.weights.len() != i * o
                || layer.biases.len() != *o
            {
                return Err(Error::Shape(format!(
                    "layer {k}: expected {i}->{o}, found {}->{} with {} weights and {} biases",
                    layer.in_dim,
                    layer.out_dim,
                    layer.weights.len(),
                    layer.biases.len()
                )));
            }
        }
        if !params.all_finite() {
            return Err(Error::Input("parameters contain non-finite values".into()));
        }
        Ok(Mlp { config, params })
    }

    pub fn config(&self) -> &MlpConfig {
        &self.config
    }

    pub fn params(&self) -> &MlpParams {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut MlpParams {
        &mut self.params
    }

    pub fn input_dim(&self) -> usize {
        self.config.input_dim
    }

    pub fn output_dim(&self) -> usize {
        self.config.output_dim
    }

    fn check_input(&self, input: &[f64]) -> Result<()> {
        if input.len() != self.config.input_dim {
            return Err(Error::Shape(format!(
                "input has length {}, network expects {}",
                input.len(),
                self.config.input_dim
            )));
        }
        if let Some(i) = input.iter().position(|v| !v.is_finite()) {
            return Err(Error::Input(format!("input entry {i} is not finite")));
        }
        Ok(())
    }

    fn activation_of(&self, layer: usize) -> Activation {
        if layer + 1 == self.params.layers.len() {
            self.config.output_activation
        } else {
            self.config.hidden_activation
        }
    }

    /// Evaluation-mode forward pass without keeping intermediates.
    pub fn infer(&self, input: &[f64]) -> Result<Vec<f64>> {
        self.check_input(input)?;
        let mut x = input.to_vec();
        let mut z = Vec::new();
        for (k, layer) in self.params.layers.iter().enumerate() {
            layer.affine(&x, &mut z);
            let act = self.activation_of(k);
            x.clear();
            x.extend(z.iter().map(|&v| act.apply(v)));
        }
        Ok(x)
    }

    pub fn forward(&self, input: &[f64], mode: Mode<'_>) -> Result<(Vec<f64>, ForwardCache)> {
        self.check_input(input)?;
        let n_layers = self.params.layers.len();
        let p = self.config.dropout_p;
        let (mut stream, mut masks) = match mode {
            Mode::Eval => (None, None),
            Mode::Train(s) => (Some(s), Some(Vec::with_capacity(n_layers - 1))),
        };
        let mut pre = Vec::with_capacity(n_layers);
        let mut post: Vec<Vec<f64>> = Vec::with_capacity(n_layers);
        for (k, layer) in self.params.layers.iter().enumerate() {
            let x = if k == 0 { input } else { &post[k - 1] };
            let mut z = Vec::with_capacity(layer.out_dim);
            layer.affine(x, &mut z);
            let act = self.activation_of(k);
            let mut y: Vec<f64> = z.iter().map(|&v| act.apply(v)).collect();
            if k + 1 < n_layers {
                if let (Some(stream), Some(masks)) = (stream.as_deref_mut(), masks.as_mut()) {
                    let keep_scale = 1.0 / (1.0 - p);
                    let mask: Vec<f64> = (0..y.len())
                        .map(|_| {
                            if p > 0.0 && stream.random::<f64>() < p {
                                0.0
                            } else {
                                keep_scale
                            }
                        })
                        .collect();
                    for (v, m) in y.iter_mut().zip(&mask) {
                        *v *= m;
                    }
                    masks.push(mask);
                }
            }
            pre.push(z);
            post.push(y);
        }
        let output = post.last().cloned().unwrap_or_default();
        Ok((
            output,
            ForwardCache {
                input: input.to_vec(),
                pre,
                post,
                masks,
            },
        ))
    }

    fn check_cache(&self, cache: &ForwardCache, grad_output: &[f64]) -> Result<()> {
        let shapes_match = cache.input.len() == self.config.input_dim
            && cache.pre.len() == self.params.layers.len()
            && cache
                .pre
                .iter()
                .zip(&self.params.layers)
                .all(|(z, l)| z.len() == l.out_dim);
        if !shapes_match {
            return Err(Error::Shape(
                "forward cache was not produced by this network".into(),
            ));
        }
        if grad_output.len() != self.config.output_dim {
            return Err(Error::Shape(format!(
                "output gradient has length {}, network output is {}",
                grad_output.len(),
                self.config.output_dim
            )));
        }
        Ok(())
    }

    /// Add this pass's parameter gradients into `grads`; returns the input
    /// gradient when `want_input` is set.
    pub fn accumulate_backward(
        &self,
        cache: &ForwardCache,
        grad_output: &[f64],
        grads: &mut MlpParams,
        want_input: bool,
    ) -> Result<Option<Vec<f64>>> {
        self.check_cache(cache, grad_output)?;
        self.params.check_same_shape(grads, "gradient buffers")?;
        let n_layers = self.params.layers.len();

        // Gradient w.r.t. the current layer's post-activation (post-dropout).
        let mut grad_post = grad_output.to_vec();
        let mut grad_pre = Vec::new();
        for k in (0..n_layers).rev() {
            let layer = &self.params.layers[k];
            let act = self.activation_of(k);
            grad_pre.clear();
            grad_pre.extend(
                cache.pre[k]
                    .iter()
                    .zip(&cache.post[k])
                    .enumerate()
                    .map(|(o, (&z, &y))| {
                        // Recover the undropped activation for the derivative.
                        let (g, y_raw) = match cache.masks.as_ref().filter(|_| k + 1 < n_layers) {
                            Some(masks) => {
                                let m = masks[k][o];
                                (grad_post[o] * m, act.apply(z))
                            }
                            None => (grad_post[o], y),
                        };
                        g * act.derivative(z, y_raw)
                    }),
            );

            let x: &[f64] = if k == 0 { &cache.input } else { &cache.post[k - 1] };
            let g_layer = &mut grads.layers[k];
            for (gb, g) in g_layer.biases.iter_mut().zip(&grad_pre) {
                *gb += g;
            }
            let nz: Vec<(usize, f64)> = x
                .iter()
                .enumerate()
                .filter(|(_, v)| **v != 0.0)
                .map(|(i, v)| (i, *v))
                .collect();
            for (o, &g) in grad_pre.iter().enumerate() {
                if g == 0.0 {
                    continue;
                }
                let row = &mut g_layer.weights[o * layer.in_dim..(o + 1) * layer.in_dim];
                for &(i, v) in &nz {
                    row[i] += g * v;
                }
            }

            if k > 0 || want_input {
                let mut grad_x = vec![0.0; layer.in_dim];
                for (o, &g) in grad_pre.iter().enumerate() {
                    if g == 0.0 {
                        continue;
                    }
                    let row = &layer.weights[o * layer.in_dim..(o + 1) * layer.in_dim];
                    for (gx, w) in grad_x.iter_mut().zip(row) {
                        *gx += w * g;
                    }
                }
                if k == 0 {
                    return Ok(Some(grad_x));
                }
                grad_post = grad_x;
            }
        }
        Ok(None)
    }

    /// Gradients of a scalar loss whose output gradient is `grad_output`.
    pub fn backward(&self, cache: &ForwardCache, grad_output: &[f64]) -> Result<Backward> {
        let mut params = self.params.zeros_like();
        let input = self
            .accumulate_backward(cache, grad_output, &mut params, true)?
            .unwrap_or_default();
        Ok(Backward { params, input })
    }
}
