//! One-hidden-layer ReLU network with a softmax output, in f64.

use rand::Rng;

#[derive(Clone, Debug, PartialEq)]
pub struct Mlp {
    pub input: usize,
    pub hidden: usize,
    pub output: usize,
    /// `hidden x input`, row-major.
    pub w1: Vec<f64>,
    pub b1: Vec<f64>,
    /// `output x hidden`, row-major.
    pub w2: Vec<f64>,
    pub b2: Vec<f64>,
}

/// Activations kept from a forward pass for backpropagation.
pub struct Forward {
    pub hidden: Vec<f64>,
    pub probs: Vec<f64>,
}

pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|&z| (z - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

impl Mlp {
    pub fn zeros(input: usize, hidden: usize, output: usize) -> Self {
        Mlp {
            input,
            hidden,
            output,
            w1: vec![0.0; hidden * input],
            b1: vec![0.0; hidden],
            w2: vec![0.0; output * hidden],
            b2: vec![0.0; output],
        }
    }

    /// He-uniform weights, zero biases.
    pub fn init<R: Rng>(input: usize, hidden: usize, output: usize, rng: &mut R) -> Self {
        let mut m = Self::zeros(input, hidden, output);
        let a1 = (6.0 / input as f64).sqrt();
        m.w1.iter_mut().for_each(|w| *w = rng.gen_range(-a1..a1));
        let a2 = (6.0 / hidden as f64).sqrt();
        m.w2.iter_mut().for_each(|w| *w = rng.gen_range(-a2..a2));
        m
    }

    pub fn forward(&self, x: &[f64]) -> Forward {
        debug_assert_eq!(x.len(), self.input);
        let hidden: Vec<f64> = self
            .w1
            .chunks_exact(self.input)
            .zip(&self.b1)
            .map(|(row, b)| (b + row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>()).max(0.0))
            .collect();
        let logits: Vec<f64> = self
            .w2
            .chunks_exact(self.hidden)
            .zip(&self.b2)
            .map(|(row, b)| b + row.iter().zip(&hidden).map(|(w, h)| w * h).sum::<f64>())
            .collect();
        Forward {
            hidden,
            probs: softmax(&logits),
        }
    }

    /// Class-weighted mean cross-entropy over a batch.
    pub fn loss(&self, xs: &[&[f64]], ys: &[usize], class_weights: &[f64]) -> f64 {
        let total: f64 = xs
            .iter()
            .zip(ys)
            .map(|(x, &y)| -class_weights[y] * self.forward(x).probs[y].max(f64::MIN_POSITIVE).ln())
            .sum();
        total / xs.len() as f64
    }

    /// Loss and its gradient. The gradient is returned in an `Mlp` with the
    /// same shape as `self`.
    pub fn loss_and_grad(&self, xs: &[&[f64]], ys: &[usize], class_weights: &[f64]) -> (f64, Mlp) {
        let mut grad = Mlp::zeros(self.input, self.hidden, self.output);
        let scale = 1.0 / xs.len() as f64;
        let mut loss = 0.0;
        let mut d_logits = vec![0.0; self.output];
        let mut d_hidden = vec![0.0; self.hidden];
        for (x, &y) in xs.iter().zip(ys) {
            let f = self.forward(x);
            let w = class_weights[y] * scale;
            loss -= w * f.probs[y].max(f64::MIN_POSITIVE).ln();

            for (o, d) in d_logits.iter_mut().enumerate() {
                *d = w * (f.probs[o] - (o == y) as u8 as f64);
            }
            d_hidden.iter_mut().for_each(|d| *d = 0.0);
            for (o, &dz) in d_logits.iter().enumerate() {
                grad.b2[o] += dz;
                let row = o * self.hidden;
                for h in 0..self.hidden {
                    grad.w2[row + h] += dz * f.hidden[h];
                    d_hidden[h] += self.w2[row + h] * dz;
                }
            }
            for h in 0..self.hidden {
                if f.hidden[h] <= 0.0 {
                    continue;
                }
                let dz = d_hidden[h];
                grad.b1[h] += dz;
                let row = h * self.input;
                for (g, v) in grad.w1[row..row + self.input].iter_mut().zip(x.iter()) {
                    *g += dz * v;
                }
            }
        }
        (loss, grad)
    }

    /// `self -= rate * grad`.
    pub fn step(&mut self, grad: &Mlp, rate: f64) {
        for (p, g) in self.params_mut().zip(grad.params()) {
            *p -= rate * g;
        }
    }

    pub fn params(&self) -> impl Iterator<Item = f64> + '_ {
        self.w1
            .iter()
            .chain(&self.b1)
            .chain(&self.w2)
            .chain(&self.b2)
            .copied()
    }

    pub fn params_mut(&mut self) -> impl Iterator<Item = &mut f64> {
        self.w1
            .iter_mut()
            .chain(self.b1.iter_mut())
            .chain(self.w2.iter_mut())
            .chain(self.b2.iter_mut())
    }

    pub fn param_count(&self) -> usize {
        self.w1.len() + self.b1.len() + self.w2.len() + self.b2.len()
    }

    /// Rounds every parameter to the nearest f32.
    pub fn to_f32_precision(&self) -> Mlp {
        let mut m = self.clone();
        m.params_mut().for_each(|p| *p = *p as f32 as f64);
        m
    }
}
