use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sigmoid;

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} values for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub(crate) fn uniform<R: Rng>(rows: usize, cols: usize, scale: f64, rng: &mut R) -> Self {
        let data = (0..rows * cols)
            .map(|_| rng.gen_range(-scale..scale))
            .collect();
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [f64] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    /// `out += v^T M` for a row vector `v` of length `rows`.
    fn accumulate_vec_mul(&self, v: &[f64], out: &mut [f64]) {
        for (r, &vr) in v.iter().enumerate() {
            if vr == 0.0 {
                continue;
            }
            for (o, &m) in out.iter_mut().zip(self.row(r)) {
                *o += vr * m;
            }
        }
    }

    /// `out += M d` for a column vector `d` of length `cols`.
    fn accumulate_mul_vec(&self, d: &[f64], out: &mut [f64]) {
        for (r, o) in out.iter_mut().enumerate() {
            *o += self.row(r).iter().zip(d).map(|(m, x)| m * x).sum::<f64>();
        }
    }

    /// `M += a b^T`.
    fn add_outer(&mut self, a: &[f64], b: &[f64]) {
        for (r, &ar) in a.iter().enumerate() {
            if ar == 0.0 {
                continue;
            }
            for (m, &bc) in self.row_mut(r).iter_mut().zip(b) {
                *m += ar * bc;
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gate {
    Input = 0,
    Forget = 1,
    Output = 2,
    Candidate = 3,
}

impl Gate {
    pub const ALL: [Gate; 4] = [Gate::Input, Gate::Forget, Gate::Output, Gate::Candidate];
}

/// Weights of one LSTM cell. For each gate, `W` maps inputs
/// (`input_dim x hidden_dim`), `U` maps the previous hidden state
/// (`hidden_dim x hidden_dim`) and `b` is the bias.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LstmParams {
    pub input_dim: usize,
    pub hidden_dim: usize,
    pub w: [Matrix; 4],
    pub u: [Matrix; 4],
    pub b: [Vec<f64>; 4],
}

/// Everything the backward pass needs from one time step.
#[derive(Debug, Clone)]
pub(crate) struct StepCache {
    pub x: Vec<f64>,
    pub h_prev: Vec<f64>,
    pub c_prev: Vec<f64>,
    pub gates: [Vec<f64>; 4],
    pub tanh_c: Vec<f64>,
    pub c: Vec<f64>,
    pub h: Vec<f64>,
}

impl LstmParams {
    pub fn zeros(input_dim: usize, hidden_dim: usize) -> Self {
        LstmParams {
            input_dim,
            hidden_dim,
            w: std::array::from_fn(|_| Matrix::zeros(input_dim, hidden_dim)),
            u: std::array::from_fn(|_| Matrix::zeros(hidden_dim, hidden_dim)),
            b: std::array::from_fn(|_| vec![0.0; hidden_dim]),
        }
    }

    pub(crate) fn uniform<R: Rng>(
        input_dim: usize,
        hidden_dim: usize,
        scale: f64,
        rng: &mut R,
    ) -> Self {
        let w = std::array::from_fn(|_| Matrix::uniform(input_dim, hidden_dim, scale, rng));
        let u = std::array::from_fn(|_| Matrix::uniform(hidden_dim, hidden_dim, scale, rng));
        let b = std::array::from_fn(|_| {
            (0..hidden_dim)
                .map(|_| rng.gen_range(-scale..scale))
                .collect()
        });
        LstmParams {
            input_dim,
            hidden_dim,
            w,
            u,
            b,
        }
    }

    pub fn gate_input_weights(&self, gate: Gate) -> &Matrix {
        &self.w[gate as usize]
    }

    pub(crate) fn slices_mut(&mut self) -> Vec<&mut [f64]> {
        let LstmParams { w, u, b, .. } = self;
        let mut out: Vec<&mut [f64]> = Vec::with_capacity(12);
        out.extend(w.iter_mut().map(Matrix::as_mut_slice));
        out.extend(u.iter_mut().map(Matrix::as_mut_slice));
        out.extend(b.iter_mut().map(Vec::as_mut_slice));
        out
    }

    pub(crate) fn slices(&self) -> Vec<&[f64]> {
        let mut out: Vec<&[f64]> = Vec::with_capacity(12);
        out.extend(self.w.iter().map(Matrix::as_slice));
        out.extend(self.u.iter().map(Matrix::as_slice));
        out.extend(self.b.iter().map(Vec::as_slice));
        out
    }

    fn check_shapes(&self) -> Result<()> {
        let ok = self
            .w
            .iter()
            .all(|m| m.rows() == self.input_dim && m.cols() == self.hidden_dim)
            && self
                .u
                .iter()
                .all(|m| m.rows() == self.hidden_dim && m.cols() == self.hidden_dim)
            && self.b.iter().all(|b| b.len() == self.hidden_dim);
        if ok {
            Ok(())
        } else {
            Err(Error::DimensionMismatch(
                "LSTM weight shapes are inconsistent".into(),
            ))
        }
    }

    fn step(&self, x: &[f64], h_prev: &[f64], c_prev: &[f64]) -> StepCache {
        let gates: [Vec<f64>; 4] = std::array::from_fn(|g| {
            let mut z = self.b[g].clone();
            self.w[g].accumulate_vec_mul(x, &mut z);
            self.u[g].accumulate_vec_mul(h_prev, &mut z);
            if g == Gate::Candidate as usize {
                z.iter_mut().for_each(|v| *v = v.tanh());
            } else {
                z.iter_mut().for_each(|v| *v = sigmoid(*v));
            }
            z
        });
        let [i, f, o, g] = &gates;
        let c: Vec<f64> = (0..self.hidden_dim)
            .map(|k| f[k] * c_prev[k] + i[k] * g[k])
            .collect();
        let tanh_c: Vec<f64> = c.iter().map(|v| v.tanh()).collect();
        let h = o.iter().zip(&tanh_c).map(|(o, t)| o * t).collect();
        StepCache {
            x: x.to_vec(),
            h_prev: h_prev.to_vec(),
            c_prev: c_prev.to_vec(),
            gates,
            tanh_c,
            c,
            h,
        }
    }

    /// Runs the recurrence from zero state, keeping every step for backprop.
    pub(crate) fn forward_cached(&self, inputs: &[&[f64]]) -> Result<Vec<StepCache>> {
        self.check_shapes()?;
        if inputs.is_empty() {
            return Err(Error::EmptySequence);
        }
        if let Some(x) = inputs.iter().find(|x| x.len() != self.input_dim) {
            return Err(Error::DimensionMismatch(format!(
                "input of length {} for an LSTM with input_dim {}",
                x.len(),
                self.input_dim
            )));
        }
        let mut h = vec![0.0; self.hidden_dim];
        let mut c = vec![0.0; self.hidden_dim];
        let mut steps = Vec::with_capacity(inputs.len());
        for x in inputs {
            let cache = self.step(x, &h, &c);
            h.clone_from(&cache.h);
            c.clone_from(&cache.c);
            steps.push(cache);
        }
        Ok(steps)
    }

    /// Backprop through time when only the last hidden state feeds the loss.
    /// Adds parameter gradients into `grads` and returns `dL/dx_t` per step.
    pub(crate) fn backward(
        &self,
        steps: &[StepCache],
        dh_last: &[f64],
        grads: &mut LstmParams,
    ) -> Vec<Vec<f64>> {
        let hd = self.hidden_dim;
        let mut dh = dh_last.to_vec();
        let mut dc = vec![0.0; hd];
        let mut dxs = vec![Vec::new(); steps.len()];
        for (t, s) in steps.iter().enumerate().rev() {
            let [i, f, o, g] = &s.gates;
            let mut dz: [Vec<f64>; 4] = std::array::from_fn(|_| vec![0.0; hd]);
            for k in 0..hd {
                dc[k] += dh[k] * o[k] * (1.0 - s.tanh_c[k] * s.tanh_c[k]);
                dz[Gate::Output as usize][k] = dh[k] * s.tanh_c[k] * o[k] * (1.0 - o[k]);
                dz[Gate::Input as usize][k] = dc[k] * g[k] * i[k] * (1.0 - i[k]);
                dz[Gate::Candidate as usize][k] = dc[k] * i[k] * (1.0 - g[k] * g[k]);
                dz[Gate::Forget as usize][k] = dc[k] * s.c_prev[k] * f[k] * (1.0 - f[k]);
            }
            let mut dx = vec![0.0; self.input_dim];
            let mut dh_prev = vec![0.0; hd];
            for (gate, dzg) in dz.iter().enumerate() {
                grads.w[gate].add_outer(&s.x, dzg);
                grads.u[gate].add_outer(&s.h_prev, dzg);
                for (b, d) in grads.b[gate].iter_mut().zip(dzg) {
                    *b += d;
                }
                self.w[gate].accumulate_mul_vec(dzg, &mut dx);
                self.u[gate].accumulate_mul_vec(dzg, &mut dh_prev);
            }
            for k in 0..hd {
                dc[k] *= f[k];
            }
            dh = dh_prev;
            dxs[t] = dx;
        }
        dxs
    }
}

/// Hidden states `h_1..h_T` of the recurrence started from `h_0 = c_0 = 0`.
pub fn lstm_forward(cell: &LstmParams, embedded: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let inputs: Vec<&[f64]> = embedded.iter().map(Vec::as_slice).collect();
    Ok(cell
        .forward_cached(&inputs)?
        .into_iter()
        .map(|s| s.h)
        .collect())
}
