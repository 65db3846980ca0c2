//! Dual lower bounds for branch-and-bound nodes.
//!
//! For any feasible `α`, `min_s f(α, s)` over the supports of a node is a
//! lower bound on `c(s)` there. The minimizing `s` keeps the fixed-in
//! features and the `r` free features with the largest `(Xⱼᵀα)²`.

use nalgebra::DVector;

use super::master::{NodeBound, FREE};
use crate::datagen::Dataset;
use crate::linalg::column_dots;
use crate::losses::LossModel;

pub(crate) struct NodeDual<'a> {
    data: &'a Dataset,
    model: &'a LossModel,
    gamma: f64,
    /// Carried from node to node; neighbouring nodes have close optima.
    alpha: DVector<f64>,
    root_iterations: usize,
    node_iterations: usize,
    scratch: Vec<(f64, usize)>,
}

impl<'a> NodeDual<'a> {
    pub(crate) fn new(data: &'a Dataset, model: &'a LossModel, gamma: f64, alpha: &DVector<f64>) -> Self {
        let alpha = DVector::from_iterator(alpha.len(), alpha.iter().zip(data.y.iter()).map(|(&a, &y)| model.project(y, a)));
        Self { data, model, gamma, alpha, root_iterations: 60, node_iterations: 12, scratch: Vec::new() }
    }

    fn conjugate_sum(&self) -> f64 {
        self.alpha.iter().zip(self.data.y.iter()).map(|(&a, &y)| self.model.conjugate(y, a)).sum()
    }
}

impl NodeBound for NodeDual<'_> {
    fn bound(&mut self, status: &[i8], fixed_in: &[usize], r: usize, target: f64) -> f64 {
        let (data, model, gamma) = (self.data, self.model, self.gamma);
        let iterations = if fixed_in.is_empty() && status.iter().all(|&s| s == FREE) {
            self.root_iterations
        } else {
            self.node_iterations
        };
        let mut best = f64::NEG_INFINITY;
        let mut selected: Vec<usize> = Vec::new();
        for _ in 0..iterations {
            let xt = column_dots(&data.x, &self.alpha);
            let buf = &mut self.scratch;
            buf.clear();
            buf.extend((0..status.len()).filter(|&j| status[j] == FREE).map(|j| (xt[j] * xt[j], j)));
            let order = |a: &(f64, usize), b: &(f64, usize)| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1));
            if buf.len() > r && r > 0 {
                buf.select_nth_unstable_by(r - 1, order);
            }
            buf.truncate(r);
            selected.clear();
            selected.extend(fixed_in);
            selected.extend(buf.iter().map(|e| e.1));

            let quad: f64 = selected.iter().map(|&j| xt[j] * xt[j]).sum();
            let value = -self.conjugate_sum() - 0.5 * gamma * quad;
            best = best.max(value);
            if !value.is_finite() || best >= target {
                break;
            }

            let mut grad = DVector::from_iterator(
                data.n(),
                self.alpha.iter().zip(data.y.iter()).map(|(&a, &y)| -model.conjugate_slope(y, a)),
            );
            for &j in &selected {
                grad.axpy(-gamma * xt[j], &data.x.column(j), 1.0);
            }
            let norm_sq = grad.norm_squared();
            if !(norm_sq > 0.0 && norm_sq.is_finite()) {
                break;
            }
            let step = (target - value) / norm_sq;
            for i in 0..data.n() {
                self.alpha[i] = model.project(data.y[i], self.alpha[i] + step * grad[i]);
            }
        }
        best
    }
}
