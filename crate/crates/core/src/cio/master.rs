//! The outer-approximation master problem
//!
//! ```text
//! min η  s.t.  η ≥ c(sᵢ) + ∇c(sᵢ)ᵀ(s − sᵢ) for every cut i,  s ∈ {0,1}^p, Σs ≤ k
//! ```
//!
//! solved exactly by enumeration on small instances and by a depth-first
//! branch-and-bound otherwise. The branch-and-bound can also prune nodes with
//! an external lower bound on the true objective (see [`NodeBound`]).

use std::time::Instant;

use nalgebra::DVector;

use crate::support::Support;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MasterStrategy {
    /// Enumeration when `p ≤ 20` and `C(p, k)` is small, branch-and-bound
    /// otherwise.
    #[default]
    Auto,
    BranchAndBound,
    Enumerate,
}

/// Largest number of size-`k` subsets the automatic strategy enumerates.
const ENUMERATION_LIMIT: f64 = 200_000.0;

/// Accumulated linear cuts, each stored as `constant + coefᵀs`.
#[derive(Debug, Clone)]
pub struct CutPool {
    p: usize,
    constants: Vec<f64>,
    coefs: Vec<Vec<f64>>,
    supports: Vec<Support>,
}

impl CutPool {
    pub fn new(p: usize) -> Self {
        Self { p, constants: Vec::new(), coefs: Vec::new(), supports: Vec::new() }
    }

    /// Adds the cut `η ≥ value + gradᵀ(s − at)`.
    pub fn add(&mut self, at: &Support, value: f64, grad: &DVector<f64>) {
        assert_eq!(grad.len(), self.p, "cut gradient has the wrong length");
        let constant = value - at.indices().iter().map(|&j| grad[j]).sum::<f64>();
        self.constants.push(constant);
        self.coefs.push(grad.iter().copied().collect());
        self.supports.push(at.clone());
    }

    pub fn len(&self) -> usize {
        self.constants.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constants.is_empty()
    }

    pub fn p(&self) -> usize {
        self.p
    }

    /// Supports at which cuts were generated, in insertion order.
    pub fn supports(&self) -> &[Support] {
        &self.supports
    }

    /// `max_i constant_i + coef_iᵀs`, or `−∞` for an empty pool.
    pub fn model_value(&self, s: &[usize]) -> f64 {
        self.constants
            .iter()
            .zip(&self.coefs)
            .map(|(c0, g)| c0 + s.iter().map(|&j| g[j]).sum::<f64>())
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

#[derive(Debug, Clone)]
pub struct MasterSolution {
    pub support: Support,
    /// Master objective at `support`.
    pub eta: f64,
    /// A valid lower bound on the optimum over all feasible supports; equals
    /// `eta` when `complete` and no node was pruned by an external bound.
    pub lower_bound: f64,
    /// False when the deadline interrupted the search.
    pub complete: bool,
    pub nodes: usize,
}

fn binomial(p: usize, k: usize) -> f64 {
    let k = k.min(p - k.min(p));
    (0..k).fold(1.0, |acc, i| acc * (p - i) as f64 / (i + 1) as f64)
}

/// Solves the master problem over supports with at most `k` features.
///
/// `incumbent` seeds the search with a known feasible support. Every cut
/// coefficient is nonpositive, so an optimal support of size `min(k, p)`
/// always exists and only those are enumerated.
pub fn solve_master(
    pool: &CutPool,
    k: usize,
    incumbent: Option<&Support>,
    strategy: MasterStrategy,
    deadline: Option<Instant>,
) -> MasterSolution {
    let p = pool.p;
    let k = k.min(p);
    if pool.is_empty() {
        let support = incumbent.cloned().unwrap_or_else(|| Support::new(0..k, k));
        return MasterSolution { support, eta: f64::NEG_INFINITY, lower_bound: f64::NEG_INFINITY, complete: true, nodes: 0 };
    }
    let enumerate = match strategy {
        MasterStrategy::Enumerate => true,
        MasterStrategy::BranchAndBound => false,
        MasterStrategy::Auto => p <= 20 && binomial(p, k) <= ENUMERATION_LIMIT,
    };
    if enumerate {
        enumerate_master(pool, k, deadline)
    } else {
        branch_and_bound(pool, k, incumbent, deadline, None)
    }
}

/// Lower bound on the true objective over the supports of a
/// branch-and-bound node.
pub(crate) trait NodeBound {
    /// `status[j]` is [`IN`], [`OUT`] or [`FREE`]; up to `r` free features
    /// may be added to `fixed_in`. May stop early once `target` is reached.
    fn bound(&mut self, status: &[i8], fixed_in: &[usize], r: usize, target: f64) -> f64;
}

/// External pruning for [`solve_master_pruned`]: nodes whose bound reaches
/// `upper − epsilon` cannot contain a support better than `upper` by more
/// than `epsilon`.
pub(crate) struct Pruning<'b> {
    pub bound: &'b mut dyn NodeBound,
    pub upper: f64,
    pub epsilon: f64,
}

/// [`solve_master`] with nodes also pruned by an external bound. The
/// incumbent must be a support whose cut is in the pool, so that its model
/// value is its true objective.
pub(crate) fn solve_master_pruned(
    pool: &CutPool,
    k: usize,
    incumbent: &Support,
    strategy: MasterStrategy,
    deadline: Option<Instant>,
    pruning: Pruning<'_>,
) -> MasterSolution {
    let p = pool.p;
    let k = k.min(p);
    let enumerate = match strategy {
        MasterStrategy::Enumerate => true,
        MasterStrategy::BranchAndBound => false,
        MasterStrategy::Auto => p <= 20 && binomial(p, k) <= ENUMERATION_LIMIT,
    };
    if enumerate || pool.is_empty() {
        return solve_master(pool, k, Some(incumbent), strategy, deadline);
    }
    branch_and_bound(pool, k, Some(incumbent), deadline, Some(pruning))
}

fn enumerate_master(pool: &CutPool, k: usize, deadline: Option<Instant>) -> MasterSolution {
    let p = pool.p;
    let mut cur: Vec<usize> = (0..k).collect();
    let mut best = (pool.model_value(&cur), cur.clone());
    let mut nodes = 1usize;
    // Next combination in lexicographic order.
    while let Some(pos) = (0..k).rev().find(|&i| cur[i] < p - k + i) {
        cur[pos] += 1;
        for i in pos + 1..k {
            cur[i] = cur[i - 1] + 1;
        }
        nodes += 1;
        let v = pool.model_value(&cur);
        if v < best.0 {
            best = (v, cur.clone());
        }
        if nodes.is_multiple_of(4096) && deadline.is_some_and(|d| Instant::now() >= d) {
            let lb = root_bound(pool, k);
            return MasterSolution {
                support: Support::new(best.1, k),
                eta: best.0,
                lower_bound: lb.min(best.0),
                complete: false,
                nodes,
            };
        }
    }
    MasterSolution { support: Support::new(best.1, k), eta: best.0, lower_bound: best.0, complete: true, nodes }
}

pub(crate) const FREE: i8 = 0;
pub(crate) const IN: i8 = 1;
pub(crate) const OUT: i8 = -1;

struct NodeEval {
    bound: f64,
    /// Completion of the cut attaining the bound.
    completion: Vec<usize>,
    /// Cut that attains the model value at `fixed-in ∪ completion`.
    violating: usize,
    value: f64,
}

fn most_negative(coefs: &[f64], status: &[i8], r: usize, buf: &mut Vec<(f64, usize)>) -> f64 {
    buf.clear();
    buf.extend(coefs.iter().enumerate().filter(|&(j, &g)| g < 0.0 && status[j] == FREE).map(|(j, &g)| (g, j)));
    let order = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
    if buf.len() > r {
        if r > 0 {
            buf.select_nth_unstable_by(r - 1, order);
        }
        buf.truncate(r);
    }
    buf.iter().map(|e| e.0).sum()
}

fn evaluate(pool: &CutPool, k: usize, status: &[i8], fixed_in: &[usize], buf: &mut Vec<(f64, usize)>) -> NodeEval {
    let r = k - fixed_in.len();
    let mut bases = Vec::with_capacity(pool.len());
    let mut bound = f64::NEG_INFINITY;
    let mut completion = Vec::new();
    for (c0, g) in pool.constants.iter().zip(&pool.coefs) {
        let base = c0 + fixed_in.iter().map(|&j| g[j]).sum::<f64>();
        bases.push(base);
        let v = base + most_negative(g, status, r, buf);
        if v > bound {
            bound = v;
            completion = buf.iter().map(|e| e.1).collect();
        }
    }
    let (mut value, mut violating) = (f64::NEG_INFINITY, 0);
    for (i, g) in pool.coefs.iter().enumerate() {
        let v = bases[i] + completion.iter().map(|&j| g[j]).sum::<f64>();
        if v > value {
            value = v;
            violating = i;
        }
    }
    NodeEval { bound, completion, violating, value }
}

fn root_bound(pool: &CutPool, k: usize) -> f64 {
    let status = vec![FREE; pool.p];
    evaluate(pool, k, &status, &[], &mut Vec::new()).bound
}

fn branch_and_bound(
    pool: &CutPool,
    k: usize,
    incumbent: Option<&Support>,
    deadline: Option<Instant>,
    mut pruning: Option<Pruning<'_>>,
) -> MasterSolution {
    let p = pool.p;
    let mut status = vec![FREE; p];
    let mut buf = Vec::new();
    // (variable, whether the second branch is being explored).
    let mut trail: Vec<(usize, bool)> = Vec::new();
    let mut fixed_in: Vec<usize> = Vec::new();

    let (mut best_val, mut best) = match incumbent.filter(|s| s.len() <= k && s.span() <= p) {
        Some(s) => (pool.model_value(s.indices()), s.indices().to_vec()),
        None => (f64::INFINITY, Vec::new()),
    };
    let mut root = f64::NEG_INFINITY;
    // Smallest external bound among pruned nodes.
    let mut pruned = f64::INFINITY;
    let mut nodes = 0usize;

    loop {
        nodes += 1;
        if deadline.is_some_and(|d| Instant::now() >= d) && nodes > 1 {
            return MasterSolution {
                support: Support::new(best, k),
                eta: best_val,
                lower_bound: root.min(best_val),
                complete: false,
                nodes,
            };
        }
        let ev = evaluate(pool, k, &status, &fixed_in, &mut buf);
        if nodes == 1 {
            root = ev.bound;
        }

        let mut branch = None;
        if ev.bound < best_val {
            let external = pruning.as_mut().and_then(|pr| {
                let b = pr.bound.bound(&status, &fixed_in, k - fixed_in.len(), pr.upper);
                if nodes == 1 {
                    root = root.max(b);
                }
                (b >= pr.upper - pr.epsilon).then_some(b)
            });
            if let Some(b) = external {
                pruned = pruned.min(b);
            } else {
                if ev.value < best_val {
                    best_val = ev.value;
                    best = fixed_in.iter().chain(&ev.completion).copied().collect();
                }
                if ev.bound < best_val && ev.value > ev.bound {
                    let g = &pool.coefs[ev.violating];
                    branch = if ev.completion.is_empty() {
                        (0..p)
                            .filter(|&j| status[j] == FREE && g[j] < 0.0)
                            .min_by(|&a, &b| g[a].total_cmp(&g[b]).then(a.cmp(&b)))
                    } else {
                        ev.completion.iter().copied().max_by(|&a, &b| g[a].total_cmp(&g[b]).then(b.cmp(&a)))
                    };
                }
            }
        }

        match branch {
            Some(j) => {
                status[j] = OUT;
                trail.push((j, false));
            }
            None => {
                // Backtrack to the deepest decision whose second branch is open.
                loop {
                    match trail.pop() {
                        None => {
                            let support = Support::new(best, k);
                            let lower_bound = best_val.min(pruned);
                            return MasterSolution { support, eta: best_val, lower_bound, complete: true, nodes };
                        }
                        Some((j, false)) => {
                            if fixed_in.len() < k {
                                status[j] = IN;
                                fixed_in.push(j);
                                trail.push((j, true));
                                break;
                            }
                            status[j] = FREE;
                        }
                        Some((j, true)) => {
                            status[j] = FREE;
                            fixed_in.pop();
                        }
                    }
                }
            }
        }
    }
}
