//! Fractional Adams-Bashforth-Moulton integration of mixed-order Caputo
//! systems `D^{q_i} x_i = f_i(t, x)`, `q_i ∈ (0, 1]`.
//!
//! Every equation uses the product-rectangle predictor and product-trapezoid
//! corrector with its own order. For `q_i = 1` the weights reduce to the
//! explicit Euler predictor and the trapezoidal corrector. The memory term is
//! a full convolution over the history, so a run of `N` steps costs `O(N²)`.

mod caputo;
mod mittag_leffler;

pub use caputo::{caputo_derivative, scaling_test};
pub use mittag_leffler::{ml_reference, SeriesValue, ML_MAX_TERMS, ML_SAFE_ARGUMENT};

use crate::charcore::CharTriple;
use crate::{Error, Result};

/// Largest step count accepted with [`Memory::Full`].
pub const MAX_FULL_HISTORY: usize = 200_000;

/// Default divergence bound on `|x_i|`.
pub const DEFAULT_DIVERGENCE_BOUND: f64 = 1e6;

/// Right-hand side `f(t, x, dx)` writing into `dx`.
pub struct MixedOrderSystem<F> {
    orders: Vec<f64>,
    rhs: F,
}

impl<F> MixedOrderSystem<F>
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    pub fn new(orders: Vec<f64>, rhs: F) -> Result<Self> {
        if orders.is_empty() {
            return Err(Error::Solver("a system needs at least one equation".into()));
        }
        if let Some(q) = orders.iter().find(|q| !(**q > 0.0 && **q <= 1.0)) {
            return Err(Error::Solver(format!("order {q} outside (0, 1]")));
        }
        Ok(Self { orders, rhs })
    }

    pub fn dimension(&self) -> usize {
        self.orders.len()
    }

    pub fn orders(&self) -> &[f64] {
        &self.orders
    }

    pub fn eval(&self, t: f64, x: &[f64], dx: &mut [f64]) {
        (self.rhs)(t, x, dx)
    }
}

/// How much of the history enters the memory term.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Memory {
    Full,
    /// Short-memory truncation: only the last `n` steps are convolved. The
    /// neglected tail contributes an error of order `(n h)^{q-1}·h·sup|f|`
    /// per step, which does not vanish as `h → 0` for fixed window length.
    Window(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Corrector sweeps per step (at least 1).
    pub corrector_iters: usize,
    pub divergence_bound: f64,
    pub memory: Memory,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            corrector_iters: 1,
            divergence_bound: DEFAULT_DIVERGENCE_BOUND,
            memory: Memory::Full,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    /// Row-major `(len × dimension)` state matrix.
    states: Vec<f64>,
    pub dimension: usize,
    pub step: f64,
    pub orders: Vec<f64>,
    pub corrector_iters: usize,
    /// The run stopped early because a state left the divergence bound or
    /// became non-finite; the offending row is the last one stored.
    pub diverged: bool,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn state(&self, i: usize) -> &[f64] {
        &self.states[i * self.dimension..(i + 1) * self.dimension]
    }

    pub fn component(&self, k: usize) -> Vec<f64> {
        self.states.iter().skip(k).step_by(self.dimension).copied().collect()
    }

    pub fn last_state(&self) -> &[f64] {
        self.state(self.len() - 1)
    }

    pub fn rows(&self) -> impl Iterator<Item = (f64, &[f64])> + '_ {
        self.times.iter().copied().zip(self.states.chunks(self.dimension))
    }
}

/// Product-rectangle predictor weights `b_k = (k+1)^q - k^q`, `k = 0..=n`.
/// The weight of `f_j` at step `n + 1` is `b_{n-j}`.
pub fn predictor_weights(order: f64, n: usize) -> Vec<f64> {
    (0..=n)
        .map(|k| ((k + 1) as f64).powf(order) - (k as f64).powf(order))
        .collect()
}

/// Product-trapezoid weights `a_{j,n+1}` for `j = 0..=n+1`, unscaled
/// (multiply by `h^q / Γ(q + 2)`).
pub fn corrector_weights(order: f64, n: usize) -> Vec<f64> {
    let p = |k: usize| (k as f64).powf(order + 1.0);
    let nf = n as f64;
    let mut w = Vec::with_capacity(n + 2);
    w.push(p(n) - (nf - order) * ((n + 1) as f64).powf(order));
    for j in 1..=n {
        let k = n - j + 1;
        w.push(p(k + 1) + p(k - 1) - 2.0 * p(k));
    }
    w.push(1.0);
    w
}

struct OrderTables {
    order: f64,
    /// `b_k`, `k = 0..=N`.
    pred: Vec<f64>,
    /// `A_k = (k+1)^{q+1} + (k-1)^{q+1} - 2 k^{q+1}`, index `k`, `A_0` unused.
    corr: Vec<f64>,
    pred_scale: f64,
    corr_scale: f64,
}

impl OrderTables {
    fn new(order: f64, steps: usize, h: f64) -> Self {
        let pw: Vec<f64> = (0..=steps + 1).map(|k| (k as f64).powf(order)).collect();
        let pw1: Vec<f64> = (0..=steps + 1).map(|k| (k as f64).powf(order + 1.0)).collect();
        let pred = (0..=steps).map(|k| pw[k + 1] - pw[k]).collect();
        let mut corr = vec![0.0; steps + 1];
        for k in 1..=steps {
            corr[k] = pw1[k + 1] + pw1[k - 1] - 2.0 * pw1[k];
        }
        let hq = h.powf(order);
        Self {
            order,
            pred,
            corr,
            pred_scale: hq / libm::tgamma(order + 1.0),
            corr_scale: hq / libm::tgamma(order + 2.0),
        }
    }

    /// `a_{0,n+1}`
    fn corr_first(&self, n: usize) -> f64 {
        let nf = n as f64;
        nf.powf(self.order + 1.0) - (nf - self.order) * (nf + 1.0).powf(self.order)
    }
}

/// Integrates with one corrector sweep per step unless `corrector_iters`
/// says otherwise, full memory and the default divergence bound.
pub fn simulate<F>(
    sys: &MixedOrderSystem<F>,
    x0: &[f64],
    t_end: f64,
    h: f64,
    corrector_iters: usize,
) -> Result<Trajectory>
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    let opts = SolverOptions {
        corrector_iters,
        ..SolverOptions::default()
    };
    simulate_with(sys, x0, t_end, h, &opts)
}

pub fn simulate_with<F>(
    sys: &MixedOrderSystem<F>,
    x0: &[f64],
    t_end: f64,
    h: f64,
    opts: &SolverOptions,
) -> Result<Trajectory>
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    let dim = sys.dimension();
    if x0.len() != dim {
        return Err(Error::Solver(format!(
            "initial state has {} components, system has {dim}",
            x0.len()
        )));
    }
    if x0.iter().any(|x| !x.is_finite()) {
        return Err(Error::Solver("initial state is not finite".into()));
    }
    if !(h > 0.0 && h.is_finite()) || !(t_end >= h) {
        return Err(Error::Solver(format!("need h > 0 and t_end >= h, got h = {h}, t_end = {t_end}")));
    }
    if opts.corrector_iters == 0 {
        return Err(Error::Solver("at least one corrector sweep is required".into()));
    }
    let steps = (t_end / h + 1e-9).floor() as usize;
    let window = match opts.memory {
        Memory::Full if steps > MAX_FULL_HISTORY => {
            return Err(Error::Solver(format!(
                "{steps} steps exceed the full-history limit of {MAX_FULL_HISTORY}"
            )))
        }
        Memory::Full => None,
        Memory::Window(0) => return Err(Error::Solver("memory window must be positive".into())),
        Memory::Window(w) => Some(w),
    };

    let mut tables: Vec<OrderTables> = Vec::new();
    let mut table_of = Vec::with_capacity(dim);
    for &q in sys.orders() {
        let idx = match tables.iter().position(|t| t.order == q) {
            Some(i) => i,
            None => {
                tables.push(OrderTables::new(q, steps, h));
                tables.len() - 1
            }
        };
        table_of.push(idx);
    }

    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity((steps + 1) * dim);
    // f history per equation
    let mut fhist: Vec<Vec<f64>> = (0..dim).map(|_| Vec::with_capacity(steps + 1)).collect();
    let mut dx = vec![0.0; dim];

    times.push(0.0);
    states.extend_from_slice(x0);
    sys.eval(0.0, x0, &mut dx);
    for (hist, v) in fhist.iter_mut().zip(&dx) {
        hist.push(*v);
    }

    let mut pred = vec![0.0; dim];
    let mut memory = vec![0.0; dim];
    let mut x = vec![0.0; dim];
    let mut diverged = false;

    for n in 0..steps {
        let t_next = (n + 1) as f64 * h;
        let lo = window.map_or(0, |w| (n + 1).saturating_sub(w));
        for i in 0..dim {
            let tab = &tables[table_of[i]];
            let f = &fhist[i][lo..=n];
            let p: f64 = f.iter().zip(tab.pred[..=n - lo].iter().rev()).map(|(a, b)| a * b).sum();
            pred[i] = x0[i] + tab.pred_scale * p;

            let mut m: f64 = if lo == 0 { tab.corr_first(n) * fhist[i][0] } else { 0.0 };
            let start = lo.max(1);
            if start <= n {
                // weight of f_j is A_{n-j+1}
                m += fhist[i][start..=n]
                    .iter()
                    .zip(tab.corr[1..=n - start + 1].iter().rev())
                    .map(|(a, b)| a * b)
                    .sum::<f64>();
            }
            memory[i] = m;
        }

        sys.eval(t_next, &pred, &mut dx);
        for sweep in 0..opts.corrector_iters {
            if sweep > 0 {
                sys.eval(t_next, &x, &mut dx);
            }
            for i in 0..dim {
                let tab = &tables[table_of[i]];
                x[i] = x0[i] + tab.corr_scale * (memory[i] + dx[i]);
            }
        }

        times.push(t_next);
        states.extend_from_slice(&x);
        if x.iter().any(|v| !v.is_finite() || v.abs() > opts.divergence_bound) {
            diverged = true;
            break;
        }
        sys.eval(t_next, &x, &mut dx);
        for (hist, v) in fhist.iter_mut().zip(&dx) {
            hist.push(*v);
        }
    }

    Ok(Trajectory {
        times,
        states,
        dimension: dim,
        step: h,
        orders: sys.orders().to_vec(),
        corrector_iters: opts.corrector_iters,
        diverged,
    })
}

/// Planar system `D^q x = -a x + y`, `y' = (a b - c) x - b y`, whose
/// characteristic function is `Δ` of `t`.
pub fn linear_system(t: &CharTriple) -> Result<MixedOrderSystem<impl Fn(f64, &[f64], &mut [f64])>> {
    let m = linear_matrix(t);
    MixedOrderSystem::new(vec![t.q(), 1.0], move |_t, x, dx| {
        dx[0] = m[0][0] * x[0] + m[0][1] * x[1];
        dx[1] = m[1][0] * x[0] + m[1][1] * x[1];
    })
}

/// Matrix of [`linear_system`].
pub fn linear_matrix(t: &CharTriple) -> [[f64; 2]; 2] {
    [[-t.a(), 1.0], [t.a() * t.b() - t.c(), -t.b()]]
}
