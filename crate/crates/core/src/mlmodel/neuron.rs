use super::equilibria::{equilibria, Branch};
use super::model::{gating, ionic_current};
use super::DimlessParams;
use crate::fodesolve::{simulate_with, MixedOrderSystem, SolverOptions, Trajectory};
use crate::{Error, Result};

/// Spike threshold in mV.
pub const SPIKE_THRESHOLD_MV: f64 = 0.0;
/// Minimum inter-spike separation in ms.
pub const SPIKE_MIN_SEPARATION_MS: f64 = 5.0;

/// State `(v, n)` with orders `(q, 1)`.
pub fn neuron_system(d: &DimlessParams) -> Result<MixedOrderSystem<impl Fn(f64, &[f64], &mut [f64])>> {
    let d = d.clone();
    MixedOrderSystem::new(vec![d.q, 1.0], move |_t, x, dx| {
        let (v, n) = (x[0], x[1]);
        let g = gating(v, &d);
        dx[0] = d.i_tilde - ionic_current(v, n, &d);
        dx[1] = d.phi * g.ell * (g.n_inf - n);
    })
}

/// Stable equilibrium at zero applied current, taken on B1 when several
/// branches are stable.
pub fn resting_state(d: &DimlessParams, tol: f64) -> Result<(f64, f64)> {
    let recs = equilibria(0.0, &d.with_current(0.0), tol)?;
    let stable: Vec<_> = recs.iter().filter(|r| r.verdict.is_stable()).collect();
    let pick = stable
        .iter()
        .find(|r| r.branch == Branch::B1)
        .or_else(|| stable.first())
        .ok_or_else(|| Error::Domain("no stable equilibrium at zero current".into()))?;
    Ok((pick.v_star, pick.n_star))
}

/// Integrates the neuron from `(v0, n0)` over `t_end` dimensionless time units.
pub fn simulate_neuron(
    d: &DimlessParams,
    (v0, n0): (f64, f64),
    t_end: f64,
    h: f64,
    opts: &SolverOptions,
) -> Result<Trajectory> {
    let sys = neuron_system(d)?;
    simulate_with(&sys, &[v0, n0], t_end, h, opts)
}

/// Upward crossings of `threshold`, ignoring any that follow the previous
/// counted spike by less than `min_separation` (same unit as `times`).
pub fn count_spikes(times: &[f64], values: &[f64], threshold: f64, min_separation: f64) -> usize {
    spike_times(times, values, threshold, min_separation).len()
}

pub fn spike_times(times: &[f64], values: &[f64], threshold: f64, min_separation: f64) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::new();
    for i in 1..times.len().min(values.len()) {
        let (v0, v1) = (values[i - 1], values[i]);
        if v0 < threshold && v1 >= threshold {
            let t = times[i - 1] + (times[i] - times[i - 1]) * (threshold - v0) / (v1 - v0);
            if out.last().is_none_or(|&prev| t - prev >= min_separation) {
                out.push(t);
            }
        }
    }
    out
}
