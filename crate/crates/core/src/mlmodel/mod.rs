//! Fractional Morris-Lecar neuron: parameters, equilibrium branches,
//! characteristic coefficients and critical orders.

mod equilibria;
mod model;
mod neuron;
mod params;
mod special;

pub use equilibria::{branch_scan, equilibria, equilibria_with_knees, Branch, EquilibriumRecord, ScanRow};
pub use model::{
    coeffs_at, find_knees, gating, ionic_current, ionic_current_dv, steady_current, steady_current_slope, Gating,
};
pub use neuron::{
    count_spikes, neuron_system, resting_state, simulate_neuron, spike_times, SPIKE_MIN_SEPARATION_MS,
    SPIKE_THRESHOLD_MV,
};
pub use params::{nondimensionalize, redimensionalize, DimlessParams, MLParams, Scales, PARAM_KEYS};
pub use special::{critical_q, critical_q_roots, special_points, BranchGeometry, Q_GRID};
