use super::DimlessParams;
use crate::charcore::CharTriple;
use crate::roots::{refine, sign_changes};
use crate::{Error, Result};

const KNEE_GRID: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gating {
    pub m_inf: f64,
    pub n_inf: f64,
    /// Rate factor `ℓ(v) = cosh((v - v3) / (2 v4))`.
    pub ell: f64,
}

pub fn gating(v: f64, d: &DimlessParams) -> Gating {
    Gating {
        m_inf: 0.5 * (1.0 + ((v - d.v1) / d.v2).tanh()),
        n_inf: 0.5 * (1.0 + ((v - d.v3) / d.v4).tanh()),
        ell: ((v - d.v3) / (2.0 * d.v4)).cosh(),
    }
}

fn sech2(x: f64) -> f64 {
    let c = x.cosh();
    1.0 / (c * c)
}

fn m_inf_slope(v: f64, d: &DimlessParams) -> f64 {
    0.5 / d.v2 * sech2((v - d.v1) / d.v2)
}

fn n_inf_slope(v: f64, d: &DimlessParams) -> f64 {
    0.5 / d.v4 * sech2((v - d.v3) / d.v4)
}

/// `I(v, n) = γ_Ca m∞(v)(v - 1) + γ_K n (v - v_K) + γ_L (v - v_L)`.
pub fn ionic_current(v: f64, n: f64, d: &DimlessParams) -> f64 {
    let m = gating(v, d).m_inf;
    d.gamma_ca * m * (v - 1.0) + d.gamma_k * n * (v - d.v_k) + d.gamma_l * (v - d.v_l)
}

/// `∂I/∂v` at fixed `n`.
pub fn ionic_current_dv(v: f64, n: f64, d: &DimlessParams) -> f64 {
    let m = gating(v, d).m_inf;
    d.gamma_ca * (m_inf_slope(v, d) * (v - 1.0) + m) + d.gamma_k * n + d.gamma_l
}

/// `I∞(v) = I(v, n∞(v))`.
pub fn steady_current(v: f64, d: &DimlessParams) -> f64 {
    ionic_current(v, gating(v, d).n_inf, d)
}

/// `I∞'(v) = I_v + n∞'(v) γ_K (v - v_K)`.
pub fn steady_current_slope(v: f64, d: &DimlessParams) -> f64 {
    let n = gating(v, d).n_inf;
    ionic_current_dv(v, n, d) + n_inf_slope(v, d) * d.gamma_k * (v - d.v_k)
}

/// `a = I_v(v, n∞(v))`, `b = φ ℓ(v)`, `c = φ ℓ(v) I∞'(v)` at the equilibrium
/// voltage `v`, with the model order.
pub fn coeffs_at(v_star: f64, d: &DimlessParams) -> Result<CharTriple> {
    let (a, b, c) = raw_coeffs(v_star, d);
    CharTriple::new(a, b, c, d.q)
}

pub(crate) fn raw_coeffs(v: f64, d: &DimlessParams) -> (f64, f64, f64) {
    let g = gating(v, d);
    let a = ionic_current_dv(v, g.n_inf, d);
    let b = d.phi * g.ell;
    (a, b, b * steady_current_slope(v, d))
}

/// Grid over which the knees of `I∞` are searched.
pub(crate) fn knee_search_interval(d: &DimlessParams) -> (f64, f64) {
    (d.v_k.min(d.v1).min(d.v3) - 1.0, 2.0)
}

/// The two roots `v_α < v_β` of `I∞'`, with `I∞'` positive, negative, positive
/// across them.
pub fn find_knees(d: &DimlessParams, tol: f64) -> Result<(f64, f64)> {
    let slope = |v: f64| steady_current_slope(v, d);
    let (lo, hi) = knee_search_interval(d);
    let brackets = sign_changes(slope, lo, hi, KNEE_GRID);
    if brackets.len() != 2 {
        return Err(Error::InvalidParams(format!(
            "the steady-state current must have exactly two critical points, found {}",
            brackets.len()
        )));
    }
    let v_alpha = refine(slope, brackets[0], tol)?;
    let v_beta = refine(slope, brackets[1], tol)?;
    let mid = 0.5 * (v_alpha + v_beta);
    if !(slope(lo) > 0.0 && slope(mid) < 0.0 && slope(hi) > 0.0) {
        return Err(Error::InvalidParams(
            "the steady-state current does not rise, fall and rise again".into(),
        ));
    }
    Ok((v_alpha, v_beta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mlmodel::{nondimensionalize, MLParams};

    fn table() -> DimlessParams {
        nondimensionalize(&MLParams::default()).unwrap()
    }

    #[test]
    fn gating_reference_points() {
        let d = table();
        assert!((gating(d.v1, &d).m_inf - 0.5).abs() < 1e-15);
        let g = gating(d.v3, &d);
        assert!((g.n_inf - 0.5).abs() < 1e-15);
        assert_eq!(g.ell, 1.0);
        let lo = gating(-50.0, &d);
        let hi = gating(50.0, &d);
        assert!(lo.m_inf < 1e-12 && lo.n_inf < 1e-12);
        assert!(hi.m_inf > 1.0 - 1e-12 && hi.n_inf > 1.0 - 1e-12);
        assert!(lo.ell > 1.0 && hi.ell > 1.0);
    }

    #[test]
    fn leak_term_vanishes_at_leak_potential() {
        let d = table();
        let g = gating(d.v_l, &d);
        let expected = -d.gamma_ca * g.m_inf * (1.0 - d.v_l) - d.gamma_k * g.n_inf * (d.v_k - d.v_l);
        assert!((steady_current(d.v_l, &d) - expected).abs() < 1e-15);
        assert!(expected < 0.0);
    }

    #[test]
    fn steady_current_is_unbounded_both_ways() {
        let d = table();
        assert!(steady_current(-100.0, &d) < -10.0);
        assert!(steady_current(100.0, &d) > 10.0);
    }

    #[test]
    fn analytic_slopes_match_finite_differences() {
        let d = table();
        let h = 1e-6;
        for i in 0..=40 {
            let v = -0.8 + 0.05 * i as f64;
            let n = 0.3;
            let fd = (ionic_current(v + h, n, &d) - ionic_current(v - h, n, &d)) / (2.0 * h);
            let an = ionic_current_dv(v, n, &d);
            assert!((fd - an).abs() <= 1e-6 * an.abs().max(1.0), "v={v}");
            let fd = (steady_current(v + h, &d) - steady_current(v - h, &d)) / (2.0 * h);
            let an = steady_current_slope(v, &d);
            assert!((fd - an).abs() <= 1e-6 * an.abs().max(1.0), "v={v}");
        }
    }

    #[test]
    fn knees_and_folds_match_reference_values() {
        let d = table();
        let (va, vb) = find_knees(&d, 1e-12).unwrap();
        assert!((d.voltage_to_dim(va) + 29.568).abs() < 0.005);
        assert!((d.voltage_to_dim(vb) + 3.5774).abs() < 0.005);
        let i_max = d.current_to_dim(steady_current(va, &d));
        let i_min = d.current_to_dim(steady_current(vb, &d));
        assert!((i_max - 39.6935).abs() < 0.005);
        assert!((i_min + 14.4204).abs() < 0.005);
    }

    #[test]
    fn monotone_current_has_no_knees() {
        let mut p = MLParams::default();
        p.g_l = 20.0;
        let d = nondimensionalize(&p).unwrap();
        assert!(matches!(find_knees(&d, 1e-10), Err(Error::InvalidParams(_))));
    }

    #[test]
    fn coefficient_signs_at_knees_and_branches() {
        let d = table().with_order(0.7);
        let (va, vb) = find_knees(&d, 1e-13).unwrap();
        assert!(coeffs_at(va, &d).unwrap().c().abs() < 1e-12);
        assert!(coeffs_at(vb, &d).unwrap().c().abs() < 1e-12);
        assert!(coeffs_at(0.5 * (va + vb), &d).unwrap().c() < 0.0);
        assert!(coeffs_at(va - 0.05, &d).unwrap().c() > 0.0);
        assert!(coeffs_at(vb + 0.05, &d).unwrap().c() > 0.0);
        for v in [1.0, 1.2, 2.0] {
            assert!(coeffs_at(v, &d).unwrap().a() >= 0.0);
        }
        assert_eq!(coeffs_at(0.1, &d).unwrap().q(), 0.7);
    }
}
