use super::model::{coeffs_at, find_knees, raw_coeffs, steady_current};
use super::DimlessParams;
use crate::charcore::{a_star, CharTriple};
use crate::roots::{refine, sign_changes};
use crate::{Error, Result};

const SCAN_POINTS: usize = 2000;
/// Orders `i / Q_GRID`, `i = 1..=Q_GRID`, scanned by [`critical_q`].
pub const Q_GRID: usize = 200;

/// Knees, folds and the voltages separating order-dependent from
/// order-independent stability. All values dimensionless.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchGeometry {
    pub v_alpha: f64,
    pub v_beta: f64,
    pub i_min: f64,
    pub i_max: f64,
    /// Root of `a + b` on `(v_K, v_α)`.
    pub v_prime: f64,
    /// Root of `a + b` on `(v_β, 1)`.
    pub v_double_prime: f64,
    /// Root of `a + b + c + 1` on `(v_β, v'')`.
    pub v_triple_prime: f64,
}

fn unique_root<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64, what: &str) -> Result<f64> {
    let brackets = sign_changes(&f, lo, hi, SCAN_POINTS);
    match brackets.len() {
        0 => Err(Error::NoBracket(format!("{what}: no sign change on [{lo}, {hi}]"))),
        1 => refine(&f, brackets[0], tol),
        n => Err(Error::MultipleRoots(format!("{what}: {n} sign changes on [{lo}, {hi}]"))),
    }
}

pub fn special_points(d: &DimlessParams, tol: f64) -> Result<BranchGeometry> {
    let (v_alpha, v_beta) = find_knees(d, tol)?;
    let a_plus_b = |v: f64| {
        let (a, b, _) = raw_coeffs(v, d);
        a + b
    };
    let shifted_sum = |v: f64| {
        let (a, b, c) = raw_coeffs(v, d);
        a + b + c + 1.0
    };
    let v_prime = unique_root(a_plus_b, d.v_k, v_alpha, tol, "v'")?;
    let v_double_prime = unique_root(a_plus_b, v_beta, 1.0, tol, "v''")?;
    let v_triple_prime = unique_root(shifted_sum, v_beta, v_double_prime, tol, "v'''")?;
    Ok(BranchGeometry {
        v_alpha,
        v_beta,
        i_min: steady_current(v_beta, d),
        i_max: steady_current(v_alpha, d),
        v_prime,
        v_double_prime,
        v_triple_prime,
    })
}

/// Every order `q ∈ (0, 1]` with `a = a⋆(b, c, q)`, ascending. Empty when
/// `c <= 0`.
pub fn critical_q_roots(t: &CharTriple, tol: f64) -> Result<Vec<f64>> {
    let (a, b, c) = (t.a(), t.b(), t.c());
    if c <= 0.0 {
        return Ok(Vec::new());
    }
    // a⋆ <= -min(b, 1) for every order
    if a > -b.min(1.0) {
        return Ok(Vec::new());
    }
    let gap = |q: f64| a_star(b, c, q).map(|h| a - h.a_star);
    let mut values = Vec::with_capacity(Q_GRID);
    for i in 1..=Q_GRID {
        let q = i as f64 / Q_GRID as f64;
        values.push((q, gap(q)?));
    }
    let g = |q: f64| gap(q).unwrap_or(f64::NAN);
    let mut roots = Vec::new();
    for (k, &(q, gq)) in values.iter().enumerate() {
        if gq == 0.0 {
            roots.push(q);
            continue;
        }
        if let Some(&(q_prev, g_prev)) = k.checked_sub(1).map(|j| &values[j]) {
            if g_prev != 0.0 && g_prev.signum() != gq.signum() {
                roots.push(refine(g, (q_prev, q), tol)?);
            }
        }
    }
    Ok(roots)
}

/// Critical order `q*` of the equilibrium at `v_star`: the largest crossing of
/// the Hopf locus as the order varies, if any.
pub fn critical_q(v_star: f64, d: &DimlessParams, tol: f64) -> Result<Option<f64>> {
    let t = coeffs_at(v_star, d)?;
    Ok(critical_q_roots(&t, tol)?.last().copied())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charcore::{classify, StabilityKind, DEFAULT_TOL};
    use crate::mlmodel::{equilibria, nondimensionalize, MLParams};

    const TOL: f64 = 1e-10;

    fn table() -> DimlessParams {
        nondimensionalize(&MLParams::default()).unwrap()
    }

    #[test]
    fn special_voltages_match_reference_values() {
        let d = table();
        let g = special_points(&d, TOL).unwrap();
        assert!((d.voltage_to_dim(g.v_prime) + 31.403).abs() < 0.005);
        assert!((d.voltage_to_dim(g.v_double_prime) - 9.82288).abs() < 0.005);
        assert!((d.voltage_to_dim(g.v_triple_prime) - 5.28457).abs() < 0.005);
        assert!(d.v_k < g.v_prime && g.v_prime < g.v_alpha && g.v_alpha < g.v_beta);
        assert!(g.v_beta < g.v_triple_prime && g.v_triple_prime < g.v_double_prime);
        assert!(g.v_double_prime < 1.0);
        assert!(g.i_min < g.i_max);
    }

    #[test]
    fn a_changes_sign_between_leak_and_knee() {
        let d = table();
        let (va, vb) = find_knees(&d, TOL).unwrap();
        assert!(raw_coeffs(d.v_k, &d).0 > 0.0);
        assert!(raw_coeffs(va, &d).0 < 0.0);
        assert!(raw_coeffs(vb, &d).0 < 0.0);
    }

    #[test]
    fn left_of_v_prime_is_order_independent_stable() {
        let d = table();
        let g = special_points(&d, TOL).unwrap();
        for k in 1..10 {
            let v = d.v_k + (g.v_prime - d.v_k) * k as f64 / 10.0;
            let t = coeffs_at(v, &d).unwrap();
            let verdict = classify(&t, DEFAULT_TOL).unwrap();
            assert!(verdict.is_stable() && verdict.order_independent, "v={v}");
            assert_eq!(critical_q(v, &d, TOL).unwrap(), None);
        }
    }

    #[test]
    fn critical_order_exists_between_v_prime_and_knee() {
        let d = table();
        let g = special_points(&d, TOL).unwrap();
        for k in 1..10 {
            let v = g.v_prime + (g.v_alpha - g.v_prime) * k as f64 / 10.0;
            let t = coeffs_at(v, &d).unwrap();
            let q_star = critical_q(v, &d, TOL).unwrap().expect("q* in (0,1)");
            assert!(q_star > 0.0 && q_star < 1.0);
            let residual = t.a() - a_star(t.b(), t.c(), q_star).unwrap().a_star;
            assert!(residual.abs() < 1e-8, "residual {residual}");
            // stable below q*, unstable above
            let below = classify(&t.with_q(q_star * 0.98).unwrap(), DEFAULT_TOL).unwrap();
            let above = classify(&t.with_q((q_star * 1.02).min(1.0)).unwrap(), DEFAULT_TOL).unwrap();
            assert!(below.is_stable());
            assert_eq!(above.kind, StabilityKind::Unstable);
        }
    }

    #[test]
    fn beta_to_triple_prime_is_order_independent_unstable() {
        let d = table();
        let g = special_points(&d, TOL).unwrap();
        for k in 1..10 {
            let v = g.v_beta + (g.v_triple_prime - g.v_beta) * k as f64 / 10.0;
            let t = coeffs_at(v, &d).unwrap();
            let verdict = classify(&t, DEFAULT_TOL).unwrap();
            assert_eq!(verdict.kind, StabilityKind::Unstable);
            assert!(verdict.order_independent, "v={v}");
            assert_eq!(critical_q(v, &d, TOL).unwrap(), None);
        }
    }

    #[test]
    fn negative_c_has_no_critical_order() {
        let t = CharTriple::new(-5.0, 1.0, -1.0, 0.5).unwrap();
        assert!(critical_q_roots(&t, TOL).unwrap().is_empty());
    }

    #[test]
    fn classification_invariant_under_time_rescaling() {
        let mut p = MLParams::default();
        p.q = 0.8;
        let d1 = nondimensionalize(&p).unwrap();
        p.tau *= 2.0;
        p.lambda_bar /= 2.0;
        let d2 = nondimensionalize(&p).unwrap();
        for i_ua in [-10.0, 0.0, 20.0, 39.0, 45.0] {
            let r1 = equilibria(d1.current_to_dimless(i_ua), &d1, TOL).unwrap();
            let r2 = equilibria(d2.current_to_dimless(i_ua), &d2, TOL).unwrap();
            assert_eq!(r1.len(), r2.len());
            for (x, y) in r1.iter().zip(&r2) {
                assert_eq!(x.verdict.kind, y.verdict.kind);
                assert_eq!(x.branch, y.branch);
            }
        }
    }
}
