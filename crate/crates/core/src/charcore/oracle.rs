//! Independent root oracle for rational orders `q = p / m`.
//!
//! With `s = z^m` on the principal sheet, `s^q = z^p` and `Δ` becomes the
//! polynomial `z^{p+m} + a z^m + b z^p + c`. Its roots come from the
//! eigenvalues of the companion matrix; those with `arg z ∈ (-π/m, π/m]` map
//! back to principal-sheet roots of `Δ`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{delta_eval, CharTriple};
use crate::{Error, Result};

/// Largest admissible denominator `m`; keeps the polynomial degree at most 24.
pub const MAX_ORACLE_DENOMINATOR: u32 = 12;

const SECTOR_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootMethod {
    RationalSubstitution,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexRootSet {
    /// Principal-sheet roots of `Δ`, sorted by decreasing real part.
    pub roots: Vec<Complex64>,
    /// Largest real part, or `-∞` when `Δ` has no root on the principal sheet.
    pub max_real_part: f64,
    pub method: RootMethod,
}

fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Monic polynomial in ascending-power coefficient form.
fn substituted_polynomial(t: &CharTriple, p: usize, m: usize) -> Vec<f64> {
    let mut coeffs = vec![0.0; p + m + 1];
    coeffs[p + m] = 1.0;
    coeffs[m] += t.a();
    coeffs[p] += t.b();
    coeffs[0] += t.c();
    coeffs
}

fn poly_eval(coeffs: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut value = Complex64::new(0.0, 0.0);
    let mut slope = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        slope = slope * z + value;
        value = value * z + c;
    }
    (value, slope)
}

fn companion_roots(coeffs: &[f64]) -> Result<Vec<Complex64>> {
    let n = coeffs.len() - 1;
    let mut comp = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        comp[(i, i - 1)] = 1.0;
    }
    for i in 0..n {
        comp[(i, n - 1)] = -coeffs[i];
    }
    let eig = comp.complex_eigenvalues();
    let roots: Vec<Complex64> = eig.iter().copied().collect();
    if roots.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::Polynomial("non-finite eigenvalue".into()));
    }
    Ok(roots)
}

fn polish(coeffs: &[f64], mut z: Complex64) -> Complex64 {
    let (mut fz, _) = poly_eval(coeffs, z);
    for _ in 0..8 {
        let (_, slope) = poly_eval(coeffs, z);
        if slope.norm() == 0.0 {
            break;
        }
        let cand = z - fz / slope;
        let (fc, _) = poly_eval(coeffs, cand);
        if fc.norm() >= fz.norm() {
            break;
        }
        z = cand;
        fz = fc;
    }
    z
}

/// Principal-sheet roots of `Δ` for `q = p / m`, each verified by
/// `|Δ(s)| <= tol · (1 + |s|^{q+1} + |a||s| + b|s|^q + |c|)`.
pub fn oracle_roots_rational(t: &CharTriple, p: u32, m: u32, tol: f64) -> Result<ComplexRootSet> {
    if p == 0 || p > m || m > MAX_ORACLE_DENOMINATOR || gcd(p, m) != 1 {
        return Err(Error::Domain(format!(
            "order p/m = {p}/{m} must be reduced with 0 < p <= m <= {MAX_ORACLE_DENOMINATOR}"
        )));
    }
    let q = f64::from(p) / f64::from(m);
    if (t.q() - q).abs() > 1e-12 {
        return Err(Error::Domain(format!(
            "q = {} is not the rational order {p}/{m}",
            t.q()
        )));
    }
    let (pu, mu) = (p as usize, m as usize);
    let coeffs = substituted_polynomial(t, pu, mu);
    let sector = PI / f64::from(m);

    let mut roots = Vec::new();
    for z in companion_roots(&coeffs)? {
        let z = polish(&coeffs, z);
        let arg = z.im.atan2(z.re);
        if arg <= -sector + SECTOR_SLACK || arg > sector + SECTOR_SLACK {
            continue;
        }
        let s = if (arg - sector).abs() <= SECTOR_SLACK {
            Complex64::new(-z.norm().powi(m as i32), 0.0)
        } else {
            z.powu(m)
        };
        let r = s.norm();
        let scale = 1.0 + r.powf(q + 1.0) + t.a().abs() * r + t.b() * r.powf(q) + t.c().abs();
        let residual = delta_eval(s, t).norm();
        if residual > tol * scale {
            // On the sector edge the conjugate partner may be the genuine root.
            if (arg - sector).abs() <= SECTOR_SLACK {
                continue;
            }
            return Err(Error::Polynomial(format!(
                "root s = {s} has residual {residual:e} above {tol:e}"
            )));
        }
        roots.push(s);
    }
    roots.sort_by(|x, y| y.re.total_cmp(&x.re));
    let max_real_part = roots.first().map_or(f64::NEG_INFINITY, |s| s.re);
    Ok(ComplexRootSet {
        roots,
        max_real_part,
        method: RootMethod::RationalSubstitution,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charcore::{classify, DEFAULT_TOL};

    fn triple(a: f64, b: f64, c: f64, q: f64) -> CharTriple {
        CharTriple::new(a, b, c, q).unwrap()
    }

    #[test]
    fn hopf_pair_at_two_i() {
        let set = oracle_roots_rational(&triple(-1.5, 1.0, 1.0, 0.5), 1, 2, 1e-9).unwrap();
        assert!(set.max_real_part.abs() < 1e-10, "{}", set.max_real_part);
        assert!(set.roots.iter().any(|s| (s - Complex64::new(0.0, 2.0)).norm() < 1e-9));
        assert!(set.roots.iter().any(|s| (s - Complex64::new(0.0, -2.0)).norm() < 1e-9));
    }

    #[test]
    fn negative_c_gives_positive_real_root() {
        let set = oracle_roots_rational(&triple(0.0, 1.0, -1.0, 0.5), 1, 2, 1e-9).unwrap();
        assert!(set.max_real_part > 0.0);
        assert!(set
            .roots
            .iter()
            .any(|s| s.re > 0.0 && s.im.abs() < 1e-12));
    }

    #[test]
    fn order_one_reduces_to_quadratic() {
        // s^2 + 3 s + 2 = (s + 1)(s + 2)
        let set = oracle_roots_rational(&triple(1.0, 2.0, 2.0, 1.0), 1, 1, 1e-9).unwrap();
        assert_eq!(set.roots.len(), 2);
        assert!((set.max_real_part + 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_fractions() {
        let t = triple(0.0, 1.0, 1.0, 0.5);
        assert!(oracle_roots_rational(&t, 2, 4, 1e-9).is_err());
        assert!(oracle_roots_rational(&t, 1, 3, 1e-9).is_err());
        let t = triple(0.0, 1.0, 1.0, 1.0 / 13.0);
        assert!(oracle_roots_rational(&t, 1, 13, 1e-9).is_err());
        let t = triple(0.0, 1.0, 1.0, 0.51);
        assert!(oracle_roots_rational(&t, 1, 2, 1e-9).is_err());
    }

    #[test]
    fn agrees_with_classifier_on_fixed_cases() {
        for &(a, b, c, p, m) in &[
            (-1.6, 1.0, 1.0, 1, 2),
            (-1.4, 1.0, 1.0, 1, 2),
            (-0.9, 0.3, 4.0, 2, 3),
            (-3.0, 2.0, 0.5, 3, 4),
            (0.2, 0.1, 7.0, 1, 3),
            (-2.5, 5.0, 3.0, 5, 12),
        ] {
            let t = triple(a, b, c, f64::from(p) / f64::from(m));
            let v = classify(&t, DEFAULT_TOL).unwrap();
            let set = oracle_roots_rational(&t, p, m, 1e-9).unwrap();
            assert_eq!(v.is_stable(), set.max_real_part < 0.0, "({a},{b},{c},{p}/{m})");
        }
    }
}
