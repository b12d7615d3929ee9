//! Caputo derivatives by quadrature, used to check the time-rescaling rule
//! `D^q [f(a·)](x) = a^q (D^q f)(a x)`.

use crate::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_DEPTH: u32 = 40;

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let r = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for i in 0..7 {
        let s = f(c - r * XGK[i]) + f(c + r * XGK[i]);
        kron += WGK[i] * s;
        if i % 2 == 1 {
            gauss += WG[i / 2] * s;
        }
    }
    (kron * r, (kron - gauss).abs() * r)
}

fn adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> Result<f64> {
    let (k, err) = gauss_kronrod(f, a, b);
    if err <= tol || (b - a).abs() < 1e-15 * a.abs().max(1.0) {
        return Ok(k);
    }
    if depth == MAX_DEPTH {
        return Err(Error::NoConvergence {
            what: "adaptive Gauss-Kronrod quadrature",
            iterations: MAX_DEPTH as usize,
        });
    }
    let m = 0.5 * (a + b);
    Ok(adaptive(f, a, m, 0.5 * tol, depth + 1)? + adaptive(f, m, b, 0.5 * tol, depth + 1)?)
}

/// `D^q f(x) = (1/Γ(1-q)) ∫_0^x (x-t)^{-q} f'(t) dt` for `x >= 0`, computed from
/// the derivative `f_prime`. The substitution `u = (x-t)^{1-q}` removes the
/// kernel singularity: the integral becomes `∫_0^{x^{1-q}} f'(x - u^{1/(1-q)}) du / Γ(2-q)`.
pub fn caputo_derivative<F: Fn(f64) -> f64>(q: f64, f_prime: F, x: f64, tol: f64) -> Result<f64> {
    if !(q > 0.0 && q <= 1.0) {
        return Err(Error::Domain(format!("order must lie in (0, 1], got {q}")));
    }
    if !(x >= 0.0) {
        return Err(Error::Domain(format!("x must be non-negative, got {x}")));
    }
    if q == 1.0 {
        return Ok(f_prime(x));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let p = 1.0 / (1.0 - q);
    let upper = x.powf(1.0 - q);
    let integrand = |u: f64| f_prime(x - u.powf(p));
    Ok(adaptive(&integrand, 0.0, upper, tol, 0)? / libm::tgamma(2.0 - q))
}

/// Largest `|D^q g(x) - a^q D^q f(a x)|` over `samples` equispaced points of
/// `(0, x_max]`, with `g(x) = f(a x)` (so `g' = a f'(a x)`). Requires `a > 0`.
pub fn scaling_test<F: Fn(f64) -> f64>(
    q: f64,
    a_scale: f64,
    f_prime: F,
    x_max: f64,
    samples: usize,
) -> Result<f64> {
    if !(a_scale > 0.0) || !a_scale.is_finite() {
        return Err(Error::Domain(format!("scale factor must be positive, got {a_scale}")));
    }
    if !(x_max > 0.0) || samples == 0 {
        return Err(Error::Domain("need x_max > 0 and at least one sample".into()));
    }
    let tol = 1e-12;
    let g_prime = |t: f64| a_scale * f_prime(a_scale * t);
    let mut worst = 0.0f64;
    for i in 1..=samples {
        let x = x_max * i as f64 / samples as f64;
        let lhs = caputo_derivative(q, g_prime, x, tol)?;
        let rhs = a_scale.powf(q) * caputo_derivative(q, &f_prime, a_scale * x, tol)?;
        worst = worst.max((lhs - rhs).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_kronrod_integrates_polynomials_exactly() {
        let (v, _) = gauss_kronrod(&|x: f64| x.powi(9) - 3.0 * x * x, 0.0, 2.0);
        assert!((v - (1024.0 / 10.0 - 8.0)).abs() < 1e-12);
    }

    #[test]
    fn caputo_of_square_matches_closed_form() {
        for &q in &[0.2, 0.5, 0.7, 0.95] {
            for &x in &[0.3, 1.0, 2.5] {
                let d = caputo_derivative(q, |t: f64| 2.0 * t, x, 1e-13).unwrap();
                let expected = 2.0 / libm::tgamma(3.0 - q) * x.powf(2.0 - q);
                assert!((d - expected).abs() < 1e-11, "q={q} x={x}: {d} vs {expected}");
            }
        }
    }

    #[test]
    fn caputo_of_linear_and_constant() {
        let d = caputo_derivative(0.4, |_t: f64| 1.0, 2.0, 1e-13).unwrap();
        assert!((d - 2f64.powf(0.6) / libm::tgamma(1.6)).abs() < 1e-12);
        assert_eq!(caputo_derivative(0.4, |_t: f64| 0.0, 2.0, 1e-13).unwrap(), 0.0);
    }

    #[test]
    fn order_one_is_the_derivative() {
        assert_eq!(caputo_derivative(1.0, |t: f64| t.cos(), 0.7, 1e-12).unwrap(), 0.7f64.cos());
    }

    #[test]
    fn scaling_identity_for_unit_scale() {
        let e = scaling_test(0.6, 1.0, |t: f64| t.exp(), 2.0, 10).unwrap();
        assert!(e < 1e-12);
    }

    #[test]
    fn scaling_holds_for_sine() {
        let e = scaling_test(0.35, 2.5, |t: f64| t.cos(), 1.5, 12).unwrap();
        assert!(e < 1e-9, "{e}");
    }

    #[test]
    fn scaling_rejects_nonpositive_factor() {
        assert!(scaling_test(0.5, 0.0, |t: f64| t, 1.0, 4).is_err());
        assert!(scaling_test(0.5, -2.0, |t: f64| t, 1.0, 4).is_err());
    }
}
