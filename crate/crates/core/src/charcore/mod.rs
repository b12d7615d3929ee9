//! Characteristic-function analysis for
//!
//! ```text
//!   D^q x = a11 x + a12 y,      y' = a21 x + a22 y
//! ```
//!
//! with a Caputo derivative of order `q ∈ (0, 1]`. With `a = -a11`, `b = -a22`
//! and `c = det A` the characteristic function is
//! `Δ(s) = s^{q+1} + a s + b s^q + c` on the principal sheet, and the system is
//! `O(t^{-q})`-asymptotically stable iff every root lies in `Re s < 0`.
//!
//! For `c > 0` the stability boundary is the Hopf locus `a = a⋆(b, c, q)`, where
//! `Δ(i b ω) = 0` with `ω = h_q^{-1}(c / b^{q+1})`.

mod oracle;

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use crate::{Error, Result};

pub use oracle::{oracle_roots_rational, ComplexRootSet, RootMethod, MAX_ORACLE_DENOMINATOR};

/// Default relative tolerance used for root finding and boundary ties.
pub const DEFAULT_TOL: f64 = 1e-10;

const NEWTON_MAX_ITER: usize = 200;

/// Coefficients `(a, b, c, q)` of `Δ(s)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharTriple {
    a: f64,
    b: f64,
    c: f64,
    q: f64,
}

impl CharTriple {
    pub fn new(a: f64, b: f64, c: f64, q: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && c.is_finite() && q.is_finite()) {
            return Err(Error::InvalidTriple(format!(
                "non-finite coefficient in ({a}, {b}, {c}, {q})"
            )));
        }
        if b <= 0.0 {
            return Err(Error::InvalidTriple(format!("b must be positive, got {b}")));
        }
        check_order(q)?;
        Ok(Self { a, b, c, q })
    }

    /// Builds the triple from the system matrix `[[a11, a12], [a21, a22]]`.
    pub fn from_matrix(m: [[f64; 2]; 2], q: f64) -> Result<Self> {
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        Self::new(-m[0][0], -m[1][1], det, q)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn with_a(self, a: f64) -> Result<Self> {
        Self::new(a, self.b, self.c, self.q)
    }

    pub fn with_q(self, q: f64) -> Result<Self> {
        Self::new(self.a, self.b, self.c, q)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StabilityKind {
    AsymptoticallyStable,
    Unstable,
    /// `a` sits on the Hopf locus: a pure imaginary root pair.
    HopfMarginal,
    /// `c = 0`: `s = 0` is a root.
    SaddleNodeBoundary,
}

impl StabilityKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            StabilityKind::AsymptoticallyStable => "AsymptoticallyStable",
            StabilityKind::Unstable => "Unstable",
            StabilityKind::HopfMarginal => "HopfMarginal",
            StabilityKind::SaddleNodeBoundary => "SaddleNodeBoundary",
        }
    }
}

impl std::fmt::Display for StabilityKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityVerdict {
    pub kind: StabilityKind,
    /// The verdict holds for every order in `(0, 1)`.
    pub order_independent: bool,
    /// Hopf threshold, present iff `c > 0`.
    pub a_star: Option<f64>,
    /// Scaled Hopf frequency `ω` (the imaginary root is `i b ω`), present iff `c > 0`.
    pub hopf_omega: Option<f64>,
    /// Algebraic decay exponent of solutions, present iff stable.
    pub decay_order: Option<f64>,
}

impl StabilityVerdict {
    pub fn is_stable(&self) -> bool {
        self.kind == StabilityKind::AsymptoticallyStable
    }
}

/// Location of the pure imaginary root pair for given `(b, c, q)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HopfPoint {
    pub a_star: f64,
    pub omega: f64,
}

fn check_order(q: f64) -> Result<()> {
    if q > 0.0 && q <= 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("fractional order must lie in (0, 1], got {q}")))
    }
}

/// `(sin(qπ/2), cos(qπ/2))`, exact at `q = 1`.
fn half_angle(q: f64) -> (f64, f64) {
    if q == 1.0 {
        (1.0, 0.0)
    } else {
        (q * FRAC_PI_2).sin_cos()
    }
}

/// Principal-branch power `s^p = exp(p (ln|s| + i arg s))`, `arg s ∈ (-π, π]`,
/// with `0^p = 0` for `p > 0`.
pub fn principal_pow(s: Complex64, p: f64) -> Complex64 {
    if s.re == 0.0 && s.im == 0.0 {
        return if p == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        };
    }
    let mut arg = s.im.atan2(s.re);
    if arg == -std::f64::consts::PI {
        arg = std::f64::consts::PI;
    }
    let log_r = s.norm().ln();
    Complex64::from_polar((p * log_r).exp(), p * arg)
}

/// `Δ(s) = s^{q+1} + a s + b s^q + c` with principal-branch powers.
pub fn delta_eval(s: Complex64, t: &CharTriple) -> Complex64 {
    principal_pow(s, t.q + 1.0) + t.a * s + t.b * principal_pow(s, t.q) + t.c
}

/// `cot(qπ/2)`, the left end of the domain of `h_q`.
pub fn h_q_domain_start(q: f64) -> f64 {
    let (sin, cos) = half_angle(q);
    cos / sin
}

fn h_q_raw(omega: f64, sin: f64, cos: f64, q: f64) -> f64 {
    omega.powf(q) * (omega * sin - cos)
}

fn h_q_slope(omega: f64, sin: f64, cos: f64, q: f64) -> f64 {
    q * omega.powf(q - 1.0) * (omega * sin - cos) + omega.powf(q) * sin
}

/// `h_q(ω) = ω^q (ω sin(qπ/2) - cos(qπ/2))` on `ω > cot(qπ/2)`.
pub fn h_q(omega: f64, q: f64) -> Result<f64> {
    check_order(q)?;
    let start = h_q_domain_start(q);
    if !(omega > start) || !omega.is_finite() {
        return Err(Error::Domain(format!(
            "h_q is defined for omega > cot(q pi / 2) = {start}, got {omega}"
        )));
    }
    let (sin, cos) = half_angle(q);
    Ok(h_q_raw(omega, sin, cos, q))
}

/// Inverse of [`h_q`]. Bracketing plus safeguarded Newton, iterated to machine
/// precision; `tol` is the acceptance bound on `|h_q(ω) - y| / max(1, y)`.
pub fn h_q_inverse(y: f64, q: f64, tol: f64) -> Result<f64> {
    check_order(q)?;
    if !(y > 0.0) || !y.is_finite() {
        return Err(Error::Domain(format!("h_q^-1 needs y > 0, got {y}")));
    }
    let (sin, cos) = half_angle(q);
    if q == 1.0 {
        return Ok(y.sqrt());
    }
    let start = cos / sin;
    let h = |w: f64| h_q_raw(w, sin, cos, q);

    // h(start) = 0 < y
    let mut lo = start;
    let mut hi = 2.0 * start.max(0.5);
    while h(hi) <= y {
        lo = hi;
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::NoConvergence {
                what: "h_q^-1 bracket",
                iterations: NEWTON_MAX_ITER,
            });
        }
    }

    let mut w = 0.5 * (lo + hi);
    for _ in 0..NEWTON_MAX_ITER {
        let r = h(w) - y;
        if r == 0.0 {
            break;
        }
        if r < 0.0 {
            lo = w;
        } else {
            hi = w;
        }
        let mut next = w - r / h_q_slope(w, sin, cos, q);
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        let done = (next - w).abs() <= 2.0 * f64::EPSILON * next.abs() || hi - lo <= 2.0 * f64::EPSILON * hi;
        w = next;
        if done {
            break;
        }
    }
    let residual = (h(w) - y).abs();
    if residual <= tol * y.max(1.0) {
        Ok(w)
    } else {
        Err(Error::NoConvergence {
            what: "h_q^-1",
            iterations: NEWTON_MAX_ITER,
        })
    }
}

fn check_bcq(b: f64, c: f64, q: f64) -> Result<()> {
    check_order(q)?;
    if !(b > 0.0) || !b.is_finite() {
        return Err(Error::Domain(format!("b must be positive, got {b}")));
    }
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::Domain(format!("the Hopf locus needs c > 0, got {c}")));
    }
    Ok(())
}

/// Hopf threshold `a⋆(b, c, q)` and the scaled frequency `ω`; at `a = a⋆`,
/// `Δ(i b ω) = 0`. At `q = 1` this is exactly `a⋆ = -b`, `ω = √c / b`.
pub fn a_star(b: f64, c: f64, q: f64) -> Result<HopfPoint> {
    check_bcq(b, c, q)?;
    if q == 1.0 {
        return Ok(HopfPoint {
            a_star: -b,
            omega: c.sqrt() / b,
        });
    }
    let omega = h_q_inverse(c / b.powf(q + 1.0), q, DEFAULT_TOL)?;
    let (sin, cos) = half_angle(q);
    let a_star = -b.powf(q) * omega.powf(q - 1.0) * (omega * cos + sin);
    Ok(HopfPoint { a_star, omega })
}

/// `∂Re(s)/∂a` at `a = a⋆` for the root crossing the imaginary axis at `i b ω`.
pub fn transversality(b: f64, c: f64, q: f64) -> Result<f64> {
    let hopf = a_star(b, c, q)?;
    let omega = hopf.omega;
    let s = Complex64::new(0.0, b * omega);
    let p = (q + 1.0) * principal_pow(s, q) + q * b * principal_pow(s, q - 1.0) + hopf.a_star;
    let (sin, cos) = half_angle(q);
    Ok(b.powf(q + 1.0) * omega.powf(q) / p.norm_sqr() * (q * cos - (q + 1.0) * omega * sin))
}

/// Closed-form classification of `Δ` for `b > 0`.
///
/// Ties `|c| <= tol` and `|a - a⋆| <= tol·max(1, |a⋆|)` are reported as
/// [`StabilityKind::SaddleNodeBoundary`] and [`StabilityKind::HopfMarginal`].
pub fn classify(t: &CharTriple, tol: f64) -> Result<StabilityVerdict> {
    let (a, b, c, q) = (t.a, t.b, t.c, t.q);
    if c < -tol {
        return Ok(StabilityVerdict {
            kind: StabilityKind::Unstable,
            order_independent: true,
            a_star: None,
            hopf_omega: None,
            decay_order: None,
        });
    }
    if c <= tol {
        return Ok(StabilityVerdict {
            kind: StabilityKind::SaddleNodeBoundary,
            order_independent: false,
            a_star: None,
            hopf_omega: None,
            decay_order: None,
        });
    }

    let hopf = a_star(b, c, q)?;
    let gap = a - hopf.a_star;
    let band = tol * hopf.a_star.abs().max(1.0);
    let min_b1 = b.min(1.0);
    let (kind, order_independent, decay_order) = if gap > band {
        (StabilityKind::AsymptoticallyStable, a > -min_b1, Some(q))
    } else if gap < -band {
        let s = a + b + c + 1.0;
        let real_root_always =
            s <= 0.0 || (c > 1.0 && s > 0.0 && s < (c.sqrt() - 1.0).powi(2));
        (StabilityKind::Unstable, a <= -min_b1 && real_root_always, None)
    } else {
        (StabilityKind::HopfMarginal, false, None)
    };
    Ok(StabilityVerdict {
        kind,
        order_independent,
        a_star: Some(hopf.a_star),
        hopf_omega: Some(hopf.omega),
        decay_order,
    })
}
