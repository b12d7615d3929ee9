use super::model::{coeffs_at, find_knees, gating, steady_current};
use super::special::critical_q_roots;
use super::DimlessParams;
use crate::charcore::{classify, CharTriple, StabilityKind, StabilityVerdict, DEFAULT_TOL};
use crate::roots::brent;
use crate::{Error, Result};

/// Equilibrium branch. Fold variants label the collided pair at `Ĩ = I_max`
/// (B1/B2 at `v_α`) and `Ĩ = I_min` (B2/B3 at `v_β`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    B1,
    B2,
    B3,
    FoldB1B2,
    FoldB2B3,
}

impl Branch {
    pub fn as_str(&self) -> &'static str {
        match self {
            Branch::B1 => "B1",
            Branch::B2 => "B2",
            Branch::B3 => "B3",
            Branch::FoldB1B2 => "B1B2",
            Branch::FoldB2B3 => "B2B3",
        }
    }
}

impl std::fmt::Display for Branch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumRecord {
    pub branch: Branch,
    pub v_star: f64,
    pub n_star: f64,
    pub triple: CharTriple,
    pub verdict: StabilityVerdict,
    /// Largest order in `(0, 1]` at which `a(v*)` meets the Hopf locus.
    pub q_critical: Option<f64>,
    /// Every crossing found by the order scan, ascending.
    pub q_roots: Vec<f64>,
}

fn record(branch: Branch, v_star: f64, d: &DimlessParams, tol: f64) -> Result<EquilibriumRecord> {
    let triple = coeffs_at(v_star, d)?;
    let verdict = if matches!(branch, Branch::FoldB1B2 | Branch::FoldB2B3) {
        StabilityVerdict {
            kind: StabilityKind::SaddleNodeBoundary,
            order_independent: false,
            a_star: None,
            hopf_omega: None,
            decay_order: None,
        }
    } else {
        classify(&triple, DEFAULT_TOL)?
    };
    let q_roots = critical_q_roots(&triple, tol)?;
    Ok(EquilibriumRecord {
        branch,
        v_star,
        n_star: gating(v_star, d).n_inf,
        triple,
        verdict,
        q_critical: q_roots.last().copied(),
        q_roots,
    })
}

/// Root of `I∞(v) = Ĩ` on `[lo, hi]` where only one end is fixed: the free end
/// moves outward until it brackets.
fn outer_root(d: &DimlessParams, i_tilde: f64, knee: f64, downward: bool, tol: f64) -> Result<f64> {
    let g = |v: f64| steady_current(v, d) - i_tilde;
    let mut span = 1.0;
    for _ in 0..64 {
        let far = if downward { knee - span } else { knee + span };
        if g(far) == 0.0 {
            return Ok(far);
        }
        if g(far).signum() != g(knee).signum() {
            let (lo, hi) = if downward { (far, knee) } else { (knee, far) };
            return brent(g, lo, hi, tol);
        }
        span *= 2.0;
    }
    Err(Error::NoBracket(format!("no equilibrium bracket for current {i_tilde}")))
}

/// All equilibria at dimensionless current `i_tilde`, ordered by voltage.
pub fn equilibria(i_tilde: f64, d: &DimlessParams, tol: f64) -> Result<Vec<EquilibriumRecord>> {
    let knees = find_knees(d, tol)?;
    equilibria_with_knees(i_tilde, d, knees, tol)
}

/// As [`equilibria`], reusing precomputed knees.
pub fn equilibria_with_knees(
    i_tilde: f64,
    d: &DimlessParams,
    (v_alpha, v_beta): (f64, f64),
    tol: f64,
) -> Result<Vec<EquilibriumRecord>> {
    let i_max = steady_current(v_alpha, d);
    let i_min = steady_current(v_beta, d);
    let fold_tol = tol * i_tilde.abs().max(1.0);
    let at_max = (i_tilde - i_max).abs() <= fold_tol;
    let at_min = (i_tilde - i_min).abs() <= fold_tol;
    let g = |v: f64| steady_current(v, d) - i_tilde;

    let mut out = Vec::with_capacity(3);
    if i_tilde < i_max && !at_max {
        out.push(record(Branch::B1, outer_root(d, i_tilde, v_alpha, true, tol)?, d, tol)?);
    }
    if at_max {
        out.push(record(Branch::FoldB1B2, v_alpha, d, tol)?);
    }
    if i_tilde > i_min && i_tilde < i_max && !at_min && !at_max {
        out.push(record(Branch::B2, brent(g, v_alpha, v_beta, tol)?, d, tol)?);
    }
    if at_min {
        out.push(record(Branch::FoldB2B3, v_beta, d, tol)?);
    }
    if i_tilde > i_min && !at_min {
        out.push(record(Branch::B3, outer_root(d, i_tilde, v_beta, false, tol)?, d, tol)?);
    }
    Ok(out)
}

/// One equilibrium at one sample current of a scan.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow {
    pub i_tilde: f64,
    pub record: EquilibriumRecord,
}

/// Equilibria over `steps` evenly spaced dimensionless currents in `[i_lo, i_hi]`.
pub fn branch_scan(i_lo: f64, i_hi: f64, steps: usize, d: &DimlessParams, tol: f64) -> Result<Vec<ScanRow>> {
    if !(i_lo < i_hi) || steps < 2 {
        return Err(Error::InvalidParams("branch scan needs i_lo < i_hi and at least 2 steps".into()));
    }
    let knees = find_knees(d, tol)?;
    let mut rows = Vec::new();
    for k in 0..steps {
        let i_tilde = if k == steps - 1 {
            i_hi
        } else {
            i_lo + (i_hi - i_lo) * k as f64 / (steps - 1) as f64
        };
        for record in equilibria_with_knees(i_tilde, d, knees, tol)? {
            rows.push(ScanRow { i_tilde, record });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mlmodel::{nondimensionalize, MLParams};

    const TOL: f64 = 1e-10;

    fn table() -> DimlessParams {
        nondimensionalize(&MLParams::default()).unwrap()
    }

    fn branches(recs: &[EquilibriumRecord]) -> Vec<Branch> {
        recs.iter().map(|r| r.branch).collect()
    }

    #[test]
    fn three_equilibria_at_zero_current() {
        let d = table();
        let recs = equilibria(0.0, &d, TOL).unwrap();
        assert_eq!(branches(&recs), [Branch::B1, Branch::B2, Branch::B3]);
        // frozen root-finder output
        let volts: Vec<f64> = recs.iter().map(|r| d.voltage_to_dim(r.v_star)).collect();
        assert!((volts[0] + 59.4694).abs() < 1e-3, "{volts:?}");
        for r in &recs {
            assert!(steady_current(r.v_star, &d).abs() < 1e-9);
            assert!((r.n_star - gating(r.v_star, &d).n_inf).abs() == 0.0);
        }
        assert!(recs[0].verdict.is_stable());
        assert_eq!(recs[1].verdict.kind, StabilityKind::Unstable);
        assert!(recs[1].verdict.order_independent);
    }

    #[test]
    fn one_equilibrium_outside_fold_interval() {
        let d = table();
        let low = equilibria(d.current_to_dimless(-20.0), &d, TOL).unwrap();
        assert_eq!(branches(&low), [Branch::B1]);
        let high = equilibria(d.current_to_dimless(45.0), &d, TOL).unwrap();
        assert_eq!(branches(&high), [Branch::B3]);
    }

    #[test]
    fn two_equilibria_at_the_folds() {
        let d = table();
        let (va, vb) = find_knees(&d, TOL).unwrap();
        let at_max = equilibria(steady_current(va, &d), &d, TOL).unwrap();
        assert_eq!(branches(&at_max), [Branch::FoldB1B2, Branch::B3]);
        assert_eq!(at_max[0].verdict.kind, StabilityKind::SaddleNodeBoundary);
        let at_min = equilibria(steady_current(vb, &d), &d, TOL).unwrap();
        assert_eq!(branches(&at_min), [Branch::B1, Branch::FoldB2B3]);
        assert_eq!(at_min[1].verdict.kind, StabilityKind::SaddleNodeBoundary);
    }

    #[test]
    fn branch_ordering_and_coefficient_signs() {
        let d = table();
        let knees @ (va, vb) = find_knees(&d, TOL).unwrap();
        let (i_min, i_max) = (steady_current(vb, &d), steady_current(va, &d));
        for k in 1..40 {
            let i = i_min + (i_max - i_min) * k as f64 / 40.0;
            let recs = equilibria_with_knees(i, &d, knees, TOL).unwrap();
            assert_eq!(recs.len(), 3);
            assert!(recs[0].v_star < va && va < recs[1].v_star);
            assert!(recs[1].v_star < vb && vb < recs[2].v_star);
            assert!(recs[0].triple.c() > 0.0 && recs[2].triple.c() > 0.0);
            assert!(recs[1].triple.c() < 0.0);
            assert!(recs.iter().all(|r| r.triple.b() > 0.0));
            assert!(recs[1].verdict.order_independent);
            assert_eq!(recs[1].verdict.kind, StabilityKind::Unstable);
        }
    }

    #[test]
    fn far_branches_are_order_independent_stable() {
        let d = table();
        for i_ua in [-400.0, -1000.0, 3000.0] {
            let recs = equilibria(d.current_to_dimless(i_ua), &d, TOL).unwrap();
            assert_eq!(recs.len(), 1);
            let r = &recs[0];
            assert!(r.v_star <= d.v_k || r.v_star >= 1.0, "{}", r.v_star);
            assert!(r.verdict.is_stable() && r.verdict.order_independent);
            assert!(r.q_critical.is_none());
        }
    }

    #[test]
    fn scan_endpoints_and_fold_detection() {
        let d = table();
        let lo = d.current_to_dimless(-20.0);
        let hi = d.current_to_dimless(45.0);
        let rows = branch_scan(lo, hi, 2, &d, TOL).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].i_tilde, lo);
        assert_eq!(rows[1].i_tilde, hi);

        let rows = branch_scan(lo, hi, 500, &d, TOL).unwrap();
        let mut counts = std::collections::BTreeMap::new();
        for r in &rows {
            *counts.entry(r.i_tilde.to_bits()).or_insert(0usize) += 1;
        }
        let three: Vec<f64> = counts
            .iter()
            .filter(|(_, &n)| n == 3)
            .map(|(&bits, _)| d.current_to_dim(f64::from_bits(bits)))
            .collect();
        let step = 65.0 / 499.0;
        let first = three.iter().cloned().fold(f64::INFINITY, f64::min);
        let last = three.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        assert!(first >= -14.4204 && first - step < -14.4204);
        assert!(last <= 39.6935 && last + step > 39.6935);
        assert!(branch_scan(hi, lo, 10, &d, TOL).is_err());
    }
}
