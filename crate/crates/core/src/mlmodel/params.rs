use std::fmt::Write as _;
use std::str::FromStr;

use crate::{Error, Result};

/// mS/cm² · Ω·cm² → dimensionless, and Ω·cm² · µA/cm² → mV.
const MILLI: f64 = 1e-3;

/// Dimensional Morris-Lecar parameters in the fixed unit system
/// mV, ms, µA/cm², mS/cm² (= mmho/cm²), Ω·cm², with the rate `lambda_bar` in s⁻¹.
#[derive(Debug, Clone, PartialEq)]
pub struct MLParams {
    pub g_l: f64,
    pub g_ca: f64,
    pub g_k: f64,
    pub v_k: f64,
    pub v_l: f64,
    pub v_ca: f64,
    pub v1: f64,
    pub v2: f64,
    pub v3: f64,
    pub v4: f64,
    pub r_m: f64,
    pub tau: f64,
    pub lambda_bar: f64,
    pub i_app: f64,
    pub q: f64,
}

impl Default for MLParams {
    /// Type-I neuron values; applied current 0 and order 1.
    fn default() -> Self {
        Self {
            g_l: 2.0,
            g_ca: 4.0,
            g_k: 8.0,
            v_k: -80.0,
            v_l: -60.0,
            v_ca: 120.0,
            v1: -1.2,
            v2: 18.0,
            v3: 12.0,
            v4: 17.4,
            r_m: 250.0,
            tau: 5.0,
            lambda_bar: 1.0 / 15.0,
            i_app: 0.0,
            q: 1.0,
        }
    }
}

/// Parameter-file keys, in file order.
pub const PARAM_KEYS: [&str; 15] = [
    "g_L", "g_Ca", "g_K", "V_K", "V_L", "V_Ca", "V1", "V2", "V3", "V4", "R_m", "tau", "lambda_bar", "I", "q",
];

impl MLParams {
    fn slot(&mut self, key: &str) -> Option<&mut f64> {
        Some(match key {
            "g_L" => &mut self.g_l,
            "g_Ca" => &mut self.g_ca,
            "g_K" => &mut self.g_k,
            "V_K" => &mut self.v_k,
            "V_L" => &mut self.v_l,
            "V_Ca" => &mut self.v_ca,
            "V1" => &mut self.v1,
            "V2" => &mut self.v2,
            "V3" => &mut self.v3,
            "V4" => &mut self.v4,
            "R_m" => &mut self.r_m,
            "tau" => &mut self.tau,
            "lambda_bar" => &mut self.lambda_bar,
            "I" => &mut self.i_app,
            "q" => &mut self.q,
            _ => return None,
        })
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        self.clone().slot(key).map(|v| *v)
    }

    pub fn set(&mut self, key: &str, value: f64) -> Result<()> {
        match self.slot(key) {
            Some(slot) => {
                *slot = value;
                Ok(())
            }
            None => Err(Error::Parse(format!("unknown parameter `{key}`"))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for key in PARAM_KEYS {
            let v = self.get(key).unwrap_or(f64::NAN);
            if !v.is_finite() {
                return Err(Error::InvalidParams(format!("{key} is not finite")));
            }
        }
        if !(self.g_l > 0.0 && self.g_ca > 0.0 && self.g_k > 0.0) {
            return Err(Error::InvalidParams("conductances must be positive".into()));
        }
        if !(self.v_k < self.v_l && self.v_l < 0.0 && 0.0 < self.v_ca) {
            return Err(Error::InvalidParams("need V_K < V_L < 0 < V_Ca".into()));
        }
        if !(self.v2 > 0.0 && self.v4 > 0.0) {
            return Err(Error::InvalidParams("slope parameters V2, V4 must be positive".into()));
        }
        if !(self.tau > 0.0 && self.r_m > 0.0 && self.lambda_bar > 0.0) {
            return Err(Error::InvalidParams("tau, R_m and lambda_bar must be positive".into()));
        }
        if !(self.q > 0.0 && self.q <= 1.0) {
            return Err(Error::InvalidParams(format!("q must lie in (0, 1], got {}", self.q)));
        }
        Ok(())
    }

    /// Parses `key = value` lines on top of the defaults. `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut p = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected `key = value`", lineno + 1)))?;
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("line {}: bad number `{}`", lineno + 1, value.trim())))?;
            p.set(key.trim(), value)
                .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
        }
        Ok(p)
    }

    /// Inverse of [`MLParams::parse`]; values use the shortest round-trip form.
    pub fn to_kv_string(&self) -> String {
        let mut out = String::new();
        for key in PARAM_KEYS {
            let _ = writeln!(out, "{key} = {}", self.get(key).unwrap_or(f64::NAN));
        }
        out
    }
}

impl FromStr for MLParams {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

/// Reference scales kept alongside the dimensionless parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scales {
    /// V_Ca in mV.
    pub v_ca: f64,
    /// R_m in Ω·cm².
    pub r_m: f64,
    /// τ in ms.
    pub tau: f64,
}

impl Scales {
    /// µA/cm² per unit of dimensionless current.
    pub fn current(&self) -> f64 {
        self.v_ca / (self.r_m * MILLI)
    }
}

/// Parameters of the nondimensional system
///
/// ```text
/// D^q v = γ_Ca m∞(v)(1 - v) + γ_K n (v_K - v) + γ_L (v_L - v) + Ĩ
///    n' = φ ℓ(v) (n∞(v) - n)
/// ```
#[derive(Debug, Clone, PartialEq)]
pub struct DimlessParams {
    pub gamma_ca: f64,
    pub gamma_k: f64,
    pub gamma_l: f64,
    pub v_k: f64,
    pub v_l: f64,
    pub v1: f64,
    pub v2: f64,
    pub v3: f64,
    pub v4: f64,
    pub i_tilde: f64,
    pub phi: f64,
    pub q: f64,
    pub scales: Scales,
}

impl DimlessParams {
    pub fn current_to_dimless(&self, i_ua: f64) -> f64 {
        i_ua / self.scales.current()
    }

    pub fn current_to_dim(&self, i_tilde: f64) -> f64 {
        i_tilde * self.scales.current()
    }

    pub fn voltage_to_dimless(&self, v_mv: f64) -> f64 {
        v_mv / self.scales.v_ca
    }

    pub fn voltage_to_dim(&self, v: f64) -> f64 {
        v * self.scales.v_ca
    }

    pub fn time_to_dimless(&self, t_ms: f64) -> f64 {
        t_ms / self.scales.tau
    }

    pub fn time_to_dim(&self, t: f64) -> f64 {
        t * self.scales.tau
    }

    pub fn with_current(&self, i_tilde: f64) -> Self {
        Self {
            i_tilde,
            ..self.clone()
        }
    }

    pub fn with_order(&self, q: f64) -> Self {
        Self { q, ..self.clone() }
    }
}

/// `v = V / V_Ca`, `t → t / τ`: `γ_x = R_m g_x`, `Ĩ = R_m I / V_Ca`,
/// `φ = τ λ̄_N`, with the unit factors of the fixed unit system applied.
pub fn nondimensionalize(p: &MLParams) -> Result<DimlessParams> {
    p.validate()?;
    let k = 1.0 / p.v_ca;
    Ok(DimlessParams {
        gamma_ca: p.r_m * p.g_ca * MILLI,
        gamma_k: p.r_m * p.g_k * MILLI,
        gamma_l: p.r_m * p.g_l * MILLI,
        v_k: p.v_k * k,
        v_l: p.v_l * k,
        v1: p.v1 * k,
        v2: p.v2 * k,
        v3: p.v3 * k,
        v4: p.v4 * k,
        i_tilde: p.r_m * p.i_app * MILLI * k,
        // τ in ms, λ̄ in s⁻¹
        phi: p.tau * p.lambda_bar * MILLI,
        q: p.q,
        scales: Scales {
            v_ca: p.v_ca,
            r_m: p.r_m,
            tau: p.tau,
        },
    })
}

pub fn redimensionalize(d: &DimlessParams) -> MLParams {
    let s = d.scales;
    let g = |gamma: f64| gamma / (s.r_m * MILLI);
    MLParams {
        g_l: g(d.gamma_l),
        g_ca: g(d.gamma_ca),
        g_k: g(d.gamma_k),
        v_k: d.v_k * s.v_ca,
        v_l: d.v_l * s.v_ca,
        v_ca: s.v_ca,
        v1: d.v1 * s.v_ca,
        v2: d.v2 * s.v_ca,
        v3: d.v3 * s.v_ca,
        v4: d.v4 * s.v_ca,
        r_m: s.r_m,
        tau: s.tau,
        lambda_bar: d.phi / (s.tau * MILLI),
        i_app: d.i_tilde * s.current(),
        q: d.q,
    }
}
