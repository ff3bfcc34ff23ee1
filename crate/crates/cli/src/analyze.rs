use serde::Serialize;

use containment::bounds;
use containment::functionals::{
    self, profile, BodyProfile, ContainmentResult, OptimalityCertificate, PseudoCompleteReport,
};
use containment::geom::{arithmetic_mean, minimum, scale, ConvexPolygon};
use containment::Vec2;

use crate::CliResult;

#[derive(Debug, Serialize)]
pub struct RegionFlags {
    /// `2/(s+1) ≤ τ ≤ c(s)`.
    pub tau_in_region: bool,
    /// `1 ≤ D/w ≤ (s+1)/2 · c(s)`; only meaningful for pseudo-complete pairs.
    pub dw_in_region: bool,
}

#[derive(Debug, Serialize)]
pub struct GaugeReport {
    /// `supplied` or `minimum` (the centered `K ∩ (−K)`).
    pub origin: &'static str,
    pub diameter: f64,
    pub width: f64,
    pub dw: f64,
    pub pseudo_complete: PseudoCompleteReport,
}

#[derive(Debug, Serialize)]
pub struct AnalyzeReport {
    pub vertices: usize,
    pub s: f64,
    pub center: Vec2,
    pub tau: f64,
    pub tau_attained_at: Vec2,
    pub alpha: f64,
    pub gamma: f64,
    pub well_spread: bool,
    pub gauge: GaugeReport,
    pub region: RegionFlags,
    /// Optimal containment of `K ∩ (−K)` in `τ (K−K)/2`, with the touching
    /// normals whose convex hull contains 0.
    pub tau_certificate: OptimalityCertificate,
    /// Circumradius of `K` in the gauge with its touching certificate.
    pub circumradius: ContainmentResult,
}

pub fn analyze(k: &ConvexPolygon, gauge: Option<&ConvexPolygon>, tol: f64) -> CliResult<AnalyzeReport> {
    let (kc, prof): (ConvexPolygon, BodyProfile) = profile(k)?;
    let (c, origin) = match gauge {
        Some(c) => (c.clone(), "supplied"),
        None => (minimum(&kc)?, "minimum"),
    };
    let pc = functionals::pseudo_complete_check(&kc, &c)?;
    let dw = pc.dw_ratio();
    let s = prof.s.min(2.0);
    let tau_in_region = bounds::tau_region_contains_tol(s, prof.tau, tol)?;
    let dw_in_region = bounds::dw_region_contains_tol(s, dw, tol)?;
    let outer = scale(&arithmetic_mean(&kc), prof.tau)?;
    let tau_certificate = functionals::optimal_containment_check(&minimum(&kc)?, &outer)?;
    let circumradius = functionals::circumradius(&kc, &c)?;
    Ok(AnalyzeReport {
        vertices: k.len(),
        s: prof.s,
        center: prof.center,
        tau: prof.tau,
        tau_attained_at: prof.tau_attained_at,
        alpha: prof.alpha,
        gamma: prof.gamma,
        well_spread: prof.well_spread,
        gauge: GaugeReport {
            origin,
            diameter: pc.D,
            width: pc.w,
            dw,
            pseudo_complete: pc,
        },
        region: RegionFlags {
            tau_in_region,
            dw_in_region,
        },
        tau_certificate,
        circumradius,
    })
}
