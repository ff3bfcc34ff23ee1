//! Scalar bound functions for the `(s, τ)` and `(s, D/w)` regions.
//!
//! Inputs are checked against their domains with a slack of `DOMAIN_SLACK`;
//! values inside the slack are clamped onto the domain, anything further out
//! is an `OutOfDomain` error.

use std::sync::OnceLock;

use serde::Serialize;

use crate::error::{check_domain, Result};

pub const PHI: f64 = 1.618_033_988_749_895;

/// Round-off allowance for domain checks.
pub const DOMAIN_SLACK: f64 = 1e-9;

/// Boundary tolerance of the region predicates.
pub const REGION_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundConstants {
    pub phi: f64,
    /// Branch point of `c(s)` between the middle and the last piece.
    pub s_hat: f64,
    /// The `τ` with `ν*(τ) = ν⁺(τ)`; `c(s_hat) = tau_hat`.
    pub tau_hat: f64,
}

/// Computed once on first use.
pub fn constants() -> &'static BoundConstants {
    static CONSTS: OnceLock<BoundConstants> = OnceLock::new();
    CONSTS.get_or_init(|| {
        // ν* − ν⁺ changes sign once on [0.7, 0.9]. Bisect it rather than the
        // difference of the two c-branches, which touches zero without
        // changing sign.
        let f = |t: f64| nu_star_raw(t) - nu_plus_raw(t);
        let (mut lo, mut hi) = (0.7, 0.9);
        let flo = f(lo);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if (f(mid) > 0.0) == (flo > 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-16 {
                break;
            }
        }
        let tau_hat = 0.5 * (lo + hi);
        let s_hat = s_raw(tau_hat, nu_plus_raw(tau_hat));
        BoundConstants {
            phi: PHI,
            s_hat,
            tau_hat,
        }
    })
}

pub fn s_hat() -> f64 {
    constants().s_hat
}

pub fn tau_hat() -> f64 {
    constants().tau_hat
}

fn in_domain(name: &'static str, v: f64, lo: f64, hi: f64, domain: &'static str) -> Result<f64> {
    check_domain(name, v, lo - DOMAIN_SLACK, hi + DOMAIN_SLACK, domain)?;
    Ok(v.clamp(lo, hi))
}

/// Middle piece of `c`, valid on `(φ, ŝ]`.
pub fn c_middle_branch(s: f64) -> f64 {
    let s2 = s * s;
    (s2 + 1.0).powi(2) / ((s2 - 1.0) * (s2 + 2.0 * s - 1.0 + 2.0 * (s * (s2 - 1.0)).sqrt()))
}

/// Last piece of `c`, valid on `(ŝ, 2]`.
pub fn c_last_branch(s: f64) -> f64 {
    2.0 * (s * s - 2.0 * s - 1.0) / ((s - 3.0) * (s + 1.0))
}

/// Upper bound on `τ(K)` in terms of the asymmetry `s = s(K)`.
pub fn c_of_s(s: f64) -> Result<f64> {
    let s = in_domain("s", s, 1.0, 2.0, "[1, 2]")?;
    Ok(if s <= PHI {
        1.0
    } else if s <= s_hat() {
        c_middle_branch(s)
    } else {
        c_last_branch(s)
    })
}

/// Upper bound `(s+1)/2 · c(s)` on `D/w` for pseudo-complete bodies.
pub fn dw_envelope(s: f64) -> Result<f64> {
    let c = c_of_s(s)?;
    let s = s.clamp(1.0, 2.0);
    Ok(0.5 * (s + 1.0) * c)
}

fn nu_star_raw(tau: f64) -> f64 {
    let ti = 1.0 / tau;
    ((ti - 1.0) * (2.0 * ti - 1.0)).max(0.0).sqrt()
}

fn nu_plus_raw(tau: f64) -> f64 {
    let ti = 1.0 / tau;
    1.0 - ti + (ti * (2.0 - ti)).max(0.0).sqrt()
}

/// Smallest `ν` compatible with convexity at the given `τ`.
pub fn nu_star(tau: f64) -> Result<f64> {
    let tau = in_domain("tau", tau, 2.0 / 3.0, 1.0, "[2/3, 1]")?;
    Ok(nu_star_raw(tau).min(1.0))
}

/// Maximizer of `ν ↦ s(τ, ν)`.
pub fn nu_plus(tau: f64) -> Result<f64> {
    let tau = in_domain("tau", tau, 2.0 / 3.0, 1.0, "[2/3, 1]")?;
    Ok(nu_plus_raw(tau).clamp(0.0, 1.0))
}

pub fn b_coeff(tau: f64, nu: f64) -> Result<f64> {
    let tau = in_domain("tau", tau, 2.0 / 3.0, 1.0, "[2/3, 1]")?;
    let nu = in_domain("nu", nu, 0.0, 1.0, "(0, 1]")?;
    if nu <= 0.0 {
        return Err(crate::Error::OutOfDomain {
            name: "nu",
            value: nu,
            domain: "(0, 1]",
        });
    }
    Ok(b_raw(tau, nu))
}

fn b_raw(tau: f64, nu: f64) -> f64 {
    let ti = 1.0 / tau;
    4.0 * ti * (ti + nu - 1.0) / ((nu + 1.0) * (2.0 * ti + nu - 1.0))
}

fn s_raw(tau: f64, nu: f64) -> f64 {
    let b = b_raw(tau, nu);
    0.5 * (b + (b * b + 4.0).sqrt())
}

/// Larger root of `s² − B(τ,ν)s − 1 = 0`.
pub fn s_of_tau_nu(tau: f64, nu: f64) -> Result<f64> {
    let b = b_coeff(tau, nu)?;
    Ok(0.5 * (b + (b * b + 4.0).sqrt()))
}

/// Largest asymmetry of a body with the given `τ` that still lies above the
/// line `τ = s/(s²−1)`.
pub fn s_max(tau: f64) -> Result<f64> {
    let nu = nu_star(tau)?.max(nu_plus(tau)?);
    s_of_tau_nu(tau, nu)
}

/// Inverse of `τ = s/(s²−1)` on `s > 1`.
pub fn s_of_reciprocal_curve(tau: f64) -> f64 {
    1.0 / (2.0 * tau) + (1.0 + 1.0 / (4.0 * tau * tau)).sqrt()
}

pub fn tau_region_contains(s: f64, tau: f64) -> Result<bool> {
    tau_region_contains_tol(s, tau, REGION_TOL)
}

/// `2/(s+1) ≤ τ ≤ c(s)` up to `tol`.
pub fn tau_region_contains_tol(s: f64, tau: f64, tol: f64) -> Result<bool> {
    let upper = c_of_s(s)?;
    let s = s.clamp(1.0, 2.0);
    Ok(tau.is_finite() && tau >= 2.0 / (s + 1.0) - tol && tau <= upper + tol)
}

pub fn dw_region_contains(s: f64, rho: f64) -> Result<bool> {
    dw_region_contains_tol(s, rho, REGION_TOL)
}

/// `1 ≤ ρ ≤ (s+1)/2 · c(s)` up to `tol`.
pub fn dw_region_contains_tol(s: f64, rho: f64, tol: f64) -> Result<bool> {
    let upper = dw_envelope(s)?;
    Ok(rho.is_finite() && rho >= 1.0 - tol && rho <= upper + tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
        (0..=n).map(move |i| lo + (hi - lo) * i as f64 / n as f64)
    }

    #[test]
    fn golden_ratio() {
        assert!((PHI * PHI - PHI - 1.0).abs() < 1e-12);
        assert_eq!(PHI, (1.0 + 5f64.sqrt()) / 2.0);
    }

    #[test]
    fn roots() {
        let k = constants();
        assert!(k.s_hat >= 1.8535 && k.s_hat <= 1.8537, "{}", k.s_hat);
        assert!(k.tau_hat >= 0.775 && k.tau_hat <= 0.785, "{}", k.tau_hat);
        assert!((nu_star(k.tau_hat).unwrap() - nu_plus(k.tau_hat).unwrap()).abs() < 1e-10);
        assert!((c_middle_branch(k.s_hat) - c_last_branch(k.s_hat)).abs() < 1e-10);
        // Independent high-precision evaluation.
        assert!((k.tau_hat - 0.777247556265513).abs() < 1e-12);
        assert!((k.s_hat - 1.853634510967091).abs() < 1e-12);
    }

    #[test]
    fn c_values() {
        assert_eq!(c_of_s(1.0).unwrap(), 1.0);
        assert!((c_of_s(PHI).unwrap() - 1.0).abs() < 1e-12);
        assert!((c_middle_branch(PHI) - 1.0).abs() < 1e-12);
        assert!((c_of_s(2.0).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!(c_of_s(2.1).is_err());
        assert!(c_of_s(0.5).is_err());
        assert!(c_of_s(f64::NAN).is_err());
        assert!(c_of_s(2.0 + 1e-12).is_ok());
    }

    #[test]
    fn c_is_continuous_and_non_increasing() {
        let sh = s_hat();
        assert!((c_of_s(PHI - 1e-13).unwrap() - c_of_s(PHI + 1e-13).unwrap()).abs() < 1e-10);
        assert!((c_of_s(sh - 1e-13).unwrap() - c_of_s(sh + 1e-13).unwrap()).abs() < 1e-10);
        let vals: Vec<f64> = grid(PHI, 2.0, 4000).map(|s| c_of_s(s).unwrap()).collect();
        assert!(vals.windows(2).all(|w| w[1] <= w[0] + 1e-14));
    }

    #[test]
    fn lower_bound_below_upper() {
        for s in grid(1.0, 2.0, 1000) {
            assert!(2.0 / (s + 1.0) <= c_of_s(s).unwrap() + 1e-15);
        }
    }

    #[test]
    fn envelope() {
        assert_eq!(dw_envelope(1.0).unwrap(), 1.0);
        assert!((dw_envelope(PHI).unwrap() - (PHI + 1.0) / 2.0).abs() < 1e-12);
        assert!((dw_envelope(2.0).unwrap() - 1.0).abs() < 1e-14);
        let s_grid: Vec<f64> = grid(1.0, 2.0, 10_000).collect();
        let vals: Vec<f64> = s_grid.iter().map(|s| dw_envelope(*s).unwrap()).collect();
        for (w, sw) in vals.windows(2).zip(s_grid.windows(2)) {
            if sw[1] <= PHI {
                assert!(w[1] >= w[0] - 1e-14);
            } else if sw[0] >= PHI {
                assert!(w[1] <= w[0] + 1e-14);
            }
        }
        // The peak sits at s = φ, which is not a grid point.
        let peak = (PHI + 1.0) / 2.0;
        assert!(vals.iter().all(|v| *v <= peak + 1e-12));
        let max = vals.iter().cloned().fold(dw_envelope(PHI).unwrap(), f64::max);
        assert!((max - peak).abs() < 1e-9);
    }

    #[test]
    fn nu_values() {
        assert_eq!(nu_star(1.0).unwrap(), 0.0);
        assert_eq!(nu_plus(1.0).unwrap(), 1.0);
        assert!((nu_star(2.0 / 3.0).unwrap() - 1.0).abs() < 1e-14);
        for t in grid(2.0 / 3.0, 1.0, 200) {
            let a = nu_star(t).unwrap();
            let b = nu_plus(t).unwrap();
            assert!((0.0..=1.0).contains(&a) && (0.0..=1.0).contains(&b));
        }
        assert!(nu_star(0.5).is_err());
    }

    #[test]
    fn s_of_tau_nu_values() {
        assert!((s_of_tau_nu(1.0, 1.0).unwrap() - PHI).abs() < 1e-14);
        let ns = nu_star(2.0 / 3.0).unwrap();
        assert!((s_of_tau_nu(2.0 / 3.0, ns).unwrap() - 2.0).abs() < 1e-12);
        let th = tau_hat();
        assert!((s_of_tau_nu(th, nu_plus(th).unwrap()).unwrap() - s_hat()).abs() < 1e-15);
        assert!(s_of_tau_nu(0.8, 0.0).is_err());
        assert!(s_of_tau_nu(0.8, 1.5).is_err());
    }

    #[test]
    fn s_is_unimodal_in_nu() {
        for t in grid(2.0 / 3.0, 1.0, 20) {
            let np = nu_plus(t).unwrap();
            let vals: Vec<(f64, f64)> = grid(1e-3, 1.0, 400)
                .map(|n| (n, s_of_tau_nu(t, n).unwrap()))
                .collect();
            for w in vals.windows(2) {
                if w[1].0 <= np {
                    assert!(w[1].1 >= w[0].1 - 1e-13);
                } else if w[0].0 >= np {
                    assert!(w[1].1 <= w[0].1 + 1e-13);
                }
            }
        }
    }

    #[test]
    fn s_max_values() {
        assert!((s_max(1.0).unwrap() - PHI).abs() < 1e-14);
        assert!((s_max(2.0 / 3.0).unwrap() - 2.0).abs() < 1e-12);
        assert!((s_max(tau_hat()).unwrap() - s_hat()).abs() < 1e-12);
        let vals: Vec<f64> = grid(2.0 / 3.0, 1.0, 1000).map(|t| s_max(t).unwrap()).collect();
        assert!(vals.windows(2).all(|w| w[1] <= w[0] + 1e-14));
    }

    #[test]
    fn s_max_inverts_c() {
        for s in grid(PHI + 1e-6, 2.0, 500) {
            let tau = c_of_s(s).unwrap();
            let back = s_max(tau).unwrap();
            assert!((back - s).abs() < 1e-7, "s={s} back={back}");
            assert!((c_of_s(back).unwrap() - tau).abs() < 1e-7);
        }
    }

    #[test]
    fn reciprocal_curve() {
        for s in grid(1.01, 2.0, 50) {
            let tau = s / (s * s - 1.0);
            assert!((s_of_reciprocal_curve(tau) - s).abs() < 1e-12);
        }
    }

    #[test]
    fn region_predicates() {
        assert!(tau_region_contains(2.0, 2.0 / 3.0).unwrap());
        assert!(tau_region_contains(PHI, 1.0).unwrap());
        assert!(!tau_region_contains(PHI + 0.01, 1.0).unwrap());
        assert!(!tau_region_contains(1.5, 0.7).unwrap());
        assert!(dw_region_contains(PHI, (PHI + 1.0) / 2.0).unwrap());
        assert!(!dw_region_contains(1.9, 1.3).unwrap());
        assert!(!dw_region_contains(1.5, 0.99).unwrap());
        assert!(tau_region_contains(2.5, 0.7).is_err());
    }
}
