//! Containment functionals of a body `K` with respect to a gauge body `C`.
//!
//! Circumradius and inradius are three-variable LPs over `(t, ρ)`. Diameter
//! and width only involve the 0-symmetric bodies `K − K` and `C − C`. For such
//! pairs the optimal containment needs no translation: if `A ⊂ t + ρB` then
//! also `A = −A ⊂ −t + ρB`, and averaging gives `A ⊂ ρB`. The same argument
//! makes `τ`, `α` and `γ` plain gauge maxima over vertices.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::{
    arithmetic_mean, gauge_unchecked, maximum, minimum, minkowski_sum, polar, reflect,
    scale, translate, ConvexPolygon, Vec2,
};
use crate::lp::{self, LinearProgram};

/// Tolerance for the centering precondition.
pub const CENTER_TOL: f64 = 1e-7;
/// Default tolerance of [`pseudo_complete_check`].
pub const PSEUDO_COMPLETE_TOL: f64 = 1e-7;
/// Below `1 + SYMMETRIC_S` a body is treated as symmetric and no well-spread
/// triple is sought.
pub const SYMMETRIC_S: f64 = 1e-6;
const SPREAD_MARGIN: f64 = 1e-8;
const WITNESS_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Touch {
    pub point: Vec2,
    /// Outer unit normal of the containing body at `point`.
    pub normal: Vec2,
    /// Weight of `normal` in the convex combination that gives 0.
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContainmentResult {
    pub rho: f64,
    pub translation: Vec2,
    pub touching: Vec<Touch>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AsymmetryResult {
    pub s: f64,
    pub center: Vec2,
    /// Points of `bd(K − c) ∩ bd(−(K − c)/s)`; a well-spread triple when one
    /// was found.
    pub asym_points: Vec<Vec2>,
    /// Outer normal of `K − c` at each asymmetry point.
    pub normals: Vec<Vec2>,
    pub well_spread: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TauReport {
    pub tau: f64,
    pub s: f64,
    /// Lexicographically smallest vertex of `K ∩ (−K)` attaining `τ`.
    pub attained_at: Vec2,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OptimalityCertificate {
    pub optimal: bool,
    pub rho: f64,
    /// Touching points at the given position (no translation) with the convex
    /// weights of their normals; empty when no witness exists.
    pub touching: Vec<Touch>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Sandwich {
    /// `(K − K)/2 ⊂ (D/2) C`.
    pub inner: bool,
    /// `(D/2) C ⊂ (s+1)/2 · (K − c)`.
    pub outer: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[allow(non_snake_case)]
pub struct PseudoCompleteReport {
    pub is_pseudo_complete: bool,
    pub r: f64,
    pub R: f64,
    pub D: f64,
    pub w: f64,
    pub s: f64,
    /// `|(s+1)r − (r+R)|`, `|(r+R) − (s+1)R/s|`, `|(s+1)R/s − D|`.
    pub residuals: [f64; 3],
    pub tolerance: f64,
    /// Only evaluated for pseudo-complete pairs.
    pub sandwich: Option<Sandwich>,
}

impl PseudoCompleteReport {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().cloned().fold(0.0, f64::max)
    }

    pub fn dw_ratio(&self) -> f64 {
        self.D / self.w
    }
}

/// Weights `λ ≥ 0`, `Σλ = 1`, with `|Σ λ_i v_i| ≤ tol`, using at most three
/// of the vectors. Pairs are tried before triples, in index order.
pub fn convex_zero_witness(vs: &[Vec2], tol: f64) -> Option<Vec<f64>> {
    let n = vs.len();
    let check = |w: &[f64]| {
        let sum = vs.iter().zip(w).fold(Vec2::ZERO, |acc, (v, l)| acc + *v * *l);
        sum.norm() <= tol
    };
    for i in 0..n {
        if vs[i].norm() <= tol {
            let mut w = vec![0.0; n];
            w[i] = 1.0;
            return Some(w);
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = (vs[i], vs[j]);
            if a.dot(b) >= 0.0 {
                continue;
            }
            let (na, nb) = (a.norm(), b.norm());
            let mut w = vec![0.0; n];
            w[i] = nb / (na + nb);
            w[j] = na / (na + nb);
            if check(&w) {
                return Some(w);
            }
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let Some(bc) = barycentric_of_origin(vs[i], vs[j], vs[k]) else {
                    continue;
                };
                if bc.iter().any(|l| *l < -1e-12) {
                    continue;
                }
                let mut w = vec![0.0; n];
                w[i] = bc[0].max(0.0);
                w[j] = bc[1].max(0.0);
                w[k] = bc[2].max(0.0);
                let tot: f64 = w.iter().sum();
                w.iter_mut().for_each(|l| *l /= tot);
                if check(&w) {
                    return Some(w);
                }
            }
        }
    }
    None
}

fn barycentric_of_origin(a: Vec2, b: Vec2, c: Vec2) -> Option<[f64; 3]> {
    let area = (b - a).cross(c - a);
    if area.abs() <= 1e-300 {
        return None;
    }
    let la = b.cross(c) / area;
    let lb = c.cross(a) / area;
    let lc = a.cross(b) / area;
    Some([la, lb, lc])
}

/// Smallest distance from 0 to an edge line of the triangle, negative if 0 is
/// outside.
fn origin_margin(p: &[Vec2; 3]) -> f64 {
    let orient = (p[1] - p[0]).cross(p[2] - p[0]).signum();
    (0..3)
        .map(|i| {
            let a = p[i];
            let b = p[(i + 1) % 3];
            let e = b - a;
            // Signed distance of 0 from the edge line, positive on the
            // interior side.
            orient * e.cross(-a) / e.norm()
        })
        .fold(f64::INFINITY, f64::min)
}

fn touches_from_certificate(
    sol: &lp::LpSolution,
    points: &[Vec2],
    normals: &[Vec2],
) -> Vec<Touch> {
    if let Some(cert) = &sol.certificate {
        let total: f64 = cert.multipliers.iter().sum();
        if total > 0.0 {
            return cert
                .indices
                .iter()
                .zip(&cert.multipliers)
                .map(|(&i, &y)| Touch {
                    point: points[i],
                    normal: normals[i],
                    weight: y / total,
                })
                .collect();
        }
    }
    // No dual certificate: fall back to a geometric witness over the tight
    // rows.
    let tn: Vec<Vec2> = sol.tight_set.iter().map(|&i| normals[i]).collect();
    match convex_zero_witness(&tn, WITNESS_TOL) {
        Some(w) => sol
            .tight_set
            .iter()
            .zip(w)
            .filter(|(_, l)| *l > 0.0)
            .map(|(&i, l)| Touch {
                point: points[i],
                normal: normals[i],
                weight: l,
            })
            .collect(),
        None => sol
            .tight_set
            .iter()
            .map(|&i| Touch {
                point: points[i],
                normal: normals[i],
                weight: 0.0,
            })
            .collect(),
    }
}

fn optimal_point(sol: &lp::LpSolution) -> Result<Vec<f64>> {
    match (&sol.status, &sol.point) {
        (lp::LpStatus::Optimal, Some(p)) => Ok(p.clone()),
        _ => Err(Error::Solver("containment program has no optimum")),
    }
}

/// `R(K, C) = min{ρ : K ⊂ t + ρC}`.
pub fn circumradius(k: &ConvexPolygon, c: &ConvexPolygon) -> Result<ContainmentResult> {
    let mut prog = LinearProgram::new(3, vec![0.0, 0.0, 1.0]);
    let mut points = Vec::new();
    let mut normals = Vec::new();
    for &v in k.vertices() {
        for h in c.facets() {
            let a = h.normal;
            prog.push(vec![-a.x, -a.y, -h.offset], -a.dot(v));
            points.push(v);
            normals.push(a);
        }
    }
    let sol = lp::solve(&prog)?;
    let x = optimal_point(&sol)?;
    Ok(ContainmentResult {
        rho: x[2],
        translation: Vec2::new(x[0], x[1]),
        touching: touches_from_certificate(&sol, &points, &normals),
    })
}

/// `r(K, C) = max{ρ : t + ρC ⊂ K}`.
pub fn inradius(k: &ConvexPolygon, c: &ConvexPolygon) -> Result<ContainmentResult> {
    let mut prog = LinearProgram::new(3, vec![0.0, 0.0, -1.0]);
    let mut rows = Vec::new();
    for h in k.facets() {
        let a = h.normal;
        for &u in c.vertices() {
            prog.push(vec![a.x, a.y, a.dot(u)], h.offset);
            rows.push((u, a));
        }
    }
    let sol = lp::solve(&prog)?;
    let x = optimal_point(&sol)?;
    let t = Vec2::new(x[0], x[1]);
    let rho = x[2];
    let points: Vec<Vec2> = rows.iter().map(|(u, _)| t + *u * rho).collect();
    let normals: Vec<Vec2> = rows.iter().map(|(_, a)| *a).collect();
    Ok(ContainmentResult {
        rho,
        translation: t,
        touching: touches_from_certificate(&sol, &points, &normals),
    })
}

/// `R(A, B)` for 0-symmetric `A`, `B` (no translation needed).
pub fn symmetric_circumradius(a: &ConvexPolygon, b: &ConvexPolygon) -> f64 {
    a.vertices()
        .iter()
        .map(|v| gauge_unchecked(b, *v))
        .fold(0.0, f64::max)
}

/// `D(K, C) = 2 R(K − K, C − C)`.
pub fn diameter(k: &ConvexPolygon, c: &ConvexPolygon) -> f64 {
    let dk = minkowski_sum(k, &reflect(k));
    let dc = minkowski_sum(c, &reflect(c));
    2.0 * symmetric_circumradius(&dk, &dc)
}

/// `w(K, C) = 2 r(K − K, C − C)`.
pub fn width(k: &ConvexPolygon, c: &ConvexPolygon) -> f64 {
    let dk = minkowski_sum(k, &reflect(k));
    let dc = minkowski_sum(c, &reflect(c));
    2.0 / symmetric_circumradius(&dc, &dk)
}

/// Minkowski asymmetry `s(K)` and a center, from one LP in `(d, s)` with
/// `d = (s+1)c`.
pub fn asymmetry(k: &ConvexPolygon) -> Result<AsymmetryResult> {
    let mut prog = LinearProgram::new(3, vec![0.0, 0.0, 1.0]);
    let mut pairs = Vec::new();
    let verts = k.vertices();
    let facets = k.facets();
    for (i, &v) in verts.iter().enumerate() {
        for (j, h) in facets.iter().enumerate() {
            let a = h.normal;
            prog.push(vec![a.x, a.y, -h.offset], a.dot(v));
            pairs.push((i, j));
        }
    }
    let sol = lp::solve(&prog)?;
    let x = optimal_point(&sol)?;
    let s = x[2];
    let center = Vec2::new(x[0], x[1]) / (s + 1.0);

    let tight: Vec<(usize, usize)> = sol.tight_set.iter().map(|&r| pairs[r]).collect();
    let point_of = |i: usize| -(verts[i] - center) / s;

    let mut best: Option<([usize; 3], f64)> = None;
    if s > 1.0 + SYMMETRIC_S && tight.len() <= 64 {
        let m = tight.len();
        for a in 0..m {
            for b in a + 1..m {
                for c in b + 1..m {
                    let (ia, ja) = tight[a];
                    let (ib, jb) = tight[b];
                    let (ic, jc) = tight[c];
                    if ia == ib || ia == ic || ib == ic {
                        continue;
                    }
                    let pts = [point_of(ia), point_of(ib), point_of(ic)];
                    let margin = origin_margin(&pts);
                    if margin < SPREAD_MARGIN {
                        continue;
                    }
                    let ns = [facets[ja].normal, facets[jb].normal, facets[jc].normal];
                    if convex_zero_witness(&ns, WITNESS_TOL).is_none() {
                        continue;
                    }
                    if best.is_none_or(|(_, bm)| margin > bm) {
                        best = Some(([a, b, c], margin));
                    }
                }
            }
        }
    }

    let chosen: Vec<(usize, usize)> = match best {
        Some((idx, _)) => idx.iter().map(|&t| tight[t]).collect(),
        None => {
            let mut seen = Vec::new();
            for &(i, j) in &tight {
                if !seen.iter().any(|&(si, _)| si == i) {
                    seen.push((i, j));
                }
            }
            seen
        }
    };
    Ok(AsymmetryResult {
        s,
        center,
        asym_points: chosen.iter().map(|&(i, _)| point_of(i)).collect(),
        normals: chosen.iter().map(|&(_, j)| facets[j].normal).collect(),
        well_spread: best.is_some(),
    })
}

pub fn minkowski_center(k: &ConvexPolygon) -> Result<Vec2> {
    Ok(asymmetry(k)?.center)
}

/// `K` translated so that its Minkowski center is the origin.
pub fn centered(k: &ConvexPolygon) -> Result<ConvexPolygon> {
    Ok(translate(k, -minkowski_center(k)?))
}

/// Checks that the origin is a Minkowski center of `K` (`−K ⊂ s(K)·K` up to
/// [`CENTER_TOL`]) and returns `s(K)`.
pub fn check_centered(k: &ConvexPolygon) -> Result<f64> {
    let depth = k.origin_depth();
    if depth <= 0.0 {
        return Err(Error::NotCentered {
            deviation: -depth,
        });
    }
    let s = asymmetry(k)?.s;
    let worst = k
        .vertices()
        .iter()
        .map(|v| gauge_unchecked(k, -*v))
        .fold(0.0, f64::max);
    let deviation = worst - s;
    if deviation > CENTER_TOL {
        return Err(Error::NotCentered { deviation });
    }
    Ok(s)
}

/// Maximum of the gauge of `outer` over the vertices of `inner`, with the
/// lexicographically smallest maximizer.
fn gauge_max(inner: &ConvexPolygon, outer: &ConvexPolygon) -> (f64, Vec2) {
    let vals: Vec<(f64, Vec2)> = inner
        .vertices()
        .iter()
        .map(|v| (gauge_unchecked(outer, *v), *v))
        .collect();
    let max = vals.iter().map(|(g, _)| *g).fold(0.0, f64::max);
    let tol = 1e-12 * max.max(1.0);
    let at = vals
        .iter()
        .filter(|(g, _)| *g >= max - tol)
        .map(|(_, v)| *v)
        .min_by(|a, b| a.lex_cmp(b))
        .unwrap_or(Vec2::ZERO);
    (max, at)
}

/// `τ` of a body already known to be centered.
pub(crate) fn tau_report_unchecked(k: &ConvexPolygon, s: f64) -> Result<TauReport> {
    let m = minimum(k)?;
    let a = arithmetic_mean(k);
    let (tau, at) = gauge_max(&m, &a);
    Ok(TauReport {
        tau,
        s,
        attained_at: at,
    })
}

/// `τ(K)`: optimal factor with `K ∩ (−K) ⊂ τ · (K − K)/2`.
pub fn tau_detail(k: &ConvexPolygon) -> Result<TauReport> {
    let s = check_centered(k)?;
    tau_report_unchecked(k, s)
}

pub fn tau(k: &ConvexPolygon) -> Result<f64> {
    Ok(tau_detail(k)?.tau)
}

/// `ρ(v) = 1/‖v‖_{(K−K)/2}` for `v` scaled onto `bd(K ∩ (−K))`.
pub fn rho_of_direction(k: &ConvexPolygon, v: Vec2) -> Result<f64> {
    if !(v.norm() > 0.0) {
        return Err(Error::ZeroDirection);
    }
    check_centered(k)?;
    Ok(rho_of_direction_unchecked(k, v))
}

pub(crate) fn rho_of_direction_unchecked(k: &ConvexPolygon, v: Vec2) -> f64 {
    let m = minimum(k).expect("centered body has interior minimum");
    let a = arithmetic_mean(k);
    gauge_unchecked(&m, v) / gauge_unchecked(&a, v)
}

/// `α(K) = R(K ∩ (−K), conv(K ∪ (−K)))`.
pub fn alpha(k: &ConvexPolygon) -> Result<f64> {
    check_centered(k)?;
    alpha_unchecked(k)
}

pub(crate) fn alpha_unchecked(k: &ConvexPolygon) -> Result<f64> {
    let m = minimum(k)?;
    Ok(gauge_max(&m, &maximum(k)).0)
}

/// `γ(K) = τ(K°)`.
pub fn gamma(k: &ConvexPolygon) -> Result<f64> {
    let s = check_centered(k)?;
    gamma_unchecked(k, s)
}

pub(crate) fn gamma_unchecked(k: &ConvexPolygon, s: f64) -> Result<f64> {
    // Polarity at a Minkowski center keeps it a Minkowski center with the
    // same asymmetry.
    let p = polar(k)?;
    Ok(tau_report_unchecked(&p, s)?.tau)
}

/// All centered functionals of a body in one pass.
#[derive(Clone, Debug, Serialize)]
pub struct BodyProfile {
    pub s: f64,
    pub center: Vec2,
    pub tau: f64,
    pub tau_attained_at: Vec2,
    pub alpha: f64,
    pub gamma: f64,
    pub well_spread: bool,
}

/// Centers `K` and evaluates `s`, `τ`, `α`, `γ`; returns the centered body
/// with the profile.
pub fn profile(k: &ConvexPolygon) -> Result<(ConvexPolygon, BodyProfile)> {
    let asym = asymmetry(k)?;
    let kc = translate(k, -asym.center);
    let tr = tau_report_unchecked(&kc, asym.s)?;
    let alpha = alpha_unchecked(&kc)?;
    let gamma = gamma_unchecked(&kc, asym.s)?;
    Ok((
        kc,
        BodyProfile {
            s: asym.s,
            center: asym.center,
            tau: tr.tau,
            tau_attained_at: tr.attained_at,
            alpha,
            gamma,
            well_spread: asym.well_spread,
        },
    ))
}

/// Whether `K ⊂ C` is optimal, i.e. no translate of a smaller copy of `C`
/// contains `K`. The touching certificate is taken at the given position.
pub fn optimal_containment_check(
    k: &ConvexPolygon,
    c: &ConvexPolygon,
) -> Result<OptimalityCertificate> {
    let tol = 1e-9 * c.scale().max(1.0);
    let excess = c.containment_excess(k);
    if excess > tol {
        return Err(Error::NotContained { excess });
    }
    let rho = circumradius(k, c)?.rho;
    let optimal = (rho - 1.0).abs() <= 1e-7;
    let mut pts = Vec::new();
    let mut ns = Vec::new();
    for &v in k.vertices() {
        for h in c.facets() {
            if h.signed_distance(v).abs() <= 1e-7 * c.scale().max(1.0) {
                pts.push(v);
                ns.push(h.normal);
            }
        }
    }
    let touching = match convex_zero_witness(&ns, WITNESS_TOL) {
        Some(w) if optimal => pts
            .iter()
            .zip(&ns)
            .zip(w)
            .filter(|(_, l)| *l > 0.0)
            .map(|((p, n), l)| Touch {
                point: *p,
                normal: *n,
                weight: l,
            })
            .collect(),
        _ => Vec::new(),
    };
    Ok(OptimalityCertificate {
        optimal,
        rho,
        touching,
    })
}

/// How far `C` and `−C` stick out of each other. Compared through facets
/// rather than vertex matching, so a near-collinear vertex kept on one side
/// and merged on the other does not count.
pub fn symmetry_deviation(c: &ConvexPolygon) -> f64 {
    let m = reflect(c);
    c.containment_excess(&m).max(m.containment_excess(c)).max(0.0)
}

pub fn pseudo_complete_check(k: &ConvexPolygon, c: &ConvexPolygon) -> Result<PseudoCompleteReport> {
    pseudo_complete_check_tol(k, c, PSEUDO_COMPLETE_TOL)
}

/// Tests `r + R = D` through the equality chain
/// `(s+1) r = r + R = (s+1)/s · R = D`.
#[allow(non_snake_case)]
pub fn pseudo_complete_check_tol(
    k: &ConvexPolygon,
    c: &ConvexPolygon,
    tol: f64,
) -> Result<PseudoCompleteReport> {
    let deviation = symmetry_deviation(c);
    if deviation > 1e-8 * c.scale().max(1.0) {
        return Err(Error::GaugeNotSymmetric { deviation });
    }
    let inr = inradius(k, c)?;
    let r = inr.rho;
    let R = circumradius(k, c)?.rho;
    let D = diameter(k, c);
    let w = width(k, c);
    let asym = asymmetry(k)?;
    let s = asym.s;
    let residuals = [
        ((s + 1.0) * r - (r + R)).abs(),
        ((r + R) - (s + 1.0) * R / s).abs(),
        ((s + 1.0) * R / s - D).abs(),
    ];
    let is_pc = residuals.iter().all(|x| *x <= tol);
    let sandwich = if is_pc {
        Some(sandwich_check(k, c, D, s, &[asym.center, inr.translation])?)
    } else {
        None
    };
    Ok(PseudoCompleteReport {
        is_pseudo_complete: is_pc,
        r,
        R,
        D,
        w,
        s,
        residuals,
        tolerance: tol,
        sandwich,
    })
}

/// `(K−K)/2 ⊂ (D/2)C ⊂ (s+1)/2 · (K − c)` for the first candidate center
/// that satisfies the outer inclusion.
fn sandwich_check(
    k: &ConvexPolygon,
    c: &ConvexPolygon,
    d: f64,
    s: f64,
    centers: &[Vec2],
) -> Result<Sandwich> {
    let tol = 1e-7 * k.scale().max(1.0);
    let half_d_c = scale(c, 0.5 * d)?;
    let inner = half_d_c.contains(&arithmetic_mean(k), tol);
    let outer = centers.iter().any(|&ctr| {
        let big = scale(&translate(k, -ctr), 0.5 * (s + 1.0)).expect("positive factor");
        big.contains(&half_d_c, tol)
    });
    Ok(Sandwich { inner, outer })
}
