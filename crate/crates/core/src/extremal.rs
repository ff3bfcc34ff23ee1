//! Bodies on the boundary and in the interior of the `(s, τ)` and `(s, D/w)`
//! regions, and the reduction of a centered body with `s > φ` to a heptagon
//! with the same asymmetry and no smaller `τ`.
//!
//! Coordinates: the regular triangle `S` has vertices `p¹ = (0, 1)`,
//! `p² = (√3/2, −1/2)`, `p³ = (−√3/2, −1/2)`, so
//! `K_s = S ∩ (−sS) = {x : −1/2 ≤ pⁱ·x ≤ s/2}`.

use serde::{Deserialize, Serialize};

use crate::bounds::{self, PHI};
use crate::error::{check_domain, Error, Result};
use crate::functionals::{self, pseudo_complete_check, PseudoCompleteReport};
use crate::geom::{
    arithmetic_mean, boundary_crossings, from_halfplanes, line_intersection, make_polygon,
    minimum, minkowski_sum, scale, translate, ConvexPolygon, HalfPlane, Vec2,
};

const SQRT3: f64 = 1.732_050_807_568_877_2;
const BISECTION_STEPS: usize = 80;
/// Tolerance on `τ` and `s` when verifying a generated body.
pub const VERIFY_TOL: f64 = 1e-6;
/// Tolerance on `D/w` when verifying a witness pair.
pub const DW_VERIFY_TOL: f64 = 1e-5;
const HALFPLANE_BOX: f64 = 100.0;

fn vertex_of_triangle(i: usize) -> Vec2 {
    match i {
        0 => Vec2::new(0.0, 1.0),
        1 => Vec2::new(SQRT3 / 2.0, -0.5),
        _ => Vec2::new(-SQRT3 / 2.0, -0.5),
    }
}

/// Regular triangle with circumradius 1 and centroid 0.
pub fn regular_triangle() -> ConvexPolygon {
    make_polygon(&[vertex_of_triangle(0), vertex_of_triangle(1), vertex_of_triangle(2)])
        .expect("triangle")
}

/// `conv{(±1, 0), (±1, −1), (0, φ)}`.
pub fn golden_house() -> ConvexPolygon {
    make_polygon(&[
        Vec2::new(-1.0, 0.0),
        Vec2::new(1.0, 0.0),
        Vec2::new(-1.0, -1.0),
        Vec2::new(1.0, -1.0),
        Vec2::new(0.0, PHI),
    ])
    .expect("golden house")
}

fn check_s(s: f64) -> Result<()> {
    check_domain("s", s, 1.0, 2.0, "[1, 2]")
}

/// `S ∩ (−sS)`: centered, asymmetry `s`, `τ = α = 2/(s+1)`.
pub fn k_s(s: f64) -> Result<ConvexPolygon> {
    f_transform(s, 0.0)
}

fn halfplane(normal_angle: f64, through: Vec2) -> HalfPlane {
    HalfPlane::through(Vec2::from_angle(normal_angle), through).expect("unit normal")
}

/// Continuous deformation of `K_s` that keeps `s` and raises `τ` from
/// `2/(s+1)` at `t = 0` to `min{1, s/(s²−1)}` at `t = 1`.
///
/// For `t ∈ [0, ½]` the two lower slanted edges rotate about their bottom
/// vertices until vertical. For `t ∈ [½, 1]` the two upper slanted edges rotate
/// about the points `−qⁱ/s` until they meet in `(0, s/2)`. Angles move
/// linearly in `t`.
///
/// The rotated body `G` is intersected with `−sG`. For small `s` the rotated
/// lower edges alone would let the asymmetry exceed `s`; the cut restores
/// `G ⊂ −sG` and leaves the asymmetry points `(0, −1/2)`, `−qⁱ/s` in place.
/// Where `G ⊂ −sG` already holds it changes nothing.
pub fn f_transform(s: f64, t: f64) -> Result<ConvexPolygon> {
    check_s(s)?;
    check_domain("t", t, 0.0, 1.0, "[0, 1]")?;
    use std::f64::consts::FRAC_PI_6;
    let x = (2.0 * s - 1.0) / (2.0 * SQRT3);
    let q_right = Vec2::new(x, -0.5);
    let q_left = Vec2::new(-x, -0.5);
    // Pivots on the upper slanted edges.
    let u_right = Vec2::new(x / s, 0.5 / s);
    let u_left = Vec2::new(-x / s, 0.5 / s);

    let first = (2.0 * t).min(1.0);
    let second = (2.0 * t - 1.0).max(0.0);

    let lower = -FRAC_PI_6 * (1.0 - first);
    let upper_end = (x / s).atan2((s * s - 1.0) / (2.0 * s));
    let upper = FRAC_PI_6 + (upper_end - FRAC_PI_6) * second;

    let hs = [
        halfplane(-std::f64::consts::FRAC_PI_2, Vec2::new(0.0, -0.5)),
        halfplane(std::f64::consts::FRAC_PI_2, Vec2::new(0.0, 0.5 * s)),
        halfplane(lower, q_right),
        halfplane(std::f64::consts::PI - lower, q_left),
        halfplane(upper, u_right),
        halfplane(std::f64::consts::PI - upper, u_left),
    ];
    let cuts: Vec<HalfPlane> = hs
        .iter()
        .flat_map(|h| [*h, HalfPlane::new(-h.normal, s * h.offset).expect("unit normal")])
        .collect();
    from_halfplanes(&cuts, HALFPLANE_BOX)
}

/// Coordinates of the seven-vertex body built from `(τ, ν)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeptagonParams {
    pub tau: f64,
    pub nu: f64,
    /// First coordinate of the crossing `p = (alpha_param, 0)`.
    pub alpha_param: f64,
    pub s: f64,
    /// Factor with `−gamma_param·d¹ ∈ [−sp², −sp³]`.
    pub gamma_param: f64,
    pub p: Vec2,
    pub p2: Vec2,
    pub p3: Vec2,
    /// `aff{p, p²} ∩ aff{−p, p³}`.
    pub d1: Vec2,
    /// `aff{−p, p³} ∩ {x₁ = −1}`.
    pub d2: Vec2,
    /// `aff{p, p²} ∩ {x₁ = 1}`.
    pub d3: Vec2,
}

impl HeptagonParams {
    pub fn new(tau: f64, nu: f64) -> Result<Self> {
        let s = bounds::s_of_tau_nu(tau, nu)?;
        let ti = 1.0 / tau;
        let alpha = (1.0 + nu) / (2.0 * ti + nu - 1.0);
        let sa = s * alpha - 1.0;
        if !(sa > 0.0) {
            return Err(Error::InfeasibleParams(format!(
                "s·alpha = {} must exceed 1",
                s * alpha
            )));
        }
        let d1 = Vec2::new(
            alpha * (nu - 1.0) / (nu + 1.0),
            -2.0 * s * alpha * nu / (sa * (nu + 1.0)),
        );
        let inv_gamma =
            2.0 * alpha / (nu + 1.0).powi(2) * (2.0 * nu / sa - (nu - 1.0).powi(2) / 2.0);
        let gamma = 1.0 / inv_gamma;
        let params = Self {
            tau,
            nu,
            alpha_param: alpha,
            s,
            gamma_param: gamma,
            p: Vec2::new(alpha, 0.0),
            p2: Vec2::new(1.0 / s, -nu),
            p3: Vec2::new(-1.0 / s, -1.0),
            d1,
            d2: Vec2::new(-1.0, s * (1.0 - alpha) / sa),
            d3: Vec2::new(1.0, s * nu * (1.0 - alpha) / sa),
        };
        params.check_feasible()?;
        Ok(params)
    }

    /// `(2τ⁻¹+ν−2)/ν ≤ s ≤ 1/γ` and `sγ ≤ 1`, each within `1e−9`.
    pub fn check_feasible(&self) -> Result<()> {
        let lower = (2.0 / self.tau + self.nu - 2.0) / self.nu;
        let upper = 1.0 / self.gamma_param;
        let tol = 1e-9;
        if !(self.gamma_param > 0.0) || self.s < lower - tol || self.s > upper + tol {
            return Err(Error::InfeasibleParams(format!(
                "need {lower} <= s <= {upper}, got s = {} (tau = {}, nu = {})",
                self.s, self.tau, self.nu
            )));
        }
        if self.s * self.gamma_param > 1.0 + tol {
            return Err(Error::InfeasibleParams(format!(
                "s·gamma = {} exceeds 1",
                self.s * self.gamma_param
            )));
        }
        Ok(())
    }

    /// `p¹ = −γ d¹`.
    pub fn p1(&self) -> Vec2 {
        -self.d1 * self.gamma_param
    }

    /// `{±p, p², p³, −sp¹, −sp², −sp³}`.
    pub fn vertex_candidates(&self) -> [Vec2; 7] {
        let s = self.s;
        [
            self.p,
            -self.p,
            self.p2,
            self.p3,
            -self.p1() * s,
            -self.p2 * s,
            -self.p3 * s,
        ]
    }
}

/// `conv{±p, p², p³, −sp¹, −sp², −sp³}` with `s = s(τ, ν)`; centered with
/// `τ(K) = τ`. At `s = s(τ, ν)` the vertex `−sp¹` coincides with `d¹`, so
/// `p²` and `p³` fall on edges and the body is a pentagon in general.
pub fn heptagon(tau: f64, nu: f64) -> Result<(ConvexPolygon, HeptagonParams)> {
    check_domain("tau", tau, 2.0 / 3.0 - bounds::DOMAIN_SLACK, 1.0 + bounds::DOMAIN_SLACK, "[2/3, 1]")?;
    if !(nu > 0.0) || nu > 1.0 + bounds::DOMAIN_SLACK {
        return Err(Error::OutOfDomain {
            name: "nu",
            value: nu,
            domain: "(0, 1]",
        });
    }
    let tau = tau.clamp(2.0 / 3.0, 1.0);
    let nu = nu.min(1.0);
    let params = HeptagonParams::new(tau, nu)?;
    let poly = make_polygon(&params.vertex_candidates())?;
    Ok((poly, params))
}

/// How [`extremal_for`] realized its target.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Witness {
    FTransform { s: f64, t: f64 },
    Heptagon(HeptagonParams),
}

#[derive(Clone, Debug)]
pub struct ExtremalBody {
    /// Centered body.
    pub body: ConvexPolygon,
    pub witness: Witness,
    pub measured_s: f64,
    pub measured_tau: f64,
}

fn measure(k: &ConvexPolygon) -> Result<(ConvexPolygon, f64, f64)> {
    let asym = functionals::asymmetry(k)?;
    let kc = translate(k, -asym.center);
    let tau = functionals::tau_report_unchecked(&kc, asym.s)?.tau;
    Ok((kc, asym.s, tau))
}

/// Bisection for a root of a continuous `f` on `[lo, hi]`. If `f` has the
/// same sign at both ends, the end with the smaller `|f|` is returned.
fn bisect<F: FnMut(f64) -> Result<f64>>(mut lo: f64, mut hi: f64, mut f: F) -> Result<f64> {
    let flo = f(lo)?;
    let fhi = f(hi)?;
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if (flo < 0.0) == (fhi < 0.0) {
        return Ok(if flo.abs() <= fhi.abs() { lo } else { hi });
    }
    let rising = flo < 0.0;
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm < 0.0) == rising {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// A centered body with asymmetry `s` and `τ = tau`, verified by the
/// functionals.
pub fn extremal_for(s: f64, tau: f64) -> Result<ConvexPolygon> {
    Ok(extremal_for_detail(s, tau)?.body)
}

pub fn extremal_for_detail(s: f64, tau: f64) -> Result<ExtremalBody> {
    let out = |msg: String| Error::OutOfRegion(msg);
    match bounds::tau_region_contains(s, tau) {
        Ok(true) => {}
        Ok(false) | Err(_) => {
            return Err(out(format!("(s, tau) = ({s}, {tau}) is not in the region")))
        }
    }
    let s = s.clamp(1.0, 2.0);
    let lower = 2.0 / (s + 1.0);
    let reciprocal = if s > 1.0 { s / (s * s - 1.0) } else { f64::INFINITY };
    let f_top = reciprocal.min(1.0);
    let tau = tau.max(lower);

    let (body, witness) = if tau <= f_top + 1e-12 {
        let target = tau.min(f_top);
        let t = if target <= lower + 1e-15 {
            0.0
        } else {
            bisect(0.0, 1.0, |t| Ok(measure(&f_transform(s, t)?)?.2 - target))?
        };
        (f_transform(s, t)?, Witness::FTransform { s, t })
    } else {
        let tau = tau.min(1.0);
        let lo = bounds::nu_star(tau)?.max(bounds::nu_plus(tau)?);
        let nu = bisect(lo, 1.0, |nu| Ok(bounds::s_of_tau_nu(tau, nu)? - s))?;
        let (k, params) = heptagon(tau, nu)?;
        (k, Witness::Heptagon(params))
    };

    let (kc, ms, mt) = measure(&body)?;
    if (ms - s).abs() > VERIFY_TOL || (mt - tau).abs() > VERIFY_TOL {
        return Err(out(format!(
            "generated body has s = {ms}, tau = {mt}; wanted s = {s}, tau = {tau}"
        )));
    }
    Ok(ExtremalBody {
        body: kc,
        witness,
        measured_s: ms,
        measured_tau: mt,
    })
}

/// `C_λ = (1−λ)(K−K)/2 + λ(s+1)/2 · (K ∩ (−K))` for centered `K`.
pub fn c_lambda(k: &ConvexPolygon, lambda: f64) -> Result<ConvexPolygon> {
    check_domain("lambda", lambda, 0.0, 1.0, "[0, 1]")?;
    let s = functionals::check_centered(k)?;
    c_lambda_with_s(k, lambda, s)
}

fn c_lambda_with_s(k: &ConvexPolygon, lambda: f64, s: f64) -> Result<ConvexPolygon> {
    let mean = arithmetic_mean(k);
    let min = minimum(k)?;
    let a = 1.0 - lambda;
    let b = lambda * 0.5 * (s + 1.0);
    if lambda <= 0.0 {
        return Ok(mean);
    }
    if lambda >= 1.0 {
        return scale(&min, b);
    }
    Ok(minkowski_sum(&scale(&mean, a)?, &scale(&min, b)?))
}

#[derive(Clone, Debug)]
pub struct DwWitness {
    pub body: ConvexPolygon,
    pub gauge: ConvexPolygon,
    pub lambda: f64,
    pub report: PseudoCompleteReport,
}

/// A centered `K` with `s(K) = s` and a symmetric gauge `C` such that `K` is
/// pseudo-complete w.r.t. `C` and `D/w = rho`.
pub fn dw_witness(s: f64, rho: f64) -> Result<(ConvexPolygon, ConvexPolygon)> {
    let w = dw_witness_detail(s, rho)?;
    Ok((w.body, w.gauge))
}

pub fn dw_witness_detail(s: f64, rho: f64) -> Result<DwWitness> {
    match bounds::dw_region_contains(s, rho) {
        Ok(true) => {}
        Ok(false) | Err(_) => {
            return Err(Error::OutOfRegion(format!(
                "(s, D/w) = ({s}, {rho}) is not in the region"
            )))
        }
    }
    let s = s.clamp(1.0, 2.0);
    let k = extremal_for(s, bounds::c_of_s(s)?)?;
    let ms = functionals::check_centered(&k)?;
    let ratio = |lambda: f64| -> Result<f64> {
        let c = c_lambda_with_s(&k, lambda, ms)?;
        Ok(functionals::diameter(&k, &c) / functionals::width(&k, &c))
    };
    let top = ratio(1.0)?;
    let lambda = if rho <= 1.0 {
        0.0
    } else if rho >= top {
        1.0
    } else {
        bisect(0.0, 1.0, |l| Ok(ratio(l)? - rho))?
    };
    let c = c_lambda_with_s(&k, lambda, ms)?;
    let report = pseudo_complete_check(&k, &c)?;
    let measured = report.dw_ratio();
    if !report.is_pseudo_complete || (measured - rho).abs() > DW_VERIFY_TOL {
        return Err(Error::OutOfRegion(format!(
            "witness has D/w = {measured}, pseudo-complete = {}; wanted {rho}",
            report.is_pseudo_complete
        )));
    }
    Ok(DwWitness {
        body: k,
        gauge: c,
        lambda,
        report,
    })
}

/// Parameters selecting a member of one of the generated families.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum FamilyParams {
    GoldenHouse,
    KS { s: f64 },
    FTransform { s: f64, t: f64 },
    Heptagon { tau: f64, nu: f64 },
    ExtremalFor { s: f64, tau: f64 },
    CLambda { s: f64, lambda: f64 },
    DwWitness { s: f64, rho: f64 },
}

impl FamilyParams {
    /// The body and, for gauge families, the gauge.
    pub fn build(&self) -> Result<(ConvexPolygon, Option<ConvexPolygon>)> {
        Ok(match *self {
            FamilyParams::GoldenHouse => (golden_house(), None),
            FamilyParams::KS { s } => (k_s(s)?, None),
            FamilyParams::FTransform { s, t } => (f_transform(s, t)?, None),
            FamilyParams::Heptagon { tau, nu } => (heptagon(tau, nu)?.0, None),
            FamilyParams::ExtremalFor { s, tau } => (extremal_for(s, tau)?, None),
            FamilyParams::CLambda { s, lambda } => {
                let k = extremal_for(s, bounds::c_of_s(s)?)?;
                let c = c_lambda(&k, lambda)?;
                (k, Some(c))
            }
            FamilyParams::DwWitness { s, rho } => {
                let (k, c) = dw_witness(s, rho)?;
                (k, Some(c))
            }
        })
    }
}

/// One stage of [`canonicalize`].
#[derive(Clone, Debug, Serialize)]
pub struct CanonicalStep {
    pub name: &'static str,
    pub s: f64,
    pub tau: f64,
    #[serde(skip)]
    pub body: ConvexPolygon,
}

/// Points of the final body.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct CanonicalPoints {
    pub p: Vec2,
    pub p1: Vec2,
    pub p2: Vec2,
    pub p3: Vec2,
    pub d1: Vec2,
    pub s: f64,
}

impl CanonicalPoints {
    pub fn vertex_candidates(&self) -> [Vec2; 7] {
        let s = self.s;
        [
            self.p,
            -self.p,
            self.p2,
            self.p3,
            -self.p1 * s,
            -self.p2 * s,
            -self.p3 * s,
        ]
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CanonicalTrace {
    pub steps: Vec<CanonicalStep>,
    pub points: CanonicalPoints,
}

impl CanonicalTrace {
    /// Largest deviation of a step's asymmetry from the input's.
    pub fn max_s_drift(&self) -> f64 {
        let s0 = self.steps[0].s;
        self.steps
            .iter()
            .map(|st| (st.s - s0).abs())
            .fold(0.0, f64::max)
    }

    /// Largest decrease of `τ` between consecutive steps (0 if monotone).
    pub fn max_tau_drop(&self) -> f64 {
        self.steps
            .windows(2)
            .map(|w| (w[0].tau - w[1].tau).max(0.0))
            .fold(0.0, f64::max)
    }

    /// Every vertex of the final body is one of `±p, p², p³, −spⁱ`.
    pub fn has_canonical_vertices(&self, tol: f64) -> bool {
        let cands = self.points.vertex_candidates();
        let last = &self.steps.last().expect("non-empty trace").body;
        last.len() <= 7
            && last
                .vertices()
                .iter()
                .all(|v| cands.iter().any(|c| c.dist(*v) <= tol))
    }
}

/// Labelled boundary crossings: `z[i][j]` (`i ≠ j`) lies between the part of
/// `bd K` around `−pⁱ` and the part of `bd(−K)` around `pʲ`.
struct Crossings {
    z: [[Vec2; 3]; 3],
}

fn angle_in_arc(theta: f64, from: f64, to: f64) -> bool {
    use std::f64::consts::TAU;
    let span = (to - from).rem_euclid(TAU);
    let off = (theta - from).rem_euclid(TAU);
    off > 0.0 && off < span
}

fn label_crossings(k: &ConvexPolygon, asym: &[Vec2; 3]) -> Result<Crossings> {
    let bc = boundary_crossings(k);
    let pts: Vec<Vec2> = bc.transversal().collect();
    if bc.coincident || pts.len() != 6 {
        return Err(Error::Solver("expected exactly six transversal boundary crossings"));
    }
    // Directions −pⁱ (tag i) and pʲ (tag 3 + j).
    let dirs: Vec<(f64, usize)> = (0..3)
        .map(|i| ((-asym[i]).angle(), i))
        .chain((0..3).map(|j| (asym[j].angle(), 3 + j)))
        .collect();
    // Sector after crossing m, up to crossing m + 1.
    let mut sector = [usize::MAX; 6];
    for m in 0..6 {
        let from = pts[m].angle();
        let to = pts[(m + 1) % 6].angle();
        let inside: Vec<usize> = dirs
            .iter()
            .filter(|(a, _)| angle_in_arc(*a, from, to))
            .map(|(_, tag)| *tag)
            .collect();
        if inside.len() != 1 {
            return Err(Error::Solver("asymmetry directions do not separate the crossings"));
        }
        sector[m] = inside[0];
    }
    let mut z = [[Vec2::ZERO; 3]; 3];
    let mut seen = [[false; 3]; 3];
    for m in 0..6 {
        let before = sector[(m + 5) % 6];
        let after = sector[m];
        let (i, j) = match (before < 3, after < 3) {
            (true, false) => (before, after - 3),
            (false, true) => (after, before - 3),
            _ => return Err(Error::Solver("crossing sectors do not alternate")),
        };
        if i == j || seen[i][j] {
            return Err(Error::Solver("inconsistent crossing labels"));
        }
        seen[i][j] = true;
        z[i][j] = pts[m];
    }
    Ok(Crossings { z })
}

fn hull(points: &[Vec2]) -> Result<ConvexPolygon> {
    make_polygon(points)
}

fn intersect_lines(a1: Vec2, a2: Vec2, b1: Vec2, b2: Vec2) -> Result<Vec2> {
    line_intersection(a1, a2, b1, b2).ok_or(Error::Solver("parallel lines in construction"))
}

/// Reduces a centered body with `s > φ` to the form
/// `conv{±p, p², p³, −sp¹, −sp², −sp³}` without changing `s` and without
/// decreasing `τ`. The trace records `(s, τ)` of the input and of each stage.
pub fn canonicalize(k: &ConvexPolygon) -> Result<(ConvexPolygon, CanonicalTrace)> {
    let s0 = functionals::check_centered(k)?;
    if s0 <= PHI + 1e-6 {
        return Err(Error::AsymmetryTooSmall { s: s0 });
    }
    let mut steps = Vec::new();
    let record = |name: &'static str, body: ConvexPolygon, steps: &mut Vec<CanonicalStep>| -> Result<()> {
        let s = functionals::check_centered(&body)?;
        let tau = functionals::tau_report_unchecked(&body, s)?.tau;
        steps.push(CanonicalStep { name, s, tau, body });
        Ok(())
    };
    record("input", k.clone(), &mut steps)?;

    let asym = functionals::asymmetry(k)?;
    if !asym.well_spread || asym.asym_points.len() != 3 {
        return Err(Error::Solver("no well-spread triple of asymmetry points"));
    }
    // Asymmetry points relative to the (numerically tiny) center offset.
    let pa = [
        asym.asym_points[0] + asym.center,
        asym.asym_points[1] + asym.center,
        asym.asym_points[2] + asym.center,
    ];
    let s = s0;

    // Part a: keep K ∩ (−K) and the three far points.
    let mut pts: Vec<Vec2> = minimum(k)?.vertices().to_vec();
    pts.extend(pa.iter().map(|p| -*p * s));
    let k_a = hull(&pts)?;
    let cr = label_crossings(&k_a, &pa)?;
    let z = cr.z;
    record("minimum-plus-far-points", k_a, &mut steps)?;

    // Step 1: pull each far point in to the chord between its crossings.
    let mut gamma = [0.0; 3];
    for i in 0..3 {
        let a = z[(i + 1) % 3][i];
        let b = z[(i + 2) % 3][i];
        let hit = intersect_lines(Vec2::ZERO, pa[i], a, b)?;
        gamma[i] = hit.dot(pa[i]) / pa[i].dot(pa[i]);
    }
    let crossing_list: Vec<Vec2> = (0..3)
        .flat_map(|i| (0..3).filter(move |&j| j != i).map(move |j| (i, j)))
        .map(|(i, j)| z[i][j])
        .collect();
    let mut pts: Vec<Vec2> = (0..3).map(|i| -pa[i] * (s * gamma[i])).collect();
    pts.extend(&crossing_list);
    let k1 = hull(&pts)?;

    // The crossing with the smallest ρ becomes p; relabel so that p = z³².
    let rho_at = |v: Vec2| functionals::rho_of_direction_unchecked(&k1, v);
    let mut best: Option<(usize, usize, f64)> = None;
    for i in 0..3 {
        for j in 0..3 {
            if i == j {
                continue;
            }
            let r = rho_at(z[i][j]);
            let better = match best {
                None => true,
                Some((bi, bj, br)) => {
                    let tol = 1e-12 * br.max(1.0);
                    r < br - tol || (r <= br + tol && z[i][j].lex_cmp(&z[bi][bj]).is_lt())
                }
            };
            if better {
                best = Some((i, j, r));
            }
        }
    }
    let (a, b, _) = best.expect("six crossings");
    let c = 3 - a - b;
    // New label 0 ← c, 1 ← b, 2 ← a.
    let perm = [c, b, a];
    let zz = |i: usize, j: usize| z[perm[i]][perm[j]];
    let pp = |i: usize| pa[perm[i]];
    let gg = |i: usize| gamma[perm[i]];
    record("step-1", k1, &mut steps)?;
    let p = zz(2, 1);

    // Step 2: slide the far points of labels 2 and 3 onto aff{z²¹, z³¹}.
    let far_line = (zz(1, 0), zz(2, 0));
    let m3 = intersect_lines(zz(2, 0) * s, p * s, far_line.0, far_line.1)?;
    let p3_hat = -m3 / s;
    let m2 = intersect_lines(zz(0, 1) * s, p * s, -far_line.0, -far_line.1)?;
    let p2_hat = m2 / s;
    let p1 = pp(0) * gg(0);
    let mut pts = vec![-p1 * s, -p2_hat * s, -p3_hat * s];
    pts.extend(&crossing_list);
    record("step-2", hull(&pts)?, &mut steps)?;
    let (p2, p3) = (p2_hat, p3_hat);

    // Step 3: keep only the named points.
    let k3 = hull(&[-p1 * s, -p2 * s, -p3 * s, p2, p3, p, -p])?;
    record("step-3", k3, &mut steps)?;

    // Step 4: move −sp¹ onto the ray through d¹.
    let d1 = intersect_lines(-p, p3, p, p2)?;
    let p1_star = intersect_lines(-p2 * s, -p3 * s, Vec2::ZERO, -d1)?;
    let k4 = hull(&[-p1_star * s, -p2 * s, -p3 * s, p2, p3, p, -p])?;
    record("step-4", k4.clone(), &mut steps)?;

    let points = CanonicalPoints {
        p,
        p1: p1_star,
        p2,
        p3,
        d1,
        s,
    };
    Ok((k4, CanonicalTrace { steps, points }))
}
