//! Planar convex polygons.
//!
//! A [`ConvexPolygon`] stores its vertices counter-clockwise with no repeated
//! and no collinear vertices. The H-representation (unit outward normals and
//! offsets) is computed on first use and cached.
//!
//! Every constructor funnels through [`make_polygon`], which takes the convex
//! hull of its input, so the vertex-list invariants hold for all values of
//! the type.

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Threshold on the cross product of consecutive normalized edge vectors.
/// Vertices turning by less than this are treated as collinear and dropped.
pub const CONVEXITY_TOL: f64 = 1e-10;

/// Angular tolerance used to decide whether two supporting normals coincide.
pub const NORMAL_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    #[inline]
    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 3D cross product; positive when `o` is
    /// counter-clockwise from `self`.
    #[inline]
    pub fn cross(self, o: Vec2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn normalized(self) -> Vec2 {
        self / self.norm()
    }

    /// Counter-clockwise rotation by a right angle.
    #[inline]
    pub fn perp(self) -> Vec2 {
        Vec2::new(-self.y, self.x)
    }

    #[inline]
    pub fn dist(self, o: Vec2) -> f64 {
        (self - o).norm()
    }

    #[inline]
    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    #[inline]
    pub fn from_angle(theta: f64) -> Vec2 {
        Vec2::new(theta.cos(), theta.sin())
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Lexicographic comparison on `(x, y)`.
    pub fn lex_cmp(&self, o: &Vec2) -> std::cmp::Ordering {
        self.x.total_cmp(&o.x).then(self.y.total_cmp(&o.y))
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    #[inline]
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl AddAssign for Vec2 {
    #[inline]
    fn add_assign(&mut self, o: Vec2) {
        self.x += o.x;
        self.y += o.y;
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    #[inline]
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    #[inline]
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    #[inline]
    fn mul(self, k: f64) -> Vec2 {
        Vec2::new(self.x * k, self.y * k)
    }
}

impl Mul<Vec2> for f64 {
    type Output = Vec2;
    #[inline]
    fn mul(self, v: Vec2) -> Vec2 {
        v * self
    }
}

impl Div<f64> for Vec2 {
    type Output = Vec2;
    #[inline]
    fn div(self, k: f64) -> Vec2 {
        Vec2::new(self.x / k, self.y / k)
    }
}

/// Intersection point of the lines `aff{a1, a2}` and `aff{b1, b2}`, or `None`
/// if they are parallel.
pub fn line_intersection(a1: Vec2, a2: Vec2, b1: Vec2, b2: Vec2) -> Option<Vec2> {
    let da = a2 - a1;
    let db = b2 - b1;
    let den = da.cross(db);
    if den.abs() <= 1e-14 * da.norm() * db.norm() {
        return None;
    }
    let t = (b1 - a1).cross(db) / den;
    Some(a1 + da * t)
}

/// Closed half-plane `{x : normal · x <= offset}` with a unit outward normal.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HalfPlane {
    pub normal: Vec2,
    pub offset: f64,
}

impl HalfPlane {
    /// Builds a half-plane from an arbitrary non-zero normal, rescaling to unit
    /// length.
    pub fn new(normal: Vec2, offset: f64) -> Result<Self> {
        let n = normal.norm();
        if !(n > 0.0) || !n.is_finite() || !offset.is_finite() {
            return Err(Error::ZeroDirection);
        }
        Ok(Self {
            normal: normal / n,
            offset: offset / n,
        })
    }

    /// Half-plane bounded by the line through `point` with the given normal.
    pub fn through(normal: Vec2, point: Vec2) -> Result<Self> {
        Self::new(normal, normal.dot(point))
    }

    #[inline]
    pub fn signed_distance(&self, p: Vec2) -> f64 {
        self.normal.dot(p) - self.offset
    }
}

/// Full-dimensional convex polygon, vertices counter-clockwise.
#[derive(Clone, Debug)]
pub struct ConvexPolygon {
    vertices: Vec<Vec2>,
    facets: OnceLock<Vec<HalfPlane>>,
}

impl PartialEq for ConvexPolygon {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices
    }
}

/// Convex hull of `points` as a canonical polygon.
///
/// Near-duplicate points are merged and vertices whose turn is below
/// [`CONVEXITY_TOL`] are dropped. Fails with `DegenerateInput` when fewer than
/// three points survive or the hull has no area.
pub fn make_polygon(points: &[Vec2]) -> Result<ConvexPolygon> {
    if points.iter().any(|p| !p.is_finite()) {
        return Err(Error::DegenerateInput("non-finite coordinate"));
    }
    if points.len() < 3 {
        return Err(Error::DegenerateInput("fewer than three points"));
    }
    let scale = points
        .iter()
        .map(|p| p.x.abs().max(p.y.abs()))
        .fold(0.0_f64, f64::max)
        .max(f64::MIN_POSITIVE);
    let merge_tol = 1e-12 * scale;

    let mut pts: Vec<Vec2> = points.to_vec();
    pts.sort_by(|a, b| a.lex_cmp(b));
    pts.dedup_by(|a, b| a.dist(*b) <= merge_tol);
    if pts.len() < 3 {
        return Err(Error::DegenerateInput("fewer than three distinct points"));
    }

    // Andrew's monotone chain; exact-collinear points are popped here, nearly
    // collinear ones by the cleanup pass below.
    let mut hull: Vec<Vec2> = Vec::with_capacity(pts.len() + 1);
    for &p in &pts {
        while hull.len() >= 2 && turn(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    let lower_len = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower_len
            && turn(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0
        {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();

    let verts = remove_flat_vertices(hull, merge_tol);
    if verts.len() < 3 {
        return Err(Error::DegenerateInput("hull is lower-dimensional"));
    }
    let poly = ConvexPolygon {
        vertices: verts,
        facets: OnceLock::new(),
    };
    if poly.area() <= 1e-14 * scale * scale {
        return Err(Error::DegenerateInput("hull has no area"));
    }
    Ok(poly)
}

#[inline]
fn turn(a: Vec2, b: Vec2, c: Vec2) -> f64 {
    (b - a).cross(c - b)
}

fn remove_flat_vertices(mut v: Vec<Vec2>, merge_tol: f64) -> Vec<Vec2> {
    loop {
        let n = v.len();
        if n < 3 {
            return v;
        }
        let mut drop = None;
        for i in 0..n {
            let prev = v[(i + n - 1) % n];
            let cur = v[i];
            let next = v[(i + 1) % n];
            let e1 = cur - prev;
            let e2 = next - cur;
            if e1.norm() <= merge_tol || e2.norm() <= merge_tol {
                drop = Some(i);
                break;
            }
            if e1.normalized().cross(e2.normalized()) <= CONVEXITY_TOL {
                drop = Some(i);
                break;
            }
        }
        match drop {
            Some(i) => {
                v.remove(i);
            }
            None => return v,
        }
    }
}

impl ConvexPolygon {
    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Minimal H-representation, one half-plane per edge in vertex order.
    /// Facet `i` supports the edge from vertex `i` to vertex `i + 1`.
    pub fn facets(&self) -> &[HalfPlane] {
        self.facets.get_or_init(|| {
            let n = self.vertices.len();
            (0..n)
                .map(|i| {
                    let a = self.vertices[i];
                    let b = self.vertices[(i + 1) % n];
                    let e = (b - a).normalized();
                    let normal = Vec2::new(e.y, -e.x);
                    HalfPlane {
                        normal,
                        offset: normal.dot(a),
                    }
                })
                .collect()
        })
    }

    pub fn area(&self) -> f64 {
        let n = self.vertices.len();
        0.5 * (0..n)
            .map(|i| self.vertices[i].cross(self.vertices[(i + 1) % n]))
            .sum::<f64>()
    }

    pub fn centroid(&self) -> Vec2 {
        let n = self.vertices.len();
        let mut acc = Vec2::ZERO;
        let mut a2 = 0.0;
        for i in 0..n {
            let p = self.vertices[i];
            let q = self.vertices[(i + 1) % n];
            let c = p.cross(q);
            a2 += c;
            acc += (p + q) * c;
        }
        acc / (3.0 * a2)
    }

    /// Largest absolute coordinate; used to scale tolerances.
    pub fn scale(&self) -> f64 {
        self.vertices
            .iter()
            .map(|p| p.x.abs().max(p.y.abs()))
            .fold(0.0, f64::max)
    }

    pub fn contains_point(&self, p: Vec2, tol: f64) -> bool {
        self.facets().iter().all(|h| h.signed_distance(p) <= tol)
    }

    /// Whether `inner ⊂ self` up to `tol` (checked on the vertices of `inner`).
    pub fn contains(&self, inner: &ConvexPolygon, tol: f64) -> bool {
        self.containment_excess(inner) <= tol
    }

    /// Largest signed distance of a vertex of `inner` outside `self`.
    pub fn containment_excess(&self, inner: &ConvexPolygon) -> f64 {
        let mut worst = f64::NEG_INFINITY;
        for h in self.facets() {
            for &v in &inner.vertices {
                worst = worst.max(h.signed_distance(v));
            }
        }
        worst
    }

    /// Smallest distance from the origin to a facet line (negative if the
    /// origin is outside).
    pub fn origin_depth(&self) -> f64 {
        self.facets()
            .iter()
            .map(|h| h.offset)
            .fold(f64::INFINITY, f64::min)
    }

    /// Hausdorff-style vertex match: every vertex of each polygon lies within
    /// `tol` of some vertex of the other.
    pub fn same_vertices(&self, other: &ConvexPolygon, tol: f64) -> bool {
        let near = |a: &[Vec2], b: &[Vec2]| {
            a.iter()
                .all(|p| b.iter().any(|q| p.dist(*q) <= tol))
        };
        near(&self.vertices, &other.vertices) && near(&other.vertices, &self.vertices)
    }

    /// Largest distance between corresponding vertices under the best cyclic
    /// alignment; `None` if vertex counts differ.
    pub fn vertex_distance(&self, other: &ConvexPolygon) -> Option<f64> {
        let n = self.len();
        if n != other.len() {
            return None;
        }
        (0..n)
            .map(|shift| {
                (0..n)
                    .map(|i| self.vertices[i].dist(other.vertices[(i + shift) % n]))
                    .fold(0.0, f64::max)
            })
            .min_by(|a, b| a.total_cmp(b))
    }
}

pub fn support(k: &ConvexPolygon, u: Vec2) -> Result<f64> {
    if !(u.norm() > 0.0) {
        return Err(Error::ZeroDirection);
    }
    Ok(k.vertices
        .iter()
        .map(|v| u.dot(*v))
        .fold(f64::NEG_INFINITY, f64::max))
}

pub fn facets(k: &ConvexPolygon) -> Vec<HalfPlane> {
    k.facets().to_vec()
}

fn lowest_index(v: &[Vec2]) -> usize {
    (0..v.len())
        .min_by(|&i, &j| {
            v[i].y
                .total_cmp(&v[j].y)
                .then(v[i].x.total_cmp(&v[j].x))
        })
        .unwrap_or(0)
}

/// `K + C` by merging the edge sequences of both summands in angular order.
pub fn minkowski_sum(k: &ConvexPolygon, c: &ConvexPolygon) -> ConvexPolygon {
    let a = &k.vertices;
    let b = &c.vertices;
    let (n, m) = (a.len(), b.len());
    let (ia, ib) = (lowest_index(a), lowest_index(b));
    let pa = |i: usize| a[(ia + i) % n];
    let pb = |j: usize| b[(ib + j) % m];

    let mut out = Vec::with_capacity(n + m);
    let (mut i, mut j) = (0usize, 0usize);
    while i < n || j < m {
        out.push(pa(i) + pb(j));
        let ea = pa(i + 1) - pa(i);
        let eb = pb(j + 1) - pb(j);
        let c = if i == n {
            -1.0
        } else if j == m {
            1.0
        } else {
            ea.cross(eb)
        };
        if c > 0.0 {
            i += 1;
        } else if c < 0.0 {
            j += 1;
        } else {
            i += 1;
            j += 1;
        }
    }
    make_polygon(&out).expect("sum of full-dimensional polygons is full-dimensional")
}

/// Clips `poly` to the half-plane `h`; may return fewer than three points.
pub fn clip(poly: &[Vec2], h: &HalfPlane) -> Vec<Vec2> {
    let n = poly.len();
    let mut out = Vec::with_capacity(n + 1);
    for i in 0..n {
        let p = poly[i];
        let q = poly[(i + 1) % n];
        let dp = h.signed_distance(p);
        let dq = h.signed_distance(q);
        if dp <= 0.0 {
            out.push(p);
        }
        if (dp < 0.0 && dq > 0.0) || (dp > 0.0 && dq < 0.0) {
            let t = dp / (dp - dq);
            out.push(p + (q - p) * t);
        }
    }
    out
}

/// Exact intersection `K ∩ C` by clipping `K` against every facet of `C`.
pub fn intersect(k: &ConvexPolygon, c: &ConvexPolygon) -> Result<ConvexPolygon> {
    let mut pts = k.vertices.clone();
    for h in c.facets() {
        pts = clip(&pts, h);
        if pts.len() < 3 {
            return Err(Error::EmptyOrDegenerateIntersection);
        }
    }
    make_polygon(&pts).map_err(|_| Error::EmptyOrDegenerateIntersection)
}

/// Intersection of a family of half-planes, computed by clipping a large box.
pub fn from_halfplanes(hs: &[HalfPlane], bound: f64) -> Result<ConvexPolygon> {
    let mut pts = vec![
        Vec2::new(-bound, -bound),
        Vec2::new(bound, -bound),
        Vec2::new(bound, bound),
        Vec2::new(-bound, bound),
    ];
    for h in hs {
        pts = clip(&pts, h);
        if pts.len() < 3 {
            return Err(Error::EmptyOrDegenerateIntersection);
        }
    }
    make_polygon(&pts).map_err(|_| Error::EmptyOrDegenerateIntersection)
}

/// `-K`.
pub fn reflect(k: &ConvexPolygon) -> ConvexPolygon {
    ConvexPolygon {
        vertices: k.vertices.iter().map(|&v| -v).collect(),
        facets: OnceLock::new(),
    }
}

/// `t + ρK`.
pub fn scale_translate(k: &ConvexPolygon, rho: f64, t: Vec2) -> Result<ConvexPolygon> {
    if rho == 0.0 || !rho.is_finite() || !t.is_finite() {
        return Err(Error::SingularMap);
    }
    // A negative factor is a point reflection, which keeps the orientation.
    Ok(ConvexPolygon {
        vertices: k.vertices.iter().map(|&v| v * rho + t).collect(),
        facets: OnceLock::new(),
    })
}

pub fn translate(k: &ConvexPolygon, t: Vec2) -> ConvexPolygon {
    scale_translate(k, 1.0, t).expect("unit scale is regular")
}

pub fn scale(k: &ConvexPolygon, rho: f64) -> Result<ConvexPolygon> {
    scale_translate(k, rho, Vec2::ZERO)
}

/// Row-major 2x2 matrix.
pub type Mat2 = [[f64; 2]; 2];

pub fn apply(m: &Mat2, v: Vec2) -> Vec2 {
    Vec2::new(m[0][0] * v.x + m[0][1] * v.y, m[1][0] * v.x + m[1][1] * v.y)
}

pub fn linear_map(k: &ConvexPolygon, m: &Mat2) -> Result<ConvexPolygon> {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let norm2: f64 = m.iter().flatten().map(|x| x * x).sum();
    if !det.is_finite() || det.abs() <= 1e-14 * norm2 {
        return Err(Error::SingularMap);
    }
    let pts: Vec<Vec2> = k.vertices.iter().map(|&v| apply(m, v)).collect();
    make_polygon(&pts)
}

/// Polar body `K° = {y : x·y <= 1 for all x in K}`.
pub fn polar(k: &ConvexPolygon) -> Result<ConvexPolygon> {
    if k.origin_depth() <= 1e-9 {
        return Err(Error::OriginNotInterior);
    }
    let pts: Vec<Vec2> = k.facets().iter().map(|h| h.normal / h.offset).collect();
    make_polygon(&pts)
}

/// Gauge `||x||_B = inf{ρ >= 0 : x ∈ ρB}`.
pub fn gauge(b: &ConvexPolygon, x: Vec2) -> Result<f64> {
    if b.origin_depth() <= 1e-9 {
        return Err(Error::OriginNotInterior);
    }
    Ok(gauge_unchecked(b, x))
}

pub(crate) fn gauge_unchecked(b: &ConvexPolygon, x: Vec2) -> f64 {
    b.facets()
        .iter()
        .map(|h| h.normal.dot(x) / h.offset)
        .fold(0.0, f64::max)
}

/// `conv(K ∪ C)`.
pub fn hull_union(k: &ConvexPolygon, c: &ConvexPolygon) -> ConvexPolygon {
    let pts: Vec<Vec2> = k.vertices.iter().chain(c.vertices.iter()).copied().collect();
    make_polygon(&pts).expect("hull of full-dimensional polygons")
}

/// `K ∩ (-K)`.
pub fn minimum(k: &ConvexPolygon) -> Result<ConvexPolygon> {
    intersect(k, &reflect(k))
}

/// `(K - K) / 2`.
pub fn arithmetic_mean(k: &ConvexPolygon) -> ConvexPolygon {
    let diff = minkowski_sum(k, &reflect(k));
    scale(&diff, 0.5).expect("non-zero scale")
}

/// `conv(K ∪ (-K))`.
pub fn maximum(k: &ConvexPolygon) -> ConvexPolygon {
    hull_union(k, &reflect(k))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CrossingKind {
    /// The two boundaries cross; no common supporting line.
    Transversal,
    /// A line supports both `K` and `-K` at the point.
    SharedSupport,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Crossing {
    pub point: Vec2,
    pub kind: CrossingKind,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundaryCrossings {
    /// Points of `bd(K) ∩ bd(-K)` sorted by polar angle in `[-π, π)`.
    pub points: Vec<Crossing>,
    /// `K = -K`: the whole boundary is shared and `points` is empty.
    pub coincident: bool,
}

impl BoundaryCrossings {
    pub fn transversal(&self) -> impl Iterator<Item = Vec2> + '_ {
        self.points
            .iter()
            .filter(|c| c.kind == CrossingKind::Transversal)
            .map(|c| c.point)
    }

    pub fn transversal_count(&self) -> usize {
        self.transversal().count()
    }
}

/// Normal cone of `poly` at a boundary point, as a counter-clockwise arc of
/// unit normals `[start, end]`. `None` if `z` is not on the boundary.
fn normal_cone(poly: &ConvexPolygon, z: Vec2, tol: f64) -> Option<(Vec2, Vec2)> {
    let v = poly.vertices();
    let f = poly.facets();
    let n = v.len();
    let mut hits = Vec::with_capacity(2);
    for i in 0..n {
        let a = v[i];
        let b = v[(i + 1) % n];
        if f[i].signed_distance(z).abs() > tol {
            continue;
        }
        let e = b - a;
        let t = (z - a).dot(e) / e.dot(e);
        let slack = tol / e.norm();
        if t >= -slack && t <= 1.0 + slack {
            hits.push(i);
        }
    }
    match hits.as_slice() {
        [] => None,
        [i] => Some((f[*i].normal, f[*i].normal)),
        [i, j] => {
            // Adjacent facets; the cone runs from the earlier edge's normal
            // to the later one's.
            if (*i + 1) % n == *j {
                Some((f[*i].normal, f[*j].normal))
            } else {
                Some((f[*j].normal, f[*i].normal))
            }
        }
        _ => None,
    }
}

fn in_cone(d: Vec2, cone: (Vec2, Vec2), tol: f64) -> bool {
    let (c1, c2) = cone;
    c1.cross(d) >= -tol && d.cross(c2) >= -tol && d.dot(c1 + c2) > 0.0
}

fn cones_overlap(a: (Vec2, Vec2), b: (Vec2, Vec2), tol: f64) -> bool {
    in_cone(a.0, b, tol) || in_cone(a.1, b, tol) || in_cone(b.0, a, tol) || in_cone(b.1, a, tol)
}

/// All points of `bd(K) ∩ bd(-K)`, classified as transversal crossings or
/// points with a common supporting line.
pub fn boundary_crossings(k: &ConvexPolygon) -> BoundaryCrossings {
    let mk = reflect(k);
    let scale = k.scale().max(1e-300);
    let tol = 1e-9 * scale;
    if k.same_vertices(&mk, tol) {
        return BoundaryCrossings {
            points: Vec::new(),
            coincident: true,
        };
    }

    let a = k.vertices();
    let b = mk.vertices();
    let (n, m) = (a.len(), b.len());
    let mut cands: Vec<Vec2> = Vec::new();
    for i in 0..n {
        let (p0, p1) = (a[i], a[(i + 1) % n]);
        let r = p1 - p0;
        for j in 0..m {
            let (q0, q1) = (b[j], b[(j + 1) % m]);
            let s = q1 - q0;
            let den = r.cross(s);
            if den.abs() <= 1e-12 * r.norm() * s.norm() {
                // Parallel edges: only collinear overlaps contribute, via
                // their endpoints.
                if (q0 - p0).cross(r).abs() > tol * r.norm() {
                    continue;
                }
                let rr = r.dot(r);
                let t0 = (q0 - p0).dot(r) / rr;
                let t1 = (q1 - p0).dot(r) / rr;
                let (lo, hi) = (t0.min(t1).max(0.0), t0.max(t1).min(1.0));
                if lo <= hi + 1e-12 {
                    cands.push(p0 + r * lo);
                    cands.push(p0 + r * hi);
                }
                continue;
            }
            let t = (q0 - p0).cross(s) / den;
            let u = (q0 - p0).cross(r) / den;
            let eps = 1e-12;
            if t >= -eps && t <= 1.0 + eps && u >= -eps && u <= 1.0 + eps {
                cands.push(p0 + r * t.clamp(0.0, 1.0));
            }
        }
    }

    let mut pts: Vec<Vec2> = Vec::new();
    for c in cands {
        if !pts.iter().any(|p| p.dist(c) <= tol) {
            pts.push(c);
        }
    }

    let mut out: Vec<Crossing> = pts
        .into_iter()
        .filter_map(|z| {
            let ck = normal_cone(k, z, tol)?;
            let cm = normal_cone(&mk, z, tol)?;
            let kind = if cones_overlap(ck, cm, NORMAL_TOL) {
                CrossingKind::SharedSupport
            } else {
                CrossingKind::Transversal
            };
            Some(Crossing { point: z, kind })
        })
        .collect();
    out.sort_by(|p, q| p.point.angle().total_cmp(&q.point.angle()));
    BoundaryCrossings {
        points: out,
        coincident: false,
    }
}
