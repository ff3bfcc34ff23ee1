//! Linear programs in one to three variables.
//!
//! Seidel's randomized incremental algorithm with a fixed shuffle seed, so
//! results are reproducible bit for bit. The optimum is made unique by
//! minimizing lexicographically: first the given objective, then each
//! coordinate in turn. The feasible region is intersected with the box
//! `|x_j| <= BOX`; an optimum touching the box is re-checked with a larger box
//! to detect unboundedness.
//!
//! If the incremental answer fails the final feasibility check, the solver
//! falls back to enumerating all vertices of the arrangement.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};

const MAX_VARS: usize = 3;
const BOX: f64 = 1e6;
const SHUFFLE_SEED: u64 = 0x5eed_1e55_c0ff_ee00;
/// Feasibility tolerance for the reported solution, relative to `max(1, |b|)`
/// on unit-normalized rows.
pub const FEAS_TOL: f64 = 1e-9;
const ENUM_BUDGET: f64 = 4e8;

type Vec3 = [f64; MAX_VARS];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub rhs: f64,
}

/// `minimize objective · x` subject to `coeffs · x <= rhs` for every
/// constraint.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LinearProgram {
    pub num_vars: usize,
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Non-negative multipliers `y` with `-objective = Σ y_i coeffs_i` over a
/// subset of the tight constraints.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DualCertificate {
    pub indices: Vec<usize>,
    pub multipliers: Vec<f64>,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LpSolution {
    pub status: LpStatus,
    pub point: Option<Vec<f64>>,
    pub value: Option<f64>,
    pub tight_set: Vec<usize>,
    pub certificate: Option<DualCertificate>,
}

impl LpSolution {
    fn without_point(status: LpStatus) -> Self {
        Self {
            status,
            point: None,
            value: None,
            tight_set: Vec::new(),
            certificate: None,
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

impl LinearProgram {
    pub fn new(num_vars: usize, objective: Vec<f64>) -> Self {
        Self {
            num_vars,
            objective,
            constraints: Vec::new(),
        }
    }

    pub fn push(&mut self, coeffs: Vec<f64>, rhs: f64) {
        self.constraints.push(Constraint { coeffs, rhs });
    }

    fn validate(&self) -> Result<()> {
        if self.num_vars == 0 || self.num_vars > MAX_VARS {
            return Err(Error::Solver("number of variables must be 1, 2 or 3"));
        }
        if self.objective.len() != self.num_vars {
            return Err(Error::Solver("objective length does not match num_vars"));
        }
        if self.objective.iter().any(|c| !c.is_finite()) {
            return Err(Error::Solver("non-finite objective coefficient"));
        }
        for c in &self.constraints {
            if c.coeffs.len() != self.num_vars {
                return Err(Error::Solver("constraint length does not match num_vars"));
            }
            if !c.rhs.is_finite() || c.coeffs.iter().any(|a| !a.is_finite()) {
                return Err(Error::Solver("non-finite constraint coefficient"));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug)]
struct Row {
    a: Vec3,
    b: f64,
}

#[inline]
fn dot(d: usize, a: &Vec3, x: &Vec3) -> f64 {
    (0..d).map(|j| a[j] * x[j]).sum()
}

#[inline]
fn norm(d: usize, a: &Vec3) -> f64 {
    dot(d, a, a).sqrt()
}

#[inline]
fn violation_tol(b: f64, x: &Vec3) -> f64 {
    let xs = x.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    1e-11 * (1.0 + b.abs() + xs)
}

/// Unit-normalizes a row; `Err(())` for a null row whose constant check fails.
fn normalize(d: usize, a: Vec3, b: f64) -> std::result::Result<Option<Row>, ()> {
    let n = norm(d, &a);
    if n < 1e-12 {
        return if b >= -1e-10 * (1.0 + b.abs()) {
            Ok(None)
        } else {
            Err(())
        };
    }
    let mut u = [0.0; MAX_VARS];
    for j in 0..d {
        u[j] = a[j] / n;
    }
    Ok(Some(Row { a: u, b: b / n }))
}

/// Optimum of the objective list over the box, coordinate by coordinate.
fn box_optimum(d: usize, objs: &[Vec3], bound: f64) -> Vec3 {
    let mut x = [0.0; MAX_VARS];
    let mut fixed = [false; MAX_VARS];
    for o in objs {
        for j in 0..d {
            if !fixed[j] && o[j] != 0.0 {
                x[j] = if o[j] > 0.0 { -bound } else { bound };
                fixed[j] = true;
            }
        }
    }
    x
}

/// One-dimensional base case.
fn solve_1d(objs: &[Vec3], rows: &[Row], bound: f64) -> Option<Vec3> {
    let (mut lo, mut hi) = (-bound, bound);
    for r in rows {
        let a = r.a[0];
        if a.abs() < 1e-12 {
            if r.b < -1e-10 * (1.0 + r.b.abs()) {
                return None;
            }
        } else if a > 0.0 {
            hi = hi.min(r.b / a);
        } else {
            lo = lo.max(r.b / a);
        }
    }
    if lo > hi {
        if lo - hi > 1e-10 * (1.0 + lo.abs() + hi.abs()) {
            return None;
        }
        let m = 0.5 * (lo + hi);
        return Some([m, 0.0, 0.0]);
    }
    let dir = objs.iter().map(|o| o[0]).find(|c| *c != 0.0).unwrap_or(0.0);
    let x = if dir > 0.0 {
        lo
    } else if dir < 0.0 {
        hi
    } else {
        lo
    };
    Some([x, 0.0, 0.0])
}

fn zero_small(d: usize, o: &mut Vec3, scale: f64) {
    for v in o.iter_mut().take(d) {
        if v.abs() <= 1e-14 * scale {
            *v = 0.0;
        }
    }
}

/// Lexicographic minimum of `objs` over `rows` and the box, or `None` if
/// infeasible. Rows are processed in the given order.
fn seidel(d: usize, objs: &[Vec3], rows: &[Row], bound: f64) -> Option<Vec3> {
    if d == 1 {
        return solve_1d(objs, rows, bound);
    }
    let mut x = box_optimum(d, objs, bound);
    for i in 0..rows.len() {
        let h = rows[i];
        if dot(d, &h.a, &x) <= h.b + violation_tol(h.b, &x) {
            continue;
        }
        // The new optimum lies on h: eliminate the variable with the largest
        // coefficient and recurse on the hyperplane.
        let k = (0..d)
            .max_by(|&p, &q| h.a[p].abs().total_cmp(&h.a[q].abs()))
            .expect("d >= 1");
        let ak = h.a[k];
        let keep: Vec<usize> = (0..d).filter(|&j| j != k).collect();
        let project = |a: &Vec3, b: f64| -> (Vec3, f64) {
            let f = a[k] / ak;
            let mut out = [0.0; MAX_VARS];
            for (jj, &j) in keep.iter().enumerate() {
                out[jj] = a[j] - f * h.a[j];
            }
            (out, b - f * h.b)
        };

        let mut sub_rows: Vec<Row> = Vec::with_capacity(i + 2);
        // Box rows of the eliminated coordinate go first.
        for sign in [1.0, -1.0] {
            let mut a = [0.0; MAX_VARS];
            a[k] = sign;
            let (pa, pb) = project(&a, bound);
            match normalize(d - 1, pa, pb) {
                Ok(Some(r)) => sub_rows.push(r),
                Ok(None) => {}
                Err(()) => return None,
            }
        }
        for r in &rows[..i] {
            let (pa, pb) = project(&r.a, r.b);
            match normalize(d - 1, pa, pb) {
                Ok(Some(r)) => sub_rows.push(r),
                Ok(None) => {}
                Err(()) => return None,
            }
        }
        let sub_objs: Vec<Vec3> = objs
            .iter()
            .map(|o| {
                let scale = norm(d, o);
                let (mut po, _) = project(o, 0.0);
                zero_small(d - 1, &mut po, scale);
                po
            })
            .collect();
        let y = seidel(d - 1, &sub_objs, &sub_rows, bound)?;
        let mut nx = [0.0; MAX_VARS];
        let mut acc = h.b;
        for (jj, &j) in keep.iter().enumerate() {
            nx[j] = y[jj];
            acc -= h.a[j] * y[jj];
        }
        nx[k] = acc / ak;
        x = nx;
    }
    Some(x)
}

/// Lexicographic optimum over every vertex of the arrangement (rows plus box).
fn enumerate(d: usize, objs: &[Vec3], rows: &[Row], bound: f64) -> Option<Vec3> {
    let mut all = rows.to_vec();
    for j in 0..d {
        for sign in [1.0, -1.0] {
            let mut a = [0.0; MAX_VARS];
            a[j] = sign;
            all.push(Row { a, b: bound });
        }
    }
    let n = all.len();
    let feasible = |x: &Vec3| {
        all.iter()
            .all(|r| dot(d, &r.a, x) <= r.b + FEAS_TOL * (1.0 + r.b.abs()))
    };
    let key = |x: &Vec3| -> Vec<f64> { objs.iter().map(|o| dot(d, o, x)).collect() };
    let better = |k1: &[f64], k2: &[f64]| {
        for (a, b) in k1.iter().zip(k2) {
            let t = 1e-12 * (1.0 + a.abs() + b.abs());
            if a < &(b - t) {
                return true;
            }
            if a > &(b + t) {
                return false;
            }
        }
        false
    };
    let mut best: Option<(Vec3, Vec<f64>)> = None;
    let mut consider = |x: Vec3| {
        if x.iter().all(|v| v.is_finite()) && feasible(&x) {
            let k = key(&x);
            if best.as_ref().is_none_or(|(_, bk)| better(&k, bk)) {
                best = Some((x, k));
            }
        }
    };
    match d {
        1 => {
            for r in &all {
                if r.a[0].abs() > 1e-12 {
                    consider([r.b / r.a[0], 0.0, 0.0]);
                }
            }
        }
        2 => {
            for i in 0..n {
                for j in i + 1..n {
                    let (p, q) = (&all[i], &all[j]);
                    let det = p.a[0] * q.a[1] - p.a[1] * q.a[0];
                    if det.abs() < 1e-12 {
                        continue;
                    }
                    let x = (p.b * q.a[1] - p.a[1] * q.b) / det;
                    let y = (p.a[0] * q.b - p.b * q.a[0]) / det;
                    consider([x, y, 0.0]);
                }
            }
        }
        _ => {
            for i in 0..n {
                for j in i + 1..n {
                    for k in j + 1..n {
                        if let Some(x) = solve3(&[all[i], all[j], all[k]]) {
                            consider(x);
                        }
                    }
                }
            }
        }
    }
    best.map(|(x, _)| x)
}

fn det3(m: &[Vec3; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

fn solve3(rows: &[Row; 3]) -> Option<Vec3> {
    let m = [rows[0].a, rows[1].a, rows[2].a];
    let det = det3(&m);
    if det.abs() < 1e-12 {
        return None;
    }
    let mut x = [0.0; 3];
    for c in 0..3 {
        let mut mc = m;
        for r in 0..3 {
            mc[r][c] = rows[r].b;
        }
        x[c] = det3(&mc) / det;
    }
    Some(x)
}

/// Minimizes `objective · x` under the constraints. Malformed programs are
/// reported as `Error::Solver`; infeasibility and unboundedness are statuses.
pub fn solve(lp: &LinearProgram) -> Result<LpSolution> {
    lp.validate()?;
    let d = lp.num_vars;

    let mut rows = Vec::with_capacity(lp.constraints.len());
    for c in &lp.constraints {
        let mut a = [0.0; MAX_VARS];
        a[..d].copy_from_slice(&c.coeffs);
        match normalize(d, a, c.rhs) {
            Ok(Some(r)) => rows.push(r),
            Ok(None) => {}
            Err(()) => return Ok(LpSolution::without_point(LpStatus::Infeasible)),
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SHUFFLE_SEED);
    rows.shuffle(&mut rng);

    let mut c = [0.0; MAX_VARS];
    c[..d].copy_from_slice(&lp.objective);
    let mut objs = vec![c];
    for j in 0..d {
        let mut e = [0.0; MAX_VARS];
        e[j] = 1.0;
        objs.push(e);
    }

    let run = |bound: f64| -> Result<Option<Vec3>> {
        let x = seidel(d, &objs, &rows, bound);
        let ok = |x: &Vec3| {
            rows.iter()
                .all(|r| dot(d, &r.a, x) <= r.b + FEAS_TOL * (1.0 + r.b.abs()))
                && x[..d].iter().all(|v| v.abs() <= bound * (1.0 + 1e-12))
        };
        match x {
            Some(x) if ok(&x) => Ok(Some(x)),
            _ => {
                let n = rows.len() + 2 * d;
                let combos = (0..d).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64);
                if combos * n as f64 > ENUM_BUDGET {
                    return Err(Error::Solver("ill-conditioned program too large to enumerate"));
                }
                Ok(enumerate(d, &objs, &rows, bound))
            }
        }
    };

    let Some(x) = run(BOX)? else {
        return Ok(LpSolution::without_point(LpStatus::Infeasible));
    };
    let value = dot(d, &c, &x);
    if x[..d].iter().any(|v| v.abs() >= 0.5 * BOX) {
        if let Some(x4) = run(4.0 * BOX)? {
            let v4 = dot(d, &c, &x4);
            if (v4 - value).abs() > 1e-9 * (1.0 + value.abs()) {
                return Ok(LpSolution::without_point(LpStatus::Unbounded));
            }
        }
    }

    let point = x[..d].to_vec();
    let tight_set: Vec<usize> = lp
        .constraints
        .iter()
        .enumerate()
        .filter(|(_, k)| {
            let n = k.coeffs.iter().map(|a| a * a).sum::<f64>().sqrt();
            let lhs: f64 = k.coeffs.iter().zip(&point).map(|(a, x)| a * x).sum();
            (lhs - k.rhs).abs() <= FEAS_TOL * n.max(1.0)
        })
        .map(|(i, _)| i)
        .collect();
    let certificate = dual_certificate(lp, &tight_set);
    Ok(LpSolution {
        status: LpStatus::Optimal,
        point: Some(point),
        value: Some(value),
        tight_set,
        certificate,
    })
}

/// Searches subsets of the tight set, smallest first, for non-negative
/// multipliers reproducing `-objective`.
pub fn dual_certificate(lp: &LinearProgram, tight: &[usize]) -> Option<DualCertificate> {
    let d = lp.num_vars;
    let target: Vec<f64> = lp.objective.iter().map(|c| -c).collect();
    if target.iter().all(|v| *v == 0.0) {
        return Some(DualCertificate {
            indices: Vec::new(),
            multipliers: Vec::new(),
            residual: 0.0,
        });
    }
    let tnorm = target.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut subset = Vec::with_capacity(d);
    for size in 1..=d.min(tight.len()) {
        if let Some(c) = search_subsets(lp, tight, &target, tnorm, size, 0, &mut subset) {
            return Some(c);
        }
    }
    None
}

fn search_subsets(
    lp: &LinearProgram,
    tight: &[usize],
    target: &[f64],
    tnorm: f64,
    size: usize,
    start: usize,
    subset: &mut Vec<usize>,
) -> Option<DualCertificate> {
    if subset.len() == size {
        return try_certificate(lp, subset, target, tnorm);
    }
    for p in start..tight.len() {
        subset.push(tight[p]);
        let found = search_subsets(lp, tight, target, tnorm, size, p + 1, subset);
        subset.pop();
        if found.is_some() {
            return found;
        }
    }
    None
}

/// Least-squares multipliers on `idx` via the normal equations.
fn try_certificate(
    lp: &LinearProgram,
    idx: &[usize],
    target: &[f64],
    tnorm: f64,
) -> Option<DualCertificate> {
    let d = lp.num_vars;
    let k = idx.len();
    let col = |i: usize| &lp.constraints[idx[i]].coeffs;
    let mut g = [[0.0; MAX_VARS]; MAX_VARS];
    let mut rhs = [0.0; MAX_VARS];
    for i in 0..k {
        for j in 0..k {
            g[i][j] = (0..d).map(|r| col(i)[r] * col(j)[r]).sum();
        }
        rhs[i] = (0..d).map(|r| col(i)[r] * target[r]).sum();
    }
    let y = solve_small(k, g, rhs)?;
    if y[..k].iter().any(|v| *v < -1e-12) {
        return None;
    }
    let mut res = 0.0;
    for r in 0..d {
        let s: f64 = (0..k).map(|i| y[i] * col(i)[r]).sum();
        res += (s - target[r]).powi(2);
    }
    let residual = res.sqrt() / tnorm.max(1.0);
    if residual > 1e-8 {
        return None;
    }
    Some(DualCertificate {
        indices: idx.to_vec(),
        multipliers: y[..k].iter().map(|v| v.max(0.0)).collect(),
        residual,
    })
}

/// Gaussian elimination with partial pivoting on a `k x k` system.
fn solve_small(k: usize, mut m: [[f64; MAX_VARS]; MAX_VARS], mut b: Vec3) -> Option<Vec3> {
    let scale = (0..k)
        .flat_map(|i| (0..k).map(move |j| (i, j)))
        .fold(0.0_f64, |s, (i, j)| s.max(m[i][j].abs()));
    for c in 0..k {
        let p = (c..k).max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs()))?;
        if m[p][c].abs() <= 1e-12 * scale.max(1e-300) {
            return None;
        }
        m.swap(c, p);
        b.swap(c, p);
        for r in c + 1..k {
            let f = m[r][c] / m[c][c];
            for cc in c..k {
                m[r][cc] -= f * m[c][cc];
            }
            b[r] -= f * b[c];
        }
    }
    let mut x = [0.0; MAX_VARS];
    for c in (0..k).rev() {
        let s: f64 = (c + 1..k).map(|j| m[c][j] * x[j]).sum();
        x[c] = (b[c] - s) / m[c][c];
    }
    Some(x)
}
