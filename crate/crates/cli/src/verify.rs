//! Self-checks grouped into suites. Every check compares a measured number
//! with an expected one; `pass` means `|measured − expected| ≤ tol`. One-sided
//! checks are phrased as an excess that should be 0.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use containment::bounds::{self, PHI};
use containment::extremal;
use containment::functionals::{self, profile};
use containment::geom::{
    arithmetic_mean, boundary_crossings, gauge, linear_map, maximum, minimum, polar, translate,
    ConvexPolygon,
};
use containment::sample::{random_polygon, sweep_spec, RandomPolygonSpec, SampleMode};
use containment::Vec2;

use crate::region::{self, RegionConfig, Which};
use crate::CliResult;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Functionals,
    Bounds,
    Generators,
    Pipeline,
    Regions,
    All,
}

impl Suite {
    fn name(self) -> &'static str {
        match self {
            Suite::Functionals => "functionals",
            Suite::Bounds => "bounds",
            Suite::Generators => "generators",
            Suite::Pipeline => "pipeline",
            Suite::Regions => "regions",
            Suite::All => "all",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub measured: f64,
    pub expected: f64,
    pub tol: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub suite: &'static str,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct VerifyConfig {
    pub samples: usize,
    pub seed: u64,
}

#[derive(Default)]
struct Checks(Vec<Check>);

impl Checks {
    fn close(&mut self, name: impl Into<String>, measured: f64, expected: f64, tol: f64) {
        let pass = (measured - expected).abs() <= tol;
        self.0.push(Check {
            name: name.into(),
            pass,
            measured,
            expected,
            tol,
            error: None,
        });
    }

    /// Runs a group of checks; an error inside it becomes one failed check.
    fn group(&mut self, name: &str, f: impl FnOnce(&mut Checks) -> CliResult<()>) {
        let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| f(self)));
        let error = match outcome {
            Ok(Ok(())) => return,
            Ok(Err(e)) => e.to_string(),
            Err(_) => "panicked".to_string(),
        };
        self.0.push(Check {
            name: name.to_string(),
            pass: false,
            measured: f64::NAN,
            expected: f64::NAN,
            tol: 0.0,
            error: Some(error),
        });
    }
}

fn grid(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
}

fn heptagon_grid() -> containment::Result<Vec<(f64, f64)>> {
    let mut out = Vec::new();
    for tau in grid(2.0 / 3.0, 1.0, 10) {
        let lo = bounds::nu_star(tau)?.max(bounds::nu_plus(tau)?);
        out.extend(grid(lo, 1.0, 10).map(|nu| (tau, nu)));
    }
    Ok(out)
}

fn random_target(rng: &mut ChaCha8Rng, s_lo: f64) -> containment::Result<(f64, f64)> {
    let s = rng.random_range(s_lo..=2.0);
    let hi = bounds::c_of_s(s)?;
    Ok((s, rng.random_range(2.0 / (s + 1.0)..=hi)))
}

fn functionals_suite(cfg: &VerifyConfig, out: &mut Checks) {
    out.group("golden house", |c| {
        let gh = extremal::golden_house();
        let (_, p) = profile(&gh)?;
        c.close("golden house s", p.s, PHI, 1e-8);
        c.close("golden house tau", p.tau, 1.0, 1e-8);
        c.close("golden house alpha", p.alpha, 1.0, 1e-8);
        let rep = functionals::pseudo_complete_check(&gh, &minimum(&gh)?)?;
        c.close("golden house D/w", rep.dw_ratio(), (PHI + 1.0) / 2.0, 1e-7);
        c.close("golden house pseudo-complete residual", rep.max_residual(), 0.0, 1e-7);
        Ok(())
    });
    out.group("square", |c| {
        let sq = containment::geom::make_polygon(&[
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(1.0, 1.0),
            Vec2::new(0.0, 1.0),
        ])?;
        let (_, p) = profile(&sq)?;
        for (name, v) in [("s", p.s), ("tau", p.tau), ("alpha", p.alpha), ("gamma", p.gamma)] {
            c.close(format!("square {name}"), v, 1.0, 1e-9);
        }
        Ok(())
    });
    out.group("triangle", |c| {
        let (_, p) = profile(&extremal::regular_triangle())?;
        c.close("triangle s", p.s, 2.0, 1e-9);
        c.close("triangle tau", p.tau, 2.0 / 3.0, 1e-9);
        Ok(())
    });
    out.group("affine invariance", |c| {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut worst: f64 = 0.0;
        for i in 0..cfg.samples as u64 {
            let k = random_polygon(&sweep_spec(cfg.seed, i))?;
            let m = [
                [rng.random_range(0.5..2.0), rng.random_range(-1.0..1.0)],
                [rng.random_range(-1.0..1.0), rng.random_range(0.5..2.0)],
            ];
            let Ok(mk) = linear_map(&k, &m) else { continue };
            let mk = translate(&mk, Vec2::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)));
            let (_, a) = profile(&k)?;
            let (_, b) = profile(&mk)?;
            worst = worst.max((a.s - b.s).abs()).max((a.tau - b.tau).abs());
        }
        c.close("affine invariance of s and tau", worst, 0.0, 1e-7);
        Ok(())
    });
    out.group("duality", |c| {
        let mut worst: f64 = 0.0;
        for i in 0..cfg.samples as u64 {
            let k = functionals::centered(&random_polygon(&sweep_spec(cfg.seed ^ 1, i))?)?;
            let g = functionals::gamma(&k)?;
            let inner = polar(&arithmetic_mean(&polar(&k)?))?;
            let outer = maximum(&k);
            let mut scale: f64 = 0.0;
            for v in inner.vertices() {
                scale = scale.max(gauge(&outer, *v)?);
            }
            worst = worst.max((g - scale).abs());
        }
        c.close("gamma against containment of the polar mean", worst, 0.0, 1e-6);
        Ok(())
    });
    out.group("circumradius certificate", |c| {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 2);
        let mut worst: f64 = 0.0;
        for _ in 0..cfg.samples {
            let k = random_polygon(&RandomPolygonSpec::new(rng.random(), rng.random_range(3..=8), SampleMode::GaussianHull))?;
            let g = random_polygon(&RandomPolygonSpec::new(rng.random(), rng.random_range(3..=8), SampleMode::UnitCircleHull))?;
            let res = functionals::circumradius(&k, &g)?;
            let total: f64 = res.touching.iter().map(|t| t.weight).sum();
            let combo = res.touching.iter().fold(Vec2::ZERO, |acc, t| acc + t.normal * t.weight);
            let worst_here = if res.touching.is_empty() {
                f64::INFINITY
            } else {
                combo.norm().max((total - 1.0).abs())
            };
            worst = worst.max(worst_here);
        }
        c.close("circumradius certificate residual", worst, 0.0, 1e-8);
        Ok(())
    });
}

fn bounds_suite(out: &mut Checks) {
    out.group("roots", |c| {
        let sh = bounds::s_hat();
        let th = bounds::tau_hat();
        c.close("s_hat", sh, 1.8536, 1e-4);
        c.close("branch mismatch at s_hat", bounds::c_middle_branch(sh) - bounds::c_last_branch(sh), 0.0, 1e-10);
        c.close("tau_hat", th, 0.78, 5e-3);
        c.close("nu_star - nu_plus at tau_hat", bounds::nu_star(th)? - bounds::nu_plus(th)?, 0.0, 1e-10);
        c.close("c(s_hat) - tau_hat", bounds::c_of_s(sh)? - th, 0.0, 1e-9);
        Ok(())
    });
    out.group("continuity", |c| {
        let eps = 1e-12;
        c.close("c jump at phi", bounds::c_of_s(PHI + eps)? - bounds::c_of_s(PHI - eps)?, 0.0, 1e-10);
        let sh = bounds::s_hat();
        c.close("c jump at s_hat", bounds::c_of_s(sh + eps)? - bounds::c_of_s(sh - eps)?, 0.0, 1e-10);
        c.close("c(2)", bounds::c_of_s(2.0)?, 2.0 / 3.0, 1e-12);
        Ok(())
    });
    out.group("monotonicity", |c| {
        let ss: Vec<f64> = grid(1.0, 2.0, 10_001).collect();
        let cs = ss.iter().map(|&s| bounds::c_of_s(s)).collect::<containment::Result<Vec<_>>>()?;
        let rise = cs.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
        c.close("c non-increasing (largest rise)", rise, 0.0, 1e-12);
        let gap = ss
            .iter()
            .zip(&cs)
            .map(|(&s, &u)| 2.0 / (s + 1.0) - u)
            .fold(0.0, f64::max);
        c.close("2/(s+1) <= c(s) (largest excess)", gap, 0.0, 1e-12);
        let env = ss.iter().map(|&s| bounds::dw_envelope(s)).collect::<containment::Result<Vec<_>>>()?;
        let (peak_i, peak) = env
            .iter()
            .enumerate()
            .fold((0, 0.0), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
        c.close("D/w envelope maximum", peak, (PHI + 1.0) / 2.0, 1e-4);
        c.close("D/w envelope argmax", ss[peak_i], PHI, 1e-4);
        let unimodal = (1..ss.len())
            .map(|i| {
                let step = env[i] - env[i - 1];
                if ss[i] <= PHI {
                    -step
                } else if ss[i - 1] >= PHI {
                    step
                } else {
                    0.0
                }
            })
            .fold(0.0, f64::max);
        c.close("D/w envelope unimodal (largest wrong-way step)", unimodal, 0.0, 1e-12);
        Ok(())
    });
    out.group("inverse", |c| {
        let mut worst: f64 = 0.0;
        for s in grid(PHI + 1e-3, 2.0, 200) {
            let tau = bounds::c_of_s(s)?;
            worst = worst.max((bounds::c_of_s(bounds::s_max(tau)?)? - tau).abs());
        }
        c.close("c(s_max(c(s))) = c(s)", worst, 0.0, 1e-7);
        Ok(())
    });
}

fn generators_suite(cfg: &VerifyConfig, out: &mut Checks) {
    out.group("K_s family", |c| {
        let mut worst: f64 = 0.0;
        for s in grid(1.0, 2.0, 11) {
            let (_, p) = profile(&extremal::k_s(s)?)?;
            let lower = 2.0 / (s + 1.0);
            worst = worst.max((p.s - s).abs()).max((p.tau - lower).abs()).max((p.alpha - lower).abs());
        }
        c.close("K_s: s, tau, alpha", worst, 0.0, 1e-7);
        Ok(())
    });
    out.group("f-transform", |c| {
        let (mut s_err, mut end_err): (f64, f64) = (0.0, 0.0);
        for s in [1.2, 1.5, 1.7, 1.9, 2.0] {
            for t in grid(0.0, 1.0, 5) {
                let (_, p) = profile(&extremal::f_transform(s, t)?)?;
                s_err = s_err.max((p.s - s).abs());
                if t == 1.0 {
                    end_err = end_err.max((p.tau - (s / (s * s - 1.0)).min(1.0)).abs());
                }
            }
        }
        c.close("f-transform keeps s", s_err, 0.0, 1e-6);
        c.close("f-transform endpoint tau", end_err, 0.0, 1e-6);
        Ok(())
    });
    out.group("heptagon", |c| {
        let mut worst: f64 = 0.0;
        for (tau, nu) in heptagon_grid()? {
            let (_, p) = profile(&extremal::heptagon(tau, nu)?.0)?;
            worst = worst.max((p.tau - tau).abs()).max((p.s - bounds::s_of_tau_nu(tau, nu)?).abs());
        }
        c.close("heptagon round trip", worst, 0.0, 1e-6);
        Ok(())
    });
    out.group("extremal_for", |c| {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut worst: f64 = 0.0;
        for _ in 0..cfg.samples.min(100) {
            let (s, tau) = random_target(&mut rng, 1.0)?;
            let (_, p) = profile(&extremal::extremal_for(s, tau)?)?;
            worst = worst.max((p.s - s).abs()).max((p.tau - tau).abs());
        }
        c.close("extremal_for hits (s, tau)", worst, 0.0, 1e-5);
        Ok(())
    });
    out.group("C_lambda", |c| {
        let mut residual: f64 = 0.0;
        let mut ends: f64 = 0.0;
        let mut wrong_way: f64 = 0.0;
        for s in [1.2, PHI, 1.9] {
            let k = extremal::extremal_for(s, bounds::c_of_s(s)?)?;
            let mut prev = 0.0;
            for (i, l) in grid(0.0, 1.0, 5).enumerate() {
                let rep = functionals::pseudo_complete_check(&k, &extremal::c_lambda(&k, l)?)?;
                residual = residual.max(rep.max_residual());
                let r = rep.dw_ratio();
                if i == 0 {
                    ends = ends.max((r - 1.0).abs());
                } else {
                    wrong_way = wrong_way.max(prev - r);
                }
                if l == 1.0 {
                    ends = ends.max((r - bounds::dw_envelope(s)?).abs());
                }
                prev = r;
            }
        }
        c.close("C_lambda pseudo-complete residual", residual, 0.0, 1e-7);
        c.close("C_lambda D/w endpoints", ends, 0.0, 1e-6);
        c.close("C_lambda D/w monotone (largest drop)", wrong_way.max(0.0), 0.0, 1e-9);
        Ok(())
    });
}

fn pipeline_suite(cfg: &VerifyConfig, out: &mut Checks) {
    out.group("canonicalize", |c| {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let wanted = cfg.samples.clamp(1, 100);
        let mut bodies: Vec<ConvexPolygon> = Vec::new();
        for _ in 0..wanted.div_ceil(2) {
            let (s, tau) = random_target(&mut rng, PHI + 0.05)?;
            bodies.push(extremal::extremal_for(s, tau)?);
        }
        let mut index = 0;
        while bodies.len() < wanted {
            let (kc, p) = profile(&random_polygon(&sweep_spec(cfg.seed, index))?)?;
            index += 1;
            if p.s > PHI + 0.05 {
                bodies.push(kc);
            }
        }
        let (mut drift, mut drop, mut off): (f64, f64, f64) = (0.0, 0.0, 0.0);
        for k in &bodies {
            let (_, trace) = extremal::canonicalize(k)?;
            drift = drift.max(trace.max_s_drift());
            drop = drop.max(trace.max_tau_drop());
            if !trace.has_canonical_vertices(1e-7) {
                off += 1.0;
            }
        }
        c.close("canonicalize s drift", drift, 0.0, 1e-7);
        c.close("canonicalize tau drop", drop, 0.0, 1e-9);
        c.close("canonicalize bodies without canonical vertices", off, 0.0, 0.0);
        Ok(())
    });
    out.group("crossings", |c| {
        let mut bodies = Vec::new();
        for s in grid(1.63, 2.0, 21) {
            bodies.push(extremal::k_s(s)?);
            for t in [0.25, 0.5, 0.75, 1.0] {
                bodies.push(extremal::f_transform(s, t)?);
            }
        }
        for (tau, nu) in heptagon_grid()? {
            bodies.push(extremal::heptagon(tau, nu)?.0);
        }
        let mut bad = 0.0;
        for k in &bodies {
            let (kc, p) = profile(k)?;
            if p.s >= PHI + 0.01 && boundary_crossings(&kc).transversal_count() != 6 {
                bad += 1.0;
            }
        }
        c.close("bodies without 6 transversal crossings", bad, 0.0, 0.0);
        Ok(())
    });
}

fn regions_suite(cfg: &VerifyConfig, out: &mut Checks) {
    for (which, label) in [(Which::Tau, "tau"), (Which::Dw, "D/w")] {
        out.group(&format!("{label} region"), |c| {
            let run = region::run(&RegionConfig {
                which,
                grid: 101,
                samples: cfg.samples,
                seed: cfg.seed,
                tol: 1e-6,
            })?;
            let outside = run.rows.iter().filter(|r| !r.in_region).count();
            c.close(format!("{label} region: rows outside"), outside as f64, 0.0, 0.0);
            c.close(format!("{label} region: flagged samples"), run.violations.len() as f64, 0.0, 0.0);
            Ok(())
        });
    }
}

pub fn run(suite: Suite, cfg: &VerifyConfig) -> Report {
    let mut checks = Checks::default();
    let all = suite == Suite::All;
    if all || suite == Suite::Functionals {
        functionals_suite(cfg, &mut checks);
    }
    if all || suite == Suite::Bounds {
        bounds_suite(&mut checks);
    }
    if all || suite == Suite::Generators {
        generators_suite(cfg, &mut checks);
    }
    if all || suite == Suite::Pipeline {
        pipeline_suite(cfg, &mut checks);
    }
    if all || suite == Suite::Regions {
        regions_suite(cfg, &mut checks);
    }
    Report {
        suite: suite.name(),
        checks: checks.0,
    }
}
