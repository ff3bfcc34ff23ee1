//! Sampled points of the `(s, τ)` and `(s, D/w)` regions: boundary curves,
//! generator sweeps and random polygons, each checked against the bounds.

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use containment::bounds::{self, PHI};
use containment::extremal;
use containment::functionals::{self, profile};
use containment::geom::ConvexPolygon;
use containment::io;
use containment::sample::{random_polygon, sweep_spec};

use crate::{sig15, CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Which {
    Tau,
    Dw,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Source {
    LowerBound,
    UpperBound,
    RandomPolygon { seed: u64, index: u64 },
    KsFamily { s: f64 },
    FTransform { s: f64, t: f64 },
    Heptagon { tau: f64, nu: f64 },
    CLambda { s: f64, lambda: f64 },
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Source::LowerBound => write!(f, "lower-bound"),
            Source::UpperBound => write!(f, "upper-bound"),
            Source::RandomPolygon { seed, index } => {
                write!(f, "random-polygon(seed={seed};index={index})")
            }
            Source::KsFamily { s } => write!(f, "k-s(s={s})"),
            Source::FTransform { s, t } => write!(f, "f-transform(s={s};t={t})"),
            Source::Heptagon { tau, nu } => write!(f, "heptagon(tau={tau};nu={nu})"),
            Source::CLambda { s, lambda } => write!(f, "c-lambda(s={s};lambda={lambda})"),
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct RegionSample {
    pub s: f64,
    /// `τ` or `D/w`.
    pub value: f64,
    pub source: Source,
    pub in_region: bool,
}

#[derive(Clone, Copy, Debug)]
pub struct RegionConfig {
    pub which: Which,
    /// Points on the `s` axis for boundary curves and generator sweeps.
    pub grid: usize,
    /// Random polygons.
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
}

/// A sample outside the region, with the bodies that produced it.
#[derive(Debug, Serialize)]
pub struct Violation {
    pub sample: RegionSample,
    pub detail: String,
    #[serde(serialize_with = "polygon_json")]
    pub body: ConvexPolygon,
    #[serde(serialize_with = "optional_polygon_json")]
    pub gauge: Option<ConvexPolygon>,
}

fn polygon_value(k: &ConvexPolygon) -> serde_json::Value {
    serde_json::from_str(&io::to_json(k)).expect("polygon JSON")
}

fn polygon_json<S: serde::Serializer>(k: &ConvexPolygon, ser: S) -> Result<S::Ok, S::Error> {
    polygon_value(k).serialize(ser)
}

fn optional_polygon_json<S: serde::Serializer>(
    k: &Option<ConvexPolygon>,
    ser: S,
) -> Result<S::Ok, S::Error> {
    k.as_ref().map(polygon_value).serialize(ser)
}

pub struct RegionOutput {
    pub rows: Vec<RegionSample>,
    pub violations: Vec<Violation>,
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![hi],
        _ => (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

/// Evaluates one body: `Ok(None)` means the pair is not in scope (a random
/// `D/w` pair that is not pseudo-complete).
type Job = Box<dyn Fn() -> containment::Result<Option<Measured>> + Send + Sync>;

struct Measured {
    s: f64,
    value: f64,
    source: Source,
    body: ConvexPolygon,
    gauge: Option<ConvexPolygon>,
    /// Set when a generator promise (e.g. pseudo-completeness) fails.
    broken: Option<String>,
}

fn tau_job(source: Source, build: impl Fn() -> containment::Result<ConvexPolygon> + Send + Sync + 'static) -> Job {
    Box::new(move || {
        let k = build()?;
        let (kc, p) = profile(&k)?;
        Ok(Some(Measured {
            s: p.s,
            value: p.tau,
            source,
            body: kc,
            gauge: None,
            broken: None,
        }))
    })
}

fn dw_job(
    source: Source,
    require_pc: bool,
    build: impl Fn() -> containment::Result<(ConvexPolygon, ConvexPolygon)> + Send + Sync + 'static,
) -> Job {
    Box::new(move || {
        let (k, c) = build()?;
        let rep = functionals::pseudo_complete_check(&k, &c)?;
        if !rep.is_pseudo_complete && !require_pc {
            return Ok(None);
        }
        let broken = (!rep.is_pseudo_complete)
            .then(|| format!("not pseudo-complete, residuals {:?}", rep.residuals));
        Ok(Some(Measured {
            s: rep.s,
            value: rep.dw_ratio(),
            source,
            body: k,
            gauge: Some(c),
            broken,
        }))
    })
}

fn boundary_rows(cfg: &RegionConfig) -> CliResult<Vec<RegionSample>> {
    let mut rows = Vec::new();
    // The upper curves change formula at φ and ŝ; sample those knots too.
    let mut ss = linspace(1.0, 2.0, cfg.grid);
    ss.extend([PHI, bounds::s_hat()]);
    ss.sort_by(f64::total_cmp);
    ss.dedup();
    for s in ss {
        let (lower, upper) = match cfg.which {
            Which::Tau => (2.0 / (s + 1.0), bounds::c_of_s(s)?),
            Which::Dw => (1.0, bounds::dw_envelope(s)?),
        };
        rows.push(RegionSample {
            s,
            value: lower,
            source: Source::LowerBound,
            in_region: true,
        });
        rows.push(RegionSample {
            s,
            value: upper,
            source: Source::UpperBound,
            in_region: true,
        });
    }
    Ok(rows)
}

fn generator_jobs(cfg: &RegionConfig) -> Vec<Job> {
    let mut jobs: Vec<Job> = Vec::new();
    let coarse = (cfg.grid / 10).max(2);
    match cfg.which {
        Which::Tau => {
            for s in linspace(1.0, 2.0, cfg.grid) {
                jobs.push(tau_job(Source::KsFamily { s }, move || extremal::k_s(s)));
            }
            for s in linspace(1.0, 2.0, cfg.grid) {
                for t in linspace(0.0, 1.0, coarse).into_iter().skip(1) {
                    jobs.push(tau_job(Source::FTransform { s, t }, move || {
                        extremal::f_transform(s, t)
                    }));
                }
            }
            for tau in linspace(2.0 / 3.0, 1.0, coarse) {
                let lo = bounds::nu_star(tau)
                    .expect("tau in domain")
                    .max(bounds::nu_plus(tau).expect("tau in domain"));
                for nu in linspace(lo, 1.0, coarse) {
                    jobs.push(tau_job(Source::Heptagon { tau, nu }, move || {
                        Ok(extremal::heptagon(tau, nu)?.0)
                    }));
                }
            }
        }
        Which::Dw => {
            for s in linspace(1.0, 2.0, cfg.grid) {
                for lambda in linspace(0.0, 1.0, coarse) {
                    jobs.push(dw_job(Source::CLambda { s, lambda }, true, move || {
                        let k = extremal::extremal_for(s, bounds::c_of_s(s)?)?;
                        let c = extremal::c_lambda(&k, lambda)?;
                        Ok((k, c))
                    }));
                }
            }
        }
    }
    jobs
}

fn random_jobs(cfg: &RegionConfig) -> Vec<Job> {
    let seed = cfg.seed;
    (0..cfg.samples as u64)
        .map(|index| -> Job {
            let source = Source::RandomPolygon { seed, index };
            match cfg.which {
                Which::Tau => tau_job(source, move || random_polygon(&sweep_spec(seed, index))),
                Which::Dw => dw_job(source, false, move || {
                    let k = functionals::centered(&random_polygon(&sweep_spec(seed, index))?)?;
                    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
                    rng.set_stream(index);
                    let c = extremal::c_lambda(&k, rng.random_range(0.0..=1.0))?;
                    Ok((k, c))
                }),
            }
        })
        .collect()
}

fn in_region(which: Which, s: f64, value: f64, tol: f64) -> containment::Result<bool> {
    let s = s.min(2.0);
    match which {
        Which::Tau => bounds::tau_region_contains_tol(s, value, tol),
        Which::Dw => bounds::dw_region_contains_tol(s, value, tol),
    }
}

/// Runs the sweep. Rows come out in job order whatever the thread schedule.
pub fn run(cfg: &RegionConfig) -> CliResult<RegionOutput> {
    if cfg.grid == 0 {
        return Err(CliError::Usage("--grid must be at least 1".into()));
    }
    let mut rows = boundary_rows(cfg)?;
    let mut jobs = generator_jobs(cfg);
    jobs.extend(random_jobs(cfg));
    let results: Vec<containment::Result<Option<Measured>>> =
        jobs.par_iter().map(|job| job()).collect();
    let mut violations = Vec::new();
    for r in results {
        let Some(m) = r? else { continue };
        let ok = in_region(cfg.which, m.s, m.value, cfg.tol)?;
        let sample = RegionSample {
            s: m.s,
            value: m.value,
            source: m.source,
            in_region: ok,
        };
        if !ok || m.broken.is_some() {
            violations.push(Violation {
                sample,
                detail: m.broken.unwrap_or_else(|| "outside the region".into()),
                body: m.body,
                gauge: m.gauge,
            });
        }
        rows.push(sample);
    }
    Ok(RegionOutput { rows, violations })
}

pub fn write_csv<W: Write>(rows: &[RegionSample], out: W) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["s", "value", "source", "in_region"])?;
    for r in rows {
        w.write_record([
            sig15(r.s),
            sig15(r.value),
            r.source.to_string(),
            r.in_region.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<W: Write>(rows: &[RegionSample], mut out: W) -> CliResult<()> {
    serde_json::to_writer_pretty(&mut out, rows)?;
    writeln!(out)?;
    Ok(())
}

/// Writes one JSON file per violation into `dir`; returns the paths.
pub fn dump_violations(violations: &[Violation], dir: &Path) -> CliResult<Vec<PathBuf>> {
    violations
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let path = dir.join(format!("region-violation-{i}.json"));
            std::fs::write(&path, serde_json::to_string_pretty(v)? + "\n")?;
            Ok(path)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(which: Which, grid: usize, samples: usize) -> RegionConfig {
        RegionConfig {
            which,
            grid,
            samples,
            seed: 42,
            tol: 1e-6,
        }
    }

    #[test]
    fn tau_corner_and_rows() {
        let out = run(&cfg(Which::Tau, 11, 50)).unwrap();
        assert!(out.violations.is_empty());
        assert!(out.rows.iter().all(|r| r.in_region));
        assert!(out
            .rows
            .iter()
            .any(|r| r.source == Source::LowerBound && r.s == 2.0 && (r.value - 2.0 / 3.0).abs() < 1e-12));
        let random = out
            .rows
            .iter()
            .filter(|r| matches!(r.source, Source::RandomPolygon { .. }))
            .count();
        assert_eq!(random, 50);
    }

    #[test]
    fn dw_peak_on_boundary() {
        let out = run(&cfg(Which::Dw, 100, 20)).unwrap();
        assert!(out.violations.is_empty());
        let peak = out
            .rows
            .iter()
            .filter(|r| r.source == Source::UpperBound)
            .max_by(|a, b| a.value.total_cmp(&b.value))
            .unwrap();
        assert!((peak.value - 1.3090).abs() < 1e-4, "{peak:?}");
        assert!((peak.s - 1.6180).abs() < 1e-4, "{peak:?}");
    }

    #[test]
    fn csv_is_deterministic() {
        let c = cfg(Which::Tau, 5, 30);
        let mut a = Vec::new();
        let mut b = Vec::new();
        write_csv(&run(&c).unwrap().rows, &mut a).unwrap();
        write_csv(&run(&c).unwrap().rows, &mut b).unwrap();
        assert_eq!(a, b);
        let text = String::from_utf8(a).unwrap();
        assert!(text.starts_with("s,value,source,in_region\n"));
    }
}
