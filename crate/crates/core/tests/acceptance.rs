//! Acceptance criteria, one line per criterion. Exits non-zero if any fails.

use std::process::ExitCode;
use std::time::Instant;

use containment::bounds::{self, PHI};
use containment::extremal::{self, Witness};
use containment::functionals::{self, profile};
use containment::geom::{
    arithmetic_mean, boundary_crossings, gauge, maximum, minimum, polar, translate,
    ConvexPolygon,
};
use containment::sample::{random_polygon, sweep_spec, RandomPolygonSpec, SampleMode};
use containment::Vec2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn golden_house_exactness() -> Outcome {
    let gh = extremal::golden_house();
    let (_, p) = profile(&gh).map_err(err)?;
    ensure((p.s - 1.618_033_988_7).abs() <= 1e-8, || format!("s = {}", p.s))?;
    ensure((p.tau - 1.0).abs() <= 1e-8, || format!("tau = {}", p.tau))?;
    ensure((p.alpha - 1.0).abs() <= 1e-8, || format!("alpha = {}", p.alpha))?;
    Ok(format!("s = {:.12}, tau = {:.12}, alpha = {:.12}", p.s, p.tau, p.alpha))
}

fn dw_peak() -> Outcome {
    let gh = extremal::golden_house();
    let c = minimum(&gh).map_err(err)?;
    let rep = functionals::pseudo_complete_check(&gh, &c).map_err(err)?;
    let want = (PHI + 1.0) / 2.0;
    ensure((rep.dw_ratio() - 1.309_016_994_4).abs() <= 1e-7, || {
        format!("D/w = {}", rep.dw_ratio())
    })?;
    ensure((want - 1.309_016_994_4).abs() <= 1e-10, || "constant".into())?;
    ensure(rep.is_pseudo_complete, || format!("not pseudo-complete: {rep:?}"))?;
    Ok(format!("D/w = {:.10}, max residual {:.1e}", rep.dw_ratio(), rep.max_residual()))
}

fn k_s_family() -> Outcome {
    let mut worst: f64 = 0.0;
    for i in 0..=10 {
        let s = 1.0 + i as f64 / 10.0;
        let k = extremal::k_s(s).map_err(err)?;
        let (_, p) = profile(&k).map_err(err)?;
        let lower = 2.0 / (s + 1.0);
        for (name, got, want) in [("s", p.s, s), ("tau", p.tau, lower), ("alpha", p.alpha, lower)] {
            let d = (got - want).abs();
            worst = worst.max(d);
            ensure(d <= 1e-7, || format!("s = {s}: {name} = {got}, want {want}"))?;
        }
    }
    Ok(format!("11 bodies, max error {worst:.1e}"))
}

fn f_transform_endpoint() -> Outcome {
    let mut worst: f64 = 0.0;
    for s in [1.2, 1.5, 1.7, 1.9, 2.0] {
        for t in [0.0, 0.25, 0.5, 0.75, 1.0] {
            let k = extremal::f_transform(s, t).map_err(err)?;
            let (_, p) = profile(&k).map_err(err)?;
            ensure((p.s - s).abs() <= 1e-6, || format!("s = {s}, t = {t}: measured s = {}", p.s))?;
            if t == 1.0 {
                let want = (s / (s * s - 1.0)).min(1.0);
                let d = (p.tau - want).abs();
                worst = worst.max(d);
                ensure(d <= 1e-6, || format!("s = {s}: tau = {}, want {want}", p.tau))?;
            }
        }
    }
    Ok(format!("endpoint max error {worst:.1e}"))
}

fn heptagon_round_trip() -> Outcome {
    let mut worst: f64 = 0.0;
    for i in 0..10 {
        let tau = 2.0 / 3.0 + (1.0 / 3.0) * i as f64 / 9.0;
        let lo = bounds::nu_star(tau)
            .map_err(err)?
            .max(bounds::nu_plus(tau).map_err(err)?);
        for j in 0..10 {
            let nu = lo + (1.0 - lo) * j as f64 / 9.0;
            let (k, _) = extremal::heptagon(tau, nu).map_err(err)?;
            let (_, p) = profile(&k).map_err(err)?;
            let s = bounds::s_of_tau_nu(tau, nu).map_err(err)?;
            let d = (p.tau - tau).abs().max((p.s - s).abs());
            worst = worst.max(d);
            ensure(d <= 1e-6, || {
                format!("(tau, nu) = ({tau}, {nu}): measured ({}, {}), want s = {s}", p.tau, p.s)
            })?;
        }
    }
    Ok(format!("100 bodies, max error {worst:.1e}"))
}

fn roots() -> Outcome {
    let sh = bounds::s_hat();
    let th = bounds::tau_hat();
    ensure((1.8535..=1.8537).contains(&sh), || format!("s_hat = {sh}"))?;
    let mismatch = (bounds::c_middle_branch(sh) - bounds::c_last_branch(sh)).abs();
    ensure(mismatch <= 1e-10, || format!("branch mismatch {mismatch:e}"))?;
    ensure((0.775..=0.785).contains(&th), || format!("tau_hat = {th}"))?;
    let nu_gap = (bounds::nu_star(th).map_err(err)? - bounds::nu_plus(th).map_err(err)?).abs();
    ensure(nu_gap <= 1e-10, || format!("nu gap {nu_gap:e}"))?;
    Ok(format!(
        "s_hat = {sh:.12}, tau_hat = {th:.12}, mismatch {mismatch:.1e}, nu gap {nu_gap:.1e}"
    ))
}

fn region_soundness() -> Outcome {
    let mut violations = 0;
    let mut first = None;
    for i in 0..10_000u64 {
        let spec = sweep_spec(2024, i);
        let k = random_polygon(&spec).map_err(err)?;
        let (_, p) = profile(&k).map_err(err)?;
        let s = p.s.min(2.0);
        let upper = bounds::c_of_s(s).map_err(err)?;
        if p.tau < 2.0 / (s + 1.0) - 1e-6 || p.tau > upper + 1e-6 {
            violations += 1;
            first.get_or_insert((i, p.s, p.tau));
        }
    }
    ensure(violations == 0, || format!("{violations} violations, first {first:?}"))?;
    Ok("10000 polygons, 0 violations".into())
}

fn random_tau_target(rng: &mut ChaCha8Rng, s_lo: f64) -> (f64, f64) {
    let s = rng.random_range(s_lo..=2.0);
    let lo = 2.0 / (s + 1.0);
    let hi = bounds::c_of_s(s).unwrap();
    (s, rng.random_range(lo..=hi))
}

fn region_completeness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst: f64 = 0.0;
    let mut heptagons = 0;
    for _ in 0..50 {
        let (s, tau) = random_tau_target(&mut rng, 1.0);
        let e = extremal::extremal_for_detail(s, tau).map_err(|e| format!("({s}, {tau}): {e}"))?;
        if matches!(e.witness, Witness::Heptagon(_)) {
            heptagons += 1;
        }
        // Measure the returned body from scratch.
        let (_, p) = profile(&e.body).map_err(err)?;
        let d = (p.s - s).abs().max((p.tau - tau).abs());
        worst = worst.max(d);
        ensure(d <= 1e-5, || format!("({s}, {tau}): measured ({}, {})", p.s, p.tau))?;
    }
    Ok(format!("50 targets ({heptagons} heptagon), max error {worst:.1e}"))
}

fn pseudo_complete_sweep() -> Outcome {
    let lambdas = [0.0, 0.25, 0.5, 0.75, 1.0];
    let mut worst: f64 = 0.0;
    for s in [1.2, 1.618, 1.9] {
        let k = extremal::extremal_for(s, bounds::c_of_s(s).map_err(err)?).map_err(err)?;
        let mut ratios = Vec::new();
        for &l in &lambdas {
            let c = extremal::c_lambda(&k, l).map_err(err)?;
            let rep = functionals::pseudo_complete_check(&k, &c).map_err(err)?;
            worst = worst.max(rep.max_residual());
            ensure(rep.max_residual() <= 1e-7, || {
                format!("s = {s}, lambda = {l}: residuals {:?}", rep.residuals)
            })?;
            ensure(rep.dw_ratio() <= (PHI + 1.0) / 2.0 + 1e-6, || {
                format!("s = {s}, lambda = {l}: D/w = {}", rep.dw_ratio())
            })?;
            ratios.push(rep.dw_ratio());
        }
        let top = bounds::dw_envelope(s).map_err(err)?;
        ensure((ratios[0] - 1.0).abs() <= 1e-7, || format!("s = {s}: D/w(0) = {}", ratios[0]))?;
        ensure((ratios[4] - top).abs() <= 1e-6, || {
            format!("s = {s}: D/w(1) = {}, want {top}", ratios[4])
        })?;
        ensure(ratios.windows(2).all(|w| w[1] >= w[0] - 1e-9), || {
            format!("s = {s}: not monotone {ratios:?}")
        })?;
    }
    Ok(format!("15 pairs, max residual {worst:.1e}"))
}

fn duality() -> Outcome {
    let mut worst: f64 = 0.0;
    for i in 0..100u64 {
        let spec = sweep_spec(10, i);
        let k = functionals::centered(&random_polygon(&spec).map_err(err)?).map_err(err)?;
        let g = functionals::gamma(&k).map_err(err)?;
        let p = polar(&k).map_err(err)?;
        // Optimal scale of ((K°−K°)/2)° inside conv(K ∪ −K), with the scale
        // found from gauges of the vertices.
        let inner = polar(&arithmetic_mean(&p)).map_err(err)?;
        let outer = maximum(&k);
        let scale = inner
            .vertices()
            .iter()
            .map(|v| gauge(&outer, *v).unwrap())
            .fold(0.0, f64::max);
        let d = (g - scale).abs();
        worst = worst.max(d);
        ensure(d <= 1e-6, || format!("polygon {i}: gamma = {g}, containment = {scale}"))?;
    }
    Ok(format!("100 polygons, max error {worst:.1e}"))
}

/// `R(K, C)` without linear programming: `K ⊂ t + ρC` for some `t` exactly
/// when the translates `v − ρC` over the vertices `v` of `K` share a point.
/// Bisection on `ρ` with that test.
fn circumradius_oracle(k: &ConvexPolygon, c: &ConvexPolygon) -> f64 {
    let flipped = containment::geom::reflect(c);
    let feasible = |rho: f64| {
        let body = containment::geom::scale(&flipped, rho).unwrap();
        let mut common = translate(&body, k.vertices()[0]).vertices().to_vec();
        for v in &k.vertices()[1..] {
            for h in translate(&body, *v).facets() {
                common = containment::geom::clip(&common, h);
                if common.is_empty() {
                    return false;
                }
            }
        }
        true
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    while !feasible(hi) {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if feasible(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

fn lp_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst: f64 = 0.0;
    let mut worst_cert: f64 = 0.0;
    for i in 0..500 {
        let spec_k = RandomPolygonSpec::new(rng.random(), rng.random_range(3..=7), SampleMode::GaussianHull);
        let spec_c = RandomPolygonSpec::new(rng.random(), rng.random_range(3..=7), SampleMode::UnitCircleHull);
        let k = random_polygon(&spec_k).map_err(err)?;
        let c = random_polygon(&spec_c).map_err(err)?;
        let res = functionals::circumradius(&k, &c).map_err(err)?;
        let brute = circumradius_oracle(&k, &c);
        let d = (res.rho - brute).abs();
        worst = worst.max(d);
        ensure(d <= 1e-3, || format!("instance {i}: LP {} vs oracle {brute}", res.rho))?;
        let total: f64 = res.touching.iter().map(|t| t.weight).sum();
        let combo = res
            .touching
            .iter()
            .fold(Vec2::ZERO, |acc, t| acc + t.normal * t.weight);
        ensure(
            !res.touching.is_empty() && res.touching.iter().all(|t| t.weight >= 0.0),
            || format!("instance {i}: no certificate"),
        )?;
        let cert = combo.norm().max((total - 1.0).abs());
        worst_cert = worst_cert.max(cert);
        ensure(cert <= 1e-8, || format!("instance {i}: certificate residual {cert:e}"))?;
    }
    Ok(format!("500 instances, max error {worst:.1e}, certificate {worst_cert:.1e}"))
}

fn canonicalization() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut bodies = Vec::new();
    while bodies.len() < 25 {
        let (s, tau) = random_tau_target(&mut rng, PHI + 0.05);
        bodies.push(extremal::extremal_for(s, tau).map_err(err)?);
    }
    let mut index = 0;
    while bodies.len() < 50 {
        let k = random_polygon(&sweep_spec(12, index)).map_err(err)?;
        index += 1;
        let (kc, p) = profile(&k).map_err(err)?;
        if p.s > PHI + 0.05 {
            bodies.push(kc);
        }
    }
    let mut drift: f64 = 0.0;
    let mut drop: f64 = 0.0;
    for (i, k) in bodies.iter().enumerate() {
        let (_, trace) = extremal::canonicalize(k).map_err(|e| format!("body {i}: {e}"))?;
        drift = drift.max(trace.max_s_drift());
        drop = drop.max(trace.max_tau_drop());
        ensure(trace.max_s_drift() <= 1e-7, || format!("body {i}: s drift {}", trace.max_s_drift()))?;
        ensure(trace.max_tau_drop() <= 1e-9, || format!("body {i}: tau drop {}", trace.max_tau_drop()))?;
        ensure(trace.has_canonical_vertices(1e-7), || format!("body {i}: final vertices not canonical"))?;
    }
    Ok(format!("50 bodies, s drift {drift:.1e}, tau drop {drop:.1e}"))
}

fn crossing_structure() -> Outcome {
    let mut bodies: Vec<(String, ConvexPolygon)> = Vec::new();
    for i in 0..=20 {
        let s = 1.63 + 0.37 * i as f64 / 20.0;
        bodies.push((format!("k_s({s})"), extremal::k_s(s).map_err(err)?));
        for t in [0.25, 0.5, 0.75, 1.0] {
            bodies.push((format!("f({s}, {t})"), extremal::f_transform(s, t).map_err(err)?));
        }
    }
    for i in 0..10 {
        let tau = 2.0 / 3.0 + (1.0 / 3.0) * i as f64 / 9.0;
        let lo = bounds::nu_star(tau).map_err(err)?.max(bounds::nu_plus(tau).map_err(err)?);
        for j in 0..10 {
            let nu = lo + (1.0 - lo) * j as f64 / 9.0;
            bodies.push((format!("heptagon({tau}, {nu})"), extremal::heptagon(tau, nu).map_err(err)?.0));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..30 {
        let (s, tau) = random_tau_target(&mut rng, PHI + 0.01);
        bodies.push((format!("extremal_for({s}, {tau})"), extremal::extremal_for(s, tau).map_err(err)?));
    }
    let mut checked = 0;
    for (name, k) in &bodies {
        let (kc, p) = profile(k).map_err(err)?;
        if p.s < PHI + 0.01 {
            continue;
        }
        checked += 1;
        let n = boundary_crossings(&kc).transversal_count();
        ensure(n == 6, || format!("{name}: {n} transversal crossings"))?;
    }
    Ok(format!("{checked} bodies with 6 crossings"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 13] = [
        ("golden house exactness", golden_house_exactness),
        ("D/w peak", dw_peak),
        ("K_s family", k_s_family),
        ("f-transform endpoint", f_transform_endpoint),
        ("heptagon round-trip", heptagon_round_trip),
        ("roots", roots),
        ("region soundness", region_soundness),
        ("region completeness", region_completeness),
        ("pseudo-complete sweep", pseudo_complete_sweep),
        ("duality", duality),
        ("LP oracle", lp_oracle),
        ("canonicalization", canonicalization),
        ("crossing structure", crossing_structure),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} {name}: PASS ({detail}; {secs:.2}s)", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} {name}: FAIL ({detail}; {secs:.2}s)", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
