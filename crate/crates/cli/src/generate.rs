use std::path::{Path, PathBuf};

use serde::Serialize;

use containment::extremal::FamilyParams;
use containment::functionals::{self, profile};
use containment::geom::{minimum, ConvexPolygon};
use containment::io;

use crate::CliResult;

/// Measured invariants written next to a generated polygon.
#[derive(Debug, Serialize)]
pub struct Invariants {
    pub params: FamilyParams,
    pub s: f64,
    pub tau: f64,
    pub alpha: f64,
    pub gamma: f64,
    /// `D/w` against the generated gauge, or against `K ∩ (−K)` when the
    /// family has none.
    pub dw: f64,
    pub pseudo_complete: bool,
    pub max_residual: f64,
}

#[derive(Debug)]
pub struct Generated {
    /// Centered body.
    pub body: ConvexPolygon,
    pub gauge: Option<ConvexPolygon>,
    pub invariants: Invariants,
}

pub fn generate(params: FamilyParams) -> CliResult<Generated> {
    let (k, gauge) = params.build()?;
    let (kc, prof) = profile(&k)?;
    let c = match &gauge {
        Some(c) => c.clone(),
        None => minimum(&kc)?,
    };
    let pc = functionals::pseudo_complete_check(&kc, &c)?;
    Ok(Generated {
        body: kc,
        gauge,
        invariants: Invariants {
            params,
            s: prof.s,
            tau: prof.tau,
            alpha: prof.alpha,
            gamma: prof.gamma,
            dw: pc.dw_ratio(),
            pseudo_complete: pc.is_pseudo_complete,
            max_residual: pc.max_residual(),
        },
    })
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "polygon".into());
    path.with_file_name(format!("{stem}.{suffix}.json"))
}

/// Writes `path`, `<stem>.meta.json` and, for gauge families,
/// `<stem>.gauge.json`. Returns the paths written.
pub fn write_outputs(g: &Generated, path: &Path) -> CliResult<Vec<PathBuf>> {
    let mut written = vec![path.to_path_buf()];
    io::write_polygon(path, &g.body)?;
    if let Some(c) = &g.gauge {
        let gp = sibling(path, "gauge");
        io::write_polygon(&gp, c)?;
        written.push(gp);
    }
    let meta = sibling(path, "meta");
    std::fs::write(&meta, serde_json::to_string_pretty(&g.invariants)? + "\n")?;
    written.push(meta);
    Ok(written)
}

/// Everything in one JSON document, for standard output.
pub fn to_json(g: &Generated) -> CliResult<String> {
    #[derive(Serialize)]
    struct Doc<'a> {
        body: serde_json::Value,
        gauge: Option<serde_json::Value>,
        invariants: &'a Invariants,
    }
    let poly = |k: &ConvexPolygon| serde_json::from_str::<serde_json::Value>(&io::to_json(k));
    let doc = Doc {
        body: poly(&g.body)?,
        gauge: g.gauge.as_ref().map(poly).transpose()?,
        invariants: &g.invariants,
    };
    Ok(serde_json::to_string_pretty(&doc)?)
}
