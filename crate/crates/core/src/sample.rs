//! Seeded random convex polygons.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{make_polygon, ConvexPolygon, Vec2};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SampleMode {
    /// Points uniform on the unit circle.
    UnitCircleHull,
    /// Points from a standard normal distribution.
    GaussianHull,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RandomPolygonSpec {
    pub seed: u64,
    /// Number of sampled points, in `[3, 64]`; the hull may have fewer.
    pub num_vertices: usize,
    pub mode: SampleMode,
}

impl RandomPolygonSpec {
    pub fn new(seed: u64, num_vertices: usize, mode: SampleMode) -> Self {
        Self {
            seed,
            num_vertices,
            mode,
        }
    }
}

const MAX_ATTEMPTS: usize = 1000;

/// Hull of `num_vertices` random points. Draws that give a hull with fewer
/// than three vertices are discarded and redrawn from the same stream.
pub fn random_polygon(spec: &RandomPolygonSpec) -> Result<ConvexPolygon> {
    if !(3..=64).contains(&spec.num_vertices) {
        return Err(Error::OutOfDomain {
            name: "num_vertices",
            value: spec.num_vertices as f64,
            domain: "[3, 64]",
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    for _ in 0..MAX_ATTEMPTS {
        let pts: Vec<Vec2> = (0..spec.num_vertices)
            .map(|_| match spec.mode {
                SampleMode::UnitCircleHull => {
                    Vec2::from_angle(rng.random_range(0.0..std::f64::consts::TAU))
                }
                SampleMode::GaussianHull => {
                    Vec2::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
                }
            })
            .collect();
        if let Ok(k) = make_polygon(&pts) {
            if k.len() >= 3 && k.area() > 1e-9 {
                return Ok(k);
            }
        }
    }
    Err(Error::DegenerateInput("could not sample a full-dimensional hull"))
}

/// Parameters of the `index`-th polygon of a seeded sweep: the vertex count and
/// mode vary with the index so a sweep covers triangles through 16-gons.
pub fn sweep_spec(seed: u64, index: u64) -> RandomPolygonSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let num_vertices = rng.random_range(3..=16);
    let mode = if rng.random_bool(0.5) {
        SampleMode::UnitCircleHull
    } else {
        SampleMode::GaussianHull
    };
    RandomPolygonSpec::new(rng.random(), num_vertices, mode)
}
