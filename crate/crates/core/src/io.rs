//! Polygon JSON: `{"vertices": [[x, y], ...]}`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geom::{make_polygon, ConvexPolygon, Vec2};

#[derive(Serialize, Deserialize)]
struct PolygonFile {
    vertices: Vec<[f64; 2]>,
}

pub fn to_json(k: &ConvexPolygon) -> String {
    let file = PolygonFile {
        vertices: k.vertices().iter().map(|v| [v.x, v.y]).collect(),
    };
    serde_json::to_string_pretty(&file).expect("finite coordinates")
}

/// Accepts vertices in any order; the result is the hull.
pub fn from_json(text: &str) -> Result<ConvexPolygon> {
    let file: PolygonFile = serde_json::from_str(text)?;
    let pts: Vec<Vec2> = file.vertices.iter().map(|[x, y]| Vec2::new(*x, *y)).collect();
    make_polygon(&pts)
}

pub fn read_polygon(path: impl AsRef<Path>) -> Result<ConvexPolygon> {
    from_json(&std::fs::read_to_string(path)?)
}

pub fn write_polygon(path: impl AsRef<Path>, k: &ConvexPolygon) -> Result<()> {
    std::fs::write(path, to_json(k) + "\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    #[test]
    fn round_trip() {
        let k = make_polygon(&[
            Vec2::new(0.1, -0.3),
            Vec2::new(1.0 / 3.0, 2.0),
            Vec2::new(-1.5, 0.7),
        ])
        .unwrap();
        let back = from_json(&to_json(&k)).unwrap();
        assert_eq!(back.vertices(), k.vertices());
    }

    #[test]
    fn any_order() {
        let k = from_json(r#"{"vertices": [[1,1],[0,0],[1,0],[0,1]]}"#).unwrap();
        assert_eq!(k.len(), 4);
        assert!((k.area() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn bad_input() {
        assert!(matches!(from_json("{\"vertices\": 3}"), Err(Error::Parse(_))));
        assert!(matches!(
            from_json(r#"{"vertices": [[0,0],[1,1]]}"#),
            Err(Error::DegenerateInput(_))
        ));
    }
}
