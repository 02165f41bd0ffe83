//! JSON domain files.
//!
//! ```json
//! {"dim": 2, "kind": "ball", "center": [0, 0, 0, 0], "radius": 1.0, "witness": [0, 0, 0, 0]}
//! ```
//! Kinds: `halfspaces` (normals, offsets), `ball` (center, radius), `ellipsoid` (exponents),
//! `polydisk` (radii), `tube` (base), `intersection` (parts), `affine_image` (matrix as rows of
//! [re, im] pairs, translation, domain). Real domains (tube bases, Hilbert geometry) carry
//! `"real": true` and count `dim` in real coordinates.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{AffineMap, DomainSpec, Field, Point, Shape};

#[derive(Serialize, Deserialize)]
struct DomainFile {
    dim: usize,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    real: bool,
    #[serde(flatten)]
    body: Body,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    witness: Option<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum Body {
    Halfspaces { normals: Vec<Vec<f64>>, offsets: Vec<f64> },
    Ball { center: Vec<f64>, radius: f64 },
    Ellipsoid { exponents: Vec<f64> },
    Polydisk { radii: Vec<f64> },
    Tube { base: Box<DomainFile> },
    Intersection { parts: Vec<DomainFile> },
    AffineImage { matrix: Vec<Vec<[f64; 2]>>, translation: Vec<[f64; 2]>, domain: Box<DomainFile> },
}

fn to_file(d: &DomainSpec<f64>) -> DomainFile {
    let body = match d.shape() {
        Shape::HalfSpaces { normals, offsets } => Body::Halfspaces {
            normals: normals.iter().map(|n| n.coords.clone()).collect(),
            offsets: offsets.clone(),
        },
        Shape::Ball { center, radius } => Body::Ball { center: center.coords.clone(), radius: *radius },
        Shape::ComplexEllipsoid { exponents } => Body::Ellipsoid { exponents: exponents.clone() },
        Shape::Polydisk { radii } => Body::Polydisk { radii: radii.clone() },
        Shape::Tube { base } => Body::Tube { base: Box::new(to_file(base)) },
        Shape::Intersection { parts } => Body::Intersection { parts: parts.iter().map(to_file).collect() },
        Shape::AffineImage { map, domain } => Body::AffineImage {
            matrix: map.matrix.chunks(map.dim).map(|row| row.iter().map(|z| [z.re, z.im]).collect()).collect(),
            translation: map.translation.iter().map(|z| [z.re, z.im]).collect(),
            domain: Box::new(to_file(domain)),
        },
    };
    DomainFile { dim: d.dim(), real: d.field() == Field::Real, body, witness: Some(d.witness().coords.clone()) }
}

fn from_file(f: DomainFile) -> Result<DomainSpec<f64>> {
    let field = if f.real { Field::Real } else { Field::Complex };
    let dim = f.dim;
    let shape = match f.body {
        Body::Halfspaces { normals, offsets } => {
            Shape::HalfSpaces { normals: normals.into_iter().map(Point::new).collect(), offsets }
        }
        Body::Ball { center, radius } => Shape::Ball { center: Point::new(center), radius },
        Body::Ellipsoid { exponents } => Shape::ComplexEllipsoid { exponents },
        Body::Polydisk { radii } => Shape::Polydisk { radii },
        Body::Tube { base } => Shape::Tube { base: Box::new(from_file(*base)?) },
        Body::Intersection { parts } => {
            Shape::Intersection { parts: parts.into_iter().map(from_file).collect::<Result<_>>()? }
        }
        Body::AffineImage { matrix, translation, domain } => {
            if matrix.len() != dim || matrix.iter().any(|r| r.len() != dim) {
                return Err(Error::MalformedDomain("matrix must be dim x dim".into()));
            }
            let m = matrix.into_iter().flatten().map(|[re, im]| Complex::new(re, im)).collect();
            let t = translation.into_iter().map(|[re, im]| Complex::new(re, im)).collect();
            Shape::AffineImage { map: AffineMap::new(dim, m, t)?, domain: Box::new(from_file(*domain)?) }
        }
    };
    DomainSpec::from_shape(field, dim, shape, f.witness.map(Point::new))
}

pub fn parse_domain(text: &str) -> Result<DomainSpec<f64>> {
    let file: DomainFile = serde_json::from_str(text).map_err(|e| Error::MalformedDomain(e.to_string()))?;
    from_file(file)
}

pub fn domain_to_json(d: &DomainSpec<f64>) -> String {
    serde_json::to_string_pretty(&to_file(d)).expect("domain serialises")
}

pub fn domain_to_value(d: &DomainSpec<f64>) -> serde_json::Value {
    serde_json::to_value(to_file(d)).expect("domain serialises")
}

/// `{"matrix": rows of [re, im], "translation": [[re, im], ...]}`.
pub fn affine_to_value(map: &AffineMap<f64>) -> serde_json::Value {
    let rows: Vec<Vec<[f64; 2]>> = map.matrix.chunks(map.dim).map(|row| row.iter().map(|z| [z.re, z.im]).collect()).collect();
    let t: Vec<[f64; 2]> = map.translation.iter().map(|z| [z.re, z.im]).collect();
    serde_json::json!({ "matrix": rows, "translation": t })
}

pub fn load_domain(path: &std::path::Path) -> Result<DomainSpec<f64>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_domain(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_ball() {
        let d = parse_domain(r#"{"dim":2,"kind":"ball","center":[0,0,0,0],"radius":1}"#).unwrap();
        assert_eq!(d.dim(), 2);
        assert_eq!(d.kind_name(), "ball");
        assert!(d.contains(&Point::from_f64(&[0.5, 0.0, 0.5, 0.0])));
    }

    #[test]
    fn reject_bad_kind() {
        assert!(matches!(parse_domain(r#"{"dim":1,"kind":"blob"}"#), Err(Error::MalformedDomain(_))));
        assert!(parse_domain(r#"{"dim":1,"kind":"ball","center":[0,0],"radius":-1}"#).is_err());
    }
}
