//! Seeded random convex domains with interior and boundary points, for property tests and reports.

use num_complex::Complex;
use rand::Rng;

use crate::geometry::{AffineMap, DomainSpec, Point};
use crate::numerics::sampling::{gaussian_vector, seeded, unit_vector};

type Domain = DomainSpec<f64>;

#[derive(Clone, Debug)]
pub struct CorpusCase {
    pub label: String,
    pub domain: Domain,
    pub z0: Point<f64>,
    pub xi: Point<f64>,
    /// A point of the segment (xi, z0].
    pub q: Point<f64>,
}

fn random_polytope(rng: &mut impl Rng, d: usize, facets: usize) -> Domain {
    loop {
        let normals: Vec<Point<f64>> = (0..facets).map(|_| Point::new(unit_vector(rng, 2 * d))).collect();
        let offsets: Vec<f64> = (0..facets).map(|_| rng.gen_range(0.5..1.5)).collect();
        let p = Domain::halfspaces(d, normals, offsets).expect("valid halfspaces");
        if p.is_bounded() {
            return p;
        }
    }
}

fn random_map(rng: &mut impl Rng, d: usize) -> AffineMap<f64> {
    loop {
        let g: Vec<f64> = gaussian_vector(rng, 2 * d * d);
        let mut m: Vec<Complex<f64>> = g.chunks(2).map(|c| Complex::new(0.4 * c[0], 0.4 * c[1])).collect();
        for i in 0..d {
            m[i * d + i] += 1.0;
        }
        let t: Vec<Complex<f64>> = gaussian_vector::<f64>(rng, 2 * d).chunks(2).map(|c| Complex::new(c[0], c[1])).collect();
        let map = AffineMap::new(d, m, t).expect("square map");
        if map.condition_estimate() < 20.0 {
            return map;
        }
    }
}

fn base_domain(rng: &mut impl Rng, kind: usize, d: usize) -> (String, Domain) {
    match kind {
        0 => ("ball".into(), Domain::ball(Point::zeros(2 * d), rng.gen_range(0.5..2.0)).unwrap()),
        1 => ("polydisk".into(), Domain::polydisk((0..d).map(|_| rng.gen_range(0.5..2.0)).collect()).unwrap()),
        2 => {
            let choices = [1.0, 1.5, 2.0, 3.0];
            ("ellipsoid".into(), Domain::ellipsoid((0..d).map(|_| choices[rng.gen_range(0..4)]).collect()).unwrap())
        }
        _ => ("polytope".into(), random_polytope(rng, d, 20)),
    }
}

/// Case `index` of the corpus: balls, polydisks, ellipsoids and 20-facet polytopes, half of them
/// moved by a random affine map, in complex dimension 1 + index % 3.
pub fn corpus_case(seed: u64, index: usize) -> CorpusCase {
    let mut rng = seeded(seed ^ (index as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let d = 1 + index % 3;
    let (mut label, mut domain) = base_domain(&mut rng, (index / 3) % 4, d);
    if (index / 12) % 2 == 1 {
        let map = random_map(&mut rng, d);
        domain = Domain::affine_image(map, domain).unwrap();
        label = format!("affine {label}");
    }
    let w = domain.witness().clone();
    let z0 = loop {
        let u = Point::new(unit_vector(&mut rng, 2 * d));
        let t = domain.ray(&w, &u);
        let z = w.along(&u, rng.gen_range(0.0..0.5) * t.min(1e3));
        if domain.contains(&z) {
            break z;
        }
    };
    let u = Point::new(unit_vector(&mut rng, 2 * d));
    let xi = z0.along(&u, domain.ray(&z0, &u));
    let q = xi.lerp(&z0, rng.gen_range(0.05..1.0));
    CorpusCase { label: format!("{label} d={d}"), domain, z0, xi, q }
}

/// A normalized corpus domain, a member of K_d(r).
#[derive(Clone, Debug)]
pub struct KdrMember {
    pub label: String,
    pub domain: Domain,
    pub r: f64,
}

/// Case `index` moved by its normalizing map at q; NotInKdr when the image fails the membership check.
pub fn kdr_member(seed: u64, index: usize) -> crate::Result<KdrMember> {
    let c = corpus_case(seed, index);
    let rep = crate::rescaling::normalize_at(&c.domain, &c.z0, &c.xi, Some(&c.q), None)?;
    if !rep.kdr.passed {
        return Err(crate::Error::NotInKdr(rep.kdr.first_failure().unwrap_or_default()));
    }
    let domain = Domain::affine_image(rep.map, c.domain)?;
    Ok(KdrMember { label: c.label, domain, r: rep.r })
}
