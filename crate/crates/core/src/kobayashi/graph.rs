use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap, VecDeque};
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{DomainSpec, Point};
use crate::numerics::quad::{adaptive_simpson, simpson5};

type Domain = DomainSpec<f64>;

/// Real affine slice origin + span_C(basis) intersected with a ball of `radius` around the origin.
/// The basis is complex-orthonormal.
#[derive(Clone, Debug, PartialEq)]
pub struct Slice {
    pub origin: Point<f64>,
    pub basis: Vec<Point<f64>>,
    pub radius: f64,
}

impl Slice {
    pub fn new(origin: Point<f64>, vectors: &[Point<f64>], radius: f64) -> Result<Self> {
        let mut basis: Vec<Point<f64>> = Vec::new();
        for v in vectors {
            if v.len() != origin.len() {
                return Err(Error::DimensionMismatch { expected: origin.len(), got: v.len() });
            }
            let mut w = v.clone();
            for b in &basis {
                w = &w - &b.cscale(w.cdot(b));
            }
            basis.push(w.normalized().ok_or(Error::ZeroDirection)?);
        }
        if basis.is_empty() {
            return Err(Error::ZeroDirection);
        }
        Ok(Self { origin, basis, radius })
    }

    /// Complex line through z1 and z2, anchored at z1.
    pub fn through(z1: &Point<f64>, z2: &Point<f64>, radius: f64) -> Result<Self> {
        Self::new(z1.clone(), &[z2 - z1], radius)
    }

    pub fn full(origin: Point<f64>, radius: f64) -> Self {
        let d = origin.len() / 2;
        let basis = (0..d).map(|j| Point::complex_unit(d, j)).collect();
        Self { origin, basis, radius }
    }

    pub fn real_dim(&self) -> usize {
        2 * self.basis.len()
    }

    pub fn is_full(&self) -> bool {
        self.real_dim() == self.origin.len()
    }

    pub fn embed(&self, c: &[f64]) -> Point<f64> {
        let mut p = self.origin.clone();
        for (k, b) in self.basis.iter().enumerate() {
            p = &(&p + &b.scale(c[2 * k])) + &b.mul_i().scale(c[2 * k + 1]);
        }
        p
    }

    /// Slice coordinates of z, or None if z is not on the slice.
    pub fn coords(&self, z: &Point<f64>) -> Option<Vec<f64>> {
        let w = z - &self.origin;
        let mut c = Vec::with_capacity(self.real_dim());
        for b in &self.basis {
            let p = w.cdot(b);
            c.push(p.re);
            c.push(p.im);
        }
        let back = self.embed(&c);
        (back.dist(z) <= 1e-9 * (1.0 + z.norm())).then_some(c)
    }
}

/// Distance from z to the boundary measured inside the slice (a lower estimate when the slice has
/// intermediate dimension).
pub(crate) fn slice_delta(d: &Domain, slice: &Slice, z: &Point<f64>) -> Result<f64> {
    if slice.is_full() || slice.basis.len() > 1 {
        Ok(d.delta(z)?.value)
    } else {
        line_delta(d, z, &slice.basis[0])
    }
}

pub(crate) fn line_delta(d: &Domain, z: &Point<f64>, v: &Point<f64>) -> Result<f64> {
    if d.dim() == 1 {
        Ok(d.delta(z)?.value)
    } else {
        Ok(d.delta_dir(z, v)?.value)
    }
}

/// Finsler upper density |v| / delta(z; v).
pub(crate) fn density(d: &Domain, z: &Point<f64>, v: &Point<f64>) -> f64 {
    match line_delta(d, z, v) {
        Ok(t) if t > 0.0 => v.norm() / t,
        _ => f64::INFINITY,
    }
}

/// Upper-density length of the straight chord a -> b.
pub(crate) fn chord_length(d: &Domain, a: &Point<f64>, b: &Point<f64>) -> f64 {
    let v = b - a;
    if v.norm() == 0.0 {
        return 0.0;
    }
    let scale = density(d, a, &v).min(density(d, b, &v));
    let tol = 1e-11 * scale.max(1e-300);
    adaptive_simpson(|t| density(d, &a.lerp(b, t), &v), 0.0, 1.0, tol, 48)
}

fn primitive(v: &[i64]) -> bool {
    fn gcd(a: i64, b: i64) -> i64 {
        if b == 0 {
            a.abs()
        } else {
            gcd(b, a % b)
        }
    }
    v.iter().fold(0, |g, &x| gcd(g, x)) == 1
}

/// The shortest primitive lattice offsets; ties at the cut-off length are all kept.
pub fn stencil(dim: usize, knn: usize) -> Vec<Vec<i64>> {
    let mut m = 1i64;
    loop {
        let side = (2 * m + 1) as usize;
        let total = side.pow(dim as u32);
        let mut all: Vec<Vec<i64>> = (0..total)
            .map(|mut k| {
                (0..dim)
                    .map(|_| {
                        let c = (k % side) as i64 - m;
                        k /= side;
                        c
                    })
                    .collect::<Vec<i64>>()
            })
            .filter(|v| primitive(v))
            .collect();
        let norm2 = |v: &Vec<i64>| v.iter().map(|x| x * x).sum::<i64>();
        all.sort_by_key(|v| (norm2(v), v.clone()));
        if all.len() >= knn {
            let cut = norm2(&all[knn.max(1) - 1]);
            if cut <= m * m {
                all.retain(|v| norm2(v) <= cut);
                return all;
            }
        }
        m += 1;
    }
}

#[derive(Clone, Debug)]
pub struct FinslerGraph {
    pub(crate) slice: Slice,
    pub(crate) pitch: f64,
    pub(crate) stencil: Vec<Vec<i64>>,
    pub(crate) lattice: Vec<Vec<i64>>,
    pub(crate) margin: Vec<f64>,
    pub(crate) index: HashMap<Vec<i64>, usize>,
    pub(crate) adj: Vec<Vec<(usize, f64)>>,
}

impl FinslerGraph {
    pub fn slice(&self) -> &Slice {
        &self.slice
    }

    pub fn pitch(&self) -> f64 {
        self.pitch
    }

    pub fn node_count(&self) -> usize {
        self.lattice.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|a| a.len()).sum::<usize>() / 2
    }

    pub fn node(&self, i: usize) -> Point<f64> {
        let c: Vec<f64> = self.lattice[i].iter().map(|&n| n as f64 * self.pitch).collect();
        self.slice.embed(&c)
    }

    /// Undirected edges (i < j) with weights.
    pub fn edges(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        for (i, a) in self.adj.iter().enumerate() {
            for &(j, w) in a {
                if i < j {
                    out.push((i, j, w));
                }
            }
        }
        out
    }

    fn reach(&self) -> f64 {
        self.stencil.iter().map(|s| s.iter().map(|x| (x * x) as f64).sum::<f64>().sqrt()).fold(1.0, f64::max)
    }

    /// Text form: header, stencil, nodes (lattice indices then margin), edges with weights.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let f = |x: f64| format!("{x:.16e}");
        let join = |v: &[f64]| v.iter().map(|x| f(*x)).collect::<Vec<_>>().join(" ");
        let ints = |v: &[i64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
        writeln!(s, "finsler-graph 1").unwrap();
        writeln!(s, "pitch {}", f(self.pitch)).unwrap();
        writeln!(s, "radius {}", f(self.slice.radius)).unwrap();
        writeln!(s, "origin {}", join(&self.slice.origin.coords)).unwrap();
        for b in &self.slice.basis {
            writeln!(s, "basis {}", join(&b.coords)).unwrap();
        }
        for o in &self.stencil {
            writeln!(s, "offset {}", ints(o)).unwrap();
        }
        writeln!(s, "nodes {}", self.lattice.len()).unwrap();
        for (l, m) in self.lattice.iter().zip(&self.margin) {
            writeln!(s, "{} {}", ints(l), f(*m)).unwrap();
        }
        let edges = self.edges();
        writeln!(s, "edges {}", edges.len()).unwrap();
        for (i, j, w) in edges {
            writeln!(s, "{i} {j} {}", f(w)).unwrap();
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let bad = |m: &str| Error::Parse(m.to_string());
        let num = |t: &str| t.parse::<f64>().map_err(|_| bad(t));
        let int = |t: &str| t.parse::<i64>().map_err(|_| bad(t));
        let mut lines = text.lines().filter(|l| !l.trim().is_empty()).peekable();
        if lines.next().map(str::trim) != Some("finsler-graph 1") {
            return Err(bad("missing header"));
        }
        let mut field = |name: &str| -> Result<Vec<String>> {
            let l = lines.next().ok_or_else(|| bad(name))?;
            let mut it = l.split_whitespace();
            if it.next() != Some(name) {
                return Err(bad(name));
            }
            Ok(it.map(String::from).collect())
        };
        let pitch = num(&field("pitch")?[0])?;
        let radius = num(&field("radius")?[0])?;
        let origin = Point::new(field("origin")?.iter().map(|t| num(t)).collect::<Result<_>>()?);
        let mut basis = Vec::new();
        let mut stencil = Vec::new();
        let count;
        loop {
            let l = lines.next().ok_or_else(|| bad("nodes"))?;
            let mut it = l.split_whitespace();
            match it.next() {
                Some("basis") => basis.push(Point::new(it.map(num).collect::<Result<_>>()?)),
                Some("offset") => stencil.push(it.map(int).collect::<Result<_>>()?),
                Some("nodes") => {
                    count = it.next().ok_or_else(|| bad("nodes"))?.parse::<usize>().map_err(|_| bad("nodes"))?;
                    break;
                }
                _ => return Err(bad(l)),
            }
        }
        let k = 2 * basis.len();
        let mut lattice = Vec::with_capacity(count);
        let mut margin = Vec::with_capacity(count);
        for _ in 0..count {
            let toks: Vec<&str> = lines.next().ok_or_else(|| bad("node"))?.split_whitespace().collect();
            if toks.len() != k + 1 {
                return Err(bad("node arity"));
            }
            lattice.push(toks[..k].iter().map(|t| int(t)).collect::<Result<Vec<i64>>>()?);
            margin.push(num(toks[k])?);
        }
        let l = lines.next().ok_or_else(|| bad("edges"))?;
        let m: usize = l.strip_prefix("edges ").ok_or_else(|| bad("edges"))?.trim().parse().map_err(|_| bad("edges"))?;
        let mut adj = vec![Vec::new(); count];
        for _ in 0..m {
            let toks: Vec<&str> = lines.next().ok_or_else(|| bad("edge"))?.split_whitespace().collect();
            if toks.len() != 3 {
                return Err(bad("edge arity"));
            }
            let i = toks[0].parse::<usize>().map_err(|_| bad(toks[0]))?;
            let j = toks[1].parse::<usize>().map_err(|_| bad(toks[1]))?;
            if i >= count || j >= count {
                return Err(bad("edge index"));
            }
            let w = num(toks[2])?;
            adj[i].push((j, w));
            adj[j].push((i, w));
        }
        let index = lattice.iter().cloned().enumerate().map(|(i, l)| (l, i)).collect();
        Ok(Self { slice: Slice { origin, basis, radius }, pitch, stencil, lattice, margin, index, adj })
    }
}

/// Grid graph on a slice: nodes with slice margin > h/2, edges along the knn shortest primitive
/// offsets, weights by 5-node Simpson of the upper density.
pub fn build_finsler_graph(d: &Domain, slice: &Slice, pitch: f64, knn: usize) -> Result<FinslerGraph> {
    if !d.is_complex() {
        return Err(Error::NotComplex);
    }
    if slice.origin.len() != d.real_dim() {
        return Err(Error::DimensionMismatch { expected: d.real_dim(), got: slice.origin.len() });
    }
    if !(pitch > 0.0) {
        return Err(Error::MalformedDomain("pitch must be positive".into()));
    }
    let k = slice.real_dim();
    let stencil = stencil(k, knn);
    let reach = slice.radius / pitch;
    let qualifies = |n: &[i64]| -> Option<f64> {
        if n.iter().map(|x| (x * x) as f64).sum::<f64>().sqrt() > reach {
            return None;
        }
        let c: Vec<f64> = n.iter().map(|&x| x as f64 * pitch).collect();
        let z = slice.embed(&c);
        if !d.contains(&z) {
            return None;
        }
        slice_delta(d, slice, &z).ok().filter(|m| *m > 0.5 * pitch)
    };

    let mut seen: HashMap<Vec<i64>, Option<f64>> = HashMap::new();
    let mut queue = VecDeque::new();
    let zero = vec![0i64; k];
    let start = qualifies(&zero);
    seen.insert(zero.clone(), start);
    if start.is_some() {
        queue.push_back(zero);
    } else {
        let r = reach.floor() as i64;
        let side = (2 * r + 1) as usize;
        if (side as f64).powi(k as i32) > 4e6 {
            return Err(Error::EmptyGraph);
        }
        for idx in 0..side.pow(k as u32) {
            let mut t = idx;
            let n: Vec<i64> = (0..k)
                .map(|_| {
                    let c = (t % side) as i64 - r;
                    t /= side;
                    c
                })
                .collect();
            if let Some(m) = qualifies(&n) {
                seen.insert(n.clone(), Some(m));
                queue.push_back(n);
                break;
            }
        }
    }
    let mut lattice = Vec::new();
    let mut margin = Vec::new();
    while let Some(n) = queue.pop_front() {
        margin.push(seen[&n].unwrap());
        lattice.push(n.clone());
        for s in &stencil {
            let m: Vec<i64> = n.iter().zip(s).map(|(a, b)| a + b).collect();
            if seen.contains_key(&m) {
                continue;
            }
            let q = qualifies(&m);
            seen.insert(m.clone(), q);
            if q.is_some() {
                queue.push_back(m);
            }
        }
    }
    if lattice.is_empty() {
        return Err(Error::EmptyGraph);
    }
    let index: HashMap<Vec<i64>, usize> = lattice.iter().cloned().enumerate().map(|(i, l)| (l, i)).collect();
    let half: Vec<&Vec<i64>> = stencil.iter().filter(|s| s.iter().find(|x| **x != 0).is_some_and(|x| *x > 0)).collect();
    let line = slice.basis.len() == 1;
    let point = |n: &[i64]| slice.embed(&n.iter().map(|&x| x as f64 * pitch).collect::<Vec<_>>());
    let forward: Vec<Vec<(usize, f64)>> = lattice
        .par_iter()
        .enumerate()
        .map(|(i, n)| {
            let a = point(n);
            let mut out = Vec::new();
            for s in &half {
                let m: Vec<i64> = n.iter().zip(s.iter()).map(|(x, y)| x + y).collect();
                let Some(&j) = index.get(&m) else { continue };
                let b = point(&m);
                let v = &b - &a;
                let len = v.norm();
                let w = if line {
                    // the slice is the complex line itself, so the margin is the line distance
                    let (ma, mb) = (margin[i], margin[j]);
                    simpson5(
                        |t| {
                            if t == 0.0 {
                                1.0 / ma
                            } else if t == 1.0 {
                                1.0 / mb
                            } else {
                                density(d, &a.lerp(&b, t), &v) / len
                            }
                        },
                        len,
                    )
                } else {
                    simpson5(|t| density(d, &a.lerp(&b, t), &v) / len, len)
                };
                out.push((j, w));
            }
            out
        })
        .collect();
    let mut adj = vec![Vec::new(); lattice.len()];
    for (i, f) in forward.into_iter().enumerate() {
        for (j, w) in f {
            adj[i].push((j, w));
            adj[j].push((i, w));
        }
    }
    Ok(FinslerGraph { slice: slice.clone(), pitch, stencil, lattice, margin, index, adj })
}

#[derive(PartialEq)]
struct Item(f64, usize);

impl Eq for Item {}

impl PartialOrd for Item {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Item {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.partial_cmp(&self.0).unwrap_or(Ordering::Equal).then(other.1.cmp(&self.1))
    }
}

/// Shortest graph path between two query points attached to nearby nodes.
pub(crate) struct GraphPath {
    pub value: f64,
    pub points: Vec<Point<f64>>,
    pub weights: Vec<f64>,
    pub near_window: bool,
}

impl FinslerGraph {
    fn attach(&self, d: &Domain, z: &Point<f64>) -> Result<Vec<(usize, f64)>> {
        let c = self.slice.coords(z).ok_or(Error::OutOfWindow)?;
        if c.iter().map(|x| x * x).sum::<f64>().sqrt() > self.slice.radius {
            return Err(Error::OutOfWindow);
        }
        let r = self.reach();
        let lo: Vec<i64> = c.iter().map(|x| (x / self.pitch - r).floor() as i64).collect();
        let hi: Vec<i64> = c.iter().map(|x| (x / self.pitch + r).ceil() as i64).collect();
        let mut out = Vec::new();
        let mut cur = lo.clone();
        loop {
            if let Some(&i) = self.index.get(&cur) {
                let dist = cur.iter().zip(&c).map(|(n, x)| (*n as f64 - x / self.pitch).powi(2)).sum::<f64>().sqrt();
                if dist <= r + 1e-9 {
                    out.push((i, chord_length(d, z, &self.node(i))));
                }
            }
            let mut k = 0;
            loop {
                if k == cur.len() {
                    return Ok(out);
                }
                cur[k] += 1;
                if cur[k] <= hi[k] {
                    break;
                }
                cur[k] = lo[k];
                k += 1;
            }
        }
    }

    pub(crate) fn shortest(&self, d: &Domain, z1: &Point<f64>, z2: &Point<f64>) -> Result<GraphPath> {
        let n = self.node_count();
        let (src, dst) = (n, n + 1);
        let a1 = self.attach(d, z1)?;
        let a2 = self.attach(d, z2)?;
        if a1.is_empty() || a2.is_empty() {
            return Err(Error::Disconnected);
        }
        let mut into_dst = vec![f64::INFINITY; n];
        for &(i, w) in &a2 {
            into_dst[i] = w;
        }
        let mut dist = vec![f64::INFINITY; n + 2];
        let mut prev = vec![usize::MAX; n + 2];
        let mut heap = BinaryHeap::new();
        dist[src] = 0.0;
        heap.push(Item(0.0, src));
        while let Some(Item(du, u)) = heap.pop() {
            if du > dist[u] {
                continue;
            }
            if u == dst {
                break;
            }
            let mut relax = |v: usize, w: f64, heap: &mut BinaryHeap<Item>| {
                let nd = du + w;
                if nd < dist[v] {
                    dist[v] = nd;
                    prev[v] = u;
                    heap.push(Item(nd, v));
                }
            };
            if u == src {
                for &(i, w) in &a1 {
                    relax(i, w, &mut heap);
                }
                continue;
            }
            for &(v, w) in &self.adj[u] {
                relax(v, w, &mut heap);
            }
            if into_dst[u].is_finite() {
                relax(dst, into_dst[u], &mut heap);
            }
        }
        if !dist[dst].is_finite() {
            return Err(Error::Disconnected);
        }
        let mut ids = vec![dst];
        while *ids.last().unwrap() != src {
            ids.push(prev[*ids.last().unwrap()]);
        }
        ids.reverse();
        let at = |i: usize| if i == src { z1.clone() } else if i == dst { z2.clone() } else { self.node(i) };
        let points: Vec<Point<f64>> = ids.iter().map(|&i| at(i)).collect();
        let weights = ids.windows(2).map(|w| dist[w[1]] - dist[w[0]]).collect();
        let edge = self.slice.radius - 2.0 * self.reach() * self.pitch;
        let near_window = ids[1..ids.len() - 1].iter().any(|&i| {
            self.lattice[i].iter().map(|x| (*x as f64 * self.pitch).powi(2)).sum::<f64>().sqrt() > edge
        });
        Ok(GraphPath { value: dist[dst], points, weights, near_window })
    }
}
