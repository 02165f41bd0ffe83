use std::path::Path;

use invmetric::geometry::io::{domain_to_value, load_domain};
use invmetric::hilbert::hilbert_dist;
use invmetric::hyperbolicity::{fit_alpha_regularity, four_point_delta, AlphaFitOptions, FiniteMetric};
use invmetric::kobayashi::{build_finsler_graph, kob_dist_bracket, kob_quick_bracket, MetricBracket, Slice};
use invmetric::numerics::sampling::{ball_point, seeded};
use invmetric::psh::{certify, CertificateConfig, PeakOptions};
use invmetric::rescaling::{
    blowup_sequence, detect_boundary_disk, m_convexity_fit, normalize_at_with, BlowupOptions, BlowupRule, DiskOptions, MConvexOptions,
    NormalizeOptions,
};
use invmetric::{Domain, Error, Point};
use serde_json::{json, Value};

use crate::cli::{Command, Common, Rule};
use crate::output::Output;

/// Exit 2 for a bad configuration, 3 when a computation could not produce its result.
#[derive(Debug)]
pub enum Failure {
    Config(String),
    Oracle(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Config(_) => 2,
            Failure::Oracle(_) => 3,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Config(m) => write!(f, "bad config: {m}"),
            Failure::Oracle(m) => write!(f, "computation failed: {m}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::MalformedDomain(_)
            | Error::DimensionMismatch { .. }
            | Error::NotInterior
            | Error::NotBoundary(_)
            | Error::ZeroDirection
            | Error::NotComplex
            | Error::NonconvexSamples(_)
            | Error::InvalidMetric(_)
            | Error::TooFewPoints { .. }
            | Error::TooFewSamples(_)
            | Error::InvalidInput(_)
            | Error::Parse(_)
            | Error::Io(_) => Failure::Config(e.to_string()),
            _ => Failure::Oracle(e.to_string()),
        }
    }
}

type Res<T> = Result<T, Failure>;

fn domain(common: &Common, positional: Option<&Path>) -> Res<Domain> {
    let path = positional.or(common.domain.as_deref()).ok_or_else(|| Failure::Config("no domain file (use --domain)".into()))?;
    Ok(load_domain(path)?)
}

fn complex_domain(common: &Common) -> Res<Domain> {
    let d = domain(common, None)?;
    if !d.is_complex() {
        return Err(Error::NotComplex.into());
    }
    Ok(d)
}

fn parse_point(s: &str) -> Res<Point> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| Failure::Config(format!("not a number: {t:?}"))))
        .collect::<Res<Vec<f64>>>()
        .map(Point::new)
}

fn positive(name: &str, x: f64) -> Res<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Failure::Config(format!("{name} must be positive, got {x}")))
    }
}

fn normalize_opts(common: &Common) -> NormalizeOptions {
    NormalizeOptions { seed: common.seed, kdr_tol: common.tol, ..Default::default() }
}

fn fmt_list(xs: &[f64]) -> String {
    xs.iter().map(|x| format!("{x:.6}")).collect::<Vec<_>>().join(", ")
}

/// The canonical configuration hashed into the manifest: flags, arguments and the parsed domain.
pub fn config_value(common: &Common, command: &Command) -> Value {
    let dom = match command {
        Command::Validate { file } | Command::HilbertDist { file, .. } => file.as_deref().or(common.domain.as_deref()),
        Command::Delta4 { .. } => None,
        _ => common.domain.as_deref(),
    };
    let parsed = dom.and_then(|p| load_domain(p).ok()).map(|d| domain_to_value(&d));
    json!({ "common": common, "command": command, "domain": parsed })
}

pub fn run(common: &Common, command: &Command) -> Res<Output> {
    positive("--pitch", common.pitch)?;
    positive("--tol", common.tol)?;
    match command {
        Command::Validate { file } => validate(common, file.as_deref()),
        Command::HilbertDist { file, x, y } => {
            let d = domain(common, file.as_deref())?;
            let v = hilbert_dist(&d, &Point::new(x.clone()), &Point::new(y.clone()))?;
            let end = |p: &Option<Point>| p.as_ref().map(|p| json!(p.coords));
            Ok(Output::new(
                format!("{}", v.value),
                json!({ "value": v.value, "a": end(&v.a), "b": end(&v.b), "not_properly_convex": v.warning.is_some() }),
            ))
        }
        Command::KobBracket { z1, z2, window } => {
            positive("--window", *window)?;
            let d = complex_domain(common)?;
            let (z1, z2) = (Point::new(z1.clone()), Point::new(z2.clone()));
            let b = bracket(&d, &z1, &z2, *window, common.pitch)?;
            Ok(Output::new(format!("lower {} upper {}", b.lower, b.upper), bracket_json(&b)))
        }
        Command::Delta4 { metric } => {
            let text = std::fs::read_to_string(metric).map_err(|e| Failure::Config(format!("{}: {e}", metric.display())))?;
            let m = FiniteMetric::<f64>::from_csv(&text)?;
            let r = four_point_delta(&m, common.seed)?;
            Ok(Output::new(
                format!("{}", r.delta),
                json!({ "delta": r.delta, "exhaustive": r.exhaustive, "quadruples": r.quadruples, "worst": r.worst }),
            ))
        }
        Command::Normalize { z0, xi, q } => normalize(common, &Point::new(z0.clone()), &Point::new(xi.clone()), q.clone().map(Point::new)),
        Command::Blowup { z0, xi, eps, rule } => blowup(common, &Point::new(z0.clone()), &Point::new(xi.clone()), eps, *rule),
        Command::Mconvex { z0, xi, grid } => {
            let xis = xi.iter().map(|s| parse_point(s)).collect::<Res<Vec<_>>>()?;
            mconvex(common, &Point::new(z0.clone()), &xis, grid)
        }
        Command::DiskDetect { center, budget } => {
            let d = complex_domain(common)?;
            let o = DiskOptions { budget: *budget, center: center.clone().map(Point::new), seed: common.seed, ..Default::default() };
            let hit = detect_boundary_disk(&d, &o);
            let (text, value) = match &hit {
                Some(h) => (format!("disk of radius {:.4} (violation {:.2e})", h.radius, h.violation), json!({ "found": true, "disk": h.to_json() })),
                None => ("no boundary disk found".to_string(), json!({ "found": false })),
            };
            let body = serde_json::to_string_pretty(&value).expect("json") + "\n";
            Ok(Output::new(text, value).file("disk.json", body))
        }
        Command::AlphaFit { z0, xi, t } => {
            let d = complex_domain(common)?;
            let xis = xi.iter().map(|s| parse_point(s)).collect::<Res<Vec<_>>>()?;
            let opts = AlphaFitOptions { pitch: common.pitch, ..Default::default() };
            let fit = fit_alpha_regularity(&d, &Point::new(z0.clone()), &xis, t, &opts)?;
            let mut csv = String::from("xi,s,t,lower,upper\n");
            for p in &fit.probes {
                csv.push_str(&format!("{},{:.16e},{:.16e},{:.16e},{:.16e}\n", p.xi, p.s, p.t, p.lower, p.upper));
            }
            let value = serde_json::to_value(&fit).expect("json");
            Ok(Output::new(format!("alpha_hat {:.4} b_hat {:.4}", fit.alpha_hat, fit.b_hat), value).file("alpha_fit.csv", csv))
        }
        Command::PshCertify { z0, xi, m2, m0, k0, k_max, deltas } => {
            let cfg = CertificateConfig {
                m2: *m2,
                m0: *m0,
                k0: *k0,
                k_max: *k_max,
                peak: PeakOptions { seed: common.seed, ..Default::default() },
                normalize: normalize_opts(common),
                ..Default::default()
            };
            psh_certify(common, &Point::new(z0.clone()), &Point::new(xi.clone()), &cfg, deltas)
        }
        Command::TubeSandwich { pairs, shrink } => tube_sandwich(common, *pairs, *shrink),
        Command::Report { z0, xi } => report(common, &Point::new(z0.clone()), &Point::new(xi.clone())),
    }
}

fn validate(common: &Common, file: Option<&Path>) -> Res<Output> {
    let d = domain(common, file)?;
    let field = if d.is_complex() { "complex" } else { "real" };
    let text = format!("dim {} {} ({field}), bounded: {}, witness [{}]", d.dim(), d.kind_name(), d.is_bounded(), fmt_list(&d.witness().coords));
    let value = json!({
        "dim": d.dim(),
        "kind": d.kind_name(),
        "field": field,
        "bounded": d.is_bounded(),
        "witness": d.witness().coords,
        "domain": domain_to_value(&d),
    });
    Ok(Output::new(text, value))
}

fn bracket(d: &Domain, z1: &Point, z2: &Point, window: f64, pitch: f64) -> Res<MetricBracket> {
    d.require_interior(z1)?;
    d.require_interior(z2)?;
    let slice = if z1.dist(z2) > 0.0 { Slice::through(z1, z2, window)? } else { Slice::full(z1.clone(), window) };
    let graph = match build_finsler_graph(d, &slice, pitch, 16) {
        Ok(g) => Some(g),
        Err(Error::EmptyGraph) => None,
        Err(e) => return Err(e.into()),
    };
    let b = match graph.as_ref().map(|g| kob_dist_bracket(d, z1, z2, g)) {
        Some(Ok(b)) => b,
        None | Some(Err(Error::Disconnected | Error::OutOfWindow)) => kob_quick_bracket(d, z1, z2)?,
        Some(Err(e)) => return Err(e.into()),
    };
    Ok(b)
}

fn bracket_json(b: &MetricBracket) -> Value {
    json!({
        "lower": b.lower,
        "upper": b.upper,
        "lower_provenance": b.lower_provenance,
        "upper_provenance": b.upper_provenance,
        "finsler_upper": b.finsler_upper,
        "path_upper": b.path_upper,
        "windowed": b.windowed,
    })
}

fn normalize(common: &Common, z0: &Point, xi: &Point, q: Option<Point>) -> Res<Output> {
    let d = complex_domain(common)?;
    let rep = normalize_at_with(&d, z0, xi, q.as_ref(), None, &normalize_opts(common))?;
    let value = rep.to_json();
    let text = format!("r {:.6}, tau [{}], K_d(r) check {}", rep.r, fmt_list(&rep.tau), if rep.kdr.passed { "passed" } else { "failed" });
    let body = serde_json::to_string_pretty(&value).expect("json") + "\n";
    Ok(Output::new(text, value).file("normalize.json", body))
}

fn blowup(common: &Common, z0: &Point, xi: &Point, eps: &[f64], rule: Rule) -> Res<Output> {
    let d = complex_domain(common)?;
    let rule = match rule {
        Rule::Kobayashi => BlowupRule::Kobayashi { lambda: 1.0 },
        Rule::Euclidean => BlowupRule::Euclidean,
    };
    let opts = BlowupOptions { rule, pitch: common.pitch, seed: common.seed, normalize: normalize_opts(common), ..Default::default() };
    let s = blowup_sequence(&d, z0, xi, eps, &opts)?;
    let rows: Vec<Value> = s
        .steps
        .iter()
        .enumerate()
        .map(|(i, st)| json!({ "k": st.k, "eps": st.eps, "drift": s.drift.get(i), "r": st.report.r, "tau": st.report.tau }))
        .collect();
    let text = format!("{} steps, drift [{}], converged: {}", s.steps.len(), fmt_list(&s.drift), s.converged);
    Ok(Output::new(text, json!({ "steps": rows, "converged": s.converged })).file("blowup.csv", s.to_csv()))
}

fn mconvex(common: &Common, z0: &Point, xis: &[Point], grid: &[f64]) -> Res<Output> {
    let d = complex_domain(common)?;
    let fit = m_convexity_fit(&d, z0, xis, grid, &MConvexOptions { seed: common.seed, ..Default::default() })?;
    let text = match fit.m_hat {
        Some(m) => format!("m_hat {m:.4} C_hat {:.4}", fit.c_hat),
        None => "m_hat DIVERGENT".to_string(),
    };
    Ok(Output::new(text, fit.to_json()).file("mconvex.csv", fit.to_csv()))
}

fn psh_certify(common: &Common, z0: &Point, xi: &Point, cfg: &CertificateConfig, deltas: &[f64]) -> Res<Output> {
    let d = complex_domain(common)?;
    let rep = certify(&d, z0, xi, cfg, deltas)?;
    let value = rep.to_json();
    let text = format!(
        "slope {:.4} (expected {:.4}), fitted C {:.4e}, C spread {:.3}, all probes positive: {}",
        rep.slope,
        rep.expected_slope,
        rep.fitted_c,
        rep.c_spread,
        rep.records.iter().all(|r| r.pass)
    );
    let body = serde_json::to_string_pretty(&value).expect("json") + "\n";
    Ok(Output::new(text, value).file("psh_certificate.json", body))
}

fn tube_sandwich(common: &Common, pairs: usize, shrink: f64) -> Res<Output> {
    let base = domain(common, None)?;
    if base.is_complex() {
        return Err(Failure::Config("tube-sandwich takes a real base domain".into()));
    }
    if !(shrink > 0.0 && shrink < 1.0) {
        return Err(Failure::Config(format!("--shrink must lie in (0, 1), got {shrink}")));
    }
    let tube = Domain::tube(base.clone())?;
    let n = base.real_dim();
    let embed = |x: &Point| Point::new(x.coords.iter().flat_map(|&c| [c, 0.0]).collect());
    let mut rng = seeded(common.seed);
    let w = base.witness().clone();
    // a uniformly random fraction of the way to the boundary, times `shrink`
    let mut pick = || loop {
        let p = Point::new(ball_point::<f64>(&mut rng, n));
        let Some(u) = p.normalized() else { continue };
        break w.along(&u, shrink * p.norm() * base.ray(&w, &u).min(10.0));
    };
    let mut header: Vec<String> = (1..=n).map(|k| format!("x_{k}")).collect();
    header.extend((1..=n).map(|k| format!("y_{k}")));
    header.extend(["hilbert", "k_lower", "k_upper", "pass"].map(String::from));
    let mut csv = header.join(",") + "\n";
    let mut inside = 0;
    let mut rows = Vec::new();
    for _ in 0..pairs {
        let (x, y) = (pick(), pick());
        let hc = hilbert_dist(&base, &x, &y)?.value;
        let (zx, zy) = (embed(&x), embed(&y));
        let margin = tube.delta(&zx)?.value.min(tube.delta(&zy)?.value);
        let window = 4.0f64.max(2.0 * x.dist(&y));
        let b = bracket(&tube, &zx, &zy, window, common.pitch.min(0.25 * margin))?;
        let pass = b.lower <= hc && hc <= 2.0 * b.upper;
        inside += pass as usize;
        let mut row: Vec<String> = x.coords.iter().chain(&y.coords).map(|c| format!("{c:.16e}")).collect();
        row.extend([hc, b.lower, b.upper].map(|v| format!("{v:.16e}")));
        row.push(pass.to_string());
        csv.push_str(&(row.join(",") + "\n"));
        rows.push(json!({ "x": x.coords, "y": y.coords, "hilbert": hc, "k_lower": b.lower, "k_upper": b.upper, "pass": pass }));
    }
    let text = format!("{inside}/{pairs} pairs with K_lower <= H <= 2 K_upper");
    Ok(Output::new(text, json!({ "pairs": rows, "inside": inside })).file("tube_sandwich.csv", csv))
}

/// Runs the per-point experiments; a failing stage is recorded in the report and the rest go on.
fn report(common: &Common, z0: &Point, xi: &Point) -> Res<Output> {
    complex_domain(common)?;
    let mut out = Output::new("", json!({}));
    let stages: [(&str, Box<dyn Fn() -> Res<Output>>); 4] = [
        ("normalize", Box::new(|| normalize(common, z0, xi, None))),
        ("mconvex", Box::new(|| mconvex(common, z0, std::slice::from_ref(xi), &[1e-2, 1e-3, 1e-4, 1e-5]))),
        ("blowup", Box::new(|| blowup(common, z0, xi, &[0.5, 0.25, 0.125, 0.0625, 0.03125], Rule::Kobayashi))),
        ("psh_certify", Box::new(|| {
            let cfg = CertificateConfig { normalize: normalize_opts(common), peak: PeakOptions { seed: common.seed, ..Default::default() }, ..Default::default() };
            psh_certify(common, z0, xi, &cfg, &[0.0625, 0.03125, 0.015625, 0.0078125, 0.00390625])
        })),
    ];
    for (name, stage) in stages.iter() {
        match stage() {
            Ok(o) => out.merge(name, Output { text: format!("{name}: {}", o.text), ..o }),
            Err(f @ Failure::Oracle(_)) => out.merge(name, Output::new(format!("{name}: {f}"), json!({ "error": f.to_string() }))),
            Err(f) => return Err(f),
        }
    }
    let body = serde_json::to_string_pretty(&out.json).expect("json") + "\n";
    Ok(out.file("report.json", body))
}
