use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};
use std::path::Path;

use rand::Rng;
use serde_json::{json, Value};

use subindex::flat_torus::{PointClass, TorusDistanceField, TorusPoint};
use subindex::flows::{
    arrive_suite, gradient_like_check, omega_suite, omega_trajectory, random_right_triangle,
    right_triangle_residual, InequalityStats, OmegaOptions, OmegaParameter,
};
use subindex::jacobi::{
    boundary_value_bound, index_divergence, index_form, jacobi_families, lagrange_residual,
    random_piecewise_field, second_variation_check, unit_sphere_divergence, HessianTerm, JacobiField,
    ModelGeodesic,
};
use subindex::sampling::{random_in_ball, random_unit_vector, seeded_rng};
use subindex::spherical_convexity::RawDirectionSet;
use subindex::{classify, DirectionSet};

use crate::{fmt_f64, CliError, CliResult, Report};

fn usage<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Usage(msg.into()))
}

/// Parses either `{"dim": n, "directions": [...], "tol": t}` or a bare
/// array of vectors. `tol` defaults to the command-line value.
pub fn parse_direction_set(text: &str, tol: f64) -> CliResult<DirectionSet> {
    let value: Value = serde_json::from_str(text).map_err(|e| CliError::Usage(format!("input: {e}")))?;
    let raw = match value {
        Value::Array(_) => {
            let directions: Vec<Vec<f64>> =
                serde_json::from_value(value).map_err(|e| CliError::Usage(format!("input: {e}")))?;
            let dim = directions.first().map_or(0, Vec::len);
            RawDirectionSet { dim, directions, tol }
        }
        Value::Object(ref map) => {
            let has_tol = map.contains_key("tol");
            let mut raw: RawDirectionSet =
                serde_json::from_value(value).map_err(|e| CliError::Usage(format!("input: {e}")))?;
            if !has_tol {
                raw.tol = tol;
            }
            raw
        }
        _ => return usage("input must be a JSON array of vectors or a direction-set object"),
    };
    Ok(DirectionSet::new(raw.dim, raw.directions, raw.tol)?)
}

pub fn classify_command(input: &Path, tol: f64) -> CliResult<Report> {
    let text = std::fs::read_to_string(input)?;
    let set = parse_direction_set(&text, tol)?;
    let c = classify(&set)?;
    let sub = c.sub_index.map(|s| s.to_string()).unwrap_or_default();
    let csv = vec![
        vec!["critical".into(), "sub_index".into(), "variant".into(), "span_dim".into()],
        vec![
            c.critical.to_string(),
            sub,
            c.variant.unwrap_or("").into(),
            c.span_dim.map(|d| d.to_string()).unwrap_or_default(),
        ],
    ];
    let fields = json!({
        "dim": set.dim(),
        "critical": c.critical,
        "sub_index": c.sub_index,
        "variant": c.variant,
        "span_dim": c.span_dim,
        "soul": c.soul,
    });
    Ok(Report::new("classify", fields, csv, true))
}

pub fn torus_table(dim: usize, grid: Option<usize>) -> CliResult<Report> {
    let field = TorusDistanceField::centered(dim)?;
    let table = field.betti_table(grid)?;
    let mut counts = serde_json::Map::new();
    let mut csv = vec![vec!["sub_index".to_string(), "count".to_string()]];
    for (k, v) in &table {
        counts.insert(k.to_string(), json!(v));
        csv.push(vec![k.to_string(), v.to_string()]);
    }
    let fields = json!({ "dim": dim, "grid": grid, "counts": counts });
    Ok(Report::new("torus-table", fields, csv, true))
}

pub fn parse_point(text: &str) -> CliResult<Vec<f64>> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| CliError::Usage(format!("bad coordinate {s:?}: {e}")))
        })
        .collect()
}

pub fn torus_classify(dim: usize, point: &[f64], tol: f64) -> CliResult<Report> {
    if point.len() != dim {
        return usage(format!("point has {} coordinates, expected {dim}", point.len()));
    }
    let field = TorusDistanceField::centered(dim)?;
    let p = TorusPoint::new(point.to_vec())?;
    let level = field.dist(&p);
    let header = vec!["point".into(), "critical".into(), "level".into(), "sub_index".into()];
    let coords = p.coords().iter().map(|&c| fmt_f64(c)).collect::<Vec<_>>().join(" ");
    let (fields, row) = match field.classify_point_with_tol(&p, tol)? {
        PointClass::Regular => (
            json!({ "critical": false, "point": p, "level": level }),
            vec![coords, "false".into(), fmt_f64(level), String::new()],
        ),
        PointClass::Critical(rec) => {
            let row = vec![coords, "true".into(), fmt_f64(rec.level), rec.sub_index.to_string()];
            let mut obj = json!({ "critical": true });
            if let (Value::Object(o), Value::Object(r)) = (&mut obj, serde_json::to_value(&rec)?) {
                o.extend(r);
            }
            (obj, row)
        }
    };
    Ok(Report::new("torus-classify", fields, vec![header, row], true))
}

pub fn torus_connectivity(dim: usize, level: f64, eps: f64, grid: usize) -> CliResult<Report> {
    let field = TorusDistanceField::centered(dim)?;
    let r = field.sublevel_connectivity(level, eps, grid)?;
    let csv = vec![
        ["dim", "level", "eps", "grid", "outer_components", "inner_components", "outer_components_meeting_inner", "all_meet_inner"]
            .map(String::from)
            .to_vec(),
        vec![
            r.dim.to_string(),
            fmt_f64(r.level),
            fmt_f64(r.eps),
            r.grid.to_string(),
            r.outer_components.to_string(),
            r.inner_components.to_string(),
            r.outer_components_meeting_inner.to_string(),
            r.all_meet_inner.to_string(),
        ],
    ];
    Ok(Report::new("torus-connectivity", serde_json::to_value(&r)?, csv, true))
}

#[derive(Debug, Clone)]
pub struct FlowConfig {
    pub dim: usize,
    pub radius: f64,
    pub samples: usize,
    pub omega_samples: usize,
    pub seed: u64,
    pub parameter: OmegaParameter,
}

/// Trajectory rows `(sample, t, x_1..x_n)` of the cut-off flow from seeded
/// points of `B(0, R)`.
pub fn flow_trajectories(cfg: &FlowConfig, count: usize, steps: usize) -> CliResult<Vec<Vec<String>>> {
    let opts = OmegaOptions {
        parameter: cfg.parameter,
        ..OmegaOptions::default()
    };
    let mut rng = seeded_rng(cfg.seed ^ 0x7472_616a);
    let mut header = vec!["sample".to_string(), "t".to_string()];
    header.extend((1..=cfg.dim).map(|i| format!("x{i}")));
    let mut rows = vec![header];
    for s in 0..count {
        let y = random_in_ball(&mut rng, cfg.dim, cfg.radius);
        for (t, x) in omega_trajectory(&y, cfg.radius, steps, &opts)? {
            let mut row = vec![s.to_string(), fmt_f64(t)];
            row.extend(x.iter().map(|&c| fmt_f64(c)));
            rows.push(row);
        }
    }
    Ok(rows)
}

fn stats_json(s: &InequalityStats) -> Value {
    json!({ "checked": s.checked, "violations": s.violations, "worst_slack": s.worst_slack })
}

pub fn flow_verify(cfg: &FlowConfig) -> CliResult<Report> {
    if cfg.dim == 0 || !(cfg.radius > 0.0) || cfg.samples == 0 {
        return usage("flow-verify needs dim >= 1, radius > 0 and samples >= 1");
    }
    let mut inequalities = serde_json::Map::new();
    let mut csv = vec![["inequality", "checked", "violations", "worst_slack"].map(String::from).to_vec()];
    let mut push = |name: &str, s: &InequalityStats| {
        inequalities.insert(name.into(), stats_json(s));
        csv.push(vec![name.into(), s.checked.to_string(), s.violations.to_string(), fmt_f64(s.worst_slack)]);
    };
    let mut passed = true;

    let arrive = arrive_suite(cfg.dim, cfg.radius, cfg.samples, cfg.seed)?;
    push("arrive.cos_final", &arrive.cos_final);
    push("arrive.path_bound", &arrive.path_bound);
    push("arrive.exit_bound", &arrive.exit_bound);
    passed &= arrive.passed();

    let omega = if (2..=3).contains(&cfg.dim) {
        let opts = OmegaOptions {
            parameter: cfg.parameter,
            ..OmegaOptions::default()
        };
        let o = omega_suite(cfg.dim, cfg.radius, cfg.omega_samples, cfg.seed, &opts)?;
        push("omega.identity_outside", &o.identity_outside);
        push("omega.path_bound", &o.path_bound);
        push("omega.exit_bound", &o.exit_bound);
        push("omega.angle_bound", &o.angle_bound);
        passed &= o.passed();
        json!({
            "status": if o.passed() { "pass" } else { "fail" },
            "alpha0": o.alpha0,
            "ode_closed_form_deviation": o.ode_closed_form_deviation,
        })
    } else {
        json!({
            "status": "skipped",
            "reason": "alpha0 needs a certified sphere mesh, available for dim 2 and 3 only",
        })
    };

    // spherical identities live on S^{m-1} with m >= 3
    let m = cfg.dim.max(3);
    let mut rng = seeded_rng(cfg.seed.wrapping_add(1));
    let mut worst_triangle: f64 = 0.0;
    for _ in 0..cfg.samples {
        let t = random_right_triangle(&mut rng, m)?;
        worst_triangle = worst_triangle.max(right_triangle_residual(&t));
    }
    let triangle_ok = worst_triangle < 1e-10;
    passed &= triangle_ok;

    let k = 12;
    let dirs: Vec<Vec<f64>> = (0..k)
        .map(|j| {
            let a = 2.0 * PI * j as f64 / k as f64;
            let mut v = vec![0.0; m];
            v[0] = a.cos();
            v[1] = a.sin();
            v
        })
        .collect();
    let net = DirectionSet::new(m, dirs, 1e-9)?;
    let alpha = PI / k as f64 + 0.05;
    let gl = gradient_like_check(&net, 1, alpha, cfg.samples.min(2000), &mut rng)?;
    let gradient_ok = gl.max_hinge_angle < FRAC_PI_2 && gl.max_directional_derivative < 0.0;
    passed &= gradient_ok;

    let fields = json!({
        "config": {
            "dim": cfg.dim,
            "radius": cfg.radius,
            "samples": cfg.samples,
            "omega_samples": cfg.omega_samples,
            "seed": cfg.seed,
            "omega_parameter": cfg.parameter,
        },
        "passed": passed,
        "inequality": inequalities,
        "omega": omega,
        "right_triangle": { "sphere_dim": m - 1, "max_residual": worst_triangle, "passed": triangle_ok },
        "gradient_like": { "sphere_dim": m - 1, "alpha": alpha, "report": gl, "passed": gradient_ok },
    });
    Ok(Report::new("flow-verify", fields, csv, passed))
}

/// `eps` values spaced geometrically from `eps_max` down to `eps_min`.
pub fn geometric_eps(eps_min: f64, eps_max: f64, points: usize) -> CliResult<Vec<f64>> {
    if !(eps_min > 0.0 && eps_max >= eps_min) || points == 0 {
        return usage("need 0 < eps-min <= eps-max and at least one point");
    }
    if points == 1 {
        return Ok(vec![eps_max]);
    }
    let ratio = (eps_min / eps_max).powf(1.0 / (points - 1) as f64);
    Ok((0..points).map(|i| eps_max * ratio.powi(i as i32)).collect())
}

/// The index is `sqrt(kappa) f(sqrt(kappa) eps)` with `f` the unit-sphere
/// closed form, by rescaling.
pub fn jacobi_index(kappa: f64, length: f64, eps: &[f64]) -> CliResult<Report> {
    if !(kappa > 0.0) {
        return usage("the cut-off index needs positive curvature and a conjugate endpoint");
    }
    let g = ModelGeodesic::new(kappa, length, 1)?;
    let entries = index_divergence(&g, &[1.0], eps)?;
    let rk = kappa.sqrt();
    let mut rows = vec![["eps", "index"].map(String::from).to_vec()];
    let mut table = Vec::new();
    let mut worst_gap: f64 = 0.0;
    for e in &entries {
        let closed = rk * unit_sphere_divergence(rk * e.eps);
        worst_gap = worst_gap.max((e.index - closed).abs() / closed.abs().max(1.0));
        rows.push(vec![fmt_f64(e.eps), fmt_f64(e.index)]);
        table.push(json!({
            "eps": e.eps,
            "index": e.index,
            "quadrature": e.quadrature,
            "closed_form": closed,
        }));
    }
    // smaller eps must give a strictly smaller index
    let mut sorted: Vec<_> = entries.iter().map(|e| (e.eps, e.index)).collect();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let decreasing = sorted.windows(2).all(|w| w[0].1 < w[1].1 || w[0].0 == w[1].0);
    let passed = decreasing && worst_gap <= 1e-6;
    let fields = json!({
        "curvature": kappa,
        "length": length,
        "passed": passed,
        "strictly_decreasing": decreasing,
        "max_closed_form_gap": worst_gap,
        "table": table,
    });
    Ok(Report::new("jacobi-index", fields, rows, passed))
}

fn check(name: &str, passed: bool, value: f64, detail: Value) -> (String, bool, f64, Value) {
    (name.to_string(), passed, value, detail)
}

/// Invariant suite for the Jacobi kernels; `samples` random cases per check.
pub fn jacobi_verify(samples: usize, seed: u64) -> CliResult<Report> {
    if samples == 0 {
        return usage("samples must be positive");
    }
    let mut rng = seeded_rng(seed);
    let mut checks = Vec::new();

    for kappa in [-1.0, 0.0, 1.0] {
        let mut worst: f64 = 0.0;
        for _ in 0..samples {
            let len = rng.random_range(0.5..3.0);
            let dim = rng.random_range(1..=3);
            let g = ModelGeodesic::new(kappa, len, dim)?;
            let pieces = rng.random_range(1..=4);
            let v = random_piecewise_field(&mut rng, &g, pieces)?;
            let f = index_form(&g, &v, &v)?;
            worst = worst.max(f.discrepancy() / f.boundary.abs().max(1.0));
        }
        checks.push(check(
            &format!("index_form_agreement.kappa_{kappa}"),
            worst <= 1e-8,
            worst,
            json!({ "tolerance": 1e-8 }),
        ));

        let mut worst: f64 = 0.0;
        let ts: Vec<f64> = (0..50).map(|k| 0.06 * k as f64).collect();
        for _ in 0..samples {
            let dim = rng.random_range(1..=3);
            let mut field = || -> CliResult<JacobiField> {
                let a: Vec<f64> = (0..dim).map(|_| rng.random_range(-2.0..2.0)).collect();
                let b: Vec<f64> = (0..dim).map(|_| rng.random_range(-2.0..2.0)).collect();
                Ok(JacobiField::new(kappa, a, b)?)
            };
            let (p, n) = (field()?, field()?);
            worst = worst.max(lagrange_residual(&p, &n, &ts));
        }
        checks.push(check(
            &format!("lagrange_constant.kappa_{kappa}"),
            worst < 1e-10,
            worst,
            json!({ "tolerance": 1e-10 }),
        ));
    }

    let g = ModelGeodesic::new(1.0, PI, 1)?;
    let eps: Vec<f64> = (3..=12).map(|k| 2f64.powi(-k)).collect();
    let entries = index_divergence(&g, &[1.0], &eps)?;
    let decreasing = entries.windows(2).all(|w| w[1].index < w[0].index);
    let last = entries.last().map_or(0.0, |e| e.index);
    checks.push(check(
        "index_divergence",
        decreasing && last < -1e3,
        last,
        json!({ "strictly_decreasing": decreasing, "eps": eps, "index": entries.iter().map(|e| e.index).collect::<Vec<_>>() }),
    ));
    let at = index_divergence(&g, &[1.0], &[0.1])?[0].index;
    let gap = (at - unit_sphere_divergence(0.1)).abs();
    checks.push(check("index_closed_form_eps_0.1", gap <= 1e-6, gap, json!({ "index": at })));

    let eps: Vec<f64> = (1..=64).map(|k| FRAC_PI_2 * k as f64 / 64.0).collect();
    let b = boundary_value_bound(&g, &eps)?;
    checks.push(check(
        "boundary_value_bound",
        b.bound <= SQRT_2 + 1e-9,
        b.bound,
        json!({ "limit": SQRT_2 }),
    ));

    let mut worst = f64::NEG_INFINITY;
    let mut failures = 0;
    for _ in 0..samples {
        let kappa = [-1.0, 0.0, 1.0][rng.random_range(0..3)];
        let c0 = rng.random_range(0.1..2.5);
        let theta: f64 = rng.random_range(0.0..PI);
        let frame = rng.random_range(1..=3);
        let normal = random_unit_vector(&mut rng, frame);
        let mut w = vec![theta.cos()];
        w.extend(normal.iter().map(|x| x * theta.sin()));
        let r = second_variation_check(&ModelGeodesic::new(kappa, c0, frame)?, &w, HessianTerm::Full)?;
        worst = worst.max(r.final_excess);
        failures += usize::from(!r.passed);
    }
    checks.push(check(
        "second_variation",
        failures == 0,
        worst,
        json!({ "failures": failures, "tolerance": subindex::jacobi::SECOND_VARIATION_TOL }),
    ));

    let mut defect: f64 = 0.0;
    let mut complementary = true;
    for _ in 0..samples {
        let kappa = [-1.0, 0.0, 1.0][rng.random_range(0..3)];
        let dim = rng.random_range(1..=3);
        let g = ModelGeodesic::new(kappa, rng.random_range(0.3..6.0), dim)?;
        let fam = jacobi_families(&g);
        complementary &= fam.kernel.len() + fam.p_initial.len() == dim;
        defect = defect.max(fam.orthogonality_defect());
    }
    checks.push(check(
        "jacobi_families",
        complementary && defect == 0.0,
        defect,
        json!({ "complementary": complementary }),
    ));

    let passed = checks.iter().all(|c| c.1);
    let mut csv = vec![["check", "passed", "value"].map(String::from).to_vec()];
    let mut out = serde_json::Map::new();
    for (name, ok, value, detail) in checks {
        csv.push(vec![name.clone(), ok.to_string(), fmt_f64(value)]);
        let mut entry = json!({ "passed": ok, "value": value });
        if let (Value::Object(e), Value::Object(d)) = (&mut entry, detail) {
            e.extend(d);
        }
        out.insert(name, entry);
    }
    let fields = json!({ "samples": samples, "seed": seed, "passed": passed, "checks": out });
    Ok(Report::new("jacobi-verify", fields, csv, passed))
}
