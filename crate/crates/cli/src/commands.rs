use serde_json::{json, Value};

use santalo_core::asa::{asa_direct, asa_limit, default_schedule};
use santalo_core::floating::{inclusion_report, FloatingBodyQuery};
use santalo_core::linalg::Vector;
use santalo_core::polar::{
    ball_polar_volume, polar_volume_dual, polar_volume_section_at, polar_volume_spherical,
};
use santalo_core::quadrature::{default_level, sphere_rule};
use santalo_core::santalo::{
    polar_centroid_residual, santalo_point, test_directions, volume_product, SantaloRegion,
    SantaloSolution, DEFAULT_TOL,
};
use santalo_core::{BodySpec, ConvexBody, McConfig, Sampler, SphereRule};

use crate::output::{coords, num, Report};
use crate::{CliError, Common};

/// Parses `--body` as inline JSON (leading `{`) or as a path.
pub fn load_body(spec: &str) -> Result<ConvexBody, CliError> {
    let text = if spec.trim_start().starts_with('{') {
        spec.to_string()
    } else {
        std::fs::read_to_string(spec).map_err(|e| CliError::Input(format!("cannot read body file `{spec}`: {e}")))?
    };
    let spec = BodySpec::from_json(&text).map_err(|e| CliError::Input(e.to_string()))?;
    spec.build().map_err(|e| CliError::Input(e.to_string()))
}

pub fn rule_for(common: &Common, n: usize) -> Result<SphereRule, CliError> {
    let level = common.level.unwrap_or_else(|| default_level(n));
    if level == 0 {
        return Err(CliError::Input("--level must be positive".into()));
    }
    Ok(sphere_rule(n, level)?)
}

fn positive(name: &str, v: f64) -> Result<f64, CliError> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(CliError::Input(format!("{name} must be positive, got {v}")))
    }
}

/// Radial bisection tolerance: `--tol` (relative to diam K) or `1e-10`.
pub fn radial_tol(common: &Common, body: &ConvexBody) -> Result<f64, CliError> {
    Ok(positive("--tol", common.tol.unwrap_or(1e-10))? * body.diameter())
}

/// Santaló point at the default solver tolerance.
pub fn solve(body: &ConvexBody, rule: &SphereRule) -> Result<SantaloSolution, CliError> {
    Ok(santalo_point(body, rule, DEFAULT_TOL)?)
}

pub fn polar(common: &Common, x: &[f64]) -> Result<Report, CliError> {
    let body = load_body(&common.body)?;
    let n = body.dim();
    if x.len() != n {
        return Err(CliError::Input(format!("--x has {} coordinates, the body has dimension {n}", x.len())));
    }
    if !body.contains(x, 0.0) {
        return Err(CliError::Numeric("point not strictly interior".into()));
    }
    let rule = rule_for(common, n)?;
    let spherical = polar_volume_spherical(&body, x, &rule)?;
    let sampler = Sampler::new(common.seed);
    let dual = polar_volume_dual(&body, x, None, &sampler, McConfig::default().samples)?;
    let routes = if body.has_exact_sections() {
        vec![spherical, dual, polar_volume_section_at(&body, x, None)?]
    } else {
        vec![spherical, dual]
    };
    let values: Vec<f64> = routes.iter().map(|r| r.value).collect();
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let value = routes[0].value;
    let closed = body.ball_form().map(|(c, r)| {
        let lambda = (Vector::from_column_slice(x) - c).norm();
        ball_polar_volume(r, lambda, n)
    });
    let closed = closed.transpose()?;
    let json = json!({
        "x": x,
        "value": value,
        "routes": routes,
        "relative_spread": (max - min) / value,
        "ball_closed_form": closed,
    });
    let rows = routes
        .iter()
        .map(|r| {
            vec![
                serde_json::to_value(r.route).unwrap().as_str().unwrap_or_default().to_string(),
                num(r.value),
                num(r.estimated_error),
            ]
        })
        .collect();
    Ok(Report::new(json, vec!["route".into(), "value".into(), "estimated_error".into()], rows))
}

pub fn santalo(common: &Common) -> Result<Report, CliError> {
    let body = load_body(&common.body)?;
    let n = body.dim();
    let rule = rule_for(common, n)?;
    let tol = positive("--tol", common.tol.unwrap_or(DEFAULT_TOL))?;
    let sol = santalo_point(&body, &rule, tol)?;
    let product = volume_product(&body, &sol)?;
    let residual = polar_centroid_residual(&body, &sol.x0, &Sampler::new(common.seed), McConfig::default().samples)?;
    let json = json!({
        "solution": sol,
        "volume": body.volume(),
        "volume_product": product,
        "polar_centroid_residual": residual,
    });
    let mut header = coords("x0_", n);
    header.extend(
        ["volume_product", "polar_volume", "iterations", "gradient_norm", "centroid_residual", "residual_std_error"]
            .iter()
            .map(|s| s.to_string()),
    );
    let mut row: Vec<String> = sol.x0.iter().map(|v| num(*v)).collect();
    row.extend([
        num(product),
        num(sol.polar_volume),
        sol.iterations.to_string(),
        num(sol.gradient_norm),
        num(residual.residual),
        num(residual.std_error),
    ]);
    Ok(Report::new(json, header, vec![row]))
}

fn radial_rows(dirs: &[Vec<f64>], radii: &[f64]) -> (Vec<Value>, Vec<Vec<String>>) {
    let json = dirs
        .iter()
        .zip(radii)
        .map(|(u, r)| json!({"u": u, "radial": r}))
        .collect();
    let rows = dirs
        .iter()
        .zip(radii)
        .map(|(u, r)| {
            let mut row: Vec<String> = u.iter().map(|v| num(*v)).collect();
            row.push(num(*r));
            row
        })
        .collect();
    (json, rows)
}

pub fn region(common: &Common, t: f64, dirs: usize) -> Result<Report, CliError> {
    let body = load_body(&common.body)?;
    let n = body.dim();
    if dirs == 0 {
        return Err(CliError::Input("--dirs must be positive".into()));
    }
    let rule = rule_for(common, n)?;
    let sol = solve(&body, &rule)?;
    let region = SantaloRegion::new(&body, t, &sol, &rule)?;
    let tol = radial_tol(common, &body)?;
    let directions = test_directions(n, dirs)?;
    let radii = directions
        .iter()
        .map(|u| region.radial(u, tol))
        .collect::<Result<Vec<f64>, _>>()?;
    let volume_rule = sphere_rule(n, default_level(n))?;
    let deficit = region.volume_deficit(&volume_rule, tol)?;
    let (table, rows) = radial_rows(&directions, &radii);
    let json = json!({
        "t": t,
        "x0": sol.x0,
        "minimal_product": region.minimal_product(),
        "threshold": region.threshold(),
        "route": region.route(),
        "volume": body.volume() - deficit,
        "volume_deficit": deficit,
        "radials": table,
    });
    let mut header = coords("u", n);
    header.push("radial".into());
    Ok(Report::new(json, header, rows))
}

pub fn floating(common: &Common, delta: f64, dirs: usize) -> Result<Report, CliError> {
    let body = load_body(&common.body)?;
    let n = body.dim();
    if !(delta > 0.0 && delta < 0.5) {
        return Err(CliError::Input(format!("--delta must lie in (0, 1/2), got {delta}")));
    }
    if dirs == 0 {
        return Err(CliError::Input("--dirs must be positive".into()));
    }
    let rule = rule_for(common, n)?;
    let sol = solve(&body, &rule)?;
    let directions = test_directions(n, dirs)?;
    let tol = radial_tol(common, &body)?;
    let query = FloatingBodyQuery::with_default_directions(&body, delta)?;
    let x0 = sol.x0_vector();
    let center = if query.contains(x0.as_slice()) { Some(x0) } else { query.deepest_point() };
    let (table, rows) = match &center {
        Some(c) => {
            let radii = directions
                .iter()
                .map(|u| query.radial(c.as_slice(), u))
                .collect::<Result<Vec<f64>, _>>()?;
            radial_rows(&directions, &radii)
        }
        None => (Vec::new(), Vec::new()),
    };
    let report = inclusion_report(&body, &sol, &rule, delta, &directions, 1e-6 * body.diameter().max(tol))?;
    let json = json!({
        "delta": delta,
        "cuts": query.directions().len(),
        "center": center.as_ref().map(|c| c.as_slice().to_vec()),
        "empty": center.is_none(),
        "radials": table,
        "inclusions": report,
    });
    let mut header = coords("u", n);
    header.push("radial".into());
    let mut out = Report::new(json, header, rows);
    out.failed = !report.passed();
    Ok(out)
}

pub fn asa(common: &Common, schedule: Option<&[f64]>) -> Result<Report, CliError> {
    let body = load_body(&common.body)?;
    let n = body.dim();
    let rule = rule_for(common, n)?;
    let schedule = match schedule {
        Some(s) => s.to_vec(),
        None => {
            let sol = solve(&body, &rule)?;
            default_schedule(volume_product(&body, &sol)?)
        }
    };
    let tol = positive("--tol", common.tol.unwrap_or(1e-11))? * body.diameter();
    let est = asa_limit(&body, &schedule, &rule, tol).map_err(|e| match e {
        santalo_core::GeomError::Domain(m) => CliError::Input(m),
        other => other.into(),
    })?;
    let direct = asa_direct(&body).ok();
    let json = json!({
        "estimate": est,
        "direct_note": direct.as_ref().map(|d| d.note),
        "limit_from_direct": est.direct.map(|d| 0.5 * (body.volume() / santalo_core::unit_ball_volume(n)).powf(2.0 / (n as f64 + 1.0)) * d),
    });
    let direct_cell = est.direct.map(num).unwrap_or_default();
    let rows = est
        .t_values
        .iter()
        .zip(&est.estimates)
        .map(|(t, e)| vec![num(*t), num(*e), num(est.extrapolated), direct_cell.clone()])
        .collect();
    let header = ["t", "estimate", "extrapolated", "direct"].iter().map(|s| s.to_string()).collect();
    let mut out = Report::new(json, header, rows);
    out.failed = est.consistent == Some(false);
    Ok(out)
}
