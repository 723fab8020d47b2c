//! Verification suites: each check is a directional comparison reporting its
//! worst margin and the number of violations.

use clap::ValueEnum;
use serde::Serialize;
use serde_json::json;

use santalo_core::floating::{inclusion_report, lemma8_ratio};
use santalo_core::linalg::{Matrix, Vector};
use santalo_core::santalo::{
    sandwich_reports, test_directions, verify_inclusion, InclusionReport, SantaloRegion,
    SantaloSolution,
};
use santalo_core::{ConvexBody, Sampler, SphereRule};

use crate::commands::{load_body, rule_for, solve};
use crate::output::{num, Report};
use crate::{CliError, Common};

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    All,
    /// Affine equivariance, monotonicity, convexity, floating-body inclusion
    Prop1,
    /// Ellipsoid and body sandwiches of S(K,t)
    #[value(alias = "thm6", alias = "thm7", alias = "thm9")]
    Sandwich,
    /// Smooth-body converse inclusion and the ball comparisons
    #[value(alias = "remark2")]
    Prop14,
    /// Centroid cap ratios
    Lemma8,
}

pub const SANDWICH_T: [f64; 3] = [1.5, 2.0, 8.0];
pub const PROP1_DELTAS: [f64; 5] = [0.05, 0.1, 0.2, 0.3, 0.45];
pub const PROP14_DELTAS: [f64; 3] = [0.005, 0.01, 0.02];

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub suite: &'static str,
    pub check: String,
    pub passed: bool,
    pub worst_margin: f64,
    pub violations: usize,
    pub note: Option<String>,
}

impl Check {
    fn from_report(suite: &'static str, prefix: &str, r: &InclusionReport) -> Self {
        Check {
            suite,
            check: format!("{prefix}{}", r.label),
            passed: r.passed(),
            worst_margin: r.worst_margin,
            violations: r.violations.len(),
            note: r.skipped.clone(),
        }
    }
}

struct Context {
    body: ConvexBody,
    rule: SphereRule,
    sol: SantaloSolution,
    dirs: Vec<Vec<f64>>,
    tol: f64,
    seed: u64,
}

pub fn run(common: &Common, suite: Suite, dirs: usize) -> Result<Report, CliError> {
    let body = load_body(&common.body)?;
    let n = body.dim();
    if dirs == 0 {
        return Err(CliError::Input("--dirs must be positive".into()));
    }
    let rel = common.tol.unwrap_or(1e-6);
    if !(rel > 0.0) {
        return Err(CliError::Input("--tol must be positive".into()));
    }
    let rule = rule_for(common, n)?;
    let sol = solve(&body, &rule)?;
    let ctx = Context {
        tol: rel * body.diameter(),
        dirs: test_directions(n, dirs)?,
        body,
        rule,
        sol,
        seed: common.seed,
    };
    let mut checks = Vec::new();
    let all = suite == Suite::All;
    if all || suite == Suite::Prop1 {
        checks.extend(prop1(&ctx)?);
    }
    if all || suite == Suite::Sandwich {
        checks.extend(sandwich(&ctx)?);
    }
    if all || suite == Suite::Prop14 {
        checks.extend(prop14(&ctx)?);
    }
    if all || suite == Suite::Lemma8 {
        checks.push(lemma8(&ctx));
    }
    let failed = checks.iter().any(|c| !c.passed);
    let json = json!({
        "x0": ctx.sol.x0,
        "directions": ctx.dirs.len(),
        "tol": ctx.tol,
        "passed": !failed,
        "checks": checks,
    });
    let header = ["suite", "check", "passed", "worst_margin", "violations", "note"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let rows = checks
        .iter()
        .map(|c| {
            vec![
                c.suite.to_string(),
                c.check.clone(),
                c.passed.to_string(),
                num(c.worst_margin),
                c.violations.to_string(),
                c.note.clone().unwrap_or_default(),
            ]
        })
        .collect();
    let mut report = Report::new(json, header, rows);
    report.failed = failed;
    Ok(report)
}

fn region(ctx: &Context, body: &ConvexBody, sol: &SantaloSolution, t: f64) -> Result<Option<SantaloRegion>, CliError> {
    match SantaloRegion::new(body, t, sol, &ctx.rule) {
        Ok(r) => Ok(Some(r)),
        Err(santalo_core::GeomError::EmptyRegion { .. }) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

fn prop1(ctx: &Context) -> Result<Vec<Check>, CliError> {
    let mut out = Vec::new();
    let bisect = 1e-3 * ctx.tol;
    let regions: Vec<SantaloRegion> = SANDWICH_T
        .iter()
        .filter_map(|&t| region(ctx, &ctx.body, &ctx.sol, t).transpose())
        .collect::<Result<_, _>>()?;

    for w in regions.windows(2) {
        let r = verify_inclusion(
            &format!("S(K,{}) inside S(K,{})", w[0].t(), w[1].t()),
            |u| w[0].radial(u, bisect),
            |u| w[1].radial(u, bisect),
            &ctx.dirs,
            ctx.tol,
        )?;
        out.push(Check::from_report("prop1", "monotone: ", &r));
    }

    for reg in &regions {
        out.push(convexity(ctx, reg)?);
    }

    if let Some(reg) = regions.get(1) {
        out.push(equivariance(ctx, reg)?);
    }

    for delta in PROP1_DELTAS {
        let rep = inclusion_report(&ctx.body, &ctx.sol, &ctx.rule, delta, &ctx.dirs, ctx.tol)?;
        out.push(Check::from_report("prop1", &format!("δ = {delta}: "), &rep.general));
    }
    Ok(out)
}

/// Convex combinations of boundary points, pulled slightly inward, stay in
/// the region.
fn convexity(ctx: &Context, reg: &SantaloRegion) -> Result<Check, CliError> {
    let x0 = reg.center();
    let shrink = 1.0 - ctx.tol / ctx.body.diameter();
    let pts = ctx
        .dirs
        .iter()
        .map(|u| {
            let r = reg.radial(u, 1e-3 * ctx.tol)?;
            Ok(&x0 + Vector::from_column_slice(u) * (r * shrink))
        })
        .collect::<Result<Vec<Vector>, santalo_core::GeomError>>()?;
    let m = pts.len();
    let mut violations = 0;
    let mut worst = f64::NEG_INFINITY;
    for i in 0..m {
        for step in [1, m / 3 + 1, m / 2] {
            let j = (i + step) % m;
            for alpha in [0.25, 0.5, 0.75] {
                let z = &pts[i] * alpha + &pts[j] * (1.0 - alpha);
                let mem = reg.membership(z.as_slice());
                let margin = mem.polar_volume.map(|v| v / reg.threshold() - 1.0).unwrap_or(f64::INFINITY);
                worst = worst.max(margin);
                if !mem.inside {
                    violations += 1;
                }
            }
        }
    }
    Ok(Check {
        suite: "prop1",
        check: format!("convex combinations in S(K,{})", reg.t()),
        passed: violations == 0,
        worst_margin: worst,
        violations,
        note: None,
    })
}

/// Membership of `x` in `S(K,t)` agrees with membership of `Lx + a` in
/// `S(LK + a, t)` away from the boundary.
fn equivariance(ctx: &Context, reg: &SantaloRegion) -> Result<Check, CliError> {
    let n = ctx.body.dim();
    let mut rng = Sampler::new(ctx.seed).substream(11);
    let mut l = Matrix::identity(n, n);
    for v in l.iter_mut() {
        *v += 0.4 * rng.uniform_in(-1.0, 1.0);
    }
    let a = Vector::from_iterator(n, (0..n).map(|_| rng.uniform_in(-1.0, 1.0)));
    let image = ctx.body.affine_image(&l, &a)?;
    let sol = solve(&image, &ctx.rule)?;
    let Some(ireg) = region(ctx, &image, &sol, reg.t())? else {
        return Err(CliError::Numeric("image region is empty".into()));
    };
    let x0 = reg.center();
    let mut violations = 0;
    let mut checked = 0;
    for u in &ctx.dirs {
        let r = reg.radial(u, 1e-3 * ctx.tol)?;
        for s in [0.5, 0.9, 0.99, 1.01, 1.1, 1.5] {
            let x = &x0 + Vector::from_column_slice(u) * (r * s);
            if !ctx.body.contains(x.as_slice(), 0.0) {
                continue;
            }
            let m1 = reg.membership(x.as_slice());
            let y = &l * &x + &a;
            let m2 = ireg.membership(y.as_slice());
            let near = |m: &santalo_core::santalo::Membership, thr: f64| {
                m.polar_volume.is_some_and(|v| (v / thr - 1.0).abs() < 1e-6)
            };
            if near(&m1, reg.threshold()) || near(&m2, ireg.threshold()) {
                continue;
            }
            checked += 1;
            if m1.inside != m2.inside {
                violations += 1;
            }
        }
    }
    Ok(Check {
        suite: "prop1",
        check: format!("affine equivariance of S(K,{})", reg.t()),
        passed: violations == 0,
        worst_margin: violations as f64,
        violations,
        note: Some(format!("{checked} points compared")),
    })
}

fn sandwich(ctx: &Context) -> Result<Vec<Check>, CliError> {
    let mut out = Vec::new();
    for t in SANDWICH_T {
        let Some(reg) = region(ctx, &ctx.body, &ctx.sol, t)? else {
            continue;
        };
        for r in sandwich_reports(&reg, &ctx.dirs, ctx.tol)? {
            out.push(Check::from_report("sandwich", &format!("t = {t}: "), &r));
        }
    }
    Ok(out)
}

fn prop14(ctx: &Context) -> Result<Vec<Check>, CliError> {
    let mut out = Vec::new();
    for delta in PROP14_DELTAS {
        let rep = inclusion_report(&ctx.body, &ctx.sol, &ctx.rule, delta, &ctx.dirs, ctx.tol)?;
        out.push(Check::from_report("prop14", &format!("δ = {delta}: "), &rep.smooth));
        for r in &rep.ball {
            out.push(Check::from_report("remark2", &format!("δ = {delta}: "), r));
        }
    }
    Ok(out)
}

fn lemma8(ctx: &Context) -> Check {
    let lo = (-1.0f64).exp();
    let hi = 1.0 - lo;
    let mut worst = f64::NEG_INFINITY;
    let mut violations = 0;
    for u in &ctx.dirs {
        let r = lemma8_ratio(&ctx.body, u);
        let margin = (lo - r).max(r - hi);
        worst = worst.max(margin);
        if margin > 1e-6 {
            violations += 1;
        }
    }
    Check {
        suite: "lemma8",
        check: "centroid cap ratio in [1/e, 1 - 1/e]".into(),
        passed: violations == 0,
        worst_margin: worst,
        violations,
        note: None,
    }
}
