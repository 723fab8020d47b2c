//! Convex floating bodies `K_δ`, approximated from outside by finitely many
//! cuts, and their comparison with Santaló regions.
//!
//! `δ` is relative throughout: a cut removes the cap
//! `{x ∈ K : ⟨x,u⟩ ≥ a}` of volume `δ|K|` and keeps `⟨x,u⟩ ≤ a`.

use rayon::prelude::*;
use serde::Serialize;

use crate::bodies::lp::{maximize, LpOutcome};
use crate::bodies::ConvexBody;
use crate::error::{GeomError, Result};
use crate::linalg::{Matrix, Vector};
use crate::quadrature::sphere_rule;
use crate::santalo::{
    test_directions, InclusionReport, SantaloRegion, SantaloSolution, Violation,
};
use crate::quadrature::SphereRule;
use crate::special::unit_ball_volume;

/// `δ` below which the smooth-body inclusion `S(K, v_{n-1}/(2(n+1)v_nδ)) ⊆ K_δ`
/// is checked.
pub const SMOOTH_DELTA_MAX: f64 = 0.05;
/// `δ` below which the small-`δ` ball sandwich is checked.
pub const BALL_SMALL_DELTA_MAX: f64 = 0.02;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta < 0.5 {
        Ok(())
    } else {
        Err(GeomError::Domain(format!("delta = {delta} must lie in (0, 1/2)")))
    }
}

/// `a` with `|{x ∈ K : ⟨x,u⟩ ≥ a}| = δ|K|`, by bisection on the cap volume.
pub fn cut_height(body: &ConvexBody, u: &[f64], delta: f64) -> Result<f64> {
    check_delta(delta)?;
    let target = delta * body.volume();
    let minus: Vec<f64> = u.iter().map(|x| -x).collect();
    let mut lo = -body.support(&minus);
    let mut hi = body.support(u);
    let tol = 1e-14 * body.diameter();
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let v = body.cap_volume(u, mid);
        if !v.is_finite() {
            return Err(GeomError::Internal(format!("cap volume {v} at height {mid}")));
        }
        if v > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Default cut directions: 256 for `n = 2`, about 1024 otherwise.
pub fn default_directions(n: usize) -> Result<Vec<Vec<f64>>> {
    crate::check_dim(n)?;
    if n == 2 {
        return Ok((0..256)
            .map(|k| {
                let th = 2.0 * std::f64::consts::PI * k as f64 / 256.0;
                vec![th.cos(), th.sin()]
            })
            .collect());
    }
    test_directions(n, 1024)
}

/// Outer approximation `{x ∈ K : ⟨x,u_i⟩ ≤ a_δ^{u_i}}` of `K_δ`.
#[derive(Debug, Clone)]
pub struct FloatingBodyQuery {
    body: ConvexBody,
    delta: f64,
    directions: Vec<Vec<f64>>,
    heights: Vec<f64>,
}

impl FloatingBodyQuery {
    /// Cuts along `directions` and their antipodes.
    pub fn new(body: &ConvexBody, delta: f64, directions: &[Vec<f64>]) -> Result<Self> {
        check_delta(delta)?;
        let n = body.dim();
        let mut dirs: Vec<Vec<f64>> = Vec::with_capacity(2 * directions.len());
        for u in directions {
            let norm = u.iter().map(|x| x * x).sum::<f64>().sqrt();
            if u.len() != n || !(norm > 0.0) {
                return Err(GeomError::Domain("cut direction must be a nonzero vector of the body's dimension".into()));
            }
            let u: Vec<f64> = u.iter().map(|x| x / norm).collect();
            for cand in [u.clone(), u.iter().map(|x| -x).collect()] {
                if !dirs.iter().any(|d| d.iter().zip(&cand).all(|(a, b)| (a - b).abs() < 1e-14)) {
                    dirs.push(cand);
                }
            }
        }
        let heights = dirs
            .par_iter()
            .map(|u| cut_height(body, u, delta))
            .collect::<Result<Vec<f64>>>()?;
        Ok(FloatingBodyQuery { body: body.clone(), delta, directions: dirs, heights })
    }

    pub fn with_default_directions(body: &ConvexBody, delta: f64) -> Result<Self> {
        Self::new(body, delta, &default_directions(body.dim())?)
    }

    pub fn body(&self) -> &ConvexBody {
        &self.body
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn directions(&self) -> &[Vec<f64>] {
        &self.directions
    }

    /// `a_δ^{u_i}` in the order of [`Self::directions`].
    pub fn heights(&self) -> &[f64] {
        &self.heights
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.body.contains(x, 0.0)
            && self.directions.iter().zip(&self.heights).all(|(u, a)| dot(x, u) <= *a)
    }

    /// Exact radial function of the approximation about an interior `center`.
    pub fn radial(&self, center: &[f64], u: &[f64]) -> Result<f64> {
        if !self.contains(center) {
            return Err(GeomError::Domain("centre lies outside the floating body approximation".into()));
        }
        let mut rho = self.body.radial(center, u);
        for (v, a) in self.directions.iter().zip(&self.heights) {
            let rate = dot(v, u);
            if rate > 0.0 {
                rho = rho.min((a - dot(v, center)) / rate);
            }
        }
        Ok(rho.max(0.0))
    }

    /// Point of the approximation maximizing the smallest cut slack, or
    /// `None` when the approximation has empty interior.
    pub fn deepest_point(&self) -> Option<Vector> {
        let n = self.body.dim();
        let start = self.body.interior_point().clone();
        let mut rows: Vec<(Vec<f64>, f64)> = self
            .directions
            .iter()
            .zip(&self.heights)
            .map(|(u, a)| (u.clone(), *a))
            .collect();
        if let Some((normals, offsets)) = self.body.facets() {
            rows.extend(normals.iter().zip(offsets).map(|(u, b)| (u.as_slice().to_vec(), *b)));
        }
        // variables (y, s) with x = start + y: ⟨u,x⟩ - a ≤ s0 + s, s ≥ -s0 - diam
        let s0 = rows
            .iter()
            .map(|(u, a)| dot(u, start.as_slice()) - a)
            .fold(0.0f64, f64::max)
            + 1.0;
        let diam = self.body.diameter();
        let m = rows.len() + 1;
        let mut a = Matrix::zeros(m, n + 1);
        let mut b = Vector::zeros(m);
        for (i, (u, off)) in rows.iter().enumerate() {
            for k in 0..n {
                a[(i, k)] = u[k];
            }
            a[(i, n)] = -1.0;
            b[i] = off - dot(u, start.as_slice()) + s0;
        }
        a[(m - 1, n)] = -1.0;
        b[m - 1] = s0 + diam;
        let mut c = Vector::zeros(n + 1);
        c[n] = -1.0;
        match maximize(&c, &a, &b) {
            LpOutcome::Optimal { point, .. } => {
                let slack = -(s0 + point[n]);
                let x = start + point.rows(0, n);
                (slack > 1e-12 * diam).then_some(x)
            }
            _ => None,
        }
    }
}

/// `|{x ∈ K : ⟨x - c, u⟩ ≥ 0}| / |K|` with `c` the centroid.
pub fn lemma8_ratio(body: &ConvexBody, u: &[f64]) -> f64 {
    let c = body.centroid();
    body.cap_volume(u, dot(c.as_slice(), u)) / body.volume()
}

/// Outcome of the floating-body comparisons for one `δ`.
#[derive(Debug, Clone, Serialize)]
pub struct FloatingReport {
    pub delta: f64,
    /// `K_δ ⊆ S(K, 1/(4δ(1-δ)))`
    pub general: InclusionReport,
    /// `S(K, v_{n-1}/(2(n+1)v_nδ)) ⊆ K_δ` for smooth bodies and small `δ`
    pub smooth: InclusionReport,
    /// Ball sandwiches: small-`δ` lower and upper, then near-½ lower and upper.
    pub ball: Vec<InclusionReport>,
}

impl FloatingReport {
    pub fn passed(&self) -> bool {
        self.general.passed() && self.smooth.passed() && self.ball.iter().all(|r| r.passed())
    }

    pub fn reports(&self) -> Vec<&InclusionReport> {
        let mut out = vec![&self.general, &self.smooth];
        out.extend(self.ball.iter());
        out
    }
}

/// Direction from `x₀` to a boundary point of the floating body, its
/// distance, and the scaled region radial in that direction.
type ExcessRow = (Vec<f64>, f64, f64);

/// Region for `t`, or `None` when `t` is below the minimal product.
fn region_or_empty(
    body: &ConvexBody,
    t: f64,
    solution: &SantaloSolution,
    rule: &SphereRule,
) -> Result<Option<SantaloRegion>> {
    match SantaloRegion::new(body, t, solution, rule) {
        Ok(r) => Ok(Some(r)),
        Err(GeomError::EmptyRegion { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

/// `K_δ ⊆ c·S` about `x₀`, comparing boundary points of the cut
/// approximation against the radial function of the region.
fn floating_in_region(
    label: &str,
    q: &FloatingBodyQuery,
    region: Option<&SantaloRegion>,
    scale: f64,
    dirs: &[Vec<f64>],
    tol: f64,
    bisect_tol: f64,
) -> Result<InclusionReport> {
    let x0 = match region {
        Some(r) => r.center(),
        None => q.body().interior_point().clone(),
    };
    let center = if q.contains(x0.as_slice()) {
        Some(x0.clone())
    } else {
        q.deepest_point()
    };
    let Some(center) = center else {
        let mut rep = InclusionReport::skipped(label, "floating body approximation is empty");
        rep.directions = dirs.len();
        rep.tol = tol;
        return Ok(rep);
    };
    let Some(region) = region else {
        return Ok(InclusionReport {
            label: label.into(),
            directions: 1,
            tol,
            worst_margin: f64::INFINITY,
            violations: vec![Violation {
                direction: center.as_slice().to_vec(),
                inner: 0.0,
                outer: f64::NEG_INFINITY,
                margin: f64::INFINITY,
            }],
            skipped: None,
        });
    };
    let rows: Vec<Result<Option<ExcessRow>>> = dirs
        .par_iter()
        .map(|u| {
            let rho = q.radial(center.as_slice(), u)?;
            let p = &center + Vector::from_column_slice(u) * rho;
            let d = &p - &x0;
            let dist = d.norm();
            if dist <= 1e-15 {
                return Ok(None);
            }
            let dir = d / dist;
            let outer = scale * region.radial(dir.as_slice(), bisect_tol)?;
            Ok(Some((dir.as_slice().to_vec(), dist, outer)))
        })
        .collect();
    let mut worst = f64::NEG_INFINITY;
    let mut violations = Vec::new();
    for r in rows {
        if let Some((dir, inner, outer)) = r? {
            let margin = inner - outer;
            worst = worst.max(margin);
            if margin > tol {
                violations.push(Violation { direction: dir, inner, outer, margin });
            }
        }
    }
    Ok(InclusionReport {
        label: label.into(),
        directions: dirs.len(),
        tol,
        worst_margin: worst,
        violations,
        skipped: None,
    })
}

/// `S ⊆ c·K_δ` about `x₀`.
fn region_in_floating(
    label: &str,
    region: Option<&SantaloRegion>,
    q: &FloatingBodyQuery,
    scale: f64,
    dirs: &[Vec<f64>],
    tol: f64,
    bisect_tol: f64,
) -> Result<InclusionReport> {
    let Some(region) = region else {
        let mut rep = InclusionReport::skipped(label, "Santaló region is empty");
        rep.directions = dirs.len();
        rep.tol = tol;
        return Ok(rep);
    };
    let x0 = region.center();
    if !q.contains(x0.as_slice()) {
        return Ok(InclusionReport {
            label: label.into(),
            directions: 1,
            tol,
            worst_margin: f64::INFINITY,
            violations: vec![Violation {
                direction: x0.as_slice().to_vec(),
                inner: 0.0,
                outer: f64::NEG_INFINITY,
                margin: f64::INFINITY,
            }],
            skipped: None,
        });
    }
    crate::santalo::verify_inclusion(
        label,
        |u| region.radial(u, bisect_tol),
        |u| Ok(scale * q.radial(x0.as_slice(), u)?),
        dirs,
        tol,
    )
}

/// Floating-body versus Santaló-region inclusions at the given directions,
/// with tolerance `tol` on radial values.
pub fn inclusion_report(
    body: &ConvexBody,
    solution: &SantaloSolution,
    rule: &SphereRule,
    delta: f64,
    dirs: &[Vec<f64>],
    tol: f64,
) -> Result<FloatingReport> {
    check_delta(delta)?;
    let n = body.dim();
    let nf = n as f64;
    let vn = unit_ball_volume(n);
    let vn1 = unit_ball_volume(n - 1);
    let bisect_tol = 1e-3 * tol;
    let mut cut_dirs = default_directions(n)?;
    cut_dirs.extend(dirs.iter().cloned());
    let q = FloatingBodyQuery::new(body, delta, &cut_dirs)?;

    let t_general = 1.0 / (4.0 * delta * (1.0 - delta));
    let general_region = region_or_empty(body, t_general, solution, rule)?;
    let general = floating_in_region(
        "floating body inside S(K, 1/(4δ(1-δ)))",
        &q,
        general_region.as_ref(),
        1.0,
        dirs,
        tol,
        bisect_tol,
    )?;

    let smooth_label = "S(K, v_{n-1}/(2(n+1)v_nδ)) inside floating body";
    let smooth = if !body.is_smooth() {
        InclusionReport::skipped(smooth_label, "boundary is not smooth")
    } else if delta > SMOOTH_DELTA_MAX {
        InclusionReport::skipped(smooth_label, "δ above the small-δ range")
    } else {
        let t = vn1 / (2.0 * (nf + 1.0) * vn * delta);
        let region = region_or_empty(body, t, solution, rule)?;
        region_in_floating(smooth_label, region.as_ref(), &q, 1.0, dirs, tol, bisect_tol)?
    };

    let mut ball = Vec::new();
    if let Some((center, _)) = body.ball_form() {
        let e = std::f64::consts::E;
        if delta <= BALL_SMALL_DELTA_MAX {
            let t_lo = vn1 / (e.sqrt() * delta * (nf + 1.0) * vn);
            let t_hi = e.sqrt().powf((nf + 1.0) / 2.0) * vn1 / (delta * (nf + 1.0) * vn);
            let lo = region_or_empty(body, t_lo, solution, rule)?;
            ball.push(region_in_floating(
                "ball: small-δ lower region inside floating body",
                lo.as_ref(),
                &q,
                1.0,
                dirs,
                tol,
                bisect_tol,
            )?);
            let hi = region_or_empty(body, t_hi, solution, rule)?;
            ball.push(floating_in_region(
                "ball: floating body inside small-δ upper region",
                &q,
                hi.as_ref(),
                1.0,
                dirs,
                tol,
                bisect_tol,
            )?);
        }
        if delta >= 0.5 - vn1 / ((nf * e).sqrt() * vn) {
            let scale = 8.0 / (nf + 1.0).sqrt() * vn1 / vn;
            let reg = region_or_empty(body, t_general, solution, rule)?;
            debug_assert!(center.len() == n);
            ball.push(floating_in_region(
                "ball: near-½ floating body inside region",
                &q,
                reg.as_ref(),
                1.0,
                dirs,
                tol,
                bisect_tol,
            )?);
            ball.push(region_in_floating(
                "ball: near-½ region inside scaled floating body",
                reg.as_ref(),
                &q,
                scale,
                dirs,
                tol,
                bisect_tol,
            )?);
        }
    }
    Ok(FloatingReport { delta, general, smooth, ball })
}

/// [`inclusion_report`] with the default rule, 64 directions and
/// tolerance `1e-6·diam`.
pub fn inclusion_report_default(body: &ConvexBody, delta: f64) -> Result<FloatingReport> {
    let n = body.dim();
    let rule = sphere_rule(n, crate::quadrature::default_level(n))?;
    let sol = crate::santalo::santalo_point(body, &rule, crate::santalo::DEFAULT_TOL)?;
    let dirs = test_directions(n, 64)?;
    inclusion_report(body, &sol, &rule, delta, &dirs, 1e-6 * body.diameter())
}
