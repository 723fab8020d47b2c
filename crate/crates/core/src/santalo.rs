//! Santaló point, volume product and Santaló regions
//! `S(K, t) = {x ∈ K : |K||K^x| / v_n² ≤ t}`.
//!
//! The solver minimizes `F(x) = ∫ (h_K(u) - ⟨u,x⟩)^{-n} dσ(u) = n|K^x|` by
//! damped Newton on a precomputed table of support values. Region queries
//! evaluate `|K^x|` along rays from the Santaló point `x₀`: when the polar
//! body `K^{x₀}` has exact sections (ellipsoids in any dimension, polytopes
//! for `n ≤ 3`) the one-dimensional section integral is used, otherwise the
//! spherical formula on the support table.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::bodies::{ConvexBody, Direction};
use crate::error::{GeomError, Result};
use crate::linalg::{matrix_to_rows, solve, symmetrize, Matrix, Vector};
use crate::polar::{polar_volume_section, POLE_GAP};
use crate::quadrature::{default_level, sphere_rule, RuleDescriptor, Sampler, SphereRule};
use crate::special::unit_ball_volume;

/// Default relative gradient tolerance `‖∇F‖ ≤ tol·F`.
pub const DEFAULT_TOL: f64 = 1e-10;
pub const MAX_NEWTON_ITERATIONS: usize = 100;
/// `t` within this distance of the minimal product gives the point region.
pub const DEGENERATE_GAP: f64 = 1e-12;

const CHUNK: usize = 512;

/// Support values `h_K(u_i)` at the nodes of a sphere rule.
#[derive(Debug, Clone)]
pub struct SupportTable {
    rule: Arc<SphereRule>,
    h: Vec<f64>,
    dim: usize,
}

impl SupportTable {
    pub fn new(body: &ConvexBody, rule: Arc<SphereRule>) -> Result<Self> {
        if rule.dim() != body.dim() {
            return Err(GeomError::Domain("sphere rule and body dimensions differ".into()));
        }
        let h = (0..rule.len())
            .into_par_iter()
            .with_min_len(256)
            .map(|i| body.support(rule.node(i)))
            .collect();
        Ok(SupportTable { dim: body.dim(), rule, h })
    }

    pub fn rule(&self) -> &SphereRule {
        &self.rule
    }

    /// Smallest `h_K(u_i) - ⟨u_i, x⟩` over the nodes.
    pub fn min_gap(&self, x: &[f64]) -> f64 {
        (0..self.h.len())
            .map(|i| self.gap(i, x))
            .fold(f64::INFINITY, f64::min)
    }

    fn gap(&self, i: usize, x: &[f64]) -> f64 {
        let u = self.rule.node(i);
        self.h[i] - u.iter().zip(x).map(|(a, b)| a * b).sum::<f64>()
    }

    fn pole(&self, i: usize, x: &[f64]) -> GeomError {
        GeomError::Pole(format!(
            "h_K(u) - ⟨u,x⟩ = {:e} at node {i} {:?} for x = {x:?}",
            self.gap(i, x),
            self.rule.node(i)
        ))
    }

    /// `F(x) = Σ w_i g_i^{-n}`, `g_i = h_K(u_i) - ⟨u_i,x⟩`.
    pub fn value(&self, x: &[f64]) -> Result<f64> {
        let n = self.dim as i32;
        let parts: Vec<std::result::Result<f64, usize>> = (0..self.h.len())
            .into_par_iter()
            .chunks(CHUNK)
            .map(|idx| {
                let mut s = 0.0;
                for i in idx {
                    let g = self.gap(i, x);
                    if g <= POLE_GAP {
                        return Err(i);
                    }
                    s += self.rule.weight(i) * g.powi(-n);
                }
                Ok(s)
            })
            .collect();
        let mut total = 0.0;
        for p in parts {
            total += p.map_err(|i| self.pole(i, x))?;
        }
        Ok(total)
    }

    /// `F`, `∇F = n Σ w u g^{-(n+1)}` and `∇²F = n(n+1) Σ w uuᵀ g^{-(n+2)}`.
    pub fn value_gradient_hessian(&self, x: &[f64]) -> Result<(f64, Vector, Matrix)> {
        let n = self.dim;
        let ni = n as i32;
        type Acc = (f64, Vector, Matrix);
        let parts: Vec<std::result::Result<Acc, usize>> = (0..self.h.len())
            .into_par_iter()
            .chunks(CHUNK)
            .map(|idx| {
                let mut f = 0.0;
                let mut g = Vector::zeros(n);
                let mut hm = Matrix::zeros(n, n);
                for i in idx {
                    let gap = self.gap(i, x);
                    if gap <= POLE_GAP {
                        return Err(i);
                    }
                    let w = self.rule.weight(i);
                    let u = self.rule.node(i);
                    let p = gap.powi(-ni);
                    f += w * p;
                    let c1 = w * p / gap;
                    let c2 = c1 / gap;
                    for a in 0..n {
                        g[a] += c1 * u[a];
                        for b in a..n {
                            hm[(a, b)] += c2 * u[a] * u[b];
                        }
                    }
                }
                Ok((f, g, hm))
            })
            .collect();
        let mut f = 0.0;
        let mut g = Vector::zeros(n);
        let mut hm = Matrix::zeros(n, n);
        for p in parts {
            let (pf, pg, ph) = p.map_err(|i| self.pole(i, x))?;
            f += pf;
            g += pg;
            hm += ph;
        }
        for a in 0..n {
            for b in 0..a {
                hm[(a, b)] = hm[(b, a)];
            }
        }
        let nf = n as f64;
        Ok((f, g * nf, hm * (nf * (nf + 1.0))))
    }

    pub fn gradient(&self, x: &[f64]) -> Result<Vector> {
        Ok(self.value_gradient_hessian(x)?.1)
    }
}

/// Output of the Santaló-point solver.
#[derive(Debug, Clone, Serialize)]
pub struct SantaloSolution {
    pub x0: Vec<f64>,
    /// `F(x₀)`; the polar volume is `F(x₀)/n`.
    pub f_min: f64,
    pub polar_volume: f64,
    pub iterations: usize,
    pub gradient_norm: f64,
    pub rule: RuleDescriptor,
}

impl SantaloSolution {
    pub fn x0_vector(&self) -> Vector {
        Vector::from_column_slice(&self.x0)
    }
}

/// Damped Newton from the centroid, stopping at `‖∇F‖ ≤ tol·F`.
pub fn santalo_point(body: &ConvexBody, rule: &SphereRule, tol: f64) -> Result<SantaloSolution> {
    let table = SupportTable::new(body, Arc::new(rule.clone()))?;
    santalo_point_with_table(body, &table, tol)
}

/// [`santalo_point`] with the default rule and tolerance.
pub fn santalo_point_default(body: &ConvexBody) -> Result<SantaloSolution> {
    let rule = sphere_rule(body.dim(), default_level(body.dim()))?;
    santalo_point(body, &rule, DEFAULT_TOL)
}

pub fn santalo_point_with_table(
    body: &ConvexBody,
    table: &SupportTable,
    tol: f64,
) -> Result<SantaloSolution> {
    let n = body.dim();
    let mut x = body.centroid();
    if !body.contains(x.as_slice(), 0.0) || table.min_gap(x.as_slice()) <= POLE_GAP {
        x = body.interior_point().clone();
    }
    let mut last_norm = f64::INFINITY;
    for it in 0..=MAX_NEWTON_ITERATIONS {
        let (f, g, h) = table.value_gradient_hessian(x.as_slice())?;
        let gn = g.norm();
        last_norm = gn;
        if gn <= tol * f {
            return Ok(SantaloSolution {
                x0: x.as_slice().to_vec(),
                f_min: f,
                polar_volume: f / n as f64,
                iterations: it,
                gradient_norm: gn,
                rule: table.rule().descriptor(),
            });
        }
        if it == MAX_NEWTON_ITERATIONS {
            break;
        }
        let step = match solve(h.clone(), &(-&g)) {
            Some(s) if s.dot(&g) < 0.0 => s,
            _ => -&g / h.trace(),
        };
        let slope = step.dot(&g);
        let mut alpha = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let cand = &x + &step * alpha;
            if body.contains(cand.as_slice(), 0.0) && table.min_gap(cand.as_slice()) > POLE_GAP {
                if let Ok(fc) = table.value(cand.as_slice()) {
                    if fc <= f + 1e-4 * alpha * slope {
                        accepted = Some(cand);
                        break;
                    }
                }
            }
            alpha *= 0.5;
        }
        match accepted {
            Some(c) => {
                if (&c - &x).norm() <= 1e-15 * (1.0 + x.norm()) {
                    // no representable progress left: accept when the
                    // gradient is at rounding level
                    let (f2, g2, _) = table.value_gradient_hessian(c.as_slice())?;
                    if g2.norm() <= 1e3 * tol * f2 {
                        return Ok(SantaloSolution {
                            x0: c.as_slice().to_vec(),
                            f_min: f2,
                            polar_volume: f2 / n as f64,
                            iterations: it + 1,
                            gradient_norm: g2.norm(),
                            rule: table.rule().descriptor(),
                        });
                    }
                }
                x = c;
            }
            None => break,
        }
    }
    Err(GeomError::Convergence {
        iterations: MAX_NEWTON_ITERATIONS,
        gradient_norm: last_norm,
        last: x.as_slice().to_vec(),
    })
}

/// `|K^{x₀}|`, exact when the polar body has an exact volume.
pub fn polar_volume_at_solution(body: &ConvexBody, sol: &SantaloSolution) -> Result<f64> {
    if body.has_exact_sections() {
        Ok(body.polar(&sol.x0_vector())?.volume())
    } else {
        Ok(sol.polar_volume)
    }
}

/// `|K||K^{x₀}| / v_n²`.
pub fn volume_product(body: &ConvexBody, sol: &SantaloSolution) -> Result<f64> {
    let vn = unit_ball_volume(body.dim());
    Ok(body.volume() * polar_volume_at_solution(body, sol)? / (vn * vn))
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct CentroidResidual {
    pub residual: f64,
    pub std_error: f64,
    pub accepted: usize,
}

/// `‖centroid((K - x)^0)‖` by uniform sampling of the polar body.
pub fn polar_centroid_residual(
    body: &ConvexBody,
    x: &[f64],
    sampler: &Sampler,
    samples: usize,
) -> Result<CentroidResidual> {
    let n = body.dim();
    let polar = body.polar(&Vector::from_column_slice(x))?;
    let (lo, hi) = polar.bounding_box();
    let mut rng = sampler.clone();
    let mut sum = Vector::zeros(n);
    let mut sum_sq = Vector::zeros(n);
    let mut count = 0usize;
    let mut y = vec![0.0; n];
    for _ in 0..samples {
        for k in 0..n {
            y[k] = rng.uniform_in(lo[k], hi[k]);
        }
        if polar.contains(&y, 0.0) {
            count += 1;
            for k in 0..n {
                sum[k] += y[k];
                sum_sq[k] += y[k] * y[k];
            }
        }
    }
    if count < 2 {
        return Err(GeomError::Accuracy { value: f64::NAN, std_error: f64::INFINITY, requested: 0.0 });
    }
    let c = count as f64;
    let mean = &sum / c;
    let var: f64 = (0..n).map(|k| (sum_sq[k] / c - mean[k] * mean[k]).max(0.0)).sum::<f64>();
    Ok(CentroidResidual {
        residual: mean.norm(),
        std_error: (var / (c - 1.0)).sqrt(),
        accepted: count,
    })
}

/// How `|K^x|` is evaluated inside a region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionRoute {
    Section,
    Spherical,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Membership {
    pub inside: bool,
    /// `x` was on or outside `∂K`, or too close for the pole guard.
    pub pole: bool,
    pub polar_volume: Option<f64>,
}

/// Handle on `S(K, t)` exposing membership, radial function and volume.
#[derive(Debug, Clone)]
pub struct SantaloRegion {
    body: ConvexBody,
    t: f64,
    solution: SantaloSolution,
    product: f64,
    threshold: f64,
    route: RegionRoute,
    polar0: Option<ConvexBody>,
    table: SupportTable,
    degenerate: bool,
}

impl SantaloRegion {
    /// Region on the default route (section when available).
    pub fn new(body: &ConvexBody, t: f64, solution: &SantaloSolution, rule: &SphereRule) -> Result<Self> {
        let route = if body.has_exact_sections() { RegionRoute::Section } else { RegionRoute::Spherical };
        Self::with_route(body, t, solution, rule, route)
    }

    /// Solves for the Santaló point with the default rule first.
    pub fn from_body(body: &ConvexBody, t: f64) -> Result<Self> {
        let rule = sphere_rule(body.dim(), default_level(body.dim()))?;
        let sol = santalo_point(body, &rule, DEFAULT_TOL)?;
        Self::new(body, t, &sol, &rule)
    }

    pub fn with_route(
        body: &ConvexBody,
        t: f64,
        solution: &SantaloSolution,
        rule: &SphereRule,
        route: RegionRoute,
    ) -> Result<Self> {
        let n = body.dim();
        let x0 = solution.x0_vector();
        let table = SupportTable::new(body, Arc::new(rule.clone()))?;
        let (polar0, polar_at_x0) = match route {
            RegionRoute::Section => {
                if !body.has_exact_sections() {
                    return Err(GeomError::Unsupported(
                        "section route needs exact sections of the polar body".into(),
                    ));
                }
                let p = body.polar(&x0)?;
                let v = p.volume();
                (Some(p), v)
            }
            RegionRoute::Spherical => (None, table.value(x0.as_slice())? / n as f64),
        };
        let vn = unit_ball_volume(n);
        let volume = body.volume();
        let product = volume * polar_at_x0 / (vn * vn);
        if !t.is_finite() || t < product - DEGENERATE_GAP {
            return Err(GeomError::EmptyRegion { t, minimum: product });
        }
        Ok(SantaloRegion {
            body: body.clone(),
            t,
            solution: solution.clone(),
            product,
            threshold: t * vn * vn / volume,
            route,
            polar0,
            table,
            degenerate: (t - product).abs() <= DEGENERATE_GAP,
        })
    }

    pub fn body(&self) -> &ConvexBody {
        &self.body
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn solution(&self) -> &SantaloSolution {
        &self.solution
    }

    pub fn center(&self) -> Vector {
        self.solution.x0_vector()
    }

    /// `|K||K^{x₀}| / v_n²` on this region's route.
    pub fn minimal_product(&self) -> f64 {
        self.product
    }

    /// Cut-off `t·v_n²/|K|` on `|K^x|`.
    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn route(&self) -> RegionRoute {
        self.route
    }

    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    /// `|K^x|` on the region's route.
    pub fn polar_volume(&self, x: &[f64]) -> Result<f64> {
        match (&self.route, &self.polar0) {
            (RegionRoute::Section, Some(polar)) => {
                let d = Vector::from_column_slice(x) - self.center();
                let lambda = d.norm();
                if lambda == 0.0 {
                    return Ok(polar.volume());
                }
                if !self.body.contains(x, 0.0) {
                    return Err(GeomError::Pole("point lies outside the body".into()));
                }
                let u = Direction::normalized(d.as_slice())?;
                Ok(polar_volume_section(&polar.section_profile(&u), lambda)?.value)
            }
            _ => {
                if !self.body.contains(x, 0.0) {
                    return Err(GeomError::Pole("point lies outside the body".into()));
                }
                Ok(self.table.value(x)? / self.body.dim() as f64)
            }
        }
    }

    pub fn membership(&self, x: &[f64]) -> Membership {
        if self.degenerate {
            let d = (Vector::from_column_slice(x) - self.center()).norm();
            return Membership {
                inside: d <= 1e-12 * self.body.diameter(),
                pole: false,
                polar_volume: None,
            };
        }
        match self.polar_volume(x) {
            Ok(v) => Membership {
                inside: v <= self.threshold * (1.0 + 1e-9),
                pole: false,
                polar_volume: Some(v),
            },
            Err(_) => Membership { inside: false, pole: true, polar_volume: None },
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.membership(x).inside
    }

    /// Default bisection tolerance `1e-8·diam(K)`.
    pub fn default_tol(&self) -> f64 {
        1e-8 * self.body.diameter()
    }

    /// `ρ` with `x₀ + ρu ∈ ∂S(K,t)`: Illinois steps on `ln(|K^{x₀+ρu}|/threshold)`
    /// over `[0, ρ_K(u))`, bisection while the upper end is a pole or the
    /// bracket stalls; a pole counts as outside.
    pub fn radial(&self, u: &[f64], tol: f64) -> Result<f64> {
        if self.degenerate {
            return Ok(0.0);
        }
        let x0 = self.center();
        let mut hi = self.body.radial(x0.as_slice(), u);
        let mut lo = 0.0;
        let ln_thr = self.threshold.ln();
        let excess: Box<dyn Fn(f64) -> Option<f64>> = match (&self.route, &self.polar0) {
            (RegionRoute::Section, Some(polar)) => {
                let dir = Direction::normalized(u)?;
                let profile = polar.section_profile(&dir);
                Box::new(move |rho| {
                    polar_volume_section(&profile, rho)
                        .ok()
                        .filter(|r| r.value.is_finite() && r.value > 0.0)
                        .map(|r| r.value.ln() - ln_thr)
                })
            }
            _ => Box::new(|rho| {
                let x: Vec<f64> = x0.iter().zip(u).map(|(a, b)| a + rho * b).collect();
                self.table
                    .value(&x)
                    .ok()
                    .map(|f| (f / self.body.dim() as f64).ln() - ln_thr)
            }),
        };
        let tol = tol.max(1e-15 * hi);
        let mut f_lo = excess(0.0).unwrap_or(0.0).min(0.0);
        let mut f_hi: Option<f64> = None;
        let mut side = 0i8;
        let mut width = hi - lo;
        let mut stalls = 0;
        while hi - lo > tol {
            let mut c = 0.5 * (lo + hi);
            if let Some(fh) = f_hi {
                if stalls < 2 && fh > f_lo {
                    let sec = lo - f_lo * (hi - lo) / (fh - f_lo);
                    c = sec.clamp(lo + 0.5 * tol, hi - 0.5 * tol);
                }
            }
            match excess(c) {
                Some(e) if e <= 0.0 => {
                    lo = c;
                    f_lo = e;
                    if side == -1 {
                        f_hi = f_hi.map(|v| 0.5 * v);
                    }
                    side = -1;
                }
                Some(e) => {
                    hi = c;
                    f_hi = Some(e);
                    if side == 1 {
                        f_lo *= 0.5;
                    }
                    side = 1;
                }
                None => {
                    hi = c;
                    f_hi = None;
                    side = 1;
                }
            }
            if hi - lo > 0.5 * width {
                stalls += 1;
            } else {
                stalls = 0;
                width = hi - lo;
            }
            if stalls > 2 {
                stalls = 0;
                width = hi - lo;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// `|S(K,t)| = (1/n) ∫ ρ(u)ⁿ dσ(u)`.
    pub fn volume(&self, rule: &SphereRule, tol: f64) -> Result<f64> {
        if self.degenerate {
            return Ok(0.0);
        }
        let n = self.body.dim();
        let radii: Vec<Result<f64>> = (0..rule.len())
            .into_par_iter()
            .map(|i| self.radial(rule.node(i), tol))
            .collect();
        let mut sum = 0.0;
        for (i, r) in radii.into_iter().enumerate() {
            sum += rule.weight(i) * r?.powi(n as i32);
        }
        Ok(sum / n as f64)
    }

    /// `|K| - |S(K,t)| = (1/n) ∫ (ρ_Kⁿ - ρⁿ) dσ`. For `n = 2` the angle
    /// integral is adaptive with breaks at the vertex directions of `K`
    /// (`rule` unused); otherwise `rule` is applied.
    pub fn volume_deficit(&self, rule: &SphereRule, tol: f64) -> Result<f64> {
        if self.degenerate {
            return Ok(self.body.volume());
        }
        let n = self.body.dim();
        let x0 = self.center();
        let gap = |u: &[f64]| -> Result<f64> {
            let rk = self.body.radial(x0.as_slice(), u);
            let rs = self.radial(u, tol)?;
            Ok((rk.powi(n as i32) - rs.powi(n as i32)) / n as f64)
        };
        if n == 2 {
            let two_pi = 2.0 * std::f64::consts::PI;
            let mut cuts = vec![0.0, two_pi];
            if let Some(vs) = self.body.vertices() {
                for v in vs {
                    let th = (v[1] - x0[1]).atan2(v[0] - x0[0]).rem_euclid(two_pi);
                    cuts.push(th);
                }
            }
            cuts.sort_by(|a, b| a.total_cmp(b));
            cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
            let abs_tol = 1e-13 * self.body.volume();
            let parts = cuts
                .par_windows(2)
                .map(|w| {
                    let failure = std::sync::Mutex::new(None);
                    let res = crate::quadrature::integrate_adaptive(
                        |th| match gap(&[th.cos(), th.sin()]) {
                            Ok(v) => v,
                            Err(e) => {
                                failure.lock().unwrap().get_or_insert(e);
                                0.0
                            }
                        },
                        w[0],
                        w[1],
                        &[],
                        abs_tol,
                        1e-10,
                        2000,
                    )?;
                    match failure.into_inner().unwrap() {
                        Some(e) => Err(e),
                        None => Ok(res.value),
                    }
                })
                .collect::<Result<Vec<f64>>>()?;
            return Ok(parts.iter().sum());
        }
        let parts = (0..rule.len())
            .into_par_iter()
            .map(|i| Ok(rule.weight(i) * gap(rule.node(i))?))
            .collect::<Result<Vec<f64>>>()?;
        Ok(parts.iter().sum())
    }
}

/// Matrix `M` of the Binet ellipsoid, `‖u‖²_E = uᵀMu`.
#[derive(Debug, Clone)]
pub struct BinetMatrix {
    pub m: Matrix,
}

impl Serialize for BinetMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        matrix_to_rows(&self.m).serialize(s)
    }
}

impl BinetMatrix {
    pub fn norm(&self, u: &[f64]) -> f64 {
        let v = Vector::from_column_slice(u);
        v.dot(&(&self.m * &v)).sqrt()
    }

    /// Radial function of `E = {x : xᵀMx ≤ 1}` at a unit vector.
    pub fn radial(&self, u: &[f64]) -> f64 {
        1.0 / self.norm(u)
    }
}

/// `(1/|K|) ∫_K (x-c)(x-c)ᵀ dx`.
pub fn binet_matrix(body: &ConvexBody, center: &Vector) -> Result<BinetMatrix> {
    let m = symmetrize(&body.second_moment(center));
    if m.clone().cholesky().is_none() {
        return Err(GeomError::Internal("second-moment matrix is not positive definite".into()));
    }
    Ok(BinetMatrix { m })
}

/// Binet matrix of the polar body `K^{x₀}` about its own origin.
pub fn polar_binet(body: &ConvexBody, x0: &Vector) -> Result<BinetMatrix> {
    let polar = body.polar(x0)?;
    binet_matrix(&polar, &Vector::zeros(body.dim()))
}

/// Scale factors of the ellipsoid and body sandwiches of `S(K,t)`, with
/// `p = |K||K^{x₀}|/v_n²`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SandwichConstants {
    pub p: f64,
    pub t: f64,
    pub d_n_t: f64,
    pub c_n_t: f64,
    pub c_prime_n_t: f64,
    pub theorem9_inner: f64,
    pub theorem9_outer_general: f64,
    pub theorem9_outer_symmetric: f64,
    /// `(6t/p)^{1/2}`
    pub banach_mazur_bound: f64,
}

pub fn sandwich_constants(n: usize, p: f64, t: f64) -> Result<SandwichConstants> {
    crate::check_dim(n)?;
    if !(p > 0.0) || t < p - DEGENERATE_GAP {
        return Err(GeomError::Domain(format!("t = {t} is below the volume product {p}")));
    }
    let nf = n as f64;
    let q = (p / t).min(1.0);
    let e = std::f64::consts::E;
    let gap = (1.0 - q).sqrt();
    let first = (2.0 / ((nf + 1.0) * (nf + 2.0))).sqrt() * (t / p).sqrt() * gap;
    let second = 2f64.sqrt() * (1.0 - q.powf(1.0 / nf)).sqrt();
    Ok(SandwichConstants {
        p,
        t,
        d_n_t: gap / (3f64.sqrt() * nf),
        c_n_t: first.min(second),
        c_prime_n_t: 2.0 * 2f64.sqrt() / ((e - 2.0) * (nf + 1.0) * (nf + 2.0)).sqrt()
            * (t / p).sqrt()
            * gap,
        theorem9_inner: 1.0 - q.powf(1.0 / nf),
        theorem9_outer_general: 1.0 - q / e,
        theorem9_outer_symmetric: gap,
        banach_mazur_bound: (6.0 * t / p).sqrt(),
    })
}

/// Directional checks of the ellipsoid and body sandwiches of `S(K,t)`
/// about `x₀`: the symmetric-body pair (`d_n`, `c_n`, square-root outer
/// scale) only when `K` is centrally symmetric, the general pair always.
pub fn sandwich_reports(
    region: &SantaloRegion,
    dirs: &[Vec<f64>],
    tol: f64,
) -> Result<Vec<InclusionReport>> {
    let body = region.body();
    let n = body.dim();
    let x0 = region.center();
    let c = sandwich_constants(n, region.minimal_product(), region.t())?;
    let binet = polar_binet(body, &x0)?;
    let bisect = 1e-3 * tol;
    let radii = dirs
        .par_iter()
        .map(|u| region.radial(u, bisect))
        .collect::<Result<Vec<f64>>>()?;
    let lookup = |u: &[f64]| -> Result<f64> {
        let i = dirs
            .iter()
            .position(|d| d.as_slice() == u)
            .ok_or_else(|| GeomError::Internal("direction not in the table".into()))?;
        Ok(radii[i])
    };
    let binet = &binet;
    let x0s = x0.as_slice();
    let ell = |scale: f64| move |u: &[f64]| Ok(scale * binet.radial(u));
    let kbody = |scale: f64| move |u: &[f64]| Ok(scale * body.radial(x0s, u));
    let mut out = Vec::new();
    if body.symmetry_center().is_some() {
        out.push(verify_inclusion("d_n(t)·E inside S(K,t)", ell(c.d_n_t), lookup, dirs, tol)?);
        out.push(verify_inclusion("S(K,t) inside c_n(t)·E", lookup, ell(c.c_n_t), dirs, tol)?);
        out.push(verify_inclusion(
            "S(K,t) inside (1-p/t)^{1/2}·K",
            lookup,
            kbody(c.theorem9_outer_symmetric),
            dirs,
            tol,
        )?);
    }
    out.push(verify_inclusion("d'_n(t)·E inside S(K,t)", ell(c.d_n_t), lookup, dirs, tol)?);
    out.push(verify_inclusion("S(K,t) inside c'_n(t)·E", lookup, ell(c.c_prime_n_t), dirs, tol)?);
    out.push(verify_inclusion(
        "(1-(p/t)^{1/n})·K inside S(K,t)",
        kbody(c.theorem9_inner),
        lookup,
        dirs,
        tol,
    )?);
    out.push(verify_inclusion(
        "S(K,t) inside (1-p/(e t))·K",
        lookup,
        kbody(c.theorem9_outer_general),
        dirs,
        tol,
    )?);
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct Violation {
    pub direction: Vec<f64>,
    pub inner: f64,
    pub outer: f64,
    /// `inner - outer`, positive for a violation.
    pub margin: f64,
}

/// Directional comparison of two star bodies about a common centre.
#[derive(Debug, Clone, Serialize)]
pub struct InclusionReport {
    pub label: String,
    pub directions: usize,
    pub tol: f64,
    /// Largest `inner - outer` over all directions.
    pub worst_margin: f64,
    pub violations: Vec<Violation>,
    pub skipped: Option<String>,
}

impl InclusionReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn skipped(label: &str, reason: &str) -> Self {
        InclusionReport {
            label: label.into(),
            directions: 0,
            tol: 0.0,
            worst_margin: f64::NEG_INFINITY,
            violations: Vec::new(),
            skipped: Some(reason.into()),
        }
    }
}

/// Checks `ρ_inner(u) ≤ ρ_outer(u) + tol` for every direction.
pub fn verify_inclusion<I, O>(
    label: &str,
    inner: I,
    outer: O,
    dirs: &[Vec<f64>],
    tol: f64,
) -> Result<InclusionReport>
where
    I: Fn(&[f64]) -> Result<f64> + Sync,
    O: Fn(&[f64]) -> Result<f64> + Sync,
{
    let rows: Vec<Result<(f64, f64)>> = dirs
        .par_iter()
        .map(|u| Ok((inner(u)?, outer(u)?)))
        .collect();
    let mut worst = f64::NEG_INFINITY;
    let mut violations = Vec::new();
    for (u, r) in dirs.iter().zip(rows) {
        let (a, b) = r?;
        let margin = a - b;
        worst = worst.max(margin);
        if margin > tol {
            violations.push(Violation { direction: u.clone(), inner: a, outer: b, margin });
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

/// Radial function of a convex set given by membership, by bisection on
/// `[0, hi]`.
pub fn radial_from_membership(
    contains: impl Fn(&[f64]) -> bool,
    center: &[f64],
    u: &[f64],
    hi: f64,
    tol: f64,
) -> f64 {
    let (mut lo, mut hi) = (0.0, hi);
    let mut x = vec![0.0; center.len()];
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        for k in 0..x.len() {
            x[k] = center[k] + mid * u[k];
        }
        if contains(&x) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `count` directions equally spaced in angle (`n = 2`) or the nodes of a
/// small product rule (`n ≥ 3`), closed under `u ↦ -u`.
pub fn test_directions(n: usize, count: usize) -> Result<Vec<Vec<f64>>> {
    crate::check_dim(n)?;
    if n == 2 {
        let count = count.max(2);
        return Ok((0..count)
            .map(|k| {
                let th = 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / count as f64;
                vec![th.cos(), th.sin()]
            })
            .collect());
    }
    // smallest product-rule level with at least `count` nodes
    let mut level = 1;
    loop {
        let rule = sphere_rule(n, level)?;
        if rule.len() >= count || level > 64 {
            return Ok(rule.iter().map(|(u, _)| u.to_vec()).collect());
        }
        level += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{matrix_from_rows, vector};
    use std::f64::consts::PI;

    fn rule2() -> SphereRule {
        sphere_rule(2, 256).unwrap()
    }

    #[test]
    fn ball_and_square_points() {
        let b = ConvexBody::ball(vec![0.3, -0.2], 1.5).unwrap();
        let sol = santalo_point(&b, &rule2(), DEFAULT_TOL).unwrap();
        assert!((sol.x0_vector() - vector(&[0.3, -0.2])).norm() < 1e-12);
        assert!((volume_product(&b, &sol).unwrap() - 1.0).abs() < 1e-12);
        let sq = ConvexBody::cube(2, 1.0).unwrap();
        let sol = santalo_point(&sq, &rule2(), DEFAULT_TOL).unwrap();
        assert!(sol.x0_vector().norm() < 1e-8);
        assert!((volume_product(&sq, &sol).unwrap() - 8.0 / PI / PI).abs() < 1e-10);
    }

    #[test]
    fn triangle_point_is_the_centroid() {
        // affine image of an equilateral triangle, whose Santaló point is its centre
        let tri = ConvexBody::vpolytope_from_rows(&[vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let sol = santalo_point(&tri, &sphere_rule(2, 1024).unwrap(), DEFAULT_TOL).unwrap();
        let err = (sol.x0_vector() - vector(&[1.0 / 3.0, 1.0 / 3.0])).norm();
        assert!(err < 1e-5, "{err}");
        let p = volume_product(&tri, &sol).unwrap();
        assert!((p - 27.0 / 4.0 / PI / PI).abs() < 1e-6, "{p}");
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let tri = ConvexBody::vpolytope_from_rows(&[vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let table = SupportTable::new(&tri, Arc::new(rule2())).unwrap();
        let x = [0.2, 0.3];
        let g = table.gradient(&x).unwrap();
        let h = 1e-6;
        for k in 0..2 {
            let mut p = x;
            let mut m = x;
            p[k] += h;
            m[k] -= h;
            let fd = (table.value(&p).unwrap() - table.value(&m).unwrap()) / (2.0 * h);
            assert!((fd - g[k]).abs() < 1e-6 * g.norm());
        }
    }

    #[test]
    fn disk_region() {
        let disk = ConvexBody::unit_ball(2).unwrap();
        let rule = rule2();
        let sol = santalo_point(&disk, &rule, DEFAULT_TOL).unwrap();
        let reg = SantaloRegion::new(&disk, 8.0, &sol, &rule).unwrap();
        let expected = (1.0 - 8f64.powf(-2.0 / 3.0)).sqrt();
        for u in test_directions(2, 16).unwrap() {
            assert!((reg.radial(&u, 1e-12).unwrap() - expected).abs() < 1e-9);
        }
        assert!(reg.contains(&[0.8, 0.0]));
        assert!(!reg.contains(&[0.9, 0.0]));
        assert!(!reg.contains(&[1.5, 0.0]));
        let vol = reg.volume(&sphere_rule(2, 32).unwrap(), 1e-12).unwrap();
        assert!((vol - 0.75 * PI).abs() < 1e-9);
        let spherical =
            SantaloRegion::with_route(&disk, 8.0, &sol, &rule, RegionRoute::Spherical).unwrap();
        assert!((spherical.radial(&[0.6, 0.8], 1e-12).unwrap() - expected).abs() < 1e-8);
        assert!(matches!(
            SantaloRegion::new(&disk, 0.5, &sol, &rule),
            Err(GeomError::EmptyRegion { .. })
        ));
        let point = SantaloRegion::new(&disk, 1.0, &sol, &rule).unwrap();
        assert!(point.is_degenerate());
        assert_eq!(point.radial(&[1.0, 0.0], 1e-9).unwrap(), 0.0);
    }

    #[test]
    fn binet_examples() {
        let b = ConvexBody::unit_ball(3).unwrap();
        let m = binet_matrix(&b, &Vector::zeros(3)).unwrap();
        assert!((m.m.clone() - Matrix::identity(3, 3) / 5.0).norm() < 1e-14);
        assert!((m.radial(&[0.0, 1.0, 0.0]) - 5f64.sqrt()).abs() < 1e-13);
        let sq = ConvexBody::cube(2, 1.0).unwrap();
        let m = binet_matrix(&sq, &Vector::zeros(2)).unwrap();
        assert!((m.m.clone() - Matrix::identity(2, 2) / 3.0).norm() < 1e-14);
        let l = matrix_from_rows(&[vec![2.0, 1.0], vec![0.0, 0.5]]).unwrap();
        let img = sq.affine_image(&l, &vector(&[1.0, 1.0])).unwrap();
        let mi = binet_matrix(&img, &vector(&[1.0, 1.0])).unwrap();
        assert!((mi.m - &l * &m.m * l.transpose()).norm() < 1e-12);
    }

    #[test]
    fn constants() {
        let c = sandwich_constants(2, 1.0, 1.0).unwrap();
        assert!(c.d_n_t.abs() < 1e-15 && c.theorem9_inner.abs() < 1e-15);
        let c = sandwich_constants(2, 1.0, 2.0).unwrap();
        assert!((c.d_n_t - 0.5f64.sqrt() / (2.0 * 3f64.sqrt())).abs() < 1e-14);
        let c = sandwich_constants(2, 1.0, 8.0).unwrap();
        assert!((c.theorem9_inner - (1.0 - 8f64.powf(-0.5))).abs() < 1e-14);
        assert!((c.theorem9_outer_symmetric - (7.0f64 / 8.0).sqrt()).abs() < 1e-14);
        assert!(c.d_n_t <= c.c_n_t);
        assert!(sandwich_constants(2, 1.0, 0.5).is_err());
    }

    #[test]
    fn disk_and_triangle_sandwiches() {
        let rule = rule2();
        let dirs = test_directions(2, 64).unwrap();
        let disk = ConvexBody::unit_ball(2).unwrap();
        let sol = santalo_point(&disk, &rule, DEFAULT_TOL).unwrap();
        let reg = SantaloRegion::new(&disk, 8.0, &sol, &rule).unwrap();
        let reps = sandwich_reports(&reg, &dirs, 1e-6).unwrap();
        assert_eq!(reps.len(), 7);
        assert!(reps.iter().all(|r| r.passed()), "{reps:#?}");
        let tri = ConvexBody::vpolytope_from_rows(&[vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let sol = santalo_point(&tri, &rule, DEFAULT_TOL).unwrap();
        let reg = SantaloRegion::new(&tri, 2.0, &sol, &rule).unwrap();
        let reps = sandwich_reports(&reg, &dirs, 1e-6).unwrap();
        assert_eq!(reps.len(), 4);
        assert!(reps.iter().all(|r| r.passed()), "{reps:#?}");
    }

    #[test]
    fn inclusion_reports() {
        let dirs = test_directions(2, 64).unwrap();
        let same = verify_inclusion("same", |_| Ok(1.0), |_| Ok(1.0), &dirs, 1e-12).unwrap();
        assert!(same.passed());
        let bad = verify_inclusion("bad", |_| Ok(1.1), |_| Ok(1.0), &dirs, 1e-12).unwrap();
        assert_eq!(bad.violations.len(), 64);
        let disk = ConvexBody::unit_ball(2).unwrap();
        let r = radial_from_membership(|x| disk.contains(x, 0.0), &[0.0, 0.0], &[0.6, 0.8], 2.0, 1e-12);
        assert!((r - 1.0).abs() < 1e-11);
    }
}
