//! Affine surface area: the closed form on ellipsoids, the limit of
//! `t^{2/(n+1)}(|K| - |S(K,t)|)` along a schedule of `t`, and the boundary
//! integral `|K| - |L| = (1/n) ∫_{∂K} ⟨x,N⟩ (1 - (‖x_L‖/‖x‖)ⁿ) dμ`.

use rayon::prelude::*;
use serde::Serialize;

use crate::bodies::ConvexBody;
use crate::error::{GeomError, Result};
use crate::linalg::Vector;
use crate::quadrature::{gauss_legendre, SphereRule};
use crate::santalo::{santalo_point, volume_product, SantaloRegion, DEFAULT_TOL};
use crate::special::unit_ball_volume;

/// Relative agreement required between the limit estimate and the closed form.
pub const CONSISTENCY_TOL: f64 = 0.02;

/// Closed-form affine surface area with an explanatory note.
#[derive(Debug, Clone, Serialize)]
pub struct AsaDirect {
    pub value: f64,
    pub note: &'static str,
}

/// `∫_{∂K} κ^{1/(n+1)} dμ`: `n v_n r^{n(n-1)/(n+1)}` for the ball of the
/// same volume when `K` is an ellipsoid, `0` for polytopes.
pub fn asa_direct(body: &ConvexBody) -> Result<AsaDirect> {
    let n = body.dim();
    let nf = n as f64;
    let vn = unit_ball_volume(n);
    if body.is_ellipsoid() {
        let r = (body.volume() / vn).powf(1.0 / nf);
        Ok(AsaDirect {
            value: nf * vn * r.powf(nf * (nf - 1.0) / (nf + 1.0)),
            note: "ellipsoid: equal-volume ball",
        })
    } else if body.is_polytope() {
        Ok(AsaDirect { value: 0.0, note: "polytope: curvature vanishes almost everywhere" })
    } else {
        Err(GeomError::NotSmooth("no closed-form affine surface area for this body".into()))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AsaEstimate {
    pub t_values: Vec<f64>,
    /// `t^{2/(n+1)}(|K| - |S(K,t)|)` for each `t`, the difference taken as
    /// one radial integral.
    pub estimates: Vec<f64>,
    /// Limit of the estimates from a quadratic fit in `t^{-2/(n+1)}` through
    /// the last three points.
    pub extrapolated: f64,
    /// `2(v_n/|K|)^{2/(n+1)}·extrapolated`.
    pub as_estimate: f64,
    pub direct: Option<f64>,
    /// Estimates change monotonically along the schedule.
    pub monotone: bool,
    /// `as_estimate` within [`CONSISTENCY_TOL`] of `direct` (positive `direct` only).
    pub consistent: Option<bool>,
}

/// `{8, 32, 128, 512, 2048}·p`.
pub fn default_schedule(product: f64) -> Vec<f64> {
    [8.0, 32.0, 128.0, 512.0, 2048.0].iter().map(|f| f * product).collect()
}

/// Value at `s = 0` of the polynomial through the given points.
fn extrapolate(s: &[f64], e: &[f64]) -> f64 {
    let k = s.len();
    (0..k)
        .map(|i| {
            let w: f64 = (0..k)
                .filter(|&j| j != i)
                .map(|j| s[j] / (s[j] - s[i]))
                .product();
            w * e[i]
        })
        .sum()
}

/// Per-`t` estimates and their extrapolated limit. The Santaló point and the
/// region volumes use `rule`; radial functions are resolved to `tol`.
pub fn asa_limit(body: &ConvexBody, schedule: &[f64], rule: &SphereRule, tol: f64) -> Result<AsaEstimate> {
    if schedule.is_empty() || schedule.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(GeomError::Domain("t schedule must be nonempty and strictly increasing".into()));
    }
    let n = body.dim();
    let nf = n as f64;
    let sol = santalo_point(body, rule, DEFAULT_TOL)?;
    let p = volume_product(body, &sol)?;
    if schedule[0] < 2.0 * p * (1.0 - 1e-12) {
        return Err(GeomError::Domain(format!(
            "smallest t = {} is below twice the volume product {p}",
            schedule[0]
        )));
    }
    let volume = body.volume();
    let expo = 2.0 / (nf + 1.0);
    let estimates = schedule
        .par_iter()
        .map(|&t| {
            let region = SantaloRegion::new(body, t, &sol, rule)?;
            Ok(t.powf(expo) * region.volume_deficit(rule, tol)?)
        })
        .collect::<Result<Vec<f64>>>()?;
    if estimates.iter().any(|e| !e.is_finite()) {
        return Err(GeomError::Internal("non-finite affine surface area estimate".into()));
    }
    let k = estimates.len().min(3);
    let tail = estimates.len() - k;
    let s: Vec<f64> = schedule[tail..].iter().map(|t| t.powf(-expo)).collect();
    let extrapolated = extrapolate(&s, &estimates[tail..]);
    let as_estimate = 2.0 * (unit_ball_volume(n) / volume).powf(expo) * extrapolated;
    let diffs: Vec<f64> = estimates.windows(2).map(|w| w[1] - w[0]).collect();
    let scale = estimates.iter().fold(0.0f64, |m, e| m.max(e.abs()));
    let slack = 1e-9 * scale;
    let monotone = diffs.iter().all(|d| *d >= -slack) || diffs.iter().all(|d| *d <= slack);
    let direct = asa_direct(body).ok().map(|d| d.value);
    let consistent = direct
        .filter(|d| *d > 0.0)
        .map(|d| (as_estimate - d).abs() <= CONSISTENCY_TOL * d);
    Ok(AsaEstimate {
        t_values: schedule.to_vec(),
        estimates,
        extrapolated,
        as_estimate,
        direct,
        monotone,
        consistent,
    })
}

/// `(1/n) ∫_{∂K} ⟨x - c, N⟩ (1 - (ρ_L(u_x)/‖x - c‖)ⁿ) dμ(x)` with `u_x` the
/// direction of `x - c` and `ρ_L` the radial function of `L` about `c`.
///
/// Ellipsoids integrate over `rule`; polygons use `order`-point
/// Gauss–Legendre on 16 pieces per edge, and 3-polytopes a collapsed
/// tensor rule on 4×4 pieces per boundary triangle.
pub fn boundary_volume_difference<F>(
    body: &ConvexBody,
    center: &[f64],
    l_radial: F,
    rule: &SphereRule,
    order: usize,
) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    let n = body.dim();
    if !body.contains(center, 0.0) {
        return Err(GeomError::Domain("centre must lie in the body".into()));
    }
    let c = Vector::from_column_slice(center);
    // weight·⟨x - c, N⟩ dμ at boundary point x
    let integrand = |x: &Vector, flux: f64| -> Result<f64> {
        let d = x - &c;
        let r = d.norm();
        let u = &d / r;
        let rl = l_radial(u.as_slice())?;
        Ok(flux * (1.0 - (rl / r).powi(n as i32)))
    };
    let total: f64 = if let Some((center_k, l)) = body.ellipsoid_root() {
        if rule.dim() != n {
            return Err(GeomError::Domain("sphere rule dimension differs from the body".into()));
        }
        let det = l.determinant().abs();
        let l_inv_t = l
            .clone()
            .try_inverse()
            .ok_or_else(|| GeomError::Internal("singular ellipsoid root".into()))?
            .transpose();
        let parts = (0..rule.len())
            .into_par_iter()
            .map(|i| {
                let u = Vector::from_column_slice(rule.node(i));
                let x = &center_k + &l * &u;
                let flux = det * (&x - &c).dot(&(&l_inv_t * &u));
                Ok(rule.weight(i) * integrand(&x, flux)?)
            })
            .collect::<Result<Vec<f64>>>()?;
        parts.iter().sum()
    } else if let Some(poly) = body.polytope() {
        let gl = gauss_legendre(order.max(1));
        let cells = poly.boundary_cells();
        let parts = cells
            .par_iter()
            .map(|(verts, normal)| -> Result<f64> {
                let h = normal.dot(&(&verts[0] - &c));
                let mut acc = 0.0;
                match n {
                    2 => {
                        let e = &verts[1] - &verts[0];
                        let len = e.norm();
                        let pieces = 16;
                        for k in 0..pieces {
                            for (s, w) in gl.nodes.iter().zip(&gl.weights) {
                                let tau = (k as f64 + 0.5 * (s + 1.0)) / pieces as f64;
                                let x = &verts[0] + &e * tau;
                                acc += 0.5 * w * len / pieces as f64 * integrand(&x, h)?;
                            }
                        }
                    }
                    3 => {
                        // x = v0 + a(v1 - v0) + a·b(v2 - v1), dA = 2·area·a da db
                        let e1 = &verts[1] - &verts[0];
                        let e2 = &verts[2] - &verts[1];
                        let area2 = e1.cross(&e2).norm();
                        let pieces = 4;
                        for ka in 0..pieces {
                            for kb in 0..pieces {
                                for (sa, wa) in gl.nodes.iter().zip(&gl.weights) {
                                    let a = (ka as f64 + 0.5 * (sa + 1.0)) / pieces as f64;
                                    for (sb, wb) in gl.nodes.iter().zip(&gl.weights) {
                                        let b = (kb as f64 + 0.5 * (sb + 1.0)) / pieces as f64;
                                        let x = &verts[0] + &e1 * a + &e2 * (a * b);
                                        let jac = area2 * a * 0.25 * wa * wb
                                            / (pieces * pieces) as f64;
                                        acc += jac * integrand(&x, h)?;
                                    }
                                }
                            }
                        }
                    }
                    _ => unreachable!(),
                }
                Ok(acc)
            })
            .collect::<Result<Vec<f64>>>();
        if n > 3 {
            return Err(GeomError::Unsupported(
                "boundary integration for polytopes needs n ≤ 3".into(),
            ));
        }
        parts?.iter().sum()
    } else {
        return Err(GeomError::Unsupported("boundary integration for this body".into()));
    };
    Ok(total / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::sphere_rule;
    use std::f64::consts::PI;

    #[test]
    fn direct_values() {
        assert!((asa_direct(&ConvexBody::unit_ball(2).unwrap()).unwrap().value - 2.0 * PI).abs() < 1e-12);
        assert!((asa_direct(&ConvexBody::unit_ball(3).unwrap()).unwrap().value - 4.0 * PI).abs() < 1e-12);
        let e = ConvexBody::ellipsoid(vec![0.0, 0.0], crate::linalg::matrix_from_rows(&[vec![9.0, 0.0], vec![0.0, 1.0 / 9.0]]).unwrap())
            .unwrap();
        // semi-axes 3 and 1/3
        assert!((asa_direct(&e).unwrap().value - 2.0 * PI).abs() < 1e-12);
        assert_eq!(asa_direct(&ConvexBody::cube(3, 1.0).unwrap()).unwrap().value, 0.0);
    }

    #[test]
    fn extrapolation_is_exact_on_quadratics() {
        let s = [0.3, 0.2, 0.1];
        let e: Vec<f64> = s.iter().map(|x| 2.0 - x + 0.5 * x * x).collect();
        assert!((extrapolate(&s, &e) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn disk_sequence_is_constant() {
        let disk = ConvexBody::unit_ball(2).unwrap();
        let rule = sphere_rule(2, 64).unwrap();
        let est = asa_limit(&disk, &default_schedule(1.0), &rule, 1e-12).unwrap();
        for e in &est.estimates {
            assert!((e - PI).abs() < 1e-6, "{e}");
        }
        assert!((est.as_estimate - 2.0 * PI).abs() < 1e-5);
        assert_eq!(est.consistent, Some(true));
    }

    #[test]
    fn boundary_identity_on_disks() {
        let disk = ConvexBody::unit_ball(2).unwrap();
        let rule = sphere_rule(2, 64).unwrap();
        let v = boundary_volume_difference(&disk, &[0.0, 0.0], |_| Ok(0.5), &rule, 8).unwrap();
        assert!((v - 0.75 * PI).abs() < 1e-12);
        let same = boundary_volume_difference(&disk, &[0.0, 0.0], |u| Ok(disk.radial(&[0.0, 0.0], u)), &rule, 8)
            .unwrap();
        assert!(same.abs() < 1e-12);
        let sq = ConvexBody::cube(2, 1.0).unwrap();
        let v = boundary_volume_difference(&sq, &[0.1, 0.0], |_| Ok(0.5), &rule, 8).unwrap();
        assert!((v - (4.0 - 0.25 * PI)).abs() < 1e-9, "{v}");
        let cube = ConvexBody::cube(3, 1.0).unwrap();
        let rule3 = sphere_rule(3, 8).unwrap();
        let v = boundary_volume_difference(&cube, &[0.0, 0.0, 0.0], |_| Ok(0.5), &rule3, 8).unwrap();
        assert!((v - (8.0 - PI / 6.0)).abs() < 1e-6, "{v}");
    }
}
