use rayon::prelude::*;
use serde::Serialize;

use super::line::gauss_gegenbauer;
use crate::error::{GeomError, Result};
use crate::special::sphere_area;

/// Identifies a sphere rule in reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RuleDescriptor {
    pub dim: usize,
    pub level: usize,
    pub nodes: usize,
}

/// Quadrature on `S^{n-1}`: unit nodes with positive weights summing to
/// `n·v_n`. Node sets are closed under `u ↦ -u` with equal weights.
///
/// For `n = 2` the rule is the `2·level`-point equal-angle rule. For
/// `n ≥ 3` it is a product rule: `u = (√(1-z²)·w, z)` with `z` on the
/// `level`-point Gauss rule for the weight `(1-z²)^{(n-3)/2}` and `w` on the
/// rule of the same level for `S^{n-2}`.
#[derive(Debug, Clone)]
pub struct SphereRule {
    dim: usize,
    level: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

/// Default level per dimension (512, 2048, 27648, 8192, 15552 nodes for
/// n = 2..6). In n = 4 the budget is raised so that ball polar volumes at
/// `‖x‖ = 0.9` stay within 1e-6.
pub fn default_level(n: usize) -> usize {
    match n {
        2 => 256,
        3 => 32,
        4 => 24,
        5 => 8,
        _ => 6,
    }
}

pub fn sphere_rule(n: usize, level: usize) -> Result<SphereRule> {
    crate::check_dim(n)?;
    if level == 0 {
        return Err(GeomError::Domain("sphere rule level must be positive".into()));
    }
    let (nodes, weights) = build(n, level);
    Ok(SphereRule { dim: n, level, nodes, weights })
}

fn build(n: usize, level: usize) -> (Vec<f64>, Vec<f64>) {
    if n == 2 {
        let count = 2 * level;
        let step = std::f64::consts::PI / level as f64;
        let mut nodes = Vec::with_capacity(2 * count);
        for k in 0..count {
            let theta = (k as f64 + 0.5) * step;
            nodes.push(theta.cos());
            nodes.push(theta.sin());
        }
        return (nodes, vec![step; count]);
    }
    let (sub_nodes, sub_weights) = build(n - 1, level);
    let line = gauss_gegenbauer(level, (n as f64 - 3.0) / 2.0);
    let m = n - 1;
    let sub_count = sub_weights.len();
    let mut nodes = Vec::with_capacity(n * level * sub_count);
    let mut weights = Vec::with_capacity(level * sub_count);
    for (&z, &wz) in line.nodes.iter().zip(&line.weights) {
        let s = (1.0 - z * z).max(0.0).sqrt();
        for j in 0..sub_count {
            nodes.extend(sub_nodes[j * m..(j + 1) * m].iter().map(|x| s * x));
            nodes.push(z);
            weights.push(wz * sub_weights[j]);
        }
    }
    (nodes, weights)
}

impl SphereRule {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn node(&self, i: usize) -> &[f64] {
        &self.nodes[i * self.dim..(i + 1) * self.dim]
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[f64], f64)> + '_ {
        self.nodes.chunks_exact(self.dim).zip(self.weights.iter().copied())
    }

    pub fn descriptor(&self) -> RuleDescriptor {
        RuleDescriptor { dim: self.dim, level: self.level, nodes: self.len() }
    }

    /// Total weight; equals `n·v_n` up to rounding.
    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// The expected total weight `n·v_n`.
    pub fn expected_total(&self) -> f64 {
        sphere_area(self.dim)
    }
}

/// `Σ w_i f(u_i)`. A non-finite value at any node is reported as a pole
/// error naming that node.
pub fn integrate_sphere<F>(f: F, rule: &SphereRule) -> Result<f64>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let values: Vec<f64> = (0..rule.len())
        .into_par_iter()
        .with_min_len(256)
        .map(|i| f(rule.node(i)))
        .collect();
    let mut sum = 0.0;
    for (i, v) in values.iter().enumerate() {
        if !v.is_finite() {
            return Err(GeomError::Pole(format!(
                "integrand is {v} at node {i} {:?}",
                rule.node(i)
            )));
        }
        sum += rule.weight(i) * v;
    }
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn circle_rule() {
        let r = sphere_rule(2, 64).unwrap();
        assert_eq!(r.len(), 128);
        assert!((r.total_weight() - 2.0 * PI).abs() < 1e-12);
        let v = integrate_sphere(|u| u[0] * u[0], &r).unwrap();
        assert!((v - PI).abs() < 1e-10);
    }

    #[test]
    fn totals_and_second_moments() {
        for n in 2..=6 {
            let r = sphere_rule(n, default_level(n)).unwrap();
            let total = r.expected_total();
            assert!(((r.total_weight() - total) / total).abs() < 1e-10, "n={n}");
            for (u, _) in r.iter() {
                let norm: f64 = u.iter().map(|x| x * x).sum::<f64>().sqrt();
                assert!((norm - 1.0).abs() < 1e-12);
            }
            // ∫ u_1² dσ = n v_n / n = v_n
            let m2 = integrate_sphere(|u| u[0] * u[0], &r).unwrap();
            assert!((m2 - total / n as f64).abs() < 1e-8, "n={n}");
            let odd = integrate_sphere(|u| u[0], &r).unwrap();
            assert!(odd.abs() < 1e-12);
        }
        let r3 = sphere_rule(3, 32).unwrap();
        assert_eq!(r3.len(), 2048);
        assert!((r3.total_weight() - 4.0 * PI).abs() < 1e-10);
        let v = integrate_sphere(|u| u[0] * u[0], &r3).unwrap();
        assert!((v - 4.0 * PI / 3.0).abs() < 1e-8);
    }

    #[test]
    fn antipodal_closure() {
        for n in 2..=4 {
            let r = sphere_rule(n, 5).unwrap();
            for (u, w) in r.iter() {
                let found = r.iter().any(|(v, wv)| {
                    (wv - w).abs() < 1e-14 && u.iter().zip(v).all(|(a, b)| (a + b).abs() < 1e-13)
                });
                assert!(found, "missing antipode of {u:?}");
            }
        }
    }

    #[test]
    fn pole_error_names_node() {
        let r = sphere_rule(2, 4).unwrap();
        let e = integrate_sphere(|u| if u[0] > 0.9 { f64::INFINITY } else { 1.0 }, &r).unwrap_err();
        assert!(matches!(e, GeomError::Pole(ref m) if m.contains("node")));
    }

    #[test]
    fn unsupported_dimension() {
        assert!(matches!(sphere_rule(7, 4), Err(GeomError::UnsupportedDimension(7))));
        assert!(sphere_rule(1, 4).is_err());
    }
}
