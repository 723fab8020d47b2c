//! Double-description polytopes: both the facet and the vertex lists are
//! computed at construction, together with exact moments for `n ≤ 3`.

use std::cmp::Ordering;

use nalgebra::DMatrix;

use super::lp::{maximize, LpOutcome};
use crate::error::{GeomError, Result};
use crate::linalg::{complement_basis, solve, Matrix, Vector};
use crate::quadrature::{gauss_legendre, integrate_piecewise};

const MAX_SUBSETS: u64 = 2_000_000;

#[derive(Debug, Clone)]
pub(crate) struct Moments {
    pub volume: f64,
    /// `∫ x dx`
    pub first: Vector,
    /// `∫ x xᵀ dx`
    pub second: Matrix,
}

#[derive(Debug, Clone)]
pub(crate) struct Polytope {
    pub dim: usize,
    /// Unit outward facet normals.
    pub normals: Vec<Vector>,
    pub offsets: Vec<f64>,
    pub vertices: Vec<Vector>,
    pub facet_vertices: Vec<Vec<usize>>,
    pub edges: Vec<(usize, usize)>,
    pub interior: Vector,
    pub inner_radius: f64,
    pub outer_radius: f64,
    pub moments: Option<Moments>,
}

fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u64 = 1;
    for i in 0..k {
        r = r.saturating_mul((n - i) as u64) / (i as u64 + 1);
    }
    r
}

fn for_each_combination(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n || k == 0 {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 && idx[0] == n - k {
                return;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn rank(rows: &[&Vector], dim: usize, tol: f64) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let m = DMatrix::from_fn(rows.len(), dim, |i, j| rows[i][j]);
    let sv = m.singular_values();
    sv.iter().filter(|&&s| s > tol).count()
}

fn push_unique(list: &mut Vec<Vector>, v: Vector, tol: f64) -> bool {
    if list.iter().any(|w| (w - &v).amax() <= tol) {
        false
    } else {
        list.push(v);
        true
    }
}

/// Area of the convex hull of planar points.
pub(crate) fn hull_area(points: &mut [(f64, f64)]) -> f64 {
    if points.len() < 3 {
        return 0.0;
    }
    points.sort_by(|p, q| {
        p.0.partial_cmp(&q.0)
            .unwrap_or(Ordering::Equal)
            .then(p.1.partial_cmp(&q.1).unwrap_or(Ordering::Equal))
    });
    let cross = |o: (f64, f64), a: (f64, f64), b: (f64, f64)| {
        (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
    };
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(2 * points.len());
    for &p in points.iter() {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    let lower = hull.len() + 1;
    for &p in points.iter().rev().skip(1) {
        while hull.len() >= lower && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    let mut area = 0.0;
    for i in 0..hull.len() {
        let (a, b) = (hull[i], hull[(i + 1) % hull.len()]);
        area += a.0 * b.1 - a.1 * b.0;
    }
    0.5 * area.abs()
}

impl Polytope {
    pub fn from_halfspaces(a: &Matrix, b: &Vector) -> Result<Self> {
        let (m, n) = (a.nrows(), a.ncols());
        if b.len() != m {
            return Err(GeomError::MalformedBody(format!(
                "A has {m} rows but b has {} entries",
                b.len()
            )));
        }
        crate::check_dim(n)?;
        if a.iter().chain(b.iter()).any(|x| !x.is_finite()) {
            return Err(GeomError::MalformedBody("non-finite polytope data".into()));
        }
        let mut normals = Vec::with_capacity(m);
        let mut offsets = Vec::with_capacity(m);
        for i in 0..m {
            let row = a.row(i).transpose();
            let norm = row.norm();
            if norm <= 1e-14 {
                return Err(GeomError::MalformedBody(format!("row {i} of A is zero")));
            }
            normals.push(row / norm);
            offsets.push(b[i] / norm);
        }
        if binomial(m, n) > MAX_SUBSETS {
            return Err(GeomError::Unsupported(format!(
                "vertex enumeration of {m} halfspaces in dimension {n} is too large"
            )));
        }
        let scale = offsets.iter().fold(1.0_f64, |s, o| s.max(o.abs()));
        let tol = 1e-9 * scale;
        let mut vertices: Vec<Vector> = Vec::new();
        for_each_combination(m, n, |rows| {
            let sys = DMatrix::from_fn(n, n, |i, j| normals[rows[i]][j]);
            let rhs = Vector::from_iterator(n, rows.iter().map(|&r| offsets[r]));
            if let Some(v) = solve(sys, &rhs) {
                if normals.iter().zip(&offsets).all(|(a, &o)| a.dot(&v) <= o + tol) {
                    push_unique(&mut vertices, v, tol);
                }
            }
        });
        if vertices.len() < n + 1 {
            return Err(GeomError::MalformedBody(
                "halfspaces do not bound a full-dimensional polytope".into(),
            ));
        }
        let centre = vertices.iter().fold(Vector::zeros(n), |s, v| s + v) / vertices.len() as f64;
        // boundedness: the LP must be bounded in every coordinate direction
        let shifted = Vector::from_iterator(m, (0..m).map(|i| offsets[i] - normals[i].dot(&centre)));
        let amat = DMatrix::from_fn(m, n, |i, j| normals[i][j]);
        for k in 0..2 * n {
            let mut c = Vector::zeros(n);
            c[k / 2] = if k % 2 == 0 { 1.0 } else { -1.0 };
            match maximize(&c, &amat, &shifted) {
                LpOutcome::Optimal { .. } => {}
                LpOutcome::Unbounded => {
                    return Err(GeomError::MalformedBody("H-polytope is unbounded".into()))
                }
                LpOutcome::IterationLimit => {
                    return Err(GeomError::Internal("simplex iteration limit".into()))
                }
            }
        }
        // keep genuine facets only
        let mut keep_n = Vec::new();
        let mut keep_o: Vec<f64> = Vec::new();
        for (a, &o) in normals.iter().zip(&offsets) {
            let on: Vec<&Vector> = vertices.iter().filter(|v| (a.dot(v) - o).abs() <= tol).collect();
            if on.len() < n {
                continue;
            }
            let diffs: Vec<Vector> = on.iter().skip(1).map(|v| *v - on[0]).collect();
            let refs: Vec<&Vector> = diffs.iter().collect();
            if rank(&refs, n, tol) < n - 1 {
                continue;
            }
            let dup = keep_n
                .iter()
                .zip(&keep_o)
                .any(|(k, &ko): (&Vector, &f64)| (k - a).amax() <= 1e-12 && (ko - o).abs() <= tol);
            if !dup {
                keep_n.push(a.clone());
                keep_o.push(o);
            }
        }
        Self::finish(n, keep_n, keep_o, vertices, tol)
    }

    pub fn from_vertices(points: &[Vector]) -> Result<Self> {
        let n = points.first().map(|p| p.len()).unwrap_or(0);
        crate::check_dim(n)?;
        if points.iter().any(|p| p.len() != n) {
            return Err(GeomError::MalformedBody("vertices have mixed dimensions".into()));
        }
        if points.iter().flat_map(|p| p.iter()).any(|x| !x.is_finite()) {
            return Err(GeomError::MalformedBody("non-finite vertex".into()));
        }
        if points.len() < n + 1 {
            return Err(GeomError::MalformedBody(format!(
                "need at least {} vertices in dimension {n}",
                n + 1
            )));
        }
        if binomial(points.len(), n) > MAX_SUBSETS {
            return Err(GeomError::Unsupported(format!(
                "facet enumeration of {} points in dimension {n} is too large",
                points.len()
            )));
        }
        let scale = points.iter().fold(1.0_f64, |s, p| s.max(p.amax()));
        let tol = 1e-9 * scale;
        let mut normals: Vec<Vector> = Vec::new();
        let mut offsets: Vec<f64> = Vec::new();
        for_each_combination(points.len(), n, |idx| {
            let base = &points[idx[0]];
            let diffs: Vec<Vector> = idx[1..].iter().map(|&i| &points[i] - base).collect();
            // normal from signed cofactors of the (n-1) × n difference matrix
            let mut normal = Vector::zeros(n);
            for j in 0..n {
                let minor = DMatrix::from_fn(n - 1, n - 1, |r, c| {
                    let col = if c < j { c } else { c + 1 };
                    diffs[r][col]
                });
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                normal[j] = sign * minor.determinant();
            }
            let norm = normal.norm();
            if norm <= 1e-12 * scale.powi(n as i32 - 1) {
                return;
            }
            let mut normal = normal / norm;
            let mut offset = normal.dot(base);
            let (lo, hi) = points.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
                let s = normal.dot(p) - offset;
                (lo.min(s), hi.max(s))
            });
            if hi > tol {
                if lo < -tol {
                    return;
                }
                normal = -normal;
                offset = -offset;
            }
            let dup = normals
                .iter()
                .zip(&offsets)
                .any(|(k, &ko)| (k - &normal).amax() <= 1e-9 && (ko - offset).abs() <= tol);
            if !dup {
                normals.push(normal);
                offsets.push(offset);
            }
        });
        if normals.len() < n + 1 {
            return Err(GeomError::MalformedBody("vertices span a lower-dimensional set".into()));
        }
        let mut vertices: Vec<Vector> = Vec::new();
        for p in points {
            let inc: Vec<&Vector> = normals
                .iter()
                .zip(&offsets)
                .filter(|(a, &o)| (a.dot(p) - o).abs() <= tol)
                .map(|(a, _)| a)
                .collect();
            if rank(&inc, n, 1e-9) == n {
                push_unique(&mut vertices, p.clone(), tol);
            }
        }
        Self::finish(n, normals, offsets, vertices, tol)
    }

    pub(crate) fn finish(
        dim: usize,
        normals: Vec<Vector>,
        offsets: Vec<f64>,
        vertices: Vec<Vector>,
        tol: f64,
    ) -> Result<Self> {
        let facet_vertices: Vec<Vec<usize>> = normals
            .iter()
            .zip(&offsets)
            .map(|(a, &o)| {
                (0..vertices.len())
                    .filter(|&i| (a.dot(&vertices[i]) - o).abs() <= tol)
                    .collect()
            })
            .collect();
        let mut edges = Vec::new();
        if dim == 3 {
            for i in 0..vertices.len() {
                for j in i + 1..vertices.len() {
                    let shared = facet_vertices
                        .iter()
                        .filter(|f| f.contains(&i) && f.contains(&j))
                        .count();
                    if shared >= 2 {
                        edges.push((i, j));
                    }
                }
            }
        }
        let interior =
            vertices.iter().fold(Vector::zeros(dim), |s, v| s + v) / vertices.len() as f64;
        let inner_radius = normals
            .iter()
            .zip(&offsets)
            .map(|(a, &o)| o - a.dot(&interior))
            .fold(f64::INFINITY, f64::min);
        if !(inner_radius > tol) {
            return Err(GeomError::MalformedBody("polytope has empty interior".into()));
        }
        let outer_radius = vertices.iter().map(|v| (v - &interior).norm()).fold(0.0, f64::max);
        let mut poly = Polytope {
            dim,
            normals,
            offsets,
            vertices,
            facet_vertices,
            edges,
            interior,
            inner_radius,
            outer_radius,
            moments: None,
        };
        if dim <= 3 {
            poly.moments = Some(poly.exact_moments());
        }
        Ok(poly)
    }

    /// Image under `x ↦ Lx + a` for invertible `L`.
    pub fn transformed(&self, l: &Matrix, a: &Vector) -> Result<Self> {
        let l_inv_t = l
            .clone()
            .try_inverse()
            .ok_or(GeomError::SingularMap(0.0))?
            .transpose();
        let vertices: Vec<Vector> = self.vertices.iter().map(|v| l * v + a).collect();
        let mut normals = Vec::with_capacity(self.normals.len());
        let mut offsets = Vec::with_capacity(self.normals.len());
        for (nrm, &o) in self.normals.iter().zip(&self.offsets) {
            let w = &l_inv_t * nrm;
            let len = w.norm();
            offsets.push((o + w.dot(a)) / len);
            normals.push(w / len);
        }
        let scale = vertices.iter().fold(1.0_f64, |s, v| s.max(v.amax()));
        Self::finish(self.dim, normals, offsets, vertices, 1e-9 * scale)
    }

    /// Polar body about `p`, built directly from the face lattice duality:
    /// vertices of `P` become facets `⟨v - p, y⟩ ≤ 1` and facets become
    /// vertices `a_i / (b_i - ⟨a_i, p⟩)`.
    pub fn polar(&self, p: &Vector) -> Result<Self> {
        let mut normals = Vec::with_capacity(self.vertices.len());
        let mut offsets = Vec::with_capacity(self.vertices.len());
        for v in &self.vertices {
            let d = v - p;
            let len = d.norm();
            normals.push(d / len);
            offsets.push(1.0 / len);
        }
        let mut vertices = Vec::with_capacity(self.normals.len());
        for (a, &o) in self.normals.iter().zip(&self.offsets) {
            let gap = o - a.dot(p);
            if !(gap > 0.0) {
                return Err(GeomError::Pole("polar centre is not interior".into()));
            }
            vertices.push(a / gap);
        }
        let scale = vertices.iter().fold(1.0_f64, |s, v| s.max(v.amax()));
        Self::finish(self.dim, normals, offsets, vertices, 1e-9 * scale)
    }

    /// Vertex indices of facet `f`, cyclically ordered (n = 3 only).
    fn ordered_facet(&self, f: usize) -> Vec<usize> {
        let idx = &self.facet_vertices[f];
        let basis = complement_basis(&self.normals[f]);
        let mean = idx.iter().fold(Vector::zeros(3), |s, &i| s + &self.vertices[i]) / idx.len() as f64;
        let mut with_angle: Vec<(f64, usize)> = idx
            .iter()
            .map(|&i| {
                let d = &self.vertices[i] - &mean;
                let p = basis.transpose() * d;
                (p[1].atan2(p[0]), i)
            })
            .collect();
        with_angle.sort_by(|p, q| p.0.partial_cmp(&q.0).unwrap_or(Ordering::Equal));
        with_angle.into_iter().map(|(_, i)| i).collect()
    }

    /// Simplices (as vertex lists) covering the polytope, for `n ≤ 3`.
    pub fn simplices(&self) -> Vec<Vec<Vector>> {
        let z = &self.interior;
        let mut out = Vec::new();
        match self.dim {
            2 => {
                for f in &self.facet_vertices {
                    if f.len() >= 2 {
                        out.push(vec![z.clone(), self.vertices[f[0]].clone(), self.vertices[f[1]].clone()]);
                    }
                }
            }
            3 => {
                for f in 0..self.normals.len() {
                    let ring = self.ordered_facet(f);
                    for k in 1..ring.len().saturating_sub(1) {
                        out.push(vec![
                            z.clone(),
                            self.vertices[ring[0]].clone(),
                            self.vertices[ring[k]].clone(),
                            self.vertices[ring[k + 1]].clone(),
                        ]);
                    }
                }
            }
            _ => {}
        }
        out
    }

    /// Boundary triangles (n = 3) or segments (n = 2) with their outward normals.
    pub fn boundary_cells(&self) -> Vec<(Vec<Vector>, Vector)> {
        let mut out = Vec::new();
        for f in 0..self.normals.len() {
            let normal = self.normals[f].clone();
            match self.dim {
                2 => {
                    let idx = &self.facet_vertices[f];
                    out.push((vec![self.vertices[idx[0]].clone(), self.vertices[idx[1]].clone()], normal));
                }
                3 => {
                    let ring = self.ordered_facet(f);
                    for k in 1..ring.len().saturating_sub(1) {
                        out.push((
                            vec![
                                self.vertices[ring[0]].clone(),
                                self.vertices[ring[k]].clone(),
                                self.vertices[ring[k + 1]].clone(),
                            ],
                            normal.clone(),
                        ));
                    }
                }
                _ => {}
            }
        }
        out
    }

    fn exact_moments(&self) -> Moments {
        let n = self.dim;
        let mut volume = 0.0;
        let mut first = Vector::zeros(n);
        let mut second = Matrix::zeros(n, n);
        let fact: f64 = (1..=n).map(|k| k as f64).product();
        for s in self.simplices() {
            let d = DMatrix::from_fn(n, n, |i, j| s[i + 1][j] - s[0][j]);
            let vol = d.determinant().abs() / fact;
            let sum = s.iter().fold(Vector::zeros(n), |a, v| a + v);
            volume += vol;
            first += &sum * (vol / (n as f64 + 1.0));
            let mut outer = &sum * sum.transpose();
            for v in &s {
                outer += v * v.transpose();
            }
            second += outer * (vol / ((n as f64 + 1.0) * (n as f64 + 2.0)));
        }
        Moments { volume, first, second }
    }

    pub fn support(&self, u: &[f64]) -> f64 {
        self.vertices
            .iter()
            .map(|v| v.iter().zip(u).map(|(a, b)| a * b).sum::<f64>())
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Support value obtained from the simplex method on the facet description.
    pub fn support_lp(&self, u: &[f64]) -> Result<f64> {
        let m = self.normals.len();
        let amat = DMatrix::from_fn(m, self.dim, |i, j| self.normals[i][j]);
        let shifted =
            Vector::from_iterator(m, (0..m).map(|i| self.offsets[i] - self.normals[i].dot(&self.interior)));
        let c = Vector::from_column_slice(u);
        match maximize(&c, &amat, &shifted) {
            LpOutcome::Optimal { value, .. } => Ok(value + c.dot(&self.interior)),
            LpOutcome::Unbounded => Err(GeomError::MalformedBody("unbounded support LP".into())),
            LpOutcome::IterationLimit => Err(GeomError::Internal("simplex iteration limit".into())),
        }
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        self.normals.iter().zip(&self.offsets).all(|(a, &o)| {
            a.iter().zip(x).map(|(p, q)| p * q).sum::<f64>() <= o + tol
        })
    }

    /// Largest `ρ` with `center + ρ u` in the polytope.
    pub fn radial(&self, center: &[f64], u: &[f64]) -> f64 {
        let mut best = f64::INFINITY;
        for (a, &o) in self.normals.iter().zip(&self.offsets) {
            let au: f64 = a.iter().zip(u).map(|(p, q)| p * q).sum();
            if au > 1e-15 {
                let ac: f64 = a.iter().zip(center).map(|(p, q)| p * q).sum();
                best = best.min((o - ac) / au);
            }
        }
        best.max(0.0)
    }

    pub fn heights(&self, u: &[f64]) -> Vec<f64> {
        self.vertices
            .iter()
            .map(|v| v.iter().zip(u).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Exact `(n-1)`-volume of the slice `⟨x,u⟩ = y`, for `n ≤ 3`.
    pub fn section(&self, u: &[f64], y: f64) -> Option<f64> {
        match self.dim {
            2 => {
                let w = [-u[1], u[0]];
                let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
                for (a, &o) in self.normals.iter().zip(&self.offsets) {
                    let ap = y * (a[0] * u[0] + a[1] * u[1]);
                    let aw = a[0] * w[0] + a[1] * w[1];
                    let rest = o - ap;
                    if aw.abs() <= 1e-15 {
                        if rest < 0.0 {
                            return Some(0.0);
                        }
                    } else if aw > 0.0 {
                        hi = hi.min(rest / aw);
                    } else {
                        lo = lo.max(rest / aw);
                    }
                }
                Some((hi - lo).max(0.0))
            }
            3 => {
                let uv = Vector::from_column_slice(u);
                let basis = complement_basis(&uv);
                let h: Vec<f64> = self.vertices.iter().map(|v| v.dot(&uv) - y).collect();
                let eps = 1e-12 * self.outer_radius.max(1.0);
                let mut pts: Vec<(f64, f64)> = Vec::new();
                let mut push = |p: Vector| {
                    let q = basis.transpose() * p;
                    pts.push((q[0], q[1]));
                };
                for (i, v) in self.vertices.iter().enumerate() {
                    if h[i].abs() <= eps {
                        push(v.clone());
                    }
                }
                for &(i, j) in &self.edges {
                    if (h[i] > eps && h[j] < -eps) || (h[i] < -eps && h[j] > eps) {
                        let s = h[i] / (h[i] - h[j]);
                        push(&self.vertices[i] + (&self.vertices[j] - &self.vertices[i]) * s);
                    }
                }
                Some(hull_area(&mut pts))
            }
            _ => None,
        }
    }

    /// Exact volume of `{x : ⟨x,u⟩ ≥ a}` for `n ≤ 3`: the section function
    /// is a polynomial of degree `n-1` between consecutive vertex heights.
    pub fn cap_volume(&self, u: &[f64], a: f64) -> Option<f64> {
        if self.dim > 3 {
            return None;
        }
        let heights = self.heights(u);
        let top = heights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let bottom = heights.iter().copied().fold(f64::INFINITY, f64::min);
        let lo = a.max(bottom);
        if lo >= top {
            return Some(0.0);
        }
        let rule = gauss_legendre(3);
        Some(integrate_piecewise(&rule, |y| self.section(u, y).unwrap_or(0.0), lo, top, &heights))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{matrix_from_rows, vector};

    fn cube_h() -> Polytope {
        let a = matrix_from_rows(&[
            vec![1.0, 0.0, 0.0],
            vec![-1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, -1.0, 0.0],
            vec![0.0, 0.0, 1.0],
            vec![0.0, 0.0, -1.0],
            vec![1.0, 1.0, 1.0], // redundant
        ])
        .unwrap();
        Polytope::from_halfspaces(&a, &vector(&[1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 5.0])).unwrap()
    }

    #[test]
    fn combinations_enumerate_all() {
        let mut count = 0;
        for_each_combination(6, 3, |_| count += 1);
        assert_eq!(count, 20);
        assert_eq!(binomial(6, 3), 20);
        let mut seen = Vec::new();
        for_each_combination(3, 3, |c| seen.push(c.to_vec()));
        assert_eq!(seen, vec![vec![0, 1, 2]]);
    }

    #[test]
    fn cube_from_halfspaces() {
        let c = cube_h();
        assert_eq!(c.vertices.len(), 8);
        assert_eq!(c.normals.len(), 6);
        assert_eq!(c.edges.len(), 12);
        let m = c.moments.as_ref().unwrap();
        assert!((m.volume - 8.0).abs() < 1e-12);
        assert!(m.first.norm() < 1e-12);
        // ∫ x² over [-1,1]³ = 8/3
        assert!((m.second[(0, 0)] - 8.0 / 3.0).abs() < 1e-12);
        assert!(m.second[(0, 1)].abs() < 1e-12);
    }

    #[test]
    fn cube_from_vertices_with_interior_points() {
        let mut pts = Vec::new();
        for i in 0..8 {
            pts.push(vector(&[
                if i & 1 == 0 { -1.0 } else { 1.0 },
                if i & 2 == 0 { -1.0 } else { 1.0 },
                if i & 4 == 0 { -1.0 } else { 1.0 },
            ]));
        }
        pts.push(vector(&[0.1, 0.2, 0.3]));
        pts.push(vector(&[1.0, 0.0, 0.0]));
        let c = Polytope::from_vertices(&pts).unwrap();
        assert_eq!(c.vertices.len(), 8);
        assert_eq!(c.normals.len(), 6);
        assert!((c.moments.unwrap().volume - 8.0).abs() < 1e-12);
    }

    #[test]
    fn cube_sections_and_caps() {
        let c = cube_h();
        let s = 1.0 / 3f64.sqrt();
        let u = [s, s, s];
        // the diagonal slice through the centre is a regular hexagon of side √2
        let hex = 3.0 * 3f64.sqrt() / 2.0 * 2.0;
        assert!((c.section(&u, 0.0).unwrap() - hex).abs() < 1e-12);
        assert!((c.cap_volume(&u, 0.0).unwrap() - 4.0).abs() < 1e-12);
        assert!((c.cap_volume(&[1.0, 0.0, 0.0], 0.5).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(c.section(&[1.0, 0.0, 0.0], 1.5).unwrap(), 0.0);
    }

    #[test]
    fn lp_support_matches_vertex_support() {
        let c = cube_h();
        let u = vector(&[0.3, -0.5, 0.8]).normalize();
        let lp = c.support_lp(u.as_slice()).unwrap();
        assert!((lp - c.support(u.as_slice())).abs() < 1e-12);
    }

    #[test]
    fn rejects_unbounded_and_degenerate() {
        let a = matrix_from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0], vec![-1.0, -1.0]]).unwrap();
        assert!(Polytope::from_halfspaces(&a, &vector(&[1.0, 1.0, 1.0])).is_ok());
        let a = matrix_from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0], vec![-1.0, 0.0]]).unwrap();
        assert!(Polytope::from_halfspaces(&a, &vector(&[1.0, 1.0, 1.0])).is_err());
        let flat = vec![vector(&[0.0, 0.0]), vector(&[1.0, 1.0]), vector(&[2.0, 2.0])];
        assert!(Polytope::from_vertices(&flat).is_err());
    }

    #[test]
    fn four_dimensional_cross_polytope() {
        let mut pts = Vec::new();
        for i in 0..4 {
            for s in [-1.0, 1.0] {
                let mut v = Vector::zeros(4);
                v[i] = s;
                pts.push(v);
            }
        }
        let p = Polytope::from_vertices(&pts).unwrap();
        assert_eq!(p.vertices.len(), 8);
        assert_eq!(p.normals.len(), 16);
        assert!(p.moments.is_none());
    }
}
