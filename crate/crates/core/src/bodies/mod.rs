//! Convex bodies: balls, ellipsoids, H- and V-polytopes and affine images.
//!
//! Every body is flattened at construction into one of two exact
//! geometries (an ellipsoid `c + L·B` or a double-description polytope),
//! so queries never recurse through affine wrappers. The original variant
//! is kept for reporting and for closed-form shortcuts.

pub(crate) mod lp;
mod polytope;
mod spec;

use std::sync::{Arc, OnceLock};

use nalgebra::DMatrix;
use serde::Serialize;

pub(crate) use polytope::Polytope;
pub use spec::BodySpec;

use crate::error::{GeomError, Result};
use crate::linalg::{complement_basis, spd_sqrt_pair, symmetrize, Matrix, Vector};
use crate::quadrature::Sampler;
use crate::special::{unit_ball_cap_volume, unit_ball_volume};

/// Unit vector in `R^n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Direction(Vec<f64>);

impl Direction {
    /// Accepts a vector whose norm is `1 ± 1e-12`.
    pub fn new(u: Vec<f64>) -> Result<Self> {
        let norm = u.iter().map(|x| x * x).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(GeomError::Domain(format!("direction has norm {norm}")));
        }
        Ok(Direction(u))
    }

    pub fn normalized(u: &[f64]) -> Result<Self> {
        let norm = u.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(GeomError::Domain("cannot normalize a zero vector".into()));
        }
        Ok(Direction(u.iter().map(|x| x / norm).collect()))
    }

    pub fn axis(n: usize, k: usize) -> Self {
        let mut u = vec![0.0; n];
        u[k] = 1.0;
        Direction(u)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn to_vector(&self) -> Vector {
        Vector::from_column_slice(&self.0)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

impl std::ops::Deref for Direction {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// A value with its Monte Carlo standard error (zero when exact).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Estimate { value, std_error: 0.0 }
    }
}

/// Monte Carlo settings for the non-exact cases.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McConfig {
    pub seed: u64,
    pub samples: usize,
    /// Requested relative standard error; `None` accepts any result.
    pub rel_tol: Option<f64>,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig { seed: 0, samples: 200_000, rel_tol: None }
    }
}

/// Constructor-level description of a body.
#[derive(Debug, Clone)]
pub enum Variant {
    Ball { center: Vector, radius: f64 },
    Ellipsoid { center: Vector, shape: Matrix },
    HPolytope { a: Matrix, b: Vector },
    VPolytope { vertices: Vec<Vector> },
    Affine { l: Matrix, a: Vector, inner: ConvexBody },
}

/// `c + L·B` with `B` the Euclidean unit ball.
#[derive(Debug, Clone)]
pub(crate) struct EllipsoidGeom {
    pub center: Vector,
    pub root: Matrix,
    pub root_inv: Matrix,
    pub det: f64,
    inv_norm: f64,
}

impl EllipsoidGeom {
    fn new(center: Vector, root: Matrix) -> Result<Self> {
        let det = root.determinant().abs();
        let root_inv = root.clone().try_inverse().ok_or(GeomError::SingularMap(det))?;
        let inv_norm = root_inv.singular_values().max();
        Ok(EllipsoidGeom { center, root, root_inv, det, inv_norm })
    }

    /// `M` with the body `{x : (x-c)ᵀM(x-c) ≤ 1}`.
    pub fn shape(&self) -> Matrix {
        symmetrize(&(self.root_inv.transpose() * &self.root_inv))
    }

    fn scale_along(&self, u: &[f64]) -> f64 {
        let u = Vector::from_column_slice(u);
        (self.root.transpose() * u).norm()
    }
}

#[derive(Debug, Clone)]
pub(crate) enum Geometry {
    Ellipsoid(EllipsoidGeom),
    Polytope(Arc<Polytope>),
}

/// Uniform points in the body (flat storage) with the box they came from.
#[derive(Debug)]
struct Cloud {
    points: Vec<f64>,
    drawn: usize,
    box_volume: f64,
}

#[derive(Debug)]
struct Data {
    variant: Variant,
    dim: usize,
    geom: Geometry,
    interior: Vector,
    inner_radius: f64,
    outer_radius: f64,
    cloud: OnceLock<Cloud>,
}

/// An immutable convex body with nonempty interior in `R^n`, `2 ≤ n ≤ 6`.
///
/// Construction stores a point `z` and radii with
/// `B(z, inner_radius) ⊆ K ⊆ B(z, outer_radius)`. Clones share data.
#[derive(Debug, Clone)]
pub struct ConvexBody(Arc<Data>);

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl ConvexBody {
    fn from_geometry(variant: Variant, geom: Geometry) -> Self {
        let (dim, interior, inner_radius, outer_radius) = match &geom {
            Geometry::Ellipsoid(e) => {
                let sv = e.root.singular_values();
                (e.center.len(), e.center.clone(), sv.min(), sv.max())
            }
            Geometry::Polytope(p) => (p.dim, p.interior.clone(), p.inner_radius, p.outer_radius),
        };
        ConvexBody(Arc::new(Data {
            variant,
            dim,
            geom,
            interior,
            inner_radius,
            outer_radius,
            cloud: OnceLock::new(),
        }))
    }

    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        let n = center.len();
        crate::check_dim(n)?;
        if !(radius > 0.0) || !radius.is_finite() || center.iter().any(|x| !x.is_finite()) {
            return Err(GeomError::MalformedBody(format!("invalid ball radius {radius}")));
        }
        let c = Vector::from_vec(center);
        let geom = EllipsoidGeom::new(c.clone(), Matrix::identity(n, n) * radius)?;
        Ok(Self::from_geometry(
            Variant::Ball { center: c, radius },
            Geometry::Ellipsoid(geom),
        ))
    }

    pub fn unit_ball(n: usize) -> Result<Self> {
        Self::ball(vec![0.0; n], 1.0)
    }

    /// `{x : (x-c)ᵀ M (x-c) ≤ 1}` for symmetric positive definite `M`.
    pub fn ellipsoid(center: Vec<f64>, shape: Matrix) -> Result<Self> {
        let n = center.len();
        crate::check_dim(n)?;
        if shape.nrows() != n || shape.ncols() != n {
            return Err(GeomError::MalformedBody("shape matrix has wrong size".into()));
        }
        if (&shape - shape.transpose()).amax() > 1e-10 * shape.amax().max(1.0) {
            return Err(GeomError::MalformedBody("shape matrix is not symmetric".into()));
        }
        let shape = symmetrize(&shape);
        let (_, inv_sqrt) = spd_sqrt_pair(&shape)?;
        let c = Vector::from_vec(center);
        let geom = EllipsoidGeom::new(c.clone(), inv_sqrt)?;
        Ok(Self::from_geometry(
            Variant::Ellipsoid { center: c, shape },
            Geometry::Ellipsoid(geom),
        ))
    }

    /// `{x : Ax ≤ b}`; must be bounded with nonempty interior.
    pub fn hpolytope(a: Matrix, b: Vector) -> Result<Self> {
        let poly = Polytope::from_halfspaces(&a, &b)?;
        Ok(Self::from_geometry(
            Variant::HPolytope { a, b },
            Geometry::Polytope(Arc::new(poly)),
        ))
    }

    /// Convex hull of the given points; must be full-dimensional.
    pub fn vpolytope(vertices: Vec<Vector>) -> Result<Self> {
        let poly = Polytope::from_vertices(&vertices)?;
        Ok(Self::from_geometry(
            Variant::VPolytope { vertices },
            Geometry::Polytope(Arc::new(poly)),
        ))
    }

    pub fn vpolytope_from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::vpolytope(rows.iter().map(|r| Vector::from_column_slice(r)).collect())
    }

    /// The axis-parallel cube `[-s, s]^n`.
    pub fn cube(n: usize, s: f64) -> Result<Self> {
        let a = DMatrix::from_fn(2 * n, n, |i, j| {
            if i / 2 == j {
                if i % 2 == 0 {
                    1.0
                } else {
                    -1.0
                }
            } else {
                0.0
            }
        });
        Self::hpolytope(a, Vector::from_element(2 * n, s))
    }

    /// `L·K + a` for invertible `L`.
    pub fn affine_image(&self, l: &Matrix, a: &Vector) -> Result<Self> {
        let n = self.dim();
        if l.nrows() != n || l.ncols() != n || a.len() != n {
            return Err(GeomError::MalformedBody("affine map has wrong size".into()));
        }
        let det = l.determinant();
        if !(det.abs() > 1e-12) {
            return Err(GeomError::SingularMap(det.abs()));
        }
        let geom = match &self.0.geom {
            Geometry::Ellipsoid(e) => {
                Geometry::Ellipsoid(EllipsoidGeom::new(l * &e.center + a, l * &e.root)?)
            }
            Geometry::Polytope(p) => Geometry::Polytope(Arc::new(p.transformed(l, a)?)),
        };
        Ok(Self::from_geometry(
            Variant::Affine { l: l.clone(), a: a.clone(), inner: self.clone() },
            geom,
        ))
    }

    pub fn translate(&self, a: &Vector) -> Result<Self> {
        self.affine_image(&Matrix::identity(self.dim(), self.dim()), a)
    }

    pub fn variant(&self) -> &Variant {
        &self.0.variant
    }

    pub(crate) fn geometry(&self) -> &Geometry {
        &self.0.geom
    }

    pub fn dim(&self) -> usize {
        self.0.dim
    }

    /// Point `z` with `B(z, inner_radius) ⊆ K`.
    pub fn interior_point(&self) -> &Vector {
        &self.0.interior
    }

    pub fn inner_radius(&self) -> f64 {
        self.0.inner_radius
    }

    pub fn outer_radius(&self) -> f64 {
        self.0.outer_radius
    }

    /// Upper bound on the diameter.
    pub fn diameter(&self) -> f64 {
        2.0 * self.0.outer_radius
    }

    /// Ball or ellipsoid, possibly through affine images.
    pub fn is_ellipsoid(&self) -> bool {
        matches!(self.0.geom, Geometry::Ellipsoid(_))
    }

    pub fn is_polytope(&self) -> bool {
        matches!(self.0.geom, Geometry::Polytope(_))
    }

    /// `C³` boundary with positive curvature: exactly the ellipsoids here.
    pub fn is_smooth(&self) -> bool {
        self.is_ellipsoid()
    }

    /// `(center, M)` for ellipsoidal bodies.
    pub fn ellipsoid_form(&self) -> Option<(Vector, Matrix)> {
        match &self.0.geom {
            Geometry::Ellipsoid(e) => Some((e.center.clone(), e.shape())),
            Geometry::Polytope(_) => None,
        }
    }

    /// `(center, L)` with `K = center + L·B` for ellipsoidal bodies.
    pub fn ellipsoid_root(&self) -> Option<(Vector, Matrix)> {
        match &self.0.geom {
            Geometry::Ellipsoid(e) => Some((e.center.clone(), e.root.clone())),
            Geometry::Polytope(_) => None,
        }
    }

    /// Radius when the body is a Euclidean ball.
    pub fn ball_form(&self) -> Option<(Vector, f64)> {
        let (c, root) = self.ellipsoid_root()?;
        let sv = root.singular_values();
        let (lo, hi) = (sv.min(), sv.max());
        ((hi - lo) <= 1e-12 * hi).then_some((c, hi))
    }

    pub fn vertices(&self) -> Option<&[Vector]> {
        match &self.0.geom {
            Geometry::Polytope(p) => Some(&p.vertices),
            Geometry::Ellipsoid(_) => None,
        }
    }

    /// Unit outward normals and offsets of the facets.
    pub fn facets(&self) -> Option<(&[Vector], &[f64])> {
        match &self.0.geom {
            Geometry::Polytope(p) => Some((&p.normals, &p.offsets)),
            Geometry::Ellipsoid(_) => None,
        }
    }

    pub(crate) fn polytope(&self) -> Option<&Polytope> {
        match &self.0.geom {
            Geometry::Polytope(p) => Some(p),
            Geometry::Ellipsoid(_) => None,
        }
    }

    /// Centre of central symmetry, if the body has one.
    pub fn symmetry_center(&self) -> Option<Vector> {
        match &self.0.geom {
            Geometry::Ellipsoid(e) => Some(e.center.clone()),
            Geometry::Polytope(p) => {
                let c = &p.interior;
                let tol = 1e-9 * p.outer_radius.max(1.0);
                let symmetric = p.vertices.iter().all(|v| {
                    let mirror = c * 2.0 - v;
                    p.vertices.iter().any(|w| (w - &mirror).amax() <= tol)
                });
                symmetric.then(|| c.clone())
            }
        }
    }

    /// Sections, caps, volume and centroid are exact (no Monte Carlo).
    pub fn has_exact_sections(&self) -> bool {
        match &self.0.geom {
            Geometry::Ellipsoid(_) => true,
            Geometry::Polytope(p) => p.dim <= 3,
        }
    }

    /// `h_K(u) = max_{z∈K} ⟨z, u⟩`. Polytopes take the vertex maximum,
    /// which coincides with the value of the facet LP (see [`Self::support_lp`]).
    pub fn support(&self, u: &[f64]) -> f64 {
        match &self.0.geom {
            Geometry::Ellipsoid(e) => dot(e.center.as_slice(), u) + e.scale_along(u),
            Geometry::Polytope(p) => p.support(u),
        }
    }

    /// Support value of a polytope computed by the simplex method on the
    /// facet description. Other bodies fall back to [`Self::support`].
    pub fn support_lp(&self, u: &[f64]) -> Result<f64> {
        match &self.0.geom {
            Geometry::Polytope(p) => p.support_lp(u),
            Geometry::Ellipsoid(_) => Ok(self.support(u)),
        }
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        match &self.0.geom {
            Geometry::Ellipsoid(e) => {
                let d = Vector::from_column_slice(x) - &e.center;
                (&e.root_inv * d).norm() <= 1.0 + tol * e.inv_norm
            }
            Geometry::Polytope(p) => p.contains(x, tol),
        }
    }

    /// `max{ρ ≥ 0 : center + ρu ∈ K}` for `center ∈ K`.
    pub fn radial(&self, center: &[f64], u: &[f64]) -> f64 {
        match &self.0.geom {
            Geometry::Ellipsoid(e) => {
                let a = &e.root_inv * (Vector::from_column_slice(center) - &e.center);
                let b = &e.root_inv * Vector::from_column_slice(u);
                let (ab, bb, aa) = (a.dot(&b), b.norm_squared(), a.norm_squared());
                let disc = (ab * ab - bb * (aa - 1.0)).max(0.0);
                ((-ab + disc.sqrt()) / bb).max(0.0)
            }
            Geometry::Polytope(p) => p.radial(center, u),
        }
    }

    /// `|K|`: exact for ellipsoids and polytopes in `n ≤ 3`, otherwise the
    /// default-seeded Monte Carlo estimate (cached).
    pub fn volume(&self) -> f64 {
        self.volume_estimate(&McConfig::default())
            .map(|e| e.value)
            .unwrap_or(f64::NAN)
    }

    pub fn volume_estimate(&self, mc: &McConfig) -> Result<Estimate> {
        if let Variant::Affine { l, inner, .. } = &self.0.variant {
            let e = inner.volume_estimate(mc)?;
            let det = l.determinant().abs();
            return Ok(Estimate { value: det * e.value, std_error: det * e.std_error });
        }
        match &self.0.geom {
            Geometry::Ellipsoid(e) => Ok(Estimate::exact(e.det * unit_ball_volume(self.dim()))),
            Geometry::Polytope(p) => match &p.moments {
                Some(m) => Ok(Estimate::exact(m.volume)),
                None => {
                    let cloud_owned;
                    let cloud = if *mc == McConfig::default() {
                        self.cloud()
                    } else {
                        cloud_owned = self.draw_cloud(mc);
                        &cloud_owned
                    };
                    let frac = cloud.points.len() as f64 / self.dim() as f64 / cloud.drawn as f64;
                    let value = cloud.box_volume * frac;
                    let std_error =
                        cloud.box_volume * (frac * (1.0 - frac) / cloud.drawn as f64).sqrt();
                    check_accuracy(value, std_error, mc)?;
                    Ok(Estimate { value, std_error })
                }
            },
        }
    }

    /// Centre of mass.
    pub fn centroid(&self) -> Vector {
        self.centroid_estimate(&McConfig::default())
            .map(|(c, _)| c)
            .unwrap_or_else(|_| self.0.interior.clone())
    }

    /// Centre of mass with per-coordinate standard error.
    pub fn centroid_estimate(&self, mc: &McConfig) -> Result<(Vector, f64)> {
        if let Variant::Affine { l, a, inner } = &self.0.variant {
            let (c, se) = inner.centroid_estimate(mc)?;
            return Ok((l * c + a, se * l.norm()));
        }
        match &self.0.geom {
            Geometry::Ellipsoid(e) => Ok((e.center.clone(), 0.0)),
            Geometry::Polytope(p) => match &p.moments {
                Some(m) => Ok((&m.first / m.volume, 0.0)),
                None => {
                    let pts = self.sample_points(mc);
                    let n = self.dim();
                    let count = pts.len() / n;
                    if count < 2 {
                        return Err(GeomError::Accuracy {
                            value: f64::NAN,
                            std_error: f64::INFINITY,
                            requested: mc.rel_tol.unwrap_or(0.0),
                        });
                    }
                    let mut mean = Vector::zeros(n);
                    for chunk in pts.chunks(n) {
                        mean += Vector::from_column_slice(chunk);
                    }
                    mean /= count as f64;
                    let var = pts
                        .chunks(n)
                        .map(|c| (Vector::from_column_slice(c) - &mean).norm_squared())
                        .sum::<f64>()
                        / (count as f64 - 1.0);
                    Ok((mean, (var / count as f64).sqrt()))
                }
            },
        }
    }

    /// `(1/|K|) ∫_K (x-c)(x-c)ᵀ dx`.
    pub fn second_moment(&self, center: &Vector) -> Matrix {
        let n = self.dim();
        if let Variant::Affine { l, a, inner } = &self.0.variant {
            if let Some(inv) = l.clone().try_inverse() {
                let pulled = &inv * (center - a);
                return symmetrize(&(l * inner.second_moment(&pulled) * l.transpose()));
            }
        }
        match &self.0.geom {
            Geometry::Ellipsoid(e) => {
                let d = &e.center - center;
                symmetrize(&(&e.root * e.root.transpose() / (n as f64 + 2.0) + &d * d.transpose()))
            }
            Geometry::Polytope(p) => match &p.moments {
                Some(m) => {
                    let s = &m.second / m.volume;
                    let f = &m.first / m.volume;
                    symmetrize(
                        &(s - &f * center.transpose() - center * f.transpose()
                            + center * center.transpose()),
                    )
                }
                None => {
                    let pts = self.sample_points(&McConfig::default());
                    let count = (pts.len() / n).max(1);
                    let mut acc = Matrix::zeros(n, n);
                    for chunk in pts.chunks(n) {
                        let d = Vector::from_column_slice(chunk) - center;
                        acc += &d * d.transpose();
                    }
                    symmetrize(&(acc / count as f64))
                }
            },
        }
    }

    /// `(n-1)`-volume of `K ∩ {⟨z,u⟩ = y}`.
    pub fn section_volume(&self, u: &[f64], y: f64) -> f64 {
        let n = self.dim();
        match &self.0.geom {
            Geometry::Ellipsoid(e) => {
                let s = e.scale_along(u);
                let z = (y - dot(e.center.as_slice(), u)) / s;
                if z.abs() >= 1.0 {
                    return 0.0;
                }
                e.det / s * unit_ball_volume(n - 1) * (1.0 - z * z).powf((n as f64 - 1.0) / 2.0)
            }
            Geometry::Polytope(p) => match p.section(u, y) {
                Some(v) => v,
                None => self.section_mc(p, u, y),
            },
        }
    }

    fn section_mc(&self, p: &Polytope, u: &[f64], y: f64) -> f64 {
        let n = self.dim();
        let lo = -p.support(&u.iter().map(|x| -x).collect::<Vec<_>>());
        let hi = p.support(u);
        if y <= lo || y >= hi {
            return 0.0;
        }
        let uv = Vector::from_column_slice(u);
        let basis = complement_basis(&uv);
        let proj: Vec<Vector> = p.vertices.iter().map(|v| basis.transpose() * v).collect();
        let mut bmin = vec![f64::INFINITY; n - 1];
        let mut bmax = vec![f64::NEG_INFINITY; n - 1];
        for q in &proj {
            for k in 0..n - 1 {
                bmin[k] = bmin[k].min(q[k]);
                bmax[k] = bmax[k].max(q[k]);
            }
        }
        let area: f64 = (0..n - 1).map(|k| bmax[k] - bmin[k]).product();
        let samples = McConfig::default().samples / 4;
        let mut rng = Sampler::new(McConfig::default().seed).substream(7);
        let base = &uv * y;
        let mut hits = 0usize;
        let mut w = Vector::zeros(n - 1);
        for _ in 0..samples {
            for k in 0..n - 1 {
                w[k] = rng.uniform_in(bmin[k], bmax[k]);
            }
            let x = &base + &basis * &w;
            if p.contains(x.as_slice(), 0.0) {
                hits += 1;
            }
        }
        area * hits as f64 / samples as f64
    }

    /// Volume of the cap `{x ∈ K : ⟨x,u⟩ ≥ a}`.
    pub fn cap_volume(&self, u: &[f64], a: f64) -> f64 {
        let n = self.dim();
        match &self.0.geom {
            Geometry::Ellipsoid(e) => {
                let s = e.scale_along(u);
                e.det * unit_ball_cap_volume(n, (a - dot(e.center.as_slice(), u)) / s)
            }
            Geometry::Polytope(p) => match p.cap_volume(u, a) {
                Some(v) => v,
                None => {
                    let cloud = self.cloud();
                    let above = cloud.points.chunks(n).filter(|x| dot(x, u) >= a).count();
                    let frac_total = cloud.points.len() / n;
                    if frac_total == 0 {
                        return 0.0;
                    }
                    self.volume() * above as f64 / frac_total as f64
                }
            },
        }
    }

    /// Heights `⟨v, u⟩` at which the section function may have kinks.
    pub fn breakpoints(&self, u: &[f64]) -> Vec<f64> {
        match &self.0.geom {
            Geometry::Ellipsoid(_) => Vec::new(),
            Geometry::Polytope(p) => p.heights(u),
        }
    }

    pub fn section_profile(&self, u: &Direction) -> SectionProfile {
        let minus: Vec<f64> = u.iter().map(|x| -x).collect();
        SectionProfile {
            u: u.clone(),
            support_plus: self.support(u),
            support_minus: self.support(&minus),
            body: self.clone(),
        }
    }

    /// Axis-aligned bounding box `(lo, hi)`.
    pub fn bounding_box(&self) -> (Vector, Vector) {
        let n = self.dim();
        let mut lo = Vector::zeros(n);
        let mut hi = Vector::zeros(n);
        for k in 0..n {
            let e = Direction::axis(n, k);
            let mut m = vec![0.0; n];
            m[k] = -1.0;
            hi[k] = self.support(&e);
            lo[k] = -self.support(&m);
        }
        (lo, hi)
    }

    /// Exact polar body `(K - p)^0 = {y : ⟨y, z - p⟩ ≤ 1 ∀z ∈ K}` for
    /// interior `p`.
    pub fn polar(&self, p: &Vector) -> Result<ConvexBody> {
        let n = self.dim();
        if p.len() != n {
            return Err(GeomError::Domain("polar centre has wrong dimension".into()));
        }
        match &self.0.geom {
            Geometry::Ellipsoid(e) => {
                // h_{K-p}(y) = ⟨d,y⟩ + √(yᵀSy), S = L Lᵀ, d = c - p; squaring
                // h ≤ 1 gives (y + Q⁻¹d)ᵀ Q (y + Q⁻¹d) ≤ 1 + dᵀQ⁻¹d, Q = S - ddᵀ.
                let d = &e.center - p;
                if (&e.root_inv * &d).norm() >= 1.0 - 1e-12 {
                    return Err(GeomError::Pole("polar centre is not interior".into()));
                }
                let q = symmetrize(&(&e.root * e.root.transpose() - &d * d.transpose()));
                let q_inv = q
                    .clone()
                    .try_inverse()
                    .ok_or_else(|| GeomError::Pole("polar centre is not interior".into()))?;
                let qd = &q_inv * &d;
                let center = -&qd;
                let shape = q / (1.0 + d.dot(&qd));
                ConvexBody::ellipsoid(center.as_slice().to_vec(), shape)
            }
            Geometry::Polytope(poly) => {
                if !poly.contains(p.as_slice(), -1e-12 * poly.outer_radius) {
                    return Err(GeomError::Pole("polar centre is not interior".into()));
                }
                let polar = poly.polar(p)?;
                let a = DMatrix::from_fn(poly.vertices.len(), n, |i, j| poly.vertices[i][j] - p[j]);
                let b = Vector::from_element(poly.vertices.len(), 1.0);
                Ok(Self::from_geometry(
                    Variant::HPolytope { a, b },
                    Geometry::Polytope(Arc::new(polar)),
                ))
            }
        }
    }

    fn cloud(&self) -> &Cloud {
        self.0.cloud.get_or_init(|| self.draw_cloud(&McConfig::default()))
    }

    fn sample_points(&self, mc: &McConfig) -> Vec<f64> {
        if *mc == McConfig::default() {
            self.cloud().points.clone()
        } else {
            self.draw_cloud(mc).points
        }
    }

    /// Rejection sampling in the bounding box; parallel over fixed chunks
    /// whose substreams make the result independent of the thread count.
    fn draw_cloud(&self, mc: &McConfig) -> Cloud {
        use rayon::prelude::*;
        const CHUNK: usize = 4096;
        let n = self.dim();
        let (lo, hi) = self.bounding_box();
        let box_volume: f64 = (0..n).map(|k| hi[k] - lo[k]).product();
        let chunks = mc.samples.div_ceil(CHUNK);
        let base = Sampler::new(mc.seed);
        let parts: Vec<Vec<f64>> = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut rng = base.substream(c as u64);
                let count = CHUNK.min(mc.samples - c * CHUNK);
                let mut out = Vec::new();
                let mut x = vec![0.0; n];
                for _ in 0..count {
                    for k in 0..n {
                        x[k] = rng.uniform_in(lo[k], hi[k]);
                    }
                    if self.contains(&x, 0.0) {
                        out.extend_from_slice(&x);
                    }
                }
                out
            })
            .collect();
        Cloud { points: parts.concat(), drawn: mc.samples, box_volume }
    }

    pub fn to_spec(&self) -> BodySpec {
        BodySpec::from_body(self)
    }
}

fn check_accuracy(value: f64, std_error: f64, mc: &McConfig) -> Result<()> {
    if let Some(rel) = mc.rel_tol {
        if std_error > rel * value.abs() {
            return Err(GeomError::Accuracy { value, std_error, requested: rel });
        }
    }
    Ok(())
}

/// The section function `y ↦ |K ∩ {⟨z,u⟩ = y}|` in a fixed direction.
#[derive(Debug, Clone)]
pub struct SectionProfile {
    pub u: Direction,
    /// `h_K(u)`
    pub support_plus: f64,
    /// `h_K(-u)`
    pub support_minus: f64,
    body: ConvexBody,
}

impl SectionProfile {
    pub fn eval(&self, y: f64) -> f64 {
        if y <= -self.support_minus || y >= self.support_plus {
            return 0.0;
        }
        self.body.section_volume(&self.u, y)
    }

    pub fn dim(&self) -> usize {
        self.body.dim()
    }

    /// Interior points where the profile may fail to be smooth.
    pub fn breakpoints(&self) -> Vec<f64> {
        self.body
            .breakpoints(&self.u)
            .into_iter()
            .filter(|&y| y > -self.support_minus && y < self.support_plus)
            .collect()
    }

    /// Integer `exact_degree` such that the profile is a polynomial of that
    /// degree between breakpoints, if it is piecewise polynomial at all.
    pub fn polynomial_degree(&self) -> Option<usize> {
        match self.body.geometry() {
            Geometry::Polytope(p) if p.dim <= 3 => Some(p.dim - 1),
            _ => None,
        }
    }

    pub fn body(&self) -> &ConvexBody {
        &self.body
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{matrix_from_rows, vector};
    use std::f64::consts::PI;

    fn square() -> ConvexBody {
        ConvexBody::cube(2, 1.0).unwrap()
    }

    #[test]
    fn supports() {
        let b = ConvexBody::unit_ball(2).unwrap();
        assert!((b.support(&[1.0, 0.0]) - 1.0).abs() < 1e-15);
        let s = 0.5f64.sqrt();
        assert!((square().support(&[s, s]) - 2f64.sqrt()).abs() < 1e-14);
        assert!((square().support_lp(&[s, s]).unwrap() - 2f64.sqrt()).abs() < 1e-12);
        let img = b.affine_image(&(Matrix::identity(2, 2) * 2.0), &vector(&[1.0, 0.0])).unwrap();
        assert!((img.support(&[1.0, 0.0]) - 3.0).abs() < 1e-14);
    }

    #[test]
    fn membership() {
        let b = ConvexBody::unit_ball(2).unwrap();
        assert!(b.contains(&[0.0, 0.0], 1e-9));
        assert!(!b.contains(&[1.1, 0.0], 1e-9));
        assert!(square().contains(&[1.0, 1.0], 1e-9));
        assert!(!square().contains(&[1.0 + 1e-6, 0.0], 1e-9));
    }

    #[test]
    fn volumes_and_centroids() {
        assert!((ConvexBody::unit_ball(2).unwrap().volume() - PI).abs() < 1e-14);
        assert!((square().volume() - 4.0).abs() < 1e-14);
        let e = ConvexBody::ellipsoid(vec![0.0, 0.0], matrix_from_rows(&[vec![1.0, 0.0], vec![0.0, 0.25]]).unwrap()).unwrap();
        assert!((e.volume() - 2.0 * PI).abs() < 1e-13);
        let b = ConvexBody::ball(vec![1.0, 2.0], 1.0).unwrap();
        assert!((b.centroid() - vector(&[1.0, 2.0])).norm() < 1e-15);
        let tri = ConvexBody::vpolytope_from_rows(&[vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert!((tri.centroid() - vector(&[1.0 / 3.0, 1.0 / 3.0])).norm() < 1e-14);
        assert!(square().centroid().norm() < 1e-14);
    }

    #[test]
    fn sections() {
        let b2 = ConvexBody::unit_ball(2).unwrap();
        assert!((b2.section_volume(&[1.0, 0.0], 0.0) - 2.0).abs() < 1e-14);
        let b3 = ConvexBody::unit_ball(3).unwrap();
        assert!((b3.section_volume(&[1.0, 0.0, 0.0], 0.6) - PI * 0.64).abs() < 1e-13);
        assert_eq!(square().section_volume(&[1.0, 0.0], 1.5), 0.0);
    }

    #[test]
    fn affine_images() {
        let shear = matrix_from_rows(&[vec![1.0, 0.7], vec![0.0, 1.0]]).unwrap();
        let img = square().affine_image(&shear, &vector(&[0.3, -0.2])).unwrap();
        assert!((img.volume() - 4.0).abs() < 1e-12);
        let b = ConvexBody::unit_ball(3).unwrap();
        let big = b.affine_image(&(Matrix::identity(3, 3) * 2.0), &Vector::zeros(3)).unwrap();
        let ref_ball = ConvexBody::ball(vec![0.0; 3], 2.0).unwrap();
        let u = vector(&[0.2, -0.5, 0.3]).normalize();
        assert!((big.support(u.as_slice()) - ref_ball.support(u.as_slice())).abs() < 1e-14);
        assert!((big.volume() - ref_ball.volume()).abs() < 1e-12);
        assert!(ConvexBody::unit_ball(2).unwrap().affine_image(&Matrix::zeros(2, 2), &Vector::zeros(2)).is_err());
    }

    #[test]
    fn polars() {
        // square polar is the cross-polytope of area 2
        let p = square().polar(&Vector::zeros(2)).unwrap();
        assert!((p.volume() - 2.0).abs() < 1e-13);
        // disk polar about (0.5, 0): area π / 0.75^{3/2}
        let d = ConvexBody::unit_ball(2).unwrap().polar(&vector(&[0.5, 0.0])).unwrap();
        assert!((d.volume() - PI / 0.75f64.powf(1.5)).abs() < 1e-12);
        assert!(square().polar(&vector(&[1.0, 0.0])).is_err());
    }

    #[test]
    fn ellipsoid_caps_and_radial() {
        let e = ConvexBody::ellipsoid(vec![0.5, 0.0], matrix_from_rows(&[vec![0.25, 0.0], vec![0.0, 1.0]]).unwrap()).unwrap();
        // half of the ellipse lies right of its centre
        assert!((e.cap_volume(&[1.0, 0.0], 0.5) - e.volume() / 2.0).abs() < 1e-12);
        assert!((e.radial(&[0.5, 0.0], &[1.0, 0.0]) - 2.0).abs() < 1e-12);
        assert!((e.radial(&[0.5, 0.0], &[0.0, 1.0]) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn monte_carlo_in_four_dimensions() {
        let c = ConvexBody::cube(4, 1.0).unwrap();
        // the bounding box is the cube itself, so every sample is accepted
        assert!((c.volume() - 16.0).abs() < 1e-9);
        let mut pts = Vec::new();
        for i in 0..4 {
            for s in [-1.0, 1.0] {
                let mut v = vec![0.0; 4];
                v[i] = s;
                pts.push(v);
            }
        }
        let cross = ConvexBody::vpolytope_from_rows(&pts).unwrap();
        let est = cross.volume_estimate(&McConfig::default()).unwrap();
        let exact = 16.0 / 24.0;
        assert!((est.value - exact).abs() < 4.0 * est.std_error);
        assert!(cross.centroid().norm() < 0.02);
    }
}
