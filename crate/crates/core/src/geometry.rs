//! Closed model surfaces: flat tori, round spheres, conformally deformed tori.
//!
//! Torus points are stored as canonical fundamental-domain representatives in
//! Cartesian chart coordinates; sphere points as unit 3-vectors (the radius
//! scales distances). Tangent vectors are chart vectors (torus) or ambient
//! vectors constrained to the tangent plane (sphere), which avoids chart
//! singularities at the poles.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{invalid, Error, Result};
use crate::field::SpectralField;
use crate::math::{fract_unit, wrap_half};
use crate::rng::Rng;
use crate::vec::{Vec2, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SurfaceKind {
    FlatTorus,
    RoundSphere,
    ConformalTorus,
}

impl SurfaceKind {
    pub fn name(&self) -> &'static str {
        match self {
            SurfaceKind::FlatTorus => "flat-torus",
            SurfaceKind::RoundSphere => "round-sphere",
            SurfaceKind::ConformalTorus => "conformal-torus",
        }
    }
}

/// A point on a surface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Point {
    Torus(Vec2),
    Sphere(Vec3),
}

impl Point {
    pub fn as_torus(&self) -> Option<Vec2> {
        match self {
            Point::Torus(v) => Some(*v),
            _ => None,
        }
    }

    pub fn as_sphere(&self) -> Option<Vec3> {
        match self {
            Point::Sphere(v) => Some(*v),
            _ => None,
        }
    }
}

/// A tangent vector at a point (chart vector on tori, ambient vector in the
/// tangent plane on the sphere).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tangent {
    Torus(Vec2),
    Sphere(Vec3),
}

impl Tangent {
    pub fn zero_like(p: &Point) -> Tangent {
        match p {
            Point::Torus(_) => Tangent::Torus(Vec2::ZERO),
            Point::Sphere(_) => Tangent::Sphere(Vec3::ZERO),
        }
    }

    pub fn norm_sq(&self) -> f64 {
        match self {
            Tangent::Torus(v) => v.norm_sq(),
            Tangent::Sphere(v) => v.norm_sq(),
        }
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn scale(&self, s: f64) -> Tangent {
        match self {
            Tangent::Torus(v) => Tangent::Torus(*v * s),
            Tangent::Sphere(v) => Tangent::Sphere(*v * s),
        }
    }

    pub fn add(&self, o: &Tangent) -> Tangent {
        match (self, o) {
            (Tangent::Torus(a), Tangent::Torus(b)) => Tangent::Torus(*a + *b),
            (Tangent::Sphere(a), Tangent::Sphere(b)) => Tangent::Sphere(*a + *b),
            _ => panic!("tangent kind mismatch"),
        }
    }

    pub fn dot(&self, o: &Tangent) -> f64 {
        match (self, o) {
            (Tangent::Torus(a), Tangent::Torus(b)) => a.dot(*b),
            (Tangent::Sphere(a), Tangent::Sphere(b)) => a.dot(*b),
            _ => panic!("tangent kind mismatch"),
        }
    }
}

/// Norm of a concatenated list of tangent vectors.
pub fn tangent_list_norm(v: &[Tangent]) -> f64 {
    v.iter().map(|t| t.norm_sq()).sum::<f64>().sqrt()
}

/// A 2D lattice with a Lagrange-reduced basis.
#[derive(Debug, Clone)]
pub struct Lattice {
    a1: Vec2,
    a2: Vec2,
    inv: [[f64; 2]; 2],
    volume: f64,
}

impl Lattice {
    pub fn new(a1: Vec2, a2: Vec2) -> Result<Lattice> {
        let det = a1.x * a2.y - a1.y * a2.x;
        let scale = a1.norm_sq().max(a2.norm_sq());
        if det.abs() <= 1e-12 * scale.max(1e-300) {
            return Err(invalid("lattice basis is linearly dependent"));
        }
        // Lagrange (Gauss) reduction; the 9-translate minimum-image search is
        // exact for a reduced basis.
        let (mut a1, mut a2) = (a1, a2);
        for _ in 0..64 {
            if a2.norm_sq() < a1.norm_sq() {
                core::mem::swap(&mut a1, &mut a2);
            }
            let mu = (a1.dot(a2) / a1.norm_sq()).round();
            if mu == 0.0 {
                break;
            }
            a2 = a2 - a1 * mu;
        }
        let det = a1.x * a2.y - a1.y * a2.x;
        let inv = [
            [a2.y / det, -a2.x / det],
            [-a1.y / det, a1.x / det],
        ];
        Ok(Lattice {
            a1,
            a2,
            inv,
            volume: det.abs(),
        })
    }

    pub fn basis(&self) -> (Vec2, Vec2) {
        (self.a1, self.a2)
    }

    pub fn volume(&self) -> f64 {
        self.volume
    }

    /// Cartesian -> lattice coordinates.
    pub fn to_lattice(&self, x: Vec2) -> Vec2 {
        Vec2::new(
            self.inv[0][0] * x.x + self.inv[0][1] * x.y,
            self.inv[1][0] * x.x + self.inv[1][1] * x.y,
        )
    }

    /// Lattice -> Cartesian coordinates.
    pub fn from_lattice(&self, s: Vec2) -> Vec2 {
        self.a1 * s.x + self.a2 * s.y
    }

    /// Dual basis rows `b_i` of the inverse matrix, `b_i . a_j = delta_ij`.
    pub fn dual_basis(&self) -> (Vec2, Vec2) {
        (
            Vec2::new(self.inv[0][0], self.inv[0][1]),
            Vec2::new(self.inv[1][0], self.inv[1][1]),
        )
    }

    /// Canonical representative with lattice coordinates in `[0, 1)^2`.
    /// Leaves `x` bit-identical when it is already canonical.
    pub fn reduce(&self, x: Vec2) -> Vec2 {
        let s = self.to_lattice(x);
        let f = Vec2::new(fract_unit(s.x), fract_unit(s.y));
        if f == s {
            x
        } else {
            self.from_lattice(f)
        }
    }

    /// Shortest representative of the displacement `dx` (minimum over the 9
    /// nearest lattice translates).
    pub fn min_image(&self, dx: Vec2) -> Vec2 {
        let s = self.to_lattice(dx);
        let base = self.from_lattice(Vec2::new(wrap_half(s.x), wrap_half(s.y)));
        let mut best = base;
        let mut best_n = base.norm_sq();
        for i in -1..=1 {
            for j in -1..=1 {
                if i == 0 && j == 0 {
                    continue;
                }
                let cand = base - self.a1 * (i as f64) - self.a2 * (j as f64);
                let n = cand.norm_sq();
                if n < best_n {
                    best_n = n;
                    best = cand;
                }
            }
        }
        best
    }

    pub fn approx_eq(&self, other: &Lattice, tol: f64) -> bool {
        (self.a1 - other.a1).norm() <= tol && (self.a2 - other.a2).norm() <= tol
    }
}

#[derive(Debug, Clone)]
enum Repr {
    FlatTorus {
        lattice: Lattice,
    },
    RoundSphere {
        radius: f64,
    },
    ConformalTorus {
        lattice: Lattice,
        u: Arc<SpectralField>,
        volume: f64,
    },
}

/// Descriptor of a supported closed surface, with cached volume.
#[derive(Debug, Clone)]
pub struct Surface {
    repr: Repr,
}

impl Surface {
    pub fn flat_torus(a1: Vec2, a2: Vec2) -> Result<Surface> {
        Ok(Surface {
            repr: Repr::FlatTorus {
                lattice: Lattice::new(a1, a2)?,
            },
        })
    }

    /// The unit square torus.
    pub fn unit_torus() -> Surface {
        Surface::flat_torus(Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0)).unwrap()
    }

    pub fn round_sphere(radius: f64) -> Result<Surface> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(invalid("sphere radius must be positive and finite"));
        }
        Ok(Surface {
            repr: Repr::RoundSphere { radius },
        })
    }

    /// Conformal torus with metric `e^{2u} g_flat`; `u` is sampled row-major
    /// on the `n1 x n2` periodic grid in lattice coordinates.
    pub fn conformal_torus(a1: Vec2, a2: Vec2, n1: usize, n2: usize, u: Vec<f64>) -> Result<Surface> {
        let lattice = Lattice::new(a1, a2)?;
        let field = SpectralField::from_samples(lattice.clone(), n1, n2, u)?;
        let vg = lattice.volume();
        let mean_e2u =
            field.values().iter().map(|&v| (2.0 * v).exp()).sum::<f64>() / (n1 * n2) as f64;
        let volume = mean_e2u * vg;
        Ok(Surface {
            repr: Repr::ConformalTorus {
                lattice,
                u: Arc::new(field),
                volume,
            },
        })
    }

    pub fn kind(&self) -> SurfaceKind {
        match &self.repr {
            Repr::FlatTorus { .. } => SurfaceKind::FlatTorus,
            Repr::RoundSphere { .. } => SurfaceKind::RoundSphere,
            Repr::ConformalTorus { .. } => SurfaceKind::ConformalTorus,
        }
    }

    pub fn is_torus_kind(&self) -> bool {
        !matches!(self.repr, Repr::RoundSphere { .. })
    }

    pub fn volume(&self) -> f64 {
        match &self.repr {
            Repr::FlatTorus { lattice } => lattice.volume(),
            Repr::RoundSphere { radius } => 4.0 * core::f64::consts::PI * radius * radius,
            Repr::ConformalTorus { volume, .. } => *volume,
        }
    }

    pub fn lattice(&self) -> Option<&Lattice> {
        match &self.repr {
            Repr::FlatTorus { lattice } | Repr::ConformalTorus { lattice, .. } => Some(lattice),
            Repr::RoundSphere { .. } => None,
        }
    }

    pub fn radius(&self) -> Option<f64> {
        match &self.repr {
            Repr::RoundSphere { radius } => Some(*radius),
            _ => None,
        }
    }

    pub fn conformal_factor(&self) -> Option<&SpectralField> {
        match &self.repr {
            Repr::ConformalTorus { u, .. } => Some(u),
            _ => None,
        }
    }

    fn check_point(&self, p: &Point) -> Result<()> {
        match (p, self.is_torus_kind()) {
            (Point::Torus(_), true) | (Point::Sphere(_), false) => Ok(()),
            _ => Err(invalid(format!(
                "point kind does not match surface kind {}",
                self.kind().name()
            ))),
        }
    }

    /// Canonical torus point from Cartesian chart coordinates.
    pub fn torus_point(&self, x: f64, y: f64) -> Result<Point> {
        let lattice = self
            .lattice()
            .ok_or_else(|| invalid("torus point on a non-torus surface"))?;
        Ok(Point::Torus(lattice.reduce(Vec2::new(x, y))))
    }

    /// Sphere point from an ambient direction (normalized on construction).
    pub fn sphere_point(&self, v: Vec3) -> Result<Point> {
        if self.is_torus_kind() {
            return Err(invalid("sphere point on a torus surface"));
        }
        let n = v.norm();
        if n < 1e-12 {
            return Err(invalid("sphere point direction is degenerate"));
        }
        Ok(Point::Sphere(v * (1.0 / n)))
    }

    /// Point from a flat coordinate list (2 for tori, 3 for the sphere).
    pub fn point_from_coords(&self, coords: &[f64]) -> Result<Point> {
        match (self.is_torus_kind(), coords.len()) {
            (true, 2) => self.torus_point(coords[0], coords[1]),
            (false, 3) => self.sphere_point(Vec3::new(coords[0], coords[1], coords[2])),
            (true, n) => Err(invalid(format!("torus point needs 2 coordinates, got {n}"))),
            (false, n) => Err(invalid(format!("sphere point needs 3 coordinates, got {n}"))),
        }
    }

    /// Geodesic distance (flat tori, sphere); chart distance on the conformal
    /// torus, which is used only for singularity bookkeeping.
    pub fn distance(&self, p: &Point, q: &Point) -> Result<f64> {
        self.check_point(p)?;
        self.check_point(q)?;
        match (&self.repr, p, q) {
            (Repr::RoundSphere { radius }, Point::Sphere(a), Point::Sphere(b)) => {
                let t = a.dot(*b).clamp(-1.0, 1.0);
                Ok(radius * t.acos())
            }
            (_, Point::Torus(a), Point::Torus(b)) => {
                let lattice = self.lattice().unwrap();
                Ok(lattice.min_image(*b - *a).norm())
            }
            _ => unreachable!(),
        }
    }

    /// Shortest chart displacement from `p` to `q` on torus kinds.
    pub fn min_image(&self, p: &Point, q: &Point) -> Result<Vec2> {
        self.check_point(p)?;
        self.check_point(q)?;
        match (p, q) {
            (Point::Torus(a), Point::Torus(b)) => {
                Ok(self.lattice().ok_or_else(|| invalid("not a torus"))?.min_image(*b - *a))
            }
            _ => Err(invalid("min_image requires torus points")),
        }
    }

    /// Retraction: coordinate addition with lattice reduction on tori, the
    /// projective retraction `(p+v)/|p+v|` on the sphere.
    pub fn retract(&self, p: &Point, v: &Tangent) -> Result<Point> {
        self.check_point(p)?;
        match (p, v) {
            (Point::Torus(x), Tangent::Torus(dv)) => {
                if dv.norm_sq() == 0.0 {
                    return Ok(*p);
                }
                Ok(Point::Torus(self.lattice().unwrap().reduce(*x + *dv)))
            }
            (Point::Sphere(x), Tangent::Sphere(dv)) => {
                let n = dv.norm();
                if n == 0.0 {
                    return Ok(*p);
                }
                if x.dot(*dv).abs() > 1e-10 * n.max(1.0) {
                    return Err(invalid("sphere retraction requires a tangent vector"));
                }
                let s = *x + *dv;
                let sn = s.norm();
                if sn < 1e-12 {
                    return Err(invalid("degenerate sphere retraction"));
                }
                Ok(Point::Sphere(s * (1.0 / sn)))
            }
            _ => Err(invalid("tangent kind does not match point kind")),
        }
    }

    /// Deterministic area-uniform sample (tori: uniform in the fundamental
    /// domain; sphere: normalized Gaussian 3-vector).
    pub fn random_point(&self, seed: u64) -> Point {
        let mut rng = Rng::new(seed);
        self.random_point_with(&mut rng)
    }

    pub fn random_point_with(&self, rng: &mut Rng) -> Point {
        match &self.repr {
            Repr::RoundSphere { .. } => loop {
                let v = Vec3::new(rng.normal(), rng.normal(), rng.normal());
                let n = v.norm();
                if n > 1e-6 {
                    return Point::Sphere(v * (1.0 / n));
                }
            },
            _ => {
                let lattice = self.lattice().unwrap();
                let s = Vec2::new(rng.uniform(), rng.uniform());
                Point::Torus(lattice.from_lattice(s))
            }
        }
    }

    /// Orthonormal chart basis of the tangent plane at `p` (Euclidean chart on
    /// tori, ambient tangent frame on the sphere).
    pub fn tangent_basis(&self, p: &Point) -> Result<[Tangent; 2]> {
        self.check_point(p)?;
        match p {
            Point::Torus(_) => Ok([
                Tangent::Torus(Vec2::new(1.0, 0.0)),
                Tangent::Torus(Vec2::new(0.0, 1.0)),
            ]),
            Point::Sphere(x) => {
                let axes = [
                    Vec3::new(1.0, 0.0, 0.0),
                    Vec3::new(0.0, 1.0, 0.0),
                    Vec3::new(0.0, 0.0, 1.0),
                ];
                let mut best = axes[0];
                let mut best_dot = f64::INFINITY;
                for a in axes {
                    let d = x.dot(a).abs();
                    if d < best_dot {
                        best_dot = d;
                        best = a;
                    }
                }
                let u = best.reject(*x).normalized();
                let w = x.cross(u);
                Ok([Tangent::Sphere(u), Tangent::Sphere(w)])
            }
        }
    }

    /// Chart area density: `dv = density * (chart measure)`. 1 on flat tori,
    /// `radius^2` on the unit-vector sphere chart, `e^{2u}` on the conformal
    /// torus.
    pub fn area_density(&self, p: &Point) -> Result<f64> {
        self.check_point(p)?;
        match (&self.repr, p) {
            (Repr::FlatTorus { .. }, _) => Ok(1.0),
            (Repr::RoundSphere { radius }, _) => Ok(radius * radius),
            (Repr::ConformalTorus { u, .. }, Point::Torus(x)) => Ok((2.0 * u.eval(*x)).exp()),
            _ => unreachable!(),
        }
    }

    /// Project an ambient vector onto the tangent space at `p`.
    pub fn project_tangent(&self, p: &Point, v: &Tangent) -> Result<Tangent> {
        self.check_point(p)?;
        match (p, v) {
            (Point::Torus(_), Tangent::Torus(_)) => Ok(*v),
            (Point::Sphere(x), Tangent::Sphere(w)) => Ok(Tangent::Sphere(w.reject(*x))),
            _ => Err(invalid("tangent kind does not match point kind")),
        }
    }
}

/// Minimum pairwise distance of a configuration.
pub fn min_pair_distance(s: &Surface, pts: &[Point]) -> Result<f64> {
    let mut best = f64::INFINITY;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            best = best.min(s.distance(&pts[i], &pts[j])?);
        }
    }
    Ok(best)
}

/// Product distance between two configurations of equal length.
pub fn config_distance(s: &Surface, a: &[Point], b: &[Point]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::InvalidInput("configuration lengths differ".into()));
    }
    let mut sum = 0.0;
    for (p, q) in a.iter().zip(b) {
        let d = s.distance(p, q)?;
        sum += d * d;
    }
    Ok(sum.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_torus_distances() {
        let s = Surface::unit_torus();
        let p = s.torus_point(0.0, 0.0).unwrap();
        assert_eq!(s.distance(&p, &p).unwrap(), 0.0);
        let a = s.torus_point(0.1, 0.0).unwrap();
        let b = s.torus_point(0.9, 0.0).unwrap();
        assert!((s.distance(&a, &b).unwrap() - 0.2).abs() < 1e-14);
    }

    #[test]
    fn sphere_antipodal_distance() {
        let s = Surface::round_sphere(1.0).unwrap();
        let n = s.sphere_point(Vec3::new(0.0, 0.0, 1.0)).unwrap();
        let sp = s.sphere_point(Vec3::new(0.0, 0.0, -1.0)).unwrap();
        assert!((s.distance(&n, &sp).unwrap() - core::f64::consts::PI).abs() < 1e-14);
    }

    #[test]
    fn torus_retract_reduces() {
        let s = Surface::unit_torus();
        let p = s.torus_point(0.9, 0.9).unwrap();
        let q = s
            .retract(&p, &Tangent::Torus(Vec2::new(0.2, 0.2)))
            .unwrap();
        let v = q.as_torus().unwrap();
        assert!((v.x - 0.1).abs() < 1e-12 && (v.y - 0.1).abs() < 1e-12);
        // zero step is exact
        let r = s.retract(&p, &Tangent::Torus(Vec2::ZERO)).unwrap();
        assert_eq!(r, p);
    }

    #[test]
    fn sphere_retract_is_projective() {
        let s = Surface::round_sphere(1.0).unwrap();
        let p = s.sphere_point(Vec3::new(1.0, 0.0, 0.0)).unwrap();
        let q = s
            .retract(&p, &Tangent::Sphere(Vec3::new(0.0, 0.1, 0.0)))
            .unwrap();
        let want = Vec3::new(1.0, 0.1, 0.0).normalized();
        assert!((q.as_sphere().unwrap() - want).norm() < 1e-15);
        // non-tangent vector is rejected
        assert!(s
            .retract(&p, &Tangent::Sphere(Vec3::new(0.1, 0.0, 0.0)))
            .is_err());
    }

    #[test]
    fn random_point_determinism_and_invariant() {
        let s = Surface::round_sphere(2.0).unwrap();
        let a = s.random_point(123);
        let b = s.random_point(123);
        assert_eq!(a, b);
        assert!((a.as_sphere().unwrap().norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn kind_mismatch_is_invalid_input() {
        let t = Surface::unit_torus();
        let s = Surface::round_sphere(1.0).unwrap();
        let p = t.torus_point(0.1, 0.2).unwrap();
        let q = s.sphere_point(Vec3::new(0.0, 0.0, 1.0)).unwrap();
        assert!(matches!(t.distance(&p, &q), Err(Error::InvalidInput(_))));
        assert!(matches!(s.distance(&q, &p), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn lattice_reduction_keeps_torus() {
        // a sheared basis reduces to something with the same volume
        let l = Lattice::new(Vec2::new(1.0, 0.0), Vec2::new(3.0, 1.0)).unwrap();
        assert!((l.volume() - 1.0).abs() < 1e-14);
        let (a1, a2) = l.basis();
        assert!(a1.norm() <= a2.norm() + 1e-14);
        assert!(a1.dot(a2).abs() <= 0.5 * a1.norm_sq() + 1e-14);
    }

    #[test]
    fn degenerate_lattice_rejected() {
        assert!(Surface::flat_torus(Vec2::new(1.0, 0.0), Vec2::new(2.0, 0.0)).is_err());
    }
}
