//! Concrete Riemannian manifolds in ambient coordinates.
//!
//! Every point and tangent vector is stored in the coordinates of the
//! embedding space: ℝ^n for the flat kinds, ℝ^{n+1} for 𝕊^n and ℝ² for 𝕊¹.
//! Spheres carry the round metric induced by the embedding, so geodesics are
//! great circles and parallel transport along a minimizing geodesic is the
//! rotation of the plane spanned by the two endpoints.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub type Point = DVector<f64>;

/// Tolerance of the membership predicate (unit norm, domain bounds).
pub const MEMBERSHIP_TOL: f64 = 1e-12;

/// Tolerance on |⟨x, v⟩| / max(1, |v|) for sphere tangent vectors.
pub const TANGENT_TOL: f64 = 1e-12;

/// Pairs with π − d(x, y) below this are treated as antipodal.
pub const ANTIPODAL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ManifoldKind {
    Euclidean(usize),
    Sphere(usize),
    Circle,
    Interval { a: f64, b: f64 },
    Rectangle { x0: f64, x1: f64, y0: f64, y1: f64 },
    Disk { radius: f64 },
}

/// A Riemannian manifold from the fixed menu {ℝ^n, 𝕊^n, 𝕊¹, interval, rectangle, disk}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ManifoldModel {
    kind: ManifoldKind,
}

impl ManifoldModel {
    pub fn euclidean(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Contract("euclidean dimension must be ≥ 1".into()));
        }
        Ok(Self { kind: ManifoldKind::Euclidean(n) })
    }

    pub fn sphere(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Contract("sphere dimension must be ≥ 1".into()));
        }
        Ok(Self { kind: ManifoldKind::Sphere(n) })
    }

    pub fn circle() -> Self {
        Self { kind: ManifoldKind::Circle }
    }

    pub fn interval(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::Contract(format!("invalid interval ({a}, {b})")));
        }
        Ok(Self { kind: ManifoldKind::Interval { a, b } })
    }

    pub fn rectangle(x0: f64, x1: f64, y0: f64, y1: f64) -> Result<Self> {
        let ok = [x0, x1, y0, y1].iter().all(|v| v.is_finite()) && x0 < x1 && y0 < y1;
        if !ok {
            return Err(Error::Contract(format!("invalid rectangle ({x0},{x1})×({y0},{y1})")));
        }
        Ok(Self { kind: ManifoldKind::Rectangle { x0, x1, y0, y1 } })
    }

    pub fn disk(radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::Contract(format!("invalid disk radius {radius}")));
        }
        Ok(Self { kind: ManifoldKind::Disk { radius } })
    }

    pub fn kind(&self) -> ManifoldKind {
        self.kind
    }

    pub fn intrinsic_dim(&self) -> usize {
        match self.kind {
            ManifoldKind::Euclidean(n) | ManifoldKind::Sphere(n) => n,
            ManifoldKind::Circle | ManifoldKind::Interval { .. } => 1,
            ManifoldKind::Rectangle { .. } | ManifoldKind::Disk { .. } => 2,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        match self.kind {
            ManifoldKind::Sphere(n) => n + 1,
            ManifoldKind::Circle => 2,
            _ => self.intrinsic_dim(),
        }
    }

    /// Flat kinds: ℝ^n and the three chart domains.
    pub fn is_flat(&self) -> bool {
        !self.is_round()
    }

    fn is_round(&self) -> bool {
        matches!(self.kind, ManifoldKind::Sphere(_) | ManifoldKind::Circle)
    }

    fn is_circle(&self) -> bool {
        matches!(self.kind, ManifoldKind::Circle | ManifoldKind::Sphere(1))
    }

    /// True when parallel transport does not depend on the path, so the
    /// minimizing-geodesic Sasaki competitor is the exact distance.
    /// Holds for the flat kinds and for 𝕊¹, whose tangent line bundle is flat.
    pub fn has_path_independent_transport(&self) -> bool {
        self.is_flat() || self.is_circle()
    }

    pub fn is_domain(&self) -> bool {
        matches!(
            self.kind,
            ManifoldKind::Interval { .. } | ManifoldKind::Rectangle { .. } | ManifoldKind::Disk { .. }
        )
    }

    pub fn injectivity_radius(&self) -> f64 {
        if self.is_round() {
            PI
        } else {
            f64::INFINITY
        }
    }

    fn check_dim(&self, v: &DVector<f64>) -> Result<()> {
        if v.len() != self.ambient_dim() {
            return Err(Error::DimensionMismatch { expected: self.ambient_dim(), found: v.len() });
        }
        Ok(())
    }

    /// Membership predicate at tolerance [`MEMBERSHIP_TOL`].
    pub fn contains(&self, x: &DVector<f64>) -> bool {
        if x.len() != self.ambient_dim() || x.iter().any(|c| !c.is_finite()) {
            return false;
        }
        let tol = MEMBERSHIP_TOL;
        match self.kind {
            ManifoldKind::Euclidean(_) => true,
            ManifoldKind::Sphere(_) | ManifoldKind::Circle => (x.norm() - 1.0).abs() <= tol,
            ManifoldKind::Interval { a, b } => x[0] >= a - tol && x[0] <= b + tol,
            ManifoldKind::Rectangle { x0, x1, y0, y1 } => {
                x[0] >= x0 - tol && x[0] <= x1 + tol && x[1] >= y0 - tol && x[1] <= y1 + tol
            }
            ManifoldKind::Disk { radius } => x.norm() <= radius + tol,
        }
    }

    pub fn check_point(&self, x: &DVector<f64>) -> Result<()> {
        self.check_dim(x)?;
        if !self.contains(x) {
            return Err(Error::NotOnManifold(format!("{x:?} ∉ {self}")));
        }
        Ok(())
    }

    /// Normal residual |⟨x, v⟩| / max(1, |v|); zero on flat kinds.
    pub fn tangent_residual(&self, x: &DVector<f64>, v: &DVector<f64>) -> f64 {
        if self.is_round() {
            x.dot(v).abs() / v.norm().max(1.0)
        } else {
            0.0
        }
    }

    pub fn check_tangent(&self, x: &DVector<f64>, v: &DVector<f64>) -> Result<()> {
        self.check_dim(v)?;
        let residual = self.tangent_residual(x, v);
        if residual > TANGENT_TOL {
            return Err(Error::NotTangent { residual });
        }
        Ok(())
    }

    pub fn exp_map(&self, x: &DVector<f64>, v: &DVector<f64>) -> Result<Point> {
        self.check_point(x)?;
        self.check_tangent(x, v)?;
        if self.is_flat() {
            let y = x + v;
            if !self.contains(&y) {
                return Err(Error::OutOfDomain(format!("exp_x(v) = {y:?} ∉ {self}")));
            }
            return Ok(y);
        }
        let theta = v.norm();
        // sin θ / θ, with its Taylor series near zero
        let sinc = if theta < 1e-4 { 1.0 - theta * theta / 6.0 } else { theta.sin() / theta };
        let y = x * theta.cos() + v * sinc;
        let norm = y.norm();
        Ok(y / norm)
    }

    pub fn log_map(&self, x: &DVector<f64>, y: &DVector<f64>) -> Result<DVector<f64>> {
        self.check_point(x)?;
        self.check_point(y)?;
        if self.is_flat() {
            return Ok(y - x);
        }
        let c = x.dot(y);
        let mut w = y - x * c;
        // second projection: θ/|w| amplifies the residual near antipodes
        w -= x * (x.dot(&w) / x.norm_squared());
        let nw = w.norm();
        let theta = nw.atan2(c);
        if PI - theta <= ANTIPODAL_TOL {
            return Err(Error::Singularity);
        }
        if nw == 0.0 {
            return Ok(DVector::zeros(x.len()));
        }
        Ok(w * (theta / nw))
    }

    pub fn geodesic_distance(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        if self.is_flat() {
            return (x - y).norm();
        }
        let diff = (x - y).norm();
        let sum = (x + y).norm();
        2.0 * diff.atan2(sum)
    }

    /// Parallel transport from T_xN to T_yN along the minimizing geodesic, as a
    /// linear map on ambient vectors.
    pub fn transport(&self, x: &DVector<f64>, y: &DVector<f64>) -> Result<Transport> {
        self.check_dim(x)?;
        self.check_dim(y)?;
        if self.is_flat() {
            return Ok(Transport::Identity);
        }
        let c = x.dot(y);
        let mut w = y - x * c;
        // second projection: θ/|w| amplifies the residual near antipodes
        w -= x * (x.dot(&w) / x.norm_squared());
        let nw = w.norm();
        let theta = nw.atan2(c);
        if PI - theta <= ANTIPODAL_TOL {
            return Err(Error::Singularity);
        }
        if nw == 0.0 {
            return Ok(Transport::Identity);
        }
        Ok(Transport::Rotation {
            from: x.clone(),
            direction: w / nw,
            cos: theta.cos(),
            sin: theta.sin(),
        })
    }

    pub fn parallel_transport(
        &self,
        x: &DVector<f64>,
        y: &DVector<f64>,
        v: &DVector<f64>,
    ) -> Result<DVector<f64>> {
        self.check_point(x)?;
        self.check_point(y)?;
        self.check_tangent(x, v)?;
        Ok(self.transport(x, y)?.apply(v))
    }

    pub fn project_to_tangent(&self, x: &DVector<f64>, w: &DVector<f64>) -> DVector<f64> {
        if self.is_flat() {
            w.clone()
        } else {
            // twice: one pass leaves ε|w| of normal component, which is large
            // relative to the result when w is nearly normal
            let once = w - x * (x.dot(w) / x.norm_squared());
            &once - x * (x.dot(&once) / x.norm_squared())
        }
    }

    /// Orthonormal frame of T_xN as the columns of an (ambient × intrinsic) matrix.
    ///
    /// Flat kinds use the standard basis. On 𝕊¹ the frame is the rotation of x
    /// by +π/2. On 𝕊^n, n ≥ 2, it is Gram–Schmidt of the reference axis e_n
    /// followed by e_0, …, e_{n-1}, rejecting candidates whose residual falls
    /// below 0.1 (the fallback when x is nearly parallel to the reference axis).
    pub fn tangent_frame(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let amb = self.ambient_dim();
        let dim = self.intrinsic_dim();
        if self.is_flat() {
            return DMatrix::identity(amb, dim);
        }
        if self.is_circle() {
            return DMatrix::from_column_slice(2, 1, &[-x[1], x[0]]);
        }
        let xn = x / x.norm();
        let mut accepted: Vec<DVector<f64>> = Vec::with_capacity(dim);
        let order: Vec<usize> = std::iter::once(amb - 1).chain(0..amb - 1).collect();
        for threshold in [0.1, 1e-8] {
            for &axis in &order {
                if accepted.len() == dim {
                    break;
                }
                let mut c = DVector::zeros(amb);
                c[axis] = 1.0;
                // two passes of modified Gram–Schmidt for orthogonality to 1e-15
                for _ in 0..2 {
                    let cx = c.dot(&xn);
                    c -= &xn * cx;
                    for a in &accepted {
                        let ca = c.dot(a);
                        c -= a * ca;
                    }
                }
                let nc = c.norm();
                if nc > threshold {
                    accepted.push(c / nc);
                }
            }
            if accepted.len() == dim {
                break;
            }
        }
        debug_assert_eq!(accepted.len(), dim);
        DMatrix::from_columns(&accepted)
    }
}

impl fmt::Display for ManifoldModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            ManifoldKind::Euclidean(n) => write!(f, "euclidean({n})"),
            ManifoldKind::Sphere(n) => write!(f, "sphere({n})"),
            ManifoldKind::Circle => write!(f, "circle"),
            ManifoldKind::Interval { a, b } => write!(f, "interval({a},{b})"),
            ManifoldKind::Rectangle { x0, x1, y0, y1 } => write!(f, "rectangle({x0},{x1},{y0},{y1})"),
            ManifoldKind::Disk { radius } => write!(f, "disk({radius})"),
        }
    }
}

impl FromStr for ManifoldModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = |msg: &str| Error::Parse { line: 0, message: format!("manifold `{s}`: {msg}") };
        let (name, args) = match s.find('(') {
            Some(open) => {
                let close = s.rfind(')').ok_or_else(|| bad("missing `)`"))?;
                (&s[..open], &s[open + 1..close])
            }
            None => (s, ""),
        };
        let nums: Vec<f64> = if args.trim().is_empty() {
            Vec::new()
        } else {
            args.split(',')
                .map(|a| a.trim().parse::<f64>().map_err(|_| bad("bad number")))
                .collect::<Result<_>>()?
        };
        let int = |v: f64| -> Result<usize> {
            if v >= 1.0 && v.fract() == 0.0 {
                Ok(v as usize)
            } else {
                Err(bad("dimension must be a positive integer"))
            }
        };
        match (name.trim(), nums.as_slice()) {
            ("euclidean", [n]) => Self::euclidean(int(*n)?),
            ("sphere", [n]) => Self::sphere(int(*n)?),
            ("circle", []) => Ok(Self::circle()),
            ("interval", [a, b]) => Self::interval(*a, *b),
            ("rectangle", [x0, x1, y0, y1]) => Self::rectangle(*x0, *x1, *y0, *y1),
            ("disk", [r]) => Self::disk(*r),
            _ => Err(bad("unknown kind or wrong arity")),
        }
    }
}

/// Parallel transport along a minimizing geodesic, as an ambient linear map.
#[derive(Debug, Clone, PartialEq)]
pub enum Transport {
    Identity,
    /// Rotation by the geodesic angle in the plane spanned by `from` and the
    /// unit initial direction; identity on the orthogonal complement.
    Rotation { from: DVector<f64>, direction: DVector<f64>, cos: f64, sin: f64 },
}

impl Transport {
    pub fn apply(&self, v: &DVector<f64>) -> DVector<f64> {
        match self {
            Transport::Identity => v.clone(),
            Transport::Rotation { from, direction, cos, sin } => {
                let a = from.dot(v);
                let b = direction.dot(v);
                v + from * ((cos - 1.0) * a - sin * b) + direction * ((cos - 1.0) * b + sin * a)
            }
        }
    }

    /// Applies the transport to every column of `m`.
    pub fn apply_columns(&self, m: &DMatrix<f64>) -> DMatrix<f64> {
        match self {
            Transport::Identity => m.clone(),
            Transport::Rotation { .. } => {
                let mut out = m.clone();
                for (j, col) in m.column_iter().enumerate() {
                    out.set_column(j, &self.apply(&col.into_owned()));
                }
                out
            }
        }
    }

    pub fn matrix(&self, dim: usize) -> DMatrix<f64> {
        self.apply_columns(&DMatrix::identity(dim, dim))
    }
}

/// A tangent vector in ambient coordinates together with its base point.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector {
    base: Point,
    vec: DVector<f64>,
}

impl TangentVector {
    pub fn new(m: &ManifoldModel, base: Point, vec: DVector<f64>) -> Result<Self> {
        m.check_point(&base)?;
        m.check_tangent(&base, &vec)?;
        Ok(Self { base, vec })
    }

    pub fn zero(m: &ManifoldModel, base: Point) -> Result<Self> {
        let n = m.ambient_dim();
        Self::new(m, base, DVector::zeros(n))
    }

    pub fn base(&self) -> &Point {
        &self.base
    }

    pub fn vec(&self) -> &DVector<f64> {
        &self.vec
    }

    pub fn norm_squared(&self) -> f64 {
        self.vec.norm_squared()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn v(c: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(c)
    }

    #[test]
    fn quarter_great_circle() {
        let s2 = ManifoldModel::sphere(2).unwrap();
        let y = s2.exp_map(&v(&[1.0, 0.0, 0.0]), &v(&[0.0, FRAC_PI_2, 0.0])).unwrap();
        assert!((y - v(&[0.0, 1.0, 0.0])).norm() < 1e-15);
        let back = s2.log_map(&v(&[1.0, 0.0, 0.0]), &v(&[0.0, 1.0, 0.0])).unwrap();
        assert!((back - v(&[0.0, FRAC_PI_2, 0.0])).norm() < 1e-15);
    }

    #[test]
    fn zero_velocity_and_flat_translation() {
        let r3 = ManifoldModel::euclidean(3).unwrap();
        let x = v(&[1.0, 2.0, 3.0]);
        assert_eq!(r3.exp_map(&x, &v(&[1.0, 0.0, 0.0])).unwrap(), v(&[2.0, 2.0, 3.0]));
        assert_eq!(r3.exp_map(&x, &DVector::zeros(3)).unwrap(), x);
        let s2 = ManifoldModel::sphere(2).unwrap();
        let p = v(&[0.6, 0.0, 0.8]);
        assert_eq!(s2.exp_map(&p, &DVector::zeros(3)).unwrap(), p);
        assert_eq!(s2.log_map(&p, &p).unwrap(), DVector::zeros(3));
    }

    #[test]
    fn distances() {
        let s2 = ManifoldModel::sphere(2).unwrap();
        let d = s2.geodesic_distance(&v(&[1.0, 0.0, 0.0]), &v(&[-1.0, 0.0, 0.0]));
        assert!((d - PI).abs() < 1e-15);
        let c = ManifoldModel::circle();
        let a = 3.0 * FRAC_PI_2;
        let d = c.geodesic_distance(&v(&[1.0, 0.0]), &v(&[a.cos(), a.sin()]));
        assert!((d - FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn errors() {
        let s2 = ManifoldModel::sphere(2).unwrap();
        let x = v(&[1.0, 0.0, 0.0]);
        assert!(matches!(s2.exp_map(&x, &v(&[0.1, 0.2, 0.0])), Err(Error::NotTangent { .. })));
        assert_eq!(s2.log_map(&x, &v(&[-1.0, 0.0, 0.0])), Err(Error::Singularity));
        assert_eq!(
            s2.parallel_transport(&x, &v(&[-1.0, 0.0, 0.0]), &v(&[0.0, 1.0, 0.0])),
            Err(Error::Singularity)
        );
        let i = ManifoldModel::interval(0.0, 1.0).unwrap();
        assert!(matches!(i.exp_map(&v(&[0.5]), &v(&[0.8])), Err(Error::OutOfDomain(_))));
        assert!(matches!(s2.exp_map(&v(&[1.0, 0.0]), &v(&[0.0, 0.0])), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn projection() {
        let s2 = ManifoldModel::sphere(2).unwrap();
        let x = v(&[1.0, 0.0, 0.0]);
        assert_eq!(s2.project_to_tangent(&x, &v(&[5.0, 1.0, 0.0])), v(&[0.0, 1.0, 0.0]));
        let t = v(&[0.0, 0.3, -0.2]);
        assert_eq!(s2.project_to_tangent(&x, &t), t);
    }

    #[test]
    fn frames_are_orthonormal_and_tangent() {
        let s3 = ManifoldModel::sphere(3).unwrap();
        for x in [v(&[0.0, 0.0, 0.0, 1.0]), v(&[0.5, 0.5, 0.5, 0.5]), v(&[1.0, 0.0, 0.0, 0.0])] {
            let f = s3.tangent_frame(&x);
            assert_eq!(f.ncols(), 3);
            assert!((f.transpose() * &f - DMatrix::identity(3, 3)).norm() < 1e-14);
            assert!((f.transpose() * &x).norm() < 1e-14);
        }
        let c = ManifoldModel::circle();
        let f = c.tangent_frame(&v(&[0.0, 1.0]));
        assert_eq!(f, DMatrix::from_column_slice(2, 1, &[-1.0, 0.0]));
    }

    #[test]
    fn kind_strings_roundtrip() {
        for s in ["euclidean(3)", "sphere(2)", "circle", "interval(-0.5,2)", "rectangle(0,1,0,2)", "disk(1)"] {
            let m: ManifoldModel = s.parse().unwrap();
            assert_eq!(m.to_string(), s);
        }
        assert!("torus(2)".parse::<ManifoldModel>().is_err());
        assert!("sphere(0)".parse::<ManifoldModel>().is_err());
    }
}
