//! The λ-family of metrics on T*M ⊗ TN with its tensor-product metric connection.
//!
//! For ν ∈ T(T*M ⊗ TN) with horizontal part h = Dπ(ν), connection part
//! k = K(ν) and footpoint e = π(ν),
//!
//! ```text
//! G^λ(ν) = g(h) + (λ g(k,k) + (1 − λ) g(k,e)²) / (λ + (1 − λ) g(e,e))
//! ```
//!
//! λ = 1 is the Sasaki metric, λ = 1/2 the Cheeger–Gromoll metric and λ = 0
//! the degenerate limit. Geodesic distances are only computed exactly in flat
//! bundles; elsewhere this module produces lengths of explicit competitor
//! paths, which are upper bounds for the distance.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::hom_bundle::{frobenius_inner, HomBundle, HomElement};
use crate::manifolds::Point;
use crate::sampling;

/// Default number of parameter steps for discretized bundle paths.
pub const DEFAULT_PATH_STEPS: usize = 1024;

/// Parameter of the metric family, in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Lambda(f64);

impl Lambda {
    pub const SASAKI: Lambda = Lambda(1.0);
    pub const CHEEGER_GROMOLL: Lambda = Lambda(0.5);
    pub const DEGENERATE: Lambda = Lambda(0.0);

    pub fn new(value: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::Contract(format!("λ = {value} outside [0, 1]")));
        }
        Ok(Lambda(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// A tangent vector to the bundle, split by the connection.
#[derive(Debug, Clone, PartialEq)]
pub struct BundleTangent {
    base: HomElement,
    horizontal_x: DVector<f64>,
    horizontal_y: DVector<f64>,
    vertical: DMatrix<f64>,
}

impl BundleTangent {
    pub fn new(
        bundle: &HomBundle,
        base: HomElement,
        horizontal_x: DVector<f64>,
        horizontal_y: DVector<f64>,
        vertical: DMatrix<f64>,
    ) -> Result<Self> {
        bundle.domain().check_tangent(base.base_x(), &horizontal_x)?;
        bundle.target().check_tangent(base.base_y(), &horizontal_y)?;
        if vertical.shape() != base.matrix().shape() {
            return Err(Error::Contract(format!(
                "vertical part must have shape {:?}, got {:?}",
                base.matrix().shape(),
                vertical.shape()
            )));
        }
        Ok(Self { base, horizontal_x, horizontal_y, vertical })
    }

    /// V_e(k): pure fiber motion at e in direction k.
    pub fn vertical_lift(bundle: &HomBundle, base: HomElement, direction: DMatrix<f64>) -> Result<Self> {
        let hx = DVector::zeros(bundle.domain().ambient_dim());
        let hy = DVector::zeros(bundle.target().ambient_dim());
        Self::new(bundle, base, hx, hy, direction)
    }

    pub fn base(&self) -> &HomElement {
        &self.base
    }

    pub fn horizontal_x(&self) -> &DVector<f64> {
        &self.horizontal_x
    }

    pub fn horizontal_y(&self) -> &DVector<f64> {
        &self.horizontal_y
    }

    pub fn vertical(&self) -> &DMatrix<f64> {
        &self.vertical
    }

    /// The horizontal lift of Dπ(ν): same horizontal part, no connection part.
    pub fn horizontal_projection(&self) -> Self {
        Self { vertical: DMatrix::zeros(self.vertical.nrows(), self.vertical.ncols()), ..self.clone() }
    }

    pub fn scaled(&self, t: f64) -> Self {
        Self {
            base: self.base.clone(),
            horizontal_x: &self.horizontal_x * t,
            horizontal_y: &self.horizontal_y * t,
            vertical: &self.vertical * t,
        }
    }

    /// g_{M×N}(Dπ ν).
    pub fn horizontal_norm_squared(&self) -> f64 {
        self.horizontal_x.norm_squared() + self.horizontal_y.norm_squared()
    }

    /// (g(k,k), g(k,e), g(e,e)).
    pub fn fiber_products(&self) -> (f64, f64, f64) {
        let e = self.base.matrix();
        (
            self.vertical.norm_squared(),
            frobenius_inner(&self.vertical, e),
            e.norm_squared(),
        )
    }

    /// D g_E(ν) = 2 g(K ν, π ν) for the metric connection.
    pub fn norm_derivative(&self) -> f64 {
        2.0 * frobenius_inner(&self.vertical, self.base.matrix())
    }
}

/// G^λ from its scalar ingredients g(h), g(k,k), g(k,e), g(e,e).
pub fn lambda_metric(lambda: Lambda, horizontal: f64, kk: f64, ke: f64, ee: f64) -> Result<f64> {
    let l = lambda.value();
    let denominator = l + (1.0 - l) * ee;
    let numerator = l * kk + (1.0 - l) * ke * ke;
    let fiber = if denominator > 0.0 {
        numerator / denominator
    } else if kk == 0.0 {
        0.0
    } else {
        return Err(Error::DegenerateMetric);
    };
    Ok(horizontal + fiber)
}

pub fn eval_lambda_metric(lambda: Lambda, nu: &BundleTangent) -> Result<f64> {
    let (kk, ke, ee) = nu.fiber_products();
    lambda_metric(lambda, nu.horizontal_norm_squared(), kk, ke, ee)
}

/// Samples of a bundle path at uniform parameter steps on [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct BundlePath {
    samples: Vec<HomElement>,
}

impl BundlePath {
    pub fn new(samples: Vec<HomElement>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::Contract("a bundle path needs at least 2 samples".into()));
        }
        Ok(Self { samples })
    }

    pub fn samples(&self) -> &[HomElement] {
        &self.samples
    }

    pub fn step(&self) -> f64 {
        1.0 / (self.samples.len() - 1) as f64
    }
}

/// Finite-difference velocity at `from` toward `to`: geodesic displacement for
/// the base, transport-back difference for the connection part.
fn difference_velocity(bundle: &HomBundle, from: &HomElement, to: &HomElement, dt: f64) -> Result<BundleTangent> {
    let hx = bundle.domain().log_map(from.base_x(), to.base_x())? / dt;
    let hy = bundle.target().log_map(from.base_y(), to.base_y())? / dt;
    let back = bundle.transport_matrix_to(to, from)?;
    let k = (back - from.matrix()) / dt;
    Ok(BundleTangent { base: from.clone(), horizontal_x: hx, horizontal_y: hy, vertical: k })
}

/// ∫₀¹ √(G^λ(γ'(τ))) dτ by the trapezoidal rule, with the forward difference
/// at the left end of each step and the backward difference at the right end.
pub fn path_length(bundle: &HomBundle, lambda: Lambda, path: &BundlePath) -> Result<f64> {
    let dt = path.step();
    let mut total = 0.0;
    for pair in path.samples.windows(2) {
        let fwd = difference_velocity(bundle, &pair[0], &pair[1], dt)?;
        let bwd = difference_velocity(bundle, &pair[1], &pair[0], dt)?.scaled(-1.0);
        let a = eval_lambda_metric(lambda, &fwd)?.max(0.0).sqrt();
        let b = eval_lambda_metric(lambda, &bwd)?.max(0.0).sqrt();
        total += 0.5 * dt * (a + b);
    }
    Ok(total)
}

fn base_distance_squared(bundle: &HomBundle, e1: &HomElement, e2: &HomElement) -> f64 {
    bundle.domain().geodesic_distance(e1.base_x(), e2.base_x()).powi(2)
        + bundle.target().geodesic_distance(e1.base_y(), e2.base_y()).powi(2)
}

/// Exact Sasaki distance when both factors are flat:
/// sqrt(d_{M×N}² + |ξ₁ − ξ₂|²).
pub fn sasaki_distance_flat(bundle: &HomBundle, e1: &HomElement, e2: &HomElement) -> Result<f64> {
    if !bundle.is_flat() {
        return Err(Error::Contract(format!(
            "flat Sasaki distance needs flat factors, got {} and {}",
            bundle.domain(),
            bundle.target()
        )));
    }
    let fiber = (e1.ambient() - e2.ambient()).norm_squared();
    Ok((base_distance_squared(bundle, e1, e2) + fiber).sqrt())
}

/// Sasaki length of the competitor that follows the minimizing base geodesic:
/// sqrt(|e₁ − P(e₂)|² + d_{M×N}²). It bounds the Sasaki distance from above
/// and equals it in flat bundles.
pub fn sasaki_distance_upper_bound(bundle: &HomBundle, e1: &HomElement, e2: &HomElement) -> Result<f64> {
    if e1 == e2 {
        return Ok(0.0);
    }
    sasaki_competitor_via(bundle, e1, e2, &[])
}

/// Sasaki competitor whose N-component runs along great-circle arcs
/// y₁ → w₁ → … → w_k → y₂ while the M-component follows its geodesic.
/// Returns sqrt(|e₁ − P^γ(e₂)|² + d_M² + L_N²), with P^γ the transport back
/// along the whole polyline.
pub fn sasaki_competitor_via(
    bundle: &HomBundle,
    e1: &HomElement,
    e2: &HomElement,
    waypoints: &[Point],
) -> Result<f64> {
    let target = bundle.target();
    let mut stops: Vec<&Point> = Vec::with_capacity(waypoints.len() + 2);
    stops.push(e1.base_y());
    stops.extend(waypoints.iter());
    stops.push(e2.base_y());
    let mut length = 0.0;
    for pair in stops.windows(2) {
        target.log_map(pair[0], pair[1])?;
        length += target.geodesic_distance(pair[0], pair[1]);
    }
    let dm = bundle.domain().geodesic_distance(e1.base_x(), e2.base_x());
    // walk e₂ back along the polyline
    let mut moved = e2.clone();
    for (i, y) in stops.iter().rev().skip(1).enumerate() {
        let x = if i == 0 { e1.base_x() } else { moved.base_x() };
        moved = bundle.transport(&moved, &x.clone(), y)?;
    }
    let back = moved.matrix_in_frames(e1.frame_x(), e1.frame_y());
    let fiber = (e1.matrix() - back).norm_squared();
    Ok((fiber + dm * dm + length * length).sqrt())
}

/// Distance of the degenerate λ = 0 metric:
/// sqrt(d_{M×N}² + (|e₁| − |e₂|)²).
pub fn degenerate_distance(bundle: &HomBundle, e1: &HomElement, e2: &HomElement) -> f64 {
    let dn = e1.matrix().norm() - e2.matrix().norm();
    (base_distance_squared(bundle, e1, e2) + dn * dn).sqrt()
}

/// Competitor path from e₁ to e₂: the base follows its minimizing geodesic at
/// constant speed while the fiber element, written in frames transported
/// along that geodesic, turns from e₁ to P(e₂) in the plane they span with
/// linearly interpolated norm. Opposite elements turn through the plane of
/// the first standard direction orthogonal to e₁; in a one-dimensional fiber,
/// or when an endpoint is zero, the fiber moves along the straight segment.
pub fn fiber_rotation_path(bundle: &HomBundle, e1: &HomElement, e2: &HomElement, steps: usize) -> Result<BundlePath> {
    if steps == 0 {
        return Err(Error::Contract("path needs at least one step".into()));
    }
    let a = e1.matrix().clone();
    let b = bundle.transport_matrix_to(e2, e1)?;
    let lx = bundle.domain().log_map(e1.base_x(), e2.base_x())?;
    let ly = bundle.target().log_map(e1.base_y(), e2.base_y())?;
    let curve = FiberCurve::new(&a, &b);
    let mut samples = Vec::with_capacity(steps + 1);
    for j in 0..=steps {
        let t = j as f64 / steps as f64;
        let (x, y) = if j == steps {
            (e2.base_x().clone(), e2.base_y().clone())
        } else {
            (
                bundle.domain().exp_map(e1.base_x(), &(&lx * t))?,
                bundle.target().exp_map(e1.base_y(), &(&ly * t))?,
            )
        };
        let carried = bundle.transport(e1, &x, &y)?;
        samples.push(carried.with_matrix(curve.matrix(t))?);
    }
    BundlePath::new(samples)
}

/// The fiber part of the competitor, written in an orthonormal basis
/// (q0, q1) of the plane it moves in.
struct FiberCurve {
    q0: DMatrix<f64>,
    q1: DMatrix<f64>,
    shape: CurveShape,
}

enum CurveShape {
    /// radius from ra to rb while turning from q0 through `angle` toward q1
    Turn { ra: f64, rb: f64, angle: f64 },
    Straight { a: [f64; 2], b: [f64; 2] },
}

impl FiberCurve {
    fn new(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Self {
        let (ra, rb) = (a.norm(), b.norm());
        let zero = || a * 0.0;
        if ra > 0.0 && rb > 0.0 {
            let ua = a / ra;
            let ub = b / rb;
            let cos = ua.dot(&ub).clamp(-1.0, 1.0);
            let w = &ub - &ua * cos;
            let nw = w.norm();
            let turn = if nw > 1e-12 {
                Some((w / nw, nw.atan2(cos)))
            } else if cos > 0.0 {
                Some((zero(), 0.0))
            } else {
                orthogonal_direction(&ua).map(|c| (c, std::f64::consts::PI))
            };
            if let Some((q1, angle)) = turn {
                return Self { q0: ua, q1, shape: CurveShape::Turn { ra, rb, angle } };
            }
        }
        let q0 = if ra > 0.0 {
            a / ra
        } else if rb > 0.0 {
            b / rb
        } else {
            zero()
        };
        let w = b - &q0 * q0.dot(b);
        let q1 = if w.norm() > 1e-12 * rb.max(1.0) { &w / w.norm() } else { zero() };
        let coords = |m: &DMatrix<f64>| [q0.dot(m), q1.dot(m)];
        let shape = CurveShape::Straight { a: coords(a), b: coords(b) };
        Self { q0, q1, shape }
    }

    fn coords(&self, t: f64) -> [f64; 2] {
        match self.shape {
            CurveShape::Turn { ra, rb, angle } => {
                let r = (1.0 - t) * ra + t * rb;
                [r * (t * angle).cos(), r * (t * angle).sin()]
            }
            CurveShape::Straight { a, b } => [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])],
        }
    }

    fn matrix(&self, t: f64) -> DMatrix<f64> {
        let [c0, c1] = self.coords(t);
        &self.q0 * c0 + &self.q1 * c1
    }
}

/// First standard basis matrix with a residual above 0.1 after removing `u`.
fn orthogonal_direction(u: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let (r, c) = u.shape();
    if r * c < 2 {
        return None;
    }
    (0..r * c).find_map(|idx| {
        let mut e = DMatrix::zeros(r, c);
        e[(idx % r, idx / r)] = 1.0;
        let w = &e - u * u.dot(&e);
        let n = w.norm();
        (n > 0.1).then(|| w / n)
    })
}

/// Cheeger–Gromoll length of [`fiber_rotation_path`]; an upper bound for d^CG.
///
/// Evaluates the same discrete length as [`path_length`] on that path. The
/// base moves along geodesics at constant speed and the fiber frames are
/// parallel along them, so every difference velocity reduces to the base
/// speed and the coordinate increment of the fiber curve in its plane.
pub fn cheeger_gromoll_upper_bound(bundle: &HomBundle, e1: &HomElement, e2: &HomElement, steps: usize) -> Result<f64> {
    if steps == 0 {
        return Err(Error::Contract("path needs at least one step".into()));
    }
    if e1 == e2 {
        return Ok(0.0);
    }
    let b = bundle.transport_matrix_to(e2, e1)?;
    let base = bundle.domain().log_map(e1.base_x(), e2.base_x())?.norm_squared()
        + bundle.target().log_map(e1.base_y(), e2.base_y())?.norm_squared();
    let curve = FiberCurve::new(e1.matrix(), &b);
    let dt = 1.0 / steps as f64;
    let speed = |p: [f64; 2], k: [f64; 2]| -> Result<f64> {
        let kk = k[0] * k[0] + k[1] * k[1];
        let ke = k[0] * p[0] + k[1] * p[1];
        let ee = p[0] * p[0] + p[1] * p[1];
        Ok(lambda_metric(Lambda::CHEEGER_GROMOLL, base, kk, ke, ee)?.max(0.0).sqrt())
    };
    let mut prev = curve.coords(0.0);
    let mut total = 0.0;
    for j in 1..=steps {
        let next = curve.coords(j as f64 * dt);
        let k = [(next[0] - prev[0]) / dt, (next[1] - prev[1]) / dt];
        total += 0.5 * dt * (speed(prev, k)? + speed(next, k)?);
        prev = next;
    }
    Ok(total)
}

/// Maximum violations of the three strong-concordance clauses, each
/// normalized by max(1, |right-hand side|).
#[derive(Debug, Clone, PartialEq)]
pub struct ConcordanceReport {
    pub lambda: f64,
    pub samples: usize,
    pub seed: u64,
    /// G^λ(horizontal projection) ≤ G^λ(ν)
    pub horizontal: f64,
    /// (D g_E(ν))² ≤ 4 g(e,e) G^λ(ν)
    pub norm_derivative: f64,
    /// G^λ(V_e(e)) = g(e,e)
    pub vertical_lift: f64,
}

impl ConcordanceReport {
    pub fn max_violation(&self) -> f64 {
        self.horizontal.max(self.norm_derivative).max(self.vertical_lift)
    }
}

/// The reference bundle for random property checks: T*ℝ² ⊗ T𝕊².
pub fn reference_bundle() -> HomBundle {
    use crate::manifolds::ManifoldModel;
    HomBundle::new(
        ManifoldModel::euclidean(2).expect("dimension 2 is valid"),
        ManifoldModel::sphere(2).expect("dimension 2 is valid"),
    )
}

pub fn check_strong_concordance(lambda: Lambda, samples: usize, seed: u64) -> Result<ConcordanceReport> {
    let bundle = reference_bundle();
    let mut rng = sampling::rng(seed);
    let mut report = ConcordanceReport {
        lambda: lambda.value(),
        samples,
        seed,
        horizontal: 0.0,
        norm_derivative: 0.0,
        vertical_lift: 0.0,
    };
    for _ in 0..samples {
        let nu = sampling::random_bundle_tangent(&bundle, &mut rng);
        let g = eval_lambda_metric(lambda, &nu)?;
        let gh = eval_lambda_metric(lambda, &nu.horizontal_projection())?;
        report.horizontal = report.horizontal.max((gh - g) / g.max(1.0));

        let (_, _, ee) = nu.fiber_products();
        let lhs = nu.norm_derivative().powi(2);
        let rhs = 4.0 * ee * g;
        report.norm_derivative = report.norm_derivative.max((lhs - rhs) / rhs.max(1.0));

        let e = nu.base().matrix().clone();
        let lift = BundleTangent::vertical_lift(&bundle, nu.base().clone(), e)?;
        let gl = eval_lambda_metric(lambda, &lift)?;
        report.vertical_lift = report.vertical_lift.max((gl - ee).abs() / ee.max(1.0));
    }
    Ok(report)
}

/// Largest (G^CG(ν) − G^S(ν)) / max(1, G^S(ν)) over random ν.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub samples: usize,
    pub seed: u64,
    pub max_gap: f64,
}

pub fn check_cg_le_sasaki(samples: usize, seed: u64) -> Result<ComparisonReport> {
    let bundle = reference_bundle();
    let mut rng = sampling::rng(seed);
    let mut max_gap = f64::NEG_INFINITY;
    for _ in 0..samples {
        let nu = sampling::random_bundle_tangent(&bundle, &mut rng);
        let cg = eval_lambda_metric(Lambda::CHEEGER_GROMOLL, &nu)?;
        let s = eval_lambda_metric(Lambda::SASAKI, &nu)?;
        max_gap = max_gap.max((cg - s) / s.max(1.0));
    }
    Ok(ComparisonReport { samples, seed, max_gap })
}
