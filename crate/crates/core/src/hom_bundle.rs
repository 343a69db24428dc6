//! The morphism bundle T*M ⊗ TN over M × N.
//!
//! A fiber element ξ: T_xM → T_yN is stored as a (dim N × dim M) matrix in a
//! pair of orthonormal frames, so the Frobenius norm of the stored matrix is
//! the norm induced by g*_M ⊗ g_N. The connection on the bundle is the tensor
//! product of the Levi-Civita connections on the two factors.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::manifolds::{ManifoldModel, Point};

/// Orthonormality tolerance for caller-supplied frames.
pub const FRAME_TOL: f64 = 1e-12;

/// The bundle T*M ⊗ TN for a domain `M` and a target `N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomBundle {
    domain: ManifoldModel,
    target: ManifoldModel,
}

/// ξ ∈ T*_xM ⊗ T_yN in the frames `frame_x` (columns span T_xM) and `frame_y`.
#[derive(Debug, Clone, PartialEq)]
pub struct HomElement {
    base_x: Point,
    base_y: Point,
    frame_x: DMatrix<f64>,
    frame_y: DMatrix<f64>,
    matrix: DMatrix<f64>,
}

impl HomBundle {
    pub fn new(domain: ManifoldModel, target: ManifoldModel) -> Self {
        Self { domain, target }
    }

    pub fn domain(&self) -> &ManifoldModel {
        &self.domain
    }

    pub fn target(&self) -> &ManifoldModel {
        &self.target
    }

    /// (rows, cols) = (dim N, dim M).
    pub fn fiber_shape(&self) -> (usize, usize) {
        (self.target.intrinsic_dim(), self.domain.intrinsic_dim())
    }

    pub fn is_flat(&self) -> bool {
        self.domain.is_flat() && self.target.is_flat()
    }

    /// Element in the default frames of both factors.
    pub fn element(&self, x: Point, y: Point, matrix: DMatrix<f64>) -> Result<HomElement> {
        self.domain.check_point(&x)?;
        self.target.check_point(&y)?;
        let frame_x = self.domain.tangent_frame(&x);
        let frame_y = self.target.tangent_frame(&y);
        self.check_shape(&matrix)?;
        Ok(HomElement { base_x: x, base_y: y, frame_x, frame_y, matrix })
    }

    /// Element in caller-chosen frames; the frames are validated.
    pub fn element_with_frames(
        &self,
        x: Point,
        y: Point,
        frame_x: DMatrix<f64>,
        frame_y: DMatrix<f64>,
        matrix: DMatrix<f64>,
    ) -> Result<HomElement> {
        self.domain.check_point(&x)?;
        self.target.check_point(&y)?;
        check_frame(&self.domain, &x, &frame_x)?;
        check_frame(&self.target, &y, &frame_y)?;
        self.check_shape(&matrix)?;
        Ok(HomElement { base_x: x, base_y: y, frame_x, frame_y, matrix })
    }

    /// Element from an ambient (ambient N × ambient M) representation; the
    /// result is the restriction to T_xM followed by projection onto T_yN.
    pub fn from_ambient(&self, x: Point, y: Point, ambient: &DMatrix<f64>) -> Result<HomElement> {
        self.domain.check_point(&x)?;
        self.target.check_point(&y)?;
        let frame_x = self.domain.tangent_frame(&x);
        let frame_y = self.target.tangent_frame(&y);
        let matrix = frame_y.transpose() * ambient * &frame_x;
        Ok(HomElement { base_x: x, base_y: y, frame_x, frame_y, matrix })
    }

    /// The zero of the fiber over (x, y), identified with the base pair itself.
    pub fn zero(&self, x: Point, y: Point) -> Result<HomElement> {
        let (r, c) = self.fiber_shape();
        self.element(x, y, DMatrix::zeros(r, c))
    }

    /// Parallel transport of `h` to the fiber over (x2, y2) along the
    /// minimizing geodesics of M and N. The frames are transported with the
    /// element, so the stored matrix is unchanged.
    pub fn transport(&self, h: &HomElement, x2: &Point, y2: &Point) -> Result<HomElement> {
        self.domain.check_point(x2)?;
        self.target.check_point(y2)?;
        let pm = self.domain.transport(&h.base_x, x2)?;
        let pn = self.target.transport(&h.base_y, y2)?;
        Ok(HomElement {
            base_x: x2.clone(),
            base_y: y2.clone(),
            frame_x: pm.apply_columns(&h.frame_x),
            frame_y: pn.apply_columns(&h.frame_y),
            matrix: h.matrix.clone(),
        })
    }

    /// Transports `h` to the base of `at` and returns its matrix in the frames of `at`.
    pub fn transport_matrix_to(&self, h: &HomElement, at: &HomElement) -> Result<DMatrix<f64>> {
        let moved = self.transport(h, &at.base_x, &at.base_y)?;
        Ok(moved.matrix_in_frames(&at.frame_x, &at.frame_y))
    }

    fn check_shape(&self, m: &DMatrix<f64>) -> Result<()> {
        let (r, c) = self.fiber_shape();
        if m.nrows() != r || m.ncols() != c {
            return Err(Error::Contract(format!(
                "fiber matrix must be {r}×{c}, got {}×{}",
                m.nrows(),
                m.ncols()
            )));
        }
        Ok(())
    }
}

fn check_frame(m: &ManifoldModel, x: &Point, frame: &DMatrix<f64>) -> Result<()> {
    if frame.nrows() != m.ambient_dim() || frame.ncols() != m.intrinsic_dim() {
        return Err(Error::Contract(format!(
            "frame must be {}×{}, got {}×{}",
            m.ambient_dim(),
            m.intrinsic_dim(),
            frame.nrows(),
            frame.ncols()
        )));
    }
    let gram = frame.transpose() * frame;
    let defect = (gram - DMatrix::identity(frame.ncols(), frame.ncols())).amax();
    if defect > FRAME_TOL {
        return Err(Error::Contract(format!("frame not orthonormal (defect {defect:.3e})")));
    }
    for col in frame.column_iter() {
        m.check_tangent(x, &col.into_owned())?;
    }
    Ok(())
}

impl HomElement {
    pub fn base_x(&self) -> &Point {
        &self.base_x
    }

    pub fn base_y(&self) -> &Point {
        &self.base_y
    }

    pub fn frame_x(&self) -> &DMatrix<f64> {
        &self.frame_x
    }

    pub fn frame_y(&self) -> &DMatrix<f64> {
        &self.frame_y
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Same base and frames, new matrix.
    pub fn with_matrix(&self, matrix: DMatrix<f64>) -> Result<Self> {
        if matrix.shape() != self.matrix.shape() {
            return Err(Error::Contract("fiber matrix shape changed".into()));
        }
        Ok(Self { matrix, ..self.clone() })
    }

    /// ξ as an (ambient N × ambient M) matrix: frame_y · matrix · frame_xᵀ.
    pub fn ambient(&self) -> DMatrix<f64> {
        &self.frame_y * &self.matrix * self.frame_x.transpose()
    }

    /// The columns ξ(e_i) as ambient vectors, for the frame e of T_xM.
    pub fn ambient_columns(&self) -> DMatrix<f64> {
        &self.frame_y * &self.matrix
    }

    /// Matrix of this element in other frames at the same base.
    pub fn matrix_in_frames(&self, frame_x: &DMatrix<f64>, frame_y: &DMatrix<f64>) -> DMatrix<f64> {
        frame_y.transpose() * &self.frame_y * &self.matrix * (self.frame_x.transpose() * frame_x)
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.iter().all(|&v| v == 0.0)
    }

    /// (g*_M ⊗ g_N)(ξ, ξ) = Σ_i g_N(ξ e_i, ξ e_i).
    pub fn norm_squared(&self) -> f64 {
        self.matrix.norm_squared()
    }
}

/// sqrt(Σ_i |ξ(e_i)|²) over an orthonormal frame of T_xM.
pub fn frobenius_norm(h: &HomElement) -> f64 {
    h.matrix
        .column_iter()
        .map(|col| (&h.frame_y * col).norm_squared())
        .sum::<f64>()
        .sqrt()
}

/// sup_{|v| ≤ 1} |ξ v|: the largest singular value.
pub fn operator_norm(h: &HomElement) -> f64 {
    operator_norm_of(&h.matrix)
}

pub(crate) fn operator_norm_of(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() || m.iter().all(|&v| v == 0.0) {
        return 0.0;
    }
    m.singular_values().max()
}

/// A nonexpansive ρ: ℝ^n → ℝ^k that is an isometry on im ξ, and |ρ ∘ ξ|.
#[derive(Debug, Clone, PartialEq)]
pub struct PostcompositionReduction {
    pub rho: DMatrix<f64>,
    pub value: f64,
}

/// Builds ρ from the left singular vectors of ξ (padded with zero rows up to
/// k), so that ρ is an isometry on im ξ and |ρ ∘ ξ| = |ξ|.
pub fn reduce_frobenius_by_postcomposition(h: &HomElement, k: usize) -> Result<PostcompositionReduction> {
    isometric_postcomposition(&h.matrix, k)
}

pub(crate) fn isometric_postcomposition(xi: &DMatrix<f64>, k: usize) -> Result<PostcompositionReduction> {
    let (n, m) = xi.shape();
    if k < n.min(m) {
        return Err(Error::Contract(format!("k = {k} < min(m, n) = {}", n.min(m))));
    }
    let svd = xi.clone().svd(true, false);
    let u = svd.u.expect("left singular vectors were requested");
    let mut rho = DMatrix::zeros(k, n);
    for (i, col) in u.column_iter().enumerate() {
        rho.row_mut(i).copy_from(&col.transpose());
    }
    let value = (&rho * xi).norm();
    Ok(PostcompositionReduction { rho, value })
}

/// max over `samples` random ρ with |ρ|_op = 1 of |ρ ∘ ξ|; never exceeds |ξ|.
pub fn max_random_nonexpansive_postcomposition(
    h: &HomElement,
    k: usize,
    samples: usize,
    seed: u64,
) -> f64 {
    sample_nonexpansive(&h.matrix, k, samples, seed)
}

pub(crate) fn sample_nonexpansive(xi: &DMatrix<f64>, k: usize, samples: usize, seed: u64) -> f64 {
    let n = xi.nrows();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: f64 = 0.0;
    for _ in 0..samples {
        let rho = DMatrix::<f64>::from_fn(k, n, |_, _| StandardNormal.sample(&mut rng));
        let op = operator_norm_of(&rho);
        if op == 0.0 {
            continue;
        }
        best = best.max((rho * xi).norm() / op);
    }
    best
}

/// Matrix of `h` in frames rotated by orthogonal `qx`, `qy` (frame' = frame·q).
pub fn rotate_frames(h: &HomElement, qx: &DMatrix<f64>, qy: &DMatrix<f64>) -> Result<HomElement> {
    let frame_x = &h.frame_x * qx;
    let frame_y = &h.frame_y * qy;
    let matrix = qy.transpose() * &h.matrix * qx;
    let bundle_check = |frame: &DMatrix<f64>| -> Result<()> {
        let d = (frame.transpose() * frame - DMatrix::identity(frame.ncols(), frame.ncols())).amax();
        if d > FRAME_TOL {
            return Err(Error::Contract("rotated frame not orthonormal".into()));
        }
        Ok(())
    };
    bundle_check(&frame_x)?;
    bundle_check(&frame_y)?;
    Ok(HomElement { base_x: h.base_x.clone(), base_y: h.base_y.clone(), frame_x, frame_y, matrix })
}

pub(crate) fn frobenius_inner(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.dot(b)
}
