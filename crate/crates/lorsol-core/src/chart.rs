//! Coordinate-chart tensor calculus for metrics with closed-form components.
//!
//! Everything is evaluated pointwise on demand via jets; there is no global
//! discretisation. The curvature convention is
//! `R(V,W) = nabla_{[V,W]} - [nabla_V, nabla_W]`, calibrated so that the
//! unit round sphere has sectional curvature +1 and the hyperbolic plane -1
//! (the sign-sentinel tests pin this end to end).

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::fm;
use crate::jet::Jet;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Signature {
    Riemannian,
    /// Signature (n-1, 1) with the last coordinate carrying the minus sign.
    LorentzianLast,
}

#[derive(Debug, Clone)]
pub enum ChartError {
    SingularMetric { detail: String },
    SignatureViolation { detail: String },
    DegeneratePlane,
    InsufficientOrder { needed: usize, got: usize },
}

impl core::fmt::Display for ChartError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ChartError::SingularMetric { detail } => write!(f, "singular metric: {detail}"),
            ChartError::SignatureViolation { detail } => {
                write!(f, "signature violation: {detail}")
            }
            ChartError::DegeneratePlane => write!(f, "degenerate tangent plane"),
            ChartError::InsufficientOrder { needed, got } => {
                write!(f, "jet order {got} too low, need {needed}")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ChartError {}

type MetricFn = dyn Fn(&[f64], usize) -> Vec<Jet> + Send + Sync;
type FieldFn = dyn Fn(&[f64], usize) -> Jet + Send + Sync;

/// Metric on an open coordinate box, with jet-valued component access.
#[derive(Clone)]
pub struct ChartMetric {
    dim: usize,
    signature: Signature,
    components: Arc<MetricFn>,
}

impl ChartMetric {
    /// `components(x, order)` must return the full `dim * dim` matrix of
    /// component jets in row-major order, symmetric at every point.
    pub fn new(dim: usize, signature: Signature, components: Arc<MetricFn>) -> Self {
        assert!(dim >= 1 && dim <= 3);
        ChartMetric { dim, signature, components }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn signature(&self) -> Signature {
        self.signature
    }

    /// Component jets at `x`, with a symmetry check.
    pub fn eval(&self, x: &[f64], order: usize) -> Vec<Jet> {
        assert_eq!(x.len(), self.dim);
        let g = (self.components)(x, order);
        assert_eq!(g.len(), self.dim * self.dim, "metric component count");
        for i in 0..self.dim {
            for j in (i + 1)..self.dim {
                let a = g[i * self.dim + j].value();
                let b = g[j * self.dim + i].value();
                assert!(
                    fm::abs(a - b) <= 1e-12 * (1.0 + fm::abs(a)),
                    "metric asymmetry at component ({i},{j})"
                );
            }
        }
        g
    }

    /// Component values only.
    pub fn values(&self, x: &[f64]) -> Vec<f64> {
        self.eval(x, 0).iter().map(Jet::value).collect()
    }

    /// Verify the declared signature at a point.
    pub fn check_signature(&self, x: &[f64]) -> Result<(), ChartError> {
        let v = self.values(x);
        let eig = sym_eigenvalues(&v, self.dim);
        let neg = eig.iter().filter(|&&e| e < 0.0).count();
        let zero = eig.iter().filter(|&&e| fm::abs(e) < 1e-13).count();
        if zero > 0 {
            return Err(ChartError::SingularMetric {
                detail: format!("eigenvalue near zero at {x:?}"),
            });
        }
        let want_neg = match self.signature {
            Signature::Riemannian => 0,
            Signature::LorentzianLast => 1,
        };
        if neg != want_neg {
            return Err(ChartError::SignatureViolation {
                detail: format!("{neg} negative eigenvalues at {x:?}, expected {want_neg}"),
            });
        }
        Ok(())
    }

    /// Euclidean metric on `dim` coordinates.
    pub fn euclidean(dim: usize) -> ChartMetric {
        ChartMetric::new(
            dim,
            Signature::Riemannian,
            Arc::new(move |_x: &[f64], order| identity_components(dim, order)),
        )
    }

    /// Conformal metric `s(x)^2 (dx^2 + dy^2 + ...)` for a jet-valued scale.
    pub fn conformal(
        dim: usize,
        scale_sq: Arc<dyn Fn(&[f64], usize) -> Jet + Send + Sync>,
    ) -> ChartMetric {
        ChartMetric::new(
            dim,
            Signature::Riemannian,
            Arc::new(move |x: &[f64], order| {
                let s = scale_sq(x, order);
                let zero = Jet::constant(0.0, dim, order);
                let mut g = vec![zero; dim * dim];
                for i in 0..dim {
                    g[i * dim + i] = s.clone();
                }
                g
            }),
        )
    }

    /// Polar-coordinate plane `dr^2 + r^2 dtheta^2`.
    pub fn polar_plane() -> ChartMetric {
        ChartMetric::new(
            2,
            Signature::Riemannian,
            Arc::new(|x: &[f64], order| {
                let r = Jet::variable(x[0], 0, 2, order);
                let zero = Jet::constant(0.0, 2, order);
                vec![
                    Jet::constant(1.0, 2, order),
                    zero.clone(),
                    zero,
                    r.powi(2),
                ]
            }),
        )
    }

    /// Hyperbolic upper half-plane `y^-2 (dx^2 + dy^2)`.
    pub fn hyperbolic_half_plane() -> ChartMetric {
        ChartMetric::conformal(
            2,
            Arc::new(|x: &[f64], order| Jet::variable(x[1], 1, 2, order).powi(2).recip()),
        )
    }

    /// Round unit sphere chart `dtheta^2 + sin^2(theta) dphi^2`.
    pub fn round_sphere() -> ChartMetric {
        ChartMetric::new(
            2,
            Signature::Riemannian,
            Arc::new(|x: &[f64], order| {
                let th = Jet::variable(x[0], 0, 2, order);
                let zero = Jet::constant(0.0, 2, order);
                vec![
                    Jet::constant(1.0, 2, order),
                    zero.clone(),
                    zero,
                    th.sin().powi(2),
                ]
            }),
        )
    }
}

fn identity_components(dim: usize, order: usize) -> Vec<Jet> {
    let zero = Jet::constant(0.0, dim, order);
    let mut g = vec![zero; dim * dim];
    for i in 0..dim {
        g[i * dim + i] = Jet::constant(1.0, dim, order);
    }
    g
}

/// Scalar field with jet-valued evaluation.
#[derive(Clone)]
pub struct ScalarField {
    vars: usize,
    eval: Arc<FieldFn>,
}

impl ScalarField {
    pub fn new(vars: usize, eval: Arc<FieldFn>) -> Self {
        ScalarField { vars, eval }
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn jet(&self, x: &[f64], order: usize) -> Jet {
        assert_eq!(x.len(), self.vars);
        let j = (self.eval)(x, order);
        assert_eq!(j.order(), order, "field returned wrong jet order");
        j
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.jet(x, 0).value()
    }
}

/// Matrix inverse for jet matrices of dimension <= 3 (cofactor form).
pub(crate) fn invert_jet_matrix(g: &[Jet], dim: usize) -> Result<Vec<Jet>, ChartError> {
    let at = |i: usize, j: usize| &g[i * dim + j];
    match dim {
        1 => {
            if at(0, 0).value() == 0.0 {
                return Err(ChartError::SingularMetric { detail: String::from("1x1 zero") });
            }
            Ok(vec![at(0, 0).recip()])
        }
        2 => {
            let det = &at(0, 0).mul(at(1, 1)) - &at(0, 1).mul(at(1, 0));
            if fm::abs(det.value()) < 1e-300 {
                return Err(ChartError::SingularMetric { detail: String::from("2x2 det ~ 0") });
            }
            let inv_det = det.recip();
            Ok(vec![
                at(1, 1).mul(&inv_det),
                at(0, 1).neg().mul(&inv_det),
                at(1, 0).neg().mul(&inv_det),
                at(0, 0).mul(&inv_det),
            ])
        }
        3 => {
            let c = |i1: usize, j1: usize, i2: usize, j2: usize| {
                &at(i1, j1).mul(at(i2, j2)) - &at(i1, j2).mul(at(i2, j1))
            };
            let det = &(&at(0, 0).mul(&c(1, 1, 2, 2)) - &at(0, 1).mul(&c(1, 0, 2, 2)))
                + &at(0, 2).mul(&c(1, 0, 2, 1));
            if fm::abs(det.value()) < 1e-300 {
                return Err(ChartError::SingularMetric { detail: String::from("3x3 det ~ 0") });
            }
            let inv_det = det.recip();
            let mut out = Vec::with_capacity(9);
            for i in 0..3 {
                for j in 0..3 {
                    // adjugate: cofactor of (j, i)
                    let (r0, r1) = match j {
                        0 => (1, 2),
                        1 => (0, 2),
                        _ => (0, 1),
                    };
                    let (c0, c1) = match i {
                        0 => (1, 2),
                        1 => (0, 2),
                        _ => (0, 1),
                    };
                    let minor = &at(r0, c0).mul(at(r1, c1)) - &at(r0, c1).mul(at(r1, c0));
                    let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                    out.push(minor.scale(sign).mul(&inv_det));
                }
            }
            Ok(out)
        }
        _ => unreachable!(),
    }
}

/// Eigenvalues of a symmetric matrix of dimension <= 3 (closed forms).
pub(crate) fn sym_eigenvalues(m: &[f64], dim: usize) -> Vec<f64> {
    match dim {
        1 => vec![m[0]],
        2 => {
            let (a, b, d) = (m[0], m[1], m[3]);
            let tr = a + d;
            let disc = fm::sqrt(((a - d) * 0.5) * ((a - d) * 0.5) + b * b);
            vec![0.5 * tr - disc, 0.5 * tr + disc]
        }
        3 => {
            // standard trigonometric solution for symmetric 3x3
            let a = [[m[0], m[1], m[2]], [m[3], m[4], m[5]], [m[6], m[7], m[8]]];
            let p1 = a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2];
            let q = (a[0][0] + a[1][1] + a[2][2]) / 3.0;
            if p1 < 1e-30 {
                return vec![a[0][0], a[1][1], a[2][2]];
            }
            let p2 = (a[0][0] - q) * (a[0][0] - q)
                + (a[1][1] - q) * (a[1][1] - q)
                + (a[2][2] - q) * (a[2][2] - q)
                + 2.0 * p1;
            let p = fm::sqrt(p2 / 6.0);
            let mut b = [[0.0f64; 3]; 3];
            for i in 0..3 {
                for j in 0..3 {
                    b[i][j] = (a[i][j] - if i == j { q } else { 0.0 }) / p;
                }
            }
            let detb = b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1])
                - b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0])
                + b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0]);
            let r = (detb / 2.0).clamp(-1.0, 1.0);
            let phi = fm::atan2(fm::sqrt((1.0 - r * r).max(0.0)), r) / 3.0;
            let e1 = q + 2.0 * p * fm::cos(phi);
            let e3 = q + 2.0 * p * fm::cos(phi + 2.0 * core::f64::consts::PI / 3.0);
            let e2 = 3.0 * q - e1 - e3;
            vec![e1, e2, e3]
        }
        _ => unreachable!(),
    }
}

/// Metric, inverse and Christoffel jets at a point, with matched orders:
/// `g` at `order`, `gamma` at `order - 1`.
pub struct MetricJets {
    pub dim: usize,
    pub order: usize,
    pub g: Vec<Jet>,
    pub ginv: Vec<Jet>,
    /// `gamma[k * dim * dim + i * dim + j]` = Gamma^k_ij, order - 1.
    pub gamma: Vec<Jet>,
}

impl MetricJets {
    pub fn at(m: &ChartMetric, x: &[f64], order: usize) -> Result<MetricJets, ChartError> {
        assert!(order >= 1, "christoffel needs metric jets of order >= 1");
        let dim = m.dim();
        let g = m.eval(x, order);
        let ginv = invert_jet_matrix(&g, dim)?;
        let gamma = christoffel_from_jets(&g, &ginv, dim);
        Ok(MetricJets { dim, order, g, ginv, gamma })
    }

    pub fn gamma_at(&self, k: usize, i: usize, j: usize) -> &Jet {
        &self.gamma[k * self.dim * self.dim + i * self.dim + j]
    }
}

/// `Gamma^k_ij = g^kl (d_i g_jl + d_j g_il - d_l g_ij) / 2` from component
/// jets of order `m`; the result has order `m - 1` and is `k`-major.
pub(crate) fn christoffel_from_jets(g: &[Jet], ginv: &[Jet], dim: usize) -> Vec<Jet> {
    let order = g[0].order();
    assert!(order >= 1);
    let dg: Vec<Vec<Jet>> = (0..dim)
        .map(|l| g.iter().map(|c| c.derivative(l)).collect())
        .collect();
    let ginv_lo: Vec<Jet> = ginv.iter().map(|c| c.truncated(order - 1)).collect();
    let mut gamma = Vec::with_capacity(dim * dim * dim);
    for k in 0..dim {
        for i in 0..dim {
            for j in 0..dim {
                let vars = g[0].vars();
                let mut acc = Jet::constant(0.0, vars, order - 1);
                for l in 0..dim {
                    let term =
                        &(&dg[i][j * dim + l] + &dg[j][i * dim + l]) - &dg[l][i * dim + j];
                    acc = acc.add(&ginv_lo[k * dim + l].mul(&term));
                }
                gamma.push(acc.scale(0.5));
            }
        }
    }
    gamma
}

/// Christoffel symbols `Gamma^k_ij` at `x`, `k` major.
pub fn christoffel(m: &ChartMetric, x: &[f64]) -> Result<Vec<f64>, ChartError> {
    let mj = MetricJets::at(m, x, 1)?;
    Ok(mj.gamma.iter().map(Jet::value).collect())
}

/// Covariant curvature `R_ijkl = g( R(d_i, d_j) d_k, d_l )` under the
/// convention `R(V,W) = nabla_{[V,W]} - [nabla_V, nabla_W]`; returned as a
/// flat `dim^4` array, `i` major.
pub fn riemann(m: &ChartMetric, x: &[f64]) -> Result<Vec<f64>, ChartError> {
    let mj = MetricJets::at(m, x, 2)?;
    riemann_from_jets(&mj)
}

pub(crate) fn riemann_from_jets(mj: &MetricJets) -> Result<Vec<f64>, ChartError> {
    let dim = mj.dim;
    // R^l_{k i j} = d_j Gamma^l_ik - d_i Gamma^l_jk
    //              + Gamma^l_jm Gamma^m_ik - Gamma^l_im Gamma^m_jk
    let mut rup = vec![0.0; dim * dim * dim * dim];
    for l in 0..dim {
        for k in 0..dim {
            for i in 0..dim {
                for j in 0..dim {
                    let mut v = mj.gamma_at(l, i, k).derivative(j).value()
                        - mj.gamma_at(l, j, k).derivative(i).value();
                    for mm in 0..dim {
                        v += mj.gamma_at(l, j, mm).value() * mj.gamma_at(mm, i, k).value()
                            - mj.gamma_at(l, i, mm).value() * mj.gamma_at(mm, j, k).value();
                    }
                    rup[((l * dim + k) * dim + i) * dim + j] = v;
                }
            }
        }
    }
    let gv: Vec<f64> = mj.g.iter().map(Jet::value).collect();
    let mut out = vec![0.0; dim * dim * dim * dim];
    for i in 0..dim {
        for j in 0..dim {
            for k in 0..dim {
                for l in 0..dim {
                    let mut v = 0.0;
                    for mm in 0..dim {
                        v += gv[mm * dim + l] * rup[((mm * dim + k) * dim + i) * dim + j];
                    }
                    out[((i * dim + j) * dim + k) * dim + l] = v;
                }
            }
        }
    }
    Ok(out)
}

/// Contract the covariant curvature with four vectors.
pub fn riemann_apply(r: &[f64], dim: usize, v: &[f64], w: &[f64], z: &[f64], u: &[f64]) -> f64 {
    let mut acc = 0.0;
    for i in 0..dim {
        for j in 0..dim {
            for k in 0..dim {
                for l in 0..dim {
                    acc += r[((i * dim + j) * dim + k) * dim + l] * v[i] * w[j] * z[k] * u[l];
                }
            }
        }
    }
    acc
}

/// Ricci tensor `Ric_jk = g^il R_jikl`.
pub fn ricci(m: &ChartMetric, x: &[f64]) -> Result<Vec<f64>, ChartError> {
    let mj = MetricJets::at(m, x, 2)?;
    let r = riemann_from_jets(&mj)?;
    let dim = mj.dim;
    let ginv: Vec<f64> = mj.ginv.iter().map(Jet::value).collect();
    let mut out = vec![0.0; dim * dim];
    for j in 0..dim {
        for k in 0..dim {
            let mut v = 0.0;
            for i in 0..dim {
                for l in 0..dim {
                    v += ginv[i * dim + l] * r[((j * dim + i) * dim + k) * dim + l];
                }
            }
            out[j * dim + k] = v;
        }
    }
    Ok(out)
}

/// Sectional curvature of the plane spanned by `v, w`.
pub fn sectional(m: &ChartMetric, x: &[f64], v: &[f64], w: &[f64]) -> Result<f64, ChartError> {
    let r = riemann(m, x)?;
    let dim = m.dim();
    let gv = m.values(x);
    let ip = |a: &[f64], b: &[f64]| {
        let mut acc = 0.0;
        for i in 0..dim {
            for j in 0..dim {
                acc += gv[i * dim + j] * a[i] * b[j];
            }
        }
        acc
    };
    let q = ip(v, v) * ip(w, w) - ip(v, w) * ip(v, w);
    if fm::abs(q) < 1e-14 {
        return Err(ChartError::DegeneratePlane);
    }
    Ok(riemann_apply(&r, dim, v, w, v, w) / q)
}

/// Hessian `nabla^2 f (d_i, d_j) = d_i d_j f - Gamma^k_ij d_k f` as values.
pub fn hessian(m: &ChartMetric, f: &ScalarField, x: &[f64]) -> Result<Vec<f64>, ChartError> {
    let fj = f.jet(x, 2);
    let mj = MetricJets::at(m, x, 1)?;
    Ok(hessian_values(&mj, &fj))
}

pub(crate) fn hessian_values(mj: &MetricJets, fj: &Jet) -> Vec<f64> {
    let dim = mj.dim;
    let mut out = vec![0.0; dim * dim];
    for i in 0..dim {
        for j in 0..dim {
            let mut e = [0u8; 3];
            e[i] += 1;
            e[j] += 1;
            let mut v = fj.partial(&e[..dim]);
            for k in 0..dim {
                let mut ek = [0u8; 3];
                ek[k] = 1;
                v -= mj.gamma_at(k, i, j).value() * fj.partial(&ek[..dim]);
            }
            out[i * dim + j] = v;
        }
    }
    out
}

/// Laplace-Beltrami `Delta f = g^ij nabla^2 f_ij`.
pub fn laplacian(m: &ChartMetric, f: &ScalarField, x: &[f64]) -> Result<f64, ChartError> {
    let fj = f.jet(x, 2);
    let mj = MetricJets::at(m, x, 1)?;
    let h = hessian_values(&mj, &fj);
    let dim = mj.dim;
    let mut acc = 0.0;
    for i in 0..dim {
        for j in 0..dim {
            acc += mj.ginv[i * dim + j].value() * h[i * dim + j];
        }
    }
    Ok(acc)
}

/// Drift Laplacian `Delta f - g(grad h, grad f)`.
pub fn drift_laplacian(
    m: &ChartMetric,
    f: &ScalarField,
    h: &ScalarField,
    x: &[f64],
) -> Result<f64, ChartError> {
    let lap = laplacian(m, f, x)?;
    let mj = MetricJets::at(m, x, 1)?;
    let fj = f.jet(x, 1);
    let hj = h.jet(x, 1);
    let dim = m.dim();
    let mut ip = 0.0;
    for i in 0..dim {
        for j in 0..dim {
            ip += mj.ginv[i * dim + j].value() * hj.grad(i) * fj.grad(j);
        }
    }
    Ok(lap - ip)
}

/// Gauss curvature of the conformal strip metric `phi^-2 (dx^2 + dy^2)`.
///
/// With `g = e^{2w} g_0`, `w = ln(1/phi)`, the two-dimensional conformal
/// transformation law `K = e^{-2w}(K_0 - lap_0 w)` collapses to the closed
/// form `K = phi phi'' - phi'^2`. On a tail where `phi = 1 - |y|` this is
/// identically `-1`: the substitution `eta = 1 - |y|` turns the tail into
/// the hyperbolic half-plane, which the curvature sentinel pins at `-1`.
pub fn gauss_curvature_conformal(phi: f64, dphi: f64, d2phi: f64) -> f64 {
    assert!(phi > 0.0, "conformal factor must be positive");
    phi * d2phi - dphi * dphi
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euclidean_christoffel_vanishes() {
        let m = ChartMetric::euclidean(2);
        let c = christoffel(&m, &[0.3, -1.2]).unwrap();
        assert!(c.iter().all(|v| v.abs() < 1e-14));
        let r = riemann(&m, &[0.3, -1.2]).unwrap();
        assert!(r.iter().all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn polar_plane_christoffel() {
        let m = ChartMetric::polar_plane();
        let c = christoffel(&m, &[2.0, 0.7]).unwrap();
        // Gamma^r_tt = -r, Gamma^t_rt = 1/r
        let dim = 2;
        let at = |k: usize, i: usize, j: usize| c[k * dim * dim + i * dim + j];
        assert!((at(0, 1, 1) + 2.0).abs() < 1e-12);
        assert!((at(1, 0, 1) - 0.5).abs() < 1e-12);
        assert!((at(1, 1, 0) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn conformal_christoffel_closed_form() {
        // oracle: for g = e^{2w}(dx^2+dy^2) with w = w(y),
        // Gamma^x_xy = w', Gamma^y_xx = -w', Gamma^y_yy = w'
        let m = ChartMetric::conformal(
            2,
            Arc::new(|x: &[f64], order| {
                // e^{2w}, w = ln(1/phi), phi = 1 - y on the test window
                let y = Jet::variable(x[1], 1, 2, order);
                Jet::constant(1.0, 2, order).sub(&y).powi(2).recip()
            }),
        );
        let y = 0.75;
        let phi = 1.0 - y;
        let wprime = 1.0 / phi; // d/dy ln(1/(1-y))
        let c = christoffel(&m, &[0.1, y]).unwrap();
        let at = |k: usize, i: usize, j: usize| c[k * 4 + i * 2 + j];
        assert!((at(0, 0, 1) - wprime).abs() < 1e-10);
        assert!((at(1, 0, 0) + wprime).abs() < 1e-10);
        assert!((at(1, 1, 1) - wprime).abs() < 1e-10);
        assert!(at(0, 0, 0).abs() < 1e-12);
    }

    #[test]
    fn sphere_sectional_plus_one() {
        let m = ChartMetric::round_sphere();
        let k = sectional(&m, &[1.1, 0.4], &[1.0, 0.0], &[0.0, 1.0]).unwrap();
        assert!((k - 1.0).abs() < 1e-9, "sphere sectional {k}");
    }

    #[test]
    fn hyperbolic_sectional_minus_one() {
        let m = ChartMetric::hyperbolic_half_plane();
        let k = sectional(&m, &[0.0, 2.0], &[1.0, 0.0], &[0.0, 1.0]).unwrap();
        assert!((k + 1.0).abs() < 1e-9, "hyperbolic sectional {k}");
        // Ricci = -g in 2d constant curvature -1
        let ric = ricci(&m, &[0.0, 2.0]).unwrap();
        let g = m.values(&[0.0, 2.0]);
        for i in 0..4 {
            assert!((ric[i] + g[i]).abs() < 1e-9);
        }
    }

    #[test]
    fn hessian_of_square() {
        let m = ChartMetric::euclidean(1);
        let f = ScalarField::new(
            1,
            Arc::new(|x: &[f64], order| Jet::variable(x[0], 0, 1, order).powi(2)),
        );
        let h = hessian(&m, &f, &[0.4]).unwrap();
        assert!((h[0] - 2.0).abs() < 1e-13);
        assert!((laplacian(&m, &f, &[0.4]).unwrap() - 2.0).abs() < 1e-13);
    }

    #[test]
    fn laplacian_two_routes_agree_on_hyperbolic() {
        // trace-of-hessian vs divergence form for f = ln y on y^-2(dx^2+dy^2)
        let m = ChartMetric::hyperbolic_half_plane();
        let f = ScalarField::new(
            2,
            Arc::new(|x: &[f64], order| Jet::variable(x[1], 1, 2, order).ln()),
        );
        let x = [0.7, 1.9];
        let lap = laplacian(&m, &f, &x).unwrap();
        // divergence form: (1/sqrt det g) d_i (sqrt det g g^ij d_j f)
        let div_form = {
            let h = 1e-5;
            let flux = |y: f64| {
                // sqrt(det g) = y^-2, g^yy = y^2, d_y ln y = 1/y => flux = y^-2 * y^2 * 1/y
                1.0 / y
            };
            let y = x[1];
            let sqrt_det = 1.0 / (y * y);
            ((flux(y + h) - flux(y - h)) / (2.0 * h)) / sqrt_det
        };
        assert!((lap - div_form).abs() < 1e-9, "{lap} vs {div_form}");
    }

    #[test]
    fn radial_laplacian_euclidean() {
        // Delta r = (n-1)/r on the plane: 1/r, so 2 at r = 0.5
        let m = ChartMetric::euclidean(2);
        let f = ScalarField::new(
            2,
            Arc::new(|x: &[f64], order| {
                let a = Jet::variable(x[0], 0, 2, order);
                let b = Jet::variable(x[1], 1, 2, order);
                a.powi(2).add(&b.powi(2)).sqrt()
            }),
        );
        let p = [0.3, 0.4]; // r = 0.5
        let lap = laplacian(&m, &f, &p).unwrap();
        assert!((lap - 2.0).abs() < 1e-10, "{lap}");
    }

    #[test]
    fn drift_laplacian_formula() {
        let m = ChartMetric::euclidean(1);
        let f = ScalarField::new(
            1,
            Arc::new(|x: &[f64], order| Jet::variable(x[0], 0, 1, order)),
        );
        let h = ScalarField::new(
            1,
            Arc::new(|x: &[f64], order| Jet::variable(x[0], 0, 1, order).powi(2)),
        );
        // Delta x - g(grad x^2, grad x) = 0 - 2x at x=1
        let v = drift_laplacian(&m, &f, &h, &[1.0]).unwrap();
        assert!((v + 2.0).abs() < 1e-12);
        // h constant reduces to the plain laplacian
        let hc = ScalarField::new(1, Arc::new(|_x: &[f64], order| Jet::constant(5.0, 1, order)));
        let v2 = drift_laplacian(&m, &f, &hc, &[1.0]).unwrap();
        assert!(v2.abs() < 1e-12);
        // gradient vanishing at the origin: f = h = x^2+... gives Delta h
        let m2 = ChartMetric::euclidean(2);
        let h2 = ScalarField::new(
            2,
            Arc::new(|x: &[f64], order| {
                let a = Jet::variable(x[0], 0, 2, order);
                let b = Jet::variable(x[1], 1, 2, order);
                a.powi(2).add(&b.powi(2))
            }),
        );
        let v3 = drift_laplacian(&m2, &h2, &h2, &[0.0, 0.0]).unwrap();
        assert!((v3 - 4.0).abs() < 1e-12);
    }

    #[test]
    fn conformal_gauss_curvature_closed_form() {
        // linear tail phi = 1 - |y| is a hyperbolic half-plane: K = -1,
        // independent of the height (eta = 1 - |y| is a literal isometry
        // onto eta^-2(dx^2 + deta^2))
        let k = gauss_curvature_conformal(0.25, -1.0, 0.0);
        assert!((k + 1.0).abs() < 1e-12);
        // flat when phi is constant
        assert_eq!(gauss_curvature_conformal(1.0, 0.0, 0.0), 0.0);
        // cross-check against the calibrated tensor route on the same metric
        let m = ChartMetric::conformal(
            2,
            Arc::new(|x: &[f64], order| {
                let y = Jet::variable(x[1], 1, 2, order);
                Jet::constant(1.0, 2, order).sub(&y).powi(2).recip()
            }),
        );
        let k_tensor = sectional(&m, &[0.1, 0.75], &[1.0, 0.0], &[0.0, 1.0]).unwrap();
        assert!((k_tensor - k).abs() < 1e-9, "{k_tensor} vs {k}");
    }

    #[test]
    fn signature_checks() {
        let e = ChartMetric::euclidean(3);
        assert!(e.check_signature(&[0.0, 0.0, 0.0]).is_ok());
        let lor = ChartMetric::new(
            2,
            Signature::LorentzianLast,
            Arc::new(|_x: &[f64], order| {
                vec![
                    Jet::constant(1.0, 2, order),
                    Jet::constant(0.0, 2, order),
                    Jet::constant(0.0, 2, order),
                    Jet::constant(-1.0, 2, order),
                ]
            }),
        );
        assert!(lor.check_signature(&[0.0, 0.0]).is_ok());
    }
}
