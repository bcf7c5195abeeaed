//! Spacelike graph hypersurfaces in the product `(M x R, g_M + eps dt^2)`.
//!
//! A graph `t = u(x)` over a chart of the base carries its geometry in the
//! chart coordinates of the domain: induced metric `g_M + eps du (x) du`,
//! future unit normal, shape operator, mean curvature, and the soliton
//! residual `div_M(grad u / W) - c / W`. Everything is jet-valued, so the
//! pointwise identities the checks verify (Hessian of the height function,
//! the drift Laplacian of `H`, the traced Gauss equation, the Bakry-Emery
//! lower bound and the rigidity inequality) come out near machine precision
//! when they hold.
//!
//! The `soliton_claim` flag gates the identity checks: they are false on
//! generic graphs and asserting them there would be meaningless. Geometric
//! operations work on any spacelike graph.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::chart::{
    christoffel_from_jets, invert_jet_matrix, ricci, riemann, riemann_apply, ChartError,
    ChartMetric, MetricJets, ScalarField, Signature,
};
use crate::fm;
use crate::jet::Jet;

#[derive(Debug, Clone)]
pub enum GraphError {
    /// `1 + eps |grad u|^2 <= 0` at the evaluation point.
    SpacelikeViolation { at: Vec<f64>, w_sq: f64 },
    /// An identity check was requested on a graph without the soliton claim.
    NotASoliton,
    /// A stated hypothesis fails at a sample (reported, never silently passed).
    HypothesisViolation { detail: String },
    Chart(ChartError),
}

impl From<ChartError> for GraphError {
    fn from(e: ChartError) -> Self {
        GraphError::Chart(e)
    }
}

impl core::fmt::Display for GraphError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            GraphError::SpacelikeViolation { at, w_sq } => {
                write!(f, "spacelike condition fails at {at:?} (W^2 = {w_sq})")
            }
            GraphError::NotASoliton => write!(f, "operation requires the soliton claim"),
            GraphError::HypothesisViolation { detail } => write!(f, "{detail}"),
            GraphError::Chart(e) => write!(f, "{e}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for GraphError {}

/// The ambient product `M x R` with metric `g_M + eps dt^2`.
#[derive(Clone)]
pub struct ProductSpace {
    pub base: ChartMetric,
    pub epsilon: f64,
}

impl ProductSpace {
    pub fn new(base: ChartMetric, epsilon: f64) -> Self {
        assert!(epsilon == 1.0 || epsilon == -1.0);
        assert_eq!(base.signature(), Signature::Riemannian, "base must be Riemannian");
        ProductSpace { base, epsilon }
    }

    pub fn lorentzian(base: ChartMetric) -> Self {
        ProductSpace::new(base, -1.0)
    }

    /// The product metric as an `(n+1)`-dimensional chart metric; the last
    /// coordinate is `t`.
    pub fn ambient_metric(&self) -> ChartMetric {
        let base = self.base.clone();
        let eps = self.epsilon;
        let n = base.dim();
        let dim = n + 1;
        let signature = if eps < 0.0 {
            Signature::LorentzianLast
        } else {
            Signature::Riemannian
        };
        ChartMetric::new(
            dim,
            signature,
            Arc::new(move |p: &[f64], order| {
                let bg = base.eval(&p[..n], order);
                let var_map: Vec<usize> = (0..n).collect();
                let zero = Jet::constant(0.0, dim, order);
                let mut out = vec![zero; dim * dim];
                for i in 0..n {
                    for j in 0..n {
                        out[i * dim + j] = bg[i * n + j].promote(dim, &var_map);
                    }
                }
                out[n * dim + n] = Jet::constant(eps, dim, order);
                out
            }),
        )
    }
}

/// Graph hypersurface `t = u(x)` with soliton speed `c`.
#[derive(Clone)]
pub struct GraphHypersurface {
    pub space: ProductSpace,
    pub height: ScalarField,
    pub speed: f64,
    pub soliton_claim: bool,
}

/// Jet-valued geometric data of a graph at one point.
///
/// `u` has order `order + 2`, first-derivative objects (`w`, normal,
/// induced metric) order `order + 1`, curvature-level objects (`shape`,
/// `mean_h`, induced Christoffels) order `order`.
pub struct GraphJets {
    pub dim: usize,
    pub order: usize,
    pub u: Jet,
    /// Spacelike factor `W = sqrt(1 + eps |grad u|^2)`.
    pub w: Jet,
    /// Contravariant base components of the unit normal.
    pub nu_m: Vec<Jet>,
    /// `t`-component of the unit normal.
    pub nu_r: Jet,
    /// Shape operator; `shape[j * dim + i]` is `A^j_i`, so `(A X)^j =
    /// shape[j * dim + i] X^i`.
    pub shape: Vec<Jet>,
    pub mean_h: Jet,
    pub g_ind: Vec<Jet>,
    pub g_ind_inv: Vec<Jet>,
    pub gamma_ind: Vec<Jet>,
    pub gm: Vec<Jet>,
    pub gm_inv: Vec<Jet>,
}

impl GraphJets {
    pub fn shape_at(&self, upper: usize, lower: usize) -> &Jet {
        &self.shape[upper * self.dim + lower]
    }

    /// `(A X)^j` as values.
    pub fn shape_apply(&self, x_vec: &[f64]) -> Vec<f64> {
        let n = self.dim;
        (0..n)
            .map(|j| (0..n).map(|i| self.shape[j * n + i].value() * x_vec[i]).sum())
            .collect()
    }

    /// Induced inner product of two coordinate vectors, values.
    pub fn ip_induced(&self, a: &[f64], b: &[f64]) -> f64 {
        let n = self.dim;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += self.g_ind[i * n + j].value() * a[i] * b[j];
            }
        }
        acc
    }

    /// Base inner product, values.
    pub fn ip_base(&self, a: &[f64], b: &[f64]) -> f64 {
        let n = self.dim;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += self.gm[i * n + j].value() * a[i] * b[j];
            }
        }
        acc
    }

    /// Hessian values of a field jet (order >= 2) under the induced metric.
    pub fn hessian_induced(&self, fj: &Jet) -> Vec<f64> {
        let n = self.dim;
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                let mut e = [0u8; 3];
                e[i] += 1;
                e[j] += 1;
                let mut v = fj.partial(&e[..n]);
                for k in 0..n {
                    let mut ek = [0u8; 3];
                    ek[k] = 1;
                    v -= self.gamma_ind[k * n * n + i * n + j].value() * fj.partial(&ek[..n]);
                }
                out[i * n + j] = v;
            }
        }
        out
    }

    /// Laplace-Beltrami of a field jet under the induced metric, value.
    pub fn laplacian_induced(&self, fj: &Jet) -> f64 {
        let n = self.dim;
        let h = self.hessian_induced(fj);
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += self.g_ind_inv[i * n + j].value() * h[i * n + j];
            }
        }
        acc
    }

    /// Induced-metric gradient inner product of two field jets (order >= 1).
    pub fn grad_ip_induced(&self, a: &Jet, b: &Jet) -> f64 {
        let n = self.dim;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += self.g_ind_inv[i * n + j].value() * a.grad(i) * b.grad(j);
            }
        }
        acc
    }

    /// `|A|^2 = trace(A^2)`, value.
    pub fn shape_norm_sq(&self) -> f64 {
        let n = self.dim;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += self.shape[i * n + j].value() * self.shape[j * n + i].value();
            }
        }
        acc
    }
}

impl GraphHypersurface {
    pub fn new(space: ProductSpace, height: ScalarField, speed: f64, soliton_claim: bool) -> Self {
        assert!(speed > 0.0, "soliton speed must be positive");
        assert_eq!(height.vars(), space.base.dim());
        GraphHypersurface { space, height, speed, soliton_claim }
    }

    pub fn dim(&self) -> usize {
        self.space.base.dim()
    }

    /// All jet-valued geometric data at `x`, with curvature-level objects
    /// truncated at `order`.
    pub fn eval(&self, x: &[f64], order: usize) -> Result<GraphJets, GraphError> {
        let n = self.dim();
        let eps = self.space.epsilon;
        let u = self.height.jet(x, order + 2);
        let base_mj = MetricJets::at(&self.space.base, x, order + 1)?;
        let du: Vec<Jet> = (0..n).map(|i| u.derivative(i)).collect();

        // |grad u|^2 = g^ij u_i u_j at order + 1
        let mut grad_sq = Jet::constant(0.0, n, order + 1);
        for i in 0..n {
            for j in 0..n {
                grad_sq = grad_sq.add(&base_mj.ginv[i * n + j].mul(&du[i]).mul(&du[j]));
            }
        }
        let w_sq = grad_sq.scale(eps).add_scalar(1.0);
        if w_sq.value() <= 0.0 {
            return Err(GraphError::SpacelikeViolation { at: x.to_vec(), w_sq: w_sq.value() });
        }
        let w = w_sq.sqrt();
        let w_inv = w.recip();

        // nu = (-eps grad u, 1) / W, future-pointing when eps = -1
        let nu_r = w_inv.clone();
        let nu_m: Vec<Jet> = (0..n)
            .map(|j| {
                let mut acc = Jet::constant(0.0, n, order + 1);
                for k in 0..n {
                    acc = acc.add(&base_mj.ginv[j * n + k].mul(&du[k]));
                }
                acc.scale(-eps).mul(&w_inv)
            })
            .collect();

        // A^j_i = -(d_i nu^j + Gamma^j_ik nu^k)
        let mut shape = vec![Jet::constant(0.0, n, order); n * n];
        for j in 0..n {
            for i in 0..n {
                let mut acc = nu_m[j].derivative(i);
                for k in 0..n {
                    acc = acc.add(&base_mj.gamma_at(j, i, k).mul(&nu_m[k].truncated(order)));
                }
                shape[j * n + i] = acc.neg();
            }
        }
        let mut trace = Jet::constant(0.0, n, order);
        for j in 0..n {
            trace = trace.add(&shape[j * n + j]);
        }
        let mean_h = trace.scale(eps);

        // induced metric g_M + eps du (x) du at order + 1
        let mut g_ind = base_mj.g.clone();
        for i in 0..n {
            for j in 0..n {
                g_ind[i * n + j] = g_ind[i * n + j].add(&du[i].mul(&du[j]).scale(eps));
            }
        }
        let g_ind_inv = invert_jet_matrix(&g_ind, n)?;
        let gamma_ind = christoffel_from_jets(&g_ind, &g_ind_inv, n);

        Ok(GraphJets {
            dim: n,
            order,
            u,
            w,
            nu_m,
            nu_r,
            shape,
            mean_h,
            g_ind,
            g_ind_inv,
            gamma_ind,
            gm: base_mj.g,
            gm_inv: base_mj.ginv,
        })
    }

    /// Induced metric as a chart metric on the graph domain.
    pub fn induced_metric(&self) -> ChartMetric {
        let base = self.space.base.clone();
        let height = self.height.clone();
        let eps = self.space.epsilon;
        let n = base.dim();
        ChartMetric::new(
            n,
            Signature::Riemannian,
            Arc::new(move |x: &[f64], order| {
                let g = base.eval(x, order);
                let u = height.jet(x, order + 1);
                let du: Vec<Jet> = (0..n).map(|i| u.derivative(i)).collect();
                let mut out = g;
                for i in 0..n {
                    for j in 0..n {
                        out[i * n + j] = out[i * n + j].add(&du[i].mul(&du[j]).scale(eps));
                    }
                }
                out
            }),
        )
    }

    /// The metric induced from the Riemannian companion `g_M + dt^2`,
    /// regardless of the graph's own causal character.
    pub fn euclidean_graph_metric(&self) -> ChartMetric {
        let base = self.space.base.clone();
        let height = self.height.clone();
        let n = base.dim();
        ChartMetric::new(
            n,
            Signature::Riemannian,
            Arc::new(move |x: &[f64], order| {
                let g = base.eval(x, order);
                let u = height.jet(x, order + 1);
                let du: Vec<Jet> = (0..n).map(|i| u.derivative(i)).collect();
                let mut out = g;
                for i in 0..n {
                    for j in 0..n {
                        out[i * n + j] = out[i * n + j].add(&du[i].mul(&du[j]));
                    }
                }
                out
            }),
        )
    }

    /// Unit normal at `x`: contravariant base components and `t` component.
    pub fn unit_normal(&self, x: &[f64]) -> Result<(Vec<f64>, f64), GraphError> {
        let gj = self.eval(x, 0)?;
        Ok((gj.nu_m.iter().map(Jet::value).collect(), gj.nu_r.value()))
    }

    /// Shape operator values, `A^j_i` with `j * dim + i` layout.
    pub fn shape_operator(&self, x: &[f64]) -> Result<Vec<f64>, GraphError> {
        let gj = self.eval(x, 0)?;
        Ok(gj.shape.iter().map(Jet::value).collect())
    }

    /// Mean curvature `H = eps trace(A)`.
    pub fn mean_curvature(&self, x: &[f64]) -> Result<f64, GraphError> {
        let gj = self.eval(x, 0)?;
        Ok(gj.mean_h.value())
    }

    /// `H` recomputed from the soliton relation `H = eps c gbar(d_t, nu)`,
    /// which reduces to `c / W`.
    pub fn mean_curvature_soliton_form(&self, x: &[f64]) -> Result<f64, GraphError> {
        let gj = self.eval(x, 0)?;
        Ok(self.speed / gj.w.value())
    }

    /// `div_M(grad u / W) - c / W`; zero exactly on `c`-translators.
    pub fn soliton_residual(&self, x: &[f64]) -> Result<f64, GraphError> {
        let n = self.dim();
        let u = self.height.jet(x, 2);
        let base_mj = MetricJets::at(&self.space.base, x, 1)?;
        let du: Vec<Jet> = (0..n).map(|i| u.derivative(i)).collect();
        let mut grad_sq = Jet::constant(0.0, n, 1);
        for i in 0..n {
            for j in 0..n {
                grad_sq = grad_sq.add(&base_mj.ginv[i * n + j].mul(&du[i]).mul(&du[j]));
            }
        }
        let w_sq = grad_sq.scale(self.space.epsilon).add_scalar(1.0);
        if w_sq.value() <= 0.0 {
            return Err(GraphError::SpacelikeViolation { at: x.to_vec(), w_sq: w_sq.value() });
        }
        let w_inv = w_sq.sqrt().recip();
        let v: Vec<Jet> = (0..n)
            .map(|i| {
                let mut acc = Jet::constant(0.0, n, 1);
                for j in 0..n {
                    acc = acc.add(&base_mj.ginv[i * n + j].mul(&du[j]));
                }
                acc.mul(&w_inv)
            })
            .collect();
        // div V = d_i V^i + Gamma^i_ik V^k
        let mut div = 0.0;
        for i in 0..n {
            div += v[i].derivative(i).value();
            for k in 0..n {
                div += base_mj.gamma_at(i, i, k).value() * v[k].value();
            }
        }
        Ok(div - self.speed * w_inv.value())
    }

    /// Residual of `|grad h|^2 = eps (1 - H^2 / c^2)` on the graph, where
    /// `h` is the height function. Returns `(residual, scale)`.
    pub fn height_gradient_check(&self, x: &[f64]) -> Result<(f64, f64), GraphError> {
        if !self.soliton_claim {
            return Err(GraphError::NotASoliton);
        }
        let gj = self.eval(x, 0)?;
        let u1 = gj.u.truncated(1);
        let lhs = gj.grad_ip_induced(&u1, &u1);
        let h = gj.mean_h.value();
        let c = self.speed;
        let rhs = self.space.epsilon * (1.0 - h * h / (c * c));
        Ok((lhs - rhs, fm::abs(lhs).max(fm::abs(rhs))))
    }

    /// Residual of `hess(c h)(X, X) = eps H g(A X, X)`.
    pub fn hessian_height_check(&self, x: &[f64], x_vec: &[f64]) -> Result<(f64, f64), GraphError> {
        if !self.soliton_claim {
            return Err(GraphError::NotASoliton);
        }
        let gj = self.eval(x, 1)?;
        let u2 = gj.u.truncated(2);
        let hess = gj.hessian_induced(&u2);
        let n = gj.dim;
        let mut lhs = 0.0;
        for i in 0..n {
            for j in 0..n {
                lhs += hess[i * n + j] * x_vec[i] * x_vec[j];
            }
        }
        lhs *= self.speed;
        let ax = gj.shape_apply(x_vec);
        let rhs = self.space.epsilon * gj.mean_h.value() * gj.ip_induced(&ax, x_vec);
        Ok((lhs - rhs, fm::abs(lhs).max(fm::abs(rhs))))
    }

    /// Residual of `-eps Delta H = g(grad H, grad(c h)) + (Ric_M(nu_M, nu_M)
    /// + |A|^2) H`. Needs jets of order four in the graph function.
    pub fn drift_laplacian_h_check(&self, x: &[f64]) -> Result<(f64, f64), GraphError> {
        if !self.soliton_claim {
            return Err(GraphError::NotASoliton);
        }
        let gj = self.eval(x, 2)?;
        let lap_h = gj.laplacian_induced(&gj.mean_h);
        let lhs = -self.space.epsilon * lap_h;

        let ch = gj.u.truncated(1).scale(self.speed);
        let mean_h1 = gj.mean_h.truncated(1);
        let grad_term = gj.grad_ip_induced(&mean_h1, &ch);

        let ric_m = ricci(&self.space.base, x)?;
        let n = gj.dim;
        let nu_vals: Vec<f64> = gj.nu_m.iter().map(Jet::value).collect();
        let mut ric_nu = 0.0;
        for i in 0..n {
            for j in 0..n {
                ric_nu += ric_m[i * n + j] * nu_vals[i] * nu_vals[j];
            }
        }
        let curv_term = (ric_nu + gj.shape_norm_sq()) * gj.mean_h.value();
        let rhs = grad_term + curv_term;
        Ok((
            lhs - rhs,
            fm::abs(lhs).max(fm::abs(grad_term)).max(fm::abs(curv_term)),
        ))
    }

    /// Residual of the traced Gauss equation
    /// `Ric_Sigma(X,X) = Ric_amb(X,X) + R_amb(X,nu,X,nu) + H g(AX,X) + |AX|^2`,
    /// with the left side computed intrinsically on the induced metric and
    /// the right side through the ambient product chart. Cross-validates the
    /// whole extrinsic stack against the intrinsic one.
    pub fn gauss_equation_ricci_check(
        &self,
        x: &[f64],
        x_vec: &[f64],
    ) -> Result<(f64, f64), GraphError> {
        let gj = self.eval(x, 0)?;
        let n = gj.dim;

        let induced = self.induced_metric();
        let ric_sigma = ricci(&induced, x)?;
        let mut lhs = 0.0;
        for i in 0..n {
            for j in 0..n {
                lhs += ric_sigma[i * n + j] * x_vec[i] * x_vec[j];
            }
        }

        let ambient = self.space.ambient_metric();
        let mut p = x.to_vec();
        p.push(self.height.value(x));
        let ric_amb = ricci(&ambient, &p)?;
        let r_amb = riemann(&ambient, &p)?;

        let du: Vec<f64> = (0..n).map(|i| gj.u.grad(i)).collect();
        let mut x_amb: Vec<f64> = x_vec.to_vec();
        x_amb.push((0..n).map(|i| du[i] * x_vec[i]).sum());
        let mut nu_amb: Vec<f64> = gj.nu_m.iter().map(Jet::value).collect();
        nu_amb.push(gj.nu_r.value());

        let dim_a = n + 1;
        let mut ric_xx = 0.0;
        for i in 0..dim_a {
            for j in 0..dim_a {
                ric_xx += ric_amb[i * dim_a + j] * x_amb[i] * x_amb[j];
            }
        }
        let r_xnxn = riemann_apply(&r_amb, dim_a, &x_amb, &nu_amb, &x_amb, &nu_amb);

        let ax = gj.shape_apply(x_vec);
        let h_term = gj.mean_h.value() * gj.ip_induced(&ax, x_vec);
        let ax_sq = gj.ip_induced(&ax, &ax);
        let rhs = ric_xx + r_xnxn + h_term + ax_sq;
        Ok((
            lhs - rhs,
            [lhs, ric_xx, r_xnxn, h_term, ax_sq]
                .iter()
                .fold(0.0f64, |m, t| m.max(fm::abs(*t))),
        ))
    }

    /// Slack of the Bakry-Emery lower bound
    /// `Ric_{c h}(X,X) >= -(n kappa / c^2) G(r)^2 |X|^2`, with
    /// `Ric_{c h} = Ric_Sigma + hess(c h)` computed intrinsically.
    ///
    /// `g_bound` must dominate `H` at the sample (`H(x) <= g_bound`); a
    /// violation is reported as an error, never silently passed.
    pub fn bakry_emery_slack(
        &self,
        x: &[f64],
        x_vec: &[f64],
        g_bound: f64,
        kappa: f64,
    ) -> Result<f64, GraphError> {
        if !self.soliton_claim {
            return Err(GraphError::NotASoliton);
        }
        let gj = self.eval(x, 1)?;
        let n = gj.dim;
        let h = gj.mean_h.value();
        if h > g_bound + 1e-12 {
            return Err(GraphError::HypothesisViolation {
                detail: format!("H = {h} exceeds the bound {g_bound} at {x:?}"),
            });
        }
        let induced = self.induced_metric();
        let ric_sigma = ricci(&induced, x)?;
        let mut ric_xx = 0.0;
        for i in 0..n {
            for j in 0..n {
                ric_xx += ric_sigma[i * n + j] * x_vec[i] * x_vec[j];
            }
        }
        let u2 = gj.u.truncated(2);
        let hess = gj.hessian_induced(&u2);
        let mut hess_xx = 0.0;
        for i in 0..n {
            for j in 0..n {
                hess_xx += hess[i * n + j] * x_vec[i] * x_vec[j];
            }
        }
        hess_xx *= self.speed;
        let x_norm_sq = gj.ip_induced(x_vec, x_vec);
        let c = self.speed;
        let bound = -(n as f64) * kappa / (c * c) * g_bound * g_bound * x_norm_sq;
        Ok(ric_xx + hess_xx - bound)
    }

    /// Slack of `-f Delta_{c h} f + 3 |grad f|^2 >= (c^2/n) (1 - f^2)^2` for
    /// `f = -1 / sqrt(1 + H^2 / c^2)`; the computable engine of the
    /// non-existence argument (valid on non-negative base Ricci).
    pub fn rigidity_slack(&self, x: &[f64]) -> Result<f64, GraphError> {
        if !self.soliton_claim {
            return Err(GraphError::NotASoliton);
        }
        let gj = self.eval(x, 2)?;
        let c = self.speed;
        let f = gj
            .mean_h
            .powi(2)
            .scale(1.0 / (c * c))
            .add_scalar(1.0)
            .sqrt()
            .recip()
            .neg();
        let lap_f = gj.laplacian_induced(&f);
        let ch = gj.u.truncated(1).scale(c);
        let f1 = f.truncated(1);
        let drift = lap_f - gj.grad_ip_induced(&ch, &f1);
        let grad_f_sq = gj.grad_ip_induced(&f1, &f1);
        let fv = f.value();
        let n = gj.dim as f64;
        let rhs = c * c / n * (1.0 - fv * fv) * (1.0 - fv * fv);
        Ok(-fv * drift + 3.0 * grad_f_sq - rhs)
    }

    /// Residual of `|nu|_E^2 = 2 H^2 / c^2 - 1` together with the two-sided
    /// bound `H^2/c^2 <= |nu|_E^2 < 2 H^2/c^2` (Lorentzian solitons only).
    pub fn nu_e_relation_check(&self, x: &[f64]) -> Result<(f64, f64), GraphError> {
        if !self.soliton_claim {
            return Err(GraphError::NotASoliton);
        }
        if self.space.epsilon != -1.0 {
            return Err(GraphError::HypothesisViolation {
                detail: String::from("the Euclidean-norm relation needs the Lorentzian product"),
            });
        }
        let gj = self.eval(x, 0)?;
        let nu_vals: Vec<f64> = gj.nu_m.iter().map(Jet::value).collect();
        let nu_e_sq = gj.ip_base(&nu_vals, &nu_vals) + gj.nu_r.value() * gj.nu_r.value();
        let h = gj.mean_h.value();
        let c = self.speed;
        let ratio = h * h / (c * c);
        let rhs = 2.0 * ratio - 1.0;
        if nu_e_sq < ratio - 1e-9 || nu_e_sq >= 2.0 * ratio + 1e-9 {
            return Err(GraphError::HypothesisViolation {
                detail: format!("|nu|_E^2 = {nu_e_sq} outside [{ratio}, {})", 2.0 * ratio),
            });
        }
        Ok((nu_e_sq - rhs, fm::abs(nu_e_sq).max(fm::abs(rhs))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flat_space(n: usize, eps: f64) -> ProductSpace {
        ProductSpace::new(ChartMetric::euclidean(n), eps)
    }

    fn grim_reaper() -> GraphHypersurface {
        // u = ln cosh(x1) over the Euclidean plane, eps = -1, c = 1
        let u = ScalarField::new(
            2,
            Arc::new(|x: &[f64], order| Jet::variable(x[0], 0, 2, order).cosh().ln()),
        );
        GraphHypersurface::new(flat_space(2, -1.0), u, 1.0, true)
    }

    #[test]
    fn zero_graph_trivial() {
        let u = ScalarField::new(2, Arc::new(|_x: &[f64], order| Jet::constant(0.0, 2, order)));
        let g = GraphHypersurface::new(flat_space(2, -1.0), u, 1.0, false);
        let (nu_m, nu_r) = g.unit_normal(&[0.3, -0.7]).unwrap();
        assert!(nu_m.iter().all(|v| v.abs() < 1e-14));
        assert!((nu_r - 1.0).abs() < 1e-14);
        let a = g.shape_operator(&[0.3, -0.7]).unwrap();
        assert!(a.iter().all(|v| v.abs() < 1e-14));
        assert!(g.mean_curvature(&[0.3, -0.7]).unwrap().abs() < 1e-14);
        let ind = g.induced_metric().values(&[0.3, -0.7]);
        assert_eq!(ind, alloc::vec![1.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn grim_reaper_closed_forms() {
        let g = grim_reaper();
        let x = [1.0, 0.4];
        // induced g11 = sech^2
        let ind = g.induced_metric().values(&x);
        let sech2 = 1.0 / (1.0f64.cosh() * 1.0f64.cosh());
        assert!((ind[0] - sech2).abs() < 1e-12);
        // nu_r = cosh at x1 = 1, nu = d_t at the waist
        let (_, nu_r) = g.unit_normal(&x).unwrap();
        assert!((nu_r - 1.0f64.cosh()).abs() < 1e-12);
        let (nu_m0, nu_r0) = g.unit_normal(&[0.0, 0.4]).unwrap();
        assert!(nu_m0[0].abs() < 1e-14 && (nu_r0 - 1.0).abs() < 1e-14);
        // H = cosh(x1); H(2) = cosh 2; both H computations agree
        let h = g.mean_curvature(&[2.0, -0.3]).unwrap();
        assert!((h - 2.0f64.cosh()).abs() < 1e-11);
        let h2 = g.mean_curvature_soliton_form(&[2.0, -0.3]).unwrap();
        assert!((h - h2).abs() < 1e-11);
        // H >= c on the whole sampled range
        for i in 0..20 {
            let x1 = -4.0 + 8.0 * i as f64 / 19.0;
            assert!(g.mean_curvature(&[x1, 0.0]).unwrap() >= 1.0 - 1e-12);
        }
        // normal has unit Lorentzian norm: |nu_M|^2 - nu_r^2 = -1
        let gj = g.eval(&x, 0).unwrap();
        let nu: Vec<f64> = gj.nu_m.iter().map(Jet::value).collect();
        let q = gj.ip_base(&nu, &nu) - gj.nu_r.value() * gj.nu_r.value();
        assert!((q + 1.0).abs() < 1e-12);
    }

    #[test]
    fn grim_reaper_residual_vanishes() {
        let g = grim_reaper();
        for i in 0..20 {
            let x1 = -5.0 + 10.0 * i as f64 / 19.0;
            let r = g.soliton_residual(&[x1, 0.0]).unwrap();
            assert!(r.abs() < 1e-10, "residual {r} at {x1}");
        }
    }

    #[test]
    fn riemannian_grim_reaper_residual() {
        // upward translator u = -ln cos(x1), eps = +1, c = 1
        let u = ScalarField::new(
            2,
            Arc::new(|x: &[f64], order| Jet::variable(x[0], 0, 2, order).cos().ln().neg()),
        );
        let g = GraphHypersurface::new(flat_space(2, 1.0), u, 1.0, true);
        for i in 0..20 {
            let x1 = -1.5 + 3.0 * i as f64 / 19.0;
            let r = g.soliton_residual(&[x1, 0.0]).unwrap();
            assert!(r.abs() < 1e-10, "residual {r} at {x1}");
        }
        let h = g.mean_curvature(&[0.5, 0.0]).unwrap();
        assert!((h - 0.5f64.cos()).abs() < 1e-12);
    }

    #[test]
    fn parabola_residual_at_origin() {
        // u = x1^2: residual div(grad u / W) - c/W = 2 - 1 at the origin
        let u = ScalarField::new(
            2,
            Arc::new(|x: &[f64], order| Jet::variable(x[0], 0, 2, order).powi(2)),
        );
        let g = GraphHypersurface::new(flat_space(2, -1.0), u, 1.0, false);
        let r = g.soliton_residual(&[0.0, 0.0]).unwrap();
        assert!((r - 1.0).abs() < 1e-12);
    }

    #[test]
    fn spacelike_violation_detected() {
        let u = ScalarField::new(
            2,
            Arc::new(|x: &[f64], order| Jet::variable(x[0], 0, 2, order).scale(2.0)),
        );
        let g = GraphHypersurface::new(flat_space(2, -1.0), u, 1.0, false);
        assert!(matches!(
            g.eval(&[0.0, 0.0], 0),
            Err(GraphError::SpacelikeViolation { .. })
        ));
    }

    #[test]
    fn height_gradient_identity_grim() {
        let g = grim_reaper();
        // x1 = 0: |grad h|^2 = 0, H = c
        let (r0, _) = g.height_gradient_check(&[0.0, 0.0]).unwrap();
        assert!(r0.abs() < 1e-12);
        // x1 = 1: |grad h|^2 = sinh^2(1)
        let gj = g.eval(&[1.0, 0.0], 0).unwrap();
        let u1 = gj.u.truncated(1);
        let lhs = gj.grad_ip_induced(&u1, &u1);
        assert!((lhs - 1.0f64.sinh().powi(2)).abs() < 1e-11);
        let (r1, s1) = g.height_gradient_check(&[1.0, 0.0]).unwrap();
        assert!(r1.abs() < 1e-10 * (1.0 + s1));
    }

    #[test]
    fn hessian_height_identity_grim() {
        let g = grim_reaper();
        let (r, s) = g.hessian_height_check(&[0.8, -0.2], &[0.6, 1.1]).unwrap();
        assert!(r.abs() < 1e-9 * (1.0 + s), "residual {r} scale {s}");
        // X = 0 degenerates to 0 = 0
        let (rz, _) = g.hessian_height_check(&[0.8, -0.2], &[0.0, 0.0]).unwrap();
        assert_eq!(rz, 0.0);
    }

    #[test]
    fn drift_laplacian_identity_grim() {
        let g = grim_reaper();
        for i in 0..10 {
            let x1 = -2.0 + 4.0 * i as f64 / 9.0;
            let (r, s) = g.drift_laplacian_h_check(&[x1, 0.3]).unwrap();
            assert!(r.abs() < 1e-8 * (1.0 + s), "residual {r} at {x1}");
        }
    }

    #[test]
    fn gauss_equation_grim() {
        let g = grim_reaper();
        let (r, s) = g.gauss_equation_ricci_check(&[0.9, 0.1], &[0.7, -0.4]).unwrap();
        assert!(r.abs() < 1e-8 * (1.0 + s), "residual {r} scale {s}");
    }

    #[test]
    fn shape_operator_self_adjoint_grim() {
        let g = grim_reaper();
        let gj = g.eval(&[1.2, 0.5], 0).unwrap();
        let x_vec = [0.3, 0.9];
        let y_vec = [-1.0, 0.4];
        let ax = gj.shape_apply(&x_vec);
        let ay = gj.shape_apply(&y_vec);
        let d = gj.ip_induced(&ax, &y_vec) - gj.ip_induced(&x_vec, &ay);
        assert!(d.abs() < 1e-12);
    }

    #[test]
    fn bakry_emery_nonnegative_flat_base() {
        let g = grim_reaper();
        // kappa = 0 on the flat base: slack = Ric_{ch}(X,X) >= 0
        let s = g.bakry_emery_slack(&[0.7, -0.3], &[1.0, 0.8], 10.0, 0.0).unwrap();
        assert!(s >= -1e-9, "slack {s}");
        // hypothesis violation is reported
        assert!(g.bakry_emery_slack(&[3.0, 0.0], &[1.0, 0.0], 1.0, 0.0).is_err());
    }

    #[test]
    fn rigidity_slack_nonnegative_grim() {
        let g = grim_reaper();
        for i in 0..10 {
            let x1 = -2.0 + 4.0 * i as f64 / 9.0;
            let s = g.rigidity_slack(&[x1, 0.2]).unwrap();
            assert!(s >= -1e-8, "slack {s} at {x1}");
        }
    }

    #[test]
    fn nu_e_relation_grim() {
        let g = grim_reaper();
        // x1 = 0: H = 1, |nu|_E^2 = 1; x1 = 1: |nu|_E^2 = cosh(2)
        let (r0, _) = g.nu_e_relation_check(&[0.0, 0.0]).unwrap();
        assert!(r0.abs() < 1e-12);
        let gj = g.eval(&[1.0, 0.0], 0).unwrap();
        let nu: Vec<f64> = gj.nu_m.iter().map(Jet::value).collect();
        let nu_e_sq = gj.ip_base(&nu, &nu) + gj.nu_r.value() * gj.nu_r.value();
        assert!((nu_e_sq - 2.0f64.cosh()).abs() < 1e-11);
        let (r1, s1) = g.nu_e_relation_check(&[1.0, 0.0]).unwrap();
        assert!(r1.abs() < 1e-10 * (1.0 + s1));
    }

    #[test]
    fn ambient_product_curvature_structure() {
        // flat base: the whole ambient curvature vanishes
        let sp = flat_space(2, -1.0);
        let amb = sp.ambient_metric();
        let r = riemann(&amb, &[0.2, 0.3, 1.0]).unwrap();
        assert!(r.iter().all(|v| v.abs() < 1e-13));
    }
}
