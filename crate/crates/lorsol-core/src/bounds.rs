//! Radial growth bounds `G` and the machinery built on them: condition
//! classification, the base-distance companion `G^M(s) = G(int_0^s dr/G)`,
//! polygonal C1 smoothing, the Jacobi comparison equation
//! `w'' = Gbar^2 w`, radial `r_G` distances, curve lengths, and sampled
//! completeness verdicts.
//!
//! The admissibility conditions are (a) `G > 0`, (b) `int_0^inf dr/G = inf`,
//! (c) `G` nondecreasing. For the closed-form families (b) is decided
//! analytically; for sampled tables it is delegated to the numerical probe
//! and stays three-valued. The completeness verdict is deliberately a
//! falsifier: sampling can refute a bound, it can never certify one.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::chart::ChartMetric;
use crate::fm;
use crate::graph::GraphHypersurface;
use crate::gridpath::{grid_distance_field, GridBox, GridPathError};
use crate::jet::Jet;
use crate::ode::{integrate_ode, OdeOptions, OdeTrajectory};
use crate::quad::{divergence_probe, quad_adaptive, DivergenceVerdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Fails,
    Inconclusive,
}

impl Verdict {
    pub fn holds(self) -> bool {
        self == Verdict::Holds
    }
}

/// Classification of a bound function against the admissibility conditions.
#[derive(Debug, Clone)]
pub struct ConditionReport {
    pub positive: Verdict,
    pub integral_diverges: Verdict,
    pub nondecreasing: Verdict,
    pub note: Option<String>,
}

impl ConditionReport {
    pub fn admissible(&self) -> bool {
        self.positive.holds() && self.integral_diverges.holds() && self.nondecreasing.holds()
    }
}

#[derive(Debug, Clone)]
pub enum BoundError {
    MissingCondition { needed: &'static str },
    Invalid(String),
    Grid(GridPathError),
}

impl From<GridPathError> for BoundError {
    fn from(e: GridPathError) -> Self {
        BoundError::Grid(e)
    }
}

impl core::fmt::Display for BoundError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            BoundError::MissingCondition { needed } => {
                write!(f, "bound function lacks required condition {needed}")
            }
            BoundError::Invalid(m) => write!(f, "{m}"),
            BoundError::Grid(e) => write!(f, "{e}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for BoundError {}

/// Growth-bound function on `[0, infinity)`.
#[derive(Clone, Debug)]
pub enum BoundFunction {
    /// `a r + b`.
    Affine { a: f64, b: f64 },
    /// `ln(a r + 1) + b`.
    LogAffine { a: f64, b: f64 },
    /// `scale (1 + r)^p`.
    Power { p: f64, scale: f64 },
    /// `a r ln^k(1 + r) + b`.
    RLogK { a: f64, b: f64, k: f64 },
    /// Table with linear interpolation and linear tail extrapolation.
    Sampled { xs: Vec<f64>, ys: Vec<f64> },
    /// `G(int_0^s dr / G)` for an admissible inner bound.
    Gm { inner: Box<BoundFunction> },
    /// Polygonal majorant through `(k, G0(k+1))` with C1 corner rounding.
    Smoothed { inner: Box<BoundFunction>, h: f64 },
}

impl BoundFunction {
    pub fn sampled(xs: Vec<f64>, ys: Vec<f64>) -> Result<BoundFunction, BoundError> {
        if xs.len() != ys.len() || xs.len() < 2 {
            return Err(BoundError::Invalid(String::from("need at least two nodes")));
        }
        if !xs.windows(2).all(|w| w[0] < w[1]) {
            return Err(BoundError::Invalid(String::from(
                "sample nodes must be strictly increasing",
            )));
        }
        Ok(BoundFunction::Sampled { xs, ys })
    }

    pub fn eval(&self, r: f64) -> f64 {
        match self {
            BoundFunction::Affine { a, b } => a * r + b,
            BoundFunction::LogAffine { a, b } => fm::ln_1p(a * r) + b,
            BoundFunction::Power { p, scale } => scale * fm::powf(1.0 + r, *p),
            BoundFunction::RLogK { a, b, k } => {
                let l = fm::ln_1p(r);
                a * r * fm::powf(l, *k) + b
            }
            BoundFunction::Sampled { xs, ys } => {
                let n = xs.len();
                if r <= xs[0] {
                    let slope = (ys[1] - ys[0]) / (xs[1] - xs[0]);
                    return ys[0] + slope * (r - xs[0]);
                }
                if r >= xs[n - 1] {
                    let slope = (ys[n - 1] - ys[n - 2]) / (xs[n - 1] - xs[n - 2]);
                    return ys[n - 1] + slope * (r - xs[n - 1]);
                }
                let i = xs.partition_point(|&x| x < r).max(1) - 1;
                let t = (r - xs[i]) / (xs[i + 1] - xs[i]);
                ys[i] + t * (ys[i + 1] - ys[i])
            }
            BoundFunction::Gm { inner } => {
                let s = quad_adaptive(&|t| 1.0 / inner.eval(t), 0.0, r, 1e-12)
                    .expect("1/G quadrature");
                inner.eval(s)
            }
            BoundFunction::Smoothed { inner, h } => smoothed_eval(inner, *h, r),
        }
    }

    /// Analytic classification for the closed-form families; scan plus
    /// probe for sampled tables.
    pub fn classify(&self) -> ConditionReport {
        match self {
            BoundFunction::Affine { a, b } => ConditionReport {
                positive: holds_if(*b > 0.0 && *a >= 0.0),
                integral_diverges: holds_if(*a >= 0.0 && *b > 0.0),
                nondecreasing: holds_if(*a >= 0.0),
                note: None,
            },
            BoundFunction::LogAffine { a, b } => ConditionReport {
                positive: holds_if(*b > 0.0 && *a >= 0.0),
                integral_diverges: holds_if(*a >= 0.0 && *b > 0.0),
                nondecreasing: holds_if(*a >= 0.0),
                note: None,
            },
            BoundFunction::Power { p, scale } => ConditionReport {
                positive: holds_if(*scale > 0.0),
                integral_diverges: holds_if(*scale > 0.0 && *p <= 1.0),
                nondecreasing: holds_if(*scale > 0.0 && *p >= 0.0),
                note: None,
            },
            BoundFunction::RLogK { a, b, k } => ConditionReport {
                positive: holds_if(*b > 0.0 && *a >= 0.0 && *k > 0.0),
                integral_diverges: holds_if(*a >= 0.0 && *b > 0.0 && (*a == 0.0 || *k <= 1.0)),
                nondecreasing: holds_if(*a >= 0.0 && *k > 0.0),
                note: if *k > 1.0 && *a > 0.0 {
                    Some(format!(
                        "k = {k}: 1/G is integrable, so the divergence condition fails \
                         even though the growth looks admissibly slow"
                    ))
                } else {
                    None
                },
            },
            BoundFunction::Sampled { xs, ys } => {
                let positive = holds_if(ys.iter().all(|&v| v > 0.0));
                let nondecreasing = holds_if(ys.windows(2).all(|w| w[1] >= w[0] - 1e-12));
                let integral_diverges = if positive.holds() {
                    let me = self.clone();
                    match divergence_probe(&move |t| me.eval(t).max(1e-12), xs[0].max(0.0), 20.0)
                    {
                        Ok(rep) => match rep.verdict {
                            DivergenceVerdict::Divergent => Verdict::Holds,
                            DivergenceVerdict::Convergent => Verdict::Fails,
                            DivergenceVerdict::Inconclusive => Verdict::Inconclusive,
                        },
                        Err(_) => Verdict::Inconclusive,
                    }
                } else {
                    Verdict::Inconclusive
                };
                ConditionReport {
                    positive,
                    integral_diverges,
                    nondecreasing,
                    note: Some(String::from(
                        "sampled table: (a), (c) verified on nodes only; (b) is a \
                         numerical heuristic",
                    )),
                }
            }
            BoundFunction::Gm { inner } | BoundFunction::Smoothed { inner, .. } => {
                let base = inner.classify();
                ConditionReport {
                    positive: base.positive,
                    // G^M <= G and the smoothed majorant is within a factor
                    // two of the polygon, so divergence carries over
                    integral_diverges: base.integral_diverges,
                    nondecreasing: base.nondecreasing,
                    note: base.note,
                }
            }
        }
    }

    /// The base-distance companion `G^M(s) = G(int_0^s dr / G(r))`.
    ///
    /// Requires conditions (a), (b), (c); the result satisfies them too and
    /// is dominated by `G`, which the constructor spot-checks.
    pub fn build_gm(&self) -> Result<BoundFunction, BoundError> {
        let rep = self.classify();
        if !rep.admissible() {
            return Err(BoundError::MissingCondition { needed: "(a), (b), (c)" });
        }
        let gm = BoundFunction::Gm { inner: Box::new(self.clone()) };
        let mut prev = f64::NEG_INFINITY;
        for i in 0..=20 {
            let s = 5.0 * i as f64;
            let v = gm.eval(s);
            if v > self.eval(s) + 1e-9 {
                return Err(BoundError::Invalid(format!("G^M({s}) = {v} above G")));
            }
            if v < prev - 1e-9 {
                return Err(BoundError::Invalid(format!("G^M not nondecreasing at {s}")));
            }
            if !(v > 0.0) {
                return Err(BoundError::Invalid(format!("G^M({s}) = {v} not positive")));
            }
            prev = v;
        }
        Ok(gm)
    }

    /// C1 majorant through the shifted nodes `(k, G0(k+1))`, rounded at the
    /// corners by monotone Hermite blending on `[k - h, k + h]`.
    pub fn polygonal_smooth(&self, h: f64) -> Result<BoundFunction, BoundError> {
        let rep = self.classify();
        if !rep.admissible() {
            return Err(BoundError::MissingCondition { needed: "(a), (b), (c)" });
        }
        assert!(h > 0.0 && h < 0.5);
        let sm = BoundFunction::Smoothed { inner: Box::new(self.clone()), h };
        // construction-time postcondition scan: dominates G0, nondecreasing
        let mut prev = 0.0;
        let mut r = 0.0;
        while r <= 12.0 {
            let v = sm.eval(r);
            if v < self.eval(r) - 1e-9 {
                return Err(BoundError::Invalid(format!(
                    "smoothed bound {v} below the original at r = {r}"
                )));
            }
            if v < prev - 1e-9 {
                return Err(BoundError::Invalid(format!("smoothed bound decreasing at {r}")));
            }
            prev = v;
            r += 1e-3;
        }
        Ok(sm)
    }
}

fn holds_if(b: bool) -> Verdict {
    if b {
        Verdict::Holds
    } else {
        Verdict::Fails
    }
}

fn smoothed_eval(inner: &BoundFunction, h: f64, r: f64) -> f64 {
    let r = r.max(0.0);
    let node = |k: f64| inner.eval(k + 1.0);
    let k_near = fm::round(r);
    if k_near >= 1.0 && fm::abs(r - k_near) < h {
        // corner window: Hermite between the two adjacent segments
        let k = k_near;
        let pl = node(k - 1.0) * h + node(k) * (1.0 - h);
        let pr = node(k) * (1.0 - h) + node(k + 1.0) * h;
        let sl = node(k) - node(k - 1.0);
        let sr = node(k + 1.0) - node(k);
        let t = (r - (k - h)) / (2.0 * h);
        let t2 = t * t;
        let t3 = t2 * t;
        let w = 2.0 * h;
        (2.0 * t3 - 3.0 * t2 + 1.0) * pl
            + (t3 - 2.0 * t2 + t) * w * sl
            + (-2.0 * t3 + 3.0 * t2) * pr
            + (t3 - t2) * w * sr
    } else {
        let k = fm::floor(r);
        let t = r - k;
        node(k) * (1.0 - t) + node(k + 1.0) * t
    }
}

/// `r_G = int_0^{r_M} dr / G(r)` for admissible `G`.
pub fn r_g_distance(g: &BoundFunction, r_m: f64) -> Result<f64, BoundError> {
    let rep = g.classify();
    if !rep.admissible() {
        return Err(BoundError::MissingCondition { needed: "(a), (b), (c)" });
    }
    quad_adaptive(&|t| 1.0 / g.eval(t), 0.0, r_m, 1e-11)
        .map_err(|e| BoundError::Invalid(format!("{e}")))
}

/// Parametrised curve inside a chart, with tangent evaluation.
#[derive(Clone)]
pub struct CurveSample {
    eval: Arc<dyn Fn(f64) -> (Vec<f64>, Vec<f64>) + Send + Sync>,
}

impl CurveSample {
    pub fn new(eval: Arc<dyn Fn(f64) -> (Vec<f64>, Vec<f64>) + Send + Sync>) -> Self {
        CurveSample { eval }
    }

    pub fn at(&self, t: f64) -> (Vec<f64>, Vec<f64>) {
        (self.eval)(t)
    }
}

/// Length of `curve` on `[a, b]` under a chart metric.
pub fn curve_length(
    metric: &ChartMetric,
    curve: &CurveSample,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<f64, BoundError> {
    let integrand = |t: f64| {
        let (p, v) = curve.at(t);
        let g = metric.values(&p);
        let dim = metric.dim();
        let mut q = 0.0;
        let mut scale = 0.0;
        for i in 0..dim {
            for j in 0..dim {
                q += g[i * dim + j] * v[i] * v[j];
                scale += fm::abs(g[i * dim + j] * v[i] * v[j]);
            }
        }
        // rounding can push a degenerating norm a few ulps negative
        assert!(
            q >= -1e-12 * (1.0 + scale),
            "non-spacelike tangent under the designated metric at t = {t} (q = {q})"
        );
        fm::sqrt(q.max(0.0))
    };
    quad_adaptive(&integrand, a, b, tol).map_err(|e| BoundError::Invalid(format!("{e}")))
}

/// Result of the Jacobi comparison run for `w'' = Gbar^2 w`, `w(0) = 0`,
/// `w'(0) = 1`.
#[derive(Debug, Clone)]
pub struct JacobiReport {
    /// `lambda(2) = exp(int_0^2 Gbar) / (exp(int_1^2 Gbar) - 1)`.
    pub lambda2: f64,
    /// `(t, ln w, w'/w, Gbar(t))` samples.
    pub rows: Vec<(f64, f64, f64, f64)>,
    /// `w, w', w'' > 0` on the sampled `(0, T]`.
    pub positive_ok: bool,
    /// `w'/w <= lambda(2) Gbar(t)` for sampled `t >= 2`.
    pub ratio_bound_ok: bool,
    /// Wronskian-type bound `w'/w <= f'/f` for the comparison function
    /// `f = (exp(int_0^t Gbar) - 1) / Gbar(0)`.
    pub wronskian_ok: bool,
    pub max_ratio_over_gbar: f64,
    /// Direct-phase trajectory of `(w, w', int Gbar)`, before any switch to
    /// logarithmic coordinates.
    pub direct: OdeTrajectory,
    pub switch_time: Option<f64>,
}

/// Integrate and verify the comparison problem on `[0, t_end]`.
///
/// The direct integration switches to `(ln w, w'/w)` coordinates when `w`
/// approaches overflow; fast-growing bounds like `1 + t` need this well
/// before `t = 50`.
pub fn jacobi_comparison(gbar: &BoundFunction, t_end: f64) -> Result<JacobiReport, BoundError> {
    if !(t_end > 2.0) {
        return Err(BoundError::Invalid(String::from("t_end must exceed 2")));
    }
    let rep = gbar.classify();
    if !(rep.positive.holds() && rep.nondecreasing.holds()) {
        return Err(BoundError::MissingCondition { needed: "(i), (ii)" });
    }
    let opts = OdeOptions { rtol: 1e-12, atol: 1e-14, ..Default::default() };

    // state [w, w', q], q = int_0^t Gbar
    let rhs = |t: f64, y: &[f64], dy: &mut [f64]| {
        let g = gbar.eval(t);
        dy[0] = y[1];
        dy[1] = g * g * y[0];
        dy[2] = g;
    };
    let stop = |_t: f64, y: &[f64]| y[0] - 1e250;
    let direct = integrate_ode(&rhs, 0.0, &[0.0, 1.0, 0.0], t_end, &opts, Some(&stop))
        .map_err(|e| BoundError::Invalid(format!("{e}")))?;

    let (switch_time, log_traj) = if direct.stopped_by_event() {
        let ts = direct.t_end();
        let ys = direct.eval(ts);
        let start = [fm::ln(ys[0]), ys[1] / ys[0], ys[2]];
        let rhs_log = |t: f64, y: &[f64], dy: &mut [f64]| {
            let g = gbar.eval(t);
            dy[0] = y[1];
            dy[1] = g * g - y[1] * y[1];
            dy[2] = g;
        };
        let lt = integrate_ode(&rhs_log, ts, &start, t_end, &opts, None)
            .map_err(|e| BoundError::Invalid(format!("{e}")))?;
        (Some(ts), Some(lt))
    } else {
        (None, None)
    };

    let q_at = |t: f64| -> f64 {
        if t <= direct.t_end() {
            direct.eval(t)[2]
        } else {
            log_traj.as_ref().unwrap().eval(t)[2]
        }
    };
    let state_at = |t: f64| -> (f64, f64) {
        // (ln w, w'/w)
        if t <= direct.t_end() {
            let y = direct.eval(t);
            (fm::ln(y[0].max(1e-300)), y[1] / y[0])
        } else {
            let y = log_traj.as_ref().unwrap().eval(t);
            (y[0], y[1])
        }
    };

    let q2 = q_at(2.0);
    let q1 = q_at(1.0);
    let lambda2 = fm::exp(q2) / (fm::exp(q2 - q1) - 1.0);

    let g0 = gbar.eval(0.0);
    let mut rows = Vec::new();
    let mut positive_ok = true;
    let mut ratio_ok = true;
    let mut wronskian_ok = true;
    let mut max_ratio = 0.0f64;
    let samples = 480;
    for i in 1..=samples {
        let t = 0.1 + (t_end - 0.1) * i as f64 / samples as f64;
        let (ln_w, v) = state_at(t);
        let g = gbar.eval(t);
        rows.push((t, ln_w, v, g));
        // w > 0 iff ln w finite; w' > 0 iff v > 0; w'' = Gbar^2 w > 0 follows
        if !ln_w.is_finite() || v <= 0.0 {
            positive_ok = false;
        }
        if t >= 2.0 {
            let ratio = v / g;
            max_ratio = max_ratio.max(ratio);
            if v > lambda2 * g + 1e-9 {
                ratio_ok = false;
            }
        }
        // f'/f = Gbar(t) / (1 - exp(-q))
        let q = q_at(t);
        let f_ratio = g / (1.0 - fm::exp(-q));
        if v > f_ratio + 1e-7 * (1.0 + f_ratio) {
            wronskian_ok = false;
        }
    }
    let _ = g0;

    Ok(JacobiReport {
        lambda2,
        rows,
        positive_ok,
        ratio_bound_ok: ratio_ok,
        wronskian_ok,
        max_ratio_over_gbar: max_ratio,
        direct,
        switch_time,
    })
}

/// Which distance feeds the radial bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RadialBasis {
    /// Intrinsic distance of the induced metric.
    IntrinsicR,
    /// Distance of the base `(M, g_M)`.
    BaseRM,
    /// Distance of the graph under `g_M + dt^2`.
    GraphRE,
}

/// Which quantity the bound must dominate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundedQuantity {
    /// `|nu_M|`, the base part of the unit normal.
    NuM,
    /// `|nu|_E`, the Euclidean norm of the unit normal.
    NuE,
    /// Mean curvature, checked against `c G(r)`.
    MeanH,
}

#[derive(Debug, Clone)]
pub enum CompletenessVerdict {
    /// No sampled violation; a sufficient-condition statement only.
    Consistent { samples: usize },
    Violated { points: Vec<([f64; 2], f64, f64)> },
}

/// Sample the radial bound `quantity(x) <= G(r(x))` over the given points.
///
/// The base-distance variant additionally requires `G` nondecreasing,
/// mirroring the pattern-curve lesson that monotonicity is what lets a
/// base bound control the graph. Distances come from a single-source grid
/// Dijkstra run under the corresponding metric.
pub fn completeness_verdict(
    graph: &GraphHypersurface,
    g: &BoundFunction,
    basis: RadialBasis,
    quantity: BoundedQuantity,
    bx: &GridBox,
    resolution: usize,
    origin: [f64; 2],
    samples: &[[f64; 2]],
) -> Result<CompletenessVerdict, BoundError> {
    let rep = g.classify();
    if !(rep.positive.holds() && rep.integral_diverges.holds()) {
        return Err(BoundError::MissingCondition { needed: "(a), (b)" });
    }
    if basis == RadialBasis::BaseRM && !rep.nondecreasing.holds() {
        return Err(BoundError::MissingCondition { needed: "(c) for base-distance bounds" });
    }
    let metric = match basis {
        RadialBasis::IntrinsicR => graph.induced_metric(),
        RadialBasis::BaseRM => graph.space.base.clone(),
        RadialBasis::GraphRE => graph.euclidean_graph_metric(),
    };
    let field = grid_distance_field(&metric, bx, resolution, origin)?;
    let mut violations = Vec::new();
    for &p in samples {
        let gj = graph
            .eval(&p, 0)
            .map_err(|e| BoundError::Invalid(format!("{e}")))?;
        let nu_vals: Vec<f64> = gj.nu_m.iter().map(Jet::value).collect();
        let value = match quantity {
            BoundedQuantity::NuM => fm::sqrt(gj.ip_base(&nu_vals, &nu_vals)),
            BoundedQuantity::NuE => fm::sqrt(
                gj.ip_base(&nu_vals, &nu_vals) + gj.nu_r.value() * gj.nu_r.value(),
            ),
            BoundedQuantity::MeanH => gj.mean_h.value(),
        };
        let r = field.distance_to(p);
        let mut bound = g.eval(r);
        if quantity == BoundedQuantity::MeanH {
            bound *= graph.speed;
        }
        if value > bound + 1e-9 * (1.0 + fm::abs(bound)) {
            violations.push((p, value, bound));
        }
    }
    if violations.is_empty() {
        Ok(CompletenessVerdict::Consistent { samples: samples.len() })
    } else {
        Ok(CompletenessVerdict::Violated { points: violations })
    }
}
