//! Adaptive quadrature and improper-integral probing.
//!
//! [`quad_adaptive`] bisects panels under a Gauss-Kronrod 7-15 rule until
//! the Kronrod error estimate falls below the requested tolerance.
//! [`divergence_probe`] pushes partial integrals of a positive integrand
//! along a geometric checkpoint ladder and reports a three-valued verdict;
//! it is a numerical heuristic, never a proof — callers that need certainty
//! must classify closed-form families analytically (see [`crate::bounds`]).

use alloc::string::String;
use alloc::vec::Vec;

use crate::fm;

// Gauss-Kronrod 7-15 nodes and weights on [-1, 1].
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Gauss-Legendre 7 on [-1, 1]; used for fixed-panel cumulative integrals.
pub(crate) const GL7_X: [f64; 7] = [
    -0.949107912342758524526189684047851,
    -0.741531185599394439863864773280788,
    -0.405845151377397166906606412076961,
    0.0,
    0.405845151377397166906606412076961,
    0.741531185599394439863864773280788,
    0.949107912342758524526189684047851,
];
pub(crate) const GL7_W: [f64; 7] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
    0.381830050505118944950369775488975,
    0.279705391489276667901467771423780,
    0.129484966168869693270611432679082,
];

/// One GK15 panel: returns (kronrod, |kronrod - gauss|).
///
/// The odd-indexed Kronrod nodes are the embedded Gauss-7 nodes.
fn gk15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut kr = 0.0;
    let mut gauss = 0.0;
    for i in 0..8 {
        let x = XGK[i] * h;
        let v = if i == 7 { f(c) } else { f(c - x) + f(c + x) };
        kr += WGK[i] * v;
        if i % 2 == 1 {
            gauss += WG[i / 2] * v;
        }
    }
    (kr * h, fm::abs((kr - gauss) * h))
}

#[derive(Debug, Clone)]
pub enum QuadError {
    /// Panel budget exhausted; carries the best estimate and its bound.
    NonConvergence { best: f64, err_bound: f64 },
    InvalidInput(String),
}

impl core::fmt::Display for QuadError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            QuadError::NonConvergence { best, err_bound } => write!(
                f,
                "quadrature did not converge (best {best}, error bound {err_bound})"
            ),
            QuadError::InvalidInput(m) => write!(f, "{m}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for QuadError {}

/// Adaptive panel integration of `f` over `[a, b]` to absolute tolerance.
///
/// Globally adaptive: the panel with the worst Kronrod error estimate is
/// bisected until the summed estimate drops below `tol` or the panel budget
/// runs out. Panels at machine width stop splitting, so sub-epsilon kinks
/// in the integrand cannot wedge the refinement.
pub fn quad_adaptive(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64, QuadError> {
    if !(tol > 0.0) {
        return Err(QuadError::InvalidInput(String::from("tol must be positive")));
    }
    if a > b {
        return quad_adaptive(f, b, a, tol).map(|v| -v);
    }
    if a == b {
        return Ok(0.0);
    }

    struct Panel {
        a: f64,
        b: f64,
        v: f64,
        e: f64,
        splittable: bool,
    }
    let make = |a: f64, b: f64| {
        let (v, e) = gk15(f, a, b);
        let splittable = (b - a) > 32.0 * f64::EPSILON * (fm::abs(a).max(fm::abs(b)) + 1.0);
        Panel { a, b, v, e, splittable }
    };

    let mut panels = alloc::vec![make(a, b)];
    let budget = 4000usize;
    for _ in 0..budget {
        let total_err: f64 = panels.iter().map(|p| p.e).sum();
        if total_err <= tol {
            break;
        }
        // deterministic worst-panel choice: largest error, leftmost wins ties
        let mut worst: Option<usize> = None;
        for (i, p) in panels.iter().enumerate() {
            if !p.splittable {
                continue;
            }
            match worst {
                None => worst = Some(i),
                Some(w) => {
                    if p.e > panels[w].e {
                        worst = Some(i);
                    }
                }
            }
        }
        let Some(w) = worst else { break };
        let Panel { a: pa, b: pb, .. } = panels[w];
        let m = 0.5 * (pa + pb);
        panels[w] = make(pa, m);
        panels.push(make(m, pb));
    }

    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    let value: f64 = panels.iter().map(|p| p.v).sum();
    let err: f64 = panels.iter().map(|p| p.e).sum();
    if err > tol.max(1e-14 * (1.0 + fm::abs(value))) {
        return Err(QuadError::NonConvergence { best: value, err_bound: err });
    }
    Ok(value)
}

/// Fixed Gauss-Legendre 7 panel; exact to degree 13, used where the
/// integrand is known smooth and the panel small.
pub fn gl7(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut acc = 0.0;
    for i in 0..7 {
        acc += GL7_W[i] * f(c + h * GL7_X[i]);
    }
    acc * h
}

/// Verdict of an improper-integral probe.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DivergenceVerdict {
    Divergent,
    Convergent,
    Inconclusive,
}

/// Partial-sum trace of a probe run.
#[derive(Debug, Clone)]
pub struct ProbeReport {
    pub verdict: DivergenceVerdict,
    /// `(upper limit, partial integral)` per checkpoint.
    pub partials: Vec<(f64, f64)>,
}

/// Probe `int_a^inf f` for divergence along geometric checkpoints.
///
/// The substitution `t = a + (e^s - 1)` turns decades of `t` into uniform
/// steps of `s`; checkpoints reach `t - a >= 1e8`. Divergence is declared
/// when the per-decade increments, weighted harmonically, stay bounded away
/// from zero across the last three decades; convergence when the tail is
/// Cauchy under a geometric decay estimate. Everything else is
/// [`DivergenceVerdict::Inconclusive`].
pub fn divergence_probe(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    s_max: f64,
) -> Result<ProbeReport, QuadError> {
    let s_end = s_max.max(fm::ln(1e8)); // reach at least 1e8 past a
    let steps_per_unit = 8usize;
    let n = (s_end * steps_per_unit as f64) as usize + 1;
    let ds = s_end / n as f64;

    // integrand in s: f(a + e^s - 1) e^s
    let g = |s: f64| {
        let es = fm::exp(s);
        f(a + es - 1.0) * es
    };

    // positivity precondition, sampled
    for i in 0..=16 {
        let s = s_end * i as f64 / 16.0;
        let t = a + fm::exp(s) - 1.0;
        if !(f(t) > 0.0) {
            return Err(QuadError::InvalidInput(String::from(
                "divergence_probe requires a positive integrand",
            )));
        }
    }

    let mut partials = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    partials.push((a, 0.0));
    for i in 0..n {
        let s0 = i as f64 * ds;
        let s1 = s0 + ds;
        acc += gl7(&g, s0, s1);
        partials.push((a + fm::exp(s1) - 1.0, acc));
    }

    // decade blocks in t: s in [j ln10, (j+1) ln10)
    let ln10 = core::f64::consts::LN_10;
    let decades = (s_end / ln10) as usize;
    let mut block = Vec::new();
    for j in 0..decades {
        let s_lo = j as f64 * ln10;
        let s_hi = (j + 1) as f64 * ln10;
        let p_lo = partial_at(&partials, a, s_lo);
        let p_hi = partial_at(&partials, a, s_hi);
        block.push(p_hi - p_lo);
    }

    let total = acc;
    let verdict = classify_blocks(&block, total);
    Ok(ProbeReport { verdict, partials })
}

fn partial_at(partials: &[(f64, f64)], a: f64, s: f64) -> f64 {
    let t = a + fm::exp(s) - 1.0;
    match partials.binary_search_by(|p| p.0.total_cmp(&t)) {
        Ok(i) => partials[i].1,
        Err(i) => partials[i.min(partials.len() - 1)].1,
    }
}

fn classify_blocks(block: &[f64], total: f64) -> DivergenceVerdict {
    let nd = block.len();
    if nd < 4 {
        return DivergenceVerdict::Inconclusive;
    }
    let scale = total.max(1e-300);

    // harmonic weighting: for log-slow divergence (e.g. 1/(t ln t)) the
    // decade increments decay like 1/j but j * D_j stays level
    let q = |j: usize| block[j] * (j + 1) as f64;
    let last3 = [q(nd - 3), q(nd - 2), q(nd - 1)];
    let early = q(2.min(nd - 4)).max(q(3.min(nd - 4)));

    let tail_min = last3.iter().cloned().fold(f64::INFINITY, f64::min);

    // convergence: geometric decay of decade increments with a tiny
    // extrapolated tail
    let d_last = block[nd - 1];
    let d_prev = block[nd - 2];
    if d_prev > 0.0 {
        let rho = d_last / d_prev;
        if rho < 0.5 {
            let tail = d_last * rho / (1.0 - rho);
            if tail < 1e-6 * scale {
                return DivergenceVerdict::Convergent;
            }
        }
    } else if d_last <= 0.0 {
        return DivergenceVerdict::Convergent;
    }

    if tail_min > 1e-10 * scale && tail_min >= 0.2 * early {
        return DivergenceVerdict::Divergent;
    }
    DivergenceVerdict::Inconclusive
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_integral() {
        let v = quad_adaptive(&|_t| 1.0, 0.0, 1.0, 1e-12).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sech_integral_matches_antiderivative() {
        // oracle: d/ds 2 atan(tanh(s/2)) = sech(s); over [-20, 20] the value
        // is 4 atan(tanh(10)), within 1e-7 of pi
        let v = quad_adaptive(&|t| 1.0 / t.cosh(), -20.0, 20.0, 1e-9).unwrap();
        let oracle = 4.0 * (10.0f64.tanh()).atan();
        assert!((v - oracle).abs() < 1e-9);
        assert!((v - core::f64::consts::PI).abs() < 1e-6);
    }

    #[test]
    fn log_integral() {
        let s = core::f64::consts::E - 1.0;
        let v = quad_adaptive(&|t| 1.0 / (t + 1.0), 0.0, s, 1e-12).unwrap();
        assert!((v - 1.0).abs() < 1e-10);
    }

    #[test]
    fn probe_harmonic_tail_divergent() {
        let r = divergence_probe(&|t| 1.0 / (1.0 + t), 0.0, 20.0).unwrap();
        assert_eq!(r.verdict, DivergenceVerdict::Divergent);
    }

    #[test]
    fn probe_p2_convergent() {
        let r = divergence_probe(&|t| 1.0 / ((1.0 + t) * (1.0 + t)), 0.0, 20.0).unwrap();
        assert_eq!(r.verdict, DivergenceVerdict::Convergent);
    }

    #[test]
    fn probe_log_log_divergent() {
        // oracle: antiderivative ln ln(2 + t) diverges
        let r = divergence_probe(&|t| 1.0 / ((2.0 + t) * (2.0 + t).ln()), 0.0, 20.0).unwrap();
        assert_eq!(r.verdict, DivergenceVerdict::Divergent);
    }

    #[test]
    fn probe_rejects_negative_integrand() {
        assert!(divergence_probe(&|t| -1.0 - t, 0.0, 20.0).is_err());
    }

    #[test]
    fn partial_trace_is_monotone() {
        let r = divergence_probe(&|t| 1.0 / (1.0 + t), 0.0, 20.0).unwrap();
        assert!(r.partials.windows(2).all(|w| w[1].1 >= w[0].1));
        assert!(r.partials.last().unwrap().0 >= 1e8);
    }
}
