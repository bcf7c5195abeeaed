//! Adaptive embedded Runge-Kutta integration (Dormand-Prince 5(4)).
//!
//! Step acceptance is deterministic: identical inputs produce bit-identical
//! trajectories. Dense output uses the method's standard fourth-order
//! continuous extension, and an optional event predicate stops the
//! integration at a sign change located to interpolation tolerance.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::fm;

/// Right-hand side `f(t, y, dy)`.
pub type Rhs<'a> = &'a dyn Fn(f64, &[f64], &mut [f64]);

/// Scalar event function; integration stops where it crosses zero.
pub type Event<'a> = &'a dyn Fn(f64, &[f64]) -> f64;

#[derive(Clone, Debug)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub h_initial: Option<f64>,
    pub h_max: Option<f64>,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            rtol: 1e-10,
            atol: 1e-12,
            h_initial: None,
            h_max: None,
            max_steps: 4_000_000,
        }
    }
}

#[derive(Debug, Clone)]
pub enum OdeError {
    /// Step size collapsed; carries the last reachable parameter value.
    StepSizeUnderflow { t_reached: f64 },
    /// The right-hand side produced a non-finite value.
    NonFiniteRhs { t: f64 },
    /// Step budget exhausted.
    MaxStepsExceeded { t_reached: f64 },
    InvalidInput(String),
}

impl core::fmt::Display for OdeError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            OdeError::StepSizeUnderflow { t_reached } => {
                write!(f, "step size underflow at t = {t_reached}")
            }
            OdeError::NonFiniteRhs { t } => write!(f, "non-finite rhs at t = {t}"),
            OdeError::MaxStepsExceeded { t_reached } => {
                write!(f, "step budget exhausted at t = {t_reached}")
            }
            OdeError::InvalidInput(m) => write!(f, "{m}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for OdeError {}

/// Coefficients of the quartic interpolant on one accepted step,
/// `u(theta) = c1 + theta (c2 + (1-theta)(c3 + theta (c4 + (1-theta) c5)))`
/// with `theta = (t - t_left) / h` and `h` signed in integration direction.
#[derive(Clone, Debug)]
struct Segment {
    t_left: f64,
    h: f64,
    rcont: [Vec<f64>; 5],
}

impl Segment {
    fn eval(&self, t: f64) -> Vec<f64> {
        let th = (t - self.t_left) / self.h;
        let om = 1.0 - th;
        let [c1, c2, c3, c4, c5] = &self.rcont;
        (0..c1.len())
            .map(|d| c1[d] + th * (c2[d] + om * (c3[d] + th * (c4[d] + om * c5[d]))))
            .collect()
    }

    fn eval_deriv(&self, t: f64) -> Vec<f64> {
        let th = (t - self.t_left) / self.h;
        let [_, c2, c3, c4, c5] = &self.rcont;
        (0..c2.len())
            .map(|d| {
                (c2[d]
                    + (1.0 - 2.0 * th) * c3[d]
                    + th * (2.0 - 3.0 * th) * c4[d]
                    + 2.0 * th * (1.0 - th) * (1.0 - 2.0 * th) * c5[d])
                    / self.h
            })
            .collect()
    }
}

/// Accepted steps of an integration, with dense evaluation between them.
///
/// Breakpoints are strictly increasing regardless of integration direction;
/// backward runs are reversed into ascending order on completion.
#[derive(Clone, Debug)]
pub struct OdeTrajectory {
    ts: Vec<f64>,
    ys: Vec<Vec<f64>>,
    fs: Vec<Vec<f64>>,
    segs: Vec<Segment>,
    achieved_tol: f64,
    stopped_by_event: bool,
}

impl OdeTrajectory {
    pub fn breakpoints(&self) -> &[f64] {
        &self.ts
    }

    pub fn states(&self) -> &[Vec<f64>] {
        &self.ys
    }

    /// Right-hand side values at the breakpoints.
    pub fn derivatives(&self) -> &[Vec<f64>] {
        &self.fs
    }

    pub fn t_start(&self) -> f64 {
        self.ts[0]
    }

    pub fn t_end(&self) -> f64 {
        *self.ts.last().unwrap()
    }

    /// Estimate of the accumulated local error.
    pub fn achieved_tol(&self) -> f64 {
        self.achieved_tol
    }

    pub fn stopped_by_event(&self) -> bool {
        self.stopped_by_event
    }

    pub fn dim(&self) -> usize {
        self.ys[0].len()
    }

    fn segment(&self, t: f64) -> &Segment {
        let i = match self.ts.binary_search_by(|v| v.total_cmp(&t)) {
            Ok(i) => i.min(self.segs.len().saturating_sub(1)),
            Err(i) => i.clamp(1, self.ts.len() - 1) - 1,
        };
        &self.segs[i.min(self.segs.len() - 1)]
    }

    /// Dense evaluation on the enclosing step's continuous extension.
    pub fn eval(&self, t: f64) -> Vec<f64> {
        if self.segs.is_empty() {
            return self.ys[0].clone();
        }
        self.segment(t).eval(t)
    }

    /// Derivative of the dense interpolant.
    pub fn eval_deriv(&self, t: f64) -> Vec<f64> {
        if self.segs.is_empty() {
            return self.fs[0].clone();
        }
        self.segment(t).eval_deriv(t)
    }
}

// Dormand-Prince 5(4) tableau.
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const E: [f64; 7] = [
    35.0 / 384.0 - 5179.0 / 57600.0,
    0.0,
    500.0 / 1113.0 - 7571.0 / 16695.0,
    125.0 / 192.0 - 393.0 / 640.0,
    -2187.0 / 6784.0 + 92097.0 / 339200.0,
    11.0 / 84.0 - 187.0 / 2100.0,
    -1.0 / 40.0,
];
// dense-output weights for the fifth coefficient
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

/// Integrate `y' = rhs(t, y)` from `(t0, y0)` to `t1`.
///
/// When `stop` is supplied, integration ends at the first sign change of the
/// event function, located on the dense interpolant. Backward integration
/// (`t1 < t0`) is supported; the returned trajectory is always ascending.
pub fn integrate_ode(
    rhs: Rhs,
    t0: f64,
    y0: &[f64],
    t1: f64,
    opts: &OdeOptions,
    stop: Option<Event>,
) -> Result<OdeTrajectory, OdeError> {
    if !(opts.rtol > 0.0 && opts.atol > 0.0) {
        return Err(OdeError::InvalidInput(format!(
            "tolerances must be positive (rtol={}, atol={})",
            opts.rtol, opts.atol
        )));
    }
    let dim = y0.len();
    let mut f0 = vec![0.0; dim];
    rhs(t0, y0, &mut f0);
    if !f0.iter().all(|v| v.is_finite()) {
        return Err(OdeError::NonFiniteRhs { t: t0 });
    }
    if t0 == t1 {
        return Ok(OdeTrajectory {
            ts: vec![t0],
            ys: vec![y0.to_vec()],
            fs: vec![f0],
            segs: Vec::new(),
            achieved_tol: 0.0,
            stopped_by_event: false,
        });
    }

    let dir = fm::signum(t1 - t0);
    let span = fm::abs(t1 - t0);
    let h_max = opts.h_max.unwrap_or(span);

    let mut t = t0;
    let mut y = y0.to_vec();
    let mut f = f0;

    let mut h = opts.h_initial.unwrap_or_else(|| initial_step(&y, &f, span, opts));
    h = h.min(h_max) * dir;

    let mut ts = vec![t];
    let mut ys = vec![y.clone()];
    let mut fs = vec![f.clone()];
    let mut segs: Vec<Segment> = Vec::new();
    let mut err_acc = 0.0f64;
    let mut ev_prev = stop.map(|e| e(t, &y));
    let mut k = vec![vec![0.0; dim]; 7];
    let mut steps = 0usize;

    while (t1 - t) * dir > 0.0 {
        steps += 1;
        if steps > opts.max_steps {
            return Err(OdeError::MaxStepsExceeded { t_reached: t });
        }
        if fm::abs(h) < 16.0 * f64::EPSILON * fm::abs(t).max(1.0) {
            return Err(OdeError::StepSizeUnderflow { t_reached: t });
        }
        if (t + h - t1) * dir > 0.0 {
            h = t1 - t;
        }

        k[0].copy_from_slice(&f);
        let mut ytmp = vec![0.0; dim];
        for stage in 0..6 {
            for d in 0..dim {
                let mut acc = y[d];
                for (j, kj) in k.iter().enumerate().take(stage + 1) {
                    acc += h * A[stage][j] * kj[d];
                }
                ytmp[d] = acc;
            }
            let (_, hi) = k.split_at_mut(stage + 1);
            rhs(t + C[stage] * h, &ytmp, &mut hi[0]);
            if !k[stage + 1].iter().all(|v| v.is_finite()) {
                return Err(OdeError::NonFiniteRhs { t: t + C[stage] * h });
            }
        }
        // the 5th-order solution is stage 7's evaluation point (FSAL)
        let ynew = ytmp.clone();
        let fnew = k[6].clone();

        let mut err = 0.0f64;
        for d in 0..dim {
            let mut e = 0.0;
            for (j, kj) in k.iter().enumerate() {
                e += E[j] * kj[d];
            }
            e *= h;
            let sc = opts.atol + opts.rtol * fm::abs(y[d]).max(fm::abs(ynew[d]));
            err += (e / sc) * (e / sc);
        }
        err = fm::sqrt(err / dim as f64);

        if err <= 1.0 {
            let seg = make_segment(t, h, &y, &ynew, &k);
            t += h;
            ts.push(t);
            ys.push(ynew.clone());
            fs.push(fnew.clone());
            segs.push(seg);
            y = ynew;
            f = fnew;
            err_acc += err * (opts.atol + opts.rtol);

            if let (Some(ev), Some(prev)) = (stop, ev_prev) {
                let cur = ev(t, &y);
                if prev != 0.0 && (cur == 0.0 || (cur > 0.0) != (prev > 0.0)) {
                    return Ok(locate_event(
                        finish(ts, ys, fs, segs, err_acc, true, dir),
                        ev,
                        dir,
                    ));
                }
                ev_prev = Some(cur);
            }
        }

        let fac = if err > 0.0 { 0.9 * fm::powf(err, -0.2) } else { 5.0 };
        h *= fac.clamp(0.2, 5.0);
        if fm::abs(h) > h_max {
            h = h_max * dir;
        }
    }

    Ok(finish(ts, ys, fs, segs, err_acc, false, dir))
}

fn make_segment(t: f64, h: f64, y: &[f64], ynew: &[f64], k: &[Vec<f64>]) -> Segment {
    let dim = y.len();
    let mut c = [
        y.to_vec(),
        vec![0.0; dim],
        vec![0.0; dim],
        vec![0.0; dim],
        vec![0.0; dim],
    ];
    for d in 0..dim {
        let ydiff = ynew[d] - y[d];
        let bspl = h * k[0][d] - ydiff;
        c[1][d] = ydiff;
        c[2][d] = bspl;
        c[3][d] = ydiff - h * k[6][d] - bspl;
        let mut acc = 0.0;
        for (j, kj) in k.iter().enumerate() {
            acc += D[j] * kj[d];
        }
        c[4][d] = h * acc;
    }
    Segment { t_left: t, h, rcont: c }
}

fn initial_step(y: &[f64], f: &[f64], span: f64, opts: &OdeOptions) -> f64 {
    let ny = fm::sqrt(y.iter().map(|v| v * v).sum::<f64>());
    let nf = fm::sqrt(f.iter().map(|v| v * v).sum::<f64>());
    let h = if nf > 1e-12 {
        0.01 * (ny.max(opts.atol)) / nf
    } else {
        1e-4 * span
    };
    h.clamp(1e-10 * span.max(1.0), span)
}

fn finish(
    mut ts: Vec<f64>,
    mut ys: Vec<Vec<f64>>,
    mut fs: Vec<Vec<f64>>,
    mut segs: Vec<Segment>,
    err_acc: f64,
    event: bool,
    dir: f64,
) -> OdeTrajectory {
    if dir < 0.0 {
        ts.reverse();
        ys.reverse();
        fs.reverse();
        segs.reverse();
    }
    debug_assert!(ts.windows(2).all(|w| w[0] < w[1]));
    OdeTrajectory {
        ts,
        ys,
        fs,
        segs,
        achieved_tol: err_acc,
        stopped_by_event: event,
    }
}

/// Shrink the final step so the trajectory ends at the event crossing.
fn locate_event(traj: OdeTrajectory, ev: Event, dir: f64) -> OdeTrajectory {
    let (ia, ib) = if dir > 0.0 {
        (traj.ts.len() - 2, traj.ts.len() - 1)
    } else {
        (1, 0)
    };
    let (mut a, mut b) = (traj.ts[ia], traj.ts[ib]);
    let va = ev(a, &traj.eval(a));
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if fm::abs(b - a) < 1e-14 * fm::abs(m).max(1.0) {
            break;
        }
        let vm = ev(m, &traj.eval(m));
        if vm == 0.0 {
            a = m;
            b = m;
            break;
        }
        if (vm > 0.0) == (va > 0.0) {
            a = m;
        } else {
            b = m;
        }
    }
    let t_ev = 0.5 * (a + b);
    let y_ev = traj.eval(t_ev);
    let f_ev = traj.eval_deriv(t_ev);
    let OdeTrajectory { mut ts, mut ys, mut fs, mut segs, achieved_tol, .. } = traj;
    if dir > 0.0 {
        ts.pop();
        ys.pop();
        fs.pop();
        if t_ev > *ts.last().unwrap() {
            ts.push(t_ev);
            ys.push(y_ev);
            fs.push(f_ev);
        } else {
            segs.pop();
        }
    } else {
        ts.remove(0);
        ys.remove(0);
        fs.remove(0);
        if t_ev < ts[0] {
            ts.insert(0, t_ev);
            ys.insert(0, y_ev);
            fs.insert(0, f_ev);
        } else {
            segs.remove(0);
        }
    }
    OdeTrajectory {
        ts,
        ys,
        fs,
        segs,
        achieved_tol,
        stopped_by_event: true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_growth() {
        let traj = integrate_ode(
            &|_t, y, dy| dy[0] = y[0],
            0.0,
            &[1.0],
            1.0,
            &OdeOptions::default(),
            None,
        )
        .unwrap();
        let e = traj.eval(1.0)[0];
        assert!((e - core::f64::consts::E).abs() < 1e-10, "{e}");
    }

    #[test]
    fn constant_solution_exact() {
        let traj = integrate_ode(
            &|_t, _y, dy| dy[0] = 0.0,
            0.0,
            &[3.0],
            5.0,
            &OdeOptions::default(),
            None,
        )
        .unwrap();
        assert_eq!(traj.eval(5.0)[0], 3.0);
    }

    #[test]
    fn riccati_decay_closed_form() {
        // y' = -y^2, y(0) = 1 has solution 1/(1+t); frozen value y(9) = 0.1
        let traj = integrate_ode(
            &|_t, y, dy| dy[0] = -y[0] * y[0],
            0.0,
            &[1.0],
            9.0,
            &OdeOptions::default(),
            None,
        )
        .unwrap();
        assert!((traj.eval(9.0)[0] - 0.1).abs() < 1e-9);
    }

    #[test]
    fn tolerance_halving_reduces_error() {
        let run = |rtol: f64| {
            let opts = OdeOptions { rtol, atol: rtol * 1e-2, ..Default::default() };
            let traj = integrate_ode(
                &|_t, y, dy| dy[0] = -y[0] * y[0],
                0.0,
                &[1.0],
                9.0,
                &opts,
                None,
            )
            .unwrap();
            (traj.eval(9.0)[0] - 0.1).abs()
        };
        let coarse = run(1e-6);
        let fine = run(5e-7);
        assert!(fine < coarse, "fine {fine} vs coarse {coarse}");
    }

    #[test]
    fn dense_output_matches_breakpoints() {
        let traj = integrate_ode(
            &|t, _y, dy| dy[0] = t.cos(),
            0.0,
            &[0.0],
            3.0,
            &OdeOptions::default(),
            None,
        )
        .unwrap();
        for (i, &t) in traj.breakpoints().iter().enumerate() {
            assert!((traj.eval(t)[0] - traj.states()[i][0]).abs() < 1e-13);
        }
        assert!((traj.eval(2.0)[0] - 2.0f64.sin()).abs() < 1e-9);
        assert!((traj.eval_deriv(2.0)[0] - 2.0f64.cos()).abs() < 1e-7);
    }

    #[test]
    fn event_stop_located() {
        // y' = 1, stop at y = 2.5
        let traj = integrate_ode(
            &|_t, _y, dy| dy[0] = 1.0,
            0.0,
            &[0.0],
            10.0,
            &OdeOptions::default(),
            Some(&|_t, y| y[0] - 2.5),
        )
        .unwrap();
        assert!(traj.stopped_by_event());
        assert!((traj.t_end() - 2.5).abs() < 1e-9);
    }

    #[test]
    fn backward_integration_ascending() {
        let traj = integrate_ode(
            &|_t, y, dy| dy[0] = y[0],
            0.0,
            &[1.0],
            -1.0,
            &OdeOptions::default(),
            None,
        )
        .unwrap();
        assert!(traj.breakpoints().windows(2).all(|w| w[0] < w[1]));
        assert!((traj.eval(-1.0)[0] - (-1.0f64).exp()).abs() < 1e-10);
        assert!((traj.eval(-0.5)[0] - (-0.5f64).exp()).abs() < 1e-9);
    }
}
