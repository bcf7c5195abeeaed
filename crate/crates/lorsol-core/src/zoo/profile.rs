//! The one-dimensional soliton profile over the conformal strip.
//!
//! The graph function is `u(x, y) = f(y)` and everything reduces to the
//! slope variable `z = phi f'`, which satisfies
//! `phi z' = (1 - z^2)(phi' z + 1)`, `z(0) = 0`. The solution is odd and
//! strictly increasing with `z -> +-1` at the strip boundary. On the tails
//! (`|y| > 1/2`, where `phi = 1 - |y|`) the equation integrates in closed
//! form; partial fractions of `1/((1-z)^2 (1+z))` give the implicit relation
//! used past the numerically integrated range, and the `w` coordinate obeys
//! `w(z) = sqrt((1+z)/(1-z)) + c_plus` there. Mean curvature is
//! `H = 1/sqrt(1-z^2)`.
//!
//! Numeric range and closed-form tails overlap; the consistency of the two
//! representations is itself one of the checks.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::phi::PhiProfile;
use crate::fm;
use crate::jet::Jet;
use crate::ode::{integrate_ode, OdeOptions, OdeTrajectory};
use crate::quad::gl7;

#[derive(Debug, Clone)]
pub struct ProfileError(pub String);

impl core::fmt::Display for ProfileError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "profile construction failed: {}", self.0)
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ProfileError {}

/// Cumulative values at the breakpoints of one trajectory branch.
struct Cumulative {
    f: Vec<f64>,
    w: Vec<f64>,
}

/// The solved profile: trajectory branches for `z`, cumulative `f` and `w`,
/// junction data for the closed-form tails, and the truncation margin.
pub struct SolitonProfile {
    phi: PhiProfile,
    /// Branch on `[0, 1 - delta]`.
    pos: OdeTrajectory,
    /// Branch on `[-1 + delta, 0]`.
    neg: OdeTrajectory,
    cum_pos: Cumulative,
    cum_neg: Cumulative,
    pub delta: f64,
    /// `z(1/2)` and `z(-1/2)`.
    pub z_plus: f64,
    pub z_minus: f64,
    /// Constants matching the closed-form `w` tails to the numeric branch.
    pub c_plus: f64,
    pub c_minus: f64,
}

fn rhs_z(phi: &PhiProfile, y: f64, z: f64) -> f64 {
    (1.0 - z * z) * (phi.deriv(y) * z + 1.0) / phi.value(y)
}

impl SolitonProfile {
    /// Integrate the profile out to `|y| = 1 - delta`.
    ///
    /// Stops early (and errors) if `|z|` reaches `1 - 1e-8` first, which
    /// would contradict the strict monotone escape to the boundary.
    pub fn solve(phi: &PhiProfile, delta: f64, rtol: f64) -> Result<SolitonProfile, ProfileError> {
        if !(delta > 0.0 && delta <= 1e-3) {
            return Err(ProfileError(format!("delta = {delta} outside (0, 1e-3]")));
        }
        let opts = OdeOptions {
            rtol,
            atol: rtol * 1e-2,
            h_max: Some(0.01),
            ..Default::default()
        };
        let rhs = |y: f64, st: &[f64], dy: &mut [f64]| {
            dy[0] = rhs_z(phi, y, st[0]);
        };
        let stop = |_y: f64, st: &[f64]| fm::abs(st[0]) - (1.0 - 1e-8);
        let pos = integrate_ode(&rhs, 0.0, &[0.0], 1.0 - delta, &opts, Some(&stop))
            .map_err(|e| ProfileError(format!("forward branch: {e}")))?;
        let neg = integrate_ode(&rhs, 0.0, &[0.0], -1.0 + delta, &opts, Some(&stop))
            .map_err(|e| ProfileError(format!("backward branch: {e}")))?;
        if pos.stopped_by_event() || neg.stopped_by_event() {
            return Err(ProfileError(String::from(
                "|z| reached 1 before the strip boundary; numerical fault",
            )));
        }
        // monotonicity z' > 0 whenever |z| < 1
        for (i, t) in pos.breakpoints().iter().enumerate() {
            if pos.derivatives()[i][0] <= 0.0 {
                return Err(ProfileError(format!("z' <= 0 at y = {t}")));
            }
        }
        for (i, t) in neg.breakpoints().iter().enumerate() {
            if neg.derivatives()[i][0] <= 0.0 {
                return Err(ProfileError(format!("z' <= 0 at y = {t}")));
            }
        }

        let cum_pos = cumulative(phi, &pos, false);
        let cum_neg = cumulative(phi, &neg, true);

        let mut profile = SolitonProfile {
            phi: phi.clone(),
            pos,
            neg,
            cum_pos,
            cum_neg,
            delta,
            z_plus: 0.0,
            z_minus: 0.0,
            c_plus: 0.0,
            c_minus: 0.0,
        };
        profile.z_plus = profile.z_dense(0.5);
        profile.z_minus = profile.z_dense(-0.5);
        if !(profile.z_plus > 0.0 && profile.z_plus < 1.0) {
            return Err(ProfileError(format!("z(1/2) = {} out of (0,1)", profile.z_plus)));
        }
        let w_half = profile.w_numeric(0.5);
        profile.c_plus =
            w_half - fm::sqrt((1.0 + profile.z_plus) / (1.0 - profile.z_plus));
        let w_mhalf = profile.w_numeric(-0.5);
        profile.c_minus =
            w_mhalf + fm::sqrt((1.0 - profile.z_minus) / (1.0 + profile.z_minus));
        Ok(profile)
    }

    pub fn phi(&self) -> &PhiProfile {
        &self.phi
    }

    /// Largest `|y|` covered by the numeric branches.
    pub fn y_max(&self) -> f64 {
        self.pos.t_end()
    }

    fn z_dense(&self, y: f64) -> f64 {
        if y >= 0.0 {
            self.pos.eval(y)[0]
        } else {
            self.neg.eval(y)[0]
        }
    }

    /// `z(y)`, from the trajectory inside the integrated range and from the
    /// closed-form tail relation beyond it.
    pub fn z_at(&self, y: f64) -> f64 {
        if fm::abs(y) <= self.y_max() {
            self.z_dense(y)
        } else {
            assert!(fm::abs(y) < 1.0, "y = {y} outside the strip");
            self.z_tail(y)
        }
    }

    /// Implicit tail relation `Q(z) = Q(z_plus) + int_{1/2}^y dt/(1-t)` with
    /// `Q(z) = ln((1+z)/(1-z))/4 + 1/(2(1-z))`, solved by bisection; valid
    /// for `|y| > 1/2` independently of the trajectory range.
    pub fn z_tail(&self, y: f64) -> f64 {
        let a = fm::abs(y);
        debug_assert!(a > 0.5 && a < 1.0);
        let target = q_tail(self.z_plus) - fm::ln(1.0 - a) + fm::ln(0.5);
        // Q is strictly increasing on (z_plus, 1)
        let (mut lo, mut hi) = (self.z_plus, 1.0 - 1e-15);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if q_tail(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let z = 0.5 * (lo + hi);
        if y > 0.0 {
            z
        } else {
            -z
        }
    }

    /// Taylor jet of `z` at `y` through the differential equation: the
    /// dense value seeds the constant term and repeated substitution into
    /// the right-hand side fixes one more coefficient per pass.
    pub fn z_jet(&self, y: f64, order: usize) -> Jet {
        let z0 = self.z_at(y);
        let phi_full = self.phi.jet(y, order + 1);
        let phi_tr = phi_full.truncated(order);
        let dphi = phi_full.derivative(0);
        let phi_inv = phi_tr.recip();
        let mut zj = Jet::constant(z0, 1, order);
        for _ in 0..order.max(1) {
            let one_minus = zj.mul(&zj).neg().add_scalar(1.0);
            let lin = dphi.mul(&zj).add_scalar(1.0);
            let rhs = one_minus.mul(&lin).mul(&phi_inv);
            if order == 0 {
                break;
            }
            zj = rhs.truncated(order - 1).integrate(z0);
        }
        zj
    }

    /// `f(y) = int_0^y z / phi`, cumulative over the trajectory breakpoints.
    pub fn f_at(&self, y: f64) -> f64 {
        let (traj, cum) = if y >= 0.0 {
            (&self.pos, &self.cum_pos)
        } else {
            (&self.neg, &self.cum_neg)
        };
        cum_eval(&self.phi, traj, cum, y, false)
    }

    /// `w(y) = int_0^y sqrt(1 - z^2) / phi`, cumulative.
    pub fn w_numeric(&self, y: f64) -> f64 {
        let (traj, cum) = if y >= 0.0 {
            (&self.pos, &self.cum_pos)
        } else {
            (&self.neg, &self.cum_neg)
        };
        cum_eval(&self.phi, traj, cum, y, true)
    }

    /// The `w` coordinate: numeric cumulative inside the trajectory range,
    /// closed-form `sqrt((1+z)/(1-z)) + c_plus` (and its mirror) past it.
    pub fn w_at(&self, y: f64) -> f64 {
        if fm::abs(y) <= self.y_max() {
            self.w_numeric(y)
        } else {
            let z = self.z_tail(y);
            if y > 0.0 {
                fm::sqrt((1.0 + z) / (1.0 - z)) + self.c_plus
            } else {
                -fm::sqrt((1.0 - z) / (1.0 + z)) + self.c_minus
            }
        }
    }

    /// Closed-form tail `w(z)` on the positive side (valid for `z > z_plus`).
    pub fn w_tail_of_z(&self, z: f64) -> f64 {
        fm::sqrt((1.0 + z) / (1.0 - z)) + self.c_plus
    }

    /// Jet of `f` at `y` (inside the trajectory range).
    pub fn f_jet(&self, y: f64, order: usize) -> Jet {
        let f0 = self.f_at(y);
        if order == 0 {
            return Jet::constant(f0, 1, 0);
        }
        let zj = self.z_jet(y, order - 1);
        let phij = self.phi.jet(y, order - 1);
        zj.div(&phij).integrate(f0)
    }

    /// `H(y) = 1 / sqrt(1 - z^2)`.
    pub fn mean_curvature_at(&self, y: f64) -> f64 {
        let z = self.z_at(y);
        1.0 / fm::sqrt(1.0 - z * z)
    }

    /// `H` on the axis as a function of `w`, using the closed-form tail
    /// beyond the junction and a monotone inversion of `w(y)` inside.
    pub fn mean_curvature_of_w(&self, w: f64) -> f64 {
        let w_plus = self.w_numeric(0.5);
        let w_minus = self.w_numeric(-0.5);
        if w >= w_plus {
            let s = w - self.c_plus;
            (s * s + 1.0) / (2.0 * s)
        } else if w <= w_minus {
            let s = self.c_minus - w;
            (s * s + 1.0) / (2.0 * s)
        } else {
            let y = self.invert_w(w);
            self.mean_curvature_at(y)
        }
    }

    fn invert_w(&self, w: f64) -> f64 {
        let (mut lo, mut hi) = (-0.5, 0.5);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.w_numeric(mid) < w {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// `r_M(0, y) = int_0^y dt / phi`: exact logarithmic form on the tail,
    /// quadrature over the interpolated profile inside.
    pub fn r_m_at(&self, y: f64) -> f64 {
        let a = fm::abs(y);
        if a <= 0.5 {
            return per_panel_quad(&|t| 1.0 / self.phi.value(t), 0.0, a, 64);
        }
        let base = per_panel_quad(&|t| 1.0 / self.phi.value(t), 0.0, 0.5, 64);
        base + fm::ln(0.5) - fm::ln(1.0 - a)
    }

    /// Samples of `(w, H(0, w), H / w)` up to `w_max`; the ratio tends to
    /// one half. On the axis the intrinsic distance satisfies `r(0, w) = |w|`.
    pub fn growth_ratio_r(&self, w_max: f64, count: usize) -> Vec<(f64, f64, f64)> {
        assert!(w_max >= 50.0, "growth window too short");
        (1..=count)
            .map(|i| {
                let w = w_max * i as f64 / count as f64;
                let h = self.mean_curvature_of_w(w);
                (w, h, h / w)
            })
            .collect()
    }

    /// Samples of `(y, r_M(0, y), H, H / sqrt(r_M))` approaching `y_max`;
    /// the last ratio tends to one.
    pub fn growth_ratio_r_m(&self, y_max: f64, count: usize) -> Vec<(f64, f64, f64, f64)> {
        assert!(y_max >= 1.0 - 1e-6, "growth window too short");
        assert!(y_max < 1.0);
        (1..=count)
            .map(|i| {
                // geometric approach to the boundary
                let frac = i as f64 / count as f64;
                let y = 1.0 - fm::powf(1.0 - y_max, frac) * fm::powf(0.5, 1.0 - frac);
                let rm = self.r_m_at(y);
                let h = self.mean_curvature_at(y);
                (y, rm, h, h / fm::sqrt(rm))
            })
            .collect()
    }
}

fn q_tail(z: f64) -> f64 {
    // antiderivative of 1/((1-z)^2 (1+z)) via partial fractions:
    // 1/4/(1+z) + 1/4/(1-z) + 1/2/(1-z)^2
    0.25 * fm::ln((1.0 + z) / (1.0 - z)) + 0.5 / (1.0 - z)
}

fn cumulative(phi: &PhiProfile, traj: &OdeTrajectory, reversed: bool) -> Cumulative {
    // trajectory breakpoints ascend; for the negative branch the origin sits
    // at the last breakpoint
    let ts = traj.breakpoints();
    let n = ts.len();
    let mut f = alloc::vec![0.0; n];
    let mut w = alloc::vec![0.0; n];
    let f_int = |t: f64| traj.eval(t)[0] / phi.value(t);
    let w_int = |t: f64| {
        let z = traj.eval(t)[0];
        fm::sqrt((1.0 - z * z).max(0.0)) / phi.value(t)
    };
    if !reversed {
        for i in 1..n {
            f[i] = f[i - 1] + gl7(&f_int, ts[i - 1], ts[i]);
            w[i] = w[i - 1] + gl7(&w_int, ts[i - 1], ts[i]);
        }
    } else {
        for i in (0..n - 1).rev() {
            f[i] = f[i + 1] - gl7(&f_int, ts[i], ts[i + 1]);
            w[i] = w[i + 1] - gl7(&w_int, ts[i], ts[i + 1]);
        }
    }
    Cumulative { f, w }
}

fn cum_eval(
    phi: &PhiProfile,
    traj: &OdeTrajectory,
    cum: &Cumulative,
    y: f64,
    w_kind: bool,
) -> f64 {
    let ts = traj.breakpoints();
    assert!(
        y >= ts[0] - 1e-12 && y <= ts[ts.len() - 1] + 1e-12,
        "y = {y} outside the integrated range"
    );
    let i = match ts.binary_search_by(|v| v.total_cmp(&y)) {
        Ok(i) => return if w_kind { cum.w[i] } else { cum.f[i] },
        Err(i) => i.clamp(1, ts.len() - 1) - 1,
    };
    let base = if w_kind { cum.w[i] } else { cum.f[i] };
    let integrand = |t: f64| {
        let z = traj.eval(t)[0];
        if w_kind {
            fm::sqrt((1.0 - z * z).max(0.0)) / phi.value(t)
        } else {
            z / phi.value(t)
        }
    };
    base + gl7(&integrand, ts[i], y)
}

fn per_panel_quad(f: &dyn Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let mut acc = 0.0;
    let h = (b - a) / panels as f64;
    for i in 0..panels {
        acc += gl7(f, a + i as f64 * h, a + (i + 1) as f64 * h);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::quad_adaptive;

    fn profile() -> SolitonProfile {
        let phi = PhiProfile::standard().unwrap();
        SolitonProfile::solve(&phi, 1e-6, 1e-10).unwrap()
    }

    #[test]
    fn initial_slope_and_normalisations() {
        let p = profile();
        // z'(0) = 1/phi(0) from the equation at z = 0
        let zj = p.z_jet(0.0, 1);
        assert!((zj.partial(&[1]) - 1.0 / p.phi().center_value()).abs() < 1e-9);
        assert_eq!(p.f_at(0.0), 0.0);
        assert_eq!(p.w_numeric(0.0), 0.0);
        assert!((p.mean_curvature_at(0.0) - 1.0).abs() < 1e-12);
        // dw/dy at 0 = 1/phi(0)
        let h = 1e-6;
        let dw = (p.w_numeric(h) - p.w_numeric(-h)) / (2.0 * h);
        assert!((dw - 1.0 / p.phi().center_value()).abs() < 1e-6);
    }

    #[test]
    fn z_is_odd_and_monotone() {
        let p = profile();
        let mut prev = -1.0;
        for i in 0..=100 {
            let y = -0.98 + 1.96 * i as f64 / 100.0;
            let z = p.z_at(y);
            assert!(z > prev, "monotone at {y}");
            assert!(z.abs() < 1.0);
            assert!((p.z_at(-y) + z).abs() < 1e-9, "odd symmetry at {y}");
            prev = z;
        }
    }

    #[test]
    fn tail_oracle_agrees_with_trajectory() {
        let p = profile();
        for i in 0..10 {
            let y = 0.6 + 0.39 * i as f64 / 9.0;
            let z_traj = p.z_dense(y);
            let z_oracle = p.z_tail(y);
            assert!(
                (z_traj - z_oracle).abs() < 1e-7,
                "at {y}: traj {z_traj} vs oracle {z_oracle}"
            );
        }
    }

    #[test]
    fn z_near_boundary_exceeds_09() {
        let p = profile();
        assert!(p.z_at(1.0 - 1e-4) > 0.9);
    }

    #[test]
    fn change_of_variables_consistency() {
        // int_0^y dt/phi equals int_0^{z(y)} dz / ((1-z^2)(phi'(y(z)) z + 1))
        let p = profile();
        let y_target = 0.8;
        let lhs = quad_adaptive(&|t| 1.0 / p.phi().value(t), 0.0, y_target, 1e-11).unwrap();
        let z_target = p.z_at(y_target);
        let rhs = quad_adaptive(
            &|z: f64| {
                // invert z -> y monotonically
                let (mut lo, mut hi) = (0.0, y_target);
                for _ in 0..80 {
                    let mid = 0.5 * (lo + hi);
                    if p.z_at(mid) < z {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                let y = 0.5 * (lo + hi);
                1.0 / ((1.0 - z * z) * (p.phi().deriv(y) * z + 1.0))
            },
            0.0,
            z_target,
            1e-9,
        )
        .unwrap();
        assert!((lhs - rhs).abs() < 1e-7, "lhs {lhs} rhs {rhs}");
    }

    #[test]
    fn w_junction_matching() {
        let p = profile();
        // the closed form with the matched constant agrees along the tail
        for i in 0..8 {
            let y = 0.55 + 0.4 * i as f64 / 7.0;
            let z = p.z_dense(y);
            let closed = p.w_tail_of_z(z);
            let numeric = p.w_numeric(y);
            assert!(
                (closed - numeric).abs() < 1e-8,
                "w mismatch at {y}: {closed} vs {numeric}"
            );
        }
        assert_eq!(p.w_at(0.0), 0.0);
        // antisymmetry ties the two tail constants together
        assert!((p.c_plus + p.c_minus).abs() < 1e-7);
    }

    #[test]
    fn f_jet_consistency() {
        let p = profile();
        let y = 0.3;
        let fj = p.f_jet(y, 4);
        // f' = z / phi
        let expect = p.z_at(y) / p.phi().value(y);
        assert!((fj.partial(&[1]) - expect).abs() < 1e-9);
        // f'' by finite differences of f'
        let h = 1e-5;
        let fp = |t: f64| p.z_at(t) / p.phi().value(t);
        let d2 = (fp(y + h) - fp(y - h)) / (2.0 * h);
        assert!((fj.partial(&[2]) - d2).abs() < 1e-6);
    }

    #[test]
    fn growth_ratio_in_w_tends_to_half() {
        let p = profile();
        let rows = p.growth_ratio_r(100.0, 50);
        let (w, h, ratio) = *rows.last().unwrap();
        assert_eq!(w, 100.0);
        assert!(ratio > 0.475 && ratio < 0.525, "H/w = {ratio} (H = {h})");
    }

    #[test]
    fn growth_ratio_in_rm_tends_to_one() {
        let p = profile();
        let rows = p.growth_ratio_r_m(1.0 - 1e-6, 40);
        let (_y, rm, h, ratio) = *rows.last().unwrap();
        assert!(rm > 10.0);
        assert!(ratio > 0.9 && ratio < 1.1, "H/sqrt(r_M) = {ratio} (H = {h})");
    }

    #[test]
    fn mean_curvature_axis_value() {
        let p = profile();
        // frozen junction checks: H(0,0) = 1 = c and H grows past it
        assert!((p.mean_curvature_at(0.0) - 1.0).abs() < 1e-12);
        assert!(p.mean_curvature_at(0.9) > 1.0);
    }
}
