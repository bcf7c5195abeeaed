//! The conformal factor `phi : (-1, 1) -> (0, 2]` of the strip metric
//! `g_M = phi^-2 (dx^2 + dy^2)`.
//!
//! The profile must equal `1 - |y|` outside `(-1/2, 1/2)`, have `|phi'| < 1`
//! and `phi'' <= 0` inside, stay positive and be even. We realise it as
//! `phi(y) = C - int_0^y s`, where `s` is an odd smooth step built from the
//! classical `exp(-k/u)` bump that saturates to `sign(t)` at `|t| = 1/2`,
//! and `C = 1/2 + int_0^{1/2} s`. The bump's symmetry makes `C = 3/4`
//! exactly, which the construction records as a golden value.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::fm;
use crate::jet::Jet;
use crate::quad::gl7;

#[derive(Debug, Clone)]
pub struct PhiError(pub String);

impl core::fmt::Display for PhiError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "invalid conformal profile: {}", self.0)
    }
}

#[cfg(feature = "std")]
impl std::error::Error for PhiError {}

const TABLE_N: usize = 1024;

/// Smooth conformal factor with jet evaluation to any supported order.
#[derive(Clone)]
pub struct PhiProfile {
    /// Bump sharpness; the step is `psi(x)/(psi(x) + psi(1-x))` with
    /// `psi(u) = exp(-k/u)`.
    k: f64,
    /// `phi` on `[0, 1/2]` at `TABLE_N + 1` uniform nodes (cumulative
    /// Gauss-Legendre of the step; Hermite-interpolated with the exact
    /// slope `-s(y)` at the nodes).
    table: Vec<f64>,
    phi0: f64,
}

fn psi(k: f64, u: f64) -> f64 {
    if u <= k / 700.0 {
        0.0
    } else {
        fm::exp(-k / u)
    }
}

/// The step on `[0, infinity)`: 0 at 0, 1 from 1/2 on, smooth, nondecreasing.
fn step_half(k: f64, t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if t >= 0.5 {
        return 1.0;
    }
    let a = psi(k, 2.0 * t);
    let b = psi(k, 1.0 - 2.0 * t);
    a / (a + b)
}

fn step_jet_half(k: f64, t: f64, order: usize) -> Jet {
    debug_assert!(t > 0.0 && t < 0.5);
    let x = Jet::variable(t, 0, 1, order).scale(2.0);
    let one_minus = x.neg().add_scalar(1.0);
    let psi_jet = |u: &Jet| -> Jet {
        if u.value() <= k / 700.0 {
            Jet::constant(0.0, 1, order)
        } else {
            u.recip().scale(-k).exp()
        }
    };
    let a = psi_jet(&x);
    let b = psi_jet(&one_minus);
    let den = a.add(&b);
    a.div(&den)
}

impl PhiProfile {
    /// Build with the default bump sharpness.
    pub fn standard() -> Result<PhiProfile, PhiError> {
        PhiProfile::with_sharpness(1.0)
    }

    /// Build with sharpness `k > 0`; every `k` satisfies the profile
    /// conditions, so tests parametrise over it.
    pub fn with_sharpness(k: f64) -> Result<PhiProfile, PhiError> {
        if !(k > 0.0) {
            return Err(PhiError(String::from("sharpness must be positive")));
        }
        // cumulative from y = 1/2 down to 0: phi(y) = 1/2 + int_y^{1/2} s
        let h = 0.5 / TABLE_N as f64;
        let mut table = alloc::vec![0.0; TABLE_N + 1];
        table[TABLE_N] = 0.5;
        for i in (0..TABLE_N).rev() {
            let a = i as f64 * h;
            let b = a + h;
            table[i] = table[i + 1] + gl7(&|t| step_half(k, t), a, b);
        }
        let phi0 = table[0];
        let profile = PhiProfile { k, table, phi0 };
        profile.validate()?;
        Ok(profile)
    }

    fn validate(&self) -> Result<(), PhiError> {
        // the bump symmetry forces phi(0) = 3/4
        if fm::abs(self.phi0 - 0.75) > 1e-10 {
            return Err(PhiError(format!("phi(0) = {} but 3/4 expected", self.phi0)));
        }
        for i in 0..=400 {
            let y = -0.999 + 1.998 * i as f64 / 400.0;
            let v = self.value(y);
            let d = self.deriv(y);
            if !(v > 0.0) {
                return Err(PhiError(format!("phi({y}) = {v} not positive")));
            }
            if v > 2.0 {
                return Err(PhiError(format!("phi({y}) = {v} above 2")));
            }
            if fm::abs(self.value(-y) - v) > 1e-12 {
                return Err(PhiError(format!("phi not even at {y}")));
            }
            if fm::abs(y) < 0.5 {
                // the strict slope bound saturates to 1 within one ulp once
                // exp(-k/(1-2|y|)) drops below machine epsilon; sample
                // strictness outside that zone and mere boundedness inside
                let strict_zone = 0.5 - self.k / 60.0;
                if fm::abs(y) <= strict_zone {
                    if fm::abs(d) >= 1.0 {
                        return Err(PhiError(format!(
                            "|phi'({y})| = {} not below 1",
                            fm::abs(d)
                        )));
                    }
                } else if fm::abs(d) > 1.0 {
                    return Err(PhiError(format!("|phi'({y})| = {} above 1", fm::abs(d))));
                }
                let d2 = self.jet(y, 2).partial(&[2]);
                if d2 > 1e-12 {
                    return Err(PhiError(format!("phi''({y}) = {d2} positive")));
                }
            } else if fm::abs(v - (1.0 - fm::abs(y))) > 1e-10 {
                return Err(PhiError(format!("tail mismatch at {y}")));
            }
        }
        Ok(())
    }

    pub fn sharpness(&self) -> f64 {
        self.k
    }

    /// `phi(0)`; equals 3/4 up to quadrature tolerance.
    pub fn center_value(&self) -> f64 {
        self.phi0
    }

    pub fn value(&self, y: f64) -> f64 {
        let a = fm::abs(y);
        if a >= 0.5 {
            return 1.0 - a;
        }
        // cubic Hermite on the table with exact derivatives -s
        let h = 0.5 / TABLE_N as f64;
        let pos = a / h;
        let i = (pos as usize).min(TABLE_N - 1);
        let s = pos - i as f64;
        let y0 = self.table[i];
        let y1 = self.table[i + 1];
        let d0 = -step_half(self.k, i as f64 * h);
        let d1 = -step_half(self.k, (i + 1) as f64 * h);
        let s2 = s * s;
        let s3 = s2 * s;
        (2.0 * s3 - 3.0 * s2 + 1.0) * y0
            + (s3 - 2.0 * s2 + s) * h * d0
            + (-2.0 * s3 + 3.0 * s2) * y1
            + (s3 - s2) * h * d1
    }

    pub fn deriv(&self, y: f64) -> f64 {
        if fm::abs(y) >= 0.5 {
            -fm::signum(y)
        } else {
            -fm::signum(y) * step_half(self.k, fm::abs(y))
        }
    }

    /// Jet of `phi` at `y`; the value comes from the interpolated cumulative
    /// and the derivative coefficients from the step's own jet.
    pub fn jet(&self, y: f64, order: usize) -> Jet {
        let value = self.value(y);
        if order == 0 {
            return Jet::constant(value, 1, order);
        }
        let a = fm::abs(y);
        if a >= 0.5 {
            // phi = 1 - |y| exactly; all higher coefficients vanish
            let mut j = Jet::constant(value, 1, order);
            let lin = Jet::variable(0.0, 0, 1, order).scale(-fm::signum(y));
            j = j.add(&lin);
            return j;
        }
        // phi' = -s(y)
        let s_jet = if a == 0.0 {
            // s is odd and C-infinity flat at 0
            Jet::constant(0.0, 1, order - 1)
        } else {
            let m = step_jet_half(self.k, a, order - 1);
            if y > 0.0 {
                m
            } else {
                odd_reflect(&m)
            }
        };
        s_jet.neg().integrate(value)
    }
}

/// Jet of `f(-t)` negated, used to extend the odd step to `t < 0`.
fn odd_reflect(m: &Jet) -> Jet {
    let order = m.order();
    let mut out = Jet::constant(0.0, 1, order);
    for kk in 0..=order as u8 {
        let c = m.coeff(&[kk]);
        let sign = if kk % 2 == 0 { -1.0 } else { 1.0 };
        let mono = monomial_1d(sign * c, kk, order);
        out = out.add(&mono);
    }
    out
}

fn monomial_1d(c: f64, k: u8, order: usize) -> Jet {
    // c * x^k as a jet coefficient
    let mut j = Jet::constant(0.0, 1, order);
    if c != 0.0 {
        let v = Jet::variable(0.0, 0, 1, order);
        let mut m = Jet::constant(c, 1, order);
        for _ in 0..k {
            m = m.mul(&v);
        }
        j = j.add(&m);
    }
    j
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::quad_adaptive;

    #[test]
    fn golden_center_value() {
        // oracle: quadrature of the bump step; the symmetry
        // s(t) + s(1/2 - t)... of the normalised bump forces C = 3/4
        let phi = PhiProfile::standard().unwrap();
        let c = 0.5 + quad_adaptive(&|t| step_half(1.0, t), 0.0, 0.5, 1e-12).unwrap();
        assert!((phi.center_value() - c).abs() < 1e-10);
        assert!((phi.center_value() - 0.75).abs() < 1e-10);
    }

    #[test]
    fn tail_is_exact() {
        let phi = PhiProfile::standard().unwrap();
        assert_eq!(phi.value(0.75), 0.25);
        assert_eq!(phi.deriv(0.75), -1.0);
        let j = phi.jet(-0.8, 4);
        assert!((j.value() - 0.2).abs() < 1e-15);
        assert!((j.partial(&[1]) - 1.0).abs() < 1e-15);
        assert_eq!(j.partial(&[2]), 0.0);
    }

    #[test]
    fn interpolant_matches_quadrature() {
        let phi = PhiProfile::standard().unwrap();
        for i in 0..20 {
            let y = 0.02 + 0.46 * i as f64 / 19.0;
            let direct = 0.5 + quad_adaptive(&|t| step_half(1.0, t), y, 0.5, 1e-12).unwrap();
            assert!(
                (phi.value(y) - direct).abs() < 1e-10,
                "phi({y}) interp {} vs quad {direct}",
                phi.value(y)
            );
        }
    }

    #[test]
    fn jet_derivatives_match_finite_differences() {
        let phi = PhiProfile::standard().unwrap();
        let h = 1e-5;
        for &y in &[0.1, 0.3, 0.45, -0.2] {
            let j = phi.jet(y, 3);
            let d1 = (phi.value(y + h) - phi.value(y - h)) / (2.0 * h);
            assert!((j.partial(&[1]) - d1).abs() < 1e-8, "phi' at {y}");
            let d2 = (phi.value(y + h) - 2.0 * phi.value(y) + phi.value(y - h)) / (h * h);
            assert!((j.partial(&[2]) - d2).abs() < 1e-5, "phi'' at {y}");
        }
    }

    #[test]
    fn even_symmetry_and_slope_bound() {
        let phi = PhiProfile::standard().unwrap();
        assert_eq!(phi.deriv(0.0), 0.0);
        for i in 0..100 {
            let y = -0.47 + 0.94 * i as f64 / 99.0;
            assert!((phi.value(y) - phi.value(-y)).abs() < 1e-13);
            assert!(phi.deriv(y).abs() < 1.0);
        }
    }

    #[test]
    fn sharpness_family_members_validate() {
        for &k in &[0.5, 1.0, 2.0] {
            let phi = PhiProfile::with_sharpness(k).unwrap();
            assert!((phi.center_value() - 0.75).abs() < 1e-9, "k = {k}");
        }
    }
}
