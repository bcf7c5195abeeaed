//! The repeating spacelike pattern curve in the two-dimensional Minkowski
//! plane: flat for a unit interval, a full-height plateau squeezed into an
//! ever narrower middle window, and back — so the slope witnesses
//! `1/sqrt(1 - udot^2)` blow up like `2^{(n-1)/2}` period by period while
//! the graph length still grows linearly (each period keeps two flat unit
//! intervals). No monotone radial bound can cover these witnesses, yet the
//! curve is complete; that is exactly what it is built to demonstrate.
//!
//! Within period `n` (on `[5n, 5(n+1)]`, `q = 2^{-(n+1)}`):
//!   * `u = 0` on `[5n, 5n+1]` and `[5n+4, 5n+5]`,
//!   * `u = 1` on `[5n+2+q, 5n+3-q]`,
//!   * monotone `C^2` piecewise-polynomial ramps in between whose slope is
//!     constant except in short cubic-eased boundary layers, keeping
//!     `|udot| = s_max < 1`.

use alloc::string::String;
use alloc::vec::Vec;

use crate::fm;
use crate::jet::Jet;
use crate::quad::gl7;

/// One polynomial segment `u(x) = sum c_k (x - x0)^k` on `[x0, x1]`.
#[derive(Clone, Debug)]
pub struct Piece {
    pub x0: f64,
    pub x1: f64,
    pub coeffs: [f64; 5],
}

impl Piece {
    fn value(&self, x: f64) -> f64 {
        let s = x - self.x0;
        let c = &self.coeffs;
        (((c[4] * s + c[3]) * s + c[2]) * s + c[1]) * s + c[0]
    }

    fn slope(&self, x: f64) -> f64 {
        let s = x - self.x0;
        let c = &self.coeffs;
        ((4.0 * c[4] * s + 3.0 * c[3]) * s + 2.0 * c[2]) * s + c[1]
    }

    fn jet(&self, x: f64, order: usize) -> Jet {
        let s = Jet::variable(x - self.x0, 0, 1, order);
        let c = &self.coeffs;
        let mut acc = Jet::constant(c[4], 1, order);
        for k in (0..4).rev() {
            acc = acc.mul(&s).add_scalar(c[k]);
        }
        acc
    }
}

/// Slope witness of one period: the interior point where the mean-value
/// slope `1/(1+q)` is attained, and the forced norm growth there.
#[derive(Clone, Debug)]
pub struct Witness {
    pub period: usize,
    pub x: f64,
    pub slope: f64,
    /// `1 / sqrt(1 - slope^2)`.
    pub gamma: f64,
    /// The lower bound `2^{(n-1)/2}` it must exceed.
    pub bound: f64,
}

/// The assembled curve over `[0, 5 (periods + 1)]`, zero for `x <= 0`.
pub struct PiecewiseCurve {
    pieces: Vec<Piece>,
    pub witnesses: Vec<Witness>,
    pub periods: usize,
    pub max_slope: f64,
}

#[derive(Debug, Clone)]
pub struct CurveError(pub String);

impl core::fmt::Display for CurveError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "pattern curve construction failed: {}", self.0)
    }
}

#[cfg(feature = "std")]
impl std::error::Error for CurveError {}

/// Ramp from 0 to 1 over width `len` with eased layers of width `beta * len`
/// and plateau slope `s_max = 1/(len (1 - beta))`; returns the three pieces
/// starting at `x0`.
fn ramp_up(x0: f64, len: f64, beta: f64) -> (Vec<Piece>, f64) {
    let b = beta * len;
    let s_max = 1.0 / (len * (1.0 - beta));
    // ease-in: u = s_max (s^3/b^2 - s^4/(2 b^3)), derivative s_max S(s/b)
    let p1 = Piece {
        x0,
        x1: x0 + b,
        coeffs: [0.0, 0.0, 0.0, s_max / (b * b), -s_max / (2.0 * b * b * b)],
    };
    let u_layer = s_max * b / 2.0;
    let p2 = Piece {
        x0: x0 + b,
        x1: x0 + len - b,
        coeffs: [u_layer, s_max, 0.0, 0.0, 0.0],
    };
    // ease-out: u = 1 - s_max b (1/2 - r + r^3 - r^4/2), r = s/b
    let p3 = Piece {
        x0: x0 + len - b,
        x1: x0 + len,
        coeffs: [
            1.0 - s_max * b / 2.0,
            s_max,
            0.0,
            -s_max / (b * b),
            s_max / (2.0 * b * b * b),
        ],
    };
    (alloc::vec![p1, p2, p3], s_max)
}

/// Mirror image of `ramp_up` descending from 1 to 0 over `[x0, x0 + len]`.
fn ramp_down(x0: f64, len: f64, beta: f64) -> Vec<Piece> {
    let (up, _) = ramp_up(0.0, len, beta);
    up.iter()
        .rev()
        .map(|p| {
            // u_down(x) = u_up(len - (x - x0)) on the reflected sub-interval
            let nx0 = x0 + (len - p.x1);
            let nx1 = x0 + (len - p.x0);
            let w = p.x1 - p.x0;
            // expand P(w - s) in powers of s
            let c = &p.coeffs;
            let mut out = [0.0f64; 5];
            for (k, &ck) in c.iter().enumerate() {
                // ck (w - s)^k = ck sum_j C(k,j) w^{k-j} (-s)^j
                let mut binom = 1.0f64;
                for j in 0..=k {
                    let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                    out[j] += ck * binom * fm::powi(w, (k - j) as i32) * sign;
                    binom = binom * (k - j) as f64 / (j + 1) as f64;
                }
            }
            Piece { x0: nx0, x1: nx1, coeffs: out }
        })
        .collect()
}

impl PiecewiseCurve {
    /// Build the curve with periods `0 ..= periods`.
    pub fn build(periods: usize) -> Result<PiecewiseCurve, CurveError> {
        let mut pieces = Vec::new();
        let mut witnesses = Vec::new();
        let mut max_slope = 0.0f64;
        for n in 0..=periods {
            let t0 = 5.0 * n as f64;
            let q = fm::powi(0.5, n as i32 + 1);
            let len = 1.0 + q;
            let beta = q / 2.0;
            pieces.push(Piece { x0: t0, x1: t0 + 1.0, coeffs: [0.0; 5] });
            let (up, s_max) = ramp_up(t0 + 1.0, len, beta);
            if s_max >= 1.0 {
                return Err(CurveError(alloc::format!(
                    "plateau slope {s_max} >= 1 in period {n}"
                )));
            }
            max_slope = max_slope.max(s_max);
            // mean-value witness: solve s_max S(tau) = 1/(1+q) in the
            // ease-in layer; S is the cubic smoothstep, strictly increasing
            let target = 1.0 / (1.0 + q);
            let frac = target / s_max;
            let (mut lo, mut hi) = (0.0f64, 1.0f64);
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if mid * mid * (3.0 - 2.0 * mid) < frac {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let tau = 0.5 * (lo + hi);
            let xw = t0 + 1.0 + tau * beta * len;
            let slope = up[0].slope(xw);
            witnesses.push(Witness {
                period: n,
                x: xw,
                slope,
                gamma: 1.0 / fm::sqrt(1.0 - slope * slope),
                bound: fm::powf(2.0, (n as f64 - 1.0) / 2.0),
            });
            pieces.extend(up);
            pieces.push(Piece {
                x0: t0 + 2.0 + q,
                x1: t0 + 3.0 - q,
                coeffs: [1.0, 0.0, 0.0, 0.0, 0.0],
            });
            pieces.extend(ramp_down(t0 + 3.0 - q, len, beta));
            pieces.push(Piece { x0: t0 + 4.0, x1: t0 + 5.0, coeffs: [0.0; 5] });
        }
        let curve = PiecewiseCurve { pieces, witnesses, periods, max_slope };
        curve.check_continuity()?;
        Ok(curve)
    }

    fn check_continuity(&self) -> Result<(), CurveError> {
        for w in self.pieces.windows(2) {
            let gap = fm::abs(w[0].value(w[0].x1) - w[1].value(w[1].x0));
            let kink = fm::abs(w[0].slope(w[0].x1) - w[1].slope(w[1].x0));
            if gap > 1e-12 || kink > 1e-12 {
                return Err(CurveError(alloc::format!(
                    "discontinuity at x = {} (gap {gap}, kink {kink})",
                    w[0].x1
                )));
            }
        }
        Ok(())
    }

    pub fn x_end(&self) -> f64 {
        self.pieces.last().map(|p| p.x1).unwrap_or(0.0)
    }

    fn piece_at(&self, x: f64) -> Option<&Piece> {
        if x < 0.0 || x > self.x_end() {
            return None;
        }
        let i = self
            .pieces
            .partition_point(|p| p.x1 < x)
            .min(self.pieces.len() - 1);
        Some(&self.pieces[i])
    }

    pub fn value(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        self.piece_at(x).map(|p| p.value(x)).unwrap_or(0.0)
    }

    pub fn slope(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        self.piece_at(x).map(|p| p.slope(x)).unwrap_or(0.0)
    }

    pub fn jet(&self, x: f64, order: usize) -> Jet {
        match self.piece_at(x) {
            Some(p) if x > 0.0 => p.jet(x, order),
            _ => Jet::constant(0.0, 1, order),
        }
    }

    /// Induced graph length `int sqrt(1 - udot^2)` over `[a, b]`.
    pub fn graph_length(&self, a: f64, b: f64) -> f64 {
        // panelised so the narrow ramp layers are resolved
        let mut acc = 0.0;
        let panels = ((b - a) * 64.0) as usize + 1;
        let h = (b - a) / panels as f64;
        for i in 0..panels {
            let lo = a + i as f64 * h;
            acc += gl7(
                &|x| {
                    let s = self.slope(x);
                    fm::sqrt((1.0 - s * s).max(0.0))
                },
                lo,
                lo + h,
            );
        }
        acc
    }
}

/// Pattern verification report: spacelike bound, plateau values, witness
/// growth and the linear length lower bound.
#[derive(Debug, Clone)]
pub struct CurveReport {
    pub spacelike: bool,
    pub max_slope: f64,
    pub pattern_ok: bool,
    pub witnesses_ok: bool,
    pub worst_witness_margin: f64,
    pub length_0_50: f64,
}

pub fn example_curve_checks(curve: &PiecewiseCurve) -> CurveReport {
    let mut spacelike = curve.max_slope < 1.0;
    let mut x = 0.0;
    while x <= curve.x_end() {
        if fm::abs(curve.slope(x)) >= 1.0 {
            spacelike = false;
        }
        x += 1e-3;
    }

    let mut pattern_ok = true;
    for n in 0..=curve.periods {
        let t0 = 5.0 * n as f64;
        let q = fm::powi(0.5, n as i32 + 1);
        for (lo, hi, v) in [
            (t0, t0 + 1.0, 0.0),
            (t0 + 4.0, t0 + 5.0, 0.0),
            (t0 + 2.0 + q, t0 + 3.0 - q, 1.0),
        ] {
            for k in 0..=8 {
                let xx = lo + (hi - lo) * k as f64 / 8.0;
                if fm::abs(curve.value(xx) - v) > 1e-12 {
                    pattern_ok = false;
                }
            }
        }
    }

    let mut witnesses_ok = true;
    let mut worst = f64::INFINITY;
    for w in &curve.witnesses {
        let margin = w.gamma - w.bound;
        if margin < 0.0 {
            witnesses_ok = false;
        }
        if margin < worst {
            worst = margin;
        }
    }

    CurveReport {
        spacelike,
        max_slope: curve.max_slope,
        pattern_ok,
        witnesses_ok,
        worst_witness_margin: worst,
        length_0_50: curve.graph_length(0.0, 50.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_is_spacelike_and_patterned() {
        let c = PiecewiseCurve::build(10).unwrap();
        let r = example_curve_checks(&c);
        assert!(r.spacelike, "max slope {}", r.max_slope);
        assert!(r.pattern_ok);
        assert!(r.max_slope < 1.0);
    }

    #[test]
    fn witness_slopes_match_mean_value() {
        let c = PiecewiseCurve::build(10).unwrap();
        for w in &c.witnesses {
            let q = 0.5f64.powi(w.period as i32 + 1);
            let expect = 1.0 / (1.0 + q);
            assert!(
                (w.slope - expect).abs() < 1e-10,
                "period {}: slope {} vs {}",
                w.period,
                w.slope,
                expect
            );
            assert!(w.gamma >= w.bound, "period {}", w.period);
        }
        // frozen arithmetic at period 3: slope 16/17, norm 17/sqrt(33) >= 2
        let w3 = &c.witnesses[3];
        assert!((w3.slope - 16.0 / 17.0).abs() < 1e-10);
        assert!((w3.gamma - 17.0 / 33.0f64.sqrt()).abs() < 1e-9);
        assert!(w3.gamma >= 2.0);
    }

    #[test]
    fn length_grows_linearly() {
        let c = PiecewiseCurve::build(10).unwrap();
        // each period contributes at least its two flat unit intervals
        let one = c.graph_length(0.0, 5.0);
        assert!(one >= 2.0, "single period length {one}");
        let total = c.graph_length(0.0, 50.0);
        assert!(total >= 20.0, "length over [0, 50] is {total}");
    }

    #[test]
    fn jets_match_slopes() {
        let c = PiecewiseCurve::build(5).unwrap();
        for &x in &[0.5, 1.05, 1.5, 2.52, 3.6, 7.3] {
            let j = c.jet(x, 3);
            assert!((j.value() - c.value(x)).abs() < 1e-13);
            assert!((j.partial(&[1]) - c.slope(x)).abs() < 1e-12, "at {x}");
        }
    }

    #[test]
    fn no_monotone_bound_can_cover_witnesses() {
        // witness gammas grow geometrically while any admissible monotone
        // bound must keep 1/G integrable-divergent; the report only needs
        // the geometric growth itself
        let c = PiecewiseCurve::build(10).unwrap();
        for w in c.witnesses.windows(2) {
            assert!(w[1].gamma > w[0].gamma);
        }
        let last = c.witnesses.last().unwrap();
        assert!(last.gamma >= 2.0f64.powf((10.0 - 1.0) / 2.0));
    }
}
