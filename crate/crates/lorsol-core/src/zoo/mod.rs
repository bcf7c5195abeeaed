//! Concrete soliton constructions: both grim reapers, the conformal-strip
//! soliton with its profile and growth asymptotics, and the spacelike
//! pattern curve.

pub mod pattern_curve;
pub mod phi;
pub mod profile;

use alloc::sync::Arc;

use crate::chart::{ChartMetric, ScalarField};
use crate::fm;
use crate::graph::{GraphHypersurface, ProductSpace};
use crate::jet::Jet;
use crate::quad::quad_adaptive;

pub use pattern_curve::{example_curve_checks, CurveReport, PiecewiseCurve};
pub use phi::PhiProfile;
pub use profile::SolitonProfile;

/// Grim reaper translator over the flat base `R^n`, `n` in `{1, 2}`.
///
/// * Lorentzian (`eps = -1`): `u = ln cosh(c x_1) / c`, entire and spacelike.
/// * Riemannian (`eps = +1`): `u = -ln cos(c x_1) / c` on `|c x_1| < pi/2`;
///   translating upward with speed `c`.
pub fn grim_reaper(epsilon: f64, c: f64, n: usize) -> GraphHypersurface {
    assert!(n >= 1 && n <= 2);
    let u = if epsilon < 0.0 {
        ScalarField::new(
            n,
            Arc::new(move |x: &[f64], order| {
                Jet::variable(x[0], 0, n, order)
                    .scale(c)
                    .cosh()
                    .ln()
                    .scale(1.0 / c)
            }),
        )
    } else {
        ScalarField::new(
            n,
            Arc::new(move |x: &[f64], order| {
                Jet::variable(x[0], 0, n, order)
                    .scale(c)
                    .cos()
                    .ln()
                    .scale(-1.0 / c)
            }),
        )
    };
    let space = ProductSpace::new(ChartMetric::euclidean(n), epsilon);
    GraphHypersurface::new(space, u, c, true)
}

/// Induced length of the grim-reaper directrix `s -> (s, 0, ln cosh s)`
/// over `[-S, S]`: the integral of `sech`, increasing in `S` and bounded
/// by pi.
pub fn directrix_length(s_max: f64) -> f64 {
    assert!(s_max >= 0.0);
    if s_max == 0.0 {
        return 0.0;
    }
    quad_adaptive(&|s| 1.0 / fm::cosh(s), -s_max, s_max, 1e-10)
        .expect("sech integral converges")
}

/// The conformal-strip soliton as a graph hypersurface: base
/// `phi^-2 (dx^2 + dy^2)` on `R x (-1, 1)`, height `u(x, y) = f(y)`,
/// Lorentzian product, speed 1.
pub fn strip_soliton(profile: Arc<SolitonProfile>) -> GraphHypersurface {
    let base = strip_base_metric(profile.phi().clone());
    let pr = profile.clone();
    let u = ScalarField::new(
        2,
        Arc::new(move |x: &[f64], order| pr.f_jet(x[1], order).promote(2, &[1])),
    );
    GraphHypersurface::new(ProductSpace::lorentzian(base), u, 1.0, true)
}

/// The strip base metric `phi(y)^-2 (dx^2 + dy^2)` as a chart metric.
pub fn strip_base_metric(phi: PhiProfile) -> ChartMetric {
    ChartMetric::conformal(
        2,
        Arc::new(move |x: &[f64], order| {
            phi.jet(x[1], order).promote(2, &[1]).powi(2).recip()
        }),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::{gauss_curvature_conformal, ricci, sectional};

    #[test]
    fn lorentzian_grim_reaper_residual_and_h() {
        let g = grim_reaper(-1.0, 1.0, 2);
        for i in 0..=40 {
            let x1 = -5.0 + 10.0 * i as f64 / 40.0;
            let r = g.soliton_residual(&[x1, 0.3]).unwrap();
            assert!(r.abs() < 1e-10, "residual {r} at {x1}");
        }
        let h = g.mean_curvature(&[2.0, 0.0]).unwrap();
        assert!((h - 2.0f64.cosh()).abs() < 1e-11);
    }

    #[test]
    fn riemannian_grim_reaper_residual() {
        let g = grim_reaper(1.0, 1.0, 2);
        for i in 0..=40 {
            let x1 = -1.5 + 3.0 * i as f64 / 40.0;
            let r = g.soliton_residual(&[x1, -0.2]).unwrap();
            assert!(r.abs() < 1e-10, "residual {r} at {x1}");
        }
    }

    #[test]
    fn general_speed_grim_reaper() {
        let g = grim_reaper(-1.0, 2.5, 1);
        for i in 0..=10 {
            let x1 = -1.0 + 2.0 * i as f64 / 10.0;
            let r = g.soliton_residual(&[x1]).unwrap();
            assert!(r.abs() < 1e-9, "residual {r} at {x1}");
        }
    }

    #[test]
    fn directrix_length_pi_limit() {
        // oracle: antiderivative 2 atan(tanh(s/2)); total length pi
        let l20 = directrix_length(20.0);
        assert!((l20 - core::f64::consts::PI).abs() < 1e-6);
        let oracle = 4.0 * (10.0f64.tanh()).atan();
        assert!((l20 - oracle).abs() < 1e-9);
        assert_eq!(directrix_length(0.0), 0.0);
        // monotone in S and bounded by pi
        let mut prev = 0.0;
        for i in 1..=8 {
            let l = directrix_length(2.5 * i as f64);
            assert!(l > prev);
            assert!(l <= core::f64::consts::PI + 1e-9);
            prev = l;
        }
    }

    #[test]
    fn strip_base_curvature_matches_closed_form() {
        let phi = PhiProfile::standard().unwrap();
        let m = strip_base_metric(phi.clone());
        for i in 0..=20 {
            let y = -0.95 + 1.9 * i as f64 / 20.0;
            let j = phi.jet(y, 2);
            let k_closed =
                gauss_curvature_conformal(j.value(), j.partial(&[1]), j.partial(&[2]));
            let k_tensor = sectional(&m, &[0.2, y], &[1.0, 0.0], &[0.0, 1.0]).unwrap();
            let rel = (k_closed - k_tensor).abs() / (1.0 + k_closed.abs());
            assert!(rel < 1e-8, "K mismatch at {y}: {k_closed} vs {k_tensor}");
            assert!(k_tensor <= 1e-10, "strip curvature must be non-positive at {y}");
        }
        // the tails are hyperbolic half-planes: K = -1 exactly, so the strip
        // curvature is bounded (the flat-step middle keeps it finite too)
        for &y in &[0.55, 0.75, 0.9, 0.99] {
            let j = phi.jet(y, 2);
            let k = gauss_curvature_conformal(j.value(), j.partial(&[1]), j.partial(&[2]));
            assert!((k + 1.0).abs() < 1e-10, "tail K at {y} is {k}");
        }
    }

    #[test]
    fn strip_soliton_residual_small() {
        let phi = PhiProfile::standard().unwrap();
        let profile = Arc::new(SolitonProfile::solve(&phi, 1e-6, 1e-10).unwrap());
        let g = strip_soliton(profile.clone());
        for i in 0..=30 {
            let y = -0.999 + 1.998 * i as f64 / 30.0;
            let r = g.soliton_residual(&[0.3, y]).unwrap();
            assert!(r.abs() < 1e-8, "residual {r} at y = {y}");
        }
    }

    #[test]
    fn strip_soliton_h_closed_form() {
        let phi = PhiProfile::standard().unwrap();
        let profile = Arc::new(SolitonProfile::solve(&phi, 1e-6, 1e-10).unwrap());
        let g = strip_soliton(profile.clone());
        for i in 0..=10 {
            let y = -0.9 + 1.8 * i as f64 / 10.0;
            let h = g.mean_curvature(&[0.0, y]).unwrap();
            let z = profile.z_at(y);
            let expect = 1.0 / (1.0 - z * z).sqrt();
            assert!(
                (h - expect).abs() < 1e-9 * (1.0 + expect),
                "H at {y}: {h} vs {expect}"
            );
            // soliton-form agreement
            let h2 = g.mean_curvature_soliton_form(&[0.0, y]).unwrap();
            assert!((h - h2).abs() < 1e-9 * (1.0 + expect));
        }
    }

    #[test]
    fn strip_soliton_induced_metric_in_w() {
        // g = phi^-2 dx^2 + dw^2: g_xx = phi^-2 and g_yy = (dw/dy)^2
        let phi = PhiProfile::standard().unwrap();
        let profile = Arc::new(SolitonProfile::solve(&phi, 1e-6, 1e-10).unwrap());
        let g = strip_soliton(profile.clone());
        let ind = g.induced_metric();
        for i in 0..=25 {
            let y = -0.95 + 1.9 * i as f64 / 25.0;
            let v = ind.values(&[0.1, y]);
            let pv = phi.value(y);
            assert!((v[0] - 1.0 / (pv * pv)).abs() < 1e-9, "g_xx at {y}");
            let z = profile.z_at(y);
            let dw_dy = (1.0 - z * z).sqrt() / pv;
            assert!(
                (v[3] - dw_dy * dw_dy).abs() < 1e-8 * (1.0 + dw_dy * dw_dy),
                "g_yy at {y}"
            );
            assert!(v[1].abs() < 1e-12);
        }
    }

    #[test]
    fn strip_base_ricci_is_k_times_metric() {
        // dimension two: Ric = K g; ties ricci() to the closed form
        let phi = PhiProfile::standard().unwrap();
        let m = strip_base_metric(phi.clone());
        let y = 0.7;
        let j = phi.jet(y, 2);
        let k = gauss_curvature_conformal(j.value(), j.partial(&[1]), j.partial(&[2]));
        let ric = ricci(&m, &[0.0, y]).unwrap();
        let gv = m.values(&[0.0, y]);
        for idx in 0..4 {
            assert!((ric[idx] - k * gv[idx]).abs() < 1e-8 * (1.0 + k.abs()));
        }
    }
}
