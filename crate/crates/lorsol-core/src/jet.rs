//! Truncated multivariate Taylor arithmetic ("jets").
//!
//! A [`Jet`] holds the Taylor coefficients of a smooth function at a point,
//! up to a fixed total degree in up to three variables. Arithmetic and
//! elementary functions propagate coefficients exactly, which yields
//! high-order derivatives without the digit loss of finite differencing.
//! Curvature chains in this crate take up to four derivatives of a graph
//! function, so orders up to [`MAX_ORDER`] are supported.
//!
//! Coefficients are stored densely in graded-lexicographic order; the
//! monomial tables for each `(vars, order)` pair are built once and cached.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use once_cell::race::OnceBox;

use crate::fm;

/// Highest supported truncation order.
pub const MAX_ORDER: usize = 8;

/// Highest supported number of variables.
pub const MAX_VARS: usize = 3;

const SENTINEL: u16 = u16::MAX;

struct Tables {
    /// Monomial exponents, graded-lex ordered. Prefix-closed: the tables
    /// for a lower order are a prefix of those for a higher one.
    exps: Vec<[u8; 3]>,
    /// `prod[i * len + j]` = index of monomial `exps[i] + exps[j]`, or
    /// `SENTINEL` when the product exceeds the truncation degree.
    prod: Vec<u16>,
    /// `dmap[k][i]` = index of `exps[i] - e_k`, or `SENTINEL`.
    dmap: [Vec<u16>; 3],
}

fn gen_exps(vars: usize, order: usize) -> Vec<[u8; 3]> {
    let mut out = Vec::new();
    for deg in 0..=order as u8 {
        // lexicographic within a degree block, first variable most significant
        let mut stack = vec![([0u8; 3], 0usize, deg)];
        let mut block = Vec::new();
        while let Some((exp, var, rem)) = stack.pop() {
            if var == vars - 1 {
                let mut e = exp;
                e[var] = rem;
                block.push(e);
            } else {
                // descending so the final block comes out lex ascending
                for v in 0..=rem {
                    let mut e = exp;
                    e[var] = rem - v;
                    stack.push((e, var + 1, v));
                }
            }
        }
        block.reverse();
        block.sort_unstable_by(|a, b| b.cmp(a));
        out.extend(block);
    }
    out
}

fn deg(e: &[u8; 3]) -> u8 {
    e[0] + e[1] + e[2]
}

fn find_idx(exps: &[[u8; 3]], e: &[u8; 3]) -> Option<u16> {
    let d = deg(e);
    exps.iter()
        .position(|x| deg(x) == d && x == e)
        .map(|i| i as u16)
}

fn build_tables(vars: usize, order: usize) -> Tables {
    let exps = gen_exps(vars, order);
    let n = exps.len();
    let mut prod = vec![SENTINEL; n * n];
    for i in 0..n {
        for j in 0..n {
            if (deg(&exps[i]) + deg(&exps[j])) as usize <= order {
                let e = [
                    exps[i][0] + exps[j][0],
                    exps[i][1] + exps[j][1],
                    exps[i][2] + exps[j][2],
                ];
                prod[i * n + j] = find_idx(&exps, &e).expect("closed under truncation");
            }
        }
    }
    let mut dmap = [Vec::new(), Vec::new(), Vec::new()];
    for (k, map) in dmap.iter_mut().enumerate() {
        *map = (0..n)
            .map(|i| {
                if exps[i][k] == 0 {
                    SENTINEL
                } else {
                    let mut e = exps[i];
                    e[k] -= 1;
                    find_idx(&exps, &e).unwrap()
                }
            })
            .collect();
    }
    Tables { exps, prod, dmap }
}

fn tables(vars: usize, order: usize) -> &'static Tables {
    const SLOT: OnceBox<Tables> = OnceBox::new();
    static REGISTRY: [[OnceBox<Tables>; MAX_ORDER + 1]; MAX_VARS] =
        [[SLOT; MAX_ORDER + 1], [SLOT; MAX_ORDER + 1], [SLOT; MAX_ORDER + 1]];
    assert!(vars >= 1 && vars <= MAX_VARS, "jet supports 1..=3 variables");
    assert!(order <= MAX_ORDER, "jet order above MAX_ORDER");
    REGISTRY[vars - 1][order].get_or_init(|| Box::new(build_tables(vars, order)))
}

/// Truncated Taylor expansion of a scalar quantity at a point.
///
/// Variables represent offsets from the expansion point; `coeffs[0]` is the
/// value there. Binary operations require both operands to share the same
/// `(vars, order)` shape.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    vars: u8,
    order: u8,
    coeffs: Vec<f64>,
}

impl Jet {
    pub fn constant(value: f64, vars: usize, order: usize) -> Self {
        let n = tables(vars, order).exps.len();
        let mut coeffs = vec![0.0; n];
        coeffs[0] = value;
        Jet { vars: vars as u8, order: order as u8, coeffs }
    }

    /// The coordinate function `x_i`, expanded at `value`.
    pub fn variable(value: f64, var: usize, vars: usize, order: usize) -> Self {
        assert!(var < vars);
        let mut j = Jet::constant(value, vars, order);
        if order >= 1 {
            // degree-1 block follows the constant; lex descending on exponents
            let t = tables(vars, order);
            let mut e = [0u8; 3];
            e[var] = 1;
            let idx = find_idx(&t.exps, &e).unwrap() as usize;
            j.coeffs[idx] = 1.0;
        }
        j
    }

    pub fn vars(&self) -> usize {
        self.vars as usize
    }

    pub fn order(&self) -> usize {
        self.order as usize
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    /// Taylor coefficient of the monomial with exponents `e`.
    pub fn coeff(&self, e: &[u8]) -> f64 {
        let mut key = [0u8; 3];
        key[..e.len()].copy_from_slice(e);
        let t = tables(self.vars(), self.order());
        match find_idx(&t.exps, &key) {
            Some(i) => self.coeffs[i as usize],
            None => 0.0,
        }
    }

    /// Mixed partial derivative `d^e f` (coefficient times factorials).
    pub fn partial(&self, e: &[u8]) -> f64 {
        let mut fact = 1.0;
        for &k in e {
            for m in 1..=k as u64 {
                fact *= m as f64;
            }
        }
        self.coeff(e) * fact
    }

    /// First-order coefficient with respect to variable `var`.
    pub fn grad(&self, var: usize) -> f64 {
        let mut e = [0u8; 3];
        e[var] = 1;
        self.coeff(&e[..self.vars()])
    }

    fn same_shape(&self, rhs: &Jet) {
        assert!(
            self.vars == rhs.vars && self.order == rhs.order,
            "jet shape mismatch: ({},{}) vs ({},{})",
            self.vars,
            self.order,
            rhs.vars,
            rhs.order
        );
    }

    pub fn add(&self, rhs: &Jet) -> Jet {
        self.same_shape(rhs);
        let mut out = self.clone();
        for (o, r) in out.coeffs.iter_mut().zip(&rhs.coeffs) {
            *o += r;
        }
        out
    }

    pub fn sub(&self, rhs: &Jet) -> Jet {
        self.same_shape(rhs);
        let mut out = self.clone();
        for (o, r) in out.coeffs.iter_mut().zip(&rhs.coeffs) {
            *o -= r;
        }
        out
    }

    pub fn neg(&self) -> Jet {
        let mut out = self.clone();
        for o in out.coeffs.iter_mut() {
            *o = -*o;
        }
        out
    }

    pub fn scale(&self, s: f64) -> Jet {
        let mut out = self.clone();
        for o in out.coeffs.iter_mut() {
            *o *= s;
        }
        out
    }

    pub fn add_scalar(&self, s: f64) -> Jet {
        let mut out = self.clone();
        out.coeffs[0] += s;
        out
    }

    pub fn mul(&self, rhs: &Jet) -> Jet {
        self.same_shape(rhs);
        let t = tables(self.vars(), self.order());
        let n = t.exps.len();
        let mut out = vec![0.0; n];
        for i in 0..n {
            let a = self.coeffs[i];
            if a == 0.0 {
                continue;
            }
            let row = &t.prod[i * n..(i + 1) * n];
            for (j, &pid) in row.iter().enumerate() {
                if pid == SENTINEL {
                    continue;
                }
                let b = rhs.coeffs[j];
                if b != 0.0 {
                    out[pid as usize] += a * b;
                }
            }
        }
        Jet { vars: self.vars, order: self.order, coeffs: out }
    }

    pub fn div(&self, rhs: &Jet) -> Jet {
        self.mul(&rhs.recip())
    }

    /// Partial derivative as a jet of one lower order.
    pub fn derivative(&self, var: usize) -> Jet {
        assert!(self.order >= 1, "cannot differentiate an order-0 jet");
        let t = tables(self.vars(), self.order());
        let out_len = tables(self.vars(), self.order() - 1).exps.len();
        let mut out = vec![0.0; out_len];
        for (i, &target) in t.dmap[var].iter().enumerate() {
            if target == SENTINEL {
                continue;
            }
            let c = self.coeffs[i];
            if c != 0.0 {
                out[target as usize] += c * t.exps[i][var] as f64;
            }
        }
        Jet { vars: self.vars, order: self.order - 1, coeffs: out }
    }

    /// Antiderivative in the single variable, with constant term `c0`.
    /// Only defined for one-variable jets; raises the order by one.
    pub fn integrate(&self, c0: f64) -> Jet {
        assert_eq!(self.vars, 1, "integrate is univariate");
        assert!(self.order() + 1 <= MAX_ORDER);
        let mut out = vec![0.0; self.coeffs.len() + 1];
        out[0] = c0;
        for (k, &c) in self.coeffs.iter().enumerate() {
            out[k + 1] = c / (k as f64 + 1.0);
        }
        Jet { vars: 1, order: self.order + 1, coeffs: out }
    }

    /// Drop coefficients above `order` (prefix-closed layout).
    pub fn truncated(&self, order: usize) -> Jet {
        assert!(order <= self.order());
        let len = tables(self.vars(), order).exps.len();
        Jet {
            vars: self.vars,
            order: order as u8,
            coeffs: self.coeffs[..len].to_vec(),
        }
    }

    /// Re-embed into a jet with `new_vars` variables, sending old variable
    /// `i` to `var_map[i]`.
    pub fn promote(&self, new_vars: usize, var_map: &[usize]) -> Jet {
        assert_eq!(var_map.len(), self.vars());
        let src = tables(self.vars(), self.order());
        let dst = tables(new_vars, self.order());
        let mut out = vec![0.0; dst.exps.len()];
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let mut e = [0u8; 3];
            for (v, &target) in var_map.iter().enumerate() {
                e[target] = src.exps[i][v];
            }
            let idx = find_idx(&dst.exps, &e).expect("promoted monomial");
            out[idx as usize] = c;
        }
        Jet { vars: new_vars as u8, order: self.order, coeffs: out }
    }

    /// Evaluate the truncated polynomial at a variable offset.
    pub fn eval_offset(&self, dx: &[f64]) -> f64 {
        let t = tables(self.vars(), self.order());
        let mut acc = 0.0;
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let mut m = c;
            for v in 0..self.vars() {
                for _ in 0..t.exps[i][v] {
                    m *= dx[v];
                }
            }
            acc += m;
        }
        acc
    }

    /// Compose with a scalar function given by the Taylor coefficients of
    /// `g` at `self.value()`: `series[k] = g^(k)(a) / k!`.
    pub fn apply_series(&self, series: &[f64]) -> Jet {
        assert_eq!(series.len(), self.order() + 1);
        let mut nilp = self.clone();
        nilp.coeffs[0] = 0.0;
        let mut out = Jet::constant(series[self.order()], self.vars(), self.order());
        for k in (0..self.order()).rev() {
            out = out.mul(&nilp);
            out.coeffs[0] += series[k];
        }
        out
    }

    pub fn exp(&self) -> Jet {
        let a = self.value();
        let ea = fm::exp(a);
        let m = self.order();
        let mut s = vec![0.0; m + 1];
        let mut fact = 1.0;
        for (k, sk) in s.iter_mut().enumerate() {
            if k > 0 {
                fact *= k as f64;
            }
            *sk = ea / fact;
        }
        self.apply_series(&s)
    }

    pub fn ln(&self) -> Jet {
        let a = self.value();
        assert!(a > 0.0, "ln of non-positive jet value {a}");
        let m = self.order();
        let mut s = vec![0.0; m + 1];
        s[0] = fm::ln(a);
        let mut apow = 1.0;
        for (k, sk) in s.iter_mut().enumerate().skip(1) {
            apow *= a;
            *sk = if k % 2 == 1 { 1.0 } else { -1.0 } / (k as f64 * apow);
        }
        self.apply_series(&s)
    }

    pub fn sqrt(&self) -> Jet {
        let a = self.value();
        assert!(a > 0.0, "sqrt of non-positive jet value {a}");
        let m = self.order();
        let ra = fm::sqrt(a);
        // binomial series: sqrt(a) * C(1/2, k) / a^k
        let mut s = vec![0.0; m + 1];
        let mut c = ra;
        s[0] = c;
        for k in 1..=m {
            c *= (0.5 - (k as f64 - 1.0)) / (k as f64 * a);
            s[k] = c;
        }
        self.apply_series(&s)
    }

    pub fn recip(&self) -> Jet {
        let a = self.value();
        assert!(a != 0.0, "recip of zero jet value");
        let m = self.order();
        let mut s = vec![0.0; m + 1];
        let mut c = 1.0 / a;
        s[0] = c;
        for sk in s.iter_mut().skip(1) {
            c *= -1.0 / a;
            *sk = c;
        }
        self.apply_series(&s)
    }

    pub fn sin(&self) -> Jet {
        let (sa, ca) = (fm::sin(self.value()), fm::cos(self.value()));
        self.apply_series(&trig_series(sa, ca, self.order()))
    }

    pub fn cos(&self) -> Jet {
        let (sa, ca) = (fm::sin(self.value()), fm::cos(self.value()));
        // cos' = -sin: same cycle starting at (cos, -sin)
        self.apply_series(&trig_series(ca, -sa, self.order()))
    }

    pub fn sinh(&self) -> Jet {
        let (sa, ca) = (fm::sinh(self.value()), fm::cosh(self.value()));
        self.apply_series(&hyp_series(sa, ca, self.order()))
    }

    pub fn cosh(&self) -> Jet {
        let (sa, ca) = (fm::sinh(self.value()), fm::cosh(self.value()));
        self.apply_series(&hyp_series(ca, sa, self.order()))
    }

    /// `tanh` via `1 - 2 / (e^{2x} + 1)`, with a saturation guard for
    /// arguments where `sech^2` underflows.
    pub fn tanh(&self) -> Jet {
        let a = self.value();
        if fm::abs(a) > 350.0 {
            return Jet::constant(fm::signum(a), self.vars(), self.order());
        }
        let e = self.scale(2.0).exp();
        let den = e.add_scalar(1.0);
        Jet::constant(1.0, self.vars(), self.order()).sub(&den.recip().scale(2.0))
    }

    pub fn powi(&self, n: i32) -> Jet {
        assert!(n >= 0, "powi expects a non-negative exponent");
        let mut out = Jet::constant(1.0, self.vars(), self.order());
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }
}

fn trig_series(sa: f64, ca: f64, order: usize) -> Vec<f64> {
    // derivatives of sin cycle (sin, cos, -sin, -cos)
    let cycle = [sa, ca, -sa, -ca];
    let mut s = vec![0.0; order + 1];
    let mut fact = 1.0;
    for (k, sk) in s.iter_mut().enumerate() {
        if k > 0 {
            fact *= k as f64;
        }
        *sk = cycle[k % 4] / fact;
    }
    s
}

fn hyp_series(v0: f64, v1: f64, order: usize) -> Vec<f64> {
    let cycle = [v0, v1];
    let mut s = vec![0.0; order + 1];
    let mut fact = 1.0;
    for (k, sk) in s.iter_mut().enumerate() {
        if k > 0 {
            fact *= k as f64;
        }
        *sk = cycle[k % 2] / fact;
    }
    s
}

impl core::ops::Add for &Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        Jet::add(self, rhs)
    }
}

impl core::ops::Sub for &Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        Jet::sub(self, rhs)
    }
}

impl core::ops::Mul for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        Jet::mul(self, rhs)
    }
}

impl core::ops::Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet::neg(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn var1(x: f64, order: usize) -> Jet {
        Jet::variable(x, 0, 1, order)
    }

    #[test]
    fn fourth_derivatives_match_analytic() {
        // d4/dx4 of exp, ln(1+x), tanh against closed forms, 200 points
        let mut x = -0.9f64;
        let mut n = 0;
        while n < 200 {
            x += 0.017;
            let j = var1(x, 4);
            let e4 = j.exp().partial(&[4]);
            assert!((e4 - x.exp()).abs() / x.exp() < 1e-9, "exp'''' at {x}");

            let l4 = j.add_scalar(1.0).ln().partial(&[4]);
            let l4_true = -6.0 / (1.0 + x).powi(4);
            assert!((l4 - l4_true).abs() / l4_true.abs() < 1e-9, "ln'''' at {x}");

            let t4 = j.tanh().partial(&[4]);
            let t = x.tanh();
            let t4_true = 8.0 * t * (1.0 - t * t) * (2.0 - 3.0 * t * t);
            assert!(
                (t4 - t4_true).abs() < 1e-9 * (1.0 + t4_true.abs()),
                "tanh'''' at {x}: {t4} vs {t4_true}"
            );
            n += 1;
        }
    }

    #[test]
    fn product_rule_multivariate() {
        let x = Jet::variable(1.3, 0, 2, 3);
        let y = Jet::variable(-0.4, 1, 2, 3);
        let f = x.mul(&y).add(&x.powi(2)); // xy + x^2
        assert!((f.partial(&[1, 1]) - 1.0).abs() < 1e-14);
        assert!((f.partial(&[2, 0]) - 2.0).abs() < 1e-14);
        assert!((f.value() - (1.3 * -0.4 + 1.69)).abs() < 1e-14);
    }

    #[test]
    fn composition_sqrt_recip() {
        let x = var1(2.0, 5);
        let s = x.sqrt();
        assert!((s.value() - 2.0f64.sqrt()).abs() < 1e-15);
        assert!((s.partial(&[1]) - 0.5 / 2.0f64.sqrt()).abs() < 1e-15);
        let r = x.recip();
        assert!((r.partial(&[2]) - 2.0 / 8.0).abs() < 1e-15);
        // sqrt(x)^2 == x to truncation order
        let sq = s.mul(&s);
        for k in 0..=5u8 {
            let want = x.coeff(&[k]);
            assert!((sq.coeff(&[k]) - want).abs() < 1e-13, "k={k}");
        }
    }

    #[test]
    fn derivative_and_integrate_roundtrip() {
        let x = var1(0.7, 5);
        let f = x.sin();
        let df = f.derivative(0);
        assert!((df.value() - 0.7f64.cos()).abs() < 1e-15);
        let back = df.integrate(f.value());
        for k in 0..=5u8 {
            assert!((back.coeff(&[k]) - f.coeff(&[k])).abs() < 1e-15);
        }
    }

    #[test]
    fn promote_embeds_variables() {
        let f = var1(0.5, 3).cosh();
        let g = f.promote(2, &[1]); // y-only function inside a 2-var jet
        assert_eq!(g.vars(), 2);
        assert!((g.partial(&[0, 2]) - f.partial(&[2])).abs() < 1e-15);
        assert_eq!(g.partial(&[1, 0]), 0.0);
    }

    #[test]
    fn trig_jets() {
        let x = var1(0.3, 4);
        let c = x.cos();
        let s = x.sin();
        let one = c.mul(&c).add(&s.mul(&s));
        assert!((one.value() - 1.0).abs() < 1e-15);
        for k in 1..=4u8 {
            assert!(one.coeff(&[k]).abs() < 1e-14);
        }
    }
}
