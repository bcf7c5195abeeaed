//! Float intrinsics routed through `std` or `libm` depending on features.

#![allow(dead_code)]

macro_rules! shim {
    ($name:ident, $std_method:ident, $libm_fn:path) => {
        #[inline]
        pub fn $name(x: f64) -> f64 {
            #[cfg(feature = "std")]
            {
                x.$std_method()
            }
            #[cfg(not(feature = "std"))]
            {
                $libm_fn(x)
            }
        }
    };
}

shim!(abs, abs, libm::fabs);
shim!(sqrt, sqrt, libm::sqrt);
shim!(exp, exp, libm::exp);
shim!(ln, ln, libm::log);
shim!(ln_1p, ln_1p, libm::log1p);
shim!(sin, sin, libm::sin);
shim!(cos, cos, libm::cos);
shim!(tan, tan, libm::tan);
shim!(atan, atan, libm::atan);
shim!(sinh, sinh, libm::sinh);
shim!(cosh, cosh, libm::cosh);
shim!(tanh, tanh, libm::tanh);
shim!(floor, floor, libm::floor);
shim!(ceil, ceil, libm::ceil);
shim!(round, round, libm::round);

#[inline]
pub fn powf(x: f64, y: f64) -> f64 {
    #[cfg(feature = "std")]
    {
        x.powf(y)
    }
    #[cfg(not(feature = "std"))]
    {
        libm::pow(x, y)
    }
}

#[inline]
pub fn powi(x: f64, n: i32) -> f64 {
    #[cfg(feature = "std")]
    {
        x.powi(n)
    }
    #[cfg(not(feature = "std"))]
    {
        libm::pow(x, n as f64)
    }
}

#[inline]
pub fn hypot(x: f64, y: f64) -> f64 {
    #[cfg(feature = "std")]
    {
        x.hypot(y)
    }
    #[cfg(not(feature = "std"))]
    {
        libm::hypot(x, y)
    }
}

#[inline]
pub fn atan2(y: f64, x: f64) -> f64 {
    #[cfg(feature = "std")]
    {
        y.atan2(x)
    }
    #[cfg(not(feature = "std"))]
    {
        libm::atan2(y, x)
    }
}

#[inline]
pub fn signum(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        x
    }
}

#[inline]
pub fn copysign(x: f64, sign: f64) -> f64 {
    #[cfg(feature = "std")]
    {
        x.copysign(sign)
    }
    #[cfg(not(feature = "std"))]
    {
        libm::copysign(x, sign)
    }
}
