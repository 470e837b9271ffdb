//! Forward-mode differentiation scalars.
//!
//! Objectives are written once against [`Scalar`] and evaluated with `f64`
//! for values, [`Dual`] for first derivatives and [`HyperDual`] for first
//! and second derivatives along a single direction.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

pub trait Scalar:
    Copy
    + Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
{
    fn cst(v: f64) -> Self;
    fn value(&self) -> f64;
    fn sqrt(self) -> Self;
    fn powi(self, n: i32) -> Self;

    fn recip(self) -> Self {
        Self::cst(1.0) / self
    }

    fn square(self) -> Self {
        self * self
    }
}

impl Scalar for f64 {
    fn cst(v: f64) -> Self {
        v
    }
    fn value(&self) -> f64 {
        *self
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn powi(self, n: i32) -> Self {
        f64::powi(self, n)
    }
}

/// a + b·ε with ε² = 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dual {
    pub re: f64,
    pub eps: f64,
}

impl Dual {
    pub fn variable(x: f64) -> Self {
        Dual { re: x, eps: 1.0 }
    }

    fn chain(self, f: f64, df: f64) -> Self {
        Dual {
            re: f,
            eps: df * self.eps,
        }
    }
}

impl Add for Dual {
    type Output = Dual;
    fn add(self, o: Dual) -> Dual {
        Dual {
            re: self.re + o.re,
            eps: self.eps + o.eps,
        }
    }
}

impl Sub for Dual {
    type Output = Dual;
    fn sub(self, o: Dual) -> Dual {
        Dual {
            re: self.re - o.re,
            eps: self.eps - o.eps,
        }
    }
}

impl Mul for Dual {
    type Output = Dual;
    fn mul(self, o: Dual) -> Dual {
        Dual {
            re: self.re * o.re,
            eps: self.re * o.eps + self.eps * o.re,
        }
    }
}

impl Div for Dual {
    type Output = Dual;
    fn div(self, o: Dual) -> Dual {
        let inv = 1.0 / o.re;
        let re = self.re * inv;
        Dual {
            re,
            eps: (self.eps - re * o.eps) * inv,
        }
    }
}

impl Neg for Dual {
    type Output = Dual;
    fn neg(self) -> Dual {
        Dual {
            re: -self.re,
            eps: -self.eps,
        }
    }
}

impl Scalar for Dual {
    fn cst(v: f64) -> Self {
        Dual { re: v, eps: 0.0 }
    }
    fn value(&self) -> f64 {
        self.re
    }
    fn sqrt(self) -> Self {
        let s = self.re.sqrt();
        self.chain(s, 0.5 / s)
    }
    fn powi(self, n: i32) -> Self {
        let f = self.re.powi(n);
        let df = if n == 0 {
            0.0
        } else {
            n as f64 * self.re.powi(n - 1)
        };
        self.chain(f, df)
    }
}

/// a + b₁ε₁ + b₂ε₂ + c·ε₁ε₂ with ε₁² = ε₂² = 0.
///
/// Seeding b₁ = b₂ = 1 gives f, f′ (in either ε slot) and f″ (in the ε₁ε₂ slot)
/// without truncation error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HyperDual {
    pub re: f64,
    pub e1: f64,
    pub e2: f64,
    pub e12: f64,
}

impl HyperDual {
    pub fn variable(x: f64) -> Self {
        HyperDual {
            re: x,
            e1: 1.0,
            e2: 1.0,
            e12: 0.0,
        }
    }

    pub fn first(&self) -> f64 {
        self.e1
    }

    pub fn second(&self) -> f64 {
        self.e12
    }

    fn chain(self, f: f64, df: f64, d2f: f64) -> Self {
        HyperDual {
            re: f,
            e1: df * self.e1,
            e2: df * self.e2,
            e12: df * self.e12 + d2f * self.e1 * self.e2,
        }
    }
}

impl Add for HyperDual {
    type Output = HyperDual;
    fn add(self, o: HyperDual) -> HyperDual {
        HyperDual {
            re: self.re + o.re,
            e1: self.e1 + o.e1,
            e2: self.e2 + o.e2,
            e12: self.e12 + o.e12,
        }
    }
}

impl Sub for HyperDual {
    type Output = HyperDual;
    fn sub(self, o: HyperDual) -> HyperDual {
        self + (-o)
    }
}

impl Mul for HyperDual {
    type Output = HyperDual;
    fn mul(self, o: HyperDual) -> HyperDual {
        HyperDual {
            re: self.re * o.re,
            e1: self.re * o.e1 + self.e1 * o.re,
            e2: self.re * o.e2 + self.e2 * o.re,
            e12: self.re * o.e12 + self.e1 * o.e2 + self.e2 * o.e1 + self.e12 * o.re,
        }
    }
}

impl Div for HyperDual {
    type Output = HyperDual;
    fn div(self, o: HyperDual) -> HyperDual {
        self * o.recip()
    }
}

impl Neg for HyperDual {
    type Output = HyperDual;
    fn neg(self) -> HyperDual {
        HyperDual {
            re: -self.re,
            e1: -self.e1,
            e2: -self.e2,
            e12: -self.e12,
        }
    }
}

impl Scalar for HyperDual {
    fn cst(v: f64) -> Self {
        HyperDual {
            re: v,
            e1: 0.0,
            e2: 0.0,
            e12: 0.0,
        }
    }
    fn value(&self) -> f64 {
        self.re
    }
    fn recip(self) -> Self {
        let inv = 1.0 / self.re;
        self.chain(inv, -inv * inv, 2.0 * inv * inv * inv)
    }
    fn sqrt(self) -> Self {
        let s = self.re.sqrt();
        self.chain(s, 0.5 / s, -0.25 / (s * self.re))
    }
    fn powi(self, n: i32) -> Self {
        let nf = n as f64;
        let f = self.re.powi(n);
        let df = if n == 0 {
            0.0
        } else {
            nf * self.re.powi(n - 1)
        };
        let d2f = if n == 0 || n == 1 {
            0.0
        } else {
            nf * (nf - 1.0) * self.re.powi(n - 2)
        };
        self.chain(f, df, d2f)
    }
}

macro_rules! impl_f64_ops {
    ($t:ty) => {
        impl Add<f64> for $t {
            type Output = $t;
            fn add(self, o: f64) -> $t {
                self + <$t>::cst(o)
            }
        }
        impl Sub<f64> for $t {
            type Output = $t;
            fn sub(self, o: f64) -> $t {
                self - <$t>::cst(o)
            }
        }
        impl Mul<f64> for $t {
            type Output = $t;
            fn mul(self, o: f64) -> $t {
                self * <$t>::cst(o)
            }
        }
        impl Div<f64> for $t {
            type Output = $t;
            fn div(self, o: f64) -> $t {
                self * <$t>::cst(1.0 / o)
            }
        }
    };
}

impl_f64_ops!(Dual);
impl_f64_ops!(HyperDual);

/// (f(x), f′(x)).
pub fn derivative(f: impl Fn(Dual) -> Dual, x: f64) -> (f64, f64) {
    let y = f(Dual::variable(x));
    (y.re, y.eps)
}

/// (f(x), f′(x), f″(x)).
pub fn second_derivative(f: impl Fn(HyperDual) -> HyperDual, x: f64) -> (f64, f64, f64) {
    let y = f(HyperDual::variable(x));
    (y.re, y.first(), y.second())
}
