//! Second-order forward-mode scalar: the extended dual triple {f, f', f''}.
//!
//! A `Dual2` carries a value together with the *raw* first and second
//! derivatives with respect to one independent variable — not Taylor
//! coefficients, so the product rule carries an explicit factor 2 on the
//! cross term and no factorial bookkeeping appears anywhere.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dual2 {
    pub val: f64,
    pub d1: f64,
    pub d2: f64,
}

impl Dual2 {
    pub const ZERO: Dual2 = Dual2 { val: 0.0, d1: 0.0, d2: 0.0 };
    pub const ONE: Dual2 = Dual2 { val: 1.0, d1: 0.0, d2: 0.0 };

    pub fn new(val: f64, d1: f64, d2: f64) -> Self {
        Dual2 { val, d1, d2 }
    }

    /// Seed for the independent variable: {x, 1, 0}.
    pub fn variable(x: f64) -> Self {
        Dual2 { val: x, d1: 1.0, d2: 0.0 }
    }

    /// Seed for a quantity that does not vary: {c, 0, 0}.
    pub fn constant(c: f64) -> Self {
        Dual2 { val: c, d1: 0.0, d2: 0.0 }
    }

    pub fn is_finite(&self) -> bool {
        self.val.is_finite() && self.d1.is_finite() && self.d2.is_finite()
    }

    /// Chain rule through a scalar map given f(g₀), f'(g₀), f''(g₀):
    /// {f, f'·g₁, f''·g₁² + f'·g₂}.
    #[inline]
    fn chain(self, f0: f64, f1: f64, f2: f64) -> Dual2 {
        Dual2 {
            val: f0,
            d1: f1 * self.d1,
            d2: f2 * self.d1 * self.d1 + f1 * self.d2,
        }
    }

    /// Lift an arbitrary twice-differentiable scalar function onto the triple.
    ///
    /// `name` labels the function in the error when the result is not finite
    /// (domain violation at `self.val`).
    pub fn lift(
        self,
        name: &'static str,
        f: impl Fn(f64) -> f64,
        fp: impl Fn(f64) -> f64,
        fpp: impl Fn(f64) -> f64,
    ) -> Result<Dual2> {
        let out = self.chain(f(self.val), fp(self.val), fpp(self.val));
        if out.is_finite() {
            Ok(out)
        } else {
            Err(Error::DomainError { func: name, value: self.val })
        }
    }

    /// Quotient by the recurrence q₀ = a₀/b₀, q₁ = (a₁ − q₀b₁)/b₀,
    /// q₂ = (a₂ − 2q₁b₁ − q₀b₂)/b₀.
    ///
    /// Named method rather than the `/` operator because it is fallible.
    #[allow(clippy::should_implement_trait)]
    pub fn div(self, rhs: Dual2) -> Result<Dual2> {
        if rhs.val.abs() < 1e-300 {
            return Err(Error::DivisionByZeroDual { denom: rhs.val });
        }
        let q0 = self.val / rhs.val;
        let q1 = (self.d1 - q0 * rhs.d1) / rhs.val;
        let q2 = (self.d2 - 2.0 * q1 * rhs.d1 - q0 * rhs.d2) / rhs.val;
        Ok(Dual2 { val: q0, d1: q1, d2: q2 })
    }

    pub fn sin(self) -> Dual2 {
        let (s, c) = self.val.sin_cos();
        self.chain(s, c, -s)
    }

    pub fn cos(self) -> Dual2 {
        let (s, c) = self.val.sin_cos();
        self.chain(c, -s, -c)
    }

    /// Errors near poles: |cos| < 1e-12 is treated as out of domain.
    pub fn tan(self) -> Result<Dual2> {
        let c = self.val.cos();
        if c.abs() < 1e-12 {
            return Err(Error::DomainError { func: "tan", value: self.val });
        }
        let t = self.val.tan();
        let sec2 = 1.0 + t * t;
        // tan' = sec², tan'' = 2·sec²·tan
        Ok(self.chain(t, sec2, 2.0 * sec2 * t))
    }

    pub fn asin(self) -> Result<Dual2> {
        let x = self.val;
        if x.abs() > 1.0 {
            return Err(Error::DomainError { func: "asin", value: x });
        }
        let w = 1.0 - x * x;
        if w <= 0.0 {
            return Err(Error::DerivativeSingularity { func: "asin", value: x });
        }
        let d = w.sqrt();
        Ok(self.chain(x.asin(), 1.0 / d, x / (w * d)))
    }

    pub fn acos(self) -> Result<Dual2> {
        let x = self.val;
        if x.abs() > 1.0 {
            return Err(Error::DomainError { func: "acos", value: x });
        }
        let w = 1.0 - x * x;
        if w <= 0.0 {
            return Err(Error::DerivativeSingularity { func: "acos", value: x });
        }
        let d = w.sqrt();
        Ok(self.chain(x.acos(), -1.0 / d, -x / (w * d)))
    }

    pub fn atan(self) -> Dual2 {
        let x = self.val;
        let w = 1.0 + x * x;
        self.chain(x.atan(), 1.0 / w, -2.0 * x / (w * w))
    }

    /// Two-argument arctangent of dual `self` = y and `x`, correct in every
    /// quadrant; derivatives are those of atan(y/x) and need x² + y² > 0.
    pub fn atan2(self, x: Dual2) -> Result<Dual2> {
        let (y0, x0) = (self.val, x.val);
        let den = x0 * x0 + y0 * y0;
        if den < 1e-300 {
            return Err(Error::DomainError { func: "atan2", value: 0.0 });
        }
        // d/dt atan2(y, x) = (x·y' − y·x')/(x² + y²); the x'·y' terms cancel
        // in the numerator of the second derivative.
        let n1 = x0 * self.d1 - y0 * x.d1;
        let n2 = x0 * self.d2 - y0 * x.d2;
        let dden = 2.0 * (x0 * x.d1 + y0 * self.d1);
        let d1 = n1 / den;
        let d2 = n2 / den - n1 * dden / (den * den);
        Ok(Dual2 { val: y0.atan2(x0), d1, d2 })
    }

    pub fn exp(self) -> Dual2 {
        let e = self.val.exp();
        self.chain(e, e, e)
    }

    pub fn ln(self) -> Result<Dual2> {
        let x = self.val;
        if x <= 0.0 {
            return Err(Error::DomainError { func: "ln", value: x });
        }
        Ok(self.chain(x.ln(), 1.0 / x, -1.0 / (x * x)))
    }

    pub fn sqrt(self) -> Result<Dual2> {
        let x = self.val;
        if x < 0.0 {
            return Err(Error::DomainError { func: "sqrt", value: x });
        }
        if x == 0.0 {
            return Err(Error::DerivativeSingularity { func: "sqrt", value: x });
        }
        let r = x.sqrt();
        Ok(self.chain(r, 0.5 / r, -0.25 / (r * x)))
    }

    /// Integer power by repeated product — exact product rule, so negative
    /// bases are fine. Negative exponents go through the dual quotient.
    pub fn powi(self, n: i32) -> Result<Dual2> {
        if n < 0 {
            return Dual2::ONE.div(self.powi(n.checked_neg().unwrap_or(i32::MAX))?);
        }
        // exponentiation by squaring over the dual product
        let mut acc = Dual2::ONE;
        let mut base = self;
        let mut k = n as u32;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            k >>= 1;
        }
        Ok(acc)
    }

    /// General power g^e. A constant integer exponent uses the repeated
    /// product (valid for any base); everything else is exp(e·ln g) and
    /// requires a strictly positive base.
    pub fn pow(self, e: Dual2) -> Result<Dual2> {
        if e.d1 == 0.0 && e.d2 == 0.0 && e.val.fract() == 0.0 && e.val.abs() <= i32::MAX as f64 {
            return self.powi(e.val as i32);
        }
        if self.val <= 0.0 {
            return Err(Error::DomainError { func: "pow", value: self.val });
        }
        Ok((e * self.ln()?).exp())
    }

    /// Power with a constant real exponent.
    pub fn powf(self, e: f64) -> Result<Dual2> {
        self.pow(Dual2::constant(e))
    }
}

impl std::ops::Add for Dual2 {
    type Output = Dual2;
    fn add(self, rhs: Dual2) -> Dual2 {
        Dual2 {
            val: self.val + rhs.val,
            d1: self.d1 + rhs.d1,
            d2: self.d2 + rhs.d2,
        }
    }
}

impl std::ops::Sub for Dual2 {
    type Output = Dual2;
    fn sub(self, rhs: Dual2) -> Dual2 {
        Dual2 {
            val: self.val - rhs.val,
            d1: self.d1 - rhs.d1,
            d2: self.d2 - rhs.d2,
        }
    }
}

impl std::ops::Neg for Dual2 {
    type Output = Dual2;
    fn neg(self) -> Dual2 {
        Dual2 { val: -self.val, d1: -self.d1, d2: -self.d2 }
    }
}

impl std::ops::Mul for Dual2 {
    type Output = Dual2;
    // (ab)'' = a''b + 2a'b' + ab'' — raw derivatives, hence the explicit 2.
    fn mul(self, rhs: Dual2) -> Dual2 {
        Dual2 {
            val: self.val * rhs.val,
            d1: self.val * rhs.d1 + self.d1 * rhs.val,
            d2: self.val * rhs.d2 + 2.0 * self.d1 * rhs.d1 + self.d2 * rhs.val,
        }
    }
}

impl std::ops::Mul<f64> for Dual2 {
    type Output = Dual2;
    fn mul(self, s: f64) -> Dual2 {
        Dual2 { val: self.val * s, d1: self.d1 * s, d2: self.d2 * s }
    }
}

impl std::ops::Mul<Dual2> for f64 {
    type Output = Dual2;
    fn mul(self, rhs: Dual2) -> Dual2 {
        rhs * self
    }
}

impl std::ops::Add<f64> for Dual2 {
    type Output = Dual2;
    fn add(self, c: f64) -> Dual2 {
        Dual2 { val: self.val + c, ..self }
    }
}

impl std::ops::Sub<f64> for Dual2 {
    type Output = Dual2;
    fn sub(self, c: f64) -> Dual2 {
        Dual2 { val: self.val - c, ..self }
    }
}

impl std::fmt::Display for Dual2 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {}, {})", self.val, self.d1, self.d2)
    }
}
