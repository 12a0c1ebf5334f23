use std::ops::{Add, Div, Mul, Neg, Sub};

/// A value together with its partial derivatives in the space variables `x1..xn`.
#[derive(Debug, Clone, PartialEq)]
pub struct DualVector {
    pub value: f64,
    pub partials: Vec<f64>,
}

impl DualVector {
    pub fn constant(value: f64, n: usize) -> Self {
        Self {
            value,
            partials: vec![0.0; n],
        }
    }

    /// The seed for variable `x{index+1}`.
    pub fn variable(value: f64, index: usize, n: usize) -> Self {
        let mut partials = vec![0.0; n];
        partials[index] = 1.0;
        Self { value, partials }
    }

    pub fn is_constant(&self) -> bool {
        self.partials.iter().all(|d| *d == 0.0)
    }

    /// Chain rule for a scalar function with value `f` and derivative `df` at `self.value`.
    pub fn chain(mut self, f: f64, df: f64) -> Self {
        self.value = f;
        for d in &mut self.partials {
            *d *= df;
        }
        self
    }

    pub fn sin(self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.chain(s, c)
    }

    pub fn cos(self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.chain(c, -s)
    }

    pub fn exp(self) -> Self {
        let e = self.value.exp();
        self.chain(e, e)
    }

    /// Requires `value > 0`, or `value == 0` with zero partials.
    pub fn sqrt(self) -> Self {
        let r = self.value.sqrt();
        if r == 0.0 {
            return self.chain(0.0, 0.0);
        }
        self.chain(r, 0.5 / r)
    }

    pub fn ln(self) -> Self {
        let v = self.value;
        self.chain(v.ln(), 1.0 / v)
    }

    /// Integer power by repeated squaring; exact product-rule bookkeeping. The value
    /// agrees bitwise with [`powi_value`].
    pub fn powi(self, k: i32) -> Self {
        if k == 0 {
            let n = self.partials.len();
            return Self::constant(1.0, n);
        }
        let base = if k < 0 {
            Self::constant(1.0, self.partials.len()) / self
        } else {
            self
        };
        let mut e = k.unsigned_abs();
        let mut acc: Option<Self> = None;
        let mut sq = base;
        loop {
            if e & 1 == 1 {
                acc = Some(match acc {
                    None => sq.clone(),
                    Some(a) => a * sq.clone(),
                });
            }
            e >>= 1;
            if e == 0 {
                break;
            }
            sq = sq.clone() * sq;
        }
        acc.expect("k != 0")
    }

    /// `self^other` as `exp(other · ln self)`; requires `self.value > 0`.
    pub fn powf(self, other: Self) -> Self {
        (other * self.ln()).exp()
    }
}

/// `a^k` by the same multiplication sequence as [`DualVector::powi`].
pub(crate) fn powi_value(a: f64, k: i32) -> f64 {
    if k == 0 {
        return 1.0;
    }
    let mut sq = if k < 0 { 1.0 / a } else { a };
    let mut e = k.unsigned_abs();
    let mut acc: Option<f64> = None;
    loop {
        if e & 1 == 1 {
            acc = Some(acc.map_or(sq, |v| v * sq));
        }
        e >>= 1;
        if e == 0 {
            break;
        }
        sq *= sq;
    }
    acc.expect("k != 0")
}

impl Add for DualVector {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        self.value += rhs.value;
        for (a, b) in self.partials.iter_mut().zip(&rhs.partials) {
            *a += b;
        }
        self
    }
}

impl Sub for DualVector {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        self.value -= rhs.value;
        for (a, b) in self.partials.iter_mut().zip(&rhs.partials) {
            *a -= b;
        }
        self
    }
}

impl Mul for DualVector {
    type Output = Self;
    fn mul(mut self, rhs: Self) -> Self {
        for (a, b) in self.partials.iter_mut().zip(&rhs.partials) {
            *a = *a * rhs.value + self.value * b;
        }
        self.value *= rhs.value;
        self
    }
}

impl Div for DualVector {
    type Output = Self;
    fn div(mut self, rhs: Self) -> Self {
        let inv = 1.0 / rhs.value;
        let q = self.value / rhs.value;
        for (a, b) in self.partials.iter_mut().zip(&rhs.partials) {
            *a = (*a - q * b) * inv;
        }
        self.value = q;
        self
    }
}

impl Neg for DualVector {
    type Output = Self;
    fn neg(mut self) -> Self {
        self.value = -self.value;
        for d in &mut self.partials {
            *d = -*d;
        }
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(v: f64) -> DualVector {
        DualVector::variable(v, 0, 2)
    }
    fn y(v: f64) -> DualVector {
        DualVector::variable(v, 1, 2)
    }

    #[test]
    fn product_and_quotient_rules() {
        let p = x(3.0) * y(4.0);
        assert_eq!(p.value, 12.0);
        assert_eq!(p.partials, vec![4.0, 3.0]);
        let q = x(3.0) / y(4.0);
        assert_eq!(q.value, 0.75);
        assert_eq!(q.partials, vec![0.25, -3.0 / 16.0]);
    }

    #[test]
    fn integer_powers() {
        let c = x(2.0).powi(5);
        assert_eq!(c.value, 32.0);
        assert_eq!(c.partials, vec![80.0, 0.0]);
        let r = x(2.0).powi(-2);
        assert_eq!(r.value, 0.25);
        assert_eq!(r.partials, vec![-0.25, 0.0]);
        assert!(x(7.0).powi(0).is_constant());
    }

    #[test]
    fn transcendental() {
        let s = x(0.5).sin();
        assert_eq!(s.partials[0], 0.5f64.cos());
        let e = (x(1.0) * y(2.0)).exp();
        assert!((e.partials[0] - 2.0 * 2f64.exp()).abs() < 1e-15);
        let r = x(4.0).sqrt();
        assert_eq!((r.value, r.partials[0]), (2.0, 0.25));
        let pw = x(2.0).powf(y(3.0));
        assert!((pw.value - 8.0).abs() < 1e-14);
        assert!((pw.partials[0] - 12.0).abs() < 1e-13);
        assert!((pw.partials[1] - 8.0 * 2f64.ln()).abs() < 1e-13);
    }
}
