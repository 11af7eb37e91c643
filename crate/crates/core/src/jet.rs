//! Truncated Taylor expansions at a point, used to differentiate the
//! catalog coefficients exactly up to third order.

use std::ops::{Add, Div, Mul, Neg, Sub};

const N: usize = 4;

/// Taylor coefficients `f^(k)(x0) / k!` for `k < 4`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Jet([f64; N]);

impl Jet {
    pub fn constant(v: f64) -> Self {
        Jet([v, 0.0, 0.0, 0.0])
    }

    /// The independent variable at `x0`.
    pub fn var(x0: f64) -> Self {
        Jet([x0, 1.0, 0.0, 0.0])
    }

    pub fn value(&self) -> f64 {
        self.0[0]
    }

    /// k-th derivative, `k < 4`.
    pub fn nth(&self, k: usize) -> f64 {
        let fact = [1.0, 1.0, 2.0, 6.0];
        self.0[k] * fact[k]
    }

    /// Derivative as a jet; the top coefficient is lost.
    pub fn deriv(&self) -> Self {
        let c = &self.0;
        Jet([c[1], 2.0 * c[2], 3.0 * c[3], f64::NAN])
    }

    pub fn sqrt(&self) -> Self {
        let a = &self.0;
        let mut s = [0.0; N];
        s[0] = a[0].sqrt();
        for k in 1..N {
            let mut acc = a[k];
            for j in 1..k {
                acc -= s[j] * s[k - j];
            }
            s[k] = acc / (2.0 * s[0]);
        }
        Jet(s)
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        Jet(std::array::from_fn(|k| self.0[k] + o.0[k]))
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        Jet(std::array::from_fn(|k| self.0[k] - o.0[k]))
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet(self.0.map(|v| -v))
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        Jet(std::array::from_fn(|k| (0..=k).map(|j| self.0[j] * o.0[k - j]).sum()))
    }
}

impl Div for Jet {
    type Output = Jet;
    fn div(self, o: Jet) -> Jet {
        let mut q = [0.0; N];
        for k in 0..N {
            let mut acc = self.0[k];
            for j in 0..k {
                acc -= q[j] * o.0[k - j];
            }
            q[k] = acc / o.0[0];
        }
        Jet(q)
    }
}

macro_rules! scalar_ops {
    ($($tr:ident $f:ident),*) => {$(
        impl $tr<f64> for Jet {
            type Output = Jet;
            fn $f(self, o: f64) -> Jet { self.$f(Jet::constant(o)) }
        }
        impl $tr<Jet> for f64 {
            type Output = Jet;
            fn $f(self, o: Jet) -> Jet { Jet::constant(self).$f(o) }
        }
    )*};
}
scalar_ops!(Add add, Sub sub, Mul mul, Div div);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_derivatives() {
        let x = Jet::var(0.3);
        // f = x^2 / (1 - x)
        let f = x * x / (1.0 - x);
        let exact = |k: usize| match k {
            0 => 0.09 / 0.7,
            1 => (2.0 * 0.3 - 0.09) / 0.49,
            2 => 2.0 / 0.343,
            _ => 6.0 / 0.2401,
        };
        for k in 0..4 {
            assert!((f.nth(k) - exact(k)).abs() < 1e-12 * exact(k).abs(), "k={k}");
        }
    }

    #[test]
    fn sqrt_derivatives() {
        let s = Jet::var(4.0).sqrt();
        assert!((s.nth(1) - 0.25).abs() < 1e-15);
        assert!((s.nth(2) + 1.0 / 32.0).abs() < 1e-15);
        assert!((s.nth(3) - 3.0 / 8.0 * 4f64.powf(-2.5)).abs() < 1e-15);
    }

    #[test]
    fn deriv_shifts() {
        let x = Jet::var(2.0);
        let f = x * x * x;
        let d = f.deriv();
        assert_eq!(d.value(), 12.0);
        assert_eq!(d.nth(1), 12.0);
        assert_eq!(d.nth(2), 6.0);
        assert!(((1.0 / x).nth(1) + 0.25).abs() < 1e-15);
    }
}
