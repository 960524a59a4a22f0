//! Truncated Taylor arithmetic used to differentiate closed-form profiles exactly.

use std::ops::{Add, Mul, Neg, Sub};

/// Number of stored Taylor coefficients; enough for F' and its four derivatives.
pub(crate) const ORDER: usize = 5;

/// `c[k] = f^(k)(x0) / k!` for `k < ORDER`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Jet {
    pub c: [f64; ORDER],
}

const FACTORIAL: [f64; ORDER] = [1.0, 1.0, 2.0, 6.0, 24.0];

impl Jet {
    pub fn constant(v: f64) -> Self {
        let mut c = [0.0; ORDER];
        c[0] = v;
        Jet { c }
    }

    pub fn variable(x: f64) -> Self {
        let mut c = [0.0; ORDER];
        c[0] = x;
        c[1] = 1.0;
        Jet { c }
    }

    /// k-th derivative at the expansion point.
    pub fn derivative(&self, k: usize) -> f64 {
        self.c[k] * FACTORIAL[k]
    }

    pub fn scale(self, s: f64) -> Self {
        let mut c = self.c;
        c.iter_mut().for_each(|v| *v *= s);
        Jet { c }
    }

    pub fn exp(self) -> Self {
        let mut g = [0.0; ORDER];
        g[0] = self.c[0].exp();
        for k in 1..ORDER {
            let mut acc = 0.0;
            for j in 1..=k {
                acc += j as f64 * self.c[j] * g[k - j];
            }
            g[k] = acc / k as f64;
        }
        Jet { c: g }
    }

    pub fn recip(self) -> Self {
        let mut h = [0.0; ORDER];
        h[0] = 1.0 / self.c[0];
        for k in 1..ORDER {
            let mut acc = 0.0;
            for j in 1..=k {
                acc += self.c[j] * h[k - j];
            }
            h[k] = -acc * h[0];
        }
        Jet { c: h }
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        let mut c = self.c;
        for (a, b) in c.iter_mut().zip(rhs.c) {
            *a += b;
        }
        Jet { c }
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        self + (-rhs)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        let mut c = [0.0; ORDER];
        for (i, a) in self.c.iter().enumerate() {
            for (j, b) in rhs.c.iter().enumerate().take(ORDER - i) {
                c[i + j] += a * b;
            }
        }
        Jet { c }
    }
}
