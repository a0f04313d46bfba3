//! Second-order forward-mode jets in up to three variables.
//!
//! A `Jet` carries a value, its gradient and its Hessian, which is exactly what
//! curvature needs from a metric: Christoffel symbols use first derivatives,
//! the Riemann tensor uses second derivatives.

use std::ops::{Add, Div, Mul, Neg, Sub};

pub const MAX_VARS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub v: f64,
    pub g: [f64; MAX_VARS],
    pub h: [[f64; MAX_VARS]; MAX_VARS],
}

impl Jet {
    pub fn constant(v: f64) -> Self {
        Self {
            v,
            g: [0.0; MAX_VARS],
            h: [[0.0; MAX_VARS]; MAX_VARS],
        }
    }

    /// The coordinate function with index `i`, evaluated at `v`.
    pub fn var(v: f64, i: usize) -> Self {
        let mut j = Self::constant(v);
        j.g[i] = 1.0;
        j
    }

    /// Coordinate jets for a point.
    pub fn point(p: &[f64]) -> Vec<Jet> {
        p.iter().enumerate().map(|(i, &v)| Jet::var(v, i)).collect()
    }

    /// Applies a scalar function given its value and first two derivatives at `self.v`.
    fn chain(self, f: f64, df: f64, d2f: f64) -> Self {
        let mut out = Self::constant(f);
        for i in 0..MAX_VARS {
            out.g[i] = df * self.g[i];
            for k in 0..MAX_VARS {
                out.h[i][k] = d2f * self.g[i] * self.g[k] + df * self.h[i][k];
            }
        }
        out
    }

    pub fn sin(self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.chain(s, c, -s)
    }

    pub fn cos(self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.chain(c, -s, -c)
    }

    pub fn sqrt(self) -> Self {
        let r = self.v.sqrt();
        self.chain(r, 0.5 / r, -0.25 / (r * self.v))
    }

    pub fn exp(self) -> Self {
        let e = self.v.exp();
        self.chain(e, e, e)
    }

    pub fn recip(self) -> Self {
        let r = 1.0 / self.v;
        self.chain(r, -r * r, 2.0 * r * r * r)
    }

    pub fn powi(self, k: i32) -> Self {
        match k {
            0 => Self::constant(1.0),
            1 => self,
            _ => {
                let kf = k as f64;
                self.chain(
                    self.v.powi(k),
                    kf * self.v.powi(k - 1),
                    kf * (kf - 1.0) * self.v.powi(k - 2),
                )
            }
        }
    }

    pub fn scale(self, s: f64) -> Self {
        let mut out = self;
        out.v *= s;
        for i in 0..MAX_VARS {
            out.g[i] *= s;
            for k in 0..MAX_VARS {
                out.h[i][k] *= s;
            }
        }
        out
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        let mut out = self;
        out.v += o.v;
        for i in 0..MAX_VARS {
            out.g[i] += o.g[i];
            for k in 0..MAX_VARS {
                out.h[i][k] += o.h[i][k];
            }
        }
        out
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        self + (-o)
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
    fn mul(self, o: Jet) -> Jet {
        let mut out = Jet::constant(self.v * o.v);
        for i in 0..MAX_VARS {
            out.g[i] = self.g[i] * o.v + self.v * o.g[i];
            for k in 0..MAX_VARS {
                out.h[i][k] = self.h[i][k] * o.v
                    + self.g[i] * o.g[k]
                    + o.g[i] * self.g[k]
                    + self.v * o.h[i][k];
            }
        }
        out
    }
}

impl Div for Jet {
    type Output = Jet;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Jet) -> Jet {
        self * o.recip()
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(self, c: f64) -> Jet {
        let mut out = self;
        out.v += c;
        out
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, c: f64) -> Jet {
        self.scale(c)
    }
}
