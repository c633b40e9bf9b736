//! Trigonometric exact solutions on the unit tesseract and their exterior
//! derivatives.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use whitney4::proxy4::{curl_from_jacobian, div_from_jacobian, div_skew_from_partials, FormProxy, Mat4, Skew4, Vec4};

use crate::BenchError;

/// The four `H(d)` spaces of the 4D de Rham complex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Space {
    Grad,
    Curl,
    Div4,
    Div,
}

impl Space {
    pub const ALL: [Space; 4] = [Space::Grad, Space::Curl, Space::Div4, Space::Div];

    /// Form degree `k`.
    pub fn degree(self) -> usize {
        match self {
            Space::Grad => 0,
            Space::Curl => 1,
            Space::Div4 => 2,
            Space::Div => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Space::Grad => "grad",
            Space::Curl => "curl",
            Space::Div4 => "div4",
            Space::Div => "div",
        }
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Space {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Space::ALL
            .into_iter()
            .find(|sp| sp.name() == s)
            .ok_or_else(|| BenchError::Config(format!("unknown space '{s}' (expected grad, curl, div4 or div)")))
    }
}

/// `coef · Π_i f_i(π x_i)` with `f_i = sin` where `sines[i]`, else `cos`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrigMonomial {
    pub coef: f64,
    pub sines: [bool; 4],
}

impl TrigMonomial {
    pub const ZERO: TrigMonomial = TrigMonomial { coef: 0.0, sines: [false; 4] };

    /// Builds from a pattern such as `"sccc"` (sine in x1, cosines elsewhere).
    pub fn new(coef: f64, pattern: &str) -> Self {
        let b = pattern.as_bytes();
        debug_assert_eq!(b.len(), 4);
        TrigMonomial { coef, sines: std::array::from_fn(|i| b[i] == b's') }
    }

    pub fn eval(&self, x: &[f64; 4]) -> f64 {
        let mut v = self.coef;
        for i in 0..4 {
            let t = PI * x[i];
            v *= if self.sines[i] { t.sin() } else { t.cos() };
        }
        v
    }

    /// `∂/∂x_j`.
    pub fn partial(&self, j: usize) -> Self {
        let mut out = *self;
        out.sines[j] = !self.sines[j];
        out.coef *= if self.sines[j] { PI } else { -PI };
        out
    }
}

/// An exact solution with its exterior derivative, both as proxies.
#[derive(Clone, Debug)]
pub struct Manufactured {
    pub space: Space,
    /// Components of the proxy of `u` (vector or upper skew entries).
    terms: Vec<TrigMonomial>,
}

fn skew_from(terms: &[TrigMonomial], x: &[f64; 4]) -> Skew4 {
    Skew4::from_upper(std::array::from_fn(|p| terms[p].eval(x)))
}

fn jacobian(terms: &[TrigMonomial], x: &[f64; 4]) -> Mat4 {
    Mat4(std::array::from_fn(|k| std::array::from_fn(|l| terms[l].partial(k).eval(x))))
}

impl Manufactured {
    pub fn u(&self, x: &[f64; 4]) -> FormProxy {
        let t = &self.terms;
        match self.space {
            Space::Grad => FormProxy::Zero(t[0].eval(x)),
            Space::Curl => FormProxy::One(Vec4(std::array::from_fn(|i| t[i].eval(x)))),
            Space::Div4 => FormProxy::Two(skew_from(t, x)),
            Space::Div => FormProxy::Three(Vec4(std::array::from_fn(|i| t[i].eval(x)))),
        }
    }

    pub fn du(&self, x: &[f64; 4]) -> FormProxy {
        let t = &self.terms;
        match self.space {
            Space::Grad => FormProxy::One(Vec4(std::array::from_fn(|j| t[0].partial(j).eval(x)))),
            Space::Curl => FormProxy::Two(curl_from_jacobian(&jacobian(t, x))),
            Space::Div4 => {
                let partials: [Skew4; 4] = std::array::from_fn(|j| {
                    Skew4::from_upper(std::array::from_fn(|p| t[p].partial(j).eval(x)))
                });
                FormProxy::Three(div_skew_from_partials(&partials))
            }
            Space::Div => FormProxy::Four(div_from_jacobian(&jacobian(t, x))),
        }
    }
}

/// The exact solution used for each space.
pub fn manufactured_solution(space: Space) -> Manufactured {
    let m = TrigMonomial::new;
    let terms = match space {
        Space::Grad => vec![m(1.0, "cccc")],
        Space::Curl => vec![m(1.0, "sccc"), m(-1.0, "cscc"), m(1.0, "ccsc"), m(-1.0, "cccs")],
        // upper entries (1,2) (1,3) (1,4) (2,3) (2,4) (3,4)
        Space::Div4 => vec![
            m(1.0, "ccss"),
            m(-1.0, "cscs"),
            m(1.0, "cssc"),
            m(1.0, "sccs"),
            m(-1.0, "scsc"),
            m(1.0, "sscc"),
        ],
        Space::Div => vec![m(1.0, "csss"), m(1.0, "scss"), m(1.0, "sscs"), m(1.0, "sssc")],
    };
    Manufactured { space, terms }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values_at_origin() {
        assert_eq!(manufactured_solution(Space::Grad).u(&[0.0; 4]), FormProxy::Zero(1.0));
        let FormProxy::One(v) = manufactured_solution(Space::Curl).u(&[0.0; 4]) else { panic!() };
        assert!(v.0.iter().all(|&c| c == 0.0));
    }

    #[test]
    fn space_names_round_trip() {
        for s in Space::ALL {
            assert_eq!(s.name().parse::<Space>().unwrap(), s);
        }
        assert!("hcurl".parse::<Space>().is_err());
    }

    #[test]
    fn partial_derivative_of_sine() {
        let t = TrigMonomial::new(2.0, "sccc").partial(0);
        assert_eq!(t.sines, [false; 4]);
        assert!((t.coef - 2.0 * PI).abs() < 1e-15);
    }
}
