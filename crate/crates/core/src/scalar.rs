//! Exact scalar coefficients for the symbolic layer.
//!
//! A [`Scalar`] is a polynomial in the reduced Planck constant with Gaussian
//! rational coefficients, `Σ_k (a_k + i b_k) ħ^k`. Commutator rewriting only
//! ever multiplies coefficients by `i ħ` and rationals, so this ring is closed
//! under everything the engine does and constants like `3iγħ³` are identified
//! exactly instead of as floats.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// A Gaussian rational `re + i·im`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaussianRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussianRational {
    pub fn zero() -> Self {
        Self {
            re: BigRational::zero(),
            im: BigRational::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    fn mul(&self, other: &Self) -> Self {
        Self {
            re: &self.re * &other.re - &self.im * &other.im,
            im: &self.re * &other.im + &self.im * &other.re,
        }
    }

    fn add(&self, other: &Self) -> Self {
        Self {
            re: &self.re + &other.re,
            im: &self.im + &other.im,
        }
    }

    fn neg(&self) -> Self {
        Self {
            re: -self.re.clone(),
            im: -self.im.clone(),
        }
    }

    fn to_complex(&self) -> Complex64 {
        Complex64::new(rational_to_f64(&self.re), rational_to_f64(&self.im))
    }
}

fn rational_to_f64(r: &BigRational) -> f64 {
    // BigRational has no direct f64 conversion; go through the integer parts.
    let numer = bigint_to_f64(r.numer());
    let denom = bigint_to_f64(r.denom());
    numer / denom
}

fn bigint_to_f64(i: &BigInt) -> f64 {
    i.to_string().parse::<f64>().unwrap_or(f64::NAN)
}

/// Exact coefficient: a polynomial in ħ over the Gaussian rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scalar {
    /// Map from ħ-power to coefficient; zero coefficients are never stored.
    terms: BTreeMap<u32, GaussianRational>,
}

impl Scalar {
    pub fn zero() -> Self {
        Self {
            terms: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(
            0,
            GaussianRational {
                re: BigRational::zero(),
                im: BigRational::one(),
            },
        );
        Self { terms }
    }

    /// ħ raised to `pow`.
    pub fn hbar_pow(pow: u32) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(
            pow,
            GaussianRational {
                re: BigRational::one(),
                im: BigRational::zero(),
            },
        );
        Self { terms }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_ratio(n, 1)
    }

    pub fn from_ratio(numer: i64, denom: i64) -> Self {
        assert!(denom != 0, "zero denominator");
        let r = BigRational::new(BigInt::from(numer), BigInt::from(denom));
        Self::from_rational(r)
    }

    pub fn from_rational(r: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !r.is_zero() {
            terms.insert(
                0,
                GaussianRational {
                    re: r,
                    im: BigRational::zero(),
                },
            );
        }
        Self { terms }
    }

    /// Parses a decimal literal such as `3`, `-0.25` or `1e-3` into an exact
    /// rational. Every decimal string is a rational, so nothing is lost.
    pub fn from_decimal_str(s: &str) -> Option<Self> {
        let (sign, s) = match s.strip_prefix('-') {
            Some(rest) => (-1i64, rest),
            None => (1i64, s),
        };
        let magnitude = Self::from_decimal_str_unsigned(s)?;
        Some(if sign < 0 { -&magnitude } else { magnitude })
    }

    fn from_decimal_str_unsigned(s: &str) -> Option<Self> {
        let (mantissa, exp10) = match s.find(['e', 'E']) {
            Some(pos) => {
                let exp: i32 = s[pos + 1..].parse().ok()?;
                (&s[..pos], exp)
            }
            None => (s, 0),
        };
        let (int_part, frac_part) = match mantissa.find('.') {
            Some(pos) => (&mantissa[..pos], &mantissa[pos + 1..]),
            None => (mantissa, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return None;
        }
        let digits = format!("{int_part}{frac_part}");
        let numer: BigInt = digits.parse().ok()?;
        let shift = exp10 - frac_part.len() as i32;
        let ten = BigInt::from(10);
        let r = if shift >= 0 {
            BigRational::from_integer(numer * ten.pow(shift as u32))
        } else {
            BigRational::new(numer, ten.pow((-shift) as u32))
        };
        Some(Self::from_rational(r))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// True when every coefficient has zero imaginary part.
    pub fn is_real(&self) -> bool {
        self.terms.values().all(|c| c.im.is_zero())
    }

    /// Complex conjugate (ħ is real).
    pub fn conj(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(&k, c)| {
                (
                    k,
                    GaussianRational {
                        re: c.re.clone(),
                        im: -c.im.clone(),
                    },
                )
            })
            .collect();
        Self { terms }
    }

    /// Multiplicative inverse, defined only for single ħ-free terms (the
    /// ħ-power grading has no negative exponents).
    pub fn try_inverse(&self) -> Option<Self> {
        if self.terms.len() != 1 {
            return None;
        }
        let (&pow, c) = self.terms.iter().next()?;
        if pow != 0 {
            return None;
        }
        let norm_sq = &c.re * &c.re + &c.im * &c.im;
        if norm_sq.is_zero() {
            return None;
        }
        let mut terms = BTreeMap::new();
        terms.insert(
            0,
            GaussianRational {
                re: &c.re / &norm_sq,
                im: -&c.im / &norm_sq,
            },
        );
        Some(Self { terms })
    }

    /// Evaluates at a numeric value of ħ.
    pub fn eval(&self, hbar: f64) -> Complex64 {
        self.terms
            .iter()
            .map(|(&k, c)| c.to_complex() * hbar.powi(k as i32))
            .sum()
    }

    fn insert_term(&mut self, pow: u32, coeff: GaussianRational) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.get_mut(&pow) {
            Some(existing) => {
                let sum = existing.add(&coeff);
                if sum.is_zero() {
                    self.terms.remove(&pow);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.terms.insert(pow, coeff);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, &GaussianRational)> {
        self.terms.iter().map(|(&k, c)| (k, c))
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        let mut out = self.clone();
        for (&k, c) in &rhs.terms {
            out.insert_term(k, c.clone());
        }
        out
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self + &(-rhs)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            terms: self.terms.iter().map(|(&k, c)| (k, c.neg())).collect(),
        }
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        let mut out = Scalar::zero();
        for (&ka, ca) in &self.terms {
            for (&kb, cb) in &rhs.terms {
                out.insert_term(ka + kb, ca.mul(cb));
            }
        }
        out
    }
}

fn fmt_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&k, c) in &self.terms {
            let mut parts: Vec<String> = Vec::new();
            // Purely real or purely imaginary coefficients print compactly;
            // mixed ones are parenthesized.
            let coeff = if c.im.is_zero() {
                fmt_rational(&c.re)
            } else if c.re.is_zero() {
                if c.im.is_one() {
                    "i".to_string()
                } else if (-c.im.clone()).is_one() {
                    "-i".to_string()
                } else {
                    format!("{}*i", fmt_rational(&c.im))
                }
            } else {
                format!("({}+{}*i)", fmt_rational(&c.re), fmt_rational(&c.im))
            };
            let coeff_is_unit = coeff == "1" && k > 0;
            let coeff_is_neg_unit = coeff == "-1" && k > 0;
            if !coeff_is_unit && !coeff_is_neg_unit {
                parts.push(coeff.clone());
            } else if coeff_is_neg_unit {
                parts.push("-".to_string());
            }
            if k == 1 {
                parts.push("hbar".to_string());
            } else if k > 1 {
                parts.push(format!("hbar^{k}"));
            }
            let term = if parts.len() == 2 && parts[0] == "-" {
                format!("-{}", parts[1])
            } else {
                parts.join("*")
            };
            if first {
                write!(f, "{term}")?;
                first = false;
            } else if let Some(stripped) = term.strip_prefix('-') {
                write!(f, " - {stripped}")?;
            } else {
                write!(f, " + {term}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_parsing_is_exact() {
        let quarter = Scalar::from_decimal_str("0.25").unwrap();
        assert_eq!(quarter, Scalar::from_ratio(1, 4));
        let milli = Scalar::from_decimal_str("1e-3").unwrap();
        assert_eq!(milli, Scalar::from_ratio(1, 1000));
        let mixed = Scalar::from_decimal_str("2.5e2").unwrap();
        assert_eq!(mixed, Scalar::from_int(250));
    }

    #[test]
    fn ring_ops() {
        let i = Scalar::i();
        let minus_one = &i * &i;
        assert_eq!(minus_one, Scalar::from_int(-1));

        let ih = &i * &Scalar::hbar_pow(1);
        let ih_cubed = &(&ih * &ih) * &ih;
        // (iħ)³ = -iħ³
        assert_eq!(ih_cubed, &(-&i) * &Scalar::hbar_pow(3));

        let x = &Scalar::from_ratio(3, 2) + &Scalar::from_ratio(1, 2);
        assert_eq!(x, Scalar::from_int(2));
        assert!((&x - &x).is_zero());
    }

    #[test]
    fn eval_matches_floats() {
        // 3iħ³ at ħ = 2 is 24 i.
        let c = &(&Scalar::from_int(3) * &Scalar::i()) * &Scalar::hbar_pow(3);
        let v = c.eval(2.0);
        assert!((v - Complex64::new(0.0, 24.0)).norm() < 1e-12);
    }

    #[test]
    fn display_round_is_readable() {
        let c = &(&Scalar::from_int(3) * &Scalar::i()) * &Scalar::hbar_pow(3);
        assert_eq!(c.to_string(), "3*i*hbar^3");
        assert_eq!(Scalar::from_ratio(-1, 2).to_string(), "-1/2");
        assert_eq!(Scalar::hbar_pow(1).to_string(), "hbar");
    }
}
