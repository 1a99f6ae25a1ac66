//! Commutative polynomials on a classical phase space and the exact
//! symbolic Poisson bracket Σᵢ (∂F/∂qᵢ ∂H/∂pᵢ − ∂H/∂qᵢ ∂F/∂pᵢ).

use super::NCPolynomial;
use crate::scalar::Scalar;
use num_complex::Complex64;
use std::collections::BTreeMap;
use std::fmt;

/// Canonical coordinates: an ordered list of (qᵢ, pᵢ) pairs. The flattened
/// variable order is q₁, …, q_N, p₁, …, p_N.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhaseSpace {
    pairs: Vec<(String, String)>,
}

impl PhaseSpace {
    pub fn new(pairs: Vec<(String, String)>) -> Self {
        Self { pairs }
    }

    /// Single degree of freedom (q, p).
    pub fn single(q: impl Into<String>, p: impl Into<String>) -> Self {
        Self {
            pairs: vec![(q.into(), p.into())],
        }
    }

    pub fn dof(&self) -> usize {
        self.pairs.len()
    }

    pub fn pairs(&self) -> &[(String, String)] {
        &self.pairs
    }

    /// Flattened variable names, positions first.
    pub fn variables(&self) -> Vec<String> {
        let mut vars: Vec<String> = self.pairs.iter().map(|(q, _)| q.clone()).collect();
        vars.extend(self.pairs.iter().map(|(_, p)| p.clone()));
        vars
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.variables().iter().position(|v| v == name)
    }
}

/// A commutative polynomial over a phase space, in normal form: exponent
/// vectors aligned to the flattened variable order, like terms merged.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhaseSpacePolynomial {
    space: PhaseSpace,
    terms: BTreeMap<Vec<u32>, Scalar>,
}

impl PhaseSpacePolynomial {
    pub fn new(space: PhaseSpace) -> Self {
        Self {
            space,
            terms: BTreeMap::new(),
        }
    }

    /// Zero polynomial over variables treated as a degenerate phase space
    /// (positions only); convenient for potentials A(x).
    pub fn zero(position_vars: Vec<String>) -> Self {
        let pairs = position_vars
            .into_iter()
            .map(|q| {
                let p = format!("_conj_{q}");
                (q, p)
            })
            .collect();
        Self::new(PhaseSpace::new(pairs))
    }

    /// coeff · var^pow over a positions-only space; for potentials.
    pub fn monomial(position_vars: Vec<String>, var: &str, pow: u32, coeff: f64) -> Self {
        let mut poly = Self::zero(position_vars);
        let coeff = Scalar::from_decimal_str(&format!("{coeff}"))
            .expect("finite float formats as a decimal");
        let idx = poly.space.index_of(var).expect("variable in space");
        let mut exps = vec![0u32; 2 * poly.space.dof()];
        exps[idx] = pow;
        poly.add_term(exps, coeff);
        poly
    }

    pub fn space(&self) -> &PhaseSpace {
        &self.space
    }

    pub fn variable(space: &PhaseSpace, name: &str) -> Self {
        let mut poly = Self::new(space.clone());
        let idx = space.index_of(name).expect("variable in space");
        let mut exps = vec![0u32; 2 * space.dof()];
        exps[idx] = 1;
        poly.add_term(exps, Scalar::one());
        poly
    }

    pub fn constant(space: &PhaseSpace, c: Scalar) -> Self {
        let mut poly = Self::new(space.clone());
        poly.add_term(vec![0u32; 2 * space.dof()], c);
        poly
    }

    pub fn add_term(&mut self, exponents: Vec<u32>, coeff: Scalar) {
        assert_eq!(exponents.len(), 2 * self.space.dof());
        if coeff.is_zero() {
            return;
        }
        match self.terms.get_mut(&exponents) {
            Some(existing) => {
                let sum = &*existing + &coeff;
                if sum.is_zero() {
                    self.terms.remove(&exponents);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.terms.insert(exponents, coeff);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Scalar)> {
        self.terms.iter()
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.space, other.space, "polynomials share a phase space");
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Self {
            space: self.space.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, factor: &Scalar) -> Self {
        let mut out = Self::new(self.space.clone());
        for (e, c) in &self.terms {
            out.add_term(e.clone(), c * factor);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.space, other.space, "polynomials share a phase space");
        let mut out = Self::new(self.space.clone());
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let exps: Vec<u32> = ea.iter().zip(eb.iter()).map(|(a, b)| a + b).collect();
                out.add_term(exps, ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, exponent: u32) -> Self {
        let mut out = Self::constant(&self.space, Scalar::one());
        for _ in 0..exponent {
            out = out.mul(self);
        }
        out
    }

    /// Exact partial derivative with respect to one variable.
    pub fn partial(&self, var: &str) -> Self {
        let idx = self.space.index_of(var).expect("variable in space");
        let mut out = Self::new(self.space.clone());
        for (exps, coeff) in &self.terms {
            let k = exps[idx];
            if k == 0 {
                continue;
            }
            let mut d = exps.clone();
            d[idx] = k - 1;
            out.add_term(d, coeff * &Scalar::from_int(k as i64));
        }
        out
    }

    /// True when only `var` appears with nonzero exponent.
    pub fn is_univariate_in(&self, var: &str) -> bool {
        let Some(idx) = self.space.index_of(var) else {
            return self.terms.keys().all(|e| e.iter().all(|&k| k == 0));
        };
        self.terms
            .keys()
            .all(|e| e.iter().enumerate().all(|(i, &k)| i == idx || k == 0))
    }

    /// Evaluates a univariate polynomial at a point.
    pub fn eval_single(&self, var: &str, value: f64, hbar: f64) -> Complex64 {
        let mut assignment = BTreeMap::new();
        assignment.insert(var.to_string(), value);
        self.eval(&assignment, hbar)
    }

    /// Numeric evaluation; variables absent from the assignment must not
    /// appear with nonzero exponent.
    pub fn eval(&self, assignment: &BTreeMap<String, f64>, hbar: f64) -> Complex64 {
        let vars = self.space.variables();
        let mut acc = Complex64::new(0.0, 0.0);
        for (exps, coeff) in &self.terms {
            let mut prod = coeff.eval(hbar);
            for (i, &k) in exps.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let value = assignment
                    .get(&vars[i])
                    .unwrap_or_else(|| panic!("no value for variable '{}'", vars[i]));
                prod *= Complex64::new(value.powi(k as i32), 0.0);
            }
            acc += prod;
        }
        acc
    }

    /// Rewrites the commutative polynomial as a noncommutative one with each
    /// monomial laid out in the flattened variable order (positions first).
    pub fn to_noncommutative(&self) -> NCPolynomial {
        let vars = self.space.variables();
        let mut out = NCPolynomial::zero();
        for (exps, coeff) in &self.terms {
            let mut word = Vec::new();
            for (i, &k) in exps.iter().enumerate() {
                for _ in 0..k {
                    word.push(vars[i].clone());
                }
            }
            out.add_term(word, coeff.clone());
        }
        out
    }
}

impl fmt::Display for PhaseSpacePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_noncommutative())
    }
}

/// The exact symbolic Poisson bracket {F, H}.
pub fn poisson_bracket(f: &PhaseSpacePolynomial, h: &PhaseSpacePolynomial) -> PhaseSpacePolynomial {
    assert_eq!(f.space(), h.space(), "brackets need a shared coordinate set");
    let space = f.space().clone();
    let mut acc = PhaseSpacePolynomial::new(space.clone());
    for (q, p) in space.pairs() {
        let term = f
            .partial(q)
            .mul(&h.partial(p))
            .sub(&h.partial(q).mul(&f.partial(p)));
        acc = acc.add(&term);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xp() -> PhaseSpace {
        PhaseSpace::single("x", "px")
    }

    #[test]
    fn bracket_of_position_with_scaled_momentum() {
        // {x, c·px} = c.
        let space = xp();
        let x = PhaseSpacePolynomial::variable(&space, "x");
        let cp = PhaseSpacePolynomial::variable(&space, "px").scale(&Scalar::from_ratio(7, 3));
        let pb = poisson_bracket(&x, &cp);
        assert_eq!(
            pb,
            PhaseSpacePolynomial::constant(&space, Scalar::from_ratio(7, 3))
        );
    }

    #[test]
    fn bracket_cubic_counterexample() {
        // {x³, γ px³} = 9γ x² px².
        let space = xp();
        let gamma = Scalar::from_ratio(1, 5);
        let f = PhaseSpacePolynomial::variable(&space, "x").pow(3);
        let h = PhaseSpacePolynomial::variable(&space, "px")
            .pow(3)
            .scale(&gamma);
        let pb = poisson_bracket(&f, &h);
        let expect = PhaseSpacePolynomial::variable(&space, "x")
            .pow(2)
            .mul(&PhaseSpacePolynomial::variable(&space, "px").pow(2))
            .scale(&(&Scalar::from_int(9) * &gamma));
        assert_eq!(pb, expect);
    }

    #[test]
    fn bracket_is_antisymmetric() {
        let space = xp();
        let x = PhaseSpacePolynomial::variable(&space, "x");
        let p = PhaseSpacePolynomial::variable(&space, "px");
        let f = x.pow(2).mul(&p).add(&p.pow(3).scale(&Scalar::from_ratio(1, 2)));
        assert!(poisson_bracket(&f, &f).is_zero());
        let g = x.mul(&p.pow(2)).sub(&x.pow(3));
        let fg = poisson_bracket(&f, &g);
        let gf = poisson_bracket(&g, &f);
        assert_eq!(fg, gf.neg());
    }

    #[test]
    fn two_degrees_of_freedom() {
        // {q1·p2, p1·q2} picks up both pairs: ∂/∂q1 ∂/∂p1 and ∂/∂q2 ∂/∂p2.
        let space = PhaseSpace::new(vec![
            ("q1".into(), "p1".into()),
            ("q2".into(), "p2".into()),
        ]);
        let f = PhaseSpacePolynomial::variable(&space, "q1")
            .mul(&PhaseSpacePolynomial::variable(&space, "p2"));
        let h = PhaseSpacePolynomial::variable(&space, "p1")
            .mul(&PhaseSpacePolynomial::variable(&space, "q2"));
        let pb = poisson_bracket(&f, &h);
        // {q1 p2, p1 q2} = p2 q2 − q1 p1.
        let expect = PhaseSpacePolynomial::variable(&space, "q2")
            .mul(&PhaseSpacePolynomial::variable(&space, "p2"))
            .sub(
                &PhaseSpacePolynomial::variable(&space, "q1")
                    .mul(&PhaseSpacePolynomial::variable(&space, "p1")),
            );
        assert_eq!(pb, expect);
    }

    #[test]
    fn univariate_detection_and_eval() {
        let a = PhaseSpacePolynomial::monomial(vec!["x".into()], "x", 2, 1.5);
        assert!(a.is_univariate_in("x"));
        let v = a.eval_single("x", 2.0, 1.0);
        assert!((v.re - 6.0).abs() < 1e-14 && v.im == 0.0);
    }
}
