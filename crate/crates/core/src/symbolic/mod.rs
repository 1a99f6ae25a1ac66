//! Noncommutative polynomial algebra over observable symbols: expansion,
//! simplicity classification, and normal ordering against a table of
//! commutation facts.
//!
//! Words are ordered sequences of symbol names; coefficients are exact
//! (see [`crate::scalar::Scalar`]), so identities like the scalar gap of the
//! bracket counterexample come out as rationals, not floats.

pub mod parse;
pub mod phase_space;
pub mod transcribe;

use crate::scalar::Scalar;
use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum SymbolRole {
    Position,
    Momentum,
    AngularMomentum,
    Generic,
}

/// A classical observable symbol. Identity is the name; the remaining fields
/// are annotations carried for reporting.
#[derive(Debug, Clone)]
pub struct ObservableSymbol {
    pub name: String,
    pub role: SymbolRole,
    pub time_tag: Option<f64>,
    pub frame_tag: Option<String>,
}

impl ObservableSymbol {
    pub fn new(name: impl Into<String>, role: SymbolRole) -> Self {
        Self {
            name: name.into(),
            role,
            time_tag: None,
            frame_tag: None,
        }
    }

    pub fn generic(name: impl Into<String>) -> Self {
        Self::new(name, SymbolRole::Generic)
    }
}

/// An ordered product of symbol names. The empty word is the scalar term.
pub type Word = Vec<String>;

pub fn word_to_string(word: &[String]) -> String {
    if word.is_empty() {
        return "1".to_string();
    }
    // Merge adjacent repeats into powers for readability.
    let mut parts: Vec<String> = Vec::new();
    let mut idx = 0;
    while idx < word.len() {
        let mut run = 1;
        while idx + run < word.len() && word[idx + run] == word[idx] {
            run += 1;
        }
        if run == 1 {
            parts.push(word[idx].clone());
        } else {
            parts.push(format!("{}^{run}", word[idx]));
        }
        idx += run;
    }
    parts.join("*")
}

#[derive(Debug, Error)]
pub enum SymbolicError {
    #[error("unknown symbol '{0}'")]
    UnknownSymbol(String),
    #[error("symbols '{left}' and '{right}' do not commute and have no scalar commutator; normal ordering is undefined here")]
    NonScalarCommutator { left: String, right: String },
    #[error("not simple: word {} mixes non-commuting symbols", word_to_string(.witness))]
    NotSimple { witness: Word },
    #[error("binding disagrees with declared commutation: ||[{left}, {right}]|| = {residual:.3e}")]
    BindingMismatch {
        left: String,
        right: String,
        residual: f64,
    },
    #[error("symbol '{0}' has no bound operator")]
    UnboundSymbol(String),
    #[error("polynomial must be univariate, found symbols {0:?}")]
    NotUnivariate(Vec<String>),
    #[error("transcribed matrix deviates from Hermitian by {deviation:.3e}")]
    NotHermitianResult { deviation: f64 },
    #[error("bound operators disagree on dimension or hbar: {0}")]
    InconsistentBinding(String),
}

/// A noncommutative polynomial: finite map from words to exact coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct NCPolynomial {
    terms: BTreeMap<Word, Scalar>,
}

impl NCPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn scalar(c: Scalar) -> Self {
        let mut p = Self::zero();
        p.add_term(Vec::new(), c);
        p
    }

    pub fn one() -> Self {
        Self::scalar(Scalar::one())
    }

    pub fn symbol(name: impl Into<String>) -> Self {
        let mut p = Self::zero();
        p.add_term(vec![name.into()], Scalar::one());
        p
    }

    pub fn add_term(&mut self, word: Word, coeff: Scalar) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.get_mut(&word) {
            Some(existing) => {
                let sum = &*existing + &coeff;
                if sum.is_zero() {
                    self.terms.remove(&word);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.terms.insert(word, coeff);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Scalar)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Coefficient of the empty word.
    pub fn constant_part(&self) -> Scalar {
        self.terms
            .get(&Vec::new())
            .cloned()
            .unwrap_or_else(Scalar::zero)
    }

    /// True when the polynomial is a multiple of the empty word.
    pub fn is_scalar(&self) -> bool {
        self.terms.keys().all(|w| w.is_empty())
    }

    pub fn symbols(&self) -> BTreeSet<String> {
        self.terms.keys().flat_map(|w| w.iter().cloned()).collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(w, c)| (w.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, factor: &Scalar) -> Self {
        let mut out = Self::zero();
        for (w, c) in &self.terms {
            out.add_term(w.clone(), c * factor);
        }
        out
    }

    /// Product preserving word order: words concatenate left-to-right.
    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (wa, ca) in &self.terms {
            for (wb, cb) in &other.terms {
                let mut word = wa.clone();
                word.extend(wb.iter().cloned());
                out.add_term(word, ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, exponent: u32) -> Self {
        let mut out = Self::one();
        for _ in 0..exponent {
            out = out.mul(self);
        }
        out
    }

    /// Commutator of polynomials, [f, g] = fg − gf.
    pub fn commutator(&self, other: &Self) -> Self {
        self.mul(other).sub(&other.mul(self))
    }

    /// Replaces every occurrence of a symbol by an exact scalar value.
    pub fn substitute_scalar(&self, name: &str, value: &Scalar) -> Self {
        let mut out = Self::zero();
        for (word, coeff) in &self.terms {
            let mut coeff = coeff.clone();
            let mut reduced = Vec::with_capacity(word.len());
            for sym in word {
                if sym == name {
                    coeff = &coeff * value;
                } else {
                    reduced.push(sym.clone());
                }
            }
            out.add_term(reduced, coeff);
        }
        out
    }

    /// Numeric evaluation with every symbol assigned a real value; symbol
    /// order is irrelevant here because values are scalars.
    pub fn eval_numeric(
        &self,
        assignment: &BTreeMap<String, f64>,
        hbar: f64,
    ) -> num_complex::Complex64 {
        let mut acc = num_complex::Complex64::new(0.0, 0.0);
        for (word, coeff) in &self.terms {
            let mut prod = coeff.eval(hbar);
            for sym in word {
                let value = assignment
                    .get(sym)
                    .unwrap_or_else(|| panic!("no value assigned to symbol '{sym}'"));
                prod *= num_complex::Complex64::new(*value, 0.0);
            }
            acc += prod;
        }
        acc
    }
}

impl fmt::Display for NCPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (word, coeff) in &self.terms {
            let coeff_str = coeff.to_string();
            // Multi-term exact coefficients get parenthesized so the printed
            // form re-parses to the same polynomial.
            let coeff_str = if coeff.terms().count() > 1 {
                format!("({coeff_str})")
            } else {
                coeff_str
            };
            let body = if word.is_empty() {
                coeff_str
            } else if coeff_str == "1" {
                word_to_string(word)
            } else if coeff_str == "-1" {
                format!("-{}", word_to_string(word))
            } else {
                format!("{coeff_str}*{}", word_to_string(word))
            };
            if first {
                write!(f, "{body}")?;
                first = false;
            } else if let Some(stripped) = body.strip_prefix('-') {
                write!(f, " - {stripped}")?;
            } else {
                write!(f, " + {body}")?;
            }
        }
        Ok(())
    }
}

/// Expression tree over symbols and exact scalars; [`expand`] flattens it.
#[derive(Debug, Clone)]
pub enum NCExpr {
    Scalar(Scalar),
    Symbol(String),
    Sum(Vec<NCExpr>),
    Product(Vec<NCExpr>),
    Power(Box<NCExpr>, u32),
    Negate(Box<NCExpr>),
}

/// Distributes products over sums, preserving word order, and returns the
/// stored normal form (like terms merged, zero coefficients dropped).
pub fn expand(expr: &NCExpr) -> NCPolynomial {
    match expr {
        NCExpr::Scalar(c) => NCPolynomial::scalar(c.clone()),
        NCExpr::Symbol(name) => NCPolynomial::symbol(name.clone()),
        NCExpr::Sum(items) => items
            .iter()
            .fold(NCPolynomial::zero(), |acc, item| acc.add(&expand(item))),
        NCExpr::Product(items) => items
            .iter()
            .fold(NCPolynomial::one(), |acc, item| acc.mul(&expand(item))),
        NCExpr::Power(base, exponent) => expand(base).pow(*exponent),
        NCExpr::Negate(inner) => expand(inner).neg(),
    }
}

/// Pairwise commutation facts plus scalar canonical commutators.
///
/// Pairs not declared commuting are treated as non-commuting; the relation is
/// reflexive (every symbol commutes with itself).
#[derive(Debug, Clone, Default)]
pub struct CommutationContext {
    symbols: BTreeMap<String, ObservableSymbol>,
    commuting: BTreeSet<(String, String)>,
    /// Stored with declared order: key (a, b) means [a, b] = scalar.
    canonical: BTreeMap<(String, String), Scalar>,
}

impl CommutationContext {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn declare(&mut self, symbol: ObservableSymbol) {
        self.symbols.insert(symbol.name.clone(), symbol);
    }

    pub fn knows(&self, name: &str) -> bool {
        self.symbols.contains_key(name)
    }

    pub fn symbol(&self, name: &str) -> Option<&ObservableSymbol> {
        self.symbols.get(name)
    }

    pub fn symbols(&self) -> impl Iterator<Item = &ObservableSymbol> {
        self.symbols.values()
    }

    fn check_known(&self, name: &str) -> Result<(), SymbolicError> {
        if self.knows(name) {
            Ok(())
        } else {
            Err(SymbolicError::UnknownSymbol(name.to_string()))
        }
    }

    fn pair_key(a: &str, b: &str) -> (String, String) {
        if a <= b {
            (a.to_string(), b.to_string())
        } else {
            (b.to_string(), a.to_string())
        }
    }

    pub fn declare_commuting(&mut self, a: &str, b: &str) -> Result<(), SymbolicError> {
        self.check_known(a)?;
        self.check_known(b)?;
        self.commuting.insert(Self::pair_key(a, b));
        Ok(())
    }

    /// Declares [a, b] = scalar; this also marks the pair non-commuting.
    pub fn declare_canonical(&mut self, a: &str, b: &str, value: Scalar) -> Result<(), SymbolicError> {
        self.check_known(a)?;
        self.check_known(b)?;
        self.commuting.remove(&Self::pair_key(a, b));
        self.canonical.insert((a.to_string(), b.to_string()), value);
        Ok(())
    }

    pub fn commutes(&self, a: &str, b: &str) -> Result<bool, SymbolicError> {
        self.check_known(a)?;
        self.check_known(b)?;
        if a == b {
            return Ok(true);
        }
        Ok(self.commuting.contains(&Self::pair_key(a, b)))
    }

    /// Scalar value of [a, b] when declared (in either order).
    pub fn canonical_commutator(&self, a: &str, b: &str) -> Option<Scalar> {
        if let Some(value) = self.canonical.get(&(a.to_string(), b.to_string())) {
            return Some(value.clone());
        }
        self.canonical
            .get(&(b.to_string(), a.to_string()))
            .map(|value| -value)
    }

    /// Declared-commuting pairs, for numeric cross-checks.
    pub fn commuting_pairs(&self) -> impl Iterator<Item = (&str, &str)> {
        self.commuting.iter().map(|(a, b)| (a.as_str(), b.as_str()))
    }
}

/// Outcome of the simplicity test; the witness is one offending word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Simplicity {
    Simple,
    NotSimple { witness: Word },
}

impl Simplicity {
    pub fn is_simple(&self) -> bool {
        matches!(self, Simplicity::Simple)
    }
}

/// A polynomial is simple when no word mixes two distinct symbols whose
/// operators do not commute. This is the admissibility condition for
/// transcription: checked on the stored expansion, not the expression tree.
pub fn is_simple(f: &NCPolynomial, ctx: &CommutationContext) -> Result<Simplicity, SymbolicError> {
    for name in f.symbols() {
        ctx.check_known(&name)?;
    }
    for (word, _) in f.terms() {
        let distinct: BTreeSet<&String> = word.iter().collect();
        let names: Vec<&String> = distinct.into_iter().collect();
        for (idx, a) in names.iter().enumerate() {
            for b in &names[idx + 1..] {
                if !ctx.commutes(a, b)? {
                    return Ok(Simplicity::NotSimple {
                        witness: word.clone(),
                    });
                }
            }
        }
    }
    Ok(Simplicity::Simple)
}

/// A total order on symbol names used as the normal-ordering target.
#[derive(Debug, Clone, Default)]
pub struct SymbolOrder {
    rank: BTreeMap<String, usize>,
}

impl SymbolOrder {
    /// Explicit order: earlier names sort first.
    pub fn from_sequence<S: AsRef<str>>(names: &[S]) -> Self {
        let rank = names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.as_ref().to_string(), i))
            .collect();
        Self { rank }
    }

    /// Default order: positions before momenta before angular momenta before
    /// generic symbols, alphabetical within a role.
    pub fn position_before_momentum(ctx: &CommutationContext) -> Self {
        let mut names: Vec<&ObservableSymbol> = ctx.symbols().collect();
        names.sort_by(|a, b| (a.role, &a.name).cmp(&(b.role, &b.name)));
        Self::from_sequence(&names.iter().map(|s| s.name.as_str()).collect::<Vec<_>>())
    }

    pub fn cmp(&self, a: &str, b: &str) -> Ordering {
        match (self.rank.get(a), self.rank.get(b)) {
            (Some(ra), Some(rb)) => ra.cmp(rb),
            (Some(_), None) => Ordering::Less,
            (None, Some(_)) => Ordering::Greater,
            (None, None) => a.cmp(b),
        }
    }
}

/// Rewrites every word into the target symbol order using s₂s₁ → s₁s₂ − [s₁,s₂]
/// for non-commuting pairs with scalar commutators (plain swaps for commuting
/// pairs). With scalar commutators the rewrite system is confluent, so the
/// result does not depend on the rewrite sequence.
pub fn normal_order(
    f: &NCPolynomial,
    ctx: &CommutationContext,
    order: &SymbolOrder,
) -> Result<NCPolynomial, SymbolicError> {
    let mut result = NCPolynomial::zero();
    let mut queue: VecDeque<(Word, Scalar)> = f
        .terms()
        .map(|(w, c)| (w.clone(), c.clone()))
        .collect();

    while let Some((word, coeff)) = queue.pop_front() {
        // Find the first adjacent inversion.
        let mut inversion = None;
        for i in 0..word.len().saturating_sub(1) {
            if order.cmp(&word[i], &word[i + 1]) == Ordering::Greater {
                inversion = Some(i);
                break;
            }
        }
        let Some(i) = inversion else {
            result.add_term(word, coeff);
            continue;
        };
        let hi = word[i].clone();
        let lo = word[i + 1].clone();
        let mut swapped = word.clone();
        swapped.swap(i, i + 1);
        if ctx.commutes(&hi, &lo)? {
            queue.push_back((swapped, coeff));
        } else {
            // hi·lo = lo·hi + [hi, lo] with a scalar commutator.
            let Some(comm) = ctx.canonical_commutator(&hi, &lo) else {
                return Err(SymbolicError::NonScalarCommutator {
                    left: hi,
                    right: lo,
                });
            };
            let mut shorter = word.clone();
            shorter.drain(i..=i + 1);
            queue.push_back((swapped, coeff.clone()));
            queue.push_back((shorter, &coeff * &comm));
        }
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn canonical_xp() -> CommutationContext {
        let mut ctx = CommutationContext::new();
        ctx.declare(ObservableSymbol::new("x", SymbolRole::Position));
        ctx.declare(ObservableSymbol::new("px", SymbolRole::Momentum));
        let ih = &Scalar::i() * &Scalar::hbar_pow(1);
        ctx.declare_canonical("x", "px", ih).unwrap();
        ctx
    }

    #[test]
    fn binomial_expansion_without_commuting() {
        // (A+B)² = A² + AB + BA + B².
        let a = NCExpr::Symbol("A".into());
        let b = NCExpr::Symbol("B".into());
        let expr = NCExpr::Power(Box::new(NCExpr::Sum(vec![a, b])), 2);
        let p = expand(&expr);
        assert_eq!(p.num_terms(), 4);
        assert_eq!(p.to_string(), "A^2 + A*B + B*A + B^2");
    }

    #[test]
    fn expansion_cancels_common_terms() {
        // A(B+C) − AB = AC.
        let expr = NCExpr::Sum(vec![
            NCExpr::Product(vec![
                NCExpr::Symbol("A".into()),
                NCExpr::Sum(vec![NCExpr::Symbol("B".into()), NCExpr::Symbol("C".into())]),
            ]),
            NCExpr::Negate(Box::new(NCExpr::Product(vec![
                NCExpr::Symbol("A".into()),
                NCExpr::Symbol("B".into()),
            ]))),
        ]);
        let p = expand(&expr);
        assert_eq!(p.to_string(), "A*C");
    }

    #[test]
    fn expand_matches_naive_recursive_oracle() {
        // Oracle: multiply term lists recursively without merging, then merge
        // at the very end; must agree with the incremental expansion.
        fn oracle(expr: &NCExpr) -> Vec<(Word, Scalar)> {
            match expr {
                NCExpr::Scalar(c) => vec![(Vec::new(), c.clone())],
                NCExpr::Symbol(s) => vec![(vec![s.clone()], Scalar::one())],
                NCExpr::Sum(items) => items.iter().flat_map(oracle).collect(),
                NCExpr::Product(items) => {
                    let mut acc: Vec<(Word, Scalar)> = vec![(Vec::new(), Scalar::one())];
                    for item in items {
                        let rhs = oracle(item);
                        let mut next = Vec::new();
                        for (wa, ca) in &acc {
                            for (wb, cb) in &rhs {
                                let mut w = wa.clone();
                                w.extend(wb.iter().cloned());
                                next.push((w, ca * cb));
                            }
                        }
                        acc = next;
                    }
                    acc
                }
                NCExpr::Power(base, n) => {
                    let unrolled =
                        NCExpr::Product((0..*n).map(|_| (**base).clone()).collect());
                    oracle(&unrolled)
                }
                NCExpr::Negate(inner) => oracle(inner)
                    .into_iter()
                    .map(|(w, c)| (w, -&c))
                    .collect(),
            }
        }

        // Random-ish degree-3 tree over three symbols.
        let expr = NCExpr::Product(vec![
            NCExpr::Sum(vec![
                NCExpr::Symbol("A".into()),
                NCExpr::Product(vec![
                    NCExpr::Scalar(Scalar::from_ratio(2, 3)),
                    NCExpr::Symbol("B".into()),
                ]),
            ]),
            NCExpr::Sum(vec![
                NCExpr::Symbol("C".into()),
                NCExpr::Negate(Box::new(NCExpr::Symbol("A".into()))),
            ]),
            NCExpr::Sum(vec![
                NCExpr::Scalar(Scalar::one()),
                NCExpr::Symbol("B".into()),
            ]),
        ]);
        let fast = expand(&expr);
        let mut slow = NCPolynomial::zero();
        for (w, c) in oracle(&expr) {
            slow.add_term(w, c);
        }
        assert_eq!(fast, slow);
    }

    #[test]
    fn simplicity_classification() {
        let mut ctx = CommutationContext::new();
        ctx.declare(ObservableSymbol::generic("A"));
        ctx.declare(ObservableSymbol::generic("B"));
        // A and B deliberately not declared commuting.

        // f = f1(A) + f2(B) is simple even with non-commuting operators.
        let f = NCPolynomial::symbol("A")
            .pow(2)
            .add(&NCPolynomial::symbol("B").pow(3));
        assert!(is_simple(&f, &ctx).unwrap().is_simple());

        // f = A·B is not; the witness is the offending word.
        let g = NCPolynomial::symbol("A").mul(&NCPolynomial::symbol("B"));
        match is_simple(&g, &ctx).unwrap() {
            Simplicity::NotSimple { witness } => {
                assert_eq!(witness, vec!["A".to_string(), "B".to_string()]);
            }
            Simplicity::Simple => panic!("A*B must not be simple"),
        }
    }

    #[test]
    fn bracket_counterexample_is_not_simple() {
        // 9γ x²px² mixes the canonical pair.
        let ctx = canonical_xp();
        let f = NCPolynomial::symbol("x")
            .pow(2)
            .mul(&NCPolynomial::symbol("px").pow(2))
            .scale(&Scalar::from_int(9));
        assert!(!is_simple(&f, &ctx).unwrap().is_simple());
    }

    #[test]
    fn unknown_symbol_is_reported() {
        let ctx = canonical_xp();
        let f = NCPolynomial::symbol("y");
        assert!(matches!(
            is_simple(&f, &ctx),
            Err(SymbolicError::UnknownSymbol(_))
        ));
    }

    #[test]
    fn normal_order_single_swap() {
        // px·x = x·px − iħ.
        let ctx = canonical_xp();
        let order = SymbolOrder::position_before_momentum(&ctx);
        let f = NCPolynomial::symbol("px").mul(&NCPolynomial::symbol("x"));
        let no = normal_order(&f, &ctx, &order).unwrap();
        let ih = &Scalar::i() * &Scalar::hbar_pow(1);
        let expect = NCPolynomial::symbol("x")
            .mul(&NCPolynomial::symbol("px"))
            .sub(&NCPolynomial::scalar(ih));
        assert_eq!(no, expect);
    }

    #[test]
    fn normal_order_px2_x2() {
        // px²x² = x²px² − 4iħ·x·px − 2ħ² (two-step hand rewrite).
        let ctx = canonical_xp();
        let order = SymbolOrder::position_before_momentum(&ctx);
        let f = NCPolynomial::symbol("px")
            .pow(2)
            .mul(&NCPolynomial::symbol("x").pow(2));
        let no = normal_order(&f, &ctx, &order).unwrap();

        let x = NCPolynomial::symbol("x");
        let px = NCPolynomial::symbol("px");
        let ih = &Scalar::i() * &Scalar::hbar_pow(1);
        let four_ih = &Scalar::from_int(4) * &ih;
        let two_h2 = &Scalar::from_int(2) * &Scalar::hbar_pow(2);
        let expect = x
            .pow(2)
            .mul(&px.pow(2))
            .sub(&x.mul(&px).scale(&four_ih))
            .sub(&NCPolynomial::scalar(two_h2));
        assert_eq!(no, expect);
    }

    #[test]
    fn normal_order_is_idempotent_and_fixes_ordered_words() {
        let ctx = canonical_xp();
        let order = SymbolOrder::position_before_momentum(&ctx);
        let f = NCPolynomial::symbol("x")
            .pow(3)
            .mul(&NCPolynomial::symbol("px"))
            .add(&NCPolynomial::symbol("x").scale(&Scalar::from_ratio(1, 2)));
        let once = normal_order(&f, &ctx, &order).unwrap();
        assert_eq!(once, f, "already-ordered input must be unchanged");
        let twice = normal_order(&once, &ctx, &order).unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn normal_order_requires_scalar_commutator() {
        let mut ctx = CommutationContext::new();
        ctx.declare(ObservableSymbol::generic("A"));
        ctx.declare(ObservableSymbol::generic("B"));
        let order = SymbolOrder::from_sequence(&["A", "B"]);
        let f = NCPolynomial::symbol("B").mul(&NCPolynomial::symbol("A"));
        assert!(matches!(
            normal_order(&f, &ctx, &order),
            Err(SymbolicError::NonScalarCommutator { .. })
        ));
    }

    #[test]
    fn normal_order_confluence_across_scan_orders() {
        // The same polynomial pushed through with a reversed queue guard:
        // compare against ordering term-by-term in isolation and summing.
        let ctx = canonical_xp();
        let order = SymbolOrder::position_before_momentum(&ctx);
        let x = NCPolynomial::symbol("x");
        let px = NCPolynomial::symbol("px");
        let f = px.pow(3).mul(&x.pow(3)).add(&px.pow(2).mul(&x));
        let whole = normal_order(&f, &ctx, &order).unwrap();
        let mut summed = NCPolynomial::zero();
        for (w, c) in f.terms() {
            let mut single = NCPolynomial::zero();
            single.add_term(w.clone(), c.clone());
            summed = summed.add(&normal_order(&single, &ctx, &order).unwrap());
        }
        assert_eq!(whole, summed);
    }
}
