//! Sparse multivariate polynomials with integer coefficients.
//!
//! Terms are kept in a `BTreeMap` keyed by [`Monomial`], whose ordering is
//! graded reverse lexicographic. Printing walks the map from the largest
//! monomial down, so two equal polynomials always print identically.
//!
//! Jet coefficients are computed by substituting each variable `x_i` with the
//! truncated series `x_i + x_i(1) t + ... + x_i(k) t^k` and reading off the
//! coefficient of `t^u`. Nothing is divided, so the construction works in
//! every characteristic.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::residue::{Modulus, Residue};

/// Exponent vector, one entry per variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn degree(&self) -> u64 {
        self.0.iter().map(|&e| e as u64).sum()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl Ord for Monomial {
    // Graded reverse lexicographic: higher total degree is larger; among equal
    // degrees, the monomial with the smaller exponent in the last differing
    // variable is larger.
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            for (a, b) in self.0.iter().zip(&other.0).rev() {
                if a != b {
                    return b.cmp(a);
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A polynomial in an ordered list of named variables with `BigInt`
/// coefficients. Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntPoly {
    vars: Vec<String>,
    terms: BTreeMap<Monomial, BigInt>,
}

impl IntPoly {
    pub fn zero(vars: &[String]) -> Self {
        IntPoly {
            vars: vars.to_vec(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: &[String], c: impl Into<BigInt>) -> Self {
        let mut p = IntPoly::zero(vars);
        p.add_term(Monomial::one(vars.len()), c.into());
        p
    }

    pub fn variable(vars: &[String], index: usize) -> Self {
        let mut e = Monomial::one(vars.len());
        e.0[index] = 1;
        let mut p = IntPoly::zero(vars);
        p.add_term(e, BigInt::one());
        p
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs, merging
    /// duplicates and dropping zeros.
    pub fn from_terms<I>(vars: &[String], terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, BigInt)>,
    {
        let mut p = IntPoly::zero(vars);
        for (exps, c) in terms {
            if exps.len() != vars.len() {
                return Err(Error::invalid(format!(
                    "exponent vector of length {} for {} variables",
                    exps.len(),
                    vars.len()
                )));
            }
            p.add_term(Monomial(exps), c);
        }
        Ok(p)
    }

    fn add_term(&mut self, m: Monomial, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms from the largest monomial down.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter().rev()
    }

    /// Total degree; `-1` for the zero polynomial.
    pub fn degree(&self) -> i64 {
        self.terms
            .keys()
            .next_back()
            .map_or(-1, |m| m.degree() as i64)
    }

    pub fn constant_term(&self) -> BigInt {
        self.terms
            .get(&Monomial::one(self.nvars()))
            .cloned()
            .unwrap_or_default()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    fn assert_same_ring(&self, other: &IntPoly) {
        assert_eq!(
            self.vars, other.vars,
            "polynomial arithmetic across different variable lists"
        );
    }

    pub fn scale(&self, c: &BigInt) -> IntPoly {
        if c.is_zero() {
            return IntPoly::zero(&self.vars);
        }
        IntPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn pow(&self, exp: u32) -> IntPoly {
        let mut acc = IntPoly::constant(&self.vars, 1);
        for _ in 0..exp {
            acc = &acc * self;
        }
        acc
    }

    /// Re-expresses the polynomial over `new_vars`, which must contain every
    /// variable that actually occurs. Variables are matched by name.
    pub fn with_vars(&self, new_vars: &[String]) -> Result<IntPoly> {
        let map: Vec<Option<usize>> = self
            .vars
            .iter()
            .map(|v| new_vars.iter().position(|w| w == v))
            .collect();
        let mut out = IntPoly::zero(new_vars);
        for (m, c) in &self.terms {
            let mut e = vec![0u32; new_vars.len()];
            for (i, &x) in m.0.iter().enumerate() {
                if x == 0 {
                    continue;
                }
                let j = map[i].ok_or_else(|| Error::UnknownVariable {
                    name: self.vars[i].clone(),
                    pos: 0,
                })?;
                e[j] += x;
            }
            out.add_term(Monomial(e), c.clone());
        }
        Ok(out)
    }

    /// Indices of variables with a nonzero exponent somewhere.
    pub fn support(&self) -> Vec<usize> {
        (0..self.nvars())
            .filter(|&i| self.terms.keys().any(|m| m.0[i] > 0))
            .collect()
    }

    pub fn partial_derivative(&self, var: &str) -> Result<IntPoly> {
        let i = self.var_index(var).ok_or_else(|| Error::UnknownVariable {
            name: var.to_string(),
            pos: 0,
        })?;
        Ok(self.derivative_at(i))
    }

    pub fn derivative_at(&self, i: usize) -> IntPoly {
        let mut out = IntPoly::zero(&self.vars);
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut d = m.clone();
            d.0[i] -= 1;
            out.add_term(d, c * BigInt::from(e));
        }
        out
    }

    /// Substitutes fixed integers for some variables and drops them from the
    /// variable list.
    pub fn specialize(&self, assignments: &[(usize, BigInt)]) -> IntPoly {
        let keep: Vec<usize> = (0..self.nvars())
            .filter(|i| !assignments.iter().any(|(j, _)| j == i))
            .collect();
        let vars: Vec<String> = keep.iter().map(|&i| self.vars[i].clone()).collect();
        let mut out = IntPoly::zero(&vars);
        for (m, c) in &self.terms {
            let mut coeff = c.clone();
            for (j, val) in assignments {
                coeff *= num_traits::pow(val.clone(), m.0[*j] as usize);
            }
            let e: Vec<u32> = keep.iter().map(|&i| m.0[i]).collect();
            out.add_term(Monomial(e), coeff);
        }
        out
    }

    /// Exact evaluation over the integers.
    pub fn eval_exact(&self, point: &[BigInt]) -> BigInt {
        assert_eq!(point.len(), self.nvars());
        let mut acc = BigInt::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(&m.0) {
                if e > 0 {
                    t *= num_traits::pow(x.clone(), e as usize);
                }
            }
            acc += t;
        }
        acc
    }

    /// Evaluates in `Z/p^k`, reducing after every operation.
    pub fn eval_mod(&self, point: &[Residue], modulus: Modulus) -> Result<Residue> {
        if point.len() != self.nvars() {
            return Err(Error::invalid(format!(
                "point has {} coordinates, polynomial has {} variables",
                point.len(),
                self.nvars()
            )));
        }
        for r in point {
            if r.modulus() != modulus {
                return Err(Error::ModulusMismatch {
                    expected: modulus.value(),
                    found: r.modulus().value(),
                });
            }
        }
        let values: Vec<u64> = point.iter().map(|r| r.value()).collect();
        Ok(modulus.residue(ModPoly::new(self, modulus.value()).eval(&values)))
    }

    /// Parses `text` over the given variable list; see the crate README for
    /// the grammar.
    pub fn parse(text: &str, vars: &[String]) -> Result<IntPoly> {
        Parser::new(text, vars).parse()
    }
}

impl Add for &IntPoly {
    type Output = IntPoly;
    fn add(self, rhs: &IntPoly) -> IntPoly {
        self.assert_same_ring(rhs);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &IntPoly {
    type Output = IntPoly;
    fn sub(self, rhs: &IntPoly) -> IntPoly {
        self.assert_same_ring(rhs);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

impl Neg for &IntPoly {
    type Output = IntPoly;
    fn neg(self) -> IntPoly {
        IntPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Mul for &IntPoly {
    type Output = IntPoly;
    fn mul(self, rhs: &IntPoly) -> IntPoly {
        self.assert_same_ring(rhs);
        let mut out = IntPoly::zero(&self.vars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (idx, (m, c)) in self.terms().enumerate() {
            let neg = c.is_negative();
            match (idx, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let abs = c.abs();
            let factors: Vec<String> = m
                .0
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| {
                    if e == 1 {
                        self.vars[i].clone()
                    } else {
                        format!("{}^{}", self.vars[i], e)
                    }
                })
                .collect();
            if factors.is_empty() {
                write!(f, "{abs}")?;
            } else {
                if !abs.is_one() {
                    write!(f, "{abs}*")?;
                }
                f.write_str(&factors.join("*"))?;
            }
        }
        Ok(())
    }
}

/// Name of the level-`level` jet variable attached to `name`.
pub fn jet_var_name(name: &str, level: u32) -> String {
    if level == 0 {
        name.to_string()
    } else {
        format!("{name}({level})")
    }
}

/// Jet variables up to depth `k`, grouped by base variable:
/// `x, x(1), ..., x(k), y, y(1), ...`.
pub fn jet_variables(vars: &[String], k: u32) -> Vec<String> {
    vars.iter()
        .flat_map(|v| (0..=k).map(move |level| jet_var_name(v, level)))
        .collect()
}

/// Position of `x_i(level)` in [`jet_variables`] at depth `k`.
pub fn jet_var_index(i: usize, level: u32, k: u32) -> usize {
    i * (k as usize + 1) + level as usize
}

type Series = Vec<IntPoly>;

fn series_mul(a: &Series, b: &Series) -> Series {
    let len = a.len();
    let vars = a[0].vars().to_vec();
    let mut out: Series = vec![IntPoly::zero(&vars); len];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b[..len - i].iter().enumerate() {
            if y.is_zero() {
                continue;
            }
            out[i + j] = &out[i + j] + &(x * y);
        }
    }
    out
}

/// All jet coefficients `f^(0), ..., f^(k)` over the level-major jet variables.
pub fn jet_expansion(f: &IntPoly, k: u32) -> Series {
    let m = f.nvars();
    let jvars = jet_variables(f.vars(), k);
    let len = k as usize + 1;
    let mut result: Series = vec![IntPoly::zero(&jvars); len];

    // powers[i][e] = (x_i + x_i(1) t + ...)^e truncated at t^k
    let mut powers: Vec<Vec<Series>> = Vec::with_capacity(m);
    for i in 0..m {
        let max_e = f.terms.keys().map(|mono| mono.0[i]).max().unwrap_or(0);
        let base: Series = (0..len)
            .map(|level| IntPoly::variable(&jvars, jet_var_index(i, level as u32, k)))
            .collect();
        let mut one: Series = vec![IntPoly::zero(&jvars); len];
        one[0] = IntPoly::constant(&jvars, 1);
        let mut list = vec![one];
        for e in 1..=max_e as usize {
            let next = series_mul(&list[e - 1], &base);
            list.push(next);
        }
        powers.push(list);
    }

    for (mono, c) in &f.terms {
        let mut acc: Option<Series> = None;
        for (i, &e) in mono.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            let factor = &powers[i][e as usize];
            acc = Some(match acc {
                None => factor.clone(),
                Some(a) => series_mul(&a, factor),
            });
        }
        let series = acc.unwrap_or_else(|| {
            let mut one: Series = vec![IntPoly::zero(&jvars); len];
            one[0] = IntPoly::constant(&jvars, 1);
            one
        });
        for (u, coeff) in series.iter().enumerate() {
            if !coeff.is_zero() {
                result[u] = &result[u] + &coeff.scale(c);
            }
        }
    }
    result
}

/// The `u`-th jet coefficient of `f` at truncation depth `k`: the raw
/// coefficient of `t^u` after substituting `x_i -> sum_j x_i(j) t^j`.
pub fn jet_coefficient(f: &IntPoly, u: u32, k: u32) -> Result<IntPoly> {
    if u > k {
        return Err(Error::JetOrder { order: u, depth: k });
    }
    Ok(jet_expansion(f, k).swap_remove(u as usize))
}

/// A polynomial with coefficients reduced modulo a fixed integer, laid out for
/// fast repeated evaluation.
#[derive(Clone, Debug)]
pub struct ModPoly {
    modulus: u64,
    terms: Vec<(u64, Vec<(usize, u32)>)>,
}

impl ModPoly {
    pub fn new(f: &IntPoly, modulus: u64) -> Self {
        let big_m = BigInt::from(modulus);
        let terms = f
            .terms()
            .filter_map(|(m, c)| {
                let c = c.mod_floor(&big_m).to_u64().expect("reduced coefficient fits");
                if c == 0 {
                    return None;
                }
                let factors = m
                    .0
                    .iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .map(|(i, &e)| (i, e))
                    .collect();
                Some((c, factors))
            })
            .collect();
        ModPoly { modulus, terms }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    #[inline]
    pub fn eval(&self, point: &[u64]) -> u64 {
        let m = self.modulus as u128;
        let mut acc: u128 = 0;
        for (c, factors) in &self.terms {
            let mut t = *c as u128;
            for &(i, e) in factors {
                let mut base = point[i] as u128 % m;
                let mut e = e;
                let mut pw: u128 = 1;
                while e > 0 {
                    if e & 1 == 1 {
                        pw = pw * base % m;
                    }
                    base = base * base % m;
                    e >>= 1;
                }
                t = t * pw % m;
            }
            acc = (acc + t) % m;
        }
        acc as u64
    }
}

struct Parser<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
    vars: &'a [String],
}

impl<'a> Parser<'a> {
    fn new(src: &'a str, vars: &'a [String]) -> Self {
        Parser {
            src,
            bytes: src.as_bytes(),
            pos: 0,
            vars,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn parse(mut self) -> Result<IntPoly> {
        let mut out = IntPoly::zero(self.vars);
        if self.peek().is_none() {
            return Err(Error::parse(self.pos, "empty polynomial"));
        }
        let mut sign = BigInt::one();
        match self.peek() {
            Some(b'-') => {
                sign = -sign;
                self.pos += 1;
            }
            Some(b'+') => self.pos += 1,
            _ => {}
        }
        loop {
            let (m, c) = self.term()?;
            out.add_term(m, c * &sign);
            match self.peek() {
                None => break,
                Some(b'+') => {
                    self.pos += 1;
                    sign = BigInt::one();
                }
                Some(b'-') => {
                    self.pos += 1;
                    sign = -BigInt::one();
                }
                Some(ch) => {
                    return Err(Error::parse(
                        self.pos,
                        format!("expected '+' or '-', found '{}'", ch as char),
                    ))
                }
            }
        }
        Ok(out)
    }

    fn term(&mut self) -> Result<(Monomial, BigInt)> {
        let mut mono = Monomial::one(self.vars.len());
        let mut coeff = BigInt::one();
        let mut need_factor;
        match self.peek() {
            Some(ch) if ch.is_ascii_digit() => {
                coeff = self.integer()?;
                match self.peek() {
                    Some(b'*') => {
                        self.pos += 1;
                        need_factor = true;
                    }
                    Some(ch) if ch.is_ascii_alphabetic() => need_factor = true,
                    _ => return Ok((mono, coeff)),
                }
            }
            Some(ch) if ch.is_ascii_alphabetic() => need_factor = true,
            Some(ch) => {
                return Err(Error::parse(
                    self.pos,
                    format!("expected a term, found '{}'", ch as char),
                ))
            }
            None => return Err(Error::parse(self.pos, "expected a term, found end of input")),
        }
        while need_factor {
            let (idx, e) = self.factor()?;
            mono.0[idx] = mono.0[idx]
                .checked_add(e)
                .ok_or_else(|| Error::parse(self.pos, "exponent overflow"))?;
            need_factor = false;
            if self.peek() == Some(b'*') {
                self.pos += 1;
                need_factor = true;
            }
        }
        Ok((mono, coeff))
    }

    fn integer(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        self.src[start..self.pos]
            .parse::<BigInt>()
            .map_err(|_| Error::parse(start, "expected an integer"))
    }

    fn factor(&mut self) -> Result<(usize, u32)> {
        self.skip_ws();
        let start = self.pos;
        match self.bytes.get(self.pos) {
            Some(ch) if ch.is_ascii_alphabetic() => {}
            Some(ch) => {
                return Err(Error::parse(
                    start,
                    format!("expected a variable, found '{}'", *ch as char),
                ))
            }
            None => return Err(Error::parse(start, "expected a variable, found end of input")),
        }
        while self.pos < self.bytes.len()
            && (self.bytes[self.pos].is_ascii_alphanumeric() || self.bytes[self.pos] == b'_')
        {
            self.pos += 1;
        }
        let mut name = self.src[start..self.pos].to_string();
        // jet level suffix, e.g. x1(2)
        if self.peek() == Some(b'(') {
            self.pos += 1;
            let lvl_start = self.pos;
            self.skip_ws();
            let digits_start = self.pos;
            while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            let level: u32 = self.src[digits_start..self.pos]
                .parse()
                .map_err(|_| Error::parse(lvl_start, "expected a jet level"))?;
            if self.peek() != Some(b')') {
                return Err(Error::parse(self.pos, "expected ')' after jet level"));
            }
            self.pos += 1;
            // x(0) is the same variable as x
            name = jet_var_name(&name, level);
        }
        let idx = self
            .vars
            .iter()
            .position(|v| *v == name)
            .ok_or_else(|| Error::UnknownVariable {
                name: name.clone(),
                pos: start,
            })?;
        let mut exp = 1u32;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let e_start = self.pos;
            while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            let digits = &self.src[e_start..self.pos];
            if digits.is_empty() {
                return Err(Error::parse(e_start, "expected a natural exponent"));
            }
            exp = digits
                .parse()
                .map_err(|_| Error::parse(e_start, "exponent overflow"))?;
        }
        Ok((idx, exp))
    }
}

/// Convenience for building variable lists in code and tests.
pub fn var_list(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(text: &str, vars: &[&str]) -> IntPoly {
        IntPoly::parse(text, &var_list(vars)).unwrap()
    }

    #[test]
    fn parse_reads_terms() {
        let f = p("x^2 + y^2 + z^2", &["x", "y", "z"]);
        assert_eq!(f.num_terms(), 3);
        assert!(f.terms().all(|(_, c)| c.is_one()));

        let g = p("x*y^2", &["x", "y"]);
        let (m, c) = g.terms().next().unwrap();
        assert_eq!(m.exponents(), &[1, 2]);
        assert!(c.is_one());

        assert!(p("0", &["x"]).is_zero());
        assert_eq!(p("0", &["x"]).degree(), -1);
    }

    #[test]
    fn parse_errors_carry_positions() {
        let vars = var_list(&["x", "y"]);
        assert_eq!(
            IntPoly::parse("x + w", &vars),
            Err(Error::UnknownVariable {
                name: "w".into(),
                pos: 4
            })
        );
        assert!(matches!(
            IntPoly::parse("x + * y", &vars),
            Err(Error::Parse { pos: 4, .. })
        ));
        assert!(matches!(
            IntPoly::parse("x^99999999999", &vars),
            Err(Error::Parse { pos: 2, .. })
        ));
        assert!(matches!(IntPoly::parse("x y", &vars), Err(Error::Parse { .. })));
        assert!(matches!(IntPoly::parse("", &vars), Err(Error::Parse { .. })));
    }

    #[test]
    fn parse_accepts_grammar_variants() {
        let vars = var_list(&["x", "y"]);
        let a = IntPoly::parse("-3*x^2*y + 2x - 7", &vars).unwrap();
        assert_eq!(a.to_string(), "-3*x^2*y + 2*x - 7");
        let b = IntPoly::parse("  x * x ", &vars).unwrap();
        assert_eq!(b.to_string(), "x^2");
        assert!(IntPoly::parse("x - x", &vars).unwrap().is_zero());
    }

    #[test]
    fn eval_mod_examples() {
        let m9 = Modulus::new(3, 2).unwrap();
        let f = p("x^2", &["x"]);
        assert_eq!(f.eval_mod(&[m9.residue(3)], m9).unwrap().value(), 0);

        let m5 = Modulus::new(5, 1).unwrap();
        let g = p("x*y^2", &["x", "y"]);
        let pt = [m5.residue(1), m5.residue(2)];
        assert_eq!(g.eval_mod(&pt, m5).unwrap().value(), 4);

        let m3 = Modulus::new(3, 1).unwrap();
        let h = p("x^2 + y^2 + z^2", &["x", "y", "z"]);
        let pt = [m3.residue(1), m3.residue(2), m3.residue(2)];
        // independent route: exact integer value 9, reduced afterwards
        let exact = h.eval_exact(&[1.into(), 2.into(), 2.into()]);
        assert_eq!(exact, BigInt::from(9));
        assert_eq!(h.eval_mod(&pt, m3).unwrap().value(), 0);

        let bad = [m3.residue(1), m5.residue(2), m3.residue(2)];
        assert!(matches!(h.eval_mod(&bad, m3), Err(Error::ModulusMismatch { .. })));
    }

    #[test]
    fn jet_coefficient_examples() {
        let f = p("x1*x2^2", &["x1", "x2"]);
        assert_eq!(
            jet_coefficient(&f, 1, 1).unwrap().to_string(),
            "x1(1)*x2^2 + 2*x1*x2*x2(1)"
        );

        let sq = p("x^2", &["x"]);
        let j2 = jet_coefficient(&sq, 2, 2).unwrap();
        let expected = IntPoly::parse("2*x*x(2) + x(1)^2", &jet_variables(sq.vars(), 2)).unwrap();
        assert_eq!(j2, expected);

        let j0 = jet_coefficient(&f, 0, 2).unwrap();
        assert_eq!(j0, f.with_vars(&jet_variables(f.vars(), 2)).unwrap());

        assert_eq!(
            jet_coefficient(&f, 3, 2),
            Err(Error::JetOrder { order: 3, depth: 2 })
        );
    }

    #[test]
    fn partial_derivative_examples() {
        let x = var_list(&["x"]);
        let xy = var_list(&["x", "y"]);
        assert_eq!(
            p("x^2", &["x"]).partial_derivative("x").unwrap(),
            IntPoly::parse("2x", &x).unwrap()
        );
        assert_eq!(
            p("x*y^2", &["x", "y"]).partial_derivative("y").unwrap(),
            IntPoly::parse("2*x*y", &xy).unwrap()
        );
        assert!(p("7", &["x"]).partial_derivative("x").unwrap().is_zero());
        assert!(p("x", &["x"]).partial_derivative("z").is_err());
    }

    #[test]
    fn specialize_substitutes_parameters() {
        let f = p("u^2 - c", &["u", "c"]);
        let g = f.specialize(&[(1, BigInt::from(3))]);
        assert_eq!(g.vars(), &["u".to_string()]);
        assert_eq!(g.to_string(), "u^2 - 3");
    }

    // --- property tests -------------------------------------------------

    fn arb_poly(nvars: usize, max_deg: u32) -> impl Strategy<Value = IntPoly> {
        let names: Vec<String> = (0..nvars).map(|i| format!("x{i}")).collect();
        prop::collection::vec(
            (prop::collection::vec(0..=max_deg, nvars), -5i64..=5),
            0..5,
        )
        .prop_map(move |terms| {
            IntPoly::from_terms(
                &names,
                terms.into_iter().map(|(e, c)| (e, BigInt::from(c))),
            )
            .unwrap()
        })
    }

    /// Dense univariate polynomials in t with BigInt coefficients.
    fn upoly_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        out
    }

    /// Independent route: evaluate f at x_i = sum_j a_ij t^j as a polynomial in t.
    fn substitute_series(f: &IntPoly, series: &[Vec<BigInt>]) -> Vec<BigInt> {
        let mut total = vec![BigInt::zero()];
        for (m, c) in f.terms() {
            let mut t = vec![c.clone()];
            for (i, &e) in m.exponents().iter().enumerate() {
                for _ in 0..e {
                    t = upoly_mul(&t, &series[i]);
                }
            }
            if t.len() > total.len() {
                total.resize(t.len(), BigInt::zero());
            }
            for (i, v) in t.into_iter().enumerate() {
                total[i] += v;
            }
        }
        total
    }

    proptest! {
        #[test]
        fn substitution_identity(
            f in arb_poly(2, 3),
            k in 0u32..=3,
            seed in prop::collection::vec(-4i64..=4, 8),
        ) {
            let m = f.nvars();
            let series: Vec<Vec<BigInt>> = (0..m)
                .map(|i| (0..=k as usize).map(|j| BigInt::from(seed[(i * 4 + j) % 8])).collect())
                .collect();
            let jets = jet_expansion(&f, k);
            let point: Vec<BigInt> = series.iter().flat_map(|s| s.iter().cloned()).collect();
            let expected = substitute_series(&f, &series);
            for u in 0..=k as usize {
                let want = expected.get(u).cloned().unwrap_or_default();
                prop_assert_eq!(jets[u].eval_exact(&point), want);
            }
        }

        #[test]
        fn product_rule_order_one(f in arb_poly(2, 2), g in arb_poly(2, 2), k in 1u32..=2) {
            let jv = jet_variables(f.vars(), k);
            let lhs = jet_coefficient(&(&f * &g), 1, k).unwrap();
            let f0 = f.with_vars(&jv).unwrap();
            let g0 = g.with_vars(&jv).unwrap();
            let rhs = &(&jet_coefficient(&f, 1, k).unwrap() * &g0)
                + &(&f0 * &jet_coefficient(&g, 1, k).unwrap());
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn first_jet_is_gradient_pairing(f in arb_poly(3, 3), k in 1u32..=3) {
            let jv = jet_variables(f.vars(), k);
            let m = f.nvars();
            let mut want = IntPoly::zero(&jv);
            for i in 0..m {
                let d = f.derivative_at(i).with_vars(&jv).unwrap();
                want = &want + &(&d * &IntPoly::variable(&jv, jet_var_index(i, 1, k)));
            }
            prop_assert_eq!(jet_coefficient(&f, 1, k).unwrap(), want);
        }

        #[test]
        fn eval_mod_is_ring_homomorphism(
            f in arb_poly(2, 3),
            g in arb_poly(2, 3),
            a in 0u64..125,
            b in 0u64..125,
        ) {
            let md = Modulus::new(5, 3).unwrap();
            let pt = [md.residue(a), md.residue(b)];
            let ef = f.eval_mod(&pt, md).unwrap();
            let eg = g.eval_mod(&pt, md).unwrap();
            prop_assert_eq!((&f + &g).eval_mod(&pt, md).unwrap(), ef.try_add(eg).unwrap());
            prop_assert_eq!((&f * &g).eval_mod(&pt, md).unwrap(), ef.try_mul(eg).unwrap());
        }

        #[test]
        fn print_parse_round_trip(f in arb_poly(3, 4)) {
            let text = f.to_string();
            let back = IntPoly::parse(&text, f.vars()).unwrap();
            prop_assert_eq!(&back, &f);
            prop_assert_eq!(back.to_string(), text);
        }
    }
}
