//! Presburger constructible functions in one natural variable `s`, with a
//! symbolic base `q`:
//!
//! `f(s) = sum_i c_i * q^(alpha_i(s)) * prod_j beta_ij(s) * prod_j 1/(1 - q^(a_ij))`
//!
//! Text format, one function per line:
//!
//! ```text
//! f      ::= term {('+' | '-') term} [';' domain]
//! term   ::= ['-'] factor {'*' factor}
//! factor ::= rational | 's' ['^' nat] | 'q' '^' ('(' affine ')' | int | 's')
//!          | 'geom' '(' int {',' int} ')' | '(' affine ')'
//! affine ::= ['-'] aterm {('+' | '-') aterm}     e.g. 2s-1, s/2, -s+3
//! domain ::= 's' '>=' nat ['mod' nat nat]
//! ```

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::count::count_points_tree;
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::scheme::AffineScheme;

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// `slope * s + offset`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Affine {
    pub slope: BigRational,
    pub offset: BigRational,
}

impl Affine {
    pub fn new(slope: BigRational, offset: BigRational) -> Self {
        Affine { slope, offset }
    }

    pub fn constant(v: i64) -> Self {
        Affine::new(BigRational::zero(), rat(v))
    }

    pub fn s() -> Self {
        Affine::new(BigRational::one(), BigRational::zero())
    }

    pub fn linear(u: i64, v: i64) -> Self {
        Affine::new(rat(u), rat(v))
    }

    pub fn eval(&self, s: i64) -> BigRational {
        &self.slope * rat(s) + &self.offset
    }

    fn is_pure_s(&self) -> bool {
        self.slope.is_one() && self.offset.is_zero()
    }
}

impl fmt::Display for Affine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut wrote = false;
        if !self.slope.is_zero() {
            let (n, d) = (self.slope.numer(), self.slope.denom());
            let sign = if n.is_negative() { "-" } else { "" };
            let mag = n.abs();
            if mag.is_one() {
                write!(f, "{sign}s")?;
            } else {
                write!(f, "{sign}{mag}s")?;
            }
            if !d.is_one() {
                write!(f, "/{d}")?;
            }
            wrote = true;
        }
        if !self.offset.is_zero() || !wrote {
            let o = &self.offset;
            if wrote {
                write!(f, "{}", if o.is_negative() { "-" } else { "+" })?;
                write!(f, "{}", o.abs())?;
            } else {
                write!(f, "{o}")?;
            }
        }
        Ok(())
    }
}

/// `{ s >= start : s = residue (mod modulus) }`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Domain {
    pub start: i64,
    pub modulus: i64,
    pub residue: i64,
}

impl Domain {
    pub fn naturals() -> Self {
        Domain {
            start: 0,
            modulus: 1,
            residue: 0,
        }
    }

    pub fn new(start: i64, modulus: i64, residue: i64) -> Result<Self> {
        if start < 0 {
            return Err(Error::invalid("domain start must be a natural number"));
        }
        if modulus < 1 || residue < 0 || residue >= modulus {
            return Err(Error::invalid(format!(
                "domain progression needs r >= 1 and 0 <= c < r, got r = {modulus}, c = {residue}"
            )));
        }
        Ok(Domain {
            start,
            modulus,
            residue,
        })
    }

    pub fn contains(&self, s: i64) -> bool {
        s >= self.start && (s - self.residue).rem_euclid(self.modulus) == 0
    }

    /// Least domain point `>= bound`.
    pub fn first_at_least(&self, bound: i64) -> i64 {
        let b = bound.max(self.start);
        b + (self.residue - b).rem_euclid(self.modulus)
    }

    pub fn first(&self) -> i64 {
        self.first_at_least(self.start)
    }

    /// Domain points in `[first, upto]`.
    pub fn points_upto(&self, upto: i64) -> impl Iterator<Item = i64> + '_ {
        let first = self.first();
        (0..)
            .map(move |i| first + i * self.modulus)
            .take_while(move |&s| s <= upto)
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s >= {} mod {} {}", self.start, self.modulus, self.residue)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub coeff: BigRational,
    pub alpha: Affine,
    pub betas: Vec<Affine>,
    pub geoms: Vec<i64>,
}

impl Term {
    pub fn new(coeff: BigRational, alpha: Affine, mut betas: Vec<Affine>, mut geoms: Vec<i64>) -> Self {
        betas.sort();
        geoms.sort();
        Term {
            coeff,
            alpha,
            betas,
            geoms,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstructibleFunction {
    pub domain: Domain,
    pub terms: Vec<Term>,
}

fn integer_valued(a: &Affine, d: &Domain) -> bool {
    (&a.slope * rat(d.modulus)).is_integer() && a.eval(d.first()).is_integer()
}

impl ConstructibleFunction {
    pub fn new(domain: Domain, terms: Vec<Term>) -> Result<Self> {
        for t in &terms {
            if t.geoms.contains(&0) {
                return Err(Error::invalid("geometric-series exponent must be nonzero"));
            }
            if !integer_valued(&t.alpha, &domain) {
                return Err(Error::invalid(format!(
                    "exponent {} is not integer-valued on {domain}",
                    t.alpha
                )));
            }
            if let Some(b) = t.betas.iter().find(|b| !integer_valued(b, &domain)) {
                return Err(Error::invalid(format!("factor ({b}) is not integer-valued on {domain}")));
            }
        }
        let terms = terms.into_iter().filter(|t| !t.coeff.is_zero()).collect();
        Ok(ConstructibleFunction { domain, terms })
    }

    pub fn parse(text: &str) -> Result<Self> {
        Parser::new(text).function()
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut factors: Vec<String> = Vec::new();
        let c = self.coeff.abs();
        let s_power = self.betas.iter().filter(|b| b.is_pure_s()).count();
        match s_power {
            0 => {}
            1 => factors.push("s".into()),
            n => factors.push(format!("s^{n}")),
        }
        for b in self.betas.iter().filter(|b| !b.is_pure_s()) {
            factors.push(format!("({b})"));
        }
        if self.alpha != Affine::constant(0) {
            factors.push(format!("q^({})", self.alpha));
        }
        if !self.geoms.is_empty() {
            let list: Vec<String> = self.geoms.iter().map(|a| a.to_string()).collect();
            factors.push(format!("geom({})", list.join(",")));
        }
        if !c.is_one() || factors.is_empty() {
            factors.insert(0, c.to_string());
        }
        write!(f, "{}", factors.join(" * "))
    }
}

impl fmt::Display for ConstructibleFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            write!(f, "0")?;
        }
        for (i, t) in self.terms.iter().enumerate() {
            let neg = t.coeff.is_negative();
            match (i, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            write!(f, "{t}")?;
        }
        write!(f, " ; {}", self.domain)
    }
}

fn qpow(q: &BigRational, e: &BigRational) -> BigRational {
    let e = e.to_integer().to_i32().expect("exponent fits in i32");
    if e >= 0 {
        num_traits::pow(q.clone(), e as usize)
    } else {
        num_traits::pow(q.recip(), e.unsigned_abs() as usize)
    }
}

fn check_q(q: &BigRational) -> Result<()> {
    if *q <= BigRational::one() {
        return Err(Error::invalid(format!("q must exceed 1, got {q}")));
    }
    Ok(())
}

fn eval_term(t: &Term, q: &BigRational, s: i64) -> BigRational {
    let mut v = &t.coeff * qpow(q, &t.alpha.eval(s));
    for b in &t.betas {
        v *= b.eval(s);
    }
    for &a in &t.geoms {
        v /= BigRational::one() - qpow(q, &rat(a));
    }
    v
}

/// Exact value of `f` at `(q, s)`.
pub fn eval_constructible(f: &ConstructibleFunction, q: &BigRational, s: i64) -> Result<BigRational> {
    check_q(q)?;
    if !f.domain.contains(s) {
        return Err(Error::invalid(format!("s = {s} is outside {}", f.domain)));
    }
    Ok(f.terms.iter().map(|t| eval_term(t, q, s)).sum())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NonNeg {
    Yes,
    Unknown,
    Counterexample { s: i64, q: BigRational, value: BigRational },
}

/// Sign of an affine factor over the whole domain: `Some(1)` for `>= 0`,
/// `Some(-1)` for `<= 0`, `None` when it changes sign.
fn affine_sign(b: &Affine, d: &Domain) -> Option<i32> {
    let at_start = b.eval(d.first());
    match b.slope.cmp(&BigRational::zero()) {
        Ordering::Equal | Ordering::Greater if !at_start.is_negative() => Some(1),
        Ordering::Equal | Ordering::Less if !at_start.is_positive() => Some(-1),
        _ => None,
    }
}

fn term_sign(t: &Term, d: &Domain) -> Option<i32> {
    let mut sign = if t.coeff.is_negative() { -1 } else { 1 };
    for b in &t.betas {
        sign *= affine_sign(b, d)?;
    }
    for &a in &t.geoms {
        if a > 0 {
            sign = -sign;
        }
    }
    Some(sign)
}

/// `s` runs over domain points up to this bound and `q` over [`GRID_Q`].
pub const GRID_S_MAX: i64 = 16;
/// Grid values of `q`, searched in this order for each `s`.
pub const GRID_Q: [(i64, i64); 4] = [(2, 1), (3, 1), (5, 1), (3, 2)];

/// Yes when every term is non-negative by the sign rule, a counterexample
/// when the grid finds a negative value, unknown otherwise.
pub fn classify_nonneg(f: &ConstructibleFunction) -> NonNeg {
    if f.terms.iter().all(|t| term_sign(t, &f.domain) == Some(1)) {
        return NonNeg::Yes;
    }
    for s in f.domain.points_upto(GRID_S_MAX) {
        for (n, d) in GRID_Q {
            let q = BigRational::new(n.into(), d.into());
            let value = eval_constructible(f, &q, s).expect("grid point is valid");
            if value.is_negative() {
                return NonNeg::Counterexample { s, q, value };
            }
        }
    }
    NonNeg::Unknown
}

/// One summand `c * s^a * q^(alpha(s))` of the normal form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalTerm {
    pub coeff: BigRational,
    pub s_power: u32,
    pub alpha: Affine,
}

impl NormalTerm {
    pub fn eval(&self, q: &BigRational, s: i64) -> BigRational {
        &self.coeff * num_traits::pow(rat(s), self.s_power as usize) * qpow(q, &self.alpha.eval(s))
    }
}

/// Folds `f` at fixed `q` into `sum c_i s^(a_i) q^(alpha_i(s))`. Every factor
/// beta must be a constant or a multiple of `s`.
pub fn normal_form(f: &ConstructibleFunction, q: &BigRational) -> Result<Vec<NormalTerm>> {
    check_q(q)?;
    f.terms
        .iter()
        .map(|t| {
            let mut coeff = t.coeff.clone();
            let mut s_power = 0u32;
            for b in &t.betas {
                if b.slope.is_zero() {
                    coeff *= &b.offset;
                } else if b.offset.is_zero() {
                    coeff *= &b.slope;
                    s_power += 1;
                } else {
                    return Err(Error::Refused(format!(
                        "factor ({b}) is not a monomial in s; the supremum is only computed for monomial factor products"
                    )));
                }
            }
            for &a in &t.geoms {
                coeff /= BigRational::one() - qpow(q, &rat(a));
            }
            Ok(NormalTerm {
                coeff,
                s_power,
                alpha: t.alpha.clone(),
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Supremum {
    Bounded {
        sup: BigRational,
        argmax: i64,
        /// Every normal-form term is non-increasing from here on.
        tail_bound: i64,
    },
    Unbounded {
        term: usize,
        witness_s: i64,
        witness_value: BigRational,
    },
}

pub const UNBOUNDED_THRESHOLD: i64 = 1_000_000;

/// Exact supremum of `f` over its domain at fixed `q`.
///
/// Unbounded iff some positive normal-form term has `b > 0`, or `b = 0` and
/// `a > 0`, where `b` is the slope of its exponent. Otherwise each term
/// `s^a q^(b s)` with `b < 0` is non-increasing once
/// `s >= a / (|b| ln q)`; the rational bound `1/ln q <= (q+1)/(2(q-1))` turns
/// this into an exact tail point, and the maximum is taken over the finitely
/// many domain points before it, ties going to the smallest `s`.
pub fn sup_over_domain(f: &ConstructibleFunction, q: &BigRational) -> Result<Supremum> {
    check_q(q)?;
    if classify_nonneg(f) != NonNeg::Yes {
        return Err(Error::Refused(
            "the supremum is only computed for functions the sign rule proves non-negative".into(),
        ));
    }
    let nf = normal_form(f, q)?;
    if let Some(t) = nf.iter().find(|t| t.coeff.is_negative()) {
        return Err(Error::Refused(format!(
            "normal-form coefficient {} is negative",
            t.coeff
        )));
    }
    for (i, t) in nf.iter().enumerate() {
        if t.coeff.is_zero() {
            continue;
        }
        let b = &t.alpha.slope;
        if b.is_positive() || (b.is_zero() && t.s_power > 0) {
            let threshold = rat(UNBOUNDED_THRESHOLD);
            let d = &f.domain;
            let mut step: i64 = 1;
            loop {
                let s = d.first_at_least(d.first() + step);
                let value = t.eval(q, s);
                if value > threshold {
                    return Ok(Supremum::Unbounded {
                        term: i,
                        witness_s: s,
                        witness_value: value,
                    });
                }
                step = step.checked_mul(2).ok_or_else(|| Error::invalid("no witness before overflow"))?;
            }
        }
    }
    let inv_ln = (q + BigRational::one()) / (rat(2) * (q - BigRational::one()));
    let mut bound = rat(f.domain.first());
    for t in &nf {
        if t.coeff.is_zero() || t.s_power == 0 || !t.alpha.slope.is_negative() {
            continue;
        }
        let need = rat(t.s_power as i64) * &inv_ln / t.alpha.slope.abs();
        bound = bound.max(need);
    }
    let tail_bound = f.domain.first_at_least(bound.ceil().to_integer().to_i64().expect("tail bound fits"));
    let mut best: Option<(BigRational, i64)> = None;
    for s in f.domain.points_upto(tail_bound) {
        let v = eval_constructible(f, q, s)?;
        if best.as_ref().is_none_or(|(b, _)| v > *b) {
            best = Some((v, s));
        }
    }
    let (sup, argmax) = best.expect("tail bound is a domain point");
    Ok(Supremum::Bounded { sup, argmax, tail_bound })
}

/// A point count `#Y(F_p)` whose equations may mention parameters.
#[derive(Clone, Debug)]
pub struct MotivicSummand {
    /// Equations over the counted variables followed by the parameters.
    pub scheme: AffineScheme,
    pub params: Vec<String>,
    pub factor: ConstructibleFunction,
}

/// `sum_i #Y_i(F_p; params) * f_i(p, s)`.
#[derive(Clone, Debug)]
pub struct MotivicFunctionDesc {
    pub arity: usize,
    pub summands: Vec<MotivicSummand>,
}

impl MotivicFunctionDesc {
    pub fn new(arity: usize, summands: Vec<MotivicSummand>) -> Result<Self> {
        for s in &summands {
            if s.params.len() != arity {
                return Err(Error::invalid(format!(
                    "summand over `{}` has {} parameter slots, expected {arity}",
                    s.scheme.name(),
                    s.params.len()
                )));
            }
            if let Some(p) = s.params.iter().find(|p| !s.scheme.vars().contains(p)) {
                return Err(Error::invalid(format!("parameter `{p}` is not a variable of `{}`", s.scheme.name())));
            }
        }
        Ok(MotivicFunctionDesc { arity, summands })
    }
}

pub fn eval_motivic(
    f: &MotivicFunctionDesc,
    p: u64,
    params: &[i64],
    s: i64,
    limits: &Limits,
) -> Result<BigRational> {
    limits.check_prime(p)?;
    if params.len() != f.arity {
        return Err(Error::invalid(format!("expected {} parameters, got {}", f.arity, params.len())));
    }
    let q = rat(p as i64);
    let mut total = BigRational::zero();
    for summand in &f.summands {
        let vars = summand.scheme.vars();
        let assign: Vec<(usize, BigInt)> = summand
            .params
            .iter()
            .zip(params)
            .map(|(name, &v)| (vars.iter().position(|x| x == name).expect("validated"), BigInt::from(v)))
            .collect();
        let counted: Vec<String> = vars.iter().filter(|v| !summand.params.contains(v)).cloned().collect();
        let eqs = summand.scheme.equations().iter().map(|e| e.specialize(&assign)).collect();
        let fiber = AffineScheme::new(summand.scheme.name(), counted.clone(), eqs, 0, false)?;
        let n = count_points_tree(&fiber, p, 1, limits)?.count;
        total += BigRational::from_integer(BigInt::from(n)) * eval_constructible(&summand.factor, &q, s)?;
    }
    Ok(total)
}

struct Parser<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser {
            src,
            bytes: src.as_bytes(),
            pos: 0,
        }
    }

    fn ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.bytes.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(Error::parse(self.pos, format!("expected '{}'", c as char)))
        }
    }

    fn keyword(&mut self, word: &str) -> bool {
        self.ws();
        if self.src[self.pos..].starts_with(word) {
            let after = self.bytes.get(self.pos + word.len());
            if !after.is_some_and(|c| c.is_ascii_alphanumeric()) {
                self.pos += word.len();
                return true;
            }
        }
        false
    }

    fn natural(&mut self) -> Result<i64> {
        self.ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        self.src[start..self.pos]
            .parse()
            .map_err(|_| Error::parse(start, "expected a natural number"))
    }

    fn integer(&mut self) -> Result<i64> {
        let neg = self.eat(b'-');
        let v = self.natural()?;
        Ok(if neg { -v } else { v })
    }

    fn function(&mut self) -> Result<ConstructibleFunction> {
        let mut terms = Vec::new();
        let mut negate = self.eat(b'-');
        loop {
            let mut t = self.term()?;
            if negate {
                t.coeff = -t.coeff;
            }
            terms.push(t);
            if self.eat(b'+') {
                negate = false;
            } else if self.eat(b'-') {
                negate = true;
            } else {
                break;
            }
        }
        let domain = if self.eat(b';') { self.domain()? } else { Domain::naturals() };
        if self.peek().is_some() {
            return Err(Error::parse(self.pos, "unexpected trailing input"));
        }
        let zero_only = terms.len() == 1 && terms[0].coeff.is_zero();
        let f = ConstructibleFunction::new(domain, terms)?;
        debug_assert!(!zero_only || f.terms.is_empty());
        Ok(f)
    }

    fn domain(&mut self) -> Result<Domain> {
        if !self.keyword("s") {
            return Err(Error::parse(self.pos, "expected a domain clause `s >= s0 [mod r c]`"));
        }
        self.expect(b'>')?;
        if self.bytes.get(self.pos) != Some(&b'=') {
            return Err(Error::parse(self.pos, "expected '>='"));
        }
        self.pos += 1;
        let start = self.natural()?;
        let (modulus, residue) = if self.keyword("mod") {
            (self.natural()?, self.natural()?)
        } else {
            (1, 0)
        };
        Domain::new(start, modulus, residue)
    }

    fn term(&mut self) -> Result<Term> {
        let mut coeff = BigRational::one();
        let mut alpha = Affine::constant(0);
        let mut betas = Vec::new();
        let mut geoms = Vec::new();
        loop {
            self.ws();
            let at = self.pos;
            match self.peek() {
                Some(c) if c.is_ascii_digit() => {
                    let n = self.natural()?;
                    let d = if self.eat(b'/') { self.natural()? } else { 1 };
                    if d == 0 {
                        return Err(Error::parse(at, "zero denominator"));
                    }
                    coeff *= BigRational::new(n.into(), d.into());
                }
                Some(b'(') => {
                    self.pos += 1;
                    betas.push(self.affine()?);
                    self.expect(b')')?;
                }
                _ if self.keyword("geom") => {
                    self.expect(b'(')?;
                    loop {
                        let a = self.integer()?;
                        if a == 0 {
                            return Err(Error::parse(self.pos, "geometric-series exponent must be nonzero"));
                        }
                        geoms.push(a);
                        if !self.eat(b',') {
                            break;
                        }
                    }
                    self.expect(b')')?;
                }
                _ if self.keyword("q") => {
                    self.expect(b'^')?;
                    let e = if self.eat(b'(') {
                        let e = self.affine()?;
                        self.expect(b')')?;
                        e
                    } else if self.keyword("s") {
                        Affine::s()
                    } else {
                        Affine::constant(self.integer()?)
                    };
                    alpha = Affine::new(&alpha.slope + &e.slope, &alpha.offset + &e.offset);
                }
                _ if self.keyword("s") => {
                    let n = if self.eat(b'^') { self.natural()? } else { 1 };
                    betas.extend(std::iter::repeat_n(Affine::s(), n as usize));
                }
                _ => return Err(Error::parse(at, "expected a factor")),
            }
            if !self.eat(b'*') {
                break;
            }
        }
        Ok(Term::new(coeff, alpha, betas, geoms))
    }

    /// `[-] aterm {(+|-) aterm}` where an aterm is `n`, `n/d`, `ns`, `n*s`,
    /// `s`, `s/d` or `ns/d`.
    fn affine(&mut self) -> Result<Affine> {
        let mut slope = BigRational::zero();
        let mut offset = BigRational::zero();
        let mut neg = self.eat(b'-');
        loop {
            self.ws();
            let at = self.pos;
            let mut num: Option<i64> = None;
            if self.peek().is_some_and(|c| c.is_ascii_digit()) {
                num = Some(self.natural()?);
            }
            let had_star = num.is_some() && self.eat(b'*');
            let is_s = self.keyword("s");
            if had_star && !is_s {
                return Err(Error::parse(self.pos, "expected 's' after '*'"));
            }
            if num.is_none() && !is_s {
                return Err(Error::parse(at, "expected an affine term"));
            }
            let den = if self.eat(b'/') { self.natural()? } else { 1 };
            if den == 0 {
                return Err(Error::parse(at, "zero denominator"));
            }
            let mut v = BigRational::new(num.unwrap_or(1).into(), den.into());
            if neg {
                v = -v;
            }
            if is_s {
                slope += v;
            } else {
                offset += v;
            }
            if self.eat(b'+') {
                neg = false;
            } else if self.eat(b'-') {
                neg = true;
            } else {
                break;
            }
        }
        Ok(Affine::new(slope, offset))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::var_list;
    use proptest::prelude::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn parse(t: &str) -> ConstructibleFunction {
        ConstructibleFunction::parse(t).unwrap()
    }

    #[test]
    fn eval_examples() {
        assert_eq!(eval_constructible(&parse("q^(-s)"), &r(5, 1), 3).unwrap(), r(1, 125));
        assert_eq!(eval_constructible(&parse("s^2 * q^(-s) * geom(-2)"), &r(2, 1), 2).unwrap(), r(4, 3));
        let even = parse("q^(s/2) ; s >= 0 mod 2 0");
        assert_eq!(eval_constructible(&even, &r(3, 1), 4).unwrap(), r(9, 1));
        assert!(eval_constructible(&even, &r(3, 1), 3).is_err());
        assert!(eval_constructible(&even, &r(1, 1), 4).is_err());
        assert!(ConstructibleFunction::parse("q^(s/2)").is_err());
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify_nonneg(&parse("q^s * geom(-1)")), NonNeg::Yes);
        assert_eq!(
            classify_nonneg(&parse("1 - q^s ; s >= 1")),
            NonNeg::Counterexample {
                s: 1,
                q: r(2, 1),
                value: r(-1, 1)
            }
        );
        assert_eq!(classify_nonneg(&parse("q^s - 1")), NonNeg::Unknown);
        assert_eq!(classify_nonneg(&parse("(s-3) * q^s ; s >= 3")), NonNeg::Yes);
        assert_eq!(classify_nonneg(&parse("(3-s) * geom(2) ; s >= 3")), NonNeg::Yes);
    }

    #[test]
    fn sup_examples() {
        assert_eq!(
            sup_over_domain(&parse("s * q^(-s)"), &r(2, 1)).unwrap(),
            Supremum::Bounded {
                sup: r(1, 2),
                argmax: 1,
                tail_bound: 2
            }
        );
        let Supremum::Unbounded { witness_s, witness_value, .. } = sup_over_domain(&parse("q^s"), &r(2, 1)).unwrap()
        else {
            panic!("q^s is unbounded")
        };
        assert!(witness_value > r(UNBOUNDED_THRESHOLD, 1));
        assert_eq!(eval_constructible(&parse("q^s"), &r(2, 1), witness_s).unwrap(), witness_value);
        assert_eq!(
            sup_over_domain(&parse("q^(-s) ; s >= 1"), &r(3, 1)).unwrap(),
            Supremum::Bounded {
                sup: r(1, 3),
                argmax: 1,
                tail_bound: 1
            }
        );
        assert!(matches!(sup_over_domain(&parse("s^3"), &r(2, 1)).unwrap(), Supremum::Unbounded { .. }));
        assert!(matches!(sup_over_domain(&parse("(s+1) * q^(-s)"), &r(2, 1)), Err(Error::Refused(_))));
        assert!(matches!(sup_over_domain(&parse("q^s - 1"), &r(2, 1)), Err(Error::Refused(_))));
    }

    #[test]
    fn parse_errors_have_positions() {
        assert!(matches!(ConstructibleFunction::parse("q^"), Err(Error::Parse { pos: 2, .. })));
        assert!(matches!(ConstructibleFunction::parse("s * geom(0)"), Err(Error::Parse { .. })));
        assert!(matches!(ConstructibleFunction::parse("s ; s >= 1 mod 0 0"), Err(Error::Invalid(_))));
        assert!(matches!(ConstructibleFunction::parse("s + x"), Err(Error::Parse { pos: 4, .. })));
    }

    #[test]
    fn motivic_examples() {
        let lim = Limits::default();
        let root = AffineScheme::parse("R", &["u", "c"], &["u^2 - c"], 0, false).unwrap();
        let f = MotivicFunctionDesc::new(
            1,
            vec![MotivicSummand {
                scheme: root,
                params: vec!["c".into()],
                factor: parse("1"),
            }],
        )
        .unwrap();
        for (c, want) in [(1, 2), (2, 0), (0, 1)] {
            assert_eq!(eval_motivic(&f, 5, &[c], 0, &lim).unwrap(), r(want, 1));
        }
        let line = MotivicFunctionDesc::new(
            0,
            vec![MotivicSummand {
                scheme: AffineScheme::affine_space("A1", var_list(&["x"])),
                params: vec![],
                factor: parse("q^(-s)"),
            }],
        )
        .unwrap();
        assert_eq!(eval_motivic(&line, 3, &[], 1, &lim).unwrap(), r(1, 1));
        let xy = MotivicFunctionDesc::new(
            0,
            vec![MotivicSummand {
                scheme: AffineScheme::parse("V", &["x", "y"], &["x*y"], 1, true).unwrap(),
                params: vec![],
                factor: parse("q^(-1)"),
            }],
        )
        .unwrap();
        assert_eq!(eval_motivic(&xy, 7, &[], 0, &lim).unwrap(), r(13, 7));
    }

    fn affine_strategy() -> impl Strategy<Value = Affine> {
        (-3i64..=3, -4i64..=4).prop_map(|(u, v)| Affine::linear(u, v))
    }

    fn term_strategy() -> impl Strategy<Value = Term> {
        (
            -5i64..=5,
            1i64..=3,
            affine_strategy(),
            prop::collection::vec(affine_strategy(), 0..=2),
            0usize..=2,
            prop::collection::vec(prop::sample::select(vec![-2i64, -1, 1, 3]), 0..=2),
        )
            .prop_map(|(n, d, alpha, mut betas, s_pow, geoms)| {
                betas.extend(std::iter::repeat(Affine::s()).take(s_pow));
                Term::new(r(n, d), alpha, betas, geoms)
            })
    }

    fn function_strategy() -> impl Strategy<Value = ConstructibleFunction> {
        (prop::collection::vec(term_strategy(), 1..=3), 0i64..=3, 1i64..=3, 0i64..=2).prop_map(
            |(terms, start, m, c)| {
                ConstructibleFunction::new(Domain::new(start, m, c % m).unwrap(), terms).unwrap()
            },
        )
    }

    fn monomial_strategy() -> impl Strategy<Value = ConstructibleFunction> {
        let term = (1i64..=6, 1i64..=3, 0usize..=3, -3i64..=0, -2i64..=2, prop::collection::vec(-2i64..=-1, 0..=1))
            .prop_map(|(n, d, a, b, v, geoms)| {
                Term::new(r(n, d), Affine::linear(b, v), vec![Affine::s(); a], geoms)
            });
        (prop::collection::vec(term, 1..=3), 0i64..=2).prop_map(|(terms, start)| {
            ConstructibleFunction::new(Domain::new(start, 1, 0).unwrap(), terms).unwrap()
        })
    }

    proptest! {
        #[test]
        fn print_parse_round_trip(f in function_strategy()) {
            let text = f.to_string();
            let back = ConstructibleFunction::parse(&text).unwrap();
            prop_assert_eq!(back, f, "{}", text);
        }

        #[test]
        fn yes_means_nonnegative_samples(f in function_strategy(), qn in 3i64..=12, qd in 1i64..=2, i in 0i64..20) {
            let q = r(qn.max(qd + 1), qd);
            if classify_nonneg(&f) == NonNeg::Yes {
                let s = f.domain.first() + i * f.domain.modulus;
                prop_assert!(!eval_constructible(&f, &q, s).unwrap().is_negative());
            }
        }

        #[test]
        fn normal_form_agrees_with_direct_evaluation(f in monomial_strategy(), qn in 3i64..=9, i in 0i64..30) {
            let q = r(qn, 2);
            let s = f.domain.first() + i;
            let nf = normal_form(&f, &q).unwrap();
            let folded: BigRational = nf.iter().map(|t| t.eval(&q, s)).sum();
            prop_assert_eq!(folded, eval_constructible(&f, &q, s).unwrap());
        }

        #[test]
        fn bounded_sup_dominates_sweep(f in monomial_strategy(), qn in 3i64..=9) {
            let q = r(qn, 2);
            if let Supremum::Bounded { sup, argmax, tail_bound } = sup_over_domain(&f, &q).unwrap() {
                prop_assert_eq!(eval_constructible(&f, &q, argmax).unwrap(), sup.clone());
                for s in f.domain.points_upto(4 * tail_bound.max(1)) {
                    let v = eval_constructible(&f, &q, s).unwrap();
                    prop_assert!(v <= sup);
                    if s < argmax {
                        prop_assert!(v < sup);
                    }
                }
            }
        }
    }
}
