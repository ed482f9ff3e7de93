//! Normalized fiber counts `g`, `h`, Lang-Weil constants and empirical
//! dimension estimates.

use std::io::Write;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::count::{count_fiber, count_fiber_split, count_points_tree, Filter, Method};
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::scheme::{AffineScheme, PolyMorphism};

/// One cell of a g/h table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GHRecord {
    pub p: u64,
    pub k: u32,
    pub y: Vec<u64>,
    pub raw_count: BigUint,
    pub singular_count: BigUint,
    pub g: BigRational,
    pub h: BigRational,
}

impl GHRecord {
    pub fn key(&self) -> (u64, u32, Vec<u64>) {
        (self.p, self.k, self.y.clone())
    }

    pub fn y_label(&self) -> String {
        y_label(&self.y)
    }
}

pub fn y_label(y: &[u64]) -> String {
    y.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(":")
}

/// `count / p^(k d)` as an exact rational; `d` may be negative.
pub fn normalize(count: &BigUint, p: u64, k: u32, d: i64) -> BigRational {
    let e = k as i64 * d;
    let scale = BigInt::from(p).pow(e.unsigned_abs() as u32);
    let c = BigInt::from(count.clone());
    if e >= 0 {
        BigRational::new(c, scale)
    } else {
        BigRational::from_integer(c * scale)
    }
}

pub fn g_value(phi: &PolyMorphism, y: &[u64], p: u64, k: u32, method: Method, limits: &Limits) -> Result<BigRational> {
    let r = count_fiber(phi, y, p, k, Filter::All, method, limits)?;
    Ok(normalize(&r.count, p, k, phi.relative_dim()))
}

pub fn h_value(phi: &PolyMorphism, y: &[u64], p: u64, k: u32, method: Method, limits: &Limits) -> Result<BigRational> {
    let r = count_fiber(phi, y, p, k, Filter::Singular, method, limits)?;
    Ok(normalize(&r.count, p, k, phi.relative_dim()))
}

/// Both counts of one fiber and their normalizations.
pub fn gh_record(phi: &PolyMorphism, y: &[u64], p: u64, k: u32, method: Method, limits: &Limits) -> Result<GHRecord> {
    let (all, sing) = count_fiber_split(phi, y, p, k, method, limits)?;
    let d = phi.relative_dim();
    Ok(GHRecord {
        p,
        k,
        y: y.to_vec(),
        g: normalize(&all.count, p, k, d),
        h: normalize(&sing.count, p, k, d),
        raw_count: all.count,
        singular_count: sing.count,
    })
}

pub const CSV_HEADER: &str = "p,k,y,raw_count,singular_count,g_num,g_den,h_num,h_den";

pub fn write_csv<W: Write>(records: &[GHRecord], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.p,
            r.k,
            r.y_label(),
            r.raw_count,
            r.singular_count,
            r.g.numer(),
            r.g.denom(),
            r.h.numer(),
            r.h.denom()
        )?;
    }
    Ok(())
}

fn point_count(z: &AffineScheme, p: u64, limits: &Limits) -> Result<BigUint> {
    limits.check_prime(p)?;
    Ok(count_points_tree(z, p, 1, limits)?.count)
}

fn check_prime_list(primes: &[u64], min: usize, what: &str) -> Result<()> {
    if primes.len() < min {
        return Err(Error::Coverage(format!("{what} needs at least {min} primes, got {}", primes.len())));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComponentEstimate {
    pub scheme: String,
    pub ratios: Vec<(u64, BigRationalText)>,
    pub c: u64,
    pub stable: bool,
}

/// A rational rendered as `num/den` for reports.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct BigRationalText(pub String);

impl From<&BigRational> for BigRationalText {
    fn from(r: &BigRational) -> Self {
        BigRationalText(format!("{}/{}", r.numer(), r.denom()))
    }
}

/// `#Z(F_p) / p^dim` per prime, `C` = the rounded ratio at the largest prime,
/// stable iff every ratio lies strictly within `1/2` of `C`.
pub fn estimate_components(z: &AffineScheme, primes: &[u64], limits: &Limits) -> Result<(ComponentEstimate, Vec<BigRational>)> {
    check_prime_list(primes, 3, "component estimation")?;
    let mut ratios = Vec::with_capacity(primes.len());
    for &p in primes {
        let n = point_count(z, p, limits)?;
        ratios.push(normalize(&n, p, 1, z.declared_dim() as i64));
    }
    let largest = primes
        .iter()
        .enumerate()
        .max_by_key(|(_, &p)| p)
        .map(|(i, _)| i)
        .expect("non-empty");
    let (c_big, stable) = stable_round(&ratios, largest);
    let c = c_big.to_u64().unwrap_or(u64::MAX);
    let est = ComponentEstimate {
        scheme: z.name().to_string(),
        ratios: primes.iter().copied().zip(ratios.iter().map(BigRationalText::from)).collect(),
        c,
        stable,
    };
    Ok((est, ratios))
}

/// Rounds `ratios[at]` half up; stable iff every ratio is strictly closer
/// than `1/2` to the rounded value, so a halfway ratio is never stable.
pub(crate) fn stable_round(ratios: &[BigRational], at: usize) -> (BigInt, bool) {
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let c = (&ratios[at] + &half).floor().to_integer();
    let c_rat = BigRational::from_integer(c.clone());
    let stable = ratios.iter().all(|q| (q - &c_rat).abs() < half);
    (c, stable)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DimensionEstimate {
    pub slope: f64,
    pub residual: f64,
    pub counts: Vec<(u64, String)>,
    /// Set when every count is `p^e` for one integer `e`.
    pub exact: Option<u32>,
}

/// Least-squares slope of `log #Z(F_p)` against `log p`.
pub fn estimate_dimension(z: &AffineScheme, primes: &[u64], limits: &Limits) -> Result<DimensionEstimate> {
    check_prime_list(primes, 2, "dimension estimation")?;
    let mut counts = Vec::new();
    for &p in primes {
        let n = point_count(z, p, limits)?;
        if n.is_zero() {
            return Err(Error::Refused(format!(
                "`{}` has no points over F_{p}; only a lower bound on its dimension is available",
                z.name()
            )));
        }
        counts.push((p, n));
    }
    let xs: Vec<f64> = counts.iter().map(|(p, _)| (*p as f64).ln()).collect();
    let ys: Vec<f64> = counts.iter().map(|(_, n)| big_ln(n)).collect();
    let nf = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::Coverage("dimension estimation needs two distinct primes".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum::<f64>()
        .sqrt();
    let exact = exact_common_exponent(&counts);
    Ok(DimensionEstimate {
        slope,
        residual,
        counts: counts.iter().map(|(p, n)| (*p, n.to_string())).collect(),
        exact,
    })
}

fn exact_common_exponent(counts: &[(u64, BigUint)]) -> Option<u32> {
    let mut common = None;
    for (p, n) in counts {
        let e = exact_log(n, *p)?;
        match common {
            None => common = Some(e),
            Some(c) if c == e => {}
            _ => return None,
        }
    }
    common
}

/// `e` with `n = p^e`, if any.
pub fn exact_log(n: &BigUint, p: u64) -> Option<u32> {
    if n.is_zero() {
        return None;
    }
    let pb = BigUint::from(p);
    let mut v = n.clone();
    let mut e = 0;
    while (&v % &pb).is_zero() {
        v /= &pb;
        e += 1;
    }
    v.is_one().then_some(e)
}

/// Natural log of a big natural without overflowing `f64`.
pub fn big_ln(n: &BigUint) -> f64 {
    let bits = n.bits();
    if bits < 1000 {
        return n.to_f64().expect("finite").ln();
    }
    let shift = bits - 64;
    (n >> shift).to_f64().expect("finite").ln() + shift as f64 * std::f64::consts::LN_2
}

/// Natural log of a positive rational.
pub fn rational_ln(r: &BigRational) -> f64 {
    big_ln(&r.numer().to_biguint().expect("positive")) - big_ln(&r.denom().to_biguint().expect("positive"))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LangWeilRow {
    pub p: u64,
    pub count: String,
    pub ratio: BigRationalText,
    /// `(ratio - C)^2 * p`, the square of the scaled deviation.
    pub deviation_squared: BigRationalText,
    pub deviation: f64,
    #[serde(skip)]
    pub deviation_squared_exact: BigRational,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LangWeilReport {
    pub scheme: String,
    pub c: u64,
    pub rows: Vec<LangWeilRow>,
    /// Empirical constant: the largest scaled deviation.
    pub max_deviation: f64,
}

/// `|#Z(F_p)/p^dim - C| * p^(1/2)` per prime; its square is kept exactly.
pub fn langweil_check(z: &AffineScheme, c: u64, primes: &[u64], limits: &Limits) -> Result<LangWeilReport> {
    check_prime_list(primes, 1, "the Lang-Weil check")?;
    let target = BigRational::from_integer(BigInt::from(c));
    let mut rows = Vec::new();
    for &p in primes {
        let n = point_count(z, p, limits)?;
        let ratio = normalize(&n, p, 1, z.declared_dim() as i64);
        let diff = &ratio - &target;
        let sq = &diff * &diff * BigRational::from_integer(BigInt::from(p));
        let deviation = if sq.is_zero() { 0.0 } else { (rational_ln(&sq) / 2.0).exp() };
        rows.push(LangWeilRow {
            p,
            count: n.to_string(),
            ratio: (&ratio).into(),
            deviation_squared: (&sq).into(),
            deviation,
            deviation_squared_exact: sq,
        });
    }
    let max_deviation = rows.iter().map(|r| r.deviation).fold(0.0, f64::max);
    Ok(LangWeilReport {
        scheme: z.name().to_string(),
        c,
        rows,
        max_deviation,
    })
}
