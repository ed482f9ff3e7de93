//! Scans of g/h over (p, k, y) grids and the three empirical verdicts.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::count::Method;
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::measures::{exact_log, gh_record, rational_ln, write_csv, GHRecord};
use crate::residue::Modulus;
use crate::scheme::{for_each_point, AffineScheme, PolyMorphism};

/// Which target points are scanned at each level.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FiberPolicy {
    /// Every target point mod `p^k` while there are at most `cap` candidates,
    /// otherwise `cap` distinct points drawn by seeded rejection sampling.
    All,
    /// Fixed integer points, reduced mod `p^k` at each level.
    Points(Vec<Vec<u64>>),
}

#[derive(Clone, Debug)]
pub struct ScanSpec {
    pub morphism: PolyMorphism,
    pub primes: Vec<u64>,
    pub k_max: u32,
    pub fibers: FiberPolicy,
    pub seed: u64,
    pub cap: u64,
    pub method: Method,
    pub limits: Limits,
}

pub const DEFAULT_CAP: u64 = 4096;
pub const DEFAULT_SEED: u64 = 0;

impl ScanSpec {
    pub fn new(morphism: PolyMorphism, primes: Vec<u64>, k_max: u32) -> Self {
        ScanSpec {
            morphism,
            primes,
            k_max,
            fibers: FiberPolicy::All,
            seed: DEFAULT_SEED,
            cap: DEFAULT_CAP,
            method: Method::Auto,
            limits: Limits::default(),
        }
    }

    pub fn with_fibers(mut self, fibers: FiberPolicy) -> Self {
        self.fibers = fibers;
        self
    }

    pub fn with_limits(mut self, limits: Limits) -> Self {
        self.limits = limits;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.primes.is_empty() {
            return Err(Error::invalid("scan needs at least one prime"));
        }
        if self.k_max == 0 {
            return Err(Error::invalid("k_max must be at least 1"));
        }
        for &p in &self.primes {
            self.limits.check_prime(p)?;
            Modulus::new(p, self.k_max)?;
        }
        Ok(())
    }

    /// Everything needed to replay the scan.
    pub fn echo(&self) -> Value {
        let fibers = match &self.fibers {
            FiberPolicy::All => json!("all"),
            FiberPolicy::Points(pts) => json!({ "points": pts }),
        };
        json!({
            "morphism": morphism_json(&self.morphism),
            "primes": self.primes,
            "k_max": self.k_max,
            "fibers": fibers,
            "seed": self.seed,
            "cap": self.cap,
            "method": self.method,
            "budget": self.limits.budget,
            "prime_floor": self.limits.prime_floor,
        })
    }
}

fn scheme_json(x: &AffineScheme) -> Value {
    json!({
        "name": x.name(),
        "vars": x.vars(),
        "eqs": x.equations().iter().map(|e| e.to_string()).collect::<Vec<_>>(),
        "dim": x.declared_dim(),
        "ci": x.is_complete_intersection(),
    })
}

fn morphism_json(phi: &PolyMorphism) -> Value {
    json!({
        "name": phi.name(),
        "source": scheme_json(phi.source()),
        "target": scheme_json(phi.target()),
        "maps": phi.components().iter().map(|c| c.to_string()).collect::<Vec<_>>(),
    })
}

pub type CellKey = (u64, u32, Vec<u64>);

#[derive(Clone, Debug)]
pub struct GHTable {
    /// Sorted by `(p, k, y)`.
    pub records: Vec<GHRecord>,
    /// Set when some cells were refused by the budget.
    pub truncated: bool,
    pub skipped: Vec<CellKey>,
    pub relative_dim: i64,
    pub target_dim: usize,
    pub echo: Value,
}

impl GHTable {
    pub fn from_records(mut records: Vec<GHRecord>, relative_dim: i64, target_dim: usize) -> Self {
        records.sort_by_key(|r| r.key());
        GHTable {
            records,
            truncated: false,
            skipped: Vec::new(),
            relative_dim,
            target_dim,
            echo: Value::Null,
        }
    }

    pub fn primes(&self) -> Vec<u64> {
        self.records.iter().map(|r| r.p).collect::<BTreeSet<_>>().into_iter().collect()
    }

    pub fn k_max(&self) -> u32 {
        self.records.iter().map(|r| r.k).max().unwrap_or(0)
    }

    /// The sub-table with `k <= k_max`.
    pub fn restrict_k(&self, k_max: u32) -> GHTable {
        GHTable {
            records: self.records.iter().filter(|r| r.k <= k_max).cloned().collect(),
            skipped: self.skipped.iter().filter(|c| c.1 <= k_max).cloned().collect(),
            ..self.clone()
        }
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        write_csv(&self.records, &mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii")
    }

    fn index(&self) -> HashMap<(u64, u32, &[u64]), &GHRecord> {
        self.records.iter().map(|r| ((r.p, r.k, r.y.as_slice()), r)).collect()
    }
}

fn mix(seed: u64, p: u64, k: u32) -> u64 {
    let mut z = seed ^ p.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ ((k as u64) << 32);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn fibers_at(spec: &ScanSpec, p: u64, k: u32) -> Result<Vec<Vec<u64>>> {
    let target = spec.morphism.target();
    let q = Modulus::new(p, k)?.value();
    let n = target.ambient_dim();
    match &spec.fibers {
        FiberPolicy::Points(points) => {
            let mut out = BTreeSet::new();
            for y in points {
                if y.len() != n {
                    return Err(Error::invalid(format!(
                        "fiber point {y:?} has {} coordinates, target has {n}",
                        y.len()
                    )));
                }
                let r: Vec<u64> = y.iter().map(|v| v % q).collect();
                if !target.contains_mod(&r, q) {
                    return Err(Error::invalid(format!(
                        "fiber point {y:?} does not satisfy the target equations mod {p}^{k}"
                    )));
                }
                out.insert(r);
            }
            Ok(out.into_iter().collect())
        }
        FiberPolicy::All => {
            let candidates = (q as f64).powi(n as i32);
            if candidates <= spec.cap as f64 {
                let mut out = Vec::new();
                let mut y = vec![0u64; n];
                for_each_point::<Error>(&mut y, q, &mut |y| {
                    if target.contains_mod(y, q) {
                        out.push(y.to_vec());
                    }
                    Ok(())
                })?;
                return Ok(out);
            }
            let mut rng = ChaCha8Rng::seed_from_u64(mix(spec.seed, p, k));
            let mut out = BTreeSet::new();
            let attempts = spec.cap.saturating_mul(64);
            for _ in 0..attempts {
                if out.len() as u64 >= spec.cap {
                    break;
                }
                let y: Vec<u64> = (0..n).map(|_| rng.gen_range(0..q)).collect();
                if target.contains_mod(&y, q) {
                    out.insert(y);
                }
            }
            Ok(out.into_iter().collect())
        }
    }
}

/// Evaluates g and h on every cell of the grid. Cells refused by the budget
/// are left out and listed in `skipped`.
pub fn scan_gh(spec: &ScanSpec) -> Result<GHTable> {
    spec.validate()?;
    let primes: Vec<u64> = spec.primes.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    let mut cells: Vec<CellKey> = Vec::new();
    for &p in &primes {
        for k in 1..=spec.k_max {
            for y in fibers_at(spec, p, k)? {
                cells.push((p, k, y));
            }
        }
    }
    let phi = &spec.morphism;
    let results: Vec<Result<GHRecord>> = cells
        .par_iter()
        .map(|(p, k, y)| gh_record(phi, y, *p, *k, spec.method, &spec.limits))
        .collect();
    let mut records = Vec::with_capacity(cells.len());
    let mut skipped = Vec::new();
    for (cell, r) in cells.into_iter().zip(results) {
        match r {
            Ok(rec) => records.push(rec),
            Err(e) if e.is_budget() => skipped.push(cell),
            Err(e) => return Err(e),
        }
    }
    let mut table = GHTable::from_records(records, phi.relative_dim(), phi.target().declared_dim());
    table.truncated = !skipped.is_empty();
    table.skipped = skipped;
    table.echo = spec.echo();
    Ok(table)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Kind {
    #[serde(rename = "FRS")]
    Frs,
    #[serde(rename = "E-smooth")]
    ESmooth,
    #[serde(rename = "jet-flat")]
    JetFlat,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Consistent,
    Refuted,
    Inconclusive,
    /// Every h vanished: the `E = infinity` convention.
    Smooth,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Fitted {
    /// `None` stands for infinity.
    E(Option<u64>),
    Epsilon {
        value: BigRational,
        /// Bounds that also account for rows whose g is not a power of p.
        lower: BigRational,
        upper: BigRational,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub kind: Kind,
    pub outcome: Outcome,
    pub fitted: Option<Fitted>,
    pub c1: Option<BigRational>,
    pub c2: Option<BigRational>,
    pub witnesses: Vec<GHRecord>,
    pub labels: Vec<String>,
    pub notes: Vec<String>,
}

fn rat_json(r: &BigRational) -> Value {
    json!({ "num": r.numer().to_string(), "den": r.denom().to_string() })
}

impl Verdict {
    fn new(kind: Kind, outcome: Outcome) -> Self {
        Verdict {
            kind,
            outcome,
            fitted: None,
            c1: None,
            c2: None,
            witnesses: Vec::new(),
            labels: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn to_json(&self, spec_echo: &Value) -> Value {
        let fitted = match &self.fitted {
            None => Value::Null,
            Some(Fitted::E(None)) => json!({ "E": "infinity" }),
            Some(Fitted::E(Some(e))) => json!({ "E": { "num": e.to_string(), "den": "1" } }),
            Some(Fitted::Epsilon { value, lower, upper }) => json!({
                "epsilon": rat_json(value),
                "epsilon_interval": { "lower": rat_json(lower), "upper": rat_json(upper) },
            }),
        };
        let constants = json!({
            "C1": self.c1.as_ref().map(rat_json),
            "C2": self.c2.as_ref().map(rat_json),
        });
        let witnesses: Vec<Value> = self
            .witnesses
            .iter()
            .map(|r| json!({ "p": r.p, "k": r.k, "y": r.y_label() }))
            .collect();
        json!({
            "kind": self.kind,
            "outcome": self.outcome,
            "fitted": fitted,
            "constants": constants,
            "witnesses": witnesses,
            "labels": self.labels,
            "notes": self.notes,
            "spec": spec_echo,
        })
    }
}

fn reduce(y: &[u64], p: u64, k: u32) -> Vec<u64> {
    let q = p.pow(k);
    y.iter().map(|v| v % q).collect()
}

fn rat_from(p: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(p))
}

/// Constants C1 = max h*p and C2 = max |g(y,k) - g(r1(y),1)|*p at each
/// (k, p), and a growth rule on g along fiber chains.
///
/// Between consecutive primes `p0 < p1` a constant counts as growing in p
/// when it rises by at least the factor `(p1/p0)^(1/2)`; slower drift such as
/// `(p-1)/p` is treated as bounded.
///
/// A chain is `g(r_j(y), j)` for the last three levels `j` (two when only two
/// levels exist). It refutes boundedness when it is non-decreasing, starts
/// positive and its last value is at least `p` times its first.
pub fn frs_diagnostic(table: &GHTable) -> Result<Verdict> {
    let primes = table.primes();
    if primes.len() < 2 {
        return Err(Error::Coverage(format!(
            "the FRS diagnostic needs at least 2 primes, the table has {}",
            primes.len()
        )));
    }
    if table.k_max() < 2 {
        return Err(Error::Coverage("the FRS diagnostic needs levels k >= 2".into()));
    }
    let index = table.index();
    let zero = BigRational::zero();
    // (k, p) -> (value, row)
    let mut c1: BTreeMap<(u32, u64), (BigRational, &GHRecord)> = BTreeMap::new();
    let mut c2: BTreeMap<(u32, u64), (BigRational, &GHRecord)> = BTreeMap::new();
    for r in &table.records {
        let pr = rat_from(r.p);
        let v1 = &r.h * &pr;
        let e1 = c1.entry((r.k, r.p)).or_insert((zero.clone(), r));
        if v1 > e1.0 {
            *e1 = (v1, r);
        }
        if let Some(base) = index.get(&(r.p, 1, reduce(&r.y, r.p, 1).as_slice())) {
            let v2 = (&r.g - &base.g).abs() * &pr;
            let e2 = c2.entry((r.k, r.p)).or_insert((zero.clone(), r));
            if v2 > e2.0 {
                *e2 = (v2, r);
            }
        }
    }
    let max_of = |m: &BTreeMap<(u32, u64), (BigRational, &GHRecord)>| {
        m.values().map(|(v, _)| v.clone()).max().unwrap_or_else(BigRational::zero)
    };
    let mut verdict = Verdict::new(Kind::Frs, Outcome::Consistent);
    verdict.c1 = Some(max_of(&c1));
    verdict.c2 = Some(max_of(&c2));

    let mut growth: Vec<GHRecord> = Vec::new();
    for &p in &primes {
        let kp = table.records.iter().filter(|r| r.p == p).map(|r| r.k).max().unwrap_or(0);
        if kp < 2 {
            continue;
        }
        let first_level = kp.saturating_sub(2).max(1);
        for r in table.records.iter().filter(|r| r.p == p && r.k == kp) {
            let chain: Option<Vec<&GHRecord>> = (first_level..=kp)
                .map(|j| index.get(&(p, j, reduce(&r.y, p, j).as_slice())).copied())
                .collect();
            let Some(chain) = chain else { continue };
            let first = &chain[0].g;
            let last = &chain[chain.len() - 1].g;
            let monotone = chain.windows(2).all(|w| w[0].g <= w[1].g);
            if monotone && first.is_positive() && *last >= first * rat_from(p) {
                verdict.notes.push(format!(
                    "g grows along the fiber chain ending at p={p}, k={kp}, y={}: {}",
                    r.y_label(),
                    chain.iter().map(|c| c.g.to_string()).collect::<Vec<_>>().join(" -> ")
                ));
                growth.extend(chain.into_iter().cloned());
                break;
            }
        }
    }
    if !growth.is_empty() {
        verdict.outcome = Outcome::Refuted;
        verdict.witnesses = growth;
        return Ok(verdict);
    }

    let mut increases: Vec<GHRecord> = Vec::new();
    for (name, map) in [("C1", &c1), ("C2", &c2)] {
        for k in 1..=table.k_max() {
            let series: Vec<(u64, &(BigRational, &GHRecord))> =
                primes.iter().filter_map(|&p| map.get(&(k, p)).map(|e| (p, e))).collect();
            for w in series.windows(2) {
                let ((p0, (a, ra)), (p1, (b, rb))) = (w[0], w[1]);
                // growth counts once it reaches the rate (p1/p0)^(1/2)
                if a.is_positive() && b * b * rat_from(p0) >= a * a * rat_from(p1) {
                    verdict.notes.push(format!(
                        "{name} at k={k} grows from {a} (p={p0}) to {b} (p={p1})"
                    ));
                    increases.push((*ra).clone());
                    increases.push((*rb).clone());
                }
            }
        }
    }
    if !increases.is_empty() {
        verdict.outcome = Outcome::Inconclusive;
        verdict.witnesses = increases;
    }
    Ok(verdict)
}

/// Coordinatewise p-adic valuations of `y` mod `p^k` (`k` for zero).
fn valuation_class(y: &[u64], p: u64, k: u32) -> Vec<u32> {
    y.iter()
        .map(|&v| {
            if v == 0 {
                return k;
            }
            let mut v = v;
            let mut e = 0;
            while v % p == 0 {
                v /= p;
                e += 1;
            }
            e
        })
        .collect()
}

/// `-log_p(h)`, exact when `h` is an integral power of `p`.
fn neg_log(h: &BigRational, p: u64) -> (f64, bool) {
    let num = h.numer().to_biguint().expect("positive");
    let den = h.denom().to_biguint().expect("positive");
    if num == 1u32.into() {
        if let Some(e) = exact_log(&den, p) {
            return (e as f64, true);
        }
    }
    if den == 1u32.into() {
        if let Some(e) = exact_log(&num, p) {
            return (-(e as f64), true);
        }
    }
    (-rational_ln(h) / (p as f64).ln(), false)
}

pub const EXPONENT_TOLERANCE: f64 = 0.2;

/// Fits the decay exponent of h.
///
/// Rows are grouped by level `k` and the valuation class of `y`. Within a
/// group the largest h at each prime gives an exponent `-log_p h`; groups
/// seen at two or more primes must agree within the tolerance and round to
/// the same integer. The fitted E is the smallest group exponent, floored at 0.
pub fn esmooth_diagnostic(table: &GHTable) -> Result<Verdict> {
    let positive: Vec<&GHRecord> = table.records.iter().filter(|r| r.h.is_positive()).collect();
    if positive.is_empty() {
        if table.records.is_empty() {
            return Err(Error::Coverage("empty table".into()));
        }
        let mut v = Verdict::new(Kind::ESmooth, Outcome::Smooth);
        v.fitted = Some(Fitted::E(None));
        v.labels = vec!["FRS-consistent".into(), "terminal-consistent".into()];
        return Ok(v);
    }
    // (k, class) -> p -> row with the largest h
    let mut groups: BTreeMap<(u32, Vec<u32>), BTreeMap<u64, &GHRecord>> = BTreeMap::new();
    for r in &positive {
        let slot = groups
            .entry((r.k, valuation_class(&r.y, r.p, r.k)))
            .or_default()
            .entry(r.p)
            .or_insert(r);
        if r.h > slot.h {
            *slot = r;
        }
    }
    let mut verdict = Verdict::new(Kind::ESmooth, Outcome::Consistent);
    let mut best: Option<(i64, Vec<GHRecord>)> = None;
    let mut fitted_any = false;
    for ((k, class), per_prime) in &groups {
        if per_prime.len() < 2 {
            continue;
        }
        fitted_any = true;
        let exps: Vec<(u64, f64, bool)> = per_prime
            .iter()
            .map(|(&p, r)| {
                let (e, exact) = neg_log(&r.h, p);
                (p, e, exact)
            })
            .collect();
        for (p, e, exact) in &exps {
            if !exact {
                verdict.notes.push(format!(
                    "approximate exponent {e:.4} at p={p}, k={k}, class {class:?}: h is not a power of p"
                ));
            }
        }
        let lo = exps.iter().map(|e| e.1).fold(f64::INFINITY, f64::min);
        let hi = exps.iter().map(|e| e.1).fold(f64::NEG_INFINITY, f64::max);
        let rounded: BTreeSet<i64> = exps.iter().map(|e| e.1.round() as i64).collect();
        if hi - lo > EXPONENT_TOLERANCE || rounded.len() != 1 {
            verdict.outcome = Outcome::Inconclusive;
            verdict.notes.push(format!(
                "exponents disagree across primes at k={k}, class {class:?}: {}",
                exps.iter().map(|(p, e, _)| format!("p={p}: {e:.4}")).collect::<Vec<_>>().join(", ")
            ));
            verdict.witnesses.extend(per_prime.values().map(|r| (*r).clone()));
            continue;
        }
        let e = *rounded.iter().next().expect("one value");
        if best.as_ref().is_none_or(|(b, _)| e < *b) {
            best = Some((e, per_prime.values().map(|r| (*r).clone()).collect()));
        }
    }
    if !fitted_any {
        return Err(Error::Coverage(
            "no (k, fiber class) has h > 0 at two or more primes".into(),
        ));
    }
    if verdict.outcome == Outcome::Inconclusive {
        return Ok(verdict);
    }
    let (e, rows) = best.expect("a fitted group");
    let e = e.max(0) as u64;
    verdict.fitted = Some(Fitted::E(Some(e)));
    verdict.witnesses = rows;
    if e == 0 {
        verdict.outcome = Outcome::Refuted;
    } else {
        verdict.labels.push("FRS-consistent".into());
        if e >= 2 {
            verdict.labels.push("terminal-consistent".into());
        }
    }
    Ok(verdict)
}

/// `log_p g / (k dimY)` bounds per row with `g > 1`: exact when `g` is a
/// power of `p`, otherwise floor and ceiling of `log_p g`.
fn growth_rate(r: &GHRecord, dim_y: usize) -> (BigRational, BigRational, bool) {
    let scale = BigInt::from(r.k as u64 * dim_y as u64);
    if r.g.is_integer() {
        if let Some(e) = exact_log(&r.g.numer().to_biguint().expect("positive"), r.p) {
            let v = BigRational::new(BigInt::from(e), scale);
            return (v.clone(), v, true);
        }
    }
    let l = rational_ln(&r.g) / (r.p as f64).ln();
    let lo = BigRational::new(BigInt::from(l.floor() as i64), scale.clone());
    let hi = BigRational::new(BigInt::from(l.ceil() as i64), scale);
    (lo, hi, false)
}

/// Fits epsilon as `1 - max log_p(g) / (k dimY)` over rows with `g > 1`.
///
/// The fitted value uses the rows where g is an exact power of p; the
/// interval also covers the remaining rows.
pub fn jetflat_diagnostic(table: &GHTable, dim_y: usize) -> Result<Verdict> {
    if table.records.is_empty() {
        return Err(Error::Coverage("empty table".into()));
    }
    if dim_y == 0 {
        return Err(Error::invalid("jet flatness needs a target of positive dimension"));
    }
    let one = BigRational::from_integer(1.into());
    let mut exact_max: Option<(BigRational, &GHRecord)> = None;
    let mut lower_max = BigRational::zero();
    let mut upper_max = BigRational::zero();
    let mut approximate = 0usize;
    for r in table.records.iter().filter(|r| r.g > one) {
        let (lo, hi, exact) = growth_rate(r, dim_y);
        if exact {
            if exact_max.as_ref().is_none_or(|(m, _)| lo > *m) {
                exact_max = Some((lo.clone(), r));
            }
        } else {
            approximate += 1;
        }
        lower_max = lower_max.max(lo);
        upper_max = upper_max.max(hi);
    }
    let exact_value = exact_max.as_ref().map(|(m, _)| m.clone()).unwrap_or_else(BigRational::zero);
    let epsilon = &one - &exact_value;
    let mut verdict = Verdict::new(Kind::JetFlat, Outcome::Inconclusive);
    verdict.fitted = Some(Fitted::Epsilon {
        value: epsilon.clone(),
        lower: &one - upper_max.max(exact_value.clone()),
        upper: &one - lower_max.max(exact_value),
    });
    if approximate > 0 {
        verdict
            .notes
            .push(format!("{approximate} rows with g not a power of p enter only the interval"));
    }
    if let Some((_, r)) = exact_max {
        verdict.witnesses.push(r.clone());
    }
    match frs_diagnostic(table) {
        Ok(frs) if frs.outcome == Outcome::Refuted => {
            verdict.outcome = Outcome::Refuted;
            verdict.notes.push("the FRS trend rule refutes boundedness of g".into());
            verdict.witnesses.extend(frs.witnesses);
        }
        Ok(frs) if frs.outcome == Outcome::Consistent && epsilon == one => {
            verdict.outcome = Outcome::Consistent;
            verdict.labels.push("jet-flat-consistent".into());
        }
        Ok(_) => {}
        Err(e) => verdict.notes.push(format!("FRS trend not evaluated: {e}")),
    }
    Ok(verdict)
}

/// All three verdicts for a table, as one JSON document.
pub fn diagnose_json(table: &GHTable) -> Result<Value> {
    let frs = frs_diagnostic(table)?;
    let es = esmooth_diagnostic(table)?;
    let jf = jetflat_diagnostic(table, table.target_dim)?;
    Ok(json!({
        "truncated": table.truncated,
        "skipped": table.skipped.iter().map(|(p, k, y)| json!({ "p": p, "k": k, "y": crate::measures::y_label(y) })).collect::<Vec<_>>(),
        "verdicts": [frs.to_json(&table.echo), es.to_json(&table.echo), jf.to_json(&table.echo)],
    }))
}
