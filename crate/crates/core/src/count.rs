//! Exact point counts over `Z/p^k`, `F_p` and `F_p[t]/(t^e)`.
//!
//! Two counters share one contract. The naive counter enumerates every
//! coordinate vector. The tree counter enumerates roots over `F_p` and lifts
//! them one level at a time by solving the linearized system mod `p`.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::linalg::{rank_mod_p, solve_mod_p};
use crate::poly::{IntPoly, ModPoly};
use crate::residue::{is_prime, Modulus, TruncatedSeries};
use crate::scheme::{fiber_equations, singular_reduction_set, AffineScheme, Jacobian, PolyMorphism};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Naive,
    Tree,
    Auto,
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "naive" => Ok(Method::Naive),
            "tree" => Ok(Method::Tree),
            "auto" => Ok(Method::Auto),
            _ => Err(Error::invalid(format!("unknown counting method `{s}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Filter {
    All,
    Singular,
}

/// Which counter produced a result.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Counter {
    Naive,
    Tree,
    Jetring,
}

impl fmt::Display for Counter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Counter::Naive => "naive",
            Counter::Tree => "tree",
            Counter::Jetring => "jetring",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountResult {
    pub count: BigUint,
    pub nodes_visited: u64,
    pub method: Counter,
    pub wall_time: Duration,
}

/// An equation system in `nvars` unknowns, the shape every counter consumes.
struct System {
    nvars: usize,
    eqs: Vec<IntPoly>,
    shortcut: bool,
}

impl System {
    fn of_scheme(x: &AffineScheme) -> Self {
        System {
            nvars: x.ambient_dim(),
            eqs: x.equations().to_vec(),
            shortcut: x.is_complete_intersection(),
        }
    }

    fn of_fiber(phi: &PolyMorphism, y: &[u64]) -> Self {
        let src = phi.source();
        let yb: Vec<BigInt> = y.iter().map(|&v| BigInt::from(v)).collect();
        let eqs = fiber_equations(phi, &yb);
        System {
            nvars: src.ambient_dim(),
            shortcut: src.is_complete_intersection() && eqs.len() <= src.ambient_dim(),
            eqs,
        }
    }
}

fn check_prime(p: u64) -> Result<()> {
    if !is_prime(p) {
        return Err(Error::invalid(format!("{p} is not prime")));
    }
    Ok(())
}

/// Index of `x mod p` in `[0, p)^m` read as a base-`p` numeral.
fn root_index(x: &[u64], p: u64) -> usize {
    x.iter().fold(0usize, |acc, &v| acc * p as usize + (v % p) as usize)
}

fn singular_mask(phi: &PolyMorphism, p: u64, limits: &Limits) -> Result<Vec<bool>> {
    let set: BTreeSet<Vec<u64>> = singular_reduction_set(phi, p, limits)?;
    let size = (p as usize).pow(phi.source().ambient_dim() as u32);
    let mut mask = vec![false; size];
    for x in &set {
        mask[root_index(x, p)] = true;
    }
    Ok(mask)
}

/// Counts that the naive counter accumulates per filter.
#[derive(Default, Clone, Copy)]
struct Tally {
    all: u64,
    singular: u64,
    visited: u64,
}

impl Tally {
    fn merge(self, o: Tally) -> Tally {
        Tally {
            all: self.all + o.all,
            singular: self.singular + o.singular,
            visited: self.visited + o.visited,
        }
    }
}

fn naive_tally(sys: &System, p: u64, k: u32, mask: Option<&[bool]>, limits: &Limits) -> Result<Tally> {
    let modulus = Modulus::new(p, k)?;
    let m = sys.nvars;
    limits.check_enumeration(p, k as u64 * m as u64)?;
    let q = modulus.value();
    let eqs: Vec<ModPoly> = sys.eqs.iter().map(|e| ModPoly::new(e, q)).collect();
    let visit = |x: &[u64], t: &mut Tally| {
        t.visited += 1;
        if eqs.iter().all(|e| e.eval(x) == 0) {
            t.all += 1;
            if mask.is_some_and(|mk| mk[root_index(x, p)]) {
                t.singular += 1;
            }
        }
    };
    if m == 0 {
        let mut t = Tally::default();
        visit(&[], &mut t);
        return Ok(t);
    }
    let tally = (0..q)
        .into_par_iter()
        .map(|first| {
            let mut t = Tally::default();
            let mut x = vec![0u64; m];
            x[0] = first;
            loop {
                visit(&x, &mut t);
                let mut i = m;
                loop {
                    i -= 1;
                    if i == 0 {
                        return t;
                    }
                    x[i] += 1;
                    if x[i] < q {
                        break;
                    }
                    x[i] = 0;
                }
            }
        })
        .reduce(Tally::default, Tally::merge);
    Ok(tally)
}

/// Exact integer evaluation with an `i128` fast path and a big-integer
/// fallback on overflow.
struct ExactPoly {
    small: Option<Vec<(i128, Vec<(usize, u32)>)>>,
    poly: IntPoly,
}

impl ExactPoly {
    fn new(f: &IntPoly) -> Self {
        let small = f
            .terms()
            .map(|(mono, c)| {
                let c = c.to_i128()?;
                let factors = mono
                    .0
                    .iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .map(|(i, &e)| (i, e))
                    .collect();
                Some((c, factors))
            })
            .collect();
        ExactPoly {
            small,
            poly: f.clone(),
        }
    }

    fn eval_small(&self, x: &[i128]) -> Option<i128> {
        let mut acc: i128 = 0;
        for (c, factors) in self.small.as_ref()? {
            let mut t = *c;
            for &(i, e) in factors {
                t = t.checked_mul(x[i].checked_pow(e)?)?;
            }
            acc = acc.checked_add(t)?;
        }
        Some(acc)
    }

    /// `F(x) / p^j mod p`, or `None` when `p^j` does not divide `F(x)`.
    fn scaled_residual(&self, x: &[i128], pj: i128, p: u64) -> Option<u64> {
        if let Some(v) = self.eval_small(x) {
            if v % pj != 0 {
                return None;
            }
            return Some((v / pj).rem_euclid(p as i128) as u64);
        }
        let xb: Vec<BigInt> = x.iter().map(|&v| BigInt::from(v)).collect();
        let v = self.poly.eval_exact(&xb);
        let (quot, rem) = v.div_rem(&BigInt::from(pj));
        if !rem.is_zero() {
            return None;
        }
        Some(quot.mod_floor(&BigInt::from(p)).to_u64().expect("residue below p"))
    }
}

struct TreeOutcome {
    all: BigUint,
    singular: BigUint,
    visited: u64,
}

/// Depth-first lifting of the roots of `sys` from level 1 to level `k`.
///
/// A node is a solution `x` mod `p^j`. Its children are `x + p^j v` for the
/// `v in F_p^m` with `J(x) v = -F(x)/p^j (mod p)`. Below a root where `J` has
/// full row rank and the system allows it, the subtree holds exactly
/// `p^((k-1)(m-L))` leaves and is not expanded. Roots whose Jacobian is rank
/// deficient are tallied separately as singular; `singular_only` skips the
/// others.
fn tree_count(sys: &System, p: u64, k: u32, singular_only: bool, limits: &Limits) -> Result<TreeOutcome> {
    Modulus::new(p, k)?;
    let m = sys.nvars;
    let l = sys.eqs.len();
    limits.check_enumeration(p, m as u64)?;
    let eqs_p: Vec<ModPoly> = sys.eqs.iter().map(|e| ModPoly::new(e, p)).collect();
    let mut roots: Vec<Vec<u64>> = Vec::new();
    let mut x = vec![0u64; m];
    crate::scheme::for_each_point::<Error>(&mut x, p, &mut |x| {
        if eqs_p.iter().all(|e| e.eval(x) == 0) {
            roots.push(x.to_vec());
        }
        Ok(())
    })?;
    let root_work = (p as f64).powi(m as i32) as u64;
    let work = AtomicU64::new(root_work);
    let jac = Jacobian::of(&sys.eqs, m).compile(p);
    let exact: Vec<ExactPoly> = sys.eqs.iter().map(ExactPoly::new).collect();
    let budget = limits.budget;
    let spend = |cost: u64| -> Result<()> {
        let used = work.fetch_add(cost, Ordering::Relaxed) + cost;
        if used > budget {
            return Err(Error::Budget {
                required: format!("more than {used}"),
                allowed: budget,
            });
        }
        Ok(())
    };

    let per_root: Vec<Result<(BigUint, bool, u64)>> = roots
        .par_iter()
        .map(|root| {
            let jx = jac.eval(root);
            let rank = rank_mod_p(&jx, p);
            let singular = rank < l;
            if singular_only && !singular {
                return Ok((BigUint::zero(), false, 0));
            }
            if k == 1 {
                return Ok((BigUint::from(1u32), singular, 1));
            }
            if sys.shortcut && !singular {
                let leaves = BigUint::from(p).pow((k - 1) * (m - l) as u32);
                return Ok((leaves, singular, 1));
            }
            let mut visited = 0u64;
            let start: Vec<i128> = root.iter().map(|&v| v as i128).collect();
            let count = lift(&start, 1, k, p, &jx, &exact, &spend, &mut visited)?;
            Ok((count, singular, visited))
        })
        .collect();

    let mut out = TreeOutcome {
        all: BigUint::zero(),
        singular: BigUint::zero(),
        visited: 0,
    };
    for r in per_root {
        let (count, singular, visited) = r?;
        out.visited += visited;
        if singular {
            out.singular += &count;
        }
        out.all += count;
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn lift(
    x: &[i128],
    j: u32,
    k: u32,
    p: u64,
    jx: &[Vec<u64>],
    exact: &[ExactPoly],
    spend: &(dyn Fn(u64) -> Result<()> + Sync),
    visited: &mut u64,
) -> Result<BigUint> {
    *visited += 1;
    if j == k {
        return Ok(BigUint::from(1u32));
    }
    let pj = (p as i128).pow(j);
    let rhs: Vec<u64> = exact
        .iter()
        .map(|f| {
            let r = f.scaled_residual(x, pj, p).expect("node is a solution mod p^j");
            (p - r) % p
        })
        .collect();
    let Some(sols) = solve_mod_p(jx, &rhs, x.len(), p) else {
        spend(1)?;
        return Ok(BigUint::zero());
    };
    spend(1 + (p as f64).powi(sols.dimension() as i32) as u64)?;
    let mut children: Vec<Vec<i128>> = Vec::new();
    sols.for_each(|v| {
        children.push(x.iter().zip(v).map(|(&xi, &vi)| xi + pj * vi as i128).collect());
    });
    let mut total = BigUint::zero();
    for child in children {
        total += lift(&child, j + 1, k, p, jx, exact, spend, visited)?;
    }
    Ok(total)
}

fn timed(start: Instant, count: BigUint, nodes_visited: u64, method: Counter) -> CountResult {
    CountResult {
        count,
        nodes_visited,
        method,
        wall_time: start.elapsed(),
    }
}

/// `#X(Z/p^k)` by enumerating all of `(Z/p^k)^m`.
pub fn count_points_naive(x: &AffineScheme, p: u64, k: u32, limits: &Limits) -> Result<CountResult> {
    check_prime(p)?;
    let start = Instant::now();
    let t = naive_tally(&System::of_scheme(x), p, k, None, limits)?;
    Ok(timed(start, t.all.into(), t.visited, Counter::Naive))
}

/// `#X(Z/p^k)` by level-by-level lifting of `F_p` roots.
pub fn count_points_tree(x: &AffineScheme, p: u64, k: u32, limits: &Limits) -> Result<CountResult> {
    check_prime(p)?;
    let start = Instant::now();
    let out = tree_count(&System::of_scheme(x), p, k, false, limits)?;
    Ok(timed(start, out.all, out.visited, Counter::Tree))
}

fn check_target_point(phi: &PolyMorphism, y: &[u64], p: u64, k: u32) -> Result<()> {
    let q = Modulus::new(p, k)?.value();
    if y.len() != phi.target().ambient_dim() {
        return Err(Error::invalid(format!(
            "target point has {} coordinates, target `{}` has {}",
            y.len(),
            phi.target().name(),
            phi.target().ambient_dim()
        )));
    }
    if let Some(v) = y.iter().find(|&&v| v >= q) {
        return Err(Error::invalid(format!("target coordinate {v} is not reduced mod {p}^{k}")));
    }
    if !phi.target().contains_mod(y, q) {
        return Err(Error::invalid(format!(
            "target point {y:?} does not satisfy the equations of `{}` mod {p}^{k}",
            phi.target().name()
        )));
    }
    Ok(())
}

fn resolve(method: Method) -> Counter {
    match method {
        Method::Naive => Counter::Naive,
        Method::Tree | Method::Auto => Counter::Tree,
    }
}

/// Counts source points `x mod p^k` with `phi(x) = y`, optionally only those
/// reducing mod `p` into the non-smooth locus of `phi`.
pub fn count_fiber(
    phi: &PolyMorphism,
    y: &[u64],
    p: u64,
    k: u32,
    filter: Filter,
    method: Method,
    limits: &Limits,
) -> Result<CountResult> {
    let (all, singular) = fiber_counts(phi, y, p, k, filter == Filter::Singular, false, method, limits)?;
    Ok(match filter {
        Filter::All => all,
        Filter::Singular => singular.expect("singular count requested"),
    })
}

/// Both fiber counts (all points, singular-reduction points) from a single
/// traversal.
pub fn count_fiber_split(
    phi: &PolyMorphism,
    y: &[u64],
    p: u64,
    k: u32,
    method: Method,
    limits: &Limits,
) -> Result<(CountResult, CountResult)> {
    let (all, singular) = fiber_counts(phi, y, p, k, true, true, method, limits)?;
    Ok((all, singular.expect("singular count requested")))
}

#[allow(clippy::too_many_arguments)]
fn fiber_counts(
    phi: &PolyMorphism,
    y: &[u64],
    p: u64,
    k: u32,
    want_singular: bool,
    want_all: bool,
    method: Method,
    limits: &Limits,
) -> Result<(CountResult, Option<CountResult>)> {
    check_prime(p)?;
    check_target_point(phi, y, p, k)?;
    if want_singular {
        limits.check_prime(p)?;
        if !phi.source().is_complete_intersection() {
            return Err(Error::Refused(format!(
                "source `{}` is not flagged as a complete intersection; its non-smooth locus is not computed",
                phi.source().name()
            )));
        }
    }
    let sys = System::of_fiber(phi, y);
    let start = Instant::now();
    let counter = resolve(method);
    match counter {
        Counter::Naive => {
            let mask = if want_singular {
                Some(singular_mask(phi, p, limits)?)
            } else {
                None
            };
            let t = naive_tally(&sys, p, k, mask.as_deref(), limits)?;
            let all = timed(start, t.all.into(), t.visited, counter);
            let sing = want_singular.then(|| timed(start, t.singular.into(), t.visited, counter));
            Ok((all, sing))
        }
        _ => {
            let out = tree_count(&sys, p, k, want_singular && !want_all, limits)?;
            let sing = want_singular.then(|| timed(start, out.singular.clone(), out.visited, counter));
            Ok((timed(start, out.all, out.visited, counter), sing))
        }
    }
}

/// `#X(F_p[t]/(t^e))` by enumerating tuples of truncated series.
pub fn count_points_jetring(x: &AffineScheme, p: u64, e: u32, limits: &Limits) -> Result<CountResult> {
    check_prime(p)?;
    if e == 0 {
        return Err(Error::invalid("truncation length must be at least 1"));
    }
    let m = x.ambient_dim();
    limits.check_enumeration(p, e as u64 * m as u64)?;
    let start = Instant::now();
    let e = e as usize;
    let terms: Vec<Vec<(u64, Vec<(usize, u32)>)>> = x
        .equations()
        .iter()
        .map(|f| {
            f.terms()
                .filter_map(|(mono, c)| {
                    let c = c.mod_floor(&BigInt::from(p)).to_u64().expect("reduced");
                    (c != 0).then(|| {
                        let factors = mono.0.iter().enumerate().filter(|(_, &d)| d > 0).map(|(i, &d)| (i, d)).collect();
                        (c, factors)
                    })
                })
                .collect()
        })
        .collect();
    let mut digits = vec![0u64; m * e];
    let mut count: u64 = 0;
    let mut visited: u64 = 0;
    crate::scheme::for_each_point::<Error>(&mut digits, p, &mut |d| {
        visited += 1;
        let point: Vec<TruncatedSeries> = d
            .chunks(e)
            .map(|c| TruncatedSeries::new(c.to_vec(), p).expect("valid series"))
            .collect();
        let ok = terms.iter().all(|f| {
            let mut acc = TruncatedSeries::constant(0, p, e);
            for (c, factors) in f {
                let mut t = TruncatedSeries::constant(*c, p, e);
                for &(i, d) in factors {
                    t = t.mul(&point[i].pow(d));
                }
                acc = acc.add(&t);
            }
            acc.is_zero()
        });
        if ok {
            count += 1;
        }
        Ok(())
    })?;
    Ok(timed(start, count.into(), visited, Counter::Jetring))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::var_list;
    use crate::scheme::jet_prolong;
    use proptest::prelude::*;

    fn lim() -> Limits {
        Limits::default()
    }

    fn scheme(vars: &[&str], eqs: &[&str], dim: usize, ci: bool) -> AffineScheme {
        AffineScheme::parse("X", vars, eqs, dim, ci).unwrap()
    }

    fn power_map(m: u32) -> PolyMorphism {
        PolyMorphism::parse(
            "pow",
            AffineScheme::affine_space("A", var_list(&["x"])),
            AffineScheme::affine_space("B", var_list(&["t"])),
            &[format!("x^{m}").as_str()],
        )
        .unwrap()
    }

    fn u(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn naive_examples() {
        let v = scheme(&["x"], &["x^2"], 0, true);
        assert_eq!(count_points_naive(&v, 3, 2, &lim()).unwrap().count, u(3));
        let a2 = AffineScheme::affine_space("A2", var_list(&["x", "y"]));
        assert_eq!(count_points_naive(&a2, 5, 1, &lim()).unwrap().count, u(25));
        let xy = scheme(&["x", "y"], &["x*y"], 1, true);
        assert_eq!(count_points_naive(&xy, 7, 1, &lim()).unwrap().count, u(13));
    }

    #[test]
    fn tree_examples() {
        let v = scheme(&["x"], &["x^2"], 0, true);
        assert_eq!(count_points_tree(&v, 3, 4, &lim()).unwrap().count, u(9));
        let unit = scheme(&["x"], &["x - 1"], 0, true);
        let r = count_points_tree(&unit, 5, 3, &lim()).unwrap();
        assert_eq!(r.count, u(1));
        assert_eq!(r.nodes_visited, 1);
        let q = scheme(&["x", "y", "z"], &["x^2 + y^2 + z^2"], 2, true);
        assert_eq!(
            count_points_tree(&q, 3, 2, &lim()).unwrap().count,
            count_points_naive(&q, 3, 2, &lim()).unwrap().count
        );
    }

    #[test]
    fn budget_is_enforced_before_running() {
        let a3 = AffineScheme::affine_space("A3", var_list(&["x", "y", "z"]));
        let tight = Limits { budget: 1000, prime_floor: 3 };
        let err = count_points_naive(&a3, 5, 2, &tight).unwrap_err();
        assert!(err.is_budget());
        assert!(count_points_jetring(&a3, 5, 2, &tight).unwrap_err().is_budget());
    }

    #[test]
    fn fiber_examples() {
        let sq = power_map(2);
        for method in [Method::Naive, Method::Tree] {
            let r = count_fiber(&sq, &[0], 3, 4, Filter::All, method, &lim()).unwrap();
            assert_eq!(r.count, u(9));
        }
        let id = PolyMorphism::parse(
            "id",
            AffineScheme::affine_space("A", var_list(&["x"])),
            AffineScheme::affine_space("B", var_list(&["t"])),
            &["x"],
        )
        .unwrap();
        for method in [Method::Naive, Method::Tree] {
            for y in [0u64, 17, 124] {
                assert_eq!(count_fiber(&id, &[y], 5, 3, Filter::All, method, &lim()).unwrap().count, u(1));
                assert_eq!(count_fiber(&id, &[y], 5, 3, Filter::Singular, method, &lim()).unwrap().count, u(0));
            }
        }
        let mult = PolyMorphism::parse(
            "mult",
            AffineScheme::affine_space("A", var_list(&["x", "y"])),
            AffineScheme::affine_space("B", var_list(&["t"])),
            &["x*y"],
        )
        .unwrap();
        for method in [Method::Naive, Method::Tree] {
            assert_eq!(count_fiber(&mult, &[0], 5, 1, Filter::All, method, &lim()).unwrap().count, u(9));
        }
        assert!(count_fiber(&mult, &[25], 5, 2, Filter::All, Method::Auto, &lim()).is_err());
        assert!(count_fiber(&mult, &[1, 2], 5, 2, Filter::All, Method::Auto, &lim()).is_err());
    }

    #[test]
    fn split_counts_agree_with_single_counts() {
        let q = PolyMorphism::parse(
            "q",
            AffineScheme::affine_space("A", var_list(&["x", "y", "z"])),
            AffineScheme::affine_space("B", var_list(&["t"])),
            &["x^2 + y^2 + z^2"],
        )
        .unwrap();
        for method in [Method::Naive, Method::Tree] {
            for y in 0..25u64 {
                let (all, sing) = count_fiber_split(&q, &[y], 5, 2, method, &lim()).unwrap();
                let a = count_fiber(&q, &[y], 5, 2, Filter::All, Method::Naive, &lim()).unwrap();
                let s = count_fiber(&q, &[y], 5, 2, Filter::Singular, Method::Naive, &lim()).unwrap();
                assert_eq!((all.count, sing.count), (a.count, s.count), "y = {y}");
            }
        }
        // only the origin is singular mod 5, so h(0,1) counts one point
        let s = count_fiber(&q, &[0], 5, 1, Filter::Singular, Method::Tree, &lim()).unwrap();
        assert_eq!(s.count, u(1));
    }

    #[test]
    fn singular_filter_respects_prime_floor() {
        let sq = power_map(3);
        assert!(count_fiber(&sq, &[0], 2, 3, Filter::Singular, Method::Tree, &lim()).is_err());
        let low = Limits::with_floor(2);
        let r = count_fiber(&sq, &[0], 2, 3, Filter::Singular, Method::Tree, &low).unwrap();
        assert_eq!(r.count, u(4));
    }

    #[test]
    fn jetring_examples() {
        let v = scheme(&["x"], &["x^2"], 0, true);
        assert_eq!(count_points_jetring(&v, 3, 2, &lim()).unwrap().count, u(3));
        let a1 = AffineScheme::affine_space("A1", var_list(&["x"]));
        assert_eq!(count_points_jetring(&a1, 5, 3, &lim()).unwrap().count, u(125));
    }

    #[test]
    fn jet_functor_identity() {
        let cases = [
            scheme(&["x"], &["x^2"], 0, true),
            scheme(&["x", "y"], &["x*y"], 1, true),
            scheme(&["x", "y"], &["x^2 + y^3"], 1, true),
        ];
        for x in &cases {
            for p in [3u64, 5] {
                for k in 0..=2u32 {
                    let jets = jet_prolong(x, k).scheme;
                    assert_eq!(
                        count_points_jetring(x, p, k + 1, &lim()).unwrap().count,
                        count_points_naive(&jets, p, 1, &lim()).unwrap().count,
                        "{:?} p={p} k={k}",
                        x.equations()
                    );
                }
            }
        }
    }

    #[test]
    fn multiplicativity() {
        let a = scheme(&["x", "y"], &["x*y - 1"], 1, true);
        let b = AffineScheme::parse("Z", &["z"], &["z^2"], 0, true).unwrap();
        let ab = a.product(&b).unwrap();
        for (p, k) in [(3u64, 1u32), (3, 2), (5, 2)] {
            let lhs = count_points_tree(&ab, p, k, &lim()).unwrap().count;
            let rhs = count_points_naive(&a, p, k, &lim()).unwrap().count * count_points_naive(&b, p, k, &lim()).unwrap().count;
            assert_eq!(lhs, rhs);
        }
    }

    fn random_poly() -> impl Strategy<Value = String> {
        let term = (-3i64..=3, 0u32..=3, 0u32..=3, 0u32..=3);
        prop::collection::vec(term, 1..=4).prop_map(|ts| {
            ts.into_iter()
                .map(|(c, a, b, d)| {
                    // keep total degree at most 3
                    let b = b.min(3 - a.min(3));
                    let d = d.min(3 - a.min(3) - b);
                    format!("{c}*x^{a}*y^{b}*z^{d}")
                })
                .collect::<Vec<_>>()
                .join(" + ")
                .replace("+ -", "- ")
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn tree_matches_naive(
            f in random_poly(),
            g in random_poly(),
            neqs in 1usize..=2,
            nvars in 1usize..=3,
            p in prop::sample::select(vec![3u64, 5]),
            k in 1u32..=3,
        ) {
            let names = ["x", "y", "z"];
            let all = var_list(&names);
            let vars = var_list(&names[..nvars]);
            let mut eqs = Vec::new();
            for text in [f, g].iter().take(neqs) {
                let full = IntPoly::parse(text, &all).unwrap();
                let keep: Vec<(usize, BigInt)> = (nvars..3).map(|i| (i, BigInt::from(1))).collect();
                eqs.push(full.specialize(&keep).with_vars(&vars).unwrap());
            }
            let ci = neqs <= nvars;
            let dim = nvars.saturating_sub(neqs);
            let x = AffineScheme::new("X", vars, eqs, dim, ci).unwrap();
            let naive = count_points_naive(&x, p, k, &lim()).unwrap();
            let tree = count_points_tree(&x, p, k, &lim()).unwrap();
            prop_assert_eq!(naive.count, tree.count);
        }

        #[test]
        fn level_counts_are_monotone(
            f in random_poly(),
            p in prop::sample::select(vec![3u64, 5]),
            k in 2u32..=3,
        ) {
            let vars = var_list(&["x", "y", "z"]);
            let x = AffineScheme::new("X", vars.clone(), vec![IntPoly::parse(&f, &vars).unwrap()], 2, true).unwrap();
            let hi = count_points_tree(&x, p, k, &lim()).unwrap().count;
            let lo = count_points_tree(&x, p, k - 1, &lim()).unwrap().count;
            prop_assert!(hi <= lo * BigUint::from(p).pow(3));
        }

        #[test]
        fn singular_filter_is_subadditive(y in 0u64..27, m in 2u32..=3) {
            let phi = power_map(m);
            let (all, sing) = count_fiber_split(&phi, &[y], 3, 3, Method::Tree, &lim()).unwrap();
            prop_assert!(sing.count <= all.count);
        }
    }
}
