//! Affine schemes, polynomial morphisms, their jet prolongations, and the
//! Jacobian test for the non-smooth locus of a morphism over `F_p`.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::linalg::rank_mod_p;
use crate::poly::{jet_expansion, jet_variables, IntPoly, ModPoly};

/// A closed subscheme of affine space cut out by integer polynomials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineScheme {
    name: String,
    vars: Vec<String>,
    equations: Vec<IntPoly>,
    declared_dim: usize,
    complete_intersection: bool,
}

impl AffineScheme {
    pub fn new(
        name: impl Into<String>,
        vars: Vec<String>,
        equations: Vec<IntPoly>,
        declared_dim: usize,
        complete_intersection: bool,
    ) -> Result<Self> {
        let name = name.into();
        if declared_dim > vars.len() {
            return Err(Error::invalid(format!(
                "scheme `{name}`: declared dimension {declared_dim} exceeds ambient dimension {}",
                vars.len()
            )));
        }
        let mut seen = BTreeSet::new();
        for v in &vars {
            if !seen.insert(v) {
                return Err(Error::invalid(format!("scheme `{name}`: duplicate variable `{v}`")));
            }
        }
        for eq in &equations {
            if eq.vars() != vars.as_slice() {
                return Err(Error::invalid(format!(
                    "scheme `{name}`: equation `{eq}` is not over the declared variables"
                )));
            }
        }
        if complete_intersection && equations.len() != vars.len() - declared_dim {
            return Err(Error::invalid(format!(
                "scheme `{name}`: flagged complete intersection but has {} equations for codimension {}",
                equations.len(),
                vars.len() - declared_dim
            )));
        }
        Ok(AffineScheme {
            name,
            vars,
            equations,
            declared_dim,
            complete_intersection,
        })
    }

    /// Affine space: no equations, complete intersection of codimension 0.
    pub fn affine_space(name: impl Into<String>, vars: Vec<String>) -> Self {
        let dim = vars.len();
        AffineScheme::new(name, vars, Vec::new(), dim, true).expect("affine space is well formed")
    }

    /// Parses equation texts over `vars`.
    pub fn parse(
        name: impl Into<String>,
        vars: &[&str],
        equations: &[&str],
        declared_dim: usize,
        complete_intersection: bool,
    ) -> Result<Self> {
        let vars: Vec<String> = vars.iter().map(|s| s.to_string()).collect();
        let eqs = equations
            .iter()
            .map(|t| IntPoly::parse(t, &vars))
            .collect::<Result<Vec<_>>>()?;
        AffineScheme::new(name, vars, eqs, declared_dim, complete_intersection)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn ambient_dim(&self) -> usize {
        self.vars.len()
    }

    pub fn equations(&self) -> &[IntPoly] {
        &self.equations
    }

    pub fn declared_dim(&self) -> usize {
        self.declared_dim
    }

    pub fn is_complete_intersection(&self) -> bool {
        self.complete_intersection
    }

    pub fn codim(&self) -> usize {
        self.vars.len() - self.declared_dim
    }

    /// `X x X'` on disjoint variable sets.
    pub fn product(&self, other: &AffineScheme) -> Result<AffineScheme> {
        if self.vars.iter().any(|v| other.vars.contains(v)) {
            return Err(Error::invalid("product of schemes with shared variables"));
        }
        let vars: Vec<String> = self.vars.iter().chain(&other.vars).cloned().collect();
        let eqs = self
            .equations
            .iter()
            .chain(&other.equations)
            .map(|e| e.with_vars(&vars))
            .collect::<Result<Vec<_>>>()?;
        AffineScheme::new(
            format!("{}x{}", self.name, other.name),
            vars,
            eqs,
            self.declared_dim + other.declared_dim,
            self.complete_intersection && other.complete_intersection,
        )
    }

    /// Whether a point with coordinates in `[0, modulus)` satisfies every
    /// equation modulo `modulus`.
    pub fn contains_mod(&self, point: &[u64], modulus: u64) -> bool {
        self.equations
            .iter()
            .all(|e| ModPoly::new(e, modulus).eval(point) == 0)
    }
}

/// A morphism `X -> Y` given by one integer polynomial in the source
/// variables per target coordinate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyMorphism {
    name: String,
    source: AffineScheme,
    target: AffineScheme,
    components: Vec<IntPoly>,
}

impl PolyMorphism {
    /// Builds the morphism and checks on sampled `F_p` points that the
    /// components land in the target.
    pub fn new(
        name: impl Into<String>,
        source: AffineScheme,
        target: AffineScheme,
        components: Vec<IntPoly>,
    ) -> Result<Self> {
        let name = name.into();
        if components.len() != target.ambient_dim() {
            return Err(Error::invalid(format!(
                "morphism `{name}`: {} components for a target of ambient dimension {}",
                components.len(),
                target.ambient_dim()
            )));
        }
        for c in &components {
            if c.vars() != source.vars() {
                return Err(Error::invalid(format!(
                    "morphism `{name}`: component `{c}` is not over the source variables"
                )));
            }
        }
        let phi = PolyMorphism {
            name,
            source,
            target,
            components,
        };
        phi.check_lands_in_target(&[5, 7], 0)?;
        Ok(phi)
    }

    pub fn parse(
        name: impl Into<String>,
        source: AffineScheme,
        target: AffineScheme,
        components: &[&str],
    ) -> Result<Self> {
        let comps = components
            .iter()
            .map(|t| IntPoly::parse(t, source.vars()))
            .collect::<Result<Vec<_>>>()?;
        PolyMorphism::new(name, source, target, comps)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn source(&self) -> &AffineScheme {
        &self.source
    }

    pub fn target(&self) -> &AffineScheme {
        &self.target
    }

    pub fn components(&self) -> &[IntPoly] {
        &self.components
    }

    /// `d = dim X - dim Y` from the declared dimensions.
    pub fn relative_dim(&self) -> i64 {
        self.source.declared_dim as i64 - self.target.declared_dim as i64
    }

    /// Image of a source point, reduced modulo `modulus`.
    pub fn image_mod(&self, point: &[u64], modulus: u64) -> Vec<u64> {
        self.components
            .iter()
            .map(|c| ModPoly::new(c, modulus).eval(point))
            .collect()
    }

    /// Samples source points over each prime and verifies every target
    /// equation vanishes at their images. Small ambient spaces are
    /// enumerated exhaustively; larger ones get 512 seeded random points.
    pub fn check_lands_in_target(&self, primes: &[u64], seed: u64) -> Result<()> {
        if self.target.equations.is_empty() {
            return Ok(());
        }
        let m = self.source.ambient_dim();
        for &p in primes {
            let src_eqs: Vec<ModPoly> = self.source.equations.iter().map(|e| ModPoly::new(e, p)).collect();
            let comps: Vec<ModPoly> = self.components.iter().map(|c| ModPoly::new(c, p)).collect();
            let tgt_eqs: Vec<ModPoly> = self.target.equations.iter().map(|e| ModPoly::new(e, p)).collect();
            let check = |x: &[u64]| -> Result<()> {
                if src_eqs.iter().any(|e| e.eval(x) != 0) {
                    return Ok(());
                }
                let y: Vec<u64> = comps.iter().map(|c| c.eval(x)).collect();
                if let Some(bad) = tgt_eqs.iter().position(|e| e.eval(&y) != 0) {
                    return Err(Error::invalid(format!(
                        "morphism `{}` does not land in `{}`: source point {:?} mod {p} maps to {:?}, violating target equation `{}`",
                        self.name, self.target.name, x, y, self.target.equations[bad]
                    )));
                }
                Ok(())
            };
            let total = (p as f64).powi(m as i32);
            if total <= 4096.0 {
                let mut x = vec![0u64; m];
                for_each_point(&mut x, p, &mut |x| check(x))?;
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(seed ^ p);
                for _ in 0..512 {
                    let x: Vec<u64> = (0..m).map(|_| rng.gen_range(0..p)).collect();
                    check(&x)?;
                }
            }
        }
        Ok(())
    }
}

/// Visits every point of `[0, base)^n` in lexicographic order.
pub(crate) fn for_each_point<E>(
    x: &mut [u64],
    base: u64,
    f: &mut dyn FnMut(&[u64]) -> Result<(), E>,
) -> Result<(), E> {
    x.iter_mut().for_each(|v| *v = 0);
    loop {
        f(x)?;
        let mut i = x.len();
        loop {
            if i == 0 {
                return Ok(());
            }
            i -= 1;
            x[i] += 1;
            if x[i] < base {
                break;
            }
            x[i] = 0;
        }
    }
}

/// A jet prolongation: `J_k(X)`, and `J_k(phi)` when a morphism was prolonged.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JetSystem {
    pub level: u32,
    pub scheme: AffineScheme,
    pub morphism: Option<PolyMorphism>,
}

fn prolong_scheme(x: &AffineScheme, k: u32) -> AffineScheme {
    let vars = jet_variables(x.vars(), k);
    let mut eqs = Vec::with_capacity(x.equations.len() * (k as usize + 1));
    for f in &x.equations {
        eqs.extend(jet_expansion(f, k));
    }
    let name = if k == 0 {
        x.name.clone()
    } else {
        format!("J{k}({})", x.name)
    };
    AffineScheme {
        name,
        vars,
        equations: eqs,
        declared_dim: (k as usize + 1) * x.declared_dim,
        complete_intersection: x.complete_intersection,
    }
}

/// `J_k(X)`: equations `f^(u)` for every defining equation `f` and `u <= k`,
/// grouped by equation then by level.
pub fn jet_prolong(x: &AffineScheme, k: u32) -> JetSystem {
    JetSystem {
        level: k,
        scheme: prolong_scheme(x, k),
        morphism: None,
    }
}

/// `J_k(phi) = (phi, phi^(1), ..., phi^(k))`. The component list follows the
/// variable order of `J_k(Y)`: all jets of the first target coordinate, then
/// of the second, and so on.
pub fn jet_morphism(phi: &PolyMorphism, k: u32) -> JetSystem {
    let source = prolong_scheme(&phi.source, k);
    let target = prolong_scheme(&phi.target, k);
    let mut comps = Vec::with_capacity(phi.components.len() * (k as usize + 1));
    for c in &phi.components {
        comps.extend(jet_expansion(c, k));
    }
    let name = if k == 0 {
        phi.name.clone()
    } else {
        format!("J{k}({})", phi.name)
    };
    let morphism = PolyMorphism {
        name,
        source: source.clone(),
        target,
        components: comps,
    };
    JetSystem {
        level: k,
        scheme: source,
        morphism: Some(morphism),
    }
}

/// Symbolic Jacobian of a list of polynomials with respect to all of their
/// variables, with a per-prime compiled form.
#[derive(Clone, Debug)]
pub struct Jacobian {
    pub entries: Vec<Vec<IntPoly>>,
}

impl Jacobian {
    pub fn of(polys: &[IntPoly], nvars: usize) -> Self {
        let entries = polys
            .iter()
            .map(|f| (0..nvars).map(|i| f.derivative_at(i)).collect())
            .collect();
        Jacobian { entries }
    }

    pub fn rows(&self) -> usize {
        self.entries.len()
    }

    pub fn compile(&self, modulus: u64) -> CompiledJacobian {
        CompiledJacobian {
            entries: self
                .entries
                .iter()
                .map(|row| row.iter().map(|e| ModPoly::new(e, modulus)).collect())
                .collect(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct CompiledJacobian {
    entries: Vec<Vec<ModPoly>>,
}

impl CompiledJacobian {
    pub fn eval(&self, point: &[u64]) -> Vec<Vec<u64>> {
        self.entries
            .iter()
            .map(|row| row.iter().map(|e| e.eval(point)).collect())
            .collect()
    }

    pub fn rank_at(&self, point: &[u64], p: u64) -> usize {
        rank_mod_p(&self.eval(point), p)
    }
}

/// Jacobian of (source equations, components) over the source variables.
pub fn morphism_jacobian(phi: &PolyMorphism) -> Jacobian {
    let polys: Vec<IntPoly> = phi
        .source
        .equations
        .iter()
        .chain(&phi.components)
        .cloned()
        .collect();
    Jacobian::of(&polys, phi.source.ambient_dim())
}

fn require_ci(phi: &PolyMorphism) -> Result<()> {
    if !phi.source.complete_intersection {
        return Err(Error::Refused(format!(
            "source `{}` is not flagged as a complete intersection; its non-smooth locus is not computed",
            phi.source.name
        )));
    }
    Ok(())
}

/// Whether `point` (coordinates mod `p`) lies in the non-smooth locus of
/// `phi`: the Jacobian of (source equations, components) has rank below
/// `l + n` there.
pub fn is_singular_point(phi: &PolyMorphism, point: &[u64], p: u64) -> Result<bool> {
    require_ci(phi)?;
    if point.len() != phi.source.ambient_dim() {
        return Err(Error::invalid(format!(
            "point has {} coordinates, source has {} variables",
            point.len(),
            phi.source.ambient_dim()
        )));
    }
    let reduced: Vec<u64> = point.iter().map(|v| v % p).collect();
    if !phi.source.contains_mod(&reduced, p) {
        return Err(Error::invalid(format!(
            "point {reduced:?} does not satisfy the equations of `{}` mod {p}",
            phi.source.name
        )));
    }
    let jac = morphism_jacobian(phi);
    Ok(jac.compile(p).rank_at(&reduced, p) < jac.rows())
}

/// Every `F_p` point of the source at which `phi` is not smooth.
pub fn singular_reduction_set(
    phi: &PolyMorphism,
    p: u64,
    limits: &Limits,
) -> Result<BTreeSet<Vec<u64>>> {
    require_ci(phi)?;
    limits.check_prime(p)?;
    let m = phi.source.ambient_dim();
    limits.check_enumeration(p, m as u64)?;
    let eqs: Vec<ModPoly> = phi.source.equations.iter().map(|e| ModPoly::new(e, p)).collect();
    let jac = morphism_jacobian(phi);
    let cj = jac.compile(p);
    let full = jac.rows();
    let mut out = BTreeSet::new();
    let mut x = vec![0u64; m];
    for_each_point::<Error>(&mut x, p, &mut |x| {
        if eqs.iter().all(|e| e.eval(x) == 0) && cj.rank_at(x, p) < full {
            out.insert(x.to_vec());
        }
        Ok(())
    })?;
    Ok(out)
}

/// Replaces `phi`'s components `c` by `c - y`, giving the equations of the
/// fiber over `y` inside the source.
pub fn fiber_equations(phi: &PolyMorphism, y: &[BigInt]) -> Vec<IntPoly> {
    let vars = phi.source.vars();
    phi.source
        .equations
        .iter()
        .cloned()
        .chain(
            phi.components
                .iter()
                .zip(y)
                .map(|(c, yi)| c - &IntPoly::constant(vars, yi.clone())),
        )
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{jet_var_index, var_list};

    fn line(name: &str) -> AffineScheme {
        AffineScheme::affine_space(name, var_list(&["x"]))
    }

    fn squaring() -> PolyMorphism {
        PolyMorphism::parse("sq", line("X"), AffineScheme::affine_space("Y", var_list(&["t"])), &["x^2"]).unwrap()
    }

    fn sum_of_squares(n: usize) -> PolyMorphism {
        let names = ["x", "y", "z", "w"];
        let vars: Vec<&str> = names[..n].to_vec();
        let expr = vars.iter().map(|v| format!("{v}^2")).collect::<Vec<_>>().join(" + ");
        PolyMorphism::parse(
            "q",
            AffineScheme::affine_space("A", var_list(&vars)),
            AffineScheme::affine_space("B", var_list(&["t"])),
            &[expr.as_str()],
        )
        .unwrap()
    }

    fn strings(x: &AffineScheme) -> Vec<String> {
        x.equations().iter().map(|e| e.to_string()).collect()
    }

    #[test]
    fn scheme_invariants_are_enforced() {
        assert!(AffineScheme::parse("X", &["x"], &["x"], 2, false).is_err());
        assert!(AffineScheme::parse("X", &["x", "y"], &["x*y"], 0, true).is_err());
        assert!(AffineScheme::parse("X", &["x", "x"], &[], 1, false).is_err());
        assert!(AffineScheme::parse("X", &["x"], &["y"], 0, false).is_err());
    }

    #[test]
    fn jet_prolong_examples() {
        let x = AffineScheme::parse("X", &["x1", "x2"], &["x1*x2^2"], 1, true).unwrap();
        let j = jet_prolong(&x, 1);
        assert_eq!(j.scheme.ambient_dim(), 4);
        assert_eq!(strings(&j.scheme), vec!["x1*x2^2", "x1(1)*x2^2 + 2*x1*x2*x2(1)"]);

        let a1 = line("A1");
        let j = jet_prolong(&a1, 2);
        assert_eq!(j.scheme.ambient_dim(), 3);
        assert!(j.scheme.equations().is_empty());

        let v = AffineScheme::parse("V", &["x"], &["x^2"], 0, true).unwrap();
        assert_eq!(strings(&jet_prolong(&v, 1).scheme), vec!["x^2", "2*x*x(1)"]);

        assert_eq!(jet_prolong(&x, 0).scheme, x);
    }

    #[test]
    fn jet_sizes_and_dimension_convention() {
        let x = AffineScheme::parse("X", &["a", "b", "c"], &["a*b - c^2", "a + b"], 1, true).unwrap();
        for k in 0..4u32 {
            let j = jet_prolong(&x, k).scheme;
            assert_eq!(j.ambient_dim(), 3 * (k as usize + 1));
            assert_eq!(j.equations().len(), 2 * (k as usize + 1));
            assert_eq!(j.declared_dim(), k as usize + 1);
        }
    }

    #[test]
    fn jet_morphism_examples() {
        let j = jet_morphism(&squaring(), 1);
        let phi = j.morphism.unwrap();
        let comps: Vec<String> = phi.components().iter().map(|c| c.to_string()).collect();
        assert_eq!(comps, vec!["x^2", "2*x*x(1)"]);
        assert_eq!(phi.relative_dim(), 0);

        let mult = PolyMorphism::parse(
            "mult",
            AffineScheme::affine_space("A2", var_list(&["x", "y"])),
            AffineScheme::affine_space("A1", var_list(&["t"])),
            &["x*y"],
        )
        .unwrap();
        let phi = jet_morphism(&mult, 1).morphism.unwrap();
        let comps: Vec<String> = phi.components().iter().map(|c| c.to_string()).collect();
        assert_eq!(comps, vec!["x*y", "x(1)*y + x*y(1)"]);
        assert_eq!(phi.relative_dim(), 2);

        assert_eq!(jet_morphism(&mult, 0).morphism.unwrap(), mult);
    }

    #[test]
    fn singular_point_examples() {
        let sq = squaring();
        assert!(is_singular_point(&sq, &[0], 5).unwrap());
        assert!(!is_singular_point(&sq, &[3], 5).unwrap());
        assert!(!is_singular_point(&sum_of_squares(3), &[1, 2, 2], 3).unwrap());

        let not_ci = PolyMorphism::parse(
            "f",
            AffineScheme::parse("X", &["x", "y"], &["x*y"], 1, false).unwrap(),
            line("Y"),
            &["x"],
        )
        .unwrap();
        assert!(matches!(is_singular_point(&not_ci, &[0, 0], 5), Err(Error::Refused(_))));

        let on_curve = PolyMorphism::parse(
            "f",
            AffineScheme::parse("X", &["x", "y"], &["y - x^2"], 1, true).unwrap(),
            line("Y"),
            &["x"],
        )
        .unwrap();
        assert!(is_singular_point(&on_curve, &[1, 2], 5).is_err());
        assert!(!is_singular_point(&on_curve, &[2, 4], 5).unwrap());
    }

    #[test]
    fn singular_reduction_set_examples() {
        let limits = Limits::default();
        let sq = squaring();
        let expected: BTreeSet<Vec<u64>> = [vec![0]].into_iter().collect();
        assert_eq!(singular_reduction_set(&sq, 3, &limits).unwrap(), expected);

        let id = PolyMorphism::parse("id", line("X"), line("Y"), &["x"]).unwrap();
        assert!(singular_reduction_set(&id, 5, &limits).unwrap().is_empty());

        // brute force over the 81 points of F_3^4: only the origin has zero gradient
        let q4 = sum_of_squares(4);
        let mut brute = BTreeSet::new();
        for idx in 0..81u64 {
            let x = vec![idx / 27, idx / 9 % 3, idx / 3 % 3, idx % 3];
            if x.iter().all(|v| (2 * v) % 3 == 0) {
                brute.insert(x);
            }
        }
        assert_eq!(singular_reduction_set(&q4, 3, &limits).unwrap(), brute);
        assert_eq!(brute.len(), 1);

        let tight = Limits { budget: 10, prime_floor: 3 };
        assert!(matches!(singular_reduction_set(&q4, 3, &tight), Err(Error::Budget { .. })));
    }

    #[test]
    fn landing_check_catches_bad_morphisms() {
        let circle = AffineScheme::parse("C", &["u", "v"], &["u^2 + v^2 - 1"], 1, true).unwrap();
        let good = PolyMorphism::parse("rot", circle.clone(), circle.clone(), &["v", "-u"]);
        assert!(good.is_ok());
        let bad = PolyMorphism::parse("bad", circle.clone(), circle, &["u", "u"]);
        assert!(bad.is_err());
    }

    #[test]
    fn truncation_compatibility() {
        let x = AffineScheme::parse("X", &["x", "y"], &["x^2 + y^3", "x*y - 1"], 0, true).unwrap();
        let big = jet_prolong(&x, 3).scheme;
        for k2 in 0..=3u32 {
            let small = jet_prolong(&x, k2).scheme;
            for (e, f) in x.equations().iter().enumerate() {
                for u in 0..=k2 as usize {
                    let from_big = &big.equations()[e * 4 + u];
                    let from_small = small.equations()[e * (k2 as usize + 1) + u]
                        .with_vars(big.vars())
                        .unwrap();
                    assert_eq!(from_big, &from_small, "f = {f}, u = {u}, k2 = {k2}");
                }
            }
        }
    }

    #[test]
    fn jacobian_of_jets_is_block_triangular() {
        let phi = PolyMorphism::parse(
            "f",
            AffineScheme::parse("X", &["x", "y", "z"], &["x*y - z^2"], 2, true).unwrap(),
            AffineScheme::affine_space("Y", var_list(&["s", "t"])),
            &["x^2 + y", "y*z^3"],
        )
        .unwrap();
        let base = morphism_jacobian(&phi);
        let m = phi.source().ambient_dim();
        for k in 1..=2u32 {
            let jphi = jet_morphism(&phi, k).morphism.unwrap();
            let jac = morphism_jacobian(&jphi);
            let jvars = jphi.source().vars().to_vec();
            let nfun = base.rows();
            for f in 0..nfun {
                for u2 in 0..=k {
                    // rows: equations first then components, each grouped by level
                    let row = if f < 1 {
                        f * (k as usize + 1) + u2 as usize
                    } else {
                        (k as usize + 1) + (f - 1) * (k as usize + 1) + u2 as usize
                    };
                    for i in 0..m {
                        for u1 in 0..=k {
                            let entry = &jac.entries[row][jet_var_index(i, u1, k)];
                            if u1 > u2 {
                                assert!(entry.is_zero());
                            } else if u1 == u2 {
                                let diag = base.entries[f][i].with_vars(&jvars).unwrap();
                                assert_eq!(entry, &diag);
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn smooth_locus_correspondence() {
        let mult = PolyMorphism::parse(
            "mult",
            AffineScheme::affine_space("A2", var_list(&["x", "y"])),
            AffineScheme::affine_space("A1", var_list(&["t"])),
            &["x*y"],
        )
        .unwrap();
        let cases = [squaring(), mult, sum_of_squares(3)];
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for phi in &cases {
            let m = phi.source().ambient_dim();
            for k in 0..=2u32 {
                let jphi = jet_morphism(phi, k).morphism.unwrap();
                for p in [5u64, 7] {
                    for _ in 0..60 {
                        let jet_point: Vec<u64> =
                            (0..jphi.source().ambient_dim()).map(|_| rng.gen_range(0..p)).collect();
                        // force the level-0 truncation onto the singular locus half the time
                        let mut jet_point = jet_point;
                        if rng.gen_bool(0.5) {
                            for i in 0..m {
                                jet_point[jet_var_index(i, 0, k)] = 0;
                            }
                        }
                        let base: Vec<u64> = (0..m).map(|i| jet_point[jet_var_index(i, 0, k)]).collect();
                        assert_eq!(
                            is_singular_point(&jphi, &jet_point, p).unwrap(),
                            is_singular_point(phi, &base, p).unwrap(),
                            "{} k={k} p={p} point={jet_point:?}",
                            phi.name()
                        );
                    }
                }
            }
        }
    }
}
