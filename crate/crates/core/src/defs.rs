//! Scheme and morphism definition files.
//!
//! ```text
//! # comment
//! [scheme X]
//! vars = x, y
//! eqs  = x*y            # ';'-separated, optional
//! dim  = 1
//! ci   = yes
//!
//! [morphism phi]
//! source = X
//! target = Y
//! maps   = x + y        # ';'-separated, one per target variable
//! ```
//!
//! Without `eqs` a scheme is affine space and `dim`, `ci` default to the
//! number of variables and `yes`. With `eqs`, `dim` is required and `ci`
//! defaults to `no`. Sections may appear in any order.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::poly::IntPoly;
use crate::scheme::{AffineScheme, PolyMorphism};

#[derive(Clone, Debug, Default)]
pub struct Definitions {
    pub schemes: BTreeMap<String, AffineScheme>,
    pub morphisms: BTreeMap<String, PolyMorphism>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum SectionKind {
    Scheme,
    Morphism,
}

struct Section {
    kind: SectionKind,
    name: String,
    line: usize,
    entries: BTreeMap<String, (usize, String)>,
}

const SCHEME_KEYS: [&str; 4] = ["vars", "eqs", "dim", "ci"];
const MORPHISM_KEYS: [&str; 3] = ["source", "target", "maps"];

fn def_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Definition { line, msg: msg.into() }
}

fn split_list(value: &str, sep: char) -> Vec<&str> {
    value.split(sep).map(str::trim).filter(|s| !s.is_empty()).collect()
}

impl Section {
    fn get(&self, key: &str) -> Option<&(usize, String)> {
        self.entries.get(key)
    }

    fn require(&self, key: &str) -> Result<&(usize, String)> {
        self.get(key)
            .ok_or_else(|| def_err(self.line, format!("section `{}` is missing key `{key}`", self.name)))
    }
}

fn parse_sections(text: &str) -> Result<Vec<Section>> {
    let mut sections: Vec<Section> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(header) = content.strip_prefix('[') {
            let header = header
                .strip_suffix(']')
                .ok_or_else(|| def_err(line, "unterminated section header"))?;
            let mut words = header.split_whitespace();
            let kind = match words.next() {
                Some("scheme") => SectionKind::Scheme,
                Some("morphism") => SectionKind::Morphism,
                other => {
                    return Err(def_err(
                        line,
                        format!("unknown section kind `{}`", other.unwrap_or("")),
                    ))
                }
            };
            let name = words.next().ok_or_else(|| def_err(line, "section header needs a name"))?;
            if words.next().is_some() {
                return Err(def_err(line, "section names may not contain spaces"));
            }
            if sections.iter().any(|s| s.name == name) {
                return Err(def_err(line, format!("duplicate section name `{name}`")));
            }
            sections.push(Section {
                kind,
                name: name.to_string(),
                line,
                entries: BTreeMap::new(),
            });
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| def_err(line, "expected `key = value`"))?;
        let key = key.trim();
        let section = sections
            .last_mut()
            .ok_or_else(|| def_err(line, format!("key `{key}` outside any section")))?;
        let allowed: &[&str] = match section.kind {
            SectionKind::Scheme => &SCHEME_KEYS,
            SectionKind::Morphism => &MORPHISM_KEYS,
        };
        if !allowed.contains(&key) {
            return Err(def_err(
                line,
                format!("unknown key `{key}` (expected one of {})", allowed.join(", ")),
            ));
        }
        if section.entries.insert(key.to_string(), (line, value.trim().to_string())).is_some() {
            return Err(def_err(line, format!("duplicate key `{key}`")));
        }
    }
    Ok(sections)
}

fn build_scheme(s: &Section) -> Result<AffineScheme> {
    let (vline, vars) = s.require("vars")?;
    let vars: Vec<String> = split_list(vars, ',').into_iter().map(String::from).collect();
    if vars.is_empty() {
        return Err(def_err(*vline, "`vars` is empty"));
    }
    let eqs = match s.get("eqs") {
        Some((line, text)) => split_list(text, ';')
            .into_iter()
            .map(|t| IntPoly::parse(t, &vars).map_err(|e| def_err(*line, format!("eqs: {e}"))))
            .collect::<Result<Vec<_>>>()?,
        None => Vec::new(),
    };
    let has_eqs = s.get("eqs").is_some();
    let dim = match s.get("dim") {
        Some((line, v)) => v
            .parse::<usize>()
            .map_err(|_| def_err(*line, format!("dim: expected a natural number, got `{v}`")))?,
        None if !has_eqs => vars.len(),
        None => return Err(def_err(s.line, format!("section `{}` has equations but no `dim`", s.name))),
    };
    let ci = match s.get("ci") {
        Some((line, v)) => match v.as_str() {
            "yes" => true,
            "no" => false,
            _ => return Err(def_err(*line, format!("ci: expected yes or no, got `{v}`"))),
        },
        None => !has_eqs,
    };
    AffineScheme::new(s.name.clone(), vars, eqs, dim, ci).map_err(|e| def_err(s.line, e.to_string()))
}

fn build_morphism(s: &Section, schemes: &BTreeMap<String, AffineScheme>) -> Result<PolyMorphism> {
    let lookup = |key: &str| -> Result<AffineScheme> {
        let (line, name) = s.require(key)?;
        schemes
            .get(name)
            .cloned()
            .ok_or_else(|| def_err(*line, format!("{key}: no scheme named `{name}`")))
    };
    let source = lookup("source")?;
    let target = lookup("target")?;
    let (mline, maps) = s.require("maps")?;
    let comps = split_list(maps, ';')
        .into_iter()
        .map(|t| IntPoly::parse(t, source.vars()).map_err(|e| def_err(*mline, format!("maps: {e}"))))
        .collect::<Result<Vec<_>>>()?;
    PolyMorphism::new(s.name.clone(), source, target, comps).map_err(|e| def_err(s.line, e.to_string()))
}

impl Definitions {
    pub fn parse(text: &str) -> Result<Self> {
        let sections = parse_sections(text)?;
        let mut defs = Definitions::default();
        for s in sections.iter().filter(|s| s.kind == SectionKind::Scheme) {
            defs.schemes.insert(s.name.clone(), build_scheme(s)?);
        }
        for s in sections.iter().filter(|s| s.kind == SectionKind::Morphism) {
            let phi = build_morphism(s, &defs.schemes)?;
            defs.morphisms.insert(s.name.clone(), phi);
        }
        Ok(defs)
    }

    /// The named scheme, or the only one when `name` is `None`.
    pub fn scheme(&self, name: Option<&str>) -> Result<&AffineScheme> {
        pick(&self.schemes, name, "scheme")
    }

    pub fn morphism(&self, name: Option<&str>) -> Result<&PolyMorphism> {
        pick(&self.morphisms, name, "morphism")
    }
}

fn pick<'a, T>(map: &'a BTreeMap<String, T>, name: Option<&str>, what: &str) -> Result<&'a T> {
    match name {
        Some(n) => map.get(n).ok_or_else(|| Error::invalid(format!("no {what} named `{n}`"))),
        None if map.len() == 1 => Ok(map.values().next().expect("one entry")),
        None => Err(Error::invalid(format!(
            "{} {what}s defined; name one of: {}",
            map.len(),
            map.keys().cloned().collect::<Vec<_>>().join(", ")
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
# cone and its projection
[morphism sq]
source = A3
target = A1
maps = x^2 + y^2 + z^2

[scheme A3]
vars = x, y, z

[scheme A1]
vars = t

[scheme cross]
vars = x, y
eqs = x*y
dim = 1
ci = yes
";

    #[test]
    fn parses_sample() {
        let d = Definitions::parse(SAMPLE).unwrap();
        assert_eq!(d.schemes.len(), 3);
        let a3 = d.scheme(Some("A3")).unwrap();
        assert_eq!(a3.declared_dim(), 3);
        assert!(a3.is_complete_intersection());
        let cross = d.scheme(Some("cross")).unwrap();
        assert_eq!(cross.equations()[0].to_string(), "x*y");
        let phi = d.morphism(None).unwrap();
        assert_eq!(phi.relative_dim(), 2);
        assert!(d.scheme(None).is_err());
    }

    #[test]
    fn rejects_unknown_keys_with_line() {
        let err = Definitions::parse("[scheme X]\nvars = x\ndegree = 2\n").unwrap_err();
        assert!(matches!(err, Error::Definition { line: 3, ref msg } if msg.contains("degree")));
    }

    #[test]
    fn reports_bad_equations_and_references() {
        let err = Definitions::parse("[scheme X]\nvars = x\neqs = x + w\ndim = 0\n").unwrap_err();
        assert!(matches!(err, Error::Definition { line: 3, .. }));
        let err = Definitions::parse("[scheme X]\nvars = x\n[morphism f]\nsource = X\ntarget = Z\nmaps = x\n")
            .unwrap_err();
        assert!(matches!(err, Error::Definition { line: 5, .. }));
        let err = Definitions::parse("[scheme X]\nvars = x\neqs = x^2\n").unwrap_err();
        assert!(matches!(err, Error::Definition { line: 1, ref msg } if msg.contains("dim")));
        assert!(Definitions::parse("vars = x\n").is_err());
        assert!(Definitions::parse("[scheme X]\nvars = x\nci = maybe\n").is_err());
    }
}
