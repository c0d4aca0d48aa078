//! JSON workspace files: one algebra, named functionals and named lattices.
//!
//! ```json
//! {
//!   "algebra": {
//!     "basis": ["X", "Y", "Z"],
//!     "brackets": [{ "i": "X", "j": "Y", "result": { "Z": "1" } }]
//!   },
//!   "functionals": { "zstar": { "Z": "1" } },
//!   "lattices": {
//!     "int": { "malcev": true, "generators": [{ "X": 1 }, { "Y": 1 }, { "Z": 1 }] }
//!   }
//! }
//! ```
//!
//! Bracket indices are basis names or 1-based integers. Coefficients are
//! integers or `"p/q"` strings. Only one of `[a, b]`, `[b, a]` is needed.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::marker::PhantomData;
use std::path::Path;

use num_traits::Zero;
use serde::de::{self, Deserializer, MapAccess, Visitor};
use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::algebra::{AlgebraElement, GroupElement, LieAlgebra};
use crate::coadjoint::Functional;
use crate::error::{Error, Result};
use crate::lattice::LatticeSpec;
use crate::rational::{self, Rational};

/// Object whose keys must be distinct; keeps file order.
#[derive(Debug, Clone)]
struct UniqueMap<V>(Vec<(String, V)>);

impl<V> Default for UniqueMap<V> {
    fn default() -> Self {
        UniqueMap(Vec::new())
    }
}

impl<'de, V: Deserialize<'de>> Deserialize<'de> for UniqueMap<V> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V2<V>(PhantomData<V>);
        impl<'de, V: Deserialize<'de>> Visitor<'de> for V2<V> {
            type Value = UniqueMap<V>;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an object with distinct keys")
            }
            fn visit_map<A: MapAccess<'de>>(self, mut m: A) -> std::result::Result<Self::Value, A::Error> {
                let mut out: Vec<(String, V)> = Vec::new();
                while let Some((k, v)) = m.next_entry::<String, V>()? {
                    if out.iter().any(|(e, _)| *e == k) {
                        return Err(de::Error::custom(format!("duplicate name '{k}'")));
                    }
                    out.push((k, v));
                }
                Ok(UniqueMap(out))
            }
        }
        d.deserialize_map(V2(PhantomData))
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum Coefficient {
    Int(i64),
    Text(String),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum BasisRef {
    Index(usize),
    Name(String),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBracket {
    i: BasisRef,
    j: BasisRef,
    #[serde(alias = "coeffs")]
    result: UniqueMap<Coefficient>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAlgebra {
    #[serde(default)]
    dim: Option<usize>,
    basis: Vec<String>,
    #[serde(default)]
    brackets: Vec<RawBracket>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLattice {
    #[serde(default)]
    malcev: bool,
    generators: Vec<UniqueMap<Coefficient>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawWorkspace {
    algebra: RawAlgebra,
    #[serde(default)]
    functionals: UniqueMap<UniqueMap<Coefficient>>,
    #[serde(default)]
    lattices: UniqueMap<RawLattice>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Workspace {
    pub source: String,
    pub algebra: LieAlgebra,
    pub functionals: BTreeMap<String, Functional>,
    pub lattices: BTreeMap<String, LatticeSpec>,
}

struct Ctx<'a> {
    source: &'a str,
    text: &'a str,
}

impl Ctx<'_> {
    /// `source:line: msg`, with the line of the first quoted occurrence of `anchor`.
    fn err(&self, anchor: &str, msg: impl fmt::Display) -> Error {
        let needle = format!("\"{anchor}\"");
        let line = self
            .text
            .lines()
            .position(|l| l.contains(&needle))
            .map(|i| i + 1)
            .unwrap_or(1);
        Error::Input(format!("{}:{}: {}", self.source, line, msg))
    }

    fn coefficient(&self, anchor: &str, c: &Coefficient) -> Result<Rational> {
        match c {
            Coefficient::Int(v) => Ok(rational::int(*v)),
            Coefficient::Text(s) => rational::parse(s).map_err(|e| self.err(anchor, e)),
        }
    }

    fn vector(&self, anchor: &str, names: &[String], m: &UniqueMap<Coefficient>) -> Result<Vec<Rational>> {
        let mut v = vec![Rational::zero(); names.len()];
        for (key, c) in &m.0 {
            // a key that is not a basis name may be its 1-based index
            let idx = names
                .iter()
                .position(|n| n == key)
                .or_else(|| key.parse::<usize>().ok().filter(|i| (1..=names.len()).contains(i)).map(|i| i - 1))
                .ok_or_else(|| self.err(anchor, format!("unknown basis element '{key}'")))?;
            v[idx] = self.coefficient(anchor, c)?;
        }
        Ok(v)
    }

    fn index(&self, names: &[String], r: &BasisRef) -> Result<usize> {
        match r {
            BasisRef::Index(i) if (1..=names.len()).contains(i) => Ok(i - 1),
            BasisRef::Index(i) => Err(self.err("brackets", format!("bracket index {i} outside 1..={}", names.len()))),
            BasisRef::Name(s) => names
                .iter()
                .position(|n| n == s)
                .ok_or_else(|| self.err("brackets", format!("unknown basis element '{s}'"))),
        }
    }
}

fn json_error(source: &str, e: serde_json::Error) -> Error {
    Error::Input(format!("{source}:{}:{}: {e}", e.line(), e.column()))
}

pub fn parse_workspace(text: &str, source: &str) -> Result<Workspace> {
    let raw: RawWorkspace = serde_json::from_str(text).map_err(|e| json_error(source, e))?;
    let ctx = Ctx { source, text };
    let names = raw.algebra.basis;
    let n = names.len();
    if n == 0 {
        return Err(ctx.err("basis", "empty basis"));
    }
    if let Some(d) = raw.algebra.dim {
        if d != n {
            return Err(ctx.err("dim", Error::DimensionMismatch { expected: d, got: n }));
        }
    }
    let mut seen = HashSet::new();
    for name in &names {
        if !seen.insert(name) {
            return Err(ctx.err(name, format!("duplicate basis name '{name}'")));
        }
    }

    let mut c = vec![vec![vec![Rational::zero(); n]; n]; n];
    let mut set = vec![vec![false; n]; n];
    for b in &raw.algebra.brackets {
        let i = ctx.index(&names, &b.i)?;
        let j = ctx.index(&names, &b.j)?;
        let v = ctx.vector("brackets", &names, &b.result)?;
        let label = format!("[{}, {}]", names[i], names[j]);
        if i == j {
            if v.iter().any(|x| !x.is_zero()) {
                return Err(ctx.err("brackets", format!("{label} must vanish")));
            }
            continue;
        }
        let neg: Vec<Rational> = v.iter().map(|x| -x).collect();
        if set[i][j] && c[i][j] != v || set[j][i] && c[j][i] != neg {
            return Err(ctx.err("brackets", format!("{label} given twice with conflicting values")));
        }
        c[i][j] = v;
        c[j][i] = neg;
        set[i][j] = true;
        set[j][i] = true;
    }
    let algebra = LieAlgebra::new(names.clone(), c).map_err(|e| ctx.err("algebra", e))?;

    let mut functionals = BTreeMap::new();
    for (name, m) in &raw.functionals.0 {
        functionals.insert(name.clone(), Functional::new(ctx.vector(name, &names, m)?));
    }
    let mut lattices = BTreeMap::new();
    for (name, l) in &raw.lattices.0 {
        if functionals.contains_key(name) {
            return Err(ctx.err(name, format!("name '{name}' used for both a functional and a lattice")));
        }
        let gens = l
            .generators
            .iter()
            .map(|g| ctx.vector(name, &names, g).map(|v| GroupElement::exp(AlgebraElement::new(v))))
            .collect::<Result<Vec<_>>>()?;
        let spec = LatticeSpec::new(&algebra, gens, l.malcev).map_err(|e| ctx.err(name, e))?;
        lattices.insert(name.clone(), spec);
    }
    Ok(Workspace { source: source.to_string(), algebra, functionals, lattices })
}

pub fn load_workspace(path: &Path) -> Result<Workspace> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
    parse_workspace(&text, &path.display().to_string())
}

fn coords_json(names: &[String], v: &[Rational]) -> Value {
    let mut m = Map::new();
    for (name, x) in names.iter().zip(v) {
        if !x.is_zero() {
            m.insert(name.clone(), Value::String(rational::format(x)));
        }
    }
    Value::Object(m)
}

impl Workspace {
    pub fn functional(&self, name: &str) -> Result<&Functional> {
        self.functionals
            .get(name)
            .ok_or_else(|| Error::Input(format!("{}: no functional named '{name}'", self.source)))
    }

    pub fn lattice(&self, name: &str) -> Result<&LatticeSpec> {
        self.lattices
            .get(name)
            .ok_or_else(|| Error::Input(format!("{}: no lattice named '{name}'", self.source)))
    }

    /// Canonical form: brackets for `i < j` only, reduced rational strings.
    pub fn to_json(&self) -> Value {
        let names = self.algebra.names();
        let n = names.len();
        let mut brackets = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let v = &self.algebra.structure()[i][j];
                if v.iter().any(|x| !x.is_zero()) {
                    brackets.push(json!({ "i": names[i], "j": names[j], "result": coords_json(names, v) }));
                }
            }
        }
        let functionals: Map<String, Value> =
            self.functionals.iter().map(|(k, f)| (k.clone(), coords_json(names, &f.coords))).collect();
        let lattices: Map<String, Value> = self
            .lattices
            .iter()
            .map(|(k, l)| {
                let gens: Vec<Value> = l.generators.iter().map(|g| coords_json(names, &g.log_coords)).collect();
                (k.clone(), json!({ "malcev": l.declared_malcev, "generators": gens }))
            })
            .collect();
        json!({
            "algebra": { "dim": n, "basis": names, "brackets": brackets },
            "functionals": functionals,
            "lattices": lattices,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;
    use crate::rational::int;

    const H1: &str = r#"{
  "algebra": {
    "basis": ["X", "Y", "Z"],
    "brackets": [{ "i": "X", "j": "Y", "result": { "Z": 1 } }]
  },
  "functionals": { "zstar": { "Z": "1" } },
  "lattices": {
    "half": { "malcev": true, "generators": [{ "X": "1/2" }, { "Y": 1 }, { "Z": "1/2" }] }
  }
}"#;

    #[test]
    fn parses_heisenberg() {
        let w = parse_workspace(H1, "h1.json").unwrap();
        assert_eq!(w.algebra, presets::heisenberg(1));
        assert_eq!(w.functional("zstar").unwrap(), &Functional::from_ints(&[0, 0, 1]));
        assert_eq!(w.lattice("half").unwrap().generators[2].log_coords, vec![int(0), int(0), rational::rat(1, 2)]);
    }

    #[test]
    fn round_trip_is_idempotent() {
        let w = parse_workspace(H1, "h1.json").unwrap();
        let once = serde_json::to_string_pretty(&w.to_json()).unwrap();
        let w2 = parse_workspace(&once, "again.json").unwrap();
        assert_eq!(w2.algebra, w.algebra);
        assert_eq!(w2.functionals, w.functionals);
        assert_eq!(w2.lattices, w.lattices);
        assert_eq!(serde_json::to_string_pretty(&w2.to_json()).unwrap(), once);
    }

    #[test]
    fn errors_carry_line_context() {
        let bad = H1.replace("{ \"Z\": \"1\" }", "{ \"W\": \"1\" }");
        let e = parse_workspace(&bad, "h1.json").unwrap_err().to_string();
        assert!(e.starts_with("h1.json:6:"), "{e}");

        let syntax = H1.replace("\"basis\":", "\"basis\"");
        let e = parse_workspace(&syntax, "h1.json").unwrap_err().to_string();
        assert!(e.starts_with("h1.json:3:"), "{e}");

        let dup = H1.replace("\"zstar\": { \"Z\": \"1\" }", "\"zstar\": { \"Z\": \"1\" }, \"zstar\": {}");
        assert!(parse_workspace(&dup, "h1.json").unwrap_err().to_string().contains("duplicate"));
    }

    #[test]
    fn invalid_algebras_are_rejected() {
        let jac = r#"{ "algebra": { "basis": ["a", "b", "c"], "brackets": [
            { "i": 1, "j": 2, "result": { "c": 1 } }, { "i": 2, "j": 3, "result": { "b": 1 } } ] } }"#;
        let e = parse_workspace(jac, "j.json").unwrap_err().to_string();
        assert!(e.contains("Jacobi") || e.contains("nilpotent"), "{e}");

        let conflict = r#"{ "algebra": { "basis": ["a", "b", "c"], "brackets": [
            { "i": 1, "j": 2, "result": { "c": 1 } }, { "i": 2, "j": 1, "result": { "c": 1 } } ] } }"#;
        assert!(parse_workspace(conflict, "c.json").unwrap_err().to_string().contains("conflicting"));

        let indexed = r#"{ "algebra": { "dim": 3, "basis": ["X1", "X2", "X3"],
            "brackets": [{ "i": 1, "j": 2, "coeffs": { "3": "1" } }] } }"#;
        let w = parse_workspace(indexed, "i.json").unwrap();
        assert_eq!(w.algebra.center().dim(), 1);

        let dim = r#"{ "algebra": { "dim": 4, "basis": ["a", "b", "c"] } }"#;
        assert!(matches!(parse_workspace(dim, "d.json"), Err(Error::Input(_))));
    }
}
