//! The catalog of realizations: file format, loading and verification.
//!
//! A catalog file lists, per entry, three generators, the right-hand side
//! `F` built from an arbitrary function `G`, the abstract algebra the
//! generators should span, and parameter constraints. See
//! `docs/catalog-format.md`.

mod format;
mod mutate;
mod params;
mod report;
mod verify;

use std::collections::BTreeSet;
use std::path::Path;

use thiserror::Error;

use crate::expr::{Bindings, Expr, Node, Rational, Symbol};
use crate::liealg::{lookup_algebra, VectorField};
use crate::parser::{parse_expr, parse_expr_with, parse_vectorfield, ParseOptions, SourceSpan};
use crate::simplify::{normalize, SamplingDomain};

pub use format::Manifest;
pub use mutate::{mutate_entry, mutation_menu, Mutation};
pub use params::{instantiate_params, Binding, Constraint, ParamSpec, BINDINGS_PER_ENTRY};
pub use report::{CatalogReport, CheckRecord, WitnessRecord};
pub use verify::{
    check_instance, verify_catalog, verify_entry, verify_transformed, AlgebraCheck, BindingReport, EntryReport, Outcome, PairCheck, VerifyConfig,
};

/// The catalog shipped with the crate.
pub const DEFAULT_CATALOG: &str = include_str!("../../data/realizations.cat");

/// Name of the arbitrary function in every entry.
pub const ARBITRARY: &str = "G";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CatalogError {
    #[error("{}{span}: {msg}", id.as_ref().map(|i| format!("entry {i}, ")).unwrap_or_default())]
    Parse {
        id: Option<String>,
        span: SourceSpan,
        msg: String,
    },
    #[error("entry id `{0}` appears twice")]
    DuplicateId(String),
    #[error("manifest declares {declared} {kind} entries, file has {found}")]
    CountMismatch {
        kind: &'static str,
        declared: usize,
        found: usize,
    },
    #[error("entry {id}: {msg}")]
    Invalid { id: String, msg: String },
    #[error("entry {id}: no admissible value for parameter `{param}`")]
    UnsatisfiableConstraint { id: String, param: String },
    #[error("cannot read catalog: {0}")]
    Io(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expected {
    Pass,
    /// The entry as printed is known to fail; the note says why.
    Discrepancy(String),
}

impl Expected {
    pub fn is_pass(&self) -> bool {
        matches!(self, Expected::Pass)
    }
}

/// Entry as read from the file, before any expression is parsed.
pub(crate) struct RawEntry {
    pub id: String,
    pub line: usize,
    pub algebra: Option<format::Field>,
    pub gens: [Option<format::Field>; 3],
    pub f: Option<format::Field>,
    pub omega: Option<format::Field>,
    pub v: Option<format::Field>,
    pub q: Option<format::Field>,
    pub lets: Vec<(String, format::Field)>,
    pub params: Vec<ParamSpec>,
    pub domain: Vec<(String, f64, f64)>,
    pub expected: Option<Expected>,
}

impl RawEntry {
    fn new(id: &str, line: usize) -> RawEntry {
        RawEntry {
            id: id.to_string(),
            line,
            algebra: None,
            gens: [None, None, None],
            f: None,
            omega: None,
            v: None,
            q: None,
            lets: Vec::new(),
            params: Vec::new(),
            domain: Vec::new(),
            expected: None,
        }
    }
}

/// Source text of an entry, kept for printing and round trips.
#[derive(Debug, Clone, PartialEq)]
pub struct EntrySource {
    pub gens: [String; 3],
    pub f: String,
    pub omega: Option<String>,
    pub v: Option<String>,
    pub lets: Vec<(String, String)>,
}

/// A loaded entry. Expressions still contain the entry's parameters, with
/// abbreviations (`let`, `omega`, `v`) expanded.
#[derive(Debug, Clone, PartialEq)]
pub struct CatalogEntry {
    pub id: String,
    pub line: usize,
    pub algebra: String,
    pub generators: Vec<VectorField>,
    pub f: Expr,
    pub omega: Expr,
    pub v: Option<Expr>,
    /// Value of the algebra parameter `q`, in terms of entry parameters.
    pub q: Option<Expr>,
    pub params: Vec<ParamSpec>,
    pub domain: Vec<(String, f64, f64)>,
    pub expected: Expected,
    pub source: EntrySource,
}

impl CatalogEntry {
    /// `true` for entries named `<id>-corrected`.
    pub fn is_corrected(&self) -> bool {
        self.id.ends_with("-corrected")
    }

    pub fn sampling_domain(&self) -> SamplingDomain {
        let mut d = SamplingDomain::new();
        for (var, lo, hi) in &self.domain {
            d.set_range(Symbol::new(var), *lo, *hi);
        }
        d
    }

    pub fn instantiate(&self, b: &Binding) -> (Vec<VectorField>, Expr) {
        let sb = binding_subst(b);
        (
            self.generators.iter().map(|g| g.substitute(&sb).normalize()).collect(),
            normalize(&self.f.substitute(&sb)),
        )
    }

    /// The algebra parameter under `b`, if the entry has one.
    pub fn q_value(&self, b: &Binding) -> Option<Rational> {
        let q = self.q.as_ref()?;
        normalize(&q.substitute(&binding_subst(b))).as_num().cloned()
    }
}

pub(crate) fn binding_subst(b: &Binding) -> Bindings {
    b.iter().map(|(k, v)| (Symbol::param(k), Expr::num(v.clone()))).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Catalog {
    pub manifest: Manifest,
    pub entries: Vec<CatalogEntry>,
}

impl Catalog {
    pub fn get(&self, id: &str) -> Option<&CatalogEntry> {
        self.entries.iter().find(|e| e.id == id)
    }

    pub fn primary(&self) -> impl Iterator<Item = &CatalogEntry> {
        self.entries.iter().filter(|e| !e.is_corrected())
    }
}

pub fn load_catalog(path: &Path) -> Result<Catalog, CatalogError> {
    let text = std::fs::read_to_string(path).map_err(|e| CatalogError::Io(format!("{}: {e}", path.display())))?;
    parse_catalog(&text)
}

pub fn default_catalog() -> Catalog {
    parse_catalog(DEFAULT_CATALOG).expect("bundled catalog is valid")
}

pub fn parse_catalog(text: &str) -> Result<Catalog, CatalogError> {
    let (manifest, raw) = format::parse_catalog_text(text)?;
    let mut seen = BTreeSet::new();
    let mut entries = Vec::with_capacity(raw.len());
    for r in raw {
        if !seen.insert(r.id.clone()) {
            return Err(CatalogError::DuplicateId(r.id));
        }
        entries.push(compile(r)?);
    }
    for e in entries.iter().filter(|e| e.is_corrected()) {
        let base = e.id.trim_end_matches("-corrected");
        if !seen.contains(base) {
            return Err(CatalogError::Invalid {
                id: e.id.clone(),
                msg: format!("corrects `{base}`, which is not in the catalog"),
            });
        }
    }
    let corrected = entries.iter().filter(|e| e.is_corrected()).count();
    let primary = entries.len() - corrected;
    if let Some(n) = manifest.entries {
        if n != primary {
            return Err(CatalogError::CountMismatch {
                kind: "primary",
                declared: n,
                found: primary,
            });
        }
    }
    if let Some(n) = manifest.corrected {
        if n != corrected {
            return Err(CatalogError::CountMismatch {
                kind: "corrected",
                declared: n,
                found: corrected,
            });
        }
    }
    Ok(Catalog { manifest, entries })
}

fn compile(r: RawEntry) -> Result<CatalogEntry, CatalogError> {
    let id = r.id.clone();
    let invalid = |msg: String| CatalogError::Invalid { id: id.clone(), msg };
    let need = |f: &Option<format::Field>, name: &str| -> Result<(), CatalogError> {
        f.as_ref().map(|_| ()).ok_or_else(|| invalid(format!("missing field `{name}`")))
    };
    need(&r.algebra, "algebra")?;
    for (i, g) in r.gens.iter().enumerate() {
        need(g, &format!("gen{}", i + 1))?;
    }
    need(&r.f, "F")?;
    need(&r.omega, "omega")?;
    let algebra = r.algebra.as_ref().unwrap().value.clone();
    if lookup_algebra(&algebra).is_none() {
        return Err(invalid(format!("unknown algebra `{algebra}`")));
    }
    let expected = r.expected.clone().ok_or_else(|| invalid("missing field `expected`".into()))?;

    let parse_err = |f: &format::Field, e: crate::parser::ParseError| CatalogError::Parse {
        id: Some(id.clone()),
        span: f.locate(e.span()),
        msg: e.to_string(),
    };
    let arity = if r.v.is_some() { 2 } else { 1 };
    let opts = ParseOptions::with_arity(ARBITRARY, arity);

    // Abbreviations are expanded in order; each may use the earlier ones.
    let mut lets = Bindings::new();
    let named = |name: &str, f: &format::Field, lets: &mut Bindings| -> Result<Expr, CatalogError> {
        let e = parse_expr(&f.value).map_err(|e| parse_err(f, e))?;
        if e.contains_opaque() {
            return Err(CatalogError::Parse {
                id: Some(id.clone()),
                span: f.span(),
                msg: format!("`{name}` may not use arbitrary functions"),
            });
        }
        let e = e.substitute(lets);
        lets.insert(Symbol::param(name), e.clone());
        Ok(e)
    };
    for (name, f) in &r.lets {
        if crate::expr::JetVar::from_name(name).is_some() {
            return Err(invalid(format!("abbreviation `{name}` shadows a coordinate")));
        }
        named(name, f, &mut lets)?;
    }
    let omega = named("omega", r.omega.as_ref().unwrap(), &mut lets)?;
    let v = match &r.v {
        Some(f) => Some(named("v", f, &mut lets)?),
        None => None,
    };
    let mut generators = Vec::with_capacity(3);
    for f in r.gens.iter().flatten() {
        let g = parse_vectorfield(&f.value).map_err(|e| parse_err(f, e))?;
        generators.push(g.substitute(&lets));
    }
    let ff = r.f.as_ref().unwrap();
    let f = parse_expr_with(&ff.value, &opts).map_err(|e| parse_err(ff, e))?.substitute(&lets);
    check_arbitrary(&f, &omega, v.as_ref()).map_err(&invalid)?;
    let q = match &r.q {
        Some(f) => Some(parse_expr(&f.value).map_err(|e| parse_err(f, e))?.substitute(&lets)),
        None => r.params.iter().any(|p| p.name == "q").then(|| Expr::param("q")),
    };

    let declared: BTreeSet<Symbol> = r.params.iter().map(|p| Symbol::param(&p.name)).collect();
    let mut used = f.free_symbols();
    for g in &generators {
        for c in g.components() {
            used.extend(c.free_symbols());
        }
    }
    for s in used {
        if s.jet().is_none() && !declared.contains(&s) {
            return Err(invalid(format!("`{}` is neither a coordinate nor a declared parameter", s.name())));
        }
    }

    Ok(CatalogEntry {
        id: r.id.clone(),
        line: r.line,
        algebra,
        generators,
        f,
        omega,
        v,
        q,
        params: r.params,
        domain: r.domain,
        expected,
        source: EntrySource {
            gens: r.gens.map(|g| g.unwrap().value),
            f: ff.value.clone(),
            omega: r.omega.map(|f| f.value),
            v: r.v.map(|f| f.value),
            lets: r.lets.into_iter().map(|(n, f)| (n, f.value)).collect(),
        },
    })
}

/// Every application of `G` in `f` must be to the declared invariants.
fn check_arbitrary(f: &Expr, omega: &Expr, v: Option<&Expr>) -> Result<(), String> {
    let mut want = vec![normalize(omega)];
    want.extend(v.map(normalize));
    let mut found = 0;
    let mut bad = None;
    f.walk(&mut |e| {
        if let Node::Opaque(o) = e.node() {
            if &*o.name != ARBITRARY {
                bad.get_or_insert(format!("unknown function `{}`", o.name));
                return;
            }
            found += 1;
            let args: Vec<Expr> = o.args.iter().map(normalize).collect();
            if args != want {
                bad.get_or_insert("`G` is applied to something other than the declared invariants".to_string());
            }
        }
    });
    if let Some(b) = bad {
        return Err(b);
    }
    if found == 0 {
        return Err("F does not involve `G`".into());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = "\
[catalog]
entries = 1
corrected = 1

[entry T^1]
algebra = A3.3
gen1 = d_u
gen2 = d_t
gen3 = d_x + t*d_u
F = G(omega)
omega = ux
expected = pass

[entry T^1-corrected]
algebra = A3.3
let w = ux
gen1 = d_u
gen2 = d_t
gen3 = d_x + t*d_u
F = G(w)
omega = w
expected = pass
";

    #[test]
    fn loads_small_catalog() {
        let c = parse_catalog(SMALL).unwrap();
        assert_eq!(c.entries.len(), 2);
        assert_eq!(c.primary().count(), 1);
        let e = c.get("T^1-corrected").unwrap();
        assert_eq!(e.f, parse_expr("G(ux)").unwrap());
    }

    #[test]
    fn rejects_bad_catalogs() {
        let dup = SMALL.replace("T^1-corrected", "T^1");
        assert!(matches!(parse_catalog(&dup), Err(CatalogError::DuplicateId(_))));
        let count = SMALL.replace("entries = 1", "entries = 2");
        assert!(matches!(parse_catalog(&count), Err(CatalogError::CountMismatch { .. })));
        let alg = SMALL.replacen("A3.3", "A3.42", 1);
        assert!(matches!(parse_catalog(&alg), Err(CatalogError::Invalid { .. })));
        let arg = SMALL.replacen("F = G(omega)", "F = G(u)", 1);
        assert!(matches!(parse_catalog(&arg), Err(CatalogError::Invalid { .. })));
        let param = SMALL.replacen("gen1 = d_u", "gen1 = k*d_u", 1);
        assert!(matches!(parse_catalog(&param), Err(CatalogError::Invalid { .. })));
        let syntax = SMALL.replacen("gen2 = d_t", "gen2 = d_t +", 1);
        match parse_catalog(&syntax) {
            Err(CatalogError::Parse { id, span, .. }) => {
                assert_eq!(id.as_deref(), Some("T^1"));
                assert_eq!(span.line, 8);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn orphan_correction_is_rejected() {
        let text = "[entry B-corrected]\nalgebra = A3.3\ngen1 = d_u\ngen2 = d_x\ngen3 = d_t\nF = G(omega)\nomega = ux\nexpected = pass\n";
        let e = parse_catalog(text).err().unwrap();
        assert!(e.to_string().contains("not in the catalog"), "{e}");
    }

    #[test]
    fn bundled_catalog_loads() {
        let c = default_catalog();
        assert_eq!(c.primary().count(), 78);
        assert_eq!(c.manifest.entries, Some(78));
        assert_eq!(c.manifest.corrected, Some(27));
        for e in c.entries.iter().filter(|e| e.is_corrected()) {
            assert!(c.get(e.id.trim_end_matches("-corrected")).is_some(), "{}", e.id);
        }
    }
}
