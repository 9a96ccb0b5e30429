use super::params::{Constraint, ParamSpec};
use super::{CatalogError, Expected, RawEntry};
use crate::parser::{parse_expr, SourceSpan};

/// Header values of a catalog file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Manifest {
    pub entries: Option<usize>,
    pub corrected: Option<usize>,
}

pub(crate) struct Field {
    pub value: String,
    pub line: usize,
    pub column: usize,
}

impl Field {
    pub(crate) fn span(&self) -> SourceSpan {
        SourceSpan {
            start: 0,
            end: self.value.len(),
            line: self.line,
            column: self.column,
        }
    }

    /// Moves a span reported for `value` to its place in the file.
    pub(crate) fn locate(&self, inner: SourceSpan) -> SourceSpan {
        SourceSpan {
            start: inner.start,
            end: inner.end,
            line: self.line + inner.line - 1,
            column: if inner.line == 1 { self.column + inner.column - 1 } else { inner.column },
        }
    }
}

fn err(id: Option<&str>, line: usize, column: usize, msg: impl Into<String>) -> CatalogError {
    CatalogError::Parse {
        id: id.map(str::to_string),
        span: SourceSpan {
            start: 0,
            end: 0,
            line,
            column,
        },
        msg: msg.into(),
    }
}

enum Section {
    None,
    Manifest,
    Entry(Box<RawEntry>),
}

pub(crate) fn parse_catalog_text(text: &str) -> Result<(Manifest, Vec<RawEntry>), CatalogError> {
    let mut manifest = Manifest::default();
    let mut entries = Vec::new();
    let mut section = Section::None;
    for (i, raw_line) in text.lines().enumerate() {
        let line_no = i + 1;
        let trimmed = raw_line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let indent = raw_line.len() - raw_line.trim_start().len();
        if let Some(header) = trimmed.strip_prefix('[') {
            let Some(header) = header.strip_suffix(']') else {
                return Err(err(None, line_no, indent + 1, "unterminated section header"));
            };
            if let Section::Entry(e) = std::mem::replace(&mut section, Section::None) {
                entries.push(*e);
            }
            let header = header.trim();
            if header == "catalog" {
                section = Section::Manifest;
            } else if let Some(id) = header.strip_prefix("entry ") {
                let id = id.trim();
                if id.is_empty() || id.contains(char::is_whitespace) {
                    return Err(err(None, line_no, indent + 1, "entry id must be a single word"));
                }
                section = Section::Entry(Box::new(RawEntry::new(id, line_no)));
            } else {
                return Err(err(None, line_no, indent + 1, format!("unknown section `{header}`")));
            }
            continue;
        }
        match &mut section {
            Section::None => return Err(err(None, line_no, indent + 1, "content outside of a section")),
            Section::Manifest => {
                let (key, value, _) = split_kv(trimmed, indent)
                    .ok_or_else(|| err(None, line_no, indent + 1, "expected `key = value`"))?;
                let n: usize = value
                    .parse()
                    .map_err(|_| err(None, line_no, indent + 1, format!("`{key}` must be a count")))?;
                match key {
                    "entries" => manifest.entries = Some(n),
                    "corrected" => manifest.corrected = Some(n),
                    _ => return Err(err(None, line_no, indent + 1, format!("unknown manifest key `{key}`"))),
                }
            }
            Section::Entry(e) => entry_line(e, trimmed, line_no, indent)?,
        }
    }
    if let Section::Entry(e) = section {
        entries.push(*e);
    }
    if entries.is_empty() {
        return Err(err(None, 1, 1, "catalog contains no entries"));
    }
    Ok((manifest, entries))
}

fn split_kv(s: &str, indent: usize) -> Option<(&str, &str, usize)> {
    let eq = s.find('=')?;
    let key = s[..eq].trim();
    let rest = &s[eq + 1..];
    let value = rest.trim();
    let lead = rest.len() - rest.trim_start().len();
    Some((key, value, indent + eq + 1 + lead + 1))
}

fn entry_line(e: &mut RawEntry, s: &str, line: usize, indent: usize) -> Result<(), CatalogError> {
    let id = e.id.clone();
    let fail = |column: usize, msg: String| err(Some(&id), line, column, msg);
    if let Some(rest) = s.strip_prefix("let ") {
        let (name, value, column) = split_kv(rest, indent + 4).ok_or_else(|| fail(indent + 1, "expected `let name = expr`".into()))?;
        if !is_ident(name) {
            return Err(fail(indent + 5, format!("bad abbreviation name `{name}`")));
        }
        e.lets.push((name.to_string(), field(value, line, column)));
        return Ok(());
    }
    if let Some(rest) = s.strip_prefix("param ") {
        let rest = rest.trim();
        let (name, cons) = rest.split_once(char::is_whitespace).unwrap_or((rest, "real"));
        if !is_ident(name) {
            return Err(fail(indent + 7, format!("bad parameter name `{name}`")));
        }
        let c = parse_constraint(cons.trim()).map_err(|m| fail(indent + 7 + name.len() + 1, m))?;
        match e.params.iter_mut().find(|p| p.name == name) {
            Some(p) => p.constraints.push(c),
            None => e.params.push(ParamSpec {
                name: name.to_string(),
                constraints: vec![c],
            }),
        }
        return Ok(());
    }
    if let Some(rest) = s.strip_prefix("domain ") {
        let parts: Vec<&str> = rest.split_whitespace().collect();
        let [var, lo, hi] = parts[..] else {
            return Err(fail(indent + 1, "expected `domain <var> <lo> <hi>`".into()));
        };
        let (Ok(lo), Ok(hi)) = (lo.parse::<f64>(), hi.parse::<f64>()) else {
            return Err(fail(indent + 8, "domain bounds must be numbers".into()));
        };
        if lo.is_nan() || hi.is_nan() || lo >= hi {
            return Err(fail(indent + 8, "empty domain interval".into()));
        }
        e.domain.push((var.to_string(), lo, hi));
        return Ok(());
    }
    let (key, value, column) = split_kv(s, indent).ok_or_else(|| fail(indent + 1, "expected `key = value`".into()))?;
    let f = field(value, line, column);
    let slot = match key {
        "algebra" => &mut e.algebra,
        "gen1" => &mut e.gens[0],
        "gen2" => &mut e.gens[1],
        "gen3" => &mut e.gens[2],
        "F" => &mut e.f,
        "omega" => &mut e.omega,
        "v" => &mut e.v,
        "q" => &mut e.q,
        "expected" => {
            e.expected = Some(parse_expected(value).map_err(|m| fail(column, m))?);
            return Ok(());
        }
        _ => return Err(fail(indent + 1, format!("unknown field `{key}`"))),
    };
    if slot.is_some() {
        return Err(fail(indent + 1, format!("field `{key}` given twice")));
    }
    *slot = Some(f);
    Ok(())
}

fn field(value: &str, line: usize, column: usize) -> Field {
    Field {
        value: value.to_string(),
        line,
        column,
    }
}

fn is_ident(s: &str) -> bool {
    let mut cs = s.chars();
    cs.next().is_some_and(|c| c.is_ascii_alphabetic()) && cs.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn parse_expected(v: &str) -> Result<Expected, String> {
    if v == "pass" {
        return Ok(Expected::Pass);
    }
    match v.strip_prefix("discrepancy") {
        Some(rest) => {
            let note = rest.trim_start().strip_prefix(':').unwrap_or(rest).trim();
            if note.is_empty() {
                Err("a discrepancy needs a note".into())
            } else {
                Ok(Expected::Discrepancy(note.to_string()))
            }
        }
        None => Err(format!("expected `pass` or `discrepancy: <note>`, found `{v}`")),
    }
}

fn parse_constraint(s: &str) -> Result<Constraint, String> {
    let s = s.trim();
    match s {
        ">0" | "> 0" => return Ok(Constraint::Positive),
        ">=0" | ">= 0" => return Ok(Constraint::NonNegative),
        "real" => return Ok(Constraint::Real),
        _ => {}
    }
    if let Some(rest) = s.strip_prefix("abs_in") {
        return match rest.split_whitespace().collect::<Vec<_>>()[..] {
            ["0", "1"] => Ok(Constraint::AbsInOpenUnit),
            _ => Err("only `abs_in 0 1` is supported".into()),
        };
    }
    if let Some(rest) = s.strip_prefix("!=") {
        let values = rest
            .split(',')
            .map(|v| parse_expr(v.trim()).map_err(|e| format!("bad excluded value `{}`: {e}", v.trim())))
            .collect::<Result<Vec<_>, _>>()?;
        if values.is_empty() {
            return Err("`!=` needs at least one value".into());
        }
        return Ok(Constraint::Excluded(values));
    }
    Err(format!("unknown constraint `{s}`"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entry_fields() {
        let text = "[catalog]\nentries = 1\n\n[entry X^1]\nalgebra = A3.3\ngen1 = d_u\nparam m != 0, 1\nparam m != 2\ndomain x 2 3\nexpected = discrepancy: sign\n";
        let (m, es) = parse_catalog_text(text).unwrap();
        assert_eq!(m.entries, Some(1));
        let e = &es[0];
        assert_eq!(e.id, "X^1");
        assert_eq!(e.gens[0].as_ref().unwrap().value, "d_u");
        assert_eq!(e.gens[0].as_ref().unwrap().column, 8);
        assert_eq!(e.params[0].constraints.len(), 2);
        assert_eq!(e.domain, vec![("x".to_string(), 2.0, 3.0)]);
        assert_eq!(e.expected, Some(Expected::Discrepancy("sign".into())));
    }

    #[test]
    fn errors_carry_lines() {
        let e = parse_catalog_text("[entry A]\nalgebra = A3.3\nbogus = 1\n").err().unwrap();
        let CatalogError::Parse { id, span, .. } = e else { panic!() };
        assert_eq!(id.as_deref(), Some("A"));
        assert_eq!(span.line, 3);
        assert!(parse_catalog_text("").is_err());
        assert!(parse_catalog_text("# nothing\n").is_err());
        assert!(parse_catalog_text("algebra = A3.3\n").is_err());
    }

    #[test]
    fn constraints() {
        assert_eq!(parse_constraint(">0").unwrap(), Constraint::Positive);
        assert_eq!(parse_constraint("abs_in 0 1").unwrap(), Constraint::AbsInOpenUnit);
        assert!(matches!(parse_constraint("!= q, q+1").unwrap(), Constraint::Excluded(v) if v.len() == 2));
        assert!(parse_constraint("<3").is_err());
    }
}
