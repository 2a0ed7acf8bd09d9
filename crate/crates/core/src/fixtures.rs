//! Expected right-hand sides stored in the plain-text notation.
//!
//! File format: `#` comments, one `symbols:` declaration, then `ID = text` entries.
//! Indented lines continue the previous entry. `FRAMECALC_FIXTURES` names a
//! directory that replaces the built-in copies.

use std::collections::BTreeMap;
use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::exterior::Form;
use crate::notation::{parse_form, parse_scalar};
use crate::scalar::{ScalarExpr, SymbolTable};

pub const ENV_DIR: &str = "FRAMECALC_FIXTURES";

const BUILTIN: &[(&str, &str)] = &[
    ("appendix_a", include_str!("../fixtures/appendix_a.txt")),
    ("appendix_b", include_str!("../fixtures/appendix_b.txt")),
    ("linearization", include_str!("../fixtures/linearization.txt")),
    ("field", include_str!("../fixtures/field.txt")),
];

#[derive(Clone, Debug)]
pub struct FixtureSet {
    pub name: String,
    pub symbols: SymbolTable,
    entries: BTreeMap<String, String>,
}

impl FixtureSet {
    pub fn parse(name: &str, text: &str) -> Result<Self> {
        let mut symbols = None;
        let mut entries: BTreeMap<String, String> = BTreeMap::new();
        let mut last: Option<String> = None;
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim_end();
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let bad = |msg: &str| Error::Config(format!("{name}:{}: {msg}", n + 1));
            if line.starts_with(char::is_whitespace) {
                let id = last.as_ref().ok_or_else(|| bad("continuation without an entry"))?;
                let e = entries.get_mut(id).expect("last entry exists");
                e.push(' ');
                e.push_str(line.trim());
            } else if let Some(decl) = line.strip_prefix("symbols:") {
                symbols = Some(SymbolTable::from_decl(decl)?);
            } else {
                let (id, body) = line.split_once(" = ").ok_or_else(|| bad("expected `ID = text`"))?;
                let id = id.trim().to_string();
                if entries.insert(id.clone(), body.trim().to_string()).is_some() {
                    return Err(bad(&format!("duplicate entry `{id}`")));
                }
                last = Some(id);
            }
        }
        let symbols = symbols.ok_or_else(|| Error::Config(format!("{name}: missing `symbols:` line")))?;
        Ok(Self { name: name.to_string(), symbols, entries })
    }

    /// Built-in set, or the file `<name>.txt` under `FRAMECALC_FIXTURES` when set.
    pub fn load(name: &str) -> Result<Self> {
        if let Some(dir) = std::env::var_os(ENV_DIR) {
            let path = PathBuf::from(dir).join(format!("{name}.txt"));
            let text = std::fs::read_to_string(&path)
                .map_err(|e| Error::Config(format!("cannot read fixture {}: {e}", path.display())))?;
            return Self::parse(name, &text);
        }
        let text = BUILTIN
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, t)| *t)
            .ok_or_else(|| Error::Config(format!("unknown fixture set `{name}`")))?;
        Self::parse(name, text)
    }

    pub fn text(&self, id: &str) -> Result<&str> {
        self.entries.get(id).map(String::as_str).ok_or_else(|| Error::UnknownTarget(id.to_string()))
    }

    pub fn form(&self, id: &str) -> Result<Form> {
        parse_form(self.text(id)?, &self.symbols)
    }

    /// Entry of the form `diag(a; b)`: time and spatial metric components.
    pub fn diag(&self, id: &str) -> Result<(ScalarExpr, ScalarExpr)> {
        let t = self.text(id)?;
        let inner = t
            .strip_prefix("diag(")
            .and_then(|s| s.strip_suffix(')'))
            .ok_or_else(|| Error::Config(format!("{id}: expected diag(a; b)")))?;
        let (a, b) = inner.split_once(';').ok_or_else(|| Error::Config(format!("{id}: expected diag(a; b)")))?;
        Ok((parse_scalar(a, &self.symbols)?, parse_scalar(b, &self.symbols)?))
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_sets_parse() {
        for (name, _) in BUILTIN {
            let set = FixtureSet::load(name).unwrap();
            for id in set.ids() {
                if set.text(id).unwrap().starts_with("diag(") {
                    set.diag(id).unwrap();
                } else if id != "B.13" {
                    set.form(id).unwrap_or_else(|e| panic!("{name} {id}: {e}"));
                }
            }
        }
    }

    #[test]
    fn format_errors() {
        assert!(matches!(FixtureSet::parse("x", "A = Phi^0"), Err(Error::Config(_))));
        assert!(matches!(FixtureSet::parse("x", "symbols: f\n  Phi^0"), Err(Error::Config(_))));
        assert!(matches!(FixtureSet::parse("x", "symbols: f\nA = 1\nA = 2"), Err(Error::Config(_))));
        let s = FixtureSet::parse("x", "symbols: f\nA = f\n  + 1").unwrap();
        assert_eq!(s.text("A").unwrap(), "f + 1");
        assert!(matches!(s.text("B"), Err(Error::UnknownTarget(_))));
    }
}
