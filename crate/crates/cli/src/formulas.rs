//! The formula file format: one `id(var, var, ...) = text` per line, `#`
//! comments and blank lines ignored.

use rebac_core::FormulaLibrary;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineError {
    pub line: usize,
    pub message: String,
}

pub fn check_formula_file(text: &str) -> Result<FormulaLibrary, Vec<LineError>> {
    let mut library = FormulaLibrary::new();
    let mut errors = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fail = |message: String| LineError { line: i + 1, message };
        let Some((head, body)) = line.split_once('=') else {
            errors.push(fail("expected `id(vars) = formula`".into()));
            continue;
        };
        let head = head.trim();
        let parsed = head
            .strip_suffix(')')
            .and_then(|h| h.split_once('('))
            .map(|(id, vars)| (id.trim(), vars));
        let Some((id, vars)) = parsed else {
            errors.push(fail(format!("malformed declaration `{head}`")));
            continue;
        };
        let vars: Vec<&str> = vars.split(',').map(str::trim).filter(|v| !v.is_empty()).collect();
        if let Err(e) = library.define(id, &vars, body.trim()) {
            errors.push(fail(e.to_string()));
        }
    }
    if errors.is_empty() {
        Ok(library)
    } else {
        Err(errors)
    }
}
