//! Golden files under `assets/golden`. With `METAGRAMME_BLESS=1` the files
//! are rewritten instead of compared.

use std::path::PathBuf;

pub fn path(name: &str) -> PathBuf {
    super::assets().join("golden").join(name)
}

pub fn blessing() -> bool {
    std::env::var_os("METAGRAMME_BLESS").is_some_and(|v| v == "1")
}

/// Compares `actual` with the golden file, or writes it when blessing.
pub fn check(name: &str, actual: &str) -> Result<(), String> {
    let p = path(name);
    if blessing() {
        std::fs::write(&p, actual).map_err(|e| format!("{}: {e}", p.display()))?;
        return Ok(());
    }
    let expected = std::fs::read_to_string(&p).map_err(|e| format!("{}: {e}", p.display()))?;
    if expected == actual {
        return Ok(());
    }
    let line = expected
        .lines()
        .zip(actual.lines())
        .position(|(a, b)| a != b)
        .unwrap_or_else(|| expected.lines().count().min(actual.lines().count()));
    Err(format!("{name} differs from golden at line {}", line + 1))
}

/// Lines of a golden file, skipping blanks and `#` comments.
pub fn lines(name: &str) -> Vec<String> {
    std::fs::read_to_string(path(name))
        .unwrap_or_else(|e| panic!("{name}: {e}"))
        .lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .map(str::to_string)
        .collect()
}
