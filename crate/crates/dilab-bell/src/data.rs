//! Bundled named functionals and their load-time validation.

use crate::classical::classical_bound;
use crate::{BellError, BellFunctional, Result};

/// Compiled-in coefficient files. A directory named by the `DILAB_DATA_DIR`
/// environment variable overrides individual files when it contains
/// `<name>.json`.
const BUNDLED: &[(&str, &str)] = &[
    ("chsh", include_str!("../data/chsh.json")),
    ("cglmp3", include_str!("../data/cglmp3.json")),
    ("chained3", include_str!("../data/chained3.json")),
    ("mermin3", include_str!("../data/mermin3.json")),
    ("satwap32", include_str!("../data/satwap32.json")),
];

/// Names of the bundled functionals, in the shipped order.
pub fn bundled_names() -> Vec<&'static str> {
    BUNDLED.iter().map(|(n, _)| *n).collect()
}

/// Parse a functional from its JSON representation and run the full
/// validation: shape checks, bound consistency, and re-derivation of the
/// declared local bound by deterministic enumeration.
pub fn functional_from_json(text: &str) -> Result<BellFunctional> {
    let f: BellFunctional = serde_json::from_str(text).map_err(|e| BellError::BadData {
        name: "<inline>".into(),
        detail: e.to_string(),
    })?;
    f.validate()?;
    if let Some(declared) = f.local_bound {
        let (computed, _) = classical_bound(&f)?;
        if (computed - declared).abs() > 1e-9 {
            return Err(BellError::BadData {
                name: f.name.clone(),
                detail: format!(
                    "declared local bound {declared} but enumeration gives {computed}"
                ),
            });
        }
    }
    Ok(f)
}

/// Load a bundled functional by name, honoring the `DILAB_DATA_DIR`
/// override. Every load re-validates the data, including the declared local
/// bound.
pub fn bundled(name: &str) -> Result<BellFunctional> {
    if let Ok(dir) = std::env::var("DILAB_DATA_DIR") {
        let path = std::path::Path::new(&dir).join(format!("{name}.json"));
        if path.is_file() {
            let text = std::fs::read_to_string(&path).map_err(|e| BellError::BadData {
                name: name.into(),
                detail: format!("reading {}: {e}", path.display()),
            })?;
            return functional_from_json(&text);
        }
    }
    let text = BUNDLED
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, t)| *t)
        .ok_or_else(|| BellError::BadData {
            name: name.into(),
            detail: format!(
                "unknown functional; bundled names are {}",
                bundled_names().join(", ")
            ),
        })?;
    functional_from_json(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_bundled_files_load_and_validate() {
        for name in bundled_names() {
            let f = bundled(name).expect(name);
            assert_eq!(f.name, name);
            assert!(f.local_bound.is_some(), "{name} must declare a local bound");
        }
    }

    #[test]
    fn unknown_name_is_an_error() {
        assert!(matches!(bundled("nope"), Err(BellError::BadData { .. })));
    }

    #[test]
    fn corrupted_local_bound_is_caught() {
        let mut doc: serde_json::Value =
            serde_json::from_str(BUNDLED[0].1).expect("bundled chsh parses");
        doc["local_bound"] = serde_json::json!(1.5);
        let text = serde_json::to_string(&doc).unwrap();
        assert!(matches!(
            functional_from_json(&text),
            Err(BellError::BadData { .. })
        ));
    }
}
