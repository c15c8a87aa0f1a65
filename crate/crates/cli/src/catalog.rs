//! Built-in metrics, shipped as metric files.

use crate::metric_file::{load_metric, parse_metric, LoadError, MetricFile};

const ENTRIES: [(&str, &str); 6] = [
    ("minkowski", include_str!("../catalog/minkowski.toml")),
    ("schwarzschild", include_str!("../catalog/schwarzschild.toml")),
    ("schwarzschild-static", include_str!("../catalog/schwarzschild-static.toml")),
    ("schwarzschild-de-sitter", include_str!("../catalog/schwarzschild-de-sitter.toml")),
    ("kerr", include_str!("../catalog/kerr.toml")),
    ("perturbed-schwarzschild", include_str!("../catalog/perturbed-schwarzschild.toml")),
];

pub const PREFIX: &str = "catalog:";

pub fn names() -> impl Iterator<Item = &'static str> {
    ENTRIES.iter().map(|(n, _)| *n)
}

/// The file text of a catalog entry.
pub fn source(name: &str) -> Option<&'static str> {
    ENTRIES.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

pub fn load(name: &str) -> Result<MetricFile, LoadError> {
    let text = source(name).ok_or_else(|| LoadError::Schema {
        origin: format!("{PREFIX}{name}"),
        message: format!("no such catalog entry (known: {})", names().collect::<Vec<_>>().join(", ")),
    })?;
    parse_metric(text, &format!("{PREFIX}{name}"))
}

/// Resolves `catalog:NAME` or a file path.
pub fn resolve(reference: &str) -> Result<MetricFile, LoadError> {
    match reference.strip_prefix(PREFIX) {
        Some(name) => load(name),
        None => load_metric(reference.as_ref()),
    }
}
