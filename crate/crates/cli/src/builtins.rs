//! Bundled scenarios, shipped as data files under `builtins/` and embedded
//! here so the binary can run them from anywhere. The files stay
//! copy-editable as starting points for user scenarios.

pub const BUILTINS: &[(&str, &str)] = &[
    ("example-1.3", include_str!("../builtins/example-1.3.toml")),
    ("example-1.9", include_str!("../builtins/example-1.9.toml")),
    ("example-1.10", include_str!("../builtins/example-1.10.toml")),
    ("example-2.3", include_str!("../builtins/example-2.3.toml")),
    ("example-2.5", include_str!("../builtins/example-2.5.toml")),
    ("mann-linear", include_str!("../builtins/mann-linear.toml")),
    ("ishikawa-linear", include_str!("../builtins/ishikawa-linear.toml")),
];

pub fn list_builtins() -> Vec<&'static str> {
    BUILTINS.iter().map(|(name, _)| *name).collect()
}

pub fn builtin(name: &str) -> Option<&'static str> {
    BUILTINS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| *text)
}
