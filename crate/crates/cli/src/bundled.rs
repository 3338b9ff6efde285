//! Scenarios shipped with the binary, reachable by name.

pub const SCENARIOS: [(&str, &str); 4] = [
    ("fig_a", include_str!("../scenarios/fig_a.toml")),
    ("fig_b", include_str!("../scenarios/fig_b.toml")),
    ("fig_c", include_str!("../scenarios/fig_c.toml")),
    ("fig_d", include_str!("../scenarios/fig_d.toml")),
];

pub const MANIFEST: &str = include_str!("../scenarios/manifest.toml");

/// Looks up `fig_a` or `fig_a.toml`.
pub fn scenario(name: &str) -> Option<&'static str> {
    let name = name.strip_suffix(".toml").unwrap_or(name);
    SCENARIOS.iter().find(|(n, _)| *n == name).map(|(_, text)| *text)
}
