//! Figure presets shipped with the binary.

use crate::config::ConfigError;

const PRESETS: &[(&str, &str)] = &[
    ("fig2", include_str!("../presets/fig2.conf")),
    ("fig10", include_str!("../presets/fig10.conf")),
    ("fig3", include_str!("../presets/fig3.conf")),
    ("fig6-l1", include_str!("../presets/fig6-l1.conf")),
    ("fig6-l2", include_str!("../presets/fig6-l2.conf")),
    ("fig6-l3", include_str!("../presets/fig6-l3.conf")),
    ("fig6-l4", include_str!("../presets/fig6-l4.conf")),
    ("fig6-l5", include_str!("../presets/fig6-l5.conf")),
    ("bare", include_str!("../presets/bare.conf")),
    ("fig5", include_str!("../presets/fig5.conf")),
    ("fig7", include_str!("../presets/fig7.conf")),
    ("fig8", include_str!("../presets/fig8.conf")),
    ("fig9", include_str!("../presets/fig9.conf")),
    ("fig11a", include_str!("../presets/fig11a.conf")),
    ("fig11b", include_str!("../presets/fig11b.conf")),
];

pub fn names() -> impl Iterator<Item = &'static str> {
    PRESETS.iter().map(|(n, _)| *n)
}

pub fn get(name: &str) -> Result<&'static str, ConfigError> {
    PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| *text)
        .ok_or_else(|| ConfigError::UnknownPreset(name.to_string()))
}

/// Command a preset is written for.
pub fn command_of(text: &str) -> Option<String> {
    text.lines()
        .map(str::trim)
        .find_map(|l| l.strip_prefix("command").and_then(|r| r.trim_start().strip_prefix('=')))
        .map(|v| v.trim().to_string())
}
