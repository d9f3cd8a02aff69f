//! Figure-reproduction presets, shipped as config files in `presets/`
//! and embedded here.

const PRESETS: &[(&str, &str)] = &[
    ("fig2a", include_str!("../../presets/fig2a.cfg")),
    ("fig2b", include_str!("../../presets/fig2b.cfg")),
    ("fig3a", include_str!("../../presets/fig3a.cfg")),
    ("fig3b", include_str!("../../presets/fig3b.cfg")),
    ("fig3c", include_str!("../../presets/fig3c.cfg")),
    ("fig5a", include_str!("../../presets/fig5a.cfg")),
    ("fig5b", include_str!("../../presets/fig5b.cfg")),
];

/// Configuration text of a named preset.
pub fn preset(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, text)| *text)
}

pub fn preset_names() -> Vec<&'static str> {
    PRESETS.iter().map(|(n, _)| *n).collect()
}
