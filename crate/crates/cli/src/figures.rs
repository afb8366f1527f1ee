use crate::config::ScenarioConfig;
use crate::error::{CliError, Result};

/// Bundled scenario configs, one per figure panel plus the lab-unit run.
pub const FIGURES: &[(&str, &str)] = &[
    ("fig2a", include_str!("../configs/fig2a.toml")),
    ("fig2b", include_str!("../configs/fig2b.toml")),
    ("fig2c", include_str!("../configs/fig2c.toml")),
    ("fig2d", include_str!("../configs/fig2d.toml")),
    ("fig2e", include_str!("../configs/fig2e.toml")),
    ("fig3a", include_str!("../configs/fig3a.toml")),
    ("fig3b", include_str!("../configs/fig3b.toml")),
    ("fig3c", include_str!("../configs/fig3c.toml")),
    ("fig3d", include_str!("../configs/fig3d.toml")),
    ("fig4a", include_str!("../configs/fig4a.toml")),
    ("fig4b", include_str!("../configs/fig4b.toml")),
    ("fig4c", include_str!("../configs/fig4c.toml")),
    ("fig4d", include_str!("../configs/fig4d.toml")),
    ("fig5a", include_str!("../configs/fig5a.toml")),
    ("fig5b", include_str!("../configs/fig5b.toml")),
    ("fig6a", include_str!("../configs/fig6a.toml")),
    ("fig6b", include_str!("../configs/fig6b.toml")),
    ("fig6c", include_str!("../configs/fig6c.toml")),
    ("fig6d", include_str!("../configs/fig6d.toml")),
    ("fig6e", include_str!("../configs/fig6e.toml")),
    ("fig6f", include_str!("../configs/fig6f.toml")),
    ("fig7a", include_str!("../configs/fig7a.toml")),
    ("fig7b", include_str!("../configs/fig7b.toml")),
    ("fig7c", include_str!("../configs/fig7c.toml")),
    ("fig7d", include_str!("../configs/fig7d.toml")),
    ("physical_units", include_str!("../configs/physical_units.toml")),
];

pub fn ids() -> Vec<&'static str> {
    FIGURES.iter().map(|(id, _)| *id).collect()
}

pub fn bundled(id: &str) -> Result<ScenarioConfig> {
    let (_, text) = FIGURES
        .iter()
        .find(|(fid, _)| *fid == id)
        .ok_or_else(|| {
            CliError::Config(format!(
                "unknown figure id `{id}`; run `list-figures` for the catalog"
            ))
        })?;
    ScenarioConfig::from_toml(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_bundled_config_parses_and_validates() {
        for (id, _) in FIGURES {
            let cfg = bundled(id).unwrap_or_else(|e| panic!("{id}: {e}"));
            assert_eq!(&cfg.name, id, "config name must match its id");
        }
        assert_eq!(FIGURES.len(), 26);
    }

    #[test]
    fn unknown_id_is_a_config_error() {
        let e = bundled("fig99z").unwrap_err();
        assert_eq!(e.exit_code(), 2);
    }
}
