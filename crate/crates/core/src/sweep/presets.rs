//! Built-in figure presets. Each preset is a TOML document with a `title`
//! and a list of `[[panel]]` tables, every panel being a full [`Config`].

use serde::Deserialize;

use super::{run_sweep, SweepPlan, SweepRecord};
use crate::config::Config;
use crate::error::{Error, Result};

const SOURCES: [(&str, &str); 6] = [
    ("fig1", include_str!("../../presets/fig1.toml")),
    ("fig2", include_str!("../../presets/fig2.toml")),
    ("fig3", include_str!("../../presets/fig3.toml")),
    ("fig4", include_str!("../../presets/fig4.toml")),
    ("fig5", include_str!("../../presets/fig5.toml")),
    ("fig6", include_str!("../../presets/fig6.toml")),
];

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct PresetFile {
    title: String,
    panel: Vec<Config>,
}

#[derive(Debug, Clone)]
pub struct Preset {
    pub name: String,
    pub title: String,
    pub panels: Vec<Config>,
}

impl Preset {
    pub fn from_toml_str(name: &str, text: &str) -> Result<Self> {
        let file: PresetFile = toml::from_str(text).map_err(|e| Error::Parse(format!("preset {name}: {e}")))?;
        Ok(Preset {
            name: name.to_owned(),
            title: file.title,
            panels: file.panel,
        })
    }

    /// Validated plans, one per panel, labelled `<preset>-<panel>`.
    pub fn plans(&self) -> Result<Vec<SweepPlan>> {
        self.panels
            .iter()
            .enumerate()
            .map(|(i, cfg)| {
                let mut plan = SweepPlan::from_config(cfg)?;
                let panel = cfg.label.clone().unwrap_or_else(|| format!("panel{}", i + 1));
                plan.label = format!("{}-{panel}", self.name);
                Ok(plan)
            })
            .collect()
    }

    /// Runs every panel; returns `(label, records)` pairs.
    pub fn run(&self) -> Result<Vec<(String, Vec<SweepRecord>)>> {
        Ok(self
            .plans()?
            .into_iter()
            .map(|plan| {
                let recs = run_sweep(&plan);
                (plan.label, recs)
            })
            .collect())
    }
}

pub fn preset_names() -> impl Iterator<Item = &'static str> {
    SOURCES.iter().map(|(n, _)| *n)
}

pub fn preset(name: &str) -> Result<Preset> {
    let (_, text) = SOURCES
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| Error::config("preset", format!("unknown preset `{name}` (expected fig1..fig6)")))?;
    Preset::from_toml_str(name, text)
}
