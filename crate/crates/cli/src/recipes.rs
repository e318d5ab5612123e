//! Figure recipes shipped inside the binary.

use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};

pub const FIG1: &str = include_str!("../recipes/fig1.toml");
pub const FIG2: &str = include_str!("../recipes/fig2.toml");
pub const FIG3: &str = include_str!("../recipes/fig3.toml");

pub const NAMES: [&str; 3] = ["fig1", "fig2", "fig3"];

pub fn recipe_text(name: &str) -> Option<&'static str> {
    match name {
        "fig1" => Some(FIG1),
        "fig2" => Some(FIG2),
        "fig3" => Some(FIG3),
        _ => None,
    }
}

pub fn recipe(name: &str) -> CliResult<ExperimentConfig> {
    let text = recipe_text(name)
        .ok_or_else(|| CliError::Config(format!("unknown recipe `{name}`, expected one of {}", NAMES.join(", "))))?;
    ExperimentConfig::from_toml(text, &format!("recipe {name}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recipes_resolve() {
        for (name, count) in [("fig1", 16), ("fig2", 6), ("fig3", 12)] {
            let s = recipe(name).unwrap().resolve().unwrap();
            assert_eq!(s.len(), count, "{name}");
        }
        assert!(recipe("fig4").is_err());
    }
}
