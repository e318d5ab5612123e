//! Subcommand bodies, shared by the binary and the tests.

use std::path::{Path, PathBuf};

use crate::ceiling::CeilingReport;
use crate::config::{ExperimentConfig, MobilitySection};
use crate::error::{CliError, CliResult};
use crate::mobility_check::{run_mobility_check, MobilityCheck};
use crate::output::{determinism_hash, read_csv, write_csv};
use crate::plot::render_svg;
use crate::recipes::recipe;
use crate::sweep::{run_sweep, RunOptions, Status, SweepRow};

#[derive(Debug, Clone)]
pub struct SweepSummary {
    pub rows: Vec<SweepRow>,
    pub csv: PathBuf,
    pub svg: Option<PathBuf>,
    pub hash: String,
}

impl SweepSummary {
    pub fn report(&self) -> String {
        let count = |k: Status| self.rows.iter().filter(|r| r.status_kind() == k).count();
        let mut s = format!(
            "wrote {} rows to {} ({} failed, {} capped)\ndeterminism sha256: {}",
            self.rows.len(),
            self.csv.display(),
            count(Status::Failed),
            count(Status::Capped),
            self.hash
        );
        if let Some(svg) = &self.svg {
            s.push_str(&format!("\nplot: {}", svg.display()));
        }
        s
    }
}

/// Runs `cfg` and writes the CSV to `out`, plus an SVG when `svg` is set.
pub fn run_and_write(cfg: &ExperimentConfig, opts: &RunOptions, out: &Path, svg: Option<&Path>) -> CliResult<SweepSummary> {
    let rows = run_sweep(cfg, opts)?;
    write_csv(out, &rows)?;
    if let Some(svg) = svg {
        write_svg(&rows, &cfg.name, svg)?;
    }
    Ok(SweepSummary {
        hash: determinism_hash(&rows),
        rows,
        csv: out.to_path_buf(),
        svg: svg.map(Path::to_path_buf),
    })
}

fn write_svg(rows: &[SweepRow], title: &str, path: &Path) -> CliResult<()> {
    let svg = render_svg(rows, title)?;
    std::fs::write(path, svg).map_err(|e| CliError::io(path, e))
}

fn output_path(flag: Option<PathBuf>, cfg: &ExperimentConfig) -> PathBuf {
    flag.or_else(|| cfg.output.clone())
        .unwrap_or_else(|| PathBuf::from(format!("{}.csv", cfg.name)))
}

pub fn cmd_sweep(config: &Path, out: Option<PathBuf>, opts: &RunOptions) -> CliResult<SweepSummary> {
    let cfg = ExperimentConfig::from_path(config)?;
    let out = output_path(out, &cfg);
    run_and_write(&cfg, opts, &out, None)
}

/// Runs a shipped recipe; the SVG sits next to the CSV.
pub fn cmd_reproduce(name: &str, out: Option<PathBuf>, opts: &RunOptions) -> CliResult<SweepSummary> {
    let cfg = recipe(name)?;
    let out = output_path(out, &cfg);
    let svg = out.with_extension("svg");
    run_and_write(&cfg, opts, &out, Some(&svg))
}

pub fn cmd_plot(csv: &Path, out: Option<PathBuf>) -> CliResult<PathBuf> {
    let rows = read_csv(csv)?;
    let out = out.unwrap_or_else(|| csv.with_extension("svg"));
    let title = csv.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    write_svg(&rows, &title, &out)?;
    Ok(out)
}

/// Reads the `[mobility]` table of any TOML file, so a full experiment
/// file or a mobility-only file both work. Without a file the reference
/// geometry is used.
pub fn mobility_section(config: Option<&Path>) -> CliResult<MobilitySection> {
    let Some(path) = config else {
        return Ok(MobilitySection::reference());
    };
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut table: toml::Table = text
        .parse()
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let mobility = table
        .remove("mobility")
        .ok_or_else(|| CliError::Config(format!("{}: missing [mobility] table", path.display())))?;
    mobility
        .try_into()
        .map_err(|e| CliError::Config(format!("{}: mobility: {e}", path.display())))
}

pub fn cmd_mobility_check(config: Option<&Path>, samples: usize, seed: u64, out: &Path) -> CliResult<MobilityCheck> {
    let section = mobility_section(config)?;
    let model = section.model()?;
    let check = run_mobility_check(&model, samples, seed, section.has_dynamics())?;
    check.write_csv(out)?;
    Ok(check)
}

pub fn cmd_ceiling(kappa_s: f64, kappa_u: f64) -> CliResult<CeilingReport> {
    CeilingReport::new(kappa_s, kappa_u)
}
