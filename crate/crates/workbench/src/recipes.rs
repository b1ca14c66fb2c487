//! Figure recipes: named bundles of sweep configurations plus plot commands.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use pcopo_langevin::SimConfig;
use serde::Deserialize;

use crate::config::{parse_raw, LoadedConfig, RawConfig, RawParams, RawSweep, CONFIG_VERSION};
use crate::error::{Result, WorkbenchError};
use crate::export::write_output;
use crate::sweep::{default_workers, run_sweep_with, Axis, ResultRecord};

pub const FIGURE_IDS: [&str; 8] = ["fig1", "fig3a", "fig3b", "fig3c", "fig4", "fig5", "fig6", "fig7"];

pub fn recipe_source(id: &str) -> Option<&'static str> {
    Some(match id {
        "fig1" => include_str!("../recipes/fig1.toml"),
        "fig3a" => include_str!("../recipes/fig3a.toml"),
        "fig3b" => include_str!("../recipes/fig3b.toml"),
        "fig3c" => include_str!("../recipes/fig3c.toml"),
        "fig4" => include_str!("../recipes/fig4.toml"),
        "fig5" => include_str!("../recipes/fig5.toml"),
        "fig6" => include_str!("../recipes/fig6.toml"),
        "fig7" => include_str!("../recipes/fig7.toml"),
        _ => return None,
    })
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPanel {
    name: String,
    title: String,
    plot: String,
    params: Option<RawParams>,
    sim: Option<SimConfig>,
    sweep: Option<RawSweep>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRecipe {
    id: String,
    title: String,
    panels: Vec<RawPanel>,
}

#[derive(Debug, Clone)]
pub struct Panel {
    pub name: String,
    pub title: String,
    /// Gnuplot command; `{file}` stands for the panel's CSV.
    pub plot: String,
    pub config: LoadedConfig,
}

#[derive(Debug, Clone)]
pub struct Recipe {
    pub id: String,
    pub title: String,
    pub panels: Vec<Panel>,
}

pub fn load_recipe(id: &str) -> Result<Recipe> {
    let src = recipe_source(id).ok_or_else(|| WorkbenchError::UnknownFigure(id.to_string()))?;
    let origin = format!("recipe {id}");
    let raw: RawRecipe = parse_raw(src, &origin)?;
    let panels = raw
        .panels
        .into_iter()
        .map(|p| {
            let config = LoadedConfig::from_raw(RawConfig {
                version: Some(CONFIG_VERSION),
                params: p.params,
                sim: p.sim,
                sweep: p.sweep,
            })?;
            Ok(Panel {
                name: p.name,
                title: p.title,
                plot: p.plot,
                config,
            })
        })
        .collect::<Result<_>>()?;
    Ok(Recipe {
        id: raw.id,
        title: raw.title,
        panels,
    })
}

fn thin(values: &[Vec<f64>], max: usize) -> Vec<Vec<f64>> {
    if values.len() <= max {
        return values.to_vec();
    }
    (0..max).map(|i| values[i * (values.len() - 1) / (max - 1)].clone()).collect()
}

/// Cheaper variant of a panel for smoke runs: coarser axes and angle grids,
/// shorter and fewer trajectories.
pub fn quick(config: &LoadedConfig) -> LoadedConfig {
    let mut c = config.clone();
    for axis in &mut c.sweep.axes {
        *axis = Axis {
            names: axis.names.clone(),
            values: thin(&axis.values, 11),
        };
    }
    let o = &mut c.sweep.options;
    o.omega_points = o.omega_points.min(81);
    o.n_theta = o.n_theta.min(19);
    o.n_phi = o.n_phi.min(37);
    let s = &mut c.sim;
    s.t_transient = s.t_transient.min(20.0);
    s.t_measure = s.t_measure.min(100.0);
    s.n_trajectories = s.n_trajectories.min(2);
    c
}

fn gnuplot_script(recipe: &Recipe) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# {}", recipe.title);
    let _ = writeln!(s, "set datafile separator ','");
    let _ = writeln!(s, "set datafile commentschars '#'");
    let _ = writeln!(s, "set key autotitle columnhead");
    let _ = writeln!(s, "set terminal pngcairo size 900,650");
    for p in &recipe.panels {
        let stem = format!("{}_{}", recipe.id, p.name);
        let _ = writeln!(s, "\nset output '{stem}.png'");
        let _ = writeln!(s, "set title '{}'", p.title.replace('\'', "''"));
        let _ = writeln!(s, "{}", p.plot.replace("{file}", &format!("{stem}.csv")));
    }
    s
}

pub struct FigureOutput {
    pub files: Vec<PathBuf>,
    pub records: Vec<(String, Vec<ResultRecord>)>,
}

/// Runs every panel of a recipe and writes `<id>_<panel>.csv` plus `<id>.gp`.
pub fn reproduce_figure(id: &str, out_dir: &Path, quick_mode: bool) -> Result<FigureOutput> {
    let recipe = load_recipe(id)?;
    std::fs::create_dir_all(out_dir).map_err(|e| WorkbenchError::io(out_dir.display().to_string(), e))?;
    let workers = default_workers();
    let mut files = Vec::new();
    let mut records = Vec::new();
    for panel in &recipe.panels {
        let config = if quick_mode { quick(&panel.config) } else { panel.config.clone() };
        let r = run_sweep_with(&config.params, &config.sim, &config.sweep, workers)?;
        let path = out_dir.join(format!("{}_{}.csv", recipe.id, panel.name));
        write_output(&path, &r, &config)?;
        files.push(path);
        records.push((panel.name.clone(), r));
    }
    let gp = out_dir.join(format!("{}.gp", recipe.id));
    std::fs::write(&gp, gnuplot_script(&recipe)).map_err(|e| WorkbenchError::io(gp.display().to_string(), e))?;
    files.push(gp);
    Ok(FigureOutput { files, records })
}
