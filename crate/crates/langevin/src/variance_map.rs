//! Intracavity squeezing maps from sampled `±kc` moments.

use pcopo_correlations::{sigma_variance, MomentSet, QuadratureSpec};
use pcopo_model::ModelParams;
use serde::{Deserialize, Serialize};

use crate::config::SimConfig;
use crate::ensemble::{run_ensemble, EnsembleStats, ModeMoments};
use crate::error::{LangevinError, Result};

/// Batches below which a map comparison is not attempted.
pub const MIN_BATCHES: usize = 10;

/// Normally ordered moments from Q-representation samples, given the vacuum
/// floor `<|a_k|^2>` of an empty cavity.
pub fn normal_moments(m: &ModeMoments, floor: f64) -> MomentSet {
    MomentSet {
        n_plus: m.n_plus / floor - 1.0,
        n_minus: m.n_minus / floor - 1.0,
        anom_cross: m.anom_cross / floor,
        anom_plus: m.anom_plus / floor,
        anom_minus: m.anom_minus / floor,
        hop: m.hop / floor,
    }
}

/// Vacuum floor measured from an `E = 0` run, averaged over both modes.
pub fn vacuum_floor(control: &EnsembleStats) -> f64 {
    0.5 * (control.mode_moments.n_plus + control.mode_moments.n_minus)
}

/// `Var(Sigma_{theta, phi})` of the intracavity field, row-major in `theta`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarianceMap {
    pub theta: Vec<f64>,
    pub phi: Vec<f64>,
    pub values: Vec<f64>,
    /// Batch-means standard errors.
    pub errors: Vec<f64>,
    pub moments: MomentSet,
    pub floor: f64,
    pub batches: usize,
}

impl VarianceMap {
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.phi.len() + j]
    }

    pub fn resolved(&self) -> bool {
        self.batches >= MIN_BATCHES
    }
}

fn grid_values(m: &MomentSet, theta: &[f64], phi: &[f64]) -> Vec<f64> {
    theta
        .iter()
        .flat_map(|&t| phi.iter().map(move |&p| sigma_variance(m, QuadratureSpec::new(t, p))))
        .collect()
}

/// Builds the map from a run and its empty-cavity control.
pub fn variance_map_from(stats: &EnsembleStats, control: &EnsembleStats, theta: &[f64], phi: &[f64]) -> Result<VarianceMap> {
    if theta.is_empty() || phi.is_empty() {
        return Err(LangevinError::InvalidConfig {
            field: "angles",
            reason: "empty angle grid".into(),
        });
    }
    let floor = vacuum_floor(control);
    let moments = normal_moments(&stats.mode_moments, floor);
    let values = grid_values(&moments, theta, phi);
    let per_batch: Vec<Vec<f64>> = stats
        .batch_moments
        .iter()
        .map(|b| grid_values(&normal_moments(b, floor), theta, phi))
        .collect();
    let b = per_batch.len();
    let errors = (0..values.len())
        .map(|c| {
            if b < 2 {
                return f64::NAN;
            }
            let mean = per_batch.iter().map(|v| v[c]).sum::<f64>() / b as f64;
            let ss: f64 = per_batch.iter().map(|v| (v[c] - mean).powi(2)).sum();
            (ss / (b - 1) as f64 / b as f64).sqrt()
        })
        .collect();
    Ok(VarianceMap {
        theta: theta.to_vec(),
        phi: phi.to_vec(),
        values,
        errors,
        moments,
        floor,
        batches: b,
    })
}

/// Runs `params` and an `E = 0` control with the same configuration.
pub fn intracavity_variance_map(params: &ModelParams, config: &SimConfig, theta: &[f64], phi: &[f64]) -> Result<VarianceMap> {
    let stats = run_ensemble(params, config)?;
    let control = run_ensemble(&params.with_e(0.0), config)?;
    variance_map_from(&stats, &control, theta, phi)
}

/// The linearized intracavity map on the same angles.
pub fn analytic_intracavity_map(params: &ModelParams, theta: &[f64], phi: &[f64]) -> Result<Vec<f64>> {
    let m = MomentSet::closed(params)?.intracavity();
    Ok(grid_values(&m, theta, phi))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapComparison {
    /// Every cell within `rel_tol` or `n_se` standard errors.
    pub pointwise_ok: bool,
    pub max_rel_dev: f64,
    pub worst_cell: (usize, usize),
    pub argmin_sim: (usize, usize),
    pub argmin_analytic: (usize, usize),
    /// Simulated minimum within one cell (periodic) of a cell whose analytic
    /// value is within `n_se` errors of the analytic minimum.
    pub argmin_ok: bool,
}

fn argmin(v: &[f64], n_phi: usize) -> (usize, usize) {
    let i = v
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap_or(0);
    (i / n_phi, i % n_phi)
}

fn cyclic_gap(a: usize, b: usize, n: usize) -> usize {
    let d = a.abs_diff(b);
    d.min(n - d)
}

/// `None` when the map has fewer than [`MIN_BATCHES`] batches.
pub fn compare_maps(sim: &VarianceMap, analytic: &[f64], rel_tol: f64, n_se: f64) -> Option<MapComparison> {
    if !sim.resolved() || analytic.len() != sim.values.len() {
        return None;
    }
    let (nt, np) = (sim.theta.len(), sim.phi.len());
    let mut ok = true;
    let mut worst = (0.0, 0);
    for (c, (&s, &a)) in sim.values.iter().zip(analytic).enumerate() {
        let dev = (s - a).abs();
        let rel = dev / a.abs();
        if rel > worst.0 {
            worst = (rel, c);
        }
        if !(rel <= rel_tol || dev <= n_se * sim.errors[c]) {
            ok = false;
        }
    }
    let am_s = argmin(&sim.values, np);
    let am_a = argmin(analytic, np);
    let a_min = analytic[am_a.0 * np + am_a.1];
    let tol = n_se * sim.errors[am_s.0 * np + am_s.1];
    let argmin_ok = (0..analytic.len()).any(|c| {
        analytic[c] <= a_min + tol && cyclic_gap(c / np, am_s.0, nt) <= 1 && cyclic_gap(c % np, am_s.1, np) <= 1
    });
    Some(MapComparison {
        pointwise_ok: ok,
        max_rel_dev: worst.0,
        worst_cell: (worst.1 / np, worst.1 % np),
        argmin_sim: am_s,
        argmin_analytic: am_a,
        argmin_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use pcopo_correlations::angle_grids;

    fn map_of(m: &MomentSet, batches: usize) -> VarianceMap {
        let (t, p) = angle_grids(8, 16);
        let values = grid_values(m, &t, &p);
        VarianceMap {
            errors: vec![0.01; values.len()],
            theta: t,
            phi: p,
            values,
            moments: *m,
            floor: 1.0,
            batches,
        }
    }

    #[test]
    fn normal_ordering_subtracts_floor() {
        let q = ModeMoments {
            n_plus: 3.0,
            n_minus: 2.0,
            ..Default::default()
        };
        let m = normal_moments(&q, 2.0);
        assert_eq!((m.n_plus, m.n_minus), (0.5, 0.0));
    }

    #[test]
    fn identical_maps_agree() {
        let p = ModelParams::new(0.8, 0.3, 0.0);
        let m = MomentSet::closed(&p).unwrap().intracavity();
        let map = map_of(&m, 20);
        let c = compare_maps(&map, &map.values, 0.1, 3.0).unwrap();
        assert!(c.pointwise_ok && c.argmin_ok);
        assert_eq!(c.argmin_sim, c.argmin_analytic);
    }

    #[test]
    fn too_few_batches_skips() {
        let map = map_of(&MomentSet::vacuum(), 3);
        assert!(compare_maps(&map, &map.values, 0.1, 3.0).is_none());
    }
}
