//! Duan inseparability and Reid EPR criteria for the `±kc` pair.

use pcopo_model::ModelParams;
use serde::{Deserialize, Serialize};

use crate::error::{CorrelationError, Result};
use crate::moments::MomentSet;
use crate::squeezing::{QuadraturePair, QuadratureSpec};

/// Separability bound used by the Duan criterion for weight `w`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DuanBound {
    /// `2 (w^2 + 1/|w|)`
    #[default]
    AsPrinted,
    /// `2 (w^2 + 1/w^2)`
    Standard,
}

impl DuanBound {
    pub fn value(self, weight: f64) -> f64 {
        let w2 = weight * weight;
        match self {
            DuanBound::AsPrinted => 2.0 * (w2 + 1.0 / weight.abs()),
            DuanBound::Standard => 2.0 * (w2 + 1.0 / w2),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DuanReport {
    pub duan_sum: f64,
    pub duan_bound: f64,
    pub duan_weight: f64,
    pub entangled_duan: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReidReport {
    pub reid_product: f64,
    /// Optimal `lambda` at `(theta, phi)`.
    pub reid_lambda: f64,
    /// Optimal `lambda` at the partner angles.
    pub reid_lambda_partner: f64,
    pub entangled_reid: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntanglementReport {
    pub duan_sum: f64,
    pub duan_bound: f64,
    pub duan_weight: f64,
    pub reid_product: f64,
    pub reid_lambda: f64,
    pub entangled_duan: bool,
    pub entangled_reid: bool,
}

impl EntanglementReport {
    pub fn new(d: DuanReport, r: ReidReport) -> Self {
        Self {
            duan_sum: d.duan_sum,
            duan_bound: d.duan_bound,
            duan_weight: d.duan_weight,
            reid_product: r.reid_product,
            reid_lambda: r.reid_lambda,
            entangled_duan: d.entangled_duan,
            entangled_reid: r.entangled_reid,
        }
    }
}

/// `Var(|w| x1 + x2 / w)` at `spec` plus the same at the partner angles.
pub fn duan_of(m: &MomentSet, spec: QuadratureSpec, weight: f64, bound: DuanBound) -> Result<DuanReport> {
    if !(weight.is_finite() && weight != 0.0) {
        return Err(CorrelationError::InvalidWeight(weight));
    }
    let (a, b) = (weight.abs(), 1.0 / weight);
    let sum = QuadraturePair::new(m, spec).variance(a, b) + QuadraturePair::new(m, spec.partner()).variance(a, b);
    let duan_bound = bound.value(weight);
    Ok(DuanReport {
        duan_sum: sum,
        duan_bound,
        duan_weight: weight,
        entangled_duan: sum < duan_bound,
    })
}

pub fn duan_criterion(params: &ModelParams, spec: QuadratureSpec, weight: f64) -> Result<DuanReport> {
    duan_of(&MomentSet::closed(params)?, spec, weight, DuanBound::default())
}

/// Minimum of `<(x1 + lambda x2)^2>` over `lambda`, and the minimizer.
pub fn conditional_variance(q: &QuadraturePair) -> Result<(f64, f64)> {
    if !(q.x2x2 > 0.0) {
        return Err(CorrelationError::DegenerateVariance(q.x2x2));
    }
    let lambda = -q.x1x2 / q.x2x2;
    Ok((q.x1x1 - q.x1x2 * q.x1x2 / q.x2x2, lambda))
}

pub fn reid_of(m: &MomentSet, spec: QuadratureSpec) -> Result<ReidReport> {
    let (v1, l1) = conditional_variance(&QuadraturePair::new(m, spec))?;
    let (v2, l2) = conditional_variance(&QuadraturePair::new(m, spec.partner()))?;
    let product = v1 * v2;
    Ok(ReidReport {
        reid_product: product,
        reid_lambda: l1,
        reid_lambda_partner: l2,
        entangled_reid: product < 1.0,
    })
}

pub fn reid_criterion(params: &ModelParams, spec: QuadratureSpec) -> Result<ReidReport> {
    reid_of(&MomentSet::closed(params)?, spec)
}

pub fn entanglement_report(params: &ModelParams, spec: QuadratureSpec, weight: f64, bound: DuanBound) -> Result<EntanglementReport> {
    let m = MomentSet::closed(params)?;
    Ok(EntanglementReport::new(duan_of(&m, spec, weight, bound)?, reid_of(&m, spec)?))
}

/// Both criteria over a `theta x phi` grid (row-major in `theta`).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EntanglementMap {
    pub theta: Vec<f64>,
    pub phi: Vec<f64>,
    pub reports: Vec<EntanglementReport>,
}

impl EntanglementMap {
    pub fn at(&self, i: usize, j: usize) -> &EntanglementReport {
        &self.reports[i * self.phi.len() + j]
    }

    pub fn duan_mask(&self) -> Vec<bool> {
        self.reports.iter().map(|r| r.entangled_duan).collect()
    }

    pub fn reid_mask(&self) -> Vec<bool> {
        self.reports.iter().map(|r| r.entangled_reid).collect()
    }

    /// Fraction of grid cells flagged by the Duan criterion.
    pub fn duan_area(&self) -> f64 {
        self.reports.iter().filter(|r| r.entangled_duan).count() as f64 / self.reports.len() as f64
    }

    pub fn reid_area(&self) -> f64 {
        self.reports.iter().filter(|r| r.entangled_reid).count() as f64 / self.reports.len() as f64
    }

    pub fn overlap_area(&self) -> f64 {
        self.reports
            .iter()
            .filter(|r| r.entangled_duan && r.entangled_reid)
            .count() as f64
            / self.reports.len() as f64
    }
}

pub fn entanglement_map_of(m: &MomentSet, theta: &[f64], phi: &[f64], weight: f64, bound: DuanBound) -> Result<EntanglementMap> {
    if theta.is_empty() || phi.is_empty() {
        return Err(CorrelationError::InvalidGrid("empty angle grid".into()));
    }
    let mut reports = Vec::with_capacity(theta.len() * phi.len());
    for &t in theta {
        for &p in phi {
            let spec = QuadratureSpec::new(t, p);
            reports.push(EntanglementReport::new(duan_of(m, spec, weight, bound)?, reid_of(m, spec)?));
        }
    }
    Ok(EntanglementMap {
        theta: theta.to_vec(),
        phi: phi.to_vec(),
        reports,
    })
}

/// Weight-one Duan and Reid maps.
pub fn entanglement_map(params: &ModelParams, theta: &[f64], phi: &[f64]) -> Result<EntanglementMap> {
    entanglement_map_of(&MomentSet::closed(params)?, theta, phi, 1.0, DuanBound::default())
}
