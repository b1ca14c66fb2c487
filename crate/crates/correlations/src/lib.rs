//! Below-threshold observables of the few-mode photonic-crystal OPO model:
//! spectra, stationary moments, threshold, squeezing, Duan and Reid
//! entanglement, and twin-beam correlations.

pub mod covariance;
pub mod entanglement;
pub mod error;
pub mod moments;
pub mod quadrature;
pub mod spectrum;
pub mod squeezing;
pub mod threshold;
pub mod twin;

pub use entanglement::{
    duan_criterion, duan_of, entanglement_map, entanglement_map_of, entanglement_report, reid_criterion, reid_of,
    DuanBound, DuanReport, EntanglementMap, EntanglementReport, ReidReport,
};
pub use error::{CorrelationError, Result};
pub use moments::{intensity, second_moments, MomentSet};
pub use quadrature::QuadratureOptions;
pub use spectrum::{spectral_intensity, spectral_intensity_closed};
pub use squeezing::{
    angle_grids, min_variance, min_variance_of, quadrature_variance, sigma_variance, AngleSearch, MinVariance,
    QuadraturePair, QuadratureSpec,
};
pub use threshold::{
    check_below_threshold, is_below_threshold, relative_pump, sigma_den, threshold, threshold_factor, threshold_with,
    ThresholdOptions,
};
pub use twin::{twin_beams, twin_beams_of, twin_raw_variance, TwinBeamReport};
