//! Closed-form inverse checked against its defining relation and against LU.

use pcopo_correlations::threshold;
use pcopo_model::{build_L, invert_L_closed, invert_numeric, ModelParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct MatrixCheck {
    pub draws: usize,
    /// Largest `max |L L^-1 - I|` with the closed-form inverse.
    pub max_identity_defect: f64,
    /// Largest `max |closed - lu| / max |lu|`.
    pub max_rel_diff_lu: f64,
    pub worst: Option<(ModelParams, f64)>,
}

/// One random below-threshold point: `M0, M1` in `[0, 1]`,
/// `E` in `[0, 0.99 E_thr]`, `omega` in `[-5, 5]`.
pub fn draw_point(rng: &mut impl Rng) -> Result<(ModelParams, f64)> {
    let base = ModelParams::new(0.0, rng.random_range(0.0..=1.0), rng.random_range(0.0..=1.0));
    let e = rng.random_range(0.0..=0.99) * threshold(&base)?;
    Ok((base.with_e(e), rng.random_range(-5.0..=5.0)))
}

pub fn matrix_check(draws: usize, seed: u64) -> Result<MatrixCheck> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = MatrixCheck {
        draws,
        max_identity_defect: 0.0,
        max_rel_diff_lu: 0.0,
        worst: None,
    };
    for _ in 0..draws {
        let (p, omega) = draw_point(&mut rng)?;
        let l = build_L(&p, omega)?;
        let closed = invert_L_closed(&p, omega)?;
        let defect = (&l * &closed).identity_defect();
        if defect > out.max_identity_defect {
            out.max_identity_defect = defect;
            out.worst = Some((p, omega));
        }
        let lu = invert_numeric(&l)?.inverse;
        out.max_rel_diff_lu = out.max_rel_diff_lu.max(closed.max_abs_diff(&lu) / lu.max_abs());
    }
    Ok(out)
}
