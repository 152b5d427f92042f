//! Internal dense-decomposition helpers shared by the tensor-network code.
//!
//! All SVDs go through the divide-and-conquer driver (zgesdd), which is
//! several times faster than zgesvd at the sizes DMRG produces; the plain
//! driver is kept as a fallback for the rare inputs where zgesdd fails to
//! converge.

use ndarray::{s, Array1, Array2};
use ndarray_linalg::{JobSvd, SVDDC, SVD};

use crate::types::{TruncationConfig, C64, NOISE_FLOOR};

/// A truncated SVD `m ~ u . diag(s) . vt` plus what the truncation cost.
pub(crate) struct TruncatedSvd {
    pub u: Array2<C64>,
    /// Kept singular values, already rescaled when renormalization was on.
    pub s: Vec<f64>,
    pub vt: Array2<C64>,
    /// Sum of squared dropped singular values (unscaled).
    pub discarded: f64,
}

fn full_svd(m: &Array2<C64>) -> Result<(Array2<C64>, Array1<f64>, Array2<C64>), String> {
    match m.svddc(JobSvd::Some) {
        Ok((Some(u), s, Some(vt))) => Ok((u, s, vt)),
        Ok(_) => Err("svddc returned no singular vectors".into()),
        Err(_) => match m.svd(true, true) {
            Ok((Some(u), s, Some(vt))) => Ok((u, s, vt)),
            Ok(_) => Err("svd returned no singular vectors".into()),
            Err(e) => Err(format!("svd backend failure: {e}")),
        },
    }
}

/// Singular values only (descending), via the cheap driver path.
pub(crate) fn singular_values(m: &Array2<C64>) -> Result<Vec<f64>, String> {
    match m.svddc(JobSvd::None) {
        Ok((_, s, _)) => Ok(s.to_vec()),
        Err(_) => m
            .svd(false, false)
            .map(|(_, s, _)| s.to_vec())
            .map_err(|e| format!("svd backend failure: {e}")),
    }
}

/// SVD with rank truncation.
///
/// Keeps at most `trunc.max_bond` values, drops values below
/// `max(trunc.svd_cutoff, NOISE_FLOOR) * sigma_max`, and always keeps at
/// least one. With `renormalize` the kept values are rescaled so that their
/// square sum matches the full spectrum's (state-norm preservation); without
/// it the kept values are returned as-is (operator compression).
pub(crate) fn svd_truncated(
    m: &Array2<C64>,
    trunc: &TruncationConfig,
    renormalize: bool,
) -> Result<TruncatedSvd, String> {
    let (u, s, vt) = full_svd(m)?;
    let smax = s.first().copied().unwrap_or(0.0);
    let threshold = smax * trunc.svd_cutoff.max(NOISE_FLOOR);
    let significant = s.iter().take_while(|&&x| x > threshold).count().max(1);
    let rank = significant.min(trunc.max_bond).max(1);

    let total: f64 = s.iter().map(|x| x * x).sum();
    let kept: f64 = s.iter().take(rank).map(|x| x * x).sum();
    let discarded = (total - kept).max(0.0);
    let scale = if renormalize && kept > 0.0 {
        (total / kept).sqrt()
    } else {
        1.0
    };

    Ok(TruncatedSvd {
        u: u.slice(s![.., ..rank]).to_owned(),
        s: s.iter().take(rank).map(|x| x * scale).collect(),
        vt: vt.slice(s![..rank, ..]).to_owned(),
        discarded,
    })
}
