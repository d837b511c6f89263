//! Recovery-quality metrics: PSNR, relative squared error (normalized by the
//! *estimate*, as conventional for this family of solvers), single-scale
//! SSIM, spectral angle mapper, and their per-band means for 3-order data.

use crate::error::{Error, Result};
use crate::tensor::Tensor;
use rayon::prelude::*;

/// One evaluation of est against ref. `flags` records fallbacks that were
/// taken (tiny SSIM band, zero spectra, excluded infinite bands, ...).
#[derive(Debug, Clone)]
pub struct MetricReport {
    pub psnr: f64,
    pub mpsnr: f64,
    pub ssim: f64,
    pub mssim: f64,
    pub rse: f64,
    pub sam: f64,
    pub peak: f64,
    pub flags: Vec<String>,
}

pub const METRICS_HEADER: &str = "psnr,mpsnr,ssim,mssim,rse,sam,peak";

impl MetricReport {
    /// One CSV row in the fixed field order of [`METRICS_HEADER`].
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.psnr, self.mpsnr, self.ssim, self.mssim, self.rse, self.sam, self.peak
        )
    }
}

fn check_dims(reference: &Tensor, est: &Tensor) -> Result<()> {
    if reference.dims() != est.dims() {
        return Err(Error::DimMismatch(format!(
            "{:?} vs {:?}",
            reference.dims(),
            est.dims()
        )));
    }
    Ok(())
}

/// 10·log10(peak²/MSE); +∞ when the tensors coincide.
pub fn psnr(reference: &Tensor, est: &Tensor, peak: f64) -> Result<f64> {
    check_dims(reference, est)?;
    if peak <= 0.0 {
        return Err(Error::InvalidArgument(format!("peak {peak} must be positive")));
    }
    let mse = reference
        .data()
        .iter()
        .zip(est.data())
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        / reference.numel() as f64;
    if mse == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (peak * peak / mse).log10())
}

/// ‖ref − est‖_F / ‖est‖_F (denominator is the estimate, as printed in the
/// underlying convention; asymmetric on purpose).
pub fn rse(reference: &Tensor, est: &Tensor) -> Result<f64> {
    check_dims(reference, est)?;
    let den = est.frobenius_norm();
    if den == 0.0 {
        return Err(Error::InvalidArgument("rse denominator ‖est‖ is zero".into()));
    }
    Ok(reference.sub(est).frobenius_norm() / den)
}

const SSIM_WINDOW: usize = 11;
const SSIM_SIGMA: f64 = 1.5;
const SSIM_K1: f64 = 0.01;
const SSIM_K2: f64 = 0.03;

fn gaussian_window() -> [f64; SSIM_WINDOW * SSIM_WINDOW] {
    let mut w = [0.0; SSIM_WINDOW * SSIM_WINDOW];
    let c = (SSIM_WINDOW / 2) as f64;
    let mut sum = 0.0;
    for j in 0..SSIM_WINDOW {
        for i in 0..SSIM_WINDOW {
            let v = (-(((i as f64 - c).powi(2) + (j as f64 - c).powi(2)) / (2.0 * SSIM_SIGMA * SSIM_SIGMA))).exp();
            w[i + j * SSIM_WINDOW] = v;
            sum += v;
        }
    }
    for v in &mut w {
        *v /= sum;
    }
    w
}

fn ssim_from_stats(mx: f64, my: f64, sxx: f64, syy: f64, sxy: f64, peak: f64) -> f64 {
    let c1 = (SSIM_K1 * peak) * (SSIM_K1 * peak);
    let c2 = (SSIM_K2 * peak) * (SSIM_K2 * peak);
    ((2.0 * mx * my + c1) * (2.0 * sxy + c2)) / ((mx * mx + my * my + c1) * (sxx + syy + c2))
}

/// Single-scale SSIM of two 2-D bands: Gaussian 11×11 window (σ = 1.5),
/// K₁ = 0.01, K₂ = 0.03, dynamic range = peak, averaged over all fully
/// interior window positions. Bands smaller than the window fall back to one
/// global-statistics evaluation; the bool result reports that fallback.
pub fn ssim(reference: &Tensor, est: &Tensor, peak: f64) -> Result<(f64, bool)> {
    check_dims(reference, est)?;
    if reference.order() != 2 {
        return Err(Error::DimMismatch(format!("ssim band must be 2-D, got {:?}", reference.dims())));
    }
    let (h, w) = (reference.dims()[0], reference.dims()[1]);
    if h < SSIM_WINDOW || w < SSIM_WINDOW {
        // global statistics: uniform weights over the whole band
        let n = (h * w) as f64;
        let mx = reference.data().iter().sum::<f64>() / n;
        let my = est.data().iter().sum::<f64>() / n;
        let mut sxx = 0.0;
        let mut syy = 0.0;
        let mut sxy = 0.0;
        for (a, b) in reference.data().iter().zip(est.data()) {
            sxx += (a - mx) * (a - mx);
            syy += (b - my) * (b - my);
            sxy += (a - mx) * (b - my);
        }
        return Ok((ssim_from_stats(mx, my, sxx / n, syy / n, sxy / n, peak), true));
    }
    let win = gaussian_window();
    let x = reference.data();
    let y = est.data();
    let mut total = 0.0;
    for c0 in 0..=(w - SSIM_WINDOW) {
        for r0 in 0..=(h - SSIM_WINDOW) {
            let mut mx = 0.0;
            let mut my = 0.0;
            let mut xx = 0.0;
            let mut yy = 0.0;
            let mut xy = 0.0;
            for j in 0..SSIM_WINDOW {
                let col = (c0 + j) * h + r0;
                for i in 0..SSIM_WINDOW {
                    let g = win[i + j * SSIM_WINDOW];
                    let a = x[col + i];
                    let b = y[col + i];
                    mx += g * a;
                    my += g * b;
                    xx += g * a * a;
                    yy += g * b * b;
                    xy += g * a * b;
                }
            }
            total += ssim_from_stats(mx, my, xx - mx * mx, yy - my * my, xy - mx * my, peak);
        }
    }
    let positions = ((h - SSIM_WINDOW + 1) * (w - SSIM_WINDOW + 1)) as f64;
    Ok((total / positions, false))
}

fn band(t: &Tensor, k: usize) -> Tensor {
    let (h, w) = (t.dims()[0], t.dims()[1]);
    let s = h * w;
    Tensor::new(vec![h, w], t.data()[k * s..(k + 1) * s].to_vec()).expect("band slice")
}

/// Mean spectral angle (radians) over all spatial positions of two 3-order
/// tensors, spectra along mode 3. A position with a zero spectrum in either
/// input contributes angle 0; the count of such positions is returned.
pub fn sam(reference: &Tensor, est: &Tensor) -> Result<(f64, usize)> {
    check_dims(reference, est)?;
    if reference.order() != 3 {
        return Err(Error::DimMismatch(format!("sam needs 3-order, got {:?}", reference.dims())));
    }
    let (h, w, k) = (reference.dims()[0], reference.dims()[1], reference.dims()[2]);
    let plane = h * w;
    let mut sum = 0.0;
    let mut zeros = 0usize;
    for p in 0..plane {
        let mut na = 0.0;
        let mut nb = 0.0;
        for b in 0..k {
            let a = reference.data()[p + b * plane];
            let e = est.data()[p + b * plane];
            na += a * a;
            nb += e * e;
        }
        if na == 0.0 || nb == 0.0 {
            zeros += 1;
            continue;
        }
        let (na, nb) = (na.sqrt(), nb.sqrt());
        // arccos of the clipped normalized dot product, evaluated in the
        // half-angle form 2·atan2(‖û−v̂‖, ‖û+v̂‖); identical angle, but stays
        // accurate near 0 and π where acos sheds half its digits
        let mut diff = 0.0;
        let mut summ = 0.0;
        for b in 0..k {
            let u = reference.data()[p + b * plane] / na;
            let v = est.data()[p + b * plane] / nb;
            diff += (u - v) * (u - v);
            summ += (u + v) * (u + v);
        }
        sum += 2.0 * diff.sqrt().atan2(summ.sqrt());
    }
    Ok((sum / plane as f64, zeros))
}

/// Per-band mean PSNR over mode-3 slices; +∞ bands are excluded from the
/// mean (their count is returned); all-band-∞ collapses to the +∞ sentinel.
pub fn mpsnr(reference: &Tensor, est: &Tensor, peak: f64) -> Result<(f64, usize)> {
    check_dims(reference, est)?;
    if reference.order() != 3 {
        return Err(Error::DimMismatch(format!("mpsnr needs 3-order, got {:?}", reference.dims())));
    }
    let bands = reference.dims()[2];
    let vals: Vec<f64> = (0..bands)
        .map(|k| psnr(&band(reference, k), &band(est, k), peak))
        .collect::<Result<_>>()?;
    let finite: Vec<f64> = vals.iter().copied().filter(|v| v.is_finite()).collect();
    let skipped = bands - finite.len();
    if finite.is_empty() {
        return Ok((f64::INFINITY, skipped));
    }
    Ok((finite.iter().sum::<f64>() / finite.len() as f64, skipped))
}

/// Full report; ssim/mssim/sam/mpsnr fall back to NaN (with a flag) for
/// orders where they are undefined.
pub fn evaluate(reference: &Tensor, est: &Tensor, peak: f64) -> Result<MetricReport> {
    check_dims(reference, est)?;
    let mut flags = Vec::new();
    let psnr_v = psnr(reference, est, peak)?;
    let rse_v = match rse(reference, est) {
        Ok(v) => v,
        Err(_) => {
            flags.push("rse-zero-denominator".into());
            f64::NAN
        }
    };
    let (ssim_v, mssim_v, sam_v, mpsnr_v) = match reference.order() {
        2 => {
            let (s, fell) = ssim(reference, est, peak)?;
            if fell {
                flags.push("ssim-global-fallback".into());
            }
            (s, s, f64::NAN, psnr_v)
        }
        3 => {
            let bands = reference.dims()[2];
            let per: Vec<(f64, bool)> = (0..bands)
                .into_par_iter()
                .map(|k| ssim(&band(reference, k), &band(est, k), peak).expect("band dims agree"))
                .collect();
            if per.iter().any(|&(_, fell)| fell) {
                flags.push("ssim-global-fallback".into());
            }
            let mean = per.iter().map(|&(s, _)| s).sum::<f64>() / bands as f64;
            let (sam_v, zero_px) = sam(reference, est)?;
            if zero_px > 0 {
                flags.push(format!("sam-zero-spectra:{zero_px}"));
            }
            let (mp, skipped) = mpsnr(reference, est, peak)?;
            if skipped > 0 {
                flags.push(format!("mpsnr-infinite-bands-excluded:{skipped}"));
            }
            (mean, mean, sam_v, mp)
        }
        _ => {
            flags.push("band-metrics-undefined-for-order".into());
            (f64::NAN, f64::NAN, f64::NAN, psnr_v)
        }
    };
    if reference.order() != 3 {
        flags.push("sam-undefined-for-order".into());
    }
    Ok(MetricReport {
        psnr: psnr_v,
        mpsnr: mpsnr_v,
        ssim: ssim_v,
        mssim: mssim_v,
        rse: rse_v,
        sam: sam_v,
        peak,
        flags,
    })
}
