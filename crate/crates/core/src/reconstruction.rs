//! Field recovery: pseudo-inverse least squares for phased data, reweighted
//! Wirtinger flow for magnitude-only data, and angular peak picking.

use nalgebra::SymmetricEigen;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::linalg::{median, norm, CMatrix, CVector};
use crate::operator::{MeasurementSet, Measurements, SensingOperator};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Regularization {
    /// Moore–Penrose pseudo-inverse; singular values below
    /// `eps · max(rows, cols) · σ_max` are treated as zero.
    #[default]
    None,
    /// Drop singular values below `cutoff · σ_max`.
    TruncatedSvd { cutoff: f64 },
    /// Tikhonov: filter factors `σ / (σ² + weight)`.
    Ridge { weight: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LsOptions {
    pub regularization: Regularization,
}

impl LsOptions {
    pub fn validate(&self) -> Result<()> {
        match self.regularization {
            Regularization::None => Ok(()),
            Regularization::TruncatedSvd { cutoff } if cutoff > 0.0 && cutoff < 1.0 => Ok(()),
            Regularization::TruncatedSvd { cutoff } => {
                Err(Error::invalid(format!("SVD cutoff must lie in (0, 1), got {cutoff}")))
            }
            Regularization::Ridge { weight } if weight >= 0.0 && weight.is_finite() => Ok(()),
            Regularization::Ridge { weight } => Err(Error::invalid(format!("ridge weight must be >= 0, got {weight}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LsSolution {
    pub field: CVector,
    /// `‖HÊ − S‖`.
    pub residual: f64,
    /// Singular values kept by the filter.
    pub effective_rank: usize,
}

/// Least-squares estimate `Ê = H†S` from phased measurements.
pub fn ls_reconstruct(op: &SensingOperator, meas: &MeasurementSet, opts: &LsOptions) -> Result<LsSolution> {
    match &meas.values {
        Measurements::Magnitude(_) => Err(Error::MagnitudeOnly),
        Measurements::Phased(s) => ls_solve(op.matrix(), s, opts),
    }
}

/// [`ls_reconstruct`] on a bare matrix.
pub fn ls_solve(h: &CMatrix, s: &CVector, opts: &LsOptions) -> Result<LsSolution> {
    opts.validate()?;
    if h.nrows() == 0 || h.ncols() == 0 {
        return Err(Error::invalid("operator must have at least one row and column"));
    }
    if s.len() != h.nrows() {
        return Err(Error::dims(format!("{} measurements for {} rows", s.len(), h.nrows())));
    }
    let svd = h.clone().svd(true, true);
    let u = svd.u.as_ref().expect("requested U");
    let v_t = svd.v_t.as_ref().expect("requested Vᴴ");
    let sig = &svd.singular_values;
    let smax = sig.iter().copied().fold(0.0, f64::max);
    let filter = |x: f64| -> f64 {
        match opts.regularization {
            Regularization::None => {
                let tol = f64::EPSILON * h.nrows().max(h.ncols()) as f64 * smax;
                if x > tol {
                    1.0 / x
                } else {
                    0.0
                }
            }
            Regularization::TruncatedSvd { cutoff } => {
                if x >= cutoff * smax && x > 0.0 {
                    1.0 / x
                } else {
                    0.0
                }
            }
            Regularization::Ridge { weight } => {
                if x > 0.0 {
                    x / (x * x + weight)
                } else {
                    0.0
                }
            }
        }
    };
    let mut coeffs = u.adjoint() * s;
    let mut kept = 0;
    for (k, c) in coeffs.iter_mut().enumerate() {
        let f = filter(sig[k]);
        if f != 0.0 {
            kept += 1;
        }
        *c *= f;
    }
    let field = v_t.adjoint() * coeffs;
    let residual = norm(&(h * &field - s));
    Ok(LsSolution {
        field,
        residual,
        effective_rank: kept,
    })
}

#[derive(Debug, Clone, PartialEq, Default)]
pub enum RwfInit {
    #[default]
    Spectral,
    Provided(CVector),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RwfOptions {
    pub max_iters: usize,
    /// Step relative to the curvature estimate `2Σ w_t |h_tᵀz|² ‖h_t‖² / M`.
    pub step: f64,
    /// Reweighting floor; `None` uses `median(|S|²) · 1e-3`.
    pub eta: Option<f64>,
    /// Stop once the relative loss decrease of an accepted step falls below.
    pub tolerance: f64,
    pub init: RwfInit,
}

impl Default for RwfOptions {
    fn default() -> Self {
        Self {
            max_iters: 2000,
            step: 0.5,
            eta: None,
            tolerance: 1e-8,
            init: RwfInit::Spectral,
        }
    }
}

impl RwfOptions {
    pub fn validate(&self, cols: usize) -> Result<()> {
        let mut bad = Vec::new();
        if self.max_iters == 0 {
            bad.push("max_iters must be >= 1".to_string());
        }
        if !(self.step > 0.0) {
            bad.push(format!("step must be > 0, got {}", self.step));
        }
        if let Some(eta) = self.eta {
            if !(eta > 0.0) {
                bad.push(format!("eta must be > 0, got {eta}"));
            }
        }
        if !(self.tolerance > 0.0) {
            bad.push(format!("tolerance must be > 0, got {}", self.tolerance));
        }
        if let RwfInit::Provided(z) = &self.init {
            if z.len() != cols {
                bad.push(format!("initial point has length {} for {cols} unknowns", z.len()));
            }
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::invalid(bad.join("; ")))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RwfSolution {
    /// Best iterate; defined up to a global phase.
    pub field: CVector,
    /// Weighted loss at the returned iterate, under its own weights.
    pub loss: f64,
    /// `‖|HÊ|² − |S|²‖ / ‖|S|²‖` (zero for zero data).
    pub intensity_residual: f64,
    pub iterations: usize,
    pub converged: bool,
    /// `(before, after)` weighted loss of each accepted step, both under the
    /// weights in force at that step.
    pub trace: Vec<(f64, f64)>,
}

/// `w_t = 1 / (| |h_tᵀz|² − y_t² | + η)`.
pub fn rwf_weights(h: &CMatrix, y: &[f64], z: &CVector, eta: f64) -> Vec<f64> {
    let hz = h * z;
    hz.iter()
        .zip(y)
        .map(|(a, yt)| 1.0 / ((a.norm_sqr() - yt * yt).abs() + eta))
        .collect()
}

/// `Σ_t w_t (|h_tᵀz|² − y_t²)²`.
pub fn rwf_loss(h: &CMatrix, y: &[f64], z: &CVector, weights: &[f64]) -> f64 {
    let hz = h * z;
    hz.iter()
        .zip(y)
        .zip(weights)
        .map(|((a, yt), w)| w * (a.norm_sqr() - yt * yt).powi(2))
        .sum()
}

/// Wirtinger gradient `∂f/∂z̄ = Σ_t 2 w_t r_t (h_tᵀz) conj(h_t)` of
/// [`rwf_loss`] for fixed weights. The real gradient with respect to
/// `(Re z, Im z)` is `(2 Re g, 2 Im g)`.
pub fn rwf_gradient(h: &CMatrix, y: &[f64], z: &CVector, weights: &[f64]) -> CVector {
    let hz = h * z;
    let coeff = CVector::from_iterator(
        hz.len(),
        hz.iter()
            .zip(y)
            .zip(weights)
            .map(|((a, yt), w)| a * (2.0 * w * (a.norm_sqr() - yt * yt))),
    );
    h.adjoint() * coeff
}

/// Leading eigenvector of `Σ_t y_t² conj(h_t) h_tᵀ`, scaled so that
/// `Σ|h_tᵀz₀|² = Σ y_t²`.
pub fn spectral_init(h: &CMatrix, y: &[f64]) -> CVector {
    let y2 = CVector::from_iterator(y.len(), y.iter().map(|v| Complex64::new(v * v, 0.0)));
    let weighted = CMatrix::from_fn(h.nrows(), h.ncols(), |t, m| h[(t, m)] * y2[t]);
    let gram = h.adjoint() * weighted;
    let eig = SymmetricEigen::new(gram);
    let (best, _) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if *v > acc.1 { (i, *v) } else { acc });
    let mut z: CVector = eig.eigenvectors.column(best).into_owned();
    let power: f64 = y.iter().map(|v| v * v).sum();
    let got: f64 = (h * &z).iter().map(|a| a.norm_sqr()).sum();
    if got > 0.0 {
        z *= Complex64::new((power / got).sqrt(), 0.0);
    }
    z
}

const MAX_HALVINGS: usize = 60;

/// Magnitude-only recovery: find `Ê` with `|HÊ| ≈ |S|`.
///
/// Returns `Ok` with `converged = false` when `max_iters` runs out; the
/// field is then the best iterate seen.
pub fn rwf_reconstruct(op: &SensingOperator, meas: &MeasurementSet, opts: &RwfOptions) -> Result<RwfSolution> {
    match &meas.values {
        Measurements::Phased(_) => Err(Error::PhasedInput),
        Measurements::Magnitude(y) => rwf_solve(op.matrix(), y, opts),
    }
}

/// [`rwf_reconstruct`] on a bare matrix.
pub fn rwf_solve(h: &CMatrix, y: &[f64], opts: &RwfOptions) -> Result<RwfSolution> {
    opts.validate(h.ncols())?;
    if h.nrows() == 0 || h.ncols() == 0 {
        return Err(Error::invalid("operator must have at least one row and column"));
    }
    if y.len() != h.nrows() {
        return Err(Error::dims(format!("{} magnitudes for {} rows", y.len(), h.nrows())));
    }
    if y.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
        return Err(Error::invalid("magnitudes must be finite and >= 0"));
    }
    if h.nrows() < h.ncols() {
        log::warn!(
            "magnitude-only recovery with {} measurements for {} unknowns",
            h.nrows(),
            h.ncols()
        );
    }
    let y2: Vec<f64> = y.iter().map(|v| v * v).collect();
    let power: f64 = y2.iter().sum();
    if power == 0.0 {
        return Ok(RwfSolution {
            field: CVector::zeros(h.ncols()),
            loss: 0.0,
            intensity_residual: 0.0,
            iterations: 0,
            converged: true,
            trace: Vec::new(),
        });
    }
    let eta = opts.eta.unwrap_or_else(|| {
        let m = median(&y2) * 1e-3;
        if m > 0.0 {
            m
        } else {
            power / y2.len() as f64 * 1e-3
        }
    });
    let intensity_of = |hz: &CVector| -> f64 {
        let num: f64 = hz.iter().zip(&y2).map(|(a, b)| (a.norm_sqr() - b).powi(2)).sum();
        num.sqrt() / y2.iter().map(|b| b * b).sum::<f64>().sqrt()
    };

    // The loss only sees the row space of H, so iterate on coordinates in
    // an orthonormal basis W of it: H z = (H W) c for z = W c + z⊥.
    let (basis, reduced) = row_space(h);
    let start = match &opts.init {
        RwfInit::Spectral => spectral_init(&reduced, y),
        RwfInit::Provided(z0) => basis.adjoint() * z0,
    };
    let offset = match &opts.init {
        RwfInit::Spectral => CVector::zeros(h.ncols()),
        RwfInit::Provided(z0) => z0 - &basis * &start,
    };
    let lift = |c: &CVector| -> CVector { &offset + &basis * c };
    let a = &reduced;
    let row_norms: Vec<f64> = a.row_iter().map(|r| r.iter().map(|v| v.norm_sqr()).sum()).collect();

    let mut c = start;
    let mut best = (f64::INFINITY, c.clone());
    let mut trace = Vec::new();
    let mut scale = opts.step;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < opts.max_iters {
        iterations += 1;
        let w = rwf_weights(a, y, &c, eta);
        let before = rwf_loss(a, y, &c, &w);
        if before == 0.0 {
            converged = true;
            break;
        }
        let g = rwf_gradient(a, y, &c, &w);
        let ac = a * &c;
        let curvature: f64 = 2.0
            * ac.iter()
                .zip(&w)
                .zip(&row_norms)
                .map(|((v, wt), r)| wt * v.norm_sqr() * r)
                .sum::<f64>()
            / a.ncols() as f64;
        let curvature = curvature.max(f64::MIN_POSITIVE);
        let mut accepted = None;
        for _ in 0..MAX_HALVINGS {
            let alpha = scale / curvature;
            let cand = &c - &g * Complex64::new(alpha, 0.0);
            let after = rwf_loss(a, y, &cand, &w);
            if after <= before {
                accepted = Some((cand, after));
                break;
            }
            scale *= 0.5;
        }
        let Some((cand, after)) = accepted else {
            // no descent left at working precision
            converged = true;
            break;
        };
        trace.push((before, after));
        c = cand;
        let res = intensity_of(&(a * &c));
        if res <= best.0 {
            best = (res, c.clone());
        }
        if (before - after) / before < opts.tolerance {
            converged = true;
            break;
        }
    }
    let field = lift(if converged { &c } else { &best.1 });
    let w = rwf_weights(h, y, &field, eta);
    Ok(RwfSolution {
        loss: rwf_loss(h, y, &field, &w),
        intensity_residual: intensity_of(&(h * &field)),
        field,
        iterations,
        converged,
        trace,
    })
}

/// Orthonormal basis `W` (`M × r`) of the row space of `H` and `H W`.
fn row_space(h: &CMatrix) -> (CMatrix, CMatrix) {
    let svd = h.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested Vᴴ");
    let s = &svd.singular_values;
    let smax = s.iter().copied().fold(0.0, f64::max);
    let tol = f64::EPSILON * h.nrows().max(h.ncols()) as f64 * smax;
    let keep: Vec<usize> = (0..s.len()).filter(|&i| s[i] > tol).collect();
    let basis = CMatrix::from_fn(h.ncols(), keep.len().max(1), |m, k| match keep.get(k) {
        Some(&i) => v_t[(i, m)].conj(),
        None => Complex64::new(if m == 0 { 1.0 } else { 0.0 }, 0.0),
    });
    let reduced = h * &basis;
    (basis, reduced)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DoaPeak {
    pub index: usize,
    /// Grid angle in radians.
    pub angle: f64,
    pub magnitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DoaEstimate {
    pub angles: Vec<f64>,
    pub spectrum: Vec<f64>,
    /// Descending by magnitude.
    pub peaks: Vec<DoaPeak>,
    /// False when fewer peaks than requested were found.
    pub complete: bool,
}

/// Picks up to `n_peaks` local maxima of `|Ê|` over an angular grid,
/// greedily by magnitude, at least `min_separation` radians apart. Ties go
/// to the smaller index; a plateau counts once, at its first index.
pub fn extract_doa_peaks(field: &CVector, grid: &[f64], n_peaks: usize, min_separation: f64) -> Result<DoaEstimate> {
    if n_peaks == 0 {
        return Err(Error::invalid("n_peaks must be >= 1"));
    }
    if field.len() != grid.len() {
        return Err(Error::dims(format!(
            "spectrum of length {} on a grid of {} angles",
            field.len(),
            grid.len()
        )));
    }
    if !(min_separation >= 0.0) {
        return Err(Error::invalid("min_separation must be >= 0"));
    }
    let spectrum: Vec<f64> = field.iter().map(|z| z.norm()).collect();
    let n = spectrum.len();
    let mut candidates: Vec<usize> = (0..n)
        .filter(|&i| {
            let s = spectrum[i];
            s > 0.0 && (i == 0 || s > spectrum[i - 1]) && (i + 1 == n || s >= spectrum[i + 1])
        })
        .collect();
    candidates.sort_by(|a, b| spectrum[*b].total_cmp(&spectrum[*a]).then(a.cmp(b)));
    let mut peaks: Vec<DoaPeak> = Vec::new();
    for i in candidates {
        if peaks.len() == n_peaks {
            break;
        }
        if peaks.iter().all(|p| (grid[i] - p.angle).abs() >= min_separation) {
            peaks.push(DoaPeak {
                index: i,
                angle: grid[i],
                magnitude: spectrum[i],
            });
        }
    }
    let complete = peaks.len() == n_peaks;
    if !complete {
        log::warn!("found {} of {} requested peaks", peaks.len(), n_peaks);
    }
    Ok(DoaEstimate {
        angles: grid.to_vec(),
        spectrum,
        peaks,
        complete,
    })
}
