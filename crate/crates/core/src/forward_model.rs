//! Physically direct forward aggregation (exact per-element spherical
//! waves), phase configurations and measurement noise.
//!
//! [`aggregate_direct`] makes no far-field approximation and serves as the
//! reference for the factored operators in [`crate::operator`].

use std::f64::consts::TAU;

use nalgebra::{DMatrix, Point3};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::geometry::{RisPanel, SphericalDirection};
use crate::linalg::{cis, CMatrix, CVector};
use crate::{rng, Error, Result};

/// `l(r) = e^{-j2πr/λ} / r`.
pub fn path_factor(r: f64, wavelength: f64) -> Result<Complex64> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::invalid(format!("path length must be > 0, got {r}")));
    }
    if !(wavelength > 0.0) {
        return Err(Error::invalid(format!("wavelength must be > 0, got {wavelength}")));
    }
    // Reduce the cycle count before scaling by 2π to keep the phase exact
    // for ranges of many thousands of wavelengths.
    let cycles = (r / wavelength).rem_euclid(1.0);
    Ok(cis(-TAU * cycles) / r)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Quantization {
    #[default]
    Continuous,
    /// `2^bits` equally spaced levels `2πk/2^bits`.
    Bits(u8),
}

/// `T × N` configuration phases Ω in `[0, 2π)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseBook {
    phases: DMatrix<f64>,
    quantization: Quantization,
}

impl PhaseBook {
    pub fn new(phases: DMatrix<f64>, quantization: Quantization) -> Result<Self> {
        if phases.nrows() == 0 || phases.ncols() == 0 {
            return Err(Error::invalid("phase book needs T >= 1 and N >= 1"));
        }
        if phases.iter().any(|p| !(0.0..TAU).contains(p)) {
            return Err(Error::invalid("configuration phases must lie in [0, 2π)"));
        }
        if let Quantization::Bits(bits) = quantization {
            if bits == 0 || bits > 16 {
                return Err(Error::invalid(format!("unsupported quantization of {bits} bits")));
            }
            let levels = (1u32 << bits) as f64;
            let step = TAU / levels;
            let on_grid = phases.iter().all(|p| {
                let k = p / step;
                (k - k.round()).abs() < 1e-9
            });
            if !on_grid {
                return Err(Error::invalid(format!(
                    "phases are not on the {bits}-bit grid"
                )));
            }
        }
        Ok(Self {
            phases,
            quantization,
        })
    }

    /// i.i.d. random configurations: uniform on `[0, 2π)` when continuous,
    /// equiprobable levels when quantized.
    pub fn random<R: Rng + ?Sized>(
        snapshots: usize,
        elements: usize,
        quantization: Quantization,
        rng: &mut R,
    ) -> Result<Self> {
        if snapshots == 0 || elements == 0 {
            return Err(Error::invalid("phase book needs T >= 1 and N >= 1"));
        }
        let phases = match quantization {
            Quantization::Continuous => DMatrix::from_fn(snapshots, elements, |_, _| {
                let p: f64 = rng.random::<f64>() * TAU;
                if p >= TAU {
                    0.0
                } else {
                    p
                }
            }),
            Quantization::Bits(bits) => {
                if bits == 0 || bits > 16 {
                    return Err(Error::invalid(format!(
                        "unsupported quantization of {bits} bits"
                    )));
                }
                let levels = 1u32 << bits;
                DMatrix::from_fn(snapshots, elements, |_, _| {
                    TAU * rng.random_range(0..levels) as f64 / levels as f64
                })
            }
        };
        Ok(Self {
            phases,
            quantization,
        })
    }

    pub fn snapshots(&self) -> usize {
        self.phases.nrows()
    }

    pub fn elements(&self) -> usize {
        self.phases.ncols()
    }

    pub fn quantization(&self) -> Quantization {
        self.quantization
    }

    pub fn phases(&self) -> &DMatrix<f64> {
        &self.phases
    }

    /// Configuration row `t`.
    pub fn row(&self, t: usize) -> Vec<f64> {
        self.phases.row(t).iter().copied().collect()
    }

    /// The `T × N` matrix `e^{jΩ}`.
    pub fn exp_matrix(&self) -> CMatrix {
        self.phases.map(cis)
    }
}

/// Complex circular Gaussian noise with per-sample variance `σ²`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct NoiseDescriptor {
    pub variance: f64,
    pub seed: u64,
}

impl NoiseDescriptor {
    pub fn new(variance: f64, seed: u64) -> Result<Self> {
        if !(variance >= 0.0) || !variance.is_finite() {
            return Err(Error::invalid(format!("noise variance must be >= 0, got {variance}")));
        }
        Ok(Self { variance, seed })
    }

    pub fn noiseless() -> Self {
        Self {
            variance: 0.0,
            seed: 0,
        }
    }
}

/// i.i.d. samples with real and imaginary parts each `N(0, σ²/2)`.
pub fn synthesize_noise(desc: &NoiseDescriptor, length: usize) -> Result<CVector> {
    if length == 0 {
        return Err(Error::invalid("noise length must be >= 1"));
    }
    NoiseDescriptor::new(desc.variance, desc.seed)?;
    if desc.variance == 0.0 {
        return Ok(CVector::zeros(length));
    }
    let scale = (desc.variance / 2.0).sqrt();
    let mut rng = rng::stream(desc.seed);
    Ok(CVector::from_fn(length, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im) * scale
    }))
}

/// `10·log10(‖E‖² / σ²)`.
pub fn snr_of(field: &CVector, variance: f64) -> Result<f64> {
    if !(variance > 0.0) {
        return Err(Error::invalid(format!("σ² must be > 0, got {variance}")));
    }
    let power: f64 = field.iter().map(|z| z.norm_sqr()).sum();
    Ok(10.0 * (power / variance).log10())
}

/// Noise variance giving `snr_db` relative to a reference power.
pub fn variance_for_snr(power: f64, snr_db: f64) -> f64 {
    power / 10f64.powf(snr_db / 10.0)
}

/// A point source: world position and complex amplitude.
pub type PointSource = (Point3<f64>, Complex64);

/// Element scattering pattern `τ(incident, scattered)` in the panel frame.
pub trait ElementPattern: Sync {
    fn gain(&self, incident: SphericalDirection, scattered: SphericalDirection) -> Complex64;
}

/// Direction-independent gain, the Lambertian element.
#[derive(Debug, Clone, Copy)]
pub struct Isotropic(pub Complex64);

impl ElementPattern for Isotropic {
    fn gain(&self, _: SphericalDirection, _: SphericalDirection) -> Complex64 {
        self.0
    }
}

impl<F> ElementPattern for F
where
    F: Fn(SphericalDirection, SphericalDirection) -> Complex64 + Sync,
{
    fn gain(&self, incident: SphericalDirection, scattered: SphericalDirection) -> Complex64 {
        self(incident, scattered)
    }
}

/// Exact per-element aggregation with the panel's isotropic gain τ:
///
/// `S = Σ_m E_m Σ_n τ e^{jΩ_n} l(r^i_m(n)) l(r^s(n))`.
pub fn aggregate_direct(
    panel: &RisPanel,
    sources: &[PointSource],
    config: &[f64],
    receiver: &Point3<f64>,
) -> Result<Complex64> {
    aggregate_direct_with_pattern(panel, sources, config, receiver, &Isotropic(panel.element_gain()))
}

/// [`aggregate_direct`] with a caller-supplied element pattern evaluated at
/// each element's own incident and scattered directions.
pub fn aggregate_direct_with_pattern(
    panel: &RisPanel,
    sources: &[PointSource],
    config: &[f64],
    receiver: &Point3<f64>,
    pattern: &dyn ElementPattern,
) -> Result<Complex64> {
    if config.len() != panel.len() {
        return Err(Error::dims(format!(
            "configuration has {} phases for {} elements",
            config.len(),
            panel.len()
        )));
    }
    let lambda = panel.wavelength();
    let rot = panel.orientation();
    let mut total = Complex64::new(0.0, 0.0);
    for (n, (elem, omega)) in panel.elements().iter().zip(config).enumerate() {
        let to_rx = receiver - elem;
        let rs = to_rx.norm();
        if !(rs > 0.0) {
            return Err(Error::Geometry(format!("receiver coincides with element {n}")));
        }
        let scattered = SphericalDirection::from_vector(&rot.inverse_transform_vector(&to_rx))?;
        let out = path_factor(rs, lambda)? * cis(*omega);
        for (pos, amp) in sources {
            let to_src = pos - elem;
            let ri = to_src.norm();
            if !(ri > 0.0) {
                return Err(Error::Geometry(format!("source coincides with element {n}")));
            }
            let incident =
                SphericalDirection::from_vector(&rot.inverse_transform_vector(&to_src))?;
            total += amp * pattern.gain(incident, scattered) * out * path_factor(ri, lambda)?;
        }
    }
    Ok(total)
}

/// Wraps a phase into `[0, 2π)`.
pub fn wrap_phase(p: f64) -> f64 {
    let w = p.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w
    }
}
