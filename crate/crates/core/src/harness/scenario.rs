//! Scenario files: schema, defaults, validation, canonical form and hashing.
//!
//! Files are TOML. Every omitted key takes the default deployment: a
//! 10 m × 10 m RoI of 1 m pixels, four 50-element linear panels at
//! landmarks A, C, E, G on a 25 m circle, 100 snapshots each, 30 GHz,
//! 1 cm spacing, dedicated receivers and no noise. Angles are radians.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_8};
use std::path::Path;

use nalgebra::{Point3, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::forward_model::Quantization;
use crate::geometry::{discretize_roi_cartesian, RegionOfInterest};
use crate::linalg::CVector;
use crate::reconstruction::Regularization;
use crate::{Error, Result};

pub const LANDMARK_IDS: [&str; 8] = ["A", "B", "C", "D", "E", "F", "G", "H"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ReceiverMode {
    #[default]
    Dedicated,
    Shared,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum RoiSpec {
    Cartesian {
        origin: [f64; 2],
        pixel: [f64; 2],
        counts: [usize; 2],
        #[serde(default)]
        z: f64,
    },
    /// In-plane angles `start, start + step, …, ≤ stop` in the panel frame.
    Angular { start: f64, stop: f64, step: f64 },
}

impl Default for RoiSpec {
    fn default() -> Self {
        RoiSpec::Cartesian {
            origin: [-5.0, -5.0],
            pixel: [1.0, 1.0],
            counts: [10, 10],
            z: 0.0,
        }
    }
}

impl RoiSpec {
    pub fn angles(&self) -> Option<Vec<f64>> {
        match *self {
            RoiSpec::Angular { start, stop, step } => {
                let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
                Some((0..count).map(|i| start + i as f64 * step).collect())
            }
            RoiSpec::Cartesian { .. } => None,
        }
    }

    pub fn center(&self) -> [f64; 3] {
        match *self {
            RoiSpec::Cartesian { origin, pixel, counts, z } => [
                origin[0] + pixel[0] * counts[0] as f64 / 2.0,
                origin[1] + pixel[1] * counts[1] as f64 / 2.0,
                z,
            ],
            RoiSpec::Angular { .. } => [0.0; 3],
        }
    }
}

/// Candidate panel sites on a circle around the RoI center, site `k` at
/// polar angle `start + k·step`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LandmarkSpec {
    pub radius: f64,
    pub start: f64,
    pub step: f64,
}

impl Default for LandmarkSpec {
    fn default() -> Self {
        Self {
            radius: 25.0,
            start: -FRAC_PI_2,
            step: FRAC_PI_8,
        }
    }
}

fn default_elements() -> usize {
    50
}
fn default_rows() -> usize {
    1
}
fn default_spacing() -> f64 {
    0.01
}
fn default_snapshots() -> usize {
    100
}
fn default_gain() -> [f64; 2] {
    [1.0, 0.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PanelSpec {
    /// One of `A`…`H`; exclusive with `position`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub landmark: Option<String>,
    /// Element centroid.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub position: Option<[f64; 3]>,
    /// Facing direction; defaults toward the RoI center.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normal: Option<[f64; 3]>,
    /// Element-row direction; defaults to the horizontal tangent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axis: Option<[f64; 3]>,
    /// Elements per row.
    #[serde(default = "default_elements")]
    pub elements: usize,
    #[serde(default = "default_rows")]
    pub rows: usize,
    #[serde(default = "default_spacing")]
    pub spacing: f64,
    #[serde(default = "default_snapshots")]
    pub snapshots: usize,
    /// Element gain τ as `[re, im]`.
    #[serde(default = "default_gain")]
    pub gain: [f64; 2],
    /// Dedicated receiver position; defaults to 25 m from the panel at
    /// local `θ = π/4, φ = π/2`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub receiver: Option<[f64; 3]>,
}

impl PanelSpec {
    pub fn at_landmark(id: &str) -> Self {
        Self {
            landmark: Some(id.to_string()),
            position: None,
            normal: None,
            axis: None,
            elements: default_elements(),
            rows: default_rows(),
            spacing: default_spacing(),
            snapshots: default_snapshots(),
            gain: default_gain(),
            receiver: None,
        }
    }

    pub fn gain(&self) -> Complex64 {
        Complex64::new(self.gain[0], self.gain[1])
    }

    pub fn element_count(&self) -> usize {
        self.elements * self.rows
    }
}

fn default_panels() -> Vec<PanelSpec> {
    ["A", "C", "E", "G"].iter().map(|id| PanelSpec::at_landmark(id)).collect()
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseSpec {
    #[serde(default)]
    pub quantization: Quantization,
}

/// At most one of the two may be given; neither means noiseless.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSpec {
    /// `10 log10(mean|HE|² / σ²)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snr_db: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variance: Option<f64>,
}

impl NoiseSpec {
    pub fn is_noiseless(&self) -> bool {
        self.snr_db.is_none() && self.variance.unwrap_or(0.0) == 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    #[default]
    Ls,
    Rwf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RwfSpec {
    pub max_iters: usize,
    pub step: f64,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
}

impl Default for RwfSpec {
    fn default() -> Self {
        let d = crate::reconstruction::RwfOptions::default();
        Self {
            max_iters: d.max_iters,
            step: d.step,
            tolerance: d.tolerance,
            eta: d.eta,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSpec {
    #[serde(default)]
    pub method: Method,
    #[serde(default)]
    pub magnitude_only: bool,
    #[serde(default)]
    pub regularization: Regularization,
    #[serde(default)]
    pub rwf: RwfSpec,
    /// Angular RoI only: peaks to extract and their minimum separation.
    #[serde(default = "default_peaks")]
    pub peaks: usize,
    #[serde(default = "default_min_separation")]
    pub min_separation: f64,
}

fn default_peaks() -> usize {
    1
}
fn default_min_separation() -> f64 {
    2f64.to_radians()
}

impl Default for SolverSpec {
    fn default() -> Self {
        Self {
            method: Method::Ls,
            magnitude_only: false,
            regularization: Regularization::None,
            rwf: RwfSpec::default(),
            peaks: default_peaks(),
            min_separation: default_min_separation(),
        }
    }
}

fn one() -> [f64; 2] {
    [1.0, 0.0]
}

/// Source masks. Pixel indices are `[ix, iy]`; overlapping masks add.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SourceSpec {
    Point {
        pixel: [usize; 2],
        #[serde(default = "one")]
        amplitude: [f64; 2],
    },
    /// Inclusive pixel rectangle.
    Rect {
        from: [usize; 2],
        to: [usize; 2],
        #[serde(default = "one")]
        amplitude: [f64; 2],
    },
    /// Horizontal arm of `width` pixels and vertical arm of `height` pixels
    /// sharing the `corner` pixel.
    L {
        corner: [usize; 2],
        width: usize,
        height: usize,
        #[serde(default = "one")]
        amplitude: [f64; 2],
    },
    /// The pixel containing a point `[x, y]`.
    At {
        position: [f64; 2],
        #[serde(default = "one")]
        amplitude: [f64; 2],
    },
    /// Angular RoI: the grid angle nearest to `angle` (within half a step).
    Direction {
        angle: f64,
        #[serde(default = "one")]
        amplitude: [f64; 2],
    },
}

fn default_frequency() -> f64 {
    30e9
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_frequency")]
    pub frequency_hz: f64,
    #[serde(default)]
    pub mode: ReceiverMode,
    /// Shared-mode receiver; defaults to 25 m above the RoI center.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub receiver: Option<[f64; 3]>,
    #[serde(default)]
    pub roi: RoiSpec,
    #[serde(default)]
    pub landmarks: LandmarkSpec,
    #[serde(default)]
    pub phases: PhaseSpec,
    #[serde(default)]
    pub noise: NoiseSpec,
    #[serde(default)]
    pub solver: SolverSpec,
    #[serde(default = "default_panels")]
    pub panels: Vec<PanelSpec>,
    pub sources: Vec<SourceSpec>,
}

impl Scenario {
    /// The default deployment with a rectangle, an L and a point source.
    pub fn table_one() -> Self {
        Self::with_sources(vec![
            SourceSpec::Rect {
                from: [1, 6],
                to: [3, 8],
                amplitude: one(),
            },
            SourceSpec::L {
                corner: [5, 1],
                width: 4,
                height: 4,
                amplitude: one(),
            },
            SourceSpec::Point {
                pixel: [7, 7],
                amplitude: one(),
            },
        ])
    }

    pub fn with_sources(sources: Vec<SourceSpec>) -> Self {
        Self {
            seed: 0,
            frequency_hz: default_frequency(),
            mode: ReceiverMode::default(),
            receiver: None,
            roi: RoiSpec::default(),
            landmarks: LandmarkSpec::default(),
            phases: PhaseSpec::default(),
            noise: NoiseSpec::default(),
            solver: SolverSpec::default(),
            panels: default_panels(),
            sources,
        }
    }

    pub fn wavelength(&self) -> f64 {
        crate::wavelength_for(self.frequency_hz)
    }

    /// Parses and validates TOML text.
    pub fn from_toml(text: &str) -> Result<Self> {
        let scn: Scenario = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        scn.validate()?;
        Ok(scn)
    }

    /// Deterministic TOML rendering with every default materialized.
    pub fn canonical(&self) -> String {
        toml::to_string(self).expect("scenario serializes")
    }

    /// Hex SHA-256 of [`Scenario::canonical`].
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.canonical().as_bytes()))
    }

    /// First 12 hex digits of the hash, used in file names.
    pub fn short_hash(&self) -> String {
        self.hash()[..12].to_string()
    }

    /// Collects every violation instead of stopping at the first one.
    pub fn validate(&self) -> Result<()> {
        let mut bad = Vec::new();
        if !(self.frequency_hz > 0.0) || !self.frequency_hz.is_finite() {
            bad.push(format!("frequency_hz must be > 0, got {}", self.frequency_hz));
        }
        let angular = matches!(self.roi, RoiSpec::Angular { .. });
        match self.roi {
            RoiSpec::Cartesian { pixel, counts, .. } => {
                if pixel.iter().any(|p| !(*p > 0.0)) {
                    bad.push(format!("roi.pixel must be > 0, got {pixel:?}"));
                }
                if counts.contains(&0) {
                    bad.push(format!("roi.counts must be >= 1, got {counts:?}"));
                }
            }
            RoiSpec::Angular { start, stop, step } => {
                if !(step > 0.0) {
                    bad.push(format!("roi.step must be > 0, got {step}"));
                }
                if !(stop >= start) {
                    bad.push(format!("roi.stop ({stop}) must be >= roi.start ({start})"));
                }
                if start < -FRAC_PI_2 - 1e-12 || stop > FRAC_PI_2 + 1e-12 {
                    bad.push("angular RoI must lie within [-π/2, π/2]".to_string());
                }
            }
        }
        if !(self.landmarks.radius > 0.0) {
            bad.push(format!("landmarks.radius must be > 0, got {}", self.landmarks.radius));
        }
        if self.panels.is_empty() {
            bad.push("at least one panel is required".to_string());
        }
        if angular && self.panels.len() != 1 {
            bad.push(format!("an angular RoI takes exactly one panel, got {}", self.panels.len()));
        }
        if angular && self.mode == ReceiverMode::Shared {
            bad.push("shared mode needs a Cartesian RoI".to_string());
        }
        for (k, p) in self.panels.iter().enumerate() {
            if let Some(id) = &p.landmark {
                if !LANDMARK_IDS.contains(&id.as_str()) {
                    bad.push(format!("panels[{k}].landmark: unknown landmark {id:?} (expected A-H)"));
                }
                if p.position.is_some() {
                    bad.push(format!("panels[{k}]: give landmark or position, not both"));
                }
            } else if p.position.is_none() && !angular {
                bad.push(format!("panels[{k}]: landmark or position is required"));
            }
            if p.elements == 0 || p.rows == 0 {
                bad.push(format!("panels[{k}]: elements and rows must be >= 1"));
            }
            if !(p.spacing > 0.0) {
                bad.push(format!("panels[{k}].spacing must be > 0, got {}", p.spacing));
            }
            if p.snapshots == 0 {
                bad.push(format!("panels[{k}].snapshots must be >= 1"));
            }
            if p.gain[0] == 0.0 && p.gain[1] == 0.0 {
                bad.push(format!("panels[{k}].gain must be nonzero"));
            }
            if p.receiver.is_some() && self.mode == ReceiverMode::Shared {
                bad.push(format!("panels[{k}].receiver is not used in shared mode; set the top-level receiver"));
            }
        }
        if self.mode == ReceiverMode::Shared {
            let t: Vec<usize> = self.panels.iter().map(|p| p.snapshots).collect();
            if t.windows(2).any(|w| w[0] != w[1]) {
                bad.push(format!("shared mode needs equal snapshots on every panel, got {t:?}"));
            }
        } else if self.receiver.is_some() {
            bad.push("top-level receiver is only used in shared mode; set panels[k].receiver".to_string());
        }
        if self.noise.snr_db.is_some() && self.noise.variance.is_some() {
            bad.push("noise: give snr_db or variance, not both".to_string());
        }
        if let Some(v) = self.noise.variance {
            if !(v >= 0.0) {
                bad.push(format!("noise.variance must be >= 0, got {v}"));
            }
        }
        if let Some(s) = self.noise.snr_db {
            if !s.is_finite() {
                bad.push("noise.snr_db must be finite".to_string());
            }
        }
        if self.solver.method == Method::Ls && self.solver.magnitude_only {
            bad.push("solver: least squares needs phased data; use method = \"rwf\" with magnitude_only".to_string());
        }
        if self.solver.peaks == 0 {
            bad.push("solver.peaks must be >= 1".to_string());
        }
        let rwf = &self.solver.rwf;
        if rwf.max_iters == 0 || !(rwf.step > 0.0) || !(rwf.tolerance > 0.0) || rwf.eta.is_some_and(|e| !(e > 0.0)) {
            bad.push("solver.rwf: max_iters >= 1, step > 0, tolerance > 0, eta > 0 required".to_string());
        }
        if let Regularization::TruncatedSvd { cutoff } = self.solver.regularization {
            if !(cutoff > 0.0 && cutoff < 1.0) {
                bad.push(format!("solver.regularization.cutoff must lie in (0, 1), got {cutoff}"));
            }
        }
        if let Regularization::Ridge { weight } = self.solver.regularization {
            if !(weight >= 0.0) {
                bad.push(format!("solver.regularization.weight must be >= 0, got {weight}"));
            }
        }
        if self.sources.is_empty() {
            bad.push("at least one source is required".to_string());
        }
        if bad.is_empty() {
            if let Err(Error::Validation(more)) = self.source_field() {
                bad.extend(more);
            }
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(bad))
        }
    }

    /// RoI with the source masks painted into its field.
    pub fn region(&self) -> Result<RegionOfInterest> {
        let roi = match &self.roi {
            RoiSpec::Cartesian { origin, pixel, counts, z } => discretize_roi_cartesian(*origin, *pixel, *counts, *z)?,
            RoiSpec::Angular { .. } => RegionOfInterest::angular_in_plane(&self.roi.angles().expect("angular"))?,
        };
        roi.with_field(self.source_field()?)
    }

    fn source_field(&self) -> Result<CVector> {
        let mut bad = Vec::new();
        let (len, cols, rows) = match &self.roi {
            RoiSpec::Cartesian { counts, .. } => (counts[0] * counts[1], counts[0], counts[1]),
            RoiSpec::Angular { .. } => (self.roi.angles().map_or(0, |a| a.len()), 0, 0),
        };
        let mut field = CVector::zeros(len);
        let paint = |field: &mut CVector, ix: usize, iy: usize, a: [f64; 2], k: usize, bad: &mut Vec<String>| {
            if ix < cols && iy < rows {
                field[iy * cols + ix] += Complex64::new(a[0], a[1]);
            } else {
                bad.push(format!("sources[{k}]: pixel [{ix}, {iy}] outside the {cols}×{rows} grid"));
            }
        };
        let cartesian_only = |k: usize, bad: &mut Vec<String>| {
            if cols == 0 {
                bad.push(format!("sources[{k}]: pixel masks need a Cartesian RoI"));
                false
            } else {
                true
            }
        };
        for (k, s) in self.sources.iter().enumerate() {
            match *s {
                SourceSpec::Point { pixel, amplitude } => {
                    if cartesian_only(k, &mut bad) {
                        paint(&mut field, pixel[0], pixel[1], amplitude, k, &mut bad);
                    }
                }
                SourceSpec::Rect { from, to, amplitude } => {
                    if !cartesian_only(k, &mut bad) {
                        continue;
                    }
                    if from[0] > to[0] || from[1] > to[1] {
                        bad.push(format!("sources[{k}]: rect corners out of order"));
                        continue;
                    }
                    for iy in from[1]..=to[1] {
                        for ix in from[0]..=to[0] {
                            paint(&mut field, ix, iy, amplitude, k, &mut bad);
                        }
                    }
                }
                SourceSpec::L {
                    corner,
                    width,
                    height,
                    amplitude,
                } => {
                    if !cartesian_only(k, &mut bad) {
                        continue;
                    }
                    if width == 0 || height == 0 {
                        bad.push(format!("sources[{k}]: L arms must be >= 1 pixel"));
                        continue;
                    }
                    for ix in corner[0]..corner[0] + width {
                        paint(&mut field, ix, corner[1], amplitude, k, &mut bad);
                    }
                    for iy in corner[1] + 1..corner[1] + height {
                        paint(&mut field, corner[0], iy, amplitude, k, &mut bad);
                    }
                }
                SourceSpec::At { position, amplitude } => {
                    let RoiSpec::Cartesian { origin, pixel, .. } = self.roi else {
                        bad.push(format!("sources[{k}]: positions need a Cartesian RoI"));
                        continue;
                    };
                    let fx = ((position[0] - origin[0]) / pixel[0]).floor();
                    let fy = ((position[1] - origin[1]) / pixel[1]).floor();
                    if fx < 0.0 || fy < 0.0 {
                        bad.push(format!("sources[{k}]: position {position:?} outside the RoI"));
                        continue;
                    }
                    paint(&mut field, fx as usize, fy as usize, amplitude, k, &mut bad);
                }
                SourceSpec::Direction { angle, amplitude } => {
                    let Some(angles) = self.roi.angles() else {
                        bad.push(format!("sources[{k}]: directions need an angular RoI"));
                        continue;
                    };
                    let RoiSpec::Angular { step, .. } = self.roi else { unreachable!() };
                    let (i, d) = angles
                        .iter()
                        .enumerate()
                        .map(|(i, a)| (i, (a - angle).abs()))
                        .fold((0, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc });
                    if d > step / 2.0 + 1e-12 {
                        bad.push(format!("sources[{k}]: angle {angle} outside the angular grid"));
                        continue;
                    }
                    field[i] += Complex64::new(amplitude[0], amplitude[1]);
                }
            }
        }
        if bad.is_empty() {
            Ok(field)
        } else {
            Err(Error::Validation(bad))
        }
    }

    /// World position of landmark `id` and the inward normal / tangent there.
    pub fn landmark_frame(&self, id: &str) -> Result<(Point3<f64>, Vector3<f64>, Vector3<f64>)> {
        let k = LANDMARK_IDS
            .iter()
            .position(|l| *l == id)
            .ok_or_else(|| Error::invalid(format!("unknown landmark {id:?}")))?;
        let c = self.roi.center();
        let a = self.landmarks.start + k as f64 * self.landmarks.step;
        let radial = Vector3::new(a.cos(), a.sin(), 0.0);
        let pos = Point3::new(c[0], c[1], c[2]) + radial * self.landmarks.radius;
        Ok((pos, -radial, Vector3::new(-a.sin(), a.cos(), 0.0)))
    }
}

/// Reads, parses and validates a scenario file.
pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Scenario::from_toml(&text)
}
