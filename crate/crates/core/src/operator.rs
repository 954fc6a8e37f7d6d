//! Far-field sensing operators.
//!
//! A single panel configured by the phase book Ω maps incident fields to
//! snapshots through
//!
//! `H(Ω) = τ · l(r^s) · e^{jΩ} · diag(v(θ^s, φ^s)) · V(Θ^i, Φ^i)`
//!
//! where `v` is the receiver steering row and the columns of `V` are
//! steering vectors toward the RoI points. For Cartesian RoIs the source
//! range enters through `diag(l(r^i))`, one distance per voxel–panel pair,
//! and several panels either stack (dedicated receivers) or sum (one
//! shared receiver).

use std::ops::Range;

use log::warn;
use nalgebra::DVector;
use num_complex::Complex64;
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::forward_model::{path_factor, synthesize_noise, NoiseDescriptor, PhaseBook};
use crate::geometry::{
    unit_direction, voxel_to_panel_geometry, LocalGeometry, ReceiverPose, RegionOfInterest,
    RisPanel, RoiGrid, SphericalDirection,
};
use crate::linalg::{cis, CMatrix, CVector};
use crate::{Error, Result};

/// Far-field warning threshold in units of the panel aperture.
pub const FAR_FIELD_APERTURES: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AssemblyMode {
    Single,
    Dedicated,
    Shared,
}

/// Provenance of one panel's contribution.
#[derive(Debug, Clone, PartialEq)]
pub struct PanelBlock {
    pub panel: usize,
    /// Rows owned by this panel (all rows in shared mode).
    pub rows: Range<usize>,
    /// Element count `N_k`.
    pub elements: usize,
    /// `τ · l(r^s)`.
    pub prefactor: Complex64,
    pub receiver: LocalGeometry,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SensingOperator {
    matrix: CMatrix,
    mode: AssemblyMode,
    blocks: Vec<PanelBlock>,
}

impl SensingOperator {
    /// Wraps an arbitrary matrix, e.g. for solver tests.
    pub fn from_matrix(matrix: CMatrix) -> Self {
        let (rows, cols) = matrix.shape();
        Self {
            matrix,
            mode: AssemblyMode::Single,
            blocks: vec![PanelBlock {
                panel: 0,
                rows: 0..rows,
                elements: cols,
                prefactor: Complex64::new(1.0, 0.0),
                receiver: LocalGeometry {
                    distance: 1.0,
                    direction: SphericalDirection::new(0.0, 0.0).expect("pole"),
                },
            }],
        }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn mode(&self) -> AssemblyMode {
        self.mode
    }

    pub fn blocks(&self) -> &[PanelBlock] {
        &self.blocks
    }

    pub fn rows(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn cols(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn apply(&self, field: &CVector) -> Result<CVector> {
        if field.len() != self.cols() {
            return Err(Error::dims(format!(
                "field of length {} for an operator with {} columns",
                field.len(),
                self.cols()
            )));
        }
        Ok(&self.matrix * field)
    }

    /// Short content hash identifying the operator.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        h.update((self.rows() as u64).to_le_bytes());
        h.update((self.cols() as u64).to_le_bytes());
        for z in self.matrix.iter() {
            h.update(z.re.to_bits().to_le_bytes());
            h.update(z.im.to_bits().to_le_bytes());
        }
        hex::encode(&h.finalize()[..8])
    }
}

/// `e^{j2π p_nᵀ u / λ}` with `p_n` relative to the panel reference.
pub fn steering_row(panel: &RisPanel, dir: SphericalDirection) -> CVector {
    let u = unit_direction(dir);
    let k = std::f64::consts::TAU / panel.wavelength();
    let offsets = panel.local_offsets();
    DVector::from_iterator(offsets.len(), offsets.iter().map(|p| cis(k * p.dot(&u))))
}

/// Local directions of the RoI points seen from `panel`.
fn incident_geometry(panel: &RisPanel, roi: &RegionOfInterest) -> Result<Vec<SphericalDirection>> {
    match roi.grid() {
        RoiGrid::Angular(dirs) => Ok(dirs.clone()),
        RoiGrid::Cartesian(_) => Ok(voxel_to_panel_geometry(roi, panel)?
            .into_iter()
            .map(|g| g.direction)
            .collect()),
    }
}

/// `N × M` matrix whose column `m` is the steering vector toward RoI point `m`.
pub fn incidence_matrix(panel: &RisPanel, roi: &RegionOfInterest) -> Result<CMatrix> {
    if roi.is_empty() {
        return Err(Error::invalid("empty RoI"));
    }
    let dirs = incident_geometry(panel, roi)?;
    let mut v = CMatrix::zeros(panel.len(), dirs.len());
    for (m, d) in dirs.iter().enumerate() {
        v.set_column(m, &steering_row(panel, *d));
    }
    Ok(v)
}

/// `l(r^i)` per voxel, ranges measured to the panel reference.
pub fn distance_normalization(panel: &RisPanel, roi: &RegionOfInterest) -> Result<CVector> {
    let geo = voxel_to_panel_geometry(roi, panel)?;
    let l = geo
        .iter()
        .map(|g| path_factor(g.distance, panel.wavelength()))
        .collect::<Result<Vec<_>>>()?;
    Ok(DVector::from_vec(l))
}

fn warn_if_near(panel: &RisPanel, roi: &RegionOfInterest, receiver: &LocalGeometry) {
    let limit = FAR_FIELD_APERTURES * panel.aperture();
    let mut nearest = receiver.distance;
    if let Ok(geo) = voxel_to_panel_geometry(roi, panel) {
        nearest = geo.iter().map(|g| g.distance).fold(nearest, f64::min);
    }
    if nearest < limit {
        warn!(
            "range {nearest:.3} m is below {FAR_FIELD_APERTURES}x the panel aperture ({:.3} m); \
             the factored far-field model is only approximate here",
            panel.aperture()
        );
    }
}

/// `H(Ω)` and its provenance for one panel.
fn factored_block(
    panel: &RisPanel,
    phases: &PhaseBook,
    roi: &RegionOfInterest,
    receiver: &ReceiverPose,
) -> Result<(CMatrix, Complex64, LocalGeometry)> {
    if phases.elements() != panel.len() {
        return Err(Error::dims(format!(
            "phase book has {} columns for a panel of {} elements",
            phases.elements(),
            panel.len()
        )));
    }
    let rx = receiver.relative_to(panel)?;
    warn_if_near(panel, roi, &rx);
    let prefactor = panel.element_gain() * path_factor(rx.distance, panel.wavelength())?;
    let v = steering_row(panel, rx.direction);
    let mut right = incidence_matrix(panel, roi)?;
    for (n, mut row) in right.row_iter_mut().enumerate() {
        row *= v[n];
    }
    let h = phases.exp_matrix() * right * prefactor;
    Ok((h, prefactor, rx))
}

/// Single-panel operator `H(Ω)`, `T × M`.
pub fn assemble_single(
    panel: &RisPanel,
    phases: &PhaseBook,
    roi: &RegionOfInterest,
    receiver: &ReceiverPose,
) -> Result<SensingOperator> {
    let (matrix, prefactor, rx) = factored_block(panel, phases, roi, receiver)?;
    let rows = matrix.nrows();
    Ok(SensingOperator {
        matrix,
        mode: AssemblyMode::Single,
        blocks: vec![PanelBlock {
            panel: 0,
            rows: 0..rows,
            elements: panel.len(),
            prefactor,
            receiver: rx,
        }],
    })
}

/// One panel with its configuration schedule and receiver.
#[derive(Debug, Clone)]
pub struct Station {
    pub panel: RisPanel,
    pub phases: PhaseBook,
    pub receiver: ReceiverPose,
}

/// `H(Ω_k) · diag(l(r^i_k))` for one station.
fn normalized_block(station: &Station, roi: &RegionOfInterest) -> Result<(CMatrix, Complex64, LocalGeometry)> {
    let (mut h, prefactor, rx) = factored_block(&station.panel, &station.phases, roi, &station.receiver)?;
    let l = distance_normalization(&station.panel, roi)?;
    for (m, mut col) in h.column_iter_mut().enumerate() {
        col *= l[m];
    }
    Ok((h, prefactor, rx))
}

fn require_cartesian(roi: &RegionOfInterest) -> Result<()> {
    if roi.cartesian().is_none() {
        return Err(Error::invalid(
            "multi-panel assembly needs a Cartesian RoI (source ranges enter the model)",
        ));
    }
    Ok(())
}

/// Dedicated receivers: per-panel blocks stacked, `Σ T_k × M`.
pub fn assemble_dedicated(stations: &[Station], roi: &RegionOfInterest) -> Result<SensingOperator> {
    if stations.is_empty() {
        return Err(Error::invalid("no panels"));
    }
    require_cartesian(roi)?;
    let blocks = stations
        .par_iter()
        .map(|s| normalized_block(s, roi).map(|b| (b, s.panel.len())))
        .collect::<Result<Vec<_>>>()?;
    let total: usize = blocks.iter().map(|((h, _, _), _)| h.nrows()).sum();
    let mut matrix = CMatrix::zeros(total, roi.len());
    let mut meta = Vec::with_capacity(blocks.len());
    let mut start = 0;
    for (k, ((h, prefactor, rx), elements)) in blocks.into_iter().enumerate() {
        let rows = start..start + h.nrows();
        matrix.rows_mut(start, h.nrows()).copy_from(&h);
        meta.push(PanelBlock {
            panel: k,
            rows: rows.clone(),
            elements,
            prefactor,
            receiver: rx,
        });
        start = rows.end;
    }
    Ok(SensingOperator {
        matrix,
        mode: AssemblyMode::Dedicated,
        blocks: meta,
    })
}

/// One shared receiver: per-panel blocks summed, `T × M`. All panels switch
/// configurations synchronously, so every phase book must have the same `T`.
pub fn assemble_shared(
    panels: &[(RisPanel, PhaseBook)],
    roi: &RegionOfInterest,
    receiver: &ReceiverPose,
) -> Result<SensingOperator> {
    if panels.is_empty() {
        return Err(Error::invalid("no panels"));
    }
    require_cartesian(roi)?;
    let t = panels[0].1.snapshots();
    if let Some((_, pb)) = panels.iter().find(|(_, pb)| pb.snapshots() != t) {
        return Err(Error::dims(format!(
            "shared receiver needs equal snapshot counts, got {t} and {}",
            pb.snapshots()
        )));
    }
    let blocks = panels
        .par_iter()
        .map(|(panel, phases)| {
            normalized_block(
                &Station {
                    panel: panel.clone(),
                    phases: phases.clone(),
                    receiver: *receiver,
                },
                roi,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let mut matrix = CMatrix::zeros(t, roi.len());
    let mut meta = Vec::with_capacity(blocks.len());
    for (k, (h, prefactor, rx)) in blocks.into_iter().enumerate() {
        matrix += h;
        meta.push(PanelBlock {
            panel: k,
            rows: 0..t,
            elements: panels[k].0.len(),
            prefactor,
            receiver: rx,
        });
    }
    Ok(SensingOperator {
        matrix,
        mode: AssemblyMode::Shared,
        blocks: meta,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum Measurements {
    Phased(CVector),
    Magnitude(Vec<f64>),
}

impl Measurements {
    pub fn len(&self) -> usize {
        match self {
            Measurements::Phased(v) => v.len(),
            Measurements::Magnitude(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_magnitude_only(&self) -> bool {
        matches!(self, Measurements::Magnitude(_))
    }

    pub fn magnitudes(&self) -> Vec<f64> {
        match self {
            Measurements::Phased(v) => v.iter().map(|z| z.norm()).collect(),
            Measurements::Magnitude(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementSet {
    pub values: Measurements,
    pub noise: NoiseDescriptor,
    pub operator_id: String,
}

impl MeasurementSet {
    /// Wraps externally obtained values (e.g. an imported CSV).
    pub fn new(values: Measurements, noise: NoiseDescriptor, op: &SensingOperator) -> Result<Self> {
        if values.len() != op.rows() {
            return Err(Error::dims(format!(
                "{} measurements for an operator with {} rows",
                values.len(),
                op.rows()
            )));
        }
        if let Measurements::Magnitude(m) = &values {
            if m.iter().any(|x| !(*x >= 0.0)) {
                return Err(Error::invalid("magnitude measurements must be >= 0"));
            }
        }
        Ok(Self {
            values,
            noise,
            operator_id: op.fingerprint(),
        })
    }
}

/// `S = HE + n`, or `|HE + n|` elementwise when `magnitude_only`.
pub fn measure(
    op: &SensingOperator,
    roi: &RegionOfInterest,
    noise: &NoiseDescriptor,
    magnitude_only: bool,
) -> Result<MeasurementSet> {
    let clean = op.apply(roi.field())?;
    let noisy = if noise.variance > 0.0 {
        clean + synthesize_noise(noise, op.rows())?
    } else {
        clean
    };
    let values = if magnitude_only {
        Measurements::Magnitude(noisy.iter().map(|z| z.norm()).collect())
    } else {
        Measurements::Phased(noisy)
    };
    Ok(MeasurementSet {
        values,
        noise: *noise,
        operator_id: op.fingerprint(),
    })
}
