//! Coordinate conventions, panel layouts and RoI discretization.
//!
//! Each panel carries a local frame: origin at the element centroid (the
//! panel reference point), local `z` along the panel normal and the first
//! layout axis along local `x`. Directions are spherical angles in that
//! frame. All angles are radians.

use std::f64::consts::{PI, TAU};

use nalgebra::{Isometry3, Point3, Rotation3, Translation3, UnitQuaternion, Vector3};
use num_complex::Complex64;

use crate::linalg::CVector;
use crate::{Error, Result};

/// Rigid transform from a panel's construction frame to world coordinates.
pub type Pose = Isometry3<f64>;

/// Polar angle `theta` in `[0, π]`, azimuth `phi` in `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphericalDirection {
    theta: f64,
    phi: f64,
}

impl SphericalDirection {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) || !phi.is_finite() {
            return Err(Error::invalid(format!(
                "polar angle {theta} outside [0, π] or non-finite azimuth {phi}"
            )));
        }
        Ok(Self {
            theta,
            phi: wrap_two_pi(phi),
        })
    }

    /// Direction in the `x–z` plane at a signed angle from boresight,
    /// positive toward local `+x`. This is the DoA convention used for
    /// linear panels laid out along `x`.
    pub fn in_plane(angle: f64) -> Result<Self> {
        if angle.abs() > PI / 2.0 + 1e-15 {
            return Err(Error::invalid(format!(
                "in-plane angle {angle} rad outside [-π/2, π/2]"
            )));
        }
        let phi = if angle < 0.0 { PI } else { 0.0 };
        Self::new(angle.abs().min(PI / 2.0), phi)
    }

    /// Direction of a nonzero vector.
    pub fn from_vector(v: &Vector3<f64>) -> Result<Self> {
        let r = v.norm();
        if !(r > 0.0) {
            return Err(Error::Geometry("direction of a zero vector".into()));
        }
        let theta = (v.z / r).clamp(-1.0, 1.0).acos();
        let phi = v.y.atan2(v.x);
        Self::new(theta, phi)
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// Signed in-plane angle, the inverse of [`SphericalDirection::in_plane`]
    /// for directions with zero local `y` component.
    pub fn signed_in_plane(&self) -> f64 {
        if self.phi.cos() < 0.0 {
            -self.theta
        } else {
            self.theta
        }
    }
}

fn wrap_two_pi(phi: f64) -> f64 {
    let w = phi.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// `[sinθ cosφ, sinθ sinφ, cosθ]`.
pub fn unit_direction(dir: SphericalDirection) -> Vector3<f64> {
    let (st, ct) = dir.theta.sin_cos();
    let (sp, cp) = dir.phi.sin_cos();
    Vector3::new(st * cp, st * sp, ct)
}

/// Pose whose local `z` axis is `normal` and local `x` axis is the component
/// of `axis` orthogonal to it, placed at `origin`.
pub fn pose_facing(origin: Point3<f64>, normal: Vector3<f64>, axis: Vector3<f64>) -> Result<Pose> {
    let z = normal
        .try_normalize(1e-12)
        .ok_or_else(|| Error::Geometry("zero panel normal".into()))?;
    let x = (axis - z * axis.dot(&z))
        .try_normalize(1e-12)
        .ok_or_else(|| Error::Geometry("panel axis parallel to its normal".into()))?;
    let y = z.cross(&x);
    let rot = Rotation3::from_basis_unchecked(&[x, y, z]);
    Ok(Isometry3::from_parts(
        Translation3::from(origin.coords),
        UnitQuaternion::from_rotation_matrix(&rot),
    ))
}

/// Distance and direction of a point seen from a panel's reference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalGeometry {
    pub distance: f64,
    pub direction: SphericalDirection,
}

/// A reconfigurable surface: element positions (world frame), nominal
/// spacing, centroid reference, orientation, isotropic element gain τ and
/// operating wavelength.
#[derive(Debug, Clone)]
pub struct RisPanel {
    elements: Vec<Point3<f64>>,
    spacing: f64,
    reference: Point3<f64>,
    orientation: UnitQuaternion<f64>,
    element_gain: Complex64,
    wavelength: f64,
}

impl RisPanel {
    /// General constructor. `orientation` maps local axes to world axes.
    pub fn from_elements(
        elements: Vec<Point3<f64>>,
        spacing: f64,
        wavelength: f64,
        orientation: UnitQuaternion<f64>,
    ) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::invalid("panel needs at least one element"));
        }
        if !(spacing > 0.0) || !spacing.is_finite() {
            return Err(Error::invalid(format!("element spacing must be > 0, got {spacing}")));
        }
        if !(wavelength > 0.0) || !wavelength.is_finite() {
            return Err(Error::invalid(format!("wavelength must be > 0, got {wavelength}")));
        }
        for (i, a) in elements.iter().enumerate() {
            for b in &elements[i + 1..] {
                if (a - b).norm() <= 1e-12 * spacing {
                    return Err(Error::Geometry(format!("duplicate element position {a}")));
                }
            }
        }
        let sum = elements
            .iter()
            .fold(Vector3::zeros(), |acc, p| acc + p.coords);
        let reference = Point3::from(sum / elements.len() as f64);
        Ok(Self {
            elements,
            spacing,
            reference,
            orientation,
            element_gain: Complex64::new(1.0, 0.0),
            wavelength,
        })
    }

    pub fn with_element_gain(mut self, tau: Complex64) -> Self {
        self.element_gain = tau;
        self
    }

    pub fn elements(&self) -> &[Point3<f64>] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn reference(&self) -> Point3<f64> {
        self.reference
    }

    pub fn orientation(&self) -> UnitQuaternion<f64> {
        self.orientation
    }

    pub fn element_gain(&self) -> Complex64 {
        self.element_gain
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    /// World point expressed in the panel's local frame.
    pub fn to_local(&self, p: &Point3<f64>) -> Vector3<f64> {
        self.orientation.inverse_transform_vector(&(p - self.reference))
    }

    /// Element positions in the local frame, relative to the reference.
    pub fn local_offsets(&self) -> Vec<Vector3<f64>> {
        self.elements.iter().map(|p| self.to_local(p)).collect()
    }

    /// Largest distance between two elements (zero for a single element).
    pub fn aperture(&self) -> f64 {
        let mut best = 0.0f64;
        for (i, a) in self.elements.iter().enumerate() {
            for b in &self.elements[i + 1..] {
                best = best.max((a - b).norm());
            }
        }
        best
    }

    /// Range and local direction of a world point.
    pub fn locate(&self, p: &Point3<f64>) -> Result<LocalGeometry> {
        let local = self.to_local(p);
        let distance = local.norm();
        if !(distance > 1e-12 * self.spacing.max(self.wavelength)) {
            return Err(Error::Geometry(format!(
                "point {p} coincides with the panel reference"
            )));
        }
        Ok(LocalGeometry {
            distance,
            direction: SphericalDirection::from_vector(&local)?,
        })
    }
}

/// Element `k` at local `(k·d, 0, 0)` mapped through `pose`.
pub fn make_uniform_linear_panel(
    n_elems: usize,
    spacing: f64,
    wavelength: f64,
    pose: &Pose,
) -> Result<RisPanel> {
    make_uniform_planar_panel(1, n_elems, spacing, wavelength, pose)
}

/// Row-major `rows × cols` grid: element `(r, c)` at local `(c·d, r·d, 0)`.
pub fn make_uniform_planar_panel(
    rows: usize,
    cols: usize,
    spacing: f64,
    wavelength: f64,
    pose: &Pose,
) -> Result<RisPanel> {
    if rows == 0 || cols == 0 {
        return Err(Error::invalid("panel needs at least one row and column"));
    }
    if !(spacing > 0.0) || !(wavelength > 0.0) {
        return Err(Error::invalid(format!(
            "spacing ({spacing}) and wavelength ({wavelength}) must be positive"
        )));
    }
    let elements = (0..rows)
        .flat_map(|r| (0..cols).map(move |c| (r, c)))
        .map(|(r, c)| pose * Point3::new(c as f64 * spacing, r as f64 * spacing, 0.0))
        .collect();
    RisPanel::from_elements(elements, spacing, wavelength, pose.rotation)
}

/// Uniform pixel grid in a horizontal plane. Pixel `(ix, iy)` has index
/// `iy·cols + ix` and center `origin + ((ix+½)Δx, (iy+½)Δy)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CartesianGrid {
    pub origin: [f64; 2],
    pub pixel: [f64; 2],
    pub counts: [usize; 2],
    pub z: f64,
}

impl CartesianGrid {
    pub fn len(&self) -> usize {
        self.counts[0] * self.counts[1]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cols(&self) -> usize {
        self.counts[0]
    }

    pub fn rows(&self) -> usize {
        self.counts[1]
    }

    pub fn index(&self, ix: usize, iy: usize) -> usize {
        iy * self.counts[0] + ix
    }

    pub fn pixel_center(&self, ix: usize, iy: usize) -> Point3<f64> {
        Point3::new(
            self.origin[0] + (ix as f64 + 0.5) * self.pixel[0],
            self.origin[1] + (iy as f64 + 0.5) * self.pixel[1],
            self.z,
        )
    }

    pub fn centers(&self) -> Vec<Point3<f64>> {
        (0..self.rows())
            .flat_map(|iy| (0..self.cols()).map(move |ix| (ix, iy)))
            .map(|(ix, iy)| self.pixel_center(ix, iy))
            .collect()
    }

    pub fn center(&self) -> Point3<f64> {
        Point3::new(
            self.origin[0] + 0.5 * self.counts[0] as f64 * self.pixel[0],
            self.origin[1] + 0.5 * self.counts[1] as f64 * self.pixel[1],
            self.z,
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RoiGrid {
    /// Directions in the (single) panel's local frame.
    Angular(Vec<SphericalDirection>),
    Cartesian(CartesianGrid),
}

/// A discretized region of interest together with its complex source field.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionOfInterest {
    grid: RoiGrid,
    field: CVector,
}

impl RegionOfInterest {
    pub fn angular(directions: Vec<SphericalDirection>) -> Result<Self> {
        if directions.is_empty() {
            return Err(Error::invalid("angular RoI needs at least one direction"));
        }
        let units: Vec<_> = directions.iter().map(|d| unit_direction(*d)).collect();
        for (i, a) in units.iter().enumerate() {
            for b in &units[i + 1..] {
                if (a - b).norm() < 1e-12 {
                    return Err(Error::Geometry("duplicate RoI direction".into()));
                }
            }
        }
        let m = directions.len();
        Ok(Self {
            grid: RoiGrid::Angular(directions),
            field: CVector::zeros(m),
        })
    }

    /// Angular RoI from signed in-plane angles (radians).
    pub fn angular_in_plane(angles: &[f64]) -> Result<Self> {
        let dirs = angles
            .iter()
            .map(|&a| SphericalDirection::in_plane(a))
            .collect::<Result<Vec<_>>>()?;
        Self::angular(dirs)
    }

    pub fn grid(&self) -> &RoiGrid {
        &self.grid
    }

    pub fn len(&self) -> usize {
        self.field.len()
    }

    pub fn is_empty(&self) -> bool {
        self.field.is_empty()
    }

    pub fn field(&self) -> &CVector {
        &self.field
    }

    pub fn set_field(&mut self, field: CVector) -> Result<()> {
        if field.len() != self.len() {
            return Err(Error::dims(format!(
                "field of length {} for an RoI of {} points",
                field.len(),
                self.len()
            )));
        }
        self.field = field;
        Ok(())
    }

    pub fn with_field(mut self, field: CVector) -> Result<Self> {
        self.set_field(field)?;
        Ok(self)
    }

    pub fn cartesian(&self) -> Option<&CartesianGrid> {
        match &self.grid {
            RoiGrid::Cartesian(g) => Some(g),
            RoiGrid::Angular(_) => None,
        }
    }

    pub fn directions(&self) -> Option<&[SphericalDirection]> {
        match &self.grid {
            RoiGrid::Angular(d) => Some(d),
            RoiGrid::Cartesian(_) => None,
        }
    }
}

/// Cartesian RoI with pixel-center grid points and a zero field.
pub fn discretize_roi_cartesian(
    origin: [f64; 2],
    pixel_size: [f64; 2],
    counts: [usize; 2],
    z: f64,
) -> Result<RegionOfInterest> {
    if counts[0] == 0 || counts[1] == 0 {
        return Err(Error::invalid("RoI pixel counts must be >= 1"));
    }
    if !(pixel_size[0] > 0.0) || !(pixel_size[1] > 0.0) {
        return Err(Error::invalid(format!(
            "pixel size must be positive, got {pixel_size:?}"
        )));
    }
    let grid = CartesianGrid {
        origin,
        pixel: pixel_size,
        counts,
        z,
    };
    let m = grid.len();
    Ok(RegionOfInterest {
        grid: RoiGrid::Cartesian(grid),
        field: CVector::zeros(m),
    })
}

/// Per-voxel `(r^i, θ^i, φ^i)` relative to the panel reference, in the
/// panel's local frame.
pub fn voxel_to_panel_geometry(
    roi: &RegionOfInterest,
    panel: &RisPanel,
) -> Result<Vec<LocalGeometry>> {
    let grid = roi
        .cartesian()
        .ok_or_else(|| Error::invalid("angular RoI has no voxel positions"))?;
    grid.centers().iter().map(|p| panel.locate(p)).collect()
}

/// A receiver location in world coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReceiverPose {
    pub position: Point3<f64>,
}

impl ReceiverPose {
    pub fn new(position: Point3<f64>) -> Self {
        Self { position }
    }

    /// `(r^s, θ^s, φ^s)` in the panel's frame.
    pub fn relative_to(&self, panel: &RisPanel) -> Result<LocalGeometry> {
        panel.locate(&self.position)
    }
}
