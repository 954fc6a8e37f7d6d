//! Experiment orchestration.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::time::{Duration, Instant};

use nalgebra::{Point3, Translation3, Vector3};
use rayon::prelude::*;
use serde::Serialize;

use super::scenario::{Method, ReceiverMode, RoiSpec, Scenario};
use crate::error::StageExt;
use crate::forward_model::{NoiseDescriptor, PhaseBook, Quantization};
use crate::geometry::{
    make_uniform_linear_panel, make_uniform_planar_panel, pose_facing, unit_direction, ReceiverPose,
    RegionOfInterest, RisPanel, SphericalDirection,
};
use crate::linalg::{CMatrix, CVector};
use crate::metrics::{field_ssim, relative_error};
use crate::operator::{
    assemble_dedicated, assemble_shared, assemble_single, measure, MeasurementSet, Measurements, SensingOperator,
    Station,
};
use crate::reconstruction::{
    extract_doa_peaks, ls_reconstruct, rwf_reconstruct, DoaEstimate, LsOptions, RwfInit, RwfOptions,
};
use crate::spectral::{relative_error_bound, spectral_report, ResolutionQuery, SpectralReport, DEFAULT_RANK_TOL};
use crate::{rng, Error, Result};

const NOISE_STREAM: u64 = 1;
const PHASE_STREAM: u64 = 100;

/// Default distance of a receiver from its panel (dedicated) or from the
/// RoI center (shared), in meters.
pub const RECEIVER_DISTANCE: f64 = 25.0;

/// Panels, receivers, phase books and the assembled operator of a scenario.
#[derive(Debug, Clone)]
pub struct Deployment {
    pub roi: RegionOfInterest,
    pub panels: Vec<RisPanel>,
    pub receivers: Vec<ReceiverPose>,
    pub phases: Vec<PhaseBook>,
    pub operator: SensingOperator,
}

fn point(a: [f64; 3]) -> Point3<f64> {
    Point3::new(a[0], a[1], a[2])
}

fn vector(a: [f64; 3]) -> Vector3<f64> {
    Vector3::new(a[0], a[1], a[2])
}

/// Builds every panel with its centroid on the requested site.
pub fn build_panels(scn: &Scenario) -> Result<Vec<RisPanel>> {
    let lambda = scn.wavelength();
    let angular = matches!(scn.roi, RoiSpec::Angular { .. });
    let c = point(scn.roi.center());
    scn.panels
        .iter()
        .enumerate()
        .map(|(k, p)| {
            let (site, inward, tangent) = match (&p.landmark, p.position) {
                (Some(id), _) => scn.landmark_frame(id)?,
                (None, Some(pos)) => {
                    let pos = point(pos);
                    let inward = if angular { Vector3::y() } else { c - pos };
                    let tangent = Vector3::z().cross(&inward);
                    (pos, inward, tangent)
                }
                (None, None) => (Point3::origin(), Vector3::y(), Vector3::x()),
            };
            let normal = p.normal.map(vector).unwrap_or(inward);
            let mut axis = p.axis.map(vector).unwrap_or(tangent);
            if axis.cross(&normal).norm() < 1e-12 * axis.norm().max(1.0) {
                axis = if normal.cross(&Vector3::x()).norm() > 1e-9 {
                    Vector3::x()
                } else {
                    Vector3::y()
                };
            }
            let pose = pose_facing(site, normal, axis).map_err(|e| Error::Stage {
                stage: "panel pose",
                source: Box::new(Error::Geometry(format!("panels[{k}]: {e}"))),
            })?;
            let draft = make_uniform_planar_panel(p.rows, p.elements, p.spacing, lambda, &pose)?;
            let shift = Translation3::from(site - draft.reference());
            let pose = shift * pose;
            Ok(make_uniform_planar_panel(p.rows, p.elements, p.spacing, lambda, &pose)?.with_element_gain(p.gain()))
        })
        .collect()
}

/// Receiver at `distance` from the panel centroid along local `θ = π/4, φ = π/2`.
pub fn default_receiver(panel: &RisPanel, distance: f64) -> ReceiverPose {
    let dir = SphericalDirection::new(FRAC_PI_4, FRAC_PI_2).expect("valid");
    let world = panel.orientation() * unit_direction(dir);
    ReceiverPose::new(panel.reference() + world * distance)
}

fn receivers(scn: &Scenario, panels: &[RisPanel]) -> Vec<ReceiverPose> {
    match scn.mode {
        ReceiverMode::Dedicated => scn
            .panels
            .iter()
            .zip(panels)
            .map(|(spec, panel)| match spec.receiver {
                Some(r) => ReceiverPose::new(point(r)),
                None => default_receiver(panel, RECEIVER_DISTANCE),
            })
            .collect(),
        ReceiverMode::Shared => {
            let rx = scn.receiver.map(point).unwrap_or_else(|| {
                let c = scn.roi.center();
                Point3::new(c[0], c[1], c[2] + RECEIVER_DISTANCE)
            });
            vec![ReceiverPose::new(rx)]
        }
    }
}

/// Random configuration schedules, one independent stream per panel.
pub fn phase_books(scn: &Scenario) -> Result<Vec<PhaseBook>> {
    scn.panels
        .iter()
        .enumerate()
        .map(|(k, p)| {
            let mut r = rng::stream(rng::derive(scn.seed, PHASE_STREAM + k as u64));
            PhaseBook::random(p.snapshots, p.element_count(), scn.phases.quantization, &mut r)
        })
        .collect()
}

/// Geometry, phases and operator for a validated scenario.
pub fn deploy(scn: &Scenario) -> Result<Deployment> {
    scn.validate()?;
    let roi = scn.region().stage("roi")?;
    let panels = build_panels(scn).stage("panels")?;
    let receivers = receivers(scn, &panels);
    let phases = phase_books(scn).stage("phases")?;
    let operator = match (&scn.roi, scn.mode) {
        (RoiSpec::Angular { .. }, _) => assemble_single(&panels[0], &phases[0], &roi, &receivers[0]),
        (RoiSpec::Cartesian { .. }, ReceiverMode::Dedicated) => {
            let stations: Vec<Station> = panels
                .iter()
                .zip(&phases)
                .zip(&receivers)
                .map(|((panel, phases), receiver)| Station {
                    panel: panel.clone(),
                    phases: phases.clone(),
                    receiver: *receiver,
                })
                .collect();
            assemble_dedicated(&stations, &roi)
        }
        (RoiSpec::Cartesian { .. }, ReceiverMode::Shared) => {
            let pairs: Vec<(RisPanel, PhaseBook)> = panels.iter().cloned().zip(phases.iter().cloned()).collect();
            assemble_shared(&pairs, &roi, &receivers[0])
        }
    }
    .stage("operator assembly")?;
    Ok(Deployment {
        roi,
        panels,
        receivers,
        phases,
        operator,
    })
}

/// Noise descriptor for a scenario; an SNR is taken relative to the mean
/// noiseless measurement power `mean|HE|²`.
pub fn noise_for(scn: &Scenario, dep: &Deployment) -> Result<NoiseDescriptor> {
    let seed = rng::derive(scn.seed, NOISE_STREAM);
    let variance = match (scn.noise.snr_db, scn.noise.variance) {
        (Some(snr), _) => {
            let clean = dep.operator.apply(dep.roi.field())?;
            let power = clean.iter().map(|z| z.norm_sqr()).sum::<f64>() / clean.len() as f64;
            crate::forward_model::variance_for_snr(power, snr)
        }
        (None, Some(v)) => v,
        (None, None) => 0.0,
    };
    NoiseDescriptor::new(variance, seed)
}

/// Synthesized measurements for a deployed scenario.
pub fn simulate(scn: &Scenario, dep: &Deployment) -> Result<MeasurementSet> {
    let noise = noise_for(scn, dep)?;
    measure(&dep.operator, &dep.roi, &noise, scn.solver.magnitude_only).stage("measurement")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunMetrics {
    pub method: Method,
    pub magnitude_only: bool,
    pub rows: usize,
    pub cols: usize,
    /// Plain for least squares, global-phase aligned for magnitude-only
    /// recovery.
    pub relative_error: f64,
    pub phase_aligned_error: f64,
    pub ssim: f64,
    /// `‖HÊ − S‖` (least squares) or the final weighted loss (RWF).
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
    pub noise_variance: f64,
    pub rank: usize,
    pub rank_bound: usize,
    pub condition_number: f64,
    pub operator: String,
    /// Index of the largest `|Ê|`.
    pub peak_index: usize,
}

#[derive(Debug, Clone)]
pub struct RunRecord {
    pub scenario: Scenario,
    pub hash: String,
    pub version: &'static str,
    pub roi: RegionOfInterest,
    pub estimate: CVector,
    pub measurements: MeasurementSet,
    pub metrics: RunMetrics,
    pub spectrum: SpectralReport,
    pub doa: Option<DoaEstimate>,
    pub wall_time: Duration,
}

#[derive(Debug, Clone)]
pub struct Estimate {
    pub field: CVector,
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Runs the scenario's solver on a measurement set.
pub fn reconstruct(scn: &Scenario, op: &SensingOperator, meas: &MeasurementSet) -> Result<Estimate> {
    match scn.solver.method {
        Method::Ls => {
            let sol = ls_reconstruct(
                op,
                meas,
                &LsOptions {
                    regularization: scn.solver.regularization,
                },
            )?;
            Ok(Estimate {
                field: sol.field,
                residual: sol.residual,
                iterations: 1,
                converged: true,
            })
        }
        Method::Rwf => {
            let r = &scn.solver.rwf;
            let opts = RwfOptions {
                max_iters: r.max_iters,
                step: r.step,
                eta: r.eta,
                tolerance: r.tolerance,
                init: RwfInit::Spectral,
            };
            let sol = rwf_reconstruct(op, meas, &opts)?;
            if !sol.converged {
                log::warn!("RWF stopped after {} iterations without converging", sol.iterations);
            }
            Ok(Estimate {
                field: sol.field,
                residual: sol.loss,
                iterations: sol.iterations,
                converged: sol.converged,
            })
        }
    }
}

fn argmax(v: &CVector) -> usize {
    v.iter()
        .enumerate()
        .fold((0, -1.0), |acc, (i, z)| if z.norm() > acc.1 { (i, z.norm()) } else { acc })
        .0
}

/// Full pipeline on the scenario's own synthesized data.
pub fn run_scenario(scn: &Scenario) -> Result<RunRecord> {
    let start = Instant::now();
    let dep = deploy(scn)?;
    let meas = simulate(scn, &dep)?;
    finish(scn, dep, meas, start)
}

/// Full pipeline on externally supplied measurements (e.g. an imported
/// CSV). The scenario's sources only serve as the reference for metrics.
pub fn run_with_measurements(scn: &Scenario, values: Measurements) -> Result<RunRecord> {
    let start = Instant::now();
    let dep = deploy(scn)?;
    let meas = MeasurementSet::new(values, NoiseDescriptor::noiseless(), &dep.operator)?;
    finish(scn, dep, meas, start)
}

fn finish(scn: &Scenario, dep: Deployment, meas: MeasurementSet, start: Instant) -> Result<RunRecord> {
    let est = reconstruct(scn, &dep.operator, &meas).stage("reconstruction")?;
    let truth = dep.roi.field();
    let magnitude_only = meas.values.is_magnitude_only();
    let aligned = relative_error(&est.field, truth, true).stage("metrics")?;
    let plain = relative_error(&est.field, truth, false).stage("metrics")?;
    let ssim = field_ssim(&est.field, truth).stage("metrics")?;
    let spectrum = spectral_report(&dep.operator, DEFAULT_RANK_TOL).stage("spectral analysis")?;
    let doa = match &scn.roi {
        RoiSpec::Angular { .. } => {
            let grid = scn.roi.angles().expect("angular");
            Some(extract_doa_peaks(&est.field, &grid, scn.solver.peaks, scn.solver.min_separation).stage("peaks")?)
        }
        RoiSpec::Cartesian { .. } => None,
    };
    let metrics = RunMetrics {
        method: scn.solver.method,
        magnitude_only,
        rows: dep.operator.rows(),
        cols: dep.operator.cols(),
        relative_error: if magnitude_only { aligned } else { plain },
        phase_aligned_error: aligned,
        ssim,
        residual: est.residual,
        iterations: est.iterations,
        converged: est.converged,
        noise_variance: meas.noise.variance,
        rank: spectrum.rank,
        rank_bound: spectrum.rank_bound,
        condition_number: spectrum.condition_number,
        operator: dep.operator.fingerprint(),
        peak_index: argmax(&est.field),
    };
    Ok(RunRecord {
        scenario: scn.clone(),
        hash: scn.hash(),
        version: crate::VERSION,
        roi: dep.roi,
        estimate: est.field,
        measurements: meas,
        metrics,
        spectrum,
        doa,
        wall_time: start.elapsed(),
    })
}

/// Cartesian-RoI run: operator per receiver mode, measurements, recovery,
/// error, SSIM and spectrum.
pub fn run_localization(scn: &Scenario) -> Result<RunRecord> {
    if !matches!(scn.roi, RoiSpec::Cartesian { .. }) {
        return Err(Error::invalid("localization needs a Cartesian RoI"));
    }
    run_scenario(scn)
}

/// Angular-RoI run on a single panel with peak extraction; least squares
/// for phased data and RWF for magnitude-only data.
pub fn run_doa(scn: &Scenario) -> Result<RunRecord> {
    if !matches!(scn.roi, RoiSpec::Angular { .. }) {
        return Err(Error::invalid("DoA estimation needs an angular RoI"));
    }
    run_scenario(scn)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepKind {
    /// Snapshots per panel.
    Measurements,
    /// Elements per panel row.
    Elements,
    /// SNR in dB.
    Snr,
}

impl SweepKind {
    pub fn name(self) -> &'static str {
        match self {
            SweepKind::Measurements => "measurements",
            SweepKind::Elements => "elements",
            SweepKind::Snr => "snr",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub value: f64,
    pub seeds: usize,
    pub relative_error: f64,
    pub ssim: f64,
    /// Geometric mean over seeds.
    pub condition_number: f64,
    pub rank: f64,
    pub rank_bound: usize,
}

fn sweep_point(template: &Scenario, kind: SweepKind, value: f64) -> Result<Scenario> {
    let mut s = template.clone();
    let count = || -> Result<usize> {
        if value >= 1.0 && value.fract() == 0.0 {
            Ok(value as usize)
        } else {
            Err(Error::invalid(format!("{} sweep needs positive integers, got {value}", kind.name())))
        }
    };
    match kind {
        SweepKind::Measurements => {
            let t = count()?;
            s.panels.iter_mut().for_each(|p| p.snapshots = t);
        }
        SweepKind::Elements => {
            let n = count()?;
            s.panels.iter_mut().for_each(|p| p.elements = n);
        }
        SweepKind::Snr => {
            s.noise.snr_db = Some(value);
            s.noise.variance = None;
        }
    }
    Ok(s)
}

fn mean(v: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = v.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    s / n as f64
}

/// Reruns the template at each sweep value over `seeds` derived seeds and
/// averages. Points run in parallel; each has its own seed stream.
pub fn run_sweep(template: &Scenario, kind: SweepKind, values: &[f64], seeds: usize) -> Result<Vec<SweepRow>> {
    if values.is_empty() || seeds == 0 {
        return Err(Error::invalid("sweep needs at least one value and one seed"));
    }
    let jobs: Vec<(usize, u64)> = (0..values.len())
        .flat_map(|i| (0..seeds as u64).map(move |j| (i, j)))
        .collect();
    let results = jobs
        .par_iter()
        .map(|&(i, j)| {
            let mut s = sweep_point(template, kind, values[i])?;
            s.seed = rng::derive(template.seed, j);
            run_scenario(&s).map(|r| r.metrics)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(values
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let pts = &results[i * seeds..(i + 1) * seeds];
            SweepRow {
                value: *v,
                seeds,
                relative_error: mean(pts.iter().map(|m| m.relative_error)),
                ssim: mean(pts.iter().map(|m| m.ssim)),
                condition_number: mean(pts.iter().map(|m| m.condition_number.ln())).exp(),
                rank: mean(pts.iter().map(|m| m.rank as f64)),
                rank_bound: pts[0].rank_bound,
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Strategy {
    pub name: String,
    pub landmarks: Vec<String>,
}

/// Strategies I–IV: {A}, {A, E}, {A, C, E, G}, {A, …, H}.
pub fn standard_strategies() -> Vec<Strategy> {
    let mk = |name: &str, ids: &[&str]| Strategy {
        name: name.to_string(),
        landmarks: ids.iter().map(|s| s.to_string()).collect(),
    };
    vec![
        mk("I", &["A"]),
        mk("II", &["A", "E"]),
        mk("III", &["A", "C", "E", "G"]),
        mk("IV", &["A", "B", "C", "D", "E", "F", "G", "H"]),
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrategyRow {
    pub strategy: String,
    pub landmarks: String,
    pub panels: usize,
    pub elements_per_panel: usize,
    pub snapshots_per_panel: usize,
    pub total_elements: usize,
    pub total_snapshots: usize,
    pub condition_number: f64,
    pub rank: f64,
    pub relative_error: f64,
    pub ssim: f64,
}

/// SNR used by strategy sweeps when the template is noiseless.
pub const STRATEGY_SNR_DB: f64 = 30.0;

/// Runs each landmark subset with the totals split evenly,
/// `N_k = total_elements / K` and `T_k = total_snapshots / K`.
pub fn run_strategy_sweep(
    template: &Scenario,
    strategies: &[Strategy],
    total_elements: usize,
    total_snapshots: usize,
    seeds: usize,
) -> Result<Vec<StrategyRow>> {
    if strategies.is_empty() || seeds == 0 {
        return Err(Error::invalid("strategy sweep needs at least one strategy and one seed"));
    }
    let mut scenarios = Vec::with_capacity(strategies.len());
    for st in strategies {
        let k = st.landmarks.len();
        if k == 0 || !total_elements.is_multiple_of(k) || !total_snapshots.is_multiple_of(k) {
            return Err(Error::invalid(format!(
                "strategy {}: totals {total_elements}/{total_snapshots} do not split over {k} panels",
                st.name
            )));
        }
        let mut s = template.clone();
        let proto = template.panels.first().cloned().unwrap_or_else(|| super::PanelSpec::at_landmark("A"));
        s.panels = st
            .landmarks
            .iter()
            .map(|id| {
                let mut p = proto.clone();
                p.landmark = Some(id.clone());
                p.position = None;
                p.normal = None;
                p.axis = None;
                p.receiver = None;
                p.rows = 1;
                p.elements = total_elements / k;
                p.snapshots = total_snapshots / k;
                p
            })
            .collect();
        if s.noise.is_noiseless() {
            s.noise.snr_db = Some(STRATEGY_SNR_DB);
        }
        s.validate()?;
        scenarios.push(s);
    }
    let jobs: Vec<(usize, u64)> = (0..scenarios.len())
        .flat_map(|i| (0..seeds as u64).map(move |j| (i, j)))
        .collect();
    let results = jobs
        .par_iter()
        .map(|&(i, j)| {
            let mut s = scenarios[i].clone();
            s.seed = rng::derive(template.seed, j);
            run_scenario(&s).map(|r| r.metrics)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(strategies
        .iter()
        .enumerate()
        .map(|(i, st)| {
            let pts = &results[i * seeds..(i + 1) * seeds];
            let s = &scenarios[i];
            StrategyRow {
                strategy: st.name.clone(),
                landmarks: st.landmarks.join(""),
                panels: s.panels.len(),
                elements_per_panel: s.panels[0].elements,
                snapshots_per_panel: s.panels[0].snapshots,
                total_elements: s.panels.iter().map(|p| p.element_count()).sum(),
                total_snapshots: s.panels.iter().map(|p| p.snapshots).sum(),
                condition_number: mean(pts.iter().map(|m| m.condition_number.ln())).exp(),
                rank: mean(pts.iter().map(|m| m.rank as f64)),
                relative_error: mean(pts.iter().map(|m| m.relative_error)),
                ssim: mean(pts.iter().map(|m| m.ssim)),
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundTrial {
    pub delta: f64,
    pub bound: f64,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundCheck {
    pub trials: Vec<BoundTrial>,
    /// Fraction of trials whose error exceeds the bound.
    pub violation_rate: f64,
    /// Mean error per Δ, in the order given.
    pub mean_error: Vec<(f64, f64)>,
}

/// Two-source least-squares experiment on a uniform linear panel: unit
/// amplitudes at in-plane angles `θ` and `θ + Δ`, continuous random
/// configurations, receiver at `r^s` on boresight, complex Gaussian noise
/// with `σ² = ‖E‖² / SNR`. Each trial is compared with
/// [`relative_error_bound`].
pub fn resolution_monte_carlo(
    query: &ResolutionQuery,
    deltas: &[f64],
    trials: usize,
    seed: u64,
) -> Result<BoundCheck> {
    query.validate()?;
    if deltas.is_empty() || trials == 0 {
        return Err(Error::invalid("need at least one Δ and one trial"));
    }
    let pose = pose_facing(Point3::origin(), Vector3::y(), Vector3::x())?;
    let panel = make_uniform_linear_panel(query.elements, query.spacing, query.wavelength, &pose)?
        .with_element_gain(num_complex::Complex64::new(query.tau, 0.0));
    let receiver = ReceiverPose::new(panel.reference() + Vector3::y() * query.receiver_distance);
    let truth = CVector::from_element(2, num_complex::Complex64::new(1.0, 0.0));
    let variance = truth.norm_squared() / query.snr;
    let jobs: Vec<(usize, usize)> = (0..deltas.len()).flat_map(|i| (0..trials).map(move |j| (i, j))).collect();
    let out = jobs
        .par_iter()
        .map(|&(i, j)| {
            let delta = deltas[i];
            let q = ResolutionQuery { delta, ..*query };
            let bound = relative_error_bound(&q)?;
            let roi = RegionOfInterest::angular_in_plane(&[q.theta, q.theta + delta])?.with_field(truth.clone())?;
            let job = rng::derive(seed, (i * trials + j) as u64);
            let mut r = rng::stream(rng::derive(job, PHASE_STREAM));
            let phases = PhaseBook::random(q.snapshots, q.elements, Quantization::Continuous, &mut r)?;
            let op = assemble_single(&panel, &phases, &roi, &receiver)?;
            let noise = NoiseDescriptor::new(variance, rng::derive(job, NOISE_STREAM))?;
            let meas = measure(&op, &roi, &noise, false)?;
            let est = ls_reconstruct(&op, &meas, &LsOptions::default())?;
            let error = relative_error(&est.field, &truth, false)?;
            Ok(BoundTrial { delta, bound, error })
        })
        .collect::<Result<Vec<_>>>()?;
    let violations = out.iter().filter(|t| t.error > t.bound).count();
    let mean_error = deltas
        .iter()
        .enumerate()
        .map(|(i, d)| (*d, mean(out[i * trials..(i + 1) * trials].iter().map(|t| t.error))))
        .collect();
    Ok(BoundCheck {
        violation_rate: violations as f64 / out.len() as f64,
        trials: out,
        mean_error,
    })
}

fn random_phase_matrix(rows: usize, cols: usize, seed: u64) -> Result<CMatrix> {
    let mut r = rng::stream(seed);
    Ok(PhaseBook::random(rows, cols, Quantization::Continuous, &mut r)?.exp_matrix())
}

/// Smallest singular value of a random `rows × cols` matrix of unit-modulus
/// entries with uniform phases.
pub fn random_phase_sigma_min(rows: usize, cols: usize, seed: u64) -> Result<f64> {
    Ok(crate::linalg::sigma_min(&random_phase_matrix(rows, cols, seed)?))
}

/// Singular values (descending) of the same random matrix as
/// [`random_phase_sigma_min`].
pub fn random_phase_singular_values(rows: usize, cols: usize, seed: u64) -> Result<Vec<f64>> {
    Ok(crate::linalg::singular_values(&random_phase_matrix(rows, cols, seed)?))
}
