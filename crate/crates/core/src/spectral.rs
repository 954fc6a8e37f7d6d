//! Rank and conditioning analysis of sensing operators.
//!
//! Besides dense SVD reports this module carries the closed forms used to
//! predict conditioning without building matrices: the rank ceiling of
//! stacked/summed operators, the extreme singular values of the two-column
//! Vandermonde incidence matrix of a uniform linear panel, its small-angle
//! expansion, the Marchenko–Pastur estimate for random configuration
//! matrices and the resulting least-squares error predictor.

use std::f64::consts::PI;

use crate::linalg::{singular_values, CMatrix};
use crate::operator::{AssemblyMode, SensingOperator};
use crate::{Error, Result};

/// Default relative rank threshold.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct SpectralReport {
    pub rows: usize,
    pub cols: usize,
    /// Descending.
    pub singular_values: Vec<f64>,
    pub rank_tol: f64,
    pub rank: usize,
    /// `σ_max / σ_min`; infinite when `σ_min = 0`.
    pub condition_number: f64,
    /// Rank ceiling implied by the operator's panel layout.
    pub rank_bound: usize,
}

/// Dense SVD of a bare matrix. `rank_bound` is `min(rows, cols)`.
pub fn spectral_report_matrix(m: &CMatrix, rank_tol: f64) -> Result<SpectralReport> {
    if m.is_empty() {
        return Err(Error::invalid("spectral report of an empty matrix"));
    }
    if !(rank_tol > 0.0) {
        return Err(Error::invalid(format!("rank tolerance must be > 0, got {rank_tol}")));
    }
    let s = singular_values(m);
    let smax = s[0];
    let smin = *s.last().expect("nonempty");
    let rank = if smax > 0.0 {
        s.iter().filter(|x| **x >= rank_tol * smax).count()
    } else {
        0
    };
    let condition_number = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    Ok(SpectralReport {
        rows: m.nrows(),
        cols: m.ncols(),
        singular_values: s,
        rank_tol,
        rank,
        condition_number,
        rank_bound: m.nrows().min(m.ncols()),
    })
}

/// Dense SVD report of an operator, with its rank ceiling from the panel
/// metadata.
pub fn spectral_report(op: &SensingOperator, rank_tol: f64) -> Result<SpectralReport> {
    let mut report = spectral_report_matrix(op.matrix(), rank_tol)?;
    report.rank_bound = operator_rank_bound(op)?;
    Ok(report)
}

/// Panel layout for [`rank_bound`].
#[derive(Debug, Clone, PartialEq)]
pub enum RankLayout {
    /// Stacked blocks: `(T_k, N_k)` per panel.
    Dedicated(Vec<(usize, usize)>),
    /// Summed blocks: common `T`, per-panel `N_k`.
    Shared { snapshots: usize, elements: Vec<usize> },
}

/// `min{M, Σ min{T_k, N_k}}` (dedicated) or `min{M, T, Σ N_k}` (shared).
pub fn rank_bound(roi_dim: usize, layout: &RankLayout) -> Result<usize> {
    if roi_dim == 0 {
        return Err(Error::invalid("RoI dimension must be positive"));
    }
    match layout {
        RankLayout::Dedicated(panels) => {
            if panels.is_empty() || panels.iter().any(|(t, n)| *t == 0 || *n == 0) {
                return Err(Error::invalid("panel counts must be positive"));
            }
            Ok(roi_dim.min(panels.iter().map(|(t, n)| (*t).min(*n)).sum()))
        }
        RankLayout::Shared {
            snapshots,
            elements,
        } => {
            if *snapshots == 0 || elements.is_empty() || elements.contains(&0) {
                return Err(Error::invalid("panel counts must be positive"));
            }
            Ok(roi_dim.min(*snapshots).min(elements.iter().sum()))
        }
    }
}

fn operator_rank_bound(op: &SensingOperator) -> Result<usize> {
    let layout = match op.mode() {
        AssemblyMode::Single | AssemblyMode::Dedicated => RankLayout::Dedicated(
            op.blocks()
                .iter()
                .map(|b| (b.rows.len(), b.elements))
                .collect(),
        ),
        AssemblyMode::Shared => RankLayout::Shared {
            snapshots: op.rows(),
            elements: op.blocks().iter().map(|b| b.elements).collect(),
        },
    };
    rank_bound(op.cols(), &layout)
}

/// `sin(Nx) / sin(x)`, continued by its limit `±N` where `sin x = 0`.
pub fn dirichlet_ratio(n: usize, x: f64) -> f64 {
    let k = (x / PI).round();
    let y = x - k * PI;
    let sign = if (k as i64 * (n as i64 - 1)).rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    };
    if y == 0.0 {
        return sign * n as f64;
    }
    sign * (n as f64 * y).sin() / y.sin()
}

/// `N − N(N²−1)x²/6`, the second-order expansion of `sin(Nx)/sin(x)`.
pub fn sin_ratio_approx(n: usize, x: f64) -> f64 {
    let n = n as f64;
    n - n * (n * n - 1.0) * x * x / 6.0
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VandermondeSingularValues {
    pub max: f64,
    pub min: f64,
    /// The two effective directions coincide (`dβ/λ` is an integer), so the
    /// matrix is rank one and `min` is zero.
    pub degenerate: bool,
}

/// Extreme singular values of the `N × 2` incidence matrix of a uniform
/// linear panel (spacing `d`) for plane waves from `θ` and `θ + Δ`:
///
/// `σ_{max,min} = sqrt(N ± |sin(πNdβ/λ) / sin(πdβ/λ)|)`, `β = sinθ − sin(θ+Δ)`.
///
/// Where `πdβ/λ` is a multiple of π the ratio takes its limit `N`.
pub fn vandermonde_extreme_singvals(
    theta: f64,
    delta: f64,
    n: usize,
    spacing: f64,
    wavelength: f64,
) -> Result<VandermondeSingularValues> {
    if delta == 0.0 {
        return Err(Error::Geometry("Δ = 0: the two incident directions coincide".into()));
    }
    if n == 0 || !(spacing > 0.0) || !(wavelength > 0.0) {
        return Err(Error::invalid("need N >= 1, d > 0 and λ > 0"));
    }
    // sinθ − sin(θ+Δ) without cancellation
    let beta = -2.0 * (theta + delta / 2.0).cos() * (delta / 2.0).sin();
    let q = spacing * beta / wavelength;
    let y = PI * (q - q.round());
    // Σ_l e^{j(N−1−2l)y} is real; N ∓ |D| evaluated termwise.
    let offsets = (0..n).map(|l| (n as f64 - 1.0 - 2.0 * l as f64) * y);
    let d: f64 = offsets.clone().map(f64::cos).sum();
    let nf = n as f64;
    let (lo, hi) = if d >= 0.0 {
        let lo: f64 = offsets.map(|a| 2.0 * (a / 2.0).sin().powi(2)).sum();
        (lo, 2.0 * nf - lo)
    } else {
        let lo: f64 = offsets.map(|a| 2.0 * (a / 2.0).cos().powi(2)).sum();
        (lo, 2.0 * nf - lo)
    };
    Ok(VandermondeSingularValues {
        max: hi.max(0.0).sqrt(),
        min: lo.max(0.0).sqrt(),
        degenerate: y == 0.0,
    })
}

/// Small-separation estimate of the incidence matrix's `σ_min`:
/// `(π/√6)(d/λ)√(N(N²−1)) |Δ| |cosθ|`. Valid while `πNd|Δ cosθ|/λ ≪ 1`.
pub fn sigma_min_incidence_approx(theta: f64, delta: f64, n: usize, spacing: f64, wavelength: f64) -> f64 {
    let nf = n as f64;
    PI / 6f64.sqrt() * (spacing / wavelength) * (nf * (nf * nf - 1.0)).sqrt() * delta.abs() * theta.cos().abs()
}

/// `√T − √N`, the large-size estimate of the smallest singular value of a
/// `T × N` matrix with i.i.d. zero-mean unit-variance entries.
pub fn mp_sigma_min_approx(t: usize, n: usize) -> Result<f64> {
    if t <= n {
        return Err(Error::invalid(format!("estimate needs T > N, got T={t}, N={n}")));
    }
    Ok((t as f64).sqrt() - (n as f64).sqrt())
}

/// Support `[a, b] = [(1−√c)², (1+√c)²]` of the Marchenko–Pastur law.
pub fn mp_support(c: f64) -> (f64, f64) {
    let s = c.sqrt();
    ((1.0 - s).powi(2), (1.0 + s).powi(2))
}

/// Marchenko–Pastur density with ratio `c = N/T ∈ (0, 1)`:
/// `√((x−a)⁺(b−x)⁺) / (2πcx)`.
pub fn mp_density(x: f64, c: f64) -> Result<f64> {
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::invalid(format!("ratio c must lie in (0, 1), got {c}")));
    }
    if x <= 0.0 {
        return Ok(0.0);
    }
    let (a, b) = mp_support(c);
    let v = (x - a).max(0.0) * (b - x).max(0.0);
    Ok(v.sqrt() / (2.0 * PI * c * x))
}

/// Inputs of the two-source least-squares error predictor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolutionQuery {
    pub theta: f64,
    pub delta: f64,
    pub elements: usize,
    pub spacing: f64,
    pub wavelength: f64,
    pub snapshots: usize,
    pub receiver_distance: f64,
    /// Element gain magnitude `|τ|`.
    pub tau: f64,
    /// Linear SNR `‖E‖²/σ²`.
    pub snr: f64,
}

impl ResolutionQuery {
    pub fn validate(&self) -> Result<()> {
        let mut bad = Vec::new();
        if self.elements < 2 {
            bad.push(format!("N = {} < 2", self.elements));
        }
        if self.snapshots <= self.elements {
            bad.push(format!("T = {} must exceed N = {}", self.snapshots, self.elements));
        }
        if self.delta == 0.0 {
            bad.push("Δ = 0".to_string());
        }
        if self.theta.cos().abs() < 1e-12 {
            bad.push("cos θ = 0 (endfire)".to_string());
        }
        for (name, v) in [
            ("d", self.spacing),
            ("λ", self.wavelength),
            ("r^s", self.receiver_distance),
            ("τ", self.tau),
            ("SNR", self.snr),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                bad.push(format!("{name} must be positive and finite, got {v}"));
            }
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::invalid(bad.join("; ")))
        }
    }
}

/// Approximate upper bound on `‖Ê − E‖/‖E‖` for least squares with two
/// incident waves at `θ` and `θ + Δ` on a uniform linear panel:
///
/// `(√6/π) r^s τ⁻¹ (d/λ)⁻¹ (1−√(N/T))⁻¹ N^{-3/2} |Δ|⁻¹ (cosθ)⁻¹ SNR^{-1/2}`.
pub fn relative_error_bound(q: &ResolutionQuery) -> Result<f64> {
    q.validate()?;
    let n = q.elements as f64;
    let t = q.snapshots as f64;
    Ok(6f64.sqrt() / PI * q.receiver_distance / q.tau / (q.spacing / q.wavelength)
        / (1.0 - (n / t).sqrt())
        * n.powf(-1.5)
        / q.delta.abs()
        / q.theta.cos().abs()
        / q.snr.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forward_model::{PhaseBook, Quantization};
    use crate::linalg::{cis, sigma_min};
    use num_complex::Complex64;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn explicit_vandermonde(theta: f64, delta: f64, n: usize, d: f64, lambda: f64) -> CMatrix {
        CMatrix::from_fn(n, 2, |k, c| {
            let th = if c == 0 { theta } else { theta + delta };
            let ph = 2.0 * PI * k as f64 * d * th.sin() / lambda;
            Complex64::new(ph.cos(), ph.sin())
        })
    }

    #[test]
    fn report_identity_and_rank_one() {
        let r = spectral_report_matrix(&CMatrix::identity(3, 3), DEFAULT_RANK_TOL).unwrap();
        assert_eq!(r.rank, 3);
        assert!((r.condition_number - 1.0).abs() < 1e-12);
        assert!(r.singular_values.iter().all(|s| (s - 1.0).abs() < 1e-12));

        let u = CMatrix::from_fn(4, 1, |i, _| Complex64::new(i as f64 + 1.0, 0.5));
        let v = CMatrix::from_fn(1, 3, |_, j| Complex64::new(1.0, -(j as f64)));
        let r = spectral_report_matrix(&(u * v), DEFAULT_RANK_TOL).unwrap();
        assert_eq!(r.rank, 1);
        assert!(r.singular_values[1] < 1e-12 * r.singular_values[0]);
        assert!(spectral_report_matrix(&CMatrix::zeros(0, 0), 1e-10).is_err());
    }

    #[test]
    fn rank_bound_examples() {
        let ded = |t, n| RankLayout::Dedicated(vec![(t, n); 4]);
        assert_eq!(rank_bound(100, &ded(10, 50)).unwrap(), 40);
        assert_eq!(rank_bound(100, &ded(100, 50)).unwrap(), 100);
        let shared = RankLayout::Shared {
            snapshots: 200,
            elements: vec![50; 4],
        };
        assert_eq!(rank_bound(100, &shared).unwrap(), 100);
        let shared = RankLayout::Shared {
            snapshots: 30,
            elements: vec![5, 6],
        };
        assert_eq!(rank_bound(100, &shared).unwrap(), 11);
        assert!(rank_bound(0, &ded(1, 1)).is_err());
    }

    #[test]
    fn vandermonde_ratio_vanishes() {
        // dβ/λ = 1/N: numerator argument π, denominator nonzero.
        let (n, d, lambda) = (8usize, 0.5, 1.0);
        let theta = 0.0f64;
        // choose Δ with sin(θ) − sin(θ+Δ) = λ/(N d)
        let delta = -(1.0 / (n as f64 * d)).asin();
        let sv = vandermonde_extreme_singvals(theta, delta, n, d, lambda).unwrap();
        assert!((sv.max - (n as f64).sqrt()).abs() < 1e-12);
        assert!((sv.min - (n as f64).sqrt()).abs() < 1e-12);
        assert!(!sv.degenerate);
    }

    #[test]
    fn vandermonde_small_separation_limit() {
        let n = 16;
        let sv = vandermonde_extreme_singvals(0.3, 1e-9, n, 0.5, 1.0).unwrap();
        assert!(sv.min < 1e-6);
        assert!((sv.max - (2.0 * n as f64).sqrt()).abs() < 1e-9);
        assert!(vandermonde_extreme_singvals(0.3, 0.0, n, 0.5, 1.0).is_err());
    }

    #[test]
    fn vandermonde_aliased_directions_are_flagged() {
        // d = λ, θ = π/2 − ε and θ+Δ mirrored: β = 0 exactly only for
        // symmetric pairs, use θ and π − θ.
        let theta = 0.4;
        let sv = vandermonde_extreme_singvals(theta, PI - 2.0 * theta, 5, 0.5, 1.0).unwrap();
        assert!(sv.min < 1e-7);
        // d = λ with β = 1: grating-lobe alias
        let th = 0.5f64.asin();
        let delta = -0.5f64.asin() - th;
        let sv = vandermonde_extreme_singvals(th, delta, 6, 1.0, 1.0).unwrap();
        assert!(sv.degenerate || sv.min < 1e-7);
        assert!((sv.max - 12f64.sqrt()).abs() < 1e-6);
    }

    #[test]
    fn vandermonde_matches_dense_svd() {
        let mut r = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..50 {
            let n = r.random_range(2..=64);
            let theta = r.random_range(-1.2..1.2);
            let delta = r.random_range(0.001..0.5) * if r.random::<bool>() { 1.0 } else { -1.0 };
            let ratio = r.random_range(0.25..2.0);
            let sv = vandermonde_extreme_singvals(theta, delta, n, ratio, 1.0).unwrap();
            let s = singular_values(&explicit_vandermonde(theta, delta, n, ratio, 1.0));
            assert!((sv.max - s[0]).abs() < 1e-9, "max {} vs {}", sv.max, s[0]);
            assert!((sv.min - s[1]).abs() < 1e-9, "min {} vs {}", sv.min, s[1]);
            assert!((sv.max.powi(2) + sv.min.powi(2) - 2.0 * n as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn dirichlet_ratio_limits() {
        assert_eq!(dirichlet_ratio(5, 0.0), 5.0);
        assert_eq!(dirichlet_ratio(4, PI), -4.0);
        assert_eq!(dirichlet_ratio(5, PI), 5.0);
        let x: f64 = 0.37;
        assert!((dirichlet_ratio(7, x) - (7.0 * x).sin() / x.sin()).abs() < 1e-12);
    }

    #[test]
    fn sin_ratio_examples() {
        assert_eq!(sin_ratio_approx(7, 0.0), 7.0);
        let approx = sin_ratio_approx(3, 0.1);
        assert!((approx - 2.96).abs() < 1e-12);
        let exact = 0.3f64.sin() / 0.1f64.sin();
        assert!((exact - 2.960_133).abs() < 1e-6);
        // fourth-order remainder: quartering x shrinks the error ≈ 256×
        let err = |x: f64| (sin_ratio_approx(6, x) - (6.0 * x).sin() / x.sin()).abs();
        let ratio = err(0.04) / err(0.01);
        assert!((ratio - 256.0).abs() / 256.0 < 0.02, "ratio {ratio}");
    }

    #[test]
    fn incidence_approx_examples() {
        assert_eq!(sigma_min_incidence_approx(0.2, 0.0, 10, 0.5, 1.0), 0.0);
        let a = sigma_min_incidence_approx(0.0, 0.01, 10, 0.5, 1.0);
        let b = sigma_min_incidence_approx(PI / 3.0, 0.01, 10, 0.5, 1.0);
        assert!((b / a - 0.5).abs() < 1e-12);
        let approx = sigma_min_incidence_approx(0.0, 0.01, 64, 0.5, 1.0);
        let exact = vandermonde_extreme_singvals(0.0, 0.01, 64, 0.5, 1.0).unwrap().min;
        assert!((approx - exact).abs() / exact < 0.05, "{approx} vs {exact}");
    }

    #[test]
    fn mp_sigma_min_examples() {
        assert!((mp_sigma_min_approx(400, 100).unwrap() - 10.0).abs() < 1e-12);
        let n = 49;
        assert!((mp_sigma_min_approx(4 * n, n).unwrap() - 7.0).abs() < 1e-12);
        assert!(mp_sigma_min_approx(10, 10).is_err());
    }

    #[test]
    fn mp_density_support_and_mass() {
        let c = 0.25;
        let (a, b) = mp_support(c);
        assert_eq!(mp_density(a * 0.5, c).unwrap(), 0.0);
        assert_eq!(mp_density(b * 1.5, c).unwrap(), 0.0);
        assert!(mp_density(1.0, 1.5).is_err());
        // composite Simpson on the substitution x = a + (b−a) sin²(u)
        let steps = 20_000;
        let h = (PI / 2.0) / steps as f64;
        let f = |u: f64| {
            let x = a + (b - a) * u.sin().powi(2);
            mp_density(x, c).unwrap() * (b - a) * 2.0 * u.sin() * u.cos()
        };
        let mut s = f(0.0) + f(PI / 2.0);
        for i in 1..steps {
            s += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        let mass = s * h / 3.0;
        assert!((mass - 1.0).abs() < 1e-6, "mass {mass}");
    }

    #[test]
    fn bound_scaling_laws() {
        let q = ResolutionQuery {
            theta: 0.1,
            delta: 0.01,
            elements: 50,
            spacing: 0.5,
            wavelength: 1.0,
            snapshots: 500,
            receiver_distance: 10.0,
            tau: 1.0,
            snr: 1000.0,
        };
        let b = relative_error_bound(&q).unwrap();
        let b4 = relative_error_bound(&ResolutionQuery { snr: 4000.0, ..q }).unwrap();
        assert!((b / b4 - 2.0).abs() < 1e-12);
        let bh = relative_error_bound(&ResolutionQuery { delta: 0.005, ..q }).unwrap();
        assert!((bh / b - 2.0).abs() < 1e-12);
        assert!(relative_error_bound(&ResolutionQuery { snapshots: 50, ..q }).is_err());
        assert!(relative_error_bound(&ResolutionQuery { delta: 0.0, ..q }).is_err());
        assert!(relative_error_bound(&ResolutionQuery { theta: PI / 2.0, ..q }).is_err());
    }

    #[test]
    fn operator_report_carries_rank_bound() {
        let m = CMatrix::from_fn(6, 4, |i, j| cis((i * j) as f64 * 0.7));
        let op = SensingOperator::from_matrix(m);
        let r = spectral_report(&op, DEFAULT_RANK_TOL).unwrap();
        assert_eq!(r.rank_bound, 4);
        assert!(r.rank <= r.rank_bound);
    }

    fn full_rank_pair(seed: u64, m: usize, k: usize, n: usize) -> (CMatrix, CMatrix) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let a = PhaseBook::random(m, k, Quantization::Continuous, &mut r).unwrap().exp_matrix();
        let b = CMatrix::from_fn(k, n, |_, _| Complex64::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)));
        (a, b)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn product_sigma_min_inequality(seed in 0u64..10_000, m in 2usize..12, k in 2usize..10, n in 1usize..6) {
            let n = n.min(k);
            let (a, b) = full_rank_pair(seed, m, k, n);
            prop_assume!(sigma_min(&b) > 1e-8);
            let lhs = sigma_min(&(&a * &b));
            // σ_min(A) over its n = cols(A) singular values; zero when A is wide
            let sa = singular_values(&a);
            let sigma_a = if a.nrows() >= a.ncols() { *sa.last().unwrap() } else { 0.0 };
            prop_assert!(lhs >= sigma_a * sigma_min(&b) * (1.0 - 1e-10) - 1e-12);
        }

        #[test]
        fn trace_identity(theta in -1.3..1.3f64, delta in 0.001..0.8f64, n in 2usize..64, d in 0.25..2.0f64) {
            let sv = vandermonde_extreme_singvals(theta, delta, n, d, 1.0).unwrap();
            prop_assert!((sv.max.powi(2) + sv.min.powi(2) - 2.0 * n as f64).abs() < 1e-9);
        }
    }
}
