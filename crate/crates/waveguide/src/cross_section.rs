//! Transverse spectra of arm cross-sections and the spectrum of the
//! associated quadratic pencil at a given wavenumber.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, WgError};
use crate::linalg::tridiag_lowest_eigenpairs;
use crate::quadrature::trapezoid_weights;

/// Boundary condition on the sides of an arm (and on junction walls).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundaryKind {
    Dirichlet,
    Neumann,
}

/// One arm's cross-section: an interval of the given width, with an optional
/// sampled perturbation of the transverse coefficient (constant along the arm
/// axis).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CrossSectionSpec {
    pub arm_id: usize,
    pub width: f64,
    pub boundary_kind: BoundaryKind,
    /// Sampled on a uniform grid covering [0, width]; resampled linearly onto
    /// the solver grid when the node counts differ.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transverse_profile: Option<Vec<f64>>,
}

impl CrossSectionSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.width > 0.0) {
            return Err(WgError::NegativeWidth { width: self.width });
        }
        if let Some(p) = &self.transverse_profile {
            if p.len() < 2 {
                return Err(WgError::Invalid(format!(
                    "transverse_profile of arm {} needs at least 2 samples, got {}",
                    self.arm_id,
                    p.len()
                )));
            }
        }
        Ok(())
    }
}

/// One transverse eigenpair: -phi'' + V phi = mu phi with unit L^2 norm.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TransverseMode {
    pub mu: f64,
    /// Values on the uniform grid over [0, width], boundary nodes included.
    pub phi: Vec<f64>,
}

/// Ordered transverse eigenpairs of one cross-section.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CrossSectionSpectrum {
    pub entries: Vec<TransverseMode>,
    pub grid_step: f64,
    pub spec: CrossSectionSpec,
}

impl CrossSectionSpectrum {
    pub fn n_nodes(&self) -> usize {
        self.entries.first().map_or(0, |m| m.phi.len())
    }

    /// Largest deviation of the trapezoid Gram matrix from the identity.
    pub fn orthonormality_defect(&self) -> f64 {
        let n = self.n_nodes();
        if n == 0 {
            return 0.0;
        }
        let w = trapezoid_weights(n, self.grid_step);
        let mut worst: f64 = 0.0;
        for (a, ma) in self.entries.iter().enumerate() {
            for (b, mb) in self.entries.iter().enumerate().skip(a) {
                let dot: f64 = (0..n).map(|i| w[i] * ma.phi[i] * mb.phi[i]).sum();
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }
}

/// Divides `len` by `h` and insists the quotient is an integer.
pub fn exact_steps(len: f64, h: f64, what: &'static str) -> Result<usize> {
    if !(h > 0.0) {
        return Err(WgError::Invalid(format!("nonpositive grid step {h}")));
    }
    let q = len / h;
    let n = q.round();
    if n < 1.0 || (q - n).abs() > 1e-9 * q.abs().max(1.0) {
        return Err(WgError::MeshAlignment {
            h,
            what,
            value: len,
            remainder: (q - n) * h,
        });
    }
    Ok(n as usize)
}

/// First `count` eigenpairs of the transverse operator -d^2/dy^2 (+ profile)
/// on [0, width] with the declared boundary condition.
///
/// Without a profile the continuum closed forms are returned; their sampled
/// eigenfunctions are still exactly orthonormal under the trapezoid rule.
/// With a profile, the second-order FD eigenproblem is solved by
/// Sturm-sequence bisection.
pub fn transverse_spectrum(
    section: &CrossSectionSpec,
    count: usize,
    grid_step: f64,
) -> Result<CrossSectionSpectrum> {
    section.validate()?;
    if count == 0 {
        return Err(WgError::Invalid("transverse mode count must be >= 1".into()));
    }
    let w = section.width;
    let n = exact_steps(w, grid_step, "cross-section width")?;
    if n < 2 {
        return Err(WgError::Invalid(format!(
            "cross-section grid needs at least 2 intervals, got {n}"
        )));
    }
    // highest requested mode has this many half-oscillations across the width
    let half_waves = match section.boundary_kind {
        BoundaryKind::Neumann => count - 1,
        BoundaryKind::Dirichlet => count,
    };
    if half_waves > 0 && n < 8 * half_waves {
        return Err(WgError::GridTooCoarse {
            mode_index: half_waves,
            needed: 8 * half_waves,
            actual: n,
        });
    }
    let entries = match &section.transverse_profile {
        None => analytic_modes(section.boundary_kind, w, n, count),
        Some(p) => profiled_modes(section.boundary_kind, n, count, p, grid_step)?,
    };
    Ok(CrossSectionSpectrum {
        entries,
        grid_step,
        spec: section.clone(),
    })
}

fn analytic_modes(kind: BoundaryKind, w: f64, n: usize, count: usize) -> Vec<TransverseMode> {
    let mut out = Vec::with_capacity(count);
    for m in 0..count {
        let idx = match kind {
            BoundaryKind::Neumann => m,
            BoundaryKind::Dirichlet => m + 1,
        };
        let kappa = idx as f64 * std::f64::consts::PI / w;
        let mu = kappa * kappa;
        let mut phi: Vec<f64> = (0..=n)
            .map(|i| {
                let y = i as f64 / n as f64 * w;
                match kind {
                    BoundaryKind::Neumann => {
                        if idx == 0 {
                            1.0 / w.sqrt()
                        } else {
                            (2.0 / w).sqrt() * (kappa * y).cos()
                        }
                    }
                    BoundaryKind::Dirichlet => (2.0 / w).sqrt() * (kappa * y).sin(),
                }
            })
            .collect();
        if kind == BoundaryKind::Dirichlet {
            // clear the roundoff left by sin(idx * pi)
            phi[0] = 0.0;
            phi[n] = 0.0;
        }
        out.push(TransverseMode { mu, phi });
    }
    out
}

/// Resamples a uniform sampling of [0, w] onto n+1 nodes by linear
/// interpolation.
fn resample_linear(p: &[f64], n: usize) -> Vec<f64> {
    let m = p.len() - 1;
    (0..=n)
        .map(|i| {
            let x = i as f64 / n as f64 * m as f64;
            let j = (x.floor() as usize).min(m - 1);
            let frac = x - j as f64;
            p[j] * (1.0 - frac) + p[j + 1] * frac
        })
        .collect()
}

fn profiled_modes(
    kind: BoundaryKind,
    n: usize,
    count: usize,
    profile: &[f64],
    h: f64,
) -> Result<Vec<TransverseMode>> {
    let v = if profile.len() == n + 1 {
        profile.to_vec()
    } else {
        resample_linear(profile, n)
    };
    let h2 = h * h;
    let (d, e, pad_zeros): (Vec<f64>, Vec<f64>, bool) = match kind {
        BoundaryKind::Dirichlet => {
            // unknowns at interior nodes 1..n-1
            let d = (1..n).map(|i| 2.0 / h2 + v[i]).collect();
            let e = vec![-1.0 / h2; n - 2];
            (d, e, true)
        }
        BoundaryKind::Neumann => {
            // unknowns at all nodes; ghost reflection symmetrized by the
            // trapezoid half-weights (similarity with sqrt(2) end couplings)
            let d = (0..=n).map(|i| 2.0 / h2 + v[i]).collect();
            let mut e = vec![-1.0 / h2; n];
            e[0] = -std::f64::consts::SQRT_2 / h2;
            e[n - 1] = -std::f64::consts::SQRT_2 / h2;
            (d, e, false)
        }
    };
    if count > d.len() {
        return Err(WgError::Invalid(format!(
            "requested {count} modes but the grid supports only {}",
            d.len()
        )));
    }
    let pairs = tridiag_lowest_eigenpairs(&d, &e, count);
    let weights = trapezoid_weights(n + 1, h);
    let mut out = Vec::with_capacity(count);
    for (mu, xi) in pairs {
        let mut phi = vec![0.0f64; n + 1];
        if pad_zeros {
            phi[1..n].copy_from_slice(&xi);
        } else {
            // invert the half-weight similarity at the two end nodes
            for (i, x) in xi.iter().enumerate() {
                phi[i] = if i == 0 || i == n {
                    x * std::f64::consts::SQRT_2
                } else {
                    *x
                };
            }
        }
        // unit trapezoid norm, deterministic sign
        let nrm: f64 = (0..=n).map(|i| weights[i] * phi[i] * phi[i]).sum::<f64>().sqrt();
        let imax = (0..=n).fold(0, |best, i| if phi[i].abs() > phi[best].abs() { i } else { best });
        let sgn = if phi[imax] < 0.0 { -1.0 } else { 1.0 };
        for x in phi.iter_mut() {
            *x *= sgn / nrm;
        }
        out.push(TransverseMode { mu, phi });
    }
    Ok(out)
}

/// One point of the pencil spectrum at fixed wavenumber.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PencilPoint {
    pub lambda: Complex64,
    pub multiplicity: usize,
    pub chain_length: usize,
    pub transverse_index: usize,
}

/// All pencil eigenvalues in the strip |Im lambda| <= rate_cutoff.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PencilSpectrum {
    pub k: f64,
    pub rate_cutoff: f64,
    pub points: Vec<PencilPoint>,
    pub threshold_flags: Vec<bool>,
}

impl PencilSpectrum {
    /// Number of real (propagating) points; M per arm is half of this,
    /// counting a threshold chain as one pair.
    pub fn real_points(&self) -> usize {
        self.points
            .iter()
            .filter(|p| p.lambda.im == 0.0 && p.chain_length == 1)
            .count()
    }

    /// Propagating pair count, threshold chains included.
    pub fn propagating_pairs(&self) -> usize {
        let thresholds = self.threshold_flags.iter().filter(|f| **f).count();
        self.real_points() / 2 + thresholds
    }

    /// Decay rates (Im lambda > 0) of the evanescent points in the strip,
    /// ascending, with their transverse indices.
    pub fn evanescent_rates(&self) -> Vec<(f64, usize)> {
        let mut r: Vec<(f64, usize)> = self
            .points
            .iter()
            .filter(|p| p.lambda.im > 0.0)
            .map(|p| (p.lambda.im, p.transverse_index))
            .collect();
        r.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        r
    }

    /// Total algebraic multiplicity over the strip.
    pub fn strip_multiplicity(&self) -> usize {
        self.points.iter().map(|p| p.multiplicity * p.chain_length).sum()
    }
}

/// Default threshold detection tolerance at wavenumber k.
pub fn default_threshold_tol(k: f64) -> f64 {
    1e-9 * k * k
}

/// Pencil spectrum in the strip |Im lambda| <= beta from the dispersion
/// relation lambda^2 = k^2 - mu_n.
///
/// Requires the transverse spectrum to extend past k^2 + beta^2 so the strip
/// is provably complete. A mu within threshold_tol of k^2 produces the
/// lambda = 0 point with a length-2 chain and a threshold flag.
pub fn pencil_spectrum(
    spectrum: &CrossSectionSpectrum,
    k: f64,
    beta: f64,
    threshold_tol: f64,
) -> Result<PencilSpectrum> {
    if !(k > 0.0) {
        return Err(WgError::Invalid(format!("wavenumber must be positive, got {k}")));
    }
    if !(beta > 0.0) {
        return Err(WgError::Invalid(format!("rate cutoff must be positive, got {beta}")));
    }
    if !(threshold_tol > 0.0) {
        return Err(WgError::Invalid("threshold_tol must be positive".into()));
    }
    let needed = k * k + beta * beta;
    let mu_max = spectrum.entries.last().map_or(f64::NEG_INFINITY, |m| m.mu);
    if mu_max <= needed {
        return Err(WgError::Invalid(format!(
            "transverse spectrum reaches mu = {mu_max:.6} but the strip needs \
             coverage past k^2 + beta^2 = {needed:.6}; request more modes"
        )));
    }
    let mut points = Vec::new();
    let mut flags = Vec::new();
    for (idx, mode) in spectrum.entries.iter().enumerate() {
        let delta = k * k - mode.mu;
        if delta.abs() < threshold_tol {
            points.push(PencilPoint {
                lambda: Complex64::ZERO,
                multiplicity: 1,
                chain_length: 2,
                transverse_index: idx,
            });
            flags.push(true);
            continue;
        }
        if delta > 0.0 {
            let lam = delta.sqrt();
            for s in [1.0, -1.0] {
                points.push(PencilPoint {
                    lambda: Complex64::new(s * lam, 0.0),
                    multiplicity: 1,
                    chain_length: 1,
                    transverse_index: idx,
                });
                flags.push(false);
            }
        } else {
            let kappa = (-delta).sqrt();
            if (kappa - beta).abs() < threshold_tol {
                return Err(WgError::WeightLineCollision {
                    rate: beta,
                    mu: mode.mu,
                    distance: (kappa - beta).abs(),
                    tol: threshold_tol,
                });
            }
            if kappa < beta {
                for s in [1.0, -1.0] {
                    points.push(PencilPoint {
                        lambda: Complex64::new(0.0, s * kappa),
                        multiplicity: 1,
                        chain_length: 1,
                        transverse_index: idx,
                    });
                    flags.push(false);
                }
            }
        }
    }
    Ok(PencilSpectrum {
        k,
        rate_cutoff: beta,
        points,
        threshold_flags: flags,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use nalgebra::DMatrix;
    use std::f64::consts::PI;

    fn neumann_unit(profile: Option<Vec<f64>>) -> CrossSectionSpec {
        CrossSectionSpec {
            arm_id: 0,
            width: 1.0,
            boundary_kind: BoundaryKind::Neumann,
            transverse_profile: profile,
        }
    }

    fn dirichlet_unit() -> CrossSectionSpec {
        CrossSectionSpec {
            arm_id: 0,
            width: 1.0,
            boundary_kind: BoundaryKind::Dirichlet,
            transverse_profile: None,
        }
    }

    #[test]
    fn analytic_neumann_modes() {
        let s = transverse_spectrum(&neumann_unit(None), 3, 1.0 / 64.0).unwrap();
        assert_relative_eq!(s.entries[0].mu, 0.0, epsilon = 1e-14);
        assert_relative_eq!(s.entries[1].mu, PI * PI, epsilon = 1e-12);
        assert_relative_eq!(s.entries[2].mu, 4.0 * PI * PI, epsilon = 1e-12);
        assert_relative_eq!(s.entries[0].phi[10], 1.0, epsilon = 1e-14);
        // sampled continuum eigenfunctions are exactly trapezoid-orthonormal
        assert!(s.orthonormality_defect() < 1e-13, "{}", s.orthonormality_defect());
    }

    #[test]
    fn analytic_dirichlet_modes() {
        let s = transverse_spectrum(&dirichlet_unit(), 2, 1.0 / 64.0).unwrap();
        assert_relative_eq!(s.entries[0].mu, PI * PI, epsilon = 1e-12);
        assert_relative_eq!(s.entries[1].mu, 4.0 * PI * PI, epsilon = 1e-12);
        assert_eq!(s.entries[0].phi[0], 0.0);
        assert_eq!(s.entries[0].phi[64], 0.0);
        assert!(s.orthonormality_defect() < 1e-13);
    }

    /// Dense symmetric eigensolve of the same FD matrix, fully independent of
    /// the bisection path.
    fn dense_oracle(kind: BoundaryKind, n: usize, h: f64, v: &[f64], count: usize) -> Vec<f64> {
        let h2 = h * h;
        let m = match kind {
            BoundaryKind::Dirichlet => {
                let mut m = DMatrix::<f64>::zeros(n - 1, n - 1);
                for i in 0..n - 1 {
                    m[(i, i)] = 2.0 / h2 + v[i + 1];
                    if i + 1 < n - 1 {
                        m[(i, i + 1)] = -1.0 / h2;
                        m[(i + 1, i)] = -1.0 / h2;
                    }
                }
                m
            }
            BoundaryKind::Neumann => {
                let mut m = DMatrix::<f64>::zeros(n + 1, n + 1);
                for i in 0..=n {
                    m[(i, i)] = 2.0 / h2 + v[i];
                    if i + 1 <= n {
                        let c = if i == 0 || i + 1 == n {
                            -2.0f64.sqrt() / h2
                        } else {
                            -1.0 / h2
                        };
                        m[(i, i + 1)] = c;
                        m[(i + 1, i)] = c;
                    }
                }
                m
            }
        };
        let mut eigs: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
        eigs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        eigs.truncate(count);
        eigs
    }

    #[test]
    fn profiled_modes_match_dense_oracle() {
        let n = 96;
        let h = 1.0 / n as f64;
        let profile: Vec<f64> = (0..=n).map(|i| 0.1 * (PI * i as f64 * h).sin()).collect();
        let s = transverse_spectrum(&neumann_unit(Some(profile.clone())), 3, h).unwrap();
        let oracle = dense_oracle(BoundaryKind::Neumann, n, h, &profile, 3);
        for j in 0..3 {
            assert_relative_eq!(s.entries[j].mu, oracle[j], max_relative = 1e-8, epsilon = 1e-10);
        }
        assert!(s.orthonormality_defect() < 1e-10);
        // residual of the FD operator on the returned eigenfunction
        let m0 = &s.entries[0];
        let mut worst: f64 = 0.0;
        for i in 1..n {
            let lap = (2.0 * m0.phi[i] - m0.phi[i - 1] - m0.phi[i + 1]) / (h * h);
            let r = lap + profile[i] * m0.phi[i] - m0.mu * m0.phi[i];
            worst = worst.max(r.abs());
        }
        assert!(worst < 1e-6 * (1.0 + m0.mu.abs()), "interior residual {worst}");
    }

    #[test]
    fn profiled_dirichlet_matches_dense_oracle() {
        let n = 80;
        let h = 1.0 / n as f64;
        let profile: Vec<f64> = (0..=n).map(|i| 0.3 * (2.0 * PI * i as f64 * h).cos()).collect();
        let spec = CrossSectionSpec {
            arm_id: 1,
            width: 1.0,
            boundary_kind: BoundaryKind::Dirichlet,
            transverse_profile: Some(profile.clone()),
        };
        let s = transverse_spectrum(&spec, 4, h).unwrap();
        let oracle = dense_oracle(BoundaryKind::Dirichlet, n, h, &profile, 4);
        for j in 0..4 {
            assert_relative_eq!(s.entries[j].mu, oracle[j], max_relative = 1e-8, epsilon = 1e-10);
        }
        assert!(s.orthonormality_defect() < 1e-10);
    }

    #[test]
    fn constant_profile_shifts_discrete_eigenvalues() {
        let n = 64;
        let h = 1.0 / n as f64;
        let c = 0.37;
        let s = transverse_spectrum(&neumann_unit(Some(vec![c; n + 1])), 2, h).unwrap();
        // discrete dispersion of the FD Laplacian plus the constant shift
        for (j, mode) in s.entries.iter().enumerate() {
            let discrete = (2.0 - 2.0 * (j as f64 * PI * h).cos()) / (h * h) + c;
            assert_relative_eq!(mode.mu, discrete, max_relative = 1e-10, epsilon = 1e-10);
        }
    }

    #[test]
    fn coarse_grid_is_refused() {
        let err = transverse_spectrum(&neumann_unit(None), 10, 1.0 / 16.0).unwrap_err();
        assert!(matches!(err, WgError::GridTooCoarse { .. }), "{err}");
    }

    #[test]
    fn misaligned_step_is_refused() {
        let err = transverse_spectrum(&neumann_unit(None), 1, 0.3).unwrap_err();
        assert!(matches!(err, WgError::MeshAlignment { .. }), "{err}");
    }

    #[test]
    fn negative_width_is_refused() {
        let mut spec = neumann_unit(None);
        spec.width = -1.0;
        assert!(matches!(
            transverse_spectrum(&spec, 1, 0.25),
            Err(WgError::NegativeWidth { .. })
        ));
    }

    #[test]
    fn pencil_neumann_k25() {
        let s = transverse_spectrum(&neumann_unit(None), 4, 1.0 / 64.0).unwrap();
        let p = pencil_spectrum(&s, 2.5, 4.0, default_threshold_tol(2.5)).unwrap();
        // one real pair from mu = 0, one imaginary pair from mu = pi^2
        assert_eq!(p.points.len(), 4);
        let lams: Vec<Complex64> = p.points.iter().map(|q| q.lambda).collect();
        assert!(lams.contains(&Complex64::new(2.5, 0.0)));
        assert!(lams.contains(&Complex64::new(-2.5, 0.0)));
        let kappa = (PI * PI - 6.25).sqrt();
        assert!(lams.iter().any(|l| (l - Complex64::new(0.0, kappa)).norm() < 1e-12));
        assert!(lams.iter().any(|l| (l + Complex64::new(0.0, kappa)).norm() < 1e-12));
        assert_relative_eq!(kappa, 1.9025, epsilon = 1e-4);
        // every point satisfies the dispersion relation exactly
        for q in &p.points {
            let mu = s.entries[q.transverse_index].mu;
            let res = (q.lambda * q.lambda - Complex64::new(6.25 - mu, 0.0)).norm();
            assert!(res < 1e-10, "dispersion residual {res}");
        }
        assert_eq!(p.propagating_pairs(), 1);
        assert_eq!(p.strip_multiplicity() % 2, 0);
    }

    #[test]
    fn pencil_threshold_chain() {
        let s = transverse_spectrum(&neumann_unit(None), 3, 1.0 / 64.0).unwrap();
        let p = pencil_spectrum(&s, PI, 1.0, 1e-9 * PI * PI).unwrap();
        let th: Vec<&PencilPoint> = p.points.iter().filter(|q| q.chain_length == 2).collect();
        assert_eq!(th.len(), 1);
        assert_eq!(th[0].lambda, Complex64::ZERO);
        assert_eq!(th[0].transverse_index, 1);
        assert!(p.threshold_flags.iter().any(|f| *f));
        // the mu = 0 mode still gives a real pair at +-pi
        assert!(p
            .points
            .iter()
            .any(|q| (q.lambda - Complex64::new(PI, 0.0)).norm() < 1e-12));
        assert_eq!(p.strip_multiplicity() % 2, 0);
    }

    #[test]
    fn pencil_dirichlet_below_cutoff() {
        let s = transverse_spectrum(&dirichlet_unit(), 3, 1.0 / 64.0).unwrap();
        let p = pencil_spectrum(&s, 2.0, 3.0, default_threshold_tol(2.0)).unwrap();
        assert_eq!(p.real_points(), 0);
        assert_eq!(p.points.len(), 2);
        let kappa = (PI * PI - 4.0).sqrt();
        assert_relative_eq!(kappa, 2.4227, epsilon = 1e-4);
        assert!(p
            .points
            .iter()
            .any(|q| (q.lambda - Complex64::new(0.0, kappa)).norm() < 1e-12));
    }

    #[test]
    fn pencil_rate_line_collision() {
        let s = transverse_spectrum(&neumann_unit(None), 4, 1.0 / 64.0).unwrap();
        let kappa = (PI * PI - 6.25).sqrt();
        let err = pencil_spectrum(&s, 2.5, kappa, 1e-6).unwrap_err();
        assert!(matches!(err, WgError::WeightLineCollision { .. }), "{err}");
    }

    #[test]
    fn pencil_requires_coverage() {
        let s = transverse_spectrum(&neumann_unit(None), 2, 1.0 / 64.0).unwrap();
        // k^2 + beta^2 = 6.25 + 16 needs mu beyond 22.25 > pi^2
        let err = pencil_spectrum(&s, 2.5, 4.0, 1e-9).unwrap_err();
        assert!(matches!(err, WgError::Invalid(_)), "{err}");
    }

    #[test]
    fn real_point_count_monotone_in_k() {
        let s = transverse_spectrum(&neumann_unit(None), 6, 1.0 / 64.0).unwrap();
        let mut prev = 0;
        for i in 0..40 {
            let k = 0.5 + i as f64 * 0.25;
            if s.entries.last().unwrap().mu <= k * k + 0.25 {
                break;
            }
            let p = pencil_spectrum(&s, k, 0.5, 1e-12).unwrap();
            let real = p.real_points();
            assert!(real >= prev, "real count dropped from {prev} to {real} at k={k}");
            prev = real;
        }
        assert!(prev >= 4, "sweep never saw multiple propagating modes");
    }

    #[test]
    fn conjugation_symmetry_of_points() {
        let s = transverse_spectrum(&neumann_unit(None), 6, 1.0 / 128.0).unwrap();
        let p = pencil_spectrum(&s, 4.4, 3.3, default_threshold_tol(4.4)).unwrap();
        for q in &p.points {
            let conj = q.lambda.conj();
            assert!(
                p.points.iter().any(|r| (r.lambda - conj).norm() < 1e-14
                    && r.multiplicity == q.multiplicity
                    && r.chain_length == q.chain_length),
                "missing conjugate of {}",
                q.lambda
            );
        }
    }

    #[test]
    fn resample_preserves_linear_functions() {
        let p: Vec<f64> = (0..=10).map(|i| 3.0 + 2.0 * i as f64 / 10.0).collect();
        let r = resample_linear(&p, 64);
        for (i, v) in r.iter().enumerate() {
            let y = i as f64 / 64.0;
            assert_relative_eq!(*v, 3.0 + 2.0 * y, epsilon = 1e-12);
        }
    }
}
