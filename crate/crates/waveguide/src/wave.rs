//! Power-exponential waves on a cylindrical arm, the energy-flux pairing,
//! flux-normalized bases and augmented evanescent pairs.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cross_section::{CrossSectionSpectrum, PencilPoint};
use crate::error::{Result, WgError};
use crate::quadrature::trapezoid_weights;

/// Energy-flux classification of a wave.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    Incoming,
    Outgoing,
    Unclassified,
}

/// One power-exponential wave exp(i lambda t) sum_l (it)^l/l! c_l(y).
///
/// `poly_coeffs[l]` is the sampled transverse coefficient multiplying
/// (it)^l / l!; scalars (normalization, combination weights) are folded into
/// the coefficients so evaluation needs nothing else.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WaveSpec {
    pub arm_id: usize,
    pub lambda: Complex64,
    /// (sigma, j): position in the Jordan chain and kernel index.
    pub chain: (usize, usize),
    pub poly_coeffs: Vec<Vec<Complex64>>,
    pub direction: Direction,
    /// Scalar applied to the raw unit-L2 chain wave to reach this one.
    pub normalization: Complex64,
    /// Decay rate along the arm: Im lambda (negative for growing waves).
    pub rate: f64,
    pub transverse_index: usize,
    pub grid_step: f64,
}

/// Values and t-derivatives of a field on one cross-section.
#[derive(Clone, Debug)]
pub struct SectionTrace {
    pub values: Vec<Complex64>,
    pub dt_values: Vec<Complex64>,
    pub grid_step: f64,
}

/// Anything that can be evaluated on the cross-sections of one arm.
pub trait SectionWave {
    fn arm_id(&self) -> usize;
    fn grid_step(&self) -> f64;
    fn n_nodes(&self) -> usize;
    fn trace_at(&self, t: f64) -> SectionTrace;
}

impl SectionWave for WaveSpec {
    fn arm_id(&self) -> usize {
        self.arm_id
    }

    fn grid_step(&self) -> f64 {
        self.grid_step
    }

    fn n_nodes(&self) -> usize {
        self.poly_coeffs.first().map_or(0, |c| c.len())
    }

    fn trace_at(&self, t: f64) -> SectionTrace {
        let n = self.n_nodes();
        let sigma = self.poly_coeffs.len() - 1;
        let e = (Complex64::i() * self.lambda * t).exp();
        // pw[l] = (it)^l / l!
        let mut pw = vec![Complex64::ONE; sigma + 1];
        for l in 1..=sigma {
            pw[l] = pw[l - 1] * Complex64::i() * t / l as f64;
        }
        let mut values = vec![Complex64::ZERO; n];
        let mut dt_values = vec![Complex64::ZERO; n];
        let ilam = Complex64::i() * self.lambda;
        for y in 0..n {
            let mut s0 = Complex64::ZERO;
            let mut s1 = Complex64::ZERO;
            for l in 0..=sigma {
                s0 += pw[l] * self.poly_coeffs[l][y];
                if l >= 1 {
                    s1 += pw[l - 1] * self.poly_coeffs[l][y];
                }
            }
            values[y] = e * s0;
            dt_values[y] = e * (ilam * s0 + Complex64::i() * s1);
        }
        SectionTrace {
            values,
            dt_values,
            grid_step: self.grid_step,
        }
    }
}

/// Formal linear combination of waves on one arm.
///
/// Needed wherever a single exponential cannot represent the object, e.g. the
/// augmented combinations of a decaying and a growing evanescent wave.
#[derive(Clone, Debug)]
pub struct CombinedWave {
    pub parts: Vec<(Complex64, WaveSpec)>,
    pub direction: Direction,
}

impl SectionWave for CombinedWave {
    fn arm_id(&self) -> usize {
        self.parts[0].1.arm_id
    }

    fn grid_step(&self) -> f64 {
        self.parts[0].1.grid_step
    }

    fn n_nodes(&self) -> usize {
        self.parts[0].1.n_nodes()
    }

    fn trace_at(&self, t: f64) -> SectionTrace {
        let n = self.n_nodes();
        let mut values = vec![Complex64::ZERO; n];
        let mut dt_values = vec![Complex64::ZERO; n];
        for (c, w) in &self.parts {
            let tr = w.trace_at(t);
            for i in 0..n {
                values[i] += c * tr.values[i];
                dt_values[i] += c * tr.dt_values[i];
            }
        }
        SectionTrace {
            values,
            dt_values,
            grid_step: self.parts[0].1.grid_step,
        }
    }
}

/// Result of the flux pairing q at one cross-section, with the variation over
/// a second section as a consistency residual.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FluxPairing {
    pub value: Complex64,
    pub cross_section_position: f64,
    pub quadrature_residual: f64,
}

/// Builds the chain wave for one pencil point.
///
/// sigma = 0 is the plain wave exp(i lambda t) phi(y); sigma = 1 exists only
/// on a threshold chain and is the linearly growing associate (it) phi(y).
pub fn make_wave(
    spectrum: &CrossSectionSpectrum,
    point: &PencilPoint,
    sigma: usize,
    j: usize,
) -> Result<WaveSpec> {
    if j >= point.multiplicity {
        return Err(WgError::Invalid(format!(
            "kernel index {j} out of range for multiplicity {}",
            point.multiplicity
        )));
    }
    if sigma >= point.chain_length {
        return Err(WgError::Invalid(format!(
            "chain position {sigma} out of range for chain length {}",
            point.chain_length
        )));
    }
    let phi = &spectrum.entries[point.transverse_index].phi;
    let phi_c: Vec<Complex64> = phi.iter().map(|x| Complex64::new(*x, 0.0)).collect();
    let zero = vec![Complex64::ZERO; phi.len()];
    let poly_coeffs = match sigma {
        0 => vec![phi_c],
        1 => vec![zero, phi_c],
        _ => unreachable!("chain length is at most 2"),
    };
    Ok(WaveSpec {
        arm_id: spectrum.spec.arm_id,
        lambda: point.lambda,
        chain: (sigma, j),
        poly_coeffs,
        direction: Direction::Unclassified,
        normalization: Complex64::ONE,
        rate: point.lambda.im,
        transverse_index: point.transverse_index,
        grid_step: spectrum.grid_step,
    })
}

/// Core quadrature of the flux form on matching traces.
pub fn flux_from_traces(u: &SectionTrace, v: &SectionTrace) -> Complex64 {
    let n = u.values.len();
    assert_eq!(n, v.values.len(), "trace length mismatch");
    let w = trapezoid_weights(n, u.grid_step);
    let mut acc = Complex64::ZERO;
    for i in 0..n {
        acc += w[i] * (u.dt_values[i] * v.values[i].conj() - u.values[i] * v.dt_values[i].conj());
    }
    acc
}

/// Energy-flux pairing q(u, v) at cross-section t = R.
///
/// The residual is |q(R) - q(R')| for a second section R'; it vanishes (to
/// quadrature accuracy) whenever both arguments solve the same homogeneous
/// problem on the arm.
pub fn flux_pairing(u: &dyn SectionWave, v: &dyn SectionWave, r: f64) -> Result<FluxPairing> {
    if u.arm_id() != v.arm_id() {
        return Err(WgError::Invalid(format!(
            "flux pairing across different arms ({} vs {})",
            u.arm_id(),
            v.arm_id()
        )));
    }
    if u.n_nodes() != v.n_nodes() {
        return Err(WgError::Invalid(
            "flux pairing of traces with different transverse grids".into(),
        ));
    }
    let q1 = flux_from_traces(&u.trace_at(r), &v.trace_at(r));
    let r2 = r + 0.75;
    let q2 = flux_from_traces(&u.trace_at(r2), &v.trace_at(r2));
    Ok(FluxPairing {
        value: q1,
        cross_section_position: r,
        quadrature_residual: (q1 - q2).norm(),
    })
}

/// Classifies a wave by the sign of i q(u, u).
pub fn classify(wave: &dyn SectionWave) -> Result<Direction> {
    let q = flux_pairing(wave, wave, 2.0)?;
    let s = (Complex64::i() * q.value).re;
    Ok(if s > 1e-8 {
        Direction::Incoming
    } else if s < -1e-8 {
        Direction::Outgoing
    } else {
        Direction::Unclassified
    })
}

/// Flux-orthonormalized wave basis of the strip, incoming and outgoing halves
/// index-matched.
#[derive(Clone, Debug)]
pub struct NormalizedBasis {
    pub incoming: Vec<WaveSpec>,
    pub outgoing: Vec<WaveSpec>,
    /// Largest entrywise deviation of the full pairing matrix from
    /// diag(-i, ..., -i, +i, ..., +i).
    pub pairing_defect: f64,
}

impl NormalizedBasis {
    pub fn pair_count(&self) -> usize {
        self.incoming.len()
    }
}

const PAIRING_R: f64 = 2.0;

/// Flux-normalizes the chain waves of the real part of the strip.
///
/// Input: the raw chain waves for all real pencil points and threshold
/// chains (one WaveSpec per chain position). Waves with distinct eigenvalues
/// never pair, so they are scaled individually; a threshold chain is
/// diagonalized by the Hermitian eigendecomposition of its 2x2 pairing Gram.
/// Every output has |i q(u, u)| = 1 with the sign of its direction tag, and
/// the combination phase is canonicalized (largest coefficient positive
/// real).
pub fn normalize_basis(waves: Vec<WaveSpec>) -> Result<NormalizedBasis> {
    let mut incoming: Vec<WaveSpec> = Vec::new();
    let mut outgoing: Vec<WaveSpec> = Vec::new();
    if waves.is_empty() {
        return Ok(NormalizedBasis {
            incoming,
            outgoing,
            pairing_defect: 0.0,
        });
    }
    // group by (transverse index, eigenvalue bits); chains share an eigenvalue
    let mut groups: Vec<(usize, u64, u64, Vec<WaveSpec>)> = Vec::new();
    for w in waves {
        if w.lambda.im.abs() > 1e-14 {
            return Err(WgError::Invalid(
                "normalize_basis expects real-eigenvalue (propagating or threshold) waves".into(),
            ));
        }
        let key = (
            w.transverse_index,
            w.lambda.re.to_bits(),
            w.lambda.im.to_bits(),
        );
        if let Some(g) = groups
            .iter_mut()
            .find(|g| (g.0, g.1, g.2) == key)
        {
            g.3.push(w);
        } else {
            groups.push((key.0, key.1, key.2, vec![w]));
        }
    }
    groups.sort_by_key(|g| (g.0, g.2, g.1));
    for (_, _, _, members) in groups {
        match members.len() {
            1 => {
                let w = &members[0];
                let q = flux_pairing(w, w, PAIRING_R)?;
                let s = (Complex64::i() * q.value).re;
                if s.abs() < 1e-8 {
                    return Err(WgError::SingularGram { min_abs_eig: s.abs() });
                }
                let scale = 1.0 / s.abs().sqrt();
                let mut out = scale_wave(w, Complex64::new(scale, 0.0));
                if s > 0.0 {
                    out.direction = Direction::Incoming;
                    incoming.push(out);
                } else {
                    out.direction = Direction::Outgoing;
                    outgoing.push(out);
                }
            }
            2 => {
                // threshold chain: diagonalize the Hermitian form i q
                let mut g = DMatrix::<Complex64>::zeros(2, 2);
                for a in 0..2 {
                    for b in 0..2 {
                        let q = flux_pairing(&members[b], &members[a], PAIRING_R)?;
                        g[(a, b)] = Complex64::i() * q.value;
                    }
                }
                let se = g.symmetric_eigen();
                for idx in 0..2 {
                    let d = se.eigenvalues[idx];
                    if d.abs() < 1e-8 {
                        return Err(WgError::SingularGram { min_abs_eig: d.abs() });
                    }
                    let scale = 1.0 / d.abs().sqrt();
                    let coeffs: Vec<Complex64> =
                        se.eigenvectors.column(idx).iter().map(|c| c * scale).collect();
                    let mut out = combine_chain(&members, &coeffs);
                    canonical_phase(&mut out);
                    if d > 0.0 {
                        out.direction = Direction::Incoming;
                        incoming.push(out);
                    } else {
                        out.direction = Direction::Outgoing;
                        outgoing.push(out);
                    }
                }
            }
            m => {
                return Err(WgError::Invalid(format!(
                    "unexpected chain group of {m} waves at one eigenvalue"
                )));
            }
        }
    }
    if incoming.len() != outgoing.len() {
        return Err(WgError::Invalid(format!(
            "strip basis is unbalanced: {} incoming vs {} outgoing",
            incoming.len(),
            outgoing.len()
        )));
    }
    // verify the canonical symplectic pattern
    let mut defect: f64 = 0.0;
    let all: Vec<&WaveSpec> = incoming.iter().chain(outgoing.iter()).collect();
    let m = incoming.len();
    for (a, wa) in all.iter().enumerate() {
        for (b, wb) in all.iter().enumerate() {
            let q = flux_pairing(*wa, *wb, PAIRING_R)?.value;
            let target = if a == b {
                if a < m {
                    -Complex64::i()
                } else {
                    Complex64::i()
                }
            } else {
                Complex64::ZERO
            };
            defect = defect.max((q - target).norm());
        }
    }
    Ok(NormalizedBasis {
        incoming,
        outgoing,
        pairing_defect: defect,
    })
}

fn scale_wave(w: &WaveSpec, c: Complex64) -> WaveSpec {
    let mut out = w.clone();
    for row in out.poly_coeffs.iter_mut() {
        for v in row.iter_mut() {
            *v *= c;
        }
    }
    out.normalization = w.normalization * c;
    out
}

/// Linear combination of same-eigenvalue chain waves into one WaveSpec.
fn combine_chain(members: &[WaveSpec], coeffs: &[Complex64]) -> WaveSpec {
    let sigma_max = members.iter().map(|w| w.poly_coeffs.len() - 1).max().unwrap();
    let n = members[0].n_nodes();
    let mut poly = vec![vec![Complex64::ZERO; n]; sigma_max + 1];
    for (c, w) in coeffs.iter().zip(members) {
        for (l, row) in w.poly_coeffs.iter().enumerate() {
            for (y, v) in row.iter().enumerate() {
                poly[l][y] += c * v;
            }
        }
    }
    let mut out = members[0].clone();
    out.chain = (sigma_max, members[0].chain.1);
    out.poly_coeffs = poly;
    out.normalization = coeffs[0];
    out
}

/// Rotates the global phase so the largest coefficient is positive real.
fn canonical_phase(w: &mut WaveSpec) {
    let mut best = Complex64::ZERO;
    for row in &w.poly_coeffs {
        for v in row {
            if v.norm_sqr() > best.norm_sqr() + 1e-24 {
                best = *v;
            }
        }
    }
    if best.norm() == 0.0 {
        return;
    }
    let rot = best.conj() / best.norm();
    for row in w.poly_coeffs.iter_mut() {
        for v in row.iter_mut() {
            *v *= rot;
        }
    }
    w.normalization *= rot;
}

/// Builds the flux-dual evanescent pair for a decaying pencil point
/// (lambda = i kappa, kappa > 0): the decaying wave scaled to (2 kappa)^{-1/2}
/// and the growing partner phased so q(decaying, growing) = +i exactly.
pub fn make_evanescent_pair(
    spectrum: &CrossSectionSpectrum,
    point: &PencilPoint,
) -> Result<(WaveSpec, WaveSpec)> {
    if point.lambda.re.abs() > 1e-14 || point.lambda.im <= 0.0 {
        return Err(WgError::Invalid(format!(
            "evanescent pair needs lambda = i kappa with kappa > 0, got {}",
            point.lambda
        )));
    }
    let kappa = point.lambda.im;
    let s = 1.0 / (2.0 * kappa).sqrt();
    let decaying = scale_wave(&make_wave(spectrum, point, 0, 0)?, Complex64::new(s, 0.0));
    let mirror = PencilPoint {
        lambda: -point.lambda,
        ..point.clone()
    };
    let raw = scale_wave(&make_wave(spectrum, &mirror, 0, 0)?, Complex64::new(s, 0.0));
    let q_raw = flux_pairing(&decaying, &raw, PAIRING_R)?.value;
    if q_raw.norm() < 1e-12 {
        return Err(WgError::SingularGram {
            min_abs_eig: q_raw.norm(),
        });
    }
    let c = (Complex64::i() / q_raw).conj();
    let growing = scale_wave(&raw, c);
    let check = flux_pairing(&decaying, &growing, PAIRING_R)?.value;
    let dev = (check - Complex64::i()).norm();
    if dev > 1e-6 {
        return Err(WgError::NotFluxDual { deviation: dev });
    }
    Ok((decaying, growing))
}

/// Augmented combinations of a flux-dual evanescent pair.
///
/// Returns (incoming, outgoing) = 2^{-1/2} (w_nu -+ w_{-nu}) with
/// self-pairings q = -+ i and vanishing cross pairing; their sum is
/// 2^{1/2} times the decaying wave.
pub fn augmented_pairs(
    w_nu: &WaveSpec,
    w_minus_nu: &WaveSpec,
) -> Result<(CombinedWave, CombinedWave)> {
    let q = flux_pairing(w_nu, w_minus_nu, PAIRING_R)?.value;
    let dev = (q - Complex64::i()).norm();
    if dev > 1e-6 {
        return Err(WgError::NotFluxDual { deviation: dev });
    }
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let incoming = CombinedWave {
        parts: vec![(h, w_nu.clone()), (-h, w_minus_nu.clone())],
        direction: Direction::Incoming,
    };
    let outgoing = CombinedWave {
        parts: vec![(h, w_nu.clone()), (h, w_minus_nu.clone())],
        direction: Direction::Outgoing,
    };
    Ok((incoming, outgoing))
}

/// Full pairing matrix of a basis at cross-section R.
pub fn pairing_matrix(basis: &[&dyn SectionWave], r: f64) -> Result<DMatrix<Complex64>> {
    let n = basis.len();
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    for a in 0..n {
        for b in 0..n {
            m[(a, b)] = flux_pairing(basis[a], basis[b], r)?.value;
        }
    }
    Ok(m)
}
