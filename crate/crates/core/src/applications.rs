//! Entanglement witnesses `H = 1 - mu Pi_U` and robustly entangled mixed
//! states supported on highly entangled subspaces.

use nalgebra::SymmetricEigen;
use rayon::prelude::*;
use serde::Serialize;

use crate::construction::SubspaceBasis;
use crate::entanglement::{random_gaussian_vector, trial_rng, ProductState};
use crate::error::{Error, Result};
use crate::tensor::{CMatrix, ResourceCap, C64};

/// Tolerance on witness eigenvalues and state trace checks.
pub const SPECTRAL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Serialize)]
pub struct WitnessReport {
    pub e_lb: f64,
    pub mu: f64,
    pub spectral_norm: f64,
    pub negative_count: usize,
    /// `mu - 1 = E/(1 - E)`, the magnitude of the eigenvalue on `U`.
    pub negative_magnitude: f64,
    /// `E`, which `negative_magnitude` always dominates.
    pub claimed_magnitude_bound: f64,
    /// Largest distance of an eigenvalue from `{1, 1 - mu}`.
    pub eigenvalue_defect: f64,
    /// Unit spectral norm is only expected for `E <= 1/2`.
    pub unit_norm_expected: bool,
}

fn check_e(e_lb: f64) -> Result<()> {
    if !(e_lb > 0.0 && e_lb < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "E must lie in (0, 1), got {e_lb}"
        )));
    }
    Ok(())
}

/// Builds `H = 1 - Pi_U / (1 - E)` and checks its spectrum.
pub fn build_witness(
    u: &SubspaceBasis,
    e_lb: f64,
    cap: &ResourceCap,
) -> Result<(CMatrix, WitnessReport)> {
    check_e(e_lb)?;
    let n = u.ambient().total();
    cap.check_square("witness", n as u128)?;
    let mu = 1.0 / (1.0 - e_lb);
    let witness = CMatrix::identity(n, n) - u.projector() * C64::new(mu, 0.0);

    let eig = SymmetricEigen::new(witness.clone());
    let neg = 1.0 - mu;
    let mut defect: f64 = 0.0;
    let mut negative_count = 0;
    for &l in eig.eigenvalues.iter() {
        let (d_pos, d_neg) = ((l - 1.0).abs(), (l - neg).abs());
        if d_neg < d_pos {
            negative_count += 1;
        }
        defect = defect.max(d_pos.min(d_neg));
    }
    let spectral_norm = eig.eigenvalues.iter().fold(0.0f64, |m, l| m.max(l.abs()));
    if defect > SPECTRAL_TOL || negative_count != u.dim() {
        return Err(Error::BoundViolation(format!(
            "witness spectrum off by {defect:e} with {negative_count} negative eigenvalues for dim U = {}",
            u.dim()
        )));
    }
    let unit_norm_expected = e_lb <= 0.5;
    if unit_norm_expected && (spectral_norm - 1.0).abs() > SPECTRAL_TOL {
        return Err(Error::BoundViolation(format!(
            "witness norm {spectral_norm} is not 1"
        )));
    }
    Ok((
        witness,
        WitnessReport {
            e_lb,
            mu,
            spectral_norm,
            negative_count,
            negative_magnitude: mu - 1.0,
            claimed_magnitude_bound: e_lb,
            eigenvalue_defect: defect,
            unit_norm_expected,
        },
    ))
}

/// `<psi| H |psi>` for a Hermitian `H`.
fn expectation(h: &CMatrix, psi: &crate::tensor::CVector) -> f64 {
    psi.dotc(&(h * psi)).re
}

#[derive(Debug, Clone, Serialize)]
pub struct ProductPositivityReport {
    pub samples: usize,
    pub seed: u64,
    pub min_value: f64,
    /// Samples with witness value below `-1e-9`.
    pub violations: usize,
}

/// Witness values on random product states; a valid witness never goes
/// negative on them.
pub fn product_positivity_check(
    u: &SubspaceBasis,
    witness: &CMatrix,
    samples: usize,
    seed: u64,
) -> Result<ProductPositivityReport> {
    let n = u.ambient().total();
    if witness.shape() != (n, n) {
        return Err(Error::ShapeMismatch(format!(
            "witness is {:?}, ambient dimension {n}",
            witness.shape()
        )));
    }
    let values: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|s| {
            let mut rng = trial_rng(seed, s as u64);
            let phi = ProductState::random(u.ambient(), &mut rng).vector();
            expectation(witness, &phi)
        })
        .collect();
    Ok(ProductPositivityReport {
        samples,
        seed,
        min_value: values.iter().cloned().fold(f64::INFINITY, f64::min),
        violations: values.iter().filter(|&&v| v < -1e-9).count(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RadiusCase {
    /// Maximal completely entangled subspace of `(C^n)^{(x)m}`:
    /// `m^{-(n-1)m/2}`.
    MaximalDimension,
    /// `E = multinomial(md; d, .., d)^{-1}`: `sqrt(E)`.
    MultinomialDegree,
    /// Any other certified `E`: `sqrt(E m^{-m})`.
    General,
}

#[derive(Debug, Clone, Serialize)]
pub struct RadiusCandidate {
    pub case: RadiusCase,
    pub radius: f64,
}

#[derive(Debug, Clone)]
pub struct RobustState {
    /// `Pi_U / dim U`.
    pub rho: CMatrix,
    pub rank: usize,
    pub e_lb: f64,
    /// Largest trace-norm radius among the applicable cases.
    pub radius_trace_norm: Option<f64>,
    pub radius_case: Option<RadiusCase>,
    pub candidates: Vec<RadiusCandidate>,
    pub warnings: Vec<String>,
}

/// The normalized projector onto `U` and the perturbation radius that keeps
/// it entangled, chosen from the construction tag.
pub fn build_robust_state(u: &SubspaceBasis, e_lb: f64, cap: &ResourceCap) -> Result<RobustState> {
    check_e(e_lb)?;
    let n = u.ambient().total();
    cap.check_square("robust state", n as u128)?;
    let rho = u.projector() / C64::new(u.dim() as f64, 0.0);
    let tag = u.tag();
    let mut candidates = Vec::new();
    let mut warnings = Vec::new();

    if let Some((nn, m)) = tag.maximal_dimension_case() {
        let exponent = -(((nn - 1) * m) as f64) / 2.0;
        candidates.push(RadiusCandidate {
            case: RadiusCase::MaximalDimension,
            radius: (m as f64).powf(exponent),
        });
    }
    match (tag.certified_entanglement_lower(), tag.degrees()) {
        (Some(eps), Some(degrees)) => {
            if e_lb > eps * (1.0 + 1e-12) {
                warnings.push(format!(
                    "E = {e_lb} exceeds the construction's certified bound {eps}; radius uses the certified value"
                ));
            }
            let m = degrees.len() as f64;
            if degrees.iter().all(|&d| d == degrees[0]) {
                candidates.push(RadiusCandidate {
                    case: RadiusCase::MultinomialDegree,
                    radius: eps.sqrt(),
                });
            } else {
                candidates.push(RadiusCandidate {
                    case: RadiusCase::General,
                    radius: (eps * m.powf(-m)).sqrt(),
                });
            }
        }
        _ => warnings.push(format!(
            "construction tag {:?} carries no certified bound; radius omitted",
            tag
        )),
    }
    let best = candidates
        .iter()
        .fold(None::<&RadiusCandidate>, |best, c| match best {
            Some(b) if b.radius >= c.radius => Some(b),
            _ => Some(c),
        });
    Ok(RobustState {
        rank: u.dim(),
        e_lb,
        radius_trace_norm: best.map(|c| c.radius),
        radius_case: best.map(|c| c.case),
        candidates,
        warnings,
        rho,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct PerturbationReport {
    pub samples: usize,
    pub seed: u64,
    pub radius: f64,
    pub unperturbed_value: f64,
    /// Perturbed states on which the witness stays negative.
    pub certified: usize,
    pub rate: f64,
    pub min_value: f64,
    pub max_value: f64,
}

/// Random Hermitian matrix with Gaussian entries scaled to trace norm `radius`.
fn random_hermitian(n: usize, radius: f64, rng: &mut rand_chacha::ChaCha20Rng) -> CMatrix {
    let cols: Vec<_> = (0..n).map(|_| random_gaussian_vector(n, rng)).collect();
    let g = CMatrix::from_columns(&cols);
    let h = (&g + g.adjoint()) * C64::new(0.5, 0.0);
    let trace_norm: f64 = SymmetricEigen::new(h.clone())
        .eigenvalues
        .iter()
        .map(|l| l.abs())
        .sum();
    h * C64::new(radius / trace_norm, 0.0)
}

/// `exp(iH)` for Hermitian `H`.
fn unitary_exp(h: CMatrix) -> CMatrix {
    let eig = SymmetricEigen::new(h);
    let phases = eig.eigenvalues.map(|l| C64::from_polar(1.0, l));
    &eig.eigenvectors * CMatrix::from_diagonal(&phases) * eig.eigenvectors.adjoint()
}

/// Sampling probe: `Tr(W e^{iH} rho e^{-iH})` for random Hermitian `H` with
/// `||H||_1` equal to the state's radius. A negative value means the witness
/// still detects entanglement. Sampling cannot prove the radius.
pub fn witness_perturbation_probe(
    state: &RobustState,
    witness: &CMatrix,
    samples: usize,
    seed: u64,
) -> Result<PerturbationReport> {
    let radius = state
        .radius_trace_norm
        .ok_or_else(|| Error::InvalidParameter("state carries no certified radius".into()))?;
    probe_at_radius(state, witness, radius, samples, seed)
}

pub fn probe_at_radius(
    state: &RobustState,
    witness: &CMatrix,
    radius: f64,
    samples: usize,
    seed: u64,
) -> Result<PerturbationReport> {
    if witness.shape() != state.rho.shape() {
        return Err(Error::ShapeMismatch(format!(
            "witness {:?} vs state {:?}",
            witness.shape(),
            state.rho.shape()
        )));
    }
    if !(radius >= 0.0) || !radius.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "radius must be non-negative, got {radius}"
        )));
    }
    let n = state.rho.nrows();
    let value = |rho: &CMatrix| (witness * rho).trace().re;
    let unperturbed_value = value(&state.rho);
    let values: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|s| {
            if radius == 0.0 {
                return unperturbed_value;
            }
            let mut rng = trial_rng(seed, s as u64);
            let u = unitary_exp(random_hermitian(n, radius, &mut rng));
            value(&(&u * &state.rho * u.adjoint()))
        })
        .collect();
    let certified = values.iter().filter(|&&v| v < 0.0).count();
    Ok(PerturbationReport {
        samples,
        seed,
        radius,
        unperturbed_value,
        certified,
        rate: if samples == 0 {
            1.0
        } else {
            certified as f64 / samples as f64
        },
        min_value: values.iter().cloned().fold(f64::INFINITY, f64::min),
        max_value: values.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
    })
}
