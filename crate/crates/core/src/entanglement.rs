//! Geometric measure of entanglement, Rényi entropies and minimum output
//! entropy of subspaces.
//!
//! Both optimizers are multistart local searches. Each trial owns an RNG
//! derived from the master seed and the trial index, trials run in parallel,
//! and the reduction picks the best value with ties going to the lowest trial
//! index, so results do not depend on the thread count.

use nalgebra::SymmetricEigen;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::construction::{block_projector, BlockProjector, SubspaceBasis};
use crate::error::{Error, Result};
use crate::tensor::{
    big_to_f64, binomial, multinomial, product_vector, BipartiteLayout, Bipartition, CMatrix,
    CVector, ResourceCap, SchmidtSpectrum, TensorShape, C64,
};

/// Slack allowed between a certified lower bound and a numerical estimate.
pub const SANDWICH_SLACK: f64 = 1e-9;

/// RNG for trial `index` of a run seeded with `seed`.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Normalized complex Gaussian vector.
pub fn random_unit_vector(n: usize, rng: &mut ChaCha20Rng) -> CVector {
    let v = random_gaussian_vector(n, rng);
    let norm = v.norm();
    v / C64::new(norm, 0.0)
}

pub fn random_gaussian_vector(n: usize, rng: &mut ChaCha20Rng) -> CVector {
    CVector::from_fn(n, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        C64::new(re, im)
    })
}

// ---------------------------------------------------------------------------
// Rényi entropy
// ---------------------------------------------------------------------------

/// Rényi `p`-entropy in bits; `p = 1` is the Shannon limit with `0 log 0 = 0`.
pub fn renyi_entropy(lambdas: &[f64], p: f64) -> Result<f64> {
    if !(p > 0.0) || !p.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "Rényi order must be positive, got {p}"
        )));
    }
    if (p - 1.0).abs() < 1e-15 {
        let h: f64 = lambdas
            .iter()
            .filter(|&&l| l > 0.0)
            .map(|&l| -l * l.log2())
            .sum();
        return Ok(h.max(0.0));
    }
    let s: f64 = lambdas
        .iter()
        .filter(|&&l| l > 0.0)
        .map(|&l| l.powf(p))
        .sum();
    Ok((s.log2() / (1.0 - p)).max(0.0))
}

impl SchmidtSpectrum {
    pub fn renyi(&self, p: f64) -> Result<f64> {
        renyi_entropy(&self.lambdas, p)
    }
}

/// `(1/(1-p)) log2(E^p + (1-E)^p)`, the entropy lower bound implied by a
/// geometric-measure bound `E`.
pub fn hmin_lower_bound(e_lb: f64, p: f64) -> Result<f64> {
    if !(e_lb > 0.0 && e_lb < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "E must lie in (0, 1), got {e_lb}"
        )));
    }
    if !(p > 1.0) || !p.is_finite() {
        return Err(Error::InvalidParameter(format!("p must exceed 1, got {p}")));
    }
    Ok(two_point_renyi(e_lb, p))
}

/// Rényi entropy of the spectrum `(eps, 1 - eps)`, evaluated through `ln_1p`
/// so that tiny `eps` keeps full relative precision.
pub(crate) fn two_point_renyi(eps: f64, p: f64) -> f64 {
    let t = (eps / (1.0 - eps)).powf(p);
    (p * (-eps).ln_1p() + t.ln_1p()) / ((1.0 - p) * std::f64::consts::LN_2)
}

/// `(p/(1-p)) log2(dim U / (n_A n_B))`.
pub fn hmin_tensor_upper_bound(dim_u: u64, n_a: u64, n_b: u64, p: f64) -> Result<f64> {
    let total = (n_a as u128) * (n_b as u128);
    if dim_u == 0 || dim_u as u128 > total {
        return Err(Error::InvalidParameter(format!(
            "dim U = {dim_u} must lie in [1, {total}]"
        )));
    }
    if !(p > 1.0) || !p.is_finite() {
        return Err(Error::InvalidParameter(format!("p must exceed 1, got {p}")));
    }
    let ratio = dim_u as f64 / total as f64;
    Ok(((p / (1.0 - p)) * ratio.log2()).max(0.0))
}

// ---------------------------------------------------------------------------
// geometric measure
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptimizerOptions {
    pub trials: usize,
    pub max_iters: usize,
    /// Relative objective improvement below which a trial stops.
    pub tol: f64,
    pub seed: u64,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        OptimizerOptions {
            trials: 64,
            max_iters: 500,
            tol: 1e-12,
            seed: 0,
        }
    }
}

/// One unit vector per tensor factor.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductState {
    pub factors: Vec<CVector>,
}

impl ProductState {
    pub fn random(shape: &TensorShape, rng: &mut ChaCha20Rng) -> Self {
        ProductState {
            factors: shape
                .dims()
                .iter()
                .map(|&n| random_unit_vector(n, rng))
                .collect(),
        }
    }

    pub fn vector(&self) -> CVector {
        product_vector(&self.factors)
    }
}

/// `<phi| Pi_U |phi>` for a product state.
pub fn product_overlap(u: &SubspaceBasis, state: &ProductState) -> f64 {
    (u.basis().adjoint() * state.vector()).norm_squared()
}

/// Outcome of a single alternating maximization.
#[derive(Debug, Clone)]
pub struct AlsTrial {
    pub objective: f64,
    pub state: ProductState,
    pub sweeps: usize,
    pub converged: bool,
    /// Objective after each full sweep, starting with the initial value.
    pub trace: Vec<f64>,
}

/// Top eigenpair of a Hermitian matrix.
fn top_eigenpair(m: CMatrix) -> (f64, CVector) {
    let eig = SymmetricEigen::new(m);
    let (idx, val) =
        eig.eigenvalues
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, &v)| {
                if v > best.1 {
                    (i, v)
                } else {
                    best
                }
            });
    let v = eig.eigenvectors.column(idx).into_owned();
    let n = v.norm();
    (val, v / C64::new(n, 0.0))
}

/// Alternating maximization of `||Pi_U (phi_1 (x) .. (x) phi_m)||^2`: each
/// step replaces one factor by the top eigenvector of the Hermitian matrix
/// obtained by contracting the basis against the other factors.
pub fn als_trial(u: &SubspaceBasis, init: ProductState, max_iters: usize, tol: f64) -> AlsTrial {
    let shape = u.ambient();
    let digits = shape.digit_table();
    let dims = shape.dims().to_vec();
    let m = dims.len();
    let ell = u.dim();
    let basis = u.basis();
    let mut state = init;
    let mut objective = product_overlap(u, &state);
    let mut trace = vec![objective];
    let mut converged = false;
    let mut sweeps = 0;
    let mut weights = vec![C64::new(0.0, 0.0); digits.len()];

    while sweeps < max_iters {
        sweeps += 1;
        for i in 0..m {
            for (w, dg) in weights.iter_mut().zip(&digits) {
                *w = (0..m)
                    .filter(|&j| j != i)
                    .fold(C64::new(1.0, 0.0), |acc, j| {
                        acc * state.factors[j][dg[j]].conj()
                    });
            }
            let mut contracted = CMatrix::zeros(dims[i], ell);
            for k in 0..ell {
                for (idx, dg) in digits.iter().enumerate() {
                    contracted[(dg[i], k)] += basis[(idx, k)] * weights[idx];
                }
            }
            let gram = &contracted * contracted.adjoint();
            let (_, vec) = top_eigenpair(gram);
            state.factors[i] = vec;
        }
        let next = product_overlap(u, &state);
        trace.push(next);
        let improvement = next - objective;
        objective = next.max(objective);
        if improvement <= tol * objective.max(f64::MIN_POSITIVE) {
            converged = true;
            break;
        }
    }
    AlsTrial {
        objective,
        state,
        sweeps,
        converged,
        trace,
    }
}

#[derive(Debug, Clone)]
pub struct EntanglementEstimate {
    pub certified_lower: Option<f64>,
    /// `1 -` best product overlap found; an upper bound on `E(U)`.
    pub numerical_upper: f64,
    pub best_product_state: ProductState,
    pub best_trial: usize,
    pub trials: usize,
    pub converged_trials: usize,
    pub seed: u64,
    /// Sweeps in which the objective decreased by more than rounding noise.
    pub monotonicity_violations: usize,
}

impl EntanglementEstimate {
    /// Attaches a certified lower bound, failing if it sits above the
    /// numerical upper bound.
    pub fn attach_certified_lower(&mut self, lower: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&lower) {
            return Err(Error::InvalidParameter(format!(
                "certified bound {lower} outside [0, 1]"
            )));
        }
        if lower > self.numerical_upper + SANDWICH_SLACK {
            return Err(Error::BoundViolation(format!(
                "certified lower bound {lower} exceeds numerical upper bound {}",
                self.numerical_upper
            )));
        }
        self.certified_lower = Some(lower);
        Ok(())
    }
}

/// Multistart estimate of `E(U) = 1 - max_phi <phi|Pi_U|phi>` over product
/// states. Attaches the construction's certified bound when the subspace
/// carries one.
pub fn geometric_measure(
    u: &SubspaceBasis,
    opts: &OptimizerOptions,
) -> Result<EntanglementEstimate> {
    if u.dim() == 0 {
        return Err(Error::InvalidParameter(
            "subspace is zero-dimensional".into(),
        ));
    }
    if opts.trials == 0 {
        return Err(Error::InvalidParameter("need at least one trial".into()));
    }
    let runs: Vec<AlsTrial> = (0..opts.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(opts.seed, t as u64);
            let init = ProductState::random(u.ambient(), &mut rng);
            als_trial(u, init, opts.max_iters, opts.tol)
        })
        .collect();
    let best = best_index(runs.iter().map(|r| r.objective), |a, b| a > b);
    let violations = runs
        .iter()
        .flat_map(|r| r.trace.windows(2).map(|w| w[1] < w[0] - 1e-12))
        .filter(|&v| v)
        .count();
    let mut est = EntanglementEstimate {
        certified_lower: None,
        numerical_upper: (1.0 - runs[best].objective).clamp(0.0, 1.0),
        best_product_state: runs[best].state.clone(),
        best_trial: best,
        trials: opts.trials,
        converged_trials: runs.iter().filter(|r| r.converged).count(),
        seed: opts.seed,
        monotonicity_violations: violations,
    };
    if let Some(lb) = u.certified_entanglement_lower() {
        est.attach_certified_lower(lb)?;
    }
    Ok(est)
}

/// Index of the best value; ties go to the lowest index.
fn best_index(values: impl Iterator<Item = f64>, better: impl Fn(f64, f64) -> bool) -> usize {
    let mut best = (0, f64::NAN);
    for (i, v) in values.enumerate() {
        if i == 0 || better(v, best.1) {
            best = (i, v);
        }
    }
    best.0
}

// ---------------------------------------------------------------------------
// minimum output entropy
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct EntropyEstimate {
    pub p: f64,
    /// Best entropy found; an upper bound on `H_min,p(U)`.
    pub value_upper: f64,
    pub argmin: CVector,
    pub bound_lower: Option<f64>,
    pub bipartition: Bipartition,
    pub trials: usize,
    pub converged_trials: usize,
    pub seed: u64,
}

/// Rényi entropy of `B c` across a fixed cut, with its Wirtinger gradient in `c`.
struct EntropyObjective<'a> {
    basis: &'a CMatrix,
    layout: BipartiteLayout,
    p: f64,
}

impl EntropyObjective<'_> {
    fn value(&self, c: &CVector) -> f64 {
        let psi = self.basis * c;
        let m = self.layout.reshape(&psi);
        let rho = if m.nrows() <= m.ncols() {
            &m * m.adjoint()
        } else {
            m.adjoint() * &m
        };
        let eig = SymmetricEigen::new(rho);
        let lambdas: Vec<f64> = eig.eigenvalues.iter().map(|&l| l.max(0.0)).collect();
        renyi_entropy(&lambdas, self.p).unwrap_or(f64::INFINITY)
    }

    /// Value and gradient with respect to `conj(c)`.
    fn value_and_gradient(&self, c: &CVector) -> (f64, CVector) {
        let psi = self.basis * c;
        let m = self.layout.reshape(&psi);
        let left = m.nrows() <= m.ncols();
        let rho = if left {
            &m * m.adjoint()
        } else {
            m.adjoint() * &m
        };
        let eig = SymmetricEigen::new(rho);
        let lambdas: Vec<f64> = eig.eigenvalues.iter().map(|&l| l.max(0.0)).collect();
        let value = renyi_entropy(&lambdas, self.p).unwrap_or(f64::INFINITY);
        let ln2 = std::f64::consts::LN_2;
        let scale: Vec<f64> = if (self.p - 1.0).abs() < 1e-15 {
            lambdas
                .iter()
                .map(|&l| {
                    if l > 1e-300 {
                        -(l.ln() + 1.0) / ln2
                    } else {
                        0.0
                    }
                })
                .collect()
        } else {
            let s: f64 = lambdas
                .iter()
                .filter(|&&l| l > 0.0)
                .map(|&l| l.powf(self.p))
                .sum();
            lambdas
                .iter()
                .map(|&l| {
                    if l > 1e-300 {
                        self.p * l.powf(self.p - 1.0) / ((1.0 - self.p) * s * ln2)
                    } else {
                        0.0
                    }
                })
                .collect()
        };
        let v = &eig.eigenvectors;
        let f_rho =
            v * CMatrix::from_diagonal(&CVector::from_iterator(
                scale.len(),
                scale.iter().map(|&x| C64::new(x, 0.0)),
            )) * v.adjoint();
        let grad_m = if left { f_rho * &m } else { &m * f_rho };
        let mut grad_psi = CVector::zeros(psi.len());
        for (g, &(r, col)) in grad_psi.iter_mut().zip(&self.layout.positions) {
            *g = grad_m[(r, col)];
        }
        (value, self.basis.adjoint() * grad_psi)
    }
}

struct DescentOutcome {
    value: f64,
    coeffs: CVector,
    converged: bool,
}

/// Riemannian gradient descent on the unit sphere with Armijo backtracking.
fn sphere_descent(
    obj: &EntropyObjective,
    mut c: CVector,
    max_iters: usize,
    tol: f64,
) -> DescentOutcome {
    let mut step = 1.0;
    let (mut value, mut grad) = obj.value_and_gradient(&c);
    let mut converged = false;
    for _ in 0..max_iters {
        let radial = c.dotc(&grad);
        let tangent = &grad - &c * radial;
        let gnorm2 = tangent.norm_squared();
        if gnorm2 < 1e-28 {
            converged = true;
            break;
        }
        let mut accepted = None;
        let mut t = step * 2.0;
        for _ in 0..60 {
            let trial = &c - &tangent * C64::new(t, 0.0);
            let trial = &trial / C64::new(trial.norm(), 0.0);
            let v = obj.value(&trial);
            if v <= value - 1e-4 * t * gnorm2 {
                accepted = Some((trial, v));
                break;
            }
            t *= 0.5;
        }
        let Some((next, next_value)) = accepted else {
            converged = true;
            break;
        };
        step = t;
        let improvement = value - next_value;
        c = next;
        let (v, g) = obj.value_and_gradient(&c);
        value = v;
        grad = g;
        if improvement <= tol * value.abs().max(1e-12) {
            converged = true;
            break;
        }
    }
    DescentOutcome {
        value,
        coeffs: c,
        converged,
    }
}

/// Multistart minimization of the Rényi `p`-entropy over unit vectors of `U`
/// across `cut`. The result is an upper bound on `H_min,p(U)`. When
/// `certified_e` is given and `p > 1`, the implied lower bound is attached and
/// checked against the estimate.
pub fn min_output_entropy(
    u: &SubspaceBasis,
    p: f64,
    cut: &Bipartition,
    opts: &OptimizerOptions,
    certified_e: Option<f64>,
) -> Result<EntropyEstimate> {
    if !(p > 0.0) || !p.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "Rényi order must be positive, got {p}"
        )));
    }
    if u.dim() == 0 {
        return Err(Error::InvalidParameter(
            "subspace is zero-dimensional".into(),
        ));
    }
    if opts.trials == 0 {
        return Err(Error::InvalidParameter("need at least one trial".into()));
    }
    let layout = BipartiteLayout::new(u.ambient(), cut)?;
    let obj = EntropyObjective {
        basis: u.basis(),
        layout,
        p,
    };
    let runs: Vec<DescentOutcome> = (0..opts.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(opts.seed, t as u64);
            let c0 = random_unit_vector(u.dim(), &mut rng);
            sphere_descent(&obj, c0, opts.max_iters, opts.tol)
        })
        .collect();
    let best = best_index(runs.iter().map(|r| r.value), |a, b| a < b);
    let bound_lower = match certified_e {
        Some(e) if p > 1.0 => Some(hmin_lower_bound(e, p)?),
        _ => None,
    };
    let est = EntropyEstimate {
        p,
        value_upper: runs[best].value,
        argmin: u.basis() * &runs[best].coeffs,
        bound_lower,
        bipartition: cut.clone(),
        trials: opts.trials,
        converged_trials: runs.iter().filter(|r| r.converged).count(),
        seed: opts.seed,
    };
    if let Some(lb) = bound_lower {
        if est.value_upper < lb - SANDWICH_SLACK {
            return Err(Error::BoundViolation(format!(
                "entropy estimate {} below certified lower bound {lb}",
                est.value_upper
            )));
        }
    }
    Ok(est)
}

// ---------------------------------------------------------------------------
// U (x) conj(U)
// ---------------------------------------------------------------------------

/// `(1/sqrt(l)) sum_k u_k (x) conj(u_k)` with factors ordered `(A, A', B, B')`,
/// so the `(AA')|(BB')` cut is `{0, 1} | {2, 3}`.
#[derive(Debug, Clone)]
pub struct CanonicalState {
    pub vector: CVector,
    pub shape: TensorShape,
    pub cut: Bipartition,
}

pub fn canonical_tensor_state(u: &SubspaceBasis, cap: &ResourceCap) -> Result<CanonicalState> {
    let dims = u.ambient().dims();
    if dims.len() != 2 {
        return Err(Error::InvalidParameter(format!(
            "canonical state needs a bipartite subspace, got {} factors",
            dims.len()
        )));
    }
    if u.dim() == 0 {
        return Err(Error::InvalidParameter(
            "subspace is zero-dimensional".into(),
        ));
    }
    let (na, nb) = (dims[0], dims[1]);
    let n = u.ambient().total();
    cap.check("canonical tensor state", (n as u128) * (n as u128))?;
    let shape = TensorShape::new(vec![na, na, nb, nb])?;
    let mut v = CVector::zeros(n * n);
    let scale = 1.0 / (u.dim() as f64).sqrt();
    let basis = u.basis();
    for k in 0..u.dim() {
        for a in 0..na {
            for b in 0..nb {
                let x = basis[(a * nb + b, k)];
                if x == C64::new(0.0, 0.0) {
                    continue;
                }
                for a2 in 0..na {
                    for b2 in 0..nb {
                        let y = basis[(a2 * nb + b2, k)].conj();
                        v[shape.linear(&[a, a2, b, b2])] += x * y * scale;
                    }
                }
            }
        }
    }
    Ok(CanonicalState {
        vector: v,
        shape,
        cut: Bipartition::new(vec![0, 1], vec![2, 3]),
    })
}

// ---------------------------------------------------------------------------
// product bounds on symmetric projections
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct ProductBoundReport {
    pub a: usize,
    pub degrees: Vec<u32>,
    pub samples: usize,
    pub seed: u64,
    /// `multinomial(d_1, .., d_m)^{-1/2}`.
    pub bound: f64,
    pub min_ratio: f64,
    pub violations: usize,
}

/// `||Pi_{a,d}(psi_1 (x) .. (x) psi_m)|| / prod ||psi_i||` with each `psi_i`
/// given in monomial coordinates of `S^{d_i}(C^a)`.
pub fn projected_product_ratio(bp: &BlockProjector, factors: &[CVector]) -> Result<f64> {
    if factors.len() != bp.block_shape.factors() {
        return Err(Error::ShapeMismatch(format!(
            "{} factors for {} blocks",
            factors.len(),
            bp.block_shape.factors()
        )));
    }
    for (i, (f, &n)) in factors.iter().zip(bp.block_shape.dims()).enumerate() {
        if f.len() != n {
            return Err(Error::ShapeMismatch(format!(
                "factor {i} has length {}, expected {n}",
                f.len()
            )));
        }
    }
    let norms: f64 = factors.iter().map(|f| f.norm()).product();
    let x = product_vector(factors);
    // coordinate_rows has orthonormal rows, so ||Pi x|| = ||W x||
    Ok((&bp.coordinate_rows * x).norm() / norms)
}

/// Samples Gaussian symmetric tensors and checks the multinomial lower bound
/// on the norm of their symmetrized product.
pub fn multipartite_overlap_bound_check(
    a: usize,
    dvec: &[u32],
    samples: usize,
    seed: u64,
    cap: &ResourceCap,
) -> Result<ProductBoundReport> {
    let bp = block_projector(a, dvec, cap)?;
    let parts: Vec<u64> = dvec.iter().map(|&d| d as u64).collect();
    let bound = 1.0 / big_to_f64(&multinomial(&parts)).sqrt();
    let dims = bp.block_shape.dims().to_vec();
    let ratios: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|s| {
            let mut rng = trial_rng(seed, s as u64);
            let factors: Vec<CVector> = dims
                .iter()
                .map(|&n| random_gaussian_vector(n, &mut rng))
                .collect();
            projected_product_ratio(&bp, &factors).expect("shapes agree")
        })
        .collect();
    Ok(ProductBoundReport {
        a,
        degrees: dvec.to_vec(),
        samples,
        seed,
        bound,
        min_ratio: ratios.iter().cloned().fold(f64::INFINITY, f64::min),
        violations: ratios.iter().filter(|&&r| r < bound - 1e-9).count(),
    })
}

/// Two-factor case: bound `binom(d1 + d2, d1)^{-1/2}`.
pub fn beauzamy_sample_check(
    a: usize,
    d1: u32,
    d2: u32,
    samples: usize,
    seed: u64,
    cap: &ResourceCap,
) -> Result<ProductBoundReport> {
    let mut report = multipartite_overlap_bound_check(a, &[d1, d2], samples, seed, cap)?;
    report.bound = 1.0 / big_to_f64(&binomial(d1 as u64 + d2 as u64, d1 as u64)).sqrt();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::{build_kernel_subspace, build_uc, ConstraintSystem, ConstructionTag};
    use crate::tensor::{basis_vector, schmidt};
    use proptest::prelude::*;
    use rand::Rng;

    fn cap() -> ResourceCap {
        ResourceCap::default()
    }

    fn singlet() -> SubspaceBasis {
        build_uc(&ConstraintSystem::ones(&[2, 2]).unwrap()).unwrap()
    }

    fn span(vectors: &[CVector], dims: Vec<usize>) -> SubspaceBasis {
        let mut b = CMatrix::zeros(vectors[0].len(), vectors.len());
        for (j, v) in vectors.iter().enumerate() {
            b.set_column(j, v);
        }
        SubspaceBasis::new(
            TensorShape::new(dims).unwrap(),
            b,
            ConstructionTag::Raw {
                note: "test".into(),
            },
        )
        .unwrap()
    }

    fn quick() -> OptimizerOptions {
        OptimizerOptions {
            trials: 16,
            ..OptimizerOptions::default()
        }
    }

    #[test]
    fn renyi_examples() {
        assert!((renyi_entropy(&[0.5, 0.5], 2.0).unwrap() - 1.0).abs() < 1e-15);
        for p in [0.5, 1.0, 2.0, 7.0] {
            assert_eq!(renyi_entropy(&[1.0, 0.0], p).unwrap(), 0.0);
        }
        assert!((renyi_entropy(&[0.25; 4], 3.0).unwrap() - 2.0).abs() < 1e-14);
        assert!((renyi_entropy(&[0.25; 4], 1.0).unwrap() - 2.0).abs() < 1e-14);
        assert!(renyi_entropy(&[0.5, 0.5], 0.0).is_err());
        assert!(renyi_entropy(&[0.5, 0.5], -1.0).is_err());
    }

    #[test]
    fn renyi_is_continuous_at_one() {
        let l = [0.7, 0.2, 0.1];
        let h1 = renyi_entropy(&l, 1.0).unwrap();
        let near = renyi_entropy(&l, 1.0 + 1e-7).unwrap();
        assert!((h1 - near).abs() < 1e-6);
    }

    #[test]
    fn lower_bound_examples() {
        let v = hmin_lower_bound(1.0 / 6.0, 2.0).unwrap();
        assert!((v - (36.0f64 / 26.0).log2()).abs() < 1e-14);
        assert!((v - 0.469_485_283_301_220_2).abs() < 1e-12);
        assert!(hmin_lower_bound(1e-12, 2.0).unwrap() < 1e-10);
        assert!((hmin_lower_bound(0.5, 2.0).unwrap() - 1.0).abs() < 1e-14);
        assert!(hmin_lower_bound(0.0, 2.0).is_err());
        assert!(hmin_lower_bound(0.5, 1.0).is_err());
    }

    #[test]
    fn tensor_upper_bound_examples() {
        let v = hmin_tensor_upper_bound(3676, 71, 71, 2.0).unwrap();
        assert!((v - 2.0 * (5041.0f64 / 3676.0).log2()).abs() < 1e-13);
        assert!((v - 0.911_146_375_440_659_5).abs() < 1e-12);
        assert_eq!(hmin_tensor_upper_bound(9, 3, 3, 2.0).unwrap(), 0.0);
        assert!((hmin_tensor_upper_bound(1, 2, 2, 2.0).unwrap() - 4.0).abs() < 1e-14);
        assert!(hmin_tensor_upper_bound(0, 2, 2, 2.0).is_err());
        assert!(hmin_tensor_upper_bound(5, 2, 2, 2.0).is_err());
    }

    /// Brute-force product overlap with the singlet over a grid of
    /// parametrized product states.
    fn brute_force_singlet_overlap() -> f64 {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let singlet = [0.0, s, -s, 0.0];
        let steps = 40;
        let mut best: f64 = 0.0;
        for i in 0..=steps {
            let t1 = std::f64::consts::PI * i as f64 / steps as f64;
            for j in 0..=steps {
                let t2 = std::f64::consts::PI * j as f64 / steps as f64;
                for k in 0..steps {
                    let ph = 2.0 * std::f64::consts::PI * k as f64 / steps as f64;
                    let a = [
                        C64::new((t1 / 2.0).cos(), 0.0),
                        C64::new((t1 / 2.0).sin(), 0.0),
                    ];
                    let b = [
                        C64::new((t2 / 2.0).cos(), 0.0),
                        C64::from_polar((t2 / 2.0).sin(), ph),
                    ];
                    let mut ov = C64::new(0.0, 0.0);
                    for x in 0..2 {
                        for y in 0..2 {
                            ov += (a[x] * b[y]).conj() * singlet[2 * x + y];
                        }
                    }
                    best = best.max(ov.norm_sqr());
                }
            }
        }
        best
    }

    #[test]
    fn geometric_measure_of_singlet() {
        let oracle = brute_force_singlet_overlap();
        assert!((oracle - 0.5).abs() < 1e-12);
        let est = geometric_measure(&singlet(), &quick()).unwrap();
        assert!((est.numerical_upper - (1.0 - oracle)).abs() < 1e-6);
        assert_eq!(est.monotonicity_violations, 0);
    }

    #[test]
    fn geometric_measure_of_full_space_is_zero() {
        let full = span(
            &(0..4).map(|i| basis_vector(4, i)).collect::<Vec<_>>(),
            vec![2, 2],
        );
        let est = geometric_measure(&full, &quick()).unwrap();
        assert!(est.numerical_upper < 1e-9);
    }

    #[test]
    fn geometric_measure_respects_certified_bound() {
        let u = build_kernel_subspace(2, &[2, 2], &[3, 3], &cap()).unwrap();
        let est = geometric_measure(&u, &OptimizerOptions::default()).unwrap();
        assert_eq!(est.certified_lower, Some(1.0 / 6.0));
        assert!(est.numerical_upper >= 1.0 / 6.0 - 1e-9);
        assert_eq!(est.monotonicity_violations, 0);
    }

    #[test]
    fn attach_rejects_inconsistent_bound() {
        let full = span(
            &(0..4).map(|i| basis_vector(4, i)).collect::<Vec<_>>(),
            vec![2, 2],
        );
        let mut est = geometric_measure(&full, &quick()).unwrap();
        assert!(matches!(
            est.attach_certified_lower(0.3),
            Err(Error::BoundViolation(_))
        ));
    }

    #[test]
    fn als_objective_never_decreases() {
        let u = build_kernel_subspace(2, &[1, 1, 1], &[2, 2, 2], &cap()).unwrap();
        for t in 0..8 {
            let mut rng = trial_rng(5, t);
            let init = ProductState::random(u.ambient(), &mut rng);
            let run = als_trial(&u, init, 200, 1e-14);
            for w in run.trace.windows(2) {
                assert!(w[1] >= w[0] - 1e-12, "{:?}", run.trace);
            }
        }
    }

    #[test]
    fn geometric_measure_is_deterministic() {
        let u = build_kernel_subspace(2, &[2, 2], &[3, 3], &cap()).unwrap();
        let a = geometric_measure(&u, &quick()).unwrap();
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let b = pool.install(|| geometric_measure(&u, &quick()).unwrap());
        assert_eq!(a.numerical_upper.to_bits(), b.numerical_upper.to_bits());
        assert_eq!(a.best_trial, b.best_trial);
    }

    #[test]
    fn min_entropy_examples() {
        let cut = Bipartition::new(vec![0], vec![1]);
        let est = min_output_entropy(&singlet(), 2.0, &cut, &quick(), None).unwrap();
        assert!((est.value_upper - 1.0).abs() < 1e-6);

        let prod = span(&[basis_vector(4, 0)], vec![2, 2]);
        for p in [0.5, 1.0, 2.0] {
            let est = min_output_entropy(&prod, p, &cut, &quick(), None).unwrap();
            assert!(est.value_upper.abs() < 1e-12);
        }
        assert!(min_output_entropy(&prod, 0.0, &cut, &quick(), None).is_err());
    }

    #[test]
    fn min_entropy_of_kernel_subspace_respects_bound() {
        let u = build_kernel_subspace(2, &[2, 2], &[3, 3], &cap()).unwrap();
        let cut = Bipartition::new(vec![0], vec![1]);
        for p in [1.25, 1.5, 2.0, 3.0] {
            let est = min_output_entropy(&u, p, &cut, &quick(), Some(1.0 / 6.0)).unwrap();
            let lb = hmin_lower_bound(1.0 / 6.0, p).unwrap();
            assert_eq!(est.bound_lower, Some(lb));
            assert!(est.value_upper >= lb - 1e-6);
            let check = schmidt(&est.argmin, u.ambient(), &cut).unwrap();
            assert!((check.renyi(p).unwrap() - est.value_upper).abs() < 1e-9);
        }
    }

    #[test]
    fn entropy_gradient_matches_finite_differences() {
        let u = build_kernel_subspace(2, &[2, 2], &[3, 3], &cap()).unwrap();
        let layout =
            BipartiteLayout::new(u.ambient(), &Bipartition::new(vec![0], vec![1])).unwrap();
        for p in [1.0, 1.5, 2.0, 3.0] {
            let obj = EntropyObjective {
                basis: u.basis(),
                layout: layout.clone(),
                p,
            };
            let mut rng = trial_rng(11, 0);
            let c = random_unit_vector(u.dim(), &mut rng);
            let (_, g) = obj.value_and_gradient(&c);
            let h = 1e-6;
            for k in 0..u.dim() {
                for dir in [C64::new(1.0, 0.0), C64::new(0.0, 1.0)] {
                    let mut cp = c.clone();
                    cp[k] += dir * h;
                    let mut cm = c.clone();
                    cm[k] -= dir * h;
                    let fd = (obj.value(&cp) - obj.value(&cm)) / (2.0 * h);
                    // directional derivative along dir = 2 Re(conj(dir) g_k)
                    let analytic = 2.0 * (dir.conj() * g[k]).re;
                    assert!(
                        (fd - analytic).abs() < 1e-5,
                        "p={p} k={k}: {fd} vs {analytic}"
                    );
                }
            }
        }
    }

    #[test]
    fn canonical_state_examples() {
        let st = canonical_tensor_state(&singlet(), &cap()).unwrap();
        let sp = schmidt(&st.vector, &st.shape, &st.cut).unwrap();
        for l in &sp.lambdas {
            assert!((l - 0.25).abs() < 1e-12);
        }
        assert!((sp.renyi(2.0).unwrap() - 2.0).abs() < 1e-12);

        let prod = span(&[basis_vector(4, 0)], vec![2, 2]);
        let st = canonical_tensor_state(&prod, &cap()).unwrap();
        let sp = schmidt(&st.vector, &st.shape, &st.cut).unwrap();
        assert!(sp.renyi(2.0).unwrap().abs() < 1e-12);

        let u = build_kernel_subspace(2, &[2, 2], &[3, 3], &cap()).unwrap();
        let st = canonical_tensor_state(&u, &cap()).unwrap();
        let sp = schmidt(&st.vector, &st.shape, &st.cut).unwrap();
        let bound = hmin_tensor_upper_bound(4, 3, 3, 2.0).unwrap();
        assert!((bound - 2.339_850_002_884_624_7).abs() < 1e-12);
        assert!(sp.renyi(2.0).unwrap() <= bound + 1e-9);
    }

    #[test]
    fn canonical_state_rejects_multipartite() {
        let u = build_kernel_subspace(2, &[1, 1, 1], &[2, 2, 2], &cap()).unwrap();
        assert!(canonical_tensor_state(&u, &cap()).is_err());
    }

    /// Independent route: symmetrize in the full `(C^a)^{(x)(d1+d2)}` with the
    /// permutation average.
    fn full_space_ratio(a: usize, d1: u32, d2: u32, psi: &CVector, phi: &CVector) -> f64 {
        use crate::construction::{monomial_basis_matrix, symmetric_projector};
        let e1 = monomial_basis_matrix(a, d1, &cap()).unwrap();
        let e2 = monomial_basis_matrix(a, d2, &cap()).unwrap();
        let x = crate::tensor::kron_vec(&(&e1 * psi), &(&e2 * phi));
        let p = symmetric_projector(a, d1 + d2, &cap()).unwrap();
        (p * x).norm() / (psi.norm() * phi.norm())
    }

    #[test]
    fn projected_ratio_matches_full_space_route() {
        let mut rng = trial_rng(3, 0);
        for (a, d1, d2) in [(2, 1, 1), (2, 2, 3), (3, 1, 2), (3, 2, 2)] {
            let bp = block_projector(a, &[d1, d2], &cap()).unwrap();
            let n1 = bp.block_shape.dims()[0];
            let n2 = bp.block_shape.dims()[1];
            let psi = random_gaussian_vector(n1, &mut rng);
            let phi = random_gaussian_vector(n2, &mut rng);
            let fast = projected_product_ratio(&bp, &[psi.clone(), phi.clone()]).unwrap();
            let slow = full_space_ratio(a, d1, d2, &psi, &phi);
            assert!((fast - slow).abs() < 1e-12);
        }
    }

    #[test]
    fn beauzamy_equality_cases() {
        let bp = block_projector(2, &[1, 1], &cap()).unwrap();
        let r = projected_product_ratio(&bp, &[basis_vector(2, 0), basis_vector(2, 1)]).unwrap();
        assert!((r - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);

        let bp = block_projector(2, &[3, 3], &cap()).unwrap();
        let r = projected_product_ratio(&bp, &[basis_vector(4, 0), basis_vector(4, 0)]).unwrap();
        assert!((r - 1.0).abs() < 1e-12);

        let bp = block_projector(2, &[1, 1, 1], &cap()).unwrap();
        let e1 = basis_vector(2, 0);
        let r = projected_product_ratio(&bp, &[e1.clone(), e1.clone(), e1]).unwrap();
        assert!((r - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sampled_product_bounds_hold() {
        let rep = beauzamy_sample_check(2, 3, 3, 2000, 1, &cap()).unwrap();
        assert_eq!(rep.violations, 0);
        assert!((rep.bound - 20f64.powf(-0.5)).abs() < 1e-15);
        assert!(rep.min_ratio >= rep.bound - 1e-9);

        let rep = multipartite_overlap_bound_check(2, &[1, 1, 1], 2000, 2, &cap()).unwrap();
        assert_eq!(rep.violations, 0);
        assert!((rep.bound - 6f64.powf(-0.5)).abs() < 1e-15);

        let rep = multipartite_overlap_bound_check(3, &[1, 1], 500, 3, &cap()).unwrap();
        assert!((rep.bound - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert_eq!(rep.violations, 0);
    }

    proptest! {
        #[test]
        fn renyi_is_nonincreasing_in_p(raw in proptest::collection::vec(0.0f64..1.0, 2..8)) {
            let s: f64 = raw.iter().sum();
            prop_assume!(s > 1e-6);
            let l: Vec<f64> = raw.iter().map(|x| x / s).collect();
            let grid = [0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 2.0, 3.0, 5.0, 10.0];
            let vals: Vec<f64> = grid.iter().map(|&p| renyi_entropy(&l, p).unwrap()).collect();
            for w in vals.windows(2) {
                prop_assert!(w[1] <= w[0] + 1e-12);
            }
        }

        #[test]
        fn canonical_state_witnesses_tensor_bound(seed in 0u64..1000, ell in 1usize..6) {
            let mut rng = trial_rng(seed, 0);
            let raw = CMatrix::from_fn(9, ell, |_, _| {
                C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
            });
            let q = crate::tensor::orthonormal_column_span(&raw, 1e-10);
            prop_assume!(q.ncols() == ell);
            let u = SubspaceBasis::new(
                TensorShape::new(vec![3, 3]).unwrap(),
                q,
                ConstructionTag::Raw { note: "random".into() },
            ).unwrap();
            let st = canonical_tensor_state(&u, &cap()).unwrap();
            let sp = schmidt(&st.vector, &st.shape, &st.cut).unwrap();
            for p in [1.5, 2.0, 3.0] {
                let bound = hmin_tensor_upper_bound(ell as u64, 3, 3, p).unwrap();
                prop_assert!(sp.renyi(p).unwrap() <= bound + 1e-9);
            }
        }
    }
}
