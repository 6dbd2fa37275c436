//! Explicit entangled subspaces.
//!
//! Two descriptions of the same family are built here and kept independent:
//!
//! * coefficient-constrained subspaces `U_{C,P}`: all `psi` with
//!   `sum_{alpha in P_q} C_alpha psi_alpha = 0` for every cell `P_q`;
//! * kernels of the projector onto the full symmetric subspace
//!   `S^{d_1 + .. + d_m}(C^a)` inside `S^{d_1}(C^a) (x) .. (x) S^{d_m}(C^a)`,
//!   with each `C^{n_i}` embedded through the first `n_i` monomial basis vectors.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::{
    big_to_f64, checked_pow, enumerate_multiindices, isometry_defect, kron, multinomial,
    null_space_orthonormal, symmetric_dim, CMatrix, CVector, MultiIndex, ResourceCap, TensorShape,
    C64, RANK_TOL, UNIT_TOL,
};

/// How a subspace was produced. Carried into files and used to look up
/// certified entanglement bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConstructionTag {
    /// `ker(Pi_{a,d})` intersected with the embedded product space.
    Kernel {
        a: usize,
        d: Vec<u32>,
        n: Vec<usize>,
        embedding: EmbeddingKind,
    },
    /// Coefficient-constrained subspace.
    Constraints { n: Vec<usize>, rule: ConstraintRule },
    /// Anything else; no certified bound is known.
    Raw { note: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmbeddingKind {
    FirstMonomials,
    Custom,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "coefficients", rename_all = "snake_case")]
pub enum ConstraintRule {
    /// Level-set partition, all coefficients 1.
    Ones,
    /// Level-set partition, `C_alpha = prod_i binom(n_i - 1, alpha_i)^{1/2}`.
    Binomial,
    /// Column-sum partition with multinomial square-root coefficients; the
    /// coordinate form of the kernel construction.
    KernelCoordinates {
        a: usize,
        d: Vec<u32>,
    },
    Custom,
}

impl ConstructionTag {
    /// Certified lower bound on the geometric measure, when the construction
    /// carries one: `binom(d_1 + .. + d_m; d_1, .., d_m)^{-1}`.
    pub fn certified_entanglement_lower(&self) -> Option<f64> {
        let degrees: Vec<u64> = match self {
            ConstructionTag::Kernel { d, .. } => d.iter().map(|&x| x as u64).collect(),
            ConstructionTag::Constraints {
                rule: ConstraintRule::Binomial,
                n,
            } => n.iter().map(|&x| x as u64 - 1).collect(),
            ConstructionTag::Constraints {
                rule: ConstraintRule::KernelCoordinates { d, .. },
                ..
            } => d.iter().map(|&x| x as u64).collect(),
            _ => return None,
        };
        Some(1.0 / big_to_f64(&multinomial(&degrees)))
    }

    /// `(n, m)` when the tag describes the maximal-dimension construction
    /// `a = 2`, `d_i = n - 1` with all factors equal.
    pub fn maximal_dimension_case(&self) -> Option<(usize, usize)> {
        let (n, ok) = match self {
            ConstructionTag::Kernel { a, d, n, .. } => (
                n,
                *a == 2 && d.iter().zip(n).all(|(&di, &ni)| di as usize + 1 == ni),
            ),
            ConstructionTag::Constraints {
                n,
                rule: ConstraintRule::Binomial,
            } => (n, true),
            ConstructionTag::Constraints {
                n,
                rule: ConstraintRule::KernelCoordinates { a, d },
            } => (
                n,
                *a == 2 && d.iter().zip(n).all(|(&di, &ni)| di as usize + 1 == ni),
            ),
            _ => return None,
        };
        if ok && !n.is_empty() && n.iter().all(|&x| x == n[0]) {
            Some((n[0], n.len()))
        } else {
            None
        }
    }

    /// Degree vector when the bound comes from a multinomial.
    pub fn degrees(&self) -> Option<Vec<u32>> {
        match self {
            ConstructionTag::Kernel { d, .. } => Some(d.clone()),
            ConstructionTag::Constraints {
                rule: ConstraintRule::Binomial,
                n,
            } => Some(n.iter().map(|&x| x as u32 - 1).collect()),
            ConstructionTag::Constraints {
                rule: ConstraintRule::KernelCoordinates { d, .. },
                ..
            } => Some(d.clone()),
            _ => None,
        }
    }
}

/// Orthonormal basis of a subspace of a tensor-product space.
#[derive(Debug, Clone)]
pub struct SubspaceBasis {
    ambient: TensorShape,
    basis: CMatrix,
    tag: ConstructionTag,
}

impl SubspaceBasis {
    pub fn new(ambient: TensorShape, basis: CMatrix, tag: ConstructionTag) -> Result<Self> {
        if basis.nrows() != ambient.total() {
            return Err(Error::ShapeMismatch(format!(
                "basis has {} rows, ambient dimension is {}",
                basis.nrows(),
                ambient.total()
            )));
        }
        if basis.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Format("non-finite basis entry".into()));
        }
        let defect = isometry_defect(&basis);
        if defect > UNIT_TOL * (1.0 + basis.ncols() as f64) {
            return Err(Error::InvalidParameter(format!(
                "basis is not orthonormal (||B^dagger B - I||_F = {defect:e})"
            )));
        }
        Ok(SubspaceBasis {
            ambient,
            basis,
            tag,
        })
    }

    pub fn ambient(&self) -> &TensorShape {
        &self.ambient
    }

    pub fn basis(&self) -> &CMatrix {
        &self.basis
    }

    pub fn tag(&self) -> &ConstructionTag {
        &self.tag
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn projector(&self) -> CMatrix {
        &self.basis * self.basis.adjoint()
    }

    pub fn column(&self, k: usize) -> CVector {
        self.basis.column(k).into_owned()
    }

    /// `|| Pi_U - conj(Pi_U) ||_F`; zero when the span is closed under
    /// complex conjugation.
    pub fn conjugation_defect(&self) -> f64 {
        let p = self.projector();
        (p.clone() - p.map(|z| z.conj())).norm()
    }

    pub fn certified_entanglement_lower(&self) -> Option<f64> {
        self.tag.certified_entanglement_lower()
    }
}

/// Result of comparing two subspaces through their projectors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Equivalence {
    pub equivalent: bool,
    pub distance: f64,
}

/// `|| Pi_A - Pi_B ||_F <= tol`.
pub fn equivalence_check(a: &SubspaceBasis, b: &SubspaceBasis, tol: f64) -> Result<Equivalence> {
    if a.ambient != b.ambient {
        return Err(Error::ShapeMismatch(format!(
            "ambient shapes differ: {:?} vs {:?}",
            a.ambient.dims(),
            b.ambient.dims()
        )));
    }
    let distance = (a.projector() - b.projector()).norm();
    Ok(Equivalence {
        equivalent: distance <= tol,
        distance,
    })
}

/// `n_1 .. n_m - sum n_i + m - 1`.
pub fn max_entangled_dim(nvec: &[usize]) -> BigUint {
    let prod = nvec
        .iter()
        .fold(BigUint::one(), |acc, &n| acc * BigUint::from(n));
    let plus = prod + BigUint::from(nvec.len()) - BigUint::one();
    let sum: usize = nvec.iter().sum();
    plus - BigUint::from(sum)
}

// ---------------------------------------------------------------------------
// symmetric subspaces
// ---------------------------------------------------------------------------

fn word_shape(a: usize, d: u32) -> Result<TensorShape> {
    TensorShape::new(vec![a; d.max(1) as usize])
}

/// Orthonormal monomial basis `|alpha>` of `S^d(C^a)` inside `(C^a)^{(x) d}`.
/// Entry `multinomial(alpha)^{-1/2}` on every arrangement of the word
/// `1^{alpha_1} .. a^{alpha_a}`. Order follows [`enumerate_multiindices`].
pub fn monomial_basis(a: usize, d: u32, cap: &ResourceCap) -> Result<Vec<CVector>> {
    let m = monomial_basis_matrix(a, d, cap)?;
    Ok((0..m.ncols()).map(|j| m.column(j).into_owned()).collect())
}

/// [`monomial_basis`] as the columns of an `a^d x dim S^d` matrix.
pub fn monomial_basis_matrix(a: usize, d: u32, cap: &ResourceCap) -> Result<CMatrix> {
    if a == 0 {
        return Err(Error::InvalidParameter(
            "alphabet size must be positive".into(),
        ));
    }
    let total = checked_pow(a, d as usize);
    let indices = enumerate_multiindices(a, d);
    cap.check(
        "monomial basis",
        total.saturating_mul(indices.len() as u128),
    )?;
    if d == 0 {
        return Ok(CMatrix::from_element(1, 1, C64::new(1.0, 0.0)));
    }
    let position: HashMap<&MultiIndex, usize> =
        indices.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let weights: Vec<f64> = indices
        .iter()
        .map(|m| 1.0 / big_to_f64(&m.multinomial()).sqrt())
        .collect();
    let shape = word_shape(a, d)?;
    let mut out = CMatrix::zeros(total as usize, indices.len());
    for w in 0..shape.total() {
        let counts = MultiIndex::from_word(&shape.digits(w), a);
        let j = position[&counts];
        out[(w, j)] = C64::new(weights[j], 0.0);
    }
    Ok(out)
}

/// `(1/d!) sum_sigma U_sigma` on `(C^a)^{(x) d}`, built literally from the
/// permutation group. Intended for cross-validation at small sizes.
pub fn symmetric_projector(a: usize, d: u32, cap: &ResourceCap) -> Result<CMatrix> {
    if a == 0 || d == 0 {
        return Err(Error::InvalidParameter(
            "symmetric projector needs a >= 1 and d >= 1".into(),
        ));
    }
    if d > 10 {
        return Err(Error::InvalidParameter(format!(
            "permutation average over {d}! permutations is not supported; use block_projector"
        )));
    }
    let total = checked_pow(a, d as usize);
    cap.check_square("symmetric projector", total)?;
    let shape = word_shape(a, d)?;
    let perms = permutations(d as usize);
    let weight = 1.0 / perms.len() as f64;
    let n = total as usize;
    let mut p = CMatrix::zeros(n, n);
    let mut permuted = vec![0usize; d as usize];
    for w in 0..n {
        let word = shape.digits(w);
        for sigma in &perms {
            for (slot, &s) in permuted.iter_mut().zip(sigma) {
                *slot = word[s];
            }
            p[(shape.linear(&permuted), w)] += C64::new(weight, 0.0);
        }
    }
    Ok(p)
}

/// All permutations of `0..k` (Heap's algorithm).
fn permutations(k: usize) -> Vec<Vec<usize>> {
    let mut items: Vec<usize> = (0..k).collect();
    let mut out = vec![items.clone()];
    let mut c = vec![0usize; k];
    let mut i = 0;
    while i < k {
        if c[i] < i {
            if i % 2 == 0 {
                items.swap(0, i);
            } else {
                items.swap(c[i], i);
            }
            out.push(items.clone());
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out
}

/// The projector onto `S^{|d|}(C^a)` inside `J = S^{d_1}(C^a) (x) .. (x) S^{d_m}(C^a)`,
/// written in the product of monomial bases.
#[derive(Debug, Clone)]
pub struct BlockProjector {
    pub a: usize,
    pub degrees: Vec<u32>,
    /// `dim S^{d_i}(C^a)` per factor.
    pub block_shape: TensorShape,
    /// Row `beta`, column `alpha`: `binom(|d|, beta)^{-1/2} C_alpha` when the
    /// columns of `alpha` sum to `beta`. Rows are orthonormal.
    pub coordinate_rows: CMatrix,
    /// `coordinate_rows^dagger * coordinate_rows`.
    pub projector: CMatrix,
}

/// Monomial indices of each factor of `J`.
fn factor_indices(a: usize, dvec: &[u32]) -> Vec<Vec<MultiIndex>> {
    dvec.iter().map(|&d| enumerate_multiindices(a, d)).collect()
}

/// `prod_i binom(d_i, alpha_i)^{1/2}`.
fn coordinate_coefficient(alphas: &[&MultiIndex]) -> f64 {
    alphas
        .iter()
        .map(|m| big_to_f64(&m.multinomial()).sqrt())
        .product()
}

pub fn block_projector(a: usize, dvec: &[u32], cap: &ResourceCap) -> Result<BlockProjector> {
    if a == 0 || dvec.is_empty() || dvec.contains(&0) {
        return Err(Error::InvalidParameter(
            "block projector needs a >= 1 and positive degrees".into(),
        ));
    }
    let dims = dvec
        .iter()
        .map(|&d| symmetric_dim(a, d).to_usize())
        .collect::<Option<Vec<usize>>>()
        .ok_or_else(|| Error::ResourceCap {
            what: "block projector".into(),
            required: u128::MAX,
            cap: cap.max_elements,
        })?;
    let jdim = dims
        .iter()
        .fold(1u128, |acc, &x| acc.saturating_mul(x as u128));
    cap.check_square("block projector", jdim)?;
    let block_shape = TensorShape::new(dims)?;
    let total_degree: u32 = dvec.iter().sum();
    let betas = enumerate_multiindices(a, total_degree);
    let beta_pos: HashMap<&MultiIndex, usize> =
        betas.iter().enumerate().map(|(i, b)| (b, i)).collect();
    let beta_norm: Vec<f64> = betas
        .iter()
        .map(|b| 1.0 / big_to_f64(&b.multinomial()).sqrt())
        .collect();
    let factors = factor_indices(a, dvec);

    let n = block_shape.total();
    let mut rows = CMatrix::zeros(betas.len(), n);
    for col in 0..n {
        let digits = block_shape.digits(col);
        let alphas: Vec<&MultiIndex> = digits.iter().zip(&factors).map(|(&x, f)| &f[x]).collect();
        let beta = alphas[1..]
            .iter()
            .fold(alphas[0].clone(), |acc, m| acc.add(m));
        let r = beta_pos[&beta];
        rows[(r, col)] = C64::new(beta_norm[r] * coordinate_coefficient(&alphas), 0.0);
    }
    let projector = rows.adjoint() * &rows;
    Ok(BlockProjector {
        a,
        degrees: dvec.to_vec(),
        block_shape,
        coordinate_rows: rows,
        projector,
    })
}

/// `E^dagger Pi_sym E` where `E` is the tensor product of monomial bases;
/// the same operator as [`block_projector`] computed through the full
/// `(C^a)^{(x)|d|}` and the permutation average.
pub fn compressed_symmetric_projector(
    a: usize,
    dvec: &[u32],
    cap: &ResourceCap,
) -> Result<CMatrix> {
    let total_degree: u32 = dvec.iter().sum();
    let sym = symmetric_projector(a, total_degree, cap)?;
    let mut embed = monomial_basis_matrix(a, dvec[0], cap)?;
    for &d in &dvec[1..] {
        embed = kron(&embed, &monomial_basis_matrix(a, d, cap)?);
    }
    Ok(embed.adjoint() * sym * embed)
}

/// Isometric embedding `C^n -> S^d(C^a)`, as a `dim S^d x n` matrix in
/// monomial coordinates.
#[derive(Debug, Clone)]
pub struct SymmetricEmbedding {
    pub a: usize,
    pub d: u32,
    pub n: usize,
    pub isometry: CMatrix,
    pub kind: EmbeddingKind,
}

impl SymmetricEmbedding {
    /// Standard basis of `C^n` onto the first `n` monomial basis vectors.
    pub fn first_monomials(a: usize, d: u32, n: usize, factor: usize) -> Result<Self> {
        let sdim = symmetric_dim(a, d);
        if BigUint::from(n) > sdim || n == 0 {
            return Err(Error::EmbeddingTooLarge {
                factor,
                n,
                max: sdim.to_string(),
            });
        }
        let s = sdim.to_usize().expect("bounded by n");
        let mut isometry = CMatrix::zeros(s, n);
        for i in 0..n {
            isometry[(i, i)] = C64::new(1.0, 0.0);
        }
        Ok(SymmetricEmbedding {
            a,
            d,
            n,
            isometry,
            kind: EmbeddingKind::FirstMonomials,
        })
    }

    pub fn custom(a: usize, d: u32, isometry: CMatrix) -> Result<Self> {
        let sdim = symmetric_dim(a, d);
        if BigUint::from(isometry.nrows()) != sdim {
            return Err(Error::ShapeMismatch(format!(
                "isometry has {} rows, dim S^{d}(C^{a}) = {sdim}",
                isometry.nrows()
            )));
        }
        if isometry_defect(&isometry) > UNIT_TOL {
            return Err(Error::InvalidParameter(
                "embedding is not an isometry".into(),
            ));
        }
        Ok(SymmetricEmbedding {
            a,
            d,
            n: isometry.ncols(),
            isometry,
            kind: EmbeddingKind::Custom,
        })
    }
}

/// `U_{a,d} = ker(Pi_{a,d})`, intersected with the embedded `C^{n_1} (x) .. (x) C^{n_m}`.
pub fn build_kernel_subspace(
    a: usize,
    dvec: &[u32],
    nvec: &[usize],
    cap: &ResourceCap,
) -> Result<SubspaceBasis> {
    if dvec.len() != nvec.len() {
        return Err(Error::InvalidParameter(format!(
            "{} degrees but {} factor dimensions",
            dvec.len(),
            nvec.len()
        )));
    }
    let embeddings = dvec
        .iter()
        .zip(nvec)
        .enumerate()
        .map(|(i, (&d, &n))| SymmetricEmbedding::first_monomials(a, d, n, i))
        .collect::<Result<Vec<_>>>()?;
    build_kernel_subspace_embedded(a, &embeddings, cap)
}

pub fn build_kernel_subspace_embedded(
    a: usize,
    embeddings: &[SymmetricEmbedding],
    cap: &ResourceCap,
) -> Result<SubspaceBasis> {
    if embeddings.is_empty() {
        return Err(Error::InvalidParameter("need at least one factor".into()));
    }
    if embeddings.iter().any(|e| e.a != a) {
        return Err(Error::InvalidParameter(
            "embeddings use different alphabets".into(),
        ));
    }
    let dvec: Vec<u32> = embeddings.iter().map(|e| e.d).collect();
    let nvec: Vec<usize> = embeddings.iter().map(|e| e.n).collect();
    let bp = block_projector(a, &dvec, cap)?;
    let ambient = TensorShape::new(nvec.clone())?;
    cap.check(
        "embedded kernel",
        (bp.block_shape.total() as u128).saturating_mul(ambient.total() as u128),
    )?;

    let first_monomials = embeddings
        .iter()
        .all(|e| e.kind == EmbeddingKind::FirstMonomials);
    let restricted = if first_monomials {
        // column selection, no dense Kronecker product needed
        let mut sel = CMatrix::zeros(bp.projector.nrows(), ambient.total());
        for h in 0..ambient.total() {
            let j = bp.block_shape.linear(&ambient.digits(h));
            sel.set_column(h, &bp.projector.column(j));
        }
        sel
    } else {
        let mut e = embeddings[0].isometry.clone();
        for emb in &embeddings[1..] {
            e = kron(&e, &emb.isometry);
        }
        &bp.projector * e
    };
    let ns = null_space_orthonormal(&restricted, RANK_TOL)?;
    SubspaceBasis::new(
        ambient,
        ns.basis,
        ConstructionTag::Kernel {
            a,
            d: dvec,
            n: nvec,
            embedding: if first_monomials {
                EmbeddingKind::FirstMonomials
            } else {
                EmbeddingKind::Custom
            },
        },
    )
}

// ---------------------------------------------------------------------------
// coefficient-constrained subspaces
// ---------------------------------------------------------------------------

/// Coefficients `C_alpha` and an ordered partition `P` of the index set
/// `[n_1] x .. x [n_m]` (0-based, linear indices).
#[derive(Debug, Clone)]
pub struct ConstraintSystem {
    shape: TensorShape,
    coefficients: Vec<f64>,
    cells: Vec<Vec<usize>>,
    rule: ConstraintRule,
}

impl ConstraintSystem {
    /// Validates coverage, non-zero coefficients and the ordering condition
    /// (lowering any coordinate moves to a strictly earlier cell).
    pub fn new(
        shape: TensorShape,
        coefficients: Vec<f64>,
        cells: Vec<Vec<usize>>,
        rule: ConstraintRule,
    ) -> Result<Self> {
        let total = shape.total();
        if coefficients.len() != total {
            return Err(Error::ShapeMismatch(format!(
                "{} coefficients for {} indices",
                coefficients.len(),
                total
            )));
        }
        if let Some(i) = coefficients
            .iter()
            .position(|c| !c.is_finite() || *c == 0.0)
        {
            return Err(Error::InvalidParameter(format!(
                "coefficient at {:?} must be finite and non-zero",
                shape.digits(i)
            )));
        }
        let mut cell_of = vec![usize::MAX; total];
        for (q, cell) in cells.iter().enumerate() {
            if cell.is_empty() {
                return Err(Error::InvalidParameter(format!("cell {q} is empty")));
            }
            for &idx in cell {
                if idx >= total {
                    return Err(Error::InvalidParameter(format!("index {idx} out of range")));
                }
                if cell_of[idx] != usize::MAX {
                    return Err(Error::InvalidParameter(format!(
                        "index {:?} appears in two cells",
                        shape.digits(idx)
                    )));
                }
                cell_of[idx] = q;
            }
        }
        if let Some(idx) = cell_of.iter().position(|&q| q == usize::MAX) {
            return Err(Error::InvalidParameter(format!(
                "index {:?} is not covered by the partition",
                shape.digits(idx)
            )));
        }
        for idx in 0..total {
            let alpha = shape.digits(idx);
            for i in 0..alpha.len() {
                for g in 0..alpha[i] {
                    let mut gamma = alpha.clone();
                    gamma[i] = g;
                    let to = cell_of[shape.linear(&gamma)];
                    if to >= cell_of[idx] {
                        return Err(Error::PartitionOrder {
                            alpha,
                            gamma,
                            from: cell_of[idx],
                            to,
                        });
                    }
                }
            }
        }
        Ok(ConstraintSystem {
            shape,
            coefficients,
            cells,
            rule,
        })
    }

    /// Level-set partition `|alpha| = k` with the given coefficients.
    pub fn level_set(
        shape: TensorShape,
        coefficients: Vec<f64>,
        rule: ConstraintRule,
    ) -> Result<Self> {
        let levels: usize = shape.dims().iter().map(|n| n - 1).sum::<usize>() + 1;
        let mut cells = vec![Vec::new(); levels];
        for idx in 0..shape.total() {
            let k: usize = shape.digits(idx).iter().sum();
            cells[k].push(idx);
        }
        ConstraintSystem::new(shape, coefficients, cells, rule)
    }

    pub fn ones(nvec: &[usize]) -> Result<Self> {
        let shape = TensorShape::new(nvec.to_vec())?;
        let c = vec![1.0; shape.total()];
        ConstraintSystem::level_set(shape, c, ConstraintRule::Ones)
    }

    /// Level sets with `C_alpha = prod_i binom(n_i - 1, alpha_i)^{1/2}`.
    pub fn binomial(nvec: &[usize]) -> Result<Self> {
        let shape = TensorShape::new(nvec.to_vec())?;
        let c = (0..shape.total())
            .map(|idx| {
                shape
                    .digits(idx)
                    .iter()
                    .zip(nvec)
                    .map(|(&x, &n)| {
                        big_to_f64(&crate::tensor::binomial(n as u64 - 1, x as u64)).sqrt()
                    })
                    .product()
            })
            .collect();
        ConstraintSystem::level_set(shape, c, ConstraintRule::Binomial)
    }

    /// Coordinate description of `U_{a,d}`: factor index `x` is the `x`-th
    /// monomial of degree `d_i`, cells are the column sums `beta` in
    /// descending lexicographic order, and
    /// `C_alpha = prod_i binom(d_i, alpha_i)^{1/2}`.
    pub fn kernel_coordinates(a: usize, dvec: &[u32], nvec: &[usize]) -> Result<Self> {
        if dvec.len() != nvec.len() {
            return Err(Error::InvalidParameter(
                "degree / dimension count mismatch".into(),
            ));
        }
        for (i, (&d, &n)) in dvec.iter().zip(nvec).enumerate() {
            let sdim = symmetric_dim(a, d);
            if BigUint::from(n) > sdim {
                return Err(Error::EmbeddingTooLarge {
                    factor: i,
                    n,
                    max: sdim.to_string(),
                });
            }
        }
        let shape = TensorShape::new(nvec.to_vec())?;
        let factors: Vec<Vec<MultiIndex>> = dvec
            .iter()
            .zip(nvec)
            .map(|(&d, &n)| enumerate_multiindices(a, d).into_iter().take(n).collect())
            .collect();
        let total_degree: u32 = dvec.iter().sum();
        let betas = enumerate_multiindices(a, total_degree);
        let beta_pos: HashMap<&MultiIndex, usize> =
            betas.iter().enumerate().map(|(i, b)| (b, i)).collect();
        let mut by_beta: Vec<Vec<usize>> = vec![Vec::new(); betas.len()];
        let mut coefficients = vec![0.0; shape.total()];
        for (idx, coefficient) in coefficients.iter_mut().enumerate() {
            let alphas: Vec<&MultiIndex> = shape
                .digits(idx)
                .iter()
                .zip(&factors)
                .map(|(&x, f)| &f[x])
                .collect();
            let beta = alphas[1..]
                .iter()
                .fold(alphas[0].clone(), |acc, m| acc.add(m));
            by_beta[beta_pos[&beta]].push(idx);
            *coefficient = coordinate_coefficient(&alphas);
        }
        let cells = by_beta.into_iter().filter(|c| !c.is_empty()).collect();
        ConstraintSystem::new(
            shape,
            coefficients,
            cells,
            ConstraintRule::KernelCoordinates {
                a,
                d: dvec.to_vec(),
            },
        )
    }

    pub fn shape(&self) -> &TensorShape {
        &self.shape
    }

    pub fn cells(&self) -> &[Vec<usize>] {
        &self.cells
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// One row per cell, scaled to unit Euclidean norm.
    pub fn constraint_matrix(&self) -> CMatrix {
        let mut m = CMatrix::zeros(self.cells.len(), self.shape.total());
        for (q, cell) in self.cells.iter().enumerate() {
            let norm = cell
                .iter()
                .map(|&i| self.coefficients[i].powi(2))
                .sum::<f64>()
                .sqrt();
            for &i in cell {
                m[(q, i)] = C64::new(self.coefficients[i] / norm, 0.0);
            }
        }
        m
    }
}

/// Orthonormal basis of `U_{C,P}`.
pub fn build_uc(system: &ConstraintSystem) -> Result<SubspaceBasis> {
    let ns = null_space_orthonormal(&system.constraint_matrix(), RANK_TOL)?;
    SubspaceBasis::new(
        system.shape.clone(),
        ns.basis,
        ConstructionTag::Constraints {
            n: system.shape.dims().to_vec(),
            rule: system.rule.clone(),
        },
    )
}

/// Rank of the constraint matrix, for the `dim == total - rank` identity.
pub fn constraint_rank(system: &ConstraintSystem) -> Result<usize> {
    Ok(null_space_orthonormal(&system.constraint_matrix(), RANK_TOL)?.rank)
}
