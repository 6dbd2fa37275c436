//! Multi-index combinatorics and dense complex linear algebra on tensor-product
//! spaces.
//!
//! Tensors are stored as flat vectors in row-major order over `(i_1, ..., i_m)`
//! with `i_1` varying slowest. Every module in the crate relies on this layout,
//! including the JSON exchange format.

use nalgebra::{Complex, DMatrix, DVector};
use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Default relative rank tolerance for null-space decisions.
pub const RANK_TOL: f64 = 1e-10;
/// Default tolerance for unit-norm and isometry checks.
pub const UNIT_TOL: f64 = 1e-10;

/// Upper bound on the number of scalars an operation may materialize.
///
/// Vectors count their length, dense matrices count `rows * cols`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResourceCap {
    pub max_elements: u128,
}

impl Default for ResourceCap {
    fn default() -> Self {
        ResourceCap {
            max_elements: 1 << 24,
        }
    }
}

impl ResourceCap {
    pub fn new(max_elements: u128) -> Self {
        ResourceCap { max_elements }
    }

    pub fn check(&self, what: &str, required: u128) -> Result<()> {
        if required > self.max_elements {
            return Err(Error::ResourceCap {
                what: what.to_string(),
                required,
                cap: self.max_elements,
            });
        }
        Ok(())
    }

    /// Checks a dense `dim x dim` matrix.
    pub fn check_square(&self, what: &str, dim: u128) -> Result<()> {
        self.check(what, dim.saturating_mul(dim))
    }
}

/// `a^d` without overflow (saturating).
pub fn checked_pow(a: usize, d: usize) -> u128 {
    let mut out: u128 = 1;
    for _ in 0..d {
        out = out.saturating_mul(a as u128);
    }
    out
}

// ---------------------------------------------------------------------------
// combinatorics
// ---------------------------------------------------------------------------

pub fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * k)
}

/// Exact binomial coefficient; zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for j in 0..k {
        acc *= n - j;
        acc /= j + 1;
    }
    acc
}

/// `(sum parts)! / prod(parts_i!)`, exact.
pub fn multinomial(parts: &[u64]) -> BigUint {
    let mut total = 0u64;
    let mut acc = BigUint::one();
    for &p in parts {
        total += p;
        acc *= binomial(total, p);
    }
    acc
}

/// Converts a big integer to `f64`, saturating at `f64::MAX`.
pub fn big_to_f64(x: &BigUint) -> f64 {
    x.to_f64().unwrap_or(f64::MAX)
}

/// Exponent vector `alpha` with `|alpha| = degree`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex {
    exponents: Vec<u32>,
}

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Result<Self> {
        if exponents.is_empty() {
            return Err(Error::InvalidParameter(
                "multi-index needs at least one exponent".into(),
            ));
        }
        Ok(MultiIndex { exponents })
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    pub fn alphabet(&self) -> usize {
        self.exponents.len()
    }

    pub fn degree(&self) -> u64 {
        self.exponents.iter().map(|&e| e as u64).sum()
    }

    /// `binom(d; alpha)`.
    pub fn multinomial(&self) -> BigUint {
        let parts: Vec<u64> = self.exponents.iter().map(|&e| e as u64).collect();
        multinomial(&parts)
    }

    /// Letter counts of a word over `{0, .., a-1}`.
    pub fn from_word(word: &[usize], a: usize) -> Self {
        let mut exponents = vec![0u32; a];
        for &w in word {
            exponents[w] += 1;
        }
        MultiIndex { exponents }
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex {
            exponents: self
                .exponents
                .iter()
                .zip(&other.exponents)
                .map(|(x, y)| x + y)
                .collect(),
        }
    }
}

/// All `alpha` in `Z_{>=0}^a` with `|alpha| = d`, lexicographically descending,
/// so `(d, 0, .., 0)` comes first.
pub fn enumerate_multiindices(a: usize, d: u32) -> Vec<MultiIndex> {
    assert!(a >= 1, "alphabet size must be positive");
    let mut out = Vec::new();
    let mut current = vec![0u32; a];
    fill(&mut out, &mut current, 0, d);
    out
}

fn fill(out: &mut Vec<MultiIndex>, current: &mut Vec<u32>, pos: usize, remaining: u32) {
    if pos + 1 == current.len() {
        current[pos] = remaining;
        out.push(MultiIndex {
            exponents: current.clone(),
        });
        return;
    }
    for e in (0..=remaining).rev() {
        current[pos] = e;
        fill(out, current, pos + 1, remaining - e);
    }
    current[pos] = 0;
}

/// `dim S^d(C^a) = binom(a + d - 1, d)`.
pub fn symmetric_dim(a: usize, d: u32) -> BigUint {
    binomial((a as u64 + d as u64).saturating_sub(1), d as u64)
}

// ---------------------------------------------------------------------------
// shapes and bipartitions
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TensorShape {
    dims: Vec<usize>,
}

impl TensorShape {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::InvalidParameter(format!(
                "factor dimensions must be positive and non-empty, got {dims:?}"
            )));
        }
        Ok(TensorShape { dims })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn factors(&self) -> usize {
        self.dims.len()
    }

    pub fn total(&self) -> usize {
        self.dims.iter().product()
    }

    /// Digits `(i_1, .., i_m)` of a linear index.
    pub fn digits(&self, mut idx: usize) -> Vec<usize> {
        let mut out = vec![0; self.dims.len()];
        for (slot, &n) in out.iter_mut().zip(&self.dims).rev() {
            *slot = idx % n;
            idx /= n;
        }
        out
    }

    pub fn linear(&self, digits: &[usize]) -> usize {
        digits
            .iter()
            .zip(&self.dims)
            .fold(0, |acc, (&i, &n)| acc * n + i)
    }

    /// Digit table for every linear index, row-major.
    pub fn digit_table(&self) -> Vec<Vec<usize>> {
        (0..self.total()).map(|i| self.digits(i)).collect()
    }
}

/// Split of factor indices (0-based) into two blocks.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Bipartition {
    pub left: Vec<usize>,
    pub right: Vec<usize>,
}

impl Bipartition {
    pub fn new(left: Vec<usize>, right: Vec<usize>) -> Self {
        Bipartition { left, right }
    }

    /// First factor against the rest.
    pub fn first_vs_rest(m: usize) -> Self {
        Bipartition {
            left: vec![0],
            right: (1..m).collect(),
        }
    }

    pub fn swapped(&self) -> Self {
        Bipartition {
            left: self.right.clone(),
            right: self.left.clone(),
        }
    }

    pub fn validate(&self, m: usize) -> Result<()> {
        if self.left.is_empty() || self.right.is_empty() {
            return Err(Error::InvalidBipartition(
                "both blocks must be non-empty".into(),
            ));
        }
        let mut seen = vec![false; m];
        for &f in self.left.iter().chain(&self.right) {
            if f >= m {
                return Err(Error::InvalidBipartition(format!(
                    "factor {f} out of range for {m} factors"
                )));
            }
            if seen[f] {
                return Err(Error::InvalidBipartition(format!(
                    "factor {f} appears twice"
                )));
            }
            seen[f] = true;
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::InvalidBipartition(
                "blocks do not cover all factors".into(),
            ));
        }
        Ok(())
    }
}

/// Precomputed reshaping of a tensor into a `rows x cols` matrix along a cut.
#[derive(Debug, Clone)]
pub struct BipartiteLayout {
    pub rows: usize,
    pub cols: usize,
    /// `(row, col)` for every linear index of the tensor.
    pub positions: Vec<(usize, usize)>,
}

impl BipartiteLayout {
    pub fn new(shape: &TensorShape, cut: &Bipartition) -> Result<Self> {
        cut.validate(shape.factors())?;
        let dims = shape.dims();
        let rows: usize = cut.left.iter().map(|&f| dims[f]).product();
        let cols: usize = cut.right.iter().map(|&f| dims[f]).product();
        let fold = |digits: &[usize], block: &[usize]| {
            block
                .iter()
                .fold(0usize, |acc, &f| acc * dims[f] + digits[f])
        };
        let positions = (0..shape.total())
            .map(|idx| {
                let digits = shape.digits(idx);
                (fold(&digits, &cut.left), fold(&digits, &cut.right))
            })
            .collect();
        Ok(BipartiteLayout {
            rows,
            cols,
            positions,
        })
    }

    pub fn reshape(&self, psi: &CVector) -> CMatrix {
        let mut m = CMatrix::zeros(self.rows, self.cols);
        for (value, &(r, c)) in psi.iter().zip(&self.positions) {
            m[(r, c)] = *value;
        }
        m
    }
}

/// Squared Schmidt coefficients across a cut, sorted descending.
#[derive(Debug, Clone, PartialEq)]
pub struct SchmidtSpectrum {
    pub lambdas: Vec<f64>,
    pub bipartition: Bipartition,
}

/// Schmidt spectrum of a unit vector.
pub fn schmidt(psi: &CVector, shape: &TensorShape, cut: &Bipartition) -> Result<SchmidtSpectrum> {
    if psi.len() != shape.total() {
        return Err(Error::ShapeMismatch(format!(
            "vector of length {} for shape {:?}",
            psi.len(),
            shape.dims()
        )));
    }
    let norm = psi.norm();
    if (norm - 1.0).abs() > UNIT_TOL {
        return Err(Error::NotNormalized(norm));
    }
    let layout = BipartiteLayout::new(shape, cut)?;
    Ok(SchmidtSpectrum {
        lambdas: squared_singular_values(&layout.reshape(psi)),
        bipartition: cut.clone(),
    })
}

/// Squared singular values, descending.
pub fn squared_singular_values(m: &CMatrix) -> Vec<f64> {
    let svd = m.clone().svd(false, false);
    let mut lambdas: Vec<f64> = svd.singular_values.iter().map(|s| s * s).collect();
    lambdas.sort_by(|a, b| b.total_cmp(a));
    lambdas
}

// ---------------------------------------------------------------------------
// null spaces
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct NullSpace {
    /// Orthonormal kernel basis, one column per vector.
    pub basis: CMatrix,
    pub rank: usize,
    pub singular_values: Vec<f64>,
}

/// Orthonormal kernel basis via a full SVD. Singular values at or below
/// `tol * sigma_max` count as zero.
pub fn null_space_orthonormal(m: &CMatrix, tol: f64) -> Result<NullSpace> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let (rows, cols) = m.shape();
    if cols == 0 {
        return Ok(NullSpace {
            basis: CMatrix::zeros(0, 0),
            rank: 0,
            singular_values: vec![],
        });
    }
    // nalgebra returns a thin V^T; zero-padding to at least `cols` rows makes it full.
    let padded = if rows < cols {
        let mut p = CMatrix::zeros(cols, cols);
        p.view_mut((0, 0), (rows, cols)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let sigma_max = padded.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if sigma_max == 0.0 {
        return Ok(NullSpace {
            basis: CMatrix::identity(cols, cols),
            rank: 0,
            singular_values: vec![0.0; cols],
        });
    }
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let sv = &svd.singular_values;
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    let cutoff = tol * smax;
    let kernel: Vec<usize> = (0..sv.len()).filter(|&i| sv[i] <= cutoff).collect();
    let rank = cols - kernel.len();
    let mut basis = CMatrix::zeros(cols, kernel.len());
    for (j, &i) in kernel.iter().enumerate() {
        for c in 0..cols {
            basis[(c, j)] = v_t[(i, c)].conj();
        }
    }
    let mut singular_values: Vec<f64> = sv.iter().cloned().collect();
    singular_values.sort_by(|a, b| b.total_cmp(a));
    Ok(NullSpace {
        basis,
        rank,
        singular_values,
    })
}

/// Orthonormal basis of the column span (rank decided as in the null space).
pub fn orthonormal_column_span(m: &CMatrix, tol: f64) -> CMatrix {
    let (rows, cols) = m.shape();
    if cols == 0 || rows == 0 {
        return CMatrix::zeros(rows, 0);
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("requested U");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| smax > 0.0 && svd.singular_values[i] > tol * smax)
        .collect();
    let mut out = CMatrix::zeros(rows, keep.len());
    for (j, &i) in keep.iter().enumerate() {
        out.set_column(j, &u.column(i));
    }
    out
}

/// Kronecker product of dense matrices, first argument slowest.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    let mut out = CMatrix::zeros(ar * br, ac * bc);
    for i in 0..ar {
        for j in 0..ac {
            let s = a[(i, j)];
            if s == C64::new(0.0, 0.0) {
                continue;
            }
            for k in 0..br {
                for l in 0..bc {
                    out[(i * br + k, j * bc + l)] = s * b[(k, l)];
                }
            }
        }
    }
    out
}

pub fn kron_vec(a: &CVector, b: &CVector) -> CVector {
    let mut out = CVector::zeros(a.len() * b.len());
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i * b.len() + j] = x * y;
        }
    }
    out
}

/// Product vector `phi_1 (x) .. (x) phi_m`.
pub fn product_vector(factors: &[CVector]) -> CVector {
    factors
        .iter()
        .skip(1)
        .fold(factors[0].clone(), |acc, f| kron_vec(&acc, f))
}

/// `|| B^dagger B - I ||_F`.
pub fn isometry_defect(b: &CMatrix) -> f64 {
    let g = b.adjoint() * b;
    (g - CMatrix::identity(b.ncols(), b.ncols())).norm()
}

pub fn basis_vector(n: usize, i: usize) -> CVector {
    let mut v = CVector::zeros(n);
    v[i] = C64::new(1.0, 0.0);
    v
}
