//! Finite-dimensional tracial algebras `N = ⊕_k M_{m_k}` with trace
//! `τ(x) = Σ_k λ_k Tr(x_k)`, their elements, and the conditional expectation
//! `M_n ⊗ N^{⊗K} → M_n` realised as a weighted partial trace.
//!
//! `N` is embedded block-diagonally in `M_M` with `M = Σ_k m_k`. Tensor powers
//! live inside the full matrix algebra `M_{M^K}`; membership in `N^{⊗K}` is a
//! slot-wise block mask.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{unitarity_residual, CMatrix, C64, ZERO};

/// Allowed deviation of `τ(1)` from one.
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// Default tolerance for the membership test of [`cond_expectation`].
pub const DEFAULT_MEMBERSHIP_TOL: f64 = 1e-10;

/// Descriptor of `⊕_k M_{m_k}` with block weights `λ_k`.
///
/// Deserialisation only checks structure (matching lengths, positive sizes and
/// weights). Call [`TracialAlgebra::validate`] to enforce `τ(1) = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "AlgebraRepr")]
pub struct TracialAlgebra {
    blocks: Vec<usize>,
    weights: Vec<f64>,
}

#[derive(Deserialize)]
struct AlgebraRepr {
    blocks: Vec<usize>,
    weights: Vec<f64>,
}

impl TryFrom<AlgebraRepr> for TracialAlgebra {
    type Error = Error;

    fn try_from(r: AlgebraRepr) -> Result<Self> {
        TracialAlgebra::from_parts(r.blocks, r.weights)
    }
}

impl TracialAlgebra {
    /// Normalised algebra; fails unless `Σ λ_k m_k = 1` to 1e-12.
    pub fn new(blocks: Vec<usize>, weights: Vec<f64>) -> Result<Self> {
        let alg = Self::from_parts(blocks, weights)?;
        alg.validate()?;
        Ok(alg)
    }

    /// Structural checks only; the trace may be unnormalised.
    pub fn from_parts(blocks: Vec<usize>, weights: Vec<f64>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::InvalidAlgebra("no blocks".into()));
        }
        if blocks.len() != weights.len() {
            return Err(Error::InvalidAlgebra(format!("{} blocks but {} weights", blocks.len(), weights.len())));
        }
        if let Some(k) = blocks.iter().position(|&m| m == 0) {
            return Err(Error::InvalidAlgebra(format!("block {k} has size 0")));
        }
        if let Some(k) = weights.iter().position(|&w| !(w.is_finite() && w > 0.0)) {
            return Err(Error::InvalidAlgebra(format!("weight {k} = {} is not strictly positive", weights[k])));
        }
        Ok(TracialAlgebra { blocks, weights })
    }

    /// Weights `λ_k = 1/M`, so that `τ` is the normalised trace of `M_M`
    /// restricted to the block diagonal.
    pub fn uniform(blocks: Vec<usize>) -> Result<Self> {
        let total: usize = blocks.iter().sum();
        let weights = vec![1.0 / total.max(1) as f64; blocks.len()];
        Self::new(blocks, weights)
    }

    /// `ℂ` with `τ = id`.
    pub fn scalar() -> Self {
        TracialAlgebra { blocks: vec![1], weights: vec![1.0] }
    }

    /// `ℂ^r` with uniform weights `1/r`.
    pub fn commutative(r: usize) -> Result<Self> {
        Self::uniform(vec![1; r])
    }

    /// `M_m` with its normalised trace.
    pub fn matrix(m: usize) -> Result<Self> {
        Self::uniform(vec![m])
    }

    /// Parses a block list such as `"2"`, `"1,1"` or `"2,1"` into a uniform algebra.
    pub fn parse_spec(spec: &str) -> Result<Self> {
        let blocks = spec
            .split(|c: char| c == ',' || c == '+' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<usize>().map_err(|_| Error::InvalidAlgebra(format!("bad block size {s:?} in {spec:?}"))))
            .collect::<Result<Vec<_>>>()?;
        Self::uniform(blocks)
    }

    pub fn blocks(&self) -> &[usize] {
        &self.blocks
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// Total embedding dimension `M = Σ m_k`.
    pub fn embedding_dim(&self) -> usize {
        self.blocks.iter().sum()
    }

    /// Complex dimension `Σ m_k²` of the algebra.
    pub fn dim(&self) -> usize {
        self.blocks.iter().map(|m| m * m).sum()
    }

    pub fn is_commutative(&self) -> bool {
        self.blocks.iter().all(|&m| m == 1)
    }

    /// `|Σ λ_k m_k − 1|`.
    pub fn normalization_residual(&self) -> f64 {
        let total: f64 = self.blocks.iter().zip(&self.weights).map(|(&m, &w)| m as f64 * w).sum();
        (total - 1.0).abs()
    }

    pub fn validate(&self) -> Result<()> {
        let r = self.normalization_residual();
        if r > NORMALIZATION_TOL {
            return Err(Error::InvalidAlgebra(format!("τ(1) deviates from 1 by {r:.3e}")));
        }
        Ok(())
    }

    /// Offsets of each block on the diagonal of `M_M`.
    pub fn offsets(&self) -> Vec<usize> {
        let mut acc = 0;
        self.blocks
            .iter()
            .map(|&m| {
                let o = acc;
                acc += m;
                o
            })
            .collect()
    }

    /// Length-`M` vector with `λ_k` repeated `m_k` times.
    pub fn weight_vector(&self) -> Vec<f64> {
        self.blocks.iter().zip(&self.weights).flat_map(|(&m, &w)| std::iter::repeat_n(w, m)).collect()
    }

    /// Length-`M` vector giving the block label of each diagonal position.
    pub fn block_labels(&self) -> Vec<usize> {
        self.blocks.iter().enumerate().flat_map(|(k, &m)| std::iter::repeat_n(k, m)).collect()
    }
}

/// An element `x = (x_1, …, x_r)` of a tracial algebra.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ElementRepr")]
pub struct AlgebraElement {
    algebra: TracialAlgebra,
    blocks: Vec<CMatrix>,
}

#[derive(Deserialize)]
struct ElementRepr {
    algebra: TracialAlgebra,
    blocks: Vec<CMatrix>,
}

impl TryFrom<ElementRepr> for AlgebraElement {
    type Error = Error;

    fn try_from(r: ElementRepr) -> Result<Self> {
        AlgebraElement::new(r.algebra, r.blocks)
    }
}

impl AlgebraElement {
    pub fn new(algebra: TracialAlgebra, blocks: Vec<CMatrix>) -> Result<Self> {
        if blocks.len() != algebra.num_blocks() {
            return Err(Error::ShapeMismatch(format!(
                "algebra has {} blocks, element has {}",
                algebra.num_blocks(),
                blocks.len()
            )));
        }
        for (k, (b, &m)) in blocks.iter().zip(algebra.blocks()).enumerate() {
            if b.shape() != (m, m) {
                return Err(Error::ShapeMismatch(format!("block {k} should be {m}x{m}, got {:?}", b.shape())));
            }
        }
        Ok(AlgebraElement { algebra, blocks })
    }

    pub fn from_fn(algebra: &TracialAlgebra, mut f: impl FnMut(usize) -> CMatrix) -> Self {
        let blocks = (0..algebra.num_blocks()).map(&mut f).collect();
        AlgebraElement::new(algebra.clone(), blocks).expect("from_fn produced a mis-shaped block")
    }

    pub fn unit(algebra: &TracialAlgebra) -> Self {
        Self::from_fn(algebra, |k| CMatrix::identity(algebra.blocks()[k]))
    }

    pub fn zero(algebra: &TracialAlgebra) -> Self {
        Self::from_fn(algebra, |k| {
            let m = algebra.blocks()[k];
            CMatrix::zeros(m, m)
        })
    }

    /// `(c_1, …, c_r)` in a commutative algebra `ℂ^r`.
    pub fn scalars(algebra: &TracialAlgebra, values: &[C64]) -> Result<Self> {
        if !algebra.is_commutative() || values.len() != algebra.num_blocks() {
            return Err(Error::ShapeMismatch(format!(
                "{} scalars for algebra with blocks {:?}",
                values.len(),
                algebra.blocks()
            )));
        }
        Ok(Self::from_fn(algebra, |k| CMatrix::from_rows(&[vec![values[k]]])))
    }

    pub fn random<R: Rng + ?Sized>(algebra: &TracialAlgebra, rng: &mut R) -> Self {
        Self::from_fn(algebra, |k| {
            let m = algebra.blocks()[k];
            CMatrix::random_gaussian(m, m, rng)
        })
    }

    /// Haar-random unitary in each block.
    pub fn random_unitary<R: Rng + ?Sized>(algebra: &TracialAlgebra, rng: &mut R) -> Self {
        Self::from_fn(algebra, |k| CMatrix::random_unitary(algebra.blocks()[k], rng))
    }

    pub fn algebra(&self) -> &TracialAlgebra {
        &self.algebra
    }

    pub fn blocks(&self) -> &[CMatrix] {
        &self.blocks
    }

    pub fn block(&self, k: usize) -> &CMatrix {
        &self.blocks[k]
    }

    fn check_same_algebra(&self, other: &AlgebraElement) -> Result<()> {
        if self.algebra.blocks() != other.algebra.blocks() {
            return Err(Error::ShapeMismatch(format!(
                "elements of different algebras {:?} and {:?}",
                self.algebra.blocks(),
                other.algebra.blocks()
            )));
        }
        Ok(())
    }

    fn zip_with(&self, other: &AlgebraElement, f: impl Fn(&CMatrix, &CMatrix) -> CMatrix) -> Result<AlgebraElement> {
        self.check_same_algebra(other)?;
        let blocks = self.blocks.iter().zip(&other.blocks).map(|(a, b)| f(a, b)).collect();
        Ok(AlgebraElement { algebra: self.algebra.clone(), blocks })
    }

    pub fn mul(&self, other: &AlgebraElement) -> Result<AlgebraElement> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn add(&self, other: &AlgebraElement) -> Result<AlgebraElement> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &AlgebraElement) -> Result<AlgebraElement> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, s: C64) -> AlgebraElement {
        self.map_blocks(|b| b.scale(s))
    }

    pub fn map_blocks(&self, f: impl Fn(&CMatrix) -> CMatrix) -> AlgebraElement {
        AlgebraElement { algebra: self.algebra.clone(), blocks: self.blocks.iter().map(f).collect() }
    }

    pub fn adjoint(&self) -> AlgebraElement {
        self.map_blocks(CMatrix::dagger)
    }

    /// `τ(x) = Σ_k λ_k Tr(x_k)`.
    pub fn trace(&self) -> C64 {
        self.blocks.iter().zip(self.algebra.weights()).map(|(b, &w)| b.trace() * w).sum()
    }

    /// `τ(x y)` without forming the product.
    pub fn trace_product(&self, other: &AlgebraElement) -> C64 {
        debug_assert_eq!(self.algebra.blocks(), other.algebra.blocks());
        let mut acc = ZERO;
        for ((a, b), &w) in self.blocks.iter().zip(&other.blocks).zip(self.algebra.weights()) {
            let m = a.rows();
            let mut t = ZERO;
            for i in 0..m {
                for j in 0..m {
                    t += a[(i, j)] * b[(j, i)];
                }
            }
            acc += t * w;
        }
        acc
    }

    /// Block-diagonal `M × M` matrix.
    pub fn embed(&self) -> CMatrix {
        let dim = self.algebra.embedding_dim();
        let mut out = CMatrix::zeros(dim, dim);
        for (b, o) in self.blocks.iter().zip(self.algebra.offsets()) {
            for i in 0..b.rows() {
                for j in 0..b.cols() {
                    out[(o + i, o + j)] = b[(i, j)];
                }
            }
        }
        out
    }

    /// `max(‖x*x − 1‖_F, ‖xx* − 1‖_F)` of the embedding.
    pub fn unitarity_residual(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| {
                let r = unitarity_residual(b).expect("blocks are square");
                r * r
            })
            .sum::<f64>()
            .sqrt()
    }

    /// `τ`-weighted Hilbert–Schmidt norm `τ(x*x)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        self.blocks.iter().zip(self.algebra.weights()).map(|(b, &w)| w * b.frobenius_norm().powi(2)).sum::<f64>().sqrt()
    }
}

pub fn trace(x: &AlgebraElement) -> C64 {
    x.trace()
}

pub fn embed(x: &AlgebraElement) -> CMatrix {
    x.embed()
}

/// Layout of `ℂ^n ⊗ (ℂ^M)^{⊗K}`: index `a·M^K + Σ_j s_j M^{K−1−j}`, slot 0
/// being the most significant.
#[derive(Debug, Clone)]
pub(crate) struct TensorLayout {
    pub n: usize,
    pub slot_dim: usize,
    pub window: usize,
    /// `M^K`.
    pub env_dim: usize,
    labels: Vec<usize>,
    weights: Vec<f64>,
}

impl TensorLayout {
    pub fn new(n: usize, algebra: &TracialAlgebra, window: usize) -> Result<Self> {
        let slot_dim = algebra.embedding_dim();
        let env_dim = checked_pow(slot_dim, window)?;
        n.checked_mul(env_dim)
            .and_then(|d| d.checked_mul(d))
            .ok_or_else(|| Error::DimensionOverflow(format!("n = {n}, M = {slot_dim}, K = {window}")))?;
        Ok(TensorLayout {
            n,
            slot_dim,
            window,
            env_dim,
            labels: algebra.block_labels(),
            weights: algebra.weight_vector(),
        })
    }

    pub fn dim(&self) -> usize {
        self.n * self.env_dim
    }

    /// Block labels of every slot digit of an environment index, slot 0 first.
    fn digits(&self, mut env: usize, out: &mut [usize]) {
        for j in (0..self.window).rev() {
            out[j] = env % self.slot_dim;
            env /= self.slot_dim;
        }
    }

    /// `Π_j w(s_j)` for every environment index.
    pub fn env_weights(&self) -> Vec<f64> {
        let mut digits = vec![0; self.window];
        (0..self.env_dim)
            .map(|e| {
                self.digits(e, &mut digits);
                digits.iter().map(|&s| self.weights[s]).product()
            })
            .collect()
    }

    /// For every environment index, its tuple of block labels packed as an integer.
    pub fn env_block_keys(&self) -> Vec<usize> {
        let r = self.labels.iter().max().map_or(1, |m| m + 1);
        let mut digits = vec![0; self.window];
        (0..self.env_dim)
            .map(|e| {
                self.digits(e, &mut digits);
                digits.iter().fold(0, |acc, &s| acc * r + self.labels[s])
            })
            .collect()
    }

    pub fn check_shape(&self, y: &CMatrix) -> Result<()> {
        let d = self.dim();
        if y.shape() != (d, d) {
            return Err(Error::ShapeMismatch(format!(
                "expected a {d}x{d} operator on C^{} (x) (C^{})^(x){}, got {:?}",
                self.n,
                self.slot_dim,
                self.window,
                y.shape()
            )));
        }
        Ok(())
    }
}

fn checked_pow(base: usize, exp: usize) -> Result<usize> {
    let mut acc: usize = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base).ok_or_else(|| Error::DimensionOverflow(format!("{base}^{exp}")))?;
    }
    Ok(acc)
}

/// Zeroes every entry of `y` that couples different blocks in some slot; the
/// result is the orthogonal projection onto `M_n ⊗ N^{⊗K}`.
pub fn project_member(y: &CMatrix, n: usize, algebra: &TracialAlgebra, window: usize) -> Result<CMatrix> {
    let layout = TensorLayout::new(n, algebra, window)?;
    layout.check_shape(y)?;
    let keys = layout.env_block_keys();
    let env = layout.env_dim;
    let mut out = y.clone();
    let d = layout.dim();
    for p in 0..d {
        for q in 0..d {
            if keys[p % env] != keys[q % env] {
                out[(p, q)] = ZERO;
            }
        }
    }
    Ok(out)
}

/// `‖y − project_member(y)‖_F`.
pub fn membership_residual(y: &CMatrix, n: usize, algebra: &TracialAlgebra, window: usize) -> Result<f64> {
    let layout = TensorLayout::new(n, algebra, window)?;
    layout.check_shape(y)?;
    let keys = layout.env_block_keys();
    let env = layout.env_dim;
    let d = layout.dim();
    let mut acc = 0.0;
    for p in 0..d {
        for q in 0..d {
            if keys[p % env] != keys[q % env] {
                acc += y[(p, q)].norm_sqr();
            }
        }
    }
    Ok(acc.sqrt())
}

/// Weighted partial trace over the `K` slots, without the membership check.
pub(crate) fn partial_trace_unchecked(y: &CMatrix, layout: &TensorLayout, env_weights: &[f64]) -> CMatrix {
    let env = layout.env_dim;
    CMatrix::from_fn(layout.n, layout.n, |a, b| {
        let mut acc = ZERO;
        for (e, &w) in env_weights.iter().enumerate() {
            acc += y[(a * env + e, b * env + e)] * w;
        }
        acc
    })
}

/// Conditional expectation `E: M_n ⊗ N^{⊗K} → M_n`,
/// `E(x ⊗ w_1 ⊗ … ⊗ w_K) = Π_j τ(w_j) · x`.
///
/// Fails with [`Error::NotMember`] when `y` is farther than `tol` (Frobenius)
/// from the subalgebra.
pub fn cond_expectation(y: &CMatrix, n: usize, algebra: &TracialAlgebra, window: usize, tol: f64) -> Result<CMatrix> {
    let layout = TensorLayout::new(n, algebra, window)?;
    layout.check_shape(y)?;
    let residual = membership_residual(y, n, algebra, window)?;
    if residual > tol {
        return Err(Error::NotMember { residual, tol });
    }
    Ok(partial_trace_unchecked(y, &layout, &layout.env_weights()))
}

/// The trace `tr ⊗ τ^{⊗K}` on `M_n ⊗ N^{⊗K}`; equals `tr(E(y))`.
pub fn tensor_trace(y: &CMatrix, n: usize, algebra: &TracialAlgebra, window: usize) -> Result<C64> {
    let layout = TensorLayout::new(n, algebra, window)?;
    layout.check_shape(y)?;
    let env = layout.env_dim;
    let w = layout.env_weights();
    let mut acc = ZERO;
    for a in 0..n {
        for (e, &we) in w.iter().enumerate() {
            acc += y[(a * env + e, a * env + e)] * we;
        }
    }
    Ok(acc)
}

/// Random element of `M_n ⊗ N^{⊗K}` (Gaussian entries, then block-masked).
pub fn random_member<R: Rng + ?Sized>(
    n: usize,
    algebra: &TracialAlgebra,
    window: usize,
    rng: &mut R,
) -> Result<CMatrix> {
    let layout = TensorLayout::new(n, algebra, window)?;
    let g = CMatrix::random_gaussian(layout.dim(), layout.dim(), rng);
    project_member(&g, n, algebra, window)
}

/// Identity of `ℂ^M`, embedded: used for `1_N`.
pub fn embedded_unit(algebra: &TracialAlgebra) -> CMatrix {
    AlgebraElement::unit(algebra).embed()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{kron, ONE};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pauli_x() -> CMatrix {
        CMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])
    }

    fn c2() -> TracialAlgebra {
        TracialAlgebra::new(vec![1, 1], vec![0.5, 0.5]).unwrap()
    }

    #[test]
    fn trace_examples() {
        for alg in [TracialAlgebra::scalar(), c2(), TracialAlgebra::uniform(vec![2, 1]).unwrap()] {
            let t = AlgebraElement::unit(&alg).trace();
            assert!((t - ONE).norm() < 1e-12);
        }
        let m2 = TracialAlgebra::matrix(2).unwrap();
        let x = AlgebraElement::new(m2, vec![pauli_x()]).unwrap();
        assert_eq!(x.trace(), ZERO);
        let pm = AlgebraElement::scalars(&c2(), &[ONE, -ONE]).unwrap();
        assert_eq!(pm.trace(), ZERO);
    }

    #[test]
    fn algebra_validation() {
        assert!(TracialAlgebra::new(vec![1, 1], vec![0.5, 0.6]).is_err());
        assert!(TracialAlgebra::from_parts(vec![1, 1], vec![0.5, 0.6]).is_ok());
        assert!(TracialAlgebra::from_parts(vec![1, 1], vec![0.5, -0.5]).is_err());
        assert!(TracialAlgebra::from_parts(vec![0], vec![1.0]).is_err());
        assert!(TracialAlgebra::from_parts(vec![], vec![]).is_err());
        assert!(TracialAlgebra::from_parts(vec![1], vec![1.0, 2.0]).is_err());
        let a = TracialAlgebra::parse_spec("2,1").unwrap();
        assert_eq!(a.blocks(), &[2, 1]);
        assert!((a.weights()[0] - 1.0 / 3.0).abs() < 1e-15);
        assert!(TracialAlgebra::parse_spec("2,x").is_err());
    }

    #[test]
    fn embed_examples() {
        let alg = TracialAlgebra::uniform(vec![2, 1]).unwrap();
        assert_eq!(AlgebraElement::unit(&alg).embed(), CMatrix::identity(3));
        let pm = AlgebraElement::scalars(&c2(), &[ONE, -ONE]).unwrap();
        assert_eq!(pm.embed(), CMatrix::diag(&[ONE, -ONE]));
        let c_m2 = TracialAlgebra::new(vec![1, 2], vec![0.5, 0.25]).unwrap();
        let x = AlgebraElement::new(c_m2, vec![CMatrix::from_real_rows(&[&[2.0]]), CMatrix::identity(2)]).unwrap();
        assert_eq!(x.embed(), CMatrix::diag(&[C64::new(2.0, 0.0), ONE, ONE]));
    }

    #[test]
    fn embed_is_star_homomorphism() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let alg = TracialAlgebra::uniform(vec![2, 1, 3]).unwrap();
        let x = AlgebraElement::random(&alg, &mut rng);
        let y = AlgebraElement::random(&alg, &mut rng);
        assert!(x.mul(&y).unwrap().embed().distance(&(&x.embed() * &y.embed())) < 1e-12);
        assert_eq!(x.adjoint().embed(), x.embed().dagger());
    }

    #[test]
    fn trace_is_tracial_and_faithful() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for blocks in [vec![1], vec![2], vec![1, 1], vec![2, 1], vec![3, 2]] {
            let alg = TracialAlgebra::uniform(blocks).unwrap();
            for _ in 0..20 {
                let x = AlgebraElement::random(&alg, &mut rng);
                let y = AlgebraElement::random(&alg, &mut rng);
                let xy = x.mul(&y).unwrap().trace();
                let yx = y.mul(&x).unwrap().trace();
                assert!((xy - yx).norm() < 1e-12);
                assert!((x.trace_product(&y) - xy).norm() < 1e-12);
                assert!(x.adjoint().mul(&x).unwrap().trace().re > 0.0);
            }
        }
    }

    #[test]
    fn cond_expectation_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let m2 = TracialAlgebra::matrix(2).unwrap();
        let z = CMatrix::random_gaussian(2, 2, &mut rng);
        // E ∘ J = id
        for k in 1..=3 {
            let y = kron(&z, &CMatrix::identity(2usize.pow(k as u32))).unwrap();
            let e = cond_expectation(&y, 2, &m2, k, 1e-10).unwrap();
            assert!(e.distance(&z) < 1e-12);
        }
        // τ(X) = 0
        let y = kron(&z, &pauli_x()).unwrap();
        let e = cond_expectation(&y, 2, &m2, 1, 1e-10).unwrap();
        assert!(e.frobenius_norm() < 1e-15);
    }

    #[test]
    fn cond_expectation_product_rule() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let alg = TracialAlgebra::uniform(vec![2, 1]).unwrap();
        let z = CMatrix::random_gaussian(2, 2, &mut rng);
        let w1 = AlgebraElement::random(&alg, &mut rng);
        let w2 = AlgebraElement::random(&alg, &mut rng);
        let y = kron(&kron(&z, &w1.embed()).unwrap(), &w2.embed()).unwrap();
        let e = cond_expectation(&y, 2, &alg, 2, 1e-10).unwrap();
        let expected = z.scale(w1.trace() * w2.trace());
        assert!(e.distance(&expected) < 1e-12);
    }

    #[test]
    fn cond_expectation_rejects_non_members() {
        let c2 = c2();
        let y = kron(&CMatrix::identity(2), &pauli_x()).unwrap();
        match cond_expectation(&y, 2, &c2, 1, 1e-10) {
            Err(Error::NotMember { residual, .. }) => assert!((residual - 2.0).abs() < 1e-12),
            other => panic!("expected NotMember, got {other:?}"),
        }
        assert!(matches!(cond_expectation(&CMatrix::identity(3), 2, &c2, 1, 1e-10), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn block_trace_formula() {
        // For positive z ∈ M_n ⊗ N, (tr ⊗ τ)(z) = Σ_i τ(z_ii).
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let alg = TracialAlgebra::uniform(vec![2, 1]).unwrap();
        let n = 3;
        let g = random_member(n, &alg, 1, &mut rng).unwrap();
        let z = &g * &g.dagger();
        let total = tensor_trace(&z, n, &alg, 1).unwrap();
        let mdim = alg.embedding_dim();
        let mut by_blocks = ZERO;
        for i in 0..n {
            let zii = CMatrix::from_fn(mdim, mdim, |p, q| z[(i * mdim + p, i * mdim + q)]);
            let blocks = alg
                .offsets()
                .iter()
                .zip(alg.blocks())
                .map(|(&o, &m)| CMatrix::from_fn(m, m, |p, q| zii[(o + p, o + q)]))
                .collect();
            by_blocks += AlgebraElement::new(alg.clone(), blocks).unwrap().trace();
        }
        assert!((total - by_blocks).norm() < 1e-10);
        assert!(total.re > 0.0);
    }

    #[test]
    fn cond_expectation_is_module_map_and_trace_compatible() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let alg = TracialAlgebra::uniform(vec![1, 2]).unwrap();
        let (n, k) = (2, 2);
        let env = alg.embedding_dim().pow(k as u32);
        for _ in 0..10 {
            let y = random_member(n, &alg, k, &mut rng).unwrap();
            let z = CMatrix::random_gaussian(n, n, &mut rng);
            let zp = CMatrix::random_gaussian(n, n, &mut rng);
            let jz = kron(&z, &CMatrix::identity(env)).unwrap();
            let jzp = kron(&zp, &CMatrix::identity(env)).unwrap();
            let lhs = cond_expectation(&(&(&jz * &y) * &jzp), n, &alg, k, 1e-10).unwrap();
            let ey = cond_expectation(&y, n, &alg, k, 1e-10).unwrap();
            let rhs = &(&z * &ey) * &zp;
            assert!(lhs.distance(&rhs) < 1e-10);
            let t = tensor_trace(&y, n, &alg, k).unwrap();
            assert!((t - ey.trace()).norm() < 1e-10);
        }
        let one = CMatrix::identity(n * env);
        let e1 = cond_expectation(&one, n, &alg, k, 1e-10).unwrap();
        assert!(e1.distance(&CMatrix::identity(n)) < 1e-12);
    }
}
