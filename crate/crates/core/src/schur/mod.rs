//! Schur (Hadamard) multipliers on `M_n`.
//!
//! Index convention: `m[(s, t)]` multiplies entry `(row s, column t)`, so that
//! `T_m(a)_{st} = m_{st} a_{st}`. Rank-one operators follow the `u ⊗ v = |v⟩⟨u|`
//! convention: `rank1(u, v)_{st} = v_s u_t`. With these choices
//!
//! ```text
//! tr(T_m(rank1(u, v)) · rank1(a, b)) = Σ_{s,t} m_{st} u_t v_s a_s b_t.
//! ```
//!
//! Getting either convention transposed silently conjugates every non-real
//! multiplier, so the unit tests pin both.

mod norm;

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, psd_check, CMatrix, C64, DEFAULT_PSD_TOL, ONE, ZERO};

pub use norm::{norm_bounds, Factorization, NormBounds, NormOptions};

/// Tolerance used for the cached structural flags.
pub const FLAG_TOL: f64 = 1e-10;

/// Cached structural flags of a multiplier table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Flags {
    pub unital_diag: bool,
    pub psd: bool,
    pub real: bool,
}

/// An `n × n` Schur multiplier.
#[derive(Debug, Serialize, Deserialize)]
#[serde(try_from = "MultiplierRepr")]
pub struct SchurMultiplier {
    n: usize,
    m: CMatrix,
    #[serde(skip)]
    flags: OnceLock<Flags>,
}

#[derive(Deserialize)]
struct MultiplierRepr {
    n: usize,
    m: CMatrix,
}

impl TryFrom<MultiplierRepr> for SchurMultiplier {
    type Error = Error;

    fn try_from(r: MultiplierRepr) -> Result<Self> {
        if r.m.shape() != (r.n, r.n) {
            return Err(Error::ShapeMismatch(format!(
                "multiplier declares n = {} but table is {:?}",
                r.n,
                r.m.shape()
            )));
        }
        SchurMultiplier::new(r.m)
    }
}

impl Clone for SchurMultiplier {
    fn clone(&self) -> Self {
        SchurMultiplier { n: self.n, m: self.m.clone(), flags: self.flags.clone() }
    }
}

impl PartialEq for SchurMultiplier {
    fn eq(&self, other: &Self) -> bool {
        self.m == other.m
    }
}

impl SchurMultiplier {
    pub fn new(m: CMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::NotSquare { rows: m.rows(), cols: m.cols() });
        }
        Ok(SchurMultiplier { n: m.rows(), m, flags: OnceLock::new() })
    }

    /// The identity multiplier (all ones).
    pub fn all_ones(n: usize) -> Self {
        Self::new(CMatrix::from_fn(n, n, |_, _| ONE)).expect("square")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn table(&self) -> &CMatrix {
        &self.m
    }

    pub fn entry(&self, s: usize, t: usize) -> C64 {
        self.m[(s, t)]
    }

    pub fn flags(&self) -> Flags {
        *self.flags.get_or_init(|| {
            let n = self.n;
            let unital_diag = (0..n).all(|i| (self.m[(i, i)] - ONE).norm() <= FLAG_TOL);
            let psd = psd_check(&self.m, FLAG_TOL).unwrap_or(false);
            let imag = self.m.as_slice().iter().map(|z| z.im * z.im).sum::<f64>().sqrt();
            Flags { unital_diag, psd, real: imag <= FLAG_TOL }
        })
    }

    /// Entrywise product of two tables: `T_φ ∘ T_ψ = T_{φψ}`.
    pub fn compose(&self, other: &SchurMultiplier) -> Result<SchurMultiplier> {
        SchurMultiplier::new(self.m.hadamard(&other.m)?)
    }

    /// Table `m^{∘k}` of `T_m^k`.
    pub fn power(&self, k: usize) -> SchurMultiplier {
        let m = self.m.map(|z| z.powu(k as u32));
        SchurMultiplier::new(m).expect("square")
    }

    /// Frobenius distance between tables.
    pub fn distance(&self, other: &SchurMultiplier) -> f64 {
        self.m.distance(&other.m)
    }
}

/// `T_φ(a)_{st} = m_{st} a_{st}`.
pub fn schur_apply(phi: &SchurMultiplier, a: &CMatrix) -> Result<CMatrix> {
    if a.shape() != (phi.n, phi.n) {
        return Err(Error::ShapeMismatch(format!("multiplier of size {} applied to {:?} matrix", phi.n, a.shape())));
    }
    phi.m.hadamard(a)
}

/// The rank-one operator `u ⊗ v = |v⟩⟨ū|`: entries `v_s u_t`.
pub fn rank1(u: &[C64], v: &[C64]) -> Result<CMatrix> {
    if u.len() != v.len() || u.is_empty() {
        return Err(Error::ShapeMismatch(format!("rank1 of vectors of length {} and {}", u.len(), v.len())));
    }
    Ok(CMatrix::from_fn(v.len(), u.len(), |s, t| v[s] * u[t]))
}

/// `Σ_{s,t} m_{st} u_t v_s a_s b_t`.
pub fn pairing(phi: &SchurMultiplier, u: &[C64], v: &[C64], a: &[C64], b: &[C64]) -> Result<C64> {
    let n = phi.n;
    if [u.len(), v.len(), a.len(), b.len()].iter().any(|&l| l != n) {
        return Err(Error::ShapeMismatch(format!(
            "pairing needs four vectors of length {n}, got {}, {}, {}, {}",
            u.len(),
            v.len(),
            a.len(),
            b.len()
        )));
    }
    let mut acc = ZERO;
    for s in 0..n {
        let vs_as = v[s] * a[s];
        for t in 0..n {
            acc += phi.m[(s, t)] * u[t] * vs_as * b[t];
        }
    }
    Ok(acc)
}

/// Outcome of [`cp_check`].
#[derive(Debug, Clone, Serialize)]
pub struct CpCheck {
    pub positive: bool,
    pub min_eigenvalue: Option<f64>,
    /// Gram witness: column `t` is `α_t`, with `m_{st} = ⟨α_t, α_s⟩`.
    pub witness: Option<CMatrix>,
    pub diagnostic: Option<String>,
}

/// Complete positivity of `T_φ`, i.e. positive semidefiniteness of the table,
/// with a Gram witness built from the clipped eigendecomposition.
pub fn cp_check(phi: &SchurMultiplier, tol: f64) -> CpCheck {
    let defect = phi.m.hermitian_defect();
    if defect > tol {
        return CpCheck {
            positive: false,
            min_eigenvalue: None,
            witness: None,
            diagnostic: Some(format!("table is not Hermitian: ||m - m*||_F = {defect:.3e}")),
        };
    }
    let eig = hermitian_eigen(&phi.m).expect("square table");
    let min = eig.values[0];
    if min < -tol {
        return CpCheck {
            positive: false,
            min_eigenvalue: Some(min),
            witness: None,
            diagnostic: Some(format!("minimum eigenvalue {min:.3e} below -{tol:.1e}")),
        };
    }
    CpCheck { positive: true, min_eigenvalue: Some(min), witness: Some(gram_factor(&eig, tol)), diagnostic: None }
}

/// Rows `sqrt(λ_k) q_k*` for the eigenpairs with `λ_k > tol`; the result `G`
/// satisfies `G* G ≈ Q Λ_+ Q*`. Returns at least one row.
pub(crate) fn gram_factor(eig: &crate::linalg::HermitianEigen, tol: f64) -> CMatrix {
    let n = eig.values.len();
    let kept: Vec<usize> = (0..n).rev().filter(|&k| eig.values[k] > tol).collect();
    if kept.is_empty() {
        return CMatrix::zeros(1, n);
    }
    CMatrix::from_fn(kept.len(), n, |r, t| {
        let k = kept[r];
        eig.vectors[(t, k)].conj() * eig.values[k].sqrt()
    })
}

/// `psd_check` on the table with the default tolerance.
pub fn is_cp(phi: &SchurMultiplier) -> bool {
    psd_check(&phi.m, DEFAULT_PSD_TOL).unwrap_or(false)
}
