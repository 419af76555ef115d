//! Trace-form representations: unitaries `d_1, …, d_n` of a tracial algebra
//! and the induced multiplier `m_ij = τ(d_i* d_j)`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraElement, TracialAlgebra};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64};
use crate::schur::{Flags, SchurMultiplier};

/// Unitarity tolerance applied when a representation is validated.
pub const UNITARY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RepresentationRepr")]
pub struct TraceRepresentation {
    algebra: TracialAlgebra,
    d: Vec<AlgebraElement>,
}

#[derive(Deserialize)]
struct RepresentationRepr {
    algebra: TracialAlgebra,
    d: Vec<AlgebraElement>,
}

impl TryFrom<RepresentationRepr> for TraceRepresentation {
    type Error = Error;

    fn try_from(r: RepresentationRepr) -> Result<Self> {
        TraceRepresentation::from_parts(r.algebra, r.d)
    }
}

impl TraceRepresentation {
    /// Builds a representation and checks unitarity of every `d_i` at
    /// [`UNITARY_TOL`] and the normalisation of the trace.
    pub fn new(algebra: TracialAlgebra, d: Vec<AlgebraElement>) -> Result<Self> {
        let rep = Self::from_parts(algebra, d)?;
        rep.check(UNITARY_TOL)?;
        Ok(rep)
    }

    /// Structural checks only (non-empty, matching algebra).
    pub fn from_parts(algebra: TracialAlgebra, d: Vec<AlgebraElement>) -> Result<Self> {
        if d.is_empty() {
            return Err(Error::Invalid("a representation needs at least one unitary".into()));
        }
        for (i, x) in d.iter().enumerate() {
            if x.algebra().blocks() != algebra.blocks() {
                return Err(Error::ShapeMismatch(format!(
                    "d_{} lives in blocks {:?}, representation algebra is {:?}",
                    i + 1,
                    x.algebra().blocks(),
                    algebra.blocks()
                )));
            }
        }
        Ok(TraceRepresentation { algebra, d })
    }

    /// Errors on the first non-unitary element or an unnormalised trace.
    pub fn check(&self, tol: f64) -> Result<()> {
        self.algebra.validate()?;
        for (index, x) in self.d.iter().enumerate() {
            let residual = x.unitarity_residual();
            if residual > tol {
                return Err(Error::NotUnitary { index, residual });
            }
        }
        Ok(())
    }

    /// Haar-random unitaries in every block.
    pub fn random<R: Rng + ?Sized>(algebra: &TracialAlgebra, n: usize, rng: &mut R) -> Self {
        let d = (0..n.max(1)).map(|_| AlgebraElement::random_unitary(algebra, rng)).collect();
        TraceRepresentation { algebra: algebra.clone(), d }
    }

    /// Commutative representation over `ℂ^r` from phases: `d_i = (e^{iθ_{i1}}, …, e^{iθ_{ir}})`.
    pub fn from_phases(algebra: &TracialAlgebra, phases: &[Vec<f64>]) -> Result<Self> {
        let d = phases
            .iter()
            .map(|row| {
                let vals: Vec<C64> = row.iter().map(|&t| C64::from_polar(1.0, t)).collect();
                AlgebraElement::scalars(algebra, &vals)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(algebra.clone(), d)
    }

    pub fn algebra(&self) -> &TracialAlgebra {
        &self.algebra
    }

    pub fn unitaries(&self) -> &[AlgebraElement] {
        &self.d
    }

    pub fn n(&self) -> usize {
        self.d.len()
    }

    /// The table `τ(d_i* d_j)` as a raw matrix.
    pub fn gram(&self) -> CMatrix {
        let n = self.n();
        let adj: Vec<AlgebraElement> = self.d.iter().map(AlgebraElement::adjoint).collect();
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = adj[i].trace_product(&self.d[j]);
                m[(i, j)] = v;
                if i != j {
                    m[(j, i)] = v.conj();
                }
            }
        }
        m
    }
}

/// `m_ij = τ(d_i* d_j)`. Does not re-validate unitarity.
pub fn build_multiplier(rep: &TraceRepresentation) -> SchurMultiplier {
    SchurMultiplier::new(rep.gram()).expect("square")
}

/// `d'_k = d_1* d_k`, so that `d'_1 = 1`.
pub fn gauge_normalize(rep: &TraceRepresentation) -> TraceRepresentation {
    let d1_adj = rep.d[0].adjoint();
    let mut d: Vec<AlgebraElement> = rep.d.iter().map(|x| d1_adj.mul(x).expect("same algebra")).collect();
    d[0] = AlgebraElement::unit(&rep.algebra);
    TraceRepresentation { algebra: rep.algebra.clone(), d }
}

/// Replaces every `d_i` by `w d_i`.
pub fn left_translate(rep: &TraceRepresentation, w: &AlgebraElement) -> Result<TraceRepresentation> {
    let d = rep.d.iter().map(|x| w.mul(x)).collect::<Result<Vec<_>>>()?;
    Ok(TraceRepresentation { algebra: rep.algebra.clone(), d })
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub tol: f64,
    pub unitarity_residuals: Vec<f64>,
    /// Zero-based indices whose unitarity residual exceeds `tol`.
    pub flagged: Vec<usize>,
    pub normalization_residual: f64,
    pub normalization_ok: bool,
    pub flags: Flags,
    pub pass: bool,
}

pub fn validate(rep: &TraceRepresentation, tol: f64) -> ValidationReport {
    let unitarity_residuals: Vec<f64> = rep.d.iter().map(AlgebraElement::unitarity_residual).collect();
    let flagged: Vec<usize> =
        unitarity_residuals.iter().enumerate().filter(|(_, &r)| r > tol).map(|(i, _)| i).collect();
    let normalization_residual = rep.algebra.normalization_residual();
    let normalization_ok = normalization_residual <= tol;
    let flags = build_multiplier(rep).flags();
    ValidationReport {
        tol,
        pass: flagged.is_empty() && normalization_ok,
        unitarity_residuals,
        flagged,
        normalization_residual,
        normalization_ok,
        flags,
    }
}
