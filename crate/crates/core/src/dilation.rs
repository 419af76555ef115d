//! The shift-and-conjugate dilation of a trace-form Schur multiplier on a
//! finite cyclic tensor window.
//!
//! The ambient algebra is `M_n ⊗ N^{⊗K}` acting on `ℂ^n ⊗ (ℂ^M)^{⊗K}`, slots
//! numbered `0..K`. With
//!
//! * `J(z) = z ⊗ 1^{⊗K}`,
//! * `S = id ⊗ σ`, where `σ` moves slot `j` to slot `j + 1 (mod K)`, implemented
//!   by the permutation unitary `P`,
//! * `Γ(y) = D̂* y D̂`, `D̂ = Σ_i E_ii ⊗ d_i ⊗ 1^{⊗(K−1)}` acting on slot 0,
//!
//! the automorphism is `U = Γ ∘ S = Ad(V)` with `V = D̂* P`, i.e.
//! `U(y) = V y V*`. For `k ≤ K`,
//!
//! ```text
//! U^k(E_ij ⊗ 1) = E_ij ⊗ (d_i* d_j)^{⊗k} ⊗ 1^{⊗(K−k)},
//! ```
//!
//! so `E U^k J = T_φ^k` with `φ_ij = τ(d_i* d_j)` exactly inside the window.
//! At `k = K + 1` the shift wraps around and the identity generally fails.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{membership_residual, partial_trace_unchecked, TensorLayout, TracialAlgebra};
use crate::error::{Error, Result};
use crate::linalg::{kron, unitarity_residual, CMatrix, C64, ZERO};
use crate::representation::{build_multiplier, TraceRepresentation, UNITARY_TOL};
use crate::schur::{rank1, schur_apply, SchurMultiplier};

/// Default cap on the ambient dimension `n · M^K`.
pub const DEFAULT_DIM_CAP: usize = 4096;

/// The truncated dilation of a representation.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "SystemRepr", into = "SystemRepr")]
pub struct DilationSystem {
    rep: TraceRepresentation,
    multiplier: SchurMultiplier,
    layout: TensorLayout,
    /// `embed(d_i)` and its adjoint.
    slot_unitaries: Vec<(CMatrix, CMatrix)>,
    /// Environment permutation: `P|e⟩ = |perm[e]⟩`.
    perm: Vec<usize>,
    env_weights: Vec<f64>,
    v: CMatrix,
}

#[derive(Serialize, Deserialize)]
struct SystemRepr {
    n: usize,
    window: usize,
    rep: TraceRepresentation,
    v: Option<CMatrix>,
}

impl From<DilationSystem> for SystemRepr {
    fn from(s: DilationSystem) -> Self {
        SystemRepr { n: s.n(), window: s.window(), rep: s.rep, v: Some(s.v) }
    }
}

impl TryFrom<SystemRepr> for DilationSystem {
    type Error = Error;

    fn try_from(r: SystemRepr) -> Result<Self> {
        if r.n != r.rep.n() {
            return Err(Error::ShapeMismatch(format!(
                "system declares n = {} but the representation has {} unitaries",
                r.n,
                r.rep.n()
            )));
        }
        r.rep.check(UNITARY_TOL)?;
        let sys = DilationSystem::build_with_cap(&r.rep, r.window, usize::MAX)?;
        if let Some(v) = r.v {
            if v.shape() != sys.v.shape() || v.distance(&sys.v) > 1e-10 {
                return Err(Error::Invalid("stored V does not match the representation".into()));
            }
        }
        Ok(sys)
    }
}

impl DilationSystem {
    /// Builds the dilation with the default dimension cap.
    pub fn build(rep: &TraceRepresentation, window: usize) -> Result<Self> {
        Self::build_with_cap(rep, window, DEFAULT_DIM_CAP)
    }

    pub fn build_with_cap(rep: &TraceRepresentation, window: usize, cap: usize) -> Result<Self> {
        if window == 0 {
            return Err(Error::Invalid("window size K must be at least 1".into()));
        }
        let n = rep.n();
        let layout = TensorLayout::new(n, rep.algebra(), window)?;
        let dim = layout.dim();
        if dim > cap {
            return Err(Error::DimensionCap { dim, cap });
        }
        let slot_unitaries: Vec<(CMatrix, CMatrix)> = rep
            .unitaries()
            .iter()
            .map(|d| {
                let e = d.embed();
                let adj = e.dagger();
                (e, adj)
            })
            .collect();
        let perm = cyclic_shift(layout.slot_dim, window);
        let env_weights = layout.env_weights();
        let mut sys = DilationSystem {
            rep: rep.clone(),
            multiplier: build_multiplier(rep),
            layout,
            slot_unitaries,
            perm,
            env_weights,
            v: CMatrix::zeros(1, 1),
        };
        sys.v = sys.implementing_unitary();
        Ok(sys)
    }

    pub fn n(&self) -> usize {
        self.layout.n
    }

    pub fn window(&self) -> usize {
        self.layout.window
    }

    /// Embedding dimension `M` of one tensor slot.
    pub fn slot_dim(&self) -> usize {
        self.layout.slot_dim
    }

    /// `n · M^K`.
    pub fn dim(&self) -> usize {
        self.layout.dim()
    }

    pub fn algebra(&self) -> &TracialAlgebra {
        self.rep.algebra()
    }

    pub fn representation(&self) -> &TraceRepresentation {
        &self.rep
    }

    pub fn multiplier(&self) -> &SchurMultiplier {
        &self.multiplier
    }

    /// `V` with `U(y) = V y V*`.
    pub fn v(&self) -> &CMatrix {
        &self.v
    }

    /// `V = D̂* P`: `V[(a,e),(a,f)] = D̂*_a[e, perm[f]]`.
    fn implementing_unitary(&self) -> CMatrix {
        let env = self.layout.env_dim;
        let rest = env / self.layout.slot_dim;
        let mut v = CMatrix::zeros(self.dim(), self.dim());
        for (a, (_, d_adj)) in self.slot_unitaries.iter().enumerate() {
            for e in 0..env {
                let (s0, r) = (e / rest, e % rest);
                for f in 0..env {
                    let g = self.perm[f];
                    if g % rest == r {
                        v[(a * env + e, a * env + f)] = d_adj[(s0, g / rest)];
                    }
                }
            }
        }
        v
    }

    /// `J(z) = z ⊗ 1^{⊗K}`.
    pub fn embed_j(&self, z: &CMatrix) -> Result<CMatrix> {
        if z.shape() != (self.n(), self.n()) {
            return Err(Error::ShapeMismatch(format!("J expects a {n}x{n} matrix, got {:?}", z.shape(), n = self.n())));
        }
        kron(z, &CMatrix::identity(self.layout.env_dim))
    }

    /// One application of `U = Γ ∘ S`, using the block structure of `V`.
    fn apply_u(&self, y: &CMatrix) -> CMatrix {
        let env = self.layout.env_dim;
        let slot = self.layout.slot_dim;
        let rest = env / slot;
        let dim = self.dim();
        // S: P y P*
        let lift = |p: usize| (p / env) * env + self.perm[p % env];
        let mut shifted = CMatrix::zeros(dim, dim);
        for p in 0..dim {
            let lp = lift(p);
            for q in 0..dim {
                shifted[(lp, lift(q))] = y[(p, q)];
            }
        }
        // Γ: left multiply by d_a* on slot 0 of row block a
        let mut tmp = CMatrix::zeros(dim, dim);
        for a in 0..self.n() {
            let left = &self.slot_unitaries[a].1;
            for s0 in 0..slot {
                for r in 0..rest {
                    let row = a * env + s0 * rest + r;
                    for sp in 0..slot {
                        let c = left[(s0, sp)];
                        if c == ZERO {
                            continue;
                        }
                        let src = a * env + sp * rest + r;
                        for q in 0..dim {
                            let val = shifted[(src, q)];
                            tmp[(row, q)] += c * val;
                        }
                    }
                }
            }
        }
        // ... and right multiply by d_b on slot 0 of column block b
        let mut out = CMatrix::zeros(dim, dim);
        for b in 0..self.n() {
            let right = &self.slot_unitaries[b].0;
            for t0 in 0..slot {
                for r in 0..rest {
                    let col = b * env + t0 * rest + r;
                    for tp in 0..slot {
                        let c = right[(tp, t0)];
                        if c == ZERO {
                            continue;
                        }
                        let src = b * env + tp * rest + r;
                        for p in 0..dim {
                            let val = tmp[(p, src)];
                            out[(p, col)] += val * c;
                        }
                    }
                }
            }
        }
        out
    }

    fn check_ambient(&self, y: &CMatrix) -> Result<()> {
        self.layout.check_shape(y)
    }

    /// `U^k(y)`. Exactness of the dilation identity is only guaranteed for
    /// `k ≤ K`; larger `k` is computed all the same (see [`Self::within_window`]).
    pub fn step(&self, y: &CMatrix, k: usize) -> Result<CMatrix> {
        self.check_ambient(y)?;
        let mut cur = y.clone();
        for _ in 0..k {
            cur = self.apply_u(&cur);
        }
        Ok(cur)
    }

    /// `U^k(y) = V^k y V^{k*}` by dense products; a cross-check for [`Self::step`].
    pub fn step_dense(&self, y: &CMatrix, k: usize) -> Result<CMatrix> {
        self.check_ambient(y)?;
        let mut vk = CMatrix::identity(self.dim());
        for _ in 0..k {
            vk = &self.v * &vk;
        }
        Ok(&(&vk * y) * &vk.dagger())
    }

    pub fn within_window(&self, k: usize) -> bool {
        k <= self.window()
    }

    /// The trace `tr ⊗ τ^{⊗K}`.
    pub fn trace(&self, y: &CMatrix) -> Result<C64> {
        self.check_ambient(y)?;
        let env = self.layout.env_dim;
        let mut acc = ZERO;
        for a in 0..self.n() {
            for (e, &w) in self.env_weights.iter().enumerate() {
                acc += y[(a * env + e, a * env + e)] * w;
            }
        }
        Ok(acc)
    }

    /// `(tr ⊗ τ^{⊗K})(x y)` without forming the product.
    pub fn trace_pairing(&self, x: &CMatrix, y: &CMatrix) -> Result<C64> {
        self.check_ambient(x)?;
        self.check_ambient(y)?;
        let env = self.layout.env_dim;
        let dim = self.dim();
        let mut acc = ZERO;
        for p in 0..dim {
            let w = self.env_weights[p % env];
            let mut row = ZERO;
            for q in 0..dim {
                row += x[(p, q)] * y[(q, p)];
            }
            acc += row * w;
        }
        Ok(acc)
    }

    /// `E(y)` with a membership check at `tol`.
    pub fn cond_expectation(&self, y: &CMatrix, tol: f64) -> Result<CMatrix> {
        self.check_ambient(y)?;
        let residual = self.membership_residual(y)?;
        if residual > tol {
            return Err(Error::NotMember { residual, tol });
        }
        Ok(partial_trace_unchecked(y, &self.layout, &self.env_weights))
    }

    pub fn membership_residual(&self, y: &CMatrix) -> Result<f64> {
        membership_residual(y, self.n(), self.algebra(), self.window())
    }

    /// `‖E(U^k(J z)) − T_φ^k(z)‖_F` together with the membership residual of `U^k(J z)`.
    pub fn residual(&self, z: &CMatrix, k: usize) -> Result<(f64, f64)> {
        let y = self.step(&self.embed_j(z)?, k)?;
        self.compare(&y, z, k)
    }

    fn compare(&self, y: &CMatrix, z: &CMatrix, k: usize) -> Result<(f64, f64)> {
        let member = self.membership_residual(y)?;
        let e = partial_trace_unchecked(y, &self.layout, &self.env_weights);
        let t = schur_apply(&self.multiplier.power(k), z)?;
        Ok((e.distance(&t), member))
    }

    /// Checks `E U^k J = T_φ^k` for `0 ≤ k ≤ k_max` on every matrix unit and
    /// `samples` seeded Gaussian observables.
    pub fn verify(&self, k_max: usize, tol: f64, samples: usize, seed: u64) -> Result<DilationReport> {
        if k_max > self.window() {
            return Err(Error::WindowExceeded { k: k_max, window: self.window() });
        }
        let n = self.n();
        let mut observables: Vec<CMatrix> = Vec::with_capacity(n * n + samples);
        for i in 0..n {
            for j in 0..n {
                observables.push(CMatrix::unit(n, i, j));
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        observables.extend((0..samples).map(|_| CMatrix::random_gaussian(n, n, &mut rng)));

        let per_observable: Vec<Vec<(f64, f64)>> = observables
            .par_iter()
            .map(|z| -> Result<Vec<(f64, f64)>> {
                let mut y = self.embed_j(z)?;
                let mut out = Vec::with_capacity(k_max + 1);
                for k in 0..=k_max {
                    if k > 0 {
                        y = self.apply_u(&y);
                    }
                    out.push(self.compare(&y, z, k)?);
                }
                Ok(out)
            })
            .collect::<Result<Vec<_>>>()?;

        let entries: Vec<KResidual> = (0..=k_max)
            .map(|k| {
                let (res, mem) = per_observable
                    .iter()
                    .map(|v| v[k])
                    .fold((0.0f64, 0.0f64), |acc, (r, m)| (acc.0.max(r), acc.1.max(m)));
                KResidual { k, max_residual: res, max_membership_residual: mem, pass: res <= tol }
            })
            .collect();
        Ok(DilationReport {
            window: self.window(),
            k_max,
            tol,
            observables: observables.len(),
            pass: entries.iter().all(|e| e.pass),
            entries,
        })
    }

    /// Big-space pairing `⟨U^k(J(u ⊗ v)), J(a ⊗ b)⟩ = (tr ⊗ τ^{⊗K})(U^k(J(u⊗v)) · J(a⊗b))`.
    pub fn big_space_pairing(&self, k: usize, u: &[C64], v: &[C64], a: &[C64], b: &[C64]) -> Result<C64> {
        let x = self.step(&self.embed_j(&rank1(u, v)?)?, k)?;
        let y = self.embed_j(&rank1(a, b)?)?;
        self.trace_pairing(&x, &y)
    }

    /// Structural sanity checks of `Ad(V)` on generators and random members.
    pub fn invariants(&self, samples: usize, seed: u64) -> Result<InvariantReport> {
        let unitarity = unitarity_residual(&self.v)?;
        let mut generator_membership: f64 = 0.0;
        let n = self.n();
        for i in 0..n {
            for j in 0..n {
                let y = self.step(&self.embed_j(&CMatrix::unit(n, i, j))?, 1)?;
                generator_membership = generator_membership.max(self.membership_residual(&y)?);
            }
        }
        let alg = self.algebra();
        let slot = self.slot_dim();
        let offsets = alg.offsets();
        for j in 0..self.window() {
            for (blk, &m) in alg.blocks().iter().enumerate() {
                for p in 0..m {
                    for q in 0..m {
                        let e = CMatrix::unit(slot, offsets[blk] + p, offsets[blk] + q);
                        let y = self.step(&self.slot_operator(j, &e)?, 1)?;
                        generator_membership = generator_membership.max(self.membership_residual(&y)?);
                    }
                }
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut report = InvariantReport {
            unitarity,
            generator_membership,
            multiplicativity: 0.0,
            star: 0.0,
            unitality: 0.0,
            trace_preservation: 0.0,
        };
        let id = CMatrix::identity(self.dim());
        report.unitality = self.step(&id, 1)?.distance(&id);
        for _ in 0..samples {
            let x = crate::algebra::random_member(n, alg, self.window(), &mut rng)?;
            let y = crate::algebra::random_member(n, alg, self.window(), &mut rng)?;
            let (ux, uy) = (self.step(&x, 1)?, self.step(&y, 1)?);
            let uxy = self.step(&(&x * &y), 1)?;
            let scale = 1.0 + x.frobenius_norm() * y.frobenius_norm();
            report.multiplicativity = report.multiplicativity.max(uxy.distance(&(&ux * &uy)) / scale);
            let ux_star = self.step(&x.dagger(), 1)?;
            report.star = report.star.max(ux_star.distance(&ux.dagger()) / (1.0 + x.frobenius_norm()));
            let t0 = self.trace(&x)?;
            let t1 = self.trace(&ux)?;
            report.trace_preservation = report.trace_preservation.max((t0 - t1).norm() / (1.0 + t0.norm()));
        }
        Ok(report)
    }

    /// `1_n ⊗ 1 ⊗ … ⊗ x (slot j) ⊗ … ⊗ 1`.
    pub fn slot_operator(&self, slot: usize, x: &CMatrix) -> Result<CMatrix> {
        let m = self.slot_dim();
        if x.shape() != (m, m) || slot >= self.window() {
            return Err(Error::ShapeMismatch(format!(
                "slot operator must be {m}x{m} on a slot below {}",
                self.window()
            )));
        }
        let before = m.pow(slot as u32);
        let after = m.pow((self.window() - slot - 1) as u32);
        let left = CMatrix::identity(self.n() * before);
        kron(&kron(&left, x)?, &CMatrix::identity(after))
    }
}

/// Permutation of `(ℂ^M)^{⊗K}` basis indices moving slot `j` to slot `j + 1 (mod K)`.
fn cyclic_shift(slot_dim: usize, window: usize) -> Vec<usize> {
    let env = slot_dim.pow(window as u32);
    let rest = env / slot_dim;
    // digits (s_0, …, s_{K−1}) ↦ (s_{K−1}, s_0, …, s_{K−2})
    (0..env).map(|e| (e % slot_dim) * rest + e / slot_dim).collect()
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct KResidual {
    pub k: usize,
    pub max_residual: f64,
    pub max_membership_residual: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct DilationReport {
    pub window: usize,
    pub k_max: usize,
    pub tol: f64,
    pub observables: usize,
    pub entries: Vec<KResidual>,
    pub pass: bool,
}

impl DilationReport {
    pub fn max_residual(&self) -> f64 {
        self.entries.iter().map(|e| e.max_residual).fold(0.0, f64::max)
    }

    pub fn summary(&self) -> String {
        let mut s = format!(
            "dilation check, window K = {}, {} observables, tol {:.1e}\n",
            self.window, self.observables, self.tol
        );
        for e in &self.entries {
            s.push_str(&format!(
                "  k = {:>2}: max residual {:.3e}  {}\n",
                e.k,
                e.max_residual,
                if e.pass { "PASS" } else { "FAIL" }
            ));
        }
        s.push_str(if self.pass { "PASS\n" } else { "FAIL\n" });
        s
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct InvariantReport {
    pub unitarity: f64,
    pub generator_membership: f64,
    pub multiplicativity: f64,
    pub star: f64,
    pub unitality: f64,
    pub trace_preservation: f64,
}

impl InvariantReport {
    pub fn max(&self) -> f64 {
        [
            self.unitarity,
            self.generator_membership,
            self.multiplicativity,
            self.star,
            self.unitality,
            self.trace_preservation,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// `Σ_{i,j} a_i b_j u_j v_i τ(d_i* d_j)^k`.
pub fn pairing_closed_form(
    rep: &TraceRepresentation,
    k: usize,
    u: &[C64],
    v: &[C64],
    a: &[C64],
    b: &[C64],
) -> Result<C64> {
    let phi = build_multiplier(rep).power(k);
    crate::schur::pairing(&phi, u, v, a, b)
}

/// Checks the slice identity
///
/// ```text
/// [(a ⊗ b) ⊗ I](C (u ⊗ v ⊗ I_H) D) = [(av ⊗ bu) ⊗ I]((1_t ⊗ C_s)(1_s ⊗ D_t))
/// ```
///
/// for block-diagonal `C = ⊕_s C_s`, `D = ⊕_t D_t` on `ℂ^n ⊗ H`, returning the
/// Frobenius norm of the difference of the two `B(H)`-valued sides.
pub fn slice_identity_check(
    c: &CMatrix,
    d: &CMatrix,
    n: usize,
    u: &[C64],
    v: &[C64],
    a: &[C64],
    b: &[C64],
) -> Result<f64> {
    if n == 0 || !c.is_square() || c.shape() != d.shape() || !c.rows().is_multiple_of(n) {
        return Err(Error::ShapeMismatch(format!(
            "C {:?} and D {:?} must be equal square shapes divisible by n = {n}",
            c.shape(),
            d.shape()
        )));
    }
    if [u.len(), v.len(), a.len(), b.len()].iter().any(|&l| l != n) {
        return Err(Error::ShapeMismatch(format!("vectors must have length {n}")));
    }
    let h = c.rows() / n;
    let sub = |x: &CMatrix, s: usize, t: usize| CMatrix::from_fn(h, h, |p, q| x[(s * h + p, t * h + q)]);
    for x in [c, d] {
        let mut off = 0.0f64;
        for s in 0..n {
            for t in 0..n {
                if s != t {
                    off = off.max(sub(x, s, t).max_abs());
                }
            }
        }
        if off > 0.0 {
            return Err(Error::Invalid(format!("C and D must be block-diagonal over n (off-block entry {off:.3e})")));
        }
    }

    // left side: slice the full operator C (rank1(u,v) ⊗ I) D against rank1(a, b)
    let z = &(c * &kron(&rank1(u, v)?, &CMatrix::identity(h))?) * d;
    let ab = rank1(a, b)?;
    let mut lhs = CMatrix::zeros(h, h);
    for s in 0..n {
        for t in 0..n {
            let w = ab[(t, s)];
            if w != ZERO {
                lhs = &lhs + &sub(&z, s, t).scale(w);
            }
        }
    }

    // right side: the two-variable function (s, t) ↦ C_s D_t sliced against (av)(s) (bu)(t)
    let mut rhs = CMatrix::zeros(h, h);
    for s in 0..n {
        let cs = sub(c, s, s);
        for t in 0..n {
            let dt = sub(d, t, t);
            let w = a[s] * v[s] * b[t] * u[t];
            rhs = &rhs + &(&cs * &dt).scale(w);
        }
    }
    Ok(lhs.distance(&rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::AlgebraElement;
    use crate::linalg::{I, ONE};

    fn pauli_x() -> CMatrix {
        CMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])
    }

    fn omega_rep(omega: C64) -> TraceRepresentation {
        let alg = TracialAlgebra::scalar();
        TraceRepresentation::new(
            alg.clone(),
            vec![AlgebraElement::unit(&alg), AlgebraElement::scalars(&alg, &[omega]).unwrap()],
        )
        .unwrap()
    }

    fn pauli_rep() -> TraceRepresentation {
        let alg = TracialAlgebra::matrix(2).unwrap();
        TraceRepresentation::new(
            alg.clone(),
            vec![AlgebraElement::unit(&alg), AlgebraElement::new(alg, vec![pauli_x()]).unwrap()],
        )
        .unwrap()
    }

    #[test]
    fn cyclic_shift_moves_slots_forward() {
        // M = 2, K = 3: digits (s0, s1, s2) -> (s2, s0, s1)
        let p = cyclic_shift(2, 3);
        let idx = |s: [usize; 3]| s[0] * 4 + s[1] * 2 + s[2];
        assert_eq!(p[idx([1, 0, 0])], idx([0, 1, 0]));
        assert_eq!(p[idx([0, 0, 1])], idx([1, 0, 0]));
        assert_eq!(p[idx([1, 1, 0])], idx([0, 1, 1]));
    }

    #[test]
    fn v_is_unitary_and_matches_structured_step() {
        let rep = pauli_rep();
        let sys = DilationSystem::build(&rep, 2).unwrap();
        assert!(unitarity_residual(sys.v()).unwrap() < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let y = CMatrix::random_gaussian(sys.dim(), sys.dim(), &mut rng);
        for k in 0..4 {
            let a = sys.step(&y, k).unwrap();
            let b = sys.step_dense(&y, k).unwrap();
            assert!(a.distance(&b) < 1e-10, "k = {k}");
        }
    }

    #[test]
    fn orientation_on_scalar_omega() {
        let omega = C64::from_polar(1.0, 0.6);
        let sys = DilationSystem::build(&omega_rep(omega), 3).unwrap();
        let e12 = sys.embed_j(&CMatrix::unit(2, 0, 1)).unwrap();
        let u = sys.step(&e12, 1).unwrap();
        assert!(u.distance(&e12.scale(omega)) < 1e-14);
        let u2 = sys.step(&e12, 2).unwrap();
        assert!(u2.distance(&e12.scale(omega * omega)) < 1e-14);
        // step(J(z), 1) = D̂* (P (z ⊗ 1) P*) D̂ with P acting trivially on J-range
        let e21 = sys.embed_j(&CMatrix::unit(2, 1, 0)).unwrap();
        assert!(sys.step(&e21, 1).unwrap().distance(&e21.scale(omega.conj())) < 1e-14);
    }

    #[test]
    fn pauli_rep_first_step() {
        let sys = DilationSystem::build(&pauli_rep(), 2).unwrap();
        let e12 = sys.embed_j(&CMatrix::unit(2, 0, 1)).unwrap();
        let expected = kron(&kron(&CMatrix::unit(2, 0, 1), &pauli_x()).unwrap(), &CMatrix::identity(2)).unwrap();
        assert!(sys.step(&e12, 1).unwrap().distance(&expected) < 1e-14);
    }

    #[test]
    fn step_basics() {
        let sys = DilationSystem::build(&pauli_rep(), 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let y = CMatrix::random_gaussian(sys.dim(), sys.dim(), &mut rng);
        assert_eq!(sys.step(&y, 0).unwrap(), y);
        let id = CMatrix::identity(sys.dim());
        for k in 0..4 {
            assert!(sys.step(&id, k).unwrap().distance(&id) < 1e-13);
        }
        assert!(sys.step(&CMatrix::identity(3), 1).is_err());
    }

    #[test]
    fn embed_j_examples() {
        let sys = DilationSystem::build(&omega_rep(I), 1).unwrap();
        assert_eq!(sys.embed_j(&CMatrix::unit(2, 0, 1)).unwrap(), CMatrix::unit(2, 0, 1));
        let sys = DilationSystem::build(&pauli_rep(), 2).unwrap();
        assert_eq!(sys.embed_j(&CMatrix::identity(2)).unwrap(), CMatrix::identity(sys.dim()));
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let z = CMatrix::random_gaussian(2, 2, &mut rng);
        let t = sys.trace(&sys.embed_j(&z).unwrap()).unwrap();
        assert!((t - z.trace()).norm() < 1e-12);
        assert!(sys.embed_j(&CMatrix::identity(3)).is_err());
    }

    #[test]
    fn verify_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let alg = TracialAlgebra::uniform(vec![2, 1]).unwrap();
        let u = AlgebraElement::random_unitary(&alg, &mut rng);
        let same = TraceRepresentation::new(alg, vec![u.clone(), u.clone(), u]).unwrap();
        let r = DilationSystem::build(&same, 2).unwrap().verify(2, 1e-12, 3, 0).unwrap();
        assert!(r.pass, "{r:?}");

        let omega = C64::from_polar(1.0, 2.2);
        let sys = DilationSystem::build(&omega_rep(omega), 4).unwrap();
        let r = sys.verify(4, 1e-12, 4, 1).unwrap();
        assert!(r.pass, "{r:?}");

        let sys = DilationSystem::build(&pauli_rep(), 3).unwrap();
        for k in 1..=3 {
            let y = sys.step(&sys.embed_j(&CMatrix::unit(2, 0, 1)).unwrap(), k).unwrap();
            let e = sys.cond_expectation(&y, 1e-10).unwrap();
            assert!(e.frobenius_norm() < 1e-12);
        }
        assert!(sys.verify(3, 1e-12, 2, 0).unwrap().pass);
        assert!(matches!(sys.verify(4, 1e-12, 2, 0), Err(Error::WindowExceeded { k: 4, window: 3 })));
    }

    #[test]
    fn closed_form_examples() {
        let rep = omega_rep(C64::from_polar(1.0, 0.5));
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let vs: Vec<Vec<C64>> = (0..4).map(|_| crate::linalg::random_vector(2, &mut rng)).collect();
        let (u, v, a, b) = (&vs[0], &vs[1], &vs[2], &vs[3]);
        let va: C64 = v.iter().zip(a).map(|(x, y)| x * y).sum();
        let ub: C64 = u.iter().zip(b).map(|(x, y)| x * y).sum();
        assert!((pairing_closed_form(&rep, 0, u, v, a, b).unwrap() - va * ub).norm() < 1e-12);

        let pr = pauli_rep();
        let delta: C64 = (0..2).map(|i| a[i] * b[i] * u[i] * v[i]).sum();
        assert!((pairing_closed_form(&pr, 1, u, v, a, b).unwrap() - delta).norm() < 1e-12);
    }

    #[test]
    fn dimension_cap_is_enforced() {
        let rep = pauli_rep();
        assert!(matches!(DilationSystem::build_with_cap(&rep, 3, 8), Err(Error::DimensionCap { dim: 16, cap: 8 })));
        assert!(DilationSystem::build(&rep, 0).is_err());
    }

    #[test]
    fn slice_identity_examples() {
        let n = 2;
        let u = [ONE, C64::new(2.0, 0.0)];
        let v = [C64::new(0.5, 1.0), ONE];
        let a = [ONE, I];
        let b = [C64::new(-1.0, 0.0), ONE];
        let id = CMatrix::identity(n);
        assert!(slice_identity_check(&id, &id, n, &u, &v, &a, &b).unwrap() < 1e-14);
        let c = CMatrix::diag(&[C64::new(2.0, 1.0), C64::new(0.0, -3.0)]);
        let d = CMatrix::diag(&[C64::new(1.0, 1.0), C64::new(4.0, 0.0)]);
        assert!(slice_identity_check(&c, &d, n, &u, &v, &a, &b).unwrap() < 1e-14);
        let full = CMatrix::from_fn(2, 2, |_, _| ONE);
        assert!(slice_identity_check(&full, &id, n, &u, &v, &a, &b).is_err());
    }
}
