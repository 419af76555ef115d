//! Numerical search for trace-form representations of a given multiplier.
//!
//! The unknowns are unitaries `d_1, …, d_n` in a fixed finite tracial algebra,
//! with `d_1 = 1` gauge-fixed. Each iteration moves every `d_k` (k ≥ 2) along
//! the unitary group by a Cayley retraction `d ← (1 − A/2)^{-1}(1 + A/2) d`
//! with `A` skew-Hermitian blockwise. Two update rules are available: a
//! Levenberg–Marquardt step on the real residual vector (the default, which
//! reaches machine-precision residuals on exactly representable targets) and
//! plain Riemannian gradient descent with Armijo backtracking.
//!
//! Failure to converge means no witness was found over the chosen algebra,
//! not that the multiplier has no representation.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraElement, TracialAlgebra};
use crate::error::{Error, Result, ScreenFailure};
use crate::linalg::{min_eigenvalue, CMatrix, C64, ONE, ZERO};
use crate::representation::{build_multiplier, TraceRepresentation};
use crate::schur::SchurMultiplier;

/// Diagonal entries must be within this distance of 1.
pub const DIAGONAL_TOL: f64 = 1e-8;
/// Slack allowed on `|m_ij| ≤ 1`, Hermitian symmetry and positivity.
pub const SCREEN_TOL: f64 = 1e-9;
/// Upper bound on the number of assignments enumerated by [`brute_oracle`].
pub const BRUTE_FORCE_CAP: u128 = 100_000_000;

const MAX_CAYLEY_RETRIES: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    #[default]
    LevenbergMarquardt,
    Gradient,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub algebra: TracialAlgebra,
    pub restarts: usize,
    pub max_iters: usize,
    /// Initial step for gradient descent; ignored by Levenberg–Marquardt.
    pub step_size: f64,
    pub seed: u64,
    pub target_residual: f64,
    #[serde(default)]
    pub method: Method,
}

impl SearchConfig {
    pub fn new(algebra: TracialAlgebra) -> Self {
        SearchConfig {
            algebra,
            restarts: 8,
            max_iters: 300,
            step_size: 0.5,
            seed: 0,
            target_residual: 1e-8,
            method: Method::LevenbergMarquardt,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.algebra.validate()?;
        if self.restarts == 0 {
            return Err(Error::Invalid("restarts must be at least 1".into()));
        }
        if self.max_iters == 0 {
            return Err(Error::Invalid("max_iters must be at least 1".into()));
        }
        if self.target_residual.is_nan() || self.target_residual <= 0.0 {
            return Err(Error::Invalid("target residual must be positive".into()));
        }
        if self.step_size.is_nan() || self.step_size <= 0.0 {
            return Err(Error::Invalid("step size must be positive".into()));
        }
        Ok(())
    }

    /// Seed for restart `r`; independent of the total number of restarts.
    pub fn restart_seed(&self, r: usize) -> u64 {
        self.seed ^ (r as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestartTrace {
    pub restart: usize,
    pub seed: u64,
    pub residual: f64,
    pub iterations: usize,
    /// Residual `‖m − m(d)‖_F` after each accepted iteration, starting point first.
    pub residuals: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub best_rep: TraceRepresentation,
    /// `‖m − build_multiplier(best_rep)‖_F`, recomputed from the packaged representation.
    pub residual: f64,
    pub converged: bool,
    pub target_residual: f64,
    pub best_restart: usize,
    pub restarts: Vec<RestartTrace>,
}

/// Necessary conditions for a trace-form representation: unit diagonal,
/// entries in the closed unit disk, Hermitian and positive semidefinite.
pub fn screen(m: &SchurMultiplier) -> std::result::Result<(), ScreenFailure> {
    let t = m.table();
    let n = m.n();
    for i in 0..n {
        let v = t[(i, i)];
        if (v - ONE).norm() > DIAGONAL_TOL {
            return Err(ScreenFailure::NonUnitDiagonal { index: i, value: (v.re, v.im) });
        }
    }
    for i in 0..n {
        for j in 0..n {
            let modulus = t[(i, j)].norm();
            if modulus > 1.0 + SCREEN_TOL {
                return Err(ScreenFailure::OutsideUnitDisk { row: i, col: j, modulus });
            }
        }
    }
    let residual = t.hermitian_defect();
    if residual > SCREEN_TOL {
        return Err(ScreenFailure::NotHermitian { residual });
    }
    let min = min_eigenvalue(t, SCREEN_TOL).map_err(|_| ScreenFailure::NotHermitian { residual })?;
    if min < -SCREEN_TOL {
        return Err(ScreenFailure::NotPositive { min_eigenvalue: min });
    }
    Ok(())
}

type Blocks = Vec<Vec<CMatrix>>;

fn to_blocks(rep: &TraceRepresentation) -> Blocks {
    rep.unitaries().iter().map(|d| d.blocks().to_vec()).collect()
}

fn from_blocks(alg: &TracialAlgebra, d: Blocks) -> Result<TraceRepresentation> {
    let elems = d.into_iter().map(|b| AlgebraElement::new(alg.clone(), b)).collect::<Result<Vec<_>>>()?;
    TraceRepresentation::new(alg.clone(), elems)
}

/// `τ(x* y)` for block lists.
fn tau_adj(weights: &[f64], x: &[CMatrix], y: &[CMatrix]) -> C64 {
    let mut acc = ZERO;
    for ((a, b), &w) in x.iter().zip(y).zip(weights) {
        let s: C64 = a.as_slice().iter().zip(b.as_slice()).map(|(p, q)| p.conj() * q).sum();
        acc += s * w;
    }
    acc
}

fn gram(weights: &[f64], d: &Blocks) -> CMatrix {
    let n = d.len();
    let mut g = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = tau_adj(weights, &d[i], &d[j]);
            g[(i, j)] = v;
            if i != j {
                g[(j, i)] = v.conj();
            }
        }
    }
    g
}

fn loss_blocks(weights: &[f64], m: &CMatrix, d: &Blocks) -> f64 {
    let g = gram(weights, d);
    g.as_slice().iter().zip(m.as_slice()).map(|(a, b)| (a - b).norm_sqr()).sum()
}

fn check_sizes(m: &SchurMultiplier, rep: &TraceRepresentation) -> Result<()> {
    if m.n() != rep.n() {
        return Err(Error::ShapeMismatch(format!(
            "multiplier has n = {}, representation has {} unitaries",
            m.n(),
            rep.n()
        )));
    }
    Ok(())
}

/// `‖m − build_multiplier(rep)‖_F²`.
pub fn loss(m: &SchurMultiplier, rep: &TraceRepresentation) -> Result<f64> {
    check_sizes(m, rep)?;
    Ok(loss_blocks(rep.algebra().weights(), m.table(), &to_blocks(rep)))
}

/// Riemannian gradient per unitary, as skew-Hermitian blocks `G_k` such that
/// the derivative of the loss along `d_k ← (1 + tA_k) d_k` is
/// `Σ_k Σ_b λ_b Re Tr(A_kb* G_kb)`.
fn gradient_blocks(weights: &[f64], m: &CMatrix, d: &Blocks, fix_first: bool) -> Blocks {
    let n = d.len();
    let g = gram(weights, d);
    let r = &g - m;
    (0..n)
        .map(|k| {
            (0..weights.len())
                .map(|b| {
                    let dk = &d[k][b];
                    let size = dk.rows();
                    if fix_first && k == 0 {
                        return CMatrix::zeros(size, size);
                    }
                    // W = Σ_i conj(R_ik) d_k d_i* − Σ_j conj(R_kj) d_j d_k*
                    let mut w = CMatrix::zeros(size, size);
                    for i in 0..n {
                        let c = r[(i, k)].conj();
                        if c != ZERO {
                            w = &w + &(dk * &d[i][b].dagger()).scale(c);
                        }
                        let c = r[(k, i)].conj();
                        if c != ZERO {
                            w = &w - &(&d[i][b] * &dk.dagger()).scale(c);
                        }
                    }
                    &w.dagger() - &w
                })
                .collect()
        })
        .collect()
}

/// Riemannian gradient of [`loss`] with respect to left translations of each
/// `d_k`, skew-Hermitian blockwise. `d_1` is not gauge-fixed here.
pub fn gradient(m: &SchurMultiplier, rep: &TraceRepresentation) -> Result<Vec<AlgebraElement>> {
    check_sizes(m, rep)?;
    let alg = rep.algebra();
    gradient_blocks(alg.weights(), m.table(), &to_blocks(rep), false)
        .into_iter()
        .map(|b| AlgebraElement::new(alg.clone(), b))
        .collect()
}

/// `(1 − A/2)^{-1}(1 + A/2) d`; `None` if the denominator is numerically singular.
fn cayley(a: &CMatrix, d: &CMatrix) -> Option<CMatrix> {
    let size = a.rows();
    let half = a.scale(C64::new(0.5, 0.0));
    let id = CMatrix::identity(size);
    let lhs = &id - &half;
    let rhs = &(&id + &half) * d;
    let out = lhs.solve(&rhs)?;
    if out.as_slice().iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Some(out)
    } else {
        None
    }
}

fn retract(d: &Blocks, dir: &Blocks, eta: f64) -> Option<Blocks> {
    d.iter()
        .zip(dir)
        .map(|(dk, gk)| {
            dk.iter().zip(gk).map(|(x, g)| cayley(&g.scale(C64::new(-eta, 0.0)), x)).collect::<Option<Vec<_>>>()
        })
        .collect()
}

/// `d_i ← cayley(−η · direction_i) · d_i`, halving `η` on a singular denominator.
pub fn riemannian_step(
    rep: &TraceRepresentation,
    direction: &[AlgebraElement],
    step_size: f64,
) -> Result<TraceRepresentation> {
    if direction.len() != rep.n() {
        return Err(Error::ShapeMismatch(format!("{} directions for {} unitaries", direction.len(), rep.n())));
    }
    for dir in direction {
        if dir.algebra().blocks() != rep.algebra().blocks() {
            return Err(Error::ShapeMismatch("direction lives in a different algebra".into()));
        }
        let defect: f64 = dir.blocks().iter().map(|b| (b + &b.dagger()).frobenius_norm()).sum();
        if defect > 1e-9 * (1.0 + dir.l2_norm()) {
            return Err(Error::Invalid(format!("direction is not skew-Hermitian (defect {defect:.3e})")));
        }
    }
    let d = to_blocks(rep);
    let dir: Blocks = direction.iter().map(|x| x.blocks().to_vec()).collect();
    let mut eta = step_size;
    for _ in 0..MAX_CAYLEY_RETRIES {
        if let Some(next) = retract(&d, &dir, eta) {
            return from_blocks(rep.algebra(), next);
        }
        eta *= 0.5;
    }
    Err(Error::SingularCayley { retries: MAX_CAYLEY_RETRIES })
}

/// Orthonormal-ish real basis of skew-Hermitian `size × size` matrices:
/// `iE_pp`, `E_pq − E_qp`, `i(E_pq + E_qp)`.
fn skew_basis(size: usize) -> Vec<Sparse> {
    let mut out = Vec::with_capacity(size * size);
    let i = C64::new(0.0, 1.0);
    for p in 0..size {
        out.push(vec![(p, p, i)]);
        for q in p + 1..size {
            out.push(vec![(p, q, ONE), (q, p, -ONE)]);
            out.push(vec![(p, q, i), (q, p, i)]);
        }
    }
    out
}

/// Sparse matrix as `(row, col, value)` triples.
type Sparse = Vec<(usize, usize, C64)>;

/// Levenberg–Marquardt state for one restart.
struct Lm<'a> {
    weights: &'a [f64],
    m: &'a CMatrix,
    /// (unitary k ≥ 1, block b, basis element)
    params: Vec<(usize, usize, Sparse)>,
    pairs: Vec<(usize, usize)>,
}

impl<'a> Lm<'a> {
    fn new(weights: &'a [f64], blocks: &[usize], m: &'a CMatrix) -> Self {
        let n = m.rows();
        let mut params = Vec::new();
        for k in 1..n {
            for (b, &size) in blocks.iter().enumerate() {
                for e in skew_basis(size) {
                    params.push((k, b, e));
                }
            }
        }
        let pairs = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).collect();
        Lm { weights, m, params, pairs }
    }

    /// Real residual vector over off-diagonal entries, and its Jacobian.
    fn linearize(&self, d: &Blocks) -> (DVector<f64>, DMatrix<f64>) {
        let g = gram(self.weights, d);
        let rows = 2 * self.pairs.len();
        let mut r = DVector::zeros(rows);
        for (row, &(i, j)) in self.pairs.iter().enumerate() {
            let e = g[(i, j)] - self.m[(i, j)];
            r[2 * row] = e.re;
            r[2 * row + 1] = e.im;
        }
        let mut jac = DMatrix::zeros(rows, self.params.len());
        for (col, (k, b, basis)) in self.params.iter().enumerate() {
            let (k, b) = (*k, *b);
            let w = self.weights[b];
            // τ(A X) with A the basis element in block b: λ_b Σ c X[q, p]
            let tau_a = |x: &CMatrix| -> C64 { basis.iter().map(|&(p, q, c)| c * x[(q, p)]).sum::<C64>() * w };
            for (row, &(i, j)) in self.pairs.iter().enumerate() {
                // g_ij = τ(d_i* d_j); d_k ← (1 + A) d_k
                let mut dg = ZERO;
                if j == k {
                    dg += tau_a(&(&d[k][b] * &d[i][b].dagger()));
                }
                if i == k {
                    dg -= tau_a(&(&d[j][b] * &d[k][b].dagger()));
                }
                jac[(2 * row, col)] = dg.re;
                jac[(2 * row + 1, col)] = dg.im;
            }
        }
        (r, jac)
    }

    fn direction(&self, delta: &DVector<f64>, d: &Blocks) -> Blocks {
        let mut dir: Blocks =
            d.iter().map(|dk| dk.iter().map(|x| CMatrix::zeros(x.rows(), x.cols())).collect()).collect();
        for (col, (k, b, basis)) in self.params.iter().enumerate() {
            for &(p, q, c) in basis {
                dir[*k][*b][(p, q)] += c * delta[col];
            }
        }
        dir
    }
}

fn residual_of(loss: f64) -> f64 {
    loss.max(0.0).sqrt()
}

fn run_lm(cfg: &SearchConfig, m: &CMatrix, mut d: Blocks) -> (Blocks, Vec<f64>) {
    let weights = cfg.algebra.weights();
    let lm = Lm::new(weights, cfg.algebra.blocks(), m);
    let mut cur = loss_blocks(weights, m, &d);
    let mut trace = vec![residual_of(cur)];
    if lm.params.is_empty() {
        return (d, trace);
    }
    let mut mu = 1e-3;
    let stop = (cfg.target_residual * 1e-3).powi(2);
    for _ in 0..cfg.max_iters {
        if cur <= stop {
            break;
        }
        let (r, jac) = lm.linearize(&d);
        let jt = jac.transpose();
        let jtj = &jt * &jac;
        let jtr = &jt * &r;
        if jtr.amax() < 1e-15 {
            break;
        }
        let scale = jtj.diagonal().amax().max(1e-12);
        let mut accepted = false;
        for _ in 0..40 {
            let mut a = jtj.clone();
            for p in 0..a.nrows() {
                a[(p, p)] += mu * scale;
            }
            let Some(chol) = a.cholesky() else {
                mu *= 4.0;
                continue;
            };
            // retract along −δ, so solve for +δ = (JᵀJ + μ)^{-1} Jᵀ r
            let delta = chol.solve(&jtr);
            let dir = lm.direction(&delta, &d);
            if let Some(next) = retract(&d, &dir, 1.0) {
                let val = loss_blocks(weights, m, &next);
                if val < cur {
                    d = next;
                    cur = val;
                    mu = (mu / 3.0).max(1e-15);
                    accepted = true;
                    break;
                }
            }
            mu *= 4.0;
            if mu > 1e12 {
                break;
            }
        }
        if !accepted {
            break;
        }
        trace.push(residual_of(cur));
    }
    (d, trace)
}

fn norm_sq_weighted(weights: &[f64], g: &Blocks) -> f64 {
    g.iter().flat_map(|gk| gk.iter().zip(weights).map(|(x, &w)| w * x.frobenius_norm().powi(2))).sum()
}

fn run_gradient(cfg: &SearchConfig, m: &CMatrix, mut d: Blocks) -> (Blocks, Vec<f64>) {
    let weights = cfg.algebra.weights();
    let mut cur = loss_blocks(weights, m, &d);
    let mut trace = vec![residual_of(cur)];
    let mut eta = cfg.step_size;
    let stop = (cfg.target_residual * 1e-3).powi(2);
    for _ in 0..cfg.max_iters {
        if cur <= stop {
            break;
        }
        let g = gradient_blocks(weights, m, &d, true);
        let gnorm = norm_sq_weighted(weights, &g);
        if gnorm < 1e-30 {
            break;
        }
        let mut accepted = false;
        for _ in 0..50 {
            if let Some(next) = retract(&d, &g, eta) {
                let val = loss_blocks(weights, m, &next);
                if val <= cur - 1e-4 * eta * gnorm {
                    d = next;
                    cur = val;
                    accepted = true;
                    break;
                }
            }
            eta *= 0.5;
        }
        if !accepted {
            break;
        }
        trace.push(residual_of(cur));
        eta *= 2.0;
    }
    (d, trace)
}

fn starting_point(cfg: &SearchConfig, n: usize, seed: u64) -> Blocks {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut d: Blocks =
        (0..n).map(|_| AlgebraElement::random_unitary(&cfg.algebra, &mut rng).blocks().to_vec()).collect();
    d[0] = AlgebraElement::unit(&cfg.algebra).blocks().to_vec();
    d
}

/// Searches for unitaries over `cfg.algebra` whose trace form reproduces `m`.
pub fn search(m: &SchurMultiplier, cfg: &SearchConfig) -> Result<SearchResult> {
    cfg.validate()?;
    screen(m).map_err(Error::Screen)?;
    let n = m.n();
    let table = m.table();
    let runs: Vec<(Blocks, RestartTrace)> = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| {
            let seed = cfg.restart_seed(r);
            let start = starting_point(cfg, n, seed);
            let (d, residuals) = match cfg.method {
                Method::LevenbergMarquardt => run_lm(cfg, table, start),
                Method::Gradient => run_gradient(cfg, table, start),
            };
            let residual = *residuals.last().expect("non-empty trace");
            let trace = RestartTrace { restart: r, seed, residual, iterations: residuals.len() - 1, residuals };
            (d, trace)
        })
        .collect();

    let best =
        runs.iter().enumerate().fold(0, |best, (i, (_, t))| if t.residual < runs[best].1.residual { i } else { best });
    let best_rep = from_blocks(&cfg.algebra, runs[best].0.clone())?;
    let residual = build_multiplier(&best_rep).distance(m);
    Ok(SearchResult {
        best_rep,
        residual,
        converged: residual <= cfg.target_residual,
        target_residual: cfg.target_residual,
        best_restart: best,
        restarts: runs.into_iter().map(|(_, t)| t).collect(),
    })
}

/// The default escalation of algebra shapes: ℂ, ℂ², M_2, M_2⊕ℂ, M_3.
pub fn default_ladder() -> Vec<TracialAlgebra> {
    [vec![1], vec![1, 1], vec![2], vec![2, 1], vec![3]]
        .into_iter()
        .map(|b| TracialAlgebra::uniform(b).expect("valid shape"))
        .collect()
}

/// Runs [`search`] over successive algebras, stopping at the first success.
pub fn search_ladder(m: &SchurMultiplier, ladder: &[TracialAlgebra], base: &SearchConfig) -> Result<Vec<SearchResult>> {
    let mut out = Vec::new();
    for alg in ladder {
        let cfg = SearchConfig { algebra: alg.clone(), ..base.clone() };
        let result = search(m, &cfg)?;
        let done = result.converged;
        out.push(result);
        if done {
            break;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BruteResult {
    pub residual: f64,
    /// `phases[i][s]` is the phase of `d_i` in slot `s`; `d_1 = 1`.
    pub phases: Vec<Vec<f64>>,
    pub evaluated: u128,
}

fn binomial(n: u128, k: u128) -> u128 {
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

/// Exhaustive minimum of the residual over commutative representations on
/// `ℂ^r` with uniform weights and phases on a `grid`-point lattice, `d_1 = 1`.
///
/// Slots are interchangeable under uniform weights, so only multisets of
/// per-slot phase tuples are enumerated.
pub fn brute_oracle(m: &SchurMultiplier, r: usize, grid: usize) -> Result<BruteResult> {
    let n = m.n();
    if n == 0 || n > 3 || r == 0 || r > 3 || grid == 0 {
        return Err(Error::SizeGuard(format!(
            "brute force needs 1 <= n <= 3, 1 <= r <= 3 and a positive grid (got n = {n}, r = {r}, grid = {grid})"
        )));
    }
    screen(m).map_err(Error::Screen)?;
    let tuples = (grid as u128).pow(n as u32 - 1);
    let count = binomial(tuples + r as u128 - 1, r as u128);
    if count > BRUTE_FORCE_CAP {
        return Err(Error::SizeGuard(format!("{count} assignments exceed the cap of {BRUTE_FORCE_CAP}")));
    }
    let tuples = tuples as usize;
    let roots: Vec<C64> =
        (0..grid).map(|g| C64::from_polar(1.0, 2.0 * std::f64::consts::PI * g as f64 / grid as f64)).collect();
    // slot contribution of tuple t: row i of values d_i(s)
    let values: Vec<Vec<C64>> = (0..tuples)
        .map(|mut t| {
            let mut v = vec![ONE; n];
            for slot in v.iter_mut().skip(1) {
                *slot = roots[t % grid];
                t /= grid;
            }
            v
        })
        .collect();
    let table = m.table();
    let w = 1.0 / r as f64;
    let loss_of = |codes: &[usize]| -> f64 {
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                let g: C64 = codes.iter().map(|&c| values[c][i].conj() * values[c][j]).sum::<C64>() * w;
                acc += (g - table[(i, j)]).norm_sqr();
            }
        }
        acc
    };

    fn enumerate(
        codes: &mut Vec<usize>,
        r: usize,
        tuples: usize,
        best: &mut (f64, Vec<usize>),
        eval: &dyn Fn(&[usize]) -> f64,
    ) {
        if codes.len() == r {
            let l = eval(codes);
            if l < best.0 {
                *best = (l, codes.clone());
            }
            return;
        }
        let from = *codes.last().unwrap_or(&0);
        for c in from..tuples {
            codes.push(c);
            enumerate(codes, r, tuples, best, eval);
            codes.pop();
        }
    }

    let (best_loss, best_codes) = (0..tuples)
        .into_par_iter()
        .map(|first| {
            let mut best = (f64::INFINITY, Vec::new());
            let mut codes = vec![first];
            enumerate(&mut codes, r, tuples, &mut best, &loss_of);
            best
        })
        .reduce(|| (f64::INFINITY, Vec::new()), |a, b| if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a });
    let step = 2.0 * std::f64::consts::PI / grid as f64;
    let phases = (0..n)
        .map(|i| {
            best_codes
                .iter()
                .map(|&c| if i == 0 { 0.0 } else { ((c / grid.pow(i as u32 - 1)) % grid) as f64 * step })
                .collect()
        })
        .collect();
    Ok(BruteResult { residual: residual_of(best_loss), phases, evaluated: count })
}
