//! Two-sided bounds on the (completely bounded) norm of a Schur multiplier.
//!
//! Upper bounds come from factorizations `m_{st} = ⟨α_t, β_s⟩`: the norm is at
//! most `max_t ‖α_t‖ · max_s ‖β_s‖`. Equivalently one looks for the smallest
//! `C` such that some PSD block matrix `[[X, m], [m*, Y]]` has all diagonal
//! entries `≤ C`. That feasibility problem is attacked by bisection on `C`
//! with Dykstra's alternating projections between the PSD cone and the
//! affine/box set. Every reported upper bound is certified: the final block
//! matrix is shifted by its most negative eigenvalue before factoring.
//!
//! Lower bounds are `‖T(a)‖_op / ‖a‖_op` over a fixed, seeded probe family.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{cp_check, gram_factor, schur_apply, SchurMultiplier};
use crate::linalg::{hermitian_eigen, norm, CMatrix, C64, ONE, ZERO};

#[derive(Debug, Clone)]
pub struct NormOptions {
    /// Stop once `upper − lower ≤ tol`.
    pub tol: f64,
    pub psd_tol: f64,
    pub dykstra_iters: usize,
    pub dykstra_tol: f64,
    pub bisection_steps: usize,
    pub random_probes: usize,
    pub seed: u64,
}

impl Default for NormOptions {
    fn default() -> Self {
        NormOptions {
            tol: 1e-6,
            psd_tol: 1e-10,
            dykstra_iters: 400,
            dykstra_tol: 1e-10,
            bisection_steps: 40,
            random_probes: 8,
            seed: 0x5c4u64,
        }
    }
}

/// `m_{st} = ⟨α_t, β_s⟩`; column `t` of `alpha` is `α_t`, column `s` of `beta` is `β_s`.
#[derive(Debug, Clone, Serialize)]
pub struct Factorization {
    pub alpha: CMatrix,
    pub beta: CMatrix,
}

impl Factorization {
    pub fn max_alpha(&self) -> f64 {
        max_column_norm(&self.alpha)
    }

    pub fn max_beta(&self) -> f64 {
        max_column_norm(&self.beta)
    }

    /// `max‖α_t‖ · max‖β_s‖`.
    pub fn bound(&self) -> f64 {
        self.max_alpha() * self.max_beta()
    }

    /// `‖m − [⟨α_t, β_s⟩]‖_F`.
    pub fn residual(&self, m: &CMatrix) -> f64 {
        let n = m.rows();
        let mut acc = 0.0;
        for s in 0..n {
            for t in 0..n {
                let g: C64 = (0..self.alpha.rows()).map(|k| self.alpha[(k, t)] * self.beta[(k, s)].conj()).sum();
                acc += (g - m[(s, t)]).norm_sqr();
            }
        }
        acc.sqrt()
    }
}

fn max_column_norm(a: &CMatrix) -> f64 {
    (0..a.cols()).map(|j| norm(&a.column(j))).fold(0.0, f64::max)
}

#[derive(Debug, Clone, Serialize)]
pub struct NormBounds {
    pub lower: f64,
    pub upper: f64,
    pub witness: Factorization,
    /// Name of the probe attaining `lower`.
    pub lower_probe: String,
    pub converged: bool,
}

/// Lower and certified upper bounds on `‖T_φ‖`.
pub fn norm_bounds(phi: &SchurMultiplier, opts: &NormOptions) -> NormBounds {
    let n = phi.n();
    let m = phi.table();
    let (lower, lower_probe) = probe_lower_bound(phi, opts);

    let mut best = certify(&diagonal_start(m, m.op_norm()), n);
    if phi.flags().psd || cp_check(phi, opts.psd_tol).positive {
        let h = m.hermitian_part();
        let cand = certify(&block(&h, m, &h), n);
        if cand.bound() < best.bound() {
            best = cand;
        }
    }

    if best.bound() - lower > opts.tol {
        let mut lo = lower;
        let mut hi = best.bound();
        let mut start = diagonal_start(m, hi);
        for _ in 0..opts.bisection_steps {
            if hi - lo <= opts.tol * 0.5 {
                break;
            }
            let mid = 0.5 * (lo + hi);
            let z = dykstra(&start, m, mid, opts);
            let cand = certify(&z, n);
            let cb = cand.bound();
            if cb < best.bound() {
                best = cand;
            }
            if cb <= mid + opts.tol * 0.25 {
                hi = mid;
                start = z;
            } else {
                lo = mid;
            }
            if best.bound() - lower <= opts.tol {
                break;
            }
        }
    }

    let upper = best.bound();
    NormBounds { lower, upper, converged: upper - lower <= opts.tol, witness: best, lower_probe }
}

fn probe_lower_bound(phi: &SchurMultiplier, opts: &NormOptions) -> (f64, String) {
    let n = phi.n();
    let m = phi.table();
    let mut best = (0.0, String::from("none"));
    let mut consider = |ratio: f64, name: String| {
        if ratio > best.0 {
            best = (ratio, name);
        }
    };
    // matrix units: ‖T(E_ij)‖ = |m_ij|
    for i in 0..n {
        for j in 0..n {
            consider(m[(i, j)].norm(), format!("E_{}{}", i + 1, j + 1));
        }
    }
    let mut probe = |a: &CMatrix, name: String| {
        let denom = a.op_norm();
        if denom > 0.0 {
            let t = schur_apply(phi, a).expect("probe has the right shape");
            consider(t.op_norm() / denom, name);
        }
    };
    probe(&CMatrix::identity(n), "identity".into());
    probe(&CMatrix::from_fn(n, n, |_, _| ONE), "all-ones".into());
    let aligned = CMatrix::from_fn(n, n, |s, t| {
        let z = m[(s, t)];
        if z.norm() > 0.0 {
            z.conj() / z.norm()
        } else {
            ZERO
        }
    });
    probe(&aligned, "witness-aligned".into());
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for k in 0..opts.random_probes {
        probe(&CMatrix::random_gaussian(n, n, &mut rng), format!("gaussian-{k}"));
    }
    best
}

fn block(x: &CMatrix, m: &CMatrix, y: &CMatrix) -> CMatrix {
    let n = m.rows();
    CMatrix::from_fn(2 * n, 2 * n, |p, q| match (p < n, q < n) {
        (true, true) => x[(p, q)],
        (true, false) => m[(p, q - n)],
        (false, true) => m[(q, p - n)].conj(),
        (false, false) => y[(p - n, q - n)],
    })
}

fn diagonal_start(m: &CMatrix, s: f64) -> CMatrix {
    let d = CMatrix::identity(m.rows()).scale(C64::from(s));
    block(&d, m, &d)
}

/// Shifts `z` into the PSD cone and reads off a factorization whose
/// off-diagonal block is exactly that of `z`.
fn certify(z: &CMatrix, n: usize) -> Factorization {
    let h = z.hermitian_part();
    let eig = hermitian_eigen(&h).expect("square");
    let shift = (-eig.values[0]).max(0.0);
    let shifted = &h + &CMatrix::identity(2 * n).scale(C64::from(shift));
    let eig = hermitian_eigen(&shifted).expect("square");
    let g = gram_factor(&eig, 0.0);
    let cols = |range: std::ops::Range<usize>| CMatrix::from_fn(g.rows(), n, |k, j| g[(k, range.start + j)]);
    Factorization { alpha: cols(n..2 * n), beta: cols(0..n) }
}

fn project_psd(z: &CMatrix) -> CMatrix {
    let eig = hermitian_eigen(z).expect("square");
    let dim = z.rows();
    let v = &eig.vectors;
    CMatrix::from_fn(dim, dim, |i, j| {
        let mut acc = ZERO;
        for (k, &lam) in eig.values.iter().enumerate() {
            if lam > 0.0 {
                acc += v[(i, k)] * v[(j, k)].conj() * lam;
            }
        }
        acc
    })
}

/// Projection onto `{Z Hermitian : off-diagonal block = m, Re diag ≤ c, Im diag = 0}`.
fn project_box(z: &CMatrix, m: &CMatrix, c: f64) -> CMatrix {
    let n = m.rows();
    let mut out = z.hermitian_part();
    for s in 0..n {
        for t in 0..n {
            out[(s, n + t)] = m[(s, t)];
            out[(n + t, s)] = m[(s, t)].conj();
        }
    }
    for i in 0..2 * n {
        out[(i, i)] = C64::new(out[(i, i)].re.min(c), 0.0);
    }
    out
}

fn dykstra(start: &CMatrix, m: &CMatrix, c: f64, opts: &NormOptions) -> CMatrix {
    let dim = start.rows();
    let mut x = project_box(start, m, c);
    let mut p = CMatrix::zeros(dim, dim);
    let mut q = CMatrix::zeros(dim, dim);
    for _ in 0..opts.dykstra_iters {
        let xp = &x + &p;
        let y = project_psd(&xp);
        p = &xp - &y;
        let yq = &y + &q;
        let x_new = project_box(&yq, m, c);
        q = &yq - &x_new;
        let gap = x_new.distance(&y);
        x = x_new;
        if gap <= opts.dykstra_tol {
            break;
        }
    }
    x
}
