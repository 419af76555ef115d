//! Library results against independently computed references.

use approx::assert_abs_diff_eq;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use schur_dilation::algebra::AlgebraElement;
use schur_dilation::dilation::{pairing_closed_form, slice_identity_check};
use schur_dilation::linalg::{random_vector, ONE, ZERO};
use schur_dilation::search::{search, SearchConfig, SearchResult};
use schur_dilation::{
    build_multiplier, instances, kron, CMatrix, DilationSystem, SchurMultiplier, TraceRepresentation, TracialAlgebra,
    C64,
};

fn identity_power(dim: usize, times: usize) -> CMatrix {
    CMatrix::identity(dim.pow(times as u32))
}

/// `x^{⊗k}` (the empty product is the 1×1 identity).
fn tensor_power(x: &CMatrix, k: usize) -> CMatrix {
    (0..k).fold(CMatrix::identity(1), |acc, _| kron(&acc, x).unwrap())
}

#[test]
fn steps_of_matrix_units_are_tensor_powers() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for (blocks, n, window) in [(vec![2], 3, 3), (vec![2, 1], 2, 3), (vec![1, 1], 3, 2), (vec![1], 2, 4)] {
        let alg = TracialAlgebra::uniform(blocks).unwrap();
        let rep = TraceRepresentation::random(&alg, n, &mut rng);
        let sys = DilationSystem::build(&rep, window).unwrap();
        let embedded: Vec<CMatrix> = rep.unitaries().iter().map(AlgebraElement::embed).collect();
        let m = alg.embedding_dim();
        for i in 0..n {
            for j in 0..n {
                let u = &embedded[i].dagger() * &embedded[j];
                let jz = sys.embed_j(&CMatrix::unit(n, i, j)).unwrap();
                for k in 0..=window {
                    let expected = kron(
                        &kron(&CMatrix::unit(n, i, j), &tensor_power(&u, k)).unwrap(),
                        &identity_power(m, window - k),
                    )
                    .unwrap();
                    let got = sys.step(&jz, k).unwrap();
                    assert!(got.distance(&expected) < 1e-12, "i = {i}, j = {j}, k = {k}");
                }
            }
        }
    }
}

#[test]
fn structured_step_agrees_with_dense_powers_of_v() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let alg = TracialAlgebra::uniform(vec![2, 1]).unwrap();
    let rep = TraceRepresentation::random(&alg, 2, &mut rng);
    let sys = DilationSystem::build(&rep, 2).unwrap();
    let y = CMatrix::random_gaussian(sys.dim(), sys.dim(), &mut rng);
    for k in 0..=4 {
        let a = sys.step(&y, k).unwrap();
        let mut vk = CMatrix::identity(sys.dim());
        for _ in 0..k {
            vk = &vk * sys.v();
        }
        let b = &(&vk * &y) * &vk.dagger();
        assert!(a.distance(&b) < 1e-11, "k = {k}");
    }
}

#[test]
fn conditional_expectation_is_the_weighted_partial_trace() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let alg = TracialAlgebra::new(vec![1, 2], vec![0.4, 0.3]).unwrap();
    let n = 2;
    let window = 2;
    let rep = TraceRepresentation::random(&alg, n, &mut rng);
    let sys = DilationSystem::build(&rep, window).unwrap();
    let y = schur_dilation::algebra::random_member(n, &alg, window, &mut rng).unwrap();
    // slot weights: λ_k on every diagonal position of block k
    let w: Vec<f64> = alg.weight_vector();
    let m = alg.embedding_dim();
    let env = m * m;
    let expected = CMatrix::from_fn(n, n, |a, b| {
        let mut acc = ZERO;
        for s0 in 0..m {
            for s1 in 0..m {
                let e = s0 * m + s1;
                acc += y[(a * env + e, b * env + e)] * (w[s0] * w[s1]);
            }
        }
        acc
    });
    let got = sys.cond_expectation(&y, 1e-10).unwrap();
    assert!(got.distance(&expected) < 1e-13);
}

#[test]
fn pairing_closed_form_is_the_double_sum() {
    let omega = C64::from_polar(1.0, 1.1);
    let rep = instances::omega_rep(omega).unwrap();
    let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let e = [h, h];
    // all four vectors equal (1,1)/√2: Σ_ij m_ij / 4
    let table = [[ONE, omega], [omega.conj(), ONE]];
    let direct: C64 = table.iter().flatten().sum::<C64>() / 4.0;
    let got = pairing_closed_form(&rep, 1, &e, &e, &e, &e).unwrap();
    assert_abs_diff_eq!(got.re, direct.re, epsilon = 1e-15);
    assert_abs_diff_eq!(got.im, direct.im, epsilon = 1e-15);
    assert_abs_diff_eq!(got.re, (2.0 + 2.0 * 1.1f64.cos()) / 4.0, epsilon = 1e-15);

    let sys = DilationSystem::build(&rep, 3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    let vs: Vec<Vec<C64>> = (0..4).map(|_| random_vector(2, &mut rng)).collect();
    for k in 0..=3 {
        let mut direct = ZERO;
        for i in 0..2 {
            for j in 0..2 {
                direct += vs[2][i] * vs[3][j] * vs[0][j] * vs[1][i] * table[i][j].powu(k as u32);
            }
        }
        let closed = pairing_closed_form(&rep, k, &vs[0], &vs[1], &vs[2], &vs[3]).unwrap();
        let big = sys.big_space_pairing(k, &vs[0], &vs[1], &vs[2], &vs[3]).unwrap();
        assert!((closed - direct).norm() < 1e-13);
        assert!((big - direct).norm() < 1e-13);
    }
}

#[test]
fn slice_identity_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(25);
    let (n, h) = (3, 2);
    let blocks: Vec<(CMatrix, CMatrix)> =
        (0..n).map(|_| (CMatrix::random_gaussian(h, h, &mut rng), CMatrix::random_gaussian(h, h, &mut rng))).collect();
    let assemble = |pick: &dyn Fn(usize) -> CMatrix| {
        CMatrix::from_fn(n * h, n * h, |p, q| if p / h == q / h { pick(p / h)[(p % h, q % h)] } else { ZERO })
    };
    let c = assemble(&|s| blocks[s].0.clone());
    let d = assemble(&|s| blocks[s].1.clone());
    let vs: Vec<Vec<C64>> = (0..4).map(|_| random_vector(n, &mut rng)).collect();
    let r = slice_identity_check(&c, &d, n, &vs[0], &vs[1], &vs[2], &vs[3]).unwrap();
    assert!(r < 1e-12, "{r}");
}

#[test]
fn artifacts_survive_json() {
    let mut rng = ChaCha8Rng::seed_from_u64(26);
    let alg = TracialAlgebra::uniform(vec![2, 1]).unwrap();
    let rep = TraceRepresentation::random(&alg, 2, &mut rng);
    let text = serde_json::to_string(&rep).unwrap();
    let back: TraceRepresentation = serde_json::from_str(&text).unwrap();
    assert_eq!(back, rep);

    let sys = DilationSystem::build(&rep, 2).unwrap();
    let text = serde_json::to_string(&sys).unwrap();
    let back: DilationSystem = serde_json::from_str(&text).unwrap();
    assert_eq!(back.v(), sys.v());

    let m = build_multiplier(&rep);
    let back: SchurMultiplier = serde_json::from_str(&serde_json::to_string(&m).unwrap()).unwrap();
    assert_eq!(back, m);

    let result = search(&m, &SearchConfig { restarts: 2, ..SearchConfig::new(alg) }).unwrap();
    let back: SearchResult = serde_json::from_str(&serde_json::to_string(&result).unwrap()).unwrap();
    assert_eq!(back, result);
    assert!((build_multiplier(&back.best_rep).distance(&m) - result.residual).abs() < 1e-12);
}

#[test]
fn search_is_deterministic_and_repacks_its_residual() {
    let mut rng = ChaCha8Rng::seed_from_u64(27);
    let alg = TracialAlgebra::matrix(2).unwrap();
    let rep = TraceRepresentation::random(&alg, 3, &mut rng);
    let m = build_multiplier(&rep);
    let cfg = SearchConfig { restarts: 4, seed: 99, ..SearchConfig::new(alg) };
    let a = search(&m, &cfg).unwrap();
    let b = search(&m, &cfg).unwrap();
    for (x, y) in a.restarts.iter().zip(&b.restarts) {
        assert_eq!(x.residuals, y.residuals);
    }
    let internal = a.restarts[a.best_restart].residual;
    assert!((internal - a.residual).abs() < 1e-12);
    for d in a.best_rep.unitaries() {
        assert!(d.unitarity_residual() < 1e-10);
    }
}
