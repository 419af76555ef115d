//! Named example representations and multipliers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::{AlgebraElement, TracialAlgebra};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64, ONE};
use crate::representation::TraceRepresentation;
use crate::schur::SchurMultiplier;

/// `d = (1, ω)` over `ℂ`; requires `|ω| = 1`.
pub fn omega_rep(omega: C64) -> Result<TraceRepresentation> {
    let alg = TracialAlgebra::scalar();
    TraceRepresentation::new(alg.clone(), vec![AlgebraElement::unit(&alg), AlgebraElement::scalars(&alg, &[omega])?])
}

/// `[[1, ω], [conj(ω), 1]]`.
pub fn omega(omega: C64) -> SchurMultiplier {
    SchurMultiplier::new(CMatrix::from_rows(&[vec![ONE, omega], vec![omega.conj(), ONE]])).expect("2x2")
}

/// The `k`-th of the `count` roots of unity, `e^{2πik/count}`.
pub fn root_of_unity(k: usize, count: usize) -> C64 {
    C64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / count as f64)
}

/// All `d_i = 1` over `ℂ`, inducing the all-ones table.
pub fn allones_rep(n: usize) -> Result<TraceRepresentation> {
    check_n(n)?;
    let alg = TracialAlgebra::scalar();
    TraceRepresentation::new(alg.clone(), vec![AlgebraElement::unit(&alg); n])
}

/// `d_i = diag(ω^{i·0}, …, ω^{i·(n−1)})` over `ℂ^n` with uniform weights,
/// `ω = e^{2πi/n}`, inducing the identity table.
pub fn identity_fourier_rep(n: usize) -> Result<TraceRepresentation> {
    check_n(n)?;
    let alg = TracialAlgebra::commutative(n)?;
    let phases: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|k| 2.0 * std::f64::consts::PI * ((i * k) % n) as f64 / n as f64).collect())
        .collect();
    TraceRepresentation::from_phases(&alg, &phases)
}

/// `d = (1, σ_x)` over `M_2`; the induced table is the identity.
pub fn pauli_rep() -> TraceRepresentation {
    let alg = TracialAlgebra::matrix(2).expect("M_2");
    let x = CMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
    TraceRepresentation::new(
        alg.clone(),
        vec![AlgebraElement::unit(&alg), AlgebraElement::new(alg, vec![x]).expect("2x2 block")],
    )
    .expect("unitary")
}

/// Haar-random unitaries over `algebra`, seeded.
pub fn planted_rep(n: usize, algebra: &TracialAlgebra, seed: u64) -> Result<TraceRepresentation> {
    check_n(n)?;
    algebra.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(TraceRepresentation::random(algebra, n, &mut rng))
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Invalid("n must be at least 1".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::I;
    use crate::representation::build_multiplier;

    #[test]
    fn omega_with_i() {
        let m = build_multiplier(&omega_rep(I).unwrap());
        assert_eq!(m, omega(I));
        assert_eq!(m.entry(1, 0), -I);
        assert!(omega_rep(C64::new(2.0, 0.0)).is_err());
    }

    #[test]
    fn fourier_is_the_identity() {
        for n in 1..6 {
            let m = build_multiplier(&identity_fourier_rep(n).unwrap());
            assert!(m.table().distance(&CMatrix::identity(n)) < 1e-14);
        }
    }

    #[test]
    fn named_tables() {
        assert_eq!(build_multiplier(&allones_rep(3).unwrap()), SchurMultiplier::all_ones(3));
        assert!(build_multiplier(&pauli_rep()).table().distance(&CMatrix::identity(2)) < 1e-15);
        let alg = TracialAlgebra::uniform(vec![2, 1]).unwrap();
        assert_eq!(planted_rep(3, &alg, 5).unwrap(), planted_rep(3, &alg, 5).unwrap());
        assert!(allones_rep(0).is_err());
    }
}
