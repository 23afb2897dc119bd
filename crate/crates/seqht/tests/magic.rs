mod common;

use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use seqht::evolution::{target_ground_state, to_complex};
use seqht::field::{analytic_ho_state, FieldGrid};
use seqht::magic::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Dense Pauli string as a Kronecker product, qubit 1 leftmost.
fn dense_pauli(n: u32, p: PauliString) -> DMatrix<Complex64> {
    let mut m = DMatrix::from_element(1, 1, c(1.0, 0.0));
    for q in 1..=n {
        let bit = 1usize << (n - q);
        let (x, z) = (p.x_mask & bit != 0, p.z_mask & bit != 0);
        let single = match (x, z) {
            (false, false) => DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]),
            (true, false) => DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]),
            (false, true) => DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)]),
            (true, true) => DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)]),
        };
        m = m.kronecker(&single);
    }
    m
}

fn random_state(rng: &mut impl Rng, len: usize) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..len).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    let s = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|a| a / s).collect()
}

/// 1 - Σ_P ⟨P⟩⁴ / d over dense Pauli matrices.
fn brute_magic(psi: &[Complex64]) -> f64 {
    let d = psi.len();
    let n = d.trailing_zeros();
    let v = nalgebra::DVector::from_column_slice(psi);
    let mut s4 = 0.0;
    for x in 0..d {
        for z in 0..d {
            let e = (v.adjoint() * dense_pauli(n, PauliString { x_mask: x, z_mask: z }) * &v)[(0, 0)].re;
            s4 += e.powi(4);
        }
    }
    1.0 - s4 / d as f64
}

#[test]
fn bitmask_expectations_match_dense_matrices() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(11);
    for n in 1..=3u32 {
        let d = 1usize << n;
        for _ in 0..5 {
            let psi = random_state(&mut rng, d);
            let v = nalgebra::DVector::from_column_slice(&psi);
            for x in 0..d {
                for z in 0..d {
                    let p = PauliString { x_mask: x, z_mask: z };
                    let dense = (v.adjoint() * dense_pauli(n, p) * &v)[(0, 0)];
                    assert!(dense.im.abs() < 1e-12);
                    assert!((pauli_expectation(&psi, p).unwrap() - dense.re).abs() < 1e-12);
                }
            }
            assert!((linear_magic(&psi).unwrap().m_lin - brute_magic(&psi)).abs() < 1e-12);
        }
    }
}

#[test]
fn target_state_correlator() {
    let g = FieldGrid::new(5, 4.0).unwrap();
    let psi = target_ground_state(&g, 10.0).unwrap();
    let zz = PauliString { x_mask: 0, z_mask: 0b11000 };
    assert!((pauli_expectation(&psi, zz).unwrap() + 0.9999).abs() < 1e-4);
}

#[test]
fn gaussian_sweep_over_register_size() {
    let (_, rows) = common::read_table("magic_vs_qubits.csv");
    let mut prev = 0.0;
    for r in rows {
        let n = r[0].unwrap() as u32;
        let g = FieldGrid::new(n, 4.0).unwrap();
        let psi = to_complex(&gaussian_state(std::f64::consts::FRAC_1_SQRT_2, 0.0, &g));
        let rep = linear_magic(&psi).unwrap();
        assert!((rep.m_lin - r[1].unwrap()).abs() <= 1e-5, "n={n}: {}", rep.m_lin);
        assert!((rep.sum_xi - 1.0).abs() < 1e-10);
        assert!(rep.m_lin > prev);
        prev = rep.m_lin;
    }
}

#[test]
fn cutoff_profile_at_nine_qubits() {
    let (_, rows) = common::read_table("magic_vs_cutoff_n9.csv");
    let g = FieldGrid::new(9, 4.0).unwrap();
    let state = gaussian_state(std::f64::consts::FRAC_1_SQRT_2, 0.0, &g);
    let cuts: Vec<usize> = rows.iter().map(|r| r[0].unwrap() as usize).collect();
    let profile = truncated_magic_profile(&state, &cuts).unwrap();
    let mut prev = f64::NEG_INFINITY;
    for r in &rows {
        let cut = r[0].unwrap() as usize;
        let m = profile[&cut];
        assert!((m - r[1].unwrap()).abs() <= 1e-5, "cut={cut}: {m}");
        assert!(m >= prev - 1e-9, "cut={cut} decreases");
        prev = m;
    }
    assert!(profile[&0].abs() < 1e-12);
}

#[test]
fn stabilizer_states_have_no_magic() {
    for n in 1..=6u32 {
        let d = 1usize << n;
        for j in 0..d {
            let mut psi = vec![c(0.0, 0.0); d];
            psi[j] = c(1.0, 0.0);
            assert!(linear_magic(&psi).unwrap().m_lin.abs() < 1e-12);
        }
        let u = vec![c((d as f64).sqrt().recip(), 0.0); d];
        assert!(linear_magic(&u).unwrap().m_lin.abs() < 1e-12);
    }
}

#[test]
fn gaussian_matches_oscillator_ground_state() {
    let g = FieldGrid::new(5, 4.0).unwrap();
    let a = gaussian_state(std::f64::consts::FRAC_1_SQRT_2, 0.0, &g);
    let b = analytic_ho_state(0, &g);
    assert!(a.iter().zip(&b).all(|(x, y)| (x - y).abs() < 2e-4));
    assert!((a.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-14);
}

#[test]
fn wide_gaussian_approaches_uniform() {
    let g = FieldGrid::new(6, 4.0).unwrap();
    let m = |sigma| linear_magic(&to_complex(&gaussian_state(sigma, 0.0, &g))).unwrap().m_lin;
    assert!(m(1e4) < 1e-12);
    assert!(m(1e4) < m(10.0) && m(10.0) < m(1.0));
}

#[test]
fn errors() {
    let psi = vec![c(1.0, 0.0), c(0.0, 0.0)];
    assert!(matches!(
        pauli_expectation(&psi, PauliString { x_mask: 0, z_mask: 2 }),
        Err(MagicError::MaskTooWide { .. })
    ));
    assert!(linear_magic(&psi[..1]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn probabilities_close(seed in any::<u64>(), n in 1u32..=7) {
        let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
        let psi = random_state(&mut rng, 1 << n);
        let rep = linear_magic(&psi).unwrap();
        prop_assert!((rep.sum_xi - 1.0).abs() < 1e-10);
        prop_assert!(rep.m_lin >= -1e-12 && rep.m_lin < 1.0);
    }
}
