use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::DMatrix;
use proptest::prelude::*;
use seqht::circuit::*;
use seqht::evolution::{AspSchedule, Evolver};
use seqht::field::{self, FieldGrid, HamiltonianSpec};
use seqht::walsh::SequencyOp;
use seqht::Complex64;

type CMat = DMatrix<Complex64>;

const A2A: Connectivity = Connectivity::AllToAll;
const LIN: Connectivity = Connectivity::LinearChain;

/// max |U - e^{iα}V| with α taken from the largest entry of V.
fn phase_distance(u: &CMat, v: &CMat) -> f64 {
    let (idx, _) = v.iter().enumerate().fold((0, 0.0), |best, (i, z)| if z.norm() > best.1 { (i, z.norm()) } else { best });
    let ph = u[idx] / v[idx];
    let ph = ph / ph.norm();
    (u - v.map(|z| z * ph)).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn diag_unitary(phases: impl Iterator<Item = f64>) -> CMat {
    let d: Vec<Complex64> = phases.map(|p| Complex64::from_polar(1.0, p)).collect();
    CMat::from_diagonal(&nalgebra::DVector::from_vec(d))
}

/// Bit value of qubit q (1-based, qubit 1 most significant) in index j.
fn bit(j: usize, n: u32, q: u32) -> i32 {
    ((j >> (n - q)) & 1) as i32
}

fn z(j: usize, n: u32, q: u32) -> f64 {
    f64::from(1 - 2 * bit(j, n, q))
}

#[test]
fn single_cnot_pair_counts_two() {
    let op = SequencyOp::new(24, 5).unwrap();
    assert_eq!(op.qubits(), vec![3, 5]);
    let c = synth_sequency_rotation(&op, 0.3, A2A).unwrap();
    let r = count_resources(&c);
    assert_eq!((r.two_qubit_count, r.two_qubit_depth), (2, 2));
    assert_eq!(c.gates.iter().filter(|g| matches!(g, Gate::Rz { .. })).count(), 1);
}

#[test]
fn ladder_over_four_qubits() {
    let op = SequencyOp::new(10, 5).unwrap();
    assert_eq!(op.qubits(), vec![1, 2, 3, 4]);
    for conn in [A2A, LIN] {
        let c = synth_sequency_rotation(&op, 0.3, conn).unwrap();
        assert_eq!(c.cnot_count(), 6);
    }
}

#[test]
fn single_z_and_empty_masks() {
    let op = SequencyOp::new(1, 5).unwrap();
    let c = synth_sequency_rotation(&op, 0.3, LIN).unwrap();
    assert_eq!((c.cnot_count(), c.gates.len()), (0, 1));
    let id = SequencyOp::new(0, 5).unwrap();
    assert!(synth_sequency_rotation(&id, 0.3, LIN).is_err());
}

#[test]
fn every_sequency_rotation_is_exact() {
    for n in 1..=5u32 {
        for nu in 1..1usize << n {
            let op = SequencyOp::new(nu, n).unwrap();
            let theta = 0.37 + nu as f64 * 0.11;
            let target = diag_unitary((0..1usize << n).map(|j| -theta / 2.0 * f64::from(op.sign(j))));
            for conn in [A2A, LIN] {
                let c = synth_sequency_rotation(&op, theta, conn).unwrap();
                c.validate().unwrap();
                let d = phase_distance(&unitary(&c).unwrap(), &target);
                assert!(d < 1e-12, "n={n} nu={nu} {conn:?}: {d}");
                if conn == A2A {
                    assert_eq!(c.cnot_count(), 2 * (op.weight() as usize - 1));
                }
            }
        }
    }
}

fn all_pairs(n: u32) -> BTreeMap<(u32, u32), f64> {
    let mut m = BTreeMap::new();
    for a in 1..=n {
        for b in a + 1..=n {
            m.insert((a, b), 0.1 * f64::from(a) + 0.37 * f64::from(b));
        }
    }
    m
}

fn zz_target(n: u32, angles: &BTreeMap<(u32, u32), f64>) -> CMat {
    diag_unitary((0..1usize << n).map(|j| {
        -angles.iter().map(|(&(a, b), t)| t / 2.0 * z(j, n, a) * z(j, n, b)).sum::<f64>()
    }))
}

#[test]
fn phi2_block_formula_counts() {
    for n in 3..=8u32 {
        let c = synth_phi2_block(n, &all_pairs(n)).unwrap();
        c.validate().unwrap();
        let r = count_resources(&c);
        let n = n as usize;
        assert_eq!(r.two_qubit_count, n * (n - 1), "count at n={n}");
        assert_eq!(r.two_qubit_depth, n * (n - 2) + 3, "depth at n={n}");
    }
    let r = count_resources(&synth_phi2_block(5, &all_pairs(5)).unwrap());
    assert_eq!((r.two_qubit_count, r.two_qubit_depth), (20, 18));
    let r = count_resources(&synth_phi2_block(12, &all_pairs(12)).unwrap());
    assert_eq!((r.two_qubit_count, r.two_qubit_depth), (132, 123));
}

#[test]
fn phi2_block_single_adjacent_pair() {
    let angles = BTreeMap::from([((2, 3), 0.4)]);
    let c = synth_phi2_block(4, &angles).unwrap();
    assert_eq!(c.cnot_count(), 2);
    assert_eq!(c.gates.iter().filter(|g| matches!(g, Gate::Rz { .. })).count(), 1);
    assert!(synth_phi2_block(4, &BTreeMap::from([((3, 3), 0.4)])).is_err());
    assert_eq!(synth_phi2_block(4, &BTreeMap::new()).unwrap().gates.len(), 0);
}

#[test]
fn phi2_block_is_exact() {
    for n in 2..=5u32 {
        let full = all_pairs(n);
        let d = phase_distance(&unitary(&synth_phi2_block(n, &full).unwrap()).unwrap(), &zz_target(n, &full));
        assert!(d < 1e-12, "n={n}: {d}");
        // A sparse subset on an inner span.
        let sub: BTreeMap<_, _> = full.into_iter().filter(|((a, b), _)| *a > 1 && (a + b) % 2 == 1).collect();
        let d = phase_distance(&unitary(&synth_phi2_block(n, &sub).unwrap()).unwrap(), &zz_target(n, &sub));
        assert!(d < 1e-12, "subset n={n}: {d}");
    }
}

fn bit_reverse(j: usize, n: u32) -> usize {
    (0..n).fold(0, |r, i| r | (((j >> i) & 1) << (n - 1 - i)))
}

#[test]
fn qft_matches_fourier_matrix_with_reversed_output() {
    for n in 1..=5u32 {
        let len = 1usize << n;
        let s = (len as f64).sqrt().recip();
        let target = CMat::from_fn(len, len, |r, x| {
            let y = bit_reverse(r, n);
            Complex64::from_polar(s, 2.0 * PI * (x * y) as f64 / len as f64)
        });
        for conn in [A2A, LIN] {
            let c = synth_qft(n, conn);
            c.validate().unwrap();
            let d = phase_distance(&unitary(&c).unwrap(), &target);
            assert!(d < 1e-10, "n={n} {conn:?}: {d}");
        }
    }
}

#[test]
fn nearest_neighbour_qft_counts() {
    assert_eq!(synth_qft(1, LIN).cnot_count(), 0);
    for n in 2..=8u32 {
        let r = count_resources(&synth_qft(n, LIN));
        let f = (n * n + n - 4) as usize;
        assert_eq!((r.two_qubit_count, r.two_qubit_depth), (f, f), "n={n}");
    }
    let r = count_resources(&synth_qft(5, LIN));
    assert_eq!(r.two_qubit_depth, 26);
}

/// exp(-i t/2 Π̂²) from the eigendecomposition of the dense real operator.
fn kinetic_oracle(grid: &FieldGrid<f64>, t: f64) -> CMat {
    let eig = field::pi_squared_operator(grid).symmetric_eigen();
    let v = eig.eigenvectors.map(|x| Complex64::new(x, 0.0));
    let d = diag_unitary(eig.eigenvalues.iter().map(|l| -t / 2.0 * l));
    &v * d * v.adjoint()
}

#[test]
fn pi_block_matches_kinetic_exponential() {
    for n in 1..=4u32 {
        let grid = FieldGrid::new(n, 3.1).unwrap();
        let target = kinetic_oracle(&grid, 0.45);
        for conn in [A2A, LIN] {
            let c = synth_pi_block(&grid, 0.45, conn).unwrap();
            c.validate().unwrap();
            let d = phase_distance(&unitary(&c).unwrap(), &target);
            assert!(d < 1e-10, "n={n} {conn:?}: {d}");
        }
    }
}

#[test]
fn phi_block_matches_truncated_potential() {
    let grid = FieldGrid::new(4, 3.4).unwrap();
    for (cut4, cut2) in [(None, None), (Some(6), None), (Some(6), Some(3))] {
        let spec = HamiltonianSpec { lambda: 0.0, nu_cut_phi4: cut4, nu_cut_phi2: cut2, drop_identity: true };
        let (h2, p4) = field::potential_terms(&grid, &spec).unwrap();
        let target = diag_unitary(h2.iter().zip(&p4).map(|(a, b)| -(0.3 * a + 0.07 * b)));
        for conn in [A2A, LIN] {
            let c = synth_phi_block(&grid, 0.3, 0.07, cut4, cut2, conn).unwrap();
            let d = phase_distance(&unitary(&c).unwrap(), &target);
            assert!(d < 1e-10, "{cut4:?} {cut2:?} {conn:?}: {d}");
        }
    }
}

fn simulate_from_zero(c: &Circuit) -> Vec<Complex64> {
    let mut v = vec![Complex64::new(0.0, 0.0); 1usize << c.n_qubits];
    v[0] = Complex64::new(1.0, 0.0);
    apply(c, &mut v).unwrap();
    v
}

fn overlap_sq(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<Complex64>().norm_sqr()
}

#[test]
fn state_prep_reaches_free_ground_state() {
    // One qubit is degenerate: both grid points see the same potential.
    for n in 2..=6u32 {
        let grid = FieldGrid::new(n, field::optimal_phi_max(n)).unwrap();
        let h = field::build_hamiltonian(&grid, &HamiltonianSpec::free()).unwrap();
        let (_, gs) = field::ground_state(&h);
        let gs: Vec<Complex64> = gs.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        let angles = state_prep_angles(&gs.iter().map(|z| z.re).collect::<Vec<_>>()).unwrap();
        for conn in [A2A, LIN] {
            let c = synth_state_prep(n, &angles, conn).unwrap();
            c.validate().unwrap();
            let f = overlap_sq(&simulate_from_zero(&c), &gs);
            assert!(f > 1.0 - 1e-10, "n={n} {conn:?}: {f}");
        }
    }
}

#[test]
fn state_prep_counts() {
    for n in 2..=8u32 {
        let angles: Vec<Vec<f64>> = (0..n - 1).map(|k| vec![0.3; 1 << k]).collect();
        let c = synth_state_prep(n, &angles, A2A).unwrap();
        assert_eq!(c.cnot_count(), (1usize << (n - 1)) + n as usize - 3, "n={n}");
    }
    let angles: Vec<Vec<f64>> = (0..4).map(|k| vec![0.3; 1 << k]).collect();
    assert_eq!(synth_state_prep(5, &angles, A2A).unwrap().cnot_count(), 18);
}

#[test]
fn state_prep_rejects_asymmetric_input() {
    assert!(state_prep_angles(&[1.0, 0.0, 0.0, 0.0]).is_err());
    assert!(state_prep_angles(&[0.5, 0.5, 0.5]).is_err());
    assert!(synth_state_prep(3, &[vec![0.1]], A2A).is_err());
}

#[test]
fn assembled_circuit_reproduces_trotter_run() {
    let n = 4;
    let grid = FieldGrid::new(n, field::optimal_phi_max(n)).unwrap();
    for (cut4, cut2) in [(None, None), (Some(6), None)] {
        let mut s = AspSchedule::new(2, 0.4, 10.0);
        s.nu_cut_phi4 = cut4;
        s.nu_cut_phi2 = cut2;
        s.merge_adjacent = true;
        let evolver = Evolver::for_schedule(&grid, &s).unwrap();
        let (_, gs) = field::ground_state(&field::build_hamiltonian(&grid, &HamiltonianSpec::free()).unwrap());
        let initial: Vec<Complex64> = gs.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        let expected = evolver.run(&s, &initial).unwrap();
        for conn in [A2A, LIN] {
            let a = assemble_asp_circuit(&s, &grid, conn).unwrap();
            a.circuit.validate().unwrap();
            let f = overlap_sq(&simulate_from_zero(&a.circuit), &expected);
            assert!(f > 1.0 - 1e-10, "{cut4:?} {conn:?}: {f}");
            let raw: usize = a.by_block.values().map(|r| r.two_qubit_count).sum();
            assert!(a.resources().two_qubit_count <= raw);
        }
    }
}

#[test]
fn assembly_needs_second_order() {
    let grid = FieldGrid::new(3, 2.0).unwrap();
    let mut s = AspSchedule::new(2, 0.4, 10.0);
    s.order = seqht::evolution::TrotterOrder::First;
    assert!(assemble_asp_circuit(&s, &grid, LIN).is_err());
}

#[test]
fn qasm_export_round_trip_shape() {
    let op = SequencyOp::new(24, 5).unwrap();
    let c = synth_sequency_rotation(&op, 0.5, A2A).unwrap();
    let text = export_qasm(&c).unwrap();
    assert!(text.starts_with("OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[5];\n"));
    assert_eq!(text.matches("cx ").count(), 2);
    assert_eq!(text.matches("rz(").count(), 1);
    let mut bad = c.clone();
    bad.push(Gate::Rz { qubit: 1, angle: f64::NAN });
    assert!(export_qasm(&bad).is_err());
}

fn op_strategy(n: u32) -> impl Strategy<Value = SequencyOp> {
    (1usize..1 << n).prop_map(move |nu| SequencyOp::new(nu, n).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cancellation_preserves_unitary_and_never_grows(
        a in op_strategy(5), b in op_strategy(5), ta in -3.0..3.0f64, tb in -3.0..3.0f64, linear in any::<bool>()
    ) {
        let conn = if linear { LIN } else { A2A };
        let mut c = synth_sequency_rotation(&a, ta, conn).unwrap();
        c.extend(&synth_sequency_rotation(&b, tb, conn).unwrap());
        let opt = cancel_cnots(&c);
        prop_assert!(opt.cnot_count() <= c.cnot_count());
        let d = phase_distance(&unitary(&opt).unwrap(), &unitary(&c).unwrap());
        prop_assert!(d < 1e-12);
        let r = count_resources(&opt);
        prop_assert!(r.two_qubit_depth <= r.two_qubit_count);
    }
}

#[test]
fn chain_state_prep_uses_nearest_neighbour_walks() {
    // Multiplexor walks cost 2, 8, 20, 44 for 1..=4 controls; the
    // reflection fan-out costs 2n-3 on a chain.
    let walk = [0usize, 2, 8, 20, 44];
    for n in 2..=6u32 {
        let angles: Vec<Vec<f64>> = (0..n - 1).map(|k| vec![0.3; 1 << k]).collect();
        let c = synth_state_prep(n, &angles, LIN).unwrap();
        c.validate().unwrap();
        let expected: usize = walk[..n as usize - 1].iter().sum::<usize>() + 2 * n as usize - 3;
        assert_eq!(c.cnot_count(), expected, "n={n}");
    }
}

/// Reference counts on a linear chain, n_q = 5, φ_max = 4, λ = 10.
#[test]
fn resource_totals_near_published_counts() {
    let grid = FieldGrid::new(5, 4.0).unwrap();
    let cases = [
        (None, 1, false, 173, 156),
        (Some(14), 1, false, 117, 101),
        (None, 2, true, 321, 291),
        (Some(14), 2, true, 237, 208),
    ];
    for (cut, steps, prep, count, depth) in cases {
        let mut s = AspSchedule::new(steps, 0.4, 10.0);
        s.nu_cut_phi4 = cut;
        s.merge_adjacent = true;
        let r = assemble_evolution(&s, &grid, LIN, prep).unwrap().resources();
        let rel = |ours: usize, theirs: usize| (ours as f64 - theirs as f64).abs() / theirs as f64;
        assert!(rel(r.two_qubit_count, count) <= 0.10, "{cut:?} {steps}: count {} vs {count}", r.two_qubit_count);
        assert!(rel(r.two_qubit_depth, depth) <= 0.10, "{cut:?} {steps}: depth {} vs {depth}", r.two_qubit_depth);
    }
}
