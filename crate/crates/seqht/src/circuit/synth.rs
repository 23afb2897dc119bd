use std::collections::BTreeMap;
use std::f64::consts::PI;

use super::{cancel_cnots, count_resources, Circuit, CircuitError, Connectivity, Gate, ResourceReport};
use crate::evolution::{AspSchedule, TrotterOrder};
use crate::field::{self, FieldGrid, HamiltonianSpec, MomentumBasis};
use crate::walsh::{self, SequencyOp};

/// Relative size below which a Walsh coefficient is treated as zero.
const ANGLE_TOL: f64 = 1e-12;

fn cx(c: &mut Circuit, control: u32, target: u32) {
    c.push(Gate::cx(control, target));
}

fn rz(c: &mut Circuit, qubit: u32, angle: f64) {
    if angle != 0.0 {
        c.push(Gate::Rz { qubit, angle });
    }
}

/// exp(-iθ/2 · Z_S) for the qubits S of `op`.
///
/// All-to-all: CNOTs between consecutive members, RZ on the last one, then
/// the mirror. Linear chain: the ladder runs over the whole span and every
/// non-member g is first folded into g+1, which keeps all hops adjacent.
pub fn synth_sequency_rotation(
    op: &SequencyOp,
    theta: f64,
    connectivity: Connectivity,
) -> Result<Circuit, CircuitError> {
    let members = op.qubits();
    let (Some(&first), Some(&last)) = (members.first(), members.last()) else {
        return Err(CircuitError::Synthesis("empty Z-string is a global phase".into()));
    };
    let mut compute = Circuit::new(op.n_qubits, connectivity);
    match connectivity {
        Connectivity::AllToAll => {
            for w in members.windows(2) {
                cx(&mut compute, w[0], w[1]);
            }
        }
        Connectivity::LinearChain => {
            for g in (first + 1..last).rev().filter(|g| !members.contains(g)) {
                cx(&mut compute, g, g + 1);
            }
            for q in first..last {
                cx(&mut compute, q, q + 1);
            }
        }
    }
    let mut c = compute.clone();
    c.push(Gate::Rz { qubit: last, angle: theta });
    c.extend(&compute.inverse());
    Ok(c)
}

/// Overlaid nearest-neighbour network of exp(-iθ_ab/2 · Z_a Z_b).
///
/// Stage a leaves qubit j > a holding x_a ⊕ x_j, so every pair (a, j)
/// gets its RZ on qubit j. Moving from stage a to a+1 costs one descending
/// and one ascending ladder. Absent pairs are skipped but the parity
/// network is kept, so the count is that of the complete set on the span.
pub fn synth_phi2_block(n_qubits: u32, angles: &BTreeMap<(u32, u32), f64>) -> Result<Circuit, CircuitError> {
    let mut c = Circuit::new(n_qubits, Connectivity::LinearChain);
    for &(a, b) in angles.keys() {
        if a == 0 || a >= b || b > n_qubits {
            return Err(CircuitError::Synthesis(format!("bad pair ({a}, {b})")));
        }
    }
    let Some(lo) = angles.keys().map(|p| p.0).min() else { return Ok(c) };
    let hi = angles.keys().map(|p| p.1).max().unwrap_or(lo);
    let m = hi - lo + 1;
    let q = |i: u32| lo - 1 + i;
    let stage_rz = |c: &mut Circuit, a: u32| {
        for b in a + 1..=m {
            if let Some(&t) = angles.get(&(q(a), q(b))) {
                rz(c, q(b), t);
            }
        }
    };
    for k in (1..m).rev() {
        cx(&mut c, q(k), q(k + 1));
    }
    for k in 2..m {
        cx(&mut c, q(k), q(k + 1));
    }
    stage_rz(&mut c, 1);
    for a in 1..m.saturating_sub(1) {
        for k in (a..m).rev() {
            cx(&mut c, q(k), q(k + 1));
        }
        for k in a + 2..m {
            cx(&mut c, q(k), q(k + 1));
        }
        stage_rz(&mut c, a + 1);
    }
    cx(&mut c, q(m - 1), q(m));
    Ok(c)
}

/// exp(-i diag) up to a global phase, from the Walsh expansion of `diag`.
/// Two-body terms go through [`synth_phi2_block`], the rest through ladders.
pub fn synth_diagonal(diag: &[f64], connectivity: Connectivity) -> Result<Circuit, CircuitError> {
    let spec = walsh::decompose(diag).map_err(|e| CircuitError::Synthesis(e.to_string()))?;
    let n = spec.n_qubits;
    let cut = ANGLE_TOL * spec.max_abs();
    let mut pairs = BTreeMap::new();
    let mut others = Vec::new();
    for (op, beta) in spec.ops() {
        if beta.abs() <= cut || op.z_mask == 0 {
            continue;
        }
        // exp(-iβ Z_S) = RZ(2β) on the parity.
        let theta = 2.0 * beta;
        match op.qubits()[..] {
            [a, b] => {
                pairs.insert((a, b), theta);
            }
            _ => others.push((op, theta)),
        }
    }
    // Ladders first: the block then ends on the ZZ network's outer CNOT,
    // which meets the opening ladder of a following QFT.
    let mut c = Circuit::new(n, connectivity);
    for (op, theta) in others {
        c.extend(&synth_sequency_rotation(&op, theta, connectivity)?);
    }
    c.extend(&synth_phi2_block(n, &pairs)?);
    Ok(c)
}

fn cp_angle(k: u32, j: u32) -> f64 {
    PI / f64::from(1u32 << (j - k))
}

/// Swap-free QFT: output qubit k carries the bit of weight 2^{k-1}.
pub fn synth_qft(n_qubits: u32, connectivity: Connectivity) -> Circuit {
    let n = n_qubits;
    let mut c = Circuit::new(n, connectivity);
    // CP(φ) = e^{iφ/4} RZ_a(φ/2) RZ_b(φ/2) exp(+iφ/4 Z_a Z_b).
    let before_h = |j: u32| (1..j).map(|k| cp_angle(k, j) / 2.0).sum::<f64>();
    let after_h = |k: u32| (k + 1..=n).map(|j| cp_angle(k, j) / 2.0).sum::<f64>();
    if n <= 1 || connectivity == Connectivity::AllToAll {
        for k in 1..=n {
            rz(&mut c, k, before_h(k));
            c.push(Gate::H { qubit: k });
            rz(&mut c, k, after_h(k));
            for j in k + 1..=n {
                cx(&mut c, k, j);
                rz(&mut c, j, -cp_angle(k, j) / 2.0);
                cx(&mut c, k, j);
            }
        }
        return c;
    }
    c.push(Gate::H { qubit: 1 });
    rz(&mut c, 1, after_h(1));
    for k in (1..n).rev() {
        cx(&mut c, k, k + 1);
    }
    for k in 2..n {
        cx(&mut c, k, k + 1);
    }
    for j in 2..=n {
        rz(&mut c, j, -cp_angle(1, j) / 2.0);
    }
    for a in 1..n - 1 {
        for k in (a..n).rev() {
            cx(&mut c, k, k + 1);
        }
        // Qubit a+2 must not carry x_{a+1} across the Hadamard.
        cx(&mut c, a + 1, a + 2);
        rz(&mut c, a + 1, before_h(a + 1));
        c.push(Gate::H { qubit: a + 1 });
        rz(&mut c, a + 1, after_h(a + 1));
        cx(&mut c, a + 1, a + 2);
        for k in a + 2..n {
            cx(&mut c, k, k + 1);
        }
        for j in a + 2..=n {
            rz(&mut c, j, -cp_angle(a + 1, j) / 2.0);
        }
    }
    cx(&mut c, n - 1, n);
    rz(&mut c, n, before_h(n));
    c.push(Gate::H { qubit: n });
    c
}

/// P(-Mπ/2^k) on each qubit k, M = 2^n - 1: the centring phases of the
/// symmetric transform.
fn centring_layer(n_qubits: u32, connectivity: Connectivity, sign: f64) -> Circuit {
    let m = ((1u64 << n_qubits) - 1) as f64;
    let mut c = Circuit::new(n_qubits, connectivity);
    for k in 1..=n_qubits {
        c.push(Gate::Phase { qubit: k, angle: sign * m * PI / f64::from(1u32 << k) });
    }
    c
}

fn qft_sandwich(n_qubits: u32, middle: &Circuit, connectivity: Connectivity) -> Circuit {
    let qft = synth_qft(n_qubits, connectivity);
    let mut c = qft.clone();
    c.extend(middle);
    c.extend(&qft.inverse());
    c
}

/// Centring layer, QFT, `middle`, inverse QFT, inverse centring layer.
/// `middle` acts in the bit-reversed momentum labelling of the QFT output.
pub fn synth_symmetric_qft(n_qubits: u32, middle: &Circuit, connectivity: Connectivity) -> Circuit {
    let mut c = centring_layer(n_qubits, connectivity, -1.0);
    c.extend(&qft_sandwich(n_qubits, middle, connectivity));
    c.extend(&centring_layer(n_qubits, connectivity, 1.0));
    c
}

fn bit_reverse(j: usize, n_qubits: u32) -> usize {
    if n_qubits == 0 {
        0
    } else {
        j.reverse_bits() >> (usize::BITS - n_qubits)
    }
}

/// Π̃(t) = exp(-i½Π̂²t) as a symmetric-QFT sandwich around a ZZ network.
pub fn synth_pi_block(grid: &FieldGrid<f64>, t: f64, connectivity: Connectivity) -> Result<Circuit, CircuitError> {
    let n = grid.n_qubits;
    let mut c = centring_layer(n, connectivity, -1.0);
    c.extend(&pi_core(grid, t, connectivity)?);
    c.extend(&centring_layer(n, connectivity, 1.0));
    Ok(c)
}

/// [`synth_pi_block`] without the centring layers.
fn pi_core(grid: &FieldGrid<f64>, t: f64, connectivity: Connectivity) -> Result<Circuit, CircuitError> {
    let n = grid.n_qubits;
    let basis = MomentumBasis::new(grid);
    let p2 = basis.pi_squared();
    let diag: Vec<f64> = (0..p2.len()).map(|j| 0.5 * t * p2[bit_reverse(j, n)]).collect();
    let middle = if n > 1 {
        synth_diagonal(&diag, connectivity)?
    } else {
        Circuit::new(n, connectivity)
    };
    Ok(qft_sandwich(n, &middle, connectivity))
}

/// exp(-i[c2·½φ² + c4·φ⁴]) with each operator truncated per its cutoff.
pub fn synth_phi_block(
    grid: &FieldGrid<f64>,
    c2: f64,
    c4: f64,
    nu_cut_phi4: Option<usize>,
    nu_cut_phi2: Option<usize>,
    connectivity: Connectivity,
) -> Result<Circuit, CircuitError> {
    let spec = HamiltonianSpec { lambda: 0.0, nu_cut_phi4, nu_cut_phi2, drop_identity: true };
    let (half_phi2, phi4) =
        field::potential_terms(grid, &spec).map_err(|e| CircuitError::Synthesis(e.to_string()))?;
    let diag: Vec<f64> = half_phi2.iter().zip(&phi4).map(|(a, b)| c2 * a + c4 * b).collect();
    synth_diagonal(&diag, connectivity)
}

/// Uniformly controlled RY angles for the first half of a reflection-
/// symmetric state, one level per qubit 2..=n.
pub fn state_prep_angles(target: &[f64]) -> Result<Vec<Vec<f64>>, CircuitError> {
    let len = target.len();
    if len < 2 || !len.is_power_of_two() {
        return Err(CircuitError::Synthesis(format!("state length {len}")));
    }
    let norm = target.iter().map(|x| x * x).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(CircuitError::Synthesis(format!("state norm {norm}")));
    }
    if (0..len).any(|j| (target[j] - target[len - 1 - j]).abs() > 1e-9) {
        return Err(CircuitError::Synthesis("state is not reflection symmetric".into()));
    }
    let half: Vec<f64> = target[..len / 2].iter().map(|x| x * 2f64.sqrt()).collect();
    let m = (len / 2).trailing_zeros();
    let norm2 = |s: &[f64]| s.iter().map(|x| x * x).sum::<f64>().sqrt();
    Ok((0..m)
        .map(|k| {
            let size = 1usize << (m - k);
            half.chunks(size)
                .map(|block| {
                    let (l, r) = block.split_at(size / 2);
                    if size == 2 {
                        2.0 * r[0].atan2(l[0])
                    } else {
                        2.0 * norm2(r).atan2(norm2(l))
                    }
                })
                .collect()
        })
        .collect())
}

fn gray(j: usize) -> usize {
    j ^ (j >> 1)
}

/// One element of a multiplexor walk: a CNOT between chain positions
/// (0-based, the target sits at position k) or an RY slot.
#[derive(Clone, Copy)]
enum MuxOp {
    Cx(usize, usize),
    Ry,
}

/// Nearest-neighbour walk for k controls. Each step of a walk over
/// controls 0..j-1 is a half-cycle on (j-1, j, target), which shifts the
/// target mask by the content of j-1 and visits both cosets of x_j. Costs
/// 2, 8, 20, 44, ... CNOTs, which is optimal for k ≤ 3.
fn chain_walk(k: usize) -> Vec<MuxOp> {
    fn emit(j: usize, step: &dyn Fn(&mut Vec<MuxOp>), out: &mut Vec<MuxOp>) {
        if j == 0 {
            step(out);
            step(out);
            return;
        }
        let half = |o: &mut Vec<MuxOp>| {
            o.push(MuxOp::Cx(j - 1, j));
            step(o);
            o.push(MuxOp::Cx(j - 1, j));
            step(o);
        };
        emit(j - 1, &half, out);
    }
    let toggle = |o: &mut Vec<MuxOp>| {
        o.push(MuxOp::Cx(k - 1, k));
        o.push(MuxOp::Ry);
    };
    let mut out = Vec::new();
    emit(k - 1, &toggle, &mut out);
    out
}

/// Gray-code walk with direct CNOTs from each control to the target.
fn direct_walk(k: usize) -> Vec<MuxOp> {
    let size = 1usize << k;
    (0..size)
        .flat_map(|j| {
            let flip = (gray(j) ^ gray((j + 1) % size)).trailing_zeros() as usize;
            [MuxOp::Ry, MuxOp::Cx(k - 1 - flip, k)]
        })
        .collect()
}

/// Uniformly controlled RY on chain position k, controls at 0..k-1,
/// applying α_c for control value c (position 0 is the high bit).
fn multiplexed_ry(c: &mut Circuit, first: u32, k: usize, alphas: &[f64], walk: &[MuxOp]) {
    let size = 1usize << k;
    let mut content: Vec<usize> = (0..k).map(|i| 1 << (k - 1 - i)).collect();
    let mut mask = 0usize;
    let mut slots = Vec::with_capacity(size);
    for op in walk {
        match *op {
            MuxOp::Cx(a, b) if b == k => mask ^= content[a],
            MuxOp::Cx(a, b) => content[b] ^= content[a],
            MuxOp::Ry => slots.push(mask),
        }
    }
    debug_assert!(mask == 0 && slots.len() == size);
    let mut slot = slots.iter();
    for op in walk {
        match *op {
            MuxOp::Cx(a, b) => cx(c, first + a as u32, first + b as u32),
            MuxOp::Ry => {
                // The RY sees the target flipped by the parity c·mask.
                let m = *slot.next().unwrap_or(&0);
                let theta = alphas
                    .iter()
                    .enumerate()
                    .map(|(ctl, a)| if (ctl & m).count_ones() % 2 == 0 { *a } else { -*a })
                    .sum::<f64>()
                    / size as f64;
                c.push(Gate::Ry { qubit: first + k as u32, angle: theta });
            }
        }
    }
}

/// Half-state preparation on qubits 2..=n, then H(1) and a fan-out from
/// qubit 1 that maps |1, x⟩ to |1, x̄⟩.
pub fn synth_state_prep(
    n_qubits: u32,
    angles: &[Vec<f64>],
    connectivity: Connectivity,
) -> Result<Circuit, CircuitError> {
    let n = n_qubits;
    if n == 0 || angles.len() != n as usize - 1 {
        return Err(CircuitError::Synthesis(format!("{} angle levels for {n} qubits", angles.len())));
    }
    let mut c = Circuit::new(n, connectivity);
    for (k, alphas) in angles.iter().enumerate() {
        let size = 1usize << k;
        if alphas.len() != size {
            return Err(CircuitError::Synthesis(format!("level {k} has {} angles", alphas.len())));
        }
        let target = 2 + k as u32;
        if k == 0 {
            c.push(Gate::Ry { qubit: target, angle: alphas[0] });
            continue;
        }
        let walk = match connectivity {
            Connectivity::AllToAll => direct_walk(k),
            Connectivity::LinearChain => chain_walk(k),
        };
        multiplexed_ry(&mut c, 2, k, alphas, &walk);
    }
    c.push(Gate::H { qubit: 1 });
    match connectivity {
        Connectivity::AllToAll => {
            for k in 2..=n {
                cx(&mut c, 1, k);
            }
        }
        Connectivity::LinearChain if n > 1 => {
            for k in (2..n).rev() {
                cx(&mut c, k, k + 1);
            }
            cx(&mut c, 1, 2);
            for k in 2..n {
                cx(&mut c, k, k + 1);
            }
        }
        Connectivity::LinearChain => {}
    }
    Ok(c)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AssembledCircuit {
    /// After CNOT cancellation.
    pub circuit: Circuit,
    /// Before cancellation, summed per block kind: "prep", "phi", "pi".
    pub by_block: BTreeMap<String, ResourceReport>,
}

impl AssembledCircuit {
    pub fn resources(&self) -> ResourceReport {
        count_resources(&self.circuit)
    }
}

fn add_block(out: &mut Circuit, by_block: &mut BTreeMap<String, ResourceReport>, name: &str, block: Circuit) {
    let r = count_resources(&block);
    *by_block.entry(name.to_string()).or_default() = by_block.get(name).copied().unwrap_or_default() + r;
    out.extend(&block);
}

/// Second-order Trotter evolution of `schedule`, with neighbouring half
/// steps merged into one Φ̃ block. `prep` adds the free ground-state
/// preparation in front.
pub fn assemble_evolution(
    schedule: &AspSchedule,
    grid: &FieldGrid<f64>,
    connectivity: Connectivity,
    prep: bool,
) -> Result<AssembledCircuit, CircuitError> {
    if schedule.order != TrotterOrder::Second || schedule.n_steps == 0 {
        return Err(CircuitError::Synthesis("needs a second-order schedule with at least one step".into()));
    }
    let n = grid.n_qubits;
    let (dt, steps) = (schedule.dt, schedule.n_steps);
    let (cut4, cut2) = (schedule.nu_cut_phi4, schedule.nu_cut_phi2);
    let mut c = Circuit::new(n, connectivity);
    let mut by_block = BTreeMap::new();
    if prep {
        let (_, gs) = field::solve_ground_state(grid, &HamiltonianSpec::free())
            .map_err(|e| CircuitError::Synthesis(e.to_string()))?;
        let block = synth_state_prep(n, &state_prep_angles(&gs)?, connectivity)?;
        add_block(&mut c, &mut by_block, "prep", block);
    }
    // The centring layers are diagonal, so they commute with every Φ̃ block
    // and cancel between consecutive Π̃ blocks; only the outer pair is kept.
    c.extend(&centring_layer(n, connectivity, -1.0));
    let phi = |c2: f64, lambda_sum: f64| synth_phi_block(grid, c2, lambda_sum / 24.0 * dt / 2.0, cut4, cut2, connectivity);
    add_block(&mut c, &mut by_block, "phi", phi(dt / 2.0, schedule.lambda_at(1))?);
    let pi = pi_core(grid, dt, connectivity)?;
    for k in 1..=steps {
        add_block(&mut c, &mut by_block, "pi", pi.clone());
        let block = if k < steps {
            phi(dt, schedule.lambda_at(k) + schedule.lambda_at(k + 1))?
        } else {
            phi(dt / 2.0, schedule.lambda_at(k))?
        };
        add_block(&mut c, &mut by_block, "phi", block);
    }
    c.extend(&centring_layer(n, connectivity, 1.0));
    Ok(AssembledCircuit { circuit: cancel_cnots(&c), by_block })
}

/// State preparation followed by the full evolution.
pub fn assemble_asp_circuit(
    schedule: &AspSchedule,
    grid: &FieldGrid<f64>,
    connectivity: Connectivity,
) -> Result<AssembledCircuit, CircuitError> {
    assemble_evolution(schedule, grid, connectivity, true)
}
