//! Gate-level circuits: IR, resource accounting, a CNOT peephole pass and
//! OpenQASM 2.0 text.
//!
//! Qubits are 1-based and qubit 1 is the most significant index bit, as in
//! [`crate::walsh`].

mod sim;
mod synth;

use std::fmt::Write as _;

use thiserror::Error;

pub use sim::{apply, unitary};
pub use synth::*;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CircuitError {
    #[error("qubit {qubit} outside a {n_qubits}-qubit register")]
    QubitOutOfRange { qubit: u32, n_qubits: u32 },
    #[error("CNOT({0}, {1}) is not nearest-neighbour")]
    NotAdjacent(u32, u32),
    #[error("CNOT with identical control and target {0}")]
    SelfControl(u32),
    #[error("non-finite angle on qubit {0}")]
    BadAngle(u32),
    #[error("cannot synthesize: {0}")]
    Synthesis(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    Cnot { control: u32, target: u32 },
    /// exp(-iθZ/2)
    Rz { qubit: u32, angle: f64 },
    /// exp(-iθY/2)
    Ry { qubit: u32, angle: f64 },
    H { qubit: u32 },
    /// diag(1, e^{iθ})
    Phase { qubit: u32, angle: f64 },
}

impl Gate {
    pub fn cx(control: u32, target: u32) -> Self {
        Gate::Cnot { control, target }
    }

    pub fn qubits(&self) -> Vec<u32> {
        match *self {
            Gate::Cnot { control, target } => vec![control, target],
            Gate::Rz { qubit, .. } | Gate::Ry { qubit, .. } | Gate::H { qubit } | Gate::Phase { qubit, .. } => {
                vec![qubit]
            }
        }
    }

    pub fn is_two_qubit(&self) -> bool {
        matches!(self, Gate::Cnot { .. })
    }

    fn is_diagonal(&self) -> bool {
        matches!(self, Gate::Rz { .. } | Gate::Phase { .. })
    }

    /// Inverse gate.
    pub fn inverse(&self) -> Self {
        match *self {
            Gate::Rz { qubit, angle } => Gate::Rz { qubit, angle: -angle },
            Gate::Ry { qubit, angle } => Gate::Ry { qubit, angle: -angle },
            Gate::Phase { qubit, angle } => Gate::Phase { qubit, angle: -angle },
            g => g,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Connectivity {
    AllToAll,
    #[default]
    LinearChain,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    pub n_qubits: u32,
    pub connectivity: Connectivity,
    pub gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n_qubits: u32, connectivity: Connectivity) -> Self {
        Self { n_qubits, connectivity, gates: Vec::new() }
    }

    pub fn push(&mut self, g: Gate) {
        self.gates.push(g);
    }

    pub fn extend(&mut self, other: &Circuit) {
        self.gates.extend_from_slice(&other.gates);
    }

    /// The inverse circuit: reversed order, inverted gates.
    pub fn inverse(&self) -> Circuit {
        Circuit {
            gates: self.gates.iter().rev().map(Gate::inverse).collect(),
            ..self.clone()
        }
    }

    pub fn cnot_count(&self) -> usize {
        self.gates.iter().filter(|g| g.is_two_qubit()).count()
    }

    pub fn validate(&self) -> Result<(), CircuitError> {
        for g in &self.gates {
            for q in g.qubits() {
                if q == 0 || q > self.n_qubits {
                    return Err(CircuitError::QubitOutOfRange { qubit: q, n_qubits: self.n_qubits });
                }
            }
            match *g {
                Gate::Cnot { control, target } if control == target => {
                    return Err(CircuitError::SelfControl(control))
                }
                Gate::Cnot { control, target }
                    if self.connectivity == Connectivity::LinearChain && control.abs_diff(target) != 1 =>
                {
                    return Err(CircuitError::NotAdjacent(control, target))
                }
                Gate::Rz { qubit, angle } | Gate::Ry { qubit, angle } | Gate::Phase { qubit, angle }
                    if !angle.is_finite() =>
                {
                    return Err(CircuitError::BadAngle(qubit))
                }
                _ => {}
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ResourceReport {
    pub two_qubit_count: usize,
    pub two_qubit_depth: usize,
}

impl std::ops::Add for ResourceReport {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self {
            two_qubit_count: self.two_qubit_count + o.two_qubit_count,
            two_qubit_depth: self.two_qubit_depth + o.two_qubit_depth,
        }
    }
}

/// CNOT count and greedy ASAP depth over two-qubit layers.
pub fn count_resources(c: &Circuit) -> ResourceReport {
    let mut level = vec![0usize; c.n_qubits as usize + 1];
    let mut count = 0;
    for g in &c.gates {
        if let Gate::Cnot { control, target } = *g {
            let l = level[control as usize].max(level[target as usize]) + 1;
            level[control as usize] = l;
            level[target as usize] = l;
            count += 1;
        }
    }
    ResourceReport { two_qubit_count: count, two_qubit_depth: level.into_iter().max().unwrap_or(0) }
}

/// Whether `g` can be moved across CNOT(c, t) without changing the unitary.
fn commutes_with_cnot(g: &Gate, c: u32, t: u32) -> bool {
    match *g {
        Gate::Cnot { control, target } => {
            let disjoint = control != c && control != t && target != c && target != t;
            let shared_control = control == c && target != t;
            let shared_target = target == t && control != c;
            disjoint || (shared_control && target != c) || (shared_target && control != t)
        }
        _ => {
            let q = g.qubits()[0];
            (q != c && q != t) || (q == c && g.is_diagonal())
        }
    }
}

/// Removes CNOT pairs that meet through commuting gates; repeats until
/// nothing changes. Never adds gates.
pub fn cancel_cnots(c: &Circuit) -> Circuit {
    let mut gates: Vec<Option<Gate>> = c.gates.iter().copied().map(Some).collect();
    loop {
        let mut changed = false;
        for i in 0..gates.len() {
            let Some(Gate::Cnot { control, target }) = gates[i] else { continue };
            for j in i + 1..gates.len() {
                let Some(g) = gates[j] else { continue };
                if g == (Gate::Cnot { control, target }) {
                    gates[i] = None;
                    gates[j] = None;
                    changed = true;
                    break;
                }
                if !commutes_with_cnot(&g, control, target) {
                    break;
                }
            }
        }
        if !changed {
            break;
        }
    }
    Circuit { gates: gates.into_iter().flatten().collect(), ..c.clone() }
}

/// OpenQASM 2.0 text.
pub fn export_qasm(c: &Circuit) -> Result<String, CircuitError> {
    c.validate()?;
    let mut s = String::from("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
    let _ = writeln!(s, "qreg q[{}];", c.n_qubits);
    for g in &c.gates {
        // qreg index 0 is qubit 1.
        let _ = match *g {
            Gate::Cnot { control, target } => writeln!(s, "cx q[{}],q[{}];", control - 1, target - 1),
            Gate::Rz { qubit, angle } => writeln!(s, "rz({angle:e}) q[{}];", qubit - 1),
            Gate::Ry { qubit, angle } => writeln!(s, "ry({angle:e}) q[{}];", qubit - 1),
            Gate::H { qubit } => writeln!(s, "h q[{}];", qubit - 1),
            Gate::Phase { qubit, angle } => writeln!(s, "u1({angle:e}) q[{}];", qubit - 1),
        };
    }
    Ok(s)
}
