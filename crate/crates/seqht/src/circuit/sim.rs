use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{Circuit, CircuitError, Gate};

fn bit(n: u32, q: u32) -> usize {
    1usize << (n - q)
}

fn single(state: &mut [Complex64], b: usize, m: [[Complex64; 2]; 2]) {
    for j in 0..state.len() {
        if j & b == 0 {
            let (a0, a1) = (state[j], state[j | b]);
            state[j] = m[0][0] * a0 + m[0][1] * a1;
            state[j | b] = m[1][0] * a0 + m[1][1] * a1;
        }
    }
}

/// Applies the circuit to a state vector in place.
pub fn apply(c: &Circuit, state: &mut [Complex64]) -> Result<(), CircuitError> {
    c.validate()?;
    if state.len() != 1usize << c.n_qubits {
        return Err(CircuitError::Synthesis(format!(
            "state of length {} on {} qubits",
            state.len(),
            c.n_qubits
        )));
    }
    let n = c.n_qubits;
    let z = Complex64::new(0.0, 0.0);
    for g in &c.gates {
        match *g {
            Gate::Cnot { control, target } => {
                let (cb, tb) = (bit(n, control), bit(n, target));
                for j in 0..state.len() {
                    if j & cb != 0 && j & tb == 0 {
                        state.swap(j, j | tb);
                    }
                }
            }
            Gate::Rz { qubit, angle } => {
                let (m, p) = (Complex64::from_polar(1.0, -angle / 2.0), Complex64::from_polar(1.0, angle / 2.0));
                single(state, bit(n, qubit), [[m, z], [z, p]]);
            }
            Gate::Phase { qubit, angle } => {
                single(state, bit(n, qubit), [[Complex64::new(1.0, 0.0), z], [z, Complex64::from_polar(1.0, angle)]]);
            }
            Gate::Ry { qubit, angle } => {
                let (co, si) = ((angle / 2.0).cos(), (angle / 2.0).sin());
                let r = |x: f64| Complex64::new(x, 0.0);
                single(state, bit(n, qubit), [[r(co), r(-si)], [r(si), r(co)]]);
            }
            Gate::H { qubit } => {
                let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
                single(state, bit(n, qubit), [[h, h], [h, -h]]);
            }
        }
    }
    Ok(())
}

/// Dense unitary, column j = circuit applied to |j⟩.
pub fn unitary(c: &Circuit) -> Result<DMatrix<Complex64>, CircuitError> {
    let len = 1usize << c.n_qubits;
    let mut u = DMatrix::zeros(len, len);
    for j in 0..len {
        let mut v = vec![Complex64::new(0.0, 0.0); len];
        v[j] = Complex64::new(1.0, 0.0);
        apply(c, &mut v)?;
        u.set_column(j, &nalgebra::DVector::from_vec(v));
    }
    Ok(u)
}
