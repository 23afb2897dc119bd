use std::fs;

use anyhow::{Context, Result};
use seqht::circuit::{self, Connectivity};
use seqht::evolution::{self, AspSchedule, Evolver, Ramp, TrotterOrder};
use seqht::field::{self, HamiltonianSpec};
use seqht::hierarchy::{self, Normalization};
use seqht::{magic, walsh, FieldGrid};

use crate::config::{Norm, RunConfig, Topology};
use crate::report::{Cell, Report, Table};

fn schedule(cfg: &RunConfig, steps: usize, dt: f64, cut4: Option<usize>, cut2: Option<usize>) -> AspSchedule {
    AspSchedule {
        order: if cfg.trotter_order == 1 { TrotterOrder::First } else { TrotterOrder::Second },
        nu_cut_phi4: cut4,
        nu_cut_phi2: cut2,
        ..AspSchedule::new(steps, dt, cfg.lambda)
    }
}

/// ∫ x^p over [a, b].
fn monomial_integral(p: u32, a: f64, b: f64) -> f64 {
    let q = p as i32 + 1;
    (b.powi(q) - a.powi(q)) / q as f64
}

/// Continuum Walsh coefficient of x^p on [-x_M, x_M]: the integral of x^p
/// times the sequency-ν Walsh function, which is constant on 2^m equal
/// segments where m is the bit length of ν.
fn continuum_coefficient(p: u32, nu: usize, x_max: f64) -> f64 {
    let m = usize::BITS - nu.leading_zeros();
    let signs: Vec<f64> = if m == 0 { vec![1.0] } else { walsh::walsh_row(nu, m).expect("ν < 2^m") };
    let h = 2.0 * x_max / signs.len() as f64;
    let total: f64 = signs
        .iter()
        .enumerate()
        .map(|(k, s)| s * monomial_integral(p, -x_max + k as f64 * h, -x_max + (k + 1) as f64 * h))
        .sum();
    total / (2.0 * x_max)
}

pub fn decompose(cfg: &RunConfig) -> Result<Report> {
    let p = cfg.power;
    let min_n = *cfg.n_qubits.iter().min().unwrap();
    let spectra = cfg
        .n_qubits
        .iter()
        .map(|&n| {
            let grid = FieldGrid::new(n, cfg.phi_max)?;
            Ok(walsh::decompose(&field::phi_power_operator(&grid, p as i32))?)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut cols: Vec<String> = ["nu", "zmask_hex", "label"].map(String::from).to_vec();
    cols.extend(cfg.n_qubits.iter().map(|n| format!("n{n}")));
    cols.push("continuum".into());
    let mut t = Table::with_columns("coefficients", cols);
    let last = cfg.nu_cut_phi4.unwrap_or(usize::MAX).min((1usize << min_n) - 1);
    for nu in (0..=last).filter(|nu| nu % 2 == p as usize % 2) {
        let op = walsh::SequencyOp::new(nu, min_n)?;
        let mut row: Vec<Cell> = vec![nu.into(), format!("{:#x}", op.z_mask).into(), op.label().into()];
        row.extend(spectra.iter().map(|s| Cell::from(s.get(nu))));
        row.push(continuum_coefficient(p, nu, cfg.phi_max).into());
        t.push(row);
    }
    Ok(Report { tables: vec![t], ..Default::default() })
}

pub fn bounds(cfg: &RunConfig) -> Result<Report> {
    let norm = match cfg.normalization {
        Norm::Discrete => Normalization::Discrete,
        Norm::Continuum => Normalization::Continuum,
    };
    let rows = hierarchy::bound_profile(cfg.power, cfg.phi_max, cfg.n(), norm)?;
    let mut t = Table::new("bounds", &["nu", "coeff", "bound", "within"]);
    for e in rows.into_iter().filter(|e| cfg.nu_cut_phi4.is_none_or(|c| e.nu <= c)) {
        let within = if e.coeff.abs() <= e.bound * (1.0 + 1e-12) { "yes" } else { "no" };
        t.push(vec![e.nu.into(), e.coeff.into(), e.bound.into(), within.into()]);
    }
    Ok(Report { tables: vec![t], ..Default::default() })
}

pub fn eigen(cfg: &RunConfig) -> Result<Report> {
    let grid = FieldGrid::new(cfg.n(), cfg.phi_max)?;
    let spectrum = |spec: HamiltonianSpec| -> Result<Vec<f64>> {
        Ok(field::eigenvalues(&field::build_hamiltonian(&grid, &spec)?))
    };
    let full = spectrum(HamiltonianSpec::full(cfg.lambda))?;
    let free = spectrum(HamiltonianSpec::free())?;
    let truncated = if cfg.nu_cut_phi4.is_some() || cfg.nu_cut_phi2.is_some() {
        Some(spectrum(HamiltonianSpec { nu_cut_phi4: cfg.nu_cut_phi4, nu_cut_phi2: cfg.nu_cut_phi2, ..HamiltonianSpec::full(cfg.lambda) })?)
    } else {
        None
    };
    let mut t = Table::new("spectrum", &["index", "truncated", "full", "free"]);
    for i in 0..full.len() {
        t.push(vec![i.into(), truncated.as_ref().map(|v| v[i]).into(), full[i].into(), free[i].into()]);
    }
    Ok(Report { tables: vec![t], ..Default::default() })
}

pub fn asp(cfg: &RunConfig) -> Result<Report> {
    let n = cfg.n();
    let grid = FieldGrid::new(n, cfg.phi_max)?;
    let (steps, dt) = (cfg.steps[0], cfg.dt[0]);
    let target = evolution::target_ground_state(&grid, cfg.lambda)?;
    let evolved = if cfg.exact {
        let t = steps as f64 * dt;
        evolution::run_asp_exact(&grid, steps, t, cfg.lambda, cfg.nu_cut_phi4, cfg.nu_cut_phi2, Ramp::Interior)?
    } else {
        evolution::run_asp(&schedule(cfg, steps, dt, cfg.nu_cut_phi4, cfg.nu_cut_phi2), &grid)?
    };
    let mut r = Report::default();
    r.set("total_time", steps as f64 * dt);
    r.set("fidelity", evolution::fidelity(&target, &evolved));
    r.set("amplitude_overlap", evolution::amplitude_overlap(&target, &evolved));

    let mut amps = Table::new("amplitudes", &["index", "phi", "evolved_abs", "evolved_re", "evolved_im", "target"]);
    for (i, (e, g)) in evolved.iter().zip(&target).enumerate() {
        amps.push(vec![i.into(), grid.values[i].into(), e.norm().into(), e.re.into(), e.im.into(), g.re.into()]);
    }
    let mut zz = Table::new("zz", &["a", "b", "evolved", "target"]);
    let want = evolution::zz_expectations(&target, n);
    for ((a, b), v) in evolution::zz_expectations(&evolved, n) {
        zz.push(vec![a.into(), b.into(), v.into(), want[&(a, b)].into()]);
    }
    r.tables = vec![amps, zz];
    Ok(r)
}

pub fn scan(cfg: &RunConfig) -> Result<Report> {
    let grid = FieldGrid::new(cfg.n(), cfg.phi_max)?;
    let target = evolution::target_ground_state(&grid, cfg.lambda)?;
    let initial = evolution::free_ground_state(&grid)?;
    let mut panels = vec![("full".to_string(), None, None)];
    if let Some(c4) = cfg.nu_cut_phi4 {
        panels.push((format!("phi4_cut{c4}"), Some(c4), None));
    }
    if let Some(c2) = cfg.nu_cut_phi2 {
        let label = match cfg.nu_cut_phi4 {
            Some(c4) => format!("phi4_cut{c4}_phi2_cut{c2}"),
            None => format!("phi2_cut{c2}"),
        };
        panels.push((label, cfg.nu_cut_phi4, Some(c2)));
    }
    let mut cols = vec!["config".to_string(), "steps".to_string()];
    cols.extend(cfg.dt.iter().map(|dt| format!("{dt}")));
    let mut t = Table::with_columns("fidelity", cols);
    for (label, c4, c2) in panels {
        let ev = Evolver::new(&grid, c4, c2)?;
        for &steps in &cfg.steps {
            let mut row: Vec<Cell> = vec![label.clone().into(), steps.into()];
            for &dt in &cfg.dt {
                let out = ev.run(&schedule(cfg, steps, dt, c4, c2), &initial)?;
                row.push(evolution::fidelity(&target, &out).into());
            }
            t.push(row);
        }
    }
    Ok(Report { tables: vec![t], ..Default::default() })
}

pub fn magic(cfg: &RunConfig) -> Result<Report> {
    let mut r = Report::default();
    if cfg.profile {
        let n = cfg.n();
        let grid = FieldGrid::new(n, cfg.phi_max)?;
        let state = magic::gaussian_state(cfg.sigma, 0.0, &grid);
        let cuts: Vec<usize> = (0..(1usize << n)).step_by(2).collect();
        let profile = magic::truncated_magic_profile(&state, &cuts)?;
        let mut t = Table::new("profile", &["nu_cut", "m_lin"]);
        for (cut, m) in profile {
            t.push(vec![cut.into(), m.into()]);
        }
        r.tables.push(t);
        return Ok(r);
    }
    let mut t = Table::new("magic", &["n_q", "m_lin", "sum_xi", "n_nonzero"]);
    for &n in &cfg.n_qubits {
        let grid = FieldGrid::new(n, cfg.phi_max)?;
        let psi = evolution::to_complex(&magic::gaussian_state(cfg.sigma, 0.0, &grid));
        let m = magic::linear_magic(&psi)?;
        t.push(vec![n.into(), m.m_lin.into(), m.sum_xi.into(), m.n_nonzero.into()]);
    }
    r.tables.push(t);
    Ok(r)
}

pub fn resources(cfg: &RunConfig) -> Result<Report> {
    let grid = FieldGrid::new(cfg.n(), cfg.phi_max)?;
    let s = schedule(cfg, cfg.steps[0], cfg.dt[0], cfg.nu_cut_phi4, cfg.nu_cut_phi2);
    let conn = match cfg.connectivity {
        Topology::Linear => Connectivity::LinearChain,
        Topology::All => Connectivity::AllToAll,
    };
    let assembled = circuit::assemble_evolution(&s, &grid, conn, cfg.prep)?;
    if let Some(path) = &cfg.qasm {
        let text = circuit::export_qasm(&assembled.circuit)?;
        fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    }
    let total = assembled.resources();
    let mut r = Report::default();
    r.set("count", total.two_qubit_count);
    r.set("depth", total.two_qubit_depth);
    let by_block: serde_json::Map<String, serde_json::Value> = assembled
        .by_block
        .iter()
        .map(|(k, v)| (k.clone(), serde_json::json!({"count": v.two_qubit_count, "depth": v.two_qubit_depth})))
        .collect();
    r.set("by_block", by_block);
    let mut t = Table::new("resources", &["block", "count", "depth"]);
    for (k, v) in &assembled.by_block {
        t.push(vec![k.as_str().into(), v.two_qubit_count.into(), v.two_qubit_depth.into()]);
    }
    t.push(vec!["total".into(), total.two_qubit_count.into(), total.two_qubit_depth.into()]);
    r.tables.push(t);
    Ok(r)
}
