use std::fmt;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::Serialize;

/// Bad flags or an impossible combination; exits with status 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn bad<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Topology {
    Linear,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Norm {
    Discrete,
    Continuum,
}

/// Flags shared by every subcommand. Unset values fall back to
/// per-command defaults in [`RunConfig::resolve`].
#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Register sizes: `5`, `5,6,8` or `3..9`.
    #[arg(long)]
    pub nq: Option<String>,
    #[arg(long, default_value_t = 4.0)]
    pub phi_max: f64,
    #[arg(long, default_value_t = 10.0)]
    pub lambda: f64,
    /// Sequency cutoff on φ⁴, or `none`.
    #[arg(long)]
    pub nu_cut: Option<String>,
    /// Sequency cutoff on φ².
    #[arg(long)]
    pub nu_cut_phi2: Option<usize>,
    /// Time steps: `0.25`, `0.1,0.2` or `start:stop:step`.
    #[arg(long)]
    pub dt: Option<String>,
    /// Step counts: `8`, `1,2,4` or `1..14`.
    #[arg(long)]
    pub steps: Option<String>,
    /// Trotter order, 1 or 2.
    #[arg(long, default_value_t = 2)]
    pub order: u8,
    /// Monomial power for decompose and bounds.
    #[arg(long, default_value_t = 4)]
    pub power: u32,
    /// Gaussian width for magic.
    #[arg(long, default_value_t = std::f64::consts::FRAC_1_SQRT_2)]
    pub sigma: f64,
    #[arg(long, value_enum, default_value_t = Norm::Discrete)]
    pub normalization: Norm,
    #[arg(long, value_enum, default_value_t = Topology::Linear)]
    pub connectivity: Topology,
    /// asp: exact per-step exponentials instead of Trotter steps.
    #[arg(long)]
    pub exact: bool,
    /// magic: profile over every even cutoff.
    #[arg(long)]
    pub profile: bool,
    /// resources: leave out state preparation.
    #[arg(long)]
    pub no_prep: bool,
    /// resources: also write the circuit as OpenQASM 2.0.
    #[arg(long)]
    pub qasm: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

/// Fully resolved parameters; echoed into every output header.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: &'static str,
    pub n_qubits: Vec<u32>,
    pub phi_max: f64,
    pub lambda: f64,
    pub nu_cut_phi4: Option<usize>,
    pub nu_cut_phi2: Option<usize>,
    pub dt: Vec<f64>,
    pub steps: Vec<usize>,
    pub trotter_order: u8,
    pub power: u32,
    pub sigma: f64,
    pub normalization: Norm,
    pub connectivity: Topology,
    pub exact: bool,
    pub profile: bool,
    pub prep: bool,
    pub qasm: Option<PathBuf>,
    pub output_path: Option<PathBuf>,
    pub format: Format,
    #[serde(skip)]
    pub warnings: Vec<String>,
}

fn parse_u(s: &str, what: &str) -> Result<usize, ConfigError> {
    s.trim().parse().or_else(|_| bad(format!("{what}: cannot parse `{s}`")))
}

fn parse_f(s: &str, what: &str) -> Result<f64, ConfigError> {
    s.trim().parse().or_else(|_| bad(format!("{what}: cannot parse `{s}`")))
}

/// `a`, `a,b,c` or the inclusive range `a..b`.
pub fn parse_int_list(s: &str, what: &str) -> Result<Vec<usize>, ConfigError> {
    if let Some((a, b)) = s.split_once("..") {
        let (a, b) = (parse_u(a, what)?, parse_u(b, what)?);
        if a > b {
            return bad(format!("{what}: empty range `{s}`"));
        }
        return Ok((a..=b).collect());
    }
    s.split(',').map(|x| parse_u(x, what)).collect()
}

/// `a`, `a,b,c` or the inclusive grid `start:stop:step`.
pub fn parse_float_list(s: &str, what: &str) -> Result<Vec<f64>, ConfigError> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() == 3 {
        let (a, b, h) = (parse_f(parts[0], what)?, parse_f(parts[1], what)?, parse_f(parts[2], what)?);
        if !h.is_finite() || h <= 0.0 || b < a {
            return bad(format!("{what}: bad grid `{s}`"));
        }
        let n = ((b - a) / h + 1e-9).floor() as usize;
        // Round to the step's precision so 0.1 + 3·0.03 prints as 0.19.
        return Ok((0..=n).map(|k| ((a + k as f64 * h) * 1e9).round() / 1e9).collect());
    }
    if parts.len() != 1 {
        return bad(format!("{what}: expected a list or start:stop:step, got `{s}`"));
    }
    s.split(',').map(|x| parse_f(x, what)).collect()
}

struct Defaults {
    nq: &'static str,
    nu_cut: Option<usize>,
    dt: &'static str,
    steps: &'static str,
}

fn defaults(command: &str) -> Defaults {
    let d = |nq, nu_cut, dt, steps| Defaults { nq, nu_cut, dt, steps };
    match command {
        "decompose" | "magic" => d("5", None, "0.25", "8"),
        "bounds" => d("8", None, "0.25", "8"),
        "scan" => d("5", Some(14), "0.10:0.55:0.03", "1..14"),
        "resources" => d("5", Some(14), "0.25", "2"),
        _ => d("5", Some(14), "0.25", "8"),
    }
}

/// Largest register for dense diagonalization and exact propagation.
const DENSE_MAX: u32 = 10;
/// Largest register for state-vector commands.
const STATE_MAX: u32 = 20;

impl RunConfig {
    pub fn resolve(command: &'static str, a: &CommonArgs) -> Result<Self, ConfigError> {
        let d = defaults(command);
        let n_qubits: Vec<u32> = parse_int_list(a.nq.as_deref().unwrap_or(d.nq), "--nq")?
            .into_iter()
            .map(|n| n as u32)
            .collect();
        let nu_cut_phi4 = match a.nu_cut.as_deref() {
            None => d.nu_cut,
            Some("none") => None,
            Some(s) => Some(parse_u(s, "--nu-cut")?),
        };
        let cfg = RunConfig {
            command,
            n_qubits,
            phi_max: a.phi_max,
            lambda: a.lambda,
            nu_cut_phi4,
            nu_cut_phi2: a.nu_cut_phi2,
            dt: parse_float_list(a.dt.as_deref().unwrap_or(d.dt), "--dt")?,
            steps: parse_int_list(a.steps.as_deref().unwrap_or(d.steps), "--steps")?,
            trotter_order: a.order,
            power: a.power,
            sigma: a.sigma,
            normalization: a.normalization,
            connectivity: a.connectivity,
            exact: a.exact,
            profile: a.profile,
            prep: !a.no_prep,
            qasm: a.qasm.clone(),
            output_path: a.out.clone(),
            format: a.format,
            warnings: Vec::new(),
        };
        cfg.validate()
    }

    /// The single register size of commands that take one.
    pub fn n(&self) -> u32 {
        self.n_qubits[0]
    }

    fn validate(mut self) -> Result<Self, ConfigError> {
        let c = self.command;
        if self.n_qubits.is_empty() || self.n_qubits.iter().any(|&n| n == 0 || n > seqht::walsh::MAX_QUBITS) {
            return bad(format!("--nq must lie in 1..={}", seqht::walsh::MAX_QUBITS));
        }
        let multi = matches!(c, "decompose") || (c == "magic" && !self.profile);
        if !multi && self.n_qubits.len() != 1 {
            return bad(format!("{c} takes a single --nq"));
        }
        if !(self.phi_max.is_finite() && self.phi_max > 0.0) {
            return bad("--phi-max must be positive");
        }
        if !(self.lambda.is_finite() && self.lambda >= 0.0) {
            return bad("--lambda must be non-negative");
        }
        if self.dt.iter().any(|t| !(t.is_finite() && *t > 0.0)) || self.dt.is_empty() {
            return bad("--dt values must be positive");
        }
        if !matches!(self.trotter_order, 1 | 2) {
            return bad("--order must be 1 or 2");
        }
        if !(self.sigma.is_finite() && self.sigma > 0.0) {
            return bad("--sigma must be positive");
        }
        if self.power == 0 || self.power > 16 {
            return bad("--power must lie in 1..=16");
        }
        let max_n = *self.n_qubits.iter().max().unwrap();
        match c {
            "eigen" if max_n > DENSE_MAX => return bad(format!("eigen diagonalizes densely; --nq ≤ {DENSE_MAX}")),
            "magic" if max_n > seqht::magic::MAX_MAGIC_QUBITS => {
                return bad(format!("magic needs --nq ≤ {}", seqht::magic::MAX_MAGIC_QUBITS))
            }
            "asp" if self.exact && max_n > DENSE_MAX => return bad(format!("--exact needs --nq ≤ {DENSE_MAX}")),
            "asp" | "scan" | "resources" if max_n > STATE_MAX => return bad(format!("{c} needs --nq ≤ {STATE_MAX}")),
            "resources" if self.trotter_order != 2 => return bad("resources assembles second-order circuits only"),
            _ => {}
        }
        if matches!(c, "asp" | "resources") && (self.dt.len() != 1 || self.steps.len() != 1) {
            return bad(format!("{c} takes a single --dt and --steps"));
        }
        if c == "resources" && self.steps[0] == 0 {
            return bad("resources needs at least one step");
        }
        for n in self.n_qubits.clone() {
            let len = 1usize << n;
            for (flag, cut) in [("--nu-cut", self.nu_cut_phi4), ("--nu-cut-phi2", self.nu_cut_phi2)] {
                let Some(cut) = cut else { continue };
                if !matches!(c, "eigen" | "asp" | "scan" | "resources") {
                    continue;
                }
                if n < 5 {
                    self.warnings.push(format!(
                        "{flag} {cut} on {n} qubits: registers below 5 qubits are too coarse to truncate meaningfully"
                    ));
                }
                if cut >= len - 1 {
                    self.warnings.push(format!("{flag} {cut} keeps every sequency of a {n}-qubit register"));
                }
            }
        }
        Ok(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lists() {
        assert_eq!(parse_int_list("3..9", "x").unwrap(), vec![3, 4, 5, 6, 7, 8, 9]);
        assert_eq!(parse_int_list("5,8", "x").unwrap(), vec![5, 8]);
        assert!(parse_int_list("9..3", "x").is_err());
        let g = parse_float_list("0.10:0.55:0.03", "x").unwrap();
        assert_eq!(g.len(), 16);
        assert_eq!(g[3], 0.19);
        assert_eq!(*g.last().unwrap(), 0.55);
        assert!(parse_float_list("1:2", "x").is_err());
    }
}
