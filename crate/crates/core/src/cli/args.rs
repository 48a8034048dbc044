//! Command-line flags and the JSON config file that shares their names.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

#[derive(Debug, Parser)]
#[command(
    name = "spinscatter",
    version,
    about = "Delta-potential spin scattering: channels, entanglement protocols and sweeps",
    propagate_version = true
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Scalar transmission and reflection amplitudes S = 1/(1 + i g/k), R = S - 1
    Amplitudes(Params),
    /// Fixed-impurity spin filter operators T and R = T - I
    Filter(Params),
    /// Kondo exchange channels and the transmission operator
    Kondo(Params),
    /// Concentrate a|00> + b|11> with a fixed or Kondo impurity
    Concentrate(Params),
    /// Entangle two particles through one Kondo impurity
    EntangleParticles(Params),
    /// Entangle two Kondo impurities through one particle
    EntangleImpurities(Params),
    /// Evaluate a protocol over a parameter grid
    Sweep(Params),
    /// Check the core invariants and report a summary
    Selftest(Params),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Amplitudes(_) => "amplitudes",
            Command::Filter(_) => "filter",
            Command::Kondo(_) => "kondo",
            Command::Concentrate(_) => "concentrate",
            Command::EntangleParticles(_) => "entangle-particles",
            Command::EntangleImpurities(_) => "entangle-impurities",
            Command::Sweep(_) => "sweep",
            Command::Selftest(_) => "selftest",
        }
    }

    pub fn params(&self) -> &Params {
        match self {
            Command::Amplitudes(p)
            | Command::Filter(p)
            | Command::Kondo(p)
            | Command::Concentrate(p)
            | Command::EntangleParticles(p)
            | Command::EntangleImpurities(p)
            | Command::Sweep(p)
            | Command::Selftest(p) => p,
        }
    }
}

/// Every option is optional here; per-command requirements are checked
/// after the config file has been merged in.
#[derive(Debug, Clone, Default, Args, Deserialize, PartialEq)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct Params {
    /// Wave number (> 0)
    #[arg(long, allow_negative_numbers = true)]
    pub k: Option<f64>,
    /// Coupling strength
    #[arg(long, allow_negative_numbers = true)]
    pub r: Option<f64>,
    /// Dimensionless coupling: g/k for amplitudes, 2r/k for the filter, r/k for Kondo
    #[arg(long, allow_negative_numbers = true)]
    pub xi: Option<f64>,
    /// Coupling of impurity 1 (defaults to --r)
    #[arg(long, allow_negative_numbers = true)]
    pub r1: Option<f64>,
    /// Coupling of impurity 2 (defaults to --r)
    #[arg(long, allow_negative_numbers = true)]
    pub r2: Option<f64>,
    /// Magnitude of the |00> coefficient
    #[arg(long = "a", visible_alias = "a-coeff", allow_negative_numbers = true)]
    #[serde(alias = "a-coeff")]
    pub a: Option<f64>,
    /// Magnitude of the |11> coefficient (defaults to sqrt(1 - a^2))
    #[arg(long = "b", visible_alias = "b-coeff", allow_negative_numbers = true)]
    #[serde(alias = "b-coeff")]
    pub b: Option<f64>,
    /// Phase of a in radians
    #[arg(long, allow_negative_numbers = true)]
    pub a_phase: Option<f64>,
    /// Phase of b in radians
    #[arg(long, allow_negative_numbers = true)]
    pub b_phase: Option<f64>,
    /// Half distance between the two impurities (exact mode)
    #[arg(long, allow_negative_numbers = true)]
    pub half_separation: Option<f64>,
    /// Impurity or measurement axis: x, y, z, -z, or "nx,ny,nz"
    #[arg(long, allow_hyphen_values = true)]
    pub axis: Option<String>,
    /// Kondo eigenvalues: paper, standard-pauli, or "l1,l2,l3,l4"
    #[arg(long)]
    pub eigenvalues: Option<String>,
    /// Impurity kind for concentrate: fixed or kondo
    #[arg(long)]
    pub impurity: Option<String>,
    /// Two-impurity solver: first-order or exact
    #[arg(long)]
    pub mode: Option<String>,
    /// Initial basis ket as a bitstring in register order, e.g. 001
    #[arg(long)]
    pub initial: Option<String>,
    /// List every branch of the event tree instead of the selected outcomes
    #[arg(long)]
    #[serde(default)]
    pub tree: bool,
    /// Protocol to sweep: concentrate, concentrate-kondo, entangle-particles, entangle-impurities
    #[arg(long)]
    pub protocol: Option<String>,
    /// Grid as param:start:stop:points[:log]; repeat for a cartesian product
    #[arg(long)]
    #[serde(default)]
    pub grid: Vec<String>,
    /// Sweep objective for the argmax summary: probability or entropy
    #[arg(long)]
    pub objective: Option<String>,
    /// Output format: table, csv or json (default from SPINSCATTER_FORMAT, else table)
    #[arg(long)]
    pub format: Option<String>,
    /// Write results to this file instead of standard output
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// JSON file with defaults for any of these options; flags take precedence
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

impl Params {
    /// Fills every unset field from `file`.
    pub fn merged_with(self, file: Params) -> Params {
        Params {
            k: self.k.or(file.k),
            r: self.r.or(file.r),
            xi: self.xi.or(file.xi),
            r1: self.r1.or(file.r1),
            r2: self.r2.or(file.r2),
            a: self.a.or(file.a),
            b: self.b.or(file.b),
            a_phase: self.a_phase.or(file.a_phase),
            b_phase: self.b_phase.or(file.b_phase),
            half_separation: self.half_separation.or(file.half_separation),
            axis: self.axis.or(file.axis),
            eigenvalues: self.eigenvalues.or(file.eigenvalues),
            impurity: self.impurity.or(file.impurity),
            mode: self.mode.or(file.mode),
            initial: self.initial.or(file.initial),
            tree: self.tree || file.tree,
            protocol: self.protocol.or(file.protocol),
            grid: if self.grid.is_empty() { file.grid } else { self.grid },
            objective: self.objective.or(file.objective),
            format: self.format.or(file.format),
            output: self.output.or(file.output),
            config: self.config,
        }
    }

    /// Flag names that carry a value, in declaration order.
    pub fn set_names(&self) -> Vec<&'static str> {
        let mut v = Vec::new();
        let mut add = |set: bool, name: &'static str| {
            if set {
                v.push(name);
            }
        };
        add(self.k.is_some(), "k");
        add(self.r.is_some(), "r");
        add(self.xi.is_some(), "xi");
        add(self.r1.is_some(), "r1");
        add(self.r2.is_some(), "r2");
        add(self.a.is_some(), "a");
        add(self.b.is_some(), "b");
        add(self.a_phase.is_some(), "a-phase");
        add(self.b_phase.is_some(), "b-phase");
        add(self.half_separation.is_some(), "half-separation");
        add(self.axis.is_some(), "axis");
        add(self.eigenvalues.is_some(), "eigenvalues");
        add(self.impurity.is_some(), "impurity");
        add(self.mode.is_some(), "mode");
        add(self.initial.is_some(), "initial");
        add(self.tree, "tree");
        add(self.protocol.is_some(), "protocol");
        add(!self.grid.is_empty(), "grid");
        add(self.objective.is_some(), "objective");
        v
    }
}

pub fn load_config(path: &Path) -> Result<Params, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("invalid config {}: {e}", path.display()))
}
