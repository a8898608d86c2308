use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use coded_caching::analytics::memory_grid;
use coded_caching::delivery::DEFAULT_MAX_CODED_USERS;
use coded_caching::{DeliveryChoice, DemandVector};

use crate::output::Format;

#[derive(Debug, Parser)]
#[command(name = "coded-caching", version, about = "Decentralized coded caching simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    pub format: Format,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form rate curves over a memory range.
    Analytic(AnalyticArgs),
    /// Simulate placement and delivery at one memory size.
    Simulate(SimulateArgs),
    /// Simulate over a memory range.
    Sweep(SimulateArgs),
    /// Route a delivery over a tree and account bits per link.
    Tree(TreeArgs),
    /// Caches shared by groups of users.
    Shared(SharedArgs),
    /// Requests arriving at different times, served in segments.
    Async(AsyncArgs),
    /// Decode every user for one or all demand vectors.
    Verify(SimulateArgs),
    /// Largest ratios to the lower bound and the centralized rate on a grid.
    Gaps(GapsArgs),
}

/// Memory values: a single number or an inclusive `start:stop:step` range.
#[derive(Debug, Clone, PartialEq)]
pub struct MemoryRange(pub Vec<f64>);

impl FromStr for MemoryRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |p: &str| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| format!("bad memory value {p:?}"))
        };
        match parts.as_slice() {
            [m] => Ok(Self(vec![num(m)?])),
            [start, stop, step] => memory_grid(num(start)?, num(stop)?, num(step)?)
                .map(Self)
                .map_err(|e| e.to_string()),
            _ => Err(format!("expected M or start:stop:step, got {s:?}")),
        }
    }
}

impl MemoryRange {
    pub fn single(&self) -> Result<f64> {
        match self.0.as_slice() {
            [m] => Ok(*m),
            _ => bail!("this command takes a single --memory value"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DemandMode {
    WorstExhaustive,
    Distinct,
    Random,
    /// One-based file ids.
    List(Vec<usize>),
}

impl FromStr for DemandMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "worst-exhaustive" => Ok(Self::WorstExhaustive),
            "distinct" => Ok(Self::Distinct),
            "random" => Ok(Self::Random),
            list => list
                .split(',')
                .map(|d| d.trim().parse::<usize>())
                .collect::<Result<Vec<_>, _>>()
                .map(Self::List)
                .map_err(|_| {
                    format!("expected worst-exhaustive, distinct, random or a list like 1,2,1; got {s:?}")
                }),
        }
    }
}

impl DemandMode {
    /// A fixed demand vector for modes that name one.
    pub fn vector(&self, files: usize, users: usize, seed: u64) -> Result<DemandVector> {
        Ok(match self {
            Self::Distinct => DemandVector::distinct(files, users)?,
            Self::Random => DemandVector::seeded(files, users, seed),
            Self::List(list) => {
                if list.len() != users {
                    bail!("--demands lists {} files for {users} users", list.len());
                }
                DemandVector::from_one_based(list, files)?
            }
            Self::WorstExhaustive => bail!("worst-exhaustive does not name a single demand vector"),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DeliveryArg {
    MinRate,
    Threshold,
    Coded,
    Rlc,
}

impl DeliveryArg {
    pub fn name(self) -> String {
        self.to_possible_value()
            .map(|v| v.get_name().to_string())
            .unwrap_or_default()
    }
}

impl From<DeliveryArg> for DeliveryChoice {
    fn from(d: DeliveryArg) -> Self {
        match d {
            DeliveryArg::MinRate => DeliveryChoice::MinRate,
            DeliveryArg::Threshold => DeliveryChoice::Threshold,
            DeliveryArg::Coded => DeliveryChoice::ForceCoded,
            DeliveryArg::Rlc => DeliveryChoice::ForceRlc,
        }
    }
}

#[derive(Debug, Args)]
pub struct SystemArgs {
    /// Number of files N.
    #[arg(long)]
    pub files: usize,
    /// Number of users K.
    #[arg(long)]
    pub users: usize,
    /// Memory per user in files: M or start:stop:step.
    #[arg(long, allow_hyphen_values = true)]
    pub memory: MemoryRange,
    /// Bits per file F.
    #[arg(long, default_value_t = 10_000)]
    pub file_bits: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct AnalyticArgs {
    #[arg(long)]
    pub files: usize,
    #[arg(long)]
    pub users: usize,
    #[arg(long, allow_hyphen_values = true)]
    pub memory: MemoryRange,
    /// Add the small- and large-memory approximation columns.
    #[arg(long)]
    pub approx: bool,
    /// Add the shared-cache rate for this group size.
    #[arg(long)]
    pub group_size: Option<usize>,
    /// Print the binomial mixture weights at a single memory value instead.
    #[arg(long)]
    pub mixture: bool,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    /// worst-exhaustive, distinct, random, or one-based ids like 1,2,1.
    #[arg(long, default_value = "distinct")]
    pub demands: DemandMode,
    #[arg(long, value_enum, default_value_t = DeliveryArg::MinRate)]
    pub delivery: DeliveryArg,
    /// Independent placements to average over; trial t uses seed + t.
    #[arg(long, default_value_t = 1)]
    pub trials: u64,
    /// Largest K accepted by the coded procedure.
    #[arg(long, default_value_t = DEFAULT_MAX_CODED_USERS)]
    pub max_coded_users: usize,
}

#[derive(Debug, Args)]
pub struct TreeArgs {
    /// Topology JSON: {"nodes":[{"id":0,"parent":null,"user":null},...]}.
    #[arg(long)]
    pub topology: PathBuf,
    #[arg(long)]
    pub files: usize,
    #[arg(long, allow_hyphen_values = true)]
    pub memory: MemoryRange,
    #[arg(long, default_value_t = 10_000)]
    pub file_bits: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "distinct")]
    pub demands: DemandMode,
    #[arg(long, value_enum, default_value_t = DeliveryArg::Threshold)]
    pub delivery: DeliveryArg,
}

#[derive(Debug, Args)]
pub struct SharedArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    /// Users per shared cache L.
    #[arg(long)]
    pub group_size: usize,
    #[arg(long, default_value = "distinct")]
    pub demands: DemandMode,
}

#[derive(Debug, Args)]
pub struct AsyncArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    /// Segments per file J.
    #[arg(long)]
    pub segments: usize,
    /// CSV with lines user,arrival_slot,file_id (one-based ids).
    #[arg(long)]
    pub arrivals: PathBuf,
}

#[derive(Debug, Args)]
pub struct GapsArgs {
    #[arg(long, default_value_t = 32)]
    pub max_files: usize,
    #[arg(long, default_value_t = 32)]
    pub max_users: usize,
    /// Memory points per (N, K), evenly spaced over [0, N].
    #[arg(long, default_value_t = 64)]
    pub points: usize,
}

pub fn read_file(path: &PathBuf) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}
