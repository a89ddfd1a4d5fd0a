use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "envderiv", version, about = "Exact environment derivatives of first-passage times on lattice boxes")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Dimension of the box [-radius, radius]^dim.
    #[arg(long, global = true)]
    pub dim: Option<usize>,
    #[arg(long, global = true)]
    pub radius: Option<u32>,
    /// Explicit box bounds, e.g. "0:3,0:1".
    #[arg(long, global = true, value_name = "LO:HI,...")]
    pub reduced_box: Option<String>,
    /// Source vertex, e.g. "0,0".
    #[arg(long, global = true)]
    pub source: Option<String>,
    #[arg(long, global = true)]
    pub sink: Option<String>,
    /// Smaller edge weight (default 1).
    #[arg(long, global = true)]
    pub a: Option<i64>,
    /// Larger edge weight (default 2).
    #[arg(long, global = true)]
    pub b: Option<i64>,
    /// Probability that an edge takes the value a.
    #[arg(long, global = true)]
    pub p: Option<f64>,
    /// Environment file; replaces the inline lattice flags.
    #[arg(long, global = true)]
    pub env: Option<PathBuf>,
    /// Derivative order.
    #[arg(long, global = true)]
    pub k: Option<usize>,
    /// Search strategy for search-extremes (default exhaustive)
    #[arg(long, global = true, value_enum)]
    pub mode: Option<Mode>,
    /// Evaluation budget per objective for randomized search
    #[arg(long, global = true)]
    pub budget: Option<u64>,
    /// RNG seed; required by randomized search and Monte Carlo
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads; 0 uses every core.
    #[arg(long, global = true, env = "FPP_WORKERS")]
    pub workers: Option<usize>,
    /// Output format (variance defaults to csv, everything else to json)
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Passage time and geodesic edges of one environment.
    Time,
    /// Derivative of the passage time along a set of edges.
    Derivative {
        /// Edge as "x,y,...:axis"; repeat for each edge of S.
        #[arg(long = "edge", required = true)]
        edges: Vec<String>,
        #[arg(long, value_enum, default_value_t = Method::Leibniz)]
        method: Method,
    },
    /// Essential / influential status of every edge.
    Classify,
    /// Closed-form two-lane derivative, optionally embedded in a box and verified.
    Lanes {
        #[arg(long)]
        m1: u32,
        #[arg(long)]
        m2: u32,
        #[arg(long, default_value_t = 0)]
        beta1: u32,
        #[arg(long, default_value_t = 0)]
        beta2: u32,
        #[arg(long)]
        embed: bool,
    },
    /// Largest and smallest normalized derivatives of order k.
    SearchExtremes {
        #[arg(long, default_value_t = 4)]
        max_beta: u32,
    },
    /// Exact variance decomposition over edge subsets.
    Variance {
        /// Largest subset size included; defaults to every size.
        #[arg(long)]
        max_size: Option<usize>,
        #[arg(long)]
        mc_samples: Option<u64>,
    },
    /// Binomial identities checked on a full grid.
    Identities {
        #[arg(long)]
        check: bool,
        #[arg(long, default_value_t = 64)]
        max: i64,
    },
    /// Table of extremal values for orders 1 to 4.
    ReproduceTable {
        #[arg(long, default_value_t = 4)]
        max_beta: u32,
    },
    /// Order-5 extremes: lane family plus randomized search on a lane embedding.
    HuntK5 {
        #[arg(long, default_value_t = 4)]
        max_beta: u32,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Exhaustive,
    Random,
    Lanes,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Leibniz,
    Recursive,
    Table,
}
