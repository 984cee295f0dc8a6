//! Command-line harness for the disc-operad laboratory.
//!
//! Data commands (`sample`, `compose`, `decompose`, `classify`, `trees`,
//! `fm`, `alpha`, `flow`) read and write JSON; `check` runs named
//! verification suites over deterministic seeded samples.
//!
//! Exit codes: 0 everything passed, 1 a property check failed, 2 usage or
//! input errors. All randomness is derived from `--seed`, so identical
//! invocations produce byte-identical output (wall-clock timings go to
//! stderr). The `OPERAD_LAB_THREADS` environment variable caps the worker
//! pool used by `check`.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use operad_lab_core::bar::{self, BarPoint};
use operad_lab_core::disc::{self, DiscConfig};
use operad_lab_core::flow;
use operad_lab_core::fm::{self, FmPoint, SinhaCoords};
use operad_lab_core::geometry::{labels_to_string, Label, Mode, Norm, Tol};
use operad_lab_core::sample::{self, numeric_labels, rng_for};
use operad_lab_core::suite::{self, SuiteConfig, SUITE_NAMES};
use operad_lab_core::trees::{self, LabelledTree};

#[derive(Parser)]
#[command(
    name = "operad-lab",
    version,
    about = "Weighted disc configurations: composition, trees, duality pairings and the collision flow"
)]
struct Cli {
    #[command(flatten)]
    opts: GlobalOpts,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct GlobalOpts {
    /// Seed for all deterministic sampling.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Ambient dimension for generated data.
    #[arg(long, global = true, default_value_t = 2)]
    dim: usize,

    /// Norm on the ambient space: linf, l1 or l2 (l2 needs --backend float).
    #[arg(long, global = true, default_value = "linf")]
    norm: Norm,

    /// Scalar backend: exact rationals or 64-bit floats.
    #[arg(long, global = true, value_enum, default_value_t = Backend::Exact)]
    backend: Backend,

    /// Number of random cases per verification suite.
    #[arg(long, global = true, default_value_t = 100)]
    samples: usize,

    /// Emit machine-readable JSON where a text form exists.
    #[arg(long, global = true)]
    json: bool,

    /// Float-backend comparison tolerance (sets both the relative and the
    /// absolute epsilon; exact comparisons ignore it).
    #[arg(long, global = true)]
    tol: Option<f64>,
}

impl GlobalOpts {
    fn mode(&self) -> Mode {
        match self.backend {
            Backend::Exact => Mode::Exact,
            Backend::Float => Mode::Float,
        }
    }

    fn tolerance(&self) -> Tol {
        self.tol.map(|e| Tol::new(e, e)).unwrap_or_default()
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Backend {
    Exact,
    Float,
}

/// Named diagram shorthands for `check --diagram`.
#[derive(Clone, Copy, ValueEnum)]
enum Diagram {
    /// The pairing-vs-composition square (suite `alpha-diagram`).
    Alpha,
    /// The splitting/pairing compatibility square (suite `kappa-sigma-pro`).
    Pro,
}

/// Configuration classes the `sample` command can draw from.
#[derive(Clone, Copy, ValueEnum)]
enum SampleClass {
    /// Any weighted configuration.
    P,
    /// Disjoint discs inside the unit disc.
    E,
    /// Disjoint, bounded, weights summing to 1, barycentre 0.
    D,
    /// Weights summing to 1, barycentre 0.
    R,
    /// Barycentric and disjoint (not necessarily bounded).
    Rd,
    /// Interior points: every disc contains the origin and all centres.
    Star,
    /// Barycentric with pairwise distinct centres.
    U,
}

#[derive(Subcommand)]
enum Command {
    /// Draw deterministic configurations from a named class (JSON out).
    Sample {
        /// Which membership class to target.
        #[arg(long, value_enum)]
        class: SampleClass,

        /// Number of discs (labelled consecutively from --first-label).
        #[arg(long, default_value_t = 3)]
        labels: usize,

        /// First numeric label; shift it to compose samples without label
        /// collisions.
        #[arg(long, default_value_t = 1)]
        first_label: usize,

        /// How many configurations to emit; a single one is pretty-printed,
        /// several come one compact JSON object per line.
        #[arg(long, default_value_t = 1)]
        count: usize,
    },

    /// Insert the inner configuration at a label of the outer one.
    Compose {
        /// JSON file with the outer configuration.
        #[arg(long)]
        outer: PathBuf,

        /// JSON file with the inner configuration.
        #[arg(long)]
        inner: PathBuf,

        /// Label of the outer disc to replace.
        #[arg(long)]
        at: String,

        /// Write the composite here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },

    /// Split a barycentric configuration along a block of labels.
    Decompose {
        /// JSON file with the configuration.
        #[arg(long)]
        input: PathBuf,

        /// Comma-separated labels forming the block, e.g. `1,3`.
        #[arg(long)]
        block: String,

        /// Fresh label carrying the collapsed block in the outer factor.
        #[arg(long, default_value = "block")]
        fresh: String,
    },

    /// Report membership of a configuration in the standard classes.
    Classify {
        /// JSON file with the configuration.
        #[arg(long)]
        input: PathBuf,
    },

    /// Enumerate the labelled trees on 1..=N.
    Trees {
        /// Number of leaf labels (2..=7).
        #[arg(long)]
        labels: usize,

        /// Print only the number of trees.
        #[arg(long)]
        count_only: bool,
    },

    /// Lift a configuration with distinct centres to a compactified table
    /// (screens, stratum tree and direction/ratio coordinates).
    Fm {
        /// JSON file with the configuration.
        #[arg(long)]
        input: PathBuf,
    },

    /// Evaluate the duality pairing of a compactified table against a bar
    /// point; prints the resulting quotient-sphere point.
    Alpha {
        /// JSON file with the compactified table.
        #[arg(long)]
        screens: PathBuf,

        /// JSON file with the bar point.
        #[arg(long)]
        bar: PathBuf,
    },

    /// Run the collision retraction flow from a configuration (converted to
    /// the float backend; the flow integrates closed forms per merge phase).
    Flow {
        /// JSON file with the starting configuration (must be barycentric
        /// and pairwise disjoint).
        #[arg(long)]
        input: PathBuf,

        /// Evaluate the retraction homotopy at this parameter in [0, 1] and
        /// print the configuration instead of the event trace.
        #[arg(long)]
        until: Option<f64>,
    },

    /// Run verification suites (all of them by default). Exits 1 if any
    /// check fails.
    Check {
        /// Run a single named suite (repeatable); see --list for names.
        #[arg(long)]
        suite: Vec<String>,

        /// Shorthand for the duality-diagram suites.
        #[arg(long, value_enum)]
        diagram: Option<Diagram>,

        /// List the registered suite names and exit.
        #[arg(long)]
        list: bool,
    },
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            std::process::exit(2);
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<i32> {
    let opts = &cli.opts;
    match cli.command {
        Command::Sample {
            class,
            labels,
            first_label,
            count,
        } => cmd_sample(opts, class, labels, first_label, count),
        Command::Compose {
            outer,
            inner,
            at,
            out,
        } => cmd_compose(&outer, &inner, &at, out.as_deref()),
        Command::Decompose {
            input,
            block,
            fresh,
        } => cmd_decompose(opts, &input, &block, &fresh),
        Command::Classify { input } => cmd_classify(opts, &input),
        Command::Trees { labels, count_only } => cmd_trees(opts, labels, count_only),
        Command::Fm { input } => cmd_fm(opts, &input),
        Command::Alpha { screens, bar } => cmd_alpha(opts, &screens, &bar),
        Command::Flow { input, until } => cmd_flow(opts, &input, until),
        Command::Check {
            suite,
            diagram,
            list,
        } => cmd_check(opts, suite, diagram, list),
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> anyhow::Result<T> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

/// Write a line to stdout; a consumer that hangs up early (`| head`) ends
/// the program quietly instead of panicking.
fn print_line(text: &str) -> anyhow::Result<()> {
    use std::io::Write;
    let mut stdout = std::io::stdout().lock();
    match writeln!(stdout, "{text}") {
        Ok(()) => Ok(()),
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => std::process::exit(0),
        Err(e) => Err(e.into()),
    }
}

fn emit_json<T: Serialize>(value: &T, out: Option<&Path>) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match out {
        Some(path) => fs::write(path, text + "\n")
            .with_context(|| format!("writing {}", path.display()))?,
        None => print_line(&text)?,
    }
    Ok(())
}

fn parse_labels(list: &str) -> anyhow::Result<BTreeSet<Label>> {
    let set: BTreeSet<Label> = list
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(Label::new)
        .collect();
    anyhow::ensure!(!set.is_empty(), "empty label list {list:?}");
    Ok(set)
}

fn cmd_sample(
    opts: &GlobalOpts,
    class: SampleClass,
    labels: usize,
    first_label: usize,
    count: usize,
) -> anyhow::Result<i32> {
    anyhow::ensure!(labels >= 1, "need at least one label");
    let labels: BTreeSet<Label> = (first_label..first_label + labels)
        .map(|i| Label::new(i.to_string()))
        .collect();
    let mode = opts.mode();
    for index in 0..count {
        let mut rng = rng_for(opts.seed, index as u64);
        let c = match class {
            SampleClass::P => sample::sample_p(&mut rng, mode, opts.dim, &labels),
            SampleClass::E => sample::sample_e(&mut rng, mode, opts.dim, &labels, opts.norm),
            SampleClass::D => sample::sample_d(&mut rng, mode, opts.dim, &labels, opts.norm),
            SampleClass::R => sample::sample_r(&mut rng, mode, opts.dim, &labels),
            SampleClass::Rd => sample::sample_rd(&mut rng, mode, opts.dim, &labels, opts.norm),
            SampleClass::Star => sample::sample_open_star(&mut rng, mode, opts.dim, &labels),
            SampleClass::U => sample::sample_u(&mut rng, mode, opts.dim, &labels, opts.norm),
        }?;
        if count == 1 {
            print_line(&serde_json::to_string_pretty(&c)?)?;
        } else {
            print_line(&serde_json::to_string(&c)?)?;
        }
    }
    Ok(0)
}

fn cmd_compose(
    outer: &Path,
    inner: &Path,
    at: &str,
    out: Option<&Path>,
) -> anyhow::Result<i32> {
    let outer: DiscConfig = read_json(outer)?;
    let inner: DiscConfig = read_json(inner)?;
    let composite = disc::compose(&outer, &inner, &Label::new(at))?;
    emit_json(&composite, out)?;
    Ok(0)
}

fn cmd_decompose(
    opts: &GlobalOpts,
    input: &Path,
    block: &str,
    fresh: &str,
) -> anyhow::Result<i32> {
    let c: DiscConfig = read_json(input)?;
    let block = parse_labels(block)?;
    let (outer, inner) = disc::decompose(&c, &block, &Label::new(fresh), &opts.tolerance())?;

    #[derive(Serialize)]
    struct Out {
        outer: DiscConfig,
        inner: DiscConfig,
    }
    emit_json(&Out { outer, inner }, None)?;
    Ok(0)
}

fn cmd_classify(opts: &GlobalOpts, input: &Path) -> anyhow::Result<i32> {
    let c: DiscConfig = read_json(input)?;
    let class = disc::classify(&c, opts.norm, &opts.tolerance())?;
    if opts.json {
        print_line(&serde_json::to_string_pretty(&class)?)?;
    } else {
        print_line(&format!("in_p: {}", class.in_p))?;
        print_line(&format!("in_e: {}", class.in_e))?;
        print_line(&format!("in_r: {}", class.in_r))?;
        print_line(&format!("in_d: {}", class.in_d))?;
        print_line(&format!("in_rd: {}", class.in_rd))?;
        print_line(&format!("in_u: {}", class.in_u))?;
        print_line(&format!("in_open_star: {}", class.in_open_star))?;
        print_line(&format!("in_delta_fibre: {}", class.in_delta_fibre))?;
    }
    Ok(0)
}

fn cmd_trees(opts: &GlobalOpts, labels: usize, count_only: bool) -> anyhow::Result<i32> {
    let labels = numeric_labels(labels);
    let all = trees::enumerate(&labels)?;
    if count_only {
        print_line(&all.len().to_string())?;
    } else if opts.json {
        print_line(&serde_json::to_string_pretty(&all)?)?;
    } else {
        print_line(&format!("count: {}", all.len()))?;
        for tree in &all {
            print_line(&describe_tree(tree))?;
        }
    }
    Ok(0)
}

/// A tree is determined by its internal edges; the corolla has none.
fn describe_tree(tree: &LabelledTree) -> String {
    let internal = tree.internal_edges();
    if internal.is_empty() {
        return "corolla".into();
    }
    internal
        .iter()
        .map(|e| format!("{{{}}}", labels_to_string(e)))
        .collect::<Vec<_>>()
        .join(" ")
}

fn cmd_fm(opts: &GlobalOpts, input: &Path) -> anyhow::Result<i32> {
    let c: DiscConfig = read_json(input)?;
    let point = FmPoint::from_configuration(c.centres(), c.weights(), opts.norm)?;
    let stratum = fm::stratum_tree(&point, &opts.tolerance())?;
    let coords = fm::sinha_coords(&point, opts.norm)?;

    #[derive(Serialize)]
    struct Out {
        point: FmPoint,
        stratum: LabelledTree,
        coords: SinhaCoords,
    }
    emit_json(
        &Out {
            point,
            stratum,
            coords,
        },
        None,
    )?;
    Ok(0)
}

fn cmd_alpha(opts: &GlobalOpts, screens: &Path, bar_path: &Path) -> anyhow::Result<i32> {
    let point: FmPoint = read_json(screens)?;
    let bar_point: BarPoint = read_json(bar_path)?;
    let star = bar::alpha_eval(&point, &bar_point, opts.norm, &opts.tolerance())?;
    emit_json(&star, None)?;
    Ok(0)
}

fn cmd_flow(opts: &GlobalOpts, input: &Path, until: Option<f64>) -> anyhow::Result<i32> {
    let c: DiscConfig = read_json(input)?;
    let c = c.to_float();
    let tol = opts.tolerance();
    if let Some(u) = until {
        anyhow::ensure!(
            (0.0..=1.0).contains(&u),
            "--until takes a homotopy parameter in [0, 1], got {u}"
        );
        let at = flow::retraction_h(&c, u, opts.norm, &tol)?;
        emit_json(&at, None)?;
        return Ok(0);
    }
    let trace = flow::flow_retract(&c, opts.norm, &tol)?;
    if opts.json {
        print_line(&serde_json::to_string_pretty(&trace)?)?;
    } else {
        print_line(&format!("events: {}", trace.events.len()))?;
        for event in &trace.events {
            let merged = event
                .merged
                .iter()
                .map(|b| format!("{{{}}}", labels_to_string(b)))
                .collect::<Vec<_>>()
                .join(" ");
            print_line(&format!(
                "  s = {:.6}  r = {:.6}  merged {merged}",
                event.time, event.r_value
            ))?;
        }
        print_line(&format!("terminal time: {:.6}", trace.terminal_time))?;
        print_line(&format!("terminal r: {:.6}", trace.terminal_r))?;
    }
    Ok(0)
}

fn cmd_check(
    opts: &GlobalOpts,
    suites: Vec<String>,
    diagram: Option<Diagram>,
    list: bool,
) -> anyhow::Result<i32> {
    if list {
        for name in SUITE_NAMES {
            print_line(name)?;
        }
        return Ok(0);
    }
    let mut selected = suites;
    if let Some(d) = diagram {
        selected.push(
            match d {
                Diagram::Alpha => "alpha-diagram",
                Diagram::Pro => "kappa-sigma-pro",
            }
            .to_string(),
        );
    }
    if selected.is_empty() {
        selected = SUITE_NAMES.iter().map(|s| s.to_string()).collect();
    }

    let cfg = SuiteConfig {
        seed: opts.seed,
        dim: opts.dim,
        mode: opts.mode(),
        norm: opts.norm,
        samples: opts.samples,
        tol: opts.tolerance(),
    };

    let mut reports = Vec::new();
    for name in &selected {
        let report = suite::run_suite(name, &cfg)?;
        eprintln!("suite {}: {} ms", report.suite, report.wall_ms);
        reports.push(report);
    }
    let ok = reports.iter().all(|r| r.ok());

    if opts.json {
        // Zero the wall-clock field so identical runs are byte-identical.
        for report in &mut reports {
            report.wall_ms = 0;
        }
        print_line(&serde_json::to_string_pretty(&reports)?)?;
    } else {
        for report in &reports {
            if report.ok() {
                print_line(&format!(
                    "suite {}: PASS ({} cases)",
                    report.suite, report.cases
                ))?;
            } else {
                print_line(&format!(
                    "suite {}: FAIL ({} of {} cases)",
                    report.suite,
                    report.cases - report.passed,
                    report.cases
                ))?;
                for failure in &report.failures {
                    print_line(&format!("  {}: {}", failure.case, failure.detail))?;
                }
            }
        }
    }
    Ok(if ok { 0 } else { 1 })
}
