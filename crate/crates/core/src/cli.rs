//! Command-line front end. Data goes to stdout or `-o`; diagnostics go to
//! stderr through `log`.

use std::ffi::OsString;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use flate2::read::GzDecoder;
use serde::Serialize;
use thiserror::Error;

use crate::depgraph::DependencyGraph;
use crate::evolution::{
    aggregate_flows, classify_flows, diff_groups, suggest_patterns, write_flows_csv, ChangeRecord,
    FlowAggregate, FlowReport, GroupDiff, PatternConfig,
};
use crate::gvalue::{score_snapshot, write_reports_csv, DEFAULT_LOW_QUALITY_THRESHOLD};
use crate::ingest::{
    assemble_snapshot, fetch_repo_metadata, load_snapshot, parse_comps, parse_primary,
    save_snapshot, IngestError, Snapshot,
};
use crate::textvec::{keyword_contrast, tokenize};
use crate::topics::{topic_report, LdaSettings};
use crate::trends::{
    popularity_correlation, read_popularity, trend_series, write_trends_csv, PopularityCorrelation,
    TrendPoint,
};

/// Exit status for success.
pub const EXIT_OK: i32 = 0;
/// Exit status for malformed command lines.
pub const EXIT_USAGE: i32 = 1;
/// Exit status for unreadable or invalid data.
pub const EXIT_DATA: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "p2g",
    version,
    about = "Package-to-group analysis for RPM repositories"
)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct Output {
    /// Write to this file instead of stdout.
    #[arg(short, long, value_name = "PATH")]
    pub output: Option<PathBuf>,
    /// Output format; defaults to the extension of `-o`, else json.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

impl Output {
    fn format(&self) -> Format {
        self.format.unwrap_or_else(|| match &self.output {
            Some(p) if p.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) => Format::Csv,
            _ => Format::Json,
        })
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a snapshot from comps and primary metadata (plain or gzipped).
    Ingest {
        #[arg(long, value_name = "FILE")]
        comps: PathBuf,
        #[arg(long, value_name = "FILE")]
        primary: PathBuf,
        #[arg(long = "dist", value_name = "NAME")]
        distribution: String,
        #[arg(long = "version", value_name = "V")]
        release: String,
        #[arg(short, long, value_name = "PATH")]
        output: Option<PathBuf>,
    },
    /// Download repodata of a mirror into a directory.
    Fetch {
        #[arg(value_name = "BASE_URL")]
        base_url: String,
        #[arg(long, value_name = "DIR")]
        dest: PathBuf,
    },
    /// Score every group of a snapshot.
    Score {
        snapshot: PathBuf,
        /// Groups below this GValue are flagged low quality.
        #[arg(long, default_value_t = DEFAULT_LOW_QUALITY_THRESHOLD, value_parser = unit_interval)]
        threshold: f64,
        #[command(flatten)]
        out: Output,
    },
    /// Group-level diff and change-pattern suggestions between two snapshots.
    Diff {
        prev: PathBuf,
        curr: PathBuf,
        #[arg(long, default_value_t = PatternConfig::default().rename_overlap, value_parser = unit_interval)]
        rename_overlap: f64,
        #[arg(long, default_value_t = PatternConfig::default().coverage, value_parser = unit_interval)]
        coverage: f64,
        #[arg(short, long, value_name = "PATH")]
        output: Option<PathBuf>,
    },
    /// Package flows along a chain of consecutive snapshots.
    Flows {
        #[arg(required = true, num_args = 2..)]
        snapshots: Vec<PathBuf>,
        #[command(flatten)]
        out: Output,
    },
    /// P2G ratio over a release series, optionally against popularity.
    Trends {
        #[arg(required = true, num_args = 1..)]
        snapshots: Vec<PathBuf>,
        /// CSV with `name,stars` columns.
        #[arg(long, value_name = "FILE")]
        popularity: Option<PathBuf>,
        #[command(flatten)]
        out: Output,
    },
    /// LDA topics of group descriptions with coherence-based topic count.
    Topics {
        snapshot: PathBuf,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        kmin: u64,
        #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u64).range(1..))]
        kmax: u64,
        #[arg(long, default_value_t = LdaSettings::default().seed)]
        seed: u64,
        /// Document-topic prior; defaults to 50/K.
        #[arg(long, value_parser = positive)]
        alpha: Option<f64>,
        #[arg(long, default_value_t = LdaSettings::default().beta, value_parser = positive)]
        beta: f64,
        #[arg(long, default_value_t = LdaSettings::default().iterations as u64, value_parser = clap::value_parser!(u64).range(1..))]
        iterations: u64,
        #[arg(long, default_value_t = LdaSettings::default().top_n as u64, value_parser = clap::value_parser!(u64).range(1..))]
        top_n: u64,
        #[arg(short, long, value_name = "PATH")]
        output: Option<PathBuf>,
    },
    /// TF-IDF keywords of grouped versus ungrouped package descriptions.
    Keywords {
        snapshot: PathBuf,
        #[arg(long, default_value_t = 10)]
        top: usize,
        #[arg(short, long, value_name = "PATH")]
        output: Option<PathBuf>,
    },
    /// Summary of a snapshot: coverage, graph size, low-quality groups.
    Report {
        snapshot: PathBuf,
        #[arg(long, default_value_t = DEFAULT_LOW_QUALITY_THRESHOLD, value_parser = unit_interval)]
        threshold: f64,
        #[arg(short, long, value_name = "PATH")]
        output: Option<PathBuf>,
    },
}

fn unit_interval(raw: &str) -> Result<f64, String> {
    let v: f64 = raw.parse().map_err(|e| format!("{e}"))?;
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(format!("{v} is outside [0, 1]"))
    }
}

fn positive(raw: &str) -> Result<f64, String> {
    let v: f64 = raw.parse().map_err(|e| format!("{e}"))?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("{v} must be positive"))
    }
}

/// Failures after the command line parsed; all map to [`EXIT_DATA`].
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Data { path: PathBuf, message: String },
    #[error("{0}")]
    Invalid(String),
}

impl CliError {
    fn data(path: &Path, err: impl std::fmt::Display) -> Self {
        CliError::Data {
            path: path.to_path_buf(),
            message: err.to_string(),
        }
    }
}

/// Parses `argv` (program name first) and runs it, writing data to `stdout`
/// and messages to `stderr`. Returns the process exit status.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let config = match RunConfig::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let mut text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = stdout.write_all(text.as_bytes());
                    EXIT_OK
                }
                _ => {
                    if !text.contains("Usage:") {
                        text.push('\n');
                        text.push_str(&usage_for(argv.get(1)));
                        text.push('\n');
                    }
                    let _ = stderr.write_all(text.as_bytes());
                    EXIT_USAGE
                }
            };
        }
    };
    match execute(config.command, stdout) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_DATA
        }
    }
}

/// Usage line of the named subcommand, or of the whole tool.
fn usage_for(subcommand: Option<&OsString>) -> String {
    let mut cmd = RunConfig::command();
    cmd.build();
    let name = subcommand.and_then(|s| s.to_str()).unwrap_or_default();
    match cmd.find_subcommand_mut(name) {
        Some(sub) => sub.render_usage().to_string(),
        None => cmd.render_usage().to_string(),
    }
}

fn read_file(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Reads a file, transparently inflating gzip content.
fn read_maybe_gzip(path: &Path) -> Result<Vec<u8>, CliError> {
    let raw = read_file(path)?;
    if raw.starts_with(&[0x1f, 0x8b]) {
        let mut out = Vec::new();
        GzDecoder::new(raw.as_slice())
            .read_to_end(&mut out)
            .map_err(|e| CliError::data(path, format!("gzip: {e}")))?;
        Ok(out)
    } else {
        Ok(raw)
    }
}

fn load(path: &Path) -> Result<Snapshot, CliError> {
    load_snapshot(path).map_err(|e| match e {
        // already names the path
        IngestError::Io { .. } => CliError::Invalid(e.to_string()),
        other => CliError::data(path, other),
    })
}

fn emit(bytes: &[u8], output: Option<&Path>, stdout: &mut dyn Write) -> Result<(), CliError> {
    match output {
        Some(path) => fs::write(path, bytes).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        }),
        None => stdout.write_all(bytes).map_err(|source| CliError::Io {
            path: PathBuf::from("<stdout>"),
            source,
        }),
    }
}

fn json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("report types serialize");
    bytes.push(b'\n');
    bytes
}

fn csv_bytes(write: impl FnOnce(&mut Vec<u8>) -> csv::Result<()>) -> Result<Vec<u8>, CliError> {
    let mut buf = Vec::new();
    write(&mut buf).map_err(|e| CliError::Invalid(format!("csv: {e}")))?;
    Ok(buf)
}

#[derive(Serialize)]
struct DiffOutput<'a> {
    prev_version: &'a str,
    curr_version: &'a str,
    #[serde(flatten)]
    diff: GroupDiff,
    patterns: Vec<ChangeRecord>,
}

#[derive(Serialize)]
struct FlowsOutput {
    flows: Vec<FlowReport>,
    aggregate: FlowAggregate,
}

#[derive(Serialize)]
struct TrendsOutput {
    points: Vec<TrendPoint>,
    #[serde(skip_serializing_if = "Option::is_none")]
    popularity: Option<PopularityCorrelation>,
}

#[derive(Serialize)]
struct SummaryOutput<'a> {
    distribution: &'a str,
    version: &'a str,
    groups: usize,
    packages: usize,
    p2g_packages: usize,
    p2g_ratio: f64,
    dependency_edges: usize,
    unresolved_requirements: usize,
    threshold: f64,
    low_quality: Vec<String>,
}

fn execute(command: Command, stdout: &mut dyn Write) -> Result<(), CliError> {
    match command {
        Command::Ingest {
            comps,
            primary,
            distribution,
            release,
            output,
        } => {
            let groups =
                parse_comps(&read_maybe_gzip(&comps)?).map_err(|e| CliError::data(&comps, e))?;
            for w in &groups.warnings {
                log::warn!("{}: {w}", comps.display());
            }
            let packages = parse_primary(&read_maybe_gzip(&primary)?)
                .map_err(|e| CliError::data(&primary, e))?;
            for w in &packages.warnings {
                log::warn!("{}: {w}", primary.display());
            }
            let snapshot = assemble_snapshot(distribution, release, groups.items, packages.items)
                .map_err(|e| CliError::Invalid(e.to_string()))?;
            log::info!(
                "ingested {} groups and {} packages",
                snapshot.groups.len(),
                snapshot.packages.len()
            );
            let bytes = save_snapshot(&snapshot).map_err(|e| CliError::Invalid(e.to_string()))?;
            emit(&bytes, output.as_deref(), stdout)
        }
        Command::Fetch { base_url, dest } => {
            let manifest =
                fetch_repo_metadata(&base_url, &dest).map_err(|e| CliError::data(&dest, e))?;
            let mut listing = String::new();
            for f in &manifest.files {
                listing.push_str(&format!("{}\t{}\n", f.kind, f.path.display()));
            }
            emit(listing.as_bytes(), None, stdout)
        }
        Command::Score {
            snapshot,
            threshold,
            out,
        } => {
            let s = load(&snapshot)?;
            let scores = score_snapshot(&s, threshold);
            log::info!(
                "{} of {} groups below {threshold}",
                scores.low_quality.len(),
                scores.reports.len()
            );
            let bytes = match out.format() {
                Format::Json => json(&scores.reports),
                Format::Csv => csv_bytes(|buf| write_reports_csv(&scores.reports, buf))?,
            };
            emit(&bytes, out.output.as_deref(), stdout)
        }
        Command::Diff {
            prev,
            curr,
            rename_overlap,
            coverage,
            output,
        } => {
            let (a, b) = (load(&prev)?, load(&curr)?);
            let config = PatternConfig {
                rename_overlap,
                coverage,
            };
            let result = DiffOutput {
                prev_version: &a.version,
                curr_version: &b.version,
                diff: diff_groups(&a, &b),
                patterns: suggest_patterns(&a, &b, &config),
            };
            emit(&json(&result), output.as_deref(), stdout)
        }
        Command::Flows { snapshots, out } => {
            let loaded = snapshots
                .iter()
                .map(|p| load(p))
                .collect::<Result<Vec<_>, _>>()?;
            let flows: Vec<FlowReport> = loaded
                .windows(2)
                .map(|w| classify_flows(&w[0], &w[1]))
                .collect();
            let bytes = match out.format() {
                Format::Json => json(&FlowsOutput {
                    aggregate: aggregate_flows(&flows)
                        .map_err(|e| CliError::Invalid(e.to_string()))?,
                    flows,
                }),
                Format::Csv => csv_bytes(|buf| write_flows_csv(&flows, buf))?,
            };
            emit(&bytes, out.output.as_deref(), stdout)
        }
        Command::Trends {
            snapshots,
            popularity,
            out,
        } => {
            let loaded = snapshots
                .iter()
                .map(|p| load(p))
                .collect::<Result<Vec<_>, _>>()?;
            let points = trend_series(&loaded);
            let bytes = match out.format() {
                Format::Csv => csv_bytes(|buf| write_trends_csv(&points, buf))?,
                Format::Json => {
                    let popularity = match &popularity {
                        Some(path) => {
                            let stars = read_popularity(read_file(path)?.as_slice())
                                .map_err(|e| CliError::data(path, e))?;
                            Some(
                                popularity_correlation(&points, &stars)
                                    .map_err(|e| CliError::data(path, e))?,
                            )
                        }
                        None => None,
                    };
                    json(&TrendsOutput { points, popularity })
                }
            };
            emit(&bytes, out.output.as_deref(), stdout)
        }
        Command::Topics {
            snapshot,
            kmin,
            kmax,
            seed,
            alpha,
            beta,
            iterations,
            top_n,
            output,
        } => {
            let s = load(&snapshot)?;
            let settings = LdaSettings {
                alpha,
                beta,
                iterations: iterations as usize,
                seed,
                top_n: top_n as usize,
            };
            let report = topic_report(&s, kmin as usize, kmax as usize, &settings)
                .map_err(|e| CliError::data(&snapshot, e))?;
            emit(&json(&report), output.as_deref(), stdout)
        }
        Command::Keywords {
            snapshot,
            top,
            output,
        } => {
            let s = load(&snapshot)?;
            let grouped = s.grouped_names();
            let (inside, outside): (Vec<_>, Vec<_>) = s
                .packages
                .iter()
                .partition(|p| grouped.contains(p.name.as_str()));
            let docs = |ps: Vec<&crate::ingest::PackageMeta>| -> Vec<Vec<String>> {
                ps.into_iter().map(|p| tokenize(&p.description)).collect()
            };
            let contrast = keyword_contrast(&docs(inside), &docs(outside), top)
                .map_err(|e| CliError::data(&snapshot, e))?;
            emit(&json(&contrast), output.as_deref(), stdout)
        }
        Command::Report {
            snapshot,
            threshold,
            output,
        } => {
            let s = load(&snapshot)?;
            let graph = DependencyGraph::build(&s);
            let point = TrendPoint::of(&s);
            let scores = score_snapshot(&s, threshold);
            let summary = SummaryOutput {
                distribution: &s.distribution,
                version: &s.version,
                groups: s.groups.len(),
                packages: s.packages.len(),
                p2g_packages: point.p2g_package_count,
                p2g_ratio: point.ratio,
                dependency_edges: graph.edge_count(),
                unresolved_requirements: graph.unresolved().len(),
                threshold,
                low_quality: scores.low_quality.into_iter().map(|r| r.group_id).collect(),
            };
            emit(&json(&summary), output.as_deref(), stdout)
        }
    }
}
