//! Experiment runner behind the `vgrowth` binary. A run turns an
//! [`ExperimentConfig`] into one artifact (CSV, JSON or DOT) and a status.

pub mod suites;

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;

use serde::Serialize;
use thiserror::Error;
use vgrowth_core::construction::{self, Construction, MAX_CONSTRUCTION_LEVEL};
use vgrowth_core::grig::{BoundaryPoint, Letter, Vertex};
use vgrowth_core::growth::{self, GrowthReport, Limits};
use vgrowth_core::schreier::{self, BoundaryAction, LevelAction, MAX_GRAPH_LEVEL};

/// Largest Grigorchuk ball depth accepted without `uncapped`.
pub const GRIG_DEPTH_CAP: usize = 20;
/// Largest inverted-orbit depth accepted without `uncapped`.
pub const ORBIT_DEPTH_CAP: usize = 40;

/// Depth cap for ball enumeration over `E_n`.
pub fn en_depth_cap(n: usize) -> usize {
    if n <= 4 {
        6
    } else {
        5
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// The image of `T_n` in `V`, with inverses of the Thompson letters.
    En,
    /// The Grigorchuk group over `{a, b, c, d}`.
    Grig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Grig,
    V,
    Construction,
}

/// Basepoint of a ball drawn by `schreier build`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Center {
    Rho,
    Eta,
    /// `ρ` in the orbit of the boundary point.
    Boundary,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Experiment {
    Verify { suite: Suite, n: usize, samples: usize },
    SchreierBuild { n: usize, radius: Option<usize>, center: Center },
    SchreierSeparation { n_min: usize, n_max: usize },
    SchreierBalls { n_min: usize, n_max: usize },
    SchreierOrbits { depth: usize, level: Option<usize> },
    Growth { family: Family, n_min: usize, n_max: usize, depth: usize },
    NormalForm { n: usize, word: String },
    CountFactors { n: usize, depth: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub threads: Option<usize>,
    pub seed: u64,
    pub budget_bytes: usize,
    /// Lift the per-experiment depth caps.
    pub uncapped: bool,
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment) -> ExperimentConfig {
        ExperimentConfig {
            experiment,
            out: None,
            format: Format::Csv,
            threads: None,
            seed: 0,
            budget_bytes: Limits::default().budget_bytes,
            uncapped: false,
        }
    }

    fn limits(&self) -> Limits {
        Limits { budget_bytes: self.budget_bytes, threads: self.threads }
    }

    /// Rejects parameters outside the supported ranges.
    pub fn validate(&self) -> Result<(), CliError> {
        let invalid = |msg: String| Err(CliError::InvalidConfig(msg));
        if self.threads == Some(0) {
            return invalid("--threads must be positive".into());
        }
        let level = |n: usize, max: usize| -> Result<(), CliError> {
            if n == 0 || n > max {
                return Err(CliError::InvalidConfig(format!("level {n} outside 1..={max}")));
            }
            Ok(())
        };
        let range = |lo: usize, hi: usize, max: usize| -> Result<(), CliError> {
            level(lo, max)?;
            level(hi, max)?;
            if lo > hi {
                return Err(CliError::InvalidConfig(format!("empty level range {lo}..={hi}")));
            }
            Ok(())
        };
        let capped = |depth: usize, cap: usize| -> Result<(), CliError> {
            if !self.uncapped && depth > cap {
                return Err(CliError::InvalidConfig(format!(
                    "depth {depth} exceeds the cap {cap}; pass --uncapped to override"
                )));
            }
            Ok(())
        };
        match &self.experiment {
            Experiment::Verify { suite, n, .. } => {
                if *suite == Suite::Construction {
                    level(*n, MAX_CONSTRUCTION_LEVEL)?;
                }
            }
            Experiment::SchreierBuild { n, .. } => level(*n, MAX_GRAPH_LEVEL)?,
            Experiment::SchreierSeparation { n_min, n_max } | Experiment::SchreierBalls { n_min, n_max } => {
                range(*n_min, *n_max, MAX_GRAPH_LEVEL)?
            }
            Experiment::SchreierOrbits { depth, level: l } => {
                if let Some(n) = l {
                    level(*n, MAX_GRAPH_LEVEL)?;
                }
                capped(*depth, ORBIT_DEPTH_CAP)?;
            }
            Experiment::Growth { family, n_min, n_max, depth } => match family {
                Family::Grig => capped(*depth, GRIG_DEPTH_CAP)?,
                Family::En => {
                    range(*n_min, *n_max, MAX_CONSTRUCTION_LEVEL)?;
                    capped(*depth, en_depth_cap(*n_max))?;
                }
            },
            Experiment::NormalForm { n, .. } => level(*n, MAX_CONSTRUCTION_LEVEL)?,
            Experiment::CountFactors { n, depth } => {
                level(*n, MAX_CONSTRUCTION_LEVEL)?;
                capped(*depth, en_depth_cap(*n))?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Core(#[from] vgrowth_core::Error),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("JSON encoding failed: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::InvalidConfig(_) | CliError::Core(_) => 2,
            CliError::Io(_) | CliError::Json(_) => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Success,
    AssertionFailed,
    BudgetExceeded,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Success => 0,
            Status::AssertionFailed => 1,
            Status::BudgetExceeded => 3,
        }
    }

    fn check(ok: bool) -> Status {
        if ok {
            Status::Success
        } else {
            Status::AssertionFailed
        }
    }
}

/// The artifact of one run. `notes` are diagnostics kept out of the
/// artifact so that it stays byte-identical across runs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    pub status: Status,
    pub body: String,
    pub notes: Vec<String>,
}

impl Report {
    fn new(status: Status, body: String) -> Report {
        Report { status, body, notes: Vec::new() }
    }
}

fn json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn csv_rows<T>(header: &str, rows: &[T], line: impl Fn(&T) -> String) -> String {
    let mut out = format!("{header}\n");
    for r in rows {
        out.push_str(&line(r));
        out.push('\n');
    }
    out
}

/// Computes the artifact without writing it.
pub fn execute(config: &ExperimentConfig) -> Result<Report, CliError> {
    config.validate()?;
    let format = config.format;
    match &config.experiment {
        Experiment::Verify { suite, n, samples } => {
            let results = match suite {
                Suite::Grig => suites::grig(config.seed, *samples),
                Suite::V => suites::thompson(config.seed, *samples),
                Suite::Construction => suites::construction(*n, config.seed, *samples)?,
            };
            let ok = results.iter().all(|c| c.failures == 0);
            let body = match format {
                Format::Csv => {
                    csv_rows("check,cases,failures", &results, |c| format!("{},{},{}", c.check, c.cases, c.failures))
                }
                Format::Json => json(&results)?,
            };
            Ok(Report::new(Status::check(ok), body))
        }
        Experiment::SchreierBuild { n, radius, center } => schreier_build(*n, *radius, *center, format),
        Experiment::SchreierSeparation { n_min, n_max } => {
            let rows = schreier::separation_table(*n_min, *n_max)?;
            let ok = rows.iter().all(|r| r.holds());
            let body = match format {
                Format::Csv => schreier::separation_csv(&rows),
                Format::Json => json(&rows)?,
            };
            Ok(Report::new(Status::check(ok), body))
        }
        Experiment::SchreierBalls { n_min, n_max } => {
            let rows: Vec<_> = (*n_min..=*n_max).map(schreier::local_convergence).collect::<Result<_, _>>()?;
            let ok = rows.iter().all(|r| r.rho_ball_equal && r.eta_ball_equal && r.smaller_radii_equal);
            let body = match format {
                Format::Csv => csv_rows("n,radius,rho_ball_equal,eta_ball_equal,smaller_radii_equal", &rows, |r| {
                    format!("{},{},{},{},{}", r.n, r.radius, r.rho_ball_equal, r.eta_ball_equal, r.smaller_radii_equal)
                }),
                Format::Json => json(&rows)?,
            };
            Ok(Report::new(Status::check(ok), body))
        }
        Experiment::SchreierOrbits { depth, level } => {
            let run = match level {
                Some(n) => {
                    schreier::inverted_orbit_bfs(&schreier::rho_n(*n), &LevelAction, *depth, config.budget_bytes)
                }
                None => {
                    schreier::inverted_orbit_bfs(&BoundaryPoint::rho(), &BoundaryAction, *depth, config.budget_bytes)
                }
            };
            let (rows, status, note) = match run {
                Ok(rows) => (rows, Status::Success, None),
                Err(e) => {
                    let note = e.to_string();
                    (e.partial, Status::BudgetExceeded, Some(note))
                }
            };
            let body = match format {
                Format::Csv => schreier::orbit_csv(&rows),
                Format::Json => json(&rows)?,
            };
            let mut report = Report::new(status, body);
            report.notes.extend(note);
            Ok(report)
        }
        Experiment::Growth { family, n_min, n_max, depth } => growth_run(config, *family, *n_min, *n_max, *depth),
        Experiment::NormalForm { n, word } => {
            let letters = construction::parse_word(word)?;
            let nf = construction::normal_form(&letters, *n)?;
            let c = Construction::new(*n)?;
            let realized = nf.realize(&c) == c.word_element(&letters);
            let body = match format {
                Format::Csv => {
                    let mut out = format!("word: {}\nn: {n}\n{nf}", construction::format_word(&letters));
                    let _ = writeln!(out, "realizes word: {realized}");
                    out
                }
                Format::Json => {
                    #[derive(Serialize)]
                    struct Out<'a> {
                        word: String,
                        n: usize,
                        normal_form: &'a construction::NormalForm,
                        realizes_word: bool,
                    }
                    json(&Out {
                        word: construction::format_word(&letters),
                        n: *n,
                        normal_form: &nf,
                        realizes_word: realized,
                    })?
                }
            };
            Ok(Report::new(Status::check(realized), body))
        }
        Experiment::CountFactors { n, depth } => {
            let (counts, status, note) = match construction::count_factors(*n, *depth, config.limits()) {
                Ok(c) => (c, Status::Success, None),
                Err(e) => {
                    let note = e.to_string();
                    (e.partial, Status::BudgetExceeded, Some(note))
                }
            };
            let body = match format {
                Format::Csv => counts.to_csv(),
                Format::Json => json(&counts)?,
            };
            let mut report = Report::new(status, body);
            report.notes.extend(note);
            if !counts.within_hypothesis {
                report.notes.push(format!("depth {depth} lies outside the normal-form hypothesis at n = {n}"));
            }
            report.notes.push(format!("peak key memory {} bytes", counts.peak_bytes));
            Ok(report)
        }
    }
}

fn schreier_build(n: usize, radius: Option<usize>, center: Center, format: Format) -> Result<Report, CliError> {
    let g = schreier::build_level_graph(n)?;
    let ok = g.is_connected() && g.edges_are_involutions();
    let body = match (radius, format) {
        (None, Format::Csv) => g.to_dot(&format!("gamma_{n}")),
        (None, Format::Json) => {
            #[derive(Serialize)]
            struct Graph {
                n: usize,
                vertices: Vec<String>,
                /// `edges[i]` lists the neighbors of vertex `i` under `a, b, c, d`.
                edges: Vec<[usize; 4]>,
            }
            let edges = (0..g.len()).map(|i| Letter::ALL.map(|s| g.neighbor(i, s))).collect();
            json(&Graph { n, vertices: g.points().iter().map(Vertex::to_string).collect(), edges })?
        }
        (Some(r), _) => match center {
            Center::Rho => ball_output(&g.labeled_ball(&schreier::rho_n(n), r)?, format, &format!("ball_rho_{n}_{r}"))?,
            Center::Eta => ball_output(&g.labeled_ball(&schreier::eta_n(n), r)?, format, &format!("ball_eta_{n}_{r}"))?,
            Center::Boundary => ball_output(&schreier::orbit_ball_infinite(r), format, &format!("ball_boundary_{r}"))?,
        },
    };
    Ok(Report::new(Status::check(ok), body))
}

fn ball_output<P>(ball: &schreier::LabeledBall<P>, format: Format, name: &str) -> Result<String, CliError>
where
    P: Clone + Eq + std::hash::Hash + std::fmt::Display,
{
    match format {
        Format::Csv => Ok(ball.to_dot(name)),
        Format::Json => {
            #[derive(Serialize)]
            struct Ball {
                radius: usize,
                vertices: Vec<String>,
                distances: Vec<usize>,
                edges: Vec<[Option<usize>; 4]>,
            }
            let n = ball.len();
            json(&Ball {
                radius: ball.radius(),
                vertices: ball.points().iter().map(|p| p.to_string()).collect(),
                distances: (0..n).map(|i| ball.distance_of(i)).collect(),
                edges: (0..n).map(|i| Letter::ALL.map(|s| ball.edge(i, s))).collect(),
            })
        }
    }
}

#[derive(Debug, Serialize)]
struct GrowthEntry {
    family: Family,
    n: Option<usize>,
    depth: usize,
    complete: bool,
    report: GrowthReport,
}

fn growth_run(
    config: &ExperimentConfig,
    family: Family,
    n_min: usize,
    n_max: usize,
    depth: usize,
) -> Result<Report, CliError> {
    let mut entries = Vec::new();
    let mut notes = Vec::new();
    let mut status = Status::Success;
    let levels: Vec<Option<usize>> = match family {
        Family::Grig => vec![None],
        Family::En => (n_min..=n_max).map(Some).collect(),
    };
    for n in levels {
        let start = std::time::Instant::now();
        let run = match n {
            None => growth::grig_ball_sizes(depth, config.limits()),
            Some(n) => growth::ball_sizes(&Construction::new(n)?.alphabet_elements(), depth, config.limits())?,
        };
        let (stats, complete) = match run {
            Ok(s) => (s, true),
            Err(e) => {
                notes.push(e.to_string());
                status = Status::BudgetExceeded;
                (e.partial, false)
            }
        };
        let violations = stats.submultiplicativity_violations();
        if !violations.is_empty() && status == Status::Success {
            status = Status::AssertionFailed;
            notes.push(format!("submultiplicativity fails at {violations:?}"));
        }
        let report = growth::rate_estimates(&stats);
        let label = n.map_or_else(|| "grig".to_string(), |n| format!("n = {n}"));
        notes.push(format!(
            "{label}: min rate {:.6}, peak key memory {} bytes, {:.2}s",
            report.min_rate.unwrap_or(1.0),
            stats.peak_bytes,
            start.elapsed().as_secs_f64()
        ));
        entries.push(GrowthEntry { family, n, depth, complete, report });
    }
    let body = match config.format {
        Format::Json => json(&entries)?,
        Format::Csv if entries.len() == 1 => entries[0].report.to_csv(),
        Format::Csv => {
            let mut out = String::from("n,ell,gamma,rate\n");
            for e in &entries {
                for r in &e.report.rows {
                    let _ = writeln!(out, "{},{},{},{:.6}", e.n.unwrap_or(0), r.ell, r.gamma, r.rate);
                }
            }
            out
        }
    };
    Ok(Report { status, body, notes })
}

/// Runs the experiment, writes its artifact to `config.out` (or stdout) and
/// returns the status.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Status, CliError> {
    let report = execute(config)?;
    match &config.out {
        Some(path) => std::fs::write(path, &report.body)?,
        None => std::io::stdout().lock().write_all(report.body.as_bytes())?,
    }
    for note in &report.notes {
        eprintln!("{note}");
    }
    Ok(report.status)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn caps_and_ranges() {
        let mut c = ExperimentConfig::new(Experiment::Growth { family: Family::En, n_min: 4, n_max: 4, depth: 7 });
        assert!(matches!(c.validate(), Err(CliError::InvalidConfig(_))));
        c.uncapped = true;
        assert!(c.validate().is_ok());
        let c = ExperimentConfig::new(Experiment::SchreierSeparation { n_min: 5, n_max: 4 });
        assert_eq!(c.validate().unwrap_err().exit_code(), 2);
        let mut c = ExperimentConfig::new(Experiment::CountFactors { n: 4, depth: 2 });
        c.threads = Some(0);
        assert!(c.validate().is_err());
        assert_eq!(en_depth_cap(4), 6);
        assert_eq!(en_depth_cap(6), 5);
    }

    #[test]
    fn execute_reports_status() {
        let r = execute(&ExperimentConfig::new(Experiment::SchreierSeparation { n_min: 1, n_max: 5 })).unwrap();
        assert_eq!(r.status, Status::Success);
        assert!(r.body.starts_with("n,distance,bound\n1,1,1\n2,3,1\n3,7,1\n4,15,2\n"));
        let r = execute(&ExperimentConfig::new(Experiment::CountFactors { n: 2, depth: 2 })).unwrap();
        assert!(r.notes.iter().any(|n| n.contains("outside the normal-form hypothesis")));
        assert_eq!(Status::BudgetExceeded.exit_code(), 3);
    }
}
