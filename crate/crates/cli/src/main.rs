//! `qduality`: duality observables, entanglement criteria and reproduction
//! checks from the command line.

mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use quantum_duality::collective::{
    depth_bound_curve, figure6_sweep, Configuration, DepthOptions, CollectiveError,
};
use quantum_duality::criteria::{
    chsh, classical_sock_bound, classify_tripartite, optimize_cauchy_schwarz, optimize_hoelder, parse_grid,
    pauli_sum_witness, rho_alpha_scan, cauchy_schwarz_rank_one, hoelder_rank_one, tripartite_biseparable_test,
    tripartite_full_separability_test, FourRootMode, FourRootSearch, PauliDirections, RankOneChoice,
    StoredFourRootChoice,
};
use quantum_duality::duality::duality_check;
use quantum_duality::eraser::{default_state, eraser_probabilities, sample_clicks};
use quantum_duality::fock::DEFAULT_CUTOFF;
use quantum_duality::linalg::{pauli_dot, pauli_x, pauli_z};
use quantum_duality::literal::parse_two_mode;
use quantum_duality::qstate::{load_state, DensityMatrix};
use quantum_duality::reproduce::{reproduce, ReproduceOptions, ReproductionReport, Target};
use quantum_duality::{Classification, CriterionVerdict, VIOLATION_TOL};

use config::Config;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Parser)]
#[command(name = "qduality", version, about = "Wave-particle duality observables and entanglement criteria")]
struct Cli {
    /// Seed for every randomized step (optimizer restarts, sampling).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Margin above which a criterion counts as violated.
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// TOML file with defaults and stored operator choices.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// D_k, V_k, C_k, W_k of a two-mode state, or a whole reference table.
    Duality {
        /// Two-mode literal such as `|1,0> + |0,1>` or `1/2 : |0,1> ; 1/2 : |1,0>`.
        #[arg(long, required_unless_present = "table")]
        state: Option<String>,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = DEFAULT_CUTOFF)]
        cutoff: usize,
        /// Reproduce table 1, 2 or 3 instead (CSV with a convention column).
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
        table: Option<u8>,
    },
    /// Entanglement criteria on qubit states.
    Criteria {
        #[command(subcommand)]
        command: CriteriaCommand,
    },
    /// Quantum eraser click statistics.
    Eraser {
        #[arg(long, default_value_t = 1_000_000)]
        shots: u64,
        /// Probability that photon B goes to the which-way detectors.
        #[arg(long, default_value_t = 0.5)]
        branch_p: f64,
    },
    /// Collective-spin variance bounds.
    Collective {
        #[command(subcommand)]
        command: CollectiveCommand,
    },
    /// Recompute a reference target and compare (exit status 1 on mismatch).
    Reproduce {
        /// table1 | table2 | table3 | bell-table | rho-alpha-scan | figure6 | eraser | all
        target: String,
        #[arg(long, default_value_t = 1_000_000)]
        shots: u64,
    },
    /// Range of <A1B2> over classical sock mixtures with weights p1, p2.
    ClassicalBound {
        #[arg(long)]
        p1: f64,
        #[arg(long)]
        p2: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CriterionName {
    All,
    Ppt,
    PauliSum,
    Chsh,
    CauchySchwarz,
    Cauchy4,
    Biseparable,
    FullSeparability,
    Tripartite,
}

#[derive(Debug, Subcommand)]
enum CriteriaCommand {
    /// Evaluate criteria on a state (JSON file or literal such as `ghz3`, `werner:0.4`).
    Run {
        #[arg(long)]
        state: String,
        #[arg(long, value_enum, default_value_t = CriterionName::All)]
        criterion: CriterionName,
        /// Search operator choices instead of using stored ones.
        #[arg(long)]
        optimize: bool,
    },
    /// Scan the rho_alpha family: minimum partial-transpose eigenvalue and four-root margin.
    RhoAlpha {
        /// start:stop:step, inclusive.
        #[arg(long, default_value = "2.0:2.9:0.01")]
        scan: String,
        #[arg(long)]
        optimize: bool,
    },
    /// Search rank-one four-root operators at one alpha and print them as TOML.
    Cauchy4Search {
        #[arg(long, default_value_t = 2.1)]
        alpha: f64,
        #[arg(long)]
        restarts: Option<usize>,
    },
}

#[derive(Debug, Subcommand)]
enum CollectiveCommand {
    /// (ΔB)² per configuration against wavelength; CSV columns x,value,label.
    Figure6 {
        #[arg(long, default_value_t = 16)]
        n: usize,
        /// Wavelength grid start:stop:step.
        #[arg(long, default_value = "0.1:6:0.1")]
        lambdas: String,
    },
    /// F_{k/2} on a grid of x; CSV columns x,value,label.
    DepthCurve {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value = "0:1:0.02")]
        grid: String,
        #[arg(long)]
        restarts: Option<usize>,
    },
}

/// Everything a command produced, ready for any output format.
struct Output {
    json: Value,
    csv: Option<String>,
    text: String,
    default_format: Format,
    success: bool,
}

impl Output {
    fn render(&self, format: Format) -> Result<String> {
        Ok(match format {
            Format::Json => serde_json::to_string_pretty(&self.json)? + "\n",
            Format::Text => self.text.clone(),
            Format::Csv => self
                .csv
                .clone()
                .ok_or_else(|| anyhow!("this command has no CSV form; use --format json or text"))?,
        })
    }
}

struct Settings {
    seed: u64,
    tolerance: f64,
    config: Config,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    let config = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    let file_format = match config.format.as_deref() {
        Some(f) => Some(Format::from_str(f, true).map_err(|e| anyhow!("config format: {e}"))?),
        None => None,
    };
    let settings = Settings {
        seed: cli.seed.or(config.seed).unwrap_or(2014),
        tolerance: cli.tolerance.or(config.tolerance).unwrap_or(VIOLATION_TOL),
        config,
    };
    let out = match cli.command {
        Command::Duality { state, k, cutoff, table } => duality_cmd(state, k, cutoff, table)?,
        Command::Criteria { command } => criteria_cmd(command, &settings)?,
        Command::Eraser { shots, branch_p } => eraser_cmd(shots, branch_p, &settings)?,
        Command::Collective { command } => collective_cmd(command, &settings)?,
        Command::Reproduce { target, shots } => reproduce_cmd(&target, shots, &settings)?,
        Command::ClassicalBound { p1, p2 } => classical_cmd(p1, p2)?,
    };
    let format = cli.format.or(file_format).unwrap_or(out.default_format);
    let text = out.render(format)?;
    match &cli.out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(out.success)
}

fn csv_string<R: Serialize>(rows: &[R]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn report_output(reports: &[ReproductionReport]) -> Result<Output> {
    let success = reports.iter().all(|r| r.pass);
    let mut csv = String::new();
    let mut text = String::new();
    for (i, r) in reports.iter().enumerate() {
        let body = r.to_csv();
        // keep a single header when several targets are concatenated
        csv.push_str(if i == 0 { &body } else { body.split_once('\n').map_or("", |(_, rest)| rest) });
        text.push_str(&r.to_text());
    }
    Ok(Output {
        json: serde_json::to_value(reports)?,
        csv: Some(csv),
        text,
        default_format: Format::Text,
        success,
    })
}

fn duality_cmd(state: Option<String>, k: usize, cutoff: usize, table: Option<u8>) -> Result<Output> {
    if let Some(t) = table {
        let target = [Target::Table1, Target::Table2, Target::Table3][t as usize - 1];
        let mut out = report_output(&[reproduce(target, &ReproduceOptions::default())?])?;
        out.default_format = Format::Csv;
        return Ok(out);
    }
    let literal = state.expect("clap enforces --state without --table");
    let s = parse_two_mode(&literal, cutoff)?;
    let report = duality_check(&s, k)?;
    let text = format!(
        "k = {}\nD = {}\nV = {}\nC = {}\nW = {}\n1 - D^2 - V^2 = {}\n1 - D^2 - W^2 = {}\n4C - V^2 = {}\n",
        report.k,
        report.d,
        report.v,
        report.c,
        report.w,
        report.duality_slack,
        report.pair_slack,
        report.coincidence_slack
    );
    Ok(Output {
        json: serde_json::to_value(&report)?,
        csv: Some(csv_string(&[&report])?),
        text,
        default_format: Format::Json,
        success: true,
    })
}

fn restarts(settings: &Settings) -> usize {
    settings.config.criteria.restarts.unwrap_or(64)
}

fn four_root_choice(settings: &Settings) -> Result<StoredFourRootChoice> {
    match &settings.config.criteria.cauchy4_choice {
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            StoredFourRootChoice::from_toml(&text).with_context(|| format!("parsing {}", p.display()))
        }
        None => Ok(StoredFourRootChoice::bundled()),
    }
}

fn cauchy_schwarz_choice(settings: &Settings) -> Result<Option<RankOneChoice>> {
    let Some(p) = &settings.config.criteria.cauchy_schwarz_choice else {
        return Ok(None);
    };
    let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
    Ok(Some(toml::from_str(&text).with_context(|| format!("parsing {}", p.display()))?))
}

fn ppt_verdicts(rho: &DensityMatrix) -> Result<Vec<CriterionVerdict>> {
    let sites = rho.dims().len();
    // for two parties one cut suffices
    let cuts = if sites == 2 { 1 } else { sites };
    (0..cuts)
        .map(|s| {
            let min = rho.min_pt_eigenvalue(&[s])?;
            Ok(CriterionVerdict::new(&format!("ppt-cut-{s}"), -min, 0.0, Classification::Npt)
                .with_note(format!("minimum partial-transpose eigenvalue {min}")))
        })
        .collect()
}

fn criteria_cmd(cmd: CriteriaCommand, settings: &Settings) -> Result<Output> {
    match cmd {
        CriteriaCommand::Run { state, criterion, optimize } => run_criteria(&state, criterion, optimize, settings),
        CriteriaCommand::RhoAlpha { scan, optimize } => {
            let grid = parse_grid(&scan).ok_or_else(|| anyhow!("bad grid {scan:?}; expected start:stop:step"))?;
            let mode = if optimize {
                FourRootMode::Optimize(FourRootSearch {
                    restarts: restarts(settings),
                    seed: settings.seed,
                })
            } else {
                FourRootMode::Fixed(four_root_choice(settings)?.choice)
            };
            let rows = rho_alpha_scan(&grid, &mode)?;
            let text = rows
                .iter()
                .map(|r| {
                    format!(
                        "alpha {:.4}  min PT eig {:+.6}  four-root margin {}\n",
                        r.alpha,
                        r.min_pt_eigenvalue,
                        r.cauchy4_margin.map_or("-".into(), |m| format!("{m:+.6}"))
                    )
                })
                .collect();
            Ok(Output {
                json: serde_json::to_value(&rows)?,
                csv: Some(csv_string(&rows)?),
                text,
                default_format: Format::Csv,
                success: true,
            })
        }
        CriteriaCommand::Cauchy4Search { alpha, restarts: r } => {
            let search = FourRootSearch {
                restarts: r.unwrap_or_else(|| restarts(settings)),
                seed: settings.seed,
            };
            let stored = StoredFourRootChoice::search_at(alpha, &search)?;
            Ok(Output {
                json: serde_json::to_value(&stored)?,
                csv: None,
                text: stored.to_toml(),
                default_format: Format::Text,
                success: true,
            })
        }
    }
}

fn run_criteria(state: &str, which: CriterionName, optimize: bool, settings: &Settings) -> Result<Output> {
    use CriterionName::*;
    let rho = load_state(state)?;
    let dims = rho.dims().to_vec();
    let two_qubits = dims == [2, 2];
    let three_qubits = dims == [2, 2, 2];
    let bipartite = dims.len() == 2;
    let wants = |c: CriterionName| which == c || which == All;
    let mut verdicts: Vec<CriterionVerdict> = Vec::new();
    let mut extra = serde_json::Map::new();

    let needs = |ok: bool, what: &str| -> Result<()> {
        if !ok && which != All {
            bail!("criterion {which:?} needs {what}, got dims {dims:?}");
        }
        Ok(())
    };

    if wants(Ppt) {
        verdicts.extend(ppt_verdicts(&rho)?);
    }
    if wants(PauliSum) {
        needs(two_qubits, "two qubits")?;
        if two_qubits {
            verdicts.push(pauli_sum_witness(&rho, &PauliDirections::Bloch)?);
        }
    }
    if wants(Chsh) {
        needs(two_qubits, "two qubits")?;
        if two_qubits {
            let s = std::f64::consts::FRAC_1_SQRT_2;
            let r = chsh(&rho, &pauli_x(), &pauli_z(), &pauli_dot([s, 0.0, s]), &pauli_dot([-s, 0.0, s]))?;
            extra.insert("chsh_correlations".into(), json!(r.correlations));
            verdicts.push(r.verdict);
        }
    }
    if wants(CauchySchwarz) {
        needs(bipartite, "two parties")?;
        if bipartite {
            let configured = cauchy_schwarz_choice(settings)?;
            if optimize || (configured.is_none() && which == All) {
                let (choice, v) = optimize_cauchy_schwarz(&rho, restarts(settings), settings.seed)?;
                extra.insert("cauchy_schwarz_choice".into(), serde_json::to_value(&choice)?);
                verdicts.push(v);
            } else if let Some(choice) = configured {
                verdicts.push(cauchy_schwarz_rank_one(&rho, &choice)?);
            } else {
                bail!("cauchy-schwarz needs --optimize or criteria.cauchy_schwarz_choice in the config");
            }
        }
    }
    if wants(Cauchy4) {
        needs(three_qubits, "three qubits")?;
        if three_qubits {
            if optimize {
                let search = FourRootSearch {
                    restarts: restarts(settings),
                    seed: settings.seed,
                };
                let (choice, v) = optimize_hoelder(&rho, &search)?;
                extra.insert("cauchy4_choice".into(), serde_json::to_value(&choice)?);
                verdicts.push(v);
            } else {
                verdicts.push(hoelder_rank_one(&rho, &four_root_choice(settings)?.choice)?);
            }
        }
    }
    if wants(Biseparable) {
        needs(three_qubits, "three qubits")?;
        if three_qubits {
            verdicts.extend(tripartite_biseparable_test(&rho)?);
        }
    }
    if wants(FullSeparability) {
        needs(three_qubits, "three qubits")?;
        if three_qubits {
            verdicts.extend(tripartite_full_separability_test(&rho)?);
        }
    }
    if wants(Tripartite) {
        needs(three_qubits, "three qubits")?;
        if three_qubits {
            let mut class = classify_tripartite(&rho)?;
            class.evidence = class.evidence.iter().map(|v| v.rejudged(settings.tolerance)).collect();
            extra.insert("tripartite".into(), serde_json::to_value(&class)?);
        }
    }

    let verdicts: Vec<CriterionVerdict> = verdicts.iter().map(|v| v.rejudged(settings.tolerance)).collect();
    let mut text = String::new();
    for v in &verdicts {
        text.push_str(&format!(
            "{:<28} lhs {:<12.6} rhs {:<12.6} {}\n",
            v.criterion,
            v.lhs,
            v.rhs,
            if v.violated { format!("VIOLATED -> {:?}", v.classification) } else { "holds".into() }
        ));
    }
    if let Some(t) = extra.get("tripartite") {
        text.push_str(&format!("tripartite class: {}\n", t["label"]));
    }
    let csv_rows: Vec<_> = verdicts
        .iter()
        .map(|v| (v.criterion.clone(), v.lhs, v.rhs, v.margin, v.violated, format!("{:?}", v.classification)))
        .collect();
    let mut csv = String::from("criterion,lhs,rhs,margin,violated,classification\n");
    csv.push_str(&csv_string(&csv_rows)?);
    let mut json_obj = serde_json::Map::new();
    json_obj.insert("dims".into(), json!(dims));
    json_obj.insert("verdicts".into(), serde_json::to_value(&verdicts)?);
    json_obj.extend(extra);
    Ok(Output {
        json: Value::Object(json_obj),
        csv: Some(csv),
        text,
        default_format: Format::Json,
        success: true,
    })
}

fn eraser_cmd(shots: u64, branch_p: f64, settings: &Settings) -> Result<Output> {
    let table = eraser_probabilities(&default_state(), branch_p)?;
    let counts = sample_clicks(&table, shots, settings.seed)?;
    let empirical: Vec<Option<f64>> = (0..4).map(|j| counts.conditional_visibility(j)).collect();
    let mut text = format!("V_A = {}   sampled {}\n", table.visibility_a, counts.visibility_a());
    for j in 0..4 {
        text.push_str(&format!(
            "B{}: P = {:.6}  V_A|B = {}  sampled {}\n",
            j + 1,
            table.marginal_b[j],
            table.conditional_visibility[j].map_or("undefined".into(), |v| v.to_string()),
            empirical[j].map_or("undefined".into(), |v| v.to_string()),
        ));
    }
    let mut csv = String::from("a,b,probability,count\n");
    for i in 0..2 {
        for j in 0..4 {
            csv.push_str(&format!("A{},B{},{},{}\n", i + 1, j + 1, table.joint[i][j], counts.counts[i][j]));
        }
    }
    Ok(Output {
        json: json!({
            "table": table,
            "counts": counts,
            "sampled_visibility_a": counts.visibility_a(),
            "sampled_conditional_visibility": empirical,
        }),
        csv: Some(csv),
        text,
        default_format: Format::Json,
        success: true,
    })
}

#[derive(Serialize)]
struct CurveRow {
    x: f64,
    value: Option<f64>,
    label: String,
}

fn curve_output(rows: Vec<CurveRow>, json: Value) -> Result<Output> {
    let text = rows
        .iter()
        .map(|r| format!("{:<28} x {:<8} {}\n", r.label, r.x, r.value.map_or("-".into(), |v| v.to_string())))
        .collect();
    Ok(Output {
        csv: Some(csv_string(&rows)?),
        json,
        text,
        default_format: Format::Csv,
        success: true,
    })
}

fn collective_cmd(cmd: CollectiveCommand, settings: &Settings) -> Result<Output> {
    match cmd {
        CollectiveCommand::Figure6 { n, lambdas } => {
            let grid = parse_grid(&lambdas).ok_or_else(|| anyhow!("bad grid {lambdas:?}"))?;
            if grid.iter().any(|&l| l <= 0.0) {
                bail!("wavelengths must be positive");
            }
            let rows = figure6_sweep(n, &grid, &Configuration::ALL)?;
            let curve = rows
                .iter()
                .map(|r| CurveRow {
                    x: r.lambda,
                    value: Some(r.variance),
                    label: r.configuration.label().to_string(),
                })
                .collect();
            curve_output(curve, serde_json::to_value(&rows)?)
        }
        CollectiveCommand::DepthCurve { n, k, grid, restarts } => {
            let g = parse_grid(&grid).ok_or_else(|| anyhow!("bad grid {grid:?}"))?;
            let opts = DepthOptions {
                restarts: restarts.or(settings.config.collective.depth_restarts).unwrap_or(32),
                seed: settings.seed,
                ..DepthOptions::default()
            };
            let curve = depth_bound_curve(n, k, &g, &opts).map_err(|e: CollectiveError| anyhow!(e))?;
            let rows = curve
                .grid
                .iter()
                .zip(&curve.values)
                .map(|(&x, &value)| CurveRow {
                    x,
                    value,
                    label: format!("k={k}"),
                })
                .collect();
            curve_output(rows, serde_json::to_value(&curve)?)
        }
    }
}

fn reproduce_cmd(target: &str, shots: u64, settings: &Settings) -> Result<Output> {
    let targets = if target == "all" { Target::ALL.to_vec() } else { vec![target.parse::<Target>()?] };
    let opts = ReproduceOptions {
        seed: settings.seed,
        shots,
    };
    let reports = targets.into_iter().map(|t| reproduce(t, &opts)).collect::<Result<Vec<_>, _>>()?;
    report_output(&reports)
}

fn classical_cmd(p1: f64, p2: f64) -> Result<Output> {
    let (lo, hi) = classical_sock_bound(p1, p2)?;
    Ok(Output {
        json: json!({ "p1": p1, "p2": p2, "fixed_correlation": p2 - p1, "a1b2_min": lo, "a1b2_max": hi }),
        csv: Some(format!("p1,p2,a1b2_min,a1b2_max\n{p1},{p2},{lo},{hi}\n")),
        text: format!("<A1B2> in [{lo}, {hi}] with the three other correlations at {}\n", p2 - p1),
        default_format: Format::Json,
        success: true,
    })
}
