use clap::{Args, Parser, Subcommand};
use k2local::chart::{Emit, Format};
use k2local::config::RunConfig;
use k2local::d1::{classify, verify_d1_squared, CaseTag};
use k2local::e1::{poincare_table, AdaptedGenerator, GenFamily};
use k2local::e2::e2_window_deepening;
use k2local::group::{element_a, verify_group};
use k2local::honda::verify_fgl;
use k2local::padic::OmegaRoot;
use k2local::pipeline::{build_charts, engine_for, verify_all, write_report};
use k2local::{Error, Result};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "k2local", version, about = "Exact algebra for the K(2)-local sphere at p = 3")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// key=value config file; absent keys take defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override the p-adic precision N.
    #[arg(long, global = true)]
    precision: Option<u32>,
    /// Override the filtration caps, as `J,V`.
    #[arg(long, global = true, value_parser = parse_pair)]
    caps: Option<(u32, u32)>,
    /// Override the degree window, as `a..b`.
    #[arg(long, global = true, allow_hyphen_values = true, value_parser = parse_window)]
    window: Option<(i64, i64)>,
    /// Which root of `x^2 + x + 2` names omega.
    #[arg(long, global = true)]
    omega: Option<String>,
    /// Print JSON instead of a text table.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Finite subgroups, norms and the reduced determinant.
    Group {
        #[command(subcommand)]
        action: VerifyOnly,
    },
    /// The Honda formal group law oracle.
    Fgl {
        #[command(subcommand)]
        action: FglAction,
    },
    /// The d1 differential.
    D1 {
        #[command(subcommand)]
        action: D1Action,
    },
    /// E1 Poincare tables.
    E1 {
        #[command(subcommand)]
        action: E1Action,
    },
    /// E2 homology in the p = 0..3 columns.
    E2 {
        #[command(subcommand)]
        action: E2Action,
    },
    /// Cohomology presentations, the rational chart and the splitting report.
    Chart {
        #[command(subcommand)]
        action: ChartAction,
    },
    /// Run every gate and write the consolidated report.
    VerifyAll,
}

#[derive(Subcommand)]
enum VerifyOnly {
    Verify,
}

#[derive(Subcommand)]
enum FglAction {
    Verify {
        /// Truncation degree D.
        #[arg(long)]
        cap: Option<usize>,
    },
}

#[derive(Subcommand)]
enum D1Action {
    /// Evaluate d1 on one generator with its case trace.
    Eval {
        #[arg(long)]
        family: GenFamily,
        /// The label: `k` for delta, `2k+1` for b and bbar.
        #[arg(long, allow_hyphen_values = true)]
        index: i64,
    },
    /// The d1-squared and transcription gate.
    Check {
        #[arg(long)]
        bound: Option<i64>,
        /// Flip the sign of one case (fault injection).
        #[arg(long)]
        sabotage: Option<CaseTag>,
    },
}

#[derive(Subcommand)]
enum E1Action {
    Table {
        #[arg(long, default_value_t = 0)]
        column: u8,
        #[arg(long, default_value_t = 2)]
        q_max: u32,
        /// tsv or json.
        #[arg(long, default_value = "tsv")]
        format: String,
    },
}

#[derive(Subcommand)]
enum E2Action {
    Compute {
        /// Also write the JSON report here.
        #[arg(long = "json-out")]
        json_out: Option<PathBuf>,
        /// Double the caps up to this many times in degrees that have not stabilized.
        #[arg(long, default_value_t = 0)]
        deepen: u32,
    },
}

#[derive(Subcommand)]
enum ChartAction {
    Rational(ChartOut),
    Splitting(ChartOut),
    Cohomology {
        #[arg(long, default_value = "g2")]
        group: String,
        #[command(flatten)]
        out: ChartOut,
    },
}

#[derive(Args)]
struct ChartOut {
    #[arg(long, default_value = "json")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_pair(s: &str) -> std::result::Result<(u32, u32), String> {
    let (a, b) = s.split_once(',').ok_or("expected J,V")?;
    Ok((a.trim().parse().map_err(|_| "bad J")?, b.trim().parse().map_err(|_| "bad V")?))
}

fn parse_window(s: &str) -> std::result::Result<(i64, i64), String> {
    let (a, b) = s.split_once("..").ok_or("expected a..b")?;
    Ok((a.trim().parse().map_err(|_| "bad lower bound")?, b.trim().parse().map_err(|_| "bad upper bound")?))
}

fn load_config(c: &Common) -> Result<RunConfig> {
    let mut cfg = match &c.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(n) = c.precision {
        cfg.precision = n;
    }
    if let Some(caps) = c.caps {
        cfg.caps = caps;
    }
    if let Some(w) = c.window {
        cfg.window = w;
    }
    if let Some(o) = &c.omega {
        cfg.omega = o.parse::<OmegaRoot>()?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn json<T: serde::Serialize>(v: &T) -> Result<String> {
    k2local::chart::to_sorted_json(v)
}

/// Aligned two-column table.
fn table(rows: &[(String, String)]) -> String {
    let w = rows.iter().map(|r| r.0.chars().count()).max().unwrap_or(0);
    rows.iter().map(|(a, b)| format!("{a:<w$}  {b}\n")).collect()
}

fn mark(pass: bool) -> String {
    if pass { "PASS" } else { "FAIL" }.to_string()
}

fn write_out(text: &str, out: &Option<PathBuf>) -> Result<()> {
    match out {
        Some(p) => Ok(std::fs::write(p, text)?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    let cfg = load_config(&cli.common)?;
    let as_json = cli.common.json;
    match cli.command {
        Command::Group { action: VerifyOnly::Verify } => {
            let r = verify_group(cfg.precision()?, cfg.omega)?;
            if as_json {
                print!("{}", json(&r)?);
            } else {
                let rows: Vec<_> = r.checks.iter().map(|c| (c.name.clone(), format!("{}  {}", mark(c.pass), c.detail))).collect();
                print!("{}", table(&rows));
            }
            Ok(r.pass)
        }
        Command::Fgl { action: FglAction::Verify { cap } } => {
            let r = verify_fgl(cap.unwrap_or(cfg.fgl_cap), &element_a(cfg.precision()?, cfg.omega))?;
            if as_json {
                print!("{}", json(&r)?);
            } else {
                print!(
                    "{}",
                    table(&[
                        ("truncation degree".into(), r.cap.to_string()),
                        ("nonzero terms".into(), r.nonzero_terms.to_string()),
                        ("axioms".into(), mark(r.axioms.all())),
                        ("[3](x) = x^9".into(), mark(r.three_series_is_x9)),
                        ("[a] has order 3".into(), mark(r.a_has_order_3)),
                    ])
                );
            }
            Ok(r.pass)
        }
        Command::D1 { action: D1Action::Eval { family, index } } => {
            let g = AdaptedGenerator::from_label(family, index)?;
            let case = classify(family, g.k)?;
            let image = engine_for(&cfg).d1_generator(&g)?;
            let shown = image.map(|i| format!("{} v1^{} {}", i.coeff, i.v1_shift, i.target)).unwrap_or_else(|| "0".into());
            if as_json {
                print!("{}", json(&serde_json::json!({"generator": g.to_string(), "case": case, "image": shown}))?);
            } else {
                print!(
                    "{}",
                    table(&[
                        ("generator".into(), g.to_string()),
                        ("case".into(), case.tag.name().into()),
                        ("m".into(), case.m.to_string()),
                        ("n".into(), case.n.to_string()),
                        ("d1".into(), shown),
                    ])
                );
            }
            Ok(true)
        }
        Command::D1 { action: D1Action::Check { bound, sabotage } } => {
            let mut cfg = cfg;
            if sabotage.is_some() {
                cfg.sabotage_sign = sabotage;
            }
            let r = verify_d1_squared(&engine_for(&cfg), &cfg.filtration_caps()?, bound.unwrap_or(cfg.d1_bound), cfg.classification_range)?;
            if as_json {
                print!("{}", json(&r)?);
            } else {
                print!(
                    "{}",
                    table(&[
                        ("generators checked".into(), r.generators_checked.to_string()),
                        ("d1 d1 = 0".into(), mark(r.composite_failures.is_empty())),
                        ("matches reference".into(), mark(r.transcription_mismatches.is_empty())),
                        ("pinned values".into(), mark(r.pinned_failures.is_empty())),
                        ("classification".into(), mark(r.classification.pass())),
                        ("overflow terms".into(), r.overflow_terms.to_string()),
                    ])
                );
            }
            Ok(r.pass)
        }
        Command::E1 { action: E1Action::Table { column, q_max, format } } => {
            let t = poincare_table(column, q_max, &cfg.filtration_caps()?)?;
            match format.as_str() {
                "tsv" => print!("{}", t.to_tsv()),
                "json" => print!("{}", json(&t)?),
                other => return Err(Error::Domain(format!("unknown format '{other}' (tsv|json)"))),
            }
            Ok(true)
        }
        Command::E2 { action: E2Action::Compute { json_out, deepen } } => {
            let reports = e2_window_deepening(&engine_for(&cfg), &cfg.filtration_caps()?, deepen)?;
            if let Some(p) = &json_out {
                std::fs::write(p, json(&reports)?)?;
            }
            if as_json {
                print!("{}", json(&reports)?);
            } else {
                println!("{:>6}  {:<14}  {:<14}  {:<9}  stabilized", "t", "dims", "coarse", "caps");
                for r in reports.iter().filter(|r| r.dims.iter().any(|&d| d > 0) || !r.stabilized) {
                    let (j, v) = r.caps_used[0];
                    println!(
                        "{:>6}  {:<14}  {:<14}  {:<9}  {}",
                        r.t,
                        format!("{:?}", r.dims),
                        format!("{:?}", r.coarse_dims),
                        format!("{j},{v}"),
                        r.stabilized
                    );
                }
            }
            Ok(reports.iter().all(|r| r.stabilized))
        }
        Command::Chart { action } => {
            let charts = build_charts(&cfg)?;
            match action {
                ChartAction::Rational(o) => write_out(&charts.rational.emit(o.format)?, &o.out)?,
                ChartAction::Splitting(o) => write_out(&charts.splitting.emit(o.format)?, &o.out)?,
                ChartAction::Cohomology { group, out } => {
                    let p = match group.as_str() {
                        "g2" => &charts.g2,
                        "g21" => &charts.g21,
                        other => return Err(Error::Domain(format!("unknown group '{other}' (g2|g21)"))),
                    };
                    write_out(&p.emit(out.format)?, &out.out)?;
                }
            }
            Ok(true)
        }
        Command::VerifyAll => {
            let (report, _) = verify_all(&cfg);
            let path = write_report(&report, &cfg)?;
            if as_json {
                print!("{}", report.to_json()?);
            } else {
                let rows: Vec<_> = report
                    .gates
                    .iter()
                    .map(|g| (g.name.clone(), format!("{:<8}{}", format!("{:?}", g.status).to_uppercase(), g.detail)))
                    .collect();
                print!("{}", table(&rows));
                println!("report: {}", path.display());
            }
            if let Some(g) = &report.first_failure {
                eprintln!("first failing gate: {g}");
            }
            Ok(report.pass)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
