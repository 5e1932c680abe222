//! Command line front end: verify a model against a view or a whole
//! specification, generate random models and views, and measure scaling.
//!
//! Exit codes: 0 when the verdict is positive (satisfied, specification
//! passes), 1 when verification ran but the verdict is negative, 2 for
//! input problems (unreadable files, parse errors, infeasible parameters).

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use ccview_core::bench::{run_bench, Setup};
use ccview_core::generate::{
    derive_view, gen_model, ModelGenParams, MutationKind, ViewDeriveParams,
};
use ccview_core::textual::{
    export_json, parse_model_named, parse_view_named, print_model, print_view, print_witness,
};
use ccview_core::verify::{verify, verify_specification, Mode, Specification, VerificationResult};
use ccview_core::{CncModel, CncView};

#[derive(Parser)]
#[command(
    name = "ccview",
    version,
    about = "Verifies C&C models against architectural views and explains every verdict"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Cmd {
    /// Verify one model against one view and write the witnesses.
    Verify {
        /// Model document (.ccm).
        model: PathBuf,
        /// View document (.ccv).
        view: PathBuf,
        /// Report format on stdout.
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Directory for witness files (default: $CCVIEW_OUT, else `.`).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Verify a model against every view of a specification file.
    Batch {
        /// Specification file (.ccs): one `<mode> <view-file>` per line,
        /// mode `mandatory`, `negative`, or `alt:<group>`; paths are
        /// relative to the specification file; `#` comments.
        spec: PathBuf,
        /// Model document (.ccm).
        model: PathBuf,
        /// Report format on stdout.
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Directory for witness files (default: $CCVIEW_OUT, else `.`).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a random valid model.
    GenModel {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        components: usize,
        /// Maximum direct subcomponents per component.
        #[arg(long, default_value_t = 4)]
        max_subs: usize,
        /// Size of the port type vocabulary.
        #[arg(long, default_value_t = 5)]
        port_types: usize,
        /// Exact number of ports.
        #[arg(long, default_value_t = 60)]
        ports: usize,
        /// Upper bound on connectors.
        #[arg(long, default_value_t = 40)]
        max_connectors: usize,
        /// Write to a file instead of stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Derive a view the model satisfies, optionally mutated.
    DeriveView {
        /// Model document (.ccm).
        model: PathBuf,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// How many components the view keeps.
        #[arg(long, default_value_t = 5)]
        keep_components: usize,
        /// Upper bound on kept (fully specified) ports.
        #[arg(long, default_value_t = 6)]
        keep_ports: usize,
        /// Upper bound on abstract connectors read off real chains.
        #[arg(long, default_value_t = 3)]
        keep_connectors: usize,
        /// Mutation to apply, in order; repeatable. Kinds:
        /// change-port-type, rename-component, rename-port,
        /// swap-component-names, erase-port-name, erase-port-type,
        /// erase-connector-endpoint-ports.
        #[arg(long = "mutate")]
        mutations: Vec<String>,
        /// Write to a file instead of stdout (the mutation log always goes
        /// to stderr).
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Measure verification time over generated workloads.
    Bench {
        /// Comma-separated model sizes (components per model).
        #[arg(long, default_value = "20,40,60,80,100,120,140,160,180,200")]
        sizes: String,
        /// Repetitions per (setup, size) cell.
        #[arg(long, default_value_t = 12)]
        repeats: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Comma-separated setups: `variable` (view grows with the model)
        /// and/or `fixed` (constant view size).
        #[arg(long, default_value = "variable,fixed")]
        setups: String,
        /// Write per-run rows as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Write rows and summaries as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.cmd {
        Cmd::Verify {
            model,
            view,
            format,
            out,
        } => {
            let m = load_model(&model)?;
            let v = load_view(&view)?;
            let result = verify(&m, &v);
            let files = write_witnesses(&resolve_out(&out), &result)?;
            match format {
                Format::Text => print_verify_text(&result, &files),
                Format::Json => println!("{}", export_json(&result)),
            }
            Ok(if result.satisfied { 0 } else { 1 })
        }
        Cmd::Batch {
            spec,
            model,
            format,
            out,
        } => {
            let m = load_model(&model)?;
            let specification = load_spec(&spec)?;
            let res = verify_specification(&m, &specification);
            let dir = resolve_out(&out);
            let mut all_files = Vec::new();
            for r in &res.results {
                all_files.push(write_witnesses(&dir, r)?);
            }
            match format {
                Format::Text => {
                    println!(
                        "specification {} against C&C model {}:",
                        spec.display(),
                        m.name()
                    );
                    for e in &res.entries {
                        println!(
                            "  {} {}: {} -> {}",
                            e.mode,
                            e.view_name,
                            if e.satisfied {
                                "satisfied"
                            } else {
                                "not satisfied"
                            },
                            if e.pass { "pass" } else { "fail" }
                        );
                        if !e.pass {
                            if let Some(r) = res.results.iter().find(|r| r.view_name == e.view_name)
                            {
                                for w in &r.witnesses {
                                    for a in &w.annotations {
                                        println!("      {}", a.text);
                                    }
                                }
                            }
                        }
                    }
                    for (group, pass) in &res.groups {
                        println!("  group {group}: {}", if *pass { "pass" } else { "fail" });
                    }
                    println!("result: {}", if res.pass { "pass" } else { "fail" });
                }
                Format::Json => {
                    let results: Vec<serde_json::Value> = res
                        .results
                        .iter()
                        .map(|r| serde_json::from_str(&export_json(r)).expect("own export parses"))
                        .collect();
                    let doc = serde_json::json!({
                        "model": m.name(),
                        "specification": spec.display().to_string(),
                        "pass": res.pass,
                        "entries": res.entries.iter().map(|e| serde_json::json!({
                            "view": e.view_name,
                            "mode": e.mode.to_string(),
                            "satisfied": e.satisfied,
                            "pass": e.pass,
                        })).collect::<Vec<_>>(),
                        "groups": res.groups.iter().map(|(g, p)| serde_json::json!({
                            "group": g,
                            "pass": p,
                        })).collect::<Vec<_>>(),
                        "results": results,
                    });
                    println!("{}", serde_json::to_string_pretty(&doc)?);
                }
            }
            Ok(if res.pass { 0 } else { 1 })
        }
        Cmd::GenModel {
            seed,
            components,
            max_subs,
            port_types,
            ports,
            max_connectors,
            output,
        } => {
            let params = ModelGenParams {
                components,
                max_subs,
                port_types,
                ports,
                max_connectors,
            };
            let m = gen_model(&params, seed)?;
            emit(output.as_deref(), &print_model(&m))
        }
        Cmd::DeriveView {
            model,
            seed,
            keep_components,
            keep_ports,
            keep_connectors,
            mutations,
            output,
        } => {
            let m = load_model(&model)?;
            let mutations = mutations
                .iter()
                .map(|s| s.parse::<MutationKind>().map_err(|e| anyhow!(e)))
                .collect::<Result<Vec<_>>>()?;
            let params = ViewDeriveParams {
                keep_components,
                max_keep_ports: keep_ports,
                max_keep_connectors: keep_connectors,
                mutations,
            };
            let (v, records) = derive_view(&m, &params, seed);
            for r in &records {
                eprintln!("mutation {}: {}", r.kind.name(), r.detail);
            }
            emit(output.as_deref(), &print_view(&v))
        }
        Cmd::Bench {
            sizes,
            repeats,
            seed,
            setups,
            csv,
            json,
        } => {
            let sizes = parse_sizes(&sizes)?;
            let setups = parse_setups(&setups)?;
            let report = run_bench(&setups, &sizes, repeats, seed);
            if let Some(path) = &csv {
                fs::write(path, report.to_csv())
                    .with_context(|| format!("write {}", path.display()))?;
            }
            if let Some(path) = &json {
                fs::write(path, report.to_json())
                    .with_context(|| format!("write {}", path.display()))?;
            }
            println!(
                "setup     size  mean_verify_ms  max_verify_ms  mean_max_witness_ms  mean_reasons"
            );
            for s in &report.summaries {
                println!(
                    "{:<9} {:>4}  {:>14.3}  {:>13.3}  {:>19.3}  {:>12.2}",
                    s.setup.name(),
                    s.size,
                    s.mean_verify_ms,
                    s.max_verify_ms,
                    s.mean_max_witness_ms,
                    s.mean_reasons
                );
            }
            Ok(0)
        }
    }
}

fn load_model(path: &Path) -> Result<CncModel> {
    let src = fs::read_to_string(path).with_context(|| format!("read {}", path.display()))?;
    match parse_model_named(&src, &path.display().to_string()) {
        Ok(parsed) => Ok(parsed.value),
        Err(diags) => {
            for d in &diags {
                eprintln!("{d}");
            }
            bail!("{} problem(s) in {}", diags.len(), path.display());
        }
    }
}

fn load_view(path: &Path) -> Result<CncView> {
    let src = fs::read_to_string(path).with_context(|| format!("read {}", path.display()))?;
    match parse_view_named(&src, &path.display().to_string()) {
        Ok(parsed) => Ok(parsed.value),
        Err(diags) => {
            for d in &diags {
                eprintln!("{d}");
            }
            bail!("{} problem(s) in {}", diags.len(), path.display());
        }
    }
}

/// Reads a specification file: `<mode> <view-file>` per line, `#` comments,
/// view paths relative to the specification file's directory.
fn load_spec(path: &Path) -> Result<Specification> {
    let src = fs::read_to_string(path).with_context(|| format!("read {}", path.display()))?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    let mut entries = Vec::new();
    for (i, raw) in src.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (mode_str, rest) = line.split_once(char::is_whitespace).ok_or_else(|| {
            anyhow!(
                "{}:{}: expected `<mode> <view-file>`",
                path.display(),
                i + 1
            )
        })?;
        let mode: Mode = mode_str
            .parse()
            .map_err(|e| anyhow!("{}:{}: {e}", path.display(), i + 1))?;
        let view = load_view(&base.join(rest.trim()))?;
        entries.push((view, mode));
    }
    Ok(Specification { entries })
}

/// Witness files go to `--out`, else `$CCVIEW_OUT`, else the working
/// directory.
fn resolve_out(out: &Option<PathBuf>) -> PathBuf {
    out.clone()
        .or_else(|| std::env::var_os("CCVIEW_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

/// Writes one `.ccw` file per witness, named
/// `<view>_<kind>_<index>.ccw` with the index counting witnesses in reason
/// order. Returns the paths.
fn write_witnesses(dir: &Path, r: &VerificationResult) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).with_context(|| format!("create {}", dir.display()))?;
    let mut files = Vec::new();
    for (i, w) in r.witnesses.iter().enumerate() {
        let path = dir.join(format!("{}_{}_{i}.ccw", r.view_name, w.kind.kind_str()));
        fs::write(&path, print_witness(w)).with_context(|| format!("write {}", path.display()))?;
        files.push(path);
    }
    Ok(files)
}

fn print_verify_text(result: &VerificationResult, files: &[PathBuf]) {
    if result.satisfied {
        println!(
            "C&C model {} satisfies view {}.",
            result.model_name, result.view_name
        );
        println!(
            "  witness {} -> {}",
            result.witnesses[0].fragment.name(),
            files[0].display()
        );
        return;
    }
    println!(
        "C&C model {} does not satisfy view {}: {} reason(s)",
        result.model_name,
        result.view_name,
        result.reasons.len()
    );
    for (i, w) in result.witnesses.iter().enumerate() {
        for a in &w.annotations {
            println!("  {}. {}", i + 1, a.text);
        }
        println!(
            "     witness {} -> {}",
            w.fragment.name(),
            files[i].display()
        );
    }
}

fn emit(output: Option<&Path>, text: &str) -> Result<u8> {
    match output {
        Some(path) => fs::write(path, text).with_context(|| format!("write {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(0)
}

fn parse_sizes(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|part| {
            part.trim()
                .parse::<usize>()
                .map_err(|_| anyhow!("bad size `{part}` (expected a number)"))
        })
        .collect()
}

fn parse_setups(s: &str) -> Result<Vec<Setup>> {
    s.split(',')
        .map(|part| match part.trim() {
            "variable" => Ok(Setup::Variable),
            "fixed" => Ok(Setup::Fixed),
            other => Err(anyhow!("bad setup `{other}` (expected variable or fixed)")),
        })
        .collect()
}
