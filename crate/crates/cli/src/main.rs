// SPDX-License-Identifier: Apache-2.0
//! `pcircuit`: compile, sample and benchmark Bayesian networks on p-bits.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use pcircuit::bench::{
    build_family_tree, relatedness_table, Method, RelatednessConfig, Scenario, ScenarioKind,
    DEFAULT_BURN_IN, DEFAULT_EPSILON_ONE_PARENT, DEFAULT_EPSILON_TWO_PARENT, DEFAULT_SAMPLES,
};
use pcircuit::bnfile::parse_bn_file;
use pcircuit::circuit::map_to_circuit;
use pcircuit::compiler::{compile_network, DEFAULT_EPSILON};
use pcircuit::device::{run_trajectory, sigmoid_response, DEFAULT_TIME_STEP};
use pcircuit::netlist::export_netlist;
use pcircuit::{exact_joint, run, BayesNetF64, CircuitSpec, MagnetParams, MagnetState, Schedule, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "pcircuit", version, about = "Bayesian networks on probabilistic bits")]
struct Cli {
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, default_value_t = DEFAULT_SAMPLES)]
    samples: usize,
    #[arg(long, global = true, default_value_t = DEFAULT_BURN_IN)]
    burn_in: usize,
    /// `sweep` (clocked, parent to child) or `async` (clockless).
    #[arg(long, global = true, default_value = "sweep")]
    schedule: Schedule,
    /// unrelated | cousins | double-cousins | siblings
    #[arg(long, global = true, default_value = "double-cousins")]
    scenario: ScenarioKind,
    /// Copy error of linked grandparents.
    #[arg(long, global = true, default_value_t = DEFAULT_EPSILON_ONE_PARENT)]
    epsilon1: f64,
    /// Error of the two-parent inheritance table.
    #[arg(long, global = true, default_value_t = DEFAULT_EPSILON_TWO_PARENT)]
    epsilon2: f64,
    /// Read the network from a BN text file instead of the scenario.
    #[arg(long, global = true)]
    bn: Option<PathBuf>,
    /// Global p-bit gain `I0`.
    #[arg(long, global = true, default_value_t = 1.0)]
    gain: f64,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the compiled p-bit network (biases and couplings).
    Compile,
    /// Record sampled states, one row per snapshot.
    Sample,
    /// Print the exact joint distribution.
    Exact,
    /// Pairwise correlations from the exact, p-bit and circuit models.
    Relatedness {
        /// Comma-separated subset of exact,psl,circuit.
        #[arg(long, default_value = "exact,psl,circuit", value_delimiter = ',')]
        methods: Vec<String>,
        /// Pairs as `A-B`, comma-separated; defaults to the family pairs.
        #[arg(long, value_delimiter = ',')]
        pairs: Vec<String>,
    },
    /// Export the circuit as a `PBN v1` netlist.
    Netlist,
    /// Time-averaged sgn(m_z) of the macrospin against spin current.
    DeviceSweep {
        /// Largest |I_S| in amperes.
        #[arg(long, default_value_t = 4e-4)]
        max_current: f64,
        /// Number of sweep points (odd includes zero).
        #[arg(long, default_value_t = 21)]
        points: usize,
        /// Averaging time per point, seconds.
        #[arg(long, default_value_t = 1e-6)]
        avg_time: f64,
        #[arg(long, default_value_t = DEFAULT_TIME_STEP)]
        dt: f64,
    },
    /// Record a macrospin trajectory.
    DeviceTrajectory {
        /// Spin current along z, amperes.
        #[arg(long, default_value_t = 0.0)]
        current: f64,
        /// Seconds.
        #[arg(long, default_value_t = 1e-9)]
        duration: f64,
        #[arg(long, default_value_t = DEFAULT_TIME_STEP)]
        dt: f64,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                e.exit();
            }
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("").trim_start_matches("error: ");
            eprintln!("error[E_USAGE]: {first}");
            return ExitCode::from(2);
        }
    };
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let code = e
                .downcast_ref::<pcircuit::Error>()
                .map(|err| err.code())
                .or_else(|| e.downcast_ref::<io::Error>().map(|_| "E_IO"))
                .unwrap_or("E_INPUT");
            eprintln!("error[{code}]: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn load_network(cli: &Cli) -> anyhow::Result<BayesNetF64> {
    match &cli.bn {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| pcircuit::Error::Io(format!("{}: {e}", path.display())))?;
            Ok(parse_bn_file(&text)?)
        }
        None => {
            let scenario = Scenario::new(cli.scenario, cli.epsilon1, cli.epsilon2)?;
            Ok(build_family_tree(&scenario)?)
        }
    }
}

fn emit(cli: &Cli, bytes: &[u8]) -> anyhow::Result<()> {
    match &cli.out {
        Some(path) => fs::write(path, bytes)
            .map_err(|e| pcircuit::Error::Io(format!("{}: {e}", path.display())))?,
        None => io::stdout().lock().write_all(bytes)?,
    }
    Ok(())
}

fn csv_bytes<T: Serialize>(rows: &[T]) -> anyhow::Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    w.into_inner().context("flushing csv")
}

fn json_bytes<T: Serialize + ?Sized>(value: &T) -> anyhow::Result<Vec<u8>> {
    let mut out = serde_json::to_vec_pretty(value)?;
    out.push(b'\n');
    Ok(out)
}

fn execute(cli: &Cli) -> anyhow::Result<()> {
    let started = Instant::now();
    let bytes = match &cli.command {
        Command::Compile => compile_cmd(cli)?,
        Command::Sample => sample_cmd(cli)?,
        Command::Exact => exact_cmd(cli)?,
        Command::Relatedness { methods, pairs } => relatedness_cmd(cli, methods, pairs)?,
        Command::Netlist => {
            if cli.format == Format::Json {
                bail!(pcircuit::Error::Input("netlist output is text only".into()));
            }
            let compiled = compile_network(&load_network(cli)?, cli.gain, DEFAULT_EPSILON)?;
            let cp = map_to_circuit(&compiled.network, &CircuitSpec::default())?;
            export_netlist(&cp).into_bytes()
        }
        Command::DeviceSweep {
            max_current,
            points,
            avg_time,
            dt,
        } => device_sweep_cmd(cli, *max_current, *points, *avg_time, *dt)?,
        Command::DeviceTrajectory {
            current,
            duration,
            dt,
        } => device_trajectory_cmd(cli, *current, *duration, *dt)?,
    };
    emit(cli, &bytes)?;
    eprintln!("wall clock: {:.3} s", started.elapsed().as_secs_f64());
    Ok(())
}

#[derive(Serialize)]
struct CompiledNode {
    name: String,
    kind: String,
    bias: f64,
}

#[derive(Serialize)]
struct CompiledEdge {
    from: String,
    to: String,
    weight: f64,
}

#[derive(Serialize)]
struct CompiledRecord {
    record: &'static str,
    node: String,
    input: String,
    value: f64,
}

fn compile_cmd(cli: &Cli) -> anyhow::Result<Vec<u8>> {
    let compiled = compile_network(&load_network(cli)?, cli.gain, DEFAULT_EPSILON)?;
    let net = &compiled.network;
    let nodes: Vec<CompiledNode> = (0..net.n_nodes())
        .map(|i| CompiledNode {
            name: net.name(i).to_string(),
            kind: format!("{:?}", net.kind(i)).to_lowercase(),
            bias: net.bias(i),
        })
        .collect();
    let edges: Vec<CompiledEdge> = net
        .couplings()
        .map(|(to, from, weight)| CompiledEdge {
            from: net.name(from).to_string(),
            to: net.name(to).to_string(),
            weight,
        })
        .collect();
    match cli.format {
        Format::Json => json_bytes(&serde_json::json!({
            "gain": net.gain(),
            "nodes": nodes,
            "couplings": edges,
        })),
        Format::Csv => {
            let mut records: Vec<CompiledRecord> = nodes
                .into_iter()
                .map(|n| CompiledRecord {
                    record: if n.kind == "auxiliary" { "aux_bias" } else { "bias" },
                    node: n.name,
                    input: String::new(),
                    value: n.bias,
                })
                .collect();
            records.extend(edges.into_iter().map(|e| CompiledRecord {
                record: "coupling",
                node: e.to,
                input: e.from,
                value: e.weight,
            }));
            csv_bytes(&records)
        }
    }
}

fn sample_cmd(cli: &Cli) -> anyhow::Result<Vec<u8>> {
    let bn = load_network(cli)?;
    let compiled = compile_network(&bn, cli.gain, DEFAULT_EPSILON)?;
    let trace = run(&compiled.network, cli.schedule, cli.samples, cli.burn_in, cli.seed)?;
    let regular = compiled.network.regular_nodes();
    let names: Vec<&str> = regular.iter().map(|&i| compiled.network.name(i)).collect();
    match cli.format {
        Format::Json => {
            let rows: Vec<Vec<i8>> = trace
                .snapshots()
                .map(|s| regular.iter().map(|&i| s[i]).collect())
                .collect();
            json_bytes(&serde_json::json!({
                "nodes": names,
                "schedule": cli.schedule.to_string(),
                "seed": cli.seed,
                "samples": rows,
            }))
        }
        Format::Csv => {
            let mut out = String::with_capacity(trace.len() * regular.len() * 3);
            out.push_str(&names.join(","));
            out.push('\n');
            for s in trace.snapshots() {
                for (k, &i) in regular.iter().enumerate() {
                    if k > 0 {
                        out.push(',');
                    }
                    out.push_str(if s[i] > 0 { "1" } else { "-1" });
                }
                out.push('\n');
            }
            Ok(out.into_bytes())
        }
    }
}

#[derive(Serialize)]
struct JointRow {
    state: String,
    probability: f64,
}

fn exact_cmd(cli: &Cli) -> anyhow::Result<Vec<u8>> {
    let bn = load_network(cli)?;
    let joint = exact_joint(&bn)?;
    let n = joint.n_vars();
    let rows: Vec<JointRow> = joint
        .probabilities()
        .iter()
        .enumerate()
        .map(|(idx, &probability)| JointRow {
            state: (0..n).map(|k| if idx >> k & 1 == 1 { '-' } else { '+' }).collect(),
            probability,
        })
        .collect();
    match cli.format {
        Format::Json => json_bytes(&serde_json::json!({ "nodes": joint.names(), "joint": rows })),
        Format::Csv => csv_bytes(&rows),
    }
}

#[derive(Serialize)]
struct ReportRow {
    pair: String,
    exact: Option<f64>,
    psl: Option<f64>,
    circuit: Option<f64>,
    n: usize,
    seed: u64,
}

fn relatedness_cmd(cli: &Cli, methods: &[String], pairs: &[String]) -> anyhow::Result<Vec<u8>> {
    let methods = methods
        .iter()
        .map(|m| m.trim().parse::<Method>())
        .collect::<Result<Vec<_>, _>>()?;
    let bn = load_network(cli)?;
    let pairs = if pairs.is_empty() {
        None
    } else {
        Some(
            pairs
                .iter()
                .map(|p| match p.split_once('-') {
                    Some((a, b)) if !a.is_empty() && !b.is_empty() => Ok((a.to_string(), b.to_string())),
                    _ => Err(pcircuit::Error::Input(format!("pair `{p}` is not of the form A-B"))),
                })
                .collect::<Result<Vec<_>, _>>()?,
        )
    };
    let config = RelatednessConfig {
        n_samples: cli.samples,
        burn_in: cli.burn_in,
        seed: cli.seed,
        schedule: cli.schedule,
        pairs,
        gain: cli.gain,
        ..RelatednessConfig::default()
    };
    let report = relatedness_table(&bn, &methods, &config)?;
    let rows: Vec<ReportRow> = report
        .rows
        .into_iter()
        .map(|r| ReportRow {
            pair: r.pair,
            exact: r.exact,
            psl: r.psl,
            circuit: r.circuit,
            n: report.n_samples,
            seed: report.seed,
        })
        .collect();
    match cli.format {
        Format::Json => json_bytes(&rows),
        Format::Csv => csv_bytes(&rows),
    }
}

#[derive(Serialize)]
struct SweepRow {
    #[serde(rename = "I_S")]
    current: f64,
    avg_sgn_mz: f64,
}

fn device_sweep_cmd(
    cli: &Cli,
    max_current: f64,
    points: usize,
    avg_time: f64,
    dt: f64,
) -> anyhow::Result<Vec<u8>> {
    if points < 2 || !(max_current > 0.0) {
        bail!(pcircuit::Error::Input("need at least two points and a positive current".into()));
    }
    let currents: Vec<f64> = (0..points)
        .map(|k| -max_current + 2.0 * max_current * k as f64 / (points - 1) as f64)
        .collect();
    let sweep = sigmoid_response(&MagnetParams::low_barrier_disk(), &currents, avg_time, dt, cli.seed)?;
    if sweep.insufficient_flips {
        eprintln!(
            "warning: only {} flips at zero bias; lengthen --avg-time",
            sweep.zero_bias_flips
        );
    }
    let rows: Vec<SweepRow> = sweep
        .points
        .iter()
        .map(|&(current, avg_sgn_mz)| SweepRow { current, avg_sgn_mz })
        .collect();
    match cli.format {
        Format::Json => json_bytes(&serde_json::json!({
            "points": rows,
            "std_errors": sweep.std_errors,
            "current_scale": sweep.current_scale,
            "r_squared": sweep.r_squared,
            "residual": sweep.residual,
            "zero_bias_flips": sweep.zero_bias_flips,
        })),
        Format::Csv => {
            eprintln!(
                "tanh fit: I_scale = {:e} A, R^2 = {:.4}",
                sweep.current_scale, sweep.r_squared
            );
            csv_bytes(&rows)
        }
    }
}

#[derive(Serialize)]
struct TrajectoryRow {
    time_s: f64,
    m_x: f64,
    m_y: f64,
    m_z: f64,
}

fn device_trajectory_cmd(cli: &Cli, current: f64, duration: f64, dt: f64) -> anyhow::Result<Vec<u8>> {
    let start = MagnetState::new(Vec3::unit_y())?;
    let points = run_trajectory(&MagnetParams::low_barrier_disk(), current, duration, dt, cli.seed, start)?;
    let rows: Vec<TrajectoryRow> = points
        .iter()
        .map(|p| TrajectoryRow {
            time_s: p.time,
            m_x: p.m.x,
            m_y: p.m.y,
            m_z: p.m.z,
        })
        .collect();
    match cli.format {
        Format::Json => json_bytes(&rows),
        Format::Csv => csv_bytes(&rows),
    }
}
