//! Command-line front end: run a protocol or a standalone game and report
//! acceptance statistics, optionally as JSON.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use serde::Serialize;

use twoprover::circuits::Circuit;
use twoprover::games::{GameConfig, GameKind};
use twoprover::orchestrator::corpus::{input_hint, parse_bits};
use twoprover::orchestrator::experiment::{run_game, run_trials, ConfigError, ExperimentSetup, Params, Protocol, TrialReport};
use twoprover::orchestrator::seq::{run_seq_experiment, SeqReport};
use twoprover::orchestrator::stats::ExperimentStats;
use twoprover::orchestrator::strategy::{adversary, PpMode, PvMode};

#[derive(Parser, Debug)]
#[command(name = "twoprover", version, about = "Simulate two-prover delegation protocols and self-testing games")]
struct Cli {
    /// epr, leash, dogwalker or seq.
    #[arg(long)]
    protocol: Option<String>,
    /// Circuit file (H, T, CNOT, and the X/Z/P macros; 1-indexed wires).
    #[arg(long)]
    circuit: Option<PathBuf>,
    /// Input bit string; defaults to the file's `# input` line, else zeros.
    #[arg(long)]
    input: Option<String>,
    #[arg(long, default_value_t = 1000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// key=val,... with keys p, p_r, p1..p4, m, kappa, c, delta, round.
    #[arg(long, default_value = "")]
    params: String,
    #[arg(long = "adversary-pv")]
    adversary_pv: Option<String>,
    #[arg(long = "adversary-pp")]
    adversary_pp: Option<String>,
    /// Standalone game: ms, bell, pbt, pbtxyz, conj, conjcliff, cliff, rigid, tom (also id, com, ac, prod).
    #[arg(long)]
    game: Option<String>,
    /// Write the report as JSON to this path (`-` for stdout).
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Serialize)]
struct Report<R: Serialize> {
    tool: &'static str,
    version: &'static str,
    seed: u64,
    trials: u64,
    params: Params,
    pv: PvMode,
    pp: PpMode,
    #[serde(skip_serializing_if = "Option::is_none")]
    protocol: Option<Protocol>,
    #[serde(skip_serializing_if = "Option::is_none")]
    circuit: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    input: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    game: Option<String>,
    result: R,
}

#[derive(Serialize)]
#[serde(untagged)]
enum Outcome {
    Trials(TrialReport),
    Seq(SeqReport),
    Game(ExperimentStats),
}

fn bits_to_string(b: &[u8]) -> String {
    b.iter().map(|x| if *x == 1 { '1' } else { '0' }).collect()
}

fn run(cli: &Cli) -> Result<(String, String), ConfigError> {
    let params = Params::parse(&cli.params)?;
    let (pv, pp) = adversary(cli.adversary_pv.as_deref(), cli.adversary_pp.as_deref())?;
    if cli.trials == 0 {
        return Err(ConfigError::Invalid("trials must be at least 1".into()));
    }
    let mut report = Report {
        tool: "twoprover",
        version: env!("CARGO_PKG_VERSION"),
        seed: cli.seed,
        trials: cli.trials,
        params: params.clone(),
        pv,
        pp,
        protocol: None,
        circuit: None,
        input: None,
        game: None,
        result: Outcome::Game(ExperimentStats::default()),
    };
    if let Some(g) = &cli.game {
        if cli.protocol.is_some() {
            return Err(ConfigError::Invalid("give either --game or --protocol, not both".into()));
        }
        let kind = GameKind::parse(g).ok_or_else(|| ConfigError::Invalid(format!("unknown game '{g}'")))?;
        let mut cfg = GameConfig::default();
        if let Some(m) = params.m {
            if m == 0 {
                return Err(ConfigError::Invalid("m must be at least 1".into()));
            }
            cfg.m = m;
            cfg.m_prime = cfg.m_prime.min(m);
        }
        if kind.pairs(&cfg) > 200 {
            return Err(ConfigError::Invalid(format!("m = {} is too large for a standalone game", cfg.m)));
        }
        let stats = run_game(kind, &cfg, pv, pp, cli.trials, cli.seed);
        let summary = format!("game {}: {}/{} won, rate {:.4}, 95% CI [{:.4}, {:.4}]", kind.name(), stats.accepted, stats.trials, stats.rate, stats.wilson95.0, stats.wilson95.1);
        report.game = Some(kind.name().into());
        report.result = Outcome::Game(stats);
        return Ok((summary, serde_json::to_string_pretty(&report).expect("serializable")));
    }
    let protocol = Protocol::parse(cli.protocol.as_deref().ok_or_else(|| ConfigError::Invalid("--protocol or --game is required".into()))?)?;
    let path = cli.circuit.as_ref().ok_or_else(|| ConfigError::Invalid("--circuit is required".into()))?;
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Invalid(format!("cannot read {}: {e}", path.display())))?;
    let circuit = Circuit::parse(&text)?;
    let input = match &cli.input {
        Some(s) => parse_bits(s).map_err(ConfigError::Invalid)?,
        None => input_hint(&text).unwrap_or_else(|| vec![0; circuit.n]),
    };
    report.protocol = Some(protocol);
    report.circuit = Some(circuit.to_text());
    report.input = Some(bits_to_string(&input));
    let setup = ExperimentSetup { protocol, circuit, input, params, pv, pp };
    let summary = if protocol == Protocol::Seq {
        let r = run_seq_experiment(&setup, cli.trials, cli.seed)?;
        let s = format!(
            "seq: c={:.4} delta={:.4} kappa={} -> one {}, zero {}, abort {} of {} runs (expected {:?})",
            r.c, r.delta, r.kappa, r.one, r.zero, r.abort, r.runs, r.expected
        );
        report.result = Outcome::Seq(r);
        s
    } else {
        let r = run_trials(&setup, cli.trials, cli.seed)?;
        let st = &r.stats;
        let mut s = format!(
            "{:?}: {}/{} accepted, rate {:.4}, 95% CI [{:.4}, {:.4}], oracle p = {:.4}",
            protocol, st.accepted, st.trials, st.rate, st.wilson95.0, st.wilson95.1, r.oracle_p
        );
        for (k, t) in &st.breakdown {
            s.push_str(&format!("\n  {k}: {}/{} ({:.4})", t.accepted, t.trials, t.rate()));
        }
        report.result = Outcome::Trials(r);
        s
    };
    Ok((summary, serde_json::to_string_pretty(&report).expect("serializable")))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((summary, json)) => {
            match &cli.json {
                Some(p) if p.as_os_str() == "-" => println!("{json}"),
                Some(p) => {
                    if let Err(e) = std::fs::write(p, json + "\n") {
                        eprintln!("error: cannot write {}: {e}", p.display());
                        return ExitCode::from(2);
                    }
                    println!("{summary}");
                }
                None => println!("{summary}"),
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
