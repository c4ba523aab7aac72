//! Command layer: argument types, the five commands, and report rendering.
//!
//! Every command produces a [`RunReport`]: the echoed command line, one line
//! per fact, and the elapsed time. Numeric results are printed exactly, with
//! a rounded decimal in parentheses for human eyes; a fraction and its
//! decimal always denote the same number at the printed precision.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::KSplitting;
use crate::lattice::counting::{count_p, count_p0};
use crate::lattice::partition::Ground;
use crate::lattice::state::StateSpace;
use crate::netfile::NetworkFile;
use crate::reliability::{KNetwork, DEFAULT_ENUMERATION_LIMIT};
use crate::splitting::{is_invertible_full, render_bundle, TransferBundle};

/// Exact network reliability, directly or through a separator splitting.
#[derive(Debug, Parser)]
#[command(name = "relsplit", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact reliability by exhaustive edge-state enumeration.
    Compute(ComputeArgs),
    /// Reliability through a separator splitting.
    Split(SplitArgs),
    /// Splitting checked against enumeration; same as `split --verify`.
    Verify(SplitArgs),
    /// State-space sizes for a separator of n vertices, k of them terminals.
    States(StatesArgs),
    /// States, weights and transfer matrices for a given separator.
    Lattice(LatticeArgs),
}

/// Which splitting formula evaluates the reliability.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    /// Pair the sides' partition vectors through the join matrix.
    P,
    /// Pair the sides' merged reliability vectors through the reduced
    /// inverse.
    R,
}

impl Method {
    fn as_str(self) -> &'static str {
        match self {
            Method::P => "p",
            Method::R => "r",
        }
    }
}

#[derive(Debug, Args)]
pub struct ComputeArgs {
    /// Network description (JSON).
    pub file: PathBuf,
    /// Edge-count cap for exhaustive enumeration.
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_LIMIT)]
    pub limit: usize,
    /// Decimal digits in the parenthesized rendering.
    #[arg(long, default_value_t = 6)]
    pub digits: usize,
}

#[derive(Debug, Args)]
pub struct SplitArgs {
    /// Network description (JSON).
    pub file: PathBuf,
    /// Separator vertices; overrides the file's own separator.
    #[arg(long, value_delimiter = ',')]
    pub separator: Option<Vec<String>>,
    /// Splitting formula.
    #[arg(long, value_enum, default_value_t = Method::R)]
    pub method: Method,
    /// Also run the enumeration oracle and report a verdict.
    #[arg(long)]
    pub verify: bool,
    /// Seed for the randomized re-weighting trials under --verify; the
    /// default is fixed so runs reproduce.
    #[arg(long, default_value_t = 17)]
    pub seed: u64,
    /// Edge-count cap for the oracle enumeration.
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_LIMIT)]
    pub limit: usize,
    /// Decimal digits in the parenthesized rendering.
    #[arg(long, default_value_t = 6)]
    pub digits: usize,
}

#[derive(Debug, Args)]
pub struct StatesArgs {
    /// Separator size.
    pub n: usize,
    /// How many separator vertices are terminals.
    pub k: usize,
    /// Decimal digits in the parenthesized rendering.
    #[arg(long, default_value_t = 6)]
    pub digits: usize,
}

#[derive(Debug, Args)]
pub struct LatticeArgs {
    /// Separator vertices, comma-separated.
    #[arg(value_delimiter = ',')]
    pub vertices: Vec<String>,
    /// Which separator vertices are terminals, comma-separated.
    #[arg(long, value_delimiter = ',')]
    pub terminals: Option<Vec<String>>,
    /// Largest separator the dump will attempt.
    #[arg(long, default_value_t = 6)]
    pub bound: usize,
}

/// What a command run produced, ready to print.
#[derive(Debug)]
pub struct RunReport {
    command: String,
    lines: Vec<String>,
    mismatch: bool,
    elapsed: Duration,
}

impl RunReport {
    pub fn render(&self) -> String {
        let mut out = format!("command: {}\n", self.command);
        for line in &self.lines {
            out.push_str(line);
            out.push('\n');
        }
        out.push_str(&format!("time: {} ms\n", self.elapsed.as_millis()));
        out
    }

    /// True when a --verify run found a disagreement; the caller turns this
    /// into a nonzero exit code.
    pub fn mismatch(&self) -> bool {
        self.mismatch
    }

    pub fn lines(&self) -> &[String] {
        &self.lines
    }
}

/// `value` rounded half-up to `digits` fractional digits, trailing zeros
/// trimmed.
pub fn decimal_string(value: &BigRational, digits: usize) -> String {
    let scale = BigInt::from(10u8).pow(digits as u32);
    let scaled = (value * BigRational::from(scale)).round().to_integer();
    let negative = scaled < BigInt::zero();
    let mut s = scaled.abs().to_string();
    if s.len() <= digits {
        s = format!("{s:0>width$}", width = digits + 1);
    }
    let (int, frac) = s.split_at(s.len() - digits);
    let frac = frac.trim_end_matches('0');
    let body = if frac.is_empty() {
        int.to_string()
    } else {
        format!("{int}.{frac}")
    };
    if negative && body.bytes().any(|b| b != b'0' && b != b'.') {
        format!("-{body}")
    } else {
        body
    }
}

/// `name = exact (decimal)`, with the parenthesis dropped when the exact
/// value is already an integer.
fn value_line(name: &str, value: &BigRational, digits: usize) -> String {
    if value.is_integer() {
        format!("{name} = {value}")
    } else {
        format!("{name} = {value} ({})", decimal_string(value, digits))
    }
}

pub fn run(cli: &Cli) -> Result<RunReport> {
    match &cli.command {
        Command::Compute(args) => cmd_compute(args),
        Command::Split(args) => cmd_split(args, args.verify),
        Command::Verify(args) => cmd_split(args, true),
        Command::States(args) => cmd_states(args),
        Command::Lattice(args) => cmd_lattice(args),
    }
}

pub fn cmd_compute(args: &ComputeArgs) -> Result<RunReport> {
    let start = Instant::now();
    let file = NetworkFile::from_path(&args.file)?;
    let net = file.to_network(args.limit)?;
    let value = net.reliability_bruteforce()?;
    Ok(RunReport {
        command: format!("compute {}", args.file.display()),
        lines: vec![value_line("R", &value, args.digits)],
        mismatch: false,
        elapsed: start.elapsed(),
    })
}

fn evaluate(
    net: &KNetwork,
    split: &KSplitting,
    bundle: &TransferBundle,
    method: Method,
) -> Result<BigRational> {
    match method {
        Method::P => crate::splitting::reliability_via_p(net, split, bundle),
        Method::R => crate::splitting::reliability_via_r(net, split, bundle),
    }
}

pub fn cmd_split(args: &SplitArgs, verify: bool) -> Result<RunReport> {
    let start = Instant::now();
    let file = NetworkFile::from_path(&args.file)?;
    let split = file.to_splitting(args.separator.as_deref())?;
    let net = file.to_network(args.limit)?;
    let space = Arc::new(StateSpace::new(&split.base_partition()?)?);
    let bundle = TransferBundle::build(space)?;

    let mut command = format!(
        "{} {} --separator {} --method {}",
        if verify { "verify" } else { "split" },
        args.file.display(),
        split.separator().join(","),
        args.method.as_str()
    );
    if verify {
        command.push_str(&format!(" --seed {}", args.seed));
    }

    let value = evaluate(&net, &split, &bundle, args.method)?;
    let mut lines = vec![
        format!("states: {}", bundle.space().len()),
        format!("reduced: {}", bundle.space().reduced_len()),
        value_line("R", &value, args.digits),
    ];

    let mut mismatch = false;
    if verify {
        let oracle = net.reliability_bruteforce()?;
        lines.push(value_line("oracle", &oracle, args.digits));
        let mut agree = value == oracle;
        let (passed, total) = reweighting_trials(&net, &split, &bundle, args)?;
        lines.push(format!(
            "seeded trials: {passed}/{total} exact (seed {})",
            args.seed
        ));
        agree &= passed == total;
        lines.push(format!(
            "verdict: {}",
            if agree { "EXACT-MATCH" } else { "MISMATCH" }
        ));
        mismatch = !agree;
    }

    Ok(RunReport {
        command,
        lines,
        mismatch,
        elapsed: start.elapsed(),
    })
}

const REWEIGHTING_TRIALS: usize = 3;

/// Replays the splitting formula against the oracle under fresh random
/// rational edge probabilities; the topology and separator stay fixed.
fn reweighting_trials(
    net: &KNetwork,
    split: &KSplitting,
    bundle: &TransferBundle,
    args: &SplitArgs,
) -> Result<(usize, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut passed = 0;
    for _ in 0..REWEIGHTING_TRIALS {
        let prob: BTreeMap<String, BigRational> = net
            .kgraph()
            .graph()
            .edges()
            .iter()
            .map(|e| {
                let den: i64 = rng.gen_range(2..=6);
                let num: i64 = rng.gen_range(0..=den);
                (
                    e.id().to_owned(),
                    BigRational::new(BigInt::from(num), BigInt::from(den)),
                )
            })
            .collect();
        let trial = KNetwork::new(net.kgraph().clone(), prob, args.limit)?;
        let via = evaluate(&trial, split, bundle, args.method)?;
        if via == trial.reliability_bruteforce()? {
            passed += 1;
        }
    }
    Ok((passed, REWEIGHTING_TRIALS))
}

pub fn cmd_states(args: &StatesArgs) -> Result<RunReport> {
    let start = Instant::now();
    if args.k > args.n {
        return Err(Error::OutOfRange(format!(
            "k = {} exceeds n = {}",
            args.k, args.n
        )));
    }
    let p = count_p(args.n, args.k);
    let p0 = count_p0(args.n, args.k);
    let mut lines = vec![
        format!("P({}, {}) = {}", args.n, args.k, p),
        format!("P0({}, {}) = {}", args.n, args.k, p0),
    ];
    if !p.is_zero() {
        let ratio = BigRational::new(BigInt::from(p0), BigInt::from(p));
        lines.push(format!(
            "reduction: {} ({})",
            ratio,
            decimal_string(&ratio, args.digits)
        ));
    }
    Ok(RunReport {
        command: format!("states {} {}", args.n, args.k),
        lines,
        mismatch: false,
        elapsed: start.elapsed(),
    })
}

pub fn cmd_lattice(args: &LatticeArgs) -> Result<RunReport> {
    let start = Instant::now();
    let ground = Ground::new(&args.vertices)?;
    if ground.len() > args.bound {
        return Err(Error::OutOfRange(format!(
            "{} separator vertices exceed the bound of {} (raise --bound to force)",
            ground.len(),
            args.bound
        )));
    }
    let terminals: Vec<String> = args.terminals.clone().unwrap_or_default();
    let space = Arc::new(StateSpace::over_singletons(&ground, &terminals)?);
    let bundle = TransferBundle::build(space)?;

    let mut command = format!("lattice {}", args.vertices.join(","));
    if !terminals.is_empty() {
        command.push_str(&format!(" --terminals {}", terminals.join(",")));
    }

    let mut lines = vec![
        format!("states: {}", bundle.space().len()),
        format!("reduced: {}", bundle.space().reduced_len()),
        format!(
            "full join matrix invertible: {}",
            if is_invertible_full(bundle.space()) {
                "yes"
            } else {
                "no"
            }
        ),
    ];
    lines.extend(render_bundle(&bundle).lines().map(str::to_owned));

    Ok(RunReport {
        command,
        lines,
        mismatch: false,
        elapsed: start.elapsed(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reliability::ratio;
    use std::fs;
    use std::path::Path;

    fn rational(s: &str) -> BigRational {
        crate::netfile::parse_probability(s).unwrap()
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(decimal_string(&ratio(1, 4), 6), "0.25");
        assert_eq!(decimal_string(&ratio(7, 16), 6), "0.4375");
        assert_eq!(decimal_string(&ratio(1, 3), 6), "0.333333");
        assert_eq!(decimal_string(&ratio(2, 3), 6), "0.666667");
        assert_eq!(decimal_string(&ratio(1, 1), 6), "1");
        assert_eq!(decimal_string(&ratio(0, 1), 6), "0");
        assert_eq!(decimal_string(&ratio(1, 2), 0), "1");
        assert_eq!(decimal_string(&ratio(-3, 4), 2), "-0.75");
        // Rounds to zero without keeping the sign.
        assert_eq!(decimal_string(&ratio(-1, 1000), 2), "0");
        assert_eq!(decimal_string(&rational("14/17"), 6), "0.823529");
    }

    #[test]
    fn decimal_agrees_with_exact_to_printed_precision() {
        for (num, den) in [(1i64, 3i64), (7, 16), (14, 17), (5, 7), (1, 1), (0, 1)] {
            let exact = ratio(num, den);
            let printed = rational(&decimal_string(&exact, 6));
            let error = (&exact - &printed).abs();
            assert!(
                error <= ratio(1, 2_000_000),
                "{num}/{den} printed too far off"
            );
        }
    }

    #[test]
    fn value_lines() {
        assert_eq!(value_line("R", &ratio(7, 16), 6), "R = 7/16 (0.4375)");
        assert_eq!(value_line("R", &ratio(1, 1), 6), "R = 1");
        assert_eq!(value_line("R", &ratio(0, 1), 6), "R = 0");
    }

    #[test]
    fn states_command_counts() {
        let report = cmd_states(&StatesArgs {
            n: 3,
            k: 0,
            digits: 6,
        })
        .unwrap();
        assert_eq!(report.lines()[0], "P(3, 0) = 17");
        assert_eq!(report.lines()[1], "P0(3, 0) = 14");
        assert!(report.lines()[2].starts_with("reduction: 14/17"));
        assert!(cmd_states(&StatesArgs {
            n: 2,
            k: 3,
            digits: 6,
        })
        .is_err());
    }

    #[test]
    fn lattice_command_dumps() {
        let report = cmd_lattice(&LatticeArgs {
            vertices: vec!["x".into(), "y".into()],
            terminals: None,
            bound: 6,
        })
        .unwrap();
        let text = report.render();
        assert!(text.contains("states: 4"));
        assert!(text.contains("reduced: 4"));
        assert!(text.contains("invertible: yes"));
        assert!(text.contains("xl|y"));
        let too_big = cmd_lattice(&LatticeArgs {
            vertices: (0..7).map(|i| format!("v{i}")).collect(),
            terminals: None,
            bound: 6,
        });
        assert!(matches!(too_big, Err(Error::OutOfRange(_))));
    }

    fn write_temp(name: &str, contents: &str) -> PathBuf {
        let path = std::env::temp_dir().join(format!("relsplit-{}-{name}", std::process::id()));
        fs::write(&path, contents).unwrap();
        path
    }

    fn diamond_json(p: &str) -> String {
        format!(
            r#"{{
  "vertices": ["a", "x", "y", "b"],
  "edges": [
    {{"id": "e1", "u": "a", "v": "x", "p": "{p}"}},
    {{"id": "e2", "u": "a", "v": "y", "p": "{p}"}},
    {{"id": "e3", "u": "x", "v": "b", "p": "{p}"}},
    {{"id": "e4", "u": "y", "v": "b", "p": "{p}"}}
  ],
  "terminals": ["a", "b"],
  "separator": ["x", "y"]
}}"#
        )
    }

    #[test]
    fn compute_command_diamond() {
        let path = write_temp("compute.json", &diamond_json("1/2"));
        let report = cmd_compute(&ComputeArgs {
            file: path.clone(),
            limit: DEFAULT_ENUMERATION_LIMIT,
            digits: 6,
        })
        .unwrap();
        assert_eq!(report.lines()[0], "R = 7/16 (0.4375)");
        fs::remove_file(path).ok();
    }

    #[test]
    fn compute_command_certain_edges() {
        let path = write_temp("certain.json", &diamond_json("1"));
        let report = cmd_compute(&ComputeArgs {
            file: path.clone(),
            limit: DEFAULT_ENUMERATION_LIMIT,
            digits: 6,
        })
        .unwrap();
        assert_eq!(report.lines()[0], "R = 1");
        fs::remove_file(path).ok();
    }

    fn split_args(path: &Path, method: Method) -> SplitArgs {
        SplitArgs {
            file: path.to_path_buf(),
            separator: None,
            method,
            verify: false,
            seed: 17,
            limit: DEFAULT_ENUMERATION_LIMIT,
            digits: 6,
        }
    }

    #[test]
    fn split_command_both_methods() {
        let path = write_temp("split.json", &diamond_json("1/2"));
        for method in [Method::P, Method::R] {
            let report = cmd_split(&split_args(&path, method), false).unwrap();
            assert_eq!(report.lines()[0], "states: 4");
            assert_eq!(report.lines()[1], "reduced: 4");
            assert_eq!(report.lines()[2], "R = 7/16 (0.4375)");
            assert!(!report.mismatch());
        }
        fs::remove_file(path).ok();
    }

    #[test]
    fn verify_command_reports_match() {
        let path = write_temp("verify.json", &diamond_json("1/2"));
        let report = cmd_split(&split_args(&path, Method::R), true).unwrap();
        let text = report.render();
        assert!(text.contains("verdict: EXACT-MATCH"));
        assert!(text.contains("seeded trials: 3/3 exact (seed 17)"));
        assert!(!report.mismatch());
        fs::remove_file(path).ok();
    }

    #[test]
    fn cli_parses_the_documented_flags() {
        let cli = Cli::try_parse_from([
            "relsplit",
            "split",
            "net.json",
            "--separator",
            "x,y",
            "--method",
            "p",
            "--digits",
            "8",
            "--limit",
            "20",
        ])
        .unwrap();
        match cli.command {
            Command::Split(args) => {
                assert_eq!(
                    args.separator.as_deref(),
                    Some(&["x".to_string(), "y".to_string()][..])
                );
                assert_eq!(args.method, Method::P);
                assert_eq!(args.digits, 8);
                assert_eq!(args.limit, 20);
            }
            _ => panic!("parsed the wrong command"),
        }
        let cli = Cli::try_parse_from(["relsplit", "states", "3", "0"]).unwrap();
        assert!(matches!(cli.command, Command::States(_)));
        let cli =
            Cli::try_parse_from(["relsplit", "lattice", "a,b,c", "--terminals", "a"]).unwrap();
        match cli.command {
            Command::Lattice(args) => {
                assert_eq!(args.vertices, ["a", "b", "c"]);
                assert_eq!(args.terminals.as_deref(), Some(&["a".to_string()][..]));
            }
            _ => panic!("parsed the wrong command"),
        }
    }
}
