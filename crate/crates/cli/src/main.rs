//! Command-line front end: every pipeline stage as a subcommand with
//! machine-readable output.
//!
//! Records go to stdout as JSON lines (default) or aligned text with the same
//! numeric content; diagnostics go to stderr. Exit codes: 0 success, 1
//! verification failure, 2 usage error.

use std::fmt::Display;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Map, Value};

use tmcf::approx::{doubled_kempner, ftmm_value, tau_tm, Engine, Limits};
use tmcf::canonical::{double, structure_report, BetaTable, CanonicalSeq};
use tmcf::cfseries::{extract_cf, ConvergentPair};
use tmcf::dyadic::DyadicInterval;
use tmcf::laurent::LaurentTail;
use tmcf::numtheory::{is_primitive_root, PrimePower};
use tmcf::poly::{Int, Poly};
use tmcf::realcf::real_cf;
use tmcf::selftest::{run_all, run_item, SelftestConfig, CRITERIA};

const DEFAULT_PRECISION_BITS: u64 = 4096;
const DEFAULT_T_MAX: u32 = 64;
const DEFAULT_N_MAX: u32 = 8;
const DEFAULT_SIZE_LIMIT_BITS: u64 = 10_000_000;
const CONFIG_ENV: &str = "TMCF_CONFIG";

#[derive(Parser)]
#[command(
    name = "tmcf",
    about = "Continued fractions and approximation certificates for Thue-Morse constants",
    version
)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalArgs {
    /// Output format for records on stdout
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Working precision in bits (forces the self-test precisions too)
    #[arg(long, global = true)]
    precision_bits: Option<u64>,
    /// Largest convergent index scanned for acceptability
    #[arg(long, global = true)]
    t_max: Option<u32>,
    /// Largest tower index tried in scans
    #[arg(long, global = true)]
    n_max: Option<u32>,
    /// Bit budget for exact big-integer evaluation
    #[arg(long, global = true)]
    size_limit_bits: Option<u64>,
    /// Path to a TOML config file (also read from $TMCF_CONFIG)
    #[arg(long, global = true)]
    config: Option<String>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum Constant {
    /// The Thue-Morse constant
    Tau,
    /// The Laurent tail evaluated at 2
    F2,
    /// 2 * sum 2^(-2^k), the all-ones-and-twos contrast constant
    Contrast,
}

#[derive(Subcommand)]
enum Command {
    /// Rational coefficient beta_n of the canonical recurrence
    Beta {
        #[arg(long, value_parser = clap::value_parser!(u32).range(3..))]
        n: u32,
    },
    /// Canonical convergent of index n (monic numerator)
    Convergent {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        n: u32,
    },
    /// Extract partial quotients from the Thue-Morse tail (or a rational one)
    CfSeries {
        #[arg(long, default_value_t = 8)]
        count: usize,
        /// Numerator of a rational tail (with --den) instead of the stream
        #[arg(long, requires = "den")]
        num: Option<String>,
        /// Denominator of a rational tail
        #[arg(long, requires = "num")]
        den: Option<String>,
    },
    /// Apply the doubling map to a convergent pair
    Double {
        #[arg(long, value_name = "POLY")]
        p: String,
        #[arg(long, value_name = "POLY")]
        q: String,
    },
    /// Shape checks at index n (even doubling, odd factor, monic quotients)
    Structure {
        #[arg(long, value_parser = clap::value_parser!(u32).range(2..))]
        n: u32,
    },
    /// Scaled integer approximation pair for (n, t, a)
    Approx {
        #[arg(long)]
        n: u32,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        t: u32,
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
        a: u64,
    },
    /// Rigorous bracket for q|q f(a) - p| of the pair (n, t, a)
    Quality {
        #[arg(long)]
        n: u32,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        t: u32,
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
        a: u64,
        /// Precision in bits (defaults to the configured precision)
        #[arg(long)]
        bits: Option<u64>,
    },
    /// Smallest index t making p acceptable
    Acceptable {
        #[arg(long)]
        p: u64,
        /// Check exactly this index instead of scanning
        #[arg(long)]
        t: Option<u32>,
    },
    /// Divisibility witness for (p, t, a) at level m
    Witness {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        t: u32,
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
        a: u64,
        #[arg(long)]
        m: u32,
    },
    /// Divide the pair (n, t, a) by p^k and confirm the quality drop
    Reduce {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        t: u32,
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
        a: u64,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        k: u32,
    },
    /// Acceptable-prime certificates for a range of bases
    Scan {
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
        a_min: u64,
        #[arg(long)]
        a_max: u64,
        /// Comma-separated prime pool
        #[arg(long, value_delimiter = ',', default_value = "3,5,11,13,19,29,61")]
        pool: Vec<u64>,
    },
    /// Certified partial quotients of a constant
    RealCf {
        #[arg(long, value_enum, default_value_t = Constant::Tau)]
        constant: Constant,
        #[arg(long)]
        bits: Option<u64>,
        #[arg(long, default_value_t = 64)]
        terms: usize,
    },
    /// Run the acceptance checklist
    Selftest {
        /// Comma-separated criterion ids (default: all)
        #[arg(long, value_delimiter = ',')]
        items: Vec<usize>,
        /// Fault-injection hook: plant a wrong beta value
        #[arg(long)]
        corrupt_beta: bool,
    },
}

#[derive(Deserialize, Default)]
struct FileConfig {
    precision_bits: Option<u64>,
    t_max: Option<u32>,
    n_max: Option<u32>,
    size_limit_bits: Option<u64>,
    format: Option<String>,
}

struct Config {
    format: Format,
    precision_bits: Option<u64>,
    t_max: u32,
    n_max: u32,
    size_limit_bits: u64,
}

fn load_config(global: &GlobalArgs) -> Result<Config, String> {
    let path = global
        .config
        .clone()
        .or_else(|| std::env::var(CONFIG_ENV).ok());
    let file: FileConfig = match path {
        Some(path) => {
            let text = std::fs::read_to_string(&path)
                .map_err(|e| format!("cannot read config {path}: {e}"))?;
            toml::from_str(&text).map_err(|e| format!("cannot parse config {path}: {e}"))?
        }
        None => FileConfig::default(),
    };
    let format = match global.format {
        Some(f) => f,
        None => match file.format.as_deref() {
            Some("text") => Format::Text,
            Some("json") | None => Format::Json,
            Some(other) => return Err(format!("unknown format {other:?} in config")),
        },
    };
    Ok(Config {
        format,
        precision_bits: global.precision_bits.or(file.precision_bits),
        t_max: global.t_max.or(file.t_max).unwrap_or(DEFAULT_T_MAX),
        n_max: global.n_max.or(file.n_max).unwrap_or(DEFAULT_N_MAX),
        size_limit_bits: global
            .size_limit_bits
            .or(file.size_limit_bits)
            .unwrap_or(DEFAULT_SIZE_LIMIT_BITS),
    })
}

impl Config {
    fn engine(&self) -> Engine {
        Engine::with_parts(
            CanonicalSeq::with_beta(BetaTable::new()),
            Limits {
                size_limit_bits: self.size_limit_bits,
            },
        )
    }

    fn bits(&self, explicit: Option<u64>) -> u64 {
        explicit
            .or(self.precision_bits)
            .unwrap_or(DEFAULT_PRECISION_BITS)
    }
}

/// One output record: ordered key/value pairs, printed as a JSON object or
/// as `key=value` text with identical numeric content.
struct Record(Map<String, Value>);

impl Record {
    fn new() -> Self {
        Record(Map::new())
    }

    fn set(mut self, key: &str, value: Value) -> Self {
        self.0.insert(key.to_string(), value);
        self
    }

    fn str(self, key: &str, value: impl Display) -> Self {
        self.set(key, Value::String(value.to_string()))
    }

    fn emit(self, format: Format) {
        match format {
            Format::Json => println!("{}", Value::Object(self.0)),
            Format::Text => {
                let parts: Vec<String> = self
                    .0
                    .iter()
                    .map(|(k, v)| match v {
                        Value::String(s) => format!("{k}={s}"),
                        other => format!("{k}={other}"),
                    })
                    .collect();
                println!("{}", parts.join(" "));
            }
        }
    }
}

fn parse_poly(text: &str, what: &str) -> Result<Poly, String> {
    text.parse()
        .map_err(|e| format!("cannot parse {what} as a polynomial: {e}"))
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    let cfg = load_config(&cli.global)?;
    let fmt = cfg.format;
    match cli.command {
        Command::Beta { n } => {
            let engine = cfg.engine();
            Record::new()
                .set("n", json!(n))
                .str("beta", engine.canon().beta(n))
                .emit(fmt);
        }
        Command::Convergent { n } => {
            let c = cfg.engine().canon().canonical(n);
            Record::new()
                .set("n", json!(n))
                .str("phat", &c.phat)
                .str("qhat", &c.qhat)
                .emit(fmt);
        }
        Command::CfSeries { count, num, den } => {
            let tail = match (num, den) {
                (Some(num), Some(den)) => LaurentTail::from_rational(
                    parse_poly(&num, "--num")?,
                    parse_poly(&den, "--den")?,
                )
                .map_err(|e| e.to_string())?,
                _ => LaurentTail::thue_morse(),
            };
            let cf = extract_cf(&tail, count).map_err(|e| e.to_string())?;
            for (i, (a, pair)) in cf.quotients.iter().zip(&cf.pairs).enumerate() {
                Record::new()
                    .set("k", json!(i + 1))
                    .str("quotient", a)
                    .str("p", &pair.p)
                    .str("q", &pair.q)
                    .set("verified", json!(i < cf.verified_count))
                    .emit(fmt);
            }
            Record::new()
                .set("count", json!(cf.quotients.len()))
                .set("verified", json!(cf.verified_count))
                .set("terminated", json!(cf.terminated))
                .emit(fmt);
        }
        Command::Double { p, q } => {
            let pair = ConvergentPair::new(parse_poly(&p, "--p")?, parse_poly(&q, "--q")?);
            let doubled = double(&pair).map_err(|e| e.to_string())?;
            Record::new()
                .str("p", &doubled.p)
                .str("q", &doubled.q)
                .emit(fmt);
        }
        Command::Structure { n } => {
            let engine = cfg.engine();
            let report = structure_report(engine.canon(), n).map_err(|e| e.to_string())?;
            let mut rec = Record::new()
                .set("n", json!(n))
                .str("q_even", &report.q_even)
                .str("q_plus", &report.q_plus);
            for (k, ahat) in &report.quotients {
                rec = rec.str(&format!("ahat_{k}"), ahat);
            }
            rec.emit(fmt);
        }
        Command::Approx { n, t, a } => {
            let pair = cfg
                .engine()
                .tilde_pair(n, t, a)
                .map_err(|e| e.to_string())?;
            Record::new()
                .str("n", n)
                .str("t", t)
                .str("a", a)
                .str("p_int", &pair.p_int)
                .str("q_int", &pair.q_int)
                .str("d_p", &pair.d_p)
                .str("d_q", &pair.d_q)
                .emit(fmt);
        }
        Command::Quality { n, t, a, bits } => {
            let engine = cfg.engine();
            let pair = engine.tilde_pair(n, t, a).map_err(|e| e.to_string())?;
            let bits = cfg.bits(bits);
            let q = engine.quality(&pair, bits).map_err(|e| e.to_string())?;
            Record::new()
                .str("n", n)
                .str("t", t)
                .str("a", a)
                .str("lower", q.lower.to_rat())
                .str("upper", q.upper.to_rat())
                .str("bits", q.bits_used)
                .emit(fmt);
        }
        Command::Acceptable { p, t } => {
            let engine = cfg.engine();
            let cert = match t {
                Some(t) => engine.acceptable_at(p, t),
                None => engine.acceptable(p, cfg.t_max),
            }
            .map_err(|e| e.to_string())?;
            match cert {
                Some(c) => Record::new()
                    .str("p", p)
                    .str("t", c.t)
                    .str("q1_valuation", c.q1_valuation.value)
                    .set("qprime_nonzero", json!(c.qprime_nonzero))
                    .set("primroot", json!(c.primroot))
                    .emit(fmt),
                None => {
                    let pp2 = PrimePower::from_u64(p, 2).map_err(|e| e.to_string())?;
                    let primroot =
                        is_primitive_root(&Int::from(2), &pp2).map_err(|e| e.to_string())?;
                    Record::new()
                        .str("p", p)
                        .set("t", Value::Null)
                        .set("q1_valuation", Value::Null)
                        .set("qprime_nonzero", Value::Null)
                        .set("primroot", json!(primroot))
                        .emit(fmt)
                }
            }
        }
        Command::Witness { p, t, a, m } => {
            let w = cfg
                .engine()
                .witness(p, t, a, m)
                .map_err(|e| e.to_string())?;
            let ok = w.bound_ok && w.q_divisible && w.p_divisible;
            Record::new()
                .str("p", p)
                .str("t", t)
                .str("a", a)
                .str("m", m)
                .str("x_m", &w.x_m)
                .str("n_m", w.n_m)
                .set("bound_ok", json!(w.bound_ok))
                .set("q_divisible", json!(w.q_divisible))
                .set("p_divisible", json!(w.p_divisible))
                .emit(fmt);
            if !ok {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Reduce { n, t, a, p, k } => {
            let engine = cfg.engine();
            let pair = engine.tilde_pair(n, t, a).map_err(|e| e.to_string())?;
            let reduced = engine.reduce(&pair, p, k).map_err(|e| e.to_string())?;
            Record::new()
                .str("n", n)
                .str("t", t)
                .str("a", a)
                .str("divisor", Int::from(p).pow(k))
                .str("p_int", &reduced.p_int)
                .str("q_int", &reduced.q_int)
                .emit(fmt);
        }
        Command::Scan { a_min, a_max, pool } => {
            let rows = cfg
                .engine()
                .scan(a_min, a_max, &pool, cfg.t_max, cfg.n_max)
                .map_err(|e| e.to_string())?;
            for row in rows {
                match row.hit {
                    Some(hit) => Record::new()
                        .str("a", row.a)
                        .str("p", hit.p)
                        .str("n", hit.n)
                        .str("t", hit.t)
                        .emit(fmt),
                    None => Record::new()
                        .str("a", row.a)
                        .set("p", Value::Null)
                        .set("n", Value::Null)
                        .set("t", Value::Null)
                        .emit(fmt),
                }
            }
        }
        Command::RealCf {
            constant,
            bits,
            terms,
        } => {
            let bits = cfg.bits(bits);
            let value: DyadicInterval = match constant {
                Constant::Tau => tau_tm(bits),
                Constant::F2 => ftmm_value(2, bits).0,
                Constant::Contrast => doubled_kempner(bits),
            };
            let cf = real_cf(&value, terms);
            for (i, a) in cf.quotients.iter().enumerate() {
                Record::new().str("i", i).str("a", a).emit(fmt);
            }
            Record::new()
                .set("certified", json!(cf.quotients.len()))
                .set("requested", json!(cf.requested))
                .set("exhausted", json!(cf.exhausted))
                .emit(fmt);
        }
        Command::Selftest {
            items,
            corrupt_beta,
        } => {
            let st = SelftestConfig {
                precision_bits: cfg.precision_bits,
                corrupt_beta,
                t_max: cfg.t_max,
                n_max: cfg.n_max,
                size_limit_bits: cfg.size_limit_bits,
            };
            let outcomes = if items.is_empty() {
                run_all(&st)
            } else {
                for id in &items {
                    if !CRITERIA.iter().any(|(i, _)| i == id) {
                        return Err(format!("unknown selftest item {id}"));
                    }
                }
                items.iter().map(|&id| run_item(id, &st)).collect()
            };
            let mut all_ok = true;
            for o in &outcomes {
                all_ok &= o.passed;
                match fmt {
                    Format::Text => println!("{}", o.line()),
                    Format::Json => Record::new()
                        .set("id", json!(o.id))
                        .str("name", o.name)
                        .set("passed", json!(o.passed))
                        .set("millis", json!(o.millis))
                        .str("detail", &o.detail)
                        .emit(fmt),
                }
            }
            if !all_ok {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
    }
}
