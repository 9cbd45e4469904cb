use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use mkorders::catalog;
use mkorders::enumerate;
use mkorders::markov::validate_str;
use mkorders::order::OrderOracle;
use mkorders::pingpong;
use mkorders::realization::{random_homeomorphism, Realization};
use mkorders::word::ball;
use mkorders::{Error, GroupWord, MarkovPattern};

#[derive(Parser)]
#[command(
    name = "mkorders",
    version,
    about = "Markov systems and isolated circular orders of <a, b | a^2 = b^3>"
)]
struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Worker threads (0 = one per core).
    #[arg(long, global = true, env = "MKORDERS_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check conditions (A)-(E) on `word[:shift]`.
    Validate {
        pattern: String,
        #[arg(long)]
        json: bool,
    },
    /// The cycle of principal gaps.
    Cycle {
        pattern: String,
        #[arg(long)]
        dot: bool,
    },
    /// All Markov patterns of multiplicity k, up to rotation.
    Enumerate {
        #[arg(short)]
        k: usize,
        #[arg(long)]
        naive: bool,
        #[arg(long)]
        json: bool,
    },
    /// Orbits under label swap and orientation reversal.
    Classify {
        #[arg(short)]
        k: usize,
        #[arg(long)]
        json: bool,
    },
    /// Exact PL realization of a pattern or catalog key.
    Realize {
        pattern: String,
        #[arg(long)]
        json: bool,
        /// Conjugate by a random PL homeomorphism drawn from --seed.
        #[arg(long)]
        scramble: bool,
    },
    /// c(g1, g2, g3) in the induced order.
    Order {
        pattern: String,
        #[arg(short = 'g', num_args = 1, required = true)]
        g: Vec<String>,
    },
    /// Cyclic order of the ball of radius r around x0.
    Config {
        pattern: String,
        #[arg(long)]
        ball: usize,
    },
    /// Ping-pong sets, inclusions and a neighbourhood certificate.
    Pingpong {
        pattern: String,
        #[arg(long, default_value_t = pingpong::DEFAULT_MAX_LEVEL)]
        max_level: u32,
        #[arg(long)]
        json: bool,
    },
    /// Compare c(σ0 g1, σ0 g2, σ0 g3) with -c(g1, g2, g3) on a ball.
    #[command(name = "sigma0-check")]
    Sigma0Check {
        pattern: String,
        #[arg(long, default_value_t = 2)]
        radius: usize,
        #[arg(long)]
        json: bool,
    },
    /// Print a catalog system: standard, degree9 or lift:<k>.
    Example { key: String },
    /// Recover the pattern from a realization JSON file.
    Extract {
        file: PathBuf,
        #[arg(long, default_value_t = 3)]
        depth: usize,
    },
}

/// Outcome of a subcommand: text to print and whether it found a problem.
struct Out {
    text: String,
    ok: bool,
}

impl Out {
    fn ok(text: String) -> Out {
        Out { text, ok: true }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::BadLetter(_) | Error::Malformed(_) | Error::InvalidInput(_) | Error::Json(_) => 2,
        Error::DepthLimit { .. } => 2,
        _ => 1,
    }
}

fn pattern(s: &str) -> mkorders::Result<MarkovPattern> {
    match catalog::by_key(s) {
        Ok(p) => Ok(p),
        Err(Error::InvalidInput(_)) if !s.contains("lift:") => s.parse(),
        Err(e) => Err(e),
    }
}

fn realization(s: &str) -> mkorders::Result<Realization> {
    Realization::build(&pattern(s)?)
}

fn words(list: &[String]) -> mkorders::Result<Vec<GroupWord>> {
    list.iter().map(|w| w.parse::<GroupWord>()).collect()
}

fn pretty(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("json")
}

fn run(cli: &Cli) -> mkorders::Result<Out> {
    match &cli.cmd {
        Cmd::Validate { pattern, json } => {
            let r = validate_str(pattern)?;
            let text = if *json {
                pretty(&r.to_json())
            } else {
                let mut s = format!(
                    "word  {}\nk     {}\n",
                    mkorders::markov::word_string(&r.word),
                    r.k
                );
                match r.shift {
                    Some(m) => writeln!(s, "shift {m}").unwrap(),
                    None => writeln!(s, "shift -").unwrap(),
                }
                if let Some(c) = &r.principal_cycle {
                    writeln!(s, "f1    {}", c.f1).unwrap();
                }
                if r.is_valid() {
                    s.push_str("valid\n");
                } else {
                    for v in &r.violations {
                        writeln!(s, "violation: {v}").unwrap();
                    }
                }
                s
            };
            Ok(Out {
                text,
                ok: r.is_valid(),
            })
        }
        Cmd::Cycle { pattern: p, dot } => {
            let c = pattern(p)?.principal_cycle();
            if *dot {
                return Ok(Out::ok(c.to_dot()));
            }
            let mut s = format!("start gap {}\nf1 {}\n", c.start_gap, c.f1);
            for st in &c.steps {
                writeln!(s, "gap {:3} --{}-->", st.gap, st.via).unwrap();
            }
            Ok(Out::ok(s))
        }
        Cmd::Enumerate { k, naive, json } => {
            let r = enumerate::run(*k, *naive)?;
            if *json {
                return Ok(Out::ok(pretty(&json!({
                    "k": r.k,
                    "patterns": r.patterns.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
                    "orbits": r.orbits.iter().map(|o| o.iter().map(|p| p.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
                }))));
            }
            let mut s = format!(
                "k = {}: {} patterns, {} orbits\n",
                r.k,
                r.patterns.len(),
                r.orbits.len()
            );
            for p in &r.patterns {
                writeln!(s, "{p}").unwrap();
            }
            Ok(Out::ok(s))
        }
        Cmd::Classify { k, json } => {
            let classes = enumerate::classify(&enumerate::enumerate(*k)?);
            if *json {
                return Ok(Out::ok(pretty(&serde_json::to_value(&classes)?)));
            }
            let mut s = format!(
                "k = {k}: {} classes (orbits of label swap and reversal)\n",
                classes.len()
            );
            for (i, c) in classes.iter().enumerate() {
                writeln!(
                    s,
                    "class {i}: f1 letter counts {:?}, cycle {}",
                    c.f1_letter_counts, c.cycle_signature
                )
                .unwrap();
                for m in &c.members {
                    writeln!(s, "  {m}").unwrap();
                }
            }
            Ok(Out::ok(s))
        }
        Cmd::Realize {
            pattern: p,
            json,
            scramble,
        } => {
            let mut r = realization(p)?;
            if *scramble {
                let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
                r = r.conjugate(&random_homeomorphism(&mut rng, 6, 997));
            }
            let problems = r.check_conditions();
            if *json {
                return Ok(Out {
                    text: pretty(&r.to_json()),
                    ok: problems.is_empty(),
                });
            }
            let mut s = String::new();
            for (t, a) in r.labels().iter().zip(r.intervals()) {
                writeln!(s, "[{t}] {a}").unwrap();
            }
            writeln!(s, "a  {}", r.a()).unwrap();
            writeln!(s, "b  {}", r.b()).unwrap();
            writeln!(s, "x0 {}  (gap {})", r.x0(), r.start_gap()).unwrap();
            writeln!(s, "f1 {}", r.f1()).unwrap();
            for e in &problems {
                writeln!(s, "problem: {e}").unwrap();
            }
            Ok(Out {
                text: s,
                ok: problems.is_empty(),
            })
        }
        Cmd::Order { pattern: p, g } => {
            if g.len() != 3 {
                return Err(Error::InvalidInput(format!(
                    "need exactly three -g words, got {}",
                    g.len()
                )));
            }
            let gs = words(g)?;
            let r = realization(p)?;
            let radius = gs.iter().map(GroupWord::len).max().unwrap_or(0);
            let o = OrderOracle::new(&r, radius)?;
            Ok(Out::ok(format!("{}\n", o.order(&gs[0], &gs[1], &gs[2])?)))
        }
        Cmd::Config {
            pattern: p,
            ball: radius,
        } => {
            let r = realization(p)?;
            let o = OrderOracle::new(&r, *radius)?;
            let cyc = o.configuration(&ball(*radius))?;
            let list: Vec<String> = cyc.iter().map(|g| g.to_string()).collect();
            Ok(Out::ok(format!("{}\n", list.join(" "))))
        }
        Cmd::Pingpong {
            pattern: p,
            max_level,
            json,
        } => {
            let r = realization(p)?;
            let cert = pingpong::certify(&r, *max_level)?;
            if *json {
                return Ok(Out::ok(pretty(&cert.to_json())));
            }
            let mut s = format!(
                "h1 = {}, h2 = {}\nlevel {}\nslack {}\nmargin {}\n",
                cert.h[0], cert.h[1], cert.level, cert.slack, cert.margin
            );
            for (i, name) in pingpong::SLOT_NAMES.iter().enumerate() {
                let arcs: Vec<String> = cert.arcs[i]
                    .iter()
                    .map(|a| format!("({}, {})", a.start, a.end()))
                    .collect();
                writeln!(s, "{name}: {}", arcs.join(" ")).unwrap();
            }
            writeln!(
                s,
                "x0 {} outside all closures; no h-word of <= 6 syllables fixes it",
                cert.x0
            )
            .unwrap();
            Ok(Out::ok(s))
        }
        Cmd::Sigma0Check {
            pattern: p,
            radius,
            json,
        } => {
            let r = realization(p)?;
            let o = OrderOracle::new(&r, *radius)?;
            let report = o.check_sigma0_negation(*radius)?;
            if *json {
                return Ok(Out {
                    text: pretty(&serde_json::to_value(&report)?),
                    ok: report.passed(),
                });
            }
            let mut s = format!(
                "{} triples from ball({radius}), {} violations\n",
                report.checked,
                report.violations.len()
            );
            for v in report.violations.iter().take(10) {
                let args: Vec<String> = v.args.iter().map(|g| g.to_string()).collect();
                writeln!(
                    s,
                    "  ({}): c(σ0·) = {}, -c = {}",
                    args.join(", "),
                    v.lhs,
                    v.rhs
                )
                .unwrap();
            }
            Ok(Out {
                text: s,
                ok: report.passed(),
            })
        }
        Cmd::Example { key } => {
            let p = catalog::by_key(key)?;
            let c = p.principal_cycle();
            Ok(Out::ok(format!(
                "{p}\nk = {}, rotation number of b = {}/{}\nf1 = {}\n",
                p.k(),
                p.shift(),
                p.len(),
                c.f1
            )))
        }
        Cmd::Extract { file, depth } => {
            let text = std::fs::read_to_string(file)
                .map_err(|e| Error::InvalidInput(format!("{}: {e}", file.display())))?;
            let v: serde_json::Value = serde_json::from_str(&text)?;
            let r = Realization::from_json(&v)?;
            Ok(Out::ok(format!("{}\n", r.extract_pattern(*depth)?)))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        // Fails only if a pool already exists, which cannot happen here.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    match run(&cli) {
        Ok(out) => {
            print!("{}", out.text);
            if !out.text.ends_with('\n') {
                println!();
            }
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
