use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use deadend::{format, parse, Budget, CensusRow, EndId, Engine, Error, GenStore};
use serde::Serialize;

const SCHEMA: &str = "deadend/1";
const CACHE_ENV: &str = "DEADEND_CACHE_DIR";

#[derive(Parser, Debug)]
#[command(name = "deadend", version, about = "Left dead ends in misère play")]
struct Cli {
    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads for enumeration.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    #[arg(long, global = true, default_value_t = Budget::DEFAULT_NODES)]
    budget_nodes: u64,
    #[arg(long, global = true)]
    budget_seconds: Option<f64>,
    /// Seed for sampled contexts.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Cross-check divisors against exhaustive search.
    #[arg(long, global = true)]
    oracle: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Dot,
    Tsv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compare two games.
    Compare { g: String, h: String },
    /// Print the canonical form.
    Canon { g: String },
    /// Terminal lengths, race, birthday, flexibility and option classes.
    Measure { g: String },
    /// Divisors, factorisations and rule checks.
    Factor { g: String },
    /// List the canonical ends born by a day.
    Enum {
        #[arg(long)]
        day: u32,
        #[arg(long)]
        census: bool,
        #[arg(long)]
        verify_unique: bool,
        /// Write the Hasse diagram to this file.
        #[arg(long)]
        hasse: Option<PathBuf>,
    },
    /// Counts of ends, atoms and molecules born by a day.
    Census {
        #[arg(long)]
        day: u32,
        /// Also print rows from this day on.
        #[arg(long)]
        from: Option<u32>,
    },
    /// Check unique factorisation of every game born by a day.
    Verify {
        #[arg(long)]
        day: u32,
    },
    /// Hasse diagram of the non-zero games born by a day.
    Hasse {
        #[arg(long)]
        day: u32,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Outcome oracle over general misère forms.
    Oracle {
        #[command(subcommand)]
        action: OracleCommand,
    },
}

#[derive(Subcommand, Debug)]
enum OracleCommand {
    /// Find a context separating G from H.
    Distinguish { g: String, h: String },
    /// Check outcome monotonicity of comparable games in random contexts.
    Sample {
        #[arg(long, default_value_t = 3)]
        day: u32,
        #[arg(long, default_value_t = 200)]
        contexts: usize,
        #[arg(long, default_value_t = 4)]
        max_birthday: u32,
        #[arg(long, default_value_t = 3)]
        max_options: usize,
    },
}

enum Failure {
    Usage(String),
    Findings(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Outcome = Result<String, Failure>;

struct Session {
    engine: Engine,
    budget: Budget,
    jobs: usize,
    format: Option<Format>,
    oracle: bool,
    seed: u64,
}

impl Session {
    fn format_or(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }

    fn game(&mut self, text: &str) -> Result<EndId, Failure> {
        parse(&mut self.engine, text).map_err(|e| Failure::Usage(format!("{text:?}: {e}")))
    }

    fn name(&self, g: EndId) -> String {
        format(&self.engine, g)
    }

    fn names(&self, gs: &[EndId]) -> Vec<String> {
        gs.iter().map(|&g| self.name(g)).collect()
    }
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serialisable");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct CompareJson {
    schema: &'static str,
    g: String,
    h: String,
    relation: &'static str,
    ge: bool,
    le: bool,
}

fn compare(s: &mut Session, g: &str, h: &str) -> Outcome {
    let (g, h) = (s.game(g)?, s.game(h)?);
    let (ge, le) = (s.engine.ge(g, h), s.engine.ge(h, g));
    let relation = match (ge, le) {
        (true, true) => "=",
        (true, false) => ">",
        (false, true) => "<",
        (false, false) => "||",
    };
    Ok(match s.format_or(Format::Text) {
        Format::Json => json(&CompareJson {
            schema: SCHEMA,
            g: s.name(g),
            h: s.name(h),
            relation,
            ge,
            le,
        }),
        _ => format!("G {relation} H\n"),
    })
}

#[derive(Serialize)]
struct CanonJson {
    schema: &'static str,
    input: String,
    canonical: String,
    options: Vec<String>,
}

fn canon(s: &mut Session, g: &str) -> Outcome {
    let g = s.game(g)?;
    let c = s.engine.canonical(g);
    Ok(match s.format_or(Format::Text) {
        Format::Json => json(&CanonJson {
            schema: SCHEMA,
            input: s.name(g),
            canonical: s.name(c),
            options: s.names(s.engine.options(c)),
        }),
        _ => format!("{}\n", s.name(c)),
    })
}

#[derive(Serialize)]
struct MeasureJson {
    schema: &'static str,
    game: String,
    terminal: Vec<u32>,
    race: u32,
    birthday: u32,
    flex: u32,
    integer: bool,
    flexible_run: Vec<String>,
    good_options: Vec<String>,
    racing_options: Vec<String>,
    stalling_options: Vec<String>,
    versatile_options: Vec<String>,
}

fn measure(s: &mut Session, g: &str) -> Outcome {
    let g = s.game(g)?;
    let g = s.engine.canonical(g);
    let good = s.engine.good_options(g).to_vec();
    let m = MeasureJson {
        schema: SCHEMA,
        game: s.name(g),
        terminal: s.engine.terminal_set(g).to_vec(),
        race: s.engine.race(g),
        birthday: s.engine.birthday(g),
        flex: s.engine.flex(g),
        integer: s.engine.is_integer(g),
        flexible_run: s.names(&s.engine.flexibility(g).run),
        good_options: s.names(&good),
        racing_options: s.names(&s.engine.racing_options(g)),
        stalling_options: s.names(&s.engine.stalling_options(g)),
        versatile_options: s.names(&s.engine.versatile_options(g)),
    };
    Ok(match s.format_or(Format::Text) {
        Format::Json => json(&m),
        _ => {
            let list = |v: &[String]| format!("[{}]", v.join(", "));
            let terminal: Vec<String> = m.terminal.iter().map(u32::to_string).collect();
            format!(
                "game: {}\nterminal: {{{}}}\nrace: {}\nbirthday: {}\nflex: {}\ninteger: {}\nflexible run: {}\ngood: {}\nracing: {}\nstalling: {}\nversatile: {}\n",
                m.game,
                terminal.join(","),
                m.race,
                m.birthday,
                m.flex,
                m.integer,
                m.flexible_run.join(" -> "),
                list(&m.good_options),
                list(&m.racing_options),
                list(&m.stalling_options),
                list(&m.versatile_options),
            )
        }
    })
}

#[derive(Serialize)]
struct FactorJson {
    schema: &'static str,
    game: String,
    atom: Option<bool>,
    divisors: Vec<String>,
    factorisations: Vec<Vec<String>>,
    unique: bool,
    longest: u32,
    bound: u32,
    atom_rule: Option<&'static str>,
    unique_rule: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle: Option<&'static str>,
}

fn factor(s: &mut Session, g: &str) -> Outcome {
    let g = s.game(g)?;
    let report = s.engine.factor_report(g);
    let g = report.target;
    let mut oracle = None;
    if s.oracle {
        let slow = s.engine.brute_force_divisors(g, &s.budget)?;
        let fast: Vec<(EndId, EndId)> = s.engine.factors(g).pairs().collect();
        let slow: Vec<(EndId, EndId)> = slow.into_iter().collect();
        if fast != slow {
            let fast: Vec<EndId> = fast.into_iter().map(|p| p.0).collect();
            let slow: Vec<EndId> = slow.into_iter().map(|p| p.0).collect();
            return Err(Failure::Findings(format!(
                "divisor search disagrees with exhaustive search for {}: {:?} vs {:?}",
                s.name(g),
                s.names(&fast),
                s.names(&slow)
            )));
        }
        oracle = Some("agrees");
    }
    let out = FactorJson {
        schema: SCHEMA,
        game: s.name(g),
        atom: (!g.is_zero()).then_some(report.divisors.len() == 2),
        divisors: s.names(&report.divisors),
        factorisations: report.factorisations.iter().map(|f| s.names(f.parts())).collect(),
        unique: report.unique,
        longest: report.longest,
        bound: report.bound,
        atom_rule: report.atom_rule.map(|r| r.tag()),
        unique_rule: report.unique_rule.map(|r| r.tag()),
        oracle,
    };
    Ok(match s.format_or(Format::Json) {
        Format::Text => {
            let mut text = format!("game: {}\n", out.game);
            if let Some(atom) = out.atom {
                text += &format!("atom: {atom}\n");
            }
            text += &format!("divisors: {}\n", out.divisors.join(", "));
            for f in &out.factorisations {
                text += &format!("factorisation: {}\n", if f.is_empty() { "0".into() } else { f.join(" + ") });
            }
            text += &format!("longest: {} (bound {})\n", out.longest, out.bound);
            if let Some(rule) = out.atom_rule {
                text += &format!("atom rule: {rule}\n");
            }
            if let Some(rule) = out.unique_rule {
                text += &format!("uniqueness rule: {rule}\n");
            }
            if let Some(o) = out.oracle {
                text += &format!("oracle: {o}\n");
            }
            text
        }
        _ => json(&out),
    })
}

fn cache_path(dir: &Path, day: u32) -> PathBuf {
    dir.join(format!("day{day}.lde"))
}

/// Loads the largest cached day not above `day`, if a cache is configured.
fn load_cache(s: &mut Session, day: u32) -> Result<(), Failure> {
    let Some(dir) = std::env::var_os(CACHE_ENV).map(PathBuf::from) else {
        return Ok(());
    };
    for d in (1..=day).rev() {
        let path = cache_path(&dir, d);
        if let Ok(bytes) = fs::read(&path) {
            s.engine
                .read_snapshot(&mut bytes.as_slice())
                .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            return Ok(());
        }
    }
    Ok(())
}

fn save_cache(s: &mut Session) -> Result<(), Failure> {
    let Some(dir) = std::env::var_os(CACHE_ENV).map(PathBuf::from) else {
        return Ok(());
    };
    let day = s.engine.generated_days();
    let path = cache_path(&dir, day);
    if day == 0 || path.exists() {
        return Ok(());
    }
    let games = s.engine.generate_day(day, &s.budget, s.jobs)?.games;
    let mut bytes = Vec::new();
    s.engine.write_snapshot(day, &games, &mut bytes)?;
    fs::create_dir_all(&dir)
        .and_then(|_| fs::write(&path, bytes))
        .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

#[derive(Serialize)]
struct CensusJson {
    day: u32,
    ends: Option<u64>,
    atoms: Option<u64>,
    molecules: Option<u64>,
    nontrivial_molecules: Option<u64>,
}

impl From<&CensusRow> for CensusJson {
    fn from(r: &CensusRow) -> Self {
        CensusJson {
            day: r.day,
            ends: r.ends,
            atoms: r.atoms,
            molecules: r.molecules,
            nontrivial_molecules: r.nontrivial_molecules,
        }
    }
}

#[derive(Serialize)]
struct CensusTable {
    schema: &'static str,
    rows: Vec<CensusJson>,
}

fn census_rows(s: &mut Session, from: u32, to: u32) -> String {
    let rows: Vec<CensusRow> = (from..=to).map(|d| s.engine.census(d, &s.budget, s.jobs)).collect();
    match s.format_or(Format::Tsv) {
        Format::Json => json(&CensusTable {
            schema: SCHEMA,
            rows: rows.iter().map(CensusJson::from).collect(),
        }),
        _ => {
            let mut out = format!("{}\n", CensusRow::TSV_HEADER);
            for r in &rows {
                out += &r.tsv();
                out.push('\n');
            }
            out
        }
    }
}

fn census(s: &mut Session, day: u32, from: Option<u32>) -> Outcome {
    load_cache(s, day)?;
    let out = census_rows(s, from.unwrap_or(day).min(day), day);
    save_cache(s)?;
    Ok(out)
}

#[derive(Serialize)]
struct Counterexample {
    game: String,
    factorisations: Vec<Vec<String>>,
}

#[derive(Serialize)]
struct VerifyJson {
    schema: &'static str,
    day: u32,
    checked: usize,
    counterexamples: Vec<Counterexample>,
}

/// Returns the report text and whether any counterexample was found.
fn verify_text(s: &mut Session, day: u32) -> Result<(String, bool), Failure> {
    let report = s.engine.verify_unique_factorisation(day, &s.budget, s.jobs)?;
    let counterexamples: Vec<Counterexample> = report
        .counterexamples
        .iter()
        .map(|(g, fs)| Counterexample {
            game: s.name(*g),
            factorisations: fs.iter().map(|f| s.names(f.parts())).collect(),
        })
        .collect();
    let found = !counterexamples.is_empty();
    let out = match s.format_or(Format::Text) {
        Format::Json => json(&VerifyJson {
            schema: SCHEMA,
            day,
            checked: report.checked,
            counterexamples,
        }),
        _ => {
            let mut out = format!(
                "day {day}: {} games checked, {} not uniquely factorisable\n",
                report.checked,
                counterexamples.len()
            );
            for c in &counterexamples {
                let fs: Vec<String> = c.factorisations.iter().map(|f| f.join(" + ")).collect();
                out += &format!("{}: {}\n", c.game, fs.join(" | "));
            }
            out
        }
    };
    Ok((out, found))
}

fn verify(s: &mut Session, day: u32) -> Outcome {
    load_cache(s, day)?;
    let (out, found) = verify_text(s, day)?;
    save_cache(s)?;
    if found {
        Err(Failure::Findings(out))
    } else {
        Ok(out)
    }
}

fn hasse(s: &mut Session, day: u32, output: Option<&Path>) -> Outcome {
    load_cache(s, day)?;
    let dot = s.engine.hasse_dot(day, &s.budget, s.jobs)?;
    save_cache(s)?;
    match output {
        Some(path) => {
            fs::write(path, dot).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            Ok(String::new())
        }
        None => Ok(dot),
    }
}

#[derive(Serialize)]
struct EnumJson {
    schema: &'static str,
    day: u32,
    games: Vec<String>,
}

fn enumerate(s: &mut Session, day: u32, census: bool, verify: bool, hasse_path: Option<&Path>) -> Outcome {
    load_cache(s, day)?;
    let games = s.engine.generate_day(day, &s.budget, s.jobs)?.games;
    let names = s.names(&games);
    let mut out = match s.format_or(Format::Text) {
        Format::Json => json(&EnumJson {
            schema: SCHEMA,
            day,
            games: names,
        }),
        _ => names.iter().map(|n| format!("{n}\n")).collect(),
    };
    if census {
        out += &census_rows(s, day, day);
    }
    let mut found = false;
    if verify {
        let (text, f) = verify_text(s, day)?;
        out += &text;
        found = f;
    }
    if let Some(path) = hasse_path {
        hasse(s, day, Some(path))?;
    }
    save_cache(s)?;
    if found {
        Err(Failure::Findings(out))
    } else {
        Ok(out)
    }
}

#[derive(Serialize)]
struct DistinguishJson {
    schema: &'static str,
    g: String,
    h: String,
    witness: Option<u32>,
    g_right_first: Option<String>,
    h_right_first: Option<String>,
}

fn distinguish(s: &mut Session, g: &str, h: &str) -> Outcome {
    let (g, h) = (s.game(g)?, s.game(h)?);
    let mut store = GenStore::new();
    let w = store.distinguish(&s.engine, g, h);
    Ok(match s.format_or(Format::Text) {
        Format::Json => json(&DistinguishJson {
            schema: SCHEMA,
            g: s.name(g),
            h: s.name(h),
            witness: w.map(|w| w.n),
            g_right_first: w.map(|w| format!("{:?}", w.g_outcome)),
            h_right_first: w.map(|w| format!("{:?}", w.h_outcome)),
        }),
        _ => match w {
            None => "indistinguishable by terminal lengths\n".to_string(),
            Some(w) => format!(
                "witness n = {}\nG + C_{}, Right first: {:?}\nH + C_{}, Right first: {:?}\n",
                w.n, w.n, w.g_outcome, w.n, w.h_outcome
            ),
        },
    })
}

#[derive(Serialize)]
struct SampleJson {
    schema: &'static str,
    day: u32,
    seed: u64,
    contexts: usize,
    comparable_pairs: usize,
    violations: Vec<[String; 2]>,
}

fn sample(s: &mut Session, day: u32, count: usize, max_birthday: u32, max_options: usize) -> Outcome {
    let games = s.engine.generate_day(day, &s.budget, s.jobs)?.games;
    let mut store = GenStore::new();
    let contexts = store.random_contexts(s.seed, count, max_birthday, max_options);
    let violations = store.monotonicity_violations(&mut s.engine, &games, &contexts);
    let mut comparable = 0;
    for &g in &games {
        for &h in &games {
            if s.engine.ge(g, h) {
                comparable += 1;
            }
        }
    }
    let pairs: Vec<[String; 2]> = violations.iter().map(|v| [s.name(v.g), s.name(v.h)]).collect();
    let out = match s.format_or(Format::Text) {
        Format::Json => json(&SampleJson {
            schema: SCHEMA,
            day,
            seed: s.seed,
            contexts: count,
            comparable_pairs: comparable,
            violations: pairs.clone(),
        }),
        _ => {
            let mut out = format!(
                "{comparable} comparable pairs born by day {day}, {count} contexts (seed {}), {} violations\n",
                s.seed,
                pairs.len()
            );
            for [g, h] in &pairs {
                out += &format!("{g} >= {h} violated\n");
            }
            out
        }
    };
    if pairs.is_empty() {
        Ok(out)
    } else {
        Err(Failure::Findings(out))
    }
}

fn run(cli: Cli) -> Outcome {
    let mut s = Session {
        engine: Engine::new(),
        budget: Budget::new(cli.budget_nodes, cli.budget_seconds),
        jobs: cli.jobs.max(1),
        format: cli.format,
        oracle: cli.oracle,
        seed: cli.seed,
    };
    match &cli.command {
        Command::Compare { g, h } => compare(&mut s, g, h),
        Command::Canon { g } => canon(&mut s, g),
        Command::Measure { g } => measure(&mut s, g),
        Command::Factor { g } => factor(&mut s, g),
        Command::Enum {
            day,
            census,
            verify_unique,
            hasse,
        } => enumerate(&mut s, *day, *census, *verify_unique, hasse.as_deref()),
        Command::Census { day, from } => census(&mut s, *day, *from),
        Command::Verify { day } => verify(&mut s, *day),
        Command::Hasse { day, output } => {
            if matches!(s.format, Some(f) if f != Format::Dot) {
                return Err(Failure::Usage("hasse only supports --format dot".into()));
            }
            hasse(&mut s, *day, output.as_deref())
        }
        Command::Oracle { action } => match action {
            OracleCommand::Distinguish { g, h } => distinguish(&mut s, g, h),
            OracleCommand::Sample {
                day,
                contexts,
                max_birthday,
                max_options,
            } => sample(&mut s, *day, *contexts, *max_birthday, *max_options),
        },
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let mut stdout = std::io::stdout().lock();
    match run(cli) {
        Ok(out) => {
            let _ = stdout.write_all(out.as_bytes());
            ExitCode::SUCCESS
        }
        Err(Failure::Findings(out)) => {
            let _ = stdout.write_all(out.as_bytes());
            ExitCode::from(2)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
