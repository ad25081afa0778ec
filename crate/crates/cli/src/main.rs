use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use semgraph::ccg::{show_matches, MatchSet};
use semgraph::composer::{self, Engine, Instance, Lexicon, ParsedReading, SyntaxConfig};
use semgraph::eval::Evaluator;
use semgraph::model::Model;
use semgraph::resolver::{self, Outcome, Resolution, ResolvedReading, Resolver};
use semgraph::tlg::Ruleset;
use semgraph::{Error, Semgraph, SynType};

#[derive(Parser)]
#[command(name = "semgraph", version, about = "Parse tagged sentences into semgraphs and evaluate them against models")]
struct Cli {
    /// JSON lexicon (defaults to the built-in one).
    #[arg(long, global = true)]
    lexicon: Option<PathBuf>,
    /// Reduction goal.
    #[arg(long, global = true, default_value = "s")]
    goal: String,
    #[arg(long, global = true, value_enum, default_value_t = EngineArg::Ccg)]
    engine: EngineArg,
    /// Hole bound for the TLG search.
    #[arg(long, global = true, default_value_t = 2)]
    max_holes: usize,
    #[arg(long, global = true, value_enum, default_value_t = RulesetArg::Full)]
    ruleset: RulesetArg,
    #[arg(long, global = true, default_value_t = 3)]
    tower_bound: usize,
    /// Resolution script (JSON list of {token_index, negative_source, resolve_to}).
    #[arg(long, global = true, conflicts_with = "enumerate")]
    resolve: Option<PathBuf>,
    /// List resolution candidates with their verdicts instead of composing.
    #[arg(long, global = true)]
    enumerate: bool,
    /// Also try every precedence candidate for open indefinites and names.
    #[arg(long, global = true)]
    scope_indefinites: bool,
    /// Also report readings rejected by binding or validity.
    #[arg(long, global = true)]
    all: bool,
    #[arg(long, global = true)]
    model: Option<PathBuf>,
    /// Print a witness valuation for true verdicts.
    #[arg(long, global = true)]
    witness: bool,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Readings of a sentence of form/POS tokens.
    Parse { sentence: String },
    /// Truth of a sentence's readings, or of a semgraph JSON file, in a model.
    Eval {
        input: String,
        /// Report every world, not just the reference world.
        #[arg(long)]
        per_world: bool,
    },
    /// Write each reading's artifacts into --out.
    Export { sentence: String },
    /// Check every lexicon entry's sort against its type.
    CheckLexicon,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EngineArg {
    Ccg,
    Tlg,
    Both,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RulesetArg {
    Full,
    Fragment,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Dot,
}

/// Why the run stopped.
enum Failure {
    Input(String),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::LexiconMiss(_)
            | Error::TypeSyntax(_)
            | Error::ToneShape(_)
            | Error::Json(_)
            | Error::Model(_)
            | Error::Uninterpretable(_)
            | Error::Unresolved(..)
            | Error::MalformedQuantification(_)
            | Error::MalformedCoordination(_)
            | Error::SequentSyntax(_) => Failure::Input(e.to_string()),
            other => Failure::Internal(other.to_string()),
        }
    }
}

type Run<T> = std::result::Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Input(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(m)) => {
            eprintln!("internal error: {m}");
            ExitCode::from(3)
        }
    }
}

fn read(path: &Path) -> Run<String> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn lexicon(cli: &Cli) -> Run<Lexicon> {
    let lex = match &cli.lexicon {
        Some(p) => Lexicon::from_json_str(&read(p)?)?,
        None => Lexicon::builtin(),
    };
    lex.check().map_err(|e| Failure::Input(format!("lexicon: {e}")))?;
    Ok(lex)
}

fn config(cli: &Cli, engine: Engine) -> SyntaxConfig {
    SyntaxConfig {
        engine,
        tower_bound: cli.tower_bound,
        max_holes: cli.max_holes,
        ruleset: match cli.ruleset {
            RulesetArg::Full => Ruleset::Full,
            RulesetArg::Fragment => Ruleset::Fragment,
        },
    }
}

fn run(cli: &Cli) -> Run<bool> {
    match &cli.command {
        Command::CheckLexicon => {
            let lex = lexicon(cli)?;
            println!("{} entries ok", lex.entries.len());
            Ok(true)
        }
        Command::Parse { sentence } => {
            let analysis = analyze(cli, sentence)?;
            emit(cli, &analysis)?;
            Ok(analysis.has_reading())
        }
        Command::Export { sentence } => {
            let analysis = analyze(cli, sentence)?;
            export(cli, &analysis)?;
            Ok(analysis.has_reading())
        }
        Command::Eval { input, per_world } => eval(cli, input, *per_world),
    }
}

struct Full {
    reading: usize,
    words: Vec<String>,
    parsed: ParsedReading,
    resolved: ResolvedReading,
}

struct Listing {
    reading: usize,
    matches: String,
    lines: Vec<String>,
}

struct Analysis {
    full: Vec<Full>,
    listings: Vec<Listing>,
    syntactic: usize,
}

impl Analysis {
    fn has_reading(&self) -> bool {
        if self.listings.is_empty() {
            self.full.iter().any(|f| f.resolved.acceptable())
        } else {
            self.syntactic > 0
        }
    }
}

fn analyze(cli: &Cli, sentence: &str) -> Run<Analysis> {
    let lex = lexicon(cli)?;
    let goal: SynType = sentence_goal(&cli.goal)?;
    let tokens = composer::tokenize(sentence)?;
    let variants = composer::instantiate(&lex, &tokens)?;
    let script: Vec<Resolution> = match &cli.resolve {
        Some(p) => resolver::load_script(&read(p)?)?,
        None => Vec::new(),
    };
    let res = Resolver::new(lex.eventive_labels());
    let mut out = Analysis { full: Vec::new(), listings: Vec::new(), syntactic: 0 };
    for choice in composer::variant_choices(&variants) {
        let parsed = syntactic_readings(cli, &choice, &goal)?;
        for p in parsed {
            out.syntactic += 1;
            let n = out.syntactic;
            if cli.enumerate {
                out.listings.push(listing(n, &res, &choice, &p, &script));
                continue;
            }
            let words: Vec<String> = choice.iter().map(|i| i.form.clone()).collect();
            for resolved in res.resolve(&choice, &p.syntax, &script, cli.scope_indefinites) {
                if cli.all || resolved.acceptable() {
                    out.full.push(Full { reading: n, words: words.clone(), parsed: p.clone(), resolved });
                }
            }
        }
    }
    Ok(out)
}

fn sentence_goal(text: &str) -> Run<SynType> {
    text.parse().map_err(|e: Error| Failure::Input(format!("goal: {e}")))
}

fn syntactic_readings(cli: &Cli, choice: &[&Instance], goal: &SynType) -> Run<Vec<ParsedReading>> {
    match cli.engine {
        EngineArg::Ccg => Ok(composer::parse_readings(choice, goal, config(cli, Engine::Ccg))?),
        EngineArg::Tlg => Ok(composer::parse_readings(choice, goal, config(cli, Engine::Tlg))?),
        EngineArg::Both => {
            let ccg = composer::parse_readings(choice, goal, config(cli, Engine::Ccg))?;
            let tlg = composer::parse_readings(choice, goal, config(cli, Engine::Tlg))?;
            let a: BTreeSet<MatchSet> = ccg.iter().map(|r| r.syntax.matches.clone()).collect();
            let b: BTreeSet<MatchSet> = tlg.iter().map(|r| r.syntax.matches.clone()).collect();
            if a != b {
                let occs = ccg.first().or(tlg.first()).map(|r| r.syntax.occurrences.clone()).unwrap_or_default();
                let show = |s: &BTreeSet<MatchSet>| s.iter().map(|m| show_matches(m, &occs)).collect::<Vec<_>>().join(" | ");
                return Err(Failure::Internal(format!(
                    "engines disagree: ccg {{{}}} vs tlg {{{}}}",
                    show(&a),
                    show(&b)
                )));
            }
            Ok(ccg)
        }
    }
}

fn listing(n: usize, res: &Resolver, choice: &[&Instance], p: &ParsedReading, script: &[Resolution]) -> Listing {
    let mut lines = Vec::new();
    for req in resolver::requests(choice) {
        let kind = match req.kind {
            resolver::RequestKind::Coreference => "co-reference",
            resolver::RequestKind::Precedence => "precedence",
        };
        lines.push(format!("{}_{} ({}) {kind}", req.negative_source, req.token_index, choice[req.token_index].form));
        for c in res.enumerate_candidates(&req, choice, &p.syntax, script) {
            let target = match c.target {
                resolver::ResolveTo::Source { token_index, source } => {
                    format!("{source}_{token_index} ({})", choice[token_index].form)
                }
                resolver::ResolveTo::Drop(_) => "drop".to_string(),
            };
            let verdict = match &c.outcome {
                Outcome::Accepted => "ok".to_string(),
                Outcome::Binding(cs) => cs.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(", "),
                Outcome::Invalid(d) => format!("invalid: {}", d.join("; ")),
                Outcome::Conflict(m) => format!("conflict: {m}"),
            };
            lines.push(format!("  -> {target}: {verdict}"));
        }
    }
    Listing { reading: n, matches: show_matches(&p.syntax.matches, &p.syntax.occurrences), lines }
}

fn reading_json(f: &Full) -> Value {
    let r = &f.resolved;
    json!({
        "reading": f.reading,
        "tokens": f.words,
        "matches": f.parsed.syntax.matches.iter().map(|&(a, b)| [a, b]).collect::<Vec<_>>(),
        "derivation": f.parsed.derivation_json,
        "resolutions": r.resolutions,
        "graph": r.composition.graph.to_json(),
        "valid": r.validation.ok(),
        "diagnostics": r.validation.diagnostics,
        "binding": r.binding.iter().map(|v| json!({
            "token": v.link.token,
            "negative_source": v.link.negative_source,
            "violations": v.violations.iter().map(|x| json!({
                "constraint": x.constraint,
                "pair": x.pair.to_string(),
            })).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
    })
}

fn reading_text(f: &Full) -> String {
    let r = &f.resolved;
    let mut s = format!("reading {}: {}\n", f.reading, f.words.join(" "));
    s += &format!("matches: {}\n", show_matches(&f.parsed.syntax.matches, &f.parsed.syntax.occurrences));
    s += &f.parsed.derivation;
    if !s.ends_with('\n') {
        s.push('\n');
    }
    if !r.resolutions.is_empty() {
        let lines: Vec<String> = r.resolutions.iter().map(|l| l.to_string()).collect();
        s += &format!("resolution: {}\n", lines.join(" "));
    }
    s += &format!("graph:\n{}", r.composition.graph);
    if !s.ends_with('\n') {
        s.push('\n');
    }
    if r.validation.ok() {
        s += "valid\n";
    } else {
        s += &format!("invalid: {}\n", r.validation.diagnostics.join("; "));
    }
    for v in &r.binding {
        if !v.valid() {
            for x in &v.violations {
                s += &format!("binding {}_{}: {} on {}\n", v.link.negative_source, v.link.token, x.constraint, x.pair);
            }
        }
    }
    s
}

fn emit(cli: &Cli, a: &Analysis) -> Run<()> {
    if cli.enumerate {
        for l in &a.listings {
            println!("reading {}: {}", l.reading, l.matches);
            for line in &l.lines {
                println!("  {line}");
            }
        }
        return Ok(());
    }
    match cli.format {
        Format::Text => {
            for f in &a.full {
                println!("{}", reading_text(f));
            }
            if a.full.is_empty() {
                println!("no readings ({} syntactic)", a.syntactic);
            }
        }
        Format::Json => {
            let v: Vec<Value> = a.full.iter().map(reading_json).collect();
            println!("{}", serde_json::to_string_pretty(&v).map_err(|e| Failure::Internal(e.to_string()))?);
        }
        Format::Dot => {
            for f in &a.full {
                println!("{}", f.resolved.composition.graph.to_dot());
            }
        }
    }
    if let Some(path) = &cli.model {
        let model = Model::from_json_str(&read(path)?)?;
        let ev = Evaluator::new(&model);
        for f in a.full.iter().filter(|f| f.resolved.acceptable()) {
            report_truth(cli, &ev, &format!("reading {}", f.reading), &f.resolved.composition.graph, false)?;
        }
    }
    Ok(())
}

fn export(cli: &Cli, a: &Analysis) -> Run<()> {
    let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir).map_err(|e| Failure::Input(format!("{}: {e}", dir.display())))?;
    for (k, f) in a.full.iter().enumerate() {
        let (ext, body) = match cli.format {
            Format::Dot => ("dot", f.resolved.composition.graph.to_dot()),
            Format::Json => (
                "json",
                serde_json::to_string_pretty(&reading_json(f)).map_err(|e| Failure::Internal(e.to_string()))?,
            ),
            Format::Text => ("txt", reading_text(f)),
        };
        let path = dir.join(format!("reading-{}.{ext}", k + 1));
        fs::write(&path, body).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
        println!("{}", path.display());
    }
    Ok(())
}

fn report_truth(cli: &Cli, ev: &Evaluator, label: &str, g: &Semgraph, per_world: bool) -> Run<bool> {
    let model = ev.model;
    let worlds: Vec<usize> = if per_world { (0..model.worlds.len()).collect() } else { vec![model.reference_world] };
    let mut at_reference = false;
    for w in worlds {
        let witness = ev.witness_at(w, g)?;
        if w == model.reference_world {
            at_reference = witness.is_some();
        }
        println!("{label} @ {}: {}", model.worlds[w].name, witness.is_some());
        if let (true, Some(val)) = (cli.witness, witness) {
            for (v, set) in val {
                println!("  {v} = {}", model.describe(set));
            }
        }
    }
    Ok(at_reference)
}

fn eval(cli: &Cli, input: &str, per_world: bool) -> Run<bool> {
    let path = cli.model.as_ref().ok_or_else(|| Failure::Input("eval needs --model".into()))?;
    let model = Model::from_json_str(&read(path)?)?;
    let ev = Evaluator::new(&model);
    let as_file = Path::new(input);
    if as_file.is_file() {
        let g = Semgraph::from_json_str(&read(as_file)?)?;
        ev.interpretable_root(&g)?;
        report_truth(cli, &ev, "graph", &g, per_world)?;
        return Ok(true);
    }
    let a = analyze(cli, input)?;
    let mut any = false;
    for f in a.full.iter().filter(|f| f.resolved.acceptable()) {
        any = true;
        report_truth(cli, &ev, &format!("reading {}", f.reading), &f.resolved.composition.graph, per_world)?;
    }
    Ok(any)
}
