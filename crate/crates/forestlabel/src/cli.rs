//! The `forestlabel` command line.
//!
//! Exit status is 0 on success, 1 when a verification or bound check
//! fails, and 2 on malformed input or flags.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use forestlabel_core::bits::ceil_log2;
use forestlabel_core::bounds::{
    certify_forced_distinct, count_distinct_emitted, counting_oracle, generate,
    lemma3_intersection_check, yao_expected_max, FamilyKind, FamilySpec, Instance, Theorem,
};
use forestlabel_core::dynamic::{DynamicEncoder, DynamicKind};
use forestlabel_core::graph::random_bounded_degree;
use forestlabel_core::{build_from_events, random_forest, QueryKind, StaticScheme};

use crate::format::{
    format_label_line, labels_header, parse_events, parse_forest, parse_labels, write_events,
    write_forest, write_graph_events, EventFile,
};
use crate::report::{self, Entry, SizeTable};
use crate::verify::{fuzz, AnyScheme};

#[derive(Parser, Debug)]
#[command(name = "forestlabel", version, about = "Labeling schemes for rooted forests")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a family member, or the whole family, as forest or event files
    GenFamily {
        #[command(flatten)]
        family: FamilyArgs,
        /// File for a single member; directory for a whole family
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Label a forest file with a static scheme
    Label {
        #[arg(long)]
        scheme: String,
        #[arg(long)]
        input: PathBuf,
        /// Overrides the n in the forest header
        #[arg(long)]
        n: Option<u64>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run a dynamic encoder over an event file, one label line per insertion
    Stream {
        #[arg(long)]
        scheme: String,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Answer queries from two label lines
    Query {
        /// Label file; without ids it must hold exactly two label lines
        #[arg(long)]
        input: PathBuf,
        /// Defaults to the label file header
        #[arg(long)]
        scheme: Option<String>,
        #[arg(long)]
        n: Option<u64>,
        /// Comma-separated; defaults to every query the scheme answers
        #[arg(long)]
        queries: Option<String>,
        /// Ids of the two labels to compare
        ids: Vec<String>,
    },
    /// Fuzz a scheme against the oracle and print the mismatch count
    Verify {
        #[arg(long)]
        scheme: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        trials: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        queries: Option<String>,
    },
    /// Certify lower bounds and print measured label sizes
    Bounds {
        #[command(flatten)]
        family: OptionalFamily,
        /// Comma-separated queries for witness certification
        #[arg(long)]
        queries: Option<String>,
        /// Dynamic encoder for the emitted-label cross-check (and the
        /// expectation bound on Fn); static scheme for Fab/Gab
        #[arg(long)]
        scheme: Option<String>,
        /// Also print measured maximum label sizes per scheme
        #[arg(long)]
        table: bool,
        /// Seed for the size table's random inputs
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args, Debug, Clone)]
struct FamilyArgs {
    #[arg(long)]
    family: String,
    #[arg(long)]
    n: u64,
    #[command(flatten)]
    params: Params,
}

#[derive(Args, Debug, Clone)]
struct OptionalFamily {
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    n: Option<u64>,
    #[command(flatten)]
    params: Params,
}

#[derive(Args, Debug, Clone, Default)]
struct Params {
    #[arg(long)]
    k: Option<u64>,
    #[arg(long)]
    j: Option<u64>,
    #[arg(long)]
    a: Option<u64>,
    #[arg(long)]
    b: Option<u64>,
    #[arg(long)]
    x: Option<u64>,
    /// A2 subset as a bitmask over path positions
    #[arg(long)]
    s: Option<u64>,
}

#[derive(Debug)]
enum Failure {
    /// Exit 1.
    Check(String),
    /// Exit 2.
    Input(String),
}

type Outcome = Result<(), Failure>;

fn input(e: impl std::fmt::Display) -> Failure {
    Failure::Input(e.to_string())
}

fn spec_of(kind: &str, n: u64, p: &Params) -> Result<FamilySpec, Failure> {
    let kind = FamilyKind::parse(kind).ok_or_else(|| input(format!("unknown family {kind:?}")))?;
    Ok(FamilySpec {
        kind,
        n,
        k: p.k,
        j: p.j,
        a: p.a,
        b: p.b,
        x: p.x,
        s: p.s,
    })
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn emit(out: &mut dyn Write, path: Option<&Path>, text: &str) -> Outcome {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| input(format!("{}: {e}", p.display()))),
        None => out.write_all(text.as_bytes()).map_err(input),
    }
}

fn parse_queries(csv: Option<&str>, default: Vec<QueryKind>) -> Result<Vec<QueryKind>, Failure> {
    match csv {
        None => Ok(default),
        Some(csv) => csv
            .split(',')
            .map(|q| {
                let q = q.trim().to_ascii_lowercase();
                QueryKind::parse(&q).ok_or_else(|| input(format!("unknown query {q:?}")))
            })
            .collect(),
    }
}

/// Runs the command line; returns the process exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    let result = match cli.command {
        Command::GenFamily { family, output } => gen_family(&family, output.as_deref(), out),
        Command::Label {
            scheme,
            input,
            n,
            output,
        } => label(&scheme, &input, n, output.as_deref(), out),
        Command::Stream {
            scheme,
            input,
            output,
        } => stream(&scheme, &input, output.as_deref(), out),
        Command::Query {
            input,
            scheme,
            n,
            queries,
            ids,
        } => query(&input, scheme.as_deref(), n, queries.as_deref(), &ids, out),
        Command::Verify {
            scheme,
            n,
            trials,
            seed,
            queries,
        } => verify(&scheme, n, trials, seed, queries.as_deref(), out),
        Command::Bounds {
            family,
            queries,
            scheme,
            table,
            seed,
            json,
        } => bounds(&family, queries.as_deref(), scheme.as_deref(), table, seed, json, out),
    };
    match result {
        Ok(()) => 0,
        Err(Failure::Check(msg)) => {
            let _ = writeln!(err, "check failed: {msg}");
            1
        }
        Err(Failure::Input(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
    }
}

fn member_text(spec: &FamilySpec, instance: &Instance) -> String {
    match instance {
        Instance::Events(seq) => write_events(seq),
        Instance::Graph(seq) => write_graph_events(seq),
        // forests of these families have between n and 2n nodes
        Instance::Forest(f) => write_forest(2 * spec.n, f, None),
    }
}

fn gen_family(args: &FamilyArgs, output: Option<&Path>, out: &mut dyn Write) -> Outcome {
    let spec = spec_of(&args.family, args.n, &args.params)?;
    let family = generate(&spec).map_err(input)?;
    if family.members.len() == 1 {
        return emit(out, output, &member_text(&spec, &family.members[0].instance));
    }
    match output {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|e| input(format!("{}: {e}", dir.display())))?;
            for m in &family.members {
                let ext = if matches!(m.instance, Instance::Forest(_)) { "forest" } else { "events" };
                let file = format!("{}_{}.{ext}", spec.kind, m.params.replace([',', '='], "_"));
                emit(out, Some(&dir.join(file)), &member_text(&spec, &m.instance))?;
            }
            Ok(())
        }
        None => {
            let mut text = String::new();
            for m in &family.members {
                text.push_str(&format!("# member {}\n", m.params));
                text.push_str(&member_text(&spec, &m.instance));
            }
            emit(out, None, &text)
        }
    }
}

fn label(scheme: &str, path: &Path, n: Option<u64>, output: Option<&Path>, out: &mut dyn Write) -> Outcome {
    let scheme = StaticScheme::parse(scheme).map_err(input)?;
    let file = parse_forest(&read(path)?).map_err(input)?;
    let n = n.unwrap_or(file.n);
    let labels = scheme.encode(&file.forest, n).map_err(input)?;
    let mut text = labels_header(&scheme.name(), n);
    for (v, l) in labels.iter() {
        text.push_str(&format_label_line(&file.names[v.index()], l));
        text.push('\n');
    }
    emit(out, output, &text)
}

fn stream(scheme: &str, path: &Path, output: Option<&Path>, out: &mut dyn Write) -> Outcome {
    let kind = DynamicKind::parse(scheme).map_err(input)?;
    let events = parse_events(&read(path)?).map_err(input)?;
    let mut enc = DynamicEncoder::new(kind);
    let mut lines = Vec::new();
    match &events {
        EventFile::Tree(seq) => {
            for e in seq.events() {
                match enc.apply(e).map_err(input)? {
                    Some((_, l)) => lines.push(format_label_line(e.id(), &l)),
                    None => lines.push(format!("# removed {}", e.id())),
                }
            }
        }
        EventFile::Graph(seq) => {
            for e in seq.events() {
                let (_, l) = enc.apply_graph(e).map_err(input)?;
                lines.push(format_label_line(&e.id, &l));
            }
        }
    }
    let mut text = labels_header(&kind.name(), enc.inserted() as u64);
    for l in lines {
        text.push_str(&l);
        text.push('\n');
    }
    emit(out, output, &text)
}

fn query(
    path: &Path,
    scheme: Option<&str>,
    n: Option<u64>,
    queries: Option<&str>,
    ids: &[String],
    out: &mut dyn Write,
) -> Outcome {
    let file = parse_labels(&read(path)?).map_err(input)?;
    let name = scheme
        .map(str::to_string)
        .or(file.scheme.clone())
        .ok_or_else(|| input("no scheme given and none in the label file"))?;
    let scheme = AnyScheme::parse(&name).map_err(input)?;
    let n = n.or(file.n);
    if matches!(scheme, AnyScheme::Static(_)) && n.is_none() {
        return Err(input("static schemes need n"));
    }
    let (a, b) = match ids {
        [] if file.entries.len() == 2 => (&file.entries[0], &file.entries[1]),
        [] => return Err(input("give two ids or a file with exactly two labels")),
        [u, v] => {
            let find = |id: &String| {
                file.entries
                    .iter()
                    .find(|(x, _)| x == id)
                    .ok_or_else(|| input(format!("no label for {id:?}")))
            };
            (find(u)?, find(v)?)
        }
        _ => return Err(input("give exactly two ids")),
    };
    let mut text = String::new();
    for q in parse_queries(queries, scheme.queries())? {
        let ans = scheme.decode(q, &a.1, &b.1, n.unwrap_or(0)).map_err(input)?;
        text.push_str(&format!("{q}({},{})={ans}\n", a.0, b.0));
    }
    emit(out, None, &text)
}

fn verify(scheme: &str, n: usize, trials: u64, seed: u64, queries: Option<&str>, out: &mut dyn Write) -> Outcome {
    let scheme = AnyScheme::parse(scheme).map_err(input)?;
    if n == 0 {
        return Err(input("n must be positive"));
    }
    let queries = parse_queries(queries, scheme.queries())?;
    if let Some(q) = queries.iter().find(|q| !scheme.queries().contains(q)) {
        return Err(input(format!("{} does not answer {q}", scheme.name())));
    }
    let tally = fuzz(&scheme, n, trials, seed, &queries).map_err(input)?;
    emit(
        out,
        None,
        &format!(
            "scheme={} n={n} trials={trials} seed={seed} checks={} mismatches={}\n",
            scheme.name(),
            tally.pairs,
            tally.mismatches
        ),
    )?;
    if tally.mismatches > 0 {
        return Err(Failure::Check(format!("{} mismatches", tally.mismatches)));
    }
    Ok(())
}

fn default_queries(kind: FamilyKind) -> Vec<QueryKind> {
    match kind {
        FamilyKind::FnC => vec![QueryKind::Connectivity],
        FamilyKind::In => vec![QueryKind::Adjacency, QueryKind::Connectivity],
        _ => vec![QueryKind::Adjacency],
    }
}

/// Static and dynamic schemes measured for the size table.
pub const TABLE_NS: [u64; 4] = [1 << 4, 1 << 8, 1 << 12, 1 << 16];

pub fn size_table(ns: &[u64], seed: u64) -> Result<SizeTable, String> {
    let mut names = StaticScheme::registered_names();
    names.extend(["dyn-adj-sib", "dyn-conn", "dyn-triple", "dyn-deg3"].map(String::from));
    let mut rows = Vec::new();
    for name in names {
        let scheme = AnyScheme::parse(&name)?;
        let mut bits = Vec::new();
        for &n in ns {
            let seq = random_forest(n as usize, seed);
            bits.push(match &scheme {
                AnyScheme::Static(s) => {
                    let (f, _) = build_from_events(&seq).map_err(|e| e.to_string())?;
                    s.encode(&f, n).map_err(|e| e.to_string())?.max_bits()
                }
                AnyScheme::Dynamic(DynamicKind::BoundedDegree(k)) => {
                    let mut enc = DynamicEncoder::new(DynamicKind::BoundedDegree(*k));
                    for e in random_bounded_degree(n as usize, *k as usize, seed).events() {
                        enc.apply_graph(e).map_err(|e| e.to_string())?;
                    }
                    enc.max_bits()
                }
                AnyScheme::Dynamic(kind) => {
                    let mut enc = DynamicEncoder::new(*kind);
                    for e in seq.events() {
                        enc.apply(e).map_err(|e| e.to_string())?;
                    }
                    enc.max_bits()
                }
            });
        }
        rows.push((name, bits));
    }
    Ok(SizeTable {
        ns: ns.to_vec(),
        rows,
    })
}

fn bounds(
    fam: &OptionalFamily,
    queries: Option<&str>,
    scheme: Option<&str>,
    table: bool,
    seed: Option<u64>,
    as_json: bool,
    out: &mut dyn Write,
) -> Outcome {
    if fam.family.is_none() && !table {
        return Err(input("give --family or --table"));
    }
    let mut entries: Vec<Entry> = Vec::new();
    let mut failures = Vec::new();
    if let Some(kind) = &fam.family {
        let n = fam.n.ok_or_else(|| input("--family needs --n"))?;
        let spec = spec_of(kind, n, &fam.params)?;
        family_entries(&spec, queries, scheme, &mut entries, &mut failures)?;
    }
    let sizes = if table {
        let seed = seed.ok_or_else(|| input("--table needs --seed"))?;
        Some(size_table(&TABLE_NS, seed).map_err(input)?)
    } else {
        None
    };
    let text = if as_json {
        let certs: Vec<Value> = entries.iter().map(|e| e.json.clone()).collect();
        let mut doc = json!({ "certificates": certs });
        if let Some(t) = &sizes {
            doc["table"] = t.json();
        }
        let mut s = serde_json::to_string_pretty(&doc).map_err(input)?;
        s.push('\n');
        s
    } else {
        let mut s = String::new();
        for e in &entries {
            s.push_str(&e.text);
            s.push('\n');
        }
        if let Some(t) = &sizes {
            s.push_str(&t.text());
        }
        s
    };
    emit(out, None, &text)?;
    if failures.is_empty() {
        Ok(())
    } else {
        Err(Failure::Check(failures.join("; ")))
    }
}

fn family_entries(
    spec: &FamilySpec,
    queries: Option<&str>,
    scheme: Option<&str>,
    entries: &mut Vec<Entry>,
    failures: &mut Vec<String>,
) -> Outcome {
    match spec.kind {
        FamilyKind::Fn | FamilyKind::FnC | FamilyKind::In | FamilyKind::A2 => {
            let qs = parse_queries(queries, default_queries(spec.kind))?;
            let cert = certify_forced_distinct(spec, &qs).map_err(input)?;
            if !cert.stats.missing.is_empty() {
                failures.push(format!("{} pairs without a witness", cert.stats.missing.len()));
            }
            let certified = cert.certified_count;
            entries.push(report::certificate(&cert));
            if let Some(name) = scheme {
                let kind = DynamicKind::parse(name).map_err(input)?;
                let family = generate(spec).map_err(input)?;
                let count = count_distinct_emitted(kind, &family).map_err(input)?;
                if count < certified {
                    failures.push(format!("{name} emitted {count} < certified {certified}"));
                }
                entries.push(report::emitted(name, spec, count, certified));
                if spec.kind == FamilyKind::Fn {
                    let y = yao_expected_max(kind, spec.n).map_err(input)?;
                    if y.expected_max < y.bound {
                        failures.push(format!("{name} expected maximum below the averaging bound"));
                    }
                    entries.push(report::yao(name, &y));
                }
            }
        }
        FamilyKind::Warmup | FamilyKind::Thm6 | FamilyKind::Thm7 | FamilyKind::Thm8 => {
            spec.validate().map_err(input)?;
            let theorem = Theorem::for_kind(spec.kind).expect("counting family");
            let r = counting_oracle(theorem, spec.n, spec.x_or_default()).map_err(input)?;
            if !r.all_hold {
                failures.push(format!("{} has a step below its bound", spec.kind));
            }
            entries.push(report::counting(spec, &r));
        }
        FamilyKind::Fab | FamilyKind::Gab => {
            let default = if spec.kind == FamilyKind::Fab { "wrap:sib-sorted" } else { "wrap:anc-interval" };
            let s = StaticScheme::parse(scheme.unwrap_or(default)).map_err(input)?;
            spec.validate().map_err(input)?;
            let params: Vec<(u64, u64)> = match (spec.a, spec.b) {
                (Some(a), Some(b)) => vec![(a, b)],
                _ => divisor_pairs(spec.n),
            };
            let r = lemma3_intersection_check(&s, spec.kind, spec.n, &params).map_err(input)?;
            if !r.violations.is_empty() {
                failures.push(format!("{} intersection-bound violations", r.violations.len()));
            }
            entries.push(report::intersection(&r));
        }
    }
    Ok(())
}

/// All `(a, b)` with `ab` dividing `n`.
pub fn divisor_pairs(n: u64) -> Vec<(u64, u64)> {
    (1..=n)
        .filter(|a| n.is_multiple_of(*a))
        .flat_map(|a| (1..=n / a).filter(move |b| (n / a).is_multiple_of(*b)).map(move |b| (a, b)))
        .collect()
}

/// Implied bits of a certified count, exposed for callers that render
/// their own reports.
pub fn implied_bits(count: u64) -> u32 {
    ceil_log2(count)
}
