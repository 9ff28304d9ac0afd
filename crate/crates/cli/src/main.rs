// SPDX-License-Identifier: MIT OR Apache-2.0

//! `k3lat` — command-line front end.
//!
//! Exit codes: 0 success, 1 verification mismatch or internal failure,
//! 2 usage error, 3 resource budget exceeded.

use std::io::Write;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use k3lat::cache::Cache;
use k3lat::definite::{self, Budget};
use k3lat::enriques::{self, FiberType};
use k3lat::forms::{normal_form, DiscriminantForm};
use k3lat::frames::{frames_for_m, FrameRecord};
use k3lat::genus;
use k3lat::table::{self, rows_from_records};
use k3lat::verify::Suite;
use k3lat::{reference, Error, Lattice};

#[derive(Parser, Debug)]
#[command(name = "k3lat", version, about = "Exact lattice computations for Enriques involutions on K3 surfaces")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Wall-clock budget in seconds for backtracking searches.
    #[arg(long, global = true, value_name = "SECONDS")]
    budget: Option<u64>,
    /// Worker threads for parallel enumeration (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = OutFormat::Text)]
    format: OutFormat,
    /// Accepted for compatibility; every computation is deterministic.
    #[arg(long, global = true)]
    seedless: bool,
    /// Recompute cached results and require byte-identical output.
    #[arg(long, global = true)]
    verify_cache: bool,
    /// Bypass the result cache.
    #[arg(long, global = true)]
    no_cache: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum OutFormat {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Basic invariants of a lattice, e.g. "U + E8(2) + [-8]".
    Lattice { spec: String },
    /// Normal form of the discriminant quadratic form.
    DiscForm { spec: String },
    /// Genus symbol and mass; `--classes` enumerates a definite genus.
    Genus {
        spec: String,
        #[arg(long)]
        classes: bool,
    },
    /// Frame table of jacobian elliptic fibrations for T = U + [4m].
    Frames {
        #[arg(long)]
        m: i64,
        /// Include the Gram matrix of each frame.
        #[arg(long)]
        with_gram: bool,
        /// Order rows by the published numbering instead of canonically.
        #[arg(long, visible_alias = "paper-order")]
        published_order: bool,
    },
    /// Enriques involutions up to conjugation.
    Enriques {
        #[command(subcommand)]
        action: EnriquesCmd,
    },
    /// Construct and analyse an explicit involution.
    Involution {
        #[command(subcommand)]
        kind: InvolutionCmd,
    },
    /// Mordell–Weil height `2χ + 2 P·O − Σ contr`.
    MwHeight {
        #[arg(long, default_value_t = 2)]
        chi: i64,
        /// Intersection number of the section with the zero section.
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        p_dot_o: i64,
        /// Reducible fibre met by the section, as TYPE:COMPONENT (e.g. IV*:1, I3:0).
        #[arg(long = "fiber", value_name = "TYPE:COMPONENT")]
        fibers: Vec<String>,
    },
    /// Run acceptance criteria.
    Verify {
        /// Run all eleven criteria.
        #[arg(long, conflicts_with = "criterion")]
        all: bool,
        /// Run selected criteria.
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=11))]
        criterion: Vec<u8>,
    },
}

#[derive(Subcommand, Debug)]
enum EnriquesCmd {
    /// |Enr(X)| with its breakdown by embedding.
    Count {
        #[arg(long)]
        m: i64,
    },
}

#[derive(Subcommand, Debug)]
enum InvolutionCmd {
    /// Barth–Peters involution on U + E8^2 + [-2n].
    Bp {
        #[arg(long)]
        n: i64,
    },
    /// The involution from the Apéry–Fermi fibration (n = 6).
    AperyFermi,
}

/// Errors carrying an exit code.
enum Failure {
    Usage(String),
    Budget(String),
    Mismatch(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Budget(_) => Failure::Budget(e.to_string()),
            Error::Parse(_) | Error::BadConstructor(_) | Error::UnknownFiber(_) => Failure::Usage(e.to_string()),
            _ => Failure::Mismatch(e.to_string()),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        match e.downcast::<Error>() {
            Ok(k) => k.into(),
            Err(e) => Failure::Mismatch(format!("{e:#}")),
        }
    }
}

type Out = Result<(), Failure>;

/// `println!` that tolerates a closed stdout (e.g. `k3lat ... | head`).
macro_rules! say {
    ($($t:tt)*) => {{
        let _ = writeln!(std::io::stdout().lock(), $($t)*);
    }};
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (code, msg) = match f {
                Failure::Usage(m) => (2, m),
                Failure::Budget(m) => (3, m),
                Failure::Mismatch(m) => (1, m),
            };
            eprintln!("k3lat: {msg}");
            ExitCode::from(code)
        }
    }
}

struct Ctx {
    g: Global,
    budget: Budget,
    cache: Option<Cache>,
}

impl Ctx {
    fn cached(&self, op: &str, input: Value, f: impl FnOnce() -> k3lat::Result<Value>) -> k3lat::Result<Value> {
        match &self.cache {
            Some(c) => c.get_or_compute(op, &input, self.g.verify_cache, f),
            None => f(),
        }
    }

    fn emit_json(&self, v: &Value) -> Out {
        say!("{}", serde_json::to_string_pretty(v).expect("serializable"));
        Ok(())
    }
}

fn run(cli: Cli) -> Out {
    if let Some(j) = cli.global.jobs {
        if j == 0 {
            return Err(Failure::Usage("--jobs must be positive".into()));
        }
        k3lat::set_jobs(j)?;
    }
    let budget = cli.global.budget.map_or_else(Budget::unlimited, Budget::seconds);
    let cache = (!cli.global.no_cache).then(Cache::from_env);
    if let Some(c) = &cache {
        log::info!("cache directory {}", c.dir().display());
    }
    let ctx = Ctx { g: cli.global, budget, cache };
    if ctx.g.format == OutFormat::Csv && !matches!(cli.command, Command::Frames { .. }) {
        return Err(Failure::Usage("--format csv applies to `frames` only".into()));
    }
    match cli.command {
        Command::Lattice { spec } => lattice(&ctx, &spec),
        Command::DiscForm { spec } => disc_form(&ctx, &spec),
        Command::Genus { spec, classes } => genus_cmd(&ctx, &spec, classes),
        Command::Frames { m, with_gram, published_order } => frames(&ctx, m, with_gram, published_order),
        Command::Enriques { action: EnriquesCmd::Count { m } } => enriques_count(&ctx, m),
        Command::Involution { kind } => involution(&ctx, kind),
        Command::MwHeight { chi, p_dot_o, fibers } => mw_height(&ctx, chi, p_dot_o, &fibers),
        Command::Verify { all, criterion } => verify(&ctx, all, criterion),
    }
}

fn parse_lattice(spec: &str) -> Result<Lattice, Failure> {
    if spec.trim_start().starts_with('{') {
        let v: Value = serde_json::from_str(spec).map_err(|e| Failure::Usage(format!("lattice JSON: {e}")))?;
        return Ok(Lattice::from_json(&v)?);
    }
    Ok(Lattice::parse(spec)?)
}

fn lattice(ctx: &Ctx, spec: &str) -> Out {
    let l = parse_lattice(spec)?;
    let (pos, neg) = l.signature()?;
    let even = l.is_even();
    let roots = if l.is_negative_definite() {
        let (rs, _) = definite::root_type(&l)?;
        Some((rs.root_type.to_string(), rs.count()))
    } else {
        None
    };
    if ctx.g.format == OutFormat::Json {
        let mut v = l.to_json();
        v["rank"] = json!(l.rank());
        v["det"] = json!(l.det().to_string());
        v["signature"] = json!([pos, neg]);
        v["even"] = json!(even);
        if let Some((t, k)) = &roots {
            v["root_type"] = json!(t);
            v["roots"] = json!(k);
        }
        return ctx.emit_json(&v);
    }
    say!("rank {}", l.rank());
    say!("det {}", l.det());
    say!("signature ({pos},{neg})");
    say!("even {even}");
    if let Some((t, k)) = roots {
        say!("root type {}", if t.is_empty() { "∅" } else { &t });
        say!("roots {k}");
    }
    Ok(())
}

fn disc_form(ctx: &Ctx, spec: &str) -> Out {
    let l = parse_lattice(spec)?;
    let d = DiscriminantForm::of(&l)?;
    let nf = normal_form(&d.form)?;
    if ctx.g.format == OutFormat::Json {
        return ctx.emit_json(&json!({"order": d.form.order().to_string(), "normal_form": nf.to_string(), "form": d.form.to_json()}));
    }
    say!("{nf}");
    Ok(())
}

fn genus_cmd(ctx: &Ctx, spec: &str, classes: bool) -> Out {
    let l = parse_lattice(spec)?;
    let sym = genus::genus_symbol(&l)?;
    let mass = if sym.is_definite() { Some(genus::mass(&sym)?) } else { None };
    let set = if classes {
        if !sym.is_definite() {
            return Err(Failure::Usage("class enumeration needs a definite lattice".into()));
        }
        Some(genus::enumerate_genus(&l, None, &ctx.budget)?)
    } else {
        None
    };
    let describe = |c: &Lattice| -> k3lat::Result<String> {
        let (rs, _) = definite::root_type(c)?;
        let t = rs.root_type.to_string();
        Ok(if t.is_empty() { "∅".into() } else { t })
    };
    if ctx.g.format == OutFormat::Json {
        let mut v = json!({"symbol": sym.to_string(), "mass": mass.as_ref().map(|m| m.to_string())});
        if let Some(s) = &set {
            let cls: Vec<Value> = s
                .classes
                .iter()
                .zip(&s.aut_orders)
                .map(|(c, a)| Ok(json!({"root_type": describe(c)?, "aut_order": a.to_string(), "gram": c.to_json()["gram"]})))
                .collect::<k3lat::Result<_>>()?;
            v["classes"] = json!(cls);
            v["complete"] = json!(s.complete);
        }
        return ctx.emit_json(&v);
    }
    say!("symbol {sym}");
    if let Some(m) = mass {
        say!("mass {m}");
    }
    if let Some(s) = set {
        say!("classes {}{}", s.classes.len(), if s.complete { "" } else { " (incomplete)" });
        for (c, a) in s.classes.iter().zip(&s.aut_orders) {
            say!("  {}  |O| = {a}", describe(c)?);
        }
    }
    Ok(())
}

fn frame_table(ctx: &Ctx, m: i64) -> Result<(Vec<FrameRecord>, Value), Failure> {
    let v = ctx.cached("frames", json!({"m": m}), || {
        let mut t = frames_for_m(m, &ctx.budget)?;
        let unmatched = if reference::reference_rows(m).is_some() { enriques::label_frame_table(m, &mut t, &ctx.budget)? } else { vec![] };
        Ok(json!({
            "records": t.records,
            "mass": t.mass.to_string(),
            "class_sum": t.class_sum.to_string(),
            "merges": t.merges,
            "unmatched": unmatched,
        }))
    })?;
    let records: Vec<FrameRecord> = serde_json::from_value(v["records"].clone()).context("cached frame records").map_err(Failure::from)?;
    Ok((records, v))
}

fn frames(ctx: &Ctx, m: i64, with_gram: bool, published_order: bool) -> Out {
    if m < 1 {
        return Err(Failure::Usage("--m must be positive".into()));
    }
    let (mut records, meta) = frame_table(ctx, m)?;
    if published_order {
        let Some(rows) = reference::reference_rows(m) else {
            return Err(Failure::Usage(format!("no published numbering for m = {m}")));
        };
        records.sort_by_key(|r| r.label.as_deref().and_then(|l| rows.iter().position(|x| x.label == l)).unwrap_or(usize::MAX));
    }
    let rows = rows_from_records(&records, with_gram);
    let fmt = match ctx.g.format {
        OutFormat::Text => table::Format::Text,
        OutFormat::Json => table::Format::Json,
        OutFormat::Csv => table::Format::Csv,
    };
    let out = table::emit_table(&rows, fmt, with_gram)?;
    let mut stdout = std::io::stdout().lock();
    let _ = stdout.write_all(out.as_bytes());
    if fmt == table::Format::Text {
        writeln!(stdout, "mass {}", meta["mass"].as_str().unwrap_or("?")).ok();
        writeln!(stdout, "Σ 1/|O(W)| {}", meta["class_sum"].as_str().unwrap_or("?")).ok();
    }
    Ok(())
}

fn enriques_count(ctx: &Ctx, m: i64) -> Out {
    if m < 1 {
        return Err(Failure::Usage("--m must be positive".into()));
    }
    let v = ctx.cached("enriques-count", json!({"m": m}), || {
        Ok(serde_json::to_value(enriques::enriques_number(m, &ctx.budget)?).expect("serializable"))
    })?;
    if ctx.g.format == OutFormat::Json {
        return ctx.emit_json(&v);
    }
    let parts: Vec<String> = v["breakdown"].as_array().into_iter().flatten().map(|b| b["count"].to_string()).collect();
    say!("{} ({})", v["total"], parts.join("+"));
    for b in v["breakdown"].as_array().into_iter().flatten() {
        say!(
            "  {}{}: {}",
            b["complement"].as_str().unwrap_or("?"),
            if b["barth_peters"].as_bool() == Some(true) { " (Barth-Peters)" } else { "" },
            b["count"]
        );
    }
    for a in v["assumed"].as_array().into_iter().flatten() {
        say!("assumed: {}", a.as_str().unwrap_or(""));
    }
    Ok(())
}

fn print_report(r: &enriques::InvolutionReport) {
    say!("ε² = id: {}", r.involution);
    say!("invariant ≅ U(2) + E8(2): {}", r.invariant_is_m);
    if let Some(k) = r.coinvariant_roots {
        say!("coinvariant roots: {k}");
    }
    if let Some(k) = r.coinvariant_minus4 {
        say!("coinvariant vectors of square -4: {k}");
    }
    if let Some((c, ok)) = &r.coinvariant_class {
        say!("coinvariant ≅ {c}: {ok}");
    }
    if let Some(k) = r.disc_action {
        say!("action on discriminant: ×{k}");
    }
    match &r.verdict {
        enriques::Verdict::Enriques => say!("verdict: Enriques"),
        enriques::Verdict::NotEnriques(why) => say!("verdict: not Enriques ({})", why.join("; ")),
    }
    for a in &r.assumed {
        say!("assumed: {a}");
    }
}

fn print_matrix(name: &str, m: &[Vec<i64>]) {
    say!("{name} =");
    for row in m {
        say!("  {}", row.iter().map(|x| format!("{x:>3}")).collect::<Vec<_>>().join(""));
    }
}

fn involution(ctx: &Ctx, kind: InvolutionCmd) -> Out {
    match kind {
        InvolutionCmd::Bp { n } => {
            let b = enriques::build_bp_involution(n, &ctx.budget)?;
            if ctx.g.format == OutFormat::Json {
                return ctx.emit_json(&serde_json::to_value(&b).expect("serializable"));
            }
            say!("n = {n}");
            print_matrix("t_P", &b.t_p);
            print_matrix("ı", &b.iota);
            print_matrix("ε", &b.epsilon);
            say!("t_P recovered from the fibration: {}", b.translation_recovered);
            say!("height(P) = {}, ⟨P,Q⟩ = {}, P·Q = {}", b.height_p, b.pairing_pq, b.p_dot_q);
            print_report(&b.report);
        }
        InvolutionCmd::AperyFermi => {
            let af = enriques::apery_fermi_involution(&ctx.budget)?;
            if ctx.g.format == OutFormat::Json {
                return ctx.emit_json(&serde_json::to_value(&af).expect("serializable"));
            }
            say!("S19 = {:?} (printed vector: {})", af.s19, af.s19_matches_printed);
            say!("S19·O19 = {}, S19·R19 = {}", af.s19_dot_o19, af.s19_dot_r19);
            say!("⟨R19,R19⟩ = {}", af.height_r19);
            say!("reducible fibres: {}", af.fiber_types.join(", "));
            say!("inversion candidates: {}", af.candidates.len());
            if !af.lines.unresolved.is_empty() {
                say!("undetermined line classes: {}", af.lines.unresolved.join(", "));
            }
            match af.involution() {
                Some(c) => {
                    say!("ε swaps ± on L-lines: {}", c.swaps_l_lines);
                    print_report(&c.report);
                }
                None => say!("no candidate gives an Enriques involution"),
            }
        }
    }
    Ok(())
}

fn mw_height(ctx: &Ctx, chi: i64, p_dot_o: i64, fibers: &[String]) -> Out {
    let mut contr = vec![];
    for f in fibers {
        let (t, c) = f.rsplit_once(':').ok_or_else(|| Failure::Usage(format!("expected TYPE:COMPONENT, got `{f}`")))?;
        let t: FiberType = t.parse()?;
        let c: usize = c.parse().map_err(|_| Failure::Usage(format!("bad component in `{f}`")))?;
        contr.push((t, c));
    }
    let h = enriques::mw_height(chi, p_dot_o, &contr)?;
    if ctx.g.format == OutFormat::Json {
        return ctx.emit_json(&json!({"height": h.to_string()}));
    }
    say!("{h}");
    Ok(())
}

fn verify(ctx: &Ctx, all: bool, criterion: Vec<u8>) -> Out {
    let ids: Vec<u8> = if all || criterion.is_empty() { (1..=11).collect() } else { criterion };
    let suite = Suite::new(&ctx.budget);
    let mut results = vec![];
    for id in ids {
        let r = suite.run(id);
        if ctx.g.format == OutFormat::Text {
            say!("{}", r.line());
        }
        results.push(r);
    }
    if ctx.g.format == OutFormat::Json {
        ctx.emit_json(&serde_json::to_value(&results).expect("serializable"))?;
    }
    let failed: Vec<String> = results.iter().filter(|r| !r.pass).map(|r| r.id.to_string()).collect();
    if failed.is_empty() {
        Ok(())
    } else if results.iter().any(|r| !r.pass && r.details.iter().any(|d| d.contains("resource budget exceeded"))) {
        Err(Failure::Budget(format!("criteria {} ran out of budget", failed.join(", "))))
    } else {
        Err(Failure::Mismatch(format!("criteria {} failed", failed.join(", "))))
    }
}
