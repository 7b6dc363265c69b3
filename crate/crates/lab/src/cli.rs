use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use iaut::autos::normal::active_slots;
use iaut::{decomp, inertia_falsify, is_inertial, span, Atom, AutoExpr, Budget, Element, GroupDescriptor, Index};

use crate::scenario::{self, Params, Report};

#[derive(Parser, Debug)]
#[command(name = "lab", about = "Inertial automorphisms of abelian groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide or refute inertia of an automorphism.
    Inertia {
        #[command(subcommand)]
        action: InertiaAction,
    },
    /// Commensurability of H and Hγ for sampled finitely generated H.
    Comm(Common),
    /// Decomposition certificate of the group, or of γ when --auto is given.
    Decompose(Common),
    /// Exponents, essential exponents and critical primes.
    Eexp(Common),
    Scenario {
        #[command(subcommand)]
        action: ScenarioAction,
    },
}

#[derive(Subcommand, Debug)]
enum InertiaAction {
    Check(Common),
    Falsify(Common),
}

#[derive(Subcommand, Debug)]
enum ScenarioAction {
    List(Common),
    Run {
        name: String,
        #[command(flatten)]
        common: Common,
    },
    /// Every scenario with default parameters.
    Suite(Common),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
enum Format {
    #[default]
    Human,
    Json,
}

#[derive(Args, Debug, Clone)]
struct Common {
    #[arg(long)]
    group: Option<PathBuf>,
    #[arg(long)]
    auto: Option<PathBuf>,
    #[arg(long)]
    budget: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Human)]
    format: Format,
    #[arg(long)]
    primes: Option<u64>,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    s: Option<u32>,
}

/// Exit status and everything written to stdout.
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn usage(msg: impl Into<String>) -> Self {
        Outcome { code: 2, stdout: String::new(), stderr: msg.into() }
    }
}

fn read(path: &Path) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_group(c: &Common) -> Result<GroupDescriptor, String> {
    let path = c.group.as_ref().ok_or("missing --group")?;
    GroupDescriptor::parse(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_auto(c: &Common, g: &GroupDescriptor) -> Result<AutoExpr, String> {
    let path = c.auto.as_ref().ok_or("missing --auto")?;
    AutoExpr::parse(g, &read(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

fn render(format: Format, v: &impl Serialize, human: impl FnOnce() -> String) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(v).expect("serializable") + "\n",
        Format::Human => human(),
    }
}

pub fn run_command<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            return Outcome { code, stdout: if code == 0 { e.to_string() } else { String::new() }, stderr: e.to_string() };
        }
    };
    let r = match cli.command {
        Command::Inertia { action: InertiaAction::Check(c) } => inertia_check(&c),
        Command::Inertia { action: InertiaAction::Falsify(c) } => inertia_falsify_cmd(&c),
        Command::Comm(c) => comm(&c),
        Command::Decompose(c) => decompose(&c),
        Command::Eexp(c) => eexp(&c),
        Command::Scenario { action } => scenario_cmd(action),
    };
    match r {
        Ok((code, stdout)) => Outcome { code, stdout, stderr: String::new() },
        Err(msg) => Outcome::usage(msg),
    }
}

type Cmd = Result<(i32, String), String>;

fn inertia_check(c: &Common) -> Cmd {
    let g = load_group(c)?;
    let e = load_auto(c, &g)?;
    let v = is_inertial(&g, &e).map_err(|e| e.to_string())?;
    let code = if v.is_inertial() { 0 } else { 1 };
    let out = render(c.format, &v, || {
        let mut s = format!("verdict: {}\ncase: {}\n", v.status, v.case);
        if let Some(cert) = &v.certificate {
            let _ = writeln!(s, "certificate: {}", json!(cert));
        }
        if let Some(why) = &v.violated {
            let _ = writeln!(s, "violated: {why}");
        }
        s
    });
    Ok((code, out))
}

fn inertia_falsify_cmd(c: &Common) -> Cmd {
    let g = load_group(c)?;
    let e = load_auto(c, &g)?;
    let mut budget = Budget::with_trials(c.budget.unwrap_or(200));
    budget.seed = c.seed;
    let w = inertia_falsify(&g, &e, &budget).map_err(|e| e.to_string())?;
    let code = if w.is_some() { 1 } else { 0 };
    let report = json!({ "trials": budget.trials, "seed": c.seed, "witness": w });
    let out = render(c.format, &report, || match &w {
        Some(w) => {
            let gens: Vec<String> = w.generators.iter().map(|x| x.to_string()).collect();
            format!("witness at trial {}: H = <{}>, |H+Hγ : H| infinite\n", w.trial, gens.join(", "))
        }
        None => format!("no witness in {} trials\n", budget.trials),
    });
    Ok((code, out))
}

fn random_element(g: &GroupDescriptor, copies: usize, rng: &mut ChaCha8Rng) -> Element {
    let coords = active_slots(g, copies).into_iter().filter_map(|s| {
        let n = rng.gen_range(-3i64..=3);
        let d = match g.atom(s.atom) {
            Atom::Pruefer { p } | Atom::LocalizedQ { p } => (*p as i64).pow(rng.gen_range(0..=2)),
            _ => 1,
        };
        (n != 0).then(|| (s, iaut::arith::q(n, d)))
    });
    g.element(coords.collect::<Vec<_>>()).expect("window element")
}

fn comm(c: &Common) -> Cmd {
    let g = load_group(c)?;
    let e = load_auto(c, &g)?;
    let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
    let copies = e.max_copy() + 1;
    let mut rows = Vec::new();
    let mut all = true;
    for k in 0..c.budget.unwrap_or(20) {
        let gens: Vec<Element> = (0..rng.gen_range(1..=2)).map(|_| random_element(&g, copies, &mut rng)).collect();
        let (h, sum) = iaut::falsify::with_image(&g, &e, &gens).map_err(|e| e.to_string())?;
        let images: Vec<Element> = gens.iter().map(|x| e.apply(&g, x)).collect::<iaut::Result<_>>().map_err(|e| e.to_string())?;
        let hg = span(&g, &images).map_err(|e| e.to_string())?;
        let up = h.index_in(&sum).map_err(|e| e.to_string())?;
        let ok = h.commensurable(&hg).map_err(|e| e.to_string())?;
        all &= ok;
        let show = |i: &Index| match i {
            Index::Finite(n) => json!(n.to_string()),
            Index::Infinite => json!("INFINITE"),
        };
        rows.push(json!({ "sample": k, "generators": gens, "index_in_sum": show(&up), "commensurable": ok }));
    }
    let report = json!({ "seed": c.seed, "samples": rows, "all_commensurable": all });
    let out = render(c.format, &report, || {
        let mut s = String::new();
        for r in &rows {
            let _ = writeln!(s, "{:>3}  |H+Hγ : H| = {}  {}", r["sample"], r["index_in_sum"], if r["commensurable"] == true { "ok" } else { "NOT COMMENSURABLE" });
        }
        s
    });
    Ok((if all { 0 } else { 1 }, out))
}

fn decompose(c: &Common) -> Cmd {
    let g = load_group(c)?;
    let cert: Value = if c.auto.is_some() {
        let e = load_auto(c, &g)?;
        json!(decomp::theorem_b_factor(&g, &e).map_err(|e| e.to_string())?)
    } else if g.is_periodic() {
        let ps = g.primes();
        if ps.len() == 1 {
            json!(decomp::pgroup_decompose(&g).map_err(|e| e.to_string())?)
        } else {
            json!(decomp::periodic_decompose(&g).map_err(|e| e.to_string())?)
        }
    } else {
        json!(decomp::theorem_c_split(&g).map_err(|e| e.to_string())?)
    };
    let list = cert.get("checklist").or_else(|| cert.pointer("/certificate/checklist")).cloned().unwrap_or(json!([]));
    let items = list.as_array().cloned().unwrap_or_default();
    let pass = items.iter().all(|i| i["pass"] == true);
    let out = render(c.format, &cert, || {
        let tag = cert.get("theorem").or_else(|| cert.pointer("/certificate/theorem")).cloned().unwrap_or(Value::Null);
        let mut s = format!("theorem: {}\n", tag.as_str().unwrap_or("?"));
        for i in &items {
            let _ = writeln!(s, "  {}  {}", if i["pass"] == true { "PASS" } else { "FAIL" }, i["id"].as_str().unwrap_or(""));
        }
        s
    });
    Ok((if pass { 0 } else { 1 }, out))
}

fn eexp(c: &Common) -> Cmd {
    let g = load_group(c)?;
    let r = g.structural_report();
    let out = render(c.format, &r, || {
        let mut s = String::new();
        for p in g.primes() {
            let _ = writeln!(s, "p = {p}: exp = {}, eexp = {}, critical = {}", g.exponent(p), g.eexp(p), g.is_critical(p));
        }
        let _ = writeln!(s, "r0 = {}", g.r0());
        s
    });
    Ok((0, out))
}

fn params(c: &Common) -> Params {
    Params { budget: c.budget, seed: c.seed, primes: c.primes, n: c.n, s: c.s }
}

fn human_report(r: &Report) -> String {
    let mut s = format!("scenario {} (seed {})\n", r.scenario, r.seed);
    for a in &r.assertions {
        let tag = json!(a.provenance);
        let _ = writeln!(s, "  {}  {}  {}  [{}]", if a.pass { "PASS" } else { "FAIL" }, a.id, a.operation, tag.as_str().unwrap_or(""));
    }
    let _ = writeln!(s, "{}", if r.pass { "all assertions pass" } else { "FAILED" });
    s
}

fn scenario_cmd(action: ScenarioAction) -> Cmd {
    match action {
        ScenarioAction::List(c) => {
            let list: Vec<Value> = scenario::scenario_suite().iter().map(|s| json!({ "name": s.name, "about": s.about })).collect();
            let out = render(c.format, &list, || {
                scenario::scenario_suite().iter().map(|s| format!("{:<20} {}\n", s.name, s.about)).collect()
            });
            Ok((0, out))
        }
        ScenarioAction::Run { name, common } => {
            let s = scenario::find(&name).ok_or_else(|| format!("unknown scenario '{name}'"))?;
            let r = s.run(&params(&common));
            let out = render(common.format, &r, || human_report(&r));
            Ok((if r.pass { 0 } else { 1 }, out))
        }
        ScenarioAction::Suite(c) => {
            let r = scenario::run_suite(c.seed);
            let out = render(c.format, &r, || r.scenarios.iter().map(human_report).collect());
            Ok((if r.pass { 0 } else { 1 }, out))
        }
    }
}
