//! `vjac`: command-line access to stability domains, V-functions and their
//! degeneracy posets.
//!
//! Exit codes: 0 success, 1 domain or validation error, 2 malformed input,
//! 3 search budget exceeded.

mod input;
mod output;

use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::seq::SliceRandom;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use vjac::crossmaps::LevelPair;
use vjac::degposet::{
    self, connected_through_height_one, enumerate_dynkin, enumerate_submaximal, n1_classify, phi_s,
    realizable_ns_sets, to_dynkin, validate_degset, wall_w, witnesses_with_budget, DegeneracySubset, N1Class,
    Realizability,
};
use vjac::json::{degset_json, key_json, parse_rat, DomainJson, GroupElementJson, PolarizationJson, VFunctionJson};
use vjac::polarization::{classical_feasible, classical_ns, region_signature, same_region, sigma_of, ClassicalVerdict};
use vjac::symmetry::{canonical_form, enumerate_normalized, normalize_ns, space_isomorphic, space_key, stack_isomorphic};
use vjac::vfunction::{canonical_vfunction, Part, VFunction};
use vjac::{Error, StabilityDomain};

use input::{read_group, read_polarization, read_vfunction, read_vfunction_on, parse_set, Budgets};
use output::{hasse_dot, Emitter};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Dot,
    Table,
}

#[derive(Parser, Debug)]
#[command(name = "vjac", version, about = "Stability domains, V-functions and degeneracy posets")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Shorthand for `--format dot`.
    #[arg(long, global = true)]
    dot: bool,
    /// Seed for sampled experiments.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads for parallel enumeration.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    /// Search node cap; overrides `VJAC_BUDGET`.
    #[arg(long, global = true)]
    budget: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Copy)]
struct Type {
    #[arg(long)]
    g: u32,
    #[arg(long, default_value_t = 0)]
    n: u32,
}

impl Type {
    fn domain(self) -> vjac::Result<Arc<StabilityDomain>> {
        Ok(Arc::new(StabilityDomain::new(self.g, self.n)?))
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List the stability domain.
    Domain(Type),
    /// List the triangles of the stability domain.
    Triangles(Type),
    /// Check the V-function conditions.
    Validate { file: String },
    /// Degeneracy set of a V-function.
    Degeneracy { file: String },
    /// The canonical V-function of genus g and characteristic chi (n = 0).
    Canonical {
        #[arg(long)]
        g: u32,
        #[arg(long, allow_hyphen_values = true)]
        chi: i64,
    },
    /// Non-separating values of the classical V-function for given alpha.
    ClassicalNs {
        #[command(flatten)]
        ty: Type,
        #[arg(long, allow_hyphen_values = true)]
        chi: i64,
        /// Comma-separated rationals, e.g. `1/3,-2,0`.
        #[arg(long, allow_hyphen_values = true, default_value = "")]
        alpha: String,
    },
    /// The V-function of a rational polarization file.
    #[command(name = "sigma-of-L")]
    SigmaOfL {
        #[command(flatten)]
        ty: Type,
        file: String,
    },
    /// Region of a polarization; with two files, whether they share a region.
    Region {
        #[command(flatten)]
        ty: Type,
        file: String,
        other: Option<String>,
    },
    /// Decide classicality with a polarization or a Farkas certificate.
    Feasible { file: String },
    /// Apply a group element.
    Act {
        #[arg(long)]
        group: String,
        file: String,
    },
    /// Translate into the normalization box.
    Normalize { file: String },
    /// All normalized non-separating parts, as V-functions (JSON lines).
    EnumerateNormalized(Type),
    /// Orbit key; `--space` drops the separating part.
    OrbitKey {
        #[arg(long)]
        space: bool,
        file: String,
    },
    /// Isomorphism of the stacks, or of the good moduli spaces with `--space`.
    Iso {
        #[arg(long)]
        space: bool,
        a: String,
        b: String,
    },
    /// Submaximal degeneracy subsets.
    Submaximal(Type),
    /// The walls W_delta.
    Walls(Type),
    /// Witnesses for D1 >= D2.
    Witnesses {
        #[command(flatten)]
        ty: Type,
        #[arg(long)]
        d1: String,
        #[arg(long)]
        d2: String,
    },
    /// `f + χ_E` for a witness E over the degeneracy set of f.
    Lift {
        file: String,
        #[arg(long)]
        d1: String,
        #[arg(long)]
        e: String,
    },
    /// Bounded search for a V-function with the given degeneracy set.
    Realizable {
        #[command(flatten)]
        ty: Type,
        #[arg(long)]
        set: String,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0)]
        chi: i64,
    },
    /// All V-functions above f.
    Upset { file: String },
    /// Longest chain above f.
    Height { file: String },
    /// Classify non-separating degeneracy subsets at n = 1.
    N1Classify {
        #[arg(long)]
        g: u32,
        /// A single subset; all closed subsets when omitted.
        #[arg(long)]
        set: Option<String>,
    },
    /// Dynkin systems on [n], or the system of a genus-one degeneracy subset.
    Dynkin {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        g: Option<u32>,
        #[arg(long)]
        set: Option<String>,
    },
    /// The function phi^S on (1,6); S as comma-separated 3-subsets, e.g. `123,145`.
    PhiS {
        #[arg(long, default_value = "")]
        s: String,
    },
    /// Pull back along the i-th gluing map.
    Xi {
        #[arg(long)]
        i: u32,
        file: String,
    },
    /// Push forward to n+1 marks.
    Omega { file: String },
    /// Omega followed by raising degenerate elements containing n+1.
    OmegaPlus { file: String },
    /// Omega followed by raising degenerate elements avoiding n+1.
    OmegaMinus { file: String },
    /// Height-one connectivity of general normalized V-functions at n = 1.
    Connectivity {
        #[command(flatten)]
        ty: Type,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0)]
        chi: i64,
        /// Random subsample size (0 = all), drawn with `--seed`.
        #[arg(long, default_value_t = 0)]
        sample: usize,
    },
}

/// A failure with its exit code.
#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse(_) => 2,
            Error::BudgetExceeded(_) => 3,
            _ => 1,
        };
        Failure { code, message: e.to_string() }
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = if cli.dot { Format::Dot } else { cli.format };
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.threads.max(1)).build_global() {
        eprintln!("vjac: cannot start thread pool: {e}");
        return ExitCode::from(1);
    }
    let budgets = match Budgets::from_env(cli.budget) {
        Ok(b) => b,
        Err(e) => {
            eprintln!("vjac: {e}");
            return ExitCode::from(2);
        }
    };
    let mut out = Emitter::stdout(format);
    match run(&cli.command, &mut out, &budgets, cli.seed) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("vjac: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn vf_line(out: &mut Emitter, f: &VFunction) {
    match out.format() {
        Format::Table => out.line(f.describe()),
        _ => out.json(&serde_json::to_value(VFunctionJson::of(f)).expect("serializable")),
    }
}

fn set_line(out: &mut Emitter, s: &DegeneracySubset) {
    match out.format() {
        Format::Table => out.line(set_label(s)),
        _ => out.json(&json!(degset_json(s))),
    }
}

fn set_label(s: &DegeneracySubset) -> String {
    if s.is_empty() {
        "∅".into()
    } else {
        s.labels().join(",")
    }
}

fn n1_label(d: &StabilityDomain, c: &N1Class) -> String {
    match c {
        N1Class::Empty => "∅".into(),
        N1Class::W(delta) => format!("W_{delta}"),
        N1Class::Antichain(a) => {
            let l: Vec<String> = a.iter().map(|&i| d.element(i).label(d.n())).collect();
            format!("D({})", l.join(","))
        }
        N1Class::NotRealizable => "not realizable".into(),
    }
}

fn run(cmd: &Command, out: &mut Emitter, budgets: &Budgets, seed: u64) -> Outcome {
    match cmd {
        Command::Domain(ty) => {
            let d = ty.domain()?;
            match out.format() {
                Format::Table => {
                    for (i, x) in d.elements().iter().enumerate() {
                        let kind = if x.is_separating() { "S" } else { "NS" };
                        out.line(format!("{i}\t{}\tdelta={}\tcomp={}\t{kind}", x.label(d.n()), x.delta(), d.comp(i)));
                    }
                }
                _ => out.json(&serde_json::to_value(DomainJson::of(&d)).expect("serializable")),
            }
        }
        Command::Triangles(ty) => {
            let d = ty.domain()?;
            match out.format() {
                Format::Table => {
                    for t in d.triangles() {
                        let l: Vec<String> = t.0.iter().map(|&i| d.element(i).label(d.n())).collect();
                        out.line(l.join(" "));
                    }
                }
                _ => out.json(&json!(d.triangles().iter().map(|t| t.0).collect::<Vec<_>>())),
            }
        }
        Command::Validate { file } => {
            let f = read_vfunction(file)?;
            let report = f.validate();
            let d = f.domain();
            let degenerate = f.degeneracy_set();
            match out.format() {
                Format::Table => {
                    if report.is_ok() {
                        let l = if degenerate.is_empty() { "none".into() } else { degenerate.labels().join(",") };
                        out.line(format!("ok, degenerate: {l}"));
                    } else {
                        out.line(format!("invalid: {}", report.describe(d).join("; ")));
                    }
                }
                _ => out.json(&json!({
                    "valid": report.is_ok(),
                    "degenerate": degset_json(&degenerate),
                    "violations": report.describe(d),
                })),
            }
            if !report.is_ok() {
                return Err(Failure { code: 1, message: "not a V-function".into() });
            }
        }
        Command::Degeneracy { file } => {
            let f = read_vfunction(file)?;
            set_line(out, &f.degeneracy_set());
        }
        Command::Canonical { g, chi } => vf_line(out, &canonical_vfunction(*g, *chi)?),
        Command::ClassicalNs { ty, chi, alpha } => {
            let d = ty.domain()?;
            let alpha = alpha
                .split(',')
                .filter(|s| !s.trim().is_empty())
                .map(parse_rat)
                .collect::<vjac::Result<Vec<_>>>()?;
            let values = classical_ns(&d, *chi, &alpha)?;
            match out.format() {
                Format::Table => {
                    for (&i, v) in d.non_separating().iter().zip(&values) {
                        out.line(format!("{}\t{v}", d.element(i).label(d.n())));
                    }
                }
                _ => out.json(&json!({"chi": chi, "ns": values})),
            }
        }
        Command::SigmaOfL { ty, file } => {
            let d = ty.domain()?;
            let l = read_polarization(file, &d)?;
            vf_line(out, &sigma_of(&l, d)?);
        }
        Command::Region { ty, file, other } => {
            let d = ty.domain()?;
            let l = read_polarization(file, &d)?;
            match other {
                Some(o) => {
                    let l2 = read_polarization(o, &d)?;
                    let same = same_region(&l, &l2, &d)?;
                    match out.format() {
                        Format::Table => out.line(if same { "same region" } else { "different regions" }.into()),
                        _ => out.json(&json!({"same_region": same})),
                    }
                }
                None => {
                    let sig = region_signature(&l, &d)?;
                    let entries: Vec<serde_json::Value> =
                        sig.entries.iter().map(|(fl, wall)| json!([fl.to_string(), wall])).collect();
                    match out.format() {
                        Format::Table => {
                            out.line(format!("chi={}", sig.chi));
                            for ((i, _), (fl, wall)) in d.pairs().into_iter().zip(&sig.entries) {
                                let w = if *wall { " (on wall)" } else { "" };
                                out.line(format!("{}\tfloor={fl}{w}", d.element(i).label(d.n())));
                            }
                        }
                        _ => out.json(&json!({"chi": sig.chi, "entries": entries})),
                    }
                }
            }
        }
        Command::Feasible { file } => {
            let f = read_vfunction(file)?;
            let d = f.domain().clone();
            match classical_feasible(&f)? {
                ClassicalVerdict::Classical(l) => match out.format() {
                    Format::Table => out.line(format!("classical: {}", output::polarization_text(&l))),
                    _ => out.json(&json!({
                        "classical": true,
                        "polarization": serde_json::to_value(PolarizationJson::of(&l, &d)).expect("serializable"),
                    })),
                },
                ClassicalVerdict::NotClassical { system, certificate } => {
                    let mult: Vec<serde_json::Value> = certificate
                        .multipliers
                        .iter()
                        .map(|(k, m)| json!([k, vjac::json::format_rat(m)]))
                        .collect();
                    match out.format() {
                        Format::Table => out.line(format!(
                            "not classical: Farkas certificate over {} of {} constraints",
                            mult.len(),
                            system.len()
                        )),
                        _ => out.json(&json!({"classical": false, "certificate": mult})),
                    }
                }
            }
        }
        Command::Act { group, file } => {
            let f = read_vfunction(file)?;
            let t = read_group(group, f.domain())?;
            vf_line(out, &t.act(&f)?);
        }
        Command::Normalize { file } => {
            let f = read_vfunction(file)?;
            let d = f.domain().clone();
            let (_, ns) = f.split();
            let (_, t) = normalize_ns(d.clone(), &ns)?;
            let g = t.act(&f)?;
            match out.format() {
                Format::Table => {
                    out.line(g.describe());
                    out.line(format!("translation beta={} alpha={:?}", t.beta, t.alpha));
                }
                _ => out.json(&json!({
                    "function": serde_json::to_value(VFunctionJson::of(&g)).expect("serializable"),
                    "translation": serde_json::to_value(GroupElementJson::of(&t, &d)).expect("serializable"),
                })),
            }
        }
        Command::EnumerateNormalized(ty) => {
            let d = ty.domain()?;
            for p in enumerate_normalized(&d, budgets.enumerate)? {
                let f = VFunction::from_ns(d.clone(), &p)?;
                match out.format() {
                    Format::Table => out.line(format!("chi={} ns={:?}", p.chi, p.values)),
                    _ => vf_line(out, &f),
                }
            }
        }
        Command::OrbitKey { space, file } => {
            let f = read_vfunction(file)?;
            if *space {
                let (chi, ns) = space_key(&f)?;
                out.json_or_line(&json!([chi, ns]));
            } else {
                out.json_or_line(&key_json(&canonical_form(&f)?));
            }
        }
        Command::Iso { space, a, b } => {
            let f1 = read_vfunction(a)?;
            let f2 = read_vfunction_on(b, f1.domain().clone())?;
            let iso = if *space { space_isomorphic(&f1, &f2)? } else { stack_isomorphic(&f1, &f2)? };
            match out.format() {
                Format::Table => out.line(if iso { "isomorphic" } else { "not isomorphic" }.into()),
                _ => out.json(&json!({"isomorphic": iso})),
            }
        }
        Command::Submaximal(ty) => {
            let d = ty.domain()?;
            let sets = enumerate_submaximal(d.clone())?;
            if out.format() == Format::Dot {
                let mut nodes = vec![DegeneracySubset::empty(d.clone())];
                nodes.extend(sets);
                let labels: Vec<String> = nodes.iter().map(set_label).collect();
                let rel = |a: usize, b: usize| degposet::deg_leq(&nodes[a], &nodes[b]).map(|r| r && a != b);
                out.raw(hasse_dot("submaximal", &labels, rel)?);
            } else {
                for s in &sets {
                    set_line(out, s);
                }
            }
        }
        Command::Walls(ty) => {
            let d = ty.domain()?;
            let top = 2 * d.g() as i64 - 2 + d.n() as i64;
            for delta in 1..=top {
                let w = wall_w(delta, d.clone())?;
                if w.is_empty() {
                    continue;
                }
                match out.format() {
                    Format::Table => out.line(format!("W_{delta}\t{}", set_label(&w))),
                    _ => out.json(&json!({"delta": delta, "set": degset_json(&w)})),
                }
            }
        }
        Command::Witnesses { ty, d1, d2 } => {
            let d = ty.domain()?;
            let s1 = parse_set(d1, d.clone())?;
            let s2 = parse_set(d2, d.clone())?;
            for w in witnesses_with_budget(&s1, &s2, budgets.search)? {
                set_line(out, &w);
            }
        }
        Command::Lift { file, d1, e } => {
            let f = read_vfunction(file)?;
            let s1 = parse_set(d1, f.domain().clone())?;
            let e = parse_set(e, f.domain().clone())?;
            vf_line(out, &degposet::lift(&f, &s1, &e)?);
        }
        Command::Realizable { ty, set, chi } => {
            let d = ty.domain()?;
            let s = parse_set(set, d)?;
            let report = validate_degset(&s);
            if !report.is_ok() {
                return Err(Failure { code: 1, message: format!("{s} is not complement and triangle closed") });
            }
            match degposet::is_realizable(&s, *chi, budgets.search)? {
                Realizability::Realized(f) => match out.format() {
                    Format::Table => out.line(format!("realizable: {}", f.describe())),
                    _ => out.json(&json!({
                        "realizable": true,
                        "function": serde_json::to_value(VFunctionJson::of(&f)).expect("serializable"),
                    })),
                },
                Realizability::NotRealizable => match out.format() {
                    Format::Table => out.line("not realizable".into()),
                    _ => out.json(&json!({"realizable": false})),
                },
                Realizability::Unknown => {
                    return Err(Failure { code: 3, message: "budget exhausted before a decision".into() })
                }
            }
        }
        Command::Upset { file } => {
            let f = read_vfunction(file)?;
            let up = f.upset_with_budget(budgets.upset)?;
            if out.format() == Format::Dot {
                let labels: Vec<String> = up.iter().map(|g| format!("{:?}", g.values())).collect();
                let rel = |a: usize, b: usize| Ok(a != b && up[a].geq(&up[b]));
                out.raw(hasse_dot("upset", &labels, rel)?);
            } else {
                for g in &up {
                    vf_line(out, g);
                }
            }
        }
        Command::Height { file } => {
            let f = read_vfunction(file)?;
            out.json_or_line(&json!(f.height_with_budget(budgets.upset)?));
        }
        Command::N1Classify { g, set } => {
            let d = Arc::new(StabilityDomain::new(*g, 1)?);
            let sets = match set {
                Some(s) => vec![parse_set(s, d.clone())?],
                None => input::closed_ns_subsets(&d),
            };
            if out.format() == Format::Dot {
                let real = realizable_ns_sets(d.clone(), budgets.enumerate)?;
                let labels =
                    real.iter().map(|s| Ok(n1_label(&d, &n1_classify(s)?))).collect::<vjac::Result<Vec<_>>>()?;
                let rel = |a: usize, b: usize| degposet::deg_leq(&real[a], &real[b]).map(|r| r && a != b);
                out.raw(hasse_dot("realizable", &labels, rel)?);
            } else {
                for s in &sets {
                    let c = n1_classify(s)?;
                    match out.format() {
                        Format::Table => out.line(format!("{}\t{}", set_label(s), n1_label(&d, &c))),
                        _ => out.json(&json!({"set": degset_json(s), "class": n1_label(&d, &c)})),
                    }
                }
            }
        }
        Command::Dynkin { n, g, set } => match (g, set) {
            (Some(g), Some(s)) => {
                let d = Arc::new(StabilityDomain::new(*g, *n)?);
                let sys = to_dynkin(&parse_set(s, d)?)?;
                out.json_or_line(&output::dynkin_json(&sys));
            }
            (None, None) => {
                for sys in enumerate_dynkin(*n)? {
                    out.json_or_line(&output::dynkin_json(&sys));
                }
            }
            _ => return Err(Failure { code: 2, message: "--g and --set go together".into() }),
        },
        Command::PhiS { s } => {
            let d = Arc::new(StabilityDomain::new(1, 6)?);
            let masks = input::parse_mark_sets(s)?;
            vf_line(out, &phi_s(d, &masks)?);
        }
        Command::Xi { i, file } => {
            let f = read_vfunction(file)?;
            let d = f.domain();
            if d.n() == 0 {
                return Err(Failure { code: 1, message: "Xi needs at least one mark".into() });
            }
            let lp = LevelPair::new(d.g(), d.n() - 1)?;
            let f = read_vfunction_on(file, lp.upper.clone())?;
            vf_line(out, &lp.big_xi(*i, &f)?);
        }
        Command::Omega { file } | Command::OmegaPlus { file } | Command::OmegaMinus { file } => {
            let f = read_vfunction(file)?;
            let lp = LevelPair::new(f.domain().g(), f.domain().n())?;
            let f = read_vfunction_on(file, lp.lower.clone())?;
            let g = match cmd {
                Command::Omega { .. } => lp.omega(&f)?,
                Command::OmegaPlus { .. } => lp.omega_plus(&f)?,
                _ => lp.omega_minus(&f)?,
            };
            vf_line(out, &g);
        }
        Command::Connectivity { ty, chi, sample } => {
            let d = ty.domain()?;
            if d.n() != 1 {
                return Err(Failure { code: 1, message: "connectivity is implemented for n = 1".into() });
            }
            let mut pool = Vec::new();
            for p in enumerate_normalized(&d, budgets.enumerate)? {
                // Translate by alpha_1 so that every function has the requested chi.
                let values: Vec<i64> = d
                    .non_separating()
                    .iter()
                    .zip(&p.values)
                    .map(|(&i, v)| v + (chi - p.chi) * (d.element(i).a & 1) as i64)
                    .collect();
                let f = VFunction::from_ns(d.clone(), &Part { chi: *chi, values })?;
                if f.is_general() {
                    pool.push(f);
                }
            }
            if *sample > 0 && *sample < pool.len() {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                pool.shuffle(&mut rng);
                pool.truncate(*sample);
            }
            let c = connected_through_height_one(&pool, budgets.bfs)?;
            let steps: usize = c.paths.iter().flatten().map(|p| p.len()).sum();
            match out.format() {
                Format::Table => {
                    out.line(format!(
                        "{}: {} general functions, {steps} steps, {} explored",
                        if c.connected { "connected" } else { "not connected" },
                        pool.len(),
                        c.explored
                    ));
                    for (k, p) in c.paths.iter().enumerate() {
                        match p {
                            Some(p) => out.line(format!("#{k}: path of {} steps", p.len())),
                            None => out.line(format!("#{k}: not reached")),
                        }
                    }
                }
                _ => {
                    let vf = |f: &VFunction| serde_json::to_value(VFunctionJson::of(f)).expect("serializable");
                    let paths: Vec<serde_json::Value> = c
                        .paths
                        .iter()
                        .map(|p| match p {
                            None => serde_json::Value::Null,
                            Some(p) => json!(p
                                .iter()
                                .map(|s| json!({"from": vf(&s.from), "via": vf(&s.via), "to": vf(&s.to)}))
                                .collect::<Vec<_>>()),
                        })
                        .collect();
                    out.json(&json!({"connected": c.connected, "explored": c.explored, "paths": paths}));
                }
            }
        }
    }
    Ok(())
}
