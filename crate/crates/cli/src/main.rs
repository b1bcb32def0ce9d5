use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;

use lie_index::algebra::{UnitGroup, DEFAULT_ORACLE_CAP, DEFAULT_UNIT_CAP};
use lie_index::classify::{
    summarize, AnalysisReport, AnalyzeOptions, ConditionId, CorpusSummary, OracleStatus, Verdict,
};
use lie_index::corpus::{family, parse_spec, GroupSpec};
use lie_index::group::DEFAULT_ELEMENT_CAP;
use lie_index::{Error, GroupAlgebra, GroupTable};

/// Overrides the element cap for group closure.
const ELEMENT_CAP_VAR: &str = "LIE_INDEX_ELEMENT_CAP";

#[derive(Parser)]
#[command(
    name = "lie-index",
    version,
    about = "Lie nilpotency indices of modular group algebras"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze one group document.
    Analyze {
        file: PathBuf,
        /// Require the direct ideal oracle; fail with exit 3 when |G| exceeds --max-dim.
        #[arg(long)]
        direct: bool,
        /// Largest |G| the direct oracle runs on.
        #[arg(long, default_value_t = DEFAULT_ORACLE_CAP)]
        max_dim: usize,
        /// Also enumerate U(F_2[G]) when it fits the default unit cap.
        #[arg(long)]
        units: bool,
        /// Characteristic (default: the prime dividing |G'|).
        #[arg(long)]
        p: Option<u64>,
        #[arg(long)]
        json: bool,
    },
    /// Print (or write) the document of a built-in family member.
    Family {
        name: String,
        params: Vec<u64>,
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Analyze every document in a directory.
    Survey {
        dir: PathBuf,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long, default_value_t = DEFAULT_ORACLE_CAP)]
        max_dim: usize,
        #[arg(long)]
        json: bool,
    },
    /// Run every invariant and characterization check over a directory;
    /// exit 0 iff nothing fails.
    Verify {
        dir: PathBuf,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long, default_value_t = DEFAULT_ORACLE_CAP)]
        max_dim: usize,
        #[arg(long)]
        json: bool,
    },
    /// Enumerate U(F_2[G]) and compare its class with t_L - 1.
    Units {
        file: PathBuf,
        /// Largest unit group enumerated.
        #[arg(long, default_value_t = DEFAULT_UNIT_CAP)]
        cap: u64,
        #[arg(long)]
        json: bool,
    },
}

enum Failure {
    Verification(String),
    Usage(String),
    Resource(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_resource_cap() {
            Failure::Resource(e.to_string())
        } else if matches!(e, Error::Consistency(_)) {
            Failure::Verification(e.to_string())
        } else {
            Failure::Usage(e.to_string())
        }
    }
}

fn element_cap() -> Result<usize, Failure> {
    match std::env::var(ELEMENT_CAP_VAR) {
        Ok(v) => v
            .parse()
            .map_err(|_| Failure::Usage(format!("{ELEMENT_CAP_VAR}={v:?} is not a number"))),
        Err(_) => Ok(DEFAULT_ELEMENT_CAP),
    }
}

fn read_spec(path: &Path) -> Result<GroupSpec, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    parse_spec(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

/// All `.json` documents of a directory, in file-name order.
fn read_dir_specs(dir: &Path) -> Result<Vec<GroupSpec>, Failure> {
    let entries = fs::read_dir(dir).map_err(|e| Failure::Usage(format!("{}: {e}", dir.display())))?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    let specs = paths.iter().map(|p| read_spec(p)).collect::<Result<Vec<_>, _>>()?;
    let mut names: Vec<&str> = specs.iter().map(|s| s.name.as_str()).collect();
    names.sort_unstable();
    if let Some(w) = names.windows(2).find(|w| w[0] == w[1]) {
        return Err(Failure::Usage(format!(
            "duplicate group name {:?} in {}",
            w[0],
            dir.display()
        )));
    }
    Ok(specs)
}

fn build(spec: &GroupSpec) -> Result<GroupTable, Failure> {
    spec.build(element_cap()?).map_err(|e| {
        let f = Failure::from(e);
        match f {
            Failure::Resource(m) => Failure::Resource(format!("{}: {m}", spec.name)),
            Failure::Usage(m) => Failure::Usage(format!("{}: {m}", spec.name)),
            other => other,
        }
    })
}

fn opt<T: ToString>(x: &Option<T>) -> String {
    x.as_ref().map_or("-".into(), ToString::to_string)
}

fn print_report(r: &AnalysisReport) {
    println!("group      {}", r.name);
    println!("order      {}", r.order);
    println!("p          {}", r.p);
    println!("gate       {}", r.gate);
    println!("cl         {}", opt(&r.cl));
    if let (Some(n), Some(l)) = (r.n, r.l) {
        println!(
            "G'         order {}^{n}, exponent {}^{l}, type {}",
            r.p,
            r.p,
            opt(&r.gprime_type)
        );
    }
    if let Some(g3) = &r.gamma3 {
        println!(
            "gamma_3    order {}{}{}{}",
            g3.order,
            if g3.is_cyclic { ", cyclic" } else { "" },
            if g3.equals_gprime_squared { ", = (G')^2" } else { "" },
            if g3.equals_omega1 { ", = Omega_1(G')" } else { "" },
        );
    }
    if let Some(d) = &r.d_sequence {
        let parts: Vec<String> = d.iter().map(|(k, v)| format!("d_({k})={v}")).collect();
        println!(
            "d          {}",
            if parts.is_empty() {
                "all zero".into()
            } else {
                parts.join(" ")
            }
        );
    }
    if let Some(s) = &r.series {
        println!("|D_(m)|    {s:?}");
    }
    println!("t^L        {} (Jennings)", opt(&r.tU_jennings));
    match r.oracle {
        OracleStatus::Ran => println!("direct     t^L = {}, t_L = {}", opt(&r.tU_direct), opt(&r.tL_direct)),
        OracleStatus::Skipped => println!("direct     oracle skipped"),
        OracleStatus::NotApplicable => {}
    }
    if let Some(u) = r.unit_class {
        println!("cl(U)      {u}");
    }
    if r.tU_jennings.is_some() {
        let m: Vec<String> = r.matches.iter().map(ToString::to_string).collect();
        println!("matches    {}", if m.is_empty() { "none".into() } else { m.join(", ") });
        let l: Vec<String> = r.lemma_cases.iter().map(ToString::to_string).collect();
        if !l.is_empty() {
            println!("d-shape    {}", l.join(", "));
        }
    }
    println!("verdict    {}", r.verdict);
    for c in r.failed_checks() {
        println!("  failed   {}: {}", c.name, c.detail);
    }
}

fn print_json<T: Serialize>(value: &T) {
    println!("{}", serde_json::to_string_pretty(value).expect("reports serialize"));
}

fn analyze_all(specs: &[GroupSpec], opts: &AnalyzeOptions, jobs: usize) -> Result<Vec<AnalysisReport>, Failure> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Failure::Usage(e.to_string()))?;
    let mut reports = pool.install(|| {
        specs
            .par_iter()
            .map(|spec| {
                let g = build(spec)?;
                let mut r = lie_index::analyze(&spec.name, &g, opts).map_err(Failure::from)?;
                for c in spec.pin_checks(&r) {
                    r.push_check(c);
                }
                Ok(r)
            })
            .collect::<Result<Vec<_>, Failure>>()
    })?;
    reports.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(reports)
}

fn survey_line(r: &AnalysisReport) -> String {
    let m: Vec<String> = r.matches.iter().map(ToString::to_string).collect();
    format!(
        "{:<24} {:>5} {:>2} {:>3} {:<16} {:>5} {:>5} {:>5} {:<14} {}",
        r.name,
        r.order,
        r.p,
        opt(&r.cl),
        opt(&r.gprime_type),
        opt(&r.tU_jennings),
        opt(&r.tU_direct),
        opt(&r.tL_direct),
        if m.is_empty() { "-".into() } else { m.join(",") },
        r.verdict,
    )
}

fn print_survey(reports: &[AnalysisReport]) {
    println!(
        "{:<24} {:>5} {:>2} {:>3} {:<16} {:>5} {:>5} {:>5} {:<14} verdict",
        "name", "order", "p", "cl", "G'", "tU", "tU*", "tL*", "matches"
    );
    for r in reports {
        println!("{}", survey_line(r));
    }
}

fn print_summary(s: &CorpusSummary) {
    println!(
        "groups {}, gated {}, direct oracle on {}",
        s.groups, s.gated, s.oracle_ran
    );
    for t in &s.targets {
        println!(
            "{:<10} attained (t^L) {:?}; matched {:?}; iff {}",
            t.formula,
            t.attained_upper,
            t.matched,
            if t.upper_iff { "holds" } else { "FAILS" }
        );
        println!(
            "{:<10} attained (t_L) {:?}; matched with oracle {:?}; iff {}",
            "",
            t.attained_lower,
            t.matched_with_oracle,
            if t.lower_iff { "holds" } else { "FAILS" }
        );
    }
    for (c, w) in &s.coverage {
        if w.is_empty() {
            println!("{c:<7} no witness in corpus: one-directional only");
        } else {
            println!("{c:<7} witnessed by {}", w.join(", "));
        }
    }
    if !s.t2ii_classes.is_empty() {
        println!("T2.ii matches have class {:?}", s.t2ii_classes);
    }
    for e in &s.excluded_shapes {
        println!("excluded d-sequence shape realized: {e}");
    }
    for e in &s.errata {
        let ids = |v: &[ConditionId]| {
            if v.is_empty() {
                "-".to_string()
            } else {
                v.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
            }
        };
        println!(
            "erratum {}: stated reading matches {}, corrected matches {}, t^L = {} ({})",
            e.group,
            ids(&e.stated_matches),
            ids(&e.matches),
            e.tU,
            e.attains.map_or("no target".to_string(), |t| t.formula().to_string()),
        );
    }
}

#[derive(Serialize)]
struct VerifyOutput<'a> {
    reports: &'a [AnalysisReport],
    summary: &'a CorpusSummary,
}

#[derive(Serialize)]
#[allow(non_snake_case)]
struct UnitsOutput<'a> {
    name: &'a str,
    order: usize,
    units: u64,
    unit_class: u64,
    tL_direct: u64,
    consistent: bool,
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Analyze {
            file,
            direct,
            max_dim,
            units,
            p,
            json,
        } => {
            let spec = read_spec(&file)?;
            let g = build(&spec)?;
            let opts = AnalyzeOptions {
                p,
                oracle_cap: max_dim,
                require_oracle: direct,
                unit_cap: units.then_some(DEFAULT_UNIT_CAP),
                ..Default::default()
            };
            let mut r = lie_index::analyze(&spec.name, &g, &opts)?;
            for c in spec.pin_checks(&r) {
                r.push_check(c);
            }
            if json {
                print_json(&r);
            } else {
                print_report(&r);
            }
            if r.verdict == Verdict::Inconsistent {
                return Err(Failure::Verification(format!("{}: verdict inconsistent", r.name)));
            }
        }
        Command::Family { name, params, emit } => {
            let spec = family(&name, &params, element_cap()?)?;
            match emit {
                Some(path) => fs::write(&path, spec.to_json() + "\n")
                    .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?,
                None => println!("{}", spec.to_json()),
            }
        }
        Command::Survey {
            dir,
            jobs,
            max_dim,
            json,
        } => {
            let specs = read_dir_specs(&dir)?;
            let opts = AnalyzeOptions {
                oracle_cap: max_dim,
                ..Default::default()
            };
            let reports = analyze_all(&specs, &opts, jobs)?;
            if json {
                print_json(&reports);
            } else {
                print_survey(&reports);
            }
        }
        Command::Verify {
            dir,
            jobs,
            max_dim,
            json,
        } => {
            let specs = read_dir_specs(&dir)?;
            let opts = AnalyzeOptions {
                oracle_cap: max_dim,
                unit_cap: Some(DEFAULT_UNIT_CAP),
                ..Default::default()
            };
            let reports = analyze_all(&specs, &opts, jobs)?;
            let summary = summarize(&reports);
            if json {
                print_json(&VerifyOutput {
                    reports: &reports,
                    summary: &summary,
                });
            } else {
                for r in &reports {
                    let checks = r.checks.len();
                    match r.verdict {
                        Verdict::Inconsistent => {
                            println!("FAIL {}", r.name);
                            for c in r.failed_checks() {
                                println!("     {}: {}", c.name, c.detail);
                            }
                        }
                        Verdict::Consistent => println!("ok   {} ({checks} checks)", r.name),
                        Verdict::NotApplicable => println!("ok   {} ({}; {checks} checks)", r.name, r.gate),
                    }
                }
                print_summary(&summary);
            }
            if !summary.is_clean() {
                return Err(Failure::Verification(format!(
                    "verification failed: {} inconsistent group(s)",
                    summary.inconsistent.len()
                )));
            }
        }
        Command::Units { file, cap, json } => {
            let spec = read_spec(&file)?;
            let g = build(&spec)?;
            let units = UnitGroup::new(&g, cap)?;
            let class = units.class()? as u64;
            let lower = GroupAlgebra::new(&g, 2)?.lower_lie_chain(g.order())?.index as u64;
            let consistent = class + 1 == lower;
            if json {
                print_json(&UnitsOutput {
                    name: &spec.name,
                    order: g.order(),
                    units: units.order(),
                    unit_class: class,
                    tL_direct: lower,
                    consistent,
                });
            } else {
                println!("group      {}", spec.name);
                println!("|U|        {}", units.order());
                println!("cl(U)      {class}");
                println!("t_L - 1    {}", lower - 1);
            }
            if !consistent {
                return Err(Failure::Verification(format!(
                    "{}: cl(U) = {class} but t_L - 1 = {}",
                    spec.name,
                    lower - 1
                )));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Resource(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(3)
        }
    }
}
