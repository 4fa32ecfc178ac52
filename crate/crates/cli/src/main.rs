use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use om_milnor::homology::{self, os_betti, HomologyReport, SimplicialComplex};
use om_milnor::io::{self, parse_input, Input};
use om_milnor::milnor::{
    self, check_quasi_fibration, fibration, milnor_report, proof_matching, CircleCell,
};
use om_milnor::oriented_matroid::{validate_axioms, OrientedMatroid};
use om_milnor::poset::{order_complex, Poset};
use om_milnor::subdivision::{rank_subdivide_dual_at, verify_subdivision};
use om_milnor::Error;

#[derive(Parser)]
#[command(
    name = "om-milnor",
    version,
    about = "Combinatorial Milnor fibrations of oriented matroids"
)]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "OM_MILNOR_THREADS")]
    threads: Option<usize>,
    /// Emit JSON instead of a plain-text summary.
    #[arg(long, global = true)]
    json: bool,
    /// Write the main output here instead of stdout.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the covector axioms and simplicity.
    Validate { input: PathBuf },
    /// List all covectors in `om` format.
    Covectors { input: PathBuf },
    /// Rank, counts and the characteristic data of the geometric lattice.
    Info { input: PathBuf },
    /// The Salvetti poset and the homology of its order complex.
    Salvetti {
        input: PathBuf,
        /// Also write the poset in `poset` format.
        #[arg(long)]
        emit_poset: Option<PathBuf>,
    },
    /// Tope-rank subdivision of the dual covector complex, with checks.
    Subdivide {
        input: PathBuf,
        /// Base tope, as an index or a sign string.
        #[arg(long)]
        base: Option<String>,
        #[arg(long)]
        emit_poset: Option<PathBuf>,
    },
    /// Tope-rank subdivision of the Salvetti complex.
    Rksd {
        input: PathBuf,
        #[arg(long)]
        emit_poset: Option<PathBuf>,
    },
    /// Homology of the Milnor fiber.
    Milnor {
        input: PathBuf,
        /// Write the fiberwise Morse matching of (+,+) below (0,+) as `match`/`crit` lines.
        #[arg(long)]
        emit_matching: Option<PathBuf>,
        /// Write the fiber poset in `poset` format.
        #[arg(long)]
        emit_poset: Option<PathBuf>,
    },
    /// Run every verification and report pass/fail per check.
    Check { input: PathBuf },
    /// Homology of a facet list or of the order complex of a `poset` file.
    Homology { input: PathBuf },
    /// Export a complex built from the input.
    Export {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Target::Fiber)]
        complex: Target,
        /// Base tope for `dual`.
        #[arg(long)]
        base: Option<String>,
        /// Facets of the order complex instead of the poset.
        #[arg(long)]
        facets: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    Lattice,
    Salvetti,
    Dual,
    Rksd,
    Fiber,
}

/// Failure classes mapped to exit codes.
enum Failure {
    Check(String),
    Usage(anyhow::Error),
    Internal(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        match e.downcast_ref::<Error>() {
            Some(
                Error::Parse { .. }
                | Error::InvalidArgument(_)
                | Error::InvalidSign(_)
                | Error::LengthMismatch { .. },
            ) => Failure::Usage(e),
            Some(Error::NotATope(_) | Error::UnknownElement(_) | Error::GroundSetTooLarge(_)) => {
                Failure::Usage(e)
            }
            Some(Error::NonSimple(_) | Error::NotAnOrientedMatroid { .. }) => {
                Failure::Check(format!("{e:#}"))
            }
            Some(_) => Failure::Internal(e),
            None if e.downcast_ref::<std::io::Error>().is_some() => Failure::Usage(e),
            None => Failure::Internal(e),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        anyhow::Error::from(e).into()
    }
}

type Outcome = std::result::Result<bool, Failure>;

struct Ctx {
    json: bool,
    output: Option<PathBuf>,
}

impl Ctx {
    fn emit(&self, text: &str) -> anyhow::Result<()> {
        match &self.output {
            Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(text.as_bytes())?;
                Ok(())
            }
        }
    }

    /// JSON when asked for, the text mirror otherwise.
    fn report<T: Serialize>(&self, value: &T, text: impl FnOnce() -> String) -> anyhow::Result<()> {
        if self.json {
            let mut s = serde_json::to_string_pretty(value)?;
            s.push('\n');
            self.emit(&s)
        } else {
            self.emit(&text())
        }
    }
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load(path: &Path) -> anyhow::Result<OrientedMatroid> {
    let text = read(path)?;
    io::load_oriented_matroid(&text).with_context(|| path.display().to_string())
}

fn base_tope(om: &OrientedMatroid, base: Option<&str>) -> anyhow::Result<usize> {
    let Some(b) = base else {
        return Ok(0);
    };
    if let Ok(i) = b.parse::<usize>() {
        if i < om.n_topes() {
            return Ok(i);
        }
        return Err(Error::UnknownElement(i).into());
    }
    Ok(om.require_tope(&b.parse()?)?)
}

fn betti_line(h: &HomologyReport) -> String {
    let mut s = format!("betti {:?}", h.betti);
    if !h.torsion.is_empty() {
        s.push_str(&format!(" torsion {:?}", h.torsion));
    }
    s.push_str(&format!(" euler {}", h.euler));
    s
}

#[derive(Serialize)]
struct Info {
    n: usize,
    rank: usize,
    n_covectors: usize,
    n_topes: usize,
    /// Covectors by height.
    f_vector: Vec<usize>,
    os_betti: Vec<u64>,
    chi_projective: i64,
}

fn cmd_info(ctx: &Ctx, input: &Path) -> Outcome {
    let om = load(input)?;
    let mut f = vec![0; om.rank() + 1];
    for i in 0..om.n_covectors() {
        f[om.height(i)] += 1;
    }
    let os = os_betti(&om.geometric_lattice().0)?;
    let info = Info {
        n: om.ground_size(),
        rank: om.rank(),
        n_covectors: om.n_covectors(),
        n_topes: om.n_topes(),
        f_vector: f,
        os_betti: os.betti,
        chi_projective: os.chi_projective,
    };
    ctx.report(&info, || {
        format!(
            "n {}\nrank {}\ncovectors {}\ntopes {}\nf-vector {:?}\nos-betti {:?}\nchi-projective {}\n",
            info.n, info.rank, info.n_covectors, info.n_topes, info.f_vector, info.os_betti, info.chi_projective
        )
    })?;
    Ok(true)
}

fn cmd_validate(ctx: &Ctx, input: &Path) -> Outcome {
    let text = read(input)?;
    let covectors = match parse_input(&text).with_context(|| input.display().to_string())? {
        Input::Covectors(c) => c,
        Input::Arrangement(arr) => om_milnor::arrangement::from_arrangement(&arr)?
            .covectors()
            .to_vec(),
    };
    let report = validate_axioms(&covectors)?;
    ctx.report(&report, || match &report.violation {
        None => format!(
            "ok: rank {} with {} covectors and {} topes\n",
            report.rank.unwrap_or(0),
            report.n_covectors,
            report.n_topes
        ),
        Some(v) => format!("violation of axiom {}: {}\n", v.axiom, v.witness.join(" ")),
    })?;
    Ok(report.ok)
}

fn cmd_covectors(ctx: &Ctx, input: &Path) -> Outcome {
    let om = load(input)?;
    let list: Vec<String> = om.covectors().iter().map(ToString::to_string).collect();
    if ctx.json {
        ctx.report(&list, String::new)?;
    } else {
        ctx.emit(&io::write_covectors(om.covectors()))?;
    }
    Ok(true)
}

#[derive(Serialize)]
struct ComplexSummary {
    n_cells: usize,
    f_vector: Vec<usize>,
    homology: HomologyReport,
}

fn write_poset_file(path: Option<&PathBuf>, p: &Poset) -> anyhow::Result<()> {
    if let Some(path) = path {
        fs::write(path, io::write_poset(p))
            .with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn cmd_salvetti(ctx: &Ctx, input: &Path, emit: Option<&PathBuf>) -> Outcome {
    let om = load(input)?;
    let s = om_milnor::salvetti::salvetti_poset(&om);
    write_poset_file(emit, &s.poset)?;
    let summary = ComplexSummary {
        n_cells: s.len(),
        f_vector: s.f_vector(),
        homology: homology::poset_homology(&s.poset)?,
    };
    ctx.report(&summary, || {
        format!(
            "cells {} f-vector {:?}\n{}\n",
            summary.n_cells,
            summary.f_vector,
            betti_line(&summary.homology)
        )
    })?;
    Ok(true)
}

fn cmd_subdivide(ctx: &Ctx, input: &Path, base: Option<&str>, emit: Option<&PathBuf>) -> Outcome {
    let om = load(input)?;
    let b = base_tope(&om, base)?;
    if emit.is_some() {
        write_poset_file(emit, &rank_subdivide_dual_at(&om, b)?.poset)?;
    }
    let r = verify_subdivision(&om, &om.tope(b))?;
    ctx.report(&r, || {
        format!(
            "base {} f-vector {:?} euler {}\nball {} spherical-intervals {} projection {} partition {}\n{}\n",
            r.base,
            r.f_vector,
            r.euler,
            r.ball,
            r.spherical_intervals,
            r.projection_ok,
            r.partition_ok,
            if r.ok { "ok" } else { "FAILED" }
        )
    })?;
    Ok(r.ok)
}

#[derive(Serialize)]
struct RksdSummary {
    n_cells: usize,
    f_vector: Vec<usize>,
    euler: i64,
    homology: HomologyReport,
    salvetti_homology: HomologyReport,
    same_homology: bool,
}

fn cmd_rksd(ctx: &Ctx, input: &Path, emit: Option<&PathBuf>) -> Outcome {
    let om = load(input)?;
    let sd = om_milnor::subdivision::rank_subdivide_salvetti(&om)?;
    write_poset_file(emit, &sd.poset)?;
    let h = homology::poset_homology(&sd.poset)?;
    let hs = homology::poset_homology(&sd.salvetti.poset)?;
    let r = RksdSummary {
        n_cells: sd.len(),
        f_vector: sd.f_vector(),
        euler: sd.euler_characteristic(),
        same_homology: h == hs,
        homology: h,
        salvetti_homology: hs,
    };
    ctx.report(&r, || {
        format!(
            "cells {} f-vector {:?}\n{}\nsalvetti {}\n",
            r.n_cells,
            r.f_vector,
            betti_line(&r.homology),
            betti_line(&r.salvetti_homology)
        )
    })?;
    Ok(r.same_homology)
}

fn cmd_milnor(
    ctx: &Ctx,
    input: &Path,
    matching: Option<&PathBuf>,
    emit: Option<&PathBuf>,
) -> Outcome {
    let om = load(input)?;
    let fib = fibration(&om)?;
    if let Some(path) = matching {
        let pm = proof_matching(&om, &fib, CircleCell::PP, CircleCell::ZP)?;
        fs::write(path, pm.export()).with_context(|| format!("writing {}", path.display()))?;
    }
    if emit.is_some() {
        write_poset_file(emit, &milnor::milnor_fiber(&fib)?.poset)?;
    }
    let r = milnor_report(&om, &fib)?;
    ctx.report(&r, || {
        let mut s = format!("fiber cells {}\nbetti {:?}\n", r.fiber_cells, r.betti);
        if !r.torsion.is_empty() {
            s.push_str(&format!("torsion {:?}\n", r.torsion));
        }
        s.push_str(&format!(
            "euler {} = {} * {}: {}\n",
            r.euler, r.n, r.chi_projective, r.euler_identity_ok
        ));
        s
    })?;
    Ok(r.euler_identity_ok)
}

#[derive(Serialize)]
struct Check {
    name: String,
    ok: bool,
    detail: String,
}

impl Check {
    fn new(name: impl Into<String>, ok: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            ok,
            detail: detail.into(),
        }
    }
}

#[derive(Serialize)]
struct CheckReport {
    checks: Vec<Check>,
    ok: bool,
}

fn cmd_check(ctx: &Ctx, input: &Path) -> Outcome {
    let om = load(input)?;
    let mut checks = Vec::new();
    let v = validate_axioms(om.covectors())?;
    checks.push(Check::new(
        "axioms",
        v.ok,
        format!("{} covectors", v.n_covectors),
    ));

    for t in om.topes() {
        let r = verify_subdivision(&om, t)?;
        let detail = format!(
            "f-vector {:?} euler {} ball {} spherical-intervals {} projection {} partition {}",
            r.f_vector, r.euler, r.ball, r.spherical_intervals, r.projection_ok, r.partition_ok
        );
        checks.push(Check::new(format!("subdivision {t}"), r.ok, detail));
    }

    let fib = fibration(&om)?;
    let hs = homology::poset_homology(&fib.sd.salvetti.poset)?;
    let os = os_betti(&om.geometric_lattice().0)?;
    let hs_betti: Vec<u64> = hs.betti.iter().map(|&b| b as u64).collect();
    checks.push(Check::new(
        "salvetti vs lattice",
        hs_betti == os.betti && hs.torsion.is_empty(),
        format!("salvetti {:?} lattice {:?}", hs.betti, os.betti),
    ));
    let hr = homology::poset_homology(&fib.sd.poset)?;
    checks.push(Check::new(
        "rksd vs salvetti",
        hr == hs,
        format!("rksd {} salvetti {}", betti_line(&hr), betti_line(&hs)),
    ));

    let q = check_quasi_fibration(&fib)?;
    let fibers: Vec<String> = q
        .fibers
        .iter()
        .map(|f| format!("{} {:?}", f.cell, f.homology.betti))
        .collect();
    checks.push(Check::new(
        "fibers agree",
        q.fibers_agree,
        fibers.join(", "),
    ));
    for inc in &q.inclusions {
        checks.push(Check::new(
            format!("inclusion {} < {}", inc.vertex, inc.edge),
            inc.isomorphism,
            format!("relative {}", betti_line(&inc.relative)),
        ));
    }

    for a in [CircleCell::PP, CircleCell::MM] {
        for b in [CircleCell::ZP, CircleCell::ZM] {
            let name = format!("matching {a} < {b}");
            checks.push(match proof_matching(&om, &fib, a, b) {
                Ok(pm) => Check::new(
                    name,
                    true,
                    format!("{} pairs, {} critical", pm.pairs.len(), pm.critical.len()),
                ),
                Err(e) => Check::new(name, false, e.to_string()),
            });
        }
    }

    let r = milnor_report(&om, &fib)?;
    checks.push(Check::new(
        "euler identity",
        r.euler_identity_ok,
        format!("{} = {} * {}", r.euler, r.n, r.chi_projective),
    ));

    let ok = checks.iter().all(|c| c.ok);
    let report = CheckReport { checks, ok };
    ctx.report(&report, || {
        let mut s = String::new();
        for c in &report.checks {
            s.push_str(&format!(
                "{} {}: {}\n",
                if c.ok { "pass" } else { "FAIL" },
                c.name,
                c.detail
            ));
        }
        s
    })?;
    Ok(ok)
}

fn cmd_homology(ctx: &Ctx, input: &Path) -> Outcome {
    let text = read(input)?;
    let is_poset = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .find(|l| !l.is_empty())
        .is_some_and(|l| l.starts_with("poset"));
    let h = if is_poset {
        homology::poset_homology(&io::parse_poset(&text)?)?
    } else {
        let facets = io::parse_facets(&text)?;
        let n = facets.iter().flatten().map(|&v| v + 1).max().unwrap_or(0);
        homology::homology(&SimplicialComplex::from_facets(n, &facets))?
    };
    ctx.report(&h, || format!("{}\n", betti_line(&h)))?;
    Ok(true)
}

fn cmd_export(
    ctx: &Ctx,
    input: &Path,
    target: Target,
    base: Option<&str>,
    facets: bool,
) -> Outcome {
    let om = load(input)?;
    let poset = match target {
        Target::Lattice => om.geometric_lattice().0,
        Target::Salvetti => om_milnor::salvetti::salvetti_poset(&om).poset,
        Target::Dual => rank_subdivide_dual_at(&om, base_tope(&om, base)?)?.poset,
        Target::Rksd => om_milnor::subdivision::rank_subdivide_salvetti(&om)?.poset,
        Target::Fiber => milnor::milnor_fiber(&fibration(&om)?)?.poset,
    };
    if facets {
        ctx.emit(&io::write_facets(&order_complex(&poset).facets))?;
    } else {
        ctx.emit(&io::write_poset(&poset))?;
    }
    Ok(true)
}

fn run(cli: Cli) -> Outcome {
    let ctx = Ctx {
        json: cli.json,
        output: cli.output,
    };
    match &cli.command {
        Command::Validate { input } => cmd_validate(&ctx, input),
        Command::Covectors { input } => cmd_covectors(&ctx, input),
        Command::Info { input } => cmd_info(&ctx, input),
        Command::Salvetti { input, emit_poset } => cmd_salvetti(&ctx, input, emit_poset.as_ref()),
        Command::Subdivide {
            input,
            base,
            emit_poset,
        } => cmd_subdivide(&ctx, input, base.as_deref(), emit_poset.as_ref()),
        Command::Rksd { input, emit_poset } => cmd_rksd(&ctx, input, emit_poset.as_ref()),
        Command::Milnor {
            input,
            emit_matching,
            emit_poset,
        } => cmd_milnor(&ctx, input, emit_matching.as_ref(), emit_poset.as_ref()),
        Command::Check { input } => cmd_check(&ctx, input),
        Command::Homology { input } => cmd_homology(&ctx, input),
        Command::Export {
            input,
            complex,
            base,
            facets,
        } => cmd_export(&ctx, input, *complex, base.as_deref(), *facets),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Check(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
