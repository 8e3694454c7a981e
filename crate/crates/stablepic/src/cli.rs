//! Command-line interface.
//!
//! Exit codes: 0 on success, 1 when the computation answers negatively (a module that is not
//! invertible, an undetermined descent, a May run disagreeing with Ext), 2 on usage,
//! document, profile and window errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use stablepic_core::descent::{descent_verdict, exotic_search, syzygy_round_trip, Verdict};
use stablepic_core::may::{compare_einfty_ext, run_ss, standard_table, DifferentialTable};
use stablepic_core::milnor::{HopfAlgebra, Profile};
use stablepic_core::module::GradedModule;
use stablepic_core::resolution::Resolution;
use stablepic_core::stable::{
    classification_candidates, invertible, margolis_homology, reduce, test_candidate, Classification, SyzygyTower,
};

use crate::chart;
use crate::document::{read_json, read_module, to_json, ModuleDocument, TableDocument};
use crate::error::CliError;
use crate::report::*;

/// Worker threads for parallel scans; unset means one per available core.
pub const THREADS_ENV: &str = "STABLEPIC_THREADS";

/// The chain of isomorphisms printed by a successful `pipeline` run.
pub const CONCLUSION: &str = "Pic(A(2)) ≅ Pic(C(2)) ≅ Pic(D(2)) ≅ Z⊕Z";

#[derive(Debug, Parser)]
#[command(name = "stablepic", version, about = "Ext charts, May pages and Picard groups over profile algebras")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, clap::Args)]
pub struct Window {
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub max_s: u32,
    #[arg(long, value_parser = clap::value_parser!(i32).range(1..))]
    pub max_t: i32,
}

#[derive(Debug, clap::Args)]
pub struct ReportArg {
    /// Write the JSON report here.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
pub struct OutputArg {
    /// Write the resulting module document here instead of standard output.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ChartFormat {
    Tsv,
    Svg,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Ext chart of the unit, or of a module document, from a minimal resolution.
    Ext {
        #[arg(long)]
        profile: Option<Profile>,
        #[arg(long)]
        module: Option<PathBuf>,
        #[command(flatten)]
        window: Window,
        #[arg(long, value_enum, default_value = "tsv")]
        format: ChartFormat,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// May spectral sequence through the last page of a differential table.
    May {
        #[arg(long)]
        profile: Profile,
        /// Differential table document; defaults to the built-in table of the profile.
        #[arg(long)]
        table: Option<PathBuf>,
        #[command(flatten)]
        window: Window,
        /// Compare the E-infinity totals with a minimal resolution.
        #[arg(long)]
        compare: bool,
        #[command(flatten)]
        report: ReportArg,
    },
    /// Splits off free summands.
    Reduce {
        module: PathBuf,
        #[command(flatten)]
        output: OutputArg,
        #[command(flatten)]
        report: ReportArg,
    },
    /// Margolis homology for named square-zero elements (all of them by default).
    Margolis {
        module: PathBuf,
        #[arg(long = "element")]
        elements: Vec<String>,
        #[command(flatten)]
        report: ReportArg,
    },
    Tensor {
        left: PathBuf,
        right: PathBuf,
        #[command(flatten)]
        output: OutputArg,
        #[command(flatten)]
        report: ReportArg,
    },
    Dual {
        module: PathBuf,
        #[command(flatten)]
        output: OutputArg,
        #[command(flatten)]
        report: ReportArg,
    },
    /// Restriction to the algebra of a smaller profile.
    Restrict {
        module: PathBuf,
        #[arg(long)]
        sub: Profile,
        #[command(flatten)]
        output: OutputArg,
        #[command(flatten)]
        report: ReportArg,
    },
    /// Stable tensor-invertibility.
    Invertible {
        module: PathBuf,
        #[command(flatten)]
        report: ReportArg,
    },
    /// Locates an invertible module among the S^{n,m} with |n| <= max-n, |m| <= max-m.
    Classify {
        module: PathBuf,
        #[arg(long, default_value_t = 6)]
        max_n: i32,
        #[arg(long, default_value_t = 12)]
        max_m: i32,
        #[command(flatten)]
        report: ReportArg,
    },
    /// The module S^{n,m}: the n-th syzygy of the unit (dual syzygies for n < 0) shifted by m.
    Syzygy {
        #[arg(long)]
        profile: Profile,
        #[arg(long, allow_hyphen_values = true)]
        n: i32,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0)]
        m: i32,
        #[command(flatten)]
        output: OutputArg,
        #[command(flatten)]
        report: ReportArg,
    },
    /// Relative Picard triviality for a rank-one exterior quotient.
    Descent {
        #[arg(long)]
        sub: Profile,
        #[arg(long)]
        amb: Profile,
        /// Largest power of theta tried when computing its nilpotency order.
        #[arg(long, default_value_t = 6)]
        cap: usize,
        #[command(flatten)]
        report: ReportArg,
    },
    /// Both descents from A(2) to D(2) plus the D(2) and exterior base checks.
    Pipeline {
        #[arg(long, default_value_t = 6)]
        cap: usize,
        #[arg(long, default_value_t = 3)]
        box_n: i32,
        #[arg(long, default_value_t = 5)]
        box_m: i32,
        /// Random modules drawn over the rank-two exterior algebra.
        #[arg(long, default_value_t = 10_000)]
        search: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[command(flatten)]
        report: ReportArg,
    },
}

/// Parses `args` (program name first), runs the subcommand and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
                return 2;
            }
            let _ = write!(out, "{text}");
            return 0;
        }
    };
    configure_threads();
    match execute(cli.command, out) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

fn configure_threads() {
    let Some(n) = std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok()) else { return };
    // a second call in the same process keeps the first pool
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Write { path: path.to_path_buf(), source })
}

fn write_report<T: serde::Serialize>(arg: &ReportArg, doc: &T) -> Result<(), CliError> {
    match &arg.report {
        Some(path) => write_file(path, &to_json(doc)),
        None => Ok(()),
    }
}

fn emit_module(m: &GradedModule, output: &OutputArg, out: &mut dyn Write) -> Result<(), CliError> {
    let text = to_json(&ModuleDocument::from_module(m));
    match &output.output {
        Some(path) => write_file(path, &text),
        None => {
            let _ = out.write_all(text.as_bytes());
            Ok(())
        }
    }
}

fn dims_text(dims: &[(i32, usize)]) -> String {
    if dims.is_empty() {
        return "0".to_string();
    }
    dims.iter().map(|(d, n)| format!("{d}:{n}")).collect::<Vec<_>>().join(" ")
}

fn algebra(profile: &Profile) -> Result<Arc<HopfAlgebra>, CliError> {
    Ok(Arc::new(HopfAlgebra::build(profile.clone())?))
}

fn execute(command: Command, out: &mut dyn Write) -> Result<bool, CliError> {
    match command {
        Command::Ext { profile, module, window, format, output } => {
            let (module, res) = match (profile, module) {
                (Some(p), None) => {
                    let alg = algebra(&p)?;
                    let res = Resolution::of_unit(&alg, window.max_s as usize, window.max_t);
                    (GradedModule::unit(alg), res)
                }
                (None, Some(path)) => {
                    let m = read_module(&path)?;
                    let res = Resolution::new(&m, window.max_s as usize, window.max_t);
                    (m, res)
                }
                _ => return Err(CliError::Usage("ext needs exactly one of --profile and --module".to_string())),
            };
            let chart = res.chart();
            let text = match format {
                ChartFormat::Tsv => chart::tsv(&chart),
                ChartFormat::Svg => chart::svg(&chart, &chart::product_lines(&res)),
                ChartFormat::Json => to_json(&ExtDoc::new(&module, &chart)),
            };
            match output {
                Some(path) => write_file(&path, &text)?,
                None => {
                    let _ = out.write_all(text.as_bytes());
                }
            }
            Ok(true)
        }
        Command::May { profile, table, window, compare, report } => {
            let table: DifferentialTable = match table {
                Some(path) => read_json::<TableDocument>(&path)?.to_table(&profile)?,
                None => standard_table(&profile).unwrap_or_default(),
            };
            let (s_max, t_max) = (window.max_s as usize, window.max_t);
            let run = run_ss(&profile, &table, s_max, t_max)?;
            let gens = run.e2.generators();
            let _ = writeln!(out, "May spectral sequence over profile ({profile}), s <= {s_max}, t <= {t_max}");
            for (g, p) in &run.d1_generators {
                let _ = writeln!(out, "d1({g}) = {}", p.format(gens));
            }
            for p in &run.pages {
                let _ = writeln!(out, "page {}: differential rank {}", p.page, p.rank);
            }
            if run.skipped > 0 {
                let _ = writeln!(out, "table entries outside the window: {}", run.skipped);
            }
            let _ = writeln!(out, "E-infinity (s, t, dim):");
            for (s, t, d) in run.einfty.totals() {
                let _ = writeln!(out, "{s}\t{t}\t{d}");
            }
            let mismatches = if compare {
                let alg = algebra(&profile)?;
                let chart = Resolution::of_unit(&alg, s_max, t_max).chart();
                let ms = compare_einfty_ext(&run.einfty, &chart);
                for m in &ms {
                    let _ = writeln!(out, "mismatch at ({}, {}): May {} vs Ext {}", m.s, m.t, m.may, m.ext);
                }
                let _ = writeln!(out, "E-infinity vs Ext: {} mismatches", ms.len());
                Some(ms)
            } else {
                None
            };
            write_report(&report, &MayDoc::new(&run, mismatches.as_deref()))?;
            Ok(mismatches.is_none_or(|ms| ms.is_empty()))
        }
        Command::Reduce { module, output, report } => {
            let m = read_module(&module)?;
            let r = reduce(&m);
            let _ = writeln!(out, "free rank {}; reduced dims {}", r.free_rank, dims_text(&r.reduced.graded_dims()));
            write_report(&report, &ReduceDoc::new(&m, &r))?;
            if output.output.is_some() {
                emit_module(&r.reduced, &output, out)?;
            }
            Ok(true)
        }
        Command::Margolis { module, elements, report } => {
            let m = read_module(&module)?;
            let alg = m.algebra().clone();
            let named = if elements.is_empty() {
                alg.square_zero_generators()
            } else {
                elements.iter().map(|e| alg.named_element(e)).collect::<Result<Vec<_>, _>>()?
            };
            let mut rows = Vec::new();
            for x in &named {
                let h = margolis_homology(&m, x)?;
                let _ = writeln!(out, "H({}) = {}", x.name, dims_text(&h));
                rows.push((x.name.clone(), h));
            }
            write_report(
                &report,
                &MargolisDoc { profile: alg.profile().bounds().to_vec(), homology: homology_docs(&rows) },
            )?;
            Ok(true)
        }
        Command::Tensor { left, right, output, report } => {
            let a = read_json::<ModuleDocument>(&left)?;
            let alg = algebra(&a.profile()?)?;
            let m = a.load_with(alg.clone())?;
            let n = read_json::<ModuleDocument>(&right)?.load_with(alg)?;
            let t = m.tensor(&n)?;
            write_report(&report, &ModuleSummary::new(&t))?;
            emit_module(&t, &output, out)?;
            Ok(true)
        }
        Command::Dual { module, output, report } => {
            let d = read_module(&module)?.dual();
            write_report(&report, &ModuleSummary::new(&d))?;
            emit_module(&d, &output, out)?;
            Ok(true)
        }
        Command::Restrict { module, sub, output, report } => {
            let m = read_module(&module)?;
            let r = m.restrict(&algebra(&sub)?)?;
            write_report(&report, &ModuleSummary::new(&r))?;
            emit_module(&r, &output, out)?;
            Ok(true)
        }
        Command::Invertible { module, report } => {
            let m = read_module(&module)?;
            let c = invertible(&m)?;
            for (name, h) in &c.margolis {
                let _ = writeln!(out, "H({name}) = {}", dims_text(h));
            }
            if let Some(w) = &c.witness {
                let _ = writeln!(
                    out,
                    "M ⊗ DM reduces to {} plus {} free summands",
                    dims_text(&w.reduced_dims),
                    w.free_rank
                );
            }
            let _ = writeln!(out, "{}", if c.invertible { "invertible" } else { "not invertible" });
            write_report(&report, &InvertibleDoc::new(&m, &c))?;
            Ok(c.invertible)
        }
        Command::Classify { module, max_n, max_m, report } => {
            let m = read_module(&module)?;
            let profile = m.algebra().profile().bounds().to_vec();
            if !invertible(&m)?.invertible {
                let _ = writeln!(out, "not invertible");
                write_report(&report, &ClassifyDoc::new(&profile, None, max_n, max_m))?;
                return Ok(false);
            }
            let c = classify_parallel(&m, max_n, max_m)?;
            match &c {
                Classification::Syzygy { n, m } => {
                    let _ = writeln!(out, "stably isomorphic to S^{{{n},{m}}}");
                }
                Classification::Exotic { .. } => {
                    let _ = writeln!(out, "exotic: no S^{{n,m}} with |n| <= {max_n}, |m| <= {max_m} matches");
                }
            }
            write_report(&report, &ClassifyDoc::new(&profile, Some(&c), max_n, max_m))?;
            Ok(true)
        }
        Command::Syzygy { profile, n, m, output, report } => {
            let s = SyzygyTower::new(algebra(&profile)?).syzygy(n, m);
            write_report(&report, &SyzygyDoc { n, m, module: ModuleSummary::new(&s) })?;
            emit_module(&s, &output, out)?;
            Ok(true)
        }
        Command::Descent { sub, amb, cap, report } => {
            let r = descent_verdict(&sub, &amb, cap)?;
            print_descent(out, &r);
            write_report(&report, &DescentDoc::new(&r))?;
            Ok(r.verdict == Verdict::Trivial)
        }
        Command::Pipeline { cap, box_n, box_m, search, seed, report } => {
            pipeline(out, cap, box_n, box_m, search, seed, &report)
        }
    }
}

/// [`stablepic_core::stable::classify_with`], testing the surviving candidates in parallel.
fn classify_parallel(m: &GradedModule, max_n: i32, max_m: i32) -> Result<Classification, CliError> {
    let mut tower = SyzygyTower::new(m.algebra().clone());
    let reduced = reduce(m).reduced;
    let candidates: Vec<((i32, i32), GradedModule)> =
        classification_candidates(&mut tower, &reduced, -max_n..=max_n, -max_m..=max_m)
            .into_iter()
            .map(|(n, s)| ((n, s), tower.syzygy(n, s)))
            .collect();
    let hits: Vec<(i32, i32)> = candidates
        .par_iter()
        .map(|(key, syz)| test_candidate(&reduced, syz).map(|ok| ok.then_some(*key)))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .flatten()
        .collect();
    Ok(match hits.first() {
        Some(&(n, m)) => Classification::Syzygy { n, m },
        None => Classification::Exotic { scan_n: (-max_n, max_n), scan_m: (-max_m, max_m) },
    })
}

fn print_descent(out: &mut dyn Write, r: &stablepic_core::descent::DescentReport) {
    let _ = writeln!(out, "sub ({}) in amb ({})", r.sub, r.amb);
    let _ = writeln!(out, "conormal: {}", if r.conormal { "yes" } else { "no" });
    let theta = r.theta_name.as_deref().unwrap_or("theta");
    let _ = writeln!(out, "τ = {}, |τ| = {}", r.tau, r.tau_degree);
    let _ = writeln!(
        out,
        "θ = {theta} in Ext^({},{}), nilpotency order q = {}",
        r.theta_bidegree.0, r.theta_bidegree.1, r.q
    );
    let _ = writeln!(out, "(|τ|, q, |B|) = ({}, {}, {})", r.tau_degree, r.q, r.top_b);
    let lhs = (r.q as i32 + 1) * r.tau_degree;
    let rel = if r.inequality_holds { "<" } else { ">=" };
    let _ = writeln!(out, "(q+1)|τ| = {lhs} {rel} {} = |B|", r.top_b);
    for p in &r.obstruction_line {
        let _ = writeln!(out, "obstruction n = {}: dim Ext^({},{}) = {}", p.n, p.s, p.t, p.dim);
    }
    let verdict = match r.verdict {
        Verdict::Trivial => "trivial (relative Picard group vanishes)",
        Verdict::Undetermined => "undetermined",
    };
    let _ = writeln!(out, "verdict: {verdict}");
}

const DESCENTS: [([u32; 3], [u32; 3]); 2] = [([1, 2, 1], [2, 2, 1]), ([2, 2, 1], [3, 2, 1])];
const BASE_PROFILE: [u32; 3] = [1, 2, 1];
const EXTERIOR_PROFILE: [u32; 2] = [1, 1];
const SEARCH_MAX_DIM: usize = 5;
const SEARCH_MAX_DEGREE: i32 = 6;
const SEARCH_SCAN: (i32, i32) = (4, 16);

fn pipeline(
    out: &mut dyn Write,
    cap: usize,
    box_n: i32,
    box_m: i32,
    search: usize,
    seed: u64,
    report: &ReportArg,
) -> Result<bool, CliError> {
    let profile = |b: &[u32]| Profile::new(b.to_vec());
    let base = algebra(&profile(&BASE_PROFILE)?)?;
    let exterior = algebra(&profile(&EXTERIOR_PROFILE)?)?;
    let (descents, (round_trip, found)) = rayon::join(
        || {
            DESCENTS
                .par_iter()
                .map(|(sub, amb)| descent_verdict(&profile(sub)?, &profile(amb)?, cap))
                .collect::<Vec<_>>()
        },
        || {
            rayon::join(
                || syzygy_round_trip(&base, box_n, box_m),
                || exotic_search(&exterior, search, SEARCH_MAX_DIM, SEARCH_MAX_DEGREE, seed, SEARCH_SCAN),
            )
        },
    );
    let descents = descents.into_iter().collect::<Result<Vec<_>, _>>()?;
    let round_trip = round_trip?;
    let found = found?;
    let mut ok = true;
    for r in &descents {
        print_descent(out, r);
        let _ = writeln!(out);
        ok &= r.verdict == Verdict::Trivial;
    }
    let recovered = round_trip.iter().filter(|c| c.recovered()).count();
    let all_recovered = recovered == round_trip.len();
    let _ = writeln!(
        out,
        "base case over ({}): {recovered}/{} syzygies S^{{n,m}} with |n| <= {box_n}, |m| <= {box_m} invertible and recovered uniquely",
        base.profile(),
        round_trip.len()
    );
    let _ = writeln!(
        out,
        "exterior search over ({}): {} modules from {} draws, {} invertible, {} exotic",
        exterior.profile(),
        found.modules,
        found.draws,
        found.invertible,
        found.exotic.len()
    );
    ok &= all_recovered && found.exotic.is_empty() && found.modules >= search;
    let conclusion = ok.then(|| CONCLUSION.to_string());
    match &conclusion {
        Some(c) => {
            let _ = writeln!(out, "{c}");
        }
        None => {
            let _ = writeln!(out, "conclusion not reached");
        }
    }
    let doc = PipelineDoc {
        descents: descents.iter().map(DescentDoc::new).collect(),
        base_case: BaseCaseDoc {
            profile: BASE_PROFILE.to_vec(),
            box_n,
            box_m,
            round_trip: round_trip.iter().map(RoundTripDoc::new).collect(),
            all_recovered,
            search: SearchDoc::new(&found),
        },
        conclusion,
    };
    write_report(report, &doc)?;
    Ok(ok)
}
