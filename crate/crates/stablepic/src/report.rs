//! Machine-readable reports, one document type per subcommand.

use serde::Serialize;
use stablepic_core::descent::{DescentReport, ExoticSearch, SyzygyCheck, Verdict};
use stablepic_core::may::{MayRun, Mismatch};
use stablepic_core::module::GradedModule;
use stablepic_core::resolution::ExtChart;
use stablepic_core::stable::{Classification, PicardCertificate, ReductionResult};

#[derive(Clone, Debug, Serialize)]
pub struct DegreeDim {
    pub degree: i32,
    pub dim: usize,
}

pub fn degree_dims(dims: &[(i32, usize)]) -> Vec<DegreeDim> {
    dims.iter().map(|&(degree, dim)| DegreeDim { degree, dim }).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct Entry {
    pub s: usize,
    pub t: i32,
    pub dim: usize,
}

fn entries(rows: &[(usize, i32, usize)]) -> Vec<Entry> {
    rows.iter().map(|&(s, t, dim)| Entry { s, t, dim }).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct ModuleSummary {
    pub profile: Vec<u32>,
    pub total_dim: usize,
    pub dims: Vec<DegreeDim>,
}

impl ModuleSummary {
    pub fn new(m: &GradedModule) -> Self {
        ModuleSummary {
            profile: m.algebra().profile().bounds().to_vec(),
            total_dim: m.total_dim(),
            dims: degree_dims(&m.graded_dims()),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ExtDoc {
    pub profile: Vec<u32>,
    pub module: ModuleSummary,
    pub s_max: usize,
    pub t_max: i32,
    pub entries: Vec<Entry>,
}

impl ExtDoc {
    pub fn new(module: &GradedModule, chart: &ExtChart) -> Self {
        ExtDoc {
            profile: chart.profile.bounds().to_vec(),
            module: ModuleSummary::new(module),
            s_max: chart.s_max,
            t_max: chart.t_max,
            entries: entries(&chart.entries()),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct D1Doc {
    pub generator: String,
    pub value: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct PageDoc {
    pub page: usize,
    pub rank: usize,
    pub totals: Vec<Entry>,
}

#[derive(Clone, Debug, Serialize)]
pub struct MismatchDoc {
    pub s: usize,
    pub t: i32,
    pub may: usize,
    pub ext: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct MayDoc {
    pub profile: Vec<u32>,
    pub s_max: usize,
    pub t_max: i32,
    pub d1: Vec<D1Doc>,
    pub pages: Vec<PageDoc>,
    pub einfty: Vec<Entry>,
    pub skipped_entries: usize,
    /// Present when the run was compared with an Ext chart.
    pub mismatches: Option<Vec<MismatchDoc>>,
}

impl MayDoc {
    pub fn new(run: &MayRun, mismatches: Option<&[Mismatch]>) -> Self {
        let gens = run.e2.generators();
        MayDoc {
            profile: run.e2.profile.bounds().to_vec(),
            s_max: run.e2.s_max,
            t_max: run.e2.t_max,
            d1: run.d1_generators.iter().map(|(g, p)| D1Doc { generator: g.clone(), value: p.format(gens) }).collect(),
            pages: run
                .pages
                .iter()
                .map(|p| PageDoc { page: p.page, rank: p.rank, totals: entries(&p.totals) })
                .collect(),
            einfty: entries(&run.einfty.totals()),
            skipped_entries: run.skipped,
            mismatches: mismatches
                .map(|ms| ms.iter().map(|m| MismatchDoc { s: m.s, t: m.t, may: m.may, ext: m.ext }).collect()),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ReduceDoc {
    pub profile: Vec<u32>,
    pub original: Vec<DegreeDim>,
    pub reduced: Vec<DegreeDim>,
    pub free_rank: usize,
    pub free_generator_degrees: Vec<i32>,
}

impl ReduceDoc {
    pub fn new(original: &GradedModule, r: &ReductionResult) -> Self {
        ReduceDoc {
            profile: original.algebra().profile().bounds().to_vec(),
            original: degree_dims(&original.graded_dims()),
            reduced: degree_dims(&r.reduced.graded_dims()),
            free_rank: r.free_rank,
            free_generator_degrees: r.free_generators.iter().map(|g| g.0).collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct HomologyDoc {
    pub element: String,
    pub total: usize,
    pub dims: Vec<DegreeDim>,
}

#[derive(Clone, Debug, Serialize)]
pub struct MargolisDoc {
    pub profile: Vec<u32>,
    pub homology: Vec<HomologyDoc>,
}

pub fn homology_docs(rows: &[(String, Vec<(i32, usize)>)]) -> Vec<HomologyDoc> {
    rows.iter()
        .map(|(name, h)| HomologyDoc {
            element: name.clone(),
            total: h.iter().map(|x| x.1).sum(),
            dims: degree_dims(h),
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct WitnessDoc {
    pub reduced: Vec<DegreeDim>,
    pub free_rank: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct InvertibleDoc {
    pub profile: Vec<u32>,
    pub invertible: bool,
    pub margolis_filter_passed: bool,
    pub margolis: Vec<HomologyDoc>,
    /// Reduction of `M ⊗ DM`.
    pub witness: Option<WitnessDoc>,
}

impl InvertibleDoc {
    pub fn new(m: &GradedModule, c: &PicardCertificate) -> Self {
        InvertibleDoc {
            profile: m.algebra().profile().bounds().to_vec(),
            invertible: c.invertible,
            margolis_filter_passed: c.margolis_filter_passed,
            margolis: homology_docs(&c.margolis),
            witness: c
                .witness
                .as_ref()
                .map(|w| WitnessDoc { reduced: degree_dims(&w.reduced_dims), free_rank: w.free_rank }),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassifyDoc {
    pub profile: Vec<u32>,
    pub invertible: bool,
    /// `syzygy`, `exotic`, or `not-invertible`.
    pub classification: String,
    pub n: Option<i32>,
    pub m: Option<i32>,
    pub scan_n: [i32; 2],
    pub scan_m: [i32; 2],
}

impl ClassifyDoc {
    pub fn new(profile: &[u32], c: Option<&Classification>, scan_n: i32, scan_m: i32) -> Self {
        let (classification, n, m) = match c {
            None => ("not-invertible", None, None),
            Some(Classification::Syzygy { n, m }) => ("syzygy", Some(*n), Some(*m)),
            Some(Classification::Exotic { .. }) => ("exotic", None, None),
        };
        ClassifyDoc {
            profile: profile.to_vec(),
            invertible: c.is_some(),
            classification: classification.to_string(),
            n,
            m,
            scan_n: [-scan_n, scan_n],
            scan_m: [-scan_m, scan_m],
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SyzygyDoc {
    pub n: i32,
    pub m: i32,
    pub module: ModuleSummary,
}

#[derive(Clone, Debug, Serialize)]
pub struct ObstructionDoc {
    pub n: usize,
    pub s: usize,
    pub t: i32,
    pub dim: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct DescentDoc {
    pub sub: Vec<u32>,
    pub amb: Vec<u32>,
    pub conormal: bool,
    pub tau: String,
    pub tau_degree: i32,
    pub theta_bidegree: [i64; 2],
    pub theta_name: Option<String>,
    pub q: usize,
    pub top_b: i32,
    pub inequality_holds: bool,
    pub obstruction_line: Vec<ObstructionDoc>,
    /// `trivial` or `undetermined`.
    pub verdict: String,
}

pub fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Trivial => "trivial",
        Verdict::Undetermined => "undetermined",
    }
}

impl DescentDoc {
    pub fn new(r: &DescentReport) -> Self {
        DescentDoc {
            sub: r.sub.bounds().to_vec(),
            amb: r.amb.bounds().to_vec(),
            conormal: r.conormal,
            tau: r.tau.clone(),
            tau_degree: r.tau_degree,
            theta_bidegree: [r.theta_bidegree.0 as i64, r.theta_bidegree.1 as i64],
            theta_name: r.theta_name.clone(),
            q: r.q,
            top_b: r.top_b,
            inequality_holds: r.inequality_holds,
            obstruction_line: r
                .obstruction_line
                .iter()
                .map(|p| ObstructionDoc { n: p.n, s: p.s, t: p.t, dim: p.dim })
                .collect(),
            verdict: verdict_name(r.verdict).to_string(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RoundTripDoc {
    pub n: i32,
    pub m: i32,
    pub invertible: bool,
    pub matches: Vec<[i32; 2]>,
    pub recovered: bool,
}

impl RoundTripDoc {
    pub fn new(c: &SyzygyCheck) -> Self {
        RoundTripDoc {
            n: c.n,
            m: c.m,
            invertible: c.invertible,
            matches: c.matches.iter().map(|&(a, b)| [a, b]).collect(),
            recovered: c.recovered(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchDoc {
    pub profile: Vec<u32>,
    pub seed: u64,
    pub draws: usize,
    pub modules: usize,
    pub invertible: usize,
    pub exotic: Vec<Vec<DegreeDim>>,
    pub scan_n: i32,
    pub scan_m: i32,
}

impl SearchDoc {
    pub fn new(s: &ExoticSearch) -> Self {
        SearchDoc {
            profile: s.profile.bounds().to_vec(),
            seed: s.seed,
            draws: s.draws,
            modules: s.modules,
            invertible: s.invertible,
            exotic: s.exotic.iter().map(|d| degree_dims(d)).collect(),
            scan_n: s.scan_n,
            scan_m: s.scan_m,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BaseCaseDoc {
    pub profile: Vec<u32>,
    pub box_n: i32,
    pub box_m: i32,
    pub round_trip: Vec<RoundTripDoc>,
    pub all_recovered: bool,
    pub search: SearchDoc,
}

#[derive(Clone, Debug, Serialize)]
pub struct PipelineDoc {
    pub descents: Vec<DescentDoc>,
    pub base_case: BaseCaseDoc,
    /// Printed only when every step succeeds.
    pub conclusion: Option<String>,
}
