//! Relative Picard triviality through a rank-one exterior quotient, and the base-case
//! checks used by the two-stage descent from A(2) to D(2).

use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::milnor::{HopfAlgebra, Profile};
use crate::module::random_module;
use crate::resolution::Resolution;
use crate::stable::{
    classification_candidates, classify_with, invertible, reduce, test_candidate, Classification, SyzygyTower,
};

/// One point `(n - 2, n|τ| - |B|)` of the obstruction line with `dim Ext_B` there.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObstructionPoint {
    pub n: usize,
    pub s: usize,
    pub t: i32,
    pub dim: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// The relative Picard group vanishes.
    Trivial,
    Undetermined,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DescentReport {
    pub sub: Profile,
    pub amb: Profile,
    pub conormal: bool,
    pub tau: String,
    pub tau_degree: i32,
    pub theta_bidegree: (usize, i32),
    /// An `h_ij` equal to θ, when there is one.
    pub theta_name: Option<String>,
    pub q: usize,
    pub top_b: i32,
    pub inequality_holds: bool,
    pub obstruction_line: Vec<ObstructionPoint>,
    pub verdict: Verdict,
}

/// `dim Ext_B^{n-2, n|τ| - |B|}` for `2 ≤ n ≤ q`; negative internal degrees give 0.
pub fn obstruction_line(sub: &Arc<HopfAlgebra>, tau_degree: i32, q: usize) -> Vec<ObstructionPoint> {
    let top = sub.top_degree();
    let points: Vec<(usize, usize, i32)> = (2..=q).map(|n| (n, n - 2, n as i32 * tau_degree - top)).collect();
    let needed = points
        .iter()
        .filter(|p| p.2 >= 0)
        .map(|p| (p.1, p.2))
        .fold(None, |acc: Option<(usize, i32)>, p| Some(acc.map_or(p, |a| (a.0.max(p.0), a.1.max(p.1)))));
    let res = needed.map(|(s, t)| Resolution::of_unit(sub, s, t));
    points
        .into_iter()
        .map(|(n, s, t)| {
            let dim = match &res {
                Some(r) if t >= 0 => r.ext_dim(s, t),
                _ => 0,
            };
            ObstructionPoint { n, s, t, dim }
        })
        .collect()
}

/// Checks the descent criterion for `sub ⊂ amb`; `cap` bounds the search for the
/// nilpotency order of θ.
pub fn descent_verdict(sub: &Profile, amb: &Profile, cap: usize) -> Result<DescentReport> {
    let a = Arc::new(HopfAlgebra::build(amb.clone())?);
    let b = Arc::new(HopfAlgebra::build(sub.clone())?);
    descent_verdict_with(&b, &a, cap)
}

pub fn descent_verdict_with(b: &Arc<HopfAlgebra>, a: &Arc<HopfAlgebra>, cap: usize) -> Result<DescentReport> {
    let report = a.quotient_pair(b.profile())?;
    let not_exterior = || Error::NotRankOneExterior { sub: b.profile().to_string(), amb: a.profile().to_string() };
    if !report.exterior_rank_one {
        return Err(not_exterior());
    }
    let tau_degree = report.tau_degree.ok_or_else(not_exterior)?;
    let tau = report.tau_name().ok_or_else(not_exterior)?;
    let res = Resolution::of_unit(a, cap, cap as i32 * tau_degree);
    let dim = res.ext_dim(1, tau_degree);
    if dim != 1 {
        return Err(Error::ThetaNotUnique { t: tau_degree, dim });
    }
    let theta = res.basis_class(1, tau_degree, 0)?;
    let theta_name = res.named_classes().into_iter().find(|(_, c)| *c == theta).map(|(n, _)| n);
    let q = res.nilpotency_order(&theta, cap)?.ok_or(Error::CapExhausted { cap })?;
    let top_b = b.top_degree();
    let inequality_holds = (q as i32 + 1) * tau_degree < top_b;
    let line = obstruction_line(b, tau_degree, q);
    let line_vanishes = line.iter().all(|p| p.dim == 0);
    let verdict =
        if report.conormal && (inequality_holds || line_vanishes) { Verdict::Trivial } else { Verdict::Undetermined };
    Ok(DescentReport {
        sub: b.profile().clone(),
        amb: a.profile().clone(),
        conormal: report.conormal,
        tau,
        tau_degree,
        theta_bidegree: (1, tau_degree),
        theta_name,
        q,
        top_b,
        inequality_holds,
        obstruction_line: line,
        verdict,
    })
}

/// Outcome of the syzygy round trip over the base algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SyzygyCheck {
    pub n: i32,
    pub m: i32,
    /// `S^{n,m} ⊗ D S^{n,m}` reduces to the unit.
    pub invertible: bool,
    /// Pairs in the scan box passing the exact stable-isomorphism test.
    pub matches: Vec<(i32, i32)>,
}

impl SyzygyCheck {
    pub fn recovered(&self) -> bool {
        self.invertible && self.matches == [(self.n, self.m)]
    }
}

/// For every `(n, m)` in the box: `S^{n,m}` is invertible and is identified as exactly
/// `(n, m)` among all candidates of the box.
pub fn syzygy_round_trip(alg: &Arc<HopfAlgebra>, n_box: i32, m_box: i32) -> Result<Vec<SyzygyCheck>> {
    let mut tower = SyzygyTower::new(alg.clone());
    let mut out = Vec::new();
    for n in -n_box..=n_box {
        for m in -m_box..=m_box {
            let module = tower.syzygy(n, m);
            let witness = reduce(&module.tensor(&module.dual())?);
            let inv = crate::stable::is_unit(&witness.reduced);
            let reduced = reduce(&module).reduced;
            let mut matches = Vec::new();
            for (cn, cm) in classification_candidates(&mut tower, &reduced, -n_box..=n_box, -m_box..=m_box) {
                if test_candidate(&reduced, &tower.syzygy(cn, cm))? {
                    matches.push((cn, cm));
                }
            }
            out.push(SyzygyCheck { n, m, invertible: inv, matches });
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExoticSearch {
    pub profile: Profile,
    pub seed: u64,
    /// Random draws, including those rejected by the module axioms.
    pub draws: usize,
    /// Draws that define modules.
    pub modules: usize,
    pub invertible: usize,
    /// Invertible draws not located among the syzygies of the scan box.
    pub exotic: Vec<Vec<(i32, usize)>>,
    pub scan_n: i32,
    pub scan_m: i32,
}

/// Draws random modules of total dimension `≤ max_dim` until `target` of them satisfy the
/// module axioms, and classifies every invertible one.
pub fn exotic_search(
    alg: &Arc<HopfAlgebra>,
    target: usize,
    max_dim: usize,
    max_degree: i32,
    seed: u64,
    scan: (i32, i32),
) -> Result<ExoticSearch> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tower = SyzygyTower::new(alg.clone());
    let mut report = ExoticSearch {
        profile: alg.profile().clone(),
        seed,
        draws: 0,
        modules: 0,
        invertible: 0,
        exotic: Vec::new(),
        scan_n: scan.0,
        scan_m: scan.1,
    };
    let draw_cap = target.saturating_mul(100).max(1);
    while report.modules < target && report.draws < draw_cap {
        report.draws += 1;
        let dim = rng.gen_range(1..=max_dim);
        let density = rng.gen_range(0.2..0.8);
        let Some(m) = random_module(alg, dim, max_degree, density, &mut rng) else { continue };
        report.modules += 1;
        if !invertible(&m)?.invertible {
            continue;
        }
        report.invertible += 1;
        if let Classification::Exotic { .. } = classify_with(&mut tower, &m, -scan.0..=scan.0, -scan.1..=scan.1)? {
            report.exotic.push(m.graded_dims());
        }
    }
    Ok(report)
}
