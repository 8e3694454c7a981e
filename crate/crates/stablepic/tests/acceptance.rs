//! Acceptance suite: one PASS/FAIL line per criterion, each with a pinned tolerance and a
//! runtime budget. Runs without the libtest harness so the lines always reach the terminal.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stablepic::cli::{self, CONCLUSION};
use stablepic::document::{read_json, ModuleDocument, TableDocument};
use stablepic_core::descent::{descent_verdict, exotic_search, syzygy_round_trip, Verdict};
use stablepic_core::f2::{BitVec, Subspace};
use stablepic_core::may::{compare_einfty_ext, run_ss, standard_table, DifferentialTable};
use stablepic_core::milnor::{HopfAlgebra, Profile};
use stablepic_core::module::{random_module, GradedModule};
use stablepic_core::resolution::Resolution;
use stablepic_core::stable::{classify_picard, invertible, is_unit, margolis_homology, reduce, total, Classification};

type Outcome = Result<String, String>;

/// `(name, runtime budget in seconds, check)`.
type Criterion = (&'static str, u64, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn profile(b: &[u32]) -> Profile {
    Profile::new(b.to_vec()).unwrap()
}

fn algebra(b: &[u32]) -> Arc<HopfAlgebra> {
    Arc::new(HopfAlgebra::build(profile(b)).unwrap())
}

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

/// Monomials of `F2[h10, h20, h21, b30]/(h10 h21)` with bidegrees (1,1), (1,3), (1,6), (2,14)
/// counted by `(s, t)`.
fn d2_monomial_counts(s_max: usize, t_max: i32) -> BTreeMap<(usize, i32), usize> {
    let mut counts = BTreeMap::new();
    for d in 0..=s_max / 2 {
        for a in 0..=s_max {
            for b in 0..=s_max {
                for c in 0..=s_max {
                    if a > 0 && c > 0 {
                        continue;
                    }
                    let s = a + b + c + 2 * d;
                    let t = (a + 3 * b + 6 * c + 14 * d) as i32;
                    if s <= s_max && t <= t_max {
                        *counts.entry((s, t)).or_insert(0) += 1;
                    }
                }
            }
        }
    }
    counts
}

fn criterion_1() -> Outcome {
    let chart = Resolution::of_unit(&algebra(&[1, 2, 1]), 10, 30).chart();
    let oracle = d2_monomial_counts(10, 30);
    let mut checked = 0;
    for s in 0..=10 {
        for t in 0..=30 {
            let want = oracle.get(&(s, t)).copied().unwrap_or(0);
            ensure!(chart.dim(s, t) == want, "Ext^({s},{t}) = {} but the monomial count is {want}", chart.dim(s, t));
            checked += 1;
        }
    }
    Ok(format!("{checked} bidegrees match, {} nonzero", oracle.len()))
}

fn criterion_2() -> Outcome {
    let p = profile(&[1, 2, 1]);
    let table = standard_table(&p).ok_or("no table for D(2)")?;
    ensure!(table.entries.is_empty(), "D(2) table has {} entries", table.entries.len());
    let run = run_ss(&p, &table, 10, 30).map_err(|e| e.to_string())?;
    let gens = run.e2.generators();
    let d1: Vec<(String, String)> = run.d1_generators.iter().map(|(g, v)| (g.clone(), v.format(gens))).collect();
    ensure!(d1 == [("h30".to_string(), "h10h21".to_string())], "d1 on generators: {d1:?}");
    ensure!(run.e2.totals() == run.einfty.totals(), "E2 differs from E-infinity");
    let oracle = d2_monomial_counts(10, 30);
    for s in 0..=10 {
        for t in 0..=30 {
            let want = oracle.get(&(s, t)).copied().unwrap_or(0);
            ensure!(run.e2.total_dim(s, t) == want, "E2 at ({s},{t}) is {} not {want}", run.e2.total_dim(s, t));
        }
    }
    Ok("d1(h30) = h10h21 is the only generator differential; E2 = E-infinity = monomial counts".to_string())
}

fn nilpotency(bounds: &[u32], name: &str, s: usize, t: i32) -> Result<(bool, bool), String> {
    let res = Resolution::of_unit(&algebra(bounds), s, t);
    let x = res.named_class(name).map_err(|e| e.to_string())?;
    let x2 = res.yoneda_product(&x, &x).map_err(|e| e.to_string())?;
    let x3 = res.yoneda_product(&x, &x2).map_err(|e| e.to_string())?;
    Ok((x2.is_zero(), x3.is_zero()))
}

fn criterion_3() -> Outcome {
    let res = Resolution::of_unit(&algebra(&[1, 2, 1]), 2, 7);
    let h10 = res.named_class("h10").map_err(|e| e.to_string())?;
    let h21 = res.named_class("h21").map_err(|e| e.to_string())?;
    ensure!(res.yoneda_product(&h10, &h21).map_err(|e| e.to_string())?.is_zero(), "h10 h21 != 0 over D(2)");
    ensure!(nilpotency(&[2, 2, 1], "h11", 3, 6)? == (false, true), "h11 over C(2) is not of nilpotency order 3");
    ensure!(nilpotency(&[3, 2, 1], "h12", 3, 12)? == (false, true), "h12 over A(2) is not of nilpotency order 3");
    Ok("h10h21 = 0 (D(2)); h11^2 != 0 = h11^3 (C(2)); h12^2 != 0 = h12^3 (A(2))".to_string())
}

fn criterion_4() -> Outcome {
    let expected = [([1, 2, 1], [2, 2, 1], (2, 3, 17)), ([2, 2, 1], [3, 2, 1], (4, 3, 19))];
    for (sub, amb, want) in expected {
        let r = descent_verdict(&profile(&sub), &profile(&amb), 6).map_err(|e| e.to_string())?;
        ensure!((r.tau_degree, r.q, r.top_b) == want, "{sub:?} in {amb:?}: got {:?}", (r.tau_degree, r.q, r.top_b));
        ensure!(r.conormal && r.inequality_holds, "{sub:?} in {amb:?}: criterion hypotheses fail");
        ensure!(r.verdict == Verdict::Trivial, "{sub:?} in {amb:?}: verdict {:?}", r.verdict);
    }
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = cli::run(["stablepic", "pipeline"], &mut out, &mut err);
    let text = String::from_utf8_lossy(&out);
    ensure!(code == 0, "pipeline exited {code}: {}", String::from_utf8_lossy(&err));
    ensure!(text.contains(CONCLUSION), "pipeline output lacks the conclusion");
    Ok(format!("(2,3,17) with 8 < 17 and (4,3,19) with 16 < 19, both trivial; pipeline prints {CONCLUSION}"))
}

fn criterion_5() -> Outcome {
    let doc: ModuleDocument = read_json(&data("joker.json")).map_err(|e| e.to_string())?;
    let j = doc.load().map_err(|e| e.to_string())?;
    ensure!(j.graded_dims() == [(0, 1), (1, 1), (2, 1), (3, 1), (4, 1)], "Joker dims {:?}", j.graded_dims());
    let cert = invertible(&j).map_err(|e| e.to_string())?;
    ensure!(cert.invertible, "Joker not invertible");
    let r = reduce(&j.tensor(&j.dual()).map_err(|e| e.to_string())?);
    ensure!(
        is_unit(&r.reduced) && r.free_rank == 3,
        "J (x) DJ reduces to {:?} + {} free",
        r.reduced.graded_dims(),
        r.free_rank
    );
    for name in ["Q0", "Q1"] {
        let x = j.algebra().named_element(name).map_err(|e| e.to_string())?;
        let h = margolis_homology(&j, &x).map_err(|e| e.to_string())?;
        ensure!(h == [(2, 1)], "H(J; {name}) = {h:?}");
    }
    let c = classify_picard(&j, -6..=6, -12..=12).map_err(|e| e.to_string())?;
    ensure!(matches!(c, Classification::Exotic { .. }), "Joker classified as {c:?}");
    Ok("invertible, J(x)DJ = S + 3 free, H(Q0) = H(Q1) = F2 in degree 2, exotic for |n| <= 6, |m| <= 12".to_string())
}

fn criterion_6() -> Outcome {
    let search = exotic_search(&algebra(&[1, 1]), 10_000, 5, 6, 7, (4, 16)).map_err(|e| e.to_string())?;
    ensure!(search.modules >= 10_000, "only {} modules drawn", search.modules);
    ensure!(search.exotic.is_empty(), "exotic candidates over the exterior algebra: {:?}", search.exotic);
    let checks = syzygy_round_trip(&algebra(&[1, 2, 1]), 3, 5).map_err(|e| e.to_string())?;
    ensure!(checks.len() == 7 * 11, "{} round-trip checks", checks.len());
    if let Some(bad) = checks.iter().find(|c| !c.recovered()) {
        return Err(format!("S^({},{}) not recovered: {bad:?}", bad.n, bad.m));
    }
    Ok(format!(
        "{} exterior modules ({} invertible), none exotic; 77 D(2) syzygies invertible and recovered uniquely",
        search.modules, search.invertible
    ))
}

fn span_dim(vectors: &[(i32, BitVec)]) -> usize {
    let mut by_degree: BTreeMap<i32, Vec<&BitVec>> = BTreeMap::new();
    for (d, v) in vectors {
        by_degree.entry(*d).or_default().push(v);
    }
    by_degree.values().map(|vs| Subspace::spanned_by(vs[0].len(), vs.iter().copied()).dim()).sum()
}

/// `A·m` for a homogeneous `m`, as the span of the images of every basis element.
fn orbit_dim(m: &GradedModule, d: i32, v: &BitVec) -> usize {
    let alg = m.algebra();
    let images: Vec<(i32, BitVec)> = (0..alg.dimension())
        .filter(|&b| m.dim_in(d + alg.degree(b)) > 0)
        .map(|b| (d + alg.degree(b), m.act(b, d, v)))
        .filter(|(_, w)| !w.is_zero())
        .collect();
    span_dim(&images)
}

/// Some homogeneous vector generates a copy of `A`; such a copy is a summand because free
/// modules are injective.
fn brute_force_free_summand(m: &GradedModule) -> bool {
    let n = m.algebra().dimension();
    m.degrees().any(|d| {
        let k = m.dim_in(d);
        (1u64..1 << k).any(|mask| {
            let v = BitVec::from_ones(k, (0..k).filter(|i| mask >> i & 1 == 1));
            orbit_dim(m, d, &v) == n
        })
    })
}

fn random_small(alg: &Arc<HopfAlgebra>, rng: &mut ChaCha8Rng, max_dim: usize) -> GradedModule {
    loop {
        let dim = rng.gen_range(1..=max_dim);
        let density = rng.gen_range(0.2..0.9);
        if let Some(m) = random_module(alg, dim, 8, density, rng) {
            return m;
        }
    }
}

fn x_rank(m: &GradedModule, index: usize) -> usize {
    let deg = m.algebra().degree(index);
    m.degrees()
        .map(|d| {
            let k = m.dim_in(d);
            let images: Vec<(i32, BitVec)> = (0..k).map(|i| (d + deg, m.act(index, d, &BitVec::unit(k, i)))).collect();
            if m.dim_in(d + deg) == 0 {
                0
            } else {
                span_dim(&images)
            }
        })
        .sum()
}

fn convolve(a: &[(i32, usize)], b: &[(i32, usize)]) -> Vec<(i32, usize)> {
    let mut acc: BTreeMap<i32, usize> = BTreeMap::new();
    for &(d, x) in a {
        for &(e, y) in b {
            *acc.entry(d + e).or_default() += x * y;
        }
    }
    acc.into_iter().filter(|x| x.1 > 0).collect()
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7a11);
    let mut counts = [0usize; 5];
    // documents shipped with the tool
    let doc: ModuleDocument = read_json(&data("joker.json")).map_err(|e| e.to_string())?;
    doc.load().map_err(|e| e.to_string())?.check_axioms().map_err(|e| e.to_string())?;
    for bounds in [&[1, 1][..], &[2, 1], &[1, 2, 1]] {
        let alg = algebra(bounds);
        let top = alg.dimension();
        for _ in 0..40 {
            let m = random_small(&alg, &mut rng, 6);
            let n = random_small(&alg, &mut rng, 4);
            m.check_axioms().map_err(|e| e.to_string())?;
            // round trip through the document format, then axioms again
            let reloaded = ModuleDocument::from_module(&m).load_with(alg.clone()).map_err(|e| e.to_string())?;
            ensure!(reloaded == m, "document round trip changed a module over {bounds:?}");
            let mn = m.tensor(&n).map_err(|e| e.to_string())?;
            mn.check_axioms().map_err(|e| e.to_string())?;
            counts[0] += 1;
            for x in alg.square_zero_generators() {
                let h = margolis_homology(&m, &x).map_err(|e| e.to_string())?;
                ensure!(
                    m.total_dim() == 2 * x_rank(&m, x.index) + total(&h),
                    "dimension identity fails for {} over {bounds:?}",
                    x.name
                );
                counts[1] += 1;
                if x.name.starts_with('Q') {
                    let lhs = margolis_homology(&mn, &x).map_err(|e| e.to_string())?;
                    let rhs = convolve(&h, &margolis_homology(&n, &x).map_err(|e| e.to_string())?);
                    ensure!(lhs == rhs, "Kunneth fails for {} over {bounds:?}: {lhs:?} vs {rhs:?}", x.name);
                    counts[2] += 1;
                }
            }
            // small modules with and without free summands, total dim <= 2 dim(alg)
            let candidate = if rng.gen_bool(0.5) {
                let shift = rng.gen_range(0..4);
                let small = random_small(&alg, &mut rng, top);
                small.direct_sum(&GradedModule::free(alg.clone(), &[shift])).map_err(|e| e.to_string())?
            } else {
                random_small(&alg, &mut rng, 2 * top)
            };
            if candidate.total_dim() <= 2 * top {
                let r = reduce(&candidate);
                ensure!(reduce(&r.reduced).free_rank == 0, "reduction is not idempotent over {bounds:?}");
                let omega = alg.top_index();
                let omega_acts = candidate.degrees().any(|d| {
                    let k = candidate.dim_in(d);
                    (0..k).any(|i| !candidate.act(omega, d, &BitVec::unit(k, i)).is_zero())
                });
                let brute = brute_force_free_summand(&candidate);
                ensure!(omega_acts == brute, "omega criterion {omega_acts} vs brute force {brute} over {bounds:?}");
                ensure!((r.free_rank > 0) == brute, "reduce found {} free summands, brute force {brute}", r.free_rank);
                counts[3] += 1;
            }
        }
    }
    for (bounds, s_max, t_max) in [(&[1, 2, 1][..], 10, 30), (&[2, 2, 1], 8, 24), (&[3, 2, 1], 8, 24)] {
        let chart = Resolution::of_unit(&algebra(bounds), s_max, t_max).chart();
        for (s, t, _) in chart.entries() {
            ensure!(t >= s as i32, "Ext^({s},{t}) != 0 over {bounds:?}");
        }
        counts[4] += 1;
    }
    let free = GradedModule::free(algebra(&[3, 2, 1]), &[0]);
    let r = reduce(&free.restrict(&algebra(&[2, 2, 1])).map_err(|e| e.to_string())?);
    ensure!(
        r.reduced.is_zero() && r.free_rank == 2,
        "restricted free module reduces to {:?} + {} free",
        r.reduced.graded_dims(),
        r.free_rank
    );
    Ok(format!(
        "{} modules with axioms and document round trip, {} dimension identities, {} Kunneth checks, {} free-summand cross-checks, {} vanishing charts, A(2) -> C(2) free rank 2",
        counts[0], counts[1], counts[2], counts[3], counts[4]
    ))
}

fn criterion_8() -> Outcome {
    let p = profile(&[3, 2, 1]);
    let doc: TableDocument = read_json(&data("tables/a2.json")).map_err(|e| e.to_string())?;
    let table: DifferentialTable = doc.to_table(&p).map_err(|e| e.to_string())?;
    ensure!(Some(&table) == standard_table(&p).as_ref(), "shipped A(2) table differs from the built-in one");
    let alg = algebra(&[3, 2, 1]);
    let mut notes = Vec::new();
    for (s_max, t_max) in [(8, 24), (10, 40)] {
        let run = run_ss(&p, &table, s_max, t_max).map_err(|e| e.to_string())?;
        let chart = Resolution::of_unit(&alg, s_max, t_max).chart();
        let mismatches = compare_einfty_ext(&run.einfty, &chart);
        ensure!(
            mismatches.is_empty(),
            "window ({s_max},{t_max}): {} mismatches, first {:?}",
            mismatches.len(),
            mismatches[0]
        );
        let d4 = run.pages.iter().find(|r| r.page == 4).map_or(0, |r| r.rank);
        notes.push(format!("s <= {s_max}, t <= {t_max}: exact, d4 rank {d4}, {} entries outside", run.skipped));
    }
    Ok(notes.join("; "))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("D(2) Ext chart vs monomial count", 10, criterion_1),
        ("May spectral sequence for D(2)", 5, criterion_2),
        ("Ext ring relations", 120, criterion_3),
        ("descent verdicts and pipeline", 180, criterion_4),
        ("Joker over A(1)", 5, criterion_5),
        ("D(2) and exterior base case", 600, criterion_6),
        ("property suites", 300, criterion_7),
        ("A(2) Ext vs May E-infinity", 300, criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, budget, check)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".to_string()));
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(_) if elapsed > Duration::from_secs(budget) => Err(format!("over the {budget} s budget")),
            o => o,
        };
        let (status, detail) = match &outcome {
            Ok(d) => ("PASS", d.as_str()),
            Err(e) => ("FAIL", e.as_str()),
        };
        if outcome.is_err() {
            failed += 1;
        }
        println!("criterion {} [{status}] {name} ({:.2} s, budget {budget} s): {detail}", i + 1, elapsed.as_secs_f64());
    }
    if failed > 0 {
        println!("{failed} of 8 criteria failed");
        std::process::exit(1);
    }
    println!("all 8 criteria passed");
}
