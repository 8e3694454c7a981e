//! Bounded-range May spectral sequence for profile algebras.
//!
//! `E_1 = F2[h_ij : j < h_i]` with `h_ij` in tridegree `(1, 2^j(2^i - 1), 2i - 1)`
//! (homological degree, internal degree, May weight). `d_1` is the derivation determined by
//! the diagonal; `d_r` for `r ≥ 2` lowers the weight by `2r - 1` and is supplied as a table
//! of values on classes, extended to all of `E_r` by the Leibniz rule. Every class of `E_r`
//! that is neither a product nor a table source is taken to be a `d_r`-cycle.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::f2::{BitVec, F2Matrix, Subspace};
use crate::milnor::Profile;
use crate::resolution::ExtChart;

/// `(s, t, May weight)`.
pub type Tridegree = (usize, i32, u32);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MayGenerator {
    pub i: usize,
    pub j: usize,
    pub t: i32,
    pub weight: u32,
}

impl MayGenerator {
    pub fn name(&self) -> String {
        format!("h{}{}", self.i, self.j)
    }
}

/// `h_ij` for `j < h_i`, ordered by `(i, j)`.
pub fn may_generators(profile: &Profile) -> Vec<MayGenerator> {
    let mut out = Vec::new();
    for i in 1..=profile.len() {
        for j in 0..profile.bound(i) as usize {
            out.push(MayGenerator { i, j, t: (1i32 << j) * ((1i32 << i) - 1), weight: 2 * i as u32 - 1 });
        }
    }
    out
}

/// Polynomial over F2 in the May generators of a fixed profile.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Polynomial {
    terms: BTreeSet<Vec<u32>>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one(n_gens: usize) -> Self {
        Self::monomial(vec![0; n_gens])
    }

    pub fn monomial(exps: Vec<u32>) -> Self {
        let mut terms = BTreeSet::new();
        terms.insert(exps);
        Self { terms }
    }

    pub fn generator(n_gens: usize, k: usize) -> Self {
        let mut e = vec![0; n_gens];
        e[k] = 1;
        Self::monomial(e)
    }

    pub fn terms(&self) -> impl Iterator<Item = &Vec<u32>> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn toggle(&mut self, exps: Vec<u32>) {
        if !self.terms.remove(&exps) {
            self.terms.insert(exps);
        }
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        Polynomial { terms: self.terms.symmetric_difference(&other.terms).cloned().collect() }
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for a in &self.terms {
            for b in &other.terms {
                out.toggle(a.iter().zip(b).map(|(x, y)| x + y).collect());
            }
        }
        out
    }

    /// Tridegree of every term, if they agree.
    pub fn tridegree(&self, gens: &[MayGenerator]) -> Option<Option<Tridegree>> {
        let mut found = None;
        for m in &self.terms {
            let d = monomial_tridegree(gens, m);
            match found {
                None => found = Some(d),
                Some(f) if f != d => return None,
                _ => {}
            }
        }
        Some(found)
    }

    pub fn format(&self, gens: &[MayGenerator]) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut terms: Vec<&Vec<u32>> = self.terms.iter().collect();
        terms.sort_by(|a, b| b.iter().rev().cmp(a.iter().rev()));
        let parts: Vec<String> = terms.into_iter().map(|m| format_monomial(gens, m)).collect();
        parts.join(" + ")
    }

    /// Parses sums of products such as `h20h21 + h11*h30`, `h_{30}^{4}`, `0` or `1`.
    pub fn parse(gens: &[MayGenerator], text: &str) -> Result<Polynomial> {
        let bad = || Error::BadPolynomial(text.to_string());
        let cleaned: String =
            text.chars().filter(|c| !c.is_whitespace() && !matches!(c, '{' | '}' | '_' | '*' | '·')).collect();
        if cleaned.is_empty() {
            return Err(bad());
        }
        let mut out = Polynomial::zero();
        for term in cleaned.split('+') {
            let chars: Vec<char> = term.chars().collect();
            if chars.is_empty() {
                return Err(bad());
            }
            if term == "0" {
                continue;
            }
            let mut exps = vec![0u32; gens.len()];
            let mut k = 0;
            if term != "1" {
                while k < chars.len() {
                    if chars[k] != 'h' {
                        return Err(bad());
                    }
                    let i = chars.get(k + 1).and_then(|c| c.to_digit(10)).ok_or_else(bad)? as usize;
                    let j = chars.get(k + 2).and_then(|c| c.to_digit(10)).ok_or_else(bad)? as usize;
                    k += 3;
                    let mut power = 1u32;
                    if chars.get(k) == Some(&'^') {
                        k += 1;
                        let start = k;
                        while k < chars.len() && chars[k].is_ascii_digit() {
                            k += 1;
                        }
                        let digits: String = chars[start..k].iter().collect();
                        power = digits.parse().map_err(|_| bad())?;
                    }
                    let g = gens
                        .iter()
                        .position(|g| g.i == i && g.j == j)
                        .ok_or_else(|| Error::UnknownGenerator(format!("h{i}{j}")))?;
                    exps[g] += power;
                }
            }
            out.toggle(exps);
        }
        Ok(out)
    }
}

fn monomial_tridegree(gens: &[MayGenerator], m: &[u32]) -> Tridegree {
    let mut d = (0usize, 0i32, 0u32);
    for (g, &e) in gens.iter().zip(m) {
        d.0 += e as usize;
        d.1 += g.t * e as i32;
        d.2 += g.weight * e;
    }
    d
}

fn format_monomial(gens: &[MayGenerator], m: &[u32]) -> String {
    let mut s = String::new();
    for (g, &e) in gens.iter().zip(m) {
        match e {
            0 => {}
            1 => s.push_str(&g.name()),
            _ => s.push_str(&format!("{}^{e}", g.name())),
        }
    }
    if s.is_empty() {
        s.push('1');
    }
    s
}

/// `d_1(h_ij) = Σ_{0<k<i} h_{i-k,k+j} h_{k,j}`, dropping terms with a factor absent from
/// the profile.
pub fn d1_generator(gens: &[MayGenerator], k: usize) -> Polynomial {
    let (i, j) = (gens[k].i, gens[k].j);
    let find = |a: usize, b: usize| gens.iter().position(|g| g.i == a && g.j == b);
    let mut out = Polynomial::zero();
    for l in 1..i {
        if let (Some(x), Some(y)) = (find(i - l, l + j), find(l, j)) {
            let mut e = vec![0u32; gens.len()];
            e[x] += 1;
            e[y] += 1;
            out.toggle(e);
        }
    }
    out
}

/// `d_1` extended as a derivation.
pub fn d1(gens: &[MayGenerator], p: &Polynomial) -> Polynomial {
    let images: Vec<Polynomial> = (0..gens.len()).map(|k| d1_generator(gens, k)).collect();
    let mut out = Polynomial::zero();
    for m in p.terms() {
        for (k, &e) in m.iter().enumerate() {
            if e % 2 == 1 {
                let mut rest = m.clone();
                rest[k] -= 1;
                out = out.add(&Polynomial::monomial(rest).mul(&images[k]));
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DifferentialEntry {
    pub page: usize,
    pub source: Polynomial,
    pub target: Polynomial,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DifferentialTable {
    pub entries: Vec<DifferentialEntry>,
}

impl DifferentialTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, gens: &[MayGenerator], page: usize, source: &str, target: &str) -> Result<()> {
        if page == 0 {
            return Err(Error::BadTableEntry {
                page,
                from: source.to_string(),
                target: target.to_string(),
                reason: "pages start at 1".to_string(),
            });
        }
        self.entries.push(DifferentialEntry {
            page,
            source: Polynomial::parse(gens, source)?,
            target: Polynomial::parse(gens, target)?,
        });
        Ok(())
    }

    pub fn max_page(&self) -> usize {
        self.entries.iter().map(|e| e.page).max().unwrap_or(1)
    }
}

/// The monomial basis of `E_1` on a window.
#[derive(Clone, Debug)]
struct E1 {
    gens: Vec<MayGenerator>,
    spaces: BTreeMap<Tridegree, Vec<Vec<u32>>>,
    lookup: BTreeMap<Vec<u32>, (Tridegree, usize)>,
}

impl E1 {
    fn new(gens: Vec<MayGenerator>, s_cap: usize, t_max: i32) -> Self {
        let mut spaces: BTreeMap<Tridegree, Vec<Vec<u32>>> = BTreeMap::new();
        let mut exps = vec![0u32; gens.len()];
        fn walk(
            gens: &[MayGenerator],
            k: usize,
            exps: &mut Vec<u32>,
            deg: Tridegree,
            s_cap: usize,
            t_max: i32,
            out: &mut BTreeMap<Tridegree, Vec<Vec<u32>>>,
        ) {
            if k == gens.len() {
                out.entry(deg).or_default().push(exps.clone());
                return;
            }
            let mut d = deg;
            loop {
                walk(gens, k + 1, exps, d, s_cap, t_max, out);
                d = (d.0 + 1, d.1 + gens[k].t, d.2 + gens[k].weight);
                if d.0 > s_cap || d.1 > t_max {
                    break;
                }
                exps[k] += 1;
            }
            exps[k] = 0;
        }
        walk(&gens, 0, &mut exps, (0, 0, 0), s_cap, t_max, &mut spaces);
        let mut lookup = BTreeMap::new();
        for (tri, monos) in spaces.iter_mut() {
            monos.sort();
            for (i, m) in monos.iter().enumerate() {
                lookup.insert(m.clone(), (*tri, i));
            }
        }
        Self { gens, spaces, lookup }
    }

    fn dim(&self, tri: &Tridegree) -> usize {
        self.spaces.get(tri).map_or(0, Vec::len)
    }

    /// Homogeneous polynomial as a vector of its tridegree; `None` outside the window.
    fn vector(&self, p: &Polynomial) -> Option<(Tridegree, BitVec)> {
        let tri = p.tridegree(&self.gens)??;
        let mut v = BitVec::zeros(self.dim(&tri));
        for m in p.terms() {
            let (_, i) = self.lookup.get(m)?;
            v.toggle(*i);
        }
        Some((tri, v))
    }

    fn polynomial(&self, tri: &Tridegree, v: &BitVec) -> Polynomial {
        let monos = &self.spaces[tri];
        let mut p = Polynomial::zero();
        for i in v.iter_ones() {
            p.toggle(monos[i].clone());
        }
        p
    }

    /// Product of two homogeneous vectors; `None` when the product leaves the window.
    fn mul(&self, a: (&Tridegree, &BitVec), b: (&Tridegree, &BitVec)) -> Option<BitVec> {
        let tri = (a.0 .0 + b.0 .0, a.0 .1 + b.0 .1, a.0 .2 + b.0 .2);
        let dim = self.dim(&tri);
        if dim == 0 {
            return None;
        }
        let (ma, mb) = (&self.spaces[a.0], &self.spaces[b.0]);
        let mut out = BitVec::zeros(dim);
        for i in a.1.iter_ones() {
            for j in b.1.iter_ones() {
                let m: Vec<u32> = ma[i].iter().zip(&mb[j]).map(|(x, y)| x + y).collect();
                out.toggle(self.lookup[&m].1);
            }
        }
        Some(out)
    }
}

/// `Z_r / B_r` in one tridegree, inside the `E_1` vector space.
#[derive(Clone, Debug)]
struct PageSpace {
    reps: Vec<BitVec>,
    boundaries: Subspace,
    /// Spans `Z_r`; tags give coordinates against `reps`.
    coords: Subspace,
}

impl PageSpace {
    fn new(ambient: usize, boundaries: Subspace, candidates: Vec<BitVec>) -> Self {
        let mut probe = boundaries.clone();
        let reps: Vec<BitVec> = candidates.into_iter().filter(|v| probe.add(v.clone())).collect();
        let mut coords = Subspace::with_tags(ambient, reps.len());
        for b in boundaries.basis() {
            coords.add_tagged(b.clone(), BitVec::zeros(reps.len()));
        }
        for (k, r) in reps.iter().enumerate() {
            coords.add_tagged(r.clone(), BitVec::unit(reps.len(), k));
        }
        Self { reps, boundaries, coords }
    }

    fn dim(&self) -> usize {
        self.reps.len()
    }

    fn express(&self, v: &BitVec) -> Option<BitVec> {
        self.coords.express(v)
    }

    fn lift(&self, c: &BitVec) -> BitVec {
        let mut out = BitVec::zeros(self.coords.ambient());
        for k in c.iter_ones() {
            out.xor_assign(&self.reps[k]);
        }
        out
    }
}

/// One page of the spectral sequence on the window.
#[derive(Clone, Debug)]
pub struct MayPage {
    pub profile: Profile,
    pub page: usize,
    pub s_max: usize,
    pub t_max: i32,
    gens: Vec<MayGenerator>,
    spaces: BTreeMap<Tridegree, PageSpace>,
    e1: alloc::sync::Arc<E1>,
}

impl MayPage {
    pub fn generators(&self) -> &[MayGenerator] {
        &self.gens
    }

    pub fn dim(&self, tri: Tridegree) -> usize {
        self.spaces.get(&tri).map_or(0, PageSpace::dim)
    }

    /// Dimension summed over May weights.
    pub fn total_dim(&self, s: usize, t: i32) -> usize {
        self.spaces.iter().filter(|(k, _)| k.0 == s && k.1 == t).map(|(_, v)| v.dim()).sum()
    }

    /// Nonzero `(s, t, dim)` for `s ≤ s_max`.
    pub fn totals(&self) -> Vec<(usize, i32, usize)> {
        let mut acc: BTreeMap<(usize, i32), usize> = BTreeMap::new();
        for (k, v) in &self.spaces {
            if k.0 <= self.s_max && v.dim() > 0 {
                *acc.entry((k.0, k.1)).or_default() += v.dim();
            }
        }
        acc.into_iter().map(|((s, t), d)| (s, t, d)).collect()
    }

    /// `E_1` representatives of a basis of the page in tridegree `tri`.
    pub fn representatives(&self, tri: Tridegree) -> Vec<Polynomial> {
        self.spaces
            .get(&tri)
            .map(|sp| sp.reps.iter().map(|r| self.e1.polynomial(&tri, r)).collect())
            .unwrap_or_default()
    }

    pub fn tridegrees(&self) -> impl Iterator<Item = &Tridegree> {
        self.spaces.keys()
    }
}

/// Per-page summary of a run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PageReport {
    pub page: usize,
    /// Rank of `d_r` summed over the window.
    pub rank: usize,
    pub totals: Vec<(usize, i32, usize)>,
}

#[derive(Clone, Debug)]
pub struct MayRun {
    pub e2: MayPage,
    pub einfty: MayPage,
    /// Generators with nonzero `d_1`, with their values.
    pub d1_generators: Vec<(String, Polynomial)>,
    pub pages: Vec<PageReport>,
    /// Table entries outside the window.
    pub skipped: usize,
}

fn bad_entry(gens: &[MayGenerator], e: &DifferentialEntry, reason: &str) -> Error {
    Error::BadTableEntry {
        page: e.page,
        from: e.source.format(gens),
        target: e.target.format(gens),
        reason: reason.to_string(),
    }
}

/// The `E_1` page on the window `s ≤ s_max`, `t ≤ t_max`.
pub fn may_e1(profile: &Profile, s_max: usize, t_max: i32) -> MayPage {
    let gens = may_generators(profile);
    let e1 = alloc::sync::Arc::new(E1::new(gens.clone(), s_max + 1, t_max));
    let spaces = e1
        .spaces
        .iter()
        .map(|(tri, monos)| {
            let n = monos.len();
            (*tri, PageSpace::new(n, Subspace::new(n), (0..n).map(|i| BitVec::unit(n, i)).collect()))
        })
        .collect();
    MayPage { profile: profile.clone(), page: 1, s_max, t_max, gens, spaces, e1 }
}

fn target_of(tri: &Tridegree, r: usize) -> Option<Tridegree> {
    let drop = 2 * r as u32 - 1;
    (tri.2 >= drop).then(|| (tri.0 + 1, tri.1, tri.2 - drop))
}

/// Runs the spectral sequence through the last page of the table.
pub fn run_ss(profile: &Profile, table: &DifferentialTable, s_max: usize, t_max: i32) -> Result<MayRun> {
    let mut page = may_e1(profile, s_max, t_max);
    let gens = page.gens.clone();
    let e1 = page.e1.clone();
    let d1_generators: Vec<(String, Polynomial)> =
        (0..gens.len()).map(|k| (gens[k].name(), d1_generator(&gens, k))).filter(|(_, p)| !p.is_zero()).collect();
    // entries grouped by page, keeping only those inside the window
    let mut by_page: BTreeMap<usize, Vec<&DifferentialEntry>> = BTreeMap::new();
    let mut skipped = 0;
    for e in &table.entries {
        match e.source.tridegree(&gens) {
            None => return Err(bad_entry(&gens, e, "source is not homogeneous")),
            Some(None) => return Err(bad_entry(&gens, e, "source is zero")),
            Some(Some(tri)) => {
                if tri.0 > s_max || tri.1 > t_max {
                    skipped += 1;
                    continue;
                }
                match e.target.tridegree(&gens) {
                    None => return Err(bad_entry(&gens, e, "target is not homogeneous")),
                    Some(Some(tt)) if Some(tt) != target_of(&tri, e.page) => {
                        return Err(bad_entry(&gens, e, "target has the wrong tridegree for this page"))
                    }
                    _ => {}
                }
                by_page.entry(e.page).or_default().push(e);
            }
        }
    }
    let last = table.max_page().max(1);
    let mut pages = Vec::new();
    let mut e2 = None;
    for r in 1..=last {
        let entries = by_page.remove(&r).unwrap_or_default();
        let dmaps = if r == 1 {
            let d = first_differential(&page);
            for e in &entries {
                let (tri, _) = e1.vector(&e.source).expect("window checked");
                let expected = d1(&gens, &e.source);
                if expected != e.target && target_of(&tri, 1).is_some_and(|t| t.0 <= s_max + 1) {
                    return Err(bad_entry(&gens, e, "disagrees with the d1 computed from the diagonal"));
                }
            }
            d
        } else {
            higher_differential(&page, r, &entries)?
        };
        let rank = dmaps.values().map(F2Matrix::rank).sum();
        page = turn_page(&page, r, &dmaps);
        pages.push(PageReport { page: r, rank, totals: page.totals() });
        if r == 1 {
            e2 = Some(page.clone());
        }
    }
    Ok(MayRun { e2: e2.expect("at least one page"), einfty: page, d1_generators, pages, skipped })
}

/// Matrices of `d_1` in page coordinates, keyed by source tridegree (`s ≤ s_max`).
fn first_differential(page: &MayPage) -> BTreeMap<Tridegree, F2Matrix> {
    let e1 = &page.e1;
    let mut out = BTreeMap::new();
    for (tri, sp) in &page.spaces {
        if tri.0 > page.s_max {
            continue;
        }
        let Some(y) = target_of(tri, 1) else { continue };
        let Some(tsp) = page.spaces.get(&y) else { continue };
        let rows = sp
            .reps
            .iter()
            .map(|r| {
                let image = d1(&page.gens, &e1.polynomial(tri, r));
                let (_, v) = e1.vector(&image).unwrap_or((y, BitVec::zeros(e1.dim(&y))));
                tsp.express(&v).expect("E1 coordinates are complete")
            })
            .collect();
        out.insert(*tri, F2Matrix::from_rows(tsp.dim(), rows));
    }
    out
}

/// `d_r` for `r ≥ 2` from the table and the Leibniz rule.
fn higher_differential(
    page: &MayPage,
    r: usize,
    entries: &[&DifferentialEntry],
) -> Result<BTreeMap<Tridegree, F2Matrix>> {
    let e1 = &page.e1;
    let gens = &page.gens;
    let mut dmaps: BTreeMap<Tridegree, F2Matrix> = BTreeMap::new();
    // page generators per tridegree, as page coordinates
    let mut page_gens: BTreeMap<Tridegree, Vec<BitVec>> = BTreeMap::new();
    let mut order: Vec<Tridegree> = page.spaces.keys().copied().filter(|k| k.0 <= page.s_max && k.1 > 0).collect();
    order.sort_by_key(|k| (k.1, k.0, k.2));
    let zero_tri = (0usize, 0i32, 0u32);

    let d_lift = |dmaps: &BTreeMap<Tridegree, F2Matrix>, tri: &Tridegree, c: &BitVec| -> Option<(Tridegree, BitVec)> {
        let y = target_of(tri, r)?;
        let tsp = page.spaces.get(&y)?;
        let m = dmaps.get(tri)?;
        if tsp.dim() == 0 {
            return None;
        }
        Some((y, tsp.lift(&m.vec_mul(c).expect("shapes agree"))))
    };

    for x in order {
        let sp = &page.spaces[&x];
        let n = sp.dim();
        let y = target_of(&x, r);
        let tsp = y.and_then(|y| page.spaces.get(&y));
        let m = tsp.map_or(0, PageSpace::dim);
        if n == 0 {
            continue;
        }
        let mut span = Subspace::with_tags(n, m);
        let mut conflict = false;
        let to_target = |v: Option<BitVec>| -> BitVec {
            match (v, tsp) {
                (Some(v), Some(t)) => t.express(&v).expect("products of cycles are cycles"),
                _ => BitVec::zeros(m),
            }
        };
        for (gx, glist) in &page_gens {
            if gx.1 >= x.1 || gx.0 > x.0 || gx.2 > x.2 {
                continue;
            }
            let cx = (x.0 - gx.0, x.1 - gx.1, x.2 - gx.2);
            if cx == zero_tri {
                continue;
            }
            let Some(csp) = page.spaces.get(&cx) else { continue };
            let gsp = &page.spaces[gx];
            for g in glist {
                let g_rep = gsp.lift(g);
                let dg = d_lift(&dmaps, gx, g);
                for k in 0..csp.dim() {
                    let c = BitVec::unit(csp.dim(), k);
                    let c_rep = &csp.reps[k];
                    let Some(prod) = e1.mul((gx, &g_rep), (&cx, c_rep)) else { continue };
                    let class = sp.express(&prod).expect("products of cycles are cycles");
                    let mut value: Option<BitVec> = None;
                    let mut push = |v: Option<BitVec>| {
                        if let Some(v) = v {
                            match &mut value {
                                Some(acc) => acc.xor_assign(&v),
                                None => value = Some(v),
                            }
                        }
                    };
                    if let Some((dy, dv)) = &dg {
                        push(e1.mul((dy, dv), (&cx, c_rep)));
                    }
                    if let Some((dy, dv)) = d_lift(&dmaps, &cx, &c) {
                        push(e1.mul((gx, &g_rep), (&dy, &dv)));
                    }
                    let value = to_target(value);
                    if let Some(rel) = span.add_tagged(class, value) {
                        conflict |= !rel.is_zero();
                    }
                }
            }
        }
        if conflict {
            return Err(Error::LeibnizConflict { page: r, s: x.0, t: x.1 });
        }
        let mut new_gens = Vec::new();
        for e in entries.iter().filter(|e| e1.vector(&e.source).map(|v| v.0) == Some(x)) {
            let (_, v) = e1.vector(&e.source).expect("in window");
            let class = sp.express(&v).ok_or_else(|| bad_entry(gens, e, "source does not survive to this page"))?;
            if class.is_zero() {
                return Err(bad_entry(gens, e, "source is zero on this page"));
            }
            let value = if e.target.is_zero() {
                BitVec::zeros(m)
            } else {
                let (_, tv) = e1.vector(&e.target).ok_or_else(|| bad_entry(gens, e, "target outside the window"))?;
                match tsp {
                    Some(t) => {
                        t.express(&tv).ok_or_else(|| bad_entry(gens, e, "target does not survive to this page"))?
                    }
                    None => return Err(bad_entry(gens, e, "target vanishes on this page")),
                }
            };
            match span.add_tagged(class.clone(), value) {
                None => new_gens.push(class),
                Some(rel) if !rel.is_zero() => return Err(Error::LeibnizConflict { page: r, s: x.0, t: x.1 }),
                Some(_) => {}
            }
        }
        for k in span.complement_indices() {
            let v = BitVec::unit(n, k);
            span.add_tagged(v.clone(), BitVec::zeros(m));
            new_gens.push(v);
        }
        let rows = (0..n).map(|k| span.express(&BitVec::unit(n, k)).expect("span is full")).collect();
        dmaps.insert(x, F2Matrix::from_rows(m, rows));
        if !new_gens.is_empty() {
            page_gens.insert(x, new_gens);
        }
    }
    // d_r ∘ d_r = 0 where both are known
    for (x, dm) in &dmaps {
        let Some(y) = target_of(x, r) else { continue };
        if let Some(dn) = dmaps.get(&y) {
            if dm.row_count() > 0 && !dm.mul(dn).expect("shapes agree").is_zero() {
                return Err(Error::LeibnizConflict { page: r, s: x.0, t: x.1 });
            }
        }
    }
    Ok(dmaps)
}

fn turn_page(page: &MayPage, r: usize, dmaps: &BTreeMap<Tridegree, F2Matrix>) -> MayPage {
    let drop = 2 * r as u32 - 1;
    let mut spaces = BTreeMap::new();
    for (tri, sp) in &page.spaces {
        let ambient = sp.coords.ambient();
        let mut boundaries = sp.boundaries.clone();
        if tri.0 >= 1 {
            let src = (tri.0 - 1, tri.1, tri.2 + drop);
            if let Some(m) = dmaps.get(&src) {
                for row in m.rows() {
                    boundaries.add(sp.lift(row));
                }
            }
        }
        let candidates: Vec<BitVec> = match dmaps.get(tri) {
            Some(m) if m.col_count() > 0 => m.left_kernel().iter().map(|c| sp.lift(c)).collect(),
            _ => sp.reps.clone(),
        };
        spaces.insert(*tri, PageSpace::new(ambient, boundaries, candidates));
    }
    MayPage {
        profile: page.profile.clone(),
        page: r + 1,
        s_max: page.s_max,
        t_max: page.t_max,
        gens: page.gens.clone(),
        spaces,
        e1: page.e1.clone(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mismatch {
    pub s: usize,
    pub t: i32,
    pub may: usize,
    pub ext: usize,
}

/// Compares total page dimensions with an Ext chart on the common window.
pub fn compare_einfty_ext(page: &MayPage, chart: &ExtChart) -> Vec<Mismatch> {
    let s_max = page.s_max.min(chart.s_max);
    let t_max = page.t_max.min(chart.t_max);
    let mut out = Vec::new();
    for s in 0..=s_max {
        for t in chart.t_min.max(0)..=t_max {
            let (may, ext) = (page.total_dim(s, t), chart.dim(s, t));
            if may != ext {
                out.push(Mismatch { s, t, may, ext });
            }
        }
    }
    out
}

/// The higher differentials for the three algebras of the descent, as printed tables.
pub fn standard_table(profile: &Profile) -> Option<DifferentialTable> {
    let gens = may_generators(profile);
    let rows: &[(usize, &str, &str)] = match profile.bounds() {
        [1, 2, 1] => &[],
        [2, 2, 1] => &[(2, "h30^2", "h11h21^2"), (2, "h20^2", "h11^3")],
        [3, 2, 1] => &[
            (2, "h20^2", "h11^3 + h10^2h12"),
            (2, "h21^2", "h12^3"),
            (2, "h30^2", "h11h21^2"),
            (2, "h20h21 + h11h30", "h10h12^2"),
            (4, "h30^4", "h12h21^4"),
        ],
        _ => return None,
    };
    let mut table = DifferentialTable::new();
    for (page, s, t) in rows {
        table.push(&gens, *page, s, t).expect("well-formed table");
    }
    Some(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn profile(b: &[u32]) -> Profile {
        Profile::new(b.to_vec()).unwrap()
    }

    fn names(p: &Profile) -> Vec<String> {
        may_generators(p).iter().map(MayGenerator::name).collect()
    }

    #[test]
    fn generator_lists() {
        assert_eq!(names(&profile(&[1, 2, 1])), ["h10", "h20", "h21", "h30"]);
        assert_eq!(names(&profile(&[2, 2, 1])), ["h10", "h11", "h20", "h21", "h30"]);
        assert_eq!(names(&profile(&[3, 2, 1])), ["h10", "h11", "h12", "h20", "h21", "h30"]);
        let g = may_generators(&profile(&[3, 2, 1]));
        assert_eq!((g[4].t, g[4].weight), (6, 3));
        assert_eq!((g[5].t, g[5].weight), (7, 5));
    }

    #[test]
    fn first_differentials() {
        let a2 = may_generators(&profile(&[3, 2, 1]));
        let p = |s: &str| Polynomial::parse(&a2, s).unwrap();
        assert_eq!(d1_generator(&a2, 5), p("h10h21 + h20h12"));
        assert_eq!(d1_generator(&a2, 3), p("h10h11"));
        assert_eq!(d1_generator(&a2, 4), p("h11h12"));
        assert!(d1_generator(&a2, 0).is_zero());
        let d2 = may_generators(&profile(&[1, 2, 1]));
        let q = |s: &str| Polynomial::parse(&d2, s).unwrap();
        assert_eq!(d1_generator(&d2, 3), q("h10h21"));
        assert!(d1_generator(&d2, 1).is_zero());
    }

    #[test]
    fn d1_squares_to_zero() {
        let a2 = may_generators(&profile(&[3, 2, 1]));
        let e1 = E1::new(a2.clone(), 5, 20);
        for (tri, monos) in &e1.spaces {
            for m in monos {
                let p = Polynomial::monomial(m.clone());
                assert!(d1(&a2, &d1(&a2, &p)).is_zero(), "{tri:?}");
            }
        }
    }

    #[test]
    fn parse_and_format() {
        let a2 = may_generators(&profile(&[3, 2, 1]));
        let p = Polynomial::parse(&a2, "h_{30}^{4} + h12 * h21^4").unwrap();
        assert_eq!(p.format(&a2), "h30^4 + h12h21^4");
        assert!(matches!(Polynomial::parse(&a2, "h40"), Err(Error::UnknownGenerator(_))));
        assert!(matches!(Polynomial::parse(&a2, "x1"), Err(Error::BadPolynomial(_))));
        assert_eq!(Polynomial::parse(&a2, "0").unwrap(), Polynomial::zero());
    }

    #[test]
    fn d2_collapses_after_d1() {
        let run = run_ss(&profile(&[1, 2, 1]), &DifferentialTable::new(), 6, 20).unwrap();
        assert_eq!(run.d1_generators.len(), 1);
        assert_eq!(run.d1_generators[0].0, "h30");
        assert_eq!(run.einfty.total_dim(2, 14), 1);
        assert_eq!(run.einfty.total_dim(2, 7), 0);
    }

    #[test]
    fn bad_entries_rejected() {
        let c2 = profile(&[2, 2, 1]);
        let gens = may_generators(&c2);
        let mut t = DifferentialTable::new();
        t.push(&gens, 2, "h20", "h11^3").unwrap();
        assert!(matches!(run_ss(&c2, &t, 4, 12), Err(Error::BadTableEntry { .. })));
        let mut t = DifferentialTable::new();
        t.push(&gens, 2, "h20^2", "h10h11").unwrap();
        assert!(matches!(run_ss(&c2, &t, 4, 12), Err(Error::BadTableEntry { .. })));
    }
}
