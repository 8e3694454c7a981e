//! Stable module category: free-summand reduction, Margolis homology, syzygies and
//! Picard-group membership tests.

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::RangeInclusive;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::f2::{BitVec, F2Matrix, Subspace};
use crate::milnor::{HopfAlgebra, NamedElement, Profile};
use crate::module::{FreeLayout, GradedModule, ModuleMap};

/// Enumerate the whole Hom space up to this dimension, otherwise sample.
pub const ISO_ENUMERATION_LIMIT: usize = 20;
pub const ISO_RANDOM_CANDIDATES: usize = 10_000;
pub const ISO_SEED: u64 = 0x5eed_1505;

/// `M ≅ reduced ⊕ free`, with the free summand generated by `free_generators`.
#[derive(Clone, Debug)]
pub struct ReductionResult {
    pub reduced: GradedModule,
    pub free_rank: usize,
    /// Generators `x_i` of the free summand, as vectors of the original module.
    pub free_generators: Vec<(i32, BitVec)>,
    pub free: GradedModule,
    /// Inclusion of the free summand.
    pub inclusion: ModuleMap,
    /// Projection onto the reduced part, identified with `M / free`.
    pub projection: ModuleMap,
}

impl ReductionResult {
    /// A module retraction `M → free` of [`Self::inclusion`], built from the Frobenius
    /// pairing `⟨a, b⟩ = coefficient of ω in ab`.
    pub fn retraction(&self, original: &GradedModule) -> Result<ModuleMap> {
        let alg = original.algebra().clone();
        let top = alg.top_degree();
        let dual = frobenius_dual_basis(&alg)?;
        let gens = &self.free_generators;
        let degs: Vec<i32> = gens.iter().map(|g| g.0).collect();
        let layout = FreeLayout::new(&alg, &degs, None);
        // λ_i on M_{|x_i| + top}: λ_i(b^∨ x_j) = [i = j][b = 1]
        let mut lambdas = Vec::with_capacity(gens.len());
        for (i, (di, _)) in gens.iter().enumerate() {
            let target = di + top;
            let dim = original.dim_in(target);
            let mut rows = Vec::new();
            let mut rhs = Vec::new();
            for (j, (dj, xj)) in gens.iter().enumerate() {
                let bdeg = dj + top - target;
                for b in alg.basis_in_degree(bdeg) {
                    rows.push(act_element(original, &dual[b], *dj, xj));
                    rhs.push(i == j && b == 0);
                }
            }
            let system = F2Matrix::from_rows(dim, rows);
            let lambda = system.solve(&BitVec::from_bools(&rhs))?.expect("free summand injects into the module");
            lambdas.push(lambda);
        }
        let matrices = original
            .degrees()
            .map(|d| {
                let rows = (0..original.dim_in(d))
                    .map(|k| {
                        let m = BitVec::unit(original.dim_in(d), k);
                        let mut out = BitVec::zeros(layout.dim_in(d));
                        for (i, (di, _)) in gens.iter().enumerate() {
                            for b in alg.basis_in_degree(d - di) {
                                let v = act_element(original, &dual[b], d, &m);
                                if !v.is_empty() && v.dot(&lambdas[i]) {
                                    let p = layout.position(&alg, i, b).expect("in range");
                                    out.toggle(p);
                                }
                            }
                        }
                        out
                    })
                    .collect();
                F2Matrix::from_rows(layout.dim_in(d), rows)
            })
            .collect();
        Ok(ModuleMap { degree: 0, source_lo: original.lo(), matrices })
    }
}

/// `b ↦ b^∨` with `⟨b^∨, c⟩ = [b = c]` under `⟨a, c⟩ = coefficient of ω in ac`.
pub fn frobenius_dual_basis(alg: &HopfAlgebra) -> Result<Vec<crate::milnor::Element>> {
    let n = alg.dimension();
    let top = alg.top_index();
    let rows =
        (0..n).map(|a| BitVec::from_ones(n, (0..n).filter(|&c| alg.product_basis(a, c).contains(&top)))).collect();
    // row a of P holds ⟨a, c⟩ over c; b^∨ = Σ_a y_a a with yᵀP = e_b
    let pt = F2Matrix::from_rows(n, rows).transpose();
    (0..n)
        .map(|b| {
            let y = pt.solve(&BitVec::unit(n, b))?.ok_or(Error::NotInvertible)?;
            Ok(crate::milnor::Element(y))
        })
        .collect()
}

fn act_element(m: &GradedModule, x: &crate::milnor::Element, d: i32, v: &BitVec) -> BitVec {
    let alg = m.algebra();
    let mut out: Option<BitVec> = None;
    for b in x.0.iter_ones() {
        let w = m.act(b, d, v);
        match &mut out {
            Some(o) => o.xor_assign(&w),
            None => out = Some(w),
        }
    }
    out.unwrap_or_else(|| {
        let deg = alg.element_degree(x).ok().flatten().unwrap_or(0);
        BitVec::zeros(m.dim_in(d + deg))
    })
}

/// Splits off free summands until the top basis element acts by zero.
pub fn reduce(m: &GradedModule) -> ReductionResult {
    let alg = m.algebra().clone();
    let omega = alg.top_index();
    let top = alg.top_degree();
    let mut gens: Vec<(i32, BitVec)> = Vec::new();
    for d in m.degrees() {
        if d + top > m.hi() {
            break;
        }
        let w = m.action(omega, d).expect("in span");
        let mut image = Subspace::new(m.dim_in(d + top));
        for (i, row) in w.rows().iter().enumerate() {
            if image.add(row.clone()) {
                gens.push((d, BitVec::unit(m.dim_in(d), i)));
            }
        }
    }
    let degs: Vec<i32> = gens.iter().map(|g| g.0).collect();
    let layout = FreeLayout::new(&alg, &degs, None);
    let free = GradedModule::from_free_layout(alg.clone(), &layout);
    let mut spaces: Vec<Subspace> = m.degrees().map(|d| Subspace::new(m.dim_in(d))).collect();
    let inclusion_mats = free
        .degrees()
        .map(|t| {
            let rows = (0..free.dim_in(t))
                .map(|p| {
                    let (g, b) = layout.decode(&alg, t, p);
                    let v = m.act(b, gens[g].0, &gens[g].1);
                    spaces[(t - m.lo()) as usize].add(v.clone());
                    v
                })
                .collect();
            F2Matrix::from_rows(m.dim_in(t), rows)
        })
        .collect();
    let inclusion = ModuleMap { degree: 0, source_lo: free.lo(), matrices: inclusion_mats };
    let (reduced, projection) = m.quotient(&spaces);
    ReductionResult { reduced, free_rank: gens.len(), free_generators: gens, free, inclusion, projection }
}

/// True when the module is the unit `F2` in degree 0.
pub fn is_unit(m: &GradedModule) -> bool {
    m.graded_dims() == [(0, 1)]
}

/// Degreewise `ker x / im x`; only nonzero degrees are listed.
pub fn margolis_homology(m: &GradedModule, x: &NamedElement) -> Result<Vec<(i32, usize)>> {
    let alg = m.algebra();
    if !alg.multiply(&x.element, &x.element)?.is_zero() {
        return Err(Error::NotSquareZero(x.name.clone()));
    }
    let deg = alg.element_degree(&x.element)?.unwrap_or(0);
    let rank = |d: i32| -> Result<usize> {
        if m.dim_in(d) == 0 || m.dim_in(d + deg) == 0 {
            return Ok(0);
        }
        Ok(m.element_matrix(&x.element, d)?.rank())
    };
    let mut out = Vec::new();
    for d in m.degrees() {
        let h = m.dim_in(d) - rank(d)? - rank(d - deg)?;
        if h > 0 {
            out.push((d, h));
        }
    }
    Ok(out)
}

pub fn total(dims: &[(i32, usize)]) -> usize {
    dims.iter().map(|p| p.1).sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IsoVerdict {
    Iso,
    NotIso,
    /// The randomized Hom search found no isomorphism but did not exhaust the space.
    Inconclusive,
}

/// Stable isomorphism of two modules over the same algebra.
pub fn stable_iso(m: &GradedModule, n: &GradedModule) -> Result<IsoVerdict> {
    if m.algebra().profile() != n.algebra().profile() {
        return Err(Error::MixedAlgebras);
    }
    let (rm, rn) = (reduce(m).reduced, reduce(n).reduced);
    if rm.graded_dims() != rn.graded_dims() {
        return Ok(IsoVerdict::NotIso);
    }
    for x in m.algebra().square_zero_generators() {
        if margolis_homology(&rm, &x)? != margolis_homology(&rn, &x)? {
            return Ok(IsoVerdict::NotIso);
        }
    }
    if invertible(&rn)?.invertible {
        let witness = reduce(&rm.tensor(&rn.dual())?).reduced;
        return Ok(if is_unit(&witness) { IsoVerdict::Iso } else { IsoVerdict::NotIso });
    }
    isomorphism_search(&rm, &rn)
}

fn is_isomorphism(f: &ModuleMap) -> bool {
    f.matrices.iter().all(|a| a.row_count() == a.col_count() && a.rank() == a.row_count())
}

/// Searches the degree-0 Hom space for a bijective module map.
pub fn isomorphism_search(m: &GradedModule, n: &GradedModule) -> Result<IsoVerdict> {
    if m.graded_dims() != n.graded_dims() {
        return Ok(IsoVerdict::NotIso);
    }
    let basis = m.hom_basis(n, 0)?;
    let combine = |pick: &dyn Fn(usize) -> bool| -> ModuleMap {
        let mut f = ModuleMap::zero(m, n, 0);
        for (k, h) in basis.iter().enumerate() {
            if pick(k) {
                for (a, b) in f.matrices.iter_mut().zip(&h.matrices) {
                    for r in 0..a.row_count() {
                        a.row_mut(r).xor_assign(b.row(r));
                    }
                }
            }
        }
        f
    };
    if basis.len() <= ISO_ENUMERATION_LIMIT {
        for mask in 0u64..(1u64 << basis.len()) {
            if is_isomorphism(&combine(&|k| mask >> k & 1 == 1)) {
                return Ok(IsoVerdict::Iso);
            }
        }
        return Ok(IsoVerdict::NotIso);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(ISO_SEED);
    for _ in 0..ISO_RANDOM_CANDIDATES {
        let bits: Vec<bool> = (0..basis.len()).map(|_| rng.gen()).collect();
        if is_isomorphism(&combine(&|k| bits[k])) {
            return Ok(IsoVerdict::Iso);
        }
    }
    Ok(IsoVerdict::Inconclusive)
}

/// Cached minimal syzygies `Ω^n S` of the unit, `n ≥ 0`.
#[derive(Clone, Debug)]
pub struct SyzygyTower {
    algebra: Arc<HopfAlgebra>,
    levels: Vec<GradedModule>,
}

impl SyzygyTower {
    pub fn new(algebra: Arc<HopfAlgebra>) -> Self {
        let unit = GradedModule::unit(algebra.clone());
        Self { algebra, levels: vec![unit] }
    }

    pub fn algebra(&self) -> &Arc<HopfAlgebra> {
        &self.algebra
    }

    /// `Ω^n S`: kernel of the minimal free cover of `Ω^{n-1} S`.
    pub fn omega(&mut self, n: usize) -> &GradedModule {
        while self.levels.len() <= n {
            let prev = self.levels.last().unwrap();
            let (cover, p) = prev.free_cover();
            let (k, _) = cover.kernel(&p, prev);
            self.levels.push(k);
        }
        &self.levels[n]
    }

    /// `S^{n,m}`: `Ω^n S` (the dual of `Ω^{-n} S` for negative `n`) shifted up by `m`.
    pub fn syzygy(&mut self, n: i32, m: i32) -> GradedModule {
        let base = self.omega(n.unsigned_abs() as usize);
        let base = if n < 0 { base.dual() } else { base.clone() };
        base.shift(m)
    }

    /// Graded dimensions of `S^{n,0}`.
    pub fn graded_dims(&mut self, n: i32) -> Vec<(i32, usize)> {
        let dims = self.omega(n.unsigned_abs() as usize).graded_dims();
        if n < 0 {
            let mut d: Vec<(i32, usize)> = dims.into_iter().map(|(k, v)| (-k, v)).collect();
            d.reverse();
            d
        } else {
            dims
        }
    }
}

pub fn syzygy(alg: &Arc<HopfAlgebra>, n: i32, m: i32) -> GradedModule {
    SyzygyTower::new(alg.clone()).syzygy(n, m)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub reduced_dims: Vec<(i32, usize)>,
    pub free_rank: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PicardCertificate {
    pub invertible: bool,
    /// Margolis homology of each square-zero generator, by name.
    pub margolis: Vec<(String, Vec<(i32, usize)>)>,
    pub margolis_filter_passed: bool,
    /// Reduction of `M ⊗ DM`; absent when the Margolis filter already rules `M` out.
    pub witness: Option<Witness>,
}

/// Decides stable ⊗-invertibility: `M ⊗ DM` must reduce to the unit.
pub fn invertible(m: &GradedModule) -> Result<PicardCertificate> {
    let mut margolis = Vec::new();
    let mut passed = true;
    for x in m.algebra().square_zero_generators() {
        let h = margolis_homology(m, &x)?;
        passed &= total(&h) == 1;
        margolis.push((x.name.clone(), h));
    }
    if !passed {
        return Ok(PicardCertificate { invertible: false, margolis, margolis_filter_passed: false, witness: None });
    }
    let r = reduce(&m.tensor(&m.dual())?);
    let witness = Witness { reduced_dims: r.reduced.graded_dims(), free_rank: r.free_rank };
    Ok(PicardCertificate {
        invertible: is_unit(&r.reduced),
        margolis,
        margolis_filter_passed: true,
        witness: Some(witness),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Classification {
    Syzygy {
        n: i32,
        m: i32,
    },
    /// No `S^{n,m}` in the scanned box is stably isomorphic to the module.
    Exotic {
        scan_n: (i32, i32),
        scan_m: (i32, i32),
    },
}

/// `(n, m)` pairs in the box whose reduced syzygy has the graded dimensions of `reduced`.
/// Reduced models are unique, so at most one `m` survives for each `n`.
pub fn classification_candidates(
    tower: &mut SyzygyTower,
    reduced: &GradedModule,
    scan_n: RangeInclusive<i32>,
    scan_m: RangeInclusive<i32>,
) -> Vec<(i32, i32)> {
    let dims = reduced.graded_dims();
    let mut out = Vec::new();
    if dims.is_empty() {
        return out;
    }
    for n in scan_n {
        let base = tower.graded_dims(n);
        if base.len() != dims.len() {
            continue;
        }
        let m = dims[0].0 - base[0].0;
        if !scan_m.contains(&m) {
            continue;
        }
        if base.iter().zip(&dims).all(|(a, b)| a.0 + m == b.0 && a.1 == b.1) {
            out.push((n, m));
        }
    }
    out
}

/// Exact test `M ⊗ D(S^{n,m}) ≃ S`.
pub fn test_candidate(m: &GradedModule, syz: &GradedModule) -> Result<bool> {
    Ok(is_unit(&reduce(&m.tensor(&syz.dual())?).reduced))
}

/// Locates an invertible module among the `S^{n,m}` of a scan box.
pub fn classify_picard(
    m: &GradedModule,
    scan_n: RangeInclusive<i32>,
    scan_m: RangeInclusive<i32>,
) -> Result<Classification> {
    if !invertible(m)?.invertible {
        return Err(Error::NotInvertible);
    }
    let mut tower = SyzygyTower::new(m.algebra().clone());
    classify_with(&mut tower, m, scan_n, scan_m)
}

/// Same as [`classify_picard`] for a module already known to be invertible.
pub fn classify_with(
    tower: &mut SyzygyTower,
    m: &GradedModule,
    scan_n: RangeInclusive<i32>,
    scan_m: RangeInclusive<i32>,
) -> Result<Classification> {
    let reduced = reduce(m).reduced;
    let bounds = ((*scan_n.start(), *scan_n.end()), (*scan_m.start(), *scan_m.end()));
    for (n, shift) in classification_candidates(tower, &reduced, scan_n, scan_m) {
        let syz = tower.syzygy(n, shift);
        if test_candidate(&reduced, &syz)? {
            return Ok(Classification::Syzygy { n, m: shift });
        }
    }
    Ok(Classification::Exotic { scan_n: bounds.0, scan_m: bounds.1 })
}

/// Whether `M` restricts to the unit of the stable category of the subalgebra.
pub fn relative_picard_member(m: &GradedModule, sub: &Profile) -> Result<bool> {
    let b = Arc::new(HopfAlgebra::build(sub.clone())?);
    relative_picard_member_with(m, &b)
}

pub fn relative_picard_member_with(m: &GradedModule, sub: &Arc<HopfAlgebra>) -> Result<bool> {
    let r = m.restrict(sub)?;
    Ok(is_unit(&reduce(&r).reduced))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::module::{ActionSpec, ModuleSpec};
    use alloc::string::String;

    fn algebra(bounds: &[u32]) -> Arc<HopfAlgebra> {
        Arc::new(HopfAlgebra::build(Profile::new(bounds.to_vec()).unwrap()).unwrap())
    }

    fn joker() -> GradedModule {
        let act = |op: &str, src, dst: &[usize]| ActionSpec { op: String::from(op), src, dst: dst.to_vec() };
        ModuleSpec {
            profile: Profile::new(vec![2, 1]).unwrap(),
            degrees: vec![0, 1, 2, 3, 4],
            actions: vec![
                act("Sq1", 0, &[1]),
                act("Sq1", 3, &[4]),
                act("Sq2", 0, &[2]),
                act("Sq2", 1, &[3]),
                act("Sq2", 2, &[4]),
            ],
            zero_ops: Vec::new(),
        }
        .load()
        .unwrap()
    }

    #[test]
    fn reduce_examples() {
        let j = joker();
        let alg = j.algebra().clone();
        let f = GradedModule::free(alg.clone(), &[0]);
        let r = reduce(&f);
        assert_eq!((r.reduced.total_dim(), r.free_rank), (0, 1));
        let r = reduce(&j.direct_sum(&f).unwrap());
        assert_eq!(r.free_rank, 1);
        assert_eq!(r.reduced, j);
        let r = reduce(&j.tensor(&j.dual()).unwrap());
        assert_eq!(r.free_rank, 3);
        assert!(is_unit(&r.reduced));
    }

    #[test]
    fn splitting_maps() {
        let j = joker();
        let jj = j.tensor(&j.dual()).unwrap();
        let r = reduce(&jj);
        r.inclusion.check(&r.free, &jj).unwrap();
        r.projection.check(&jj, &r.reduced).unwrap();
        let ret = r.retraction(&jj).unwrap();
        ret.check(&jj, &r.free).unwrap();
        let id = crate::module::compose(&r.free, &r.inclusion, &ret, &r.free);
        for (t, m) in r.free.degrees().zip(&id.matrices) {
            assert_eq!(*m, F2Matrix::identity(r.free.dim_in(t)));
        }
    }

    #[test]
    fn margolis_examples() {
        let j = joker();
        let alg = j.algebra().clone();
        let q0 = alg.named_element("Q0").unwrap();
        let q1 = alg.named_element("Q1").unwrap();
        assert_eq!(margolis_homology(&j, &q0).unwrap(), vec![(2, 1)]);
        assert_eq!(margolis_homology(&j, &q1).unwrap(), vec![(2, 1)]);
        let s = GradedModule::unit(alg.clone());
        assert_eq!(margolis_homology(&s, &q0).unwrap(), vec![(0, 1)]);
        let f = GradedModule::free(alg.clone(), &[0]);
        assert!(margolis_homology(&f, &q0).unwrap().is_empty());
        let sq2 = alg.named_element("Sq2").unwrap();
        assert!(matches!(margolis_homology(&j, &sq2), Err(Error::NotSquareZero(_))));
    }

    #[test]
    fn syzygy_examples() {
        let d2 = algebra(&[1, 2, 1]);
        let mut tower = SyzygyTower::new(d2.clone());
        assert_eq!(tower.syzygy(0, 0), GradedModule::unit(d2.clone()));
        assert_eq!(tower.syzygy(1, 0).total_dim(), 15);
        let w = tower.syzygy(1, 0).tensor(&tower.syzygy(-1, 0)).unwrap();
        assert!(is_unit(&reduce(&w).reduced));
    }

    #[test]
    fn invertibility() {
        let j = joker();
        let alg = j.algebra().clone();
        assert!(invertible(&j).unwrap().invertible);
        let s = GradedModule::unit(alg.clone());
        assert!(!invertible(&j.direct_sum(&s).unwrap()).unwrap().invertible);
        let mut tower = SyzygyTower::new(alg);
        for n in -2..=2 {
            assert!(invertible(&tower.syzygy(n, 1)).unwrap().invertible);
        }
    }

    #[test]
    fn classification() {
        let j = joker();
        let alg = j.algebra().clone();
        let s = GradedModule::unit(alg.clone());
        assert_eq!(classify_picard(&s, -2..=2, -3..=3).unwrap(), Classification::Syzygy { n: 0, m: 0 });
        assert_eq!(
            classify_picard(&j, -6..=6, -12..=12).unwrap(),
            Classification::Exotic { scan_n: (-6, 6), scan_m: (-12, 12) }
        );
        let d2 = algebra(&[1, 2, 1]);
        let m = syzygy(&d2, 2, 0).shift(5);
        assert_eq!(classify_picard(&m, -3..=3, -6..=6).unwrap(), Classification::Syzygy { n: 2, m: 5 });
        assert!(matches!(classify_picard(&j.direct_sum(&s).unwrap(), 0..=0, 0..=0), Err(Error::NotInvertible)));
    }

    #[test]
    fn stable_isomorphism() {
        let j = joker();
        let alg = j.algebra().clone();
        let f = GradedModule::free(alg.clone(), &[2]);
        assert_eq!(stable_iso(&j, &j.direct_sum(&f).unwrap()).unwrap(), IsoVerdict::Iso);
        let o1 = syzygy(&alg, 1, 0);
        let o2 = syzygy(&alg, 2, 0);
        assert_eq!(stable_iso(&o1.tensor(&o1).unwrap(), &o2).unwrap(), IsoVerdict::Iso);
        assert_eq!(stable_iso(&j, &o1).unwrap(), IsoVerdict::NotIso);
        let s = GradedModule::unit(alg.clone());
        let js = j.direct_sum(&s).unwrap();
        assert_eq!(stable_iso(&js, &s.direct_sum(&j).unwrap()).unwrap(), IsoVerdict::Iso);
        assert_eq!(stable_iso(&js, &j.direct_sum(&s.shift(1)).unwrap()).unwrap(), IsoVerdict::NotIso);
    }

    #[test]
    fn relative_membership() {
        let j = joker();
        let alg = j.algebra().clone();
        let e0 = Profile::new(vec![1]).unwrap();
        let s = GradedModule::unit(alg.clone());
        assert!(relative_picard_member(&s, &e0).unwrap());
        assert!(!relative_picard_member(&syzygy(&alg, 1, 0), &e0).unwrap());
        assert!(!relative_picard_member(&j, &e0).unwrap());
    }
}
