//! Bounded graded modules over a profile algebra.
//!
//! A module stores, for every Milnor basis element `b` and every degree `d` of its span,
//! the matrix of `b: M_d → M_{d+|b|}`. Matrices use the row convention: row `i` is the
//! image of the `i`-th basis vector of `M_d`, so `ρ(a)∘ρ(b)` is the product
//! `ρ(b)_d · ρ(a)_{d+|b|}`.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::ToString;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::f2::{BitVec, F2Matrix, Subspace};
use crate::milnor::{Element, HopfAlgebra, Profile};

#[derive(Clone, Debug)]
pub struct GradedModule {
    algebra: Arc<HopfAlgebra>,
    lo: i32,
    dims: Vec<usize>,
    /// `actions[b][d - lo]`; columns are zero when `d + |b|` leaves the span.
    actions: Vec<Vec<F2Matrix>>,
}

impl PartialEq for GradedModule {
    fn eq(&self, other: &Self) -> bool {
        self.algebra.profile() == other.algebra.profile()
            && self.lo == other.lo
            && self.dims == other.dims
            && self.actions == other.actions
    }
}

impl Eq for GradedModule {}

/// A degree-`degree` linear map between two modules, one matrix per source degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleMap {
    pub degree: i32,
    pub source_lo: i32,
    pub matrices: Vec<F2Matrix>,
}

impl ModuleMap {
    pub fn zero(source: &GradedModule, target: &GradedModule, degree: i32) -> Self {
        Self {
            degree,
            source_lo: source.lo,
            matrices: source.degrees().map(|d| F2Matrix::zeros(source.dim_in(d), target.dim_in(d + degree))).collect(),
        }
    }

    pub fn matrix(&self, d: i32) -> Option<&F2Matrix> {
        let i = d - self.source_lo;
        if i < 0 {
            return None;
        }
        self.matrices.get(i as usize)
    }

    pub fn apply(&self, d: i32, v: &BitVec, target_dim: usize) -> BitVec {
        match self.matrix(d) {
            Some(m) => m.vec_mul_unchecked(v),
            None => BitVec::zeros(target_dim),
        }
    }

    /// Checks `f(b·m) = b·f(m)` for every algebra generator `b`.
    pub fn check(&self, source: &GradedModule, target: &GradedModule) -> Result<()> {
        let alg = source.algebra();
        for &g in alg.generators() {
            let gd = alg.degree(g);
            for d in source.degrees() {
                for i in 0..source.dim_in(d) {
                    let m = BitVec::unit(source.dim_in(d), i);
                    let lhs = self.apply(d + gd, &source.act(g, d, &m), target.dim_in(d + gd + self.degree));
                    let rhs = target.act(g, d + self.degree, &self.apply(d, &m, target.dim_in(d + self.degree)));
                    if lhs != rhs {
                        return Err(Error::NotModuleMap(alg.format_basis(g)));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.matrices.iter().all(F2Matrix::is_zero)
    }

    /// Flattened coefficient vector, in source-degree order.
    pub fn flatten(&self) -> BitVec {
        let total: usize = self.matrices.iter().map(|m| m.row_count() * m.col_count()).sum();
        let mut out = BitVec::zeros(total);
        let mut at = 0;
        for m in &self.matrices {
            for r in m.rows() {
                out.xor_at(at, r);
                at += m.col_count();
            }
        }
        out
    }
}

/// Layout of a free module: basis of degree `t` is the pairs `(generator, algebra basis)`
/// in generator order.
#[derive(Clone, Debug)]
pub(crate) struct FreeLayout {
    pub gen_degrees: Vec<i32>,
    pub lo: i32,
    /// `offsets[t - lo][g]` is the position of generator `g`'s block in degree `t`.
    pub offsets: Vec<Vec<usize>>,
    pub dims: Vec<usize>,
}

impl FreeLayout {
    pub fn new(alg: &HopfAlgebra, gen_degrees: &[i32], max_degree: Option<i32>) -> Self {
        let gen_degrees = gen_degrees.to_vec();
        if gen_degrees.is_empty() {
            return Self { gen_degrees, lo: 0, offsets: Vec::new(), dims: Vec::new() };
        }
        let lo = *gen_degrees.iter().min().unwrap();
        let mut hi = gen_degrees.iter().max().unwrap() + alg.top_degree();
        if let Some(m) = max_degree {
            hi = hi.min(m);
        }
        let mut offsets = Vec::new();
        let mut dims = Vec::new();
        for t in lo..=hi {
            let mut at = 0;
            let mut row = Vec::with_capacity(gen_degrees.len());
            for &g in &gen_degrees {
                row.push(at);
                at += alg.basis_in_degree(t - g).len();
            }
            offsets.push(row);
            dims.push(at);
        }
        Self { gen_degrees, lo, offsets, dims }
    }

    pub fn hi(&self) -> i32 {
        self.lo + self.dims.len() as i32 - 1
    }

    pub fn dim_in(&self, t: i32) -> usize {
        if t < self.lo || t > self.hi() {
            0
        } else {
            self.dims[(t - self.lo) as usize]
        }
    }

    /// Position of `b · g` in degree `t = |g| + |b|`.
    pub fn position(&self, alg: &HopfAlgebra, g: usize, b: usize) -> Option<usize> {
        let t = self.gen_degrees[g] + alg.degree(b);
        if t > self.hi() {
            return None;
        }
        let start = alg.basis_in_degree(alg.degree(b)).start;
        Some(self.offsets[(t - self.lo) as usize][g] + b - start)
    }

    /// `(generator, algebra basis index)` of a basis position in degree `t`.
    pub fn decode(&self, alg: &HopfAlgebra, t: i32, pos: usize) -> (usize, usize) {
        let row = &self.offsets[(t - self.lo) as usize];
        let g = row.partition_point(|&o| o <= pos) - 1;
        let start = alg.basis_in_degree(t - self.gen_degrees[g]).start;
        (g, start + pos - row[g])
    }

    /// `a · v` for `v` in degree `t`.
    pub fn act(&self, alg: &HopfAlgebra, a: usize, t: i32, v: &BitVec) -> BitVec {
        let target = t + alg.degree(a);
        let mut out = BitVec::zeros(self.dim_in(target));
        if out.is_empty() {
            return out;
        }
        for pos in v.iter_ones() {
            let (g, b) = self.decode(alg, t, pos);
            for &c in alg.product_basis(a, b) {
                if let Some(p) = self.position(alg, g, c) {
                    out.toggle(p);
                }
            }
        }
        out
    }
}

impl GradedModule {
    /// Builds a module from raw action tables; the span is trimmed to nonzero degrees.
    pub(crate) fn from_parts(
        algebra: Arc<HopfAlgebra>,
        lo: i32,
        dims: Vec<usize>,
        actions: Vec<Vec<F2Matrix>>,
    ) -> Self {
        let mut m = Self { algebra, lo, dims, actions };
        m.trim();
        m
    }

    fn trim(&mut self) {
        let first = self.dims.iter().position(|&d| d > 0);
        let Some(first) = first else {
            self.lo = 0;
            self.dims.clear();
            self.actions.iter_mut().for_each(Vec::clear);
            return;
        };
        let last = self.dims.iter().rposition(|&d| d > 0).unwrap();
        self.lo += first as i32;
        self.dims = self.dims[first..=last].to_vec();
        for per_degree in &mut self.actions {
            *per_degree = per_degree[first..=last].to_vec();
        }
    }

    pub fn zero(algebra: Arc<HopfAlgebra>) -> Self {
        let n = algebra.dimension();
        Self { algebra, lo: 0, dims: Vec::new(), actions: vec![Vec::new(); n] }
    }

    /// The unit module `F2` in degree 0.
    pub fn unit(algebra: Arc<HopfAlgebra>) -> Self {
        Self::trivial(algebra, &[(0, 1)])
    }

    /// A module with the given `(degree, dimension)` pairs and every positive-degree
    /// element acting by zero.
    pub fn trivial(algebra: Arc<HopfAlgebra>, degree_dims: &[(i32, usize)]) -> Self {
        if degree_dims.is_empty() {
            return Self::zero(algebra);
        }
        let lo = degree_dims.iter().map(|p| p.0).min().unwrap();
        let hi = degree_dims.iter().map(|p| p.0).max().unwrap();
        let mut dims = vec![0usize; (hi - lo + 1) as usize];
        for &(d, n) in degree_dims {
            dims[(d - lo) as usize] += n;
        }
        let actions = (0..algebra.dimension())
            .map(|b| {
                (lo..=hi)
                    .map(|d| {
                        let src = dims[(d - lo) as usize];
                        let tgt_d = d + algebra.degree(b);
                        let tgt = if tgt_d <= hi { dims[(tgt_d - lo) as usize] } else { 0 };
                        if b == 0 {
                            F2Matrix::identity(src)
                        } else {
                            F2Matrix::zeros(src, tgt)
                        }
                    })
                    .collect()
            })
            .collect();
        Self::from_parts(algebra, lo, dims, actions)
    }

    /// Free module on generators in the given degrees, acting by left multiplication.
    pub fn free(algebra: Arc<HopfAlgebra>, gen_degrees: &[i32]) -> Self {
        let layout = FreeLayout::new(&algebra, gen_degrees, None);
        Self::from_free_layout(algebra, &layout)
    }

    pub(crate) fn from_free_layout(algebra: Arc<HopfAlgebra>, layout: &FreeLayout) -> Self {
        if layout.dims.is_empty() {
            return Self::zero(algebra);
        }
        let lo = layout.lo;
        let hi = layout.hi();
        let actions = (0..algebra.dimension())
            .map(|a| {
                (lo..=hi)
                    .map(|t| {
                        let rows = (0..layout.dim_in(t))
                            .map(|p| layout.act(&algebra, a, t, &BitVec::unit(layout.dim_in(t), p)))
                            .collect();
                        F2Matrix::from_rows(layout.dim_in(t + algebra.degree(a)), rows)
                    })
                    .collect()
            })
            .collect();
        Self::from_parts(algebra, lo, layout.dims.clone(), actions)
    }

    /// Builds a module from the actions of a set of algebra elements (basis indices),
    /// completing them to the whole Milnor basis through products and then checking
    /// every module axiom.
    ///
    /// `declared` lists `(basis index, per-degree matrices)`; if it is empty every
    /// positive-degree element acts by zero.
    pub fn from_declared_actions(
        algebra: Arc<HopfAlgebra>,
        lo: i32,
        dims: Vec<usize>,
        declared: Vec<(usize, Vec<F2Matrix>)>,
    ) -> Result<Self> {
        let alg = &*algebra;
        let span = dims.len();
        let dim_at = |d: i32| -> usize {
            if d < lo || d >= lo + span as i32 {
                0
            } else {
                dims[(d - lo) as usize]
            }
        };
        let identity: Vec<F2Matrix> = (0..span).map(|i| F2Matrix::identity(dims[i])).collect();
        let zero_action = |deg: i32| -> Vec<F2Matrix> {
            (0..span).map(|i| F2Matrix::zeros(dims[i], dim_at(lo + i as i32 + deg))).collect()
        };
        let mut actions: Vec<Option<Vec<F2Matrix>>> = vec![None; alg.dimension()];
        actions[0] = Some(identity.clone());
        if declared.is_empty() {
            for (b, slot) in actions.iter_mut().enumerate().skip(1) {
                *slot = Some(zero_action(alg.degree(b)));
            }
        } else {
            let compose = |first: &[F2Matrix], first_deg: i32, second: &[F2Matrix]| -> Vec<F2Matrix> {
                (0..span)
                    .map(|i| {
                        let mid = lo + i as i32 + first_deg;
                        let m1 = &first[i];
                        if mid < lo || mid >= lo + span as i32 {
                            return F2Matrix::zeros(m1.row_count(), 0);
                        }
                        let m2 = &second[(mid - lo) as usize];
                        m1.mul(m2).expect("shapes agree")
                    })
                    .collect()
            };
            // kept[n]: elements of degree n (with their actions) spanning the products so far
            let mut kept: Vec<Vec<(Element, Vec<F2Matrix>)>> = vec![Vec::new(); alg.top_degree() as usize + 1];
            kept[0].push((alg.unit(), identity));
            for n in 1..=alg.top_degree() {
                let range = alg.basis_in_degree(n);
                let mut span_space = Subspace::with_tags(range.len(), 0);
                let mut level: Vec<(Element, Vec<F2Matrix>)> = Vec::new();
                let mut coords = Vec::new();
                for (g, g_action) in &declared {
                    let gd = alg.degree(*g);
                    if gd > n {
                        continue;
                    }
                    for (w, w_action) in &kept[(n - gd) as usize] {
                        let prod = alg.multiply(&alg.basis_element(*g), w)?;
                        let mut local = BitVec::zeros(range.len());
                        for i in prod.0.iter_ones() {
                            local.toggle(i - range.start);
                        }
                        if span_space.add(local.clone()) {
                            level.push((prod, compose(w_action, n - gd, g_action)));
                            coords.push(local);
                        }
                    }
                }
                if level.len() < range.len() {
                    return Err(Error::NotGenerating { degree: n });
                }
                let basis_matrix = F2Matrix::from_rows(range.len(), coords).transpose();
                for b in range.clone() {
                    let combo = basis_matrix.solve(&BitVec::unit(range.len(), b - range.start))?.expect("full rank");
                    let mut acc = zero_action(n);
                    for k in combo.iter_ones() {
                        for (a, m) in acc.iter_mut().zip(&level[k].1) {
                            for r in 0..a.row_count() {
                                a.row_mut(r).xor_assign(m.row(r));
                            }
                        }
                    }
                    actions[b] = Some(acc);
                }
                kept[n as usize] = level;
            }
        }
        let actions: Vec<Vec<F2Matrix>> = actions.into_iter().map(|a| a.expect("filled")).collect();
        let module = Self { algebra, lo, dims, actions };
        for (g, given) in &declared {
            if &module.actions[*g] != given {
                return Err(Error::ModuleAxiom(format!(
                    "declared action of {} is inconsistent with the other declared actions",
                    module.algebra.format_basis(*g)
                )));
            }
        }
        module.check_axioms()?;
        let mut module = module;
        module.trim();
        Ok(module)
    }

    /// Verifies `ρ(1) = id` and `ρ(a)∘ρ(b) = ρ(ab)` for all basis pairs.
    pub fn check_axioms(&self) -> Result<()> {
        let alg = &*self.algebra;
        for d in self.degrees() {
            if self.actions[0][(d - self.lo) as usize] != F2Matrix::identity(self.dim_in(d)) {
                return Err(Error::ModuleAxiom("unit does not act as the identity".to_string()));
            }
        }
        for a in 1..alg.dimension() {
            for b in 1..alg.dimension() {
                let (da, db) = (alg.degree(a), alg.degree(b));
                for d in self.degrees() {
                    if d + da + db > self.hi() {
                        continue;
                    }
                    let first = self.action(b, d).expect("in span");
                    let second = match self.action(a, d + db) {
                        Some(m) => m.clone(),
                        None => F2Matrix::zeros(self.dim_in(d + db), self.dim_in(d + da + db)),
                    };
                    let lhs = first.mul(&second)?;
                    let mut rhs = F2Matrix::zeros(self.dim_in(d), self.dim_in(d + da + db));
                    for &c in alg.product_basis(a, b) {
                        let m = self.action(c, d).expect("in span");
                        for r in 0..rhs.row_count() {
                            rhs.row_mut(r).xor_assign(m.row(r));
                        }
                    }
                    if lhs != rhs {
                        return Err(Error::ModuleAxiom(format!(
                            "{} acting after {} differs from their product in degree {d}",
                            alg.format_basis(a),
                            alg.format_basis(b)
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn algebra(&self) -> &Arc<HopfAlgebra> {
        &self.algebra
    }

    pub fn lo(&self) -> i32 {
        self.lo
    }

    /// Highest nonzero degree (`lo - 1` for the zero module).
    pub fn hi(&self) -> i32 {
        self.lo + self.dims.len() as i32 - 1
    }

    pub fn degrees(&self) -> core::ops::RangeInclusive<i32> {
        self.lo..=self.hi()
    }

    pub fn dim_in(&self, d: i32) -> usize {
        if d < self.lo || d > self.hi() {
            0
        } else {
            self.dims[(d - self.lo) as usize]
        }
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.dims.is_empty()
    }

    /// Nonzero `(degree, dimension)` pairs.
    pub fn graded_dims(&self) -> Vec<(i32, usize)> {
        self.degrees().map(|d| (d, self.dim_in(d))).filter(|&(_, n)| n > 0).collect()
    }

    /// Matrix of the basis element `b` on `M_d`.
    pub fn action(&self, b: usize, d: i32) -> Option<&F2Matrix> {
        if d < self.lo || d > self.hi() {
            return None;
        }
        Some(&self.actions[b][(d - self.lo) as usize])
    }

    pub fn act(&self, b: usize, d: i32, v: &BitVec) -> BitVec {
        let target = self.dim_in(d + self.algebra.degree(b));
        match self.action(b, d) {
            Some(m) if target > 0 => m.vec_mul_unchecked(v),
            _ => BitVec::zeros(target),
        }
    }

    /// Matrix of a homogeneous element on `M_d`.
    pub fn element_matrix(&self, x: &Element, d: i32) -> Result<F2Matrix> {
        let deg = self.algebra.element_degree(x)?.unwrap_or(0);
        let mut out = F2Matrix::zeros(self.dim_in(d), self.dim_in(d + deg));
        for b in x.0.iter_ones() {
            if let Some(m) = self.action(b, d) {
                if m.col_count() == out.col_count() {
                    for r in 0..out.row_count() {
                        out.row_mut(r).xor_assign(m.row(r));
                    }
                }
            }
        }
        Ok(out)
    }

    fn same_algebra(&self, other: &GradedModule) -> Result<()> {
        if self.algebra.profile() == other.algebra.profile() {
            Ok(())
        } else {
            Err(Error::MixedAlgebras)
        }
    }

    pub fn shift(&self, m: i32) -> GradedModule {
        let mut out = self.clone();
        if !out.is_zero() {
            out.lo += m;
        }
        out
    }

    pub fn direct_sum(&self, other: &GradedModule) -> Result<GradedModule> {
        self.same_algebra(other)?;
        if self.is_zero() {
            return Ok(other.clone());
        }
        if other.is_zero() {
            return Ok(self.clone());
        }
        let lo = self.lo.min(other.lo);
        let hi = self.hi().max(other.hi());
        let dims: Vec<usize> = (lo..=hi).map(|d| self.dim_in(d) + other.dim_in(d)).collect();
        let alg = &self.algebra;
        let actions = (0..alg.dimension())
            .map(|b| {
                (lo..=hi)
                    .map(|d| {
                        let t = d + alg.degree(b);
                        let cols = if t <= hi { self.dim_in(t) + other.dim_in(t) } else { 0 };
                        let mut m = F2Matrix::zeros(self.dim_in(d) + other.dim_in(d), cols);
                        if cols > 0 {
                            if let Some(a) = self.action(b, d) {
                                for r in 0..a.row_count() {
                                    m.row_mut(r).xor_at(0, a.row(r));
                                }
                            }
                            if let Some(a) = other.action(b, d) {
                                for r in 0..a.row_count() {
                                    m.row_mut(self.dim_in(d) + r).xor_at(self.dim_in(t), a.row(r));
                                }
                            }
                        }
                        m
                    })
                    .collect()
            })
            .collect();
        Ok(Self::from_parts(self.algebra.clone(), lo, dims, actions))
    }

    /// Offset of the block `M_d ⊗ N_{n-d}` inside `(M ⊗ N)_n`.
    fn tensor_offset(m: &GradedModule, n: &GradedModule, total: i32, d: i32) -> usize {
        (m.lo..d).map(|e| m.dim_in(e) * n.dim_in(total - e)).sum()
    }

    /// Tensor product with the diagonal action `a(m ⊗ n) = Σ a′m ⊗ a″n`.
    pub fn tensor(&self, other: &GradedModule) -> Result<GradedModule> {
        self.same_algebra(other)?;
        let alg = self.algebra.clone();
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(alg));
        }
        let lo = self.lo + other.lo;
        let hi = self.hi() + other.hi();
        let dims: Vec<usize> =
            (lo..=hi).map(|n| (self.lo..=self.hi()).map(|d| self.dim_in(d) * other.dim_in(n - d)).sum()).collect();
        let dim_at = |n: i32| if n < lo || n > hi { 0 } else { dims[(n - lo) as usize] };
        let mut actions = Vec::with_capacity(alg.dimension());
        for a in 0..alg.dimension() {
            let da = alg.degree(a);
            let mut per_degree = Vec::with_capacity(dims.len());
            for n in lo..=hi {
                let mut mat = F2Matrix::zeros(dim_at(n), dim_at(n + da));
                if n + da <= hi {
                    for d in self.degrees() {
                        let e = n - d;
                        let (dm, dn) = (self.dim_in(d), other.dim_in(e));
                        if dm == 0 || dn == 0 {
                            continue;
                        }
                        let src_off = Self::tensor_offset(self, other, n, d);
                        for &(l, r) in alg.coproduct_basis(a) {
                            let (dl, dr) = (alg.degree(l), alg.degree(r));
                            let (tm, tn) = (self.dim_in(d + dl), other.dim_in(e + dr));
                            if tm == 0 || tn == 0 {
                                continue;
                            }
                            let ml = self.action(l, d).expect("in span");
                            let mr = other.action(r, e).expect("in span");
                            let tgt_off = Self::tensor_offset(self, other, n + da, d + dl);
                            for i in 0..dm {
                                let li = ml.row(i);
                                if li.is_zero() {
                                    continue;
                                }
                                for j in 0..dn {
                                    let rj = mr.row(j);
                                    if rj.is_zero() {
                                        continue;
                                    }
                                    let row = mat.row_mut(src_off + i * dn + j);
                                    for k in li.iter_ones() {
                                        row.xor_at(tgt_off + k * tn, rj);
                                    }
                                }
                            }
                        }
                    }
                }
                per_degree.push(mat);
            }
            actions.push(per_degree);
        }
        Ok(Self::from_parts(alg, lo, dims, actions))
    }

    /// Linear dual: `(DM)_k = (M_{-k})*` with `(a·f)(m) = f(χ(a)m)`.
    pub fn dual(&self) -> GradedModule {
        let alg = self.algebra.clone();
        if self.is_zero() {
            return Self::zero(alg);
        }
        let lo = -self.hi();
        let hi = -self.lo;
        let dims: Vec<usize> = (lo..=hi).map(|k| self.dim_in(-k)).collect();
        let actions = (0..alg.dimension())
            .map(|a| {
                let chi = alg.antipode(&alg.basis_element(a)).expect("same algebra");
                (lo..=hi)
                    .map(|k| {
                        let src = -k - alg.degree(a);
                        if src < self.lo {
                            return F2Matrix::zeros(self.dim_in(-k), 0);
                        }
                        self.element_matrix(&chi, src).expect("homogeneous").transpose()
                    })
                    .collect()
            })
            .collect();
        Self::from_parts(alg, lo, dims, actions)
    }

    /// Restriction along the inclusion of the profile subalgebra `sub`.
    pub fn restrict(&self, sub: &Arc<HopfAlgebra>) -> Result<GradedModule> {
        if !self.algebra.profile().contains(sub.profile()) {
            return Err(Error::NotSubProfile {
                sub: sub.profile().to_string(),
                amb: self.algebra.profile().to_string(),
            });
        }
        let actions = (0..sub.dimension())
            .map(|b| {
                let i = self.algebra.index_of(sub.milnor(b)).expect("sub basis is ambient basis");
                self.actions[i].clone()
            })
            .collect();
        Ok(Self::from_parts(sub.clone(), self.lo, self.dims.clone(), actions))
    }

    /// Elements `a·m` for every positive-degree basis element, as a subspace of each degree.
    pub fn augmentation_image(&self) -> Vec<Subspace> {
        let alg = &self.algebra;
        let mut spaces: Vec<Subspace> = self.degrees().map(|d| Subspace::new(self.dim_in(d))).collect();
        for &g in alg.generators() {
            for d in self.degrees() {
                let t = d + alg.degree(g);
                if t > self.hi() {
                    continue;
                }
                let m = self.action(g, d).expect("in span");
                for r in m.rows() {
                    spaces[(t - self.lo) as usize].add(r.clone());
                }
            }
        }
        spaces
    }

    /// Minimal generators: basis vectors completing `A⁺M` in each degree.
    pub fn minimal_generators(&self) -> Vec<(i32, BitVec)> {
        let spaces = self.augmentation_image();
        let mut out = Vec::new();
        for d in self.degrees() {
            let s = &spaces[(d - self.lo) as usize];
            for i in s.complement_indices() {
                out.push((d, BitVec::unit(self.dim_in(d), i)));
            }
        }
        out
    }

    /// The free module on the minimal generators and its surjection onto `self`.
    pub fn free_cover(&self) -> (GradedModule, ModuleMap) {
        let gens = self.minimal_generators();
        let degs: Vec<i32> = gens.iter().map(|g| g.0).collect();
        let layout = FreeLayout::new(&self.algebra, &degs, None);
        let free = Self::from_free_layout(self.algebra.clone(), &layout);
        let alg = &self.algebra;
        let matrices = free
            .degrees()
            .map(|t| {
                let rows = (0..free.dim_in(t))
                    .map(|p| {
                        let (g, b) = layout.decode(alg, t, p);
                        self.act(b, gens[g].0, &gens[g].1)
                    })
                    .collect();
                F2Matrix::from_rows(self.dim_in(t), rows)
            })
            .collect();
        let map = ModuleMap { degree: 0, source_lo: free.lo, matrices };
        (free, map)
    }

    /// Submodule spanned in each degree by the given vectors (assumed closed under the
    /// action), with its inclusion.
    pub fn submodule(&self, spaces: &[Subspace]) -> (GradedModule, ModuleMap) {
        let alg = self.algebra.clone();
        let lo = self.lo;
        let span = self.dims.len();
        let dims: Vec<usize> = spaces.iter().map(Subspace::dim).collect();
        let tagged: Vec<Subspace> = spaces
            .iter()
            .map(|s| {
                let mut t = Subspace::with_tags(s.ambient(), s.dim());
                for (i, v) in s.basis().iter().enumerate() {
                    t.add_tagged(v.clone(), BitVec::unit(s.dim(), i));
                }
                t
            })
            .collect();
        let actions = (0..alg.dimension())
            .map(|b| {
                (0..span)
                    .map(|i| {
                        let d = lo + i as i32;
                        let t = d + alg.degree(b);
                        let cols = if t <= self.hi() { dims[(t - lo) as usize] } else { 0 };
                        let rows = spaces[i]
                            .basis()
                            .iter()
                            .map(|v| {
                                if cols == 0 {
                                    return BitVec::zeros(0);
                                }
                                tagged[(t - lo) as usize]
                                    .express(&self.act(b, d, v))
                                    .expect("subspace closed under the action")
                            })
                            .collect();
                        F2Matrix::from_rows(cols, rows)
                    })
                    .collect()
            })
            .collect();
        let inclusion = ModuleMap {
            degree: 0,
            source_lo: lo,
            matrices: spaces.iter().map(|s| F2Matrix::from_rows(s.ambient(), s.basis().to_vec())).collect(),
        };
        let sub = Self { algebra: alg, lo, dims, actions };
        let first = sub.dims.iter().position(|&d| d > 0);
        let mut inclusion = inclusion;
        if let Some(f) = first {
            let last = sub.dims.iter().rposition(|&d| d > 0).unwrap();
            inclusion.matrices = inclusion.matrices[f..=last].to_vec();
            inclusion.source_lo = lo + f as i32;
        } else {
            inclusion.matrices.clear();
            inclusion.source_lo = 0;
        }
        let mut sub = sub;
        sub.trim();
        (sub, inclusion)
    }

    /// Quotient by a submodule given degreewise, with the projection. The quotient basis
    /// is the standard basis vectors off the pivots of each subspace.
    pub fn quotient(&self, spaces: &[Subspace]) -> (GradedModule, ModuleMap) {
        let alg = self.algebra.clone();
        let lo = self.lo;
        let span = self.dims.len();
        let keep: Vec<Vec<usize>> = spaces.iter().map(Subspace::complement_indices).collect();
        let dims: Vec<usize> = keep.iter().map(Vec::len).collect();
        let project = |i: usize, mut v: BitVec| -> BitVec {
            spaces[i].reduce(&mut v);
            let mut out = BitVec::zeros(keep[i].len());
            for (j, &k) in keep[i].iter().enumerate() {
                if v.get(k) {
                    out.set(j, true);
                }
            }
            out
        };
        let actions = (0..alg.dimension())
            .map(|b| {
                (0..span)
                    .map(|i| {
                        let d = lo + i as i32;
                        let t = d + alg.degree(b);
                        if t > self.hi() {
                            return F2Matrix::zeros(dims[i], 0);
                        }
                        let ti = (t - lo) as usize;
                        let rows = keep[i]
                            .iter()
                            .map(|&k| project(ti, self.act(b, d, &BitVec::unit(self.dims[i], k))))
                            .collect();
                        F2Matrix::from_rows(dims[ti], rows)
                    })
                    .collect()
            })
            .collect();
        let projection_mats: Vec<F2Matrix> = (0..span)
            .map(|i| {
                let rows = (0..self.dims[i]).map(|k| project(i, BitVec::unit(self.dims[i], k))).collect();
                F2Matrix::from_rows(dims[i], rows)
            })
            .collect();
        let quotient = Self::from_parts(alg, lo, dims, actions);
        (quotient, ModuleMap { degree: 0, source_lo: lo, matrices: projection_mats })
    }

    /// Kernel of a degree-0 module map out of `self`, as a submodule.
    pub fn kernel(&self, map: &ModuleMap, target: &GradedModule) -> (GradedModule, ModuleMap) {
        let spaces: Vec<Subspace> = self
            .degrees()
            .map(|d| {
                let mut s = Subspace::new(self.dim_in(d));
                if target.dim_in(d + map.degree) == 0 {
                    for i in 0..self.dim_in(d) {
                        s.add(BitVec::unit(self.dim_in(d), i));
                    }
                } else if let Some(m) = map.matrix(d) {
                    for v in m.left_kernel() {
                        s.add(v);
                    }
                }
                s
            })
            .collect();
        self.submodule(&spaces)
    }

    /// Basis of the degree-`t` module maps `self → target`.
    pub fn hom_basis(&self, target: &GradedModule, t: i32) -> Result<Vec<ModuleMap>> {
        self.same_algebra(target)?;
        let alg = &self.algebra;
        // unknown (d, i, j): entry i -> j of f_d : M_d -> N_{d+t}
        let mut offsets = Vec::new();
        let mut unknowns = 0usize;
        for d in self.degrees() {
            offsets.push(unknowns);
            unknowns += self.dim_in(d) * target.dim_in(d + t);
        }
        if unknowns == 0 {
            return Ok(Vec::new());
        }
        let var = |d: i32, i: usize, j: usize| offsets[(d - self.lo) as usize] + i * target.dim_in(d + t) + j;
        let mut equations = Vec::new();
        for &g in alg.generators() {
            let gd = alg.degree(g);
            for d in self.degrees() {
                let tn = target.dim_in(d + t + gd);
                if tn == 0 {
                    continue;
                }
                let src_action = self.action(g, d).expect("in span");
                let tgt_action = target.action(g, d + t);
                for i in 0..self.dim_in(d) {
                    for j in 0..tn {
                        let mut eq = BitVec::zeros(unknowns);
                        if self.dim_in(d + gd) > 0 {
                            for k in src_action.row(i).iter_ones() {
                                eq.toggle(var(d + gd, k, j));
                            }
                        }
                        if let Some(ta) = tgt_action {
                            for l in 0..target.dim_in(d + t) {
                                if ta.row(l).get(j) {
                                    eq.toggle(var(d, i, l));
                                }
                            }
                        }
                        if !eq.is_zero() {
                            equations.push(eq);
                        }
                    }
                }
            }
        }
        let system = F2Matrix::from_rows(unknowns, equations);
        Ok(system
            .kernel_basis()
            .into_iter()
            .map(|x| {
                let matrices = self
                    .degrees()
                    .map(|d| {
                        let (rows, cols) = (self.dim_in(d), target.dim_in(d + t));
                        let mut m = F2Matrix::zeros(rows, cols);
                        for i in 0..rows {
                            for j in 0..cols {
                                if x.get(var(d, i, j)) {
                                    m.set(i, j, true);
                                }
                            }
                        }
                        m
                    })
                    .collect();
                ModuleMap { degree: t, source_lo: self.lo, matrices }
            })
            .collect())
    }

    /// Dimension of the stable maps `[self, target]` in degree `t`: module maps modulo those
    /// factoring through the free cover of `target`.
    pub fn stable_hom_dim(&self, target: &GradedModule, t: i32) -> Result<usize> {
        let homs = self.hom_basis(target, t)?;
        if homs.is_empty() {
            return Ok(0);
        }
        let (cover, projection) = target.free_cover();
        let through = self.hom_basis(&cover, t)?;
        let flat_dim = homs[0].flatten().len();
        let mut image = Subspace::new(flat_dim);
        for h in &through {
            let composite = compose(self, h, &projection, target);
            image.add(composite.flatten());
        }
        Ok(homs.len() - image.dim())
    }
}

/// `second ∘ first` where `first: source → mid` and `second: mid → target` has degree 0.
pub fn compose(source: &GradedModule, first: &ModuleMap, second: &ModuleMap, target: &GradedModule) -> ModuleMap {
    let t = first.degree + second.degree;
    let matrices = source
        .degrees()
        .map(|d| {
            let cols = target.dim_in(d + t);
            match (first.matrix(d), second.matrix(d + first.degree)) {
                (Some(a), Some(b)) if a.col_count() == b.row_count() => a.mul(b).expect("shapes agree"),
                _ => F2Matrix::zeros(source.dim_in(d), cols),
            }
        })
        .collect();
    ModuleMap { degree: t, source_lo: source.lo(), matrices }
}

/// Plain description of a module by the actions of named operations on basis vectors.
///
/// Basis ids are global and ordered by `(degree, listed order)` of `degrees`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleSpec {
    pub profile: Profile,
    pub degrees: Vec<i32>,
    pub actions: Vec<ActionSpec>,
    /// Operations declared to act by zero everywhere.
    pub zero_ops: Vec<alloc::string::String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActionSpec {
    pub op: alloc::string::String,
    pub src: usize,
    pub dst: Vec<usize>,
}

impl ModuleSpec {
    pub fn load(&self) -> Result<GradedModule> {
        let alg = Arc::new(HopfAlgebra::build(self.profile.clone())?);
        self.load_with(alg)
    }

    pub fn load_with(&self, alg: Arc<HopfAlgebra>) -> Result<GradedModule> {
        if alg.profile() != &self.profile {
            return Err(Error::MixedAlgebras);
        }
        if self.degrees.is_empty() {
            return Ok(GradedModule::zero(alg));
        }
        let mut order: Vec<usize> = (0..self.degrees.len()).collect();
        order.sort_by_key(|&i| (self.degrees[i], i));
        let sorted: Vec<i32> = order.iter().map(|&i| self.degrees[i]).collect();
        let lo = sorted[0];
        let hi = *sorted.last().unwrap();
        let mut dims = vec![0usize; (hi - lo + 1) as usize];
        // global id -> (degree, local index)
        let mut place = Vec::with_capacity(sorted.len());
        for &d in &sorted {
            let slot = &mut dims[(d - lo) as usize];
            place.push((d, *slot));
            *slot += 1;
        }
        let dim_at = |d: i32| if d < lo || d > hi { 0 } else { dims[(d - lo) as usize] };
        let mut declared: Vec<(usize, Vec<F2Matrix>)> = Vec::new();
        let op_index = |name: &str, declared: &mut Vec<(usize, Vec<F2Matrix>)>| -> Result<usize> {
            let b = alg.named_element(name)?.index;
            if let Some(k) = declared.iter().position(|(x, _)| *x == b) {
                return Ok(k);
            }
            if b == 0 {
                return Err(Error::InvalidDocument("the unit cannot be declared as an operation".to_string()));
            }
            let deg = alg.degree(b);
            declared.push((b, (lo..=hi).map(|d| F2Matrix::zeros(dim_at(d), dim_at(d + deg))).collect()));
            Ok(declared.len() - 1)
        };
        for name in &self.zero_ops {
            op_index(name, &mut declared)?;
        }
        for act in &self.actions {
            let k = op_index(&act.op, &mut declared)?;
            let b = declared[k].0;
            let deg = alg.degree(b);
            let &(sd, si) = place
                .get(act.src)
                .ok_or_else(|| Error::InvalidDocument(format!("basis id {} out of range", act.src)))?;
            let mut seen = BTreeSet::new();
            for &dst in &act.dst {
                let &(dd, di) =
                    place.get(dst).ok_or_else(|| Error::InvalidDocument(format!("basis id {dst} out of range")))?;
                if dd != sd + deg {
                    return Err(Error::DegreeInconsistent { op: act.op.clone(), src: act.src, expected: sd + deg });
                }
                if !seen.insert(dst) {
                    continue;
                }
                let m = &mut declared[k].1[(sd - lo) as usize];
                let cur = m.get(si, di);
                m.set(si, di, !cur);
            }
        }
        GradedModule::from_declared_actions(alg, lo, dims, declared)
    }
}

/// Draws a random module over `alg` from random actions of the algebra generators, keeping
/// only draws that satisfy every module axiom. Returns `None` for a rejected draw.
pub fn random_module<R: Rng + ?Sized>(
    alg: &Arc<HopfAlgebra>,
    total_dim: usize,
    max_degree: i32,
    density: f64,
    rng: &mut R,
) -> Option<GradedModule> {
    if total_dim == 0 {
        return Some(GradedModule::zero(alg.clone()));
    }
    let mut degrees: Vec<i32> = (0..total_dim).map(|_| rng.gen_range(0..=max_degree)).collect();
    degrees.sort_unstable();
    let lo = degrees[0];
    let hi = *degrees.last().unwrap();
    let mut dims = vec![0usize; (hi - lo + 1) as usize];
    for d in &degrees {
        dims[(d - lo) as usize] += 1;
    }
    let dim_at = |d: i32| if d < lo || d > hi { 0 } else { dims[(d - lo) as usize] };
    let declared = alg
        .generators()
        .iter()
        .map(|&g| {
            let gd = alg.degree(g);
            let mats = (lo..=hi)
                .map(|d| {
                    let mut m = F2Matrix::zeros(dim_at(d), dim_at(d + gd));
                    for i in 0..m.row_count() {
                        for j in 0..m.col_count() {
                            if rng.gen_bool(density) {
                                m.set(i, j, true);
                            }
                        }
                    }
                    m
                })
                .collect();
            (g, mats)
        })
        .collect();
    GradedModule::from_declared_actions(alg.clone(), lo, dims, declared).ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::String;

    pub(crate) fn algebra(bounds: &[u32]) -> Arc<HopfAlgebra> {
        Arc::new(HopfAlgebra::build(Profile::new(bounds.to_vec()).unwrap()).unwrap())
    }

    fn act(op: &str, src: usize, dst: &[usize]) -> ActionSpec {
        ActionSpec { op: String::from(op), src, dst: dst.to_vec() }
    }

    pub(crate) fn joker_spec() -> ModuleSpec {
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
    }

    #[test]
    fn joker_loads() {
        let j = joker_spec().load().unwrap();
        assert_eq!(j.total_dim(), 5);
        assert_eq!(j.graded_dims(), vec![(0, 1), (1, 1), (2, 1), (3, 1), (4, 1)]);
        j.check_axioms().unwrap();
    }

    #[test]
    fn unit_document_loads() {
        let spec = ModuleSpec {
            profile: Profile::new(vec![2, 1]).unwrap(),
            degrees: vec![0],
            actions: Vec::new(),
            zero_ops: Vec::new(),
        };
        let s = spec.load().unwrap();
        assert_eq!(s, GradedModule::unit(s.algebra().clone()));
    }

    #[test]
    fn degree_inconsistent_action_rejected() {
        let mut spec = joker_spec();
        spec.actions.push(act("Sq1", 0, &[2]));
        assert!(matches!(spec.load(), Err(Error::DegreeInconsistent { .. })));
    }

    #[test]
    fn non_generating_and_inconsistent_documents_rejected() {
        let mut spec = joker_spec();
        spec.actions.retain(|a| a.op == "Sq1");
        assert!(matches!(spec.load(), Err(Error::NotGenerating { degree: 2 })));
        spec.zero_ops.push(String::from("Sq2"));
        spec.load().unwrap();
        // Sq2 Sq2 = Sq3 Sq1 fails if Sq2 Sq2 is nonzero on a class killed by Sq1.
        let bad = ModuleSpec {
            profile: Profile::new(vec![2, 1]).unwrap(),
            degrees: vec![0, 2, 4],
            actions: vec![act("Sq2", 0, &[1]), act("Sq2", 1, &[2])],
            zero_ops: vec![String::from("Sq1")],
        };
        assert!(matches!(bad.load(), Err(Error::ModuleAxiom(_))));
    }

    #[test]
    fn free_modules() {
        let d2 = algebra(&[1, 2, 1]);
        assert_eq!(GradedModule::free(d2.clone(), &[0]).total_dim(), 16);
        assert!(GradedModule::free(d2, &[]).is_zero());
        let a1 = algebra(&[2, 1]);
        let f = GradedModule::free(a1, &[0, 5]);
        assert_eq!(f.total_dim(), 16);
        assert_eq!((f.lo(), f.hi()), (0, 11));
        f.check_axioms().unwrap();
    }

    #[test]
    fn tensor_with_unit_and_dims() {
        let j = joker_spec().load().unwrap();
        let s = GradedModule::unit(j.algebra().clone());
        assert_eq!(s.tensor(&j).unwrap(), j);
        assert_eq!(j.tensor(&s).unwrap(), j);
        let jj = j.tensor(&j).unwrap();
        assert_eq!(jj.total_dim(), 25);
        jj.check_axioms().unwrap();
    }

    #[test]
    fn q0_acts_as_derivation_on_tensor() {
        let j = joker_spec().load().unwrap();
        let alg = j.algebra().clone();
        let q0 = alg.named_element("Q0").unwrap().index;
        let jj = j.tensor(&j).unwrap();
        // x0 ⊗ x0 sits alone in degree 0; Q0 sends it to x1⊗x0 + x0⊗x1.
        let image = jj.act(q0, 0, &BitVec::unit(1, 0));
        assert_eq!(image.count_ones(), 2);
    }

    #[test]
    fn duals() {
        let j = joker_spec().load().unwrap();
        let alg = j.algebra().clone();
        let s = GradedModule::unit(alg.clone());
        assert_eq!(s.dual(), s);
        assert_eq!(j.dual().dual(), j);
        j.dual().check_axioms().unwrap();
        let f = GradedModule::free(alg, &[0]);
        let df = f.dual();
        df.check_axioms().unwrap();
        // top class acts nontrivially: the dual is again free of rank one
        let top = df.algebra().top_index();
        let d = df.lo();
        assert!(!df.action(top, d).unwrap().is_zero());
    }

    #[test]
    fn shifts() {
        let a1 = algebra(&[2, 1]);
        let s3 = GradedModule::unit(a1).shift(3);
        assert_eq!(s3.graded_dims(), vec![(3, 1)]);
        let j = joker_spec().load().unwrap();
        assert_eq!(j.shift(2).shift(5), j.shift(7));
        assert_eq!(j.shift(0), j);
    }

    #[test]
    fn direct_sums() {
        let j = joker_spec().load().unwrap();
        let alg = j.algebra().clone();
        assert_eq!(j.direct_sum(&GradedModule::zero(alg.clone())).unwrap(), j);
        let f = GradedModule::free(alg, &[0]);
        let sum = j.direct_sum(&f).unwrap();
        assert_eq!(sum.total_dim(), 13);
        for d in -1..8 {
            assert_eq!(sum.dim_in(d), j.dim_in(d) + f.dim_in(d));
        }
        sum.check_axioms().unwrap();
    }

    #[test]
    fn restriction_keeps_q0_action() {
        let j = joker_spec().load().unwrap();
        let e0 = algebra(&[1]);
        let r = j.restrict(&e0).unwrap();
        assert_eq!(r.total_dim(), 5);
        r.check_axioms().unwrap();
        let q0 = e0.named_element("Q0").unwrap().index;
        assert_eq!(r.act(q0, 0, &BitVec::unit(1, 0)), BitVec::unit(1, 0));
        assert_eq!(r.act(q0, 3, &BitVec::unit(1, 0)), BitVec::unit(1, 0));
        assert!(r.act(q0, 1, &BitVec::unit(1, 0)).is_zero());
        assert!(matches!(j.restrict(&algebra(&[3, 2, 1])), Err(Error::NotSubProfile { .. })));
    }

    #[test]
    fn restriction_is_monoidal() {
        let j = joker_spec().load().unwrap();
        let e = algebra(&[1, 1]);
        let lhs = j.tensor(&j.dual()).unwrap().restrict(&e).unwrap();
        let rhs = j.restrict(&e).unwrap().tensor(&j.dual().restrict(&e).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn dual_of_tensor_is_tensor_of_duals() {
        let j = joker_spec().load().unwrap();
        let f = GradedModule::free(j.algebra().clone(), &[1]);
        let lhs = j.tensor(&f).unwrap().dual();
        let rhs = j.dual().tensor(&f.dual()).unwrap();
        // same graded dimensions; both are modules
        assert_eq!(lhs.graded_dims(), rhs.graded_dims());
        lhs.check_axioms().unwrap();
        rhs.check_axioms().unwrap();
    }

    #[test]
    fn stable_hom_examples() {
        let j = joker_spec().load().unwrap();
        let alg = j.algebra().clone();
        let s = GradedModule::unit(alg.clone());
        assert_eq!(s.stable_hom_dim(&s, 0).unwrap(), 1);
        let f = GradedModule::free(alg.clone(), &[0]);
        for t in -8..8 {
            assert_eq!(f.stable_hom_dim(&j, t).unwrap(), 0);
        }
        assert_eq!(j.stable_hom_dim(&j, 0).unwrap(), 1);
        let jf = j.direct_sum(&f).unwrap();
        for t in -3..3 {
            assert_eq!(jf.stable_hom_dim(&j, t).unwrap(), j.stable_hom_dim(&j, t).unwrap());
        }
    }

    #[test]
    fn hom_basis_maps_are_module_maps() {
        let j = joker_spec().load().unwrap();
        let f = GradedModule::free(j.algebra().clone(), &[0]);
        for h in f.hom_basis(&j, 0).unwrap() {
            h.check(&f, &j).unwrap();
        }
        assert_eq!(f.hom_basis(&j, 0).unwrap().len(), 1);
    }

    #[test]
    fn free_cover_is_surjective_module_map() {
        let j = joker_spec().load().unwrap();
        let (f, p) = j.free_cover();
        assert_eq!(f.total_dim(), 8);
        p.check(&f, &j).unwrap();
        let (k, inc) = f.kernel(&p, &j);
        assert_eq!(k.total_dim(), 3);
        k.check_axioms().unwrap();
        inc.check(&k, &f).unwrap();
    }
}
