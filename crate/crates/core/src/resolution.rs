//! Minimal free resolutions, Ext charts and Yoneda products.

use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;
use core::sync::atomic::{AtomicU64, Ordering};

use crate::error::{Error, Result};
use crate::f2::{BitVec, F2Matrix, Subspace};
use crate::milnor::{HopfAlgebra, Profile};
use crate::module::{FreeLayout, GradedModule};

static NEXT_ID: AtomicU64 = AtomicU64::new(1);

#[derive(Clone, Debug)]
struct Level {
    /// Generator degrees, nondecreasing.
    gen_degrees: Vec<i32>,
    /// `d(g)` as a vector of the previous level (or the module) in degree `|g|`.
    images: Vec<BitVec>,
    layout: FreeLayout,
    /// `d` in degree `t`, indexed by `t - t_min`: rows are the basis of this level.
    matrices: Vec<F2Matrix>,
}

/// A minimal free resolution `… → P_1 → P_0 → M`, computed for `s ≤ s_max`, `t ≤ t_max`.
#[derive(Clone, Debug)]
pub struct Resolution {
    id: u64,
    algebra: Arc<HopfAlgebra>,
    module: GradedModule,
    s_max: usize,
    t_min: i32,
    t_max: i32,
    levels: Vec<Level>,
}

impl Resolution {
    pub fn new(module: &GradedModule, s_max: usize, t_max: i32) -> Self {
        let algebra = module.algebra().clone();
        let t_min = if module.is_zero() { 0 } else { module.lo() };
        let mut res = Self {
            id: NEXT_ID.fetch_add(1, Ordering::Relaxed),
            algebra,
            module: module.clone(),
            s_max,
            t_min,
            t_max,
            levels: Vec::with_capacity(s_max + 1),
        };
        for s in 0..=s_max {
            let level = res.build_level(s);
            res.levels.push(level);
        }
        res
    }

    /// Resolution of the unit module.
    pub fn of_unit(algebra: &Arc<HopfAlgebra>, s_max: usize, t_max: i32) -> Self {
        Self::new(&GradedModule::unit(algebra.clone()), s_max, t_max)
    }

    fn target_dim(&self, s: usize, t: i32) -> usize {
        if s == 0 {
            self.module.dim_in(t)
        } else {
            self.levels[s - 1].layout.dim_in(t)
        }
    }

    /// `b · v` for `v` in degree `t` of the target of `d_s`.
    fn act_target(&self, s: usize, b: usize, t: i32, v: &BitVec) -> BitVec {
        if s == 0 {
            self.module.act(b, t, v)
        } else {
            self.levels[s - 1].layout.act(&self.algebra, b, t, v)
        }
    }

    fn build_level(&self, s: usize) -> Level {
        let alg = &*self.algebra;
        let mut gen_degrees: Vec<i32> = Vec::new();
        let mut images: Vec<BitVec> = Vec::new();
        let mut matrices = Vec::new();
        for t in self.t_min..=self.t_max {
            let layout = FreeLayout::new(alg, &gen_degrees, Some(t));
            let tdim = self.target_dim(s, t);
            let mut rows: Vec<BitVec> = (0..layout.dim_in(t))
                .map(|p| {
                    let (g, b) = layout.decode(alg, t, p);
                    self.act_target(s, b, gen_degrees[g], &images[g])
                })
                .collect();
            let kernel: Vec<BitVec> = if s == 0 {
                (0..tdim).map(|i| BitVec::unit(tdim, i)).collect()
            } else {
                let prev = &self.levels[s - 1].matrices[(t - self.t_min) as usize];
                prev.left_kernel()
            };
            let mut image = Subspace::new(tdim);
            for r in &rows {
                image.add(r.clone());
            }
            for v in kernel {
                if image.add(v.clone()) {
                    gen_degrees.push(t);
                    images.push(v.clone());
                    rows.push(v);
                }
            }
            matrices.push(F2Matrix::from_rows(tdim, rows));
        }
        let layout = FreeLayout::new(alg, &gen_degrees, Some(self.t_max));
        Level { gen_degrees, images, layout, matrices }
    }

    pub fn algebra(&self) -> &Arc<HopfAlgebra> {
        &self.algebra
    }

    pub fn module(&self) -> &GradedModule {
        &self.module
    }

    pub fn s_max(&self) -> usize {
        self.s_max
    }

    pub fn t_max(&self) -> i32 {
        self.t_max
    }

    pub fn t_min(&self) -> i32 {
        self.t_min
    }

    pub fn generator_degrees(&self, s: usize) -> &[i32] {
        &self.levels[s].gen_degrees
    }

    /// Indices of the level-`s` generators of degree `t`.
    pub fn generators_in_degree(&self, s: usize, t: i32) -> Range<usize> {
        let degs = &self.levels[s].gen_degrees;
        degs.partition_point(|&d| d < t)..degs.partition_point(|&d| d <= t)
    }

    pub fn ext_dim(&self, s: usize, t: i32) -> usize {
        if s > self.s_max || t > self.t_max {
            return 0;
        }
        self.generators_in_degree(s, t).len()
    }

    pub fn level_dim(&self, s: usize, t: i32) -> usize {
        self.levels[s].layout.dim_in(t)
    }

    /// Matrix of `d_s` in degree `t`.
    pub fn differential(&self, s: usize, t: i32) -> Option<&F2Matrix> {
        if t < self.t_min || t > self.t_max {
            return None;
        }
        self.levels.get(s).map(|l| &l.matrices[(t - self.t_min) as usize])
    }

    /// `ker d_{s-1} = im d_s` in every computed degree (with `d_{-1} = 0`).
    pub fn is_exact(&self) -> bool {
        for s in 0..=self.s_max {
            for t in self.t_min..=self.t_max {
                let d = self.differential(s, t).unwrap();
                let kernel_dim = if s == 0 {
                    self.module.dim_in(t)
                } else {
                    let prev = self.differential(s - 1, t).unwrap();
                    prev.row_count() - prev.rank()
                };
                if d.rank() != kernel_dim {
                    return false;
                }
            }
        }
        true
    }

    /// Every `d(g)` for `s ≥ 1` lies in `A⁺ P_{s-1}`.
    pub fn is_minimal(&self) -> bool {
        let alg = &*self.algebra;
        for s in 1..=self.s_max {
            let prev = &self.levels[s - 1];
            for (g, img) in self.levels[s].images.iter().enumerate() {
                let t = self.levels[s].gen_degrees[g];
                for p in img.iter_ones() {
                    let (_, b) = prev.layout.decode(alg, t, p);
                    if b == 0 {
                        return false;
                    }
                }
            }
        }
        true
    }

    pub fn chart(&self) -> ExtChart {
        let dims = (0..=self.s_max).map(|s| (self.t_min..=self.t_max).map(|t| self.ext_dim(s, t)).collect()).collect();
        ExtChart {
            profile: self.algebra.profile().clone(),
            s_max: self.s_max,
            t_min: self.t_min,
            t_max: self.t_max,
            dims,
        }
    }

    fn check_window(&self, s: usize, t: i32) -> Result<()> {
        if s > self.s_max || t > self.t_max {
            return Err(Error::WindowTooSmall { needed_s: s, needed_t: t, s_max: self.s_max, t_max: self.t_max });
        }
        Ok(())
    }

    pub fn class(&self, s: usize, t: i32, coeffs: BitVec) -> Result<ExtClass> {
        self.check_window(s, t)?;
        let n = self.ext_dim(s, t);
        if coeffs.len() != n {
            return Err(crate::f2::F2Error::DimensionMismatch { expected: n, found: coeffs.len() }.into());
        }
        Ok(ExtClass { resolution: self.id, s, t, coeffs })
    }

    /// Basis class dual to the `k`-th generator of bidegree `(s, t)`.
    pub fn basis_class(&self, s: usize, t: i32, k: usize) -> Result<ExtClass> {
        let n = self.ext_dim(s, t);
        self.class(s, t, BitVec::unit(n, k))
    }

    pub fn unit_class(&self) -> Result<ExtClass> {
        self.require_unit()?;
        self.basis_class(0, 0, 0)
    }

    fn require_unit(&self) -> Result<()> {
        if self.module.graded_dims() == [(0, 1)] {
            Ok(())
        } else {
            Err(Error::ProductNeedsUnit)
        }
    }

    /// `h_{ij}`: the functional on level-1 generators reading the coefficient of `P_i^j`.
    pub fn named_class(&self, name: &str) -> Result<ExtClass> {
        self.require_unit()?;
        let (i, j) = parse_h_name(name).ok_or_else(|| Error::UnknownGenerator(name.to_string()))?;
        let alg = &*self.algebra;
        let mut exps = vec![0u32; i];
        exps[i - 1] = 1 << j;
        let idx = alg
            .index_of(&exps)
            .ok_or_else(|| Error::NotInAlgebra { name: name.to_string(), profile: alg.profile().to_string() })?;
        let deg = alg.degree(idx);
        for a in alg.basis_in_degree_range(1, deg - 1) {
            for b in alg.basis_in_degree(deg - alg.degree(a)) {
                if alg.product_basis(a, b).contains(&idx) {
                    return Err(Error::NotIndecomposable(name.to_string()));
                }
            }
        }
        self.check_window(1, deg)?;
        let p0 = &self.levels[0].layout;
        let pos = p0.position(alg, 0, idx).expect("within window");
        let gens = self.generators_in_degree(1, deg);
        let coeffs = BitVec::from_bools(&gens.map(|g| self.levels[1].images[g].get(pos)).collect::<Vec<_>>());
        self.class(1, deg, coeffs)
    }

    /// Names `h_{ij}` that define classes of Ext^1 within the window.
    pub fn named_classes(&self) -> Vec<(String, ExtClass)> {
        let mut out = Vec::new();
        let profile = self.algebra.profile().clone();
        for i in 1..=profile.len() {
            for j in 0..profile.bound(i) as usize {
                let name = alloc::format!("h{i}{j}");
                if let Ok(c) = self.named_class(&name) {
                    out.push((name, c));
                }
            }
        }
        out
    }

    /// `f_k` on every generator of level `s2 + k` of degree `≤ t_top`, for `k ≤ k_max`:
    /// a chain map lifting the cocycle `y`.
    fn lift(&self, y: &ExtClass, k_max: usize, t_top: i32) -> Vec<Vec<BitVec>> {
        let alg = &*self.algebra;
        let (s2, t2) = (y.s, y.t);
        let mut maps: Vec<Vec<BitVec>> = Vec::with_capacity(k_max + 1);
        let y_gens = self.generators_in_degree(s2, t2);
        let iota = self.levels[0].layout.position(alg, 0, 0).expect("unit generator");
        let f0 = self.levels[s2]
            .gen_degrees
            .iter()
            .enumerate()
            .take_while(|(_, &d)| d <= t_top)
            .map(|(g, &d)| {
                let dim = self.levels[0].layout.dim_in(d - t2);
                let mut v = BitVec::zeros(dim);
                if y_gens.contains(&g) && y.coeffs.get(g - y_gens.start) {
                    v.set(iota, true);
                }
                v
            })
            .collect();
        maps.push(f0);
        for k in 1..=k_max {
            let src = s2 + k;
            let prev = &maps[k - 1];
            let level = &self.levels[src];
            let mut fk = Vec::new();
            for (g, &d) in level.gen_degrees.iter().enumerate() {
                if d > t_top {
                    break;
                }
                let u = d - t2;
                let dim = self.levels[k].layout.dim_in(u);
                if dim == 0 {
                    fk.push(BitVec::zeros(0));
                    continue;
                }
                let w = self.apply_free_map(src - 1, prev, k - 1, t2, d, &level.images[g]);
                let dk = self.differential(k, u).expect("in window");
                let x = dk.transpose().solve(&w).expect("shapes agree").expect("lift exists by exactness");
                fk.push(x);
            }
            maps.push(fk);
        }
        maps
    }

    /// Applies the A-linear map `P_src → P_tgt` of degree `-shift` given on generators.
    fn apply_free_map(&self, src: usize, on_gens: &[BitVec], tgt: usize, shift: i32, t: i32, v: &BitVec) -> BitVec {
        let alg = &*self.algebra;
        let target = &self.levels[tgt].layout;
        let mut out = BitVec::zeros(target.dim_in(t - shift));
        for p in v.iter_ones() {
            let (h, b) = self.levels[src].layout.decode(alg, t, p);
            let val = &on_gens[h];
            if val.is_zero() {
                continue;
            }
            let hd = self.levels[src].gen_degrees[h];
            out.xor_assign(&target.act(alg, b, hd - shift, val));
        }
        out
    }

    /// Yoneda product `x · y` via a chain-map lift of `y`.
    pub fn yoneda_product(&self, x: &ExtClass, y: &ExtClass) -> Result<ExtClass> {
        if x.resolution != self.id || y.resolution != self.id {
            return Err(Error::ForeignClass);
        }
        self.require_unit()?;
        let (s, t) = (x.s + y.s, x.t + y.t);
        self.check_window(s, t)?;
        let maps = self.lift(y, x.s, t);
        let fx = &maps[x.s];
        let x_gens = self.generators_in_degree(x.s, x.t);
        let alg = &*self.algebra;
        let layout = &self.levels[x.s].layout;
        let positions: Vec<usize> = x_gens
            .clone()
            .filter(|&h| x.coeffs.get(h - x_gens.start))
            .map(|h| layout.position(alg, h, 0).expect("in window"))
            .collect();
        let out_gens = self.generators_in_degree(s, t);
        let coeffs: Vec<bool> = out_gens.map(|g| positions.iter().fold(false, |acc, &p| acc ^ fx[g].get(p))).collect();
        self.class(s, t, BitVec::from_bools(&coeffs))
    }

    /// Smallest `q ≤ cap` with `x^q = 0`, or `None` when every power up to `cap` survives.
    pub fn nilpotency_order(&self, x: &ExtClass, cap: usize) -> Result<Option<usize>> {
        if x.is_zero() {
            return Ok(Some(1));
        }
        let mut power = x.clone();
        for q in 2..=cap {
            power = self.yoneda_product(x, &power)?;
            if power.is_zero() {
                return Ok(Some(q));
            }
        }
        Ok(None)
    }
}

fn parse_h_name(name: &str) -> Option<(usize, usize)> {
    let rest = name.strip_prefix('h')?;
    let mut chars = rest.chars();
    let i = chars.next()?.to_digit(10)? as usize;
    let j = chars.next()?.to_digit(10)? as usize;
    if chars.next().is_some() || i == 0 {
        return None;
    }
    Some((i, j))
}

/// A class of `Ext^{s,t}`, as a functional on the level-`s` generators of degree `t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtClass {
    resolution: u64,
    pub s: usize,
    pub t: i32,
    pub coeffs: BitVec,
}

impl ExtClass {
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_zero()
    }

    pub fn bidegree(&self) -> (usize, i32) {
        (self.s, self.t)
    }

    pub fn add(&self, other: &ExtClass) -> Result<ExtClass> {
        if self.resolution != other.resolution {
            return Err(Error::ForeignClass);
        }
        if self.bidegree() != other.bidegree() {
            return Err(Error::NotHomogeneous);
        }
        let mut c = self.coeffs.clone();
        c.xor_assign(&other.coeffs);
        Ok(ExtClass { coeffs: c, ..self.clone() })
    }
}

/// Bigraded dimensions of Ext on a window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtChart {
    pub profile: Profile,
    pub s_max: usize,
    pub t_min: i32,
    pub t_max: i32,
    dims: Vec<Vec<usize>>,
}

impl ExtChart {
    pub fn dim(&self, s: usize, t: i32) -> usize {
        if s > self.s_max || t < self.t_min || t > self.t_max {
            return 0;
        }
        self.dims[s][(t - self.t_min) as usize]
    }

    /// Nonzero entries `(s, t, dim)` in `(s, t)` order.
    pub fn entries(&self) -> Vec<(usize, i32, usize)> {
        let mut out = Vec::new();
        for s in 0..=self.s_max {
            for t in self.t_min..=self.t_max {
                let d = self.dim(s, t);
                if d > 0 {
                    out.push((s, t, d));
                }
            }
        }
        out
    }
}

/// `Ext^{s,t}` of the unit module over the profile algebra.
pub fn ext_chart(algebra: &Arc<HopfAlgebra>, s_max: usize, t_max: i32) -> ExtChart {
    Resolution::of_unit(algebra, s_max, t_max).chart()
}
