//! Finite sub-Hopf algebras of the mod 2 Steenrod algebra given by profile functions.
//!
//! The dual algebra is the truncated polynomial algebra `F2[ξ_1, …, ξ_k] / (ξ_i^{2^{h_i}})`
//! with the Milnor diagonal `Δ(ξ_n) = Σ_i ξ_{n-i}^{2^i} ⊗ ξ_i`. The algebra itself has the
//! dual Milnor basis `Sq(r_1, …, r_k)`; its product is read off the dual diagonal and its
//! diagonal off the dual product.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::Range;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::f2::{BitVec, Subspace};

/// Internal degree of `ξ_i`.
#[inline]
pub fn xi_degree(i: usize) -> i32 {
    (1i32 << i) - 1
}

/// Exponent bounds `(h_1, …, h_k)`: the relation on `ξ_i` is `ξ_i^{2^{h_i}}`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Profile {
    bounds: Vec<u32>,
}

impl Profile {
    pub fn new(bounds: Vec<u32>) -> Result<Self> {
        if bounds.is_empty() {
            return Err(Error::InvalidProfile("empty profile".to_string()));
        }
        if let Some(b) = bounds.iter().find(|&&b| b == 0 || b > 12) {
            return Err(Error::InvalidProfile(format!("bound {b} outside 1..=12")));
        }
        if bounds.len() > 12 {
            return Err(Error::InvalidProfile("more than 12 generators".to_string()));
        }
        Ok(Self { bounds })
    }

    pub fn bounds(&self) -> &[u32] {
        &self.bounds
    }

    /// Number of polynomial generators `k`.
    pub fn len(&self) -> usize {
        self.bounds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bounds.is_empty()
    }

    /// `h_i` for the 1-based generator index `i`; zero past the end.
    pub fn bound(&self, i: usize) -> u32 {
        if i == 0 {
            return 0;
        }
        self.bounds.get(i - 1).copied().unwrap_or(0)
    }

    /// Exponents of `ξ_i` range over `0 .. exponent_limit(i)`.
    pub fn exponent_limit(&self, i: usize) -> u32 {
        1 << self.bound(i)
    }

    pub fn dimension(&self) -> usize {
        self.bounds.iter().map(|&h| 1usize << h).product()
    }

    pub fn top_degree(&self) -> i32 {
        self.bounds.iter().enumerate().map(|(i, &h)| ((1i32 << h) - 1) * xi_degree(i + 1)).sum()
    }

    /// Whether the algebra of `sub` is a subalgebra of this one.
    pub fn contains(&self, sub: &Profile) -> bool {
        sub.len() <= self.len() && (1..=sub.len()).all(|i| sub.bound(i) <= self.bound(i))
    }

    /// Whether a (padded) exponent tuple lies under the bounds.
    pub fn admits(&self, exponents: &[u32]) -> bool {
        exponents.iter().enumerate().all(|(i, &e)| e < self.exponent_limit(i + 1))
    }

    /// Checks that every relation `ξ_n^{2^{h_n}}` (with `h_n = 0` past the end) has its
    /// diagonal inside `I ⊗ A* + A* ⊗ I`, by expanding the diagonal in the free
    /// polynomial ring.
    pub fn check_hopf_ideal(&self) -> Result<()> {
        let width = 2 * self.len() + 1;
        let in_ideal = |m: &[u32]| m.iter().enumerate().skip(1).any(|(i, &e)| e >= self.exponent_limit(i));
        for n in 1..width {
            let mut diag: BTreeSet<(Vec<u32>, Vec<u32>)> = BTreeSet::new();
            for i in 0..=n {
                let mut left = vec![0u32; width];
                let mut right = vec![0u32; width];
                if n - i > 0 {
                    left[n - i] = 1 << i;
                }
                if i > 0 {
                    right[i] = 1;
                }
                toggle(&mut diag, (left, right));
            }
            let power = self.exponent_limit(n);
            let mut acc: BTreeSet<(Vec<u32>, Vec<u32>)> = BTreeSet::new();
            acc.insert((vec![0; width], vec![0; width]));
            for _ in 0..power {
                let mut next = BTreeSet::new();
                for (al, ar) in &acc {
                    for (dl, dr) in &diag {
                        let l = al.iter().zip(dl).map(|(a, b)| a + b).collect();
                        let r = ar.iter().zip(dr).map(|(a, b)| a + b).collect();
                        toggle(&mut next, (l, r));
                    }
                }
                acc = next;
            }
            if acc.iter().any(|(l, r)| !in_ideal(l) && !in_ideal(r)) {
                return Err(Error::NotHopfIdeal { relation: format!("xi_{n}^{power}") });
            }
        }
        Ok(())
    }
}

fn toggle<T: Ord>(set: &mut BTreeSet<T>, item: T) {
    if let Some(existing) = set.take(&item) {
        drop(existing);
    } else {
        set.insert(item);
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, b) in self.bounds.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl FromStr for Profile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bounds = s
            .split(',')
            .map(|t| t.trim().parse::<u32>().map_err(|_| Error::InvalidProfile(format!("cannot parse `{s}`"))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(bounds)
    }
}

/// An element of a profile algebra as a coefficient vector over the Milnor basis.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Element(pub BitVec);

impl Element {
    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn add(&self, other: &Element) -> Element {
        let mut v = self.0.clone();
        v.xor_assign(&other.0);
        Element(v)
    }
}

/// A basis element reachable by name: `Q0`, `Q1`, `P21`, `Sq4`, `Sq(0,2)`, ...
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct NamedElement {
    pub name: String,
    pub index: usize,
    pub element: Element,
}

/// Outcome of comparing a profile subalgebra `B` with an ambient profile algebra `A`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct QuotientReport {
    pub sub: Profile,
    pub amb: Profile,
    /// `A·B⁺ = B⁺·A` in every degree.
    pub conormal: bool,
    /// Basis of `(A//B)*` inside `A*`, each entry a sum of dual Milnor monomials.
    pub quotient_dual_basis: Vec<Vec<Vec<u32>>>,
    pub exterior_rank_one: bool,
    pub tau: Option<Vec<u32>>,
    pub tau_degree: Option<i32>,
    pub sub_top_degree: i32,
}

impl QuotientReport {
    /// Renders `τ` as a dual monomial such as `xi_1^2`.
    pub fn tau_name(&self) -> Option<String> {
        self.tau.as_deref().map(monomial_name)
    }
}

pub fn monomial_name(exponents: &[u32]) -> String {
    let parts: Vec<String> = exponents
        .iter()
        .enumerate()
        .filter(|(_, &e)| e > 0)
        .map(|(i, &e)| if e == 1 { format!("xi_{}", i + 1) } else { format!("xi_{}^{}", i + 1, e) })
        .collect();
    if parts.is_empty() {
        "1".to_string()
    } else {
        parts.join(" ")
    }
}

/// A finite-dimensional graded Hopf algebra built from a profile.
#[derive(Debug)]
pub struct HopfAlgebra {
    profile: Profile,
    basis: Vec<Vec<u32>>,
    degrees: Vec<i32>,
    degree_start: Vec<usize>,
    index: BTreeMap<Vec<u32>, usize>,
    products: Vec<Vec<usize>>,
    coproducts: Vec<Vec<(usize, usize)>>,
    antipode: Vec<Vec<usize>>,
    generators: Vec<usize>,
}

impl PartialEq for HopfAlgebra {
    fn eq(&self, other: &Self) -> bool {
        self.profile == other.profile
    }
}

impl Eq for HopfAlgebra {}

impl HopfAlgebra {
    pub fn build(profile: Profile) -> Result<Self> {
        profile.check_hopf_ideal()?;
        let k = profile.len();

        let mut basis: Vec<Vec<u32>> = Vec::with_capacity(profile.dimension());
        let mut cur = vec![0u32; k];
        loop {
            basis.push(cur.clone());
            let mut i = 0;
            loop {
                if i == k {
                    break;
                }
                cur[i] += 1;
                if cur[i] < profile.exponent_limit(i + 1) {
                    break;
                }
                cur[i] = 0;
                i += 1;
            }
            if i == k {
                break;
            }
        }
        let deg = |r: &[u32]| -> i32 { r.iter().enumerate().map(|(i, &e)| e as i32 * xi_degree(i + 1)).sum() };
        basis.sort_by(|a, b| deg(a).cmp(&deg(b)).then_with(|| a.cmp(b)));
        let degrees: Vec<i32> = basis.iter().map(|r| deg(r)).collect();
        let dim = basis.len();
        let top = profile.top_degree();
        let mut degree_start = vec![0usize; top as usize + 2];
        for d in 0..=top + 1 {
            degree_start[d as usize] = degrees.partition_point(|&x| x < d);
        }
        let index: BTreeMap<Vec<u32>, usize> = basis.iter().enumerate().map(|(i, r)| (r.clone(), i)).collect();

        // Product of dual monomials inside the truncated polynomial algebra.
        let mono_mul = |i: usize, j: usize| -> Option<usize> {
            let sum: Vec<u32> = basis[i].iter().zip(&basis[j]).map(|(a, b)| a + b).collect();
            if profile.admits(&sum) {
                index.get(&sum).copied()
            } else {
                None
            }
        };
        let tensor_mul = |p: &BitVec, q: &BitVec| -> BitVec {
            let mut out = BitVec::zeros(dim * dim);
            for a in p.iter_ones() {
                let (a1, a2) = (a / dim, a % dim);
                for b in q.iter_ones() {
                    let (b1, b2) = (b / dim, b % dim);
                    if let (Some(l), Some(r)) = (mono_mul(a1, b1), mono_mul(a2, b2)) {
                        out.toggle(l * dim + r);
                    }
                }
            }
            out
        };

        let mut xi_diag: Vec<BitVec> = Vec::with_capacity(k + 1);
        xi_diag.push(BitVec::zeros(0));
        for n in 1..=k {
            let mut d = BitVec::zeros(dim * dim);
            for i in 0..=n {
                let mut left = vec![0u32; k];
                let mut right = vec![0u32; k];
                if n - i > 0 {
                    left[n - i - 1] = 1 << i;
                }
                if i > 0 {
                    right[i - 1] = 1;
                }
                if profile.admits(&left) && profile.admits(&right) {
                    d.toggle(index[&left] * dim + index[&right]);
                }
            }
            xi_diag.push(d);
        }

        let mut monomial_diag: Vec<BitVec> = Vec::with_capacity(dim);
        for r in &basis {
            let Some(n) = r.iter().position(|&e| e > 0) else {
                monomial_diag.push(BitVec::unit(dim * dim, 0));
                continue;
            };
            let mut lower = r.clone();
            lower[n] -= 1;
            let prev = &monomial_diag[index[&lower]];
            monomial_diag.push(tensor_mul(prev, &xi_diag[n + 1]));
        }

        let mut product_bits: Vec<BitVec> = (0..dim * dim).map(|_| BitVec::zeros(dim)).collect();
        for (r, diag) in monomial_diag.iter().enumerate() {
            for pair in diag.iter_ones() {
                product_bits[pair].toggle(r);
            }
        }
        let products: Vec<Vec<usize>> = product_bits.iter().map(|v| v.iter_ones().collect()).collect();

        let coproducts: Vec<Vec<(usize, usize)>> = basis
            .iter()
            .map(|t| {
                let mut terms = Vec::new();
                let mut left = vec![0u32; k];
                loop {
                    let right: Vec<u32> = t.iter().zip(&left).map(|(a, b)| a - b).collect();
                    terms.push((index[&left], index[&right]));
                    let mut i = 0;
                    while i < k {
                        left[i] += 1;
                        if left[i] <= t[i] {
                            break;
                        }
                        left[i] = 0;
                        i += 1;
                    }
                    if i == k {
                        break;
                    }
                }
                terms.sort_unstable();
                terms
            })
            .collect();

        let mut alg = HopfAlgebra {
            profile,
            basis,
            degrees,
            degree_start,
            index,
            products,
            coproducts,
            antipode: Vec::new(),
            generators: Vec::new(),
        };

        let mut antipode: Vec<Vec<usize>> = Vec::with_capacity(dim);
        for a in 0..dim {
            if a == 0 {
                antipode.push(vec![0]);
                continue;
            }
            let mut acc = BitVec::zeros(dim);
            for &(l, r) in &alg.coproducts[a] {
                if l == a {
                    continue;
                }
                for &x in &antipode[l] {
                    for &y in alg.product_basis(x, r) {
                        acc.toggle(y);
                    }
                }
            }
            antipode.push(acc.iter_ones().collect());
        }
        alg.antipode = antipode;
        alg.generators = alg.compute_generators();
        alg.verify_axioms()?;
        Ok(alg)
    }

    fn compute_generators(&self) -> Vec<usize> {
        let mut gens = Vec::new();
        for d in 1..=self.top_degree() {
            let range = self.basis_in_degree(d);
            let mut decomposables = Subspace::new(range.len());
            for a in self.basis_in_degree_range(1, d - 1) {
                for b in self.basis_in_degree(d - self.degrees[a]) {
                    let mut v = BitVec::zeros(range.len());
                    for &x in self.product_basis(a, b) {
                        v.toggle(x - range.start);
                    }
                    decomposables.add(v);
                }
            }
            gens.extend(decomposables.complement_indices().into_iter().map(|i| i + range.start));
        }
        gens
    }

    fn verify_axioms(&self) -> Result<()> {
        let dim = self.dimension();
        let top = self.top_degree();
        let fail = |what: &str| Err(Error::InvalidProfile(format!("{what} fails for {}", self.profile)));
        for a in 0..dim {
            if self.product_basis(0, a) != [a] || self.product_basis(a, 0) != [a] {
                return fail("unit law");
            }
        }
        for a in 1..dim {
            for b in 1..dim {
                if self.degrees[a] + self.degrees[b] > top {
                    break;
                }
                let ab = self.product_basis(a, b);
                for c in 1..dim {
                    if self.degrees[a] + self.degrees[b] + self.degrees[c] > top {
                        break;
                    }
                    let mut lhs = BitVec::zeros(dim);
                    for &x in ab {
                        for &y in self.product_basis(x, c) {
                            lhs.toggle(y);
                        }
                    }
                    let mut rhs = BitVec::zeros(dim);
                    for &x in self.product_basis(b, c) {
                        for &y in self.product_basis(a, x) {
                            rhs.toggle(y);
                        }
                    }
                    if lhs != rhs {
                        return fail("associativity");
                    }
                }
            }
        }
        for a in 0..dim {
            let terms = &self.coproducts[a];
            let swapped: BTreeSet<(usize, usize)> = terms.iter().map(|&(l, r)| (r, l)).collect();
            if swapped != terms.iter().copied().collect() {
                return fail("cocommutativity");
            }
            let mut left_first: BTreeSet<(usize, usize, usize)> = BTreeSet::new();
            let mut right_first: BTreeSet<(usize, usize, usize)> = BTreeSet::new();
            for &(l, r) in terms {
                for &(ll, lr) in &self.coproducts[l] {
                    toggle(&mut left_first, (ll, lr, r));
                }
                for &(rl, rr) in &self.coproducts[r] {
                    toggle(&mut right_first, (l, rl, rr));
                }
            }
            if left_first != right_first {
                return fail("coassociativity");
            }
            let mut acc = BitVec::zeros(dim);
            for &(l, r) in terms {
                for &x in &self.antipode[l] {
                    for &y in self.product_basis(x, r) {
                        acc.toggle(y);
                    }
                }
            }
            let expected = if a == 0 { BitVec::unit(dim, 0) } else { BitVec::zeros(dim) };
            if acc != expected {
                return fail("antipode axiom");
            }
        }
        Ok(())
    }

    pub fn profile(&self) -> &Profile {
        &self.profile
    }

    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn top_degree(&self) -> i32 {
        self.profile.top_degree()
    }

    /// Index of the unique basis element in the top degree.
    pub fn top_index(&self) -> usize {
        self.dimension() - 1
    }

    pub fn degree(&self, i: usize) -> i32 {
        self.degrees[i]
    }

    pub fn milnor(&self, i: usize) -> &[u32] {
        &self.basis[i]
    }

    pub fn index_of(&self, exponents: &[u32]) -> Option<usize> {
        let k = self.profile.len();
        if exponents.iter().skip(k).any(|&e| e != 0) {
            return None;
        }
        let mut padded: Vec<u32> = exponents.iter().take(k).copied().collect();
        padded.resize(k, 0);
        self.index.get(&padded).copied()
    }

    pub fn basis_in_degree(&self, d: i32) -> Range<usize> {
        if d < 0 || d > self.top_degree() {
            return 0..0;
        }
        self.degree_start[d as usize]..self.degree_start[d as usize + 1]
    }

    pub fn basis_in_degree_range(&self, lo: i32, hi: i32) -> Range<usize> {
        let lo = lo.max(0);
        let hi = hi.min(self.top_degree());
        if lo > hi {
            return 0..0;
        }
        self.degree_start[lo as usize]..self.degree_start[hi as usize + 1]
    }

    /// Product of two basis elements, as a sorted list of basis indices.
    #[inline]
    pub fn product_basis(&self, a: usize, b: usize) -> &[usize] {
        &self.products[a * self.dimension() + b]
    }

    /// Diagonal of a basis element as pairs of basis indices.
    pub fn coproduct_basis(&self, a: usize) -> &[(usize, usize)] {
        &self.coproducts[a]
    }

    pub fn antipode_basis(&self, a: usize) -> &[usize] {
        &self.antipode[a]
    }

    /// A minimal set of algebra generators (indecomposable basis elements).
    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    pub fn zero(&self) -> Element {
        Element(BitVec::zeros(self.dimension()))
    }

    pub fn unit(&self) -> Element {
        self.basis_element(0)
    }

    pub fn basis_element(&self, i: usize) -> Element {
        Element(BitVec::unit(self.dimension(), i))
    }

    fn check(&self, a: &Element) -> Result<()> {
        if a.0.len() == self.dimension() {
            Ok(())
        } else {
            Err(Error::MixedAlgebras)
        }
    }

    pub fn multiply(&self, a: &Element, b: &Element) -> Result<Element> {
        self.check(a)?;
        self.check(b)?;
        let mut out = BitVec::zeros(self.dimension());
        for i in a.0.iter_ones() {
            for j in b.0.iter_ones() {
                for &x in self.product_basis(i, j) {
                    out.toggle(x);
                }
            }
        }
        Ok(Element(out))
    }

    /// Diagonal as a set of basis pairs (terms with even multiplicity cancel).
    pub fn comultiply(&self, a: &Element) -> Result<BTreeSet<(usize, usize)>> {
        self.check(a)?;
        let mut out = BTreeSet::new();
        for i in a.0.iter_ones() {
            for &pair in &self.coproducts[i] {
                toggle(&mut out, pair);
            }
        }
        Ok(out)
    }

    pub fn antipode(&self, a: &Element) -> Result<Element> {
        self.check(a)?;
        let mut out = BitVec::zeros(self.dimension());
        for i in a.0.iter_ones() {
            for &x in &self.antipode[i] {
                out.toggle(x);
            }
        }
        Ok(Element(out))
    }

    /// Degree of a nonzero homogeneous element.
    pub fn element_degree(&self, a: &Element) -> Result<Option<i32>> {
        self.check(a)?;
        let mut degs = a.0.iter_ones().map(|i| self.degrees[i]);
        let Some(d) = degs.next() else {
            return Ok(None);
        };
        if degs.all(|e| e == d) {
            Ok(Some(d))
        } else {
            Err(Error::NotHomogeneous)
        }
    }

    pub fn format_basis(&self, i: usize) -> String {
        let r = &self.basis[i];
        let last = r.iter().rposition(|&e| e != 0);
        match last {
            None => "1".to_string(),
            Some(l) => {
                let parts: Vec<String> = r[..=l].iter().map(|e| e.to_string()).collect();
                format!("Sq({})", parts.join(","))
            }
        }
    }

    pub fn format(&self, a: &Element) -> String {
        let parts: Vec<String> = a.0.iter_ones().map(|i| self.format_basis(i)).collect();
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join(" + ")
        }
    }

    /// Resolves a name to a basis element. Accepted forms: `1`, `Sq(r1,...,rk)`, `SqN`,
    /// `Qi` (dual to `ξ_{i+1}`), `Pts` (dual to `ξ_t^{2^s}`, single digits).
    pub fn named_element(&self, name: &str) -> Result<NamedElement> {
        let exponents = parse_milnor_name(name)?;
        let index = self
            .index_of(&exponents)
            .ok_or_else(|| Error::NotInAlgebra { name: name.to_string(), profile: self.profile.to_string() })?;
        let element = self.basis_element(index);
        if let Some(word) = self.word_definition(name)? {
            debug_assert_eq!(word, element, "word definition of {name}");
            if word != element {
                return Err(Error::UnknownElement(format!("{name} disagrees with its word definition")));
            }
        }
        Ok(NamedElement { name: name.to_string(), index, element })
    }

    /// The element named by a word in Steenrod squares, when all its letters exist:
    /// `Q_{i+1} = Q_i Sq^{2^{i+1}} + Sq^{2^{i+1}} Q_i` and `P21 = Sq2 Sq4 + Sq4 Sq2`.
    pub fn word_definition(&self, name: &str) -> Result<Option<Element>> {
        let sq = |n: u32| self.index_of(&[n]).map(|i| self.basis_element(i));
        let commutator =
            |a: &Element, b: &Element| -> Result<Element> { Ok(self.multiply(a, b)?.add(&self.multiply(b, a)?)) };
        let name = name.trim();
        if name == "P21" {
            return match (sq(2), sq(4)) {
                (Some(a), Some(b)) => Ok(Some(commutator(&a, &b)?)),
                _ => Ok(None),
            };
        }
        if let Some(i) = name.strip_prefix('Q').and_then(|s| s.parse::<u32>().ok()) {
            let Some(mut q) = sq(1) else { return Ok(None) };
            for j in 1..=i {
                let Some(s) = sq(1 << j) else { return Ok(None) };
                q = commutator(&q, &s)?;
            }
            return Ok(Some(q));
        }
        Ok(None)
    }

    /// Basis elements `P_t^s` with `s < t` (these include every `Q_i = P_{i+1}^0`),
    /// each checked to square to zero.
    pub fn square_zero_generators(&self) -> Vec<NamedElement> {
        let mut out = Vec::new();
        for t in 1..=self.profile.len() {
            for s in 0..t.min(self.profile.bound(t) as usize) {
                let mut r = vec![0u32; t];
                r[t - 1] = 1 << s;
                let Some(index) = self.index_of(&r) else { continue };
                let element = self.basis_element(index);
                let sq = self.multiply(&element, &element).expect("same algebra");
                if !sq.is_zero() {
                    continue;
                }
                let name = if s == 0 { format!("Q{}", t - 1) } else { format!("P{t}{s}") };
                out.push(NamedElement { name, index, element });
            }
        }
        out
    }

    /// Compares this algebra (as `A`) with the profile subalgebra `sub` (as `B`).
    pub fn quotient_pair(&self, sub: &Profile) -> Result<QuotientReport> {
        if !self.profile.contains(sub) {
            return Err(Error::NotSubProfile { sub: sub.to_string(), amb: self.profile.to_string() });
        }
        sub.check_hopf_ideal()?;
        let dim = self.dimension();
        let sub_positive: Vec<usize> = (1..dim).filter(|&i| sub.admits(&self.basis[i])).collect();
        let mut conormal = true;
        let mut quotient_dual_basis = Vec::new();
        for d in 0..=self.top_degree() {
            let range = self.basis_in_degree(d);
            let mut left = Subspace::new(range.len());
            let mut right = Subspace::new(range.len());
            for &b in &sub_positive {
                for a in self.basis_in_degree(d - self.degrees[b]) {
                    let mut l = BitVec::zeros(range.len());
                    for &x in self.product_basis(a, b) {
                        l.toggle(x - range.start);
                    }
                    left.add(l);
                    let mut r = BitVec::zeros(range.len());
                    for &x in self.product_basis(b, a) {
                        r.toggle(x - range.start);
                    }
                    right.add(r);
                }
            }
            if left.dim() != right.dim() || !right.basis().iter().all(|v| left.contains(v)) {
                conormal = false;
            }
            let rows = crate::f2::F2Matrix::from_rows(range.len(), left.basis().to_vec());
            for v in rows.kernel_basis() {
                quotient_dual_basis
                    .push(v.iter_ones().map(|i| self.basis[range.start + i].clone()).collect::<Vec<_>>());
            }
        }
        let exterior_rank_one = quotient_dual_basis.len() == 2;
        let (tau, tau_degree) = if exterior_rank_one && quotient_dual_basis[1].len() == 1 {
            let t = quotient_dual_basis[1][0].clone();
            let d = t.iter().enumerate().map(|(i, &e)| e as i32 * xi_degree(i + 1)).sum();
            (Some(t), Some(d))
        } else {
            (None, None)
        };
        Ok(QuotientReport {
            sub: sub.clone(),
            amb: self.profile.clone(),
            conormal,
            quotient_dual_basis,
            exterior_rank_one: exterior_rank_one && tau.is_some(),
            tau,
            tau_degree,
            sub_top_degree: sub.top_degree(),
        })
    }
}

/// Parses an element name into Milnor exponents.
pub fn parse_milnor_name(name: &str) -> Result<Vec<u32>> {
    let n = name.trim();
    let bad = || Error::UnknownElement(name.to_string());
    if n == "1" {
        return Ok(Vec::new());
    }
    if let Some(inner) = n.strip_prefix("Sq(").and_then(|s| s.strip_suffix(')')) {
        return inner.split(',').map(|t| t.trim().parse::<u32>().map_err(|_| bad())).collect();
    }
    if let Some(rest) = n.strip_prefix("Sq") {
        let e = rest.parse::<u32>().map_err(|_| bad())?;
        return Ok(vec![e]);
    }
    if let Some(rest) = n.strip_prefix('Q') {
        let i = rest.parse::<usize>().map_err(|_| bad())?;
        if i > 11 {
            return Err(bad());
        }
        let mut r = vec![0u32; i + 1];
        r[i] = 1;
        return Ok(r);
    }
    if let Some(rest) = n.strip_prefix('P') {
        let digits: Vec<u32> = rest.chars().map(|c| c.to_digit(10)).collect::<Option<_>>().ok_or_else(bad)?;
        if let [t, s] = digits[..] {
            if t == 0 || s > 11 {
                return Err(bad());
            }
            let mut r = vec![0u32; t as usize];
            r[t as usize - 1] = 1 << s;
            return Ok(r);
        }
    }
    Err(bad())
}
