use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::linalg::CMat;
use crate::math::{self, TAU};
use crate::{Error, Result, C64};

/// Coefficients whose largest entry falls below this are dropped after every
/// operation.
pub const PRUNE_TOL: f64 = 1e-14;

/// Fourier index `k ∈ Z^n`; the mode is `e^{2πi k·x}` on the unit torus.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Momentum(pub Vec<i32>);

impl Momentum {
    pub fn zero(n: usize) -> Self {
        Momentum(vec![0; n])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&k| k == 0)
    }

    pub fn add(&self, other: &Momentum) -> Momentum {
        Momentum(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn neg(&self) -> Momentum {
        Momentum(self.0.iter().map(|k| -k).collect())
    }

    /// `e^{2πi k·x}`
    pub fn phase_at(&self, x: &[f64]) -> C64 {
        let arg: f64 = self.0.iter().zip(x).map(|(&k, &xi)| k as f64 * xi).sum();
        math::cis(TAU * arg)
    }
}

impl fmt::Display for Momentum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, k) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{k}")?;
        }
        write!(f, ")")
    }
}

/// Strictly increasing index tuple `I ⊆ {0, .., n-1}` stored as a bit set.
///
/// Ordered lexicographically as a tuple, not by the raw mask.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct IndexSet(u32);

impl IndexSet {
    pub const EMPTY: IndexSet = IndexSet(0);

    pub fn from_indices(indices: &[usize]) -> Result<Self> {
        let mut mask = 0u32;
        let mut prev: Option<usize> = None;
        for &i in indices {
            if i >= 32 {
                return Err(Error::InvalidInput(format!("index {i} out of range")));
            }
            if prev.is_some_and(|p| p >= i) {
                return Err(Error::InvalidInput(format!(
                    "index tuple {indices:?} is not strictly increasing"
                )));
            }
            prev = Some(i);
            mask |= 1 << i;
        }
        Ok(IndexSet(mask))
    }

    pub fn single(j: usize) -> Self {
        IndexSet(1 << j)
    }

    pub fn full(n: usize) -> Self {
        IndexSet(if n >= 32 { u32::MAX } else { (1u32 << n) - 1 })
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, j: usize) -> bool {
        self.0 & (1 << j) != 0
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn indices(self) -> impl Iterator<Item = usize> {
        let mask = self.0;
        (0..32).filter(move |i| mask & (1 << i) != 0)
    }

    pub fn max_index(self) -> Option<usize> {
        if self.0 == 0 {
            None
        } else {
            Some(31 - self.0.leading_zeros() as usize)
        }
    }

    /// Sign and union for `dx_I ∧ dx_J`; `None` when they share an index.
    pub fn wedge(self, other: IndexSet) -> Option<(IndexSet, f64)> {
        if self.0 & other.0 != 0 {
            return None;
        }
        // Each j in J must move past the elements of I larger than j.
        let mut inversions = 0u32;
        for j in other.indices() {
            let above = self.0 & !((1u32 << j) | ((1u32 << j) - 1));
            inversions += above.count_ones();
        }
        let sign = if inversions % 2 == 0 { 1.0 } else { -1.0 };
        Some((IndexSet(self.0 | other.0), sign))
    }
}

impl PartialOrd for IndexSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for IndexSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.indices().cmp(other.indices())
    }
}

type Key = (Momentum, IndexSet);

/// A degree-`p` differential form on `T^n` with finitely many Fourier modes
/// and `m×m` complex matrix coefficients:
///
/// `Σ c_{k,I} e^{2πi k·x} dx_I`.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigPolyForm {
    n: usize,
    degree: usize,
    fiber: usize,
    terms: BTreeMap<Key, CMat>,
    above_top: bool,
}

impl TrigPolyForm {
    pub fn zero(n: usize, degree: usize, fiber: usize) -> Self {
        Self { n, degree: degree.min(n), fiber, terms: BTreeMap::new(), above_top: degree > n }
    }

    /// The constant function `1` (times the fiber identity).
    pub fn one(n: usize, fiber: usize) -> Self {
        let mut f = Self::zero(n, 0, fiber);
        f.terms.insert((Momentum::zero(n), IndexSet::EMPTY), CMat::identity(fiber));
        f
    }

    /// `dx_j` (0-based `j`), scalar fiber.
    pub fn dx(n: usize, j: usize) -> Self {
        let mut f = Self::zero(n, 1, 1);
        f.terms.insert((Momentum::zero(n), IndexSet::single(j)), CMat::scalar(C64::new(1.0, 0.0)));
        f
    }

    /// `dx_0 ∧ … ∧ dx_{n-1}`, scalar fiber.
    pub fn volume(n: usize) -> Self {
        let mut f = Self::zero(n, n, 1);
        f.terms.insert((Momentum::zero(n), IndexSet::full(n)), CMat::scalar(C64::new(1.0, 0.0)));
        f
    }

    /// A single term `c e^{2πi k·x} dx_I`.
    pub fn monomial(k: Momentum, indices: IndexSet, coeff: CMat) -> Result<Self> {
        let n = k.dim();
        if indices.max_index().is_some_and(|m| m >= n) {
            return Err(Error::InvalidInput(format!("index set exceeds n = {n}")));
        }
        if !coeff.is_square() {
            return Err(Error::InvalidInput("fiber coefficient must be square".into()));
        }
        let mut f = Self::zero(n, indices.len(), coeff.rows());
        f.insert(k, indices, coeff)?;
        Ok(f)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.degree
    }

    #[inline]
    pub fn fiber(&self) -> usize {
        self.fiber
    }

    /// Set when this zero form is the result of a product above top degree.
    pub fn vanishes_above_top(&self) -> bool {
        self.above_top
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in canonical (lexicographic) key order.
    pub fn terms(&self) -> impl Iterator<Item = (&Momentum, IndexSet, &CMat)> {
        self.terms.iter().map(|((k, i), c)| (k, *i, c))
    }

    pub fn coefficient(&self, k: &Momentum, indices: IndexSet) -> Option<&CMat> {
        self.terms.get(&(k.clone(), indices))
    }

    /// Accumulates `coeff` into the `(k, I)` slot.
    pub fn insert(&mut self, k: Momentum, indices: IndexSet, coeff: CMat) -> Result<()> {
        if k.dim() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: k.dim() });
        }
        if indices.len() != self.degree || indices.max_index().is_some_and(|m| m >= self.n) {
            return Err(Error::DegreeMismatch { expected: self.degree, found: indices.len() });
        }
        if coeff.rows() != self.fiber || !coeff.is_square() {
            return Err(Error::FiberMismatch { expected: self.fiber, found: coeff.rows() });
        }
        self.accumulate(k, indices, &coeff, C64::new(1.0, 0.0));
        self.prune();
        Ok(())
    }

    fn accumulate(&mut self, k: Momentum, indices: IndexSet, coeff: &CMat, scale: C64) {
        match self.terms.get_mut(&(k.clone(), indices)) {
            Some(existing) => existing.axpy(scale, coeff),
            None => {
                self.terms.insert((k, indices), coeff.scale(scale));
            }
        }
    }

    fn prune(&mut self) {
        self.terms.retain(|_, c| !c.is_zero(PRUNE_TOL));
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: other.n });
        }
        if self.fiber != other.fiber {
            return Err(Error::FiberMismatch { expected: self.fiber, found: other.fiber });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch { expected: self.degree, found: other.degree });
        }
        let mut out = self.clone();
        for ((k, i), c) in &other.terms {
            out.accumulate(k.clone(), *i, c, C64::new(1.0, 0.0));
        }
        out.prune();
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale_real(-1.0))
    }

    pub fn scale(&self, z: C64) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = c.scale(z);
        }
        out.prune();
        out
    }

    pub fn scale_real(&self, x: f64) -> Self {
        self.scale(C64::new(x, 0.0))
    }

    /// Multiplies every coefficient on the left by a constant fiber matrix.
    pub fn left_mul(&self, m: &CMat) -> Result<Self> {
        if m.rows() != self.fiber || !m.is_square() {
            return Err(Error::FiberMismatch { expected: self.fiber, found: m.rows() });
        }
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = m.matmul(c);
        }
        out.prune();
        Ok(out)
    }

    /// Exterior product; coefficients multiply as matrices, `a` on the left.
    ///
    /// A product above top degree comes back as the zero form of degree `n`
    /// with [`vanishes_above_top`](Self::vanishes_above_top) set.
    pub fn wedge(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let degree = self.degree + other.degree;
        let mut out = Self::zero(self.n, degree, self.fiber);
        if degree > self.n || self.above_top || other.above_top {
            out.above_top = true;
            return Ok(out);
        }
        for ((ka, ia), ca) in &self.terms {
            for ((kb, ib), cb) in &other.terms {
                if let Some((idx, sign)) = ia.wedge(*ib) {
                    let prod = ca.matmul(cb);
                    out.accumulate(ka.add(kb), idx, &prod, C64::new(sign, 0.0));
                }
            }
        }
        out.prune();
        Ok(out)
    }

    /// Exterior derivative `Σ_j ∂_j(c e^{2πik·x}) dx_j ∧ dx_I`. The top-degree
    /// input returns the zero form.
    pub fn ext_d(&self) -> Self {
        let mut out = Self::zero(self.n, self.degree + 1, self.fiber);
        if self.degree >= self.n {
            out.above_top = true;
            return out;
        }
        for ((k, idx), c) in &self.terms {
            for j in 0..self.n {
                let kj = k.0[j];
                if kj == 0 || idx.contains(j) {
                    continue;
                }
                let (joined, sign) = IndexSet::single(j).wedge(*idx).expect("disjoint by construction");
                let factor = C64::new(0.0, TAU * kj as f64 * sign);
                out.accumulate(k.clone(), joined, c, factor);
            }
        }
        out.prune();
        out
    }

    /// `∫_{T^n}` of a top-degree form: the zero-momentum coefficient of
    /// `dx_0 ∧ … ∧ dx_{n-1}` (the torus has unit volume).
    pub fn integrate_top(&self) -> Result<CMat> {
        if self.degree != self.n || self.above_top {
            return Err(Error::DegreeMismatch { expected: self.n, found: self.degree });
        }
        Ok(self
            .terms
            .get(&(Momentum::zero(self.n), IndexSet::full(self.n)))
            .cloned()
            .unwrap_or_else(|| CMat::zeros(self.fiber, self.fiber)))
    }

    /// [`integrate_top`](Self::integrate_top) for scalar-fiber forms.
    pub fn integrate_top_scalar(&self) -> Result<C64> {
        if self.fiber != 1 {
            return Err(Error::FiberMismatch { expected: 1, found: self.fiber });
        }
        Ok(self.integrate_top()?[(0, 0)])
    }

    /// Fiber trace; the result has scalar fiber.
    pub fn trace_fiber(&self) -> Self {
        let mut out = Self::zero(self.n, self.degree, 1);
        out.above_top = self.above_top;
        for ((k, i), c) in &self.terms {
            out.accumulate(k.clone(), *i, &CMat::scalar(c.trace()), C64::new(1.0, 0.0));
        }
        out.prune();
        out
    }

    /// The `(i, j)` fiber entry as a scalar-fiber form.
    pub fn fiber_entry(&self, i: usize, j: usize) -> Self {
        let mut out = Self::zero(self.n, self.degree, 1);
        for ((k, idx), c) in &self.terms {
            out.accumulate(k.clone(), *idx, &CMat::scalar(c[(i, j)]), C64::new(1.0, 0.0));
        }
        out.prune();
        out
    }

    /// Builds a fiber-`m` form from an `m×m` table of scalar forms of the same degree.
    pub fn from_entries(entries: &[Vec<TrigPolyForm>]) -> Result<Self> {
        let m = entries.len();
        let first = entries
            .first()
            .and_then(|r| r.first())
            .ok_or_else(|| Error::InvalidInput("empty entry table".into()))?;
        let mut out = Self::zero(first.n, first.degree, m);
        for (i, row) in entries.iter().enumerate() {
            if row.len() != m {
                return Err(Error::InvalidInput("entry table must be square".into()));
            }
            for (j, e) in row.iter().enumerate() {
                if e.fiber != 1 || e.n != first.n || e.degree != first.degree {
                    return Err(Error::InvalidInput("entries must be scalar forms of one degree".into()));
                }
                for ((k, idx), c) in &e.terms {
                    let mut unit = CMat::zeros(m, m);
                    unit[(i, j)] = c[(0, 0)];
                    out.accumulate(k.clone(), *idx, &unit, C64::new(1.0, 0.0));
                }
            }
        }
        out.prune();
        Ok(out)
    }

    /// Complex conjugate of the form (conjugates coefficients and negates momenta).
    pub fn conj(&self) -> Self {
        let mut out = Self::zero(self.n, self.degree, self.fiber);
        for ((k, i), c) in &self.terms {
            out.accumulate(k.neg(), *i, &c.conj(), C64::new(1.0, 0.0));
        }
        out
    }

    /// Pointwise adjoint in the fiber, `x ↦ c(x)†`.
    pub fn fiber_adjoint(&self) -> Self {
        let mut out = Self::zero(self.n, self.degree, self.fiber);
        for ((k, i), c) in &self.terms {
            out.accumulate(k.neg(), *i, &c.adjoint(), C64::new(1.0, 0.0));
        }
        out
    }

    /// Largest violation of `c(-k, I) = conj(c(k, I))`.
    pub fn real_defect(&self) -> f64 {
        self.sub(&self.conj()).map(|d| d.max_coefficient()).unwrap_or(f64::INFINITY)
    }

    /// Largest violation of `c(-k, I) = -c(k, I)†` (values in `u(m)`).
    pub fn anti_hermitian_defect(&self) -> f64 {
        self.add(&self.fiber_adjoint()).map(|d| d.max_coefficient()).unwrap_or(f64::INFINITY)
    }

    pub fn max_coefficient(&self) -> f64 {
        self.terms.values().map(CMat::max_abs).fold(0.0, f64::max)
    }

    /// `Σ |c_{k,I}|_F`: an upper bound for the pointwise operator norm of
    /// any single component function.
    pub fn coefficient_l1(&self) -> f64 {
        self.terms.values().map(CMat::frobenius).sum()
    }

    /// Per-direction `max |k_j|` over the support.
    pub fn support_radius(&self) -> Vec<i64> {
        let mut r = vec![0i64; self.n];
        for (k, _) in self.terms.keys() {
            for (j, &kj) in k.0.iter().enumerate() {
                r[j] = r[j].max(kj.unsigned_abs() as i64);
            }
        }
        r
    }

    /// Value at `x` of each `dx_I` component.
    pub fn evaluate(&self, x: &[f64]) -> BTreeMap<IndexSet, CMat> {
        let mut out: BTreeMap<IndexSet, CMat> = BTreeMap::new();
        for ((k, idx), c) in &self.terms {
            let z = k.phase_at(x);
            out.entry(*idx)
                .and_modify(|acc| acc.axpy(z, c))
                .or_insert_with(|| c.scale(z));
        }
        out
    }

    /// Value at `x` of the `dx_I` component.
    pub fn component_at(&self, indices: IndexSet, x: &[f64]) -> CMat {
        let mut acc = CMat::zeros(self.fiber, self.fiber);
        for ((k, idx), c) in &self.terms {
            if *idx == indices {
                acc.axpy(k.phase_at(x), c);
            }
        }
        acc
    }

    /// For a 1-form: the coefficient function of `dx_j` as a 0-form.
    pub fn component(&self, j: usize) -> Self {
        let mut out = Self::zero(self.n, 0, self.fiber);
        for ((k, idx), c) in &self.terms {
            if idx.indices().eq(core::iter::once(j)) {
                out.accumulate(k.clone(), IndexSet::EMPTY, c, C64::new(1.0, 0.0));
            }
        }
        out
    }

    /// Keeps only the terms with nonzero momentum.
    pub fn oscillatory_part(&self) -> Self {
        let mut out = self.clone();
        out.terms.retain(|(k, _), _| !k.is_zero());
        out
    }

    /// Keeps only the zero-momentum terms.
    pub fn mean_part(&self) -> Self {
        let mut out = self.clone();
        out.terms.retain(|(k, _), _| k.is_zero());
        out
    }
}
