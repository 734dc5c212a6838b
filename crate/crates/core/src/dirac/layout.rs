use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use super::clifford::CliffordRep;
use crate::connection::Connection;
use crate::forms::{Momentum, TrigPolyForm};
use crate::linalg::CMat;
use crate::math::{sqrt, TAU};
use crate::{Error, Result, C64};

/// Momentum components along the conserved directions, in increasing
/// direction order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BlockLabel(pub Vec<i32>);

impl fmt::Display for BlockLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, k) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{k}")?;
        }
        write!(f, "]")
    }
}

/// Fourier truncation `|k_j| <= K` split into blocks of fixed conserved
/// momentum. Inside a block the basis runs over the free momenta
/// (mixed radix, first free direction most significant), then spinor, then
/// bundle fiber.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockLayout {
    clifford: CliffordRep,
    fiber: usize,
    cutoff: usize,
    conserved: Vec<bool>,
}

impl BlockLayout {
    pub fn new(clifford: CliffordRep, fiber: usize, cutoff: usize, conserved: Vec<bool>) -> Result<Self> {
        if cutoff == 0 {
            return Err(Error::InvalidInput("cutoff K must be at least 1".into()));
        }
        if conserved.len() != clifford.dim() {
            return Err(Error::DimensionMismatch { expected: clifford.dim(), found: conserved.len() });
        }
        Ok(Self { clifford, fiber, cutoff, conserved })
    }

    /// Layout shared by every connection in `conns` (for example all points
    /// of a path): a direction is conserved when no oscillatory term of any
    /// of them depends on it.
    pub fn for_connections(conns: &[&Connection], cutoff: usize) -> Result<Self> {
        let first = conns
            .first()
            .ok_or_else(|| Error::InvalidInput("need at least one connection".into()))?;
        let n = first.dim();
        let mut conserved = vec![true; n];
        for c in conns {
            if c.dim() != n {
                return Err(Error::DimensionMismatch { expected: n, found: c.dim() });
            }
            if c.fiber() != first.fiber() {
                return Err(Error::FiberMismatch { expected: first.fiber(), found: c.fiber() });
            }
            check_support(c.oscillatory(), cutoff)?;
            for (k, _, _) in c.oscillatory().terms() {
                for (j, &kj) in k.0.iter().enumerate() {
                    if kj != 0 {
                        conserved[j] = false;
                    }
                }
            }
        }
        Self::new(CliffordRep::standard(n)?, first.fiber(), cutoff, conserved)
    }

    pub fn with_clifford(mut self, clifford: CliffordRep) -> Result<Self> {
        if clifford.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: clifford.dim() });
        }
        self.clifford = clifford;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.conserved.len()
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn fiber(&self) -> usize {
        self.fiber
    }

    pub fn clifford(&self) -> &CliffordRep {
        &self.clifford
    }

    pub fn conserved(&self) -> &[bool] {
        &self.conserved
    }

    /// 1-based conserved directions, for reports.
    pub fn conserved_directions(&self) -> Vec<usize> {
        (0..self.dim()).filter(|&j| self.conserved[j]).map(|j| j + 1).collect()
    }

    fn free_dirs(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.dim()).filter(|&j| !self.conserved[j])
    }

    fn conserved_dirs(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.dim()).filter(|&j| self.conserved[j])
    }

    /// Spinor dimension times bundle fiber.
    pub fn cell(&self) -> usize {
        self.clifford.spin_dim() * self.fiber
    }

    pub fn free_momenta(&self) -> usize {
        (2 * self.cutoff + 1).pow(self.free_dirs().count() as u32)
    }

    pub fn block_dim(&self) -> usize {
        self.cell() * self.free_momenta()
    }

    /// `2πK/4`: eigenvalues inside this window are insensitive to the cutoff.
    pub fn trusted_window(&self) -> f64 {
        TAU * self.cutoff as f64 / 4.0
    }

    /// Full momentum of free-momentum slot `m` in the block `label`.
    pub fn momentum(&self, label: &BlockLabel, m: usize) -> Vec<i32> {
        let side = 2 * self.cutoff + 1;
        let mut k = vec![0i32; self.dim()];
        for (c, j) in self.conserved_dirs().enumerate() {
            k[j] = label.0[c];
        }
        let free: Vec<usize> = self.free_dirs().collect();
        let mut rest = m;
        for &j in free.iter().rev() {
            k[j] = (rest % side) as i32 - self.cutoff as i32;
            rest /= side;
        }
        k
    }

    /// Free-momentum slot of `k`, or `None` when it leaves the cutoff.
    pub fn slot(&self, k: &[i32]) -> Option<usize> {
        let side = 2 * self.cutoff + 1;
        let mut m = 0;
        for j in self.free_dirs() {
            let shifted = k[j] + self.cutoff as i32;
            if shifted < 0 || shifted as usize >= side {
                return None;
            }
            m = m * side + shifted as usize;
        }
        Some(m)
    }

    /// `|(2πp_j + θ_j)_{j conserved}|`.
    pub fn label_momentum(&self, label: &BlockLabel, hol: &[f64]) -> f64 {
        let sq: f64 = self
            .conserved_dirs()
            .zip(&label.0)
            .map(|(j, &p)| {
                let v = TAU * p as f64 + hol[j];
                v * v
            })
            .sum();
        sqrt(sq)
    }

    /// Every label inside the cutoff, in lexicographic order.
    pub fn all_labels(&self) -> Vec<BlockLabel> {
        self.labels_where(|_| true)
    }

    /// Labels whose block can carry an eigenvalue with `|λ| <= window` for
    /// some connection with holonomy in `[hol_lo, hol_hi]` (componentwise)
    /// and oscillatory coefficient mass at most `osc_bound`.
    ///
    /// Uses `|λ| >= |p_conserved| - |V|`, the Weyl bound for the potential
    /// term `V` against the diagonal part whose block eigenvalues all exceed
    /// `|p_conserved|` in modulus.
    pub fn labels_within(&self, hol_lo: &[f64], hol_hi: &[f64], osc_bound: f64, window: f64) -> Vec<BlockLabel> {
        let reach = window + osc_bound;
        let nearest: Vec<(f64, f64)> = hol_lo.iter().zip(hol_hi).map(|(a, b)| (a.min(*b), a.max(*b))).collect();
        self.labels_where(
            |partial: &[(usize, i32)]| {
                let sq: f64 = partial
                    .iter()
                    .map(|&(j, p)| {
                        let (lo, hi) = nearest[j];
                        let base = TAU * p as f64;
                        let d = if base + hi < 0.0 {
                            base + hi
                        } else if base + lo > 0.0 {
                            base + lo
                        } else {
                            0.0
                        };
                        d * d
                    })
                    .sum();
                sq <= reach * reach
            },
        )
    }

    /// Depth-first enumeration over the conserved coordinates with a prefix
    /// filter (the filter must be monotone: rejecting a prefix rejects all
    /// extensions).
    fn labels_where(&self, keep: impl Fn(&[(usize, i32)]) -> bool) -> Vec<BlockLabel> {
        let dirs: Vec<usize> = self.conserved_dirs().collect();
        let k = self.cutoff as i32;
        let mut out = Vec::new();
        let mut prefix: Vec<(usize, i32)> = Vec::with_capacity(dirs.len());
        fn recurse(
            dirs: &[usize],
            k: i32,
            prefix: &mut Vec<(usize, i32)>,
            keep: &dyn Fn(&[(usize, i32)]) -> bool,
            out: &mut Vec<BlockLabel>,
        ) {
            if prefix.len() == dirs.len() {
                out.push(BlockLabel(prefix.iter().map(|&(_, p)| p).collect()));
                return;
            }
            let j = dirs[prefix.len()];
            for p in -k..=k {
                prefix.push((j, p));
                if keep(prefix) {
                    recurse(dirs, k, prefix, keep, out);
                }
                prefix.pop();
            }
        }
        recurse(&dirs, k, &mut prefix, &keep, &mut out);
        out
    }

    /// `Σ_q Σ_j c_j ⊗ a_{q,j}` grouped by Fourier mode `q`.
    fn couplings(&self, osc: &TrigPolyForm) -> BTreeMap<Momentum, CMat> {
        let mut out: BTreeMap<Momentum, CMat> = BTreeMap::new();
        for (q, idx, coeff) in osc.terms() {
            let j = idx.indices().next().expect("1-form term");
            let piece = self.clifford.gamma(j).kron(coeff);
            out.entry(q.clone())
                .and_modify(|m| m.add_assign(&piece))
                .or_insert(piece);
        }
        out
    }

    fn check_connection(&self, conn: &Connection) -> Result<()> {
        if conn.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: conn.dim() });
        }
        if conn.fiber() != self.fiber {
            return Err(Error::FiberMismatch { expected: self.fiber, found: conn.fiber() });
        }
        check_support(conn.oscillatory(), self.cutoff)?;
        for (q, _, _) in conn.oscillatory().terms() {
            if self.conserved_dirs().any(|j| q.0[j] != 0) {
                return Err(Error::InvalidInput(format!(
                    "oscillatory mode {q} depends on a direction the layout treats as conserved"
                )));
            }
        }
        Ok(())
    }

    /// Dense block of `D_A` at conserved momentum `label`:
    /// `Σ_j c_j i(2πk_j + θ_j)` on the diagonal and `Σ_j c_j ⊗ a_{q,j}`
    /// from momentum `k` to `k + q`.
    pub fn assemble(&self, conn: &Connection, label: &BlockLabel) -> Result<CMat> {
        self.check_connection(conn)?;
        let cell = self.cell();
        let fiber_id = CMat::identity(self.fiber);
        let nm = self.free_momenta();
        let mut out = CMat::zeros(nm * cell, nm * cell);
        let couplings = self.couplings(conn.oscillatory());
        let hol = conn.holonomy();
        for m in 0..nm {
            let k = self.momentum(label, m);
            let mut diag = CMat::zeros(cell, cell);
            for (j, &kj) in k.iter().enumerate() {
                let phase = C64::new(0.0, TAU * kj as f64 + hol[j]);
                diag.axpy(phase, &self.clifford.gamma(j).kron(&fiber_id));
            }
            write_cell(&mut out, m, m, cell, &diag);
            for (q, c) in &couplings {
                let target: Vec<i32> = k.iter().zip(&q.0).map(|(a, b)| a + b).collect();
                if let Some(t) = self.slot(&target) {
                    add_cell(&mut out, t, m, cell, c);
                }
            }
        }
        Ok(out)
    }

    /// Matrix of Clifford multiplication by the 1-form `b` restricted to the
    /// block: `Σ_j c_j ⊗ b_{q,j}` from momentum `k` to `k + q`. Modes that
    /// would leave the block do not contribute.
    pub fn clifford_multiplication(&self, b: &TrigPolyForm, label: &BlockLabel) -> Result<CMat> {
        if b.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: b.dim() });
        }
        if b.fiber() != self.fiber {
            return Err(Error::FiberMismatch { expected: self.fiber, found: b.fiber() });
        }
        if b.degree() != 1 {
            return Err(Error::DegreeMismatch { expected: 1, found: b.degree() });
        }
        let cell = self.cell();
        let nm = self.free_momenta();
        let mut out = CMat::zeros(nm * cell, nm * cell);
        let couplings = self.couplings(b);
        for m in 0..nm {
            let k = self.momentum(label, m);
            for (q, c) in &couplings {
                if self.conserved_dirs().any(|j| q.0[j] != 0) {
                    continue;
                }
                let target: Vec<i32> = k.iter().zip(&q.0).map(|(a, b)| a + b).collect();
                if let Some(t) = self.slot(&target) {
                    add_cell(&mut out, t, m, cell, c);
                }
            }
        }
        Ok(out)
    }

    pub fn describe(&self, label: &BlockLabel) -> String {
        format!("label {label} (K = {})", self.cutoff)
    }
}

fn write_cell(out: &mut CMat, row: usize, col: usize, cell: usize, m: &CMat) {
    for a in 0..cell {
        for b in 0..cell {
            out[(row * cell + a, col * cell + b)] = m[(a, b)];
        }
    }
}

fn add_cell(out: &mut CMat, row: usize, col: usize, cell: usize, m: &CMat) {
    for a in 0..cell {
        for b in 0..cell {
            out[(row * cell + a, col * cell + b)] += m[(a, b)];
        }
    }
}

fn check_support(osc: &TrigPolyForm, cutoff: usize) -> Result<()> {
    let radius = osc.support_radius().into_iter().max().unwrap_or(0);
    if radius > cutoff as i64 {
        return Err(Error::SupportExceedsCutoff { radius, cutoff });
    }
    Ok(())
}
