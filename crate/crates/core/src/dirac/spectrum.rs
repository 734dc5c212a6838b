use alloc::vec::Vec;

use super::layout::{BlockLabel, BlockLayout};
use crate::connection::Connection;
use crate::linalg::{hermitian_eigen, orthogonality_defect, residual, CMat};
use crate::{par, Error, Result};

/// Hermiticity required of every assembled block.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Residual and orthogonality certificate for every eigensolve.
pub const EIGEN_TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct DiracBlock {
    pub label: BlockLabel,
    pub matrix: CMat,
}

/// Assembled blocks of `D_A`. When `window` is set only the blocks that can
/// reach `|λ| <= window` were assembled.
#[derive(Clone, Debug)]
pub struct DiracBlocks {
    pub layout: BlockLayout,
    pub blocks: Vec<DiracBlock>,
    pub window: Option<f64>,
}

/// All `(2K+1)^{#conserved}` blocks.
pub fn assemble(conn: &Connection, cutoff: usize) -> Result<DiracBlocks> {
    let layout = BlockLayout::for_connections(&[conn], cutoff)?;
    let labels = layout.all_labels();
    assemble_labels(conn, layout, labels, None)
}

/// Blocks that can carry eigenvalues with `|λ| <= window`.
pub fn assemble_window(conn: &Connection, cutoff: usize, window: f64) -> Result<DiracBlocks> {
    let layout = BlockLayout::for_connections(&[conn], cutoff)?;
    let hol = conn.holonomy();
    let labels = layout.labels_within(hol, hol, conn.oscillatory().coefficient_l1(), window);
    assemble_labels(conn, layout, labels, Some(window))
}

pub fn assemble_labels(
    conn: &Connection,
    layout: BlockLayout,
    labels: Vec<BlockLabel>,
    window: Option<f64>,
) -> Result<DiracBlocks> {
    let mats = par::map(&labels, |label| layout.assemble(conn, label));
    let mut blocks = Vec::with_capacity(labels.len());
    for (label, m) in labels.into_iter().zip(mats) {
        blocks.push(DiracBlock { label, matrix: m? });
    }
    Ok(DiracBlocks { layout, blocks, window })
}

#[derive(Clone, Debug)]
pub struct BlockEigen {
    pub label: BlockLabel,
    /// Ascending.
    pub values: Vec<f64>,
    /// Columns match `values`.
    pub vectors: CMat,
    pub residual: f64,
    pub orthogonality: f64,
}

#[derive(Clone, Debug)]
pub struct EigenSystem {
    pub layout: BlockLayout,
    pub blocks: Vec<BlockEigen>,
    pub window: Option<f64>,
}

/// One entry of the merged spectrum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectrumEntry {
    pub value: f64,
    pub block: usize,
    pub index: usize,
}

/// Certified decomposition of one hermitian block.
pub fn eig_block(layout: &BlockLayout, label: &BlockLabel, m: &CMat) -> Result<BlockEigen> {
    let defect = m.hermiticity_defect();
    if defect > HERMITIAN_TOL {
        return Err(Error::Precondition(alloc::format!(
            "block {} is not hermitian (defect {defect:.3e})",
            layout.describe(label)
        )));
    }
    let e = hermitian_eigen(m).map_err(|_| Error::NoConvergence { block: layout.describe(label) })?;
    let res = residual(m, &e);
    let orth = orthogonality_defect(&e.vectors);
    if !(res <= EIGEN_TOL && orth <= EIGEN_TOL) {
        return Err(Error::EigenCertificate { block: layout.describe(label), residual: res, orthogonality: orth });
    }
    Ok(BlockEigen { label: label.clone(), values: e.values, vectors: e.vectors, residual: res, orthogonality: orth })
}

pub fn eig(blocks: &DiracBlocks) -> Result<EigenSystem> {
    let results = par::map(&blocks.blocks, |b| eig_block(&blocks.layout, &b.label, &b.matrix));
    let blocks_out = results.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(EigenSystem { layout: blocks.layout.clone(), blocks: blocks_out, window: blocks.window })
}

impl EigenSystem {
    /// Sorted union over blocks; ties broken by block label.
    pub fn merged(&self) -> Vec<SpectrumEntry> {
        let mut out: Vec<SpectrumEntry> = self
            .blocks
            .iter()
            .enumerate()
            .flat_map(|(b, be)| be.values.iter().enumerate().map(move |(i, &v)| SpectrumEntry { value: v, block: b, index: i }))
            .collect();
        out.sort_by(|a, b| {
            a.value
                .total_cmp(&b.value)
                .then_with(|| self.blocks[a.block].label.cmp(&self.blocks[b.block].label))
                .then(a.index.cmp(&b.index))
        });
        out
    }

    pub fn merged_values(&self) -> Vec<f64> {
        self.merged().into_iter().map(|e| e.value).collect()
    }

    /// Eigenvalues with `|λ| <= window`, sorted.
    pub fn values_within(&self, window: f64) -> Vec<f64> {
        self.merged().into_iter().map(|e| e.value).filter(|v| v.abs() <= window).collect()
    }

    pub fn max_residual(&self) -> f64 {
        self.blocks.iter().map(|b| b.residual).fold(0.0, f64::max)
    }

    pub fn max_orthogonality(&self) -> f64 {
        self.blocks.iter().map(|b| b.orthogonality).fold(0.0, f64::max)
    }
}

/// Sorted eigenvalues of `D_A` with `|λ| <= window`, which must lie inside
/// the trusted window of the cutoff.
pub fn windowed_spectrum(conn: &Connection, cutoff: usize, window: f64) -> Result<Vec<f64>> {
    let layout = BlockLayout::for_connections(&[conn], cutoff)?;
    if window > layout.trusted_window() {
        return Err(Error::WindowExceedsTrusted { requested: window, trusted: layout.trusted_window() });
    }
    let sys = eig(&assemble_window(conn, cutoff, window)?)?;
    Ok(sys.values_within(window))
}

/// Largest change of a trusted-window eigenvalue when the cutoff grows from
/// `K` to `K + 4`.
pub fn cutoff_drift(conn: &Connection, cutoff: usize) -> Result<f64> {
    let layout = BlockLayout::for_connections(&[conn], cutoff)?;
    let window = layout.trusted_window();
    let base = eig(&assemble_window(conn, cutoff, window)?)?.values_within(window);
    // A little slack so eigenvalues that drift across the window edge still
    // find their partner.
    let wider = eig(&assemble_window(conn, cutoff + 4, window + 1.0)?)?.merged_values();
    let mut worst: f64 = 0.0;
    let mut used = alloc::vec![false; wider.len()];
    for x in base {
        // Nearest unused partner; `wider` is sorted.
        let start = wider.partition_point(|y| *y < x);
        let mut best: Option<(usize, f64)> = None;
        for i in start.saturating_sub(16)..(start + 16).min(wider.len()) {
            if used[i] {
                continue;
            }
            let d = (wider[i] - x).abs();
            if best.map_or(true, |(_, bd)| d < bd) {
                best = Some((i, d));
            }
        }
        match best {
            Some((i, d)) => {
                used[i] = true;
                worst = worst.max(d);
            }
            None => return Ok(f64::INFINITY),
        }
    }
    Ok(worst)
}

/// Drift allowed between `K` and `K + 4` on the trusted window.
pub const CUTOFF_DRIFT_TOL: f64 = 1e-8;

/// Smallest `K >= start`, stepping by 2, whose trusted window is stable
/// under `K -> K + 4`. Returns the cutoff and its drift.
pub fn stable_cutoff(conn: &Connection, start: usize, max: usize) -> Result<(usize, f64)> {
    let mut k = start;
    loop {
        let drift = cutoff_drift(conn, k)?;
        if drift <= CUTOFF_DRIFT_TOL {
            return Ok((k, drift));
        }
        if k + 2 > max {
            return Err(Error::CutoffUnstable { cutoff: k, drift });
        }
        k += 2;
    }
}
