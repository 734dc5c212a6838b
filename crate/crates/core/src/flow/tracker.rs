//! Exact spectral flow by following eigenvalue branches through zero.
//!
//! Each block that can reach zero is tracked on its own. Between adjacent
//! samples only eigenvalues within `L·Δs` of zero can change sign (`L` bounds
//! `‖dD/ds‖`), and those are matched to the next sample by eigenvector
//! overlap. A sign change is then bisected down to the crossing point.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::path::PathSpec;
use crate::dirac::{cl_pairing, eig_block, BlockEigen, BlockLabel, BlockLayout};
use crate::linalg::CMat;
use crate::{par, Error, Result};

/// `|λ|` below this counts as zero when locating a crossing.
pub const CROSSING_TOL: f64 = 1e-8;
/// Signs are only read outside `|λ| < SIGN_BAND`.
pub const SIGN_BAND: f64 = 1e-6;
/// Crossing locations are refined to this width in `s`.
pub const BISECTION_WIDTH: f64 = 1e-10;
/// Two overlaps closer than this are ambiguous.
pub const AMBIGUITY_MARGIN: f64 = 0.1;
/// Each ambiguous interval is split in four, at most this many times.
pub const MAX_REFINEMENT_LEVELS: usize = 6;

#[derive(Clone, Debug, PartialEq)]
pub struct CrossingRecord {
    pub s: f64,
    /// `+1` for an eigenvalue moving from negative to positive.
    pub sign: i32,
    pub multiplicity: usize,
    pub branch: String,
    /// `λ'` from the Clifford pairing with the path velocity.
    pub slope: f64,
    /// Eigenvalue at the refined crossing point.
    pub lambda: f64,
}

/// An eigenvalue that entered the sign band and left it with its original sign.
#[derive(Clone, Debug, PartialEq)]
pub struct TouchRecord {
    pub s_from: f64,
    pub s_to: f64,
    pub branch: String,
    pub min_abs: f64,
}

#[derive(Clone, Debug)]
pub struct SpectralFlowResult {
    pub f: i64,
    pub crossings: Vec<CrossingRecord>,
    pub touches: Vec<TouchRecord>,
    /// `N_neg(A_0) - N_neg(A_1)` summed over the tracked blocks; an
    /// independent count that must equal `f`.
    pub inertia_flow: i64,
    pub tracked_blocks: usize,
    pub samples_evaluated: usize,
    pub refinements: usize,
    pub cutoff: usize,
    pub trusted_window: f64,
    /// Smallest `|λ|` over tracked blocks at `s = 0` and `s = 1`.
    pub endpoint_gaps: (f64, f64),
}

struct Sample {
    s: f64,
    values: Vec<f64>,
    vectors: CMat,
}

/// A branch that sits inside the sign band at the current sample.
#[derive(Clone, Debug)]
struct Carry {
    index: usize,
    sign: i32,
    s_from: f64,
    min_abs: f64,
}

struct Tracker<'a> {
    path: &'a PathSpec,
    layout: &'a BlockLayout,
    label: &'a BlockLabel,
    speed: f64,
    crossings: Vec<CrossingRecord>,
    touches: Vec<TouchRecord>,
    samples: usize,
    refinements: usize,
}

struct BlockOutcome {
    crossings: Vec<CrossingRecord>,
    touches: Vec<TouchRecord>,
    inertia: i64,
    samples: usize,
    refinements: usize,
    gaps: (f64, f64),
}

fn band_sign(x: f64) -> i32 {
    if x >= SIGN_BAND {
        1
    } else if x <= -SIGN_BAND {
        -1
    } else {
        0
    }
}

fn raw_sign(x: f64) -> i32 {
    if x >= 0.0 {
        1
    } else {
        -1
    }
}

fn overlap(a: &CMat, i: usize, b: &CMat, l: usize) -> f64 {
    let mut acc = crate::C64::new(0.0, 0.0);
    for r in 0..a.rows() {
        acc += a[(r, i)].conj() * b[(r, l)];
    }
    acc.norm()
}

fn column_overlap(v: &[crate::C64], b: &CMat, l: usize) -> f64 {
    let mut acc = crate::C64::new(0.0, 0.0);
    for (r, x) in v.iter().enumerate() {
        acc += x.conj() * b[(r, l)];
    }
    acc.norm()
}

impl<'a> Tracker<'a> {
    fn sample(&mut self, s: f64) -> Result<Sample> {
        self.samples += 1;
        let conn = self.path.at(s)?;
        let m = self.layout.assemble(&conn, self.label)?;
        let BlockEigen { values, vectors, .. } = eig_block(self.layout, self.label, &m)?;
        Ok(Sample { s, values, vectors })
    }

    fn branch_name(&self, index: usize) -> String {
        format!("{}#{}", self.label, index)
    }

    fn run(mut self) -> Result<BlockOutcome> {
        let grid = self.path.grid().to_vec();
        let mut left = self.sample(grid[0])?;
        let inertia_start = left.values.iter().filter(|v| **v < 0.0).count() as i64;
        let gap_start = left.values.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
        if gap_start < self.path.gap() {
            return Err(Error::EndpointZeroMode { s: 0.0, lambda: gap_start, gap: self.path.gap() });
        }
        let mut carry: Vec<Carry> = Vec::new();
        for &s in &grid[1..] {
            let right = self.sample(s)?;
            carry = self.interval(&left, &right, carry, 0)?;
            left = right;
        }
        let gap_end = left.values.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
        if gap_end < self.path.gap() || !carry.is_empty() {
            return Err(Error::EndpointZeroMode { s: 1.0, lambda: gap_end, gap: self.path.gap() });
        }
        let inertia_end = left.values.iter().filter(|v| **v < 0.0).count() as i64;
        Ok(BlockOutcome {
            crossings: self.crossings,
            touches: self.touches,
            inertia: inertia_start - inertia_end,
            samples: self.samples,
            refinements: self.refinements,
            gaps: (gap_start, gap_end),
        })
    }

    fn interval(&mut self, left: &Sample, right: &Sample, carry: Vec<Carry>, depth: usize) -> Result<Vec<Carry>> {
        let h = right.s - left.s;
        let reach = self.speed * h + SIGN_BAND;
        // Branches that can change sign inside the interval.
        let mut branches: Vec<(usize, i32, Option<Carry>)> = Vec::new();
        for (i, &lam) in left.values.iter().enumerate() {
            let carried = carry.iter().find(|c| c.index == i).cloned();
            if carried.is_none() && lam.abs() > reach {
                continue;
            }
            let sign = match &carried {
                Some(c) => c.sign,
                None => band_sign(lam),
            };
            if sign == 0 {
                return Err(Error::Precondition(format!(
                    "branch {} entered the sign band untracked at s = {}",
                    self.branch_name(i),
                    left.s
                )));
            }
            branches.push((i, sign, carried));
        }
        if branches.is_empty() {
            return Ok(Vec::new());
        }
        let candidates: Vec<usize> =
            (0..right.values.len()).filter(|&l| right.values[l].abs() <= reach + self.speed * h).collect();

        let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
        let mut ambiguous = false;
        let mut worst_margin = 1.0f64;
        for (bi, &(i, _, _)) in branches.iter().enumerate() {
            let ov: Vec<(f64, usize)> =
                candidates.iter().map(|&l| (overlap(&left.vectors, i, &right.vectors, l), l)).collect();
            let best = ov.iter().fold(0.0f64, |m, (o, _)| m.max(*o));
            let near: Vec<i32> =
                ov.iter().filter(|(o, _)| *o >= best - AMBIGUITY_MARGIN).map(|(_, l)| band_sign(right.values[*l])).collect();
            let split_signs = near.iter().any(|s| *s != near[0]);
            let all_signs: Vec<i32> = ov.iter().map(|(_, l)| band_sign(right.values[*l])).collect();
            let weak = best < 0.5 && all_signs.iter().any(|s| *s != all_signs[0]);
            if ov.is_empty() || split_signs || weak {
                ambiguous = true;
                worst_margin = worst_margin.min(best);
            }
            for (o, l) in ov {
                pairs.push((o, bi, l));
            }
        }
        let mut assigned: Vec<Option<usize>> = alloc::vec![None; branches.len()];
        if !ambiguous {
            pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
            let mut taken = alloc::vec![false; right.values.len()];
            for (_, bi, l) in pairs {
                if assigned[bi].is_none() && !taken[l] {
                    assigned[bi] = Some(l);
                    taken[l] = true;
                }
            }
            ambiguous = assigned.iter().any(Option::is_none);
        }
        if ambiguous {
            if depth >= MAX_REFINEMENT_LEVELS {
                return Err(Error::AmbiguousMatching {
                    s_left: left.s,
                    s_right: right.s,
                    block: self.layout.describe(self.label),
                    margin: worst_margin,
                });
            }
            self.refinements += 1;
            let mut carry = carry;
            let mut prev: Option<Sample> = None;
            for q in 1..=4 {
                let s = if q == 4 { right.s } else { left.s + h * q as f64 / 4.0 };
                let next = if q == 4 { None } else { Some(self.sample(s)?) };
                let l = prev.as_ref().unwrap_or(left);
                let r = next.as_ref().unwrap_or(right);
                carry = self.interval(l, r, carry, depth + 1)?;
                prev = next;
            }
            return Ok(carry);
        }

        let mut out = Vec::new();
        for ((i, sign, carried), l) in branches.into_iter().zip(assigned) {
            let l = l.expect("assigned");
            let lam_r = right.values[l];
            let sr = band_sign(lam_r);
            let dip = carried.as_ref().map(|c| c.min_abs).unwrap_or(f64::INFINITY).min(left.values[i].abs());
            if sr == 0 {
                out.push(Carry {
                    index: l,
                    sign,
                    s_from: carried.as_ref().map(|c| c.s_from).unwrap_or(left.s),
                    min_abs: dip.min(lam_r.abs()),
                });
            } else if sr == sign {
                if let Some(c) = carried {
                    self.touches.push(TouchRecord {
                        s_from: c.s_from,
                        s_to: right.s,
                        branch: self.branch_name(l),
                        min_abs: dip,
                    });
                }
            } else {
                let rec = self.locate(left, i, right, sr)?;
                self.crossings.push(rec);
            }
        }
        Ok(out)
    }

    /// Bisects the branch leaving `left` at column `i` down to its zero.
    fn locate(&mut self, left: &Sample, i: usize, right: &Sample, sign_after: i32) -> Result<CrossingRecord> {
        let mut a = left.s;
        let mut b = right.s;
        let mut va: Vec<crate::C64> = left.vectors.column(i);
        let mut lam_a = left.values[i];
        let mut lam_mid = lam_a;
        if raw_sign(lam_a) == sign_after {
            // The sign already flipped inside the band before `left`.
            b = a;
        }
        let mut iterations = 0;
        while (b - a > BISECTION_WIDTH || lam_mid.abs() > CROSSING_TOL) && iterations < 200 {
            iterations += 1;
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            let sm = self.sample(mid)?;
            let reach = self.speed * (b - a) + lam_a.abs() + SIGN_BAND;
            let j = (0..sm.values.len())
                .filter(|&l| sm.values[l].abs() <= reach)
                .max_by(|&p, &q| column_overlap(&va, &sm.vectors, p).total_cmp(&column_overlap(&va, &sm.vectors, q)))
                .ok_or_else(|| Error::AmbiguousMatching {
                    s_left: a,
                    s_right: b,
                    block: self.layout.describe(self.label),
                    margin: 0.0,
                })?;
            lam_mid = sm.values[j];
            if raw_sign(lam_mid) == sign_after {
                b = mid;
            } else {
                a = mid;
                va = sm.vectors.column(j);
                lam_a = lam_mid;
            }
        }
        let slope = cl_pairing(&va, self.path.velocity(), self.layout, self.label)?;
        Ok(CrossingRecord {
            s: 0.5 * (a + b),
            sign: sign_after,
            multiplicity: 1,
            branch: self.branch_name(i),
            slope,
            lambda: lam_mid,
        })
    }
}

/// Signed count of eigenvalue zero crossings along the path.
pub fn exact_flow(path: &PathSpec) -> Result<SpectralFlowResult> {
    let layout = path.layout()?;
    let labels = path.labels_within(&layout, path.gap())?;
    let speed = path.velocity_bound();
    let outcomes = par::map(&labels, |label| {
        Tracker {
            path,
            layout: &layout,
            label,
            speed,
            crossings: Vec::new(),
            touches: Vec::new(),
            samples: 0,
            refinements: 0,
        }
        .run()
    });
    let mut crossings = Vec::new();
    let mut touches = Vec::new();
    let mut inertia = 0;
    let mut samples = 0;
    let mut refinements = 0;
    let mut gaps = (f64::INFINITY, f64::INFINITY);
    for o in outcomes {
        let o = o?;
        crossings.extend(o.crossings);
        touches.extend(o.touches);
        inertia += o.inertia;
        samples += o.samples;
        refinements += o.refinements;
        gaps = (gaps.0.min(o.gaps.0), gaps.1.min(o.gaps.1));
    }
    let crossings = group_crossings(crossings);
    let f = crossings.iter().map(|c| c.sign as i64 * c.multiplicity as i64).sum();
    Ok(SpectralFlowResult {
        f,
        crossings,
        touches,
        inertia_flow: inertia,
        tracked_blocks: labels.len(),
        samples_evaluated: samples,
        refinements,
        cutoff: layout.cutoff(),
        trusted_window: layout.trusted_window(),
        endpoint_gaps: gaps,
    })
}

/// Merges same-sign crossings that coincide within the crossing tolerance.
fn group_crossings(mut list: Vec<CrossingRecord>) -> Vec<CrossingRecord> {
    list.sort_by(|a, b| a.s.total_cmp(&b.s).then(a.sign.cmp(&b.sign)).then_with(|| a.branch.cmp(&b.branch)));
    let mut out: Vec<CrossingRecord> = Vec::new();
    for c in list {
        if let Some(last) = out.iter_mut().rev().find(|g| g.sign == c.sign && (c.s - g.s).abs() <= CROSSING_TOL) {
            last.multiplicity += c.multiplicity;
            last.branch.push('+');
            last.branch.push_str(&c.branch);
            continue;
        }
        out.push(c);
    }
    out
}
