//! Deterministic payment protocol for single-parameter domains: public
//! threshold tables plus one binary search per weight level.

use std::collections::{BTreeMap, BTreeSet};

use crate::domain::{step_integral, AlternativeId, Grid, ScalarSet, Segment, Valuation};
use crate::error::{Error, Result};
use crate::myerson::{single_domain, weight_steps, SocialChoice};
use crate::protocol::{ProtocolTree, Transcript};
use crate::rational::Rational;

/// Public data for one weight level `w_j` of one player.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelThresholds {
    pub weight: Rational,
    /// `Im inf_j`, sorted, without `+∞`.
    pub infs: Vec<Rational>,
    /// `Im sup_j`, sorted.
    pub sups: Vec<Rational>,
    /// `v_l` for each `i_l`.
    pub probes: Vec<Rational>,
}

impl LevelThresholds {
    /// `i_1 ≤ v_1 < i_2 ≤ v_2 < …`.
    pub fn probes_interleave(&self) -> bool {
        self.infs.len() == self.probes.len()
            && self.infs.iter().zip(&self.probes).all(|(i, v)| i <= v)
            && self.probes.iter().zip(self.infs.iter().skip(1)).all(|(v, next)| v < next)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThresholdTable {
    pub player: usize,
    pub levels: Vec<LevelThresholds>,
}

impl ThresholdTable {
    pub fn level(&self, weight: &Rational) -> Option<&LevelThresholds> {
        self.levels.iter().find(|l| &l.weight == weight)
    }

    /// `|Im inf_j| ≤ 2^cc` for every level.
    pub fn within_fooling_bound(&self, cc: u64) -> bool {
        self.levels.iter().all(|l| cc >= 63 || (l.infs.len() as u64) <= 1u64 << cc)
    }

    /// Number of levels that occur for some context.
    pub fn occurring_levels(&self) -> usize {
        self.levels.iter().filter(|l| !l.infs.is_empty()).count()
    }
}

/// `(inf V_j, sup V_j)` of every level of `player` given the other entries of
/// `profile`, in [`SingleParamDomain::levels`](crate::domain::SingleParamDomain::levels) order.
pub fn level_extents(
    f: &dyn SocialChoice,
    player: usize,
    profile: &[Valuation],
) -> Result<Vec<Option<(Rational, Rational)>>> {
    let d = single_domain(f, player)?;
    let levels = d.levels();
    let mut out: Vec<Option<(Rational, Rational)>> = vec![None; levels.len()];
    let mut note = |w: &Rational, lo: Rational, hi: Rational| {
        let j = levels.binary_search(w).expect("weight is a level");
        out[j] = Some(match out[j].take() {
            None => (lo, hi),
            Some((a, b)) => (a.min(lo), b.max(hi)),
        });
    };
    match d.scalars() {
        ScalarSet::Finite(points) => {
            let mut p = profile.to_vec();
            for r in points {
                p[player] = Valuation::Scalar(r.clone());
                let w = d.weight(f.evaluate(&p)?).clone();
                note(&w, r.clone(), r.clone());
            }
        }
        ScalarSet::Interval { hi } => {
            let segs = weight_steps(f, player, profile)?;
            for (k, s) in segs.iter().enumerate() {
                if &s.start > hi {
                    break;
                }
                let end = segs.get(k + 1).map_or_else(|| hi.clone(), |n| n.start.clone().min(hi.clone()));
                note(&s.weight, s.start.clone(), end);
            }
        }
    }
    Ok(out)
}

/// Brute-force table over every context of `grid`. Costs no communication.
pub fn build_threshold_table(f: &dyn SocialChoice, player: usize, grid: &Grid) -> Result<ThresholdTable> {
    let d = single_domain(f, player)?;
    let levels = d.levels();
    let mut infs = vec![BTreeSet::new(); levels.len()];
    let mut sups = vec![BTreeSet::new(); levels.len()];
    // For each level and inf value, the smallest sup different from it.
    let mut sup_after: Vec<BTreeMap<Rational, Option<Rational>>> = vec![BTreeMap::new(); levels.len()];
    grid.for_each_without(player, "threshold table", |profile| {
        for (j, ext) in level_extents(f, player, profile)?.into_iter().enumerate() {
            let Some((lo, hi)) = ext else { continue };
            infs[j].insert(lo.clone());
            sups[j].insert(hi.clone());
            let slot = sup_after[j].entry(lo.clone()).or_insert(None);
            if hi != lo && slot.as_ref().is_none_or(|s| &hi < s) {
                *slot = Some(hi);
            }
        }
        Ok(true)
    })?;
    let mut out = Vec::with_capacity(levels.len());
    for (j, weight) in levels.into_iter().enumerate() {
        let infs: Vec<Rational> = infs[j].iter().cloned().collect();
        let probes = infs
            .iter()
            .enumerate()
            .map(|(l, i_l)| {
                let sup_l = sup_after[j].get(i_l).cloned().flatten();
                let bound = match (sup_l, infs.get(l + 1)) {
                    (Some(s), Some(n)) => Some(s.min(n.clone())),
                    (s, n) => s.or_else(|| n.cloned()),
                };
                d.scalars().point_strictly_between(i_l, bound.as_ref()).unwrap_or_else(|| i_l.clone())
            })
            .collect();
        out.push(LevelThresholds { weight, infs, sups: sups[j].iter().cloned().collect(), probes });
    }
    Ok(ThresholdTable { player, levels: out })
}

/// Tables for every player.
pub fn build_threshold_tables(f: &dyn SocialChoice, grid: &Grid) -> Result<Vec<ThresholdTable>> {
    (0..f.players()).map(|i| build_threshold_table(f, i, grid)).collect()
}

/// Outcome and payments of the protocol, with its transcript.
#[derive(Clone, Debug)]
pub struct PaymentRun {
    pub alternative: AlternativeId,
    pub payments: Vec<Rational>,
    pub transcript: Transcript,
    /// Executions of `f`'s protocol, the initial one included.
    pub runs: u64,
}

struct Prober<'a> {
    tree: &'a ProtocolTree,
    profile: Vec<Valuation>,
    transcript: Transcript,
    runs: u64,
}

impl Prober<'_> {
    /// Runs `f` with `player` at scalar `z` and announces whether the weight
    /// reached `target` with one extra bit.
    fn weight_at(&mut self, d: &crate::domain::SingleParamDomain, player: usize, z: &Rational) -> Result<Rational> {
        let saved = std::mem::replace(&mut self.profile[player], Valuation::Scalar(z.clone()));
        let run = self.tree.run(&self.profile);
        self.profile[player] = saved;
        let run = run?;
        self.transcript.append(&run.transcript);
        self.runs += 1;
        Ok(d.weight(run.label.alternative).clone())
    }

    fn announce(&mut self, player: usize, bit: bool) {
        self.transcript.push(player, usize::from(bit), 1);
    }
}

/// Computes `f(v)` and every player's normalized Myerson payment using only
/// runs of `tree` and the public tables.
pub fn singleparam_payment_protocol(
    f: &dyn SocialChoice,
    tree: &ProtocolTree,
    tables: &[ThresholdTable],
    profile: &[Valuation],
) -> Result<PaymentRun> {
    crate::myerson::validate_profile(f, profile)?;
    let first = tree.run(profile)?;
    let alternative = first.label.alternative;
    let mut pr = Prober { tree, profile: profile.to_vec(), transcript: first.transcript, runs: 1 };
    let mut payments = Vec::with_capacity(f.players());
    for i in 0..f.players() {
        let table = tables
            .iter()
            .find(|t| t.player == i)
            .ok_or_else(|| Error::SearchInconsistency(format!("no threshold table for player {i}")))?;
        let d = single_domain(f, i)?;
        let r = profile[i].scalar().expect("validated").clone();
        let mut found: Vec<(Rational, Rational)> = Vec::new();
        for level in &table.levels {
            if let Some(inf) = locate_inf(&mut pr, d, i, level)? {
                found.push((inf, level.weight.clone()));
            }
        }
        found.sort();
        let mut segs: Vec<Segment> = Vec::with_capacity(found.len());
        for (inf, w) in found {
            match segs.last_mut() {
                Some(last) if last.start == inf => last.weight = w,
                _ => segs.push(Segment::new(inf, w)),
            }
        }
        let Some(head) = segs.first_mut() else {
            return Err(Error::SearchInconsistency(format!("player {i}: no level located")));
        };
        // Below the smallest point of a finite set the lowest weight is held.
        head.start = Rational::zero();
        let w_a = d.weight(alternative);
        if !segs.iter().any(|s| &s.weight == w_a) {
            return Err(Error::SearchInconsistency(format!("player {i}: level of the outcome not located")));
        }
        payments.push(&r * w_a - step_integral(&segs, &r)?);
    }
    Ok(PaymentRun { alternative, payments, transcript: pr.transcript, runs: pr.runs })
}

/// Binary search for `inf_j(v₋ᵢ)` among the table's candidates.
fn locate_inf(
    pr: &mut Prober<'_>,
    d: &crate::domain::SingleParamDomain,
    i: usize,
    level: &LevelThresholds,
) -> Result<Option<Rational>> {
    let r = level.infs.len();
    let mut seen: BTreeMap<usize, Rational> = BTreeMap::new();
    let (mut lo, mut hi) = (0usize, r);
    while lo < hi {
        let mid = (lo + hi) / 2;
        let w = pr.weight_at(d, i, &level.probes[mid])?;
        let reached = w >= level.weight;
        pr.announce(i, reached);
        seen.insert(mid, w);
        if reached {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    if lo == r {
        return Ok(None);
    }
    let w_probe = match seen.get(&lo) {
        Some(w) => w.clone(),
        None => {
            let w = pr.weight_at(d, i, &level.probes[lo])?;
            pr.announce(i, w >= level.weight);
            w
        }
    };
    if w_probe == level.weight {
        return Ok(Some(level.infs[lo].clone()));
    }
    let w_inf = pr.weight_at(d, i, &level.infs[lo])?;
    let hit = w_inf == level.weight;
    pr.announce(i, hit);
    Ok(hit.then(|| level.infs[lo].clone()))
}

/// `4·n·cc²·max_i |Im w_i|`.
pub fn bit_bound(f: &dyn SocialChoice, cc: u64) -> Result<u64> {
    let mut levels = 0u64;
    for i in 0..f.players() {
        levels = levels.max(single_domain(f, i)?.levels().len() as u64);
    }
    Ok(4 * f.players() as u64 * cc * cc * levels)
}
