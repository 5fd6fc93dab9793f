//! Which alternatives a player can still reach given the others' types, a
//! type that reaches them, and the price it pays there.

use std::collections::HashMap;

use crate::constructions::matching::Match;
use crate::domain::{AlternativeId, Grid, Valuation};
use crate::error::{Error, Result};
use crate::myerson::{Mechanism, PaymentRule, SocialChoice};
use crate::protocol::{leaf_representatives, ProtocolTree};
use crate::rational::{ceil_log2, ExtendedRational, Rational};

/// `∃ v ∈ axis : f(v, v₋ᵢ) = a`.
pub fn reach(f: &dyn SocialChoice, player: usize, a: AlternativeId, profile: &[Valuation], axis: &[Valuation]) -> Result<bool> {
    Ok(reach_witness(f, player, a, profile, axis)?.is_some())
}

/// First type on the axis reaching `a`.
pub fn reach_witness(
    f: &dyn SocialChoice,
    player: usize,
    a: AlternativeId,
    profile: &[Valuation],
    axis: &[Valuation],
) -> Result<Option<Valuation>> {
    let mut p = profile.to_vec();
    for v in axis {
        p[player] = v.clone();
        if f.evaluate(&p)? == a {
            return Ok(Some(v.clone()));
        }
    }
    Ok(None)
}

/// `P_i(w, v₋ᵢ)` for the reach witness `w`, or `+∞` when `a` is unreachable.
pub fn price(m: &Mechanism, player: usize, a: AlternativeId, profile: &[Valuation], axis: &[Valuation]) -> Result<ExtendedRational> {
    match reach_witness(m.f.as_ref(), player, a, profile, axis)? {
        None => Ok(ExtendedRational::PosInfinity),
        Some(w) => {
            let mut p = profile.to_vec();
            p[player] = w;
            Ok(ExtendedRational::Finite(m.payment(player, &p)?))
        }
    }
}

/// A function evaluated on grid indices.
pub trait IndexedChoice: Sync {
    fn axis_lens(&self) -> Vec<usize>;
    fn eval(&self, idx: &[usize]) -> Result<AlternativeId>;
}

/// Any function on its grid.
pub struct GridChoice<'a> {
    pub f: &'a dyn SocialChoice,
    pub grid: &'a Grid,
}

impl IndexedChoice for GridChoice<'_> {
    fn axis_lens(&self) -> Vec<usize> {
        self.grid.axes().iter().map(Vec::len).collect()
    }

    fn eval(&self, idx: &[usize]) -> Result<AlternativeId> {
        let p: Vec<Valuation> = idx.iter().enumerate().map(|(j, &t)| self.grid.axis(j)[t].clone()).collect();
        self.f.evaluate(&p)
    }
}

/// The matching function on mask indices, without building valuations.
pub struct MatchChoice<'a>(pub &'a Match);

impl IndexedChoice for MatchChoice<'_> {
    fn axis_lens(&self) -> Vec<usize> {
        vec![self.0.sides.x.len(), self.0.sides.y.len(), self.0.diane_types() as usize]
    }

    fn eval(&self, idx: &[usize]) -> Result<AlternativeId> {
        Ok(self.0.evaluate(self.0.sides.x[idx[0]], self.0.sides.y[idx[1]], idx[2] as u64 + 1))
    }
}

/// For each alternative, the least axis index of `player` reaching it.
pub fn brute_force_row(f: &dyn IndexedChoice, alternatives: usize, player: usize, ctx: &mut [usize]) -> Result<Vec<Option<usize>>> {
    let n = f.axis_lens()[player];
    let mut row = vec![None; alternatives];
    let mut left = alternatives;
    for t in 0..n {
        ctx[player] = t;
        let a = f.eval(ctx)?.0;
        if a >= alternatives {
            return Err(Error::AlternativeOutOfRange { index: a, count: alternatives });
        }
        if row[a].is_none() {
            row[a] = Some(t);
            left -= 1;
            if left == 0 {
                break;
            }
        }
    }
    Ok(row)
}

/// The exponential protocol: every node not owned by `player` is
/// broadcast, then everybody scans the leaves in order.
pub struct ProtocolEngine<'a> {
    pub tree: &'a ProtocolTree,
    pub player: usize,
    /// `responses[j][t][k]`: message of player `j`'s type `t` at its `k`-th node.
    responses: Vec<Vec<Vec<u32>>>,
    /// Per leaf: `(j, k, choice)` along the path, for `j ≠ player`.
    constraints: Vec<Vec<(usize, usize, u32)>>,
    /// Axis index of the representative's `player` component.
    reps: Vec<Option<usize>>,
    labels: Vec<usize>,
    alternatives: usize,
    /// Bits broadcast per query.
    pub bits: u64,
    axis_index: Vec<HashMap<Valuation, usize>>,
}

const NO_MESSAGE: u32 = u32::MAX;

/// Per alternative: `(axis index of the witness, leaf)`.
pub type EngineRow = Vec<Option<(usize, usize)>>;

impl<'a> ProtocolEngine<'a> {
    pub fn new(tree: &'a ProtocolTree, grid: &Grid, player: usize, alternatives: usize) -> Result<Self> {
        let n = tree.players();
        let internal = tree.internal_nodes();
        let mut local: HashMap<usize, usize> = HashMap::new();
        let mut owned: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut bits = 0u64;
        for &(id, owner, b) in &internal {
            local.insert(id, owned[owner].len());
            owned[owner].push(id);
            if owner != player {
                bits += u64::from(b);
            }
        }
        let mut responses = vec![Vec::new(); n];
        for j in (0..n).filter(|&j| j != player) {
            // A node may reject types that never reach it; such a type
            // matches no constraint there.
            responses[j] = grid
                .axis(j)
                .iter()
                .map(|v| owned[j].iter().map(|&node| tree.node_message(node, v).map_or(NO_MESSAGE, |m| m as u32)).collect())
                .collect();
        }
        let constraints = tree
            .leaves()
            .iter()
            .map(|l| {
                l.path
                    .iter()
                    .filter_map(|&(node, choice)| {
                        let owner = tree.node_owner(node).expect("path nodes are internal");
                        (owner != player).then(|| (owner, local[&node], choice as u32))
                    })
                    .collect()
            })
            .collect();
        let axis_index: Vec<HashMap<Valuation, usize>> =
            grid.axes().iter().map(|a| a.iter().enumerate().map(|(t, v)| (v.clone(), t)).collect()).collect();
        let r = leaf_representatives(tree, grid)?;
        let reps = (0..tree.leaves().len()).map(|l| r.get(l).map(|p| axis_index[player][&p[player]])).collect();
        let labels = tree.leaves().iter().map(|l| l.label.alternative.0).collect();
        Ok(ProtocolEngine { tree, player, responses, constraints, reps, labels, alternatives, bits, axis_index })
    }

    /// Answers for the context given as axis indices (the own slot is ignored).
    pub fn query_indices(&self, ctx: &[usize]) -> EngineRow {
        let mut row: EngineRow = vec![None; self.alternatives];
        for (leaf, cons) in self.constraints.iter().enumerate() {
            let Some(rep) = self.reps[leaf] else { continue };
            if cons.iter().all(|&(j, k, c)| self.responses[j][ctx[j]][k] == c) {
                let slot = &mut row[self.labels[leaf]];
                if slot.is_none_or(|(t, _)| rep < t) {
                    *slot = Some((rep, leaf));
                }
            }
        }
        row
    }

    /// Index form of `profile`; every entry must be on its grid axis (the
    /// own entry may be anything).
    pub fn indices(&self, profile: &[Valuation]) -> Result<Vec<usize>> {
        profile
            .iter()
            .enumerate()
            .map(|(j, v)| {
                if j == self.player {
                    return Ok(0);
                }
                self.axis_index[j]
                    .get(v)
                    .copied()
                    .ok_or_else(|| Error::OutOfDomain { player: j, detail: format!("{v} is not on the grid") })
            })
            .collect()
    }

    pub fn query(&self, profile: &[Valuation]) -> Result<EngineRow> {
        Ok(self.query_indices(&self.indices(profile)?))
    }

    /// Payment of `player` on the leaf's label.
    pub fn leaf_price(&self, leaf: usize) -> Result<Rational> {
        self.tree
            .leaf(leaf)
            .label
            .payments
            .as_ref()
            .and_then(|p| p.get(self.player).cloned())
            .ok_or_else(|| Error::ProtocolIntegrity(format!("leaf {leaf} carries no payments")))
    }
}

/// Price from the reach phase followed by a one-leaf certificate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PriceViaReach {
    pub price: ExtendedRational,
    pub reach_bits: u64,
    /// Naming the leaf, plus one confirmation bit per other player.
    pub verification_bits: u64,
}

pub fn price_via_reach(engine: &ProtocolEngine<'_>, a: AlternativeId, profile: &[Valuation]) -> Result<PriceViaReach> {
    let row = engine.query(profile)?;
    let reach_bits = engine.bits;
    match row.get(a.0).copied().flatten() {
        None => Ok(PriceViaReach { price: ExtendedRational::PosInfinity, reach_bits, verification_bits: 0 }),
        Some((_, leaf)) => {
            let name = u64::from(ceil_log2(engine.tree.leaves().len() as u128));
            let confirm = engine.tree.players() as u64 - 1;
            Ok(PriceViaReach {
                price: ExtendedRational::Finite(engine.leaf_price(leaf)?),
                reach_bits,
                verification_bits: name + confirm,
            })
        }
    }
}

/// Outcome of comparing both engines over every context of one player.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AgreementReport {
    pub player: usize,
    pub contexts: u64,
    /// (context, alternative) pairs where the engines differ.
    pub mismatches: u64,
    pub reachable_pairs: u64,
    pub protocol_bits: u64,
    /// `2^{cc(M)}`.
    pub bit_budget: u64,
    pub prices_checked: u64,
}

impl AgreementReport {
    pub fn agrees(&self) -> bool {
        self.mismatches == 0 && self.protocol_bits <= self.bit_budget
    }
}

/// Runs the brute-force engine on `f_idx` and the protocol engine on `tree`
/// for every context of `player`. When `tree` carries payments, prices are
/// compared with `payments` at the brute-force witness.
pub fn check_engines(
    f_idx: &dyn IndexedChoice,
    f: &dyn SocialChoice,
    payments: &dyn PaymentRule,
    tree: &ProtocolTree,
    grid: &Grid,
    player: usize,
) -> Result<AgreementReport> {
    let m = f.alternatives();
    let engine = ProtocolEngine::new(tree, grid, player, m)?;
    let lens = f_idx.axis_lens();
    let priced = tree.leaves().iter().all(|l| l.label.payments.is_some());
    let cc = tree.worst_case_bits();
    let mut report = AgreementReport {
        player,
        protocol_bits: engine.bits,
        bit_budget: if cc >= 63 { u64::MAX } else { 1 << cc },
        ..Default::default()
    };
    if lens.iter().enumerate().any(|(j, &n)| j != player && n == 0) {
        return Ok(report);
    }
    let mut ctx = vec![0usize; lens.len()];
    let mut profile: Vec<Valuation> = (0..lens.len()).map(|j| grid.axis(j)[0].clone()).collect();
    loop {
        report.contexts += 1;
        let brute = brute_force_row(f_idx, m, player, &mut ctx)?;
        let proto = engine.query_indices(&ctx);
        for a in 0..m {
            if brute[a] != proto[a].map(|(t, _)| t) {
                report.mismatches += 1;
                continue;
            }
            let (Some(t), Some((_, leaf))) = (brute[a], proto[a]) else { continue };
            report.reachable_pairs += 1;
            if priced {
                profile[player] = grid.axis(player)[t].clone();
                if payments.payment(f, player, &profile)? != engine.leaf_price(leaf)? {
                    report.mismatches += 1;
                }
                report.prices_checked += 1;
            }
        }
        // Next context, player's own slot fixed.
        let mut j = lens.len();
        loop {
            if j == 0 {
                return Ok(report);
            }
            j -= 1;
            if j == player {
                continue;
            }
            ctx[j] += 1;
            if ctx[j] < lens[j] {
                profile[j] = grid.axis(j)[ctx[j]].clone();
                break;
            }
            ctx[j] = 0;
            profile[j] = grid.axis(j)[0].clone();
        }
    }
}
