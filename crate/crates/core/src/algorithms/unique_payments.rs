//! Prices of multi-parameter functions with unique payments, certified by a
//! short list of protocol leaves.

use crate::domain::{AlternativeId, Grid, Valuation};
use crate::error::{Error, Result};
use crate::myerson::SocialChoice;
use crate::protocol::ProtocolTree;
use crate::rational::{ExtendedRational, Rational};

/// `inf{v(a) − v(b) : f(v, v₋ᵢ) = a}` over the types in `axis`; `+∞` when
/// `a` is unreachable.
pub fn delta_ab(
    f: &dyn SocialChoice,
    player: usize,
    a: AlternativeId,
    b: AlternativeId,
    context: &[Valuation],
    axis: &[Valuation],
) -> Result<ExtendedRational> {
    let dom = f.domain(player);
    let mut p = context.to_vec();
    let mut best = ExtendedRational::PosInfinity;
    for v in axis {
        p[player] = v.clone();
        if f.evaluate(&p)? == a {
            let d = ExtendedRational::Finite(dom.value(v, a) - dom.value(v, b));
            if d < best {
                best = d;
            }
        }
    }
    Ok(best)
}

/// The only normalized menu satisfying `p_a − p_b ≤ δ_ab` on the reachable
/// alternatives, found with shortest paths over the difference constraints.
/// Unreachable alternatives get `+∞`.
pub fn normalized_menu(
    deltas: &[Vec<ExtendedRational>],
    reachable: &[bool],
    zero: AlternativeId,
) -> Result<Vec<ExtendedRational>> {
    let nodes: Vec<usize> = (0..reachable.len()).filter(|&a| reachable[a]).collect();
    let n = nodes.len();
    let pos = |a: usize| nodes.iter().position(|&x| x == a);
    let Some(z) = pos(zero.0) else {
        return Err(Error::Infeasible(format!("zero alternative {} is unreachable", zero.0)));
    };
    // dist[b][a] bounds p_a − p_b from above.
    let mut dist = vec![vec![ExtendedRational::PosInfinity; n]; n];
    for (x, &a) in nodes.iter().enumerate() {
        for (y, &b) in nodes.iter().enumerate() {
            dist[y][x] = if x == y { ExtendedRational::Finite(Rational::zero()) } else { deltas[a][b].clone() };
        }
    }
    for k in 0..n {
        for s in 0..n {
            for t in 0..n {
                if let Some(via) = dist[s][k].checked_add(&dist[k][t]) {
                    if via < dist[s][t] {
                        dist[s][t] = via;
                    }
                }
            }
        }
    }
    if (0..n).any(|x| dist[x][x] < ExtendedRational::Finite(Rational::zero())) {
        return Err(Error::Infeasible("negative cycle in the difference constraints".into()));
    }
    let mut menu = vec![ExtendedRational::PosInfinity; reachable.len()];
    for (x, &a) in nodes.iter().enumerate() {
        let hi = dist[z][x].clone();
        let lo = dist[x][z].negate();
        if hi != lo || !hi.is_finite() {
            return Err(Error::NonUniquePayments { alternative: a, lo: lo.to_string(), hi: hi.to_string() });
        }
        menu[a] = hi;
    }
    Ok(menu)
}

/// Everything public about one context `v₋ᵢ`.
#[derive(Clone, Debug)]
pub struct ContextData {
    pub context: Vec<Valuation>,
    /// `f(v, v₋ᵢ)` for every type on the axis.
    pub outcomes: Vec<AlternativeId>,
    pub zero_alternative: AlternativeId,
    pub reachable: Vec<bool>,
    /// `deltas[a][b] = δ_ab(v₋ᵢ)`.
    pub deltas: Vec<Vec<ExtendedRational>>,
    pub menu: Vec<ExtendedRational>,
}

/// Prover output: the witness types and the leaves they reach.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub types: Vec<Valuation>,
    pub leaves: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Accept(Rational),
    /// Index (1–5) of the first violated condition.
    Reject(u8),
}

/// A player of an enumerable instance together with the public protocol.
pub struct UpInstance<'a> {
    pub f: &'a dyn SocialChoice,
    pub tree: &'a ProtocolTree,
    pub player: usize,
    pub axis: Vec<Valuation>,
    pub zero_type: Valuation,
    pub contexts: Vec<ContextData>,
    /// `Im δ_ab`, sorted.
    pub images: Vec<Vec<Vec<ExtendedRational>>>,
    /// `in_rest[leaf][c]`: context `c` lies in the leaf's `−i` sides.
    in_rest: Vec<Vec<bool>>,
    /// The leaf's side of player `i` meets the axis.
    own_side: Vec<bool>,
    /// The zero type lies in the leaf's side of player `i`.
    zero_side: Vec<bool>,
}

impl<'a> UpInstance<'a> {
    /// Precomputes δ tables and menus for every context of `grid`; fails if
    /// some context does not pin down its normalized menu.
    pub fn new(f: &'a dyn SocialChoice, tree: &'a ProtocolTree, player: usize, grid: &Grid) -> Result<Self> {
        let axis = grid.axis(player).to_vec();
        let dom = f.domain(player);
        let zero_type = dom
            .zero_valuation()
            .ok_or_else(|| Error::InvalidDomain(format!("player {player} has no zero type")))?;
        if !axis.contains(&zero_type) {
            return Err(Error::InvalidDomain("zero type is not on the axis".into()));
        }
        let m = f.alternatives();
        let mut contexts = Vec::new();
        grid.for_each_without(player, "unique-payments contexts", |ctx| {
            let mut outcomes = Vec::with_capacity(axis.len());
            let mut deltas = vec![vec![ExtendedRational::PosInfinity; m]; m];
            let mut reachable = vec![false; m];
            for v in &axis {
                ctx[player] = v.clone();
                let a = f.evaluate(ctx)?;
                outcomes.push(a);
                reachable[a.0] = true;
                for b in 0..m {
                    let d = ExtendedRational::Finite(dom.value(v, a) - dom.value(v, AlternativeId(b)));
                    if d < deltas[a.0][b] {
                        deltas[a.0][b] = d;
                    }
                }
            }
            ctx[player] = zero_type.clone();
            let zero_alternative = f.evaluate(ctx)?;
            let menu = normalized_menu(&deltas, &reachable, zero_alternative)?;
            contexts.push(ContextData { context: ctx.clone(), outcomes, zero_alternative, reachable, deltas, menu });
            Ok(true)
        })?;
        let mut images = vec![vec![Vec::new(); m]; m];
        for (a, row) in images.iter_mut().enumerate() {
            for (b, img) in row.iter_mut().enumerate() {
                let mut all: Vec<ExtendedRational> = contexts.iter().map(|c| c.deltas[a][b].clone()).collect();
                all.sort();
                all.dedup();
                *img = all;
            }
        }
        let leaves = tree.leaves().len();
        let mut in_rest = vec![vec![true; contexts.len()]; leaves];
        let mut own_side = vec![false; leaves];
        let mut zero_side = vec![false; leaves];
        for leaf in 0..leaves {
            for (c, data) in contexts.iter().enumerate() {
                for j in (0..f.players()).filter(|&j| j != player) {
                    if !tree.path_contains(leaf, j, &data.context[j])? {
                        in_rest[leaf][c] = false;
                        break;
                    }
                }
            }
            for v in &axis {
                if tree.path_contains(leaf, player, v)? {
                    own_side[leaf] = true;
                    break;
                }
            }
            zero_side[leaf] = tree.path_contains(leaf, player, &zero_type)?;
        }
        Ok(UpInstance { f, tree, player, axis, zero_type, contexts, images, in_rest, own_side, zero_side })
    }

    /// `|A|² + |A| + 1`.
    pub fn witness_bound(&self) -> usize {
        let m = self.f.alternatives();
        m * m + m + 1
    }

    /// Honest prover: the zero type, the least type reaching each reachable
    /// alternative, and for each ordered pair whose `δ_ab` is not the top of
    /// `Im δ_ab` the least type `v` with `f(v) = a` and
    /// `v(a) − v(b) < δ_{j+1}`.
    pub fn prove(&self, ctx: usize, a_star: AlternativeId) -> Result<Witness> {
        let data = &self.contexts[ctx];
        if !data.reachable.get(a_star.0).copied().unwrap_or(false) {
            return Err(Error::Infeasible(format!("alternative {} is unreachable", a_star.0)));
        }
        let dom = self.f.domain(self.player);
        let m = self.f.alternatives();
        let least = |pred: &dyn Fn(&Valuation, AlternativeId) -> bool| -> Option<Valuation> {
            self.axis.iter().zip(&data.outcomes).filter(|(v, &a)| pred(v, a)).map(|(v, _)| v.clone()).min()
        };
        let mut types = vec![self.zero_type.clone()];
        for a in (0..m).filter(|&a| data.reachable[a]) {
            types.extend(least(&|_, o| o.0 == a));
        }
        for a in (0..m).filter(|&a| data.reachable[a]) {
            for b in (0..m).filter(|&b| b != a && data.reachable[b]) {
                let img = &self.images[a][b];
                let j = img.binary_search(&data.deltas[a][b]).expect("delta lies in its image");
                let Some(next) = img.get(j + 1) else { continue };
                let pick = least(&|v, o| {
                    o.0 == a
                        && &ExtendedRational::Finite(dom.value(v, o) - dom.value(v, AlternativeId(b))) < next
                });
                let v = pick.ok_or_else(|| Error::SearchInconsistency(format!("no type for pair ({a}, {b})")))?;
                types.push(v);
            }
        }
        let mut uniq: Vec<Valuation> = Vec::with_capacity(types.len());
        for t in types {
            if !uniq.contains(&t) {
                uniq.push(t);
            }
        }
        let mut p = data.context.clone();
        let mut leaves = Vec::with_capacity(uniq.len());
        for t in &uniq {
            p[self.player] = t.clone();
            leaves.push(self.tree.leaf_of(&p)?);
        }
        Ok(Witness { types: uniq, leaves })
    }

    /// Checks conditions 1–5 for the leaves `leaves` at context `ctx` and
    /// outputs the certified price of `a_star`.
    pub fn verify(&self, ctx: usize, a_star: AlternativeId, leaves: &[usize]) -> Verdict {
        // 1: every leaf is consistent with the other players' types and can
        // be reached at all.
        if leaves.iter().any(|&l| l >= self.in_rest.len() || !self.in_rest[l][ctx] || !self.own_side[l]) {
            return Verdict::Reject(1);
        }
        // 2: some context agrees with every leaf.
        let cands: Vec<usize> =
            (0..self.contexts.len()).filter(|&c| leaves.iter().all(|&l| self.in_rest[l][c])).collect();
        if cands.is_empty() {
            return Verdict::Reject(2);
        }
        // 3: the zero type is covered.
        if !leaves.iter().any(|&l| self.zero_side[l]) {
            return Verdict::Reject(3);
        }
        // 4: some leaf outputs a*.
        if !leaves.iter().any(|&l| self.tree.leaf(l).label.alternative == a_star) {
            return Verdict::Reject(4);
        }
        // 5: every candidate context charges the same price for a*.
        let price = &self.contexts[cands[0]].menu[a_star.0];
        if !price.is_finite() || cands.iter().any(|&c| &self.contexts[c].menu[a_star.0] != price) {
            return Verdict::Reject(5);
        }
        Verdict::Accept(price.finite().expect("finite").clone())
    }

    /// Every leaf set of size at most the witness bound, checked at every
    /// (context, unreachable alternative). Repetitions and order do not
    /// affect the verdict, so sets cover all leaf sequences.
    pub fn scan_unreachable(&self) -> Result<ScanReport> {
        let leaves = self.tree.leaves().len();
        if leaves > 20 {
            return Err(Error::ScaleExceeded { what: "witness scan".into(), count: format!("2^{leaves}"), cap: 1 << 20 });
        }
        let bound = self.witness_bound();
        let mut report = ScanReport::default();
        for (c, data) in self.contexts.iter().enumerate() {
            for a in (0..data.reachable.len()).filter(|&a| !data.reachable[a]) {
                report.instances += 1;
                for mask in 1u32..1 << leaves {
                    if mask.count_ones() as usize > bound {
                        continue;
                    }
                    let set: Vec<usize> = (0..leaves).filter(|&l| mask >> l & 1 == 1).collect();
                    report.witnesses += 1;
                    if matches!(self.verify(c, AlternativeId(a), &set), Verdict::Accept(_)) {
                        report.accepted += 1;
                    }
                }
            }
        }
        Ok(report)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ScanReport {
    /// (context, unreachable alternative) pairs.
    pub instances: u64,
    pub witnesses: u64,
    pub accepted: u64,
}
