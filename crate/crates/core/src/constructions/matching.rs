//! Graphs on `k` vertices. Bob holds a graph with a matching of size
//! `m = k/3`, Charlie one without; Diane names an edge or one of three
//! special types.

use std::collections::HashMap;
use std::sync::Arc;

use crate::constructions::reach_hard::{bob_weights, charlie_weights, outcome, B, BC, N};
use crate::constructions::{int_of, zero_payment_protocol, Construction, ConstructionId, Kind};
use crate::domain::{AlternativeId, Grid, PlayerDomain, ScalarSet, SingleParamDomain, Valuation};
use crate::error::{Error, Result};
use crate::myerson::{FnChoice, ZeroPayments};
use crate::protocol::{LeafLabel, Node, ProtocolTree};
use crate::rational::Rational;

/// Vertex pairs `(u, v)`, `u < v`, in lexicographic order. Edge `e` (1-based)
/// is `edges[e - 1]`.
pub fn edges(k: u32) -> Vec<(u32, u32)> {
    (0..k).flat_map(|u| (u + 1..k).map(move |v| (u, v))).collect()
}

/// A graph as an edge mask: edge `e` sits at bit `E − e`, so the mask is the
/// binary value of the edge string.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GraphType {
    pub k: u32,
    pub mask: u64,
}

impl GraphType {
    pub fn edge_count(k: u32) -> u32 {
        k * k.saturating_sub(1) / 2
    }

    pub fn from_edges(k: u32, list: &[(u32, u32)]) -> Result<Self> {
        let all = edges(k);
        let e_total = all.len() as u32;
        let mut mask = 0;
        for &(u, v) in list {
            let (u, v) = (u.min(v), u.max(v));
            let e = all.iter().position(|&p| p == (u, v)).ok_or_else(|| {
                Error::InvalidConstruction(format!("({u}, {v}) is not an edge on {k} vertices"))
            })? as u32;
            mask |= 1 << (e_total - 1 - e);
        }
        Ok(GraphType { k, mask })
    }

    /// Does edge `e` (1-based) belong to the graph?
    pub fn has(&self, e: u32) -> bool {
        let e_total = Self::edge_count(self.k);
        (1..=e_total).contains(&e) && (self.mask >> (e_total - e)) & 1 == 1
    }

    pub fn edge_list(&self) -> Vec<(u32, u32)> {
        let all = edges(self.k);
        (1..=all.len() as u32).filter(|&e| self.has(e)).map(|e| all[e as usize - 1]).collect()
    }
}

/// Maximum matching size by branching on the lowest vertex that still has a
/// free neighbour: leave it unmatched or match it to one of them.
pub fn maximum_matching(g: &GraphType) -> u32 {
    let adj = adjacency(g);
    fn go(adj: &[u64], free: u64) -> u32 {
        let Some(v) = (0..adj.len()).find(|&v| free >> v & 1 == 1 && adj[v] & free != 0) else { return 0 };
        let rest = free & !(1 << v);
        let mut best = go(adj, rest);
        let mut nb = adj[v] & rest;
        while nb != 0 {
            let u = nb.trailing_zeros();
            nb &= nb - 1;
            best = best.max(1 + go(adj, rest & !(1 << u)));
        }
        best
    }
    go(&adj, (1u64 << g.k) - 1)
}

fn adjacency(g: &GraphType) -> Vec<u64> {
    let mut adj = vec![0u64; g.k as usize];
    for (u, v) in g.edge_list() {
        adj[u as usize] |= 1 << v;
        adj[v as usize] |= 1 << u;
    }
    adj
}

/// Does some set of `m` edges of `g` have pairwise distinct endpoints? Checks
/// every `m`-subset of the edge list.
pub fn has_matching_brute_force(g: &GraphType, m: usize) -> bool {
    fn go(list: &[(u32, u32)], from: usize, left: usize, used: u64) -> bool {
        if left == 0 {
            return true;
        }
        (from..list.len()).any(|i| {
            let (u, v) = list[i];
            let bits = (1 << u) | (1 << v);
            used & bits == 0 && go(list, i + 1, left - 1, used | bits)
        })
    }
    go(&g.edge_list(), 0, m, 0)
}

/// The sides `X` (graphs with an `m`-matching) and `Y` (graphs without), in
/// increasing mask order.
#[derive(Clone, Debug)]
pub struct Sides {
    pub k: u32,
    pub m: u32,
    pub x: Vec<u64>,
    pub y: Vec<u64>,
}

pub fn sides(k: u32) -> Result<Sides> {
    if k == 0 || k % 3 != 0 || k > 6 {
        return Err(Error::InvalidConstruction(format!("match needs k divisible by 3 and at most 6, got {k}")));
    }
    let m = k / 3;
    let e_total = GraphType::edge_count(k);
    let (mut x, mut y) = (Vec::new(), Vec::new());
    for mask in 0..1u64 << e_total {
        if maximum_matching(&GraphType { k, mask }) >= m {
            x.push(mask);
        } else {
            y.push(mask);
        }
    }
    Ok(Sides { k, m, x, y })
}

/// Everything needed to evaluate the function on type indices as well as on
/// valuations.
#[derive(Clone, Debug)]
pub struct Match {
    pub sides: Arc<Sides>,
    /// `binom(k, 2)`.
    pub edge_total: u32,
}

impl Match {
    pub fn new(k: u32) -> Result<Self> {
        let sides = sides(k)?;
        Ok(Match { edge_total: GraphType::edge_count(k), sides: Arc::new(sides) })
    }

    pub fn k(&self) -> u32 {
        self.sides.k
    }

    /// Diane's types are `1..=E+3`.
    pub fn diane_types(&self) -> u64 {
        u64::from(self.edge_total) + 3
    }

    /// `f(x, y, e)` on masks.
    pub fn evaluate(&self, x: u64, y: u64, e: u64) -> AlternativeId {
        let total = u64::from(self.edge_total);
        match e {
            _ if e == total + 1 => BC,
            _ if e == total + 2 => N,
            _ if e == total + 3 => B,
            _ => {
                let bit = |g: u64| (g >> (total - e)) & 1 == 1;
                outcome(bit(x), bit(y))
            }
        }
    }

    fn mask_domain(masks: &[u64], weights: Vec<Rational>) -> Result<SingleParamDomain> {
        SingleParamDomain::new(weights, ScalarSet::finite(masks.iter().map(|&m| Rational::from_int(m as i64)).collect())?)
    }

    pub fn domains(&self) -> Result<Vec<PlayerDomain>> {
        let diane = (1..=self.diane_types()).map(|e| Rational::from_int(e as i64)).collect();
        Ok(vec![
            PlayerDomain::Single(Self::mask_domain(&self.sides.x, bob_weights())?),
            PlayerDomain::Single(Self::mask_domain(&self.sides.y, charlie_weights())?),
            PlayerDomain::Single(SingleParamDomain::constant(4, Rational::one(), ScalarSet::finite(diane)?)?),
        ])
    }

    pub fn choice(&self) -> Result<FnChoice> {
        let me = self.clone();
        Ok(FnChoice::new(&format!("match:k={}", self.k()), 4, self.domains()?, move |p| {
            Ok(me.evaluate(int_of(&p[0])?, int_of(&p[1])?, int_of(&p[2])?))
        }))
    }

    /// Diane sends `e`; for an edge, Bob and then Charlie say whether they
    /// hold it.
    pub fn protocol(&self) -> Result<ProtocolTree> {
        let total = u64::from(self.edge_total);
        let mut children = Vec::new();
        for e in 1..=total {
            let has = move |v: &Valuation| int_of(v).is_ok_and(|g| (g >> (total - e)) & 1 == 1);
            let charlie = |bb: bool| {
                Node::decision(
                    1,
                    has,
                    Node::leaf(LeafLabel::alt(outcome(bb, false).0)),
                    Node::leaf(LeafLabel::alt(outcome(bb, true).0)),
                )
            };
            children.push(Node::decision(0, has, charlie(false), charlie(true)));
        }
        for special in [BC, N, B] {
            children.push(Node::leaf(LeafLabel::alt(special.0)));
        }
        ProtocolTree::new(3, Node::message(2, |v| Ok(int_of(v)? as usize - 1), children))
    }

    pub fn grid(&self) -> Grid {
        let axis = |m: &[u64]| m.iter().map(|&g| Valuation::int(g as i64)).collect();
        Grid::new(vec![
            axis(&self.sides.x),
            axis(&self.sides.y),
            (1..=self.diane_types()).map(|e| Valuation::int(e as i64)).collect(),
        ])
    }

    /// Position of each mask in `X` and `Y`.
    pub fn index_maps(&self) -> (HashMap<u64, usize>, HashMap<u64, usize>) {
        let index = |m: &[u64]| m.iter().enumerate().map(|(i, &g)| (g, i)).collect();
        (index(&self.sides.x), index(&self.sides.y))
    }
}

pub fn build(k: u32) -> Result<Construction> {
    let id = ConstructionId::new(Kind::Match, k)?;
    let m = Match::new(k)?;
    let protocol = m.protocol()?;
    Ok(Construction {
        id,
        f: Arc::new(m.choice()?),
        mechanism_protocol: Some(zero_payment_protocol(&protocol, 3)),
        protocol,
        grid: m.grid(),
        payments: Arc::new(ZeroPayments),
    })
}
