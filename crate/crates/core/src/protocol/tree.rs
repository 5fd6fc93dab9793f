//! Protocol trees, transcripts and the exhaustive leaf checks.

use std::fmt;
use std::io::Write;
use std::sync::Arc;

use crate::domain::{AlternativeId, Grid, Valuation};
use crate::error::{Error, Result};
use crate::myerson::{validate_profile, SocialChoice};
use crate::rational::{ceil_log2, Rational};

/// What a node's owner sends: an index into the node's children.
pub type MessageFn = Arc<dyn Fn(&Valuation) -> Result<usize> + Send + Sync>;

/// Declared leaf rectangle: `(player, v) ↦ v ∈ L_player`.
pub type RectangleFn = Arc<dyn Fn(usize, &Valuation) -> bool + Send + Sync>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LeafLabel {
    pub alternative: AlternativeId,
    /// Payments of every player, for protocols of mechanisms.
    pub payments: Option<Vec<Rational>>,
}

impl LeafLabel {
    pub fn alt(a: usize) -> Self {
        LeafLabel { alternative: AlternativeId(a), payments: None }
    }

    pub fn with_payments(a: usize, payments: Vec<Rational>) -> Self {
        LeafLabel { alternative: AlternativeId(a), payments: Some(payments) }
    }
}

/// Builder form of a protocol tree.
pub enum Node {
    Leaf { label: LeafLabel, rectangle: Option<RectangleFn> },
    Message { owner: usize, message: MessageFn, children: Vec<Node> },
}

impl Node {
    pub fn leaf(label: LeafLabel) -> Node {
        Node::Leaf { label, rectangle: None }
    }

    pub fn leaf_with_rectangle(label: LeafLabel, rectangle: RectangleFn) -> Node {
        Node::Leaf { label, rectangle: Some(rectangle) }
    }

    /// Multi-way node: `owner` sends `message(v)`, an index into `children`.
    pub fn message<F>(owner: usize, message: F, children: Vec<Node>) -> Node
    where
        F: Fn(&Valuation) -> Result<usize> + Send + Sync + 'static,
    {
        Node::Message { owner, message: Arc::new(message), children }
    }

    /// One decision bit: right child when `predicate` holds.
    pub fn decision<F>(owner: usize, predicate: F, left: Node, right: Node) -> Node
    where
        F: Fn(&Valuation) -> bool + Send + Sync + 'static,
    {
        Node::message(owner, move |v| Ok(usize::from(predicate(v))), vec![left, right])
    }
}

#[derive(Clone)]
enum Flat {
    Leaf(usize),
    Internal { owner: usize, message: MessageFn, children: Vec<usize>, bits: u32 },
}

/// A leaf together with its root path `(node, choice)`.
#[derive(Clone)]
pub struct LeafInfo {
    pub label: LeafLabel,
    pub path: Vec<(usize, usize)>,
    rectangle: Option<RectangleFn>,
}

impl LeafInfo {
    pub fn has_declared_rectangle(&self) -> bool {
        self.rectangle.is_some()
    }
}

impl fmt::Debug for LeafInfo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LeafInfo").field("label", &self.label).field("path", &self.path).finish()
    }
}

/// One message of a run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Event {
    pub player: usize,
    pub message: usize,
    pub bits: u32,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Transcript {
    pub events: Vec<Event>,
    pub total_bits: u64,
}

impl Transcript {
    pub fn push(&mut self, player: usize, message: usize, bits: u32) {
        self.events.push(Event { player, message, bits });
        self.total_bits += u64::from(bits);
    }

    pub fn append(&mut self, other: &Transcript) {
        for e in &other.events {
            self.push(e.player, e.message, e.bits);
        }
    }

    /// CSV with columns `step, player, message, bits, cumulative_bits`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["step", "player", "message", "bits", "cumulative_bits"])?;
        let mut cumulative = 0u64;
        for (step, e) in self.events.iter().enumerate() {
            cumulative += u64::from(e.bits);
            w.write_record([
                step.to_string(),
                e.player.to_string(),
                e.message.to_string(),
                e.bits.to_string(),
                cumulative.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Result of a run: the leaf reached and the transcript.
#[derive(Clone, Debug)]
pub struct Run {
    pub leaf: usize,
    pub label: LeafLabel,
    pub transcript: Transcript,
}

/// An immutable protocol tree in arena form.
#[derive(Clone)]
pub struct ProtocolTree {
    players: usize,
    nodes: Vec<Flat>,
    leaves: Vec<LeafInfo>,
}

impl fmt::Debug for ProtocolTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProtocolTree")
            .field("players", &self.players)
            .field("nodes", &self.nodes.len())
            .field("leaves", &self.leaves.len())
            .finish()
    }
}

impl ProtocolTree {
    pub fn new(players: usize, root: Node) -> Result<Self> {
        let mut tree = ProtocolTree { players, nodes: Vec::new(), leaves: Vec::new() };
        let mut path = Vec::new();
        tree.flatten(root, &mut path)?;
        Ok(tree)
    }

    fn flatten(&mut self, node: Node, path: &mut Vec<(usize, usize)>) -> Result<usize> {
        match node {
            Node::Leaf { label, rectangle } => {
                let id = self.nodes.len();
                self.nodes.push(Flat::Leaf(self.leaves.len()));
                self.leaves.push(LeafInfo { label, path: path.clone(), rectangle });
                Ok(id)
            }
            Node::Message { owner, message, children } => {
                if owner >= self.players {
                    return Err(Error::MalformedTree(format!("node owned by player {owner} of {}", self.players)));
                }
                if children.len() < 2 {
                    return Err(Error::MalformedTree(format!("internal node with {} children", children.len())));
                }
                let id = self.nodes.len();
                let bits = ceil_log2(children.len() as u128);
                self.nodes.push(Flat::Internal { owner, message, children: Vec::new(), bits });
                let mut ids = Vec::with_capacity(children.len());
                for (choice, child) in children.into_iter().enumerate() {
                    path.push((id, choice));
                    ids.push(self.flatten(child, path)?);
                    path.pop();
                }
                if let Flat::Internal { children, .. } = &mut self.nodes[id] {
                    *children = ids;
                }
                Ok(id)
            }
        }
    }

    pub fn players(&self) -> usize {
        self.players
    }

    pub fn leaves(&self) -> &[LeafInfo] {
        &self.leaves
    }

    pub fn leaf(&self, id: usize) -> &LeafInfo {
        &self.leaves[id]
    }

    /// Internal nodes as `(node id, owner, bits)`, in arena (pre-order) order.
    pub fn internal_nodes(&self) -> Vec<(usize, usize, u32)> {
        self.nodes
            .iter()
            .enumerate()
            .filter_map(|(id, n)| match n {
                Flat::Internal { owner, bits, .. } => Some((id, *owner, *bits)),
                Flat::Leaf(_) => None,
            })
            .collect()
    }

    /// Message of node `node` on input `v` of its owner, range-checked.
    pub fn node_message(&self, node: usize, v: &Valuation) -> Result<usize> {
        match &self.nodes[node] {
            Flat::Internal { message, children, .. } => {
                let m = message(v)?;
                if m >= children.len() {
                    return Err(Error::MalformedTree(format!(
                        "node {node} sent {m} but has {} children",
                        children.len()
                    )));
                }
                Ok(m)
            }
            Flat::Leaf(_) => Err(Error::MalformedTree(format!("node {node} is a leaf"))),
        }
    }

    pub fn node_owner(&self, node: usize) -> Option<usize> {
        match &self.nodes[node] {
            Flat::Internal { owner, .. } => Some(*owner),
            Flat::Leaf(_) => None,
        }
    }

    pub fn node_bits(&self, node: usize) -> u32 {
        match &self.nodes[node] {
            Flat::Internal { bits, .. } => *bits,
            Flat::Leaf(_) => 0,
        }
    }

    /// Executes the tree without domain validation.
    pub fn run(&self, profile: &[Valuation]) -> Result<Run> {
        if profile.len() != self.players {
            return Err(Error::ProfileLength { expected: self.players, got: profile.len() });
        }
        let mut transcript = Transcript::default();
        let mut at = 0usize;
        loop {
            match &self.nodes[at] {
                Flat::Leaf(leaf) => {
                    return Ok(Run { leaf: *leaf, label: self.leaves[*leaf].label.clone(), transcript });
                }
                Flat::Internal { owner, children, bits, .. } => {
                    let m = self.node_message(at, &profile[*owner])?;
                    transcript.push(*owner, m, *bits);
                    at = children[m];
                }
            }
        }
    }

    /// Leaf reached by `profile`, without building a transcript.
    pub fn leaf_of(&self, profile: &[Valuation]) -> Result<usize> {
        let mut at = 0usize;
        loop {
            match &self.nodes[at] {
                Flat::Leaf(leaf) => return Ok(*leaf),
                Flat::Internal { owner, children, .. } => {
                    at = children[self.node_message(at, &profile[*owner])?];
                }
            }
        }
    }

    /// Is `v` in side `player` of the rectangle induced by the leaf's path?
    pub fn path_contains(&self, leaf: usize, player: usize, v: &Valuation) -> Result<bool> {
        for &(node, choice) in &self.leaves[leaf].path {
            if self.node_owner(node) == Some(player) && self.node_message(node, v)? != choice {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Worst-case transcript length.
    pub fn worst_case_bits(&self) -> u64 {
        self.leaves
            .iter()
            .map(|l| l.path.iter().map(|&(n, _)| u64::from(self.node_bits(n))).sum::<u64>())
            .max()
            .unwrap_or(0)
    }

    pub fn depth(&self) -> usize {
        self.leaves.iter().map(|l| l.path.len()).max().unwrap_or(0)
    }

    pub fn max_node_bits(&self) -> u32 {
        self.internal_nodes().iter().map(|&(_, _, b)| b).max().unwrap_or(0)
    }

    /// Same tree with every leaf label rewritten.
    pub fn map_labels<F>(&self, mut relabel: F) -> ProtocolTree
    where
        F: FnMut(&LeafLabel) -> LeafLabel,
    {
        let nodes = self
            .nodes
            .iter()
            .map(|n| match n {
                Flat::Leaf(l) => Flat::Leaf(*l),
                Flat::Internal { owner, message, children, bits } => Flat::Internal {
                    owner: *owner,
                    message: message.clone(),
                    children: children.clone(),
                    bits: *bits,
                },
            })
            .collect();
        let leaves = self
            .leaves
            .iter()
            .map(|l| LeafInfo { label: relabel(&l.label), path: l.path.clone(), rectangle: l.rectangle.clone() })
            .collect();
        ProtocolTree { players: self.players, nodes, leaves }
    }
}

/// Runs the tree after validating the profile against `f`'s domains.
pub fn run_protocol(tree: &ProtocolTree, f: &dyn SocialChoice, profile: &[Valuation]) -> Result<(LeafLabel, Transcript)> {
    validate_profile(f, profile)?;
    let run = tree.run(profile)?;
    Ok((run.label, run.transcript))
}

/// Exhaustive mixing-property check: every profile reaches a leaf labelled
/// `f(profile)` and lying in its declared rectangle, and every declared
/// rectangle equals the rectangle its path induces on the grid.
pub fn verify_monochromatic(tree: &ProtocolTree, f: &dyn SocialChoice, grid: &Grid) -> Result<bool> {
    let mut ok = true;
    grid.for_each("monochromatic check", |profile| {
        let leaf = tree.leaf_of(profile)?;
        let info = tree.leaf(leaf);
        if info.label.alternative != f.evaluate(profile)? {
            ok = false;
            return Ok(false);
        }
        if let Some(rect) = &info.rectangle {
            if !profile.iter().enumerate().all(|(j, v)| rect(j, v)) {
                ok = false;
                return Ok(false);
            }
        }
        Ok(true)
    })?;
    if !ok {
        return Ok(false);
    }
    for (id, info) in tree.leaves().iter().enumerate() {
        let Some(rect) = &info.rectangle else { continue };
        for player in 0..tree.players() {
            for v in grid.axis(player) {
                if rect(player, v) != tree.path_contains(id, player, v)? {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Agreed representative profile of each leaf.
#[derive(Clone, Debug)]
pub struct Representatives {
    /// `None` for leaves no grid profile reaches.
    pub profiles: Vec<Option<Vec<Valuation>>>,
}

impl Representatives {
    pub fn get(&self, leaf: usize) -> Option<&[Valuation]> {
        self.profiles[leaf].as_deref()
    }

    pub fn unreachable(&self) -> Vec<usize> {
        (0..self.profiles.len()).filter(|&l| self.profiles[l].is_none()).collect()
    }
}

/// Lexicographically least grid profile of every leaf. Leaves are product
/// sets, so this is the per-player least member of each side.
pub fn leaf_representatives(tree: &ProtocolTree, grid: &Grid) -> Result<Representatives> {
    let work: u64 = grid.axes().iter().map(|a| a.len() as u64).sum::<u64>() * tree.leaves().len() as u64;
    grid.ensure_within(&num_bigint::BigUint::from(work), "leaf representatives")?;
    let mut profiles = Vec::with_capacity(tree.leaves().len());
    for leaf in 0..tree.leaves().len() {
        let mut rep = Vec::with_capacity(tree.players());
        for player in 0..tree.players() {
            let mut hit = None;
            for v in grid.axis(player) {
                if tree.path_contains(leaf, player, v)? {
                    hit = Some(v.clone());
                    break;
                }
            }
            match hit {
                Some(v) => rep.push(v),
                None => break,
            }
        }
        profiles.push((rep.len() == tree.players()).then_some(rep));
    }
    Ok(Representatives { profiles })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{PlayerDomain, ScalarSet, SingleParamDomain};
    use crate::myerson::FnChoice;

    fn bit_domain() -> PlayerDomain {
        PlayerDomain::Single(
            SingleParamDomain::constant(2, Rational::one(), ScalarSet::range(2).unwrap()).unwrap(),
        )
    }

    fn and_choice() -> FnChoice {
        FnChoice::new("and", 2, vec![bit_domain(), bit_domain()], |p| {
            let one = |v: &Valuation| v.scalar().unwrap().is_integer() && !v.scalar().unwrap().is_zero();
            Ok(AlternativeId(usize::from(one(&p[0]) && one(&p[1]))))
        })
    }

    fn is_one(v: &Valuation) -> bool {
        !v.scalar().unwrap().is_zero()
    }

    fn and_tree(mislabel: bool) -> ProtocolTree {
        let root = Node::decision(
            0,
            is_one,
            Node::leaf(LeafLabel::alt(0)),
            Node::decision(
                1,
                is_one,
                Node::leaf(LeafLabel::alt(usize::from(mislabel))),
                Node::leaf(LeafLabel::alt(1)),
            ),
        );
        ProtocolTree::new(2, root).unwrap()
    }

    fn bits_grid() -> Grid {
        Grid::new(vec![vec![Valuation::int(0), Valuation::int(1)]; 2])
    }

    #[test]
    fn constant_tree_costs_nothing() {
        let t = ProtocolTree::new(2, Node::leaf(LeafLabel::alt(0))).unwrap();
        let run = t.run(&[Valuation::int(1), Valuation::int(0)]).unwrap();
        assert_eq!(run.label.alternative, AlternativeId(0));
        assert_eq!(run.transcript.total_bits, 0);
        let reps = leaf_representatives(&t, &bits_grid()).unwrap();
        assert_eq!(reps.get(0).unwrap(), &[Valuation::int(0), Valuation::int(0)]);
    }

    #[test]
    fn and_protocol_runs_and_checks() {
        let f = and_choice();
        let t = and_tree(false);
        let (label, tr) = run_protocol(&t, &f, &[Valuation::int(1), Valuation::int(1)]).unwrap();
        assert_eq!(label.alternative, AlternativeId(1));
        assert_eq!(tr.total_bits, 2);
        assert!(verify_monochromatic(&t, &f, &bits_grid()).unwrap());
        assert!(!verify_monochromatic(&and_tree(true), &f, &bits_grid()).unwrap());
        assert!(run_protocol(&t, &f, &[Valuation::int(2), Valuation::int(1)]).is_err());
        assert_eq!(t.worst_case_bits(), 2);
    }

    #[test]
    fn malformed_trees_are_rejected() {
        let unary = Node::message(0, |_| Ok(0), vec![Node::leaf(LeafLabel::alt(0))]);
        assert!(matches!(ProtocolTree::new(1, unary), Err(Error::MalformedTree(_))));
        let wrong_owner = Node::decision(3, |_| true, Node::leaf(LeafLabel::alt(0)), Node::leaf(LeafLabel::alt(0)));
        assert!(ProtocolTree::new(2, wrong_owner).is_err());
        let overflow = Node::message(0, |_| Ok(7), vec![Node::leaf(LeafLabel::alt(0)), Node::leaf(LeafLabel::alt(1))]);
        let t = ProtocolTree::new(1, overflow).unwrap();
        assert!(matches!(t.run(&[Valuation::int(0)]), Err(Error::MalformedTree(_))));
    }

    #[test]
    fn declared_rectangles_are_checked() {
        let f = and_choice();
        let honest: RectangleFn = Arc::new(|_, v| is_one(v));
        let lying: RectangleFn = Arc::new(|_, _| true);
        let build = |rect: RectangleFn| {
            let root = Node::decision(
                0,
                is_one,
                Node::leaf(LeafLabel::alt(0)),
                Node::decision(1, is_one, Node::leaf(LeafLabel::alt(0)), Node::leaf_with_rectangle(LeafLabel::alt(1), rect)),
            );
            ProtocolTree::new(2, root).unwrap()
        };
        assert!(verify_monochromatic(&build(honest), &f, &bits_grid()).unwrap());
        assert!(!verify_monochromatic(&build(lying), &f, &bits_grid()).unwrap());
    }

    #[test]
    fn transcript_csv() {
        let t = and_tree(false);
        let run = t.run(&[Valuation::int(1), Valuation::int(0)]).unwrap();
        let mut out = Vec::new();
        run.transcript.write_csv(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text, "step,player,message,bits,cumulative_bits\n0,0,1,1,1\n1,1,0,1,2\n");
    }
}
