//! Reduction from per-outcome verifiers to an intersection problem on bit
//! vectors: one coordinate per accepting leaf.

use num_bigint::BigUint;

use crate::domain::{AlternativeId, Valuation};
use crate::error::{Error, Result};
use crate::protocol::tree::{LeafLabel, ProtocolTree};
use crate::rational::ceil_log2;

/// Label of accepting verifier leaves.
pub const ACCEPT: AlternativeId = AlternativeId(1);

/// Turns a protocol for `f` into a verifier for outcome `o`: leaves labelled
/// `o` accept, all others reject.
pub fn verifier_for(tree: &ProtocolTree, o: AlternativeId) -> ProtocolTree {
    tree.map_labels(|l| LeafLabel::alt(usize::from(l.alternative == o)))
}

/// Coordinate `(verifier index, leaf)` of the bit vectors.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Coordinate {
    pub verifier: usize,
    pub leaf: usize,
}

#[derive(Clone, Debug)]
pub struct BitvectorReduction {
    pub coordinates: Vec<Coordinate>,
    /// `bits[i][c]`: player `i`'s input lies in side `i` of coordinate `c`.
    pub bits: Vec<Vec<bool>>,
    /// The unique coordinate where every player's bit is set.
    pub intersecting: usize,
}

impl BitvectorReduction {
    pub fn len(&self) -> usize {
        self.coordinates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coordinates.is_empty()
    }

    /// Verifier whose accepting leaf was hit.
    pub fn outcome_verifier(&self) -> usize {
        self.coordinates[self.intersecting].verifier
    }

    /// `n² · ⌈log₂ l⌉²`, the symbolic cost of solving the intersection
    /// instance with the unique-intersection protocol.
    pub fn symbolic_cost(&self) -> BigUint {
        let n = BigUint::from(self.bits.len());
        let log_l = BigUint::from(ceil_log2(self.len().max(1) as u128));
        &n * &n * &log_l * &log_l
    }
}

/// Builds the bit vectors for `profile` and checks that exactly one
/// coordinate is set for everybody.
pub fn verification_to_bitvectors(verifiers: &[&ProtocolTree], profile: &[Valuation]) -> Result<BitvectorReduction> {
    let n = profile.len();
    let mut coordinates = Vec::new();
    for (verifier, tree) in verifiers.iter().enumerate() {
        if tree.players() != n {
            return Err(Error::ProfileLength { expected: tree.players(), got: n });
        }
        for (leaf, info) in tree.leaves().iter().enumerate() {
            if info.label.alternative == ACCEPT {
                coordinates.push(Coordinate { verifier, leaf });
            }
        }
    }
    let mut bits = vec![Vec::with_capacity(coordinates.len()); n];
    for c in &coordinates {
        let tree = verifiers[c.verifier];
        for (i, v) in profile.iter().enumerate() {
            bits[i].push(tree.path_contains(c.leaf, i, v)?);
        }
    }
    let hits: Vec<usize> = (0..coordinates.len()).filter(|&c| (0..n).all(|i| bits[i][c])).collect();
    if hits.len() != 1 {
        return Err(Error::ReductionIntegrity { intersecting: hits.len() });
    }
    Ok(BitvectorReduction { coordinates, bits, intersecting: hits[0] })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::tree::Node;

    fn eq_tree(o: usize) -> ProtocolTree {
        let is_o = move |v: &Valuation| v == &Valuation::int(o as i64);
        let root = Node::decision(
            0,
            is_o,
            Node::leaf(LeafLabel::alt(0)),
            Node::decision(1, is_o, Node::leaf(LeafLabel::alt(0)), Node::leaf(LeafLabel::alt(1))),
        );
        ProtocolTree::new(2, root).unwrap()
    }

    #[test]
    fn equality_verifiers_reduce_to_unique_intersection() {
        let trees: Vec<ProtocolTree> = (0..4).map(eq_tree).collect();
        let refs: Vec<&ProtocolTree> = trees.iter().collect();
        for o in 0..4 {
            let p = vec![Valuation::int(o), Valuation::int(o)];
            let r = verification_to_bitvectors(&refs, &p).unwrap();
            assert_eq!(r.len(), 4);
            assert_eq!(r.outcome_verifier(), o as usize);
            assert_eq!(r.symbolic_cost(), BigUint::from(16u32));
        }
        let off = vec![Valuation::int(0), Valuation::int(1)];
        assert!(matches!(verification_to_bitvectors(&refs, &off), Err(Error::ReductionIntegrity { intersecting: 0 })));
    }

    #[test]
    fn duplicate_verifiers_are_rejected() {
        let trees = [eq_tree(2), eq_tree(2)];
        let refs: Vec<&ProtocolTree> = trees.iter().collect();
        let p = vec![Valuation::int(2), Valuation::int(2)];
        assert!(matches!(verification_to_bitvectors(&refs, &p), Err(Error::ReductionIntegrity { intersecting: 2 })));
    }
}
