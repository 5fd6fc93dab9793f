//! Builders for the bundled social choice functions, their protocols and the
//! grids on which their exhaustive checks are exact.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::domain::{Grid, ScalarSet, Valuation};
use crate::error::{Error, Result};
use crate::myerson::{Mechanism, PaymentRule, SocialChoice};
use crate::protocol::{LeafLabel, ProtocolTree};
use crate::rational::Rational;

pub mod compositions;
pub mod disj;
pub mod matching;
pub mod multiunit;
pub mod proof1;
pub mod proof2;
pub mod reach_hard;
pub mod toys;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Kind {
    Proof1,
    Proof2,
    Multiunit,
    Disj,
    Reach,
    Match,
}

impl Kind {
    pub const ALL: [Kind; 6] = [Kind::Proof1, Kind::Proof2, Kind::Multiunit, Kind::Disj, Kind::Reach, Kind::Match];

    pub fn name(self) -> &'static str {
        match self {
            Kind::Proof1 => "proof1",
            Kind::Proof2 => "proof2",
            Kind::Multiunit => "multiunit",
            Kind::Disj => "disj",
            Kind::Reach => "reach",
            Kind::Match => "match",
        }
    }

    /// Values of `k` the builder accepts.
    pub fn supports(self, k: u32) -> bool {
        match self {
            Kind::Proof1 => (1..=3).contains(&k),
            Kind::Proof2 => (1..=12).contains(&k),
            Kind::Multiunit => (1..=2).contains(&k),
            Kind::Disj => (1..=10).contains(&k),
            Kind::Reach => (1..=10).contains(&k),
            Kind::Match => k == 3 || k == 6,
        }
    }

    /// The `k` used when none is given.
    pub fn default_k(self) -> u32 {
        match self {
            Kind::Proof1 => 2,
            Kind::Proof2 | Kind::Reach => 3,
            Kind::Multiunit => 1,
            Kind::Disj => 4,
            Kind::Match => 3,
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Kind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Kind::ALL
            .into_iter()
            .find(|k| k.name() == s.trim())
            .ok_or_else(|| Error::ParseConstructionId(s.to_string()))
    }
}

/// Stable textual id such as `proof1:k=2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ConstructionId {
    pub kind: Kind,
    pub k: u32,
}

impl ConstructionId {
    pub fn new(kind: Kind, k: u32) -> Result<Self> {
        if !kind.supports(k) {
            return Err(Error::InvalidConstruction(format!("{kind} does not support k={k}")));
        }
        Ok(ConstructionId { kind, k })
    }
}

impl fmt::Display for ConstructionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:k={}", self.kind, self.k)
    }
}

impl FromStr for ConstructionId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::ParseConstructionId(s.to_string());
        let (name, k) = s.split_once(':').ok_or_else(bad)?;
        let kind: Kind = name.parse()?;
        let k = k.trim().strip_prefix("k=").ok_or_else(bad)?;
        if k.is_empty() || !k.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let k: u32 = k.parse().map_err(|_| bad())?;
        ConstructionId::new(kind, k).map_err(|_| bad())
    }
}

/// A built function with everything the checks need.
pub struct Construction {
    pub id: ConstructionId,
    pub f: Arc<dyn SocialChoice>,
    /// Protocol computing `f`.
    pub protocol: ProtocolTree,
    /// Grid on which the construction's checks are exact.
    pub grid: Grid,
    pub payments: Arc<dyn PaymentRule>,
    /// Protocol of the mechanism, with every player's payment on the leaves.
    pub mechanism_protocol: Option<ProtocolTree>,
}

impl fmt::Debug for Construction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Construction").field("id", &self.id).field("protocol", &self.protocol).finish()
    }
}

impl Construction {
    pub fn mechanism(&self) -> Mechanism {
        Mechanism::new(self.f.clone(), self.payments.clone())
    }

    /// Worst-case bits of the bundled protocol of `f`.
    pub fn cc(&self) -> u64 {
        self.protocol.worst_case_bits()
    }
}

pub fn build(id: ConstructionId) -> Result<Construction> {
    match id.kind {
        Kind::Proof1 => proof1::build(id.k),
        Kind::Proof2 => proof2::build(id.k),
        Kind::Multiunit => multiunit::build(id.k).map(|m| m.construction),
        Kind::Disj => disj::build(id.k),
        Kind::Reach => reach_hard::build(id.k),
        Kind::Match => matching::build(id.k),
    }
}

/// Leaf labels of `tree` extended with all-zero payments.
pub fn zero_payment_protocol(tree: &ProtocolTree, players: usize) -> ProtocolTree {
    tree.map_labels(|l| LeafLabel::with_payments(l.alternative.0, vec![Rational::zero(); players]))
}

pub(crate) fn scalar_of(v: &Valuation) -> Result<&Rational> {
    v.scalar().ok_or_else(|| Error::InvalidConstruction(format!("expected a scalar valuation, got {v}")))
}

/// Exact non-negative integer scalar.
pub(crate) fn int_of(v: &Valuation) -> Result<u64> {
    let r = scalar_of(v)?;
    r.to_u64_exact().ok_or_else(|| Error::InvalidConstruction(format!("expected an integer type, got {r}")))
}

pub(crate) fn floor_of(v: &Valuation) -> Result<u64> {
    let r = scalar_of(v)?;
    r.floor_rational()
        .to_u64_exact()
        .ok_or_else(|| Error::InvalidConstruction(format!("expected a non-negative scalar, got {r}")))
}

/// Integer axis `0..n`.
pub(crate) fn int_axis(n: u64) -> Vec<Valuation> {
    (0..n).map(|i| Valuation::int(i as i64)).collect()
}

/// Half-integer axis of a scalar set.
pub(crate) fn half_axis(s: &ScalarSet) -> Vec<Valuation> {
    s.grid(&Rational::new(1, 2).expect("nonzero")).into_iter().map(Valuation::Scalar).collect()
}

/// Bit `j` of a `k`-bit string, counting from the first (most significant)
/// character.
pub fn bit(value: u64, j: u32, k: u32) -> bool {
    (value >> (k - 1 - j)) & 1 == 1
}

/// `k`-character binary string of `value`.
pub fn bit_string(value: u64, k: u32) -> String {
    (0..k).map(|j| if bit(value, j, k) { '1' } else { '0' }).collect()
}

/// Parses a binary string into its value, first character most significant.
pub fn parse_bit_string(s: &str) -> Option<u64> {
    if s.is_empty() || s.len() > 63 || !s.bytes().all(|b| b == b'0' || b == b'1') {
        return None;
    }
    u64::from_str_radix(s, 2).ok()
}
