//! Two-bidder auction of `m = 2^k` identical items built on top of the
//! composition function. Alternative `a_i` gives Alice `i` items and Bob
//! `m − i`.

use std::collections::HashMap;
use std::sync::Arc;

use crate::constructions::proof1::Proof1;
use crate::constructions::{half_axis, Construction, ConstructionId, Kind};
use crate::domain::{AlternativeId, Grid, MultiParamDomain, PlayerDomain, Valuation};
use crate::error::{Error, Result};
use crate::myerson::{FnChoice, VcgPayments};
use crate::protocol::{LeafLabel, Node, ProtocolTree};
use crate::rational::Rational;

/// Value by number of items won, `values[0..=m]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultiUnitValuation {
    pub values: Vec<Rational>,
}

impl MultiUnitValuation {
    pub fn is_normalized(&self) -> bool {
        self.values.first().is_some_and(Rational::is_zero)
    }

    pub fn is_monotone(&self) -> bool {
        self.values.windows(2).all(|w| w[0] <= w[1])
    }

    pub fn is_strictly_increasing(&self) -> bool {
        self.values.windows(2).all(|w| w[0] < w[1])
    }

    /// Value of each alternative for Alice (`a_i ↦ v(i)`).
    pub fn as_alice(&self) -> Vec<Rational> {
        self.values.clone()
    }

    /// Value of each alternative for Bob (`a_i ↦ v(m − i)`).
    pub fn as_bob(&self) -> Vec<Rational> {
        self.values.iter().rev().cloned().collect()
    }
}

pub struct Multiunit {
    pub k: u32,
    pub m: usize,
    pub inner: Proof1,
    /// `P_A(a_i, v_B)` for every Bob type.
    pub menus: Vec<Vec<Rational>>,
    /// `v̂_B` for every Bob type.
    pub bob: Vec<MultiUnitValuation>,
    /// `v̂_A*`.
    pub special: MultiUnitValuation,
    pub construction: Construction,
}

impl Multiunit {
    /// `v̂_A` induced by the scalar `r`.
    pub fn alice(&self, r: &Rational) -> MultiUnitValuation {
        MultiUnitValuation { values: self.inner.weights.iter().map(|w| r * w).collect() }
    }

    /// `v̂_A(i) + v̂_B(m − i)`.
    pub fn welfare(alice: &[Rational], bob: &[Rational], i: usize) -> Rational {
        &alice[i] + &bob[bob.len() - 1 - i]
    }

    /// Every welfare-maximizing alternative.
    pub fn argmax_welfare(alice: &[Rational], bob: &[Rational]) -> Vec<AlternativeId> {
        let all: Vec<Rational> = (0..alice.len()).map(|i| Self::welfare(alice, bob, i)).collect();
        let best = all.iter().max().cloned().unwrap_or_else(Rational::zero);
        (0..all.len()).filter(|&i| all[i] == best).map(AlternativeId).collect()
    }

    /// Clarke payment of Alice for `j` items: `v̂_B(m) − v̂_B(m − j)`.
    pub fn vcg_alice(&self, bob_type: usize, j: usize) -> Rational {
        let v = &self.bob[bob_type].values;
        &v[self.m] - &v[self.m - j]
    }
}

fn invalid(msg: String) -> Error {
    Error::InvalidConstruction(msg)
}

pub fn build(k: u32) -> Result<Multiunit> {
    let id = ConstructionId::new(Kind::Multiunit, k)?;
    let inner = Proof1::new(k)?;
    let m = inner.shape.top();
    let base = inner.choice();
    let menus: Vec<Vec<Rational>> = (0..inner.bob_types()).map(|t| inner.alice_menu(&base, t)).collect::<Result<_>>()?;
    let bob: Vec<MultiUnitValuation> = menus
        .iter()
        .map(|p| MultiUnitValuation { values: (0..=m).map(|i| &p[m] - &p[m - i]).collect() })
        .collect();
    let top = bob.iter().map(|v| v.values[m].clone()).max().expect("Bob has types");
    let mut special = vec![Rational::zero(); m + 1];
    special[m] = top + Rational::one();
    let special = MultiUnitValuation { values: special };

    let weights = inner.weights.clone();
    let w1 = weights[1].clone();
    let r_top = Rational::from_int(inner.shape.total as i64 - 1);
    let scalar_of = {
        let (weights, w1, r_top) = (weights.clone(), w1.clone(), r_top.clone());
        move |v: &[Rational]| -> Option<Rational> {
            let r = &v[1] / &w1;
            let ok = !r.is_negative() && r <= r_top && v.iter().zip(&weights).all(|(x, w)| x == &(&r * w));
            ok.then_some(r)
        }
    };
    let scalar_of = Arc::new(scalar_of);

    let alice_axis: Vec<Vec<Rational>> = half_axis(inner.alice_domain().scalars())
        .into_iter()
        .map(|r| weights.iter().map(|w| r.scalar().expect("scalar axis") * w).collect())
        .chain(std::iter::once(special.as_alice()))
        .collect();
    let zero_index = 0;
    let membership = {
        let (scalar_of, special) = (scalar_of.clone(), special.as_alice());
        Arc::new(move |v: &[Rational]| v == special.as_slice() || scalar_of(v).is_some())
    };
    let alice_domain = MultiParamDomain::new(m + 1, alice_axis.clone())?.with_zero_type(zero_index)?.with_membership(membership);
    let bob_vectors: Vec<Vec<Rational>> = bob.iter().map(MultiUnitValuation::as_bob).collect();
    let bob_domain = MultiParamDomain::new(m + 1, bob_vectors.clone())?;
    let bob_index: Arc<HashMap<Vec<Rational>, usize>> =
        Arc::new(bob_vectors.iter().enumerate().map(|(i, v)| (v.clone(), i)).collect());
    if bob_index.len() != bob_vectors.len() {
        return Err(invalid("two Bob types induce the same multi-unit valuation".into()));
    }

    let bob_of = {
        let bob_index = bob_index.clone();
        move |v: &Valuation| -> Result<usize> {
            v.vector()
                .and_then(|x| bob_index.get(x).copied())
                .ok_or_else(|| Error::OutOfDomain { player: 1, detail: format!("{v} is not a Bob type") })
        }
    };
    let alice_scalar = {
        let (scalar_of, special) = (scalar_of.clone(), special.as_alice());
        move |v: &Valuation| -> Result<Option<Rational>> {
            let x = v.vector().ok_or_else(|| Error::OutOfDomain { player: 0, detail: format!("{v}") })?;
            if x == special.as_slice() {
                return Ok(None);
            }
            scalar_of(x).map(Some).ok_or_else(|| Error::OutOfDomain { player: 0, detail: format!("{v}") })
        }
    };

    let f = {
        let (inner, alice_scalar, bob_of) = (inner.clone(), alice_scalar.clone(), bob_of.clone());
        FnChoice::new(
            &format!("multiunit:k={k}"),
            m + 1,
            vec![PlayerDomain::Multi(alice_domain), PlayerDomain::Multi(bob_domain)],
            move |p| {
                let t = bob_of(&p[1])?;
                Ok(match alice_scalar(&p[0])? {
                    None => AlternativeId(m),
                    Some(r) => {
                        let j = r.floor_rational().to_u64_exact().expect("non-negative").min(inner.shape.total - 1);
                        AlternativeId(inner.alternative(t, j))
                    }
                })
            },
        )
    };

    // Alice says whether she holds the special type; otherwise the
    // composition protocol runs on the induced scalar.
    let total = inner.shape.total;
    let mut floors = Vec::new();
    for j in 0..total {
        let leaves = (0..=m).map(|a| Node::leaf(LeafLabel::alt(a))).collect();
        let (inner, bob_of) = (inner.clone(), bob_of.clone());
        floors.push(Node::message(1, move |v| Ok(inner.alternative(bob_of(v)?, j)), leaves));
    }
    let floor_node = {
        let alice_scalar = alice_scalar.clone();
        Node::message(
            0,
            move |v| {
                let r = alice_scalar(v)?.ok_or_else(|| Error::ProtocolIntegrity("special type at the floor node".into()))?;
                Ok(r.floor_rational().to_u64_exact().expect("non-negative").min(total - 1) as usize)
            },
            floors,
        )
    };
    let special_vec = special.as_alice();
    let root = Node::decision(
        0,
        move |v| v.vector() == Some(special_vec.as_slice()),
        floor_node,
        Node::leaf(LeafLabel::alt(m)),
    );
    let protocol = ProtocolTree::new(2, root)?;
    let grid = Grid::new(vec![
        alice_axis.into_iter().map(Valuation::Vector).collect(),
        bob_vectors.into_iter().map(Valuation::Vector).collect(),
    ]);
    let construction =
        Construction { id, f: Arc::new(f), protocol, grid, payments: Arc::new(VcgPayments), mechanism_protocol: None };
    Ok(Multiunit { k, m, inner, menus, bob, special, construction })
}
