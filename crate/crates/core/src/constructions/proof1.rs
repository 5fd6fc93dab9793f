//! Two players, `2^k + 1` alternatives. Bob's type names a composition of
//! `2^{k+1}` into `2^k + 1` parts; Alice gets the alternative whose block
//! contains `⌊r_A⌋`.

use std::sync::Arc;

use num_bigint::BigUint;

use crate::constructions::compositions::{all_compositions, composition_unrank, Composition};
use crate::constructions::{floor_of, half_axis, int_axis, int_of, ConstructionId, Construction, Kind};
use crate::domain::{AlternativeId, Breakpoint, Grid, PlayerDomain, ScalarSet, SingleParamDomain, Valuation};
use crate::error::{Error, Result};
use crate::myerson::{myerson_payment, FnChoice, MyersonPayments, SocialChoice};
use crate::protocol::{LeafLabel, Node, ProtocolTree, RectangleFn};
use crate::rational::Rational;

/// Sizes of the instance for a given `k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Shape {
    pub k: u32,
    /// `|A| = 2^k + 1`.
    pub alternatives: u64,
    /// `2^{k+1}`: the number of integers Alice's floor can take.
    pub total: u64,
}

impl Shape {
    pub fn new(k: u32) -> Result<Self> {
        if k == 0 || k > 20 {
            return Err(Error::InvalidConstruction(format!("proof1 needs 1 ≤ k ≤ 20, got {k}")));
        }
        Ok(Shape { k, alternatives: (1 << k) + 1, total: 1 << (k + 1) })
    }

    /// `m = 2^k`, the index of the top alternative.
    pub fn top(&self) -> usize {
        (self.alternatives - 1) as usize
    }
}

/// `w_A(a_i) = |A|^{4ik} − 1`.
pub fn weights(k: u32) -> Result<Vec<Rational>> {
    let s = Shape::new(k)?;
    let base = BigUint::from(s.alternatives);
    Ok((0..s.alternatives)
        .map(|i| {
            let e = u32::try_from(4 * i * u64::from(k)).expect("exponent fits");
            Rational::from_biguint(base.pow(e)) - Rational::one()
        })
        .collect())
}

/// Bob's type `index` as a composition, for any `k`.
pub fn map(k: u32, index: &BigUint) -> Result<Composition> {
    let s = Shape::new(k)?;
    composition_unrank(index, s.total, s.alternatives)
}

/// `⟨w, c⟩` for every composition, in rank order.
pub fn dot_products(k: u32, w: &[Rational]) -> Result<Vec<Rational>> {
    let s = Shape::new(k)?;
    if k > 3 {
        return Err(Error::ScaleExceeded {
            what: "dot products".into(),
            count: crate::constructions::compositions::composition_count(s.total, s.alternatives).to_string(),
            cap: 6435,
        });
    }
    Ok(all_compositions(s.total, s.alternatives)
        .iter()
        .map(|c| c.parts().iter().zip(w).map(|(&p, wi)| Rational::from_int(p as i64) * wi).sum())
        .collect())
}

/// Are all `⟨w, c⟩` pairwise different?
pub fn dot_distinct_with(k: u32, w: &[Rational]) -> Result<bool> {
    let dots = dot_products(k, w)?;
    for i in 0..dots.len() {
        for j in i + 1..dots.len() {
            if dots[i] == dots[j] {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

pub fn dot_distinct(k: u32) -> Result<bool> {
    dot_distinct_with(k, &weights(k)?)
}

/// Everything about one `k`, with Bob's types materialized.
#[derive(Clone)]
pub struct Proof1 {
    pub shape: Shape,
    pub weights: Vec<Rational>,
    pub compositions: Arc<Vec<Composition>>,
    assignment: Arc<Vec<Vec<usize>>>,
}

impl Proof1 {
    pub fn new(k: u32) -> Result<Self> {
        if !Kind::Proof1.supports(k) {
            return Err(Error::InvalidConstruction(format!("proof1 materializes Bob's types only for k ≤ 3, got {k}")));
        }
        let shape = Shape::new(k)?;
        let compositions = all_compositions(shape.total, shape.alternatives);
        let assignment = compositions.iter().map(Composition::assignment).collect();
        Ok(Proof1 { shape, weights: weights(k)?, compositions: Arc::new(compositions), assignment: Arc::new(assignment) })
    }

    pub fn bob_types(&self) -> usize {
        self.compositions.len()
    }

    pub fn alice_domain(&self) -> SingleParamDomain {
        let hi = Rational::from_int(self.shape.total as i64 - 1);
        SingleParamDomain::new(self.weights.clone(), ScalarSet::interval(hi).expect("positive")).expect("weights match")
    }

    pub fn bob_domain(&self) -> SingleParamDomain {
        SingleParamDomain::constant(
            self.shape.alternatives as usize,
            Rational::one(),
            ScalarSet::range(self.bob_types() as u64).expect("non-empty"),
        )
        .expect("valid domain")
    }

    /// `map(v_B)(j)`.
    pub fn alternative(&self, bob: usize, j: u64) -> usize {
        self.assignment[bob][j as usize]
    }

    pub fn choice(&self) -> FnChoice {
        let table = self.assignment.clone();
        let top = self.shape.total - 1;
        let mut f = FnChoice::new(
            &format!("proof1:k={}", self.shape.k),
            self.shape.alternatives as usize,
            vec![PlayerDomain::Single(self.alice_domain()), PlayerDomain::Single(self.bob_domain())],
            move |p| {
                let j = floor_of(&p[0])?.min(top);
                let t = int_of(&p[1])? as usize;
                let row = table.get(t).ok_or_else(|| Error::OutOfDomain { player: 1, detail: format!("type {t}") })?;
                Ok(AlternativeId(row[j as usize]))
            },
        );
        let comps = self.compositions.clone();
        f.oracle = Some(Arc::new(move |player, p| {
            if player != 0 {
                return None;
            }
            Some((|| {
                let t = int_of(&p[1])? as usize;
                let c = comps.get(t).ok_or_else(|| Error::OutOfDomain { player: 1, detail: format!("type {t}") })?;
                Ok(c.prefix_starts()
                    .into_iter()
                    .enumerate()
                    .map(|(i, s)| Breakpoint::new(Rational::from_int(s as i64), AlternativeId(i)))
                    .collect())
            })())
        }));
        f
    }

    /// Alice sends `⌊r_A⌋` (k+1 bits); Bob answers with the alternative.
    pub fn protocol(&self) -> Result<ProtocolTree> {
        let top = self.shape.total - 1;
        let mut alice_children = Vec::new();
        for j in 0..self.shape.total {
            let mut leaves = Vec::new();
            for a in 0..self.shape.alternatives as usize {
                let table = self.assignment.clone();
                let rect: RectangleFn = Arc::new(move |player, v| match player {
                    0 => floor_of(v).map(|x| x.min(top) == j).unwrap_or(false),
                    _ => int_of(v).ok().and_then(|t| table.get(t as usize)).is_some_and(|row| row[j as usize] == a),
                });
                leaves.push(Node::leaf_with_rectangle(LeafLabel::alt(a), rect));
            }
            let table = self.assignment.clone();
            alice_children.push(Node::message(
                1,
                move |v| {
                    let t = int_of(v)? as usize;
                    table.get(t).map(|row| row[j as usize]).ok_or(Error::OutOfDomain { player: 1, detail: format!("type {t}") })
                },
                leaves,
            ));
        }
        ProtocolTree::new(2, Node::message(0, move |v| Ok(floor_of(v)?.min(top) as usize), alice_children))
    }

    /// Alice's normalized price of every alternative, given Bob's type,
    /// read off Myerson payments at the block starts.
    pub fn alice_menu(&self, f: &dyn SocialChoice, bob: usize) -> Result<Vec<Rational>> {
        let c = &self.compositions[bob];
        c.prefix_starts()
            .into_iter()
            .map(|s| myerson_payment(f, 0, &[Valuation::int(s as i64), Valuation::int(bob as i64)]))
            .collect()
    }

    /// Mechanism protocol: Alice sends `⌊r_A⌋`, Bob sends his type index and
    /// leaves carry both payments.
    pub fn mechanism_protocol(&self, f: &dyn SocialChoice) -> Result<ProtocolTree> {
        let top = self.shape.total - 1;
        let menus: Vec<Vec<Rational>> = (0..self.bob_types()).map(|t| self.alice_menu(f, t)).collect::<Result<_>>()?;
        let mut alice_children = Vec::new();
        for j in 0..self.shape.total {
            let leaves = (0..self.bob_types())
                .map(|t| {
                    let a = self.alternative(t, j);
                    Node::leaf(LeafLabel::with_payments(a, vec![menus[t][a].clone(), Rational::zero()]))
                })
                .collect();
            alice_children.push(Node::message(1, |v| Ok(int_of(v)? as usize), leaves));
        }
        ProtocolTree::new(2, Node::message(0, move |v| Ok(floor_of(v)?.min(top) as usize), alice_children))
    }

    pub fn grid(&self) -> Grid {
        Grid::new(vec![half_axis(self.alice_domain().scalars()), int_axis(self.bob_types() as u64)])
    }
}

pub fn build(k: u32) -> Result<Construction> {
    let p = Proof1::new(k)?;
    let f = Arc::new(p.choice());
    let mechanism_protocol = if k <= 2 { Some(p.mechanism_protocol(f.as_ref())?) } else { None };
    Ok(Construction {
        id: ConstructionId::new(Kind::Proof1, k)?,
        protocol: p.protocol()?,
        grid: p.grid(),
        payments: Arc::new(MyersonPayments),
        mechanism_protocol,
        f,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::myerson::{check_breakpoint_oracle, check_monotone};
    use crate::protocol::{run_protocol, verify_monochromatic};

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn vs(a: &str, b: i64) -> Vec<Valuation> {
        vec![Valuation::Scalar(q(a)), Valuation::int(b)]
    }

    #[test]
    fn weights_and_dots() {
        assert_eq!(weights(1).unwrap(), vec![q("0"), q("80"), q("6560")]);
        assert_eq!(weights(2).unwrap()[1], q("390624"));
        assert_eq!(dot_products(1, &weights(1).unwrap()).unwrap(), vec![q("13200"), q("6720"), q("6640")]);
        assert!(dot_distinct(1).unwrap());
        assert!(!dot_distinct_with(2, &vec![Rational::one(); 5]).unwrap());
        assert_eq!(map(1, &BigUint::from(2u32)).unwrap().parts(), &[2, 1, 1]);
    }

    #[test]
    fn evaluation_and_protocol() {
        let p = Proof1::new(1).unwrap();
        let f = p.choice();
        assert_eq!(f.evaluate(&vs("3/2", 2)).unwrap(), AlternativeId(0));
        for t in 0..3 {
            assert_eq!(f.evaluate(&vs("3", t)).unwrap(), AlternativeId(2));
        }
        let tree = p.protocol().unwrap();
        let (label, tr) = run_protocol(&tree, &f, &vs("3", 0)).unwrap();
        assert_eq!(label.alternative, AlternativeId(2));
        assert_eq!(tr.total_bits, 4);
        assert!(verify_monochromatic(&tree, &f, &p.grid()).unwrap());
        assert!(check_monotone(&f, 0, &p.grid()).unwrap());
        assert!(check_breakpoint_oracle(&f, 0, &p.grid()).unwrap());
    }

    #[test]
    fn payments_at_the_top() {
        let p = Proof1::new(1).unwrap();
        let f = p.choice();
        let got: Vec<Rational> = (0..3).map(|t| myerson_payment(&f, 0, &vs("3", t)).unwrap()).collect();
        assert_eq!(got, vec![q("13040"), q("19520"), q("19600")]);
        assert_eq!(p.alice_menu(&f, 0).unwrap(), vec![q("0"), q("80"), q("13040")]);
        assert_eq!(myerson_payment(&f, 0, &vs("5/2", 0)).unwrap(), q("13040"));
        assert_eq!(myerson_payment(&f, 0, &vs("0", 1)).unwrap(), q("0"));
    }
}
