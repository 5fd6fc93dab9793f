//! Two players whose values do not depend on the outcome; the outcome says
//! whether their `k`-bit strings are disjoint.

use std::sync::Arc;

use crate::constructions::{int_axis, int_of, zero_payment_protocol, Construction, ConstructionId, Kind};
use crate::domain::{AlternativeId, Grid, PlayerDomain, ScalarSet, SingleParamDomain};
use crate::error::Result;
use crate::myerson::{FnChoice, ZeroPayments};
use crate::protocol::{LeafLabel, Node, ProtocolTree};
use crate::rational::Rational;

/// Chosen when the strings share no set bit.
pub const DISJOINT: AlternativeId = AlternativeId(1);
pub const INTERSECTING: AlternativeId = AlternativeId(0);

pub fn domain(k: u32) -> Result<SingleParamDomain> {
    SingleParamDomain::constant(2, Rational::one(), ScalarSet::range(1u64 << k)?)
}

pub fn evaluate(x: u64, y: u64) -> AlternativeId {
    if x & y == 0 {
        DISJOINT
    } else {
        INTERSECTING
    }
}

pub fn choice(k: u32) -> Result<FnChoice> {
    ConstructionId::new(Kind::Disj, k)?;
    Ok(FnChoice::new(
        &format!("disj:k={k}"),
        2,
        vec![PlayerDomain::Single(domain(k)?), PlayerDomain::Single(domain(k)?)],
        |p| Ok(evaluate(int_of(&p[0])?, int_of(&p[1])?)),
    ))
}

/// Player 0 sends its string, player 1 answers with the outcome bit.
pub fn protocol(k: u32) -> Result<ProtocolTree> {
    let n = 1u64 << k;
    let children = (0..n)
        .map(|x| {
            Node::decision(
                1,
                move |v| int_of(v).is_ok_and(|y| x & y == 0),
                Node::leaf(LeafLabel::alt(INTERSECTING.0)),
                Node::leaf(LeafLabel::alt(DISJOINT.0)),
            )
        })
        .collect();
    ProtocolTree::new(2, Node::message(0, |v| Ok(int_of(v)? as usize), children))
}

pub fn grid(k: u32) -> Grid {
    Grid::new(vec![int_axis(1 << k), int_axis(1 << k)])
}

pub fn build(k: u32) -> Result<Construction> {
    let protocol = protocol(k)?;
    Ok(Construction {
        id: ConstructionId::new(Kind::Disj, k)?,
        f: Arc::new(choice(k)?),
        mechanism_protocol: Some(zero_payment_protocol(&protocol, 2)),
        protocol,
        grid: grid(k),
        payments: Arc::new(ZeroPayments),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Valuation;
    use crate::myerson::{payment_count, verify_truthful, Mechanism, SocialChoice};
    use crate::protocol::verify_monochromatic;

    #[test]
    fn outcomes() {
        let f = choice(3).unwrap();
        assert_eq!(f.evaluate(&[Valuation::int(5), Valuation::int(2)]).unwrap(), DISJOINT);
        assert_eq!(f.evaluate(&[Valuation::int(1), Valuation::int(1)]).unwrap(), INTERSECTING);
    }

    #[test]
    fn zero_payments_are_truthful_with_a_single_price() {
        let c = build(4).unwrap();
        assert!(verify_truthful(&Mechanism::new(c.f.clone(), Arc::new(ZeroPayments)), &c.grid).unwrap());
        assert!(verify_monochromatic(&c.protocol, c.f.as_ref(), &c.grid).unwrap());
        assert_eq!(c.cc(), 5);
        for a in [INTERSECTING, DISJOINT] {
            assert_eq!(payment_count(c.f.as_ref(), &ZeroPayments, 0, a, &c.grid).unwrap(), 1);
        }
    }
}
