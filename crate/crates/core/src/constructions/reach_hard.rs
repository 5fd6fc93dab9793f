//! Three players with four alternatives `{b, c, bc, n}`. Alice names a bit
//! position; Bob and Charlie each benefit exactly when the other's bit at
//! that position is set.

use std::sync::Arc;

use crate::constructions::{bit, int_axis, int_of, zero_payment_protocol, Construction, ConstructionId, Kind};
use crate::domain::{AlternativeId, Grid, PlayerDomain, ScalarSet, SingleParamDomain};
use crate::error::Result;
use crate::myerson::{FnChoice, ZeroPayments};
use crate::protocol::{LeafLabel, Node, ProtocolTree};
use crate::rational::Rational;

pub const B: AlternativeId = AlternativeId(0);
pub const C: AlternativeId = AlternativeId(1);
pub const BC: AlternativeId = AlternativeId(2);
pub const N: AlternativeId = AlternativeId(3);

pub const NAMES: [&str; 4] = ["b", "c", "bc", "n"];

/// Alternative for Bob's and Charlie's bits.
pub fn outcome(bob_bit: bool, charlie_bit: bool) -> AlternativeId {
    match (bob_bit, charlie_bit) {
        (true, true) => BC,
        (false, true) => B,
        (true, false) => C,
        (false, false) => N,
    }
}

fn ints(values: [i64; 4]) -> Vec<Rational> {
    values.into_iter().map(Rational::from_int).collect()
}

/// `w_B` and `w_C` over `(b, c, bc, n)`.
pub fn bob_weights() -> Vec<Rational> {
    ints([1, 0, 1, 0])
}

pub fn charlie_weights() -> Vec<Rational> {
    ints([0, 1, 1, 0])
}

pub fn domains(k: u32) -> Result<Vec<PlayerDomain>> {
    let strings = ScalarSet::range(1u64 << k)?;
    Ok(vec![
        PlayerDomain::Single(SingleParamDomain::constant(4, Rational::one(), ScalarSet::range(u64::from(k))?)?),
        PlayerDomain::Single(SingleParamDomain::new(bob_weights(), strings.clone())?),
        PlayerDomain::Single(SingleParamDomain::new(charlie_weights(), strings)?),
    ])
}

pub fn evaluate(k: u32, position: u64, b: u64, c: u64) -> AlternativeId {
    let j = position as u32;
    outcome(bit(b, j, k), bit(c, j, k))
}

pub fn choice(k: u32) -> Result<FnChoice> {
    ConstructionId::new(Kind::Reach, k)?;
    Ok(FnChoice::new(&format!("reach:k={k}"), 4, domains(k)?, move |p| {
        Ok(evaluate(k, int_of(&p[0])?, int_of(&p[1])?, int_of(&p[2])?))
    }))
}

/// Alice sends her position (nothing when `k = 1`), then Bob and Charlie
/// send their bit there.
pub fn protocol(k: u32) -> Result<ProtocolTree> {
    let branch = |j: u32| {
        let charlie = |bb: bool| {
            Node::decision(
                2,
                move |v| int_of(v).is_ok_and(|x| bit(x, j, k)),
                Node::leaf(LeafLabel::alt(outcome(bb, false).0)),
                Node::leaf(LeafLabel::alt(outcome(bb, true).0)),
            )
        };
        Node::decision(1, move |v| int_of(v).is_ok_and(|x| bit(x, j, k)), charlie(false), charlie(true))
    };
    let root = if k == 1 { branch(0) } else { Node::message(0, |v| Ok(int_of(v)? as usize), (0..k).map(branch).collect()) };
    ProtocolTree::new(3, root)
}

pub fn grid(k: u32) -> Grid {
    Grid::new(vec![int_axis(u64::from(k)), int_axis(1 << k), int_axis(1 << k)])
}

pub fn build(k: u32) -> Result<Construction> {
    let protocol = protocol(k)?;
    Ok(Construction {
        id: ConstructionId::new(Kind::Reach, k)?,
        f: Arc::new(choice(k)?),
        mechanism_protocol: Some(zero_payment_protocol(&protocol, 3)),
        protocol,
        grid: grid(k),
        payments: Arc::new(ZeroPayments),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::parse_bit_string;
    use crate::domain::Valuation;
    use crate::myerson::{check_monotone, verify_truthful, Mechanism, SocialChoice};
    use crate::protocol::verify_monochromatic;

    #[test]
    fn example_and_protocol() {
        let f = choice(3).unwrap();
        let p = [Valuation::int(1), Valuation::int(parse_bit_string("110").unwrap() as i64), Valuation::int(2)];
        assert_eq!(f.evaluate(&p).unwrap(), BC);
        for k in [1, 3] {
            let c = build(k).unwrap();
            assert!(verify_monochromatic(&c.protocol, c.f.as_ref(), &c.grid).unwrap());
            assert!(verify_truthful(&Mechanism::new(c.f.clone(), Arc::new(ZeroPayments)), &c.grid).unwrap());
            for i in 0..3 {
                assert!(check_monotone(c.f.as_ref(), i, &c.grid).unwrap());
            }
        }
        assert_eq!(build(4).unwrap().cc(), 4);
    }
}
