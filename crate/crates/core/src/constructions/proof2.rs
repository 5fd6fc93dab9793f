//! Three players; Alice's alternative moves up by one exactly when Bob's and
//! Charlie's bits at position `⌊r_A⌋` are both set.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::constructions::{bit, floor_of, half_axis, int_axis, int_of, ConstructionId, Construction, Kind};
use crate::domain::{AlternativeId, Breakpoint, Grid, PlayerDomain, ScalarSet, SingleParamDomain, Valuation};
use crate::error::{Error, Result};
use crate::myerson::{myerson_payment, FnChoice, MyersonPayments};
use crate::protocol::{LeafLabel, Node, ProtocolTree, RectangleFn};
use crate::rational::Rational;

fn check_k(k: u32) -> Result<()> {
    if !Kind::Proof2.supports(k) {
        return Err(Error::InvalidConstruction(format!("proof2 does not support k={k}")));
    }
    Ok(())
}

/// Bits of `b` and `c` at position `j` are both set.
pub fn intersects(b: u64, c: u64, j: u32, k: u32) -> bool {
    bit(b, j, k) && bit(c, j, k)
}

/// Number of intersecting positions among `0..j`.
pub fn prefix_intersections(b: u64, c: u64, j: u32, k: u32) -> u32 {
    (0..j.min(k)).filter(|&i| intersects(b, c, i, k)).count() as u32
}

pub fn alice_domain(k: u32) -> Result<SingleParamDomain> {
    check_k(k)?;
    let scalars = if k == 1 {
        ScalarSet::finite(vec![Rational::zero()])?
    } else {
        ScalarSet::interval(Rational::from_int(i64::from(k) - 1))?
    };
    SingleParamDomain::new((0..=k).map(|a| Rational::from_int(i64::from(a))).collect(), scalars)
}

fn bits_domain(k: u32) -> Result<SingleParamDomain> {
    SingleParamDomain::constant(k as usize + 1, Rational::one(), ScalarSet::range(1u64 << k)?)
}

/// `f_k(r, b, c)`.
pub fn evaluate(k: u32, floor_r: u64, b: u64, c: u64) -> usize {
    let j = floor_r.min(u64::from(k) - 1) as u32;
    j as usize + usize::from(intersects(b, c, j, k))
}

pub fn choice(k: u32) -> Result<FnChoice> {
    let mut f = FnChoice::new(
        &format!("proof2:k={k}"),
        k as usize + 1,
        vec![
            PlayerDomain::Single(alice_domain(k)?),
            PlayerDomain::Single(bits_domain(k)?),
            PlayerDomain::Single(bits_domain(k)?),
        ],
        move |p| Ok(AlternativeId(evaluate(k, floor_of(&p[0])?, int_of(&p[1])?, int_of(&p[2])?))),
    );
    f.oracle = Some(Arc::new(move |player, p| {
        if player != 0 {
            return None;
        }
        Some((|| {
            let (b, c) = (int_of(&p[1])?, int_of(&p[2])?);
            Ok((0..k)
                .map(|j| {
                    Breakpoint::new(
                        Rational::from_int(i64::from(j)),
                        AlternativeId(j as usize + usize::from(intersects(b, c, j, k))),
                    )
                })
                .collect())
        })())
    }));
    Ok(f)
}

/// Alice sends `⌊r_A⌋` (skipped when `k = 1`), then Bob and Charlie send
/// their bit at that position.
pub fn protocol(k: u32) -> Result<ProtocolTree> {
    check_k(k)?;
    let top = u64::from(k) - 1;
    let branch = |j: u32| {
        let mut bob_children = Vec::new();
        for bb in [false, true] {
            let mut charlie_children = Vec::new();
            for cb in [false, true] {
                let rect: RectangleFn = Arc::new(move |player, v| match player {
                    0 => floor_of(v).is_ok_and(|x| x.min(top) == u64::from(j)),
                    1 => int_of(v).is_ok_and(|x| bit(x, j, k) == bb),
                    _ => int_of(v).is_ok_and(|x| bit(x, j, k) == cb),
                });
                let alt = j as usize + usize::from(bb && cb);
                charlie_children.push(Node::leaf_with_rectangle(LeafLabel::alt(alt), rect));
            }
            let mut it = charlie_children.into_iter();
            let (c0, c1) = (it.next().expect("two"), it.next().expect("two"));
            bob_children.push(Node::decision(2, move |v| int_of(v).is_ok_and(|x| bit(x, j, k)), c0, c1));
        }
        let mut it = bob_children.into_iter();
        let (b0, b1) = (it.next().expect("two"), it.next().expect("two"));
        Node::decision(1, move |v| int_of(v).is_ok_and(|x| bit(x, j, k)), b0, b1)
    };
    let root = if k == 1 {
        branch(0)
    } else {
        Node::message(0, move |v| Ok(floor_of(v)?.min(top) as usize), (0..k).map(branch).collect())
    };
    ProtocolTree::new(3, root)
}

pub fn grid(k: u32) -> Result<Grid> {
    let n = 1u64 << k;
    Ok(Grid::new(vec![half_axis(alice_domain(k)?.scalars()), int_axis(n), int_axis(n)]))
}

pub fn build(k: u32) -> Result<Construction> {
    Ok(Construction {
        id: ConstructionId::new(Kind::Proof2, k)?,
        f: Arc::new(choice(k)?),
        protocol: protocol(k)?,
        grid: grid(k)?,
        payments: Arc::new(MyersonPayments),
        mechanism_protocol: None,
    })
}

/// How Alice reaches alternative `j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Case {
    /// From `⌊r⌋ = j − 1` with bit `j − 1` intersecting.
    Up,
    /// From `⌊r⌋ = j` with bit `j` not intersecting.
    Stay,
}

/// The two closed-form prices of alternative `j` for prefix intersection size `t`.
pub fn closed_form(case: Case, j: u32, t: u32) -> Rational {
    let (j, t) = (i64::from(j), i64::from(t));
    let v = match case {
        Case::Up => j * (j - 1) - (j - 1) * (j - 2) / 2 - t + 1,
        Case::Stay => j * j - j * (j - 1) / 2 - t,
    };
    Rational::from_int(v)
}

/// Ways alternative `j` is reachable from `(b, c)`, each with a witness `r`.
pub fn reaching_cases(k: u32, b: u64, c: u64, j: u32) -> Vec<(Case, u32)> {
    let mut out = Vec::new();
    if j >= 1 && j - 1 < k && intersects(b, c, j - 1, k) {
        out.push((Case::Up, j - 1));
    }
    if j < k && !intersects(b, c, j, k) {
        out.push((Case::Stay, j));
    }
    out
}

/// Outcome of comparing exact Myerson prices with the closed forms.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ClosedFormReport {
    pub checked: u64,
    pub mismatches: Vec<(u64, u64, u32, Case)>,
}

/// Compares every reachable `(b, c, j)` case against its closed form.
pub fn check_closed_forms(k: u32) -> Result<ClosedFormReport> {
    let f = choice(k)?;
    let mut report = ClosedFormReport::default();
    let n = 1u64 << k;
    let mut p = vec![Valuation::int(0), Valuation::int(0), Valuation::int(0)];
    for b in 0..n {
        p[1] = Valuation::int(b as i64);
        for c in 0..n {
            p[2] = Valuation::int(c as i64);
            for j in 0..=k {
                let t = prefix_intersections(b, c, j, k);
                for (case, r) in reaching_cases(k, b, c, j) {
                    p[0] = Valuation::int(i64::from(r));
                    report.checked += 1;
                    if myerson_payment(&f, 0, &p)? != closed_form(case, j, t) {
                        report.mismatches.push((b, c, j, case));
                    }
                }
            }
        }
    }
    Ok(report)
}

/// Distinct normalized prices of each alternative over all `(b, c)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ImageReport {
    pub per_alternative: Vec<usize>,
    pub total: usize,
}

impl ImageReport {
    pub fn within_bounds(&self, k: u32) -> bool {
        let k = k as usize;
        self.per_alternative.iter().all(|&c| c <= 2 * k + 2) && self.total <= (k + 1) * (2 * k + 2)
    }
}

/// `|Im P_A|`: prices read from Myerson payments at every reaching witness.
pub fn image_size(k: u32) -> Result<ImageReport> {
    let f = choice(k)?;
    let n = 1u64 << k;
    let mut per: BTreeMap<u32, BTreeSet<Rational>> = BTreeMap::new();
    let mut p = vec![Valuation::int(0), Valuation::int(0), Valuation::int(0)];
    for b in 0..n {
        p[1] = Valuation::int(b as i64);
        for c in 0..n {
            p[2] = Valuation::int(c as i64);
            for j in 0..=k {
                if let Some(&(_, r)) = reaching_cases(k, b, c, j).first() {
                    p[0] = Valuation::int(i64::from(r));
                    per.entry(j).or_default().insert(myerson_payment(&f, 0, &p)?);
                }
            }
        }
    }
    let total: BTreeSet<&Rational> = per.values().flatten().collect();
    Ok(ImageReport {
        per_alternative: (0..=k).map(|j| per.get(&j).map_or(0, BTreeSet::len)).collect(),
        total: total.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::parse_bit_string;
    use crate::myerson::{check_breakpoint_oracle, check_monotone, SocialChoice};
    use crate::protocol::{leaf_representatives, run_protocol, verify_monochromatic};

    fn prof(r: &str, b: &str, c: &str) -> Vec<Valuation> {
        vec![
            Valuation::Scalar(r.parse().unwrap()),
            Valuation::int(parse_bit_string(b).unwrap() as i64),
            Valuation::int(parse_bit_string(c).unwrap() as i64),
        ]
    }

    #[test]
    fn evaluation_examples() {
        let f = choice(3).unwrap();
        assert_eq!(f.evaluate(&prof("1", "110", "010")).unwrap(), AlternativeId(2));
        assert_eq!(f.evaluate(&prof("0", "000", "111")).unwrap(), AlternativeId(0));
    }

    #[test]
    fn protocol_cost_and_correctness() {
        let f = choice(4).unwrap();
        let (label, tr) = run_protocol(&protocol(4).unwrap(), &f, &prof("5/2", "0010", "0010")).unwrap();
        assert_eq!(label.alternative, AlternativeId(3));
        assert_eq!(tr.total_bits, 4);
        for k in [1, 2, 3] {
            let f = choice(k).unwrap();
            let g = grid(k).unwrap();
            assert!(verify_monochromatic(&protocol(k).unwrap(), &f, &g).unwrap(), "k={k}");
            assert!(check_monotone(&f, 0, &g).unwrap());
            if k > 1 {
                assert!(check_breakpoint_oracle(&f, 0, &g).unwrap());
            }
        }
    }

    #[test]
    fn representative_of_a_leaf() {
        let t = protocol(3).unwrap();
        let reps = leaf_representatives(&t, &grid(3).unwrap()).unwrap();
        let leaf = t.leaf_of(&prof("1", "010", "010")).unwrap();
        assert_eq!(reps.get(leaf).unwrap(), prof("1", "010", "010").as_slice());
    }

    #[test]
    fn closed_form_instance_and_disjointness_embedding() {
        let f = choice(3).unwrap();
        assert_eq!(myerson_payment(&f, 0, &prof("1", "110", "010")).unwrap(), closed_form(Case::Up, 2, 1));
        assert_eq!(closed_form(Case::Up, 2, 1), Rational::from_int(2));
        let f5 = choice(5).unwrap();
        assert_eq!(myerson_payment(&f5, 0, &prof("4", "10100", "01010")).unwrap(), Rational::from_int(10));
        assert!(check_closed_forms(4).unwrap().mismatches.is_empty());
    }

    #[test]
    fn small_images() {
        let r1 = image_size(1).unwrap();
        assert!(r1.total >= 1);
        let r4 = image_size(4).unwrap();
        assert!(r4.within_bounds(4));
    }
}
