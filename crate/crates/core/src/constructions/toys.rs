//! Small hand-made instances used by the algorithm checks.

use std::collections::HashMap;
use std::sync::Arc;

use crate::constructions::{int_axis, int_of};
use crate::domain::{AlternativeId, Breakpoint, Grid, MultiParamDomain, PlayerDomain, ScalarSet, SingleParamDomain, Valuation};
use crate::error::{Error, Result};
use crate::myerson::FnChoice;
use crate::protocol::{LeafLabel, Node, ProtocolTree};
use crate::rational::Rational;

/// A function with a protocol and an exact grid, outside the named
/// constructions.
#[derive(Clone)]
pub struct Toy {
    pub name: String,
    pub f: Arc<FnChoice>,
    pub protocol: ProtocolTree,
    pub grid: Grid,
}

fn q(n: i64) -> Rational {
    Rational::from_int(n)
}

fn qs(values: &[i64]) -> Vec<Rational> {
    values.iter().map(|&v| q(v)).collect()
}

/// Two bidders with bids in `{0..3}` and one item; the higher bid wins, ties
/// go to bidder 0. Bidder 0 sends the bid, bidder 1 answers with one bit.
pub fn second_price() -> Result<Toy> {
    let bids = ScalarSet::range(4)?;
    let domains = vec![
        PlayerDomain::Single(SingleParamDomain::new(qs(&[1, 0]), bids.clone())?),
        PlayerDomain::Single(SingleParamDomain::new(qs(&[0, 1]), bids)?),
    ];
    let f = FnChoice::new("second-price", 2, domains, |p| {
        Ok(AlternativeId(usize::from(int_of(&p[1])? > int_of(&p[0])?)))
    });
    let children = (0..4u64)
        .map(|b0| {
            Node::decision(
                1,
                move |v| int_of(v).is_ok_and(|b1| b1 > b0),
                Node::leaf(LeafLabel::alt(0)),
                Node::leaf(LeafLabel::alt(1)),
            )
        })
        .collect();
    let protocol = ProtocolTree::new(2, Node::message(0, |v| Ok(int_of(v)? as usize), children))?;
    Ok(Toy { name: "second-price".into(), f: Arc::new(f), protocol, grid: Grid::new(vec![int_axis(4), int_axis(4)]) })
}

/// `f ≡ a_0` for two players on `[0, 2]` with constant weight 1.
pub fn constant() -> Result<Toy> {
    let d = SingleParamDomain::constant(2, q(1), ScalarSet::interval(q(2))?)?;
    let mut f = FnChoice::new("constant", 2, vec![PlayerDomain::Single(d.clone()), PlayerDomain::Single(d)], |_| {
        Ok(AlternativeId(0))
    });
    f.oracle = Some(Arc::new(|_, _| Some(Ok(vec![Breakpoint::new(Rational::zero(), AlternativeId(0))]))));
    let axis: Vec<Valuation> =
        ScalarSet::interval(q(2))?.grid(&Rational::new(1, 2)?).into_iter().map(Valuation::Scalar).collect();
    let protocol = ProtocolTree::new(2, Node::leaf(LeafLabel::alt(0)))?;
    Ok(Toy { name: "constant".into(), f: Arc::new(f), protocol, grid: Grid::new(vec![axis.clone(), axis]) })
}

/// Outcome of a two-alternative menu: the larger `v(a) − price(a)`, ties
/// to `a_0`.
fn menu_pick(v: &[Rational], prices: &[Rational; 2]) -> AlternativeId {
    AlternativeId(usize::from(&v[1] - &prices[1] > &v[0] - &prices[0]))
}

/// Steps of `s ↦ menu_pick(base + s·direction)` on `[0, 1]`.
fn menu_line(base: &[Rational], direction: &[Rational], prices: &[Rational; 2]) -> Vec<Breakpoint> {
    // a_0 is chosen while alpha + beta·s ≥ 0.
    let alpha = (&base[0] - &prices[0]) - (&base[1] - &prices[1]);
    let beta = &direction[0] - &direction[1];
    let at = |s: &Rational| AlternativeId(usize::from(&alpha + &(&beta * s) < Rational::zero()));
    let zero = Rational::zero();
    let mut out = vec![Breakpoint::new(zero.clone(), at(&zero))];
    if !beta.is_zero() {
        let root = -(&alpha / &beta);
        if root > zero && root < Rational::one() {
            // Past the root the other alternative takes over.
            let mid = (&root + &Rational::one()) / q(2);
            let after = at(&mid);
            if after != out[0].alternative {
                out.push(Breakpoint::new(root, after));
            }
        }
    }
    out
}

fn indifferent(points: Vec<Rational>) -> Result<PlayerDomain> {
    Ok(PlayerDomain::Single(SingleParamDomain::constant(2, Rational::zero(), ScalarSet::finite(points)?)?))
}

/// Player 0 owns the box `[0, 4]²` over two alternatives and faces the menu
/// `(1, 0)` when player 1 reports 0 and `(2, 0)` when it reports 1. Player 1
/// is indifferent.
pub fn scalable_box() -> Result<Toy> {
    let types: Vec<Vec<Rational>> = (0..=4).flat_map(|a| (0..=4).map(move |b| qs(&[a, b]))).collect();
    let membership: crate::domain::Membership =
        Arc::new(|v| v.iter().all(|x| !x.is_negative() && x <= &Rational::from_int(4)));
    let d0 = MultiParamDomain::new(2, types.clone())?.with_zero_type(0)?.with_membership(membership);
    let menus = [[q(1), q(0)], [q(2), q(0)]];
    let menu_of = move |p: &[Valuation]| -> Result<[Rational; 2]> {
        let t = int_of(&p[1])? as usize;
        menus.get(t).cloned().ok_or_else(|| Error::OutOfDomain { player: 1, detail: format!("type {t}") })
    };
    let menu_of = Arc::new(menu_of);
    let eval = {
        let menu_of = menu_of.clone();
        move |p: &[Valuation]| -> Result<AlternativeId> {
            let v = p[0].vector().ok_or_else(|| Error::OutOfDomain { player: 0, detail: "expected a vector".into() })?;
            Ok(menu_pick(v, &menu_of(p)?))
        }
    };
    let mut f = FnChoice::new("scalable-box", 2, vec![PlayerDomain::Multi(d0), indifferent(qs(&[0, 1]))?], eval);
    f.line_oracle = Some(Arc::new(move |player, base, direction, p| {
        (player == 0).then(|| Ok(menu_line(base, direction, &menu_of(p)?)))
    }));
    let protocol = menu_protocol(2, 2, |v0, t| {
        let v = v0.vector().ok_or_else(|| Error::OutOfDomain { player: 0, detail: "expected a vector".into() })?;
        Ok(menu_pick(v, &[[q(1), q(0)], [q(2), q(0)]][t]).0)
    })?;
    let grid = Grid::new(vec![types.into_iter().map(Valuation::Vector).collect(), int_axis(2)]);
    Ok(Toy { name: "scalable-box".into(), f: Arc::new(f), protocol, grid })
}

/// Player 1 sends its table id (here its type), then player 0 sends the
/// alternative under that table.
fn menu_protocol<F>(tables: usize, alternatives: usize, pick: F) -> Result<ProtocolTree>
where
    F: Fn(&Valuation, usize) -> Result<usize> + Clone + Send + Sync + 'static,
{
    let mut children: Vec<Node> = (0..tables)
        .map(|t| {
            let pick = pick.clone();
            Node::message(0, move |v| pick(v, t), (0..alternatives).map(|a| Node::leaf(LeafLabel::alt(a))).collect())
        })
        .collect();
    if tables == 1 {
        return ProtocolTree::new(2, children.remove(0));
    }
    ProtocolTree::new(2, Node::message(1, |v| Ok(int_of(v)? as usize), children))
}

/// A domain that is not closed under scaling: `{v : v(a_0) ≥ 1}`.
pub fn non_scalable_domain() -> Result<MultiParamDomain> {
    let membership: crate::domain::Membership = Arc::new(|v| v[0] >= Rational::one() && v.iter().all(|x| !x.is_negative()));
    Ok(MultiParamDomain::new(2, vec![qs(&[1, 0]), qs(&[2, 1]), qs(&[3, 3])])?.with_membership(membership))
}

/// Segment `λ(2,0) + (1−λ)(0,2)` for player 0 facing the zero menu; player 1
/// is indifferent with a single type.
pub fn segment() -> Result<Toy> {
    let types: Vec<Vec<Rational>> = (0..=4)
        .map(|i| {
            let l = Rational::new(i, 4).expect("nonzero");
            vec![&l * &q(2), (Rational::one() - &l) * q(2)]
        })
        .collect();
    let membership: crate::domain::Membership =
        Arc::new(|v| &v[0] + &v[1] == Rational::from_int(2) && !v[0].is_negative() && !v[1].is_negative());
    let d0 = MultiParamDomain::new(2, types.clone())?.with_membership(membership);
    let zero = [Rational::zero(), Rational::zero()];
    let mut f = FnChoice::new("segment", 2, vec![PlayerDomain::Multi(d0), indifferent(vec![Rational::zero()])?], move |p| {
        let v = p[0].vector().ok_or_else(|| Error::OutOfDomain { player: 0, detail: "expected a vector".into() })?;
        Ok(menu_pick(v, &[Rational::zero(), Rational::zero()]))
    });
    f.line_oracle =
        Some(Arc::new(move |player, base, direction, _| (player == 0).then(|| Ok(menu_line(base, direction, &zero)))));
    let protocol = menu_protocol(1, 2, |v0, _| {
        let v = v0.vector().ok_or_else(|| Error::OutOfDomain { player: 0, detail: "expected a vector".into() })?;
        Ok(menu_pick(v, &[Rational::zero(), Rational::zero()]).0)
    })?;
    let grid = Grid::new(vec![types.into_iter().map(Valuation::Vector).collect(), vec![Valuation::int(0)]]);
    Ok(Toy { name: "segment".into(), f: Arc::new(f), protocol, grid })
}

/// A multi-parameter instance given by tables: player 0 picks among
/// `types`; player 1's type selects which table maps types to alternatives.
#[derive(Clone, Debug)]
pub struct TableInstance {
    pub name: String,
    pub alternatives: usize,
    pub types: Vec<Vec<Rational>>,
    /// `tables[t][type]`.
    pub tables: Vec<Vec<usize>>,
    /// Table used by each type of player 1.
    pub table_of: Vec<usize>,
}

impl TableInstance {
    pub fn toy(&self) -> Result<Toy> {
        let index: Arc<HashMap<Vec<Rational>, usize>> =
            Arc::new(self.types.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect());
        let tables = Arc::new(self.tables.clone());
        let table_of = Arc::new(self.table_of.clone());
        let type_of = {
            let index = index.clone();
            move |v: &Valuation| -> Result<usize> {
                v.vector()
                    .and_then(|x| index.get(x).copied())
                    .ok_or_else(|| Error::OutOfDomain { player: 0, detail: format!("{v}") })
            }
        };
        let d0 = MultiParamDomain::new(self.alternatives, self.types.clone())?.with_zero_type(0)?;
        let d1 = PlayerDomain::Single(SingleParamDomain::constant(
            self.alternatives,
            Rational::zero(),
            ScalarSet::range(self.table_of.len() as u64)?,
        )?);
        let f = {
            let (tables, table_of, type_of) = (tables.clone(), table_of.clone(), type_of.clone());
            FnChoice::new(&self.name, self.alternatives, vec![PlayerDomain::Multi(d0), d1], move |p| {
                let t = int_of(&p[1])? as usize;
                let table = table_of.get(t).ok_or_else(|| Error::OutOfDomain { player: 1, detail: format!("type {t}") })?;
                Ok(AlternativeId(tables[*table][type_of(&p[0])?]))
            })
        };
        let children = (0..self.tables.len())
            .map(|t| {
                let (tables, type_of) = (tables.clone(), type_of.clone());
                Node::message(
                    0,
                    move |v| Ok(tables[t][type_of(v)?]),
                    (0..self.alternatives).map(|a| Node::leaf(LeafLabel::alt(a))).collect(),
                )
            })
            .collect();
        let table_of_msg = table_of.clone();
        let protocol = ProtocolTree::new(
            2,
            Node::message(1, move |v| Ok(table_of_msg[int_of(v)? as usize]), children),
        )?;
        let grid = Grid::new(vec![
            self.types.iter().cloned().map(Valuation::Vector).collect(),
            int_axis(self.table_of.len() as u64),
        ]);
        Ok(Toy { name: self.name.clone(), f: Arc::new(f), protocol, grid })
    }
}

/// Three alternatives, six types per player. Tables differ only on tied
/// types, so every table faces the same menu.
pub fn unique_three() -> TableInstance {
    let types = [[0, 0, 0], [0, 1, 1], [0, 1, 2], [0, 2, 4], [0, 3, 5], [0, 3, 7]];
    let a = vec![0, 0, 1, 1, 2, 2];
    let a2 = vec![0, 1, 0, 2, 1, 2];
    let c = vec![0, 0, 1, 1, 1, 1];
    let c2 = vec![0, 1, 0, 1, 1, 1];
    TableInstance {
        name: "unique-three".into(),
        alternatives: 3,
        types: types.iter().map(|t| qs(t)).collect(),
        tables: vec![a, a2, c, c2],
        table_of: vec![0, 0, 1, 2, 2, 3],
    }
}

/// Four alternatives, six types for player 0 and four for player 1.
pub fn unique_four() -> TableInstance {
    let types = [[0, 0, 0, 0], [0, 0, 1, 3], [0, 1, 2, 4], [0, 1, 3, 5], [0, 2, 3, 7], [0, 1, 1, 1]];
    TableInstance {
        name: "unique-four".into(),
        alternatives: 4,
        types: types.iter().map(|t| qs(t)).collect(),
        tables: vec![vec![0, 1, 2, 3, 3, 1], vec![0, 1, 2, 2, 2, 1]],
        table_of: vec![0, 0, 1, 1],
    }
}
