//! Social choice functions, payment rules, menus, and the exhaustive
//! monotonicity / truthfulness checks.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;

use crate::domain::{
    step_integral, AlternativeId, Breakpoint, Grid, PlayerDomain, ScalarSet, Segment, SingleParamDomain, Valuation,
};
use crate::error::{Error, Result};
use crate::rational::{ExtendedRational, Rational};

/// `f : V₁ × … × Vₙ → A`, plus optional exact breakpoint oracles.
pub trait SocialChoice: Send + Sync {
    fn name(&self) -> String;
    fn players(&self) -> usize;
    fn alternatives(&self) -> usize;
    fn domain(&self, player: usize) -> &PlayerDomain;

    /// Evaluates `f`. Callers that did not validate the profile should use
    /// [`evaluate_checked`].
    fn evaluate(&self, profile: &[Valuation]) -> Result<AlternativeId>;

    /// Steps of `z ↦ f(z·w_i, v₋ᵢ)` on the scalar interval of `player`. The
    /// entry of `player` in `profile` is ignored.
    fn breakpoints(&self, _player: usize, _profile: &[Valuation]) -> Option<Result<Vec<Breakpoint>>> {
        None
    }

    /// Steps of `s ↦ f(base + s·direction, v₋ᵢ)` for `s ∈ [0, 1]`, for
    /// multi-parameter players.
    fn line_breakpoints(
        &self,
        _player: usize,
        _base: &[Rational],
        _direction: &[Rational],
        _profile: &[Valuation],
    ) -> Option<Result<Vec<Breakpoint>>> {
        None
    }
}

impl fmt::Debug for dyn SocialChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SocialChoice({})", self.name())
    }
}

pub fn validate_profile(f: &dyn SocialChoice, profile: &[Valuation]) -> Result<()> {
    if profile.len() != f.players() {
        return Err(Error::ProfileLength { expected: f.players(), got: profile.len() });
    }
    for (i, v) in profile.iter().enumerate() {
        if !f.domain(i).contains(v) {
            return Err(Error::OutOfDomain { player: i, detail: format!("{v} not in domain") });
        }
    }
    Ok(())
}

pub fn evaluate_checked(f: &dyn SocialChoice, profile: &[Valuation]) -> Result<AlternativeId> {
    validate_profile(f, profile)?;
    let a = f.evaluate(profile)?;
    AlternativeId::checked(a.0, f.alternatives())
}

/// Copy of `profile` with `player`'s entry replaced.
pub fn with_player(profile: &[Valuation], player: usize, v: Valuation) -> Vec<Valuation> {
    let mut p = profile.to_vec();
    p[player] = v;
    p
}

pub fn single_domain(f: &dyn SocialChoice, player: usize) -> Result<&SingleParamDomain> {
    f.domain(player).as_single().ok_or(Error::NotSingleParameter { player })
}

/// Merges consecutive segments of equal weight.
fn compress(segments: Vec<Segment>) -> Vec<Segment> {
    let mut out: Vec<Segment> = Vec::with_capacity(segments.len());
    for s in segments {
        if out.last().is_some_and(|l| l.weight == s.weight) {
            continue;
        }
        out.push(s);
    }
    out
}

/// The integrand `z ↦ w_i(f(z·w_i, v₋ᵢ))` as a step function. Finite scalar
/// sets are lifted by holding each point's weight until the next point; the
/// lowest point's weight also covers `[0, p₀)`.
pub fn weight_steps(f: &dyn SocialChoice, player: usize, profile: &[Valuation]) -> Result<Vec<Segment>> {
    let d = single_domain(f, player)?;
    match d.scalars() {
        ScalarSet::Finite(points) => {
            let mut p = profile.to_vec();
            let mut segs = Vec::with_capacity(points.len());
            for (k, r) in points.iter().enumerate() {
                p[player] = Valuation::Scalar(r.clone());
                let a = f.evaluate(&p)?;
                let start = if k == 0 { Rational::zero() } else { r.clone() };
                segs.push(Segment::new(start, d.weight(a).clone()));
            }
            Ok(compress(segs))
        }
        ScalarSet::Interval { .. } => {
            let bps = f.breakpoints(player, profile).ok_or(Error::MissingOracle { player })??;
            if bps.is_empty() || !bps[0].start.is_zero() || bps.windows(2).any(|w| w[0].start >= w[1].start) {
                return Err(Error::UnsortedBreakpoints);
            }
            let mut segs = Vec::with_capacity(bps.len());
            for b in bps {
                let a = AlternativeId::checked(b.alternative.0, f.alternatives())?;
                segs.push(Segment::new(b.start, d.weight(a).clone()));
            }
            Ok(compress(segs))
        }
    }
}

/// Normalized Myerson payment `r·w_i(f(v)) − ∫₀^r w_i(f(z·w_i, v₋ᵢ)) dz`.
pub fn myerson_payment(f: &dyn SocialChoice, player: usize, profile: &[Valuation]) -> Result<Rational> {
    let d = single_domain(f, player)?;
    let r = profile
        .get(player)
        .and_then(Valuation::scalar)
        .ok_or_else(|| Error::OutOfDomain { player, detail: "expected a scalar valuation".into() })?;
    if !d.scalars().contains(r) {
        return Err(Error::OutOfDomain { player, detail: format!("scalar {r:?} outside the domain") });
    }
    let a = f.evaluate(profile)?;
    let steps = weight_steps(f, player, profile)?;
    Ok(r * d.weight(a) - step_integral(&steps, r)?)
}

/// Checks that every oracle segment agrees with `evaluate` at its start and
/// midpoint, for every context in `grid`.
pub fn check_breakpoint_oracle(f: &dyn SocialChoice, player: usize, grid: &Grid) -> Result<bool> {
    let d = single_domain(f, player)?;
    let hi = d.scalars().max();
    let mut ok = true;
    grid.for_each_without(player, "oracle spot-check", |profile| {
        let Some(bps) = f.breakpoints(player, profile) else {
            return Err(Error::MissingOracle { player });
        };
        let bps = bps?;
        if bps.len() > f.alternatives() {
            ok = false;
            return Ok(false);
        }
        for (k, b) in bps.iter().enumerate() {
            if b.start > hi {
                continue;
            }
            let end = bps.get(k + 1).map(|n| n.start.clone().min(hi.clone())).unwrap_or_else(|| hi.clone());
            let mid = (&b.start + &end) / Rational::from_int(2);
            for z in [b.start.clone(), mid] {
                if !d.scalars().contains(&z) {
                    continue;
                }
                profile[player] = Valuation::Scalar(z);
                if f.evaluate(profile)? != b.alternative {
                    ok = false;
                    return Ok(false);
                }
            }
        }
        Ok(true)
    })?;
    Ok(ok)
}

/// A payment rule `P_i(v)`.
pub trait PaymentRule: Send + Sync {
    fn name(&self) -> String;
    fn payment(&self, f: &dyn SocialChoice, player: usize, profile: &[Valuation]) -> Result<Rational>;
}

/// Normalized Myerson payments for single-parameter players.
#[derive(Clone, Copy, Debug, Default)]
pub struct MyersonPayments;

impl PaymentRule for MyersonPayments {
    fn name(&self) -> String {
        "myerson".into()
    }
    fn payment(&self, f: &dyn SocialChoice, player: usize, profile: &[Valuation]) -> Result<Rational> {
        myerson_payment(f, player, profile)
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ZeroPayments;

impl PaymentRule for ZeroPayments {
    fn name(&self) -> String {
        "zero".into()
    }
    fn payment(&self, _f: &dyn SocialChoice, _player: usize, _profile: &[Valuation]) -> Result<Rational> {
        Ok(Rational::zero())
    }
}

/// Offset term `h_i(v₋ᵢ)`; receives the profile with `player`'s entry removed.
pub type OffsetFn = Arc<dyn Fn(usize, &[Valuation]) -> Rational + Send + Sync>;

/// `base + h_i(v₋ᵢ)`.
#[derive(Clone)]
pub struct OffsetPayments<P> {
    pub base: P,
    pub offset: OffsetFn,
}

impl<P: PaymentRule> PaymentRule for OffsetPayments<P> {
    fn name(&self) -> String {
        format!("{}+offset", self.base.name())
    }
    fn payment(&self, f: &dyn SocialChoice, player: usize, profile: &[Valuation]) -> Result<Rational> {
        let others: Vec<Valuation> =
            profile.iter().enumerate().filter(|(j, _)| *j != player).map(|(_, v)| v.clone()).collect();
        Ok(self.base.payment(f, player, profile)? + (self.offset)(player, &others))
    }
}

/// Clarke-pivot VCG: `max_a Σ_{j≠i} v_j(a) − Σ_{j≠i} v_j(f(v))`.
#[derive(Clone, Copy, Debug, Default)]
pub struct VcgPayments;

impl PaymentRule for VcgPayments {
    fn name(&self) -> String {
        "vcg".into()
    }
    fn payment(&self, f: &dyn SocialChoice, player: usize, profile: &[Valuation]) -> Result<Rational> {
        let others = |a: AlternativeId| -> Rational {
            (0..f.players()).filter(|&j| j != player).map(|j| f.domain(j).value(&profile[j], a)).sum()
        };
        let chosen = f.evaluate(profile)?;
        let best = (0..f.alternatives()).map(|a| others(AlternativeId(a))).max().unwrap_or_else(Rational::zero);
        Ok(best - others(chosen))
    }
}

/// Payments given by a closure.
#[derive(Clone)]
pub struct FnPayments {
    pub label: String,
    #[allow(clippy::type_complexity)]
    pub rule: Arc<dyn Fn(&dyn SocialChoice, usize, &[Valuation]) -> Result<Rational> + Send + Sync>,
}

impl PaymentRule for FnPayments {
    fn name(&self) -> String {
        self.label.clone()
    }
    fn payment(&self, f: &dyn SocialChoice, player: usize, profile: &[Valuation]) -> Result<Rational> {
        (self.rule)(f, player, profile)
    }
}

/// `M = (f, P)`.
#[derive(Clone)]
pub struct Mechanism {
    pub f: Arc<dyn SocialChoice>,
    pub payments: Arc<dyn PaymentRule>,
}

impl Mechanism {
    pub fn new(f: Arc<dyn SocialChoice>, payments: Arc<dyn PaymentRule>) -> Self {
        Mechanism { f, payments }
    }

    pub fn payment(&self, player: usize, profile: &[Valuation]) -> Result<Rational> {
        self.payments.payment(self.f.as_ref(), player, profile)
    }

    pub fn run(&self, profile: &[Valuation]) -> Result<(AlternativeId, Vec<Rational>)> {
        let a = evaluate_checked(self.f.as_ref(), profile)?;
        let p = (0..self.f.players()).map(|i| self.payment(i, profile)).collect::<Result<_>>()?;
        Ok((a, p))
    }
}

/// Closure-backed social choice function, for toys and wrappers.
#[derive(Clone)]
pub struct FnChoice {
    pub label: String,
    pub alternative_count: usize,
    pub domains: Vec<PlayerDomain>,
    #[allow(clippy::type_complexity)]
    pub eval: Arc<dyn Fn(&[Valuation]) -> Result<AlternativeId> + Send + Sync>,
    #[allow(clippy::type_complexity)]
    pub oracle: Option<Arc<dyn Fn(usize, &[Valuation]) -> Option<Result<Vec<Breakpoint>>> + Send + Sync>>,
    #[allow(clippy::type_complexity)]
    pub line_oracle:
        Option<Arc<dyn Fn(usize, &[Rational], &[Rational], &[Valuation]) -> Option<Result<Vec<Breakpoint>>> + Send + Sync>>,
}

impl FnChoice {
    pub fn new<F>(label: &str, alternative_count: usize, domains: Vec<PlayerDomain>, eval: F) -> Self
    where
        F: Fn(&[Valuation]) -> Result<AlternativeId> + Send + Sync + 'static,
    {
        FnChoice {
            label: label.to_string(),
            alternative_count,
            domains,
            eval: Arc::new(eval),
            oracle: None,
            line_oracle: None,
        }
    }
}

impl SocialChoice for FnChoice {
    fn name(&self) -> String {
        self.label.clone()
    }
    fn players(&self) -> usize {
        self.domains.len()
    }
    fn alternatives(&self) -> usize {
        self.alternative_count
    }
    fn domain(&self, player: usize) -> &PlayerDomain {
        &self.domains[player]
    }
    fn evaluate(&self, profile: &[Valuation]) -> Result<AlternativeId> {
        (self.eval)(profile)
    }
    fn breakpoints(&self, player: usize, profile: &[Valuation]) -> Option<Result<Vec<Breakpoint>>> {
        self.oracle.as_ref().and_then(|o| o(player, profile))
    }
    fn line_breakpoints(
        &self,
        player: usize,
        base: &[Rational],
        direction: &[Rational],
        profile: &[Valuation],
    ) -> Option<Result<Vec<Breakpoint>>> {
        self.line_oracle.as_ref().and_then(|o| o(player, base, direction, profile))
    }
}

/// `w_i(f(·, v₋ᵢ))` never decreases along the (sorted) grid axis of `player`.
pub fn check_monotone(f: &dyn SocialChoice, player: usize, grid: &Grid) -> Result<bool> {
    let d = single_domain(f, player)?;
    let mut axis: Vec<Rational> = grid.axis(player).iter().filter_map(|v| v.scalar().cloned()).collect();
    axis.sort();
    let count = grid.count_without(player) * axis.len();
    grid.ensure_within(&count, "monotonicity check")?;
    let mut ok = true;
    grid.for_each_without(player, "monotonicity check", |profile| {
        let mut last: Option<Rational> = None;
        for r in &axis {
            profile[player] = Valuation::Scalar(r.clone());
            let w = d.weight(f.evaluate(profile)?).clone();
            if last.as_ref().is_some_and(|l| &w < l) {
                ok = false;
                return Ok(false);
            }
            last = Some(w);
        }
        Ok(true)
    })?;
    Ok(ok)
}

/// A profitable misreport found by [`find_profitable_deviation`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Deviation {
    pub player: usize,
    pub truth: Vec<Valuation>,
    pub report: Valuation,
    pub gain: Rational,
}

/// Exhaustive ex-post IC check over the grid: for each player, context and
/// pair (true type, report) compares utilities.
pub fn find_profitable_deviation(m: &Mechanism, grid: &Grid) -> Result<Option<Deviation>> {
    let f = m.f.as_ref();
    for player in 0..f.players() {
        let axis = grid.axis(player).to_vec();
        let n = BigUint::from(axis.len());
        grid.ensure_within(&(grid.count_without(player) * &n), "truthfulness check")?;
        let dom = f.domain(player);
        let mut found = None;
        grid.for_each_without(player, "truthfulness check", |profile| {
            let mut outcomes = Vec::with_capacity(axis.len());
            for v in &axis {
                profile[player] = v.clone();
                let a = f.evaluate(profile)?;
                outcomes.push((a, m.payment(player, profile)?));
            }
            for (t, truth) in axis.iter().enumerate() {
                let honest = dom.value(truth, outcomes[t].0) - &outcomes[t].1;
                for (r, report) in axis.iter().enumerate() {
                    let lie = dom.value(truth, outcomes[r].0) - &outcomes[r].1;
                    if lie > honest {
                        let mut p = profile.clone();
                        p[player] = truth.clone();
                        found = Some(Deviation { player, truth: p, report: report.clone(), gain: lie - &honest });
                        return Ok(false);
                    }
                }
            }
            Ok(true)
        })?;
        if found.is_some() {
            return Ok(found);
        }
    }
    Ok(None)
}

pub fn verify_truthful(m: &Mechanism, grid: &Grid) -> Result<bool> {
    Ok(find_profitable_deviation(m, grid)?.is_none())
}

/// `|{P_i(v) : f(v) = a, v ∈ grid}|`.
pub fn payment_count(
    f: &dyn SocialChoice,
    payments: &dyn PaymentRule,
    player: usize,
    a: AlternativeId,
    grid: &Grid,
) -> Result<usize> {
    let mut prices = BTreeSet::new();
    grid.for_each("payment count", |profile| {
        if f.evaluate(profile)? == a {
            prices.insert(payments.payment(f, player, profile)?);
        }
        Ok(true)
    })?;
    Ok(prices.len())
}

/// How many contexts `v₋ᵢ` of the grid face each price of `a`, reading the
/// price at the first type on the axis that reaches `a`.
pub fn price_multiplicities(
    f: &dyn SocialChoice,
    payments: &dyn PaymentRule,
    player: usize,
    a: AlternativeId,
    grid: &Grid,
) -> Result<BTreeMap<Rational, u64>> {
    grid.ensure_within(&grid.count(), "price multiplicities")?;
    let axis = grid.axis(player).to_vec();
    let mut out = BTreeMap::new();
    grid.for_each_without(player, "price multiplicities", |p| {
        for v in &axis {
            p[player] = v.clone();
            if f.evaluate(p)? == a {
                *out.entry(payments.payment(f, player, p)?).or_insert(0) += 1;
                break;
            }
        }
        Ok(true)
    })?;
    Ok(out)
}

/// Per-alternative prices faced by one player (taxation principle view).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Menu {
    pub owner: usize,
    /// The full profile with the owner's slot holding an arbitrary placeholder.
    pub context: Vec<Valuation>,
    pub prices: Vec<ExtendedRational>,
}

impl Menu {
    pub fn price(&self, a: AlternativeId) -> &ExtendedRational {
        &self.prices[a.0]
    }

    pub fn reachable(&self) -> Vec<AlternativeId> {
        (0..self.prices.len()).filter(|&a| self.prices[a].is_finite()).map(AlternativeId).collect()
    }

    /// Does `f(v, v₋ᵢ)` maximize `v(a) − price(a)` for every `v` on the axis?
    pub fn is_consistent(&self, f: &dyn SocialChoice, axis: &[Valuation]) -> Result<bool> {
        let dom = f.domain(self.owner);
        let mut p = self.context.clone();
        for v in axis {
            p[self.owner] = v.clone();
            let chosen = f.evaluate(&p)?;
            let Some(chosen_price) = self.prices[chosen.0].finite() else { return Ok(false) };
            let u = dom.value(v, chosen) - chosen_price;
            for a in self.reachable() {
                let pa = self.prices[a.0].finite().expect("reachable alternatives are priced");
                if dom.value(v, a) - pa > u {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// Witness scalars for a single-parameter player: the grid axis plus the start
/// of every oracle segment inside the domain.
pub fn witness_axis(f: &dyn SocialChoice, player: usize, profile: &[Valuation], axis: &[Valuation]) -> Vec<Valuation> {
    let mut out: BTreeSet<Valuation> = axis.iter().cloned().collect();
    if let (Some(d), Some(Ok(bps))) = (f.domain(player).as_single(), f.breakpoints(player, profile)) {
        for b in bps {
            if d.scalars().contains(&b.start) {
                out.insert(Valuation::Scalar(b.start));
            }
        }
    }
    out.into_iter().collect()
}

/// Builds the menu of `player` given `context`, reading each alternative's
/// price off the payments of the types in `axis` that reach it.
pub fn build_menu(
    f: &dyn SocialChoice,
    payments: &dyn PaymentRule,
    player: usize,
    context: &[Valuation],
    axis: &[Valuation],
) -> Result<Menu> {
    let mut prices = vec![ExtendedRational::PosInfinity; f.alternatives()];
    let mut p = context.to_vec();
    for v in axis {
        p[player] = v.clone();
        let a = f.evaluate(&p)?;
        let price = payments.payment(f, player, &p)?;
        match &prices[a.0] {
            ExtendedRational::Finite(existing) if existing != &price => {
                return Err(Error::TaxationViolation {
                    player,
                    alternative: a.0,
                    detail: format!("prices {existing:?} and {price:?} for the same alternative"),
                });
            }
            _ => prices[a.0] = ExtendedRational::Finite(price),
        }
    }
    Ok(Menu { owner: player, context: context.to_vec(), prices })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    /// Two alternatives, w = (0, 1), threshold at `t` on [0, 3]; the other
    /// player is a dummy with w ≡ 0.
    fn threshold_toy(t: &str, upward: bool) -> FnChoice {
        let t = q(t);
        let t2 = t.clone();
        let d0 = SingleParamDomain::new(vec![q("0"), q("1")], ScalarSet::interval(q("3")).unwrap()).unwrap();
        let d1 = SingleParamDomain::constant(2, q("0"), ScalarSet::range(2).unwrap()).unwrap();
        let mut f = FnChoice::new("threshold", 2, vec![PlayerDomain::Single(d0), PlayerDomain::Single(d1)], move |p| {
            let r = p[0].scalar().unwrap();
            let high = r >= &t;
            Ok(AlternativeId(usize::from(high == upward)))
        });
        f.oracle = Some(Arc::new(move |player, _p| {
            if player != 0 {
                return None;
            }
            let (lo, hi) = if upward { (0, 1) } else { (1, 0) };
            Some(Ok(vec![Breakpoint::new(q("0"), AlternativeId(lo)), Breakpoint::new(t2.clone(), AlternativeId(hi))]))
        }));
        f
    }

    fn grid() -> Grid {
        Grid::new(vec![
            ScalarSet::interval(q("3")).unwrap().grid(&q("1/2")).into_iter().map(Valuation::Scalar).collect(),
            vec![Valuation::int(0), Valuation::int(1)],
        ])
    }

    #[test]
    fn monotone_and_anti_monotone() {
        assert!(check_monotone(&threshold_toy("1", true), 0, &grid()).unwrap());
        assert!(!check_monotone(&threshold_toy("1", false), 0, &grid()).unwrap());
    }

    #[test]
    fn myerson_on_threshold_is_the_threshold() {
        let f = threshold_toy("3/2", true);
        let p = myerson_payment(&f, 0, &[Valuation::Scalar(q("5/2")), Valuation::int(0)]).unwrap();
        assert_eq!(p, q("3/2"));
        let p0 = myerson_payment(&f, 0, &[Valuation::Scalar(q("0")), Valuation::int(0)]).unwrap();
        assert_eq!(p0, q("0"));
        assert!(myerson_payment(&f, 0, &[Valuation::Scalar(q("4")), Valuation::int(0)]).is_err());
        assert!(check_breakpoint_oracle(&f, 0, &grid()).unwrap());
    }

    #[test]
    fn truthfulness_of_threshold_payments() {
        let f: Arc<dyn SocialChoice> = Arc::new(threshold_toy("1", true));
        let good = Mechanism::new(f.clone(), Arc::new(MyersonPayments));
        assert!(verify_truthful(&good, &grid()).unwrap());
        let bad = Mechanism::new(f, Arc::new(ZeroPayments));
        let dev = find_profitable_deviation(&bad, &grid()).unwrap().unwrap();
        assert_eq!(dev.player, 0);
    }

    #[test]
    fn finite_lift_uses_lowest_point_below_minimum() {
        let d0 = SingleParamDomain::new(vec![q("0"), q("1")], ScalarSet::finite(vec![q("2"), q("4")]).unwrap()).unwrap();
        let f = FnChoice::new("lift", 2, vec![PlayerDomain::Single(d0)], |p| {
            Ok(AlternativeId(usize::from(p[0].scalar().unwrap() >= &q("4"))))
        });
        let steps = weight_steps(&f, 0, &[Valuation::int(2)]).unwrap();
        assert_eq!(steps, vec![Segment::new(q("0"), q("0")), Segment::new(q("4"), q("1"))]);
        assert_eq!(myerson_payment(&f, 0, &[Valuation::int(4)]).unwrap(), q("4"));
    }

    #[test]
    fn menu_and_taxation() {
        let f = threshold_toy("1", true);
        let ctx = vec![Valuation::int(0), Valuation::int(0)];
        let axis = grid().axis(0).to_vec();
        let menu = build_menu(&f, &MyersonPayments, 0, &ctx, &axis).unwrap();
        assert_eq!(menu.prices, vec![ExtendedRational::Finite(q("0")), ExtendedRational::Finite(q("1"))]);
        assert!(menu.is_consistent(&f, &axis).unwrap());
        let weird = FnPayments {
            label: "r".into(),
            rule: Arc::new(|_f, i, p: &[Valuation]| Ok(p[i].scalar().unwrap().clone())),
        };
        assert!(matches!(build_menu(&f, &weird, 0, &ctx, &axis), Err(Error::TaxationViolation { .. })));
    }

    #[test]
    fn vcg_is_clarke_pivot() {
        // Single item, two bidders, a_i = bidder i wins.
        let dom = |i: usize| {
            let mut w = vec![q("0"), q("0")];
            w[i] = q("1");
            PlayerDomain::Single(SingleParamDomain::new(w, ScalarSet::range(4).unwrap()).unwrap())
        };
        let f = FnChoice::new("spa", 2, vec![dom(0), dom(1)], |p| {
            Ok(AlternativeId(usize::from(p[1].scalar().unwrap() > p[0].scalar().unwrap())))
        });
        let p = [Valuation::int(3), Valuation::int(2)];
        assert_eq!(VcgPayments.payment(&f, 0, &p).unwrap(), q("2"));
        assert_eq!(VcgPayments.payment(&f, 1, &p).unwrap(), q("0"));
    }

    #[test]
    fn multiplicities_agree_with_payment_count() {
        for k in [1, 2] {
            let c = crate::constructions::proof1::build(k).unwrap();
            let top = AlternativeId((1 << k) as usize);
            let m = price_multiplicities(c.f.as_ref(), &MyersonPayments, 0, top, &c.grid).unwrap();
            assert_eq!(m.len(), payment_count(c.f.as_ref(), &MyersonPayments, 0, top, &c.grid).unwrap());
            assert!(m.values().all(|&n| n == 1));
        }
    }
}
