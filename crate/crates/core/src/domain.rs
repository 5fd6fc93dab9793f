//! Alternatives, valuation domains, profiles and enumeration grids.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Default cap on the number of items an exhaustive check may enumerate.
pub const DEFAULT_CAP: u64 = 1 << 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AlternativeId(pub usize);

impl AlternativeId {
    pub fn index(self) -> usize {
        self.0
    }

    pub fn checked(index: usize, count: usize) -> Result<Self> {
        if index < count {
            Ok(AlternativeId(index))
        } else {
            Err(Error::AlternativeOutOfRange { index, count })
        }
    }
}

impl fmt::Display for AlternativeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a{}", self.0)
    }
}

/// The private scalar of a single-parameter player.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ScalarSet {
    /// `[0, hi]`.
    Interval { hi: Rational },
    /// Strictly increasing, non-negative points.
    Finite(Vec<Rational>),
}

impl ScalarSet {
    pub fn interval(hi: Rational) -> Result<Self> {
        if hi <= Rational::zero() {
            return Err(Error::InvalidDomain(format!("interval upper end {hi:?} must be > 0")));
        }
        Ok(ScalarSet::Interval { hi })
    }

    pub fn finite(points: Vec<Rational>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidDomain("finite scalar set is empty".into()));
        }
        if points[0].is_negative() {
            return Err(Error::InvalidDomain("scalars must be non-negative".into()));
        }
        if points.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidDomain("finite scalar set must be strictly sorted".into()));
        }
        Ok(ScalarSet::Finite(points))
    }

    /// `{0, 1, …, n-1}`.
    pub fn range(n: u64) -> Result<Self> {
        ScalarSet::finite((0..n).map(|i| Rational::from_int(i as i64)).collect())
    }

    pub fn contains(&self, r: &Rational) -> bool {
        match self {
            ScalarSet::Interval { hi } => !r.is_negative() && r <= hi,
            ScalarSet::Finite(points) => points.binary_search(r).is_ok(),
        }
    }

    pub fn min(&self) -> Rational {
        match self {
            ScalarSet::Interval { .. } => Rational::zero(),
            ScalarSet::Finite(points) => points[0].clone(),
        }
    }

    pub fn max(&self) -> Rational {
        match self {
            ScalarSet::Interval { hi } => hi.clone(),
            ScalarSet::Finite(points) => points[points.len() - 1].clone(),
        }
    }

    /// Largest point `≤ r` of a finite set.
    pub fn floor_point(&self, r: &Rational) -> Option<&Rational> {
        match self {
            ScalarSet::Interval { .. } => None,
            ScalarSet::Finite(points) => {
                let idx = points.partition_point(|p| p <= r);
                idx.checked_sub(1).map(|i| &points[i])
            }
        }
    }

    /// Smallest domain point strictly between `lo` and `hi` (`hi = None` means
    /// unbounded). Intervals return the midpoint of the clipped range.
    pub fn point_strictly_between(&self, lo: &Rational, hi: Option<&Rational>) -> Option<Rational> {
        match self {
            ScalarSet::Interval { hi: end } => {
                let top = match hi {
                    Some(h) if h <= end => h.clone(),
                    _ => end.clone(),
                };
                let bottom = if lo.is_negative() { Rational::zero() } else { lo.clone() };
                if &bottom >= &top {
                    return None;
                }
                let mid = (&bottom + &top) / Rational::from_int(2);
                if &mid > lo && hi.is_none_or(|h| &mid < h) {
                    Some(mid)
                } else {
                    None
                }
            }
            ScalarSet::Finite(points) => {
                let idx = points.partition_point(|p| p <= lo);
                points.get(idx).filter(|p| hi.is_none_or(|h| *p < h)).cloned()
            }
        }
    }

    /// Enumeration grid: every point of a finite set, or the multiples of
    /// `step` in `[0, hi]` (plus `hi`) for an interval.
    pub fn grid(&self, step: &Rational) -> Vec<Rational> {
        match self {
            ScalarSet::Finite(points) => points.clone(),
            ScalarSet::Interval { hi } => {
                let mut out = Vec::new();
                let mut r = Rational::zero();
                while &r <= hi {
                    out.push(r.clone());
                    r = &r + step;
                }
                if out.last() != Some(hi) {
                    out.push(hi.clone());
                }
                out
            }
        }
    }
}

/// A public weight vector plus a private scalar set: `v(a) = r·w(a)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SingleParamDomain {
    weights: Vec<Rational>,
    scalars: ScalarSet,
}

impl SingleParamDomain {
    pub fn new(weights: Vec<Rational>, scalars: ScalarSet) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidDomain("weight vector is empty".into()));
        }
        Ok(SingleParamDomain { weights, scalars })
    }

    /// Same weight for every alternative.
    pub fn constant(alternatives: usize, w: Rational, scalars: ScalarSet) -> Result<Self> {
        SingleParamDomain::new(vec![w; alternatives], scalars)
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn weight(&self, a: AlternativeId) -> &Rational {
        &self.weights[a.0]
    }

    pub fn scalars(&self) -> &ScalarSet {
        &self.scalars
    }

    /// Distinct weights in increasing order (`Im w`).
    pub fn levels(&self) -> Vec<Rational> {
        let mut l = self.weights.clone();
        l.sort();
        l.dedup();
        l
    }
}

/// Membership test for a multi-parameter domain given as a predicate.
pub type Membership = Arc<dyn Fn(&[Rational]) -> bool + Send + Sync>;

/// A multi-parameter domain: an enumerated list of value vectors, optionally
/// backed by a membership predicate when the true domain is infinite.
#[derive(Clone)]
pub struct MultiParamDomain {
    alternatives: usize,
    types: Vec<Vec<Rational>>,
    zero_type: Option<usize>,
    membership: Option<Membership>,
}

impl fmt::Debug for MultiParamDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MultiParamDomain")
            .field("alternatives", &self.alternatives)
            .field("types", &self.types.len())
            .field("zero_type", &self.zero_type)
            .field("predicate", &self.membership.is_some())
            .finish()
    }
}

impl MultiParamDomain {
    pub fn new(alternatives: usize, types: Vec<Vec<Rational>>) -> Result<Self> {
        if types.is_empty() {
            return Err(Error::InvalidDomain("multi-parameter domain has no types".into()));
        }
        if let Some(t) = types.iter().find(|t| t.len() != alternatives) {
            return Err(Error::InvalidDomain(format!(
                "type of length {} in a domain over {alternatives} alternatives",
                t.len()
            )));
        }
        Ok(MultiParamDomain { alternatives, types, zero_type: None, membership: None })
    }

    /// Marks `types[index]` as the zero type used for normalization.
    pub fn with_zero_type(mut self, index: usize) -> Result<Self> {
        if index >= self.types.len() {
            return Err(Error::InvalidDomain(format!("zero type index {index} out of range")));
        }
        self.zero_type = Some(index);
        Ok(self)
    }

    pub fn with_membership(mut self, membership: Membership) -> Self {
        self.membership = Some(membership);
        self
    }

    pub fn alternatives(&self) -> usize {
        self.alternatives
    }

    pub fn types(&self) -> &[Vec<Rational>] {
        &self.types
    }

    pub fn zero_type(&self) -> Option<&[Rational]> {
        self.zero_type.map(|i| self.types[i].as_slice())
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        if v.len() != self.alternatives {
            return false;
        }
        match &self.membership {
            Some(m) => m(v),
            None => self.types.iter().any(|t| t.as_slice() == v),
        }
    }
}

#[derive(Clone, Debug)]
pub enum PlayerDomain {
    Single(SingleParamDomain),
    Multi(MultiParamDomain),
}

impl PlayerDomain {
    pub fn as_single(&self) -> Option<&SingleParamDomain> {
        match self {
            PlayerDomain::Single(d) => Some(d),
            PlayerDomain::Multi(_) => None,
        }
    }

    pub fn as_multi(&self) -> Option<&MultiParamDomain> {
        match self {
            PlayerDomain::Multi(d) => Some(d),
            PlayerDomain::Single(_) => None,
        }
    }

    pub fn alternatives(&self) -> usize {
        match self {
            PlayerDomain::Single(d) => d.weights.len(),
            PlayerDomain::Multi(d) => d.alternatives,
        }
    }

    pub fn contains(&self, v: &Valuation) -> bool {
        match (self, v) {
            (PlayerDomain::Single(d), Valuation::Scalar(r)) => d.scalars.contains(r),
            (PlayerDomain::Multi(d), Valuation::Vector(values)) => d.contains(values),
            _ => false,
        }
    }

    /// `v(a)`.
    pub fn value(&self, v: &Valuation, a: AlternativeId) -> Rational {
        match (self, v) {
            (PlayerDomain::Single(d), Valuation::Scalar(r)) => r * d.weight(a),
            (_, Valuation::Vector(values)) => values[a.0].clone(),
            (PlayerDomain::Multi(_), Valuation::Scalar(r)) => r.clone(),
        }
    }

    /// The zero type, when the domain has one.
    pub fn zero_valuation(&self) -> Option<Valuation> {
        match self {
            PlayerDomain::Single(d) => {
                let z = Rational::zero();
                d.scalars.contains(&z).then_some(Valuation::Scalar(z))
            }
            PlayerDomain::Multi(d) => d.zero_type().map(|t| Valuation::Vector(t.to_vec())),
        }
    }

    /// Enumeration axis; `step` discretizes single-parameter intervals.
    pub fn grid(&self, step: &Rational) -> Vec<Valuation> {
        match self {
            PlayerDomain::Single(d) => {
                d.scalars.grid(step).into_iter().map(Valuation::Scalar).collect()
            }
            PlayerDomain::Multi(d) => d.types.iter().cloned().map(Valuation::Vector).collect(),
        }
    }
}

/// One player's type.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Valuation {
    /// Single-parameter: `v(a) = r·w(a)`.
    Scalar(Rational),
    /// Multi-parameter: one value per alternative.
    Vector(Vec<Rational>),
}

impl Valuation {
    pub fn scalar(&self) -> Option<&Rational> {
        match self {
            Valuation::Scalar(r) => Some(r),
            Valuation::Vector(_) => None,
        }
    }

    pub fn vector(&self) -> Option<&[Rational]> {
        match self {
            Valuation::Vector(v) => Some(v),
            Valuation::Scalar(_) => None,
        }
    }

    pub fn int(n: i64) -> Valuation {
        Valuation::Scalar(Rational::from_int(n))
    }

    pub fn vec_of(values: &[i64]) -> Valuation {
        Valuation::Vector(values.iter().map(|&x| Rational::from_int(x)).collect())
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Scalar(r) => write!(f, "{r}"),
            Valuation::Vector(v) => {
                f.write_str("(")?;
                for (i, x) in v.iter().enumerate() {
                    if i > 0 {
                        f.write_str(";")?;
                    }
                    write!(f, "{x}")?;
                }
                f.write_str(")")
            }
        }
    }
}

pub type Profile = Vec<Valuation>;

/// Piece of a step function: `weight` from `start` up to the next start.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Segment {
    pub start: Rational,
    pub weight: Rational,
}

impl Segment {
    pub fn new(start: Rational, weight: Rational) -> Self {
        Segment { start, weight }
    }
}

/// `∫₀^upper` of the step function described by `segments`. The last segment
/// extends to infinity.
pub fn step_integral(segments: &[Segment], upper: &Rational) -> Result<Rational> {
    if upper.is_negative() {
        return Err(Error::NegativeUpper);
    }
    match segments.first() {
        Some(s) if s.start.is_zero() => {}
        _ => return Err(Error::UnsortedBreakpoints),
    }
    if segments.windows(2).any(|w| w[0].start >= w[1].start) {
        return Err(Error::UnsortedBreakpoints);
    }
    let mut total = Rational::zero();
    for (i, seg) in segments.iter().enumerate() {
        if &seg.start >= upper {
            break;
        }
        let end = match segments.get(i + 1) {
            Some(next) if &next.start < upper => next.start.clone(),
            _ => upper.clone(),
        };
        total += &((end - &seg.start) * &seg.weight);
    }
    Ok(total)
}

/// Breakpoint of `z ↦ f(z·w_i, v₋ᵢ)` (or of a line through a multi-parameter
/// domain): from `start` on, the outcome is `alternative`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Breakpoint {
    pub start: Rational,
    pub alternative: AlternativeId,
}

impl Breakpoint {
    pub fn new(start: Rational, alternative: AlternativeId) -> Self {
        Breakpoint { start, alternative }
    }
}

/// Cartesian product of per-player enumeration axes, iterated in
/// lexicographic order with player 0 most significant.
#[derive(Clone, Debug)]
pub struct Grid {
    axes: Vec<Vec<Valuation>>,
    cap: u64,
}

impl Grid {
    pub fn new(axes: Vec<Vec<Valuation>>) -> Self {
        Grid { axes, cap: DEFAULT_CAP }
    }

    pub fn with_cap(mut self, cap: u64) -> Self {
        self.cap = cap;
        self
    }

    pub fn cap(&self) -> u64 {
        self.cap
    }

    pub fn axes(&self) -> &[Vec<Valuation>] {
        &self.axes
    }

    pub fn axis(&self, player: usize) -> &[Valuation] {
        &self.axes[player]
    }

    pub fn players(&self) -> usize {
        self.axes.len()
    }

    /// Replaces one player's axis.
    pub fn with_axis(mut self, player: usize, axis: Vec<Valuation>) -> Self {
        self.axes[player] = axis;
        self
    }

    pub fn count(&self) -> BigUint {
        self.axes.iter().fold(BigUint::one(), |acc, a| acc * a.len())
    }

    /// Number of profiles of everyone but `player`.
    pub fn count_without(&self, player: usize) -> BigUint {
        self.axes
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != player)
            .fold(BigUint::one(), |acc, (_, a)| acc * a.len())
    }

    /// Fails with `ScaleExceeded` when `count` is above the cap.
    pub fn ensure_within(&self, count: &BigUint, what: &str) -> Result<()> {
        if count > &BigUint::from(self.cap) {
            return Err(Error::ScaleExceeded {
                what: what.to_string(),
                count: count.to_string(),
                cap: self.cap,
            });
        }
        Ok(())
    }

    /// Calls `visit` on every profile, stopping early when it returns
    /// `Ok(false)`. Checked against the cap first.
    pub fn for_each<F>(&self, what: &str, mut visit: F) -> Result<()>
    where
        F: FnMut(&[Valuation]) -> Result<bool>,
    {
        self.ensure_within(&self.count(), what)?;
        if self.axes.iter().any(|a| a.is_empty()) {
            return Ok(());
        }
        let mut idx = vec![0usize; self.axes.len()];
        let mut profile: Vec<Valuation> = self.axes.iter().map(|a| a[0].clone()).collect();
        loop {
            if !visit(&profile)? {
                return Ok(());
            }
            let mut p = self.axes.len();
            loop {
                if p == 0 {
                    return Ok(());
                }
                p -= 1;
                idx[p] += 1;
                if idx[p] < self.axes[p].len() {
                    profile[p] = self.axes[p][idx[p]].clone();
                    break;
                }
                idx[p] = 0;
                profile[p] = self.axes[p][0].clone();
            }
        }
    }

    /// Calls `visit` on every profile of the other players; slot `player` of
    /// the profile handed to `visit` is a placeholder to be overwritten.
    pub fn for_each_without<F>(&self, player: usize, what: &str, mut visit: F) -> Result<()>
    where
        F: FnMut(&mut Vec<Valuation>) -> Result<bool>,
    {
        let mut reduced = self.clone();
        let placeholder = self.axes[player].first().cloned();
        let Some(placeholder) = placeholder else { return Ok(()) };
        reduced.axes[player] = vec![placeholder];
        reduced.for_each(what, |p| {
            let mut owned = p.to_vec();
            visit(&mut owned)
        })
    }

    pub fn count_u64(&self) -> Option<u64> {
        self.count().to_u64()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn segs(pairs: &[(i64, i64)]) -> Vec<Segment> {
        pairs.iter().map(|&(s, w)| Segment::new(q(&s.to_string()), q(&w.to_string()))).collect()
    }

    #[test]
    fn integral_examples() {
        assert_eq!(step_integral(&segs(&[(0, 0)]), &q("5")).unwrap(), q("0"));
        // (0,0),(1,80),(2,6560) up to 3: 0 + 80 + 6560.
        assert_eq!(step_integral(&segs(&[(0, 0), (1, 80), (2, 6560)]), &q("3")).unwrap(), q("6640"));
        assert_eq!(step_integral(&segs(&[(0, 0), (1, 1), (2, 2), (3, 3)]), &q("4")).unwrap(), q("6"));
        assert_eq!(step_integral(&segs(&[(0, 2), (1, 4)]), &q("1/2")).unwrap(), q("1"));
    }

    #[test]
    fn integral_rejects_bad_input() {
        assert!(matches!(step_integral(&segs(&[(0, 1), (0, 2)]), &q("1")), Err(Error::UnsortedBreakpoints)));
        assert!(matches!(step_integral(&segs(&[(1, 1)]), &q("1")), Err(Error::UnsortedBreakpoints)));
        assert!(matches!(step_integral(&segs(&[]), &q("1")), Err(Error::UnsortedBreakpoints)));
        assert!(matches!(step_integral(&segs(&[(0, 1)]), &q("-1")), Err(Error::NegativeUpper)));
    }

    #[test]
    fn scalar_sets() {
        assert!(ScalarSet::interval(q("0")).is_err());
        assert!(ScalarSet::finite(vec![]).is_err());
        assert!(ScalarSet::finite(vec![q("1"), q("1")]).is_err());
        assert!(ScalarSet::finite(vec![q("-1")]).is_err());
        let s = ScalarSet::finite(vec![q("0"), q("2"), q("5")]).unwrap();
        assert_eq!(s.floor_point(&q("4")), Some(&q("2")));
        assert_eq!(s.floor_point(&q("-1")), None);
        assert_eq!(s.point_strictly_between(&q("0"), Some(&q("5"))), Some(q("2")));
        assert_eq!(s.point_strictly_between(&q("2"), Some(&q("5"))), None);
        let i = ScalarSet::interval(q("3")).unwrap();
        assert_eq!(i.grid(&q("1/2")).len(), 7);
        assert_eq!(ScalarSet::interval(q("5/2")).unwrap().grid(&q("1")).last(), Some(&q("5/2")));
        assert_eq!(i.point_strictly_between(&q("1"), Some(&q("2"))), Some(q("3/2")));
        assert_eq!(i.point_strictly_between(&q("3"), None), None);
    }

    #[test]
    fn grid_is_lexicographic_and_capped() {
        let g = Grid::new(vec![vec![Valuation::int(0), Valuation::int(1)], vec![Valuation::int(5), Valuation::int(6)]]);
        let mut seen = Vec::new();
        g.for_each("t", |p| {
            seen.push(p.to_vec());
            Ok(true)
        })
        .unwrap();
        assert_eq!(seen.len(), 4);
        assert_eq!(seen[1], vec![Valuation::int(0), Valuation::int(6)]);
        assert!(seen.windows(2).all(|w| w[0] < w[1]));
        let capped = g.clone().with_cap(3);
        assert!(matches!(capped.for_each("t", |_| Ok(true)), Err(Error::ScaleExceeded { .. })));
    }
}
