//! Moving a convex multi-parameter domain so that an anchor type becomes the
//! origin, and mapping payments back.

use std::sync::Arc;

use crate::domain::{MultiParamDomain, PlayerDomain, Valuation};
use crate::error::{Error, Result};
use crate::myerson::{myerson_payment, FnChoice, PaymentRule, SocialChoice};
use crate::rational::Rational;

use super::tie::{check_scalable, scalable_payment};

fn add(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn sub(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Midpoints of all enumerated pairs lie in the domain.
pub fn check_convex(d: &MultiParamDomain) -> Result<()> {
    let two = Rational::from_int(2);
    let types = d.types();
    for (i, a) in types.iter().enumerate() {
        for b in &types[i + 1..] {
            let mid: Vec<Rational> = a.iter().zip(b).map(|(x, y)| (x + y) / two.clone()).collect();
            if !d.contains(&mid) {
                return Err(Error::NotConvex(format!("midpoint of {a:?} and {b:?} is outside the domain")));
            }
        }
    }
    Ok(())
}

/// `f^t(v^t) = f(v^t + t)` for one player, everyone else unchanged.
#[derive(Clone)]
pub struct Translated {
    pub f: FnChoice,
    pub player: usize,
    pub anchor: Vec<Rational>,
}

impl Translated {
    pub fn to_translated(&self, v: &[Rational]) -> Vec<Rational> {
        sub(v, &self.anchor)
    }

    pub fn to_original(&self, v: &[Rational]) -> Vec<Rational> {
        add(v, &self.anchor)
    }

    fn shift_profile(&self, profile: &[Valuation]) -> Result<Vec<Valuation>> {
        let mut p = profile.to_vec();
        let v = p[self.player].vector().ok_or_else(|| Error::OutOfDomain {
            player: self.player,
            detail: "expected a vector valuation".into(),
        })?;
        p[self.player] = Valuation::Vector(self.to_translated(v));
        Ok(p)
    }

    /// `P^t_i` at the translated image of `profile`.
    pub fn translated_payment(&self, profile: &[Valuation]) -> Result<Rational> {
        scalable_payment(&self.f, self.player, &self.shift_profile(profile)?)
    }
}

/// Translates `player`'s domain of `f` by `−anchor`. The domain must be
/// convex on its enumerated types and contain the anchor; the image must
/// contain 0 and pass the scalability probe.
pub fn translate_convex(f: &FnChoice, player: usize, anchor: &[Rational]) -> Result<Translated> {
    let d = f
        .domain(player)
        .as_multi()
        .ok_or_else(|| Error::NotConvex(format!("player {player} is single-parameter")))?
        .clone();
    check_convex(&d)?;
    if !d.contains(anchor) {
        return Err(Error::InvalidDomain(format!("anchor {anchor:?} is outside the domain")));
    }
    let t = anchor.to_vec();
    let types: Vec<Vec<Rational>> = d.types().iter().map(|v| sub(v, &t)).collect();
    let zero = vec![Rational::zero(); t.len()];
    let inner = d.clone();
    let shift = t.clone();
    let mut shifted = MultiParamDomain::new(d.alternatives(), types.clone())?
        .with_membership(Arc::new(move |v: &[Rational]| inner.contains(&add(v, &shift))));
    if let Some(z) = types.iter().position(|v| v == &zero) {
        shifted = shifted.with_zero_type(z)?;
    }
    let mut domains = f.domains.clone();
    domains[player] = PlayerDomain::Multi(shifted);

    let back = {
        let t = t.clone();
        move |p: &[Valuation]| -> Result<Vec<Valuation>> {
            let mut p = p.to_vec();
            if let Some(v) = p[player].vector() {
                p[player] = Valuation::Vector(add(v, &t));
            }
            Ok(p)
        }
    };
    let eval = {
        let (orig, back) = (f.eval.clone(), back.clone());
        move |p: &[Valuation]| orig(&back(p)?)
    };
    let mut out = FnChoice::new(&format!("{}-translated", f.label), f.alternative_count, domains, eval);
    if let Some(o) = f.oracle.clone() {
        let back = back.clone();
        out.oracle = Some(Arc::new(move |i, p| match back(p) {
            Ok(p) => o(i, &p),
            Err(e) => Some(Err(e)),
        }));
    }
    if let Some(o) = f.line_oracle.clone() {
        let t = t.clone();
        out.line_oracle = Some(Arc::new(move |i, base, dir, p| {
            let p = match back(p) {
                Ok(p) => p,
                Err(e) => return Some(Err(e)),
            };
            if i == player {
                o(i, &add(base, &t), dir, &p)
            } else {
                o(i, base, dir, &p)
            }
        }));
    }
    if !out.domain(player).as_multi().is_some_and(|d| d.contains(&zero)) {
        return Err(Error::NotScalable("translated domain does not contain 0".into()));
    }
    check_scalable(&out, player)?;
    Ok(Translated { f: out, player, anchor: t })
}

/// Direction of the `t^a` correction when mapping payments back.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BackMapSign {
    /// `P(v) = P^t(v − t) + t(f(v))`, which preserves truthfulness.
    Plus,
    /// `P(v) = P^t(v − t) − t(f(v))`.
    Minus,
}

/// Payments on the original domain derived from the translated instance.
/// Players other than the translated one pay Myerson payments.
#[derive(Clone)]
pub struct TranslatedPayments {
    pub translated: Arc<Translated>,
    pub sign: BackMapSign,
}

impl PaymentRule for TranslatedPayments {
    fn name(&self) -> String {
        format!("translated({:?})", self.sign)
    }

    fn payment(&self, f: &dyn SocialChoice, player: usize, profile: &[Valuation]) -> Result<Rational> {
        let t = &self.translated;
        if player != t.player {
            return myerson_payment(f, player, profile);
        }
        let p_t = t.translated_payment(profile)?;
        let a = f.evaluate(profile)?;
        let corr = &t.anchor[a.0];
        Ok(match self.sign {
            BackMapSign::Plus => p_t + corr,
            BackMapSign::Minus => p_t - corr,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::toys;
    use crate::myerson::{find_profitable_deviation, Mechanism};

    fn q(n: i64) -> Rational {
        Rational::from_int(n)
    }

    #[test]
    fn segment_translation() {
        let s = toys::segment().unwrap();
        let anchor = vec![q(0), q(2)];
        let t = translate_convex(&s.f, 0, &anchor).unwrap();
        let d = t.f.domain(0).as_multi().unwrap();
        assert!(d.types().contains(&vec![q(2), q(-2)]));
        assert!(d.types().contains(&vec![q(0), q(0)]));
        s.grid
            .for_each("test", |p| {
                let pt = t.shift_profile(p)?;
                assert_eq!(t.f.evaluate(&pt)?, s.f.evaluate(p)?);
                Ok(true)
            })
            .unwrap();
        let t = Arc::new(t);
        let plus = Mechanism::new(s.f.clone(), Arc::new(TranslatedPayments { translated: t.clone(), sign: BackMapSign::Plus }));
        assert!(find_profitable_deviation(&plus, &s.grid).unwrap().is_none());
        let minus = Mechanism::new(s.f.clone(), Arc::new(TranslatedPayments { translated: t, sign: BackMapSign::Minus }));
        assert!(find_profitable_deviation(&minus, &s.grid).unwrap().is_some());
    }

    #[test]
    fn probes_reject_bad_domains() {
        let d = toys::non_scalable_domain().unwrap();
        let f = FnChoice::new("x", 2, vec![PlayerDomain::Multi(d)], |_| Ok(crate::domain::AlternativeId(0)));
        assert!(matches!(check_scalable(&f, 0), Err(Error::NotScalable(_))));
        let holes = MultiParamDomain::new(1, vec![vec![q(0)], vec![q(2)]]).unwrap();
        assert!(matches!(check_convex(&holes), Err(Error::NotConvex(_))));
    }
}
