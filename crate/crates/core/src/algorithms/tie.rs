//! Truthful-in-expectation payments: one extra run of `f` per player at a
//! random point below the leaf representative.

use rand::Rng;

use crate::domain::{AlternativeId, ScalarSet, Valuation};
use crate::error::{Error, Result};
use crate::myerson::{single_domain, SocialChoice};
use crate::protocol::{ProtocolTree, Representatives};
use crate::rational::Rational;

/// One draw of the estimator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TieSample {
    pub value: Rational,
    /// Bits of the extra run (0 when `r* = 0`).
    pub bits: u64,
    /// Point at which `f` was re-run, as a scalar or a scale factor.
    pub point: Rational,
}

/// Uniform dyadic rational in `[0, 1)` at resolution `2⁻⁶⁴`.
pub fn dyadic_uniform<R: Rng + ?Sized>(rng: &mut R) -> Rational {
    Rational::dyadic_unit(rng.gen::<u64>())
}

/// Scalar of `player` in the representative of `leaf`.
fn representative<'a>(reps: &'a Representatives, leaf: usize, player: usize) -> Result<&'a Valuation> {
    reps.get(leaf)
        .map(|r| &r[player])
        .ok_or_else(|| Error::ProtocolIntegrity(format!("leaf {leaf} has no representative")))
}

fn scalar(v: &Valuation, player: usize) -> Result<&Rational> {
    v.scalar().ok_or_else(|| Error::OutOfDomain { player, detail: "expected a scalar valuation".into() })
}

fn vector(v: &Valuation, player: usize) -> Result<&[Rational]> {
    v.vector().ok_or_else(|| Error::OutOfDomain { player, detail: "expected a vector valuation".into() })
}

/// The point of the domain at which the lifted `f` is evaluated for `z`.
fn lift(s: &ScalarSet, z: &Rational) -> Rational {
    match s {
        ScalarSet::Interval { .. } => z.clone(),
        ScalarSet::Finite(points) => s.floor_point(z).cloned().unwrap_or_else(|| points[0].clone()),
    }
}

/// `r*·w(f(v*, v₋ᵢ)) − r*·w(f(z·w, v₋ᵢ))` with `z` uniform on `[0, r*]`.
/// The first run of `f` is the caller's: `leaf` is where `profile` landed.
pub fn tie_sample<R: Rng + ?Sized>(
    f: &dyn SocialChoice,
    tree: &ProtocolTree,
    reps: &Representatives,
    player: usize,
    profile: &[Valuation],
    leaf: usize,
    rng: &mut R,
) -> Result<TieSample> {
    let d = single_domain(f, player)?;
    let r_star = scalar(representative(reps, leaf, player)?, player)?.clone();
    if r_star.is_zero() {
        return Ok(TieSample { value: Rational::zero(), bits: 0, point: Rational::zero() });
    }
    let z = &dyadic_uniform(rng) * &r_star;
    let mut p = profile.to_vec();
    p[player] = Valuation::Scalar(lift(d.scalars(), &z));
    let run = tree.run(&p)?;
    let a = tree.leaf(leaf).label.alternative;
    let value = &r_star * d.weight(a) - &r_star * d.weight(run.label.alternative);
    Ok(TieSample { value, bits: run.transcript.total_bits, point: z })
}

/// A full run of the randomized mechanism.
#[derive(Clone, Debug)]
pub struct TieRun {
    pub alternative: AlternativeId,
    pub payments: Vec<Rational>,
    pub bits: u64,
}

/// Runs `f` once, then draws one estimator sample for every player. The
/// sample for player `i` is drawn by someone other than `i`.
pub fn tie_mechanism<R: Rng + ?Sized>(
    f: &dyn SocialChoice,
    tree: &ProtocolTree,
    reps: &Representatives,
    profile: &[Valuation],
    rng: &mut R,
) -> Result<TieRun> {
    crate::myerson::validate_profile(f, profile)?;
    let run = tree.run(profile)?;
    let mut bits = run.transcript.total_bits;
    let mut payments = Vec::with_capacity(f.players());
    for i in 0..f.players() {
        let s = tie_sample(f, tree, reps, i, profile, run.leaf, rng)?;
        bits += s.bits;
        payments.push(s.value);
    }
    Ok(TieRun { alternative: run.label.alternative, payments, bits })
}

/// Boundaries of the lifted integrand `z ↦ f(z·w, v₋ᵢ)` on `[0, upper)`.
fn boundaries(f: &dyn SocialChoice, player: usize, profile: &[Valuation], upper: &Rational) -> Result<Vec<Rational>> {
    let d = single_domain(f, player)?;
    let mut starts = match d.scalars() {
        ScalarSet::Finite(points) => points.clone(),
        ScalarSet::Interval { .. } => f
            .breakpoints(player, profile)
            .ok_or(Error::MissingOracle { player })??
            .into_iter()
            .map(|b| b.start)
            .collect(),
    };
    starts.retain(|s| s < upper && !s.is_zero());
    starts.insert(0, Rational::zero());
    starts.push(upper.clone());
    Ok(starts)
}

/// Exact `E[sample]`: segment ends come from the breakpoint oracle (or the
/// finite point set), each segment's outcome from a run of `tree` inside it.
pub fn tie_expectation(
    f: &dyn SocialChoice,
    tree: &ProtocolTree,
    reps: &Representatives,
    player: usize,
    profile: &[Valuation],
) -> Result<Rational> {
    let d = single_domain(f, player)?;
    let leaf = tree.leaf_of(profile)?;
    let r_star = scalar(representative(reps, leaf, player)?, player)?.clone();
    if r_star.is_zero() {
        return Ok(Rational::zero());
    }
    let a = tree.leaf(leaf).label.alternative;
    let cuts = boundaries(f, player, profile, &r_star)?;
    let mut p = profile.to_vec();
    let mut integral = Rational::zero();
    for w in cuts.windows(2) {
        let mid = (&w[0] + &w[1]) / Rational::from_int(2);
        p[player] = Valuation::Scalar(lift(d.scalars(), &mid));
        let b = tree.leaf(tree.leaf_of(&p)?).label.alternative;
        integral += &((&w[1] - &w[0]) * d.weight(b));
    }
    Ok(&r_star * d.weight(a) - integral)
}

/// Sample statistics of repeated estimator draws.
#[derive(Clone, Debug)]
pub struct MonteCarlo {
    pub samples: u64,
    pub mean: f64,
    pub sd: f64,
    pub exact: Rational,
    /// Largest number of bits any single run of the mechanism used.
    pub max_bits: u64,
}

impl MonteCarlo {
    /// `|mean − exact| ≤ sigmas·sd/√N`; a zero spread requires equality.
    pub fn within(&self, sigmas: f64) -> bool {
        let err = (self.mean - self.exact.to_f64()).abs();
        if self.sd == 0.0 {
            return err <= 1e-9 * self.exact.to_f64().abs().max(1.0);
        }
        err <= sigmas * self.sd / (self.samples as f64).sqrt()
    }
}

fn summarize(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0).max(1.0);
    (mean, var.sqrt())
}

/// Draws `samples` estimates of player `i`'s payment.
pub fn tie_monte_carlo<R: Rng + ?Sized>(
    f: &dyn SocialChoice,
    tree: &ProtocolTree,
    reps: &Representatives,
    player: usize,
    profile: &[Valuation],
    samples: u64,
    rng: &mut R,
) -> Result<MonteCarlo> {
    let run = tree.run(profile)?;
    let mut values = Vec::with_capacity(samples as usize);
    let mut max_bits = 0;
    for _ in 0..samples {
        let s = tie_sample(f, tree, reps, player, profile, run.leaf, rng)?;
        max_bits = max_bits.max(run.transcript.total_bits + s.bits);
        values.push(s.value.to_f64());
    }
    let (mean, sd) = summarize(&values);
    Ok(MonteCarlo { samples, mean, sd, exact: tie_expectation(f, tree, reps, player, profile)?, max_bits })
}

/// Every enumerated type lies in the domain after scaling by `1/2`.
pub fn check_scalable(f: &dyn SocialChoice, player: usize) -> Result<()> {
    let d = f.domain(player).as_multi().ok_or_else(|| Error::NotScalable(format!("player {player} is single-parameter")))?;
    let half = Rational::new(1, 2)?;
    for t in d.types() {
        let scaled: Vec<Rational> = t.iter().map(|x| x * &half).collect();
        if !d.contains(&scaled) {
            return Err(Error::NotScalable(format!("player {player}: half of {t:?} is outside the domain")));
        }
    }
    Ok(())
}

/// `∫₀¹ v(f(s·v, v₋ᵢ)) ds`, with outcomes read off the line oracle.
fn line_integral(f: &dyn SocialChoice, player: usize, v: &[Rational], profile: &[Valuation]) -> Result<Rational> {
    let zero = vec![Rational::zero(); v.len()];
    let bps = f.line_breakpoints(player, &zero, v, profile).ok_or(Error::MissingOracle { player })??;
    if bps.first().is_none_or(|b| !b.start.is_zero()) || bps.windows(2).any(|w| w[0].start >= w[1].start) {
        return Err(Error::UnsortedBreakpoints);
    }
    let mut total = Rational::zero();
    for (k, b) in bps.iter().enumerate() {
        let end = bps.get(k + 1).map_or_else(Rational::one, |n| n.start.clone());
        total += &((end - &b.start) * &v[b.alternative.0]);
    }
    Ok(total)
}

/// `P_i(v) = v(f(v)) − ∫₀¹ v(f(t·v, v₋ᵢ)) dt` on a scalable domain.
pub fn scalable_payment(f: &dyn SocialChoice, player: usize, profile: &[Valuation]) -> Result<Rational> {
    let v = vector(&profile[player], player)?;
    let a = f.evaluate(profile)?;
    Ok(&v[a.0] - &line_integral(f, player, v, profile)?)
}

/// `v*(f(v*, v₋ᵢ)) − v*(f(t·v*, v₋ᵢ))` with `t` uniform on `[0, 1]`.
pub fn tie_scalable_sample<R: Rng + ?Sized>(
    f: &dyn SocialChoice,
    tree: &ProtocolTree,
    reps: &Representatives,
    player: usize,
    profile: &[Valuation],
    rng: &mut R,
) -> Result<TieSample> {
    check_scalable(f, player)?;
    let run = tree.run(profile)?;
    let v_star = vector(representative(reps, run.leaf, player)?, player)?.to_vec();
    let t = dyadic_uniform(rng);
    let mut p = profile.to_vec();
    p[player] = Valuation::Vector(v_star.iter().map(|x| x * &t).collect());
    let again = tree.run(&p)?;
    let value = &v_star[run.label.alternative.0] - &v_star[again.label.alternative.0];
    Ok(TieSample { value, bits: run.transcript.total_bits + again.transcript.total_bits, point: t })
}

/// Exact expectation of [`tie_scalable_sample`]: segment ends from the line
/// oracle, outcomes from runs of `tree` at segment midpoints.
pub fn tie_scalable_expectation(
    f: &dyn SocialChoice,
    tree: &ProtocolTree,
    reps: &Representatives,
    player: usize,
    profile: &[Valuation],
) -> Result<Rational> {
    check_scalable(f, player)?;
    let leaf = tree.leaf_of(profile)?;
    let v_star = vector(representative(reps, leaf, player)?, player)?.to_vec();
    let zero = vec![Rational::zero(); v_star.len()];
    let mut p = profile.to_vec();
    p[player] = Valuation::Vector(v_star.clone());
    let bps = f.line_breakpoints(player, &zero, &v_star, &p).ok_or(Error::MissingOracle { player })??;
    let mut cuts: Vec<Rational> = bps.into_iter().map(|b| b.start).filter(|s| !s.is_zero() && s < &Rational::one()).collect();
    cuts.insert(0, Rational::zero());
    cuts.push(Rational::one());
    let mut integral = Rational::zero();
    for w in cuts.windows(2) {
        let mid = (&w[0] + &w[1]) / Rational::from_int(2);
        p[player] = Valuation::Vector(v_star.iter().map(|x| x * &mid).collect());
        let b = tree.leaf(tree.leaf_of(&p)?).label.alternative;
        integral += &((&w[1] - &w[0]) * &v_star[b.0]);
    }
    Ok(&v_star[tree.leaf(leaf).label.alternative.0] - &integral)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{proof1::Proof1, proof2, toys};
    use crate::myerson::myerson_payment;
    use crate::protocol::leaf_representatives;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn q(n: i64) -> Rational {
        Rational::from_int(n)
    }

    #[test]
    fn named_expectations() {
        let f = proof2::choice(3).unwrap();
        let tree = proof2::protocol(3).unwrap();
        let reps = leaf_representatives(&tree, &proof2::grid(3).unwrap()).unwrap();
        let p = [Valuation::int(2), Valuation::int(0b110), Valuation::int(0b010)];
        assert_eq!(tie_expectation(&f, &tree, &reps, 0, &p).unwrap(), q(2));
        assert_eq!(myerson_payment(&f, 0, &p).unwrap(), q(2));

        let pr = Proof1::new(1).unwrap();
        let f = pr.choice();
        let tree = pr.protocol().unwrap();
        let reps = leaf_representatives(&tree, &pr.grid()).unwrap();
        let p = [Valuation::int(3), Valuation::int(0)];
        assert_eq!(tie_expectation(&f, &tree, &reps, 0, &p).unwrap(), q(13040));
    }

    #[test]
    fn zero_scalar_gives_zero_samples() {
        let pr = Proof1::new(1).unwrap();
        let f = pr.choice();
        let tree = pr.protocol().unwrap();
        let reps = leaf_representatives(&tree, &pr.grid()).unwrap();
        let p = [Valuation::int(0), Valuation::int(1)];
        let leaf = tree.leaf_of(&p).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            assert_eq!(tie_sample(&f, &tree, &reps, 0, &p, leaf, &mut rng).unwrap().value, q(0));
        }
    }

    #[test]
    fn scalable_box() {
        let t = toys::scalable_box().unwrap();
        let reps = leaf_representatives(&t.protocol, &t.grid).unwrap();
        let p = [Valuation::vec_of(&[3, 1]), Valuation::int(0)];
        assert_eq!(scalable_payment(t.f.as_ref(), 0, &p).unwrap(), q(1));
        assert_eq!(tie_scalable_expectation(t.f.as_ref(), &t.protocol, &reps, 0, &p).unwrap(), q(1));
        let zero = [Valuation::vec_of(&[0, 0]), Valuation::int(1)];
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10 {
            assert_eq!(tie_scalable_sample(t.f.as_ref(), &t.protocol, &reps, 0, &zero, &mut rng).unwrap().value, q(0));
        }
    }

    #[test]
    fn constant_samples_cancel() {
        let t = toys::constant().unwrap();
        let reps = leaf_representatives(&t.protocol, &t.grid).unwrap();
        let p = [Valuation::int(2), Valuation::int(1)];
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let run = tie_mechanism(t.f.as_ref(), &t.protocol, &reps, &p, &mut rng).unwrap();
        assert_eq!(run.payments, vec![q(0), q(0)]);
        assert_eq!(run.bits, 0);
    }
}
