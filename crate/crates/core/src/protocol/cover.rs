//! Rectangle covers and the round-based elimination protocol that turns a
//! pair of nondeterministic covers into a deterministic protocol.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::rational::ceil_log2;

/// Players' inputs are indices into finite domains.
pub type Input = Vec<usize>;

/// Partial boolean function on a finite product domain. `None` means the
/// input is outside the promise.
pub type PromiseFn = dyn Fn(&[usize]) -> Option<bool>;

/// A combinatorial rectangle `R₁ × … × Rₙ` with a label in {0, 1}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rect {
    pub sides: Vec<BTreeSet<usize>>,
    pub label: bool,
}

impl Rect {
    pub fn new(label: bool, sides: Vec<Vec<usize>>) -> Self {
        Rect { sides: sides.into_iter().map(|s| s.into_iter().collect()).collect(), label }
    }

    pub fn contains(&self, x: &[usize]) -> bool {
        self.sides.iter().zip(x).all(|(s, v)| s.contains(v))
    }

    /// Sides `j` of both rectangles intersect.
    pub fn intersects_on(&self, other: &Rect, j: usize) -> bool {
        !self.sides[j].is_disjoint(&other.sides[j])
    }

    pub fn intersects(&self, other: &Rect) -> bool {
        (0..self.sides.len()).all(|j| self.intersects_on(other, j))
    }
}

/// Checks that `c0` and `c1` cover exactly the 0- and 1-inputs of `f` among
/// the inputs of `sizes`.
pub fn validate_covers(c0: &[Rect], c1: &[Rect], sizes: &[usize], f: &PromiseFn) -> Result<()> {
    for r in c0.iter().chain(c1) {
        if r.sides.len() != sizes.len() {
            return Err(Error::ProtocolIntegrity(format!("rectangle with {} sides for {} players", r.sides.len(), sizes.len())));
        }
        if r.sides.iter().zip(sizes).any(|(s, &n)| s.iter().any(|&x| x >= n)) {
            return Err(Error::ProtocolIntegrity("rectangle side outside the domain".into()));
        }
    }
    let total: usize = sizes.iter().product();
    let mut x = vec![0usize; sizes.len()];
    for _ in 0..total {
        let in0 = c0.iter().any(|r| r.contains(&x));
        let in1 = c1.iter().any(|r| r.contains(&x));
        match f(&x) {
            Some(true) if !in1 || in0 => {
                return Err(Error::ProtocolIntegrity(format!("1-input {x:?} is not covered by C1 alone")));
            }
            Some(false) if !in0 || in1 => {
                return Err(Error::ProtocolIntegrity(format!("0-input {x:?} is not covered by C0 alone")));
            }
            None if in0 || in1 => {
                return Err(Error::ProtocolIntegrity(format!("input {x:?} outside the promise is covered")));
            }
            _ => {}
        }
        for j in (0..sizes.len()).rev() {
            x[j] += 1;
            if x[j] < sizes[j] {
                break;
            }
            x[j] = 0;
        }
    }
    Ok(())
}

/// One elimination round: who found a rectangle and how much `live` shrank.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Round {
    pub live_before: usize,
    pub live_after: usize,
    /// `(player, index into C¹)`, or `None` when nobody could eliminate.
    pub chosen: Option<(usize, usize)>,
    pub bits: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Elimination {
    pub output: bool,
    pub rounds: Vec<Round>,
    pub bits: u64,
}

impl Elimination {
    /// Rounds in which some 0-rectangles were eliminated.
    pub fn elimination_rounds(&self) -> usize {
        self.rounds.iter().filter(|r| r.chosen.is_some()).count()
    }
}

/// `⌈n · ln |C⁰|⌉ + 1`, the bound on elimination rounds.
pub fn round_bound(players: usize, c0_len: usize) -> usize {
    if c0_len == 0 {
        return 1;
    }
    ((players as f64) * (c0_len as f64).ln()).ceil() as usize + 1
}

/// Runs the elimination protocol on input `x`.
///
/// Each round, players are asked in order whether they hold a 1-rectangle
/// containing their input whose side intersects at most a `(n−1)/n` fraction
/// of the live 0-rectangles on their coordinate. Each answer costs one bit and
/// naming the rectangle costs `⌈log₂|C¹|⌉` bits. The output is 1 once no live
/// 0-rectangle is left and 0 once nobody can eliminate.
pub fn eliminate(c0: &[Rect], c1: &[Rect], x: &[usize]) -> Result<Elimination> {
    let n = x.len();
    let name_bits = u64::from(ceil_log2(c1.len().max(1) as u128));
    let mut live: Vec<usize> = (0..c0.len()).collect();
    let mut rounds = Vec::new();
    let mut bits = 0u64;
    let limit = c0.len() + 1;
    loop {
        if live.is_empty() {
            return Ok(Elimination { output: true, rounds, bits });
        }
        if rounds.len() > limit {
            return Err(Error::ProtocolIntegrity("elimination did not terminate".into()));
        }
        let before = live.len();
        let mut round_bits = 0u64;
        let mut chosen = None;
        'players: for i in 0..n {
            round_bits += 1;
            for (t, r) in c1.iter().enumerate() {
                if !r.sides[i].contains(&x[i]) {
                    continue;
                }
                if let Some(&z) = live.iter().find(|&&z| c0[z].intersects(r)) {
                    return Err(Error::ProtocolIntegrity(format!(
                        "1-rectangle {t} intersects live 0-rectangle {z} on every side"
                    )));
                }
                let hits = live.iter().filter(|&&z| c0[z].intersects_on(r, i)).count();
                if hits * n <= (n - 1) * before {
                    chosen = Some((i, t));
                    round_bits += name_bits;
                    live.retain(|&z| c0[z].intersects_on(r, i));
                    break 'players;
                }
            }
        }
        bits += round_bits;
        rounds.push(Round { live_before: before, live_after: live.len(), chosen, bits: round_bits });
        if chosen.is_none() {
            return Ok(Elimination { output: false, rounds, bits });
        }
    }
}

/// A bundled cover instance.
pub struct CoverInstance {
    pub name: &'static str,
    pub sizes: Vec<usize>,
    pub c0: Vec<Rect>,
    pub c1: Vec<Rect>,
    pub f: Box<dyn Fn(&[usize]) -> Option<bool> + Send + Sync>,
}

impl CoverInstance {
    pub fn validate(&self) -> Result<()> {
        validate_covers(&self.c0, &self.c1, &self.sizes, &*self.f)
    }

    /// Every input, player 0 most significant.
    pub fn inputs(&self) -> Vec<Input> {
        let mut out = vec![Vec::new()];
        for &s in &self.sizes {
            out = out
                .into_iter()
                .flat_map(|p: Input| {
                    (0..s).map(move |v| {
                        let mut q = p.clone();
                        q.push(v);
                        q
                    })
                })
                .collect();
        }
        out
    }
}

/// Two-party AND on bits.
pub fn and2() -> CoverInstance {
    CoverInstance {
        name: "and2",
        sizes: vec![2, 2],
        c1: vec![Rect::new(true, vec![vec![1], vec![1]])],
        c0: vec![Rect::new(false, vec![vec![0], vec![0, 1]]), Rect::new(false, vec![vec![0, 1], vec![0]])],
        f: Box::new(|x| Some(x[0] == 1 && x[1] == 1)),
    }
}

/// Three-party AND on bits.
pub fn and3() -> CoverInstance {
    let all = vec![0, 1];
    CoverInstance {
        name: "and3",
        sizes: vec![2, 2, 2],
        c1: vec![Rect::new(true, vec![vec![1], vec![1], vec![1]])],
        c0: (0..3)
            .map(|j| {
                let mut sides = vec![all.clone(); 3];
                sides[j] = vec![0];
                Rect::new(false, sides)
            })
            .collect(),
        f: Box::new(|x| Some(x.iter().all(|&b| b == 1))),
    }
}

/// Two parties on {0..3}: 1 when equal, 0 when at distance ≥ 2, outside the
/// promise at distance 1.
pub fn gap_equality() -> CoverInstance {
    CoverInstance {
        name: "gap-equality",
        sizes: vec![4, 4],
        c1: (0..4).map(|a| Rect::new(true, vec![vec![a], vec![a]])).collect(),
        c0: vec![
            Rect::new(false, vec![vec![0], vec![2, 3]]),
            Rect::new(false, vec![vec![0, 1], vec![3]]),
            Rect::new(false, vec![vec![2, 3], vec![0]]),
            Rect::new(false, vec![vec![3], vec![0, 1]]),
        ],
        f: Box::new(|x| {
            let d = x[0].abs_diff(x[1]);
            match d {
                0 => Some(true),
                1 => None,
                _ => Some(false),
            }
        }),
    }
}

pub fn bundled() -> Vec<CoverInstance> {
    vec![and2(), and3(), gap_equality()]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_covers_are_valid() {
        for inst in bundled() {
            inst.validate().unwrap_or_else(|e| panic!("{}: {e}", inst.name));
        }
    }

    #[test]
    fn overlapping_covers_are_rejected() {
        let mut inst = and2();
        inst.c0.push(Rect::new(false, vec![vec![1], vec![1]]));
        assert!(inst.validate().is_err());
    }

    #[test]
    fn and_on_ones_takes_two_rounds() {
        let inst = and2();
        let e = eliminate(&inst.c0, &inst.c1, &[1, 1]).unwrap();
        assert!(e.output);
        assert_eq!(e.elimination_rounds(), 2);
        assert_eq!(e.rounds[0].chosen, Some((0, 0)));
        assert_eq!(e.rounds[1].chosen, Some((1, 0)));
        assert_eq!(e.bits, 3);
    }

    #[test]
    fn and_on_mixed_input_outputs_zero() {
        let inst = and2();
        let e = eliminate(&inst.c0, &inst.c1, &[0, 1]).unwrap();
        assert!(!e.output);
        assert_eq!(e.elimination_rounds(), 1);
    }

    #[test]
    fn invalid_cover_trips_integrity_check() {
        let c1 = vec![Rect::new(true, vec![vec![1], vec![1]])];
        let c0 = vec![Rect::new(false, vec![vec![0, 1], vec![1]])];
        assert!(matches!(eliminate(&c0, &c1, &[1, 1]), Err(Error::ProtocolIntegrity(_))));
    }

    #[test]
    fn round_bound_values() {
        assert_eq!(round_bound(2, 2), 3);
        assert_eq!(round_bound(3, 1), 1);
    }
}
