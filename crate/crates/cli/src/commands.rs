use std::fmt;
use std::fs::File;
use std::io::{self, BufWriter, Write};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use paycomm_core::algorithms::reach::{check_engines, GridChoice, MatchChoice};
use paycomm_core::algorithms::threshold::{bit_bound, build_threshold_tables, singleparam_payment_protocol};
use paycomm_core::algorithms::tie::{tie_expectation, tie_mechanism, tie_monte_carlo};
use paycomm_core::algorithms::unique_payments::{UpInstance, Verdict};
use paycomm_core::constructions::matching::Match;
use paycomm_core::constructions::{build, Construction, ConstructionId, Kind};
use paycomm_core::myerson::{
    check_monotone, myerson_payment, price_multiplicities, validate_profile, verify_truthful, SocialChoice,
};
use paycomm_core::parse::{format_profile, parse_profile};
use paycomm_core::protocol::{leaf_representatives, verify_monochromatic};
use paycomm_core::rational::ceil_log2;
use paycomm_core::{AlternativeId, Error, ExtendedRational, Grid, Valuation};

use crate::config::{Check, ExperimentConfig};

#[derive(Debug)]
pub enum Failure {
    /// Bad flags or input; exit status 2.
    Usage(String),
    /// Some invariant did not hold; exit status 1.
    Invariant(String),
    Core(Error),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Invariant(_) | Failure::Core(_) => 1,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "usage: {m}"),
            Failure::Invariant(m) => f.write_str(m),
            Failure::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Core(e.into())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Core(e.into())
    }
}

fn sink(cfg: &ExperimentConfig) -> Result<csv::Writer<Box<dyn Write>>, Failure> {
    let out: Box<dyn Write> = match &cfg.out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(io::stdout().lock()),
    };
    Ok(csv::Writer::from_writer(out))
}

fn load(id: ConstructionId, cap: u64) -> paycomm_core::Result<Construction> {
    let mut c = build(id)?;
    c.grid = c.grid.clone().with_cap(cap);
    Ok(c)
}

fn single_players(f: &dyn SocialChoice) -> Vec<usize> {
    (0..f.players()).filter(|&i| f.domain(i).as_single().is_some()).collect()
}

/// Visits every grid profile until `visit` reports a failure.
fn first_failure<F>(grid: &Grid, what: &str, mut visit: F) -> paycomm_core::Result<Option<String>>
where
    F: FnMut(&[Valuation]) -> paycomm_core::Result<Option<String>>,
{
    let mut failure = None;
    grid.for_each(what, |p| {
        failure = visit(p)?;
        Ok(failure.is_none())
    })?;
    Ok(failure)
}

pub fn gap_report(cfg: &ExperimentConfig) -> Result<(), Failure> {
    let mut w = sink(cfg)?;
    w.write_record([
        "construction",
        "k",
        "f_bits",
        "player",
        "alternative",
        "distinct_payments",
        "forced_bits",
        "multiplicities",
        "status",
    ])?;
    for &id in &cfg.ids {
        let c = match load(id, cfg.cap) {
            Ok(c) => c,
            Err(e) => {
                w.write_record([id.kind.name(), &id.k.to_string(), "", "", "", "", "", "", &e.to_string()])?;
                continue;
            }
        };
        let f = c.f.as_ref();
        let bits = c.cc().to_string();
        for i in 0..f.players() {
            for a in 0..f.alternatives() {
                let row = price_multiplicities(f, c.payments.as_ref(), i, AlternativeId(a), &c.grid);
                let (k, i_s, a_s) = (id.k.to_string(), i.to_string(), a.to_string());
                match row {
                    Ok(m) => {
                        let forced = ceil_log2(m.len() as u128).to_string();
                        let mult = m.iter().map(|(p, n)| format!("{p}:{n}")).collect::<Vec<_>>().join(";");
                        w.write_record([
                            id.kind.name(),
                            &k,
                            &bits,
                            &i_s,
                            &a_s,
                            &m.len().to_string(),
                            &forced,
                            &mult,
                            "ok",
                        ])?;
                    }
                    Err(e) => w.write_record([id.kind.name(), &k, &bits, &i_s, &a_s, "", "", "", &e.to_string()])?,
                }
            }
        }
    }
    w.flush()?;
    Ok(())
}

enum Status {
    Pass(String),
    Fail(String),
    Skip(String),
}

fn from_failure(failure: Option<String>, pass: String) -> Status {
    match failure {
        None => Status::Pass(pass),
        Some(m) => Status::Fail(m),
    }
}

fn check_monotonicity(c: &Construction) -> paycomm_core::Result<Status> {
    let f = c.f.as_ref();
    let players = single_players(f);
    if players.is_empty() {
        return Ok(Status::Skip("no single-parameter player".into()));
    }
    for &i in &players {
        if !check_monotone(f, i, &c.grid)? {
            return Ok(Status::Fail(format!("player {i} is not monotone")));
        }
    }
    Ok(Status::Pass(format!("players {players:?}")))
}

fn check_ic(c: &Construction) -> paycomm_core::Result<Status> {
    Ok(if verify_truthful(&c.mechanism(), &c.grid)? {
        Status::Pass(format!("payments {}", c.payments.name()))
    } else {
        Status::Fail("profitable deviation found".into())
    })
}

fn check_gaps(c: &Construction) -> paycomm_core::Result<Status> {
    let f = c.f.as_ref();
    if !verify_monochromatic(&c.protocol, f, &c.grid)? {
        return Ok(Status::Fail("protocol does not compute f".into()));
    }
    let mut forced = 0;
    for i in 0..f.players() {
        for a in 0..f.alternatives() {
            let n = price_multiplicities(f, c.payments.as_ref(), i, AlternativeId(a), &c.grid)?.len();
            forced = forced.max(ceil_log2(n as u128));
        }
    }
    let Some(mp) = &c.mechanism_protocol else {
        return Ok(Status::Pass(format!("cc(f)={}, forced payment bits {forced}", c.cc())));
    };
    let failure = first_failure(&c.grid, "mechanism protocol", |p| {
        let run = mp.run(p)?;
        if run.label.alternative != f.evaluate(p)? {
            return Ok(Some(format!("mechanism protocol outcome differs at {}", format_profile(p))));
        }
        let paid = run.label.payments.unwrap_or_default();
        for (i, got) in paid.iter().enumerate() {
            if got != &c.payments.payment(f, i, p)? {
                return Ok(Some(format!("mechanism protocol payment of player {i} differs at {}", format_profile(p))));
            }
        }
        Ok(None)
    })?;
    if failure.is_none() && u64::from(forced) > mp.worst_case_bits() {
        return Ok(Status::Fail(format!("{forced} forced bits exceed cc(M)={}", mp.worst_case_bits())));
    }
    Ok(from_failure(
        failure,
        format!("cc(f)={}, forced payment bits {forced}, cc(M)={}", c.cc(), mp.worst_case_bits()),
    ))
}

fn check_tie(c: &Construction, seed: u64) -> paycomm_core::Result<Status> {
    let f = c.f.as_ref();
    let players = single_players(f);
    if players.len() != f.players() {
        return Ok(Status::Skip("needs single-parameter players".into()));
    }
    let reps = leaf_representatives(&c.protocol, &c.grid)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = f.players() as u64;
    let mut count = 0u64;
    let failure = first_failure(&c.grid, "tie check", |p| {
        for &i in &players {
            let e = tie_expectation(f, &c.protocol, &reps, i, p)?;
            let m = myerson_payment(f, i, p)?;
            if e != m {
                return Ok(Some(format!("player {i} at {}: expectation {e}, Myerson {m}", format_profile(p))));
            }
            count += 1;
        }
        let one = c.protocol.run(p)?.transcript.total_bits;
        let run = tie_mechanism(f, &c.protocol, &reps, p, &mut rng)?;
        if run.bits > (n + 1) * one {
            return Ok(Some(format!("{} bits at {}, one run takes {one}", run.bits, format_profile(p))));
        }
        Ok(None)
    })?;
    Ok(from_failure(failure, format!("{count} expectations exact")))
}

fn check_thresholds(c: &Construction) -> paycomm_core::Result<Status> {
    let f = c.f.as_ref();
    if single_players(f).len() != f.players() {
        return Ok(Status::Skip("needs single-parameter players".into()));
    }
    let tables = build_threshold_tables(f, &c.grid)?;
    let bound = bit_bound(f, c.cc())?;
    let mut max_bits = 0;
    let failure = first_failure(&c.grid, "threshold check", |p| {
        let run = singleparam_payment_protocol(f, &c.protocol, &tables, p)?;
        for i in 0..f.players() {
            let m = myerson_payment(f, i, p)?;
            if run.payments[i] != m {
                return Ok(Some(format!("player {i} at {}: {} vs Myerson {m}", format_profile(p), run.payments[i])));
            }
        }
        max_bits = max_bits.max(run.transcript.total_bits);
        if run.transcript.total_bits > bound {
            return Ok(Some(format!("{} bits exceed {bound} at {}", run.transcript.total_bits, format_profile(p))));
        }
        Ok(None)
    })?;
    Ok(from_failure(failure, format!("max {max_bits} bits, bound {bound}")))
}

fn check_unique(c: &Construction) -> paycomm_core::Result<Status> {
    let f = c.f.as_ref();
    let players: Vec<usize> = (0..f.players()).filter(|&i| f.domain(i).as_multi().is_some()).collect();
    if players.is_empty() {
        return Ok(Status::Skip("no multi-parameter player".into()));
    }
    let mut notes = Vec::new();
    for i in players {
        let up = match UpInstance::new(f, &c.protocol, i, &c.grid) {
            Ok(up) => up,
            Err(e @ (Error::NonUniquePayments { .. } | Error::InvalidDomain(_) | Error::Infeasible(_))) => {
                notes.push(format!("player {i} skipped: {e}"));
                continue;
            }
            Err(e) => return Err(e),
        };
        let mut pairs = 0;
        for ctx in 0..up.contexts.len() {
            for a in (0..f.alternatives()).filter(|&a| up.contexts[ctx].reachable[a]) {
                let w = up.prove(ctx, AlternativeId(a))?;
                let want = &up.contexts[ctx].menu[a];
                match up.verify(ctx, AlternativeId(a), &w.leaves) {
                    Verdict::Accept(p) if &ExtendedRational::Finite(p.clone()) == want => {}
                    v => return Ok(Status::Fail(format!("player {i} context {ctx} a={a}: {v:?}, menu {want}"))),
                }
                if w.types.len() > up.witness_bound() {
                    return Ok(Status::Fail(format!("player {i}: witness of {} types", w.types.len())));
                }
                pairs += 1;
            }
        }
        let scan = match up.scan_unreachable() {
            Ok(s) if s.accepted > 0 => return Ok(Status::Fail(format!("player {i}: forged witness accepted"))),
            Ok(s) => format!(", {} forged sets rejected", s.witnesses),
            Err(Error::ScaleExceeded { .. }) => ", scan skipped".into(),
            Err(e) => return Err(e),
        };
        notes.push(format!("player {i}: {pairs} pairs{scan}"));
    }
    if notes.iter().all(|n| n.contains("skipped:")) {
        return Ok(Status::Skip(notes.join("; ")));
    }
    Ok(Status::Pass(notes.join("; ")))
}

fn check_reach(c: &Construction) -> paycomm_core::Result<Status> {
    let f = c.f.as_ref();
    let tree = c.mechanism_protocol.as_ref().unwrap_or(&c.protocol);
    let m = if c.id.kind == Kind::Match { Some(Match::new(c.id.k)?) } else { None };
    let grid_choice = GridChoice { f, grid: &c.grid };
    let mut contexts = 0;
    for i in 0..f.players() {
        let r = match &m {
            Some(m) => check_engines(&MatchChoice(m), f, c.payments.as_ref(), tree, &c.grid, i)?,
            None => check_engines(&grid_choice, f, c.payments.as_ref(), tree, &c.grid, i)?,
        };
        if !r.agrees() {
            return Ok(Status::Fail(format!("player {i}: {} mismatches, {} of {} bits", r.mismatches, r.protocol_bits, r.bit_budget)));
        }
        contexts += r.contexts;
    }
    Ok(Status::Pass(format!("{contexts} contexts")))
}

pub fn verify(cfg: &ExperimentConfig) -> Result<(), Failure> {
    let mut w = sink(cfg)?;
    w.write_record(["construction", "k", "check", "status", "detail"])?;
    let mut failed = 0;
    for &id in &cfg.ids {
        let c = load(id, cfg.cap);
        for &check in &cfg.checks {
            let status = c.as_ref().map_err(|e| Error::InvalidConstruction(e.to_string())).and_then(|c| match check {
                Check::Monotone => check_monotonicity(c),
                Check::Ic => check_ic(c),
                Check::Gaps => check_gaps(c),
                Check::Tie => check_tie(c, cfg.seed),
                Check::Thresholds => check_thresholds(c),
                Check::Unique => check_unique(c),
                Check::Reach => check_reach(c),
            });
            let (s, detail) = match status {
                Ok(Status::Pass(d)) => ("pass", d),
                Ok(Status::Skip(d)) => ("skip", d),
                Ok(Status::Fail(d)) => ("fail", d),
                Err(e) => ("fail", e.to_string()),
            };
            if s == "fail" {
                failed += 1;
            }
            w.write_record([id.kind.name(), &id.k.to_string(), check.name(), s, &detail])?;
        }
        w.flush()?;
    }
    w.flush()?;
    if failed > 0 {
        return Err(Failure::Invariant(format!("{failed} checks failed")));
    }
    Ok(())
}

/// Profile benchmarked when none is given.
fn default_profile(c: &Construction) -> Vec<Valuation> {
    let k = c.id.k;
    match c.id.kind {
        Kind::Proof1 => vec![Valuation::int((1 << (k + 1)) - 1), Valuation::int(0)],
        Kind::Proof2 => vec![
            Valuation::int(i64::from(k) - 1),
            Valuation::int((1 << k) - 2),
            Valuation::int(if k >= 2 { 2 } else { 1 }),
        ],
        _ => c.grid.axes().iter().map(|a| a.last().expect("non-empty axis").clone()).collect(),
    }
}

pub fn tie_bench(cfg: &ExperimentConfig, samples: u64, profile: Option<&str>) -> Result<(), Failure> {
    if samples < 2 {
        return Err(Failure::Usage("--samples must be at least 2".into()));
    }
    let given = profile.map(parse_profile).transpose().map_err(|e| Failure::Usage(e.to_string()))?;
    let mut w = sink(cfg)?;
    w.write_record([
        "construction",
        "k",
        "player",
        "profile",
        "samples",
        "seed",
        "mean",
        "sd",
        "exact",
        "abs_error",
        "band_3sigma",
        "within",
        "max_bits",
    ])?;
    let mut outside = 0;
    for &id in &cfg.ids {
        let c = load(id, cfg.cap)?;
        let f = c.f.as_ref();
        let p = given.clone().unwrap_or_else(|| default_profile(&c));
        validate_profile(f, &p).map_err(|e| Failure::Usage(format!("{id}: {e}")))?;
        let reps = leaf_representatives(&c.protocol, &c.grid)?;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        for i in single_players(f) {
            let r = tie_monte_carlo(f, &c.protocol, &reps, i, &p, samples, &mut rng)?;
            let err = (r.mean - r.exact.to_f64()).abs();
            let band = 3.0 * r.sd / (samples as f64).sqrt();
            let within = r.within(3.0);
            if !within {
                outside += 1;
            }
            w.write_record([
                id.kind.name(),
                &id.k.to_string(),
                &i.to_string(),
                &format_profile(&p),
                &samples.to_string(),
                &cfg.seed.to_string(),
                &format!("{:.6}", r.mean),
                &format!("{:.6}", r.sd),
                &r.exact.to_string(),
                &format!("{err:.6}"),
                &format!("{band:.6}"),
                &within.to_string(),
                &r.max_bits.to_string(),
            ])?;
        }
    }
    w.flush()?;
    if outside > 0 {
        return Err(Failure::Invariant(format!("{outside} means outside the 3σ band")));
    }
    Ok(())
}

pub fn trace(cfg: &ExperimentConfig, profile: &str) -> Result<(), Failure> {
    let [id] = cfg.ids[..] else {
        return Err(Failure::Usage("trace needs exactly one construction and k".into()));
    };
    let c = load(id, cfg.cap)?;
    let p = parse_profile(profile).map_err(|e| Failure::Usage(e.to_string()))?;
    validate_profile(c.f.as_ref(), &p).map_err(|e| Failure::Usage(e.to_string()))?;
    let run = c.protocol.run(&p)?;
    let out: Box<dyn Write> = match &cfg.out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(io::stdout().lock()),
    };
    run.transcript.write_csv(out)?;
    eprintln!(
        "{id}: outcome {}, {} events, {} bits",
        run.label.alternative.0,
        run.transcript.events.len(),
        run.transcript.total_bits
    );
    Ok(())
}
