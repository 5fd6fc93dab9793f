//! One PASS/FAIL line per acceptance criterion. Every criterion is checked
//! against a second, independent computation where one exists.

use std::collections::{BTreeMap, BTreeSet};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use paycomm_core::algorithms::reach::{check_engines, reach, GridChoice, IndexedChoice, MatchChoice, ProtocolEngine};
use paycomm_core::algorithms::threshold::{bit_bound, build_threshold_tables, singleparam_payment_protocol};
use paycomm_core::algorithms::tie::{tie_expectation, tie_mechanism, tie_monte_carlo};
use paycomm_core::algorithms::unique_payments::{UpInstance, Verdict};
use paycomm_core::constructions::matching::Match;
use paycomm_core::constructions::multiunit::Multiunit;
use paycomm_core::constructions::proof1::{self, Proof1};
use paycomm_core::constructions::{disj, multiunit, parse_bit_string, proof2, reach_hard, toys};
use paycomm_core::myerson::{myerson_payment, payment_count, MyersonPayments, PaymentRule, SocialChoice, VcgPayments};
use paycomm_core::protocol::cover::{bundled, eliminate};
use paycomm_core::protocol::reduction::{verification_to_bitvectors, verifier_for};
use paycomm_core::protocol::{leaf_representatives, LeafLabel, Node, ProtocolTree};
use paycomm_core::rational::binomial;
use paycomm_core::{AlternativeId, Error, Grid, Rational, Valuation};

type Outcome = Result<String, Box<dyn std::error::Error>>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)*) => {
        if !$cond {
            return Err(format!($($msg)*).into());
        }
    };
}

const SEED: u64 = 20_061;

fn q(n: i64) -> Rational {
    Rational::from_int(n)
}

fn int(v: &Valuation) -> u64 {
    v.scalar().and_then(Rational::to_u64_exact).expect("integer type")
}

fn profiles(grid: &Grid) -> paycomm_core::Result<Vec<Vec<Valuation>>> {
    let mut out = Vec::new();
    grid.for_each("acceptance", |p| {
        out.push(p.to_vec());
        Ok(true)
    })?;
    Ok(out)
}

fn c1_payment_counting() -> Outcome {
    let mut parts = Vec::new();
    for (k, expected) in [(1u32, 3usize), (2, 35)] {
        let c = proof1::build(k)?;
        let p = Proof1::new(k)?;
        let top = p.shape.top();
        let count = payment_count(c.f.as_ref(), &MyersonPayments, 0, AlternativeId(top), &c.grid)?;
        let binom = binomial((1 << (k + 1)) - 1, 1 << k);
        // Price of the top block is Σ_{i<m} c_i·(w_m − w_i).
        let w = &p.weights;
        let closed: BTreeSet<Rational> = p
            .compositions
            .iter()
            .map(|comp| comp.parts()[..top].iter().zip(w).map(|(&ci, wi)| q(ci as i64) * (&w[top] - wi)).sum())
            .collect();
        ensure!(binom == BigUint::from(expected), "k={k}: binomial is {binom}");
        ensure!(count == expected, "k={k}: {count} distinct payments, expected {expected}");
        ensure!(closed.len() == expected, "k={k}: closed form gives {} payments", closed.len());
        parts.push(format!("k={k}: {count}"));
    }
    Ok(parts.join(", "))
}

fn c2_dot_products() -> Outcome {
    let dots = proof1::dot_products(2, &proof1::weights(2)?)?;
    let mut pairs = 0u64;
    let mut equal = 0u64;
    for i in 0..dots.len() {
        for j in i + 1..dots.len() {
            pairs += 1;
            if dots[i] == dots[j] {
                equal += 1;
            }
        }
    }
    let distinct: BTreeSet<&Rational> = dots.iter().collect();
    ensure!(pairs == 595, "{pairs} pairs");
    ensure!(equal == 0 && distinct.len() == 35, "{equal} equal pairs");
    ensure!(proof1::dot_distinct(2)?, "library check disagrees");
    Ok(format!("{pairs} pairs distinct"))
}

/// `r·f(r) − Σ_{z<r} f(z)` on integer `r`: the Myerson price with `w(a) = a`.
fn proof2_price_by_sum(k: u32, r: u64, b: u64, c: u64) -> i64 {
    let f = |z: u64| proof2::evaluate(k, z, b, c) as i64;
    r as i64 * f(r) - (0..r).map(f).sum::<i64>()
}

fn c3_closed_forms() -> Outcome {
    let mut checked = 0;
    for k in 1..=8 {
        let report = proof2::check_closed_forms(k)?;
        ensure!(report.mismatches.is_empty(), "k={k}: {} mismatches, first {:?}", report.mismatches.len(), report.mismatches[0]);
        checked += report.checked;
        if k <= 5 {
            let n = 1u64 << k;
            for b in 0..n {
                for c in 0..n {
                    for j in 0..=k {
                        let t = proof2::prefix_intersections(b, c, j, k);
                        for (case, r) in proof2::reaching_cases(k, b, c, j) {
                            let by_sum = proof2_price_by_sum(k, u64::from(r), b, c);
                            ensure!(
                                q(by_sum) == proof2::closed_form(case, j, t),
                                "k={k} b={b} c={c} j={j}: summed price {by_sum}"
                            );
                        }
                    }
                }
            }
        }
    }
    let f = proof2::choice(5)?;
    let (b, c) = (parse_bit_string("10100").unwrap(), parse_bit_string("01010").unwrap());
    let p = [Valuation::int(4), Valuation::int(b as i64), Valuation::int(c as i64)];
    let price = myerson_payment(&f, 0, &p)?;
    ensure!(price == q(10), "disjointness instance pays {price}");
    ensure!(proof2_price_by_sum(5, 4, b, c) == 10, "summed price of the disjointness instance");
    Ok(format!("{checked} cases, disjointness instance pays {price}"))
}

/// Measured `(per-alternative counts, |Im P_A|)`, kept as regressions.
const IMAGE_SIZES: [(&[usize], usize); 8] = [
    (&[1, 1], 1),
    (&[1, 2, 2], 3),
    (&[1, 2, 3, 3], 6),
    (&[1, 2, 3, 4, 4], 10),
    (&[1, 2, 3, 4, 5, 5], 15),
    (&[1, 2, 3, 4, 5, 6, 6], 21),
    (&[1, 2, 3, 4, 5, 6, 7, 7], 28),
    (&[1, 2, 3, 4, 5, 6, 7, 8, 8], 36),
];

fn c4_image_bound() -> Outcome {
    let mut parts = Vec::new();
    for k in 1..=8 {
        let r = proof2::image_size(k)?;
        ensure!(r.within_bounds(k), "k={k}: {:?} exceeds the bound", r);
        let (per, total) = IMAGE_SIZES[k as usize - 1];
        ensure!(r.per_alternative == per && r.total == total, "k={k}: {:?} differs from the recorded counts", r);
        if k <= 4 {
            // Second route: collect prices at every grid profile.
            let c = proof2::build(k)?;
            let mut seen: BTreeMap<usize, BTreeSet<Rational>> = BTreeMap::new();
            for p in profiles(&c.grid)? {
                let a = c.f.evaluate(&p)?;
                seen.entry(a.0).or_default().insert(myerson_payment(c.f.as_ref(), 0, &p)?);
            }
            let counts: Vec<usize> = (0..=k as usize).map(|j| seen.get(&j).map_or(0, BTreeSet::len)).collect();
            ensure!(counts == r.per_alternative, "k={k}: grid gives {counts:?}, witnesses give {:?}", r.per_alternative);
        }
        parts.push(format!("k={k}: {:?}/{}", r.per_alternative, r.total));
    }
    Ok(parts.join("; "))
}

fn argmax(alice: &[Rational], bob: &[Rational]) -> Vec<usize> {
    let m = alice.len() - 1;
    let welfare: Vec<Rational> = (0..=m).map(|i| &alice[i] + &bob[i]).collect();
    let best = welfare.iter().max().unwrap().clone();
    (0..=m).filter(|&i| welfare[i] == best).collect()
}

fn c5_multiunit() -> Outcome {
    let mut parts = Vec::new();
    for k in [1, 2] {
        let mu: Multiunit = multiunit::build(k)?;
        let c = &mu.construction;
        let f = c.f.as_ref();
        let m = mu.m;
        let mut checked = 0;
        for p in profiles(&c.grid)? {
            // Bob's vector is already indexed by alternative.
            let best = argmax(p[0].vector().unwrap(), p[1].vector().unwrap());
            let a = f.evaluate(&p)?;
            ensure!(best.contains(&a.0), "k={k}: outcome {a} not welfare-maximizing at {p:?}");
            checked += 1;
        }
        let zero = vec![Rational::zero(); m + 1];
        let p1 = Proof1::new(k)?;
        let base = p1.choice();
        for (t, bv) in c.grid.axis(1).iter().enumerate() {
            let bob = bv.vector().unwrap();
            ensure!(argmax(&mu.special.as_alice(), bob) == vec![m], "k={k}: special type ties for Bob type {t}");
            ensure!(argmax(&zero, bob) == vec![0], "k={k}: zero type ties for Bob type {t}");
            let at_zero = [Valuation::Vector(zero.clone()), bv.clone()];
            ensure!(VcgPayments.payment(f, 0, &at_zero)?.is_zero(), "k={k}: zero type pays for Bob type {t}");
            let special = [Valuation::Vector(mu.special.as_alice()), bv.clone()];
            let vcg = VcgPayments.payment(f, 0, &special)?;
            let start = p1.compositions[t].prefix_starts()[m];
            let myerson = myerson_payment(&base, 0, &[Valuation::int(start as i64), Valuation::int(t as i64)])?;
            ensure!(vcg == myerson, "k={k}, Bob type {t}: VCG {vcg} vs composition price {myerson}");
        }
        parts.push(format!("k={k}: {checked} profiles"));
    }
    Ok(parts.join(", "))
}

struct Instance {
    name: String,
    f: std::sync::Arc<dyn SocialChoice>,
    protocol: ProtocolTree,
    grid: Grid,
}

fn single_param_instances() -> paycomm_core::Result<Vec<Instance>> {
    let mut out = Vec::new();
    let mut add = |name: String, f, protocol, grid| out.push(Instance { name, f, protocol, grid });
    for k in 1..=2 {
        let c = proof1::build(k)?;
        add(c.id.to_string(), c.f, c.protocol, c.grid);
    }
    for k in 1..=4 {
        let c = proof2::build(k)?;
        add(c.id.to_string(), c.f, c.protocol, c.grid);
        let c = disj::build(k)?;
        add(c.id.to_string(), c.f, c.protocol, c.grid);
    }
    for k in 1..=3 {
        let c = reach_hard::build(k)?;
        add(c.id.to_string(), c.f, c.protocol, c.grid);
    }
    for t in [toys::second_price()?, toys::constant()?] {
        add(t.name.clone(), t.f.clone(), t.protocol, t.grid);
    }
    Ok(out)
}

fn c6_tie() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut exact = 0u64;
    let mut traces = 0u64;
    for inst in single_param_instances()? {
        let f = inst.f.as_ref();
        let reps = leaf_representatives(&inst.protocol, &inst.grid)?;
        let n = f.players() as u64;
        for p in profiles(&inst.grid)? {
            for i in (0..f.players()).filter(|&i| f.domain(i).as_single().is_some()) {
                let e = tie_expectation(f, &inst.protocol, &reps, i, &p)?;
                let m = myerson_payment(f, i, &p)?;
                ensure!(e == m, "{}: player {i} at {p:?}: expectation {e}, Myerson {m}", inst.name);
                exact += 1;
            }
            let one = inst.protocol.run(&p)?.transcript.total_bits;
            let run = tie_mechanism(f, &inst.protocol, &reps, &p, &mut rng)?;
            ensure!(run.bits <= (n + 1) * one, "{}: {} bits at {p:?}, one run is {one}", inst.name, run.bits);
            traces += 1;
        }
    }
    let named: Vec<(Instance, Vec<Valuation>)> = {
        let c = proof1::build(1)?;
        let p1 = vec![Valuation::int(3), Valuation::int(0)];
        let c2 = proof2::build(3)?;
        let p2 = vec![
            Valuation::int(2),
            Valuation::int(parse_bit_string("110").unwrap() as i64),
            Valuation::int(parse_bit_string("010").unwrap() as i64),
        ];
        let t = toys::second_price()?;
        vec![
            (Instance { name: c.id.to_string(), f: c.f, protocol: c.protocol, grid: c.grid }, p1),
            (Instance { name: c2.id.to_string(), f: c2.f, protocol: c2.protocol, grid: c2.grid }, p2),
            (Instance { name: t.name.clone(), f: t.f.clone(), protocol: t.protocol, grid: t.grid }, vec![Valuation::int(3), Valuation::int(2)]),
        ]
    };
    let mut mc = Vec::new();
    for (inst, p) in &named {
        let reps = leaf_representatives(&inst.protocol, &inst.grid)?;
        let r = tie_monte_carlo(inst.f.as_ref(), &inst.protocol, &reps, 0, p, 100_000, &mut rng)?;
        ensure!(r.within(3.0), "{}: mean {} vs exact {} (sd {})", inst.name, r.mean, r.exact, r.sd);
        mc.push(format!("{} {:.1}≈{}", inst.name, r.mean, r.exact));
    }
    Ok(format!("{exact} exact, {traces} traces within bits, MC {}", mc.join(", ")))
}

fn c7_threshold_protocol() -> Outcome {
    let mut instances = Vec::new();
    for k in 1..=2 {
        let c = proof1::build(k)?;
        instances.push(Instance { name: c.id.to_string(), f: c.f, protocol: c.protocol, grid: c.grid });
    }
    for k in 1..=4 {
        let c = proof2::build(k)?;
        instances.push(Instance { name: c.id.to_string(), f: c.f, protocol: c.protocol, grid: c.grid });
    }
    let t = toys::second_price()?;
    instances.push(Instance { name: t.name.clone(), f: t.f.clone(), protocol: t.protocol, grid: t.grid });
    let mut runs = 0u64;
    let mut worst = Vec::new();
    for inst in &instances {
        let f = inst.f.as_ref();
        let tables = build_threshold_tables(f, &inst.grid)?;
        let bound = bit_bound(f, inst.protocol.worst_case_bits())?;
        let mut max_bits = 0;
        for p in profiles(&inst.grid)? {
            let run = singleparam_payment_protocol(f, &inst.protocol, &tables, &p)?;
            ensure!(run.alternative == f.evaluate(&p)?, "{}: wrong outcome at {p:?}", inst.name);
            for i in 0..f.players() {
                let m = myerson_payment(f, i, &p)?;
                ensure!(run.payments[i] == m, "{}: player {i} at {p:?}: {} vs Myerson {m}", inst.name, run.payments[i]);
            }
            let bits = run.transcript.total_bits;
            ensure!(bits <= bound, "{}: {bits} bits > bound {bound} at {p:?}", inst.name);
            max_bits = max_bits.max(bits);
            runs += 1;
        }
        worst.push(format!("{} {max_bits}/{bound}", inst.name));
    }
    Ok(format!("{runs} runs; max bits/bound: {}", worst.join(", ")))
}

/// Every normalized menu on a half-integer price grid that makes the
/// observed outcomes utility-maximizing.
fn grid_menus(up: &UpInstance<'_>, ctx: usize) -> Vec<Vec<Option<Rational>>> {
    let data = &up.contexts[ctx];
    let dom = up.f.domain(up.player);
    let m = data.reachable.len();
    let reach: Vec<usize> = (0..m).filter(|&a| data.reachable[a]).collect();
    let free: Vec<usize> = reach.iter().copied().filter(|&a| a != data.zero_alternative.0).collect();
    let values: Vec<Rational> = (-16..=20).map(|h| Rational::new(h, 2).unwrap()).collect();
    let mut out = Vec::new();
    let mut idx = vec![0usize; free.len()];
    loop {
        let mut menu: Vec<Option<Rational>> = vec![None; m];
        menu[data.zero_alternative.0] = Some(Rational::zero());
        for (k, &a) in free.iter().enumerate() {
            menu[a] = Some(values[idx[k]].clone());
        }
        let ok = up.axis.iter().zip(&data.outcomes).all(|(v, &o)| {
            let u = dom.value(v, o) - menu[o.0].as_ref().unwrap();
            reach.iter().all(|&b| dom.value(v, AlternativeId(b)) - menu[b].as_ref().unwrap() <= u)
        });
        if ok {
            out.push(menu);
        }
        let mut k = 0;
        while k < idx.len() {
            idx[k] += 1;
            if idx[k] < values.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
        if k == idx.len() {
            return out;
        }
    }
}

fn c8_proof_system() -> Outcome {
    let mut parts = Vec::new();
    for inst in [toys::unique_three(), toys::unique_four()] {
        let t = inst.toy()?;
        let up = UpInstance::new(t.f.as_ref(), &t.protocol, 0, &t.grid)?;
        let mut pairs = 0;
        let mut largest = 0;
        for c in 0..up.contexts.len() {
            let menus = grid_menus(&up, c);
            ensure!(menus.len() == 1, "{} context {c}: {} grid menus", inst.name, menus.len());
            for a in (0..inst.alternatives).filter(|&a| up.contexts[c].reachable[a]) {
                let w = up.prove(c, AlternativeId(a))?;
                ensure!(w.types.len() <= up.witness_bound(), "{}: witness of {} types", inst.name, w.types.len());
                largest = largest.max(w.types.len());
                let expected = menus[0][a].clone().unwrap();
                match up.verify(c, AlternativeId(a), &w.leaves) {
                    Verdict::Accept(p) => ensure!(p == expected, "{} context {c} a={a}: {p} vs {expected}", inst.name),
                    Verdict::Reject(k) => return Err(format!("{} context {c} a={a}: honest witness fails {k}", inst.name).into()),
                }
                pairs += 1;
            }
        }
        let scan = up.scan_unreachable()?;
        ensure!(scan.instances > 0, "{}: no unreachable pairs to scan", inst.name);
        ensure!(scan.accepted == 0, "{}: {} forged witnesses accepted", inst.name, scan.accepted);
        parts.push(format!(
            "{}: {pairs} pairs, witness ≤ {largest}/{}, {} forged sets rejected",
            inst.name,
            up.witness_bound(),
            scan.witnesses
        ));
    }
    Ok(parts.join("; "))
}

fn engines(name: &str, f_idx: &dyn IndexedChoice, f: &dyn SocialChoice, c: &paycomm_core::constructions::Construction) -> Result<u64, String> {
    let tree = c.mechanism_protocol.as_ref().unwrap_or(&c.protocol);
    let mut contexts = 0;
    for i in 0..f.players() {
        let r = check_engines(f_idx, f, c.payments.as_ref(), tree, &c.grid, i).map_err(|e| format!("{name}: {e}"))?;
        if !r.agrees() {
            return Err(format!("{name} player {i}: {r:?}"));
        }
        contexts += r.contexts;
    }
    Ok(contexts)
}

fn c9_reach() -> Outcome {
    let mut parts = Vec::new();
    for k in 1..=6 {
        let c = reach_hard::build(k)?;
        let f = c.f.as_ref();
        let contexts = engines(&c.id.to_string(), &GridChoice { f, grid: &c.grid }, f, &c)?;
        let tree = c.mechanism_protocol.as_ref().unwrap_or(&c.protocol);
        let engine = ProtocolEngine::new(tree, &c.grid, 0, f.alternatives())?;
        let axis = c.grid.axis(0).to_vec();
        let n = 1u64 << k;
        for b in 0..n {
            for x in 0..n {
                let p = [Valuation::int(0), Valuation::int(b as i64), Valuation::int(x as i64)];
                let want = b & x != 0;
                ensure!(reach(f, 0, reach_hard::BC, &p, &axis)? == want, "k={k} ({b}, {x}): brute force");
                ensure!(engine.query(&p)?[reach_hard::BC.0].is_some() == want, "k={k} ({b}, {x}): protocol engine");
            }
        }
        parts.push(format!("reach k={k}: {contexts} contexts"));
    }
    for k in [3, 6] {
        let m = Match::new(k)?;
        let c = paycomm_core::constructions::matching::build(k)?;
        let contexts = engines(&c.id.to_string(), &MatchChoice(&m), c.f.as_ref(), &c)?;
        parts.push(format!("match k={k}: {contexts} contexts"));
    }
    Ok(parts.join(", "))
}

/// Every player announces its input in full; leaves carry `f` (or 2 off
/// the promise).
fn full_tree(sizes: &[usize], f: &dyn Fn(&[usize]) -> Option<bool>) -> paycomm_core::Result<ProtocolTree> {
    fn build(sizes: &[usize], prefix: &mut Vec<usize>, f: &dyn Fn(&[usize]) -> Option<bool>) -> Node {
        let j = prefix.len();
        if j == sizes.len() {
            return Node::leaf(LeafLabel::alt(f(prefix).map_or(2, usize::from)));
        }
        let children = (0..sizes[j])
            .map(|v| {
                prefix.push(v);
                let n = build(sizes, prefix, f);
                prefix.pop();
                n
            })
            .collect();
        Node::message(j, |v: &Valuation| Ok(int(v) as usize), children)
    }
    ProtocolTree::new(sizes.len(), build(sizes, &mut Vec::new(), f))
}

fn c10_appendix() -> Outcome {
    let mut promise = 0;
    let mut violating = 0;
    let mut rounds = 0;
    for inst in bundled() {
        inst.validate()?;
        let n = inst.sizes.len();
        let tree = full_tree(&inst.sizes, &*inst.f)?;
        let verifiers: Vec<ProtocolTree> = (0..2).map(|o| verifier_for(&tree, AlternativeId(o))).collect();
        let refs: Vec<&ProtocolTree> = verifiers.iter().collect();
        for x in inst.inputs() {
            let p: Vec<Valuation> = x.iter().map(|&v| Valuation::int(v as i64)).collect();
            match (inst.f)(&x) {
                Some(want) => {
                    let e = eliminate(&inst.c0, &inst.c1, &x)?;
                    ensure!(e.output == want, "{} {x:?}: eliminated to {}", inst.name, e.output);
                    for r in e.rounds.iter().filter(|r| r.chosen.is_some()) {
                        ensure!(r.live_after * n <= (n - 1) * r.live_before, "{} {x:?}: round {r:?}", inst.name);
                        rounds += 1;
                    }
                    let red = verification_to_bitvectors(&refs, &p)?;
                    ensure!(red.outcome_verifier() == usize::from(want), "{} {x:?}: wrong verifier", inst.name);
                    promise += 1;
                }
                None => {
                    let r = verification_to_bitvectors(&refs, &p);
                    ensure!(matches!(r, Err(Error::ReductionIntegrity { .. })), "{} {x:?}: violating input accepted", inst.name);
                    violating += 1;
                }
            }
        }
    }
    ensure!(violating > 0, "no promise-violating inputs were exercised");
    // Deterministic protocols give total verifiers.
    let mut protocol_inputs = 0;
    for c in [proof1::build(1)?, proof2::build(3)?, disj::build(3)?] {
        let f = c.f.as_ref();
        let verifiers: Vec<ProtocolTree> = (0..f.alternatives()).map(|o| verifier_for(&c.protocol, AlternativeId(o))).collect();
        let refs: Vec<&ProtocolTree> = verifiers.iter().collect();
        for p in profiles(&c.grid)? {
            let red = verification_to_bitvectors(&refs, &p)?;
            ensure!(red.outcome_verifier() == f.evaluate(&p)?.0, "{}: wrong verifier at {p:?}", c.id);
            protocol_inputs += 1;
        }
    }
    Ok(format!(
        "{promise} promise inputs, {rounds} shrinking rounds, {violating} violating inputs rejected, {protocol_inputs} protocol inputs"
    ))
}

fn main() -> ExitCode {
    let criteria: [(u32, &str, Option<Duration>, fn() -> Outcome); 10] = [
        (1, "payment counting", Some(Duration::from_secs(1)), c1_payment_counting),
        (2, "dot-product distinctness", Some(Duration::from_secs(1)), c2_dot_products),
        (3, "closed-form prices", Some(Duration::from_secs(60)), c3_closed_forms),
        (4, "price image bound", None, c4_image_bound),
        (5, "multi-unit reduction", Some(Duration::from_secs(30)), c5_multiunit),
        (6, "truthful-in-expectation payments", None, c6_tie),
        (7, "threshold payment protocol", None, c7_threshold_protocol),
        (8, "unique-payment proof system", None, c8_proof_system),
        (9, "reach engines", None, c9_reach),
        (10, "promise covers and verification", None, c10_appendix),
    ];
    let mut failed = 0;
    for (n, name, limit, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        match outcome {
            Ok(detail) if limit.is_none_or(|l| took <= l) => println!("PASS {n:>2} {name}: {detail} [{took:.2?}]"),
            Ok(detail) => {
                failed += 1;
                println!("FAIL {n:>2} {name}: over the time limit {:?}: {detail} [{took:.2?}]", limit.unwrap());
            }
            Err(e) => {
                failed += 1;
                println!("FAIL {n:>2} {name}: {e} [{took:.2?}]");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
