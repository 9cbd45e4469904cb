//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Criteria listed in `KNOWN_FAILURES` are reproducible disagreements with the
//! published claims (see README). The run exits non-zero when the set of
//! failing criteria differs from that list in either direction.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use mkorders::catalog;
use mkorders::enumerate::{classify, enumerate, enumerate_naive};
use mkorders::order::{all_tuples, random_tuples, OrderOracle};
use mkorders::pingpong;
use mkorders::realization::random_homeomorphism;
use mkorders::word::ball;
use mkorders::{MarkovPattern, Realization};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const KNOWN_FAILURES: [usize; 2] = [1, 8];

const SMALL_K_LIMIT: Duration = Duration::from_secs(10);
const K9_LIMIT: Duration = Duration::from_secs(60);
const RANDOM_QUADS: usize = 10_000;
const SEED: u64 = 20240601;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    notes: Vec<String>,
}

impl Outcome {
    fn new() -> Outcome {
        Outcome {
            pass: true,
            notes: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.pass = false;
            self.notes.push(what.into());
        }
    }
}

fn small_systems() -> Vec<MarkovPattern> {
    let mut out: Vec<MarkovPattern> = (1..=7).flat_map(|k| enumerate(k).unwrap()).collect();
    out.push(catalog::degree9());
    out
}

fn catalog_systems() -> Vec<(&'static str, Realization)> {
    catalog::KEYS
        .iter()
        .map(|&k| (k, Realization::build(&catalog::by_key(k).unwrap()).unwrap()))
        .collect()
}

fn timed(k: usize) -> (Vec<MarkovPattern>, Duration) {
    let t = Instant::now();
    let ps = enumerate(k).unwrap();
    (ps, t.elapsed())
}

fn criterion_1() -> Outcome {
    let mut o = Outcome::new();
    let (k1, t1) = timed(1);
    o.check(k1.len() == 2, format!("k=1: {} patterns, want 2", k1.len()));
    let (k3, t3) = timed(3);
    o.check(k3.is_empty(), format!("k=3: {} patterns, want 0", k3.len()));
    for (k, t) in [(1, t1), (3, t3)] {
        o.check(t < SMALL_K_LIMIT, format!("k={k} took {t:?}"));
    }
    for k in [5, 7] {
        let (ps, t) = timed(k);
        o.check(t < SMALL_K_LIMIT, format!("k={k} took {t:?}"));
        let lift = catalog::lift(k).unwrap().canonicalize();
        let mirror = lift.swap_labels().canonicalize();
        o.check(
            ps.contains(&lift) && ps.contains(&mirror),
            format!("k={k}: lift orbit missing"),
        );
        o.check(
            ps.len() == 2,
            format!("k={k}: {} patterns, want 2", ps.len()),
        );
        for c in classify(&ps) {
            if !c.members.contains(&lift) {
                let names: Vec<String> = c.members.iter().map(|p| p.to_string()).collect();
                o.notes.push(format!(
                    "k={k}: class outside the lift orbit {{{}}}",
                    names.join(", ")
                ));
                o.pass = false;
            }
        }
    }
    let (_, t9) = timed(9);
    o.check(t9 < K9_LIMIT, format!("k=9 took {t9:?}"));
    o
}

fn criterion_2() -> Outcome {
    let mut o = Outcome::new();
    let p = catalog::degree9();
    let r = p.report();
    o.check(r.is_valid(), "degree-9 word does not validate");
    o.check(
        r.k == 9 && r.shift == Some(9),
        format!("k = {}, shift = {:?}", r.k, r.shift),
    );
    let steps = p.principal_cycle().steps.len();
    o.check(steps == 18, format!("principal cycle has {steps} gaps"));
    for e in catalog::degree9_checks() {
        o.check(false, e);
    }
    o.check(
        enumerate(9).unwrap().contains(&p.canonicalize()),
        "enumerate(9) misses it",
    );
    o
}

fn criterion_3() -> Outcome {
    let mut o = Outcome::new();
    for k in [5, 7, 11, 13] {
        let p = match catalog::lift(k) {
            Ok(p) => p,
            Err(e) => {
                o.check(false, format!("lift({k}): {e}"));
                continue;
            }
        };
        for e in catalog::lift_checks(&p).unwrap() {
            o.check(false, format!("k={k}: {e}"));
        }
        let c = p.principal_cycle();
        let mut seen: Vec<usize> = c.steps.iter().map(|s| s.gap).collect();
        seen.sort_unstable();
        seen.dedup();
        o.check(
            c.steps.len() == 2 * k && seen.len() == 2 * k && seen == p.principal_gaps(),
            format!(
                "k={k}: cycle walk does not visit all {} principal gaps",
                2 * k
            ),
        );
    }
    o
}

fn criterion_4() -> Outcome {
    let mut o = Outcome::new();
    for p in small_systems() {
        match Realization::build(&p) {
            Ok(r) => {
                for e in r.check_conditions() {
                    o.check(false, format!("{p}: {e}"));
                }
            }
            Err(e) => o.check(false, format!("{p}: {e}")),
        }
    }
    o
}

fn criterion_5() -> Outcome {
    let mut o = Outcome::new();
    for (key, r) in catalog_systems() {
        let refinement = r.refine(6).unwrap();
        for v in refinement.violations.iter().take(3) {
            o.check(false, format!("{key}: {v}"));
        }
        for e in r.check_boundary_codings(4 * r.k()) {
            o.check(false, format!("{key}: {e}"));
        }
    }
    o
}

fn criterion_6() -> Outcome {
    let mut o = Outcome::new();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let b3 = ball(3);
    let b6 = ball(6);
    let exhaustive: Vec<[_; 4]> = all_tuples(&b3);
    for (key, r) in catalog_systems() {
        let oracle = OrderOracle::new(&r, 12).unwrap();
        let random: Vec<[_; 4]> = random_tuples(&mut rng, &b6, RANDOM_QUADS);
        for (label, quads) in [("ball(3)", &exhaustive), ("random ball(6)", &random)] {
            let mut bad = 0usize;
            for [g1, g2, g3, _] in quads.iter() {
                let distinct = g1 != g2 && g2 != g3 && g1 != g3;
                match oracle.order(g1, g2, g3) {
                    Ok(c) if (c == 0) != distinct => {}
                    _ => bad += 1,
                }
            }
            o.check(
                bad == 0,
                format!("{key} {label}: {bad} degeneracy violations"),
            );
            match oracle.check_cocycle(quads) {
                Ok(rep) => o.check(
                    rep.passed(),
                    format!("{key} {label}: {} cocycle violations", rep.violations.len()),
                ),
                Err(e) => o.check(false, format!("{key} {label}: {e}")),
            }
            let mut bad = 0usize;
            for [g1, g2, g3, g4] in quads.iter() {
                let lhs = oracle.order(&g4.multiply(g1), &g4.multiply(g2), &g4.multiply(g3));
                let rhs = oracle.order(g1, g2, g3);
                match (lhs, rhs) {
                    (Ok(x), Ok(y)) if x == y => {}
                    _ => bad += 1,
                }
            }
            o.check(
                bad == 0,
                format!("{key} {label}: {bad} invariance violations"),
            );
        }
    }
    o
}

fn criterion_7() -> Outcome {
    let mut o = Outcome::new();
    for p in small_systems() {
        let r = Realization::build(&p).unwrap();
        let data = pingpong::omega_sets(&r);
        let inc = pingpong::check_strict_inclusions(&r, &data);
        if let Some(f) = inc.first_failure() {
            o.check(false, format!("{p}: inclusion fails for {}", f.word));
            continue;
        }
        match pingpong::certify(&r, pingpong::DEFAULT_MAX_LEVEL) {
            Ok(cert) => {
                o.check(
                    pingpong::verify(&r, &cert).is_ok(),
                    format!("{p}: certificate does not verify"),
                );
                o.check(
                    cert.margin > mkorders::circle::q(0, 1),
                    format!("{p}: margin {}", cert.margin),
                );
                let inside = cert.arcs.iter().flatten().any(|a| a.contains(r.x0()));
                o.check(!inside, format!("{p}: x0 lies in a certificate arc"));
            }
            Err(e) => o.check(false, format!("{p}: {e}")),
        }
    }
    o
}

fn criterion_8() -> Outcome {
    let mut o = Outcome::new();
    for key in ["standard", "lift:5", "lift:7", "degree9"] {
        let r = Realization::build(&catalog::by_key(key).unwrap()).unwrap();
        let oracle = OrderOracle::new(&r, 4).unwrap();
        let rep = oracle.check_sigma0_negation(4).unwrap();
        if let Some(v) = rep.violations.first() {
            let args: Vec<String> = v.args.iter().map(|g| g.to_string()).collect();
            o.check(
                false,
                format!(
                    "{key}: {} of {} triples violate, first ({}) gives {} vs {}",
                    rep.violations.len(),
                    rep.checked,
                    args.join(", "),
                    v.lhs,
                    v.rhs
                ),
            );
        }
    }
    o
}

fn criterion_9() -> Outcome {
    let mut o = Outcome::new();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for p in small_systems() {
        let want = p.canonicalize();
        let r = Realization::build(&p).unwrap();
        let scrambled = r.conjugate(&random_homeomorphism(&mut rng, 6, 997));
        let reread = Realization::from_json(&scrambled.to_json()).unwrap();
        for (label, sys) in [("plain", &r), ("conjugated", &reread)] {
            match sys.extract_pattern(3) {
                Ok(got) => o.check(got == want, format!("{p} {label}: extracted {got}")),
                Err(e) => o.check(false, format!("{p} {label}: {e}")),
            }
        }
    }
    o
}

fn criterion_10() -> Outcome {
    let mut o = Outcome::new();
    for k in [1, 3] {
        let fast: BTreeSet<_> = enumerate(k).unwrap().into_iter().collect();
        let naive: BTreeSet<_> = enumerate_naive(k).unwrap().into_iter().collect();
        o.check(
            fast == naive,
            format!("k={k}: {} vs {} patterns", fast.len(), naive.len()),
        );
    }
    o
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("enumeration counts and runtime", criterion_1),
        ("degree-9 reproduction", criterion_2),
        ("lift index formulas", criterion_3),
        ("exact realizations", criterion_4),
        ("interval calculus and boundary codings", criterion_5),
        ("circular-order axioms", criterion_6),
        ("ping-pong certificates", criterion_7),
        ("sigma0 negation on ball(4)", criterion_8),
        ("extraction round trip", criterion_9),
        ("naive vs optimized enumeration", criterion_10),
    ];
    let mut failed = BTreeSet::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let n = i + 1;
        let t = Instant::now();
        let out = f();
        let verdict = if out.pass { "PASS" } else { "FAIL" };
        let known = if !out.pass && KNOWN_FAILURES.contains(&n) {
            " (known deviation)"
        } else {
            ""
        };
        println!(
            "criterion {n:2} {verdict} {name} [{:.1}s]{known}",
            t.elapsed().as_secs_f64()
        );
        for note in &out.notes {
            println!("    {note}");
        }
        if !out.pass {
            failed.insert(n);
        }
    }
    let expected: BTreeSet<usize> = KNOWN_FAILURES.into_iter().collect();
    if failed != expected {
        println!("failing criteria {failed:?} differ from the recorded deviations {expected:?}");
        std::process::exit(1);
    }
    println!(
        "acceptance: {} PASS, {} known deviations",
        10 - failed.len(),
        failed.len()
    );
}
