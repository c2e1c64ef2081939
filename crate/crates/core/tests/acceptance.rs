//! Acceptance gate: one line per criterion, non-zero exit if any fails.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zerosum::group::{standard_basis, GroupCtx};
use zerosum::search::{
    compute_davenport, compute_s_le, round_trip_lemmas, verify_conjecture, verify_fixedprop, verify_hamidoune,
    verify_multiplicative, SearchConfig,
};
use zerosum::structure::{construct_conjectured, ConjectureParams};
use zerosum::subsums::{has_zero_sum_le, sigma_t};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

fn cfg() -> SearchConfig {
    SearchConfig::default()
}

fn davenport() -> Outcome {
    let mut bad = Vec::new();
    for n in 2..=4u32 {
        let v = compute_davenport(n, &cfg()).map(|v| v.value);
        if v.as_ref().ok() != Some(&(2 * n - 1)) {
            bad.push(format!("n={n}: {v:?}"));
        }
    }
    outcome(bad.is_empty(), if bad.is_empty() { "D = 3, 5, 7".into() } else { bad.join("; ") })
}

fn eta() -> Outcome {
    let got = |n: u32| compute_s_le(n, n, &cfg()).map(|v| v.value).ok();
    let required = (2..=3u32).all(|n| got(n) == Some(3 * n - 2));
    let stretch = got(4);
    outcome(
        required,
        format!(
            "eta(2) = {:?}, eta(3) = {:?}; stretch eta(4) = {stretch:?} ({})",
            got(2),
            got(3),
            if stretch == Some(10) { "pass" } else { "fail" }
        ),
    )
}

fn s_le_table() -> Outcome {
    let mut rows = Vec::new();
    let mut bad = Vec::new();
    for n in 2..=4u32 {
        for k in 0..n {
            let ell = 2 * n - 1 - k;
            let v = compute_s_le(n, ell, &cfg()).map(|v| v.value);
            if v.as_ref().ok() != Some(&(2 * n - 1 + k)) {
                bad.push(format!("n={n} ell={ell}: {v:?}"));
            }
            rows.push(format!("{n}/{ell}"));
        }
    }
    outcome(bad.is_empty(), format!("{} entries; {}", rows.len(), if bad.is_empty() { "all exact".into() } else { bad.join("; ") }))
}

fn conjecture() -> Outcome {
    let run = |n: u32| -> Result<Vec<u64>, String> {
        let mut orbits = Vec::new();
        for k in 0..n {
            let r = verify_conjecture(n, k, &cfg()).map_err(|e| e.to_string())?;
            if !r.passed() {
                return Err(format!("n={n} k={k}: {:?}", r.counterexamples));
            }
            orbits.push(r.orbits.unwrap_or(0));
        }
        Ok(orbits)
    };
    let required: Vec<_> = (2..=4).map(run).collect();
    let ok = required.iter().all(Result::is_ok);
    let started = Instant::now();
    let stretch = run(5);
    outcome(
        ok,
        format!(
            "orbits n=2..4: {:?}; stretch n=5: {} ({:.1?})",
            required,
            match &stretch {
                Ok(o) => format!("pass, orbits {o:?}"),
                Err(e) => format!("fail: {e}"),
            },
            started.elapsed()
        ),
    )
}

fn construction() -> Outcome {
    let mut checked = 0;
    let mut bad = Vec::new();
    for n in 2..=20u32 {
        let ctx = GroupCtx::new(n).unwrap();
        for k in 2..n.saturating_sub(1) {
            let s = construct_conjectured(ctx, k, standard_basis(ctx), &ConjectureParams::Item3).unwrap();
            checked += 1;
            if has_zero_sum_le(&s, (2 * n - 1 - k) as usize) {
                bad.push(format!("n={n} k={k}"));
            }
        }
    }
    outcome(bad.is_empty(), format!("{checked} constructions, {} failures {bad:?}", bad.len()))
}

fn multiplicative() -> Outcome {
    let mut bad = Vec::new();
    let mut runs = 0;
    for (m, n) in [(2u32, 2u32), (2, 3), (3, 2), (2, 4)] {
        for k_m in 0..m {
            for k_n in 0..n {
                runs += 1;
                match verify_multiplicative(m, n, k_m, k_n, &cfg()) {
                    Ok(r) => {
                        let exhaustive = r.details["exhaustive"]["status"].as_str().unwrap_or("");
                        if !r.passed() || ((m, n) == (2, 2) && exhaustive != "run") {
                            bad.push(format!("({m},{n},{k_m},{k_n})"));
                        }
                    }
                    Err(e) => bad.push(format!("({m},{n},{k_m},{k_n}): {e}")),
                }
            }
        }
    }
    outcome(bad.is_empty(), format!("{runs} instances, exhaustive tier at (2,2); failures {bad:?}"))
}

fn hamidoune() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for n in 2..=4u32 {
        match verify_hamidoune(n, 10_000, 0, &cfg()) {
            Ok(r) => {
                let violated = r.details["violated"].as_u64().unwrap_or(u64::MAX);
                ok &= r.passed() && violated == 0 && r.value == Some(10_000);
                parts.push(format!("n={n}: {} accepted, {violated} violations", r.value.unwrap_or(0)));
            }
            Err(e) => {
                ok = false;
                parts.push(format!("n={n}: {e}"));
            }
        }
    }
    outcome(ok, parts.join("; "))
}

fn fixed_sum() -> Outcome {
    let r = verify_fixedprop(3, 3, &cfg());
    let stretch = verify_fixedprop(4, 3, &cfg());
    let ok = r.as_ref().is_ok_and(|r| r.passed());
    outcome(
        ok,
        format!(
            "n=3: {} orbits; stretch n=4: {}",
            r.as_ref().map_or(0, |r| r.orbits.unwrap_or(0)),
            match &stretch {
                Ok(s) if s.passed() => format!("pass, {} orbits", s.orbits.unwrap_or(0)),
                Ok(s) => format!("fail {:?}", s.counterexamples),
                Err(e) => format!("error {e}"),
            }
        ),
    )
}

fn lemmas() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for n in [3u32, 4] {
        for k in 1..=n - 2 {
            match round_trip_lemmas(n, k, &cfg()) {
                Ok(r) => {
                    ok &= r.passed();
                    parts.push(format!(
                        "({n},{k}): {} ext / {} rem",
                        r.details["extensions"], r.details["removals"]
                    ));
                }
                Err(e) => {
                    ok = false;
                    parts.push(format!("({n},{k}): {e}"));
                }
            }
        }
    }
    outcome(ok, parts.join("; "))
}

fn engine_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut discrepancies = 0;
    for _ in 0..1000 {
        let n = rng.gen_range(2..=5u32);
        let len = rng.gen_range(0..=12usize);
        let terms = common::random_terms(&mut rng, n, len);
        let s = common::to_seq(n, &terms);
        let naive = common::naive_subsums(n, &terms);
        for t in 1..=len {
            let dp: BTreeSet<common::Pair> = sigma_t(&s, t).iter().map(|e| (e.a, e.b)).collect();
            let want: BTreeSet<common::Pair> = naive.iter().filter(|(l, _)| *l == t).map(|&(_, g)| g).collect();
            if dp != want {
                discrepancies += 1;
            }
        }
    }
    outcome(discrepancies == 0, format!("1000 sequences, {discrepancies} discrepancies"))
}

type Criterion = (&'static str, Duration, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        ("Davenport constant for n = 2..4", Duration::from_secs(60), davenport),
        ("eta for n = 2, 3", Duration::from_secs(60), eta),
        ("s_le table for n = 2..4", Duration::from_secs(600), s_le_table),
        ("extremal structure for n = 2..4", Duration::from_secs(900), conjecture),
        ("repeated-sum construction for n = 2..20", Duration::from_secs(60), construction),
        ("multiplicative instances", Duration::from_secs(300), multiplicative),
        ("|Sigma_|G|(S)| lower bound, 10^4 trials", Duration::from_secs(300), hamidoune),
        ("fixed-sum dichotomy for n = 3", Duration::from_secs(300), fixed_sum),
        ("extension and removal round trips", Duration::from_secs(600), lemmas),
        ("DP against naive enumeration", Duration::from_secs(120), engine_oracle),
    ];
    let mut failed = 0;
    for (i, (name, budget, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = f();
        let took = start.elapsed();
        let passed = o.passed && took <= *budget;
        failed += usize::from(!passed);
        println!(
            "criterion {:>2}: {} | {name} | {} | {:.2?} of {:?}",
            i + 1,
            if passed { "PASS" } else { "FAIL" },
            o.detail,
            took,
            budget
        );
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
