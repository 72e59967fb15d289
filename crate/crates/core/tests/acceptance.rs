//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::Command;
use std::time::Instant;

use bidisc::census::{count_switchers, is_switcher, s2_via_trace};
use bidisc::cli::{cmd_verify, ExitStatus};
use bidisc::cyclic::{deviation_bound, factorize_high_disc, CyclicOptions};
use bidisc::dichotomy::{classify, Branch, ClassifyOptions, Outcome};
use bidisc::io::{parse_factorization, parse_signing, write_factorization, write_signing};
use bidisc::oracle::{
    best_factorization_bruteforce, crown_factorization_search, for_each_factorization, for_each_signing,
    nearest_one_sided_bruteforce, random_latin_square, switcher_count_bruteforce, OracleBudget,
};
use bidisc::rational::{ratio, to_f64, Rational};
use bidisc::rng::{random_permutation, rng_from_seed};
use bidisc::spectral::{nearest_one_sided, top_singular_pair, PowerOptions};
use bidisc::switching::{
    factorize_many_switchers, split_two_factor, CrownCache, CrownMode, CrownOptions, CrownSource, SwitcherOptions,
};
use bidisc::two_factor::{double_cover_cycle, lift_two_factorization};
use bidisc::{disc_matching, signed_sum, Cycle, OneFactorization, Orientation, SignMatrix, TwoFactor};
use rand::Rng;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn random_signing(n: usize, p: f64, seed: u64) -> SignMatrix {
    let mut rng = rng_from_seed(seed);
    SignMatrix::from_fn(n, |_, _| rng.gen_bool(p))
}

fn balanced(n: usize, seed: u64) -> Vec<i8> {
    let perm = random_permutation(n, &mut rng_from_seed(seed));
    let mut z = vec![-1i8; n];
    for &i in &perm[..n.div_ceil(2)] {
        z[i] = 1;
    }
    z
}

fn trace_identity() -> Check {
    let mut checked = 0usize;
    for n in [2, 3] {
        let bad = std::sync::atomic::AtomicUsize::new(0);
        let total = std::sync::atomic::AtomicUsize::new(0);
        for_each_signing(n, |m| {
            total.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
            if s2_via_trace(m).ok() != Some(count_switchers(m).s2) {
                bad.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
            }
        });
        let total = total.into_inner();
        ensure(total == 1 << (n * n), || format!("n={n}: swept {total} signings"))?;
        ensure(bad.into_inner() == 0, || format!("n={n}: identity failed"))?;
        checked += total;
    }
    for n in [8, 16, 32] {
        for seed in 0..500 {
            let m = random_signing(n, 0.5, 1000 * n as u64 + seed);
            let s2 = count_switchers(&m).s2;
            ensure(s2_via_trace(&m).map_err(|e| e.to_string())? == s2, || format!("n={n} seed={seed}"))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} signings, exact"))
}

fn census_vs_enumeration() -> Check {
    let budget = OracleBudget::default();
    let mut checked = 0;
    for n in [2, 3] {
        let bad = std::sync::atomic::AtomicUsize::new(0);
        for_each_signing(n, |m| {
            if switcher_count_bruteforce(m, &budget).ok() != Some(count_switchers(m)) {
                bad.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
            }
        });
        ensure(bad.into_inner() == 0, || format!("n={n}: mismatch"))?;
        checked += 1 << (n * n);
    }
    for seed in 0..200 {
        let m = random_signing(10, 0.2 + 0.003 * seed as f64, 77 + seed);
        let fast = count_switchers(&m);
        let slow = switcher_count_bruteforce(&m, &budget).map_err(|e| e.to_string())?;
        ensure((fast.s, fast.s1, fast.s2) == (slow.s, slow.s1, slow.s2), || format!("n=10 seed={seed}: {fast:?} vs {slow:?}"))?;
        checked += 1;
    }
    Ok(format!("{checked} signings, s/s1/s2 exact"))
}

fn one_sided_baseline() -> Check {
    let mut matchings = 0usize;
    for n in [4usize, 5, 6, 7] {
        let expected = if n % 2 == 0 { Rational::from_integer(0) } else { ratio(1, n as i128) };
        for (k, orientation) in [Orientation::XSide, Orientation::YSide].into_iter().enumerate() {
            let m = SignMatrix::one_sided(&balanced(n, 10 * n as u64 + k as u64), orientation).map_err(|e| e.to_string())?;
            let mut check = |f: &OneFactorization| -> Result<(), String> {
                for pm in f.matchings() {
                    let d = disc_matching(&m, pm).map_err(|e| e.to_string())?;
                    ensure(d == expected, || format!("n={n}: disc {d} != {expected}"))?;
                    matchings += 1;
                }
                Ok(())
            };
            if n <= 5 {
                let (best, opt) = best_factorization_bruteforce(&m, &OracleBudget::default()).map_err(|e| e.to_string())?;
                ensure(opt == expected, || format!("n={n}: optimum {opt}"))?;
                check(&best)?;
                let mut all_ok = true;
                for_each_factorization(n, |rows| {
                    let f = OneFactorization::from_rows(n, rows.to_vec()).expect("oracle rows are valid");
                    all_ok &= f.matchings().iter().all(|pm| disc_matching(&m, pm).unwrap() == expected);
                    true
                });
                ensure(all_ok, || format!("n={n}: some enumerated factorization deviates"))?;
            } else {
                let mut rng = rng_from_seed(500 + n as u64 + k as u64);
                for _ in 0..100 {
                    check(&random_latin_square(n, &mut rng))?;
                }
            }
        }
    }
    Ok(format!("{matchings} matchings at the exact one-sided value"))
}

fn cyclic_desk_scale() -> Check {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut runs = 0;
    for n in [64usize, 128, 256] {
        let bound = deviation_bound(n);
        for p in [0.6, 0.75, 0.9] {
            for seed in 0..20u64 {
                let m = random_signing(n, p, seed * 7919 + n as u64);
                let c = bidisc::disc_graph(&m);
                let opts = CyclicOptions {
                    max_tries: 100,
                    sampler_bound: None,
                    seed,
                };
                let out = factorize_high_disc(&m, &opts).map_err(|e| e.to_string())?;
                ensure(out.report.sampler_converged, || format!("n={n} p={p} seed={seed}: sampler exhausted"))?;
                for pm in out.factorization.matchings() {
                    let dev = to_f64(&(disc_matching(&m, pm).unwrap() - c)).abs();
                    worst = worst.max(dev / bound);
                    ensure(dev <= bound, || format!("n={n} p={p} seed={seed}: deviation {dev} > {bound}"))?;
                }
                runs += 1;
            }
        }
    }
    Ok(format!(
        "{runs} runs, worst deviation {:.3} of the bound, {:.1}s",
        worst,
        start.elapsed().as_secs_f64()
    ))
}

fn many_switchers_desk_scale() -> Check {
    let start = Instant::now();
    let cache = CrownCache::new();
    let mut runs = 0;
    let mut min_margin = f64::INFINITY;
    let mut positive = 0;
    for (n, mode) in [(32, CrownMode::Auto), (64, CrownMode::Auto), (9, CrownMode::Exact), (11, CrownMode::Exact), (13, CrownMode::Exact)] {
        for seed in 0..10u64 {
            let m = random_signing(n, 0.5, 31 * seed + n as u64);
            let eta = Rational::new(count_switchers(&m).s as i128, (n as i128).pow(4));
            let opts = SwitcherOptions {
                seed,
                crown: CrownOptions { mode, ..Default::default() },
                ..SwitcherOptions::default()
            };
            let out = factorize_many_switchers(&m, &opts, &cache).map_err(|e| format!("n={n} seed={seed}: {e}"))?;
            ensure(out.report.eta == eta, || format!("n={n}: eta {} != measured {eta}", out.report.eta))?;
            ensure(out.factorization.n() == n, || format!("n={n}: {} matchings", out.factorization.n()))?;
            if mode == CrownMode::Exact {
                ensure(out.report.crown_source.is_some_and(|s| s != CrownSource::Explicit), || format!("n={n}: exact crown not used"))?;
            }
            let bound = eta / 8 - ratio(3, n as i128);
            if bound > Rational::from_integer(0) {
                positive += 1;
            }
            let verdict = cmd_verify(&write_signing(&m), &write_factorization(&out.factorization), bound).map_err(|e| e.to_string())?;
            ensure(verdict.exit == ExitStatus::Success, || format!("n={n} seed={seed}: verify {:?}", verdict.report.results))?;
            let min = verdict.report.results["min_disc"].as_f64().unwrap();
            min_margin = min_margin.min(min - to_f64(&bound));
            runs += 1;
        }
    }
    Ok(format!(
        "{runs} runs verified ({positive} with a positive bound), smallest margin over the bound {min_margin:.4}, {:.1}s",
        start.elapsed().as_secs_f64()
    ))
}

fn c4_rich_factor(n: usize, seed: u64, planted: bool) -> (SignMatrix, TwoFactor) {
    let mut rng = rng_from_seed(seed);
    let mut m = random_signing(n, 0.5, seed ^ 0x5eed);
    let px = random_permutation(n, &mut rng);
    let py = random_permutation(n, &mut rng);
    let mut cycles = Vec::new();
    for k in 0..n / 2 {
        let rows = (px[2 * k], px[2 * k + 1]);
        let cols = (py[2 * k], py[2 * k + 1]);
        if planted && rng.gen_bool(0.9) {
            while !is_switcher(&m, rows, cols) {
                for (i, j) in [(rows.0, cols.0), (rows.0, cols.1), (rows.1, cols.0), (rows.1, cols.1)] {
                    if rng.gen_bool(0.5) {
                        m.flip(i, j);
                    }
                }
            }
        }
        cycles.push(Cycle::new(vec![rows.0, rows.1], vec![cols.0, cols.1]).unwrap());
    }
    (m, TwoFactor::new(n, cycles).unwrap())
}

fn local_switch() -> Check {
    let n = 32;
    let mut applications = 0;
    let mut nonvacuous = 0;
    for seed in 0..200u64 {
        let (m, f) = c4_rich_factor(n, 9000 + seed, seed % 2 == 0);
        let count = f.cycles().iter().filter(|c| is_switcher(&m, (c.xs()[0], c.xs()[1]), (c.ys()[0], c.ys()[1]))).count();
        let alpha = ratio(count as i128, n as i128);
        let r = split_two_factor(&m, &f, alpha).map_err(|e| format!("seed={seed}: {e}"))?;
        let guarantee = alpha / 4 - ratio(3, n as i128);
        if guarantee > Rational::from_integer(0) {
            nonvacuous += 1;
        }
        ensure(r.disc1 >= guarantee && r.disc2 >= guarantee, || format!("seed={seed}: discs {} {} < {guarantee}", r.disc1, r.disc2))?;
        ensure(disc_matching(&m, &r.m1).unwrap() == r.disc1 && disc_matching(&m, &r.m2).unwrap() == r.disc2, || format!("seed={seed}: reported discs"))?;
        let factor_edges: BTreeSet<(usize, usize)> = f.edges().collect();
        let split_edges: Vec<(usize, usize)> = r.m1.edges().chain(r.m2.edges()).collect();
        let split_set: BTreeSet<(usize, usize)> = split_edges.iter().copied().collect();
        ensure(split_edges.len() == 2 * n && split_set == factor_edges, || format!("seed={seed}: edges not conserved"))?;
        let (a, b) = f.alternating_matchings();
        let (sa, sb) = (signed_sum(&m, &a).unwrap(), signed_sum(&m, &b).unwrap());
        let mut state = if r.applied.first().is_some_and(|x| x.before == (sb, sa)) { (sb, sa) } else { (sa, sb) };
        for app in &r.applied {
            ensure(app.before == state, || format!("seed={seed}: application chain broken"))?;
            ensure(matches!(app.delta.abs(), 2 | 4), || format!("seed={seed}: delta {}", app.delta))?;
            ensure(app.after == (state.0 + app.delta, state.1 - app.delta), || format!("seed={seed}: sums not shifted by +-delta"))?;
            state = app.after;
            applications += 1;
        }
        let finals = (signed_sum(&m, &r.m1).unwrap(), signed_sum(&m, &r.m2).unwrap());
        ensure(r.applied.is_empty() || state == finals, || format!("seed={seed}: final sums {finals:?} vs chain {state:?}"))?;
    }
    Ok(format!("200 factors, {applications} applications, {nonvacuous} with a positive guarantee"))
}

fn perturbed(n: usize, orientation: Orientation, k: usize, seed: u64) -> SignMatrix {
    let mut m = SignMatrix::one_sided(&balanced(n, seed), orientation).unwrap();
    let mut rng = rng_from_seed(seed + 1);
    for c in rand::seq::index::sample(&mut rng, n * n, k) {
        m.flip(c / n, c % n);
    }
    m
}

fn closeness_desk_scale() -> Check {
    let start = Instant::now();
    let cache = CrownCache::new();
    let mut runs = 0;
    // epsilon = 0.253 gives alpha = 0.0040005625, the nearest to 4e-3 with
    // a short decimal epsilon.
    for (alpha, epsilon) in [(0.01, ratio(2, 5)), (0.004, ratio(253, 1000))] {
        for n in [32usize, 64] {
            let k = (alpha * (n * n) as f64 / 10.0).floor() as usize;
            for (o, orientation) in [Orientation::XSide, Orientation::YSide].into_iter().enumerate() {
                for seed in 0..5u64 {
                    let m = perturbed(n, orientation, k, 100 * seed + o as u64 + n as u64);
                    let opts = ClassifyOptions { seed, ..Default::default() };
                    let cert = classify(&m, epsilon, &opts, &cache).map_err(|e| e.to_string())?;
                    ensure(cert.branch == Branch::Close, || format!("n={n} k={k}: branch {:?}", cert.branch))?;
                    let Outcome::Certificate { certificate, .. } = &cert.outcome else {
                        return Err("no certificate".into());
                    };
                    let bound = 4.0 * to_f64(&cert.params.alpha).sqrt();
                    ensure(to_f64(&certificate.normalized) <= bound && certificate.satisfied, || {
                        format!("n={n} k={k}: normalized {} > {bound}", certificate.normalized)
                    })?;
                    ensure(certificate.hamming == m.hamming(&certificate.pattern()).unwrap(), || "hamming not recounted".into())?;
                    runs += 1;
                }
            }
        }
    }
    let mut worst_ratio = 1.0f64;
    for n in [6usize, 8, 10, 12] {
        for k in 0..=3 {
            for seed in 0..5u64 {
                let orientation = if seed % 2 == 0 { Orientation::XSide } else { Orientation::YSide };
                let m = perturbed(n, orientation, k, 7 * seed + n as u64);
                let summary = top_singular_pair(&m, &PowerOptions { seed, ..Default::default() }).map_err(|e| e.to_string())?;
                let spectral = nearest_one_sided(&m, &summary, 0.01).map_err(|e| e.to_string())?;
                let best = nearest_one_sided_bruteforce(&m, 0.01, &OracleBudget::default()).map_err(|e| e.to_string())?;
                ensure(best.hamming <= spectral.hamming, || "oracle above spectral".into())?;
                ensure(spectral.hamming <= 3 * best.hamming, || {
                    format!("n={n} k={k}: spectral {} vs optimum {}", spectral.hamming, best.hamming)
                })?;
                if best.hamming > 0 {
                    worst_ratio = worst_ratio.max(spectral.hamming as f64 / best.hamming as f64);
                }
            }
        }
    }
    Ok(format!(
        "{runs} classifications in branch 3; worst spectral/optimal ratio {worst_ratio:.2} at n <= 12; {:.1}s",
        start.elapsed().as_secs_f64()
    ))
}

fn spectral_consistency() -> Check {
    let mut worst = 0.0f64;
    for case in 0..100u64 {
        let n = 2 + (case as usize % 15);
        let m = random_signing(n, 0.3 + 0.004 * case as f64, 4242 + case);
        let dense = nalgebra::DMatrix::from_fn(n, n, |i, j| m.get(i, j) as f64);
        let sv = dense.singular_values();
        let top = sv.iter().cloned().fold(0.0, f64::max);
        let ours = top_singular_pair(&m, &PowerOptions { seed: case, ..Default::default() }).map_err(|e| e.to_string())?;
        let err = (ours.sigma1 - top).abs();
        worst = worst.max(err / n as f64);
        ensure(err <= 1e-6 * n as f64, || format!("case {case} (n={n}): sigma1 {} vs {top}", ours.sigma1))?;
        let sum_sq: f64 = sv.iter().map(|s| s * s).sum();
        ensure((sum_sq - (n * n) as f64).abs() <= 1e-6 * (n * n) as f64, || format!("case {case}: sum sigma^2 = {sum_sq}"))?;
    }
    Ok(format!("100 signings, worst |sigma1 error| / n = {worst:.2e}"))
}

fn double_cover() -> Check {
    for m in 3..=100usize {
        let walks = double_cover_cycle(m).map_err(|e| e.to_string())?;
        let mut expected: BTreeSet<((usize, u8), (usize, u8))> = BTreeSet::new();
        for v in 0..m {
            let w = (v + 1) % m;
            for (a, b) in [((v, 0u8), (w, 1u8)), ((v, 1), (w, 0))] {
                expected.insert(if a < b { (a, b) } else { (b, a) });
            }
        }
        let lens: Vec<usize> = walks.iter().map(|w| w.len()).collect();
        let want = if m % 2 == 1 { vec![2 * m] } else { vec![m, m] };
        ensure(lens == want, || format!("m={m}: component lengths {lens:?}"))?;
        let mut seen_vertices = BTreeSet::new();
        let mut edges = BTreeSet::new();
        for w in &walks {
            for (i, &a) in w.iter().enumerate() {
                ensure(seen_vertices.insert(a), || format!("m={m}: vertex repeated"))?;
                let b = w[(i + 1) % w.len()];
                edges.insert(if a < b { (a, b) } else { (b, a) });
            }
        }
        ensure(edges == expected, || format!("m={m}: edges differ from B(C_m)"))?;
    }
    let factors = crown_factorization_search(7, std::time::Duration::from_secs(30))
        .map_err(|e| e.to_string())?
        .ok_or("no K_7 decomposition found")?;
    let lifted = lift_two_factorization(7, &factors).map_err(|e| e.to_string())?;
    ensure(lifted.factors().len() == 3, || "K_7 lift does not have 3 factors".into())?;
    let mut all = BTreeSet::new();
    for f in lifted.factors() {
        let t: Vec<(usize, usize)> = f.cycle_type().into_iter().collect();
        ensure(t == vec![(4, 2), (6, 1)], || format!("factor type {t:?}"))?;
        for e in f.edges() {
            ensure(e.0 != e.1 && all.insert(e), || format!("edge {e:?} repeated or diagonal"))?;
        }
    }
    ensure(all.len() == 42, || format!("{} edges covered", all.len()))?;
    Ok("m = 3..=100 exact; K_7 lift = 3 x (2C4 + C6) partitioning K_{7,7} - I".into())
}

fn binary() -> PathBuf {
    PathBuf::from(env!("CARGO_BIN_EXE_bidisc"))
}

fn run_bin(args: &[&str]) -> Result<std::process::Output, String> {
    Command::new(binary()).args(args).output().map_err(|e| e.to_string())
}

fn determinism_and_round_trip() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let p = |name: &str| dir.path().join(name).to_string_lossy().into_owned();
    let gen = run_bin(&["gen", "--kind", "random", "--n", "24", "--seed", "5", "--output", &p("m.txt")])?;
    ensure(gen.status.success(), || "gen failed".into())?;
    let mut compared = 0;
    for (strategy, extra) in [("switcher", "--relabel-tries=50"), ("cyclic", "--max-tries=100"), ("auto", "--max-tries=100")] {
        let mut outputs = Vec::new();
        let mut results = Vec::new();
        for run in 0..2 {
            let out = p(&format!("f-{strategy}-{run}.txt"));
            let o = run_bin(&["--input", &p("m.txt"), "--json", "factorize", "--strategy", strategy, "--seed", "11", extra, "--output", &out])?;
            let report: serde_json::Value = serde_json::from_slice(&o.stdout).map_err(|e| format!("{strategy}: {e}"))?;
            outputs.push(std::fs::read(&out).map_err(|e| e.to_string())?);
            results.push((report["results"].clone(), report["input_digest"].clone()));
        }
        ensure(outputs[0] == outputs[1], || format!("{strategy}: factorization files differ"))?;
        ensure(results[0] == results[1], || format!("{strategy}: results objects differ"))?;
        compared += 1;
    }
    let odd = run_bin(&["gen", "--kind", "random", "--n", "11", "--seed", "2", "--output", &p("odd.txt")])?;
    ensure(odd.status.success(), || "gen failed".into())?;
    let a = run_bin(&["--input", &p("odd.txt"), "factorize", "--strategy", "switcher", "--crown-mode", "exact", "--seed", "4"])?;
    let b = run_bin(&["--input", &p("odd.txt"), "factorize", "--strategy", "switcher", "--crown-mode", "exact", "--seed", "4"])?;
    ensure(!a.stdout.is_empty() && a.stdout == b.stdout, || "odd switcher output differs".into())?;
    compared += 1;

    let mut rng = rng_from_seed(2024);
    for case in 0..1000 {
        let n = rng.gen_range(1..=24);
        let m = random_signing(n, rng.gen_range(0.0..=1.0), case);
        let text = write_signing(&m);
        ensure(parse_signing(&text).map_err(|e| e.to_string())? == m, || format!("case {case}: signing round trip"))?;
        let f = random_latin_square(n, &mut rng);
        let ftext = write_factorization(&f);
        let back = parse_factorization(&ftext).map_err(|e| e.to_string())?;
        ensure(back.n == n && back.rows == f.rows(), || format!("case {case}: factorization round trip"))?;
    }
    Ok(format!("{compared} byte-identical reruns; 1000 fuzzed round trips"))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 10] = [
        ("1 trace identity", trace_identity),
        ("2 census vs enumeration", census_vs_enumeration),
        ("3 one-sided baseline", one_sided_baseline),
        ("4 cyclic construction", cyclic_desk_scale),
        ("5 switcher construction", many_switchers_desk_scale),
        ("6 local switching", local_switch),
        ("7 closeness certificate", closeness_desk_scale),
        ("8 spectral consistency", spectral_consistency),
        ("9 double cover", double_cover),
        ("10 determinism and round trip", determinism_and_round_trip),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let result = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS  {name}: {detail} [{secs:.1}s]"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name}: {detail} [{secs:.1}s]");
            }
        }
    }
    println!("{} of 10 criteria passed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
