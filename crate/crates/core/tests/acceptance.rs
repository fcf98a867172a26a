//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails or overruns its time budget.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::Rng;

use latinlab::census::{count_rectangles, enumerate_rectangles, exact_containment_probability, switch_classes, Guard};
use latinlab::expander::{build_auxiliary_digraph, count_cycles_through, count_paths, degree_report, Digraph, Walk};
use latinlab::lab::{estimate_with_sampler, verify_restriction_identity};
use latinlab::sampler::{
    stream_rng, uniformity_test, CountedExtensionSampler, EnumerationSampler, McmcSampler, Method, SamplerConfig,
};
use latinlab::subsquares::{ln_subsquare_bound, max_proper_subsquare_order, subsquare_bound, subsquare_bound_decreasing};
use latinlab::{Edge, LatinRectangle, PartialLatinRectangle};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn factorial(n: u64) -> u64 {
    (1..=n).product()
}

fn derangements(n: u64) -> u64 {
    // D_0 = 1, D_1 = 0, D_n = (n - 1)(D_{n-1} + D_{n-2})
    let (mut a, mut b) = (1u64, 0u64);
    for i in 2..=n {
        (a, b) = (b, (i - 1) * (a + b));
    }
    if n == 0 {
        a
    } else {
        b
    }
}

fn q(a: u64, b: u64) -> BigRational {
    BigRational::new(a.into(), b.into())
}

fn census_exactness() -> Outcome {
    ensure(count_rectangles(3, 3, Guard::Enforce).unwrap() == BigUint::from(12u32), "|L_{3,3}| != 12")?;
    for n in 1..=7 {
        let got = count_rectangles(1, n, Guard::Enforce).unwrap();
        ensure(got == BigUint::from(factorial(n as u64)), format!("|L_(1,{n})| = {got}"))?;
    }
    for n in 2..=6 {
        let got = count_rectangles(2, n, Guard::Enforce).unwrap();
        let want = factorial(n as u64) * derangements(n as u64);
        ensure(got == BigUint::from(want), format!("|L_(2,{n})| = {got}, want {want}"))?;
    }
    let enumerated = enumerate_rectangles(4, 4, Guard::Enforce).unwrap().count();
    let counted = count_rectangles(4, 4, Guard::Enforce).unwrap();
    ensure(enumerated == 576 && counted == BigUint::from(576u32), format!("order 4: {enumerated} enumerated, {counted} counted"))?;
    Ok("L_(3,3)=12, L_(1,n)=n!, L_(2,n)=n! D_n, L_(4,4)=576".into())
}

fn bijection() -> Outcome {
    let mut seen = 0;
    for (k, n, expect) in [(2, 4, 216), (4, 4, 576)] {
        let all: Vec<LatinRectangle> = enumerate_rectangles(k, n, Guard::Enforce).unwrap().collect();
        ensure(all.len() == expect, format!("|L_({k},{n})| = {}", all.len()))?;
        for l in &all {
            let back = LatinRectangle::from_matchings(&l.to_matchings()).map_err(|e| e.to_string())?;
            ensure(&back == l, format!("round trip changed\n{l}"))?;
        }
        seen += all.len();
    }
    Ok(format!("{seen} round trips"))
}

fn exact_heuristics() -> Outcome {
    let mut checked = 0;
    for (k, n) in [(2, 4), (3, 5)] {
        for r in 0..k {
            for c in 0..n {
                for s in 1..=n as u8 {
                    let p = PartialLatinRectangle::from_entries(k, n, [(r, c, s)]).unwrap();
                    let pr = exact_containment_probability(&p, Guard::Enforce).unwrap();
                    ensure(pr == q(1, n as u64), format!("({k},{n}) cell ({r},{c}) symbol {s}: {pr}"))?;
                    checked += 1;
                }
            }
        }
    }
    for n in [4usize, 5] {
        for k in 1..=n {
            if !Guard::Enforce.permits(k, n) {
                continue;
            }
            for r in 0..k {
                for c1 in 0..n {
                    for c2 in c1 + 1..n {
                        for s1 in 1..=n as u8 {
                            for s2 in (1..=n as u8).filter(|&s| s != s1) {
                                let p = PartialLatinRectangle::from_entries(k, n, [(r, c1, s1), (r, c2, s2)]).unwrap();
                                let pr = exact_containment_probability(&p, Guard::Enforce).unwrap();
                                let want = q(1, (n * (n - 1)) as u64);
                                ensure(pr == want, format!("({k},{n}) row {r}: {pr} != {want}"))?;
                                checked += 1;
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(format!("{checked} patterns"))
}

/// A 1-sparse sub-pattern of a uniform rectangle.
fn sparse_pattern(k: usize, n: usize, target: usize, seed: u64) -> PartialLatinRectangle {
    let sampler = EnumerationSampler::new(k, n, Guard::Enforce).unwrap();
    let mut rng = stream_rng(seed, 0);
    let l = latinlab::sampler::RectangleSampler::sample(&sampler, &mut rng);
    let mut cells: Vec<(usize, usize)> = (0..k).flat_map(|r| (0..n).map(move |c| (r, c))).collect();
    cells.shuffle(&mut rng);
    let mut p = PartialLatinRectangle::empty(k, n).unwrap();
    for (r, c) in cells {
        if p.fill_count() == target {
            break;
        }
        let next = p.with_entry(r, c, l.get(r, c)).unwrap();
        if next.is_c_sparse(1) {
            p = next;
        }
    }
    p
}

fn switch_partition() -> Outcome {
    let empty = PartialLatinRectangle::empty(2, 4).unwrap().to_matchings();
    for col in 0..4 {
        for symbol in 1..=4u8 {
            let sizes = switch_classes(&empty, Edge::new(col, symbol), Guard::Enforce).unwrap();
            ensure(sizes.partition_holds(), format!("partition fails at ({col},{symbol})"))?;
            ensure(sizes.total == BigUint::from(216u32), "empty M must have 216 completions")?;
        }
    }
    let mut zero_checks = 0;
    for (k, n) in [(2, 4), (2, 5), (3, 5)] {
        for seed in 0..10u64 {
            let p = sparse_pattern(k, n, 1 + seed as usize % k, seed);
            let m = p.to_matchings();
            for col in 0..n {
                for symbol in 1..=n as u8 {
                    let e = Edge::new(col, symbol);
                    if m.owner_of(e).is_some() {
                        continue;
                    }
                    let sizes = switch_classes(&m, e, Guard::Enforce).unwrap();
                    ensure(sizes.partition_holds(), format!("partition fails on\n{p}at ({col},{symbol})"))?;
                    for j in 0..k {
                        if m.edges(j).any(|f| f.meets(&e)) {
                            ensure(sizes.a[j].is_zero(), format!("A_{} nonzero though e meets M_{}", j + 1, j + 1))?;
                            zero_checks += 1;
                        }
                    }
                }
            }
        }
    }
    Ok(format!("16 empty-M edges, {zero_checks} zero classes"))
}

fn restriction_identity() -> Outcome {
    let mut parts = Vec::new();
    for (n, m, k) in [(3, 2, 2), (4, 2, 2), (4, 2, 3)] {
        let r = verify_restriction_identity(n, m, k, Guard::Enforce).unwrap();
        ensure(r.holds, format!("({n},{m},{k}): {} != {}", r.lhs, r.rhs))?;
        parts.push(format!("({n},{m},{k}): {}", r.lhs));
    }
    Ok(parts.join(", "))
}

fn sampler_uniformity() -> Outcome {
    let exact = CountedExtensionSampler::new(2, 4, Guard::Enforce).unwrap();
    let mut cfg = SamplerConfig::new(Method::SwitchMcmc, 2, 4, 0);
    cfg.burn_in = 10_000;
    let mcmc = McmcSampler::new(2, 4, &cfg).unwrap();
    let mut lines = Vec::new();
    let samplers: [(&str, &dyn latinlab::sampler::RectangleSampler); 2] = [("exact", &exact), ("switch-mcmc", &mcmc)];
    let mut ok = true;
    for (name, sampler) in samplers {
        let seeds = [11u64, 22, 33];
        let ps: Vec<f64> = seeds
            .iter()
            .map(|&seed| uniformity_test(sampler, 100_000, seed, Guard::Enforce).unwrap().p_value)
            .collect();
        let passes = ps.iter().filter(|&&p| p > 0.01).count();
        ok &= passes * 2 > seeds.len();
        lines.push(format!("{name} p = {}", ps.iter().map(|p| format!("{p:.3}")).collect::<Vec<_>>().join("/")));
    }
    let msg = lines.join("; ");
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn monte_carlo_calibration() -> Outcome {
    let sampler = EnumerationSampler::new(2, 5, Guard::Enforce).unwrap();
    let mut rng = stream_rng(2024, 0);
    let mut covered = 0;
    for i in 0..20u64 {
        // a 1-sparse pattern on two rows has at most two entries
        let target = rng.random_range(1..=3);
        let p = sparse_pattern(2, 5, target, 1000 + i);
        let r = estimate_with_sampler(&p, &sampler, 100_000, 5000 + i, 0.1).unwrap();
        ensure(p.fill_count() <= 3 && p.is_c_sparse(1), "pattern generator broke sparsity")?;
        covered += (r.ci_covers_exact() == Some(true)) as usize;
    }
    let msg = format!("{covered}/20 intervals cover the exact probability");
    if covered >= 18 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

/// Vertex sequences of length `len + 1` starting at `u`, filtered for
/// distinctness; closed ones (`cycle`) return to `u` at the end.
fn brute(d: &Digraph, u: usize, v: Option<usize>, len: usize) -> u64 {
    let n = d.len();
    let mut total = 0;
    let mut seq = vec![u; len + 1];
    let steps = n.pow(len as u32);
    for code in 0..steps {
        let mut x = code;
        for slot in seq.iter_mut().skip(1) {
            *slot = x % n;
            x /= n;
        }
        if !seq.windows(2).all(|w| d.has_arc(w[0], w[1])) {
            continue;
        }
        let ok = match v {
            Some(v) => seq[len] == v && seq.iter().collect::<BTreeSet<_>>().len() == len + 1,
            None => len >= 2 && seq[len] == u && seq[..len].iter().collect::<BTreeSet<_>>().len() == len,
        };
        total += ok as u64;
    }
    total
}

fn path_oracles() -> Outcome {
    let mut rng = stream_rng(77, 0);
    let mut compared = 0;
    for _ in 0..50 {
        let n = rng.random_range(2..=8);
        let d = Digraph::random(n, rng.random_range(0.2..0.9), &mut rng).unwrap();
        for len in 1..=4 {
            for u in 0..n {
                for v in (0..n).filter(|&v| v != u) {
                    let got = count_paths(&d, u, v, len).unwrap();
                    ensure(got == BigUint::from(brute(&d, u, Some(v), len)), format!("paths {u}->{v} length {len}"))?;
                    compared += 1;
                }
                let got = count_cycles_through(&d, u, len).unwrap();
                ensure(got == BigUint::from(brute(&d, u, None, len)), format!("cycles through {u} length {len}"))?;
                compared += 1;
            }
        }
    }
    for n in 3..=8usize {
        let d = Digraph::complete(n).unwrap();
        for len in 1..=4usize.min(n - 1) {
            let paths: u64 = (2..=len).map(|i| (n - i) as u64).product();
            ensure(count_paths(&d, 0, 1, len).unwrap() == BigUint::from(paths), format!("K_{n} paths at {len}"))?;
        }
        for len in 2..=4usize.min(n) {
            let cycles: u64 = (1..len).map(|i| (n - i) as u64).product();
            ensure(count_cycles_through(&d, 0, len).unwrap() == BigUint::from(cycles), format!("K_{n} cycles at {len}"))?;
        }
    }
    Ok(format!("{compared} oracle comparisons; K_8: 120 paths at 4, 42 cycles at 3"))
}

fn auxiliary_structure() -> Outcome {
    let (k, n) = (2, 6);
    let sampler = CountedExtensionSampler::new(k, n, Guard::Enforce).unwrap();
    let mut rng = stream_rng(99, 0);
    for _ in 0..100 {
        let l = latinlab::sampler::RectangleSampler::sample(&sampler, &mut rng);
        let t = l.to_matchings();
        for j in 0..k {
            let mut edges: Vec<Edge> = t.edges(j).collect();
            edges.shuffle(&mut rng);
            edges.truncate(rng.random_range(0..=n / 2));
            let d = build_auxiliary_digraph(&t, j, &edges).map_err(|e| e.to_string())?;
            let r = degree_report(&d);
            ensure(r.vertices == n - edges.len(), format!("vertex count {} with |M_j| = {}", r.vertices, edges.len()))?;
            ensure(
                r.min_semidegree() + edges.len() >= n - k && r.max_semidegree() <= n - k,
                format!("semidegrees [{}, {}] with |M_j| = {}", r.min_semidegree(), r.max_semidegree(), edges.len()),
            )?;
        }
    }
    Ok("200 digraphs from 100 tuples".into())
}

fn walk_envelope() -> Outcome {
    let mut parts = Vec::new();
    for n in [6, 8] {
        let walk = Walk::new(&Digraph::complete(n).unwrap(), 0.5).unwrap();
        let reports = walk.series(0, 60).unwrap();
        let first = reports.iter().find(|r| r.within_envelope_t.is_some()).ok_or("threshold never reached")?;
        for r in &reports {
            ensure(r.distribution.iter().sum::<BigRational>() == BigRational::one(), format!("t = {} does not sum to 1", r.t))?;
            ensure(r.within_envelope_t != Some(false), format!("n = {n}, t = {} outside (1 - a/2)^t", r.t))?;
            ensure(r.within_envelope != Some(false), format!("n = {n}, t = {} outside (1 - a/2)^(t/k)", r.t))?;
        }
        parts.push(format!("n={n}: k={}, t>={}..60", walk.sub_sample(), first.t));
    }
    Ok(parts.join("; "))
}

fn subsquare_bound_shape() -> Outcome {
    let target = 9.0 * 3f64.ln();
    for n in [4.0, 10.0, 1e3, 1e4, 1e6, 1e9] {
        let ln = ln_subsquare_bound(n, 3).unwrap();
        ensure(ln == target, format!("ln bound at m = 3, n = {n}: {ln}"))?;
        let v = subsquare_bound(n, 3).unwrap();
        ensure((v - 19683.0).abs() <= 1e-9 * 19683.0, format!("bound at m = 3, n = {n}: {v}"))?;
    }
    for n in [10_000u64, 1_000_000] {
        ensure(subsquare_bound_decreasing(n).unwrap(), format!("not decreasing for n = {n}"))?;
    }
    Ok("3^9 at m = 3; decreasing for n = 1e4, 1e6".into())
}

fn subsquare_order_bound() -> Outcome {
    let mut worst4 = 0;
    for l in enumerate_rectangles(4, 4, Guard::Enforce).unwrap() {
        let r = max_proper_subsquare_order(&l);
        ensure(2 * r <= 4, format!("order-{r} proper subsquare in\n{l}"))?;
        worst4 = worst4.max(r);
    }
    let sampler = CountedExtensionSampler::new(5, 5, Guard::Override).unwrap();
    let mut worst5 = 0;
    for l in latinlab::sampler::sample_many(&sampler, 1000, 55) {
        let r = max_proper_subsquare_order(&l);
        ensure(2 * r <= 5, format!("order-{r} proper subsquare in\n{l}"))?;
        worst5 = worst5.max(r);
    }
    Ok(format!("largest proper order: {worst4} (n=4), {worst5} (n=5)"))
}

fn main() {
    let criteria: [(&str, u64, fn() -> Outcome); 12] = [
        ("census exactness", 10, census_exactness),
        ("rectangle/matching bijection", 5, bijection),
        ("exact single- and two-entry probabilities", 60, exact_heuristics),
        ("switch-class partition", 60, switch_partition),
        ("restriction identity", 120, restriction_identity),
        ("sampler uniformity", 300, sampler_uniformity),
        ("Monte Carlo calibration", 600, monte_carlo_calibration),
        ("path/cycle oracle equivalence", 60, path_oracles),
        ("auxiliary digraph structure", 60, auxiliary_structure),
        ("walk envelope", 30, walk_envelope),
        ("subsquare bound", 1, subsquare_bound_shape),
        ("subsquare order bound", 300, subsquare_order_bound),
    ];
    let only: Option<usize> = std::env::var("ACCEPTANCE_ONLY").ok().and_then(|s| s.parse().ok());
    let mut failed = 0;
    for (i, (name, budget, run)) in criteria.iter().enumerate() {
        if only.is_some_and(|o| o != i + 1) {
            continue;
        }
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let took = start.elapsed();
        let over = took > Duration::from_secs(*budget);
        let (tag, detail) = match (&outcome, over) {
            (Ok(d), false) => ("PASS", d.clone()),
            (Ok(d), true) => ("FAIL", format!("{d}; over the {budget} s budget")),
            (Err(e), _) => ("FAIL", e.clone()),
        };
        failed += (tag == "FAIL") as usize;
        println!("{tag} {:>2} {name} [{:.2} s / {budget} s] {detail}", i + 1, took.as_secs_f64());
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
