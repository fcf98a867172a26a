//! Experiment drivers: containment estimates with Wilson intervals, the
//! restriction identity for subsquare means, switching-ratio sweeps and
//! subsquare expectation studies.
//!
//! Asymptotic windows are attached to reports for comparison only and are
//! labelled with [`ASYMPTOTIC_LABEL`].

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::seq::SliceRandom;

use crate::bits::binomial;
use crate::census::{
    count_rectangles, exact_containment_probability, par_fold_rectangles, ratio_from, switch_classes, Guard,
};
use crate::error::{Error, Result};
use crate::rectangle::{Edge, LatinRectangle, MatchingTuple, PartialLatinRectangle};
use crate::sampler::{build_sampler, par_fold_samples, stream_rng, Method, RectangleSampler, SamplerConfig};
use crate::subsquares::{count_subsquares, expectation_window, has_subsquare};

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959963984540054;
pub const DEFAULT_EPSILON: f64 = 0.1;
pub const ASYMPTOTIC_LABEL: &str = "asymptotic — report only";

/// Wilson score interval for `hits` successes in `samples` trials.
pub fn wilson_interval(hits: f64, samples: f64, z: f64) -> (f64, f64) {
    if samples <= 0.0 {
        return (0.0, 1.0);
    }
    let p = hits / samples;
    let z2 = z * z;
    let denom = 1.0 + z2 / samples;
    let center = (p + z2 / (2.0 * samples)) / denom;
    let half = z / denom * (p * (1.0 - p) / samples + z2 / (4.0 * samples * samples)).sqrt();
    ((center - half).max(0.0).min(p), (center + half).min(1.0).max(p))
}

fn ratio_f64(num: &BigUint, den: &BigUint) -> f64 {
    BigRational::new(BigInt::from(num.clone()), BigInt::from(den.clone())).to_f64().unwrap_or(f64::NAN)
}

/// Monte Carlo estimate of `Pr[P ⊆ L]`.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateReport {
    pub hits: BigUint,
    pub samples: BigUint,
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Filled entries of the pattern.
    pub entries: usize,
    pub n: usize,
    pub epsilon: f64,
    /// `((1 - ε)/n)^ℓ`.
    pub reference_low: f64,
    /// `((1 + ε)/n)^ℓ`.
    pub reference_high: f64,
    pub seed: u64,
    pub method: Method,
    pub exact: Option<BigRational>,
}

impl EstimateReport {
    pub fn from_counts(
        hits: BigUint,
        samples: BigUint,
        entries: usize,
        n: usize,
        epsilon: f64,
        seed: u64,
        method: Method,
    ) -> Result<Self> {
        if samples.is_zero() {
            return Err(Error::InvalidParameter("need at least one sample".into()));
        }
        if hits > samples {
            return Err(Error::InvalidParameter("hits exceed samples".into()));
        }
        if !(0.0..1.0).contains(&epsilon) {
            return Err(Error::InvalidParameter(format!("epsilon must lie in [0, 1), got {epsilon}")));
        }
        let estimate = ratio_f64(&hits, &samples);
        let (ci_low, ci_high) = wilson_interval(
            hits.to_f64().unwrap_or(f64::NAN),
            samples.to_f64().unwrap_or(f64::NAN),
            Z95,
        );
        let nf = n as f64;
        let e = entries as i32;
        Ok(EstimateReport {
            hits,
            samples,
            estimate,
            ci_low,
            ci_high,
            entries,
            n,
            epsilon,
            reference_low: ((1.0 - epsilon) / nf).powi(e),
            reference_high: ((1.0 + epsilon) / nf).powi(e),
            seed,
            method,
            exact: None,
        })
    }

    /// Pools two reports on the same pattern by summing hits and samples.
    pub fn merge(&self, other: &EstimateReport) -> Result<Self> {
        if self.n != other.n || self.entries != other.entries || self.epsilon != other.epsilon || self.method != other.method {
            return Err(Error::InvalidParameter("reports describe different experiments".into()));
        }
        let mut r = Self::from_counts(
            &self.hits + &other.hits,
            &self.samples + &other.samples,
            self.entries,
            self.n,
            self.epsilon,
            self.seed,
            self.method,
        )?;
        r.exact = self.exact.clone().or_else(|| other.exact.clone());
        Ok(r)
    }

    pub fn ci_meets_reference(&self) -> bool {
        self.ci_low <= self.reference_high && self.reference_low <= self.ci_high
    }

    pub fn ci_covers_exact(&self) -> Option<bool> {
        self.exact.as_ref().map(|q| {
            let x = q.to_f64().unwrap_or(f64::NAN);
            self.ci_low <= x && x <= self.ci_high
        })
    }
}

/// Estimates `Pr[P ⊆ L]` from draws of `sampler` under `seed`.
pub fn estimate_with_sampler(
    p: &PartialLatinRectangle,
    sampler: &dyn RectangleSampler,
    samples: u64,
    seed: u64,
    epsilon: f64,
) -> Result<EstimateReport> {
    if p.k() != sampler.k() || p.n() != sampler.n() {
        return Err(Error::DimensionMismatch { left_k: p.k(), left_n: p.n(), right_k: sampler.k(), right_n: sampler.n() });
    }
    let hits = par_fold_samples(sampler, samples, seed, || 0u64, |h, l| h + l.contains(p).expect("shapes checked") as u64, |a, b| a + b);
    let mut r = EstimateReport::from_counts(
        hits.into(),
        samples.into(),
        p.fill_count(),
        p.n(),
        epsilon,
        seed,
        sampler.method(),
    )?;
    if Guard::Enforce.permits(p.k(), p.n()) {
        r.exact = Some(exact_containment_probability(p, Guard::Enforce)?);
    }
    Ok(r)
}

/// Builds the configured sampler and estimates `Pr[P ⊆ L]`. The exact
/// probability is attached whenever the default size guard allows a census.
pub fn estimate_containment(
    p: &PartialLatinRectangle,
    config: &SamplerConfig,
    samples: u64,
    epsilon: f64,
    guard: Guard,
) -> Result<EstimateReport> {
    let sampler = build_sampler(p.k(), p.n(), config, guard)?;
    estimate_with_sampler(p, sampler.as_ref(), samples, config.seed, epsilon)
}

/// Both sides of `E[SS_m(L)] C(n-m, k-m) = E[SS_m(L|[k])] C(n, k)` over all
/// Latin squares `L` of order `n`, where `L|[k]` keeps the first `k` rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RestrictionIdentity {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub squares: BigUint,
    pub mean_full: BigRational,
    pub mean_restricted: BigRational,
    pub lhs: BigRational,
    pub rhs: BigRational,
    pub holds: bool,
}

pub fn verify_restriction_identity(n: usize, m: usize, k: usize, guard: Guard) -> Result<RestrictionIdentity> {
    if m == 0 || m > k || k > n {
        return Err(Error::InvalidParameter(format!("need 1 <= m <= k <= n, got n = {n}, m = {m}, k = {k}")));
    }
    let (full, restricted) = par_fold_rectangles(
        n,
        n,
        guard,
        || (BigUint::zero(), BigUint::zero()),
        |(a, b), l: &LatinRectangle| {
            let top = l.restrict_rows(0..k).expect("k <= n rows");
            (a + count_subsquares(l, m).expect("m <= n"), b + count_subsquares(&top, m).expect("m <= k"))
        },
        |(a, b), (c, d)| (a + c, b + d),
    )?;
    let squares = count_rectangles(n, n, guard)?;
    let total = BigInt::from(squares.clone());
    let mean_full = BigRational::new(full.into(), total.clone());
    let mean_restricted = BigRational::new(restricted.into(), total);
    let lhs = &mean_full * BigRational::from_integer(binomial(n - m, k - m).into());
    let rhs = &mean_restricted * BigRational::from_integer(binomial(n, k).into());
    Ok(RestrictionIdentity { n, m, k, squares, holds: lhs == rhs, mean_full, mean_restricted, lhs, rhs })
}

/// One `(tuple, edge, row)` entry of a switching-ratio sweep.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepRow {
    pub tuple: usize,
    pub fill: usize,
    pub edge: Edge,
    /// 0-based row.
    pub row: usize,
    pub a: BigUint,
    pub b: BigUint,
    pub total: BigUint,
    /// `(n - k)|A_j| / |B|`.
    pub ratio: BigRational,
    pub partition_holds: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SwitchSweep {
    pub k: usize,
    pub n: usize,
    pub sparsity: usize,
    pub tuples: Vec<PartialLatinRectangle>,
    pub rows: Vec<SweepRow>,
    /// Admissible `(edge, row)` pairs skipped because `B` was empty.
    pub degenerate: usize,
    pub min: Option<BigRational>,
    pub max: Option<BigRational>,
    pub mean: Option<f64>,
    pub label: &'static str,
}

impl SwitchSweep {
    pub fn partition_holds(&self) -> bool {
        self.rows.iter().all(|r| r.partition_holds)
    }
}

/// A `C`-sparse sub-pattern of a uniform rectangle: cells are tried in random
/// order and kept while the pattern stays `C`-sparse, up to a random target size.
fn sparse_pattern(k: usize, n: usize, c: usize, seed: u64, stream: u64, guard: Guard) -> Result<PartialLatinRectangle> {
    let mut rng = stream_rng(seed, stream);
    let l = crate::sampler::sample_exact(k, n, &mut rng, guard)?;
    let mut cells: Vec<(usize, usize)> = (0..k).flat_map(|r| (0..n).map(move |c| (r, c))).collect();
    cells.shuffle(&mut rng);
    let target = rand::Rng::random_range(&mut rng, 1..=(c * k).min(k * n));
    let mut p = PartialLatinRectangle::empty(k, n)?;
    for (r, col) in cells {
        if p.fill_count() == target {
            break;
        }
        let q = p.with_entry(r, col, l.get(r, col))?;
        if q.is_c_sparse(c) {
            p = q;
        }
    }
    Ok(p)
}

/// Exact `(n - k)|A_j|/|B|` over the empty tuple plus `family` sampled
/// `C`-sparse tuples, every unused edge `e` and every row `j` whose matching
/// does not meet `e`.
pub fn switching_ratio_sweep(k: usize, n: usize, sparsity: usize, family: usize, seed: u64, guard: Guard) -> Result<SwitchSweep> {
    guard.check(k, n)?;
    if sparsity == 0 {
        return Err(Error::InvalidParameter("sparsity must be at least 1".into()));
    }
    let mut tuples = vec![PartialLatinRectangle::empty(k, n)?];
    for i in 0..family {
        tuples.push(sparse_pattern(k, n, sparsity, seed, i as u64, guard)?);
    }
    let mut rows = Vec::new();
    let mut degenerate = 0;
    for (ti, p) in tuples.iter().enumerate() {
        let m: MatchingTuple = p.to_matchings();
        for col in 0..n {
            for symbol in 1..=n as u8 {
                let e = Edge::new(col, symbol);
                if m.owner_of(e).is_some() {
                    continue;
                }
                let sizes = switch_classes(&m, e, guard)?;
                let partition = sizes.partition_holds();
                for j in (0..k).filter(|&j| !m.edges(j).any(|f| f.meets(&e))) {
                    match ratio_from(&sizes, n - k, j) {
                        Ok(ratio) => rows.push(SweepRow {
                            tuple: ti,
                            fill: p.fill_count(),
                            edge: e,
                            row: j,
                            a: sizes.a[j].clone(),
                            b: sizes.b.clone(),
                            total: sizes.total.clone(),
                            ratio,
                            partition_holds: partition,
                        }),
                        Err(Error::DegenerateB) => degenerate += 1,
                        Err(e) => return Err(e),
                    }
                }
            }
        }
    }
    let min = rows.iter().map(|r| &r.ratio).min().cloned();
    let max = rows.iter().map(|r| &r.ratio).max().cloned();
    let mean = (!rows.is_empty())
        .then(|| rows.iter().map(|r| r.ratio.to_f64().unwrap_or(f64::NAN)).sum::<f64>() / rows.len() as f64);
    Ok(SwitchSweep { k, n, sparsity, tuples, rows, degenerate, min, max, mean, label: ASYMPTOTIC_LABEL })
}

/// Mean number of order-`m` subsquares over sampled rectangles.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpectationReport {
    pub n: usize,
    pub k: usize,
    pub m: usize,
    pub samples: u64,
    pub seed: u64,
    pub method: Method,
    pub mean: f64,
    /// Normal-approximation 95% interval from the sample variance.
    pub ci_low: f64,
    pub ci_high: f64,
    pub exact_mean: Option<BigRational>,
    /// From [`expectation_window`]; absent when `|L_m|` is not tabulated.
    pub window: Option<(f64, f64)>,
    pub epsilon: f64,
    pub label: &'static str,
}

/// Exact `E[SS_m]` over `L_{k,n}` by enumeration.
pub fn exact_subsquare_mean(k: usize, n: usize, m: usize, guard: Guard) -> Result<BigRational> {
    if m == 0 || m > k {
        return Err(Error::OrderOutOfRange { order: m, max: k });
    }
    let sum = par_fold_rectangles(
        k,
        n,
        guard,
        BigUint::zero,
        |acc, l: &LatinRectangle| acc + count_subsquares(l, m).expect("m <= k"),
        |a, b| a + b,
    )?;
    let total = count_rectangles(k, n, guard)?;
    Ok(BigRational::new(sum.into(), total.into()))
}

pub fn subsquare_expectation_experiment(
    n: usize,
    k: usize,
    m: usize,
    samples: u64,
    config: &SamplerConfig,
    epsilon: f64,
    guard: Guard,
) -> Result<ExpectationReport> {
    if m == 0 || m > k {
        return Err(Error::OrderOutOfRange { order: m, max: k });
    }
    if samples == 0 {
        return Err(Error::InvalidParameter("need at least one sample".into()));
    }
    let sampler = build_sampler(k, n, config, guard)?;
    let (sum, sum_sq) = par_fold_samples(
        sampler.as_ref(),
        samples,
        config.seed,
        || (0f64, 0f64),
        |(s, q), l| {
            let x = count_subsquares(&l, m).expect("m <= k").to_f64().unwrap_or(f64::NAN);
            (s + x, q + x * x)
        },
        |a, b| (a.0 + b.0, a.1 + b.1),
    );
    let nf = samples as f64;
    let mean = sum / nf;
    let var = if samples > 1 { ((sum_sq - nf * mean * mean) / (nf - 1.0)).max(0.0) } else { 0.0 };
    let half = Z95 * (var / nf).sqrt();
    let exact_mean =
        if Guard::Enforce.permits(k, n) { Some(exact_subsquare_mean(k, n, m, Guard::Enforce)?) } else { None };
    let window = match expectation_window(n, k, m, epsilon) {
        Ok(w) => Some(w),
        Err(Error::UnknownSquareCount(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(ExpectationReport {
        n,
        k,
        m,
        samples,
        seed: config.seed,
        method: config.method,
        mean,
        ci_low: mean - half,
        ci_high: mean + half,
        exact_mean,
        window,
        epsilon,
        label: ASYMPTOTIC_LABEL,
    })
}

/// Fraction of `L_{k,n}` with at least one order-`r` subsquare.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyReport {
    pub k: usize,
    pub n: usize,
    pub order: usize,
    pub hits: BigUint,
    pub samples: BigUint,
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Set when the whole of `L_{k,n}` was enumerated; the interval is then degenerate.
    pub exact: Option<BigRational>,
}

/// Exact over `L_{k,n}` when the guard permits, otherwise a Wilson estimate
/// from `samples` draws of the configured sampler.
pub fn subsquare_frequency(
    k: usize,
    n: usize,
    r: usize,
    samples: u64,
    config: &SamplerConfig,
    guard: Guard,
) -> Result<FrequencyReport> {
    if r == 0 || r > k.min(n) {
        return Err(Error::OrderOutOfRange { order: r, max: k.min(n) });
    }
    if guard.permits(k, n) {
        let (hits, total) = par_fold_rectangles(
            k,
            n,
            guard,
            || (0u64, 0u64),
            |(h, t), l: &LatinRectangle| (h + has_subsquare(l, r).expect("order in range") as u64, t + 1),
            |a, b| (a.0 + b.0, a.1 + b.1),
        )?;
        let exact = BigRational::new(hits.into(), total.into());
        let x = exact.to_f64().unwrap_or(f64::NAN);
        return Ok(FrequencyReport {
            k,
            n,
            order: r,
            hits: hits.into(),
            samples: total.into(),
            estimate: x,
            ci_low: x,
            ci_high: x,
            exact: Some(exact),
        });
    }
    if samples == 0 {
        return Err(Error::InvalidParameter("need at least one sample".into()));
    }
    let sampler = build_sampler(k, n, config, guard)?;
    let hits = par_fold_samples(
        sampler.as_ref(),
        samples,
        config.seed,
        || 0u64,
        |h, l| h + has_subsquare(&l, r).expect("order in range") as u64,
        |a, b| a + b,
    );
    let (ci_low, ci_high) = wilson_interval(hits as f64, samples as f64, Z95);
    Ok(FrequencyReport {
        k,
        n,
        order: r,
        hits: hits.into(),
        samples: samples.into(),
        estimate: hits as f64 / samples as f64,
        ci_low,
        ci_high,
        exact: None,
    })
}
