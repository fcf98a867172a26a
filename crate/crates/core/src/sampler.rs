//! Uniform random Latin rectangles.
//!
//! Exact samplers index the enumerated support or fill cells one at a time
//! with weights given by extension counts. The switch chain walks the space by
//! flipping alternating cycles between one row's matching and the unused
//! edges.
//!
//! # Switch proposal
//!
//! A step picks a row `j` and a start symbol `s0` uniformly, then alternates:
//! from the current symbol take a uniformly random column where that symbol
//! is unused in every row, then follow row `j` from that column to the symbol
//! it holds. The walk closes when it comes back to `s0`; it is rejected (lazy
//! step) if it revisits another symbol or runs past `max_half_length`
//! columns. Every symbol has exactly `n - k` unused columns in every state,
//! so a given cycle of half-length `l` is proposed with probability
//! `l / (k n (n - k)^l)`, and its flip back is proposed with the same
//! probability. The proposal is symmetric, hence the chain is reversible with
//! respect to the uniform distribution on each connected component.
//!
//! # Random streams
//!
//! [`stream_rng`] maps `(seed, stream)` to an independent ChaCha8 stream.
//! Parallel drivers cut work into fixed-size batches and give batch `b` the
//! stream `b`, so results do not depend on the thread count.

use std::collections::{BTreeSet, HashMap};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::census::{complete_partial, enumerate_rectangles, Guard, Search};
use crate::error::{Error, Result};
use crate::rectangle::{check_dims, full_mask, LatinRectangle, MatchingTuple, PartialLatinRectangle, MAX_ORDER};

/// Samples per parallel batch; each batch owns one random stream.
pub const BATCH: usize = 1024;

/// Independent stream `stream` derived from `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    ExactEnumeration,
    ExactCountedExtension,
    SwitchMcmc,
}

impl Method {
    pub fn tag(self) -> &'static str {
        match self {
            Method::ExactEnumeration => "exact-enumeration",
            Method::ExactCountedExtension => "exact-counted-extension",
            Method::SwitchMcmc => "switch-mcmc",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SamplerConfig {
    pub method: Method,
    pub burn_in: u64,
    pub seed: u64,
    pub max_half_length: usize,
    /// Run the switch chain even when `k = n` (every step is then the identity).
    pub allow_square: bool,
}

impl SamplerConfig {
    /// Defaults: `max_half_length = n` and `burn_in = ceil(100 k n ln n)`.
    /// The burn-in is a heuristic, not a mixing-time bound.
    pub fn new(method: Method, k: usize, n: usize, seed: u64) -> Self {
        SamplerConfig { method, burn_in: default_burn_in(k, n), seed, max_half_length: n.max(2), allow_square: false }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_half_length < 2 {
            return Err(Error::InvalidConfig(format!(
                "max_half_length must be at least 2, got {}",
                self.max_half_length
            )));
        }
        Ok(())
    }
}

pub fn default_burn_in(k: usize, n: usize) -> u64 {
    (100.0 * (k * n) as f64 * (n as f64).ln()).ceil() as u64
}

/// A source of Latin rectangles of one fixed shape.
pub trait RectangleSampler: Sync {
    fn k(&self) -> usize;
    fn n(&self) -> usize;
    fn method(&self) -> Method;
    fn sample(&self, rng: &mut ChaCha8Rng) -> LatinRectangle;
}

/// Uniform choice from the fully enumerated support.
pub struct EnumerationSampler {
    k: usize,
    n: usize,
    support: Vec<LatinRectangle>,
}

impl EnumerationSampler {
    pub fn new(k: usize, n: usize, guard: Guard) -> Result<Self> {
        let support = enumerate_rectangles(k, n, guard)?.collect();
        Ok(EnumerationSampler { k, n, support })
    }
}

impl RectangleSampler for EnumerationSampler {
    fn k(&self) -> usize {
        self.k
    }
    fn n(&self) -> usize {
        self.n
    }
    fn method(&self) -> Method {
        Method::ExactEnumeration
    }
    fn sample(&self, rng: &mut ChaCha8Rng) -> LatinRectangle {
        self.support[rng.random_range(0..self.support.len())].clone()
    }
}

/// Draws the first row as a uniform permutation (relabelling symbols shows
/// every first row has the same number of completions), then fills the
/// remaining cells in row-major order, choosing each symbol with probability
/// proportional to the number of completions it leaves.
pub struct CountedExtensionSampler {
    k: usize,
    n: usize,
}

impl CountedExtensionSampler {
    pub fn new(k: usize, n: usize, guard: Guard) -> Result<Self> {
        guard.check(k, n)?;
        Ok(CountedExtensionSampler { k, n })
    }
}

impl RectangleSampler for CountedExtensionSampler {
    fn k(&self) -> usize {
        self.k
    }
    fn n(&self) -> usize {
        self.n
    }
    fn method(&self) -> Method {
        Method::ExactCountedExtension
    }
    fn sample(&self, rng: &mut ChaCha8Rng) -> LatinRectangle {
        let mut state = Search::new(&PartialLatinRectangle::empty(self.k, self.n).expect("shape checked"));
        let mut first: Vec<u8> = (0..self.n as u8).collect();
        first.shuffle(rng);
        for (c, &s) in first.iter().enumerate() {
            state.place(0, c, s);
        }
        for r in 1..self.k {
            for c in 0..self.n {
                let mut weights = Vec::with_capacity(self.n);
                let mut cand = state.candidates(r, c);
                while cand != 0 {
                    let s = cand.trailing_zeros() as u8;
                    cand &= cand - 1;
                    let mut next = state.clone();
                    next.place(r, c, s);
                    weights.push((s, next.count()));
                }
                let total: u64 = weights.iter().map(|w| w.1).sum();
                let mut x = rng.random_range(0..total);
                let s = weights
                    .iter()
                    .find(|w| {
                        if x < w.1 {
                            true
                        } else {
                            x -= w.1;
                            false
                        }
                    })
                    .expect("weights sum to total")
                    .0;
                state.place(r, c, s);
            }
        }
        state.into_rectangle()
    }
}

/// `sample_exact`: one uniform draw from `L_{k,n}` by counted extension.
pub fn sample_exact(k: usize, n: usize, rng: &mut ChaCha8Rng, guard: Guard) -> Result<LatinRectangle> {
    Ok(CountedExtensionSampler::new(k, n, guard)?.sample(rng))
}

/// Small uniform integers peeled off one 64-bit word by repeated
/// multiplication. Each draw below `r <= 2^w` costs at most `w` bits of
/// precision; the word is refreshed after `24 / w` draws, so at least 40 bits
/// remain and every draw is within `r / 2^40` of uniform in total variation.
struct Digits<'a, R: Rng + ?Sized> {
    rng: &'a mut R,
    x: u64,
    left: u32,
    per_word: u32,
}

impl<'a, R: Rng + ?Sized> Digits<'a, R> {
    /// For draws below at most `max_range`.
    fn new(rng: &'a mut R, max_range: usize) -> Self {
        let w = (usize::BITS - max_range.max(2).saturating_sub(1).leading_zeros()).max(1);
        Digits { rng, x: 0, left: 0, per_word: (24 / w).max(1) }
    }

    #[inline]
    fn below(&mut self, r: u32) -> u32 {
        if self.left == 0 {
            self.x = self.rng.next_u64();
            self.left = self.per_word;
        }
        self.left -= 1;
        let m = self.x as u128 * r as u128;
        self.x = m as u64;
        (m >> 64) as u32
    }
}

/// Mutable state of the switch chain.
///
/// Besides the grid it keeps, for every row, the column of each symbol, and
/// for every symbol the list of its `n - k` free columns (columns where it is
/// unused in all rows), so a step needs no bit scanning. Rows are stored with
/// a fixed stride of [`MAX_ORDER`] so the hot loop indexes fixed-size arrays.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SwitchChain {
    k: usize,
    n: usize,
    // sym[j][c], col_of[j][s]
    sym: Vec<[u8; MAX_ORDER]>,
    col_of: Vec<[u8; MAX_ORDER]>,
    // symbol s owns free[s * (n - k)..(s + 1) * (n - k)], in no particular order
    free: Box<[u8; FREE_LEN]>,
}

const FREE_LEN: usize = MAX_ORDER * MAX_ORDER;

impl SwitchChain {
    pub fn new(l: &LatinRectangle) -> Self {
        let (k, n) = (l.k(), l.n());
        let mut sym = vec![[0u8; MAX_ORDER]; k];
        let mut col_of = vec![[0u8; MAX_ORDER]; k];
        let mut used = vec![0u32; n];
        for j in 0..k {
            for c in 0..n {
                let s = l.get0(j, c);
                sym[j][c] = s;
                col_of[j][s as usize] = c as u8;
                used[s as usize] |= 1 << c;
            }
        }
        let mut free = Box::new([0u8; FREE_LEN]);
        for (slot, c) in used.iter().flat_map(|&u| (0..n as u8).filter(move |&c| u & (1 << c) == 0)).enumerate() {
            free[slot] = c;
        }
        SwitchChain { k, n, sym, col_of, free }
    }

    pub fn from_matchings(t: &MatchingTuple) -> Result<Self> {
        Ok(Self::new(&LatinRectangle::from_matchings(t)?))
    }

    fn cells0(&self) -> Vec<u8> {
        self.sym.iter().flat_map(|row| row[..self.n].iter().copied()).collect()
    }

    pub fn to_rectangle(&self) -> LatinRectangle {
        LatinRectangle::from_cells0_unchecked(self.k, self.n, self.cells0())
    }

    fn free_of(&self, s: u8) -> &[u8] {
        let f = self.n - self.k;
        &self.free[s as usize * f..(s as usize + 1) * f]
    }

    /// One lazy step; returns true iff a cycle was flipped.
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R, max_half_length: usize) -> bool {
        self.step_with(&mut Digits::new(rng, self.n), max_half_length)
    }

    pub fn run<R: Rng + ?Sized>(&mut self, rng: &mut R, steps: u64, max_half_length: usize) {
        let mut digits = Digits::new(rng, self.n);
        for _ in 0..steps {
            self.step_with(&mut digits, max_half_length);
        }
    }

    fn step_with<R: Rng + ?Sized>(&mut self, digits: &mut Digits<'_, R>, max_half_length: usize) -> bool {
        let (k, n) = (self.k, self.n);
        if k == n {
            return false;
        }
        let f = n - k;
        let j = digits.below(k as u32) as usize;
        let s0 = digits.below(n as u32) as u8;
        let row = &self.sym[j];
        let free = &*self.free;
        let limit = max_half_length.min(n);
        // symbol, slot in its free list, and the column it moves to
        let mut syms = [0u8; MAX_ORDER];
        let mut slots = [0u16; MAX_ORDER];
        let mut cols = [0u8; MAX_ORDER];
        let mut len = 0;
        let mut seen = 1u32 << s0;
        let mut u = s0;
        loop {
            if len == limit {
                return false;
            }
            let slot = (u as usize * f + digits.below(f as u32) as usize) % FREE_LEN;
            let c = free[slot];
            let v = row[c as usize % MAX_ORDER];
            syms[len % MAX_ORDER] = u;
            slots[len % MAX_ORDER] = slot as u16;
            cols[len % MAX_ORDER] = c;
            len += 1;
            if v == s0 {
                break;
            }
            if seen & (1 << v) != 0 {
                return false;
            }
            seen |= 1 << v;
            u = v;
        }
        let (row, col_of) = (&mut self.sym[j], &mut self.col_of[j]);
        for i in 0..len {
            let (u, c) = (syms[i], cols[i]);
            let vacated = std::mem::replace(&mut col_of[u as usize % MAX_ORDER], c);
            self.free[slots[i] as usize % FREE_LEN] = vacated;
            row[c as usize % MAX_ORDER] = u;
        }
        debug_assert!(self.row_consistent(j, &syms[..len], &cols[..len]), "switch produced an invalid state");
        true
    }

    /// Cheap post-flip check on row `j` and the moved symbols.
    fn row_consistent(&self, j: usize, syms: &[u8], cols: &[u8]) -> bool {
        let n = self.n;
        let row_seen = self.sym[j][..n].iter().fold(0u32, |m, &s| m | 1 << s);
        row_seen == full_mask(n)
            && syms.iter().zip(cols).all(|(&u, &c)| {
                self.col_of[j][u as usize] == c && self.free_of(u).iter().all(|&x| x != c)
            })
    }

    #[cfg(test)]
    fn consistent(&self) -> bool {
        let (k, n) = (self.k, self.n);
        let full = full_mask(n);
        let mut used = vec![0u32; n];
        for j in 0..k {
            let mut row_seen = 0u32;
            for c in 0..n {
                let s = self.sym[j][c] as usize;
                if used[s] & (1 << c) != 0 || self.col_of[j][s] as usize != c {
                    return false;
                }
                used[s] |= 1 << c;
                row_seen |= 1 << s;
            }
            if row_seen != full {
                return false;
            }
        }
        (0..n as u8).all(|s| {
            let listed = self.free_of(s).iter().fold(0u32, |m, &c| m | 1 << c);
            listed == full & !used[s as usize] && listed.count_ones() as usize == n - k
        })
    }
}

/// One lazy switch step on a complete tuple.
pub fn random_switch_step<R: Rng + ?Sized>(t: &MatchingTuple, rng: &mut R, max_half_length: usize) -> Result<MatchingTuple> {
    let mut chain = SwitchChain::from_matchings(t)?;
    chain.step(rng, max_half_length);
    Ok(chain.to_rectangle().to_matchings())
}

/// Every state one switch away from `l` (cycles of half-length at most
/// `max_half_length`), deduplicated and sorted.
pub fn switch_moves(l: &LatinRectangle, max_half_length: usize) -> Vec<LatinRectangle> {
    let (k, n) = (l.k(), l.n());
    let base = SwitchChain::new(l);
    let mut out = BTreeSet::new();
    for j in 0..k {
        for s0 in 0..n as u8 {
            let mut walk = Vec::new();
            extend_cycles(&base, j, s0, s0, 1 << s0, &mut walk, max_half_length, &mut out);
        }
    }
    out.into_iter().collect()
}

#[allow(clippy::too_many_arguments)]
fn extend_cycles(
    base: &SwitchChain,
    j: usize,
    s0: u8,
    u: u8,
    seen: u32,
    walk: &mut Vec<(u8, u8)>,
    max_half: usize,
    out: &mut BTreeSet<LatinRectangle>,
) {
    if walk.len() == max_half {
        return;
    }
    let n = base.n;
    for &c in base.free_of(u) {
        let v = base.sym[j][c as usize];
        walk.push((c, u));
        if v == s0 {
            let mut cells = base.cells0();
            for &(c, s) in walk.iter() {
                cells[j * n + c as usize] = s;
            }
            out.insert(LatinRectangle::from_cells0_unchecked(base.k, n, cells));
        } else if seen & (1 << v) == 0 {
            extend_cycles(base, j, s0, v, seen | (1 << v), walk, max_half, out);
        }
        walk.pop();
    }
}

/// Independent switch chains restarted from the least rectangle.
pub struct McmcSampler {
    start: LatinRectangle,
    burn_in: u64,
    max_half_length: usize,
}

impl McmcSampler {
    pub fn new(k: usize, n: usize, config: &SamplerConfig) -> Result<Self> {
        check_dims(k, n)?;
        config.validate()?;
        if k == n && !config.allow_square {
            return Err(Error::EmptyMoveSet);
        }
        let start = complete_partial(&PartialLatinRectangle::empty(k, n)?)?;
        Ok(McmcSampler { start, burn_in: config.burn_in, max_half_length: config.max_half_length })
    }
}

impl RectangleSampler for McmcSampler {
    fn k(&self) -> usize {
        self.start.k()
    }
    fn n(&self) -> usize {
        self.start.n()
    }
    fn method(&self) -> Method {
        Method::SwitchMcmc
    }
    fn sample(&self, rng: &mut ChaCha8Rng) -> LatinRectangle {
        let mut chain = SwitchChain::new(&self.start);
        chain.run(rng, self.burn_in, self.max_half_length);
        chain.to_rectangle()
    }
}

/// Runs `burn_in` switch steps from the least rectangle and returns the final state.
pub fn sample_mcmc(k: usize, n: usize, config: &SamplerConfig, rng: &mut ChaCha8Rng) -> Result<LatinRectangle> {
    Ok(McmcSampler::new(k, n, config)?.sample(rng))
}

/// Builds the sampler named by `config.method`.
pub fn build_sampler(k: usize, n: usize, config: &SamplerConfig, guard: Guard) -> Result<Box<dyn RectangleSampler>> {
    config.validate()?;
    Ok(match config.method {
        Method::ExactEnumeration => Box::new(EnumerationSampler::new(k, n, guard)?),
        Method::ExactCountedExtension => Box::new(CountedExtensionSampler::new(k, n, guard)?),
        Method::SwitchMcmc => Box::new(McmcSampler::new(k, n, config)?),
    })
}

/// Folds `samples` draws in parallel batches; batch `b` uses stream `b` of `seed`.
pub fn par_fold_samples<T, ID, F, R>(
    sampler: &dyn RectangleSampler,
    samples: u64,
    seed: u64,
    identity: ID,
    fold: F,
    reduce: R,
) -> T
where
    T: Send,
    ID: Fn() -> T + Sync + Send,
    F: Fn(T, LatinRectangle) -> T + Sync + Send,
    R: Fn(T, T) -> T + Sync + Send,
{
    let batches = samples.div_ceil(BATCH as u64);
    let parts: Vec<T> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = stream_rng(seed, b);
            let len = (samples - b * BATCH as u64).min(BATCH as u64);
            (0..len).fold(identity(), |acc, _| fold(acc, sampler.sample(&mut rng)))
        })
        .collect();
    parts.into_iter().fold(identity(), reduce)
}

/// `count` draws in a fixed order determined by `seed` alone.
pub fn sample_many(sampler: &dyn RectangleSampler, count: u64, seed: u64) -> Vec<LatinRectangle> {
    par_fold_samples(
        sampler,
        count,
        seed,
        Vec::new,
        |mut v, l| {
            v.push(l);
            v
        },
        |mut a, mut b| {
            a.append(&mut b);
            a
        },
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct UniformityReport {
    pub samples: u64,
    pub support: usize,
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Pearson chi-square of sample counts against uniform over `L_{k,n}`.
pub fn uniformity_test(sampler: &dyn RectangleSampler, samples: u64, seed: u64, guard: Guard) -> Result<UniformityReport> {
    let (k, n) = (sampler.k(), sampler.n());
    let index: HashMap<LatinRectangle, usize> =
        enumerate_rectangles(k, n, guard)?.enumerate().map(|(i, l)| (l, i)).collect();
    let bins = index.len();
    let counts = par_fold_samples(
        sampler,
        samples,
        seed,
        || vec![0u64; bins],
        |mut acc, l| {
            acc[index[&l]] += 1;
            acc
        },
        |mut a, b| {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
            a
        },
    );
    Ok(chi_square_uniform(&counts))
}

/// Chi-square statistic and upper-tail p-value of `counts` against equal cells.
pub fn chi_square_uniform(counts: &[u64]) -> UniformityReport {
    let samples: u64 = counts.iter().sum();
    let expected = samples as f64 / counts.len() as f64;
    let statistic: f64 = counts.iter().map(|&o| (o as f64 - expected).powi(2) / expected).sum();
    let dof = counts.len() - 1;
    let p_value = if dof == 0 {
        1.0
    } else {
        ChiSquared::new(dof as f64).expect("positive degrees of freedom").sf(statistic)
    };
    UniformityReport { samples, support: counts.len(), statistic, dof, p_value }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    fn rect(rows: &[&[u8]]) -> LatinRectangle {
        LatinRectangle::from_rows(rows).unwrap()
    }

    /// Connected components of the switch graph over all of `L_{k,n}`.
    fn components(k: usize, n: usize, max_half: usize) -> usize {
        let all: Vec<_> = enumerate_rectangles(k, n, Guard::Enforce).unwrap().collect();
        let index: HashMap<_, _> = all.iter().cloned().enumerate().map(|(i, l)| (l, i)).collect();
        let mut comp = vec![usize::MAX; all.len()];
        let mut count = 0;
        for s in 0..all.len() {
            if comp[s] != usize::MAX {
                continue;
            }
            let mut stack = vec![s];
            comp[s] = count;
            while let Some(x) = stack.pop() {
                for y in switch_moves(&all[x], max_half) {
                    let y = index[&y];
                    if comp[y] == usize::MAX {
                        comp[y] = count;
                        stack.push(y);
                    }
                }
            }
            count += 1;
        }
        count
    }

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: Vec<u64> = (0..4).map(|_| stream_rng(7, 0).random()).collect();
        assert!(a.windows(2).all(|w| w[0] == w[1]));
        let mut s0 = stream_rng(7, 0);
        let mut s1 = stream_rng(7, 1);
        assert_ne!(s0.random::<u64>(), s1.random::<u64>());
    }

    #[test]
    fn single_row_is_a_permutation() {
        let mut rng = stream_rng(1, 0);
        for _ in 0..20 {
            let l = sample_exact(1, 6, &mut rng, Guard::Enforce).unwrap();
            let mut row = l.row(0);
            row.sort();
            assert_eq!(row, vec![1, 2, 3, 4, 5, 6]);
        }
    }

    #[test]
    fn exact_samplers_are_reproducible() {
        let s = CountedExtensionSampler::new(3, 5, Guard::Enforce).unwrap();
        assert_eq!(sample_many(&s, 50, 9), sample_many(&s, 50, 9));
        assert_ne!(sample_many(&s, 50, 9), sample_many(&s, 50, 10));
    }

    #[test]
    fn sample_order_ignores_thread_count() {
        let s = EnumerationSampler::new(2, 4, Guard::Enforce).unwrap();
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| sample_many(&s, 3000, 5));
        let b = four.install(|| sample_many(&s, 3000, 5));
        assert_eq!(a, b);
    }

    #[test]
    fn counted_extension_on_order_three() {
        // 12000 draws over the 12 squares of order 3.
        let s = CountedExtensionSampler::new(3, 3, Guard::Enforce).unwrap();
        let r = uniformity_test(&s, 12_000, 3, Guard::Enforce).unwrap();
        assert_eq!((r.support, r.dof), (12, 11));
        assert!(r.p_value > 0.001, "{r:?}");
    }

    #[test]
    fn exact_sampler_passes_uniformity() {
        let s = EnumerationSampler::new(3, 3, Guard::Enforce).unwrap();
        let r = uniformity_test(&s, 100_000, 11, Guard::Enforce).unwrap();
        assert!(r.p_value > 0.01, "{r:?}");
        let s = CountedExtensionSampler::new(2, 4, Guard::Enforce).unwrap();
        let r = uniformity_test(&s, 20_000, 12, Guard::Enforce).unwrap();
        assert!(r.p_value > 0.001, "{r:?}");
    }

    struct Stuck(LatinRectangle);
    impl RectangleSampler for Stuck {
        fn k(&self) -> usize {
            self.0.k()
        }
        fn n(&self) -> usize {
            self.0.n()
        }
        fn method(&self) -> Method {
            Method::ExactEnumeration
        }
        fn sample(&self, _: &mut ChaCha8Rng) -> LatinRectangle {
            self.0.clone()
        }
    }

    #[test]
    fn biased_sampler_fails_uniformity() {
        let s = Stuck(rect(&[&[1, 2, 3], &[2, 3, 1], &[3, 1, 2]]));
        let r = uniformity_test(&s, 10_000, 0, Guard::Enforce).unwrap();
        assert!(r.p_value < 1e-12);
    }

    #[test]
    fn chi_square_known_value() {
        // 10 cells, one holding everything: statistic = 9 * samples.
        let mut counts = vec![0u64; 10];
        counts[0] = 100;
        assert!((chi_square_uniform(&counts).statistic - 900.0).abs() < 1e-9);
        let flat = chi_square_uniform(&[5, 5, 5, 5]);
        assert_eq!(flat.statistic, 0.0);
        assert!((flat.p_value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn switch_moves_example() {
        // The cycle through columns 1 and 3 for row 1, as in the flip test.
        let l = rect(&[&[1, 2, 3, 4], &[2, 1, 4, 3]]);
        let moves = switch_moves(&l, 4);
        assert!(moves.contains(&rect(&[&[3, 2, 1, 4], &[2, 1, 4, 3]])));
        assert!(!moves.contains(&l));
    }

    #[test]
    fn moves_are_symmetric() {
        for l in enumerate_rectangles(2, 4, Guard::Enforce).unwrap() {
            for m in switch_moves(&l, 4) {
                assert!(switch_moves(&m, 4).contains(&l));
            }
        }
    }

    #[test]
    fn single_row_chain_is_connected() {
        assert_eq!(components(1, 3, 3), 1);
        assert_eq!(components(1, 4, 4), 1);
    }

    #[test]
    fn two_row_chain_is_connected() {
        assert_eq!(components(2, 4, 4), 1);
        assert_eq!(components(3, 4, 4), 1);
        assert_eq!(components(2, 5, 5), 1);
    }

    #[test]
    fn square_chain_never_moves() {
        let l = rect(&[&[1, 2], &[2, 1]]);
        assert!(switch_moves(&l, 2).is_empty());
        let mut rng = stream_rng(0, 0);
        let t = l.to_matchings();
        assert_eq!(random_switch_step(&t, &mut rng, 2).unwrap(), t);
        let cfg = SamplerConfig::new(Method::SwitchMcmc, 2, 2, 0);
        assert!(matches!(sample_mcmc(2, 2, &cfg, &mut rng), Err(Error::EmptyMoveSet)));
        let cfg = SamplerConfig { allow_square: true, ..cfg };
        assert_eq!(sample_mcmc(2, 2, &cfg, &mut rng).unwrap(), l);
    }

    #[test]
    fn zero_burn_in_returns_start() {
        let cfg = SamplerConfig { burn_in: 0, ..SamplerConfig::new(Method::SwitchMcmc, 2, 4, 0) };
        let l = sample_mcmc(2, 4, &cfg, &mut stream_rng(3, 0)).unwrap();
        assert_eq!(l, complete_partial(&PartialLatinRectangle::empty(2, 4).unwrap()).unwrap());
    }

    #[test]
    fn config_validation() {
        let cfg = SamplerConfig { max_half_length: 1, ..SamplerConfig::new(Method::SwitchMcmc, 2, 4, 0) };
        assert!(matches!(McmcSampler::new(2, 4, &cfg), Err(Error::InvalidConfig(_))));
        assert_eq!(SamplerConfig::new(Method::SwitchMcmc, 2, 4, 0).burn_in, 1110);
    }

    #[test]
    fn single_row_chain_is_uniform() {
        let cfg = SamplerConfig { burn_in: 1000, ..SamplerConfig::new(Method::SwitchMcmc, 1, 4, 0) };
        let s = McmcSampler::new(1, 4, &cfg).unwrap();
        let r = uniformity_test(&s, 24_000, 21, Guard::Enforce).unwrap();
        assert!(r.p_value > 0.001, "{r:?}");
    }

    #[test]
    fn switch_chain_is_uniform_on_two_by_four() {
        let cfg = SamplerConfig { burn_in: 200, ..SamplerConfig::new(Method::SwitchMcmc, 2, 4, 0) };
        let s = McmcSampler::new(2, 4, &cfg).unwrap();
        let r = uniformity_test(&s, 43_200, 4, Guard::Enforce).unwrap();
        assert!(r.p_value > 0.001, "{r:?}");
    }

    #[test]
    fn long_walk_proposals_are_symmetric() {
        // Empirical one-step transition frequencies between a pair of states
        // agree in both directions.
        let a = rect(&[&[1, 2, 3, 4, 5], &[2, 3, 4, 5, 1]]);
        let moves = switch_moves(&a, 5);
        let b = moves[moves.len() / 2].clone();
        let freq = |from: &LatinRectangle, to: &LatinRectangle, seed| {
            let mut rng = stream_rng(seed, 0);
            let trials = 200_000;
            let mut hits = 0;
            for _ in 0..trials {
                let mut c = SwitchChain::new(from);
                c.step(&mut rng, 5);
                if &c.to_rectangle() == to {
                    hits += 1;
                }
            }
            hits as f64 / trials as f64
        };
        let (ab, ba) = (freq(&a, &b, 1), freq(&b, &a, 2));
        assert!(ab > 0.0);
        assert!((ab - ba).abs() < 5.0 * (ab / 200_000.0).sqrt() + 1e-4, "{ab} vs {ba}");
    }

    proptest! {
        #[test]
        fn steps_preserve_invariants(seed in any::<u64>(), k in 1usize..5, extra in 1usize..4) {
            let n = k + extra;
            let start = complete_partial(&PartialLatinRectangle::empty(k, n).unwrap()).unwrap();
            let mut chain = SwitchChain::new(&start);
            let mut rng = stream_rng(seed, 0);
            for _ in 0..200 {
                chain.step(&mut rng, n);
                prop_assert!(chain.consistent());
            }
            let l = chain.to_rectangle();
            prop_assert!(LatinRectangle::from_rows(&l.rows()).is_ok());
        }

        #[test]
        fn flipped_states_are_single_moves(seed in any::<u64>()) {
            let start = complete_partial(&PartialLatinRectangle::empty(2, 5).unwrap()).unwrap();
            let mut chain = SwitchChain::new(&start);
            let mut rng = stream_rng(seed, 0);
            chain.run(&mut rng, 20, 5);
            let before = chain.to_rectangle();
            if chain.step(&mut rng, 5) {
                prop_assert!(switch_moves(&before, 5).contains(&chain.to_rectangle()));
            } else {
                prop_assert_eq!(chain.to_rectangle(), before);
            }
        }
    }
}
