//! Digraph diagnostics: the auxiliary digraph of a matching tuple, robust
//! outexpansion, almost-regularity, exact simple path and cycle counts, and
//! exact random-walk distributions with their envelope around stationarity.

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::seq::index;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bits::{binomial, ones, subsets_of_size};
use crate::error::{Error, Result};
use crate::rectangle::{Edge, MatchingTuple};
use crate::sampler::stream_rng;

pub const MAX_VERTICES: usize = 64;
/// Largest vertex count for exhaustive subset checks.
pub const EXACT_SUBSET_LIMIT: usize = 20;
/// Largest vertex count for rational walk distributions.
pub const EXACT_WALK_LIMIT: usize = 32;

/// A loopless digraph on at most 64 vertices with bitset adjacency.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Digraph {
    labels: Vec<usize>,
    out: Vec<u64>,
}

impl Digraph {
    /// `n` vertices labelled `1..=n`, no arcs.
    pub fn empty(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_VERTICES {
            return Err(Error::InvalidDigraph(format!("vertex count {n} outside 1..={MAX_VERTICES}")));
        }
        Ok(Digraph { labels: (1..=n).collect(), out: vec![0; n] })
    }

    pub fn complete(n: usize) -> Result<Self> {
        let mut d = Self::empty(n)?;
        let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        for u in 0..n {
            d.out[u] = full & !(1 << u);
        }
        Ok(d)
    }

    /// The directed cycle `0 -> 1 -> ... -> n-1 -> 0`.
    pub fn cycle(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidDigraph("a directed cycle needs at least 2 vertices".into()));
        }
        Self::from_arcs(n, (0..n).map(|u| (u, (u + 1) % n)))
    }

    pub fn from_arcs<I: IntoIterator<Item = (usize, usize)>>(n: usize, arcs: I) -> Result<Self> {
        let mut d = Self::empty(n)?;
        for (u, v) in arcs {
            d.add_arc(u, v)?;
        }
        Ok(d)
    }

    /// Each of the `n(n-1)` possible arcs independently with probability `p`.
    pub fn random<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Result<Self> {
        let mut d = Self::empty(n)?;
        for u in 0..n {
            for v in 0..n {
                if u != v && rng.random_bool(p) {
                    d.out[u] |= 1 << v;
                }
            }
        }
        Ok(d)
    }

    pub fn with_labels(mut self, labels: Vec<usize>) -> Result<Self> {
        if labels.len() != self.len() {
            return Err(Error::InvalidDigraph(format!("{} labels for {} vertices", labels.len(), self.len())));
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn add_arc(&mut self, u: usize, v: usize) -> Result<()> {
        let n = self.len();
        if u >= n || v >= n {
            return Err(Error::InvalidDigraph(format!("arc ({}, {}) outside 1..={n}", u + 1, v + 1)));
        }
        if u == v {
            return Err(Error::InvalidDigraph(format!("self-loop at vertex {}", u + 1)));
        }
        self.out[u] |= 1 << v;
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.out.len()
    }

    pub fn is_empty(&self) -> bool {
        self.out.is_empty()
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn has_arc(&self, u: usize, v: usize) -> bool {
        self.out[u] & (1 << v) != 0
    }

    pub fn out_mask(&self, u: usize) -> u64 {
        self.out[u]
    }

    pub fn in_mask(&self, v: usize) -> u64 {
        (0..self.len()).filter(|&u| self.has_arc(u, v)).fold(0, |m, u| m | 1 << u)
    }

    pub fn out_degree(&self, u: usize) -> usize {
        self.out[u].count_ones() as usize
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.out.iter().filter(|&&m| m & (1 << v) != 0).count()
    }

    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.len()).flat_map(move |u| ones(self.out[u]).map(move |v| (u, v)))
    }
}

/// `D_N` for row `j`: vertices are the symbols not covered by `m_j`; there is
/// an arc `u -> v` when some column `x` outside the columns of `m_j` has `u`
/// unused in every row and holds `v` in row `j`.
pub fn build_auxiliary_digraph(t: &MatchingTuple, j: usize, m_j: &[Edge]) -> Result<Digraph> {
    let (k, n) = (t.k(), t.n());
    if j >= k {
        return Err(Error::IndexOutOfRange { index: j + 1, max: k });
    }
    if let Some(i) = (0..k).find(|&i| t.size(i) != n) {
        return Err(Error::IncompleteTuple(i + 1));
    }
    let mut cols = 0u64;
    let mut syms = 0u64;
    for e in m_j {
        if e.col >= n || t.get(j, e.col) != Some(e.symbol) {
            return Err(Error::NotASubMatching(j + 1));
        }
        cols |= 1 << e.col;
        syms |= 1 << (e.symbol - 1);
    }
    // used[s]: columns holding symbol s in some row
    let mut used = vec![0u64; n];
    for i in 0..k {
        for c in 0..n {
            used[t.get0(i, c).expect("complete") as usize] |= 1 << c;
        }
    }
    let vertices: Vec<usize> = (0..n).filter(|s| syms & (1 << s) == 0).collect();
    let mut index = vec![usize::MAX; n];
    for (i, &s) in vertices.iter().enumerate() {
        index[s] = i;
    }
    let mut d = Digraph::empty(vertices.len())?.with_labels(vertices.iter().map(|s| s + 1).collect())?;
    for &u in &vertices {
        for x in 0..n {
            if cols & (1 << x) != 0 || used[u] & (1 << x) != 0 {
                continue;
            }
            let v = t.get0(j, x).expect("complete") as usize;
            d.out[index[u]] |= 1 << index[v];
        }
    }
    Ok(d)
}

/// `{v : |N^-(v) ∩ S| >= ν |V|}`.
pub fn robust_outneighborhood(d: &Digraph, s: u64, nu: f64) -> u64 {
    let need = nu * d.len() as f64 - 1e-9;
    (0..d.len()).filter(|&v| (d.in_mask(v) & s).count_ones() as f64 >= need).fold(0, |m, v| m | 1 << v)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExpanderParams {
    pub nu: f64,
    pub tau: f64,
    pub delta: f64,
    pub f: f64,
}

impl ExpanderParams {
    pub fn validate(&self) -> Result<()> {
        let unit = |x: f64| x > 0.0 && x <= 1.0;
        if !(unit(self.nu) && unit(self.tau) && unit(self.delta) && unit(self.f)) {
            return Err(Error::InvalidParameter("nu, tau, delta and f must lie in (0, 1]".into()));
        }
        if self.nu > self.tau {
            return Err(Error::InvalidParameter(format!("need nu <= tau, got {} > {}", self.nu, self.tau)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExpanderMode {
    Exact,
    /// Uniform subsets of the size window; a clean run is not a proof.
    Sampled { budget: u64, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpanderVerdict {
    /// False only with a violating witness in hand.
    pub holds: bool,
    pub exhaustive: bool,
    pub subsets_checked: u64,
    /// Labels of a violating set.
    pub witness: Option<Vec<usize>>,
    pub note: &'static str,
}

fn violates(d: &Digraph, s: u64, nu: f64) -> bool {
    let rn = robust_outneighborhood(d, s, nu).count_ones() as f64;
    rn < s.count_ones() as f64 + nu * d.len() as f64 - 1e-9
}

fn size_window(n: usize, tau: f64) -> (usize, usize) {
    let nf = n as f64;
    let lo = (tau * nf - 1e-9).ceil().max(0.0) as usize;
    let hi = ((1.0 - tau) * nf + 1e-9).floor() as usize;
    (lo, hi.min(n))
}

/// Checks `|RN_ν(S)| >= |S| + ν n` for every `S` with `τ n <= |S| <= (1 - τ) n`.
pub fn is_robust_outexpander(d: &Digraph, nu: f64, tau: f64, mode: ExpanderMode) -> Result<ExpanderVerdict> {
    if !(nu > 0.0 && nu <= tau && tau <= 1.0) {
        return Err(Error::InvalidParameter(format!("need 0 < nu <= tau <= 1, got nu = {nu}, tau = {tau}")));
    }
    let n = d.len();
    let (lo, hi) = size_window(n, tau);
    let label = |s: u64| ones(s).map(|v| d.labels[v]).collect::<Vec<_>>();
    match mode {
        ExpanderMode::Exact => {
            if n > EXACT_SUBSET_LIMIT {
                return Err(Error::TooLargeForExact { vertices: n, limit: EXACT_SUBSET_LIMIT });
            }
            let mut checked = 0u64;
            for size in lo..=hi {
                let sets: Vec<u64> = subsets_of_size(n, size).collect();
                checked += sets.len() as u64;
                if let Some(&s) = sets.par_iter().find_first(|&&s| violates(d, s, nu)) {
                    return Ok(ExpanderVerdict {
                        holds: false,
                        exhaustive: true,
                        subsets_checked: checked,
                        witness: Some(label(s)),
                        note: "violating set found",
                    });
                }
            }
            Ok(ExpanderVerdict { holds: true, exhaustive: true, subsets_checked: checked, witness: None, note: "exhaustive" })
        }
        ExpanderMode::Sampled { budget, seed } => {
            if lo > hi {
                return Ok(ExpanderVerdict { holds: true, exhaustive: true, subsets_checked: 0, witness: None, note: "empty size window" });
            }
            let weights: Vec<f64> = (lo..=hi).map(|s| binomial(n, s).to_f64().unwrap_or(f64::MAX)).collect();
            let total: f64 = weights.iter().sum();
            let mut rng = stream_rng(seed, 0);
            for i in 0..budget {
                let mut x = rng.random_range(0.0..total);
                let mut size = hi;
                for (off, w) in weights.iter().enumerate() {
                    if x < *w {
                        size = lo + off;
                        break;
                    }
                    x -= w;
                }
                let s = index::sample(&mut rng, n, size).iter().fold(0u64, |m, v| m | 1 << v);
                if violates(d, s, nu) {
                    return Ok(ExpanderVerdict {
                        holds: false,
                        exhaustive: false,
                        subsets_checked: i + 1,
                        witness: Some(label(s)),
                        note: "violating set found",
                    });
                }
            }
            Ok(ExpanderVerdict {
                holds: true,
                exhaustive: false,
                subsets_checked: budget,
                witness: None,
                note: "no violation found in budget; not a proof",
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DegreeReport {
    pub vertices: usize,
    pub min_out: usize,
    pub max_out: usize,
    pub min_in: usize,
    pub max_in: usize,
}

impl DegreeReport {
    pub fn min_semidegree(&self) -> usize {
        self.min_out.min(self.min_in)
    }

    pub fn max_semidegree(&self) -> usize {
        self.max_out.max(self.max_in)
    }
}

pub fn degree_report(d: &Digraph) -> DegreeReport {
    let outs: Vec<usize> = (0..d.len()).map(|u| d.out_degree(u)).collect();
    let ins: Vec<usize> = (0..d.len()).map(|v| d.in_degree(v)).collect();
    DegreeReport {
        vertices: d.len(),
        min_out: *outs.iter().min().unwrap_or(&0),
        max_out: *outs.iter().max().unwrap_or(&0),
        min_in: *ins.iter().min().unwrap_or(&0),
        max_in: *ins.iter().max().unwrap_or(&0),
    }
}

/// Every in- and out-degree lies in `[(1 - f) δ n, (1 + f) δ n]`, `n = |V|`.
pub fn almost_regular_check(d: &Digraph, delta: f64, f: f64) -> bool {
    let mid = delta * d.len() as f64;
    let (lo, hi) = ((1.0 - f) * mid - 1e-9, (1.0 + f) * mid + 1e-9);
    let r = degree_report(d);
    lo <= r.min_out.min(r.min_in) as f64 && r.max_out.max(r.max_in) as f64 <= hi
}

fn path_guard(d: &Digraph, length: usize) -> Result<()> {
    if d.len() > 16 && length > 7 {
        return Err(Error::PathGuardExceeded { vertices: d.len(), length });
    }
    Ok(())
}

fn check_vertex(d: &Digraph, v: usize) -> Result<()> {
    if v >= d.len() {
        return Err(Error::IndexOutOfRange { index: v + 1, max: d.len() });
    }
    Ok(())
}

/// Memoized count of simple continuations over (current vertex, visited set).
struct PathCounter<'a> {
    d: &'a Digraph,
    // arcs into this set finish the walk
    finish: u64,
    // vertices never entered mid-walk; they are never in `visited` except the cycle start
    blocked: u64,
    memo: HashMap<(u64, u8), u128>,
}

impl PathCounter<'_> {
    fn count(&mut self, x: usize, visited: u64, remaining: usize) -> u128 {
        if remaining == 1 {
            return (self.d.out[x] & self.finish).count_ones() as u128;
        }
        if let Some(&c) = self.memo.get(&(visited, x as u8)) {
            return c;
        }
        let mut total = 0;
        for y in ones(self.d.out[x] & !visited & !self.blocked) {
            total += self.count(y, visited | 1 << y, remaining - 1);
        }
        self.memo.insert((visited, x as u8), total);
        total
    }
}

fn count_from(d: &Digraph, start: usize, finish: u64, blocked: u64, length: usize) -> u128 {
    if length == 1 {
        return (d.out[start] & finish).count_ones() as u128;
    }
    let firsts: Vec<usize> = ones(d.out[start] & !blocked & !(1 << start)).collect();
    firsts
        .par_iter()
        .map(|&y| {
            let mut pc = PathCounter { d, finish, blocked, memo: HashMap::new() };
            pc.count(y, 1 << start | 1 << y, length - 1)
        })
        .sum()
}

/// Directed simple paths of exactly `length` arcs from `u` to `v`.
pub fn count_paths(d: &Digraph, u: usize, v: usize, length: usize) -> Result<BigUint> {
    check_vertex(d, u)?;
    check_vertex(d, v)?;
    if u == v {
        return Err(Error::InvalidParameter("path endpoints must differ".into()));
    }
    if length == 0 {
        return Err(Error::InvalidParameter("path length must be at least 1".into()));
    }
    path_guard(d, length)?;
    Ok(BigUint::from(count_from(d, u, 1 << v, 1 << v, length)))
}

/// Directed simple cycles of exactly `length` arcs through `u`.
pub fn count_cycles_through(d: &Digraph, u: usize, length: usize) -> Result<BigUint> {
    check_vertex(d, u)?;
    if length == 0 {
        return Err(Error::InvalidParameter("cycle length must be at least 1".into()));
    }
    path_guard(d, length)?;
    if length == 1 {
        return Ok(BigUint::zero());
    }
    // Close the cycle by an arc back into u; u itself is never re-entered mid-walk.
    let into_u = d.in_mask(u);
    let count = if length == 2 {
        (d.out[u] & into_u).count_ones() as u128
    } else {
        let firsts: Vec<usize> = ones(d.out[u]).collect();
        firsts
            .par_iter()
            .map(|&y| {
                let mut pc = PathCounter { d, finish: 1 << u, blocked: 1 << u, memo: HashMap::new() };
                pc.count(y, 1 << u | 1 << y, length - 1)
            })
            .sum()
    };
    Ok(BigUint::from(count))
}

/// `k = ceil(2/ν) + 1` clamped into `[ceil(1/ν + 1), floor(2/ν)]`; when the
/// window is empty the lower end is used.
pub fn sub_sample_length(nu: f64) -> Result<usize> {
    if !(nu > 0.0 && nu <= 1.0) {
        return Err(Error::InvalidParameter(format!("nu must lie in (0, 1], got {nu}")));
    }
    let lo = (1.0 / nu + 1.0 - 1e-12).ceil() as usize;
    let hi = (2.0 / nu + 1e-12).floor() as usize;
    let want = (2.0 / nu - 1e-12).ceil() as usize + 1;
    Ok(if lo > hi { lo } else { want.clamp(lo, hi) })
}

/// Exact distribution of the simple random walk plus its envelope check.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkReport {
    pub t: usize,
    /// `Pr[X_t = i]`, exact when `exact` is true.
    pub distribution: Vec<BigRational>,
    pub distribution_f64: Vec<f64>,
    pub exact: bool,
    /// Rough absolute error bound of the floating-point path (0 when exact).
    pub error_estimate: f64,
    pub stationary: Option<Vec<BigRational>>,
    pub sub_sample: usize,
    /// `min P^k(i,j) / max σ` and `max P^k(i,j) / min σ`.
    pub alpha: Option<BigRational>,
    pub beta: Option<BigRational>,
    /// False when some `P^k(i,j)` is zero; the envelope is then skipped.
    pub positive_transitions: bool,
    /// `s = floor(t / k)` steps of the sub-sampled chain.
    pub envelope_steps: usize,
    /// `(1 - α/2)^s`.
    pub envelope: Option<BigRational>,
    /// `2 + 2 ln(β) / α`.
    pub threshold: Option<f64>,
    /// Whether every `|Pr[X_t = i] - σ_i| <= (1 - α/2)^s σ_i`; `None` when
    /// `s` is below the threshold or the check is skipped.
    pub within_envelope: Option<bool>,
    /// `(1 - α/2)^t`, the envelope with the raw step count as exponent.
    pub envelope_t: Option<BigRational>,
    /// The same comparison against `envelope_t`, made once `t` reaches the threshold.
    pub within_envelope_t: Option<bool>,
}

type Matrix = Vec<Vec<BigRational>>;

fn transition_matrix(d: &Digraph) -> Result<Matrix> {
    let n = d.len();
    let mut p = vec![vec![BigRational::zero(); n]; n];
    for (u, row) in p.iter_mut().enumerate() {
        let deg = d.out_degree(u);
        if deg == 0 {
            return Err(Error::SinkVertex(d.labels[u]));
        }
        let w = BigRational::new(BigInt::one(), BigInt::from(deg));
        for v in ones(d.out[u]) {
            row[v] = w.clone();
        }
    }
    Ok(p)
}

fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    (0..n)
        .into_par_iter()
        .map(|i| {
            (0..n)
                .map(|j| {
                    (0..n).filter(|&l| !a[i][l].is_zero() && !b[l][j].is_zero()).fold(BigRational::zero(), |acc, l| acc + &a[i][l] * &b[l][j])
                })
                .collect()
        })
        .collect()
}

fn vec_mul(x: &[BigRational], p: &Matrix) -> Vec<BigRational> {
    let n = x.len();
    let mut y = vec![BigRational::zero(); n];
    for (i, xi) in x.iter().enumerate() {
        if xi.is_zero() {
            continue;
        }
        for (j, pij) in p[i].iter().enumerate() {
            if !pij.is_zero() {
                y[j] += xi * pij;
            }
        }
    }
    y
}

/// Unique solution of `σ P = σ`, `Σσ = 1`, if there is one.
fn stationary(p: &Matrix) -> Option<Vec<BigRational>> {
    let n = p.len();
    // rows: equations Σ_i σ_i (P(i,j) - [i=j]) = 0 for j < n-1, then Σ σ_i = 1
    let mut a: Vec<Vec<BigRational>> = (0..n)
        .map(|j| {
            if j == n - 1 {
                let mut row = vec![BigRational::one(); n + 1];
                row[n] = BigRational::one();
                row
            } else {
                let mut row: Vec<BigRational> = (0..n).map(|i| p[i][j].clone()).collect();
                row[j] -= BigRational::one();
                row.push(BigRational::zero());
                row
            }
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        let inv = a[col][col].recip();
        for x in a[col].iter_mut() {
            *x *= &inv;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let factor = a[r][col].clone();
                let (pivot_row, target) = if r < col {
                    let (lo, hi) = a.split_at_mut(col);
                    (&hi[0], &mut lo[r])
                } else {
                    let (lo, hi) = a.split_at_mut(r);
                    (&lo[col], &mut hi[0])
                };
                for (t, pv) in target.iter_mut().zip(pivot_row.iter()) {
                    *t -= &factor * pv;
                }
            }
        }
    }
    Some(a.into_iter().map(|row| row[n].clone()).collect())
}

fn pow_rational(x: &BigRational, e: usize) -> BigRational {
    let mut acc = BigRational::one();
    for _ in 0..e {
        acc *= x;
    }
    acc
}

fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Precomputed pieces shared by all walk lengths on one digraph.
pub struct Walk {
    d: Digraph,
    p: Matrix,
    sigma: Option<Vec<BigRational>>,
    k: usize,
    alpha: Option<BigRational>,
    beta: Option<BigRational>,
    positive: bool,
}

impl Walk {
    /// Requires out-degree at least 1 everywhere and `|V| <= 32`.
    pub fn new(d: &Digraph, nu: f64) -> Result<Self> {
        if d.len() > EXACT_WALK_LIMIT {
            return Err(Error::TooLargeForExact { vertices: d.len(), limit: EXACT_WALK_LIMIT });
        }
        let p = transition_matrix(d)?;
        let k = sub_sample_length(nu)?;
        let sigma = stationary(&p);
        let mut pk = p.clone();
        for _ in 1..k {
            pk = mat_mul(&pk, &p);
        }
        let positive = pk.iter().flatten().all(|x| x.is_positive());
        let (alpha, beta) = match &sigma {
            Some(s) if positive && s.iter().all(|x| x.is_positive()) => {
                let min_p = pk.iter().flatten().min().expect("nonempty").clone();
                let max_p = pk.iter().flatten().max().expect("nonempty").clone();
                let min_s = s.iter().min().expect("nonempty");
                let max_s = s.iter().max().expect("nonempty");
                (Some(min_p / max_s), Some(max_p / min_s))
            }
            _ => (None, None),
        };
        Ok(Walk { d: d.clone(), p, sigma, k, alpha, beta, positive })
    }

    pub fn sub_sample(&self) -> usize {
        self.k
    }

    /// Reports for `t = 0..=t_max` from start vertex `u`.
    pub fn series(&self, u: usize, t_max: usize) -> Result<Vec<WalkReport>> {
        check_vertex(&self.d, u)?;
        let n = self.d.len();
        let mut x = vec![BigRational::zero(); n];
        x[u] = BigRational::one();
        let mut out = Vec::with_capacity(t_max + 1);
        for t in 0..=t_max {
            if t > 0 {
                x = vec_mul(&x, &self.p);
            }
            out.push(self.report(t, x.clone()));
        }
        Ok(out)
    }

    fn report(&self, t: usize, x: Vec<BigRational>) -> WalkReport {
        let s = t / self.k;
        let (mut envelope, mut threshold, mut within, mut envelope_t, mut within_t) = (None, None, None, None, None);
        if let (Some(a), Some(b), Some(sigma)) = (&self.alpha, &self.beta, &self.sigma) {
            let half = BigRational::one() - a / BigRational::from_integer(2.into());
            let inside = |env: &BigRational| x.iter().zip(sigma).all(|(xi, si)| (xi - si).abs() <= env * si);
            let th = 2.0 + 2.0 * to_f64(b).ln() / to_f64(a);
            let env = pow_rational(&half, s);
            let env_t = pow_rational(&half, t);
            within = (s as f64 >= th).then(|| inside(&env));
            within_t = (t as f64 >= th).then(|| inside(&env_t));
            envelope = Some(env);
            envelope_t = Some(env_t);
            threshold = Some(th);
        }
        WalkReport {
            t,
            distribution_f64: x.iter().map(to_f64).collect(),
            distribution: x,
            exact: true,
            error_estimate: 0.0,
            stationary: self.sigma.clone(),
            sub_sample: self.k,
            alpha: self.alpha.clone(),
            beta: self.beta.clone(),
            positive_transitions: self.positive,
            envelope_steps: s,
            envelope,
            threshold,
            within_envelope: within,
            envelope_t,
            within_envelope_t: within_t,
        }
    }
}

/// The `t`-step distribution of the simple random walk from `u`.
///
/// Up to 32 vertices everything is exact rational arithmetic. Larger digraphs
/// use `f64` matrix-vector products, leave the rational fields empty and
/// report a rough error estimate instead.
pub fn walk_distribution(d: &Digraph, u: usize, t: usize, nu: f64) -> Result<WalkReport> {
    check_vertex(d, u)?;
    if d.len() <= EXACT_WALK_LIMIT {
        return Ok(Walk::new(d, nu)?.series(u, t)?.pop().expect("t + 1 reports"));
    }
    let n = d.len();
    if let Some(v) = (0..n).find(|&v| d.out_degree(v) == 0) {
        return Err(Error::SinkVertex(d.labels[v]));
    }
    let mut x = vec![0.0f64; n];
    x[u] = 1.0;
    for _ in 0..t {
        let mut y = vec![0.0; n];
        for (v, xv) in x.iter().enumerate() {
            let w = xv / d.out_degree(v) as f64;
            for j in ones(d.out[v]) {
                y[j] += w;
            }
        }
        x = y;
    }
    Ok(WalkReport {
        t,
        distribution: Vec::new(),
        distribution_f64: x,
        exact: false,
        error_estimate: (t + 1) as f64 * n as f64 * f64::EPSILON,
        stationary: None,
        sub_sample: sub_sample_length(nu)?,
        alpha: None,
        beta: None,
        positive_transitions: false,
        envelope_steps: t / sub_sample_length(nu)?,
        envelope: None,
        threshold: None,
        within_envelope: None,
        envelope_t: None,
        within_envelope_t: None,
    })
}
