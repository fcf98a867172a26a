//! Subsquare censuses and the expectation and bound formulas built on them.
//!
//! For a fixed set `R` of `r` rows, an `r x r` subarray on columns `C` is a
//! Latin subsquare exactly when every column of `C` carries the same set of
//! `r` symbols in rows `R`. The general count therefore groups columns by
//! their symbol set. Order 2 has its own pair-closure test.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::bits::{binomial, ones, subsets_of_size};
use crate::error::{Error, Result};
use crate::rectangle::LatinRectangle;

/// How `SS_{r,m}` treats subarrays whose rows or columns repeat a symbol.
///
/// Inside a Latin rectangle no subarray repeats a symbol in a row or column,
/// so both readings give the same counts there.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Reading {
    /// Count only subarrays whose rows and columns are repetition-free.
    #[default]
    RepetitionFree,
    /// Count every subarray with at most `m` distinct symbols.
    Any,
}

/// Rows, columns and symbols of one counted subarray (all 1-based).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub symbols: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsquareCensus {
    pub order: usize,
    pub cap: usize,
    pub count: BigUint,
    pub witnesses: Option<Vec<Witness>>,
}

fn check_order(l: &LatinRectangle, r: usize) -> Result<()> {
    let max = l.k().min(l.n());
    if r == 0 || r > max {
        return Err(Error::OrderOutOfRange { order: r, max });
    }
    Ok(())
}

fn check_cap(l: &LatinRectangle, r: usize, m: usize) -> Result<()> {
    check_order(l, r)?;
    if m < r {
        return Err(Error::CapBelowOrder { cap: m, order: r });
    }
    if m > l.n() {
        return Err(Error::InvalidParameter(format!("symbol cap {m} exceeds n = {}", l.n())));
    }
    Ok(())
}

/// Symbol mask of every column restricted to the rows in `rows`.
fn column_masks(l: &LatinRectangle, rows: u64) -> Vec<u32> {
    (0..l.n()).map(|c| ones(rows).fold(0u32, |m, i| m | 1 << l.get0(i, c))).collect()
}

/// Number of intercalates (order-2 subsquares).
pub fn count_intercalates(l: &LatinRectangle) -> u64 {
    let (k, n) = (l.k(), l.n());
    let mut pos = vec![0usize; k * n];
    for i in 0..k {
        for c in 0..n {
            pos[i * n + l.get0(i, c) as usize] = c;
        }
    }
    let mut twice = 0;
    for i in 0..k {
        for i2 in i + 1..k {
            for c in 0..n {
                let (a, b) = (l.get0(i, c), l.get0(i2, c));
                if l.get0(i2, pos[i * n + b as usize]) == a {
                    twice += 1;
                }
            }
        }
    }
    twice / 2
}

/// Column groups sharing one `r`-symbol set on row set `rows`.
fn subsquare_groups(l: &LatinRectangle, rows: u64) -> Vec<(u32, Vec<usize>)> {
    let mut groups: Vec<(u32, Vec<usize>)> = Vec::new();
    for (c, m) in column_masks(l, rows).into_iter().enumerate() {
        match groups.iter_mut().find(|g| g.0 == m) {
            Some(g) => g.1.push(c),
            None => groups.push((m, vec![c])),
        }
    }
    groups
}

/// `SS_r(L)`: the number of order-`r` Latin subsquares.
pub fn count_subsquares(l: &LatinRectangle, r: usize) -> Result<BigUint> {
    check_order(l, r)?;
    if r == 2 {
        return Ok(BigUint::from(count_intercalates(l)));
    }
    let row_sets: Vec<u64> = subsets_of_size(l.k(), r).collect();
    Ok(row_sets
        .par_iter()
        .map(|&rows| subsquare_groups(l, rows).iter().map(|g| binomial(g.1.len(), r)).sum::<BigUint>())
        .sum())
}

/// Whether any order-`r` subsquare exists.
pub fn has_subsquare(l: &LatinRectangle, r: usize) -> Result<bool> {
    check_order(l, r)?;
    Ok(subsets_of_size(l.k(), r).any(|rows| subsquare_groups(l, rows).iter().any(|g| g.1.len() >= r)))
}

/// `SS_{r,m}(L)`: `r x r` subarrays using at most `m` distinct symbols.
pub fn count_subsquares_limited(l: &LatinRectangle, r: usize, m: usize, reading: Reading) -> Result<BigUint> {
    Ok(limited_census(l, r, m, reading, false)?.count)
}

/// Like [`count_subsquares_limited`], optionally listing every counted subarray.
pub fn subsquare_census(
    l: &LatinRectangle,
    r: usize,
    m: usize,
    reading: Reading,
    witnesses: bool,
) -> Result<SubsquareCensus> {
    limited_census(l, r, m, reading, witnesses)
}

fn limited_census(l: &LatinRectangle, r: usize, m: usize, reading: Reading, keep: bool) -> Result<SubsquareCensus> {
    check_cap(l, r, m)?;
    let row_sets: Vec<u64> = subsets_of_size(l.k(), r).collect();
    let parts: Vec<(BigUint, Vec<Witness>)> = row_sets
        .par_iter()
        .map(|&rows| {
            let masks = column_masks(l, rows);
            let mut found = Vec::new();
            let mut count = 0u64;
            let mut chosen = Vec::with_capacity(r);
            scan_columns(l, rows, &masks, r, m, reading, 0, 0, &mut chosen, &mut count, keep.then_some(&mut found));
            (BigUint::from(count), found)
        })
        .collect();
    let mut count = BigUint::zero();
    let mut all = Vec::new();
    for (c, w) in parts {
        count += c;
        all.extend(w);
    }
    Ok(SubsquareCensus { order: r, cap: m, count, witnesses: keep.then_some(all) })
}

#[allow(clippy::too_many_arguments)]
fn scan_columns(
    l: &LatinRectangle,
    rows: u64,
    masks: &[u32],
    r: usize,
    m: usize,
    reading: Reading,
    from: usize,
    support: u32,
    chosen: &mut Vec<usize>,
    count: &mut u64,
    mut out: Option<&mut Vec<Witness>>,
) {
    if chosen.len() == r {
        if reading == Reading::RepetitionFree && !repetition_free(l, rows, chosen) {
            return;
        }
        *count += 1;
        if let Some(out) = out {
            out.push(Witness {
                rows: ones(rows).map(|i| i + 1).collect(),
                cols: chosen.iter().map(|c| c + 1).collect(),
                symbols: ones(support as u64).map(|s| s + 1).collect(),
            });
        }
        return;
    }
    let need = r - chosen.len();
    for c in from..=masks.len() - need {
        let next = support | masks[c];
        if next.count_ones() as usize > m {
            continue;
        }
        chosen.push(c);
        scan_columns(l, rows, masks, r, m, reading, c + 1, next, chosen, count, out.as_deref_mut());
        chosen.pop();
    }
}

fn repetition_free(l: &LatinRectangle, rows: u64, cols: &[usize]) -> bool {
    let rows_ok = ones(rows).all(|i| {
        let mut seen = 0u32;
        cols.iter().all(|&c| {
            let bit = 1 << l.get0(i, c);
            let fresh = seen & bit == 0;
            seen |= bit;
            fresh
        })
    });
    let cols_ok = cols.iter().all(|&c| {
        let mut seen = 0u32;
        ones(rows).all(|i| {
            let bit = 1 << l.get0(i, c);
            let fresh = seen & bit == 0;
            seen |= bit;
            fresh
        })
    });
    rows_ok && cols_ok
}

/// Largest `r <= k` with `r < n` such that `L` has an order-`r` subsquare;
/// 0 when there is none (only for `n = 1`).
pub fn max_proper_subsquare_order(l: &LatinRectangle) -> usize {
    let top = l.k().min(l.n() - 1);
    (1..=top).rev().find(|&r| has_subsquare(l, r).expect("order in range")).unwrap_or(0)
}

/// `|L_m|`, the number of Latin squares of order `m`, for `m <= 5`.
pub const SQUARE_COUNTS: [(usize, u64); 5] = [(1, 1), (2, 2), (3, 12), (4, 576), (5, 161_280)];

pub fn square_count(m: usize) -> Result<u64> {
    SQUARE_COUNTS.iter().find(|e| e.0 == m).map(|e| e.1).ok_or(Error::UnknownSquareCount(m))
}

/// `C(n,m)^2 C(k,m) |L_m| / n^(m^2)`, the centre of the expectation window, exactly.
pub fn expectation_center(n: usize, k: usize, m: usize) -> Result<BigRational> {
    if m == 0 || m > k.min(n) {
        return Err(Error::OrderOutOfRange { order: m, max: k.min(n) });
    }
    let lm = square_count(m)?;
    let num = binomial(n, m).pow(2) * binomial(k, m) * lm;
    let den = BigUint::from(n).pow((m * m) as u32);
    Ok(BigRational::new(num.into(), den.into()))
}

/// `C(n,m)^2 C(k,m) |L_m| ((1 -+ eps)/n)^(m^2)` as `(low, high)`.
pub fn expectation_window(n: usize, k: usize, m: usize, eps: f64) -> Result<(f64, f64)> {
    if !(0.0..1.0).contains(&eps) {
        return Err(Error::InvalidParameter(format!("epsilon must lie in [0, 1), got {eps}")));
    }
    let center = expectation_center(n, k, m)?;
    let c = center.to_f64().unwrap_or(f64::INFINITY);
    let e = (m * m) as i32;
    Ok((c * (1.0 - eps).powi(e), c * (1.0 + eps).powi(e)))
}

/// `ln(3^(m^2) (m/n)^(m^2 - 3m))`.
pub fn ln_subsquare_bound(n: f64, m: usize) -> Result<f64> {
    if m < 2 {
        return Err(Error::DomainError(format!("bound needs m >= 2, got {m}")));
    }
    if n <= 0.0 {
        return Err(Error::DomainError(format!("bound needs n > 0, got {n}")));
    }
    let mf = m as f64;
    let e = (m * m) as f64 - 3.0 * mf;
    Ok((m * m) as f64 * 3f64.ln() + e * (mf.ln() - n.ln()))
}

/// `3^(m^2) (m/n)^(m^2 - 3m)`; may overflow to infinity, the log form does not.
pub fn subsquare_bound(n: f64, m: usize) -> Result<f64> {
    ln_subsquare_bound(n, m).map(f64::exp)
}

/// Largest `m` with `m^4 <= n^3`, i.e. `floor(n^(3/4))`.
pub fn three_quarter_power_floor(n: u64) -> u64 {
    let cube = (n as u128).pow(3);
    let mut m = (n as f64).powf(0.75) as u128;
    while m.pow(4) > cube {
        m -= 1;
    }
    while (m + 1).pow(4) <= cube {
        m += 1;
    }
    m as u64
}

/// Whether the bound strictly decreases over `2 <= m <= n^(3/4)`, in log space.
pub fn subsquare_bound_decreasing(n: u64) -> Result<bool> {
    let top = three_quarter_power_floor(n) as usize;
    let nf = n as f64;
    let mut prev = ln_subsquare_bound(nf, 2)?;
    for m in 3..=top {
        let cur = ln_subsquare_bound(nf, m)?;
        if cur >= prev {
            return Ok(false);
        }
        prev = cur;
    }
    Ok(true)
}
