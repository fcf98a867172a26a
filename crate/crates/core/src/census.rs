//! Exact enumeration and counting of Latin rectangles and their extensions.
//!
//! All counts are exact. [`count_extensions`] is a bitmask backtracking search
//! that branches on whichever constraint has the fewest options: an empty
//! cell (which symbol goes there) or a row missing a symbol (which column
//! takes it). The enumerator walks rectangles in row-major lexicographic order
//! of the flattened grid, and can be partitioned by first row.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rectangle::{check_dims, full_mask, Edge, LatinRectangle, MatchingTuple, PartialLatinRectangle};

/// Desk-scale limit on exhaustive search.
///
/// [`Guard::Enforce`] permits `n <= 4` for any `k`, `n <= 6` for `k <= 3`, and a
/// single row up to `n = 8`. [`Guard::Override`] lifts the limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Guard {
    #[default]
    Enforce,
    Override,
}

impl Guard {
    pub fn permits(self, k: usize, n: usize) -> bool {
        match self {
            Guard::Override => true,
            Guard::Enforce => n <= 4 || (n <= 6 && k <= 3) || (k == 1 && n <= 8),
        }
    }

    pub fn check(self, k: usize, n: usize) -> Result<()> {
        check_dims(k, n)?;
        if self.permits(k, n) {
            Ok(())
        } else {
            Err(Error::SizeGuardExceeded { k, n })
        }
    }
}

const EMPTY: u8 = u8::MAX;

/// Incremental search state over a k x n grid.
#[derive(Clone)]
pub(crate) struct Search {
    k: usize,
    n: usize,
    full: u32,
    cells: Vec<u8>,
    row_used: Vec<u32>,
    // symbols placed in, or forbidden from, each column
    col_used: Vec<u32>,
    // columns holding, or forbidding, each symbol
    sym_cols: Vec<u32>,
    row_empty: Vec<u32>,
    remaining: usize,
    dead: bool,
}

impl Search {
    pub(crate) fn new(p: &PartialLatinRectangle) -> Self {
        let (k, n) = (p.k(), p.n());
        let mut s = Search {
            k,
            n,
            full: full_mask(n),
            cells: vec![EMPTY; k * n],
            row_used: vec![0; k],
            col_used: vec![0; n],
            sym_cols: vec![0; n],
            row_empty: vec![full_mask(n); k],
            remaining: k * n,
            dead: false,
        };
        for (r, c, sym) in p.entries() {
            s.place(r, c, sym - 1);
        }
        s
    }

    /// Forbids symbol `s0` from column `c` in every row.
    pub(crate) fn forbid(&mut self, c: usize, s0: u8) {
        if self.col_used[c] & (1 << s0) != 0 {
            // already placed there (or already forbidden)
            if (0..self.k).any(|r| self.cells[r * self.n + c] == s0) {
                self.dead = true;
            }
            return;
        }
        self.col_used[c] |= 1 << s0;
        self.sym_cols[s0 as usize] |= 1 << c;
    }

    #[inline]
    pub(crate) fn candidates(&self, r: usize, c: usize) -> u32 {
        self.full & !self.row_used[r] & !self.col_used[c]
    }

    #[inline]
    pub(crate) fn is_empty(&self, r: usize, c: usize) -> bool {
        self.cells[r * self.n + c] == EMPTY
    }

    #[inline]
    pub(crate) fn place(&mut self, r: usize, c: usize, s0: u8) {
        debug_assert!(self.is_empty(r, c) && self.candidates(r, c) & (1 << s0) != 0);
        self.cells[r * self.n + c] = s0;
        self.row_used[r] |= 1 << s0;
        self.col_used[c] |= 1 << s0;
        self.sym_cols[s0 as usize] |= 1 << c;
        self.row_empty[r] &= !(1 << c);
        self.remaining -= 1;
    }

    #[inline]
    fn unplace(&mut self, r: usize, c: usize) {
        let s0 = self.cells[r * self.n + c];
        self.cells[r * self.n + c] = EMPTY;
        self.row_used[r] &= !(1 << s0);
        self.col_used[c] &= !(1 << s0);
        self.sym_cols[s0 as usize] &= !(1 << c);
        self.row_empty[r] |= 1 << c;
        self.remaining += 1;
    }

    /// Number of completions of the current state.
    pub(crate) fn count(&mut self) -> u64 {
        if self.dead {
            return 0;
        }
        self.count_rec()
    }

    fn count_rec(&mut self) -> u64 {
        if self.remaining == 0 {
            return 1;
        }
        // (options, is_cell, a, b, option mask)
        let mut best = (u32::MAX, true, 0usize, 0usize, 0u32);
        for r in 0..self.k {
            let mut em = self.row_empty[r];
            if em == 0 {
                continue;
            }
            while em != 0 {
                let c = em.trailing_zeros() as usize;
                em &= em - 1;
                let cand = self.candidates(r, c);
                let pc = cand.count_ones();
                if pc == 0 {
                    return 0;
                }
                if pc < best.0 {
                    best = (pc, true, r, c, cand);
                }
            }
            let mut missing = self.full & !self.row_used[r];
            while missing != 0 {
                let s = missing.trailing_zeros() as usize;
                missing &= missing - 1;
                let places = self.row_empty[r] & !self.sym_cols[s];
                let pc = places.count_ones();
                if pc == 0 {
                    return 0;
                }
                if pc < best.0 {
                    best = (pc, false, r, s, places);
                }
            }
        }
        let (_, is_cell, a, b, mut opts) = best;
        let mut total = 0;
        while opts != 0 {
            let x = opts.trailing_zeros() as usize;
            opts &= opts - 1;
            let (r, c, s) = if is_cell { (a, b, x) } else { (a, x, b) };
            self.place(r, c, s as u8);
            total += self.count_rec();
            self.unplace(r, c);
        }
        total
    }

    /// Lexicographically least completion in row-major order, if any.
    fn first_completion(&mut self) -> bool {
        if self.dead {
            return false;
        }
        self.first_rec(0)
    }

    fn feasible(&self) -> bool {
        for r in 0..self.k {
            let mut em = self.row_empty[r];
            while em != 0 {
                let c = em.trailing_zeros() as usize;
                em &= em - 1;
                if self.candidates(r, c) == 0 {
                    return false;
                }
            }
            if self.row_empty[r] != 0 {
                let mut missing = self.full & !self.row_used[r];
                while missing != 0 {
                    let s = missing.trailing_zeros() as usize;
                    missing &= missing - 1;
                    if self.row_empty[r] & !self.sym_cols[s] == 0 {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn first_rec(&mut self, from: usize) -> bool {
        let Some(pos) = (from..self.k * self.n).find(|&p| self.cells[p] == EMPTY) else {
            return true;
        };
        let (r, c) = (pos / self.n, pos % self.n);
        let mut cand = self.candidates(r, c);
        while cand != 0 {
            let s = cand.trailing_zeros() as u8;
            cand &= cand - 1;
            self.place(r, c, s);
            if self.feasible() && self.first_rec(pos + 1) {
                return true;
            }
            self.unplace(r, c);
        }
        false
    }

    pub(crate) fn into_rectangle(self) -> LatinRectangle {
        debug_assert_eq!(self.remaining, 0);
        LatinRectangle::from_cells0_unchecked(self.k, self.n, self.cells)
    }
}

/// Streams every k x n Latin rectangle once, in row-major lexicographic order.
pub struct RectangleEnumerator {
    k: usize,
    n: usize,
    cells: Vec<u8>,
    row_used: Vec<u32>,
    col_used: Vec<u32>,
    next_try: Vec<u8>,
    start: usize,
    pos: usize,
    done: bool,
}

impl RectangleEnumerator {
    fn build(k: usize, n: usize, first_row: Option<&[u8]>) -> Self {
        let total = k * n;
        let mut e = RectangleEnumerator {
            k,
            n,
            cells: vec![EMPTY; total],
            row_used: vec![0; k],
            col_used: vec![0; n],
            next_try: vec![0; total + 1],
            start: 0,
            pos: 0,
            done: false,
        };
        if let Some(row) = first_row {
            for (c, &s) in row.iter().enumerate() {
                e.set(c, s);
            }
            e.start = n;
            e.pos = n;
        }
        e
    }

    #[inline]
    fn set(&mut self, pos: usize, s: u8) {
        let (r, c) = (pos / self.n, pos % self.n);
        self.cells[pos] = s;
        self.row_used[r] |= 1 << s;
        self.col_used[c] |= 1 << s;
    }

    #[inline]
    fn clear(&mut self, pos: usize) {
        let (r, c) = (pos / self.n, pos % self.n);
        let s = self.cells[pos];
        self.cells[pos] = EMPTY;
        self.row_used[r] &= !(1 << s);
        self.col_used[c] &= !(1 << s);
    }
}

impl Iterator for RectangleEnumerator {
    type Item = LatinRectangle;

    fn next(&mut self) -> Option<LatinRectangle> {
        let total = self.k * self.n;
        let full = full_mask(self.n);
        while !self.done {
            if self.pos == total {
                let out = LatinRectangle::from_cells0_unchecked(self.k, self.n, self.cells.clone());
                if self.pos == self.start {
                    self.done = true;
                } else {
                    self.pos -= 1;
                    self.clear(self.pos);
                }
                return Some(out);
            }
            let (r, c) = (self.pos / self.n, self.pos % self.n);
            let floor = self.next_try[self.pos];
            let avail = full & !self.row_used[r] & !self.col_used[c] & !((1u32 << floor) - 1);
            if avail != 0 {
                let s = avail.trailing_zeros() as u8;
                self.set(self.pos, s);
                self.next_try[self.pos] = s + 1;
                self.pos += 1;
                self.next_try[self.pos] = 0;
            } else {
                self.next_try[self.pos] = 0;
                if self.pos == self.start {
                    self.done = true;
                } else {
                    self.pos -= 1;
                    self.clear(self.pos);
                }
            }
        }
        None
    }
}

/// All of `L_{k,n}` in row-major lexicographic order.
pub fn enumerate_rectangles(k: usize, n: usize, guard: Guard) -> Result<RectangleEnumerator> {
    guard.check(k, n)?;
    Ok(RectangleEnumerator::build(k, n, None))
}

/// The rectangles of `L_{k,n}` whose first row is `first_row` (1-based), in
/// lexicographic order. Concatenating these over all first rows in
/// lexicographic order reproduces [`enumerate_rectangles`].
pub fn enumerate_with_first_row(k: usize, n: usize, first_row: &[u8], guard: Guard) -> Result<RectangleEnumerator> {
    guard.check(k, n)?;
    let row = LatinRectangle::from_rows(&[first_row])?;
    if row.n() != n {
        return Err(Error::DimensionMismatch { left_k: 1, left_n: n, right_k: 1, right_n: row.n() });
    }
    Ok(RectangleEnumerator::build(k, n, Some(row.cells0())))
}

/// Folds over all of `L_{k,n}`, partitioned by first row across the rayon pool.
///
/// `reduce` must be associative; the result does not depend on thread count.
pub fn par_fold_rectangles<T, ID, F, R>(k: usize, n: usize, guard: Guard, identity: ID, fold: F, reduce: R) -> Result<T>
where
    T: Send,
    ID: Fn() -> T + Sync + Send,
    F: Fn(T, &LatinRectangle) -> T + Sync + Send,
    R: Fn(T, T) -> T + Sync + Send,
{
    guard.check(k, n)?;
    let first_rows: Vec<LatinRectangle> = RectangleEnumerator::build(1, n, None).collect();
    let parts: Vec<T> = first_rows
        .par_iter()
        .map(|row| RectangleEnumerator::build(k, n, Some(row.cells0())).fold(identity(), |acc, l| fold(acc, &l)))
        .collect();
    Ok(parts.into_iter().fold(identity(), reduce))
}

fn factorial(n: usize) -> BigUint {
    (1..=n as u64).fold(BigUint::one(), |acc, x| acc * x)
}

/// `|L_{k,n}|`, computed as `n!` times the completions of a fixed first row.
pub fn count_rectangles(k: usize, n: usize, guard: Guard) -> Result<BigUint> {
    guard.check(k, n)?;
    let mut p = PartialLatinRectangle::empty(k, n)?;
    for c in 0..n {
        p = p.with_entry(0, c, c as u8 + 1)?;
    }
    Ok(factorial(n) * Search::new(&p).count())
}

pub(crate) fn count_u64(p: &PartialLatinRectangle) -> u64 {
    Search::new(p).count()
}

/// `N(P)`: the number of rectangles in `L_{k,n}` containing `p`.
pub fn count_extensions(p: &PartialLatinRectangle, guard: Guard) -> Result<BigUint> {
    guard.check(p.k(), p.n())?;
    Ok(BigUint::from(count_u64(p)))
}

/// Totals for `L_{k,n}` and optionally the extensions of one pattern.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CensusResult {
    pub k: usize,
    pub n: usize,
    pub total: BigUint,
    pub constrained: Option<BigUint>,
}

pub fn census(k: usize, n: usize, pattern: Option<&PartialLatinRectangle>, guard: Guard) -> Result<CensusResult> {
    if let Some(p) = pattern {
        if p.k() != k || p.n() != n {
            return Err(Error::DimensionMismatch { left_k: k, left_n: n, right_k: p.k(), right_n: p.n() });
        }
    }
    let total = count_rectangles(k, n, guard)?;
    let constrained = pattern.map(|p| count_extensions(p, guard)).transpose()?;
    Ok(CensusResult { k, n, total, constrained })
}

/// `Pr[P ⊆ L]` for uniform `L` in `L_{k,n}`, in lowest terms.
pub fn exact_containment_probability(p: &PartialLatinRectangle, guard: Guard) -> Result<BigRational> {
    let hits = count_extensions(p, guard)?;
    let total = count_rectangles(p.k(), p.n(), guard)?;
    Ok(BigRational::new(hits.into(), total.into()))
}

/// `Pr[P' ⊆ L | P ⊆ L]` where `P'` adds exactly one entry to `P`.
pub fn exact_conditional_probability(
    p: &PartialLatinRectangle,
    p_ext: &PartialLatinRectangle,
    guard: Guard,
) -> Result<BigRational> {
    if !p.is_subpattern_of(p_ext) || p_ext.fill_count() != p.fill_count() + 1 {
        return Err(Error::NotAnExtension);
    }
    let base = count_extensions(p, guard)?;
    if base.is_zero() {
        return Err(Error::ConditioningOnEmptyEvent);
    }
    let ext = count_extensions(p_ext, guard)?;
    Ok(BigRational::new(ext.into(), base.into()))
}

/// Exact sizes of the classes `A_j` (completions with `e` in matching `j`)
/// and `B` (completions avoiding `e`) among all completions of `M`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SwitchClassSizes {
    pub edge: Edge,
    pub a: Vec<BigUint>,
    pub b: BigUint,
    pub total: BigUint,
}

impl SwitchClassSizes {
    /// `|N| = |B| + Σ|A_j|`.
    pub fn partition_holds(&self) -> bool {
        let sum: BigUint = self.a.iter().sum();
        self.total == &self.b + sum
    }
}

pub fn switch_classes(m: &MatchingTuple, e: Edge, guard: Guard) -> Result<SwitchClassSizes> {
    let (k, n) = (m.k(), m.n());
    guard.check(k, n)?;
    if e.col >= n || e.symbol == 0 || e.symbol as usize > n {
        return Err(Error::IndexOutOfRange { index: e.col + 1, max: n });
    }
    if let Some(owner) = m.owner_of(e) {
        return Err(Error::EdgeAlreadyUsed { col: e.col + 1, symbol: e.symbol as usize, matching: owner + 1 });
    }
    let s0 = e.symbol - 1;
    let base = Search::new(&m.to_partial());
    let total = base.clone().count();
    let a = (0..k)
        .map(|j| {
            if base.is_empty(j, e.col) && base.candidates(j, e.col) & (1 << s0) != 0 {
                let mut s = base.clone();
                s.place(j, e.col, s0);
                BigUint::from(s.count())
            } else {
                BigUint::zero()
            }
        })
        .collect();
    let mut avoid = base;
    avoid.forbid(e.col, s0);
    let b = BigUint::from(avoid.count());
    Ok(SwitchClassSizes { edge: e, a, b, total: BigUint::from(total) })
}

/// `(n - k)|A_j| / |B|` for an edge disjoint from `M_j`.
pub fn switching_ratio(m: &MatchingTuple, e: Edge, j: usize, guard: Guard) -> Result<BigRational> {
    if j >= m.k() {
        return Err(Error::IndexOutOfRange { index: j + 1, max: m.k() });
    }
    if m.edges(j).any(|f| f.meets(&e)) {
        return Err(Error::EdgeMeetsMatching(j + 1));
    }
    let sizes = switch_classes(m, e, guard)?;
    ratio_from(&sizes, m.n() - m.k(), j)
}

pub(crate) fn ratio_from(sizes: &SwitchClassSizes, free: usize, j: usize) -> Result<BigRational> {
    if sizes.b.is_zero() {
        return Err(Error::DegenerateB);
    }
    let num = BigUint::from(free) * &sizes.a[j];
    Ok(BigRational::new(num.into(), sizes.b.clone().into()))
}

/// Some completion of `p`: the lexicographically least in row-major order
/// (lowest empty cell first, smallest feasible symbol first).
pub fn complete_partial(p: &PartialLatinRectangle) -> Result<LatinRectangle> {
    let mut s = Search::new(p);
    if s.first_completion() {
        Ok(s.into_rectangle())
    } else {
        Err(Error::Unsatisfiable)
    }
}
