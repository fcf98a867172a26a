//! Latin rectangles, partial Latin rectangles and their matching-tuple view.
//!
//! Row and column indices in this API are 0-based positions. Symbols are the
//! values `1..=n` themselves. Everything displayed (errors, `.plr` files, JSON)
//! uses 1-based rows and columns.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// Largest supported side length; symbol and column sets are `u32` masks.
pub const MAX_ORDER: usize = 32;

pub(crate) fn check_dims(k: usize, n: usize) -> Result<()> {
    if k == 0 || k > n || n > MAX_ORDER {
        return Err(Error::InvalidDimensions { k, n, max: MAX_ORDER });
    }
    Ok(())
}

#[inline]
pub(crate) fn full_mask(n: usize) -> u32 {
    if n == 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

/// A k x n array over `1..=n` whose rows are permutations and whose columns
/// repeat no symbol.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatinRectangle {
    k: usize,
    n: usize,
    // 0-based symbols, row-major
    cells: Vec<u8>,
}

impl LatinRectangle {
    /// Validates a grid of 1-based symbols.
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self> {
        let k = rows.len();
        let n = rows.first().map_or(0, |r| r.as_ref().len());
        check_dims(k, n)?;
        let mut cells = Vec::with_capacity(k * n);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != n {
                return Err(Error::RaggedRow { row: i + 1, found: row.len(), expected: n });
            }
            for (j, &s) in row.iter().enumerate() {
                if s == 0 || s as usize > n {
                    return Err(Error::OutOfRangeSymbol { row: i + 1, col: j + 1, symbol: s as usize, n });
                }
                cells.push(s - 1);
            }
        }
        Self::from_cells0(k, n, cells)
    }

    /// Validates row-major 0-based cells.
    pub(crate) fn from_cells0(k: usize, n: usize, cells: Vec<u8>) -> Result<Self> {
        check_dims(k, n)?;
        debug_assert_eq!(cells.len(), k * n);
        let full = full_mask(n);
        for i in 0..k {
            let mut seen = 0u32;
            for &s in &cells[i * n..(i + 1) * n] {
                if s as usize >= n {
                    return Err(Error::RowNotPermutation(i + 1));
                }
                seen |= 1 << s;
            }
            if seen != full {
                return Err(Error::RowNotPermutation(i + 1));
            }
        }
        for j in 0..n {
            let mut seen = 0u32;
            for i in 0..k {
                let s = cells[i * n + j];
                if seen & (1 << s) != 0 {
                    return Err(Error::ColumnRepeat(j + 1, s as usize + 1));
                }
                seen |= 1 << s;
            }
        }
        Ok(Self { k, n, cells })
    }

    /// Trusted constructor for generators that maintain the invariants.
    pub(crate) fn from_cells0_unchecked(k: usize, n: usize, cells: Vec<u8>) -> Self {
        debug_assert!(Self::from_cells0(k, n, cells.clone()).is_ok());
        Self { k, n, cells }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Symbol (1-based) at row `r`, column `c`.
    pub fn get(&self, r: usize, c: usize) -> u8 {
        assert!(r < self.k && c < self.n, "cell ({r}, {c}) out of bounds");
        self.cells[r * self.n + c] + 1
    }

    pub fn row(&self, r: usize) -> Vec<u8> {
        self.cells[r * self.n..(r + 1) * self.n].iter().map(|s| s + 1).collect()
    }

    pub fn rows(&self) -> Vec<Vec<u8>> {
        (0..self.k).map(|r| self.row(r)).collect()
    }

    pub(crate) fn cells0(&self) -> &[u8] {
        &self.cells
    }

    #[inline]
    pub(crate) fn get0(&self, r: usize, c: usize) -> u8 {
        self.cells[r * self.n + c]
    }

    /// The matching tuple with `N_i(c)` = the symbol in cell `(i, c)`.
    pub fn to_matchings(&self) -> MatchingTuple {
        let matchings = (0..self.k)
            .map(|i| self.cells[i * self.n..(i + 1) * self.n].iter().map(|&s| Some(s)).collect())
            .collect();
        MatchingTuple { n: self.n, matchings }
    }

    /// Inverse of [`LatinRectangle::to_matchings`]; the tuple must be complete.
    pub fn from_matchings(t: &MatchingTuple) -> Result<Self> {
        let mut cells = Vec::with_capacity(t.k() * t.n);
        for (i, m) in t.matchings.iter().enumerate() {
            for s in m {
                cells.push(s.ok_or(Error::IncompleteTuple(i + 1))?);
            }
        }
        // Tuples are edge-disjoint by construction; a perfect injective map is
        // a permutation, so this only re-checks what MatchingTuple guarantees.
        Self::from_cells0(t.k(), t.n, cells)
    }

    /// True iff every filled cell of `p` agrees with `self`.
    pub fn contains(&self, p: &PartialLatinRectangle) -> Result<bool> {
        if p.k != self.k || p.n != self.n {
            return Err(Error::DimensionMismatch { left_k: self.k, left_n: self.n, right_k: p.k, right_n: p.n });
        }
        Ok(self.cells.iter().zip(&p.cells).all(|(&s, q)| q.is_none_or(|q| q == s)))
    }

    /// The |R| x n rectangle formed by rows `R`, in increasing order.
    pub fn restrict_rows<I: IntoIterator<Item = usize>>(&self, rows: I) -> Result<Self> {
        let set: BTreeSet<usize> = rows.into_iter().collect();
        if set.is_empty() {
            return Err(Error::EmptySelection);
        }
        if let Some(&bad) = set.iter().find(|&&r| r >= self.k) {
            return Err(Error::IndexOutOfRange { index: bad + 1, max: self.k });
        }
        let mut cells = Vec::with_capacity(set.len() * self.n);
        for &r in &set {
            cells.extend_from_slice(&self.cells[r * self.n..(r + 1) * self.n]);
        }
        Ok(Self { k: set.len(), n: self.n, cells })
    }

    pub fn to_partial(&self) -> PartialLatinRectangle {
        PartialLatinRectangle {
            k: self.k,
            n: self.n,
            cells: self.cells.iter().map(|&s| Some(s)).collect(),
            fill: self.k * self.n,
        }
    }
}

impl fmt::Display for LatinRectangle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.k {
            let row: Vec<String> = self.row(r).iter().map(|s| s.to_string()).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

/// A k x n array with optional entries; filled cells obey the Latin constraints.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PartialLatinRectangle {
    k: usize,
    n: usize,
    cells: Vec<Option<u8>>,
    fill: usize,
}

impl PartialLatinRectangle {
    pub fn empty(k: usize, n: usize) -> Result<Self> {
        check_dims(k, n)?;
        Ok(Self { k, n, cells: vec![None; k * n], fill: 0 })
    }

    /// Validates a grid of optional 1-based symbols.
    pub fn from_rows<R: AsRef<[Option<u8>]>>(rows: &[R]) -> Result<Self> {
        let k = rows.len();
        let n = rows.first().map_or(0, |r| r.as_ref().len());
        let mut p = Self::empty(k, n)?;
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != n {
                return Err(Error::RaggedRow { row: i + 1, found: row.len(), expected: n });
            }
            for (j, s) in row.iter().enumerate() {
                if let Some(s) = *s {
                    p.place(i, j, s)?;
                }
            }
        }
        Ok(p)
    }

    /// Builds a pattern from `(row, col, symbol)` entries.
    pub fn from_entries<I: IntoIterator<Item = (usize, usize, u8)>>(k: usize, n: usize, entries: I) -> Result<Self> {
        let mut p = Self::empty(k, n)?;
        for (r, c, s) in entries {
            if r >= k {
                return Err(Error::IndexOutOfRange { index: r + 1, max: k });
            }
            if c >= n {
                return Err(Error::IndexOutOfRange { index: c + 1, max: n });
            }
            if p.cells[r * n + c].is_some() {
                return Err(Error::DomainError(format!("cell ({}, {}) given twice", r + 1, c + 1)));
            }
            p.place(r, c, s)?;
        }
        Ok(p)
    }

    fn place(&mut self, r: usize, c: usize, s: u8) -> Result<()> {
        let n = self.n;
        if s == 0 || s as usize > n {
            return Err(Error::OutOfRangeSymbol { row: r + 1, col: c + 1, symbol: s as usize, n });
        }
        let s0 = s - 1;
        if (0..n).any(|j| j != c && self.cells[r * n + j] == Some(s0)) {
            return Err(Error::RowRepeat(r + 1, s as usize));
        }
        if (0..self.k).any(|i| i != r && self.cells[i * n + c] == Some(s0)) {
            return Err(Error::ColumnRepeat(c + 1, s as usize));
        }
        if self.cells[r * n + c].replace(s0).is_none() {
            self.fill += 1;
        }
        Ok(())
    }

    /// A copy with one more entry; the cell must be empty.
    pub fn with_entry(&self, r: usize, c: usize, s: u8) -> Result<Self> {
        if r >= self.k || c >= self.n {
            return Err(Error::IndexOutOfRange { index: r.max(c) + 1, max: self.n });
        }
        if self.cells[r * self.n + c].is_some() {
            return Err(Error::DomainError(format!("cell ({}, {}) is already filled", r + 1, c + 1)));
        }
        let mut p = self.clone();
        p.place(r, c, s)?;
        Ok(p)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn fill_count(&self) -> usize {
        self.fill
    }

    /// Symbol (1-based) at `(r, c)`, if filled.
    pub fn get(&self, r: usize, c: usize) -> Option<u8> {
        self.cells[r * self.n + c].map(|s| s + 1)
    }

    /// Filled cells as `(row, col, symbol)` in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, u8)> + '_ {
        self.cells
            .iter()
            .enumerate()
            .filter_map(move |(idx, s)| s.map(|s| (idx / self.n, idx % self.n, s + 1)))
    }

    /// `self ⊆ other`: same shape, and every entry of `self` appears in `other`.
    pub fn is_subpattern_of(&self, other: &Self) -> bool {
        self.k == other.k
            && self.n == other.n
            && self.cells.iter().zip(&other.cells).all(|(a, b)| a.is_none() || a == b)
    }

    pub fn sparsity_profile(&self) -> SparsityProfile {
        let mut row_fills = vec![0; self.k];
        let mut col_fills = vec![0; self.n];
        let mut symbol_uses = vec![0; self.n];
        for (r, c, s) in self.entries() {
            row_fills[r] += 1;
            col_fills[c] += 1;
            symbol_uses[s as usize - 1] += 1;
        }
        let max_load = row_fills.iter().chain(&col_fills).chain(&symbol_uses).copied().max().unwrap_or(0);
        SparsityProfile { row_fills, col_fills, symbol_uses, max_load }
    }

    pub fn is_c_sparse(&self, c: usize) -> bool {
        self.sparsity_profile().max_load <= c
    }

    /// Matching `i` sends column `c` to the entry in cell `(i, c)`.
    pub fn to_matchings(&self) -> MatchingTuple {
        let matchings = (0..self.k).map(|i| self.cells[i * self.n..(i + 1) * self.n].to_vec()).collect();
        MatchingTuple { n: self.n, matchings }
    }
}

impl From<&LatinRectangle> for PartialLatinRectangle {
    fn from(l: &LatinRectangle) -> Self {
        l.to_partial()
    }
}

impl fmt::Display for PartialLatinRectangle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.k {
            let row: Vec<String> = (0..self.n)
                .map(|c| self.get(r, c).map_or_else(|| ".".to_string(), |s| s.to_string()))
                .collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

/// Per-row, per-column and per-symbol fill counts of a partial rectangle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SparsityProfile {
    pub row_fills: Vec<usize>,
    pub col_fills: Vec<usize>,
    pub symbol_uses: Vec<usize>,
    pub max_load: usize,
}

/// An edge of the complete bipartite graph between columns and symbols.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Edge {
    /// 0-based column.
    pub col: usize,
    /// Symbol in `1..=n`.
    pub symbol: u8,
}

impl Edge {
    pub fn new(col: usize, symbol: u8) -> Self {
        Self { col, symbol }
    }

    /// True iff the edges share a column or a symbol.
    pub fn meets(&self, other: &Edge) -> bool {
        self.col == other.col || self.symbol == other.symbol
    }
}

/// k pairwise edge-disjoint matchings between columns and symbols.
///
/// Matching `i` is stored as a map column -> symbol; a complete tuple (every
/// map total) is the same object as a Latin rectangle.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MatchingTuple {
    n: usize,
    // 0-based symbols
    matchings: Vec<Vec<Option<u8>>>,
}

impl MatchingTuple {
    /// Validates `k` maps column -> optional 1-based symbol.
    pub fn new(n: usize, maps: Vec<Vec<Option<u8>>>) -> Result<Self> {
        let k = maps.len();
        if k == 0 || n == 0 || n > MAX_ORDER {
            return Err(Error::InvalidDimensions { k, n, max: MAX_ORDER });
        }
        let mut matchings = Vec::with_capacity(k);
        let mut owner: Vec<Option<usize>> = vec![None; n * n];
        for (i, m) in maps.into_iter().enumerate() {
            if m.len() != n {
                return Err(Error::RaggedRow { row: i + 1, found: m.len(), expected: n });
            }
            let mut seen = 0u32;
            let mut conv = Vec::with_capacity(n);
            for (c, s) in m.into_iter().enumerate() {
                let s0 = match s {
                    None => {
                        conv.push(None);
                        continue;
                    }
                    Some(s) if s == 0 || s as usize > n => {
                        return Err(Error::OutOfRangeSymbol { row: i + 1, col: c + 1, symbol: s as usize, n })
                    }
                    Some(s) => s - 1,
                };
                if seen & (1 << s0) != 0 {
                    return Err(Error::NotInjective { matching: i + 1, symbol: s0 as usize + 1 });
                }
                seen |= 1 << s0;
                let slot = &mut owner[c * n + s0 as usize];
                if let Some(first) = *slot {
                    return Err(Error::DisjointnessViolated {
                        col: c + 1,
                        symbol: s0 as usize + 1,
                        first: first + 1,
                        second: i + 1,
                    });
                }
                *slot = Some(i);
                conv.push(Some(s0));
            }
            matchings.push(conv);
        }
        Ok(Self { n, matchings })
    }

    pub fn k(&self) -> usize {
        self.matchings.len()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Symbol matched to column `col` in matching `i`.
    pub fn get(&self, i: usize, col: usize) -> Option<u8> {
        self.matchings[i][col].map(|s| s + 1)
    }

    pub(crate) fn get0(&self, i: usize, col: usize) -> Option<u8> {
        self.matchings[i][col]
    }

    /// Number of edges in matching `i`.
    pub fn size(&self, i: usize) -> usize {
        self.matchings[i].iter().filter(|s| s.is_some()).count()
    }

    pub fn edges(&self, i: usize) -> impl Iterator<Item = Edge> + '_ {
        self.matchings[i].iter().enumerate().filter_map(|(c, s)| s.map(|s| Edge::new(c, s + 1)))
    }

    /// The matching holding `e`, if any.
    pub fn owner_of(&self, e: Edge) -> Option<usize> {
        let s0 = e.symbol.checked_sub(1)?;
        self.matchings.iter().position(|m| m.get(e.col).copied().flatten() == Some(s0))
    }

    pub fn is_complete(&self) -> bool {
        self.matchings.iter().all(|m| m.iter().all(Option::is_some))
    }

    /// Union has maximum degree at most `c` and every matching has at most `c` edges.
    pub fn is_c_sparse(&self, c: usize) -> bool {
        let mut col_deg = vec![0usize; self.n];
        let mut sym_deg = vec![0usize; self.n];
        for m in &self.matchings {
            let mut size = 0;
            for (col, s) in m.iter().enumerate() {
                if let Some(s) = s {
                    col_deg[col] += 1;
                    sym_deg[*s as usize] += 1;
                    size += 1;
                }
            }
            if size > c {
                return false;
            }
        }
        col_deg.iter().chain(&sym_deg).all(|&d| d <= c)
    }

    pub fn to_partial(&self) -> PartialLatinRectangle {
        let k = self.k();
        let mut cells = Vec::with_capacity(k * self.n);
        for m in &self.matchings {
            cells.extend_from_slice(m);
        }
        let fill = cells.iter().filter(|s| s.is_some()).count();
        PartialLatinRectangle { k, n: self.n, cells, fill }
    }

    /// Replaces matching `j` by its symmetric difference with `edges`.
    ///
    /// Fails unless the result is again a matching that is edge-disjoint from
    /// the others; flipping the same edge set twice restores the tuple.
    pub fn flip(&self, j: usize, edges: &[Edge]) -> Result<Self> {
        if j >= self.k() {
            return Err(Error::IndexOutOfRange { index: j + 1, max: self.k() });
        }
        let n = self.n;
        let mut pairs: BTreeSet<(usize, u8)> =
            self.matchings[j].iter().enumerate().filter_map(|(c, s)| s.map(|s| (c, s))).collect();
        for e in edges {
            if e.col >= n || e.symbol == 0 || e.symbol as usize > n {
                return Err(Error::IndexOutOfRange { index: e.col + 1, max: n });
            }
            let key = (e.col, e.symbol - 1);
            if !pairs.remove(&key) {
                pairs.insert(key);
            }
        }
        let mut map = vec![None; n];
        for (c, s) in pairs {
            if map[c].is_some() {
                return Err(Error::NotInjective { matching: j + 1, symbol: s as usize + 1 });
            }
            map[c] = Some(s + 1);
        }
        let mut maps: Vec<Vec<Option<u8>>> =
            self.matchings.iter().map(|m| m.iter().map(|s| s.map(|s| s + 1)).collect()).collect();
        maps[j] = map;
        Self::new(n, maps)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rect(rows: &[&[u8]]) -> LatinRectangle {
        LatinRectangle::from_rows(rows).unwrap()
    }

    #[test]
    fn validate_examples() {
        assert!(LatinRectangle::from_rows(&[[1u8, 2], [2, 1]]).is_ok());
        assert!(LatinRectangle::from_rows(&[[1u8, 2, 3], [2, 3, 1]]).is_ok());
        assert_eq!(LatinRectangle::from_rows(&[[1u8, 2, 3], [2, 1, 3]]), Err(Error::ColumnRepeat(3, 3)));
        assert_eq!(LatinRectangle::from_rows(&[[1u8, 1, 3]]), Err(Error::RowNotPermutation(1)));
        assert!(matches!(LatinRectangle::from_rows(&[[1u8, 4, 3]]), Err(Error::OutOfRangeSymbol { symbol: 4, .. })));
        assert!(matches!(
            LatinRectangle::from_rows(&[[1u8, 2], [2, 1], [1, 2]]),
            Err(Error::InvalidDimensions { .. })
        ));
    }

    #[test]
    fn validate_partial_examples() {
        let p = PartialLatinRectangle::empty(3, 4).unwrap();
        assert_eq!(p.fill_count(), 0);
        let l = rect(&[&[1, 2, 3], &[2, 3, 1]]);
        assert_eq!(l.to_partial().fill_count(), 6);
        let bad = PartialLatinRectangle::from_rows(&[[Some(1u8), None, Some(1)]]);
        assert_eq!(bad, Err(Error::RowRepeat(1, 1)));
        let bad = PartialLatinRectangle::from_rows(&[[Some(2u8), None, None], [Some(2), None, None]]);
        assert_eq!(bad, Err(Error::ColumnRepeat(1, 2)));
    }

    #[test]
    fn sparsity_examples() {
        let p = PartialLatinRectangle::empty(2, 3).unwrap();
        let prof = p.sparsity_profile();
        assert_eq!(prof.max_load, 0);
        assert!(prof.row_fills.iter().chain(&prof.col_fills).all(|&x| x == 0));

        let p = PartialLatinRectangle::from_entries(3, 5, (0..5).map(|c| (0, c, c as u8 + 1))).unwrap();
        let prof = p.sparsity_profile();
        assert_eq!(prof.row_fills, vec![5, 0, 0]);
        assert_eq!(prof.col_fills, vec![1; 5]);
        assert_eq!(prof.symbol_uses, vec![1; 5]);
        assert_eq!(prof.max_load, 5);

        let diag = PartialLatinRectangle::from_entries(3, 5, (0..3).map(|i| (i, i, i as u8 + 1))).unwrap();
        assert_eq!(diag.sparsity_profile().max_load, 1);
        assert!(diag.is_c_sparse(1));
        assert!(!p.is_c_sparse(4));
    }

    #[test]
    fn matchings_examples() {
        let l = rect(&[&[1, 2], &[2, 1]]);
        let t = l.to_matchings();
        assert_eq!((t.get(0, 0), t.get(0, 1)), (Some(1), Some(2)));
        assert_eq!((t.get(1, 0), t.get(1, 1)), (Some(2), Some(1)));
        assert_eq!(LatinRectangle::from_matchings(&t).unwrap(), l);

        let l = rect(&[&[1, 2, 3], &[2, 3, 1]]);
        let t = l.to_matchings();
        assert_eq!(t.edges(1).collect::<Vec<_>>(), vec![Edge::new(0, 2), Edge::new(1, 3), Edge::new(2, 1)]);
    }

    #[test]
    fn from_matchings_errors() {
        let shared = MatchingTuple::new(2, vec![vec![Some(1), Some(2)], vec![Some(1), None]]);
        assert_eq!(shared, Err(Error::DisjointnessViolated { col: 1, symbol: 1, first: 1, second: 2 }));
        let partial = MatchingTuple::new(2, vec![vec![Some(1), None]]).unwrap();
        assert_eq!(LatinRectangle::from_matchings(&partial), Err(Error::IncompleteTuple(1)));
        assert!(matches!(
            MatchingTuple::new(2, vec![vec![Some(1), Some(1)]]),
            Err(Error::NotInjective { matching: 1, symbol: 1 })
        ));
    }

    #[test]
    fn contains_examples() {
        let l = rect(&[&[1, 2], &[2, 1]]);
        assert!(l.contains(&PartialLatinRectangle::empty(2, 2).unwrap()).unwrap());
        assert!(l.contains(&l.to_partial()).unwrap());
        let p = PartialLatinRectangle::from_entries(2, 2, [(0, 0, 2)]).unwrap();
        assert!(!l.contains(&p).unwrap());
        let wrong = PartialLatinRectangle::empty(1, 2).unwrap();
        assert!(matches!(l.contains(&wrong), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn restrict_examples() {
        let l = rect(&[&[1, 2, 3], &[2, 3, 1]]);
        assert_eq!(l.restrict_rows(0..2).unwrap(), l);
        assert_eq!(l.restrict_rows([1]).unwrap(), rect(&[&[2, 3, 1]]));
        assert_eq!(l.restrict_rows([1, 0, 1]).unwrap(), l);
        assert_eq!(l.restrict_rows([]), Err(Error::EmptySelection));
        assert_eq!(l.restrict_rows([2]), Err(Error::IndexOutOfRange { index: 3, max: 2 }));
    }

    #[test]
    fn flip_twice_is_identity() {
        // 1 2 3 4 / 2 1 4 3: symbols 1 and 3 both have free columns, giving an
        // alternating cycle for row 1 through columns 1 and 3.
        let l = rect(&[&[1, 2, 3, 4], &[2, 1, 4, 3]]);
        let t = l.to_matchings();
        let cycle = [Edge::new(0, 1), Edge::new(0, 3), Edge::new(2, 3), Edge::new(2, 1)];
        let once = t.flip(0, &cycle).unwrap();
        assert_ne!(once, t);
        assert_eq!(LatinRectangle::from_matchings(&once).unwrap().row(0), vec![3, 2, 1, 4]);
        assert_eq!(once.flip(0, &cycle).unwrap(), t);
        // Using an edge of row 2 breaks disjointness.
        assert!(t.flip(0, &[Edge::new(0, 1), Edge::new(0, 2)]).is_err());
    }
}
