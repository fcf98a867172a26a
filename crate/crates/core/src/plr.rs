//! The `.plr` text format.
//!
//! ```text
//! # optional comment lines
//! 2 3
//! 1 . 3
//! . 1 .
//! ```
//!
//! The first non-comment line is `k n`, followed by `k` lines of `n`
//! whitespace-separated tokens, each a symbol in `1..=n` or `.` for an empty
//! cell. Lines starting with `#` are ignored. The file must end with a newline.
//! Several blocks separated by blank lines form a stream (see
//! [`parse_blocks`]).

use crate::error::{Error, Result};
use crate::rectangle::{LatinRectangle, PartialLatinRectangle};

fn perr(line: usize, col: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, col, msg: msg.into() }
}

/// Splits a line into tokens with their 1-based starting column.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s + 1, &line[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &line[s..]));
    }
    out
}

fn parse_usize(line: usize, col: usize, tok: &str, what: &str) -> Result<usize> {
    if !tok.bytes().all(|b| b.is_ascii_digit()) {
        return Err(perr(line, col, format!("expected {what}, found {tok:?}")));
    }
    tok.parse().map_err(|_| perr(line, col, format!("{what} {tok:?} is out of range")))
}

/// Parses one block from `lines` (1-based line numbers attached).
fn parse_block<'a, I>(lines: &mut std::iter::Peekable<I>) -> Result<PartialLatinRectangle>
where
    I: Iterator<Item = (usize, &'a str)>,
{
    let (hline, header) = lines.next().ok_or_else(|| perr(1, 1, "missing header line \"k n\""))?;
    let htoks = tokens(header);
    if htoks.len() != 2 {
        let col = htoks.get(2).map_or(1, |t| t.0);
        return Err(perr(hline, col, "header must be exactly \"k n\""));
    }
    let k = parse_usize(hline, htoks[0].0, htoks[0].1, "row count")?;
    let n = parse_usize(hline, htoks[1].0, htoks[1].1, "side length")?;
    let mut p = PartialLatinRectangle::empty(k, n).map_err(|e| perr(hline, 1, e.to_string()))?;
    for r in 0..k {
        let (lno, text) = lines.next().ok_or_else(|| perr(hline + r + 1, 1, format!("expected {k} rows, found {r}")))?;
        let toks = tokens(text);
        if toks.len() != n {
            let col = toks.get(n).map_or(text.len() + 1, |t| t.0);
            return Err(perr(lno, col, format!("expected {n} tokens, found {}", toks.len())));
        }
        for (c, (col, tok)) in toks.into_iter().enumerate() {
            if tok == "." {
                continue;
            }
            let s = parse_usize(lno, col, tok, "symbol or '.'")?;
            if s == 0 || s > n {
                return Err(perr(lno, col, format!("symbol {s} outside 1..={n}")));
            }
            p = p.with_entry(r, c, s as u8).map_err(|e| perr(lno, col, e.to_string()))?;
        }
    }
    Ok(p)
}

fn content_lines(text: &str) -> Result<Vec<(usize, &str)>> {
    if !text.is_empty() && !text.ends_with('\n') {
        let last = text.lines().count();
        return Err(perr(last, text.lines().last().map_or(1, |l| l.len() + 1), "missing trailing newline"));
    }
    Ok(text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.strip_suffix('\r').unwrap_or(l)))
        .filter(|(_, l)| !l.starts_with('#'))
        .collect())
}

/// Parses a single `.plr` document.
pub fn parse(text: &str) -> Result<PartialLatinRectangle> {
    let lines = content_lines(text)?;
    if let Some(&(lno, _)) = lines.iter().find(|(_, l)| l.trim().is_empty()) {
        return Err(perr(lno, 1, "unexpected blank line"));
    }
    let mut it = lines.into_iter().peekable();
    let p = parse_block(&mut it)?;
    if let Some((lno, _)) = it.next() {
        return Err(perr(lno, 1, "unexpected content after the last row"));
    }
    Ok(p)
}

/// Parses a `.plr` document whose cells are all filled.
pub fn parse_rectangle(text: &str) -> Result<LatinRectangle> {
    let p = parse(text)?;
    if p.fill_count() != p.k() * p.n() {
        return Err(perr(1, 1, "rectangle has empty cells"));
    }
    let rows: Vec<Vec<u8>> = (0..p.k()).map(|r| (0..p.n()).map(|c| p.get(r, c).unwrap()).collect()).collect();
    LatinRectangle::from_rows(&rows)
}

/// Parses a stream of blocks separated by blank lines.
pub fn parse_blocks(text: &str) -> Result<Vec<PartialLatinRectangle>> {
    let lines = content_lines(text)?;
    let mut out = Vec::new();
    let mut it = lines.into_iter().filter(|(_, l)| !l.trim().is_empty()).peekable();
    while it.peek().is_some() {
        out.push(parse_block(&mut it)?);
    }
    Ok(out)
}

pub fn format_partial(p: &PartialLatinRectangle) -> String {
    format!("{} {}\n{}", p.k(), p.n(), p)
}

pub fn format_rectangle(l: &LatinRectangle) -> String {
    format!("{} {}\n{}", l.k(), l.n(), l)
}
