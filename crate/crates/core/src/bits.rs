/// All `s`-element subsets of `{0, .., n-1}` as bitmasks, in increasing
/// numeric order (Gosper's hack).
pub(crate) fn subsets_of_size(n: usize, s: usize) -> impl Iterator<Item = u64> {
    debug_assert!(n <= 63);
    let end = 1u64 << n;
    let mut next = if s > n { None } else { Some((1u64 << s) - 1) };
    std::iter::from_fn(move || {
        let x = next?;
        next = if x == 0 {
            None
        } else {
            let c = x & x.wrapping_neg();
            let r = x + c;
            let y = (((r ^ x) >> 2) / c) | r;
            (y < end).then_some(y)
        };
        Some(x)
    })
}

/// Set bits of `mask`, lowest first.
pub(crate) fn ones(mut mask: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            return None;
        }
        let i = mask.trailing_zeros() as usize;
        mask &= mask - 1;
        Some(i)
    })
}

pub(crate) fn binomial(n: usize, k: usize) -> num_bigint::BigUint {
    use num_traits::One;
    if k > n {
        return num_bigint::BigUint::default();
    }
    let k = k.min(n - k);
    (0..k).fold(num_bigint::BigUint::one(), |acc, i| acc * (n - i) / (i + 1))
}
