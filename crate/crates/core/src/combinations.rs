//! Lexicographic enumeration of index subsets.

/// Binomial coefficient, saturating at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Calls `visit` on every `k`-subset of `0..n` whose smallest element is
/// `first`, in lexicographic order. For `k == 0` the empty set is visited
/// once, regardless of `first`.
pub fn for_each_with_first<F: FnMut(&[usize])>(n: usize, k: usize, first: usize, mut visit: F) {
    if k == 0 {
        visit(&[]);
        return;
    }
    if first + k > n {
        return;
    }
    let mut idx: Vec<usize> = (first..first + k).collect();
    loop {
        visit(&idx);
        // advance positions 1..k; position 0 stays pinned to `first`
        let mut pos = k;
        loop {
            if pos <= 1 {
                return;
            }
            pos -= 1;
            if idx[pos] < n - (k - pos) {
                break;
            }
        }
        idx[pos] += 1;
        for i in pos + 1..k {
            idx[i] = idx[i - 1] + 1;
        }
    }
}

/// Calls `visit` on every `k`-subset of `0..n` in lexicographic order.
pub fn for_each<F: FnMut(&[usize])>(n: usize, k: usize, mut visit: F) {
    if k == 0 {
        visit(&[]);
        return;
    }
    for first in 0..n {
        for_each_with_first(n, k, first, &mut visit);
    }
}

/// First elements that start at least one `k`-subset of `0..n`.
pub fn first_indices(n: usize, k: usize) -> std::ops::Range<usize> {
    if k == 0 {
        0..1
    } else if k > n {
        0..0
    } else {
        0..n - k + 1
    }
}
