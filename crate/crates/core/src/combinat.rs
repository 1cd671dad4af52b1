//! Ordered compositions with nonnegative parts.

/// All `parts`-tuples of nonnegative integers summing to `total`, in
/// lexicographic order. Empty when `total < 0`.
pub fn weak_compositions(total: i64, parts: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    if total < 0 {
        return out;
    }
    if parts == 0 {
        if total == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    let mut current = Vec::with_capacity(parts);
    fill(total as u32, parts, &mut current, &mut out);
    out
}

fn fill(remaining: u32, parts: usize, current: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if parts == 1 {
        current.push(remaining);
        out.push(current.clone());
        current.pop();
        return;
    }
    for first in 0..=remaining {
        current.push(first);
        fill(remaining - first, parts - 1, current, out);
        current.pop();
    }
}

/// Compositions of `n` into positive parts, at most `max_parts` of them.
pub fn positive_compositions(n: usize, max_parts: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::new();
    positive_fill(n, max_parts, &mut current, &mut out);
    out
}

fn positive_fill(
    remaining: usize,
    max_parts: usize,
    current: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if remaining == 0 {
        if !current.is_empty() {
            out.push(current.clone());
        }
        return;
    }
    if current.len() == max_parts {
        return;
    }
    for first in 1..=remaining {
        current.push(first);
        positive_fill(remaining - first, max_parts, current, out);
        current.pop();
    }
}
