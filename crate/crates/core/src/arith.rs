//! Small-integer helpers shared across modules.

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Largest `v` with `p^v | n`. `n` must be nonzero and `p ≥ 2`.
pub fn valuation(mut n: u64, p: u64) -> u32 {
    debug_assert!(n != 0 && p >= 2);
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

/// Distinct prime divisors in increasing order.
pub fn prime_divisors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Positive divisors in increasing order.
pub fn divisors(n: u64) -> Vec<u64> {
    (1..=n).filter(|d| n % d == 0).collect()
}

/// Whether some sub-multiset of `parts` sums to exactly `target`.
pub fn has_subset_sum(parts: &[u64], target: u64) -> bool {
    let Ok(target) = usize::try_from(target) else {
        return false;
    };
    let mut reachable = vec![false; target + 1];
    reachable[0] = true;
    for &p in parts {
        let Ok(p) = usize::try_from(p) else { continue };
        if p > target {
            continue;
        }
        for s in (p..=target).rev() {
            if reachable[s - p] {
                reachable[s] = true;
            }
        }
    }
    reachable[target]
}

/// All partitions of `n` into parts from `allowed`, each in non-increasing
/// order. The list is sorted lexicographically, so `[1, 1, ..]` comes first
/// and `[n]` (when allowed) last.
pub fn partitions_with_parts(n: u64, allowed: &[u64]) -> Vec<Vec<u64>> {
    fn go(rest: u64, max: u64, allowed: &[u64], cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if rest == 0 {
            out.push(cur.clone());
            return;
        }
        for &a in allowed.iter().rev() {
            if a == 0 || a > max || a > rest {
                continue;
            }
            cur.push(a);
            go(rest - a, a, allowed, cur, out);
            cur.pop();
        }
    }
    let mut allowed: Vec<u64> = allowed.to_vec();
    allowed.sort_unstable();
    allowed.dedup();
    let mut out = Vec::new();
    go(n, n, &allowed, &mut Vec::new(), &mut out);
    out.sort();
    out
}
