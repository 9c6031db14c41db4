//! Independent oracles shared by the integration tests. Nothing here calls
//! into the library's numerics.

#![allow(dead_code)]

use std::collections::HashSet;

/// `e^{-μ} Σ_{i ≥ j} μ^i / i!`, summed directly so there is no cancellation.
pub fn tail(j: usize, mu: f64) -> f64 {
    let mut term = (-mu).exp();
    for i in 1..=j {
        term *= mu / i as f64;
    }
    let mut sum = 0.0;
    let mut i = j;
    while term > 1e-300 && (sum == 0.0 || term > sum * 1e-18) {
        sum += term;
        i += 1;
        term *= mu / i as f64;
    }
    sum
}

pub fn h(k: usize, mu: f64) -> f64 {
    mu / tail(k - 1, mu)
}

/// Golden-section minimiser of `h_k`; returns `(argmin, min)`.
pub fn golden_min_h(k: usize) -> (f64, f64) {
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (0.05, 30.0);
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let (mut fc, mut fd) = (h(k, c), h(k, d));
    while b - a > 1e-13 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = h(k, c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = h(k, d);
        }
    }
    let x = 0.5 * (a + b);
    (x, h(k, x))
}

/// All perfect matchings of `0..points`, each as a list of pairs.
pub fn all_matchings(points: usize) -> Vec<Vec<(usize, usize)>> {
    fn rec(free: &mut Vec<usize>, cur: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
        if free.is_empty() {
            out.push(cur.clone());
            return;
        }
        let a = free.remove(0);
        for i in 0..free.len() {
            let b = free.remove(i);
            cur.push((a, b));
            rec(free, cur, out);
            cur.pop();
            free.insert(i, b);
        }
        free.insert(0, a);
    }
    let mut out = Vec::new();
    rec(&mut (0..points).collect(), &mut Vec::new(), &mut out);
    out
}

/// Bin of each point when vertex `v` owns `degrees[v]` consecutive points.
pub fn point_owner(degrees: &[usize]) -> Vec<usize> {
    degrees.iter().enumerate().flat_map(|(v, &d)| std::iter::repeat(v).take(d)).collect()
}

pub fn double_factorial_odd(points: usize) -> u128 {
    if points % 2 == 1 {
        return 0;
    }
    (1..points as u128).step_by(2).product::<u128>().max(1)
}

fn binom(n: usize, r: usize) -> u128 {
    if r > n {
        return 0;
    }
    (0..r).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Number of pairings on `s` labelled vertices of degree `d` whose
/// multigraph is connected, for `s = 0..=n`.
pub fn connected_pairings(d: usize, n: usize) -> Vec<u128> {
    let total: Vec<u128> = (0..=n).map(|s| double_factorial_odd(d * s)).collect();
    let mut conn = vec![0u128; n + 1];
    for s in 1..=n {
        // Split off the component of the first vertex.
        let others: u128 = (1..s).map(|j| binom(s - 1, j - 1) * conn[j] * total[s - j]).sum();
        conn[s] = total[s] - others;
    }
    conn
}

/// Exact law of the size of the component containing a uniform edge of the
/// `d`-regular pairing multigraph on `n` vertices.
pub fn edge_component_law(d: usize, n: usize) -> Vec<f64> {
    let conn = connected_pairings(d, n);
    let total_n = double_factorial_odd(d * n) as f64;
    let edges = (d * n / 2) as f64;
    (0..=n)
        .map(|j| {
            if j == 0 {
                return 0.0;
            }
            let comps = binom(n, j) as f64 * conn[j] as f64 * double_factorial_odd(d * (n - j)) as f64
                / total_n;
            comps * (d * j / 2) as f64 / edges
        })
        .collect()
}

/// Sorted degree sequences of all simple graphs on `n` vertices.
pub fn realizable_sequences(n: usize) -> HashSet<Vec<i64>> {
    let pairs: Vec<(usize, usize)> =
        (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    let mut out = HashSet::new();
    for mask in 0u64..(1u64 << pairs.len()) {
        let mut deg = vec![0i64; n];
        for (b, &(u, v)) in pairs.iter().enumerate() {
            if mask >> b & 1 == 1 {
                deg[u] += 1;
                deg[v] += 1;
            }
        }
        deg.sort_unstable();
        out.insert(deg);
    }
    out
}

/// Size of the component containing `start`.
pub fn component_of(n: usize, edges: &[(usize, usize)], start: usize) -> usize {
    let mut seen = vec![false; n];
    let mut stack = vec![start];
    seen[start] = true;
    let mut size = 0;
    while let Some(v) = stack.pop() {
        size += 1;
        for &(a, b) in edges {
            for (x, y) in [(a, b), (b, a)] {
                if x == v && !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
    }
    size
}
