//! Random multigraph and graph generators.

use std::collections::HashSet;

use rand::Rng;

use crate::degseq::{self, DegreeSampler, DegreeSequence};
use crate::error::{Error, Result};
use crate::graph::{canonical, Multigraph};

/// Points grouped into bins of sizes `d_1, ..., d_n`, together with a
/// perfect matching on the points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pairing {
    /// Vertex owning each point; bin `i` holds a contiguous run of points.
    pub bin_of: Vec<u32>,
    /// Matched point pairs.
    pub matching: Vec<(u32, u32)>,
}

impl Pairing {
    pub fn n_points(&self) -> usize {
        self.bin_of.len()
    }

    /// Contract every bin to a vertex.
    pub fn contract(&self, n: usize) -> Multigraph {
        Multigraph::new(
            n,
            self.matching
                .iter()
                .map(|&(a, b)| (self.bin_of[a as usize], self.bin_of[b as usize])),
        )
    }
}

/// `bin_of` for a degree sequence: the points of vertex `i` are contiguous.
pub(crate) fn bin_layout(degrees: &[usize]) -> Vec<u32> {
    degrees
        .iter()
        .enumerate()
        .flat_map(|(v, &d)| std::iter::repeat(v as u32).take(d))
        .collect()
}

/// Incremental Fisher–Yates shuffle that emits consecutive pairs, i.e. a
/// uniform perfect matching revealed one edge at a time.
struct MatchingStream {
    points: Vec<u32>,
    pos: usize,
}

impl MatchingStream {
    fn new(n_points: usize) -> Self {
        Self {
            points: (0..n_points as u32).collect(),
            pos: 0,
        }
    }

    fn next_pair<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Option<(u32, u32)> {
        let len = self.points.len();
        if self.pos + 1 >= len {
            return None;
        }
        for p in [self.pos, self.pos + 1] {
            let j = rng.gen_range(p..len);
            self.points.swap(p, j);
        }
        self.pos += 2;
        Some((self.points[self.pos - 2], self.points[self.pos - 1]))
    }
}

/// Configuration-model multigraph `G(d)`: a uniform perfect matching on
/// `2m` points, contracted bin by bin.
pub fn pairing_multigraph<R: Rng + ?Sized>(
    d: &DegreeSequence,
    rng: &mut R,
) -> (Pairing, Multigraph) {
    let bin_of = bin_layout(d.degrees());
    let mut stream = MatchingStream::new(bin_of.len());
    let mut matching = Vec::with_capacity(d.m());
    while let Some(pair) = stream.next_pair(rng) {
        matching.push(pair);
    }
    let pairing = Pairing { bin_of, matching };
    let g = pairing.contract(d.n());
    (pairing, g)
}

/// Same law as [`pairing_multigraph`] conditioned on simplicity: returns
/// `None` as soon as a loop or a repeated edge is revealed.
pub fn pairing_simple_or_abort<R: Rng + ?Sized>(
    d: &DegreeSequence,
    rng: &mut R,
) -> Option<Multigraph> {
    let degrees = d.degrees();
    let bin_of = bin_layout(degrees);
    let mut offsets = Vec::with_capacity(degrees.len() + 1);
    offsets.push(0usize);
    for &x in degrees {
        offsets.push(offsets.last().unwrap() + x);
    }
    let mut fill = vec![0usize; degrees.len()];
    let mut adj = vec![0u32; bin_of.len()];
    let mut edges = Vec::with_capacity(d.m());
    let mut stream = MatchingStream::new(bin_of.len());
    while let Some((a, b)) = stream.next_pair(rng) {
        let (u, v) = (bin_of[a as usize], bin_of[b as usize]);
        if u == v {
            return None;
        }
        let (s, t) = if fill[u as usize] <= fill[v as usize] {
            (u, v)
        } else {
            (v, u)
        };
        let start = offsets[s as usize];
        if adj[start..start + fill[s as usize]].contains(&t) {
            return None;
        }
        for (x, y) in [(u, v), (v, u)] {
            adj[offsets[x as usize] + fill[x as usize]] = y;
            fill[x as usize] += 1;
        }
        edges.push((u, v));
    }
    Some(Multigraph::new(degrees.len(), edges))
}

/// Allocation model restricted to k-cores: a uniform degree sequence in
/// `D_k(n, m)` (allocation law) followed by a uniform pairing.
pub fn allocation_kcore<R: Rng + ?Sized>(
    k: usize,
    n: usize,
    m: usize,
    rng: &mut R,
) -> Result<Multigraph> {
    let d = degseq::sample_degree_sequence(k, n, m, rng)?;
    Ok(pairing_multigraph(&d, rng).1)
}

/// [`allocation_kcore`] with a prepared degree sampler.
pub fn allocation_kcore_from<R: Rng + ?Sized>(sampler: &DegreeSampler, rng: &mut R) -> Result<Multigraph> {
    let d = sampler.sample(rng)?;
    Ok(pairing_multigraph(&d, rng).1)
}

/// Uniform simple graph on `n` vertices with `m` edges.
pub fn gnm<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Result<Multigraph> {
    let pairs = n * n.saturating_sub(1) / 2;
    if m > pairs {
        return Err(Error::Precondition(format!(
            "G(n,m) needs m <= C(n,2) = {pairs}, got m = {m}"
        )));
    }
    // Sample whichever of the edge set and its complement is smaller.
    let complement = m > pairs / 2;
    let target = if complement { pairs - m } else { m };
    let mut chosen: HashSet<(u32, u32)> = HashSet::with_capacity(target);
    while chosen.len() < target {
        let u = rng.gen_range(0..n as u32);
        let v = rng.gen_range(0..n as u32);
        if u != v {
            chosen.insert(canonical(u, v));
        }
    }
    if complement {
        let n32 = n as u32;
        let all = (0..n32).flat_map(|u| (u + 1..n32).map(move |v| (u, v)));
        Ok(Multigraph::new(n, all.filter(|e| !chosen.contains(e))))
    } else {
        Ok(Multigraph::new(n, chosen))
    }
}

pub fn is_simple(g: &Multigraph) -> bool {
    g.is_simple()
}

/// Leading-order probability that the pairing model on `d` is simple:
/// `exp(−η/2 − η²/4)`.
pub fn simplicity_probability(d: &DegreeSequence) -> f64 {
    simplicity_probability_from_eta(degseq::degree_stats(d).eta)
}

pub fn simplicity_probability_from_eta(eta: f64) -> f64 {
    (-eta / 2.0 - eta * eta / 4.0).exp()
}

/// Uniform simple k-core on `n` vertices with `m` edges, by rejecting
/// non-simple draws of the allocation model.
pub fn uniform_simple_kcore<R: Rng + ?Sized>(
    k: usize,
    n: usize,
    m: usize,
    rng: &mut R,
    max_retries: u64,
) -> Result<Multigraph> {
    if k * n > 2 * m {
        return Err(Error::Precondition(format!(
            "no simple {k}-core with n = {n}, m = {m}"
        )));
    }
    let sampler = DegreeSampler::new(k, n, m, degseq::default_retry_cap(n))?;
    simple_kcore_from(&sampler, rng, max_retries)
}

/// [`uniform_simple_kcore`] with a prepared degree sampler.
pub fn simple_kcore_from<R: Rng + ?Sized>(
    sampler: &DegreeSampler,
    rng: &mut R,
    max_retries: u64,
) -> Result<Multigraph> {
    let (k, n, m) = (sampler.k(), sampler.n(), sampler.m());
    if 2 * m > n * n.saturating_sub(1) {
        return Err(Error::Precondition(format!(
            "no simple {k}-core with n = {n}, m = {m}"
        )));
    }
    for _ in 0..max_retries {
        let d = sampler.sample(rng)?;
        if let Some(g) = pairing_simple_or_abort(&d, rng) {
            return Ok(g);
        }
    }
    Err(Error::RetryCap {
        what: "rejecting non-simple k-cores",
        cap: max_retries,
    })
}

/// `[x]_j = x (x−1) ... (x−j+1)`.
pub fn falling_factorial(x: f64, j: usize) -> f64 {
    (0..j).map(|i| x - i as f64).product()
}

/// Leading term of `P(L ⊆ G(d) | H ⊆ G(d))` for a uniform simple graph
/// with degree sequence `d`, where `H = explored` and `L = H ∪ extension`:
///
/// `Π_v [d_v − h_v]_{j_v} / (2^{|J|} [m]_{|J|})`.
///
/// Fails with [`Error::Precondition`] when `|J| > k`, when `J` overlaps `H`
/// or contains loops or repeats, when `H` exceeds `d`, or when no simple
/// graph with degree sequence `d` contains `H` while avoiding `J`.
pub fn conditional_edge_probability(
    d: &DegreeSequence,
    explored: &Multigraph,
    extension: &[(u32, u32)],
) -> Result<f64> {
    let n = d.n();
    if explored.n() != n {
        return Err(Error::Precondition(format!(
            "explored graph has {} vertices, degree sequence has {n}",
            explored.n()
        )));
    }
    if extension.len() > d.k() {
        return Err(Error::Precondition(format!(
            "extension has {} edges, more than k = {}",
            extension.len(),
            d.k()
        )));
    }
    if !explored.is_simple() {
        return Err(Error::Precondition("explored graph is not simple".into()));
    }
    let h_edges = explored.edge_set();
    let mut j_edges = HashSet::new();
    let mut j_deg = vec![0usize; n];
    for &(u, v) in extension {
        if u as usize >= n || v as usize >= n {
            return Err(Error::Precondition(format!("extension edge ({u}, {v}) out of range")));
        }
        if u == v {
            return Err(Error::Precondition(format!("extension contains a loop at {u}")));
        }
        let e = canonical(u, v);
        if h_edges.contains(&e) {
            return Err(Error::Precondition(format!("extension edge {e:?} already explored")));
        }
        if !j_edges.insert(e) {
            return Err(Error::Precondition(format!("extension repeats edge {e:?}")));
        }
        j_deg[u as usize] += 1;
        j_deg[v as usize] += 1;
    }
    let h_deg = explored.degrees();
    let mut residual = Vec::with_capacity(n);
    for v in 0..n {
        if h_deg[v] > d.degrees()[v] {
            return Err(Error::Precondition(format!(
                "explored degree {} exceeds d_{v} = {}",
                h_deg[v],
                d.degrees()[v]
            )));
        }
        residual.push((d.degrees()[v] - h_deg[v]) as i64);
    }
    let forbidden: Vec<(usize, usize)> = h_edges
        .iter()
        .chain(j_edges.iter())
        .map(|&(u, v)| (u as usize, v as usize))
        .collect();
    if !degseq::simple_graph_exists_avoiding(&residual, &forbidden) {
        return Err(Error::Precondition(
            "no simple graph with this degree sequence contains the explored graph and avoids the extension"
                .into(),
        ));
    }
    let numerator: f64 = (0..n)
        .map(|v| falling_factorial(residual[v] as f64, j_deg[v]))
        .product();
    let e = extension.len();
    Ok(numerator / (2f64.powi(e as i32) * falling_factorial(d.m() as f64, e)))
}

/// Probability that a uniform edge of the pairing model on `d` joins `u`
/// and `v` (`u ≠ v`): `d_u d_v / (m (2m − 1))`.
pub fn first_edge_probability_multigraph(d: &DegreeSequence, u: usize, v: usize) -> f64 {
    let m = d.m() as f64;
    (d.degrees()[u] * d.degrees()[v]) as f64 / (m * (2.0 * m - 1.0))
}

/// Leading-order probability that the current neighbourhood of an explored
/// vertex is exactly the given set: `ℓ! Π ď_{u_i} / (2^ℓ [m̌]_ℓ)`, where
/// `current_degrees` lists `ď_{u_i}` and `m̌` is the number of undeleted edges.
pub fn neighbor_set_probability(current_degrees: &[usize], current_edges: usize) -> f64 {
    let l = current_degrees.len();
    let fact: f64 = (1..=l).map(|i| i as f64).product();
    let prod: f64 = current_degrees.iter().map(|&x| x as f64).product();
    fact * prod / (2f64.powi(l as i32) * falling_factorial(current_edges as f64, l))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use std::collections::BTreeMap;

    /// All perfect matchings on `0..n_points`.
    fn all_matchings(n_points: usize) -> Vec<Vec<(u32, u32)>> {
        fn rec(free: &mut Vec<u32>, cur: &mut Vec<(u32, u32)>, out: &mut Vec<Vec<(u32, u32)>>) {
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
        rec(&mut (0..n_points as u32).collect(), &mut Vec::new(), &mut out);
        out
    }

    fn exact_multigraph_law(d: &DegreeSequence) -> BTreeMap<Vec<(u32, u32)>, f64> {
        let bin_of = bin_layout(d.degrees());
        let ms = all_matchings(bin_of.len());
        let mut law = BTreeMap::new();
        for m in &ms {
            let p = Pairing {
                bin_of: bin_of.clone(),
                matching: m.clone(),
            };
            *law.entry(p.contract(d.n()).edges().to_vec()).or_insert(0.0) += 1.0 / ms.len() as f64;
        }
        law
    }

    #[test]
    fn triple_edge_probability_on_two_bins() {
        let d = DegreeSequence::new(vec![3, 3], 3).unwrap();
        let law = exact_multigraph_law(&d);
        let triple = law[&vec![(0, 1), (0, 1), (0, 1)]];
        assert!((triple - 0.4).abs() < 1e-12);
        assert_eq!(all_matchings(6).len(), 15);
    }

    #[test]
    fn pairing_law_matches_enumeration() {
        for degrees in [vec![3, 3], vec![2, 2, 2], vec![3, 2, 2, 1], vec![4, 2, 2]] {
            let d = DegreeSequence::new(degrees, 1).unwrap();
            let law = exact_multigraph_law(&d);
            let trials = 100_000;
            let mut rng = seeded(d.m() as u64 + 17);
            let mut hits: BTreeMap<Vec<(u32, u32)>, usize> = BTreeMap::new();
            for _ in 0..trials {
                let (_, g) = pairing_multigraph(&d, &mut rng);
                *hits.entry(g.edges().to_vec()).or_default() += 1;
            }
            for (g, p) in &law {
                let got = *hits.get(g).unwrap_or(&0) as f64 / trials as f64;
                let se = (p * (1.0 - p) / trials as f64).sqrt();
                assert!((got - p).abs() <= 4.0 * se, "{g:?}: {got} vs {p}");
            }
            assert_eq!(hits.len(), law.len());
        }
    }

    #[test]
    fn single_bin_gives_a_loop() {
        let d = DegreeSequence::new(vec![2], 2).unwrap();
        let (p, g) = pairing_multigraph(&d, &mut seeded(0));
        assert_eq!(p.n_points(), 2);
        assert_eq!(g.edges(), &[(0, 0)]);
        assert_eq!(g.degrees(), vec![2]);
    }

    #[test]
    fn contraction_preserves_degrees() {
        let mut rng = seeded(3);
        for _ in 0..1000 {
            let d = degseq::sample_degree_sequence(3, 20, 37, &mut rng).unwrap();
            let (_, g) = pairing_multigraph(&d, &mut rng);
            assert_eq!(g.degrees(), d.degrees());
        }
    }

    #[test]
    fn allocation_examples() {
        let mut rng = seeded(4);
        for _ in 0..50 {
            let g = allocation_kcore(3, 2, 3, &mut rng).unwrap();
            assert_eq!(g.degrees(), vec![3, 3]);
            let g = allocation_kcore(3, 30, 55, &mut rng).unwrap();
            assert_eq!(g.degrees().iter().sum::<usize>(), 110);
            assert!(g.min_degree() >= 3);
        }
    }

    #[test]
    fn gnm_examples() {
        let mut rng = seeded(5);
        for _ in 0..20 {
            assert_eq!(gnm(3, 3, &mut rng).unwrap(), Multigraph::complete(3));
        }
        assert!(gnm(3, 4, &mut rng).is_err());
        for _ in 0..100 {
            let g = gnm(50, 120, &mut rng).unwrap();
            assert!(g.is_simple());
            assert_eq!(g.edge_count(), 120);
            let g = gnm(10, 40, &mut rng).unwrap();
            assert!(g.is_simple());
            assert_eq!(g.edge_count(), 40);
        }
    }

    #[test]
    fn gnm_single_edge_is_uniform() {
        let mut rng = seeded(6);
        let trials = 6000;
        let mut counts: BTreeMap<(u32, u32), usize> = BTreeMap::new();
        for _ in 0..trials {
            let g = gnm(4, 1, &mut rng).unwrap();
            *counts.entry(g.edges()[0]).or_default() += 1;
        }
        assert_eq!(counts.len(), 6);
        let expected = trials as f64 / 6.0;
        let chi2: f64 = counts
            .values()
            .map(|&o| (o as f64 - expected).powi(2) / expected)
            .sum();
        // 99th percentile of chi-square with 5 degrees of freedom.
        assert!(chi2 < 15.086, "chi2 = {chi2}");
    }

    #[test]
    fn simplicity_probability_examples() {
        assert_eq!(simplicity_probability_from_eta(0.0), 1.0);
        let d = DegreeSequence::new(vec![3; 10], 3).unwrap();
        assert!((simplicity_probability(&d) - (-2.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn simple_abort_agrees_with_full_pairing() {
        // Same seed: if the early-abort generator succeeds it must produce
        // the graph the full pairing would have produced.
        let d = DegreeSequence::new(vec![3; 12], 3).unwrap();
        for s in 0..200 {
            let full = pairing_multigraph(&d, &mut seeded(s)).1;
            match pairing_simple_or_abort(&d, &mut seeded(s)) {
                Some(g) => assert_eq!(g, full),
                None => assert!(!full.is_simple()),
            }
        }
    }

    #[test]
    fn uniform_simple_kcore_examples() {
        let mut rng = seeded(7);
        for _ in 0..20 {
            let g = uniform_simple_kcore(3, 4, 6, &mut rng, 10_000).unwrap();
            assert_eq!(g, Multigraph::complete(4));
        }
        assert!(uniform_simple_kcore(3, 4, 7, &mut rng, 10).is_err());
        for _ in 0..20 {
            let g = uniform_simple_kcore(3, 40, 70, &mut rng, 100_000).unwrap();
            assert!(g.is_simple() && g.min_degree() >= 3);
        }
    }

    #[test]
    fn uniform_simple_kcore_is_uniform_on_five_vertices() {
        // Labelled simple 3-cores on 5 vertices with 9 edges: K5 minus one edge.
        let all: Vec<(u32, u32)> = Multigraph::complete(5).edges().to_vec();
        let mut classes = Vec::new();
        for skip in 0..all.len() {
            let g = Multigraph::new(5, all.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &e)| e));
            if g.min_degree() >= 3 {
                classes.push(g);
            }
        }
        assert_eq!(classes.len(), 10);
        let mut rng = seeded(8);
        let trials = 5000;
        let mut counts: BTreeMap<Vec<(u32, u32)>, usize> = BTreeMap::new();
        for _ in 0..trials {
            let g = uniform_simple_kcore(3, 5, 9, &mut rng, 100_000).unwrap();
            *counts.entry(g.edges().to_vec()).or_default() += 1;
        }
        assert_eq!(counts.len(), 10);
        let expected = trials as f64 / 10.0;
        let chi2: f64 = counts.values().map(|&o| (o as f64 - expected).powi(2) / expected).sum();
        // 99th percentile of chi-square with 9 degrees of freedom.
        assert!(chi2 < 21.666, "chi2 = {chi2}");
    }

    #[test]
    fn conditional_probability_examples() {
        let n = 10;
        let d = DegreeSequence::new(vec![3; n], 3).unwrap();
        let h = Multigraph::empty(n);
        let p = conditional_edge_probability(&d, &h, &[(0, 1)]).unwrap();
        assert!((p - 9.0 / (2.0 * d.m() as f64)).abs() < 1e-15);
        assert_eq!(conditional_edge_probability(&d, &h, &[]).unwrap(), 1.0);
        assert!(conditional_edge_probability(&d, &h, &[(0, 0)]).is_err());
        assert!(conditional_edge_probability(&d, &h, &[(0, 1), (1, 0)]).is_err());
        assert!(conditional_edge_probability(&d, &h, &[(0, 1), (1, 2), (2, 3), (3, 4)]).is_err());
        // K4: every pair is an edge, so no realisation avoids (0, 1).
        let k4 = DegreeSequence::new(vec![3; 4], 3).unwrap();
        let err = conditional_edge_probability(&k4, &Multigraph::empty(4), &[(0, 1)]).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
        // With an explored edge 0-1 the residual degrees drop.
        let h = Multigraph::new(n, [(0, 1)]);
        let p = conditional_edge_probability(&d, &h, &[(0, 2)]).unwrap();
        assert!((p - 2.0 * 3.0 / (2.0 * d.m() as f64)).abs() < 1e-15);
    }

    #[test]
    fn first_edge_probability_matches_matching_enumeration() {
        let d = DegreeSequence::new(vec![3, 3], 3).unwrap();
        assert!((first_edge_probability_multigraph(&d, 0, 1) - 0.6).abs() < 1e-15);
        let bin_of = bin_layout(d.degrees());
        let ms = all_matchings(6);
        let mut p = 0.0;
        for m in &ms {
            let cross = m
                .iter()
                .filter(|&&(a, b)| bin_of[a as usize] != bin_of[b as usize])
                .count();
            p += cross as f64 / m.len() as f64 / ms.len() as f64;
        }
        assert!((p - 0.6).abs() < 1e-12);
    }

    #[test]
    fn neighbor_set_probability_single_neighbour() {
        assert!((neighbor_set_probability(&[3], 30) - 3.0 / 60.0).abs() < 1e-15);
        assert_eq!(neighbor_set_probability(&[], 30), 1.0);
    }
}
