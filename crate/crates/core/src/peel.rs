//! Deletion procedures: plain k-core peeling, the point-level cascade on
//! the pairing model, the vertex-level cascade on a graph, and the
//! heavy/light peel on the allocation model.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::degseq::{self, DegreeSequence};
use crate::error::{Error, Result};
use crate::graph::Multigraph;
use crate::ode::DomainSpec;

/// Vertices of the k-core of `g`.
pub fn core_membership(g: &Multigraph, k: usize) -> Vec<bool> {
    let (offsets, nbrs) = g.adjacency();
    let mut deg = g.degrees();
    let mut alive = vec![true; g.n()];
    let mut queue: Vec<usize> = (0..g.n()).filter(|&v| deg[v] < k).collect();
    for &v in &queue {
        alive[v] = false;
    }
    while let Some(v) = queue.pop() {
        for &w in &nbrs[offsets[v]..offsets[v + 1]] {
            let w = w as usize;
            if alive[w] {
                deg[w] -= 1;
                if deg[w] < k {
                    alive[w] = false;
                    queue.push(w);
                }
            }
        }
    }
    alive
}

/// The k-core of `g`, with surviving vertices relabelled `0..` in order.
pub fn kcore(g: &Multigraph, k: usize) -> Multigraph {
    g.induced_compact(&core_membership(g, k))
}

/// Incidence lists in CSR form: `(offsets, [(neighbour, edge index)])`.
fn incidence(g: &Multigraph) -> (Vec<usize>, Vec<(u32, u32)>) {
    let deg = g.degrees();
    let mut offsets = Vec::with_capacity(g.n() + 1);
    offsets.push(0);
    for d in &deg {
        offsets.push(offsets.last().unwrap() + d);
    }
    let mut fill = offsets[..g.n()].to_vec();
    let mut inc = vec![(0u32, 0u32); offsets[g.n()]];
    for (i, &(u, v)) in g.edges().iter().enumerate() {
        inc[fill[u as usize]] = (v, i as u32);
        fill[u as usize] += 1;
        inc[fill[v as usize]] = (u, i as u32);
        fill[v as usize] += 1;
    }
    (offsets, inc)
}

fn check_kcore_input(g: &Multigraph, k: usize) -> Result<()> {
    if g.edge_count() == 0 {
        return Err(Error::Precondition("graph has no edges".into()));
    }
    let min = g.min_degree();
    if min < k {
        return Err(Error::Precondition(format!(
            "graph is not a {k}-core: minimum degree {min}"
        )));
    }
    Ok(())
}

/// Number of vertices removed by peeling `g − e` down to its k-core,
/// where `e` is the edge at index `edge`.
pub fn w_after_removing(g: &Multigraph, k: usize, edge: usize) -> usize {
    let (offsets, inc) = incidence(g);
    let mut deg = g.degrees();
    let (u, v) = g.edges()[edge];
    deg[u as usize] -= 1;
    deg[v as usize] -= 1;
    let mut removed = vec![false; g.n()];
    let mut queue = Vec::new();
    for w in [u as usize, v as usize] {
        if !removed[w] && deg[w] < k {
            removed[w] = true;
            queue.push(w);
        }
    }
    let mut count = queue.len();
    while let Some(x) = queue.pop() {
        for &(y, e) in &inc[offsets[x]..offsets[x + 1]] {
            let y = y as usize;
            if e as usize == edge || removed[y] {
                continue;
            }
            deg[y] -= 1;
            if deg[y] < k {
                removed[y] = true;
                count += 1;
                queue.push(y);
            }
        }
    }
    count
}

/// `W(g)`: vertices lost from the k-core `g` when a uniform edge is removed.
pub fn w_statistic<R: Rng + ?Sized>(g: &Multigraph, k: usize, rng: &mut R) -> Result<usize> {
    check_kcore_input(g, k)?;
    let edge = rng.gen_range(0..g.edge_count());
    Ok(w_after_removing(g, k, edge))
}

/// Vertex-level cascade: remove a uniform edge, then repeatedly delete a
/// uniformly chosen marked vertex (degree below `k`), marking neighbours
/// that fall below `k`. Returns `(removed, loop iterations)`.
pub fn deletion_procedure_vertex<R: Rng + ?Sized>(
    g: &Multigraph,
    k: usize,
    rng: &mut R,
) -> Result<(usize, usize)> {
    check_kcore_input(g, k)?;
    let edge = rng.gen_range(0..g.edge_count());
    let (offsets, inc) = incidence(g);
    let mut deg = g.degrees();
    let (u, v) = g.edges()[edge];
    deg[u as usize] -= 1;
    deg[v as usize] -= 1;
    let mut marked = vec![false; g.n()];
    let mut deleted = vec![false; g.n()];
    let mut pending = Vec::new();
    for w in [u as usize, v as usize] {
        if !marked[w] && deg[w] < k {
            marked[w] = true;
            pending.push(w);
        }
    }
    let mut steps = 0;
    while !pending.is_empty() {
        let x = pending.swap_remove(rng.gen_range(0..pending.len()));
        deleted[x] = true;
        steps += 1;
        for &(y, e) in &inc[offsets[x]..offsets[x + 1]] {
            let y = y as usize;
            if e as usize == edge || deleted[y] {
                continue;
            }
            deg[y] -= 1;
            if !marked[y] && deg[y] < k {
                marked[y] = true;
                pending.push(y);
            }
        }
    }
    Ok((steps, steps))
}

/// How the point-level procedure ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// Every point was deleted: the k-core of `G(d) − e` is empty.
    ExhaustedCoreEmpty,
    /// No marked points remain and a non-empty core survives.
    CascadeStopped,
}

impl Termination {
    pub fn as_str(self) -> &'static str {
        match self {
            Termination::ExhaustedCoreEmpty => "exhausted_core_empty",
            Termination::CascadeStopped => "cascade_stopped",
        }
    }
}

/// Record of one run of the point-level deletion procedure.
#[derive(Debug, Clone, PartialEq)]
pub struct PeelTrace {
    pub k: usize,
    /// `z[0] = Z_0`, then `Z_j` for each loop iteration.
    pub z: Vec<i64>,
    /// `y[0] = Y_0 = Z_0`, then `Y_j`.
    pub y: Vec<i64>,
    /// Number of vertices removed.
    pub w: usize,
    /// `(p_j, p_j′)` in force at loop iteration `j`; `p_hat[j − 1]` is step `j`.
    pub p_hat: Vec<(f64, f64)>,
    pub terminated: Termination,
}

impl PeelTrace {
    /// Number of loop iterations performed.
    pub fn steps(&self) -> usize {
        self.p_hat.len()
    }

    /// First loop iteration with `Y_j = 0`, if the cascade stopped.
    pub fn died_at(&self) -> Option<usize> {
        self.y.iter().position(|&y| y == 0)
    }
}

const POOL_A: u8 = 0;
const POOL_B: u8 = 1;
const POOL_C: u8 = 2;
const GONE: u8 = 3;

/// Undeleted points split into three pools: `A` unmarked points in bins of
/// current size `k`, `B` marked points, `C` unmarked points in larger bins.
/// Partners are revealed lazily, so every undeleted point is unmatched.
pub(crate) struct PointEngine {
    k: usize,
    bin_of: Vec<u32>,
    bin_start: Vec<usize>,
    bin_size: Vec<usize>,
    bin_marked: Vec<bool>,
    pools: [Vec<u32>; 3],
    where_: Vec<u8>,
    slot: Vec<u32>,
    marked_bins: usize,
}

impl PointEngine {
    pub(crate) fn new(d: &DegreeSequence) -> Self {
        let k = d.k();
        let degrees = d.degrees();
        let bin_of = crate::graphgen::bin_layout(degrees);
        let mut bin_start = Vec::with_capacity(degrees.len() + 1);
        bin_start.push(0);
        for &x in degrees {
            bin_start.push(bin_start.last().unwrap() + x);
        }
        let n_points = bin_of.len();
        let mut engine = Self {
            k,
            bin_size: degrees.to_vec(),
            bin_marked: vec![false; degrees.len()],
            bin_of,
            bin_start,
            pools: [Vec::new(), Vec::new(), Vec::new()],
            where_: vec![GONE; n_points],
            slot: vec![0; n_points],
            marked_bins: 0,
        };
        for p in 0..n_points as u32 {
            let size = engine.bin_size[engine.bin_of[p as usize] as usize];
            let pool = if size < k {
                POOL_B
            } else if size == k {
                POOL_A
            } else {
                POOL_C
            };
            engine.insert(p, pool);
        }
        for b in 0..degrees.len() {
            if degrees[b] < k {
                engine.bin_marked[b] = true;
                engine.marked_bins += 1;
            }
        }
        engine
    }

    fn insert(&mut self, p: u32, pool: u8) {
        self.where_[p as usize] = pool;
        self.slot[p as usize] = self.pools[pool as usize].len() as u32;
        self.pools[pool as usize].push(p);
    }

    fn detach(&mut self, p: u32) {
        let pool = self.where_[p as usize] as usize;
        let i = self.slot[p as usize] as usize;
        let list = &mut self.pools[pool];
        list.swap_remove(i);
        if i < list.len() {
            let moved = list[i];
            self.slot[moved as usize] = i as u32;
        }
        self.where_[p as usize] = GONE;
    }

    fn move_bin(&mut self, bin: usize, from: u8, to: u8) {
        for p in self.bin_start[bin]..self.bin_start[bin + 1] {
            if self.where_[p] == from {
                self.detach(p as u32);
                self.insert(p as u32, to);
            }
        }
    }

    /// Deletes point `p` and updates the bin's status.
    fn delete(&mut self, p: u32) {
        self.detach(p);
        let bin = self.bin_of[p as usize] as usize;
        self.bin_size[bin] -= 1;
        if self.bin_marked[bin] {
            return;
        }
        let size = self.bin_size[bin];
        if size == self.k {
            self.move_bin(bin, POOL_C, POOL_A);
        } else if size + 1 == self.k {
            self.bin_marked[bin] = true;
            self.marked_bins += 1;
            self.move_bin(bin, POOL_A, POOL_B);
        }
    }

    pub(crate) fn undeleted(&self) -> usize {
        self.pools.iter().map(Vec::len).sum()
    }

    pub(crate) fn marked(&self) -> usize {
        self.pools[POOL_B as usize].len()
    }

    pub(crate) fn marked_bins(&self) -> usize {
        self.marked_bins
    }

    fn nth_point(&self, mut i: usize) -> u32 {
        for pool in &self.pools {
            if i < pool.len() {
                return pool[i];
            }
            i -= pool.len();
        }
        unreachable!("point index out of range")
    }

    /// Iteration 0: delete two distinct uniform points. Returns `Z_0`.
    pub(crate) fn first_edge<R: Rng + ?Sized>(&mut self, rng: &mut R) -> i64 {
        let total = self.undeleted();
        let a = rng.gen_range(0..total);
        let mut b = rng.gen_range(0..total - 1);
        if b >= a {
            b += 1;
        }
        let (pa, pb) = (self.nth_point(a), self.nth_point(b));
        self.delete(pa);
        self.delete(pb);
        self.marked() as i64
    }

    /// `(p_j, p_j′)` for the next loop iteration: the shares of pools `A`
    /// and `B` among undeleted points other than the explored one.
    pub(crate) fn probabilities(&self) -> (f64, f64) {
        let others = (self.undeleted() - 1) as f64;
        (
            self.pools[POOL_A as usize].len() as f64 / others,
            (self.marked() - 1) as f64 / others,
        )
    }

    /// One loop iteration. `u` decides the partner's category: pool `A`
    /// if `u < p_j`, pool `B` if `u ≥ 1 − p_j′`, pool `C` otherwise; the
    /// explored point and the partner within its category are drawn from
    /// `rng`. Returns `Z_j`.
    pub(crate) fn step<R: Rng + ?Sized>(&mut self, u: f64, rng: &mut R) -> i64 {
        let before = self.marked() as i64;
        let b = &self.pools[POOL_B as usize];
        let explored = b[rng.gen_range(0..b.len())];
        self.detach(explored);
        let n_a = self.pools[POOL_A as usize].len();
        let n_b = self.pools[POOL_B as usize].len();
        let others = self.undeleted() as f64;
        let pool = if u < n_a as f64 / others {
            POOL_A
        } else if u >= 1.0 - n_b as f64 / others {
            POOL_B
        } else {
            POOL_C
        };
        let list = &self.pools[pool as usize];
        let partner = list[rng.gen_range(0..list.len())];
        self.delete(partner);
        self.marked() as i64 - before + 1
    }
}

/// Point-level deletion procedure on the pairing model `G(d)`, with the
/// matching revealed one edge at a time.
pub fn deletion_procedure_points<R: Rng + ?Sized>(d: &DegreeSequence, rng: &mut R) -> PeelTrace {
    run_points(d, rng, |rng| rng.gen::<f64>())
}

/// As [`deletion_procedure_points`], but the category uniform of each loop
/// iteration comes from `uniform`; used for common-random-number coupling.
pub(crate) fn run_points<R: Rng + ?Sized>(
    d: &DegreeSequence,
    rng: &mut R,
    mut uniform: impl FnMut(&mut R) -> f64,
) -> PeelTrace {
    let mut engine = PointEngine::new(d);
    let z0 = engine.first_edge(rng);
    let mut z = vec![z0];
    let mut y = vec![z0];
    let mut p_hat = Vec::new();
    while engine.marked() > 0 {
        p_hat.push(engine.probabilities());
        let u = uniform(rng);
        let zj = engine.step(u, rng);
        z.push(zj);
        y.push(*y.last().unwrap() + zj - 1);
    }
    let terminated = if engine.undeleted() == 0 {
        Termination::ExhaustedCoreEmpty
    } else {
        Termination::CascadeStopped
    };
    PeelTrace {
        k: d.k(),
        z,
        y,
        w: engine.marked_bins(),
        p_hat,
        terminated,
    }
}

/// Why the heavy/light peel stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    LightEmpty,
    DomainExit,
}

/// `(S_i, T_i, W_i)` after iteration 0 and after each loop iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub n: usize,
    pub m: usize,
    /// Points in heavy vertices.
    pub s: Vec<usize>,
    /// Heavy vertices.
    pub t: Vec<usize>,
    /// Points in light vertices.
    pub w_pts: Vec<usize>,
    pub stop_reason: StopReason,
}

impl Trajectory {
    /// Loop iterations performed.
    pub fn steps(&self) -> usize {
        self.s.len() - 1
    }

    /// Heavy vertices left when the peel stopped; the k-core size if the
    /// light set emptied.
    pub fn final_heavy(&self) -> usize {
        *self.t.last().unwrap()
    }
}

/// Heavy/light peel on the allocation model: `h` maps `[2m]` onto `[n]`
/// with at least `k` points per vertex, and points `i` and `m + i` are
/// matched. Heavy vertices keep their points; a vertex whose size would
/// drop below `k` becomes a set of light single-point vertices, which are
/// then explored one at a time.
pub fn pairing_allocation_peel<R: Rng + ?Sized>(
    k: usize,
    n: usize,
    m: usize,
    rng: &mut R,
    domain: Option<&DomainSpec>,
) -> Result<Trajectory> {
    if 2 * m < k * n {
        return Err(Error::Precondition(format!("2m = {} < kn = {}", 2 * m, k * n)));
    }
    if m == 0 {
        return Err(Error::Precondition("m must be positive".into()));
    }
    let d = degseq::sample_degree_sequence(k, n, m, rng)?;
    let mut h = crate::graphgen::bin_layout(d.degrees());
    h.shuffle(rng);
    Ok(peel_allocation(&d, &h, rng, domain))
}

/// Heavy sizes, light points and running totals of the heavy/light peel.
struct AllocState<'a> {
    k: usize,
    points_of: Vec<Vec<u32>>,
    size: Vec<usize>,
    deleted: Vec<bool>,
    light: Vec<u32>,
    light_slot: Vec<u32>,
    h: &'a [u32],
    s: usize,
    t: usize,
}

impl AllocState<'_> {
    fn add_light(&mut self, p: u32) {
        self.light_slot[p as usize] = self.light.len() as u32;
        self.light.push(p);
    }

    fn remove_light(&mut self, p: u32) {
        let i = self.light_slot[p as usize] as usize;
        self.light.swap_remove(i);
        if i < self.light.len() {
            self.light_slot[self.light[i] as usize] = i as u32;
        }
        self.light_slot[p as usize] = u32::MAX;
    }

    fn is_light(&self, p: u32) -> bool {
        self.light_slot[p as usize] != u32::MAX
    }

    /// Heavy vertex `v` turns light: its undeleted points become light vertices.
    fn detach(&mut self, v: usize) {
        self.t -= 1;
        self.s -= self.size[v];
        self.size[v] = 0;
        for idx in 0..self.points_of[v].len() {
            let p = self.points_of[v][idx];
            if !self.deleted[p as usize] {
                self.add_light(p);
            }
        }
    }

    /// Heavy vertex `v` loses one point.
    fn lose_point(&mut self, v: usize) {
        if self.size[v] == self.k {
            self.detach(v);
        } else {
            self.size[v] -= 1;
            self.s -= 1;
        }
    }
}

/// Runs the heavy/light peel for a fixed allocation `h`.
pub(crate) fn peel_allocation<R: Rng + ?Sized>(
    d: &DegreeSequence,
    h: &[u32],
    rng: &mut R,
    domain: Option<&DomainSpec>,
) -> Trajectory {
    let (n, m, k) = (d.n(), d.m(), d.k());
    let mut points_of: Vec<Vec<u32>> = d.degrees().iter().map(|&x| Vec::with_capacity(x)).collect();
    for (p, &v) in h.iter().enumerate() {
        points_of[v as usize].push(p as u32);
    }
    let mut st = AllocState {
        k,
        points_of,
        size: d.degrees().to_vec(),
        deleted: vec![false; 2 * m],
        light: Vec::new(),
        light_slot: vec![u32::MAX; 2 * m],
        h,
        s: 2 * m,
        t: n,
    };

    // Iteration 0.
    let i0 = rng.gen_range(0..m);
    let (v, u) = (h[i0] as usize, h[i0 + m] as usize);
    st.deleted[i0] = true;
    st.deleted[i0 + m] = true;
    if u != v {
        st.lose_point(v);
        st.lose_point(u);
    } else if st.size[v] <= k + 1 {
        st.detach(v);
    } else {
        st.size[v] -= 2;
        st.s -= 2;
    }

    let outside = |i: usize, st: &AllocState| match domain {
        None => false,
        Some(dom) => dom
            .exit_face(i as f64 / n as f64, st.s as f64 / n as f64, st.t as f64 / n as f64)
            .is_some(),
    };
    let mut s = vec![st.s];
    let mut t = vec![st.t];
    let mut w_pts = vec![st.light.len()];
    let mut stop_reason = StopReason::LightEmpty;
    let mut i = 0;
    if outside(0, &st) {
        stop_reason = StopReason::DomainExit;
    } else {
        while !st.light.is_empty() {
            i += 1;
            let j = st.light[rng.gen_range(0..st.light.len())];
            st.remove_light(j);
            let partner = if (j as usize) < m { j + m as u32 } else { j - m as u32 };
            st.deleted[j as usize] = true;
            st.deleted[partner as usize] = true;
            if st.is_light(partner) {
                st.remove_light(partner);
            } else {
                st.lose_point(st.h[partner as usize] as usize);
            }
            s.push(st.s);
            t.push(st.t);
            w_pts.push(st.light.len());
            if outside(i, &st) {
                stop_reason = StopReason::DomainExit;
                break;
            }
        }
    }
    Trajectory { n, m, s, t, w_pts, stop_reason }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphgen;
    use crate::rng::seeded;
    use proptest::prelude::*;
    use rand::Rng;

    fn ceil_div(z: i64, k: usize) -> i64 {
        let d = (k - 1) as i64;
        (z + d - 1).div_euclid(d)
    }

    fn check_trace(t: &PeelTrace) {
        let k = t.k as i64;
        assert!([0, k - 2, k - 1, 2 * (k - 1)].contains(&t.z[0]));
        assert_eq!(t.y[0], t.z[0]);
        for j in 1..t.z.len() {
            assert!([-1, 0, k - 1].contains(&t.z[j]));
            assert_eq!(t.y[j], t.y[j - 1] + t.z[j] - 1);
        }
        assert_eq!(*t.y.last().unwrap(), 0);
        assert!(t.y[..t.y.len() - 1].iter().all(|&y| y > 0));
        let w: i64 = t.z.iter().map(|&z| ceil_div(z, t.k)).sum();
        assert_eq!(w as usize, t.w);
    }

    #[test]
    fn kcore_examples() {
        assert_eq!(kcore(&Multigraph::complete(4), 3), Multigraph::complete(4));
        let path = Multigraph::new(5, [(0, 1), (1, 2), (1, 3), (3, 4)]);
        assert_eq!(kcore(&path, 2).n(), 0);
        let mut edges = Multigraph::cycle(5).edges().to_vec();
        edges.push((2, 5));
        let g = Multigraph::new(6, edges);
        assert_eq!(kcore(&g, 2), Multigraph::cycle(5));
        // A loop contributes two to the degree.
        assert_eq!(kcore(&Multigraph::new(1, [(0, 0)]), 2).n(), 1);
    }

    #[test]
    fn w_statistic_examples() {
        let mut rng = seeded(1);
        for _ in 0..20 {
            assert_eq!(w_statistic(&Multigraph::complete(4), 3, &mut rng).unwrap(), 4);
            assert_eq!(w_statistic(&Multigraph::complete(5), 3, &mut rng).unwrap(), 0);
            assert_eq!(w_statistic(&Multigraph::cycle(7), 2, &mut rng).unwrap(), 7);
        }
        assert!(w_statistic(&Multigraph::empty(3), 3, &mut rng).is_err());
        assert!(w_statistic(&Multigraph::cycle(5), 3, &mut rng).is_err());
    }

    #[test]
    fn w_matches_core_recomputation() {
        let mut rng = seeded(2);
        for _ in 0..200 {
            let g = graphgen::allocation_kcore(3, 40, 66, &mut rng).unwrap();
            for e in 0..g.edge_count() {
                let core = kcore(&g.without_edge(e), 3);
                assert_eq!(w_after_removing(&g, 3, e), g.n() - core.n());
            }
        }
    }

    #[test]
    fn vertex_procedure_examples() {
        let mut rng = seeded(3);
        assert_eq!(deletion_procedure_vertex(&Multigraph::complete(4), 3, &mut rng).unwrap(), (4, 4));
        assert_eq!(deletion_procedure_vertex(&Multigraph::complete(5), 3, &mut rng).unwrap(), (0, 0));
    }

    #[test]
    fn vertex_procedure_agrees_with_w_statistic() {
        let mut rng = seeded(4);
        for s in 0..100 {
            let g = graphgen::uniform_simple_kcore(3, 50, 80, &mut rng, 1_000_000).unwrap();
            let w = w_statistic(&g, 3, &mut seeded(s)).unwrap();
            let (removed, steps) = deletion_procedure_vertex(&g, 3, &mut seeded(s)).unwrap();
            assert_eq!(removed, w);
            assert_eq!(steps, removed);
        }
    }

    #[test]
    fn point_procedure_on_two_bins() {
        let d = DegreeSequence::new(vec![3, 3], 3).unwrap();
        for s in 0..100 {
            let t = deletion_procedure_points(&d, &mut seeded(s));
            check_trace(&t);
            assert_eq!(t.w, 2);
            assert_eq!(t.terminated, Termination::ExhaustedCoreEmpty);
        }
    }

    #[test]
    fn point_procedure_without_marks_stops_at_once() {
        let d = DegreeSequence::new(vec![6, 6], 3).unwrap();
        for s in 0..50 {
            let t = deletion_procedure_points(&d, &mut seeded(s));
            check_trace(&t);
            assert_eq!(t.z, vec![0]);
            assert_eq!(t.w, 0);
            assert_eq!(t.terminated, Termination::CascadeStopped);
        }
    }

    #[test]
    fn point_probabilities_stay_in_the_sandwich() {
        let mut rng = seeded(5);
        let k = 3;
        for _ in 0..50 {
            let d = degseq::sample_degree_sequence(k, 2000, 3300, &mut rng).unwrap();
            let dk = d.degrees().iter().filter(|&&x| x == k).count() as f64;
            let m2 = 2.0 * d.m() as f64;
            let t = deletion_procedure_points(&d, &mut rng);
            check_trace(&t);
            for (idx, &(p, _)) in t.p_hat.iter().enumerate() {
                let j = (idx + 1) as f64;
                // Bins can fall from above k into A, so A may also grow.
                let upper = (k as f64 * dk + (j + 1.0) * k as f64) / (m2 - 2.0 * j - 1.0);
                let lower = (k as f64 * dk - (j + 1.0) * k as f64) / (m2 - 2.0 * j - 1.0);
                assert!(p <= upper + 1e-15 && p >= lower - 1e-15, "step {j}: {lower} {p} {upper}");
            }
        }
    }

    #[test]
    fn trace_law_matches_recorded_probabilities() {
        // Bucket steps by p_j and compare the observed frequency of Z_j = k − 1.
        let mut rng = seeded(6);
        let mut buckets = vec![(0.0f64, 0.0f64, 0usize); 10];
        for _ in 0..300 {
            let d = degseq::sample_degree_sequence(3, 300, 480, &mut rng).unwrap();
            let t = deletion_procedure_points(&d, &mut rng);
            for (j, &(p, _)) in t.p_hat.iter().enumerate() {
                let b = ((p * 10.0) as usize).min(9);
                buckets[b].0 += p;
                buckets[b].1 += p * (1.0 - p);
                if t.z[j + 1] == 2 {
                    buckets[b].2 += 1;
                }
            }
        }
        for (sum_p, var, hits) in buckets {
            if var > 25.0 {
                let z = (hits as f64 - sum_p) / var.sqrt();
                assert!(z.abs() < 4.0, "z = {z}");
            }
        }
    }

    #[test]
    fn allocation_peel_identities() {
        let mut rng = seeded(7);
        let (k, n, m) = (3, 1000, 1650);
        for _ in 0..100 {
            let tr = pairing_allocation_peel(k, n, m, &mut rng, None).unwrap();
            assert_eq!(tr.stop_reason, StopReason::LightEmpty);
            for i in 0..tr.s.len() {
                assert_eq!(tr.w_pts[i] + tr.s[i] + 2 * i + 2, 2 * m);
            }
            for i in 1..tr.s.len() {
                assert!(tr.s[i - 1] - tr.s[i] <= k);
                assert!(tr.t[i - 1] - tr.t[i] <= 1);
            }
            assert!(tr.s[0] + 2 + 2 * (k - 1) >= 2 * m);
            assert!(tr.t[0] + 2 >= n);
            assert_eq!(*tr.w_pts.last().unwrap(), 0);
        }
    }

    #[test]
    fn allocation_peel_matches_kcore_of_the_allocation_graph() {
        let mut rng = seeded(8);
        for _ in 0..300 {
            let d = degseq::sample_degree_sequence(3, 30, 50, &mut rng).unwrap();
            let mut h = graphgen::bin_layout(d.degrees());
            h.shuffle(&mut rng);
            let m = d.m();
            let g = Multigraph::new(d.n(), (0..m).map(|i| (h[i], h[i + m])));
            // Replay the peel's first choice to find the removed edge.
            let mut probe = rng.clone();
            let i0 = probe.gen_range(0..m);
            let removed = crate::graph::canonical(h[i0], h[i0 + m]);
            let idx = g.edges().iter().position(|&e| e == removed).unwrap();
            let tr = peel_allocation(&d, &h, &mut rng, None);
            assert_eq!(tr.final_heavy(), kcore(&g.without_edge(idx), 3).n());
        }
    }

    #[test]
    fn allocation_peel_stops_on_domain_exit() {
        let dom = DomainSpec::general(3, 3.2, 0.05).unwrap();
        let mut rng = seeded(9);
        let mut exits = 0;
        for _ in 0..20 {
            let tr = pairing_allocation_peel(3, 5000, 8000, &mut rng, Some(&dom)).unwrap();
            if tr.stop_reason == StopReason::DomainExit {
                exits += 1;
                let i = tr.steps();
                let face = dom.exit_face(
                    i as f64 / 5000.0,
                    tr.s[i] as f64 / 5000.0,
                    tr.t[i] as f64 / 5000.0,
                );
                assert!(face.is_some());
            }
        }
        assert!(exits > 0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn core_is_order_independent(seed in any::<u64>(), n in 5usize..120, extra in 0usize..200) {
            let mut rng = seeded(seed);
            let m = n + extra;
            let edges: Vec<(u32, u32)> = (0..m)
                .map(|_| (rng.gen_range(0..n as u32), rng.gen_range(0..n as u32)))
                .collect();
            let g = Multigraph::new(n, edges);
            let reference = core_membership(&g, 3);
            // Random-order peeling.
            let (off, nb) = g.adjacency();
            let mut deg = g.degrees();
            let mut alive = vec![true; n];
            loop {
                let mut low: Vec<usize> = (0..n).filter(|&v| alive[v] && deg[v] < 3).collect();
                if low.is_empty() { break; }
                low.shuffle(&mut rng);
                let v = low[0];
                alive[v] = false;
                for &w in &nb[off[v]..off[v + 1]] {
                    if alive[w as usize] { deg[w as usize] -= 1; }
                }
            }
            prop_assert_eq!(alive, reference);
        }

        #[test]
        fn edge_deletion_never_enlarges_core(seed in any::<u64>(), n in 5usize..100, extra in 0usize..150) {
            let mut rng = seeded(seed);
            let m = n + extra;
            let edges: Vec<(u32, u32)> = (0..m)
                .map(|_| (rng.gen_range(0..n as u32), rng.gen_range(0..n as u32)))
                .collect();
            let g = Multigraph::new(n, edges);
            let before = core_membership(&g, 3);
            let after = core_membership(&g.without_edge(rng.gen_range(0..m)), 3);
            prop_assert!(after.iter().zip(&before).all(|(&a, &b)| !a || b));
        }

        #[test]
        fn point_traces_are_consistent(seed in any::<u64>(), k in 3usize..6, n in 2usize..60, extra in 0usize..40) {
            let mut rng = seeded(seed);
            let m = (k * n + 1) / 2 + extra;
            let d = degseq::sample_degree_sequence(k, n, m, &mut rng).unwrap();
            let t = deletion_procedure_points(&d, &mut rng);
            check_trace(&t);
            prop_assert!(t.w <= n);
            prop_assert_eq!(t.w == n, t.terminated == Termination::ExhaustedCoreEmpty);
        }
    }
}
