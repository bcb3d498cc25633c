//! Enumeration of covering cycles: cycles in which every plant is closed
//! loop at some vertex.

use std::ops::ControlFlow;

use super::CycleError;
use crate::ncs_graph::{NcsGraph, VertexLabel};

/// Counters from one enumeration pass.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EnumerationStats {
    pub yielded: usize,
    /// Candidate vertices examined by the depth-first search.
    pub nodes: u64,
    /// The node budget ran out before the search space was exhausted.
    pub truncated: bool,
}

/// Greedy set cover: repeatedly take the `M`-subset covering the most
/// uncovered plants, ties broken by the lexicographically smallest subset.
pub fn greedy_cover_cycle(n: usize, m: usize) -> Vec<VertexLabel> {
    let mut covered = vec![false; n + 1];
    let mut cycle = Vec::new();
    loop {
        let uncovered: Vec<usize> = (1..=n).filter(|&i| !covered[i]).collect();
        if uncovered.is_empty() {
            break;
        }
        let mut ids: Vec<usize> = uncovered.iter().copied().take(m).collect();
        // top up with the smallest already-covered ids
        for i in 1..=n {
            if ids.len() == m {
                break;
            }
            if covered[i] {
                ids.push(i);
            }
        }
        for &i in &ids {
            covered[i] = true;
        }
        cycle.push(VertexLabel::new(ids).expect("distinct ids"));
    }
    cycle
}

/// Smallest rotation index-wise; a cycle is canonical when no rotation is
/// lexicographically smaller than itself.
pub fn is_canonical_rotation(cycle: &[VertexLabel]) -> bool {
    let n = cycle.len();
    (1..n).all(|r| {
        let rotated = cycle[r..].iter().chain(&cycle[..r]);
        rotated.cmp(cycle.iter()) != std::cmp::Ordering::Less
    })
}

pub fn canonical_rotation(cycle: &[VertexLabel]) -> Vec<VertexLabel> {
    let n = cycle.len();
    (0..n)
        .map(|r| cycle[r..].iter().chain(&cycle[..r]).cloned().collect::<Vec<_>>())
        .min()
        .unwrap_or_default()
}

/// Not a repetition of a shorter cycle.
pub fn is_primitive(cycle: &[VertexLabel]) -> bool {
    let n = cycle.len();
    (1..n)
        .filter(|p| n % p == 0)
        .all(|p| (0..n).any(|i| cycle[i] != cycle[(i + p) % n]))
}

/// Next `m`-combination of `1..=n` in lexicographic order.
fn next_combination(c: &mut [usize], n: usize) -> bool {
    let m = c.len();
    let mut i = m;
    while i > 0 {
        i -= 1;
        if c[i] < n - (m - 1 - i) {
            c[i] += 1;
            for j in (i + 1)..m {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

struct Dfs<'a, F> {
    n: usize,
    m: usize,
    len: usize,
    max_nodes: u64,
    skip: &'a [VertexLabel],
    visit: &'a mut F,
    seq: Vec<VertexLabel>,
    cover: Vec<u32>,
    uncovered: usize,
    stats: EnumerationStats,
}

impl<F> Dfs<'_, F>
where
    F: FnMut(&[VertexLabel]) -> ControlFlow<()>,
{
    fn run(&mut self) -> ControlFlow<()> {
        let depth = self.seq.len();
        let remaining = self.len - depth;
        if remaining == 0 {
            if self.uncovered == 0
                && self.seq[0] != self.seq[depth - 1]
                && is_canonical_rotation(&self.seq)
                && is_primitive(&self.seq)
                && self.seq != self.skip
            {
                self.stats.yielded += 1;
                return (self.visit)(&self.seq);
            }
            return ControlFlow::Continue(());
        }
        let need = self.uncovered.saturating_sub((remaining - 1) * self.m);
        let mut c: Vec<usize> = match self.seq.first() {
            Some(first) => first.ids().to_vec(),
            None => (1..=self.m).collect(),
        };
        loop {
            self.stats.nodes += 1;
            if self.stats.nodes > self.max_nodes {
                self.stats.truncated = true;
                return ControlFlow::Break(());
            }
            let fresh = c.iter().filter(|&&i| self.cover[i] == 0).count();
            let label = VertexLabel::new(c.clone()).expect("combination");
            let distinct_prev = self.seq.last() != Some(&label);
            let distinct_first = remaining != 1 || self.seq.first() != Some(&label);
            if fresh >= need && distinct_prev && distinct_first {
                for &i in &c {
                    self.cover[i] += 1;
                }
                self.uncovered -= fresh;
                self.seq.push(label);
                let flow = self.run();
                let label = self.seq.pop().expect("pushed");
                self.uncovered += fresh;
                for &i in label.ids() {
                    self.cover[i] -= 1;
                }
                flow?;
            }
            if !next_combination(&mut c, self.n) {
                return ControlFlow::Continue(());
            }
        }
    }
}

/// Streams covering cycles to `visit`: the greedy cover cycle first, then
/// every other canonical, primitive covering cycle by increasing length up
/// to `max_len`, each exactly once up to rotation.
///
/// The depth-first phase stops after `max_nodes` candidate vertices.
pub fn for_each_covering_cycle<F>(
    g: &NcsGraph,
    max_len: usize,
    max_nodes: u64,
    mut visit: F,
) -> Result<EnumerationStats, CycleError>
where
    F: FnMut(&[VertexLabel]) -> ControlFlow<()>,
{
    let (n, m) = (g.n_plants(), g.capacity());
    let min_len = n.div_ceil(m);
    if min_len > max_len {
        return Err(CycleError::CapacityInvalid { min_len, max_len });
    }
    let greedy = greedy_cover_cycle(n, m);
    let mut stats = EnumerationStats {
        yielded: 1,
        ..Default::default()
    };
    if visit(&greedy).is_break() {
        return Ok(stats);
    }
    let skip = canonical_rotation(&greedy);
    for len in min_len.max(2)..=max_len {
        let mut dfs = Dfs {
            n,
            m,
            len,
            max_nodes: max_nodes.saturating_sub(stats.nodes),
            skip: &skip,
            visit: &mut visit,
            seq: Vec::with_capacity(len),
            cover: vec![0; n + 1],
            uncovered: n,
            stats: EnumerationStats::default(),
        };
        let flow = dfs.run();
        stats.nodes += dfs.stats.nodes;
        stats.yielded += dfs.stats.yielded;
        stats.truncated |= dfs.stats.truncated;
        if flow.is_break() {
            break;
        }
    }
    Ok(stats)
}

/// Collects at most `max_count` covering cycles in stream order.
pub fn covering_cycles(g: &NcsGraph, max_count: usize, max_len: usize) -> Result<Vec<Vec<VertexLabel>>, CycleError> {
    let mut out = Vec::new();
    if max_count == 0 {
        return Ok(out);
    }
    for_each_covering_cycle(g, max_len, super::DEFAULT_MAX_NODES, |c| {
        out.push(c.to_vec());
        if out.len() >= max_count {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    })?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ncs_graph::PlantRates;

    fn graph(n: usize, m: usize) -> NcsGraph {
        let r = PlantRates {
            lambda_s: 1.0,
            lambda_u: -1.0,
            ln_mu_su: 0.0,
            ln_mu_us: 0.0,
        };
        NcsGraph::from_rates(vec![r; n], m).unwrap()
    }

    fn ids(c: &[VertexLabel]) -> Vec<Vec<usize>> {
        c.iter().map(|v| v.ids().to_vec()).collect()
    }

    #[test]
    fn two_plants_single_cycle() {
        let all = covering_cycles(&graph(2, 1), 100, 6).unwrap();
        assert_eq!(all.len(), 1);
        assert_eq!(ids(&all[0]), vec![vec![1], vec![2]]);
    }

    #[test]
    fn greedy_first_for_four_two() {
        let first = covering_cycles(&graph(4, 2), 1, 4).unwrap();
        assert_eq!(ids(&first[0]), vec![vec![1, 2], vec![3, 4]]);
    }

    #[test]
    fn three_plants_length_three() {
        let all = covering_cycles(&graph(3, 1), 100, 3).unwrap();
        let mut canon: Vec<_> = all.iter().map(|c| ids(&canonical_rotation(c))).collect();
        canon.sort();
        assert_eq!(
            canon,
            vec![vec![vec![1], vec![2], vec![3]], vec![vec![1], vec![3], vec![2]]]
        );
    }

    #[test]
    fn capacity_too_small() {
        assert!(matches!(
            covering_cycles(&graph(5, 1), 10, 4),
            Err(CycleError::CapacityInvalid { min_len: 5, max_len: 4 })
        ));
    }

    #[test]
    fn greedy_tops_up() {
        assert_eq!(ids(&greedy_cover_cycle(3, 2)), vec![vec![1, 2], vec![1, 3]]);
    }

    #[test]
    fn rotation_helpers() {
        let l = |i: usize| VertexLabel::new(vec![i]).unwrap();
        assert!(is_canonical_rotation(&[l(1), l(3), l(2)]));
        assert!(!is_canonical_rotation(&[l(2), l(1), l(3)]));
        assert!(!is_primitive(&[l(1), l(2), l(1), l(2)]));
        assert!(is_primitive(&[l(1), l(2), l(1), l(3)]));
    }

    #[test]
    fn combinations_in_order() {
        let mut c = vec![1, 2];
        let mut seen = vec![c.clone()];
        while next_combination(&mut c, 4) {
            seen.push(c.clone());
        }
        assert_eq!(seen.len(), 6);
        assert_eq!(seen.last().unwrap(), &vec![3, 4]);
    }
}
