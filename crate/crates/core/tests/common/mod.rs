//! Helpers shared by the integration tests.
#![allow(dead_code)]

use std::collections::HashSet;

use bdperm::metric::{Dist, FiniteMetricSpace, SepQuery};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Random metric on `n` points: shortest paths of a random connected graph
/// with half-integer weights.
pub fn random_metric(rng: &mut ChaCha8Rng, n: usize) -> FiniteMetricSpace {
    const INF: u64 = u64::MAX / 4;
    let mut d = vec![vec![INF; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0;
    }
    let edge = |d: &mut Vec<Vec<u64>>, a: usize, b: usize, h: u64| {
        d[a][b] = d[a][b].min(h);
        d[b][a] = d[b][a].min(h);
    };
    for i in 1..n {
        let j = rng.gen_range(0..i);
        let h = rng.gen_range(1..=6);
        edge(&mut d, i, j, h);
    }
    let extra = rng.gen_range(0..=n * 2);
    for _ in 0..extra {
        let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if a != b {
            let h = rng.gen_range(1..=6);
            edge(&mut d, a, b, h);
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    let labels = (0..n).map(|i| format!("p{i}")).collect();
    let table = d.into_iter().map(|row| row.into_iter().map(Dist::from_halves).collect()).collect();
    FiniteMetricSpace::from_table(labels, table).unwrap()
}

/// Enumerates simple r1-chains from `B(x, r2)` that avoid `Y`, over subsets
/// of visited points; `true` when none reaches `B(y, r2)`.
pub fn sep_by_enumeration(space: &FiniteMetricSpace, q: &SepQuery) -> bool {
    let n = space.len();
    let in_y: Vec<bool> = (0..n).map(|i| q.separator.contains(&i)).collect();
    let near = |c: usize, p: usize| space.dist(c, p) <= Dist::from_int(q.r2);
    let step = |a: usize, b: usize| space.dist(a, b) <= Dist::from_int(q.r1);
    let mut seen: HashSet<(u32, usize)> = HashSet::new();
    let mut stack: Vec<(u32, usize)> = Vec::new();
    for z in 0..n {
        if near(q.x, z) && !in_y[z] {
            stack.push((1 << z, z));
        }
    }
    while let Some((mask, last)) = stack.pop() {
        if !seen.insert((mask, last)) {
            continue;
        }
        if near(q.y, last) {
            return false;
        }
        for next in 0..n {
            if mask & (1 << next) == 0 && !in_y[next] && step(last, next) {
                stack.push((mask | (1 << next), next));
            }
        }
    }
    true
}
