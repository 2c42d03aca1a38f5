//! Constructors for the permutation families on ℤ⁺ and for word-metric
//! groups materialized at desk scale.

use std::collections::{HashMap, VecDeque};
use std::ops::RangeInclusive;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::cycles::interleave;
use crate::error::{Error, Result};
use crate::metric::FiniteMetricSpace;
use crate::perm::{BlockPattern, DisplacementReport, PairMask, Parity, PermSpec, Point, Window};
use crate::tree::SimplicialTree;

/// Highest tower level served; level `n` stores a pattern of `n!` offsets.
pub const MAX_TOWER_LEVEL: u32 = 10;

/// The partition of ℤ⁺ into blocks `B_{k,ℓ} = {k(ℓ−1)+1, …, kℓ}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockFamily {
    k: u64,
}

impl BlockFamily {
    pub fn new(k: u64) -> Result<Self> {
        if k == 0 {
            return Err(Error::Precondition("block size must be positive".into()));
        }
        Ok(BlockFamily { k })
    }

    pub fn size(self) -> u64 {
        self.k
    }

    /// The `ℓ` with `x ∈ B_{k,ℓ}`.
    pub fn block_of(self, x: Point) -> u64 {
        (x - 1) / self.k + 1
    }

    pub fn block(self, ell: u64) -> RangeInclusive<Point> {
        self.k * (ell - 1) + 1..=self.k * ell
    }
}

pub fn factorial(n: u32) -> u64 {
    (1..=u64::from(n)).product()
}

/// Level `n` of the divisible tower: `g₁ = id` and `g_{n+1}^{n+1} = g_n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TowerLevel {
    pub n: u32,
    pub spec: PermSpec,
}

impl TowerLevel {
    pub fn blocks(&self) -> BlockFamily {
        BlockFamily { k: factorial(self.n) }
    }
}

pub fn make_shift() -> PermSpec {
    PermSpec::ShiftG
}

pub fn make_masked_involution(mask: PairMask) -> PermSpec {
    PermSpec::masked_involution(mask)
}

fn tower_table() -> &'static Mutex<Vec<BlockPattern>> {
    static TABLE: OnceLock<Mutex<Vec<BlockPattern>>> = OnceLock::new();
    TABLE.get_or_init(|| Mutex::new(vec![BlockPattern::from_offsets(vec![0]).unwrap()]))
}

/// Builds the level-`n+1` block pattern from level `n`: the `n+1` orbits of
/// `g_n` inside one block of size `(n+1)!`, each started at its minimum, are
/// merged round-robin so that `a_{j,i} ↦ a_{j+1,i}` and `a_{n+1,i} ↦ a_{1,i+1}`.
fn next_level(prev: &BlockPattern, n: u32) -> BlockPattern {
    let len = prev.block_size() as usize;
    let parts = n as usize + 1;
    let mut offsets = vec![0u32; len * parts];
    let mut seen = vec![false; len];
    let mut group: Vec<Vec<u32>> = Vec::new();
    for start in 0..len {
        if seen[start] {
            continue;
        }
        let mut orbit = Vec::new();
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            orbit.push(x as u32);
            x = prev.offsets()[x] as usize;
        }
        group.push(orbit);
    }
    // for n ≥ 2 each block of g_n is a single cycle; for n = 1 it is a fixed point
    debug_assert_eq!(group.len(), 1);
    let base = &group[0];
    let copies: Vec<Vec<u32>> = (0..parts).map(|j| base.iter().map(|&o| o + (j * len) as u32).collect()).collect();
    let merged = interleave(&copies, parts as u64);
    for (i, &x) in merged.iter().enumerate() {
        offsets[x as usize] = merged[(i + 1) % merged.len()];
    }
    BlockPattern::from_offsets(offsets).expect("interleaving yields a permutation")
}

fn tower_pattern(n: u32) -> Result<BlockPattern> {
    if n == 0 || n > MAX_TOWER_LEVEL {
        return Err(Error::TowerLevel { n, max: MAX_TOWER_LEVEL });
    }
    let mut table = tower_table().lock().unwrap_or_else(|e| e.into_inner());
    while table.len() < n as usize {
        let level = table.len() as u32;
        let next = next_level(&table[level as usize - 1], level);
        table.push(next);
    }
    Ok(table[n as usize - 1].clone())
}

/// `g_n` as a block permutation over blocks of size `n!`.
pub fn make_tower(n: u32) -> Result<TowerLevel> {
    let pattern = tower_pattern(n)?;
    let spec = if n == 1 { PermSpec::Identity } else { PermSpec::block_cycles(pattern) };
    Ok(TowerLevel { n, spec })
}

/// Checks `g_{n+1}^{n+1} = g_n` on `w`, which must be a union of blocks of
/// size `(n+1)!`.
pub fn tower_check(n: u32, w: Window) -> Result<bool> {
    if n >= MAX_TOWER_LEVEL {
        return Err(Error::TowerLevel { n: n + 1, max: MAX_TOWER_LEVEL });
    }
    let top = make_tower(n + 1)?;
    if !w.size().is_multiple_of(factorial(n + 1)) {
        return Err(Error::NotInvariant { window: w.size() });
    }
    let lower = make_tower(n)?;
    PermSpec::power(top.spec, i64::from(n) + 1).equal_on_window(&lower.spec, w)
}

/// `h` moves odd points along `g` transported by `x ↦ 2x − 1`; `h_n` moves
/// even points along `g_n` transported by `x ↦ 2x`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Combined {
    pub h: PermSpec,
}

pub fn make_combined() -> Combined {
    Combined { h: PermSpec::interleaved(Parity::Odd, PermSpec::ShiftG) }
}

impl Combined {
    pub fn h_n(&self, n: u32) -> Result<PermSpec> {
        Ok(PermSpec::interleaved(Parity::Even, make_tower(n)?.spec))
    }
}

pub fn commute_on_window(a: &PermSpec, b: &PermSpec, w: Window) -> Result<bool> {
    PermSpec::compose(a.clone(), b.clone()).equal_on_window(&PermSpec::compose(b.clone(), a.clone()), w)
}

/// JSON description of a group with a symmetric generating set.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GroupSpec {
    /// `table[a][b]` is the index of `a·b`; `generators` are element indices.
    Table {
        #[serde(default)]
        elements: Option<Vec<String>>,
        table: Vec<Vec<usize>>,
        generators: Vec<usize>,
    },
    /// Cyclic group of the given order generated by `{g, g⁻¹}`.
    Cyclic { order: usize },
    /// Ball of the given radius in the free group on `rank` letters.
    Free { rank: u8, radius: u32 },
}

/// A letter of a free group: `k` for the `k`-th generator, `-k` for its inverse.
type Letter = i8;

fn letter_char(l: Letter) -> char {
    let base = b'a' + (l.unsigned_abs() - 1);
    if l > 0 {
        base as char
    } else {
        base.to_ascii_uppercase() as char
    }
}

fn word_label(word: &[Letter]) -> String {
    if word.is_empty() {
        "e".into()
    } else {
        word.iter().map(|&l| letter_char(l)).collect()
    }
}

/// Freely reduces a word given in letters `a`, `A`, `b`, `B`, …; `e` is empty.
fn parse_free_word(text: &str, rank: u8) -> Result<Vec<Letter>> {
    let mut out: Vec<Letter> = Vec::new();
    if text == "e" {
        return Ok(out);
    }
    for c in text.chars() {
        let l = match c {
            'a'..='z' => (c as u8 - b'a' + 1) as Letter,
            'A'..='Z' => -((c as u8 - b'A' + 1) as Letter),
            _ => return Err(Error::UnknownPoint(text.into())),
        };
        if l.unsigned_abs() > rank {
            return Err(Error::UnknownPoint(text.into()));
        }
        if out.last() == Some(&-l) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    Ok(out)
}

#[derive(Debug)]
enum Repr {
    Table(Vec<Vec<usize>>),
    Free { rank: u8, words: Vec<Vec<Letter>>, by_word: HashMap<Vec<Letter>, usize>, tree: Arc<SimplicialTree> },
}

/// A group (or a ball in one) with a symmetric generating set.
#[derive(Debug)]
pub struct WordMetricGroup {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    generators: Vec<usize>,
    identity: usize,
    repr: Repr,
    space: OnceLock<Arc<FiniteMetricSpace>>,
}

impl WordMetricGroup {
    pub fn free(rank: u8, radius: u32) -> Result<Self> {
        if rank == 0 || rank > 26 {
            return Err(Error::InvalidGroup(format!("free rank must be in 1..=26, got {rank}")));
        }
        let letters: Vec<Letter> = (1..=rank as Letter).flat_map(|k| [k, -k]).collect();
        let mut words: Vec<Vec<Letter>> = vec![Vec::new()];
        let mut edges = Vec::new();
        let mut frontier = 0..1;
        for _ in 0..radius {
            let start = words.len();
            for parent in frontier.clone() {
                for &l in &letters {
                    if words[parent].last() == Some(&-l) {
                        continue;
                    }
                    let mut w = words[parent].clone();
                    w.push(l);
                    edges.push((parent, words.len()));
                    words.push(w);
                }
            }
            frontier = start..words.len();
        }
        let labels: Vec<String> = words.iter().map(|w| word_label(w)).collect();
        let tree = Arc::new(SimplicialTree::from_edges(labels.clone(), &edges)?);
        let by_word = words.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
        let generators = (1..=letters.len()).collect();
        Ok(Self::assemble(labels, generators, 0, Repr::Free { rank, words, by_word, tree }))
    }

    pub fn cyclic(order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidGroup("cyclic order must be positive".into()));
        }
        let table = (0..order).map(|a| (0..order).map(|b| (a + b) % order).collect()).collect();
        let labels = (0..order).map(|k| if k == 0 { "e".into() } else { format!("g{k}") }).collect();
        let generators = if order == 1 { vec![] } else { vec![1 % order, order - 1] };
        Self::from_table(labels, table, generators)
    }

    /// Validates the group axioms, symmetry of the generators, and that they
    /// generate every element.
    pub fn from_table(labels: Vec<String>, table: Vec<Vec<usize>>, generators: Vec<usize>) -> Result<Self> {
        let n = table.len();
        let bad = |m: String| Err(Error::InvalidGroup(m));
        if n == 0 || labels.len() != n || table.iter().any(|r| r.len() != n) {
            return bad(format!("table must be square with {} labels", labels.len()));
        }
        for row in &table {
            let mut seen = vec![false; n];
            for &v in row {
                if v >= n || std::mem::replace(&mut seen[v], true) {
                    return bad("each row must be a permutation of the elements".into());
                }
            }
        }
        for b in 0..n {
            let mut seen = vec![false; n];
            for row in &table {
                if std::mem::replace(&mut seen[row[b]], true) {
                    return bad("each column must be a permutation of the elements".into());
                }
            }
        }
        let Some(identity) = (0..n).find(|&e| (0..n).all(|x| table[e][x] == x && table[x][e] == x)) else {
            return bad("no identity element".into());
        };
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return bad(format!("not associative at ({}, {}, {})", labels[a], labels[b], labels[c]));
                    }
                }
            }
        }
        for &s in &generators {
            if s >= n {
                return bad(format!("generator index {s} out of range"));
            }
            let inv = (0..n).find(|&t| table[s][t] == identity).unwrap();
            if !generators.contains(&inv) {
                return bad(format!("generating set is not symmetric: {} lacks its inverse", labels[s]));
            }
        }
        let group = Self::assemble(labels, generators, identity, Repr::Table(table));
        let from_e = group.bfs(identity);
        if let Some(x) = from_e.iter().position(|&d| d == u64::MAX) {
            return Err(Error::Disconnected(group.labels[x].clone()));
        }
        Ok(group)
    }

    pub fn from_spec(spec: &GroupSpec) -> Result<Self> {
        match spec {
            GroupSpec::Table { elements, table, generators } => {
                let labels = elements.clone().unwrap_or_else(|| (0..table.len()).map(|i| i.to_string()).collect());
                Self::from_table(labels, table.clone(), generators.clone())
            }
            GroupSpec::Cyclic { order } => Self::cyclic(*order),
            GroupSpec::Free { rank, radius } => Self::free(*rank, *radius),
        }
    }

    fn assemble(labels: Vec<String>, generators: Vec<usize>, identity: usize, repr: Repr) -> Self {
        let index = labels.iter().enumerate().map(|(i, l)| (l.clone(), i)).collect();
        WordMetricGroup { labels, index, generators, identity, repr, space: OnceLock::new() }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    pub fn label(&self, x: usize) -> &str {
        &self.labels[x]
    }

    /// Looks up an element by label; free-group words are reduced first.
    pub fn element(&self, label: &str) -> Result<usize> {
        match &self.repr {
            Repr::Free { rank, by_word, .. } => {
                let w = parse_free_word(label, *rank)?;
                by_word.get(&w).copied().ok_or_else(|| Error::UnknownPoint(label.into()))
            }
            Repr::Table(_) => self.index.get(label).copied().ok_or_else(|| Error::UnknownPoint(label.into())),
        }
    }

    /// `a·b`, or `None` when the product lies outside the materialized ball.
    pub fn multiply(&self, a: usize, b: usize) -> Option<usize> {
        match &self.repr {
            Repr::Table(t) => Some(t[a][b]),
            Repr::Free { words, by_word, .. } => {
                let mut w = words[a].clone();
                for &l in &words[b] {
                    if w.last() == Some(&-l) {
                        w.pop();
                    } else {
                        w.push(l);
                    }
                }
                by_word.get(&w).copied()
            }
        }
    }

    /// The Cayley tree, for free groups.
    pub fn cayley_tree(&self) -> Arc<SimplicialTree> {
        match &self.repr {
            Repr::Free { tree, .. } => tree.clone(),
            Repr::Table(_) => panic!("only free groups have a Cayley tree here"),
        }
    }

    /// Normal-form length for free groups; BFS distance from the identity otherwise.
    pub fn word_length(&self, h: usize) -> u64 {
        match &self.repr {
            Repr::Free { words, .. } => words[h].len() as u64,
            Repr::Table(_) => self.bfs(self.identity)[h],
        }
    }

    /// Distances from `source` along edges from `x` to `x·s`, restricted to the
    /// materialized elements; unreachable entries are `u64::MAX`.
    fn bfs(&self, source: usize) -> Vec<u64> {
        let mut dist = vec![u64::MAX; self.len()];
        dist[source] = 0;
        let mut queue = VecDeque::from([source]);
        while let Some(x) = queue.pop_front() {
            for &s in &self.generators {
                if let Some(y) = self.multiply(x, s) {
                    if dist[y] == u64::MAX {
                        dist[y] = dist[x] + 1;
                        queue.push_back(y);
                    }
                }
            }
        }
        dist
    }

    /// The word metric `d(h₁, h₂) = |h₁⁻¹h₂|` on the materialized elements.
    ///
    /// Finite groups get an all-pairs BFS table. A free-group ball is a
    /// prefix-closed subtree of the Cayley tree, so its restricted distances
    /// are exact and are read off the tree.
    pub fn metric_space(&self) -> Result<Arc<FiniteMetricSpace>> {
        if let Some(s) = self.space.get() {
            return Ok(s.clone());
        }
        let space = match &self.repr {
            Repr::Free { tree, .. } => FiniteMetricSpace::tree(tree.clone()),
            Repr::Table(_) => {
                let mut rows = Vec::with_capacity(self.len());
                for x in 0..self.len() {
                    let d = self.bfs(x);
                    if let Some(y) = d.iter().position(|&v| v == u64::MAX) {
                        return Err(Error::Disconnected(self.labels[y].clone()));
                    }
                    rows.push(d.into_iter().map(crate::metric::Dist::from_int).collect());
                }
                FiniteMetricSpace::from_table(self.labels.clone(), rows)?
            }
        };
        Ok(self.space.get_or_init(|| Arc::new(space)).clone())
    }
}

pub fn word_metric_space(g: &WordMetricGroup) -> Result<Arc<FiniteMetricSpace>> {
    g.metric_space()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RightActionReport {
    pub element: String,
    pub word_length: u64,
    pub interior_points: usize,
    /// `window_sup` is the largest interior displacement; `symbolic` carries the word length.
    pub displacement: DisplacementReport,
    pub uniform: bool,
}

/// Displacement `d(h₁, h₁h)` of right translation by `h`, over every `h₁`
/// whose product stays in the materialized ball.
pub fn right_action_check(g: &WordMetricGroup, h: usize) -> Result<RightActionReport> {
    let space = g.metric_space()?;
    let word_length = g.word_length(h);
    let mut interior = 0;
    let mut sup = 0;
    let mut uniform = true;
    for x in 0..g.len() {
        let Some(y) = g.multiply(x, h) else { continue };
        interior += 1;
        let d = space.dist(x, y);
        debug_assert!(d.is_integer());
        sup = sup.max(d.floor());
        uniform &= d.floor() == word_length;
    }
    if interior == 0 {
        return Err(Error::EmptyInterior);
    }
    Ok(RightActionReport {
        element: g.label(h).into(),
        word_length,
        interior_points: interior,
        displacement: DisplacementReport { window_sup: sup, symbolic: Some(word_length) },
        uniform,
    })
}
