//! Simplicial trees, quasi-isometric certificates into them, and the
//! separator built from a tree midpoint.

use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::Pow;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{Dist, FiniteMetricSpace, Label, SpaceSpec};
use crate::zoo::WordMetricGroup;

/// A finite tree with unit edges, rooted at vertex 0 for traversal.
#[derive(Debug, Clone)]
pub struct SimplicialTree {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    adjacency: Vec<Vec<usize>>,
    parent: Vec<usize>,
    depth: Vec<u64>,
}

impl SimplicialTree {
    pub fn from_edges(labels: Vec<String>, edges: &[(usize, usize)]) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::InvalidTree("a tree needs at least one vertex".into()));
        }
        if edges.len() != n - 1 {
            return Err(Error::InvalidTree(format!("{n} vertices need exactly {} edges, got {}", n - 1, edges.len())));
        }
        let mut index = HashMap::with_capacity(n);
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(Error::InvalidTree(format!("duplicate vertex `{l}`")));
            }
        }
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n || u == v {
                return Err(Error::InvalidTree(format!("bad edge ({u}, {v})")));
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        let mut parent = vec![usize::MAX; n];
        let mut depth = vec![u64::MAX; n];
        depth[0] = 0;
        let mut queue = std::collections::VecDeque::from([0]);
        while let Some(u) = queue.pop_front() {
            for &v in &adjacency[u] {
                if depth[v] == u64::MAX {
                    depth[v] = depth[u] + 1;
                    parent[v] = u;
                    queue.push_back(v);
                }
            }
        }
        if let Some(v) = depth.iter().position(|&d| d == u64::MAX) {
            return Err(Error::InvalidTree(format!("vertex `{}` is unreachable", labels[v])));
        }
        Ok(SimplicialTree { labels, index, adjacency, parent, depth })
    }

    /// Vertices `1, …, n` joined in a line.
    pub fn path(n: usize) -> Result<Self> {
        let labels = (1..=n).map(|i| i.to_string()).collect();
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Self::from_edges(labels, &edges)
    }

    /// Center `0` joined to leaves `1, …, k`.
    pub fn star(leaves: usize) -> Result<Self> {
        let labels = (0..=leaves).map(|i| i.to_string()).collect();
        let edges: Vec<_> = (1..=leaves).map(|i| (0, i)).collect();
        Self::from_edges(labels, &edges)
    }

    /// Complete rooted binary tree of the given depth, heap-numbered from 1.
    pub fn binary(depth: u32) -> Result<Self> {
        let n = (1usize << (depth + 1)) - 1;
        let labels = (1..=n).map(|i| i.to_string()).collect();
        let edges: Vec<_> = (2..=n).map(|i| (i / 2 - 1, i - 1)).collect();
        Self::from_edges(labels, &edges)
    }

    pub fn from_spec(spec: &TreeSpec) -> Result<Self> {
        match spec {
            TreeSpec::Explicit { vertices, edges } => {
                let labels: Vec<String> = vertices.iter().map(|l| l.0.clone()).collect();
                let lookup: HashMap<&str, usize> = labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
                let find = |l: &Label| {
                    lookup
                        .get(l.0.as_str())
                        .copied()
                        .ok_or_else(|| Error::InvalidTree(format!("edge endpoint `{}` is not a vertex", l.0)))
                };
                let edges = edges.iter().map(|(u, v)| Ok((find(u)?, find(v)?))).collect::<Result<Vec<_>>>()?;
                Self::from_edges(labels, &edges)
            }
            TreeSpec::Path { n } => Self::path(*n),
            TreeSpec::Star { leaves } => Self::star(*leaves),
            TreeSpec::Binary { depth } => Self::binary(*depth),
            TreeSpec::FreeCayley { rank, radius } => {
                Ok(WordMetricGroup::free(*rank, *radius)?.cayley_tree().as_ref().clone())
            }
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, v: usize) -> &str {
        &self.labels[v]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn vertex(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn valence(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn max_valence(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn distance(&self, u: usize, v: usize) -> u64 {
        let (mut a, mut b) = (u, v);
        let mut steps = 0;
        while self.depth[a] > self.depth[b] {
            a = self.parent[a];
            steps += 1;
        }
        while self.depth[b] > self.depth[a] {
            b = self.parent[b];
            steps += 1;
        }
        while a != b {
            a = self.parent[a];
            b = self.parent[b];
            steps += 2;
        }
        steps
    }

    /// The unique simple path from `u` to `v`, both ends included.
    pub fn geodesic(&self, u: usize, v: usize) -> Vec<usize> {
        let (mut a, mut b) = (u, v);
        let mut head = vec![a];
        let mut tail = vec![b];
        while self.depth[a] > self.depth[b] {
            a = self.parent[a];
            head.push(a);
        }
        while self.depth[b] > self.depth[a] {
            b = self.parent[b];
            tail.push(b);
        }
        while a != b {
            a = self.parent[a];
            b = self.parent[b];
            head.push(a);
            tail.push(b);
        }
        tail.pop();
        head.extend(tail.into_iter().rev());
        head
    }

    /// Vertices within distance `r` of `v`, sorted.
    pub fn ball(&self, v: usize, r: u64) -> Vec<usize> {
        let mut out = vec![v];
        let mut stack = vec![(v, usize::MAX, 0u64)];
        while let Some((u, from, d)) = stack.pop() {
            if d == r {
                continue;
            }
            for &w in &self.adjacency[u] {
                if w != from {
                    out.push(w);
                    stack.push((w, u, d + 1));
                }
            }
        }
        out.sort_unstable();
        out
    }
}

/// JSON description of a tree: an explicit vertex/edge list or a generator.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TreeSpec {
    Explicit { vertices: Vec<Label>, edges: Vec<(Label, Label)> },
    Path { n: usize },
    Star { leaves: usize },
    Binary { depth: u32 },
    FreeCayley { rank: u8, radius: u32 },
}

/// How points of the space are sent to tree vertices.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MapSpec {
    /// Each point goes to the vertex carrying the same label.
    ByLabel,
    /// Integer label `x` goes to vertex `⌈x/2⌉`.
    Halving,
    Constant {
        vertex: Label,
    },
    Explicit {
        pairs: Vec<(Label, Label)>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertificateSpec {
    pub space: SpaceSpec,
    pub tree: TreeSpec,
    pub map: MapSpec,
    pub ell: u64,
    pub m: u64,
    pub q: u64,
}

/// A map `f: X → T⁰` together with constants: valence bound `ell`,
/// quasi-isometry constant `m` and ball bound `q` at radius `m² + m`.
#[derive(Debug, Clone)]
pub struct QiCertificate {
    space: Arc<FiniteMetricSpace>,
    tree: Arc<SimplicialTree>,
    map: Vec<usize>,
    preimages: Vec<Vec<usize>>,
    ell: u64,
    m: u64,
    q: u64,
}

pub fn resolve_map(space: &FiniteMetricSpace, tree: &SimplicialTree, spec: &MapSpec) -> Result<Vec<usize>> {
    let vertex =
        |label: &str| tree.vertex(label).ok_or_else(|| Error::InvalidCertificate(format!("no tree vertex `{label}`")));
    match spec {
        MapSpec::ByLabel => space.labels().iter().map(|l| vertex(l)).collect(),
        MapSpec::Halving => space
            .labels()
            .iter()
            .map(|l| {
                let x: u64 = l
                    .parse()
                    .map_err(|_| Error::InvalidCertificate(format!("halving map needs integer labels, got `{l}`")))?;
                vertex(&x.div_ceil(2).to_string())
            })
            .collect(),
        MapSpec::Constant { vertex: v } => {
            let v = vertex(&v.0)?;
            Ok(vec![v; space.len()])
        }
        MapSpec::Explicit { pairs } => {
            let mut map = vec![usize::MAX; space.len()];
            for (x, v) in pairs {
                let i = space.point(&x.0)?;
                map[i] = vertex(&v.0)?;
            }
            if let Some(i) = map.iter().position(|&v| v == usize::MAX) {
                return Err(Error::InvalidCertificate(format!("map is not total: `{}` has no image", space.label(i))));
            }
            Ok(map)
        }
    }
}

impl QiCertificate {
    /// `ell` is raised to 2 if smaller; the counting bounds assume `ell ≥ 2`.
    pub fn new(
        space: Arc<FiniteMetricSpace>,
        tree: Arc<SimplicialTree>,
        map: Vec<usize>,
        ell: u64,
        m: u64,
        q: u64,
    ) -> Result<Self> {
        if m == 0 || q == 0 || ell == 0 {
            return Err(Error::InvalidCertificate("ell, m and q must be positive".into()));
        }
        if map.len() != space.len() {
            return Err(Error::InvalidCertificate(format!("map has {} entries for {} points", map.len(), space.len())));
        }
        let mut preimages = vec![Vec::new(); tree.len()];
        for (x, &v) in map.iter().enumerate() {
            preimages
                .get_mut(v)
                .ok_or_else(|| Error::InvalidCertificate(format!("vertex index {v} out of range")))?
                .push(x);
        }
        Ok(QiCertificate { space, tree, map, preimages, ell: ell.max(2), m, q })
    }

    pub fn from_spec(spec: &CertificateSpec) -> Result<Self> {
        let space = FiniteMetricSpace::from_spec(&spec.space)?;
        let tree = SimplicialTree::from_spec(&spec.tree)?;
        let map = resolve_map(&space, &tree, &spec.map)?;
        Self::new(Arc::new(space), Arc::new(tree), map, spec.ell, spec.m, spec.q)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_spec(&serde_json::from_str(text)?)
    }

    pub fn space(&self) -> &FiniteMetricSpace {
        &self.space
    }

    pub fn tree(&self) -> &SimplicialTree {
        &self.tree
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn ell(&self) -> u64 {
        self.ell
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    /// Points of `X` whose image lies within `r` of tree vertex `p`, sorted.
    pub fn preimage_of_ball(&self, p: usize, r: u64) -> Vec<usize> {
        let mut pts: Vec<usize> =
            self.tree.ball(p, r).into_iter().flat_map(|v| self.preimages[v].iter().copied()).collect();
        pts.sort_unstable();
        pts
    }

    /// `t = ell^(m·r1 + m + 2) · q`, the separator size budget.
    pub fn separator_budget(&self, r1: u64) -> BigUint {
        let exponent = BigUint::from(self.m) * BigUint::from(r1) + BigUint::from(self.m) + 2u32;
        BigUint::from(self.ell).pow(exponent) * BigUint::from(self.q)
    }

    /// `r3 = m²·(2·r1 + 2·r2 + 3)`.
    pub fn separation_distance(&self, r1: &BigUint, r2: &BigUint) -> BigUint {
        let m = BigUint::from(self.m);
        &m * &m * (r1 * 2u32 + r2 * 2u32 + 3u32)
    }
}

/// Which inequality of the certificate failed first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "condition", rename_all = "snake_case")]
pub enum QiViolation {
    Valence { vertex: String, valence: usize, ell: u64 },
    BallSize { point: String, radius: u64, size: usize, q: u64 },
    LowerBound { x: String, y: String, d: Dist, d_tree: u64 },
    UpperBound { x: String, y: String, d: Dist, d_tree: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QiVerdict {
    pub holds: bool,
    pub violation: Option<QiViolation>,
}

/// First pair (in lexicographic order) breaking
/// `d/m − m ≤ d_T(f x, f y) ≤ m·d + m`, compared exactly in half-units.
fn condition_c(space: &FiniteMetricSpace, tree: &SimplicialTree, map: &[usize], m: u64) -> Option<QiViolation> {
    let m = i128::from(m);
    for x in 0..space.len() {
        for y in x + 1..space.len() {
            let d = space.dist(x, y);
            let dh = i128::from(d.halves());
            let dt = tree.distance(map[x], map[y]);
            let th = 2 * i128::from(dt);
            if dh - 2 * m * m > m * th {
                return Some(QiViolation::LowerBound {
                    x: space.label(x).into(),
                    y: space.label(y).into(),
                    d,
                    d_tree: dt,
                });
            }
            if th > m * dh + 2 * m {
                return Some(QiViolation::UpperBound {
                    x: space.label(x).into(),
                    y: space.label(y).into(),
                    d,
                    d_tree: dt,
                });
            }
        }
    }
    None
}

/// Checks valence, ball size at radius `m² + m`, and the two-sided distance
/// bound over all pairs, reporting the first failure.
pub fn verify_qi(c: &QiCertificate) -> QiVerdict {
    let fail = |v| QiVerdict { holds: false, violation: Some(v) };
    for v in 0..c.tree.len() {
        if c.tree.valence(v) as u64 > c.ell {
            return fail(QiViolation::Valence {
                vertex: c.tree.label(v).into(),
                valence: c.tree.valence(v),
                ell: c.ell,
            });
        }
    }
    let radius = c.m * c.m + c.m;
    for x in 0..c.space.len() {
        let size = c.space.ball(x, Dist::from_int(radius)).len();
        if size as u64 > c.q {
            return fail(QiViolation::BallSize { point: c.space.label(x).into(), radius, size, q: c.q });
        }
    }
    match condition_c(&c.space, &c.tree, &c.map, c.m) {
        Some(v) => fail(v),
        None => QiVerdict { holds: true, violation: None },
    }
}

pub const DEFAULT_M_MAX: u64 = 64;

/// Least `m ≤ m_max` for which the distance bounds hold on every pair.
pub fn minimal_m(space: &FiniteMetricSpace, tree: &SimplicialTree, map: &[usize], m_max: u64) -> Option<u64> {
    (1..=m_max).find(|&m| condition_c(space, tree, map, m).is_none())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Separator {
    /// Tree vertex on the geodesic between the images of `x` and `y`.
    pub midpoint: String,
    /// `m·r1 + m`.
    pub radius: u64,
    pub points: Vec<String>,
    #[serde(skip)]
    pub indices: Vec<usize>,
    #[serde(with = "crate::bigint_text")]
    pub budget: BigUint,
    pub r3: u64,
}

/// Builds `Y = f⁻¹(B(p, m·r1 + m))` for the vertex `p` halfway along the tree
/// geodesic from `f(x)` to `f(y)`.
pub fn separator_from_tree(c: &QiCertificate, x: usize, y: usize, r1: u64, r2: u64) -> Result<Separator> {
    let overflow = || Error::Precondition("separation distance overflows u64".into());
    let m = c.m;
    let inner = r1
        .checked_mul(2)
        .and_then(|a| a.checked_add(r2.checked_mul(2)?))
        .and_then(|a| a.checked_add(3))
        .ok_or_else(overflow)?;
    let r3 = m.checked_mul(m).and_then(|mm| mm.checked_mul(inner)).ok_or_else(overflow)?;
    let d = c.space.dist(x, y);
    if u128::from(d.halves()) < u128::from(r3) * 2 {
        return Err(Error::TooClose { distance: d, r3: BigUint::from(r3) });
    }
    let path = c.tree.geodesic(c.map[x], c.map[y]);
    let length = (path.len() - 1) as u64;
    let required = 2 * m * (r1 + r2 + 1);
    if length < required {
        return Err(Error::GeodesicTooShort { length, required });
    }
    let p = path[length.div_ceil(2) as usize];
    let radius = m * r1 + m;
    let indices = c.preimage_of_ball(p, radius);
    Ok(Separator {
        midpoint: c.tree.label(p).into(),
        radius,
        points: indices.iter().map(|&i| c.space.label(i).to_string()).collect(),
        indices,
        budget: c.separator_budget(r1),
        r3,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreimageCount {
    pub vertex: String,
    pub radius: u64,
    pub tree_ball: usize,
    #[serde(with = "crate::bigint_text")]
    pub tree_ball_bound: BigUint,
    pub preimage: usize,
    #[serde(with = "crate::bigint_text")]
    pub preimage_bound: BigUint,
    pub holds: bool,
}

/// Counts `|B(p, R) ∩ T⁰|` against `ell^(R+1)` and `|f⁻¹(B(p, R))|` against
/// `ell^(R+2)·q`.
pub fn preimage_bound_check(c: &QiCertificate, p: usize, radius: u64) -> PreimageCount {
    let tree_ball = c.tree.ball(p, radius).len();
    let ell = BigUint::from(c.ell);
    let tree_ball_bound = ell.clone().pow(radius + 1);
    let preimage = c.preimage_of_ball(p, radius).len();
    let preimage_bound = ell.pow(radius + 2) * BigUint::from(c.q);
    let holds = BigUint::from(tree_ball) <= tree_ball_bound && BigUint::from(preimage) <= preimage_bound;
    PreimageCount {
        vertex: c.tree.label(p).into(),
        radius,
        tree_ball,
        tree_ball_bound,
        preimage,
        preimage_bound,
        holds,
    }
}
