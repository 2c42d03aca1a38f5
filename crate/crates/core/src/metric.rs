//! Finite metric spaces, balls, r-chains and the `sep` predicate.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::tree::{SimplicialTree, TreeSpec};
use crate::zoo::{GroupSpec, WordMetricGroup};

/// A non-negative distance that is an integer or a half-integer, stored in
/// half-units so comparisons are exact.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Dist(u64);

impl Dist {
    pub const ZERO: Dist = Dist(0);

    pub fn from_int(d: u64) -> Self {
        Dist(d.checked_mul(2).expect("distance overflows half-unit storage"))
    }

    pub fn from_halves(h: u64) -> Self {
        Dist(h)
    }

    pub fn halves(self) -> u64 {
        self.0
    }

    pub fn is_integer(self) -> bool {
        self.0.is_multiple_of(2)
    }

    pub fn floor(self) -> u64 {
        self.0 / 2
    }
}

impl std::ops::Add for Dist {
    type Output = Dist;

    fn add(self, rhs: Dist) -> Dist {
        Dist(self.0 + rhs.0)
    }
}

impl fmt::Display for Dist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}.5", self.0 / 2)
        }
    }
}

impl Serialize for Dist {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.is_integer() {
            s.serialize_u64(self.0 / 2)
        } else {
            s.serialize_f64(self.0 as f64 / 2.0)
        }
    }
}

impl<'de> Deserialize<'de> for Dist {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let v = serde_json::Number::deserialize(d)?;
        if let Some(n) = v.as_u64() {
            return n.checked_mul(2).map(Dist).ok_or_else(|| D::Error::custom("distance too large"));
        }
        let x = v.as_f64().ok_or_else(|| D::Error::custom("distance must be a number"))?;
        let h = x * 2.0;
        if !(0.0..=1e15).contains(&h) || h.fract() != 0.0 {
            return Err(D::Error::custom(format!("distance {x} is not a non-negative integer or half-integer")));
        }
        Ok(Dist(h as u64))
    }
}

/// A point label given in JSON as a string or an integer.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "LabelRepr", into = "String")]
pub struct Label(pub String);

#[derive(Deserialize)]
#[serde(untagged)]
enum LabelRepr {
    Int(i64),
    Text(String),
}

impl From<LabelRepr> for Label {
    fn from(r: LabelRepr) -> Self {
        match r {
            LabelRepr::Int(i) => Label(i.to_string()),
            LabelRepr::Text(s) => Label(s),
        }
    }
}

impl From<Label> for String {
    fn from(l: Label) -> String {
        l.0
    }
}

#[derive(Debug, Clone)]
enum Metric {
    /// Row-major distances in half-units.
    Table(Vec<u64>),
    /// Points `1, …, n` with `|i − j|`.
    Interval,
    /// The cycle graph on `1, …, n`.
    Cycle,
    /// Path metric of a tree on its vertices.
    Tree(Arc<SimplicialTree>),
}

/// A finite metric space. Points are indices `0..len()` carrying labels.
#[derive(Debug, Clone)]
pub struct FiniteMetricSpace {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    metric: Metric,
}

/// JSON description of a space.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpaceSpec {
    Table {
        #[serde(default)]
        labels: Option<Vec<Label>>,
        distances: Vec<Vec<Dist>>,
    },
    Interval {
        n: usize,
    },
    Cycle {
        n: usize,
    },
    WordMetric {
        group: GroupSpec,
    },
    Tree {
        tree: TreeSpec,
    },
}

impl FiniteMetricSpace {
    fn with_labels(labels: Vec<String>, metric: Metric) -> Self {
        let index = labels.iter().enumerate().map(|(i, l)| (l.clone(), i)).collect();
        FiniteMetricSpace { labels, index, metric }
    }

    fn numbered(n: usize) -> Vec<String> {
        (1..=n).map(|i| i.to_string()).collect()
    }

    pub fn interval(n: usize) -> Self {
        Self::with_labels(Self::numbered(n), Metric::Interval)
    }

    pub fn cycle(n: usize) -> Self {
        Self::with_labels(Self::numbered(n), Metric::Cycle)
    }

    pub fn tree(tree: Arc<SimplicialTree>) -> Self {
        Self::with_labels(tree.labels().to_vec(), Metric::Tree(tree))
    }

    /// Validates the metric axioms: zero diagonal, positivity, symmetry and
    /// the triangle inequality.
    pub fn from_table(labels: Vec<String>, distances: Vec<Vec<Dist>>) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::MetricAxiom("a space needs at least one point".into()));
        }
        if distances.len() != n || distances.iter().any(|row| row.len() != n) {
            return Err(Error::MetricAxiom(format!("distance table must be {n}×{n}")));
        }
        let mut seen = HashMap::new();
        for (i, l) in labels.iter().enumerate() {
            if seen.insert(l.as_str(), i).is_some() {
                return Err(Error::MetricAxiom(format!("duplicate point `{l}`")));
            }
        }
        let d = |i: usize, j: usize| distances[i][j];
        for i in 0..n {
            if d(i, i) != Dist::ZERO {
                return Err(Error::MetricAxiom(format!("d({0}, {0}) = {1} ≠ 0", labels[i], d(i, i))));
            }
            for j in 0..n {
                if d(i, j) != d(j, i) {
                    return Err(Error::MetricAxiom(format!("d({0}, {1}) ≠ d({1}, {0})", labels[i], labels[j])));
                }
                if i != j && d(i, j) == Dist::ZERO {
                    return Err(Error::MetricAxiom(format!(
                        "distinct points {} and {} at distance 0",
                        labels[i], labels[j]
                    )));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if d(i, k) > d(i, j) + d(j, k) {
                        return Err(Error::MetricAxiom(format!(
                            "triangle inequality fails: d({0}, {2}) > d({0}, {1}) + d({1}, {2})",
                            labels[i], labels[j], labels[k]
                        )));
                    }
                }
            }
        }
        let flat = distances.into_iter().flatten().map(Dist::halves).collect();
        Ok(Self::with_labels(labels, Metric::Table(flat)))
    }

    pub fn from_spec(spec: &SpaceSpec) -> Result<Self> {
        match spec {
            SpaceSpec::Table { labels, distances } => {
                let labels = match labels {
                    Some(ls) => ls.iter().map(|l| l.0.clone()).collect(),
                    None => Self::numbered(distances.len()),
                };
                Self::from_table(labels, distances.clone())
            }
            SpaceSpec::Interval { n } | SpaceSpec::Cycle { n } if *n == 0 => {
                Err(Error::MetricAxiom("a space needs at least one point".into()))
            }
            SpaceSpec::Interval { n } => Ok(Self::interval(*n)),
            SpaceSpec::Cycle { n } => Ok(Self::cycle(*n)),
            SpaceSpec::WordMetric { group } => {
                WordMetricGroup::from_spec(group)?.metric_space().map(|s| s.as_ref().clone())
            }
            SpaceSpec::Tree { tree } => Ok(Self::tree(Arc::new(SimplicialTree::from_spec(tree)?))),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_spec(&serde_json::from_str(text)?)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn point(&self, label: &str) -> Result<usize> {
        self.index.get(label).copied().ok_or_else(|| Error::UnknownPoint(label.into()))
    }

    pub fn dist(&self, a: usize, b: usize) -> Dist {
        let n = self.len();
        match &self.metric {
            Metric::Table(t) => Dist(t[a * n + b]),
            Metric::Interval => Dist::from_int(a.abs_diff(b) as u64),
            Metric::Cycle => {
                let k = a.abs_diff(b);
                Dist::from_int(k.min(n - k) as u64)
            }
            Metric::Tree(t) => Dist::from_int(t.distance(a, b)),
        }
    }

    /// `B(x, r) = {y | d(y, x) ≤ r}`, sorted.
    pub fn ball(&self, x: usize, r: Dist) -> Vec<usize> {
        let n = self.len();
        let k = usize::try_from(r.floor()).unwrap_or(usize::MAX);
        match &self.metric {
            Metric::Table(t) => (0..n).filter(|&y| t[x * n + y] <= r.0).collect(),
            Metric::Interval => (x.saturating_sub(k)..=x.saturating_add(k).min(n - 1)).collect(),
            Metric::Cycle => {
                if k.saturating_mul(2) + 1 >= n {
                    (0..n).collect()
                } else {
                    let mut pts: Vec<usize> = (0..=2 * k).map(|i| (x + n + i - k) % n).collect();
                    pts.sort_unstable();
                    pts
                }
            }
            Metric::Tree(t) => t.ball(x, r.floor()),
        }
    }

    pub fn max_ball_size(&self, r: Dist) -> usize {
        (0..self.len()).map(|x| self.ball(x, r).len()).max().unwrap_or(0)
    }

    /// `r ↦ max_x |B(x, r)|` for `r = 1, …, r_max`.
    pub fn condition1_table(&self, r_max: u64) -> BTreeMap<u64, usize> {
        (1..=r_max).map(|r| (r, self.max_ball_size(Dist::from_int(r)))).collect()
    }

    pub fn diameter(&self) -> Dist {
        let n = self.len();
        match &self.metric {
            Metric::Interval => Dist::from_int(n as u64 - 1),
            Metric::Cycle => Dist::from_int((n / 2) as u64),
            Metric::Tree(t) => {
                // a farthest point from anywhere is an end of a longest path
                let far = |from: usize| (0..n).max_by_key(|&v| (t.distance(from, v), std::cmp::Reverse(v))).unwrap();
                let end = far(0);
                Dist::from_int(t.distance(end, far(end)))
            }
            _ => (0..n)
                .flat_map(|a| (0..n).map(move |b| (a, b)))
                .map(|(a, b)| self.dist(a, b))
                .max()
                .unwrap_or(Dist::ZERO),
        }
    }

    /// Points reachable from `sources` by `r1`-chains that never enter `blocked`.
    fn reach(&self, sources: impl IntoIterator<Item = usize>, r1: u64, blocked: &[bool]) -> Vec<bool> {
        let mut seen = vec![false; self.len()];
        let mut queue = VecDeque::new();
        for s in sources {
            if !blocked[s] && !seen[s] {
                seen[s] = true;
                queue.push_back(s);
            }
        }
        let r = Dist::from_int(r1);
        while let Some(u) = queue.pop_front() {
            for v in self.ball(u, r) {
                if !blocked[v] && !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        seen
    }

    fn mask(&self, set: &[usize]) -> Vec<bool> {
        let mut m = vec![false; self.len()];
        for &i in set {
            m[i] = true;
        }
        m
    }

    /// Whether some `r1`-chain from `z` to `w` avoids every point of `avoid`.
    pub fn chain_exists(&self, z: usize, w: usize, r1: u64, avoid: &[usize]) -> bool {
        self.reach([z], r1, &self.mask(avoid))[w]
    }

    /// `sep(Y, r1, r2, x, y)`: every `r1`-chain from a point of `B(x, r2)` to a
    /// point of `B(y, r2)` contains an element of `Y`.
    pub fn sep_check(&self, q: &SepQuery) -> bool {
        let blocked = self.mask(&q.separator);
        let r2 = Dist::from_int(q.r2);
        let reached = self.reach(self.ball(q.x, r2), q.r1, &blocked);
        !self.ball(q.y, r2).into_iter().any(|w| reached[w])
    }
}

/// Arguments of the `sep` predicate, by point index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SepQuery {
    pub separator: Vec<usize>,
    pub r1: u64,
    pub r2: u64,
    pub x: usize,
    pub y: usize,
}
