//! Lazily evaluated permutations of the positive integers.
//!
//! Permutations act on the right: the image of `x` under `g` is written
//! `xg`, and a product `g·h` first applies `g`, then `h`. A [`PermSpec`] is
//! an expression tree that is only ever evaluated point by point, so
//! permutations with infinite support are represented exactly.

use std::collections::{BTreeMap, BTreeSet};
use std::ops::RangeInclusive;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Point = u64;

/// Default cap on primitive applications per evaluated point.
pub const DEFAULT_BUDGET: u64 = 1_000_000;

/// The window `{1, …, N}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct Window(u64);

impl Window {
    pub fn new(upper: u64) -> Result<Self> {
        if upper == 0 {
            return Err(Error::EmptyWindow);
        }
        Ok(Window(upper))
    }

    pub fn size(self) -> u64 {
        self.0
    }

    pub fn contains(self, x: Point) -> bool {
        (1..=self.0).contains(&x)
    }

    pub fn points(self) -> RangeInclusive<Point> {
        1..=self.0
    }
}

impl TryFrom<u64> for Window {
    type Error = Error;

    fn try_from(upper: u64) -> Result<Self> {
        Window::new(upper)
    }
}

impl From<Window> for u64 {
    fn from(w: Window) -> u64 {
        w.0
    }
}

/// A bijection of a finite set of points onto itself; points outside the
/// domain are fixed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(Point, Point)>", into = "Vec<(Point, Point)>")]
pub struct PointMap {
    forward: BTreeMap<Point, Point>,
    backward: BTreeMap<Point, Point>,
}

impl PointMap {
    pub fn new(pairs: impl IntoIterator<Item = (Point, Point)>) -> Result<Self> {
        let mut forward = BTreeMap::new();
        let mut backward = BTreeMap::new();
        for (x, y) in pairs {
            if x == 0 || y == 0 {
                return Err(Error::ZeroPoint);
            }
            if forward.insert(x, y).is_some() {
                return Err(Error::InvalidPermutation(format!("point {x} mapped twice")));
            }
            if backward.insert(y, x).is_some() {
                return Err(Error::InvalidPermutation(format!("point {y} hit twice")));
            }
        }
        if forward.keys().ne(backward.keys()) {
            return Err(Error::InvalidPermutation("finite map must permute its own domain".into()));
        }
        Ok(PointMap { forward, backward })
    }

    /// Builds the map from disjoint cycles, e.g. `[[1, 2, 3], [5, 6]]`.
    pub fn from_cycles(cycles: &[Vec<Point>]) -> Result<Self> {
        let mut pairs = Vec::new();
        for cycle in cycles {
            for (i, &x) in cycle.iter().enumerate() {
                pairs.push((x, cycle[(i + 1) % cycle.len()]));
            }
        }
        PointMap::new(pairs)
    }

    pub fn image(&self, x: Point) -> Point {
        self.forward.get(&x).copied().unwrap_or(x)
    }

    pub fn preimage(&self, y: Point) -> Point {
        self.backward.get(&y).copied().unwrap_or(y)
    }

    pub fn max_displacement(&self) -> u64 {
        self.forward.iter().map(|(&x, &y)| x.abs_diff(y)).max().unwrap_or(0)
    }

    pub fn pairs(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        self.forward.iter().map(|(&x, &y)| (x, y))
    }
}

impl TryFrom<Vec<(Point, Point)>> for PointMap {
    type Error = Error;

    fn try_from(pairs: Vec<(Point, Point)>) -> Result<Self> {
        PointMap::new(pairs)
    }
}

impl From<PointMap> for Vec<(Point, Point)> {
    fn from(map: PointMap) -> Self {
        map.forward.into_iter().collect()
    }
}

/// One permutation of `{1, …, k}` repeated on every block
/// `B_{k,ℓ} = {k(ℓ−1)+1, …, kℓ}`. Serialized as the images of `1, …, k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Point>", into = "Vec<Point>")]
pub struct BlockPattern {
    forward: Arc<[u32]>,
    backward: Arc<[u32]>,
}

impl BlockPattern {
    /// `offsets[i]` is the 0-based offset that offset `i` is sent to.
    pub fn from_offsets(offsets: Vec<u32>) -> Result<Self> {
        let k = offsets.len();
        if k == 0 {
            return Err(Error::InvalidPermutation("block size must be positive".into()));
        }
        let mut backward = vec![u32::MAX; k];
        for (i, &o) in offsets.iter().enumerate() {
            let slot = backward
                .get_mut(o as usize)
                .ok_or_else(|| Error::InvalidPermutation(format!("block offset {o} out of range for size {k}")))?;
            if *slot != u32::MAX {
                return Err(Error::InvalidPermutation(format!("block offset {o} hit twice")));
            }
            *slot = i as u32;
        }
        Ok(BlockPattern { forward: offsets.into(), backward: backward.into() })
    }

    pub fn block_size(&self) -> u64 {
        self.forward.len() as u64
    }

    pub fn offsets(&self) -> &[u32] {
        &self.forward
    }

    fn map(table: &[u32], x: Point) -> Point {
        let k = table.len() as u64;
        let start = (x - 1) / k * k;
        start + u64::from(table[((x - 1) % k) as usize]) + 1
    }

    pub fn image(&self, x: Point) -> Point {
        Self::map(&self.forward, x)
    }

    pub fn preimage(&self, y: Point) -> Point {
        Self::map(&self.backward, y)
    }
}

impl TryFrom<Vec<Point>> for BlockPattern {
    type Error = Error;

    fn try_from(images: Vec<Point>) -> Result<Self> {
        let k = images.len() as u64;
        let offsets = images
            .into_iter()
            .map(|y| match y {
                1.. if y <= k && k <= u64::from(u32::MAX) => Ok((y - 1) as u32),
                _ => Err(Error::InvalidPermutation(format!("block image {y} outside 1..={k}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        BlockPattern::from_offsets(offsets)
    }
}

impl From<BlockPattern> for Vec<Point> {
    fn from(p: BlockPattern) -> Self {
        p.forward.iter().map(|&o| u64::from(o) + 1).collect()
    }
}

/// Which pairs `(2i−1, 2i)` a masked involution swaps.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "MaskRepr", into = "MaskRepr")]
pub enum PairMask {
    All,
    Finite(BTreeSet<u64>),
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum MaskRepr {
    Word(String),
    Indices(BTreeSet<u64>),
}

impl TryFrom<MaskRepr> for PairMask {
    type Error = Error;

    fn try_from(repr: MaskRepr) -> Result<Self> {
        match repr {
            MaskRepr::Word(w) if w == "all" => Ok(PairMask::All),
            MaskRepr::Word(w) => {
                Err(Error::InvalidPermutation(format!("mask must be \"all\" or a list of pair indices, got {w:?}")))
            }
            MaskRepr::Indices(s) if s.contains(&0) => Err(Error::ZeroPoint),
            MaskRepr::Indices(s) => Ok(PairMask::Finite(s)),
        }
    }
}

impl From<PairMask> for MaskRepr {
    fn from(mask: PairMask) -> Self {
        match mask {
            PairMask::All => MaskRepr::Word("all".into()),
            PairMask::Finite(s) => MaskRepr::Indices(s),
        }
    }
}

impl PairMask {
    pub fn contains(&self, pair: u64) -> bool {
        match self {
            PairMask::All => true,
            PairMask::Finite(s) => s.contains(&pair),
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, PairMask::Finite(s) if s.is_empty())
    }
}

/// Which residue class an interleaved permutation acts on. `Odd` transports
/// the inner permutation along `x ↦ 2x − 1`, `Even` along `x ↦ 2x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    Odd,
    Even,
}

impl Parity {
    fn owns(self, y: Point) -> bool {
        match self {
            Parity::Odd => y % 2 == 1,
            Parity::Even => y.is_multiple_of(2),
        }
    }

    fn embed(self, x: Point) -> Option<Point> {
        let doubled = x.checked_mul(2)?;
        Some(match self {
            Parity::Odd => doubled - 1,
            Parity::Even => doubled,
        })
    }

    fn unembed(self, y: Point) -> Point {
        match self {
            Parity::Odd => y.div_ceil(2),
            Parity::Even => y / 2,
        }
    }
}

/// An expression denoting a bijection of the positive integers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PermSpec {
    Identity,
    FiniteSupport {
        map: PointMap,
    },
    /// `1 ↦ 2`, even `x ↦ x + 2`, odd `x ≥ 3 ↦ x − 2`: a single infinite cycle.
    ShiftG,
    BlockCycles {
        first_block: BlockPattern,
    },
    /// Product of the transpositions `(2i−1 2i)` for `i` in the mask.
    MaskedInvolution {
        mask: PairMask,
    },
    Interleaved {
        parity: Parity,
        inner: Box<PermSpec>,
    },
    /// `x·(left·right) = (x·left)·right`.
    Compose {
        left: Box<PermSpec>,
        right: Box<PermSpec>,
    },
    Inverse {
        inner: Box<PermSpec>,
    },
    Power {
        inner: Box<PermSpec>,
        exponent: i64,
    },
}

/// Worst displacement seen on a window, plus a bound valid on all of ℤ⁺ when
/// one follows from the expression structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DisplacementReport {
    pub window_sup: u64,
    pub symbolic: Option<u64>,
}

impl PermSpec {
    pub fn finite(map: PointMap) -> Self {
        PermSpec::FiniteSupport { map }
    }

    pub fn from_cycles(cycles: &[Vec<Point>]) -> Result<Self> {
        Ok(PermSpec::finite(PointMap::from_cycles(cycles)?))
    }

    pub fn compose(left: PermSpec, right: PermSpec) -> Self {
        PermSpec::Compose { left: Box::new(left), right: Box::new(right) }
    }

    pub fn inverse(inner: PermSpec) -> Self {
        PermSpec::Inverse { inner: Box::new(inner) }
    }

    /// Negative exponents are rewritten as a positive power of the inverse.
    pub fn power(inner: PermSpec, exponent: i64) -> Self {
        if exponent < 0 && exponent != i64::MIN {
            PermSpec::Power { inner: Box::new(PermSpec::inverse(inner)), exponent: -exponent }
        } else {
            PermSpec::Power { inner: Box::new(inner), exponent }
        }
    }

    pub fn interleaved(parity: Parity, inner: PermSpec) -> Self {
        PermSpec::Interleaved { parity, inner: Box::new(inner) }
    }

    pub fn masked_involution(mask: PairMask) -> Self {
        PermSpec::MaskedInvolution { mask }
    }

    pub fn block_cycles(first_block: BlockPattern) -> Self {
        PermSpec::BlockCycles { first_block }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("PermSpec serialization is infallible")
    }

    pub fn apply(&self, x: Point) -> Result<Point> {
        Evaluator::default().apply(self, x)
    }

    pub fn apply_inverse(&self, y: Point) -> Result<Point> {
        Evaluator::default().apply_inverse(self, y)
    }

    /// A displacement bound valid on every point, derived from the structure
    /// alone. `None` when no bound is derivable (or it overflows).
    pub fn symbolic_bound(&self) -> Option<u64> {
        match self {
            PermSpec::Identity => Some(0),
            PermSpec::FiniteSupport { map } => Some(map.max_displacement()),
            PermSpec::ShiftG => Some(2),
            PermSpec::BlockCycles { first_block } => Some(first_block.block_size() - 1),
            PermSpec::MaskedInvolution { mask } => Some(u64::from(!mask.is_empty())),
            PermSpec::Interleaved { inner, .. } => inner.symbolic_bound()?.checked_mul(2),
            PermSpec::Compose { left, right } => left.symbolic_bound()?.checked_add(right.symbolic_bound()?),
            PermSpec::Inverse { inner } => inner.symbolic_bound(),
            PermSpec::Power { inner, exponent } => {
                if *exponent == 0 {
                    Some(0)
                } else {
                    inner.symbolic_bound()?.checked_mul(exponent.unsigned_abs())
                }
            }
        }
    }

    pub fn displacement_bound(&self, w: Window) -> Result<DisplacementReport> {
        let eval = Evaluator::default();
        let mut window_sup = 0;
        for x in w.points() {
            window_sup = window_sup.max(x.abs_diff(eval.apply(self, x)?));
        }
        Ok(DisplacementReport { window_sup, symbolic: self.symbolic_bound() })
    }

    pub fn equal_on_window(&self, other: &PermSpec, w: Window) -> Result<bool> {
        let eval = Evaluator::default();
        for x in w.points() {
            if eval.apply(self, x)? != eval.apply(other, x)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn support_in_window(&self, w: Window) -> Result<BTreeSet<Point>> {
        let eval = Evaluator::default();
        let mut support = BTreeSet::new();
        for x in w.points() {
            if eval.apply(self, x)? != x {
                support.insert(x);
            }
        }
        Ok(support)
    }

    /// True iff the window is mapped onto itself. Since `self` is a
    /// bijection, mapping the window into itself suffices.
    pub fn is_invariant_window(&self, w: Window) -> Result<bool> {
        let eval = Evaluator::default();
        // Escapes cluster at the top of the window for every shipped family.
        for x in w.points().rev() {
            if !w.contains(eval.apply(self, x)?) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Images of `1, …, N` in order.
    pub fn window_images(&self, w: Window) -> Result<Vec<Point>> {
        let eval = Evaluator::default();
        w.points().map(|x| eval.apply(self, x)).collect()
    }
}

/// Point-wise evaluator with a cap on primitive applications per call.
#[derive(Debug, Clone, Copy)]
pub struct Evaluator {
    budget: u64,
}

impl Default for Evaluator {
    fn default() -> Self {
        Evaluator { budget: DEFAULT_BUDGET }
    }
}

impl Evaluator {
    pub fn with_budget(budget: u64) -> Self {
        Evaluator { budget }
    }

    pub fn apply(&self, g: &PermSpec, x: Point) -> Result<Point> {
        if x == 0 {
            return Err(Error::ZeroPoint);
        }
        let mut steps = 0;
        self.eval(g, x, false, &mut steps)
    }

    pub fn apply_inverse(&self, g: &PermSpec, y: Point) -> Result<Point> {
        if y == 0 {
            return Err(Error::ZeroPoint);
        }
        let mut steps = 0;
        self.eval(g, y, true, &mut steps)
    }

    fn tick(&self, steps: &mut u64) -> Result<()> {
        *steps += 1;
        if *steps > self.budget {
            return Err(Error::BudgetExceeded { budget: self.budget });
        }
        Ok(())
    }

    fn eval(&self, g: &PermSpec, x: Point, inverse: bool, steps: &mut u64) -> Result<Point> {
        match g {
            PermSpec::Identity => {
                self.tick(steps)?;
                Ok(x)
            }
            PermSpec::FiniteSupport { map } => {
                self.tick(steps)?;
                Ok(if inverse { map.preimage(x) } else { map.image(x) })
            }
            PermSpec::ShiftG => {
                self.tick(steps)?;
                shift_g(x, inverse)
            }
            PermSpec::BlockCycles { first_block } => {
                self.tick(steps)?;
                Ok(if inverse { first_block.preimage(x) } else { first_block.image(x) })
            }
            PermSpec::MaskedInvolution { mask } => {
                self.tick(steps)?;
                let pair = x.div_ceil(2);
                Ok(match (mask.contains(pair), x % 2) {
                    (false, _) => x,
                    (true, 1) => x + 1,
                    (true, _) => x - 1,
                })
            }
            PermSpec::Interleaved { parity, inner } => {
                if !parity.owns(x) {
                    self.tick(steps)?;
                    return Ok(x);
                }
                let image = self.eval(inner, parity.unembed(x), inverse, steps)?;
                parity.embed(image).ok_or(Error::Overflow { point: x })
            }
            PermSpec::Compose { left, right } => {
                if inverse {
                    let mid = self.eval(right, x, true, steps)?;
                    self.eval(left, mid, true, steps)
                } else {
                    let mid = self.eval(left, x, false, steps)?;
                    self.eval(right, mid, false, steps)
                }
            }
            PermSpec::Inverse { inner } => self.eval(inner, x, !inverse, steps),
            PermSpec::Power { inner, exponent } => {
                let direction = inverse ^ (*exponent < 0);
                let mut y = x;
                for _ in 0..exponent.unsigned_abs() {
                    y = self.eval(inner, y, direction, steps)?;
                }
                if *exponent == 0 {
                    self.tick(steps)?;
                }
                Ok(y)
            }
        }
    }
}

fn shift_g(x: Point, inverse: bool) -> Result<Point> {
    let overflow = Error::Overflow { point: x };
    if !inverse {
        match x {
            1 => Ok(2),
            _ if x.is_multiple_of(2) => x.checked_add(2).ok_or(overflow),
            _ => Ok(x - 2),
        }
    } else {
        match x {
            2 => Ok(1),
            _ if x.is_multiple_of(2) => Ok(x - 2),
            _ => x.checked_add(2).ok_or(overflow),
        }
    }
}
