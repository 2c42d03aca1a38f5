//! Cycle decomposition, orders and n-th roots of finite permutations.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm::{PermSpec, Point, PointMap, Window};

/// A permutation of `{0, …, n−1}` stored as its image table. Displayed in
/// cycle notation on the points `i + 1`, so a window permutation prints in
/// its own coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FinitePerm {
    images: Vec<usize>,
}

impl FinitePerm {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; images.len()];
        for &y in &images {
            match seen.get_mut(y) {
                Some(s) if !*s => *s = true,
                _ => {
                    return Err(Error::InvalidPermutation(format!(
                        "image {y} repeated or out of range for size {}",
                        images.len()
                    )))
                }
            }
        }
        Ok(FinitePerm { images })
    }

    pub fn identity(n: usize) -> Self {
        FinitePerm { images: (0..n).collect() }
    }

    /// Builds a permutation of `{0, …, n−1}` from disjoint 0-based cycles.
    pub fn from_cycles(n: usize, cycles: &[Vec<usize>]) -> Result<Self> {
        let mut images: Vec<usize> = (0..n).collect();
        let mut touched = vec![false; n];
        for cycle in cycles {
            for (i, &x) in cycle.iter().enumerate() {
                if x >= n || std::mem::replace(&mut touched[x], true) {
                    return Err(Error::InvalidPermutation(format!("cycle point {x} repeated or out of range")));
                }
                images[x] = cycle[(i + 1) % cycle.len()];
            }
        }
        Ok(FinitePerm { images })
    }

    /// Restriction of `g` to an invariant window; index `i` stands for point `i + 1`.
    pub fn from_spec(g: &PermSpec, w: Window) -> Result<Self> {
        let images = g.window_images(w)?;
        if images.iter().any(|&y| !w.contains(y)) {
            return Err(Error::NotInvariant { window: w.size() });
        }
        FinitePerm::new(images.into_iter().map(|y| (y - 1) as usize).collect())
    }

    /// The same permutation on points `i + 1`, as a finite-support spec.
    pub fn to_spec(&self) -> PermSpec {
        let pairs =
            self.images.iter().enumerate().filter(|&(i, &y)| i != y).map(|(i, &y)| (i as Point + 1, y as Point + 1));
        PermSpec::finite(PointMap::new(pairs).expect("a permutation table is a bijection"))
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn image(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &y)| i == y)
    }

    /// `self·other`: apply `self`, then `other`.
    pub fn then(&self, other: &FinitePerm) -> FinitePerm {
        assert_eq!(self.len(), other.len(), "composing permutations of different sizes");
        FinitePerm { images: self.images.iter().map(|&y| other.images[y]).collect() }
    }

    pub fn inverse(&self) -> FinitePerm {
        let mut images = vec![0; self.len()];
        for (i, &y) in self.images.iter().enumerate() {
            images[y] = i;
        }
        FinitePerm { images }
    }

    pub fn pow(&self, exponent: i64) -> FinitePerm {
        let mut base = if exponent < 0 { self.inverse() } else { self.clone() };
        let mut e = exponent.unsigned_abs();
        let mut acc = FinitePerm::identity(self.len());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.then(&base);
            }
            base = base.then(&base);
            e >>= 1;
        }
        acc
    }

    /// All orbits, each rotated to start at its minimum, sorted by that minimum.
    pub fn orbits(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.len()];
        let mut out = Vec::new();
        for start in 0..self.len() {
            if seen[start] {
                continue;
            }
            let mut orbit = vec![start];
            seen[start] = true;
            let mut x = self.images[start];
            while x != start {
                seen[x] = true;
                orbit.push(x);
                x = self.images[x];
            }
            out.push(orbit);
        }
        out
    }

    /// Orbits of length at least two.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        self.orbits().into_iter().filter(|c| c.len() > 1).collect()
    }

    pub fn cycle_type(&self) -> CycleType {
        let mut ct = CycleType::default();
        for orbit in self.orbits() {
            ct.add(orbit.len() as u64, 1);
        }
        ct
    }

    pub fn order(&self) -> BigUint {
        self.cycle_type().order()
    }

    /// An `h` with `hⁿ = self`, if one exists.
    ///
    /// Cycles of each length `L` are taken in order of their minimal element
    /// and cut into consecutive groups; group sizes are chosen largest-first
    /// among admissible sizes that still leave a feasible remainder. Each
    /// group of `d` cycles becomes one cycle of length `d·L` whose `n`-th
    /// power splits back into exactly that group. Fixed points stay fixed.
    pub fn nth_root(&self, n: u64) -> Option<FinitePerm> {
        assert!(n > 0, "root exponent must be positive");
        let mut by_length: BTreeMap<usize, Vec<Vec<usize>>> = BTreeMap::new();
        for cycle in self.cycles() {
            by_length.entry(cycle.len()).or_default().push(cycle);
        }
        let mut images: Vec<usize> = (0..self.len()).collect();
        for (len, cycles) in by_length {
            let parts = root_partition(len as u64, cycles.len() as u64, n)?;
            let mut rest = cycles.as_slice();
            for d in parts {
                let (group, tail) = rest.split_at(d as usize);
                rest = tail;
                let root = interleave(group, n);
                for (i, &x) in root.iter().enumerate() {
                    images[x] = root[(i + 1) % root.len()];
                }
            }
        }
        Some(FinitePerm { images })
    }
}

impl fmt::Display for FinitePerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return f.write_str("()");
        }
        for c in cycles {
            f.write_str("(")?;
            for (i, x) in c.iter().enumerate() {
                if i > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{}", x + 1)?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

/// Merges `d` equal-length cycles into one cycle of length `d·L` whose
/// `n`-th power is exactly those cycles. Requires `gcd(d·L, n) = d`.
///
/// Position `(j + i·n) mod d·L` of the merged cycle holds the `i`-th entry of
/// the `j`-th input cycle; stepping `n` positions stays in one residue class
/// mod `d` and advances that cycle by one.
pub fn interleave<T: Copy>(group: &[Vec<T>], n: u64) -> Vec<T> {
    let d = group.len();
    let len = group[0].len();
    let total = d * len;
    debug_assert!(group.iter().all(|c| c.len() == len));
    debug_assert_eq!((total as u64).gcd(&n), d as u64);
    let step = (n % total as u64) as usize;
    let mut merged = vec![group[0][0]; total];
    for (j, cycle) in group.iter().enumerate() {
        for (i, &x) in cycle.iter().enumerate() {
            merged[(j + i * step) % total] = x;
        }
    }
    merged
}

/// Group sizes `d` (with `gcd(d·len, n) = d`) summing to `count`: at each
/// step the largest admissible size whose remainder is still feasible.
fn root_partition(len: u64, count: u64, n: u64) -> Option<Vec<u64>> {
    let sizes: Vec<u64> = divisors(n).into_iter().filter(|&d| d <= count && (d * len).gcd(&n) == d).rev().collect();
    let count_ix = usize::try_from(count).ok()?;
    let mut feasible = vec![false; count_ix + 1];
    feasible[0] = true;
    for c in 1..=count_ix {
        feasible[c] = sizes.iter().any(|&d| d as usize <= c && feasible[c - d as usize]);
    }
    if !feasible[count_ix] {
        return None;
    }
    let mut parts = Vec::new();
    let mut rest = count_ix;
    while rest > 0 {
        let d = sizes
            .iter()
            .copied()
            .find(|&d| d as usize <= rest && feasible[rest - d as usize])
            .expect("feasible remainder has an admissible part");
        parts.push(d);
        rest -= d as usize;
    }
    Some(parts)
}

fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n.is_multiple_of(d) {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// Cycle lengths (at least two) with multiplicities, plus the fixed points.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleType {
    pub cycles: BTreeMap<u64, u64>,
    pub fixed_points: u64,
}

impl CycleType {
    pub fn new(cycles: impl IntoIterator<Item = (u64, u64)>, fixed_points: u64) -> Self {
        let mut ct = CycleType { cycles: BTreeMap::new(), fixed_points };
        for (len, count) in cycles {
            ct.add(len, count);
        }
        ct
    }

    fn add(&mut self, len: u64, count: u64) {
        match len {
            0 => {}
            1 => self.fixed_points += count,
            _ if count > 0 => *self.cycles.entry(len).or_default() += count,
            _ => {}
        }
    }

    /// Number of points the permutation acts on.
    pub fn size(&self) -> u64 {
        self.fixed_points + self.cycles.iter().map(|(l, c)| l * c).sum::<u64>()
    }

    pub fn order(&self) -> BigUint {
        self.cycles.keys().fold(BigUint::one(), |acc, &l| acc.lcm(&BigUint::from(l)))
    }

    /// Whether some permutation on the same points has this cycle type as its
    /// `n`-th power: every count `c_L` must split into parts `d` with
    /// `gcd(d·L, n) = d`.
    pub fn nth_root_exists(&self, n: u64) -> bool {
        assert!(n > 0, "root exponent must be positive");
        self.cycles.iter().all(|(&len, &count)| root_partition(len, count, n).is_some())
    }
}

impl fmt::Display for CycleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (l, c)) in self.cycles.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{l}: {c}")?;
        }
        write!(f, "}} + {} fixed", self.fixed_points)
    }
}

pub fn nth_root_exists(ct: &CycleType, n: u64) -> bool {
    ct.nth_root_exists(n)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CycleTrace {
    /// The orbit, rotated to start at its minimum.
    Closed {
        cycle: Vec<Point>,
    },
    EscapesWindow {
        last: Point,
    },
    BudgetExceeded {
        steps: u64,
    },
}

/// Follows the orbit of `x` under `g`. `cap` defaults to `|w| + 1`, which no
/// in-window orbit can reach.
pub fn trace_cycle(g: &PermSpec, x: Point, w: Window, cap: Option<u64>) -> Result<CycleTrace> {
    if !w.contains(x) {
        return Err(Error::OutsideWindow { point: x, window: w.size() });
    }
    let cap = cap.unwrap_or(w.size() + 1);
    let mut orbit = vec![x];
    let mut current = x;
    for _ in 0..cap {
        let next = g.apply(current)?;
        if next == x {
            let min_at = orbit.iter().enumerate().min_by_key(|&(_, p)| p).map(|(i, _)| i).unwrap();
            orbit.rotate_left(min_at);
            return Ok(CycleTrace::Closed { cycle: orbit });
        }
        if !w.contains(next) {
            return Ok(CycleTrace::EscapesWindow { last: current });
        }
        orbit.push(next);
        current = next;
    }
    Ok(CycleTrace::BudgetExceeded { steps: cap })
}

pub fn cycle_type_on_window(g: &PermSpec, w: Window) -> Result<CycleType> {
    Ok(FinitePerm::from_spec(g, w)?.cycle_type())
}

/// Order of `g` restricted to the invariant window `w`.
pub fn order_on_window(g: &PermSpec, w: Window) -> Result<BigUint> {
    Ok(cycle_type_on_window(g, w)?.order())
}

/// An `n`-th root of `g` on the invariant window `w`, as a finite-support spec.
pub fn nth_root_of_perm(g: &PermSpec, w: Window, n: u64) -> Result<PermSpec> {
    if n == 0 {
        return Err(Error::Precondition("root exponent must be positive".into()));
    }
    let perm = FinitePerm::from_spec(g, w)?;
    perm.nth_root(n).map(|h| h.to_spec()).ok_or(Error::NoRoot { n })
}
