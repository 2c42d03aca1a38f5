//! The quantitative skeleton of the divisibility argument: proof constants
//! and each proof step as a checkable statement about finite instances.

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::bigint_text;
use crate::cycles::FinitePerm;
use crate::error::{Error, Result};
use crate::metric::{Dist, FiniteMetricSpace, SepQuery};
use crate::tree::{separator_from_tree, QiCertificate};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundReport {
    /// Displacement bound of `g₁`.
    pub r1: u64,
    /// Displacement bound of the root `g₂`.
    pub r2_prime: u64,
    /// Root exponent: `g₂ⁿ = g₁`.
    pub n: u64,
    /// `n·r₂′`.
    #[serde(with = "bigint_text")]
    pub r2: BigUint,
    /// `ell^(m·r₁ + m + 2)·q`.
    #[serde(with = "bigint_text")]
    pub t: BigUint,
    /// `m²·(2r₁ + 2r₂ + 3)`.
    #[serde(with = "bigint_text")]
    pub r3: BigUint,
    /// `max_x |B(x, r₃)|`.
    pub s: u64,
    /// `n ≥ t + 1`.
    pub triggers: bool,
}

pub fn compute_constants(c: &QiCertificate, r1: u64, r2_prime: u64, n: u64) -> Result<BoundReport> {
    if r1 == 0 || r2_prime == 0 || n == 0 {
        return Err(Error::Precondition("r1, r2' and n must be positive".into()));
    }
    let r2 = BigUint::from(n) * BigUint::from(r2_prime);
    let t = c.separator_budget(r1);
    let r3 = c.separation_distance(&BigUint::from(r1), &r2);
    let space = c.space();
    let s = match u64::try_from(&r3) {
        Ok(r) if Dist::from_halves(r.saturating_mul(2)) < space.diameter() => {
            space.max_ball_size(Dist::from_int(r)) as u64
        }
        _ => space.len() as u64,
    };
    let triggers = BigUint::from(n) > t;
    Ok(BoundReport { r1, r2_prime, n, r2, t, r3, s, triggers })
}

/// Largest `d(x, xg)` over the points of the space.
pub fn displacement(space: &FiniteMetricSpace, g: &FinitePerm) -> Dist {
    (0..g.len()).map(|x| space.dist(x, g.image(x))).max().unwrap_or(Dist::ZERO)
}

fn check_sizes(space: &FiniteMetricSpace, perms: &[&FinitePerm]) -> Result<()> {
    for p in perms {
        if p.len() != space.len() {
            return Err(Error::Precondition(format!(
                "permutation acts on {} points but the space has {}",
                p.len(),
                space.len()
            )));
        }
    }
    Ok(())
}

/// The cycles of `τⁿ` that lie inside the `τ`-cycle through `x`, excluding
/// fixed points.
fn power_cycles_within(tau: &FinitePerm, n: u64, x: usize) -> Vec<Vec<usize>> {
    let power = tau.pow(n as i64);
    let mut member = vec![false; tau.len()];
    let mut y = x;
    loop {
        member[y] = true;
        y = tau.image(y);
        if y == x {
            break;
        }
    }
    power.cycles().into_iter().filter(|c| member[c[0]]).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpreadWitness {
    pub u: String,
    /// Index of the offending cycle among those of `τⁿ` in the same `τ`-cycle.
    pub sigma: usize,
    pub nearest: Dist,
    pub allowed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpreadOutcome {
    pub holds: bool,
    pub checked: usize,
    pub witness: Option<SpreadWitness>,
}

/// Every point `u` of a `τ`-cycle lies within `n·r₂′` of the support of
/// each cycle of `τⁿ` that the `τ`-cycle splits into. Cycles of `τ` whose
/// `n`-th power is trivial contribute nothing.
pub fn sigma_spread_check(space: &FiniteMetricSpace, tau: &FinitePerm, n: u64, r2_prime: u64) -> Result<SpreadOutcome> {
    check_sizes(space, &[tau])?;
    if n == 0 {
        return Err(Error::Precondition("n must be positive".into()));
    }
    if tau.is_identity() {
        return Err(Error::Precondition("τ has empty support".into()));
    }
    let disp = displacement(space, tau);
    if disp > Dist::from_int(r2_prime) {
        return Err(Error::Precondition(format!("τ displaces by {disp} > r2' = {r2_prime}")));
    }
    let allowed = n.saturating_mul(r2_prime);
    let limit = Dist::from_halves(allowed.saturating_mul(2));
    let mut checked = 0;
    for cycle in tau.cycles() {
        let sigmas = power_cycles_within(tau, n, cycle[0]);
        for &u in &cycle {
            for (i, sigma) in sigmas.iter().enumerate() {
                checked += 1;
                let nearest = sigma.iter().map(|&v| space.dist(u, v)).min().unwrap();
                if nearest > limit {
                    return Ok(SpreadOutcome {
                        holds: false,
                        checked,
                        witness: Some(SpreadWitness { u: space.label(u).into(), sigma: i, nearest, allowed }),
                    });
                }
            }
        }
    }
    Ok(SpreadOutcome { holds: true, checked, witness: None })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PremiseCheck {
    pub premise: String,
    pub holds: bool,
    pub detail: String,
}

impl PremiseCheck {
    fn new(premise: &str, holds: bool, detail: impl Into<String>) -> Self {
        PremiseCheck { premise: premise.into(), holds, detail: detail.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum PigeonholeVerdict {
    /// `Y` meets every cycle, and the cycles are pairwise disjoint, so there
    /// are at most `|Y|` of them.
    Holds {
        cycles: usize,
        separator_size: usize,
    },
    Missed {
        cycle: usize,
    },
    PremisesFailed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PigeonholeOutcome {
    pub premises: Vec<PremiseCheck>,
    /// For each cycle of `τⁿ` through the `τ`-cycle of `x`: one point of `Y` it contains.
    pub hits: Vec<Option<String>>,
    pub verdict: PigeonholeVerdict,
}

impl PigeonholeOutcome {
    pub fn holds(&self) -> bool {
        matches!(self.verdict, PigeonholeVerdict::Holds { .. })
    }
}

/// With `Y` separating `x` from `y` at scale `r₁` (fuzz `r₂`) and `x, y` on one
/// cycle of `τⁿ`, every cycle of `τⁿ` inside the same `τ`-cycle must meet `Y`:
/// each carries an `r₁`-chain from near `x` to near `y`.
pub fn pigeonhole_check(
    space: &FiniteMetricSpace,
    tau: &FinitePerm,
    n: u64,
    query: &SepQuery,
) -> Result<PigeonholeOutcome> {
    check_sizes(space, &[tau])?;
    if n == 0 {
        return Err(Error::Precondition("n must be positive".into()));
    }
    let power = tau.pow(n as i64);
    let sigmas = power_cycles_within(tau, n, query.x);
    let mut premises = Vec::new();

    let sep = space.sep_check(query);
    premises.push(PremiseCheck::new("sep(Y, r1, r2, x, y)", sep, if sep { "holds" } else { "some r1-chain avoids Y" }));

    let shared = sigmas.iter().any(|c| c.contains(&query.x) && c.contains(&query.y));
    premises.push(PremiseCheck::new(
        "x and y lie on one cycle of τⁿ",
        shared,
        format!("x = {}, y = {}", space.label(query.x), space.label(query.y)),
    ));

    let disp = sigmas.iter().flatten().map(|&u| space.dist(u, power.image(u))).max().unwrap_or(Dist::ZERO);
    let small = disp <= Dist::from_int(query.r1);
    premises.push(PremiseCheck::new(
        "each cycle of τⁿ displaces by at most r1",
        small,
        format!("max displacement {disp}, r1 = {}", query.r1),
    ));

    let mut in_y = vec![false; space.len()];
    for &p in &query.separator {
        in_y[p] = true;
    }
    let hits: Vec<Option<String>> =
        sigmas.iter().map(|c| c.iter().find(|&&u| in_y[u]).map(|&u| space.label(u).to_string())).collect();

    let verdict = if premises.iter().any(|p| !p.holds) {
        PigeonholeVerdict::PremisesFailed
    } else if let Some(i) = hits.iter().position(Option::is_none) {
        PigeonholeVerdict::Missed { cycle: i }
    } else {
        // the cycles of a permutation are disjoint, so distinct cycles hit distinct points of Y
        let mut owner = vec![usize::MAX; space.len()];
        for (i, c) in sigmas.iter().enumerate() {
            for &u in c {
                assert_eq!(owner[u], usize::MAX, "cycles of τⁿ overlap");
                owner[u] = i;
            }
        }
        let distinct = query.separator.iter().filter(|&&p| owner[p] != usize::MAX).count();
        assert!(sigmas.len() <= distinct);
        PigeonholeVerdict::Holds { cycles: sigmas.len(), separator_size: query.separator.len() }
    };
    Ok(PigeonholeOutcome { premises, hits, verdict })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CyclesVerdict {
    pub premises: Vec<PremiseCheck>,
    pub all_premises: bool,
    pub max_cycle_support: usize,
    pub s: u64,
    pub conclusion_holds: bool,
}

/// Checks that every cycle of `g₁` has support of size at most `s`, and
/// separately records which premises of that conclusion hold on this
/// instance. A failed premise does not turn into a failed conclusion.
pub fn verify_bounded_cycles(
    cert: &QiCertificate,
    g1: &FinitePerm,
    g2: &FinitePerm,
    n: u64,
    report: &BoundReport,
) -> Result<CyclesVerdict> {
    let space = cert.space();
    check_sizes(space, &[g1, g2])?;
    let mut premises = Vec::new();

    let root = g2.pow(n as i64) == *g1;
    premises.push(PremiseCheck::new("g2^n = g1", root, format!("n = {n}")));

    let d1 = displacement(space, g1);
    premises.push(PremiseCheck::new(
        "displacement of g1 ≤ r1",
        d1 <= Dist::from_int(report.r1),
        format!("{d1} vs r1 = {}", report.r1),
    ));
    let d2 = displacement(space, g2);
    premises.push(PremiseCheck::new(
        "displacement of g2 ≤ r2'",
        d2 <= Dist::from_int(report.r2_prime),
        format!("{d2} vs r2' = {}", report.r2_prime),
    ));

    let expected = compute_constants(cert, report.r1, report.r2_prime, report.n)?;
    premises.push(PremiseCheck::new(
        "constants match the certificate",
        expected == *report && report.n == n,
        format!("t = {}, r3 = {}, s = {}", expected.t, expected.r3, expected.s),
    ));

    premises.push(PremiseCheck::new("n ≥ t + 1", report.triggers, format!("n = {n}, t = {}", report.t)));

    premises.push(separation_premise(cert, report)?);

    let max_cycle_support = g1.cycles().iter().map(Vec::len).max().unwrap_or(0);
    let all_premises = premises.iter().all(|p| p.holds);
    Ok(CyclesVerdict {
        premises,
        all_premises,
        max_cycle_support,
        s: report.s,
        conclusion_holds: max_cycle_support as u64 <= report.s,
    })
}

/// Every pair at distance at least `r₃` is separated by a set of at most `t`
/// points, built from the certificate's tree.
fn separation_premise(cert: &QiCertificate, report: &BoundReport) -> Result<PremiseCheck> {
    let name = "every pair at distance ≥ r3 has a separator of size ≤ t";
    let space = cert.space();
    let (Ok(r3), Ok(r2)) = (u64::try_from(&report.r3), u64::try_from(&report.r2)) else {
        return Ok(PremiseCheck::new(name, true, "r3 exceeds every distance; no pairs to separate"));
    };
    if r3 > u64::MAX / 2 || Dist::from_int(r3) > space.diameter() {
        return Ok(PremiseCheck::new(name, true, format!("r3 = {r3} exceeds the diameter; no pairs to separate")));
    }
    let mut pairs = 0usize;
    for x in 0..space.len() {
        for y in 0..space.len() {
            if space.dist(x, y) < Dist::from_int(r3) {
                continue;
            }
            pairs += 1;
            let fail = |why: String| {
                PremiseCheck::new(name, false, format!("({}, {}): {why}", space.label(x), space.label(y)))
            };
            let sep = match separator_from_tree(cert, x, y, report.r1, r2) {
                Ok(sep) => sep,
                Err(e) => return Ok(fail(e.to_string())),
            };
            if BigUint::from(sep.indices.len()) > report.t {
                return Ok(fail(format!("separator has {} > t points", sep.indices.len())));
            }
            let query = SepQuery { separator: sep.indices, r1: report.r1, r2, x, y };
            if !space.sep_check(&query) {
                return Ok(fail("tree separator does not separate".into()));
            }
        }
    }
    Ok(PremiseCheck::new(name, true, format!("{pairs} ordered pairs checked")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::FiniteMetricSpace;
    use crate::tree::{resolve_map, MapSpec, SimplicialTree};
    use std::sync::Arc;

    fn interval_cert(n: usize) -> QiCertificate {
        let space = Arc::new(FiniteMetricSpace::interval(n));
        let tree = Arc::new(SimplicialTree::path(n).unwrap());
        let map = resolve_map(&space, &tree, &MapSpec::ByLabel).unwrap();
        QiCertificate::new(space, tree, map, 2, 1, 5).unwrap()
    }

    fn long_cycle(n: usize) -> FinitePerm {
        FinitePerm::new((0..n).map(|i| (i + 1) % n).collect()).unwrap()
    }

    #[test]
    fn constants_examples() {
        let c = interval_cert(1000);
        let r = compute_constants(&c, 1, 1, 3).unwrap();
        assert_eq!(r.r2, BigUint::from(3u32));
        assert_eq!(r.t, BigUint::from(80u32));
        assert_eq!(r.r3, BigUint::from(11u32));
        assert_eq!(r.s, 23);
        assert!(!r.triggers);
        let r = compute_constants(&c, 1, 2, 2).unwrap();
        assert_eq!((r.r2.clone(), r.r3.clone()), (BigUint::from(4u32), BigUint::from(13u32)));
        let r = compute_constants(&c, 1, 1, 1).unwrap();
        assert!(!r.triggers);
        let r = compute_constants(&c, 1, 1, 81).unwrap();
        assert!(r.triggers);
        assert!(compute_constants(&c, 0, 1, 1).is_err());
    }

    #[test]
    fn s_saturates_at_space_size() {
        let c = interval_cert(20);
        let r = compute_constants(&c, 3, 5, 7).unwrap();
        assert_eq!(r.s, 20);
    }

    #[test]
    fn spread_on_c12() {
        let space = FiniteMetricSpace::cycle(12);
        let tau = long_cycle(12);
        let out = sigma_spread_check(&space, &tau, 3, 1).unwrap();
        assert!(out.holds);
        assert_eq!(out.checked, 12 * 3);
        assert!(sigma_spread_check(&space, &tau, 1, 1).unwrap().holds);
        let swap = FinitePerm::from_cycles(12, &[vec![0, 1]]).unwrap();
        let out = sigma_spread_check(&space, &swap, 2, 1).unwrap();
        assert!(out.holds);
        assert_eq!(out.checked, 0);
        assert!(matches!(sigma_spread_check(&space, &tau.pow(5), 1, 1), Err(Error::Precondition(_))));
        assert!(matches!(sigma_spread_check(&space, &FinitePerm::identity(12), 1, 1), Err(Error::Precondition(_))));
    }

    #[test]
    fn pigeonhole_on_c12() {
        let space = FiniteMetricSpace::cycle(12);
        let tau = long_cycle(12);
        let q = SepQuery { separator: vec![2, 3, 4, 8, 9, 10], r1: 3, r2: 3, x: 0, y: 6 };
        let out = pigeonhole_check(&space, &tau, 3, &q).unwrap();
        assert_eq!(out.verdict, PigeonholeVerdict::Holds { cycles: 3, separator_size: 6 });
        assert_eq!(out.hits, [Some("4".into()), Some("5".into()), Some("3".into())]);

        let all = SepQuery { separator: (0..12).collect(), ..q.clone() };
        assert!(pigeonhole_check(&space, &tau, 3, &all).unwrap().holds());

        let leaky = SepQuery { separator: vec![2, 3], ..q.clone() };
        let out = pigeonhole_check(&space, &tau, 3, &leaky).unwrap();
        assert_eq!(out.verdict, PigeonholeVerdict::PremisesFailed);
        assert!(!out.premises[0].holds);
    }

    #[test]
    fn pigeonhole_single_cycle() {
        let space = FiniteMetricSpace::interval(10);
        let tau = FinitePerm::new((0..10).map(|i| (i + 1) % 10).collect()).unwrap();
        let q = SepQuery { separator: vec![4, 5], r1: 9, r2: 0, x: 0, y: 9 };
        // the wrap-around step of τ moves by 9, so no wall of two points separates
        let out = pigeonhole_check(&space, &tau, 1, &q).unwrap();
        assert_eq!(out.verdict, PigeonholeVerdict::PremisesFailed);
        let q = SepQuery { separator: vec![4, 5], r1: 2, r2: 1, x: 0, y: 9 };
        let out = pigeonhole_check(&space, &tau, 1, &q).unwrap();
        assert!(!out.premises[2].holds);
    }

    #[test]
    fn bounded_cycles_identity() {
        let c = interval_cert(24);
        let id = FinitePerm::identity(24);
        let report = compute_constants(&c, 1, 1, 2).unwrap();
        let v = verify_bounded_cycles(&c, &id, &id, 2, &report).unwrap();
        assert!(v.conclusion_holds);
        assert_eq!(v.max_cycle_support, 0);
        assert!(!v.all_premises);
    }
}
