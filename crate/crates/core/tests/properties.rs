#![allow(clippy::needless_range_loop, clippy::type_complexity)]

use std::collections::BTreeSet;
use std::sync::Arc;

use bdperm::bounds::{compute_constants, sigma_spread_check};
use bdperm::cycles::{trace_cycle, CycleTrace, FinitePerm};
use bdperm::metric::{Dist, FiniteMetricSpace, SepQuery};
use bdperm::perm::{PairMask, Parity, PermSpec, PointMap, Window};
use bdperm::tree::{separator_from_tree, verify_qi, QiCertificate, QiViolation, SimplicialTree};
use bdperm::zoo::{factorial, make_tower, BlockFamily};
use num_bigint::BigUint;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

mod common;
use common::random_metric;

fn w(n: u64) -> Window {
    Window::new(n).unwrap()
}

fn finite_cycles() -> impl Strategy<Value = PermSpec> {
    Just((1..=30u64).collect::<Vec<_>>()).prop_shuffle().prop_flat_map(|points| {
        prop::collection::vec(2..=5usize, 0..5).prop_map(move |lengths| {
            let mut cycles = Vec::new();
            let mut at = 0;
            for l in lengths {
                if at + l > points.len() {
                    break;
                }
                cycles.push(points[at..at + l].to_vec());
                at += l;
            }
            PermSpec::finite(PointMap::from_cycles(&cycles).unwrap())
        })
    })
}

fn mask() -> impl Strategy<Value = PermSpec> {
    prop_oneof![
        Just(PermSpec::masked_involution(PairMask::All)),
        prop::collection::btree_set(1..=40u64, 0..12).prop_map(|s| PermSpec::masked_involution(PairMask::Finite(s))),
    ]
}

fn leaf() -> impl Strategy<Value = PermSpec> {
    prop_oneof![
        Just(PermSpec::Identity),
        Just(PermSpec::ShiftG),
        (1..=4u32).prop_map(|n| make_tower(n).unwrap().spec),
        mask(),
        finite_cycles(),
    ]
}

fn perm_spec() -> impl Strategy<Value = PermSpec> {
    leaf().prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| PermSpec::compose(a, b)),
            inner.clone().prop_map(PermSpec::inverse),
            (inner.clone(), -3..=3i64).prop_map(|(g, e)| PermSpec::power(g, e)),
            (inner, prop_oneof![Just(Parity::Odd), Just(Parity::Even)]).prop_map(|(g, p)| PermSpec::interleaved(p, g)),
        ]
    })
}

/// Specs that fix some window `[1, N]` for suitable `N`: everything but the shift.
fn block_spec() -> impl Strategy<Value = PermSpec> {
    prop_oneof![(1..=4u32).prop_map(|n| make_tower(n).unwrap().spec), mask(), finite_cycles()].prop_recursive(
        2,
        6,
        2,
        |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| PermSpec::compose(a, b)),
                inner.clone().prop_map(PermSpec::inverse),
                (inner, 1..=3i64).prop_map(|(g, e)| PermSpec::power(g, e)),
            ]
        },
    )
}

fn finite_perm(max: usize) -> impl Strategy<Value = FinitePerm> {
    (1..=max)
        .prop_flat_map(|n| Just((0..n).collect::<Vec<_>>()).prop_shuffle())
        .prop_map(|v| FinitePerm::new(v).unwrap())
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn inverse_undoes_apply(g in perm_spec(), x in 1..300u64) {
        let y = g.apply(x).unwrap();
        prop_assert_eq!(g.apply_inverse(y).unwrap(), x);
        let z = g.apply_inverse(x).unwrap();
        prop_assert_eq!(g.apply(z).unwrap(), x);
    }

    #[test]
    fn invariant_windows_are_permuted(g in block_spec(), n in 1..150u64) {
        if g.is_invariant_window(w(n)).unwrap() {
            let images: BTreeSet<u64> = (1..=n).map(|x| g.apply(x).unwrap()).collect();
            prop_assert_eq!(images, (1..=n).collect::<BTreeSet<_>>());
        } else {
            prop_assert!((1..=n).any(|x| g.apply(x).unwrap() > n));
        }
    }

    #[test]
    fn displacement_is_monotone_and_bounded(g in perm_spec(), a in 1..200u64, b in 1..200u64) {
        let (lo, hi) = (a.min(b), a.max(b));
        let small = g.displacement_bound(w(lo)).unwrap();
        let large = g.displacement_bound(w(hi)).unwrap();
        prop_assert!(small.window_sup <= large.window_sup);
        let direct = (1..=hi).map(|x| g.apply(x).unwrap().abs_diff(x)).max().unwrap();
        prop_assert_eq!(large.window_sup, direct);
        if let Some(bound) = large.symbolic {
            prop_assert!(large.window_sup <= bound);
        }
    }

    #[test]
    fn combinators_agree_with_pointwise_evaluation(a in perm_spec(), b in perm_spec(), e in -4..=4i64, x in 1..200u64) {
        let composed = PermSpec::compose(a.clone(), b.clone());
        prop_assert_eq!(composed.apply(x).unwrap(), b.apply(a.apply(x).unwrap()).unwrap());
        prop_assert_eq!(PermSpec::inverse(a.clone()).apply(x).unwrap(), a.apply_inverse(x).unwrap());
        let mut y = x;
        for _ in 0..e.unsigned_abs() {
            y = if e > 0 { a.apply(y).unwrap() } else { a.apply_inverse(y).unwrap() };
        }
        prop_assert_eq!(PermSpec::power(a, e).apply(x).unwrap(), y);
    }

    #[test]
    fn json_round_trips(g in perm_spec()) {
        let back = PermSpec::from_json(&g.to_json()).unwrap();
        prop_assert_eq!(back, g);
    }

    #[test]
    fn traced_cycles_partition_invariant_windows(g in block_spec(), n in 1..120u64) {
        prop_assume!(g.is_invariant_window(w(n)).unwrap());
        let mut seen = BTreeSet::new();
        for x in 1..=n {
            if seen.contains(&x) {
                continue;
            }
            match trace_cycle(&g, x, w(n), None).unwrap() {
                CycleTrace::Closed { cycle } => {
                    for (i, &p) in cycle.iter().enumerate() {
                        prop_assert!(seen.insert(p));
                        prop_assert_eq!(g.apply(p).unwrap(), cycle[(i + 1) % cycle.len()]);
                    }
                }
                other => prop_assert!(false, "{:?}", other),
            }
        }
        prop_assert_eq!(seen.len() as u64, n);
    }

    #[test]
    fn order_of_power(p in finite_perm(12), k in 1..40i64) {
        let order = u64::try_from(&p.order()).unwrap();
        let q = p.pow(k);
        prop_assert_eq!(u64::try_from(&q.order()).unwrap(), order / gcd(order, k as u64));
        prop_assert!(p.pow(order as i64).is_identity());
    }

    #[test]
    fn roots_are_roots(p in finite_perm(14), n in 1..=6u64) {
        let ct = p.cycle_type();
        match p.nth_root(n) {
            Some(h) => {
                prop_assert!(ct.nth_root_exists(n));
                prop_assert_eq!(h.pow(n as i64), p.clone());
                let spec = h.to_spec();
                let window = w(p.len() as u64);
                prop_assert!(PermSpec::power(spec, n as i64).equal_on_window(&p.to_spec(), window).unwrap());
            }
            None => prop_assert!(!ct.nth_root_exists(n)),
        }
        // an n-th power always has an n-th root
        prop_assert!(p.pow(n as i64).nth_root(n).is_some());
    }

    #[test]
    fn blocks_partition(k in 1..50u64, x in 1..10_000u64) {
        let family = BlockFamily::new(k).unwrap();
        let owners: Vec<u64> = (1..=x.div_ceil(k) + 1).filter(|&l| family.block(l).contains(&x)).collect();
        prop_assert_eq!(owners, vec![family.block_of(x)]);
    }

    #[test]
    fn tower_cycle_type(n in 1..=5u32, m in 1..4u64) {
        let g = make_tower(n).unwrap().spec;
        let nf = factorial(n);
        let p = FinitePerm::from_spec(&g, w(m * nf)).unwrap();
        let ct = p.cycle_type();
        if n == 1 {
            prop_assert!(p.is_identity());
        } else {
            prop_assert_eq!(ct.cycles.into_iter().collect::<Vec<_>>(), vec![(nf, m)]);
            prop_assert_eq!(p.order(), BigUint::from(nf));
        }
        prop_assert_eq!(g.symbolic_bound(), Some(nf - 1));
    }
}

fn sep_query(rng: &mut ChaCha8Rng, n: usize) -> SepQuery {
    use rand::Rng;
    let ysize = rng.gen_range(0..=n);
    let separator: BTreeSet<usize> = (0..ysize).map(|_| rng.gen_range(0..n)).collect();
    SepQuery {
        separator: separator.into_iter().collect(),
        r1: rng.gen_range(1..=5),
        r2: rng.gen_range(0..=3),
        x: rng.gen_range(0..n),
        y: rng.gen_range(0..n),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn whole_space_separates(seed: u64, n in 1..=12usize) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let space = random_metric(&mut rng, n);
        let mut q = sep_query(&mut rng, n);
        q.separator = (0..n).collect();
        prop_assert!(space.sep_check(&q));
    }

    #[test]
    fn sep_monotonicity(seed: u64, n in 2..=12usize, extra in 0..12usize, dr1 in 0..3u64, dr2 in 0..3u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let space = random_metric(&mut rng, n);
        let q = sep_query(&mut rng, n);
        let base = space.sep_check(&q);
        let mut bigger = q.clone();
        if !bigger.separator.contains(&(extra % n)) {
            bigger.separator.push(extra % n);
        }
        if base {
            prop_assert!(space.sep_check(&bigger));
        }
        let looser = SepQuery { r1: q.r1 + dr1, r2: q.r2 + dr2, ..q.clone() };
        if !base {
            prop_assert!(!space.sep_check(&looser));
        }
    }

    #[test]
    fn tables_are_validated(n in 1..=5usize, raw in prop::collection::vec(0..6u64, 25)) {
        let mut d = vec![vec![0u64; n]; n];
        let mut k = 0;
        for i in 0..n {
            for j in i + 1..n {
                d[i][j] = raw[k];
                d[j][i] = raw[k];
                k += 1;
            }
        }
        let positive = (0..n).all(|i| (0..n).all(|j| i == j || d[i][j] > 0));
        let triangle = (0..n).all(|i| (0..n).all(|j| (0..n).all(|k| d[i][k] <= d[i][j] + d[j][k])));
        let labels = (0..n).map(|i| i.to_string()).collect();
        let table = d.iter().map(|row| row.iter().map(|&h| Dist::from_halves(h)).collect()).collect();
        let loaded = FiniteMetricSpace::from_table(labels, table);
        prop_assert_eq!(loaded.is_ok(), positive && triangle);
        if let Ok(space) = loaded {
            for i in 0..n {
                for j in 0..n {
                    prop_assert_eq!(space.dist(i, j).halves(), d[i][j]);
                }
            }
        }
    }

    #[test]
    fn geodesics_are_symmetric(parents in prop::collection::vec(any::<prop::sample::Index>(), 1..40), a: prop::sample::Index, b: prop::sample::Index) {
        let n = parents.len() + 1;
        let edges: Vec<(usize, usize)> = parents.iter().enumerate().map(|(i, p)| (i + 1, p.index(i + 1))).collect();
        let tree = SimplicialTree::from_edges((0..n).map(|i| format!("v{i}")).collect(), &edges).unwrap();
        let (u, v) = (a.index(n), b.index(n));
        let mut forward = tree.geodesic(u, v);
        let backward = tree.geodesic(v, u);
        prop_assert_eq!(forward.len() as u64, tree.distance(u, v) + 1);
        for pair in forward.windows(2) {
            prop_assert!(tree.neighbors(pair[0]).contains(&pair[1]));
        }
        forward.reverse();
        prop_assert_eq!(forward, backward);
    }
}

fn halving_cert(n: usize, m: u64, q: u64) -> QiCertificate {
    let space = Arc::new(FiniteMetricSpace::interval(n));
    let tree = Arc::new(SimplicialTree::path(n.div_ceil(2)).unwrap());
    let map = (0..n).map(|i| i / 2).collect();
    QiCertificate::new(space, tree, map, 2, m, q).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn verify_qi_is_monotone_in_m(n in 2..60usize, m in 1..5u64, bump in 0..3u64) {
        let ball = |m: u64| FiniteMetricSpace::interval(n).max_ball_size(Dist::from_int(m * m + m)) as u64;
        let here = verify_qi(&halving_cert(n, m, ball(m))).holds;
        let m2 = m + bump;
        if here {
            prop_assert!(verify_qi(&halving_cert(n, m2, ball(m2))).holds);
        }
    }

    #[test]
    fn least_q_is_the_ball_size(n in 2..60usize, m in 2..5u64) {
        let q = FiniteMetricSpace::interval(n).max_ball_size(Dist::from_int(m * m + m)) as u64;
        prop_assert!(verify_qi(&halving_cert(n, m, q)).holds);
        if q > 1 {
            let verdict = verify_qi(&halving_cert(n, m, q - 1));
            let ball_size = matches!(verdict.violation, Some(QiViolation::BallSize { .. }));
            prop_assert!(ball_size, "{:?}", verdict);
        }
    }

    #[test]
    fn separators_separate(x in 0..400usize, y in 0..400usize, r1 in 1..=3u64, r2 in 1..=3u64, halving: bool) {
        let cert = if halving {
            halving_cert(400, 2, FiniteMetricSpace::interval(400).max_ball_size(Dist::from_int(6)) as u64)
        } else {
            let space = Arc::new(FiniteMetricSpace::interval(400));
            let tree = Arc::new(SimplicialTree::path(400).unwrap());
            QiCertificate::new(space, tree, (0..400).collect(), 2, 1, 5).unwrap()
        };
        let m = cert.m();
        prop_assume!(cert.space().dist(x, y) >= Dist::from_int(m * m * (2 * r1 + 2 * r2 + 3)));
        let sep = separator_from_tree(&cert, x, y, r1, r2).unwrap();
        prop_assert!(BigUint::from(sep.indices.len()) <= cert.separator_budget(r1));
        let q = SepQuery { separator: sep.indices, r1, r2, x, y };
        prop_assert!(cert.space().sep_check(&q));
    }

    #[test]
    fn constants_follow_the_formulas(ell in 1..20u64, m in 1..6u64, q in 1..500u64, r1 in 1..8u64, r2p in 1..8u64, n in 1..200u64) {
        let space = Arc::new(FiniteMetricSpace::interval(10));
        let tree = Arc::new(SimplicialTree::path(10).unwrap());
        let cert = QiCertificate::new(space, tree, (0..10).collect(), ell, m, q).unwrap();
        let r = compute_constants(&cert, r1, r2p, n).unwrap();
        let mut t = BigUint::from(q);
        for _ in 0..m * r1 + m + 2 {
            t *= ell.max(2);
        }
        prop_assert_eq!(&r.t, &t);
        prop_assert_eq!(r.r3, BigUint::from(m * m * (2 * r1 + 2 * n * r2p + 3)));
        prop_assert_eq!(r.triggers, BigUint::from(n) > t);
    }

    #[test]
    fn spread_holds_on_towers(level in 2..=4u32, copies in 1..4u64, n in 1..8u64) {
        let nf = factorial(level);
        let size = (copies * nf) as usize;
        let tau = FinitePerm::from_spec(&make_tower(level).unwrap().spec, w(size as u64)).unwrap();
        let space = FiniteMetricSpace::interval(size);
        let out = sigma_spread_check(&space, &tau, n, nf - 1).unwrap();
        prop_assert!(out.holds, "{:?}", out.witness);
    }

    #[test]
    fn spread_holds_on_long_cycles(len in 3..60usize, n in 1..10u64) {
        let space = FiniteMetricSpace::cycle(len);
        let tau = FinitePerm::new((0..len).map(|i| (i + 1) % len).collect()).unwrap();
        let out = sigma_spread_check(&space, &tau, n, 1).unwrap();
        prop_assert!(out.holds, "{:?}", out.witness);
    }
}
