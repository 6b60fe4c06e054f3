use proptest::prelude::*;
use xxz_core::config_space::{box_half_width, set_distance, Config, ConfigSpace, Metric, Volume, INFINITE_DISTANCE};

fn edge_firsts(space: &ConfigSpace, set: &[usize]) -> Vec<i32> {
    let mut out: Vec<i32> = set
        .iter()
        .map(|&k| space.config(k))
        .filter(|x| x.is_edge())
        .map(|x| x.first())
        .collect();
    out.sort_unstable();
    out
}

fn edge_part(space: &ConfigSpace, set: &[usize]) -> Vec<Config> {
    set.iter().map(|&k| space.config(k)).filter(|x| x.is_edge()).collect()
}

#[test]
fn degree_law_exhaustive() {
    for n in 1..=4 {
        let space = ConfigSpace::new(n, 6).unwrap();
        for x in space.iter() {
            assert_eq!(x.neighbors(Volume::Unbounded).len(), 2 * x.cluster_count(), "{x}");
        }
    }
}

#[test]
fn box_edge_identity_exhaustive() {
    for n in 1..=4 {
        let l = 11;
        let space = ConfigSpace::new(n, l).unwrap();
        for m in 0..=6usize {
            let x1 = 0;
            let b = space.edge_box(&Config::packed(x1, n), m).unwrap();
            let m = m as i32;
            assert_eq!(edge_firsts(&space, &b.lambda_set), (x1 - m..=x1 + m).collect::<Vec<_>>());
            assert_eq!(b.window(), x1 - m..=x1 + m);
            let want: Vec<i32> = (x1 - (m + n as i32 - 1)..=x1 + m).collect();
            assert_eq!(edge_firsts(&space, &b.support_set), want, "N={n} M={m}");
        }
    }
}

#[test]
fn empty_set_distance_is_infinite() {
    let x = Config::packed(0, 2);
    assert_eq!(set_distance(&[x], &[], Metric::Infinity).unwrap(), INFINITE_DISTANCE);
}

#[test]
fn box_half_width_is_quarter_distance() {
    assert_eq!(box_half_width(0, 17), 4);
    assert_eq!(box_half_width(17, 0), 4);
    assert_eq!(box_half_width(3, 5), 0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn degree_law(sites in proptest::collection::btree_set(-6i32..=6, 1..=4)) {
        let x = Config::new(sites.into_iter().collect()).unwrap();
        prop_assert_eq!(x.neighbors(Volume::Unbounded).len(), 2 * x.cluster_count());
    }

    #[test]
    fn neighbors_are_at_unit_distance(sites in proptest::collection::btree_set(-5i32..=5, 1..=4)) {
        let x = Config::new(sites.into_iter().collect()).unwrap();
        for y in x.neighbors(Volume::Finite(5)) {
            prop_assert_eq!(xxz_core::config_space::distance(&x, &y, Metric::One).unwrap(), 1);
            prop_assert!(y.within(Volume::Finite(5)));
        }
    }

    #[test]
    fn rank_roundtrip(n in 1usize..=4, l in 2i32..=6, seed in 0usize..1000) {
        prop_assume!(n <= (2 * l + 1) as usize);
        let space = ConfigSpace::new(n, l).unwrap();
        let k = seed % space.dim();
        prop_assert_eq!(space.index(&space.config(k)), Some(k));
    }

    #[test]
    fn infinity_separation_of_boxes(n in 1usize..=3, m in 0usize..=3, i in -4i32..=0, gap in 0i32..=8) {
        let j = i + 2 * m as i32 + n as i32 + gap;
        let l = 20;
        let space = ConfigSpace::new(n, l).unwrap();
        let sx = space.edge_box(&Config::packed(i, n), m).unwrap();
        let sy = space.edge_box(&Config::packed(j, n), m).unwrap();
        let d = set_distance(&edge_part(&space, &sx.support_set), &edge_part(&space, &sy.support_set), Metric::Infinity)
            .unwrap();
        prop_assert_eq!(d as i32, (j - i) - 2 * m as i32 - n as i32 + 1);
    }
}
