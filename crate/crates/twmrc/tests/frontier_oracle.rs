//! Randomized cross-check of the exact frontier construction against naive
//! grid membership over the raw pentagons.

use proptest::prelude::*;
use twmrc::geometry::{frontier_value, PentagonUnion, RatePentagon};

const GRID: usize = 60;
const TOL: f64 = 1e-9;

fn caps() -> impl Strategy<Value = (f64, f64, f64)> {
    (0.0..2.0f64, 0.0..2.0f64, 0.0..3.0f64)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn frontier_membership_matches_grid(all_caps in prop::collection::vec(caps(), 1..5)) {
        let members: Vec<RatePentagon> = all_caps
            .iter()
            .map(|&(a, b, c)| RatePentagon::new(a, b, c).unwrap())
            .collect();
        let union = PentagonUnion::new(members.clone()).unwrap();
        let frontier = union.frontier();

        let xmax = union.max_r1().max(0.1);
        let ymax = union.max_rm().max(0.1);
        for gi in 0..=GRID {
            for gj in 0..=GRID {
                let x = 1.05 * xmax * gi as f64 / GRID as f64;
                let y = 1.05 * ymax * gj as f64 / GRID as f64;

                let direct = members.iter().any(|p| p.contains(x, y, 0.0));
                let via_frontier = match frontier_value(frontier, x) {
                    Some(h) => y <= h,
                    None => false,
                };
                if direct != via_frontier {
                    // Disagreements are only permitted within a whisker of
                    // the boundary.
                    let near = members.iter().any(|p| {
                        p.contains(x, y, TOL) != p.contains(x, y, -TOL)
                    }) || frontier_value(frontier, x)
                        .is_some_and(|h| (y - h).abs() <= TOL)
                        || (x - union.max_r1()).abs() <= TOL;
                    prop_assert!(near, "({x}, {y}): direct={direct}, frontier={via_frontier}");
                }
            }
        }
    }
}
