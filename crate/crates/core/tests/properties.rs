//! Property tests for the pure algebra.

use marketspin::lattice::NeighborGraph;
use marketspin::meanfield::{brillouin, mf_step, MeanFieldParams};
use marketspin::model::{FieldSchedule, FieldSegment};
use marketspin::observables::autocorrelation;
use proptest::prelude::*;

proptest! {
    #[test]
    fn brillouin_is_odd_and_bounded(u in -50.0f64..50.0, m in 1u32..=4) {
        let b = brillouin(u, m);
        prop_assert!(b.abs() < m as f64 + 1e-12);
        prop_assert!((b + brillouin(-u, m)).abs() < 1e-10);
    }

    #[test]
    fn mf_step_stays_in_the_box(
        j1 in -3.0f64..3.0, j2 in -3.0f64..3.0,
        k12 in -3.0f64..3.0, k21 in -3.0f64..3.0,
        a in 0.0f64..6.0, t in 0.05f64..20.0,
        s1 in -1.0f64..1.0, s2 in -1.0f64..1.0,
        a_scaled: bool,
    ) {
        let p = MeanFieldParams {
            j1, j2, k12, k21, a,
            temperature: t,
            m1: 1, m2: 1,
            s1_0: s1, s2_0: s2,
            a_scaled,
            price_scale: 1.0,
            clearing_price: 3.0,
        };
        let (n1, n2) = mf_step(s1, s2, &p);
        prop_assert!(n1.abs() <= 1.0 && n2.abs() <= 1.0);
        // The origin stays exactly fixed.
        prop_assert_eq!(mf_step(0.0, 0.0, &p), (0.0, 0.0));
    }

    #[test]
    fn autocorrelation_is_normalized(xs in proptest::collection::vec(-10.0f64..10.0, 20..200)) {
        prop_assume!(xs.iter().any(|&x| (x - xs[0]).abs() > 1e-9));
        let c = autocorrelation(&xs, 5.min(xs.len() - 1)).unwrap();
        prop_assert!((c[0] - 1.0).abs() < 1e-12);
        for v in &c {
            prop_assert!(v.abs() <= 1.0 + 1e-9);
        }
    }

    #[test]
    fn field_schedule_is_zero_outside_its_segments(
        start in 0u64..1000, len in 1u64..500, h in -1.0f64..1.0, probe in 0u64..2000,
    ) {
        let sched = FieldSchedule::new(vec![FieldSegment {
            t_start: start,
            t_end: start + len,
            h,
        }]).unwrap();
        let expected = if probe >= start && probe < start + len { h } else { 0.0 };
        prop_assert_eq!(sched.field_at(probe), expected);
    }

    #[test]
    fn custom_graphs_are_symmetric_and_loop_free(
        edges in proptest::collection::vec((0u32..20, 0u32..20), 0..60),
    ) {
        let clean: Vec<(u32, u32)> = edges.into_iter().filter(|(i, j)| i != j).collect();
        let g = NeighborGraph::build_custom(&clean, 20).unwrap();
        let degree_sum: usize = (0..20).map(|i| g.degree(i)).sum();
        prop_assert_eq!(degree_sum, 2 * g.edge_count());
        for i in 0..20usize {
            for &j in g.neighbors(i) {
                prop_assert!(g.neighbors(j as usize).contains(&(i as u32)));
                prop_assert_ne!(j as usize, i);
            }
        }
    }
}
