mod common;

use hyperdrive::constellation::CircularOrbit;
use hyperdrive::netgraph::JitterPolicy;
use hyperdrive::scheduler::score_network_latency;
use hyperdrive::scheduler::vicinity::{allocate_quotas, PerKind};
use hyperdrive::thermal::calc_score;
use hyperdrive::{NodeId, NodeKind, ResourceVector};
use proptest::prelude::*;

use common::*;

fn close(a: f64, b: f64) -> bool {
    a == b || (a - b).abs() <= 1e-12 * a.abs().max(b.abs())
}

proptest! {
    #[test]
    fn dijkstra_matches_exhaustive(seed in any::<u64>(), n in 2usize..8, density in 0.1f64..0.9) {
        let g = random_graph(&mut rng(seed), n, density);
        for u in 0..n {
            let tree = g.shortest_paths_from(NodeId(u as u32)).unwrap();
            for v in 0..n {
                let best = exhaustive_min_latency(&g, NodeId(u as u32), NodeId(v as u32));
                prop_assert_eq!(tree.latency_to(NodeId(v as u32)), best);
            }
        }
    }

    #[test]
    fn path_qos_aggregation(seed in any::<u64>(), n in 2usize..8, max_jitter in any::<bool>()) {
        let policy = if max_jitter { JitterPolicy::Max } else { JitterPolicy::Sum };
        let g = random_graph(&mut rng(seed), n, 0.5).with_jitter_policy(policy);
        if let Some(p) = g.lowest_latency_path(NodeId(0), NodeId(n as u32 - 1)).unwrap() {
            prop_assert_eq!(p.nodes.first(), Some(&NodeId(0)));
            let links: Vec<_> = p.nodes.windows(2).map(|w| *g.link_between(w[0], w[1]).unwrap()).collect();
            let bw = links.iter().map(|l| l.bandwidth_bps).fold(f64::INFINITY, f64::min);
            let drop = 1.0 - links.iter().map(|l| 1.0 - l.packet_drop).product::<f64>();
            let jitter = match policy {
                JitterPolicy::Sum => links.iter().map(|l| l.jitter_ms).sum::<f64>(),
                JitterPolicy::Max => links.iter().map(|l| l.jitter_ms).fold(0.0, f64::max),
            };
            prop_assert!(close(p.qos.bandwidth_bps, bw));
            prop_assert!(close(p.qos.packet_drop, drop));
            prop_assert!(close(p.qos.jitter_ms, jitter));
            prop_assert!((0.0..1.0).contains(&p.qos.packet_drop));
        }
    }

    #[test]
    fn calc_score_is_bounded_and_monotone(a in -50.0f64..150.0, b in -50.0f64..150.0, rec in 0.0f64..80.0, span in 0.1f64..40.0) {
        let max = rec + span;
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let s_lo = calc_score(lo, rec, max).unwrap();
        let s_hi = calc_score(hi, rec, max).unwrap();
        prop_assert!(s_lo <= 100 && s_hi <= 100);
        prop_assert!(s_lo >= s_hi);
        prop_assert!(calc_score(lo, max, rec).is_err() || rec == max);
    }

    #[test]
    fn latency_scores_span_0_to_100(raw in prop::collection::vec(0.0f64..500.0, 1..40)) {
        let s = score_network_latency(&raw);
        prop_assert_eq!(s.len(), raw.len());
        prop_assert!(s.iter().all(|v| (0.0..=100.0).contains(v)));
        let min_i = (0..raw.len()).min_by(|&i, &j| raw[i].total_cmp(&raw[j])).unwrap();
        prop_assert_eq!(s[min_i], 100.0);
        for i in 0..raw.len() {
            for j in 0..raw.len() {
                if raw[i] < raw[j] {
                    prop_assert!(s[i] >= s[j]);
                }
            }
        }
    }

    #[test]
    fn quota_allocation_respects_limits(
        avail in prop::array::uniform4(0usize..400),
        q in prop::array::uniform4(0.0f64..0.25),
        size in 0usize..800,
    ) {
        let available = PerKind { cloud: avail[0], edge: avail[1], ground_station: avail[2], satellite: avail[3] };
        let quotas = PerKind { cloud: q[0], edge: q[1], ground_station: q[2], satellite: q[3] };
        let counts = allocate_quotas(&available, &quotas, size);
        let mut total = 0;
        let mut supply = 0;
        for k in NodeKind::ALL {
            let c = *counts.get(k);
            prop_assert!(c <= *available.get(k));
            if quotas.get_f(k) == 0.0 {
                prop_assert_eq!(c, 0);
            } else {
                supply += available.get(k);
            }
            total += c;
        }
        prop_assert_eq!(total, size.min(supply));
    }

    #[test]
    fn resource_arithmetic_round_trips(a in any::<[u32; 4]>(), b in any::<[u32; 4]>()) {
        let v = |x: [u32; 4]| ResourceVector::new(x[0] as u64, x[1] as u64, x[2] / 2, x[3] as u64);
        let (a, b) = (v(a), v(b));
        let sum = a.checked_add(&b).unwrap();
        prop_assert_eq!(sum.checked_sub(&b), Some(a));
        prop_assert!(a.fits_within(&sum) && b.fits_within(&sum));
    }

    #[test]
    fn circular_orbits_keep_radius_and_period(alt in 300.0f64..2000.0, inc in 0.0f64..180.0, t in 0.0f64..1e6) {
        let o = CircularOrbit {
            radius_km: 6371.0 + alt,
            inclination_rad: inc.to_radians(),
            raan_rad: 0.3,
            arg_latitude_epoch_rad: 1.1,
        };
        let p = o.position_at(t);
        prop_assert!((p.radius_km() - o.radius_km).abs() < 1e-6);
        let q = o.position_at(t + o.period_s());
        prop_assert!(p.distance_km(&q) < 1e-3);
    }
}
