//! Propagates one plane of the default Walker shell for an orbit and prints
//! the ground track, illumination and ISL neighbours of its first satellite.

use hyperdrive::constellation::{build_constellation, ConstellationSpec, SunModel, VisibilityConfig};

fn main() {
    let spec = ConstellationSpec {
        planes: 72,
        sats_per_plane: 14,
        altitude_km: 550.0,
        inclination_deg: 53.0,
        phasing_offset_deg: 0.0,
    };
    let sats = build_constellation(&spec).expect("valid shell");
    let sun = SunModel::default();
    let vis = VisibilityConfig::default();
    let first = &sats[0];
    let period = first.orbit.period_s();
    println!("{} satellites, period {period:.1} s", sats.len());

    let state = sun.sun_state(&first.orbit, 0.0, 10.0);
    println!("sunlit at t=0: {}, share of orbit in sun {:.2}", state.sunlit, state.fraction_of_orbit_in_sun);

    println!("{:>7} {:>8} {:>9} {:>7} {:>6}", "t_s", "lat", "lon", "alt_km", "sun");
    for k in 0..=12 {
        let t = period * k as f64 / 12.0;
        let p = first.orbit.position_at(t);
        println!(
            "{t:>7.0} {:>8.2} {:>9.2} {:>7.1} {:>6}",
            p.lat_deg(),
            p.lon_deg(),
            p.alt_km(),
            sun.is_sunlit(&p, t)
        );
    }

    // Distance to the +grid neighbours: next in plane and same slot in the next plane.
    let p0 = first.orbit.position_at(0.0);
    for (label, other) in [("in-plane", &sats[1]), ("cross-plane", &sats[spec.sats_per_plane as usize])] {
        let q = other.orbit.position_at(0.0);
        println!(
            "{label:>11}: {:.0} km, light delay {:.2} ms, line of sight {}",
            p0.distance_km(&q),
            p0.light_delay_ms(&q),
            p0.line_of_sight(&q, vis.grazing_margin_km)
        );
    }
}
