//! Temperature scoring: the score curve between the recommended and maximum
//! temperature, and how the predicted peak of a satellite changes along its
//! orbit for a short and a long task.

use hyperdrive::constellation::CircularOrbit;
use hyperdrive::thermal::{calc_score, score_node_temperature, ThermalEnvironment, ThermalSpec, ThermalView};
use hyperdrive::{GeoPoint, NodeKind, ResourceSpec, ResourceVector, WorkflowTask};

fn main() {
    println!("calc_score with temp_rec 75, temp_max 85:");
    for t in [70.0, 75.0, 77.5, 80.0, 84.0, 85.0, 86.0] {
        println!("  {t:>5.1} C -> {}", calc_score(t, 75.0, 85.0).unwrap());
    }

    let env = ThermalEnvironment::default();
    let spec = ThermalSpec::default();
    let orbit = CircularOrbit::through_subpoint(550.0, 53.0, &GeoPoint::new(37.0, -120.0, 0.0), 0.0).unwrap();
    let view = ThermalView {
        kind: NodeKind::Satellite,
        spec: Some(&spec),
        state: None,
        orbit: Some(&orbit),
    };
    let task = |secs: f64, gpu: u32| {
        let mut t = WorkflowTask::new("job", ResourceSpec::new(ResourceVector::new(2000, 1 << 30, gpu, 0)));
        t.expected_duration_s = Some(secs);
        t
    };
    let short = task(60.0, 0);
    let long = task(1800.0, 1);

    println!(
        "\nsatellite at 550 km, temp_rec {} C, temp_max {} C, period {:.0} s",
        spec.temp_rec_c,
        spec.temp_max_c,
        orbit.period_s()
    );
    println!("{:>6} {:>6} {:>10} {:>6} {:>10} {:>6}", "t_s", "sunlit", "short_c", "score", "long_c", "score");
    let step = orbit.period_s() / 10.0;
    for k in 0..=10 {
        let t = k as f64 * step;
        let s = score_node_temperature(&short, &view, t, &env).unwrap();
        let l = score_node_temperature(&long, &view, t, &env).unwrap();
        println!(
            "{t:>6.0} {:>6} {:>10.2} {:>6} {:>10.2} {:>6}",
            env.sun.is_sunlit(&orbit.position_at(t), t),
            s.predicted_c.unwrap(),
            s.score,
            l.predicted_c.unwrap(),
            l.score
        );
    }
}
