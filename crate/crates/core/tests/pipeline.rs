use chronodyn::chronometry::{period_map_numeric, time_map_dynamic, time_map_kinematic};
use chronodyn::dynamics::{energy_audit, integrate, FieldConfig, IntegratorConfig, Method, Particle, ParticleState};
use chronodyn::io::{load_worldline, perturbation_rows, read_perturbation, save_worldline, write_perturbation};
use chronodyn::perturbation::{ForceLaw, PerturbationRun, TimeGrid};
use chronodyn::worldline::boost_worldline;
use chronodyn::{Boost, FrameTag, Vec3, Velocity3};

#[test]
fn integrated_orbit_through_boost_and_time_maps() {
    let particle = Particle::new(1.0, 1.0).unwrap();
    let field = FieldConfig::new(Vec3::zeros(), Vec3::new(0.0, 0.0, 2.0), FrameTag::moving());
    let s0 = ParticleState::new(0.0, Vec3::zeros(), Velocity3::new(0.5, 0.0, 0.0).unwrap(), particle, FrameTag::moving()).unwrap();
    let m = 1.0 / (1.0f64 - 0.25).sqrt();
    let period = std::f64::consts::TAU * m / 2.0;
    let n = 2000;
    let traj = integrate(&s0, &field, &IntegratorConfig::new(Method::Rk4, 2.0 * period / n as f64, n).unwrap()).unwrap();
    let w = &traj.worldline;

    let b = Boost::new(0.6).unwrap();
    let dynamic = time_map_dynamic(w, &field, &b).unwrap();
    let kinematic = time_map_kinematic(w, &b).unwrap();
    assert!(dynamic.max_g_discrepancy(&kinematic).unwrap() < 1e-9);

    let full = period_map_numeric(w, &b, 0.1, 1.0, period).unwrap();
    assert!((full / (1.25 * period) - 1.0).abs() < 1e-9);

    let audit = energy_audit(w, &field, &particle).unwrap();
    assert!(audit.max_relative_drift < 1e-10);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("k.csv");
    let k = boost_worldline(w, &b).unwrap();
    save_worldline(&path, &k, Some(&b)).unwrap();
    let (back, boost) = load_worldline(&path).unwrap();
    assert_eq!(back, k);
    assert_eq!(back.frame(), &FrameTag::lab());
    assert_eq!(boost.unwrap(), b);
}

#[test]
fn perturbation_csv_round_trip() {
    let f = ForceLaw::harmonic(1.0).unwrap();
    let run = PerturbationRun::solve(
        &f,
        (Vec3::new(1.0, 0.0, 0.0), Vec3::zeros()),
        (Vec3::new(1e-3, 0.0, 0.0), Vec3::new(0.0, 1e-3, 0.0)),
        1.0,
        &TimeGrid::new(0.0, 0.05, 100).unwrap(),
        Boost::new(0.001).unwrap(),
    )
    .unwrap();
    let rows = perturbation_rows(&run);
    let mut buf = Vec::new();
    write_perturbation(&rows, &mut buf).unwrap();
    assert!(buf.starts_with(b"t,r0x,r0y,r0z,r1x,r1y,r1z,Fx,Fy,Fz\n"));
    assert_eq!(read_perturbation(buf.as_slice()).unwrap(), rows);
}
