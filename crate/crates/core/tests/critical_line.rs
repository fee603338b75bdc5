use std::f64::consts::PI;

use mipd_core::replica::asymptotic_z;
use mipd_core::topology::{find_critical_point, locate_critical_points, trace_critical_line, winding_number, AxisSpec};
use mipd_core::Direction;

const FWD: Direction = Direction::Forward;

#[test]
fn traced_line_agrees_with_independent_roots() {
    let start = find_critical_point((2.0, 2.4), 1.0, FWD).unwrap();
    let line = trace_critical_line((0.6, 1.6), &start).unwrap();
    assert!(line.windows(2).all(|w| w[0].asymmetry < w[1].asymmetry));
    assert!((line[0].asymmetry - 0.6).abs() < 1e-9 && (line.last().unwrap().asymmetry - 1.6).abs() < 1e-9);
    for p in &line {
        assert!(asymptotic_z(p.strength, p.asymmetry, p.theta, FWD).unwrap().norm() <= 1e-10);
    }

    // roots located from scratch at a few A values lie on the traced branch
    for a in [0.6, 1.0, 1.6] {
        let on_line = line.iter().min_by(|x, y| (x.asymmetry - a).abs().total_cmp(&(y.asymmetry - a).abs())).unwrap();
        let roots = locate_critical_points(a, FWD, AxisSpec::new(0.0, 6.0, 121).unwrap(), 91).unwrap();
        assert!(
            roots
                .iter()
                .any(|r| (r.strength - on_line.strength).abs() < 1e-6 && (r.theta - on_line.theta).abs() < 1e-6),
            "A={a}: {on_line:?} not among {roots:?}"
        );
    }
}

#[test]
fn winding_changes_by_one_across_the_line() {
    let root = find_critical_point((2.0, 2.4), 1.0, FWD).unwrap();
    let below = winding_number(root.strength - 0.05, 1.0, FWD).unwrap();
    let above = winding_number(root.strength + 0.05, 1.0, FWD).unwrap();
    assert_eq!(below - above, 1);
}

#[test]
fn combined_symmetry_mirrors_roots() {
    // z^{(+1)}(C, −A, π−θ) = conj z^{(+1)}(C, A, θ): every root has a partner at −A
    let root = find_critical_point((2.0, 2.4), 1.0, FWD).unwrap();
    let partner = find_critical_point((root.strength, PI - root.theta), -1.0, FWD).unwrap();
    assert!((partner.strength - root.strength).abs() < 1e-8);
    assert!((partner.theta - (PI - root.theta)).abs() < 1e-8);
}
