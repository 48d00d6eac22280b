//! Independent oracles for the closed-form models.

use std::f64::consts::PI;

use approx::assert_relative_eq;
use jamming_core::experiments::{fit_affine, fit_through_origin};
use jamming_core::geometry::{chain_pose, JointAngles};
use jamming_core::torque::{
    comb_holding_torque, disc_friction_torque, disc_friction_torque_numeric, normal_load_from_tension,
    CombParams, Material,
};
use jamming_core::ChainConfig;
use rand::rngs::StdRng;
use rand::SeedableRng;
use rand_distr::{Distribution, Normal};

/// Cartesian midpoint rule over the bounding square, cells whose centre
/// falls inside the disc carry pressure `F / (pi R^2)` and lever arm `|x|`.
fn cartesian_disc_oracle(mu: f64, load: f64, radius: f64, cells: usize) -> f64 {
    let h = 2.0 * radius / cells as f64;
    let pressure = load / (PI * radius * radius);
    let mut total = 0.0;
    for i in 0..cells {
        let x = -radius + (i as f64 + 0.5) * h;
        for j in 0..cells {
            let y = -radius + (j as f64 + 0.5) * h;
            let r = x.hypot(y);
            if r <= radius {
                total += mu * pressure * r * h * h;
            }
        }
    }
    total
}

/// Polar midpoint rule written out cell by cell.
fn polar_disc_oracle(mu: f64, load: f64, radius: f64, n: usize) -> f64 {
    let dr = radius / n as f64;
    let dt = 2.0 * PI / n as f64;
    let mut total = 0.0;
    for i in 0..n {
        let r = (i as f64 + 0.5) * dr;
        for _ in 0..n {
            total += mu * load / (PI * radius * radius) * r * r * dr * dt;
        }
    }
    total
}

#[test]
fn cartesian_oracle_agrees_with_two_thirds() {
    // Boundary cells make this rule only first-order accurate.
    let v = cartesian_disc_oracle(1.0, 1.0, 1.0, 2000);
    assert!((v - 2.0 / 3.0).abs() / (2.0 / 3.0) < 2e-3, "{v}");
    let v = cartesian_disc_oracle(0.3, 70.71, 0.015, 2000);
    assert!((v - 0.21213).abs() / 0.21213 < 2e-3, "{v}");
}

#[test]
fn frozen_disc_values() {
    // Frozen from polar_disc_oracle with 1000x1000 cells.
    let unit = polar_disc_oracle(1.0, 1.0, 1.0, 1000);
    let example = polar_disc_oracle(0.3, 70.71, 0.015, 1000);
    assert_relative_eq!(unit, 0.6666665, max_relative = 1e-6);
    assert_relative_eq!(example, 0.2121299, max_relative = 1e-6);

    assert_relative_eq!(disc_friction_torque(1.0, 1.0, 1.0).unwrap(), unit, max_relative = 1e-5);
    assert_relative_eq!(disc_friction_torque(0.3, 70.71, 0.015).unwrap(), example, max_relative = 1e-5);
    assert_relative_eq!(
        disc_friction_torque_numeric(1.0, 1.0, 1.0, 1000, 1000).unwrap(),
        unit,
        max_relative = 1e-9
    );
    assert_relative_eq!(
        disc_friction_torque_numeric(0.3, 70.71, 0.015, 1000, 1000).unwrap(),
        disc_friction_torque(0.3, 70.71, 0.015).unwrap(),
        max_relative = 1e-5
    );
}

#[test]
fn comb_nine_surfaces_against_oracle() {
    let comb = CombParams {
        plate_radius: 0.015,
        plate_count: 5,
        plate_thickness: 0.0011,
        clearance: 0.00112,
        training_angle: 45.0,
        material: Material { mu: 0.3 },
    };
    let expected = 9.0 * polar_disc_oracle(0.3, 70.71, 0.015, 1000);
    assert_relative_eq!(comb_holding_torque(&comb, 70.71).unwrap(), expected, max_relative = 1e-5);
    assert_relative_eq!(expected, 1.90917, max_relative = 1e-5);
}

#[test]
fn pulley_load_is_vector_sum() {
    // Two 50 N pulls at right angles.
    let (ax, ay) = (50.0, 0.0);
    let (bx, by) = (0.0, 50.0);
    let resultant = f64::hypot(ax + bx, ay + by);
    assert_relative_eq!(normal_load_from_tension(50.0, 90.0).unwrap(), resultant, max_relative = 1e-12);
    assert_relative_eq!(resultant, 70.71067811865476, max_relative = 1e-12);
}

#[test]
fn uniform_bend_tip_matches_complex_sum() {
    let chain = ChainConfig {
        joint_count: 8,
        inter_axial_distance: 0.0091,
        lever_arm: 0.122,
        root_tension: 50.0,
    };
    let pose = chain_pose(&chain, &JointAngles::uniform(8, 10.0)).unwrap();
    // sum_{k=1..n} d * e^{i k a} as a geometric series.
    let a = 10f64.to_radians();
    let n = 8.0;
    let scale = 0.0091 * (n * a / 2.0).sin() / (a / 2.0).sin();
    let phase = (n + 1.0) * a / 2.0;
    let tip = pose.last().unwrap();
    assert_relative_eq!(tip.x, scale * phase.cos(), max_relative = 1e-12);
    assert_relative_eq!(tip.y, scale * phase.sin(), max_relative = 1e-12);
}

#[test]
fn noisy_line_slope_recovered() {
    let mut rng = StdRng::seed_from_u64(7);
    let (slope, intercept) = (0.0078, -0.02);
    let xs: Vec<f64> = (0..50).map(|i| 10.0 + i as f64).collect();
    let ys: Vec<f64> = xs.iter().map(|x| slope * x + intercept).collect();
    let range = ys.iter().cloned().fold(f64::MIN, f64::max) - ys.iter().cloned().fold(f64::MAX, f64::min);
    let noise = Normal::new(0.0, 0.01 * range).unwrap();
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(&ys)
        .map(|(&x, &y)| (x, y + noise.sample(&mut rng)))
        .collect();
    let fit = fit_affine(&pts).unwrap();
    assert!((fit.slope - slope).abs() / slope < 0.02, "{fit:?}");
    assert!(fit.r_squared > 0.99 && fit.r_squared <= 1.0);
    assert!(fit.engagement_tension > 0.0);

    let origin = fit_through_origin(&pts).unwrap();
    assert_eq!(origin.intercept, 0.0);
    assert!((0.0..=1.0).contains(&origin.r_squared));
}
