mod common;

use std::f64::consts::PI;

use leggett_povm::analysis::{scan_phi, scan_region, ModelParams, Provenance};
use leggett_povm::catalog::{Catalog, DecayMode, Mother, ProductionChannel};
use leggett_povm::correlations::{
    correlation_oracle, correlation_singlet, joint_prob_matrix, joint_prob_singlet, parity_flip_z, SpinState,
};
use leggett_povm::geometry::{build_settings, default_settings, TripleSettings};
use leggett_povm::inequalities::{
    leggett_singlet_curve, leggett_sum_with, leggett_violation_condition, max_leggett_lhs, optimal_phi,
    symmetric_alpha_threshold,
};
use leggett_povm::povm::{povm_element, MeasurementParams, Outcome};
use leggett_povm::quantum::eigenvalues2;
use leggett_povm::Direction;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn direction() -> impl Strategy<Value = Direction> {
    (-1.0f64..=1.0, 0.0..2.0 * PI).prop_map(|(z, p)| Direction::from_spherical(z.acos(), p))
}

fn params() -> impl Strategy<Value = MeasurementParams> {
    (-1.0f64..=1.0, -1.0f64..=1.0).prop_map(|(e, t)| MeasurementParams::new(e, t * (1.0 - e.abs())).unwrap())
}

fn opening_angle() -> impl Strategy<Value = f64> {
    (1e-6f64..=1.0).prop_map(|t| PI * t)
}

proptest! {
    #[test]
    fn povm_elements_are_positive_and_complete(p in params(), n in direction()) {
        let sum = povm_element(&p, &n, Outcome::Plus) + povm_element(&p, &n, Outcome::Minus);
        prop_assert!((sum - leggett_povm::quantum::identity2()).norm() < 1e-12);
        for j in Outcome::BOTH {
            let ev = eigenvalues2(&povm_element(&p, &n, j));
            prop_assert!(ev.iter().all(|x| (-1e-12..=1.0 + 1e-12).contains(x)), "{ev:?}");
        }
    }

    #[test]
    fn invalid_parameters_are_rejected(e in -2.0f64..=2.0, a in -2.0f64..=2.0) {
        let ok = (e + a).abs() <= 1.0 && (e - a).abs() <= 1.0;
        prop_assert_eq!(MeasurementParams::new(e, a).is_ok(), ok);
    }

    #[test]
    fn joint_tables_are_normalized(pa in params(), pb in params(), a in direction(), b in direction()) {
        let t = joint_prob_singlet(&pa, &a, &pb, &b);
        prop_assert!(t.is_normalized(1e-12));
        for j in Outcome::BOTH {
            prop_assert!((t.marginal_a(j) - (1.0 + j.sign() * pa.eta()) / 2.0).abs() < 1e-12);
            prop_assert!((t.marginal_b(j) - (1.0 + j.sign() * pb.eta()) / 2.0).abs() < 1e-12);
        }
        prop_assert!((t.correlation() - correlation_singlet(&pa, &a, &pb, &b)).abs() < 1e-12);
    }

    #[test]
    fn closed_form_matches_trace(pa in params(), pb in params(), a in direction(), b in direction()) {
        let s = SpinState::Singlet.state();
        let m = joint_prob_matrix(&s, &pa, &a, &pb, &b).unwrap();
        let t = joint_prob_singlet(&pa, &a, &pb, &b);
        for j in Outcome::BOTH {
            for k in Outcome::BOTH {
                prop_assert!((m.get(j, k) - t.get(j, k)).abs() < 1e-12);
            }
        }
        let e = correlation_oracle(&s, &pa, &a, &pb, &b).unwrap();
        prop_assert!((e - correlation_singlet(&pa, &a, &pb, &b)).abs() < 1e-12);
    }

    #[test]
    fn parity_flip_is_an_involution(d in direction()) {
        let back = parity_flip_z(&parity_flip_z(&d));
        prop_assert_eq!(back, d);
    }

    #[test]
    fn flip_b_prime_is_an_involution(phi in opening_angle(), seed in any::<u64>()) {
        let s = common::random_settings(phi, &mut ChaCha20Rng::seed_from_u64(seed));
        let f = s.flip_b_prime();
        prop_assert!((f.pair_angle() - (PI - phi)).abs() < 1e-12);
        prop_assert!(f.is_valid());
        prop_assert_eq!(f.flip_b_prime(), s);
    }

    #[test]
    fn settings_config_round_trip(phi in opening_angle(), seed in any::<u64>()) {
        let s = common::random_settings(phi, &mut ChaCha20Rng::seed_from_u64(seed));
        for t in [s, s.flip_b_prime()] {
            let back: TripleSettings = t.to_config().parse().unwrap();
            prop_assert_eq!(back.orientation(), t.orientation());
            prop_assert_eq!(back.phi(), t.phi());
            for (x, y) in back.b().iter().chain(back.b_prime()).zip(t.b().iter().chain(t.b_prime())) {
                prop_assert!((x.to_vector() - y.to_vector()).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn catalog_text_round_trip(
        rows in prop::collection::vec(("[A-Z][a-z]{1,6}", "[a-z_+-]{1,8}", -1.0f64..=1.0, 0.0f64..0.1), 1..6)
    ) {
        let modes: Vec<DecayMode> = rows
            .iter()
            .enumerate()
            .map(|(i, (h, c, a, u))| DecayMode::new(format!("{h}{i}"), c.clone(), *a, *u, None).unwrap())
            .collect();
        let cat = Catalog::new(modes);
        let back: Catalog = cat.to_text().parse().unwrap();
        prop_assert_eq!(back.to_text(), cat.to_text());
        prop_assert_eq!(back.sha256(), cat.sha256());
        prop_assert_eq!(back.modes(), cat.modes());
    }

    /// Unbiased singlet along the standard settings follows the closed curve,
    /// whose maximum sits at the closed-form optimum.
    #[test]
    fn sum_form_follows_singlet_curve(aa in -1.0f64..=1.0, ab in -1.0f64..=1.0, phi in opening_angle()) {
        let (pa, pb) = (MeasurementParams::unbiased(aa).unwrap(), MeasurementParams::unbiased(ab).unwrap());
        let s = default_settings(phi).unwrap();
        let r = leggett_sum_with(&s, ab, |a, b| correlation_singlet(&pa, a, &pb, b)).unwrap();
        prop_assert!((r.lhs - leggett_singlet_curve(aa, ab, phi)).abs() < 1e-12);
        prop_assert!(r.lhs <= max_leggett_lhs(aa, ab) + 1e-12);
        let best = leggett_singlet_curve(aa, ab, optimal_phi(aa, ab));
        prop_assert!((best - max_leggett_lhs(aa, ab)).abs() < 1e-12);
    }

    /// The sum form only depends on relative geometry.
    #[test]
    fn sum_form_is_rotation_invariant(aa in -1.0f64..=1.0, ab in -1.0f64..=1.0, phi in opening_angle(), seed in any::<u64>()) {
        let ch = ProductionChannel::from_alphas(Mother::EtaC, aa, ab).unwrap();
        let m = ModelParams::from_channel(ch);
        let x = leggett_sum_with(&default_settings(phi).unwrap(), ab, |a, b| m.correlation(a, b)).unwrap();
        let s = common::random_settings(phi, &mut ChaCha20Rng::seed_from_u64(seed));
        let y = leggett_sum_with(&s, ab, |a, b| m.correlation(a, b)).unwrap();
        prop_assert!((x.lhs - y.lhs).abs() < 1e-12);
    }

    #[test]
    fn condition_is_symmetric_in_sign(aa in -1.0f64..=1.0, ab in -1.0f64..=1.0) {
        let c = leggett_violation_condition(aa, ab);
        prop_assert_eq!(c, leggett_violation_condition(-aa, ab));
        prop_assert_eq!(c, leggett_violation_condition(aa, -ab));
        prop_assert_eq!(c, max_leggett_lhs(aa, ab) > 2.0);
    }

    #[test]
    fn symmetric_threshold_separates(t in 0.0f64..=1.0) {
        let th = symmetric_alpha_threshold();
        if (t - th).abs() > 1e-12 {
            prop_assert_eq!(leggett_violation_condition(t, t), t > th);
        }
    }

    #[test]
    fn scan_csv_is_consistent(aa in -1.0f64..=1.0, ab in -1.0f64..=1.0, steps in 2usize..60) {
        let ch = ProductionChannel::from_alphas(Mother::ChiC0, aa, ab).unwrap();
        let scan = scan_phi(&ModelParams::from_channel(ch), PI / steps as f64, PI, steps).unwrap();
        let csv = scan.to_csv(&Provenance::new("leggett scan-phi", "00", None));
        let mut lines = csv.lines().skip_while(|l| l.starts_with('#'));
        let header = lines.next().unwrap();
        prop_assert_eq!(header, "phi_rad,phi_deg,lhs,bound,margin,violated");
        let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
        prop_assert_eq!(rows.len(), steps);
        for r in &rows {
            prop_assert_eq!(r.len(), 6);
            prop_assert!((r[1] - r[0].to_degrees()).abs() < 1e-9);
            prop_assert!((r[2] - leggett_singlet_curve(aa, ab, r[0])).abs() < 1e-12);
            prop_assert_eq!(r[4], r[2] - r[3]);
            prop_assert_eq!(r[5] == 1.0, r[4] > 0.0);
        }
        prop_assert!(rows.windows(2).all(|w| w[0][0] < w[1][0]));
    }
}

/// A dense φ grid reaches the bound exactly when the closed-form condition
/// holds. Pairs whose optimum lies within 1e-6 of the bound are skipped: the
/// grid misses the peak by up to ~1e-7 there.
#[test]
fn grid_maximum_agrees_with_condition() {
    let model = |a: f64, b: f64| ModelParams::from_channel(ProductionChannel::from_alphas(Mother::EtaC, a, b).unwrap());
    let (mut checked, mut skipped) = (0, 0);
    for i in 0..=20 {
        for j in 0..=20 {
            let (aa, ab) = (0.94 + 0.06 * i as f64 / 20.0, 0.94 + 0.06 * j as f64 / 20.0);
            if (max_leggett_lhs(aa, ab) - 2.0).abs() < 1e-6 {
                skipped += 1;
                continue;
            }
            let scan = scan_phi(&model(aa, ab), PI / 1e4, PI, 10_000).unwrap();
            let grid_violates = scan.violated.iter().any(|&v| v);
            assert_eq!(grid_violates, leggett_violation_condition(aa, ab), "alpha = ({aa}, {ab})");
            assert!(scan.max_lhs() <= max_leggett_lhs(aa, ab) + 1e-9);
            checked += 1;
        }
    }
    assert!(checked > 400 && skipped < 10, "checked {checked}, skipped {skipped}");
}

#[test]
fn region_scan_mask_matches_boundary() {
    let scan = scan_region(51).unwrap();
    assert_eq!(scan.len(), 51 * 51);
    for i in 0..scan.len() {
        let (a, b) = (scan.grid[0][i], scan.grid[1][i]);
        assert_eq!(scan.violated[i], (a * a + 1.0 / 9.0) * b * b > 1.0);
        assert_eq!(scan.violated[i], scan.lhs[i] > 2.0);
    }
    assert!(scan.violated[scan.len() - 1]);
    assert!(!scan.violated[0]);
}

#[test]
fn build_settings_rejects_bad_frames() {
    let (x, y, z) = (Direction::X, Direction::Y, Direction::Z);
    assert!(build_settings(0.3, [x, x, y], [x, y, z]).is_err());
    assert!(build_settings(0.0, [z, x, y], [x, y, z]).is_err());
    assert!(build_settings(PI + 0.1, [z, x, y], [x, y, z]).is_err());
}
