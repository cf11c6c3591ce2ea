//! Quantum predictions for joint outcome probabilities and correlation
//! functions of two-sided POVM measurements.
//!
//! The closed forms are the production path. The `*_oracle` functions
//! evaluate the same quantities through explicit 4×4 traces and exist to
//! cross-check them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::povm::{povm_element, povm_observable, MeasurementParams, Outcome};
use crate::quantum::{tensor, Direction, TwoQubitState};

/// Two-particle spin state produced by the mother particle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpinState {
    /// `(|+−⟩ − |−+⟩)/√2`
    Singlet,
    /// `(|+−⟩ + |−+⟩)/√2`
    TripletM0,
}

impl SpinState {
    pub fn state(self) -> TwoQubitState {
        match self {
            SpinState::Singlet => TwoQubitState::singlet(),
            SpinState::TripletM0 => TwoQubitState::triplet_m0(),
        }
    }

    /// Closed-form spin-correlation matrix `⟨σ_i ⊗ σ_j⟩` (diagonal for both
    /// states).
    pub fn correlation_diagonal(self) -> [f64; 3] {
        match self {
            SpinState::Singlet => [-1.0, -1.0, -1.0],
            SpinState::TripletM0 => [1.0, 1.0, -1.0],
        }
    }

    /// Closed-form correlation `E(a, b)` for this state.
    pub fn correlation(
        self,
        pa: &MeasurementParams,
        a: &Direction,
        pb: &MeasurementParams,
        b: &Direction,
    ) -> Result<f64> {
        match self {
            SpinState::Singlet => Ok(correlation_singlet(pa, a, pb, b)),
            SpinState::TripletM0 => correlation_triplet_m0(pa, a, pb, b),
        }
    }
}

/// `P_jk` for `j, k ∈ {+, −}`; index 0 is `+`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct JointProbTable {
    pub p: [[f64; 2]; 2],
}

fn idx(o: Outcome) -> usize {
    match o {
        Outcome::Plus => 0,
        Outcome::Minus => 1,
    }
}

impl JointProbTable {
    pub fn get(&self, j: Outcome, k: Outcome) -> f64 {
        self.p[idx(j)][idx(k)]
    }

    pub fn total(&self) -> f64 {
        self.p.iter().flatten().sum()
    }

    /// `Σ_jk jk P_jk`
    pub fn correlation(&self) -> f64 {
        self.p[0][0] - self.p[0][1] - self.p[1][0] + self.p[1][1]
    }

    /// `Σ_k P_jk`
    pub fn marginal_a(&self, j: Outcome) -> f64 {
        self.p[idx(j)].iter().sum()
    }

    /// `Σ_j P_jk`
    pub fn marginal_b(&self, k: Outcome) -> f64 {
        self.p[0][idx(k)] + self.p[1][idx(k)]
    }

    /// Entries non-negative and summing to one within `tol`.
    pub fn is_normalized(&self, tol: f64) -> bool {
        self.p.iter().flatten().all(|&x| x >= -tol) && (self.total() - 1.0).abs() <= tol
    }
}

/// `P_jk(a, b) = ⟨M_j(a) ⊗ M_k(b)⟩` by explicit trace.
pub fn joint_prob_matrix(
    state: &TwoQubitState,
    pa: &MeasurementParams,
    a: &Direction,
    pb: &MeasurementParams,
    b: &Direction,
) -> Result<JointProbTable> {
    let mut p = [[0.0; 2]; 2];
    for j in Outcome::BOTH {
        for k in Outcome::BOTH {
            let op = tensor(&povm_element(pa, a, j), &povm_element(pb, b, k));
            p[idx(j)][idx(k)] = state.expectation(&op)?;
        }
    }
    Ok(JointProbTable { p })
}

/// Closed-form singlet probabilities `((1+jη_a)(1+kη_b) − jk α_a α_b a·b)/4`.
pub fn joint_prob_singlet(
    pa: &MeasurementParams,
    a: &Direction,
    pb: &MeasurementParams,
    b: &Direction,
) -> JointProbTable {
    let ab = a.dot(b);
    let mut p = [[0.0; 2]; 2];
    for j in Outcome::BOTH {
        for k in Outcome::BOTH {
            let (sj, sk) = (j.sign(), k.sign());
            p[idx(j)][idx(k)] =
                ((1.0 + sj * pa.eta()) * (1.0 + sk * pb.eta()) - sj * sk * pa.alpha() * pb.alpha() * ab) / 4.0;
        }
    }
    JointProbTable { p }
}

/// `⟨(M₊−M₋) ⊗ (M₊−M₋)⟩` by explicit trace.
pub fn correlation_oracle(
    state: &TwoQubitState,
    pa: &MeasurementParams,
    a: &Direction,
    pb: &MeasurementParams,
    b: &Direction,
) -> Result<f64> {
    state.expectation(&tensor(&povm_observable(pa, a), &povm_observable(pb, b)))
}

/// Singlet correlation `η_a η_b − α_a α_b (a·b)`.
pub fn correlation_singlet(pa: &MeasurementParams, a: &Direction, pb: &MeasurementParams, b: &Direction) -> f64 {
    pa.eta() * pb.eta() - pa.alpha() * pb.alpha() * a.dot(b)
}

/// Triplet (`m = 0`) correlation `α_a α_b (a_x b_x + a_y b_y − a_z b_z)`.
///
/// Only defined for unbiased measurements, as realized by hyperon decay.
pub fn correlation_triplet_m0(
    pa: &MeasurementParams,
    a: &Direction,
    pb: &MeasurementParams,
    b: &Direction,
) -> Result<f64> {
    for p in [pa, pb] {
        if p.eta() != 0.0 {
            return Err(Error::BiasNotSupported(p.eta()));
        }
    }
    Ok(pa.alpha() * pb.alpha() * parity_flip_z(a).dot(b))
}

/// `(x, y, z) ↦ (x, y, −z)`
pub fn parity_flip_z(d: &Direction) -> Direction {
    // Negating one component preserves the norm exactly.
    Direction::new(d.x(), d.y(), -d.z()).expect("parity flip preserves unit norm")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::EXACT_TOL;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_direction(rng: &mut impl Rng) -> Direction {
        let z: f64 = rng.random_range(-1.0..=1.0);
        Direction::from_spherical(z.acos(), rng.random_range(0.0..std::f64::consts::TAU))
    }

    fn random_params(rng: &mut impl Rng) -> MeasurementParams {
        loop {
            let eta = rng.random_range(-1.0..=1.0);
            let alpha = rng.random_range(-1.0..=1.0);
            if let Ok(p) = MeasurementParams::new(eta, alpha) {
                return p;
            }
        }
    }

    #[test]
    fn singlet_sharp_perfect_anticorrelation() {
        let p = MeasurementParams::projective();
        let t = joint_prob_matrix(&TwoQubitState::singlet(), &p, &Direction::Y, &p, &Direction::Y).unwrap();
        assert_abs_diff_eq!(t.get(Outcome::Plus, Outcome::Plus), 0.0, epsilon = EXACT_TOL);
        assert_abs_diff_eq!(correlation_singlet(&p, &Direction::Y, &p, &Direction::Y), -1.0);
    }

    #[test]
    fn triplet_sharp_along_z() {
        let p = MeasurementParams::projective();
        let t = joint_prob_matrix(&TwoQubitState::triplet_m0(), &p, &Direction::Z, &p, &Direction::Z).unwrap();
        assert_abs_diff_eq!(t.get(Outcome::Plus, Outcome::Plus), 0.0, epsilon = EXACT_TOL);
        assert_abs_diff_eq!(t.get(Outcome::Plus, Outcome::Minus), 0.5, epsilon = EXACT_TOL);
    }

    #[test]
    fn singlet_closed_form_examples() {
        let p98 = MeasurementParams::unbiased(0.98).unwrap();
        assert_abs_diff_eq!(correlation_singlet(&p98, &Direction::X, &p98, &Direction::X), -0.9604, epsilon = 1e-15);
        let pa = MeasurementParams::new(0.1, 0.5).unwrap();
        let pb = MeasurementParams::new(0.2, 0.5).unwrap();
        assert_abs_diff_eq!(correlation_singlet(&pa, &Direction::X, &pb, &Direction::Y), 0.02, epsilon = 1e-15);
    }

    #[test]
    fn singlet_table_generic_point() {
        // Frozen from an independent numpy evaluation of the 4×4 traces.
        let pa = MeasurementParams::new(0.3, 0.6).unwrap();
        let pb = MeasurementParams::new(-0.2, 0.7).unwrap();
        let a = Direction::new(0.6, 0.0, 0.8).unwrap();
        let b = Direction::normalize(1.0, 2.0, 2.0).unwrap();
        let t = joint_prob_singlet(&pa, &a, &pb, &b);
        assert_abs_diff_eq!(t.p[0][0], 0.183, epsilon = 1e-12);
        assert_abs_diff_eq!(t.p[0][1], 0.467, epsilon = 1e-12);
        assert_abs_diff_eq!(t.p[1][0], 0.217, epsilon = 1e-12);
        assert_abs_diff_eq!(t.p[1][1], 0.133, epsilon = 1e-12);
    }

    #[test]
    fn triplet_examples() {
        let p = MeasurementParams::projective();
        assert_abs_diff_eq!(correlation_triplet_m0(&p, &Direction::Z, &p, &Direction::Z).unwrap(), -1.0);
        let p98 = MeasurementParams::unbiased(0.98).unwrap();
        assert_abs_diff_eq!(
            correlation_triplet_m0(&p98, &Direction::X, &p98, &Direction::X).unwrap(),
            0.9604,
            epsilon = 1e-15
        );
        let biased = MeasurementParams::new(0.1, 0.5).unwrap();
        assert!(matches!(
            correlation_triplet_m0(&biased, &Direction::X, &p, &Direction::X),
            Err(Error::BiasNotSupported(_))
        ));
    }

    #[test]
    fn parity_flip_examples() {
        assert_eq!(parity_flip_z(&Direction::Z), -Direction::Z);
        assert_eq!(parity_flip_z(&Direction::X), Direction::X);
        let d = Direction::new(0.6, 0.0, 0.8).unwrap();
        assert_eq!(parity_flip_z(&d).components(), [0.6, 0.0, -0.8]);
        assert_eq!(parity_flip_z(&parity_flip_z(&d)), d);
    }

    #[test]
    fn flipped_triplet_has_singlet_magnitude() {
        // Printed as Ẽ(P_z a, b) = E(a, b); the two differ by an overall sign.
        let mut rng = ChaCha8Rng::seed_from_u64(20);
        for _ in 0..1000 {
            let pa = MeasurementParams::unbiased(rng.random_range(-1.0..=1.0)).unwrap();
            let pb = MeasurementParams::unbiased(rng.random_range(-1.0..=1.0)).unwrap();
            let a = random_direction(&mut rng);
            let b = random_direction(&mut rng);
            let t = correlation_triplet_m0(&pa, &parity_flip_z(&a), &pb, &b).unwrap();
            let s = correlation_singlet(&pa, &a, &pb, &b);
            assert_abs_diff_eq!(t.abs(), s.abs(), epsilon = EXACT_TOL);
            assert_abs_diff_eq!(t, -s, epsilon = EXACT_TOL);
        }
    }

    #[test]
    fn closed_forms_match_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let singlet = TwoQubitState::singlet();
        let triplet = TwoQubitState::triplet_m0();
        for _ in 0..1000 {
            let pa = random_params(&mut rng);
            let pb = random_params(&mut rng);
            let a = random_direction(&mut rng);
            let b = random_direction(&mut rng);

            let oracle = joint_prob_matrix(&singlet, &pa, &a, &pb, &b).unwrap();
            let closed = joint_prob_singlet(&pa, &a, &pb, &b);
            assert!(oracle.is_normalized(EXACT_TOL));
            for j in 0..2 {
                for k in 0..2 {
                    assert_abs_diff_eq!(oracle.p[j][k], closed.p[j][k], epsilon = EXACT_TOL);
                }
            }
            let e = correlation_singlet(&pa, &a, &pb, &b);
            assert_abs_diff_eq!(correlation_oracle(&singlet, &pa, &a, &pb, &b).unwrap(), e, epsilon = EXACT_TOL);
            assert_abs_diff_eq!(oracle.correlation(), e, epsilon = EXACT_TOL);
            assert!(e.abs() <= pa.reach() * pb.reach() + EXACT_TOL);

            // Marginals from the reduced (maximally mixed) states.
            for j in Outcome::BOTH {
                assert_abs_diff_eq!(oracle.marginal_a(j), (1.0 + j.sign() * pa.eta()) / 2.0, epsilon = EXACT_TOL);
                assert_abs_diff_eq!(oracle.marginal_b(j), (1.0 + j.sign() * pb.eta()) / 2.0, epsilon = EXACT_TOL);
            }

            let ua = MeasurementParams::unbiased(pa.alpha()).unwrap();
            let ub = MeasurementParams::unbiased(pb.alpha()).unwrap();
            assert_abs_diff_eq!(
                correlation_oracle(&triplet, &ua, &a, &ub, &b).unwrap(),
                correlation_triplet_m0(&ua, &a, &ub, &b).unwrap(),
                epsilon = EXACT_TOL
            );
        }
    }
}
