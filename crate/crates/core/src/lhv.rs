//! A local hidden-variable model used as a negative control.
//!
//! Each subensemble carries polarizations `u` (A side) and `v` (B side)
//! plus a shared threshold `ξ` uniform on `[−1, 1]`. Given `ξ`, the sides
//! respond with values
//!
//! ```text
//! A = η_a + α_a sgn(u·a − ξ),    B = η_b + α_b sgn(v·b − ξ)
//! ```
//!
//! and each side emits outcome `j` with probability `(1 + jA)/2`. Both
//! responses lie in `[−1, 1]`, averaged marginals follow the generalized
//! Malus law `η + α u·a`, and nothing depends on the remote setting, so no
//! CH, CHSH or Leggett-type bound may be exceeded. The `ξ` average is done
//! analytically:
//!
//! ```text
//! ⟨sgn(x − ξ) sgn(y − ξ)⟩ = 1 − |x − y|
//! ```
//!
//! An anti-aligned variant uses `−sgn(−v·b − ξ)` on the B side, giving
//! `−(1 − |x + y|)`.
//!
//! With [`LocalSignModel::with_resolution`] the projections `u·a`, `v·b`
//! are rounded to a dyadic grid. If `η` and `α` are dyadic too and the
//! member count is a power of two, every probability is computed exactly
//! in binary floating point, so a strict `margin > 0` check cannot be
//! triggered by rounding.

use rand::Rng;

use crate::correlations::JointProbTable;
use crate::povm::{MeasurementParams, Outcome};
use crate::quantum::Direction;

/// One subensemble of the model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HiddenPair {
    pub u: Direction,
    pub v: Direction,
    pub anti: bool,
}

#[derive(Clone, Debug)]
pub struct LocalSignModel {
    pa: MeasurementParams,
    pb: MeasurementParams,
    members: Vec<HiddenPair>,
    resolution: Option<f64>,
}

impl LocalSignModel {
    /// Uniformly weighted mixture of the given subensembles.
    ///
    /// # Panics
    ///
    /// If `members` is empty.
    pub fn new(pa: MeasurementParams, pb: MeasurementParams, members: Vec<HiddenPair>) -> Self {
        assert!(!members.is_empty(), "model needs at least one subensemble");
        LocalSignModel { pa, pb, members, resolution: None }
    }

    /// `n` subensembles with independent isotropic polarizations.
    pub fn random(pa: MeasurementParams, pb: MeasurementParams, n: usize, rng: &mut impl Rng) -> Self {
        let members = (0..n)
            .map(|_| HiddenPair { u: Direction::random(rng), v: Direction::random(rng), anti: rng.random() })
            .collect();
        Self::new(pa, pb, members)
    }

    /// Rounds projections to multiples of `step` (use a power of two).
    pub fn with_resolution(mut self, step: f64) -> Self {
        self.resolution = Some(step);
        self
    }

    pub fn members(&self) -> &[HiddenPair] {
        &self.members
    }

    fn project(&self, d: &Direction, s: &Direction) -> f64 {
        let x = d.dot(s).clamp(-1.0, 1.0);
        match self.resolution {
            Some(step) => (x / step).round() * step,
            None => x,
        }
    }

    fn per_member(&self, m: &HiddenPair, a: &Direction, b: &Direction) -> (f64, f64, f64) {
        let (x, y) = (self.project(&m.u, a), self.project(&m.v, b));
        let ss = if m.anti { -(1.0 - (x + y).abs()) } else { 1.0 - (x - y).abs() };
        let (ea, aa, eb, ab) = (self.pa.eta(), self.pa.alpha(), self.pb.eta(), self.pb.alpha());
        let mean_a = ea + aa * x;
        let mean_b = eb + ab * y;
        let c = ea * eb + ea * ab * y + aa * eb * x + aa * ab * ss;
        (mean_a, mean_b, c)
    }

    fn average(&self, a: &Direction, b: &Direction) -> (f64, f64, f64) {
        let n = self.members.len() as f64;
        let (sa, sb, sc) = self.members.iter().fold((0.0, 0.0, 0.0), |acc, m| {
            let (x, y, c) = self.per_member(m, a, b);
            (acc.0 + x, acc.1 + y, acc.2 + c)
        });
        (sa / n, sb / n, sc / n)
    }

    pub fn correlation(&self, a: &Direction, b: &Direction) -> f64 {
        self.average(a, b).2
    }

    /// `P_j(a)`; depends only on the local setting.
    pub fn marginal_a(&self, a: &Direction, j: Outcome) -> f64 {
        let n = self.members.len() as f64;
        let mean =
            self.members.iter().map(|m| self.pa.eta() + self.pa.alpha() * self.project(&m.u, a)).sum::<f64>() / n;
        (1.0 + j.sign() * mean) / 2.0
    }

    /// `P_k(b)`
    pub fn marginal_b(&self, b: &Direction, k: Outcome) -> f64 {
        let n = self.members.len() as f64;
        let mean =
            self.members.iter().map(|m| self.pb.eta() + self.pb.alpha() * self.project(&m.v, b)).sum::<f64>() / n;
        (1.0 + k.sign() * mean) / 2.0
    }

    /// `P_jk = (1 + j⟨A⟩ + k⟨B⟩ + jk C)/4`.
    pub fn joint(&self, a: &Direction, b: &Direction) -> JointProbTable {
        let (ma, mb, c) = self.average(a, b);
        let mut p = [[0.0; 2]; 2];
        for (ji, j) in Outcome::BOTH.into_iter().enumerate() {
            for (ki, k) in Outcome::BOTH.into_iter().enumerate() {
                let (sj, sk) = (j.sign(), k.sign());
                p[ji][ki] = (1.0 + sj * ma + sk * mb + sj * sk * c) / 4.0;
            }
        }
        JointProbTable { p }
    }
}
