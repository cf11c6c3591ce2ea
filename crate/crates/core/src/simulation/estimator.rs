//! Correlation and Leggett-LHS estimates from decay events.
//!
//! For isotropic `n_A` and the pair densities generated here,
//! `⟨(n_A·a)(n_B·b)⟩ = α_a α_b aᵀ C b / 9`, so `9(n_A·a)(n_B·b)` is an
//! unbiased per-event estimate of `E(a, b)`. The hemisphere alternative
//! uses `⟨sgn(n_A·a) sgn(n_B·b)⟩ = E(a, b)/4`.
//!
//! Sums are accumulated per chunk in parallel and merged in chunk order,
//! so results do not depend on the thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::sampler::{EventSample, CHUNK};
use crate::correlations::{parity_flip_z, SpinState};
use crate::error::{Error, Result};
use crate::geometry::TripleSettings;
use crate::inequalities::leggett_sum_value;
use crate::quantum::Direction;

/// Smallest sample the estimators accept.
pub const MIN_EVENTS: usize = 100;

/// Bootstrap replicates used when the delta method is unreliable.
pub const BOOTSTRAP_REPLICATES: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EstimatedCorrelation {
    pub e_hat: f64,
    pub std_error: f64,
    pub n_used: usize,
}

/// Count, mean and sum of squared deviations, mergeable in a fixed order.
#[derive(Clone, Copy, Debug, Default)]
struct Moments {
    n: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1.0;
        let d = x - self.mean;
        self.mean += d / self.n;
        self.m2 += d * (x - self.mean);
    }

    fn merge(self, o: Moments) -> Moments {
        if self.n == 0.0 {
            return o;
        }
        if o.n == 0.0 {
            return self;
        }
        let n = self.n + o.n;
        let d = o.mean - self.mean;
        Moments { n, mean: self.mean + d * o.n / n, m2: self.m2 + o.m2 + d * d * self.n * o.n / n }
    }

    fn std_error(&self) -> f64 {
        (self.m2 / (self.n - 1.0)).sqrt() / self.n.sqrt()
    }
}

fn moments_of(n: usize, f: impl Fn(usize) -> f64 + Sync) -> Moments {
    let parts: Vec<Moments> = (0..n.div_ceil(CHUNK))
        .into_par_iter()
        .map(|k| {
            let mut m = Moments::default();
            for i in k * CHUNK..((k + 1) * CHUNK).min(n) {
                m.push(f(i));
            }
            m
        })
        .collect();
    parts.into_iter().fold(Moments::default(), Moments::merge)
}

fn check_size(sample: &EventSample) -> Result<usize> {
    let n = sample.n_events();
    if n < MIN_EVENTS {
        return Err(Error::SampleTooSmall { n, min: MIN_EVENTS });
    }
    Ok(n)
}

fn estimate_with(
    sample: &EventSample,
    scale: f64,
    g: impl Fn(&Direction, &Direction) -> f64 + Sync,
) -> Result<EstimatedCorrelation> {
    let n = check_size(sample)?;
    let pairs = sample.pairs();
    let m = moments_of(n, |i| g(&pairs[i].0, &pairs[i].1));
    Ok(EstimatedCorrelation { e_hat: scale * m.mean, std_error: scale * m.std_error(), n_used: n })
}

/// Moment estimate `9·mean[(n_A·a)(n_B·b)]` with standard error
/// `9·sd/√N`.
pub fn estimate_correlation(sample: &EventSample, a: &Direction, b: &Direction) -> Result<EstimatedCorrelation> {
    estimate_with(sample, 9.0, |na, nb| na.dot(a) * nb.dot(b))
}

/// Hemisphere estimate `4·mean[sgn(n_A·a) sgn(n_B·b)]`.
pub fn estimate_correlation_hemisphere(
    sample: &EventSample,
    a: &Direction,
    b: &Direction,
) -> Result<EstimatedCorrelation> {
    estimate_with(sample, 4.0, |na, nb| na.dot(a).signum() * nb.dot(b).signum())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorMethod {
    Delta,
    Bootstrap,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LeggettEstimate {
    pub lhs_hat: f64,
    pub std_error: f64,
    pub error_method: ErrorMethod,
    /// `E(a_i, b_i)` estimates.
    pub e_b: [EstimatedCorrelation; 3],
    /// `E(a_i, b_i')` estimates.
    pub e_b_prime: [EstimatedCorrelation; 3],
    /// Estimates of `E(a_i,b_i) + E(a_i,b_i')`.
    pub pair_sums: [EstimatedCorrelation; 3],
}

/// Sum-form Leggett LHS from the sample, with its standard error.
///
/// The error comes from the delta method applied per event to
/// `(1/3)Σ s_i·9(n_A·a_i)(n_B·(b_i+b_i'))`, `s_i` being the sign of the
/// estimated pair sum. When any pair sum lies within two standard errors
/// of zero, where `|·|` is not smooth, a seeded bootstrap is used instead.
/// For triplet samples the A-side settings are parity-flipped.
pub fn estimate_leggett_lhs(sample: &EventSample, settings: &TripleSettings, alpha_b: f64) -> Result<LeggettEstimate> {
    settings.ensure_valid()?;
    let n = check_size(sample)?;
    let a: [Direction; 3] = match sample.channel().spin_state() {
        SpinState::Singlet => *settings.a(),
        SpinState::TripletM0 => settings.a().map(|d| parity_flip_z(&d)),
    };
    let (b, bp) = (settings.b(), settings.b_prime());
    let mut e_b = [EstimatedCorrelation { e_hat: 0.0, std_error: 0.0, n_used: n }; 3];
    let mut e_bp = e_b;
    let mut sums = e_b;
    for i in 0..3 {
        e_b[i] = estimate_correlation(sample, &a[i], &b[i])?;
        e_bp[i] = estimate_correlation(sample, &a[i], &bp[i])?;
        let both = b[i].to_vector() + bp[i].to_vector();
        sums[i] = estimate_with(sample, 9.0, |na, nb| na.dot(&a[i]) * nb.dot_vec(&both))?;
    }
    let eb = e_b.map(|e| e.e_hat);
    let ebp = e_bp.map(|e| e.e_hat);
    let lhs_hat = leggett_sum_value(settings.phi(), &eb, &ebp, alpha_b);

    let near_kink = sums.iter().any(|s| s.e_hat.abs() < 2.0 * s.std_error);
    let (std_error, error_method) = if near_kink {
        (bootstrap_error(sample, &a, settings, sample.seed()), ErrorMethod::Bootstrap)
    } else {
        let signs = sums.map(|s| s.e_hat.signum());
        let both: [_; 3] = std::array::from_fn(|i| b[i].to_vector() + bp[i].to_vector());
        let pairs = sample.pairs();
        let m = moments_of(n, |k| {
            let (na, nb) = &pairs[k];
            (0..3).map(|i| signs[i] * na.dot(&a[i]) * nb.dot_vec(&both[i])).sum::<f64>() * 3.0
        });
        (m.std_error(), ErrorMethod::Delta)
    };
    Ok(LeggettEstimate { lhs_hat, std_error, error_method, e_b, e_b_prime: e_bp, pair_sums: sums })
}

fn bootstrap_error(sample: &EventSample, a: &[Direction; 3], settings: &TripleSettings, seed: u64) -> f64 {
    let (b, bp) = (settings.b(), settings.b_prime());
    let both: [_; 3] = std::array::from_fn(|i| b[i].to_vector() + bp[i].to_vector());
    let g: Vec<[f64; 3]> = sample
        .pairs()
        .par_iter()
        .map(|(na, nb)| std::array::from_fn(|i| 9.0 * na.dot(&a[i]) * nb.dot_vec(&both[i])))
        .collect();
    let n = g.len();
    // Replicate r uses stream r of a generator keyed off the sample seed.
    let reps: Vec<f64> = (0..BOOTSTRAP_REPLICATES)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha20Rng::seed_from_u64(seed ^ 0xB007_57A9_0000_0000);
            rng.set_stream(r as u64);
            let mut s = [0.0; 3];
            for _ in 0..n {
                let row = &g[rng.random_range(0..n)];
                for i in 0..3 {
                    s[i] += row[i];
                }
            }
            s.iter().map(|x| (x / n as f64).abs()).sum::<f64>() / 3.0
        })
        .collect();
    let mut m = Moments::default();
    for x in reps {
        m.push(x);
    }
    (m.m2 / (m.n - 1.0)).sqrt()
}
