//! Event generation from the decay angular distributions.
//!
//! A single polarized decay emits its daughter along `n` with density
//! `(1 + α u·n)/4π`. A pair from a two-qubit state has joint density
//! `[1 + α_a α_b n_Aᵀ C n_B]/(4π)²`, generated as a uniform `n_A` followed
//! by `n_B` from the conditional `(1 + α_a α_b (Cᵀ n_A)·n_B)/4π`. Both
//! reduce to the linear-in-cosine law handled by [`sample_cos`].
//!
//! Events are produced in fixed chunks of [`CHUNK`]. Chunk `k` uses its own
//! ChaCha20 stream `k` under the caller's seed, so output does not depend
//! on the number of worker threads.

use nalgebra::{Matrix3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::catalog::ProductionChannel;
use crate::correlations::SpinState;
use crate::error::{Error, Result};
use crate::quantum::{Direction, EXACT_TOL};

/// Events per RNG stream.
pub const CHUNK: usize = 1 << 16;

/// Recorded with every sample.
pub const RNG_ALGORITHM: &str = "ChaCha20 (rand_chacha 0.9), seed_from_u64(seed), stream k for event chunk k of 65536";

/// Draws `c ∈ [−1, 1]` with density `(1 + κc)/2` from a uniform `r ∈ [0, 1)`.
///
/// Inverts `F(c) = [(1 + c) + κ(c² − 1)/2]/2`. The root is written as
/// `q/(1 + √(1 + κq))` with `q = 4r − 2 + κ`, which stays accurate as
/// `κ → 0`.
pub fn sample_cos(kappa: f64, r: f64) -> f64 {
    let q = 4.0 * r - 2.0 + kappa;
    let c = q / (1.0 + (1.0 + kappa * q).max(0.0).sqrt());
    c.clamp(-1.0, 1.0)
}

/// Unit vector at polar cosine `c` and azimuth `psi` about `axis`.
pub fn direction_about(axis: &Direction, c: f64, psi: f64) -> Direction {
    let (e1, e2) = axis.orthonormal_complement();
    let s = (1.0 - c * c).max(0.0).sqrt();
    let (sp, cp) = psi.sin_cos();
    let v = axis.to_vector() * c + (e1 * cp + e2 * sp) * s;
    Direction::from_vector(&v).expect("unit by construction")
}

fn draw_about(axis: &Direction, kappa: f64, rng: &mut impl Rng) -> Direction {
    let c = sample_cos(kappa, rng.random::<f64>());
    let psi = rng.random_range(0.0..std::f64::consts::TAU);
    direction_about(axis, c, psi)
}

/// One daughter direction from a decay of a hyperon polarized along `u`.
pub fn sample_single_decay(u: &Direction, alpha: f64, rng: &mut impl Rng) -> Result<Direction> {
    if !alpha.is_finite() || alpha.abs() > 1.0 {
        return Err(Error::AlphaOutOfRange(alpha));
    }
    Ok(draw_about(u, alpha, rng))
}

/// `n` single decays generated with the chunked stream layout.
pub fn sample_single_decays(u: &Direction, alpha: f64, n: usize, seed: u64) -> Result<Vec<Direction>> {
    if !alpha.is_finite() || alpha.abs() > 1.0 {
        return Err(Error::AlphaOutOfRange(alpha));
    }
    Ok(chunked(n, seed, |rng| draw_about(u, alpha, rng)))
}

fn chunk_rng(seed: u64, k: usize) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(k as u64);
    rng
}

fn chunked<T: Send>(n: usize, seed: u64, draw: impl Fn(&mut ChaCha20Rng) -> T + Sync) -> Vec<T> {
    let chunks = n.div_ceil(CHUNK);
    let parts: Vec<Vec<T>> = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let len = CHUNK.min(n - k * CHUNK);
            let mut rng = chunk_rng(seed, k);
            (0..len).map(|_| draw(&mut rng)).collect()
        })
        .collect();
    let mut out = Vec::with_capacity(n);
    for p in parts {
        out.extend(p);
    }
    out
}

/// Closed-form spin-correlation matrix `C_ij = ⟨σ_i ⊗ σ_j⟩`, returned only
/// after it agrees with explicit traces over the state within
/// [`EXACT_TOL`].
pub fn validated_correlation_matrix(state: SpinState) -> Result<Matrix3<f64>> {
    let oracle = state.state().spin_correlation_matrix();
    let diag = state.correlation_diagonal();
    for (i, row) in oracle.iter().enumerate() {
        for (j, &x) in row.iter().enumerate() {
            let want = if i == j { diag[i] } else { 0.0 };
            if (x - want).abs() > EXACT_TOL {
                return Err(Error::InvalidState(format!(
                    "correlation matrix entry ({i},{j}) = {x}, closed form {want}"
                )));
            }
        }
    }
    Ok(Matrix3::from_diagonal(&Vector3::from(diag)))
}

/// Decay directions of many hyperon pairs.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EventSample {
    pairs: Vec<(Direction, Direction)>,
    seed: u64,
    channel: ProductionChannel,
    catalog_hash: Option<String>,
}

impl EventSample {
    pub fn new(
        pairs: Vec<(Direction, Direction)>,
        seed: u64,
        channel: ProductionChannel,
        catalog_hash: Option<String>,
    ) -> Self {
        EventSample { pairs, seed, channel, catalog_hash }
    }

    pub fn pairs(&self) -> &[(Direction, Direction)] {
        &self.pairs
    }

    pub fn n_events(&self) -> usize {
        self.pairs.len()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn channel(&self) -> &ProductionChannel {
        &self.channel
    }

    pub fn catalog_hash(&self) -> Option<&str> {
        self.catalog_hash.as_deref()
    }

    pub fn with_catalog_hash(mut self, hash: impl Into<String>) -> Self {
        self.catalog_hash = Some(hash.into());
        self
    }

    /// Empirical `9⟨n_{A,i} n_{B,j}⟩`, which converges to `α_a α_b C`.
    pub fn moment_matrix(&self) -> Matrix3<f64> {
        let n = self.pairs.len() as f64;
        let mut m = Matrix3::zeros();
        for (a, b) in &self.pairs {
            m += a.to_vector() * b.to_vector().transpose();
        }
        m * (9.0 / n)
    }
}

/// `n_events` pairs for `channel`, reproducible from `seed`.
pub fn sample_pair_decay(channel: &ProductionChannel, n_events: usize, seed: u64) -> Result<EventSample> {
    if n_events == 0 {
        return Err(Error::SampleTooSmall { n: 0, min: 1 });
    }
    let c = validated_correlation_matrix(channel.spin_state())?;
    let kappa = channel.alpha_a() * channel.alpha_b();
    let ct = c.transpose();
    let pairs = chunked(n_events, seed, |rng| {
        let na = draw_about(&Direction::Z, 0.0, rng);
        let axis: Vector3<f64> = ct * na.to_vector();
        // Cᵀ is orthogonal for both supported states, so the axis is unit.
        let axis = Direction::from_vector(&axis).expect("orthogonal correlation matrix");
        (na, draw_about(&axis, kappa, rng))
    });
    Ok(EventSample::new(pairs, seed, channel.clone(), None))
}
