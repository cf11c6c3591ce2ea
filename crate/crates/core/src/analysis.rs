//! Predictions, scans, simulation summaries and self-checks behind the
//! `leggett` command-line tool.
//!
//! Every output carries a [`Provenance`] block (tool, version, command,
//! catalog hash, seed) together with the full parameter echo.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::catalog::ProductionChannel;
use crate::correlations::{
    correlation_oracle, correlation_singlet, correlation_triplet_m0, joint_prob_matrix, joint_prob_singlet,
    parity_flip_z, SpinState,
};
use crate::error::{Error, Result};
use crate::geometry::{default_settings, Orientation, TripleSettings};
use crate::inequalities::{
    leggett_diff_lhs, leggett_singlet_curve, leggett_sum_lhs, leggett_violation_condition, max_leggett_lhs,
    optimal_phi, symmetric_alpha_threshold, triple_correlations, InequalityReport,
};
use crate::povm::{decay_effect, povm_element, DecayAmplitudes, MeasurementParams, Outcome};
use crate::quantum::{Direction, EXACT_TOL};
use crate::simulation::{
    estimate_leggett_lhs, sample_pair_decay, sampler::validated_correlation_matrix, ErrorMethod, EstimatedCorrelation,
};

pub const TOOL: &str = "leggett";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub catalog_sha256: String,
    pub seed: Option<u64>,
}

impl Provenance {
    pub fn new(command: impl Into<String>, catalog_sha256: impl Into<String>, seed: Option<u64>) -> Self {
        Provenance {
            tool: TOOL.into(),
            version: VERSION.into(),
            command: command.into(),
            catalog_sha256: catalog_sha256.into(),
            seed,
        }
    }

    /// `# key value` lines placed ahead of CSV headers.
    pub fn csv_preamble(&self) -> String {
        let mut s = String::new();
        writeln!(s, "# tool {}", self.tool).unwrap();
        writeln!(s, "# version {}", self.version).unwrap();
        writeln!(s, "# command {}", self.command).unwrap();
        writeln!(s, "# catalog_sha256 {}", self.catalog_sha256).unwrap();
        if let Some(seed) = self.seed {
            writeln!(s, "# seed {seed}").unwrap();
        }
        s
    }
}

/// A production channel plus the measurement parameters used on each side.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModelParams {
    pub channel: ProductionChannel,
    pub pa: MeasurementParams,
    pub pb: MeasurementParams,
}

impl ModelParams {
    /// Unbiased measurements with the channel's decay asymmetries.
    pub fn from_channel(channel: ProductionChannel) -> Self {
        let (pa, pb) = (channel.mode_a().measurement(), channel.mode_b().measurement());
        ModelParams { channel, pa, pb }
    }

    /// Applies optional overrides. Biased measurements are only defined
    /// for the singlet.
    pub fn with_overrides(
        self,
        eta_a: Option<f64>,
        alpha_a: Option<f64>,
        eta_b: Option<f64>,
        alpha_b: Option<f64>,
    ) -> Result<Self> {
        let channel = self.channel.with_alphas(alpha_a, alpha_b)?;
        let pa = MeasurementParams::new(eta_a.unwrap_or(self.pa.eta()), channel.alpha_a())?;
        let pb = MeasurementParams::new(eta_b.unwrap_or(self.pb.eta()), channel.alpha_b())?;
        if channel.spin_state() == SpinState::TripletM0 {
            for p in [&pa, &pb] {
                if p.eta() != 0.0 {
                    return Err(Error::BiasNotSupported(p.eta()));
                }
            }
        }
        Ok(ModelParams { channel, pa, pb })
    }

    pub fn is_unbiased(&self) -> bool {
        self.pa.eta() == 0.0 && self.pb.eta() == 0.0
    }

    /// Quantum `E(a, b)`; A-side settings are parity-flipped for χ_c0.
    pub fn correlation(&self, a: &Direction, b: &Direction) -> f64 {
        match self.channel.spin_state() {
            SpinState::Singlet => correlation_singlet(&self.pa, a, &self.pb, b),
            SpinState::TripletM0 => {
                correlation_triplet_m0(&self.pa, &parity_flip_z(a), &self.pb, b).expect("bias rejected at construction")
            }
        }
    }

    pub fn echo(&self) -> BTreeMap<String, Value> {
        let mut m = BTreeMap::new();
        m.insert("channel".into(), json!(self.channel.label()));
        m.insert("spin_state".into(), json!(self.channel.spin_state()));
        m.insert("eta_a".into(), json!(self.pa.eta()));
        m.insert("alpha_a".into(), json!(self.pa.alpha()));
        m.insert("eta_b".into(), json!(self.pb.eta()));
        m.insert("alpha_b".into(), json!(self.pb.alpha()));
        m
    }
}

/// Leggett-type report for explicit settings: sum form for standard
/// settings, difference form for flipped ones.
pub fn leggett_report(model: &ModelParams, settings: &TripleSettings) -> Result<InequalityReport> {
    let (e_b, e_bp) = triple_correlations(settings, |a, b| model.correlation(a, b));
    match settings.orientation() {
        Orientation::Standard => leggett_sum_lhs(settings, e_b, e_bp, model.pb.alpha()),
        Orientation::Flipped => leggett_diff_lhs(settings, e_b, e_bp, &model.pb),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Prediction {
    pub provenance: Provenance,
    pub params: BTreeMap<String, Value>,
    pub phi_rad: f64,
    pub phi_deg: f64,
    pub report: InequalityReport,
    /// Closed-form optimum, reported for unbiased measurements.
    pub optimal_phi_rad: Option<f64>,
    pub optimal_phi_deg: Option<f64>,
    pub max_lhs: Option<f64>,
    pub violation_condition: bool,
}

/// Leggett-type prediction at `settings`, or at the default arrangement
/// with opening angle `phi` (the optimum when `None`).
pub fn predict(
    model: &ModelParams,
    phi: Option<f64>,
    settings: Option<&TripleSettings>,
    provenance: Provenance,
) -> Result<Prediction> {
    let (aa, ab) = (model.pa.alpha(), model.pb.alpha());
    let settings = match (settings, phi) {
        (Some(s), _) => *s,
        (None, Some(phi)) => default_settings(phi)?,
        (None, None) => default_settings(optimal_phi(aa, ab))?,
    };
    let report = leggett_report(model, &settings)?;
    let opt = model.is_unbiased().then(|| optimal_phi(aa, ab));
    Ok(Prediction {
        provenance,
        params: model.echo(),
        phi_rad: settings.phi(),
        phi_deg: settings.phi().to_degrees(),
        report,
        optimal_phi_rad: opt,
        optimal_phi_deg: opt.map(f64::to_degrees),
        max_lhs: model.is_unbiased().then(|| max_leggett_lhs(aa, ab)),
        violation_condition: leggett_violation_condition(aa, ab),
    })
}

/// Grid of Leggett-type values with a violation mask.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanResult {
    pub axis_names: Vec<String>,
    /// One column per axis, each as long as `lhs`.
    pub grid: Vec<Vec<f64>>,
    pub lhs: Vec<f64>,
    pub bound: f64,
    pub violated: Vec<bool>,
    pub echo: BTreeMap<String, Value>,
}

impl ScanResult {
    pub fn len(&self) -> usize {
        self.lhs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lhs.is_empty()
    }

    pub fn max_lhs(&self) -> f64 {
        self.lhs.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Provenance and parameter echo as `#` lines, then a header row and
    /// one numeric row per grid point.
    pub fn to_csv(&self, provenance: &Provenance) -> String {
        let mut s = provenance.csv_preamble();
        for (k, v) in &self.echo {
            match v {
                Value::String(text) => writeln!(s, "# {k} {text}").unwrap(),
                other => writeln!(s, "# {k} {other}").unwrap(),
            }
        }
        writeln!(s, "{},lhs,bound,margin,violated", self.axis_names.join(",")).unwrap();
        for i in 0..self.lhs.len() {
            for col in &self.grid {
                write!(s, "{},", col[i]).unwrap();
            }
            let margin = self.lhs[i] - self.bound;
            writeln!(s, "{},{},{},{}", self.lhs[i], self.bound, margin, u8::from(self.violated[i])).unwrap();
        }
        s
    }
}

/// Sum-form LHS along `steps` evenly spaced opening angles in
/// `[phi_min, phi_max] ⊂ (0, π]`.
pub fn scan_phi(model: &ModelParams, phi_min: f64, phi_max: f64, steps: usize) -> Result<ScanResult> {
    if steps < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 steps, got {steps}")));
    }
    if !(phi_min < phi_max) {
        return Err(Error::InvalidArgument(format!("empty range [{phi_min}, {phi_max}]")));
    }
    for phi in [phi_min, phi_max] {
        if !(phi > 0.0 && phi <= PI) {
            return Err(Error::InvalidAngle(phi));
        }
    }
    let h = (phi_max - phi_min) / (steps - 1) as f64;
    let phis: Vec<f64> = (0..steps).map(|i| if i == steps - 1 { phi_max } else { phi_min + h * i as f64 }).collect();
    let reports: Vec<InequalityReport> =
        phis.par_iter().map(|&phi| leggett_report(model, &default_settings(phi)?)).collect::<Result<_>>()?;
    let mut echo = model.echo();
    echo.insert("phi_min_rad".into(), json!(phi_min));
    echo.insert("phi_max_rad".into(), json!(phi_max));
    echo.insert("steps".into(), json!(steps));
    Ok(ScanResult {
        axis_names: vec!["phi_rad".into(), "phi_deg".into()],
        grid: vec![phis.clone(), phis.iter().map(|p| p.to_degrees()).collect()],
        lhs: reports.iter().map(|r| r.lhs).collect(),
        bound: 2.0,
        violated: reports.iter().map(|r| r.violated).collect(),
        echo,
    })
}

/// Maximum unbiased singlet LHS over an `steps × steps` grid of
/// `(|α_a|, |α_b|) ∈ [0, 1]²`, with the closed-form violation mask.
pub fn scan_region(steps: usize) -> Result<ScanResult> {
    if steps < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 steps, got {steps}")));
    }
    let axis: Vec<f64> = (0..steps).map(|i| i as f64 / (steps - 1) as f64).collect();
    let (mut ga, mut gb, mut lhs, mut violated) = (vec![], vec![], vec![], vec![]);
    for &a in &axis {
        for &b in &axis {
            ga.push(a);
            gb.push(b);
            lhs.push(max_leggett_lhs(a, b));
            violated.push(leggett_violation_condition(a, b));
        }
    }
    let mut echo = BTreeMap::new();
    echo.insert("steps".into(), json!(steps));
    echo.insert("boundary".into(), json!("(alpha_a^2 + 1/9) alpha_b^2 = 1"));
    Ok(ScanResult {
        axis_names: vec!["alpha_a".into(), "alpha_b".into()],
        grid: vec![ga, gb],
        lhs,
        bound: 2.0,
        violated,
        echo,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimulationSummary {
    pub provenance: Provenance,
    pub params: BTreeMap<String, Value>,
    pub n_events: usize,
    pub phi_rad: f64,
    pub phi_deg: f64,
    pub lhs_hat: f64,
    pub std_error: f64,
    pub error_method: ErrorMethod,
    pub closed_form_lhs: f64,
    pub bound: f64,
    /// `(lhs_hat − bound)/std_error`
    pub significance: f64,
    pub sigma_threshold: f64,
    pub violation_observed: bool,
    pub e_b: [EstimatedCorrelation; 3],
    pub e_b_prime: [EstimatedCorrelation; 3],
    pub events_file: Option<String>,
}

/// Generates events, writes them to `events_out` when given, and
/// estimates the sum-form LHS at `settings`.
pub fn simulate(
    model: &ModelParams,
    settings: &TripleSettings,
    n_events: usize,
    seed: u64,
    sigma_threshold: f64,
    events_out: Option<&std::path::Path>,
    provenance: Provenance,
) -> Result<SimulationSummary> {
    use crate::simulation::MIN_EVENTS;
    if n_events < MIN_EVENTS {
        return Err(Error::SampleTooSmall { n: n_events, min: MIN_EVENTS });
    }
    if !model.is_unbiased() {
        return Err(Error::BiasNotSupported(if model.pa.eta() != 0.0 { model.pa.eta() } else { model.pb.eta() }));
    }
    if settings.orientation() != Orientation::Standard {
        return Err(Error::Geometry("simulation estimates the sum form; use standard settings".into()));
    }
    let sample =
        sample_pair_decay(&model.channel, n_events, seed)?.with_catalog_hash(provenance.catalog_sha256.clone());
    if let Some(path) = events_out {
        crate::simulation::write_events(path, &sample)?;
    }
    let est = estimate_leggett_lhs(&sample, settings, model.pb.alpha())?;
    let closed = leggett_report(model, settings)?;
    let significance = (est.lhs_hat - 2.0) / est.std_error;
    Ok(SimulationSummary {
        provenance,
        params: model.echo(),
        n_events,
        phi_rad: settings.phi(),
        phi_deg: settings.phi().to_degrees(),
        lhs_hat: est.lhs_hat,
        std_error: est.std_error,
        error_method: est.error_method,
        closed_form_lhs: closed.lhs,
        bound: 2.0,
        significance,
        sigma_threshold,
        violation_observed: significance >= sigma_threshold,
        e_b: est.e_b,
        e_b_prime: est.e_b_prime,
        events_file: events_out.map(|p| p.display().to_string()),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckReport {
    pub checks: Vec<CheckResult>,
}

impl CheckReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// One `PASS`/`FAIL` line per check.
    pub fn render(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            let tag = if c.passed { "PASS" } else { "FAIL" };
            writeln!(s, "{tag}  {:<60} residual {:.3e}  tolerance {:.1e}", c.name, c.residual, c.tolerance).unwrap();
        }
        s
    }
}

/// Test-only perturbations for exercising [`run_checks`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fault {
    /// Flips the sign of the `α_a α_b a·b` term in the singlet closed form.
    SingletSign,
}

fn random_params(rng: &mut impl Rng) -> MeasurementParams {
    let eta: f64 = rng.random_range(-1.0..=1.0);
    let room = 1.0 - eta.abs();
    MeasurementParams::new(eta, rng.random_range(-room..=room)).expect("inside the validity region")
}

/// Closed forms against explicit 4×4 traces, sampler moments against the
/// spin-correlation matrix, and the threshold root. Inputs are drawn from
/// a fixed seed.
pub fn run_checks(fault: Option<Fault>) -> Result<CheckReport> {
    const TRIALS: usize = 1000;
    let mut rng = ChaCha20Rng::seed_from_u64(0x5EED);
    let singlet = SpinState::Singlet.state();
    let triplet = SpinState::TripletM0.state();
    let mut r_corr: f64 = 0.0;
    let mut r_prob: f64 = 0.0;
    let mut r_trip: f64 = 0.0;
    let mut r_flip: f64 = 0.0;
    let mut r_kraus: f64 = 0.0;
    for _ in 0..TRIALS {
        let (pa, pb) = (random_params(&mut rng), random_params(&mut rng));
        let (a, b) = (Direction::random(&mut rng), Direction::random(&mut rng));
        let mut closed = correlation_singlet(&pa, &a, &pb, &b);
        if fault == Some(Fault::SingletSign) {
            closed += 2.0 * pa.alpha() * pb.alpha() * a.dot(&b);
        }
        r_corr = r_corr.max((closed - correlation_oracle(&singlet, &pa, &a, &pb, &b)?).abs());

        let t = joint_prob_singlet(&pa, &a, &pb, &b);
        let m = joint_prob_matrix(&singlet, &pa, &a, &pb, &b)?;
        for j in Outcome::BOTH {
            for k in Outcome::BOTH {
                r_prob = r_prob.max((t.get(j, k) - m.get(j, k)).abs());
            }
        }

        let (ua, ub) = (MeasurementParams::unbiased(pa.alpha())?, MeasurementParams::unbiased(pb.alpha())?);
        let tr = correlation_triplet_m0(&ua, &a, &ub, &b)?;
        r_trip = r_trip.max((tr - correlation_oracle(&triplet, &ua, &a, &ub, &b)?).abs());
        let flipped = correlation_triplet_m0(&ua, &parity_flip_z(&a), &ub, &b)?;
        r_flip = r_flip.max((flipped.abs() - correlation_singlet(&ua, &a, &ub, &b).abs()).abs());

        let amps = DecayAmplitudes::new(
            num_complex::Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
            num_complex::Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
        )?;
        let p = amps.measurement();
        for o in Outcome::BOTH {
            let diff = decay_effect(&amps, &a, o) - povm_element(&p, &a, o);
            r_kraus = r_kraus.max(diff.iter().map(|z| z.norm()).fold(0.0, f64::max));
        }
    }

    let mut r_cmat: f64 = 0.0;
    for s in [SpinState::Singlet, SpinState::TripletM0] {
        let c = validated_correlation_matrix(s)?;
        let oracle = s.state().spin_correlation_matrix();
        for i in 0..3 {
            for j in 0..3 {
                r_cmat = r_cmat.max((c[(i, j)] - oracle[i][j]).abs());
            }
        }
    }

    // Sampler moments, in units of their standard error.
    let mut r_sampler: f64 = 0.0;
    for mother in [crate::catalog::Mother::EtaC, crate::catalog::Mother::ChiC0] {
        let ch = ProductionChannel::from_alphas(mother, 0.9, -0.8)?;
        let n = 200_000;
        let sample = sample_pair_decay(&ch, n, 11)?;
        let c = validated_correlation_matrix(ch.spin_state())? * (0.9 * -0.8);
        for i in 0..3 {
            for j in 0..3 {
                let xs: Vec<f64> =
                    sample.pairs().iter().map(|(na, nb)| 9.0 * na.components()[i] * nb.components()[j]).collect();
                let mean = xs.iter().sum::<f64>() / n as f64;
                let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
                r_sampler = r_sampler.max((mean - c[(i, j)]).abs() / (var / n as f64).sqrt());
            }
        }
    }

    let t = symmetric_alpha_threshold();
    let quad = ((-1.0 / 9.0 + (1.0f64 / 81.0 + 4.0).sqrt()) / 2.0).sqrt();
    let r_root = (t.powi(4) + t * t / 9.0 - 1.0).abs().max((t - quad).abs());

    let mut r_max: f64 = 0.0;
    for (aa, ab) in [(1.0, 1.0), (0.98, 0.98), (0.75, 0.75), (0.39, 0.39), (0.5, 0.9)] {
        let pa = MeasurementParams::unbiased(aa)?;
        let pb = MeasurementParams::unbiased(ab)?;
        let s = default_settings(optimal_phi(aa, ab))?;
        let (e_b, e_bp) = triple_correlations(&s, |a, b| correlation_singlet(&pa, a, &pb, b));
        let lhs = leggett_sum_lhs(&s, e_b, e_bp, ab)?.lhs;
        r_max = r_max.max((lhs - max_leggett_lhs(aa, ab)).abs());
        r_max = r_max.max((lhs - leggett_singlet_curve(aa, ab, s.phi())).abs());
    }

    let check = |name: &str, residual: f64, tolerance: f64| CheckResult {
        name: name.into(),
        residual,
        tolerance,
        passed: residual <= tolerance,
    };
    Ok(CheckReport {
        checks: vec![
            check("singlet correlation eta_a eta_b - alpha_a alpha_b a.b", r_corr, EXACT_TOL),
            check("singlet joint probabilities vs 4x4 traces", r_prob, EXACT_TOL),
            check("triplet m0 correlation vs 4x4 traces", r_trip, EXACT_TOL),
            check("triplet with parity-flipped A: |E| equals singlet", r_flip, EXACT_TOL),
            check("decay Kraus effects equal POVM elements", r_kraus, EXACT_TOL),
            check("spin correlation matrices vs traces", r_cmat, EXACT_TOL),
            check("sampler moments 9<n_A n_B^T> vs alpha_a alpha_b C (sigma)", r_sampler, 5.0),
            check("symmetric threshold root", r_root, EXACT_TOL),
            check("Leggett LHS at optimal phi vs closed-form maximum", r_max, EXACT_TOL),
        ],
    })
}
