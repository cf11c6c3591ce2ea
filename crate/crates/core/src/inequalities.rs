//! Bell-type (CH, CHSH) and Leggett-type bounds for biased/unsharp
//! measurements.
//!
//! Evaluators take raw probabilities or correlation values rather than
//! states, so closed-form, matrix-oracle and Monte Carlo estimates all go
//! through the same bound logic. A bound counts as violated only when
//! `lhs − bound > 0`; no tolerance is applied here.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{Orientation, TripleSettings};
use crate::povm::{MeasurementParams, Outcome};
use crate::quantum::Direction;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InequalityKind {
    Ch,
    Chsh,
    LeggettSum,
    LeggettDiff,
}

/// Outcome of evaluating one inequality.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InequalityReport {
    pub kind: InequalityKind,
    pub lhs: f64,
    pub bound: f64,
    /// `lhs − bound`
    pub margin: f64,
    pub violated: bool,
    pub settings_used: String,
    /// Every numeric input, keyed by name.
    pub inputs: BTreeMap<String, f64>,
}

impl InequalityReport {
    pub fn new(
        kind: InequalityKind,
        lhs: f64,
        bound: f64,
        settings_used: impl Into<String>,
        inputs: BTreeMap<String, f64>,
    ) -> Self {
        let margin = lhs - bound;
        InequalityReport {
            kind,
            lhs,
            bound,
            margin,
            violated: margin > 0.0,
            settings_used: settings_used.into(),
            inputs,
        }
    }
}

/// Four setting directions for a CH or CHSH test.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BellSettings {
    pub a: Direction,
    pub a_prime: Direction,
    pub b: Direction,
    pub b_prime: Direction,
}

impl BellSettings {
    /// Co-planar settings in the x–z plane at 0°, 90° (A) and 45°, 135° (B),
    /// which give `|E(a,b) − E(a,b') + E(a',b) + E(a',b')| = 2√2` for the
    /// singlet with sharp measurements.
    pub fn tsirelson() -> Self {
        let h = FRAC_1_SQRT_2;
        BellSettings {
            a: Direction::X,
            a_prime: Direction::Z,
            b: Direction::normalize(h, 0.0, h).unwrap(),
            b_prime: Direction::normalize(-h, 0.0, h).unwrap(),
        }
    }

    /// The four `(A, B)` pairs in the order `(a,b), (a,b'), (a',b), (a',b')`.
    pub fn pairs(&self) -> [(Direction, Direction); 4] {
        [(self.a, self.b), (self.a, self.b_prime), (self.a_prime, self.b), (self.a_prime, self.b_prime)]
    }

    pub fn describe(&self) -> String {
        format!("a={:?} a'={:?} b={:?} b'={:?}", self.a, self.a_prime, self.b, self.b_prime)
    }
}

/// Probabilities entering the CH expression for a fixed outcome pair `(j, k)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ChInputs {
    /// `P_jk` at `(a,b), (a,b'), (a',b), (a',b')`.
    pub joint: [f64; 4],
    /// `P_j(a')`
    pub marginal_a_prime: f64,
    /// `P_k(b)`
    pub marginal_b: f64,
}

const PROB_TOL: f64 = 1e-12;

/// CH-type bound on joint probabilities:
///
/// ```text
/// P_jk(a,b) − P_jk(a,b') + P_jk(a',b) + P_jk(a',b')
///   − (1+kη_b) P_j(a') − (1+jη_a) P_k(b)
///   + [(1+jη_a)(1+kη_b) − |α_a α_b|]/2  ≤  0
/// ```
pub fn ch_povm_lhs(
    inputs: &ChInputs,
    pa: &MeasurementParams,
    pb: &MeasurementParams,
    j: Outcome,
    k: Outcome,
) -> Result<InequalityReport> {
    let all = inputs.joint.iter().chain([&inputs.marginal_a_prime, &inputs.marginal_b]);
    for (n, &p) in all.enumerate() {
        if !p.is_finite() || !(-PROB_TOL..=1.0 + PROB_TOL).contains(&p) {
            return Err(Error::Probability(format!("input #{n} = {p} outside [0, 1]")));
        }
    }
    let (sj, sk) = (j.sign(), k.sign());
    let ja = 1.0 + sj * pa.eta();
    let kb = 1.0 + sk * pb.eta();
    let [pab, pabp, papb, papbp] = inputs.joint;
    let lhs = pab - pabp + papb + papbp - kb * inputs.marginal_a_prime - ja * inputs.marginal_b
        + (ja * kb - (pa.alpha() * pb.alpha()).abs()) / 2.0;
    let mut echo = BTreeMap::new();
    echo.insert("P_jk(a,b)".into(), pab);
    echo.insert("P_jk(a,b')".into(), pabp);
    echo.insert("P_jk(a',b)".into(), papb);
    echo.insert("P_jk(a',b')".into(), papbp);
    echo.insert("P_j(a')".into(), inputs.marginal_a_prime);
    echo.insert("P_k(b)".into(), inputs.marginal_b);
    echo.insert("j".into(), sj);
    echo.insert("k".into(), sk);
    insert_params(&mut echo, pa, pb);
    Ok(InequalityReport::new(InequalityKind::Ch, lhs, 0.0, format!("outcomes (j,k) = ({sj:+}, {sk:+})"), echo))
}

/// CHSH-type bound `|E(a,b) − E(a,b') + E(a',b) + E(a',b')| ≤ 2(|η_a|+|α_a|)(|η_b|+|α_b|)`.
///
/// `e` is ordered as [`BellSettings::pairs`].
pub fn chsh_povm(e: [f64; 4], pa: &MeasurementParams, pb: &MeasurementParams) -> InequalityReport {
    let lhs = (e[0] - e[1] + e[2] + e[3]).abs();
    let bound = 2.0 * pa.reach() * pb.reach();
    let mut echo = BTreeMap::new();
    echo.insert("E(a,b)".into(), e[0]);
    echo.insert("E(a,b')".into(), e[1]);
    echo.insert("E(a',b)".into(), e[2]);
    echo.insert("E(a',b')".into(), e[3]);
    insert_params(&mut echo, pa, pb);
    InequalityReport::new(InequalityKind::Chsh, lhs, bound, "four-setting CHSH", echo)
}

/// Evaluates CHSH with correlations supplied by `corr(a, b)`.
pub fn chsh_with(
    settings: &BellSettings,
    pa: &MeasurementParams,
    pb: &MeasurementParams,
    mut corr: impl FnMut(&Direction, &Direction) -> f64,
) -> InequalityReport {
    let e = settings.pairs().map(|(a, b)| corr(&a, &b));
    let mut r = chsh_povm(e, pa, pb);
    r.settings_used = settings.describe();
    r
}

fn insert_params(echo: &mut BTreeMap<String, f64>, pa: &MeasurementParams, pb: &MeasurementParams) {
    echo.insert("eta_a".into(), pa.eta());
    echo.insert("alpha_a".into(), pa.alpha());
    echo.insert("eta_b".into(), pb.eta());
    echo.insert("alpha_b".into(), pb.alpha());
}

fn leggett_echo(settings: &TripleSettings, e_b: &[f64; 3], e_bp: &[f64; 3], alpha_b: f64) -> BTreeMap<String, f64> {
    let mut echo = BTreeMap::new();
    for i in 0..3 {
        echo.insert(format!("E(a{0},b{0})", i + 1), e_b[i]);
        echo.insert(format!("E(a{0},b{0}')", i + 1), e_bp[i]);
    }
    echo.insert("alpha_b".into(), alpha_b);
    echo.insert("phi".into(), settings.phi());
    echo.insert("pair_angle".into(), settings.pair_angle());
    echo
}

/// Leggett-type bound, sum form:
///
/// ```text
/// (1/3) Σ_i |E(a_i,b_i) + E(a_i,b_i')| + (2|α_b|/3)|sin(φ/2)|  ≤  2
/// ```
///
/// `settings` must be a valid standard arrangement.
pub fn leggett_sum_lhs(
    settings: &TripleSettings,
    e_b: [f64; 3],
    e_bp: [f64; 3],
    alpha_b: f64,
) -> Result<InequalityReport> {
    if settings.orientation() != Orientation::Standard {
        return Err(Error::Geometry("sum form needs standard (unflipped) settings".into()));
    }
    settings.ensure_valid()?;
    let lhs = leggett_sum_value(settings.phi(), &e_b, &e_bp, alpha_b);
    let echo = leggett_echo(settings, &e_b, &e_bp, alpha_b);
    Ok(InequalityReport::new(
        InequalityKind::LeggettSum,
        lhs,
        2.0,
        format!("triple settings, phi = {} rad", settings.phi()),
        echo,
    ))
}

/// Unchecked arithmetic behind [`leggett_sum_lhs`].
pub fn leggett_sum_value(phi: f64, e_b: &[f64; 3], e_bp: &[f64; 3], alpha_b: f64) -> f64 {
    let avg = (0..3).map(|i| (e_b[i] + e_bp[i]).abs()).sum::<f64>() / 3.0;
    avg + 2.0 * alpha_b.abs() / 3.0 * (phi / 2.0).sin().abs()
}

/// Leggett-type bound, difference form, for unbiased B-side measurement on
/// flipped settings:
///
/// ```text
/// (1/3) Σ_i |E(a_i,b_i) − E(a_i,b_i')| + (2|α_b|/3)|cos(θ/2)|  ≤  2
/// ```
///
/// where `θ` is the angle between `b_i` and the flipped `b_i'`.
pub fn leggett_diff_lhs(
    settings: &TripleSettings,
    e_b: [f64; 3],
    e_bp: [f64; 3],
    pb: &MeasurementParams,
) -> Result<InequalityReport> {
    if pb.eta() != 0.0 {
        return Err(Error::BiasNotSupported(pb.eta()));
    }
    if settings.orientation() != Orientation::Flipped {
        return Err(Error::Geometry("difference form needs flipped settings".into()));
    }
    settings.ensure_valid()?;
    let avg = (0..3).map(|i| (e_b[i] - e_bp[i]).abs()).sum::<f64>() / 3.0;
    let theta = settings.pair_angle();
    let lhs = avg + 2.0 * pb.alpha().abs() / 3.0 * (theta / 2.0).cos().abs();
    let echo = leggett_echo(settings, &e_b, &e_bp, pb.alpha());
    Ok(InequalityReport::new(
        InequalityKind::LeggettDiff,
        lhs,
        2.0,
        format!("flipped triple settings, pair angle = {theta} rad"),
        echo,
    ))
}

/// Correlations `E(a_i, b_i)` and `E(a_i, b_i')` for all three pairs.
pub fn triple_correlations(
    settings: &TripleSettings,
    mut corr: impl FnMut(&Direction, &Direction) -> f64,
) -> ([f64; 3], [f64; 3]) {
    let a = settings.a();
    let e_b = [0, 1, 2].map(|i| corr(&a[i], &settings.b()[i]));
    let e_bp = [0, 1, 2].map(|i| corr(&a[i], &settings.b_prime()[i]));
    (e_b, e_bp)
}

/// Sum-form report with correlations supplied by `corr(a, b)`.
pub fn leggett_sum_with(
    settings: &TripleSettings,
    alpha_b: f64,
    corr: impl FnMut(&Direction, &Direction) -> f64,
) -> Result<InequalityReport> {
    let (e_b, e_bp) = triple_correlations(settings, corr);
    leggett_sum_lhs(settings, e_b, e_bp, alpha_b)
}

/// `(α_a² + 1/9) α_b² > 1`: unbiased singlet predictions can exceed the sum
/// form for some opening angle.
pub fn leggett_violation_condition(alpha_a: f64, alpha_b: f64) -> bool {
    (alpha_a * alpha_a + 1.0 / 9.0) * alpha_b * alpha_b > 1.0
}

/// Positive root of `α⁴ + α²/9 = 1`, the common `|α|` above which a
/// symmetric pair violates the sum form.
pub fn symmetric_alpha_threshold() -> f64 {
    let f = |x: f64| x.powi(4) + x * x / 9.0 - 1.0;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    // f is increasing on [0, 1] with f(0) < 0 < f(1).
    while hi - lo > 1e-15 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Opening angle maximizing the unbiased singlet sum-form LHS,
/// `2 atan2(1/3, |α_a|)`; π when `α_a = 0`.
pub fn optimal_phi(alpha_a: f64, _alpha_b: f64) -> f64 {
    2.0 * (1.0f64 / 3.0).atan2(alpha_a.abs())
}

/// `2|α_b| √(α_a² + 1/9)`, the LHS at [`optimal_phi`].
pub fn max_leggett_lhs(alpha_a: f64, alpha_b: f64) -> f64 {
    2.0 * alpha_b.abs() * (alpha_a * alpha_a + 1.0 / 9.0).sqrt()
}

/// Unbiased singlet sum-form LHS as a function of the opening angle:
/// `2|α_a α_b| cos(φ/2) + (2|α_b|/3) sin(φ/2)`.
pub fn leggett_singlet_curve(alpha_a: f64, alpha_b: f64, phi: f64) -> f64 {
    let (s, c) = (phi / 2.0).sin_cos();
    2.0 * (alpha_a * alpha_b).abs() * c.abs() + 2.0 * alpha_b.abs() / 3.0 * s.abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correlations::{correlation_singlet, joint_prob_singlet};
    use crate::geometry::default_settings;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{PI, SQRT_2};

    fn ch_from_singlet(
        pa: &MeasurementParams,
        pb: &MeasurementParams,
        s: &BellSettings,
        j: Outcome,
        k: Outcome,
    ) -> InequalityReport {
        let tables = s.pairs().map(|(a, b)| joint_prob_singlet(pa, &a, pb, &b));
        let inputs = ChInputs {
            joint: tables.map(|t| t.get(j, k)),
            marginal_a_prime: tables[2].marginal_a(j),
            marginal_b: tables[0].marginal_b(k),
        };
        ch_povm_lhs(&inputs, pa, pb, j, k).unwrap()
    }

    #[test]
    fn ch_totally_unsharp_never_positive() {
        let s = BellSettings::tsirelson();
        for eta in [-0.5, 0.0, 0.3] {
            let p = MeasurementParams::new(eta, 0.0).unwrap();
            for j in Outcome::BOTH {
                for k in Outcome::BOTH {
                    assert!(ch_from_singlet(&p, &p, &s, j, k).lhs <= 1e-15);
                }
            }
        }
    }

    #[test]
    fn ch_sharp_optimum() {
        let p = MeasurementParams::projective();
        let r = ch_from_singlet(&p, &p, &BellSettings::tsirelson(), Outcome::Plus, Outcome::Minus);
        assert_abs_diff_eq!(r.lhs, (SQRT_2 - 1.0) / 2.0, epsilon = 1e-12);
        assert!(r.violated);
        assert_eq!(r.bound, 0.0);
        // Same settings, same-sign outcomes: anticorrelation works against it.
        let r = ch_from_singlet(&p, &p, &BellSettings::tsirelson(), Outcome::Plus, Outcome::Plus);
        assert_abs_diff_eq!(r.lhs, -1.207_106_781_186_547_2, epsilon = 1e-12);
    }

    #[test]
    fn ch_biased_unsharp_point() {
        // Frozen from a numpy 4x4 trace computation.
        let pa = MeasurementParams::new(0.1, 0.9).unwrap();
        let pb = MeasurementParams::new(0.0, 0.9).unwrap();
        let s = BellSettings::tsirelson();
        let r = ch_from_singlet(&pa, &pb, &s, Outcome::Plus, Outcome::Minus);
        assert_abs_diff_eq!(r.lhs, 0.167_756_492_761_103_5, epsilon = 1e-12);
        assert!(r.violated);
        let r = ch_from_singlet(&pa, &pb, &s, Outcome::Plus, Outcome::Plus);
        assert_abs_diff_eq!(r.lhs, -0.977_756_492_761_103_3, epsilon = 1e-12);
    }

    #[test]
    fn ch_rejects_bad_probabilities() {
        let p = MeasurementParams::projective();
        let inputs = ChInputs { joint: [0.1, 1.5, 0.2, 0.3], marginal_a_prime: 0.5, marginal_b: 0.5 };
        assert!(ch_povm_lhs(&inputs, &p, &p, Outcome::Plus, Outcome::Plus).is_err());
        let inputs = ChInputs { joint: [0.1, f64::NAN, 0.2, 0.3], marginal_a_prime: 0.5, marginal_b: 0.5 };
        assert!(ch_povm_lhs(&inputs, &p, &p, Outcome::Plus, Outcome::Plus).is_err());
    }

    #[test]
    fn chsh_examples() {
        let s = BellSettings::tsirelson();
        let p = MeasurementParams::projective();
        let r = chsh_with(&s, &p, &p, |a, b| correlation_singlet(&p, a, &p, b));
        assert_abs_diff_eq!(r.lhs, 2.0 * SQRT_2, epsilon = 1e-12);
        assert_eq!(r.bound, 2.0);
        assert!(r.violated);

        let h = MeasurementParams::unbiased(0.5).unwrap();
        let r = chsh_with(&s, &h, &h, |a, b| correlation_singlet(&h, a, &h, b));
        assert_abs_diff_eq!(r.lhs, 0.707_106_781_186_547_5, epsilon = 1e-12);
        assert_eq!(r.bound, 0.5);
        assert!(r.violated);

        let z = MeasurementParams::unbiased(0.0).unwrap();
        let r = chsh_with(&s, &z, &p, |a, b| correlation_singlet(&z, a, &p, b));
        assert_eq!(r.lhs, 0.0);
        assert_eq!(r.bound, 0.0);
        assert!(!r.violated);
    }

    #[test]
    fn leggett_singlet_matches_curve() {
        for (aa, ab) in [(1.0, 1.0), (0.98, 0.98), (0.75, -0.75), (-0.39, 0.39), (0.3, 0.9)] {
            let pa = MeasurementParams::unbiased(aa).unwrap();
            let pb = MeasurementParams::unbiased(ab).unwrap();
            for k in 1..=200 {
                let phi = PI * k as f64 / 200.0;
                let s = default_settings(phi).unwrap();
                let r = leggett_sum_with(&s, ab, |a, b| correlation_singlet(&pa, a, &pb, b)).unwrap();
                assert_abs_diff_eq!(r.lhs, leggett_singlet_curve(aa, ab, phi), epsilon = 1e-12);
                assert_eq!(r.violated, r.margin > 0.0);
            }
        }
    }

    #[test]
    fn leggett_maxima() {
        assert_abs_diff_eq!(max_leggett_lhs(1.0, 1.0), 2.108_185_106_778_919_7, epsilon = 1e-12);
        assert_abs_diff_eq!(max_leggett_lhs(0.98, 0.98), 2.028_870_889_052_441_4, epsilon = 1e-12);
        assert_abs_diff_eq!(max_leggett_lhs(0.75, 0.75), 1.231_107_225_224_513_2, epsilon = 1e-12);
        assert_abs_diff_eq!(optimal_phi(1.0, 1.0), 0.643_501_108_793_284_4, epsilon = 1e-12);
        assert_eq!(optimal_phi(0.0, 1.0), PI);
        for (aa, ab) in [(1.0, 1.0), (0.98, 0.7), (-0.4, 0.9)] {
            let best = leggett_singlet_curve(aa, ab, optimal_phi(aa, ab));
            assert_abs_diff_eq!(best, max_leggett_lhs(aa, ab), epsilon = 1e-12);
            for k in 0..1000 {
                let phi = PI * (k as f64 + 0.5) / 1000.0;
                assert!(leggett_singlet_curve(aa, ab, phi) <= best + 1e-15);
            }
        }
    }

    #[test]
    fn leggett_rejects_wrong_orientation_and_bias() {
        let s = default_settings(1.0).unwrap();
        assert!(leggett_sum_lhs(&s.flip_b_prime(), [0.0; 3], [0.0; 3], 1.0).is_err());
        let p = MeasurementParams::projective();
        assert!(leggett_diff_lhs(&s, [0.0; 3], [0.0; 3], &p).is_err());
        let biased = MeasurementParams::new(0.1, 0.5).unwrap();
        assert!(matches!(
            leggett_diff_lhs(&s.flip_b_prime(), [0.0; 3], [0.0; 3], &biased),
            Err(Error::BiasNotSupported(_))
        ));
    }

    #[test]
    fn leggett_diff_examples() {
        let p = MeasurementParams::projective();
        // Pair angle π: the cosine term vanishes and only the correlations count.
        let s = default_settings(1e-300_f64.max(f64::MIN_POSITIVE)).unwrap().flip_b_prime();
        let r = leggett_diff_lhs(&s, [0.0; 3], [0.0; 3], &p).unwrap();
        assert!(r.lhs < 1e-15);

        let zero = MeasurementParams::unbiased(0.0).unwrap();
        for k in 1..50 {
            let f = default_settings(PI * k as f64 / 50.0).unwrap().flip_b_prime();
            let (eb, ebp) = triple_correlations(&f, |a, b| correlation_singlet(&p, a, &zero, b));
            let r = leggett_diff_lhs(&f, eb, ebp, &zero).unwrap();
            assert!(!r.violated);
        }

        // Singlet, sharp: same curve as the sum form with the roles of sin/cos
        // swapped through the flipped pair angle.
        for k in 1..50 {
            let phi = PI * k as f64 / 50.0;
            let f = default_settings(phi).unwrap().flip_b_prime();
            let (eb, ebp) = triple_correlations(&f, |a, b| correlation_singlet(&p, a, &p, b));
            let r = leggett_diff_lhs(&f, eb, ebp, &p).unwrap();
            assert_abs_diff_eq!(r.lhs, leggett_singlet_curve(1.0, 1.0, phi), epsilon = 1e-12);
        }
    }

    #[test]
    fn threshold_root() {
        let t = symmetric_alpha_threshold();
        assert!(t > 0.97 && t < 0.973);
        assert_eq!((t * 1000.0).round() / 1000.0, 0.973);
        assert_abs_diff_eq!(t.powi(4) + t * t / 9.0, 1.0, epsilon = 1e-10);
        // Closed form in α².
        let x = (-1.0 / 9.0 + (1.0f64 / 81.0 + 4.0).sqrt()) / 2.0;
        assert_abs_diff_eq!(t, x.sqrt(), epsilon = 1e-12);
        assert!(leggett_violation_condition(t + 1e-9, t + 1e-9));
        assert!(!leggett_violation_condition(t - 1e-9, t - 1e-9));
    }

    #[test]
    fn violation_condition_examples() {
        assert!(leggett_violation_condition(1.0, 1.0));
        assert!(leggett_violation_condition(0.98, 0.98));
        assert!(!leggett_violation_condition(0.97, 0.97));
        assert!(!leggett_violation_condition(1.0, 0.0));
    }

    #[test]
    fn report_margin_definition() {
        let r = InequalityReport::new(InequalityKind::Chsh, 2.0, 2.0, "", BTreeMap::new());
        assert_eq!(r.margin, 0.0);
        assert!(!r.violated);
    }
}
