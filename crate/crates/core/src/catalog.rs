//! Hyperon decay modes and production channels.
//!
//! The catalog is a whitespace-separated text table, one mode per line:
//!
//! ```text
//! SigmaPlus  p_pi0  -0.980  0.017  SigmaBarMinus
//! ```
//!
//! Columns are hyperon, final state, signed asymmetry `α`, uncertainty, and
//! the CP-conjugate hyperon (`-` for none). `#` starts a comment.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::correlations::{correlation_singlet, correlation_triplet_m0, parity_flip_z, SpinState};
use crate::error::{Error, Result};
use crate::povm::MeasurementParams;
use crate::quantum::Direction;

/// Catalog shipped with the crate.
pub const BUILTIN_CATALOG: &str = include_str!("../data/hyperons.catalog");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayMode {
    hyperon: String,
    channel: String,
    alpha: f64,
    alpha_uncertainty: f64,
    cp_conjugate: Option<String>,
}

impl DecayMode {
    pub fn new(
        hyperon: impl Into<String>,
        channel: impl Into<String>,
        alpha: f64,
        alpha_uncertainty: f64,
        cp_conjugate: Option<String>,
    ) -> Result<Self> {
        let mode =
            DecayMode { hyperon: hyperon.into(), channel: channel.into(), alpha, alpha_uncertainty, cp_conjugate };
        let bad = |msg: String| Err(Error::Catalog { mode: mode.label(), msg });
        if !alpha.is_finite() || alpha.abs() > 1.0 {
            return bad(format!("|alpha| = {} exceeds 1", alpha.abs()));
        }
        if !alpha_uncertainty.is_finite() || alpha_uncertainty < 0.0 {
            return bad(format!("negative uncertainty {alpha_uncertainty}"));
        }
        for name in [&mode.hyperon, &mode.channel] {
            if name.is_empty() || name.contains(|c: char| c.is_whitespace() || c == '#' || c == ':' || c == '.') {
                return bad(format!("name {name:?} must be non-empty without whitespace, '#', ':' or '.'"));
            }
        }
        Ok(mode)
    }

    pub fn hyperon(&self) -> &str {
        &self.hyperon
    }

    pub fn channel(&self) -> &str {
        &self.channel
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn alpha_uncertainty(&self) -> f64 {
        self.alpha_uncertainty
    }

    pub fn cp_conjugate(&self) -> Option<&str> {
        self.cp_conjugate.as_deref()
    }

    /// `hyperon.final_state`
    pub fn label(&self) -> String {
        format!("{}.{}", self.hyperon, self.channel)
    }

    /// Decay as an unbiased POVM with unsharpness `α`.
    pub fn measurement(&self) -> MeasurementParams {
        MeasurementParams::unbiased(self.alpha).expect("|alpha| <= 1 checked at construction")
    }

    /// Copy with a different `α` (used for parameter overrides).
    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        DecayMode::new(
            self.hyperon.clone(),
            self.channel.clone(),
            alpha,
            self.alpha_uncertainty,
            self.cp_conjugate.clone(),
        )
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Catalog {
    modes: Vec<DecayMode>,
}

impl Catalog {
    pub fn new(modes: Vec<DecayMode>) -> Self {
        Catalog { modes }
    }

    pub fn builtin() -> Self {
        BUILTIN_CATALOG.parse().expect("shipped catalog is well formed")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        std::fs::read_to_string(path)?.parse()
    }

    pub fn modes(&self) -> &[DecayMode] {
        &self.modes
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    /// First mode of `hyperon`, optionally restricted to one final state.
    pub fn find(&self, hyperon: &str, channel: Option<&str>) -> Option<&DecayMode> {
        self.modes.iter().find(|m| m.hyperon == hyperon && channel.is_none_or(|c| m.channel == c))
    }

    /// Canonical text: one row per mode, single-space separated, no
    /// comments.
    pub fn to_text(&self) -> String {
        self.modes
            .iter()
            .map(|m| {
                format!(
                    "{} {} {} {} {}\n",
                    m.hyperon,
                    m.channel,
                    m.alpha,
                    m.alpha_uncertainty,
                    m.cp_conjugate.as_deref().unwrap_or("-")
                )
            })
            .collect()
    }

    /// SHA-256 of [`Catalog::to_text`], hex encoded.
    pub fn sha256(&self) -> String {
        hex::encode(Sha256::digest(self.to_text().as_bytes()))
    }

    /// Resolves `[mother:]hyperon[.final_state]` into a production channel.
    ///
    /// The mother defaults to `eta_c`. Side B is the first mode of the
    /// CP-conjugate hyperon that links back to side A.
    pub fn resolve(&self, spec: &str) -> Result<ProductionChannel> {
        let unknown = |why: &str| Error::UnknownChannel(format!("{spec}: {why}"));
        let (mother, rest) = match spec.split_once(':') {
            Some((m, r)) => (m.parse::<Mother>()?, r),
            None => (Mother::EtaC, spec),
        };
        let (hyperon, channel) = match rest.split_once('.') {
            Some((h, c)) => (h, Some(c)),
            None => (rest, None),
        };
        let a = self.find(hyperon, channel).ok_or_else(|| unknown("no such mode in catalog"))?;
        let conj = a.cp_conjugate().ok_or_else(|| unknown("mode has no CP conjugate"))?;
        let b = self
            .modes
            .iter()
            .find(|m| m.hyperon == conj && m.cp_conjugate() == Some(hyperon))
            .or_else(|| self.find(conj, None))
            .ok_or_else(|| unknown("CP-conjugate mode missing from catalog"))?;
        Ok(ProductionChannel::new(mother, a.clone(), b.clone()))
    }
}

impl FromStr for Catalog {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut modes = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let cols: Vec<&str> = body.split_whitespace().collect();
            if cols.len() != 5 {
                return Err(Error::Parse { line, msg: format!("expected 5 columns, found {}", cols.len()) });
            }
            let num = |s: &str, what: &str| {
                s.parse::<f64>().map_err(|e| Error::Parse { line, msg: format!("{what} {s:?}: {e}") })
            };
            let alpha = num(cols[2], "alpha")?;
            let unc = num(cols[3], "uncertainty")?;
            let conj = (cols[4] != "-").then(|| cols[4].to_string());
            modes.push(DecayMode::new(cols[0], cols[1], alpha, unc, conj)?);
        }
        Ok(Catalog { modes })
    }
}

/// Parses a catalog file into its modes.
pub fn load_catalog(path: impl AsRef<Path>) -> Result<Vec<DecayMode>> {
    Ok(Catalog::load(path)?.modes)
}

/// Canonical text form of `modes`; inverse of parsing up to comments and
/// spacing.
pub fn serialize_catalog(modes: &[DecayMode]) -> String {
    Catalog::new(modes.to_vec()).to_text()
}

/// Charmonium state the hyperon pair comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mother {
    EtaC,
    ChiC0,
}

impl Mother {
    /// η_c (J^PC = 0⁻⁺) yields a spin singlet; χ_c0 (0⁺⁺) with L = 1 yields
    /// the triplet `m = 0` state along the pair axis `z`.
    pub fn spin_state(self) -> SpinState {
        match self {
            Mother::EtaC => SpinState::Singlet,
            Mother::ChiC0 => SpinState::TripletM0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Mother::EtaC => "eta_c",
            Mother::ChiC0 => "chi_c0",
        }
    }
}

impl fmt::Display for Mother {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mother {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "eta_c" | "etac" => Ok(Mother::EtaC),
            "chi_c0" | "chic0" => Ok(Mother::ChiC0),
            _ => Err(Error::UnknownChannel(format!("unknown mother {s:?} (expected eta_c or chi_c0)"))),
        }
    }
}

/// Mother particle plus the decay modes used on each side.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductionChannel {
    mother: Mother,
    a: DecayMode,
    b: DecayMode,
}

impl ProductionChannel {
    pub fn new(mother: Mother, a: DecayMode, b: DecayMode) -> Self {
        ProductionChannel { mother, a, b }
    }

    /// Channel with bare asymmetry parameters and placeholder mode names.
    pub fn from_alphas(mother: Mother, alpha_a: f64, alpha_b: f64) -> Result<Self> {
        let a = DecayMode::new("A", "custom", alpha_a, 0.0, None)?;
        let b = DecayMode::new("B", "custom", alpha_b, 0.0, None)?;
        Ok(Self::new(mother, a, b))
    }

    pub fn mother(&self) -> Mother {
        self.mother
    }

    pub fn mode_a(&self) -> &DecayMode {
        &self.a
    }

    pub fn mode_b(&self) -> &DecayMode {
        &self.b
    }

    pub fn spin_state(&self) -> SpinState {
        self.mother.spin_state()
    }

    pub fn alpha_a(&self) -> f64 {
        self.a.alpha
    }

    pub fn alpha_b(&self) -> f64 {
        self.b.alpha
    }

    /// Replaces either side's `α`.
    pub fn with_alphas(&self, alpha_a: Option<f64>, alpha_b: Option<f64>) -> Result<Self> {
        let a = alpha_a.map_or(Ok(self.a.clone()), |x| self.a.with_alpha(x))?;
        let b = alpha_b.map_or(Ok(self.b.clone()), |x| self.b.with_alpha(x))?;
        Ok(Self::new(self.mother, a, b))
    }

    /// `mother:A.final+B.final`
    pub fn label(&self) -> String {
        format!("{}:{}+{}", self.mother, self.a.label(), self.b.label())
    }
}

/// Correlation `E(a, b)` for the channel's spin state, unbiased on both
/// sides. For χ_c0 the A-side setting is parity-flipped first, which turns
/// the triplet correlation into `α_a α_b a·b`: the singlet value with the
/// opposite sign, so every bound built from `|E|` terms is unchanged.
pub fn channel_correlation(channel: &ProductionChannel, a: &Direction, b: &Direction) -> f64 {
    let (pa, pb) = (channel.a.measurement(), channel.b.measurement());
    match channel.spin_state() {
        SpinState::Singlet => correlation_singlet(&pa, a, &pb, b),
        SpinState::TripletM0 => {
            correlation_triplet_m0(&pa, &parity_flip_z(a), &pb, b).expect("decay measurements are unbiased")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::default_settings;
    use crate::inequalities::leggett_sum_with;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn builtin_rows() {
        let c = Catalog::builtin();
        let s = c.find("SigmaPlus", Some("p_pi0")).unwrap();
        assert_eq!(s.alpha().abs(), 0.980);
        assert!(c.find("Lambda", Some("p_pi-")).is_some());
        assert!(c.find("XiMinus", Some("Lambda_pi-")).is_some());
        for m in c.modes() {
            let conj = m.cp_conjugate().unwrap();
            let partner = c.find(conj, None).unwrap();
            assert_eq!(partner.alpha(), -m.alpha(), "{}", m.label());
        }
    }

    #[test]
    fn empty_and_comment_only() {
        assert!("".parse::<Catalog>().unwrap().is_empty());
        assert!("# nothing\n\n   \n".parse::<Catalog>().unwrap().is_empty());
    }

    #[test]
    fn rejects_bad_rows() {
        let e = "Foo x 1.2 0.1 -".parse::<Catalog>().unwrap_err();
        assert!(matches!(e, Error::Catalog { ref mode, .. } if mode == "Foo.x"), "{e}");
        let e = "# ok\nFoo x 0.2 -0.1 -".parse::<Catalog>().unwrap_err();
        assert!(matches!(e, Error::Catalog { .. }));
        let e = "# ok\n\nFoo x 0.2\n".parse::<Catalog>().unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }), "{e}");
        let e = "Foo x abc 0.1 -".parse::<Catalog>().unwrap_err();
        assert!(matches!(e, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn canonical_round_trip() {
        let c = Catalog::builtin();
        let text = c.to_text();
        let again: Catalog = text.parse().unwrap();
        assert_eq!(again, c);
        assert_eq!(again.to_text(), text);
        assert_eq!(again.sha256(), c.sha256());
        assert_eq!(c.sha256().len(), 64);
    }

    #[test]
    fn resolve_channels() {
        let c = Catalog::builtin();
        let ch = c.resolve("SigmaPlus").unwrap();
        assert_eq!(ch.mother(), Mother::EtaC);
        assert_eq!(ch.mode_b().hyperon(), "SigmaBarMinus");
        assert_eq!(ch.spin_state(), SpinState::Singlet);
        let ch = c.resolve("chi_c0:Lambda.p_pi-").unwrap();
        assert_eq!(ch.spin_state(), SpinState::TripletM0);
        assert_eq!(ch.alpha_b(), -0.750);
        assert!(c.resolve("Omega").is_err());
        assert!(c.resolve("psi:Lambda").is_err());
        assert!(c.resolve("Lambda.n_pi0").is_err());
    }

    #[test]
    fn singlet_channel_values() {
        let c = Catalog::builtin();
        let ch = c.resolve("SigmaPlus").unwrap();
        // −α_A α_B a·b with α_A α_B = −0.9604.
        let e = channel_correlation(&ch, &Direction::Z, &Direction::Z);
        assert_abs_diff_eq!(e, 0.9604, epsilon = 1e-12);
        let zero = ch.with_alphas(None, Some(0.0)).unwrap();
        assert_eq!(channel_correlation(&zero, &Direction::X, &Direction::X), 0.0);
    }

    #[test]
    fn chi_c0_matches_eta_c_leggett() {
        let c = Catalog::builtin();
        for name in ["SigmaPlus", "Lambda", "XiMinus"] {
            let eta = c.resolve(name).unwrap();
            let chi = c.resolve(&format!("chi_c0:{name}")).unwrap();
            for k in 1..=100 {
                let s = default_settings(PI * k as f64 / 100.0).unwrap();
                let x = leggett_sum_with(&s, eta.alpha_b(), |a, b| channel_correlation(&eta, a, b)).unwrap();
                let y = leggett_sum_with(&s, chi.alpha_b(), |a, b| channel_correlation(&chi, a, b)).unwrap();
                assert_abs_diff_eq!(x.lhs, y.lhs, epsilon = 1e-12);
            }
        }
    }
}
