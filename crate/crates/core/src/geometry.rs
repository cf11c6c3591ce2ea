//! Triple-measurement settings for the Leggett-type test.
//!
//! Particle A is measured along three axes `a_i`; particle B along pairs
//! `(b_i, b_i')`. In the standard arrangement each `a_i` bisects its pair,
//! both members of a pair are separated by the same opening angle `phi`, and
//! the three difference vectors `b_i − b_i'` are mutually orthogonal.
//!
//! `phi` is the full opening angle between `b_i` and `b_i'`, so each member
//! sits at `phi/2` from `a_i` and `‖b_i − b_i'‖ = 2 sin(phi/2)`.
//!
//! Construction: given an orthonormal frame `e_1, e_2, e_3` and axes `a_i ⟂
//! e_i`,
//!
//! ```text
//! b_i  = cos(phi/2) a_i + sin(phi/2) e_i
//! b_i' = cos(phi/2) a_i − sin(phi/2) e_i
//! ```

use std::fmt::{self, Write as _};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::Direction;

/// Tolerance on geometric invariants (angles, bisection, orthogonality).
pub const GEOMETRY_TOL: f64 = 1e-10;

const UNIT_TOL: f64 = 1e-12;

/// Whether `b_i'` is in its constructed position or negated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    /// `a_i` bisects `(b_i, b_i')`; the differences `b_i − b_i'` are orthogonal.
    Standard,
    /// Every `b_i'` negated; the sums `b_i + b_i'` are orthogonal. Used by
    /// the difference-form bound.
    Flipped,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TripleSettings {
    /// Opening angle of the standard pairs, radians in (0, π].
    phi: f64,
    a: [Direction; 3],
    b: [Direction; 3],
    b_prime: [Direction; 3],
    orientation: Orientation,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Invariant {
    UnitVector,
    OpeningAngle,
    Bisection,
    DifferenceOrthogonality,
    SumOrthogonality,
    DifferenceAlignment,
}

impl fmt::Display for Invariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Invariant::UnitVector => "unit vector",
            Invariant::OpeningAngle => "opening angle",
            Invariant::Bisection => "bisection",
            Invariant::DifferenceOrthogonality => "orthogonality of b_i - b_i'",
            Invariant::SumOrthogonality => "orthogonality of b_i + b_i'",
            Invariant::DifferenceAlignment => "a_i parallel to b_i - b_i'",
        };
        f.write_str(s)
    }
}

/// A broken invariant, with the pair index (or index pair) and residual.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub invariant: Invariant,
    pub indices: Vec<usize>,
    pub residual: f64,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} violated at {:?} (residual {:e})", self.invariant, self.indices, self.residual)
    }
}

/// Canonical frame used when none is given: `e = (ẑ, x̂, ŷ)`, `a = (x̂, ŷ, ẑ)`.
pub fn default_frame() -> ([Direction; 3], [Direction; 3]) {
    ([Direction::Z, Direction::X, Direction::Y], [Direction::X, Direction::Y, Direction::Z])
}

/// Settings in the default frame.
pub fn default_settings(phi: f64) -> Result<TripleSettings> {
    let (e, a) = default_frame();
    build_settings(phi, e, a)
}

/// Builds the standard arrangement from an orthonormal frame and axes
/// `a_i ⟂ e_i`.
pub fn build_settings(phi: f64, frame: [Direction; 3], axes: [Direction; 3]) -> Result<TripleSettings> {
    if !(phi > 0.0 && phi <= std::f64::consts::PI) {
        return Err(Error::InvalidAngle(phi));
    }
    for i in 0..3 {
        for j in (i + 1)..3 {
            let d = frame[i].dot(&frame[j]);
            if d.abs() > GEOMETRY_TOL {
                return Err(Error::Geometry(format!(
                    "frame vectors e{} and e{} not orthogonal (e·e = {d:e})",
                    i + 1,
                    j + 1
                )));
            }
        }
        let d = axes[i].dot(&frame[i]);
        if d.abs() > GEOMETRY_TOL {
            return Err(Error::Geometry(format!("a{} not orthogonal to e{} (a·e = {d:e})", i + 1, i + 1)));
        }
    }
    let (s, c) = (phi / 2.0).sin_cos();
    let mut b = [Direction::Z; 3];
    let mut bp = [Direction::Z; 3];
    for i in 0..3 {
        let a = axes[i].to_vector();
        let e = frame[i].to_vector();
        b[i] = Direction::from_vector(&(a * c + e * s))?;
        bp[i] = Direction::from_vector(&(a * c - e * s))?;
    }
    Ok(TripleSettings { phi, a: axes, b, b_prime: bp, orientation: Orientation::Standard })
}

impl TripleSettings {
    /// Assembles settings from raw vectors without checking invariants; run
    /// [`TripleSettings::validate`] afterwards.
    pub fn from_parts(
        phi: f64,
        a: [Direction; 3],
        b: [Direction; 3],
        b_prime: [Direction; 3],
        orientation: Orientation,
    ) -> Self {
        TripleSettings { phi, a, b, b_prime, orientation }
    }

    /// Opening angle of the standard arrangement these settings derive from.
    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// Actual angle between `b_i` and `b_i'` as stored: `phi` when standard,
    /// `π − phi` when flipped.
    pub fn pair_angle(&self) -> f64 {
        match self.orientation {
            Orientation::Standard => self.phi,
            Orientation::Flipped => std::f64::consts::PI - self.phi,
        }
    }

    pub fn a(&self) -> &[Direction; 3] {
        &self.a
    }

    pub fn b(&self) -> &[Direction; 3] {
        &self.b
    }

    pub fn b_prime(&self) -> &[Direction; 3] {
        &self.b_prime
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    /// Negates every `b_i'`. Applying twice gives back the original.
    pub fn flip_b_prime(&self) -> TripleSettings {
        TripleSettings {
            phi: self.phi,
            a: self.a,
            b: self.b,
            b_prime: self.b_prime.map(|d| -d),
            orientation: match self.orientation {
                Orientation::Standard => Orientation::Flipped,
                Orientation::Flipped => Orientation::Standard,
            },
        }
    }

    /// Same settings with every A-side axis mapped through `f`.
    pub fn map_a(&self, f: impl Fn(Direction) -> Direction) -> TripleSettings {
        TripleSettings { a: self.a.map(f), ..*self }
    }

    /// Every broken invariant; empty when the settings are consistent.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut push = |invariant, indices: Vec<usize>, residual: f64, tol: f64| {
            if !(residual <= tol) {
                out.push(Violation { invariant, indices, residual });
            }
        };

        for (k, d) in self.a.iter().chain(&self.b).chain(&self.b_prime).enumerate() {
            let v = d.to_vector();
            push(Invariant::UnitVector, vec![k], (v.norm_squared() - 1.0).abs(), UNIT_TOL);
        }

        let pair_angle = self.pair_angle();
        let orthogonal_kind = match self.orientation {
            Orientation::Standard => Invariant::DifferenceOrthogonality,
            Orientation::Flipped => Invariant::SumOrthogonality,
        };
        let mut spread = [nalgebra::Vector3::zeros(); 3];
        for i in 0..3 {
            let b = self.b[i].to_vector();
            let bp = self.b_prime[i].to_vector();
            push(
                Invariant::OpeningAngle,
                vec![i],
                (self.b[i].angle_to(&self.b_prime[i]) - pair_angle).abs(),
                GEOMETRY_TOL,
            );
            // Standard: a_i along b + b'. Flipped: a_i along b − b'.
            let (axis, other) = match self.orientation {
                Orientation::Standard => (b + bp, b - bp),
                Orientation::Flipped => (b - bp, b + bp),
            };
            spread[i] = other;
            let kind = match self.orientation {
                Orientation::Standard => Invariant::Bisection,
                Orientation::Flipped => Invariant::DifferenceAlignment,
            };
            let a = self.a[i].to_vector();
            let r = if axis.norm() > 1e-6 {
                (a - axis.normalize()).norm()
            } else {
                // Degenerate pair: the only remaining constraint is a_i ⟂ other.
                a.dot(&other.normalize()).abs()
            };
            push(kind, vec![i], r, GEOMETRY_TOL);
        }
        for i in 0..3 {
            for j in (i + 1)..3 {
                push(orthogonal_kind, vec![i, j], spread[i].dot(&spread[j]).abs(), GEOMETRY_TOL);
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    /// Errors with every violation listed if the settings are inconsistent.
    pub fn ensure_valid(&self) -> Result<()> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            let msg = v.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ");
            Err(Error::Geometry(msg))
        }
    }

    /// Plain-text form read back by [`str::parse`].
    pub fn to_config(&self) -> String {
        let mut s = String::from("# triple-measurement settings v1\n");
        let orient = match self.orientation {
            Orientation::Standard => "standard",
            Orientation::Flipped => "flipped",
        };
        writeln!(s, "orientation {orient}").unwrap();
        writeln!(s, "phi {}", self.phi).unwrap();
        for (name, set) in [("a", &self.a), ("b", &self.b), ("b'", &self.b_prime)] {
            for (i, d) in set.iter().enumerate() {
                let (base, tick) = name.split_at(1);
                writeln!(s, "{base}{}{tick} {d}", i + 1).unwrap();
            }
        }
        s
    }
}

impl FromStr for TripleSettings {
    type Err = Error;

    /// Parses the format written by [`TripleSettings::to_config`]. Vectors are
    /// renormalized if within 1e-6 of unit length; the result must pass
    /// validation.
    fn from_str(text: &str) -> Result<Self> {
        let mut phi = None;
        let mut orientation = Orientation::Standard;
        let mut slots: [Option<Direction>; 9] = [None; 9];
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let perr = |msg: String| Error::Parse { line: line_no, msg };
            let mut it = line.split_whitespace();
            let key = it.next().unwrap();
            let rest: Vec<&str> = it.collect();
            match key {
                "orientation" => {
                    orientation = match rest.as_slice() {
                        ["standard"] => Orientation::Standard,
                        ["flipped"] => Orientation::Flipped,
                        _ => return Err(perr(format!("bad orientation {rest:?}"))),
                    }
                }
                "phi" => {
                    let [v] = rest.as_slice() else {
                        return Err(perr("phi takes one value".into()));
                    };
                    phi = Some(v.parse::<f64>().map_err(|e| perr(format!("phi: {e}")))?);
                }
                _ => {
                    let slot = match key {
                        "a1" => 0,
                        "a2" => 1,
                        "a3" => 2,
                        "b1" => 3,
                        "b2" => 4,
                        "b3" => 5,
                        "b1'" => 6,
                        "b2'" => 7,
                        "b3'" => 8,
                        _ => return Err(perr(format!("unknown key {key:?}"))),
                    };
                    if rest.len() != 3 {
                        return Err(perr(format!("{key} needs three components")));
                    }
                    let mut c = [0.0f64; 3];
                    for (k, s) in rest.iter().enumerate() {
                        c[k] = s.parse().map_err(|e| perr(format!("{key}: {e}")))?;
                    }
                    let n = (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt();
                    if (n - 1.0).abs() > 1e-6 {
                        return Err(perr(format!("{key} has norm {n}, expected 1")));
                    }
                    slots[slot] = Some(if (n * n - 1.0).abs() <= UNIT_TOL {
                        Direction::new(c[0], c[1], c[2])?
                    } else {
                        Direction::normalize(c[0], c[1], c[2])?
                    });
                }
            }
        }
        let phi = phi.ok_or(Error::Parse { line: 0, msg: "missing phi".into() })?;
        if !(phi > 0.0 && phi <= std::f64::consts::PI) {
            return Err(Error::InvalidAngle(phi));
        }
        let mut dirs = [Direction::Z; 9];
        for (k, s) in slots.iter().enumerate() {
            dirs[k] = s.ok_or_else(|| Error::Parse { line: 0, msg: format!("missing vector #{}", k + 1) })?;
        }
        let settings = TripleSettings {
            phi,
            a: [dirs[0], dirs[1], dirs[2]],
            b: [dirs[3], dirs[4], dirs[5]],
            b_prime: [dirs[6], dirs[7], dirs[8]],
            orientation,
        };
        settings.ensure_valid()?;
        Ok(settings)
    }
}
