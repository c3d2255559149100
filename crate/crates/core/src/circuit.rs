//! Circuit domain types and per-frequency assembly of the three-loop mesh
//! impedance system.
//!
//! Loop layout (all loops share one orientation):
//!
//! * loop 1: source, `R1`, `C3`, lower mid leg `rm2`
//! * loop 2: `R1`, `C1`, treble pot (`rt1 + rt2`), `C2`
//! * loop 3: `C2`, bass rheostat `rb1`, upper mid leg `rm1`, `C3`
//!
//! The output is the treble wiper; its voltage to ground is the drop across
//! `rt2`, `rb1 + rm1` and `rm2`, each of which carries exactly one loop current.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{solve_elimination, ComplexMatrix, ComplexVector};

/// The seven fixed component values of the tone stack (ohm and farad).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToneStackComponents {
    pub r1: f64,
    /// Treble pot, total resistance.
    pub rt: f64,
    /// Mid pot, total resistance.
    pub rm: f64,
    /// Bass pot, total resistance.
    pub rb: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl ToneStackComponents {
    /// Stock 5F6-A values.
    pub const BASSMAN_5F6A: Self = Self {
        r1: 56e3,
        rt: 220e3,
        rm: 25e3,
        rb: 1e6,
        c1: 220e-12,
        c2: 0.022e-6,
        c3: 0.022e-6,
    };

    pub fn validate(&self) -> Result<()> {
        for (name, value) in self.named_values() {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::domain(format!(
                    "component {name} must be positive and finite, got {value}"
                )));
            }
        }
        Ok(())
    }

    pub fn named_values(&self) -> [(&'static str, f64); 7] {
        [
            ("r1", self.r1),
            ("rt", self.rt),
            ("rm", self.rm),
            ("rb", self.rb),
            ("c1", self.c1),
            ("c2", self.c2),
            ("c3", self.c3),
        ]
    }
}

impl Default for ToneStackComponents {
    fn default() -> Self {
        Self::BASSMAN_5F6A
    }
}

/// One of the three tone controls.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Control {
    Bass,
    Mid,
    Treble,
}

impl Control {
    pub const ALL: [Control; 3] = [Control::Bass, Control::Mid, Control::Treble];

    pub fn as_str(self) -> &'static str {
        match self {
            Control::Bass => "bass",
            Control::Mid => "mid",
            Control::Treble => "treble",
        }
    }
}

impl fmt::Display for Control {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Control {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bass" => Ok(Control::Bass),
            "mid" => Ok(Control::Mid),
            "treble" => Ok(Control::Treble),
            other => Err(Error::domain(format!(
                "unknown control '{other}' (expected bass, mid or treble)"
            ))),
        }
    }
}

/// Wiper positions of the treble, mid and bass pots, each in `[0, 1]`.
///
/// `t = 1` is maximum treble cut, `m = 1` maximum mid cut and `b = 0`
/// maximum bass cut.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlSettings {
    t: f64,
    m: f64,
    b: f64,
}

impl ControlSettings {
    /// `t = 0, m = 0, b = 1`.
    pub const DEFAULT: Self = Self {
        t: 0.0,
        m: 0.0,
        b: 1.0,
    };

    pub fn new(t: f64, m: f64, b: f64) -> Result<Self> {
        for (name, value) in [("t", t), ("m", m), ("b", b)] {
            check_fraction(name, value)?;
        }
        Ok(Self { t, m, b })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn get(&self, control: Control) -> f64 {
        match control {
            Control::Bass => self.b,
            Control::Mid => self.m,
            Control::Treble => self.t,
        }
    }

    pub fn with(mut self, control: Control, value: f64) -> Result<Self> {
        check_fraction(control.as_str(), value)?;
        match control {
            Control::Bass => self.b = value,
            Control::Mid => self.m = value,
            Control::Treble => self.t = value,
        }
        Ok(self)
    }
}

impl Default for ControlSettings {
    fn default() -> Self {
        Self::DEFAULT
    }
}

fn check_fraction(name: &str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "control {name} must lie in [0, 1], got {value}"
        )))
    }
}

/// Mapping from bass knob rotation to the fraction of `rb` in circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BassTaper {
    #[default]
    Linear,
    /// Audio (log) taper: `(10^(2b) − 1) / 99`.
    Audio,
}

impl BassTaper {
    pub fn apply(self, b: f64) -> f64 {
        match self {
            BassTaper::Linear => b,
            BassTaper::Audio => ((10f64.powf(2.0 * b) - 1.0) / 99.0).clamp(0.0, 1.0),
        }
    }

    /// Returns `controls` with the bass position replaced by its tapered
    /// resistance fraction.
    pub fn map_controls(self, controls: &ControlSettings) -> ControlSettings {
        ControlSettings {
            b: self.apply(controls.b),
            ..*controls
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            BassTaper::Linear => "linear",
            BassTaper::Audio => "audio",
        }
    }
}

impl FromStr for BassTaper {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(BassTaper::Linear),
            "audio" => Ok(BassTaper::Audio),
            other => Err(Error::domain(format!(
                "unknown taper '{other}' (expected linear or audio)"
            ))),
        }
    }
}

/// Resistances of the pot legs for a given set of wiper positions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WiperResistances {
    /// Treble leg between the top of the pot and the output wiper.
    pub rt1: f64,
    /// Treble leg between the output wiper and the bass/mid network.
    pub rt2: f64,
    /// Upper mid leg, in series with the bass rheostat.
    pub rm1: f64,
    /// Lower mid leg, to ground.
    pub rm2: f64,
    /// Bass rheostat.
    pub rb1: f64,
}

pub fn wiper_resistances(
    components: &ToneStackComponents,
    controls: &ControlSettings,
) -> WiperResistances {
    let ToneStackComponents { rt, rm, rb, .. } = *components;
    let ControlSettings { t, m, b } = *controls;
    WiperResistances {
        rt1: rt * t,
        rt2: rt * (1.0 - t),
        rm1: rm * m,
        rm2: rm * (1.0 - m),
        rb1: rb * b,
    }
}

/// Capacitive reactance `1 / (2π f C)` in ohm.
pub fn capacitive_reactance(frequency: f64, capacitance: f64) -> Result<f64> {
    if !(frequency.is_finite() && frequency > 0.0) {
        return Err(Error::domain(format!(
            "frequency must be positive, got {frequency}"
        )));
    }
    if !(capacitance.is_finite() && capacitance > 0.0) {
        return Err(Error::domain(format!(
            "capacitance must be positive, got {capacitance}"
        )));
    }
    Ok(1.0 / (2.0 * PI * frequency * capacitance))
}

/// Impedance `1 / (jωC) = −j·XC` of an ideal capacitor.
pub fn capacitor_impedance(frequency: f64, capacitance: f64) -> Result<Complex64> {
    Ok(Complex64::new(
        0.0,
        -capacitive_reactance(frequency, capacitance)?,
    ))
}

/// Sign attached to the capacitive terms of the mesh matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SignConvention {
    /// `−j·XC` everywhere, the impedance of a real capacitor.
    #[default]
    Physical,
    /// `+j·XC` on the diagonal and `−j·XC` off it, as in the original
    /// MATLAB script. The resulting matrix is the complex conjugate of the
    /// physical one, so magnitudes agree and phases flip sign.
    PaperScript,
}

impl SignConvention {
    pub fn as_str(self) -> &'static str {
        match self {
            SignConvention::Physical => "physical",
            SignConvention::PaperScript => "paper_script",
        }
    }
}

impl FromStr for SignConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "physical" => Ok(SignConvention::Physical),
            "paper_script" => Ok(SignConvention::PaperScript),
            other => Err(Error::domain(format!(
                "unknown convention '{other}' (expected physical or paper_script)"
            ))),
        }
    }
}

/// Source and load resistances around the stack.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Termination {
    /// Series resistance of the driving source; 0 for an ideal source.
    pub source_resistance: f64,
    /// Shunt load across the output; `None` for an open output.
    pub load_resistance: Option<f64>,
}

impl Termination {
    pub const IDEAL: Self = Self {
        source_resistance: 0.0,
        load_resistance: None,
    };

    /// Cathode-follower drive (1 kΩ) into a phase-splitter load (1 MΩ).
    pub const AMPLIFIER: Self = Self {
        source_resistance: 1e3,
        load_resistance: Some(1e6),
    };

    pub fn validate(&self) -> Result<()> {
        if !(self.source_resistance.is_finite() && self.source_resistance >= 0.0) {
            return Err(Error::domain(
                "source resistance must be finite and non-negative",
            ));
        }
        if let Some(load) = self.load_resistance {
            if !(load.is_finite() && load > 0.0) {
                return Err(Error::domain("load resistance must be positive and finite"));
            }
        }
        Ok(())
    }
}

/// Mesh impedance matrix and excitation at one frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct MeshSystem {
    pub z: ComplexMatrix,
    pub v: ComplexVector,
    pub frequency: f64,
}

impl MeshSystem {
    /// Adds a series source resistance; the source sits in loop 1 only.
    pub fn with_source_resistance(mut self, resistance: f64) -> Self {
        self.z[(0, 0)] += Complex64::new(resistance, 0.0);
        self
    }

    pub fn solve(&self) -> Result<LoopCurrents> {
        let i = solve_elimination(&self.z, &self.v).map_err(|source| Error::SolveAt {
            frequency: self.frequency,
            source,
        })?;
        Ok(LoopCurrents::from_vector(&i))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoopCurrents {
    pub i1: Complex64,
    pub i2: Complex64,
    pub i3: Complex64,
}

impl LoopCurrents {
    pub fn from_vector(v: &ComplexVector) -> Self {
        Self {
            i1: v[0],
            i2: v[1],
            i3: v[2],
        }
    }

    pub fn to_vector(self) -> ComplexVector {
        ComplexVector::new(vec![self.i1, self.i2, self.i3]).expect("finite currents")
    }
}

pub fn build_mesh_system(
    components: &ToneStackComponents,
    controls: &ControlSettings,
    frequency: f64,
    vin: f64,
    convention: SignConvention,
) -> Result<MeshSystem> {
    components.validate()?;
    if !(vin.is_finite() && vin != 0.0) {
        return Err(Error::domain(format!(
            "vin must be finite and nonzero, got {vin}"
        )));
    }
    let xc1 = capacitive_reactance(frequency, components.c1)?;
    let xc2 = capacitive_reactance(frequency, components.c2)?;
    let xc3 = capacitive_reactance(frequency, components.c3)?;
    let w = wiper_resistances(components, controls);
    let r1 = components.r1;

    let (diag, off) = match convention {
        SignConvention::Physical => (-1.0, 1.0),
        SignConvention::PaperScript => (1.0, -1.0),
    };
    let cplx = Complex64::new;
    let z12 = cplx(-r1, 0.0);
    let z13 = cplx(0.0, off * xc3);
    let z23 = cplx(0.0, off * xc2);

    let rows = [
        [cplx(r1 + w.rm2, diag * xc3), z12, z13],
        [z12, cplx(w.rt1 + w.rt2 + r1, diag * (xc2 + xc1)), z23],
        [z13, z23, cplx(w.rb1 + w.rm1, diag * (xc2 + xc3))],
    ];
    if rows.iter().flatten().any(|z| !z.is_finite()) {
        return Err(Error::NonFinite(format!(
            "impedance overflow at {frequency} Hz"
        )));
    }
    let z = ComplexMatrix::from_rows(rows)?;
    let v = ComplexVector::new(vec![cplx(vin, 0.0), cplx(0.0, 0.0), cplx(0.0, 0.0)])?;
    Ok(MeshSystem { z, v, frequency })
}
