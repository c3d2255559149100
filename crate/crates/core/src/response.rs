//! Frequency sweeps and control sweeps.

use std::str::FromStr;

use num_complex::Complex64;

use crate::circuit::{
    build_mesh_system, wiper_resistances, BassTaper, Control, ControlSettings, LoopCurrents,
    SignConvention, Termination, ToneStackComponents, WiperResistances,
};
use crate::error::{Error, Result};
use crate::linalg::{solve_elimination, ComplexVector};

/// Strictly increasing list of positive frequencies in hertz.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyGrid {
    points: Vec<f64>,
}

impl FrequencyGrid {
    pub fn from_points(points: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::domain("frequency grid is empty"));
        }
        if points.iter().any(|f| !(f.is_finite() && *f > 0.0)) {
            return Err(Error::domain(
                "grid frequencies must be positive and finite",
            ));
        }
        if points.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::domain(
                "grid frequencies must be strictly increasing",
            ));
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// `n` geometrically spaced points from `10^exp_min` to `10^exp_max`.
pub fn log_grid(exp_min: f64, exp_max: f64, n: usize) -> Result<FrequencyGrid> {
    if !(exp_min.is_finite() && exp_max.is_finite() && exp_min < exp_max) {
        return Err(Error::domain(format!(
            "log grid needs finite exp_min < exp_max, got ({exp_min}, {exp_max})"
        )));
    }
    if n < 2 {
        return Err(Error::domain(format!(
            "log grid needs at least 2 points, got {n}"
        )));
    }
    let step = (exp_max - exp_min) / (n - 1) as f64;
    let points = (0..n)
        .map(|k| {
            let e = if k == n - 1 {
                exp_max
            } else {
                exp_min + k as f64 * step
            };
            10f64.powf(e)
        })
        .collect();
    FrequencyGrid::from_points(points)
}

/// How branch voltages are combined into the output voltage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputMode {
    /// Phasor sum of the branch voltages.
    #[default]
    ComplexSum,
    /// Sum of branch-voltage magnitudes, as the original script does. Phase
    /// information is discarded.
    MagnitudeSum,
}

impl OutputMode {
    pub fn as_str(self) -> &'static str {
        match self {
            OutputMode::ComplexSum => "complex_sum",
            OutputMode::MagnitudeSum => "magnitude_sum",
        }
    }
}

impl FromStr for OutputMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "complex_sum" => Ok(OutputMode::ComplexSum),
            "magnitude_sum" => Ok(OutputMode::MagnitudeSum),
            other => Err(Error::domain(format!(
                "unknown output mode '{other}' (expected complex_sum or magnitude_sum)"
            ))),
        }
    }
}

/// Modelling switches applied to every point of a response.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AnalysisOptions {
    pub convention: SignConvention,
    pub mode: OutputMode,
    pub taper: BassTaper,
    pub termination: Termination,
}

impl AnalysisOptions {
    /// Sign convention and output combination of the original script.
    pub const SCRIPT_COMPAT: Self = Self {
        convention: SignConvention::PaperScript,
        mode: OutputMode::MagnitudeSum,
        taper: BassTaper::Linear,
        termination: Termination::IDEAL,
    };
}

/// Voltage from the treble wiper to ground.
pub fn output_voltage(
    currents: &LoopCurrents,
    wipers: &WiperResistances,
    mode: OutputMode,
) -> Complex64 {
    let lower = wipers.rb1 + wipers.rm1;
    match mode {
        OutputMode::ComplexSum => {
            wipers.rm2 * currents.i1 + wipers.rt2 * currents.i2 + lower * currents.i3
        }
        OutputMode::MagnitudeSum => Complex64::new(
            wipers.rm2 * currents.i1.norm()
                + wipers.rt2 * currents.i2.norm()
                + lower * currents.i3.norm(),
            0.0,
        ),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResponsePoint {
    pub frequency: f64,
    pub vout: Complex64,
    pub magnitude_db: f64,
    /// Phase in degrees, in `(−180, 180]`. Always 0 for
    /// [`OutputMode::MagnitudeSum`].
    pub phase_deg: f64,
}

impl ResponsePoint {
    pub fn new(frequency: f64, vout: Complex64, vin: f64) -> Self {
        Self {
            frequency,
            vout,
            magnitude_db: 20.0 * (vout.norm() / vin.abs()).log10(),
            phase_deg: phase_degrees(vout),
        }
    }
}

/// Argument of `z` in degrees, mapped into `(−180, 180]`.
pub fn phase_degrees(z: Complex64) -> f64 {
    let deg = z.arg().to_degrees();
    if deg <= -180.0 {
        deg + 360.0
    } else {
        deg
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResponseCurve {
    pub controls: ControlSettings,
    pub vin: f64,
    pub options: AnalysisOptions,
    pub points: Vec<ResponsePoint>,
}

impl ResponseCurve {
    /// Whether `phase_deg` carries information.
    pub fn has_phase(&self) -> bool {
        self.options.mode == OutputMode::ComplexSum
    }

    pub fn magnitudes_db(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.magnitude_db)
    }
}

/// Thevenin impedance seen from the output with the source shorted.
///
/// The branches between output and ground (`rt2`, `rb1 + rm1`, `rm2`) each lie
/// in exactly one loop, so a load current `iL` enters the mesh equations as
/// `Z·I = V + c·iL` with `c = (rm2, rt2, rb1 + rm1)`, and the output voltage
/// becomes `cᵀI − Σc·iL`. Hence `Zth = Σc − cᵀ Z⁻¹ c`.
fn output_impedance(z: &crate::linalg::ComplexMatrix, w: &WiperResistances) -> Result<Complex64> {
    let c = [w.rm2, w.rt2, w.rb1 + w.rm1].map(|r| Complex64::new(r, 0.0));
    let y = solve_elimination(z, &ComplexVector::new(c.to_vec())?)?;
    let quad: Complex64 = c.iter().zip(y.as_slice()).map(|(a, b)| a * b).sum();
    Ok(c.iter().sum::<Complex64>() - quad)
}

/// Evaluates a single frequency.
pub fn response_point(
    components: &ToneStackComponents,
    controls: &ControlSettings,
    frequency: f64,
    vin: f64,
    options: &AnalysisOptions,
) -> Result<ResponsePoint> {
    options.termination.validate()?;
    let effective = options.taper.map_controls(controls);
    let mut system = build_mesh_system(components, &effective, frequency, vin, options.convention)?;
    if options.termination.source_resistance > 0.0 {
        system = system.with_source_resistance(options.termination.source_resistance);
    }
    let currents = system.solve()?;
    let wipers = wiper_resistances(components, &effective);
    let mut vout = output_voltage(&currents, &wipers, options.mode);

    if let Some(load) = options.termination.load_resistance {
        let zth = output_impedance(&system.z, &wipers).map_err(|e| match e {
            Error::Solve(source) => Error::SolveAt { frequency, source },
            other => other,
        })?;
        let divider = load / (load + zth);
        vout = match options.mode {
            OutputMode::ComplexSum => vout * divider,
            OutputMode::MagnitudeSum => vout * divider.norm(),
        };
    }
    Ok(ResponsePoint::new(frequency, vout, vin))
}

pub fn frequency_response(
    components: &ToneStackComponents,
    controls: &ControlSettings,
    grid: &FrequencyGrid,
    vin: f64,
    options: &AnalysisOptions,
) -> Result<ResponseCurve> {
    let points = grid
        .points()
        .iter()
        .map(|&f| response_point(components, controls, f, vin, options))
        .collect::<Result<Vec<_>>>()?;
    Ok(ResponseCurve {
        controls: *controls,
        vin,
        options: *options,
        points,
    })
}

/// Control values `0, step, 2·step, …, 1`; the last value is clamped to 1.
pub fn sweep_values(step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step <= 1.0) {
        return Err(Error::domain(format!(
            "sweep step must lie in (0, 1], got {step}"
        )));
    }
    let count = (1.0 / step + 1e-9).floor() as usize;
    let mut values: Vec<f64> = (0..=count).map(|k| k as f64 * step).collect();
    let last = values.last_mut().expect("at least one value");
    if *last >= 1.0 - 1e-9 {
        *last = 1.0;
    } else {
        values.push(1.0);
    }
    Ok(values)
}

/// One response curve per value of `which`, other controls held at `fixed`.
pub fn parameter_sweep(
    components: &ToneStackComponents,
    which: Control,
    fixed: &ControlSettings,
    step: f64,
    grid: &FrequencyGrid,
    vin: f64,
    options: &AnalysisOptions,
) -> Result<Vec<ResponseCurve>> {
    sweep_values(step)?
        .into_iter()
        .map(|v| frequency_response(components, &fixed.with(which, v)?, grid, vin, options))
        .collect()
}

/// Depth of the deepest mid scoop of `curve` whose minimum lies in
/// `[band.0, band.1]`.
///
/// A scoop is an interior local minimum; its depth is the smaller of the
/// rises to the highest point below and above it. Returns `None` when no
/// interior local minimum falls in the band.
pub fn mid_scoop_depth(curve: &ResponseCurve, band: (f64, f64)) -> Option<f64> {
    let db: Vec<f64> = curve.magnitudes_db().collect();
    let n = db.len();
    (1..n.saturating_sub(1))
        .filter(|&i| {
            let f = curve.points[i].frequency;
            f >= band.0 && f <= band.1 && db[i] <= db[i - 1] && db[i] <= db[i + 1]
        })
        .map(|i| {
            let left = db[..i].iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let right = db[i + 1..]
                .iter()
                .copied()
                .fold(f64::NEG_INFINITY, f64::max);
            (left - db[i]).min(right - db[i])
        })
        .fold(None, |best: Option<f64>, d| {
            Some(best.map_or(d, |b| b.max(d)))
        })
}

#[cfg(test)]
mod tests {
    use super::*;

    const DEFAULTS: ToneStackComponents = ToneStackComponents::BASSMAN_5F6A;

    fn controls(t: f64, m: f64, b: f64) -> ControlSettings {
        ControlSettings::new(t, m, b).unwrap()
    }

    #[test]
    fn log_grid_examples() {
        let g = log_grid(0.0, 5.0, 50).unwrap();
        assert_eq!(g.len(), 50);
        assert_eq!(g.points()[0], 1.0);
        assert_eq!(g.points()[49], 100_000.0);
        assert_eq!(log_grid(0.0, 1.0, 2).unwrap().points(), &[1.0, 10.0]);
        assert_eq!(log_grid(0.0, 2.0, 3).unwrap().points(), &[1.0, 10.0, 100.0]);

        let ratio = 10f64.powf(5.0 / 49.0);
        for w in g.points().windows(2) {
            assert!((w[1] / w[0] - ratio).abs() < 1e-12);
        }
    }

    #[test]
    fn log_grid_rejects_bad_input() {
        assert!(log_grid(1.0, 1.0, 10).is_err());
        assert!(log_grid(2.0, 1.0, 10).is_err());
        assert!(log_grid(0.0, 1.0, 1).is_err());
        assert!(FrequencyGrid::from_points(vec![1.0, 1.0]).is_err());
        assert!(FrequencyGrid::from_points(vec![0.0, 1.0]).is_err());
    }

    #[test]
    fn output_voltage_single_terms() {
        let w = WiperResistances {
            rt1: 0.0,
            rt2: 220_000.0,
            rm1: 0.0,
            rm2: 25_000.0,
            rb1: 1e6,
        };
        let zero = Complex64::new(0.0, 0.0);
        let none = LoopCurrents {
            i1: zero,
            i2: zero,
            i3: zero,
        };
        assert_eq!(output_voltage(&none, &w, OutputMode::ComplexSum), zero);
        assert_eq!(output_voltage(&none, &w, OutputMode::MagnitudeSum), zero);

        let unit = LoopCurrents {
            i2: Complex64::new(1.0, 0.0),
            ..none
        };
        for mode in [OutputMode::ComplexSum, OutputMode::MagnitudeSum] {
            assert_eq!(
                output_voltage(&unit, &w, mode),
                Complex64::new(220_000.0, 0.0)
            );
        }
    }

    #[test]
    fn magnitude_sum_bounds_complex_sum() {
        let c = ControlSettings::DEFAULT;
        let s = build_mesh_system(&DEFAULTS, &c, 1000.0, 5.0, SignConvention::Physical).unwrap();
        let i = s.solve().unwrap();
        let w = wiper_resistances(&DEFAULTS, &c);
        let mag = output_voltage(&i, &w, OutputMode::MagnitudeSum).re;
        let cplx = output_voltage(&i, &w, OutputMode::ComplexSum).norm();
        assert!(mag >= cplx);
    }

    #[test]
    fn phase_range() {
        assert_eq!(phase_degrees(Complex64::new(-1.0, -0.0)), 180.0);
        assert_eq!(phase_degrees(Complex64::new(-1.0, 0.0)), 180.0);
        assert_eq!(phase_degrees(Complex64::new(0.0, -1.0)), -90.0);
    }

    #[test]
    fn magnitude_sum_has_zero_phase() {
        let g = log_grid(0.0, 5.0, 20).unwrap();
        let curve = frequency_response(
            &DEFAULTS,
            &ControlSettings::DEFAULT,
            &g,
            5.0,
            &AnalysisOptions::SCRIPT_COMPAT,
        )
        .unwrap();
        assert!(!curve.has_phase());
        assert!(curve
            .points
            .iter()
            .all(|p| p.phase_deg == 0.0 && p.vout.im == 0.0));
    }

    #[test]
    fn db_is_independent_of_vin() {
        let g = log_grid(0.0, 5.0, 50).unwrap();
        for opts in [AnalysisOptions::default(), AnalysisOptions::SCRIPT_COMPAT] {
            let base =
                frequency_response(&DEFAULTS, &controls(0.3, 0.6, 0.2), &g, 1.0, &opts).unwrap();
            for vin in [5.0, 10.0] {
                let other = frequency_response(&DEFAULTS, &controls(0.3, 0.6, 0.2), &g, vin, &opts)
                    .unwrap();
                for (a, b) in base.points.iter().zip(&other.points) {
                    assert!((a.magnitude_db - b.magnitude_db).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn conventions_agree_in_magnitude_and_flip_phase() {
        let g = log_grid(0.0, 5.0, 30).unwrap();
        let phys = frequency_response(
            &DEFAULTS,
            &controls(0.5, 0.5, 0.5),
            &g,
            1.0,
            &AnalysisOptions::default(),
        )
        .unwrap();
        let opts = AnalysisOptions {
            convention: SignConvention::PaperScript,
            ..Default::default()
        };
        let script =
            frequency_response(&DEFAULTS, &controls(0.5, 0.5, 0.5), &g, 1.0, &opts).unwrap();
        for (a, b) in phys.points.iter().zip(&script.points) {
            assert!((a.magnitude_db - b.magnitude_db).abs() < 1e-9);
            assert!((a.phase_deg + b.phase_deg).abs() < 1e-9);
        }
    }

    #[test]
    fn passive_under_physical_complex_sum() {
        let g = log_grid(-2.0, 7.0, 90).unwrap();
        for &t in &[0.0, 0.5, 1.0] {
            for &m in &[0.0, 0.5, 1.0] {
                for &b in &[0.0, 0.5, 1.0] {
                    let curve = frequency_response(
                        &DEFAULTS,
                        &controls(t, m, b),
                        &g,
                        1.0,
                        &AnalysisOptions::default(),
                    )
                    .unwrap();
                    assert!(curve.points.iter().all(|p| p.vout.norm() <= 1.0 + 1e-12));
                }
            }
        }
    }

    #[test]
    fn low_frequency_rolloff_is_monotone() {
        let g = log_grid(-2.0, 1.0, 40).unwrap();
        for &t in &[0.0, 0.5, 1.0] {
            for &m in &[0.0, 0.5, 1.0] {
                for &b in &[0.0, 0.5, 1.0] {
                    let curve = frequency_response(
                        &DEFAULTS,
                        &controls(t, m, b),
                        &g,
                        1.0,
                        &AnalysisOptions::default(),
                    )
                    .unwrap();
                    let db: Vec<f64> = curve.magnitudes_db().collect();
                    assert!(db.windows(2).all(|w| w[1] > w[0]), "t={t} m={m} b={b}");
                }
            }
        }
    }

    #[test]
    fn sweep_values_counts() {
        let v = sweep_values(0.1).unwrap();
        assert_eq!(v.len(), 11);
        assert_eq!(v[0], 0.0);
        assert_eq!(v[10], 1.0);
        assert_eq!(sweep_values(1.0).unwrap(), vec![0.0, 1.0]);
        assert_eq!(sweep_values(0.3).unwrap().len(), 5);
        assert_eq!(*sweep_values(0.3).unwrap().last().unwrap(), 1.0);
        assert!(sweep_values(0.0).is_err());
        assert!(sweep_values(1.5).is_err());
    }

    #[test]
    fn parameter_sweep_holds_other_controls() {
        let g = log_grid(0.0, 5.0, 10).unwrap();
        let fixed = controls(0.2, 0.4, 0.6);
        let curves = parameter_sweep(
            &DEFAULTS,
            Control::Mid,
            &fixed,
            0.25,
            &g,
            1.0,
            &AnalysisOptions::default(),
        )
        .unwrap();
        assert_eq!(curves.len(), 5);
        for (k, c) in curves.iter().enumerate() {
            assert_eq!(c.controls.t(), 0.2);
            assert_eq!(c.controls.b(), 0.6);
            assert_eq!(c.controls.m(), k as f64 * 0.25);
        }
        let again = parameter_sweep(
            &DEFAULTS,
            Control::Mid,
            &fixed,
            0.25,
            &g,
            1.0,
            &AnalysisOptions::default(),
        )
        .unwrap();
        assert_eq!(curves, again);
    }

    #[test]
    fn scoop_detection_on_synthetic_curve() {
        let db = [0.0, -1.0, -5.0, -3.0, -0.5, -2.0];
        let points = db
            .iter()
            .enumerate()
            .map(|(i, &d)| ResponsePoint {
                frequency: 10f64.powi(i as i32),
                vout: Complex64::new(10f64.powf(d / 20.0), 0.0),
                magnitude_db: d,
                phase_deg: 0.0,
            })
            .collect();
        let curve = ResponseCurve {
            controls: ControlSettings::DEFAULT,
            vin: 1.0,
            options: AnalysisOptions::default(),
            points,
        };
        assert_eq!(mid_scoop_depth(&curve, (1.0, 1e5)), Some(4.5));
        assert_eq!(mid_scoop_depth(&curve, (1e3, 1e4)), None);
    }
}
