//! Shared inputs for the solver benchmarks.

use tonestack_core::{
    build_mesh_system, log_grid, ControlSettings, FrequencyGrid, MeshSystem, SignConvention,
    ToneStackComponents,
};

pub const COMPONENTS: ToneStackComponents = ToneStackComponents::BASSMAN_5F6A;

/// The 50-point, 1 Hz to 100 kHz grid used throughout.
pub fn default_grid() -> FrequencyGrid {
    log_grid(0.0, 5.0, 50).expect("valid grid")
}

/// Every control setting on a `steps`-per-axis lattice over [0, 1]³.
pub fn control_lattice(steps: usize) -> Vec<ControlSettings> {
    let axis: Vec<f64> = (0..steps).map(|k| k as f64 / (steps - 1) as f64).collect();
    let mut out = Vec::with_capacity(steps.pow(3));
    for &t in &axis {
        for &m in &axis {
            for &b in &axis {
                out.push(ControlSettings::new(t, m, b).expect("lattice lies in [0, 1]"));
            }
        }
    }
    out
}

/// Mesh system of the stock stack at its default setting.
pub fn default_system(frequency: f64) -> MeshSystem {
    build_mesh_system(
        &COMPONENTS,
        &ControlSettings::DEFAULT,
        frequency,
        1.0,
        SignConvention::Physical,
    )
    .expect("stock values are valid")
}
