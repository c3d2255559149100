//! Frequency-domain model of the Fender Bassman 5F6-A tone stack.
//!
//! The stack is solved by three-loop mesh analysis with complex impedances
//! ([`circuit`], [`linalg`]), swept over frequency and control settings
//! ([`response`]), and cross-checked by an independent nodal model
//! ([`oracle`]). [`netlist`] reads and writes the text configuration format.
//!
//! ```
//! use tonestack_core::{frequency_response, log_grid, AnalysisOptions, ControlSettings, ToneStackComponents};
//!
//! let grid = log_grid(0.0, 5.0, 50).unwrap();
//! let curve = frequency_response(
//!     &ToneStackComponents::BASSMAN_5F6A,
//!     &ControlSettings::new(0.5, 0.5, 0.5).unwrap(),
//!     &grid,
//!     1.0,
//!     &AnalysisOptions::default(),
//! )
//! .unwrap();
//! assert_eq!(curve.points.len(), 50);
//! ```

pub mod circuit;
pub mod error;
pub mod linalg;
pub mod netlist;
pub mod oracle;
pub mod response;

pub use circuit::{
    build_mesh_system, capacitive_reactance, capacitor_impedance, wiper_resistances, BassTaper,
    Control, ControlSettings, LoopCurrents, MeshSystem, SignConvention, Termination,
    ToneStackComponents, WiperResistances,
};
pub use error::{Error, Result, SolveError};
pub use linalg::{residual, solve_cramer3, solve_elimination, ComplexMatrix, ComplexVector};
pub use netlist::{ConfigDocument, ParseError};
pub use response::{
    frequency_response, log_grid, output_voltage, parameter_sweep, AnalysisOptions, FrequencyGrid,
    OutputMode, ResponseCurve, ResponsePoint,
};

pub use num_complex::Complex64;
