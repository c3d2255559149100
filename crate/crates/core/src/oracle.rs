//! Independent checks on the mesh model.
//!
//! [`nodal_response`] solves the same circuit by node voltages (KCL) with its
//! own netlist and matrix assembly, [`hf_limit`] and [`dc_limit`] give the
//! analytic asymptotes, and [`script_replica`] re-implements the original
//! MATLAB script step by step.
//!
//! Netlist used by the nodal model (node names in brackets):
//!
//! ```text
//! [in] ──R1── [a] ──C2── [b] ──rb1── [mb] ──rm1── [w] ──rm2── [gnd]
//!   │          └───────────C3──────────────────────┘
//!   └──C1── [top] ──rt1── [out] ──rt2── [b]
//! ```
//!
//! The mid pot is split at `w`: the upper leg `rm1` sits in series with the
//! bass rheostat and `C3` lands on the tap, which is the arrangement the
//! three mesh equations describe.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::circuit::{ControlSettings, Termination, ToneStackComponents};
use crate::error::{Error, Result};
use crate::linalg::{solve_elimination, ComplexMatrix, ComplexVector};
use crate::response::{log_grid, AnalysisOptions, ResponseCurve, ResponsePoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Node {
    Source,
    In,
    A,
    Top,
    Out,
    B,
    Mb,
    W,
    Ground,
}

const NODE_COUNT: usize = 9;

#[derive(Debug, Clone, Copy)]
enum Element {
    Resistor(f64),
    Capacitor(f64),
}

#[derive(Debug, Clone, Copy)]
struct Branch {
    from: Node,
    to: Node,
    element: Element,
}

fn netlist(
    components: &ToneStackComponents,
    controls: &ControlSettings,
    termination: &Termination,
) -> Vec<Branch> {
    use Element::*;
    use Node::*;
    let br = |from, to, element| Branch { from, to, element };
    let (t, m, b) = (controls.t(), controls.m(), controls.b());
    let mut list = vec![
        br(Source, In, Resistor(termination.source_resistance)),
        br(In, A, Resistor(components.r1)),
        br(In, Top, Capacitor(components.c1)),
        br(Top, Out, Resistor(components.rt * t)),
        br(Out, B, Resistor(components.rt * (1.0 - t))),
        br(A, B, Capacitor(components.c2)),
        br(A, W, Capacitor(components.c3)),
        br(B, Mb, Resistor(components.rb * b)),
        br(Mb, W, Resistor(components.rm * m)),
        br(W, Ground, Resistor(components.rm * (1.0 - m))),
    ];
    if let Some(load) = termination.load_resistance {
        list.push(br(Out, Ground, Resistor(load)));
    }
    list
}

/// Union-find over nodes joined by zero-impedance branches.
struct Merge {
    parent: [usize; NODE_COUNT],
}

impl Merge {
    fn new() -> Self {
        Self {
            parent: std::array::from_fn(|i| i),
        }
    }

    fn find(&mut self, n: usize) -> usize {
        let mut root = n;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        self.parent[n] = root;
        root
    }

    fn join(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Node-voltage equations of the tone stack at one frequency.
///
/// Unknowns are the voltages of the non-fixed merged nodes; the source node is
/// held at `vin` and ground at 0, and their contributions are moved to the
/// right-hand side as injected currents.
#[derive(Debug, Clone, PartialEq)]
pub struct NodalSystem {
    pub node_count: usize,
    pub admittance: ComplexMatrix,
    pub sources: ComplexVector,
    output: Output,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Output {
    Fixed(Complex64),
    Unknown(usize),
}

impl NodalSystem {
    pub fn assemble(
        components: &ToneStackComponents,
        controls: &ControlSettings,
        frequency: Option<f64>,
        vin: f64,
        termination: &Termination,
    ) -> Result<Self> {
        components.validate()?;
        termination.validate()?;
        if let Some(f) = frequency {
            if !(f.is_finite() && f > 0.0) {
                return Err(Error::domain(format!(
                    "frequency must be positive, got {f}"
                )));
            }
        }

        let branches = netlist(components, controls, termination);
        let mut merge = Merge::new();
        let mut admittances = Vec::new();
        for br in &branches {
            let y = match (br.element, frequency) {
                (Element::Resistor(0.0), _) => None,
                (Element::Resistor(r), _) => Some(Complex64::new(1.0 / r, 0.0)),
                // No frequency: capacitors are shorts.
                (Element::Capacitor(_), None) => None,
                (Element::Capacitor(c), Some(f)) => Some(Complex64::new(0.0, 2.0 * PI * f * c)),
            };
            match y {
                Some(y) => admittances.push((br.from as usize, br.to as usize, y)),
                None => merge.join(br.from as usize, br.to as usize),
            }
        }

        let source = merge.find(Node::Source as usize);
        let ground = merge.find(Node::Ground as usize);
        if source == ground {
            return Err(Error::domain("source is shorted to ground"));
        }
        let fixed = |n: usize| -> Option<Complex64> {
            if n == source {
                Some(Complex64::new(vin, 0.0))
            } else if n == ground {
                Some(Complex64::new(0.0, 0.0))
            } else {
                None
            }
        };

        let mut index = [usize::MAX; NODE_COUNT];
        let mut count = 0;
        for n in 0..NODE_COUNT {
            let root = merge.find(n);
            if root == n && fixed(root).is_none() {
                index[root] = count;
                count += 1;
            }
        }

        let mut y_mat = ComplexMatrix::zeros(count);
        let mut rhs = vec![Complex64::new(0.0, 0.0); count];
        for &(from, to, y) in &admittances {
            let (p, q) = (merge.find(from), merge.find(to));
            if p == q {
                continue;
            }
            for (a, b) in [(p, q), (q, p)] {
                if fixed(a).is_some() {
                    continue;
                }
                let ia = index[a];
                y_mat[(ia, ia)] += y;
                match fixed(b) {
                    Some(vb) => rhs[ia] += y * vb,
                    None => y_mat[(ia, index[b])] -= y,
                }
            }
        }

        let out_root = merge.find(Node::Out as usize);
        let output = match fixed(out_root) {
            Some(v) => Output::Fixed(v),
            None => Output::Unknown(index[out_root]),
        };
        Ok(Self {
            node_count: count,
            admittance: y_mat,
            sources: ComplexVector::new(rhs)?,
            output,
        })
    }

    /// Solves for the node voltages and returns the output node voltage.
    pub fn output_voltage(&self) -> Result<Complex64> {
        match self.output {
            Output::Fixed(v) => Ok(v),
            Output::Unknown(i) => {
                let v = solve_elimination(&self.admittance, &self.sources)?;
                Ok(v[i])
            }
        }
    }
}

/// Output voltage of the unterminated stack by nodal analysis.
pub fn nodal_response(
    components: &ToneStackComponents,
    controls: &ControlSettings,
    frequency: f64,
    vin: f64,
) -> Result<Complex64> {
    nodal_response_terminated(components, controls, frequency, vin, &Termination::IDEAL)
}

/// Output voltage by nodal analysis, with source and load resistors in the
/// netlist.
pub fn nodal_response_terminated(
    components: &ToneStackComponents,
    controls: &ControlSettings,
    frequency: f64,
    vin: f64,
    termination: &Termination,
) -> Result<Complex64> {
    if !vin.is_finite() {
        return Err(Error::domain("vin must be finite"));
    }
    NodalSystem::assemble(components, controls, Some(frequency), vin, termination)?.output_voltage()
}

/// Output magnitude with every capacitor shorted: the high-frequency limit.
pub fn hf_limit(
    components: &ToneStackComponents,
    controls: &ControlSettings,
    vin: f64,
) -> Result<f64> {
    let system = NodalSystem::assemble(components, controls, None, vin, &Termination::IDEAL)?;
    Ok(system.output_voltage()?.norm())
}

/// Output at DC. Every path from input to output crosses a capacitor.
pub fn dc_limit() -> f64 {
    0.0
}

/// Step-by-step port of the original script: `+j·XC` diagonals, `−j·XC`
/// couplings, branch magnitudes summed, 50 points from 1 Hz to 100 kHz.
pub fn script_replica(
    components: &ToneStackComponents,
    controls: &ControlSettings,
    vin: f64,
) -> Result<ResponseCurve> {
    components.validate()?;
    let ToneStackComponents {
        r1,
        rt,
        rm,
        rb,
        c1,
        c2,
        c3,
    } = *components;
    let (t, m, b) = (controls.t(), controls.m(), controls.b());

    let rt1 = rt * t;
    let rt2 = rt * (1.0 - t);
    let rm1 = rm * m;
    let rm2 = rm * (1.0 - m);
    let rb1 = rb * b;

    let grid = log_grid(0.0, 5.0, 50)?;
    let mut points = Vec::with_capacity(grid.len());
    for &f in grid.points() {
        let xc1 = 1.0 / (2.0 * PI * f * c1);
        let xc2 = 1.0 / (2.0 * PI * f * c2);
        let xc3 = 1.0 / (2.0 * PI * f * c3);

        let z1 = Complex64::new(r1 + rm2, xc3);
        let z2 = Complex64::new(-r1, 0.0);
        let z3 = Complex64::new(0.0, -xc3);
        let z4 = Complex64::new(-r1, 0.0);
        let z5 = Complex64::new(rt1 + rt2 + r1, xc2 + xc1);
        let z6 = Complex64::new(0.0, -xc2);
        let z7 = Complex64::new(0.0, -xc3);
        let z8 = Complex64::new(0.0, -xc2);
        let z9 = Complex64::new(rb1 + rm1, xc2 + xc3);

        let y = ComplexMatrix::from_rows([[z1, z2, z3], [z4, z5, z6], [z7, z8, z9]])?;
        let v = ComplexVector::new(vec![Complex64::new(vin, 0.0), 0.0.into(), 0.0.into()])?;
        let i = solve_elimination(&y, &v).map_err(|source| Error::SolveAt {
            frequency: f,
            source,
        })?;

        let vrm2 = rm2 * i[0].norm();
        let vrt2 = rt2 * i[1].norm();
        let vrb_rm1 = (rb1 + rm1) * i[2].norm();
        let total = vrm2 + vrt2 + vrb_rm1;
        points.push(ResponsePoint {
            frequency: f,
            vout: Complex64::new(total, 0.0),
            magnitude_db: 20.0 * (total / vin).log10(),
            phase_deg: 0.0,
        });
    }

    Ok(ResponseCurve {
        controls: *controls,
        vin,
        options: AnalysisOptions::SCRIPT_COMPAT,
        points,
    })
}
