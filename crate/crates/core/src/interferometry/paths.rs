//! Four-path decomposition of a pair crossing two unbalanced Mach-Zehnder interferometers.
//!
//! Both beam splitters are symmetric 50/50 with transmission 1/√2 and reflection i/√2.
//! Input port 0 transmits into the short arm S and reflects into the long arm L. At the
//! second splitter the port fed by S-reflection and L-transmission is called H, the
//! other V. Per photon this gives
//!
//! ```text
//!        S        L
//!   H   i/2    (i/2)·e^{iφ}
//!   V   1/2   −(1/2)·e^{iφ}
//! ```

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::FransonSetup;
use crate::biphoton::{Domain, JointAmplitude};
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Port {
    H,
    V,
}

/// Detector pair for photons 1 and 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct PortPair(pub Port, pub Port);

impl PortPair {
    pub const HH: PortPair = PortPair(Port::H, Port::H);
    pub const HV: PortPair = PortPair(Port::H, Port::V);
    pub const VH: PortPair = PortPair(Port::V, Port::H);
    pub const VV: PortPair = PortPair(Port::V, Port::V);
    pub const ALL: [PortPair; 4] = [Self::HH, Self::HV, Self::VH, Self::VV];
}

impl From<PortPair> for String {
    fn from(p: PortPair) -> String {
        let c = |p: Port| if p == Port::H { 'H' } else { 'V' };
        [c(p.0), c(p.1)].iter().collect()
    }
}

impl TryFrom<String> for PortPair {
    type Error = String;
    fn try_from(s: String) -> std::result::Result<Self, String> {
        let port = |c: char| match c {
            'H' | 'h' => Ok(Port::H),
            'V' | 'v' => Ok(Port::V),
            _ => Err(format!("port pair `{s}` must be two of H/V, e.g. \"HH\"")),
        };
        let chars: Vec<char> = s.chars().collect();
        if chars.len() != 2 {
            return Err(format!("port pair `{s}` must be two of H/V, e.g. \"HH\""));
        }
        Ok(PortPair(port(chars[0])?, port(chars[1])?))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Arm {
    Short,
    Long,
}

/// (photon 1 arm, photon 2 arm) in the order SS, SL, LS, LL.
pub const PATHS: [(Arm, Arm); 4] = [
    (Arm::Short, Arm::Short),
    (Arm::Short, Arm::Long),
    (Arm::Long, Arm::Short),
    (Arm::Long, Arm::Long),
];

/// Single-photon amplitude to leave through `port` having taken `arm`.
pub fn port_amplitude(port: Port, arm: Arm, phase: f64) -> Complex64 {
    let long = Complex64::from_polar(0.5, phase);
    match (port, arm) {
        (Port::H, Arm::Short) => Complex64::new(0.0, 0.5),
        (Port::H, Arm::Long) => Complex64::i() * long,
        (Port::V, Arm::Short) => Complex64::new(0.5, 0.0),
        (Port::V, Arm::Long) => -long,
    }
}

pub fn path_coefficients(ports: PortPair, phi1: f64, phi2: f64) -> [Complex64; 4] {
    PATHS.map(|(a1, a2)| port_amplitude(ports.0, a1, phi1) * port_amplitude(ports.1, a2, phi2))
}

/// Fraction of a cell by which the coincidence window is widened against rounding.
const EDGE_SLACK: f64 = 1e-9;

/// Shift by a real number of cells, split into integer part and linear-interpolation weight.
#[derive(Debug, Clone, Copy)]
struct CellShift {
    whole: isize,
    frac: f64,
}

impl CellShift {
    fn new(delay: f64, step: f64) -> Self {
        let s = delay / step;
        let r = s.round();
        if (s - r).abs() < 1e-9 {
            CellShift {
                whole: r as isize,
                frac: 0.0,
            }
        } else {
            let f = s.floor();
            CellShift {
                whole: f as isize,
                frac: s - f,
            }
        }
    }

    /// Sample positions and weights for reading `x(k − shift)`.
    fn taps(&self, k: isize) -> [(isize, f64); 2] {
        [
            (k - self.whole, 1.0 - self.frac),
            (k - self.whole - 1, self.frac),
        ]
    }
}

/// Read access to a time-domain state with zero padding outside the grid.
pub(crate) struct Sampler<'a> {
    state: &'a JointAmplitude,
    n1: isize,
    n2: isize,
}

impl<'a> Sampler<'a> {
    pub(crate) fn new(state: &'a JointAmplitude) -> Self {
        let (n1, n2) = state.dims();
        Sampler {
            state,
            n1: n1 as isize,
            n2: n2 as isize,
        }
    }

    #[inline]
    fn at(&self, i: isize, j: isize) -> Complex64 {
        if i < 0 || j < 0 || i >= self.n1 || j >= self.n2 {
            Complex64::new(0.0, 0.0)
        } else {
            self.state.data()[(i * self.n2 + j) as usize]
        }
    }

    #[inline]
    fn shifted(&self, i: isize, j: isize, s1: &CellShift, s2: &CellShift) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (ii, w1) in s1.taps(i) {
            if w1 == 0.0 {
                continue;
            }
            for (jj, w2) in s2.taps(j) {
                if w2 == 0.0 {
                    continue;
                }
                acc += self.at(ii, jj) * (w1 * w2);
            }
        }
        acc
    }

    /// `f̃(t₁, t₂)` at arbitrary times by bilinear interpolation; exact on grid points.
    pub(crate) fn at_time(&self, t1: f64, t2: f64) -> Complex64 {
        let g = self.state.grid();
        let x1 = t1 / g.axes[0].time_step() + (g.axes[0].n_points / 2) as f64;
        let x2 = t2 / g.axes[1].time_step() + (g.axes[1].n_points / 2) as f64;
        let s1 = CellShift::new(-x1, 1.0);
        let s2 = CellShift::new(-x2, 1.0);
        self.shifted(0, 0, &s1, &s2)
    }
}

/// Gated overlap matrix `M_ab = Σ conj(P_a) P_b` of the four shifted path amplitudes.
///
/// Any port pair and phase setting is a quadratic form in `M`, so one pass over the grid
/// serves a whole fringe scan.
#[derive(Debug, Clone)]
pub struct PathGram {
    m: [[Complex64; 4]; 4],
}

impl PathGram {
    pub fn compute(state: &JointAmplitude, setup: &FransonSetup) -> Result<PathGram> {
        state.expect_domain(Domain::Time)?;
        let g = state.grid();
        let (n1, n2) = state.dims();
        let (dt1, dt2) = (g.axes[0].time_step(), g.axes[1].time_step());
        let s1 = CellShift::new(setup.left.delay(), dt1);
        let s2 = CellShift::new(setup.right.delay(), dt2);
        let zero = CellShift {
            whole: 0,
            frac: 0.0,
        };
        let sampler = Sampler::new(state);
        // Grid points exactly on the window edge count as inside.
        let window = setup.window + EDGE_SLACK * dt1.min(dt2);
        let mut m = [[Complex64::new(0.0, 0.0); 4]; 4];

        for i in 0..n1 {
            let t1 = g.axes[0].time(i);
            // Restrict to |t₁ − t₂| ≤ w before touching any samples.
            let (jlo, jhi) = if window.is_finite() {
                let lo = ((t1 - window) / dt2).ceil() + (n2 / 2) as f64;
                let hi = ((t1 + window) / dt2).floor() + (n2 / 2) as f64;
                if hi < 0.0 || lo > (n2 - 1) as f64 {
                    continue;
                }
                (lo.max(0.0) as usize, hi.min((n2 - 1) as f64) as usize)
            } else {
                (0, n2 - 1)
            };
            for j in jlo..=jhi {
                let t2 = g.axes[1].time(j);
                if (t1 - t2).abs() > window {
                    continue;
                }
                if let Some([lo, hi]) = setup.arrival_gate {
                    let mean = 0.5 * (t1 + t2);
                    if mean < lo || mean > hi {
                        continue;
                    }
                }
                let (ii, jj) = (i as isize, j as isize);
                let p = [
                    sampler.shifted(ii, jj, &zero, &zero),
                    sampler.shifted(ii, jj, &zero, &s2),
                    sampler.shifted(ii, jj, &s1, &zero),
                    sampler.shifted(ii, jj, &s1, &s2),
                ];
                for a in 0..4 {
                    let ca = p[a].conj();
                    for b in a..4 {
                        m[a][b] += ca * p[b];
                    }
                }
            }
        }
        for a in 0..4 {
            for b in 0..a {
                m[a][b] = m[b][a].conj();
            }
        }
        Ok(PathGram { m })
    }

    pub fn matrix(&self) -> &[[Complex64; 4]; 4] {
        &self.m
    }

    /// Gated detection probability for `ports` at phases (φ₁, φ₂).
    pub fn probability(&self, ports: PortPair, phi1: f64, phi2: f64) -> f64 {
        let c = path_coefficients(ports, phi1, phi2);
        let mut acc = Complex64::new(0.0, 0.0);
        for a in 0..4 {
            for b in 0..4 {
                acc += c[a].conj() * c[b] * self.m[a][b];
            }
        }
        acc.re.max(0.0)
    }

    /// Maximum of [`Self::probability`] over both phases.
    ///
    /// The probability is first-order in e^{iφ₁} and in e^{iφ₂}, so for one phase fixed it
    /// is `p + Re(q·e^{iφ})` and the other phase has a closed-form optimum. A coarse grid
    /// picks the basin, coordinate ascent finishes it.
    pub fn max_probability(&self, ports: PortPair) -> f64 {
        use std::f64::consts::{FRAC_PI_2, PI, TAU};
        const COARSE: usize = 32;
        let f = |a: f64, b: f64| self.probability(ports, a, b);
        let (mut p1, mut p2, mut best) = (0.0, 0.0, f64::NEG_INFINITY);
        for i in 0..COARSE {
            for j in 0..COARSE {
                let (a, b) = (
                    TAU * i as f64 / COARSE as f64,
                    TAU * j as f64 / COARSE as f64,
                );
                let v = f(a, b);
                if v > best {
                    (p1, p2, best) = (a, b, v);
                }
            }
        }
        let argmax = |g: &dyn Fn(f64) -> f64| {
            let (g0, g90, g180) = (g(0.0), g(FRAC_PI_2), g(PI));
            let p = 0.5 * (g0 + g180);
            let q = Complex64::new(0.5 * (g0 - g180), p - g90);
            (-q.arg(), p + q.norm())
        };
        for _ in 0..200 {
            let (a, _) = argmax(&|x| f(x, p2));
            p1 = a;
            let (b, v) = argmax(&|x| f(p1, x));
            p2 = b;
            if (v - best).abs() <= 1e-15 * v.abs().max(1e-300) {
                best = v;
                break;
            }
            best = v;
        }
        best.max(f(p1, p2))
    }
}

/// Coincidence amplitude at detection times (t₁, t₂) for the setup's ports and phases.
pub fn coincidence_amplitude(
    state: &JointAmplitude,
    setup: &FransonSetup,
    t1: f64,
    t2: f64,
) -> Result<Complex64> {
    state.expect_domain(Domain::Time)?;
    let sampler = Sampler::new(state);
    let c = path_coefficients(setup.ports, setup.left.phase(), setup.right.phase());
    let (d1, d2) = (setup.left.delay(), setup.right.delay());
    let terms = [
        sampler.at_time(t1, t2),
        sampler.at_time(t1, t2 - d2),
        sampler.at_time(t1 - d1, t2),
        sampler.at_time(t1 - d1, t2 - d2),
    ];
    Ok(c.iter().zip(terms).map(|(c, p)| c * p).sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn port_table_is_unitary_per_arm() {
        for arm in [Arm::Short, Arm::Long] {
            for phase in [0.0, 0.7, 2.0] {
                let total: f64 = [Port::H, Port::V]
                    .iter()
                    .map(|&p| port_amplitude(p, arm, phase).norm_sqr())
                    .sum();
                assert!((total - 0.5).abs() < 1e-15);
            }
        }
        // Output vectors of the two arms are orthogonal.
        let dot = port_amplitude(Port::H, Arm::Short, 0.3).conj()
            * port_amplitude(Port::H, Arm::Long, 0.3)
            + port_amplitude(Port::V, Arm::Short, 0.3).conj()
                * port_amplitude(Port::V, Arm::Long, 0.3);
        assert!(dot.norm() < 1e-15);
    }

    #[test]
    fn port_pair_parses() {
        assert_eq!(PortPair::try_from("hv".to_string()).unwrap(), PortPair::HV);
        assert!(PortPair::try_from("HX".to_string()).is_err());
        assert!(PortPair::try_from("HHH".to_string()).is_err());
        assert_eq!(String::from(PortPair::VH), "VH");
    }

    #[test]
    fn fractional_shift_taps() {
        let s = CellShift::new(2.5, 1.0);
        assert_eq!(s.whole, 2);
        assert!((s.frac - 0.5).abs() < 1e-15);
        let s = CellShift::new(3.0 + 1e-12, 1.0);
        assert_eq!((s.whole, s.frac), (3, 0.0));
    }
}
