use std::f64::consts::FRAC_PI_4;

use serde::{Deserialize, Serialize};

use super::{regime_warnings, FransonSetup, PathGram, PortPair};
use crate::biphoton::{Domain, JointAmplitude};
use crate::error::{Result, Warned};

/// Which of the four correlation terms enters CHSH with a minus sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum MinusPosition {
    AB,
    ABPrime,
    APrimeB,
    #[default]
    APrimeBPrime,
}

/// Analyzer phases: a, a′ on interferometer 1, b, b′ on interferometer 2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChshSettings {
    pub a: f64,
    pub a_prime: f64,
    pub b: f64,
    pub b_prime: f64,
    pub minus: MinusPosition,
}

impl Default for ChshSettings {
    fn default() -> Self {
        ChshSettings {
            a: 0.0,
            a_prime: 2.0 * FRAC_PI_4,
            b: -FRAC_PI_4,
            b_prime: FRAC_PI_4,
            minus: MinusPosition::APrimeBPrime,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChshResult {
    pub s: f64,
    /// E(a,b), E(a,b′), E(a′,b), E(a′,b′).
    pub correlations: [f64; 4],
}

/// `E = (R_HH + R_VV − R_HV − R_VH) / ΣR` from gated port-pair probabilities.
pub fn correlation(gram: &PathGram, phi1: f64, phi2: f64) -> f64 {
    let r = PortPair::ALL.map(|p| gram.probability(p, phi1, phi2));
    let [hh, hv, vh, vv] = r;
    let total = hh + hv + vh + vv;
    if total <= 0.0 {
        return 0.0;
    }
    (hh + vv - hv - vh) / total
}

/// CHSH combination `|E(a,b) + E(a,b′) + E(a′,b) + E(a′,b′)|` with one term negated.
pub fn chsh_value(
    state: &JointAmplitude,
    setup: &FransonSetup,
    settings: &ChshSettings,
) -> Result<Warned<ChshResult>> {
    setup.validate()?;
    let s = state.in_domain(Domain::Time)?;
    let warnings = regime_warnings(&s, setup)?;
    let gram = PathGram::compute(&s, setup)?;
    let e = [
        correlation(&gram, settings.a, settings.b),
        correlation(&gram, settings.a, settings.b_prime),
        correlation(&gram, settings.a_prime, settings.b),
        correlation(&gram, settings.a_prime, settings.b_prime),
    ];
    let minus = match settings.minus {
        MinusPosition::AB => 0,
        MinusPosition::ABPrime => 1,
        MinusPosition::APrimeB => 2,
        MinusPosition::APrimeBPrime => 3,
    };
    let total: f64 = e
        .iter()
        .enumerate()
        .map(|(k, v)| if k == minus { -v } else { *v })
        .sum();
    Ok(Warned {
        value: ChshResult {
            s: total.abs(),
            correlations: e,
        },
        warnings,
    })
}
