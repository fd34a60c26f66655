use layerstack::constants::C;
use layerstack::stacks::identities::{
    denominator_identity_residual, stokes_residual, transmission_symmetry_residual, via_intermediate,
};
use layerstack::{evaluate_layerwise, Frequency, FresnelSet, LayerStack, Polarization, TransverseMode};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::CliError;
use crate::output::{Cell, Table};

#[derive(Debug, Clone, Copy)]
pub struct Sampling {
    pub samples: usize,
    pub imaginary: bool,
    /// Frequency range (ω or ξ), rad/s, sampled log-uniformly.
    pub omega: (f64, f64),
    /// k is drawn up to `k_frac · Re n_left · ω/c` ...
    pub k_frac: f64,
    /// ... or up to this absolute value, 1/m.
    pub k_max: Option<f64>,
    pub seed: u64,
    pub threshold: f64,
}

const IDENTITIES: [&str; 5] = [
    "stokes",
    "grouping",
    "denominator",
    "transmission_symmetry",
    "evaluation",
];

#[derive(Default, Clone, Copy)]
struct Worst {
    residual: f64,
    checks: usize,
}

impl Worst {
    fn add(&mut self, r: f64) {
        self.checks += 1;
        // NaN counts as a violation
        if !(r <= self.residual) {
            self.residual = if r.is_nan() { f64::INFINITY } else { r };
        }
    }
}

/// `|a - b| / max(1, |a|, |b|)` over the four coefficients.
fn deviation(a: &FresnelSet, b: &FresnelSet) -> f64 {
    a.coefficients()
        .iter()
        .zip(b.coefficients().iter())
        .map(|(x, y)| (x - y).norm() / x.norm().max(y.norm()).max(1.0))
        .fold(0.0, f64::max)
}

fn sample_mode(rng: &mut ChaCha8Rng, stack: &LayerStack, s: &Sampling) -> layerstack::Result<TransverseMode> {
    let (lo, hi) = s.omega;
    let w = (lo.ln() + rng.gen::<f64>() * (hi.ln() - lo.ln())).exp();
    let pol = if rng.gen_bool(0.5) {
        Polarization::P
    } else {
        Polarization::S
    };
    let freq = if s.imaginary {
        Frequency::Imaginary(w)
    } else {
        Frequency::Real(w)
    };
    let k_top = match s.k_max {
        Some(k) => k,
        None => s.k_frac * stack.left.index(freq)?.re * w / C,
    };
    TransverseMode::new(pol, rng.gen::<f64>() * k_top, freq)
}

fn check(stack: &LayerStack, mode: &TransverseMode, worst: &mut [Worst; 5]) -> layerstack::Result<()> {
    let whole = stack.evaluate(mode)?;
    let last = stack.node_count() - 1;
    for i in 0..last {
        let part = stack.between(i, i + 1)?;
        if part.layers.is_empty() {
            worst[0].add(stokes_residual(&part.evaluate(mode)?));
        }
    }
    if stack.is_local() {
        worst[1].add(deviation(&whole, &evaluate_layerwise(&stack.to_expr(), mode)?));
    }
    for k in 1..last {
        worst[1].add(deviation(&whole, &via_intermediate(stack, k, mode)?));
    }
    for k in 1..last {
        for l in k + 1..last {
            worst[2].add(denominator_identity_residual(stack, k, l, mode)?);
        }
    }
    worst[3].add(transmission_symmetry_residual(&whole, mode)?);
    Ok(())
}

/// Report table and whether every identity passed.
pub fn run(stack: &LayerStack, s: &Sampling) -> Result<(Table, bool, Vec<String>), CliError> {
    if !(s.omega.0 > 0.0 && s.omega.0 < s.omega.1 && s.omega.1.is_finite()) {
        return Err(CliError::usage("--omega needs 0 < MIN < MAX"));
    }
    if s.samples == 0 {
        return Err(CliError::usage("--samples must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    let mut worst = [Worst::default(); 5];
    let mut errors = Vec::new();
    for _ in 0..s.samples {
        let result = sample_mode(&mut rng, stack, s).and_then(|mode| {
            check(stack, &mode, &mut worst).map_err(|e| layerstack::Error::Domain(format!("{mode}: {e}")))
        });
        match result {
            Ok(()) => worst[4].add(0.0),
            Err(e) => {
                worst[4].add(f64::INFINITY);
                errors.push(e.to_string());
            }
        }
    }
    let mut table = Table::new(["identity", "status", "worst_residual", "checks", "threshold"]);
    let mut all = true;
    for (name, w) in IDENTITIES.iter().zip(worst.iter()) {
        let status = if w.checks == 0 {
            "skipped"
        } else if w.residual <= s.threshold {
            "pass"
        } else {
            all = false;
            "fail"
        };
        let residual = if w.checks == 0 { Cell::Empty } else { w.residual.into() };
        table.push(vec![
            (*name).into(),
            status.into(),
            residual,
            w.checks.into(),
            s.threshold.into(),
        ]);
    }
    Ok((table, all, errors))
}
