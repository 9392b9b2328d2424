//! Observables computed from run data.

use serde::Serialize;

use crate::dynamics::{Compartment, Counts, NodeState};

/// Compensated (Neumaier) summation.
pub fn sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut total = 0.0_f64;
    let mut carry = 0.0_f64;
    for x in values {
        let next = total + x;
        if total.abs() >= x.abs() {
            carry += (total - next) + x;
        } else {
            carry += (x - next) + total;
        }
        total = next;
    }
    total + carry
}

/// Mean and sample standard deviation; the deviation of a single value is 0.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    // shifted by the first value: stable, and exact when all values agree
    let x0 = values[0];
    let mean = x0 + sum(values.iter().map(|x| x - x0)) / n;
    if values.len() == 1 {
        return (mean, 0.0);
    }
    let ss = sum(values.iter().map(|x| (x - mean) * (x - mean)));
    (mean, (ss / (n - 1.0)).sqrt())
}

/// Total damage per node: the sum of every node's damage divided by `n`.
pub fn total_damage(nodes: &[NodeState], n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    sum(nodes.iter().map(|v| v.damage_received)) / n as f64
}

/// Anything that can report a compartment size at one time step.
pub trait SeriesRow {
    fn value(&self, c: Compartment) -> f64;

    fn aware(&self) -> f64 {
        self.value(Compartment::SusceptibleAware)
            + self.value(Compartment::InfectedAware)
            + self.value(Compartment::HealedAware)
    }
}

impl SeriesRow for Counts {
    fn value(&self, c: Compartment) -> f64 {
        self.get(c) as f64
    }
}

impl SeriesRow for [f64; 5] {
    fn value(&self, c: Compartment) -> f64 {
        self[c as usize]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PhaseReport {
    /// First step with any aware node.
    pub onset_t: Option<usize>,
    /// First step at which the infected-unaware count peaks; `None` if it is
    /// zero throughout.
    pub peak_iu_t: Option<usize>,
    pub peak_ia_t: Option<usize>,
    pub end_t: usize,
}

fn first_argmax<R: SeriesRow>(series: &[R], c: Compartment) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (t, row) in series.iter().enumerate() {
        let v = row.value(c);
        if v > 0.0 && best.is_none_or(|(_, b)| v > b) {
            best = Some((t, v));
        }
    }
    best.map(|(t, _)| t)
}

/// Phase boundaries of one epidemic cycle. `series` must be nonempty.
pub fn cycle_phases<R: SeriesRow>(series: &[R]) -> PhaseReport {
    assert!(!series.is_empty(), "cycle_phases on an empty series");
    PhaseReport {
        onset_t: series.iter().position(|r| r.aware() > 0.0),
        peak_iu_t: first_argmax(series, Compartment::InfectedUnaware),
        peak_ia_t: first_argmax(series, Compartment::InfectedAware),
        end_t: series.len() - 1,
    }
}

/// One point of a damage or growth-rate sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepPoint {
    pub x: f64,
    pub mean_dn: f64,
    pub std_dn: f64,
    pub mean_ever_infected_fraction: f64,
    pub realizations: usize,
}

impl SweepPoint {
    /// Standard error of `mean_dn`.
    pub fn std_error(&self) -> f64 {
        self.std_dn / (self.realizations as f64).sqrt()
    }
}
