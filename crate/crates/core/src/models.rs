//! Physical performance models: MS gate durations, shuttling operation
//! times, motional heating bookkeeping, and gate fidelity.
//!
//! Times are in μs, energies in motional quanta.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::ModelError;

/// Two-qubit (MS) gate implementation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum GateImpl {
    AM1,
    AM2,
    PM,
    #[default]
    FM,
}

impl GateImpl {
    pub const ALL: [GateImpl; 4] = [GateImpl::AM1, GateImpl::AM2, GateImpl::PM, GateImpl::FM];
}

impl fmt::Display for GateImpl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GateImpl::AM1 => "AM1",
            GateImpl::AM2 => "AM2",
            GateImpl::PM => "PM",
            GateImpl::FM => "FM",
        })
    }
}

impl FromStr for GateImpl {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "AM1" => Ok(GateImpl::AM1),
            "AM2" => Ok(GateImpl::AM2),
            "PM" => Ok(GateImpl::PM),
            "FM" => Ok(GateImpl::FM),
            _ => Err(format!("unknown gate implementation `{s}` (expected AM1, AM2, PM or FM)")),
        }
    }
}

/// Chain reordering method: gate-based swap or physical ion swap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum ReorderMethod {
    #[default]
    GS,
    IS,
}

impl fmt::Display for ReorderMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReorderMethod::GS => "GS",
            ReorderMethod::IS => "IS",
        })
    }
}

impl FromStr for ReorderMethod {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "GS" => Ok(ReorderMethod::GS),
            "IS" => Ok(ReorderMethod::IS),
            _ => Err(format!("unknown reorder method `{s}` (expected GS or IS)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ShuttleTimes {
    pub move_per_segment: f64,
    pub split: f64,
    pub merge: f64,
    pub y_cross: f64,
    pub x_cross: f64,
}

impl Default for ShuttleTimes {
    fn default() -> Self {
        Self {
            move_per_segment: 5.0,
            split: 80.0,
            merge: 80.0,
            y_cross: 100.0,
            x_cross: 120.0,
        }
    }
}

/// Tunable physics. `gamma` and `a0` are calibration knobs rather than
/// measured values; the defaults give an FM gate on a cold 15-ion chain
/// an error of about 1e-3.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhysicsParams {
    /// Quanta added to each resulting chain by a split or merge.
    pub k1: f64,
    /// Quanta picked up per segment shuttled.
    pub k2: f64,
    /// Background heating error rate, 1/s.
    pub gamma: f64,
    /// Laser-instability scale; the motional error coefficient is `a0 * N / ln N`.
    #[serde(rename = "A0")]
    pub a0: f64,
    pub t_1q: f64,
    pub f_1q_err: f64,
    pub t_meas: f64,
    pub f_meas_err: f64,
    /// 180° rotation time of one physical ion swap.
    pub t_is_rotation: f64,
    pub shuttle_times: ShuttleTimes,
}

impl Default for PhysicsParams {
    fn default() -> Self {
        Self {
            k1: 0.1,
            k2: 0.01,
            gamma: 10.0,
            a0: 1.8e-4,
            t_1q: 10.0,
            f_1q_err: 1e-5,
            t_meas: 100.0,
            f_meas_err: 1e-3,
            t_is_rotation: 80.0,
            shuttle_times: ShuttleTimes::default(),
        }
    }
}

impl PhysicsParams {
    pub fn validate(&self) -> Result<(), ModelError> {
        let st = &self.shuttle_times;
        let nonneg = [
            ("k1", self.k1),
            ("k2", self.k2),
            ("gamma", self.gamma),
            ("A0", self.a0),
            ("t_1q", self.t_1q),
            ("t_meas", self.t_meas),
            ("t_is_rotation", self.t_is_rotation),
            ("shuttle_times.move_per_segment", st.move_per_segment),
            ("shuttle_times.split", st.split),
            ("shuttle_times.merge", st.merge),
            ("shuttle_times.y_cross", st.y_cross),
            ("shuttle_times.x_cross", st.x_cross),
        ];
        for (name, value) in nonneg {
            if !(value >= 0.0 && value.is_finite()) {
                return Err(ModelError::Parameter { name, value });
            }
        }
        for (name, value) in [("f_1q_err", self.f_1q_err), ("f_meas_err", self.f_meas_err)] {
            if !(0.0..1.0).contains(&value) {
                return Err(ModelError::Parameter { name, value });
            }
        }
        Ok(())
    }
}

/// MS gate duration for ions `d` positions apart in an `n`-ion chain.
pub fn gate_time(gate: GateImpl, d: usize, n: usize) -> Result<f64, ModelError> {
    if n < 2 {
        return Err(ModelError::ChainTooShort { n });
    }
    if d == 0 || d >= n {
        return Err(ModelError::Separation { d, n });
    }
    let d = d as f64;
    Ok(match gate {
        GateImpl::AM1 => 100.0 * d - 22.0,
        GateImpl::AM2 => 38.0 * d + 10.0,
        GateImpl::PM => 5.0 * d + 160.0,
        GateImpl::FM => (13.33 * n as f64 - 54.0).max(100.0),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShuttleOp {
    Move(usize),
    Split,
    Merge,
    CrossY,
    CrossX,
}

impl ShuttleOp {
    /// Junction crossing for a junction of the given degree (4 = X, else Y).
    pub fn cross(degree: usize) -> Self {
        if degree >= 4 {
            ShuttleOp::CrossX
        } else {
            ShuttleOp::CrossY
        }
    }
}

pub fn shuttle_op_time(op: ShuttleOp, p: &PhysicsParams) -> f64 {
    let t = &p.shuttle_times;
    match op {
        ShuttleOp::Move(n) => t.move_per_segment * n as f64,
        ShuttleOp::Split => t.split,
        ShuttleOp::Merge => t.merge,
        ShuttleOp::CrossY => t.y_cross,
        ShuttleOp::CrossX => t.x_cross,
    }
}

/// Motional energy of one ion chain, in quanta (n̄).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ChainEnergy(f64);

impl ChainEnergy {
    pub const ZERO: ChainEnergy = ChainEnergy(0.0);

    /// Negative or non-finite input is a caller bug.
    pub fn new(quanta: f64) -> Self {
        assert!(quanta >= 0.0 && quanta.is_finite(), "invalid chain energy {quanta}");
        Self(quanta)
    }

    pub fn quanta(self) -> f64 {
        self.0
    }
}

/// Splits a chain of `n_total` ions into `n_left` and `n_total - n_left`.
/// Energy divides in proportion to ion count; each part then gains `k1`.
pub fn heat_split(
    e: ChainEnergy,
    n_total: usize,
    n_left: usize,
    p: &PhysicsParams,
) -> Result<(ChainEnergy, ChainEnergy), ModelError> {
    if n_left == 0 || n_left >= n_total {
        return Err(ModelError::SplitRange { n_total, n_left });
    }
    let share = e.0 / n_total as f64;
    Ok((
        ChainEnergy(share * n_left as f64 + p.k1),
        ChainEnergy(share * (n_total - n_left) as f64 + p.k1),
    ))
}

pub fn heat_merge(a: ChainEnergy, b: ChainEnergy, p: &PhysicsParams) -> ChainEnergy {
    ChainEnergy(a.0 + b.0 + p.k1)
}

pub fn heat_move(e: ChainEnergy, n_segments: usize, p: &PhysicsParams) -> ChainEnergy {
    ChainEnergy(e.0 + p.k2 * n_segments as f64)
}

/// Fidelity of one gate together with its two error contributions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GateFidelity {
    pub fidelity: f64,
    /// Background-heating term `gamma * tau`.
    pub background: f64,
    /// Motional term `A(N) * (2 n̄ + 1)`.
    pub motional: f64,
}

/// `F = 1 - gamma*tau - a0*(N/ln N)*(2 n̄ + 1)`, clamped at 0.
pub fn two_qubit_fidelity(tau_us: f64, n_bar: f64, n: usize, p: &PhysicsParams) -> GateFidelity {
    let n = n.max(2) as f64;
    let background = p.gamma * tau_us * 1e-6;
    let motional = p.a0 * (n / n.ln()) * (2.0 * n_bar + 1.0);
    GateFidelity {
        fidelity: (1.0 - background - motional).max(0.0),
        background,
        motional,
    }
}

pub fn one_qubit_fidelity(p: &PhysicsParams) -> f64 {
    1.0 - p.f_1q_err
}

pub fn measure_fidelity(p: &PhysicsParams) -> f64 {
    1.0 - p.f_meas_err
}

/// Time to bring an ion `distance` positions over to a chain end in an
/// `n`-ion chain. GS is one SWAP (3 MS gates at that separation); IS is
/// `distance` hops of split, rotate, merge (a 2-ion chain needs no split).
pub fn reorder_time(
    gate: GateImpl,
    method: ReorderMethod,
    n: usize,
    distance: usize,
    p: &PhysicsParams,
) -> Result<f64, ModelError> {
    if distance == 0 {
        return Ok(0.0);
    }
    match method {
        ReorderMethod::GS => Ok(3.0 * gate_time(gate, distance, n)?),
        ReorderMethod::IS => {
            if distance >= n {
                return Err(ModelError::Separation { d: distance, n });
            }
            Ok(distance as f64 * is_hop_time(n, p))
        }
    }
}

/// Duration of one physical swap of adjacent ions in an `n`-ion chain.
pub fn is_hop_time(n: usize, p: &PhysicsParams) -> f64 {
    if n > 2 {
        p.shuttle_times.split + p.t_is_rotation + p.shuttle_times.merge
    } else {
        p.t_is_rotation
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p() -> PhysicsParams {
        PhysicsParams::default()
    }

    #[test]
    fn gate_times() {
        assert_eq!(gate_time(GateImpl::AM1, 3, 10).unwrap(), 278.0);
        assert_eq!(gate_time(GateImpl::FM, 1, 10).unwrap(), 100.0);
        assert!((gate_time(GateImpl::FM, 1, 20).unwrap() - 212.6).abs() < 1e-9);
        assert_eq!(gate_time(GateImpl::PM, 4, 10).unwrap(), 180.0);
        assert_eq!(gate_time(GateImpl::AM2, 1, 2).unwrap(), 48.0);
    }

    #[test]
    fn gate_time_rejects_bad_separation() {
        assert_eq!(
            gate_time(GateImpl::AM1, 0, 5),
            Err(ModelError::Separation { d: 0, n: 5 })
        );
        assert_eq!(
            gate_time(GateImpl::PM, 5, 5),
            Err(ModelError::Separation { d: 5, n: 5 })
        );
        assert_eq!(gate_time(GateImpl::FM, 1, 1), Err(ModelError::ChainTooShort { n: 1 }));
    }

    #[test]
    fn shuttle_times() {
        assert_eq!(shuttle_op_time(ShuttleOp::Move(3), &p()), 15.0);
        assert_eq!(shuttle_op_time(ShuttleOp::CrossX, &p()), 120.0);
        assert_eq!(shuttle_op_time(ShuttleOp::CrossY, &p()), 100.0);
        assert_eq!(shuttle_op_time(ShuttleOp::Split, &p()), 80.0);
        assert_eq!(shuttle_op_time(ShuttleOp::Merge, &p()), 80.0);
        assert_eq!(ShuttleOp::cross(3), ShuttleOp::CrossY);
        assert_eq!(ShuttleOp::cross(4), ShuttleOp::CrossX);
    }

    #[test]
    fn split_examples() {
        let (l, r) = heat_split(ChainEnergy::new(1.0), 10, 1, &p()).unwrap();
        assert!((l.quanta() - 0.2).abs() < 1e-12 && (r.quanta() - 1.0).abs() < 1e-12);
        let (l, r) = heat_split(ChainEnergy::ZERO, 7, 3, &p()).unwrap();
        assert_eq!((l.quanta(), r.quanta()), (0.1, 0.1));
        let (l, r) = heat_split(ChainEnergy::new(0.6), 3, 1, &p()).unwrap();
        assert!((l.quanta() - 0.3).abs() < 1e-12 && (r.quanta() - 0.5).abs() < 1e-12);
        assert!(heat_split(ChainEnergy::ZERO, 3, 3, &p()).is_err());
        assert!(heat_split(ChainEnergy::ZERO, 3, 0, &p()).is_err());
    }

    #[test]
    fn merge_and_move_examples() {
        let m = heat_merge(ChainEnergy::new(0.2), ChainEnergy::new(0.3), &p());
        assert!((m.quanta() - 0.6).abs() < 1e-12);
        assert_eq!(heat_merge(ChainEnergy::ZERO, ChainEnergy::ZERO, &p()).quanta(), 0.1);
        assert!((heat_merge(ChainEnergy::new(1.0), ChainEnergy::ZERO, &p()).quanta() - 1.1).abs() < 1e-12);
        assert!((heat_move(ChainEnergy::new(0.5), 4, &p()).quanta() - 0.54).abs() < 1e-12);
        assert_eq!(heat_move(ChainEnergy::new(0.7), 0, &p()).quanta(), 0.7);
        assert!((heat_move(ChainEnergy::ZERO, 100, &p()).quanta() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fidelity_examples() {
        let quiet = PhysicsParams {
            gamma: 0.0,
            a0: 0.0,
            ..p()
        };
        assert_eq!(two_qubit_fidelity(500.0, 3.0, 20, &quiet).fidelity, 1.0);

        let f = two_qubit_fidelity(100.0, 0.0, 15, &p());
        let expected = 1.0 - 10.0 * 100e-6 - 1.8e-4 * (15.0 / 15f64.ln());
        assert!((f.fidelity - expected).abs() < 1e-12);
        assert!((f.fidelity - 0.99800).abs() < 5e-6);

        let hot = two_qubit_fidelity(100.0, 0.5, 15, &p());
        assert!(hot.fidelity < f.fidelity);
    }

    #[test]
    fn fidelity_clamps_at_zero() {
        let f = two_qubit_fidelity(1e9, 1e6, 30, &p());
        assert_eq!(f.fidelity, 0.0);
        assert!(f.background + f.motional > 1.0);
    }

    #[test]
    fn one_qubit_and_measure() {
        let zero = PhysicsParams { f_1q_err: 0.0, ..p() };
        assert_eq!(one_qubit_fidelity(&zero), 1.0);
        assert!((one_qubit_fidelity(&p()) - 0.99999).abs() < 1e-15);
        assert!((measure_fidelity(&p()) - 0.999).abs() < 1e-15);
    }

    #[test]
    fn reorder_costs() {
        assert_eq!(reorder_time(GateImpl::AM2, ReorderMethod::GS, 5, 0, &p()).unwrap(), 0.0);
        assert_eq!(
            reorder_time(GateImpl::AM2, ReorderMethod::GS, 5, 2, &p()).unwrap(),
            3.0 * 86.0
        );
        assert_eq!(
            reorder_time(GateImpl::AM2, ReorderMethod::IS, 5, 2, &p()).unwrap(),
            2.0 * 240.0
        );
        assert_eq!(reorder_time(GateImpl::FM, ReorderMethod::IS, 2, 1, &p()).unwrap(), 80.0);
    }

    #[test]
    fn validate_rejects_out_of_range() {
        assert!(PhysicsParams { k1: -0.1, ..p() }.validate().is_err());
        assert!(PhysicsParams { f_meas_err: 1.0, ..p() }.validate().is_err());
        assert!(p().validate().is_ok());
    }

    proptest! {
        #[test]
        fn fm_independent_of_distance(n in 2usize..60, d1 in 1usize..59, d2 in 1usize..59) {
            prop_assume!(d1 < n && d2 < n);
            prop_assert_eq!(gate_time(GateImpl::FM, d1, n).unwrap(), gate_time(GateImpl::FM, d2, n).unwrap());
        }

        #[test]
        fn fm_non_decreasing_in_chain_length(n in 2usize..80) {
            prop_assert!(gate_time(GateImpl::FM, 1, n + 1).unwrap() >= gate_time(GateImpl::FM, 1, n).unwrap());
        }

        #[test]
        fn distance_gates_strictly_increase(d in 1usize..40) {
            for g in [GateImpl::AM1, GateImpl::AM2, GateImpl::PM] {
                prop_assert!(gate_time(g, d + 1, 50).unwrap() > gate_time(g, d, 50).unwrap());
            }
        }

        #[test]
        fn fidelity_monotone(tau in 0.0f64..2000.0, nbar in 0.0f64..20.0, n in 3usize..60, dt in 0.0f64..100.0, dn in 0.0f64..5.0) {
            let p = p();
            let f = two_qubit_fidelity(tau, nbar, n, &p).fidelity;
            prop_assert!(two_qubit_fidelity(tau + dt, nbar, n, &p).fidelity <= f);
            prop_assert!(two_qubit_fidelity(tau, nbar + dn, n, &p).fidelity <= f);
            prop_assert!(two_qubit_fidelity(tau, nbar, n + 1, &p).fidelity <= f);
        }

        #[test]
        fn error_terms_sum(tau in 0.0f64..2000.0, nbar in 0.0f64..5.0, n in 2usize..60) {
            let g = two_qubit_fidelity(tau, nbar, n, &p());
            prop_assert!((1.0 - g.fidelity - (g.background + g.motional)).abs() < 1e-12);
        }
    }
}
