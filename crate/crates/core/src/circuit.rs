// SPDX-License-Identifier: Apache-2.0
//! Electrical realization of a p-bit network.
//!
//! Node outputs swing between `+-V_DD/2`, inputs are summed through
//! conductances `G_ij` by an ideal transimpedance stage with feedback
//! resistor `R_f`, and a bias voltage feeds each node through `G_b`:
//!
//! ```text
//! V_in,i  = V_bias,i G_b R_f + sum_j V_out,j G_ij R_f
//! V_out,i = (V_DD/2) sgn(rand(-1,1) + tanh(V_in,i / V_0))
//! ```
//!
//! With `m = V_out/(V_DD/2)` and `I = V_in/V_0` this is the p-bit network
//! with `h = V_bias/(V_DD/2)`, `J = G/G_b`, `I0 = G_b R_f V_DD/(2 V_0)`.

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph;
use crate::psl::{pbit_update, NodeKind, PslNetwork};
use crate::sampler::StochasticNetwork;
use crate::scalar::Scalar;

pub const DEFAULT_SUPPLY_VOLTAGE: f64 = 0.8;
pub const DEFAULT_SIGMOID_WIDTH: f64 = 0.05;
pub const DEFAULT_FEEDBACK_RESISTANCE: f64 = 150e3;
pub const DEFAULT_READOUT_RESISTANCE: f64 = 200e3;
pub const DEFAULT_READOUT_CAPACITANCE: f64 = 200e-15;
pub const DEFAULT_SAMPLE_PERIOD: f64 = 1e-12;

/// Global electrical constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircuitSpec<S> {
    /// `V_DD` in volts.
    pub supply_voltage: S,
    /// `V_0` in volts.
    pub sigmoid_width: S,
    /// `R_f` in ohms.
    pub feedback_resistance: S,
}

impl<S: Scalar> CircuitSpec<S> {
    pub fn new(supply_voltage: S, sigmoid_width: S, feedback_resistance: S) -> Result<Self> {
        let spec = CircuitSpec {
            supply_voltage,
            sigmoid_width,
            feedback_resistance,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        for (label, v) in [
            ("V_DD", self.supply_voltage),
            ("V_0", self.sigmoid_width),
            ("R_f", self.feedback_resistance),
        ] {
            if !(v.is_finite() && v > S::zero()) {
                return Err(Error::Input(format!("{label} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    pub fn half_supply(&self) -> S {
        self.supply_voltage * S::lit(0.5)
    }
}

impl<S: Scalar> Default for CircuitSpec<S> {
    fn default() -> Self {
        CircuitSpec {
            supply_voltage: S::lit(DEFAULT_SUPPLY_VOLTAGE),
            sigmoid_width: S::lit(DEFAULT_SIGMOID_WIDTH),
            feedback_resistance: S::lit(DEFAULT_FEEDBACK_RESISTANCE),
        }
    }
}

/// Conductances and bias voltages of a p-circuit.
#[derive(Debug, Clone, PartialEq)]
pub struct CircuitParams<S> {
    spec: CircuitSpec<S>,
    bias_conductance: S,
    names: Vec<String>,
    kinds: Vec<NodeKind>,
    bias_voltages: Vec<S>,
    /// Per target node, `(source, G)` in siemens.
    conductances: Vec<Vec<(usize, S)>>,
    order: Vec<usize>,
}

impl<S: Scalar> CircuitParams<S> {
    /// Validates and assembles a circuit. Edges are `(from, to, G)`.
    pub fn new(
        spec: CircuitSpec<S>,
        bias_conductance: S,
        names: Vec<String>,
        kinds: Vec<NodeKind>,
        bias_voltages: Vec<S>,
        edges: impl IntoIterator<Item = (usize, usize, S)>,
    ) -> Result<Self> {
        spec.validate().map_err(|e| Error::Validation(e.to_string()))?;
        if !(bias_conductance.is_finite() && bias_conductance > S::zero()) {
            return Err(Error::Validation(format!(
                "bias conductance must be positive, got {bias_conductance}"
            )));
        }
        let n = names.len();
        if kinds.len() != n || bias_voltages.len() != n {
            return Err(Error::Validation("per-node vectors differ in length".into()));
        }
        if let Some(v) = bias_voltages.iter().find(|v| !v.is_finite()) {
            return Err(Error::Validation(format!("bias voltage {v} is not finite")));
        }
        let mut conductances = vec![Vec::new(); n];
        for (from, to, g) in edges {
            if from >= n || to >= n || from == to {
                return Err(Error::Validation(format!("invalid edge {from} -> {to}")));
            }
            if !g.is_finite() {
                return Err(Error::Validation(format!("conductance {g} is not finite")));
            }
            conductances[to].push((from, g));
        }
        let adjacency: Vec<Vec<usize>> = conductances
            .iter()
            .map(|ins| ins.iter().map(|&(j, _)| j).collect())
            .collect();
        let order = graph::ancestral_order(&adjacency)
            .map_err(|i| Error::Validation(format!("feedback loop through `{}`", names[i])))?;
        Ok(CircuitParams {
            spec,
            bias_conductance,
            names,
            kinds,
            bias_voltages,
            conductances,
            order,
        })
    }

    pub fn spec(&self) -> &CircuitSpec<S> {
        &self.spec
    }

    /// `G_b` in siemens.
    pub fn bias_conductance(&self) -> S {
        self.bias_conductance
    }

    /// Implied dimensionless gain `I0 = G_b R_f V_DD / (2 V_0)`.
    pub fn gain(&self) -> S {
        self.bias_conductance * self.spec.feedback_resistance * self.spec.half_supply()
            / self.spec.sigmoid_width
    }

    pub fn n_nodes(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn kinds(&self) -> &[NodeKind] {
        &self.kinds
    }

    pub fn bias_voltages(&self) -> &[S] {
        &self.bias_voltages
    }

    pub fn conductances_into(&self, i: usize) -> &[(usize, S)] {
        &self.conductances[i]
    }

    /// Every edge as `(from, to, G)`, targets ascending.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, S)> + '_ {
        self.conductances
            .iter()
            .enumerate()
            .flat_map(|(to, ins)| ins.iter().map(move |&(from, g)| (from, to, g)))
    }

    /// Transimpedance input voltage of node `i` for bipolar outputs `spins`.
    pub fn input_voltage(&self, i: usize, spins: &[i8]) -> S {
        let rf = self.spec.feedback_resistance;
        let vhalf = self.spec.half_supply();
        let current = self.conductances[i]
            .iter()
            .fold(self.bias_voltages[i] * self.bias_conductance, |acc, &(j, g)| {
                acc + vhalf * S::lit(spins[j] as f64) * g
            });
        current * rf
    }
}

impl<S: Scalar> StochasticNetwork<S> for CircuitParams<S> {
    fn n_nodes(&self) -> usize {
        self.names.len()
    }

    fn update_order(&self) -> &[usize] {
        &self.order
    }

    fn input_nodes(&self, i: usize) -> Vec<usize> {
        self.conductances[i].iter().map(|&(j, _)| j).collect()
    }

    fn drive(&self, i: usize, spins: &[i8]) -> S {
        self.input_voltage(i, spins) / self.spec.sigmoid_width
    }
}

/// `G_b = 2 V_0 I0 / (R_f V_DD)`, `G_ij = J_ij G_b`, `V_bias = h V_DD / 2`.
pub fn map_to_circuit<S: Scalar>(net: &PslNetwork<S>, spec: &CircuitSpec<S>) -> Result<CircuitParams<S>> {
    spec.validate()?;
    let g_b = S::lit(2.0) * spec.sigmoid_width * net.gain()
        / (spec.feedback_resistance * spec.supply_voltage);
    let vhalf = spec.half_supply();
    CircuitParams::new(
        *spec,
        g_b,
        net.names().to_vec(),
        net.kinds().to_vec(),
        net.biases().iter().map(|&h| h * vhalf).collect(),
        net.couplings().map(|(to, from, j)| (from, to, j * g_b)),
    )
}

/// Inverse of [`map_to_circuit`].
pub fn map_to_psl<S: Scalar>(cp: &CircuitParams<S>) -> Result<PslNetwork<S>> {
    let vhalf = cp.spec.half_supply();
    let mut builder = PslNetwork::builder(cp.gain());
    for i in 0..cp.n_nodes() {
        builder.add_node(cp.names[i].clone(), cp.bias_voltages[i] / vhalf, cp.kinds[i]);
    }
    for (from, to, g) in cp.edges() {
        builder.couple(to, from, g / cp.bias_conductance);
    }
    builder.build().map_err(|e| Error::Validation(e.to_string()))
}

/// Voltage-domain p-bit: `(V_DD/2) sgn(rand(-1,1) + tanh(V_in/V_0))`.
pub fn behavioral_pbit_voltage<S: Scalar, R: Rng + ?Sized>(
    v_in: S,
    spec: &CircuitSpec<S>,
    rng: &mut R,
) -> Result<S> {
    let m = pbit_update(v_in / spec.sigmoid_width, rng)?;
    Ok(spec.half_supply() * S::lit(m as f64))
}

/// First-order RC low-pass on the XNOR of two bipolar signals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RcReadout<S> {
    time_constant: S,
    sample_period: S,
    output: S,
}

impl<S: Scalar> RcReadout<S> {
    /// Requires `0 < sample_period < time_constant`.
    pub fn new(time_constant: S, sample_period: S, initial: S) -> Result<Self> {
        if !(sample_period > S::zero() && sample_period < time_constant && time_constant.is_finite())
        {
            return Err(Error::Input(format!(
                "need 0 < dt < RC, got dt = {sample_period}, RC = {time_constant}"
            )));
        }
        Ok(RcReadout {
            time_constant,
            sample_period,
            output: initial,
        })
    }

    /// `R = 200 kOhm`, `C = 200 fF` sampled every picosecond.
    pub fn with_defaults() -> Self {
        Self::new(
            S::lit(DEFAULT_READOUT_RESISTANCE * DEFAULT_READOUT_CAPACITANCE),
            S::lit(DEFAULT_SAMPLE_PERIOD),
            S::zero(),
        )
        .expect("default readout is valid")
    }

    pub fn output(&self) -> S {
        self.output
    }

    pub fn time_constant(&self) -> S {
        self.time_constant
    }

    pub fn sample_period(&self) -> S {
        self.sample_period
    }

    /// Feeds one sample of each signal; returns the new filter output.
    pub fn push(&mut self, a: i8, b: i8) -> S {
        let x = S::lit((a * b) as f64);
        self.output = self.output + self.sample_period / self.time_constant * (x - self.output);
        self.output
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RcResponse<S> {
    pub series: Vec<S>,
    pub final_value: S,
}

/// Ideal XNOR followed by the RC filter, starting from `y = 0`.
pub fn xnor_rc_correlator<S: Scalar>(
    trace_i: &[i8],
    trace_j: &[i8],
    time_constant: S,
    sample_period: S,
) -> Result<RcResponse<S>> {
    if trace_i.len() != trace_j.len() {
        return Err(Error::Input(format!(
            "trace lengths differ: {} vs {}",
            trace_i.len(),
            trace_j.len()
        )));
    }
    let mut rc = RcReadout::new(time_constant, sample_period, S::zero())?;
    let series: Vec<S> = trace_i
        .iter()
        .zip(trace_j)
        .map(|(&a, &b)| rc.push(a, b))
        .collect();
    Ok(RcResponse {
        final_value: rc.output(),
        series,
    })
}
