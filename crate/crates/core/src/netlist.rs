// SPDX-License-Identifier: Apache-2.0
//! `PBN v1` line-oriented netlist.
//!
//! ```text
//! PBN v1
//! GLOBAL V_DD=8.00000e-1 V0=5.00000e-2 RF=1.50000e5 GB=8.33333e-7
//! NODE A VBIAS=0.00000e0
//! NODE X_C VBIAS=-1.00000e0 AUX
//! EDGE A B G=1.91883e-6
//! ```
//!
//! Numbers carry six significant digits. Nodes appear in id order, edges
//! grouped by target in attachment order. Auxiliary gates are tagged `AUX`.

use std::collections::HashMap;
use std::io::Write;

use crate::circuit::{CircuitParams, CircuitSpec};
use crate::error::{Error, ParseCode, Result};
use crate::psl::NodeKind;
use crate::scalar::Scalar;

pub const HEADER: &str = "PBN v1";

fn num<S: Scalar>(x: S) -> String {
    // normalize negative zero so the output is sign-stable
    let x = x.as_f64();
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.5e}")
}

pub fn export_netlist<S: Scalar>(cp: &CircuitParams<S>) -> String {
    let spec = cp.spec();
    let mut out = String::new();
    out.push_str(HEADER);
    out.push('\n');
    out.push_str(&format!(
        "GLOBAL V_DD={} V0={} RF={} GB={}\n",
        num(spec.supply_voltage),
        num(spec.sigmoid_width),
        num(spec.feedback_resistance),
        num(cp.bias_conductance())
    ));
    for (i, name) in cp.names().iter().enumerate() {
        out.push_str(&format!("NODE {name} VBIAS={}", num(cp.bias_voltages()[i])));
        if cp.kinds()[i] == NodeKind::Auxiliary {
            out.push_str(" AUX");
        }
        out.push('\n');
    }
    for (from, to, g) in cp.edges() {
        out.push_str(&format!(
            "EDGE {} {} G={}\n",
            cp.names()[from],
            cp.names()[to],
            num(g)
        ));
    }
    out
}

pub fn write_netlist<S: Scalar, W: Write>(cp: &CircuitParams<S>, mut writer: W) -> Result<()> {
    writer.write_all(export_netlist(cp).as_bytes())?;
    writer.flush()?;
    Ok(())
}

fn keyed<S: Scalar>(token: &str, key: &str, line: usize) -> Result<S> {
    let value = token
        .strip_prefix(key)
        .and_then(|rest| rest.strip_prefix('='))
        .ok_or_else(|| Error::parse(line, ParseCode::Syntax, None, format!("expected {key}=<value>, got `{token}`")))?;
    let x: f64 = value
        .parse()
        .map_err(|_| Error::parse(line, ParseCode::Syntax, None, format!("bad number `{value}`")))?;
    S::from_f64(x)
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::parse(line, ParseCode::Syntax, None, format!("number `{value}` out of range")))
}

pub fn parse_netlist<S: Scalar>(text: &str) -> Result<CircuitParams<S>> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    match lines.next() {
        Some((_, HEADER)) => {}
        Some((n, other)) => {
            return Err(Error::parse(n, ParseCode::Syntax, None, format!("expected `{HEADER}`, got `{other}`")))
        }
        None => return Err(Error::parse(1, ParseCode::Syntax, None, "empty netlist")),
    }
    let mut spec_and_gb: Option<(CircuitSpec<S>, S)> = None;
    let mut names = Vec::new();
    let mut kinds = Vec::new();
    let mut biases = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut edges = Vec::new();
    for (n, line) in lines {
        let tokens: Vec<&str> = line.split_whitespace().collect();
        match tokens.as_slice() {
            ["GLOBAL", vdd, v0, rf, gb] => {
                if spec_and_gb.is_some() {
                    return Err(Error::parse(n, ParseCode::Syntax, None, "duplicate GLOBAL line"));
                }
                let spec = CircuitSpec {
                    supply_voltage: keyed(vdd, "V_DD", n)?,
                    sigmoid_width: keyed(v0, "V0", n)?,
                    feedback_resistance: keyed(rf, "RF", n)?,
                };
                spec_and_gb = Some((spec, keyed(gb, "GB", n)?));
            }
            ["NODE", name, vbias, rest @ ..] => {
                let kind = match rest {
                    [] => NodeKind::Regular,
                    ["AUX"] => NodeKind::Auxiliary,
                    _ => return Err(Error::parse(n, ParseCode::Syntax, Some(name), "unexpected trailing tokens")),
                };
                if index.insert((*name).to_owned(), names.len()).is_some() {
                    return Err(Error::parse(n, ParseCode::DuplicateNode, Some(name), format!("duplicate node `{name}`")));
                }
                names.push((*name).to_owned());
                kinds.push(kind);
                biases.push(keyed(vbias, "VBIAS", n)?);
            }
            ["EDGE", from, to, g] => {
                let lookup = |name: &str| {
                    index.get(name).copied().ok_or_else(|| {
                        Error::parse(n, ParseCode::UnknownNode, Some(name), format!("unknown node `{name}`"))
                    })
                };
                edges.push((lookup(from)?, lookup(to)?, keyed::<S>(g, "G", n)?));
            }
            _ => return Err(Error::parse(n, ParseCode::Syntax, None, format!("unrecognized line `{line}`"))),
        }
    }
    let (spec, g_b) = spec_and_gb
        .ok_or_else(|| Error::parse(1, ParseCode::Syntax, None, "missing GLOBAL line"))?;
    CircuitParams::new(spec, g_b, names, kinds, biases, edges)
}
