//! Circuit text format: `k=<arity>;g=<OP>(<l>,<r>);...;out=<idx>`.
//! Node indices follow the circuit convention: inputs `0..k-1`, constant 0
//! at `k`, constant 1 at `k+1`, gates from `k+2` in listed order.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

use super::{BooleanCircuit, Gate, GateOp};

impl fmt::Display for BooleanCircuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "k={}", self.arity())?;
        for g in self.gates() {
            write!(f, ";g={}({},{})", g.op.name(), g.left, g.right)?;
        }
        write!(f, ";out={}", self.output())
    }
}

impl FromStr for BooleanCircuit {
    type Err = Error;

    fn from_str(s: &str) -> Result<BooleanCircuit> {
        let mut arity = None;
        let mut output = None;
        let mut gates = Vec::new();
        for raw in s.split(';') {
            let part = raw.trim();
            if part.is_empty() {
                continue;
            }
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| Error::parse(format!("expected key=value, got {part:?}")))?;
            match key.trim() {
                "k" => {
                    arity = Some(parse_number(value, "arity")?);
                }
                "g" => {
                    gates.push(parse_gate(value)?);
                }
                "out" => {
                    output = Some(parse_number(value, "output index")?);
                }
                other => {
                    return Err(Error::parse(format!("unknown field {other:?}")));
                }
            }
        }
        let arity = arity.ok_or_else(|| Error::parse("missing k= field"))?;
        let output = output.ok_or_else(|| Error::parse("missing out= field"))?;
        BooleanCircuit::new(arity, gates, output)
    }
}

fn parse_number(value: &str, what: &str) -> Result<usize> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::parse(format!("invalid {what} {value:?}")))
}

fn parse_gate(value: &str) -> Result<Gate> {
    let value = value.trim();
    let open = value
        .find('(')
        .ok_or_else(|| Error::parse(format!("gate {value:?} missing '('")))?;
    if !value.ends_with(')') {
        return Err(Error::parse(format!("gate {value:?} missing ')'")));
    }
    let op = GateOp::from_name(value[..open].trim())?;
    let args = &value[open + 1..value.len() - 1];
    let (l, r) = args
        .split_once(',')
        .ok_or_else(|| Error::parse(format!("gate arguments {args:?} need a comma")))?;
    Ok(Gate {
        op,
        left: parse_number(l, "gate input")?,
        right: parse_number(r, "gate input")?,
    })
}
