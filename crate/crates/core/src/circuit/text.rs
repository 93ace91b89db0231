//! Line-based circuit text format.
//!
//! ```text
//! qreg eps_out 2
//! qreg c0 1 ancilla
//! CNOT eps_out[0] c0[0]
//! CZ2 eps_out[0] eps_out[1] c0[0]
//! PEXP(0.125) XY eps_out[1] c0[0]
//! ```
//!
//! Lines starting with `#` are comments and blank lines are skipped, so
//! `parse(print(c)) == c` and `print(parse(print(c))) == print(c)`.

use std::fmt::Write;

use super::{Circuit, Gate, QubitRef, Registers};
use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString};

pub(super) fn print_circuit(c: &Circuit) -> String {
    let regs = c.registers();
    let mut out = String::new();
    for r in regs.iter() {
        let _ = write!(out, "qreg {} {}", r.name, r.width);
        if r.ancilla {
            out.push_str(" ancilla");
        }
        out.push('\n');
    }
    for g in c.gates() {
        match g {
            Gate::PhaseExp { angle, paulis } => {
                let letters: String = paulis.iter().map(|(_, p)| p.as_char()).collect();
                let _ = write!(out, "PEXP({angle:?}) {letters}");
            }
            other => out.push_str(&other.kind()),
        }
        for w in g.wires() {
            let _ = write!(out, " {}", regs.qubit_ref(w));
        }
        out.push('\n');
    }
    out
}

fn parse_qubit(tok: &str) -> Option<QubitRef> {
    let (name, rest) = tok.split_once('[')?;
    let index = rest.strip_suffix(']')?.parse().ok()?;
    Some(QubitRef::new(name, index))
}

pub fn parse_circuit(text: &str) -> Result<Circuit> {
    let mut registers = Registers::new();
    let mut pending: Vec<(usize, Vec<&str>)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = trimmed.split_whitespace().collect();
        if toks[0] == "qreg" {
            if !pending.is_empty() {
                return Err(Error::Parse {
                    line,
                    message: "qreg declarations must precede gates".into(),
                });
            }
            let (name, width, ancilla) = match toks.as_slice() {
                [_, name, width] => (*name, *width, false),
                [_, name, width, "ancilla"] => (*name, *width, true),
                _ => {
                    return Err(Error::Parse {
                        line,
                        message: "expected `qreg <name> <width> [ancilla]`".into(),
                    })
                }
            };
            let width = width.parse().map_err(|_| Error::Parse {
                line,
                message: format!("bad register width `{width}`"),
            })?;
            registers
                .add(name, width, ancilla)
                .map_err(|e| Error::Parse {
                    line,
                    message: e.to_string(),
                })?;
        } else {
            pending.push((line, toks));
        }
    }

    let mut circuit = Circuit::new(registers);
    for (line, toks) in pending {
        let fail = |message: String| Error::Parse { line, message };
        let gate = parse_gate(&toks, circuit.registers()).map_err(|e| match e {
            Error::Parse { .. } => e,
            other => fail(other.to_string()),
        })?;
        circuit.push(gate).map_err(|e| fail(e.to_string()))?;
    }
    Ok(circuit)
}

fn parse_gate(toks: &[&str], regs: &Registers) -> Result<Gate> {
    let name = toks[0];
    let (letters, operand_toks) = if name.starts_with("PEXP(") {
        let letters = toks
            .get(1)
            .ok_or_else(|| Error::InvalidGate("PEXP needs a Pauli string".into()))?;
        (Some(*letters), &toks[2..])
    } else {
        (None, &toks[1..])
    };
    let wires = operand_toks
        .iter()
        .map(|t| {
            let q = parse_qubit(t).ok_or_else(|| Error::InvalidGate(format!("bad qubit `{t}`")))?;
            regs.resolve(&q)
        })
        .collect::<Result<Vec<usize>>>()?;
    let arity = |n: usize| -> Result<()> {
        if wires.len() == n {
            Ok(())
        } else {
            Err(Error::InvalidGate(format!(
                "{name} takes {n} qubits, got {}",
                wires.len()
            )))
        }
    };
    let gate = match name {
        "X" | "Y" | "Z" | "H" | "T" | "TDG" | "MEASURE" => {
            arity(1)?;
            let q = wires[0];
            match name {
                "X" => Gate::X(q),
                "Y" => Gate::Y(q),
                "Z" => Gate::Z(q),
                "H" => Gate::H(q),
                "T" => Gate::T(q),
                "TDG" => Gate::Tdg(q),
                _ => Gate::Measure(q),
            }
        }
        "CNOT" => {
            arity(2)?;
            Gate::Cnot {
                control: wires[0],
                target: wires[1],
            }
        }
        "CZ" => {
            arity(2)?;
            Gate::Cz(wires[0], wires[1])
        }
        "CCX" | "RCCX" => {
            arity(3)?;
            let controls = [wires[0], wires[1]];
            if name == "CCX" {
                Gate::Toffoli {
                    controls,
                    target: wires[2],
                }
            } else {
                Gate::Rccx {
                    controls,
                    target: wires[2],
                }
            }
        }
        _ if name.starts_with("PEXP(") => {
            let angle_text = name
                .strip_prefix("PEXP(")
                .and_then(|s| s.strip_suffix(')'))
                .ok_or_else(|| Error::InvalidGate(format!("bad rotation `{name}`")))?;
            let angle: f64 = angle_text
                .parse()
                .map_err(|_| Error::InvalidGate(format!("bad angle `{angle_text}`")))?;
            let string: PauliString = letters.unwrap_or_default().parse()?;
            arity(string.len())?;
            Gate::PhaseExp {
                angle,
                paulis: wires
                    .iter()
                    .copied()
                    .zip(string.0.iter().copied())
                    .collect::<Vec<(usize, Pauli)>>(),
            }
        }
        _ if name.starts_with("CZ") => {
            let k: usize = name[2..]
                .parse()
                .map_err(|_| Error::InvalidGate(format!("unknown gate `{name}`")))?;
            arity(k + 1)?;
            Gate::MultiCz {
                controls: wires[..k].to_vec(),
                target: wires[k],
            }
        }
        _ => return Err(Error::InvalidGate(format!("unknown gate `{name}`"))),
    };
    Ok(gate)
}
