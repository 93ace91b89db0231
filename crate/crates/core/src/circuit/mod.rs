//! Gate-level circuit representation over named qubit registers.
//!
//! Gates address global wire indices; the [`Registers`] table maps each wire
//! back to a `name[i]` reference. Wire 0 is the first qubit of the first
//! register and is the most significant bit of a statevector index. Within a
//! register, index 0 is likewise the most significant bit of the register's
//! integer value.

mod decompose;
mod text;

use std::collections::BTreeMap;
use std::fmt;

pub use decompose::{decompose, resources, DecomposeOptions, ResourceReport, MCZ_ANCILLA};
pub use text::parse_circuit;

use crate::error::{Error, Result};
use crate::pauli::Pauli;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QubitRef {
    pub register: String,
    pub index: usize,
}

impl QubitRef {
    pub fn new(register: impl Into<String>, index: usize) -> Self {
        QubitRef {
            register: register.into(),
            index,
        }
    }
}

impl fmt::Display for QubitRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]", self.register, self.index)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Register {
    pub name: String,
    pub width: usize,
    /// Work wires that must start and end in |0>.
    pub ancilla: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Registers {
    regs: Vec<Register>,
    offsets: Vec<usize>,
    wires: usize,
}

impl Registers {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a register and returns its wires in index order.
    pub fn add(&mut self, name: &str, width: usize, ancilla: bool) -> Result<Vec<usize>> {
        if width == 0 {
            return Err(Error::InvalidGate(format!(
                "register `{name}` has zero width"
            )));
        }
        if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(Error::InvalidGate(format!("bad register name `{name}`")));
        }
        if let Some(existing) = self.get(name) {
            return Err(Error::RegisterConflict {
                name: name.to_string(),
                existing: existing.width,
                requested: width,
            });
        }
        let start = self.wires;
        self.regs.push(Register {
            name: name.to_string(),
            width,
            ancilla,
        });
        self.offsets.push(start);
        self.wires += width;
        Ok((start..start + width).collect())
    }

    pub fn get(&self, name: &str) -> Option<&Register> {
        self.regs.iter().find(|r| r.name == name)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Register> {
        self.regs.iter()
    }

    pub fn num_wires(&self) -> usize {
        self.wires
    }

    /// Wires of register `name`, most significant first.
    pub fn wires_of(&self, name: &str) -> Result<Vec<usize>> {
        let k = self
            .regs
            .iter()
            .position(|r| r.name == name)
            .ok_or_else(|| Error::UnknownRegister(name.to_string()))?;
        let start = self.offsets[k];
        Ok((start..start + self.regs[k].width).collect())
    }

    pub fn resolve(&self, q: &QubitRef) -> Result<usize> {
        let k = self
            .regs
            .iter()
            .position(|r| r.name == q.register)
            .ok_or_else(|| Error::UnknownRegister(q.register.clone()))?;
        let width = self.regs[k].width;
        if q.index >= width {
            return Err(Error::QubitOutOfRange {
                register: q.register.clone(),
                index: q.index,
                width,
            });
        }
        Ok(self.offsets[k] + q.index)
    }

    pub fn qubit_ref(&self, wire: usize) -> QubitRef {
        let k = self.offsets.partition_point(|&o| o <= wire) - 1;
        QubitRef::new(self.regs[k].name.clone(), wire - self.offsets[k])
    }

    pub fn is_ancilla(&self, wire: usize) -> bool {
        let k = self.offsets.partition_point(|&o| o <= wire) - 1;
        self.regs[k].ancilla
    }

    pub fn ancilla_wires(&self) -> Vec<usize> {
        (0..self.wires).filter(|&w| self.is_ancilla(w)).collect()
    }

    /// Merges `other` into a copy of `self` by register name. Returns the
    /// merged table and the wire map for `other`.
    pub fn merge(&self, other: &Registers) -> Result<(Registers, Vec<usize>)> {
        let mut merged = self.clone();
        let mut map = vec![0; other.wires];
        for (reg, &off) in other.regs.iter().zip(&other.offsets) {
            let wires = match merged.get(&reg.name) {
                Some(existing) if existing.width != reg.width => {
                    return Err(Error::RegisterConflict {
                        name: reg.name.clone(),
                        existing: existing.width,
                        requested: reg.width,
                    })
                }
                Some(_) => merged.wires_of(&reg.name)?,
                None => merged.add(&reg.name, reg.width, reg.ancilla)?,
            };
            for (i, w) in wires.into_iter().enumerate() {
                map[off + i] = w;
            }
        }
        Ok((merged, map))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    X(usize),
    Y(usize),
    Z(usize),
    H(usize),
    T(usize),
    Tdg(usize),
    Cnot {
        control: usize,
        target: usize,
    },
    Toffoli {
        controls: [usize; 2],
        target: usize,
    },
    /// Toffoli up to a relative phase, built from four T gates. On the
    /// controls `(1, 1)` it applies `Y` to the target instead of `X`, and on
    /// `(1, 0)` it applies `Z`. It is its own inverse, and the phases cancel
    /// whenever it is used as a compute/uncompute pair around wires it
    /// leaves unchanged.
    Rccx {
        controls: [usize; 2],
        target: usize,
    },
    Cz(usize, usize),
    /// Phase flip on the all-ones pattern of `controls` plus `target`.
    MultiCz {
        controls: Vec<usize>,
        target: usize,
    },
    /// `exp(-i * angle * P)` for the Pauli product `P`.
    PhaseExp {
        angle: f64,
        paulis: Vec<(usize, Pauli)>,
    },
    Measure(usize),
}

impl Gate {
    pub fn wires(&self) -> Vec<usize> {
        match self {
            Gate::X(q) | Gate::Y(q) | Gate::Z(q) | Gate::H(q) | Gate::T(q) | Gate::Tdg(q) => {
                vec![*q]
            }
            Gate::Measure(q) => vec![*q],
            Gate::Cnot { control, target } => vec![*control, *target],
            Gate::Toffoli { controls, target } | Gate::Rccx { controls, target } => {
                vec![controls[0], controls[1], *target]
            }
            Gate::Cz(a, b) => vec![*a, *b],
            Gate::MultiCz { controls, target } => {
                let mut w = controls.clone();
                w.push(*target);
                w
            }
            Gate::PhaseExp { paulis, .. } => paulis.iter().map(|(w, _)| *w).collect(),
        }
    }

    /// Kind name used in gate counts and the text format.
    pub fn kind(&self) -> String {
        match self {
            Gate::X(_) => "X".into(),
            Gate::Y(_) => "Y".into(),
            Gate::Z(_) => "Z".into(),
            Gate::H(_) => "H".into(),
            Gate::T(_) => "T".into(),
            Gate::Tdg(_) => "TDG".into(),
            Gate::Cnot { .. } => "CNOT".into(),
            Gate::Toffoli { .. } => "CCX".into(),
            Gate::Rccx { .. } => "RCCX".into(),
            Gate::Cz(..) => "CZ".into(),
            Gate::MultiCz { controls, .. } => format!("CZ{}", controls.len()),
            Gate::PhaseExp { .. } => "PEXP".into(),
            Gate::Measure(_) => "MEASURE".into(),
        }
    }

    pub fn is_t_like(&self) -> bool {
        matches!(self, Gate::T(_) | Gate::Tdg(_))
    }

    pub fn inverse(&self) -> Option<Gate> {
        Some(match self {
            Gate::T(q) => Gate::Tdg(*q),
            Gate::Tdg(q) => Gate::T(*q),
            Gate::PhaseExp { angle, paulis } => Gate::PhaseExp {
                angle: -angle,
                paulis: paulis.clone(),
            },
            Gate::Measure(_) => return None,
            g => g.clone(),
        })
    }

    fn validate(&self, num_wires: usize) -> Result<()> {
        let wires = self.wires();
        if let Gate::MultiCz { controls, .. } = self {
            if controls.is_empty() {
                return Err(Error::InvalidGate(
                    "multi-controlled Z needs a control".into(),
                ));
            }
        }
        if let Gate::PhaseExp { angle, paulis } = self {
            if paulis.is_empty() || paulis.iter().any(|(_, p)| *p == Pauli::I) {
                return Err(Error::InvalidGate(
                    "Pauli rotation needs a non-empty string without identities".into(),
                ));
            }
            if !angle.is_finite() {
                return Err(Error::InvalidGate(format!("non-finite angle {angle}")));
            }
        }
        for (k, &w) in wires.iter().enumerate() {
            if w >= num_wires {
                return Err(Error::InvalidGate(format!(
                    "{} addresses wire {w} of a {num_wires}-wire circuit",
                    self.kind()
                )));
            }
            if wires[..k].contains(&w) {
                return Err(Error::RepeatedOperand {
                    gate: self.kind(),
                    wire: w,
                });
            }
        }
        Ok(())
    }

    fn remap(&self, map: &[usize]) -> Gate {
        let m = |w: &usize| map[*w];
        match self {
            Gate::X(q) => Gate::X(m(q)),
            Gate::Y(q) => Gate::Y(m(q)),
            Gate::Z(q) => Gate::Z(m(q)),
            Gate::H(q) => Gate::H(m(q)),
            Gate::T(q) => Gate::T(m(q)),
            Gate::Tdg(q) => Gate::Tdg(m(q)),
            Gate::Measure(q) => Gate::Measure(m(q)),
            Gate::Cnot { control, target } => Gate::Cnot {
                control: m(control),
                target: m(target),
            },
            Gate::Toffoli { controls, target } => Gate::Toffoli {
                controls: [m(&controls[0]), m(&controls[1])],
                target: m(target),
            },
            Gate::Rccx { controls, target } => Gate::Rccx {
                controls: [m(&controls[0]), m(&controls[1])],
                target: m(target),
            },
            Gate::Cz(a, b) => Gate::Cz(m(a), m(b)),
            Gate::MultiCz { controls, target } => Gate::MultiCz {
                controls: controls.iter().map(m).collect(),
                target: m(target),
            },
            Gate::PhaseExp { angle, paulis } => Gate::PhaseExp {
                angle: *angle,
                paulis: paulis.iter().map(|(w, p)| (m(w), *p)).collect(),
            },
        }
    }
}

/// Phase flip on the all-ones pattern of `wires`: `Z` for one wire, a
/// (multi-)controlled Z otherwise.
pub fn all_ones_phase(wires: &[usize]) -> Gate {
    match wires {
        [] => panic!("phase flip needs at least one wire"),
        [w] => Gate::Z(*w),
        [rest @ .., target] => Gate::MultiCz {
            controls: rest.to_vec(),
            target: *target,
        },
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Circuit {
    registers: Registers,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(registers: Registers) -> Self {
        Circuit {
            registers,
            gates: Vec::new(),
        }
    }

    pub fn registers(&self) -> &Registers {
        &self.registers
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn num_wires(&self) -> usize {
        self.registers.num_wires()
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.validate(self.num_wires())?;
        self.gates.push(gate);
        Ok(())
    }

    pub fn extend<I: IntoIterator<Item = Gate>>(&mut self, gates: I) -> Result<()> {
        gates.into_iter().try_for_each(|g| self.push(g))
    }

    /// Appends `other`, which must be defined over the same register table.
    pub fn append(&mut self, other: &Circuit) -> Result<()> {
        if other.registers != self.registers {
            return Err(Error::RegisterMismatch);
        }
        self.gates.extend_from_slice(&other.gates);
        Ok(())
    }

    pub fn counts(&self) -> BTreeMap<String, usize> {
        let mut counts = BTreeMap::new();
        for g in &self.gates {
            *counts.entry(g.kind()).or_insert(0) += 1;
        }
        counts
    }

    pub fn has_measurement(&self) -> bool {
        self.gates.iter().any(|g| matches!(g, Gate::Measure(_)))
    }
}

/// Gate list of `a` followed by `b`, with register tables merged by name.
pub fn compose(a: &Circuit, b: &Circuit) -> Result<Circuit> {
    let (registers, map) = a.registers.merge(&b.registers)?;
    let mut gates = a.gates.clone();
    gates.extend(b.gates.iter().map(|g| g.remap(&map)));
    Ok(Circuit { registers, gates })
}

/// Reversed gate list with every gate inverted.
pub fn inverse(c: &Circuit) -> Result<Circuit> {
    let gates = c
        .gates
        .iter()
        .rev()
        .map(|g| g.inverse().ok_or(Error::NotInvertible))
        .collect::<Result<Vec<_>>>()?;
    Ok(Circuit {
        registers: c.registers.clone(),
        gates,
    })
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&text::print_circuit(self))
    }
}

impl std::str::FromStr for Circuit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_circuit(s)
    }
}
