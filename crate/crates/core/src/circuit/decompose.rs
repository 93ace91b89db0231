//! Fixed decompositions into `{X, Y, Z, H, T, Tdg, CNOT, CZ, Measure}` and
//! the T-count report built on them.
//!
//! Pauli rotations (`PEXP`) are passed through untouched; they carry no T
//! count here.

use std::collections::BTreeMap;

use super::{Circuit, Gate};

/// Register that receives the clean work wires of multi-controlled Z
/// ladders.
pub const MCZ_ANCILLA: &str = "mcz_anc";

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DecomposeOptions {
    /// Leave `MultiCz` gates intact instead of expanding them.
    pub exclude_multicz: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ResourceReport {
    /// Gate counts of the fully decomposed circuit.
    pub counts: BTreeMap<String, usize>,
    pub t_count: usize,
    pub t_count_excluding_multicz: usize,
    /// Ancilla wires of the fully decomposed circuit, ladder wires included.
    pub ancilla_count: usize,
    pub wires: usize,
}

impl ResourceReport {
    pub fn count(&self, kind: &str) -> usize {
        self.counts.get(kind).copied().unwrap_or(0)
    }

    pub fn cnot_count(&self) -> usize {
        self.count("CNOT")
    }
}

fn toffoli_network(a: usize, b: usize, t: usize, out: &mut Vec<Gate>) {
    out.extend([
        Gate::H(t),
        Gate::Cnot {
            control: b,
            target: t,
        },
        Gate::Tdg(t),
        Gate::Cnot {
            control: a,
            target: t,
        },
        Gate::T(t),
        Gate::Cnot {
            control: b,
            target: t,
        },
        Gate::Tdg(t),
        Gate::Cnot {
            control: a,
            target: t,
        },
        Gate::T(b),
        Gate::T(t),
        Gate::H(t),
        Gate::Cnot {
            control: a,
            target: b,
        },
        Gate::T(a),
        Gate::Tdg(b),
        Gate::Cnot {
            control: a,
            target: b,
        },
    ]);
}

fn rccx_network(a: usize, b: usize, t: usize, out: &mut Vec<Gate>) {
    out.extend([
        Gate::H(t),
        Gate::T(t),
        Gate::Cnot {
            control: b,
            target: t,
        },
        Gate::Tdg(t),
        Gate::Cnot {
            control: a,
            target: t,
        },
        Gate::T(t),
        Gate::Cnot {
            control: b,
            target: t,
        },
        Gate::Tdg(t),
        Gate::H(t),
    ]);
}

fn expand(g: &Gate, opts: DecomposeOptions, anc: &[usize], out: &mut Vec<Gate>) {
    match g {
        Gate::Toffoli { controls, target } => {
            toffoli_network(controls[0], controls[1], *target, out)
        }
        Gate::Rccx { controls, target } => rccx_network(controls[0], controls[1], *target, out),
        Gate::MultiCz { controls, target } if !opts.exclude_multicz => match controls.as_slice() {
            [c] => out.push(Gate::Cz(*c, *target)),
            _ => {
                let k = controls.len();
                let mut ladder = Vec::with_capacity(k - 1);
                ladder.push((controls[0], controls[1], anc[0]));
                for i in 1..k - 1 {
                    ladder.push((anc[i - 1], controls[i + 1], anc[i]));
                }
                for &(a, b, t) in &ladder {
                    toffoli_network(a, b, t, out);
                }
                out.push(Gate::Cz(anc[k - 2], *target));
                for &(a, b, t) in ladder.iter().rev() {
                    toffoli_network(a, b, t, out);
                }
            }
        },
        other => out.push(other.clone()),
    }
}

/// Expands Toffoli, RCCX and (unless excluded) multi-controlled Z gates.
/// Ladders of `k` controls borrow `k - 1` clean wires from a shared ancilla
/// register appended to the table.
pub fn decompose(c: &Circuit, opts: DecomposeOptions) -> Circuit {
    let need = if opts.exclude_multicz {
        0
    } else {
        c.gates()
            .iter()
            .filter_map(|g| match g {
                Gate::MultiCz { controls, .. } => Some(controls.len() - 1),
                _ => None,
            })
            .max()
            .unwrap_or(0)
    };
    let mut registers = c.registers().clone();
    let anc = if need > 0 {
        let mut name = MCZ_ANCILLA.to_string();
        let mut k = 1;
        while registers.get(&name).is_some() {
            k += 1;
            name = format!("{MCZ_ANCILLA}{k}");
        }
        registers
            .add(&name, need, true)
            .expect("fresh ancilla register name")
    } else {
        Vec::new()
    };
    let mut gates = Vec::with_capacity(c.len());
    for g in c.gates() {
        expand(g, opts, &anc, &mut gates);
    }
    Circuit { registers, gates }
}

pub fn resources(c: &Circuit) -> ResourceReport {
    let full = decompose(c, DecomposeOptions::default());
    let partial = decompose(
        c,
        DecomposeOptions {
            exclude_multicz: true,
        },
    );
    let t = |c: &Circuit| c.gates().iter().filter(|g| g.is_t_like()).count();
    ResourceReport {
        counts: full.counts(),
        t_count: t(&full),
        t_count_excluding_multicz: t(&partial),
        ancilla_count: full.registers().ancilla_wires().len(),
        wires: full.num_wires(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Registers;

    fn circuit(width: usize, gates: Vec<Gate>) -> Circuit {
        let mut r = Registers::new();
        r.add("w", width, false).unwrap();
        let mut c = Circuit::new(r);
        c.extend(gates).unwrap();
        c
    }

    #[test]
    fn toffoli_costs_seven_t() {
        let c = circuit(
            3,
            vec![Gate::Toffoli {
                controls: [0, 1],
                target: 2,
            }],
        );
        let r = resources(&c);
        assert_eq!(r.t_count, 7);
        assert_eq!(r.count("H"), 2);
        assert_eq!(r.cnot_count(), 6);
        assert_eq!(r.count("CCX"), 0);
    }

    #[test]
    fn rccx_costs_four_t() {
        let c = circuit(
            3,
            vec![Gate::Rccx {
                controls: [0, 1],
                target: 2,
            }],
        );
        assert_eq!(resources(&c).t_count, 4);
    }

    #[test]
    fn cnot_is_already_basic() {
        let c = circuit(
            2,
            vec![Gate::Cnot {
                control: 0,
                target: 1,
            }],
        );
        assert_eq!(decompose(&c, DecomposeOptions::default()), c);
        assert_eq!(resources(&c).t_count, 0);
    }

    #[test]
    fn multicz_ladder_and_exclusion() {
        let g = Gate::MultiCz {
            controls: vec![0, 1, 2, 3],
            target: 4,
        };
        let c = circuit(5, vec![g.clone()]);
        let kept = decompose(
            &c,
            DecomposeOptions {
                exclude_multicz: true,
            },
        );
        assert_eq!(kept.gates(), &[g]);
        let r = resources(&c);
        assert_eq!(r.t_count_excluding_multicz, 0);
        assert_eq!(r.t_count, 7 * 2 * 3);
        assert_eq!(r.ancilla_count, 3);
        assert_eq!(r.count("CZ"), 1);

        let single = circuit(
            2,
            vec![Gate::MultiCz {
                controls: vec![0],
                target: 1,
            }],
        );
        assert_eq!(
            decompose(&single, DecomposeOptions::default()).gates(),
            &[Gate::Cz(0, 1)]
        );
    }

    #[test]
    fn empty_circuit_reports_zero() {
        let r = resources(&circuit(1, vec![]));
        assert!(r.counts.is_empty());
        assert_eq!(
            (r.t_count, r.t_count_excluding_multicz, r.ancilla_count),
            (0, 0, 0)
        );
    }

    #[test]
    fn ancilla_name_avoids_collisions() {
        let mut r = Registers::new();
        r.add("w", 3, false).unwrap();
        r.add(MCZ_ANCILLA, 1, true).unwrap();
        let mut c = Circuit::new(r);
        c.push(Gate::MultiCz {
            controls: vec![0, 1],
            target: 2,
        })
        .unwrap();
        let d = decompose(&c, DecomposeOptions::default());
        assert!(d.registers().get("mcz_anc2").is_some());
    }
}
