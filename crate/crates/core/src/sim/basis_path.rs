use std::collections::HashMap;
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};
use std::fmt;

use num_complex::Complex64;

use crate::circuit::{Circuit, Gate, Registers};
use crate::error::{Error, Result};
use crate::pauli::{PauliMasks, I_POWERS};

/// A classical assignment of every wire. Wire 0 is the most significant bit
/// when converted to an index.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisState {
    words: Vec<u64>,
    len: usize,
}

impl BasisState {
    pub fn zeros(len: usize) -> Self {
        BasisState {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    /// State whose big-endian index over `len` wires is `index`.
    pub fn from_index(index: u64, len: usize) -> Self {
        let mut b = Self::zeros(len);
        for w in 0..len.min(64) {
            b.set(len - 1 - w, index >> w & 1 == 1);
        }
        b
    }

    /// Big-endian index; only defined for at most 64 wires.
    pub fn to_index(&self) -> u64 {
        assert!(self.len <= 64, "index of a {}-wire state", self.len);
        (0..self.len).fold(0, |acc, w| acc << 1 | self.get(w) as u64)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, wire: usize) -> bool {
        self.words[wire / 64] >> (wire % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, wire: usize, value: bool) {
        let mask = 1u64 << (wire % 64);
        if value {
            self.words[wire / 64] |= mask;
        } else {
            self.words[wire / 64] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, wire: usize) {
        self.words[wire / 64] ^= 1u64 << (wire % 64);
    }

    /// Writes `value` into register `name`, index 0 receiving the top bit.
    pub fn set_register(&mut self, regs: &Registers, name: &str, value: u64) -> Result<()> {
        let wires = regs.wires_of(name)?;
        if wires.len() < 64 && value >> wires.len() != 0 {
            return Err(Error::OutOfRange {
                what: "register value",
                value: value as i64,
                min: 0,
                max: (1i64 << wires.len()) - 1,
            });
        }
        let k = wires.len();
        for (i, w) in wires.into_iter().enumerate() {
            self.set(w, value >> (k - 1 - i) & 1 == 1);
        }
        Ok(())
    }

    pub fn register(&self, regs: &Registers, name: &str) -> Result<u64> {
        Ok(regs
            .wires_of(name)?
            .into_iter()
            .fold(0, |acc, w| acc << 1 | self.get(w) as u64))
    }

    /// Fails with the first wire of an ancilla register that is not |0>.
    pub fn check_clean(&self, regs: &Registers) -> Result<()> {
        match regs.ancilla_wires().into_iter().find(|&w| self.get(w)) {
            Some(w) => Err(Error::DirtyAncilla(w)),
            None => Ok(()),
        }
    }
}

impl fmt::Display for BasisState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        (0..self.len).try_for_each(|w| f.write_str(if self.get(w) { "1" } else { "0" }))
    }
}

/// A power of `i`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const MINUS_ONE: Phase = Phase(2);

    pub fn i_power(self) -> u8 {
        self.0
    }

    pub fn to_complex(self) -> Complex64 {
        I_POWERS[self.0 as usize]
    }

    /// `Some(+1 | -1)` for real phases.
    pub fn sign(self) -> Option<i8> {
        match self.0 {
            0 => Some(1),
            2 => Some(-1),
            _ => None,
        }
    }

    fn add(&mut self, k: u8) {
        self.0 = (self.0 + k) % 4;
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(["+1", "+i", "-1", "-i"][self.0 as usize])
    }
}

fn all_set(b: &BasisState, wires: &[usize]) -> bool {
    wires.iter().all(|&w| b.get(w))
}

/// Applies one permutation-with-phase gate in place.
fn step(g: &Gate, b: &mut BasisState, phase: &mut Phase) -> Result<()> {
    match g {
        Gate::X(t) => b.flip(*t),
        Gate::Y(t) => {
            phase.add(if b.get(*t) { 3 } else { 1 });
            b.flip(*t);
        }
        Gate::Z(t) => {
            if b.get(*t) {
                phase.add(2)
            }
        }
        Gate::Cnot { control, target } => {
            if b.get(*control) {
                b.flip(*target)
            }
        }
        Gate::Toffoli { controls, target } => {
            if all_set(b, controls) {
                b.flip(*target)
            }
        }
        Gate::Rccx { controls, target } => match (b.get(controls[0]), b.get(controls[1])) {
            (true, true) => {
                phase.add(if b.get(*target) { 3 } else { 1 });
                b.flip(*target);
            }
            (true, false) if b.get(*target) => phase.add(2),
            _ => {}
        },
        Gate::Cz(x, y) => {
            if b.get(*x) && b.get(*y) {
                phase.add(2)
            }
        }
        Gate::MultiCz { controls, target } => {
            if b.get(*target) && all_set(b, controls) {
                phase.add(2)
            }
        }
        Gate::Measure(_) => {}
        Gate::H(_) | Gate::T(_) | Gate::Tdg(_) | Gate::PhaseExp { .. } => {
            return Err(Error::NonClassicalGate(g.kind()))
        }
    }
    Ok(())
}

fn check_len(c: &Circuit, input: &BasisState) -> Result<()> {
    if input.len() != c.num_wires() {
        return Err(Error::LayoutMismatch(format!(
            "{}-bit state for a {}-wire circuit",
            input.len(),
            c.num_wires()
        )));
    }
    Ok(())
}

/// Runs a permutation-with-phase circuit on one basis state.
///
/// Supported gates are X, Y, Z, CNOT, CCX, RCCX, CZ and multi-controlled Z.
/// Measurements leave a basis state unchanged and are skipped. Anything
/// else is rejected.
pub fn run_basis_path(c: &Circuit, input: &BasisState) -> Result<(BasisState, Phase)> {
    check_len(c, input)?;
    let mut b = input.clone();
    let mut phase = Phase::ONE;
    for g in c.gates() {
        step(g, &mut b, &mut phase)?;
    }
    Ok((b, phase))
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Sparse simulation from one basis state. Branches are created by H and
/// non-diagonal Pauli rotations, merged when they land on the same label,
/// and dropped once their modulus falls below `1e-13`. Fails when more than
/// `max_branches` labels are live. Output is sorted by label.
pub fn run_path_sum(
    c: &Circuit,
    input: &BasisState,
    max_branches: usize,
) -> Result<Vec<(BasisState, Complex64)>> {
    check_len(c, input)?;
    let mut state: Vec<(BasisState, Complex64)> = vec![(input.clone(), Complex64::new(1.0, 0.0))];
    for g in c.gates() {
        match g {
            Gate::H(t) => {
                let mut next = HashMap::with_capacity(state.len() * 2);
                for (b, a) in state {
                    let s = if b.get(*t) {
                        -FRAC_1_SQRT_2
                    } else {
                        FRAC_1_SQRT_2
                    };
                    let mut other = b.clone();
                    other.flip(*t);
                    *next.entry(other).or_insert(ZERO) += a * FRAC_1_SQRT_2;
                    *next.entry(b).or_insert(ZERO) += a * s;
                }
                state = prune(next, max_branches)?;
            }
            Gate::T(t) | Gate::Tdg(t) => {
                let sign = if matches!(g, Gate::T(_)) { 1.0 } else { -1.0 };
                let w = Complex64::from_polar(1.0, sign * FRAC_PI_4);
                for (b, a) in state.iter_mut() {
                    if b.get(*t) {
                        *a *= w
                    }
                }
            }
            Gate::PhaseExp { angle, paulis } => {
                let (cos, sin) = (angle.cos(), angle.sin());
                // masks over the operand wires only
                let local: Vec<(usize, _)> = paulis
                    .iter()
                    .enumerate()
                    .map(|(k, &(_, p))| (k, p))
                    .collect();
                let masks = PauliMasks::from_sparse(&local, paulis.len());
                let mut next = HashMap::with_capacity(state.len() * 2);
                for (b, a) in state {
                    let bits = paulis
                        .iter()
                        .fold(0u64, |acc, &(w, _)| acc << 1 | b.get(w) as u64);
                    let mut image = b.clone();
                    for (k, &(w, _)) in paulis.iter().enumerate() {
                        if masks.flip >> (paulis.len() - 1 - k) & 1 == 1 {
                            image.flip(w);
                        }
                    }
                    let p = masks.phase(bits);
                    *next.entry(b).or_insert(ZERO) += a * cos;
                    *next.entry(image).or_insert(ZERO) += a * p * Complex64::new(0.0, -sin);
                }
                state = prune(next, max_branches)?;
            }
            other => {
                // a permutation keeps labels distinct
                for (b, a) in state.iter_mut() {
                    let mut phase = Phase::ONE;
                    step(other, b, &mut phase)?;
                    *a *= phase.to_complex();
                }
            }
        }
    }
    state.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(state)
}

fn prune(
    state: HashMap<BasisState, Complex64>,
    max_branches: usize,
) -> Result<Vec<(BasisState, Complex64)>> {
    let kept: Vec<_> = state
        .into_iter()
        .filter(|(_, a)| a.norm() > 1e-13)
        .collect();
    if kept.len() > max_branches {
        return Err(Error::TooManyBranches(max_branches));
    }
    Ok(kept)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circuit(m: usize, gates: Vec<Gate>) -> Circuit {
        let mut r = Registers::new();
        r.add("w", m, false).unwrap();
        let mut c = Circuit::new(r);
        c.extend(gates).unwrap();
        c
    }

    #[test]
    fn x_on_last_wire() {
        let c = circuit(3, vec![Gate::X(2)]);
        let (out, phase) = run_basis_path(&c, &BasisState::zeros(3)).unwrap();
        assert_eq!(out.to_index(), 0b001);
        assert_eq!(phase, Phase::ONE);
    }

    #[test]
    fn multicz_on_all_ones() {
        let c = circuit(
            3,
            vec![Gate::MultiCz {
                controls: vec![0, 1],
                target: 2,
            }],
        );
        let (_, phase) = run_basis_path(&c, &BasisState::from_index(7, 3)).unwrap();
        assert_eq!(phase, Phase::MINUS_ONE);
        let (_, phase) = run_basis_path(&c, &BasisState::from_index(6, 3)).unwrap();
        assert_eq!(phase, Phase::ONE);
    }

    #[test]
    fn rejects_hadamard() {
        let c = circuit(1, vec![Gate::H(0)]);
        assert!(matches!(
            run_basis_path(&c, &BasisState::zeros(1)),
            Err(Error::NonClassicalGate(_))
        ));
    }

    #[test]
    fn index_round_trip_and_registers() {
        let b = BasisState::from_index(0b1011_0110, 8);
        assert_eq!(b.to_index(), 0b1011_0110);
        assert_eq!(b.to_string(), "10110110");
        let mut r = Registers::new();
        r.add("a", 3, false).unwrap();
        r.add("b", 2, true).unwrap();
        let mut s = BasisState::zeros(5);
        s.set_register(&r, "a", 0b110).unwrap();
        assert_eq!(s.to_index(), 0b11000);
        assert_eq!(s.register(&r, "a").unwrap(), 6);
        assert!(s.check_clean(&r).is_ok());
        s.set_register(&r, "b", 1).unwrap();
        assert_eq!(s.check_clean(&r), Err(Error::DirtyAncilla(4)));
        assert!(s.set_register(&r, "b", 4).is_err());
    }

    #[test]
    fn wide_states() {
        let mut b = BasisState::zeros(130);
        b.flip(129);
        b.flip(64);
        assert!(b.get(129) && b.get(64) && !b.get(63));
    }

    #[test]
    fn path_sum_interference() {
        // H Z H = X
        let c = circuit(1, vec![Gate::H(0), Gate::Z(0), Gate::H(0)]);
        let out = run_path_sum(&c, &BasisState::zeros(1), 4).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].0.to_index(), 1);
        assert!((out[0].1 - Complex64::new(1.0, 0.0)).norm() < 1e-15);

        let wide = circuit(3, vec![Gate::H(0), Gate::H(1), Gate::H(2)]);
        assert_eq!(
            run_path_sum(&wide, &BasisState::zeros(3), 4),
            Err(Error::TooManyBranches(4))
        );
    }
}
