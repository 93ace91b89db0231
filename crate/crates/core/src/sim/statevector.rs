use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};
use std::fmt::Write;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use crate::circuit::{Circuit, Gate, Registers};
use crate::error::{Error, Result};
use crate::pauli::PauliMasks;

/// 2^26 amplitudes of 16 bytes is 1 GiB.
pub const MAX_STATEVECTOR_WIRES: usize = 26;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const MIN_LEN: usize = 1 << 12;

/// Dense state over a register table. Wire 0 is the most significant bit of
/// the amplitude index.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    registers: Registers,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// The all-zeros basis state.
    pub fn zero(registers: Registers) -> Result<Self> {
        Self::basis(registers, 0)
    }

    pub fn basis(registers: Registers, index: u64) -> Result<Self> {
        let m = registers.num_wires();
        check_width(m)?;
        if index >> m != 0 {
            return Err(Error::LayoutMismatch(format!(
                "basis index {index} needs more than {m} wires"
            )));
        }
        let mut amps = vec![ZERO; 1 << m];
        amps[index as usize] = Complex64::new(1.0, 0.0);
        Ok(StateVector { registers, amps })
    }

    /// Takes ownership of raw amplitudes; normalization is checked with
    /// [`StateVector::check_normalized`], not here.
    pub fn from_amplitudes(registers: Registers, amps: Vec<Complex64>) -> Result<Self> {
        let m = registers.num_wires();
        check_width(m)?;
        if amps.len() != 1 << m {
            return Err(Error::LayoutMismatch(format!(
                "{} amplitudes for {m} wires",
                amps.len()
            )));
        }
        Ok(StateVector { registers, amps })
    }

    pub fn registers(&self) -> &Registers {
        &self.registers
    }

    pub fn num_wires(&self) -> usize {
        self.registers.num_wires()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, index: u64) -> Complex64 {
        self.amps[index as usize]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn check_normalized(&self, tol: f64) -> Result<()> {
        let n = self.norm_sqr();
        if (n - 1.0).abs() > tol {
            return Err(Error::NotNormalized(n));
        }
        Ok(())
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.registers != other.registers {
            return Err(Error::RegisterMismatch);
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `|<self|other>|^2`.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    fn bit(&self, wire: usize) -> usize {
        1 << (self.num_wires() - 1 - wire)
    }

    pub fn apply_circuit(&mut self, c: &Circuit) -> Result<()> {
        if c.registers() != &self.registers {
            return Err(Error::RegisterMismatch);
        }
        for g in c.gates() {
            self.apply_gate(g)?;
        }
        Ok(())
    }

    pub fn apply_gate(&mut self, g: &Gate) -> Result<()> {
        let m = self.num_wires();
        if let Some(&w) = g.wires().iter().find(|&&w| w >= m) {
            return Err(Error::InvalidGate(format!(
                "{} addresses wire {w} of a {m}-wire state",
                g.kind()
            )));
        }
        let bit = move |w: usize| 1usize << (m - 1 - w);
        match g {
            Gate::X(t) => pairs(&mut self.amps, bit(*t), |_, a, b| std::mem::swap(a, b)),
            Gate::Y(t) => pairs(&mut self.amps, bit(*t), |_, a, b| apply_y(a, b)),
            Gate::Z(t) => {
                let mask = bit(*t);
                diagonal(&mut self.amps, |i, a| {
                    if i & mask != 0 {
                        *a = -*a
                    }
                })
            }
            Gate::H(t) => pairs(&mut self.amps, bit(*t), |_, a, b| {
                let (x, y) = (*a, *b);
                *a = (x + y) * FRAC_1_SQRT_2;
                *b = (x - y) * FRAC_1_SQRT_2;
            }),
            Gate::T(t) | Gate::Tdg(t) => {
                let mask = bit(*t);
                let sign = if matches!(g, Gate::T(_)) { 1.0 } else { -1.0 };
                let w = Complex64::from_polar(1.0, sign * FRAC_PI_4);
                diagonal(&mut self.amps, |i, a| {
                    if i & mask != 0 {
                        *a *= w
                    }
                })
            }
            Gate::Cnot { control, target } => {
                let c = bit(*control);
                pairs(&mut self.amps, bit(*target), |i, a, b| {
                    if i & c == c {
                        std::mem::swap(a, b)
                    }
                })
            }
            Gate::Toffoli { controls, target } => {
                let c = bit(controls[0]) | bit(controls[1]);
                pairs(&mut self.amps, bit(*target), |i, a, b| {
                    if i & c == c {
                        std::mem::swap(a, b)
                    }
                })
            }
            Gate::Rccx { controls, target } => {
                let (c0, c1) = (bit(controls[0]), bit(controls[1]));
                pairs(&mut self.amps, bit(*target), |i, a, b| {
                    if i & c0 != 0 {
                        if i & c1 != 0 {
                            apply_y(a, b)
                        } else {
                            *b = -*b
                        }
                    }
                })
            }
            Gate::Cz(..) | Gate::MultiCz { .. } => {
                let mask = g.wires().into_iter().fold(0, |acc, w| acc | bit(w));
                diagonal(&mut self.amps, |i, a| {
                    if i & mask == mask {
                        *a = -*a
                    }
                })
            }
            Gate::PhaseExp { angle, paulis } => {
                let masks = PauliMasks::from_sparse(paulis, m);
                let (cos, sin) = (angle.cos(), angle.sin());
                let minus_i_sin = Complex64::new(0.0, -sin);
                if masks.flip == 0 {
                    // diagonal string: eigenvalue +-1 per basis state
                    let plus = Complex64::new(cos, -sin);
                    let minus = Complex64::new(cos, sin);
                    diagonal(&mut self.amps, |i, a| {
                        *a *= if masks.phase(i as u64).re > 0.0 {
                            plus
                        } else {
                            minus
                        }
                    })
                } else {
                    pairs(&mut self.amps, masks.flip as usize, |i, a, b| {
                        let j = i ^ masks.flip as usize;
                        let (x, y) = (*a, *b);
                        *a = x * cos + minus_i_sin * masks.phase(j as u64) * y;
                        *b = y * cos + minus_i_sin * masks.phase(i as u64) * x;
                    })
                }
            }
            Gate::Measure(_) => {
                return Err(Error::Unsupported(
                    "measurement inside a unitary circuit; use StateVector::measure".into(),
                ))
            }
        }
        Ok(())
    }

    /// Probability of reading `value` on `wire`.
    pub fn probability(&self, wire: usize, value: bool) -> f64 {
        let mask = self.bit(wire);
        self.amps
            .iter()
            .enumerate()
            .filter(|(i, _)| (i & mask != 0) == value)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    /// Projects `wire` onto `value` and renormalizes.
    pub fn project(&self, wire: usize, value: bool) -> Result<StateVector> {
        let p = self.probability(wire, value);
        if p <= 0.0 {
            return Err(Error::ZeroProbability);
        }
        let scale = 1.0 / p.sqrt();
        let mask = self.bit(wire);
        let mut out = self.clone();
        out.amps
            .par_iter_mut()
            .enumerate()
            .with_min_len(MIN_LEN)
            .for_each(|(i, a)| {
                if (i & mask != 0) == value {
                    *a *= scale
                } else {
                    *a = ZERO
                }
            });
        Ok(out)
    }

    /// Born-rule measurement of `wire` in the Z basis.
    pub fn measure<R: Rng + ?Sized>(
        &self,
        wire: usize,
        rng: &mut R,
    ) -> Result<(bool, StateVector)> {
        self.check_normalized(1e-10)?;
        let p1 = self.probability(wire, true);
        let outcome = rng.random::<f64>() < p1;
        Ok((outcome, self.project(wire, outcome)?))
    }

    /// Total probability of the basis labels accepted by `pred`.
    pub fn expectation_projector<F: Fn(u64) -> bool>(&self, pred: F) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .filter(|(i, _)| pred(*i as u64))
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    /// One line per amplitude above `1e-14` in modulus:
    /// `<index in binary> <re> <im>`.
    pub fn dump(&self) -> String {
        let m = self.num_wires();
        let mut out = String::new();
        for (i, a) in self.amps.iter().enumerate() {
            if a.norm() > 1e-14 {
                let _ = writeln!(out, "{i:0m$b} {:.16e} {:.16e}", a.re, a.im);
            }
        }
        out
    }
}

fn check_width(m: usize) -> Result<()> {
    if m > MAX_STATEVECTOR_WIRES {
        return Err(Error::TooManyWires {
            wires: m,
            limit: MAX_STATEVECTOR_WIRES,
        });
    }
    Ok(())
}

fn apply_y(a: &mut Complex64, b: &mut Complex64) {
    let (x, y) = (*a, *b);
    *a = Complex64::new(y.im, -y.re);
    *b = Complex64::new(-x.im, x.re);
}

fn diagonal<F>(amps: &mut [Complex64], f: F)
where
    F: Fn(usize, &mut Complex64) + Sync,
{
    amps.par_iter_mut()
        .enumerate()
        .with_min_len(MIN_LEN)
        .for_each(|(i, a)| f(i, a));
}

/// Visits every pair `(i, i ^ flip)` once, with `i` the member whose
/// highest flipped bit is clear. Each amplitude is written by exactly one
/// call, so the result does not depend on the thread count.
fn pairs<F>(amps: &mut [Complex64], flip: usize, f: F)
where
    F: Fn(usize, &mut Complex64, &mut Complex64) + Sync,
{
    debug_assert!(flip != 0);
    let pivot = 1usize << (usize::BITS - 1 - flip.leading_zeros());
    let low = flip ^ pivot;
    // j -> j ^ low stays inside aligned blocks of this size
    let block = if low == 0 {
        1
    } else {
        2usize << (usize::BITS - 1 - low.leading_zeros())
    };
    let outer_min = (MIN_LEN / (2 * pivot)).max(1);
    let inner_min = (MIN_LEN / block).max(1);
    amps.par_chunks_mut(2 * pivot)
        .enumerate()
        .with_min_len(outer_min)
        .for_each(|(ci, chunk)| {
            let (lo, hi) = chunk.split_at_mut(pivot);
            lo.par_chunks_mut(block)
                .zip(hi.par_chunks_mut(block))
                .enumerate()
                .with_min_len(inner_min)
                .for_each(|(bi, (lb, hb))| {
                    let base = ci * 2 * pivot + bi * block;
                    for j in 0..lb.len() {
                        f(base + j, &mut lb[j], &mut hb[j ^ low]);
                    }
                });
        });
}

/// Applies `c` to `psi`.
pub fn apply(c: &Circuit, mut psi: StateVector) -> Result<StateVector> {
    psi.apply_circuit(c)?;
    Ok(psi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::Pauli;
    use rand::SeedableRng;

    fn regs(m: usize) -> Registers {
        let mut r = Registers::new();
        r.add("q", m, false).unwrap();
        r
    }

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-14
    }

    #[test]
    fn hadamard_on_zero() {
        let mut s = StateVector::zero(regs(1)).unwrap();
        s.apply_gate(&Gate::H(0)).unwrap();
        assert!(close(s.amplitude(0), Complex64::new(FRAC_1_SQRT_2, 0.0)));
        assert!(close(s.amplitude(1), Complex64::new(FRAC_1_SQRT_2, 0.0)));
    }

    #[test]
    fn cnot_top_wire_is_control() {
        let mut s = StateVector::basis(regs(2), 0b10).unwrap();
        s.apply_gate(&Gate::Cnot {
            control: 0,
            target: 1,
        })
        .unwrap();
        assert_eq!(s.amplitude(0b11), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn zz_rotation_phase() {
        let t = 0.37;
        let mut s = StateVector::basis(regs(2), 0b01).unwrap();
        s.apply_gate(&Gate::PhaseExp {
            angle: t,
            paulis: vec![(0, Pauli::Z), (1, Pauli::Z)],
        })
        .unwrap();
        assert!(close(s.amplitude(0b01), Complex64::from_polar(1.0, t)));
    }

    #[test]
    fn non_adjacent_flip_pairs() {
        // XIX rotation mixes |000> and |101> only
        let t = 0.2;
        let mut s = StateVector::zero(regs(3)).unwrap();
        s.apply_gate(&Gate::PhaseExp {
            angle: t,
            paulis: vec![(0, Pauli::X), (2, Pauli::X)],
        })
        .unwrap();
        assert!(close(s.amplitude(0), Complex64::new(t.cos(), 0.0)));
        assert!(close(s.amplitude(0b101), Complex64::new(0.0, -t.sin())));
    }

    #[test]
    fn measurement_is_reproducible_and_rejects_zero_branch() {
        let mut s = StateVector::zero(regs(2)).unwrap();
        s.apply_gate(&Gate::H(1)).unwrap();
        assert!((s.probability(1, true) - 0.5).abs() < 1e-15);
        let draw = |seed| {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            (0..16)
                .map(|_| s.measure(1, &mut rng).unwrap().0)
                .collect::<Vec<_>>()
        };
        assert_eq!(draw(7), draw(7));
        assert_eq!(s.project(0, true), Err(Error::ZeroProbability));
        let (bit, post) = s
            .measure(0, &mut rand_chacha::ChaCha8Rng::seed_from_u64(1))
            .unwrap();
        assert!(!bit);
        assert_eq!(post, s);
    }

    #[test]
    fn dump_lists_nonzero_amplitudes() {
        let mut s = StateVector::zero(regs(2)).unwrap();
        s.apply_gate(&Gate::X(1)).unwrap();
        assert_eq!(s.dump(), "01 1.0000000000000000e0 0.0000000000000000e0\n");
    }

    #[test]
    fn width_limit() {
        assert!(matches!(
            StateVector::zero(regs(27)),
            Err(Error::TooManyWires { wires: 27, .. })
        ));
    }

    #[test]
    fn measure_gate_is_rejected_by_apply() {
        let mut s = StateVector::zero(regs(1)).unwrap();
        assert!(s.apply_gate(&Gate::Measure(0)).is_err());
    }
}
