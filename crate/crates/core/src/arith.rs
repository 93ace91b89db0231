//! Reversible arithmetic: the bitwise comparator, the ripple-carry adder with
//! carry-in, and the ones'-complement subtractor built on it.
//!
//! Layout wire lists are least significant bit first. The standalone
//! builders lay their registers out with index 0 as the most significant bit,
//! like every other register in the crate.

use crate::circuit::{Circuit, Gate, Registers};
use crate::error::{Error, Result};
use crate::lattice::GaugeGroup;

/// Wires of one in-place addition `y <- y + x + c0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdderLayout {
    /// Addend, least significant bit first. Restored on output.
    pub x: Vec<usize>,
    /// Accumulator, least significant bit first; receives the sum.
    pub y: Vec<usize>,
    /// Carry-in `c0`, restored on output.
    pub carry: usize,
    /// Overflow bit `h` of the `(n+1)`-bit sum. Must start in |0>.
    pub overflow: Option<usize>,
}

impl AdderLayout {
    pub fn width(&self) -> usize {
        self.x.len()
    }

    fn validate(&self) -> Result<()> {
        if self.x.is_empty() || self.x.len() != self.y.len() {
            return Err(Error::LayoutMismatch(format!(
                "adder needs equal non-zero widths, got x={} y={}",
                self.x.len(),
                self.y.len()
            )));
        }
        let mut all: Vec<usize> = self.x.iter().chain(&self.y).copied().collect();
        all.push(self.carry);
        all.extend(self.overflow);
        let mut sorted = all.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != all.len() {
            return Err(Error::LayoutMismatch("adder wires overlap".into()));
        }
        Ok(())
    }
}

/// `y_i <- y_i XOR x_i`. The result is zero iff `x == y`.
pub fn comparator_gates(x: &[usize], y: &[usize]) -> Result<Vec<Gate>> {
    if x.len() != y.len() {
        return Err(Error::LayoutMismatch(format!(
            "comparator widths differ: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    Ok(x.iter()
        .zip(y)
        .map(|(&c, &t)| Gate::Cnot {
            control: c,
            target: t,
        })
        .collect())
}

// Majority cell; leaves the outgoing carry on `a`.
fn maj(c: usize, b: usize, a: usize, out: &mut Vec<Gate>) {
    out.push(Gate::Cnot {
        control: a,
        target: b,
    });
    out.push(Gate::Cnot {
        control: a,
        target: c,
    });
    out.push(Gate::Rccx {
        controls: [c, b],
        target: a,
    });
}

// UnMajority-and-Add cell.
fn uma(c: usize, b: usize, a: usize, out: &mut Vec<Gate>) {
    out.push(Gate::Rccx {
        controls: [c, b],
        target: a,
    });
    out.push(Gate::Cnot {
        control: a,
        target: c,
    });
    out.push(Gate::Cnot {
        control: c,
        target: b,
    });
}

/// Ripple-carry network: a sweep of majority cells carries into the top
/// addend wire, the carry-out (if any) is copied to `h`, then unmajority
/// cells restore `x` and `c0` while writing the sum into `y`.
///
/// The Toffolis are relative-phase ones; each is undone by its partner in
/// the mirrored sweep, so the network is exact and costs `8n` T gates.
pub fn adder_gates(layout: &AdderLayout) -> Result<Vec<Gate>> {
    layout.validate()?;
    let n = layout.width();
    let (x, y) = (&layout.x, &layout.y);
    let prev = |i: usize| if i == 0 { layout.carry } else { x[i - 1] };
    let mut out = Vec::with_capacity(6 * n + 1);
    for i in 0..n {
        maj(prev(i), y[i], x[i], &mut out);
    }
    if let Some(h) = layout.overflow {
        out.push(Gate::Cnot {
            control: x[n - 1],
            target: h,
        });
    }
    for i in (0..n).rev() {
        uma(prev(i), y[i], x[i], &mut out);
    }
    Ok(out)
}

/// `S(a, b)`: with `a = layout.x` and `b = layout.y`, leaves
/// `(a - b - c0) mod 2^(n+1)` on `(h, b)` (or `mod 2^n` without `h`).
///
/// Uses `a - b = NOT(NOT(a) + b)`, except the overflow bit is not flipped
/// after the addition.
pub fn subtractor_gates(layout: &AdderLayout) -> Result<Vec<Gate>> {
    let add = adder_gates(layout)?;
    let mut out: Vec<Gate> = layout.x.iter().map(|&w| Gate::X(w)).collect();
    out.extend(add);
    out.extend(layout.x.iter().map(|&w| Gate::X(w)));
    out.extend(layout.y.iter().map(|&w| Gate::X(w)));
    Ok(out)
}

fn lsb_first(regs: &Registers, name: &str) -> Vec<usize> {
    let mut w = regs.wires_of(name).expect("register was just added");
    w.reverse();
    w
}

fn standalone(n: usize, group: GaugeGroup, x: &str, y: &str) -> Result<(Registers, AdderLayout)> {
    if n == 0 {
        return Err(Error::LayoutMismatch("width must be at least 1".into()));
    }
    let mut regs = Registers::new();
    let carry = regs.add("c0", 1, false)?[0];
    regs.add(x, n, false)?;
    regs.add(y, n, false)?;
    let overflow = if group.has_overflow() {
        Some(regs.add("h", 1, true)?[0])
    } else {
        None
    };
    let layout = AdderLayout {
        x: lsb_first(&regs, x),
        y: lsb_first(&regs, y),
        carry,
        overflow,
    };
    Ok((regs, layout))
}

/// The comparator on registers `y` then `x`, each `n` bits.
pub fn comparator(n: usize) -> Result<Circuit> {
    if n == 0 {
        return Err(Error::LayoutMismatch("width must be at least 1".into()));
    }
    let mut regs = Registers::new();
    let y = regs.add("y", n, false)?;
    let x = regs.add("x", n, false)?;
    let gates = comparator_gates(&x, &y)?;
    let mut c = Circuit::new(regs);
    c.extend(gates)?;
    Ok(c)
}

/// Standalone adder over registers `c0, x, y` and, for truncated U(1),
/// the overflow ancilla `h`.
pub fn adder(n: usize, group: GaugeGroup) -> Result<(Circuit, AdderLayout)> {
    let (regs, layout) = standalone(n, group, "x", "y")?;
    let mut c = Circuit::new(regs);
    c.extend(adder_gates(&layout)?)?;
    Ok((c, layout))
}

/// Standalone subtractor over registers `c0, a, b` and, for truncated
/// U(1), `h`.
pub fn subtractor(n: usize, group: GaugeGroup) -> Result<(Circuit, AdderLayout)> {
    let (regs, layout) = standalone(n, group, "a", "b")?;
    let mut c = Circuit::new(regs);
    c.extend(subtractor_gates(&layout)?)?;
    Ok((c, layout))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_validation() {
        let bad = AdderLayout {
            x: vec![0, 1],
            y: vec![2],
            carry: 3,
            overflow: None,
        };
        assert!(adder_gates(&bad).is_err());
        let overlap = AdderLayout {
            x: vec![0],
            y: vec![1],
            carry: 1,
            overflow: None,
        };
        assert!(adder_gates(&overlap).is_err());
        assert!(comparator_gates(&[0], &[1, 2]).is_err());
        assert!(adder(0, GaugeGroup::Z2n).is_err());
    }

    #[test]
    fn register_shapes() {
        let (c, l) = adder(3, GaugeGroup::TruncatedU1).unwrap();
        assert_eq!(c.num_wires(), 8);
        assert_eq!(l.x, vec![3, 2, 1]);
        assert_eq!(l.overflow, Some(7));
        let (c, l) = subtractor(2, GaugeGroup::Z2n).unwrap();
        assert_eq!(c.num_wires(), 5);
        assert!(l.overflow.is_none());
        assert_eq!(comparator(4).unwrap().len(), 4);
    }
}
