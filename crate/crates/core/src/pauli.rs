//! Pauli strings and real-weighted Pauli terms.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    fn anticommutes(self, other: Pauli) -> bool {
        self != Pauli::I && other != Pauli::I && self != other
    }
}

/// Action of a Pauli string on computational basis states: `P|b> =
/// i^i_power * (-1)^popcount(b & sign) |b ^ flip>`.
///
/// Wire `w` of a `width`-wire register lives at bit `width - 1 - w`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PauliMasks {
    pub flip: u64,
    pub sign: u64,
    pub i_power: u8,
}

impl PauliMasks {
    pub fn from_sparse(ops: &[(usize, Pauli)], width: usize) -> Self {
        let mut m = PauliMasks {
            flip: 0,
            sign: 0,
            i_power: 0,
        };
        for &(wire, p) in ops {
            let bit = 1u64 << (width - 1 - wire);
            match p {
                Pauli::I => {}
                Pauli::X => m.flip |= bit,
                Pauli::Y => {
                    m.flip |= bit;
                    m.sign |= bit;
                    m.i_power = (m.i_power + 1) % 4;
                }
                Pauli::Z => m.sign |= bit,
            }
        }
        m
    }

    /// Phase picked up by input basis state `b`.
    #[inline]
    pub fn phase(&self, b: u64) -> Complex64 {
        let k = (self.i_power as u32 + 2 * ((b & self.sign).count_ones() & 1)) % 4;
        I_POWERS[k as usize]
    }
}

pub(crate) const I_POWERS: [Complex64; 4] = [
    Complex64::new(1.0, 0.0),
    Complex64::new(0.0, 1.0),
    Complex64::new(-1.0, 0.0),
    Complex64::new(0.0, -1.0),
];

/// Dense Pauli string, one letter per wire.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString(pub Vec<Pauli>);

impl PauliString {
    pub fn identity(width: usize) -> Self {
        PauliString(vec![Pauli::I; width])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().all(|&p| p == Pauli::I)
    }

    pub fn is_diagonal(&self) -> bool {
        self.0.iter().all(|&p| matches!(p, Pauli::I | Pauli::Z))
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        self.0
            .iter()
            .zip(&other.0)
            .filter(|(a, b)| a.anticommutes(**b))
            .count()
            % 2
            == 0
    }

    /// Non-identity letters with their wire positions.
    pub fn support(&self) -> Vec<(usize, Pauli)> {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &p)| p != Pauli::I)
            .map(|(w, &p)| (w, p))
            .collect()
    }

    /// Places this string on `wires` of a `width`-wire register.
    pub fn embed(&self, wires: &[usize], width: usize) -> PauliString {
        assert_eq!(
            wires.len(),
            self.len(),
            "embedding needs one wire per letter"
        );
        let mut out = vec![Pauli::I; width];
        for (&w, &p) in wires.iter().zip(&self.0) {
            out[w] = p;
        }
        PauliString(out)
    }

    pub fn masks(&self) -> PauliMasks {
        PauliMasks::from_sparse(&self.support(), self.len())
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.iter().try_for_each(|p| write!(f, "{}", p.as_char()))
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| {
                Pauli::from_char(c)
                    .ok_or_else(|| Error::InvalidGate(format!("bad Pauli letter `{c}`")))
            })
            .collect::<Result<Vec<_>>>()
            .map(PauliString)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PauliTerm {
    pub coeff: f64,
    pub string: PauliString,
}

impl PauliTerm {
    pub fn new(coeff: f64, string: PauliString) -> Self {
        PauliTerm { coeff, string }
    }
}

impl fmt::Display for PauliTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:+} {}", self.coeff, self.string)
    }
}

/// Projects a Hermitian `2^width x 2^width` row-major matrix onto the Pauli
/// basis. Strings come out in lexicographic order with wire 0 as the leading
/// letter and `I < X < Y < Z`. Coefficients below `tol` are dropped.
pub fn pauli_decompose(matrix: &[Complex64], width: usize, tol: f64) -> Result<Vec<PauliTerm>> {
    let dim = 1usize << width;
    if matrix.len() != dim * dim {
        return Err(Error::LayoutMismatch(format!(
            "matrix has {} entries, expected {}",
            matrix.len(),
            dim * dim
        )));
    }
    let mut terms = Vec::new();
    for code in 0..(1usize << (2 * width)) {
        let string = PauliString(
            (0..width)
                .map(|w| Pauli::ALL[(code >> (2 * (width - 1 - w))) & 3])
                .collect(),
        );
        let m = string.masks();
        // Tr(P M) = sum_c phase(c) M[c, c ^ flip]
        let trace: Complex64 = (0..dim as u64)
            .map(|c| m.phase(c) * matrix[c as usize * dim + (c ^ m.flip) as usize])
            .sum();
        let coeff = trace / dim as f64;
        if coeff.norm() <= tol {
            continue;
        }
        if coeff.im.abs() > tol {
            return Err(Error::InvalidGate(format!(
                "matrix is not Hermitian: coefficient of {string} is {coeff}"
            )));
        }
        terms.push(PauliTerm::new(coeff.re, string));
    }
    Ok(terms)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn commutation() {
        let a: PauliString = "XXX".parse().unwrap();
        let b: PauliString = "XYY".parse().unwrap();
        let c: PauliString = "ZII".parse().unwrap();
        assert!(a.commutes_with(&b));
        assert!(!a.commutes_with(&c));
        assert!(c.commutes_with(&c));
    }

    #[test]
    fn masks_match_single_qubit_matrices() {
        // Y|0> = i|1>, Y|1> = -i|0>, Z|1> = -|1>
        let y = PauliMasks::from_sparse(&[(0, Pauli::Y)], 1);
        assert_eq!(y.flip, 1);
        assert_eq!(y.phase(0), Complex64::new(0.0, 1.0));
        assert_eq!(y.phase(1), Complex64::new(0.0, -1.0));
        let z = PauliMasks::from_sparse(&[(0, Pauli::Z)], 1);
        assert_eq!(z.phase(1), Complex64::new(-1.0, 0.0));
        // wire 0 is the most significant bit
        let x0 = PauliMasks::from_sparse(&[(0, Pauli::X)], 3);
        assert_eq!(x0.flip, 0b100);
    }

    #[test]
    fn decompose_zz_plus_x() {
        // 0.5 ZZ + 0.25 XI
        let mut m = vec![Complex64::new(0.0, 0.0); 16];
        for b in 0..4usize {
            let s = if (b >> 1 & 1) ^ (b & 1) == 1 {
                -0.5
            } else {
                0.5
            };
            m[b * 4 + b] += s;
            m[b * 4 + (b ^ 2)] += 0.25;
        }
        let terms = pauli_decompose(&m, 2, 1e-14).unwrap();
        let got: Vec<(String, f64)> = terms
            .iter()
            .map(|t| (t.string.to_string(), t.coeff))
            .collect();
        assert_eq!(got, vec![("XI".to_string(), 0.25), ("ZZ".to_string(), 0.5)]);
    }

    #[test]
    fn decompose_rejects_non_hermitian() {
        let mut m = vec![Complex64::new(0.0, 0.0); 4];
        m[1] = Complex64::new(1.0, 0.0);
        assert!(pauli_decompose(&m, 1, 1e-14).is_err());
    }
}
