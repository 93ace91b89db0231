//! Truncated-link Schwinger model on a periodic staggered chain: Pauli
//! Hamiltonian, first-order Trotter steps and Gauss-law leakage.
//!
//! Conventions, fixed here and nowhere else:
//!
//! * `sigma^- = |1><0|` raises the occupation of a matter wire and
//!   `sigma^+` is its adjoint.
//! * `U = sum_m |m+1><m|` on the `n` link wires (MSB first), truncated at
//!   the top label.
//! * The hopping block on `[matter s, link s, matter s+1]` is
//!   `sigma^- (x) U (x) sigma^+ + h.c.`.
//! * Wires are ordered `psi0, link0, psi1, link1, ...`.
//! * The staggered Gauss operator at site `s` is
//!   `E(s) - E(s-1) - (n(s) - [s odd])`.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::circuit::{Circuit, Gate, Registers};
use crate::error::{Error, Result};
use crate::lattice::default_e_min;
use crate::pauli::{pauli_decompose, PauliMasks, PauliString, PauliTerm};
use crate::sim::{StateVector, MAX_STATEVECTOR_WIRES};

/// Largest link width for which the local hopping block is decomposed.
pub const MAX_HOPPING_BITS: u32 = 4;

const DECOMPOSE_TOL: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct SchwingerSpec {
    pub n_ph: usize,
    pub bits: u32,
    pub x: f64,
    pub mu: f64,
    pub e_min: i64,
}

impl SchwingerSpec {
    pub fn new(n_ph: usize, bits: u32, x: f64, mu: f64) -> Result<Self> {
        if n_ph == 0 {
            return Err(Error::OutOfRange {
                what: "physical sites",
                value: 0,
                min: 1,
                max: i64::MAX,
            });
        }
        if bits == 0 || bits > MAX_HOPPING_BITS {
            return Err(Error::OutOfRange {
                what: "bits per link",
                value: bits as i64,
                min: 1,
                max: MAX_HOPPING_BITS as i64,
            });
        }
        let spec = SchwingerSpec {
            n_ph,
            bits,
            x,
            mu,
            e_min: default_e_min(bits),
        };
        if spec.num_wires() > MAX_STATEVECTOR_WIRES {
            return Err(Error::TooManyWires {
                wires: spec.num_wires(),
                limit: MAX_STATEVECTOR_WIRES,
            });
        }
        Ok(spec)
    }

    pub fn with_e_min(mut self, e_min: i64) -> Self {
        self.e_min = e_min;
        self
    }

    /// Staggered sites, two per physical site.
    pub fn num_sites(&self) -> usize {
        2 * self.n_ph
    }

    pub fn num_wires(&self) -> usize {
        self.num_sites() * (self.bits as usize + 1)
    }

    pub fn matter_wire(&self, s: usize) -> usize {
        s * (self.bits as usize + 1)
    }

    /// Wires of the link leaving `s` towards `s + 1`, MSB first.
    pub fn link_wires(&self, s: usize) -> Vec<usize> {
        let base = self.matter_wire(s) + 1;
        (base..base + self.bits as usize).collect()
    }

    pub fn next_site(&self, s: usize) -> usize {
        (s + 1) % self.num_sites()
    }

    pub fn prev_site(&self, s: usize) -> usize {
        (s + self.num_sites() - 1) % self.num_sites()
    }

    pub fn registers(&self) -> Registers {
        let mut regs = Registers::new();
        for s in 0..self.num_sites() {
            regs.add(&format!("psi{s}"), 1, false)
                .expect("fresh register names");
            regs.add(&format!("link{s}"), self.bits as usize, false)
                .expect("fresh register names");
        }
        regs
    }

    /// Field value `E(s)` of the link leaving `s` in basis state `index`.
    pub fn field(&self, index: u64, s: usize) -> i64 {
        let m = self.num_wires();
        let label = self
            .link_wires(s)
            .iter()
            .fold(0u64, |acc, &w| acc << 1 | (index >> (m - 1 - w) & 1));
        label as i64 + self.e_min
    }

    pub fn occupation(&self, index: u64, s: usize) -> i64 {
        (index >> (self.num_wires() - 1 - self.matter_wire(s)) & 1) as i64
    }

    pub fn staggered_charge(&self, index: u64, s: usize) -> i64 {
        self.occupation(index, s) - (s % 2) as i64
    }

    pub fn gauss(&self, index: u64, s: usize) -> i64 {
        self.field(index, s)
            - self.field(index, self.prev_site(s))
            - self.staggered_charge(index, s)
    }

    pub fn is_physical(&self, index: u64) -> bool {
        (0..self.num_sites()).all(|s| self.gauss(index, s) == 0)
    }

    /// Zero flux everywhere, odd sites filled.
    pub fn vacuum_index(&self) -> Result<u64> {
        if self.e_min > 0 || self.e_min + self.modulus() <= 0 {
            return Err(Error::Unsupported(format!(
                "E = 0 is not representable with E_min = {}",
                self.e_min
            )));
        }
        let m = self.num_wires();
        let zero = (-self.e_min) as u64;
        let mut index = 0u64;
        for s in 0..self.num_sites() {
            if s % 2 == 1 {
                index |= 1 << (m - 1 - self.matter_wire(s));
            }
            for (k, &w) in self.link_wires(s).iter().enumerate() {
                let bit = zero >> (self.bits as usize - 1 - k) & 1;
                index |= bit << (m - 1 - w);
            }
        }
        Ok(index)
    }

    pub fn vacuum(&self) -> Result<StateVector> {
        StateVector::basis(self.registers(), self.vacuum_index()?)
    }

    fn modulus(&self) -> i64 {
        1i64 << self.bits
    }
}

/// Order in which the local hopping strings of one site are applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TrotterOrdering {
    /// Sorted with the last wire as the leading letter, `I < X < Y < Z`.
    #[default]
    ReverseLexicographic,
    /// Sorted with the first wire as the leading letter.
    Lexicographic,
}

impl TrotterOrdering {
    pub fn tag(self) -> &'static str {
        match self {
            TrotterOrdering::ReverseLexicographic => "revlex",
            TrotterOrdering::Lexicographic => "lex",
        }
    }

    fn sort(self, terms: &mut [PauliTerm]) {
        match self {
            TrotterOrdering::Lexicographic => terms.sort_by(|a, b| a.string.cmp(&b.string)),
            TrotterOrdering::ReverseLexicographic => {
                terms.sort_by(|a, b| a.string.0.iter().rev().cmp(b.string.0.iter().rev()))
            }
        }
    }
}

impl fmt::Display for TrotterOrdering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for TrotterOrdering {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "revlex" => Ok(TrotterOrdering::ReverseLexicographic),
            "lex" => Ok(TrotterOrdering::Lexicographic),
            _ => Err(Error::Unsupported(format!(
                "unknown Trotter ordering `{s}` (expected revlex or lex)"
            ))),
        }
    }
}

/// Dense row-major `sigma^- (x) U (x) sigma^+ + h.c.` on `bits + 2` wires.
pub fn hopping_matrix(bits: u32) -> Vec<Complex64> {
    let n = bits as usize;
    let dim = 1usize << (n + 2);
    let top = (1usize << n) - 1;
    let mut m = vec![Complex64::new(0.0, 0.0); dim * dim];
    // |1, l+1, 0> <0, l, 1| and its transpose
    for l in 0..top {
        let col = (l << 1) | 1;
        let row = (1 << (n + 1)) | ((l + 1) << 1);
        m[row * dim + col] = Complex64::new(1.0, 0.0);
        m[col * dim + row] = Complex64::new(1.0, 0.0);
    }
    m
}

/// Pauli expansion of the hopping block on its own `bits + 2` wires.
pub fn local_hopping(bits: u32, ordering: TrotterOrdering) -> Result<Vec<PauliTerm>> {
    if bits == 0 || bits > MAX_HOPPING_BITS {
        return Err(Error::OutOfRange {
            what: "bits per link",
            value: bits as i64,
            min: 1,
            max: MAX_HOPPING_BITS as i64,
        });
    }
    let mut terms = pauli_decompose(&hopping_matrix(bits), bits as usize + 2, DECOMPOSE_TOL)?;
    ordering.sort(&mut terms);
    Ok(terms)
}

fn hopping_wires(spec: &SchwingerSpec, s: usize) -> Vec<usize> {
    let mut wires = vec![spec.matter_wire(s)];
    wires.extend(spec.link_wires(s));
    wires.push(spec.matter_wire(spec.next_site(s)));
    wires
}

/// Hopping between `s` and `s + 1`, embedded in the full chain and without
/// the coupling `x`.
pub fn decompose_hopping(spec: &SchwingerSpec, s: usize) -> Result<Vec<PauliTerm>> {
    if s >= spec.num_sites() {
        return Err(Error::OutOfRange {
            what: "staggered site",
            value: s as i64,
            min: 0,
            max: spec.num_sites() as i64 - 1,
        });
    }
    let wires = hopping_wires(spec, s);
    Ok(local_hopping(spec.bits, TrotterOrdering::default())?
        .into_iter()
        .map(|t| PauliTerm::new(t.coeff, t.string.embed(&wires, spec.num_wires())))
        .collect())
}

/// Electric terms for every link, then mass terms, then hopping site by
/// site. Identity strings are kept so the list sums to `H` exactly.
pub fn hamiltonian(spec: &SchwingerSpec, ordering: TrotterOrdering) -> Result<Vec<PauliTerm>> {
    let m = spec.num_wires();
    let n = spec.bits as usize;
    let mut terms = Vec::new();

    let dim = 1usize << n;
    let mut e2 = vec![Complex64::new(0.0, 0.0); dim * dim];
    for eps in 0..dim {
        let e = (eps as i64 + spec.e_min) as f64;
        e2[eps * dim + eps] = Complex64::new(e * e, 0.0);
    }
    let electric = pauli_decompose(&e2, n, DECOMPOSE_TOL)?;
    for s in 0..spec.num_sites() {
        let wires = spec.link_wires(s);
        terms.extend(
            electric
                .iter()
                .map(|t| PauliTerm::new(t.coeff, t.string.embed(&wires, m))),
        );
    }

    if spec.mu != 0.0 {
        for s in 0..spec.num_sites() {
            let sign = if s % 2 == 0 { 1.0 } else { -1.0 };
            let z: PauliString = "Z".parse().expect("valid letter");
            terms.push(PauliTerm::new(
                0.5 * spec.mu * sign,
                z.embed(&[spec.matter_wire(s)], m),
            ));
        }
    }

    if spec.x != 0.0 {
        let local = local_hopping(spec.bits, ordering)?;
        for s in 0..spec.num_sites() {
            let wires = hopping_wires(spec, s);
            terms.extend(
                local
                    .iter()
                    .map(|t| PauliTerm::new(spec.x * t.coeff, t.string.embed(&wires, m))),
            );
        }
    }
    Ok(terms)
}

pub fn build_hamiltonian(spec: &SchwingerSpec) -> Result<Vec<PauliTerm>> {
    hamiltonian(spec, TrotterOrdering::default())
}

/// `prod_j exp(-i dt c_j P_j)` in list order. Identity strings only
/// contribute a global phase and are skipped.
pub fn trotter_circuit(registers: Registers, terms: &[PauliTerm], dt: f64) -> Result<Circuit> {
    let mut c = Circuit::new(registers);
    for t in terms {
        if t.string.len() != c.num_wires() {
            return Err(Error::LayoutMismatch(format!(
                "term {} has {} letters for {} wires",
                t.string,
                t.string.len(),
                c.num_wires()
            )));
        }
        if t.string.is_identity() {
            continue;
        }
        c.push(Gate::PhaseExp {
            angle: dt * t.coeff,
            paulis: t.string.support(),
        })?;
    }
    Ok(c)
}

pub fn trotter_step(spec: &SchwingerSpec, dt: f64, ordering: TrotterOrdering) -> Result<Circuit> {
    trotter_circuit(spec.registers(), &hamiltonian(spec, ordering)?, dt)
}

/// Pauli sum stored as groups of terms sharing a flip mask, so matrix
/// elements can be read off without building the dense matrix.
#[derive(Debug, Clone)]
pub struct SparseHamiltonian {
    width: usize,
    groups: Vec<(u64, Vec<(f64, PauliMasks)>)>,
}

impl SparseHamiltonian {
    pub fn new(terms: &[PauliTerm], width: usize) -> Result<Self> {
        let mut groups: BTreeMap<u64, Vec<(f64, PauliMasks)>> = BTreeMap::new();
        for t in terms {
            if t.string.len() != width {
                return Err(Error::LayoutMismatch(format!(
                    "term {} has {} letters for {width} wires",
                    t.string,
                    t.string.len()
                )));
            }
            let masks = t.string.masks();
            groups.entry(masks.flip).or_default().push((t.coeff, masks));
        }
        Ok(SparseHamiltonian {
            width,
            groups: groups.into_iter().collect(),
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn dim(&self) -> usize {
        1 << self.width
    }

    /// Upper bound on the operator norm.
    pub fn norm_bound(&self) -> f64 {
        self.groups
            .iter()
            .flat_map(|(_, g)| g.iter().map(|(c, _)| c.abs()))
            .sum()
    }

    /// `<col ^ flip| H |col>` for one flip group.
    fn group_entry(group: &[(f64, PauliMasks)], col: u64) -> Complex64 {
        group.iter().map(|(c, m)| *c * m.phase(col)).sum()
    }

    pub fn entry(&self, row: u64, col: u64) -> Complex64 {
        let flip = row ^ col;
        self.groups
            .iter()
            .find(|(f, _)| *f == flip)
            .map_or(Complex64::new(0.0, 0.0), |(_, g)| Self::group_entry(g, col))
    }

    pub fn apply(&self, psi: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); psi.len()];
        for (flip, group) in &self.groups {
            for (b, a) in psi.iter().enumerate() {
                if *a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let b = b as u64;
                out[(b ^ flip) as usize] += Self::group_entry(group, b) * a;
            }
        }
        out
    }

    /// Largest `|H_ab - conj(H_ba)|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for (flip, group) in &self.groups {
            for b in 0..self.dim() as u64 {
                let forward = Self::group_entry(group, b);
                let back = Self::group_entry(group, b ^ flip);
                worst = worst.max((forward - back.conj()).norm());
            }
        }
        worst
    }

    /// Frobenius norm of `[D, H]` for the diagonal operator `D = diag(d)`.
    pub fn commutator_norm_with_diagonal(&self, d: &[f64]) -> f64 {
        assert_eq!(d.len(), self.dim(), "diagonal length must match dimension");
        let mut sum = 0.0;
        for (flip, group) in &self.groups {
            for b in 0..self.dim() {
                let row = b ^ *flip as usize;
                let gap = d[row] - d[b];
                if gap != 0.0 {
                    sum += gap * gap * Self::group_entry(group, b as u64).norm_sqr();
                }
            }
        }
        sum.sqrt()
    }
}

/// Frobenius norm of `[G_s, H]`, an upper bound on the operator norm.
pub fn gauss_commutator_norm(spec: &SchwingerSpec, s: usize) -> Result<f64> {
    let h = SparseHamiltonian::new(&build_hamiltonian(spec)?, spec.num_wires())?;
    let g: Vec<f64> = (0..h.dim() as u64)
        .map(|i| spec.gauss(i, s) as f64)
        .collect();
    Ok(h.commutator_norm_with_diagonal(&g))
}

/// `exp(-i t H) psi` by a Taylor series on substeps of norm at most 1/2.
pub fn exact_evolve(h: &SparseHamiltonian, psi: &StateVector, t: f64) -> Result<StateVector> {
    if psi.num_wires() != h.width() {
        return Err(Error::RegisterMismatch);
    }
    let bound = h.norm_bound() * t.abs();
    let substeps = (2.0 * bound).ceil().max(1.0) as usize;
    let dt = t / substeps as f64;
    let mut amps = psi.amplitudes().to_vec();
    for _ in 0..substeps {
        let mut term = amps.clone();
        let mut k = 1;
        loop {
            let hv = h.apply(&term);
            let scale = Complex64::new(0.0, -dt / k as f64);
            term = hv.into_iter().map(|a| a * scale).collect();
            let size: f64 = term.iter().map(|a| a.norm_sqr()).sum();
            for (a, d) in amps.iter_mut().zip(&term) {
                *a += d;
            }
            if size < 1e-36 || k > 200 {
                break;
            }
            k += 1;
        }
    }
    StateVector::from_amplitudes(psi.registers().clone(), amps)
}

/// Probability outside the globally physical subspace.
pub fn leakage(spec: &SchwingerSpec, psi: &StateVector) -> f64 {
    psi.expectation_projector(|i| !spec.is_physical(i))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeakageRow {
    pub dt: f64,
    pub steps: usize,
    pub leakage: f64,
}

/// Runs `steps` Trotter steps at every `dt` from a physical `initial`
/// state and records the leakage. Points run in parallel; the rows come
/// back in input order.
pub fn leakage_experiment(
    spec: &SchwingerSpec,
    dts: &[f64],
    steps: usize,
    ordering: TrotterOrdering,
    initial: &StateVector,
) -> Result<Vec<LeakageRow>> {
    if initial.registers() != &spec.registers() {
        return Err(Error::RegisterMismatch);
    }
    initial.check_normalized(1e-10)?;
    let start = leakage(spec, initial);
    if start > 1e-12 {
        return Err(Error::Unsupported(format!(
            "initial state is not physical (leakage {start:e})"
        )));
    }
    let terms = hamiltonian(spec, ordering)?;
    dts.par_iter()
        .map(|&dt| {
            let step = trotter_circuit(spec.registers(), &terms, dt)?;
            let mut psi = initial.clone();
            for _ in 0..steps {
                psi.apply_circuit(&step)?;
            }
            Ok(LeakageRow {
                dt,
                steps,
                leakage: leakage(spec, &psi),
            })
        })
        .collect()
}

pub fn write_csv<W: Write>(rows: &[LeakageRow], mut out: W) -> std::io::Result<()> {
    writeln!(out, "dt,steps,leakage")?;
    for r in rows {
        writeln!(out, "{:.16e},{},{:.16e}", r.dt, r.steps, r.leakage)?;
    }
    Ok(())
}

/// Least-squares `(slope, intercept)` of `ys` against `xs`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Option<(f64, f64)> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

/// Slope of `log leakage` against `log dt`, over rows with positive leakage.
pub fn log_log_slope(rows: &[LeakageRow]) -> Option<f64> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = rows
        .iter()
        .filter(|r| r.leakage > 0.0 && r.dt > 0.0)
        .map(|r| (r.dt.ln(), r.leakage.ln()))
        .unzip();
    linear_fit(&xs, &ys).map(|(s, _)| s)
}

/// `count` points spaced evenly in `log10` from `10^lo` to `10^hi`.
pub fn log_space(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![10f64.powf(lo)],
        _ => (0..count)
            .map(|i| 10f64.powf(lo + (hi - lo) * i as f64 / (count - 1) as f64))
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wire_layout() {
        let spec = SchwingerSpec::new(1, 2, 1.0, 0.5).unwrap();
        assert_eq!(spec.num_wires(), 6);
        assert_eq!(spec.matter_wire(1), 3);
        assert_eq!(spec.link_wires(1), vec![4, 5]);
        assert_eq!(spec.registers().num_wires(), 6);
        assert!(SchwingerSpec::new(5, 4, 1.0, 0.5).is_err());
    }

    #[test]
    fn vacuum_is_physical() {
        for (n_ph, bits) in [(1, 1), (1, 2), (2, 1), (2, 2), (3, 3)] {
            let spec = SchwingerSpec::new(n_ph, bits, 1.0, 0.5).unwrap();
            let v = spec.vacuum_index().unwrap();
            assert!(spec.is_physical(v));
            for s in 0..spec.num_sites() {
                assert_eq!(spec.field(v, s), 0);
            }
        }
    }

    #[test]
    fn orderings_are_permutations() {
        let a = local_hopping(2, TrotterOrdering::Lexicographic).unwrap();
        let mut b = local_hopping(2, TrotterOrdering::ReverseLexicographic).unwrap();
        assert_ne!(a, b);
        b.sort_by(|x, y| x.string.cmp(&y.string));
        assert_eq!(a, b);
    }

    #[test]
    fn fit_recovers_line() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys: Vec<f64> = xs.iter().map(|x| 2.5 * x - 1.0).collect();
        let (s, c) = linear_fit(&xs, &ys).unwrap();
        assert!((s - 2.5).abs() < 1e-12 && (c + 1.0).abs() < 1e-12);
        assert_eq!(log_space(-3.0, -1.0, 3), vec![1e-3, 1e-2, 1e-1]);
    }
}
