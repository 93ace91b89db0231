//! Gauss-law oracle circuits and the query-bit protocol around them.
//!
//! Every oracle follows the same pattern: reversible arithmetic maps the
//! site's quantum numbers onto a set of result wires that are all ones
//! exactly when the constraint holds, a multi-controlled Z marks that
//! pattern, and the arithmetic is uncomputed.
//!
//! * 1D with matter: `c0 <- p`, then `S(eps_out, eps_in)` leaves
//!   `eps_out - eps_in - p` on `(h, eps_in)`. The constraint holds when this
//!   equals `-nu`, so the result is flipped when `nu = 0`.
//! * 1D pure gauge: a bitwise comparison of the two links.
//! * 2D: the outgoing fluxes plus `nu` and the incoming fluxes plus `p` are
//!   summed by two adders and the sums compared bitwise.
//! * 3D: each side uses two adder stages. The carry wire is loaded from
//!   `nu1` for the first stage, reset, and loaded from `nu2` for the second
//!   (`p1`, `p2` on the incoming side).
//!
//! For the truncated U(1) group the sums keep their overflow bits; for
//! `Z_{2^n}` they are dropped and all arithmetic is modulo `2^n`.

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use crate::arith::{adder_gates, comparator_gates, subtractor_gates, AdderLayout};
use crate::circuit::{all_ones_phase, inverse, Circuit, Gate, Registers};
use crate::error::{Error, Result};
use crate::lattice::{gauss_value, FermionSpec, LatticeSpec, SiteEnvironment};
use crate::sim::{run_path_sum, BasisState, StateVector};

/// Largest environment size accepted by [`check_exhaustive`].
pub const MAX_EXHAUSTIVE_BITS: usize = 22;

const AXES: [&str; 3] = ["x", "y", "z"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Matter {
    PureGauge,
    Dirac,
}

impl Matter {
    pub fn of(spec: &LatticeSpec) -> Result<Matter> {
        if spec.fermions.is_empty() {
            Ok(Matter::PureGauge)
        } else if spec.fermions == FermionSpec::dirac(spec.dim) {
            Ok(Matter::Dirac)
        } else {
            Err(Error::Unsupported(
                "matter content other than none or one Dirac species".into(),
            ))
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            Matter::PureGauge => "none",
            Matter::Dirac => "dirac",
        }
    }
}

/// Where a site's quantum numbers and the work wires live in an oracle
/// circuit.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleLayout {
    spec: LatticeSpec,
    site: usize,
    registers: Registers,
    eps_out: Vec<String>,
    eps_in: Vec<String>,
    occ: Vec<usize>,
    query: usize,
}

impl OracleLayout {
    pub fn spec(&self) -> &LatticeSpec {
        &self.spec
    }

    pub fn site(&self) -> usize {
        self.site
    }

    pub fn registers(&self) -> &Registers {
        &self.registers
    }

    pub fn query(&self) -> usize {
        self.query
    }

    /// Link and occupation wires that enter the constraint.
    pub fn environment_wires(&self) -> Vec<usize> {
        let mut w = Vec::new();
        for name in self.eps_out.iter().chain(&self.eps_in) {
            w.extend(self.registers.wires_of(name).expect("layout register"));
        }
        w.extend(&self.occ);
        w
    }

    /// Basis state holding `env`, the given query bit, and clean work wires.
    pub fn encode(&self, env: &SiteEnvironment, query: bool) -> Result<BasisState> {
        env.validate(&self.spec)?;
        let mut b = BasisState::zeros(self.registers.num_wires());
        for (name, &eps) in self.eps_out.iter().zip(&env.eps_out) {
            b.set_register(&self.registers, name, eps as u64)?;
        }
        for (name, &eps) in self.eps_in.iter().zip(&env.eps_in) {
            b.set_register(&self.registers, name, eps as u64)?;
        }
        for (&w, &n) in self.occ.iter().zip(&env.occ) {
            b.set(w, n);
        }
        b.set(self.query, query);
        Ok(b)
    }

    pub fn decode(&self, b: &BasisState) -> Result<SiteEnvironment> {
        let read = |name: &String| b.register(&self.registers, name).map(|v| v as u32);
        Ok(SiteEnvironment {
            eps_out: self.eps_out.iter().map(read).collect::<Result<_>>()?,
            eps_in: self.eps_in.iter().map(read).collect::<Result<_>>()?,
            occ: self.occ.iter().map(|&w| b.get(w)).collect(),
        })
    }
}

/// The compute half of an oracle.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleParts {
    /// Arithmetic and flips; all of `result` is one iff the site is physical.
    pub compute: Vec<Gate>,
    pub result: Vec<usize>,
    /// Length of the arithmetic prefix of `compute`, before the final
    /// comparison and flips.
    pub arithmetic_len: usize,
    /// Wires holding the arithmetic output after that prefix, most
    /// significant first: the subtractor output in 1D, the incoming-side sum
    /// in 2D and 3D.
    pub arithmetic_result: Vec<usize>,
}

fn lsb_first(wires: &[usize]) -> Vec<usize> {
    wires.iter().rev().copied().collect()
}

fn cnot(control: usize, target: usize) -> Gate {
    Gate::Cnot { control, target }
}

struct Side {
    links: Vec<Vec<usize>>,
    carry: usize,
    overflow: Vec<usize>,
    pad: Option<usize>,
    occ: Vec<usize>,
}

impl Side {
    /// Sums the side's links (plus occupations through the carry) into the
    /// first link register. Returns the sum wires, most significant first.
    fn sum(&self, gates: &mut Vec<Gate>) -> Result<Vec<usize>> {
        let first = &self.links[0];
        match self.links.len() {
            2 => {
                if let Some(&o) = self.occ.first() {
                    gates.push(cnot(o, self.carry));
                }
                gates.extend(adder_gates(&AdderLayout {
                    x: lsb_first(&self.links[1]),
                    y: lsb_first(first),
                    carry: self.carry,
                    overflow: self.overflow.first().copied(),
                })?);
                Ok(self.overflow.iter().chain(first).copied().collect())
            }
            3 => {
                if let Some(&o) = self.occ.first() {
                    gates.push(cnot(o, self.carry));
                }
                // overflow[0] is the top bit, written by the second stage
                let h1 = self.overflow.get(1).copied();
                gates.extend(adder_gates(&AdderLayout {
                    x: lsb_first(&self.links[1]),
                    y: lsb_first(first),
                    carry: self.carry,
                    overflow: h1,
                })?);
                if let [o1, o2] = self.occ[..] {
                    gates.push(cnot(o1, self.carry));
                    gates.push(cnot(o2, self.carry));
                }
                let mut x = lsb_first(&self.links[2]);
                let mut y = lsb_first(first);
                x.extend(self.pad);
                y.extend(h1);
                gates.extend(adder_gates(&AdderLayout {
                    x,
                    y,
                    carry: self.carry,
                    overflow: self.overflow.first().copied(),
                })?);
                Ok(self.overflow.iter().chain(first).copied().collect())
            }
            k => unreachable!("{k} links per side"),
        }
    }
}

fn tag(spec: &LatticeSpec) -> &'static str {
    match spec.dim {
        1 => "fig3",
        2 => "fig5",
        _ => "fig6",
    }
}

/// Lays out registers and builds the compute half of the oracle for site
/// `site` of `spec`.
pub fn oracle_parts(spec: &LatticeSpec, site: usize) -> Result<(OracleLayout, OracleParts)> {
    if !(1..=3).contains(&spec.dim) {
        return Err(Error::Unsupported(format!("dimension {}", spec.dim)));
    }
    if site >= spec.num_sites() {
        return Err(Error::OutOfRange {
            what: "site index",
            value: site as i64,
            min: 0,
            max: spec.num_sites() as i64 - 1,
        });
    }
    let matter = Matter::of(spec)?;
    let dirac = matter == Matter::Dirac;
    let n = spec.bits as usize;
    let u1 = spec.group.has_overflow();
    let dim = spec.dim;

    let mut regs = Registers::new();
    let link_name = |dir: &str, axis: usize| {
        if dim == 1 {
            format!("eps_{dir}")
        } else {
            format!("eps_{dir}_{}", AXES[axis])
        }
    };
    let eps_out: Vec<String> = (0..dim).map(|i| link_name("out", i)).collect();
    let eps_in: Vec<String> = (0..dim).map(|i| link_name("in", i)).collect();
    let mut out_wires = Vec::new();
    let mut in_wires = Vec::new();
    for name in &eps_out {
        out_wires.push(regs.add(name, n, false)?);
    }
    for name in &eps_in {
        in_wires.push(regs.add(name, n, false)?);
    }
    let per_side = if dim == 3 { 2 } else { 1 };
    let (nu, p) = if dirac {
        (
            regs.add("nu", per_side, false)?,
            regs.add("p", per_side, false)?,
        )
    } else {
        (Vec::new(), Vec::new())
    };
    let occ: Vec<usize> = nu.iter().chain(&p).copied().collect();

    let mut compute = Vec::new();
    let arithmetic_len;
    let arithmetic_result;
    let result;
    if dim == 1 {
        if dirac {
            let c0 = regs.add("c0", 1, true)?[0];
            let h = if u1 {
                Some(regs.add("h", 1, true)?[0])
            } else {
                None
            };
            compute.push(cnot(p[0], c0));
            compute.extend(subtractor_gates(&AdderLayout {
                x: lsb_first(&out_wires[0]),
                y: lsb_first(&in_wires[0]),
                carry: c0,
                overflow: h,
            })?);
            let r: Vec<usize> = h.iter().chain(&in_wires[0]).copied().collect();
            arithmetic_len = compute.len();
            arithmetic_result = r.clone();
            // flip the result when nu = 0
            compute.push(Gate::X(nu[0]));
            compute.extend(r.iter().map(|&w| cnot(nu[0], w)));
            compute.push(Gate::X(nu[0]));
            result = r;
        } else {
            compute.extend(comparator_gates(&out_wires[0], &in_wires[0])?);
            arithmetic_len = compute.len();
            arithmetic_result = in_wires[0].clone();
            compute.extend(in_wires[0].iter().map(|&w| Gate::X(w)));
            result = in_wires[0].clone();
        }
    } else {
        let c0_out = regs.add("c0_out", 1, true)?[0];
        let c0_in = regs.add("c0_in", 1, true)?[0];
        let h_width = if dim == 3 { 2 } else { 1 };
        let (h_out, h_in) = if u1 {
            (
                regs.add("h_out", h_width, true)?,
                regs.add("h_in", h_width, true)?,
            )
        } else {
            (Vec::new(), Vec::new())
        };
        let pad = if dim == 3 && u1 {
            regs.add("pad", 2, true)?
        } else {
            Vec::new()
        };
        let out_side = Side {
            links: out_wires,
            carry: c0_out,
            overflow: h_out,
            pad: pad.first().copied(),
            occ: nu,
        };
        let in_side = Side {
            links: in_wires,
            carry: c0_in,
            overflow: h_in,
            pad: pad.get(1).copied(),
            occ: p,
        };
        let sum_out = out_side.sum(&mut compute)?;
        let sum_in = in_side.sum(&mut compute)?;
        arithmetic_len = compute.len();
        arithmetic_result = sum_in.clone();
        compute.extend(comparator_gates(&sum_out, &sum_in)?);
        compute.extend(sum_in.iter().map(|&w| Gate::X(w)));
        result = sum_in;
    }
    let query = regs.add("q", 1, false)?[0];

    let layout = OracleLayout {
        spec: spec.clone(),
        site,
        registers: regs,
        eps_out,
        eps_in,
        occ,
        query,
    };
    Ok((
        layout,
        OracleParts {
            compute,
            result,
            arithmetic_len,
            arithmetic_result,
        },
    ))
}

fn sandwich(layout: &OracleLayout, parts: &OracleParts, phase: Gate) -> Result<Circuit> {
    let mut c = Circuit::new(layout.registers.clone());
    c.extend(parts.compute.iter().cloned())?;
    let mut compute = Circuit::new(layout.registers.clone());
    compute.extend(parts.compute.iter().cloned())?;
    c.push(phase)?;
    c.append(&inverse(&compute)?)?;
    Ok(c)
}

/// The bare oracle `O_s`: phase `(-1)^{F_s}` on every basis state. The
/// query wire is present in the register table but untouched.
pub fn build_oracle(spec: &LatticeSpec, site: usize) -> Result<(Circuit, OracleLayout)> {
    let (layout, parts) = oracle_parts(spec, site)?;
    let c = sandwich(&layout, &parts, all_ones_phase(&parts.result))?;
    Ok((c, layout))
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleQuery {
    pub circuit: Circuit,
    pub layout: OracleLayout,
}

impl OracleQuery {
    /// Short description such as `fig5 dirac u1 n=2 site=0`.
    pub fn describe(&self) -> String {
        let spec = self.layout.spec();
        format!(
            "{} {} {} n={} site={}",
            tag(spec),
            Matter::of(spec).map(Matter::tag).unwrap_or("?"),
            spec.group,
            spec.bits,
            self.layout.site()
        )
    }

    /// Circuit text with a provenance header and the final measurement of
    /// the query wire.
    pub fn export(&self) -> String {
        let mut c = self.circuit.clone();
        c.push(Gate::Measure(self.layout.query()))
            .expect("query wire is in range");
        format!(
            "# gauss-oracle query circuit: {}\n# wires: {}\n{}",
            self.describe(),
            c.num_wires(),
            c
        )
    }
}

/// `H(q)`, oracle with `q` among the phase controls, `H(q)`. On a basis
/// environment the query wire ends up flipped iff the site is physical.
pub fn build_query(spec: &LatticeSpec, site: usize) -> Result<OracleQuery> {
    let (layout, parts) = oracle_parts(spec, site)?;
    let q = layout.query();
    let mut marked = parts.result.clone();
    marked.push(q);
    let core = sandwich(&layout, &parts, all_ones_phase(&marked))?;
    let mut circuit = Circuit::new(layout.registers.clone());
    circuit.push(Gate::H(q))?;
    circuit.append(&core)?;
    circuit.push(Gate::H(q))?;
    Ok(OracleQuery { circuit, layout })
}

/// What a query did to one basis state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QueryOutcome {
    /// Exactly one output label with unit amplitude.
    pub deterministic: bool,
    pub flipped: bool,
    /// Every wire other than the query wire equals its input value.
    pub restored: bool,
    pub amplitude: Complex64,
}

/// Runs `circuit` (a query, possibly with extra gates in front) on `input`.
pub fn query_outcome(
    circuit: &Circuit,
    layout: &OracleLayout,
    input: &BasisState,
) -> Result<QueryOutcome> {
    let out = run_path_sum(circuit, input, 64)?;
    let q = layout.query();
    let (label, amplitude) = match out.as_slice() {
        [(label, a)] => (label.clone(), *a),
        _ => {
            return Ok(QueryOutcome {
                deterministic: false,
                flipped: false,
                restored: false,
                amplitude: Complex64::new(0.0, 0.0),
            })
        }
    };
    let flipped = label.get(q) != input.get(q);
    let mut expected = input.clone();
    expected.set(q, label.get(q));
    Ok(QueryOutcome {
        deterministic: (amplitude - 1.0).norm() < 1e-9,
        flipped,
        restored: label == expected,
        amplitude,
    })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ExhaustiveReport {
    pub environments: u64,
    pub physical: u64,
    /// Environments times the two query-bit inputs.
    pub cases: u64,
    pub correct: u64,
    pub restored: u64,
}

impl ExhaustiveReport {
    pub fn all_pass(&self) -> bool {
        self.correct == self.cases && self.restored == self.cases
    }

    fn merge(mut self, other: ExhaustiveReport) -> Self {
        self.environments += other.environments;
        self.physical += other.physical;
        self.cases += other.cases;
        self.correct += other.correct;
        self.restored += other.restored;
        self
    }
}

/// Runs the query on every environment of the site with both query-bit
/// inputs and compares the verdict with the classical constraint.
pub fn check_exhaustive(query: &OracleQuery) -> Result<ExhaustiveReport> {
    let spec = query.layout.spec();
    let bits = SiteEnvironment::bit_count(spec);
    if bits > MAX_EXHAUSTIVE_BITS {
        return Err(Error::Unsupported(format!(
            "{bits} environment bits exceed the exhaustive limit of {MAX_EXHAUSTIVE_BITS}; \
             check single basis states instead"
        )));
    }
    (0..1u64 << bits)
        .into_par_iter()
        .map(|code| -> Result<ExhaustiveReport> {
            let env = SiteEnvironment::from_code(code, spec);
            let physical = gauss_value(&env, spec)? == 0;
            let mut r = ExhaustiveReport {
                environments: 1,
                physical: physical as u64,
                ..Default::default()
            };
            for q in [false, true] {
                let input = query.layout.encode(&env, q)?;
                let o = query_outcome(&query.circuit, &query.layout, &input)?;
                r.cases += 1;
                r.correct += (o.deterministic && o.flipped == physical) as u64;
                r.restored += o.restored as u64;
            }
            Ok(r)
        })
        .try_reduce(ExhaustiveReport::default, |a, b| Ok(a.merge(b)))
}

/// Verdict of the query on a single environment.
pub fn check_environment(query: &OracleQuery, env: &SiteEnvironment) -> Result<QueryOutcome> {
    let input = query.layout.encode(env, false)?;
    query_outcome(&query.circuit, &query.layout, &input)
}

/// Runs the query on `state`, measures the query wire, and returns the
/// outcome (`true` = flipped = physical) with the post-measurement state.
/// The query wire is reset to |0> afterwards so the result lives on the
/// same layout as the input.
pub fn measure_physicality<R: Rng + ?Sized>(
    state: &StateVector,
    query: &OracleQuery,
    rng: &mut R,
) -> Result<(bool, StateVector)> {
    if state.registers() != query.circuit.registers() {
        return Err(Error::RegisterMismatch);
    }
    state.check_normalized(1e-10)?;
    let q = query.layout.query();
    let mut work = query.layout.registers().ancilla_wires();
    work.push(q);
    for w in work {
        if state.probability(w, true) > 1e-12 {
            return Err(Error::DirtyAncilla(w));
        }
    }
    let mut psi = state.clone();
    psi.apply_circuit(&query.circuit)?;
    let (flipped, mut post) = psi.measure(q, rng)?;
    if flipped {
        post.apply_gate(&Gate::X(q))?;
    }
    Ok((flipped, post))
}
