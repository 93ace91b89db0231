//! Lattice geometry, the field-to-qubit label encoding, and the classical
//! reference evaluation of the Gauss constraint.
//!
//! Sites are indexed row-major over the per-axis extents (last axis fastest).
//! The link `(s, i)` carries the field on the edge leaving site `s` in the
//! `+e_i` direction, so `eps_out[i]` of a site is its own link and `eps_in[i]`
//! is the link owned by the neighbour at `s - e_i`. Boundaries are periodic.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Largest supported number of qubits per link.
pub const MAX_LINK_BITS: u32 = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GaugeGroup {
    /// U(1) with the electric field truncated to `2^n` consecutive values.
    TruncatedU1,
    /// The cyclic group with `2^n` elements; field arithmetic is modular.
    Z2n,
}

impl GaugeGroup {
    pub fn has_overflow(self) -> bool {
        matches!(self, GaugeGroup::TruncatedU1)
    }

    pub fn tag(self) -> &'static str {
        match self {
            GaugeGroup::TruncatedU1 => "u1",
            GaugeGroup::Z2n => "z2n",
        }
    }
}

impl FromStr for GaugeGroup {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "u1" | "U1" => Ok(GaugeGroup::TruncatedU1),
            "z2n" | "Z2n" | "Z2N" => Ok(GaugeGroup::Z2n),
            other => Err(Error::InvalidLattice(format!(
                "unknown gauge group `{other}`"
            ))),
        }
    }
}

impl fmt::Display for GaugeGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Charge {
    Negative,
    Positive,
}

impl Charge {
    pub fn value(self) -> i64 {
        match self {
            Charge::Negative => -1,
            Charge::Positive => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Species {
    pub name: String,
    pub charge: Charge,
}

/// Matter content of every site: each species owns one occupation bit.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct FermionSpec {
    pub species: Vec<Species>,
}

impl FermionSpec {
    pub fn pure_gauge() -> Self {
        Self::default()
    }

    /// One Dirac species: `(nu, p)` in 1D and 2D, `(nu1, nu2, p1, p2)` in 3D.
    /// The `nu` components carry negative charge.
    pub fn dirac(dim: usize) -> Self {
        let names: &[(&str, Charge)] = if dim == 3 {
            &[
                ("nu1", Charge::Negative),
                ("nu2", Charge::Negative),
                ("p1", Charge::Positive),
                ("p2", Charge::Positive),
            ]
        } else {
            &[("nu", Charge::Negative), ("p", Charge::Positive)]
        };
        FermionSpec {
            species: names
                .iter()
                .map(|&(name, charge)| Species {
                    name: name.to_string(),
                    charge,
                })
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.species.len()
    }

    pub fn is_empty(&self) -> bool {
        self.species.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LatticeSpec {
    pub dim: usize,
    pub extents: Vec<usize>,
    pub bits: u32,
    pub group: GaugeGroup,
    pub e_min: i64,
    pub fermions: FermionSpec,
}

impl LatticeSpec {
    /// A pure-gauge lattice with the default window `E_min = -2^(n-1)`.
    pub fn new(dim: usize, extents: Vec<usize>, bits: u32, group: GaugeGroup) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::Unsupported(format!(
                "dimension {dim} (expected 1, 2 or 3)"
            )));
        }
        if extents.len() != dim || extents.contains(&0) {
            return Err(Error::InvalidLattice(format!(
                "need {dim} positive extents, got {extents:?}"
            )));
        }
        if bits == 0 || bits > MAX_LINK_BITS {
            return Err(Error::InvalidLattice(format!(
                "bits per link must be in 1..={MAX_LINK_BITS}, got {bits}"
            )));
        }
        Ok(LatticeSpec {
            dim,
            extents,
            bits,
            group,
            e_min: default_e_min(bits),
            fermions: FermionSpec::pure_gauge(),
        })
    }

    /// Single-site lattice (all extents 1), handy for local oracle work.
    pub fn single_site(dim: usize, bits: u32, group: GaugeGroup) -> Result<Self> {
        Self::new(dim, vec![1; dim], bits, group)
    }

    pub fn with_e_min(mut self, e_min: i64) -> Self {
        self.e_min = e_min;
        self
    }

    pub fn with_fermions(mut self, fermions: FermionSpec) -> Self {
        self.fermions = fermions;
        self
    }

    pub fn with_dirac(self) -> Self {
        let dim = self.dim;
        self.with_fermions(FermionSpec::dirac(dim))
    }

    pub fn max_label(&self) -> u32 {
        ((1u64 << self.bits) - 1) as u32
    }

    pub fn modulus(&self) -> i64 {
        1i64 << self.bits
    }

    pub fn e_max(&self) -> i64 {
        self.e_min + self.modulus() - 1
    }

    pub fn num_sites(&self) -> usize {
        self.extents.iter().product()
    }

    pub fn links_per_site(&self) -> usize {
        2 * self.dim
    }

    pub fn num_links(&self) -> usize {
        self.num_sites() * self.dim
    }

    pub fn site_coords(&self, site: usize) -> Vec<usize> {
        let mut coords = vec![0; self.dim];
        let mut rest = site;
        for axis in (0..self.dim).rev() {
            coords[axis] = rest % self.extents[axis];
            rest /= self.extents[axis];
        }
        coords
    }

    pub fn site_index(&self, coords: &[usize]) -> usize {
        coords
            .iter()
            .zip(&self.extents)
            .fold(0, |acc, (&c, &l)| acc * l + c % l)
    }

    /// Site reached from `site` by one step along `axis`, forward or backward.
    pub fn neighbor(&self, site: usize, axis: usize, forward: bool) -> usize {
        let mut coords = self.site_coords(site);
        let l = self.extents[axis];
        coords[axis] = if forward {
            (coords[axis] + 1) % l
        } else {
            (coords[axis] + l - 1) % l
        };
        self.site_index(&coords)
    }

    fn check_label(&self, eps: u32) -> Result<()> {
        if eps > self.max_label() {
            return Err(Error::OutOfRange {
                what: "link label",
                value: eps as i64,
                min: 0,
                max: self.max_label() as i64,
            });
        }
        Ok(())
    }
}

pub fn default_e_min(bits: u32) -> i64 {
    -(1i64 << (bits - 1))
}

/// `E = eps + E_min`.
pub fn field_label_to_e(eps: u32, spec: &LatticeSpec) -> Result<i64> {
    spec.check_label(eps)?;
    Ok(eps as i64 + spec.e_min)
}

/// Quantum numbers entering one site's constraint.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SiteEnvironment {
    pub eps_out: Vec<u32>,
    pub eps_in: Vec<u32>,
    pub occ: Vec<bool>,
}

impl SiteEnvironment {
    pub fn validate(&self, spec: &LatticeSpec) -> Result<()> {
        if self.eps_out.len() != spec.dim || self.eps_in.len() != spec.dim {
            return Err(Error::InvalidLattice(format!(
                "environment needs {} in- and out-labels",
                spec.dim
            )));
        }
        if self.occ.len() != spec.fermions.len() {
            return Err(Error::InvalidLattice(format!(
                "environment needs {} occupation bits, got {}",
                spec.fermions.len(),
                self.occ.len()
            )));
        }
        for &eps in self.eps_out.iter().chain(&self.eps_in) {
            spec.check_label(eps)?;
        }
        Ok(())
    }

    /// Number of classical bits needed to describe an environment.
    pub fn bit_count(spec: &LatticeSpec) -> usize {
        2 * spec.dim * spec.bits as usize + spec.fermions.len()
    }

    /// Decodes environment number `code` in `0..2^bit_count`. Out-labels come
    /// first (axis order), then in-labels, then occupations, most significant
    /// first.
    pub fn from_code(code: u64, spec: &LatticeSpec) -> Self {
        let n = spec.bits;
        let total = Self::bit_count(spec) as u32;
        let mut shift = total;
        let mut take = |width: u32| {
            shift -= width;
            ((code >> shift) & ((1u64 << width) - 1)) as u32
        };
        let eps_out = (0..spec.dim).map(|_| take(n)).collect();
        let eps_in = (0..spec.dim).map(|_| take(n)).collect();
        let occ = (0..spec.fermions.len()).map(|_| take(1) == 1).collect();
        SiteEnvironment {
            eps_out,
            eps_in,
            occ,
        }
    }

    /// Iterates over every environment of `spec`.
    pub fn enumerate(spec: &LatticeSpec) -> impl Iterator<Item = SiteEnvironment> + '_ {
        let count = 1u64 << Self::bit_count(spec);
        (0..count).map(move |code| Self::from_code(code, spec))
    }
}

/// Constraint in the split form with charges absorbed into the two fluxes:
/// `(sum eps_out + sum_{e<0} n) - (sum eps_in + sum_{e>0} n)`, reduced
/// modulo `2^n` for `Z2n`.
pub fn gauss_value(env: &SiteEnvironment, spec: &LatticeSpec) -> Result<i64> {
    env.validate(spec)?;
    let mut out_flux: i64 = env.eps_out.iter().map(|&e| e as i64).sum();
    let mut in_flux: i64 = env.eps_in.iter().map(|&e| e as i64).sum();
    for (species, &n) in spec.fermions.species.iter().zip(&env.occ) {
        match species.charge {
            Charge::Negative => out_flux += n as i64,
            Charge::Positive => in_flux += n as i64,
        }
    }
    Ok(reduce(out_flux - in_flux, spec))
}

/// Constraint evaluated from field values: `sum_i (E_out - E_in) - sum e n`.
pub fn divergence_minus_charge(env: &SiteEnvironment, spec: &LatticeSpec) -> Result<i64> {
    env.validate(spec)?;
    let mut g = 0i64;
    for (&o, &i) in env.eps_out.iter().zip(&env.eps_in) {
        g += field_label_to_e(o, spec)? - field_label_to_e(i, spec)?;
    }
    for (species, &n) in spec.fermions.species.iter().zip(&env.occ) {
        g -= species.charge.value() * n as i64;
    }
    Ok(reduce(g, spec))
}

fn reduce(g: i64, spec: &LatticeSpec) -> i64 {
    match spec.group {
        GaugeGroup::TruncatedU1 => g,
        GaugeGroup::Z2n => g.rem_euclid(spec.modulus()),
    }
}

/// Eigenvalue of the physicality projector at one site.
pub fn physicality(env: &SiteEnvironment, spec: &LatticeSpec) -> Result<bool> {
    Ok(gauss_value(env, spec)? == 0)
}

/// A (possibly partial) assignment of link labels and occupations to a lattice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeAssignment {
    spec: LatticeSpec,
    links: Vec<Option<u32>>,
    occ: Vec<Option<bool>>,
}

impl LatticeAssignment {
    pub fn new(spec: LatticeSpec) -> Self {
        let links = vec![None; spec.num_links()];
        let occ = vec![None; spec.num_sites() * spec.fermions.len()];
        LatticeAssignment { spec, links, occ }
    }

    /// Every link set to `eps` and every occupation to `false`.
    pub fn uniform(spec: LatticeSpec, eps: u32) -> Result<Self> {
        spec.check_label(eps)?;
        let mut a = Self::new(spec);
        a.links.iter_mut().for_each(|l| *l = Some(eps));
        a.occ.iter_mut().for_each(|o| *o = Some(false));
        Ok(a)
    }

    pub fn spec(&self) -> &LatticeSpec {
        &self.spec
    }

    fn link_slot(&self, site: usize, axis: usize) -> Result<usize> {
        if site >= self.spec.num_sites() || axis >= self.spec.dim {
            return Err(Error::InvalidLattice(format!(
                "no link ({site}, {axis}) on this lattice"
            )));
        }
        Ok(site * self.spec.dim + axis)
    }

    fn occ_slot(&self, site: usize, species: usize) -> Result<usize> {
        if site >= self.spec.num_sites() || species >= self.spec.fermions.len() {
            return Err(Error::InvalidLattice(format!(
                "no occupation ({site}, {species}) on this lattice"
            )));
        }
        Ok(site * self.spec.fermions.len() + species)
    }

    pub fn set_link(&mut self, site: usize, axis: usize, eps: u32) -> Result<()> {
        self.spec.check_label(eps)?;
        let slot = self.link_slot(site, axis)?;
        self.links[slot] = Some(eps);
        Ok(())
    }

    pub fn link(&self, site: usize, axis: usize) -> Result<Option<u32>> {
        Ok(self.links[self.link_slot(site, axis)?])
    }

    pub fn set_occ(&mut self, site: usize, species: usize, occupied: bool) -> Result<()> {
        let slot = self.occ_slot(site, species)?;
        self.occ[slot] = Some(occupied);
        Ok(())
    }

    pub fn occ(&self, site: usize, species: usize) -> Result<Option<bool>> {
        Ok(self.occ[self.occ_slot(site, species)?])
    }

    pub fn site_environment(&self, site: usize) -> Result<SiteEnvironment> {
        let spec = &self.spec;
        let need = |v: Option<u32>, what: String| v.ok_or(Error::IncompleteAssignment(what));
        let mut eps_out = Vec::with_capacity(spec.dim);
        let mut eps_in = Vec::with_capacity(spec.dim);
        for axis in 0..spec.dim {
            eps_out.push(need(
                self.link(site, axis)?,
                format!("link ({site}, {axis})"),
            )?);
            let back = spec.neighbor(site, axis, false);
            eps_in.push(need(
                self.link(back, axis)?,
                format!("link ({back}, {axis})"),
            )?);
        }
        let occ = (0..spec.fermions.len())
            .map(|k| {
                self.occ(site, k)?
                    .ok_or_else(|| Error::IncompleteAssignment(format!("occupation ({site}, {k})")))
            })
            .collect::<Result<_>>()?;
        Ok(SiteEnvironment {
            eps_out,
            eps_in,
            occ,
        })
    }

    /// AND of the site physicality over the whole lattice.
    pub fn global_physicality(&self) -> Result<bool> {
        if let Some(slot) = self.links.iter().position(Option::is_none) {
            return Err(Error::IncompleteAssignment(format!(
                "link ({}, {})",
                slot / self.spec.dim,
                slot % self.spec.dim
            )));
        }
        for site in 0..self.spec.num_sites() {
            if !physicality(&self.site_environment(site)?, &self.spec)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

impl fmt::Display for LatticeAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let spec = &self.spec;
        let extents: Vec<String> = spec.extents.iter().map(|l| l.to_string()).collect();
        writeln!(
            f,
            "lattice D={} L={} n={} group={} Emin={}",
            spec.dim,
            extents.join("x"),
            spec.bits,
            spec.group,
            spec.e_min
        )?;
        for (slot, eps) in self.links.iter().enumerate() {
            if let Some(eps) = eps {
                writeln!(f, "link {} {} {}", slot / spec.dim, slot % spec.dim, eps)?;
            }
        }
        let species = spec.fermions.len().max(1);
        for (slot, occ) in self.occ.iter().enumerate() {
            if let Some(occ) = occ {
                writeln!(
                    f,
                    "occ {} {} {}",
                    slot / species,
                    slot % species,
                    *occ as u8
                )?;
            }
        }
        Ok(())
    }
}

impl FromStr for LatticeAssignment {
    type Err = Error;

    /// Matter content is inferred: any `occ` line selects the one-Dirac-species
    /// content for the lattice dimension, otherwise the lattice is pure gauge.
    fn from_str(text: &str) -> Result<Self> {
        let parse_err = |line: usize, message: String| Error::Parse { line, message };
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

        let (hline, header) = lines
            .next()
            .ok_or_else(|| parse_err(1, "missing lattice header".into()))?;
        let mut tokens = header.split_whitespace();
        if tokens.next() != Some("lattice") {
            return Err(parse_err(hline, "header must start with `lattice`".into()));
        }
        let (mut dim, mut extents, mut bits, mut group, mut e_min) = (None, None, None, None, None);
        for tok in tokens {
            let (key, value) = tok
                .split_once('=')
                .ok_or_else(|| parse_err(hline, format!("expected key=value, got `{tok}`")))?;
            let bad = |_| parse_err(hline, format!("bad value for {key}: `{value}`"));
            match key {
                "D" => dim = Some(value.parse::<usize>().map_err(bad)?),
                "L" => {
                    extents = Some(
                        value
                            .split('x')
                            .map(|v| v.parse::<usize>().map_err(bad))
                            .collect::<Result<Vec<_>>>()?,
                    )
                }
                "n" => bits = Some(value.parse::<u32>().map_err(bad)?),
                "group" => group = Some(value.parse::<GaugeGroup>()?),
                "Emin" => e_min = Some(value.parse::<i64>().map_err(bad)?),
                _ => return Err(parse_err(hline, format!("unknown header key `{key}`"))),
            }
        }
        let missing = |k: &str| parse_err(hline, format!("header lacks {k}"));
        let dim = dim.ok_or_else(|| missing("D"))?;
        let mut spec = LatticeSpec::new(
            dim,
            extents.ok_or_else(|| missing("L"))?,
            bits.ok_or_else(|| missing("n"))?,
            group.ok_or_else(|| missing("group"))?,
        )?
        .with_e_min(e_min.ok_or_else(|| missing("Emin"))?);

        let body: Vec<(usize, Vec<&str>)> = lines
            .map(|(i, l)| (i, l.split_whitespace().collect()))
            .collect();
        if body.iter().any(|(_, t)| t.first() == Some(&"occ")) {
            spec = spec.with_dirac();
        }
        let mut assignment = LatticeAssignment::new(spec);
        for (line, toks) in body {
            let num = |k: usize| -> Result<u64> {
                toks.get(k)
                    .ok_or_else(|| parse_err(line, "too few fields".into()))?
                    .parse::<u64>()
                    .map_err(|_| parse_err(line, format!("bad number `{}`", toks[k])))
            };
            if toks.len() != 4 {
                return Err(parse_err(line, "expected 4 fields".into()));
            }
            match toks[0] {
                "link" => {
                    assignment.set_link(num(1)? as usize, num(2)? as usize, num(3)? as u32)?
                }
                "occ" => {
                    let bit = num(3)?;
                    if bit > 1 {
                        return Err(parse_err(line, "occupation must be 0 or 1".into()));
                    }
                    assignment.set_occ(num(1)? as usize, num(2)? as usize, bit == 1)?
                }
                other => return Err(parse_err(line, format!("unknown record `{other}`"))),
            }
        }
        Ok(assignment)
    }
}
