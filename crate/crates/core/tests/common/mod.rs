#![allow(dead_code)]

use gauss_oracle::lattice::{GaugeGroup, LatticeSpec, SiteEnvironment};

/// Independent constraint check: field values with charges subtracted,
/// compared with the group's arithmetic.
pub fn reference_physical(env: &SiteEnvironment, spec: &LatticeSpec) -> bool {
    let e = |eps: u32| eps as i64 + spec.e_min;
    let mut div = 0i64;
    for (&o, &i) in env.eps_out.iter().zip(&env.eps_in) {
        div += e(o) - e(i);
    }
    // the first half of the occupation bits carries charge -1, the rest +1
    let half = env.occ.len() / 2;
    let rho: i64 = env
        .occ
        .iter()
        .enumerate()
        .map(|(k, &n)| {
            if !n {
                0
            } else if k < half {
                -1
            } else {
                1
            }
        })
        .sum();
    let g = div - rho;
    match spec.group {
        GaugeGroup::TruncatedU1 => g == 0,
        GaugeGroup::Z2n => g % (1i64 << spec.bits) == 0,
    }
}

pub fn site_spec(dim: usize, n: u32, group: GaugeGroup, dirac: bool) -> LatticeSpec {
    let spec = LatticeSpec::single_site(dim, n, group).unwrap();
    if dirac {
        spec.with_dirac()
    } else {
        spec
    }
}

/// Every configuration covered by the exhaustive verdict suite.
pub fn exhaustive_configs() -> Vec<(usize, u32, GaugeGroup, bool)> {
    let mut v = Vec::new();
    for group in [GaugeGroup::TruncatedU1, GaugeGroup::Z2n] {
        for dirac in [false, true] {
            for n in 1..=3 {
                v.push((1, n, group, dirac));
            }
            for dim in 2..=3 {
                for n in 1..=2 {
                    v.push((dim, n, group, dirac));
                }
            }
        }
    }
    v
}
