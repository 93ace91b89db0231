mod common;

use std::f64::consts::PI;

use common::{exhaustive_configs, reference_physical, site_spec};
use gauss_oracle::circuit::{resources, Circuit, Gate};
use gauss_oracle::lattice::{GaugeGroup, SiteEnvironment};
use gauss_oracle::oracle::{
    build_oracle, build_query, check_environment, check_exhaustive, measure_physicality,
    oracle_parts, query_outcome,
};
use gauss_oracle::sim::{run_basis_path, BasisState, Phase, StateVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const U1: GaugeGroup = GaugeGroup::TruncatedU1;
const Z2N: GaugeGroup = GaugeGroup::Z2n;

#[test]
fn exhaustive_verdicts_match_reference() {
    for (dim, n, group, dirac) in exhaustive_configs() {
        let spec = site_spec(dim, n, group, dirac);
        let query = build_query(&spec, 0).unwrap();
        let report = check_exhaustive(&query).unwrap();
        let expected_physical = SiteEnvironment::enumerate(&spec)
            .filter(|e| reference_physical(e, &spec))
            .count() as u64;
        assert!(report.all_pass(), "{}: {report:?}", query.describe());
        assert_eq!(report.physical, expected_physical, "{}", query.describe());
        assert_eq!(report.cases, 2 << SiteEnvironment::bit_count(&spec));
    }
}

fn env1(out: u32, inn: u32, nu: bool, p: bool) -> SiteEnvironment {
    SiteEnvironment {
        eps_out: vec![out],
        eps_in: vec![inn],
        occ: vec![nu, p],
    }
}

/// Runs the arithmetic prefix of the 1D oracle and reads the subtractor
/// output.
fn subtractor_output(n: u32, env: &SiteEnvironment) -> u64 {
    let spec = site_spec(1, n, U1, true);
    let (layout, parts) = oracle_parts(&spec, 0).unwrap();
    let mut c = Circuit::new(layout.registers().clone());
    c.extend(parts.compute[..parts.arithmetic_len].iter().cloned())
        .unwrap();
    let (out, _) = run_basis_path(&c, &layout.encode(env, false).unwrap()).unwrap();
    parts
        .arithmetic_result
        .iter()
        .fold(0, |acc, &w| acc << 1 | out.get(w) as u64)
}

#[test]
fn worked_examples_1d() {
    for n in 1..=3u32 {
        let ones = (1u64 << (n + 1)) - 1;
        let spec = site_spec(1, n, U1, true);
        let query = build_query(&spec, 0).unwrap();
        let (oracle, layout) = build_oracle(&spec, 0).unwrap();
        let cases = [
            (env1(0, 0, false, false), 0, true),
            (env1(0, 0, true, true), ones, true),
            (env1(1, 0, false, false), 1, false),
        ];
        for (env, s_out, physical) in cases {
            assert_eq!(subtractor_output(n, &env), s_out);
            let (_, phase) = run_basis_path(&oracle, &layout.encode(&env, false).unwrap()).unwrap();
            let expect = if physical {
                Phase::MINUS_ONE
            } else {
                Phase::ONE
            };
            assert_eq!(phase, expect);
            let o = check_environment(&query, &env).unwrap();
            assert!(o.deterministic && o.restored);
            assert_eq!(o.flipped, physical);
        }
    }
}

#[test]
fn query_bit_one_flips_to_zero_on_physical_input() {
    let spec = site_spec(1, 2, U1, true);
    let query = build_query(&spec, 0).unwrap();
    let phys = query
        .layout
        .encode(&env1(2, 2, false, false), true)
        .unwrap();
    let o = query_outcome(&query.circuit, &query.layout, &phys).unwrap();
    assert!(o.flipped);
    let unphys = query
        .layout
        .encode(&env1(3, 2, false, false), true)
        .unwrap();
    let o = query_outcome(&query.circuit, &query.layout, &unphys).unwrap();
    assert!(!o.flipped && o.restored);
}

#[test]
fn bare_oracle_is_a_restoring_involution() {
    for (dim, n, group, dirac) in exhaustive_configs() {
        if dim == 1 && n == 3 {
            continue;
        }
        let spec = site_spec(dim, n, group, dirac);
        let (oracle, layout) = build_oracle(&spec, 0).unwrap();
        let mut twice = oracle.clone();
        twice.append(&oracle).unwrap();
        for env in SiteEnvironment::enumerate(&spec) {
            let b = layout.encode(&env, false).unwrap();
            let (out, phase) = run_basis_path(&oracle, &b).unwrap();
            assert_eq!(out, b);
            let expect = if reference_physical(&env, &spec) {
                -1
            } else {
                1
            };
            assert_eq!(phase.sign(), Some(expect));
            let (out2, phase2) = run_basis_path(&twice, &b).unwrap();
            assert_eq!((out2, phase2), (b, Phase::ONE));
        }
    }
}

fn prefixed(query: &Circuit, g: Gate) -> Circuit {
    let mut c = Circuit::new(query.registers().clone());
    c.push(g).unwrap();
    c.append(query).unwrap();
    c
}

#[test]
fn single_x_errors_are_detected_and_z_errors_are_not() {
    let configs = [
        (1, 1, U1, true),
        (1, 2, U1, true),
        (1, 2, Z2N, true),
        (1, 2, U1, false),
        (1, 1, Z2N, false),
        (2, 1, U1, true),
        (2, 1, Z2N, true),
        (2, 1, U1, false),
    ];
    for (dim, n, group, dirac) in configs {
        let spec = site_spec(dim, n, group, dirac);
        let query = build_query(&spec, 0).unwrap();
        let wires = query.layout.environment_wires();
        let mut physical_states = 0;
        for env in SiteEnvironment::enumerate(&spec) {
            if !reference_physical(&env, &spec) {
                continue;
            }
            physical_states += 1;
            let input = query.layout.encode(&env, false).unwrap();
            for &w in &wires {
                let x = prefixed(&query.circuit, Gate::X(w));
                let o = query_outcome(&x, &query.layout, &input).unwrap();
                assert!(o.deterministic && !o.flipped, "X on wire {w} missed");
                let z = prefixed(&query.circuit, Gate::Z(w));
                let o = query_outcome(&z, &query.layout, &input).unwrap();
                // Z on the input contributes only a sign
                assert!(o.flipped && o.restored, "Z on wire {w} changed the verdict");
                assert!((o.amplitude.norm() - 1.0).abs() < 1e-12);
            }
        }
        assert!(physical_states > 0);
    }
}

#[test]
fn basis_path_agrees_with_statevector_3d() {
    let spec = site_spec(3, 1, U1, true);
    let (oracle, layout) = build_oracle(&spec, 0).unwrap();
    let regs = layout.registers().clone();
    let m = regs.num_wires();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << m];
    let mut inputs = Vec::new();
    while inputs.len() < 1000 {
        let code = rng.random_range(0..1u64 << SiteEnvironment::bit_count(&spec));
        let env = SiteEnvironment::from_code(code, &spec);
        let b = layout.encode(&env, rng.random()).unwrap();
        let i = b.to_index() as usize;
        if amps[i].norm() > 0.0 {
            continue;
        }
        amps[i] = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        inputs.push(b);
    }
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    amps.iter_mut().for_each(|a| *a /= norm);
    let psi = StateVector::from_amplitudes(regs, amps.clone()).unwrap();
    let out = gauss_oracle::sim::apply(&oracle, psi).unwrap();
    let mut seen = 0.0;
    for b in &inputs {
        let (image, phase) = run_basis_path(&oracle, b).unwrap();
        let want = amps[b.to_index() as usize] * phase.to_complex();
        let got = out.amplitude(image.to_index());
        assert!((want - got).norm() < 1e-12, "{b}: {want} vs {got}");
        seen += got.norm_sqr();
    }
    assert!((seen - 1.0).abs() < 1e-12);
}

fn mixture(theta: f64) -> (StateVector, StateVector, StateVector) {
    let spec = site_spec(1, 2, U1, true);
    let query = build_query(&spec, 0).unwrap();
    let regs = query.layout.registers().clone();
    let phys = query.layout.encode(&env1(1, 1, true, true), false).unwrap();
    let unphys = query
        .layout
        .encode(&env1(2, 1, false, false), false)
        .unwrap();
    let m = regs.num_wires();
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << m];
    amps[phys.to_index() as usize] = Complex64::new(theta.cos(), 0.0);
    amps[unphys.to_index() as usize] = Complex64::new(theta.sin(), 0.0);
    (
        StateVector::from_amplitudes(regs.clone(), amps).unwrap(),
        StateVector::basis(regs.clone(), phys.to_index()).unwrap(),
        StateVector::basis(regs, unphys.to_index()).unwrap(),
    )
}

#[test]
fn projection_probabilities_and_post_states() {
    let spec = site_spec(1, 2, U1, true);
    let query = build_query(&spec, 0).unwrap();
    let q = query.layout.query();
    for theta in [0.0, PI / 6.0, PI / 4.0, PI / 3.0, PI / 2.0] {
        let (psi, phys, unphys) = mixture(theta);
        let mut after = psi.clone();
        after.apply_circuit(&query.circuit).unwrap();
        let p_flip = after.probability(q, true);
        assert!(
            (p_flip - theta.cos().powi(2)).abs() < 1e-12,
            "theta={theta}"
        );
        for outcome in [true, false] {
            let p = if outcome { p_flip } else { 1.0 - p_flip };
            if p < 1e-12 {
                continue;
            }
            let mut post = after.project(q, outcome).unwrap();
            if outcome {
                post.apply_gate(&Gate::X(q)).unwrap();
            }
            let target = if outcome { &phys } else { &unphys };
            assert!(post.fidelity(target).unwrap() >= 1.0 - 1e-12);
        }
        // sampled measurement always lands on one of the eigenstates
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (flipped, post) = measure_physicality(&psi, &query, &mut rng).unwrap();
        let target = if flipped { &phys } else { &unphys };
        assert!(post.fidelity(target).unwrap() >= 1.0 - 1e-12);
    }
}

#[test]
fn flipped_amplitude_equals_cos_theta() {
    let theta: f64 = 0.3;
    let (psi, phys, _) = mixture(theta);
    let spec = site_spec(1, 2, U1, true);
    let query = build_query(&spec, 0).unwrap();
    let mut after = psi.clone();
    after.apply_circuit(&query.circuit).unwrap();
    let mut flipped = BasisState::from_index(
        phys.amplitudes()
            .iter()
            .position(|a| a.norm() > 0.5)
            .unwrap() as u64,
        phys.num_wires(),
    );
    flipped.flip(query.layout.query());
    let a = after.amplitude(flipped.to_index());
    assert!((a - Complex64::new(theta.cos(), 0.0)).norm() < 1e-12);
}

#[test]
fn measure_physicality_validates_input() {
    let spec = site_spec(1, 1, U1, true);
    let query = build_query(&spec, 0).unwrap();
    let regs = query.layout.registers().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let unnormalized = StateVector::from_amplitudes(
        regs.clone(),
        vec![Complex64::new(0.5, 0.0); 1 << regs.num_wires()],
    )
    .unwrap();
    assert!(measure_physicality(&unnormalized, &query, &mut rng).is_err());
    let mut dirty = BasisState::zeros(regs.num_wires());
    dirty.set(regs.wires_of("c0").unwrap()[0], true);
    let dirty = StateVector::basis(regs, dirty.to_index()).unwrap();
    assert!(measure_physicality(&dirty, &query, &mut rng).is_err());
}

#[test]
fn oracle_t_counts_follow_table_structure() {
    for group in [U1, Z2N] {
        for (dim, slope) in [(1, 16), (2, 32), (3, 64)] {
            for dirac in [true, false] {
                if dim == 1 && !dirac {
                    continue;
                }
                let t: Vec<i64> = (1..=4u32)
                    .map(|n| {
                        let spec = site_spec(dim, n, group, dirac);
                        resources(&build_oracle(&spec, 0).unwrap().0).t_count_excluding_multicz
                            as i64
                    })
                    .collect();
                let c: Vec<i64> = t.iter().zip(1..).map(|(t, n)| t - slope * n).collect();
                assert!(c.iter().all(|&x| x == c[0]), "dim {dim} {group}: {t:?}");
                if dim == 3 && group == U1 {
                    // four copies of 16n + 8
                    assert_eq!(c[0], 32);
                }
            }
        }
    }
}

#[test]
fn pure_gauge_1d_needs_no_t_gates() {
    for n in 1..=4 {
        let spec = site_spec(1, n, U1, false);
        let (oracle, _) = build_oracle(&spec, 0).unwrap();
        let r = resources(&oracle);
        assert_eq!(r.t_count_excluding_multicz, 0);
        assert_eq!(oracle.counts()["CNOT"], 2 * n as usize);
    }
}

#[test]
fn three_d_matter_adds_twelve_cnots() {
    for group in [U1, Z2N] {
        let cnots = |dirac| {
            let spec = site_spec(3, 2, group, dirac);
            let (oracle, _) = build_oracle(&spec, 0).unwrap();
            oracle.counts().get("CNOT").copied().unwrap_or(0)
        };
        assert_eq!(cnots(true) - cnots(false), 12);
    }
}
