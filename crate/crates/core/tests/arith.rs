use gauss_oracle::arith::{adder, comparator, subtractor, AdderLayout};
use gauss_oracle::circuit::{compose, inverse, resources, Circuit};
use gauss_oracle::lattice::GaugeGroup;
use gauss_oracle::sim::{run_basis_path, BasisState, Phase};

const GROUPS: [GaugeGroup; 2] = [GaugeGroup::TruncatedU1, GaugeGroup::Z2n];

fn load(c: &Circuit, layout: &AdderLayout, x: u64, y: u64, c0: bool) -> BasisState {
    let mut b = BasisState::zeros(c.num_wires());
    for (i, &w) in layout.x.iter().enumerate() {
        b.set(w, x >> i & 1 == 1);
    }
    for (i, &w) in layout.y.iter().enumerate() {
        b.set(w, y >> i & 1 == 1);
    }
    b.set(layout.carry, c0);
    b
}

fn read(b: &BasisState, wires: &[usize]) -> u64 {
    wires
        .iter()
        .enumerate()
        .map(|(i, &w)| (b.get(w) as u64) << i)
        .sum()
}

/// Result on `(h, y)`, with `h` as the top bit when present.
fn result(b: &BasisState, layout: &AdderLayout) -> u64 {
    let n = layout.y.len();
    read(b, &layout.y) | layout.overflow.map_or(0, |h| (b.get(h) as u64) << n)
}

#[test]
fn adder_matches_integer_addition() {
    for group in GROUPS {
        for n in 1..=4usize {
            let (c, layout) = adder(n, group).unwrap();
            let modulus = if group.has_overflow() { 2 << n } else { 1 << n };
            for x in 0..1u64 << n {
                for y in 0..1u64 << n {
                    for c0 in [false, true] {
                        let input = load(&c, &layout, x, y, c0);
                        let (out, phase) = run_basis_path(&c, &input).unwrap();
                        assert_eq!(phase, Phase::ONE);
                        assert_eq!(result(&out, &layout), (x + y + c0 as u64) % modulus);
                        assert_eq!(read(&out, &layout.x), x);
                        assert_eq!(out.get(layout.carry), c0);
                    }
                }
            }
        }
    }
}

#[test]
fn adder_spot_values() {
    let (c, layout) = adder(3, GaugeGroup::TruncatedU1).unwrap();
    let (out, _) = run_basis_path(&c, &load(&c, &layout, 5, 3, true)).unwrap();
    assert_eq!(read(&out, &layout.y), 1);
    assert!(out.get(layout.overflow.unwrap()));
    let (out, _) = run_basis_path(&c, &load(&c, &layout, 0, 0, true)).unwrap();
    assert_eq!(result(&out, &layout), 1);
}

#[test]
fn subtractor_matches_integer_subtraction() {
    for group in GROUPS {
        for n in 1..=4usize {
            let (c, layout) = subtractor(n, group).unwrap();
            let bits = if group.has_overflow() { n + 1 } else { n };
            let modulus = 1i64 << bits;
            for a in 0..1i64 << n {
                for b in 0..1i64 << n {
                    for c0 in [false, true] {
                        let input = load(&c, &layout, a as u64, b as u64, c0);
                        let (out, phase) = run_basis_path(&c, &input).unwrap();
                        assert_eq!(phase, Phase::ONE);
                        let want = (a - b - c0 as i64).rem_euclid(modulus) as u64;
                        assert_eq!(result(&out, &layout), want, "n={n} a={a} b={b} c0={c0}");
                        assert_eq!(read(&out, &layout.x), a as u64);
                    }
                }
            }
        }
    }
}

#[test]
fn subtractor_special_outputs() {
    for n in 1..=4usize {
        let (c, layout) = subtractor(n, GaugeGroup::TruncatedU1).unwrap();
        let all_ones = (2u64 << n) - 1;
        for (a, b, c0, want) in [
            (3 % (1 << n), 3 % (1 << n), false, 0),
            (0, 0, true, all_ones),
            (1, 0, false, 1),
        ] {
            let (out, _) = run_basis_path(&c, &load(&c, &layout, a, b, c0)).unwrap();
            assert_eq!(result(&out, &layout), want);
        }
    }
}

#[test]
fn comparator_xors() {
    let c = comparator(3).unwrap();
    let regs = c.registers();
    let run = |x: u64, y: u64| {
        let mut b = BasisState::zeros(6);
        b.set_register(regs, "x", x).unwrap();
        b.set_register(regs, "y", y).unwrap();
        let (out, _) = run_basis_path(&c, &b).unwrap();
        out.register(regs, "y").unwrap()
    };
    assert_eq!(run(5, 3), 6);
    assert_eq!(run(6, 6), 0);
    assert_eq!(run(7, 0), 7);
}

#[test]
fn circuits_followed_by_inverses_are_identity() {
    for group in GROUPS {
        for n in 1..=3usize {
            for (c, _) in [adder(n, group).unwrap(), subtractor(n, group).unwrap()] {
                let round = compose(&c, &inverse(&c).unwrap()).unwrap();
                for i in 0..1u64 << c.num_wires() {
                    let b = BasisState::from_index(i, c.num_wires());
                    if b.check_clean(c.registers()).is_err() {
                        continue;
                    }
                    assert_eq!(run_basis_path(&round, &b).unwrap(), (b, Phase::ONE));
                }
            }
        }
    }
}

#[test]
fn adder_t_count_slope_is_eight() {
    for group in GROUPS {
        let t: Vec<usize> = (1..=4)
            .map(|n| resources(&adder(n, group).unwrap().0).t_count_excluding_multicz)
            .collect();
        for w in t.windows(2) {
            assert_eq!(w[1] - w[0], 8, "{group}: {t:?}");
        }
        assert_eq!(t[0], 8);
    }
}
