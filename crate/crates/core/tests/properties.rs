use dashu_int::{IBig, UBig};
use dashu_ratio::RBig;
use proptest::prelude::*;

use rpm_core::hankel::{det_dual, det_numeric, det_symbolic, HankelSpec, DEFAULT_TERM_LIMIT};
use rpm_core::number::{BigReal, Precision};
use rpm_core::oracle::{oracle_state, OracleOptions};
use rpm_core::potential::{parse_potential, PotentialSpec};
use rpm_core::riccati::{coeffs_dual, coeffs_numeric, coeffs_symbolic};
use rpm_core::solver::{find_root_near, track_bounds, SolveOptions};
use rpm_core::wavefunction::{eigenfunction_eval, pade_for};
use rpm_core::{Parity, RationalPoly};

fn prec(d: u32) -> Precision {
    Precision::new(d).unwrap()
}

fn rational(num: i64, den: u64) -> RBig {
    RBig::from_parts(IBig::from(num), UBig::from(den))
}

fn parity(odd: bool) -> Parity {
    if odd {
        Parity::Odd
    } else {
        Parity::Even
    }
}

fn rel_err(a: &BigReal, b: &BigReal) -> f64 {
    let diff = (a - b).abs();
    if diff.is_zero() {
        return f64::NEG_INFINITY;
    }
    diff.log10_abs() - b.log10_abs().max(0.0)
}

#[test]
fn degree_law_and_harmonic_factor() {
    let e2m1 = RationalPoly::from_energy_coeffs(vec![RBig::from(-1), RBig::ZERO, RBig::ONE]);
    for model in ["harmonic", "quartic", "x2x4:lambda=3/7", "dwell:beta=-2"] {
        let v = parse_potential(model, 2).unwrap();
        for s in [Parity::Even, Parity::Odd] {
            let c = coeffs_symbolic(&v, s, 25, None).unwrap();
            for (n, f) in c.entries().iter().enumerate() {
                let (deg, lead) = match (n, f.degree()) {
                    (0, d) => (d, f.energy_coeff(1)[0].clone()),
                    (_, d) => (d, f.energy_coeff(d.unwrap())[0].clone()),
                };
                assert_eq!(deg, Some(n + 1), "{model} f_{n}");
                assert!(lead > RBig::ZERO, "{model} f_{n}");
            }
            if model == "harmonic" && s == Parity::Even {
                for f in &c.entries()[1..] {
                    assert!(f.div_exact(&e2m1).is_some());
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn symbolic_and_numeric_coefficients_agree(num in -1000i64..1000, den in 1u64..100, odd: bool, lam in 1i64..20) {
        let v = parse_potential(&format!("x2x4:lambda={lam}/3"), 2).unwrap();
        let e = rational(num, den * 10);
        let p = prec(40);
        let s = parity(odd);
        let sym = coeffs_symbolic(&v, s, 12, None).unwrap();
        let num_c = coeffs_numeric(&v, s, &BigReal::from_rational(&e, p), 12, p).unwrap();
        for (fs, fnum) in sym.entries().iter().zip(num_c.entries()) {
            let exact = BigReal::from_rational(&fs.eval(&e, &RBig::ZERO), p);
            prop_assert!(rel_err(fnum, &exact) < 2.0 - 40.0 + 1.0);
        }
    }

    #[test]
    fn dual_tangent_matches_finite_difference(num in -500i64..500, odd: bool) {
        let v = parse_potential("dwell:beta=-3/2", 2).unwrap();
        let p = prec(40);
        let e = BigReal::from_rational(&rational(num, 100), p);
        let h = BigReal::ten_pow(-20, p);
        let s = parity(odd);
        let dual = coeffs_dual(&v, s, &e, Some("beta"), 10, p).unwrap();
        let up = coeffs_numeric(&v, s, &(&e + &h), 10, p).unwrap();
        let down = coeffs_numeric(&v, s, &(&e - &h), 10, p).unwrap();
        for j in 0..=10 {
            let fd = (&up.entries()[j] - &down.entries()[j]) / (&h * BigReal::from_int(2, p));
            let tangent = &dual.entries()[j].d_energy;
            prop_assert!(rel_err(tangent, &fd) < 4.0 - 20.0);
        }

        let spec = HankelSpec::new(3, 1, s).unwrap();
        let det = det_dual(&v, &e, Some("beta"), &spec, p).unwrap();
        let fd = (det_numeric(&v, &(&e + &h), &spec, p).unwrap() - det_numeric(&v, &(&e - &h), &spec, p).unwrap())
            / (&h * BigReal::from_int(2, p));
        prop_assert!(rel_err(&det.d_energy, &fd) < 4.0 - 20.0);
    }

    #[test]
    fn symbolic_determinant_matches_numeric(num in -800i64..800, odd: bool, dim in 2usize..=4, shift in 0usize..=1) {
        let v = parse_potential("x2x4:lambda=2/5", 2).unwrap();
        let spec = HankelSpec::new(dim, shift, parity(odd)).unwrap();
        let sym = det_symbolic(&v, &spec, None, DEFAULT_TERM_LIMIT).unwrap();
        let e = rational(num, 100);
        let p = prec(40);
        let exact = BigReal::from_rational(&sym.eval(&e, &RBig::ZERO), p);
        let numeric = det_numeric(&v, &BigReal::from_rational(&e, p), &spec, p).unwrap();
        prop_assert!(rel_err(&numeric, &exact) < 2.0 - 40.0 + 2.0);
    }

    #[test]
    fn pade_reproduces_its_series(num in 1i64..400, odd: bool, n in 0usize..5, extra in 0usize..3) {
        let v = parse_potential("quartic", 2).unwrap();
        let p = prec(50);
        let e = BigReal::from_rational(&rational(num, 40), p);
        let s = parity(odd);
        let m = n + extra;
        let approx = pade_for(&v, s, &e, m, n, p).unwrap();
        let c = coeffs_numeric(&v, s, &e, m + n + 1, p).unwrap();
        let q = approx.taylor(m + n + 1);
        let growth = (1.0 + approx.b.iter().skip(1).map(|b| b.to_f64().abs()).sum::<f64>()).log10();
        for (j, (qj, fj)) in q.iter().zip(c.entries()).enumerate() {
            prop_assert!(rel_err(qj, fj) < 2.0 - 50.0 + 4.0 + j as f64 * growth);
        }
    }

    #[test]
    fn psi_has_definite_parity(num in 1i64..200, odd: bool, xs in 1i64..60) {
        let v = parse_potential("x2x4:lambda=1", 2).unwrap();
        let p = prec(30);
        let s = parity(odd);
        let approx = pade_for(&v, s, &BigReal::from_rational(&rational(num, 40), p), 2, 2, p).unwrap();
        let pole = approx.poles.first().copied().unwrap_or(10.0);
        let x = BigReal::from_f64(pole * xs as f64 / 64.0, p);
        let plus = eigenfunction_eval(&approx, s, &x, 20).unwrap();
        let minus = eigenfunction_eval(&approx, s, &-x, 20).unwrap();
        match s {
            Parity::Even => prop_assert_eq!(plus, minus),
            Parity::Odd => prop_assert_eq!(plus, -minus),
        }
    }
}

#[test]
fn harmonic_determinants_factor() {
    let h = parse_potential("harmonic", 2).unwrap();
    let a = RationalPoly::from_energy_coeffs(vec![RBig::from(-1), RBig::ZERO, RBig::ONE]);
    let b = RationalPoly::from_energy_coeffs(vec![RBig::from(-25), RBig::ZERO, RBig::ONE]);
    for dim in 2..=3u32 {
        for shift in 0..=1 {
            let spec = HankelSpec::new(dim as usize, shift, Parity::Even).unwrap();
            let det = det_symbolic(&h, &spec, None, DEFAULT_TERM_LIMIT).unwrap();
            assert!(det.div_exact(&a.pow(dim).mul(&b.pow(dim - 1))).is_some());
        }
    }
}

fn oracle_seed(v: &PotentialSpec, n: usize) -> BigReal {
    let e = oracle_state(v, n, &OracleOptions::default()).unwrap();
    BigReal::from_f64(e, prec(60))
}

#[test]
fn bounds_tighten_monotonically() {
    let opts = SolveOptions::default();
    for model in ["quartic", "x2x4:lambda=1/10", "x2x4:lambda=1", "x2x4:lambda=10", "dwell:beta=-1", "dwell:beta=-5"] {
        let v = parse_potential(model, 2).unwrap();
        let seed = oracle_seed(&v, 0);
        let dims = if model.contains("-5") { 6..=12 } else { 3..=10 };
        let pairs = track_bounds(&v, Parity::Even, "E0", dims, &seed, &opts).unwrap();
        for w in pairs.windows(2) {
            let (a, b) = (&w[0], &w[1]);
            assert!(a.lower.energy <= b.lower.energy, "{model} D={}: lower decreased", b.dim);
            assert!(b.lower.energy <= b.upper.energy, "{model} D={}: lower above upper", b.dim);
            assert!(b.upper.energy <= a.upper.energy, "{model} D={}: upper increased", b.dim);
        }
    }
}

#[test]
fn roots_agree_with_the_oracle() {
    let opts = SolveOptions::default();
    let cases = [
        ("harmonic", 4),
        ("quartic", 12),
        ("x2x4:lambda=1", 12),
        ("dwell:beta=-1", 12),
        ("dwell:beta=-5", 16),
    ];
    for (model, dim) in cases {
        let v = parse_potential(model, 2).unwrap();
        for n in 0..2 {
            let seed = oracle_seed(&v, n);
            let spec = HankelSpec::new(dim, 0, parity(n == 1)).unwrap();
            let root = find_root_near(&v, &spec, &seed, &opts).unwrap();
            let gap = (root.energy.to_f64() - seed.to_f64()).abs() / seed.to_f64().abs().max(1.0);
            assert!(gap < 1e-8, "{model} n={n}: {} vs {}", root.energy, seed);
        }
    }
}

#[test]
fn roots_are_certified_and_deterministic() {
    let opts = SolveOptions::default();
    let v = parse_potential("x2x4:lambda=1", 2).unwrap();
    let spec = HankelSpec::new(9, 1, Parity::Odd).unwrap();
    let seed = oracle_seed(&v, 1);
    let a = find_root_near(&v, &spec, &seed, &opts).unwrap();
    let b = find_root_near(&v, &spec, &seed, &opts).unwrap();
    assert_eq!(a.energy.to_sig_string(40), b.energy.to_sig_string(40));
    let bound = BigReal::ten_pow(a.certified_digits as i64 - a.precision.digits() as i64, a.precision);
    assert!(a.residual < &bound * &a.scale);
}
