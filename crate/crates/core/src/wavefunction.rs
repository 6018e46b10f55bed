//! Padé approximant `[M/N](z) = a(z)/b(z)` of the coefficient series and
//! the eigenfunction `ψ(x) = x^s exp(-∫₀ˣ y [M/N](y²) dy)` it implies.

use crate::error::{Result, RpmError};
use crate::number::{BigReal, Precision};
use crate::potential::{shift_constant, PotentialSpec};
use crate::riccati::{coeffs_numeric, CoeffSequence};
use crate::solver::ensure_order;
use crate::Parity;

/// Poles of the denominator are searched for `0 < x ≤ POLE_RANGE`.
pub const POLE_RANGE: f64 = 10.0;

const GAUSS_NODES: usize = 16;

#[derive(Clone, Debug, PartialEq)]
pub struct PadeApproximant {
    pub m: usize,
    pub n: usize,
    pub a: Vec<BigReal>,
    /// `b[0] = 1`.
    pub b: Vec<BigReal>,
    /// Positive real `x` where `b(x²) = 0`, ascending, up to [`POLE_RANGE`].
    pub poles: Vec<f64>,
    /// The linear system for `b` lost rank beyond the normalization.
    pub rank_deficient: bool,
    pub precision: Precision,
}

fn horner(coeffs: &[BigReal], z: &BigReal, prec: Precision) -> BigReal {
    coeffs
        .iter()
        .rev()
        .fold(BigReal::zero(prec), |acc, c| acc * z + c)
}

fn horner_derivative(coeffs: &[BigReal], z: &BigReal, prec: Precision) -> BigReal {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .rev()
        .fold(BigReal::zero(prec), |acc, (k, c)| acc * z + c * BigReal::from_int(k as i64, prec))
}

/// Solve `A x = rhs` by partial pivoting. Columns whose pivot falls below
/// `tiny` are dropped (their unknown set to zero) and reported.
fn solve_linear(mut a: Vec<Vec<BigReal>>, mut rhs: Vec<BigReal>, tiny: &BigReal) -> (Vec<BigReal>, bool) {
    let n = rhs.len();
    let prec = tiny.precision();
    let mut dropped = vec![false; n];
    let mut pivot_row = vec![usize::MAX; n];
    let mut row = 0;
    for col in 0..n {
        let best = (row..n).max_by(|&p, &q| a[p][col].abs().partial_cmp(&a[q][col].abs()).expect("finite"));
        let Some(best) = best else {
            dropped[col] = true;
            continue;
        };
        if a[best][col].abs() <= *tiny {
            dropped[col] = true;
            continue;
        }
        a.swap(row, best);
        rhs.swap(row, best);
        for r in row + 1..n {
            let factor = &a[r][col] / &a[row][col];
            for c in col..n {
                let t = &factor * &a[row][c];
                a[r][c] = &a[r][c] - &t;
            }
            let t = &factor * &rhs[row];
            rhs[r] = &rhs[r] - &t;
        }
        pivot_row[col] = row;
        row += 1;
    }
    let mut x = vec![BigReal::zero(prec); n];
    for col in (0..n).rev() {
        if dropped[col] {
            continue;
        }
        let r = pivot_row[col];
        let mut acc = rhs[r].clone();
        for c in col + 1..n {
            acc = acc - &a[r][c] * &x[c];
        }
        x[col] = acc / &a[r][col];
    }
    (x, dropped.iter().any(|&d| d))
}

/// `[M/N]` from `f_0 ..= f_{M+N}`, with `b_0 = 1`.
pub fn pade_from_coeffs(c: &CoeffSequence<BigReal>, m: usize, n: usize) -> Result<PadeApproximant> {
    if m < n {
        return Err(RpmError::SingularPade(format!("need M >= N, got [{m}/{n}]")));
    }
    if c.n_max() < m + n {
        return Err(RpmError::InsufficientCoefficients {
            needed: m + n,
            available: c.n_max(),
        });
    }
    let f = c.entries();
    let prec = f[0].precision();
    let fj = |j: isize| -> BigReal {
        if j < 0 {
            BigReal::zero(prec)
        } else {
            f[j as usize].clone()
        }
    };
    // Σ_{k=1}^{N} b_k f_{j-k} = -f_j,  j = M+1 ..= M+N
    let system: Vec<Vec<BigReal>> = (m + 1..=m + n)
        .map(|j| (1..=n).map(|k| fj(j as isize - k as isize)).collect())
        .collect();
    let rhs: Vec<BigReal> = (m + 1..=m + n).map(|j| -fj(j as isize)).collect();
    let scale = system
        .iter()
        .flatten()
        .fold(BigReal::zero(prec), |acc, x| acc.max(&x.abs()).clone());
    if n > 0 && scale.is_zero() && rhs.iter().any(|r| !r.is_zero()) {
        return Err(RpmError::SingularPade("denominator system is identically zero".into()));
    }
    let tiny = &scale * &BigReal::ten_pow(-(prec.digits() as i64) + 10, prec);
    let (tail, rank_deficient) = solve_linear(system, rhs, &tiny);
    let mut b = vec![BigReal::one(prec)];
    b.extend(tail);
    let a = (0..=m)
        .map(|j| {
            (0..=j.min(n)).fold(BigReal::zero(prec), |acc, k| acc + &b[k] * &f[j - k])
        })
        .collect();
    let mut pade = PadeApproximant {
        m,
        n,
        a,
        b,
        poles: Vec::new(),
        rank_deficient,
        precision: prec,
    };
    pade.poles = pade.find_poles(POLE_RANGE);
    Ok(pade)
}

/// Approximant `[M/N]` for the state at `energy` (original energy scale).
pub fn pade_for(
    v: &PotentialSpec,
    parity: Parity,
    energy: &BigReal,
    m: usize,
    n: usize,
    prec: Precision,
) -> Result<PadeApproximant> {
    let v = ensure_order(v, m + n + 1)?;
    let (shifted, shift) = shift_constant(&v);
    let e = energy.with_precision(prec) - BigReal::from_rational(&shift, prec);
    let c = coeffs_numeric(&shifted, parity, &e, m + n + 1, prec)?;
    pade_from_coeffs(&c, m, n)
}

impl PadeApproximant {
    /// `R(z) = a(z)/b(z)`.
    pub fn eval(&self, z: &BigReal) -> BigReal {
        horner(&self.a, z, self.precision) / horner(&self.b, z, self.precision)
    }

    /// `R(z)` and `R'(z)`.
    pub fn eval_with_derivative(&self, z: &BigReal) -> (BigReal, BigReal) {
        let p = self.precision;
        let (a, b) = (horner(&self.a, z, p), horner(&self.b, z, p));
        let (da, db) = (horner_derivative(&self.a, z, p), horner_derivative(&self.b, z, p));
        let value = &a / &b;
        let slope = (&da * &b - &a * &db) / (&b * &b);
        (value, slope)
    }

    /// Taylor coefficients of `a/b` through `z^{count-1}`.
    pub fn taylor(&self, count: usize) -> Vec<BigReal> {
        let p = self.precision;
        let mut q: Vec<BigReal> = Vec::with_capacity(count);
        for j in 0..count {
            let mut acc = self.a.get(j).cloned().unwrap_or_else(|| BigReal::zero(p));
            for k in 1..=j.min(self.n) {
                acc = acc - &self.b[k] * &q[j - k];
            }
            q.push(acc);
        }
        q
    }

    /// Largest relative deviation between the re-expansion of `a/b` and
    /// `f_0 ..= f_{M+N+1}`.
    pub fn taylor_mismatch(&self, c: &CoeffSequence<BigReal>) -> Result<BigReal> {
        let count = self.m + self.n + 2;
        if c.n_max() + 1 < count {
            return Err(RpmError::InsufficientCoefficients {
                needed: count - 1,
                available: c.n_max(),
            });
        }
        let p = self.precision;
        let q = self.taylor(count);
        Ok(q.iter().zip(c.entries()).fold(BigReal::zero(p), |worst, (qj, fj)| {
            let denom = fj.abs().max(&BigReal::one(p)).clone();
            worst.max(&((qj - fj).abs() / denom)).clone()
        }))
    }

    fn find_poles(&self, x_max: f64) -> Vec<f64> {
        if self.n == 0 {
            return Vec::new();
        }
        let p = Precision::new(30).expect("above floor");
        let b: Vec<BigReal> = self.b.iter().map(|c| c.with_precision(p)).collect();
        let at = |x: f64| {
            let x = BigReal::from_f64(x, p);
            horner(&b, &(&x * &x), p)
        };
        let steps = 4000;
        let mut poles = Vec::new();
        let mut prev_x = 0.0;
        let mut prev = at(0.0);
        for i in 1..=steps {
            let x = x_max * i as f64 / steps as f64;
            let cur = at(x);
            if cur.is_zero() {
                poles.push(x);
            } else if !prev.is_zero() && prev.is_negative() != cur.is_negative() {
                let (mut lo, mut hi) = (prev_x, x);
                let lo_negative = prev.is_negative();
                for _ in 0..60 {
                    let mid = 0.5 * (lo + hi);
                    if at(mid).is_negative() == lo_negative {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                poles.push(0.5 * (lo + hi));
            }
            prev_x = x;
            prev = cur;
        }
        poles
    }

    fn check_domain(&self, x: &BigReal) -> Result<()> {
        let ax = x.to_f64().abs();
        if let Some(&pole) = self.poles.first() {
            if ax >= pole {
                return Err(RpmError::BeyondPole { x: x.to_f64(), pole });
            }
        } else if ax > POLE_RANGE {
            let b = horner(&self.b, &(x * x), self.precision);
            if b.is_zero() {
                return Err(RpmError::BeyondPole { x: x.to_f64(), pole: ax });
            }
        }
        Ok(())
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]` at precision `prec`.
fn gauss_legendre(n: usize, prec: Precision) -> Vec<(BigReal, BigReal)> {
    let one = BigReal::one(prec);
    let two = BigReal::from_int(2, prec);
    let eps = BigReal::ten_pow(-(prec.digits() as i64) + 2, prec);
    let legendre = |x: &BigReal| -> (BigReal, BigReal) {
        let mut p0 = one.clone();
        let mut p1 = x.clone();
        for k in 2..=n {
            let k_big = BigReal::from_int(k as i64, prec);
            let km1 = BigReal::from_int(k as i64 - 1, prec);
            let t = x * &p1 * BigReal::from_int(2 * k as i64 - 1, prec);
            let p2 = (t - &km1 * &p0) / &k_big;
            p0 = p1;
            p1 = p2;
        }
        // P_n'(x) = n (x P_n - P_{n-1}) / (x² - 1)
        let d = BigReal::from_int(n as i64, prec) * (x * &p1 - &p0) / (x * x - &one);
        (p1, d)
    };
    (1..=n)
        .map(|i| {
            let guess = (std::f64::consts::PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
            let mut x = BigReal::from_f64(guess, prec);
            for _ in 0..100 {
                let (p, d) = legendre(&x);
                let step = &p / &d;
                x = &x - &step;
                if step.abs() < eps {
                    break;
                }
            }
            let (_, d) = legendre(&x);
            let w = &two / ((&one - &x * &x) * &d * &d);
            (x, w)
        })
        .collect()
}

struct Quadrature {
    rule: Vec<(BigReal, BigReal)>,
    prec: Precision,
}

impl Quadrature {
    fn new(prec: Precision) -> Self {
        Quadrature {
            rule: gauss_legendre(GAUSS_NODES, prec),
            prec,
        }
    }

    fn panel(&self, f: &dyn Fn(&BigReal) -> BigReal, lo: &BigReal, hi: &BigReal) -> BigReal {
        let two = BigReal::from_int(2, self.prec);
        let mid = (lo + hi) / &two;
        let half = (hi - lo) / &two;
        let sum = self
            .rule
            .iter()
            .fold(BigReal::zero(self.prec), |acc, (x, w)| acc + w * f(&(&mid + &(&half * x))));
        sum * half
    }

    fn adaptive(&self, f: &dyn Fn(&BigReal) -> BigReal, lo: &BigReal, hi: &BigReal, tol: &BigReal, depth: u32) -> Result<BigReal> {
        let whole = self.panel(f, lo, hi);
        let mid = (lo + hi) / BigReal::from_int(2, self.prec);
        let left = self.panel(f, lo, &mid);
        let right = self.panel(f, &mid, hi);
        let split = &left + &right;
        if (&split - &whole).abs() <= *tol {
            return Ok(split);
        }
        if depth == 0 {
            return Err(RpmError::Quadrature(format!(
                "no convergence on [{}, {}]",
                lo.to_f64(),
                hi.to_f64()
            )));
        }
        let half_tol = tol / &BigReal::from_int(2, self.prec);
        Ok(self.adaptive(f, lo, &mid, &half_tol, depth - 1)? + self.adaptive(f, &mid, hi, &half_tol, depth - 1)?)
    }
}

/// `ψ(x)` normalized by `ψ(0) = 1` (even) or `ψ'(0) = 1` (odd), with the
/// integral converged to `10^{-target_digits}`.
pub fn eigenfunction_eval(p: &PadeApproximant, parity: Parity, x: &BigReal, target_digits: u32) -> Result<BigReal> {
    eigenfunction_profile(p, parity, std::slice::from_ref(x), target_digits).map(|mut v| v.remove(0))
}

/// [`eigenfunction_eval`] over several points, sharing the quadrature rule.
pub fn eigenfunction_profile(p: &PadeApproximant, parity: Parity, xs: &[BigReal], target_digits: u32) -> Result<Vec<BigReal>> {
    let prec = p.precision;
    let quad = Quadrature::new(prec);
    let tol = BigReal::ten_pow(-(target_digits as i64), prec);
    let half = BigReal::from_int(2, prec);
    xs.iter()
        .map(|x| {
            p.check_domain(x)?;
            let x = x.with_precision(prec);
            // ∫₀^|x| y R(y²) dy = ½ ∫₀^{x²} R(z) dz
            let z_end = &x * &x;
            let integral = if z_end.is_zero() {
                BigReal::zero(prec)
            } else {
                quad.adaptive(&|z| p.eval(z), &BigReal::zero(prec), &z_end, &tol, 30)? / &half
            };
            let envelope = (-integral).exp();
            Ok(match parity {
                Parity::Even => envelope,
                Parity::Odd => x * envelope,
            })
        })
        .collect()
}

/// `|ψ'' + (E - V) ψ| / max(1, |ψ|)` at each grid point, with `ψ''/ψ` taken
/// from the Riccati identity. `energy` is on the original scale of `v`.
pub fn residual_profile(
    p: &PadeApproximant,
    parity: Parity,
    energy: &BigReal,
    v: &PotentialSpec,
    xs: &[BigReal],
    target_digits: u32,
) -> Result<Vec<(BigReal, BigReal)>> {
    let prec = p.precision;
    let psi = eigenfunction_profile(p, parity, xs, target_digits)?;
    let s = BigReal::from_int(parity.index() as i64, prec);
    let one = BigReal::one(prec);
    let two = BigReal::from_int(2, prec);
    let e = energy.with_precision(prec);
    Ok(xs
        .iter()
        .zip(psi)
        .map(|(x, psi)| {
            let x = x.with_precision(prec);
            let z = &x * &x;
            let (r, dr) = p.eval_with_derivative(&z);
            // ψ''/ψ = -g' - 2 s g / x + g², g = x R(z), g' = R + 2 z R'
            let bracket = -((&one + &two * &s) * &r) - &two * &z * &dr + &z * &r * &r + &e - v.eval_real(&x, prec);
            let residual = (&psi * &bracket).abs() / psi.abs().max(&one);
            (x, residual)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hankel::HankelSpec;
    use crate::potential::parse_potential;
    use crate::solver::{find_root_near, SolveOptions};

    fn prec() -> Precision {
        Precision::new(40).unwrap()
    }

    fn big(text: &str) -> BigReal {
        BigReal::parse(text, prec()).unwrap()
    }

    #[test]
    fn harmonic_low_orders() {
        let h = parse_potential("harmonic", 2).unwrap();
        let p = pade_for(&h, Parity::Even, &big("1"), 0, 0, prec()).unwrap();
        assert_eq!((p.a.clone(), p.b.clone()), (vec![big("1")], vec![big("1")]));

        let p = pade_for(&h, Parity::Even, &big("5"), 1, 1, prec()).unwrap();
        assert_eq!(p.a, vec![big("5"), big("-2")]);
        assert_eq!(p.b, vec![big("1"), big("-2")]);
        assert!(!p.rank_deficient);
        let pole = p.poles[0];
        assert!((pole - 0.5f64.sqrt()).abs() < 1e-12, "{pole}");
        let err = eigenfunction_eval(&p, Parity::Even, &big("1"), 20).unwrap_err();
        assert!(matches!(err, RpmError::BeyondPole { .. }));
    }

    #[test]
    fn harmonic_ground_state_profile() {
        let h = parse_potential("harmonic", 2).unwrap();
        let p = pade_for(&h, Parity::Even, &big("1"), 0, 0, prec()).unwrap();
        let psi = eigenfunction_eval(&p, Parity::Even, &big("1"), 30).unwrap();
        let exact = BigReal::parse("-0.5", prec()).unwrap().exp();
        assert!((&psi - &exact).abs() < BigReal::ten_pow(-30, prec()));
        assert_eq!(eigenfunction_eval(&p, Parity::Even, &big("0"), 20).unwrap(), big("1"));

        let odd = pade_for(&h, Parity::Odd, &big("3"), 0, 0, prec()).unwrap();
        assert!(eigenfunction_eval(&odd, Parity::Odd, &big("0"), 20).unwrap().is_zero());

        let xs: Vec<BigReal> = ["0", "0.5", "1", "2", "3"].iter().map(|t| big(t)).collect();
        for (_, r) in residual_profile(&p, Parity::Even, &big("1"), &h, &xs, 30).unwrap() {
            assert!(r < BigReal::ten_pow(-30, prec()));
        }
    }

    #[test]
    fn parity_of_psi() {
        let v = parse_potential("quartic", 2).unwrap();
        for parity in [Parity::Even, Parity::Odd] {
            let p = pade_for(&v, parity, &big("2.5"), 3, 3, prec()).unwrap();
            let limit = p.poles.first().copied().unwrap_or(POLE_RANGE).min(1.0) * 0.9;
            let x = BigReal::from_f64(limit, prec());
            let plus = eigenfunction_eval(&p, parity, &x, 25).unwrap();
            let minus = eigenfunction_eval(&p, parity, &-x, 25).unwrap();
            match parity {
                Parity::Even => assert_eq!(plus, minus),
                Parity::Odd => assert_eq!(plus, -minus),
            }
        }
    }

    #[test]
    fn quartic_ground_state_residual() {
        let v = parse_potential("quartic", 2).unwrap();
        let spec = HankelSpec::new(11, 0, Parity::Even).unwrap();
        let root = find_root_near(&v, &spec, &big("1.06"), &SolveOptions::default()).unwrap();
        let (m, n) = spec.pade_orders();
        let prec = root.precision;
        let p = pade_for(&v, Parity::Even, &root.energy, m, n, prec).unwrap();
        let c = coeffs_numeric(&v, Parity::Even, &root.energy, m + n + 1, prec).unwrap();
        assert!(p.taylor_mismatch(&c).unwrap() < BigReal::ten_pow(-24, prec));

        let xs: Vec<BigReal> = (0..=10).map(|i| BigReal::from_f64(i as f64 / 10.0, prec)).collect();
        let profile = residual_profile(&p, Parity::Even, &root.energy, &v, &xs, 25).unwrap();
        for (x, r) in &profile {
            assert!(*r < BigReal::ten_pow(-10, prec), "x = {x}: {r}");
        }
        let far = residual_profile(&p, Parity::Even, &root.energy, &v, &[BigReal::from_int(5, prec)], 25);
        match far {
            Ok(far) => assert!(far[0].1.log10_abs() > profile[10].1.log10_abs() + 3.0),
            Err(e) => assert!(matches!(e, RpmError::BeyondPole { .. })),
        }
    }

    #[test]
    fn log_derivative_identity() {
        let v = parse_potential("dwell:beta=-1", 2).unwrap();
        let p = pade_for(&v, Parity::Even, &big("0.6576530051807151"), 4, 4, prec()).unwrap();
        let x = big("0.4");
        let h = big("0.000001");
        let plus = eigenfunction_eval(&p, Parity::Even, &(&x + &h), 30).unwrap();
        let minus = eigenfunction_eval(&p, Parity::Even, &(&x - &h), 30).unwrap();
        let centre = eigenfunction_eval(&p, Parity::Even, &x, 30).unwrap();
        let log_derivative = (plus - minus) / (&h * BigReal::from_int(2, prec())) / centre;
        let expected = -(&x * p.eval(&(&x * &x)));
        assert!((log_derivative - expected).abs() < BigReal::ten_pow(-10, prec()));
    }
}
