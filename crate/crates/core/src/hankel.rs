//! Hankel determinants `H_D^d(E) = det[f_{d+1+i+j}]`, `0 ≤ i, j < D`.

use crate::error::{Result, RpmError};
use crate::number::{BigReal, DualReal, Field, Precision, Ring};
use crate::poly::RationalPoly;
use crate::potential::PotentialSpec;
use crate::riccati::{coeffs_dual, coeffs_numeric, coeffs_symbolic, CoeffSequence};
use crate::Parity;

/// Default cap on the number of terms in any intermediate symbolic entry.
pub const DEFAULT_TERM_LIMIT: usize = 20_000;

/// Extra digits used by the guard re-evaluation.
pub const GUARD_DIGITS: u32 = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct HankelSpec {
    pub dim: usize,
    pub shift: usize,
    pub parity: Parity,
}

impl HankelSpec {
    pub fn new(dim: usize, shift: usize, parity: Parity) -> Result<Self> {
        if dim < 2 {
            return Err(RpmError::InvalidHankel(format!("D must be at least 2, got {dim}")));
        }
        Ok(HankelSpec { dim, shift, parity })
    }

    /// Highest coefficient index the matrix touches.
    pub fn max_index(&self) -> usize {
        self.shift + 2 * self.dim - 1
    }

    /// Padé orders `[M/N]` with `N = D - 1`, `M = N + d`.
    pub fn pade_orders(&self) -> (usize, usize) {
        let n = self.dim - 1;
        (n + self.shift, n)
    }

    /// Default working precision for this dimension.
    pub fn default_precision(&self) -> Precision {
        Precision::new((4 * self.dim as u32 + 20).max(40)).expect("above floor")
    }
}

pub fn hankel_matrix<T: Clone>(c: &CoeffSequence<T>, spec: &HankelSpec) -> Result<Vec<Vec<T>>> {
    let needed = spec.max_index();
    if c.n_max() < needed {
        return Err(RpmError::InsufficientCoefficients {
            needed,
            available: c.n_max(),
        });
    }
    let f = c.entries();
    Ok((0..spec.dim)
        .map(|i| (0..spec.dim).map(|j| f[spec.shift + 1 + i + j].clone()).collect())
        .collect())
}

fn negate<T: Ring>(x: &T) -> T {
    x.zero_like().sub_ref(x)
}

/// Determinant by Gaussian elimination with partial pivoting on magnitude.
pub fn determinant<T: Field>(mut a: Vec<Vec<T>>) -> T {
    let n = a.len();
    let mut negative = false;
    for k in 0..n {
        let pivot = (k..n)
            .max_by(|&p, &q| {
                a[p][k]
                    .magnitude()
                    .partial_cmp(&a[q][k].magnitude())
                    .expect("finite magnitudes")
            })
            .expect("nonempty column");
        if a[pivot][k].magnitude().is_zero() {
            return a[k][k].zero_like();
        }
        if pivot != k {
            a.swap(pivot, k);
            negative = !negative;
        }
        let (top, rest) = a.split_at_mut(k + 1);
        let row_k = &top[k];
        for row in rest.iter_mut() {
            let factor = row[k].div_ref(&row_k[k]);
            for j in k + 1..n {
                row[j] = row[j].sub_ref(&factor.mul_ref(&row_k[j]));
            }
        }
    }
    let mut det = a[0][0].clone();
    for (k, row) in a.iter().enumerate().skip(1) {
        det = det.mul_ref(&row[k]);
    }
    if negative {
        negate(&det)
    } else {
        det
    }
}

/// `H_D^d(E)` at precision `prec`. The potential must already be shifted.
pub fn det_numeric(v: &PotentialSpec, energy: &BigReal, spec: &HankelSpec, prec: Precision) -> Result<BigReal> {
    let c = coeffs_numeric(v, spec.parity, energy, spec.max_index(), prec)?;
    Ok(determinant(hankel_matrix(&c, spec)?))
}

/// `H_D^d(E)` with tangents in `E` and, optionally, a linear parameter.
pub fn det_dual(
    v: &PotentialSpec,
    energy: &BigReal,
    param: Option<&str>,
    spec: &HankelSpec,
    prec: Precision,
) -> Result<DualReal> {
    let c = coeffs_dual(v, spec.parity, energy, param, spec.max_index(), prec)?;
    Ok(determinant(hankel_matrix(&c, spec)?))
}

/// Decimal digits on which two evaluations agree, capped at `cap`.
pub fn agreeing_digits(a: &BigReal, b: &BigReal, cap: u32) -> u32 {
    if a == b {
        return cap;
    }
    let diff = (a - b).abs();
    if b.is_zero() {
        return 0;
    }
    let rel = diff.log10_abs() - b.log10_abs();
    if rel >= 0.0 {
        0
    } else {
        ((-rel).floor() as u32).min(cap)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GuardedDet {
    pub value: BigReal,
    pub digits: u32,
    pub precision: Precision,
}

/// Evaluate at `prec` and `prec + 20`; fail unless they agree to `wanted`
/// significant digits.
pub fn det_guarded(
    v: &PotentialSpec,
    energy: &BigReal,
    spec: &HankelSpec,
    prec: Precision,
    wanted: u32,
) -> Result<GuardedDet> {
    let value = det_numeric(v, energy, spec, prec)?;
    let check = det_numeric(v, energy, spec, prec.plus(GUARD_DIGITS))?;
    let digits = agreeing_digits(&value, &check, prec.digits());
    if digits < wanted {
        return Err(RpmError::GuardFailure { got: digits, wanted });
    }
    Ok(GuardedDet {
        value,
        digits,
        precision: prec,
    })
}

/// Exact determinant by fraction-free (Bareiss) elimination.
///
/// `param` names a linear parameter to keep symbolic. Intermediate entries
/// with more than `term_limit` terms abort with `SymbolicOverflow`.
pub fn det_symbolic(
    v: &PotentialSpec,
    spec: &HankelSpec,
    param: Option<&str>,
    term_limit: usize,
) -> Result<RationalPoly> {
    let c = coeffs_symbolic(v, spec.parity, spec.max_index(), param)?;
    bareiss(hankel_matrix(&c, spec)?, term_limit)
}

pub fn bareiss(mut a: Vec<Vec<RationalPoly>>, term_limit: usize) -> Result<RationalPoly> {
    let n = a.len();
    let mut negative = false;
    let mut prev = RationalPoly::from_int(1);
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    negative = !negative;
                }
                None => return Ok(RationalPoly::zero()),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = a[k][k].mul(&a[i][j]).sub(&a[i][k].mul(&a[k][j]));
                let entry = num
                    .div_exact(&prev)
                    .expect("Bareiss quotient is exact over the rationals");
                if entry.term_count() > term_limit {
                    return Err(RpmError::SymbolicOverflow(term_limit));
                }
                a[i][j] = entry;
            }
        }
        prev = a[k][k].clone();
    }
    let det = a[n - 1][n - 1].clone();
    Ok(if negative { det.neg() } else { det })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::parse_potential;
    use dashu_int::{IBig, UBig};
    use dashu_ratio::RBig;

    fn q(n: i64, d: u64) -> RBig {
        RBig::from_parts(IBig::from(n), UBig::from(d))
    }

    fn prec(d: u32) -> Precision {
        Precision::new(d).unwrap()
    }

    fn e_poly(coeffs: &[i64]) -> RationalPoly {
        RationalPoly::from_energy_coeffs(coeffs.iter().map(|&c| RBig::from(c)).collect())
    }

    #[test]
    fn matrix_index_law() {
        let h = parse_potential("quartic", 2).unwrap();
        let c = coeffs_symbolic(&h, Parity::Even, 8, None).unwrap();
        let f = c.entries();
        let m = hankel_matrix(&c, &HankelSpec::new(2, 0, Parity::Even).unwrap()).unwrap();
        assert_eq!(m, vec![vec![f[1].clone(), f[2].clone()], vec![f[2].clone(), f[3].clone()]]);
        let m = hankel_matrix(&c, &HankelSpec::new(2, 1, Parity::Even).unwrap()).unwrap();
        assert_eq!(m, vec![vec![f[2].clone(), f[3].clone()], vec![f[3].clone(), f[4].clone()]]);
        let m = hankel_matrix(&c, &HankelSpec::new(3, 0, Parity::Even).unwrap()).unwrap();
        assert_eq!((&m[0][0], &m[2][2]), (&f[1], &f[5]));
        for s in 0..5 {
            let cells: Vec<_> = (0..3).flat_map(|i| (0..3).map(move |j| (i, j))).filter(|(i, j)| i + j == s).collect();
            assert!(cells.iter().all(|&(i, j)| m[i][j] == m[cells[0].0][cells[0].1]));
        }
        let err = hankel_matrix(&c, &HankelSpec::new(4, 2, Parity::Even).unwrap()).unwrap_err();
        assert_eq!(err, RpmError::InsufficientCoefficients { needed: 9, available: 8 });
        assert!(HankelSpec::new(1, 0, Parity::Even).is_err());
    }

    #[test]
    fn harmonic_numeric_examples() {
        let h = parse_potential("harmonic", 4).unwrap();
        let spec = HankelSpec::new(2, 0, Parity::Even).unwrap();
        let p = prec(40);
        let det = det_numeric(&h, &BigReal::from_int(1, p), &spec, p).unwrap();
        assert!(det.is_zero());
        let det = det_numeric(&h, &BigReal::from_int(3, p), &spec, p).unwrap();
        let err = (det.to_rational() - q(-1024, 4725)).to_f64().value().abs();
        assert!(err < 1e-35);
    }

    #[test]
    fn quartic_known_root() {
        let v = parse_potential("quartic", 2).unwrap();
        let spec = HankelSpec::new(11, 0, Parity::Even).unwrap();
        let p = prec(40);
        let e = BigReal::parse("1.0603620904841828996", p).unwrap();
        let det = det_numeric(&v, &e, &spec, p).unwrap();
        assert!(det.abs() < BigReal::ten_pow(-25, p), "{det}");
    }

    #[test]
    fn guard_reports_agreement() {
        let v = parse_potential("quartic", 2).unwrap();
        let spec = HankelSpec::new(6, 0, Parity::Even).unwrap();
        let p = spec.default_precision();
        let g = det_guarded(&v, &BigReal::parse("1.2", p).unwrap(), &spec, p, 20).unwrap();
        assert!(g.digits >= 20);
        let err = det_guarded(&v, &BigReal::parse("1.2", p).unwrap(), &spec, p, 500).unwrap_err();
        assert!(matches!(err, RpmError::GuardFailure { wanted: 500, .. }));
    }

    #[test]
    fn harmonic_symbolic_forms() {
        let h = parse_potential("harmonic", 4).unwrap();
        let a = e_poly(&[-1, 0, 1]);
        let b = e_poly(&[-25, 0, 1]);
        let det = det_symbolic(&h, &HankelSpec::new(2, 0, Parity::Even).unwrap(), None, DEFAULT_TERM_LIMIT).unwrap();
        assert_eq!(det, a.pow(2).mul(&b).scale(&q(1, 4725)));
    }

    #[test]
    fn harmonic_factorization() {
        let h = parse_potential("harmonic", 4).unwrap();
        let a = e_poly(&[-1, 0, 1]);
        let b = e_poly(&[-25, 0, 1]);
        for dim in 2..=3 {
            for shift in 0..=1 {
                let spec = HankelSpec::new(dim, shift, Parity::Even).unwrap();
                let det = det_symbolic(&h, &spec, None, DEFAULT_TERM_LIMIT).unwrap();
                let factor = a.pow(dim as u32).mul(&b.pow(dim as u32 - 1));
                assert!(det.div_exact(&factor).is_some(), "D={dim} d={shift}");
            }
        }
    }

    #[test]
    fn bivariate_forms() {
        let v = parse_potential("x2x4:lambda=L", 2).unwrap();
        let det = det_symbolic(&v, &HankelSpec::new(2, 0, Parity::Even).unwrap(), None, DEFAULT_TERM_LIMIT).unwrap();
        assert_eq!(det.monic().render("E", "lambda"), "E^6 - 27*E^4 + 162*E^3*lambda + 51*E^2 - 162*E*lambda - 189*lambda^2 - 25");
        assert_eq!(det.leading_term().unwrap().2, q(1, 4725));

        let dw = parse_potential("dwell:beta=B", 2).unwrap();
        let det = det_symbolic(&dw, &HankelSpec::new(2, 1, Parity::Even).unwrap(), None, DEFAULT_TERM_LIMIT).unwrap();
        assert_eq!(
            det.monic().render("E", "beta"),
            "E^8 - 24*E^6*beta - 558*E^5 - 30*E^4*beta^2 + 1404*E^3*beta + 128*E^2*beta^3 + 666*E^2 - 846*E*beta^2 - 75*beta^4 - 882*beta"
        );
    }

    #[test]
    fn term_limit_is_enforced() {
        let v = parse_potential("x2x4:lambda=L", 2).unwrap();
        let err = det_symbolic(&v, &HankelSpec::new(4, 0, Parity::Even).unwrap(), None, 3).unwrap_err();
        assert_eq!(err, RpmError::SymbolicOverflow(3));
    }

    #[test]
    fn singular_matrix_gives_zero() {
        let p = prec(30);
        let m = vec![
            vec![BigReal::from_int(1, p), BigReal::from_int(2, p)],
            vec![BigReal::from_int(2, p), BigReal::from_int(4, p)],
        ];
        assert!(determinant(m).is_zero());
        let m = vec![
            vec![BigReal::from_int(0, p), BigReal::from_int(1, p)],
            vec![BigReal::from_int(1, p), BigReal::from_int(0, p)],
        ];
        assert_eq!(determinant(m), BigReal::from_int(-1, p));
    }
}
