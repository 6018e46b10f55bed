//! Taylor coefficients of the regularized logarithmic derivative
//! `f(x) = s/x - ψ'(x)/ψ(x) = x Σ f_j z^j`, `z = x²`.
//!
//! Substituting the series into the Riccati equation gives
//! `f_0 = E/(2s+1)` and, for `n ≥ 1`,
//! `f_n = (Σ_{j<n} f_j f_{n-1-j} - V_n) / (2n + 2s + 1)`.
//! The same recurrence runs over big floats, dual numbers and exact
//! polynomials in `E`.

use dashu_ratio::RBig;

use crate::error::{Result, RpmError};
use crate::number::{BigReal, DualReal, Precision, Ring};
use crate::poly::RationalPoly;
use crate::potential::PotentialSpec;
use crate::Parity;

/// How potential coefficients are lifted into the scalar type.
#[derive(Clone, Debug, PartialEq)]
pub enum Lift {
    Numeric(Precision),
    /// Tangent slot follows the named parameter, if any.
    Dual(Precision, Option<String>),
    Symbolic,
}

/// Scalars the recurrence can run over.
pub trait RecurrenceScalar: Ring {
    fn potential_term(spec: &PotentialSpec, j: usize, lift: &Lift) -> Result<Self>;
}

impl RecurrenceScalar for BigReal {
    fn potential_term(spec: &PotentialSpec, j: usize, lift: &Lift) -> Result<Self> {
        let Lift::Numeric(prec) = lift else {
            unreachable!("numeric sequence with non-numeric lift")
        };
        Ok(BigReal::from_rational(&spec.coefficient(j)?, *prec))
    }
}

impl RecurrenceScalar for DualReal {
    fn potential_term(spec: &PotentialSpec, j: usize, lift: &Lift) -> Result<Self> {
        let Lift::Dual(prec, param) = lift else {
            unreachable!("dual sequence with non-dual lift")
        };
        let value = BigReal::from_rational(&spec.coefficient(j)?, *prec);
        let d_param = match param {
            Some(name) => BigReal::from_rational(&spec.slope(name, j)?, *prec),
            None => BigReal::zero(*prec),
        };
        Ok(DualReal::new(value, BigReal::zero(*prec), d_param))
    }
}

impl RecurrenceScalar for RationalPoly {
    fn potential_term(spec: &PotentialSpec, j: usize, _lift: &Lift) -> Result<Self> {
        let constant = RationalPoly::constant(spec.coefficient(j)?);
        Ok(match &spec.symbol {
            Some(name) => constant.add(&RationalPoly::param().scale(&spec.slope(name, j)?)),
            None => constant,
        })
    }
}

/// Coefficients `f_0 ..= f_{n_max}` for one potential, parity and energy.
///
/// The sequence can be extended in place; every entry comes from the same
/// potential (checked through its fingerprint), parity and energy.
#[derive(Clone, Debug)]
pub struct CoeffSequence<T> {
    parity: Parity,
    fingerprint: u64,
    lift: Lift,
    potential: Vec<T>,
    terms: Vec<T>,
}

impl<T: RecurrenceScalar> CoeffSequence<T> {
    fn start(spec: &PotentialSpec, parity: Parity, energy: T, lift: Lift) -> Result<Self> {
        if spec.v0 != RBig::ZERO {
            return Err(RpmError::UnshiftedPotential);
        }
        let f0 = energy.div_int(2 * parity.index() + 1);
        Ok(CoeffSequence {
            parity,
            fingerprint: spec.fingerprint(),
            lift,
            potential: vec![f0.zero_like()],
            terms: vec![f0],
        })
    }
}

impl<T> CoeffSequence<T> {
    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    pub fn n_max(&self) -> usize {
        self.terms.len() - 1
    }

    pub fn get(&self, j: usize) -> Option<&T> {
        self.terms.get(j)
    }

    pub fn entries(&self) -> &[T] {
        &self.terms
    }

    pub fn into_entries(self) -> Vec<T> {
        self.terms
    }
}

impl<T: RecurrenceScalar> CoeffSequence<T> {
    /// Continue the recurrence up to `f_{n_max}`.
    pub fn extend_to(&mut self, spec: &PotentialSpec, n_max: usize) -> Result<()> {
        if spec.fingerprint() != self.fingerprint {
            return Err(RpmError::InvalidParameter(
                "coefficient sequence extended with a different potential".to_string(),
            ));
        }
        let s = self.parity.index();
        for n in self.terms.len()..=n_max {
            let v_n = T::potential_term(spec, n, &self.lift)?;
            self.potential.push(v_n);

            // Σ_{j=0}^{n-1} f_j f_{n-1-j}, folded by symmetry
            let m = n - 1;
            let mut acc = self.terms[0].zero_like();
            for j in 0..=m / 2 {
                let k = m - j;
                if j >= k {
                    break;
                }
                acc = acc.add_ref(&self.terms[j].mul_ref(&self.terms[k]));
            }
            acc = acc.add_ref(&acc);
            if m % 2 == 0 {
                let mid = &self.terms[m / 2];
                acc = acc.add_ref(&mid.mul_ref(mid));
            }
            let f_n = acc
                .sub_ref(&self.potential[n])
                .div_int(2 * n as u64 + 2 * s + 1);
            self.terms.push(f_n);
        }
        Ok(())
    }
}

fn check_numeric(spec: &PotentialSpec) -> Result<()> {
    match &spec.symbol {
        Some(name) => Err(RpmError::UnboundSymbol(name.clone())),
        None => Ok(()),
    }
}

/// Big-float coefficients at precision `prec`.
pub fn coeffs_numeric(
    spec: &PotentialSpec,
    parity: Parity,
    energy: &BigReal,
    n_max: usize,
    prec: Precision,
) -> Result<CoeffSequence<BigReal>> {
    check_numeric(spec)?;
    let energy = energy.with_precision(prec);
    let mut seq = CoeffSequence::start(spec, parity, energy, Lift::Numeric(prec))?;
    seq.extend_to(spec, n_max)?;
    Ok(seq)
}

/// Dual-number coefficients carrying `∂/∂E` and, when `param` is given,
/// `∂/∂param` for a parameter entering the potential linearly.
pub fn coeffs_dual(
    spec: &PotentialSpec,
    parity: Parity,
    energy: &BigReal,
    param: Option<&str>,
    n_max: usize,
    prec: Precision,
) -> Result<CoeffSequence<DualReal>> {
    check_numeric(spec)?;
    if let Some(name) = param {
        if !spec.linear.contains_key(name) {
            return Err(RpmError::NonlinearParameter(name.to_string()));
        }
    }
    let energy = DualReal::energy(energy.with_precision(prec));
    let lift = Lift::Dual(prec, param.map(str::to_string));
    let mut seq = CoeffSequence::start(spec, parity, energy, lift)?;
    seq.extend_to(spec, n_max)?;
    Ok(seq)
}

/// Exact coefficients as polynomials in `E` and the symbolic parameter.
///
/// `param` names a bound linear parameter to treat symbolically; when the
/// spec already carries a symbol it must match.
pub fn coeffs_symbolic(
    spec: &PotentialSpec,
    parity: Parity,
    n_max: usize,
    param: Option<&str>,
) -> Result<CoeffSequence<RationalPoly>> {
    let spec = match param {
        Some(name) => spec.make_symbolic(name)?,
        None => spec.clone(),
    };
    let mut seq = CoeffSequence::start(&spec, parity, RationalPoly::energy(), Lift::Symbolic)?;
    seq.extend_to(&spec, n_max)?;
    Ok(seq)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::parse_potential;
    use dashu_int::{IBig, UBig};

    fn prec(d: u32) -> Precision {
        Precision::new(d).unwrap()
    }

    fn q(n: i64, d: u64) -> RBig {
        RBig::from_parts(IBig::from(n), UBig::from(d))
    }

    fn close(a: &BigReal, b: &RBig, digits: i32) {
        let diff = (a.to_rational() - b).to_f64().value().abs();
        assert!(diff < 10f64.powi(-digits), "{a} vs {b}");
    }

    #[test]
    fn harmonic_numeric_examples() {
        let h = parse_potential("harmonic", 4).unwrap();
        let p = prec(30);
        let seq = coeffs_numeric(&h, Parity::Even, &BigReal::from_int(1, p), 3, p).unwrap();
        assert!(seq.entries()[1..].iter().all(|f| f.is_zero()));
        close(seq.get(0).unwrap(), &q(1, 1), 25);

        let seq = coeffs_numeric(&h, Parity::Even, &BigReal::from_int(3, p), 2, p).unwrap();
        close(seq.get(1).unwrap(), &q(8, 3), 25);
        close(seq.get(2).unwrap(), &q(16, 5), 25);
    }

    #[test]
    fn quartic_numeric_example() {
        let v = parse_potential("quartic", 2).unwrap();
        let p = prec(30);
        let seq = coeffs_numeric(&v, Parity::Even, &BigReal::from_int(2, p), 2, p).unwrap();
        close(seq.get(1).unwrap(), &q(4, 3), 25);
        close(seq.get(2).unwrap(), &q(13, 15), 25);
    }

    #[test]
    fn dual_examples() {
        let p = prec(30);
        let h = parse_potential("harmonic", 2).unwrap();
        let seq = coeffs_dual(&h, Parity::Even, &BigReal::from_int(1, p), None, 2, p).unwrap();
        assert!(seq.get(1).unwrap().value.is_zero());
        close(&seq.get(1).unwrap().d_energy, &q(2, 3), 25);
        close(&seq.get(0).unwrap().d_energy, &q(1, 1), 25);

        let dw = parse_potential("dwell:beta=0", 2).unwrap();
        let seq = coeffs_dual(&dw, Parity::Even, &BigReal::from_int(1, p), Some("beta"), 2, p).unwrap();
        close(&seq.get(1).unwrap().d_param, &q(-1, 3), 25);
    }

    #[test]
    fn symbolic_examples() {
        let h = parse_potential("harmonic", 4).unwrap();
        let seq = coeffs_symbolic(&h, Parity::Even, 3, None).unwrap();
        let e = RationalPoly::energy();
        let e2m1 = e.mul(&e).sub(&RationalPoly::from_int(1));
        let f3 = e2m1
            .mul(&e.mul(&e).scale(&q(17, 1)).sub(&RationalPoly::from_int(5)))
            .scale(&q(1, 315));
        assert_eq!(seq.get(3).unwrap(), &f3);

        let odd = coeffs_symbolic(&h, Parity::Odd, 0, None).unwrap();
        assert_eq!(odd.get(0).unwrap(), &e.scale(&q(1, 3)));

        let quartic = parse_potential("quartic", 2).unwrap();
        let seq = coeffs_symbolic(&quartic, Parity::Even, 2, None).unwrap();
        let f2 = e.pow(3).scale(&q(2, 3)).sub(&RationalPoly::from_int(1)).scale(&q(1, 5));
        assert_eq!(seq.get(2).unwrap(), &f2);
    }

    #[test]
    fn unshifted_and_symbolic_inputs_are_rejected() {
        let p = prec(30);
        let mpt = parse_potential("mpt:lambda=3", 4).unwrap();
        let e = BigReal::from_int(1, p);
        assert!(matches!(coeffs_numeric(&mpt, Parity::Even, &e, 2, p), Err(RpmError::UnshiftedPotential)));
        let sym = parse_potential("x2x4:lambda=L", 2).unwrap();
        assert!(matches!(coeffs_numeric(&sym, Parity::Even, &e, 2, p), Err(RpmError::UnboundSymbol(_))));
        assert!(matches!(coeffs_symbolic(&sym, Parity::Even, 2, Some("beta")), Err(RpmError::TooManySymbols)));
    }

    #[test]
    fn truncated_potential_fails_loudly() {
        let p = prec(30);
        let (mpt, _) = crate::potential::shift_constant(&parse_potential("mpt:lambda=3", 3).unwrap());
        let err = coeffs_numeric(&mpt, Parity::Even, &BigReal::from_int(1, p), 5, p).unwrap_err();
        assert_eq!(err, RpmError::MissingCoefficient { index: 4, available: 3 });
    }

    #[test]
    fn incremental_extension_matches_fresh_run() {
        let p = prec(40);
        let v = parse_potential("dwell:beta=-5", 2).unwrap();
        let e = BigReal::parse("-3.41", p).unwrap();
        let mut seq = coeffs_numeric(&v, Parity::Odd, &e, 5, p).unwrap();
        seq.extend_to(&v, 17).unwrap();
        let fresh = coeffs_numeric(&v, Parity::Odd, &e, 17, p).unwrap();
        assert_eq!(seq.entries(), fresh.entries());
        let other = parse_potential("quartic", 2).unwrap();
        assert!(seq.extend_to(&other, 20).is_err());
    }
}
