//! Symmetric potentials as truncated even-power Taylor series
//! `V(x) = v0 + Σ_{j≥1} V_j x^{2j}` with exact rational coefficients.

use std::collections::hash_map::DefaultHasher;
use std::collections::BTreeMap;
use std::hash::{Hash, Hasher};

use dashu_int::{IBig, UBig};
use dashu_ratio::RBig;

use crate::error::{Result, RpmError};
use crate::number::{parse_rational, BigReal, Precision};

/// Built-in potential families.
pub const MODELS: [&str; 6] = ["harmonic", "quartic", "x2x4", "dwell", "mpt", "poly"];

/// How the potential can be evaluated as a real function away from the
/// origin, independently of its truncated series.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClosedForm {
    /// The series is the whole polynomial.
    Polynomial,
    /// `strength / cosh²(x) + Σ_j extra[j] x^{2j}`.
    SechSquared { strength: RBig, extra: Vec<RBig> },
}

/// Derivative of the potential with respect to a parameter that enters
/// linearly: `∂v0/∂p` and `∂V_j/∂p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearTerm {
    pub dv0: RBig,
    pub dcoeffs: Vec<RBig>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PotentialSpec {
    pub name: String,
    pub params: BTreeMap<String, RBig>,
    /// Parameter left symbolic; the stored coefficients assume it is zero.
    pub symbol: Option<String>,
    pub v0: RBig,
    /// `V_1 .. V_jmax`.
    pub coeffs: Vec<RBig>,
    /// True when every `V_j` past `jmax` is exactly zero.
    pub exact_tail: bool,
    pub linear: BTreeMap<String, LinearTerm>,
    pub closed_form: ClosedForm,
}

impl PotentialSpec {
    pub fn jmax(&self) -> usize {
        self.coeffs.len()
    }

    /// `V_j` for `j ≥ 1`. Past the truncation order this is an error unless
    /// the potential is a declared polynomial.
    pub fn coefficient(&self, j: usize) -> Result<RBig> {
        if j == 0 {
            return Ok(self.v0.clone());
        }
        match self.coeffs.get(j - 1) {
            Some(c) => Ok(c.clone()),
            None if self.exact_tail => Ok(RBig::ZERO),
            None => Err(RpmError::MissingCoefficient {
                index: j,
                available: self.jmax(),
            }),
        }
    }

    /// `∂V_j/∂param` for a linearly entering parameter.
    pub fn slope(&self, param: &str, j: usize) -> Result<RBig> {
        let term = self
            .linear
            .get(param)
            .ok_or_else(|| RpmError::NonlinearParameter(param.to_string()))?;
        if j == 0 {
            return Ok(term.dv0.clone());
        }
        // availability of the base coefficient decides truncation errors
        self.coefficient(j)?;
        Ok(term.dcoeffs.get(j - 1).cloned().unwrap_or(RBig::ZERO))
    }

    /// Stable identity of the coefficient data.
    pub fn fingerprint(&self) -> u64 {
        let mut hasher = DefaultHasher::new();
        self.name.hash(&mut hasher);
        self.symbol.hash(&mut hasher);
        self.v0.to_string().hash(&mut hasher);
        for c in &self.coeffs {
            c.to_string().hash(&mut hasher);
        }
        for (k, term) in &self.linear {
            k.hash(&mut hasher);
            for c in &term.dcoeffs {
                c.to_string().hash(&mut hasher);
            }
        }
        self.exact_tail.hash(&mut hasher);
        hasher.finish()
    }

    /// Turn a linearly entering, bound parameter into the symbolic one.
    pub fn make_symbolic(&self, param: &str) -> Result<PotentialSpec> {
        if let Some(existing) = &self.symbol {
            if existing != param {
                return Err(RpmError::TooManySymbols);
            }
            return Ok(self.clone());
        }
        let term = self
            .linear
            .get(param)
            .ok_or_else(|| RpmError::NonlinearParameter(param.to_string()))?
            .clone();
        let value = self.params.get(param).cloned().unwrap_or(RBig::ZERO);
        let mut out = self.clone();
        out.v0 = &out.v0 - &value * &term.dv0;
        for (c, d) in out.coeffs.iter_mut().zip(&term.dcoeffs) {
            *c = &*c - &value * d;
        }
        out.params.remove(param);
        out.symbol = Some(param.to_string());
        Ok(out)
    }

    /// Bind the symbolic parameter (or rebind a linear one) to `value`.
    pub fn with_param(&self, param: &str, value: RBig) -> Result<PotentialSpec> {
        let base = self.make_symbolic(param)?;
        let term = &base.linear[param];
        let mut out = base.clone();
        out.v0 = &out.v0 + &value * &term.dv0;
        for (c, d) in out.coeffs.iter_mut().zip(&term.dcoeffs) {
            *c = &*c + &value * d;
        }
        out.symbol = None;
        out.params.insert(param.to_string(), value);
        Ok(out)
    }

    /// Add `value · (a0 + Σ a_j x^{2j})` as a new linear parameter.
    pub fn add_linear_term(&self, param: &str, value: RBig, terms: &[RBig]) -> PotentialSpec {
        let mut out = self.clone();
        let dv0 = terms.first().cloned().unwrap_or(RBig::ZERO);
        let mut dcoeffs: Vec<RBig> = terms.iter().skip(1).cloned().collect();
        if dcoeffs.len() > out.coeffs.len() {
            // extra powers are exact only for declared polynomials
            if out.exact_tail {
                out.coeffs.resize(dcoeffs.len(), RBig::ZERO);
                for term in out.linear.values_mut() {
                    term.dcoeffs.resize(dcoeffs.len(), RBig::ZERO);
                }
            } else {
                dcoeffs.truncate(out.coeffs.len());
            }
        }
        dcoeffs.resize(out.coeffs.len(), RBig::ZERO);
        out.v0 = &out.v0 + &value * &dv0;
        for (c, d) in out.coeffs.iter_mut().zip(&dcoeffs) {
            *c = &*c + &value * d;
        }
        if let ClosedForm::SechSquared { extra, .. } = &mut out.closed_form {
            if extra.len() < terms.len() {
                extra.resize(terms.len(), RBig::ZERO);
            }
            for (e, t) in extra.iter_mut().zip(terms) {
                *e = &*e + &value * t;
            }
        }
        out.params.insert(param.to_string(), value);
        out.linear.insert(param.to_string(), LinearTerm { dv0, dcoeffs });
        out.name = format!("{}+{}", self.name, param);
        out
    }

    /// Regenerate a series potential to a higher order; polynomials are
    /// returned unchanged.
    pub fn with_order(&self, order: usize) -> Result<PotentialSpec> {
        if self.exact_tail || order <= self.jmax() {
            return Ok(self.clone());
        }
        match &self.closed_form {
            ClosedForm::SechSquared { strength, extra } => {
                let sech2 = sech_squared_series(order)?;
                let mut out = self.clone();
                out.coeffs = sech2[1..].iter().map(|c| c * strength).collect();
                for (j, e) in extra.iter().enumerate().skip(1) {
                    if j <= order {
                        out.coeffs[j - 1] += e;
                    }
                }
                for term in out.linear.values_mut() {
                    term.dcoeffs.resize(order, RBig::ZERO);
                }
                out.v0 = strength + extra.first().cloned().unwrap_or(RBig::ZERO);
                Ok(out)
            }
            ClosedForm::Polynomial => Err(RpmError::MissingCoefficient {
                index: order,
                available: self.jmax(),
            }),
        }
    }

    /// Real-valued potential at `x`, using the closed form where one exists.
    pub fn eval_real(&self, x: &BigReal, prec: Precision) -> BigReal {
        match &self.closed_form {
            ClosedForm::Polynomial => {
                let z = x * x;
                let mut acc = BigReal::zero(prec);
                for c in self.coeffs.iter().rev() {
                    acc = (acc + BigReal::from_rational(c, prec)) * &z;
                }
                acc + BigReal::from_rational(&self.v0, prec)
            }
            ClosedForm::SechSquared { strength, extra } => {
                let ex = x.with_precision(prec).exp();
                let cosh = (&ex + BigReal::one(prec) / &ex) / BigReal::from_int(2, prec);
                let z = x * x;
                let mut poly = BigReal::zero(prec);
                for c in extra.iter().rev() {
                    poly = poly * &z + BigReal::from_rational(c, prec);
                }
                BigReal::from_rational(strength, prec) / (&cosh * &cosh) + poly
            }
        }
    }

    /// Double-precision evaluation for the independent oracle.
    pub fn eval_f64(&self, x: f64) -> f64 {
        match &self.closed_form {
            ClosedForm::Polynomial => {
                let z = x * x;
                let mut acc = 0.0;
                for c in self.coeffs.iter().rev() {
                    acc = (acc + rational_to_f64(c)) * z;
                }
                acc + rational_to_f64(&self.v0)
            }
            ClosedForm::SechSquared { strength, extra } => {
                let c = x.cosh();
                let z = x * x;
                let poly = extra.iter().rev().fold(0.0, |acc, e| acc * z + rational_to_f64(e));
                rational_to_f64(strength) / (c * c) + poly
            }
        }
    }
}

pub fn rational_to_f64(r: &RBig) -> f64 {
    r.to_f64().value()
}

fn factorial(n: usize) -> UBig {
    (1..=n).fold(UBig::ONE, |acc, k| acc * UBig::from(k))
}

/// `r` with `(a · r) = 1 + O(z^{order+1})`.
pub fn series_reciprocal(a: &[RBig], order: usize) -> Result<Vec<RBig>> {
    let a0 = a.first().ok_or(RpmError::ZeroConstantTerm)?;
    if a0 == &RBig::ZERO {
        return Err(RpmError::ZeroConstantTerm);
    }
    let inv0 = RBig::ONE / a0;
    let mut r = Vec::with_capacity(order + 1);
    r.push(inv0.clone());
    for n in 1..=order {
        let mut acc = RBig::ZERO;
        for k in 1..=n.min(a.len() - 1) {
            acc += &a[k] * &r[n - k];
        }
        r.push(-acc * &inv0);
    }
    Ok(r)
}

/// `cosh²x = Σ c_k z^k` with `c_0 = 1`, `c_k = 2^{2k-1}/(2k)!`.
pub fn cosh_squared_series(order: usize) -> Vec<RBig> {
    (0..=order)
        .map(|k| {
            if k == 0 {
                RBig::ONE
            } else {
                RBig::from_parts(IBig::from(UBig::ONE << (2 * k - 1)), factorial(2 * k))
            }
        })
        .collect()
}

pub fn sech_squared_series(order: usize) -> Result<Vec<RBig>> {
    series_reciprocal(&cosh_squared_series(order), order)
}

fn required(model: &str, params: &BTreeMap<String, RBig>, name: &str) -> Result<RBig> {
    params
        .get(name)
        .cloned()
        .ok_or_else(|| RpmError::MissingParameter {
            model: model.to_string(),
            param: name.to_string(),
        })
}

fn polynomial_spec(name: &str, params: BTreeMap<String, RBig>, v0: RBig, mut coeffs: Vec<RBig>, order: usize) -> PotentialSpec {
    if coeffs.len() < order {
        coeffs.resize(order, RBig::ZERO);
    }
    PotentialSpec {
        name: name.to_string(),
        params,
        symbol: None,
        v0,
        coeffs,
        exact_tail: true,
        linear: BTreeMap::new(),
        closed_form: ClosedForm::Polynomial,
    }
}

fn unit_vector(len: usize, index: usize) -> Vec<RBig> {
    let mut v = vec![RBig::ZERO; len];
    v[index] = RBig::ONE;
    v
}

/// Build one of the built-in models to the requested series order.
///
/// `poly` takes its coefficients from `params` under the keys `c0, c1, ...`
/// (the coefficient of `x^{2j}` is `cj`); see [`parse_potential`] for the
/// command-line form.
pub fn series_coefficients(model: &str, params: &BTreeMap<String, RBig>, order: usize) -> Result<PotentialSpec> {
    if order < 1 {
        return Err(RpmError::OrderTooLow { min: 1, got: order });
    }
    let spec = match model {
        "harmonic" => polynomial_spec(model, BTreeMap::new(), RBig::ZERO, vec![RBig::ONE], order),
        "quartic" => polynomial_spec(model, BTreeMap::new(), RBig::ZERO, vec![RBig::ZERO, RBig::ONE], order),
        "x2x4" => {
            let lambda = required(model, params, "lambda")?;
            let mut spec = polynomial_spec(
                model,
                BTreeMap::from([("lambda".to_string(), lambda.clone())]),
                RBig::ZERO,
                vec![RBig::ONE, lambda],
                order,
            );
            let n = spec.coeffs.len();
            spec.linear.insert(
                "lambda".to_string(),
                LinearTerm { dv0: RBig::ZERO, dcoeffs: unit_vector(n, 1) },
            );
            spec
        }
        "dwell" => {
            let beta = required(model, params, "beta")?;
            let mut spec = polynomial_spec(
                model,
                BTreeMap::from([("beta".to_string(), beta.clone())]),
                RBig::ZERO,
                vec![beta, RBig::ONE],
                order,
            );
            let n = spec.coeffs.len();
            spec.linear.insert(
                "beta".to_string(),
                LinearTerm { dv0: RBig::ZERO, dcoeffs: unit_vector(n, 0) },
            );
            spec
        }
        "mpt" => {
            let lambda = required(model, params, "lambda")?;
            if lambda == RBig::ZERO || lambda == RBig::ONE {
                return Err(RpmError::InvalidParameter(
                    "mpt with lambda in {0, 1} is identically zero".to_string(),
                ));
            }
            let strength = -(&lambda * (&lambda - RBig::ONE));
            let sech2 = sech_squared_series(order)?;
            PotentialSpec {
                name: model.to_string(),
                params: BTreeMap::from([("lambda".to_string(), lambda)]),
                symbol: None,
                v0: &sech2[0] * &strength,
                coeffs: sech2[1..].iter().map(|c| c * &strength).collect(),
                exact_tail: false,
                linear: BTreeMap::new(),
                closed_form: ClosedForm::SechSquared { strength, extra: Vec::new() },
            }
        }
        "poly" => {
            let mut coeffs = Vec::new();
            while let Some(c) = params.get(&format!("c{}", coeffs.len())) {
                coeffs.push(c.clone());
            }
            if coeffs.is_empty() {
                return Err(RpmError::MissingParameter {
                    model: model.to_string(),
                    param: "c0".to_string(),
                });
            }
            let v0 = coeffs.remove(0);
            polynomial_spec(model, params.clone(), v0, coeffs, order)
        }
        other => return Err(RpmError::UnknownModel(other.to_string())),
    };
    Ok(spec)
}

/// Move the constant term out of the potential. Callers add `shift` back to
/// every eigenvalue computed for the returned spec.
pub fn shift_constant(spec: &PotentialSpec) -> (PotentialSpec, RBig) {
    let shift = spec.v0.clone();
    let mut out = spec.clone();
    out.v0 = RBig::ZERO;
    for term in out.linear.values_mut() {
        term.dv0 = RBig::ZERO;
    }
    if let ClosedForm::SechSquared { extra, .. } = &mut out.closed_form {
        if extra.is_empty() {
            extra.push(RBig::ZERO);
        }
        extra[0] = &extra[0] - &shift;
    }
    (out, shift)
}

/// Parse the potential mini-language: `harmonic`, `quartic`,
/// `x2x4:lambda=<r>`, `dwell:beta=<r>`, `mpt:lambda=<r>`, `poly:<c0>,<c1>,...`.
///
/// Rationals are integers or `p/q`; float literals are rejected. For `x2x4`
/// and `dwell` the value may instead be an identifier, which leaves the
/// parameter symbolic (for exact determinants).
pub fn parse_potential(text: &str, order: usize) -> Result<PotentialSpec> {
    let text = text.trim();
    let (model, rest) = match text.split_once(':') {
        Some((m, r)) => (m.trim(), Some(r.trim())),
        None => (text, None),
    };
    if !MODELS.contains(&model) {
        return Err(RpmError::UnknownModel(model.to_string()));
    }
    let mut params = BTreeMap::new();
    let mut symbolic = None;
    if model == "poly" {
        let list = rest.ok_or_else(|| RpmError::MissingParameter {
            model: model.to_string(),
            param: "c0".to_string(),
        })?;
        for (k, item) in list.split(',').enumerate() {
            let value = parse_rational(item)
                .ok_or_else(|| RpmError::Parse(format!("not a rational: {item:?}")))?;
            params.insert(format!("c{k}"), value);
        }
    } else if let Some(rest) = rest {
        for assignment in rest.split(',').filter(|s| !s.trim().is_empty()) {
            let (key, value) = assignment
                .split_once('=')
                .ok_or_else(|| RpmError::Parse(format!("expected name=value in {assignment:?}")))?;
            let key = key.trim();
            let value = value.trim();
            if let Some(r) = parse_rational(value) {
                params.insert(key.to_string(), r);
            } else if is_identifier(value) {
                if !matches!(model, "x2x4" | "dwell") {
                    return Err(RpmError::NonlinearParameter(key.to_string()));
                }
                if symbolic.is_some() {
                    return Err(RpmError::TooManySymbols);
                }
                params.insert(key.to_string(), RBig::ZERO);
                symbolic = Some((key.to_string(), value.to_string()));
            } else {
                return Err(RpmError::Parse(format!(
                    "parameter {key}: {value:?} is not a rational (use p/q, no float literals)"
                )));
            }
        }
    }
    let spec = series_coefficients(model, &params, order)?;
    match symbolic {
        Some((key, _display)) => spec.make_symbolic(&key),
        None => Ok(spec),
    }
}

/// Name the symbolic parameter was given on the command line, if any.
pub fn symbolic_display_name(text: &str) -> Option<String> {
    let (_, rest) = text.split_once(':')?;
    rest.split(',').find_map(|a| {
        let (_, v) = a.split_once('=')?;
        let v = v.trim();
        (parse_rational(v).is_none() && is_identifier(v)).then(|| v.to_string())
    })
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: u64) -> RBig {
        RBig::from_parts(IBig::from(n), UBig::from(d))
    }

    fn series_product(a: &[RBig], b: &[RBig], order: usize) -> Vec<RBig> {
        (0..=order)
            .map(|n| {
                (0..=n)
                    .filter(|k| *k < a.len() && n - k < b.len())
                    .map(|k| &a[k] * &b[n - k])
                    .fold(RBig::ZERO, |acc, x| acc + x)
            })
            .collect()
    }

    #[test]
    fn reciprocal_examples() {
        let identity = series_reciprocal(&[RBig::ONE, RBig::ZERO, RBig::ZERO], 2).unwrap();
        assert_eq!(identity, vec![RBig::ONE, RBig::ZERO, RBig::ZERO]);
        let geometric = series_reciprocal(&[RBig::ONE, RBig::ONE], 3).unwrap();
        assert_eq!(geometric, vec![q(1, 1), q(-1, 1), q(1, 1), q(-1, 1)]);
        let cosh2 = cosh_squared_series(3);
        assert_eq!(cosh2, vec![q(1, 1), q(1, 1), q(1, 3), q(2, 45)]);
        let sech2 = series_reciprocal(&cosh2, 3).unwrap();
        assert_eq!(sech2, vec![q(1, 1), q(-1, 1), q(2, 3), q(-17, 45)]);
        assert_eq!(series_reciprocal(&[RBig::ZERO, RBig::ONE], 2), Err(RpmError::ZeroConstantTerm));
    }

    #[test]
    fn reciprocal_product_is_one_through_order() {
        let cosh2 = cosh_squared_series(16);
        let r = series_reciprocal(&cosh2, 16).unwrap();
        let prod = series_product(&cosh2, &r, 16);
        assert_eq!(prod[0], RBig::ONE);
        assert!(prod[1..].iter().all(|c| c == &RBig::ZERO));
    }

    #[test]
    fn model_examples() {
        let h = series_coefficients("harmonic", &BTreeMap::new(), 4).unwrap();
        assert_eq!(h.coeffs, vec![q(1, 1), q(0, 1), q(0, 1), q(0, 1)]);
        assert_eq!(h.v0, RBig::ZERO);

        let dw = series_coefficients("dwell", &BTreeMap::from([("beta".into(), q(-5, 1))]), 2).unwrap();
        assert_eq!(dw.coeffs, vec![q(-5, 1), q(1, 1)]);

        let mpt = series_coefficients("mpt", &BTreeMap::from([("lambda".into(), q(3, 1))]), 3).unwrap();
        assert_eq!(mpt.v0, q(-6, 1));
        assert_eq!(mpt.coeffs, vec![q(6, 1), q(-4, 1), q(34, 15)]);
    }

    #[test]
    fn model_errors() {
        let none = BTreeMap::new();
        assert!(matches!(series_coefficients("morse", &none, 2), Err(RpmError::UnknownModel(_))));
        assert!(matches!(series_coefficients("x2x4", &none, 2), Err(RpmError::MissingParameter { .. })));
        assert!(matches!(series_coefficients("harmonic", &none, 0), Err(RpmError::OrderTooLow { .. })));
        for bad in [0, 1] {
            let params = BTreeMap::from([("lambda".to_string(), q(bad, 1))]);
            assert!(matches!(series_coefficients("mpt", &params, 3), Err(RpmError::InvalidParameter(_))));
        }
    }

    #[test]
    fn truncation_is_loud_except_for_polynomials() {
        let mpt = parse_potential("mpt:lambda=3", 3).unwrap();
        assert!(matches!(mpt.coefficient(4), Err(RpmError::MissingCoefficient { index: 4, available: 3 })));
        let quartic = parse_potential("quartic", 2).unwrap();
        assert_eq!(quartic.coefficient(40).unwrap(), RBig::ZERO);
        let longer = mpt.with_order(6).unwrap();
        assert_eq!(longer.coeffs[..3], mpt.coeffs[..]);
        assert_eq!(longer.jmax(), 6);
    }

    #[test]
    fn mpt_coefficients_alternate_in_sign() {
        let mpt = parse_potential("mpt:lambda=3", 16).unwrap();
        let all: Vec<RBig> = std::iter::once(mpt.v0.clone()).chain(mpt.coeffs.iter().cloned()).collect();
        for (j, c) in all.iter().enumerate() {
            let negative = c.numerator() < &IBig::ZERO;
            assert_eq!(negative, j % 2 == 0, "V_{j} = {c}");
        }
    }

    #[test]
    fn deterministic_generation() {
        let a = parse_potential("mpt:lambda=5/2", 12).unwrap();
        let b = parse_potential("mpt:lambda=5/2", 12).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.fingerprint(), b.fingerprint());
    }

    #[test]
    fn shift_examples() {
        let h = parse_potential("harmonic", 2).unwrap();
        let (shifted, shift) = shift_constant(&h);
        assert_eq!((shifted, shift), (h, RBig::ZERO));

        let mpt = parse_potential("mpt:lambda=3", 3).unwrap();
        let (shifted, shift) = shift_constant(&mpt);
        assert_eq!(shift, q(-6, 1));
        assert_eq!(shifted.v0, RBig::ZERO);
        assert_eq!(shifted.coeffs, mpt.coeffs);

        let p = parse_potential("poly:7/2,1,0,1", 3).unwrap();
        let (shifted, shift) = shift_constant(&p);
        assert_eq!(shift, q(7, 2));
        assert_eq!(shifted.coeffs, p.coeffs);
    }

    #[test]
    fn mini_language() {
        let x = parse_potential("x2x4:lambda=1/10", 2).unwrap();
        assert_eq!(x.coeffs, vec![q(1, 1), q(1, 10)]);
        assert!(matches!(parse_potential("x2x4:lambda=0.1", 2), Err(RpmError::Parse(_))));
        assert!(matches!(parse_potential("poly:1,2.5", 2), Err(RpmError::Parse(_))));
        let sym = parse_potential("x2x4:lambda=L", 2).unwrap();
        assert_eq!(sym.symbol.as_deref(), Some("lambda"));
        assert_eq!(sym.coeffs, vec![q(1, 1), q(0, 1)]);
        assert_eq!(symbolic_display_name("x2x4:lambda=L").as_deref(), Some("L"));
        assert!(matches!(parse_potential("mpt:lambda=L", 4), Err(RpmError::NonlinearParameter(_))));
        let bound = sym.with_param("lambda", q(2, 1)).unwrap();
        assert_eq!(bound.coeffs, vec![q(1, 1), q(2, 1)]);
    }

    #[test]
    fn closed_form_tracks_shift() {
        let prec = Precision::new(30).unwrap();
        let mpt = parse_potential("mpt:lambda=3", 8).unwrap();
        let (shifted, _) = shift_constant(&mpt);
        let x = BigReal::parse("0.5", prec).unwrap();
        let original = mpt.eval_real(&x, prec).to_f64();
        let moved = shifted.eval_real(&x, prec).to_f64();
        assert!((original - moved + 6.0).abs() < 1e-14);
        assert!((original + 6.0 / 0.5f64.cosh().powi(2)).abs() < 1e-14);
        assert!((mpt.eval_f64(0.5) - original).abs() < 1e-14);
    }
}
