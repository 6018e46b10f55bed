//! Dense polynomials in the energy `E`, optionally bivariate in one potential
//! parameter, with exact rational coefficients.

use std::fmt;

use dashu_int::IBig;
use dashu_ratio::RBig;

use crate::number::{BigReal, Precision, Ring};

/// `Σ c[i][j] E^i p^j` in canonical form: no trailing zeros in either index.
///
/// The zero polynomial has no rows; its degree is reported as `None`, which
/// stands for minus infinity.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct RationalPoly {
    coeffs: Vec<Vec<RBig>>,
}

impl RationalPoly {
    pub fn zero() -> Self {
        RationalPoly { coeffs: Vec::new() }
    }

    pub fn constant(value: RBig) -> Self {
        Self::from_rows(vec![vec![value]])
    }

    pub fn from_int(value: i64) -> Self {
        Self::constant(RBig::from(value))
    }

    /// The energy variable `E`.
    pub fn energy() -> Self {
        Self::from_rows(vec![vec![], vec![RBig::ONE]])
    }

    /// The symbolic parameter `p`.
    pub fn param() -> Self {
        Self::from_rows(vec![vec![RBig::ZERO, RBig::ONE]])
    }

    /// Univariate polynomial in `E` from ascending coefficients.
    pub fn from_energy_coeffs(coeffs: Vec<RBig>) -> Self {
        Self::from_rows(coeffs.into_iter().map(|c| vec![c]).collect())
    }

    /// Rows indexed by the power of `E`, each holding ascending powers of `p`.
    pub fn from_rows(rows: Vec<Vec<RBig>>) -> Self {
        let mut poly = RationalPoly { coeffs: rows };
        poly.normalize();
        poly
    }

    fn normalize(&mut self) {
        for row in &mut self.coeffs {
            while row.last().is_some_and(|c| c == &RBig::ZERO) {
                row.pop();
            }
        }
        while self.coeffs.last().is_some_and(|row| row.is_empty()) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree in `E`; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Highest power of the parameter appearing anywhere.
    pub fn param_degree(&self) -> Option<usize> {
        self.coeffs
            .iter()
            .filter_map(|row| row.len().checked_sub(1))
            .max()
    }

    pub fn coeff(&self, energy_pow: usize, param_pow: usize) -> RBig {
        self.coeffs
            .get(energy_pow)
            .and_then(|row| row.get(param_pow))
            .cloned()
            .unwrap_or(RBig::ZERO)
    }

    /// Coefficient of `E^i` as a polynomial in the parameter (ascending).
    pub fn energy_coeff(&self, energy_pow: usize) -> &[RBig] {
        self.coeffs
            .get(energy_pow)
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn term_count(&self) -> usize {
        self.coeffs
            .iter()
            .map(|row| row.iter().filter(|c| *c != &RBig::ZERO).count())
            .sum()
    }

    /// Leading term in lex order (`E` before `p`): `(i, j, coefficient)`.
    pub fn leading_term(&self) -> Option<(usize, usize, RBig)> {
        let i = self.degree()?;
        let row = &self.coeffs[i];
        let j = row.len() - 1;
        Some((i, j, row[j].clone()))
    }

    /// Divide by the leading coefficient; display normalization only.
    pub fn monic(&self) -> Self {
        match self.leading_term() {
            Some((_, _, lead)) => self.scale(&(RBig::ONE / lead)),
            None => self.clone(),
        }
    }

    pub fn scale(&self, factor: &RBig) -> Self {
        Self::from_rows(
            self.coeffs
                .iter()
                .map(|row| row.iter().map(|c| c * factor).collect())
                .collect(),
        )
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let rows = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(rows);
        for i in 0..rows {
            let a = self.energy_coeff(i);
            let b = rhs.energy_coeff(i);
            let cols = a.len().max(b.len());
            out.push(
                (0..cols)
                    .map(|j| {
                        let x = a.get(j).cloned().unwrap_or(RBig::ZERO);
                        match b.get(j) {
                            Some(y) => x + y,
                            None => x,
                        }
                    })
                    .collect(),
            );
        }
        Self::from_rows(out)
    }

    pub fn neg(&self) -> Self {
        self.scale(&RBig::NEG_ONE)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        let rows = self.coeffs.len() + rhs.coeffs.len() - 1;
        let cols = self.param_degree().unwrap_or(0) + rhs.param_degree().unwrap_or(0) + 1;
        let mut out = vec![vec![RBig::ZERO; cols]; rows];
        for (i, a_row) in self.coeffs.iter().enumerate() {
            for (j, a) in a_row.iter().enumerate() {
                if a == &RBig::ZERO {
                    continue;
                }
                for (k, b_row) in rhs.coeffs.iter().enumerate() {
                    for (l, b) in b_row.iter().enumerate() {
                        if b != &RBig::ZERO {
                            out[i + k][j + l] += a * b;
                        }
                    }
                }
            }
        }
        Self::from_rows(out)
    }

    pub fn pow(&self, exp: u32) -> Self {
        (0..exp).fold(Self::from_int(1), |acc, _| acc.mul(self))
    }

    /// Exact quotient `self / divisor`, or `None` when the division leaves a
    /// remainder. Uses the lex leading-term reduction, which is exact for a
    /// single divisor.
    pub fn div_exact(&self, divisor: &Self) -> Option<Self> {
        let (di, dj, dc) = divisor.leading_term()?;
        let mut rem = self.clone();
        let mut quotient = Self::zero();
        while let Some((i, j, c)) = rem.leading_term() {
            if i < di || j < dj {
                return None;
            }
            let mut rows = vec![Vec::new(); i - di + 1];
            let mut row = vec![RBig::ZERO; j - dj + 1];
            row[j - dj] = c / &dc;
            rows[i - di] = row;
            let term = Self::from_rows(rows);
            rem = rem.sub(&term.mul(divisor));
            quotient = quotient.add(&term);
        }
        Some(quotient)
    }

    /// Replace the parameter by a rational value.
    pub fn substitute_param(&self, value: &RBig) -> Self {
        Self::from_energy_coeffs(
            self.coeffs
                .iter()
                .map(|row| horner_rational(row, value))
                .collect(),
        )
    }

    pub fn eval(&self, energy: &RBig, param: &RBig) -> RBig {
        let rows: Vec<RBig> = self
            .coeffs
            .iter()
            .map(|row| horner_rational(row, param))
            .collect();
        horner_rational(&rows, energy)
    }

    /// Evaluate at real arguments; an absent parameter is taken as zero.
    pub fn eval_real(&self, energy: &BigReal, param: Option<&BigReal>, prec: Precision) -> BigReal {
        let mut acc = BigReal::zero(prec);
        for row in self.coeffs.iter().rev() {
            let mut inner = BigReal::zero(prec);
            if let Some(p) = param {
                for c in row.iter().rev() {
                    inner = inner * p + BigReal::from_rational(c, prec);
                }
            } else if let Some(c) = row.first() {
                inner = BigReal::from_rational(c, prec);
            }
            acc = acc * energy + inner;
        }
        acc
    }

    /// `d/dE`.
    pub fn derivative_energy(&self) -> Self {
        Self::from_rows(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, row)| row.iter().map(|c| c * RBig::from(i as i64)).collect())
                .collect(),
        )
    }

    /// Render with the given variable names, highest `E` power first.
    pub fn render(&self, energy_name: &str, param_name: &str) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for i in (0..self.coeffs.len()).rev() {
            for j in (0..self.coeffs[i].len()).rev() {
                let c = &self.coeffs[i][j];
                if c == &RBig::ZERO {
                    continue;
                }
                let negative = c.numerator() < &IBig::ZERO;
                let magnitude = if negative { -c.clone() } else { c.clone() };
                if out.is_empty() {
                    if negative {
                        out.push('-');
                    }
                } else {
                    out.push_str(if negative { " - " } else { " + " });
                }
                let mut factors = Vec::new();
                if magnitude != RBig::ONE || (i == 0 && j == 0) {
                    factors.push(magnitude.to_string());
                }
                if i > 0 {
                    factors.push(power(energy_name, i));
                }
                if j > 0 {
                    factors.push(power(param_name, j));
                }
                out.push_str(&factors.join("*"));
            }
        }
        out
    }
}

fn power(name: &str, exp: usize) -> String {
    if exp == 1 {
        name.to_string()
    } else {
        format!("{name}^{exp}")
    }
}

fn horner_rational(coeffs: &[RBig], x: &RBig) -> RBig {
    coeffs
        .iter()
        .rev()
        .fold(RBig::ZERO, |acc, c| acc * x + c)
}

impl fmt::Display for RationalPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render("E", "p"))
    }
}

impl Ring for RationalPoly {
    fn zero_like(&self) -> Self {
        Self::zero()
    }
    fn add_ref(&self, rhs: &Self) -> Self {
        self.add(rhs)
    }
    fn sub_ref(&self, rhs: &Self) -> Self {
        self.sub(rhs)
    }
    fn mul_ref(&self, rhs: &Self) -> Self {
        self.mul(rhs)
    }
    fn div_int(&self, k: u64) -> Self {
        self.scale(&RBig::from_parts(IBig::ONE, k.into()))
    }
    fn is_zero(&self) -> bool {
        RationalPoly::is_zero(self)
    }
}
