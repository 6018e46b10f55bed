//! Multi-precision scalars used by every numeric path.
//!
//! [`BigReal`] wraps a binary floating-point value whose working precision is
//! chosen explicitly by the caller through [`Precision`]; there is no global
//! precision state. [`DualReal`] carries two forward-mode tangent slots, one
//! for the energy and one for a designated potential parameter.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use dashu_float::round::mode::HalfEven;
use dashu_float::FBig;
use dashu_int::ops::{BitTest, UnsignedAbs};
use dashu_int::{IBig, UBig};
use dashu_ratio::RBig;

use crate::error::{Result, RpmError};

type Float = FBig<HalfEven, 2>;

/// Smallest working precision accepted anywhere in the crate.
pub const MIN_DIGITS: u32 = 20;

const LOG2_10: f64 = std::f64::consts::LOG2_10;

/// Working precision in decimal digits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Precision(u32);

impl Precision {
    pub fn new(digits: u32) -> Result<Self> {
        if digits < MIN_DIGITS {
            return Err(RpmError::PrecisionTooLow(digits));
        }
        Ok(Precision(digits))
    }

    pub fn digits(self) -> u32 {
        self.0
    }

    /// Binary significand length used for this many decimal digits, with a
    /// few guard bits.
    pub fn bits(self) -> usize {
        (self.0 as f64 * LOG2_10).ceil() as usize + 8
    }

    pub fn plus(self, extra: u32) -> Self {
        Precision(self.0 + extra)
    }

    /// Grow by half, rounded up.
    pub fn escalate(self) -> Self {
        Precision(self.0 + self.0.div_ceil(2))
    }

    /// `10^{-digits}`, the unit roundoff at this precision.
    pub fn epsilon(self) -> BigReal {
        BigReal::ten_pow(-(self.0 as i64), self)
    }
}

impl fmt::Display for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Configurable-precision real number.
#[derive(Clone, Debug)]
pub struct BigReal(Float);

impl BigReal {
    fn wrap(value: Float, prec: Precision) -> Self {
        BigReal(value.with_precision(prec.bits()).value())
    }

    pub fn zero(prec: Precision) -> Self {
        Self::from_int(0, prec)
    }

    pub fn one(prec: Precision) -> Self {
        Self::from_int(1, prec)
    }

    pub fn from_int(value: i64, prec: Precision) -> Self {
        Self::wrap(Float::from(value), prec)
    }

    pub fn from_rational(value: &RBig, prec: Precision) -> Self {
        BigReal(value.to_float::<HalfEven, 2>(prec.bits()).value())
    }

    /// Exact conversion of the binary double, then rounded to `prec`.
    pub fn from_f64(value: f64, prec: Precision) -> Self {
        let exact = Float::try_from(value).unwrap_or(Float::ZERO);
        Self::wrap(exact, prec)
    }

    /// Parse a decimal literal (`-1.25`, `3e-4`, `7/2`).
    pub fn parse(text: &str, prec: Precision) -> Result<Self> {
        let text = text.trim();
        if let Some(rational) = parse_rational_or_decimal(text) {
            return Ok(Self::from_rational(&rational, prec));
        }
        Err(RpmError::Parse(format!("not a real number: {text:?}")))
    }

    /// `10^exp` correctly rounded at `prec`.
    pub fn ten_pow(exp: i64, prec: Precision) -> Self {
        let pow = UBig::from(10u8).pow(exp.unsigned_abs() as usize);
        let rational = if exp >= 0 {
            RBig::from(pow)
        } else {
            RBig::from_parts(IBig::ONE, pow)
        };
        Self::from_rational(&rational, prec)
    }

    pub fn precision(&self) -> Precision {
        let bits = self.0.precision();
        Precision(((bits.saturating_sub(8)) as f64 / LOG2_10).floor() as u32)
    }

    pub fn with_precision(&self, prec: Precision) -> Self {
        Self::wrap(self.0.clone(), prec)
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().value()
    }

    /// Exact rational value of the stored binary float.
    pub fn to_rational(&self) -> RBig {
        RBig::try_from(self.0.clone()).unwrap_or(RBig::ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.0.repr().significand() == &IBig::ZERO
    }

    pub fn is_negative(&self) -> bool {
        self.0.repr().significand() < &IBig::ZERO
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    pub fn sqrt(&self) -> Self {
        BigReal(self.0.sqrt())
    }

    pub fn exp(&self) -> Self {
        BigReal(self.0.exp())
    }

    pub fn ln(&self) -> Self {
        BigReal(self.0.ln())
    }

    pub fn max<'a>(&'a self, other: &'a Self) -> &'a Self {
        if self >= other {
            self
        } else {
            other
        }
    }

    /// `log10 |x|` without underflow for tiny or huge values; `-inf` for zero.
    pub fn log10_abs(&self) -> f64 {
        let repr = self.0.repr();
        if repr.significand() == &IBig::ZERO {
            return f64::NEG_INFINITY;
        }
        let sig = repr.significand().unsigned_abs();
        let bits = sig.bit_len();
        let shift = bits.saturating_sub(62);
        let top: u64 = (&sig >> shift).try_into().unwrap_or(u64::MAX);
        let log2 = (top as f64).log2() + shift as f64 + repr.exponent() as f64;
        log2 / LOG2_10
    }

    /// Decimal string with `sig` significant digits, rounded half-to-even.
    pub fn to_sig_string(&self, sig: usize) -> String {
        format_significant(&self.to_rational(), sig)
    }
}

impl Default for BigReal {
    fn default() -> Self {
        BigReal::zero(Precision(MIN_DIGITS))
    }
}

impl fmt::Display for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(self.precision().digits() as usize);
        f.write_str(&self.to_sig_string(digits.max(1)))
    }
}

impl PartialEq for BigReal {
    fn eq(&self, other: &Self) -> bool {
        self.0.repr() == other.0.repr()
    }
}

impl PartialOrd for BigReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.partial_cmp(&other.0)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<&BigReal> for &BigReal {
            type Output = BigReal;
            fn $method(self, rhs: &BigReal) -> BigReal {
                BigReal($trait::$method(&self.0, &rhs.0))
            }
        }
        impl $trait<BigReal> for BigReal {
            type Output = BigReal;
            fn $method(self, rhs: BigReal) -> BigReal {
                BigReal($trait::$method(self.0, rhs.0))
            }
        }
        impl $trait<&BigReal> for BigReal {
            type Output = BigReal;
            fn $method(self, rhs: &BigReal) -> BigReal {
                BigReal($trait::$method(self.0, &rhs.0))
            }
        }
        impl $trait<BigReal> for &BigReal {
            type Output = BigReal;
            fn $method(self, rhs: BigReal) -> BigReal {
                BigReal($trait::$method(&self.0, rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl Neg for BigReal {
    type Output = BigReal;
    fn neg(self) -> BigReal {
        BigReal(-self.0)
    }
}

impl Neg for &BigReal {
    type Output = BigReal;
    fn neg(self) -> BigReal {
        BigReal(-self.0.clone())
    }
}

/// Value with tangents along the energy and one potential parameter.
#[derive(Clone, Debug, PartialEq)]
pub struct DualReal {
    pub value: BigReal,
    pub d_energy: BigReal,
    pub d_param: BigReal,
}

impl DualReal {
    pub fn constant(value: BigReal) -> Self {
        let zero = BigReal::zero(value.precision());
        DualReal {
            value,
            d_energy: zero.clone(),
            d_param: zero,
        }
    }

    pub fn new(value: BigReal, d_energy: BigReal, d_param: BigReal) -> Self {
        DualReal {
            value,
            d_energy,
            d_param,
        }
    }

    /// Independent energy variable: tangent 1 in the energy slot.
    pub fn energy(value: BigReal) -> Self {
        let prec = value.precision();
        DualReal {
            value,
            d_energy: BigReal::one(prec),
            d_param: BigReal::zero(prec),
        }
    }
}

impl Add<&DualReal> for &DualReal {
    type Output = DualReal;
    fn add(self, rhs: &DualReal) -> DualReal {
        DualReal {
            value: &self.value + &rhs.value,
            d_energy: &self.d_energy + &rhs.d_energy,
            d_param: &self.d_param + &rhs.d_param,
        }
    }
}

impl Sub<&DualReal> for &DualReal {
    type Output = DualReal;
    fn sub(self, rhs: &DualReal) -> DualReal {
        DualReal {
            value: &self.value - &rhs.value,
            d_energy: &self.d_energy - &rhs.d_energy,
            d_param: &self.d_param - &rhs.d_param,
        }
    }
}

impl Mul<&DualReal> for &DualReal {
    type Output = DualReal;
    fn mul(self, rhs: &DualReal) -> DualReal {
        DualReal {
            value: &self.value * &rhs.value,
            d_energy: &self.value * &rhs.d_energy + &self.d_energy * &rhs.value,
            d_param: &self.value * &rhs.d_param + &self.d_param * &rhs.value,
        }
    }
}

impl Div<&DualReal> for &DualReal {
    type Output = DualReal;
    fn div(self, rhs: &DualReal) -> DualReal {
        let value = &self.value / &rhs.value;
        DualReal {
            d_energy: (&self.d_energy - &value * &rhs.d_energy) / &rhs.value,
            d_param: (&self.d_param - &value * &rhs.d_param) / &rhs.value,
            value,
        }
    }
}

impl Neg for &DualReal {
    type Output = DualReal;
    fn neg(self) -> DualReal {
        DualReal {
            value: -&self.value,
            d_energy: -&self.d_energy,
            d_param: -&self.d_param,
        }
    }
}

/// Arithmetic shared by the numeric and symbolic recurrence modes.
pub trait Ring: Clone {
    fn zero_like(&self) -> Self;
    fn add_ref(&self, rhs: &Self) -> Self;
    fn sub_ref(&self, rhs: &Self) -> Self;
    fn mul_ref(&self, rhs: &Self) -> Self;
    /// Division by a positive integer, exact in every mode.
    fn div_int(&self, k: u64) -> Self;
    fn is_zero(&self) -> bool;
}

/// Ring with division and a magnitude for pivot selection.
pub trait Field: Ring {
    fn div_ref(&self, rhs: &Self) -> Self;
    fn magnitude(&self) -> BigReal;
}

impl Ring for BigReal {
    fn zero_like(&self) -> Self {
        BigReal::zero(self.precision())
    }
    fn add_ref(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub_ref(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul_ref(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn div_int(&self, k: u64) -> Self {
        BigReal(&self.0 / Float::from(k))
    }
    fn is_zero(&self) -> bool {
        BigReal::is_zero(self)
    }
}

impl Field for BigReal {
    fn div_ref(&self, rhs: &Self) -> Self {
        self / rhs
    }
    fn magnitude(&self) -> BigReal {
        self.abs()
    }
}

impl Ring for DualReal {
    fn zero_like(&self) -> Self {
        DualReal::constant(self.value.zero_like())
    }
    fn add_ref(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub_ref(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul_ref(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn div_int(&self, k: u64) -> Self {
        DualReal {
            value: self.value.div_int(k),
            d_energy: self.d_energy.div_int(k),
            d_param: self.d_param.div_int(k),
        }
    }
    fn is_zero(&self) -> bool {
        self.value.is_zero() && self.d_energy.is_zero() && self.d_param.is_zero()
    }
}

impl Field for DualReal {
    fn div_ref(&self, rhs: &Self) -> Self {
        self / rhs
    }
    fn magnitude(&self) -> BigReal {
        self.value.abs()
    }
}

/// Parse `p/q`, an integer, or a plain decimal literal into an exact rational.
pub fn parse_rational_or_decimal(text: &str) -> Option<RBig> {
    if let Some(r) = parse_rational(text) {
        return Some(r);
    }
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(pos) => (&text[..pos], text[pos + 1..].parse::<i64>().ok()?),
        None => (text, 0),
    };
    let (negative, body) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let mut numerator = IBig::from_str(if digits.is_empty() { "0" } else { &digits }).ok()?;
    if negative {
        numerator = -numerator;
    }
    let scale = exponent - frac_part.len() as i64;
    let pow = UBig::from(10u8).pow(scale.unsigned_abs() as usize);
    Some(if scale >= 0 {
        RBig::from(numerator * IBig::from(pow))
    } else {
        RBig::from_parts(numerator, pow)
    })
}

/// Strict rational literal: an integer or `p/q` with integer parts.
pub fn parse_rational(text: &str) -> Option<RBig> {
    let text = text.trim();
    let valid_int = |s: &str| {
        let digits = s.strip_prefix(['-', '+']).unwrap_or(s);
        !digits.is_empty() && digits.chars().all(|c| c.is_ascii_digit())
    };
    match text.split_once('/') {
        Some((num, den)) => {
            if !valid_int(num) || !den.chars().all(|c| c.is_ascii_digit()) || den.is_empty() {
                return None;
            }
            let num = IBig::from_str(num.strip_prefix('+').unwrap_or(num)).ok()?;
            let den = UBig::from_str(den).ok()?;
            if den == UBig::ZERO {
                return None;
            }
            Some(RBig::from_parts(num, den))
        }
        None => {
            if !valid_int(text) {
                return None;
            }
            IBig::from_str(text.strip_prefix('+').unwrap_or(text))
                .ok()
                .map(RBig::from)
        }
    }
}

/// Round-half-even decimal rendering of an exact rational with `sig`
/// significant digits. Trailing zeros are kept so the digit count is explicit.
pub fn format_significant(value: &RBig, sig: usize) -> String {
    let sig = sig.max(1);
    if value.numerator() == &IBig::ZERO {
        return if sig == 1 {
            "0".to_string()
        } else {
            format!("0.{}", "0".repeat(sig - 1))
        };
    }
    let negative = value.numerator() < &IBig::ZERO;
    let num = value.numerator().unsigned_abs();
    let den = value.denominator().clone();

    // decimal exponent e with 10^e <= |x| < 10^{e+1}
    let mut exp = {
        let approx = num.bit_len() as f64 - den.bit_len() as f64;
        (approx / LOG2_10).floor() as i64
    };
    loop {
        let (lo_num, lo_den) = scaled(&UBig::ONE, &UBig::ONE, exp);
        if &num * &lo_den < &den * &lo_num {
            exp -= 1;
            continue;
        }
        let (hi_num, hi_den) = scaled(&UBig::ONE, &UBig::ONE, exp + 1);
        if &num * &hi_den >= &den * &hi_num {
            exp += 1;
            continue;
        }
        break;
    }

    // N = round_half_even(|x| * 10^{sig-1-exp})
    let shift = sig as i64 - 1 - exp;
    let (scaled_num, scaled_den) = scaled(&num, &den, shift);
    let quotient = &scaled_num / &scaled_den;
    let remainder = &scaled_num - &quotient * &scaled_den;
    let twice = &remainder * UBig::from(2u8);
    let mut rounded = quotient.clone();
    if twice > scaled_den || (twice == scaled_den && (&quotient % UBig::from(2u8)) == UBig::ONE) {
        rounded += UBig::ONE;
    }
    let mut digits = rounded.to_string();
    if digits.len() > sig {
        exp += 1;
        digits.truncate(sig);
    }

    let mut out = String::new();
    if negative {
        out.push('-');
    }
    if (-7..=20).contains(&exp) {
        if exp < 0 {
            out.push_str("0.");
            out.push_str(&"0".repeat((-exp - 1) as usize));
            out.push_str(&digits);
        } else {
            let int_len = exp as usize + 1;
            if digits.len() <= int_len {
                out.push_str(&digits);
                out.push_str(&"0".repeat(int_len - digits.len()));
            } else {
                out.push_str(&digits[..int_len]);
                out.push('.');
                out.push_str(&digits[int_len..]);
            }
        }
    } else {
        out.push_str(&digits[..1]);
        if digits.len() > 1 {
            out.push('.');
            out.push_str(&digits[1..]);
        }
        out.push_str(&format!("e{exp}"));
    }
    out
}

fn scaled(num: &UBig, den: &UBig, exp10: i64) -> (UBig, UBig) {
    let pow = UBig::from(10u8).pow(exp10.unsigned_abs() as usize);
    if exp10 >= 0 {
        (num * pow, den.clone())
    } else {
        (num.clone(), den * pow)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(d: u32) -> Precision {
        Precision::new(d).unwrap()
    }

    #[test]
    fn precision_floor_is_enforced() {
        assert!(Precision::new(19).is_err());
        assert_eq!(p(40).escalate().digits(), 60);
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("-5"), Some(RBig::from(-5)));
        assert_eq!(
            parse_rational("34/15"),
            Some(RBig::from_parts(IBig::from(34), UBig::from(15u8)))
        );
        assert_eq!(parse_rational("1.5"), None);
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("abc"), None);
        assert_eq!(
            parse_rational_or_decimal("-1.25e1"),
            Some(RBig::from_parts(IBig::from(-25), UBig::from(2u8)))
        );
    }

    #[test]
    fn half_even_rounding() {
        let r = |s: &str| parse_rational_or_decimal(s).unwrap();
        assert_eq!(format_significant(&r("1.25"), 2), "1.2");
        assert_eq!(format_significant(&r("1.35"), 2), "1.4");
        assert_eq!(format_significant(&r("-3.99999999999999999999999"), 20), "-4.0000000000000000000");
        assert_eq!(format_significant(&r("0.000123456"), 3), "0.000123");
        assert_eq!(format_significant(&r("123456"), 3), "123000");
        assert_eq!(format_significant(&r("1e-30"), 2), "1.0e-30");
        assert_eq!(format_significant(&RBig::ZERO, 3), "0.00");
    }

    #[test]
    fn arithmetic_and_magnitudes() {
        let prec = p(40);
        let third = BigReal::one(prec) / BigReal::from_int(3, prec);
        assert_eq!(third.to_sig_string(10), "0.3333333333");
        let tiny = BigReal::ten_pow(-300, prec) * BigReal::ten_pow(-300, prec);
        assert!((tiny.log10_abs() + 600.0).abs() < 1e-9);
        assert!(BigReal::from_int(-2, prec).is_negative());
        assert_eq!(BigReal::from_int(2, prec).sqrt().to_sig_string(12), "1.41421356237");
    }

    #[test]
    fn dual_product_and_quotient_rules() {
        let prec = p(30);
        let x = DualReal::new(BigReal::from_int(3, prec), BigReal::one(prec), BigReal::zero(prec));
        let y = DualReal::new(BigReal::from_int(2, prec), BigReal::zero(prec), BigReal::one(prec));
        let prod = &x * &y;
        assert_eq!(prod.d_energy.to_f64(), 2.0);
        assert_eq!(prod.d_param.to_f64(), 3.0);
        let quot = &x / &y;
        assert_eq!(quot.d_energy.to_f64(), 0.5);
        assert_eq!(quot.d_param.to_f64(), -0.75);
    }
}
