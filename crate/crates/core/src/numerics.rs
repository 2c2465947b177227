//! Scalar abstractions: exact and extended-precision arithmetic.
//!
//! Everything above this module is generic over [`Field`] (exact field
//! operations) or [`Real`] (field plus `sqrt`, trigonometry and logarithms).
//! Implementations are provided for `f32`, `f64`, [`BigRational`] (exact) and
//! [`BigFloat`] (MPFR-backed binary floating point at a per-run precision).

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::hash::Hash;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rug::float::Constant;
use rug::Float;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NumericsError {
    #[error("mixed precision operands: {0} vs {1}")]
    MixedPrecision(String, String),
    #[error("invalid precision {0} (must be at least 24 bits)")]
    InvalidPrecision(u32),
    #[error("cannot parse {0:?} as a decimal number")]
    Parse(String),
    #[error("angle denominator must be positive, got {0}")]
    ZeroDenominator(i64),
}

/// Exact field operations shared by every scalar type in the crate.
pub trait Field:
    Clone
    + fmt::Debug
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// Whatever a value needs to be constructed from nothing (precision for
    /// [`BigFloat`], `()` otherwise).
    type Context: Copy + fmt::Debug + PartialEq + Eq + Hash + Send + Sync + 'static;

    fn context(&self) -> Self::Context;
    fn from_i64(ctx: Self::Context, v: i64) -> Self;
    fn from_f64(ctx: Self::Context, v: f64) -> Self;
    fn from_rational(ctx: Self::Context, q: &BigRational) -> Self;
    /// Exactly `2^exp`.
    fn pow2(ctx: Self::Context, exp: i64) -> Self;
    fn is_zero(&self) -> bool;
    fn to_f64(&self) -> f64;

    fn zero(ctx: Self::Context) -> Self {
        Self::from_i64(ctx, 0)
    }

    fn one(ctx: Self::Context) -> Self {
        Self::from_i64(ctx, 1)
    }

    fn abs(&self) -> Self {
        if self.is_negative() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    fn is_negative(&self) -> bool {
        *self < Self::zero(self.context())
    }

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn min_of(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    fn square(&self) -> Self {
        self.clone() * self.clone()
    }
}

/// A [`Field`] with the transcendental operations needed for geometry.
pub trait Real: Field {
    fn pi(ctx: Self::Context) -> Self;
    fn sqrt(&self) -> Self;
    /// `(sin, cos)`.
    fn sin_cos(&self) -> (Self, Self);
    fn asin(&self) -> Self;
    fn acos(&self) -> Self;
    /// Four-quadrant arctangent of `self / x`.
    fn atan2(&self, x: &Self) -> Self;
    fn log2(&self) -> Self;
    /// `None` if the value is not finite or does not fit in an `i64`.
    fn ceil_i64(&self) -> Option<i64>;
    /// Mantissa bits.
    fn precision_bits(ctx: Self::Context) -> u32;
    /// Shortest decimal string that parses back to the same value.
    fn to_decimal(&self) -> String;
    fn parse_decimal(ctx: Self::Context, s: &str) -> Result<Self, NumericsError>;

    /// `(cos, sin)` of `ratio·π`. Multiples of π/2 are exact.
    fn cos_sin_pi(ctx: Self::Context, ratio: PiRatio) -> (Self, Self) {
        if let Some(exact) = quarter_turn_cos_sin(ctx, ratio) {
            return exact;
        }
        let angle = Self::pi(ctx) * Self::from_i64(ctx, ratio.num()) / Self::from_i64(ctx, ratio.den());
        let (s, c) = angle.sin_cos();
        (c, s)
    }
}

fn quarter_turn_cos_sin<S: Field>(ctx: S::Context, ratio: PiRatio) -> Option<(S, S)> {
    let (z, o) = (S::zero(ctx), S::one(ctx));
    match (ratio.num(), ratio.den()) {
        (0, 1) => Some((o, z)),
        (1, 2) => Some((z, o)),
        (1, 1) => Some((-o, z)),
        (3, 2) => Some((z, -o)),
        _ => None,
    }
}

macro_rules! impl_primitive_float {
    ($f:ty) => {
        impl Field for $f {
            type Context = ();

            fn context(&self) {}
            fn from_i64(_: (), v: i64) -> Self {
                v as $f
            }
            fn from_f64(_: (), v: f64) -> Self {
                v as $f
            }
            fn from_rational(_: (), q: &BigRational) -> Self {
                ToPrimitive::to_f64(q).unwrap_or(f64::NAN) as $f
            }
            fn pow2(_: (), exp: i64) -> Self {
                num_traits::Float::powi(2.0 as $f, exp as i32)
            }
            fn is_zero(&self) -> bool {
                num_traits::Zero::is_zero(self)
            }
            fn to_f64(&self) -> f64 {
                *self as f64
            }
            fn abs(&self) -> Self {
                num_traits::Float::abs(*self)
            }
        }

        impl Real for $f {
            fn pi(_: ()) -> Self {
                <$f as num_traits::FloatConst>::PI()
            }
            fn sqrt(&self) -> Self {
                num_traits::Float::sqrt(*self)
            }
            fn sin_cos(&self) -> (Self, Self) {
                num_traits::Float::sin_cos(*self)
            }
            fn asin(&self) -> Self {
                num_traits::Float::asin(*self)
            }
            fn acos(&self) -> Self {
                num_traits::Float::acos(*self)
            }
            fn atan2(&self, x: &Self) -> Self {
                num_traits::Float::atan2(*self, *x)
            }
            fn log2(&self) -> Self {
                num_traits::Float::log2(*self)
            }
            fn ceil_i64(&self) -> Option<i64> {
                num_traits::Float::ceil(*self).to_i64()
            }
            fn precision_bits(_: ()) -> u32 {
                <$f>::MANTISSA_DIGITS
            }
            fn to_decimal(&self) -> String {
                format!("{}", self)
            }
            fn parse_decimal(_: (), s: &str) -> Result<Self, NumericsError> {
                s.trim().parse().map_err(|_| NumericsError::Parse(s.to_owned()))
            }
        }
    };
}

impl_primitive_float!(f32);
impl_primitive_float!(f64);

impl Field for BigRational {
    type Context = ();

    fn context(&self) {}
    fn from_i64(_: (), v: i64) -> Self {
        BigRational::from_integer(v.into())
    }
    fn from_f64(_: (), v: f64) -> Self {
        BigRational::from_float(v).expect("finite f64")
    }
    fn from_rational(_: (), q: &BigRational) -> Self {
        q.clone()
    }
    fn pow2(_: (), exp: i64) -> Self {
        let p = BigInt::from(1) << exp.unsigned_abs();
        if exp >= 0 {
            BigRational::from_integer(p)
        } else {
            BigRational::new(1.into(), p)
        }
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn abs(&self) -> Self {
        Signed::abs(self)
    }
}

/// Mantissa width of a [`BigFloat`], fixed for a whole run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Precision(u32);

impl Precision {
    pub const DEFAULT: Precision = Precision(256);

    pub fn new(bits: u32) -> Result<Self, NumericsError> {
        if bits < 24 || bits > rug::float::prec_max() {
            return Err(NumericsError::InvalidPrecision(bits));
        }
        Ok(Precision(bits))
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn doubled(self) -> Self {
        Precision(self.0 * 2)
    }
}

impl Default for Precision {
    fn default() -> Self {
        Self::DEFAULT
    }
}

impl fmt::Display for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} bits", self.0)
    }
}

/// Correctly rounded binary floating point at a configurable precision.
///
/// Binary operations expect both operands at the same precision; the result
/// keeps the left operand's precision.
#[derive(Clone, PartialEq, PartialOrd)]
pub struct BigFloat(Float);

impl BigFloat {
    pub fn precision(&self) -> Precision {
        Precision(self.0.prec())
    }

    pub fn as_float(&self) -> &Float {
        &self.0
    }

    pub fn from_float(f: Float) -> Self {
        BigFloat(f)
    }

    pub fn with_precision(&self, prec: Precision) -> Self {
        BigFloat(Float::with_val(prec.0, &self.0))
    }
}

impl fmt::Debug for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal())
    }
}

impl fmt::Display for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal())
    }
}

macro_rules! bigfloat_binop {
    ($tr:ident, $method:ident, $op:tt) => {
        impl $tr for BigFloat {
            type Output = BigFloat;
            #[inline]
            fn $method(self, rhs: BigFloat) -> BigFloat {
                debug_assert_eq!(self.0.prec(), rhs.0.prec(), "mixed precision arithmetic");
                BigFloat(self.0 $op rhs.0)
            }
        }
    };
}

bigfloat_binop!(Add, add, +);
bigfloat_binop!(Sub, sub, -);
bigfloat_binop!(Mul, mul, *);
bigfloat_binop!(Div, div, /);

impl Neg for BigFloat {
    type Output = BigFloat;
    fn neg(self) -> BigFloat {
        BigFloat(-self.0)
    }
}

fn bigint_to_rug(v: &BigInt) -> rug::Integer {
    rug::Integer::from_str_radix(&v.to_str_radix(16), 16).expect("hex digits")
}

impl Field for BigFloat {
    type Context = Precision;

    fn context(&self) -> Precision {
        self.precision()
    }
    fn from_i64(ctx: Precision, v: i64) -> Self {
        BigFloat(Float::with_val(ctx.0, v))
    }
    fn from_f64(ctx: Precision, v: f64) -> Self {
        BigFloat(Float::with_val(ctx.0, v))
    }
    fn from_rational(ctx: Precision, q: &BigRational) -> Self {
        let q = rug::Rational::from((bigint_to_rug(q.numer()), bigint_to_rug(q.denom())));
        BigFloat(Float::with_val(ctx.0, q))
    }
    fn pow2(ctx: Precision, exp: i64) -> Self {
        let mut f = Float::with_val(ctx.0, 1);
        f <<= exp as i32;
        BigFloat(f)
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
    fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }
    fn abs(&self) -> Self {
        BigFloat(self.0.clone().abs())
    }
    fn is_negative(&self) -> bool {
        self.0.is_sign_negative() && !self.0.is_zero()
    }
    fn square(&self) -> Self {
        BigFloat(self.0.clone().square())
    }
}

/// Guard bits used when a result must survive an intermediate rounding.
const GUARD_BITS: u32 = 64;

impl Real for BigFloat {
    fn pi(ctx: Precision) -> Self {
        BigFloat(Float::with_val(ctx.0, Constant::Pi))
    }
    fn sqrt(&self) -> Self {
        BigFloat(self.0.clone().sqrt())
    }
    fn sin_cos(&self) -> (Self, Self) {
        let (s, c) = self.0.clone().sin_cos(Float::new(self.0.prec()));
        (BigFloat(s), BigFloat(c))
    }
    fn asin(&self) -> Self {
        BigFloat(self.0.clone().asin())
    }
    fn acos(&self) -> Self {
        BigFloat(self.0.clone().acos())
    }
    fn atan2(&self, x: &Self) -> Self {
        BigFloat(self.0.clone().atan2(&x.0))
    }
    fn log2(&self) -> Self {
        BigFloat(self.0.clone().log2())
    }
    fn ceil_i64(&self) -> Option<i64> {
        self.0.clone().ceil().to_integer()?.to_i64()
    }
    fn precision_bits(ctx: Precision) -> u32 {
        ctx.0
    }

    fn to_decimal(&self) -> String {
        trim_decimal(&self.0.to_string_radix(10, None))
    }

    fn parse_decimal(ctx: Precision, s: &str) -> Result<Self, NumericsError> {
        let parsed = Float::parse(s.trim()).map_err(|_| NumericsError::Parse(s.to_owned()))?;
        Ok(BigFloat(Float::with_val(ctx.0, parsed)))
    }

    fn cos_sin_pi(ctx: Precision, ratio: PiRatio) -> (Self, Self) {
        if let Some(exact) = quarter_turn_cos_sin(ctx, ratio) {
            return exact;
        }
        let work = ctx.0 + GUARD_BITS;
        let mut angle = Float::with_val(work, Constant::Pi);
        angle *= ratio.num();
        angle /= ratio.den();
        let (s, c) = angle.sin_cos(Float::new(work));
        (BigFloat(Float::with_val(ctx.0, c)), BigFloat(Float::with_val(ctx.0, s)))
    }
}

/// Drops trailing zeros from the mantissa of an MPFR decimal string.
fn trim_decimal(s: &str) -> String {
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], &s[pos..]),
        None => (s, ""),
    };
    let mantissa = if mantissa.contains('.') {
        mantissa.trim_end_matches('0').trim_end_matches('.')
    } else {
        mantissa
    };
    let mantissa = if mantissa == "-0" { "0" } else { mantissa };
    format!("{mantissa}{exponent}")
}

/// Parses a decimal literal (`"-1.25"`, `"3e-2"`) or a fraction (`"1/3"`)
/// into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational, NumericsError> {
    let err = || NumericsError::Parse(s.to_owned());
    let t = s.trim();
    if let Some((n, d)) = t.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| err())?;
        let d = BigInt::from_str(d.trim()).map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        return Ok(BigRational::new(n, d));
    }
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(pos) => (&t[..pos], t[pos + 1..].parse::<i64>().map_err(|_| err())?),
        None => (t, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(err());
    }
    let all: String = format!("{int_part}{frac_part}");
    let mut value = BigRational::from_integer(BigInt::from_str(&all).map_err(|_| err())?);
    let scale = exp - frac_part.len() as i64;
    let ten = BigInt::from(10).pow(scale.unsigned_abs() as u32);
    if scale >= 0 {
        value *= BigRational::from_integer(ten);
    } else {
        value /= BigRational::from_integer(ten);
    }
    Ok(if neg { -value } else { value })
}

/// Exact decimal rendering when the rational terminates in base 10, a
/// `p/q` fraction otherwise.
pub fn format_rational(q: &BigRational) -> String {
    let mut den = q.denom().clone();
    let (mut twos, mut fives) = (0u32, 0u32);
    let (two, five) = (BigInt::from(2), BigInt::from(5));
    while den.is_multiple_of(&two) {
        den /= &two;
        twos += 1;
    }
    while den.is_multiple_of(&five) {
        den /= &five;
        fives += 1;
    }
    if den != BigInt::from(1) {
        return format!("{}/{}", q.numer(), q.denom());
    }
    let places = twos.max(fives);
    let scaled = q * BigRational::from_integer(BigInt::from(10).pow(places));
    let digits = scaled.to_integer().abs().to_string();
    let sign = if Signed::is_negative(q) { "-" } else { "" };
    if places == 0 {
        return format!("{sign}{digits}");
    }
    let padded = format!("{:0>width$}", digits, width = places as usize + 1);
    let (int, frac) = padded.split_at(padded.len() - places as usize);
    format!("{sign}{int}.{frac}")
}

/// A rational multiple of π, `(num/den)·π`, normalized to `[0, 2π)` and
/// stored in lowest terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PiRatio {
    num: i64,
    den: i64,
}

impl PiRatio {
    pub const ZERO: PiRatio = PiRatio { num: 0, den: 1 };

    pub fn new(num: i64, den: i64) -> Result<Self, NumericsError> {
        if den <= 0 {
            return Err(NumericsError::ZeroDenominator(den));
        }
        let (num, den) = (num as i128, den as i128);
        let period = 2 * den;
        let num = num.rem_euclid(period);
        let g = num.gcd(&den);
        Ok(PiRatio { num: (num / g) as i64, den: (den / g) as i64 })
    }

    pub fn num(self) -> i64 {
        self.num
    }

    pub fn den(self) -> i64 {
        self.den
    }

    pub fn is_zero(self) -> bool {
        self.num == 0
    }

    pub fn negate(self) -> PiRatio {
        PiRatio::new(-self.num, self.den).expect("positive denominator")
    }

    /// Half of the normalized angle, in `[0, π)`.
    pub fn half(self) -> PiRatio {
        PiRatio::new(self.num, self.den * 2).expect("positive denominator")
    }

    pub fn as_rational(self) -> BigRational {
        BigRational::new(self.num.into(), self.den.into())
    }
}

impl Add for PiRatio {
    type Output = PiRatio;

    fn add(self, other: PiRatio) -> PiRatio {
        let n = self.num as i128 * other.den as i128 + other.num as i128 * self.den as i128;
        let d = self.den as i128 * other.den as i128;
        let g = n.gcd(&d).max(1);
        PiRatio::new((n / g) as i64, (d / g) as i64).expect("positive denominator")
    }
}

/// `(cos, sin)` of `(num/den)·π` at the context's precision.
pub fn rational_pi_trig<S: Real>(ctx: S::Context, num: i64, den: i64) -> Result<(S, S), NumericsError> {
    Ok(S::cos_sin_pi(ctx, PiRatio::new(num, den)?))
}

/// An angle as exchanged in instance files.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Angle {
    /// `(num/den)·π`, normalized to `[0, 2π)`.
    Pi(PiRatio),
    /// Radians as an exact decimal; reduced modulo 2π when evaluated.
    Radians(BigRational),
}

impl Angle {
    pub fn zero() -> Self {
        Angle::Pi(PiRatio::ZERO)
    }

    pub fn pi_ratio(num: i64, den: i64) -> Result<Self, NumericsError> {
        Ok(Angle::Pi(PiRatio::new(num, den)?))
    }

    /// Exact test: a rational number of radians is a multiple of 2π only
    /// when it is zero.
    pub fn is_zero(&self) -> bool {
        match self {
            Angle::Pi(p) => p.is_zero(),
            Angle::Radians(q) => Zero::is_zero(q),
        }
    }

    pub fn as_pi_ratio(&self) -> Option<PiRatio> {
        match self {
            Angle::Pi(p) => Some(*p),
            Angle::Radians(q) if Zero::is_zero(q) => Some(PiRatio::ZERO),
            Angle::Radians(_) => None,
        }
    }

    /// The angle in radians, normalized to `[0, 2π)`.
    pub fn radians<S: Real>(&self, ctx: S::Context) -> S {
        match self {
            Angle::Pi(p) => S::pi(ctx) * S::from_i64(ctx, p.num()) / S::from_i64(ctx, p.den()),
            Angle::Radians(q) => {
                let two_pi = S::pi(ctx) * S::from_i64(ctx, 2);
                let v = S::from_rational(ctx, q);
                let turns = (v.clone() / two_pi.clone()).to_f64().floor();
                let mut r = v - two_pi.clone() * S::from_f64(ctx, turns);
                while r.is_negative() {
                    r = r + two_pi.clone();
                }
                while r >= two_pi {
                    r = r - two_pi.clone();
                }
                r
            }
        }
    }

    pub fn cos_sin<S: Real>(&self, ctx: S::Context) -> (S, S) {
        match self.as_pi_ratio() {
            Some(p) => S::cos_sin_pi(ctx, p),
            None => {
                let (s, c) = self.radians::<S>(ctx).sin_cos();
                (c, s)
            }
        }
    }

    /// `(cos, sin)` of half the normalized angle.
    pub fn half_cos_sin<S: Real>(&self, ctx: S::Context) -> (S, S) {
        match self.as_pi_ratio() {
            Some(p) => S::cos_sin_pi(ctx, p.half()),
            None => {
                let half = self.radians::<S>(ctx) / S::from_i64(ctx, 2);
                let (s, c) = half.sin_cos();
                (c, s)
            }
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum AngleRepr {
    Pi { num: i64, den: i64 },
    Radians { radians: String },
}

impl Serialize for Angle {
    fn serialize<Ser: serde::Serializer>(&self, s: Ser) -> Result<Ser::Ok, Ser::Error> {
        match self {
            Angle::Pi(p) => AngleRepr::Pi { num: p.num(), den: p.den() },
            Angle::Radians(q) => AngleRepr::Radians { radians: format_rational(q) },
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Angle {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        match AngleRepr::deserialize(d)? {
            AngleRepr::Pi { num, den } => Angle::pi_ratio(num, den).map_err(D::Error::custom),
            AngleRepr::Radians { radians } => {
                parse_rational(&radians).map(Angle::Radians).map_err(D::Error::custom)
            }
        }
    }
}

/// Memoized `(cos, sin)` per distinct rational angle.
#[derive(Debug)]
pub struct TrigCache<S: Real> {
    ctx: S::Context,
    table: HashMap<PiRatio, (S, S)>,
}

impl<S: Real> TrigCache<S> {
    pub fn new(ctx: S::Context) -> Self {
        TrigCache { ctx, table: HashMap::new() }
    }

    pub fn cos_sin(&mut self, angle: PiRatio) -> (S, S) {
        let ctx = self.ctx;
        self.table.entry(angle).or_insert_with(|| S::cos_sin_pi(ctx, angle)).clone()
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }
}

/// Comparison slack: values closer than
/// `max(eps_abs, eps_rel·max(|a|, |b|))` compare equal.
#[derive(Clone, Debug, PartialEq)]
pub struct Tolerance<S> {
    pub eps_abs: S,
    pub eps_rel: S,
}

impl<S: Field> Tolerance<S> {
    pub fn new(eps_abs: S, eps_rel: S) -> Self {
        assert!(!eps_abs.is_negative() && !eps_rel.is_negative(), "tolerances must be nonnegative");
        Tolerance { eps_abs, eps_rel }
    }

    /// `2^-64` absolute and relative.
    pub fn standard(ctx: S::Context) -> Self {
        Tolerance { eps_abs: S::pow2(ctx, -64), eps_rel: S::pow2(ctx, -64) }
    }

    pub fn band(&self, a: &S, b: &S) -> S {
        let scale = a.abs().max_of(b.abs());
        self.eps_abs.clone().max_of(self.eps_rel.clone() * scale)
    }
}

/// Outcome of a toleranced comparison.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Banded {
    Less,
    Equal,
    Greater,
}

impl From<Banded> for Ordering {
    fn from(b: Banded) -> Ordering {
        match b {
            Banded::Less => Ordering::Less,
            Banded::Equal => Ordering::Equal,
            Banded::Greater => Ordering::Greater,
        }
    }
}

pub fn scalar_cmp<S: Field>(a: &S, b: &S, tol: &Tolerance<S>) -> Result<Banded, NumericsError> {
    for other in [b, &tol.eps_abs, &tol.eps_rel] {
        if a.context() != other.context() {
            return Err(NumericsError::MixedPrecision(
                format!("{:?}", a.context()),
                format!("{:?}", other.context()),
            ));
        }
    }
    let diff = a.clone() - b.clone();
    if diff.abs() <= tol.band(a, b) {
        Ok(Banded::Equal)
    } else if diff.is_negative() {
        Ok(Banded::Less)
    } else {
        Ok(Banded::Greater)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p256() -> Precision {
        Precision::DEFAULT
    }

    fn bf(v: f64) -> BigFloat {
        BigFloat::from_f64(p256(), v)
    }

    #[test]
    fn trig_of_quarter_turns_is_exact() {
        let (c, s) = rational_pi_trig::<BigFloat>(p256(), 0, 1).unwrap();
        assert_eq!((c, s), (bf(1.0), bf(0.0)));
        let (c, s) = rational_pi_trig::<BigFloat>(p256(), 1, 2).unwrap();
        assert_eq!((c, s), (bf(0.0), bf(1.0)));
        let (c, s) = rational_pi_trig::<BigFloat>(p256(), 4, 2).unwrap();
        assert_eq!((c, s), (bf(1.0), bf(0.0)));
        let (c, s) = rational_pi_trig::<BigFloat>(p256(), -1, 2).unwrap();
        assert_eq!((c, s), (bf(0.0), bf(-1.0)));
    }

    #[test]
    fn trig_of_quarter_pi_matches_double_precision_reference() {
        // Reference: sqrt(2)/2 at 512 bits, computed without π.
        let reference = BigFloat::from_i64(Precision(512), 2).sqrt() / BigFloat::from_i64(Precision(512), 2);
        let (c, s) = rational_pi_trig::<BigFloat>(p256(), 1, 4).unwrap();
        let lsb = BigFloat::pow2(Precision(512), -255);
        for v in [c, s] {
            let err = (v.with_precision(Precision(512)) - reference.clone()).abs();
            assert!(err <= lsb, "error {err}");
        }
    }

    #[test]
    fn zero_denominator_rejected() {
        assert!(matches!(rational_pi_trig::<f64>((), 1, 0), Err(NumericsError::ZeroDenominator(0))));
    }

    #[test]
    fn cmp_examples() {
        let tol = Tolerance::standard(p256());
        let one = bf(1.0);
        let nudged = one.clone() + BigFloat::pow2(p256(), -100);
        assert_eq!(scalar_cmp(&one, &nudged, &tol).unwrap(), Banded::Equal);
        assert_eq!(scalar_cmp(&one, &bf(2.0), &tol).unwrap(), Banded::Less);

        let big = BigFloat::pow2(p256(), 135);
        let big_plus = big.clone() + BigFloat::pow2(p256(), -3);
        assert_ne!(big, big_plus, "2^135 + 2^-3 must be representable at 256 bits");
        let tight = Tolerance::new(BigFloat::pow2(p256(), -64), BigFloat::zero(p256()));
        assert_eq!(scalar_cmp(&big, &big_plus, &tight).unwrap(), Banded::Less);
    }

    #[test]
    fn cmp_rejects_mixed_precision() {
        let a = BigFloat::from_i64(Precision(128), 1);
        let b = bf(1.0);
        assert!(matches!(
            scalar_cmp(&a, &b, &Tolerance::standard(p256())),
            Err(NumericsError::MixedPrecision(..))
        ));
    }

    #[test]
    fn angle_normalization() {
        assert_eq!(Angle::pi_ratio(5, 2).unwrap(), Angle::pi_ratio(1, 2).unwrap());
        assert_eq!(PiRatio::new(-1, 2).unwrap(), PiRatio::new(3, 2).unwrap());
        assert_eq!(PiRatio::new(6, 4).unwrap(), PiRatio::new(3, 2).unwrap());
        assert_eq!(PiRatio::new(1, 2).unwrap().half(), PiRatio::new(1, 4).unwrap());
        let r = Angle::Radians(parse_rational("7").unwrap()).radians::<BigFloat>(p256());
        let expected = bf(7.0) - BigFloat::pi(p256()) * bf(2.0);
        assert!((r - expected).abs() < BigFloat::pow2(p256(), -200));
    }

    #[test]
    fn angle_json_forms() {
        let a: Angle = serde_json::from_str(r#"{"num": 5, "den": 2}"#).unwrap();
        assert_eq!(a, Angle::pi_ratio(1, 2).unwrap());
        let b: Angle = serde_json::from_str(r#"{"radians": "0.25"}"#).unwrap();
        assert_eq!(serde_json::to_string(&b).unwrap(), r#"{"radians":"0.25"}"#);
        assert!(serde_json::from_str::<Angle>(r#"{"num": 1, "den": 0}"#).is_err());
    }

    #[test]
    fn rational_parsing() {
        let q = |s| parse_rational(s).unwrap();
        assert_eq!(q("1.5"), BigRational::new(3.into(), 2.into()));
        assert_eq!(q("-0.125"), BigRational::new((-1).into(), 8.into()));
        assert_eq!(q("2e3"), BigRational::from_integer(2000.into()));
        assert_eq!(q("15e-1"), q("1.5"));
        assert_eq!(q("1/3"), BigRational::new(1.into(), 3.into()));
        assert_eq!(q(".5"), q("0.5"));
        for bad in ["", "abc", "1.2.3", "1/0", "-", "1e"] {
            assert!(parse_rational(bad).is_err(), "{bad}");
        }
        assert_eq!(format_rational(&q("1.5")), "1.5");
        assert_eq!(format_rational(&q("-0.125")), "-0.125");
        assert_eq!(format_rational(&q("1/3")), "1/3");
        assert_eq!(format_rational(&q("0.05")), "0.05");
        assert_eq!(format_rational(&q("2000")), "2000");
    }

    #[test]
    fn decimal_output_is_trimmed() {
        assert_eq!(bf(1.0).to_decimal(), "1");
        assert_eq!(bf(0.0).to_decimal(), "0");
        assert_eq!(bf(-2.5).to_decimal(), "-2.5");
        assert_eq!(bf(123456.0).to_decimal(), "123456");
    }

    #[test]
    fn cache_reuses_entries() {
        let mut cache = TrigCache::<BigFloat>::new(p256());
        let a = PiRatio::new(1, 8).unwrap();
        let first = cache.cos_sin(a);
        let second = cache.cos_sin(PiRatio::new(2, 16).unwrap());
        assert_eq!(first, second);
        assert_eq!(cache.len(), 1);
    }

    proptest! {
        #[test]
        fn cmp_is_reflexive(v in -1e30f64..1e30) {
            let a = bf(v);
            prop_assert_eq!(scalar_cmp(&a, &a, &Tolerance::standard(p256())).unwrap(), Banded::Equal);
        }

        #[test]
        fn decimal_round_trip(v in proptest::num::f64::NORMAL, k in 1u32..400) {
            let x = bf(v) / BigFloat::from_i64(p256(), k as i64);
            let back = BigFloat::parse_decimal(p256(), &x.to_decimal()).unwrap();
            prop_assert_eq!(back, x);
        }

        #[test]
        fn rational_decimal_round_trip(n in -10_000_000i64..10_000_000, k in 0u32..12) {
            let q = BigRational::new(n.into(), BigInt::from(10).pow(k));
            prop_assert_eq!(parse_rational(&format_rational(&q)).unwrap(), q);
        }
    }

    #[test]
    fn pythagorean_identity_over_random_angles() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let bound = BigFloat::pow2(p256(), -(256 - 4));
        for _ in 0..1000 {
            let den = rng.gen_range(1..=(1i64 << 20));
            let num = rng.gen_range(-(1i64 << 22)..(1i64 << 22));
            let (c, s) = rational_pi_trig::<BigFloat>(p256(), num, den).unwrap();
            let err = (c.square() + s.square() - bf(1.0)).abs();
            assert!(err <= bound, "{num}/{den}: {err}");
        }
    }
}
