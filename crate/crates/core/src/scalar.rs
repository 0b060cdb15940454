//! Exact real scalars as rational combinations of a declared basis.
//!
//! A [`Scalar`] is a coefficient vector over the basis `(1, b2, ..., bm)` held
//! by a [`ScalarContext`]. Addition and rational scaling need no context.
//! Products, reciprocals and ordering do: products need to know how basis
//! elements multiply, ordering evaluates the coefficient vector against
//! rational enclosures of the basis elements and refuses to guess when the
//! enclosure straddles zero.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::linalg::Matrix;

pub type Rational = num_rational::BigRational;

/// Default number of decimal digits used for basis enclosures.
pub const DEFAULT_PRECISION: u32 = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScalarError {
    #[error("comparison undecidable at {digits} digits; raise --precision")]
    PrecisionExhausted { digits: u32 },
    #[error("product {left}*{right} is not expressible in the declared basis")]
    NotClosed { left: String, right: String },
    #[error("not normalizable: {0}")]
    NotNormalizable(String),
    #[error("unknown basis element `{0}`")]
    UnknownBasis(String),
    #[error("invalid basis: {0}")]
    InvalidBasis(String),
    #[error("cannot parse scalar `{0}`")]
    Parse(String),
    #[error("scalar has {got} coefficients but the basis has {dim} elements")]
    Dimension { got: usize, dim: usize },
}

pub type Result<T, E = ScalarError> = std::result::Result<T, E>;

/// A real number `sum_i c_i b_i` with rational `c_i`.
///
/// Trailing zero coefficients are trimmed, so equality is coefficient-wise
/// and basis independence is the caller's declaration.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Scalar {
    coeffs: Vec<Rational>,
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::from_integer(1)
    }

    pub fn from_integer(n: i64) -> Self {
        Self::from_rational(Rational::from_integer(n.into()))
    }

    pub fn from_rational(q: Rational) -> Self {
        Self::from_coeffs(vec![q])
    }

    pub fn from_coeffs(coeffs: Vec<Rational>) -> Self {
        let mut s = Scalar { coeffs };
        s.trim();
        s
    }

    /// The basis element with index `i`.
    pub fn basis(i: usize) -> Self {
        let mut coeffs = vec![Rational::zero(); i + 1];
        coeffs[i] = Rational::one();
        Scalar { coeffs }
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    /// Number of basis slots actually used.
    pub fn support_len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn as_rational(&self) -> Option<Rational> {
        match self.coeffs.len() {
            0 => Some(Rational::zero()),
            1 => Some(self.coeffs[0].clone()),
            _ => None,
        }
    }

    pub fn is_rational(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn is_integer(&self) -> bool {
        self.as_rational().is_some_and(|q| q.is_integer())
    }

    pub fn scale(&self, by: &Rational) -> Self {
        if by.is_zero() {
            return Scalar::zero();
        }
        Scalar {
            coeffs: self.coeffs.iter().map(|c| c * by).collect(),
        }
    }

    pub fn scale_int(&self, by: i64) -> Self {
        self.scale(&Rational::from_integer(by.into()))
    }

    fn zip_with(&self, other: &Scalar, f: impl Fn(&Rational, &Rational) -> Rational) -> Scalar {
        let n = self.coeffs.len().max(other.coeffs.len());
        let zero = Rational::zero();
        let coeffs = (0..n)
            .map(|i| {
                f(
                    self.coeffs.get(i).unwrap_or(&zero),
                    other.coeffs.get(i).unwrap_or(&zero),
                )
            })
            .collect();
        Scalar::from_coeffs(coeffs)
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        write!(f, "Scalar[{}]", parts.join(", "))
    }
}

impl Add<&Scalar> for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, rhs: Scalar) -> Scalar {
        &self + &rhs
    }
}

impl Sub<&Scalar> for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, rhs: Scalar) -> Scalar {
        &self - &rhs
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl std::iter::Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |a, b| a + b)
    }
}

impl<'a> std::iter::Sum<&'a Scalar> for Scalar {
    fn sum<I: Iterator<Item = &'a Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |a, b| &a + b)
    }
}

/// One element of the declared basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisElement {
    pub name: String,
    /// `b * b`, when `b` is declared as a positive square root.
    pub square: Option<Rational>,
    /// Decimal expansion, for elements with no exact square.
    pub decimal: Option<String>,
}

impl BasisElement {
    pub fn one() -> Self {
        BasisElement {
            name: "1".into(),
            square: Some(Rational::one()),
            decimal: None,
        }
    }

    /// `sqrt(n)`, named `sqrt<n>`.
    pub fn sqrt(n: u64) -> Self {
        BasisElement {
            name: format!("sqrt{n}"),
            square: Some(Rational::from_integer(n.into())),
            decimal: None,
        }
    }

    pub fn named(name: &str) -> Self {
        let square = name
            .strip_prefix("sqrt")
            .and_then(|n| n.parse::<u64>().ok())
            .map(|n| Rational::from_integer(n.into()));
        BasisElement {
            name: name.to_string(),
            square,
            decimal: None,
        }
    }
}

/// Closed rational interval.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    pub lo: Rational,
    pub hi: Rational,
}

impl Interval {
    pub fn point(q: Rational) -> Self {
        Interval {
            lo: q.clone(),
            hi: q,
        }
    }

    fn scale(&self, c: &Rational) -> Interval {
        let (a, b) = (&self.lo * c, &self.hi * c);
        if c.is_negative() {
            Interval { lo: b, hi: a }
        } else {
            Interval { lo: a, hi: b }
        }
    }

    fn add(&self, other: &Interval) -> Interval {
        Interval {
            lo: &self.lo + &other.lo,
            hi: &self.hi + &other.hi,
        }
    }

    pub fn sign(&self) -> Option<Ordering> {
        if self.lo.is_positive() {
            Some(Ordering::Greater)
        } else if self.hi.is_negative() {
            Some(Ordering::Less)
        } else {
            None
        }
    }
}

/// The declared basis and the precision used to order scalars.
///
/// Read-only after construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScalarContext {
    basis: Vec<BasisElement>,
    precision: u32,
    enclosures: Vec<Interval>,
}

impl Default for ScalarContext {
    fn default() -> Self {
        Self::rational()
    }
}

impl ScalarContext {
    /// The basis `(1)`.
    pub fn rational() -> Self {
        Self::new(vec![BasisElement::one()], DEFAULT_PRECISION).expect("trivial basis")
    }

    /// The basis `(1, sqrt(n))`.
    pub fn quadratic(n: u64) -> Self {
        Self::new(
            vec![BasisElement::one(), BasisElement::sqrt(n)],
            DEFAULT_PRECISION,
        )
        .expect("quadratic basis")
    }

    pub fn new(basis: Vec<BasisElement>, precision: u32) -> Result<Self> {
        if basis.first().map(|b| b.name.as_str()) != Some("1") {
            return Err(ScalarError::InvalidBasis(
                "first basis element must be `1`".into(),
            ));
        }
        for (i, b) in basis.iter().enumerate() {
            if basis[..i].iter().any(|c| c.name == b.name) {
                return Err(ScalarError::InvalidBasis(format!(
                    "duplicate name `{}`",
                    b.name
                )));
            }
            if b.name.is_empty()
                || !b
                    .name
                    .chars()
                    .all(|c| c.is_ascii_alphanumeric() || c == '_')
            {
                return Err(ScalarError::InvalidBasis(format!("bad name `{}`", b.name)));
            }
            if i > 0 && b.name.chars().all(|c| c.is_ascii_digit()) {
                return Err(ScalarError::InvalidBasis(format!("bad name `{}`", b.name)));
            }
        }
        let mut basis = basis;
        basis[0].square = Some(Rational::one());
        let enclosures = basis
            .iter()
            .enumerate()
            .map(|(i, b)| enclosure(i, b, precision))
            .collect::<Result<Vec<_>>>()?;
        Ok(ScalarContext {
            basis,
            precision,
            enclosures,
        })
    }

    pub fn with_precision(&self, precision: u32) -> Result<Self> {
        Self::new(self.basis.clone(), precision)
    }

    pub fn basis(&self) -> &[BasisElement] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.basis.iter().position(|b| b.name == name)
    }

    pub fn check(&self, s: &Scalar) -> Result<()> {
        if s.support_len() > self.dim() {
            return Err(ScalarError::Dimension {
                got: s.support_len(),
                dim: self.dim(),
            });
        }
        Ok(())
    }

    /// `b_i * b_j` in the basis.
    pub fn basis_product(&self, i: usize, j: usize) -> Result<Scalar> {
        if i == 0 {
            return Ok(Scalar::basis(j));
        }
        if j == 0 {
            return Ok(Scalar::basis(i));
        }
        let not_closed = || ScalarError::NotClosed {
            left: self.basis[i].name.clone(),
            right: self.basis[j].name.clone(),
        };
        let (Some(a), Some(b)) = (&self.basis[i].square, &self.basis[j].square) else {
            return Err(not_closed());
        };
        if i == j {
            return Ok(Scalar::from_rational(a.clone()));
        }
        // sqrt(a)*sqrt(b) = r*sqrt(c) with r = sqrt(ab/c) rational
        let ab = a * b;
        if let Some(r) = rational_sqrt(&ab) {
            return Ok(Scalar::from_rational(r));
        }
        for (k, e) in self.basis.iter().enumerate().skip(1) {
            if let Some(c) = &e.square {
                if let Some(r) = rational_sqrt(&(&ab / c)) {
                    return Ok(Scalar::basis(k).scale(&r));
                }
            }
        }
        Err(not_closed())
    }

    pub fn mul(&self, a: &Scalar, b: &Scalar) -> Result<Scalar> {
        self.check(a)?;
        self.check(b)?;
        if let Some(q) = a.as_rational() {
            return Ok(b.scale(&q));
        }
        if let Some(q) = b.as_rational() {
            return Ok(a.scale(&q));
        }
        let mut out = Scalar::zero();
        for (i, x) in a.coeffs().iter().enumerate().filter(|(_, x)| !x.is_zero()) {
            for (j, y) in b.coeffs().iter().enumerate().filter(|(_, y)| !y.is_zero()) {
                out = out + self.basis_product(i, j)?.scale(&(x * y));
            }
        }
        Ok(out)
    }

    /// `1 / a`, when it stays inside the span of the basis.
    pub fn recip(&self, a: &Scalar) -> Result<Scalar> {
        self.check(a)?;
        if a.is_zero() {
            return Err(ScalarError::NotNormalizable("division by zero".into()));
        }
        if let Some(q) = a.as_rational() {
            return Ok(Scalar::from_rational(q.recip()));
        }
        // Solve (multiplication by a) x = 1 over the basis coordinates.
        let n = self.dim();
        let mut m = Matrix::zeros(n, n);
        for j in 0..n {
            let col = self.mul(a, &Scalar::basis(j)).map_err(|e| {
                ScalarError::NotNormalizable(format!("requires a basis extension ({e})"))
            })?;
            for i in 0..n {
                m.set(i, j, col.coeff(i));
            }
        }
        let mut rhs = vec![Scalar::zero(); n];
        rhs[0] = Scalar::one();
        match m.solve(&rhs) {
            Some((x, dirs)) if dirs.is_empty() => {
                let coeffs = x.iter().map(|s| s.coeff(0)).collect();
                Ok(Scalar::from_coeffs(coeffs))
            }
            _ => Err(ScalarError::NotNormalizable(
                "declared basis is not a field; extend it".into(),
            )),
        }
    }

    /// Rational enclosure of `a` at the configured precision.
    pub fn interval(&self, a: &Scalar) -> Interval {
        a.coeffs()
            .iter()
            .zip(&self.enclosures)
            .filter(|(c, _)| !c.is_zero())
            .fold(Interval::point(Rational::zero()), |acc, (c, e)| {
                acc.add(&e.scale(c))
            })
    }

    /// Sign of `a`; fails loudly instead of guessing.
    pub fn sign(&self, a: &Scalar) -> Result<Ordering> {
        self.check(a)?;
        if a.is_zero() {
            return Ok(Ordering::Equal);
        }
        if let Some(q) = a.as_rational() {
            return Ok(q.cmp(&Rational::zero()));
        }
        self.interval(a)
            .sign()
            .ok_or(ScalarError::PrecisionExhausted {
                digits: self.precision,
            })
    }

    pub fn cmp(&self, a: &Scalar, b: &Scalar) -> Result<Ordering> {
        if a == b {
            return Ok(Ordering::Equal);
        }
        self.sign(&(a - b))
    }

    pub fn is_positive(&self, a: &Scalar) -> Result<bool> {
        Ok(self.sign(a)? == Ordering::Greater)
    }

    /// Decimal approximation (midpoint of the enclosure) with `digits`
    /// fractional digits.
    pub fn to_decimal(&self, a: &Scalar, digits: u32) -> String {
        let iv = self.interval(a);
        let mid = (&iv.lo + &iv.hi) / Rational::from_integer(2.into());
        format_decimal(&mid, digits)
    }

    pub fn to_f64(&self, a: &Scalar) -> f64 {
        let iv = self.interval(a);
        let mid = (&iv.lo + &iv.hi) / Rational::from_integer(2.into());
        mid.to_f64().unwrap_or(f64::NAN)
    }

    /// Human-readable form such as `1 + 3/2*sqrt2`.
    pub fn format(&self, a: &Scalar) -> String {
        if a.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, c) in a.coeffs().iter().enumerate().filter(|(_, c)| !c.is_zero()) {
            let name = self
                .basis
                .get(i)
                .map(|b| b.name.clone())
                .unwrap_or_else(|| format!("b{}", i + 1));
            let neg = c.is_negative();
            let mag = c.abs();
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            if i == 0 {
                out.push_str(&mag.to_string());
            } else if mag.is_one() {
                out.push_str(&name);
            } else {
                out.push_str(&format!("{mag}*{name}"));
            }
        }
        out
    }

    /// Parses expressions like `1+sqrt2`, `-3/2*sqrt2 + 4`, `2 sqrt2`.
    pub fn parse(&self, text: &str) -> Result<Scalar> {
        let err = || ScalarError::Parse(text.to_string());
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(err());
        }
        let mut terms = Vec::new();
        let mut start = 0;
        for (i, ch) in compact.char_indices() {
            if (ch == '+' || ch == '-') && i > start {
                terms.push(&compact[start..i]);
                start = i;
            }
        }
        terms.push(&compact[start..]);

        let mut out = Scalar::zero();
        for term in terms {
            let (neg, body) = match term.as_bytes().first() {
                Some(b'-') => (true, &term[1..]),
                Some(b'+') => (false, &term[1..]),
                _ => (false, term),
            };
            if body.is_empty() {
                return Err(err());
            }
            let split = body
                .find(|c: char| c.is_ascii_alphabetic() || c == '_')
                .unwrap_or(body.len());
            let (num, name) = body.split_at(split);
            let num = num.strip_suffix('*').unwrap_or(num);
            let coeff = if num.is_empty() {
                Rational::one()
            } else {
                parse_rational(num).ok_or_else(err)?
            };
            let index = if name.is_empty() {
                0
            } else {
                self.index_of(name)
                    .ok_or_else(|| ScalarError::UnknownBasis(name.to_string()))?
            };
            let t = Scalar::basis(index).scale(&coeff);
            out = if neg { out - t } else { out + t };
        }
        Ok(out)
    }
}

/// Parses `3`, `-3/4` or a finite decimal `1.25`.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    if let Some((n, d)) = text.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Rational::new(n, d));
    }
    if let Some((int, frac)) = text.split_once('.') {
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        let neg = int.starts_with('-');
        let int_part: BigInt = if int.is_empty() || int == "-" || int == "+" {
            BigInt::zero()
        } else {
            int.parse().ok()?
        };
        let scale = BigInt::from(10).pow(frac.len() as u32);
        let f: BigInt = frac.parse().ok()?;
        let mut q = Rational::new(int_part.abs() * &scale + f, scale);
        if neg {
            q = -q;
        }
        return Some(q);
    }
    let n: BigInt = text.parse().ok()?;
    Some(Rational::from_integer(n))
}

fn rational_sqrt(q: &Rational) -> Option<Rational> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    (&n * &n == *q.numer() && &d * &d == *q.denom()).then(|| Rational::new(n, d))
}

fn enclosure(index: usize, b: &BasisElement, precision: u32) -> Result<Interval> {
    if index == 0 {
        return Ok(Interval::point(Rational::one()));
    }
    if let Some(sq) = &b.square {
        if sq.is_negative() {
            return Err(ScalarError::InvalidBasis(format!(
                "`{}` has a negative square",
                b.name
            )));
        }
        if let Some(r) = rational_sqrt(sq) {
            return Ok(Interval::point(r));
        }
        // sqrt(n/d) = sqrt(n*d)/d, enclosed at 10^-precision
        let scale = BigInt::from(10).pow(precision);
        let radicand = sq.numer() * sq.denom() * &scale * &scale;
        let root = radicand.sqrt();
        let den = sq.denom() * &scale;
        return Ok(Interval {
            lo: Rational::new(root.clone(), den.clone()),
            hi: Rational::new(root + 1, den),
        });
    }
    let Some(dec) = &b.decimal else {
        return Err(ScalarError::InvalidBasis(format!(
            "`{}` needs either a square or a decimal value",
            b.name
        )));
    };
    let digits = dec.trim().trim_end_matches("...").trim_end_matches('…');
    let value = parse_rational(digits)
        .ok_or_else(|| ScalarError::InvalidBasis(format!("bad decimal for `{}`", b.name)))?;
    let frac_len = digits.split_once('.').map(|(_, f)| f.len()).unwrap_or(0) as u32;
    let ulp = Rational::new(BigInt::one(), BigInt::from(10).pow(frac_len));
    Ok(Interval {
        lo: &value - &ulp,
        hi: &value + &ulp,
    })
}

pub fn format_decimal(q: &Rational, digits: u32) -> String {
    let scale = BigInt::from(10).pow(digits);
    let scaled = (q * Rational::from_integer(scale.clone()))
        .round()
        .to_integer();
    let neg = scaled.sign() == Sign::Minus;
    let mag = scaled.abs();
    let int = &mag / &scale;
    let frac = &mag % &scale;
    let mut s = String::new();
    if neg {
        s.push('-');
    }
    s.push_str(&int.to_string());
    if digits > 0 {
        let f = frac.to_string();
        s.push('.');
        s.push_str(&"0".repeat(digits as usize - f.len()));
        s.push_str(&f);
    }
    s
}
