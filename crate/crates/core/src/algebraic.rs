//! Exact arithmetic in the number field generated by a real algebraic
//! parameter.
//!
//! A parameter is given by an integer minimal polynomial together with a
//! rational interval isolating one real root. Field elements are residue
//! classes of rational polynomials modulo the minimal polynomial, stored in
//! canonical form (exactly `degree` coefficients), so equality is structural.
//! Order is decided by evaluating differences on successively refined
//! isolating intervals until the enclosure excludes zero.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraicError {
    #[error("minimal polynomial must have degree >= 1 and a nonzero leading coefficient")]
    Degenerate,
    #[error("minimal polynomial is not square-free")]
    NotSquareFree,
    #[error("minimal polynomial has the rational root {0}")]
    RationalRoot(String),
    #[error("isolating interval [{0}, {1}] is empty, reversed or has a root at an endpoint")]
    BadInterval(String, String),
    #[error("isolating interval contains {0} real roots, expected exactly one")]
    RootCount(usize),
    #[error("elements belong to different algebraic parameters")]
    ParameterMismatch,
    #[error("division by zero")]
    DivisionByZero,
    #[error("element has {got} coefficients but the parameter has degree {degree}")]
    CoefficientCount { got: usize, degree: usize },
    #[error("cannot parse rational literal `{0}`")]
    Parse(String),
}

/// Parses `"p/q"`, an integer, or a plain decimal such as `"-0.375"` into an
/// exact rational.
pub fn parse_rational(text: &str) -> Result<BigRational, AlgebraicError> {
    let err = || AlgebraicError::Parse(text.to_string());
    let t = text.trim();
    if t.is_empty() {
        return Err(err());
    }
    if let Some((num, den)) = t.split_once('/') {
        let num = BigInt::from_str(num.trim()).map_err(|_| err())?;
        let den = BigInt::from_str(den.trim()).map_err(|_| err())?;
        if den.is_zero() {
            return Err(err());
        }
        return Ok(BigRational::new(num, den));
    }
    let (mantissa, exponent) = match t.find(['e', 'E']) {
        Some(pos) => (&t[..pos], t[pos + 1..].parse::<i32>().map_err(|_| err())?),
        None => (t, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
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
    let all_digits = format!("{int_part}{frac_part}");
    let mut value = BigRational::from_integer(BigInt::from_str(&all_digits).map_err(|_| err())?);
    let scale = exponent - frac_part.len() as i32;
    let ten = BigRational::from_integer(BigInt::from(10));
    let factor = pow_rational(&ten, scale.unsigned_abs());
    if scale >= 0 {
        value *= factor;
    } else {
        value /= factor;
    }
    Ok(if negative { -value } else { value })
}

fn pow_rational(base: &BigRational, exp: u32) -> BigRational {
    let mut acc = BigRational::one();
    for _ in 0..exp {
        acc *= base;
    }
    acc
}

// ---------------------------------------------------------------------------
// Dense rational polynomials (lowest degree first), used for reduction, gcds
// and Sturm sequences.

type Poly = Vec<BigRational>;

fn trim(mut p: Poly) -> Poly {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

fn poly_eval(p: &[BigRational], x: &BigRational) -> BigRational {
    p.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
}

fn poly_derivative(p: &[BigRational]) -> Poly {
    trim(
        p.iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c * BigRational::from_integer(BigInt::from(k)))
            .collect(),
    )
}

fn poly_mul(a: &[BigRational], b: &[BigRational]) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

fn poly_sub(a: &[BigRational], b: &[BigRational]) -> Poly {
    let n = a.len().max(b.len());
    trim(
        (0..n)
            .map(|k| {
                let x = a.get(k).cloned().unwrap_or_else(BigRational::zero);
                let y = b.get(k).cloned().unwrap_or_else(BigRational::zero);
                x - y
            })
            .collect(),
    )
}

/// Quotient and remainder of `a / b`; `b` must be nonzero and trimmed.
fn poly_divrem(a: &[BigRational], b: &[BigRational]) -> (Poly, Poly) {
    let mut rem = trim(a.to_vec());
    let db = b.len() - 1;
    let lead = b[db].clone();
    if rem.len() < b.len() {
        return (Vec::new(), rem);
    }
    let mut quot = vec![BigRational::zero(); rem.len() - db];
    while rem.len() >= b.len() {
        let shift = rem.len() - b.len();
        let factor = rem.last().unwrap() / &lead;
        for (k, c) in b.iter().enumerate() {
            rem[shift + k] -= &factor * c;
        }
        quot[shift] = factor;
        rem.pop();
        rem = trim(rem);
    }
    (trim(quot), rem)
}

fn poly_gcd(a: &[BigRational], b: &[BigRational]) -> Poly {
    let (mut x, mut y) = (trim(a.to_vec()), trim(b.to_vec()));
    while !y.is_empty() {
        let (_, r) = poly_divrem(&x, &y);
        x = y;
        y = r;
    }
    x
}

fn sign_of(v: &BigRational) -> i8 {
    if v.is_positive() {
        1
    } else if v.is_negative() {
        -1
    } else {
        0
    }
}

fn sturm_sequence(p: &[BigRational]) -> Vec<Poly> {
    let mut seq = vec![trim(p.to_vec()), poly_derivative(p)];
    loop {
        let n = seq.len();
        if seq[n - 1].is_empty() {
            seq.pop();
            break;
        }
        let (_, r) = poly_divrem(&seq[n - 2], &seq[n - 1]);
        if r.is_empty() {
            break;
        }
        seq.push(r.into_iter().map(|c| -c).collect());
    }
    seq
}

fn sign_changes(seq: &[Poly], x: &BigRational) -> usize {
    let signs: Vec<i8> = seq
        .iter()
        .map(|p| sign_of(&poly_eval(p, x)))
        .filter(|s| *s != 0)
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

fn small_divisors(n: &BigInt) -> Option<Vec<BigInt>> {
    let n = n.abs().to_u64()?;
    if n == 0 || n > 1_000_000_000_000 {
        return None;
    }
    let mut out = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(BigInt::from(d));
            if d * d != n {
                out.push(BigInt::from(n / d));
            }
        }
        d += 1;
    }
    Some(out)
}

// ---------------------------------------------------------------------------

/// Enclosing rational interval for a real value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalInterval {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl RationalInterval {
    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> BigRational {
        (&self.lo + &self.hi) / BigRational::from_integer(BigInt::from(2))
    }
}

/// Bisection steps between cached refinement levels.
const STEPS_PER_LEVEL: usize = 8;

/// A real algebraic number: integer minimal polynomial plus isolating
/// interval. Refinements of the interval are cached level by level
/// (`STEPS_PER_LEVEL` bisections each) behind a lock, so the interval at a
/// given level is the same no matter which thread produced it.
pub struct AlgebraicParameter {
    minimal_polynomial: Vec<BigInt>,
    monic: Poly,
    levels: RwLock<Vec<RationalInterval>>,
    sign_at_lo: i8,
}

impl fmt::Debug for AlgebraicParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let iv = self.isolating_interval();
        f.debug_struct("AlgebraicParameter")
            .field("minimal_polynomial", &self.minimal_polynomial)
            .field("isolating_interval", &(iv.lo.to_string(), iv.hi.to_string()))
            .finish()
    }
}

impl AlgebraicParameter {
    /// Builds a parameter from integer coefficients `[c0, c1, ..., cd]` and an
    /// isolating interval `(lo, hi)`.
    ///
    /// Irreducibility is an input contract. It is checked only partially: the
    /// polynomial must be square-free and, for degree >= 2, have no rational
    /// root (the rational-root test runs when the extreme coefficients are at
    /// most 10^12 in absolute value).
    pub fn new(
        minimal_polynomial: Vec<BigInt>,
        lo: BigRational,
        hi: BigRational,
    ) -> Result<Arc<Self>, AlgebraicError> {
        let coeffs = {
            let mut c = minimal_polynomial;
            while c.last().is_some_and(|x| x.is_zero()) {
                c.pop();
            }
            c
        };
        if coeffs.len() < 2 {
            return Err(AlgebraicError::Degenerate);
        }
        let poly: Poly = coeffs
            .iter()
            .map(|c| BigRational::from_integer(c.clone()))
            .collect();
        let degree = poly.len() - 1;
        if poly_gcd(&poly, &poly_derivative(&poly)).len() > 1 {
            return Err(AlgebraicError::NotSquareFree);
        }
        if degree >= 2 {
            if coeffs[0].is_zero() {
                return Err(AlgebraicError::RationalRoot("0".into()));
            }
            if let (Some(nums), Some(dens)) =
                (small_divisors(&coeffs[0]), small_divisors(&coeffs[degree]))
            {
                for n in &nums {
                    for d in &dens {
                        for s in [1, -1] {
                            let cand = BigRational::new(n * BigInt::from(s), d.clone());
                            if poly_eval(&poly, &cand).is_zero() {
                                return Err(AlgebraicError::RationalRoot(cand.to_string()));
                            }
                        }
                    }
                }
            }
        }
        let bad = || AlgebraicError::BadInterval(lo.to_string(), hi.to_string());
        if lo >= hi {
            return Err(bad());
        }
        let (p_lo, p_hi) = (poly_eval(&poly, &lo), poly_eval(&poly, &hi));
        if p_lo.is_zero() || p_hi.is_zero() {
            return Err(bad());
        }
        let seq = sturm_sequence(&poly);
        let roots = sign_changes(&seq, &lo) - sign_changes(&seq, &hi);
        if roots != 1 {
            return Err(AlgebraicError::RootCount(roots));
        }
        let lead = poly[degree].clone();
        let monic = poly.iter().map(|c| c / &lead).collect();
        Ok(Arc::new(Self {
            minimal_polynomial: coeffs,
            monic,
            levels: RwLock::new(vec![RationalInterval { lo, hi }]),
            sign_at_lo: sign_of(&p_lo),
        }))
    }

    /// Convenience constructor from `i64` coefficients and `"p/q"` strings.
    pub fn from_strs(coeffs: &[i64], lo: &str, hi: &str) -> Result<Arc<Self>, AlgebraicError> {
        Self::new(
            coeffs.iter().map(|&c| BigInt::from(c)).collect(),
            parse_rational(lo)?,
            parse_rational(hi)?,
        )
    }

    /// The parameter for plain rational arithmetic: root of `x` in `(-1, 1)`.
    pub fn rationals() -> Arc<Self> {
        Self::from_strs(&[0, 1], "-1", "1").expect("x has a single root at 0")
    }

    pub fn degree(&self) -> usize {
        self.minimal_polynomial.len() - 1
    }

    pub fn minimal_polynomial(&self) -> &[BigInt] {
        &self.minimal_polynomial
    }

    /// The coarsest (user supplied) isolating interval.
    pub fn isolating_interval(&self) -> RationalInterval {
        self.levels.read().unwrap()[0].clone()
    }

    /// Isolating interval after `level * 8` bisections.
    pub fn interval_at_level(&self, level: usize) -> RationalInterval {
        {
            let levels = self.levels.read().unwrap();
            if let Some(iv) = levels.get(level) {
                return iv.clone();
            }
        }
        let mut levels = self.levels.write().unwrap();
        while levels.len() <= level {
            let mut iv = levels.last().unwrap().clone();
            for _ in 0..STEPS_PER_LEVEL {
                if iv.lo == iv.hi {
                    break;
                }
                let mid = iv.midpoint();
                let s = sign_of(&poly_eval(&self.monic, &mid)) * self.monic_sign_fix();
                if s == 0 {
                    iv = RationalInterval { lo: mid.clone(), hi: mid };
                } else if s == self.sign_at_lo {
                    iv.lo = mid;
                } else {
                    iv.hi = mid;
                }
            }
            levels.push(iv);
        }
        levels[level].clone()
    }

    // The cached sign at `lo` is for the integer polynomial; the monic copy
    // differs by the sign of the leading coefficient.
    fn monic_sign_fix(&self) -> i8 {
        if self.minimal_polynomial.last().unwrap().is_negative() {
            -1
        } else {
            1
        }
    }

    pub fn same_as(&self, other: &Self) -> bool {
        std::ptr::eq(self, other)
            || (self.minimal_polynomial == other.minimal_polynomial
                && self.isolating_interval() == other.isolating_interval())
    }

    /// Rough floating value of the root, from the coarse interval midpoint
    /// refined a few levels. Only for heuristics.
    fn rough_value(&self) -> f64 {
        self.interval_at_level(4).midpoint().to_f64().unwrap_or(0.0)
    }

    pub fn element(self: &Arc<Self>, coefficients: Vec<BigRational>) -> Result<RingElement, AlgebraicError> {
        let mut poly = trim(coefficients);
        if poly.len() > self.degree() {
            poly = poly_divrem(&poly, &self.monic).1;
        }
        Ok(RingElement::canonical(self.clone(), poly))
    }

    /// Builds an element from exactly `degree` coefficients, rejecting other
    /// lengths.
    pub fn element_exact_len(
        self: &Arc<Self>,
        coefficients: Vec<BigRational>,
    ) -> Result<RingElement, AlgebraicError> {
        if coefficients.len() > self.degree() {
            return Err(AlgebraicError::CoefficientCount {
                got: coefficients.len(),
                degree: self.degree(),
            });
        }
        self.element(coefficients)
    }

    pub fn rational(self: &Arc<Self>, value: BigRational) -> RingElement {
        RingElement::canonical(self.clone(), vec![value])
    }

    pub fn integer(self: &Arc<Self>, value: i64) -> RingElement {
        self.rational(BigRational::from_integer(BigInt::from(value)))
    }

    /// The generator λ itself.
    pub fn generator(self: &Arc<Self>) -> RingElement {
        self.element(vec![BigRational::zero(), BigRational::one()])
            .expect("generator is always representable")
    }
}

/// A residue class in ℚ[x] / (minimal polynomial).
#[derive(Clone)]
pub struct RingElement {
    param: Arc<AlgebraicParameter>,
    coefficients: Vec<BigRational>,
}

impl fmt::Debug for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RingElement({self})")
    }
}

impl fmt::Display for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coefficients.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})λ")?,
                _ => write!(f, "({c})λ^{k}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl PartialEq for RingElement {
    fn eq(&self, other: &Self) -> bool {
        self.coefficients == other.coefficients
    }
}

impl Eq for RingElement {}

impl Hash for RingElement {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.coefficients.hash(state);
    }
}

impl RingElement {
    fn canonical(param: Arc<AlgebraicParameter>, mut coefficients: Vec<BigRational>) -> Self {
        coefficients.resize(param.degree(), BigRational::zero());
        Self { param, coefficients }
    }

    pub fn parameter(&self) -> &Arc<AlgebraicParameter> {
        &self.param
    }

    pub fn coefficients(&self) -> &[BigRational] {
        &self.coefficients
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.iter().all(|c| c.is_zero())
    }

    fn check(&self, other: &Self) -> Result<(), AlgebraicError> {
        if Arc::ptr_eq(&self.param, &other.param) || self.param.same_as(&other.param) {
            Ok(())
        } else {
            Err(AlgebraicError::ParameterMismatch)
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, AlgebraicError> {
        self.check(other)?;
        let coefficients = self
            .coefficients
            .iter()
            .zip(&other.coefficients)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self { param: self.param.clone(), coefficients })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, AlgebraicError> {
        self.check(other)?;
        let coefficients = self
            .coefficients
            .iter()
            .zip(&other.coefficients)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Self { param: self.param.clone(), coefficients })
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, AlgebraicError> {
        self.check(other)?;
        let product = poly_mul(&self.coefficients, &other.coefficients);
        let reduced = if product.len() > self.param.degree() {
            poly_divrem(&product, &self.param.monic).1
        } else {
            product
        };
        Ok(Self::canonical(self.param.clone(), reduced))
    }

    /// Multiplicative inverse via the extended Euclidean algorithm.
    pub fn inverse(&self) -> Result<Self, AlgebraicError> {
        if self.is_zero() {
            return Err(AlgebraicError::DivisionByZero);
        }
        // Invariant: s_k * a ≡ r_k (mod minpoly).
        let (mut r0, mut r1) = (self.param.monic.clone(), trim(self.coefficients.clone()));
        let (mut s0, mut s1): (Poly, Poly) = (Vec::new(), vec![BigRational::one()]);
        while r1.len() > 1 {
            let (q, r) = poly_divrem(&r0, &r1);
            let s = poly_sub(&s0, &poly_mul(&q, &s1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
        }
        if r1.is_empty() {
            // Common factor with the minimal polynomial: the contract was
            // violated (reducible polynomial).
            return Err(AlgebraicError::DivisionByZero);
        }
        let c = r1[0].clone();
        let inv: Poly = s1.into_iter().map(|x| x / &c).collect();
        self.param.element(inv)
    }

    /// Enclosure of the real value using the isolating interval at `level`.
    pub fn enclosure_at(&self, level: usize) -> RationalInterval {
        let iv = self.param.interval_at_level(level);
        self.enclose(&iv)
    }

    fn enclose(&self, iv: &RationalInterval) -> RationalInterval {
        let mid = iv.midpoint();
        let value = poly_eval(&self.coefficients, &mid);
        if self.coefficients.len() <= 1 || iv.lo == iv.hi {
            return RationalInterval { lo: value.clone(), hi: value };
        }
        // Mean value bound: |a(x) - a(mid)| <= radius * sum k |a_k| M^(k-1).
        let radius = iv.width() / BigRational::from_integer(BigInt::from(2));
        let m = if iv.lo.abs() > iv.hi.abs() { iv.lo.abs() } else { iv.hi.abs() };
        let mut slope = BigRational::zero();
        let mut power = BigRational::one();
        for (k, c) in self.coefficients.iter().enumerate().skip(1) {
            slope += c.abs() * BigRational::from_integer(BigInt::from(k)) * &power;
            power *= &m;
        }
        let err = radius * slope;
        RationalInterval { lo: &value - &err, hi: value + err }
    }

    /// Sign decided exactly: zero by canonical form, otherwise by refining
    /// until the enclosure excludes zero.
    pub fn signum(&self) -> Ordering {
        if self.is_zero() {
            return Ordering::Equal;
        }
        let mut level = 0;
        loop {
            let enc = self.enclosure_at(level);
            if enc.lo.is_positive() {
                return Ordering::Greater;
            }
            if enc.hi.is_negative() {
                return Ordering::Less;
            }
            level += 1;
        }
    }

    pub fn compare(&self, other: &Self) -> Ordering {
        self.try_sub(other)
            .expect("compare requires elements of the same parameter")
            .signum()
    }

    /// A float within `abs_tol` of the true value (plus the final rounding to
    /// `f64`). The refinement level is chosen from `abs_tol` and the element
    /// alone, so the result is deterministic.
    pub fn to_float(&self, abs_tol: f64) -> f64 {
        assert!(abs_tol > 0.0, "to_float requires a positive tolerance");
        if self.coefficients.len() <= 1 || self.coefficients[1..].iter().all(|c| c.is_zero()) {
            return self.coefficients.first().and_then(|c| c.to_f64()).unwrap_or(0.0);
        }
        let tol = BigRational::from_float(abs_tol).expect("finite tolerance");
        let mut level = self.start_level(abs_tol);
        loop {
            let enc = self.enclosure_at(level);
            if enc.width() <= tol {
                return enc.midpoint().to_f64().unwrap_or(f64::NAN);
            }
            level += 1;
        }
    }

    // Deterministic first guess at the refinement level needed for `tol`.
    fn start_level(&self, tol: f64) -> usize {
        let m = self.param.rough_value().abs().max(1.0) * 2.0;
        let slope: f64 = self
            .coefficients
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c.to_f64().unwrap_or(f64::MAX).abs() * k as f64 * m.powi(k as i32 - 1))
            .sum();
        let w0 = self.param.isolating_interval().width().to_f64().unwrap_or(1.0);
        let bits = ((w0 * slope.max(1e-300)) / tol).log2().max(0.0);
        (bits / STEPS_PER_LEVEL as f64).floor() as usize
    }
}

impl Add for &RingElement {
    type Output = RingElement;
    fn add(self, rhs: Self) -> RingElement {
        self.try_add(rhs).expect("ring elements over different parameters")
    }
}

impl Sub for &RingElement {
    type Output = RingElement;
    fn sub(self, rhs: Self) -> RingElement {
        self.try_sub(rhs).expect("ring elements over different parameters")
    }
}

impl Mul for &RingElement {
    type Output = RingElement;
    fn mul(self, rhs: Self) -> RingElement {
        self.try_mul(rhs).expect("ring elements over different parameters")
    }
}

impl Neg for &RingElement {
    type Output = RingElement;
    fn neg(self) -> RingElement {
        RingElement {
            param: self.param.clone(),
            coefficients: self.coefficients.iter().map(|c| -c).collect(),
        }
    }
}

/// Sorts elements by exact value, using float enclosures first and falling
/// back to exact comparison only for close pairs.
pub fn sort_exact(values: &mut [RingElement]) {
    let mut keyed: Vec<(f64, RingElement)> = values
        .iter()
        .map(|v| (v.to_float(1e-24), v.clone()))
        .collect();
    keyed.sort_by(|(fa, a), (fb, b)| {
        let margin = 1e-20 + 4.0 * f64::EPSILON * fa.abs().max(fb.abs());
        if (fa - fb).abs() > margin {
            fa.partial_cmp(fb).unwrap()
        } else {
            a.compare(b)
        }
    });
    for (slot, (_, v)) in values.iter_mut().zip(keyed) {
        *slot = v;
    }
}

/// Integer content of a coefficient vector.
pub(crate) fn content(coeffs: &[BigInt]) -> BigInt {
    coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
}

/// Arithmetic type of a contraction parameter `λ ∈ (0, 1)`, read off its
/// minimal polynomial.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ParameterClass {
    /// `1/λ` is a Garsia number: an algebraic integer in `(1, 2)` with norm
    /// `±2` whose conjugates all lie outside the closed unit disk.
    GarsiaReciprocal,
    /// `1/λ` is a Pisot number: an algebraic integer `> 1` whose other
    /// conjugates lie inside the open unit disk.
    PisotReciprocal,
    Other,
}

impl AlgebraicParameter {
    pub fn classify(self: &Arc<Self>) -> ParameterClass {
        let lambda = self.generator_value();
        if !(lambda > 0.0 && lambda < 1.0) {
            return ParameterClass::Other;
        }
        let g = content(&self.minimal_polynomial);
        let coeffs: Vec<BigInt> = self.minimal_polynomial.iter().map(|c| c / &g).collect();
        let d = coeffs.len() - 1;
        // The reversed polynomial is the minimal polynomial of 1/λ, monic up
        // to sign exactly when the constant term here is ±1.
        if !coeffs[0].abs().is_one() {
            return ParameterClass::Other;
        }
        if coeffs[d].abs() == BigInt::from(2) && lambda > 0.5 && roots_inside_unit_disk(&coeffs) {
            return ParameterClass::GarsiaReciprocal;
        }
        if d == 1 || other_roots_outside_unit_circle(&coeffs, lambda) {
            return ParameterClass::PisotReciprocal;
        }
        ParameterClass::Other
    }

    fn generator_value(self: &Arc<Self>) -> f64 {
        self.generator().to_float(1e-12)
    }
}

/// Exact Schur–Cohn test: every complex root has modulus `< 1`.
fn roots_inside_unit_disk(coeffs: &[BigInt]) -> bool {
    let mut p: Poly = coeffs.iter().map(|c| BigRational::from_integer(c.clone())).collect();
    while p.len() > 1 {
        let d = p.len() - 1;
        let (a0, ad) = (p[0].clone(), p[d].clone());
        if a0.abs() >= ad.abs() {
            return false;
        }
        // (a_d p − a_0 p*) / z keeps the number of roots inside the disk
        // and drops the root at 0.
        p = (1..=d).map(|i| &ad * &p[i] - &a0 * &p[d - i]).collect();
    }
    true
}

/// Numeric check (Durand–Kerner) that the real root near `lambda` is the only
/// root inside the closed unit disk, all others lying well outside.
fn other_roots_outside_unit_circle(coeffs: &[BigInt], lambda: f64) -> bool {
    use num_complex::Complex64;
    let d = coeffs.len() - 1;
    let lead = coeffs[d].to_f64().unwrap_or(f64::NAN);
    let c: Vec<f64> = coeffs.iter().map(|x| x.to_f64().unwrap_or(f64::NAN) / lead).collect();
    if c.iter().any(|x| !x.is_finite()) {
        return false;
    }
    let eval = |z: Complex64| c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &a| acc * z + a);
    let seed = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..d).map(|k| seed.powu(k as u32)).collect();
    for _ in 0..2000 {
        let mut delta = 0.0f64;
        for i in 0..d {
            let denom = (0..d).filter(|&j| j != i).fold(Complex64::new(1.0, 0.0), |acc, j| acc * (roots[i] - roots[j]));
            let step = eval(roots[i]) / denom;
            roots[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-15 {
            break;
        }
    }
    let near = roots.iter().filter(|z| (**z - lambda).norm() < 1e-8).count();
    let outside = roots.iter().filter(|z| z.norm() > 1.0 + 1e-9).count();
    near == 1 && outside == d - 1
}

#[cfg(test)]
mod tests {
    use super::*;

    fn golden() -> Arc<AlgebraicParameter> {
        // x^2 + x - 1, root (sqrt5 - 1)/2
        AlgebraicParameter::from_strs(&[-1, 1, 1], "1/2", "1").unwrap()
    }

    fn inv_sqrt2() -> Arc<AlgebraicParameter> {
        AlgebraicParameter::from_strs(&[-1, 0, 2], "1/2", "1").unwrap()
    }

    #[test]
    fn parse_literals() {
        assert_eq!(parse_rational("3/4").unwrap(), BigRational::new(3.into(), 4.into()));
        assert_eq!(parse_rational("-0.375").unwrap(), BigRational::new((-3).into(), 8.into()));
        assert_eq!(parse_rational("7").unwrap(), BigRational::from_integer(7.into()));
        assert_eq!(parse_rational("1e-2").unwrap(), BigRational::new(1.into(), 100.into()));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
    }

    #[test]
    fn identity_and_cancellation() {
        let p = golden();
        let lam = p.generator();
        assert_eq!(&lam + &p.integer(0), lam);
        let one_minus = &p.integer(1) - &lam;
        assert_eq!(&one_minus + &lam, p.integer(1));
    }

    #[test]
    fn golden_square_reduces() {
        let p = golden();
        let lam = p.generator();
        assert_eq!(&lam * &lam, &p.integer(1) - &lam);
    }

    #[test]
    fn compare_cases() {
        let p = inv_sqrt2();
        let lam = p.generator();
        assert_eq!(lam.compare(&lam), Ordering::Equal);
        let one_minus = &p.integer(1) - &lam;
        let square = &lam * &lam;
        assert_eq!(square, p.rational(BigRational::new(1.into(), 2.into())));
        // 1 - 0.7071 < 0.5
        assert_eq!(one_minus.compare(&square), Ordering::Less);
        assert_eq!(lam.compare(&p.integer(1)), Ordering::Less);
    }

    #[test]
    fn to_float_values() {
        let lam = inv_sqrt2().generator();
        assert!((lam.to_float(1e-12) - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert_eq!(inv_sqrt2().integer(1).to_float(1e-3), 1.0);
        let g = golden().generator();
        assert!((g.to_float(1e-12) - (5f64.sqrt() - 1.0) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn inverse_round_trip() {
        let p = golden();
        let x = &p.integer(1) - &p.generator();
        let inv = x.inverse().unwrap();
        assert_eq!(&x * &inv, p.integer(1));
        assert_eq!(p.integer(0).inverse(), Err(AlgebraicError::DivisionByZero));
    }

    #[test]
    fn rejects_bad_parameters() {
        assert_eq!(
            AlgebraicParameter::from_strs(&[-1, 0, 1], "0", "2").unwrap_err(),
            AlgebraicError::RationalRoot("1".into())
        );
        assert!(matches!(
            AlgebraicParameter::from_strs(&[-2, 0, 1], "-2", "2").unwrap_err(),
            AlgebraicError::RootCount(2)
        ));
        assert_eq!(
            AlgebraicParameter::from_strs(&[1, 2, 1], "-2", "0").unwrap_err(),
            AlgebraicError::NotSquareFree
        );
        assert_eq!(AlgebraicParameter::from_strs(&[5], "0", "1").unwrap_err(), AlgebraicError::Degenerate);
        assert!(AlgebraicParameter::from_strs(&[-2, 0, 1], "2", "1").is_err());
    }

    #[test]
    fn mismatched_parameters() {
        let a = golden().generator();
        let b = inv_sqrt2().generator();
        assert_eq!(a.try_add(&b), Err(AlgebraicError::ParameterMismatch));
        assert_eq!(a.try_mul(&b), Err(AlgebraicError::ParameterMismatch));
    }

    #[test]
    fn degree_one_is_plain_rational() {
        let p = AlgebraicParameter::from_strs(&[-2, 5], "0", "1").unwrap();
        assert_eq!(p.generator(), p.rational(BigRational::new(2.into(), 5.into())));
        assert_eq!(p.generator().to_float(1e-9), 0.4);
    }

    #[test]
    fn sort_exact_orders_close_values() {
        let p = golden();
        let lam = p.generator();
        let mut v = vec![p.integer(1), lam.clone(), &lam * &lam, p.integer(0)];
        sort_exact(&mut v);
        let floats: Vec<f64> = v.iter().map(|x| x.to_float(1e-12)).collect();
        assert!(floats.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn classification() {
        assert_eq!(inv_sqrt2().classify(), ParameterClass::GarsiaReciprocal);
        let cube = AlgebraicParameter::from_strs(&[-1, 0, 0, 2], "1/2", "1").unwrap();
        assert_eq!(cube.classify(), ParameterClass::GarsiaReciprocal);
        assert_eq!(golden().classify(), ParameterClass::PisotReciprocal);
        // x^3 + x^2 + x - 1: reciprocal of the tribonacci number.
        let trib = AlgebraicParameter::from_strs(&[-1, 1, 1, 1], "1/2", "1").unwrap();
        assert_eq!(trib.classify(), ParameterClass::PisotReciprocal);
        let rational = AlgebraicParameter::from_strs(&[-2, 5], "0", "1").unwrap();
        assert_eq!(rational.classify(), ParameterClass::Other);
        // 3x^2 - 1: not an algebraic integer's reciprocal.
        let other = AlgebraicParameter::from_strs(&[-1, 0, 3], "0", "1").unwrap();
        assert_eq!(other.classify(), ParameterClass::Other);
    }
}
