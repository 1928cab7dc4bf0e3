//! Exact truncated Laurent series in q.
//!
//! Everything in this crate computes inside [`QSeries`]: a finite map from
//! exact rational exponents to exact rational coefficients, together with a
//! truncation order N up to which every stored coefficient is provably exact.
//! Operations compute the largest order at which the result is still exact
//! and record it, so comparisons near the truncation boundary can never
//! silently use wrong coefficients.
//!
//! Exponents are exact rationals rather than a pre-scaled integer grid:
//! several identities mix fractional powers such as q^{1/2} with nomes like
//! -q, and the required granularity depends on the identity.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Integer, One, Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

/// Exact rational coefficient (arbitrary precision, always in lowest terms).
pub type QRat = BigRational;

/// Exact rational exponent of q (arbitrary precision, always in lowest terms).
pub type QExp = BigRational;

/// Rational from an integer.
pub fn qr(n: i64) -> QRat {
    QRat::from_integer(BigInt::from(n))
}

/// Rational n/d.
pub fn qr_frac(n: i64, d: i64) -> QRat {
    QRat::new(BigInt::from(n), BigInt::from(d))
}

/// Exponent from an integer.
pub fn qe(n: i64) -> QExp {
    qr(n)
}

/// Exponent n/d.
pub fn qe_frac(n: i64, d: i64) -> QExp {
    qr_frac(n, d)
}

/// binom(n, 2) = n(n-1)/2 for any integer n (positive for |n| >= 2).
pub fn binom2(n: i64) -> i64 {
    n * (n - 1) / 2
}

/// binom(w, 2) = w(w-1)/2 evaluated exactly at a rational w.
pub fn binom2_rat(w: &QRat) -> QRat {
    w * (w - &qr(1)) / qr(2)
}

/// base^e for integer e of either sign; base must be nonzero when e < 0.
pub fn rat_pow(base: &QRat, e: i64) -> QRat {
    if e == 0 || base.is_one() {
        return QRat::one();
    }
    if (-base.clone()).is_one() {
        return if e % 2 == 0 { QRat::one() } else { base.clone() };
    }
    let mut acc = QRat::one();
    let b = if e > 0 { base.clone() } else { base.recip() };
    for _ in 0..e.unsigned_abs() {
        acc *= &b;
    }
    acc
}

/// Largest integer <= x, as i64.
pub fn floor_i64(x: &QRat) -> i64 {
    x.floor().to_integer().to_i64().expect("exponent out of i64 range")
}

/// Smallest integer >= x, as i64.
pub fn ceil_i64(x: &QRat) -> i64 {
    x.ceil().to_integer().to_i64().expect("exponent out of i64 range")
}

fn denom_u64(x: &QExp) -> u64 {
    x.denom().to_u64().expect("exponent denominator out of u64 range")
}

// ---------------------------------------------------------------------------
// Monomial
// ---------------------------------------------------------------------------

/// An exact rational coefficient times q^(rational exponent).
///
/// Monomials are the argument type for the x, y, z slots of every builder
/// and, via [`Nome`], for nomes such as -q or q^{1/2}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Monomial {
    pub coeff: QRat,
    pub exp: QExp,
}

impl Monomial {
    pub fn new(coeff: QRat, exp: QExp) -> Self {
        Monomial { coeff, exp }
    }

    /// The zero monomial.
    pub fn zero() -> Self {
        Monomial { coeff: QRat::zero(), exp: QExp::zero() }
    }

    pub fn one() -> Self {
        Monomial { coeff: QRat::one(), exp: QExp::zero() }
    }

    /// q itself.
    pub fn q() -> Self {
        Monomial { coeff: QRat::one(), exp: qe(1) }
    }

    /// q^n.
    pub fn q_pow(n: i64) -> Self {
        Monomial { coeff: QRat::one(), exp: qe(n) }
    }

    /// c * q^e with integer data.
    pub fn term(c: i64, e: i64) -> Self {
        Monomial { coeff: qr(c), exp: qe(e) }
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.coeff.is_one() && self.exp.is_zero()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial {
            coeff: &self.coeff * &other.coeff,
            exp: &self.exp + &other.exp,
        }
    }

    pub fn neg(&self) -> Monomial {
        Monomial { coeff: -self.coeff.clone(), exp: self.exp.clone() }
    }

    /// Multiplicative inverse; the monomial must be nonzero.
    pub fn inv(&self) -> Monomial {
        assert!(!self.is_zero(), "cannot invert the zero monomial");
        Monomial { coeff: self.coeff.recip(), exp: -self.exp.clone() }
    }

    /// Integer power of either sign (nonzero base required for n < 0).
    pub fn pow(&self, n: i64) -> Monomial {
        if n == 0 {
            return Monomial::one();
        }
        Monomial {
            coeff: rat_pow(&self.coeff, n),
            exp: &self.exp * qe(n),
        }
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeff.is_zero() {
            return write!(f, "0");
        }
        if self.exp.is_zero() {
            return write!(f, "{}", self.coeff);
        }
        let exp = if self.exp.is_one() {
            "q".to_string()
        } else if self.exp.is_integer() {
            format!("q^{}", self.exp)
        } else {
            format!("q^{{{}}}", self.exp)
        };
        if self.coeff.is_one() {
            write!(f, "{exp}")
        } else if (-self.coeff.clone()).is_one() {
            write!(f, "-{exp}")
        } else {
            write!(f, "{}*{exp}", self.coeff)
        }
    }
}

// ---------------------------------------------------------------------------
// Nome
// ---------------------------------------------------------------------------

/// A validated nome: (+1 or -1) times q^t with t > 0.
///
/// The sign of a nome is only ever raised to integer powers in the formulas
/// this crate evaluates, so the constructor rejects anything else loudly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Nome(Monomial);

impl Nome {
    pub fn try_new(m: Monomial) -> Result<Self> {
        let unit = m.coeff.is_one() || (-m.coeff.clone()).is_one();
        if !unit || !m.exp.is_positive() {
            return Err(Error::InvalidNome(m.to_string()));
        }
        Ok(Nome(m))
    }

    /// The nome q^t for integer t > 0.
    pub fn q_pow(t: i64) -> Self {
        assert!(t > 0);
        Nome(Monomial::q_pow(t))
    }

    /// The nome q.
    pub fn q() -> Self {
        Nome(Monomial::q())
    }

    /// The nome -q.
    pub fn neg_q() -> Self {
        Nome(Monomial::term(-1, 1))
    }

    pub fn monomial(&self) -> &Monomial {
        &self.0
    }

    pub fn exp(&self) -> &QExp {
        &self.0.exp
    }

    pub fn coeff(&self) -> &QRat {
        &self.0.coeff
    }

    pub fn is_negative(&self) -> bool {
        self.0.coeff.is_negative()
    }

    /// nome^k as a monomial, for integer k of either sign.
    pub fn pow(&self, k: i64) -> Monomial {
        self.0.pow(k)
    }

    /// The nome raised to a positive integer power, as a nome.
    pub fn pow_nome(&self, k: i64) -> Nome {
        assert!(k > 0);
        Nome(self.0.pow(k))
    }
}

impl fmt::Display for Nome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

// ---------------------------------------------------------------------------
// QSeries
// ---------------------------------------------------------------------------

/// Truncated formal Laurent series in q.
///
/// Invariants: every stored exponent is <= `order`, no stored coefficient is
/// zero, and every stored exponent's denominator divides `granularity` (the
/// lcm of denominators introduced by construction). Two series are equal to
/// order M iff their term maps agree on exponents <= M, for M up to the
/// smaller of the two orders.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QSeries {
    order: QExp,
    granularity: u64,
    terms: BTreeMap<QExp, QRat>,
}

impl QSeries {
    /// The zero series, exact to `order`.
    pub fn zero(order: QExp) -> Self {
        let granularity = denom_u64(&order);
        QSeries { order, granularity, terms: BTreeMap::new() }
    }

    /// The constant 1, exact to `order`.
    pub fn one(order: QExp) -> Self {
        QSeries::constant(QRat::one(), order)
    }

    /// A constant series.
    pub fn constant(c: QRat, order: QExp) -> Self {
        let mut s = QSeries::zero(order);
        s.add_term(QExp::zero(), c);
        s
    }

    /// The series consisting of a single monomial.
    pub fn from_monomial(m: &Monomial, order: QExp) -> Self {
        let mut s = QSeries::zero(order);
        s.add_term(m.exp.clone(), m.coeff.clone());
        s
    }

    pub fn order(&self) -> &QExp {
        &self.order
    }

    pub fn granularity(&self) -> u64 {
        self.granularity
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of stored (nonzero) terms.
    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// Iterate over (exponent, coefficient) pairs in ascending exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (&QExp, &QRat)> {
        self.terms.iter()
    }

    /// The coefficient of q^e (zero if absent; e must be <= order for the
    /// answer to be meaningful).
    pub fn coeff(&self, e: &QExp) -> QRat {
        self.terms.get(e).cloned().unwrap_or_else(QRat::zero)
    }

    /// Convenience: coefficient at an integer exponent.
    pub fn coeff_int(&self, e: i64) -> QRat {
        self.coeff(&qe(e))
    }

    /// Lowest stored exponent and its coefficient.
    pub fn min_term(&self) -> Option<(&QExp, &QRat)> {
        self.terms.iter().next()
    }

    /// Lowest exponent that could be affected by terms beyond the truncation:
    /// the lowest stored exponent, or the order itself for a zero series.
    fn min_exp_effective(&self) -> QExp {
        match self.terms.keys().next() {
            Some(e) => e.clone(),
            None => self.order.clone(),
        }
    }

    /// Add c*q^e into the series, pruning zeros and dropping exponents
    /// beyond the truncation order.
    pub fn add_term(&mut self, e: QExp, c: QRat) {
        if c.is_zero() || e > self.order {
            return;
        }
        self.granularity = self.granularity.lcm(&denom_u64(&e));
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// Termwise sum; the result order is the smaller of the two orders.
    pub fn add(&self, other: &QSeries) -> QSeries {
        let order = self.order.clone().min(other.order.clone());
        let mut out = QSeries::zero(order);
        out.granularity = self.granularity.lcm(&other.granularity);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), c.clone());
        }
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &QSeries) -> QSeries {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> QSeries {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = -c.clone();
        }
        out
    }

    /// Multiply by a scalar.
    pub fn scale(&self, c: &QRat) -> QSeries {
        if c.is_zero() {
            return QSeries::zero(self.order.clone());
        }
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v *= c;
        }
        out
    }

    /// Multiply by a monomial (Laurent shift plus scale). The order shifts
    /// with the exponent: coefficients up to order + e stay exact.
    pub fn mul_monomial(&self, m: &Monomial) -> QSeries {
        if m.is_zero() {
            return QSeries::zero(&self.order + &m.exp);
        }
        let mut out = QSeries::zero(&self.order + &m.exp);
        out.granularity = self.granularity.lcm(&denom_u64(&m.exp));
        for (e, c) in &self.terms {
            out.add_term(e + &m.exp, c * &m.coeff);
        }
        out
    }

    /// Cauchy product. The result order is
    /// min(a.order + min_exp(b), b.order + min_exp(a)), the largest order at
    /// which every coefficient is provably exact.
    pub fn mul(&self, other: &QSeries) -> QSeries {
        let order = (&self.order + other.min_exp_effective())
            .min(&other.order + self.min_exp_effective());
        let mut out = QSeries::zero(order);
        out.granularity = self.granularity.lcm(&other.granularity);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = ea + eb;
                if e > out.order {
                    // later eb only grow
                    break;
                }
                out.add_term(e, ca * cb);
            }
        }
        out
    }

    /// Multiplicative inverse by long division against the leading term.
    ///
    /// For a series with lowest term c*q^e known to order N, the inverse has
    /// lowest term c^{-1} q^{-e} and is exact to N - 2e.
    pub fn inv(&self) -> Result<QSeries> {
        let (e0, c0) = match self.min_term() {
            Some((e, c)) => (e.clone(), c.clone()),
            None => return Err(Error::ZeroSeries),
        };
        // u = self * c0^{-1} q^{-e0} is a unit series with constant term 1,
        // exact to N - e0.
        let norm = Monomial::new(c0.recip(), -e0.clone());
        let u = self.mul_monomial(&norm);
        let target = u.order.clone();
        let mut inv_u = QSeries::zero(target.clone());
        inv_u.granularity = u.granularity;
        let mut rem = QSeries::one(target.clone());
        rem.granularity = u.granularity;
        while let Some((er, cr)) = rem.min_term() {
            let t = Monomial::new(cr.clone(), er.clone());
            inv_u.add_term(t.exp.clone(), t.coeff.clone());
            // rem -= t * u, truncated to target
            let mut upd = QSeries::zero(target.clone());
            upd.granularity = rem.granularity;
            for (e, c) in &u.terms {
                let ee = e + &t.exp;
                if ee > target {
                    break;
                }
                upd.add_term(ee, c * &t.coeff);
            }
            rem = rem.sub(&upd);
        }
        // 1/self = inv_u * c0^{-1} q^{-e0}
        Ok(inv_u.mul_monomial(&norm))
    }

    /// Restrict to a smaller truncation order.
    pub fn truncate(&self, order: QExp) -> QSeries {
        assert!(
            order <= self.order,
            "truncate cannot extend a series (have {}, want {})",
            self.order,
            order
        );
        let mut out = QSeries::zero(order.clone());
        out.granularity = self.granularity;
        for (e, c) in &self.terms {
            if *e > order {
                break;
            }
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    /// First exponent <= upto where the two series differ, with both
    /// coefficients. `upto` must not exceed either order.
    pub fn first_mismatch(&self, other: &QSeries, upto: &QExp) -> Option<(QExp, QRat, QRat)> {
        assert!(
            *upto <= self.order && *upto <= other.order,
            "comparison order exceeds a truncation order"
        );
        let mut exps: Vec<&QExp> = self
            .terms
            .keys()
            .chain(other.terms.keys())
            .filter(|e| **e <= *upto)
            .collect();
        exps.sort();
        exps.dedup();
        for e in exps {
            let a = self.coeff(e);
            let b = other.coeff(e);
            if a != b {
                return Some((e.clone(), a, b));
            }
        }
        None
    }

    /// Exact agreement of all coefficients up to `upto`.
    pub fn eq_to_order(&self, other: &QSeries, upto: &QExp) -> bool {
        self.first_mismatch(other, upto).is_none()
    }

    /// The largest order at which the two series may be compared.
    pub fn common_order(&self, other: &QSeries) -> QExp {
        self.order.clone().min(other.order.clone())
    }

    /// Internal: override the recorded order when exactness to a higher
    /// order has been established by the caller's own argument.
    pub(crate) fn with_order(mut self, order: QExp) -> QSeries {
        self.granularity = self.granularity.lcm(&denom_u64(&order));
        self.terms.retain(|e, _| *e <= order);
        self.order = order;
        self
    }
}

/// Outcome of comparing two series coefficientwise to a stated order.
#[derive(Clone, Debug)]
pub struct Comparison {
    pub name: String,
    pub order: QExp,
    pub mismatch: Option<(QExp, QRat, QRat)>,
}

impl Comparison {
    pub fn of(name: impl Into<String>, lhs: &QSeries, rhs: &QSeries, order: &QExp) -> Comparison {
        Comparison {
            name: name.into(),
            order: order.clone(),
            mismatch: lhs.first_mismatch(rhs, order),
        }
    }

    pub fn pass(&self) -> bool {
        self.mismatch.is_none()
    }
}

impl fmt::Display for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0 + O(q^{})", self.order);
        }
        let mut first = true;
        for (e, c) in &self.terms {
            let m = Monomial::new(c.clone(), e.clone());
            if first {
                write!(f, "{m}")?;
                first = false;
            } else if c.is_negative() {
                write!(f, " - {}", m.neg())?;
            } else {
                write!(f, " + {m}")?;
            }
        }
        write!(f, " + O(q^{})", self.order)
    }
}

/// 1/(1 - c q^e) as an exact series up to `order`.
///
/// - e > 0: sum_j c^j q^{je}
/// - e < 0: -c^{-1} q^{-e} / (1 - c^{-1} q^{-e}), expanded the same way
/// - e = 0 and c != 1: the scalar 1/(1-c); e = 0 and c = 1 is a pole.
pub fn geometric_inv(c: &QRat, e: &QExp, order: &QExp) -> Result<QSeries> {
    if e.is_zero() {
        if c.is_one() {
            return Err(Error::ZeroSeries);
        }
        return Ok(QSeries::constant((QRat::one() - c).recip(), order.clone()));
    }
    let (cc, ee, extra) = if e.is_positive() {
        (c.clone(), e.clone(), None)
    } else {
        // 1/(1 - c q^e) = -c^{-1} q^{-e} * 1/(1 - c^{-1} q^{-e})
        let ci = c.recip();
        (ci.clone(), -e.clone(), Some(Monomial::new(-ci, -e.clone())))
    };
    let mut out = QSeries::zero(order.clone());
    let mut exp = QExp::zero();
    let mut coef = QRat::one();
    while exp <= *order {
        out.add_term(exp.clone(), coef.clone());
        exp += &ee;
        coef *= &cc;
    }
    Ok(match extra {
        None => out,
        Some(m) => out.mul_monomial(&m).truncate(order.clone()),
    })
}

/// Run a computation that may lose truncation order (through inversions and
/// Laurent shifts), retrying at an inflated working order until the result
/// is exact to at least `order`. The deficit is a fixed offset determined by
/// the lowest exponents involved, so one retry normally suffices.
pub fn eval_to_order<F>(order: &QExp, mut f: F) -> Result<QSeries>
where
    F: FnMut(&QExp) -> Result<QSeries>,
{
    let mut work = order.clone();
    for _ in 0..6 {
        let s = f(&work)?;
        if *s.order() >= *order {
            return Ok(s.truncate(order.clone()));
        }
        let deficit = order - s.order();
        work = &work + &deficit + &deficit;
    }
    Err(Error::NonConvergent(
        "could not reach the requested truncation order".into(),
    ))
}

// ---------------------------------------------------------------------------
// Pochhammer products
// ---------------------------------------------------------------------------

/// (x; nome)_n = prod_{i=0}^{n-1} (1 - nome^i x), expanded to `order`.
pub fn poch_finite(x: &Monomial, nome: &Nome, n: u64, order: &QExp) -> QSeries {
    let factors = (0..n).map(|i| nome.pow(i as i64).mul(x)).collect::<Vec<_>>();
    poch_product(&factors, order)
}

/// (x; nome)_infinity, truncated once factors can no longer affect
/// coefficients <= `order`.
///
/// Factors with non-positive exponent (possible when x has exponent <= 0)
/// are still polynomial and handled exactly; a factor equal to (1 - 1)
/// makes the whole product the genuine zero series.
pub fn poch_inf(x: &Monomial, nome: &Nome, order: &QExp) -> QSeries {
    if x.is_zero() {
        return QSeries::one(order.clone());
    }
    // Split factors into the finitely many with exponent <= 0 and the tail.
    let mut low = Vec::new();
    let mut i = 0i64;
    loop {
        let f = nome.pow(i).mul(x);
        if f.exp.is_positive() {
            break;
        }
        low.push(f);
        i += 1;
    }
    // Net negative shift contributed by the low factors.
    let shift: QExp = low
        .iter()
        .filter(|m| m.exp.is_negative())
        .map(|m| m.exp.clone())
        .fold(QExp::zero(), |a, b| a + b);
    let inner_order = order - &shift;

    // Positive-exponent tail: multiply factors until they exceed inner_order.
    let mut acc = QSeries::one(inner_order.clone());
    let mut j = i;
    loop {
        let f = nome.pow(j).mul(x);
        debug_assert!(f.exp.is_positive());
        if f.exp > inner_order {
            break;
        }
        acc = mul_one_minus(&acc, &f, &inner_order);
        j += 1;
    }
    if !low.is_empty() {
        let low_poly = poch_product_of(&low, &inner_order);
        acc = acc.mul(&low_poly);
    }
    // Exactness to `order` was arranged via inner_order; record it.
    acc.with_order(order.clone())
}

/// Multiply `s` by (1 - m) keeping the stated order (m has positive exp).
fn mul_one_minus(s: &QSeries, m: &Monomial, order: &QExp) -> QSeries {
    let shifted = s.mul_monomial(&m.neg());
    let mut out = QSeries::zero(order.clone());
    out.granularity = s.granularity().lcm(&shifted.granularity());
    for (e, c) in s.terms() {
        out.add_term(e.clone(), c.clone());
    }
    for (e, c) in shifted.terms() {
        if *e > *order {
            break;
        }
        out.add_term(e.clone(), c.clone());
    }
    out
}

/// Product of (1 - f) over the given factor monomials, truncated to `order`.
/// Exact when all factors are kept (used for the low-factor polynomial).
fn poch_product_of(factors: &[Monomial], order: &QExp) -> QSeries {
    let mut acc = QSeries::one(order.clone());
    for f in factors {
        if f.exp.is_zero() {
            // (1 - c): a scalar factor, possibly zero.
            let c = QRat::one() - &f.coeff;
            if c.is_zero() {
                return QSeries::zero(order.clone());
            }
            acc = acc.scale(&c);
        } else {
            acc = mul_one_minus(&acc, f, order);
        }
    }
    acc
}

fn poch_product(factors: &[Monomial], order: &QExp) -> QSeries {
    // Some factors may have negative exponents; extend the working order so
    // the final coefficients up to `order` are exact.
    let shift: QExp = factors
        .iter()
        .filter(|m| m.exp.is_negative())
        .map(|m| m.exp.clone())
        .fold(QExp::zero(), |a, b| a + b);
    let inner_order = order - &shift;
    poch_product_of(factors, &inner_order).with_order(order.clone())
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;

    fn geom(order: i64) -> QSeries {
        // 1 + q + q^2 + ...
        let mut s = QSeries::zero(qe(order));
        for k in 0..=order {
            s.add_term(qe(k), qr(1));
        }
        s
    }

    #[test]
    fn add_identity_and_cancellation() {
        let order = qe(10);
        let s = poch_finite(&Monomial::q(), &Nome::q(), 2, &order);
        let z = QSeries::zero(order.clone());
        assert_eq!(s.add(&z), s);

        // (1 - q) + q = 1
        let mut a = QSeries::one(order.clone());
        a.add_term(qe(1), qr(-1));
        let b = QSeries::from_monomial(&Monomial::q(), order.clone());
        let sum = a.add(&b);
        assert_eq!(sum.term_count(), 1);
        assert_eq!(sum.coeff_int(0), qr(1));

        // (1 + q^2) + (1 - q^2) = 2
        let mut c = QSeries::one(order.clone());
        c.add_term(qe(2), qr(1));
        let mut d = QSeries::one(order.clone());
        d.add_term(qe(2), qr(-1));
        let sum2 = c.add(&d);
        assert_eq!(sum2.term_count(), 1);
        assert_eq!(sum2.coeff_int(0), qr(2));
    }

    #[test]
    fn mul_geometric_inverse() {
        // (1 - q) * (1 + q + q^2 + ...) = 1
        let order = qe(12);
        let mut a = QSeries::one(order.clone());
        a.add_term(qe(1), qr(-1));
        let prod = a.mul(&geom(12));
        assert_eq!(prod.coeff_int(0), qr(1));
        for k in 1..=11 {
            assert_eq!(prod.coeff_int(k), qr(0), "q^{k}");
        }
    }

    #[test]
    fn mul_square_and_laurent_shift() {
        let order = qe(10);
        let mut a = QSeries::one(order.clone());
        a.add_term(qe(1), qr(1));
        let sq = a.mul(&a);
        assert_eq!(sq.coeff_int(0), qr(1));
        assert_eq!(sq.coeff_int(1), qr(2));
        assert_eq!(sq.coeff_int(2), qr(1));

        // q^{-1} * (q + q^2) = 1 + q
        let mut b = QSeries::zero(order.clone());
        b.add_term(qe(1), qr(1));
        b.add_term(qe(2), qr(1));
        let shifted = b.mul_monomial(&Monomial::new(qr(1), qe(-1)));
        assert_eq!(shifted.coeff_int(0), qr(1));
        assert_eq!(shifted.coeff_int(1), qr(1));
    }

    #[test]
    fn inv_examples() {
        // inv(1 - q) = geometric series
        let order = qe(12);
        let mut a = QSeries::one(order.clone());
        a.add_term(qe(1), qr(-1));
        let inv = a.inv().unwrap();
        for k in 0..=10 {
            assert_eq!(inv.coeff_int(k), qr(1), "q^{k}");
        }

        // inv(2) = 1/2
        let two = QSeries::constant(qr(2), order.clone());
        let half = two.inv().unwrap();
        assert_eq!(half.coeff_int(0), qr_frac(1, 2));

        // inv(q^2 (1 - q)) = q^{-2} (1 + q + q^2 + ...)
        let mut b = QSeries::zero(order.clone());
        b.add_term(qe(2), qr(1));
        b.add_term(qe(3), qr(-1));
        let binv = b.inv().unwrap();
        assert_eq!(binv.coeff_int(-2), qr(1));
        assert_eq!(binv.coeff_int(-1), qr(1));
        assert_eq!(binv.coeff_int(0), qr(1));
        // attainable order is 12 - 2*2 = 8
        assert_eq!(*binv.order(), qe(8));

        let zero = QSeries::zero(order);
        assert!(matches!(zero.inv(), Err(Error::ZeroSeries)));
    }

    #[test]
    fn poch_finite_examples() {
        let order = qe(10);
        // (q;q)_0 = 1
        let p0 = poch_finite(&Monomial::q(), &Nome::q(), 0, &order);
        assert_eq!(p0.term_count(), 1);
        assert_eq!(p0.coeff_int(0), qr(1));

        // (q;q)_2 = 1 - q - q^2 + q^3
        let p2 = poch_finite(&Monomial::q(), &Nome::q(), 2, &order);
        assert_eq!(p2.coeff_int(0), qr(1));
        assert_eq!(p2.coeff_int(1), qr(-1));
        assert_eq!(p2.coeff_int(2), qr(-1));
        assert_eq!(p2.coeff_int(3), qr(1));

        // (-q;q^2)_2 = 1 + q + q^3 + q^4
        let p = poch_finite(&Monomial::term(-1, 1), &Nome::q_pow(2), 2, &order);
        assert_eq!(p.coeff_int(0), qr(1));
        assert_eq!(p.coeff_int(1), qr(1));
        assert_eq!(p.coeff_int(2), qr(0));
        assert_eq!(p.coeff_int(3), qr(1));
        assert_eq!(p.coeff_int(4), qr(1));
    }

    #[test]
    fn poch_inf_pentagonal_oracle() {
        // Oracle: the finite product prod_{i=1}^{12} (1 - q^i) to order 12,
        // multiplied out directly.
        let order = qe(12);
        let mut oracle = QSeries::one(order.clone());
        for i in 1..=12 {
            let mut next = QSeries::zero(order.clone());
            for (e, c) in oracle.terms() {
                next.add_term(e.clone(), c.clone());
                next.add_term(e + &qe(i), -c.clone());
            }
            oracle = next;
        }
        let p = poch_inf(&Monomial::q(), &Nome::q(), &order);
        assert!(p.eq_to_order(&oracle, &order));
        // pentagonal pattern: 1 - q - q^2 + q^5 + q^7 - q^12
        for (e, c) in [(0, 1), (1, -1), (2, -1), (5, 1), (7, 1), (12, -1)] {
            assert_eq!(p.coeff_int(e), qr(c), "q^{e}");
        }
        assert_eq!(p.term_count(), 6);
    }

    #[test]
    fn poch_inf_zero_x_and_q2() {
        let order = qe(6);
        let one = poch_inf(&Monomial::zero(), &Nome::q(), &order);
        assert_eq!(one.term_count(), 1);
        assert_eq!(one.coeff_int(0), qr(1));

        // (q^2;q^2)_inf to order 6: 1 - q^2 - q^4 + ...
        let p = poch_inf(&Monomial::q_pow(2), &Nome::q_pow(2), &order);
        assert_eq!(p.coeff_int(0), qr(1));
        assert_eq!(p.coeff_int(2), qr(-1));
        assert_eq!(p.coeff_int(4), qr(-1));
    }

    #[test]
    fn poch_inf_negative_exponent_argument() {
        // (q^{-1}; q)_inf has an exact Laurent expansion; check against the
        // identity (q^{-1};q)_inf = (1 - q^{-1}) (1 - 1) ... = 0 because the
        // i = 1 factor is (1 - q^0) = 0.
        let order = qe(8);
        let p = poch_inf(&Monomial::new(qr(1), qe(-1)), &Nome::q(), &order);
        assert!(p.is_zero());

        // (-q^{-1}; q)_inf is nonzero; lowest term q^{-1} * (-1)... check
        // against direct multiplication of the first factors.
        let x = Monomial::new(qr(-1), qe(-1));
        let p2 = poch_inf(&x, &Nome::q(), &order);
        // The (1 + q^{-1}) factor shifts exponents down by one, so factors
        // out to exponent 9 still matter for coefficients <= 8.
        let mut oracle = QSeries::one(qe(12));
        for i in 0..=12 {
            let f = Nome::q().pow(i).mul(&x);
            let mut next = QSeries::zero(qe(12));
            for (e, c) in oracle.terms() {
                next.add_term(e.clone(), c.clone());
                next.add_term(e + &f.exp, c * &(-f.coeff.clone()));
            }
            oracle = next;
        }
        assert!(p2.eq_to_order(&oracle, &qe(8)));
    }

    #[test]
    fn truncation_stability() {
        // Recomputing at a larger order and truncating reproduces the result.
        let x = Monomial::term(-1, 1);
        let nome = Nome::q_pow(2);
        let a = poch_inf(&x, &nome, &qe(20));
        let b = poch_inf(&x, &nome, &qe(30)).truncate(qe(20));
        assert_eq!(a.first_mismatch(&b, &qe(20)), None);
    }

    #[test]
    fn granularity_tracks_denominators() {
        let mut s = QSeries::zero(qe(4));
        s.add_term(qe_frac(1, 2), qr(1));
        s.add_term(qe_frac(1, 3), qr(1));
        assert_eq!(s.granularity(), 6);
    }
}
