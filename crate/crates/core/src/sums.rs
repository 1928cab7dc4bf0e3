//! Named q-hypergeometric sums and triangular double-sums.
//!
//! [`eval_named_sum`] evaluates the left-hand sides of the Wang-Yee and Liu
//! identities by direct summation: each summand's lowest exponent grows with
//! n, so the loop stops once it exceeds the truncation order, and rational
//! functions of q inside a summand are expanded exactly with geometric
//! inverses.
//!
//! [`TriangularSumSpec`] describes the raw double sums
//! sum_n sum_m (sign) q^(quadratic) (1 +- q^(linear)) over triangles of
//! lattice points; [`eval_triangular_sum`] enumerates them row by row.

use crate::error::{Error, Result};
use crate::series::{geometric_inv, poch_finite, qe, qe_frac, qr, Monomial, Nome, QExp, QRat, QSeries};
use num::{Signed, Zero};
use std::fmt;

// ---------------------------------------------------------------------------
// Named sums
// ---------------------------------------------------------------------------

/// Catalog of the q-hypergeometric left-hand sides.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NamedSumId {
    Wy1Lhs,
    Wy2Lhs,
    Wy3Lhs,
    Liu111aLhs,
    Liu111bLhs,
    Liu111cLhs,
    Liu48Lhs,
    Liu410Lhs,
    Liu46Lhs,
    Sigma,
}

impl NamedSumId {
    pub const ALL: [NamedSumId; 10] = [
        NamedSumId::Wy1Lhs,
        NamedSumId::Wy2Lhs,
        NamedSumId::Wy3Lhs,
        NamedSumId::Liu111aLhs,
        NamedSumId::Liu111bLhs,
        NamedSumId::Liu111cLhs,
        NamedSumId::Liu48Lhs,
        NamedSumId::Liu410Lhs,
        NamedSumId::Liu46Lhs,
        NamedSumId::Sigma,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            NamedSumId::Wy1Lhs => "wy1-lhs",
            NamedSumId::Wy2Lhs => "wy2-lhs",
            NamedSumId::Wy3Lhs => "wy3-lhs",
            NamedSumId::Liu111aLhs => "liu111a-lhs",
            NamedSumId::Liu111bLhs => "liu111b-lhs",
            NamedSumId::Liu111cLhs => "liu111c-lhs",
            NamedSumId::Liu48Lhs => "liu48-lhs",
            NamedSumId::Liu410Lhs => "liu410-lhs",
            NamedSumId::Liu46Lhs => "liu46-lhs",
            NamedSumId::Sigma => "sigma",
        }
    }

    pub fn parse(s: &str) -> Option<NamedSumId> {
        Self::ALL.iter().copied().find(|id| id.as_str() == s)
    }
}

/// Evaluate a catalog sum by direct summation, exact to `order`.
pub fn eval_named_sum(id: NamedSumId, order: &QExp) -> QSeries {
    match id {
        // sum_{n>=1} q^n (q;q^2)_n / ((-q;q^2)_n (1+q^{2n}))
        NamedSumId::Wy1Lhs => {
            let mut total = QSeries::zero(order.clone());
            let mut num = QSeries::one(order.clone());
            let mut invden = QSeries::one(order.clone());
            let mut n = 1i64;
            while qe(n) <= *order {
                num = num.mul(&one_minus(1, 2 * n - 1, order));
                invden = invden.mul(&geo(-1, 2 * n - 1, order));
                let per_n = geo(-1, 2 * n, order);
                let term = num.mul(&invden).mul(&per_n).mul_monomial(&Monomial::q_pow(n));
                total = total.add(&term.truncate(order.clone()));
                n += 1;
            }
            total
        }
        // sum_{n>=1} q^{n^2} / ((-q;q^2)_n (1+q^{2n}))
        NamedSumId::Wy2Lhs => {
            let mut total = QSeries::zero(order.clone());
            let mut invden = QSeries::one(order.clone());
            let mut n = 1i64;
            while qe(n * n) <= *order {
                invden = invden.mul(&geo(-1, 2 * n - 1, order));
                let per_n = geo(-1, 2 * n, order);
                let term = invden.mul(&per_n).mul_monomial(&Monomial::q_pow(n * n));
                total = total.add(&term.truncate(order.clone()));
                n += 1;
            }
            total
        }
        // sum_{n>=1} (-1)^{n-1} q^n (q^2;q^2)_{n-1} / (-q^2;q^2)_n
        NamedSumId::Wy3Lhs => {
            let mut total = QSeries::zero(order.clone());
            let mut num = QSeries::one(order.clone());
            let mut invden = QSeries::one(order.clone());
            let mut n = 1i64;
            while qe(n) <= *order {
                if n > 1 {
                    num = num.mul(&one_minus(1, 2 * (n - 1), order));
                }
                invden = invden.mul(&geo(-1, 2 * n, order));
                let sign = if n % 2 == 1 { qr(1) } else { qr(-1) };
                let term = num
                    .mul(&invden)
                    .mul_monomial(&Monomial::new(sign, qe(n)));
                total = total.add(&term.truncate(order.clone()));
                n += 1;
            }
            total
        }
        // sum_{n>=0} (q;q^2)_n q^n / (q^2;q^2)_n
        NamedSumId::Liu111aLhs => {
            let mut total = QSeries::zero(order.clone());
            let mut num = QSeries::one(order.clone());
            let mut invden = QSeries::one(order.clone());
            let mut n = 0i64;
            while qe(n) <= *order {
                if n > 0 {
                    num = num.mul(&one_minus(1, 2 * n - 1, order));
                    invden = invden.mul(&geo(1, 2 * n, order));
                }
                let term = num.mul(&invden).mul_monomial(&Monomial::q_pow(n));
                total = total.add(&term.truncate(order.clone()));
                n += 1;
            }
            total
        }
        // sum_{n>=0} (-1)^n q^{n^2+n} / (q^2;q^2)_n
        NamedSumId::Liu111bLhs => {
            let mut total = QSeries::zero(order.clone());
            let mut invden = QSeries::one(order.clone());
            let mut n = 0i64;
            while qe(n * n + n) <= *order {
                if n > 0 {
                    invden = invden.mul(&geo(1, 2 * n, order));
                }
                let sign = if n % 2 == 0 { qr(1) } else { qr(-1) };
                let term = invden.mul_monomial(&Monomial::new(sign, qe(n * n + n)));
                total = total.add(&term.truncate(order.clone()));
                n += 1;
            }
            total
        }
        // sum_{n>=0} (-1)^n q^{n(n+1)/2} / (q;q)_n
        NamedSumId::Liu111cLhs => {
            let mut total = QSeries::zero(order.clone());
            let mut invden = QSeries::one(order.clone());
            let mut n = 0i64;
            while qe(n * (n + 1) / 2) <= *order {
                if n > 0 {
                    invden = invden.mul(&geo(1, n, order));
                }
                let sign = if n % 2 == 0 { qr(1) } else { qr(-1) };
                let term = invden.mul_monomial(&Monomial::new(sign, qe(n * (n + 1) / 2)));
                total = total.add(&term.truncate(order.clone()));
                n += 1;
            }
            total
        }
        // sum_{n>=0} q^{n^2} (-q;q)_n^2 / (q;q)_{2n}
        NamedSumId::Liu48Lhs => {
            let mut total = QSeries::zero(order.clone());
            let mut num = QSeries::one(order.clone());
            let mut invden = QSeries::one(order.clone());
            let mut n = 0i64;
            while qe(n * n) <= *order {
                if n > 0 {
                    let f = one_minus(-1, n, order);
                    num = num.mul(&f).mul(&f);
                    invden = invden.mul(&geo(1, 2 * n - 1, order)).mul(&geo(1, 2 * n, order));
                }
                let term = num.mul(&invden).mul_monomial(&Monomial::q_pow(n * n));
                total = total.add(&term.truncate(order.clone()));
                n += 1;
            }
            total
        }
        // sum_{n>=0} q^{n^2} / (q;q^2)_n
        NamedSumId::Liu410Lhs => {
            let mut total = QSeries::zero(order.clone());
            let mut invden = QSeries::one(order.clone());
            let mut n = 0i64;
            while qe(n * n) <= *order {
                if n > 0 {
                    invden = invden.mul(&geo(1, 2 * n - 1, order));
                }
                let term = invden.mul_monomial(&Monomial::q_pow(n * n));
                total = total.add(&term.truncate(order.clone()));
                n += 1;
            }
            total
        }
        // sum_{n>=0} (-1)^n (q;q^2)_n q^{n^2+n} / (-q;q)_{2n}
        NamedSumId::Liu46Lhs => {
            let mut total = QSeries::zero(order.clone());
            let mut num = QSeries::one(order.clone());
            let mut invden = QSeries::one(order.clone());
            let mut n = 0i64;
            while qe(n * n + n) <= *order {
                if n > 0 {
                    num = num.mul(&one_minus(1, 2 * n - 1, order));
                    invden = invden.mul(&geo(-1, 2 * n - 1, order)).mul(&geo(-1, 2 * n, order));
                }
                let sign = if n % 2 == 0 { qr(1) } else { qr(-1) };
                let term = num
                    .mul(&invden)
                    .mul_monomial(&Monomial::new(sign, qe(n * n + n)));
                total = total.add(&term.truncate(order.clone()));
                n += 1;
            }
            total
        }
        NamedSumId::Sigma => crate::appell::sigma_series(order),
    }
}

/// (1 - c q^e) as a series.
fn one_minus(c: i64, e: i64, order: &QExp) -> QSeries {
    let mut s = QSeries::one(order.clone());
    s.add_term(qe(e), qr(-c));
    s
}

/// 1/(1 - c q^e) for e > 0.
fn geo(c: i64, e: i64, order: &QExp) -> QSeries {
    geometric_inv(&qr(c), &qe(e), order).expect("positive exponent")
}

// ---------------------------------------------------------------------------
// Partial (one-sided) theta sums
// ---------------------------------------------------------------------------

/// The two one-sided theta builders used by the identities.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PartialTheta {
    /// sum_{n>=1} (-1)^n q^{2n^2}
    Square,
    /// sum_{n>=1} (-1)^n q^{n(n+1)/2}
    Triangle,
}

pub fn partial_theta(kind: PartialTheta, order: &QExp) -> QSeries {
    let mut out = QSeries::zero(order.clone());
    let mut n = 1i64;
    loop {
        let e = match kind {
            PartialTheta::Square => 2 * n * n,
            PartialTheta::Triangle => n * (n + 1) / 2,
        };
        if qe(e) > *order {
            break;
        }
        out.add_term(qe(e), qr(if n % 2 == 0 { 1 } else { -1 }));
        n += 1;
    }
    out
}

// ---------------------------------------------------------------------------
// Triangular double-sums
// ---------------------------------------------------------------------------

/// Inner range of the m index.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MRange {
    /// |m| <= n
    AbsLeN,
    /// |m| <= floor(n/2)
    AbsLeHalfN,
    /// 0 <= m <= n
    ZeroToN,
}

impl MRange {
    pub fn as_str(&self) -> &'static str {
        match self {
            MRange::AbsLeN => "abs_le_n",
            MRange::AbsLeHalfN => "abs_le_half_n",
            MRange::ZeroToN => "zero_to_n",
        }
    }
}

/// The optional quadrant-completion factor (1 + eps q^{alpha m + beta n + k}).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExtraFactor {
    pub eps: i8,
    pub alpha: i64,
    pub beta: i64,
    pub k: i64,
}

/// Symbolic description of a triangular double-sum
///
/// ```text
/// sum_{n >= n_start} sum_{m in range} (-1)^{sign_n n + sign_m m}
///     q^{(A n^2 + B M + C n + D m + E)/F} (1 + eps q^{alpha m + beta n + k})
/// ```
///
/// where M is m^2, or m(m+1)/2 when `triangular_m` is set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TriangularSumSpec {
    pub range: MRange,
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
    pub e: i64,
    pub f_den: i64,
    pub triangular_m: bool,
    pub sign_n: bool,
    pub sign_m: bool,
    pub extra: Option<ExtraFactor>,
    pub n_start: i64,
}

impl TriangularSumSpec {
    /// The quadratic part of the exponent at (n, m).
    pub fn exponent(&self, n: i64, m: i64) -> QExp {
        let mm = if self.triangular_m { m * (m + 1) / 2 } else { m * m };
        qe_frac(
            self.a * n * n + self.b * mm + self.c * n + self.d * m + self.e,
            self.f_den,
        )
    }

    /// The sign (+1/-1) of the (n, m) term.
    pub fn sign(&self, n: i64, m: i64) -> QRat {
        let e = (if self.sign_n { n } else { 0 }) + (if self.sign_m { m } else { 0 });
        if e.rem_euclid(2) == 0 {
            qr(1)
        } else {
            qr(-1)
        }
    }

    fn m_range(&self, n: i64) -> std::ops::RangeInclusive<i64> {
        match self.range {
            MRange::AbsLeN => -n..=n,
            MRange::AbsLeHalfN => -(n / 2)..=(n / 2),
            MRange::ZeroToN => 0..=n,
        }
    }

    /// Parse a `key=value; ...` spec string, e.g.
    /// `range=abs_le_half_n; exp=(1,-2,0,0,0)/1; sign_m; extra=+1,0,2,1; nstart=0`.
    pub fn parse(text: &str) -> Result<TriangularSumSpec> {
        let mut spec = TriangularSumSpec {
            range: MRange::AbsLeN,
            a: 0,
            b: 0,
            c: 0,
            d: 0,
            e: 0,
            f_den: 1,
            triangular_m: false,
            sign_n: false,
            sign_m: false,
            extra: None,
            n_start: 0,
        };
        let bad = |what: &str| Error::UnsupportedShape(format!("bad spec field: {what}"));
        let mut saw_exp = false;
        for raw in text.split(';') {
            let field = raw.trim();
            if field.is_empty() {
                continue;
            }
            let (key, value) = match field.split_once('=') {
                Some((k, v)) => (k.trim(), Some(v.trim())),
                None => (field, None),
            };
            match (key, value) {
                ("range", Some(v)) => {
                    spec.range = match v {
                        "abs_le_n" => MRange::AbsLeN,
                        "abs_le_half_n" => MRange::AbsLeHalfN,
                        "zero_to_n" => MRange::ZeroToN,
                        _ => return Err(bad(field)),
                    };
                }
                ("exp", Some(v)) => {
                    // (A,B,C,D,E)[/F]
                    let (tuple, den) = match v.split_once('/') {
                        Some((t, f)) => (t, f.trim().parse::<i64>().map_err(|_| bad(field))?),
                        None => (v, 1),
                    };
                    let inner = tuple
                        .trim()
                        .strip_prefix('(')
                        .and_then(|s| s.strip_suffix(')'))
                        .ok_or_else(|| bad(field))?;
                    let nums: Vec<i64> = inner
                        .split(',')
                        .map(|s| s.trim().parse::<i64>())
                        .collect::<std::result::Result<_, _>>()
                        .map_err(|_| bad(field))?;
                    if nums.len() != 5 || den <= 0 {
                        return Err(bad(field));
                    }
                    spec.a = nums[0];
                    spec.b = nums[1];
                    spec.c = nums[2];
                    spec.d = nums[3];
                    spec.e = nums[4];
                    spec.f_den = den;
                    saw_exp = true;
                }
                ("tri_m", None) => spec.triangular_m = true,
                ("sign_n", None) => spec.sign_n = true,
                ("sign_m", None) => spec.sign_m = true,
                ("extra", Some(v)) => {
                    let nums: Vec<&str> = v.split(',').map(|s| s.trim()).collect();
                    if nums.len() != 4 {
                        return Err(bad(field));
                    }
                    let eps = match nums[0] {
                        "+1" | "1" => 1i8,
                        "-1" => -1i8,
                        _ => return Err(bad(field)),
                    };
                    let parse = |s: &str| s.parse::<i64>().map_err(|_| bad(field));
                    spec.extra = Some(ExtraFactor {
                        eps,
                        alpha: parse(nums[1])?,
                        beta: parse(nums[2])?,
                        k: parse(nums[3])?,
                    });
                }
                ("nstart", Some(v)) => {
                    spec.n_start = v.parse().map_err(|_| bad(field))?;
                }
                _ => return Err(bad(field)),
            }
        }
        if !saw_exp {
            return Err(Error::UnsupportedShape("spec needs an exp=(A,B,C,D,E)/F field".into()));
        }
        Ok(spec)
    }
}

impl fmt::Display for TriangularSumSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "range={}; exp=({},{},{},{},{})/{}",
            self.range.as_str(),
            self.a,
            self.b,
            self.c,
            self.d,
            self.e,
            self.f_den
        )?;
        if self.triangular_m {
            write!(f, "; tri_m")?;
        }
        if self.sign_n {
            write!(f, "; sign_n")?;
        }
        if self.sign_m {
            write!(f, "; sign_m")?;
        }
        if let Some(x) = &self.extra {
            write!(
                f,
                "; extra={},{},{},{}",
                if x.eps >= 0 { "+1" } else { "-1" },
                x.alpha,
                x.beta,
                x.k
            )?;
        }
        if self.n_start != 0 {
            write!(f, "; nstart={}", self.n_start)?;
        }
        Ok(())
    }
}

/// Direct double enumeration with per-n inner range; exact.
///
/// Rows are summed until their minimum exponent has stayed above the
/// truncation order for several consecutive rows; a sum whose row minima
/// never climb is rejected as non-convergent.
pub fn eval_triangular_sum(spec: &TriangularSumSpec, order: &QExp) -> Result<QSeries> {
    let mut out = QSeries::zero(order.clone());
    let mut n = spec.n_start;
    let mut rows_beyond = 0u32;
    const STREAK: u32 = 12;
    const CAP: i64 = 200_000;
    while rows_beyond < STREAK {
        if n > spec.n_start + CAP {
            return Err(Error::NonConvergent(
                "triangular sum row minima never climbed past the order".into(),
            ));
        }
        let mut row_min: Option<QExp> = None;
        for m in spec.m_range(n) {
            let e0 = spec.exponent(n, m);
            if e0.is_negative() {
                return Err(Error::NonConvergent(format!(
                    "negative term exponent {e0} at (n,m) = ({n},{m})"
                )));
            }
            let sign = spec.sign(n, m);
            row_min = Some(match row_min {
                None => e0.clone(),
                Some(cur) => cur.min(e0.clone()),
            });
            if e0 <= *order {
                out.add_term(e0.clone(), sign.clone());
            }
            if let Some(x) = &spec.extra {
                let e1 = &e0 + qe(x.alpha * m + x.beta * n + x.k);
                if e1.is_negative() {
                    return Err(Error::NonConvergent(format!(
                        "negative extra-term exponent {e1} at (n,m) = ({n},{m})"
                    )));
                }
                row_min = Some(row_min.unwrap().min(e1.clone()));
                if e1 <= *order {
                    out.add_term(e1, sign * qr(x.eps as i64));
                }
            }
        }
        match row_min {
            Some(e) if e > *order => rows_beyond += 1,
            Some(_) => rows_beyond = 0,
            // empty inner range (cannot happen: ranges always contain m=0)
            None => rows_beyond += 1,
        }
        n += 1;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{poch_inf, qe};
    use crate::theta::{j_m, j_std, theta_sum, ThetaArg};

    #[test]
    fn liu111a_equals_product() {
        // liu111a-lhs = J_2^2 / J_1 to order 30
        let order = qe(30);
        let lhs = eval_named_sum(NamedSumId::Liu111aLhs, &order);
        let j1 = j_m(1, &order);
        let j2 = j_m(2, &order);
        let rhs = j2.mul(&j2).mul(&j1.inv().unwrap());
        assert_eq!(lhs.first_mismatch(&rhs, &order), None);
    }

    #[test]
    fn liu111c_equals_j1() {
        let order = qe(30);
        let lhs = eval_named_sum(NamedSumId::Liu111cLhs, &order);
        let rhs = j_m(1, &order);
        assert_eq!(lhs.first_mismatch(&rhs, &order), None);
    }

    #[test]
    fn liu410_is_psi() {
        let order = qe(40);
        let lhs = eval_named_sum(NamedSumId::Liu410Lhs, &order);
        for (e, c) in [(0, 1), (1, 1), (2, 1), (3, 1), (4, 2), (5, 2)] {
            assert_eq!(lhs.coeff_int(e), qr(c), "q^{e}");
        }
        let psi = crate::appell::mock_psi(&order);
        assert_eq!(lhs.first_mismatch(&psi, &order), None);
    }

    #[test]
    fn wy2_equals_wy3() {
        let order = qe(40);
        let a = eval_named_sum(NamedSumId::Wy2Lhs, &order);
        let b = eval_named_sum(NamedSumId::Wy3Lhs, &order);
        assert_eq!(a.first_mismatch(&b, &order), None);
    }

    #[test]
    fn partial_theta_prefixes() {
        let sq = partial_theta(PartialTheta::Square, &qe(20));
        for (e, c) in [(2, -1), (8, 1), (18, -1)] {
            assert_eq!(sq.coeff_int(e), qr(c), "q^{e}");
        }
        assert_eq!(sq.term_count(), 3);

        let tr = partial_theta(PartialTheta::Triangle, &qe(10));
        for (e, c) in [(1, -1), (3, 1), (6, -1), (10, 1)] {
            assert_eq!(tr.coeff_int(e), qr(c), "q^{e}");
        }
    }

    #[test]
    fn corrected_last_identity() {
        // j(q^2;q^4) - 2 sum_{n>=1} (-1)^n q^{2n^2} = 1 to order 60
        let order = qe(60);
        let j = theta_sum(&ThetaArg::new(Monomial::q_pow(2), Nome::q_pow(4)), &order);
        let pt = partial_theta(PartialTheta::Square, &order);
        let diff = j.sub(&pt.scale(&qr(2)));
        let one = QSeries::one(order.clone());
        assert_eq!(diff.first_mismatch(&one, &order), None);
    }

    #[test]
    fn wyth1_double_sum_relation() {
        // sum_{n>=1, |m|<=n} (-1)^m q^{n^2+m^2} = wy1-lhs + sum (-1)^n q^{2n^2}
        let order = qe(40);
        let spec = TriangularSumSpec::parse("range=abs_le_n; exp=(1,1,0,0,0)/1; sign_m; nstart=1")
            .unwrap();
        let lhs = eval_triangular_sum(&spec, &order).unwrap();
        let rhs = eval_named_sum(NamedSumId::Wy1Lhs, &order)
            .add(&partial_theta(PartialTheta::Square, &order));
        assert_eq!(lhs.first_mismatch(&rhs, &order), None);
    }

    #[test]
    fn th12_spec_equals_theta() {
        // sum_{n>=0, |m|<=n} (-1)^m q^{m^2+n^2}(1-q^{2n+1}) = j(q^2;q^4)
        let order = qe(60);
        let spec =
            TriangularSumSpec::parse("range=abs_le_n; exp=(1,1,0,0,0)/1; sign_m; extra=-1,0,2,1")
                .unwrap();
        let lhs = eval_triangular_sum(&spec, &order).unwrap();
        let rhs = theta_sum(&ThetaArg::new(Monomial::q_pow(2), Nome::q_pow(4)), &order);
        assert_eq!(lhs.first_mismatch(&rhs, &order), None);
    }

    #[test]
    fn n0_only_term() {
        // at order 0 only the (0,0) term of q^{n^2+m^2} contributes
        let spec = TriangularSumSpec::parse("range=abs_le_n; exp=(1,1,0,0,0)/1; sign_m").unwrap();
        let s = eval_triangular_sum(&spec, &qe(0)).unwrap();
        assert_eq!(s.term_count(), 1);
        assert_eq!(s.coeff_int(0), qr(1));
    }

    #[test]
    fn liu48_display_identity() {
        // liu48-lhs = (1/(q;q)_inf) sum (1-q^{6n+6}) q^{2n^2+n-m(m+1)/2}, 0<=m<=n
        let order = qe(40);
        let lhs = eval_named_sum(NamedSumId::Liu48Lhs, &order);
        let spec = TriangularSumSpec::parse(
            "range=zero_to_n; exp=(2,-1,1,0,0)/1; tri_m; extra=-1,0,6,6",
        )
        .unwrap();
        let tri = eval_triangular_sum(&spec, &order).unwrap();
        let inv_j1 = poch_inf(&Monomial::q(), &Nome::q(), &order).inv().unwrap();
        let rhs = tri.mul(&inv_j1);
        assert_eq!(lhs.first_mismatch(&rhs, &order), None);
    }

    #[test]
    fn liu46_corrected_range_identity() {
        // with the |m| <= n reading, liu46-lhs equals its double sum
        let order = qe(40);
        let lhs = eval_named_sum(NamedSumId::Liu46Lhs, &order);
        let spec = TriangularSumSpec::parse(
            "range=abs_le_n; exp=(3,-1,1,0,0)/1; sign_n; sign_m; extra=-1,0,4,2",
        )
        .unwrap();
        let tri = eval_triangular_sum(&spec, &order).unwrap();
        assert_eq!(lhs.first_mismatch(&tri, &order), None);
    }

    #[test]
    fn liu111b_display_identity() {
        // liu111b-lhs = (1/(q;q)_inf) sum (-1)^m (1-q^{2n+1}) q^{2n^2+n-m^2}
        let order = qe(40);
        let lhs = eval_named_sum(NamedSumId::Liu111bLhs, &order);
        let spec = TriangularSumSpec::parse(
            "range=abs_le_n; exp=(2,-1,1,0,0)/1; sign_m; extra=-1,0,2,1",
        )
        .unwrap();
        let tri = eval_triangular_sum(&spec, &order).unwrap();
        let inv_j1 = poch_inf(&Monomial::q(), &Nome::q(), &order).inv().unwrap();
        let rhs = tri.mul(&inv_j1);
        assert_eq!(lhs.first_mismatch(&rhs, &order), None);
    }

    #[test]
    fn liu111a_display_identity() {
        // liu111a-lhs = ((q;q^2)_inf/(q^2;q^2)_inf) sum (-1)^{n+m} q^{n^2+n-m^2}
        let order = qe(40);
        let lhs = eval_named_sum(NamedSumId::Liu111aLhs, &order);
        let spec =
            TriangularSumSpec::parse("range=abs_le_n; exp=(1,-1,1,0,0)/1; sign_n; sign_m").unwrap();
        let tri = eval_triangular_sum(&spec, &order).unwrap();
        let num = poch_inf(&Monomial::q(), &Nome::q_pow(2), &order);
        let den = poch_inf(&Monomial::q_pow(2), &Nome::q_pow(2), &order);
        let rhs = tri.mul(&num).mul(&den.inv().unwrap());
        assert_eq!(lhs.first_mismatch(&rhs, &order), None);
    }

    #[test]
    fn wy_new_th2_g_form() {
        // wy2-lhs = (q g(1,3,1;q^6,q^6;q^4) + g(q^2..) + q^4 g(q^10..) + q^9 g(q^14..) - 1)/2.
        // The printed display has "+1", which misses the n=0 term: the
        // theorem's sums start at n=1 while the g-combination covers n>=0.
        use crate::hecke::{eval_g, HeckeCall};
        let order = qe(40);
        let lhs = eval_named_sum(NamedSumId::Wy2Lhs, &order);
        let g = |xe: i64, pre: i64| {
            let call = HeckeCall::type_ii(
                1,
                3,
                1,
                Monomial::q_pow(xe),
                Monomial::q_pow(xe),
                Nome::q_pow(4),
            )
            .unwrap();
            eval_g(&call, &(&order - &qe(pre)))
                .unwrap()
                .mul_monomial(&Monomial::q_pow(pre))
                .truncate(order.clone())
        };
        let sum = g(6, 1)
            .add(&g(2, 0))
            .add(&g(10, 4))
            .add(&g(14, 9))
            .sub(&QSeries::one(order.clone()));
        let rhs = sum.scale(&crate::series::qr_frac(1, 2));
        assert_eq!(lhs.first_mismatch(&rhs, &order), None);
        // the printed "+1" reading fails at exponent 0
        let printed = sum.add(&QSeries::constant(qr(2), order.clone())).scale(&crate::series::qr_frac(1, 2));
        assert_eq!(
            lhs.first_mismatch(&printed, &order).map(|(e, _, _)| e),
            Some(qe(0))
        );
    }

    #[test]
    fn spec_string_roundtrip() {
        let texts = [
            "range=abs_le_n; exp=(1,1,0,0,0)/1; sign_m; extra=+1,0,2,1",
            "range=abs_le_half_n; exp=(1,-2,0,0,0)/1; sign_m; extra=-1,0,2,1; nstart=1",
            "range=zero_to_n; exp=(2,-1,1,0,0)/1; tri_m; sign_n; extra=-1,0,6,6",
            "range=abs_le_n; exp=(3,1,0,0,0)/2; sign_n",
        ];
        for t in texts {
            let spec = TriangularSumSpec::parse(t).unwrap();
            let printed = spec.to_string();
            let reparsed = TriangularSumSpec::parse(&printed).unwrap();
            assert_eq!(spec, reparsed, "roundtrip failed for {t}");
        }
        assert!(TriangularSumSpec::parse("range=bogus; exp=(1,1,0,0,0)/1").is_err());
        assert!(TriangularSumSpec::parse("sign_m").is_err());
    }

    #[test]
    fn negative_exponent_rejected() {
        let spec = TriangularSumSpec::parse("range=abs_le_n; exp=(1,-2,0,0,0)/1").unwrap();
        assert!(matches!(
            eval_triangular_sum(&spec, &qe(10)),
            Err(Error::NonConvergent(_))
        ));
    }

    #[test]
    fn wy_new_th1_sum_equals_half_g_form() {
        // wy1-lhs = (g(1,0,1;q^2,q^2;q^4) + q g(1,0,1;q^4,q^4;q^4) - 1)/2,
        // with the constant corrected from the printed "+1" as above.
        use crate::hecke::{eval_g, HeckeCall};
        let order = qe(40);
        let lhs = eval_named_sum(NamedSumId::Wy1Lhs, &order);
        let g1 = eval_g(
            &HeckeCall::type_ii(1, 0, 1, Monomial::q_pow(2), Monomial::q_pow(2), Nome::q_pow(4))
                .unwrap(),
            &order,
        )
        .unwrap();
        let g2 = eval_g(
            &HeckeCall::type_ii(1, 0, 1, Monomial::q_pow(4), Monomial::q_pow(4), Nome::q_pow(4))
                .unwrap(),
            &qe(39),
        )
        .unwrap();
        let rhs = g1
            .add(&g2.mul_monomial(&Monomial::q()).truncate(order.clone()))
            .sub(&QSeries::one(order.clone()))
            .scale(&crate::series::qr_frac(1, 2));
        assert_eq!(lhs.first_mismatch(&rhs, &order), None);
        let _ = j_std(1, 2, &qe(4));
    }
}
