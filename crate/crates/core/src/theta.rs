//! Theta functions j(x; q) and their identities.
//!
//! Every theta value is computable by two independent routes:
//!
//! - [`theta_sum`]: the bilateral series sum_n (-1)^n q^{binom(n,2)} x^n
//! - [`theta_prod`]: the triple product (x)_inf (q/x)_inf (q)_inf
//!
//! Agreement of the two routes is the Jacobi triple product identity and the
//! strongest single cross-check of the engine. The shorthands J_{a,m},
//! Jbar_{a,m}, and J_m are provided, along with the m-term theta splitting
//! and the small stock of theta identities used in proofs.

use crate::error::{Error, Result};
use crate::series::{
    binom2, ceil_i64, floor_i64, qe, qr, rat_pow, Monomial, Nome, QExp, QRat, QSeries,
};
use num::{One, Signed, Zero};

/// Argument pair of a theta function j(x; nome).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThetaArg {
    pub x: Monomial,
    pub nome: Nome,
}

impl ThetaArg {
    pub fn new(x: Monomial, nome: Nome) -> Self {
        assert!(!x.is_zero(), "theta argument x must be nonzero");
        ThetaArg { x, nome }
    }

    /// True iff x = nome^k for some integer k (exactly, as monomials), in
    /// which case j(x; nome) = 0 by the triple product.
    pub fn is_degenerate(&self) -> bool {
        let ratio = &self.x.exp / self.nome.exp();
        if !ratio.is_integer() {
            return false;
        }
        let k = floor_i64(&ratio);
        self.nome.pow(k).coeff == self.x.coeff
    }
}

/// Exponent of the n-th bilateral term: t*binom(n,2) + exp(x)*n.
fn term_exp(arg: &ThetaArg, n: i64) -> QExp {
    self_term_exp(arg.nome.exp(), &arg.x.exp, n)
}

fn self_term_exp(t: &QExp, alpha: &QExp, n: i64) -> QExp {
    t * qe(binom2(n)) + alpha * qe(n)
}

/// The exact minimum of the bilateral term exponent over all integers n.
pub fn theta_min_exp(arg: &ThetaArg) -> QExp {
    let t = arg.nome.exp();
    let alpha = &arg.x.exp;
    // vertex of (t/2) n^2 + (alpha - t/2) n at n = 1/2 - alpha/t
    let vertex = qe(1) / qe(2) - alpha / t;
    let lo = floor_i64(&vertex);
    let hi = lo + 1;
    term_exp(arg, lo).min(term_exp(arg, hi))
}

/// j(x; q) by the bilateral sum, exact to `order`.
pub fn theta_sum(arg: &ThetaArg, order: &QExp) -> QSeries {
    let t = arg.nome.exp();
    let alpha = &arg.x.exp;
    let vertex = qe(1) / qe(2) - alpha / t;
    let start = floor_i64(&vertex);
    let mut out = QSeries::zero(order.clone());
    let c_t = arg.nome.coeff();
    let c_x = &arg.x.coeff;
    let mut push = |n: i64, out: &mut QSeries| -> bool {
        let e = term_exp(arg, n);
        if e > *order {
            return false;
        }
        let sign = if n % 2 == 0 { qr(1) } else { qr(-1) };
        let coeff = sign * rat_pow(c_x, n) * rat_pow(c_t, binom2(n));
        out.add_term(e, coeff);
        true
    };
    let mut n = start;
    while push(n, &mut out) {
        n -= 1;
    }
    let mut n = start + 1;
    while push(n, &mut out) {
        n += 1;
    }
    out
}

/// j(x; q) by the triple product (x)_inf (q/x)_inf (q)_inf, exact to `order`.
///
/// Arguments with exponent outside (0, t] are first normalized with the
/// elliptic shift j(qx; q) = -x^{-1} j(x; q) so the Pochhammer arguments
/// stay well-behaved.
pub fn theta_prod(arg: &ThetaArg, order: &QExp) -> QSeries {
    let nome = &arg.nome;
    let t = nome.exp().clone();
    let mut x = arg.x.clone();
    let mut pref = Monomial::one();
    // shift down: j(p*y; p) = -y^{-1} j(y; p)
    while x.exp > t {
        let y = x.mul(&nome.pow(-1));
        pref = pref.mul(&y.inv().neg());
        x = y;
    }
    // shift up: j(x; p) = -x * j(p*x; p)
    while !x.exp.is_positive() {
        pref = pref.mul(&x.neg());
        x = x.mul(nome.monomial());
    }
    let inner_order = order - &pref.exp;
    let a = crate::series::poch_inf(&x, nome, &inner_order);
    let qx = nome.monomial().mul(&x.inv());
    let b = crate::series::poch_inf(&qx, nome, &inner_order);
    let c = crate::series::poch_inf(nome.monomial(), nome, &inner_order);
    a.mul(&b).mul(&c).mul_monomial(&pref).truncate(order.clone())
}

/// J_{a,m} = j(q^a; q^m).
pub fn j_std(a: i64, m: i64, order: &QExp) -> QSeries {
    theta_sum(&ThetaArg::new(Monomial::q_pow(a), Nome::q_pow(m)), order)
}

/// Jbar_{a,m} = j(-q^a; q^m).
pub fn j_bar(a: i64, m: i64, order: &QExp) -> QSeries {
    theta_sum(&ThetaArg::new(Monomial::term(-1, a), Nome::q_pow(m)), order)
}

/// J_m = (q^m; q^m)_inf.
pub fn j_m(m: i64, order: &QExp) -> QSeries {
    assert!(m > 0);
    crate::series::poch_inf(&Monomial::q_pow(m), &Nome::q_pow(m), order)
}

/// Inverse of j(x; nome), with the working order inflated so the result is
/// exact to at least `order`. Errors if the theta vanishes identically.
pub fn theta_inv(arg: &ThetaArg, order: &QExp) -> Result<QSeries> {
    let m = theta_min_exp(arg);
    let work = if m.is_positive() { order + &m + &m } else { order.clone() };
    let th = theta_sum(arg, &work);
    if th.is_zero() {
        return Err(Error::DegenerateDenominator(format!(
            "j({}; {}) = 0",
            arg.x, arg.nome
        )));
    }
    th.inv()
}

/// The m-term splitting
/// j(z;q) = sum_{k=0}^{m-1} (-1)^k q^{binom(k,2)} z^k
///          j((-1)^{m+1} q^{binom(m,2)+mk} z^m; q^{m^2}).
///
/// Returns the list of (prefactor, inner theta argument); summing
/// prefactor * theta over the entries reproduces j(z;q).
pub fn theta_split(arg: &ThetaArg, m: i64) -> Vec<(Monomial, ThetaArg)> {
    assert!(m >= 1);
    let nome = &arg.nome;
    let z = &arg.x;
    let inner_nome = nome.pow_nome(m * m);
    let sign = if (m + 1) % 2 == 0 { qr(1) } else { qr(-1) };
    (0..m)
        .map(|k| {
            let pk = nome.pow(binom2(k));
            let zk = z.pow(k);
            let ksign = if k % 2 == 0 { qr(1) } else { qr(-1) };
            let pref = Monomial::new(ksign, QExp::zero()).mul(&pk).mul(&zk);
            let inner_x = Monomial::new(sign.clone(), QExp::zero())
                .mul(&nome.pow(binom2(m) + m * k))
                .mul(&z.pow(m));
            (pref, ThetaArg::new(inner_x, inner_nome.clone()))
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Theta identity checks
// ---------------------------------------------------------------------------

pub use crate::series::Comparison;

/// Verify the four stock theta identities at several monomial
/// specializations of x (mixed signs, fractional exponents), reporting
/// exact coefficient agreement to `order`.
pub fn check_theta_identities(order: &QExp) -> Vec<Comparison> {
    let specs: Vec<(Monomial, Nome)> = vec![
        (Monomial::q_pow(3), Nome::q_pow(4)),
        (Monomial::term(-1, 1), Nome::q_pow(3)),
        (Monomial::new(qr(1), crate::series::qe_frac(1, 2)), Nome::neg_q()),
        (Monomial::new(qr(-1), crate::series::qe_frac(3, 2)), Nome::q_pow(2)),
        (Monomial::q_pow(2), Nome::q_pow(5)),
        (Monomial::new(qr(-1), crate::series::qe_frac(5, 2)), Nome::q_pow(3)),
    ];
    let mut out = Vec::new();
    for (x, nome) in &specs {
        let tag = format!("x={x}, nome={nome}");
        // (A) j(x;q) = j(q/x;q)
        let lhs = theta_sum(&ThetaArg::new(x.clone(), nome.clone()), order);
        let qx = nome.monomial().mul(&x.inv());
        let rhs = theta_sum(&ThetaArg::new(qx, nome.clone()), order);
        out.push(Comparison::of(format!("jIdentityA [{tag}]"), &lhs, &rhs, order));

        // (B) j(qx;q) = -x^{-1} j(x;q)
        let lhs = theta_sum(&ThetaArg::new(nome.monomial().mul(x), nome.clone()), order);
        let base_order = order + x.exp.abs();
        let base = theta_sum(&ThetaArg::new(x.clone(), nome.clone()), &base_order);
        let rhs = base.mul_monomial(&x.inv().neg()).truncate(order.clone());
        out.push(Comparison::of(format!("jIdentityB [{tag}]"), &lhs, &rhs, order));

        // (C) j(x^2;q^2) = j(x;q) j(-x;q) J_2 / J_1^2   (J's in the nome)
        let lhs = theta_sum(&ThetaArg::new(x.pow(2), nome.pow_nome(2)), order);
        let j1 = crate::series::poch_inf(nome.monomial(), nome, order);
        let j2 = crate::series::poch_inf(&nome.pow(2), &nome.pow_nome(2), order);
        let jx = theta_sum(&ThetaArg::new(x.clone(), nome.clone()), order);
        let jnx = theta_sum(&ThetaArg::new(x.neg(), nome.clone()), order);
        let rhs = jx
            .mul(&jnx)
            .mul(&j2)
            .mul(&j1.mul(&j1).inv().expect("J_1 is a unit"));
        let cmp_order = lhs.common_order(&rhs).min(order.clone());
        out.push(Comparison::of(format!("jx2Identity [{tag}]"), &lhs, &rhs, &cmp_order));

        // (D) j(x;q) = j(x;q^2) j(qx;q^2) J_1 / J_2^2
        let lhs = theta_sum(&ThetaArg::new(x.clone(), nome.clone()), order);
        let n2 = nome.pow_nome(2);
        let a = theta_sum(&ThetaArg::new(x.clone(), n2.clone()), order);
        let b = theta_sum(&ThetaArg::new(nome.monomial().mul(x), n2.clone()), order);
        let rhs = a
            .mul(&b)
            .mul(&j1)
            .mul(&j2.mul(&j2).inv().expect("J_2 is a unit"));
        let cmp_order = lhs.common_order(&rhs).min(order.clone());
        out.push(Comparison::of(format!("jxToProduct [{tag}]"), &lhs, &rhs, &cmp_order));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::qe_frac;
    use std::collections::BTreeMap;

    /// Independent oracle: enumerate the bilateral sum over n in [-w, w]
    /// with plain rational arithmetic.
    fn oracle_theta(x: &Monomial, nome: &Nome, w: i64, order: i64) -> BTreeMap<QExp, QRat> {
        let mut map: BTreeMap<QExp, QRat> = BTreeMap::new();
        for n in -w..=w {
            let e = nome.exp() * qe(binom2(n)) + &x.exp * qe(n);
            if e > qe(order) {
                continue;
            }
            let sign = if n % 2 == 0 { qr(1) } else { qr(-1) };
            let c = sign * rat_pow(&x.coeff, n) * rat_pow(nome.coeff(), binom2(n));
            let entry = map.entry(e).or_insert_with(QRat::zero);
            *entry += c;
        }
        map.retain(|_, c| !c.is_zero());
        map
    }

    fn assert_matches_oracle(s: &QSeries, oracle: &BTreeMap<QExp, QRat>, order: i64) {
        for (e, c) in oracle {
            if *e <= qe(order) {
                assert_eq!(s.coeff(e), c.clone(), "coeff q^{e}");
            }
        }
        for (e, c) in s.terms() {
            assert_eq!(
                oracle.get(e).cloned().unwrap_or_else(QRat::zero),
                c.clone(),
                "extra coeff q^{e}"
            );
        }
    }

    #[test]
    fn theta_sum_degenerate_is_zero() {
        let s = theta_sum(&ThetaArg::new(Monomial::q(), Nome::q()), &qe(20));
        assert!(s.is_zero());
        assert!(ThetaArg::new(Monomial::q(), Nome::q()).is_degenerate());
        assert!(!ThetaArg::new(Monomial::term(-1, 1), Nome::q()).is_degenerate());
    }

    #[test]
    fn theta_sum_j_minus_one() {
        // j(-1;q) = 2 + 2q + 2q^3 + 2q^6 + ... (triangular-number pairing)
        let arg = ThetaArg::new(Monomial::term(-1, 0), Nome::q());
        let s = theta_sum(&arg, &qe(15));
        let oracle = oracle_theta(&arg.x, &arg.nome, 8, 15);
        assert_matches_oracle(&s, &oracle, 15);
        for (e, c) in [(0, 2), (1, 2), (3, 2), (6, 2), (10, 2), (15, 2)] {
            assert_eq!(s.coeff_int(e), qr(c), "q^{e}");
        }
        assert_eq!(s.coeff_int(2), qr(0));
    }

    #[test]
    fn theta_sum_j_q2_q4() {
        let arg = ThetaArg::new(Monomial::q_pow(2), Nome::q_pow(4));
        let s = theta_sum(&arg, &qe(20));
        let oracle = oracle_theta(&arg.x, &arg.nome, 5, 20);
        assert_matches_oracle(&s, &oracle, 20);
        for (e, c) in [(0, 1), (2, -2), (8, 2), (18, -2)] {
            assert_eq!(s.coeff_int(e), qr(c), "q^{e}");
        }
    }

    #[test]
    fn theta_prod_matches_sum() {
        let order = qe(25);
        let cases = vec![
            ThetaArg::new(Monomial::q(), Nome::q_pow(2)),
            ThetaArg::new(Monomial::q(), Nome::q()),
            ThetaArg::new(Monomial::term(-1, 1), Nome::q()),
            ThetaArg::new(Monomial::q_pow(7), Nome::q_pow(2)),
            ThetaArg::new(Monomial::new(qr(1), qe(-2)), Nome::q_pow(3)),
            ThetaArg::new(Monomial::new(qr(1), qe_frac(1, 2)), Nome::neg_q()),
            ThetaArg::new(Monomial::term(-1, 0), Nome::q_pow(4)),
        ];
        for arg in cases {
            let s = theta_sum(&arg, &order);
            let p = theta_prod(&arg, &order);
            assert_eq!(
                s.first_mismatch(&p, &order),
                None,
                "sum/prod disagree at x={}, nome={}",
                arg.x,
                arg.nome
            );
        }
    }

    #[test]
    fn theta_prod_j_q_q2_prefix() {
        // j(q;q^2) = 1 - 2q + 2q^4 - 2q^9 + ...
        let arg = ThetaArg::new(Monomial::q(), Nome::q_pow(2));
        let p = theta_prod(&arg, &qe(10));
        for (e, c) in [(0, 1), (1, -2), (4, 2), (9, -2)] {
            assert_eq!(p.coeff_int(e), qr(c), "q^{e}");
        }
        assert_eq!(p.coeff_int(2), qr(0));
        assert_eq!(p.coeff_int(3), qr(0));
    }

    #[test]
    fn theta_prod_j_neg_q_q_prefix() {
        // j(-q;q) = sum_n q^{n(n+1)/2} over Z = 2 + 2q + 2q^3 + 2q^6 + ...
        let arg = ThetaArg::new(Monomial::term(-1, 1), Nome::q());
        let p = theta_prod(&arg, &qe(7));
        for (e, c) in [(0, 2), (1, 2), (2, 0), (3, 2), (4, 0), (5, 0), (6, 2)] {
            assert_eq!(p.coeff_int(e), qr(c), "q^{e}");
        }
    }

    #[test]
    fn j_shorthand_identities() {
        let order = qe(30);
        // J_{1,2} = J_1^2 / J_2
        let lhs = j_std(1, 2, &order);
        let j1 = j_m(1, &order);
        let j2 = j_m(2, &order);
        let rhs = j1.mul(&j1).mul(&j2.inv().unwrap());
        assert_eq!(lhs.first_mismatch(&rhs, &order), None);

        // Jbar_{1,4} = J_2^2 / J_1
        let lhs = j_bar(1, 4, &order);
        let rhs = j2.mul(&j2).mul(&j1.inv().unwrap());
        assert_eq!(lhs.first_mismatch(&rhs, &order), None);

        // J_1 to order 12 is the pentagonal series
        let p = j_m(1, &qe(12));
        for (e, c) in [(0, 1), (1, -1), (2, -1), (5, 1), (7, 1), (12, -1)] {
            assert_eq!(p.coeff_int(e), qr(c), "q^{e}");
        }
    }

    #[test]
    fn j_m_equals_theta_route() {
        // J_m = J_{m,3m} as theta: j(q^m; q^3m)
        let order = qe(24);
        for m in [1i64, 2, 3] {
            let prod = j_m(m, &order);
            let sum = j_std(m, 3 * m, &order);
            assert_eq!(prod.first_mismatch(&sum, &order), None, "m={m}");
        }
    }

    #[test]
    fn theta_split_examples() {
        let order = qe(40);
        // m=2 at z=q^3, nome q: j(z;q) = j(-q z^2;q^4) - z j(-q^3 z^2;q^4)
        let arg = ThetaArg::new(Monomial::q_pow(3), Nome::q());
        let parts = theta_split(&arg, 2);
        assert_eq!(parts.len(), 2);
        let mut total = QSeries::zero(order.clone());
        for (pref, inner) in &parts {
            total = total.add(&theta_sum(inner, &(&order - &pref.exp)).mul_monomial(pref).truncate(order.clone()));
        }
        let direct = theta_sum(&arg, &order);
        assert_eq!(total.first_mismatch(&direct, &order), None);
        // the two inner arguments are -q^7 and -q^9 at nome q^4
        assert_eq!(parts[0].1.x, Monomial::term(-1, 7));
        assert_eq!(parts[1].1.x, Monomial::term(-1, 9));

        // m=1 is the identity split
        let parts1 = theta_split(&arg, 1);
        assert_eq!(parts1.len(), 1);
        assert!(parts1[0].0.is_one());
        assert_eq!(parts1[0].1, arg);

        // m=3 at z=-q^2, nome q^2
        let arg3 = ThetaArg::new(Monomial::term(-1, 2), Nome::q_pow(2));
        let parts3 = theta_split(&arg3, 3);
        let mut total3 = QSeries::zero(order.clone());
        for (pref, inner) in &parts3 {
            total3 = total3
                .add(&theta_sum(inner, &(&order - &pref.exp)).mul_monomial(pref).truncate(order.clone()));
        }
        let direct3 = theta_sum(&arg3, &order);
        assert_eq!(total3.first_mismatch(&direct3, &order), None);
    }

    #[test]
    fn theta_split_reconstruction_m_1_to_4() {
        let order = qe(30);
        let args = [
            ThetaArg::new(Monomial::q_pow(3), Nome::q_pow(2)),
            ThetaArg::new(Monomial::term(-1, 1), Nome::q_pow(3)),
            ThetaArg::new(Monomial::new(qr(1), qe(-1)), Nome::q_pow(4)),
        ];
        for arg in &args {
            for m in 1..=4 {
                let mut total = QSeries::zero(order.clone());
                for (pref, inner) in theta_split(arg, m) {
                    total = total.add(
                        &theta_sum(&inner, &(&order - &pref.exp))
                            .mul_monomial(&pref)
                            .truncate(order.clone()),
                    );
                }
                let direct = theta_sum(arg, &order);
                assert_eq!(
                    total.first_mismatch(&direct, &order),
                    None,
                    "split failed at m={m}, x={}, nome={}",
                    arg.x,
                    arg.nome
                );
            }
        }
    }

    #[test]
    fn degenerate_powers_of_nome() {
        for k in 0..=4 {
            let arg = ThetaArg::new(Monomial::q_pow(k), Nome::q());
            assert!(arg.is_degenerate(), "k={k}");
            assert!(theta_sum(&arg, &qe(25)).is_zero(), "k={k}");
        }
    }

    #[test]
    fn stock_identities_hold_to_40() {
        for cmp in check_theta_identities(&qe(40)) {
            assert!(cmp.pass(), "{} failed at {:?}", cmp.name, cmp.mismatch);
        }
    }

    #[test]
    fn theta_inv_degenerate_errors() {
        let arg = ThetaArg::new(Monomial::q_pow(4), Nome::q_pow(4));
        assert!(theta_inv(&arg, &qe(10)).is_err());
        let ok = theta_inv(&ThetaArg::new(Monomial::term(-1, 0), Nome::q_pow(3)), &qe(10));
        assert!(ok.is_ok());
    }
}
