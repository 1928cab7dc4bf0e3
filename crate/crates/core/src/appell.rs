//! Appell-Lerch sums and the mock theta function builders.
//!
//! The Appell-Lerch sum is
//!
//! ```text
//! m(x,z;q) = (1/j(z;q)) sum_{r in Z} (-1)^r q^{binom(r,2)} z^r / (1 - q^{r-1} x z).
//! ```
//!
//! Each bilateral term's denominator is a binomial 1 - w with w a monomial;
//! it is expanded as an exact geometric series (in positive powers of q,
//! after factoring out the monomial when its exponent is negative). Terms
//! are summed until their lowest exponent exceeds the truncation order.
//!
//! On top of m sit the f_{1,2,1} and f_{1,3,1} expansion formulas, the
//! G_{a,b,c} / theta_{a,b,c} machinery for indefinite double-sums with
//! D = b^2 - ac > 0, and the builders for psi, mu, phi, sigma and Theta_2.

use crate::error::{Error, Result};
use crate::hecke::HeckeParams;
use crate::series::{
    binom2, binom2_rat, ceil_i64, eval_to_order, floor_i64, qe, qr, qr_frac, rat_pow, Monomial,
    Nome, QExp, QRat, QSeries,
};
use crate::theta::{theta_inv, theta_min_exp, theta_sum, ThetaArg};
use num::{One, Signed, Zero};

/// Argument triple of m(x, z; nome).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AppellCall {
    pub x: Monomial,
    pub z: Monomial,
    pub nome: Nome,
}

impl AppellCall {
    pub fn new(x: Monomial, z: Monomial, nome: Nome) -> Self {
        assert!(!x.is_zero() && !z.is_zero());
        AppellCall { x, z, nome }
    }

    /// The denominator monomial w_r = nome^{r-1} x z of the r-th term.
    fn w(&self, r: i64) -> Monomial {
        self.nome.pow(r - 1).mul(&self.x).mul(&self.z)
    }

    /// Lowest exponent contributed by the r-th bilateral term.
    fn term_min_exp(&self, r: i64) -> QExp {
        let base = self.nome.exp() * qe(binom2(r)) + &self.z.exp * qe(r);
        let ew = self.w(r).exp;
        if ew.is_negative() {
            base - ew
        } else {
            base
        }
    }
}

use crate::series::geometric_inv;

/// Evaluate m(x, z; nome) exactly to `order`.
pub fn eval_m(call: &AppellCall, order: &QExp) -> Result<QSeries> {
    let z_arg = ThetaArg::new(call.z.clone(), call.nome.clone());
    if z_arg.is_degenerate() {
        return Err(Error::DegenerateZ);
    }

    // Safe lower bound for the bilateral sum's lowest exponent, from the
    // two quadratic branches of term_min_exp.
    let t = call.nome.exp();
    let gamma = &call.z.exp;
    let v1 = qe(1) / qe(2) - gamma / t;
    let v2 = &v1 + qe(1);
    let mut m_bs_lb = call.term_min_exp(floor_i64(&v1));
    for r in [ceil_i64(&v1), floor_i64(&v2), ceil_i64(&v2)] {
        m_bs_lb = m_bs_lb.min(call.term_min_exp(r));
    }

    let mj = theta_min_exp(&z_arg);
    let w_bs = order + &mj.abs();
    let w_inv = order + &m_bs_lb.abs();
    let inv_j = theta_inv(&z_arg, &w_inv)?;

    let mut bilateral = QSeries::zero(w_bs.clone());
    let mut add_term = |r: i64| -> Result<bool> {
        if call.term_min_exp(r) > w_bs {
            return Ok(false);
        }
        let w = call.w(r);
        if w.exp.is_zero() && w.coeff.is_one() {
            return Err(Error::PoleAtTerm(r));
        }
        let sign = if r % 2 == 0 { qr(1) } else { qr(-1) };
        let num = Monomial::new(
            sign * rat_pow(call.nome.coeff(), binom2(r)) * rat_pow(&call.z.coeff, r),
            call.nome.exp() * qe(binom2(r)) + &call.z.exp * qe(r),
        );
        let geo = geometric_inv(&w.coeff, &w.exp, &(&w_bs - &num.exp))?;
        bilateral = bilateral.add(&geo.mul_monomial(&num).truncate(w_bs.clone()));
        Ok(true)
    };

    // enumerate downward from floor(v1), upward from floor(v1)+1; beyond the
    // branch vertices the term minimum is monotone, so the first failure in
    // the monotone region stops that direction.
    let lo_stop = floor_i64(&v1);
    let hi_stop = ceil_i64(&v2);
    let mut r = floor_i64(&v1);
    loop {
        let contributed = add_term(r)?;
        if !contributed && r <= lo_stop {
            break;
        }
        r -= 1;
    }
    let mut r = floor_i64(&v1) + 1;
    loop {
        let contributed = add_term(r)?;
        if !contributed && r >= hi_stop {
            break;
        }
        r += 1;
    }

    let prod = bilateral.mul(&inv_j);
    if *prod.order() < *order {
        return Err(Error::NonConvergent(
            "appell sum lost too much truncation order".into(),
        ));
    }
    Ok(prod.truncate(order.clone()))
}

// ---------------------------------------------------------------------------
// The f_{1,2,1} and f_{1,3,1} expansions
// ---------------------------------------------------------------------------

/// Right-hand side of the expansion
/// f_{1,2,1}(x,y;q) = j(y;q) m(q^2 x/y^2, y/x; q^3)
///                  + j(x;q) m(q^2 y/x^2, x/y; q^3).
pub fn f121_rhs(x: &Monomial, y: &Monomial, nome: &Nome, order: &QExp) -> Result<QSeries> {
    let p3 = nome.pow_nome(3);
    eval_to_order(order, |w| {
        let m1 = eval_m(
            &AppellCall::new(nome.pow(2).mul(x).mul(&y.pow(-2)), y.mul(&x.inv()), p3.clone()),
            w,
        )?;
        let m2 = eval_m(
            &AppellCall::new(nome.pow(2).mul(y).mul(&x.pow(-2)), x.mul(&y.inv()), p3.clone()),
            w,
        )?;
        let jy = theta_sum(&ThetaArg::new(y.clone(), nome.clone()), w);
        let jx = theta_sum(&ThetaArg::new(x.clone(), nome.clone()), w);
        Ok(jy.mul(&m1).add(&jx.mul(&m2)))
    })
}

/// Right-hand side of the f_{1,3,1} expansion with its free integer l:
///
/// ```text
/// f_{1,3,1}(x,y;q) = j(y;q) m(-q^5 x/y^3, q^{2l} y/x; q^8)
///                  + j(x;q) m(-q^5 y/x^3, x/(q^{2l} y); q^8)
///                  - (-1)^l q^{4l+1+binom(l,2)} x^{l+1} y J_{2,4} J_{8,16}
///                    j(q^{4l+3} x y; q^8) j(q^{8l+14} x^2 y^2; q^{16})
///                    / ( j(-q^{2l+3} x^2; q^8) j(-q^{6l+3} y^2; q^8) ).
/// ```
pub fn f131_rhs(
    x: &Monomial,
    y: &Monomial,
    nome: &Nome,
    l: i64,
    order: &QExp,
) -> Result<QSeries> {
    let p8 = nome.pow_nome(8);
    let p16 = nome.pow_nome(16);
    eval_to_order(order, |w| {
        let x1 = nome.pow(5).neg().mul(x).mul(&y.pow(-3));
        let z1 = nome.pow(2 * l).mul(y).mul(&x.inv());
        let m1 = eval_m(&AppellCall::new(x1, z1, p8.clone()), w)?;
        let x2 = nome.pow(5).neg().mul(y).mul(&x.pow(-3));
        let z2 = x.mul(&nome.pow(-2 * l)).mul(&y.inv());
        let m2 = eval_m(&AppellCall::new(x2, z2, p8.clone()), w)?;
        let jy = theta_sum(&ThetaArg::new(y.clone(), nome.clone()), w);
        let jx = theta_sum(&ThetaArg::new(x.clone(), nome.clone()), w);
        let main = jy.mul(&m1).add(&jx.mul(&m2));

        // theta-quotient correction
        let sign_l = if l % 2 == 0 { qr(1) } else { qr(-1) };
        let pref = x
            .pow(l + 1)
            .mul(y)
            .mul(&nome.pow(4 * l + 1 + binom2(l)));
        let j24 = theta_sum(&ThetaArg::new(nome.pow(2), nome.pow_nome(4)), w);
        let j816 = theta_sum(&ThetaArg::new(nome.pow(8), p16.clone()), w);
        let n1 = theta_sum(
            &ThetaArg::new(nome.pow(4 * l + 3).mul(x).mul(y), p8.clone()),
            w,
        );
        let n2 = theta_sum(
            &ThetaArg::new(nome.pow(8 * l + 14).mul(&x.pow(2)).mul(&y.pow(2)), p16.clone()),
            w,
        );
        let d1 = theta_inv(
            &ThetaArg::new(nome.pow(2 * l + 3).neg().mul(&x.pow(2)), p8.clone()),
            w,
        )?;
        let d2 = theta_inv(
            &ThetaArg::new(nome.pow(6 * l + 3).neg().mul(&y.pow(2)), p8.clone()),
            w,
        )?;
        let corr = j24
            .mul(&j816)
            .mul(&n1)
            .mul(&n2)
            .mul(&d1)
            .mul(&d2)
            .mul_monomial(&pref)
            .scale(&-sign_l);
        Ok(main.add(&corr))
    })
}

// ---------------------------------------------------------------------------
// G_{a,b,c} and theta_{a,b,c} (D = b^2 - ac > 0)
// ---------------------------------------------------------------------------

/// The Appell-Lerch block
///
/// ```text
/// G_{a,b,c}(x,y,z1,z0;q) =
///   sum_{t=0}^{a-1} (-y)^t q^{c binom(t,2)} j(q^{bt} x; q^a)
///       m(-q^{a binom(b+1,2) - c binom(a+1,2) - tD} (-y)^a/(-x)^b, z0; q^{aD})
/// + sum_{t=0}^{c-1} (-x)^t q^{a binom(t,2)} j(q^{bt} y; q^c)
///       m(-q^{c binom(b+1,2) - a binom(c+1,2) - tD} (-x)^c/(-y)^b, z1; q^{cD}).
/// ```
pub fn g_abc(
    params: &HeckeParams,
    x: &Monomial,
    y: &Monomial,
    z1: &Monomial,
    z0: &Monomial,
    nome: &Nome,
    order: &QExp,
) -> Result<QSeries> {
    let (a, b, c) = (params.a, params.b, params.c);
    let d = params.d();
    if d <= 0 || a < 1 || c < 1 {
        return Err(Error::UnsupportedShape(format!(
            "G_{{a,b,c}} needs positive a, c and D = b^2-ac > 0; got ({a},{b},{c})"
        )));
    }
    eval_to_order(order, |w| {
        let mut total = QSeries::zero(w.clone());
        let e0 = a * binom2(b + 1) - c * binom2(a + 1);
        for t in 0..a {
            let coef = y.neg().pow(t).mul(&nome.pow(c * binom2(t)));
            let jarg = ThetaArg::new(nome.pow(b * t).mul(x), nome.pow_nome(a));
            let xm = nome
                .pow(e0 - t * d)
                .neg()
                .mul(&y.neg().pow(a))
                .mul(&x.neg().pow(-b));
            let m = eval_m(&AppellCall::new(xm, z0.clone(), nome.pow_nome(a * d)), w)?;
            let j = theta_sum(&jarg, w);
            total = total.add(&j.mul(&m).mul_monomial(&coef));
        }
        let e1 = c * binom2(b + 1) - a * binom2(c + 1);
        for t in 0..c {
            let coef = x.neg().pow(t).mul(&nome.pow(a * binom2(t)));
            let jarg = ThetaArg::new(nome.pow(b * t).mul(y), nome.pow_nome(c));
            let xm = nome
                .pow(e1 - t * d)
                .neg()
                .mul(&x.neg().pow(c))
                .mul(&y.neg().pow(-b));
            let m = eval_m(&AppellCall::new(xm, z1.clone(), nome.pow_nome(c * d)), w)?;
            let j = theta_sum(&jarg, w);
            total = total.add(&j.mul(&m).mul_monomial(&coef));
        }
        Ok(total)
    })
}

/// nome^e for a rational e. The nome sign must only be raised to integer
/// powers, so a negative nome with fractional e is rejected.
fn nome_rat_pow(nome: &Nome, e: &QExp) -> Result<Monomial> {
    let coeff = if nome.coeff().is_one() {
        QRat::one()
    } else if e.is_integer() {
        rat_pow(nome.coeff(), floor_i64(e))
    } else {
        return Err(Error::UnsupportedShape(format!(
            "negative nome raised to fractional power {e}"
        )));
    };
    Ok(Monomial::new(coeff, nome.exp() * e))
}

/// The theta aggregate of the general f_{a,b,c} = G + theta/(j j) expansion,
/// with the inner sum index f running 0..=f_hi. The structural value is
/// f_hi = b - 1; other ranges exist only to adjudicate a misprinted display.
pub fn theta_abc_with_frange(
    params: &HeckeParams,
    x: &Monomial,
    y: &Monomial,
    nome: &Nome,
    f_hi: i64,
    order: &QExp,
) -> Result<QSeries> {
    let (a, b, c) = (params.a, params.b, params.c);
    let d = params.d();
    if d <= 0 || a < 1 || b < 1 || c < 1 {
        return Err(Error::UnsupportedShape(format!(
            "theta_{{a,b,c}} needs positive a, b, c and D > 0; got ({a},{b},{c})"
        )));
    }
    let frac_c2 = if c % 2 == 0 { qr(0) } else { qr_frac(1, 2) };
    let frac_a2 = if a % 2 == 0 { qr(0) } else { qr_frac(1, 2) };
    eval_to_order(order, |w| {
        let mut total = QSeries::zero(w.clone());
        for d_star in 0..b {
            for e_star in 0..b {
                let dd = qr(d_star) + &frac_c2;
                let ee = qr(e_star) + &frac_a2;
                // d - c/2 and e + a/2 are always integers
                let dmc = &dd - qr_frac(c, 2);
                let eap = &ee + qr_frac(a, 2);
                debug_assert!(dmc.is_integer() && eap.is_integer());
                let dmc_i = floor_i64(&dmc);
                let eap_i = floor_i64(&eap);
                let outer_exp =
                    qr(a) * binom2_rat(&dmc) + qr(b) * &dmc * &eap + qr(c) * binom2_rat(&eap);
                let outer = nome_rat_pow(nome, &outer_exp)?
                    .mul(&x.neg().pow(dmc_i))
                    .mul(&y.neg().pow(eap_i));

                // factors independent of f
                let jn_exp = qr(d) * (&dd + &ee) + qr(a * c) - qr_frac(b * (a + c), 2);
                let jn = theta_sum(
                    &ThetaArg::new(
                        nome_rat_pow(nome, &jn_exp)?
                            .mul(&x.neg().pow(b - c))
                            .mul(&y.neg().pow(b - a)),
                        nome.pow_nome(b * d),
                    ),
                    w,
                );
                let pb = crate::series::poch_inf(&nome.pow(b * d), &nome.pow_nome(b * d), w);
                let pb3 = pb.mul(&pb).mul(&pb);
                let den1_exp = qr(d) * &ee + qr_frac(a * (c - b), 2);
                let den1_arg = ThetaArg::new(
                    nome_rat_pow(nome, &den1_exp)?
                        .mul(&x.neg().pow(b))
                        .mul(&y.neg().pow(-a)),
                    nome.pow_nome(b * d),
                );
                let den2_exp = qr(d) * &dd + qr_frac(c * (a - b), 2);
                let den2_arg = ThetaArg::new(
                    nome_rat_pow(nome, &den2_exp)?
                        .mul(&y.neg().pow(b))
                        .mul(&x.neg().pow(-c)),
                    nome.pow_nome(b * d),
                );
                let dctx = format!("(d*={d_star}, e*={e_star})");
                let den1 = theta_inv(&den1_arg, w).map_err(|_| {
                    Error::DegenerateDenominator(format!("theta_abc denominator 1 at {dctx}"))
                })?;
                let den2 = theta_inv(&den2_arg, w).map_err(|_| {
                    Error::DegenerateDenominator(format!("theta_abc denominator 2 at {dctx}"))
                })?;
                let base = jn.mul(&pb3).mul(&den1).mul(&den2);

                for f in 0..=f_hi {
                    let f_exp = qr(a * b * b) * qr(binom2(f))
                        + (qr(a) * (qr(b) * &dd + qr(b * b) + qr(c) * &ee)
                            - qr_frac(a * c * (b + 1), 2))
                            * qr(f);
                    let f_mono = nome_rat_pow(nome, &f_exp)?.mul(&y.neg().pow(a * f));
                    let j1_exp =
                        qr(c) * (qr(a) * &dd + qr(b) * &ee + qr_frac(a * (b - 1), 2) + qr(a * b * f));
                    let j1 = theta_sum(
                        &ThetaArg::new(
                            nome_rat_pow(nome, &j1_exp)?.neg().mul(&x.neg().pow(c)),
                            nome.pow_nome(c * b * b),
                        ),
                        w,
                    );
                    let j2_exp = qr(a)
                        * ((&dd + qr_frac(b * (b + 1), 2) + qr(b * f)) * qr(d)
                            + qr_frac(c * (a - b), 2));
                    let j2 = theta_sum(
                        &ThetaArg::new(
                            nome_rat_pow(nome, &j2_exp)?
                                .neg()
                                .mul(&x.neg().pow(-a * c))
                                .mul(&y.neg().pow(a * b)),
                            nome.pow_nome(a * b * b * d),
                        ),
                        w,
                    );
                    let term = base
                        .mul(&j1)
                        .mul(&j2)
                        .mul_monomial(&outer.mul(&f_mono));
                    total = total.add(&term.truncate(total.order().clone().min(term.order().clone())));
                }
            }
        }
        Ok(total)
    })
}

/// theta_{a,b,c}(x,y;q) with the structural inner range f = 0..b-1.
pub fn theta_abc(
    params: &HeckeParams,
    x: &Monomial,
    y: &Monomial,
    nome: &Nome,
    order: &QExp,
) -> Result<QSeries> {
    theta_abc_with_frange(params, x, y, nome, params.b - 1, order)
}

// ---------------------------------------------------------------------------
// Mock theta builders
// ---------------------------------------------------------------------------

/// Ramanujan's third-order psi(q) = sum_{n>=0} q^{n^2} / (q;q^2)_n.
pub fn mock_psi(order: &QExp) -> QSeries {
    let mut total = QSeries::zero(order.clone());
    let mut inv_poch = QSeries::one(order.clone());
    let mut n = 0i64;
    while qe(n * n) <= *order {
        if n > 0 {
            let geo = geometric_inv(&qr(1), &qe(2 * n - 1), order).expect("positive exponent");
            inv_poch = inv_poch.mul(&geo);
        }
        total = total.add(&inv_poch.mul_monomial(&Monomial::q_pow(n * n)).truncate(order.clone()));
        n += 1;
    }
    total
}

/// sigma(q) = 1 + sum_{n>=1} q^{n(n+1)/2} / ((1+q)(1+q^2)...(1+q^n)).
pub fn sigma_series(order: &QExp) -> QSeries {
    let mut total = QSeries::one(order.clone());
    let mut inv_poch = QSeries::one(order.clone());
    let mut n = 1i64;
    while qe(n * (n + 1) / 2) <= *order {
        let geo = geometric_inv(&qr(-1), &qe(n), order).expect("positive exponent");
        inv_poch = inv_poch.mul(&geo);
        total = total.add(
            &inv_poch
                .mul_monomial(&Monomial::q_pow(n * (n + 1) / 2))
                .truncate(order.clone()),
        );
        n += 1;
    }
    total
}

/// phi(q) = 2 m(q, -1; q^3) (sixth order).
pub fn mock_phi(order: &QExp) -> Result<QSeries> {
    let call = AppellCall::new(Monomial::q(), Monomial::term(-1, 0), Nome::q_pow(3));
    Ok(eval_m(&call, order)?.scale(&qr(2)))
}

/// mu at argument q^3: mu(q^3) = 4 m(-q^3, -1; q^{12}) - J_{6,12}^2 / J_3^3.
pub fn mock_mu_q3(order: &QExp) -> Result<QSeries> {
    eval_to_order(order, |w| {
        let m = eval_m(
            &AppellCall::new(Monomial::term(-1, 3), Monomial::term(-1, 0), Nome::q_pow(12)),
            w,
        )?;
        let j612 = crate::theta::j_std(6, 12, w);
        let j3 = crate::theta::j_m(3, w);
        let j3c = j3.mul(&j3).mul(&j3).inv()?;
        Ok(m.scale(&qr(4)).sub(&j612.mul(&j612).mul(&j3c)))
    })
}

/// Theta_2(q) of the m-splitting proposition:
///
/// ```text
/// Theta_2(q) = J_6^3 / (j(-q^2;q^3) j(-1;q^{12}))
///   * sum_{r=0}^{1} q^{2r} j(-q^{7+3r};q^6) j(-q^{6r};q^{12})
///                   / ( j(q^7;q^6) j(-q^{3r};q^6) ).
/// ```
pub fn theta2_series(order: &QExp) -> Result<QSeries> {
    eval_to_order(order, |w| {
        let j6 = crate::theta::j_m(6, w);
        let front = j6
            .mul(&j6)
            .mul(&j6)
            .mul(&theta_inv(&ThetaArg::new(Monomial::term(-1, 2), Nome::q_pow(3)), w)?)
            .mul(&theta_inv(&ThetaArg::new(Monomial::term(-1, 0), Nome::q_pow(12)), w)?);
        let mut inner = QSeries::zero(w.clone());
        for r in 0..=1i64 {
            let num = theta_sum(&ThetaArg::new(Monomial::term(-1, 7 + 3 * r), Nome::q_pow(6)), w)
                .mul(&theta_sum(
                    &ThetaArg::new(Monomial::term(-1, 6 * r), Nome::q_pow(12)),
                    w,
                ));
            let den = theta_inv(&ThetaArg::new(Monomial::q_pow(7), Nome::q_pow(6)), w)?
                .mul(&theta_inv(&ThetaArg::new(Monomial::term(-1, 3 * r), Nome::q_pow(6)), w)?);
            let term = num.mul(&den).mul_monomial(&Monomial::q_pow(2 * r));
            inner = inner.add(&term.truncate(inner.order().clone().min(term.order().clone())));
        }
        Ok(front.mul(&inner))
    })
}
