//! Hecke-type double-sums of type I and type II.
//!
//! Type I sums subtract the negative quadrant,
//!
//! ```text
//! f_{a,b,c}(x,y;q) = (sum_{r,s>=0} - sum_{r,s<0}) (-1)^{r+s} x^r y^s
//!                    q^{a binom(r,2) + b r s + c binom(s,2)},
//! ```
//!
//! and type II sums add it (g_{a,b,c}). Evaluation enumerates lattice points
//! row by row with a per-call bound: each row's minimum exponent is computed
//! exactly, rows stop once the minimum provably stays above the truncation
//! order, and a call whose row minima never climb is rejected as
//! [`Error::NonConvergent`] rather than truncated heuristically.

use crate::error::{Error, Result};
use crate::series::{
    binom2, ceil_i64, floor_i64, qe, qr, rat_pow, Comparison, Monomial, Nome, QExp, QRat, QSeries,
};
use crate::theta::{theta_sum, ThetaArg};
use num::{One, Signed, Zero};

/// The integer triple (a, b, c) of a double-sum, with D = b^2 - ac.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HeckeParams {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl HeckeParams {
    pub fn new(a: i64, b: i64, c: i64) -> Result<Self> {
        if a < 0 || b < 0 || c < 0 {
            return Err(Error::NonConvergent(format!(
                "negative Hecke parameters ({a},{b},{c}) are out of scope"
            )));
        }
        if a == 0 && b == 0 && c == 0 {
            return Err(Error::NonConvergent("(0,0,0) is not a quadratic form".into()));
        }
        if b == 0 && (a == 0 || c == 0) {
            return Err(Error::NonConvergent(format!(
                "b = 0 requires a > 0 and c > 0, got ({a},{b},{c})"
            )));
        }
        Ok(HeckeParams { a, b, c })
    }

    /// D = b^2 - ac.
    pub fn d(&self) -> i64 {
        self.b * self.b - self.a * self.c
    }
}

/// Which symmetry type a call evaluates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HeckeKind {
    TypeI,
    TypeII,
}

/// A fully specified double-sum evaluation f/g_{a,b,c}(x, y; nome).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeckeCall {
    pub params: HeckeParams,
    pub x: Monomial,
    pub y: Monomial,
    pub nome: Nome,
    pub kind: HeckeKind,
}

impl HeckeCall {
    pub fn new(
        params: HeckeParams,
        x: Monomial,
        y: Monomial,
        nome: Nome,
        kind: HeckeKind,
    ) -> Result<Self> {
        if x.is_zero() || y.is_zero() {
            return Err(Error::NonConvergent("x and y must be nonzero monomials".into()));
        }
        Ok(HeckeCall { params, x, y, nome, kind })
    }

    pub fn type_i(a: i64, b: i64, c: i64, x: Monomial, y: Monomial, nome: Nome) -> Result<Self> {
        HeckeCall::new(HeckeParams::new(a, b, c)?, x, y, nome, HeckeKind::TypeI)
    }

    pub fn type_ii(a: i64, b: i64, c: i64, x: Monomial, y: Monomial, nome: Nome) -> Result<Self> {
        HeckeCall::new(HeckeParams::new(a, b, c)?, x, y, nome, HeckeKind::TypeII)
    }

    /// Evaluate to `order`, dispatching on the call's kind.
    pub fn eval(&self, order: &QExp) -> Result<QSeries> {
        let pos = quadrant_sum(self, false, order)?;
        let neg = quadrant_sum(self, true, order)?;
        Ok(match self.kind {
            HeckeKind::TypeI => pos.sub(&neg),
            HeckeKind::TypeII => pos.add(&neg),
        })
    }
}

/// Evaluate a type I call.
pub fn eval_f(call: &HeckeCall, order: &QExp) -> Result<QSeries> {
    assert!(call.kind == HeckeKind::TypeI);
    call.eval(order)
}

/// Evaluate a type II call.
pub fn eval_g(call: &HeckeCall, order: &QExp) -> Result<QSeries> {
    assert!(call.kind == HeckeKind::TypeII);
    call.eval(order)
}

// ---------------------------------------------------------------------------
// Quadrant enumeration
// ---------------------------------------------------------------------------

/// Exponent polynomial E(r,s) = P r^2 + Q s^2 + R r s + U r + V s + W over
/// the reindexed quadrant (r, s >= 0).
struct QuadPoly {
    p: QRat,
    q: QRat,
    r: QRat,
    u: QRat,
    v: QRat,
    w: QRat,
}

impl QuadPoly {
    fn eval(&self, r: i64, s: i64) -> QExp {
        let (rr, ss) = (qe(r), qe(s));
        &self.p * &rr * &rr
            + &self.q * &ss * &ss
            + &self.r * &rr * &ss
            + &self.u * &rr
            + &self.v * &ss
            + &self.w
    }
}

/// Sum over one quadrant of the lattice. `reflected` selects r,s < 0 (the
/// sum is reindexed by r -> -1-r, s -> -1-s so both quadrants enumerate over
/// r,s >= 0).
pub(crate) fn quadrant_sum(call: &HeckeCall, reflected: bool, order: &QExp) -> Result<QSeries> {
    let (a, b, c) = (call.params.a, call.params.b, call.params.c);
    let t = call.nome.exp().clone();
    let alpha = call.x.exp.clone();
    let beta = call.y.exp.clone();
    let half = qe_frac2();
    let (ta, tb, tc) = (&t * qe(a), &t * qe(b), &t * qe(c));
    let poly = if !reflected {
        QuadPoly {
            p: &ta * &half,
            q: &tc * &half,
            r: tb.clone(),
            u: &alpha - &ta * &half,
            v: &beta - &tc * &half,
            w: QExp::zero(),
        }
    } else {
        QuadPoly {
            p: &ta * &half,
            q: &tc * &half,
            r: tb.clone(),
            u: qe(3) * &ta * &half + &tb - &alpha,
            v: qe(3) * &tc * &half + &tb - &beta,
            w: &ta + &tb + &tc - &alpha - &beta,
        }
    };

    let mut out = QSeries::zero(order.clone());
    let c_x = &call.x.coeff;
    let c_y = &call.y.coeff;
    let c_t = call.nome.coeff();

    let mut emit = |r: i64, s: i64, out: &mut QSeries| {
        // map back to the original lattice indices
        let (rh, sh) = if reflected { (-1 - r, -1 - s) } else { (r, s) };
        let qint = a * binom2(rh) + b * rh * sh + c * binom2(sh);
        let e = &t * qe(qint) + &alpha * qe(rh) + &beta * qe(sh);
        debug_assert_eq!(e, poly.eval(r, s));
        let sign = if (rh + sh).rem_euclid(2) == 0 { qr(1) } else { qr(-1) };
        let coeff = sign * rat_pow(c_x, rh) * rat_pow(c_y, sh) * rat_pow(c_t, qint);
        out.add_term(e, coeff);
    };

    // Enumerate one row; returns the row's exact minimum exponent over s >= 0
    // or an error when the row has infinitely many contributing terms.
    let row = |r: i64, out: &mut QSeries, emit: &mut dyn FnMut(i64, i64, &mut QSeries)| -> Result<QExp> {
        let b1 = &poly.r * qe(r) + &poly.v;
        if poly.q.is_zero() {
            if b1.is_positive() {
                let mut s = 0i64;
                loop {
                    if poly.eval(r, s) > *order {
                        break;
                    }
                    emit(r, s, out);
                    s += 1;
                }
                Ok(poly.eval(r, 0))
            } else {
                let c1 = poly.eval(r, 0);
                if b1.is_zero() {
                    if c1 <= *order {
                        return Err(Error::NonConvergent(format!(
                            "row r' = {r} is constant at exponent {c1} <= order"
                        )));
                    }
                    Ok(c1)
                } else {
                    Err(Error::NonConvergent(format!(
                        "row r' = {r} has nonpositive slope in s"
                    )))
                }
            }
        } else {
            // parabola in s with positive leading coefficient
            let sv = -&b1 / (qe(2) * &poly.q);
            let start = ceil_i64(&sv).max(0);
            let mut s = start;
            while poly.eval(r, s) <= *order {
                emit(r, s, out);
                s += 1;
            }
            let mut s = start - 1;
            while s >= 0 && poly.eval(r, s) <= *order {
                emit(r, s, out);
                s -= 1;
            }
            let lo = floor_i64(&sv).max(0);
            let hi = ceil_i64(&sv).max(0);
            Ok(poly.eval(r, lo).min(poly.eval(r, hi)))
        }
    };

    // Row loop with a provable stopping bound. Beyond r_clamp the integer
    // minimizer in s is a fixed s*, making the row minimum a single
    // quadratic mu(r) = P r^2 + A1 r + A0.
    let (r_clamp, s_star) = if poly.q.is_zero() || poly.r.is_positive() {
        // slope/vertex condition R r + V >= 0
        if poly.r.is_zero() {
            // b = 0 with c = 0 is rejected at construction; here Q == 0
            // cannot happen with R == 0.
            (0i64, clamp_vertex(&poly))
        } else {
            let bound = -&poly.v / &poly.r;
            ((floor_i64(&bound) + 1).max(0), 0i64)
        }
    } else {
        // R == 0, Q > 0: fixed vertex for all rows
        (0i64, clamp_vertex(&poly))
    };
    let a1 = &poly.u + &poly.r * qe(s_star);
    let mu_tail = |r: i64| -> QExp { poly.eval(r, s_star) };

    let mut r = 0i64;
    loop {
        if r < r_clamp {
            row(r, &mut out, &mut emit)?;
            r += 1;
            continue;
        }
        let mu = mu_tail(r);
        if mu > *order {
            if poly.p.is_positive() {
                let rv = -&a1 / (qe(2) * &poly.p);
                if qe(r) >= rv {
                    break;
                }
            } else if a1.is_positive() {
                break;
            } else if a1.is_zero() {
                break;
            } else {
                return Err(Error::NonConvergent(
                    "row minima decrease without bound".into(),
                ));
            }
            // before the vertex: row contributes nothing but later rows may
            r += 1;
            continue;
        }
        if poly.p.is_zero() && !a1.is_positive() {
            return Err(Error::NonConvergent(
                "row minima never climb past the truncation order".into(),
            ));
        }
        row(r, &mut out, &mut emit)?;
        r += 1;
    }
    Ok(out)
}

fn qe_frac2() -> QExp {
    crate::series::qe_frac(1, 2)
}

/// Integer s >= 0 minimizing Q s^2 + V s (used when R == 0).
fn clamp_vertex(poly: &QuadPoly) -> i64 {
    if poly.q.is_zero() {
        return 0;
    }
    let sv = -&poly.v / (qe(2) * &poly.q);
    let lo = floor_i64(&sv).max(0);
    let hi = ceil_i64(&sv).max(0);
    let at = |s: i64| &poly.q * qe(s) * qe(s) + &poly.v * qe(s);
    if at(lo) <= at(hi) {
        lo
    } else {
        hi
    }
}

// ---------------------------------------------------------------------------
// sg and the sg-weighted bilateral sum
// ---------------------------------------------------------------------------

/// sg(n) = +1 for n >= 0 and -1 otherwise.
pub fn sg(n: i64) -> i64 {
    if n >= 0 {
        1
    } else {
        -1
    }
}

/// sum_{s in Z} sg(s) (-w)^s nome^{binom(s,2)}, truncated by exponent
/// growth. Requires the nome exponent to be positive (both tails climb).
pub fn sg_weighted_theta(w: &Monomial, nome: &Nome, order: &QExp) -> QSeries {
    let t = nome.exp();
    let gamma = &w.exp;
    let vertex = qe(1) / qe(2) - gamma / t;
    let start = floor_i64(&vertex);
    let mut out = QSeries::zero(order.clone());
    let mut push = |s: i64, out: &mut QSeries| -> bool {
        let e = t * qe(binom2(s)) + gamma * qe(s);
        if e > *order {
            return false;
        }
        let sign = qr(sg(s)) * if s % 2 == 0 { qr(1) } else { qr(-1) };
        let coeff = sign * rat_pow(&w.coeff, s) * rat_pow(nome.coeff(), binom2(s));
        out.add_term(e, coeff);
        true
    };
    let mut s = start;
    while push(s, &mut out) {
        s -= 1;
    }
    let mut s = start + 1;
    while push(s, &mut out) {
        s += 1;
    }
    out
}

// ---------------------------------------------------------------------------
// Functional equations as checkable operations
// ---------------------------------------------------------------------------

/// f_{a,b,c}(x,y;q) = -(q^{a+b+c}/(xy)) f_{a,b,c}(q^{2a+b}/x, q^{2c+b}/y; q).
pub fn check_f_functional(call: &HeckeCall, order: &QExp) -> Result<Comparison> {
    let (a, b, c) = (call.params.a, call.params.b, call.params.c);
    let lhs = eval_f(call, order)?;
    let pref = call
        .nome
        .pow(a + b + c)
        .mul(&call.x.inv())
        .mul(&call.y.inv())
        .neg();
    let xt = call.nome.pow(2 * a + b).mul(&call.x.inv());
    let yt = call.nome.pow(2 * c + b).mul(&call.y.inv());
    let inner = HeckeCall::new(call.params, xt, yt, call.nome.clone(), HeckeKind::TypeI)?;
    let rhs = eval_f(&inner, &(order - &pref.exp))?.mul_monomial(&pref).truncate(order.clone());
    Ok(Comparison::of(
        format!("f1 at ({a},{b},{c}), x={}, y={}, nome={}", call.x, call.y, call.nome),
        &lhs,
        &rhs,
        order,
    ))
}

/// g_{a,b,c}(x,y;q) = (q^{a+b+c}/(xy)) g_{a,b,c}(q^{2a+b}/x, q^{2c+b}/y; q).
pub fn check_g_functional(call: &HeckeCall, order: &QExp) -> Result<Comparison> {
    let (a, b, c) = (call.params.a, call.params.b, call.params.c);
    let lhs = eval_g(call, order)?;
    let pref = call.nome.pow(a + b + c).mul(&call.x.inv()).mul(&call.y.inv());
    let xt = call.nome.pow(2 * a + b).mul(&call.x.inv());
    let yt = call.nome.pow(2 * c + b).mul(&call.y.inv());
    let inner = HeckeCall::new(call.params, xt, yt, call.nome.clone(), HeckeKind::TypeII)?;
    let rhs = eval_g(&inner, &(order - &pref.exp))?.mul_monomial(&pref).truncate(order.clone());
    Ok(Comparison::of(
        format!("g1 at ({a},{b},{c}), x={}, y={}, nome={}", call.x, call.y, call.nome),
        &lhs,
        &rhs,
        order,
    ))
}

/// The (l,k) index shift for type I sums, with the two theta correction sums.
pub fn check_f_shift(call: &HeckeCall, l: i64, k: i64, order: &QExp) -> Result<Comparison> {
    assert!(l >= 0 && k >= 0);
    let (a, b, c) = (call.params.a, call.params.b, call.params.c);
    let lhs = eval_f(call, order)?;

    let pref = call
        .x
        .neg()
        .pow(l)
        .mul(&call.y.neg().pow(k))
        .mul(&call.nome.pow(a * binom2(l) + b * l * k + c * binom2(k)));
    let xt = call.nome.pow(a * l + b * k).mul(&call.x);
    let yt = call.nome.pow(b * l + c * k).mul(&call.y);
    let inner = HeckeCall::new(call.params, xt, yt, call.nome.clone(), HeckeKind::TypeI)?;
    let mut rhs = eval_f(&inner, &(order - &pref.exp))?
        .mul_monomial(&pref)
        .truncate(order.clone());

    if l >= 1 {
        let inner_nome = nome_power(&call.nome, c)?;
        for m in 0..l {
            let coef = call.x.neg().pow(m).mul(&call.nome.pow(a * binom2(m)));
            let arg = ThetaArg::new(call.nome.pow(m * b).mul(&call.y), inner_nome.clone());
            let th = theta_sum(&arg, &(order - &coef.exp));
            rhs = rhs.add(&th.mul_monomial(&coef).truncate(order.clone()));
        }
    }
    if k >= 1 {
        let inner_nome = nome_power(&call.nome, a)?;
        for m in 0..k {
            let coef = call.y.neg().pow(m).mul(&call.nome.pow(c * binom2(m)));
            let arg = ThetaArg::new(call.nome.pow(m * b).mul(&call.x), inner_nome.clone());
            let th = theta_sum(&arg, &(order - &coef.exp));
            rhs = rhs.add(&th.mul_monomial(&coef).truncate(order.clone()));
        }
    }
    Ok(Comparison::of(
        format!("f2 (l={l},k={k}) at ({a},{b},{c}), x={}, y={}", call.x, call.y),
        &lhs,
        &rhs,
        order,
    ))
}

/// The (l,k) index shift for type II sums. The correction for the x-shift is
/// the sg-weighted bilateral sum; the y-shift correction is its image under
/// the (a <-> c, x <-> y) symmetry of g, applied after the x-shift.
pub fn check_g_shift(call: &HeckeCall, l: i64, k: i64, order: &QExp) -> Result<Comparison> {
    assert!(l >= 0 && k >= 0);
    let (a, b, c) = (call.params.a, call.params.b, call.params.c);
    let lhs = eval_g(call, order)?;

    let pref = call
        .x
        .neg()
        .pow(l)
        .mul(&call.y.neg().pow(k))
        .mul(&call.nome.pow(a * binom2(l) + b * l * k + c * binom2(k)));
    let xt = call.nome.pow(a * l + b * k).mul(&call.x);
    let yt = call.nome.pow(b * l + c * k).mul(&call.y);
    let inner = HeckeCall::new(call.params, xt, yt, call.nome.clone(), HeckeKind::TypeII)?;
    let mut rhs = eval_g(&inner, &(order - &pref.exp))?
        .mul_monomial(&pref)
        .truncate(order.clone());

    if l >= 1 {
        let inner_nome = nome_power(&call.nome, c)?;
        for r in 0..l {
            let coef = call.x.neg().pow(r).mul(&call.nome.pow(a * binom2(r)));
            let w = call.nome.pow(b * r).mul(&call.y);
            let sgs = sg_weighted_theta(&w, &inner_nome, &(order - &coef.exp));
            rhs = rhs.add(&sgs.mul_monomial(&coef).truncate(order.clone()));
        }
    }
    if k >= 1 {
        // shift y on the already x-shifted call; the whole correction block
        // carries the x-shift prefactor (-x)^l q^{a binom(l,2)}
        let inner_nome = nome_power(&call.nome, a)?;
        let outer = call.x.neg().pow(l).mul(&call.nome.pow(a * binom2(l)));
        let x_shift = call.nome.pow(a * l).mul(&call.x);
        let y_shift = call.nome.pow(b * l).mul(&call.y);
        for s in 0..k {
            let coef = outer
                .mul(&y_shift.neg().pow(s))
                .mul(&call.nome.pow(c * binom2(s)));
            let w = call.nome.pow(b * s).mul(&x_shift);
            let sgs = sg_weighted_theta(&w, &inner_nome, &(order - &coef.exp));
            rhs = rhs.add(&sgs.mul_monomial(&coef).truncate(order.clone()));
        }
    }
    Ok(Comparison::of(
        format!("g2 (l={l},k={k}) at ({a},{b},{c}), x={}, y={}", call.x, call.y),
        &lhs,
        &rhs,
        order,
    ))
}

fn nome_power(nome: &Nome, e: i64) -> Result<Nome> {
    if e <= 0 {
        return Err(Error::InvalidNome(format!(
            "correction sums need a positive nome power, got exponent {e}"
        )));
    }
    Ok(nome.pow_nome(e))
}

// ---------------------------------------------------------------------------
// Parity splitting and the Kronecker identity
// ---------------------------------------------------------------------------

/// Split a type I sum by the parity of (r, s):
///
/// ```text
/// f_{a,b,c}(x,y;q) =  f(-x^2 q^a,      -y^2 q^c;      q^4)
///                  - x f(-x^2 q^{3a},   -y^2 q^{c+2b}; q^4)
///                  - y f(-x^2 q^{a+2b}, -y^2 q^{3c};   q^4)
///               + xy q^b f(-x^2 q^{3a+2b}, -y^2 q^{3c+2b}; q^4).
/// ```
///
/// Returns the four (prefactor, call-at-nome^4) terms.
pub fn f_parity_split(call: &HeckeCall) -> Result<Vec<(Monomial, HeckeCall)>> {
    let (a, b, c) = (call.params.a, call.params.b, call.params.c);
    let nome4 = call.nome.pow_nome(4);
    let x2 = call.x.pow(2).neg();
    let y2 = call.y.pow(2).neg();
    let term = |px: i64, py: i64| -> Result<HeckeCall> {
        HeckeCall::new(
            call.params,
            x2.mul(&call.nome.pow(px)),
            y2.mul(&call.nome.pow(py)),
            nome4.clone(),
            HeckeKind::TypeI,
        )
    };
    Ok(vec![
        (Monomial::one(), term(a, c)?),
        (call.x.neg(), term(3 * a, c + 2 * b)?),
        (call.y.neg(), term(a + 2 * b, 3 * c)?),
        (call.x.mul(&call.y).mul(&call.nome.pow(b)), term(3 * a + 2 * b, 3 * c + 2 * b)?),
    ])
}

/// Kronecker's identity: the product side
///
/// ```text
/// (q)_inf^2 (xy, q/xy; q)_inf / (x, q/x, y, q/y; q)_inf
///   = (q)_inf^3 j(xy;q) / (j(x;q) j(y;q)),
/// ```
///
/// whose double-sum side is f_{0,1,0}(-x,-y;q).
pub fn kronecker_eval(x: &Monomial, y: &Monomial, nome: &Nome, order: &QExp) -> Result<QSeries> {
    let jx = ThetaArg::new(x.clone(), nome.clone());
    let jy = ThetaArg::new(y.clone(), nome.clone());
    if jx.is_degenerate() || jy.is_degenerate() {
        return Err(Error::DegenerateDenominator(format!(
            "j({x};{nome}) or j({y};{nome}) vanishes"
        )));
    }
    let mx = crate::theta::theta_min_exp(&jx);
    let my = crate::theta::theta_min_exp(&jy);
    let slack = mx.abs() + my.abs() + mx.abs() + my.abs();
    let work = order + &slack;
    let jxy = theta_sum(&ThetaArg::new(x.mul(y), nome.clone()), &work);
    let p3 = {
        let p = crate::series::poch_inf(nome.monomial(), nome, &work);
        p.mul(&p).mul(&p)
    };
    let inv_x = theta_sum(&jx, &work).inv()?;
    let inv_y = theta_sum(&jy, &work).inv()?;
    let res = p3.mul(&jxy).mul(&inv_x).mul(&inv_y);
    if *res.order() < *order {
        return Err(Error::NonConvergent(
            "kronecker product side lost too much order".into(),
        ));
    }
    Ok(res.truncate(order.clone()))
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
