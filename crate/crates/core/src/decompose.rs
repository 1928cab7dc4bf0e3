//! Rewriting triangular double-sums as f/g building blocks.
//!
//! A [`TriangularSumSpec`] with its (1 +- q^{...}) factor is rewritten into
//! an exact finite combination of type I / type II double-sums by a change
//! of variables: r = n+m, s = n-m with a parity split into the classes
//! (2R, 2S) and (2R+1, 2S+1) for the |m| <= n ranges (after first splitting
//! n by parity for |m| <= floor(n/2)), or n = r+s, m = s for 0 <= m <= n.
//!
//! Each resulting positive-quadrant piece carries a quadratic kernel; a
//! piece pairs with another whose kernel is its image under the reflection
//! r <- -1-r, s <- -1-s. A pair with equal signs forms a type II sum, with
//! opposite signs a type I sum. The pairing is deterministic
//! pattern-matching, not a search: if the transformed form does not land on
//! integer (a,b,c) with monomial arguments the decomposer refuses.

use crate::error::{Error, Result};
use crate::hecke::{HeckeCall, HeckeKind, HeckeParams};
use crate::series::{qe, qe_frac, qr, qr_frac, Comparison, Monomial, Nome, QExp, QRat, QSeries};
use crate::sums::{eval_triangular_sum, MRange, TriangularSumSpec};
use num::{BigInt, Integer, One, Signed, ToPrimitive, Zero};
use std::fmt;

/// One emitted building block: prefactor * f/g_{a,b,c}(x, y; nome).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeckeTerm {
    pub prefactor: Monomial,
    pub call: HeckeCall,
}

impl HeckeTerm {
    pub fn eval(&self, order: &QExp) -> Result<QSeries> {
        let inner = self.call.eval(&(order - &self.prefactor.exp))?;
        Ok(inner.mul_monomial(&self.prefactor).truncate(order.clone()))
    }
}

impl fmt::Display for HeckeTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.call.kind {
            HeckeKind::TypeI => "f",
            HeckeKind::TypeII => "g",
        };
        if self.prefactor.coeff.is_negative() {
            write!(f, "-")?;
        }
        let pexp = Monomial::new(QRat::one(), self.prefactor.exp.clone());
        if !pexp.is_one() {
            write!(f, "{pexp}*")?;
        }
        write!(
            f,
            "{kind}({},{},{}; {}, {}; {})",
            self.call.params.a,
            self.call.params.b,
            self.call.params.c,
            self.call.x,
            self.call.y,
            self.call.nome
        )
    }
}

/// Outcome of [`decompose`]: the emitted terms plus the residual
/// (terms evaluated minus the input sum), which must be zero.
#[derive(Clone, Debug)]
pub struct DecompositionResult {
    pub input: TriangularSumSpec,
    pub terms: Vec<HeckeTerm>,
    pub residual: QSeries,
}

// ---------------------------------------------------------------------------
// Quadrant pieces
// ---------------------------------------------------------------------------

/// Kernel of a positive-quadrant piece: the exponent polynomial
/// qrr R^2 + qss S^2 + qrs RS + lr R + ls S + c0.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Kernel {
    qrr: QRat,
    qss: QRat,
    qrs: QRat,
    lr: QRat,
    ls: QRat,
    c0: QRat,
}

impl Kernel {
    /// Image under (R,S) -> (-1-R, -1-S); the quadratic part is invariant.
    fn reflect(&self) -> Kernel {
        Kernel {
            qrr: self.qrr.clone(),
            qss: self.qss.clone(),
            qrs: self.qrs.clone(),
            lr: qr(2) * &self.qrr + &self.qrs - &self.lr,
            ls: qr(2) * &self.qss + &self.qrs - &self.ls,
            c0: &self.qrr + &self.qss + &self.qrs - &self.lr - &self.ls + &self.c0,
        }
    }
}

/// A positive-quadrant sub-series: sigma * sum_{R,S>=0} (-1)^{lam_r R + lam_s S} q^{K(R,S)}.
#[derive(Clone, Debug)]
struct Piece {
    kernel: Kernel,
    lam_r: bool,
    lam_s: bool,
    sigma: i8,
    from_extra: bool,
    tag: String,
}

/// gcd of the nonzero entries of a list of rationals, as a positive rational.
fn rat_gcd(values: &[&QRat]) -> Option<QRat> {
    let mut lcm_den = BigInt::one();
    let mut any = false;
    for v in values {
        if !v.is_zero() {
            any = true;
            lcm_den = lcm_den.lcm(v.denom());
        }
    }
    if !any {
        return None;
    }
    let mut g = BigInt::zero();
    for v in values {
        if !v.is_zero() {
            let scaled = (v.numer() * &lcm_den / v.denom()).abs();
            g = g.gcd(&scaled);
        }
    }
    Some(QRat::new(g, lcm_den))
}

/// Build the quadrant pieces of a |m| <= n triangle with exponent
/// (A n^2 + B m^2 + C n + D m + E)/F, sign (-1)^{ln n + lm m + const},
/// and an optional linear exponent addition al*m + be*n + k.
#[allow(clippy::too_many_arguments)]
fn triangle_pieces(
    a: i64,
    b: i64,
    c: i64,
    d: i64,
    e: i64,
    f_den: i64,
    ln: bool,
    lm: bool,
    sconst: bool,
    lin: Option<(i64, i64, i64)>, // (alpha, beta, k) already includes eps elsewhere
    from_extra: bool,
    sigma_extra: i8,
    tag: &str,
) -> Vec<Piece> {
    let f = qr(f_den);
    let mut out = Vec::new();
    for delta in 0..=1i64 {
        // n = R+S+delta, m = R-S
        let mut kernel = Kernel {
            qrr: qr(a + b) / &f,
            qss: qr(a + b) / &f,
            qrs: qr(2 * a - 2 * b) / &f,
            lr: qr(2 * a * delta + c + d) / &f,
            ls: qr(2 * a * delta + c - d) / &f,
            c0: qr(a * delta * delta + c * delta + e) / &f,
        };
        let lam = ln ^ lm;
        let lam0 = sconst ^ (ln && delta == 1);
        if let Some((al, be, k)) = lin {
            kernel.lr += qr(be + al);
            kernel.ls += qr(be - al);
            kernel.c0 += qr(be * delta + k);
        }
        out.push(Piece {
            kernel,
            lam_r: lam,
            lam_s: lam,
            sigma: if lam0 { -sigma_extra } else { sigma_extra },
            from_extra,
            tag: format!("{tag}, class (2R+{delta},2S+{delta})"),
        });
    }
    out
}

/// Build all quadrant pieces of a spec (base pieces and, when an extra
/// factor is present, the extra pieces).
fn build_pieces(spec: &TriangularSumSpec) -> Result<Vec<Piece>> {
    if spec.n_start != 0 {
        return Err(Error::UnsupportedShape(
            "decomposition needs the full triangle (n_start = 0)".into(),
        ));
    }
    let mut pieces = Vec::new();
    let mut push_triangle = |a: i64,
                             b: i64,
                             c: i64,
                             d: i64,
                             e: i64,
                             ln: bool,
                             lm: bool,
                             sconst: bool,
                             lin: (i64, i64, i64),
                             tag: &str| {
        pieces.extend(triangle_pieces(
            a, b, c, d, e, spec.f_den, ln, lm, sconst, None, false, 1, tag,
        ));
        if let Some(x) = &spec.extra {
            pieces.extend(triangle_pieces(
                a,
                b,
                c,
                d,
                e,
                spec.f_den,
                ln,
                lm,
                sconst,
                Some(lin),
                true,
                x.eps,
                &format!("{tag}, extra"),
            ));
        }
    };
    let lin0 = spec
        .extra
        .map(|x| (x.alpha, x.beta, x.k))
        .unwrap_or((0, 0, 0));
    match spec.range {
        MRange::AbsLeN => {
            if spec.triangular_m {
                return Err(Error::UnsupportedShape(
                    "triangular m-exponent is only supported with the 0 <= m <= n range".into(),
                ));
            }
            push_triangle(
                spec.a, spec.b, spec.c, spec.d, spec.e, spec.sign_n, spec.sign_m, false, lin0,
                "triangle",
            );
        }
        MRange::AbsLeHalfN => {
            if spec.triangular_m {
                return Err(Error::UnsupportedShape(
                    "triangular m-exponent is only supported with the 0 <= m <= n range".into(),
                ));
            }
            // split n = 2n^ + nu; the inner triangles are |m| <= n^
            for nu in 0..=1i64 {
                let a2 = 4 * spec.a;
                let c2 = 4 * spec.a * nu + 2 * spec.c;
                let e2 = spec.a * nu * nu + spec.c * nu + spec.e;
                let sconst = spec.sign_n && nu == 1;
                let lin = (lin0.0, 2 * lin0.1, lin0.1 * nu + lin0.2);
                push_triangle(
                    a2,
                    spec.b,
                    c2,
                    spec.d,
                    e2,
                    false,
                    spec.sign_m,
                    sconst,
                    lin,
                    &format!("n = 2n'+{nu} branch"),
                );
            }
        }
        MRange::ZeroToN => {
            // n = r+s, m = s; no parity split
            let f = qr(spec.f_den);
            let (qss_extra, ls_extra) = if spec.triangular_m {
                (qr_frac(spec.b, 2), qr_frac(spec.b, 2))
            } else {
                (qr(spec.b), qr(0))
            };
            let mut make = |lin: Option<(i64, i64, i64)>, from_extra: bool, sigma_extra: i8| {
                let mut kernel = Kernel {
                    qrr: qr(spec.a) / &f,
                    qss: (qr(spec.a) + &qss_extra) / &f,
                    qrs: qr(2 * spec.a) / &f,
                    lr: qr(spec.c) / &f,
                    ls: (qr(spec.c + spec.d) + &ls_extra) / &f,
                    c0: qr(spec.e) / &f,
                };
                if let Some((al, be, k)) = lin {
                    kernel.lr += qr(be);
                    kernel.ls += qr(be + al);
                    kernel.c0 += qr(k);
                }
                Piece {
                    kernel,
                    lam_r: spec.sign_n,
                    lam_s: spec.sign_n ^ spec.sign_m,
                    sigma: sigma_extra,
                    from_extra,
                    tag: if from_extra { "wedge, extra" } else { "wedge" }.to_string(),
                }
            };
            pieces.push(make(None, false, 1));
            if let Some(x) = &spec.extra {
                pieces.push(make(Some((x.alpha, x.beta, x.k)), true, x.eps));
            }
        }
    }
    Ok(pieces)
}

// ---------------------------------------------------------------------------
// Pairing and read-off
// ---------------------------------------------------------------------------

/// Read a HeckeTerm off a positive piece and its reflection partner.
fn read_off(pos: &Piece, partner: &Piece) -> Result<HeckeTerm> {
    let k = &pos.kernel;
    let two_qrr = qr(2) * &k.qrr;
    let two_qss = qr(2) * &k.qss;
    let t = rat_gcd(&[&two_qrr, &k.qrs, &two_qss]).ok_or_else(|| {
        Error::UnsupportedShape("kernel has no quadratic part".into())
    })?;
    let to_int = |v: QRat, what: &str| -> Result<i64> {
        if !v.is_integer() {
            return Err(Error::UnsupportedShape(format!(
                "transformed exponent is not integral: {what} = {v}"
            )));
        }
        v.to_integer().to_i64().ok_or_else(|| {
            Error::UnsupportedShape(format!("{what} out of range"))
        })
    };
    let a = to_int(&two_qrr / &t, "a")?;
    let b = to_int(&k.qrs / &t, "b")?;
    let c = to_int(&two_qss / &t, "c")?;
    let params = HeckeParams::new(a, b, c)
        .map_err(|e| Error::UnsupportedShape(format!("invalid (a,b,c): {e}")))?;
    let nome = Nome::try_new(Monomial::new(QRat::one(), t.clone()))
        .map_err(|_| Error::UnsupportedShape(format!("invalid nome exponent {t}")))?;
    let xi = &k.lr + &t * qr(a) / qr(2);
    let upsilon = &k.ls + &t * qr(c) / qr(2);
    if k.c0.is_negative() {
        return Err(Error::UnsupportedShape(format!(
            "negative prefactor exponent {}",
            k.c0
        )));
    }
    let cx = if pos.lam_r { qr(1) } else { qr(-1) };
    let cy = if pos.lam_s { qr(1) } else { qr(-1) };
    // the reflected partner enters with sign sigma * (-1)^{lam_r + lam_s}
    let partner_sign = if pos.lam_r ^ pos.lam_s {
        -partner.sigma
    } else {
        partner.sigma
    };
    let kind = if partner_sign == pos.sigma {
        HeckeKind::TypeII
    } else {
        HeckeKind::TypeI
    };
    let call = HeckeCall::new(
        params,
        Monomial::new(cx, xi),
        Monomial::new(cy, upsilon),
        nome,
        kind,
    )
    .map_err(|e| Error::UnsupportedShape(format!("invalid call: {e}")))?;
    Ok(HeckeTerm {
        prefactor: Monomial::new(qr(pos.sigma as i64), k.c0.clone()),
        call,
    })
}

/// Pair pieces by reflection and emit one term per pair. Pieces pair first
/// within the base set (reading from the smaller prefactor exponent), then
/// within the extra set (reading from the larger), then across; this is the
/// orientation that reproduces the worked examples.
fn pair_and_emit(pieces: &[Piece]) -> Result<Vec<HeckeTerm>> {
    let n = pieces.len();
    let mut used = vec![false; n];
    let mut terms = Vec::new();
    let matches = |i: usize, j: usize| -> bool {
        pieces[i].lam_r == pieces[j].lam_r
            && pieces[i].lam_s == pieces[j].lam_s
            && pieces[i].kernel.reflect() == pieces[j].kernel
    };
    // phase 1: base-base, read from the smaller c0
    // phase 2: extra-extra, read from the larger c0
    // phase 3: base-extra, read from the base piece
    for phase in 0..3 {
        for i in 0..n {
            if used[i] {
                continue;
            }
            for j in 0..n {
                if i == j || used[j] || used[i] {
                    continue;
                }
                let ok = match phase {
                    0 => !pieces[i].from_extra && !pieces[j].from_extra,
                    1 => pieces[i].from_extra && pieces[j].from_extra,
                    _ => pieces[i].from_extra != pieces[j].from_extra,
                };
                if !ok || !matches(i, j) {
                    continue;
                }
                let (pos, partner) = match phase {
                    0 => {
                        if pieces[i].kernel.c0 <= pieces[j].kernel.c0 {
                            (i, j)
                        } else {
                            (j, i)
                        }
                    }
                    1 => {
                        if pieces[i].kernel.c0 >= pieces[j].kernel.c0 {
                            (i, j)
                        } else {
                            (j, i)
                        }
                    }
                    _ => {
                        if pieces[i].from_extra {
                            (j, i)
                        } else {
                            (i, j)
                        }
                    }
                };
                terms.push(read_off(&pieces[pos], &pieces[partner])?);
                used[i] = true;
                used[j] = true;
            }
        }
    }
    if let Some(i) = (0..n).find(|&i| !used[i]) {
        return Err(Error::PairingFailure(pieces[i].tag.clone()));
    }
    Ok(terms)
}

/// Decompose a triangular sum into f/g terms and verify the result
/// numerically to `order` (the residual of the returned result is the
/// difference, which must be the zero series).
pub fn decompose(spec: &TriangularSumSpec, order: &QExp) -> Result<DecompositionResult> {
    let pieces = build_pieces(spec)?;
    let terms = pair_and_emit(&pieces)?;
    let direct = eval_triangular_sum(spec, order)?;
    let mut total = QSeries::zero(order.clone());
    for term in &terms {
        total = total.add(&term.eval(order)?);
    }
    Ok(DecompositionResult {
        input: spec.clone(),
        terms,
        residual: total.sub(&direct),
    })
}

/// Evaluate a term list against the direct enumeration of its spec,
/// reporting the first mismatching exponent if any.
pub fn verify_terms(
    spec: &TriangularSumSpec,
    terms: &[HeckeTerm],
    order: &QExp,
) -> Result<Comparison> {
    let direct = eval_triangular_sum(spec, order)?;
    let mut total = QSeries::zero(order.clone());
    for term in terms {
        total = total.add(&term.eval(order)?);
    }
    Ok(Comparison::of(format!("decomposition of [{spec}]"), &total, &direct, order))
}

/// Re-verify a decomposition result at a (possibly different) order.
pub fn verify_decomposition(result: &DecompositionResult, order: &QExp) -> Result<Comparison> {
    verify_terms(&result.input, &result.terms, order)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn term_set(spec_text: &str, order: i64) -> Vec<String> {
        let spec = TriangularSumSpec::parse(spec_text).unwrap();
        let result = decompose(&spec, &qe(order)).unwrap();
        assert!(
            result.residual.is_zero(),
            "residual nonzero for {spec_text}: {}",
            result.residual
        );
        let mut names: Vec<String> = result.terms.iter().map(|t| t.to_string()).collect();
        names.sort();
        names
    }

    fn sorted(mut v: Vec<&str>) -> Vec<String> {
        v.sort();
        v.into_iter().map(String::from).collect()
    }

    #[test]
    fn th11_term_set() {
        assert_eq!(
            term_set("range=abs_le_n; exp=(1,1,0,0,0)/1; sign_m; extra=+1,0,2,1", 40),
            sorted(vec![
                "g(1,0,1; q^2, q^2; q^4)",
                "q*g(1,0,1; q^4, q^4; q^4)",
            ])
        );
    }

    #[test]
    fn th12_term_set() {
        assert_eq!(
            term_set("range=abs_le_n; exp=(1,1,0,0,0)/1; sign_m; extra=-1,0,2,1", 40),
            sorted(vec![
                "f(1,0,1; q^2, q^2; q^4)",
                "q*f(1,0,1; q^4, q^4; q^4)",
            ])
        );
    }

    #[test]
    fn th21_term_set() {
        assert_eq!(
            term_set(
                "range=abs_le_half_n; exp=(1,-2,0,0,0)/1; sign_m; extra=+1,0,2,1",
                40
            ),
            sorted(vec![
                "q*g(1,3,1; q^6, q^6; q^4)",
                "g(1,3,1; q^2, q^2; q^4)",
                "q^4*g(1,3,1; q^10, q^10; q^4)",
                "q^9*g(1,3,1; q^14, q^14; q^4)",
            ])
        );
    }

    #[test]
    fn th22_term_set() {
        assert_eq!(
            term_set(
                "range=abs_le_half_n; exp=(1,-2,0,0,0)/1; sign_m; extra=-1,0,2,1",
                40
            ),
            sorted(vec![
                "q*g(1,3,1; q^6, q^6; q^4)",
                "f(1,3,1; q^2, q^2; q^4)",
                "q^4*f(1,3,1; q^10, q^10; q^4)",
                "-q^9*g(1,3,1; q^14, q^14; q^4)",
            ])
        );
    }

    #[test]
    fn liu111a_term_set() {
        assert_eq!(
            term_set("range=abs_le_n; exp=(1,-1,1,0,0)/1; sign_n; sign_m", 40),
            sorted(vec!["f(0,1,0; -q, -q; q^4)"])
        );
    }

    #[test]
    fn liu111b_term_set() {
        assert_eq!(
            term_set(
                "range=abs_le_n; exp=(2,-1,1,0,0)/1; sign_m; extra=-1,0,2,1",
                40
            ),
            sorted(vec![
                "f(1,3,1; q^2, q^2; q^2)",
                "q^3*f(1,3,1; q^6, q^6; q^2)",
            ])
        );
    }

    #[test]
    fn liu111c_term_set() {
        assert_eq!(
            term_set(
                "range=abs_le_n; exp=(3,-2,1,0,0)/2; sign_m; extra=-1,0,2,1",
                40
            ),
            sorted(vec![
                "f(1,5,1; q, q; q)",
                "q^2*f(1,5,1; q^4, q^4; q)",
            ])
        );
    }

    #[test]
    fn liu46_term_set() {
        assert_eq!(
            term_set(
                "range=abs_le_n; exp=(3,-1,1,0,0)/1; sign_n; sign_m; extra=-1,0,4,2",
                40
            ),
            sorted(vec![
                "g(1,2,1; -q^3, -q^3; q^4)",
                "-q^4*g(1,2,1; -q^9, -q^9; q^4)",
            ])
        );
    }

    #[test]
    fn liu48_and_liu410_term_sets() {
        assert_eq!(
            term_set(
                "range=zero_to_n; exp=(2,-1,1,0,0)/1; tri_m; extra=-1,0,6,6",
                40
            ),
            sorted(vec!["f(4,4,3; -q^3, -q^2; q)"])
        );
        assert_eq!(
            term_set(
                "range=zero_to_n; exp=(2,-1,1,0,0)/1; tri_m; sign_n; extra=-1,0,6,6",
                40
            ),
            sorted(vec!["f(4,4,3; q^3, q^2; q)"])
        );
    }

    #[test]
    fn verify_reports_corruption() {
        let spec = TriangularSumSpec::parse(
            "range=abs_le_n; exp=(1,1,0,0,0)/1; sign_m; extra=-1,0,2,1",
        )
        .unwrap();
        let result = decompose(&spec, &qe(30)).unwrap();
        let good = verify_terms(&spec, &result.terms, &qe(30)).unwrap();
        assert!(good.pass());

        // flip the sign of one term's prefactor
        let mut corrupted = result.terms.clone();
        corrupted[0].prefactor = corrupted[0].prefactor.neg();
        let bad = verify_terms(&spec, &corrupted, &qe(30)).unwrap();
        assert!(!bad.pass());
        let (e, _, _) = bad.mismatch.unwrap();
        // the lowest differing exponent of 2*f(1,0,1; q^2, q^2; q^4) is 0
        assert_eq!(e, qe(0));
    }

    #[test]
    fn refuses_unsupported_shapes() {
        // n_start = 1 is not a full triangle
        let spec =
            TriangularSumSpec::parse("range=abs_le_n; exp=(1,1,0,0,0)/1; sign_m; nstart=1")
                .unwrap();
        assert!(matches!(
            decompose(&spec, &qe(10)),
            Err(Error::UnsupportedShape(_))
        ));

        // a kernel that lands on a negative b: A n^2 + B m^2 with B > A
        let spec = TriangularSumSpec::parse("range=abs_le_n; exp=(1,2,0,0,0)/1; sign_m").unwrap();
        let r = decompose(&spec, &qe(10));
        assert!(r.is_err(), "expected refusal, got {r:?}");
    }
}
