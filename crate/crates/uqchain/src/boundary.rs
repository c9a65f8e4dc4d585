//! Diagonal K-matrices, the reflection equations they solve, and the
//! boundary terms they induce on the open chain.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::braid::BraidPair;
use crate::chains::{n_down, n_up};
use crate::error::{Error, Result};
use crate::linalg::{diag, identity, kron, partial_trace_last, r, rel_residual, Mat, C64};
use crate::report::{CheckReport, RelationReport};
use crate::scalars::{DeformParams, ToleranceConfig};
use crate::spectral::{r21, r_matrix, rcheck_laurent, sample_points, CrossingData};
use crate::uqsl21::scalar_part;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Minus,
    Plus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Trivial,
    A,
    B,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Trivial => "trivial",
            Family::A => "a",
            Family::B => "b",
        })
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "trivial" | "0" | "id" => Ok(Family::Trivial),
            "a" => Ok(Family::A),
            "b" => Ok(Family::B),
            _ => Err(Error::Config(format!("unknown K-matrix family `{s}` (expected trivial, a or b)"))),
        }
    }
}

/// A diagonal K-matrix solution: side, family and its free parameter C
/// (ignored for the trivial family).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KMatrixSpec {
    pub side: Side,
    pub family: Family,
    #[serde(skip)]
    pub c: C64,
}

impl KMatrixSpec {
    pub fn minus(family: Family, c: C64) -> Self {
        KMatrixSpec { side: Side::Minus, family, c }
    }

    pub fn plus(family: Family, c: C64) -> Self {
        KMatrixSpec { side: Side::Plus, family, c }
    }

    /// A plus-side solution specified by the λ-free parameter C′₊ (C₊ = qλ²C′₊).
    pub fn plus_from_prime(family: Family, c_prime: C64, p: &DeformParams) -> Self {
        Self::plus(family, c_prime * p.q * p.lambda * p.lambda)
    }
}

fn pole_tol() -> f64 {
    ToleranceConfig::default().genericity_tol
}

fn check_poles(family: Family, c: C64, q: C64) -> Result<()> {
    let bad = match family {
        Family::Trivial => false,
        Family::A => (r(1.0) + c).norm() <= pole_tol() || (r(1.0) + q * q * c).norm() <= pole_tol(),
        Family::B => (r(1.0) + c).norm() <= pole_tol(),
    };
    if bad || !c.is_finite() {
        Err(Error::PoleAtC(format!("{c}")))
    } else {
        Ok(())
    }
}

/// A diagonal 4×4 matrix whose entries are Laurent polynomials in z = e^u of
/// degree ≤ 2; coeffs[i][k+2] multiplies z^k on entry i.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagLaurent {
    pub coeffs: [[C64; 5]; 4],
}

impl DiagLaurent {
    /// n-th u-derivative evaluated at u.
    pub fn derivative(&self, u: C64, n: u32) -> Mat {
        let z = u.exp();
        let d: Vec<C64> = self
            .coeffs
            .iter()
            .map(|row| {
                (-2i32..=2)
                    .map(|k| row[(k + 2) as usize] * z.powi(k) * (k as f64).powi(n as i32))
                    .sum()
            })
            .collect();
        diag(&d)
    }

    pub fn eval(&self, u: C64) -> Mat {
        self.derivative(u, 0)
    }

    /// Value and first two derivatives at u = 0.
    pub fn jet(&self) -> KJet {
        let z = r(0.0);
        KJet { k0: self.eval(z), k1: self.derivative(z, 1), k2: self.derivative(z, 2) }
    }
}

/// Laurent data of K⁻(u) for the given family.
pub fn k_minus_laurent(spec: &KMatrixSpec, p: &DeformParams) -> Result<DiagLaurent> {
    if spec.side != Side::Minus {
        return Err(Error::Config("k_minus needs a minus-side K-matrix spec".into()));
    }
    minus_laurent(spec.family, spec.c, p.q)
}

fn minus_laurent(family: Family, c: C64, q: C64) -> Result<DiagLaurent> {
    check_poles(family, c, q)?;
    let o = r(0.0);
    let one = r(1.0);
    let q2 = q * q;
    let coeffs = match family {
        Family::Trivial => [[o, o, one, o, o]; 4],
        Family::A => {
            let n = one / ((one + c) * (one + q2 * c));
            // (z⁻¹+C)(z⁻¹+q²C), (z+C)(z⁻¹+q²C) twice, (z+C)(z+q²C)
            let first = [n, n * (one + q2) * c, n * q2 * c * c, o, o];
            let mid = [o, n * c, n * (one + q2 * c * c), n * q2 * c, o];
            let last = [o, o, n * q2 * c * c, n * (one + q2) * c, n];
            [first, mid, mid, last]
        }
        Family::B => {
            let n = one / (one + c);
            let lo = [o, n, n * c, o, o];
            let hi = [o, o, n * c, n, o];
            [lo, lo, hi, hi]
        }
    };
    Ok(DiagLaurent { coeffs })
}

/// K⁺(u) = K⁻(−u−ρ)^t·M as Laurent data: z^k ↦ q^{k}·z^{−k}, then times M.
pub fn k_plus_laurent(spec: &KMatrixSpec, p: &DeformParams, cd: &CrossingData) -> Result<DiagLaurent> {
    if spec.side != Side::Plus {
        return Err(Error::Config("k_plus needs a plus-side K-matrix spec".into()));
    }
    let km = minus_laurent(spec.family, spec.c, p.q)?;
    let mut coeffs = [[r(0.0); 5]; 4];
    for i in 0..4 {
        let mi = cd.m[(i, i)];
        for k in -2i32..=2 {
            // e^{k(−u−ρ)} = q^{−k} z^{−k}
            coeffs[i][(-k + 2) as usize] = km.coeffs[i][(k + 2) as usize] * p.q.powi(-k) * mi;
        }
    }
    Ok(DiagLaurent { coeffs })
}

pub fn k_minus(spec: &KMatrixSpec, u: C64, p: &DeformParams) -> Result<Mat> {
    Ok(k_minus_laurent(spec, p)?.eval(u))
}

pub fn k_plus(spec: &KMatrixSpec, u: C64, p: &DeformParams, cd: &CrossingData) -> Result<Mat> {
    Ok(k_plus_laurent(spec, p, cd)?.eval(u))
}

/// R₁₂(u−v)K₁⁻(u)R₂₁(u+v)K₂⁻(v) = K₂⁻(v)R₁₂(u+v)K₁⁻(u)R₂₁(u−v).
pub fn reflection_residual_minus(
    spec: &KMatrixSpec,
    u: C64,
    v: C64,
    pair: &BraidPair,
    p: &DeformParams,
    tol: &ToleranceConfig,
) -> Result<CheckReport> {
    let id = identity(4);
    let k1 = kron(&k_minus(spec, u, p)?, &id);
    let k2 = kron(&id, &k_minus(spec, v, p)?);
    let lhs = r_matrix(u - v, pair, p)? * &k1 * r21(u + v, pair, p)? * &k2;
    let rhs = &k2 * r_matrix(u + v, pair, p)? * &k1 * r21(u - v, pair, p)?;
    Ok(CheckReport::new(
        format!("RE- family {} at u={u}, v={v}", spec.family),
        rel_residual(&lhs, &rhs),
        tol.identity_tol,
    ))
}

/// R₁₂(−u+v)K₁⁺(u)^{t₁}M₁⁻¹R₂₁(−u−v−2ρ)M₁K₂⁺(v)^{t₂}
///   = K₂⁺(v)^{t₂}M₁R₁₂(−u−v−2ρ)M₁⁻¹K₁⁺(u)^{t₁}R₂₁(−u+v).
pub fn reflection_residual_plus(
    spec: &KMatrixSpec,
    u: C64,
    v: C64,
    pair: &BraidPair,
    p: &DeformParams,
    cd: &CrossingData,
    tol: &ToleranceConfig,
) -> Result<CheckReport> {
    let id = identity(4);
    // K⁺ is diagonal, so the partial transposes act trivially
    let k1 = kron(&k_plus(spec, u, p, cd)?, &id);
    let k2 = kron(&id, &k_plus(spec, v, p, cd)?);
    let m1 = kron(&cd.m, &id);
    let m1i = kron(&cd.m_inv(), &id);
    let w = -u - v - cd.rho * 2.0;
    let lhs = r_matrix(v - u, pair, p)? * &k1 * &m1i * r21(w, pair, p)? * &m1 * &k2;
    let rhs = &k2 * &m1 * r_matrix(w, pair, p)? * &m1i * &k1 * r21(v - u, pair, p)?;
    Ok(CheckReport::new(
        format!("RE+ family {} at u={u}, v={v}", spec.family),
        rel_residual(&lhs, &rhs),
        tol.identity_tol,
    ))
}

/// Both reflection equations at `n` seeded (u, v) samples.
pub fn reflection_suite(
    minus: &KMatrixSpec,
    plus: &KMatrixSpec,
    pair: &BraidPair,
    p: &DeformParams,
    tol: &ToleranceConfig,
    n: usize,
) -> Result<RelationReport> {
    let cd = CrossingData::new(p);
    let us = sample_points(tol.seed.wrapping_add(2), n);
    let vs = sample_points(tol.seed.wrapping_add(3), n);
    let mut worst = (0f64, 0f64);
    for (&u, &v) in us.iter().zip(&vs) {
        worst.0 = worst.0.max(reflection_residual_minus(minus, u, v, pair, p, tol)?.residual);
        worst.1 = worst.1.max(reflection_residual_plus(plus, u, v, pair, p, &cd, tol)?.residual);
    }
    let mut rep = RelationReport::new();
    rep.add(format!("RE- family {} C={} (max over samples)", minus.family, minus.c), worst.0, tol.identity_tol);
    rep.add(format!("RE+ family {} C={} (max over samples)", plus.family, plus.c), worst.1, tol.identity_tol);
    rep.add(format!("K-(0) = Id (family {})", minus.family), rel_residual(&k_minus(minus, r(0.0), p)?, &identity(4)), tol.identity_tol);
    let tr = crate::linalg::trace(&k_plus(plus, r(0.0), p, &cd)?);
    rep.push(CheckReport::new(format!("tr K+(0) = 0 (family {})", plus.family), tr.norm(), tol.identity_tol).with_value(tr));
    Ok(rep)
}

/// Closed-form boundary terms (B₁, B_L) in number operators. B₁ depends on C₋,
/// B_L on the λ-free parameter C′₊.
pub fn boundary_terms(
    fam_minus: Family,
    c_minus: C64,
    fam_plus: Family,
    c_plus_prime: C64,
    p: &DeformParams,
) -> Result<(Mat, Mat)> {
    check_poles(fam_minus, c_minus, p.q)?;
    check_poles(fam_plus, c_plus_prime, p.q)?;
    let one = r(1.0);
    let q2 = p.q * p.q;
    let (nu, nd) = (n_up(), n_down());
    let nn = &nu * &nd;
    let ns = &nu + &nd;
    let b1 = match fam_minus {
        Family::Trivial => Mat::zeros(4, 4),
        Family::A => {
            let c = c_minus;
            -(&nn * ((q2 - one) * c) + &ns * (one + c)) / ((one + c) * (one + q2 * c))
        }
        Family::B => -&nd / (one + c_minus),
    };
    let bl = match fam_plus {
        Family::Trivial => Mat::zeros(4, 4),
        Family::A => {
            let c = c_plus_prime;
            (&nn * ((one - q2) * c) + &ns * (one + q2 * c)) / ((one + c) * (one + q2 * c))
        }
        Family::B => &nd / (one + c_plus_prime),
    };
    Ok((b1, bl))
}

/// K(0), K′(0), K″(0).
#[derive(Debug, Clone, PartialEq)]
pub struct KJet {
    pub k0: Mat,
    pub k1: Mat,
    pub k2: Mat,
}

impl KJet {
    /// Jet of f(u)·K(u) for a scalar f with f(0), f′(0), f″(0) given.
    pub fn scaled(&self, f: [C64; 3]) -> KJet {
        KJet {
            k0: &self.k0 * f[0],
            k1: &self.k1 * f[0] + &self.k0 * f[1],
            k2: &self.k2 * f[0] + &self.k1 * (f[1] * 2.0) + &self.k0 * f[2],
        }
    }
}

/// Boundary terms from the transfer-matrix derivatives:
/// B₁ = ½K⁻′(0) and B_L = [d² tr₀K⁺₀R̆²_{L0}] / [4 d tr₀K⁺₀R̆²_{L0}] at u = 0.
/// Also returns the deviation of the denominator from a multiple of the identity.
pub fn boundary_from_transfer(
    minus: &KJet,
    plus: &KJet,
    pair: &BraidPair,
    p: &DeformParams,
) -> Result<(Mat, Mat, f64)> {
    let lau = rcheck_laurent(pair, p)?;
    let z = r(0.0);
    let h = lau.derivative(z);
    let r2 = lau.second_derivative(z);
    let id = identity(4);
    let kp0 = kron(&id, &plus.k0);
    let kp1 = kron(&id, &plus.k1);
    let kp2 = kron(&id, &plus.k2);
    let g1 = &kp1 + &kp0 * &h * r(2.0);
    let g2 = &kp2 + &kp1 * &h * r(4.0) + &kp0 * (&r2 * r(2.0) + &h * &h * r(2.0));
    let (den, dev) = scalar_part(&partial_trace_last(&g1, 4));
    if den.norm() <= pole_tol() {
        return Err(Error::PoleAtC("d/du tr0 K+ Rc^2 vanishes".into()));
    }
    let bl = partial_trace_last(&g2, 4) / (den * 4.0);
    Ok((&minus.k1 * r(0.5), bl, dev))
}

/// Convenience: transfer-matrix boundary terms for two K specs.
pub fn boundary_from_specs(
    minus: &KMatrixSpec,
    plus: &KMatrixSpec,
    pair: &BraidPair,
    p: &DeformParams,
) -> Result<(Mat, Mat, f64)> {
    let cd = CrossingData::new(p);
    let jm = k_minus_laurent(minus, p)?.jet();
    let jp = k_plus_laurent(plus, p, &cd)?.jet();
    boundary_from_transfer(&jm, &jp, pair, p)
}

/// Closed forms against the transfer-matrix construction (mod identity), and
/// invariance of both under K ↦ (1 + u/2)K.
pub fn boundary_consistency(
    fam_minus: Family,
    c_minus: C64,
    fam_plus: Family,
    c_plus_prime: C64,
    pair: &BraidPair,
    p: &DeformParams,
    tol: &ToleranceConfig,
) -> Result<RelationReport> {
    let t = tol.identity_tol;
    let mut rep = RelationReport::new();
    let (b1, bl) = boundary_terms(fam_minus, c_minus, fam_plus, c_plus_prime, p)?;
    let minus = KMatrixSpec::minus(fam_minus, c_minus);
    let plus = KMatrixSpec::plus_from_prime(fam_plus, c_plus_prime, p);
    let (t1, tl, dev) = boundary_from_specs(&minus, &plus, pair, p)?;
    rep.add("d/du tr0 K+ Rc^2 is scalar", dev, t);
    let (res1, off1) = crate::linalg::compare_mod_identity(&t1, &b1);
    rep.push(CheckReport::new(format!("B1 closed form = K-'(0)/2 mod Id (family {fam_minus})"), res1, t).with_value(off1));
    let (resl, offl) = crate::linalg::compare_mod_identity(&tl, &bl);
    rep.push(CheckReport::new(format!("BL closed form = transfer ratio mod Id (family {fam_plus})"), resl, t).with_value(offl));

    // arbitrary scalar factor f(u) = 1 + u/2
    let f = [r(1.0), r(0.5), r(0.0)];
    let cd = CrossingData::new(p);
    let jm = k_minus_laurent(&minus, p)?.jet().scaled(f);
    let jp = k_plus_laurent(&plus, p, &cd)?.jet().scaled(f);
    let (s1, sl, _) = boundary_from_transfer(&jm, &jp, pair, p)?;
    rep.add("B1 invariant under K -> (1+u/2)K mod Id", crate::linalg::compare_mod_identity(&s1, &t1).0, t);
    rep.add("BL invariant under K -> (1+u/2)K mod Id", crate::linalg::compare_mod_identity(&sl, &tl).0, t);
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::braid::braid_pair;
    use crate::linalg::{c, fro, trace};
    use crate::scalars::derive_params;
    use crate::uqsl21::build_rep;

    fn setup(q: C64, mu: f64, om: i32) -> (BraidPair, DeformParams) {
        let p = derive_params(q, r(mu), om, &ToleranceConfig::default()).unwrap();
        (braid_pair(&build_rep(&p), &p).unwrap(), p)
    }

    const CS: [C64; 2] = [C64::new(0.5, 0.0), C64::new(-2.3, 0.4)];

    #[test]
    fn identity_at_zero_and_printed_entries() {
        let (_, p) = setup(r(1.2), 0.3, 1);
        for fam in [Family::Trivial, Family::A, Family::B] {
            for cc in CS {
                let k = k_minus(&KMatrixSpec::minus(fam, cc), r(0.0), &p).unwrap();
                assert!(rel_residual(&k, &identity(4)) < 1e-14);
            }
        }
        let u = c(0.3, 0.1);
        let (a, b) = ((-u).exp(), u.exp());
        let cc = r(0.5);
        let q2 = p.q * p.q;
        let ka = k_minus(&KMatrixSpec::minus(Family::A, cc), u, &p).unwrap();
        let want = (a + cc) * (a + q2 * cc) / ((1.0 + cc) * (1.0 + q2 * cc));
        assert!((ka[(0, 0)] - want).norm() < 1e-14);
        let want = (b + cc) * (a + q2 * cc) / ((1.0 + cc) * (1.0 + q2 * cc));
        assert!((ka[(1, 1)] - want).norm() < 1e-14);
        let kb = k_minus(&KMatrixSpec::minus(Family::B, cc), u, &p).unwrap();
        let want = diag(&[a + cc, a + cc, b + cc, b + cc]) / (1.0 + cc);
        assert!(rel_residual(&kb, &want) < 1e-14);
    }

    #[test]
    fn k_plus_composition() {
        let (_, p) = setup(r(1.2), 0.3, 1);
        let cd = CrossingData::new(&p);
        let u = c(-0.2, 0.4);
        let triv = k_plus(&KMatrixSpec::plus(Family::Trivial, r(0.0)), u, &p, &cd).unwrap();
        assert_eq!(triv, cd.m);
        for fam in [Family::A, Family::B] {
            for cc in CS {
                let spec = KMatrixSpec::plus(fam, cc);
                let direct = k_minus(&KMatrixSpec::minus(fam, cc), -u - cd.rho, &p).unwrap().transpose() * &cd.m;
                assert!(rel_residual(&k_plus(&spec, u, &p, &cd).unwrap(), &direct) < 1e-13);
                assert!(trace(&k_plus(&spec, r(0.0), &p, &cd).unwrap()).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn poles_are_rejected() {
        let (_, p) = setup(r(1.2), 0.3, 1);
        let z = r(0.0);
        assert!(matches!(k_minus(&KMatrixSpec::minus(Family::A, r(-1.0)), z, &p), Err(Error::PoleAtC(_))));
        let c2 = -(p.q * p.q).inv();
        assert!(matches!(k_minus(&KMatrixSpec::minus(Family::A, c2), z, &p), Err(Error::PoleAtC(_))));
        assert!(k_minus(&KMatrixSpec::minus(Family::B, c2), z, &p).is_ok());
        assert!(matches!(k_minus(&KMatrixSpec::minus(Family::B, r(-1.0)), z, &p), Err(Error::PoleAtC(_))));
        assert!(matches!(k_minus(&KMatrixSpec::plus(Family::B, r(0.5)), z, &p), Err(Error::Config(_))));
    }

    #[test]
    fn reflection_equations_hold() {
        let tol = ToleranceConfig::default();
        for om in [1, -1] {
            let (pair, p) = setup(r(1.2), 0.3, om);
            for fam in [Family::Trivial, Family::A, Family::B] {
                for cc in CS {
                    let rep = reflection_suite(&KMatrixSpec::minus(fam, cc), &KMatrixSpec::plus(fam, cc), &pair, &p, &tol, 20).unwrap();
                    assert!(rep.all_pass(), "{:?}", rep.failures());
                    assert!(rep.max_residual() <= 1e-9);
                }
            }
        }
    }

    #[test]
    fn laurent_derivatives_match_finite_differences() {
        let (_, p) = setup(c(0.7, 0.2), -0.45, 1);
        let cd = CrossingData::new(&p);
        let kl = k_plus_laurent(&KMatrixSpec::plus(Family::A, CS[1]), &p, &cd).unwrap();
        let h = 1e-5;
        let u = c(0.1, 0.05);
        let fd = (kl.eval(u + h) - kl.eval(u - h)) / r(2.0 * h);
        assert!(rel_residual(&fd, &kl.derivative(u, 1)) < 1e-8);
        let fd2 = (kl.derivative(u + h, 1) - kl.derivative(u - h, 1)) / r(2.0 * h);
        assert!(rel_residual(&fd2, &kl.derivative(u, 2)) < 1e-8);
    }

    #[test]
    fn closed_forms_examples() {
        let (_, p) = setup(r(1.2), 0.3, 1);
        let (b1, bl) = boundary_terms(Family::Trivial, r(0.0), Family::Trivial, r(0.0), &p).unwrap();
        assert_eq!(fro(&b1) + fro(&bl), 0.0);
        let cm = r(0.5);
        let (b1, _) = boundary_terms(Family::B, cm, Family::Trivial, r(0.0), &p).unwrap();
        assert!(rel_residual(&b1, &(-n_down() / (1.0 + cm))) < 1e-15);
        let (_, bl) = boundary_terms(Family::Trivial, r(0.0), Family::A, cm, &p).unwrap();
        // n↑n↓ = E11; n↑ + n↓ = 2E11 + E22 + E33
        let q2 = p.q * p.q;
        let den = (1.0 + cm) * (1.0 + q2 * cm);
        let e11 = ((1.0 - q2) * cm + 2.0 * (1.0 + q2 * cm)) / den;
        let e22 = (1.0 + q2 * cm) / den;
        assert!(rel_residual(&bl, &diag(&[e11, e22, e22, r(0.0)])) < 1e-14);
    }

    #[test]
    fn closed_forms_match_transfer_construction() {
        let tol = ToleranceConfig::default();
        for (q, om) in [(r(1.2), 1), (r(1.2), -1), (c(0.7, 0.2), 1)] {
            let (pair, p) = setup(q, 0.3, om);
            for fm in [Family::Trivial, Family::A, Family::B] {
                for fp in [Family::Trivial, Family::A, Family::B] {
                    for cc in CS {
                        let rep = boundary_consistency(fm, cc, fp, cc, &pair, &p, &tol).unwrap();
                        assert!(rep.all_pass(), "{fm} {fp} {cc}: {:?}", rep.failures());
                    }
                }
            }
        }
    }

    #[test]
    fn family_tokens() {
        assert_eq!("A".parse::<Family>().unwrap(), Family::A);
        assert_eq!("trivial".parse::<Family>().unwrap(), Family::Trivial);
        assert!("c".parse::<Family>().is_err());
    }
}
