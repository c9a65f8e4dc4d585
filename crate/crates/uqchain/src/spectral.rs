//! The Baxterised R̆(u) = Id + ((e^u−1)b + (e^{−u}−1)b⁻¹)/x, R(u) = P·R̆(u),
//! and the Yang–Baxter, inversion, PT and crossing checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::braid::{braid_roots, BraidPair};
use crate::coproduct::embed;
use crate::error::{Error, Result};
use crate::linalg::{
    c, diag, fro, identity, inverse, kron, partial_transpose, r, rel_residual, swap, Mat, C64,
};
use crate::report::{CheckReport, RelationReport};
use crate::scalars::{DeformParams, ToleranceConfig};
use crate::uqsl21::scalar_part;

/// Seeded sample points u with Re u, Im u uniform in [−1, 1].
pub fn sample_points(seed: u64, n: usize) -> Vec<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| c(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0))).collect()
}

/// A Laurent polynomial z⁻¹·A₋ + A₀ + z·A₊ in z = e^u.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralEvaluable {
    pub minus: Mat,
    pub zero: Mat,
    pub plus: Mat,
}

impl SpectralEvaluable {
    pub fn eval(&self, u: C64) -> Mat {
        let z = u.exp();
        &self.minus * z.inv() + &self.zero + &self.plus * z
    }

    /// d/du of the evaluation.
    pub fn derivative(&self, u: C64) -> Mat {
        let z = u.exp();
        &self.plus * z - &self.minus * z.inv()
    }

    /// d²/du² of the evaluation.
    pub fn second_derivative(&self, u: C64) -> Mat {
        let z = u.exp();
        &self.plus * z + &self.minus * z.inv()
    }
}

fn require_x(p: &DeformParams) -> Result<()> {
    if !p.x.is_finite() || p.x.norm() <= ToleranceConfig::default().genericity_tol {
        return Err(Error::DegenerateX);
    }
    Ok(())
}

/// Laurent form of R̆: z⁻¹: b⁻¹/x, z⁰: Id − (b + b⁻¹)/x, z¹: b/x.
pub fn rcheck_laurent(pair: &BraidPair, p: &DeformParams) -> Result<SpectralEvaluable> {
    require_x(p)?;
    let x = p.x;
    Ok(SpectralEvaluable {
        minus: &pair.binv / x,
        zero: identity(16) - (&pair.b + &pair.binv) / x,
        plus: &pair.b / x,
    })
}

/// R̆(u) evaluated directly from its defining formula.
pub fn rcheck(u: C64, pair: &BraidPair, p: &DeformParams) -> Result<Mat> {
    require_x(p)?;
    let one = r(1.0);
    Ok(identity(16) + (&pair.b * (u.exp() - one) + &pair.binv * ((-u).exp() - one)) / p.x)
}

/// R(u) = P·R̆(u).
pub fn r_matrix(u: C64, pair: &BraidPair, p: &DeformParams) -> Result<Mat> {
    Ok(swap(4) * rcheck(u, pair, p)?)
}

/// R₂₁(u) = P·R(u)·P.
pub fn r21(u: C64, pair: &BraidPair, p: &DeformParams) -> Result<Mat> {
    let pm = swap(4);
    Ok(&pm * r_matrix(u, pair, p)? * &pm)
}

/// ζ(u) = e^{−2u}(e^u−λ²)(e^u−λ⁻²)(e^u−q²λ²)(e^u−q⁻²λ⁻²)/x², so that
/// R̆(u)R̆(−u) = ζ(u)·Id and ζ(0) = 1.
pub fn zeta(u: C64, p: &DeformParams) -> Result<C64> {
    require_x(p)?;
    let z = u.exp();
    let l2 = p.lambda * p.lambda;
    let q2 = p.q * p.q;
    Ok((z - l2) * (z - l2.inv()) * (z - q2 * l2) * (z - (q2 * l2).inv()) / (z * z * p.x * p.x))
}

/// The alternative closed form with λ^{∓2} in the q-dependent factors.
pub fn zeta_printed(u: C64, p: &DeformParams) -> Result<C64> {
    require_x(p)?;
    let z = u.exp();
    let l2 = p.lambda * p.lambda;
    let q2 = p.q * p.q;
    Ok((z - l2.inv()) * (z - l2) * (z - q2 / l2) * (z - l2 / q2) / (z * z * p.x * p.x))
}

/// Eigenvalue of R̆(u) on the eigenspace of b with eigenvalue β.
fn rcheck_eigenvalue(u: C64, beta: C64, p: &DeformParams) -> C64 {
    let one = r(1.0);
    one + ((u.exp() - one) * beta + ((-u).exp() - one) / beta) / p.x
}

/// Inversion relation at `u`: the matrix identity, the per-eigenspace oracle
/// r_β(u)r_β(−u) for each root β of the cubic, and (informative) the
/// deviation of the alternative closed form.
pub fn inversion_check(u: C64, pair: &BraidPair, p: &DeformParams, tol: &ToleranceConfig) -> Result<RelationReport> {
    let t = tol.identity_tol;
    let mut rep = RelationReport::new();
    let z = zeta(u, p)?;
    let prod = rcheck(u, pair, p)? * rcheck(-u, pair, p)?;
    rep.push(CheckReport::new(format!("Rc(u)Rc(-u) = zeta(u) at u={u}"), rel_residual(&prod, &(identity(16) * z)), t).with_value(z));
    let oracle = braid_roots(p)
        .iter()
        .map(|&beta| (rcheck_eigenvalue(u, beta, p) * rcheck_eigenvalue(-u, beta, p) - z).norm())
        .fold(0.0, f64::max);
    rep.add(format!("zeta(u) = r_beta(u) r_beta(-u) on every eigenspace at u={u}"), oracle / 1f64.max(z.norm()), t);
    let zp = zeta_printed(u, p)?;
    rep.push(
        CheckReport::informative(format!("alternative zeta closed form deviation at u={u}"), (zp - z).norm() / z.norm(), t)
            .with_value(zp)
            .with_note("λ^{∓2} placement in the q-dependent factors gives ζ(0) ≠ 1"),
    );
    Ok(rep)
}

/// R̆₁₂(u)R̆₂₃(u+v)R̆₁₂(v) = R̆₂₃(v)R̆₁₂(u+v)R̆₂₃(u) at L = 3.
pub fn ybe_check(u: C64, v: C64, pair: &BraidPair, p: &DeformParams, tol: &ToleranceConfig) -> Result<CheckReport> {
    let ru = rcheck(u, pair, p)?;
    let rv = rcheck(v, pair, p)?;
    let ruv = rcheck(u + v, pair, p)?;
    let e = |m: &Mat, s| embed(m, s, 3).map(|c| c.mat);
    let lhs = e(&ru, 1)? * e(&ruv, 2)? * e(&rv, 1)?;
    let rhs = e(&rv, 2)? * e(&ruv, 1)? * e(&ru, 2)?;
    Ok(CheckReport::new(format!("YBE at u={u}, v={v}"), rel_residual(&lhs, &rhs), tol.identity_tol))
}

/// Far commutation R̆₁₂(u)R̆₃₄(v) = R̆₃₄(v)R̆₁₂(u) at L = 4.
pub fn far_commutation_check(u: C64, v: C64, pair: &BraidPair, p: &DeformParams, tol: &ToleranceConfig) -> Result<CheckReport> {
    let a = embed(&rcheck(u, pair, p)?, 1, 4)?.mat;
    let b = embed(&rcheck(v, pair, p)?, 3, 4)?.mat;
    Ok(CheckReport::new(format!("far commutation at u={u}, v={v}"), rel_residual(&(&a * &b), &(&b * &a)), tol.identity_tol))
}

/// [R̆(u), R̆(v)] = 0.
pub fn commutativity_check(u: C64, v: C64, pair: &BraidPair, p: &DeformParams, tol: &ToleranceConfig) -> Result<CheckReport> {
    let a = rcheck(u, pair, p)?;
    let b = rcheck(v, pair, p)?;
    let res = fro(&(&a * &b - &b * &a)) / 1f64.max(fro(&a) * fro(&b));
    Ok(CheckReport::new(format!("[Rc(u), Rc(v)] = 0 at u={u}, v={v}"), res, tol.identity_tol))
}

/// P R(u) P = R(u)^{t1 t2}.
pub fn pt_check(u: C64, pair: &BraidPair, p: &DeformParams, tol: &ToleranceConfig) -> Result<CheckReport> {
    let rm = r_matrix(u, pair, p)?;
    let lhs = r21(u, pair, p)?;
    Ok(CheckReport::new(format!("P R(u) P = R(u)^t1t2 at u={u}"), rel_residual(&lhs, &rm.transpose()), tol.identity_tol))
}

/// M = diag(1, −1, −q², q²) and ρ = ln q.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossingData {
    pub m: Mat,
    pub rho: C64,
}

impl CrossingData {
    pub fn new(p: &DeformParams) -> Self {
        let q2 = p.q * p.q;
        CrossingData { m: diag(&[r(1.0), r(-1.0), -q2, q2]), rho: p.rho() }
    }

    pub fn m_inv(&self) -> Mat {
        inverse(&self.m).expect("M is invertible")
    }
}

/// ξ(u) = −(q⁻¹e^u−1)(1−qe^{−u})(qe^u−1)(1−q⁻¹e^{−u})/x².
pub fn xi(u: C64, p: &DeformParams) -> Result<C64> {
    require_x(p)?;
    let (q, z) = (p.q, u.exp());
    let one = r(1.0);
    Ok(-(z / q - one) * (one - q / z) * (q * z - one) * (one - one / (q * z)) / (p.x * p.x))
}

/// Crossing unitarity R₁₂(u)^{t₁}M₁R₂₁(−u−2ρ)^{t₁}M₁⁻¹: the left side must be
/// scalar (gating); its value is compared to ξ(u+ρ) informatively.
pub fn crossing_check(
    u: C64,
    pair: &BraidPair,
    p: &DeformParams,
    cd: &CrossingData,
    tol: &ToleranceConfig,
) -> Result<RelationReport> {
    let id = identity(4);
    let m1 = kron(&cd.m, &id);
    let m1inv = kron(&cd.m_inv(), &id);
    let a = partial_transpose(&r_matrix(u, pair, p)?, 1, 4);
    let b = partial_transpose(&r21(-u - cd.rho * 2.0, pair, p)?, 1, 4);
    let lhs = a * &m1 * b * m1inv;
    let (value, dev) = scalar_part(&lhs);
    let mut rep = RelationReport::new();
    rep.push(CheckReport::new(format!("crossing left side is scalar at u={u}"), dev, tol.identity_tol).with_value(value));
    let want = xi(u + cd.rho, p)?;
    let ratio = value / want;
    rep.push(
        CheckReport::informative(format!("crossing scalar / xi(u+rho) at u={u}"), (ratio - r(1.0)).norm(), tol.identity_tol)
            .with_value(ratio),
    );
    Ok(rep)
}

/// The full seeded suite: YBE, far commutation, commutativity, inversion,
/// PT and crossing at `n` sample points each.
pub fn spectral_suite(pair: &BraidPair, p: &DeformParams, tol: &ToleranceConfig, n: usize) -> Result<RelationReport> {
    let mut rep = RelationReport::new();
    let us = sample_points(tol.seed, n);
    let vs = sample_points(tol.seed.wrapping_add(1), n);
    let cd = CrossingData::new(p);
    let r0 = rcheck(r(0.0), pair, p)?;
    rep.add("Rc(0) = Id", rel_residual(&r0, &identity(16)), tol.identity_tol);
    let lau = rcheck_laurent(pair, p)?;
    let mut worst = [0f64; 5];
    for (&u, &v) in us.iter().zip(&vs) {
        worst[0] = worst[0].max(rel_residual(&lau.eval(u), &rcheck(u, pair, p)?));
        worst[1] = worst[1].max(ybe_check(u, v, pair, p, tol)?.residual);
        worst[2] = worst[2].max(far_commutation_check(u, v, pair, p, tol)?.residual);
        worst[3] = worst[3].max(commutativity_check(u, v, pair, p, tol)?.residual);
        worst[4] = worst[4].max(pt_check(u, pair, p, tol)?.residual);
        rep.extend(inversion_check(u, pair, p, tol)?);
        rep.extend(crossing_check(u, pair, p, &cd, tol)?);
    }
    rep.add("Laurent evaluation = direct evaluation (max over samples)", worst[0], tol.identity_tol);
    rep.add("YBE at L=3 (max over samples)", worst[1], tol.identity_tol);
    rep.add("far commutation at L=4 (max over samples)", worst[2], tol.identity_tol);
    rep.add("[Rc(u), Rc(v)] = 0 (max over samples)", worst[3], tol.identity_tol);
    rep.add("PT symmetry (max over samples)", worst[4], tol.identity_tol);
    Ok(rep)
}
