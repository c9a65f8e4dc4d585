//! Deformation parameters (q, μ, ω) and q-number arithmetic.

// `!(a > tol)` is deliberate: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{c, diag, diagonal_of, Mat, C64};

/// Largest |k| for which q^k = 1 is excluded.
pub const GENERICITY_ORDER: i32 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ToleranceConfig {
    pub identity_tol: f64,
    pub fd_tol: f64,
    pub spectrum_tol: f64,
    pub genericity_tol: f64,
    pub seed: u64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        ToleranceConfig {
            identity_tol: 1e-10,
            fd_tol: 1e-5,
            spectrum_tol: 1e-8,
            genericity_tol: 1e-6,
            seed: 7,
        }
    }
}

impl ToleranceConfig {
    pub fn validate(&self) -> Result<()> {
        let all = [self.identity_tol, self.fd_tol, self.spectrum_tol, self.genericity_tol];
        if all.iter().all(|t| t.is_finite() && *t > 0.0) {
            Ok(())
        } else {
            Err(Error::Config("tolerances must be strictly positive".into()))
        }
    }
}

/// A parameter point of the one-parameter typical representation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeformParams {
    pub q: C64,
    pub mu: C64,
    /// ±1, selects one of the two inequivalent four-dimensional representations.
    pub omega: i32,
    /// λ = q^μ (principal logarithm of q).
    pub lambda: C64,
    /// x = (λ−λ⁻¹)(qλ−q⁻¹λ⁻¹).
    pub x: C64,
    /// y = √x / (q − q⁻¹), principal square root.
    pub y: C64,
    /// λ² = q⁻¹, i.e. μ = −1/2: the Temperley–Lieb point.
    pub tl_mode: bool,
}

/// [n] = (q^n − q^−n)/(q − q^−1) with principal powers, for any q.
pub fn qbracket_q(n: C64, q: C64, tol: f64) -> Result<C64> {
    let den = q - q.inv();
    if !(den.norm() > tol) {
        return Err(Error::DegenerateQ(format!("|q − q⁻¹| = {:e}", den.norm())));
    }
    let ln = q.ln();
    Ok(((n * ln).exp() - (-n * ln).exp()) / den)
}

/// q-bracket at a validated parameter point.
pub fn qbracket(n: C64, p: &DeformParams) -> Result<C64> {
    qbracket_q(n, p.q, ToleranceConfig::default().genericity_tol)
}

fn check_q(q: C64, tol: f64) -> Result<()> {
    if !(q.norm() > tol) || !q.re.is_finite() || !q.im.is_finite() {
        return Err(Error::DegenerateQ("q must be a finite nonzero number".into()));
    }
    for k in 1..=GENERICITY_ORDER {
        let d = (q.powi(k) - 1.0).norm();
        if !(d > tol) {
            return Err(Error::DegenerateQ(format!("|q^{k} − 1| = {d:e}")));
        }
    }
    Ok(())
}

/// Builds the parameter point, deriving λ, x, y and the TL flag.
pub fn derive_params(q: C64, mu: C64, omega: i32, tol: &ToleranceConfig) -> Result<DeformParams> {
    tol.validate()?;
    if omega != 1 && omega != -1 {
        return Err(Error::Config(format!("omega must be +1 or -1, got {omega}")));
    }
    check_q(q, tol.genericity_tol)?;
    let lambda = (mu * q.ln()).exp();
    let x = (lambda - lambda.inv()) * (q * lambda - (q * lambda).inv());
    let alt = q * lambda * lambda + (q * lambda * lambda).inv() - q - q.inv();
    if (x - alt).norm() > 1e-12 * 1f64.max(x.norm()) {
        return Err(Error::FormulaMismatch { what: "x identity".into(), residual: (x - alt).norm() });
    }
    let y = x.sqrt() / (q - q.inv());
    let tl_mode = (lambda * lambda - q.inv()).norm() <= tol.genericity_tol;
    let p = DeformParams { q, mu, omega, lambda, x, y, tl_mode };

    let g = tol.genericity_tol;
    if !(x.norm() > g) {
        return Err(Error::DegenerateRepresentation("x = 0".into()));
    }
    let one = c(1.0, 0.0);
    let mut required = vec![("[μ]", mu), ("[μ+1]", mu + one), ("[2μ]", mu * 2.0), ("[2μ+2]", mu * 2.0 + 2.0)];
    if !tl_mode {
        required.push(("[2μ+1]", mu * 2.0 + one));
    }
    for (label, n) in required {
        let v = qbracket_q(n, q, g)?;
        if !(v.norm() > g) {
            return Err(Error::DegenerateRepresentation(format!("{label} = 0")));
        }
    }
    Ok(p)
}

/// The Temperley–Lieb specialization μ = −1/2.
pub fn tl_params(q: C64, omega: i32, tol: &ToleranceConfig) -> Result<DeformParams> {
    derive_params(q, c(-0.5, 0.0), omega, tol)
}

impl DeformParams {
    /// q^s with the principal logarithm.
    pub fn qpow(&self, s: C64) -> C64 {
        (s * self.q.ln()).exp()
    }

    pub fn qpowi(&self, s: i32) -> C64 {
        self.q.powi(s)
    }

    /// q-bracket; parameters are validated at construction so this cannot fail.
    pub fn br(&self, n: C64) -> C64 {
        let ln = self.q.ln();
        ((n * ln).exp() - (-n * ln).exp()) / (self.q - self.q.inv())
    }

    pub fn bri(&self, n: i32) -> C64 {
        self.br(c(n as f64, 0.0))
    }

    /// [a·μ + b]
    pub fn br_mu(&self, a: f64, b: f64) -> C64 {
        self.br(self.mu * a + b)
    }

    /// κ = x/(q − q⁻¹): ratio between the fermionic bulk normalization and R̆'(0).
    pub fn kappa(&self) -> C64 {
        self.x / (self.q - self.q.inv())
    }

    /// ρ = ln q, the crossing shift.
    pub fn rho(&self) -> C64 {
        self.q.ln()
    }
}

/// [h-word + shift] evaluated as (q^shift·K − q^−shift·K⁻¹)/(q − q⁻¹) for a
/// diagonal K realising q^{h-word}. Only the diagonal of K is read.
pub fn cartan_qbracket(k: &Mat, shift: i32, p: &DeformParams) -> Result<Mat> {
    let d = diagonal_of(k);
    if let Some(pos) = d.iter().position(|v| v.norm() == 0.0 || !v.norm().is_finite()) {
        return Err(Error::SingularCartan(pos));
    }
    let qs = p.q.powi(shift);
    let den = p.q - p.q.inv();
    let out: Vec<C64> = d.iter().map(|v| (qs * v - v.inv() / qs) / den).collect();
    Ok(diag(&out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{fro, identity, r};
    use proptest::prelude::*;

    fn params(q: f64, mu: f64) -> DeformParams {
        derive_params(r(q), r(mu), 1, &ToleranceConfig::default()).unwrap()
    }

    #[test]
    fn bracket_examples() {
        let q = r(2.0);
        let tol = 1e-6;
        assert_eq!(qbracket_q(r(0.0), q, tol).unwrap(), r(0.0));
        assert!((qbracket_q(r(1.0), q, tol).unwrap() - 1.0).norm() < 1e-15);
        // (4 − 1/4)/(2 − 1/2)
        assert!((qbracket_q(r(2.0), q, tol).unwrap() - 2.5).norm() < 1e-15);
    }

    #[test]
    fn bracket_rejects_q_one() {
        assert!(matches!(qbracket_q(r(2.0), r(1.0), 1e-6), Err(Error::DegenerateQ(_))));
    }

    #[test]
    fn derived_scalars_at_reference_point() {
        let p = params(1.2, 0.3);
        let lam = 1.2f64.powf(0.3);
        assert!((p.lambda - lam).norm() < 1e-15);
        assert!((p.lambda.re - 1.056220).abs() < 1e-6);
        let x = (lam - 1.0 / lam) * (1.2 * lam - 1.0 / (1.2 * lam));
        assert!((p.x.re - x).abs() < 1e-15);
        assert!((p.x.re - 0.052370).abs() < 1e-6);
        assert!(!p.tl_mode);
        assert!((p.y * p.y * (p.q - p.q.inv()).powi(2) - p.x).norm() < 1e-15);
    }

    #[test]
    fn tl_point_is_flagged() {
        let p = params(1.4, -0.5);
        assert!(p.tl_mode);
        assert!((p.lambda * p.lambda - 1.0 / 1.4).norm() < 1e-15);
        assert!(p.br_mu(2.0, 1.0).norm() < 1e-15);
    }

    #[test]
    fn mu_zero_is_degenerate() {
        let e = derive_params(r(1.2), r(0.0), 1, &ToleranceConfig::default());
        assert!(matches!(e, Err(Error::DegenerateRepresentation(_))));
    }

    #[test]
    fn roots_of_unity_are_rejected() {
        let i = c(0.0, 1.0);
        let e = derive_params(i, r(0.3), 1, &ToleranceConfig::default());
        assert!(matches!(e, Err(Error::DegenerateQ(_))));
        let w = (c(0.0, 2.0 * std::f64::consts::PI / 7.0)).exp();
        assert!(derive_params(w, r(0.3), 1, &ToleranceConfig::default()).is_err());
    }

    #[test]
    fn bad_omega_is_config_error() {
        assert!(matches!(derive_params(r(1.2), r(0.3), 2, &ToleranceConfig::default()), Err(Error::Config(_))));
    }

    #[test]
    fn cartan_bracket_examples() {
        let p = params(1.2, 0.3);
        assert!(fro(&(cartan_qbracket(&identity(4), 1, &p).unwrap() - identity(4))) < 1e-15);
        // diagonal realising q^{h} with weights (−2μ, −2μ−1, −2μ−1, −2μ−2)
        let l2 = p.lambda.powi(-2);
        let qi = p.q.inv();
        let k = diag(&[l2, l2 * qi, l2 * qi, l2 * qi * qi]);
        let got = cartan_qbracket(&k, 0, &p).unwrap();
        let want = [p.br_mu(-2.0, 0.0), p.br_mu(-2.0, -1.0), p.br_mu(-2.0, -1.0), p.br_mu(-2.0, -2.0)];
        for (i, w) in want.iter().enumerate() {
            assert!((got[(i, i)] - w).norm() < 1e-13);
        }
        let mut singular = identity(4);
        singular[(2, 2)] = r(0.0);
        assert_eq!(cartan_qbracket(&singular, 0, &p), Err(Error::SingularCartan(2)));
    }

    #[test]
    fn derivation_is_bitwise_deterministic() {
        let a = derive_params(c(0.7, 0.2), c(-0.45, 0.1), -1, &ToleranceConfig::default()).unwrap();
        let b = derive_params(c(0.7, 0.2), c(-0.45, 0.1), -1, &ToleranceConfig::default()).unwrap();
        assert_eq!(a, b);
    }

    fn arb_q() -> impl Strategy<Value = C64> {
        (0.3f64..2.5, -0.6f64..0.6).prop_map(|(m, a)| C64::from_polar(m, a)).prop_filter(
            "generic q",
            |q| (1..=8).all(|k| (q.powi(k) - 1.0).norm() > 1e-3),
        )
    }

    proptest! {
        #[test]
        fn bracket_is_odd(q in arb_q(), nr in -4.0f64..4.0, ni in -1.0f64..1.0) {
            let n = c(nr, ni);
            let a = qbracket_q(n, q, 1e-9).unwrap();
            let b = qbracket_q(-n, q, 1e-9).unwrap();
            prop_assert!((a + b).norm() <= 1e-10 * (1.0 + a.norm()));
        }

        #[test]
        fn bracket_recurrence(q in arb_q(), nr in -4.0f64..4.0, ni in -1.0f64..1.0) {
            let n = c(nr, ni);
            let lhs = qbracket_q(n + 1.0, q, 1e-9).unwrap() + qbracket_q(n - 1.0, q, 1e-9).unwrap();
            let rhs = (q + q.inv()) * qbracket_q(n, q, 1e-9).unwrap();
            prop_assert!((lhs - rhs).norm() <= 1e-9 * (1.0 + rhs.norm()));
        }

        #[test]
        fn bracket_ratios(q in arb_q(), mr in 0.1f64..0.9, mi in -0.3f64..0.3) {
            let tol = ToleranceConfig::default();
            if let Ok(p) = derive_params(q, c(mr, mi), 1, &tol) {
                let l = p.lambda;
                let r1 = p.br_mu(2.0, 0.0) / p.br_mu(1.0, 0.0);
                let r2 = p.br_mu(2.0, 2.0) / p.br_mu(1.0, 1.0);
                prop_assert!((r1 - (l + l.inv())).norm() <= 1e-9 * (1.0 + r1.norm()));
                prop_assert!((r2 - (p.q * l + (p.q * l).inv())).norm() <= 1e-9 * (1.0 + r2.norm()));
                let alt = p.q * l * l + (p.q * l * l).inv() - p.q - p.q.inv();
                prop_assert!((p.x - alt).norm() <= 1e-10 * (1.0 + p.x.norm()));
            }
        }
    }
}
