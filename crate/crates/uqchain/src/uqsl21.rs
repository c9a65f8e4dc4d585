//! The four-dimensional representation of U_q(sl(2|1)), the defining-relation
//! checker, and the Casimir / Scasimir operators Q±_p, C_p, S_p.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{
    anticomm, comm, diag, diagonal_of, e4, fro, identity, inverse, r, rel_residual, Mat, C64,
};
use crate::report::{CheckReport, RelationReport};
use crate::scalars::{cartan_qbracket, DeformParams, ToleranceConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Basis {
    Distinguished,
    Fermionic,
}

impl Basis {
    /// Cartan matrix a_ij of the simple-root system.
    pub fn cartan(&self) -> [[i32; 2]; 2] {
        match self {
            Basis::Distinguished => [[2, -1], [-1, 0]],
            Basis::Fermionic => [[0, -1], [-1, 0]],
        }
    }

    /// Degree of (e_i, f_i), i = 1, 2.
    pub fn degrees(&self) -> [u8; 2] {
        match self {
            Basis::Distinguished => [0, 1],
            Basis::Fermionic => [1, 1],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Generator {
    E1,
    E2,
    F1,
    F2,
    K1,
    K2,
}

impl Generator {
    pub const ALL: [Generator; 6] =
        [Generator::E1, Generator::E2, Generator::F1, Generator::F2, Generator::K1, Generator::K2];

    /// Index of the simple root the generator belongs to (0 or 1).
    pub fn root(&self) -> usize {
        match self {
            Generator::E1 | Generator::F1 | Generator::K1 => 0,
            _ => 1,
        }
    }

    pub fn is_cartan(&self) -> bool {
        matches!(self, Generator::K1 | Generator::K2)
    }

    pub fn is_raising(&self) -> bool {
        matches!(self, Generator::E1 | Generator::E2)
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Generator::E1 => "e1",
            Generator::E2 => "e2",
            Generator::F1 => "f1",
            Generator::F2 => "f2",
            Generator::K1 => "k1",
            Generator::K2 => "k2",
        };
        f.write_str(s)
    }
}

impl FromStr for Generator {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "e1" => Ok(Generator::E1),
            "e2" => Ok(Generator::E2),
            "f1" => Ok(Generator::F1),
            "f2" => Ok(Generator::F2),
            "k1" => Ok(Generator::K1),
            "k2" => Ok(Generator::K2),
            _ => Err(Error::UnknownToken(s.to_string())),
        }
    }
}

/// Images of the six generators (4×4 for ρ, 4^L×4^L for coproduct images).
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSet {
    pub e1: Mat,
    pub e2: Mat,
    pub f1: Mat,
    pub f2: Mat,
    pub k1: Mat,
    pub k2: Mat,
    pub basis: Basis,
    pub q: C64,
}

impl GeneratorSet {
    pub fn get(&self, g: Generator) -> &Mat {
        match g {
            Generator::E1 => &self.e1,
            Generator::E2 => &self.e2,
            Generator::F1 => &self.f1,
            Generator::F2 => &self.f2,
            Generator::K1 => &self.k1,
            Generator::K2 => &self.k2,
        }
    }

    pub fn degree(&self, g: Generator) -> u8 {
        if g.is_cartan() {
            0
        } else {
            self.basis.degrees()[g.root()]
        }
    }

    pub fn dim(&self) -> usize {
        self.e1.nrows()
    }

    fn require(&self, basis: Basis) -> Result<()> {
        if self.basis == basis {
            Ok(())
        } else {
            Err(Error::WrongBasis {
                expected: match basis {
                    Basis::Distinguished => "distinguished",
                    Basis::Fermionic => "fermionic",
                },
            })
        }
    }
}

/// The one-parameter four-dimensional representation in the distinguished basis.
///
/// States 1..4 carry degrees (0, 1, 1, 0). The k's are fixed by the Cartan
/// data (k1 carries the sign ω), e2/f2 by e2f2 + f2e2 = [h2], and the residual
/// diagonal gauge so that the braid pair built from Casimirs has the standard
/// entries qλ² (E11⊗E11), q^{-1/2}√x (E12⊗E43), … .
pub fn build_rep(p: &DeformParams) -> GeneratorSet {
    let q = p.q;
    let om = r(p.omega as f64);
    let lam = p.lambda;
    let sq = q.sqrt();
    GeneratorSet {
        e1: e4(2, 3) * (-om * q),
        f1: e4(3, 2) * (-q.inv()),
        e2: e4(1, 2) * (p.y / sq) + e4(3, 4) * p.br_mu(1.0, 1.0),
        f2: e4(2, 1) * (sq * p.br_mu(1.0, 0.0) / p.y) + e4(4, 3),
        k1: diag(&[om, om * q, om / q, om]),
        k2: diag(&[lam, lam, lam * q, lam * q]),
        basis: Basis::Distinguished,
        q,
    }
}

fn diag_pow(k: &Mat, n: i32) -> Mat {
    let d: Vec<C64> = diagonal_of(k).iter().map(|v| v.powi(n)).collect();
    diag(&d)
}

fn diag_inv(k: &Mat) -> Mat {
    diag_pow(k, -1)
}

fn qbr_of(k: &Mat, q: C64) -> Mat {
    // [h] for K = q^h
    (k - diag_inv(k)) / (q - q.inv())
}

/// Checks every defining relation of the presentation matching `g.basis`.
/// Works for any representation dimension (also for coproduct images).
pub fn check_defining_relations(g: &GeneratorSet, tol: &ToleranceConfig) -> RelationReport {
    let mut rep = RelationReport::new();
    let q = g.q;
    let t = tol.identity_tol;
    let ks = [&g.k1, &g.k2];
    let es = [&g.e1, &g.e2];
    let fs = [&g.f1, &g.f2];
    let a = g.basis.cartan();
    let deg = g.basis.degrees();

    rep.add("k1k2 = k2k1", rel_residual(&(&g.k1 * &g.k2), &(&g.k2 * &g.k1)), t);
    for i in 0..2 {
        let kinv = inverse(ks[i]).expect("k must be invertible");
        for j in 0..2 {
            let qa = q.powi(a[j][i]);
            let lhs = ks[i] * es[j] * &kinv;
            rep.add(format!("k{}e{}k{}^-1 = q^a e{}", i + 1, j + 1, i + 1, j + 1), rel_residual(&lhs, &(es[j] * qa)), t);
            let lhs = ks[i] * fs[j] * &kinv;
            rep.add(
                format!("k{}f{}k{}^-1 = q^-a f{}", i + 1, j + 1, i + 1, j + 1),
                rel_residual(&lhs, &(fs[j] * qa.inv())),
                t,
            );
        }
    }
    for i in 0..2 {
        let rhs = qbr_of(ks[i], q);
        let (lhs, label) = if deg[i] == 0 {
            (comm(es[i], fs[i]), format!("e{0}f{0} - f{0}e{0} = [h{0}]", i + 1))
        } else {
            (anticomm(es[i], fs[i]), format!("e{0}f{0} + f{0}e{0} = [h{0}]", i + 1))
        };
        rep.add(label, rel_residual(&lhs, &rhs), t);
    }
    // mixed relations: graded commutators of e_i with f_j, i ≠ j
    for (i, j) in [(0usize, 1usize), (1, 0)] {
        let odd = deg[i] == 1 && deg[j] == 1;
        let lhs = if odd { anticomm(es[i], fs[j]) } else { comm(es[i], fs[j]) };
        let scale = fro(&(es[i] * fs[j]));
        rep.add(format!("[e{}, f{}] = 0", i + 1, j + 1), fro(&lhs) / 1f64.max(scale), t);
    }
    for i in 0..2 {
        if deg[i] == 1 {
            rep.add(format!("e{}^2 = 0", i + 1), fro(&(es[i] * es[i])) / 1f64.max(fro(es[i]).powi(2)), t);
            rep.add(format!("f{}^2 = 0", i + 1), fro(&(fs[i] * fs[i])) / 1f64.max(fro(fs[i]).powi(2)), t);
        }
    }
    if g.basis == Basis::Distinguished {
        let qq = q + q.inv();
        for (x, y, name) in [(&g.e1, &g.e2, "e"), (&g.f1, &g.f2, "f")] {
            let s = x * x * y - x * y * x * qq + y * x * x;
            let scale = fro(&(x * x * y)).max(fro(&(x * y * x)));
            rep.add(format!("Serre {name}1^2{name}2"), fro(&s) / 1f64.max(scale), t);
        }
    }
    rep
}

/// e3 = e1e2 − q⁻¹e2e1, f3 = f2f1 − q f1f2.
pub fn build_e3f3(g: &GeneratorSet) -> Result<(Mat, Mat)> {
    g.require(Basis::Distinguished)?;
    let q = g.q;
    let e3 = &g.e1 * &g.e2 - &g.e2 * &g.e1 * q.inv();
    let f3 = &g.f2 * &g.f1 - &g.f1 * &g.f2 * q;
    Ok((e3, f3))
}

/// Generators of the fermionic simple-root system expressed through the
/// distinguished ones.
pub fn fermionic_basis(g: &GeneratorSet) -> Result<GeneratorSet> {
    let (e3, f3) = build_e3f3(g)?;
    let k2inv = diag_inv(&g.k2);
    Ok(GeneratorSet {
        k1: diag_inv(&(&g.k1 * &g.k2)),
        k2: g.k2.clone(),
        e1: e3,
        e2: &g.f2 * &k2inv,
        f1: -f3,
        f2: &g.k2 * &g.e2,
        basis: Basis::Fermionic,
        q: g.q,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QSign {
    Plus,
    Minus,
}

struct Words {
    e3: Mat,
    f3: Mat,
    k12: Mat,
    k2inv: Mat,
}

fn words(g: &GeneratorSet) -> Result<Words> {
    let (e3, f3) = build_e3f3(g)?;
    Ok(Words { e3, f3, k12: &g.k1 * &g.k2, k2inv: diag_inv(&g.k2) })
}

fn prefactor(g: &GeneratorSet, pp: i32) -> Mat {
    diag_pow(&g.k1, 2 * pp - 1) * diag_pow(&g.k2, 4 * pp - 2)
}

/// Q⁺_p or Q⁻_p evaluated on the generator images.
pub fn casimir_q(pp: i32, sign: QSign, g: &GeneratorSet, p: &DeformParams) -> Result<Mat> {
    let w = words(g)?;
    let q = p.q;
    let (e1, e2, f1, f2, k2) = (&g.e1, &g.e2, &g.f1, &g.f2, &g.k2);
    let (e3, f3) = (&w.e3, &w.f3);
    let pre = prefactor(g, pp);
    let body = match sign {
        QSign::Plus => {
            let h12p1 = cartan_qbracket(&w.k12, 1, p)?;
            cartan_qbracket(&w.k12, 1, p)? * cartan_qbracket(k2, 0, p)?
                - f1 * e1
                - f2 * e2 * &h12p1
                - f3 * e3 * cartan_qbracket(k2, -1, p)?
                + f3 * e2 * e1 * k2 * q.inv()
                + f1 * f2 * e3 * &w.k2inv * q
                + f2 * f3 * e3 * e2 * (q.powi(2 - 4 * pp) + 1.0)
        }
        QSign::Minus => {
            let body = f2 * e2 * cartan_qbracket(&w.k12, 0, p)? * q
                + f3 * e3 * cartan_qbracket(k2, -2, p)? * q
                - f3 * e2 * e1 * k2 * q.inv()
                - f1 * f2 * e3 * &w.k2inv * q.powi(3)
                - f2 * f3 * e3 * e2 * (q * q + 1.0);
            body * q.powi(-2 * pp)
        }
    };
    Ok(pre * body)
}

/// The closed single-formula expression of C_p.
pub fn casimir_c_closed(pp: i32, g: &GeneratorSet, p: &DeformParams) -> Result<Mat> {
    let w = words(g)?;
    let q = p.q;
    let (e1, e2, f1, f2, k2) = (&g.e1, &g.e2, &g.f1, &g.f2, &g.k2);
    let (e3, f3) = (&w.e3, &w.f3);
    let qm = q - q.inv();
    let q12p = q.powi(1 - 2 * pp);
    let brp = p.bri(pp);
    let brp1 = p.bri(pp - 1);
    let body = cartan_qbracket(&w.k12, 1, p)? * cartan_qbracket(k2, 0, p)? - f1 * e1
        + f2 * e2 * (cartan_qbracket(&w.k12, 0, p)? * q12p - cartan_qbracket(&w.k12, 1, p)?)
        + f3 * e3 * (cartan_qbracket(k2, -2, p)? * q12p - cartan_qbracket(k2, -1, p)?)
        + f3 * e2 * e1 * k2 * (qm * q.powi(-1 - pp) * brp)
        + f1 * f2 * e3 * &w.k2inv * (qm * q.powi(2 - pp) * brp1)
        + f2 * f3 * e3 * e2 * (qm * qm * q12p * brp * brp1);
    Ok(prefactor(g, pp) * body)
}

/// C_p, evaluated both as Q⁺_p + Q⁻_p and from the closed form; the two must agree.
pub fn casimir_c(pp: i32, g: &GeneratorSet, p: &DeformParams) -> Result<Mat> {
    let closed = casimir_c_closed(pp, g, p)?;
    let sum = casimir_q(pp, QSign::Plus, g, p)? + casimir_q(pp, QSign::Minus, g, p)?;
    let res = rel_residual(&closed, &sum);
    if res > ToleranceConfig::default().identity_tol {
        return Err(Error::FormulaMismatch { what: format!("C_{pp} closed form vs Q+ + Q-"), residual: res });
    }
    Ok(closed)
}

/// S_p = Q⁺_p − Q⁻_p.
pub fn scasimir_s(pp: i32, g: &GeneratorSet, p: &DeformParams) -> Result<Mat> {
    Ok(casimir_q(pp, QSign::Plus, g, p)? - casimir_q(pp, QSign::Minus, g, p)?)
}

/// Scalar value of a matrix expected to be a multiple of the identity, and
/// the relative deviation from scalarity.
pub fn scalar_part(m: &Mat) -> (C64, f64) {
    let n = m.nrows();
    let cval = crate::linalg::trace(m) / n as f64;
    let dev = fro(&(m - identity(n) * cval)) / 1f64.max(fro(m));
    (cval, dev)
}

/// Product relations among Q±, C, S over `range`, centrality, graded
/// centrality and the (−1)^F property of S_p/c_p.
pub fn check_casimir_relations(
    g: &GeneratorSet,
    p: &DeformParams,
    range: std::ops::RangeInclusive<i32>,
    tol: &ToleranceConfig,
) -> Result<RelationReport> {
    let t = tol.identity_tol;
    let mut rep = RelationReport::new();
    let ps: Vec<i32> = range.collect();
    let mut qp = Vec::new();
    let mut qm = Vec::new();
    let mut cs = Vec::new();
    let mut ss = Vec::new();
    for &pp in &ps {
        let a = casimir_q(pp, QSign::Plus, g, p)?;
        let b = casimir_q(pp, QSign::Minus, g, p)?;
        let closed = casimir_c_closed(pp, g, p)?;
        rep.add(format!("C_{pp} closed = Q+ + Q-"), rel_residual(&closed, &(&a + &b)), t);
        cs.push(closed);
        ss.push(&a - &b);
        qp.push(a);
        qm.push(b);
    }
    let idx = |pp: i32| ps.iter().position(|&x| x == pp);
    let n = ps.len();
    let mut worst = [0f64; 6];
    for i in 0..n {
        for j in 0..n {
            let r1 = fro(&(&qp[i] * &qm[j])) / 1f64.max(fro(&qp[i]) * fro(&qm[j]));
            let r2 = fro(&(&qm[i] * &qp[j])) / 1f64.max(fro(&qp[j]) * fro(&qm[i]));
            worst[0] = worst[0].max(r1).max(r2);
            for k in 0..n {
                let s = ps[i] + ps[j] - ps[k];
                let Some(l) = idx(s) else { continue };
                worst[1] = worst[1].max(rel_residual(&(&qp[i] * &qp[j]), &(&qp[k] * &qp[l])));
                worst[2] = worst[2].max(rel_residual(&(&qm[i] * &qm[j]), &(&qm[k] * &qm[l])));
                worst[3] = worst[3].max(rel_residual(&(&cs[i] * &cs[j]), &(&cs[k] * &cs[l])));
                worst[4] = worst[4].max(rel_residual(&(&cs[i] * &cs[j]), &(&ss[k] * &ss[l])));
                worst[5] = worst[5].max(rel_residual(&(&cs[i] * &ss[j]), &(&ss[k] * &cs[l])));
            }
        }
    }
    rep.add("Q+_a Q-_b = Q-_a Q+_b = 0", worst[0], t);
    rep.add("Q+Q+ exchange (equal index sums)", worst[1], t);
    rep.add("Q-Q- exchange (equal index sums)", worst[2], t);
    rep.add("C C = C C (equal index sums)", worst[3], t);
    rep.add("C C = S S (equal index sums)", worst[4], t);
    rep.add("C S = S C (equal index sums)", worst[5], t);

    for (i, &pp) in ps.iter().enumerate() {
        let mut cen = 0f64;
        let mut scen = 0f64;
        for gen in Generator::ALL {
            let x = g.get(gen);
            let scale = fro(x) * fro(&cs[i]);
            cen = cen.max(fro(&comm(x, &cs[i])) / 1f64.max(scale));
            let s = if g.degree(gen) == 1 { anticomm(&ss[i], x) } else { comm(&ss[i], x) };
            scen = scen.max(fro(&s) / 1f64.max(fro(x) * fro(&ss[i])));
        }
        rep.add(format!("[x, C_{pp}] = 0"), cen, t);
        rep.add(format!("S_{pp} x = (-1)^deg x S_{pp}"), scen, t);

        let (cval, _) = scalar_part(&cs[i]);
        if cval.norm() <= tol.genericity_tol {
            rep.push(
                CheckReport::informative(format!("(S_{pp}/c_{pp})^2 = 1"), f64::NAN, t)
                    .with_note(Error::ScalarCasimirZero(pp).to_string()),
            );
            continue;
        }
        let parity = &ss[i] / cval;
        let dim = parity.nrows();
        rep.add(format!("(S_{pp}/c_{pp})^2 = 1"), rel_residual(&(&parity * &parity), &identity(dim)), t);
    }
    Ok(rep)
}

/// On the irreducible ρ every C_p is scalar; returns (c_p, off-scalar deviation).
pub fn casimir_scalar(pp: i32, g: &GeneratorSet, p: &DeformParams) -> Result<(C64, f64)> {
    let cm = casimir_c(pp, g, p)?;
    Ok(scalar_part(&cm))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;
    use crate::scalars::derive_params;

    fn grid() -> Vec<DeformParams> {
        let tol = ToleranceConfig::default();
        let mut v = Vec::new();
        for q in [r(1.2), c(0.7, 0.2)] {
            for mu in [r(0.3), r(-0.45)] {
                for om in [1, -1] {
                    v.push(derive_params(q, mu, om, &tol).unwrap());
                }
            }
        }
        v
    }

    #[test]
    fn distinguished_relations_hold_on_grid() {
        let tol = ToleranceConfig::default();
        for p in grid() {
            let rep = check_defining_relations(&build_rep(&p), &tol);
            assert!(rep.max_residual() <= 1e-12, "{:?}", rep.failures());
            assert_eq!(rep.checks.len(), 17);
        }
    }

    #[test]
    fn e2_squares_to_exact_zero() {
        let g = build_rep(&grid()[0]);
        assert_eq!(fro(&(&g.e2 * &g.e2)), 0.0);
        assert_eq!(fro(&(&g.f2 * &g.f2)), 0.0);
    }

    #[test]
    fn k1_conjugation_of_e1() {
        let p = grid()[0];
        let g = build_rep(&p);
        let lhs = &g.k1 * &g.e1 * inverse(&g.k1).unwrap();
        assert!(fro(&(lhs - &g.e1 * (p.q * p.q))) < 1e-15);
    }

    #[test]
    fn omega_flips_k1_and_e1_only() {
        let tol = ToleranceConfig::default();
        let a = build_rep(&derive_params(r(1.2), r(0.3), 1, &tol).unwrap());
        let b = build_rep(&derive_params(r(1.2), r(0.3), -1, &tol).unwrap());
        assert!(fro(&(&a.k1 + &b.k1)) < 1e-15);
        assert!(fro(&(&a.e1 + &b.e1)) < 1e-15);
        assert!(fro(&(&a.k2 - &b.k2)) < 1e-15);
        assert!(fro(&(&a.e2 - &b.e2)) < 1e-15 && fro(&(&a.f2 - &b.f2)) < 1e-15);
    }

    #[test]
    fn e3_f3_structure() {
        let p = grid()[0];
        let g = build_rep(&p);
        let (e3, f3) = build_e3f3(&g).unwrap();
        assert!(fro(&(&e3 * &e3)) < 1e-15);
        // weight shift by the odd root e1+e2: only (1,3) and (2,4) entries
        for i in 0..4 {
            for j in 0..4 {
                if !matches!((i, j), (0, 2) | (1, 3)) {
                    assert!(e3[(i, j)].norm() < 1e-15, "e3[{i},{j}]");
                }
            }
        }
        let direct = &g.f2 * &g.f1 - &g.f1 * &g.f2 * p.q;
        assert_eq!(f3, direct);
        let fg = fermionic_basis(&g).unwrap();
        assert!(matches!(build_e3f3(&fg), Err(Error::WrongBasis { .. })));
    }

    #[test]
    fn fermionic_basis_relations() {
        let tol = ToleranceConfig::default();
        for p in grid() {
            let g = build_rep(&p);
            let fg = fermionic_basis(&g).unwrap();
            let k1 = inverse(&(&g.k1 * &g.k2)).unwrap();
            assert!(rel_residual(&fg.k1, &k1) < 1e-15);
            let rep = check_defining_relations(&fg, &tol);
            assert!(rep.max_residual() <= 1e-12, "{:?}", rep.failures());
            assert!(rep.get("e2^2 = 0").is_some() && rep.get("f1^2 = 0").is_some());
            assert!(fermionic_basis(&fg).is_err());
        }
    }

    #[test]
    fn q_plus_minus_annihilate() {
        let p = grid()[0];
        let g = build_rep(&p);
        let a = casimir_q(1, QSign::Plus, &g, &p).unwrap();
        let b = casimir_q(2, QSign::Minus, &g, &p).unwrap();
        assert!(fro(&(&a * &b)) <= 1e-12 * fro(&a) * fro(&b));
        let q3 = casimir_q(3, QSign::Plus, &g, &p).unwrap();
        let q2 = casimir_q(2, QSign::Plus, &g, &p).unwrap();
        assert!(rel_residual(&(&a * &q3), &(&q2 * &q2)) < 1e-12);
    }

    #[test]
    fn casimirs_are_scalar_and_agree() {
        for p in grid() {
            let g = build_rep(&p);
            for pp in -1..=3 {
                let (cval, dev) = casimir_scalar(pp, &g, &p).unwrap();
                assert!(dev < 1e-12, "C_{pp} not scalar: {dev}");
                // c_p ∝ λ^{4p}: ratio of consecutive values is λ^4
                if pp < 3 {
                    let (next, _) = casimir_scalar(pp + 1, &g, &p).unwrap();
                    assert!((next / cval - p.lambda.powi(4)).norm() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn casimir_relation_suite() {
        let tol = ToleranceConfig::default();
        for p in grid() {
            let g = build_rep(&p);
            let rep = check_casimir_relations(&g, &p, -1..=3, &tol).unwrap();
            assert!(rep.all_pass(), "{:?}", rep.failures());
        }
    }

    #[test]
    fn scasimir_is_parity() {
        let p = grid()[0];
        let g = build_rep(&p);
        let s = scasimir_s(1, &g, &p).unwrap();
        let (cval, _) = casimir_scalar(1, &g, &p).unwrap();
        let par = s / cval;
        let want = diag(&[r(1.0), r(-1.0), r(-1.0), r(1.0)]);
        assert!(rel_residual(&par, &want) < 1e-12);
    }

    #[test]
    fn generator_tokens() {
        assert_eq!("E2".parse::<Generator>().unwrap(), Generator::E2);
        assert!(matches!("h3".parse::<Generator>(), Err(Error::UnknownToken(_))));
    }
}
