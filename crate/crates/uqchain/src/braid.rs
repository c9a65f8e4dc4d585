//! The projectors onto the three irreducible components of ρ⊗ρ, the braid
//! pair (b, b⁻¹) built from them, and the cubic algebra they satisfy.

use serde::Serialize;

use crate::coproduct::{coproduct_set, embed};
use crate::error::{Error, Result};
use crate::linalg::{
    eigenvalues, e4, fro, identity, kron, r, rel_residual, scalar_fit, spectrum_distance, trace, Mat, C64,
};
use crate::report::{CheckReport, RelationReport};
use crate::scalars::{DeformParams, ToleranceConfig};
use crate::uqsl21::{casimir_c_closed, GeneratorSet};

/// Orthogonal idempotents Π0, Π1, Π2 with ranks 4, 8, 4.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectorTriple {
    pub o0: Mat,
    pub o1: Mat,
    pub o2: Mat,
}

impl ProjectorTriple {
    pub fn get(&self, a: usize) -> &Mat {
        match a {
            0 => &self.o0,
            1 => &self.o1,
            _ => &self.o2,
        }
    }

    /// Orthogonality, completeness and ranks.
    pub fn check(&self, tol: &ToleranceConfig) -> RelationReport {
        let mut rep = RelationReport::new();
        let t = tol.identity_tol;
        for a in 0..3 {
            for b in 0..3 {
                let lhs = self.get(a) * self.get(b);
                let res = if a == b {
                    rel_residual(&lhs, self.get(a))
                } else {
                    fro(&lhs) / 1f64.max(fro(self.get(a)) * fro(self.get(b)))
                };
                rep.add(format!("O{a} O{b} = delta O{a}"), res, t);
            }
        }
        let sum = &self.o0 + &self.o1 + &self.o2;
        rep.add("O0 + O1 + O2 = Id", rel_residual(&sum, &identity(16)), t);
        for (a, want) in [(0, 4usize), (1, 8), (2, 4)] {
            let got = projector_rank(self.get(a), tol.spectrum_tol);
            rep.add(format!("rank O{a} = {want}"), (got as f64 - want as f64).abs(), 0.5);
        }
        rep
    }
}

/// Rank of an idempotent: the number of eigenvalues within `tol` of 1.
pub fn projector_rank(m: &Mat, tol: f64) -> usize {
    match eigenvalues(m) {
        Ok(ev) => ev.iter().filter(|v| (*v - r(1.0)).norm() <= tol).count(),
        Err(_) => 0,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BraidPair {
    pub b: Mat,
    pub binv: Mat,
}

/// Which formula builds the braid pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BraidRoute {
    /// b = −q·Id + qλ([2μ]/[μ])Π0 + λ⁻¹([2μ+2]/[μ+1])Π2 from Casimir projectors.
    Projector,
    /// The explicit entry list in E_ij ⊗ E_kl.
    Explicit,
}

/// Multiplicity-weighted constants of the decomposition of Δ(C_p):
/// on Π_a, Δ(C_p) = w_a t_a^p with t_a = λ⁸q^{2a}, w_a = λ⁻⁴q^{−a}c_a.
fn decomposition_constants(p: &DeformParams) -> ([C64; 3], [C64; 3]) {
    let lam8 = p.lambda.powi(8);
    let c = [
        p.br_mu(2.0, 0.0) * p.br_mu(2.0, 1.0),
        p.br_mu(2.0, 0.0) * p.br_mu(2.0, 2.0),
        p.br_mu(2.0, 1.0) * p.br_mu(2.0, 2.0),
    ];
    let mut t = [r(0.0); 3];
    let mut w = [r(0.0); 3];
    for a in 0..3 {
        t[a] = lam8 * p.q.powi(2 * a as i32);
        w[a] = p.lambda.powi(-4) * p.q.powi(-(a as i32)) * c[a];
    }
    (t, w)
}

/// Eigenvalue of (ρ⊗ρ)Δ(C_pp) on Π_a:
/// λ^{8p−4}·{[2μ][2μ+1], q^{2p−1}[2μ][2μ+2], q^{4p−2}[2μ+1][2μ+2]}.
pub fn decomposition_coefficient(p: &DeformParams, pp: i32, a: usize) -> C64 {
    let (t, w) = decomposition_constants(p);
    w[a] * t[a].powi(pp)
}

fn require_generic(p: &DeformParams) -> Result<()> {
    if p.tl_mode {
        return Err(Error::DegenerateRepresentation(
            "ρ⊗ρ is not completely reducible at λ² = q⁻¹ ([2μ+1] = 0)".into(),
        ));
    }
    Ok(())
}

/// Projectors as linear combinations of Δ(C_p), Δ(C_{p+1}), Δ(C_{p+2}).
pub fn projectors_from_casimirs(g: &GeneratorSet, p: &DeformParams, base_p: i32) -> Result<ProjectorTriple> {
    require_generic(p)?;
    let dg = coproduct_set(g)?;
    let cs: Vec<Mat> = (0..3).map(|k| casimir_c_closed(base_p + k, &dg, p)).collect::<Result<_>>()?;
    let (t, w) = decomposition_constants(p);
    let mut out = Vec::with_capacity(3);
    for a in 0..3 {
        let (b, c) = ((a + 1) % 3, (a + 2) % 3);
        let den = (t[a] - t[b]) * (t[a] - t[c]) * w[a] * t[a].powi(base_p);
        if den.norm() <= 1e-300 || !den.is_finite() {
            return Err(Error::DegenerateRepresentation(format!("vanishing weight for component {a}")));
        }
        out.push((&cs[2] - &cs[1] * (t[b] + t[c]) + &cs[0] * (t[b] * t[c])) / den);
    }
    let o2 = out.pop().unwrap();
    let o1 = out.pop().unwrap();
    let o0 = out.pop().unwrap();
    Ok(ProjectorTriple { o0, o1, o2 })
}

/// Residuals of Δ(C_pp) = Σ_a coefficient_a·Π_a, plus the extracted Π0 coefficient.
pub fn check_decomposition(
    g: &GeneratorSet,
    p: &DeformParams,
    pps: &[i32],
    triple: &ProjectorTriple,
    tol: &ToleranceConfig,
) -> Result<RelationReport> {
    let dg = coproduct_set(g)?;
    let mut rep = RelationReport::new();
    for &pp in pps {
        let dc = casimir_c_closed(pp, &dg, p)?;
        let mut rhs = Mat::zeros(16, 16);
        for a in 0..3 {
            rhs += triple.get(a) * decomposition_coefficient(p, pp, a);
        }
        rep.add(format!("Delta(C_{pp}) = sum_a c_a O_a"), rel_residual(&dc, &rhs), tol.identity_tol);
        let extracted = trace(&(&dc * &triple.o0)) / 4.0;
        let want = decomposition_coefficient(p, pp, 0);
        rep.push(
            CheckReport::new(
                format!("tr(Delta(C_{pp}) O0)/4 = lambda^(8p-4)[2mu][2mu+1]"),
                (extracted - want).norm() / 1f64.max(want.norm()),
                tol.identity_tol,
            )
            .with_value(extracted),
        );
    }
    Ok(rep)
}

fn pair_from_projectors(t: &ProjectorTriple, p: &DeformParams) -> BraidPair {
    let q = p.q;
    let lam = p.lambda;
    let a0 = p.br_mu(2.0, 0.0) / p.br_mu(1.0, 0.0);
    let a2 = p.br_mu(2.0, 2.0) / p.br_mu(1.0, 1.0);
    let id = identity(16);
    let b = &id * (-q) + &t.o0 * (q * lam * a0) + &t.o2 * (a2 / lam);
    let binv = &id * (-q.inv()) + &t.o0 * (a0 / (q * lam)) + &t.o2 * (lam * a2);
    BraidPair { b, binv }
}

fn ee(i: usize, j: usize, k: usize, l: usize) -> Mat {
    kron(&e4(i, j), &e4(k, l))
}

/// The explicit entry lists of b and b⁻¹ (principal √x).
pub fn explicit_pair(p: &DeformParams) -> BraidPair {
    let q = p.q;
    let lam = p.lambda;
    let om = r(p.omega as f64);
    let x = p.x;
    let sx = x.sqrt();
    let sq = q.sqrt();
    let ql2 = q * lam * lam;
    let iql2 = ql2.inv();
    let sym = |i, j, k, l| ee(i, j, k, l) + ee(k, l, i, j);

    let b = ee(1, 1, 1, 1) * ql2
        + (ee(1, 1, 2, 2) + ee(1, 1, 3, 3)) * (ql2 - q)
        + ee(1, 1, 4, 4) * x
        + sym(1, 2, 2, 1) * (q * lam)
        + (ee(1, 2, 4, 3) + ee(2, 1, 3, 4)) * (sx / sq)
        + sym(1, 3, 3, 1) * (q * lam * om)
        - (ee(1, 3, 4, 2) + ee(3, 1, 2, 4)) * (sq * sx * om)
        + sym(1, 4, 4, 1) * (q * om)
        - ee(2, 2, 2, 2) * q
        + ee(2, 2, 3, 3) * (q.inv() - q)
        + ee(2, 2, 4, 4) * (iql2 - q)
        - sym(2, 3, 3, 2) * om
        + sym(2, 4, 4, 2) * (om / lam)
        - ee(3, 3, 3, 3) * q
        + ee(3, 3, 4, 4) * (iql2 - q)
        + sym(3, 4, 4, 3) * lam.inv()
        + ee(4, 4, 4, 4) * iql2;

    let binv = ee(1, 1, 1, 1) * iql2
        + sym(1, 2, 2, 1) * (q * lam).inv()
        + sym(1, 3, 3, 1) * (om / (q * lam))
        + sym(1, 4, 4, 1) * (om / q)
        + ee(2, 2, 1, 1) * (iql2 - q.inv())
        - ee(2, 2, 2, 2) * q.inv()
        - sym(2, 3, 3, 2) * om
        - (ee(2, 4, 3, 1) + ee(4, 2, 1, 3)) * (sx * om / sq)
        + sym(2, 4, 4, 2) * (lam * om)
        + ee(3, 3, 1, 1) * (iql2 - q.inv())
        + ee(3, 3, 2, 2) * (q - q.inv())
        - ee(3, 3, 3, 3) * q.inv()
        + (ee(3, 4, 2, 1) + ee(4, 3, 1, 2)) * (sq * sx)
        + sym(3, 4, 4, 3) * lam
        + ee(4, 4, 1, 1) * x
        + (ee(4, 4, 2, 2) + ee(4, 4, 3, 3)) * (ql2 - q.inv())
        + ee(4, 4, 4, 4) * ql2;
    BraidPair { b, binv }
}

/// Builds the pair by one route.
pub fn braid_pair_via(route: BraidRoute, g: &GeneratorSet, p: &DeformParams) -> Result<BraidPair> {
    match route {
        BraidRoute::Explicit => Ok(explicit_pair(p)),
        BraidRoute::Projector => Ok(pair_from_projectors(&projectors_from_casimirs(g, p, 0)?, p)),
    }
}

/// The braid pair. Away from the TL point both routes are built and must agree;
/// at the TL point (where the projectors do not exist) the explicit route is used.
pub fn braid_pair(g: &GeneratorSet, p: &DeformParams) -> Result<BraidPair> {
    let explicit = explicit_pair(p);
    if p.tl_mode {
        return Ok(explicit);
    }
    let proj = braid_pair_via(BraidRoute::Projector, g, p)?;
    let res = rel_residual(&proj.b, &explicit.b).max(rel_residual(&proj.binv, &explicit.binv));
    if res > ToleranceConfig::default().identity_tol {
        return Err(Error::FormulaMismatch { what: "braid pair: projector vs explicit entries".into(), residual: res });
    }
    Ok(proj)
}

/// Inversion of the braid formulas: the projectors as combinations of Id, b, b⁻¹.
pub fn projectors_from_braid(pair: &BraidPair, p: &DeformParams) -> Result<ProjectorTriple> {
    require_generic(p)?;
    let q = p.q;
    let lam = p.lambda;
    let qm = q - q.inv();
    let (m0, m1) = (p.br_mu(1.0, 0.0), p.br_mu(1.0, 1.0));
    let (d0, d1, d2) = (p.br_mu(2.0, 0.0), p.br_mu(2.0, 1.0), p.br_mu(2.0, 2.0));
    let id = identity(16);
    let (b, bi) = (&pair.b, &pair.binv);
    let o0 = (&id * m1 + (b * lam - bi / lam) / qm) * (m0 / (d0 * d1));
    let o1 = (&id * (q * lam * lam + (q * lam * lam).inv()) - b - bi) * (m0 * m1 / (d0 * d2));
    let o2 = (&id * m0 + (bi * (q * lam) - b / (q * lam)) / qm) * (m1 / (d1 * d2));
    Ok(ProjectorTriple { o0, o1, o2 })
}

/// The three roots of the cubic satisfied by b: (−q, qλ², q⁻¹λ⁻²).
pub fn braid_roots(p: &DeformParams) -> [C64; 3] {
    let ql2 = p.q * p.lambda * p.lambda;
    [-p.q, ql2, ql2.inv()]
}

/// b·b⁻¹ = Id, the spectrum {−q ×8, qλ² ×4, q⁻¹λ⁻² ×4} and, away from the TL
/// point, b·Π_a = β_a·Π_a.
pub fn check_braid_pair(pair: &BraidPair, p: &DeformParams, tol: &ToleranceConfig) -> Result<RelationReport> {
    let mut rep = RelationReport::new();
    rep.add("b binv = Id", rel_residual(&(&pair.b * &pair.binv), &identity(16)), tol.identity_tol);
    let [m, p0, p2] = braid_roots(p);
    let mut expected = vec![m; 8];
    expected.extend(std::iter::repeat_n(p0, 4));
    expected.extend(std::iter::repeat_n(p2, 4));
    let ev = eigenvalues(&pair.b)?;
    // a Jordan block at the TL point limits eigenvalue accuracy to ~sqrt(eps)
    let spec_tol = if p.tl_mode { 1e-6 } else { tol.spectrum_tol };
    rep.add("spectrum of b", spectrum_distance(&ev, &expected), spec_tol);
    if !p.tl_mode {
        let t = projectors_from_braid(pair, p)?;
        for (a, beta) in [(0, p0), (1, m), (2, p2)] {
            let o = t.get(a);
            rep.add(format!("b O{a} = beta_{a} O{a}"), rel_residual(&(&pair.b * o), &(o * beta)), tol.identity_tol);
        }
    }
    Ok(rep)
}

fn id_plus(m: &Mat, s: C64) -> Mat {
    m + identity(m.nrows()) * s
}

/// Cubic equations, braid relations, far commutation and the supplementary
/// relation, on 3- and 4-site embeddings.
pub fn check_cubic_algebra(pair: &BraidPair, p: &DeformParams, tol: &ToleranceConfig) -> Result<RelationReport> {
    let t = tol.identity_tol;
    let mut rep = RelationReport::new();
    let [m, p0, p2] = braid_roots(p);
    let (b, bi) = (&pair.b, &pair.binv);
    let cubic = id_plus(b, -m) * id_plus(b, -p0) * id_plus(b, -p2);
    rep.add("(b+q)(b-q lambda^2)(b-q^-1 lambda^-2) = 0", fro(&cubic) / 1f64.max(fro(b).powi(3)), t);
    let cubic = id_plus(bi, -m.inv()) * id_plus(bi, -p0) * id_plus(bi, -p2);
    rep.add("(binv+q^-1)(binv-q lambda^2)(binv-q^-1 lambda^-2) = 0", fro(&cubic) / 1f64.max(fro(bi).powi(3)), t);

    let b1 = embed(b, 1, 3)?.mat;
    let b2 = embed(b, 2, 3)?.mat;
    let bi1 = embed(bi, 1, 3)?.mat;
    let bi2 = embed(bi, 2, 3)?.mat;
    rep.add("b1 b2 b1 = b2 b1 b2", rel_residual(&(&b1 * &b2 * &b1), &(&b2 * &b1 * &b2)), t);
    rep.add("binv1 binv2 binv1 = binv2 binv1 binv2", rel_residual(&(&bi1 * &bi2 * &bi1), &(&bi2 * &bi1 * &bi2)), t);

    let c1 = embed(b, 1, 4)?.mat;
    let c3 = embed(b, 3, 4)?.mat;
    rep.add("b1 b3 = b3 b1 (L=4)", rel_residual(&(&c1 * &c3), &(&c3 * &c1)), t);

    let x = p.x;
    let lhs = id_plus(&b1, -x) * &bi2 * id_plus(&b1, -x) - &bi1 * id_plus(&b2, -x) * &bi1;
    let rhs = id_plus(&b2, -x) * &bi1 * id_plus(&b2, -x) - &bi2 * id_plus(&b1, -x) * &bi2;
    rep.add("supplementary relation (b1-x) binv2 (b1-x) - ... (L=3)", rel_residual(&lhs, &rhs), t);
    Ok(rep)
}

/// One candidate/relation row of the quotient-relation probe.
#[derive(Debug, Clone, Serialize)]
pub struct BwmProbeEntry {
    pub candidate: String,
    pub relation: String,
    /// Least-squares scalar [re, im].
    pub alpha: [f64; 2],
    /// Residual after the optimal scalar fit, relative to the left-hand side.
    pub residual: f64,
}

/// For e ∈ {O0, O1, O2} (the idempotents of span{Id, b, b⁻¹}) fits
/// e² = αe, e_1e_2e_1 = α′e_1, e_2e_1e_2 = α′e_2, e_1b_2e_1 = α″e_1,
/// e_2b_1e_2 = α″e_2, and returns each best-fit scalar with its residual.
/// The report gates on the quotient relations FAILING for O0 and O2
/// (residual > 1e-3) and on e² = e; O1 rows are informative.
pub fn bwm_failure_probe(
    pair: &BraidPair,
    p: &DeformParams,
    tol: &ToleranceConfig,
) -> Result<(RelationReport, Vec<BwmProbeEntry>)> {
    let triple = projectors_from_braid(pair, p)?;
    let mut rep = RelationReport::new();
    let mut rows = Vec::new();
    let threshold = 1e-3;
    let b1 = embed(&pair.b, 1, 3)?.mat;
    let b2 = embed(&pair.b, 2, 3)?.mat;
    for a in 0..3 {
        let name = format!("O{a}");
        let e = triple.get(a);
        let e1 = embed(e, 1, 3)?.mat;
        let e2 = embed(e, 2, 3)?.mat;
        let fits: [(&str, Mat, &Mat); 5] = [
            ("e^2 = alpha e", e * e, e),
            ("e1 e2 e1 = alpha' e1", &e1 * &e2 * &e1, &e1),
            ("e2 e1 e2 = alpha' e2", &e2 * &e1 * &e2, &e2),
            ("e1 b2 e1 = alpha'' e1", &e1 * &b2 * &e1, &e1),
            ("e2 b1 e2 = alpha'' e2", &e2 * &b1 * &e2, &e2),
        ];
        for (k, (rel, lhs, basis)) in fits.iter().enumerate() {
            let (alpha, resid) = scalar_fit(basis, lhs);
            let resid = resid * 1f64.max(fro(lhs)) / fro(lhs).max(f64::MIN_POSITIVE);
            rows.push(BwmProbeEntry {
                candidate: name.clone(),
                relation: rel.to_string(),
                alpha: [alpha.re, alpha.im],
                residual: resid,
            });
            let label = format!("{name}: {rel}");
            let check = if k == 0 {
                CheckReport::new(label, resid, tol.identity_tol)
            } else if a == 1 {
                CheckReport::informative(label, resid, threshold)
            } else {
                CheckReport::exceeds(label, resid, threshold)
            };
            rep.push(check.with_value(alpha));
        }
    }
    Ok((rep, rows))
}
