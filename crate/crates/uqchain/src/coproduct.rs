//! Coproduct images in the non-graded (Jordan–Wigner transformed) convention,
//! iterated coproducts, formal words, and site embeddings.
//!
//! After the sign transform every chain object is an ordinary matrix: the
//! algebra relations hold with plain matrix products and traces are ordinary
//! traces.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::linalg::{
    comm, diag, embed_legs, fro, identity, inverse, kron, kron_all, kron_pow, r, rel_residual, Mat, LOCAL_DIM,
};
use crate::report::RelationReport;
use crate::scalars::{cartan_qbracket, DeformParams, ToleranceConfig};
use crate::uqsl21::{
    build_e3f3, casimir_c_closed, casimir_q, check_defining_relations, fermionic_basis, scasimir_s, Generator,
    GeneratorSet, QSign,
};

/// Degrees of the four basis states.
pub const STATE_DEGREES: [u8; 4] = [0, 1, 1, 0];

pub const DEFAULT_MAX_SITES: usize = 6;
pub const DEFAULT_MAX_SPECTRUM_SITES: usize = 5;

fn env_limit(var: &str, default: usize) -> usize {
    std::env::var(var).ok().and_then(|v| v.parse().ok()).unwrap_or(default)
}

/// Largest chain length for which dense operators are built
/// (override with `UQCHAIN_MAX_SITES`).
pub fn max_sites() -> usize {
    static V: OnceLock<usize> = OnceLock::new();
    *V.get_or_init(|| env_limit("UQCHAIN_MAX_SITES", DEFAULT_MAX_SITES))
}

/// Largest chain length for dense diagonalization
/// (override with `UQCHAIN_MAX_SPECTRUM_SITES`).
pub fn max_spectrum_sites() -> usize {
    static V: OnceLock<usize> = OnceLock::new();
    *V.get_or_init(|| env_limit("UQCHAIN_MAX_SPECTRUM_SITES", DEFAULT_MAX_SPECTRUM_SITES))
}

pub fn check_sites(sites: usize, limit: usize) -> Result<()> {
    if sites > limit {
        Err(Error::SizeLimit(format!("L = {sites} exceeds the limit {limit} (dimension 4^L)")))
    } else {
        Ok(())
    }
}

/// Grading operator diag((−1)^deg) on one site.
pub fn parity() -> Mat {
    let d: Vec<_> = STATE_DEGREES.iter().map(|&g| r(if g == 1 { -1.0 } else { 1.0 })).collect();
    diag(&d)
}

/// A dense operator on L sites (dimension 4^L).
#[derive(Debug, Clone, PartialEq)]
pub struct ChainOperator {
    pub sites: usize,
    pub mat: Mat,
}

impl ChainOperator {
    pub fn new(sites: usize, mat: Mat) -> Result<Self> {
        let dim = LOCAL_DIM.pow(sites as u32);
        if mat.nrows() != dim || mat.ncols() != dim {
            return Err(Error::Config(format!(
                "operator of size {}x{} is not 4^{sites}-dimensional",
                mat.nrows(),
                mat.ncols()
            )));
        }
        Ok(ChainOperator { sites, mat })
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }
}

/// Entrywise sign (−1)^{deg(j)(deg(k)+deg(l))} on the E_ij ⊗ E_kl component.
pub fn jordan_wigner(m: &Mat) -> Mat {
    let n = LOCAL_DIM;
    let mut out = m.clone();
    for i in 0..n {
        for k in 0..n {
            for j in 0..n {
                for l in 0..n {
                    let s = STATE_DEGREES[j] * (STATE_DEGREES[k] + STATE_DEGREES[l]);
                    if s % 2 == 1 {
                        out[(i * n + k, j * n + l)] = -out[(i * n + k, j * n + l)];
                    }
                }
            }
        }
    }
    out
}

fn k_of(g: &GeneratorSet, gen: Generator) -> &Mat {
    if gen.root() == 0 {
        &g.k1
    } else {
        &g.k2
    }
}

/// (ρ⊗ρ)Δ(generator) after the Jordan–Wigner transform. The coproduct is
/// Δk = k⊗k, Δe = e⊗1 + k⊗e, Δf = f⊗k⁻¹ + 1⊗f in whichever basis `g` is given.
pub fn coproduct_generator(gen: Generator, g: &GeneratorSet) -> Result<Mat> {
    if g.dim() != LOCAL_DIM {
        return Err(Error::Config("coproduct_generator expects single-site generators".into()));
    }
    let id = identity(LOCAL_DIM);
    let x = g.get(gen);
    let k = k_of(g, gen);
    let graded = match gen {
        Generator::K1 | Generator::K2 => kron(x, x),
        Generator::E1 | Generator::E2 => kron(x, &id) + kron(k, x),
        Generator::F1 | Generator::F2 => {
            kron(x, &inverse(k).expect("k invertible")) + kron(&id, x)
        }
    };
    Ok(jordan_wigner(&graded))
}

/// All six two-site images packaged as a generator set (same basis as `g`).
pub fn coproduct_set(g: &GeneratorSet) -> Result<GeneratorSet> {
    Ok(GeneratorSet {
        e1: coproduct_generator(Generator::E1, g)?,
        e2: coproduct_generator(Generator::E2, g)?,
        f1: coproduct_generator(Generator::F1, g)?,
        f2: coproduct_generator(Generator::F2, g)?,
        k1: coproduct_generator(Generator::K1, g)?,
        k2: coproduct_generator(Generator::K2, g)?,
        basis: g.basis,
        q: g.q,
    })
}

/// ρ^{⊗L}Δ^{(L)}(generator) with left nesting, in closed form:
/// e ↦ Σ_j (k·P^{deg e})^{⊗(j−1)} ⊗ e ⊗ 1^{⊗(L−j)},
/// f ↦ Σ_j (P^{deg f})^{⊗(j−1)} ⊗ f ⊗ (k⁻¹)^{⊗(L−j)}, P the grading operator.
pub fn coproduct_l(gen: Generator, sites: usize, g: &GeneratorSet) -> Result<ChainOperator> {
    if sites == 0 {
        return Err(Error::Config("L must be at least 1".into()));
    }
    check_sites(sites, max_sites())?;
    let id = identity(LOCAL_DIM);
    let x = g.get(gen);
    let k = k_of(g, gen);
    let deg = g.degree(gen);
    let sign = if deg == 1 { parity() } else { id.clone() };
    let mat = match gen {
        Generator::K1 | Generator::K2 => kron_pow(x, sites),
        Generator::E1 | Generator::E2 => {
            let left = k * &sign;
            let mut acc = Mat::zeros(LOCAL_DIM.pow(sites as u32), LOCAL_DIM.pow(sites as u32));
            for j in 1..=sites {
                acc += kron_all(&[kron_pow(&left, j - 1), x.clone(), kron_pow(&id, sites - j)]);
            }
            acc
        }
        Generator::F1 | Generator::F2 => {
            let kinv = inverse(k).expect("k invertible");
            let mut acc = Mat::zeros(LOCAL_DIM.pow(sites as u32), LOCAL_DIM.pow(sites as u32));
            for j in 1..=sites {
                acc += kron_all(&[kron_pow(&sign, j - 1), x.clone(), kron_pow(&kinv, sites - j)]);
            }
            acc
        }
    };
    ChainOperator::new(sites, mat)
}

/// All six L-site images as a generator set.
pub fn coproduct_set_l(g: &GeneratorSet, sites: usize) -> Result<GeneratorSet> {
    let img = |gen| coproduct_l(gen, sites, g).map(|c| c.mat);
    Ok(GeneratorSet {
        e1: img(Generator::E1)?,
        e2: img(Generator::E2)?,
        f1: img(Generator::F1)?,
        f2: img(Generator::F2)?,
        k1: img(Generator::K1)?,
        k2: img(Generator::K2)?,
        basis: g.basis,
        q: g.q,
    })
}

/// Right-nested iteration (1⊗Δ)∘Δ built from two-site images; used to check
/// coassociativity against the left-nested closed form.
pub fn coproduct_l_right_nested(gen: Generator, g: &GeneratorSet) -> Result<Mat> {
    // (1⊗Δ)Δ(x) for three sites, expressed through two-site data
    let id = identity(LOCAL_DIM);
    let x = g.get(gen);
    let k = k_of(g, gen);
    let two = coproduct_generator(gen, g)?;
    let deg = g.degree(gen);
    let sign = if deg == 1 { parity() } else { id.clone() };
    Ok(match gen {
        Generator::K1 | Generator::K2 => kron(x, &two),
        Generator::E1 | Generator::E2 => {
            kron_all(&[x.clone(), id.clone(), id.clone()]) + kron(&(k * &sign), &two)
        }
        Generator::F1 | Generator::F2 => {
            let kinv = inverse(k).expect("k invertible");
            kron_all(&[x.clone(), kinv.clone(), kinv]) + kron(&sign, &two)
        }
    })
}

/// Places a one- or two-site operator at (1-based) `site` of an L-site chain.
pub fn embed(op: &Mat, site: usize, sites: usize) -> Result<ChainOperator> {
    check_sites(sites, max_sites())?;
    let legs = match op.nrows() {
        4 => 1,
        16 => 2,
        n => return Err(Error::Config(format!("embed expects a 4x4 or 16x16 operator, got {n}x{n}"))),
    };
    if site == 0 || site + legs - 1 > sites {
        return Err(Error::SiteOutOfRange { site, sites });
    }
    let leg_list: Vec<usize> = (site - 1..site - 1 + legs).collect();
    ChainOperator::new(sites, embed_legs(op, &leg_list, sites, LOCAL_DIM))
}

/// Evaluates a formal word under the coproduct. Tokens are separated by
/// whitespace or `*`:
/// `id`, `e1 e2 f1 f2 k1 k2` (optionally `^n`), `e3 f3`, `C<p>`, `S<p>`,
/// `Q+<p>`, `Q-<p>`, `[h1+h2<±n>]`, `[h2<±n>]`, `[h1<±n>]`.
pub fn coproduct_element(word: &str, g: &GeneratorSet, p: &DeformParams) -> Result<Mat> {
    let dg = coproduct_set(g)?;
    evaluate_word(word, &dg, p)
}

/// Evaluates a formal word on an arbitrary generator set (any dimension).
pub fn evaluate_word(word: &str, g: &GeneratorSet, p: &DeformParams) -> Result<Mat> {
    let mut acc = identity(g.dim());
    for tok in word.split(|ch: char| ch.is_whitespace() || ch == '*').filter(|t| !t.is_empty()) {
        acc *= token_value(tok, g, p)?;
    }
    Ok(acc)
}

fn parse_int(s: &str, tok: &str) -> Result<i32> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(0);
    }
    s.strip_prefix('+').unwrap_or(s).parse::<i32>().map_err(|_| Error::UnknownToken(tok.to_string()))
}

fn token_value(tok: &str, g: &GeneratorSet, p: &DeformParams) -> Result<Mat> {
    let unknown = || Error::UnknownToken(tok.to_string());
    if tok == "id" || tok == "1" {
        return Ok(identity(g.dim()));
    }
    if let Some(inner) = tok.strip_prefix('[').and_then(|t| t.strip_suffix(']')) {
        let (k, rest) = if let Some(rest) = inner.strip_prefix("h1+h2") {
            (&g.k1 * &g.k2, rest)
        } else if let Some(rest) = inner.strip_prefix("h2") {
            (g.k2.clone(), rest)
        } else if let Some(rest) = inner.strip_prefix("h1") {
            (g.k1.clone(), rest)
        } else {
            return Err(unknown());
        };
        return cartan_qbracket(&k, parse_int(rest, tok)?, p);
    }
    if let Some(rest) = tok.strip_prefix("Q+") {
        return casimir_q(parse_int(rest, tok)?, QSign::Plus, g, p);
    }
    if let Some(rest) = tok.strip_prefix("Q-") {
        return casimir_q(parse_int(rest, tok)?, QSign::Minus, g, p);
    }
    if let Some(rest) = tok.strip_prefix('C') {
        if rest.is_empty() {
            return Err(unknown());
        }
        return casimir_c_closed(parse_int(rest, tok)?, g, p);
    }
    if let Some(rest) = tok.strip_prefix('S') {
        if rest.is_empty() {
            return Err(unknown());
        }
        return scasimir_s(parse_int(rest, tok)?, g, p);
    }
    let (name, power) = match tok.split_once('^') {
        Some((n, e)) => (n, e.parse::<i32>().map_err(|_| unknown())?),
        None => (tok, 1),
    };
    let base = match name {
        "e3" => build_e3f3(g)?.0,
        "f3" => build_e3f3(g)?.1,
        _ => g.get(name.parse::<Generator>().map_err(|_| unknown())?).clone(),
    };
    if power < 0 && inverse(&base).is_none() {
        return Err(unknown());
    }
    Ok(crate::linalg::mpow(&base, power))
}

/// Morphism property of the coproduct images (both bases, L = 2, 3, 4),
/// closed form vs Jordan–Wigner, coassociativity, and centrality of Δ(C₁).
pub fn coproduct_report(g: &GeneratorSet, p: &DeformParams, tol: &ToleranceConfig) -> Result<RelationReport> {
    let t = tol.identity_tol;
    let mut rep = RelationReport::new();
    let fg = fermionic_basis(g)?;
    for (label, set) in [("distinguished", g), ("fermionic", &fg)] {
        let dg = coproduct_set(set)?;
        rep.extend(check_defining_relations(&dg, tol).prefixed(&format!("Delta ({label}): ")));
        let mut jw = 0f64;
        for gen in Generator::ALL {
            jw = jw.max(rel_residual(&coproduct_generator(gen, set)?, &coproduct_l(gen, 2, set)?.mat));
        }
        rep.add(format!("closed-form L=2 image = Jordan-Wigner transform ({label})"), jw, t);
    }
    for l in [3, 4] {
        let set = coproduct_set_l(g, l)?;
        rep.extend(check_defining_relations(&set, tol).prefixed(&format!("Delta^({l}): ")));
    }
    let mut coassoc = 0f64;
    for gen in Generator::ALL {
        coassoc = coassoc.max(rel_residual(&coproduct_l(gen, 3, g)?.mat, &coproduct_l_right_nested(gen, g)?));
    }
    rep.add("(Delta x id)Delta = (id x Delta)Delta", coassoc, t);
    let dg = coproduct_set(g)?;
    let c1 = coproduct_element("C1", g, p)?;
    let mut cen = 0f64;
    for gen in Generator::ALL {
        let x = dg.get(gen);
        cen = cen.max(fro(&comm(x, &c1)) / 1f64.max(fro(x) * fro(&c1)));
    }
    rep.add("[Delta(x), Delta(C1)] = 0", cen, t);
    let qp = coproduct_element("Q+1", g, p)?;
    let qm = coproduct_element("Q-1", g, p)?;
    rep.add("Delta(Q+1) Delta(Q-1) = 0", fro(&(&qp * &qm)) / 1f64.max(fro(&qp) * fro(&qm)), t);
    rep.add("Delta(Q+1) + Delta(Q-1) = Delta(C1)", rel_residual(&(&qp + &qm), &c1), t);
    Ok(rep)
}
