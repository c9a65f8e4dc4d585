//! Acceptance harness: one PASS/FAIL line per criterion, nonzero exit on failure.

use std::time::Instant;

use uqchain::boundary::{k_minus, k_plus, reflection_suite, Family, KMatrixSpec};
use uqchain::braid::{
    braid_pair, braid_pair_via, braid_roots, bwm_failure_probe, check_cubic_algebra, check_decomposition, explicit_pair,
    projectors_from_braid, projectors_from_casimirs, BraidRoute,
};
use uqchain::chains::{
    c_plus_sol_check, closed_chain_report, derivative_construction_check, h_open, h_periodic, hdiff_check,
    invariance_report, open_chain_commutation, spectrum, tl_suite, twist_equivalence_check, ChainSpec, Model,
    OpenBoundary,
};
use uqchain::cli::{run_suite, CommonArgs, Format, Suite};
use uqchain::coproduct::coproduct_l;
use uqchain::linalg::{c, comm, eigenvalues, fro, identity, r, rel_residual, spectrum_distance, trace};
use uqchain::scalars::{derive_params, tl_params};
use uqchain::spectral::{spectral_suite, zeta, CrossingData};
use uqchain::uqsl21::{build_rep, casimir_scalar, check_casimir_relations, check_defining_relations, fermionic_basis, Generator};
use uqchain::{DeformParams, RelationReport, Result, ToleranceConfig, C64};

const FAMILIES: [Family; 3] = [Family::Trivial, Family::A, Family::B];
const CS: [C64; 2] = [C64::new(0.5, 0.0), C64::new(-2.3, 0.4)];

type Criterion = (&'static str, Box<dyn Fn() -> Result<Outcome>>);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome { pass, detail: detail.into() })
}

fn grid(tol: &ToleranceConfig) -> Vec<DeformParams> {
    let mut out = Vec::new();
    for q in [r(1.2), c(0.7, 0.2)] {
        for mu in [0.3, -0.45] {
            for om in [1, -1] {
                out.push(derive_params(q, r(mu), om, tol).expect("grid point is generic"));
            }
        }
    }
    out
}

fn points(tol: &ToleranceConfig) -> Vec<DeformParams> {
    vec![
        derive_params(r(1.2), r(0.3), 1, tol).unwrap(),
        derive_params(c(0.7, 0.2), r(-0.45), -1, tol).unwrap(),
    ]
}

fn worst(reports: &[RelationReport]) -> f64 {
    reports.iter().map(|r| r.max_residual()).fold(0.0, f64::max)
}

fn c1_relations(tol: &ToleranceConfig) -> Result<Outcome> {
    let start = Instant::now();
    let mut reps = Vec::new();
    for p in grid(tol) {
        let g = build_rep(&p);
        reps.push(check_defining_relations(&g, tol));
        reps.push(check_defining_relations(&fermionic_basis(&g)?, tol));
    }
    let secs = start.elapsed().as_secs_f64();
    let res = worst(&reps);
    outcome(res <= 1e-10 && secs < 1.0, format!("max residual {res:.2e} over 8 points, {secs:.3} s"))
}

fn c2_casimirs(tol: &ToleranceConfig) -> Result<Outcome> {
    let mut reps = Vec::new();
    let mut scal = 0f64;
    for p in grid(tol) {
        let g = build_rep(&p);
        reps.push(check_casimir_relations(&g, &p, -1..=3, tol)?);
        for pp in -1..=3 {
            scal = scal.max(casimir_scalar(pp, &g, &p)?.1);
        }
    }
    let res = worst(&reps);
    let ok = reps.iter().all(|r| r.all_pass()) && res <= 1e-10 && scal <= 1e-11;
    outcome(ok, format!("max residual {res:.2e}, Schur scalarity {scal:.2e}"))
}

fn c3_projectors(tol: &ToleranceConfig) -> Result<Outcome> {
    let mut reps = Vec::new();
    let mut cross = 0f64;
    for p in grid(tol) {
        let g = build_rep(&p);
        let t = projectors_from_casimirs(&g, &p, 0)?;
        reps.push(t.check(tol));
        reps.push(check_decomposition(&g, &p, &[-1, 0, 1, 2, 3], &t, tol)?);
        let from_b = projectors_from_braid(&explicit_pair(&p), &p)?;
        for a in 0..3 {
            cross = cross.max(rel_residual(from_b.get(a), t.get(a)));
        }
    }
    let res = worst(&reps).max(cross);
    let ok = reps.iter().all(|r| r.all_pass()) && res <= 1e-10;
    outcome(ok, format!("max residual {res:.2e}, ranks (4, 8, 4)"))
}

fn c4_braid(tol: &ToleranceConfig) -> Result<Outcome> {
    let (mut entry, mut alg, mut spec) = (0f64, 0f64, 0f64);
    let mut bwm_min = f64::INFINITY;
    let mut ok = true;
    for p in grid(tol) {
        let g = build_rep(&p);
        let e = explicit_pair(&p);
        let pr = braid_pair_via(BraidRoute::Projector, &g, &p)?;
        entry = entry.max(rel_residual(&e.b, &pr.b)).max(rel_residual(&e.binv, &pr.binv));
        let cub = check_cubic_algebra(&pr, &p, tol)?;
        ok &= cub.all_pass();
        alg = alg.max(cub.max_residual());
        let [a, b, d] = braid_roots(&p);
        let mut want = vec![a; 8];
        want.extend([b; 4]);
        want.extend([d; 4]);
        spec = spec.max(spectrum_distance(&eigenvalues(&pr.b)?, &want));
        let (probe, _) = bwm_failure_probe(&pr, &p, tol)?;
        ok &= probe.all_pass();
        for ch in probe.checks.iter().filter(|c| !c.informative && c.note.is_some()) {
            bwm_min = bwm_min.min(ch.residual);
        }
    }
    ok &= entry <= 1e-10 && alg <= 1e-10 && spec <= 1e-9 && bwm_min > 1e-3;
    outcome(
        ok,
        format!("b entries {entry:.2e}, cubic/braid {alg:.2e}, eigenvalues {spec:.2e}, min BWM post-fit {bwm_min:.2e}"),
    )
}

fn c5_spectral(tol: &ToleranceConfig) -> Result<Outcome> {
    let mut ok = true;
    let mut res = 0f64;
    let mut zeta0 = 0f64;
    let mut secs = 0f64;
    for p in points(tol) {
        let start = Instant::now();
        let pair = braid_pair(&build_rep(&p), &p)?;
        let rep = spectral_suite(&pair, &p, tol, 20)?;
        secs = secs.max(start.elapsed().as_secs_f64());
        ok &= rep.all_pass();
        res = res.max(rep.max_residual());
        zeta0 = zeta0.max((zeta(r(0.0), &p)? - 1.0).norm());
    }
    ok &= res <= 1e-9 && zeta0 <= 1e-12 && secs < 10.0;
    outcome(ok, format!("max residual {res:.2e} over 20 samples, |zeta(0)-1| {zeta0:.1e}, {secs:.2} s"))
}

fn c6_reflection(tol: &ToleranceConfig) -> Result<Outcome> {
    let mut ok = true;
    let mut res = 0f64;
    let mut zero = 0f64;
    for p in points(tol) {
        let pair = braid_pair(&build_rep(&p), &p)?;
        let cd = CrossingData::new(&p);
        for fam in FAMILIES {
            for cc in CS {
                let (m, pl) = (KMatrixSpec::minus(fam, cc), KMatrixSpec::plus(fam, cc));
                let rep = reflection_suite(&m, &pl, &pair, &p, tol, 20)?;
                ok &= rep.all_pass();
                res = res.max(rep.max_residual());
                zero = zero.max(rel_residual(&k_minus(&m, r(0.0), &p)?, &identity(4)));
                zero = zero.max(trace(&k_plus(&pl, r(0.0), &p, &cd)?).norm());
            }
        }
    }
    ok &= res <= 1e-9 && zero <= 1e-12;
    outcome(ok, format!("max RE residual {res:.2e}, K-(0)/tr K+(0) {zero:.1e}"))
}

fn c7_chain(tol: &ToleranceConfig) -> Result<Outcome> {
    let mut ok = true;
    let mut res = 0f64;
    let mut secs = 0f64;
    for p in points(tol) {
        let start = Instant::now();
        let pair = braid_pair(&build_rep(&p), &p)?;
        let closed = closed_chain_report(3, &pair, &p, tol, 5)?;
        ok &= closed.all_pass();
        res = res.max(closed.max_residual());
        for fm in FAMILIES {
            for fp in FAMILIES {
                let bd = OpenBoundary::new(fm, CS[0], fp, CS[1]);
                let rep = open_chain_commutation(3, &bd, &pair, &p, tol, 5)?;
                ok &= rep.all_pass();
                res = res.max(rep.max_residual());
            }
        }
        secs = secs.max(start.elapsed().as_secs_f64());
    }
    ok &= res <= 1e-8 && secs < 60.0;
    outcome(ok, format!("max commutator {res:.2e} (closed + 9 boundary combinations), {secs:.2} s"))
}

fn c8_invariance(tol: &ToleranceConfig) -> Result<Outcome> {
    let mut ok = true;
    let mut res = 0f64;
    let mut per = f64::INFINITY;
    for p in points(tol) {
        let g = build_rep(&p);
        let h = h_open(&ChainSpec::new(4, Model::Dist, OpenBoundary::trivial())?, &p)?;
        let rep = invariance_report(&h, &g, tol, "H_open")?;
        ok &= rep.all_pass();
        res = res.max(rep.max_residual());
        let hp = h_periodic(3, &p)?.mat;
        let e2 = coproduct_l(Generator::E2, 3, &g)?.mat;
        per = per.min(fro(&comm(&hp, &e2)));
    }
    ok &= res <= 1e-9 && per > 1e-3;
    outcome(ok, format!("open L=4 max commutator {res:.2e}; periodic ||[H, Delta(e2)]|| {per:.3}"))
}

fn c9_identities(tol: &ToleranceConfig) -> Result<Outcome> {
    let (mut hd, mut cs) = (0f64, 0f64);
    for p in points(tol) {
        for l in 2..=4 {
            hd = hd.max(hdiff_check(l, &p)?.residual);
        }
        cs = cs.max(c_plus_sol_check(3, &p, tol)?.residual);
    }
    outcome(hd <= 1e-12 && cs <= 1e-10, format!("Hdiff {hd:.2e} (L=2..4), special-parameter identity {cs:.2e}"))
}

fn c10_twist(tol: &ToleranceConfig) -> Result<Outcome> {
    let mut res = 0f64;
    let mut secs = 0f64;
    for p in points(tol) {
        for l in 2..=4 {
            res = res.max(twist_equivalence_check(l, &p, tol)?.residual);
        }
        let h = h_open(&ChainSpec::new(4, Model::Dist, OpenBoundary::trivial())?, &p)?;
        let start = Instant::now();
        spectrum(&h, tol)?;
        secs = secs.max(start.elapsed().as_secs_f64());
    }
    outcome(res <= 1e-8 && secs < 5.0, format!("max spectral distance {res:.2e}; L=4 diagonalization {secs:.2} s"))
}

fn c11_derivative(tol: &ToleranceConfig) -> Result<Outcome> {
    let (mut h, mut s) = (0f64, 0f64);
    for p in points(tol) {
        let pair = braid_pair(&build_rep(&p), &p)?;
        for cc in CS {
            let bd = OpenBoundary::new(Family::B, cc, Family::B, cc);
            let rep = derivative_construction_check(2, &bd, &pair, &p, tol)?;
            for ch in &rep.checks {
                if ch.name.starts_with("kappa * normalized") {
                    h = h.max(ch.residual);
                }
                if ch.name.starts_with("K -> (1+u/2)K") {
                    s = s.max(ch.residual);
                }
            }
        }
    }
    outcome(h <= 1e-5 && s <= 1e-5, format!("d2t/du2 vs h_open mod Id {h:.2e}; rescaled K {s:.2e}"))
}

fn c12_tl(tol: &ToleranceConfig) -> Result<Outcome> {
    let mut ok = true;
    let mut res = 0f64;
    let mut coeffs = Vec::new();
    for om in [1, -1] {
        let p = tl_params(r(1.4), om, tol)?;
        let rep = tl_suite(3, &build_rep(&p), &p, tol)?;
        ok &= rep.all_pass();
        for ch in &rep.checks {
            if ch.name.starts_with("e_") {
                res = res.max(ch.residual);
            }
            if ch.name == "(P e)^2 = a (P e)" {
                let v = ch.value.unwrap_or([0.0; 2]);
                ok &= v[0].hypot(v[1]) > 1e-6;
                coeffs.push(v[0]);
            }
        }
    }
    ok &= res <= 1e-10;
    outcome(ok, format!("TL relations {res:.2e}; parity-hermitized square coefficient {coeffs:?}"))
}

fn full_verify() -> Result<Outcome> {
    let common = CommonArgs {
        q: r(1.2),
        mu: r(0.3),
        omega: 1,
        seed: 7,
        identity_tol: None,
        fd_tol: None,
        spectrum_tol: None,
        format: Format::Json,
        out: None,
    };
    let tol = common.tolerances()?;
    let start = Instant::now();
    let rep = run_suite(Suite::All, &common, 3, 20, &tol)?;
    let secs = start.elapsed().as_secs_f64();
    outcome(rep.all_pass() && secs < 120.0, format!("{} checks, {secs:.1} s", rep.checks.len()))
}

fn main() {
    let tol = ToleranceConfig::default();
    let criteria: Vec<Criterion> = vec![
        ("1 defining relations", Box::new(move || c1_relations(&tol))),
        ("2 Casimir/Scasimir", Box::new(move || c2_casimirs(&tol))),
        ("3 projectors", Box::new(move || c3_projectors(&tol))),
        ("4 braid pair", Box::new(move || c4_braid(&tol))),
        ("5 spectral R-matrix", Box::new(move || c5_spectral(&tol))),
        ("6 reflection equations", Box::new(move || c6_reflection(&tol))),
        ("7 chain commutation L=3", Box::new(move || c7_chain(&tol))),
        ("8 quantum-group invariance", Box::new(move || c8_invariance(&tol))),
        ("9 exact identities", Box::new(move || c9_identities(&tol))),
        ("10 twist equivalence", Box::new(move || c10_twist(&tol))),
        ("11 derivative construction", Box::new(move || c11_derivative(&tol))),
        ("12 Temperley-Lieb", Box::new(move || c12_tl(&tol))),
        ("full verify --suite all", Box::new(full_verify)),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let (pass, detail) = match run() {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        let secs = start.elapsed().as_secs_f64();
        if !pass {
            failed += 1;
        }
        println!("[{}] {name}: {detail} [{secs:.2} s]", if pass { "PASS" } else { "FAIL" });
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all criteria passed");
}
