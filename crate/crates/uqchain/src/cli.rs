//! Command-line surface: verification suites, operator export and spectra.
//!
//! Exit codes: 0 success / all checks pass, 1 a check failed, 2 usage or
//! configuration error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::boundary::{boundary_consistency, k_minus, k_plus, reflection_suite, Family, KMatrixSpec};
use crate::braid::{
    braid_pair, braid_pair_via, bwm_failure_probe, check_braid_pair, check_cubic_algebra, check_decomposition,
    explicit_pair, projectors_from_braid, projectors_from_casimirs, BraidRoute,
};
use crate::chains::{
    c_plus_sol_check, closed_chain_report, derivative_construction_check, h_open, h_periodic, h_two_site, hdiff_check,
    invariance_report, open_chain_commutation, spectrum, tl_suite, twist_equivalence_check, two_site_report, ChainSpec,
    Model, OpenBoundary,
};
use crate::coproduct::{check_sites, coproduct_l, coproduct_report, coproduct_set, max_spectrum_sites};
use crate::error::{Error, Result};
use crate::linalg::{c, comm, fro, r, rel_residual, Mat, C64};
use crate::report::{CheckReport, RelationReport};
use crate::scalars::{derive_params, tl_params, DeformParams, ToleranceConfig};
use crate::spectral::{rcheck, spectral_suite, CrossingData};
use crate::uqsl21::{build_rep, casimir_c, casimir_scalar, check_casimir_relations, check_defining_relations, fermionic_basis, Generator, GeneratorSet};

/// Parses "a", "a+bi", "a-bi", "bi", "i" (also with `j`).
pub fn parse_complex(s: &str) -> std::result::Result<C64, String> {
    let t: String = s.chars().filter(|ch| !ch.is_whitespace()).collect();
    let bad = || format!("cannot parse `{s}` as a complex number (expected a, a+bi or bi)");
    if t.is_empty() {
        return Err(bad());
    }
    let Some(body) = t.strip_suffix('i').or_else(|| t.strip_suffix('j')) else {
        return t.parse::<f64>().map(r).map_err(|_| bad());
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        v => v.parse::<f64>().map_err(|_| bad())?,
    };
    let re = re.parse::<f64>().map_err(|_| bad())?;
    Ok(c(re, im))
}

fn parse_family(s: &str) -> std::result::Result<Family, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_model(s: &str) -> std::result::Result<Model, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "uqchain", version, about = "U_q(sl(2|1)) braid, R-matrix and chain Hamiltonian toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run verification suites and write a report.
    Verify(VerifyArgs),
    /// Export an operator as a dense matrix file.
    Build(BuildArgs),
    /// Sorted eigenvalues of a chain Hamiltonian with degeneracy groups.
    Spectrum(SpectrumArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Deformation parameter q ("a" or "a+bi").
    #[arg(long, default_value = "1.2", value_parser = parse_complex, allow_hyphen_values = true)]
    pub q: C64,
    /// Representation parameter μ, λ = q^μ ("a" or "a+bi").
    #[arg(long, default_value = "0.3", value_parser = parse_complex, allow_hyphen_values = true)]
    pub mu: C64,
    /// Choice of the four-dimensional representation (±1).
    #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
    pub omega: i32,
    /// Seed of the spectral-parameter sampler.
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    #[arg(long)]
    pub identity_tol: Option<f64>,
    #[arg(long)]
    pub fd_tol: Option<f64>,
    #[arg(long)]
    pub spectrum_tol: Option<f64>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Output file (stdout if absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl CommonArgs {
    pub fn tolerances(&self) -> Result<ToleranceConfig> {
        let d = ToleranceConfig::default();
        let tol = ToleranceConfig {
            identity_tol: self.identity_tol.unwrap_or(d.identity_tol),
            fd_tol: self.fd_tol.unwrap_or(d.fd_tol),
            spectrum_tol: self.spectrum_tol.unwrap_or(d.spectrum_tol),
            genericity_tol: d.genericity_tol,
            seed: self.seed,
        };
        tol.validate()?;
        Ok(tol)
    }

    fn params(&self, tol: &ToleranceConfig) -> Result<DeformParams> {
        derive_params(self.q, self.mu, self.omega, tol)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Algebra,
    Casimir,
    Coproduct,
    Braid,
    Ybe,
    Reflection,
    Chain,
    Twist,
    Tl,
    All,
}

impl Suite {
    pub const INDIVIDUAL: [Suite; 9] = [
        Suite::Algebra,
        Suite::Casimir,
        Suite::Coproduct,
        Suite::Braid,
        Suite::Ybe,
        Suite::Reflection,
        Suite::Chain,
        Suite::Twist,
        Suite::Tl,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Algebra => "algebra",
            Suite::Casimir => "casimir",
            Suite::Coproduct => "coproduct",
            Suite::Braid => "braid",
            Suite::Ybe => "ybe",
            Suite::Reflection => "reflection",
            Suite::Chain => "chain",
            Suite::Twist => "twist",
            Suite::Tl => "tl",
            Suite::All => "all",
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, value_enum, default_value = "all")]
    pub suite: Suite,
    /// Chain length for the transfer-matrix commutation checks.
    #[arg(long, default_value_t = 3)]
    pub sites: usize,
    /// Number of seeded spectral-parameter samples for the YBE/reflection suites.
    #[arg(long, default_value_t = 20)]
    pub samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Object {
    B,
    Binv,
    Rcheck,
    Kminus,
    Kplus,
    HDist,
    HFerm,
    HOpen,
    HPeriodic,
    HTl,
    Casimir,
}

#[derive(Debug, Clone, Args)]
pub struct BoundaryArgs {
    /// K⁻ family for open chains (trivial, a, b).
    #[arg(long, default_value = "trivial", value_parser = parse_family)]
    pub family_minus: Family,
    #[arg(long, default_value = "0.5", value_parser = parse_complex, allow_hyphen_values = true)]
    pub c_minus: C64,
    /// K⁺ family for open chains (trivial, a, b).
    #[arg(long, default_value = "trivial", value_parser = parse_family)]
    pub family_plus: Family,
    /// λ-free K⁺ parameter C′₊ (C₊ = qλ²C′₊).
    #[arg(long, default_value = "0.5", value_parser = parse_complex, allow_hyphen_values = true)]
    pub c_plus: C64,
}

impl BoundaryArgs {
    fn boundary(&self) -> OpenBoundary {
        OpenBoundary::new(self.family_minus, self.c_minus, self.family_plus, self.c_plus)
    }
}

#[derive(Debug, Clone, Args)]
pub struct BuildArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, value_enum)]
    pub object: Object,
    /// Spectral parameter (required for rcheck; K-matrices default to u = 0).
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub u: Option<C64>,
    /// Casimir index (required for casimir).
    #[arg(long, allow_hyphen_values = true)]
    pub p: Option<i32>,
    /// K-matrix family for kminus/kplus.
    #[arg(long, default_value = "trivial", value_parser = parse_family)]
    pub family: Family,
    /// K-matrix parameter C for kminus/kplus.
    #[arg(long, default_value = "0.5", value_parser = parse_complex, allow_hyphen_values = true)]
    pub c: C64,
    #[arg(long, default_value = "dist", value_parser = parse_model)]
    pub model: Model,
    /// Chain length (h-open, h-periodic; 1 or 2 for casimir).
    #[arg(long)]
    pub sites: Option<usize>,
    #[command(flatten)]
    pub boundary: BoundaryArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, default_value = "dist", value_parser = parse_model)]
    pub model: Model,
    #[arg(long, default_value_t = 2)]
    pub sites: usize,
    /// Use the periodic Hamiltonian (dist model only).
    #[arg(long)]
    pub periodic: bool,
    #[command(flatten)]
    pub boundary: BoundaryArgs,
}

/// Parameters recorded in every report.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Metadata {
    pub tool: &'static str,
    pub version: &'static str,
    pub suite: Suite,
    pub q: [f64; 2],
    pub mu: [f64; 2],
    pub omega: i32,
    pub tl_mode: bool,
    pub sites: usize,
    pub samples: usize,
    pub tolerances: ToleranceConfig,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Report {
    pub metadata: Metadata,
    pub checks: Vec<CheckReport>,
    pub pass: bool,
}

impl Report {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let m = &self.metadata;
        let _ = writeln!(
            s,
            "suite {} q={} mu={} omega={} seed={}",
            m.suite.name(),
            fmt_c(m.q),
            fmt_c(m.mu),
            m.omega,
            m.tolerances.seed
        );
        for ch in &self.checks {
            let tag = if ch.informative {
                "INFO"
            } else if ch.pass {
                "PASS"
            } else {
                "FAIL"
            };
            let _ = write!(s, "{tag} {} residual={:.3e} tol={:.1e}", ch.name, ch.residual, ch.tol);
            if let Some(v) = ch.value {
                let _ = write!(s, " value={}", fmt_c(v));
            }
            if let Some(n) = &ch.note {
                let _ = write!(s, " ({n})");
            }
            s.push('\n');
        }
        let _ = writeln!(s, "{}", if self.pass { "OVERALL PASS" } else { "OVERALL FAIL" });
        s
    }
}

fn fmt_c(v: [f64; 2]) -> String {
    if v[1] == 0.0 {
        format!("{}", v[0])
    } else {
        format!("{}{:+}i", v[0], v[1])
    }
}

fn pair_c(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

const SAMPLE_CS: [C64; 2] = [C64::new(0.5, 0.0), C64::new(-2.3, 0.4)];
const FAMILIES: [Family; 3] = [Family::Trivial, Family::A, Family::B];

fn algebra_suite(g: &GeneratorSet, tol: &ToleranceConfig) -> Result<RelationReport> {
    let mut rep = check_defining_relations(g, tol).prefixed("distinguished: ");
    rep.extend(check_defining_relations(&fermionic_basis(g)?, tol).prefixed("fermionic: "));
    Ok(rep)
}

fn casimir_suite(g: &GeneratorSet, p: &DeformParams, tol: &ToleranceConfig) -> Result<RelationReport> {
    let mut rep = check_casimir_relations(g, p, -1..=3, tol)?;
    for pp in -1..=3 {
        let (val, dev) = casimir_scalar(pp, g, p)?;
        rep.push(CheckReport::new(format!("C_{pp} is scalar on the representation"), dev, 1e-11).with_value(val));
    }
    Ok(rep)
}

fn braid_suite(g: &GeneratorSet, p: &DeformParams, tol: &ToleranceConfig) -> Result<RelationReport> {
    let t = tol.identity_tol;
    let triple = projectors_from_casimirs(g, p, 0)?;
    let mut rep = triple.check(tol);
    rep.extend(check_decomposition(g, p, &[-1, 0, 1, 2, 3], &triple, tol)?);
    for base in [-1, 1, 2] {
        let other = projectors_from_casimirs(g, p, base)?;
        let res = (0..3).map(|a| rel_residual(other.get(a), triple.get(a))).fold(0.0, f64::max);
        rep.add(format!("projectors from C_{base}..C_{} = from C_0..C_2", base + 2), res, t);
    }
    let explicit = explicit_pair(p);
    let proj = braid_pair_via(BraidRoute::Projector, g, p)?;
    rep.add(
        "explicit b, binv = projector-built b, binv",
        rel_residual(&explicit.b, &proj.b).max(rel_residual(&explicit.binv, &proj.binv)),
        t,
    );
    let from_b = projectors_from_braid(&explicit, p)?;
    let res = (0..3).map(|a| rel_residual(from_b.get(a), triple.get(a))).fold(0.0, f64::max);
    rep.add("O_a from b = O_a from Casimirs", res, t);
    rep.extend(check_braid_pair(&proj, p, tol)?);
    rep.extend(check_cubic_algebra(&proj, p, tol)?);
    rep.extend(bwm_failure_probe(&proj, p, tol)?.0.prefixed("BWM probe "));
    Ok(rep)
}

fn reflection_checks(g: &GeneratorSet, p: &DeformParams, tol: &ToleranceConfig, n: usize) -> Result<RelationReport> {
    let pair = braid_pair(g, p)?;
    let mut rep = RelationReport::new();
    for fam in FAMILIES {
        for cc in SAMPLE_CS {
            rep.extend(reflection_suite(&KMatrixSpec::minus(fam, cc), &KMatrixSpec::plus(fam, cc), &pair, p, tol, n)?);
        }
    }
    for fm in FAMILIES {
        for fp in FAMILIES {
            rep.extend(boundary_consistency(fm, SAMPLE_CS[0], fp, SAMPLE_CS[1], &pair, p, tol)?);
        }
    }
    Ok(rep)
}

fn chain_suite(g: &GeneratorSet, p: &DeformParams, tol: &ToleranceConfig, sites: usize) -> Result<RelationReport> {
    let pair = braid_pair(g, p)?;
    let mut rep = two_site_report(&pair, p, tol)?;
    rep.extend(closed_chain_report(sites, &pair, p, tol, 5)?);
    for fm in FAMILIES {
        for fp in FAMILIES {
            let bd = OpenBoundary::new(fm, SAMPLE_CS[0], fp, SAMPLE_CS[1]);
            rep.extend(open_chain_commutation(sites, &bd, &pair, p, tol, 5)?);
        }
    }
    let inv_sites = 4;
    let h = h_open(&ChainSpec::new(inv_sites, Model::Dist, OpenBoundary::trivial())?, p)?;
    rep.extend(invariance_report(&h, g, tol, "H_open")?);
    let hp = h_periodic(sites, p)?;
    let e2 = coproduct_l(Generator::E2, sites, g)?.mat;
    rep.push(CheckReport::exceeds(format!("[H_per, Delta(e2)] != 0 L={sites}"), fro(&comm(&hp.mat, &e2)), 1e-3));
    for l in 2..=4 {
        rep.push(hdiff_check(l, p)?);
    }
    rep.push(c_plus_sol_check(sites, p, tol)?);
    for bd in [
        OpenBoundary::new(Family::B, SAMPLE_CS[0], Family::B, SAMPLE_CS[1]),
        OpenBoundary::new(Family::A, SAMPLE_CS[0], Family::A, SAMPLE_CS[1]),
    ] {
        rep.extend(derivative_construction_check(2, &bd, &pair, p, tol)?);
    }
    Ok(rep)
}

fn twist_suite(p: &DeformParams, tol: &ToleranceConfig) -> Result<RelationReport> {
    let mut rep = RelationReport::new();
    for l in 2..=4 {
        rep.push(twist_equivalence_check(l, p, tol)?);
    }
    Ok(rep)
}

/// Runs one suite. Fatal evaluation errors inside a suite become a failing entry.
pub fn run_suite(suite: Suite, common: &CommonArgs, sites: usize, samples: usize, tol: &ToleranceConfig) -> Result<RelationReport> {
    let mut rep = RelationReport::new();
    let suites: Vec<Suite> = if suite == Suite::All { Suite::INDIVIDUAL.to_vec() } else { vec![suite] };
    let generic = if suite == Suite::Tl { None } else { Some(common.params(tol)?) };
    let tl = if suite == Suite::Tl || suite == Suite::All { Some(tl_params(common.q, common.omega, tol)?) } else { None };
    for s in suites {
        let out = match s {
            Suite::Tl => {
                let p = tl.expect("TL parameters");
                tl_suite(sites.max(3), &build_rep(&p), &p, tol)
            }
            _ => {
                let p = generic.expect("generic parameters");
                let g = build_rep(&p);
                match s {
                    Suite::Algebra => algebra_suite(&g, tol),
                    Suite::Casimir => casimir_suite(&g, &p, tol),
                    Suite::Coproduct => coproduct_report(&g, &p, tol),
                    Suite::Braid => braid_suite(&g, &p, tol),
                    Suite::Ybe => braid_pair(&g, &p).and_then(|pair| spectral_suite(&pair, &p, tol, samples)),
                    Suite::Reflection => reflection_checks(&g, &p, tol, samples),
                    Suite::Chain => chain_suite(&g, &p, tol, sites),
                    Suite::Twist => twist_suite(&p, tol),
                    Suite::Tl | Suite::All => unreachable!(),
                }
            }
        };
        match out {
            Ok(r) => rep.extend(r.prefixed(&format!("{}: ", s.name()))),
            Err(e) => rep.push(CheckReport::new(format!("{}: evaluation", s.name()), f64::NAN, 0.0).with_note(e.to_string())),
        }
    }
    Ok(rep)
}

/// Builds the full report for `verify`.
pub fn verify_report(args: &VerifyArgs) -> Result<Report> {
    let tol = args.common.tolerances()?;
    if args.samples == 0 {
        return Err(Error::Config("--samples must be positive".into()));
    }
    if args.sites < 2 {
        return Err(Error::Config("--sites must be at least 2".into()));
    }
    let rep = run_suite(args.suite, &args.common, args.sites, args.samples, &tol)?;
    let mu = if args.suite == Suite::Tl { c(-0.5, 0.0) } else { args.common.mu };
    let tl_mode = args.suite == Suite::Tl || derive_params(args.common.q, mu, args.common.omega, &tol)?.tl_mode;
    Ok(Report {
        pass: rep.all_pass(),
        metadata: Metadata {
            tool: "uqchain",
            version: env!("CARGO_PKG_VERSION"),
            suite: args.suite,
            q: pair_c(args.common.q),
            mu: pair_c(mu),
            omega: args.common.omega,
            tl_mode,
            sites: args.sites,
            samples: args.samples,
            tolerances: tol,
        },
        checks: rep.checks,
    })
}

/// Dense matrix file: flat row-major list of [re, im] pairs.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct MatrixFile {
    pub dim: usize,
    pub sites: Option<usize>,
    pub format: &'static str,
    pub params: Map<String, Value>,
    pub data: Vec<[f64; 2]>,
}

impl MatrixFile {
    pub fn new(m: &Mat, sites: Option<usize>, params: Map<String, Value>) -> Self {
        let n = m.nrows();
        let data = (0..n).flat_map(|i| (0..m.ncols()).map(move |j| (i, j))).map(|(i, j)| pair_c(m[(i, j)])).collect();
        MatrixFile { dim: n, sites, format: "dense-complex-rowmajor", params, data }
    }

    pub fn to_mat(&self) -> Result<Mat> {
        if self.data.len() != self.dim * self.dim {
            return Err(Error::Config("matrix data length does not match dim".into()));
        }
        Ok(Mat::from_fn(self.dim, self.dim, |i, j| {
            let v = self.data[i * self.dim + j];
            c(v[0], v[1])
        }))
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("dim {} sites {}\n", self.dim, self.sites.map_or("-".into(), |l| l.to_string()));
        for row in self.data.chunks(self.dim) {
            let line: Vec<String> = row.iter().map(|v| fmt_c(*v)).collect();
            s.push_str(&line.join(" "));
            s.push('\n');
        }
        s
    }
}

fn param_map(p: &DeformParams) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("q".into(), json!(pair_c(p.q)));
    m.insert("mu".into(), json!(pair_c(p.mu)));
    m.insert("omega".into(), json!(p.omega));
    m.insert("tl_mode".into(), json!(p.tl_mode));
    m
}

/// Builds the requested operator and its matrix file.
pub fn build_matrix(args: &BuildArgs) -> Result<MatrixFile> {
    let tol = args.common.tolerances()?;
    let p = if args.object == Object::HTl {
        tl_params(args.common.q, args.common.omega, &tol)?
    } else {
        args.common.params(&tol)?
    };
    let g = build_rep(&p);
    let mut params = param_map(&p);
    params.insert("object".into(), json!(args.object));
    let u = args.u.unwrap_or(r(0.0));
    let (m, sites) = match args.object {
        Object::B => (braid_pair(&g, &p)?.b, Some(2)),
        Object::Binv => (braid_pair(&g, &p)?.binv, Some(2)),
        Object::Rcheck => {
            let u = args.u.ok_or_else(|| Error::Config("rcheck requires --u".into()))?;
            params.insert("u".into(), json!(pair_c(u)));
            (rcheck(u, &braid_pair(&g, &p)?, &p)?, Some(2))
        }
        Object::Kminus | Object::Kplus => {
            params.insert("u".into(), json!(pair_c(u)));
            params.insert("family".into(), json!(args.family));
            params.insert("c".into(), json!(pair_c(args.c)));
            let m = if args.object == Object::Kminus {
                k_minus(&KMatrixSpec::minus(args.family, args.c), u, &p)?
            } else {
                k_plus(&KMatrixSpec::plus(args.family, args.c), u, &p, &CrossingData::new(&p))?
            };
            (m, Some(1))
        }
        Object::HDist => (h_two_site(Model::Dist, &p)?, Some(2)),
        Object::HFerm => (h_two_site(Model::Ferm, &p)?, Some(2)),
        Object::HTl => (h_two_site(Model::Tl, &p)?, Some(2)),
        Object::HOpen => {
            let sites = args.sites.ok_or_else(|| Error::Config("h-open requires --sites".into()))?;
            let bd = args.boundary.boundary();
            params.insert("model".into(), json!(args.model));
            params.insert("family_minus".into(), json!(bd.minus));
            params.insert("c_minus".into(), json!(pair_c(bd.c_minus)));
            params.insert("family_plus".into(), json!(bd.plus));
            params.insert("c_plus_prime".into(), json!(pair_c(bd.c_plus_prime)));
            let m = h_open(&ChainSpec::new(sites, args.model, bd)?, &p)?.mat;
            (m, Some(sites))
        }
        Object::HPeriodic => {
            let sites = args.sites.ok_or_else(|| Error::Config("h-periodic requires --sites".into()))?;
            (h_periodic(sites, &p)?.mat, Some(sites))
        }
        Object::Casimir => {
            let pp = args.p.ok_or_else(|| Error::Config("casimir requires --p".into()))?;
            params.insert("p".into(), json!(pp));
            match args.sites.unwrap_or(1) {
                1 => (casimir_c(pp, &g, &p)?, Some(1)),
                2 => (casimir_c(pp, &coproduct_set(&g)?, &p)?, Some(2)),
                l => return Err(Error::Config(format!("casimir supports --sites 1 or 2, got {l}"))),
            }
        }
    };
    Ok(MatrixFile::new(&m, sites, params))
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct SpectrumFile {
    pub model: Model,
    pub sites: usize,
    pub periodic: bool,
    pub params: Map<String, Value>,
    pub eigenvalues: Vec<[f64; 2]>,
    pub groups: Vec<SpectrumGroup>,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct SpectrumGroup {
    pub value: [f64; 2],
    pub multiplicity: usize,
}

impl SpectrumFile {
    pub fn to_text(&self) -> String {
        let mut s = format!("model {} sites {}\n", self.model, self.sites);
        for g in &self.groups {
            let _ = writeln!(s, "{} x{}", fmt_c(g.value), g.multiplicity);
        }
        s
    }
}

/// Computes the spectrum requested by `spectrum`.
pub fn spectrum_file(args: &SpectrumArgs) -> Result<SpectrumFile> {
    let tol = args.common.tolerances()?;
    check_sites(args.sites, max_spectrum_sites())?;
    let p = if args.model == Model::Tl {
        tl_params(args.common.q, args.common.omega, &tol)?
    } else {
        args.common.params(&tol)?
    };
    let h = if args.periodic {
        if args.model != Model::Dist {
            return Err(Error::Config("--periodic is only defined for the dist model".into()));
        }
        h_periodic(args.sites, &p)?
    } else {
        h_open(&ChainSpec::new(args.sites, args.model, args.boundary.boundary())?, &p)?
    };
    let s = spectrum(&h, &tol)?;
    let mut params = param_map(&p);
    if !args.periodic && args.model != Model::Tl {
        let bd = args.boundary.boundary();
        params.insert("family_minus".into(), json!(bd.minus));
        params.insert("c_minus".into(), json!(pair_c(bd.c_minus)));
        params.insert("family_plus".into(), json!(bd.plus));
        params.insert("c_plus_prime".into(), json!(pair_c(bd.c_plus_prime)));
    }
    Ok(SpectrumFile {
        model: args.model,
        sites: args.sites,
        periodic: args.periodic,
        params,
        eigenvalues: s.eigenvalues,
        groups: s.groups.into_iter().map(|(value, multiplicity)| SpectrumGroup { value, multiplicity }).collect(),
    })
}

fn emit(common: &CommonArgs, json_text: String, plain: String) -> i32 {
    let body = match common.format {
        Format::Json => json_text + "\n",
        Format::Text => plain,
    };
    match &common.out {
        Some(path) => match std::fs::write(path, body) {
            Ok(()) => 0,
            Err(e) => {
                eprintln!("error: cannot write {}: {e}", path.display());
                2
            }
        },
        None => {
            print!("{body}");
            0
        }
    }
}

fn error_code(e: &Error) -> i32 {
    match e {
        Error::ConvergenceFailure | Error::ConventionUnresolvable | Error::FormulaMismatch { .. } => 1,
        _ => 2,
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("report types serialize")
}

pub fn cmd_verify(args: &VerifyArgs) -> i32 {
    match verify_report(args) {
        Ok(rep) => {
            let code = emit(&args.common, to_json(&rep), rep.to_text());
            if code != 0 {
                code
            } else if rep.pass {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            error_code(&e)
        }
    }
}

pub fn cmd_build(args: &BuildArgs) -> i32 {
    match build_matrix(args) {
        Ok(m) => emit(&args.common, to_json(&m), m.to_text()),
        Err(e) => {
            eprintln!("error: {e}");
            error_code(&e)
        }
    }
}

pub fn cmd_spectrum(args: &SpectrumArgs) -> i32 {
    match spectrum_file(args) {
        Ok(s) => emit(&args.common, to_json(&s), s.to_text()),
        Err(e) => {
            eprintln!("error: {e}");
            error_code(&e)
        }
    }
}

/// Entry point; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match &cli.command {
        Command::Verify(a) => cmd_verify(a),
        Command::Build(a) => cmd_build(a),
        Command::Spectrum(a) => cmd_spectrum(a),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_parsing() {
        assert_eq!(parse_complex("1.2").unwrap(), r(1.2));
        assert_eq!(parse_complex("0.7+0.2i").unwrap(), c(0.7, 0.2));
        assert_eq!(parse_complex("-2.3+0.4i").unwrap(), c(-2.3, 0.4));
        assert_eq!(parse_complex("0.7-0.2j").unwrap(), c(0.7, -0.2));
        assert_eq!(parse_complex("-i").unwrap(), c(0.0, -1.0));
        assert_eq!(parse_complex("2i").unwrap(), c(0.0, 2.0));
        assert_eq!(parse_complex("1e-3+2e-1i").unwrap(), c(1e-3, 0.2));
        assert_eq!(parse_complex(" 1 + i ").unwrap(), c(1.0, 1.0));
        for bad in ["", "abc", "1+2", "1+xi", "i+"] {
            assert!(parse_complex(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn matrix_file_round_trip() {
        let m = Mat::from_fn(3, 3, |i, j| c(i as f64, j as f64));
        let f = MatrixFile::new(&m, None, Map::new());
        assert_eq!(f.data[1], [0.0, 1.0]);
        assert_eq!(f.to_mat().unwrap(), m);
        let back: serde_json::Value = serde_json::from_str(&to_json(&f)).unwrap();
        assert_eq!(back["format"], "dense-complex-rowmajor");
        assert_eq!(back["sites"], Value::Null);
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run(["uqchain", "verify", "--suite", "nope"]), 2);
        assert_eq!(run(["uqchain", "verify", "--suite", "ybe", "--q", "1", "--mu", "0.3"]), 2);
        assert_eq!(run(["uqchain", "spectrum", "--sites", "9"]), 2);
        assert_eq!(run(["uqchain", "build", "--object", "rcheck"]), 2);
        assert_eq!(run(["uqchain", "build", "--object", "h-tl", "--omega", "3"]), 2);
    }
}
