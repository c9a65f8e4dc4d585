//! Dense complex matrix helpers shared by every module.

use nalgebra::DMatrix;
pub use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

pub type Mat = DMatrix<C64>;

pub const LOCAL_DIM: usize = 4;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn r(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn zeros(n: usize) -> Mat {
    Mat::zeros(n, n)
}

pub fn identity(n: usize) -> Mat {
    Mat::identity(n, n)
}

/// Elementary matrix E_ij (1-based indices, as in the physics literature).
pub fn eij(i: usize, j: usize, n: usize) -> Mat {
    let mut m = zeros(n);
    m[(i - 1, j - 1)] = r(1.0);
    m
}

/// Four-dimensional elementary matrix.
pub fn e4(i: usize, j: usize) -> Mat {
    eij(i, j, LOCAL_DIM)
}

pub fn diag(entries: &[C64]) -> Mat {
    let n = entries.len();
    let mut m = zeros(n);
    for (k, v) in entries.iter().enumerate() {
        m[(k, k)] = *v;
    }
    m
}

pub fn diagonal_of(m: &Mat) -> Vec<C64> {
    (0..m.nrows()).map(|k| m[(k, k)]).collect()
}

pub fn is_diagonal(m: &Mat, tol: f64) -> bool {
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if i != j && m[(i, j)].norm() > tol {
                return false;
            }
        }
    }
    true
}

pub fn kron(a: &Mat, b: &Mat) -> Mat {
    a.kronecker(b)
}

pub fn kron_all(factors: &[Mat]) -> Mat {
    let mut out = identity(1);
    for f in factors {
        out = kron(&out, f);
    }
    out
}

/// Tensor power a^{⊗n}; n = 0 gives the 1×1 identity.
pub fn kron_pow(a: &Mat, n: usize) -> Mat {
    let mut out = identity(1);
    for _ in 0..n {
        out = kron(&out, a);
    }
    out
}

pub fn fro(a: &Mat) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// ‖a − b‖_F / max(1, ‖a‖_F, ‖b‖_F).
pub fn rel_residual(a: &Mat, b: &Mat) -> f64 {
    let scale = 1f64.max(fro(a)).max(fro(b));
    fro(&(a - b)) / scale
}

/// Residual of `a` against zero, relative to a reference scale.
pub fn rel_zero(a: &Mat, reference: f64) -> f64 {
    fro(a) / 1f64.max(reference)
}

pub fn comm(a: &Mat, b: &Mat) -> Mat {
    a * b - b * a
}

pub fn anticomm(a: &Mat, b: &Mat) -> Mat {
    a * b + b * a
}

pub fn inverse(a: &Mat) -> Option<Mat> {
    a.clone().try_inverse()
}

/// Integer matrix power; negative exponents go through the inverse.
pub fn mpow(a: &Mat, n: i32) -> Mat {
    let base = if n < 0 {
        inverse(a).expect("mpow: singular matrix with negative exponent")
    } else {
        a.clone()
    };
    let mut out = identity(a.nrows());
    for _ in 0..n.unsigned_abs() {
        out = &out * &base;
    }
    out
}

pub fn trace(a: &Mat) -> C64 {
    (0..a.nrows()).map(|k| a[(k, k)]).sum()
}

/// Flip operator P on C^n ⊗ C^n.
pub fn swap(n: usize) -> Mat {
    let mut p = zeros(n * n);
    for i in 0..n {
        for j in 0..n {
            p[(i * n + j, j * n + i)] = r(1.0);
        }
    }
    p
}

/// Partial transpose of a two-leg operator on C^n ⊗ C^n in leg 1 or leg 2.
pub fn partial_transpose(m: &Mat, leg: usize, n: usize) -> Mat {
    let mut out = zeros(n * n);
    for i in 0..n {
        for k in 0..n {
            for j in 0..n {
                for l in 0..n {
                    let v = m[(i * n + k, j * n + l)];
                    match leg {
                        1 => out[(j * n + k, i * n + l)] = v,
                        2 => out[(i * n + l, j * n + k)] = v,
                        _ => panic!("partial_transpose: leg must be 1 or 2"),
                    }
                }
            }
        }
    }
    out
}

/// Trace over the last tensor factor of dimension `d_last`.
pub fn partial_trace_last(m: &Mat, d_last: usize) -> Mat {
    let d_rest = m.nrows() / d_last;
    let mut out = zeros(d_rest);
    for i in 0..d_rest {
        for j in 0..d_rest {
            let mut s = C64::new(0.0, 0.0);
            for a in 0..d_last {
                s += m[(i * d_last + a, j * d_last + a)];
            }
            out[(i, j)] = s;
        }
    }
    out
}

/// Index offsets for an operator on `legs` of an n-leg chain: the offsets of
/// the untouched legs (bases) and of each operator basis state.
fn leg_offsets(legs: &[usize], n: usize, d: usize) -> (Vec<usize>, Vec<usize>) {
    let rest: Vec<usize> = (0..n).filter(|s| !legs.contains(s)).collect();
    let stride = |leg: usize| d.pow((n - 1 - leg) as u32);
    let offset = |mut idx: usize, which: &[usize]| {
        let mut off = 0;
        for &leg in which.iter().rev() {
            off += (idx % d) * stride(leg);
            idx /= d;
        }
        off
    };
    let bases = (0..d.pow(rest.len() as u32)).map(|i| offset(i, &rest)).collect();
    let offs = (0..d.pow(legs.len() as u32)).map(|i| offset(i, legs)).collect();
    (bases, offs)
}

/// Places a k-leg operator on the (0-based, ordered) `legs` of an n-leg chain of
/// local dimension `d`. The first tensor factor of `op` acts on `legs[0]`, etc.
pub fn embed_legs(op: &Mat, legs: &[usize], n: usize, d: usize) -> Mat {
    assert_eq!(op.nrows(), d.pow(legs.len() as u32), "embed_legs: operator size");
    let mut out = zeros(d.pow(n as u32));
    let (bases, offs) = leg_offsets(legs, n, d);
    for a in 0..op.nrows() {
        for b in 0..op.ncols() {
            let v = op[(a, b)];
            if v == C64::new(0.0, 0.0) {
                continue;
            }
            for base in &bases {
                out[(base + offs[a], base + offs[b])] += v;
            }
        }
    }
    out
}

/// m · embed_legs(op, legs, n, d) without forming the embedded matrix.
pub fn mul_legs_right(m: &Mat, op: &Mat, legs: &[usize], n: usize, d: usize) -> Mat {
    assert_eq!(op.nrows(), d.pow(legs.len() as u32), "mul_legs_right: operator size");
    assert_eq!(m.ncols(), d.pow(n as u32), "mul_legs_right: matrix size");
    let mut out = Mat::zeros(m.nrows(), m.ncols());
    let (bases, offs) = leg_offsets(legs, n, d);
    for a in 0..op.nrows() {
        for b in 0..op.ncols() {
            let v = op[(a, b)];
            if v == C64::new(0.0, 0.0) {
                continue;
            }
            for base in &bases {
                let (src, dst) = (base + offs[a], base + offs[b]);
                out.column_mut(dst).axpy(v, &m.column(src), C64::new(1.0, 0.0));
            }
        }
    }
    out
}

/// embed_legs(op, legs, n, d) · m without forming the embedded matrix.
pub fn mul_legs_left(op: &Mat, legs: &[usize], n: usize, d: usize, m: &Mat) -> Mat {
    mul_legs_right(&m.transpose(), &op.transpose(), legs, n, d).transpose()
}

/// Least-squares scalar α minimising ‖target − α·basis‖, with the residual
/// relative to ‖target‖ (or 1).
pub fn scalar_fit(basis: &Mat, target: &Mat) -> (C64, f64) {
    let num: C64 = basis.iter().zip(target.iter()).map(|(a, b)| a.conj() * b).sum();
    let den: f64 = basis.iter().map(|a| a.norm_sqr()).sum();
    if den == 0.0 {
        return (C64::new(0.0, 0.0), fro(target) / 1f64.max(fro(target)));
    }
    let alpha = num / den;
    let resid = fro(&(target - basis * alpha)) / 1f64.max(fro(target));
    (alpha, resid)
}

/// Compares a and b up to an additive multiple of the identity. Returns the
/// residual of the traceless parts and the identity coefficient of a − b.
pub fn compare_mod_identity(a: &Mat, b: &Mat) -> (f64, C64) {
    let n = a.nrows();
    let diff = a - b;
    let coeff = trace(&diff) / n as f64;
    let scale = 1f64.max(fro(a)).max(fro(b));
    let resid = fro(&(diff - identity(n) * coeff)) / scale;
    (resid, coeff)
}

/// All eigenvalues of a general complex matrix (Hessenberg QR with
/// aggressive early deflation, robust on highly degenerate spectra).
pub fn eigenvalues(m: &Mat) -> Result<Vec<C64>> {
    let n = m.nrows();
    if n == 0 {
        return Ok(vec![]);
    }
    let fm = faer::Mat::<C64>::from_fn(n, n, |i, j| m[(i, j)]);
    fm.eigenvalues().map_err(|_| Error::ConvergenceFailure)
}

/// Lexicographic (Re, Im) ordering used for every reported spectrum.
pub fn sort_spectrum(values: &mut [C64]) {
    values.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.im.partial_cmp(&b.im).unwrap_or(std::cmp::Ordering::Equal))
    });
}

/// Numerical rank via the count of singular values above `tol · σ_max`.
pub fn rank(m: &Mat, tol: f64) -> usize {
    let sv = m.clone().singular_values();
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|s| **s > tol * smax).count()
}

/// Least-squares residual of `target` against the span of `basis`.
pub fn span_residual(basis: &[Mat], target: &Mat) -> f64 {
    let rows = target.len();
    let a = DMatrix::from_fn(rows, basis.len(), |i, j| basis[j].as_slice()[i]);
    let b = DMatrix::from_fn(rows, 1, |i, _| target.as_slice()[i]);
    let svd = a.clone().svd(true, true);
    let x = match svd.solve(&b, 1e-12) {
        Ok(x) => x,
        Err(_) => return 1.0,
    };
    let fit = a * x;
    let diff: f64 = fit.iter().zip(b.iter()).map(|(u, v)| (u - v).norm_sqr()).sum::<f64>().sqrt();
    diff / 1f64.max(fro(target))
}

/// Largest distance between two multisets of equal size under greedy
/// nearest-neighbour matching (∞ if the sizes differ).
pub fn spectrum_distance(computed: &[C64], expected: &[C64]) -> f64 {
    if computed.len() != expected.len() {
        return f64::INFINITY;
    }
    let mut used = vec![false; computed.len()];
    let mut worst = 0f64;
    for e in expected {
        let mut best = None;
        for (i, v) in computed.iter().enumerate() {
            if used[i] {
                continue;
            }
            let d = (v - e).norm();
            if best.is_none_or(|(_, bd)| d < bd) {
                best = Some((i, d));
            }
        }
        let (i, d) = best.expect("sizes agree");
        used[i] = true;
        worst = worst.max(d);
    }
    worst
}
