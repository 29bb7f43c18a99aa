//! Commutant `A_W = {Y : Y W(x) = W(x) Y}` and the real space
//! `cal A_W = {Y : Y W(x) = W(x) Y^*}` of a matrix weight.

use crate::error::{Error, Result};
use crate::laurent::TorusPoint;
use crate::linalg::{svd_nullspace, QMat};
use crate::phipoly::PhiPoly;
use crate::rational::{binom, Q};
use crate::spherical::phi_point;
use crate::weight::weight_polynomial;
use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub const SVD_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Irreducible,
    Reducible,
}

#[derive(Clone, Debug)]
pub struct CommutantReport {
    /// Complex dimension of `A_W`.
    pub dim_aw: usize,
    /// Real dimension of `cal A_W`.
    pub dim_script_aw: usize,
    /// Real dimension of the self-adjoint part of `A_W`.
    pub dim_aw_hermitian: usize,
    pub star_invariant: bool,
    pub verdict: Verdict,
    pub samples: usize,
}

impl CommutantReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "dim_AW": self.dim_aw,
            "dim_script_AW": self.dim_script_aw,
            "dim_AW_hermitian": self.dim_aw_hermitian,
            "star_invariant": self.star_invariant,
            "verdict": format!("{:?}", self.verdict).to_lowercase(),
            "samples": self.samples,
        })
    }
}

/// Real basis of `C^{N x N}`: `E_pq` then `i E_pq`.
fn basis_matrix(size: usize, r: usize) -> DMatrix<Complex64> {
    let mut y = DMatrix::zeros(size, size);
    let (imag, idx) = (r >= size * size, r % (size * size));
    y[(idx / size, idx % size)] = if imag { Complex64::i() } else { Complex64::new(1.0, 0.0) };
    y
}

fn from_real_vector(size: usize, v: &[f64]) -> DMatrix<Complex64> {
    let nn = size * size;
    DMatrix::from_fn(size, size, |p, q| Complex64::new(v[p * size + q], v[nn + p * size + q]))
}

/// Stacks `Re`/`Im` of `f(Y_r, W(x_s))` for every real basis element `Y_r` and sample.
fn real_system(ws: &[DMatrix<Complex64>], size: usize, f: &(dyn Fn(&DMatrix<Complex64>, &DMatrix<Complex64>) -> DMatrix<Complex64> + Sync)) -> DMatrix<f64> {
    let unknowns = 2 * size * size;
    let rows_per = 2 * size * size;
    let cols: Vec<Vec<f64>> = (0..unknowns)
        .into_par_iter()
        .map(|r| {
            let y = basis_matrix(size, r);
            let mut col = Vec::with_capacity(ws.len() * rows_per);
            for w in ws {
                let res = f(&y, w);
                col.extend(res.iter().map(|z| z.re));
                col.extend(res.iter().map(|z| z.im));
            }
            col
        })
        .collect();
    DMatrix::from_fn(ws.len() * rows_per, unknowns, |i, j| cols[j][i])
}

/// Evaluates `W` at `phi(a)` for seeded uniform torus points `a`.
pub fn sample_weight(w: &PhiPoly, samples: usize, seed: u64) -> Vec<DMatrix<Complex64>> {
    let n = w.nvars();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..samples)
        .map(|_| {
            let a = TorusPoint::new((0..n).map(|_| rng.gen_range(0.0..std::f64::consts::TAU)).collect());
            w.evaluate(&phi_point(n, &a))
        })
        .collect()
}

/// Sampled analysis with SVD null spaces.
pub fn analyze(w: &PhiPoly, samples: usize, seed: u64) -> Result<CommutantReport> {
    let size = w.shape().0;
    if samples < size * size + 1 {
        return Err(Error::Range(format!("need at least {} samples, got {samples}", size * size + 1)));
    }
    let ws = sample_weight(w, samples, seed);
    let commute = |y: &DMatrix<Complex64>, w: &DMatrix<Complex64>| y * w - w * y;
    let star = |y: &DMatrix<Complex64>, w: &DMatrix<Complex64>| y * w - w * y.adjoint();
    let a_sys = real_system(&ws, size, &commute);
    let s_sys = real_system(&ws, size, &star);
    let (_, a_null) = svd_nullspace(&a_sys, SVD_TOLERANCE);
    let (_, s_null) = svd_nullspace(&s_sys, SVD_TOLERANCE);
    // Y in A_W and Y = Y^*
    let herm = |y: &DMatrix<Complex64>, _: &DMatrix<Complex64>| y - y.adjoint();
    let h_sys = DMatrix::from_fn(a_sys.nrows() + 2 * size * size, a_sys.ncols(), |i, j| {
        if i < a_sys.nrows() {
            a_sys[(i, j)]
        } else {
            let r = herm(&basis_matrix(size, j), &ws[0]);
            let k = i - a_sys.nrows();
            let nn = size * size;
            if k < nn {
                r[(k / size, k % size)].re
            } else {
                r[((k - nn) / size, (k - nn) % size)].im
            }
        }
    });
    let (_, h_null) = svd_nullspace(&h_sys, SVD_TOLERANCE);
    let smax = s_sys.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let star_invariant = (0..s_null.ncols()).all(|c| {
        let v: Vec<f64> = s_null.column(c).iter().copied().collect();
        let ys = from_real_vector(size, &v).adjoint();
        let mut u = vec![0.0; 2 * size * size];
        for p in 0..size {
            for q in 0..size {
                u[p * size + q] = ys[(p, q)].re;
                u[size * size + p * size + q] = ys[(p, q)].im;
            }
        }
        let res = &s_sys * nalgebra::DVector::from_vec(u);
        res.norm() <= 1e-8 * smax.max(1.0)
    });
    let dim_aw = a_null.ncols() / 2;
    let verdict = if dim_aw == 1 && star_invariant { Verdict::Irreducible } else { Verdict::Reducible };
    Ok(CommutantReport {
        dim_aw,
        dim_script_aw: s_null.ncols(),
        dim_aw_hermitian: h_null.ncols(),
        star_invariant,
        verdict,
        samples,
    })
}

/// Exact dimensions from the rational coefficient matrices of `W_pol`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactCommutant {
    pub dim_aw: usize,
    pub dim_script_aw: usize,
    pub star_invariant: bool,
}

/// Linear map `X -> (X W_c - s W_c X^t)` over all coefficients, as a rational matrix on `vec(X)`.
fn coefficient_system(w: &PhiPoly, transpose: bool, sign: i64) -> QMat {
    let size = w.shape().0;
    let coeffs: Vec<QMat> = w.terms().map(|(_, c)| c.clone()).collect();
    let nn = size * size;
    let mut blocks = Vec::new();
    for c in &coeffs {
        let mut m = QMat::zeros(nn, nn);
        for r in 0..nn {
            let mut x = QMat::zeros(size, size);
            x[(r / size, r % size)] = Q::from_integer(1.into());
            let other = if transpose { x.transpose() } else { x.clone() };
            let res = &(&x * c) - &(c * &other).scale(&Q::from_integer(sign.into()));
            for (i, v) in res.entries().iter().enumerate() {
                m[(i, r)] = v.clone();
            }
        }
        blocks.push(m);
    }
    QMat::vstack(&blocks)
}

fn in_span(basis: &QMat, v: &[Q]) -> bool {
    let col = QMat::from_fn(v.len(), 1, |i, _| v[i].clone());
    basis.solve(&col).is_some()
}

fn transpose_vec(size: usize, v: &[Q]) -> Vec<Q> {
    (0..size * size).map(|r| v[(r % size) * size + r / size].clone()).collect()
}

/// `A_W` and `cal A_W` from the polynomial coefficients. With `Y = A + iB`, `Y W_c = W_c Y^*`
/// splits into `A W_c = W_c A^t` and `B W_c = -W_c B^t`.
pub fn analyze_exact(w: &PhiPoly) -> ExactCommutant {
    let size = w.shape().0;
    let comm = coefficient_system(w, false, 1).nullspace();
    let re = coefficient_system(w, true, 1).nullspace();
    let im = coefficient_system(w, true, -1).nullspace();
    let closed = |basis: &QMat, sign: i64| {
        (0..basis.cols()).all(|c| {
            let t: Vec<Q> = transpose_vec(size, &basis.column(c)).iter().map(|x| x * Q::from_integer(sign.into())).collect();
            in_span(basis, &t)
        })
    };
    ExactCommutant {
        dim_aw: comm.cols(),
        dim_script_aw: re.cols() + im.cols(),
        star_invariant: closed(&re, 1) && closed(&im, -1),
    }
}

/// Outcome of replaying the irreducibility argument on the structured coefficients.
#[derive(Clone, Debug)]
pub struct StructuredReport {
    pub n: usize,
    pub steps: Vec<(String, bool)>,
}

impl StructuredReport {
    pub fn passed(&self) -> bool {
        self.steps.iter().all(|s| s.1)
    }
}

fn q_int(x: i64) -> Q {
    Q::from_integer(x.into())
}

/// `W_(i)`: diagonal with `(n+1-2i) binom(n+1,i)^2 / (binom(n,n+1-k) binom(n,k-1))` at `k = i+1 ..= n+1-i`.
pub fn w_i_formula(n: usize, i: usize) -> QMat {
    let ni = n as i64;
    let mut d = vec![Q::zero(); n + 1];
    for k in i + 1..=n + 1 - i {
        let k = k as i64;
        let c = (ni + 1 - 2 * i as i64) * binom(ni + 1, i as i64) * binom(ni + 1, ni + 1 - i as i64);
        d[(k - 1) as usize] = Q::new(c.into(), (binom(ni, ni + 1 - k) * binom(ni, k - 1)).into());
    }
    QMat::diag(&d)
}

/// `W_(phi_1) = sum_k n(n+1) / (binom(n,n+1-k) binom(n,k)) E_{k,k+1} + (n+1) E_{n+1,1}`.
pub fn w_phi1_formula(n: usize) -> QMat {
    let ni = n as i64;
    let mut m = QMat::zeros(n + 1, n + 1);
    for k in 1..=ni {
        m[((k - 1) as usize, k as usize)] = Q::new((ni * (ni + 1)).into(), (binom(ni, ni + 1 - k) * binom(ni, k)).into());
    }
    m[(n, 0)] = q_int(ni + 1);
    m
}

/// Replays the elimination argument for `k = 1` on the coefficients of `W_pol`.
pub fn structured_checks(n: usize) -> Result<StructuredReport> {
    if n < 2 {
        return Err(Error::Range("the argument needs n >= 2".into()));
    }
    let w = weight_polynomial(n, 1)?;
    let size = n + 1;
    let mut steps = Vec::new();
    // allowed[p][q]: Y_pq not yet forced to vanish
    let mut allowed = vec![vec![true; size]; size];
    for i in 1..=size / 2 {
        let mut mono = vec![0u32; n];
        mono[i - 1] += 1;
        mono[n - i] += 1;
        let wi = w.coefficient(&mono);
        let formula = w_i_formula(n, i);
        steps.push((format!("W_({i}) equals the diagonal formula"), wi == formula));
        let d = wi.diagonal();
        let edges_zero = (0..i).all(|t| d[t].is_zero() && d[size - 1 - t].is_zero());
        steps.push((format!("first and last {i} diagonal entries of W_({i}) vanish"), wi.is_diagonal() && edges_zero));
        for p in 0..size {
            for q in 0..size {
                if d[p] != d[q] {
                    allowed[p][q] = false;
                }
            }
        }
    }
    let only_diag_anti = (0..size).all(|p| (0..size).all(|q| !allowed[p][q] || p == q || p + q == size - 1));
    steps.push(("only Y_kk and Y_{k,n+2-k} survive the W_(i) equations".into(), only_diag_anti));
    let mut mono = vec![0u32; n];
    mono[0] = 1;
    let wphi = w.coefficient(&mono);
    steps.push(("W_(phi_1) equals the shift formula".into(), wphi == w_phi1_formula(n)));
    let superdiag_nonzero = (0..n).all(|k| !wphi[(k, k + 1)].is_zero());
    steps.push(("(k,k+1) entries force Y_kk = Y_{k+1,k+1}".into(), superdiag_nonzero));
    // restricted exact system: [Y, W_(i)] = 0 and [Y, W_(phi_1)] = 0 on the surviving positions
    let positions: Vec<(usize, usize)> =
        (0..size).flat_map(|p| (0..size).map(move |q| (p, q))).filter(|&(p, q)| allowed[p][q]).collect();
    let mut mats = vec![wphi.clone()];
    for i in 1..=size / 2 {
        let mut m = vec![0u32; n];
        m[i - 1] += 1;
        m[n - i] += 1;
        mats.push(w.coefficient(&m));
    }
    let mut rows = Vec::new();
    for c in &mats {
        let mut block = QMat::zeros(size * size, positions.len());
        for (r, &(p, q)) in positions.iter().enumerate() {
            let mut y = QMat::zeros(size, size);
            y[(p, q)] = q_int(1);
            let res = &(&y * c) - &(c * &y);
            for (i, v) in res.entries().iter().enumerate() {
                block[(i, r)] = v.clone();
            }
        }
        rows.push(block);
    }
    let null = QMat::vstack(&rows).nullspace();
    let identity_only = null.cols() == 1 && {
        let v = null.column(0);
        positions.iter().zip(&v).all(|(&(p, q), x)| if p == q { *x == v[0] } else { x.is_zero() })
    };
    steps.push(("commutant is the multiples of the identity".into(), identity_only));
    // star part: Y W_(0) = W_(0) Y^* with W_(0) diagonal, w_k = (n+1) / (binom(n,n+1-k) binom(n,k-1))
    let w0 = w.coefficient(&vec![0; n]);
    let ni = n as i64;
    let expect: Vec<Q> =
        (1..=ni).chain(std::iter::once(ni + 1)).map(|k| Q::new((ni + 1).into(), (binom(ni, ni + 1 - k) * binom(ni, k - 1)).into())).collect();
    steps.push(("W_(0) is diagonal with entries (n+1)/(binom(n,n+1-k) binom(n,k-1))".into(), w0.is_diagonal() && w0.diagonal() == expect));
    let exact = analyze_exact(&w);
    steps.push(("cal A_W is *-invariant and equals the real multiples of I".into(), exact.star_invariant && exact.dim_script_aw == 1));
    Ok(StructuredReport { n, steps })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn n1_is_reducible() {
        let w = weight_polynomial(1, 1).unwrap();
        let r = analyze(&w, 10, 0).unwrap();
        assert_eq!(r.dim_aw, 2);
        assert_eq!(r.verdict, Verdict::Reducible);
        assert_eq!(analyze_exact(&w).dim_aw, 2);
    }

    #[test]
    fn n2_is_irreducible() {
        let w = weight_polynomial(2, 1).unwrap();
        let r = analyze(&w, 20, 0).unwrap();
        assert_eq!(r.dim_aw, 1);
        assert!(r.star_invariant);
        assert_eq!(r.dim_script_aw, r.dim_aw_hermitian);
        assert_eq!(r.verdict, Verdict::Irreducible);
    }

    #[test]
    fn too_few_samples() {
        let w = weight_polynomial(2, 1).unwrap();
        assert!(analyze(&w, 5, 0).is_err());
    }

    #[test]
    fn w1_n2_pattern() {
        let m = w_i_formula(2, 1);
        assert!(m[(0, 0)].is_zero() && m[(2, 2)].is_zero());
        assert_eq!(m[(1, 1)], crate::rational::q(9, 4));
    }

    #[test]
    fn structured_n2() {
        let r = structured_checks(2).unwrap();
        assert!(r.passed(), "{:?}", r.steps);
    }
}
