//! Exact Laurent polynomials on the maximal torus of SL(n+1).
//!
//! Variables are `t_1, ..., t_{n+1}` subject to `t_1 ... t_{n+1} = 1`. Exponent
//! vectors are stored canonically with last entry zero, so the monomial `t^e`
//! restricted to the compact torus is `exp(i (e_1 theta_1 + ... + e_n theta_n))`.

use crate::error::{Error, Result};
use crate::linalg::QMat;
use crate::rational::{fmt_q, parse_q, to_f64, Q};
use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

/// Subtracts `v[n] * (1, ..., 1)` so that the last entry becomes zero.
pub fn canonicalize(v: &[i32]) -> Vec<i32> {
    let last = *v.last().unwrap_or(&0);
    v.iter().map(|x| x - last).collect()
}

/// A point `a` of the compact torus given by angles `theta_1, ..., theta_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct TorusPoint {
    pub angles: Vec<f64>,
}

impl TorusPoint {
    pub fn new(angles: Vec<f64>) -> Self {
        TorusPoint { angles }
    }

    pub fn identity(n: usize) -> Self {
        TorusPoint { angles: vec![0.0; n] }
    }

    pub fn rank(&self) -> usize {
        self.angles.len()
    }

    /// Full angle vector of length n+1 summing to zero.
    pub fn full_angles(&self) -> Vec<f64> {
        let mut a = self.angles.clone();
        a.push(-self.angles.iter().sum::<f64>());
        a
    }

    /// The coordinates `t_1, ..., t_{n+1}`.
    pub fn coords(&self) -> Vec<Complex64> {
        self.full_angles().into_iter().map(|x| Complex64::from_polar(1.0, x)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LaurentPoly {
    rank: usize,
    terms: BTreeMap<Vec<i32>, Q>,
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    e: Vec<i32>,
    num: String,
    den: String,
}

impl LaurentPoly {
    pub fn zero(rank: usize) -> Self {
        LaurentPoly { rank, terms: BTreeMap::new() }
    }

    pub fn one(rank: usize) -> Self {
        Self::constant(rank, Q::one())
    }

    pub fn constant(rank: usize, c: Q) -> Self {
        Self::monomial(rank, &vec![0; rank + 1], c)
    }

    /// `c * t^e` for an exponent vector of length n+1 (any representative).
    pub fn monomial(rank: usize, e: &[i32], c: Q) -> Self {
        assert_eq!(e.len(), rank + 1, "exponent vector length");
        let mut p = Self::zero(rank);
        if !c.is_zero() {
            p.terms.insert(canonicalize(e), c);
        }
        p
    }

    /// The coordinate `t_j` (0-based `j`).
    pub fn var(rank: usize, j: usize) -> Self {
        let mut e = vec![0; rank + 1];
        e[j] = 1;
        Self::monomial(rank, &e, Q::one())
    }

    pub fn from_terms(rank: usize, terms: impl IntoIterator<Item = (Vec<i32>, Q)>) -> Self {
        let mut p = Self::zero(rank);
        for (e, c) in terms {
            p.add_term(&canonicalize(&e), &c);
        }
        p
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i32>, &Q)> {
        self.terms.iter()
    }

    pub fn coeff(&self, e: &[i32]) -> Q {
        self.terms.get(&canonicalize(e)).cloned().unwrap_or_else(Q::zero)
    }

    pub fn constant_term(&self) -> Q {
        self.coeff(&vec![0; self.rank + 1])
    }

    fn add_term(&mut self, e: &[i32], c: &Q) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(e) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.terms.remove(e);
                }
            }
            None => {
                self.terms.insert(e.to_vec(), c.clone());
            }
        }
    }

    pub fn scale(&self, s: &Q) -> Self {
        if s.is_zero() {
            return Self::zero(self.rank);
        }
        LaurentPoly { rank: self.rank, terms: self.terms.iter().map(|(e, c)| (e.clone(), c * s)).collect() }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut r = Self::one(self.rank);
        for _ in 0..k {
            r = &r * self;
        }
        r
    }

    /// Complex conjugation on the compact torus: `t -> t^{-1}`.
    pub fn conj(&self) -> Self {
        LaurentPoly {
            rank: self.rank,
            terms: self.terms.iter().map(|(e, c)| (e.iter().map(|x| -x).collect(), c.clone())).collect(),
        }
    }

    /// Permutes the variables: `t_j -> t_{perm[j]}`.
    pub fn permute(&self, perm: &[usize]) -> Self {
        let m = self.rank + 1;
        let mut out = Self::zero(self.rank);
        for (e, c) in &self.terms {
            let mut f = vec![0; m];
            for j in 0..m {
                f[perm[j]] = e[j];
            }
            out.add_term(&canonicalize(&f), c);
        }
        out
    }

    /// Swaps `t_i` and `t_j` (0-based).
    pub fn swap(&self, i: usize, j: usize) -> Self {
        let mut perm: Vec<usize> = (0..=self.rank).collect();
        perm.swap(i, j);
        self.permute(&perm)
    }

    /// Replaces every `t_j` by `t_j^k`.
    pub fn dilate(&self, k: i32) -> Self {
        LaurentPoly {
            rank: self.rank,
            terms: self.terms.iter().map(|(e, c)| (e.iter().map(|x| x * k).collect(), c.clone())).collect(),
        }
    }

    /// Halves all exponents; fails unless every canonical exponent is even.
    pub fn halve(&self) -> Result<Self> {
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            if e.iter().any(|x| x % 2 != 0) {
                return Err(Error::Parity);
            }
            terms.insert(e.iter().map(|x| x / 2).collect(), c.clone());
        }
        Ok(LaurentPoly { rank: self.rank, terms })
    }

    /// Largest `|e_j|` over all terms, i.e. the trigonometric degree in each angle.
    pub fn fourier_degree(&self) -> usize {
        self.terms.keys().flat_map(|e| e.iter().map(|x| x.unsigned_abs() as usize)).max().unwrap_or(0)
    }

    pub fn evaluate(&self, a: &TorusPoint) -> Complex64 {
        assert_eq!(a.rank(), self.rank, "torus rank mismatch");
        let mut s = Complex64::zero();
        for (e, c) in &self.terms {
            let ph: f64 = e[..self.rank].iter().zip(&a.angles).map(|(k, th)| *k as f64 * th).sum();
            s += Complex64::from_polar(to_f64(c), ph);
        }
        s
    }

    /// Evaluates at an arbitrary point of `(C^*)^{n+1}` (no relation imposed on the canonical form).
    pub fn evaluate_at(&self, t: &[Complex64]) -> Complex64 {
        let mut s = Complex64::zero();
        for (e, c) in &self.terms {
            let mut m = Complex64::new(to_f64(c), 0.0);
            for (x, k) in t.iter().zip(e) {
                m *= x.powi(*k);
            }
            s += m;
        }
        s
    }

    /// Euler operator along `X = diag(x)`: `t^e -> (sum_j x_j e_j) t^e`.
    pub fn derive_along(&self, x: &[i64]) -> Result<Self> {
        if x.len() != self.rank + 1 || x.iter().sum::<i64>() != 0 {
            return Err(Error::NotTraceless);
        }
        let mut out = Self::zero(self.rank);
        for (e, c) in &self.terms {
            let w: i64 = e.iter().zip(x).map(|(a, b)| *a as i64 * b).sum();
            out.add_term(e, &(c * Q::from_integer(w.into())));
        }
        Ok(out)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let v: Vec<TermJson> = self
            .terms
            .iter()
            .map(|(e, c)| TermJson { e: e.clone(), num: c.numer().to_string(), den: c.denom().to_string() })
            .collect();
        serde_json::to_value(v).expect("serializable")
    }

    pub fn from_json(rank: usize, v: &serde_json::Value) -> Option<Self> {
        let terms: Vec<TermJson> = serde_json::from_value(v.clone()).ok()?;
        let mut p = Self::zero(rank);
        for t in terms {
            if t.e.len() != rank + 1 {
                return None;
            }
            let c = parse_q(&format!("{}/{}", t.num, t.den))?;
            p.add_term(&canonicalize(&t.e), &c);
        }
        Some(p)
    }

    pub fn to_string_pretty(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (e, c) in &self.terms {
            parts.push(format!("{}*t^{:?}", fmt_q(c), e));
        }
        parts.join(" + ")
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, o: &LaurentPoly) -> LaurentPoly {
        assert_eq!(self.rank, o.rank);
        let mut r = self.clone();
        for (e, c) in &o.terms {
            r.add_term(e, c);
        }
        r
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, o: &LaurentPoly) -> LaurentPoly {
        assert_eq!(self.rank, o.rank);
        let mut r = self.clone();
        for (e, c) in &o.terms {
            r.add_term(e, &-c);
        }
        r
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        self.scale(&-Q::one())
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, o: &LaurentPoly) -> LaurentPoly {
        assert_eq!(self.rank, o.rank);
        let mut acc: BTreeMap<Vec<i32>, Q> = BTreeMap::new();
        let mut key = vec![0; self.rank + 1];
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                for j in 0..key.len() {
                    key[j] = e1[j] + e2[j];
                }
                let p = c1 * c2;
                match acc.get_mut(&key) {
                    Some(v) => *v += p,
                    None => {
                        acc.insert(key.clone(), p);
                    }
                }
            }
        }
        acc.retain(|_, v| !v.is_zero());
        LaurentPoly { rank: self.rank, terms: acc }
    }
}

/// The standard rational basis `E_jj - E_{j+1,j+1}` of the diagonal traceless matrices.
pub fn simple_basis(rank: usize) -> Vec<Vec<i64>> {
    (0..rank)
        .map(|j| {
            let mut x = vec![0; rank + 1];
            x[j] = 1;
            x[j + 1] = -1;
            x
        })
        .collect()
}

/// Inverse of the trace-form Gram matrix `tr(X_a X_b)` of a basis.
pub fn dual_gram(basis: &[Vec<i64>]) -> QMat {
    let b = QMat::from_fn(basis.len(), basis.len(), |a, c| {
        Q::from_integer(basis[a].iter().zip(&basis[c]).map(|(x, y)| x * y).sum::<i64>().into())
    });
    b.inverse().expect("basis is linearly independent")
}

/// `sum_{a,b} (B^{-1})_{ab} (d_{X_a} f)(d_{X_b} g)` for a given rational basis.
pub fn gradient_contract_with_basis(f: &LaurentPoly, g: &LaurentPoly, basis: &[Vec<i64>]) -> LaurentPoly {
    let bi = dual_gram(basis);
    let df: Vec<LaurentPoly> = basis.iter().map(|x| f.derive_along(x).expect("traceless basis")).collect();
    let dg: Vec<LaurentPoly> = basis.iter().map(|x| g.derive_along(x).expect("traceless basis")).collect();
    let mut out = LaurentPoly::zero(f.rank());
    for a in 0..basis.len() {
        for b in 0..basis.len() {
            if bi[(a, b)].is_zero() {
                continue;
            }
            out = &out + &(&df[a] * &dg[b]).scale(&bi[(a, b)]);
        }
    }
    out
}

/// Basis-independent gradient pairing of two torus functions under the trace form.
pub fn gradient_contract(f: &LaurentPoly, g: &LaurentPoly) -> LaurentPoly {
    gradient_contract_with_basis(f, g, &simple_basis(f.rank()))
}

/// A dense matrix of Laurent polynomials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixLaurent {
    rows: usize,
    cols: usize,
    rank: usize,
    data: Vec<LaurentPoly>,
}

impl MatrixLaurent {
    pub fn zeros(rank: usize, rows: usize, cols: usize) -> Self {
        MatrixLaurent { rows, cols, rank, data: vec![LaurentPoly::zero(rank); rows * cols] }
    }

    pub fn from_fn(rank: usize, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> LaurentPoly) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        MatrixLaurent { rows, cols, rank, data }
    }

    pub fn from_qmat(rank: usize, m: &QMat) -> Self {
        Self::from_fn(rank, m.rows(), m.cols(), |i, j| LaurentPoly::constant(rank, m[(i, j)].clone()))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn get(&self, i: usize, j: usize) -> &LaurentPoly {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, p: LaurentPoly) {
        self.data[i * self.cols + j] = p;
    }

    pub fn map(&self, f: impl Fn(&LaurentPoly) -> LaurentPoly) -> Self {
        MatrixLaurent { rows: self.rows, cols: self.cols, rank: self.rank, data: self.data.iter().map(f).collect() }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.rank, self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    /// Entry-wise conjugate transpose on the compact torus.
    pub fn adjoint(&self) -> Self {
        self.transpose().map(|p| p.conj())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|p| p.is_zero())
    }

    pub fn evaluate(&self, a: &TorusPoint) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j).evaluate(a))
    }

    /// Permutes rows: row `i` of the result is row `perm[i]` of `self`.
    pub fn permute_rows(&self, perm: &[usize]) -> Self {
        Self::from_fn(self.rank, self.rows, self.cols, |i, j| self.get(perm[i], j).clone())
    }

    pub fn permute_cols(&self, perm: &[usize]) -> Self {
        Self::from_fn(self.rank, self.rows, self.cols, |i, j| self.get(i, perm[j]).clone())
    }

    /// Determinant by Laplace expansion along rows, memoised over column subsets.
    pub fn det(&self) -> LaurentPoly {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut memo: std::collections::HashMap<u64, LaurentPoly> = std::collections::HashMap::new();
        fn rec(
            m: &MatrixLaurent,
            row: usize,
            used: u64,
            memo: &mut std::collections::HashMap<u64, LaurentPoly>,
        ) -> LaurentPoly {
            let n = m.rows;
            if row == n {
                return LaurentPoly::one(m.rank);
            }
            if let Some(v) = memo.get(&used) {
                return v.clone();
            }
            let mut acc = LaurentPoly::zero(m.rank);
            let mut sign_pos = 0;
            for c in 0..n {
                if used & (1 << c) != 0 {
                    continue;
                }
                let e = m.get(row, c);
                if !e.is_zero() {
                    let minor = rec(m, row + 1, used | (1 << c), memo);
                    let term = e * &minor;
                    acc = if sign_pos % 2 == 0 { &acc + &term } else { &acc - &term };
                }
                sign_pos += 1;
            }
            memo.insert(used, acc.clone());
            acc
        }
        if n == 0 {
            return LaurentPoly::one(self.rank);
        }
        rec(self, 0, 0, &mut memo)
    }
}

impl Mul for &MatrixLaurent {
    type Output = MatrixLaurent;
    fn mul(self, o: &MatrixLaurent) -> MatrixLaurent {
        assert_eq!(self.cols, o.rows);
        MatrixLaurent::from_fn(self.rank, self.rows, o.cols, |i, j| {
            let mut acc = LaurentPoly::zero(self.rank);
            for k in 0..self.cols {
                let a = self.get(i, k);
                let b = o.get(k, j);
                if a.is_zero() || b.is_zero() {
                    continue;
                }
                acc = &acc + &(a * b);
            }
            acc
        })
    }
}

impl Add for &MatrixLaurent {
    type Output = MatrixLaurent;
    fn add(self, o: &MatrixLaurent) -> MatrixLaurent {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        MatrixLaurent::from_fn(self.rank, self.rows, self.cols, |i, j| self.get(i, j) + o.get(i, j))
    }
}

impl Sub for &MatrixLaurent {
    type Output = MatrixLaurent;
    fn sub(self, o: &MatrixLaurent) -> MatrixLaurent {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        MatrixLaurent::from_fn(self.rank, self.rows, self.cols, |i, j| self.get(i, j) - o.get(i, j))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn phi1_n2() -> LaurentPoly {
        LaurentPoly::from_terms(2, [(vec![2, 0, 0], q(1, 3)), (vec![0, 2, 0], q(1, 3)), (vec![0, 0, 2], q(1, 3))])
    }

    #[test]
    fn canonical_examples() {
        assert_eq!(canonicalize(&[1, 1, 1]), vec![0, 0, 0]);
        assert_eq!(canonicalize(&[2, 0, 0]), vec![2, 0, 0]);
        assert_eq!(canonicalize(&[0, 1, 2]), vec![-2, -1, 0]);
    }

    #[test]
    fn evaluation_examples() {
        let a = TorusPoint::new(vec![0.3, -1.1]);
        assert!((LaurentPoly::one(2).evaluate(&a) - 1.0).norm() < 1e-15);
        let rel = LaurentPoly::monomial(2, &[1, 1, 1], q(1, 1));
        assert!((rel.evaluate(&a) - 1.0).norm() < 1e-15);
        assert!((phi1_n2().evaluate(&TorusPoint::identity(2)) - 1.0).norm() < 1e-15);
    }

    #[test]
    fn derive_examples() {
        let t1sq = LaurentPoly::monomial(2, &[2, 0, 0], q(1, 1));
        assert_eq!(t1sq.derive_along(&[1, -1, 0]).unwrap(), t1sq.scale(&q(2, 1)));
        assert!(LaurentPoly::constant(2, q(5, 1)).derive_along(&[1, -1, 0]).unwrap().is_zero());
        let d = phi1_n2().derive_along(&[1, -1, 0]).unwrap();
        let want = LaurentPoly::from_terms(2, [(vec![2, 0, 0], q(2, 3)), (vec![0, 2, 0], q(-2, 3))]);
        assert_eq!(d, want);
        assert!(matches!(t1sq.derive_along(&[1, 0, 0]), Err(Error::NotTraceless)));
    }

    #[test]
    fn contract_constant_is_zero() {
        let c = LaurentPoly::constant(2, q(3, 1));
        assert!(gradient_contract(&c, &phi1_n2()).is_zero());
    }

    #[test]
    fn contract_n1() {
        // phi = (t^2 + t^-2)/2 on SL(2): |grad phi|^2 = 2 phi^2 - 2
        let phi = LaurentPoly::from_terms(1, [(vec![2, 0], q(1, 2)), (vec![0, 2], q(1, 2))]);
        let g = gradient_contract(&phi, &phi);
        let want = &(&phi * &phi).scale(&q(2, 1)) - &LaurentPoly::constant(1, q(2, 1));
        assert_eq!(g, want);
    }

    #[test]
    fn determinant_small() {
        let t = |j| LaurentPoly::var(1, j);
        let m = MatrixLaurent::from_fn(1, 2, 2, |i, j| if j == 0 { t(i) } else { t(i).conj() });
        let d = m.det();
        let want = &t(0).dilate(2) - &t(1).dilate(2);
        assert_eq!(d, want);
    }

    #[test]
    fn json_roundtrip() {
        let p = phi1_n2();
        assert_eq!(LaurentPoly::from_json(2, &p.to_json()).unwrap(), p);
    }
}
