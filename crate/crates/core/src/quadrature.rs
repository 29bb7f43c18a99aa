//! Integration over the compact torus against `|delta|`.
//!
//! Every integrand is a trigonometric polynomial, so a uniform grid with more
//! nodes per angle than the Fourier degree integrates it exactly up to round-off.
//! The exact route extracts constant terms of Laurent expansions instead.

use crate::error::{Error, Result};
use crate::laurent::{LaurentPoly, MatrixLaurent, TorusPoint};
use crate::linalg::QMat;
use crate::phipoly::PhiPoly;
use crate::rational::{factorial, Q};
use crate::spherical::{phi_point, zonal_phis};
use crate::weight::abs_delta;
use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::{One, Zero};
use rayon::prelude::*;
use std::collections::HashMap;
use std::f64::consts::PI;

/// Default cap on the Fourier degree handled by the grid.
pub const MAX_FOURIER_DEGREE: usize = 512;

const CHUNK: usize = 1024;

/// Uniform grid of `m` points per angle on `[0, 2 pi)^n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GridSpec {
    pub n: usize,
    pub m: usize,
}

impl GridSpec {
    /// Grid exact for trigonometric polynomials of degree `< m` in each angle.
    pub fn for_degree(n: usize, degree: usize, cap: usize) -> Result<Self> {
        if degree > cap {
            return Err(Error::GridOverflow { degree, cap });
        }
        Ok(GridSpec { n, m: degree + 1 })
    }

    pub fn nodes(&self) -> usize {
        self.m.pow(self.n as u32)
    }

    pub fn node(&self, idx: usize) -> TorusPoint {
        let h = 2.0 * PI / self.m as f64;
        let mut r = idx;
        let angles = (0..self.n)
            .map(|_| {
                let a = h * (r % self.m) as f64;
                r /= self.m;
                a
            })
            .collect();
        TorusPoint::new(angles)
    }

    /// Sum of `f` over the grid nodes, in fixed chunks combined pairwise.
    pub fn sum<T, F>(&self, zero: T, f: F) -> T
    where
        T: Clone + Send + Sync + std::ops::Add<Output = T>,
        F: Fn(&TorusPoint) -> T + Sync,
    {
        let total = self.nodes();
        let chunks = total.div_ceil(CHUNK);
        let partial: Vec<T> = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut acc = zero.clone();
                for idx in c * CHUNK..((c + 1) * CHUNK).min(total) {
                    acc = acc + f(&self.node(idx));
                }
                acc
            })
            .collect();
        pairwise_sum(partial, zero)
    }
}

/// Pairwise (tree) summation in a fixed order.
pub fn pairwise_sum<T: Clone + std::ops::Add<Output = T>>(mut v: Vec<T>, zero: T) -> T {
    if v.is_empty() {
        return zero;
    }
    while v.len() > 1 {
        let mut next = Vec::with_capacity(v.len().div_ceil(2));
        let mut it = v.into_iter();
        while let Some(a) = it.next() {
            match it.next() {
                Some(b) => next.push(a + b),
                None => next.push(a),
            }
        }
        v = next;
    }
    v.pop().unwrap()
}

/// Normalised Haar integral of `f` (times `|delta|` if requested) on the grid.
pub fn integrate(f: &LaurentPoly, with_delta: bool, cap: usize) -> Result<Complex64> {
    let n = f.rank();
    let g = if with_delta { f * &abs_delta(n) } else { f.clone() };
    let grid = GridSpec::for_degree(n, g.fourier_degree(), cap)?;
    Ok(grid.sum(Complex64::zero(), |a| g.evaluate(a)) / grid.nodes() as f64)
}

/// Matrix version of [`integrate`].
pub fn integrate_matrix(f: &MatrixLaurent, with_delta: bool, cap: usize) -> Result<DMatrix<Complex64>> {
    let n = f.rank();
    let d = abs_delta(n);
    let g = if with_delta { f.map(|p| p * &d) } else { f.clone() };
    let mut deg = 0;
    for i in 0..g.rows() {
        for j in 0..g.cols() {
            deg = deg.max(g.get(i, j).fourier_degree());
        }
    }
    let grid = GridSpec::for_degree(n, deg, cap)?;
    Ok(grid.sum(DMatrix::zeros(g.rows(), g.cols()), |a| g.evaluate(a)) / Complex64::new(grid.nodes() as f64, 0.0))
}

/// Exact integral: the constant term of `f` (times `|delta|`).
pub fn integrate_exact(f: &LaurentPoly, with_delta: bool) -> Q {
    if with_delta {
        constant_term_of_product(f, &abs_delta(f.rank()))
    } else {
        f.constant_term()
    }
}

/// Constant term of `f g` without forming the product.
pub fn constant_term_of_product(f: &LaurentPoly, g: &LaurentPoly) -> Q {
    let mut s = Q::zero();
    for (e, c) in f.terms() {
        let neg: Vec<i32> = e.iter().map(|x| -x).collect();
        let d = g.coeff(&neg);
        if !d.is_zero() {
            s += c * d;
        }
    }
    s
}

/// `|delta|` evaluated from the product formula at a torus point.
pub fn abs_delta_at(a: &TorusPoint) -> f64 {
    let u: Vec<Complex64> = a.coords().iter().map(|t| t * t).collect();
    let mut p = 1.0;
    for i in 0..u.len() {
        for j in i + 1..u.len() {
            p *= (u[i] - u[j]).norm_sqr();
        }
    }
    p
}

/// `1/(n+1)!`.
pub fn c1(n: usize) -> Q {
    Q::new(1.into(), factorial(n as u64 + 1))
}

/// Exact moments `c1 * CT(phi^f |delta|)` with memoised Laurent powers.
pub struct Moments {
    n: usize,
    c1: Q,
    abs_delta: LaurentPoly,
    zonal: Vec<LaurentPoly>,
    powers: HashMap<Vec<u32>, LaurentPoly>,
    values: HashMap<Vec<u32>, Q>,
}

impl Moments {
    pub fn new(n: usize) -> Self {
        Moments {
            n,
            c1: c1(n),
            abs_delta: abs_delta(n),
            zonal: zonal_phis(n),
            powers: HashMap::new(),
            values: HashMap::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn power(&mut self, f: &[u32]) -> LaurentPoly {
        if let Some(p) = self.powers.get(f) {
            return p.clone();
        }
        let p = match f.iter().position(|&x| x > 0) {
            None => LaurentPoly::one(self.n),
            Some(i) => {
                let mut g = f.to_vec();
                g[i] -= 1;
                &self.power(&g) * &self.zonal[i]
            }
        };
        self.powers.insert(f.to_vec(), p.clone());
        p
    }

    /// `c1 * integral phi^f |delta| da`.
    pub fn moment(&mut self, f: &[u32]) -> Q {
        if let Some(v) = self.values.get(f) {
            return v.clone();
        }
        // conj(phi^f) = phi^{reversed f}; moments are real, so only one orientation is stored
        let p = self.power(f);
        let v = &self.c1 * constant_term_of_product(&p, &self.abs_delta);
        let mut rev = f.to_vec();
        rev.reverse();
        self.values.insert(rev, v.clone());
        self.values.insert(f.to_vec(), v.clone());
        v
    }
}

fn reversed(m: &[u32]) -> Vec<u32> {
    m.iter().rev().copied().collect()
}

/// Exact `<P, Q> = c1 int P(phi(a))^* W(phi(a)) Q(phi(a)) |delta(a)| da`.
pub fn inner_product_exact(p: &PhiPoly, q: &PhiPoly, w: &PhiPoly, mom: &mut Moments) -> QMat {
    let (pr, pc) = p.shape();
    let (_, qc) = q.shape();
    assert_eq!(pr, w.shape().0, "shape mismatch");
    let mut out = QMat::zeros(pc, qc);
    // group W Q by monomial first
    let wq = w * q;
    for (a, pa) in p.terms() {
        let pat = pa.transpose();
        let ra = reversed(a);
        for (b, cb) in wq.terms() {
            let f: Vec<u32> = ra.iter().zip(b).map(|(x, y)| x + y).collect();
            let mu = mom.moment(&f);
            if mu.is_zero() {
                continue;
            }
            out = &out + &(&pat * cb).scale(&mu);
        }
    }
    out
}

/// Precomputed floating evaluator of a `PhiPoly`.
struct FloatPoly {
    rows: usize,
    cols: usize,
    terms: Vec<(Vec<u32>, DMatrix<Complex64>)>,
}

impl FloatPoly {
    fn new(p: &PhiPoly) -> Self {
        let (rows, cols) = p.shape();
        FloatPoly { rows, cols, terms: p.terms().map(|(m, c)| (m.clone(), c.to_c64())).collect() }
    }

    fn eval(&self, phi: &[Complex64]) -> DMatrix<Complex64> {
        let mut out = DMatrix::zeros(self.rows, self.cols);
        for (m, c) in &self.terms {
            let mut x = Complex64::one();
            for (v, k) in phi.iter().zip(m) {
                x *= v.powu(*k);
            }
            out += c * x;
        }
        out
    }
}

/// Floating `<P, Q>` on the torus grid; `W` evaluated through `phi(a)`.
pub fn inner_product_grid(p: &PhiPoly, q: &PhiPoly, w: &PhiPoly, cap: usize) -> Result<DMatrix<Complex64>> {
    let n = p.nvars();
    let deg = 2 * (p.total_degree() + q.total_degree() + w.total_degree()) + abs_delta(n).fourier_degree();
    let grid = GridSpec::for_degree(n, deg, cap)?;
    let (fp, fq, fw) = (FloatPoly::new(p), FloatPoly::new(q), FloatPoly::new(w));
    let c = crate::rational::to_f64(&c1(n));
    let (_, pc) = p.shape();
    let (_, qc) = q.shape();
    let total = grid.sum(DMatrix::zeros(pc, qc), |a| {
        let z = phi_point(n, a);
        let d = abs_delta_at(a);
        fp.eval(&z).adjoint() * fw.eval(&z) * fq.eval(&z) * Complex64::new(d, 0.0)
    });
    Ok(total * Complex64::new(c / grid.nodes() as f64, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;
    use crate::weight::weight_polynomial;

    #[test]
    fn haar_basics() {
        let one = LaurentPoly::one(2);
        assert!((integrate(&one, false, 512).unwrap() - 1.0).norm() < 1e-15);
        let t = LaurentPoly::var(2, 0).dilate(2);
        assert!(integrate(&t, false, 512).unwrap().norm() < 1e-15);
        assert!((integrate(&one, true, 512).unwrap() - 6.0).norm() < 1e-12);
    }

    #[test]
    fn exact_selberg() {
        for n in 1..=3 {
            assert_eq!(integrate_exact(&LaurentPoly::one(n), true), Q::from_integer(factorial(n as u64 + 1)));
        }
    }

    #[test]
    fn overflow_guard() {
        let t = LaurentPoly::var(1, 0).pow(40);
        assert!(matches!(integrate(&t, false, 16), Err(Error::GridOverflow { .. })));
    }

    #[test]
    fn identity_gram_n2() {
        let w = weight_polynomial(2, 1).unwrap();
        let i = PhiPoly::identity(2, 3);
        let mut mom = Moments::new(2);
        assert_eq!(inner_product_exact(&i, &i, &w, &mut mom), QMat::diag(&[q(3, 1), q(1, 1), q(3, 1)]));
        let g = inner_product_grid(&i, &i, &w, 512).unwrap();
        for (x, y) in g.iter().zip([3.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 3.0]) {
            assert!((x - y).norm() < 1e-12);
        }
        let z = PhiPoly::zero(2, 3, 3);
        assert!(inner_product_exact(&z, &i, &w, &mut mom).is_zero());
    }

    #[test]
    fn exact_and_grid_agree() {
        let w = weight_polynomial(2, 1).unwrap();
        let i = PhiPoly::identity(2, 3);
        let x = i.times_scalar(&PhiPoly::var(2, 0));
        let mut mom = Moments::new(2);
        let e = inner_product_exact(&i, &x, &w, &mut mom).to_c64();
        let g = inner_product_grid(&i, &x, &w, 512).unwrap();
        assert!((e - g).norm() < 1e-12);
    }

    #[test]
    fn pairwise_matches_sequential() {
        let v: Vec<f64> = (1..=1000).map(|x| x as f64).collect();
        assert_eq!(pairwise_sum(v, 0.0), 500500.0);
    }
}
