//! The matrix weight `W_pol`, the scalar density `P`, the orthogonality domain
//! and its measure constants.

use crate::error::{Error, Result};
use crate::laurent::{LaurentPoly, TorusPoint};
use crate::linalg::QMat;
use crate::phipoly::PhiPoly;
use crate::rational::{binom, factorial, to_f64, Q};
use crate::spherical::{elementary_values, phi_point, sym_power_psi0};
use crate::symfun::{express_in_phi, power_sums_from_elementary};
use num_complex::Complex64;
use num_traits::{One, Zero};
use rayon::prelude::*;
use std::collections::HashMap;
use std::f64::consts::PI;

/// Weight data for a pair `(n, k)`.
#[derive(Clone, Debug)]
pub struct WeightSpec {
    pub n: usize,
    pub k: u32,
    pub w_pol: PhiPoly,
    pub p: PhiPoly,
    /// Rational `r` such that the full density constant is `r * pi^{-n}`.
    pub prefactor: Q,
    /// `true` when the weight is only known up to `W -> C* W C` (k >= 2).
    pub congruence_class: bool,
}

impl WeightSpec {
    pub fn new(n: usize, k: u32) -> Result<Self> {
        Ok(WeightSpec {
            n,
            k,
            w_pol: weight_polynomial(n, k)?,
            p: scalar_p(n),
            prefactor: density_prefactor(n),
            congruence_class: k >= 2,
        })
    }

    pub fn size(&self) -> usize {
        self.w_pol.shape().0
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "n": self.n,
            "k": self.k,
            "W_pol": self.w_pol.to_json(),
            "P": self.p.to_json(),
            "prefactor_times_pi_pow_n": crate::rational::fmt_q(&self.prefactor),
            "kind": if self.congruence_class { "congruence-class" } else { "closed-form" },
        })
    }
}

/// `2^{-n} prod_{k=1}^{n} binom(n+1, k)`.
pub fn density_prefactor(n: usize) -> Q {
    let mut r = Q::one();
    for k in 1..=n {
        r *= Q::from_integer(binom(n as i64 + 1, k as i64).into());
    }
    r / Q::from_integer((1i64 << n).into())
}

fn phi_or_one(i: usize, n: usize) -> PhiPoly {
    if i == 0 || i == n + 1 {
        PhiPoly::scalar(n, Q::one())
    } else {
        PhiPoly::var(n, i - 1)
    }
}

/// Entry `S_{jk}` (1-based, `j <= k`) of the symmetric matrix `Psi0^t Psi0`.
fn gram_entry(n: usize, j: usize, k: usize) -> PhiPoly {
    let (j, k) = if j <= k { (j, k) } else { (k, j) };
    let ni = n as i64;
    let mut s = PhiPoly::zero(n, 1, 1);
    let rmax = (n + 1 - k).min(j - 1);
    for r in 0..=rmax {
        let c = (k as i64 + 1 - j as i64 + 2 * r as i64)
            * binom(ni + 1, (k + r) as i64)
            * binom(ni + 1, (j - 1 - r) as i64);
        let term = &phi_or_one(k + r, n) * &phi_or_one(j - 1 - r, n);
        s = &s + &term.scale(&Q::from_integer(c.into()));
    }
    s.scale(&Q::new(1.into(), (binom(ni, j as i64 - 1) * binom(ni, k as i64 - 1)).into()))
}

/// Closed form of `W_pol` for `k = 1`.
pub fn weight_closed_form(n: usize) -> PhiPoly {
    let m = n + 1;
    PhiPoly::from_entries(n, m, m, |a, b| gram_entry(n, m - a, b + 1))
}

/// `W_pol` computed from `Psi0^(k)` on the torus: `(Psi^(k))^* Psi^(k)` rewritten in `phi`.
pub fn weight_computed(n: usize, k: u32) -> Result<PhiPoly> {
    let psi = sym_power_psi0(n, k)?;
    let w = &psi.adjoint() * &psi;
    let size = psi.cols();
    let mut entries = Vec::with_capacity(size * size);
    for i in 0..size {
        for j in 0..size {
            entries.push(express_in_phi(w.get(i, j)).map_err(|e| Error::Internal(format!("W entry ({i},{j}): {e}")))?);
        }
    }
    Ok(PhiPoly::from_entries(n, size, size, |i, j| entries[i * size + j].clone()))
}

/// `W_pol(phi)`: closed form for `k = 1`, computed otherwise.
pub fn weight_polynomial(n: usize, k: u32) -> Result<PhiPoly> {
    if n == 0 {
        return Err(Error::Range("n must be at least 1".into()));
    }
    match k {
        0 => Ok(PhiPoly::identity(n, 1)),
        1 => Ok(weight_closed_form(n)),
        _ => weight_computed(n, k),
    }
}

/// `delta(t) = prod_{i<j} (t_i^2 - t_j^2)^2`.
pub fn delta(n: usize) -> LaurentPoly {
    let mut p = LaurentPoly::one(n);
    for i in 0..=n {
        for j in i + 1..=n {
            let f = &LaurentPoly::var(n, i).dilate(2) - &LaurentPoly::var(n, j).dilate(2);
            p = &(&p * &f) * &f;
        }
    }
    p
}

/// `|delta(t)| = prod_{i<j} (t_i^2 - t_j^2)(t_i^{-2} - t_j^{-2})` on the compact torus.
pub fn abs_delta(n: usize) -> LaurentPoly {
    let mut p = LaurentPoly::one(n);
    for i in 0..=n {
        for j in i + 1..=n {
            let f = &LaurentPoly::var(n, i).dilate(2) - &LaurentPoly::var(n, j).dilate(2);
            p = &(&p * &f) * &f.conj();
        }
    }
    p
}

fn scalar_det(m: &[Vec<PhiPoly>]) -> PhiPoly {
    let nv = m[0][0].nvars();
    let mut memo: HashMap<u64, PhiPoly> = HashMap::new();
    fn rec(m: &[Vec<PhiPoly>], row: usize, used: u64, nv: usize, memo: &mut HashMap<u64, PhiPoly>) -> PhiPoly {
        let n = m.len();
        if row == n {
            return PhiPoly::scalar(nv, Q::one());
        }
        if let Some(v) = memo.get(&used) {
            return v.clone();
        }
        let mut acc = PhiPoly::zero(nv, 1, 1);
        let mut pos = 0;
        for c in 0..n {
            if used & (1 << c) != 0 {
                continue;
            }
            if !m[row][c].is_zero() {
                let t = &m[row][c] * &rec(m, row + 1, used | (1 << c), nv, memo);
                acc = if pos % 2 == 0 { &acc + &t } else { &acc - &t };
            }
            pos += 1;
        }
        memo.insert(used, acc.clone());
        acc
    }
    rec(m, 0, 0, nv, &mut memo)
}

/// `P(phi)`: the Hankel determinant `det(p_{i+j-2}(u))` written in the zonal variables.
pub fn scalar_p(n: usize) -> PhiPoly {
    let e: Vec<PhiPoly> = (1..=n + 1)
        .map(|i| {
            if i == n + 1 {
                PhiPoly::scalar(n, Q::one())
            } else {
                PhiPoly::var(n, i - 1).scale(&Q::from_integer(binom(n as i64 + 1, i as i64).into()))
            }
        })
        .collect();
    let mut p = vec![PhiPoly::scalar(n, Q::from_integer((n as i64 + 1).into()))];
    p.extend(power_sums_from_elementary(&e, 2 * n));
    let h: Vec<Vec<PhiPoly>> = (0..=n).map(|i| (0..=n).map(|j| p[i + j].clone()).collect()).collect();
    scalar_det(&h)
}

/// `P` obtained by rewriting `delta` directly.
pub fn scalar_p_from_delta(n: usize) -> Result<PhiPoly> {
    express_in_phi(&delta(n))
}

/// Substitutes `phi_m -> s_m phi_m` in a scalar polynomial.
pub fn rescale_vars(p: &PhiPoly, s: &[Q]) -> PhiPoly {
    let mut out = PhiPoly::zero(p.nvars(), 1, 1);
    for (m, c) in p.terms() {
        let mut f = Q::one();
        for (x, k) in s.iter().zip(m) {
            for _ in 0..*k {
                f *= x;
            }
        }
        out.add_term(m, &c.scale(&f));
    }
    out
}

/// Measure constants of the orthogonality domain.
#[derive(Clone, Debug)]
pub struct MeasureConstants {
    pub n: usize,
    /// `1/(n+1)!`, normalising `integral |delta| da` to one.
    pub c1: Q,
    /// Volume of the domain in `|d phi_1 ... d phi_n|`.
    pub volume: f64,
    /// `Gamma(1+(n+1)s)/Gamma(1+s)^{n+1}` at `s = 1`.
    pub selberg: Q,
    pub prefactor: Q,
}

impl MeasureConstants {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "n": self.n,
            "c1": crate::rational::fmt_q(&self.c1),
            "volume": self.volume,
            "selberg_s1": crate::rational::fmt_q(&self.selberg),
            "selberg_s1_2": selberg(self.n, 1),
            "selberg_s3_2": selberg(self.n, 3),
            "prefactor_times_pi_pow_n": crate::rational::fmt_q(&self.prefactor),
        })
    }
}

/// `Gamma(m/2)` for a positive integer `m`.
pub fn gamma_half(m: u32) -> f64 {
    assert!(m > 0);
    if m % 2 == 0 {
        (1..m / 2).map(|x| x as f64).product()
    } else {
        // Gamma(1/2) = sqrt(pi); Gamma(x+1) = x Gamma(x)
        let mut g = PI.sqrt();
        let mut x = 0.5;
        while x + 0.25 < m as f64 / 2.0 {
            g *= x;
            x += 1.0;
        }
        g
    }
}

/// Selberg constant `Gamma(1+(n+1)s)/Gamma(1+s)^{n+1}` for `s = two_s / 2`.
pub fn selberg(n: usize, two_s: u32) -> f64 {
    let top = gamma_half(2 + (n as u32 + 1) * two_s);
    let bottom = gamma_half(2 + two_s).powi(n as i32 + 1);
    top / bottom
}

pub fn measure_constants(n: usize) -> MeasureConstants {
    let fact = factorial(n as u64 + 1);
    let mut binprod = 1.0;
    for k in 1..=n {
        binprod *= binom(n as i64 + 1, k as i64) as f64;
    }
    let volume = (2.0 * PI.sqrt()).powi(n as i32) / (gamma_half(2 + n as u32) * binprod);
    MeasureConstants {
        n,
        c1: Q::new(1.into(), fact.clone()),
        volume,
        selberg: Q::from_integer(fact),
        prefactor: density_prefactor(n),
    }
}

/// Maps real coordinates `(Re z_1, Im z_1, ..., [middle])` to `phi in C^n` with
/// `phi_{n+1-i} = conj(phi_i)`.
pub fn real_to_phi(v: &[f64]) -> Vec<Complex64> {
    let n = v.len();
    let mut z = vec![Complex64::zero(); n];
    for i in 0..n / 2 {
        let c = Complex64::new(v[2 * i], v[2 * i + 1]);
        z[i] = c;
        z[n - 1 - i] = c.conj();
    }
    if n % 2 == 1 {
        z[n / 2] = Complex64::new(v[n - 1], 0.0);
    }
    z
}

/// Inverse of [`real_to_phi`].
pub fn phi_to_real(z: &[Complex64]) -> Vec<f64> {
    let n = z.len();
    let mut v = Vec::with_capacity(n);
    for zi in z.iter().take(n / 2) {
        v.push(zi.re);
        v.push(zi.im);
    }
    if n % 2 == 1 {
        v.push(z[n / 2].re);
    }
    v
}

/// Factor between `|d phi_1 ... d phi_n|` and Lebesgue measure in the real coordinates.
pub fn real_form_jacobian(n: usize) -> f64 {
    (1u64 << (n / 2)) as f64
}

/// Coefficients (low to high) of `prod_j (z - u_j) = sum_r (-1)^r e_r z^{n+1-r}` for `e_r = binom(n+1,r) phi_r`.
fn characteristic(z: &[Complex64]) -> Vec<Complex64> {
    let n = z.len();
    let mut hi = Vec::with_capacity(n + 2);
    for r in 0..=n + 1 {
        let e = if r == 0 || r == n + 1 { Complex64::one() } else { z[r - 1] * binom(n as i64 + 1, r as i64) as f64 };
        hi.push(if r % 2 == 0 { e } else { -e });
    }
    hi.reverse();
    hi
}

/// Schur-Cohn: all roots of the polynomial (coefficients low to high) strictly inside the unit disk.
pub fn roots_inside_unit_disk(coeffs: &[Complex64]) -> bool {
    let mut a: Vec<Complex64> = coeffs.to_vec();
    while a.len() > 1 && a.last().unwrap().norm() == 0.0 {
        a.pop();
    }
    while a.len() > 1 {
        let m = a.len() - 1;
        let (a0, am) = (a[0], a[m]);
        if am.norm() <= a0.norm() {
            return false;
        }
        let next: Vec<Complex64> = (1..=m).map(|j| am.conj() * a[j] - a0 * a[m - j].conj()).collect();
        a = next;
    }
    true
}

/// Membership in the orthogonality domain.
///
/// `phi(v)` lies in the interior iff the `u_j` with `e_r(u) = binom(n+1,r) phi_r`
/// all lie on the unit circle; the polynomial is self-inversive on the real form,
/// so this is equivalent to its derivative having all roots inside the unit disk.
pub fn domain_contains(v: &[f64]) -> bool {
    if v.iter().any(|x| x.abs() > 1.0) {
        return false;
    }
    let z = real_to_phi(v);
    if z.iter().any(|x| x.norm() > 1.0) {
        return false;
    }
    let c = characteristic(&z);
    let d: Vec<Complex64> = (1..c.len()).map(|j| c[j] * j as f64).collect();
    roots_inside_unit_disk(&d)
}

/// Membership by tracking the sign of `P` along the segment from `0` to `v`.
pub fn domain_contains_ray(v: &[f64], p: &PhiPoly, resolution: usize) -> bool {
    if v.iter().any(|x| x.abs() > 1.0) {
        return false;
    }
    let z = real_to_phi(v);
    // P(s z) = sum_m s^m P_m(z) with P_m the homogeneous parts
    let deg = p.total_degree();
    let coeffs: Vec<f64> = (0..=deg).map(|m| p.homogeneous(m).evaluate(&z)[(0, 0)].re).collect();
    let eval = |s: f64| coeffs.iter().rev().fold(0.0, |acc, c| acc * s + c);
    let s0 = eval(0.0).signum();
    (1..=resolution).all(|i| eval(i as f64 / resolution as f64).signum() == s0)
}

/// Grid-counted volume of the domain in `|d phi|` units with `g` cells per axis.
pub fn volume_grid_count(n: usize, g: usize) -> f64 {
    let h = 2.0 / g as f64;
    let total = g.pow(n as u32);
    let count: usize = (0..total)
        .into_par_iter()
        .with_min_len(4096)
        .filter(|&idx| {
            let mut v = vec![0.0; n];
            let mut r = idx;
            for x in v.iter_mut() {
                *x = -1.0 + h * ((r % g) as f64 + 0.5);
                r /= g;
            }
            domain_contains(&v)
        })
        .count();
    count as f64 * h.powi(n as i32) * real_form_jacobian(n)
}

/// A sample of the boundary: alcove parameters `b` and the real coordinates of `phi(exp(b))`.
#[derive(Clone, Debug)]
pub struct BoundaryPoint {
    pub alcove: Vec<f64>,
    pub coords: Vec<f64>,
}

/// Torus angles from alcove parameters `b_j = theta_j - theta_{j+1}` with `sum theta = 0`.
pub fn alcove_to_torus(b: &[f64]) -> TorusPoint {
    let n = b.len();
    let x: f64 = b.iter().enumerate().map(|(j, bj)| (n - j) as f64 * bj).sum::<f64>() / (n as f64 + 1.0);
    let mut th = vec![x];
    for bj in b.iter().take(n - 1) {
        let last = *th.last().unwrap();
        th.push(last - bj);
    }
    TorusPoint::new(th)
}

fn simplex_grid(dim: usize, res: usize, total_exact: bool) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    fn rec(dim: usize, left: usize, cur: &mut Vec<usize>, exact: bool, out: &mut Vec<Vec<usize>>) {
        if cur.len() == dim {
            if !exact || left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for c in 0..=left {
            cur.push(c);
            rec(dim, left - c, cur, exact, out);
            cur.pop();
        }
    }
    rec(dim, res, &mut Vec::new(), total_exact, &mut out);
    out
}

/// Images of the alcove faces `b_i = 0` and `sum b = pi` on a grid of `resolution` steps.
pub fn domain_boundary(n: usize, resolution: usize) -> Vec<BoundaryPoint> {
    let step = PI / resolution as f64;
    let mut out = Vec::new();
    let mut push = |b: Vec<f64>| {
        let a = alcove_to_torus(&b);
        let coords = phi_to_real(&phi_point(n, &a));
        out.push(BoundaryPoint { alcove: b, coords });
    };
    for face in 0..n {
        for c in simplex_grid(n - 1, resolution, false) {
            let mut b = Vec::with_capacity(n);
            let mut it = c.iter();
            for j in 0..n {
                b.push(if j == face { 0.0 } else { *it.next().unwrap() as f64 * step });
            }
            push(b);
        }
    }
    for c in simplex_grid(n, resolution, true) {
        push(c.iter().map(|&x| x as f64 * step).collect());
    }
    out
}

/// Evaluates a scalar polynomial at real coordinates.
pub fn eval_real(p: &PhiPoly, v: &[f64]) -> f64 {
    p.evaluate(&real_to_phi(v))[(0, 0)].re
}

/// `W_pol` at real coordinates as a Hermitian matrix.
pub fn weight_at(w: &PhiPoly, v: &[f64]) -> nalgebra::DMatrix<Complex64> {
    w.evaluate(&real_to_phi(v))
}

/// Zonal coordinates of the torus point mapped by `phi`, as real coordinates.
pub fn torus_to_real(n: usize, a: &TorusPoint) -> Vec<f64> {
    phi_to_real(&phi_point(n, a))
}

/// `e_r(u)` values at a torus point, used by tests as an independent evaluation.
pub fn elementary_at(a: &TorusPoint) -> Vec<Complex64> {
    let u: Vec<Complex64> = a.coords().iter().map(|t| t * t).collect();
    elementary_values(&u)
}

/// `c * Q(s phi)`-matching: finds `c` with `p(phi) = c * printed(s * phi)`, if it exists.
pub fn matching_constant(p: &PhiPoly, printed: &PhiPoly, scales: &[Q]) -> Option<Q> {
    let r = rescale_vars(printed, scales);
    let zero = vec![0; p.nvars()];
    let (a, b) = (p.scalar_coeff(&zero), r.scalar_coeff(&zero));
    if b.is_zero() {
        return None;
    }
    let c = a / b;
    if &r.scale(&c) == p {
        Some(c)
    } else {
        None
    }
}

/// Constant `W_pol` coefficient matrix of a monomial, exposed for the commutant proofs.
pub fn weight_coefficient(w: &PhiPoly, m: &[u32]) -> QMat {
    w.coefficient(m)
}

/// `to_f64` of a rational, re-exported for callers working with measure data.
pub fn q_to_f64(x: &Q) -> f64 {
    to_f64(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn v(n: usize, i: usize) -> PhiPoly {
        PhiPoly::var(n, i)
    }

    #[test]
    fn weight_n2_matches_display() {
        let w = weight_polynomial(2, 1).unwrap();
        let three = |p: PhiPoly| p.scale(&q(3, 1));
        let c = |x: i64| PhiPoly::scalar(2, q(x, 1));
        let mid = &(&v(2, 0) * &v(2, 1)).scale(&q(9, 4)) + &PhiPoly::scalar(2, q(3, 4));
        let want = [
            [c(3), three(v(2, 0)), three(v(2, 1))],
            [three(v(2, 1)), mid, three(v(2, 0))],
            [three(v(2, 0)), three(v(2, 1)), c(3)],
        ];
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(w.entry(i, j), want[i][j], "entry ({i},{j})");
            }
        }
        let at0 = w.evaluate_q(&[q(0, 1), q(0, 1)]);
        assert_eq!(at0, QMat::diag(&[q(3, 1), q(3, 4), q(3, 1)]));
    }

    #[test]
    fn weight_n3_entry() {
        let w = weight_polynomial(3, 1).unwrap();
        let want = &(&v(3, 0) * &v(3, 2)).scale(&q(32, 9)) + &PhiPoly::scalar(3, q(4, 9));
        assert_eq!(w.entry(1, 1), want);
        assert_eq!(w, weight_computed(3, 1).unwrap());
        // at phi = 1 every row of W sums to (n+1)^2
        let at1 = w.evaluate_q(&[q(1, 1), q(1, 1), q(1, 1)]);
        for i in 0..4 {
            let s: Q = (0..4).map(|j| at1[(i, j)].clone()).sum();
            assert_eq!(s, q(16, 1));
        }
    }

    #[test]
    fn scalar_p_n1() {
        let x = v(1, 0);
        let want = &(&x * &x).scale(&q(4, 1)) - &PhiPoly::scalar(1, q(4, 1));
        assert_eq!(scalar_p(1), want);
    }

    #[test]
    fn constants() {
        let c = measure_constants(2);
        assert_eq!(c.c1, q(1, 6));
        assert_eq!(c.selberg, q(6, 1));
        assert!((c.volume - 4.0 * PI / 9.0).abs() < 1e-14);
        assert!((measure_constants(1).volume - 2.0).abs() < 1e-14);
        assert!((measure_constants(3).volume - PI / 9.0).abs() < 1e-14);
        assert_eq!(density_prefactor(2), q(9, 4));
        assert_eq!(density_prefactor(3), q(12, 1));
        assert!((selberg(2, 2) - 6.0).abs() < 1e-12);
    }

    #[test]
    fn gamma_half_values() {
        assert!((gamma_half(1) - PI.sqrt()).abs() < 1e-15);
        assert!((gamma_half(3) - PI.sqrt() / 2.0).abs() < 1e-15);
        assert!((gamma_half(8) - 6.0).abs() < 1e-15);
    }

    #[test]
    fn origin_inside() {
        for n in 1..=4 {
            assert!(domain_contains(&vec![0.0; n]));
        }
        assert!(!domain_contains(&[1.5, 0.0]));
    }

    #[test]
    fn real_coordinates_roundtrip() {
        let x = vec![0.1, -0.2, 0.3];
        assert_eq!(phi_to_real(&real_to_phi(&x)), x);
    }

    #[test]
    fn alcove_vertex_is_boundary() {
        let p = scalar_p(2);
        for b in [[0.0, 0.0], [PI, 0.0], [0.0, PI]] {
            let x = torus_to_real(2, &alcove_to_torus(&b));
            assert!(eval_real(&p, &x).abs() < 1e-10);
        }
    }
}
