//! Zonal spherical functions, the matrix `Psi0`, its symmetric powers, and the
//! representation-theoretic data (bottom set, Weyl dimensions, Casimir values).

use crate::error::{Error, Result};
use crate::laurent::{LaurentPoly, MatrixLaurent, TorusPoint};
use crate::rational::{binom, factorial, Q};
use crate::symfun::phi_u;
use num_bigint::BigInt;
use num_traits::{One, Zero};
use std::f64::consts::PI;

/// `phi_i(t) = binom(n+1,i)^{-1} sum_{|J|=i} t_J^2` (1-based `i`).
pub fn zonal_phi(i: usize, n: usize) -> Result<LaurentPoly> {
    if i == 0 || i > n {
        return Err(Error::Range(format!("phi_{i} with n = {n}")));
    }
    Ok(phi_u(i, n).dilate(2))
}

/// All zonal variables `phi_1, ..., phi_n` as torus polynomials.
pub fn zonal_phis(n: usize) -> Vec<LaurentPoly> {
    (1..=n).map(|i| zonal_phi(i, n).expect("in range")).collect()
}

/// The torus point mapped to the origin of the zonal coordinates.
pub fn barycenter(n: usize) -> TorusPoint {
    TorusPoint::new((1..=n).map(|j| PI * (n as f64 - 2.0 * (j as f64 - 1.0)) / (2.0 * (n as f64 + 1.0))).collect())
}

/// Zonal coordinates of a torus point.
pub fn phi_point(n: usize, a: &TorusPoint) -> Vec<num_complex::Complex64> {
    let u: Vec<num_complex::Complex64> = a.coords().iter().map(|t| t * t).collect();
    let e = elementary_values(&u);
    (1..=n).map(|m| e[m] / binom(n as i64 + 1, m as i64) as f64).collect()
}

/// `e_0, ..., e_m` evaluated at a point.
pub fn elementary_values(u: &[num_complex::Complex64]) -> Vec<num_complex::Complex64> {
    let mut e = vec![num_complex::Complex64::new(0.0, 0.0); u.len() + 1];
    e[0] = num_complex::Complex64::new(1.0, 0.0);
    for (k, x) in u.iter().enumerate() {
        for r in (1..=k + 1).rev() {
            let prev = e[r - 1];
            e[r] += prev * x;
        }
    }
    e
}

fn subsets_containing(m: usize, size: usize, i: usize) -> Vec<Vec<usize>> {
    let others: Vec<usize> = (0..m).filter(|&j| j != i).collect();
    let mut out = Vec::new();
    fn rec(pool: &[usize], start: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for k in start..pool.len() {
            cur.push(pool[k]);
            rec(pool, k + 1, r, cur, out);
            cur.pop();
        }
    }
    rec(&others, 0, size - 1, &mut Vec::new(), &mut out);
    out
}

/// `Psi0(t)`: entry `(i, m)` is `binom(n,m-1)^{-1} t_i sum_{J ∋ i, |J| = m} (t^{J \ i})^2`.
pub fn psi0(n: usize) -> MatrixLaurent {
    let m = n + 1;
    MatrixLaurent::from_fn(n, m, m, |i, col| {
        let size = col + 1;
        let c = Q::new(1.into(), binom(n as i64, col as i64).into());
        let mut p = LaurentPoly::zero(n);
        for rest in subsets_containing(m, size, i) {
            let mut e = vec![0; m];
            e[i] = 1;
            for j in rest {
                e[j] = 2;
            }
            p = &p + &LaurentPoly::monomial(n, &e, c.clone());
        }
        p
    })
}

/// `det Psi0` computed directly.
pub fn det_psi0(n: usize) -> LaurentPoly {
    psi0(n).det()
}

/// `prod_{m=1}^{n+1} binom(n, m-1)^{-1} * prod_{i<j} (t_i^2 - t_j^2)`.
pub fn det_psi0_closed_form(n: usize) -> LaurentPoly {
    let mut c = Q::one();
    for m in 1..=n + 1 {
        c /= Q::from_integer(binom(n as i64, m as i64 - 1).into());
    }
    let mut p = LaurentPoly::constant(n, c);
    for i in 0..=n {
        for j in i + 1..=n {
            let ti = LaurentPoly::var(n, i).dilate(2);
            let tj = LaurentPoly::var(n, j).dilate(2);
            p = &p * &(&ti - &tj);
        }
    }
    p
}

/// Compositions of `k` into `parts` non-negative parts, lexicographically decreasing.
pub fn compositions(k: u32, parts: usize) -> Vec<Vec<u32>> {
    crate::phipoly::monomials_of_degree(parts, k)
}

pub fn composition_label(c: &[u32]) -> String {
    c.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(".")
}

/// Multinomial `k! / prod s_j!`.
pub fn multinomial(s: &[u32]) -> BigInt {
    let k: u32 = s.iter().sum();
    let mut r = factorial(k as u64);
    for &x in s {
        r /= factorial(x as u64);
    }
    r
}

/// Non-negative integer matrices `s[p][q]` with `sum_q s[p][q] = tau_p` and
/// `sum_p s[p][q] = rho_q`, in lexicographic order of the flattened entries.
pub fn enumerate_m(tau: &[u32], rho: &[u32]) -> Result<Vec<Vec<Vec<u32>>>> {
    if tau.iter().sum::<u32>() != rho.iter().sum::<u32>() {
        return Err(Error::Totals);
    }
    let np = tau.len();
    let nq = rho.len();
    let mut out = Vec::new();
    fn rec(
        p: usize,
        tau: &[u32],
        remaining: &mut Vec<u32>,
        cur: &mut Vec<Vec<u32>>,
        out: &mut Vec<Vec<Vec<u32>>>,
        nq: usize,
    ) {
        if p == tau.len() {
            if remaining.iter().all(|&x| x == 0) {
                out.push(cur.clone());
            }
            return;
        }
        for row in compositions(tau[p], nq) {
            if row.iter().zip(remaining.iter()).all(|(a, b)| a <= b) {
                for (r, a) in remaining.iter_mut().zip(&row) {
                    *r -= a;
                }
                cur.push(row.clone());
                rec(p + 1, tau, remaining, cur, out, nq);
                cur.pop();
                for (r, a) in remaining.iter_mut().zip(&row) {
                    *r += a;
                }
            }
        }
    }
    let _ = np;
    rec(0, tau, &mut rho.to_vec(), &mut Vec::new(), &mut out, nq);
    out.sort();
    Ok(out)
}

/// `sum_{s in M(tau,rho)} prod_p multinomial(s^p) == multinomial(rho)`.
pub fn check_vandermonde(tau: &[u32], rho: &[u32]) -> bool {
    let Ok(ms) = enumerate_m(tau, rho) else { return false };
    let total: BigInt = ms.iter().map(|s| s.iter().map(|row| multinomial(row)).product::<BigInt>()).sum();
    total == multinomial(rho)
}

/// Matrix of `g` acting on `S^k` in the normalised monomial basis, rescaled so
/// that entry `(rho, tau)` is `binom(k, rho)^{-1} [g]_{rho tau}`.
pub fn sym_power(g: &MatrixLaurent, k: u32) -> MatrixLaurent {
    let m = g.rows();
    let rank = g.rank();
    let comps = compositions(k, m);
    let nn = comps.len();
    let mut out = MatrixLaurent::zeros(rank, nn, nn);
    for (ci, tau) in comps.iter().enumerate() {
        for (ri, rho) in comps.iter().enumerate() {
            let mut acc = LaurentPoly::zero(rank);
            for s in enumerate_m(tau, rho).expect("same total") {
                // s[p][q]: from column p of g to row q
                let mut coef: BigInt = BigInt::one();
                let mut term = LaurentPoly::one(rank);
                for (p, row) in s.iter().enumerate() {
                    coef *= multinomial(row);
                    for (qq, &cnt) in row.iter().enumerate() {
                        for _ in 0..cnt {
                            term = &term * g.get(qq, p);
                        }
                    }
                }
                acc = &acc + &term.scale(&Q::from_integer(coef));
            }
            let norm = Q::new(BigInt::one(), multinomial(rho));
            out.set(ri, ci, acc.scale(&norm));
        }
    }
    out
}

/// `Psi0` lifted to the `k`-th symmetric power; equals [`psi0`] for `k = 1`.
pub fn sym_power_psi0(n: usize, k: u32) -> Result<MatrixLaurent> {
    if k == 0 {
        return Ok(MatrixLaurent::from_fn(n, 1, 1, |_, _| LaurentPoly::one(n)));
    }
    let m = sym_power(&psi0(n), k);
    Ok(m)
}

/// Dominant weight pair for `SL(n+1) x SL(n+1)` in partition coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WeightPair {
    pub left: Vec<i64>,
    pub right: Vec<i64>,
}

/// Fundamental weight `omega_i` as a partition of length `n+1` (`omega_0 = omega_{n+1} = 0`).
pub fn omega(i: usize, n: usize) -> Vec<i64> {
    let i = if i > n { 0 } else { i };
    (0..=n).map(|j| if j < i { 1 } else { 0 }).collect()
}

fn add(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

impl WeightPair {
    pub fn zero(n: usize) -> Self {
        WeightPair { left: vec![0; n + 1], right: vec![0; n + 1] }
    }

    pub fn rank(&self) -> usize {
        self.left.len() - 1
    }

    pub fn plus(&self, o: &WeightPair, times: i64) -> WeightPair {
        let scale = |v: &[i64]| v.iter().map(|x| x * times).collect::<Vec<_>>();
        WeightPair { left: add(&self.left, &scale(&o.left)), right: add(&self.right, &scale(&o.right)) }
    }

    pub fn is_dominant(&self) -> bool {
        let ok = |v: &[i64]| v.windows(2).all(|w| w[0] >= w[1]);
        ok(&self.left) && ok(&self.right)
    }

    fn normalized(v: &[i64]) -> Vec<i64> {
        let last = *v.last().unwrap();
        v.iter().map(|x| x - last).collect()
    }

    pub fn label(&self) -> String {
        format!("{:?}|{:?}", Self::normalized(&self.left), Self::normalized(&self.right))
    }
}

/// `nu_i = (omega_i, omega_{n+2-i})`, 1-based `i` in `1..=n+1`.
pub fn bottom_weight(i: usize, n: usize) -> WeightPair {
    WeightPair { left: omega(i, n), right: omega(n + 2 - i, n) }
}

/// `eta_i = (omega_i, omega_{n+1-i})`, the spherical generators, 1-based `i` in `1..=n`.
pub fn spherical_weight(i: usize, n: usize) -> WeightPair {
    WeightPair { left: omega(i, n), right: omega(n + 1 - i, n) }
}

/// Bottom set `B(k omega_1)`: compositions `sigma` of `k` paired with `sum sigma_i nu_i`.
pub fn bottom_set(n: usize, k: u32) -> Vec<(Vec<u32>, WeightPair)> {
    compositions(k, n + 1)
        .into_iter()
        .map(|s| {
            let mut w = WeightPair::zero(n);
            for (i, &c) in s.iter().enumerate() {
                w = w.plus(&bottom_weight(i + 1, n), c as i64);
            }
            (s, w)
        })
        .collect()
}

/// `lambda(sigma, d) = nu_sigma + sum_j d_j eta_j`.
pub fn lambda_weight(bottom: &WeightPair, d: &[u32]) -> WeightPair {
    let n = bottom.rank();
    let mut w = bottom.clone();
    for (j, &dj) in d.iter().enumerate() {
        w = w.plus(&spherical_weight(j + 1, n), dj as i64);
    }
    w
}

fn weyl_dim_single(l: &[i64]) -> BigInt {
    let m = l.len();
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..m {
        for j in i + 1..m {
            num *= BigInt::from(l[i] - l[j] + (j - i) as i64);
            den *= BigInt::from((j - i) as i64);
        }
    }
    num / den
}

/// Product of the two `SL(n+1)` Weyl dimensions.
pub fn weyl_dim(w: &WeightPair) -> Result<BigInt> {
    if !w.is_dominant() {
        return Err(Error::NotDominant);
    }
    Ok(weyl_dim_single(&w.left) * weyl_dim_single(&w.right))
}

/// `<lambda, lambda + 2 rho>` for the trace form on `sl(n+1)`.
pub fn casimir_single(l: &[i64]) -> Q {
    let m = l.len() as i64;
    let total: i64 = l.iter().sum();
    let mean = Q::new(total.into(), m.into());
    let mut s = Q::zero();
    for (i, &x) in l.iter().enumerate() {
        let c = Q::from_integer(x.into()) - &mean;
        s += &c * &c;
        let two_rho = m - 1 - 2 * i as i64;
        s += Q::from_integer((x * two_rho).into());
    }
    s
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

/// `gamma(left) +- gamma(right)`.
pub fn casimir_eigenvalue(w: &WeightPair, sign: Sign) -> Result<Q> {
    if !w.is_dominant() {
        return Err(Error::NotDominant);
    }
    let (a, b) = (casimir_single(&w.left), casimir_single(&w.right));
    Ok(match sign {
        Sign::Plus => a + b,
        Sign::Minus => a - b,
    })
}

/// Eigenvalues of `D_plus` / `D_minus` on `Q_d`, one per column of the bottom set.
pub fn gamma_table(n: usize, k: u32, d: &[u32], sign: Sign) -> Vec<Q> {
    bottom_set(n, k)
        .iter()
        .map(|(_, w)| casimir_eigenvalue(&lambda_weight(w, d), sign).expect("dominant"))
        .collect()
}

/// `dim(V_mu)^2 / weyl_dim(lambda(sigma, d))` for every column.
pub fn norm_table(n: usize, k: u32, d: &[u32]) -> Vec<Q> {
    let dim_mu = BigInt::from(binom(n as i64 + k as i64, k as i64));
    bottom_set(n, k)
        .iter()
        .map(|(_, w)| Q::new(&dim_mu * &dim_mu, weyl_dim(&lambda_weight(w, d)).expect("dominant")))
        .collect()
}

/// `gamma_k` in the first-order coefficients: the Casimir value of `eta_k`.
pub fn eta_casimir(n: usize) -> Vec<Q> {
    (1..=n).map(|i| casimir_eigenvalue(&spherical_weight(i, n), Sign::Plus).unwrap()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn zonal_examples() {
        let p = zonal_phi(1, 2).unwrap();
        let want = LaurentPoly::from_terms(2, [(vec![2, 0, 0], q(1, 3)), (vec![0, 2, 0], q(1, 3)), (vec![0, 0, 2], q(1, 3))]);
        assert_eq!(p, want);
        assert!((p.evaluate(&TorusPoint::identity(2)) - 1.0).norm() < 1e-15);
        assert!(zonal_phi(3, 2).is_err());
    }

    #[test]
    fn psi0_n1() {
        let p = psi0(1);
        let t = |j| LaurentPoly::var(1, j);
        assert_eq!(p.get(0, 0), &t(0));
        assert_eq!(p.get(0, 1), &t(0).conj());
        assert_eq!(p.get(1, 0), &t(1));
        assert_eq!(p.get(1, 1), &t(1).conj());
    }

    #[test]
    fn psi0_n2_middle_column() {
        // (1,2) entry is (t_2/t_3 + t_3/t_2)/2
        let p = psi0(2);
        let want = LaurentPoly::from_terms(2, [(vec![0, 1, -1], q(1, 2)), (vec![0, -1, 1], q(1, 2))]);
        assert_eq!(p.get(0, 1), &want);
    }

    #[test]
    fn det_examples() {
        let t = |j| LaurentPoly::var(1, j).dilate(2);
        assert_eq!(det_psi0(1), &t(0) - &t(1));
        assert_eq!(det_psi0(2), det_psi0_closed_form(2));
        let d = det_psi0(2);
        assert_eq!(d.swap(0, 1), -&d);
    }

    #[test]
    fn enumerate_examples() {
        assert_eq!(enumerate_m(&[2, 0, 0], &[2, 0, 0]).unwrap().len(), 1);
        assert_eq!(enumerate_m(&[1, 1], &[1, 1]).unwrap().len(), 2);
        assert!(enumerate_m(&[1, 1], &[1]).is_err());
        assert!(check_vandermonde(&[2, 1], &[1, 2]));
    }

    #[test]
    fn casimir_examples() {
        assert_eq!(casimir_single(&[1, 0, 0]), q(8, 3));
        assert_eq!(casimir_single(&[1, 0]), q(3, 2));
        let z = WeightPair::zero(2);
        assert_eq!(weyl_dim(&z).unwrap(), BigInt::one());
        assert_eq!(casimir_eigenvalue(&z, Sign::Plus).unwrap(), Q::zero());
        assert_eq!(gamma_table(2, 1, &[0, 0], Sign::Plus), vec![q(8, 3), q(16, 3), q(8, 3)]);
        assert_eq!(norm_table(2, 1, &[0, 0]), vec![q(3, 1), q(1, 1), q(3, 1)]);
        let bad = WeightPair { left: vec![0, 1, 0], right: vec![0, 0, 0] };
        assert!(weyl_dim(&bad).is_err());
    }

    #[test]
    fn bottom_examples() {
        assert_eq!(bottom_set(3, 0).len(), 1);
        let b = bottom_set(2, 1);
        assert_eq!(b[0].1, WeightPair { left: vec![1, 0, 0], right: vec![0, 0, 0] });
        assert_eq!(b[1].1, WeightPair { left: vec![1, 1, 0], right: vec![1, 1, 0] });
        assert_eq!(b[2].1, WeightPair { left: vec![0, 0, 0], right: vec![1, 0, 0] });
    }

    #[test]
    fn barycenter_maps_to_origin() {
        for n in 1..=4 {
            let a = barycenter(n);
            for v in phi_point(n, &a) {
                assert!(v.norm() < 1e-12, "n = {n}: {v}");
            }
        }
    }
}
