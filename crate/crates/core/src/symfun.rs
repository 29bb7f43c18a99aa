//! Symmetric functions in the squared torus variables `u_j = t_j^2`.
//!
//! Identities that hold without the relation `u_1 ... u_{n+1} = 1` are checked
//! in the free polynomial ring ([`FreePoly`]); torus-level objects are
//! [`LaurentPoly`] values in the `u` variables.

use crate::error::{Error, Result};
use crate::laurent::LaurentPoly;
use crate::phipoly::PhiPoly;
use crate::rational::{binom, Q};
use num_traits::{One, Zero};
use std::collections::{BTreeMap, HashMap};
use std::ops::{Add, Mul, Neg, Sub};

/// Minimal ring interface used by the Newton-Girard conversions.
pub trait Ring: Clone {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn radd(&self, o: &Self) -> Self;
    fn rsub(&self, o: &Self) -> Self;
    fn rmul(&self, o: &Self) -> Self;
    fn rscale(&self, s: &Q) -> Self;
}

impl Ring for Q {
    fn zero_like(&self) -> Self {
        Q::zero()
    }
    fn one_like(&self) -> Self {
        Q::one()
    }
    fn radd(&self, o: &Self) -> Self {
        self + o
    }
    fn rsub(&self, o: &Self) -> Self {
        self - o
    }
    fn rmul(&self, o: &Self) -> Self {
        self * o
    }
    fn rscale(&self, s: &Q) -> Self {
        self * s
    }
}

impl Ring for PhiPoly {
    fn zero_like(&self) -> Self {
        let (r, c) = self.shape();
        PhiPoly::zero(self.nvars(), r, c)
    }
    fn one_like(&self) -> Self {
        PhiPoly::scalar(self.nvars(), Q::one())
    }
    fn radd(&self, o: &Self) -> Self {
        self + o
    }
    fn rsub(&self, o: &Self) -> Self {
        self - o
    }
    fn rmul(&self, o: &Self) -> Self {
        self * o
    }
    fn rscale(&self, s: &Q) -> Self {
        self.scale(s)
    }
}

impl Ring for LaurentPoly {
    fn zero_like(&self) -> Self {
        LaurentPoly::zero(self.rank())
    }
    fn one_like(&self) -> Self {
        LaurentPoly::one(self.rank())
    }
    fn radd(&self, o: &Self) -> Self {
        self + o
    }
    fn rsub(&self, o: &Self) -> Self {
        self - o
    }
    fn rmul(&self, o: &Self) -> Self {
        self * o
    }
    fn rscale(&self, s: &Q) -> Self {
        self.scale(s)
    }
}

/// Polynomial in free commuting variables `u_1, ..., u_m` (no torus relation).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreePoly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, Q>,
}

/// Symmetric expressions are kept as free polynomials in the `u` variables.
pub type SymExpr = FreePoly;

impl FreePoly {
    pub fn zero(nvars: usize) -> Self {
        FreePoly { nvars, terms: BTreeMap::new() }
    }

    pub fn one(nvars: usize) -> Self {
        Self::monomial(nvars, vec![0; nvars], Q::one())
    }

    pub fn monomial(nvars: usize, m: Vec<u32>, c: Q) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    /// The variable `u_{j+1}`.
    pub fn var(nvars: usize, j: usize) -> Self {
        let mut m = vec![0; nvars];
        m[j] = 1;
        Self::monomial(nvars, m, Q::one())
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Q)> {
        self.terms.iter()
    }

    fn add_term(&mut self, m: &[u32], c: &Q) {
        if c.is_zero() {
            return;
        }
        let v = self.terms.get(m).map_or_else(|| c.clone(), |x| x + c);
        if v.is_zero() {
            self.terms.remove(m);
        } else {
            self.terms.insert(m.to_vec(), v);
        }
    }

    pub fn scale(&self, s: &Q) -> Self {
        let mut p = Self::zero(self.nvars);
        for (m, c) in &self.terms {
            p.add_term(m, &(c * s));
        }
        p
    }

    pub fn partial(&self, j: usize) -> Self {
        let mut p = Self::zero(self.nvars);
        for (m, c) in &self.terms {
            if m[j] > 0 {
                let mut m2 = m.clone();
                m2[j] -= 1;
                p.add_term(&m2, &(c * Q::from_integer(m[j].into())));
            }
        }
        p
    }

    pub fn swap(&self, i: usize, j: usize) -> Self {
        let mut p = Self::zero(self.nvars);
        for (m, c) in &self.terms {
            let mut m2 = m.clone();
            m2.swap(i, j);
            p.add_term(&m2, c);
        }
        p
    }

    pub fn is_symmetric(&self) -> bool {
        (1..self.nvars).all(|j| &self.swap(0, j) == self)
    }

    /// Imposes `u_1 ... u_m = 1`, giving a Laurent polynomial of rank `m - 1` in `u`.
    pub fn reduce(&self) -> LaurentPoly {
        LaurentPoly::from_terms(
            self.nvars - 1,
            self.terms.iter().map(|(m, c)| (m.iter().map(|&x| x as i32).collect(), c.clone())),
        )
    }

    /// Substitutes `u_j = t_j^2` and imposes the torus relation.
    pub fn to_torus(&self) -> LaurentPoly {
        self.reduce().dilate(2)
    }
}

impl Add for &FreePoly {
    type Output = FreePoly;
    fn add(self, o: &FreePoly) -> FreePoly {
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.add_term(m, c);
        }
        r
    }
}

impl Sub for &FreePoly {
    type Output = FreePoly;
    fn sub(self, o: &FreePoly) -> FreePoly {
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.add_term(m, &-c);
        }
        r
    }
}

impl Neg for &FreePoly {
    type Output = FreePoly;
    fn neg(self) -> FreePoly {
        self.scale(&-Q::one())
    }
}

impl Mul for &FreePoly {
    type Output = FreePoly;
    fn mul(self, o: &FreePoly) -> FreePoly {
        let mut r = FreePoly::zero(self.nvars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                let m: Vec<u32> = m1.iter().zip(m2).map(|(a, b)| a + b).collect();
                r.add_term(&m, &(c1 * c2));
            }
        }
        r
    }
}

impl Ring for FreePoly {
    fn zero_like(&self) -> Self {
        FreePoly::zero(self.nvars)
    }
    fn one_like(&self) -> Self {
        FreePoly::one(self.nvars)
    }
    fn radd(&self, o: &Self) -> Self {
        self + o
    }
    fn rsub(&self, o: &Self) -> Self {
        self - o
    }
    fn rmul(&self, o: &Self) -> Self {
        self * o
    }
    fn rscale(&self, s: &Q) -> Self {
        self.scale(s)
    }
}

fn subsets(m: usize, r: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, m: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for j in start..m {
            cur.push(j);
            rec(j + 1, m, r, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, m, r, &mut Vec::new(), &mut out);
    out
}

/// Elementary symmetric polynomial of degree `r` in `m` free variables.
pub fn elementary_free(r: usize, m: usize) -> FreePoly {
    let mut p = FreePoly::zero(m);
    if r > m {
        return p;
    }
    for s in subsets(m, r) {
        let mut e = vec![0; m];
        for j in s {
            e[j] = 1;
        }
        p.add_term(&e, &Q::one());
    }
    p
}

/// `e_r(u_1, ..., u_{n+1})`.
pub fn elementary(r: usize, n: usize) -> Result<SymExpr> {
    if r > n + 1 {
        return Err(Error::Range(format!("e_{r} with n = {n}")));
    }
    Ok(elementary_free(r, n + 1))
}

/// `p_k(u_1, ..., u_{n+1})`; `p_0 = n + 1`.
pub fn power_sum(k: usize, n: usize) -> SymExpr {
    let m = n + 1;
    let mut p = FreePoly::zero(m);
    for j in 0..m {
        let mut e = vec![0; m];
        e[j] = k as u32;
        p.add_term(&e, &Q::one());
    }
    p
}

/// Elementary symmetric functions `e_1..e_m` from power sums `p_1..p_m`.
pub fn newton_girard<T: Ring>(p: &[T]) -> Vec<T> {
    if p.is_empty() {
        return vec![];
    }
    let one = p[0].one_like();
    let mut e: Vec<T> = vec![one];
    for k in 1..=p.len() {
        let mut acc = p[0].zero_like();
        for i in 1..=k {
            let term = e[k - i].rmul(&p[i - 1]);
            acc = if i % 2 == 1 { acc.radd(&term) } else { acc.rsub(&term) };
        }
        e.push(acc.rscale(&Q::new(1.into(), (k as i64).into())));
    }
    e.remove(0);
    e
}

/// Power sums `p_1..p_count` from elementary functions `e_1..e_m` (`e_j = 0` for `j > m`).
pub fn power_sums_from_elementary<T: Ring>(e: &[T], count: usize) -> Vec<T> {
    let zero = e[0].zero_like();
    let get = |i: usize| if i <= e.len() { e[i - 1].clone() } else { zero.clone() };
    let mut p: Vec<T> = Vec::with_capacity(count);
    for k in 1..=count {
        let mut acc = zero.clone();
        for i in 1..k {
            let term = get(i).rmul(&p[k - i - 1]);
            acc = if i % 2 == 1 { acc.radd(&term) } else { acc.rsub(&term) };
        }
        let last = get(k).rscale(&Q::from_integer((k as i64).into()));
        acc = if k % 2 == 1 { acc.radd(&last) } else { acc.rsub(&last) };
        p.push(acc);
    }
    p
}

/// `e^{(i)}_p = d e_{p+1} / d u_i` in free variables (1-based `i`); zero for `p` out of range.
pub fn e_derived_free(i: usize, p: i64, m: usize) -> FreePoly {
    if p < 0 || p as usize >= m {
        return FreePoly::zero(m);
    }
    elementary_free(p as usize + 1, m).partial(i - 1)
}

/// `e^{(i)}_p` for `n + 1` variables.
pub fn e_derived(i: usize, p: usize, n: usize) -> Result<SymExpr> {
    if i == 0 || i > n + 1 || p > n {
        return Err(Error::Range(format!("e^({i})_{p} with n = {n}")));
    }
    Ok(e_derived_free(i, p as i64, n + 1))
}

fn e_or_zero(r: i64, m: usize) -> FreePoly {
    if r < 0 || r as usize > m {
        FreePoly::zero(m)
    } else {
        elementary_free(r as usize, m)
    }
}

/// Checks `sum_{r=a}^{b} (N - 2r) e_{N-r} e_r
///   = sum_i u_i (e^{(i)}_{N-b-1} e^{(i)}_b - e^{(i)}_{N-a} e^{(i)}_{a-1})` in free variables.
pub fn check_telescoping(big_n: i64, a: i64, b: i64, n: usize) -> bool {
    let m = n + 1;
    let mut lhs = FreePoly::zero(m);
    for r in a..=b {
        let t = &e_or_zero(big_n - r, m) * &e_or_zero(r, m);
        lhs = &lhs + &t.scale(&Q::from_integer((big_n - 2 * r).into()));
    }
    let mut rhs = FreePoly::zero(m);
    for i in 1..=m {
        let x = &e_derived_free(i, big_n - b - 1, m) * &e_derived_free(i, b, m);
        let y = &e_derived_free(i, big_n - a, m) * &e_derived_free(i, a - 1, m);
        rhs = &rhs + &(&FreePoly::var(m, i - 1) * &(&x - &y));
    }
    lhs == rhs
}

/// `e^{(i)}_{m-1} e_k - e^{(i)}_{k-1} e_m = e^{(i)}_{m-1} e^{(i)}_k - e^{(i)}_{k-1} e^{(i)}_m`
/// for all `1 <= m, k <= n+1` and all `i`.
pub fn check_reduce_difference(n: usize) -> bool {
    let nv = n + 1;
    for i in 1..=nv {
        for m in 1..=nv as i64 {
            for k in 1..=nv as i64 {
                let l = &(&e_derived_free(i, m - 1, nv) * &e_or_zero(k, nv))
                    - &(&e_derived_free(i, k - 1, nv) * &e_or_zero(m, nv));
                let r = &(&e_derived_free(i, m - 1, nv) * &e_derived_free(i, k, nv))
                    - &(&e_derived_free(i, k - 1, nv) * &e_derived_free(i, m, nv));
                if l != r {
                    return false;
                }
            }
        }
    }
    true
}

/// Euler identity `r e_r = sum_i u_i e^{(i)}_{r-1}` for `r = 1..n+1`.
pub fn check_euler(n: usize) -> bool {
    let m = n + 1;
    (1..=m).all(|r| {
        let mut rhs = FreePoly::zero(m);
        for i in 1..=m {
            rhs = &rhs + &(&FreePoly::var(m, i - 1) * &e_derived_free(i, r as i64 - 1, m));
        }
        elementary_free(r, m).scale(&Q::from_integer((r as i64).into())) == rhs
    })
}

/// `e_r` on the torus in the `u` variables (rank `n`).
pub fn elementary_u(r: usize, n: usize) -> LaurentPoly {
    elementary_free(r, n + 1).reduce()
}

/// Normalised partition of a canonical `u`-exponent: sorted decreasing, minimum subtracted.
fn partition_key(e: &[i32]) -> (i64, Vec<i32>) {
    let mut s = e.to_vec();
    s.sort_unstable_by(|a, b| b.cmp(a));
    let mn = *s.last().unwrap();
    let lam: Vec<i32> = s.iter().map(|x| x - mn).collect();
    (lam.iter().map(|&x| x as i64).sum(), lam)
}

/// Rewrites a symmetric Laurent polynomial in the `u` variables as a polynomial in
/// `phi_m = binom(n+1, m)^{-1} e_m(u)`.
pub fn express_u_in_phi(p: &LaurentPoly) -> Result<PhiPoly> {
    let n = p.rank();
    for j in 1..=n {
        if &p.swap(0, j) != p {
            return Err(Error::Symmetry);
        }
    }
    let es: Vec<LaurentPoly> = (1..=n).map(|r| elementary_u(r, n)).collect();
    let mut cache: HashMap<Vec<u32>, LaurentPoly> = HashMap::new();
    let mut rest = p.clone();
    let mut out = PhiPoly::zero(n, 1, 1);
    while !rest.is_zero() {
        let (_, lam) = rest.terms().map(|(e, _)| partition_key(e)).max().expect("nonempty");
        let c = rest.coeff(&lam);
        if c.is_zero() {
            return Err(Error::Symmetry);
        }
        let a: Vec<u32> = (0..n).map(|i| (lam[i] - lam[i + 1]) as u32).collect();
        let prod = cache
            .entry(a.clone())
            .or_insert_with(|| {
                let mut q = LaurentPoly::one(n);
                for (i, k) in a.iter().enumerate() {
                    for _ in 0..*k {
                        q = &q * &es[i];
                    }
                }
                q
            })
            .clone();
        rest = &rest - &prod.scale(&c);
        // e_i^{a_i} = binom(n+1,i)^{a_i} phi_i^{a_i}
        let mut w = c;
        for (i, k) in a.iter().enumerate() {
            for _ in 0..*k {
                w *= Q::from_integer(binom(n as i64 + 1, i as i64 + 1).into());
            }
        }
        out = &out + &PhiPoly::scalar_monomial(n, a, w);
    }
    Ok(out)
}

/// Rewrites a Weyl-invariant Laurent polynomial in `t` as a polynomial in the zonal variables.
pub fn express_in_phi(p: &LaurentPoly) -> Result<PhiPoly> {
    let u = p.halve()?;
    express_u_in_phi(&u)
}

/// Rewrites a symmetric free polynomial in `u` (the torus relation is imposed first).
pub fn express_sym_in_phi(p: &SymExpr) -> Result<PhiPoly> {
    if !p.is_symmetric() {
        return Err(Error::Symmetry);
    }
    express_u_in_phi(&p.reduce())
}

/// `phi_m` in the `u` variables.
pub fn phi_u(m: usize, n: usize) -> LaurentPoly {
    elementary_u(m, n).scale(&Q::new(1.into(), binom(n as i64 + 1, m as i64).into()))
}

/// Substitutes `phi_m -> binom(n+1,m)^{-1} e_m(u)` into a scalar polynomial.
pub fn phi_to_u(q: &PhiPoly) -> LaurentPoly {
    let n = q.nvars();
    let vars: Vec<LaurentPoly> = (1..=n).map(|m| phi_u(m, n)).collect();
    q.substitute(&vars).get(0, 0).clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn elementary_conventions() {
        assert_eq!(elementary(0, 2).unwrap(), FreePoly::one(3));
        assert_eq!(elementary(3, 2).unwrap().reduce(), LaurentPoly::one(2));
        assert!(elementary(4, 2).is_err());
        let e1 = express_sym_in_phi(&elementary(1, 2).unwrap()).unwrap();
        assert_eq!(e1, PhiPoly::var(2, 0).scale(&q(3, 1)));
    }

    #[test]
    fn newton_girard_textbook() {
        let ps: Vec<FreePoly> = (1..=4).map(|k| power_sum(k, 3)).collect();
        let es = newton_girard(&ps);
        assert_eq!(es[0], ps[0]);
        let e2 = (&(&ps[0] * &ps[0]) - &ps[1]).scale(&q(1, 2));
        assert_eq!(es[1], e2);
        for (r, e) in es.iter().enumerate() {
            assert_eq!(e, &elementary_free(r + 1, 4));
        }
    }

    #[test]
    fn derived_examples() {
        assert_eq!(e_derived(1, 0, 2).unwrap(), FreePoly::one(3));
        assert_eq!(e_derived(1, 1, 1).unwrap(), FreePoly::var(2, 1));
    }

    #[test]
    fn telescoping_small() {
        assert!(check_telescoping(0, 0, 0, 2));
        assert!(check_telescoping(3, 1, 2, 2));
    }

    #[test]
    fn delta_n1_in_phi() {
        // (t^2 - t^-2)^2 = 4 phi^2 - 4
        let t = LaurentPoly::var(1, 0);
        let d = &t.dilate(2) - &t.dilate(-2);
        let got = express_in_phi(&(&d * &d)).unwrap();
        let x = PhiPoly::var(1, 0);
        let want = &(&x * &x).scale(&q(4, 1)) - &PhiPoly::scalar(1, q(4, 1));
        assert_eq!(got, want);
    }

    #[test]
    fn rewriter_errors() {
        let t1sq = LaurentPoly::monomial(2, &[2, 0, 0], q(1, 1));
        assert!(matches!(express_in_phi(&t1sq), Err(Error::Symmetry)));
        let t1 = LaurentPoly::var(2, 0);
        assert!(matches!(express_in_phi(&t1), Err(Error::Parity)));
    }
}
