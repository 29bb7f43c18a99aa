//! Matrix-valued orthogonal polynomials `Q_d` and their recurrences.
//!
//! Degrees are processed in graded order. Within degree `m` the orthogonal complement of
//! the lower degrees is identified with its top-degree part, on which `D_plus` and
//! `D_minus` act by the matrices of [`DiffOperator::top_block`]. Joint eigenvectors for the
//! tabulated eigenvalue pairs are found as exact kernels, lifted to the complement by
//! subtracting projections, and normalised by their column sums at `phi = (1, ..., 1)`.

use crate::diffops::{build_operators, DiffOperator, OperatorPair};
use crate::error::{Error, Result};
use crate::linalg::QMat;
use crate::phipoly::{monomials_of_degree, PhiPoly};
use crate::quadrature::{inner_product_exact, inner_product_grid, Moments};
use crate::rational::{fmt_q, to_f64, Q};
use crate::spherical::{bottom_set, composition_label, gamma_table, norm_table, Sign};
use crate::weight::weight_polynomial;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;

/// How the free scalar of a column was fixed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormRule {
    /// Column sum at `phi = (1, ..., 1)` equals one.
    ColumnSum,
    /// Column sum vanished; first non-zero top coefficient set to one.
    LeadingCoefficient,
}

#[derive(Clone, Debug)]
pub struct FamilyMember {
    /// Multi-degree `d` (labeled) or the leading monomial (unlabeled).
    pub d: Vec<u32>,
    pub q: PhiPoly,
    /// Diagonal of `<Q_d, Q_d>`.
    pub h: Vec<Q>,
    pub gamma_plus: Option<Vec<Q>>,
    pub gamma_minus: Option<Vec<Q>>,
    pub rules: Vec<NormRule>,
}

impl FamilyMember {
    pub fn degree(&self) -> u32 {
        self.d.iter().sum()
    }
}

#[derive(Clone, Debug)]
pub struct QFamily {
    pub n: usize,
    pub k: u32,
    pub max_degree: u32,
    pub labeled: bool,
    pub w: PhiPoly,
    pub members: Vec<FamilyMember>,
}

impl QFamily {
    pub fn size(&self) -> usize {
        self.w.shape().0
    }

    pub fn get(&self, d: &[u32]) -> Option<&FamilyMember> {
        self.members.iter().find(|m| m.d == d)
    }

    /// Column labels: the compositions of the bottom set.
    pub fn column_labels(&self) -> Vec<String> {
        bottom_set(self.n, self.k).iter().map(|(s, _)| composition_label(s)).collect()
    }

    /// Expected `H_d` from the Weyl dimension formula (labeled families only).
    pub fn expected_norms(&self, d: &[u32]) -> Vec<Q> {
        norm_table(self.n, self.k, d)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let members: Vec<serde_json::Value> = self
            .members
            .iter()
            .map(|m| {
                let fmt = |v: &Option<Vec<Q>>| v.as_ref().map(|v| v.iter().map(fmt_q).collect::<Vec<_>>());
                serde_json::json!({
                    "d": m.d,
                    "Q": m.q.to_json(),
                    "H": m.h.iter().map(fmt_q).collect::<Vec<_>>(),
                    "Gamma_plus": fmt(&m.gamma_plus),
                    "Gamma_minus": fmt(&m.gamma_minus),
                    "normalization": m.rules.iter().map(|r| format!("{r:?}")).collect::<Vec<_>>(),
                })
            })
            .collect();
        serde_json::json!({
            "n": self.n,
            "k": self.k,
            "max_degree": self.max_degree,
            "labeled": self.labeled,
            "columns": self.column_labels(),
            "members": members,
        })
    }

    /// One row per column of every member: `d, column, label, Gamma_plus, Gamma_minus, H, H_expected`.
    pub fn table_rows(&self) -> Vec<Vec<String>> {
        let labels = self.column_labels();
        let mut rows = Vec::new();
        for m in &self.members {
            let expected = if self.labeled { Some(self.expected_norms(&m.d)) } else { None };
            for s in 0..m.h.len() {
                let opt = |v: &Option<Vec<Q>>| v.as_ref().map_or(String::new(), |v| fmt_q(&v[s]));
                rows.push(vec![
                    m.d.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("."),
                    (s + 1).to_string(),
                    if self.labeled { labels[s].clone() } else { String::new() },
                    opt(&m.gamma_plus),
                    opt(&m.gamma_minus),
                    fmt_q(&m.h[s]),
                    expected.as_ref().map_or(String::new(), |e| fmt_q(&e[s])),
                ]);
            }
        }
        rows
    }
}

/// Orthogonal columns of lower degree with their squared norms.
struct Basis {
    cols: Vec<PhiPoly>,
    norms: Vec<Q>,
}

impl Basis {
    fn project_out(&self, v: &PhiPoly, w: &PhiPoly, mom: &mut Moments) -> PhiPoly {
        let mut out = v.clone();
        for (c, h) in self.cols.iter().zip(&self.norms) {
            let ip = inner_product_exact(c, v, w, mom)[(0, 0)].clone();
            if !ip.is_zero() {
                out = &out - &c.scale(&(ip / h));
            }
        }
        out
    }
}

fn column_from_top(n: usize, size: usize, mons: &[Vec<u32>], v: &[Q]) -> PhiPoly {
    let mut p = PhiPoly::zero(n, size, 1);
    for (r, e) in mons.iter().enumerate() {
        let c = QMat::from_fn(size, 1, |i, _| v[r * size + i].clone());
        if !c.is_zero() {
            p.add_term(e, &c);
        }
    }
    p
}

fn normalize(col: PhiPoly, n: usize, top: &[Q]) -> (PhiPoly, NormRule) {
    let at1 = col.evaluate_q(&vec![Q::one(); n]);
    let s: Q = (0..at1.rows()).map(|i| at1[(i, 0)].clone()).sum();
    if !s.is_zero() {
        return (col.scale(&(Q::one() / s)), NormRule::ColumnSum);
    }
    let lead = top.iter().find(|x| !x.is_zero()).cloned().unwrap_or_else(Q::one);
    (col.scale(&(Q::one() / lead)), NormRule::LeadingCoefficient)
}

/// Labeled family via joint eigenvectors of `(D_plus, D_minus)`.
pub fn generate_labeled(n: usize, k: u32, max_degree: u32) -> Result<QFamily> {
    let ops = build_operators(n, k)?;
    generate_with_operators(&ops, max_degree)
}

pub fn generate_with_operators(ops: &OperatorPair, max_degree: u32) -> Result<QFamily> {
    let (n, k) = (ops.n, ops.k);
    let w = weight_polynomial(n, k)?;
    let size = w.shape().0;
    let mut mom = Moments::new(n);
    let mut basis = Basis { cols: Vec::new(), norms: Vec::new() };
    let mut members = Vec::new();
    for m in 0..=max_degree {
        let mons = monomials_of_degree(n, m);
        let mp = ops.plus.top_block(m);
        let mm = ops.minus.top_block(m);
        let dim = mp.rows();
        let labels: Vec<(Vec<u32>, usize, Q, Q)> = mons
            .iter()
            .flat_map(|d| {
                let gp = gamma_table(n, k, d, Sign::Plus);
                let gm = gamma_table(n, k, d, Sign::Minus);
                (0..size).map(move |s| (d.clone(), s, gp[s].clone(), gm[s].clone())).collect::<Vec<_>>()
            })
            .collect();
        for (d, s, gp, gm) in &labels {
            let clash: Vec<String> = labels
                .iter()
                .filter(|(d2, s2, gp2, gm2)| (d2, s2) != (d, s) && gp2 == gp && gm2 == gm)
                .map(|(d2, s2, _, _)| format!("d={d2:?} column {}", s2 + 1))
                .collect();
            if !clash.is_empty() {
                return Err(Error::LabelAmbiguity(format!("d={d:?} column {} collides with {}", s + 1, clash.join(", "))));
            }
        }
        let mut new_cols: BTreeMap<Vec<u32>, Vec<(usize, PhiPoly, NormRule)>> = BTreeMap::new();
        for (d, s, gp, gm) in &labels {
            let shifted = |a: &QMat, g: &Q| a - &QMat::identity(dim).scale(g);
            let kernel = QMat::vstack(&[shifted(&mp, gp), shifted(&mm, gm)]).nullspace();
            if kernel.cols() != 1 {
                return Err(Error::LabelAmbiguity(format!(
                    "joint eigenspace for d={d:?} column {} has dimension {}",
                    s + 1,
                    kernel.cols()
                )));
            }
            let top = kernel.column(0);
            let col = basis.project_out(&column_from_top(n, size, &mons, &top), &w, &mut mom);
            let (col, rule) = normalize(col, n, &top);
            new_cols.entry(d.clone()).or_default().push((*s, col, rule));
        }
        for d in &mons {
            let mut cols = new_cols.remove(d).expect("every label produced a column");
            cols.sort_by_key(|c| c.0);
            let q = PhiPoly::hstack(&cols.iter().map(|c| c.1.clone()).collect::<Vec<_>>());
            let h = inner_product_exact(&q, &q, &w, &mut mom);
            let diag = h.diagonal();
            for (c, hc) in cols.iter().zip(&diag) {
                basis.cols.push(c.1.clone());
                basis.norms.push(hc.clone());
            }
            members.push(FamilyMember {
                d: d.clone(),
                q,
                h: diag,
                gamma_plus: Some(ops.gamma_plus(d)),
                gamma_minus: Some(ops.gamma_minus(d)),
                rules: cols.iter().map(|c| c.2).collect(),
            });
        }
    }
    Ok(QFamily { n, k, max_degree, labeled: true, w, members })
}

/// Unlabeled orthogonal family by exact Gram-Schmidt on `phi^e E_i` in graded order.
pub fn generate_unlabeled(n: usize, k: u32, max_degree: u32) -> Result<QFamily> {
    let w = weight_polynomial(n, k)?;
    let size = w.shape().0;
    let mut mom = Moments::new(n);
    let mut basis = Basis { cols: Vec::new(), norms: Vec::new() };
    let mut members = Vec::new();
    for m in 0..=max_degree {
        for e in monomials_of_degree(n, m) {
            let mut cols = Vec::new();
            let mut h = Vec::new();
            for i in 0..size {
                let mut unit = QMat::zeros(size, 1);
                unit[(i, 0)] = Q::one();
                let col = basis.project_out(&PhiPoly::monomial(n, e.clone(), unit), &w, &mut mom);
                let hc = inner_product_exact(&col, &col, &w, &mut mom)[(0, 0)].clone();
                if !hc.is_positive() {
                    return Err(Error::Internal(format!("non-positive norm at e={e:?}, column {}", i + 1)));
                }
                basis.cols.push(col.clone());
                basis.norms.push(hc.clone());
                cols.push(col);
                h.push(hc);
            }
            members.push(FamilyMember {
                d: e,
                q: PhiPoly::hstack(&cols),
                h,
                gamma_plus: None,
                gamma_minus: None,
                rules: vec![NormRule::LeadingCoefficient; size],
            });
        }
    }
    Ok(QFamily { n, k, max_degree, labeled: false, w, members })
}

/// Labeled when the operators separate the columns (`k = 1`, or `k = 0` with `n = 1`).
pub fn generate(n: usize, k: u32, max_degree: u32) -> Result<QFamily> {
    if !(1..=3).contains(&n) {
        return Err(Error::Range(format!("generate supports 1 <= n <= 3, got {n}")));
    }
    if k == 1 || (k == 0 && n == 1) {
        generate_labeled(n, k, max_degree)
    } else {
        generate_unlabeled(n, k, max_degree)
    }
}

/// Exact Gram matrix of all columns of the family, in member order.
pub fn gram_exact(f: &QFamily) -> QMat {
    let all = PhiPoly::hstack(&f.members.iter().map(|m| m.q.clone()).collect::<Vec<_>>());
    let mut mom = Moments::new(f.n);
    inner_product_exact(&all, &all, &f.w, &mut mom)
}

/// Floating Gram matrix on the torus grid.
pub fn gram_grid(f: &QFamily, cap: usize) -> Result<nalgebra::DMatrix<num_complex::Complex64>> {
    let all = PhiPoly::hstack(&f.members.iter().map(|m| m.q.clone()).collect::<Vec<_>>());
    inner_product_grid(&all, &all, &f.w, cap)
}

/// Orthogonality and norm-law errors of a floating Gram matrix against the family data.
#[derive(Clone, Debug)]
pub struct GramReport {
    pub max_off_diagonal: f64,
    pub max_relative_diagonal: f64,
}

pub fn gram_report(f: &QFamily, g: &nalgebra::DMatrix<num_complex::Complex64>, expected: &[Q]) -> GramReport {
    let mut off: f64 = 0.0;
    let mut rel: f64 = 0.0;
    for i in 0..g.nrows() {
        for j in 0..g.ncols() {
            if i != j {
                off = off.max(g[(i, j)].norm());
            }
        }
        let e = to_f64(&expected[i]);
        rel = rel.max((g[(i, i)].re - e).abs() / e.abs());
    }
    let _ = f;
    GramReport { max_off_diagonal: off, max_relative_diagonal: rel }
}

/// All expected norms of a labeled family, concatenated in member order.
pub fn expected_norms(f: &QFamily) -> Vec<Q> {
    f.members.iter().flat_map(|m| f.expected_norms(&m.d)).collect()
}

/// `phi_j Q_d = sum_{d'} Q_{d'} X_{d'}`, split by the degree of `d'`.
#[derive(Clone, Debug)]
pub struct Recurrence {
    pub j: usize,
    pub d: Vec<u32>,
    /// `A^d_{d',j}` for `|d'| = |d| + 1`.
    pub a: Vec<(Vec<u32>, QMat)>,
    /// `B^d_{d',j}` for `|d'| = |d|`.
    pub b: Vec<(Vec<u32>, QMat)>,
    /// `C^d_{d',j}` for `|d'| = |d| - 1`.
    pub c: Vec<(Vec<u32>, QMat)>,
    /// Largest coefficient of `phi_j Q_d - sum Q_{d'} X_{d'}`.
    pub residual: f64,
}

/// Recurrence coefficients of `phi_j Q_d` for every member with `|d| < max_degree`.
pub fn extract_recurrence(f: &QFamily, j: usize) -> Result<Vec<Recurrence>> {
    if j >= f.n {
        return Err(Error::Range(format!("variable index {j} out of range")));
    }
    let mut mom = Moments::new(f.n);
    let mut out = Vec::new();
    for m in f.members.iter().filter(|m| m.degree() < f.max_degree) {
        let target = m.q.times_scalar(&PhiPoly::var(f.n, j));
        let mut rec = Recurrence { j, d: m.d.clone(), a: vec![], b: vec![], c: vec![], residual: 0.0 };
        let mut rest = target.clone();
        for other in &f.members {
            let deg = other.degree() as i64 - m.degree() as i64;
            if deg.abs() > 1 {
                continue;
            }
            let ip = inner_product_exact(&other.q, &target, &f.w, &mut mom);
            let hinv = QMat::diag(&other.h.iter().map(|x| Q::one() / x).collect::<Vec<_>>());
            let x = &hinv * &ip;
            if x.is_zero() {
                continue;
            }
            rest = &rest - &other.q.right_mul(&x);
            match deg {
                1 => rec.a.push((other.d.clone(), x)),
                0 => rec.b.push((other.d.clone(), x)),
                _ => rec.c.push((other.d.clone(), x)),
            }
        }
        rec.residual = rest.terms().flat_map(|(_, c)| c.entries().iter().map(|x| to_f64(x).abs())).fold(0.0, f64::max);
        if rec.residual > 1e-9 {
            return Err(Error::Residual(rec.residual));
        }
        out.push(rec);
    }
    Ok(out)
}

/// The stacked matrix `(A^0_{delta_i, j})_{i,j}` of the degree-zero recurrences.
pub fn stacked_a0(f: &QFamily) -> Result<QMat> {
    let n = f.n;
    let size = f.size();
    let mut blocks = vec![vec![QMat::zeros(size, size); n]; n];
    for (j, row) in (0..n).map(|j| (j, extract_recurrence(f, j))) {
        let recs = row?;
        let r0 = recs.iter().find(|r| r.d.iter().all(|&x| x == 0)).ok_or_else(|| Error::Internal("missing d = 0".into()))?;
        for (d, a) in &r0.a {
            let i = d.iter().position(|&x| x == 1).expect("unit multi-degree");
            blocks[i][j] = a.clone();
        }
    }
    let rows: Vec<QMat> = blocks.into_iter().map(|r| QMat::hstack(&r)).collect();
    Ok(QMat::vstack(&rows))
}

/// Checks `D Q_d = Q_d Gamma_d` exactly and returns the largest coefficient error.
pub fn eigen_residual(op: &DiffOperator, member: &FamilyMember, gamma: &[Q]) -> f64 {
    let lhs = op.apply(&member.q);
    let rhs = member.q.right_mul(&QMat::diag(gamma));
    let diff = &lhs - &rhs;
    diff.terms().flat_map(|(_, c)| c.entries().iter().map(|x| to_f64(x).abs())).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn q0_is_identity() {
        let f = generate(2, 1, 0).unwrap();
        assert_eq!(f.members[0].q, PhiPoly::identity(2, 3));
        assert_eq!(f.members[0].h, vec![q(3, 1), q(1, 1), q(3, 1)]);
    }

    #[test]
    fn gamma_plus_d10() {
        let f = generate(2, 1, 1).unwrap();
        let m = f.get(&[1, 0]).unwrap();
        assert_eq!(m.gamma_plus.as_ref().unwrap(), &vec![q(28, 3), q(38, 3), q(26, 3)]);
    }

    #[test]
    fn scalar_n1_is_chebyshev_like() {
        let f = generate(1, 0, 3).unwrap();
        // weight (1 - x^2)^{1/2}: Chebyshev U_m(x)/(m+1) with value one at x = 1
        let x = PhiPoly::var(1, 0);
        assert_eq!(f.members[1].q, x);
        let u2 = &(&x * &x).scale(&q(4, 3)) - &PhiPoly::scalar(1, q(1, 3));
        assert_eq!(f.members[2].q, u2);
    }

    #[test]
    fn collision_reported() {
        assert!(matches!(generate_labeled(2, 0, 1), Err(Error::LabelAmbiguity(_))));
    }
}
