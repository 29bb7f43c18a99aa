//! Matrix differential operators in the zonal variables.
//!
//! `D_plus` is the image of `Omega_L + Omega_R` and `D_minus` the first-order image of
//! `Omega_L - Omega_R`. Their coefficients are derived from `Psi0` by fitting a degree-one
//! ansatz to Laurent coefficients and then checking the defining identity exactly.

use crate::error::{Error, Result};
use crate::laurent::{dual_gram, gradient_contract, simple_basis, LaurentPoly, MatrixLaurent};
use crate::linalg::QMat;
use crate::phipoly::{format_scalar, parse_matrix, parse_scalar, PhiPoly};
use crate::rational::{fmt_q, parse_q, Q};
use crate::spherical::{eta_casimir, gamma_table, psi0, zonal_phis, Sign};
use crate::symfun::express_in_phi;
use num_traits::{One, Zero};
use std::collections::{BTreeMap, HashMap};

/// `sum_alpha P_alpha(phi) d^alpha`, coefficients acting by left multiplication.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiffOperator {
    n: usize,
    size: usize,
    coeffs: BTreeMap<Vec<u32>, PhiPoly>,
}

impl DiffOperator {
    pub fn new(n: usize, size: usize) -> Self {
        DiffOperator { n, size, coeffs: BTreeMap::new() }
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn add(&mut self, alpha: &[u32], coef: &PhiPoly) {
        assert_eq!(coef.shape(), (self.size, self.size), "coefficient shape");
        let e = self.coeffs.entry(alpha.to_vec()).or_insert_with(|| PhiPoly::zero(self.n, self.size, self.size));
        *e = &*e + coef;
        if e.is_zero() {
            self.coeffs.remove(alpha);
        }
    }

    pub fn coefficient(&self, alpha: &[u32]) -> PhiPoly {
        self.coeffs.get(alpha).cloned().unwrap_or_else(|| PhiPoly::zero(self.n, self.size, self.size))
    }

    pub fn coefficients(&self) -> impl Iterator<Item = (&Vec<u32>, &PhiPoly)> {
        self.coeffs.iter()
    }

    pub fn order(&self) -> usize {
        self.coeffs.keys().map(|a| a.iter().sum::<u32>() as usize).max().unwrap_or(0)
    }

    /// The coefficient of `d^alpha` must have total degree at most `|alpha|`.
    pub fn check_degree_bound(&self) -> Result<()> {
        for (a, c) in &self.coeffs {
            let order = a.iter().sum::<u32>() as usize;
            if c.total_degree() > order {
                return Err(Error::Inconsistent(format!("coefficient of d^{a:?} has degree {}", c.total_degree())));
            }
        }
        Ok(())
    }

    /// `sum_alpha P_alpha d^alpha Q`.
    pub fn apply(&self, q: &PhiPoly) -> PhiPoly {
        assert_eq!(q.shape().0, self.size, "operator/polynomial shape mismatch");
        let mut out = PhiPoly::zero(self.n, self.size, q.shape().1);
        for (a, c) in &self.coeffs {
            let mut dq = q.clone();
            for (k, &times) in a.iter().enumerate() {
                for _ in 0..times {
                    dq = dq.partial(k);
                }
            }
            if !dq.is_zero() {
                out = &out + &(c * &dq);
            }
        }
        out
    }

    /// Matrix of the operator on the top-degree part of degree-`m` column vectors.
    ///
    /// Basis vectors are `phi^e E_i` with `e` in lex-descending order and `i` fastest.
    pub fn top_block(&self, m: u32) -> QMat {
        let mons = crate::phipoly::monomials_of_degree(self.n, m);
        let index: HashMap<&Vec<u32>, usize> = mons.iter().enumerate().map(|(i, e)| (e, i)).collect();
        let dim = mons.len() * self.size;
        let mut out = QMat::zeros(dim, dim);
        for (c, e) in mons.iter().enumerate() {
            for i in 0..self.size {
                let mut unit = QMat::zeros(self.size, 1);
                unit[(i, 0)] = Q::one();
                let img = self.apply(&PhiPoly::monomial(self.n, e.clone(), unit)).homogeneous(m as usize);
                for (e2, v) in img.terms() {
                    let r = index[e2];
                    for i2 in 0..self.size {
                        out[(r * self.size + i2, c * self.size + i)] = v[(i2, 0)].clone();
                    }
                }
            }
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let terms: Vec<serde_json::Value> =
            self.coeffs.iter().map(|(a, c)| serde_json::json!({ "alpha": a, "coef": c.to_json() })).collect();
        serde_json::json!({ "n": self.n, "size": self.size, "terms": terms })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let bad = || Error::Shape("malformed operator JSON".into());
        let n = v["n"].as_u64().ok_or_else(bad)? as usize;
        let size = v["size"].as_u64().ok_or_else(bad)? as usize;
        let mut op = DiffOperator::new(n, size);
        for t in v["terms"].as_array().ok_or_else(bad)? {
            let alpha: Vec<u32> = serde_json::from_value(t["alpha"].clone()).map_err(|_| bad())?;
            op.add(&alpha, &PhiPoly::from_json(n, &t["coef"])?);
        }
        Ok(op)
    }
}

fn unit(n: usize, k: usize, times: u32) -> Vec<u32> {
    let mut a = vec![0; n];
    a[k] += times;
    a
}

fn pair(n: usize, k: usize, l: usize) -> Vec<u32> {
    let mut a = vec![0; n];
    a[k] += 1;
    a[l] += 1;
    a
}

/// `G_{kl} = sum_i (d_{xi_i} phi_k)(d_{xi_i} phi_l)` in the zonal variables, `0 <= k <= l < n`.
pub fn second_order_symbol(n: usize) -> Result<BTreeMap<(usize, usize), PhiPoly>> {
    let phis = zonal_phis(n);
    let mut out = BTreeMap::new();
    for k in 0..n {
        for l in k..n {
            out.insert((k, l), express_in_phi(&gradient_contract(&phis[k], &phis[l]))?);
        }
    }
    Ok(out)
}

/// Solves `psi * X(phi) = rhs` for `X = A_0 + sum_j A_j phi_j` and checks it exactly.
pub fn fit_degree_one(psi: &MatrixLaurent, rhs: &MatrixLaurent) -> Result<PhiPoly> {
    let n = psi.rank();
    let size = psi.rows();
    let nb = n + 1;
    let mut basis = vec![LaurentPoly::one(n)];
    basis.extend(zonal_phis(n));
    let mut eq: HashMap<(usize, Vec<i32>), usize> = HashMap::new();
    let mut entries: Vec<(usize, usize, Q)> = Vec::new();
    let mut rhs_entries: Vec<(usize, usize, Q)> = Vec::new();
    let row_of = |key: (usize, Vec<i32>), eq: &mut HashMap<(usize, Vec<i32>), usize>| {
        let len = eq.len();
        *eq.entry(key).or_insert(len)
    };
    for i in 0..size {
        for m in 0..size {
            for (j, b) in basis.iter().enumerate() {
                let prod = psi.get(i, m) * b;
                for (e, c) in prod.terms() {
                    let r = row_of((i, e.clone()), &mut eq);
                    entries.push((r, m * nb + j, c.clone()));
                }
            }
        }
        for c in 0..size {
            for (e, v) in rhs.get(i, c).terms() {
                let r = row_of((i, e.clone()), &mut eq);
                rhs_entries.push((r, c, v.clone()));
            }
        }
    }
    let rows = eq.len();
    let mut a = QMat::zeros(rows, size * nb);
    for (r, c, v) in entries {
        a[(r, c)] = &a[(r, c)] + &v;
    }
    let mut b = QMat::zeros(rows, size);
    for (r, c, v) in rhs_entries {
        b[(r, c)] = &b[(r, c)] + &v;
    }
    if a.rank() < size * nb {
        return Err(Error::Inconsistent("degree-one ansatz is not unique".into()));
    }
    let x = a.solve(&b).ok_or_else(|| Error::Inconsistent("no degree-one solution".into()))?;
    let mut out = PhiPoly::zero(n, size, size);
    for j in 0..nb {
        let coef = QMat::from_fn(size, size, |m, c| x[(m * nb + j, c)].clone());
        let mono = if j == 0 { vec![0; n] } else { unit(n, j - 1, 1) };
        out.add_term(&mono, &coef);
    }
    let check = psi * &out.substitute(&basis[1..]);
    if &check != rhs {
        return Err(Error::Inconsistent("fitted coefficients fail the defining identity".into()));
    }
    Ok(out)
}

/// `L_k` (degree-one part) and `C_k` (constant part) for the standard representation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FirstOrderData {
    pub l: Vec<PhiPoly>,
    pub c: Vec<QMat>,
}

/// Right-hand side `2 sum_{a,b} (B^{-1})_{ab} (d_{X_a} Psi0)(d_{X_b} phi_k)`.
pub fn first_order_rhs(n: usize, k: usize) -> MatrixLaurent {
    let basis = simple_basis(n);
    let bi = dual_gram(&basis);
    let psi = psi0(n);
    let phi = &zonal_phis(n)[k];
    let dpsi: Vec<MatrixLaurent> =
        basis.iter().map(|x| psi.map(|p| p.derive_along(x).expect("traceless basis"))).collect();
    let dphi: Vec<LaurentPoly> = basis.iter().map(|x| phi.derive_along(x).expect("traceless basis")).collect();
    let mut out = MatrixLaurent::zeros(n, n + 1, n + 1);
    for a in 0..n {
        for b in 0..n {
            if bi[(a, b)].is_zero() {
                continue;
            }
            let s = dphi[b].scale(&(&bi[(a, b)] * Q::from_integer(2.into())));
            out = &out + &dpsi[a].map(|p| p * &s);
        }
    }
    out
}

pub fn derive_first_order_data(n: usize) -> Result<FirstOrderData> {
    let psi = psi0(n);
    let mut l = Vec::new();
    let mut c = Vec::new();
    for k in 0..n {
        let x = fit_degree_one(&psi, &first_order_rhs(n, k))?;
        c.push(x.coefficient(&vec![0; n]));
        l.push(x.homogeneous(1));
    }
    Ok(FirstOrderData { l, c })
}

/// Right-hand side `sum_{a,b} (B^{-1})_{ab} X_a Psi0 (d_{X_b} phi_l)`.
pub fn upsilon_rhs(n: usize, l: usize) -> MatrixLaurent {
    let basis = simple_basis(n);
    let bi = dual_gram(&basis);
    let psi = psi0(n);
    let phi = &zonal_phis(n)[l];
    let mut out = MatrixLaurent::zeros(n, n + 1, n + 1);
    for a in 0..n {
        for b in 0..n {
            if bi[(a, b)].is_zero() {
                continue;
            }
            let d = phi.derive_along(&basis[b]).expect("traceless basis").scale(&bi[(a, b)]);
            let xa = &basis[a];
            let term = MatrixLaurent::from_fn(n, n + 1, n + 1, |i, j| {
                &psi.get(i, j).scale(&Q::from_integer(xa[i].into())) * &d
            });
            out = &out + &term;
        }
    }
    out
}

pub fn derive_upsilon(n: usize) -> Result<Vec<PhiPoly>> {
    let psi = psi0(n);
    (0..n).map(|l| fit_degree_one(&psi, &upsilon_rhs(n, l))).collect()
}

/// The commuting pair `(D_plus, D_minus)` with their eigenvalue tables.
#[derive(Clone, Debug)]
pub struct OperatorPair {
    pub n: usize,
    pub k: u32,
    pub plus: DiffOperator,
    pub minus: DiffOperator,
}

impl OperatorPair {
    pub fn gamma_plus(&self, d: &[u32]) -> Vec<Q> {
        gamma_table(self.n, self.k, d, Sign::Plus)
    }

    pub fn gamma_minus(&self, d: &[u32]) -> Vec<Q> {
        gamma_table(self.n, self.k, d, Sign::Minus)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "n": self.n,
            "k": self.k,
            "D_plus": self.plus.to_json(),
            "D_minus": self.minus.to_json(),
            "Gamma_plus_0": self.gamma_plus(&vec![0; self.n]).iter().map(fmt_q).collect::<Vec<_>>(),
            "Gamma_minus_0": self.gamma_minus(&vec![0; self.n]).iter().map(fmt_q).collect::<Vec<_>>(),
        })
    }
}

/// Builds `D_plus` and `D_minus` for `k = 0` (scalar) or `k = 1`.
///
/// `D_plus = 1/2 sum G_kl d_k d_l + sum_k (1/2 (L_k + C_k) + gamma_k phi_k) d_k + Gamma_0`,
/// `D_minus = sum_l Upsilon_l d_l + (Gamma_{L,0} - Gamma_{R,0})`.
pub fn build_operators(n: usize, k: u32) -> Result<OperatorPair> {
    if k > 1 {
        return Err(Error::Unsupported("operators are available for k = 0, 1".into()));
    }
    let size = if k == 0 { 1 } else { n + 1 };
    let id = PhiPoly::identity(n, size);
    let half = Q::new(1.into(), 2.into());
    let g = second_order_symbol(n)?;
    let gam = eta_casimir(n);
    let mut plus = DiffOperator::new(n, size);
    for (&(a, b), gab) in &g {
        let c = if a == b { gab.scale(&half) } else { gab.clone() };
        plus.add(&pair(n, a, b), &id.times_scalar(&c));
    }
    for (j, gj) in gam.iter().enumerate() {
        plus.add(&unit(n, j, 1), &id.times_scalar(&PhiPoly::var(n, j)).scale(gj));
    }
    let mut minus = DiffOperator::new(n, size);
    if k == 1 {
        let fo = derive_first_order_data(n)?;
        for j in 0..n {
            let lc = &fo.l[j] + &PhiPoly::constant(n, fo.c[j].clone());
            plus.add(&unit(n, j, 1), &lc.scale(&half));
        }
        for (j, u) in derive_upsilon(n)?.iter().enumerate() {
            minus.add(&unit(n, j, 1), u);
        }
    }
    let zero = vec![0; n];
    plus.add(&zero, &PhiPoly::constant(n, QMat::diag(&gamma_table(n, k, &zero, Sign::Plus))));
    minus.add(&zero, &PhiPoly::constant(n, QMat::diag(&gamma_table(n, k, &zero, Sign::Minus))));
    plus.check_degree_bound()?;
    minus.check_degree_bound()?;
    Ok(OperatorPair { n, k, plus, minus })
}

/// An eigenvalue formula `q(d) I + diag(l_sigma(d) + c_sigma)` as printed in a table.
#[derive(Clone, Debug)]
pub struct EigenFormula {
    /// Coefficients of `d_i d_j`, `i <= j`.
    pub quad: Vec<(usize, usize, Q)>,
    /// Per column: coefficients of `d_1 .. d_n`, then the constant.
    pub lin: Vec<Vec<Q>>,
}

impl EigenFormula {
    pub fn eval(&self, d: &[u32]) -> Vec<Q> {
        let dq: Vec<Q> = d.iter().map(|&x| Q::from_integer(x.into())).collect();
        let s: Q = self.quad.iter().map(|(i, j, c)| c * &dq[*i] * &dq[*j]).sum();
        self.lin
            .iter()
            .map(|row| {
                let n = dq.len();
                let mut v = s.clone() + &row[n];
                for (a, x) in row[..n].iter().zip(&dq) {
                    v += a * x;
                }
                v
            })
            .collect()
    }
}

/// Operator data as printed for `(n, k) = (2, 1)` and `(3, 1)`.
#[derive(Clone, Debug)]
pub struct ReferenceTables {
    pub n: usize,
    pub g: BTreeMap<(usize, usize), PhiPoly>,
    pub l: Vec<PhiPoly>,
    pub c: Vec<QMat>,
    pub upsilon: Vec<PhiPoly>,
    pub gamma0: Vec<Q>,
    pub gamma_minus0: Vec<Q>,
    pub gamma_plus: EigenFormula,
    pub gamma_minus: EigenFormula,
}

fn qs(v: &[&str]) -> Vec<Q> {
    v.iter().map(|s| parse_q(s).expect("valid rational literal")).collect()
}

fn qmat(rows: &[&[&str]]) -> QMat {
    QMat::from_rows(rows.iter().map(|r| qs(r)).collect())
}

fn pm(n: usize, rows: &[&[&str]]) -> PhiPoly {
    parse_matrix(n, rows).expect("valid table")
}

fn ps(n: usize, s: &str) -> PhiPoly {
    parse_scalar(n, s).expect("valid table")
}

pub fn reference_tables(n: usize) -> Option<ReferenceTables> {
    match n {
        2 => Some(ReferenceTables {
            n,
            g: BTreeMap::from([
                ((0, 0), ps(2, "8/3*p1^2 - 8/3*p2")),
                ((0, 1), ps(2, "4/3*p1*p2 - 4/3")),
                ((1, 1), ps(2, "8/3*p2^2 - 8/3*p1")),
            ]),
            l: vec![
                pm(2, &[&["8/3*p1", "-2*p2", "0"], &["0", "4*p1", "0"], &["0", "0", "4/3*p1"]]),
                pm(2, &[&["4/3*p2", "0", "0"], &["0", "4*p2", "0"], &["0", "-2*p1", "8/3*p2"]]),
            ],
            c: vec![
                qmat(&[&["0", "0", "-4/3"], &["-8/3", "0", "0"], &["0", "-2", "0"]]),
                qmat(&[&["0", "-2", "0"], &["0", "0", "-8/3"], &["-4/3", "0", "0"]]),
            ],
            upsilon: vec![
                pm(2, &[&["4/3*p1", "p2", "2/3"], &["-4/3", "-2/3*p1", "0"], &["0", "-1/3", "-2/3*p1"]]),
                pm(2, &[&["2/3*p2", "1/3", "0"], &["0", "2/3*p2", "4/3"], &["-2/3", "-p1", "-4/3*p2"]]),
            ],
            gamma0: qs(&["8/3", "16/3", "8/3"]),
            gamma_minus0: qs(&["8/3", "0", "-8/3"]),
            gamma_plus: EigenFormula {
                quad: vec![(0, 0, Q::new(4.into(), 3.into())), (0, 1, Q::new(4.into(), 3.into())), (1, 1, Q::new(4.into(), 3.into()))],
                lin: vec![qs(&["16/3", "14/3", "8/3"]), qs(&["6", "6", "16/3"]), qs(&["14/3", "16/3", "8/3"])],
            },
            gamma_minus: EigenFormula {
                quad: vec![],
                lin: vec![qs(&["-4/3", "2/3", "8/3"]), qs(&["-2/3", "2/3", "0"]), qs(&["-2/3", "-4/3", "-8/3"])],
            },
        }),
        3 => Some(ReferenceTables {
            n,
            g: BTreeMap::from([
                ((0, 0), ps(3, "3*p1^2 - 3*p2")),
                ((0, 1), ps(3, "2*p1*p2 - 2*p3")),
                ((0, 2), ps(3, "p1*p3 - 1")),
                ((1, 1), ps(3, "4/9*p2^2 - 32/9*p1*p3 - 4/9")),
                ((1, 2), ps(3, "2*p2*p3 - 2*p1")),
                ((2, 2), ps(3, "3*p3^2 - 3*p2")),
            ]),
            l: vec![
                pm(3, &[&["3*p1", "-2*p2", "-4/3*p3", "0"], &["0", "5*p1", "0", "0"], &["0", "0", "3*p1", "0"], &["0", "0", "0", "p1"]]),
                pm(
                    3,
                    &[&["2*p2", "-8/3*p3", "0", "0"], &["0", "4*p2", "-8/3*p3", "0"], &["0", "-8/3*p1", "4*p2", "0"], &["0", "0", "-8/3*p1", "4/3*p2"]],
                ),
                pm(3, &[&["p3", "0", "0", "0"], &["0", "3*p3", "0", "0"], &["0", "0", "5*p3", "0"], &["0", "-4/3*p1", "-2*p2", "3*p3"]]),
            ],
            c: vec![
                qmat(&[&["0", "0", "0", "-1"], &["-3", "0", "0", "0"], &["0", "-3", "0", "0"], &["0", "0", "-5/3", "0"]]),
                qmat(&[&["0", "0", "-2/3", "0"], &["0", "0", "0", "-2"], &["-2", "0", "0", "0"], &["0", "-2/3", "0", "0"]]),
                qmat(&[&["0", "5/3", "0", "0"], &["0", "0", "-3", "0"], &["0", "0", "0", "-3"], &["-1", "0", "0", "0"]]),
            ],
            upsilon: vec![
                pm(
                    3,
                    &[&["3/4*p1", "p2", "2/3*p3", "1/2"], &["-3/2", "-1/4*p1", "0", "0"], &["0", "-1/2", "-1/4*p1", "0"], &["0", "0", "-1/6", "-1/4*p1"]],
                ),
                pm(
                    3,
                    &[&["p2", "4/9*p3", "1/9", "0"], &["0", "p2", "4/3*p3", "1"], &["-1", "-4/3*p1", "-p2", "0"], &["0", "-1/9", "-4/9*p1", "-p2"]],
                ),
                pm(
                    3,
                    &[&["1/4*p3", "1/6*p3", "0", "0"], &["0", "1/4*p3", "1/2", "0"], &["0", "p1", "1/4*p3", "3/2"], &["-1/2", "-4/6*p1", "-p2", "-3/4*p3"]],
                ),
            ],
            gamma0: qs(&["15/4", "35/4", "35/4", "15/4"]),
            gamma_minus0: qs(&["15/4", "5/4", "-5/4", "-15/4"]),
            gamma_plus: EigenFormula {
                quad: vec![
                    (0, 0, Q::new(3.into(), 2.into())),
                    (1, 1, Q::from_integer(2.into())),
                    (2, 2, Q::new(3.into(), 2.into())),
                    (0, 1, Q::from_integer(2.into())),
                    (0, 2, Q::one()),
                    (1, 2, Q::from_integer(2.into())),
                ],
                lin: vec![
                    qs(&["15/2", "9", "13/2", "15/4"]),
                    qs(&["17/2", "11", "15/2", "35/4"]),
                    qs(&["15/2", "11", "17/2", "35/4"]),
                    qs(&["13/2", "9", "15/2", "15/4"]),
                ],
            },
            gamma_minus: EigenFormula {
                quad: vec![],
                lin: vec![
                    qs(&["3/2", "1", "1/2", "15/4"]),
                    qs(&["-1/2", "1", "1/2", "5/4"]),
                    qs(&["-1/2", "-1", "1/2", "-5/4"]),
                    qs(&["-1/2", "-1", "-3/2", "-15/4"]),
                ],
            },
        }),
        _ => None,
    }
}

/// One disagreement between a printed table and the derived value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableMismatch {
    pub table: String,
    pub entry: String,
    pub printed: String,
    pub derived: String,
}

/// Result of comparing derived operator data with the printed tables.
#[derive(Clone, Debug)]
pub struct TableComparison {
    pub n: usize,
    pub checked: usize,
    pub mismatches: Vec<TableMismatch>,
}

fn compare_matrix(name: &str, printed: &PhiPoly, derived: &PhiPoly, out: &mut TableComparison) {
    let (r, c) = printed.shape();
    for i in 0..r {
        for j in 0..c {
            out.checked += 1;
            let (a, b) = (printed.entry(i, j), derived.entry(i, j));
            if a != b {
                out.mismatches.push(TableMismatch {
                    table: name.into(),
                    entry: format!("({},{})", i + 1, j + 1),
                    printed: format_scalar(&a),
                    derived: format_scalar(&b),
                });
            }
        }
    }
}

fn compare_values(name: &str, printed: &[Q], derived: &[Q], entry: &dyn Fn(usize) -> String, out: &mut TableComparison) {
    for (s, (a, b)) in printed.iter().zip(derived).enumerate() {
        out.checked += 1;
        if a != b {
            out.mismatches.push(TableMismatch { table: name.into(), entry: entry(s), printed: fmt_q(a), derived: fmt_q(b) });
        }
    }
}

/// Compares every printed operator table for `n in {2, 3}` with the derived data.
pub fn compare_with_reference(n: usize, max_degree: u32) -> Result<TableComparison> {
    let refs = reference_tables(n).ok_or_else(|| Error::Unsupported(format!("no printed tables for n = {n}")))?;
    let mut out = TableComparison { n, checked: 0, mismatches: Vec::new() };
    let g = second_order_symbol(n)?;
    for (key, printed) in &refs.g {
        compare_matrix(&format!("G{}{}", key.0 + 1, key.1 + 1), printed, &g[key], &mut out);
    }
    let fo = derive_first_order_data(n)?;
    for k in 0..n {
        compare_matrix(&format!("L{}", k + 1), &refs.l[k], &fo.l[k], &mut out);
        compare_matrix(&format!("C{}", k + 1), &PhiPoly::constant(n, refs.c[k].clone()), &PhiPoly::constant(n, fo.c[k].clone()), &mut out);
    }
    for (l, u) in derive_upsilon(n)?.iter().enumerate() {
        compare_matrix(&format!("Upsilon{}", l + 1), &refs.upsilon[l], u, &mut out);
    }
    let zero = vec![0; n];
    let diag_entry = |s: usize| format!("({},{})", s + 1, s + 1);
    compare_values("Gamma0", &refs.gamma0, &gamma_table(n, 1, &zero, Sign::Plus), &diag_entry, &mut out);
    compare_values("GammaL0-GammaR0", &refs.gamma_minus0, &gamma_table(n, 1, &zero, Sign::Minus), &diag_entry, &mut out);
    for m in 0..=max_degree {
        for d in crate::phipoly::monomials_of_degree(n, m) {
            let entry = |s: usize| format!("d={d:?} row {}", s + 1);
            compare_values("Gamma+", &refs.gamma_plus.eval(&d), &gamma_table(n, 1, &d, Sign::Plus), &entry, &mut out);
            compare_values("Gamma-", &refs.gamma_minus.eval(&d), &gamma_table(n, 1, &d, Sign::Minus), &entry, &mut out);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn symbol_n2() {
        let g = second_order_symbol(2).unwrap();
        assert_eq!(g[&(0, 0)], ps(2, "8/3*p1^2 - 8/3*p2"));
        assert_eq!(g[&(0, 1)], ps(2, "4/3*p1*p2 - 4/3"));
    }

    #[test]
    fn first_order_n2() {
        let fo = derive_first_order_data(2).unwrap();
        let r = reference_tables(2).unwrap();
        assert_eq!(fo.l, r.l);
        assert_eq!(fo.c, r.c);
    }

    #[test]
    fn upsilon_n2() {
        let u = derive_upsilon(2).unwrap();
        assert_eq!(u[0], reference_tables(2).unwrap().upsilon[0]);
    }

    #[test]
    fn apply_on_identity() {
        let ops = build_operators(2, 1).unwrap();
        let id = PhiPoly::identity(2, 3);
        assert_eq!(ops.plus.apply(&id), PhiPoly::constant(2, QMat::diag(&[q(8, 3), q(16, 3), q(8, 3)])));
        assert_eq!(ops.minus.apply(&id), PhiPoly::constant(2, QMat::diag(&[q(8, 3), q(0, 1), q(-8, 3)])));
        assert!(ops.plus.apply(&PhiPoly::zero(2, 3, 3)).is_zero());
        assert_eq!(ops.plus.order(), 2);
        assert_eq!(ops.minus.order(), 1);
    }

    #[test]
    fn json_roundtrip() {
        let ops = build_operators(2, 1).unwrap();
        assert_eq!(DiffOperator::from_json(&ops.minus.to_json()).unwrap(), ops.minus);
    }

    #[test]
    fn unsupported_k() {
        assert!(build_operators(2, 2).is_err());
    }
}
