//! Matrix-valued polynomials in the zonal variables `phi_1, ..., phi_n`.

use crate::error::{Error, Result};
use crate::laurent::{LaurentPoly, MatrixLaurent};
use crate::linalg::QMat;
use crate::rational::{fmt_q, parse_q, Q};
use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::{One, Zero};
use std::collections::{BTreeMap, HashMap};
use std::ops::{Add, Mul, Neg, Sub};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhiPoly {
    nvars: usize,
    rows: usize,
    cols: usize,
    terms: BTreeMap<Vec<u32>, QMat>,
}

impl PhiPoly {
    pub fn zero(nvars: usize, rows: usize, cols: usize) -> Self {
        PhiPoly { nvars, rows, cols, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, m: QMat) -> Self {
        Self::monomial(nvars, vec![0; nvars], m)
    }

    pub fn identity(nvars: usize, size: usize) -> Self {
        Self::constant(nvars, QMat::identity(size))
    }

    pub fn scalar(nvars: usize, c: Q) -> Self {
        Self::constant(nvars, QMat::from_rows(vec![vec![c]]))
    }

    /// The 1x1 polynomial `phi_{i+1}` (0-based `i`).
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut m = vec![0; nvars];
        m[i] = 1;
        Self::monomial(nvars, m, QMat::identity(1))
    }

    pub fn monomial(nvars: usize, m: Vec<u32>, c: QMat) -> Self {
        assert_eq!(m.len(), nvars);
        let mut p = Self::zero(nvars, c.rows(), c.cols());
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn scalar_monomial(nvars: usize, m: Vec<u32>, c: Q) -> Self {
        Self::monomial(nvars, m, QMat::from_rows(vec![vec![c]]))
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &QMat)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &[u32]) -> QMat {
        self.terms.get(m).cloned().unwrap_or_else(|| QMat::zeros(self.rows, self.cols))
    }

    /// Scalar coefficient of a 1x1 polynomial.
    pub fn scalar_coeff(&self, m: &[u32]) -> Q {
        assert_eq!(self.shape(), (1, 1));
        self.coefficient(m)[(0, 0)].clone()
    }

    pub fn total_degree(&self) -> usize {
        self.terms.keys().map(|m| m.iter().sum::<u32>() as usize).max().unwrap_or(0)
    }

    pub fn add_term(&mut self, m: &[u32], c: &QMat) {
        if c.is_zero() {
            return;
        }
        assert_eq!(c.shape(), (self.rows, self.cols), "coefficient shape");
        let v = match self.terms.get(m) {
            Some(old) => old + c,
            None => c.clone(),
        };
        if v.is_zero() {
            self.terms.remove(m);
        } else {
            self.terms.insert(m.to_vec(), v);
        }
    }

    pub fn scale(&self, s: &Q) -> Self {
        let mut p = Self::zero(self.nvars, self.rows, self.cols);
        if s.is_zero() {
            return p;
        }
        for (m, c) in &self.terms {
            p.terms.insert(m.clone(), c.scale(s));
        }
        p
    }

    pub fn left_mul(&self, a: &QMat) -> Self {
        let mut p = Self::zero(self.nvars, a.rows(), self.cols);
        for (m, c) in &self.terms {
            p.add_term(m, &(a * c));
        }
        p
    }

    pub fn right_mul(&self, a: &QMat) -> Self {
        let mut p = Self::zero(self.nvars, self.rows, a.cols());
        for (m, c) in &self.terms {
            p.add_term(m, &(c * a));
        }
        p
    }

    /// Product with a scalar (1x1) polynomial.
    pub fn times_scalar(&self, s: &PhiPoly) -> Self {
        assert_eq!(s.shape(), (1, 1));
        let mut p = Self::zero(self.nvars, self.rows, self.cols);
        for (m1, c1) in &s.terms {
            let x = &c1[(0, 0)];
            for (m2, c2) in &self.terms {
                let m: Vec<u32> = m1.iter().zip(m2).map(|(a, b)| a + b).collect();
                p.add_term(&m, &c2.scale(x));
            }
        }
        p
    }

    /// Partial derivative in `phi_{k+1}`.
    pub fn partial(&self, k: usize) -> Self {
        let mut p = Self::zero(self.nvars, self.rows, self.cols);
        for (m, c) in &self.terms {
            if m[k] == 0 {
                continue;
            }
            let mut m2 = m.clone();
            m2[k] -= 1;
            p.add_term(&m2, &c.scale(&Q::from_integer(m[k].into())));
        }
        p
    }

    /// Conjugation on the torus image: `phi_i -> phi_{n+1-i}` (coefficients are rational).
    pub fn bar(&self) -> Self {
        let mut p = Self::zero(self.nvars, self.rows, self.cols);
        for (m, c) in &self.terms {
            let r: Vec<u32> = m.iter().rev().cloned().collect();
            p.terms.insert(r, c.clone());
        }
        p
    }

    pub fn transpose(&self) -> Self {
        let mut p = Self::zero(self.nvars, self.cols, self.rows);
        for (m, c) in &self.terms {
            p.terms.insert(m.clone(), c.transpose());
        }
        p
    }

    /// `P*` on the torus image.
    pub fn adjoint(&self) -> Self {
        self.bar().transpose()
    }

    pub fn entry(&self, i: usize, j: usize) -> PhiPoly {
        let mut p = Self::zero(self.nvars, 1, 1);
        for (m, c) in &self.terms {
            p.add_term(m, &QMat::from_rows(vec![vec![c[(i, j)].clone()]]));
        }
        p
    }

    pub fn from_entries(nvars: usize, rows: usize, cols: usize, f: impl Fn(usize, usize) -> PhiPoly) -> Self {
        let mut p = Self::zero(nvars, rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                let e = f(i, j);
                assert_eq!(e.shape(), (1, 1));
                for (m, c) in &e.terms {
                    let mut mat = QMat::zeros(rows, cols);
                    mat[(i, j)] = c[(0, 0)].clone();
                    p.add_term(m, &mat);
                }
            }
        }
        p
    }

    pub fn column(&self, j: usize) -> PhiPoly {
        self.right_mul(&QMat::from_fn(self.cols, 1, |i, _| if i == j { Q::one() } else { Q::zero() }))
    }

    pub fn hstack(parts: &[PhiPoly]) -> PhiPoly {
        let nvars = parts[0].nvars;
        let rows = parts[0].rows;
        let cols: usize = parts.iter().map(|p| p.cols).sum();
        let mut out = PhiPoly::zero(nvars, rows, cols);
        let mut off = 0;
        for p in parts {
            let embed = QMat::from_fn(p.cols, cols, |i, j| if j == off + i { Q::one() } else { Q::zero() });
            out = &out + &p.right_mul(&embed);
            off += p.cols;
        }
        out
    }

    /// Homogeneous component of total degree `d`.
    pub fn homogeneous(&self, d: usize) -> Self {
        let mut p = Self::zero(self.nvars, self.rows, self.cols);
        for (m, c) in &self.terms {
            if m.iter().sum::<u32>() as usize == d {
                p.terms.insert(m.clone(), c.clone());
            }
        }
        p
    }

    pub fn evaluate(&self, phi: &[Complex64]) -> DMatrix<Complex64> {
        assert_eq!(phi.len(), self.nvars);
        let mut out = DMatrix::zeros(self.rows, self.cols);
        for (m, c) in &self.terms {
            let mut x = Complex64::one();
            for (v, k) in phi.iter().zip(m) {
                x *= v.powu(*k);
            }
            out += c.to_c64() * x;
        }
        out
    }

    pub fn evaluate_q(&self, phi: &[Q]) -> QMat {
        let mut out = QMat::zeros(self.rows, self.cols);
        for (m, c) in &self.terms {
            let mut x = Q::one();
            for (v, k) in phi.iter().zip(m) {
                for _ in 0..*k {
                    x *= v;
                }
            }
            out = &out + &c.scale(&x);
        }
        out
    }

    /// Substitutes Laurent polynomials for the variables.
    pub fn substitute(&self, vars: &[LaurentPoly]) -> MatrixLaurent {
        assert_eq!(vars.len(), self.nvars);
        let rank = vars[0].rank();
        let mut cache: HashMap<Vec<u32>, LaurentPoly> = HashMap::new();
        let mut out = MatrixLaurent::zeros(rank, self.rows, self.cols);
        for (m, c) in &self.terms {
            let mono = cache
                .entry(m.clone())
                .or_insert_with(|| {
                    let mut p = LaurentPoly::one(rank);
                    for (v, k) in vars.iter().zip(m) {
                        for _ in 0..*k {
                            p = &p * v;
                        }
                    }
                    p
                })
                .clone();
            for i in 0..self.rows {
                for j in 0..self.cols {
                    if c[(i, j)].is_zero() {
                        continue;
                    }
                    let e = out.get(i, j) + &mono.scale(&c[(i, j)]);
                    out.set(i, j, e);
                }
            }
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let terms: Vec<serde_json::Value> = self
            .terms
            .iter()
            .map(|(m, c)| serde_json::json!({ "m": m, "coef": c.to_strings() }))
            .collect();
        serde_json::json!({ "shape": [self.rows, self.cols], "terms": terms })
    }

    pub fn from_json(nvars: usize, v: &serde_json::Value) -> Result<Self> {
        let bad = || Error::Shape("malformed PhiPoly JSON".into());
        let shape = v["shape"].as_array().ok_or_else(bad)?;
        let rows = shape.first().and_then(|x| x.as_u64()).ok_or_else(bad)? as usize;
        let cols = shape.get(1).and_then(|x| x.as_u64()).ok_or_else(bad)? as usize;
        let mut p = PhiPoly::zero(nvars, rows, cols);
        for t in v["terms"].as_array().ok_or_else(bad)? {
            let m: Vec<u32> = serde_json::from_value(t["m"].clone()).map_err(|_| bad())?;
            let coef: Vec<Vec<String>> = serde_json::from_value(t["coef"].clone()).map_err(|_| bad())?;
            let mut mat = QMat::zeros(rows, cols);
            for (i, r) in coef.iter().enumerate() {
                for (j, s) in r.iter().enumerate() {
                    mat[(i, j)] = parse_q(s).ok_or_else(bad)?;
                }
            }
            if m.len() != nvars {
                return Err(bad());
            }
            p.add_term(&m, &mat);
        }
        Ok(p)
    }
}

/// Parses a scalar polynomial such as `4/9*p2^2 - 32/9*p1*p3 - 4/9`.
pub fn parse_scalar(nvars: usize, s: &str) -> Result<PhiPoly> {
    let bad = || Error::Range(format!("cannot parse polynomial {s:?}"));
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let mut out = PhiPoly::zero(nvars, 1, 1);
    let mut terms = Vec::new();
    let mut cur = String::new();
    for (i, c) in compact.chars().enumerate() {
        if (c == '+' || c == '-') && i > 0 {
            terms.push(std::mem::take(&mut cur));
        }
        cur.push(c);
    }
    terms.push(cur);
    for t in terms {
        let (sign, body) = match t.strip_prefix('-') {
            Some(b) => (-Q::one(), b),
            None => (Q::one(), t.strip_prefix('+').unwrap_or(&t)),
        };
        if body.is_empty() {
            return Err(bad());
        }
        let mut c = sign;
        let mut m = vec![0u32; nvars];
        for f in body.split('*') {
            if let Some(v) = f.strip_prefix('p') {
                let (idx, pow) = match v.split_once('^') {
                    Some((a, b)) => (a, b.parse::<u32>().map_err(|_| bad())?),
                    None => (v, 1),
                };
                let idx: usize = idx.parse().map_err(|_| bad())?;
                if idx == 0 || idx > nvars {
                    return Err(bad());
                }
                m[idx - 1] += pow;
            } else {
                c *= parse_q(f).ok_or_else(bad)?;
            }
        }
        out.add_term(&m, &QMat::from_rows(vec![vec![c]]));
    }
    Ok(out)
}

/// Inverse of [`parse_scalar`] for `1 x 1` polynomials.
pub fn format_scalar(p: &PhiPoly) -> String {
    let mut parts: Vec<(Vec<u32>, Q)> = p.terms().map(|(m, c)| (m.clone(), c[(0, 0)].clone())).collect();
    parts.sort_by(|a, b| {
        let da: u32 = a.0.iter().sum();
        let db: u32 = b.0.iter().sum();
        db.cmp(&da).then(b.0.cmp(&a.0))
    });
    let mut s = String::new();
    for (m, c) in parts {
        let neg = c < Q::zero();
        let a = if neg { -c } else { c };
        let mut factors = Vec::new();
        let mono: Vec<String> = m
            .iter()
            .enumerate()
            .filter(|(_, &k)| k > 0)
            .map(|(i, &k)| if k == 1 { format!("p{}", i + 1) } else { format!("p{}^{}", i + 1, k) })
            .collect();
        if !a.is_one() || mono.is_empty() {
            factors.push(fmt_q(&a));
        }
        factors.extend(mono);
        let body = factors.join("*");
        if s.is_empty() {
            s = if neg { format!("-{body}") } else { body };
        } else {
            s.push_str(if neg { " - " } else { " + " });
            s.push_str(&body);
        }
    }
    if s.is_empty() {
        "0".into()
    } else {
        s
    }
}

/// Builds a matrix polynomial from a table of scalar strings.
pub fn parse_matrix(nvars: usize, rows: &[&[&str]]) -> Result<PhiPoly> {
    let cols = rows.first().map_or(0, |r| r.len());
    let mut entries = Vec::new();
    for r in rows {
        if r.len() != cols {
            return Err(Error::Shape("ragged table".into()));
        }
        for e in r.iter() {
            entries.push(parse_scalar(nvars, e)?);
        }
    }
    Ok(PhiPoly::from_entries(nvars, rows.len(), cols, |i, j| entries[i * cols + j].clone()))
}

impl Add for &PhiPoly {
    type Output = PhiPoly;
    fn add(self, o: &PhiPoly) -> PhiPoly {
        assert_eq!(self.shape(), o.shape(), "PhiPoly add shape");
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.add_term(m, c);
        }
        r
    }
}

impl Sub for &PhiPoly {
    type Output = PhiPoly;
    fn sub(self, o: &PhiPoly) -> PhiPoly {
        assert_eq!(self.shape(), o.shape(), "PhiPoly sub shape");
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.add_term(m, &-c);
        }
        r
    }
}

impl Neg for &PhiPoly {
    type Output = PhiPoly;
    fn neg(self) -> PhiPoly {
        self.scale(&-Q::one())
    }
}

impl Mul for &PhiPoly {
    type Output = PhiPoly;
    fn mul(self, o: &PhiPoly) -> PhiPoly {
        assert_eq!(self.cols, o.rows, "PhiPoly product shape");
        let mut r = PhiPoly::zero(self.nvars, self.rows, o.cols);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                let m: Vec<u32> = m1.iter().zip(m2).map(|(a, b)| a + b).collect();
                r.add_term(&m, &(c1 * c2));
            }
        }
        r
    }
}

/// All exponent vectors in `nvars` variables of total degree exactly `d`, in
/// lexicographically decreasing order.
pub fn monomials_of_degree(nvars: usize, d: u32) -> Vec<Vec<u32>> {
    fn rec(nvars: usize, d: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() + 1 == nvars {
            prefix.push(d);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for k in (0..=d).rev() {
            prefix.push(k);
            rec(nvars, d - k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if nvars == 0 {
        if d == 0 {
            out.push(vec![]);
        }
        return out;
    }
    rec(nvars, d, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn product_and_derivative() {
        let x = PhiPoly::var(2, 0);
        let y = PhiPoly::var(2, 1);
        let p = &(&x * &x) * &y;
        assert_eq!(p.partial(0), (&x * &y).scale(&q(2, 1)));
        assert_eq!(p.total_degree(), 3);
        assert_eq!(p.bar(), &(&y * &y) * &x);
    }

    #[test]
    fn monomial_enumeration() {
        assert_eq!(monomials_of_degree(2, 2), vec![vec![2, 0], vec![1, 1], vec![0, 2]]);
        assert_eq!(monomials_of_degree(3, 2).len(), 6);
    }

    #[test]
    fn parse_and_format() {
        let p = parse_scalar(3, "4/9*p2^2 - 32/9*p1*p3 - 4/9").unwrap();
        assert_eq!(p.scalar_coeff(&[1, 0, 1]), crate::rational::q(-32, 9));
        assert_eq!(parse_scalar(3, &format_scalar(&p)).unwrap(), p);
        assert_eq!(format_scalar(&parse_scalar(2, "-p1").unwrap()), "-p1");
        assert!(parse_scalar(2, "p3").is_err());
        assert!(parse_scalar(2, "2*x").is_err());
    }

    #[test]
    fn json_roundtrip() {
        let p = PhiPoly::from_entries(2, 2, 2, |i, j| PhiPoly::var(2, (i + j) % 2).scale(&q(1 + i as i64, 3)));
        assert_eq!(PhiPoly::from_json(2, &p.to_json()).unwrap(), p);
    }
}
