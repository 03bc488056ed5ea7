use std::fmt;

use serde_json::Value;

use super::gaussian::GaussianRational;
use super::rational::{write_key, Rational};
use crate::error::{Error, ParseError};

/// Square matrix over the Gaussian rationals, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RMatrix {
    dim: usize,
    entries: Vec<GaussianRational>,
}

impl RMatrix {
    pub fn new(dim: usize, entries: Vec<GaussianRational>) -> Result<Self, Error> {
        if dim == 0 || entries.len() != dim * dim {
            return Err(Error::DimensionMismatch(dim * dim, entries.len()));
        }
        Ok(RMatrix { dim, entries })
    }

    pub fn from_rows(rows: Vec<Vec<GaussianRational>>) -> Result<Self, Error> {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch(dim, row.len()));
            }
            entries.extend(row);
        }
        RMatrix::new(dim, entries)
    }

    /// Real rational entries, row-major.
    pub fn from_real(dim: usize, entries: Vec<Rational>) -> Result<Self, Error> {
        RMatrix::new(dim, entries.into_iter().map(GaussianRational::real).collect())
    }

    pub fn identity(dim: usize) -> Self {
        Self::scalar(dim, GaussianRational::one())
    }

    pub fn zero(dim: usize) -> Self {
        Self::scalar(dim, GaussianRational::zero())
    }

    pub fn scalar(dim: usize, s: GaussianRational) -> Self {
        let mut entries = vec![GaussianRational::zero(); dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = s.clone();
        }
        RMatrix { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[GaussianRational] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> &GaussianRational {
        &self.entries[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: GaussianRational) {
        self.entries[i * self.dim + j] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(GaussianRational::is_zero)
    }

    pub fn is_real(&self) -> bool {
        self.entries.iter().all(GaussianRational::is_real)
    }

    fn check(&self, o: &Self) {
        assert_eq!(self.dim, o.dim, "matrix dimension mismatch");
    }

    pub fn add(&self, o: &Self) -> Self {
        self.check(o);
        let entries = self.entries.iter().zip(&o.entries).map(|(a, b)| a + b).collect();
        RMatrix { dim: self.dim, entries }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.check(o);
        let entries = self.entries.iter().zip(&o.entries).map(|(a, b)| a - b).collect();
        RMatrix { dim: self.dim, entries }
    }

    pub fn neg(&self) -> Self {
        RMatrix { dim: self.dim, entries: self.entries.iter().map(|a| -a).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        self.check(o);
        let k = self.dim;
        let mut entries = Vec::with_capacity(k * k);
        for i in 0..k {
            for j in 0..k {
                let mut acc = GaussianRational::zero();
                for t in 0..k {
                    acc = &acc + &(self.get(i, t) * o.get(t, j));
                }
                entries.push(acc);
            }
        }
        RMatrix { dim: k, entries }
    }

    pub fn scale(&self, s: &GaussianRational) -> Self {
        RMatrix { dim: self.dim, entries: self.entries.iter().map(|a| a * s).collect() }
    }

    /// `(A C; B D)` as a 2k×2k matrix.
    pub fn block(a: &Self, c: &Self, b: &Self, d: &Self) -> Self {
        let k = a.dim;
        for m in [b, c, d] {
            a.check(m);
        }
        let n = 2 * k;
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let src = match (i < k, j < k) {
                    (true, true) => a,
                    (true, false) => c,
                    (false, true) => b,
                    (false, false) => d,
                };
                entries.push(src.get(i % k, j % k).clone());
            }
        }
        RMatrix { dim: n, entries }
    }

    pub fn det(&self) -> GaussianRational {
        matrix_det(self)
    }

    pub fn inverse(&self) -> Result<Self, Error> {
        matrix_inverse(self)
    }

    pub fn write_key(&self, out: &mut Vec<u8>) {
        out.push(b'M');
        out.extend_from_slice(&(self.dim as u32).to_be_bytes());
        for e in &self.entries {
            write_key(&e.re, out);
            write_key(&e.im, out);
        }
    }

    /// Row-major JSON array of `["re","im"]` pairs.
    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = (0..self.dim)
            .map(|i| {
                Value::Array(
                    (0..self.dim)
                        .map(|j| {
                            let [re, im] = self.get(i, j).to_pair();
                            Value::Array(vec![Value::String(re), Value::String(im)])
                        })
                        .collect(),
                )
            })
            .collect();
        Value::Array(rows)
    }

    pub fn from_json(v: &Value) -> Result<Self, ParseError> {
        let bad = |m: &str| ParseError::Matrix(m.to_string());
        let rows = v.as_array().ok_or_else(|| bad("expected array of rows"))?;
        let mut out = Vec::with_capacity(rows.len());
        for row in rows {
            let cells = row.as_array().ok_or_else(|| bad("expected array of entries"))?;
            let mut r = Vec::with_capacity(cells.len());
            for cell in cells {
                let pair = cell.as_array().ok_or_else(|| bad("expected [re, im] pair"))?;
                if pair.len() != 2 {
                    return Err(bad("expected [re, im] pair"));
                }
                let s = |x: &Value| x.as_str().map(str::to_string).ok_or_else(|| bad("entries must be strings"));
                r.push(GaussianRational::from_pair(&s(&pair[0])?, &s(&pair[1])?)?);
            }
            out.push(r);
        }
        RMatrix::from_rows(out).map_err(|e| ParseError::Matrix(e.to_string()))
    }
}

impl fmt::Display for RMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_json())
    }
}

/// Bareiss elimination over the Gaussian rationals with row pivoting.
pub fn matrix_det(a: &RMatrix) -> GaussianRational {
    let n = a.dim;
    let mut m: Vec<Vec<GaussianRational>> = (0..n).map(|i| (0..n).map(|j| a.get(i, j).clone()).collect()).collect();
    let mut negate = false;
    let mut prev = GaussianRational::one();
    for k in 0..n {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    negate = !negate;
                }
                None => return GaussianRational::zero(),
            }
        }
        let prev_inv = prev.inv().expect("Bareiss pivot is nonzero");
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&m[k][k] * &m[i][j]) - &(&m[i][k] * &m[k][j]);
                m[i][j] = &num * &prev_inv;
            }
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    if negate {
        -&d
    } else {
        d
    }
}

/// Exact Gauss-Jordan inverse.
pub fn matrix_inverse(a: &RMatrix) -> Result<RMatrix, Error> {
    let n = a.dim;
    let mut m: Vec<Vec<GaussianRational>> = (0..n)
        .map(|i| {
            let mut row: Vec<GaussianRational> = (0..n).map(|j| a.get(i, j).clone()).collect();
            row.extend((0..n).map(|j| if i == j { GaussianRational::one() } else { GaussianRational::zero() }));
            row
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero()).ok_or(Error::Singular)?;
        m.swap(col, pivot);
        let inv = m[col][col].inv()?;
        for v in m[col].iter_mut() {
            *v = &*v * &inv;
        }
        let pivot_row = m[col].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r == col || row[col].is_zero() {
                continue;
            }
            let factor = row[col].clone();
            for (v, p) in row.iter_mut().zip(&pivot_row) {
                *v = &*v - &(&factor * p);
            }
        }
    }
    let entries = m.into_iter().flat_map(|row| row.into_iter().skip(n)).collect();
    RMatrix::new(n, entries)
}
