//! Minimal dense matrices over exact scalar rings.
//!
//! The scalar types here are runtime-parameterized (residue fields, p-adic
//! elements), so zero/one are derived from a sample entry instead of a static
//! constructor.

use crate::cyclotomic::Cyc;
use crate::fq::Fq;
use crate::rat::Rat;
use num_traits::{One, Zero};

pub trait Scalar: Clone + PartialEq {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn s_add(&self, o: &Self) -> Self;
    fn s_neg(&self) -> Self;
    fn s_mul(&self, o: &Self) -> Self;
    fn s_inv(&self) -> Option<Self>;
    fn s_is_zero(&self) -> bool;
    fn s_sub(&self, o: &Self) -> Self {
        self.s_add(&o.s_neg())
    }
}

impl Scalar for Cyc {
    fn zero_like(&self) -> Self {
        Cyc::zero()
    }
    fn one_like(&self) -> Self {
        Cyc::one()
    }
    fn s_add(&self, o: &Self) -> Self {
        self.clone() + o.clone()
    }
    fn s_neg(&self) -> Self {
        -self.clone()
    }
    fn s_mul(&self, o: &Self) -> Self {
        self.clone() * o.clone()
    }
    fn s_inv(&self) -> Option<Self> {
        self.inv()
    }
    fn s_is_zero(&self) -> bool {
        self.is_zero()
    }
}

impl Scalar for Fq {
    fn zero_like(&self) -> Self {
        Fq::zero_like(self)
    }
    fn one_like(&self) -> Self {
        Fq::one_like(self)
    }
    fn s_add(&self, o: &Self) -> Self {
        self.add(o)
    }
    fn s_neg(&self) -> Self {
        self.neg()
    }
    fn s_mul(&self, o: &Self) -> Self {
        self.mul(o)
    }
    fn s_inv(&self) -> Option<Self> {
        self.inv()
    }
    fn s_is_zero(&self) -> bool {
        self.is_zero()
    }
}

impl Scalar for Rat {
    fn zero_like(&self) -> Self {
        Rat::zero()
    }
    fn one_like(&self) -> Self {
        Rat::one()
    }
    fn s_add(&self, o: &Self) -> Self {
        self + o
    }
    fn s_neg(&self) -> Self {
        -self
    }
    fn s_mul(&self, o: &Self) -> Self {
        self * o
    }
    fn s_inv(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(self.recip())
        }
    }
    fn s_is_zero(&self) -> bool {
        self.is_zero()
    }
}

#[derive(Clone, PartialEq, Debug)]
pub struct Mat<T> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<T>,
}

impl<T: Scalar> Mat<T> {
    pub fn from_rows(rows: Vec<Vec<T>>) -> Mat<T> {
        let r = rows.len();
        let c = rows[0].len();
        assert!(rows.iter().all(|row| row.len() == c));
        Mat {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn filled(rows: usize, cols: usize, value: T) -> Mat<T> {
        Mat {
            rows,
            cols,
            data: vec![value; rows * cols],
        }
    }

    pub fn identity_like(n: usize, sample: &T) -> Mat<T> {
        let mut m = Mat::filled(n, n, sample.zero_like());
        for i in 0..n {
            m[(i, i)] = sample.one_like();
        }
        m
    }

    pub fn zero_like(rows: usize, cols: usize, sample: &T) -> Mat<T> {
        Mat::filled(rows, cols, sample.zero_like())
    }

    pub fn sample(&self) -> &T {
        &self.data[0]
    }

    pub fn mul(&self, o: &Mat<T>) -> Mat<T> {
        assert_eq!(self.cols, o.rows);
        let zero = self.data[0].zero_like();
        let mut out = Mat::filled(self.rows, o.cols, zero);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.s_is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let t = a.s_mul(&o[(k, j)]);
                    out[(i, j)] = out[(i, j)].s_add(&t);
                }
            }
        }
        out
    }

    pub fn add(&self, o: &Mat<T>) -> Mat<T> {
        assert!(self.rows == o.rows && self.cols == o.cols);
        let data = self
            .data
            .iter()
            .zip(&o.data)
            .map(|(a, b)| a.s_add(b))
            .collect();
        Mat {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn sub(&self, o: &Mat<T>) -> Mat<T> {
        assert!(self.rows == o.rows && self.cols == o.cols);
        let data = self
            .data
            .iter()
            .zip(&o.data)
            .map(|(a, b)| a.s_sub(b))
            .collect();
        Mat {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn scale(&self, c: &T) -> Mat<T> {
        let data = self.data.iter().map(|a| a.s_mul(c)).collect();
        Mat {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn neg(&self) -> Mat<T> {
        let data = self.data.iter().map(|a| a.s_neg()).collect();
        Mat {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn transpose(&self) -> Mat<T> {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self[(i, j)].clone());
            }
        }
        Mat {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    pub fn trace(&self) -> T {
        assert_eq!(self.rows, self.cols);
        let mut t = self.data[0].zero_like();
        for i in 0..self.rows {
            t = t.s_add(&self[(i, i)]);
        }
        t
    }

    pub fn is_identity(&self) -> bool {
        if self.rows != self.cols {
            return false;
        }
        let sample = &self.data[0];
        let one = sample.one_like();
        for i in 0..self.rows {
            for j in 0..self.cols {
                if i == j {
                    if self[(i, j)] != one {
                        return false;
                    }
                } else if !self[(i, j)].s_is_zero() {
                    return false;
                }
            }
        }
        true
    }

    /// Determinant by cofactor expansion; intended for n <= 4.
    pub fn det(&self) -> T {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        match n {
            1 => self[(0, 0)].clone(),
            2 => self[(0, 0)]
                .s_mul(&self[(1, 1)])
                .s_sub(&self[(0, 1)].s_mul(&self[(1, 0)])),
            _ => {
                let mut acc = self.data[0].zero_like();
                for j in 0..n {
                    let minor = self.minor(0, j);
                    let term = self[(0, j)].s_mul(&minor.det());
                    acc = if j % 2 == 0 {
                        acc.s_add(&term)
                    } else {
                        acc.s_sub(&term)
                    };
                }
                acc
            }
        }
    }

    fn minor(&self, row: usize, col: usize) -> Mat<T> {
        let mut data = Vec::new();
        for i in 0..self.rows {
            if i == row {
                continue;
            }
            for j in 0..self.cols {
                if j != col {
                    data.push(self[(i, j)].clone());
                }
            }
        }
        Mat {
            rows: self.rows - 1,
            cols: self.cols - 1,
            data,
        }
    }

    /// Inverse via Gauss-Jordan; requires the scalars to form a field.
    pub fn inverse(&self) -> Option<Mat<T>> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Mat::identity_like(n, &self.data[0]);
        for col in 0..n {
            let pivot = (col..n).find(|&r| !a[(r, col)].s_is_zero())?;
            if pivot != col {
                for j in 0..n {
                    a.data.swap(col * n + j, pivot * n + j);
                    inv.data.swap(col * n + j, pivot * n + j);
                }
            }
            let pinv = a[(col, col)].s_inv()?;
            for j in 0..n {
                a[(col, j)] = a[(col, j)].s_mul(&pinv);
                inv[(col, j)] = inv[(col, j)].s_mul(&pinv);
            }
            for r in 0..n {
                if r == col || a[(r, col)].s_is_zero() {
                    continue;
                }
                let factor = a[(r, col)].clone();
                for j in 0..n {
                    let t = factor.s_mul(&a[(col, j)]);
                    a[(r, j)] = a[(r, j)].s_sub(&t);
                    let t = factor.s_mul(&inv[(col, j)]);
                    inv[(r, j)] = inv[(r, j)].s_sub(&t);
                }
            }
        }
        Some(inv)
    }

    /// Reduced column echelon basis of the column space.
    pub fn column_space_basis(&self) -> Vec<Vec<T>> {
        let mut cols: Vec<Vec<T>> = (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self[(i, j)].clone()).collect())
            .collect();
        let mut basis: Vec<Vec<T>> = Vec::new();
        let mut pivots: Vec<usize> = Vec::new();
        'outer: for col in cols.iter_mut() {
            let mut v = col.clone();
            for (b, &pi) in basis.iter().zip(&pivots) {
                if !v[pi].s_is_zero() {
                    let c = v[pi].clone();
                    for (x, y) in v.iter_mut().zip(b) {
                        *x = x.s_sub(&c.s_mul(y));
                    }
                }
            }
            if let Some(pi) = v.iter().position(|x| !x.s_is_zero()) {
                let inv = v[pi].s_inv().expect("field scalar");
                for x in v.iter_mut() {
                    *x = x.s_mul(&inv);
                }
                basis.push(v);
                pivots.push(pi);
                continue 'outer;
            }
        }
        basis
    }

    pub fn rank(&self) -> usize {
        self.column_space_basis().len()
    }
}

impl<T> std::ops::Index<(usize, usize)> for Mat<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Mat<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}
