//! Exact arithmetic in cyclotomic fields Q(zeta_n).
//!
//! Elements are stored as polynomials in a primitive n-th root of unity,
//! canonically reduced modulo the n-th cyclotomic polynomial. Since Phi_n is
//! irreducible over Q this is a field; equality, inverses and inner products
//! are exact. Mixed orders combine at the lcm.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub};
use std::sync::{Mutex, OnceLock};

fn br(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Dense polynomial division: returns (quotient, remainder) of a/b.
fn poly_divrem(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut rem: Vec<BigRational> = a.to_vec();
    let db = b.len() - 1;
    assert!(!b[db].is_zero());
    if rem.len() <= db {
        return (vec![BigRational::zero()], rem);
    }
    let mut quo = vec![BigRational::zero(); rem.len() - db];
    for i in (db..rem.len()).rev() {
        if rem[i].is_zero() {
            continue;
        }
        let c = &rem[i] / &b[db];
        quo[i - db] = c.clone();
        for j in 0..=db {
            let t = &c * &b[j];
            rem[i - db + j] -= t;
        }
    }
    while rem.len() > 1 && rem.last().unwrap().is_zero() {
        rem.pop();
    }
    (quo, rem)
}

fn divisors(n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            if d != n / d {
                out.push(n / d);
            }
        }
        d += 1;
    }
    out.sort_unstable();
    out
}

pub fn euler_phi(n: u64) -> u64 {
    let mut n = n;
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

/// The n-th cyclotomic polynomial as a dense coefficient vector, cached.
fn cyclotomic_poly(n: u64) -> Vec<BigRational> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Vec<BigRational>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(p) = cache.lock().unwrap().get(&n) {
        return p.clone();
    }
    // x^n - 1 divided by Phi_d for every proper divisor d of n.
    let mut poly = vec![BigRational::zero(); n as usize + 1];
    poly[0] = -BigRational::one();
    poly[n as usize] = BigRational::one();
    for d in divisors(n) {
        if d == n {
            continue;
        }
        let phi_d = cyclotomic_poly(d);
        let (q, r) = poly_divrem(&poly, &phi_d);
        assert!(
            r.iter().all(|c| c.is_zero()),
            "cyclotomic division not exact"
        );
        poly = q;
    }
    cache.lock().unwrap().insert(n, poly.clone());
    poly
}

/// An element of Q(zeta_order), reduced mod the cyclotomic polynomial.
#[derive(Clone)]
pub struct Cyc {
    order: u64,
    /// Coefficients of zeta^0 .. zeta^{phi(order)-1}; trailing zeros trimmed.
    coeffs: Vec<BigRational>,
}

impl Cyc {
    fn reduce(order: u64, mut raw: Vec<BigRational>) -> Cyc {
        // Fold exponents mod order, then divide by Phi_order.
        let n = order as usize;
        if raw.len() > n {
            let mut folded = vec![BigRational::zero(); n];
            for (i, c) in raw.into_iter().enumerate() {
                if !c.is_zero() {
                    folded[i % n] += c;
                }
            }
            raw = folded;
        }
        while raw.len() > 1 && raw.last().unwrap().is_zero() {
            raw.pop();
        }
        if order > 1 {
            let phi = cyclotomic_poly(order);
            if raw.len() >= phi.len() {
                let (_, rem) = poly_divrem(&raw, &phi);
                raw = rem;
            }
        }
        while raw.len() > 1 && raw.last().unwrap().is_zero() {
            raw.pop();
        }
        let mut out = Cyc { order, coeffs: raw };
        out.normalize_order();
        out
    }

    /// If the reduced form is a rational, drop to order 1.
    fn normalize_order(&mut self) {
        if self.order > 1 && self.coeffs.iter().skip(1).all(|c| c.is_zero()) {
            self.coeffs.truncate(1);
            self.order = 1;
        }
    }

    pub fn zero() -> Cyc {
        Cyc {
            order: 1,
            coeffs: vec![BigRational::zero()],
        }
    }

    pub fn one() -> Cyc {
        Cyc {
            order: 1,
            coeffs: vec![BigRational::one()],
        }
    }

    pub fn from_int(n: i64) -> Cyc {
        Cyc {
            order: 1,
            coeffs: vec![br(n)],
        }
    }

    pub fn from_rational(q: BigRational) -> Cyc {
        Cyc {
            order: 1,
            coeffs: vec![q],
        }
    }

    pub fn from_ratio(num: i64, den: i64) -> Cyc {
        Cyc {
            order: 1,
            coeffs: vec![BigRational::new(BigInt::from(num), BigInt::from(den))],
        }
    }

    /// zeta_n^k, with gcd normalization of the order.
    pub fn zeta(n: u64, k: i64) -> Cyc {
        assert!(n >= 1);
        let k = k.rem_euclid(n as i64) as u64;
        let g = gcd(n, k);
        let (n, k) = if k == 0 { (1, 0) } else { (n / g, k / g) };
        let mut raw = vec![BigRational::zero(); k as usize + 1];
        raw[k as usize] = BigRational::one();
        Cyc::reduce(n, raw)
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.order == 1 && self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    pub fn is_rational(&self) -> bool {
        self.order == 1
    }

    pub fn to_rational(&self) -> Option<BigRational> {
        if self.order == 1 {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    /// Re-express in Q(zeta_m) for order | m.
    fn embed(&self, m: u64) -> Cyc {
        if self.order == m {
            return self.clone();
        }
        assert!(m % self.order == 0);
        let step = (m / self.order) as usize;
        let mut raw = vec![BigRational::zero(); (self.coeffs.len() - 1) * step + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                raw[i * step] = c.clone();
            }
        }
        Cyc::reduce(m, raw)
    }

    /// Galois twist zeta -> zeta^k; requires gcd(k, order) = 1.
    pub fn galois(&self, k: i64) -> Cyc {
        let n = self.order;
        let k = k.rem_euclid(n as i64) as u64;
        assert_eq!(
            gcd(n, k.max(1)),
            1,
            "galois exponent must be coprime to the order"
        );
        let mut raw = vec![BigRational::zero(); n as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                raw[(i as u64 * k % n) as usize] += c.clone();
            }
        }
        Cyc::reduce(n, raw)
    }

    /// Complex conjugation (zeta -> zeta^{-1}).
    pub fn conj(&self) -> Cyc {
        if self.order == 1 {
            return self.clone();
        }
        self.galois(self.order as i64 - 1)
    }

    pub fn inv(&self) -> Option<Cyc> {
        if self.is_zero() {
            return None;
        }
        if self.order == 1 {
            return Some(Cyc::from_rational(self.coeffs[0].recip()));
        }
        // Extended Euclid in Q[x] against the (irreducible) cyclotomic polynomial.
        let phi = cyclotomic_poly(self.order);
        let (mut r0, mut r1) = (phi, self.coeffs.clone());
        let one = vec![BigRational::one()];
        let zero_p = vec![BigRational::zero()];
        let (mut t0, mut t1) = (zero_p, one);
        while !(r1.len() == 1 && r1[0].is_zero()) {
            let (q, r) = poly_divrem(&r0, &r1);
            let t = poly_sub(&t0, &poly_mul(&q, &t1));
            r0 = r1;
            r1 = r;
            t0 = t1;
            t1 = t;
        }
        // r0 = gcd (a nonzero constant since Phi is irreducible).
        assert_eq!(r0.len(), 1, "cyclotomic polynomial not irreducible?");
        let c = r0[0].recip();
        let inv: Vec<BigRational> = t0.iter().map(|x| x * &c).collect();
        Some(Cyc::reduce(self.order, inv))
    }

    /// z * conj(z), always a totally positive element; equals 1 for roots of unity.
    pub fn norm_squared(&self) -> Cyc {
        self.clone() * self.conj()
    }

    pub fn pow(&self, mut e: u64) -> Cyc {
        let mut base = self.clone();
        let mut acc = Cyc::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            base = base.clone() * base;
            e >>= 1;
        }
        acc
    }

    /// Numerical evaluation (re, im) at zeta_n = exp(2 pi i / n).
    pub fn to_complex_f64(&self) -> (f64, f64) {
        let n = self.order as f64;
        let mut re = 0.0;
        let mut im = 0.0;
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let cf = c.to_f64().unwrap();
            let ang = 2.0 * std::f64::consts::PI * (j as f64) / n;
            re += cf * ang.cos();
            im += cf * ang.sin();
        }
        (re, im)
    }

    /// Exact test |z| = 1, i.e. z * conj(z) = 1.
    pub fn is_unit_modulus(&self) -> bool {
        self.norm_squared().is_one()
    }

    /// Writes the element as a sum of c_j zeta^j for TSV-style output.
    pub fn coeff_tuples(&self) -> Vec<(usize, BigRational)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(j, c)| (j, c.clone()))
            .collect()
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a.max(1)
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

fn poly_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    out
}

fn poly_sub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut out = a.to_vec();
    if out.len() < b.len() {
        out.resize(b.len(), BigRational::zero());
    }
    for (i, y) in b.iter().enumerate() {
        out[i] -= y;
    }
    out
}

impl PartialEq for Cyc {
    fn eq(&self, other: &Self) -> bool {
        if self.order == other.order {
            let len = self.coeffs.len().max(other.coeffs.len());
            return (0..len).all(|i| {
                let a = self
                    .coeffs
                    .get(i)
                    .cloned()
                    .unwrap_or_else(BigRational::zero);
                let b = other
                    .coeffs
                    .get(i)
                    .cloned()
                    .unwrap_or_else(BigRational::zero);
                a == b
            });
        }
        let m = lcm(self.order, other.order);
        self.embed(m).coeffs == other.embed(m).coeffs
    }
}

impl Eq for Cyc {}

impl Add for Cyc {
    type Output = Cyc;
    fn add(self, rhs: Cyc) -> Cyc {
        let m = lcm(self.order, rhs.order);
        let a = self.embed(m);
        let b = rhs.embed(m);
        let mut raw = a.coeffs;
        if raw.len() < b.coeffs.len() {
            raw.resize(b.coeffs.len(), BigRational::zero());
        }
        for (i, c) in b.coeffs.iter().enumerate() {
            raw[i] += c;
        }
        Cyc::reduce(m, raw)
    }
}

impl AddAssign for Cyc {
    fn add_assign(&mut self, rhs: Cyc) {
        *self = self.clone() + rhs;
    }
}

impl Sub for Cyc {
    type Output = Cyc;
    fn sub(self, rhs: Cyc) -> Cyc {
        self + (-rhs)
    }
}

impl Neg for Cyc {
    type Output = Cyc;
    fn neg(self) -> Cyc {
        Cyc {
            order: self.order,
            coeffs: self.coeffs.into_iter().map(|c| -c).collect(),
        }
    }
}

impl Mul for Cyc {
    type Output = Cyc;
    fn mul(self, rhs: Cyc) -> Cyc {
        if self.is_zero() || rhs.is_zero() {
            return Cyc::zero();
        }
        let m = lcm(self.order, rhs.order);
        let a = self.embed(m);
        let b = rhs.embed(m);
        Cyc::reduce(m, poly_mul(&a.coeffs, &b.coeffs))
    }
}

impl MulAssign for Cyc {
    fn mul_assign(&mut self, rhs: Cyc) {
        *self = self.clone() * rhs;
    }
}

impl fmt::Debug for Cyc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Cyc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if j == 0 {
                write!(f, "{}", c)?;
            } else if c.is_one() {
                write!(f, "z{}^{}", self.order, j)?;
            } else {
                write!(f, "{}*z{}^{}", c, self.order, j)?;
            }
        }
        Ok(())
    }
}

/// Quadratic Gauss sum sum_t (t|p) zeta_p^t; satisfies g^2 = (-1)^{(p-1)/2} p.
pub fn gauss_sum(p: u64) -> Cyc {
    let mut g = Cyc::zero();
    for t in 1..p {
        let ls = legendre(t as i64, p);
        g += Cyc::from_int(ls) * Cyc::zeta(p, t as i64);
    }
    g
}

/// Legendre symbol (a|p) for odd prime p.
pub fn legendre(a: i64, p: u64) -> i64 {
    let a = a.rem_euclid(p as i64) as u64;
    if a == 0 {
        return 0;
    }
    let mut r = 1u64;
    let mut base = a % p;
    let mut e = (p - 1) / 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    if r == 1 {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeta_powers_cycle() {
        let z = Cyc::zeta(7, 1);
        assert_eq!(z.pow(7), Cyc::one());
        assert_ne!(z.pow(3), Cyc::one());
        assert!(z.is_unit_modulus());
    }

    #[test]
    fn primitive_idempotent_sum() {
        // 1 + zeta + ... + zeta^{p-1} = 0.
        let mut s = Cyc::zero();
        for k in 0..5 {
            s += Cyc::zeta(5, k);
        }
        assert!(s.is_zero());
    }

    #[test]
    fn inverse_round_trip() {
        let z = Cyc::zeta(12, 5) + Cyc::from_int(2);
        let zi = z.inv().unwrap();
        assert_eq!(z * zi, Cyc::one());
    }

    #[test]
    fn mixed_order_arithmetic() {
        // zeta_4 * zeta_6 = zeta_12^{3+2} = zeta_12^5.
        let a = Cyc::zeta(4, 1) * Cyc::zeta(6, 1);
        assert_eq!(a, Cyc::zeta(12, 5));
        // zeta_3 + zeta_3^2 = -1.
        let b = Cyc::zeta(3, 1) + Cyc::zeta(3, 2);
        assert_eq!(b, Cyc::from_int(-1));
        assert!(b.is_rational());
    }

    #[test]
    fn gauss_sum_square() {
        for p in [3u64, 5, 7, 11] {
            let g = gauss_sum(p);
            let sign = if (p - 1) / 2 % 2 == 0 { 1 } else { -1 };
            assert_eq!(g.clone() * g, Cyc::from_int(sign * p as i64));
        }
    }

    #[test]
    fn conjugation_is_inverse_on_roots() {
        let z = Cyc::zeta(8, 3);
        assert_eq!(z.conj() * z, Cyc::one());
    }
}
