//! Small finite fields F_p and F_{p^2}, runtime-parameterized.
//!
//! F_{p^2} is realized as F_p(w) with w^2 a fixed quadratic non-residue.
//! Elements carry their field parameters; mixing fields panics.

use crate::cyclotomic::legendre;
use std::fmt;

/// Element a + b*w of F_{p^f}, f in {1,2}; for f = 1 always b = 0.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Fq {
    pub p: u64,
    pub f: u8,
    pub nonres: u64,
    pub a: u64,
    pub b: u64,
}

impl Fq {
    pub fn prime(p: u64, a: i64) -> Fq {
        Fq {
            p,
            f: 1,
            nonres: 0,
            a: a.rem_euclid(p as i64) as u64,
            b: 0,
        }
    }

    pub fn ext(p: u64, nonres: u64, a: i64, b: i64) -> Fq {
        Fq {
            p,
            f: 2,
            nonres,
            a: a.rem_euclid(p as i64) as u64,
            b: b.rem_euclid(p as i64) as u64,
        }
    }

    /// Smallest quadratic non-residue mod p (p odd).
    pub fn default_nonres(p: u64) -> u64 {
        (2..p)
            .find(|&n| legendre(n as i64, p) == -1)
            .expect("odd prime has a non-residue")
    }

    pub fn q(&self) -> u64 {
        if self.f == 1 {
            self.p
        } else {
            self.p * self.p
        }
    }

    pub fn zero_like(&self) -> Fq {
        Fq {
            a: 0,
            b: 0,
            ..*self
        }
    }

    pub fn one_like(&self) -> Fq {
        Fq {
            a: 1,
            b: 0,
            ..*self
        }
    }

    pub fn is_zero(&self) -> bool {
        self.a == 0 && self.b == 0
    }

    fn check(&self, o: &Fq) {
        assert!(self.p == o.p && self.f == o.f, "mixed residue fields");
    }

    pub fn add(&self, o: &Fq) -> Fq {
        self.check(o);
        Fq {
            a: (self.a + o.a) % self.p,
            b: (self.b + o.b) % self.p,
            ..*self
        }
    }

    pub fn neg(&self) -> Fq {
        Fq {
            a: (self.p - self.a) % self.p,
            b: (self.p - self.b) % self.p,
            ..*self
        }
    }

    pub fn sub(&self, o: &Fq) -> Fq {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Fq) -> Fq {
        self.check(o);
        let p = self.p;
        // (a + bw)(c + dw) = ac + bd*n + (ad + bc) w.
        let a = (self.a * o.a + self.b * o.b % p * self.nonres) % p;
        let b = (self.a * o.b + self.b * o.a) % p;
        Fq { a, b, ..*self }
    }

    pub fn scale(&self, k: i64) -> Fq {
        let k = k.rem_euclid(self.p as i64) as u64;
        Fq {
            a: self.a * k % self.p,
            b: self.b * k % self.p,
            ..*self
        }
    }

    pub fn pow(&self, mut e: u64) -> Fq {
        let mut acc = self.one_like();
        let mut base = *self;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self) -> Option<Fq> {
        if self.is_zero() {
            return None;
        }
        Some(self.pow(self.q() - 2))
    }

    /// Frobenius x -> x^p (conjugation for f = 2).
    pub fn frobenius(&self) -> Fq {
        if self.f == 1 {
            *self
        } else {
            Fq {
                b: (self.p - self.b) % self.p,
                ..*self
            }
        }
    }

    /// Multiplicative order; zero input panics.
    pub fn mult_order(&self) -> u64 {
        assert!(!self.is_zero());
        let mut k = 1;
        let mut x = *self;
        let one = self.one_like();
        while x != one {
            x = x.mul(self);
            k += 1;
        }
        k
    }

    /// A generator of F_q^*, found by scanning.
    pub fn generator(p: u64, f: u8, nonres: u64) -> Fq {
        let q = if f == 1 { p } else { p * p };
        if f == 1 {
            for a in 2..p {
                let x = Fq::prime(p, a as i64);
                if x.mult_order() == q - 1 {
                    return x;
                }
            }
        } else {
            for a in 0..p {
                for b in 1..p {
                    let x = Fq::ext(p, nonres, a as i64, b as i64);
                    if x.mult_order() == q - 1 {
                        return x;
                    }
                }
            }
        }
        unreachable!("finite field has a generator")
    }
}

/// Discrete logarithm base `g` by scanning (fields here are tiny).
pub fn dlog(g: &Fq, target: &Fq) -> Option<u64> {
    if target.is_zero() {
        return None;
    }
    let mut x = g.one_like();
    for k in 0..g.q() {
        if x == *target {
            return Some(k);
        }
        x = x.mul(g);
    }
    None
}

impl fmt::Display for Fq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.f == 1 || self.b == 0 {
            write!(f, "{}", self.a)
        } else if self.a == 0 {
            write!(f, "{}w", self.b)
        } else {
            write!(f, "{}+{}w", self.a, self.b)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f49_arithmetic() {
        let n = Fq::default_nonres(7); // 3 is the least non-residue mod 7
        assert_eq!(n, 3);
        let w = Fq::ext(7, n, 0, 1);
        assert_eq!(w.mul(&w), Fq::ext(7, n, 3, 0));
        let x = Fq::ext(7, n, 2, 5);
        assert_eq!(x.mul(&x.inv().unwrap()), x.one_like());
        assert_eq!(x.pow(49), x, "Frobenius squared is identity");
        assert_eq!(x.frobenius().frobenius(), x);
    }

    #[test]
    fn unit_group_order() {
        let g = Fq::generator(7, 2, 3);
        assert_eq!(g.mult_order(), 48);
        let g5 = Fq::generator(5, 1, 0);
        assert_eq!(g5.mult_order(), 4);
    }
}
