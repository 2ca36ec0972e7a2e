//! Exact arithmetic in Q_p and its tame quadratic extensions at finite
//! precision.
//!
//! A field descriptor fixes p, the ramification index e, the residue degree f
//! (both in {1,2}) and a digit budget. Elements come in two flavors:
//!
//! * `Exact`: coordinates in the basis {1, W, pi, W*pi} with rational
//!   coefficients, where W^2 is a fixed non-residue and pi^e = p. All ring
//!   operations on exact elements are exact; valuations are certain.
//! * `Window`: a residue-digit expansion known on a half-open pi-adic window
//!   [start, end). These arise from inverses of generic units, Teichmueller
//!   lifts and explicit truncation. Operations propagate the window honestly
//!   and raise `InsufficientPrecision` instead of guessing digits.

use crate::cyclotomic::Cyc;
use crate::fq::Fq;
use crate::matrix::Scalar;
use crate::rat::Rat;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LocalFieldError {
    #[error("insufficient precision: {0}")]
    InsufficientPrecision(String),
    #[error("negative valuation where a p-adic integer is required")]
    NegativeValuation,
    #[error("not a unit (valuation must be zero)")]
    NotAUnit,
    #[error("element of the wrong field: {0}")]
    FieldMismatch(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, LocalFieldError>;

/// Descriptor of Q_p or a tame quadratic extension thereof.
///
/// `precision` is the budget of significant uniformizer digits for inexact
/// results. The residue field is F_{p^f}; q = p^f.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct LocalField {
    pub p: u64,
    pub e: u8,
    pub f: u8,
    pub precision: i64,
    pub nonres: u64,
}

impl LocalField {
    /// Same arithmetic field, ignoring the precision budget.
    pub fn same_field(&self, other: &LocalField) -> bool {
        self.p == other.p && self.e == other.e && self.f == other.f && self.nonres == other.nonres
    }

    pub fn qp(p: u64, precision: i64) -> LocalField {
        assert!(is_prime(p), "p must be prime");
        assert!(precision >= 1);
        LocalField {
            p,
            e: 1,
            f: 1,
            precision,
            nonres: 0,
        }
    }

    /// Unramified quadratic extension Q_p(W), W^2 = least non-residue.
    pub fn unramified_quadratic(p: u64, precision: i64) -> LocalField {
        assert!(is_prime(p) && p > 2);
        LocalField {
            p,
            e: 1,
            f: 2,
            precision,
            nonres: Fq::default_nonres(p),
        }
    }

    /// Ramified quadratic extension Q_p(pi), pi^2 = p (tame since p is odd).
    pub fn ramified_quadratic(p: u64, precision: i64) -> LocalField {
        assert!(is_prime(p) && p > 2);
        LocalField {
            p,
            e: 2,
            f: 1,
            precision,
            nonres: 0,
        }
    }

    /// The biquadratic case e = f = 2.
    pub fn biquadratic(p: u64, precision: i64) -> LocalField {
        assert!(is_prime(p) && p > 2);
        LocalField {
            p,
            e: 2,
            f: 2,
            precision,
            nonres: Fq::default_nonres(p),
        }
    }

    pub fn q(&self) -> u64 {
        if self.f == 1 {
            self.p
        } else {
            self.p * self.p
        }
    }

    pub fn residue_zero(&self) -> Fq {
        if self.f == 1 {
            Fq::prime(self.p, 0)
        } else {
            Fq::ext(self.p, self.nonres, 0, 0)
        }
    }

    /// The base field Q_p with the same digit budget (in p-digits).
    pub fn base(&self) -> LocalField {
        LocalField::qp(self.p, (self.precision / self.e as i64).max(1))
    }

    pub fn zero(&self) -> LocalFieldElement {
        LocalFieldElement::from_int(*self, 0)
    }

    pub fn one(&self) -> LocalFieldElement {
        LocalFieldElement::from_int(*self, 1)
    }

    pub fn int(&self, n: i64) -> LocalFieldElement {
        LocalFieldElement::from_int(*self, n)
    }

    /// The uniformizer pi_E (= p when e = 1).
    pub fn uniformizer(&self) -> LocalFieldElement {
        if self.e == 1 {
            self.int(self.p as i64)
        } else {
            LocalFieldElement::from_coords(*self, [br(0), br(0), br(1), br(0)])
        }
    }

    /// The unramified generator W (only for f = 2).
    pub fn w_gen(&self) -> LocalFieldElement {
        assert_eq!(self.f, 2);
        LocalFieldElement::from_coords(*self, [br(0), br(1), br(0), br(0)])
    }

    pub fn rational(&self, num: i64, den: i64) -> LocalFieldElement {
        LocalFieldElement::from_coords(
            *self,
            [
                BigRational::new(BigInt::from(num), BigInt::from(den)),
                br(0),
                br(0),
                br(0),
            ],
        )
    }
}

fn br(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// p-adic valuation of a rational; None for zero.
fn val_p(q: &BigRational, p: u64) -> Option<i64> {
    if q.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let mut v = 0i64;
    let mut n = q.numer().abs();
    while (&n % &p).is_zero() {
        n /= &p;
        v += 1;
    }
    let mut d = q.denom().abs();
    while (&d % &p).is_zero() {
        d /= &p;
        v -= 1;
    }
    Some(v)
}

#[derive(Clone, PartialEq, Debug)]
enum Repr {
    /// Coordinates in the basis {1, W, pi, W*pi}; unused coordinates are zero.
    Exact([BigRational; 4]),
    /// Digits of pi_E^i for i in [start, start+digits.len()); the element is
    /// known modulo pi_E^end, digits beyond the stored ones are zero up to end.
    Window {
        start: i64,
        digits: Vec<Fq>,
        end: i64,
    },
}

/// An element of a `LocalField` at finite (or exact) precision.
#[derive(Clone, PartialEq, Debug)]
pub struct LocalFieldElement {
    pub field: LocalField,
    repr: Repr,
}

impl LocalFieldElement {
    pub fn from_int(field: LocalField, n: i64) -> Self {
        LocalFieldElement {
            field,
            repr: Repr::Exact([br(n), br(0), br(0), br(0)]),
        }
    }

    pub fn from_coords(field: LocalField, coords: [BigRational; 4]) -> Self {
        if field.f == 1 {
            assert!(coords[1].is_zero() && coords[3].is_zero());
        }
        if field.e == 1 {
            assert!(coords[2].is_zero() && coords[3].is_zero());
        }
        LocalFieldElement {
            field,
            repr: Repr::Exact(coords),
        }
    }

    /// Lift a residue-field element to an exact integer representative.
    pub fn from_residue(field: LocalField, d: Fq) -> Self {
        assert_eq!(d.p, field.p);
        LocalFieldElement::from_coords(
            field,
            [
                br(d.a as i64),
                if field.f == 2 { br(d.b as i64) } else { br(0) },
                br(0),
                br(0),
            ],
        )
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.repr, Repr::Exact(_))
    }

    pub fn exact_coords(&self) -> Option<&[BigRational; 4]> {
        match &self.repr {
            Repr::Exact(c) => Some(c),
            _ => None,
        }
    }

    /// Number of significant digits (None when exact).
    pub fn precision_digits(&self) -> Option<i64> {
        match &self.repr {
            Repr::Exact(_) => None,
            Repr::Window { start, end, digits } => {
                if digits.is_empty() {
                    Some(0)
                } else {
                    Some(end - start)
                }
            }
        }
    }

    pub fn is_exact_zero(&self) -> bool {
        match &self.repr {
            Repr::Exact(c) => c.iter().all(|x| x.is_zero()),
            _ => false,
        }
    }

    /// Valuation in pi_E units: Ok(None) means infinity (exact zero).
    fn val_e(&self) -> Result<Option<i64>> {
        match &self.repr {
            Repr::Exact(c) => {
                let p = self.field.p;
                let mut best: Option<i64> = None;
                for (i, coord) in c.iter().enumerate() {
                    if let Some(v) = val_p(coord, p) {
                        let shift = if i >= 2 { 1 } else { 0 };
                        let ve = v * self.field.e as i64 + shift;
                        best = Some(best.map_or(ve, |b: i64| b.min(ve)));
                    }
                }
                Ok(best)
            }
            Repr::Window { start, digits, end } => {
                if digits.is_empty() {
                    return Err(LocalFieldError::InsufficientPrecision(format!(
                        "element is zero to precision pi^{end}; valuation only bounded below"
                    )));
                }
                let _ = end;
                Ok(Some(*start))
            }
        }
    }

    /// Valuation normalized so val(pi_F) = 1; None encodes infinity.
    pub fn val(&self) -> Result<Option<Rat>> {
        Ok(self.val_e()?.map(|v| Rat::new(v, self.field.e as i64)))
    }

    /// Certified lower bound on the valuation in pi_E units (always succeeds).
    pub fn val_e_lower_bound(&self) -> i64 {
        match &self.repr {
            Repr::Exact(c) => {
                let p = self.field.p;
                let mut best: Option<i64> = None;
                for (i, coord) in c.iter().enumerate() {
                    if let Some(v) = val_p(coord, p) {
                        let shift = if i >= 2 { 1 } else { 0 };
                        let ve = v * self.field.e as i64 + shift;
                        best = Some(best.map_or(ve, |b: i64| b.min(ve)));
                    }
                }
                best.unwrap_or(i64::MAX)
            }
            Repr::Window { start, digits, end } => {
                if digits.is_empty() {
                    *end
                } else {
                    *start
                }
            }
        }
    }

    /// Can we certify val >= t (t in pi_E units)?
    pub fn certify_val_at_least(&self, t: i64) -> Result<bool> {
        let lb = self.val_e_lower_bound();
        if lb >= t {
            return Ok(true);
        }
        match &self.repr {
            Repr::Exact(_) => Ok(false),
            Repr::Window { digits, .. } => {
                if digits.is_empty() {
                    // zero to end < t: cannot decide.
                    Err(LocalFieldError::InsufficientPrecision(format!(
                        "cannot resolve valuation >= {t} at current window"
                    )))
                } else {
                    Ok(false)
                }
            }
        }
    }

    fn window_end(&self) -> Option<i64> {
        match &self.repr {
            Repr::Exact(_) => None,
            Repr::Window { end, .. } => Some(*end),
        }
    }

    /// Expand to digit form on [from, to). Exact elements expand exactly.
    fn digits_on(&self, from: i64, to: i64) -> Result<Vec<Fq>> {
        match &self.repr {
            Repr::Window { start, digits, end } => {
                if to > *end {
                    return Err(LocalFieldError::InsufficientPrecision(format!(
                        "window ends at pi^{end}, digits requested to pi^{to}"
                    )));
                }
                let mut out = Vec::with_capacity((to - from).max(0) as usize);
                for i in from..to {
                    let idx = i - start;
                    if idx < 0 || idx as usize >= digits.len() {
                        out.push(self.field.residue_zero());
                    } else {
                        out.push(digits[idx as usize]);
                    }
                }
                Ok(out)
            }
            Repr::Exact(_) => {
                let mut out = Vec::with_capacity((to - from).max(0) as usize);
                let pi = self.field.uniformizer();
                // shift so that the cursor sits at pi^from
                let mut cur = self.clone();
                if from > 0 {
                    for _ in 0..from {
                        cur = cur.div_exact_by_pi();
                    }
                } else {
                    for _ in 0..(-from) {
                        cur = cur.mul_ref(&pi);
                    }
                }
                for _ in from..to {
                    let d = cur.residue_of_integral()?;
                    out.push(d);
                    cur = cur.sub_ref(&Self::lift_digit(self.field, d));
                    cur = cur.div_exact_by_pi();
                }
                Ok(out)
            }
        }
    }

    fn lift_digit(field: LocalField, d: Fq) -> LocalFieldElement {
        LocalFieldElement::from_coords(
            field,
            [
                br(d.a as i64),
                if field.f == 2 { br(d.b as i64) } else { br(0) },
                br(0),
                br(0),
            ],
        )
    }

    /// Exact division by pi (valuation may go negative).
    fn div_exact_by_pi(&self) -> LocalFieldElement {
        let c = match &self.repr {
            Repr::Exact(c) => c,
            _ => panic!("div_exact_by_pi on window"),
        };
        let p = br(self.field.p as i64);
        let coords = if self.field.e == 1 {
            [&c[0] / &p, &c[1] / &p, br(0), br(0)]
        } else {
            // (x + yW + z pi + t W pi)/pi = z + tW + (x/p) pi + (y/p) W pi
            [c[2].clone(), c[3].clone(), &c[0] / &p, &c[1] / &p]
        };
        LocalFieldElement {
            field: self.field,
            repr: Repr::Exact(coords),
        }
    }

    /// Residue of an exact element with val >= 0 (image in F_q).
    fn residue_of_integral(&self) -> Result<Fq> {
        match &self.repr {
            Repr::Exact(c) => {
                let p = self.field.p;
                for (i, coord) in c.iter().enumerate() {
                    if i >= 2 {
                        // pi-coordinates: need val >= 0, i.e. val_p >= 0
                        if let Some(v) = val_p(coord, p) {
                            if v < 0 {
                                return Err(LocalFieldError::NegativeValuation);
                            }
                        }
                    }
                }
                let a = rational_mod_p(&c[0], p)?;
                let b = if self.field.f == 2 {
                    rational_mod_p(&c[1], p)?
                } else {
                    0
                };
                Ok(if self.field.f == 1 {
                    Fq::prime(p, a as i64)
                } else {
                    Fq::ext(p, self.field.nonres, a as i64, b as i64)
                })
            }
            _ => panic!("residue_of_integral on window"),
        }
    }

    /// The residue map O -> F_q. Errors on negative valuation.
    pub fn residue(&self) -> Result<Fq> {
        match &self.repr {
            Repr::Exact(_) => {
                if self.val_e_lower_bound() < 0 && !self.is_exact_zero() {
                    if self.val_e()?.map_or(false, |v| v < 0) {
                        return Err(LocalFieldError::NegativeValuation);
                    }
                }
                self.residue_of_integral()
            }
            Repr::Window { start, digits, end } => {
                if !digits.is_empty() && *start < 0 {
                    return Err(LocalFieldError::NegativeValuation);
                }
                if *end < 1 {
                    return Err(LocalFieldError::InsufficientPrecision(
                        "window does not resolve the residue digit".into(),
                    ));
                }
                let d = self.digits_on(0, 1)?;
                Ok(d[0])
            }
        }
    }

    fn check_field(&self, o: &Self) {
        assert!(
            self.field.same_field(&o.field),
            "field mismatch: {:?} vs {:?}",
            self.field,
            o.field
        );
    }

    pub fn add_ref(&self, o: &Self) -> Self {
        self.check_field(o);
        match (&self.repr, &o.repr) {
            (Repr::Exact(a), Repr::Exact(b)) => {
                let coords = [&a[0] + &b[0], &a[1] + &b[1], &a[2] + &b[2], &a[3] + &b[3]];
                LocalFieldElement {
                    field: self.field,
                    repr: Repr::Exact(coords),
                }
            }
            _ => {
                let end = match (self.window_end(), o.window_end()) {
                    (Some(a), Some(b)) => a.min(b),
                    (Some(a), None) => a,
                    (None, Some(b)) => b,
                    (None, None) => unreachable!(),
                };
                let start = self.val_e_lower_bound().min(o.val_e_lower_bound()).min(end);
                let da = self
                    .digits_on(start, end)
                    .expect("window covers requested range");
                let db = o
                    .digits_on(start, end)
                    .expect("window covers requested range");
                let coeffs: Vec<(i64, i64)> = da
                    .iter()
                    .zip(&db)
                    .map(|(x, y)| (x.a as i64 + y.a as i64, x.b as i64 + y.b as i64))
                    .collect();
                Self::from_raw_window(self.field, start, coeffs, end)
            }
        }
    }

    pub fn neg_ref(&self) -> Self {
        match &self.repr {
            Repr::Exact(c) => LocalFieldElement {
                field: self.field,
                repr: Repr::Exact([-&c[0], -&c[1], -&c[2], -&c[3]]),
            },
            Repr::Window { start, digits, end } => {
                let coeffs: Vec<(i64, i64)> = digits
                    .iter()
                    .map(|d| (-(d.a as i64), -(d.b as i64)))
                    .collect();
                Self::from_raw_window(self.field, *start, coeffs, *end)
            }
        }
    }

    pub fn sub_ref(&self, o: &Self) -> Self {
        self.add_ref(&o.neg_ref())
    }

    pub fn mul_ref(&self, o: &Self) -> Self {
        self.check_field(o);
        match (&self.repr, &o.repr) {
            (Repr::Exact(a), Repr::Exact(b)) => {
                let n = br(self.field.nonres as i64);
                let p = br(self.field.p as i64);
                // (a0 + a1 W + a2 pi + a3 W pi)(b0 + ...) with W^2 = n, pi^2 = p.
                let w2 = &n;
                let pi2 = &p;
                let mut c = [br(0), br(0), br(0), br(0)];
                // basis multiplication table index: 0 = 1, 1 = W, 2 = pi, 3 = W pi
                for i in 0..4 {
                    if a[i].is_zero() {
                        continue;
                    }
                    for j in 0..4 {
                        if b[j].is_zero() {
                            continue;
                        }
                        let prod = &a[i] * &b[j];
                        let (idx, scale) = match (i, j) {
                            (0, k) | (k, 0) => (k, br(1)),
                            (1, 1) => (0, w2.clone()),
                            (1, 2) | (2, 1) => (3, br(1)),
                            (1, 3) | (3, 1) => (2, w2.clone()),
                            (2, 2) => (0, pi2.clone()),
                            (2, 3) | (3, 2) => (1, pi2.clone()),
                            (3, 3) => (0, w2 * pi2),
                            _ => unreachable!(),
                        };
                        c[idx] += prod * scale;
                    }
                }
                LocalFieldElement {
                    field: self.field,
                    repr: Repr::Exact(c),
                }
            }
            _ => {
                if self.is_exact_zero() || o.is_exact_zero() {
                    return self.field.zero();
                }
                let va = self.val_e_lower_bound();
                let vb = o.val_e_lower_bound();
                let end = match (self.window_end(), o.window_end()) {
                    (Some(ea), Some(eb)) => (ea + vb).min(eb + va),
                    (Some(ea), None) => ea + vb,
                    (None, Some(eb)) => eb + va,
                    (None, None) => unreachable!(),
                };
                if va == i64::MAX || vb == i64::MAX {
                    return self.field.zero();
                }
                let da = self.digits_on(va, (end - vb).max(va)).expect("window");
                let db = o.digits_on(vb, (end - va).max(vb)).expect("window");
                let mut coeffs = vec![(0i64, 0i64); da.len() + db.len()];
                let nres = self.field.nonres as i64;
                for (i, x) in da.iter().enumerate() {
                    if x.is_zero() {
                        continue;
                    }
                    for (j, y) in db.iter().enumerate() {
                        if y.is_zero() {
                            continue;
                        }
                        let (xa, xb) = (x.a as i64, x.b as i64);
                        let (ya, yb) = (y.a as i64, y.b as i64);
                        coeffs[i + j].0 += xa * ya + xb * yb * nres;
                        coeffs[i + j].1 += xa * yb + xb * ya;
                    }
                }
                Self::from_raw_window(self.field, va + vb, coeffs, end)
            }
        }
    }

    /// Normalize raw integer pi_E-coefficients (carry stride e) into digits,
    /// truncating at `end`.
    fn from_raw_window(field: LocalField, start: i64, coeffs: Vec<(i64, i64)>, end: i64) -> Self {
        let p = field.p as i64;
        let e = field.e as i64;
        let len = ((end - start).max(0)) as usize;
        let mut buf: Vec<(i64, i64)> = coeffs;
        buf.resize(buf.len().max(len), (0, 0));
        let mut digits: Vec<Fq> = Vec::with_capacity(len);
        for i in 0..buf.len() {
            let (x, y) = buf[i];
            let a = x.rem_euclid(p);
            let b = y.rem_euclid(p);
            let cx = (x - a) / p;
            let cy = (y - b) / p;
            if cx != 0 || cy != 0 {
                let carry_idx = i + e as usize;
                if carry_idx < buf.len() {
                    buf[carry_idx].0 += cx;
                    buf[carry_idx].1 += cy;
                } else if (carry_idx as i64) < end - start {
                    buf.resize(carry_idx + 1, (0, 0));
                    buf[carry_idx].0 += cx;
                    buf[carry_idx].1 += cy;
                }
            }
            if (i as i64) < end - start {
                digits.push(if field.f == 1 {
                    Fq::prime(field.p, a)
                } else {
                    Fq::ext(field.p, field.nonres, a, b)
                });
            }
        }
        digits.truncate(len);
        // trim leading zeros, adjusting start
        let lead = digits.iter().position(|d| !d.is_zero());
        let (start, digits) = match lead {
            Some(k) => (start + k as i64, digits[k..].to_vec()),
            None => (end, Vec::new()),
        };
        // trim trailing zeros (end still records the knowledge horizon)
        let mut digits = digits;
        while digits.last().map_or(false, |d| d.is_zero()) {
            digits.pop();
        }
        LocalFieldElement {
            field,
            repr: Repr::Window { start, digits, end },
        }
    }

    /// Truncate to a window mod pi_E^end (makes the element inexact).
    pub fn truncate(&self, end: i64) -> Self {
        let start = self.val_e_lower_bound().min(end);
        if start == i64::MAX {
            return Self {
                field: self.field,
                repr: Repr::Window {
                    start: end,
                    digits: vec![],
                    end,
                },
            };
        }
        let digits = self
            .digits_on(start, end.min(self.window_end().unwrap_or(end)))
            .expect("truncation window within knowledge");
        let coeffs = digits.iter().map(|d| (d.a as i64, d.b as i64)).collect();
        Self::from_raw_window(
            self.field,
            start,
            coeffs,
            end.min(self.window_end().unwrap_or(end)),
        )
    }

    /// The digits below pi_E^end of an exact element, reassembled as an
    /// exact element (a finite digit sum). None for window inputs.
    pub fn truncation_as_exact(&self, end: i64) -> Option<Self> {
        if !self.is_exact() {
            return None;
        }
        if self.is_exact_zero() {
            return Some(self.clone());
        }
        let start = self.val_e_lower_bound();
        if start >= end {
            return Some(self.field.zero());
        }
        let digits = self.digits_on(start, end).ok()?;
        let mut acc = self.field.zero();
        for (i, d) in digits.iter().enumerate() {
            if !d.is_zero() {
                let lifted = Self::lift_digit(self.field, *d);
                acc = acc.add_ref(&lifted.shift_pi(start + i as i64));
            }
        }
        Some(acc)
    }

    /// Multiplicative inverse. Exact elements invert exactly; windows invert
    /// to the field's precision budget past their leading digit.
    pub fn inv(&self) -> Result<Self> {
        match &self.repr {
            Repr::Exact(c) => {
                if self.is_exact_zero() {
                    return Err(LocalFieldError::NotAUnit);
                }
                // Multiply by the conjugates to reach a rational norm.
                let mut conjugates = vec![];
                if self.field.f == 2 {
                    conjugates.push(self.galois_w());
                }
                if self.field.e == 2 {
                    conjugates.push(self.galois_pi());
                }
                if self.field.e == 2 && self.field.f == 2 {
                    conjugates.push(self.galois_w().galois_pi());
                }
                let mut prod = LocalFieldElement {
                    field: self.field,
                    repr: Repr::Exact([br(1), br(0), br(0), br(0)]),
                };
                for g in &conjugates {
                    prod = prod.mul_ref(g);
                }
                let norm = self.mul_ref(&prod);
                let ncoords = match &norm.repr {
                    Repr::Exact(c2) => c2.clone(),
                    _ => unreachable!(),
                };
                assert!(
                    ncoords[1].is_zero() && ncoords[2].is_zero() && ncoords[3].is_zero(),
                    "norm must be rational"
                );
                let ninv = ncoords[0].recip();
                let _ = c;
                Ok(prod.scale_rational(&ninv))
            }
            Repr::Window { start, digits, .. } => {
                if digits.is_empty() {
                    return Err(LocalFieldError::InsufficientPrecision(
                        "cannot invert an unresolved zero".into(),
                    ));
                }
                let v = *start;
                let know = self.precision_digits().unwrap_or(self.field.precision);
                let k = know.min(self.field.precision).max(1);
                // Newton iteration for the inverse of the unit part.
                let unit = self.shift_pi(-v).truncate(k);
                let d0 = unit.digits_on(0, 1)?[0];
                let mut inv = LocalFieldElement {
                    field: self.field,
                    repr: Repr::Window {
                        start: 0,
                        digits: vec![d0.inv().expect("leading digit nonzero")],
                        end: k,
                    },
                };
                let two = self.field.int(2).truncate(k);
                for _ in 0..(64 - (k as u64).leading_zeros() + 2) {
                    // inv <- inv * (2 - unit * inv), truncated
                    let t = two.sub_ref(&unit.mul_ref(&inv));
                    inv = inv.mul_ref(&t).truncate(k);
                }
                Ok(inv.shift_pi(-v))
            }
        }
    }

    fn scale_rational(&self, q: &BigRational) -> Self {
        match &self.repr {
            Repr::Exact(c) => LocalFieldElement {
                field: self.field,
                repr: Repr::Exact([&c[0] * q, &c[1] * q, &c[2] * q, &c[3] * q]),
            },
            _ => panic!("scale_rational on window"),
        }
    }

    /// Multiply by pi_E^k (exactly, shifting windows).
    pub fn shift_pi(&self, k: i64) -> Self {
        match &self.repr {
            Repr::Exact(_) => {
                let mut cur = self.clone();
                if k >= 0 {
                    let pi = self.field.uniformizer();
                    for _ in 0..k {
                        cur = cur.mul_ref(&pi);
                    }
                } else {
                    for _ in 0..(-k) {
                        cur = cur.div_exact_by_pi();
                    }
                }
                cur
            }
            Repr::Window { start, digits, end } => LocalFieldElement {
                field: self.field,
                repr: Repr::Window {
                    start: start + k,
                    digits: digits.clone(),
                    end: end + k,
                },
            },
        }
    }

    /// Galois conjugation W -> -W (identity when f = 1).
    pub fn galois_w(&self) -> Self {
        match &self.repr {
            Repr::Exact(c) => LocalFieldElement {
                field: self.field,
                repr: Repr::Exact([c[0].clone(), -&c[1], c[2].clone(), -&c[3]]),
            },
            Repr::Window { start, digits, end } => {
                let coeffs = digits.iter().map(|d| (d.a as i64, -(d.b as i64))).collect();
                Self::from_raw_window(self.field, *start, coeffs, *end)
            }
        }
    }

    /// Galois conjugation pi -> -pi (identity when e = 1).
    pub fn galois_pi(&self) -> Self {
        match &self.repr {
            Repr::Exact(c) => LocalFieldElement {
                field: self.field,
                repr: Repr::Exact([c[0].clone(), c[1].clone(), -&c[2], -&c[3]]),
            },
            Repr::Window { start, digits, end } => {
                let coeffs = digits
                    .iter()
                    .enumerate()
                    .map(|(i, d)| {
                        let sign = if (start + i as i64).rem_euclid(2) == 1 {
                            -1
                        } else {
                            1
                        };
                        (sign * d.a as i64, sign * d.b as i64)
                    })
                    .collect();
                Self::from_raw_window(self.field, *start, coeffs, *end)
            }
        }
    }

    /// The full Galois conjugate over Q_p for quadratic extensions.
    pub fn conjugate(&self) -> Self {
        if self.field.f == 2 && self.field.e == 1 {
            self.galois_w()
        } else if self.field.e == 2 && self.field.f == 1 {
            self.galois_pi()
        } else if self.field.e == 2 && self.field.f == 2 {
            self.galois_w().galois_pi()
        } else {
            self.clone()
        }
    }

    /// Norm to Q_p for quadratic extensions (degree-4 fields not supported).
    pub fn norm_to_base(&self) -> Self {
        assert!(
            (self.field.e as u32 * self.field.f as u32) <= 2,
            "norm_to_base only for quadratic extensions"
        );
        let prod = self.mul_ref(&self.conjugate());
        prod.retract_to_base()
    }

    /// Trace to Q_p.
    pub fn trace_to_base(&self) -> Self {
        let mut t = self.clone();
        if self.field.f == 2 {
            t = t.add_ref(&t.galois_w());
        }
        if self.field.e == 2 {
            t = t.add_ref(&t.galois_pi());
        }
        t.retract_to_base()
    }

    /// Reinterpret an element with zero W/pi parts as an element of Q_p.
    pub fn retract_to_base(&self) -> Self {
        let base = self.field.base();
        match &self.repr {
            Repr::Exact(c) => {
                assert!(c[1].is_zero() && c[2].is_zero() && c[3].is_zero());
                LocalFieldElement::from_coords(base, [c[0].clone(), br(0), br(0), br(0)])
            }
            Repr::Window { start, digits, end } => {
                let e = self.field.e as i64;
                // keep only stride-e positions; they must carry no W part
                let mut out_digits = Vec::new();
                let mut out_start = None;
                for (i, d) in digits.iter().enumerate() {
                    let pos = start + i as i64;
                    if pos.rem_euclid(e) != 0 {
                        assert!(d.is_zero(), "element does not lie in the base field");
                        continue;
                    }
                    assert!(d.b == 0, "element does not lie in the base field");
                    if out_start.is_none() && !d.is_zero() {
                        out_start = Some(pos / e);
                    }
                    if out_start.is_some() {
                        out_digits.push(Fq::prime(self.field.p, d.a as i64));
                    }
                }
                let new_end = end.div_euclid(e);
                match out_start {
                    Some(s) => LocalFieldElement {
                        field: base,
                        repr: Repr::Window {
                            start: s,
                            digits: out_digits,
                            end: new_end,
                        },
                    },
                    None => LocalFieldElement {
                        field: base,
                        repr: Repr::Window {
                            start: new_end,
                            digits: vec![],
                            end: new_end,
                        },
                    },
                }
            }
        }
    }

    /// Integer power.
    pub fn pow(&self, mut k: u64) -> Self {
        let mut acc = self.field.one();
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul_ref(&base);
            }
            base = base.mul_ref(&base);
            k >>= 1;
        }
        acc
    }

    /// Power with truncation at pi^end after every step (for iteration loops).
    pub fn pow_mod(&self, mut k: u64, end: i64) -> Self {
        let mut acc = self.field.one().truncate(end);
        let mut base = self.truncate(end);
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul_ref(&base).truncate(end);
            }
            base = base.mul_ref(&base).truncate(end);
            k >>= 1;
        }
        acc
    }

    /// Congruence test: val(self - other) >= t (t in pi_E units).
    pub fn eq_mod(&self, other: &Self, t: i64) -> Result<bool> {
        self.sub_ref(other).certify_val_at_least(t)
    }

    /// Structural equality of exact elements; windows compare digits on the
    /// common knowledge window.
    pub fn eq_exact(&self, other: &Self) -> bool {
        match (&self.repr, &other.repr) {
            (Repr::Exact(a), Repr::Exact(b)) => a == b,
            _ => false,
        }
    }

    /// Numerical rendering for diagnostics (base-field part only).
    pub fn describe(&self) -> String {
        format!("{self}")
    }
}

impl fmt::Display for LocalFieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Exact(c) => {
                if self.is_exact_zero() {
                    return write!(f, "0");
                }
                let names = ["", "W", "pi", "W*pi"];
                let mut first = true;
                for (i, coord) in c.iter().enumerate() {
                    if coord.is_zero() {
                        continue;
                    }
                    if !first {
                        write!(f, " + ")?;
                    }
                    first = false;
                    if names[i].is_empty() {
                        write!(f, "{coord}")?;
                    } else if coord.is_one() {
                        write!(f, "{}", names[i])?;
                    } else {
                        write!(f, "{}*{}", coord, names[i])?;
                    }
                }
                Ok(())
            }
            Repr::Window { start, digits, end } => {
                if digits.is_empty() {
                    return write!(f, "O(pi^{end})");
                }
                let mut first = true;
                for (i, d) in digits.iter().enumerate() {
                    if d.is_zero() {
                        continue;
                    }
                    if !first {
                        write!(f, " + ")?;
                    }
                    first = false;
                    write!(f, "({})*pi^{}", d, start + i as i64)?;
                }
                write!(f, " + O(pi^{end})")
            }
        }
    }
}

fn val_p_int(k: i64, p: u64) -> i64 {
    let mut v = 0;
    let mut k = k.unsigned_abs();
    while k % p == 0 {
        k /= p;
        v += 1;
    }
    v
}

fn rational_mod_p(q: &BigRational, p: u64) -> Result<u64> {
    let pb = BigInt::from(p);
    let denom = q.denom();
    if (denom % &pb).is_zero() {
        return Err(LocalFieldError::NegativeValuation);
    }
    let num = q.numer().mod_floor(&pb).to_u64().unwrap();
    let den = denom.mod_floor(&pb).to_u64().unwrap();
    // den is invertible mod p
    let dinv = Fq::prime(p, den as i64).inv().unwrap().a;
    Ok(num * dinv % p)
}

impl Scalar for LocalFieldElement {
    fn zero_like(&self) -> Self {
        self.field.zero()
    }
    fn one_like(&self) -> Self {
        self.field.one()
    }
    fn s_add(&self, o: &Self) -> Self {
        self.add_ref(o)
    }
    fn s_neg(&self) -> Self {
        self.neg_ref()
    }
    fn s_mul(&self, o: &Self) -> Self {
        self.mul_ref(o)
    }
    fn s_inv(&self) -> Option<Self> {
        self.inv().ok()
    }
    fn s_is_zero(&self) -> bool {
        self.is_exact_zero()
    }
}

/// The Teichmueller (prime-to-p) part of a unit: the fixed point of x -> x^q,
/// computed mod pi_E^k.
pub fn teichmuller_part(gamma: &LocalFieldElement, k: i64) -> Result<LocalFieldElement> {
    let v = gamma.val()?;
    if v != Some(Rat::new(0, 1)) {
        return Err(LocalFieldError::NotAUnit);
    }
    let q = gamma.field.q();
    let mut cur = gamma.truncate(k);
    for _ in 0..(k + 2) {
        let next = cur.pow_mod(q, k);
        if next.sub_ref(&cur).certify_val_at_least(k).unwrap_or(true) {
            return Ok(next);
        }
        cur = next;
    }
    Ok(cur)
}

/// The default additive character: trivial on pi*O, nontrivial on O.
///
/// On Q_p it is x -> zeta_{p^{1-v}}^{m(x)} where m(x) collects the digits of
/// x at exponents <= 0 (so phi(x) = exp(2 pi i x_0 / p) for x in O). On
/// extensions it is phi composed with the trace to Q_p.
#[derive(Clone, Copy, Debug)]
pub struct AdditiveCharacter {
    pub field: LocalField,
}

impl AdditiveCharacter {
    pub fn new(field: LocalField) -> Self {
        AdditiveCharacter { field }
    }

    pub fn eval(&self, x: &LocalFieldElement) -> Result<Cyc> {
        assert!(
            x.field.same_field(&self.field),
            "character evaluated on the wrong field"
        );
        let y = if self.field.e == 1 && self.field.f == 1 {
            x.clone()
        } else {
            x.trace_to_base()
        };
        let base = y.field;
        if y.is_exact_zero() {
            return Ok(Cyc::one());
        }
        // trivial on p*O
        if y.certify_val_at_least(1).unwrap_or(false) {
            return Ok(Cyc::one());
        }
        let v = match y.val()? {
            None => return Ok(Cyc::one()),
            Some(v) => v.to_integer(),
        };
        if v >= 1 {
            return Ok(Cyc::one());
        }
        let digits = y.digits_on(v.min(0), 1).map_err(|_| {
            LocalFieldError::InsufficientPrecision(
                "additive character needs all digits up to exponent 0".into(),
            )
        })?;
        let p = base.p;
        let k = (-v.min(0)) as u32;
        let mut m: i64 = 0;
        let mut pw: i64 = 1;
        for d in digits.iter() {
            m += d.a as i64 * pw;
            pw *= p as i64;
        }
        let order = (p as i64).pow(k + 1) as u64;
        Ok(Cyc::zeta(order, m))
    }
}

/// Canonical compact rendering of simple exact elements: rationals,
/// `pi^k`, `w`, and products `c*w*pi^k`; falls back to the coordinate form
/// `coeffs:c0,c1,c2,c3`.
pub fn render_element(x: &LocalFieldElement) -> String {
    if let Some(c) = x.exact_coords() {
        let nonzero: Vec<usize> = (0..4).filter(|&i| !c[i].is_zero()).collect();
        let fmt_q = |q: &BigRational| -> String {
            if q.denom() == &BigInt::from(1) {
                format!("{}", q.numer())
            } else {
                format!("{}/{}", q.numer(), q.denom())
            }
        };
        if nonzero.is_empty() {
            return "0".into();
        }
        if nonzero.len() == 1 {
            let i = nonzero[0];
            // factor the maximal p-power into a pi-exponent
            let p = BigInt::from(x.field.p);
            let mut unit = c[i].clone();
            let mut k: i64 = 0;
            while (unit.numer() % &p).is_zero() {
                unit /= BigRational::from_integer(p.clone());
                k += 1;
            }
            while (unit.denom() % &p).is_zero() {
                unit *= BigRational::from_integer(p.clone());
                k -= 1;
            }
            let pi_deg = match i {
                2 | 3 => 1,
                _ => 0,
            };
            let m = k * x.field.e as i64 + pi_deg;
            let w_part = i == 1 || i == 3;
            let mut parts: Vec<String> = Vec::new();
            if !unit.is_one() || (!w_part && m == 0) {
                parts.push(fmt_q(&unit));
            }
            if w_part {
                parts.push("w".into());
            }
            if m != 0 {
                parts.push(if m == 1 {
                    "pi".into()
                } else {
                    format!("pi^{m}")
                });
            }
            return parts.join("*");
        }
    }
    let c = x.exact_coords();
    match c {
        Some(c) => format!("coeffs:{},{},{},{}", c[0], c[1], c[2], c[3]),
        None => format!("{x}"),
    }
}

/// Parse the CLI literal syntax: `p^k*u` with integer u, plain integers,
/// rationals `a/b`, extension elements `a+b*s` with `s` the adjoined square
/// root, products of factors `c*w*pi^k`, and the coordinate form
/// `coeffs:c0,c1,c2,c3`.
pub fn parse_element(field: LocalField, s: &str) -> Result<LocalFieldElement> {
    let s_trim = s.trim();
    if let Some(rest) = s_trim.strip_prefix("coeffs:") {
        let parts: Vec<&str> = rest.split(',').collect();
        if parts.len() != 4 {
            return Err(LocalFieldError::Parse(s_trim.into()));
        }
        let mut coords = [br(0), br(0), br(0), br(0)];
        for (i, p) in parts.iter().enumerate() {
            coords[i] = parse_bigrational(p).ok_or_else(|| LocalFieldError::Parse((*p).into()))?;
        }
        return Ok(LocalFieldElement::from_coords(field, coords));
    }
    // product grammar: factors separated by '*', each factor one of
    // int, int/int, p^k, pi^k, w^k, s^k
    if !s_trim.contains('+') && !s_trim[1..].contains('-')
        || s_trim.contains("pi")
        || s_trim.contains('w')
    {
        if let Ok(v) = parse_product(field, s_trim) {
            return Ok(v);
        }
    }
    parse_element_legacy(field, s_trim)
}

fn parse_bigrational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        Some(BigRational::new(n, d))
    } else {
        let n: BigInt = s.parse().ok()?;
        Some(BigRational::from_integer(n))
    }
}

fn parse_product(field: LocalField, s: &str) -> Result<LocalFieldElement> {
    let mut acc = field.one();
    for factor in s.split('*') {
        let factor = factor.trim();
        let (base, exp): (&str, i64) = match factor.split_once('^') {
            Some((b, e)) => (
                b.trim(),
                e.trim()
                    .parse()
                    .map_err(|_| LocalFieldError::Parse(factor.into()))?,
            ),
            None => (factor, 1),
        };
        let val = match base {
            "pi" => field.uniformizer(),
            "w" => {
                if field.f != 2 {
                    return Err(LocalFieldError::Parse(
                        "w in a residue-degree-1 field".into(),
                    ));
                }
                field.w_gen()
            }
            "s" => {
                if field.f == 2 {
                    field.w_gen()
                } else {
                    field.uniformizer()
                }
            }
            _ => {
                let q =
                    parse_bigrational(base).ok_or_else(|| LocalFieldError::Parse(base.into()))?;
                LocalFieldElement::from_coords(field, [q, br(0), br(0), br(0)])
            }
        };
        acc = acc.mul_ref(&val.pow_signed(exp));
    }
    Ok(acc)
}

fn parse_element_legacy(field: LocalField, s: &str) -> Result<LocalFieldElement> {
    let s = s.trim();
    let parse_simple = |t: &str| -> Result<LocalFieldElement> {
        let t = t.trim();
        if let Some((base, rest)) = t.split_once('^') {
            let b: i64 = base
                .trim()
                .parse()
                .map_err(|_| LocalFieldError::Parse(format!("bad base in {t}")))?;
            if b != field.p as i64 {
                return Err(LocalFieldError::Parse(format!(
                    "uniformizer power must use p = {}",
                    field.p
                )));
            }
            let (kstr, ustr) = match rest.split_once('*') {
                Some((k, u)) => (k, Some(u)),
                None => (rest, None),
            };
            let k: i64 = kstr
                .trim()
                .parse()
                .map_err(|_| LocalFieldError::Parse(format!("bad exponent in {t}")))?;
            let u: i64 = match ustr {
                Some(u) => u
                    .trim()
                    .parse()
                    .map_err(|_| LocalFieldError::Parse(format!("bad unit in {t}")))?,
                None => 1,
            };
            let shift = field.int(field.p as i64).pow_signed(k);
            Ok(shift.mul_ref(&field.int(u)))
        } else if let Some((a, b)) = t.split_once('/') {
            let a: i64 = a
                .trim()
                .parse()
                .map_err(|_| LocalFieldError::Parse(t.into()))?;
            let b: i64 = b
                .trim()
                .parse()
                .map_err(|_| LocalFieldError::Parse(t.into()))?;
            Ok(field.rational(a, b))
        } else {
            let n: i64 = t.parse().map_err(|_| LocalFieldError::Parse(t.into()))?;
            Ok(field.int(n))
        }
    };
    // extension syntax a+b*s / a-b*s
    if let Some(idx) = s[1..].find(['+', '-']).map(|i| i + 1) {
        if s.contains("*s") || s.ends_with('s') {
            let (a_part, rest) = s.split_at(idx);
            let sign = if rest.starts_with('-') { -1 } else { 1 };
            let b_part = rest[1..].trim();
            let b_val = if let Some(stripped) = b_part.strip_suffix("*s") {
                parse_simple(stripped)?
            } else if b_part == "s" {
                field.one()
            } else {
                return Err(LocalFieldError::Parse(s.into()));
            };
            let root = if field.f == 2 {
                field.w_gen()
            } else {
                field.uniformizer()
            };
            let a = parse_simple(a_part)?;
            let signed = if sign < 0 { b_val.neg_ref() } else { b_val };
            return Ok(a.add_ref(&signed.mul_ref(&root)));
        }
    }
    parse_simple(s)
}

impl LocalFieldElement {
    /// p-adic logarithm of a 1-unit, computed mod pi_E^window: requires
    /// val(self - 1) > 0. The series sum (-1)^{k+1} y^k / k terminates once
    /// val(y^k/k) reaches the window (p odd keeps every term integral here).
    pub fn log_1unit(&self, window: i64) -> Result<Self> {
        let one = self.field.one();
        let y = self.sub_ref(&one);
        if y.is_exact_zero() {
            return Ok(self.field.zero().truncate(window));
        }
        let vy = y.val_e_lower_bound();
        if vy < 1 {
            if !y.certify_val_at_least(1)? {
                return Err(LocalFieldError::NotAUnit);
            }
        }
        let vy = vy.max(1);
        let e = self.field.e as i64;
        let mut acc = self.field.zero().truncate(window);
        let mut k = 1i64;
        loop {
            let term_val = k * vy - e * val_p_int(k, self.field.p);
            if term_val >= window {
                break;
            }
            let yk = y
                .pow(k as u64)
                .truncate(window + e * val_p_int(k, self.field.p));
            let coeff = self.field.rational(if k % 2 == 1 { 1 } else { -1 }, k);
            acc = acc.add_ref(&yk.mul_ref(&coeff)).truncate(window);
            k += 1;
        }
        Ok(acc)
    }

    pub fn pow_signed(&self, k: i64) -> Self {
        if k >= 0 {
            self.pow(k as u64)
        } else {
            self.inv().expect("invertible").pow((-k) as u64)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    #[test]
    fn valuations() {
        let f = LocalField::qp(7, 5);
        assert_eq!(f.int(7).val().unwrap(), Some(rat(1, 1)));
        assert_eq!(f.rational(1, 49).val().unwrap(), Some(rat(-2, 1)));
        assert_eq!(f.int(0).val().unwrap(), None);
        let e = LocalField::ramified_quadratic(7, 6);
        assert_eq!(e.uniformizer().val().unwrap(), Some(rat(1, 2)));
        assert_eq!(e.uniformizer().pow(2).val().unwrap(), Some(rat(1, 1)));
    }

    #[test]
    fn residues() {
        let f = LocalField::qp(7, 5);
        assert_eq!(f.int(10).residue().unwrap(), Fq::prime(7, 3));
        assert_eq!(f.int(7).residue().unwrap(), Fq::prime(7, 0));
        assert!(matches!(
            f.rational(1, 7).residue(),
            Err(LocalFieldError::NegativeValuation)
        ));
        // 1/3 = 5 + 4*7 + ... in Z_7
        assert_eq!(f.rational(1, 3).residue().unwrap(), Fq::prime(7, 5));
    }

    #[test]
    fn additive_character() {
        let f = LocalField::qp(7, 5);
        let phi = AdditiveCharacter::new(f);
        assert_eq!(phi.eval(&f.int(7)).unwrap(), Cyc::one());
        assert_eq!(phi.eval(&f.int(1)).unwrap(), Cyc::zeta(7, 1));
        assert_eq!(phi.eval(&f.int(3)).unwrap(), Cyc::zeta(7, 3));
        // additivity with negative valuations
        let x = f.rational(1, 7);
        let y = f.rational(6, 7);
        let lhs = phi.eval(&x).unwrap() * phi.eval(&y).unwrap();
        assert_eq!(lhs, phi.eval(&x.add_ref(&y)).unwrap());
        assert!(phi.eval(&x).unwrap().is_unit_modulus());
    }

    #[test]
    fn teichmuller_examples() {
        let f = LocalField::qp(7, 5);
        let t = teichmuller_part(&f.int(1), 3).unwrap();
        assert!(t.sub_ref(&f.int(1)).certify_val_at_least(3).unwrap());
        // 3 -> 31 mod 49
        let t = teichmuller_part(&f.int(3), 2).unwrap();
        assert!(t.sub_ref(&f.int(31)).certify_val_at_least(2).unwrap());
        // 1 + 7 is topologically unipotent
        let t = teichmuller_part(&f.int(8), 3).unwrap();
        assert!(t.sub_ref(&f.int(1)).certify_val_at_least(3).unwrap());
        assert!(teichmuller_part(&f.int(7), 3).is_err());
    }

    #[test]
    fn window_inverse() {
        let f = LocalField::qp(7, 6);
        let x = f.int(3).truncate(6);
        let xi = x.inv().unwrap();
        assert!(x
            .mul_ref(&xi)
            .sub_ref(&f.one())
            .certify_val_at_least(5)
            .unwrap());
        // exact inverse of an exact element
        let y = f.int(3);
        let yi = y.inv().unwrap();
        assert!(yi.is_exact());
        assert!(y.mul_ref(&yi).eq_exact(&f.one()));
    }

    #[test]
    fn ramified_arithmetic() {
        let e = LocalField::ramified_quadratic(7, 6);
        let pi = e.uniformizer();
        assert!(pi.mul_ref(&pi).eq_exact(&e.int(7)));
        let x = e.int(2).add_ref(&pi.mul_ref(&e.int(3)));
        let xi = x.inv().unwrap();
        assert!(x.mul_ref(&xi).eq_exact(&e.one()));
        assert_eq!(x.norm_to_base().exact_coords().unwrap()[0], br(4 - 7 * 9));
        assert_eq!(x.trace_to_base().exact_coords().unwrap()[0], br(4));
    }

    #[test]
    fn unramified_arithmetic() {
        let e = LocalField::unramified_quadratic(7, 4);
        let w = e.w_gen();
        assert!(w.mul_ref(&w).eq_exact(&e.int(3)));
        let x = e.int(1).add_ref(&w.mul_ref(&e.int(2)));
        // norm = 1 - 3*4 = -11
        assert_eq!(x.norm_to_base().exact_coords().unwrap()[0], br(-11));
        let q = e.q();
        assert_eq!(q, 49);
        let t = teichmuller_part(&x, 3).unwrap();
        let tq = t.pow_mod(q - 1, 3);
        assert!(tq
            .sub_ref(&e.one().truncate(3))
            .certify_val_at_least(3)
            .unwrap());
    }

    #[test]
    fn log_is_additive() {
        let f = LocalField::qp(7, 6);
        let u = f.int(8); // 1 + 7
        let v = f.int(50); // 1 + 49
        let lu = u.log_1unit(5).unwrap();
        let lv = v.log_1unit(5).unwrap();
        let luv = u.mul_ref(&v).log_1unit(5).unwrap();
        assert!(lu
            .add_ref(&lv)
            .sub_ref(&luv)
            .certify_val_at_least(5)
            .unwrap());
        assert_eq!(lu.val().unwrap(), Some(rat(1, 1)));
        // ramified case
        let e = LocalField::ramified_quadratic(5, 8);
        let pi = e.uniformizer();
        let s = e.one().add_ref(&pi);
        let t = e.one().add_ref(&pi.mul_ref(&pi.mul_ref(&e.int(2))));
        let ls = s.log_1unit(6).unwrap();
        let lt = t.log_1unit(6).unwrap();
        let lst = s.mul_ref(&t).log_1unit(6).unwrap();
        assert!(ls
            .add_ref(&lt)
            .sub_ref(&lst)
            .certify_val_at_least(6)
            .unwrap());
    }

    #[test]
    fn parse_literals() {
        let f = LocalField::qp(7, 5);
        let x = parse_element(f, "7^-1*3").unwrap();
        assert_eq!(x.val().unwrap(), Some(rat(-1, 1)));
        let e = LocalField::ramified_quadratic(7, 5);
        let y = parse_element(e, "2+3*s").unwrap();
        assert_eq!(y.trace_to_base().exact_coords().unwrap()[0], br(4));
        assert!(parse_element(f, "oops").is_err());
    }
}
