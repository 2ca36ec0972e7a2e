//! Exact rational filtration levels, including the `r+` refinements used by
//! Moy-Prasad theory.

use num_rational::Rational64;
use num_traits::{Signed, Zero};
use std::fmt;

/// Exact rational number used for valuations, depths and building coordinates.
pub type Rat = Rational64;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(n, d)
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(n)
}

/// Ceiling of a rational as an i64.
pub fn ceil(x: Rat) -> i64 {
    x.ceil().to_integer()
}

/// Floor of a rational as an i64.
pub fn floor(x: Rat) -> i64 {
    x.floor().to_integer()
}

/// A filtration level: either exactly `r` or `r+` (infinitesimally above `r`).
///
/// `r+` levels encode the unions `G_{x,r+} = ∪_{s>r} G_{x,s}`; since exponent
/// tables are step functions of `r` with rational jumps, `r+` is fully
/// determined by taking ceilings of the form "smallest integer strictly
/// greater than".
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Level {
    pub r: Rat,
    pub plus: bool,
}

impl Level {
    pub fn at(r: Rat) -> Self {
        Level { r, plus: false }
    }

    pub fn plus(r: Rat) -> Self {
        Level { r, plus: true }
    }

    pub fn is_zero(&self) -> bool {
        self.r.is_zero() && !self.plus
    }

    pub fn is_positive(&self) -> bool {
        self.r.is_positive() || (self.r.is_zero() && self.plus)
    }

    /// `⌈self - shift⌉` with the convention that a `+` level takes the
    /// smallest integer strictly greater than `r - shift`.
    pub fn ceil_shifted(&self, shift: Rat) -> i64 {
        let x = self.r - shift;
        if self.plus {
            floor(x) + 1
        } else {
            ceil(x)
        }
    }
}

impl PartialOrd for Level {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Level {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.r.cmp(&other.r).then(self.plus.cmp(&other.plus))
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.plus {
            write!(f, "{}+", self.r)
        } else {
            write!(f, "{}", self.r)
        }
    }
}

/// Parse a rational written as `a`, `a/b` or `a.b` is not supported; levels
/// may carry a trailing `+`.
pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: i64 = n.trim().parse().ok()?;
        let d: i64 = d.trim().parse().ok()?;
        if d == 0 {
            return None;
        }
        Some(Rat::new(n, d))
    } else {
        let n: i64 = s.parse().ok()?;
        Some(Rat::from_integer(n))
    }
}

pub fn parse_level(s: &str) -> Option<Level> {
    let s = s.trim();
    if let Some(core) = s.strip_suffix('+') {
        Some(Level::plus(parse_rat(core)?))
    } else {
        Some(Level::at(parse_rat(s)?))
    }
}
