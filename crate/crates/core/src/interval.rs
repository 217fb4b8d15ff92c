//! Real intervals with open/closed endpoints and their text grammar.
//!
//! Grammar: `R` (the whole line), `0` (the point tally at the origin), or a
//! bracketed pair such as `(0,1]`, `[-1,0]`, `[1,inf)`, `(-inf,-1]`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntervalSpec {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl IntervalSpec {
    /// Validating constructor. Infinite endpoints are always open.
    pub fn new(lo: f64, hi: f64, lo_closed: bool, hi_closed: bool) -> Result<Self> {
        let text = format_interval(lo, hi, lo_closed, hi_closed);
        let fail = |reason: &str| Error::IntervalParse {
            input: text.clone(),
            reason: reason.to_string(),
        };
        if lo.is_nan() || hi.is_nan() {
            return Err(fail("NaN endpoint"));
        }
        if lo > hi {
            return Err(fail("lower endpoint exceeds upper endpoint"));
        }
        if (lo_closed && lo.is_infinite()) || (hi_closed && hi.is_infinite()) {
            return Err(fail("infinite endpoints must be open"));
        }
        if lo == f64::INFINITY || hi == f64::NEG_INFINITY {
            return Err(fail("empty interval"));
        }
        if lo == hi && !(lo_closed && hi_closed) {
            return Err(fail("empty interval"));
        }
        // -0.0 and 0.0 denote the same endpoint
        let (lo, hi) = (lo + 0.0, hi + 0.0);
        Ok(Self {
            lo,
            hi,
            lo_closed,
            hi_closed,
        })
    }

    pub fn closed(lo: f64, hi: f64) -> Result<Self> {
        Self::new(lo, hi, true, true)
    }

    pub fn open(lo: f64, hi: f64) -> Result<Self> {
        Self::new(lo, hi, false, false)
    }

    pub fn whole_line() -> Self {
        Self {
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
            lo_closed: false,
            hi_closed: false,
        }
    }

    /// `{0}`.
    pub fn zero_point() -> Self {
        Self {
            lo: 0.0,
            hi: 0.0,
            lo_closed: true,
            hi_closed: true,
        }
    }

    /// `(0, 1]`.
    pub fn unit_right() -> Self {
        Self {
            lo: 0.0,
            hi: 1.0,
            lo_closed: false,
            hi_closed: true,
        }
    }

    pub fn is_whole_line(&self) -> bool {
        self.lo == f64::NEG_INFINITY && self.hi == f64::INFINITY
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn contains(&self, x: f64) -> bool {
        let above = if self.lo_closed { x >= self.lo } else { x > self.lo };
        let below = if self.hi_closed { x <= self.hi } else { x < self.hi };
        above && below
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(0.0)
    }

    /// True when every point of `other` lies in `self`.
    pub fn contains_interval(&self, other: &IntervalSpec) -> bool {
        let lo_ok = self.lo < other.lo || (self.lo == other.lo && (self.lo_closed || !other.lo_closed));
        let hi_ok = other.hi < self.hi || (self.hi == other.hi && (self.hi_closed || !other.hi_closed));
        lo_ok && hi_ok
    }

    /// Intersection, or `None` when empty.
    pub fn intersect(&self, other: &IntervalSpec) -> Option<IntervalSpec> {
        let (lo, lo_closed) = if self.lo > other.lo {
            (self.lo, self.lo_closed)
        } else if other.lo > self.lo {
            (other.lo, other.lo_closed)
        } else {
            (self.lo, self.lo_closed && other.lo_closed)
        };
        let (hi, hi_closed) = if self.hi < other.hi {
            (self.hi, self.hi_closed)
        } else if other.hi < self.hi {
            (other.hi, other.hi_closed)
        } else {
            (self.hi, self.hi_closed && other.hi_closed)
        };
        IntervalSpec::new(lo, hi, lo_closed, hi_closed).ok()
    }

    /// Mirror image `-I`.
    pub fn negated(&self) -> IntervalSpec {
        IntervalSpec {
            lo: 0.0 - self.hi,
            hi: 0.0 - self.lo,
            lo_closed: self.hi_closed,
            hi_closed: self.lo_closed,
        }
    }

    /// Number of one-sided neighbourhoods of `+1` and `-1` inside the
    /// interval. Each contributes `(1/2pi) log n` to the expected count, so
    /// this is 4 for the whole line and 1 for each of the four quarters.
    pub fn log_sides(&self) -> u32 {
        let mut sides = 0;
        for s in [-1.0, 1.0] {
            // (s - eps, s) inside
            if self.lo < s && s <= self.hi {
                sides += 1;
            }
            // (s, s + eps) inside
            if self.lo <= s && s < self.hi {
                sides += 1;
            }
        }
        sides
    }

    /// Coefficient of `log n` in the expected root count over the interval.
    pub fn log_coefficient(&self) -> f64 {
        f64::from(self.log_sides()) / (2.0 * std::f64::consts::PI)
    }
}

fn fmt_endpoint(x: f64) -> String {
    if x == f64::INFINITY {
        "inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{x}")
    }
}

fn format_interval(lo: f64, hi: f64, lo_closed: bool, hi_closed: bool) -> String {
    format!(
        "{}{},{}{}",
        if lo_closed { '[' } else { '(' },
        fmt_endpoint(lo),
        fmt_endpoint(hi),
        if hi_closed { ']' } else { ')' }
    )
}

impl fmt::Display for IntervalSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_whole_line() {
            f.write_str("R")
        } else if self.is_point() && self.lo == 0.0 {
            f.write_str("0")
        } else {
            f.write_str(&format_interval(self.lo, self.hi, self.lo_closed, self.hi_closed))
        }
    }
}

fn parse_endpoint(s: &str) -> Option<f64> {
    match s.trim().to_ascii_lowercase().as_str() {
        "inf" | "+inf" | "infinity" | "+infinity" => Some(f64::INFINITY),
        "-inf" | "-infinity" => Some(f64::NEG_INFINITY),
        t => t.parse::<f64>().ok().filter(|x| x.is_finite()),
    }
}

impl FromStr for IntervalSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let fail = |reason: &str| Error::IntervalParse {
            input: s.to_string(),
            reason: reason.to_string(),
        };
        match t {
            "R" | "r" | "(-inf,inf)" => return Ok(Self::whole_line()),
            "0" | "{0}" => return Ok(Self::zero_point()),
            _ => {}
        }
        let mut chars = t.chars();
        let lo_closed = match chars.next() {
            Some('[') => true,
            Some('(') => false,
            _ => return Err(fail("expected `R`, `0` or an interval starting with `(` or `[`")),
        };
        let hi_closed = match chars.next_back() {
            Some(']') => true,
            Some(')') => false,
            _ => return Err(fail("expected the interval to end with `)` or `]`")),
        };
        let body = chars.as_str();
        let (a, b) = body
            .split_once(',')
            .ok_or_else(|| fail("expected two endpoints separated by a comma"))?;
        let lo = parse_endpoint(a).ok_or_else(|| fail(&format!("bad lower endpoint `{}`", a.trim())))?;
        let hi = parse_endpoint(b).ok_or_else(|| fail(&format!("bad upper endpoint `{}`", b.trim())))?;
        IntervalSpec::new(lo, hi, lo_closed, hi_closed).map_err(|e| match e {
            Error::IntervalParse { reason, .. } => fail(&reason),
            other => other,
        })
    }
}
