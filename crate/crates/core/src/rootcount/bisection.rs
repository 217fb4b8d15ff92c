//! Certified root counting by adaptive bisection.
//!
//! Each cell `[l, h]` carries the exact signs of the polynomial at its ends.
//! At the midpoint the leading Taylor coefficients are computed together
//! with rigorous bounds on rounding error, truncation of the coefficient
//! vector and the Taylor remainder. The cell is resolved when the enclosure
//! of `p` excludes 0 (no root) or the enclosure of `p'` excludes 0 (at most
//! one root, present iff the end signs differ). Otherwise it is split.
//!
//! The first tier runs in binary64 and evaluates many cells per coefficient
//! sweep. Cells it cannot settle are handed to ball arithmetic at 128 bits,
//! doubling up to the cap.
//!
//! All cells lie in `[-1, 1]`; larger arguments are handled by the caller
//! through the reciprocal polynomial.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use super::bigfloat::{eval_ball, taylor4, Ball, Dyadic, Mag};
use crate::poly::{sign_of_integer_poly_at, Polynomial};

/// Precision label of the binary64 tier.
pub const FLOAT_BITS: u32 = 53;
/// First multi-precision tier.
pub const START_BITS: u32 = 128;
/// Highest precision tried before a count is reported uncertified.
pub const CAP_BITS: u32 = 4096;

const UNIT_ROUNDOFF: f64 = 1.0 / 9_007_199_254_740_992.0; // 2^-53
const LANES: usize = 16;
/// Taylor terms kept at each midpoint of the binary64 tier.
const ORDER: usize = 6;
/// Target for the dropped-tail bound relative to the largest coefficient,
/// well below the rounding error of any binary64 evaluation.
const TAIL_TARGET: f64 = 1e-18;
/// Safety factor applied to bounds computed in binary64.
const SAFETY: f64 = 1.0 + 1e-10;
/// Give up (uncertified) after this many cells in one count.
const MAX_CELLS: usize = 1 << 20;

/// Outcome of counting on a set of pieces.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct TierResult {
    pub count: u64,
    pub certified: bool,
    pub bits_used: u32,
}

impl TierResult {
    fn merge(&mut self, other: TierResult) {
        self.count += other.count;
        self.certified &= other.certified;
        self.bits_used = self.bits_used.max(other.bits_used);
    }
}

/// A point of `[-1, 1]` that may not be a binary64 value.
#[derive(Clone, Debug, PartialEq)]
pub struct Endpoint {
    pub approx: f64,
    /// Exact value when `approx` is not exact.
    pub exact: Option<BigRational>,
}

impl Endpoint {
    pub fn from_f64(x: f64) -> Self {
        Endpoint { approx: x, exact: None }
    }

    pub fn from_rational(q: &BigRational) -> Self {
        let approx = q.to_f64().unwrap_or(0.0);
        if BigRational::from_float(approx).as_ref() == Some(q) {
            Endpoint { approx, exact: None }
        } else {
            Endpoint {
                approx,
                exact: Some(q.clone()),
            }
        }
    }

    pub fn rational(&self) -> BigRational {
        match &self.exact {
            Some(q) => q.clone(),
            None => BigRational::from_float(self.approx).expect("finite endpoint"),
        }
    }

    /// Bound on `|exact - approx|`.
    fn slack(&self) -> f64 {
        match self.exact {
            None => 0.0,
            // to_f64 is correctly rounded, so one ulp is ample
            Some(_) => (self.approx.abs().max(f64::MIN_POSITIVE) * 2.0 * f64::EPSILON).max(1e-300),
        }
    }
}

/// A subinterval of `[-1, 1]` to count roots on.
#[derive(Clone, Debug, PartialEq)]
pub struct Piece {
    pub lo: Endpoint,
    pub hi: Endpoint,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

/// Polynomial data shared by all tiers.
pub struct Prepared {
    /// Binary64 coefficients (rounded when the source is not binary64).
    a: Vec<f64>,
    /// Bound on the coefficient rounding error.
    coef_err: f64,
    amax: f64,
    /// Exact integer multiple of the polynomial, built on demand.
    ints: std::cell::OnceCell<Vec<BigInt>>,
    source: Source,
}

enum Source {
    Float,
    Ints(Vec<BigInt>),
}

impl Prepared {
    /// Binary64 coefficients taken as exact.
    pub fn from_f64(a: &[f64]) -> Self {
        let amax = a.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        Prepared {
            a: a.to_vec(),
            coef_err: 0.0,
            amax,
            ints: std::cell::OnceCell::new(),
            source: Source::Float,
        }
    }

    /// Exact integer coefficients; binary64 images are rounded.
    pub fn from_ints(ints: Vec<BigInt>) -> Self {
        // scale so the largest coefficient is about 1
        let top_bits = ints.iter().map(|c| c.bits()).max().unwrap_or(0) as i64;
        let shift = top_bits.max(1) - 1;
        let a: Vec<f64> = ints
            .iter()
            .map(|c| Dyadic { mant: c.clone(), exp: -shift }.to_f64())
            .collect();
        let amax = a.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        // Dyadic::to_f64 truncates to 60 bits then rounds: relative error
        // below 2^-52 in all cases
        let coef_err = amax * 2.0 * f64::EPSILON;
        let exact = exactly_representable(&ints, shift, &a);
        Prepared {
            a,
            coef_err: if exact { 0.0 } else { coef_err },
            amax,
            ints: std::cell::OnceCell::from(ints.clone()),
            source: Source::Ints(ints),
        }
    }

    pub fn from_polynomial(p: &Polynomial) -> Self {
        if p.is_f64_exact() {
            Prepared::from_f64(&p.f64_coefficients())
        } else {
            Prepared::from_ints(p.to_integer_coefficients())
        }
    }

    pub fn degree(&self) -> usize {
        self.a.len().saturating_sub(1)
    }

    fn ints(&self) -> &[BigInt] {
        self.ints.get_or_init(|| match &self.source {
            Source::Ints(v) => v.clone(),
            Source::Float => Polynomial::from_f64(self.a.clone())
                .expect("finite")
                .to_integer_coefficients(),
        })
    }

    /// Exact sign at an endpoint, trying binary64 first.
    fn sign_at(&self, x: &Endpoint) -> i32 {
        if x.exact.is_none() {
            if let Some(s) = self.float_sign(x.approx) {
                return s;
            }
        }
        sign_of_integer_poly_at(self.ints(), &x.rational())
    }

    /// Sign at a binary64 point if the error bound settles it.
    fn float_sign(&self, x: f64) -> Option<i32> {
        if x.abs() == 1.0 {
            return self.unit_sign(x < 0.0);
        }
        let k = self.truncation(x.abs().min(1.0));
        let v = self.a[..=k].iter().rev().fold(0.0, |acc, &c| acc * x + c);
        self.settle(x, k, v)
    }

    /// Sign at `+-1` from a plain sum, which vectorizes.
    fn unit_sign(&self, negative: bool) -> Option<i32> {
        let mut acc = [0.0f64; 8];
        let mut abs = [0.0f64; 8];
        let flip = if negative { -1.0 } else { 1.0 };
        // chunks start at even powers, so the lane parity fixes the sign
        for chunk in self.a.chunks(8) {
            for (l, &c) in chunk.iter().enumerate() {
                let t = if l % 2 == 1 { c * flip } else { c };
                acc[l] += t;
                abs[l] += c.abs();
            }
        }
        let v: f64 = acc.iter().sum();
        let total: f64 = abs.iter().sum();
        let n = self.a.len();
        let err = (gamma(n + 8) * total * (1.0 + gamma(n + 8)) + self.coef_err * n as f64) * SAFETY;
        if v.abs() > err * SAFETY {
            Some(if v > 0.0 { 1 } else { -1 })
        } else {
            None
        }
    }

    /// Sign of a binary64 Horner value `v` at `x` summed over `0..=k`.
    fn settle(&self, x: f64, k: usize, v: f64) -> Option<i32> {
        let ax = x.abs().min(1.0);
        let err = (gamma(2 * k + 2) * self.amax + self.coef_err) * s_bound(0, ax, k) * SAFETY
            + self.tail(ax, k).0;
        if v.abs() > err * SAFETY {
            Some(if v > 0.0 { 1 } else { -1 })
        } else {
            None
        }
    }

    /// Number of leading terms needed on `|x| <= r`.
    fn truncation(&self, r: f64) -> usize {
        let n = self.degree();
        if r >= 1.0 || n < 16 || self.amax == 0.0 {
            return n;
        }
        if r == 0.0 {
            return 0;
        }
        let k = ((TAIL_TARGET * (1.0 - r)).ln() / r.ln()).ceil();
        if k.is_finite() && k >= 0.0 && (k as usize) < n {
            (k as usize).max(4)
        } else {
            n
        }
    }

    /// Bounds on the dropped tail and its derivative on `|x| <= r`.
    fn tail(&self, r: f64, k: usize) -> (f64, f64) {
        if k >= self.degree() {
            return (0.0, 0.0);
        }
        let amax = self.amax + self.coef_err;
        let rk = r.powi(k as i32);
        let om = 1.0 - r;
        let t0 = amax * rk * r / om;
        let t1 = amax * ((k as f64 + 1.0) * rk / om + rk * r / (om * om));
        (t0 * SAFETY, t1 * SAFETY)
    }
}

fn exactly_representable(ints: &[BigInt], shift: i64, a: &[f64]) -> bool {
    ints.iter().zip(a).all(|(c, &f)| {
        let back = Dyadic::from_f64(f);
        let exact = Dyadic { mant: c.clone(), exp: -shift };
        back.sub(&exact).is_zero()
    })
}

fn gamma(n: usize) -> f64 {
    let nu = n as f64 * UNIT_ROUNDOFF;
    nu / (1.0 - nu)
}

fn binom_f64(n: usize, k: usize) -> f64 {
    let mut r = 1.0;
    for i in 0..k {
        r = r * (n - i) as f64 / (i + 1) as f64;
    }
    r
}

/// Upper bound on `sum_{i=j}^{k} C(i, j) x^(i-j)` for `0 <= x <= 1`.
fn s_bound(j: usize, x: f64, k: usize) -> f64 {
    if k < j {
        return 0.0;
    }
    let b = binom_f64(k + 1, j + 1);
    let v = if x < 1.0 {
        b.min((1.0 - x).powi(-(j as i32 + 1)))
    } else {
        b
    };
    v * SAFETY
}

/// End sign still to be computed.
const UNKNOWN: i8 = 2;
/// End sign that binary64 could not settle.
const UNRESOLVED: i8 = 3;

/// Cell of the binary64 tier.
#[derive(Clone, Copy, Debug)]
struct Cell {
    lo: f64,
    hi: f64,
    /// Extra radius covering non-binary64 outer endpoints.
    slack: f64,
    s_lo: i8,
    s_hi: i8,
    /// Index of the piece the cell belongs to.
    piece: usize,
}

enum Verdict {
    Empty,
    One,
    Split(f64, i8),
    Escalate,
}

/// Taylor data at up to `LANES` points, summing coefficients `0..=k`.
fn taylor_lanes(a: &[f64], x: &[f64; LANES], k: usize) -> [[f64; LANES]; ORDER] {
    #[cfg(target_arch = "x86_64")]
    {
        if std::arch::is_x86_feature_detected!("avx512f") {
            // SAFETY: the feature was detected at run time
            return unsafe { taylor_lanes_avx512(a, x, k) };
        }
        if std::arch::is_x86_feature_detected!("avx2") {
            // SAFETY: as above
            return unsafe { taylor_lanes_avx2(a, x, k) };
        }
    }
    taylor_lanes_body(a, x, k)
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx512f")]
fn taylor_lanes_avx512(a: &[f64], x: &[f64; LANES], k: usize) -> [[f64; LANES]; ORDER] {
    taylor_lanes_body(a, x, k)
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx2")]
fn taylor_lanes_avx2(a: &[f64], x: &[f64; LANES], k: usize) -> [[f64; LANES]; ORDER] {
    taylor_lanes_body(a, x, k)
}

// plain multiply-add, no fused operations: the error bounds assume
// separately rounded products and sums
#[inline(always)]
fn taylor_lanes_body(a: &[f64], x: &[f64; LANES], k: usize) -> [[f64; LANES]; ORDER] {
    let mut c = [[0.0; LANES]; ORDER];
    for &ak in a[..=k].iter().rev() {
        for j in (1..ORDER).rev() {
            for l in 0..LANES {
                c[j][l] = c[j][l] * x[l] + c[j - 1][l];
            }
        }
        for l in 0..LANES {
            c[0][l] = c[0][l] * x[l] + ak;
        }
    }
    c
}

fn classify(prep: &Prepared, cell: &Cell, m: f64, k: usize, c: [f64; ORDER]) -> Verdict {
    let r = (cell.hi - m).max(m - cell.lo) * SAFETY + cell.slack;
    let am = m.abs().min(1.0);
    let big_r = (am + r).min(1.0);
    let g = gamma(2 * k + 2) * prep.amax + prep.coef_err;
    let e: [f64; ORDER] = std::array::from_fn(|j| g * s_bound(j, am, k));
    let amax = prep.amax + prep.coef_err;
    // Taylor remainder of order ORDER, scaled by r^(ORDER-1)
    let (t0, t1) = prep.tail(big_r, k);
    let a = |j: usize| c[j].abs() + e[j];
    let rem = amax * s_bound(ORDER, big_r, k) * r.powi(ORDER as i32 - 1);

    let round0 = e[0] + t0;
    let mut rad0 = round0 + rem * r;
    let mut rp = 1.0;
    for j in 1..ORDER {
        rp *= r;
        rad0 += a(j) * rp;
    }
    rad0 *= SAFETY;
    if c[0].abs() > rad0 {
        return Verdict::Empty;
    }
    let round1 = e[1] + t1;
    let mut rad1 = round1 + ORDER as f64 * rem;
    let mut rp = 1.0;
    for j in 2..ORDER {
        rp *= r;
        rad1 += j as f64 * a(j) * rp;
    }
    rad1 *= SAFETY;
    if c[1].abs() > rad1 {
        return Verdict::One;
    }
    if c[0].abs() <= 2.0 * round0 && c[1].abs() <= 2.0 * round1 {
        return Verdict::Escalate;
    }
    if r < 1e-13 * am.max(1e-3) {
        return Verdict::Escalate;
    }
    // the midpoint value doubles as the split-point sign
    if c[0].abs() > round0 * SAFETY && m > cell.lo && m < cell.hi {
        Verdict::Split(m, if c[0] > 0.0 { 1 } else { -1 })
    } else {
        Verdict::Escalate
    }
}

/// Sign at the binary64 point `x` from the Taylor data at `m`, when the
/// enclosure settles it.
fn end_sign(prep: &Prepared, m: f64, k: usize, c: [f64; ORDER], x: f64) -> Option<i8> {
    let h = x - m;
    // the step must be exact for the expansion to apply at x
    if m + h != x || x - h != m || (x - m) - h != 0.0 {
        return None;
    }
    let am = m.abs().min(1.0);
    let ah = h.abs();
    let big_r = (am + ah).min(1.0);
    let g = gamma(2 * k + 2) * prep.amax + prep.coef_err;
    let amax = prep.amax + prep.coef_err;
    let mut bound = 0.0;
    let mut hp = 1.0;
    for (j, cj) in c.iter().enumerate() {
        bound += (g * s_bound(j, am, k) + gamma(2 * ORDER) * cj.abs()) * hp;
        hp *= ah;
    }
    bound += amax * s_bound(ORDER, big_r, k) * hp + prep.tail(big_r, k).0;
    let v = c.iter().rev().fold(0.0, |acc, &cj| acc * h + cj);
    if v.abs() > bound * SAFETY * SAFETY {
        Some(if v > 0.0 { 1 } else { -1 })
    } else {
        None
    }
}

/// Initial split points: geometric towards `+-1`, where roots accumulate.
fn seed_points(n: usize, lo: f64, hi: f64) -> Vec<f64> {
    let mut pts = vec![0.0, 0.25, -0.25, 0.5, -0.5];
    let octaves = ((n.max(2) as f64).log2().ceil() as i32) + 1;
    for j in 3..=(2 * octaves) {
        let d = 2f64.powf(-(j as f64) / 2.0);
        pts.push(1.0 - d);
        pts.push(-(1.0 - d));
    }
    pts.retain(|&p| p > lo && p < hi);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

/// Counts roots on pieces of `[-1, 1]`, starting at `start_bits`
/// ([`FLOAT_BITS`] selects the binary64 tier) and escalating to `cap_bits`.
pub fn count_pieces(prep: &Prepared, pieces: &[Piece], start_bits: u32, cap_bits: u32) -> TierResult {
    let mut total = TierResult {
        count: 0,
        certified: true,
        bits_used: start_bits,
    };
    let mut plain = Vec::new();
    for (i, piece) in pieces.iter().enumerate() {
        match endpoints(prep, piece, start_bits, cap_bits) {
            Ends::Done(r) => total.merge(r),
            Ends::Signs(s_lo, s_hi) => plain.push((i, s_lo, s_hi)),
        }
    }
    if !plain.is_empty() {
        total.merge(interior(prep, pieces, &plain, start_bits, cap_bits));
    }
    total
}

enum Ends {
    Done(TierResult),
    /// Nonzero signs at both ends; the interior is still to count.
    Signs(i8, i8),
}

fn endpoints(prep: &Prepared, piece: &Piece, start_bits: u32, cap_bits: u32) -> Ends {
    let s_lo = prep.sign_at(&piece.lo);
    let lo_q = piece.lo.rational();
    let hi_q = piece.hi.rational();
    if lo_q == hi_q {
        let hit = piece.lo_closed && piece.hi_closed && s_lo == 0;
        return Ends::Done(TierResult {
            count: u64::from(hit),
            certified: true,
            bits_used: start_bits,
        });
    }
    let s_hi = prep.sign_at(&piece.hi);
    if s_lo != 0 && s_hi != 0 {
        return Ends::Signs(s_lo as i8, s_hi as i8);
    }
    // divide out the endpoint roots exactly, then count the interior
    let mut ints = prep.ints().to_vec();
    for (s, q) in [(s_lo, &lo_q), (s_hi, &hi_q)] {
        if s == 0 {
            ints = deflate(ints, q);
        }
    }
    let deflated = Prepared::from_ints(ints);
    let signs = (deflated.sign_at(&piece.lo) as i8, deflated.sign_at(&piece.hi) as i8);
    let mut res = interior(&deflated, std::slice::from_ref(piece), &[(0, signs.0, signs.1)], start_bits, cap_bits);
    res.count += u64::from(s_lo == 0 && piece.lo_closed) + u64::from(s_hi == 0 && piece.hi_closed);
    Ends::Done(res)
}

/// Divides out every factor `(x - q)` of an integer polynomial.
fn deflate(mut ints: Vec<BigInt>, q: &BigRational) -> Vec<BigInt> {
    // root p/d of an integer polynomial: divide by (d x - p)
    let p = q.numer().clone();
    let d = q.denom().clone();
    while ints.len() > 1 && sign_of_integer_poly_at(&ints, q) == 0 {
        // synthetic division by (d x - p): c_k = d b_{k-1} - p b_k
        let n = ints.len() - 1;
        let mut b = vec![BigInt::zero(); n];
        let mut carry = BigInt::zero();
        for k in (1..=n).rev() {
            // a_k = d b_{k-1} - p b_k  =>  b_{k-1} = (a_k + p b_k) / d
            let num = &ints[k] + &p * &carry;
            debug_assert!((&num % &d).is_zero());
            carry = num / &d;
            b[k - 1] = carry.clone();
        }
        ints = b;
    }
    ints
}

/// Open interiors of the selected pieces, given as `(index, s_lo, s_hi)`
/// with nonzero end signs. The binary64 tier sweeps all of them together.
fn interior(prep: &Prepared, pieces: &[Piece], sel: &[(usize, i8, i8)], start_bits: u32, cap_bits: u32) -> TierResult {
    let mut res = TierResult {
        count: 0,
        certified: true,
        bits_used: start_bits,
    };
    let mut escalated: Vec<Cell> = Vec::new();
    if start_bits <= FLOAT_BITS {
        let mut cells = Vec::new();
        for &(i, s_lo, s_hi) in sel {
            let piece = &pieces[i];
            // outer slack applies to every cell touching a non-binary64 end
            let slack = piece.lo.slack().max(piece.hi.slack());
            let mut lo = piece.lo.approx;
            let mut sl = s_lo;
            for p in seed_points(prep.degree(), piece.lo.approx, piece.hi.approx) {
                cells.push(Cell { lo, hi: p, slack, s_lo: sl, s_hi: UNKNOWN, piece: i });
                lo = p;
                sl = UNKNOWN;
            }
            cells.push(Cell { lo, hi: piece.hi.approx, slack, s_lo: sl, s_hi, piece: i });
        }
        let mut cells = first_round(prep, cells, &mut res.count, &mut escalated);
        let mut visited = 0usize;
        while !cells.is_empty() {
            visited += cells.len();
            if visited > MAX_CELLS {
                res.certified = false;
                return res;
            }
            cells = float_round(prep, cells, &mut res.count, &mut escalated);
        }
    } else {
        for &(i, s_lo, s_hi) in sel {
            let piece = &pieces[i];
            escalated.push(Cell {
                lo: piece.lo.approx,
                hi: piece.hi.approx,
                slack: 0.0,
                s_lo,
                s_hi,
                piece: i,
            });
        }
    }
    for cell in escalated {
        let piece = &pieces[cell.piece];
        let lo = if start_bits > FLOAT_BITS || cell.lo == piece.lo.approx {
            piece.lo.clone()
        } else {
            Endpoint::from_f64(cell.lo)
        };
        let hi = if start_bits > FLOAT_BITS || cell.hi == piece.hi.approx {
            piece.hi.clone()
        } else {
            Endpoint::from_f64(cell.hi)
        };
        let sub = ball_count(prep, &lo, &hi, cell.s_lo, cell.s_hi, start_bits.max(START_BITS), cap_bits);
        res.merge(sub);
    }
    res
}

/// Taylor data at the midpoints of a batch of cells.
fn evaluate(prep: &Prepared, cells: Vec<Cell>) -> Vec<(Cell, f64, usize, [f64; ORDER])> {
    // pair each cell with its midpoint and truncation length
    let mut work: Vec<(Cell, f64, usize, [f64; ORDER])> = cells
        .into_iter()
        .map(|c| {
            let m = 0.5 * (c.lo + c.hi);
            let r = (0.5 * (c.hi - c.lo)).abs() + c.slack;
            let k = prep.truncation((m.abs() + r).min(1.0));
            (c, m, k, [0.0; ORDER])
        })
        .collect();
    work.sort_by_key(|w| std::cmp::Reverse(w.2));
    for chunk in work.chunks_mut(LANES) {
        let k = chunk[0].2;
        let mut xs = [0.0; LANES];
        for (l, w) in chunk.iter().enumerate() {
            xs[l] = w.1;
        }
        let t = taylor_lanes(&prep.a, &xs, k);
        for (l, w) in chunk.iter_mut().enumerate() {
            w.3 = std::array::from_fn(|j| t[j][l]);
        }
    }
    work
}

fn apply(prep: &Prepared, w: &(Cell, f64, usize, [f64; ORDER]), next: &mut Vec<Cell>, count: &mut u64, escalated: &mut Vec<Cell>) {
    let (cell, m, k, c) = w;
    match classify(prep, cell, *m, *k, *c) {
        Verdict::Empty => {}
        Verdict::One => *count += u64::from(cell.s_lo != cell.s_hi),
        Verdict::Split(mid, s) => {
            next.push(Cell { hi: mid, s_hi: s, ..*cell });
            next.push(Cell { lo: mid, s_lo: s, ..*cell });
        }
        Verdict::Escalate => escalated.push(*cell),
    }
}

/// First sweep over seeded cells whose inner ends have unknown signs. The
/// signs are read off the Taylor data of the neighbouring cells; ends left
/// undecided are dropped by merging their two cells.
fn first_round(prep: &Prepared, cells: Vec<Cell>, count: &mut u64, escalated: &mut Vec<Cell>) -> Vec<Cell> {
    let mut work = evaluate(prep, cells);
    work.sort_by(|a, b| (a.0.piece, a.0.lo).partial_cmp(&(b.0.piece, b.0.lo)).expect("finite"));
    for i in 1..work.len() {
        if work[i].0.s_lo != UNKNOWN {
            continue;
        }
        let x = work[i].0.lo;
        let (l, r) = (&work[i - 1], &work[i]);
        let s = end_sign(prep, l.1, l.2, l.3, x)
            .or_else(|| end_sign(prep, r.1, r.2, r.3, x))
            .or_else(|| prep.float_sign(x).map(|s| s as i8))
            .unwrap_or(UNRESOLVED);
        work[i - 1].0.s_hi = s;
        work[i].0.s_lo = s;
    }
    let mut next = Vec::new();
    let mut merged: Option<Cell> = None;
    for w in &work {
        let cell = w.0;
        if let Some(mut m) = merged.take() {
            m.hi = cell.hi;
            m.s_hi = cell.s_hi;
            if cell.s_hi == UNRESOLVED {
                merged = Some(m);
            } else {
                next.push(m);
            }
        } else if cell.s_hi == UNRESOLVED {
            merged = Some(cell);
        } else {
            apply(prep, w, &mut next, count, escalated);
        }
    }
    debug_assert!(merged.is_none());
    next
}

/// One sweep over the pending cells; returns the cells to refine next.
fn float_round(prep: &Prepared, cells: Vec<Cell>, count: &mut u64, escalated: &mut Vec<Cell>) -> Vec<Cell> {
    let mut next = Vec::with_capacity(cells.len() * 2);
    for w in evaluate(prep, cells) {
        apply(prep, &w, &mut next, count, escalated);
    }
    next
}

/// Cell of the ball tiers.
struct BallCell {
    lo: Dyadic,
    hi: Dyadic,
    slack: Mag,
    s_lo: i8,
    s_hi: i8,
    prec: u32,
}

fn ball_count(prep: &Prepared, lo: &Endpoint, hi: &Endpoint, s_lo: i8, s_hi: i8, start: u32, cap: u32) -> TierResult {
    let ints = prep.ints();
    let amax = ints
        .iter()
        .map(|c| Dyadic::from_int(c.clone()).mag_upper())
        .fold(Mag::ZERO, |m, v| if v > m { v } else { m });
    let n = ints.len().saturating_sub(1);
    let slack = Mag::from_f64_up(lo.slack().max(hi.slack()));
    let mut res = TierResult {
        count: 0,
        certified: true,
        bits_used: start,
    };
    let mut stack = vec![BallCell {
        lo: Dyadic::from_f64(lo.approx),
        hi: Dyadic::from_f64(hi.approx),
        slack,
        s_lo,
        s_hi,
        prec: start,
    }];
    let mut visited = 0usize;
    while let Some(cell) = stack.pop() {
        visited += 1;
        if cell.prec > cap || visited > MAX_CELLS {
            res.certified = false;
            // best guess: parity of the end signs
            res.count += u64::from(cell.s_lo != cell.s_hi);
            continue;
        }
        res.bits_used = res.bits_used.max(cell.prec);
        let m = cell.lo.midpoint(&cell.hi);
        let r = cell.hi.sub(&cell.lo).scale(-1).mag_upper().add(cell.slack);
        let c = taylor4(ints, &m, cell.prec);
        let am = m.mag_upper();
        let big_r = am.add(r).to_f64().clamp(0.0, 1.0);
        let s4 = Mag::from_f64_up(s_bound(4, big_r, n));
        let r2 = r.mul(r);
        let r3 = r2.mul(r);
        let rem = amax.mul(s4);
        let a = |j: usize| c[j].abs_upper();

        let rad0 = c[0].rad.add(a(1).mul(r)).add(a(2).mul(r2)).add(a(3).mul(r3)).add(rem.mul(r3).mul(r));
        let c0 = c[0].mid.mag_lower();
        if c0 > rad0 {
            continue;
        }
        let rad1 = c[1]
            .rad
            .add(a(2).mul(r).mul_f64(2.0))
            .add(a(3).mul(r2).mul_f64(3.0))
            .add(rem.mul(r3).mul_f64(4.0));
        let c1 = c[1].mid.mag_lower();
        if c1 > rad1 {
            res.count += u64::from(cell.s_lo != cell.s_hi);
            continue;
        }
        let rounding_bound = c0 <= c[0].rad.mul_f64(2.0) && c1 <= c[1].rad.mul_f64(2.0);
        let too_narrow = r.log2() < -f64::from(cell.prec) / 2.0;
        if rounding_bound || too_narrow {
            stack.push(BallCell {
                prec: cell.prec * 2,
                ..cell
            });
            continue;
        }
        // split at the midpoint, or nearby if its sign is undecided
        let w = cell.hi.sub(&cell.lo);
        let mut split = None;
        let s_mid = c[0].sign();
        if s_mid != 0 {
            split = Some((m, s_mid));
        } else {
            for frac in [3i64, 5] {
                let p = cell.lo.add(&w.mul(&Dyadic::from_int(BigInt::from(frac))).scale(-3));
                let s = eval_ball(ints, &p, cell.prec).sign();
                if s != 0 {
                    split = Some((p, s));
                    break;
                }
            }
        }
        match split {
            Some((p, s)) => {
                stack.push(BallCell {
                    lo: p.clone(),
                    hi: cell.hi.clone(),
                    slack: cell.slack,
                    s_lo: s as i8,
                    s_hi: cell.s_hi,
                    prec: cell.prec,
                });
                stack.push(BallCell {
                    lo: cell.lo,
                    hi: p,
                    slack: cell.slack,
                    s_lo: cell.s_lo,
                    s_hi: s as i8,
                    prec: cell.prec,
                });
            }
            None => stack.push(BallCell {
                prec: cell.prec * 2,
                ..cell
            }),
        }
    }
    res
}

/// Exact value of the ball enclosure helper, exposed for tests.
#[doc(hidden)]
pub fn ball_sign_at(coeffs: &[BigInt], x: f64, prec: u32) -> i32 {
    Ball::sign(&eval_ball(coeffs, &Dyadic::from_f64(x), prec))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn piece(lo: f64, hi: f64, lc: bool, hc: bool) -> Piece {
        Piece {
            lo: Endpoint::from_f64(lo),
            hi: Endpoint::from_f64(hi),
            lo_closed: lc,
            hi_closed: hc,
        }
    }

    #[test]
    fn simple_quadratic() {
        // x^2 - 1/4 on [-1, 1]: roots +-1/2
        let prep = Prepared::from_f64(&[-0.25, 0.0, 1.0]);
        let r = count_pieces(&prep, &[piece(-1.0, 1.0, true, true)], FLOAT_BITS, CAP_BITS);
        assert_eq!(r, TierResult { count: 2, certified: true, bits_used: FLOAT_BITS });
        let r = count_pieces(&prep, &[piece(-1.0, 1.0, true, true)], START_BITS, CAP_BITS);
        assert_eq!(r.count, 2);
        assert!(r.certified);
    }

    #[test]
    fn endpoint_roots_follow_flags() {
        // (x - 1/2)(x + 1/2): root exactly at the endpoint 1/2
        let prep = Prepared::from_f64(&[-0.25, 0.0, 1.0]);
        let closed = count_pieces(&prep, &[piece(0.0, 0.5, true, true)], FLOAT_BITS, CAP_BITS);
        let open = count_pieces(&prep, &[piece(0.0, 0.5, true, false)], FLOAT_BITS, CAP_BITS);
        assert_eq!(closed.count, 1);
        assert_eq!(open.count, 0);
        assert!(closed.certified && open.certified);
    }

    #[test]
    fn double_root_is_uncertified() {
        let prep = Prepared::from_f64(&[0.0, 0.0, 1.0]);
        let r = count_pieces(&prep, &[piece(-1.0, 1.0, true, true)], FLOAT_BITS, 512);
        assert!(!r.certified);
    }

    #[test]
    fn rational_endpoint_piece() {
        // 10x - 1 has its root at 1/10 exactly
        let prep = Prepared::from_f64(&[-1.0, 10.0]);
        let tenth = BigRational::new(1.into(), 10.into());
        let p = Piece {
            lo: Endpoint::from_rational(&tenth),
            hi: Endpoint::from_f64(1.0),
            lo_closed: true,
            hi_closed: true,
        };
        assert_eq!(count_pieces(&prep, std::slice::from_ref(&p), FLOAT_BITS, CAP_BITS).count, 1);
        let open = Piece { lo_closed: false, ..p };
        assert_eq!(count_pieces(&prep, &[open], FLOAT_BITS, CAP_BITS).count, 0);
    }

    #[test]
    fn deflation_divides_exactly() {
        // (3x - 1)(x + 2) = 3x^2 + 5x - 2
        let ints: Vec<BigInt> = [-2, 5, 3].iter().map(|&c| BigInt::from(c)).collect();
        let q = deflate(ints, &BigRational::new(1.into(), 3.into()));
        assert_eq!(q, vec![BigInt::from(2), BigInt::from(1)]);
    }

    #[test]
    fn close_roots_need_escalation() {
        // (x - a)(x - b) with b - a = 2^-60: binary64 cannot separate them
        let a = 0.5;
        let b = 0.5 + 2f64.powi(-60);
        let prep = Prepared::from_ints(vec![
            // 2^120 (x - a)(x - b) in integers: a = 2^59/2^60, b = (2^59 + 1)/2^60
            (BigInt::from(1u64 << 59) * BigInt::from((1u64 << 59) + 1)),
            -(BigInt::from(1u64 << 60) + BigInt::from(1u64)) * BigInt::from(1u64 << 60),
            BigInt::from(1u64 << 60) * BigInt::from(1u64 << 60),
        ]);
        let _ = (a, b);
        let r = count_pieces(&prep, &[piece(0.0, 1.0, true, true)], FLOAT_BITS, CAP_BITS);
        assert_eq!(r.count, 2);
        assert!(r.certified);
        assert!(r.bits_used >= START_BITS);
    }
}
