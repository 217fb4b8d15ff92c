//! Coefficient laws.
//!
//! Every law is sampled by inverse transform: the `k`-th coefficient of a
//! trial is `quantile(law, U_k)` where `U_k` comes from the trial's
//! [`CouplingStream`]. Feeding the same stream to two laws therefore gives
//! the quantile coupling used by the continuity experiments.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{integrate_with_breaks, QuadratureOptions};
use crate::rng::CouplingStream;

/// Tolerance on the mean and variance invariants.
pub const MOMENT_TOLERANCE: f64 = 1e-12;

/// Default moment exponent offset: laws are checked against `E|xi|^3`.
pub const DEFAULT_EPS0: f64 = 1.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LawKind {
    DiscreteAtoms,
    ContinuousBuiltin,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Continuous {
    Gaussian,
    UniformSym,
}

/// A point mass of a discrete law.
#[derive(Clone, Debug, PartialEq)]
pub struct Atom {
    pub value: f64,
    pub mass: BigRational,
}

/// The named families available without a config file.
#[derive(Clone, Debug, PartialEq)]
pub enum BuiltinLaw {
    Gaussian,
    Rademacher,
    /// Uniform on `[-sqrt 3, sqrt 3]`.
    UniformSym,
    /// `P(+-1/sqrt 2) = 4/9` each, `P(+-sqrt 5) = 1/18` each: matches the
    /// first four Gaussian moments.
    FourMoment,
    /// Mass `q` at 0, `(1-q)/2` at each of `+-1/sqrt(1-q)`.
    Ternary(BigRational),
    /// Mass `p` at 0, `(1-p)/2` at each of `+-1/sqrt(1-p)`.
    ZeroAtom(BigRational),
    /// `m` equal atoms at the Gaussian quantiles `(j - 1/2)/m`, rescaled to
    /// unit variance.
    GaussianQuantiles(usize),
}

impl fmt::Display for BuiltinLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BuiltinLaw::Gaussian => write!(f, "gaussian"),
            BuiltinLaw::Rademacher => write!(f, "rademacher"),
            BuiltinLaw::UniformSym => write!(f, "uniform-sym"),
            BuiltinLaw::FourMoment => write!(f, "four-moment"),
            BuiltinLaw::Ternary(q) => write!(f, "ternary({q})"),
            BuiltinLaw::ZeroAtom(p) => write!(f, "zero-atom({p})"),
            BuiltinLaw::GaussianQuantiles(m) => write!(f, "gauss-quantile({m})"),
        }
    }
}

impl FromStr for BuiltinLaw {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (head, arg) = match s.find('(') {
            Some(i) if s.ends_with(')') => (&s[..i], Some(&s[i + 1..s.len() - 1])),
            Some(_) => return Err(Error::Parameter(format!("unbalanced parentheses in law `{s}`"))),
            None => (s, None),
        };
        let need_arg = |what: &str| {
            arg.ok_or_else(|| Error::Parameter(format!("law `{head}` needs a parameter {what}")))
        };
        let no_arg = |law: BuiltinLaw| match arg {
            Some(_) => Err(Error::Parameter(format!("law `{head}` takes no parameter"))),
            None => Ok(law),
        };
        match head {
            "gaussian" | "normal" => no_arg(BuiltinLaw::Gaussian),
            "rademacher" => no_arg(BuiltinLaw::Rademacher),
            "uniform-sym" | "uniform" => no_arg(BuiltinLaw::UniformSym),
            "four-moment" => no_arg(BuiltinLaw::FourMoment),
            "ternary" => Ok(BuiltinLaw::Ternary(parse_rational(need_arg("q")?)?)),
            "zero-atom" => Ok(BuiltinLaw::ZeroAtom(parse_rational(need_arg("p")?)?)),
            "gauss-quantile" => {
                let m: usize = need_arg("m")?
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parameter(format!("bad atom count in `{s}`")))?;
                Ok(BuiltinLaw::GaussianQuantiles(m))
            }
            _ => Err(Error::Parameter(format!("unknown law `{s}`"))),
        }
    }
}

/// Parses `"0.9"`, `"9/10"`, `"1e-3"` or an integer into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parameter(format!("cannot parse `{s}` as an exact rational"));
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num.trim().parse().map_err(|_| bad())?;
        let d: BigInt = den.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all: BigInt = format!("0{int_part}{frac_part}").parse().map_err(|_| bad())?;
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut q = BigRational::from_integer(all);
    if scale >= 0 {
        q *= BigRational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        q /= BigRational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Ok(if neg { -q } else { q })
}

/// Largest binary64 value not exceeding `q`.
pub fn rational_floor_f64(q: &BigRational) -> f64 {
    let mut f = q.to_f64().unwrap_or(if q.is_negative() { f64::MIN } else { f64::MAX });
    loop {
        match BigRational::from_float(f) {
            Some(exact) if exact > *q => f = f.next_down(),
            _ => break,
        }
    }
    loop {
        let up = f.next_up();
        match BigRational::from_float(up) {
            Some(exact) if exact <= *q => f = up,
            _ => break,
        }
    }
    f
}

/// Exact moments reported by [`CoefficientLaw::validate_moments`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub mean: f64,
    pub variance: f64,
    /// `E|xi|^(2 + eps0)`.
    pub abs_moment: f64,
}

/// JSON schema for a custom discrete law:
/// `{"name": "...", "atoms": [[value, mass_num, mass_den], ...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LawConfig {
    pub name: String,
    pub atoms: Vec<(f64, u64, u64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m0_bound: Option<f64>,
}

/// A validated mean-zero, unit-variance coefficient law.
#[derive(Clone, Debug)]
pub struct CoefficientLaw {
    name: String,
    kind: LawKind,
    continuous: Option<Continuous>,
    atoms: Vec<Atom>,
    /// `thresholds[j]` is the largest double `<= F(atoms[j].value)`, so for a
    /// double `u`, `u <= thresholds[j]` iff `u <= F(atoms[j].value)`.
    thresholds: Vec<f64>,
    values: Vec<f64>,
    zero_mass: f64,
    eps0: f64,
    m0_bound: f64,
}

impl CoefficientLaw {
    /// Constructs and validates a named family member.
    pub fn builtin(which: &BuiltinLaw) -> Result<Self> {
        let name = which.to_string();
        let one = BigRational::one();
        let half = BigRational::new(1.into(), 2.into());
        match which {
            BuiltinLaw::Gaussian => Self::continuous(name, Continuous::Gaussian),
            BuiltinLaw::UniformSym => Self::continuous(name, Continuous::UniformSym),
            BuiltinLaw::Rademacher => {
                Self::from_atoms(name, vec![(-1.0, half.clone()), (1.0, half)], None, None)
            }
            BuiltinLaw::FourMoment => {
                let inner = std::f64::consts::FRAC_1_SQRT_2;
                let outer = 5f64.sqrt();
                let m_in = BigRational::new(4.into(), 9.into());
                let m_out = BigRational::new(1.into(), 18.into());
                Self::from_atoms(
                    name,
                    vec![(-outer, m_out.clone()), (-inner, m_in.clone()), (inner, m_in), (outer, m_out)],
                    None,
                    None,
                )
            }
            BuiltinLaw::Ternary(p) | BuiltinLaw::ZeroAtom(p) => {
                let is_ternary = matches!(which, BuiltinLaw::Ternary(_));
                let in_range = if is_ternary {
                    p.is_positive() && *p < one
                } else {
                    !p.is_negative() && *p < one
                };
                if !in_range {
                    let range = if is_ternary { "(0, 1)" } else { "[0, 1)" };
                    return Err(Error::Parameter(format!("{name}: parameter must lie in {range}")));
                }
                let side = (&one - p) / BigRational::from_integer(2.into());
                let v = 1.0 / (1.0 - p.to_f64().unwrap_or(f64::NAN)).sqrt();
                let mut atoms = vec![(-v, side.clone()), (v, side)];
                if !p.is_zero() {
                    atoms.insert(1, (0.0, p.clone()));
                }
                Self::from_atoms(name, atoms, None, None)
            }
            BuiltinLaw::GaussianQuantiles(m) => {
                if *m < 2 {
                    return Err(Error::Parameter(format!("{name}: need at least 2 atoms")));
                }
                let mut raw = vec![0.0; *m];
                for j in 0..m / 2 {
                    let u = (j as f64 + 0.5) / *m as f64;
                    raw[j] = normal_quantile(u);
                    raw[m - 1 - j] = -raw[j];
                }
                let scale = (raw.iter().map(|v| v * v).sum::<f64>() / *m as f64).sqrt();
                let mass = BigRational::new(1.into(), BigInt::from(*m));
                let atoms = raw.into_iter().map(|v| (v / scale, mass.clone())).collect();
                Self::from_atoms(name, atoms, None, None)
            }
        }
    }

    /// Parses a builtin name such as `"ternary(1/3)"`.
    pub fn by_name(name: &str) -> Result<Self> {
        Self::builtin(&name.parse()?)
    }

    /// Builds a discrete law from `(value, exact mass)` pairs.
    ///
    /// Equal values are merged and zero masses dropped. With `m0_bound`
    /// unset the bound defaults to the computed `E|xi|^(2+eps0)`.
    pub fn from_atoms(
        name: impl Into<String>,
        atoms: Vec<(f64, BigRational)>,
        eps0: Option<f64>,
        m0_bound: Option<f64>,
    ) -> Result<Self> {
        let name = name.into();
        if atoms.is_empty() {
            return Err(Error::Config(format!("{name}: no atoms")));
        }
        let mut merged: Vec<Atom> = Vec::with_capacity(atoms.len());
        let mut sorted = atoms;
        for (v, m) in &sorted {
            if !v.is_finite() {
                return Err(Error::Config(format!("{name}: non-finite atom value {v}")));
            }
            if m.is_negative() {
                return Err(Error::Config(format!("{name}: negative mass {m}")));
            }
        }
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
        for (value, mass) in sorted {
            // -0.0 and 0.0 are the same atom
            let value = if value == 0.0 { 0.0 } else { value };
            match merged.last_mut() {
                Some(last) if last.value == value => last.mass += mass,
                _ => merged.push(Atom { value, mass }),
            }
        }
        merged.retain(|a| !a.mass.is_zero());
        let total: BigRational = merged.iter().map(|a| a.mass.clone()).sum();
        if total != BigRational::one() {
            return Err(Error::Config(format!("{name}: atom masses sum to {total}, not 1")));
        }
        let mut cumulative = BigRational::zero();
        let mut thresholds = Vec::with_capacity(merged.len());
        for a in &merged {
            cumulative += &a.mass;
            thresholds.push(rational_floor_f64(&cumulative));
        }
        let zero_mass = merged
            .iter()
            .find(|a| a.value == 0.0)
            .and_then(|a| a.mass.to_f64())
            .unwrap_or(0.0);
        let values = merged.iter().map(|a| a.value).collect();
        let mut law = Self {
            name,
            kind: LawKind::DiscreteAtoms,
            continuous: None,
            atoms: merged,
            thresholds,
            values,
            zero_mass,
            eps0: eps0.unwrap_or(DEFAULT_EPS0),
            m0_bound: f64::INFINITY,
        };
        law.finish(m0_bound)?;
        Ok(law)
    }

    /// Builds a law from the JSON config schema.
    pub fn from_config(cfg: &LawConfig) -> Result<Self> {
        let atoms = cfg
            .atoms
            .iter()
            .map(|&(v, num, den)| {
                if den == 0 {
                    Err(Error::Config(format!("{}: zero mass denominator", cfg.name)))
                } else {
                    Ok((v, BigRational::new(num.into(), den.into())))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_atoms(cfg.name.clone(), atoms, cfg.eps0, cfg.m0_bound)
    }

    pub fn from_json_str(json: &str) -> Result<Self> {
        let cfg: LawConfig = serde_json::from_str(json).map_err(|e| Error::Config(e.to_string()))?;
        Self::from_config(&cfg)
    }

    fn continuous(name: String, which: Continuous) -> Result<Self> {
        let mut law = Self {
            name,
            kind: LawKind::ContinuousBuiltin,
            continuous: Some(which),
            atoms: Vec::new(),
            thresholds: Vec::new(),
            values: Vec::new(),
            zero_mass: 0.0,
            eps0: DEFAULT_EPS0,
            m0_bound: f64::INFINITY,
        };
        law.finish(None)?;
        Ok(law)
    }

    fn finish(&mut self, m0_bound: Option<f64>) -> Result<()> {
        if !(self.eps0 > 0.0) {
            return Err(Error::Parameter(format!("{}: eps0 must be positive", self.name)));
        }
        match m0_bound {
            Some(b) => self.m0_bound = b,
            None => {
                let computed = self.abs_moment(2.0 + self.eps0);
                self.m0_bound = computed * (1.0 + MOMENT_TOLERANCE);
            }
        }
        self.validate_moments()?;
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> LawKind {
        self.kind
    }

    pub fn is_discrete(&self) -> bool {
        self.kind == LawKind::DiscreteAtoms
    }

    /// Atoms in increasing order of value (empty for continuous laws).
    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    /// `P(xi = 0)`.
    pub fn zero_mass(&self) -> f64 {
        self.zero_mass
    }

    pub fn eps0(&self) -> f64 {
        self.eps0
    }

    pub fn m0_bound(&self) -> f64 {
        self.m0_bound
    }

    /// Config for discrete laws, `None` for the continuous builtins.
    pub fn to_config(&self) -> Option<LawConfig> {
        if !self.is_discrete() {
            return None;
        }
        let atoms = self
            .atoms
            .iter()
            .map(|a| {
                let num = a.mass.numer().to_u64()?;
                let den = a.mass.denom().to_u64()?;
                Some((a.value, num, den))
            })
            .collect::<Option<Vec<_>>>()?;
        Some(LawConfig {
            name: self.name.clone(),
            atoms,
            eps0: Some(self.eps0),
            m0_bound: Some(self.m0_bound),
        })
    }

    /// `E|xi|^k`: finite sum for atoms, quadrature for continuous laws.
    pub fn abs_moment(&self, k: f64) -> f64 {
        match self.continuous {
            None => self
                .atoms
                .iter()
                .map(|a| a.mass.to_f64().unwrap_or(0.0) * a.value.abs().powf(k))
                .sum(),
            Some(c) => integrate_density(c, |x| x.abs().powf(k)),
        }
    }

    /// `E xi^k` for integer `k`; exact for atoms up to the final rounding.
    pub fn raw_moment(&self, k: u32) -> f64 {
        match self.continuous {
            None => exact_raw_moment(&self.atoms, k).to_f64().unwrap_or(f64::NAN),
            Some(c) => integrate_density(c, |x| x.powi(k as i32)),
        }
    }

    /// Checks mean 0, variance 1, `P(0) < 1` and the moment bound.
    pub fn validate_moments(&self) -> Result<Moments> {
        let (mean, variance) = match self.continuous {
            None => {
                let m1 = exact_raw_moment(&self.atoms, 1);
                let m2 = exact_raw_moment(&self.atoms, 2);
                let var = &m2 - &m1 * &m1;
                (m1.to_f64().unwrap_or(f64::NAN), var.to_f64().unwrap_or(f64::NAN))
            }
            Some(c) => {
                let m1 = integrate_density(c, |x| x);
                let m2 = integrate_density(c, |x| x * x);
                (m1, m2 - m1 * m1)
            }
        };
        let abs_moment = self.abs_moment(2.0 + self.eps0);
        let err = |moment: &'static str, value: f64, expected: String| Error::Moment {
            law: self.name.clone(),
            moment,
            value,
            expected,
        };
        if !(mean.abs() <= MOMENT_TOLERANCE) {
            return Err(err("mean", mean, format!("0 within {MOMENT_TOLERANCE:e}")));
        }
        if !((variance - 1.0).abs() <= MOMENT_TOLERANCE) {
            return Err(err("variance", variance, format!("1 within {MOMENT_TOLERANCE:e}")));
        }
        if !(self.zero_mass < 1.0) {
            return Err(err("P(xi = 0)", self.zero_mass, "< 1".into()));
        }
        if !(abs_moment <= self.m0_bound) {
            return Err(err("E|xi|^(2+eps0)", abs_moment, format!("<= M0 = {}", self.m0_bound)));
        }
        Ok(Moments {
            mean,
            variance,
            abs_moment,
        })
    }

    /// Left-continuous generalized inverse of the distribution function.
    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::Parameter(format!("quantile level {u} not in (0, 1)")));
        }
        Ok(self.quantile_unchecked(u))
    }

    /// [`quantile`](Self::quantile) without the range check.
    #[inline]
    pub fn quantile_unchecked(&self, u: f64) -> f64 {
        match self.continuous {
            Some(Continuous::Gaussian) => normal_quantile(u),
            Some(Continuous::UniformSym) => 3f64.sqrt() * (2.0 * u - 1.0),
            None => {
                let t = &self.thresholds;
                let j = if t.len() <= 8 {
                    t.iter().position(|&c| u <= c).unwrap_or(t.len() - 1)
                } else {
                    t.partition_point(|&c| c < u).min(t.len() - 1)
                };
                self.values[j]
            }
        }
    }

    /// `count` draws from the trial's stream.
    pub fn sample(&self, stream: &CouplingStream, count: usize) -> Vec<f64> {
        let mut out = vec![0.0; count];
        self.fill(stream, &mut out);
        out
    }

    /// Fills `out[k]` with `quantile(U_k)`.
    pub fn fill(&self, stream: &CouplingStream, out: &mut [f64]) {
        let mut us = stream.uniforms();
        for x in out.iter_mut() {
            *x = self.quantile_unchecked(us.next_uniform());
        }
    }
}

impl fmt::Display for CoefficientLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

fn exact_raw_moment(atoms: &[Atom], k: u32) -> BigRational {
    atoms
        .iter()
        .map(|a| {
            let v = BigRational::from_float(a.value).unwrap_or_else(BigRational::zero);
            &a.mass * num_traits::pow(v, k as usize)
        })
        .sum()
}

fn integrate_density<G: Fn(f64) -> f64>(which: Continuous, g: G) -> f64 {
    let opts = QuadratureOptions {
        abs_tol: 1e-15,
        rel_tol: 1e-15,
        max_subdivisions: 2000,
    };
    match which {
        Continuous::Gaussian => {
            let c = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
            let breaks = [-40.0, -10.0, -4.0, -2.0, -1.0, 0.0, 1.0, 2.0, 4.0, 10.0, 40.0];
            integrate_with_breaks(|x| c * (-0.5 * x * x).exp() * g(x), &breaks, opts).value
        }
        Continuous::UniformSym => {
            let h = 3f64.sqrt();
            let breaks = [-h, -1.0, 0.0, 1.0, h];
            integrate_with_breaks(|x| g(x) / (2.0 * h), &breaks, opts).value
        }
    }
}

/// Sampling interface shared by single laws and per-index law sequences.
pub trait CoefficientSource: Sync {
    fn label(&self) -> String;

    /// Fills `out[k]` with the `k`-th coefficient of the trial.
    fn fill(&self, stream: &CouplingStream, out: &mut [f64]);

    /// True when every coefficient is drawn from finitely many atoms.
    fn is_discrete(&self) -> bool;

    /// `P(xi_k = 0)`.
    fn zero_mass_at(&self, k: usize) -> f64;
}

impl CoefficientSource for CoefficientLaw {
    fn label(&self) -> String {
        self.name.clone()
    }

    fn fill(&self, stream: &CouplingStream, out: &mut [f64]) {
        CoefficientLaw::fill(self, stream, out)
    }

    fn is_discrete(&self) -> bool {
        CoefficientLaw::is_discrete(self)
    }

    fn zero_mass_at(&self, _k: usize) -> f64 {
        self.zero_mass
    }
}

/// Independent, not necessarily identically distributed coefficients:
/// `xi_k ~ laws[k]` for `k < laws.len()` and `xi_k ~ tail` afterwards.
///
/// The comparison-law condition on small nonzero values is not checked.
#[derive(Clone, Debug)]
pub struct PerIndexLaws {
    pub laws: Vec<CoefficientLaw>,
    pub tail: CoefficientLaw,
}

impl PerIndexLaws {
    /// Law of `xi_k`.
    pub fn law_at(&self, k: usize) -> &CoefficientLaw {
        self.laws.get(k).unwrap_or(&self.tail)
    }
}

impl CoefficientSource for PerIndexLaws {
    fn label(&self) -> String {
        let head: Vec<&str> = self.laws.iter().map(|l| l.name()).collect();
        format!("[{}; then {}]", head.join(","), self.tail.name())
    }

    fn fill(&self, stream: &CouplingStream, out: &mut [f64]) {
        let mut us = stream.uniforms();
        for (k, x) in out.iter_mut().enumerate() {
            *x = self.law_at(k).quantile_unchecked(us.next_uniform());
        }
    }

    fn is_discrete(&self) -> bool {
        self.tail.is_discrete() && self.laws.iter().all(|l| l.is_discrete())
    }

    fn zero_mass_at(&self, k: usize) -> f64 {
        self.law_at(k).zero_mass()
    }
}

/// Standard normal quantile (Wichura, AS 241 `PPND16`), relative accuracy
/// about 1e-16 over the open unit interval.
pub fn normal_quantile(p: f64) -> f64 {
    const A: [f64; 8] = [
        3.387_132_872_796_366_608_0,
        1.331_416_678_917_843_774_5e2,
        1.971_590_950_306_551_442_7e3,
        1.373_169_376_550_946_112_5e4,
        4.592_195_393_154_987_145_7e4,
        6.726_577_092_700_870_085_3e4,
        3.343_057_558_358_812_810_5e4,
        2.509_080_928_730_122_672_7e3,
    ];
    const B: [f64; 8] = [
        1.0,
        4.231_333_070_160_091_125_2e1,
        6.871_870_074_920_579_083_0e2,
        5.394_196_021_424_751_107_7e3,
        2.121_379_430_158_659_586_7e4,
        3.930_789_580_009_271_061_0e4,
        2.872_908_573_572_194_267_4e4,
        5.226_495_278_852_854_561_0e3,
    ];
    const C: [f64; 8] = [
        1.423_437_110_749_683_577_34,
        4.630_337_846_156_545_295_90,
        5.769_497_221_460_691_405_50,
        3.647_848_324_763_204_605_04,
        1.270_458_252_452_368_382_58,
        2.417_807_251_774_506_117_70e-1,
        2.272_384_498_926_918_458_33e-2,
        7.745_450_142_783_414_076_40e-4,
    ];
    const D: [f64; 8] = [
        1.0,
        2.053_191_626_637_758_821_87,
        1.676_384_830_183_803_849_40,
        6.897_673_349_851_000_045_50e-1,
        1.481_039_764_274_800_745_90e-1,
        1.519_866_656_361_645_719_66e-2,
        5.475_938_084_995_344_946_00e-4,
        1.050_750_071_644_416_843_24e-9,
    ];
    const E: [f64; 8] = [
        6.657_904_643_501_103_777_20,
        5.463_784_911_164_114_369_90,
        1.784_826_539_917_291_335_80,
        2.965_605_718_285_048_912_30e-1,
        2.653_218_952_657_612_309_30e-2,
        1.242_660_947_388_078_438_60e-3,
        2.711_555_568_743_487_578_15e-5,
        2.010_334_399_292_288_132_65e-7,
    ];
    const F: [f64; 8] = [
        1.0,
        5.998_322_065_558_879_376_90e-1,
        1.369_298_809_227_358_053_10e-1,
        1.487_536_129_085_061_485_25e-2,
        7.868_691_311_456_132_591_00e-4,
        1.846_318_317_510_054_681_80e-5,
        1.421_511_758_316_445_888_70e-7,
        2.044_263_103_389_939_785_64e-15,
    ];
    #[inline]
    fn poly(c: &[f64; 8], x: f64) -> f64 {
        c.iter().rev().fold(0.0, |acc, &k| acc * x + k)
    }

    let q = p - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180_625 - q * q;
        return q * poly(&A, r) / poly(&B, r);
    }
    let r = if q < 0.0 { p } else { 1.0 - p };
    let r = (-r.ln()).sqrt();
    let x = if r <= 5.0 {
        let r = r - 1.6;
        poly(&C, r) / poly(&D, r)
    } else {
        let r = r - 5.0;
        poly(&E, r) / poly(&F, r)
    };
    if q < 0.0 {
        -x
    } else {
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn four_moment_atoms() {
        let law = CoefficientLaw::builtin(&BuiltinLaw::FourMoment).unwrap();
        let atoms = law.atoms();
        assert_eq!(atoms.len(), 4);
        assert_eq!(atoms[0].value, -(5f64.sqrt()));
        assert_eq!(atoms[1].value, -std::f64::consts::FRAC_1_SQRT_2);
        assert_eq!(atoms[0].mass, rat(1, 18));
        assert_eq!(atoms[1].mass, rat(4, 9));
        assert_eq!(atoms[2].mass, rat(4, 9));
        assert_eq!(atoms[3].mass, rat(1, 18));
        // 2 (4/9)(1/4) + 2 (1/18) 25 = 3
        assert!((law.raw_moment(4) - 3.0).abs() < 1e-14);
        let m = law.validate_moments().unwrap();
        assert!(m.mean.abs() <= 1e-15);
        assert!((m.variance - 1.0).abs() <= 1e-15);
    }

    #[test]
    fn rademacher_has_no_zero_atom() {
        let law = CoefficientLaw::by_name("rademacher").unwrap();
        assert_eq!(law.zero_mass(), 0.0);
        let m = law.validate_moments().unwrap();
        assert_eq!(m.mean, 0.0);
        assert_eq!(m.variance, 1.0);
    }

    #[test]
    fn zero_atom_half_has_unit_variance() {
        let law = CoefficientLaw::by_name("zero-atom(1/2)").unwrap();
        assert_eq!(law.zero_mass(), 0.5);
        // 2 (1/4) (1/(1 - 1/2)) = 1
        assert!((law.validate_moments().unwrap().variance - 1.0).abs() < 1e-15);
        assert_eq!(law.quantile(0.5).unwrap(), 0.0);
    }

    #[test]
    fn ternary_third_has_unit_variance() {
        let law = CoefficientLaw::by_name("ternary(1/3)").unwrap();
        assert!((law.validate_moments().unwrap().variance - 1.0).abs() < 1e-15);
        assert!((law.zero_mass() - 1.0 / 3.0).abs() < 1e-16);
    }

    #[test]
    fn parameter_range_errors() {
        assert!(CoefficientLaw::by_name("ternary(0)").is_err());
        assert!(CoefficientLaw::by_name("ternary(1)").is_err());
        assert!(CoefficientLaw::by_name("zero-atom(1)").is_err());
        assert!(CoefficientLaw::by_name("zero-atom(-0.1)").is_err());
        assert!(CoefficientLaw::by_name("zero-atom(0)").is_ok());
        assert!(CoefficientLaw::by_name("gauss-quantile(1)").is_err());
        assert!(CoefficientLaw::by_name("cauchy").is_err());
        assert!(CoefficientLaw::by_name("gaussian(2)").is_err());
    }

    #[test]
    fn quantile_examples() {
        let rad = CoefficientLaw::by_name("rademacher").unwrap();
        assert_eq!(rad.quantile(0.3).unwrap(), -1.0);
        assert_eq!(rad.quantile(0.5).unwrap(), -1.0);
        assert_eq!(rad.quantile(0.5f64.next_up()).unwrap(), 1.0);
        let uni = CoefficientLaw::by_name("uniform-sym").unwrap();
        assert_eq!(uni.quantile(0.5).unwrap(), 0.0);
        assert!(uni.quantile(0.0).is_err());
        assert!(uni.quantile(1.0).is_err());
        assert!(uni.quantile(f64::NAN).is_err());
    }

    #[test]
    fn continuous_moments_by_quadrature() {
        let g = CoefficientLaw::by_name("gaussian").unwrap();
        let m = g.validate_moments().unwrap();
        assert!((m.abs_moment - 2.0 * (2.0 / std::f64::consts::PI).sqrt()).abs() < 1e-13);
        assert!((g.raw_moment(4) - 3.0).abs() < 1e-12);
        let u = CoefficientLaw::by_name("uniform-sym").unwrap();
        let m = u.validate_moments().unwrap();
        assert!((m.abs_moment - 3.0 * 3f64.sqrt() / 4.0).abs() < 1e-13);
    }

    #[test]
    fn custom_json_law() {
        let law = CoefficientLaw::from_json_str(
            r#"{"name": "pm1", "atoms": [[1.0, 1, 2], [-1.0, 1, 2]]}"#,
        )
        .unwrap();
        assert_eq!(law.atoms().len(), 2);
        assert_eq!(law.atoms()[0].value, -1.0);
        // nonzero mean is rejected
        let bad = CoefficientLaw::from_json_str(r#"{"name": "b", "atoms": [[1.0, 1, 1]]}"#);
        assert!(matches!(bad, Err(Error::Moment { moment: "mean", .. })));
        // masses must sum to one
        let bad = CoefficientLaw::from_json_str(r#"{"name": "b", "atoms": [[1.0, 1, 3], [-1.0, 1, 3]]}"#);
        assert!(matches!(bad, Err(Error::Config(_))));
        // wrong variance
        let bad = CoefficientLaw::from_json_str(r#"{"name": "b", "atoms": [[2.0, 1, 2], [-2.0, 1, 2]]}"#);
        assert!(matches!(bad, Err(Error::Moment { moment: "variance", .. })));
        // declared moment bound too small
        let bad = CoefficientLaw::from_json_str(
            r#"{"name": "b", "atoms": [[1.0, 1, 2], [-1.0, 1, 2]], "m0_bound": 0.5}"#,
        );
        assert!(matches!(bad, Err(Error::Moment { .. })));
    }

    #[test]
    fn parse_rational_forms() {
        assert_eq!(parse_rational("0.9").unwrap(), rat(9, 10));
        assert_eq!(parse_rational("9/10").unwrap(), rat(9, 10));
        assert_eq!(parse_rational("1e-3").unwrap(), rat(1, 1000));
        assert_eq!(parse_rational("-2.5").unwrap(), rat(-5, 2));
        assert_eq!(parse_rational(".5").unwrap(), rat(1, 2));
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1/0").is_err());
    }

    #[test]
    fn floor_f64_of_rational() {
        assert_eq!(rational_floor_f64(&rat(1, 2)), 0.5);
        let third = rational_floor_f64(&rat(1, 3));
        assert!(BigRational::from_float(third).unwrap() <= rat(1, 3));
        assert!(BigRational::from_float(third.next_up()).unwrap() > rat(1, 3));
    }

    #[test]
    fn normal_quantile_reference_values() {
        assert_eq!(normal_quantile(0.5), 0.0);
        assert!((normal_quantile(0.975) - 1.959_963_984_540_054).abs() < 1e-15);
        assert!((normal_quantile(0.025) + 1.959_963_984_540_054).abs() < 1e-15);
        assert!((normal_quantile(1e-10) + 6.361_340_902_404_056).abs() < 1e-13);
        assert!((normal_quantile(0.841_344_746_068_542_9) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn gaussian_quantile_discretization_is_symmetric() {
        let law = CoefficientLaw::by_name("gauss-quantile(5)").unwrap();
        let v: Vec<f64> = law.atoms().iter().map(|a| a.value).collect();
        assert_eq!(v.len(), 5);
        assert_eq!(v[2], 0.0);
        assert_eq!(v[0], -v[4]);
        assert_eq!(v[1], -v[3]);
        assert!((law.validate_moments().unwrap().variance - 1.0).abs() < 1e-14);
    }
}
