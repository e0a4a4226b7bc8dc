use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;

use crate::error::{Error, Result};

/// Exponents of `x^alpha t^j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    pub x: Vec<u32>,
    pub t: u32,
}

impl Monomial {
    pub fn new(x: Vec<u32>, t: u32) -> Self {
        Self { x, t }
    }

    pub fn one(dim: usize) -> Self {
        Self { x: vec![0; dim], t: 0 }
    }

    pub fn spatial_degree(&self) -> u32 {
        self.x.iter().sum()
    }

    /// `|alpha| + 2 j`
    pub fn parabolic_degree(&self) -> u32 {
        self.spatial_degree() + 2 * self.t
    }
}

// graded order on (|alpha| + 2j, alpha, j)
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.parabolic_degree()
            .cmp(&other.parabolic_degree())
            .then_with(|| self.x.cmp(&other.x))
            .then_with(|| self.t.cmp(&other.t))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Polynomial in `x_0..x_{n-1}` and `t` with exact rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiPoly {
    dim: usize,
    terms: BTreeMap<Monomial, BigRational>,
}

pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn rat_frac(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl MultiPoly {
    pub fn zero(dim: usize) -> Self {
        Self { dim, terms: BTreeMap::new() }
    }

    pub fn constant(dim: usize, c: BigRational) -> Self {
        let mut p = Self::zero(dim);
        p.add_term(Monomial::one(dim), c);
        p
    }

    /// The coordinate function `x_i`.
    pub fn var(dim: usize, i: usize) -> Self {
        let mut m = Monomial::one(dim);
        m.x[i] = 1;
        Self::monomial(dim, m, BigRational::one())
    }

    pub fn time(dim: usize) -> Self {
        Self::monomial(dim, Monomial::new(vec![0; dim], 1), BigRational::one())
    }

    pub fn monomial(dim: usize, m: Monomial, c: BigRational) -> Self {
        assert_eq!(m.x.len(), dim, "monomial dimension");
        let mut p = Self::zero(dim);
        p.add_term(m, c);
        p
    }

    pub fn from_terms(dim: usize, terms: impl IntoIterator<Item = (Monomial, BigRational)>) -> Self {
        let mut p = Self::zero(dim);
        for (m, c) in terms {
            assert_eq!(m.x.len(), dim, "monomial dimension");
            p.add_term(m, c);
        }
        p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> BigRational {
        self.terms.get(m).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Adds `c * m`, dropping the entry when it cancels.
    pub fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn parabolic_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::parabolic_degree).max()
    }

    pub fn spatial_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::spatial_degree).max()
    }

    pub fn t_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.t).max()
    }

    pub fn is_spatial(&self) -> bool {
        self.terms.keys().all(|m| m.t == 0)
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero(self.dim);
        }
        Self {
            dim: self.dim,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    /// Spatial Laplacian.
    pub fn laplacian(&self) -> Self {
        let mut out = Self::zero(self.dim);
        for (m, c) in &self.terms {
            for i in 0..self.dim {
                let a = m.x[i];
                if a >= 2 {
                    let mut d = m.clone();
                    d.x[i] -= 2;
                    out.add_term(d, c * rat(i64::from(a) * i64::from(a - 1)));
                }
            }
        }
        out
    }

    pub fn dt(&self) -> Self {
        let mut out = Self::zero(self.dim);
        for (m, c) in &self.terms {
            if m.t > 0 {
                let mut d = m.clone();
                d.t -= 1;
                out.add_term(d, c * rat(i64::from(m.t)));
            }
        }
        out
    }

    /// `d/dt P - lap P`.
    pub fn heat_op(&self) -> Self {
        &self.dt() - &self.laplacian()
    }

    /// Coefficient of `t^j`, as a polynomial in `x`.
    pub fn t_coefficient(&self, j: u32) -> Self {
        let mut out = Self::zero(self.dim);
        for (m, c) in self.terms.iter().filter(|(m, _)| m.t == j) {
            out.add_term(Monomial::new(m.x.clone(), 0), c.clone());
        }
        out
    }

    /// `self * t^j`
    pub fn times_t_pow(&self, j: u32) -> Self {
        Self {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (Monomial::new(m.x.clone(), m.t + j), c.clone()))
                .collect(),
        }
    }

    /// Exact evaluation at rational `(x, t)`.
    pub fn eval_exact(&self, x: &[BigRational], t: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for (m, c) in &self.terms {
            let mut v = c.clone();
            for (xi, &a) in x.iter().zip(&m.x) {
                v *= num_traits::pow(xi.clone(), a as usize);
            }
            v *= num_traits::pow(t.clone(), m.t as usize);
            acc += v;
        }
        acc
    }

    /// Floating-point evaluation.
    pub fn eval(&self, x: &[f64], t: f64) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| {
                let mut v = c.to_f64().unwrap_or(f64::NAN);
                for (xi, &a) in x.iter().zip(&m.x) {
                    v *= xi.powi(a as i32);
                }
                v * t.powi(m.t as i32)
            })
            .sum()
    }

    /// Random spatial polynomial with up to `terms` monomials of degree at
    /// most `max_degree` and coefficients `p/q`, `|p| <= 20`, `1 <= q <= 9`.
    pub fn random_spatial<R: Rng + ?Sized>(rng: &mut R, dim: usize, max_degree: u32, terms: usize) -> Self {
        let mut p = Self::zero(dim);
        for _ in 0..terms {
            let total = rng.random_range(0..=max_degree);
            let mut x = vec![0u32; dim];
            for _ in 0..total {
                x[rng.random_range(0..dim)] += 1;
            }
            let num = rng.random_range(-20i64..=20);
            let den = rng.random_range(1i64..=9);
            p.add_term(Monomial::new(x, 0), rat_frac(num, den));
        }
        p
    }

    /// Parses text such as `x0^4 + 12*x0^2*t - 3/2*t^2`.
    ///
    /// Variables are `x0, x1, ...` and `t`. When `dim` is `None` the dimension
    /// is one more than the largest variable index (at least 1).
    pub fn parse(text: &str, dim: Option<usize>) -> Result<Self> {
        let raw = parse_terms(text)?;
        let needed = raw
            .iter()
            .flat_map(|(_, vars, _)| vars.iter().map(|(i, _)| i + 1))
            .max()
            .unwrap_or(1);
        let dim = match dim {
            Some(d) if d < needed => {
                return Err(Error::Parse(format!(
                    "polynomial uses x{} but dimension is {d}",
                    needed - 1
                )))
            }
            Some(d) => d,
            None => needed,
        };
        let mut p = Self::zero(dim);
        for (c, vars, tpow) in raw {
            let mut x = vec![0u32; dim];
            for (i, e) in vars {
                x[i] += e;
            }
            p.add_term(Monomial::new(x, tpow), c);
        }
        Ok(p)
    }
}

type RawTerm = (BigRational, Vec<(usize, u32)>, u32);

fn parse_terms(text: &str) -> Result<Vec<RawTerm>> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(Error::Parse("empty polynomial".into()));
    }
    let mut out = Vec::new();
    let bytes = s.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let mut sign = BigRational::one();
        if bytes[i] == b'+' || bytes[i] == b'-' {
            if bytes[i] == b'-' {
                sign = -sign;
            }
            i += 1;
        } else if i > 0 {
            return Err(Error::Parse(format!("expected '+' or '-' at offset {i} in {s:?}")));
        }
        let start = i;
        while i < bytes.len() && bytes[i] != b'+' && bytes[i] != b'-' {
            i += 1;
        }
        let term = &s[start..i];
        if term.is_empty() {
            return Err(Error::Parse(format!("empty term at offset {start} in {s:?}")));
        }
        let (c, vars, tp) = parse_term(term)?;
        out.push((sign * c, vars, tp));
    }
    Ok(out)
}

fn parse_term(term: &str) -> Result<RawTerm> {
    let mut coeff = BigRational::one();
    let mut vars = Vec::new();
    let mut tpow = 0u32;
    for factor in term.split('*') {
        if factor.is_empty() {
            return Err(Error::Parse(format!("empty factor in {term:?}")));
        }
        let (base, exp) = match factor.split_once('^') {
            Some((b, e)) => {
                let e: u32 = e
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad exponent {e:?} in {term:?}")))?;
                (b, e)
            }
            None => (factor, 1),
        };
        if base == "t" {
            tpow += exp;
        } else if let Some(idx) = base.strip_prefix('x') {
            let i: usize = idx
                .parse()
                .map_err(|_| Error::Parse(format!("bad variable {base:?}")))?;
            vars.push((i, exp));
        } else {
            let c = parse_rational(base)?;
            coeff *= num_traits::pow(c, exp as usize);
        }
    }
    Ok((coeff, vars, tpow))
}

fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::Parse(format!("bad coefficient {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.parse().map_err(|_| bad())?;
            let d: BigInt = d.parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            match (k, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let mut factors: Vec<String> = Vec::new();
            for (i, &a) in m.x.iter().enumerate() {
                match a {
                    0 => {}
                    1 => factors.push(format!("x{i}")),
                    _ => factors.push(format!("x{i}^{a}")),
                }
            }
            match m.t {
                0 => {}
                1 => factors.push("t".into()),
                j => factors.push(format!("t^{j}")),
            }
            if factors.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "{mag}*{}", factors.join("*"))?;
            }
        }
        Ok(())
    }
}

impl Add for &MultiPoly {
    type Output = MultiPoly;

    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.dim, rhs.dim, "polynomial dimensions differ");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &MultiPoly {
    type Output = MultiPoly;

    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.dim, rhs.dim, "polynomial dimensions differ");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;

    fn neg(self) -> MultiPoly {
        self.scale(&-BigRational::one())
    }
}

impl Mul for &MultiPoly {
    type Output = MultiPoly;

    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.dim, rhs.dim, "polynomial dimensions differ");
        let mut out = MultiPoly::zero(self.dim);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                let x = ma.x.iter().zip(&mb.x).map(|(a, b)| a + b).collect();
                out.add_term(Monomial::new(x, ma.t + mb.t), ca * cb);
            }
        }
        out
    }
}
