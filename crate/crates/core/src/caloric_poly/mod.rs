//! Exact algebra of caloric polynomials.
//!
//! A space-time polynomial solves the heat equation iff it can be written as
//! `u = sum_i u_i(x) t^i` with `lap u_i = (i + 1) u_{i+1}` and the last
//! element harmonic. Every such chain is generated by its spatial part
//! `u_0` via `u_i = lap^i u_0 / i!`, which makes the space of caloric
//! polynomials of parabolic degree `<= q` isomorphic to the spatial
//! polynomials of degree `<= q`.
//!
//! All arithmetic is over arbitrary-precision rationals.

mod linsys;
mod poly;

use num_integer::binomial;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub use linsys::{Echelon, SparseRow};
pub use poly::{rat, rat_frac, Monomial, MultiPoly};

use crate::error::{Error, Result};
use crate::field::SpaceTimeField;

/// A caloric polynomial stored as its chain `u_0, ..., u_{k-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaloricPolynomial {
    dim: usize,
    chain: Vec<MultiPoly>,
    assembled: MultiPoly,
}

impl CaloricPolynomial {
    /// Builds from a chain after checking the chain relations exactly.
    pub fn from_chain(dim: usize, chain: Vec<MultiPoly>) -> Result<Self> {
        if let Some(p) = chain.iter().find(|p| p.dim() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: p.dim() });
        }
        if chain.iter().any(|p| !p.is_spatial()) {
            return Err(Error::invalid("chain elements must not depend on t"));
        }
        let out = Self::assemble(dim, chain);
        let residual = out.assembled.heat_op();
        if !residual.is_zero() || !out.chain_relations_hold() {
            return Err(Error::NotCaloric { residual });
        }
        Ok(out)
    }

    fn assemble(dim: usize, chain: Vec<MultiPoly>) -> Self {
        let mut assembled = MultiPoly::zero(dim);
        for (i, u) in chain.iter().enumerate() {
            assembled = &assembled + &u.times_t_pow(i as u32);
        }
        Self { dim, chain, assembled }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn chain(&self) -> &[MultiPoly] {
        &self.chain
    }

    /// `u(x, t) = sum_i u_i(x) t^i`.
    pub fn polynomial(&self) -> &MultiPoly {
        &self.assembled
    }

    /// `lap u_i = (i + 1) u_{i+1}` for every link and `lap u_{k-1} = 0`.
    pub fn chain_relations_hold(&self) -> bool {
        let k = self.chain.len();
        (0..k).all(|i| {
            let lhs = self.chain[i].laplacian();
            if i + 1 < k {
                lhs == self.chain[i + 1].scale(&rat(i as i64 + 1))
            } else {
                lhs.is_zero()
            }
        })
    }

    /// Highest power of `t`, or `None` for the zero polynomial.
    pub fn t_degree(&self) -> Option<u32> {
        self.assembled.t_degree()
    }

    /// Exact `d^k u / dt^k`.
    pub fn dt_k(&self, k: u32) -> MultiPoly {
        let mut p = self.assembled.clone();
        for _ in 0..k {
            p = p.dt();
        }
        p
    }

    pub fn eval(&self, x: &[f64], t: f64) -> f64 {
        self.assembled.eval(x, t)
    }
}

impl SpaceTimeField for CaloricPolynomial {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &[f64], t: f64) -> f64 {
        self.assembled.eval(x, t)
    }
}

impl std::fmt::Display for CaloricPolynomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.assembled.fmt(f)
    }
}

/// Unique caloric polynomial with `u(x, 0) = u0`: `u_i = lap^i u0 / i!`.
pub fn caloric_extend(u0: &MultiPoly) -> Result<CaloricPolynomial> {
    if !u0.is_spatial() {
        return Err(Error::invalid("initial data must not depend on t"));
    }
    let dim = u0.dim();
    let mut chain = Vec::new();
    let mut current = u0.clone();
    let mut i = 0i64;
    while !current.is_zero() {
        let next = current.laplacian().scale(&rat_frac(1, i + 1));
        chain.push(current);
        current = next;
        i += 1;
    }
    let out = CaloricPolynomial::assemble(dim, chain);
    debug_assert!(out.assembled.heat_op().is_zero());
    Ok(out)
}

/// Splits a space-time polynomial into its chain, rejecting it with the
/// nonzero heat residual when it is not caloric.
pub fn decompose(p: &MultiPoly) -> Result<CaloricPolynomial> {
    let residual = p.heat_op();
    if !residual.is_zero() {
        return Err(Error::NotCaloric { residual });
    }
    let k = p.t_degree().map_or(0, |d| d + 1);
    let chain = (0..k).map(|j| p.t_coefficient(j)).collect();
    CaloricPolynomial::from_chain(p.dim(), chain)
}

/// `dim H^q(R^n) = C(n + floor(q), n)`.
pub fn dim_hq(n: usize, q: f64) -> u64 {
    assert!(q >= 1.0, "growth exponent must be at least 1");
    let qf = q.floor() as u64;
    binomial(n as u64 + qf, n as u64)
}

/// All monomials `x^alpha t^j` with `|alpha| + 2j <= degree`, in graded order.
pub fn monomials_up_to(n: usize, degree: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    for j in 0..=degree / 2 {
        let budget = degree - 2 * j;
        let mut alpha = vec![0u32; n];
        spatial_exponents(&mut alpha, 0, budget, &mut |a| out.push(Monomial::new(a.to_vec(), j)));
    }
    out.sort();
    out
}

fn spatial_exponents(alpha: &mut [u32], idx: usize, budget: u32, emit: &mut dyn FnMut(&[u32])) {
    if idx == alpha.len() {
        emit(alpha);
        return;
    }
    for a in 0..=budget {
        alpha[idx] = a;
        spatial_exponents(alpha, idx + 1, budget - a, emit);
    }
    alpha[idx] = 0;
}

/// Linear system `heat_op(P) = 0` on the coefficients of all monomials of
/// parabolic degree `<= degree`, optionally with `P(x, 0) = 0`.
#[derive(Debug, Clone)]
pub struct CaloricSystem {
    pub n: usize,
    pub degree: u32,
    pub unknowns: Vec<Monomial>,
    pub equations: usize,
    pub echelon: Echelon,
}

impl CaloricSystem {
    pub fn build(n: usize, degree: u32, vanish_at_zero: bool) -> Self {
        let unknowns = monomials_up_to(n, degree);
        let index: std::collections::HashMap<&Monomial, usize> =
            unknowns.iter().enumerate().map(|(i, m)| (m, i)).collect();

        // heat_op of each unknown monomial, scattered into rows keyed by the
        // image monomial
        let mut rows: std::collections::BTreeMap<Monomial, SparseRow> = Default::default();
        for (col, m) in unknowns.iter().enumerate() {
            let image = MultiPoly::monomial(n, m.clone(), BigRational::one()).heat_op();
            for (im, c) in image.terms() {
                rows.entry(im.clone()).or_default().insert(col, c.clone());
            }
        }
        let mut equations = rows.len();
        let mut echelon = Echelon::new(unknowns.len());
        for (_, row) in rows {
            echelon.push(row);
        }
        if vanish_at_zero {
            for m in unknowns.iter().filter(|m| m.t == 0) {
                let mut row = SparseRow::new();
                row.insert(index[m], BigRational::one());
                echelon.push(row);
                equations += 1;
            }
        }
        Self { n, degree, unknowns, equations, echelon }
    }

    pub fn nullity(&self) -> usize {
        self.echelon.nullity()
    }

    /// Null-space basis as polynomials.
    pub fn solutions(&self) -> Vec<MultiPoly> {
        self.echelon
            .null_space()
            .into_iter()
            .map(|v| {
                MultiPoly::from_terms(
                    self.n,
                    self.unknowns.iter().cloned().zip(v).filter(|(_, c)| !c.is_zero()),
                )
            })
            .collect()
    }
}

/// Brute-force dimension of `H^q`: nullity of the exact caloric system.
pub fn dim_hq_oracle(n: usize, q: f64) -> usize {
    assert!(q >= 1.0, "growth exponent must be at least 1");
    CaloricSystem::build(n, q.floor() as u32, false).nullity()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimBoundRow {
    pub q: u32,
    pub dim: u64,
    /// `q^{eta + 1}` with `eta = n`.
    pub power: f64,
    pub ratio: f64,
}

/// `dim H^q / q^{n+1}` for integer `q = 1..=q_max`.
pub fn check_dim_bound(n: usize, q_max: u32) -> Result<Vec<DimBoundRow>> {
    if q_max > 20 {
        return Err(Error::invalid(format!("q_max = {q_max} exceeds 20")));
    }
    Ok((1..=q_max)
        .map(|q| {
            let dim = dim_hq(n, f64::from(q));
            let power = f64::from(q).powi(n as i32 + 1);
            DimBoundRow { q, dim, power, ratio: dim as f64 / power }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BackwardUniqueness {
    pub n: usize,
    pub degree: u32,
    pub unknowns: usize,
    pub equations: usize,
    pub nullity: usize,
}

/// Nullity of `{heat_op P = 0, P(x, 0) = 0, deg_par P <= q}`.
pub fn backward_unique(q: u32, n: usize) -> Result<BackwardUniqueness> {
    if q > 12 {
        return Err(Error::invalid(format!("degree cap {q} exceeds 12")));
    }
    let sys = CaloricSystem::build(n, q, true);
    Ok(BackwardUniqueness {
        n,
        degree: q,
        unknowns: sys.unknowns.len(),
        equations: sys.equations,
        nullity: sys.nullity(),
    })
}

/// For even `q`: every caloric polynomial of parabolic degree `<= q` whose
/// `t`-degree is `q/2` has a constant top chain element.
pub fn top_chain_is_constant(n: usize, q: u32) -> bool {
    if !q.is_multiple_of(2) {
        return true;
    }
    let sys = CaloricSystem::build(n, q, false);
    let basis = sys.solutions();
    // any combination reaching t-degree q/2 is spanned by basis elements that do
    basis
        .iter()
        .filter(|p| p.t_degree() == Some(q / 2))
        .all(|p| p.t_coefficient(q / 2).spatial_degree() == Some(0))
}
