//! Exact arithmetic in cyclotomic fields `Q(zeta_n)`: elements are
//! polynomials in `zeta_n` reduced modulo the n-th cyclotomic polynomial,
//! with full support for inversion, Galois conjugation, lifting along
//! subfield inclusions, and polynomials over the field (including the norm
//! descent to a rational-coefficient polynomial).

use crate::cyclo::CycloRational;
use crate::error::{Error, Result};
use crate::poly::QPoly;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Zero;

fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Euler's totient.
pub fn euler_phi(n: u64) -> u64 {
    let mut n = n;
    let mut result = n;
    let mut p = 2u64;
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

/// The n-th cyclotomic polynomial, computed by exact division of `x^n - 1`
/// by the cyclotomic polynomials of the proper divisors of n.
pub fn cyclotomic_poly(n: u64) -> QPoly {
    assert!(n >= 1);
    if n == 1 {
        return QPoly::from_i64(&[-1, 1]);
    }
    let mut num = QPoly::monomial(q(1), n as usize).sub(&QPoly::constant(q(1)));
    for d in 1..n {
        if n % d == 0 {
            let (quot, rem) = num.div_rem(&cyclotomic_poly(d));
            debug_assert!(rem.is_zero());
            num = quot;
        }
    }
    num
}

/// An element of `Q(zeta_n)`, stored as coefficients of
/// `1, zeta, ..., zeta^(phi(n)-1)`. Always exactly `phi(n)` entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycElem {
    pub coeffs: Vec<BigRational>,
}

/// The field `Q(zeta_n)` with precomputed reduction data.
pub struct CycloField {
    n: u64,
    degree: usize,
    modulus: QPoly,
    /// `zeta^i mod Phi_n` for `0 <= i < n`, as length-`degree` vectors.
    powers: Vec<Vec<BigRational>>,
}

impl CycloField {
    pub fn new(n: u64) -> Self {
        assert!(n >= 1);
        let modulus = cyclotomic_poly(n);
        let degree = modulus.degree().unwrap();
        let mut powers = Vec::with_capacity(n as usize);
        for i in 0..n {
            let (_, rem) = QPoly::monomial(q(1), i as usize).div_rem(&modulus);
            let mut v = rem.coeffs().to_vec();
            v.resize(degree, q(0));
            powers.push(v);
        }
        CycloField { n, degree, modulus, powers }
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn modulus(&self) -> &QPoly {
        &self.modulus
    }

    pub fn zero(&self) -> CycElem {
        CycElem { coeffs: vec![q(0); self.degree] }
    }

    pub fn one(&self) -> CycElem {
        self.rational(q(1))
    }

    pub fn rational(&self, r: BigRational) -> CycElem {
        let mut e = self.zero();
        e.coeffs[0] = r;
        e
    }

    /// `zeta_n^k` for any integer k.
    pub fn zeta_pow(&self, k: i64) -> CycElem {
        let i = k.rem_euclid(self.n as i64) as usize;
        CycElem { coeffs: self.powers[i].clone() }
    }

    /// Embeds a torus coordinate; its torsion order must divide n.
    pub fn embed_cyclo(&self, c: &CycloRational) -> Result<CycElem> {
        let order = c.torsion_order();
        if self.n % order != 0 {
            return Err(Error::InvalidArgument(format!(
                "torsion order {order} does not divide the field conductor {}",
                self.n
            )));
        }
        let zeta = self.zeta_pow(((self.n / order) * c.torsion_exp()) as i64);
        Ok(self.scale(&zeta, &c.free_rational()))
    }

    pub fn is_zero(&self, a: &CycElem) -> bool {
        a.coeffs.iter().all(Zero::is_zero)
    }

    /// The rational value of `a` when it lies in the prime subfield.
    pub fn as_rational(&self, a: &CycElem) -> Option<BigRational> {
        if a.coeffs[1..].iter().all(Zero::is_zero) {
            Some(a.coeffs[0].clone())
        } else {
            None
        }
    }

    pub fn add(&self, a: &CycElem, b: &CycElem) -> CycElem {
        CycElem {
            coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x + y).collect(),
        }
    }

    pub fn sub(&self, a: &CycElem, b: &CycElem) -> CycElem {
        CycElem {
            coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x - y).collect(),
        }
    }

    pub fn neg(&self, a: &CycElem) -> CycElem {
        CycElem { coeffs: a.coeffs.iter().map(|x| -x.clone()).collect() }
    }

    pub fn scale(&self, a: &CycElem, r: &BigRational) -> CycElem {
        CycElem { coeffs: a.coeffs.iter().map(|x| x * r).collect() }
    }

    pub fn mul(&self, a: &CycElem, b: &CycElem) -> CycElem {
        let pa = QPoly::new(a.coeffs.clone());
        let pb = QPoly::new(b.coeffs.clone());
        let (_, rem) = pa.mul(&pb).div_rem(&self.modulus);
        let mut coeffs = rem.coeffs().to_vec();
        coeffs.resize(self.degree, q(0));
        CycElem { coeffs }
    }

    /// Multiplicative inverse via the extended Euclidean algorithm against
    /// the (irreducible) modulus.
    pub fn inv(&self, a: &CycElem) -> Result<CycElem> {
        if self.is_zero(a) {
            return Err(Error::ZeroInput);
        }
        let pa = QPoly::new(a.coeffs.clone());
        let (g, u, _) = ext_gcd(&pa, &self.modulus);
        // gcd of a nonzero element with an irreducible modulus is a unit
        let c = g.coeff(0);
        debug_assert_eq!(g.degree(), Some(0));
        let inv_poly = u.scale(&(q(1) / c));
        let (_, rem) = inv_poly.div_rem(&self.modulus);
        let mut coeffs = rem.coeffs().to_vec();
        coeffs.resize(self.degree, q(0));
        Ok(CycElem { coeffs })
    }

    pub fn div(&self, a: &CycElem, b: &CycElem) -> Result<CycElem> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    /// Galois conjugation `zeta -> zeta^j`, `gcd(j, n) = 1`.
    pub fn conjugate(&self, a: &CycElem, j: u64) -> CycElem {
        debug_assert_eq!(j.gcd(&self.n), 1);
        let mut out = self.zero();
        for (i, c) in a.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let target = &self.powers[((i as u64 * j) % self.n) as usize];
            for (o, t) in out.coeffs.iter_mut().zip(target) {
                *o += c * t;
            }
        }
        out
    }

    /// Representatives of the Galois group: units modulo n, ascending.
    pub fn galois_reps(&self) -> Vec<u64> {
        (1..=self.n).filter(|j| j.gcd(&self.n) == 1).collect()
    }

    /// Lifts an element of a subfield `Q(zeta_m)` with `m | n` into this
    /// field via `zeta_m -> zeta_n^(n/m)`.
    pub fn lift(&self, a: &CycElem, from: &CycloField) -> CycElem {
        assert_eq!(self.n % from.n, 0, "not a subfield inclusion");
        let step = self.n / from.n;
        let mut out = self.zero();
        for (i, c) in a.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let target = &self.powers[((i as u64 * step) % self.n) as usize];
            for (o, t) in out.coeffs.iter_mut().zip(target) {
                *o += c * t;
            }
        }
        out
    }
}

/// Extended Euclid over `Q[x]`: returns `(g, u, v)` with `u*a + v*b = g`.
fn ext_gcd(a: &QPoly, b: &QPoly) -> (QPoly, QPoly, QPoly) {
    let mut r0 = a.clone();
    let mut r1 = b.clone();
    let mut s0 = QPoly::constant(q(1));
    let mut s1 = QPoly::zero();
    let mut t0 = QPoly::zero();
    let mut t1 = QPoly::constant(q(1));
    while !r1.is_zero() {
        let (quot, rem) = r0.div_rem(&r1);
        let s2 = s0.sub(&quot.mul(&s1));
        let t2 = t0.sub(&quot.mul(&t1));
        r0 = r1;
        r1 = rem;
        s0 = s1;
        s1 = s2;
        t0 = t1;
        t1 = t2;
    }
    (r0, s0, t0)
}

/// A polynomial in one variable with coefficients in a cyclotomic field.
/// Trailing zero coefficients are trimmed; the zero polynomial is empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycPoly {
    pub coeffs: Vec<CycElem>,
}

impl CycPoly {
    pub fn new(field: &CycloField, mut coeffs: Vec<CycElem>) -> Self {
        while coeffs.last().is_some_and(|c| field.is_zero(c)) {
            coeffs.pop();
        }
        CycPoly { coeffs }
    }

    pub fn zero() -> Self {
        CycPoly { coeffs: Vec::new() }
    }

    pub fn from_qpoly(field: &CycloField, p: &QPoly) -> Self {
        let coeffs = p.coeffs().iter().map(|c| field.rational(c.clone())).collect();
        CycPoly::new(field, coeffs)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, field: &CycloField, k: usize) -> CycElem {
        self.coeffs.get(k).cloned().unwrap_or_else(|| field.zero())
    }

    pub fn add(&self, field: &CycloField, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|i| field.add(&self.coeff(field, i), &other.coeff(field, i)))
            .collect();
        CycPoly::new(field, coeffs)
    }

    pub fn sub(&self, field: &CycloField, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|i| field.sub(&self.coeff(field, i), &other.coeff(field, i)))
            .collect();
        CycPoly::new(field, coeffs)
    }

    pub fn mul(&self, field: &CycloField, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return CycPoly::zero();
        }
        let mut coeffs = vec![field.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                let prod = field.mul(a, b);
                coeffs[i + j] = field.add(&coeffs[i + j], &prod);
            }
        }
        CycPoly::new(field, coeffs)
    }

    pub fn derivative(&self, field: &CycloField) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| field.scale(c, &q(i as i64)))
            .collect();
        CycPoly::new(field, coeffs)
    }

    pub fn eval(&self, field: &CycloField, x: &CycElem) -> CycElem {
        let mut acc = field.zero();
        for c in self.coeffs.iter().rev() {
            acc = field.add(&field.mul(&acc, x), c);
        }
        acc
    }

    /// Euclidean division by a nonzero divisor; errors only if the divisor
    /// is zero. Exact over the field, so the remainder degree drops below
    /// the divisor degree.
    pub fn div_rem(&self, field: &CycloField, div: &Self) -> Result<(Self, Self)> {
        if div.is_zero() {
            return Err(Error::InvalidArgument("division by the zero polynomial".into()));
        }
        let d = div.coeffs.len() - 1;
        let lead_inv = field.inv(&div.coeffs[d])?;
        let mut rem = self.coeffs.clone();
        if rem.len() <= d {
            return Ok((CycPoly::zero(), self.clone()));
        }
        let mut quot = vec![field.zero(); rem.len() - d];
        for k in (d..rem.len()).rev() {
            let c = field.mul(&rem[k], &lead_inv);
            if field.is_zero(&c) {
                continue;
            }
            quot[k - d] = c.clone();
            for j in 0..=d {
                let t = field.mul(&c, &div.coeffs[j]);
                rem[k - d + j] = field.sub(&rem[k - d + j], &t);
            }
        }
        Ok((CycPoly::new(field, quot), CycPoly::new(field, rem)))
    }

    /// Applies a Galois conjugation to every coefficient.
    pub fn conjugate(&self, field: &CycloField, j: u64) -> Self {
        let coeffs = self.coeffs.iter().map(|c| field.conjugate(c, j)).collect();
        CycPoly::new(field, coeffs)
    }

    /// The product of all Galois conjugates, which has rational
    /// coefficients; any rational root of `self` is a root of the norm.
    pub fn norm_poly(&self, field: &CycloField) -> QPoly {
        let mut acc = CycPoly::from_qpoly(field, &QPoly::constant(q(1)));
        for j in field.galois_reps() {
            acc = acc.mul(field, &self.conjugate(field, j));
        }
        let coeffs = acc
            .coeffs
            .iter()
            .map(|c| {
                field
                    .as_rational(c)
                    .expect("norm of a polynomial has rational coefficients")
            })
            .collect();
        QPoly::new(coeffs)
    }
}
