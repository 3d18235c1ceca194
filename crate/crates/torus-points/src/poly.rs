//! Dense univariate polynomials over the rationals: exact arithmetic,
//! Euclidean division, composition, and rational root finding with
//! multiplicities via the rational root theorem.

use crate::cyclo::factor;
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeSet;
use std::fmt;

/// Polynomial in one variable with `BigRational` coefficients.
/// `coeffs[i]` multiplies `x^i`; the vector carries no trailing zeros, and
/// the zero polynomial is the empty vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QPoly {
    coeffs: Vec<BigRational>,
}

fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl QPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        QPoly { coeffs }
    }

    pub fn zero() -> Self {
        QPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: BigRational) -> Self {
        QPoly::new(vec![c])
    }

    pub fn x() -> Self {
        QPoly::new(vec![q(0), q(1)])
    }

    pub fn monomial(c: BigRational, k: usize) -> Self {
        let mut coeffs = vec![q(0); k + 1];
        coeffs[k] = c;
        QPoly::new(coeffs)
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        QPoly::new(coeffs.iter().map(|&c| q(c)).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// Coefficient of `x^k` (zero beyond the degree).
    pub fn coeff(&self, k: usize) -> BigRational {
        self.coeffs.get(k).cloned().unwrap_or_else(|| q(0))
    }

    pub fn leading(&self) -> Option<&BigRational> {
        self.coeffs.last()
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|i| self.coeff(i) + other.coeff(i)).collect();
        QPoly::new(coeffs)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|i| self.coeff(i) - other.coeff(i)).collect();
        QPoly::new(coeffs)
    }

    pub fn neg(&self) -> Self {
        QPoly { coeffs: self.coeffs.iter().map(|c| -c.clone()).collect() }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        QPoly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return QPoly::zero();
        }
        let mut coeffs = vec![q(0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        QPoly::new(coeffs)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = QPoly::constant(q(1));
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Euclidean division: `self = q*div + r` with `deg r < deg div`.
    /// Panics on a zero divisor.
    pub fn div_rem(&self, div: &Self) -> (Self, Self) {
        let dlead = div.leading().expect("division by zero polynomial");
        let ddeg = div.coeffs.len() - 1;
        let mut rem = self.coeffs.clone();
        let mut quot = vec![q(0); self.coeffs.len().saturating_sub(ddeg)];
        while rem.len() > ddeg {
            let k = rem.len() - 1 - ddeg;
            let c = rem.last().unwrap() / dlead;
            if !c.is_zero() {
                quot[k] = c.clone();
                for (i, d) in div.coeffs.iter().enumerate() {
                    let t = d * &c;
                    rem[k + i] -= t;
                }
            }
            rem.pop();
        }
        (QPoly::new(quot), QPoly::new(rem))
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * q(i as i64))
            .collect();
        QPoly::new(coeffs)
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = q(0);
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// `self(g(x))` by Horner in the outer variable.
    pub fn compose(&self, g: &Self) -> Self {
        let mut acc = QPoly::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(g).add(&QPoly::constant(c.clone()));
        }
        acc
    }

    /// Integer coefficients after clearing denominators (content not
    /// removed); empty for the zero polynomial.
    /// Scales so the leading coefficient is 1; zero stays zero.
    pub fn monic(&self) -> Self {
        match self.leading() {
            Some(l) if !l.is_one() => {
                let inv = l.recip();
                self.scale(&inv)
            }
            _ => self.clone(),
        }
    }

    /// Monic greatest common divisor (Euclidean algorithm over Q).
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Yun's square-free decomposition: returns monic pairwise-coprime
    /// square-free parts with their multiplicities, so that the input is a
    /// constant times the product of part^multiplicity.
    pub fn square_free_decomposition(&self) -> Vec<(QPoly, usize)> {
        assert!(!self.is_zero());
        let f = self.monic();
        if f.degree() == Some(0) {
            return Vec::new();
        }
        let mut out = Vec::new();
        let df = f.derivative();
        let a0 = f.gcd(&df);
        let mut b = f.div_rem(&a0).0;
        let mut c = df.div_rem(&a0).0;
        let mut d = c.sub(&b.derivative());
        let mut i = 1usize;
        while b.degree().unwrap_or(0) > 0 {
            let part = b.gcd(&d);
            b = b.div_rem(&part).0;
            c = d.div_rem(&part).0;
            d = c.sub(&b.derivative());
            if part.degree().unwrap_or(0) > 0 {
                out.push((part, i));
            }
            i += 1;
        }
        out
    }

    pub fn integer_coeffs(&self) -> Vec<BigInt> {
        let mut lcm = BigInt::one();
        for c in &self.coeffs {
            lcm = lcm.lcm(c.denom());
        }
        self.coeffs.iter().map(|c| (c * BigRational::from_integer(lcm.clone())).to_integer()).collect()
    }

    /// All rational roots with multiplicities, sorted ascending.
    pub fn rational_roots(&self) -> Result<Vec<(BigRational, usize)>> {
        if self.is_zero() {
            return Err(Error::InvalidArgument(
                "every rational is a root of the zero polynomial".into(),
            ));
        }
        let mut f = self.clone();
        let mut roots: Vec<(BigRational, usize)> = Vec::new();
        // strip roots at zero first so the constant term is nonzero
        let zero_mult = f.coeffs.iter().take_while(|c| c.is_zero()).count();
        if zero_mult > 0 {
            f = QPoly::new(f.coeffs[zero_mult..].to_vec());
            roots.push((q(0), zero_mult));
        }
        if f.degree() == Some(0) || f.is_zero() {
            roots.sort_by(|a, b| a.0.cmp(&b.0));
            return Ok(roots);
        }
        let ints = f.integer_coeffs();
        let lead_divs = divisors(&ints[ints.len() - 1])?;
        let const_divs = divisors(&ints[0])?;
        let mut candidates: BTreeSet<BigRational> = BTreeSet::new();
        for p in &const_divs {
            for qd in &lead_divs {
                let r = BigRational::new(p.clone(), qd.clone());
                candidates.insert(-r.clone());
                candidates.insert(r);
            }
        }
        for r in candidates {
            if !f.eval(&r).is_zero() {
                continue;
            }
            let lin = QPoly::new(vec![-r.clone(), q(1)]);
            let mut mult = 0usize;
            loop {
                let (quot, rem) = f.div_rem(&lin);
                if rem.is_zero() {
                    f = quot;
                    mult += 1;
                } else {
                    break;
                }
            }
            roots.push((r, mult));
        }
        roots.sort_by(|a, b| a.0.cmp(&b.0));
        Ok(roots)
    }
}

/// Positive divisors of a nonzero integer, via its prime factorization.
pub fn divisors(n: &BigInt) -> Result<Vec<BigInt>> {
    let factors = factor(n, crate::cyclo::DEFAULT_TRIAL_DIVISION_BOUND)?;
    let mut divs = vec![BigInt::one()];
    for (p, e) in factors {
        let mut next = Vec::with_capacity(divs.len() * (e as usize + 1));
        for d in &divs {
            let mut pk = BigInt::one();
            for _ in 0..=e {
                next.push(d * &pk);
                pk *= BigInt::from(p);
            }
        }
        divs = next;
    }
    Ok(divs)
}

impl fmt::Display for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else {
                write!(f, " {sign} ")?;
            }
            let mag_str = if mag.denom().is_one() {
                mag.numer().to_string()
            } else {
                format!("{}/{}", mag.numer(), mag.denom())
            };
            match i {
                0 => write!(f, "{mag_str}")?,
                _ => {
                    if mag.is_one() {
                        write!(f, "x")?;
                    } else {
                        write!(f, "{mag_str}*x")?;
                    }
                    if i > 1 {
                        write!(f, "^{i}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// Parses polynomials like `x^2 - 1`, `2*x^3 + x/2 - 3/4`, or `-x + 5` in
/// the named variable.
pub fn parse_qpoly(input: &str, var: char) -> Result<QPoly> {
    let s = input.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty polynomial".into()));
    }
    let mut acc = QPoly::zero();
    for (sign, term) in split_signed_terms(s)? {
        let t = parse_term(term.trim(), var)?;
        acc = if sign { acc.sub(&t) } else { acc.add(&t) };
    }
    Ok(acc)
}

/// Splits `a - b + c` into sign/term pairs at top level (no parens in this
/// grammar, so every `+`/`-` not directly after `^`, `*`, or `/` splits).
pub(crate) fn split_signed_terms(s: &str) -> Result<Vec<(bool, &str)>> {
    let bytes = s.as_bytes();
    let mut parts = Vec::new();
    let mut start = 0usize;
    let mut neg = false;
    let mut i = 0usize;
    while i < bytes.len() {
        let c = bytes[i];
        if c == b'+' || c == b'-' {
            let prev = s[..i].trim_end().bytes().last();
            let binds_left = matches!(prev, Some(b'^') | Some(b'*') | Some(b'/'));
            if !binds_left {
                if !s[start..i].trim().is_empty() {
                    parts.push((neg, &s[start..i]));
                }
                neg = c == b'-';
                start = i + 1;
            }
        }
        i += 1;
    }
    if s[start..].trim().is_empty() {
        return Err(Error::Parse(format!("dangling sign in {s:?}")));
    }
    parts.push((neg, &s[start..]));
    Ok(parts)
}

/// One product of rational constants and powers of the variable.
fn parse_term(term: &str, var: char) -> Result<QPoly> {
    if term.is_empty() {
        return Err(Error::Parse("empty term".into()));
    }
    let mut coeff = BigRational::one();
    let mut degree = 0usize;
    // split on '*' then each factor is either a rational (with optional /)
    // or var with optional ^k; a bare '/' inside a factor divides rationals.
    for piece in term.split('*') {
        let piece = piece.trim();
        if piece.is_empty() {
            return Err(Error::Parse(format!("empty factor in term {term:?}")));
        }
        if piece.starts_with(var) {
            let rest = piece[var.len_utf8()..].trim();
            if rest.is_empty() {
                degree += 1;
            } else if let Some(exp) = rest.strip_prefix('^') {
                let k: usize = exp
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad exponent in {piece:?}")))?;
                degree += k;
            } else if let Some(denoms) = rest.strip_prefix('/') {
                // `x/2` style: variable divided by a rational
                degree += 1;
                let d = parse_rational(denoms.trim())?;
                if d.is_zero() {
                    return Err(Error::Parse("division by zero".into()));
                }
                coeff /= d;
            } else {
                return Err(Error::Parse(format!("unexpected factor {piece:?}")));
            }
        } else if let Some(pos) = piece.find(var) {
            // adjacency like `2t` or `3t^2`: leading rational times a power
            let v = parse_rational(piece[..pos].trim())?;
            coeff *= v;
            let rest = piece[pos + var.len_utf8()..].trim();
            if rest.is_empty() {
                degree += 1;
            } else if let Some(exp) = rest.strip_prefix('^') {
                let k: usize = exp
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad exponent in {piece:?}")))?;
                degree += k;
            } else {
                return Err(Error::Parse(format!("unexpected factor {piece:?}")));
            }
        } else {
            let v = parse_rational(piece)?;
            coeff *= v;
        }
    }
    Ok(QPoly::monomial(coeff, degree))
}

/// Parses `a`, `a/b`, with optional sign.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let (num_s, den_s) = match s.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (s, "1"),
    };
    let num: BigInt =
        num_s.parse().map_err(|_| Error::Parse(format!("bad rational {s:?}")))?;
    let den: BigInt =
        den_s.parse().map_err(|_| Error::Parse(format!("bad rational {s:?}")))?;
    if den.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(BigRational::new(num, den))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn p(s: &str) -> QPoly {
        parse_qpoly(s, 'x').unwrap()
    }

    #[test]
    fn parse_and_display() {
        assert_eq!(p("x^2 - 1"), QPoly::from_i64(&[-1, 0, 1]));
        assert_eq!(p("-x + 1/2"), QPoly::new(vec![q(1) / q(2), q(-1)]));
        assert_eq!(p("2*x^3 + x/2 - 3/4"), {
            let mut c = vec![q(0); 4];
            c[0] = q(-3) / q(4);
            c[1] = q(1) / q(2);
            c[3] = q(2);
            QPoly::new(c)
        });
        for s in ["x^2 - 2", "x^3 + 2*x - 1", "-3*x^4 + x", "1/2"] {
            let v = p(s);
            assert_eq!(p(&v.to_string()), v, "roundtrip failed for {s}");
        }
    }

    #[test]
    fn ring_identities_randomized() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(44);
        let random = |rng: &mut rand_chacha::ChaCha8Rng| {
            let deg = rng.gen_range(0..5usize);
            QPoly::new((0..=deg).map(|_| q(rng.gen_range(-5i64..=5))).collect())
        };
        for _ in 0..300 {
            let a = random(&mut rng);
            let b = random(&mut rng);
            let c = random(&mut rng);
            assert_eq!(a.mul(&b), b.mul(&a));
            assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
            if !b.is_zero() {
                let (quot, rem) = a.div_rem(&b);
                assert_eq!(quot.mul(&b).add(&rem), a);
                assert!(rem.is_zero() || rem.degree() < b.degree());
            }
            // evaluation is a ring homomorphism
            let x = q(rng.gen_range(-4i64..=4));
            assert_eq!(a.mul(&b).eval(&x), a.eval(&x) * b.eval(&x));
            assert_eq!(a.compose(&b).eval(&x), a.eval(&b.eval(&x)));
        }
    }

    #[test]
    fn composition_example() {
        let f = p("x^2");
        let g = p("x + 1");
        assert_eq!(f.compose(&g), p("x^2 + 2*x + 1"));
    }

    #[test]
    fn derivative_rule() {
        let f = p("x^3 - 2*x + 5");
        assert_eq!(f.derivative(), p("3*x^2 - 2"));
        let g = p("x^2 + 1");
        let prod = f.mul(&g);
        assert_eq!(
            prod.derivative(),
            f.derivative().mul(&g).add(&f.mul(&g.derivative()))
        );
    }

    #[test]
    fn rational_roots_with_multiplicity() {
        // x * (x - 1/2)^2 * (x + 3)
        let f = QPoly::x()
            .mul(&p("x - 1/2").pow(2))
            .mul(&p("x + 3"));
        let roots = f.rational_roots().unwrap();
        assert_eq!(
            roots,
            vec![(q(-3), 1), (q(0), 1), (q(1) / q(2), 2)]
        );
        // irrational roots are simply not reported
        assert_eq!(p("x^2 - 2").rational_roots().unwrap(), vec![]);
        // the periodic-point classic: f(f(x)) - x for f = x^2 - 1
        let f = p("x^2 - 1");
        let f2 = f.compose(&f);
        let roots = f2.sub(&QPoly::x()).rational_roots().unwrap();
        let vals: Vec<BigRational> = roots.iter().map(|r| r.0.clone()).collect();
        assert_eq!(vals, vec![q(-1), q(0)]);
    }

    #[test]
    fn divisor_enumeration() {
        let mut d = divisors(&BigInt::from(12)).unwrap();
        d.sort();
        let want: Vec<BigInt> = [1, 2, 3, 4, 6, 12].iter().map(|&x| BigInt::from(x)).collect();
        assert_eq!(d, want);
    }

    #[test]
    fn adjacency_grammar() {
        assert_eq!(parse_qpoly("2t", 't').unwrap(), {
            QPoly::monomial(q(2), 1)
        });
        assert_eq!(parse_qpoly("3t^2 - 2t + 1", 't').unwrap(), {
            QPoly::new(vec![q(1), q(-2), q(3)])
        });
    }

    #[test]
    fn gcd_and_monic() {
        let f = p("x^2 - 1");
        let g = p("x^2 + 2*x + 1");
        assert_eq!(f.gcd(&g), p("x + 1"));
        assert_eq!(p("2*x^2 - 2").monic(), p("x^2 - 1"));
        // coprime pair
        assert_eq!(p("x - 1").gcd(&p("x + 1")), p("1"));
        // gcd with zero
        assert_eq!(p("2*x").gcd(&QPoly::zero()), p("x"));
    }

    #[test]
    fn square_free_parts() {
        // x * (x - 1/2)^2 * (x + 3)^3, scaled by a constant
        let f = QPoly::x()
            .mul(&p("x - 1/2").pow(2))
            .mul(&p("x + 3").pow(3))
            .scale(&(q(7) / q(3)));
        let parts = f.square_free_decomposition();
        assert_eq!(
            parts,
            vec![(p("x"), 1), (p("x - 1/2"), 2), (p("x + 3"), 3)]
        );
        // reassemble up to the constant
        let mut acc = QPoly::from_i64(&[1]);
        for (part, mult) in &parts {
            acc = acc.mul(&part.pow(*mult as u32));
        }
        assert_eq!(acc, f.monic());
        // square-free input comes back whole
        assert_eq!(
            p("x^2 - 2").square_free_decomposition(),
            vec![(p("x^2 - 2"), 1)]
        );
        assert!(p("5").square_free_decomposition().is_empty());
    }
}
