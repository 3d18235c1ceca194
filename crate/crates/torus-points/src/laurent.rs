//! Input types on the variety side: Laurent polynomials in several torus
//! variables, univariate rational functions over the rationals, and curves
//! given by a tuple of coordinate functions.

use crate::cyclo::{CycloRational, TorusPoint};
use crate::cyclotomic::{CycPoly, CycloField};
use crate::error::{Error, Result};
use crate::poly::{parse_qpoly, parse_rational, split_signed_terms, QPoly};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// A Laurent polynomial in `n` torus variables: a finite map from integer
/// exponent vectors to nonzero rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaurentPoly {
    n: usize,
    terms: BTreeMap<Vec<i64>, BigRational>,
}

impl LaurentPoly {
    pub fn new(n: usize, terms: impl IntoIterator<Item = (Vec<i64>, BigRational)>) -> Self {
        let mut map: BTreeMap<Vec<i64>, BigRational> = BTreeMap::new();
        for (e, c) in terms {
            assert_eq!(e.len(), n, "exponent vector length mismatch");
            let entry = map.entry(e).or_insert_with(BigRational::zero);
            *entry += c;
        }
        map.retain(|_, c| !c.is_zero());
        LaurentPoly { n, terms: map }
    }

    pub fn zero(n: usize) -> Self {
        LaurentPoly { n, terms: BTreeMap::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i64>, &BigRational)> {
        self.terms.iter()
    }

    /// True when every exponent is nonnegative (an honest polynomial).
    pub fn is_polynomial(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&x| x >= 0))
    }

    /// The total degree over nonnegative-exponent terms (0 for the zero
    /// polynomial); callers should check `is_polynomial` first when the
    /// affine reading matters.
    pub fn total_degree(&self) -> i64 {
        self.terms
            .keys()
            .map(|e| e.iter().sum::<i64>())
            .max()
            .unwrap_or(0)
    }

    /// Exact evaluation at a point with cyclotomic-rational coordinates.
    /// The sum is formed in `Q(zeta_N)` for `N` the lcm of the coordinate
    /// torsion orders.
    pub fn vanishes_at(&self, p: &TorusPoint) -> Result<bool> {
        if p.dim() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "point dimension {} vs equation in {} variables",
                p.dim(),
                self.n
            )));
        }
        let mut order = 1u64;
        for c in &p.coords {
            order = order.lcm(&c.torsion_order());
        }
        let field = CycloField::new(order);
        let mut acc = field.zero();
        for (e, coeff) in &self.terms {
            let mut value = CycloRational::one();
            for (c, &k) in p.coords.iter().zip(e) {
                value = value.mul(&c.pow(k)?)?;
            }
            let embedded = field.embed_cyclo(&value)?;
            acc = field.add(&acc, &field.scale(&embedded, coeff));
        }
        Ok(field.is_zero(&acc))
    }

    /// Substitutes the one-parameter monomial family
    /// `x_i = translate_i * t^(exps_i)` and collects the result as a
    /// polynomial in `t` times a power shift: returns `(field, poly, shift)`
    /// with the substituted Laurent polynomial equal to `t^shift * poly`,
    /// `poly` having a nonzero constant term, with coefficients in
    /// `Q(zeta_N)` for `N` the lcm of the translate's torsion orders.
    pub fn substitute_line(
        &self,
        translate: &TorusPoint,
        exps: &[i64],
    ) -> Result<(CycloField, CycPoly, i64)> {
        assert_eq!(translate.dim(), self.n);
        assert_eq!(exps.len(), self.n);
        let mut order = 1u64;
        for c in &translate.coords {
            order = order.lcm(&c.torsion_order());
        }
        let field = CycloField::new(order);
        let mut collected: BTreeMap<i64, crate::cyclotomic::CycElem> = BTreeMap::new();
        for (e, coeff) in &self.terms {
            let mut t_exp = 0i64;
            let mut constant = CycloRational::one();
            for i in 0..self.n {
                let part = e[i]
                    .checked_mul(exps[i])
                    .ok_or(Error::Overflow("substitution exponent"))?;
                t_exp = t_exp
                    .checked_add(part)
                    .ok_or(Error::Overflow("substitution exponent"))?;
                constant = constant.mul(&translate.coords[i].pow(e[i])?)?;
            }
            let embedded = field.scale(&field.embed_cyclo(&constant)?, coeff);
            let slot = collected.entry(t_exp).or_insert_with(|| field.zero());
            *slot = field.add(slot, &embedded);
        }
        collected.retain(|_, c| !field.is_zero(c));
        let Some((&lo, _)) = collected.first_key_value() else {
            return Ok((field, CycPoly::zero(), 0));
        };
        let hi = *collected.last_key_value().expect("nonempty").0;
        let mut coeffs = vec![field.zero(); (hi - lo) as usize + 1];
        for (k, c) in &collected {
            coeffs[(k - lo) as usize] = c.clone();
        }
        let poly = CycPoly::new(&field, coeffs);
        Ok((field, poly, lo))
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            let neg = c.is_negative();
            let abs = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mut pieces: Vec<String> = Vec::new();
            if !abs.is_one() || e.iter().all(|&x| x == 0) {
                pieces.push(abs.to_string());
            }
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let var = variable_name(i, self.n);
                if k == 1 {
                    pieces.push(var);
                } else {
                    pieces.push(format!("{var}^{k}"));
                }
            }
            write!(f, "{}", pieces.join("*"))?;
        }
        Ok(())
    }
}

fn variable_name(i: usize, n: usize) -> String {
    if n <= 2 {
        ["x", "y"][i].to_string()
    } else {
        format!("x{}", i + 1)
    }
}

/// Parses a Laurent polynomial in `n` variables. Variables are `x1..x9`,
/// with `x` and `y` accepted as aliases for `x1` and `x2`; exponents are
/// (possibly negative) integers after `^`; factors within a term are
/// separated by `*` (a rational coefficient may also sit directly against
/// a variable, as in `2x`).
pub fn parse_laurent(input: &str, n: usize) -> Result<LaurentPoly> {
    let s = input.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty Laurent polynomial".into()));
    }
    let mut terms: Vec<(Vec<i64>, BigRational)> = Vec::new();
    for (negated, term) in split_signed_terms(s)? {
        let (e, c) = parse_laurent_term(term.trim(), n)?;
        terms.push((e, if negated { -c } else { c }));
    }
    Ok(LaurentPoly::new(n, terms))
}

fn parse_laurent_term(term: &str, n: usize) -> Result<(Vec<i64>, BigRational)> {
    if term.is_empty() {
        return Err(Error::Parse("empty term".into()));
    }
    let mut coeff = BigRational::one();
    let mut exps = vec![0i64; n];
    for piece in term.split('*') {
        let piece = piece.trim();
        if piece.is_empty() {
            return Err(Error::Parse(format!("empty factor in term {term:?}")));
        }
        match piece.find(|c: char| c.is_ascii_alphabetic()) {
            None => coeff *= parse_rational(piece)?,
            Some(0) => parse_variable_power(piece, n, &mut exps)?,
            Some(pos) => {
                coeff *= parse_rational(piece[..pos].trim())?;
                parse_variable_power(piece[pos..].trim(), n, &mut exps)?;
            }
        }
    }
    Ok((exps, coeff))
}

fn parse_variable_power(piece: &str, n: usize, exps: &mut [i64]) -> Result<()> {
    let (var, rest) = match piece.find('^') {
        Some(i) => (piece[..i].trim(), Some(piece[i + 1..].trim())),
        None => (piece.trim(), None),
    };
    let index = match var {
        "x" => 0,
        "y" => 1,
        _ => match var.strip_prefix('x').and_then(|d| d.parse::<usize>().ok()) {
            Some(k) if k >= 1 => k - 1,
            _ => return Err(Error::Parse(format!("unknown variable {var:?}"))),
        },
    };
    if index >= n {
        return Err(Error::Parse(format!(
            "variable {var:?} exceeds ambient dimension {n}"
        )));
    }
    let k: i64 = match rest {
        None => 1,
        Some(e) => e
            .parse()
            .map_err(|_| Error::Parse(format!("bad exponent in {piece:?}")))?,
    };
    exps[index] = exps[index]
        .checked_add(k)
        .ok_or(Error::Overflow("variable exponent"))?;
    Ok(())
}

/// A list of simultaneous Laurent equations in a shared ambient dimension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaurentSystem {
    pub ambient: usize,
    pub equations: Vec<LaurentPoly>,
}

impl LaurentSystem {
    pub fn new(ambient: usize, equations: Vec<LaurentPoly>) -> Result<Self> {
        if equations.is_empty() {
            return Err(Error::InvalidArgument("system needs at least one equation".into()));
        }
        for eq in &equations {
            if eq.ambient_dim() != ambient {
                return Err(Error::DimensionMismatch(
                    "equation ambient dimension mismatch".into(),
                ));
            }
            if eq.is_zero() {
                return Err(Error::InvalidArgument(
                    "identically zero equation in system".into(),
                ));
            }
        }
        Ok(LaurentSystem { ambient, equations })
    }

    /// Parses a `;`-separated list of equations.
    pub fn parse(input: &str, ambient: usize) -> Result<Self> {
        let equations = input
            .split(';')
            .map(|part| parse_laurent(part, ambient))
            .collect::<Result<Vec<_>>>()?;
        LaurentSystem::new(ambient, equations)
    }

    pub fn vanishes_at(&self, p: &TorusPoint) -> Result<bool> {
        for eq in &self.equations {
            if !eq.vanishes_at(p)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// A univariate rational function `num/den` over the rationals, kept
/// reduced (coprime parts, monic denominator).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalFunction {
    num: QPoly,
    den: QPoly,
}

impl RationalFunction {
    pub fn new(num: QPoly, den: QPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::InvalidArgument("zero denominator".into()));
        }
        if num.is_zero() {
            return Ok(RationalFunction { num, den: QPoly::from_i64(&[1]) });
        }
        let g = num.gcd(&den);
        let mut num = num.div_rem(&g).0;
        let mut den = den.div_rem(&g).0;
        let lead = den.leading().expect("nonzero denominator").clone();
        if !lead.is_one() {
            let inv = lead.recip();
            num = num.scale(&inv);
            den = den.scale(&inv);
        }
        Ok(RationalFunction { num, den })
    }

    pub fn from_poly(p: QPoly) -> Self {
        RationalFunction { num: p, den: QPoly::from_i64(&[1]) }
    }

    pub fn num(&self) -> &QPoly {
        &self.num
    }

    pub fn den(&self) -> &QPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_constant(&self) -> bool {
        self.num.degree().unwrap_or(0) == 0 && self.den.degree() == Some(0)
    }

    /// Order of vanishing at infinity: `deg den - deg num` (negative for a
    /// pole). Zero functions have no meaningful order; callers exclude them.
    pub fn order_at_infinity(&self) -> i64 {
        self.den.degree().unwrap_or(0) as i64 - self.num.degree().unwrap_or(0) as i64
    }

    /// Exact evaluation; `None` at a pole.
    pub fn eval(&self, t: &BigRational) -> Option<BigRational> {
        let d = self.den.eval(t);
        if d.is_zero() {
            return None;
        }
        Some(self.num.eval(t) / d)
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.degree() == Some(0) && self.den.coeff(0).is_one() {
            return write!(f, "{}", display_in_t(&self.num));
        }
        write!(f, "({})/({})", display_in_t(&self.num), display_in_t(&self.den))
    }
}

fn display_in_t(p: &QPoly) -> String {
    p.to_string().replace('x', "t")
}

/// Parses `poly`, `poly/(poly)`, or `(poly)/(poly)` in the variable `t`.
/// A top-level `/` only splits numerator from denominator when it borders
/// a parenthesis; otherwise it is the in-term rational division of the
/// polynomial grammar (`t/2`).
pub fn parse_rational_function(input: &str) -> Result<RationalFunction> {
    let s = input.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty rational function".into()));
    }
    let bytes = s.as_bytes();
    let mut depth = 0i32;
    let mut split_at: Option<usize> = None;
    for (i, &b) in bytes.iter().enumerate() {
        match b {
            b'(' => depth += 1,
            b')' => depth -= 1,
            b'/' if depth == 0 => {
                let before = s[..i].trim_end().ends_with(')');
                let after = s[i + 1..].trim_start().starts_with('(');
                if before || after {
                    split_at = Some(i);
                    break;
                }
            }
            _ => {}
        }
        if depth < 0 {
            return Err(Error::Parse(format!("unbalanced parentheses in {s:?}")));
        }
    }
    match split_at {
        None => Ok(RationalFunction::from_poly(parse_qpoly(strip_parens(s), 't')?)),
        Some(i) => {
            let num = parse_qpoly(strip_parens(&s[..i]), 't')?;
            let den = parse_qpoly(strip_parens(&s[i + 1..]), 't')?;
            RationalFunction::new(num, den)
        }
    }
}

/// Removes one layer of surrounding parentheses if it encloses the whole
/// expression.
fn strip_parens(s: &str) -> &str {
    let s = s.trim();
    if !(s.starts_with('(') && s.ends_with(')')) {
        return s;
    }
    let inner = &s[1..s.len() - 1];
    let mut depth = 0i32;
    for b in inner.bytes() {
        match b {
            b'(' => depth += 1,
            b')' => depth -= 1,
            _ => {}
        }
        if depth < 0 {
            return s; // the outer parens do not match each other
        }
    }
    inner.trim()
}

/// A curve given parametrically by coordinate functions `t -> (f_1..f_n)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamCurve {
    pub coords: Vec<RationalFunction>,
}

impl ParamCurve {
    pub fn new(coords: Vec<RationalFunction>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidArgument("curve needs at least one coordinate".into()));
        }
        if coords.iter().any(RationalFunction::is_zero) {
            return Err(Error::InvalidArgument(
                "coordinate function identically zero".into(),
            ));
        }
        Ok(ParamCurve { coords })
    }

    /// Parses a comma-separated coordinate list such as `t, 1-t`.
    pub fn parse(input: &str) -> Result<Self> {
        let coords = input
            .split(',')
            .map(parse_rational_function)
            .collect::<Result<Vec<_>>>()?;
        ParamCurve::new(coords)
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

impl fmt::Display for ParamCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclo::{parse_point, DEFAULT_TRIAL_DIVISION_BOUND};

    fn lp(s: &str) -> LaurentPoly {
        parse_laurent(s, 2).unwrap()
    }

    fn pt(s: &str) -> TorusPoint {
        parse_point(s, DEFAULT_TRIAL_DIVISION_BOUND).unwrap()
    }

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn parsing_and_display() {
        let f = lp("x + y - 1");
        assert_eq!(f.terms().count(), 3);
        assert_eq!(lp(&f.to_string()), f);

        let g = lp("x*y^-1 - 1");
        assert_eq!(
            g,
            LaurentPoly::new(2, vec![(vec![1, -1], q(1)), (vec![0, 0], q(-1))])
        );
        assert_eq!(lp("x1*x2^-1 - 1"), g);
        assert_eq!(lp(&g.to_string()), g);

        assert_eq!(lp("2x - y"), LaurentPoly::new(2, vec![(vec![1, 0], q(2)), (vec![0, 1], q(-1))]));
        // like terms collapse, cancellations vanish
        assert!(lp("x - x").is_zero());
        assert!(parse_laurent("x3", 2).is_err());
        assert!(parse_laurent("z + 1", 2).is_err());
    }

    #[test]
    fn exact_evaluation() {
        let f = lp("x + y - 1");
        assert!(f.vanishes_at(&pt("(1/2, 1/2)")).unwrap());
        assert!(f.vanishes_at(&pt("(zeta(6,1), zeta(6,5))")).unwrap());
        assert!(f.vanishes_at(&pt("(2, -1)")).unwrap());
        assert!(!f.vanishes_at(&pt("(1, 1)")).unwrap());

        let g = lp("x*y^-1 - 1");
        assert!(g.vanishes_at(&pt("(5, 5)")).unwrap());
        assert!(!g.vanishes_at(&pt("(5, -5)")).unwrap());
    }

    #[test]
    fn line_substitution() {
        // x = t, y = 1/t in x + y - 1 gives t^-1 * (t^2 - t + 1)
        let f = lp("x + y - 1");
        let one = pt("(1, 1)");
        let (field, poly, shift) = f.substitute_line(&one, &[1, -1]).unwrap();
        assert_eq!(shift, -1);
        assert_eq!(poly.degree(), Some(2));
        let as_rational: Vec<BigRational> = (0..3)
            .map(|k| field.as_rational(&poly.coeff(&field, k)).unwrap())
            .collect();
        assert_eq!(as_rational, vec![q(1), q(-1), q(1)]);

        // x = -t, y = t in x - y gives -2t: torsion translate folds in
        let g = lp("x - y");
        let tr = pt("(-1, 1)");
        let (field, poly, shift) = g.substitute_line(&tr, &[1, 1]).unwrap();
        assert_eq!(shift, 1);
        assert_eq!(poly.degree(), Some(0));
        assert_eq!(field.as_rational(&poly.coeff(&field, 0)), Some(q(-2)));

        // identical vanishing: x - y on the diagonal
        let (_, poly, _) = g.substitute_line(&one, &[1, 1]).unwrap();
        assert!(poly.is_zero());
    }

    #[test]
    fn system_parsing() {
        let sys = LaurentSystem::parse("x + y - 1; x - y", 2).unwrap();
        assert_eq!(sys.equations.len(), 2);
        assert!(LaurentSystem::parse("x - x", 2).is_err());
        assert!(sys.vanishes_at(&pt("(1/2, 1/2)")).unwrap());
        assert!(!sys.vanishes_at(&pt("(2, -1)")).unwrap());
    }

    #[test]
    fn rational_function_reduction_and_eval() {
        let f = parse_rational_function("(t^2 - 1)/(t - 1)").unwrap();
        assert_eq!(f, RationalFunction::from_poly(parse_qpoly("t + 1", 't').unwrap()));

        let g = parse_rational_function("t/(1 - t)").unwrap();
        assert_eq!(g.eval(&q(2)), Some(q(-2)));
        assert_eq!(g.eval(&q(1)), None);
        // denominator is normalized monic: t/(1-t) = (-t)/(t-1)
        assert_eq!(g.num(), &parse_qpoly("-t", 't').unwrap());
        assert_eq!(g.den(), &parse_qpoly("t - 1", 't').unwrap());
        assert_eq!(g.order_at_infinity(), 0);
        assert_eq!(parse_rational_function("t^2").unwrap().order_at_infinity(), -2);
        assert_eq!(parse_rational_function("1/(t^3)").unwrap().order_at_infinity(), 3);

        // `t/2` stays a polynomial: the slash binds inside the term
        let h = parse_rational_function("t/2 + 1").unwrap();
        assert_eq!(h, RationalFunction::from_poly(parse_qpoly("t/2 + 1", 't').unwrap()));

        assert!(parse_rational_function("t/(t - t)").is_err());
    }

    #[test]
    fn param_curve_parsing() {
        let c = ParamCurve::parse("t, 1 - t").unwrap();
        assert_eq!(c.dim(), 2);
        assert_eq!(c.coords[0].eval(&q(3)), Some(q(3)));
        assert_eq!(c.coords[1].eval(&q(3)), Some(q(-2)));
        assert!(ParamCurve::parse("t, t - t").is_err());
        let c = ParamCurve::parse("2t, 3t").unwrap();
        assert_eq!(c.coords[0].eval(&q(1)), Some(q(2)));
    }
}
