//! Exact arithmetic dynamics for polynomial self-maps of the line over
//! the rationals: canonical heights with certified error bounds,
//! periodicity detection, the commuting-polynomial search behind periodic
//! graph curves, Chebyshev/monomial conjugacy classification, and
//! intersection of plane curves with periodic curves.

use crate::error::{Error, Result};
use crate::fmt_sig;
use crate::laurent::{LaurentPoly, LaurentSystem};
use crate::poly::{parse_qpoly, QPoly};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::{BTreeSet, HashMap};

/// Default ceiling on the total bit size of an orbit value before exact
/// iteration refuses to continue. Orbit digits grow like d^k, so this is
/// the honest budget knob, not a convergence parameter.
pub const DEFAULT_DIGIT_CAP_BITS: u64 = 1 << 20;

/// A polynomial self-map of the affine line, degree at least two,
/// rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyMap {
    poly: QPoly,
}

impl PolyMap {
    pub fn new(poly: QPoly) -> Result<Self> {
        if poly.degree().unwrap_or(0) < 2 {
            return Err(Error::InvalidArgument(
                "a polynomial map needs degree at least 2".into(),
            ));
        }
        Ok(PolyMap { poly })
    }

    pub fn parse(input: &str) -> Result<Self> {
        PolyMap::new(parse_qpoly(input, 'x')?)
    }

    pub fn degree(&self) -> usize {
        self.poly.degree().expect("maps are nonconstant")
    }

    pub fn as_poly(&self) -> &QPoly {
        &self.poly
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.poly.eval(x)
    }

    /// The m-th iterate as a plain polynomial; `iterate(0)` is the
    /// identity.
    pub fn iterate(&self, m: u32) -> QPoly {
        let mut g = QPoly::x();
        for _ in 0..m {
            g = self.poly.compose(&g);
        }
        g
    }

    /// A constant with |h(f(x)) - d·h(x)| ≤ C for every rational x,
    /// computed from the coefficients. Writing f = (sum A_i x^i)/c over a
    /// common denominator c: the upper side is log max(sum |A_i|, c); the
    /// lower side controls cancellation (gcd of numerator and denominator
    /// divides c·A_d^d, prime by prime) and the smallness of the
    /// numerator (|f| ≥ δ·max(|p|,q)^d with δ = min(|A_d|/2, c/t^d) where
    /// t = max(1, 2·sum_{i<d}|A_i| / |A_d|)).
    pub fn height_constant(&self) -> f64 {
        let d = self.degree();
        let coeffs = self.poly.coeffs();
        let mut c = BigInt::one();
        for a in coeffs {
            c = num_integer::lcm(c, a.denom().clone());
        }
        let scaled: Vec<BigInt> = coeffs.iter().map(|a| (a * &c).to_integer()).collect();
        let lead = scaled[d].abs();
        let sum_abs: BigInt = scaled.iter().map(|a| a.abs()).sum();
        let lower_sum: BigInt = scaled[..d].iter().map(|a| a.abs()).sum();

        let one = BigRational::one();
        let t = {
            let ratio = BigRational::new(BigInt::from(2) * lower_sum, lead.clone());
            if ratio > one {
                ratio
            } else {
                one.clone()
            }
        };
        let mut t_pow = BigRational::one();
        for _ in 0..d {
            t_pow *= &t;
        }
        let delta = {
            let half_lead = BigRational::new(lead.clone(), 2.into());
            let c_over = BigRational::from_integer(c.clone()) / t_pow;
            if half_lead < c_over {
                half_lead
            } else {
                c_over
            }
        };
        let mut lead_pow = BigInt::one();
        for _ in 0..d {
            lead_pow *= &lead;
        }
        let lower = BigRational::from_integer(&c * lead_pow) / delta;
        let upper = BigRational::from_integer(if sum_abs > c { sum_abs } else { c });
        let worst = if lower > upper { lower } else { upper };
        rational_ln(&worst)
    }
}

impl std::fmt::Display for PolyMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.poly)
    }
}

/// Natural log of a positive rational, stable for values far beyond f64
/// range (top-53-bit mantissa plus a power-of-two correction).
fn rational_ln(x: &BigRational) -> f64 {
    big_ln(x.numer()) - big_ln(x.denom())
}

fn big_ln(n: &BigInt) -> f64 {
    let mag = n.magnitude();
    assert!(!mag.is_zero(), "log of zero");
    let bits = mag.bits();
    if bits <= 53 {
        return mag.to_f64().expect("small magnitude fits").ln();
    }
    let shift = bits - 53;
    let top = (mag >> shift).to_f64().expect("53-bit mantissa fits");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Absolute logarithmic height of a rational: log max(|numerator|,
/// denominator) in lowest terms.
pub fn rational_height(x: &BigRational) -> f64 {
    let num = x.numer().abs();
    let den = x.denom().clone();
    big_ln(&if num > den { num } else { den })
}

/// A canonical-height estimate carrying its own certificate: the true
/// limit differs from `value` by at most `error_bound`, which is
/// `height_constant / d^iterations`.
#[derive(Debug, Clone)]
pub struct CanonicalHeightEstimate {
    pub value: f64,
    pub iterations: usize,
    pub error_bound: f64,
    pub height_constant: f64,
}

impl CanonicalHeightEstimate {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "value": fmt_sig(self.value, 12),
            "iterations": self.iterations,
            "error_bound": fmt_sig(self.error_bound, 12),
            "height_constant": fmt_sig(self.height_constant, 12),
        })
    }
}

pub fn canonical_height(
    f: &PolyMap,
    a: &BigRational,
    target_err: f64,
) -> Result<CanonicalHeightEstimate> {
    canonical_height_capped(f, a, target_err, DEFAULT_DIGIT_CAP_BITS)
}

/// value = h(f^k(a)) / d^k with k minimal so the certified error bound
/// drops to `target_err`; exact rational iteration throughout. The digit
/// cap aborts orbits whose numerators outgrow the budget.
pub fn canonical_height_capped(
    f: &PolyMap,
    a: &BigRational,
    target_err: f64,
    cap_bits: u64,
) -> Result<CanonicalHeightEstimate> {
    if !(target_err > 0.0) {
        return Err(Error::InvalidArgument("target error must be positive".into()));
    }
    let d = f.degree() as f64;
    let height_constant = f.height_constant();
    let mut error_bound = height_constant;
    let mut k = 0usize;
    while error_bound > target_err {
        error_bound /= d;
        k += 1;
        if k > 100_000 {
            return Err(Error::InvalidArgument("target error is unreachably small".into()));
        }
    }
    let mut x = a.clone();
    for _ in 0..k {
        if x.numer().bits() + x.denom().bits() > cap_bits {
            return Err(Error::IterationOverflow { cap_bits });
        }
        x = f.eval(&x);
    }
    let h = if x.is_zero() { 0.0 } else { rational_height(&x) };
    let value = h / d.powi(k as i32);
    Ok(CanonicalHeightEstimate { value, iterations: k, error_bound, height_constant })
}

pub fn is_periodic(
    f: &PolyMap,
    a: &BigRational,
    max_iter: usize,
) -> Result<Option<(usize, usize)>> {
    is_periodic_capped(f, a, max_iter, DEFAULT_DIGIT_CAP_BITS)
}

/// Exact orbit walk with cycle detection: `(preperiod, period)` when the
/// orbit of `a` revisits a value within `max_iter` steps, None otherwise.
pub fn is_periodic_capped(
    f: &PolyMap,
    a: &BigRational,
    max_iter: usize,
    cap_bits: u64,
) -> Result<Option<(usize, usize)>> {
    let mut seen: HashMap<BigRational, usize> = HashMap::new();
    let mut x = a.clone();
    for i in 0..=max_iter {
        if let Some(&j) = seen.get(&x) {
            return Ok(Some((j, i - j)));
        }
        seen.insert(x.clone(), i);
        if x.numer().bits() + x.denom().bits() > cap_bits {
            return Err(Error::IterationOverflow { cap_bits });
        }
        x = f.eval(&x);
    }
    Ok(None)
}

/// Exact rational n-th roots of a rational: both signs for even n on
/// positive input, the single signed root for odd n, empty when no
/// rational root exists.
fn rational_nth_roots(q: &BigRational, n: u32) -> Vec<BigRational> {
    assert!(n >= 1);
    if q.is_zero() {
        return vec![BigRational::zero()];
    }
    if q.is_negative() && n % 2 == 0 {
        return Vec::new();
    }
    let num = q.numer().abs();
    let den = q.denom().clone();
    let num_root = num.nth_root(n);
    let den_root = den.nth_root(n);
    if num_pow(&num_root, n) != num || num_pow(&den_root, n) != den {
        return Vec::new();
    }
    let root = BigRational::new(num_root, den_root);
    if n % 2 == 0 {
        vec![root.clone(), -root]
    } else if q.is_negative() {
        vec![-root]
    } else {
        vec![root]
    }
}

fn num_pow(x: &BigInt, n: u32) -> BigInt {
    let mut out = BigInt::one();
    for _ in 0..n {
        out *= x;
    }
    out
}

/// All polynomials g with 1 ≤ deg g ≤ deg_bound commuting with some
/// iterate f^m, m ≤ iterate_bound. The coefficient system is triangular:
/// the leading coefficient satisfies g_e^(D-1) = F_D^(e-1) (D = d^m, F_D
/// the iterate's leading coefficient), and each further coefficient g_j is
/// pinned linearly by the x^((D-1)e+j) coefficient of F∘g - g∘F with
/// pivot D·F_D·g_e^(D-1). Every candidate is verified by exact expansion
/// before being reported.
pub fn commuting_polys(
    f: &PolyMap,
    deg_bound: usize,
    iterate_bound: u32,
) -> Result<Vec<QPoly>> {
    if deg_bound < 1 {
        return Err(Error::InvalidArgument("degree bound must be at least 1".into()));
    }
    if iterate_bound < 1 {
        return Err(Error::InvalidArgument("iterate bound must be at least 1".into()));
    }
    let mut seen: BTreeSet<String> = BTreeSet::new();
    let mut found: Vec<QPoly> = Vec::new();
    for m in 1..=iterate_bound {
        let big_f = f.iterate(m);
        let dd = big_f.degree().expect("iterates are nonconstant");
        let f_lead = big_f.leading().expect("iterates are nonzero").clone();
        for e in 1..=deg_bound {
            let mut lead_target = BigRational::one();
            for _ in 0..(e - 1) {
                lead_target *= &f_lead;
            }
            for ge in rational_nth_roots(&lead_target, (dd - 1) as u32) {
                if ge.is_zero() {
                    continue;
                }
                if let Some(g) = solve_commuting(&big_f, e, &ge) {
                    if seen.insert(g.to_string()) {
                        found.push(g);
                    }
                }
            }
        }
    }
    found.sort_by(|a, b| {
        a.degree()
            .cmp(&b.degree())
            .then_with(|| a.coeffs().cmp(b.coeffs()))
    });
    Ok(found)
}

fn solve_commuting(big_f: &QPoly, e: usize, ge: &BigRational) -> Option<QPoly> {
    let dd = big_f.degree()?;
    let f_lead = big_f.leading()?;
    let mut ge_pow = BigRational::one();
    for _ in 0..(dd - 1) {
        ge_pow *= ge;
    }
    let pivot = BigRational::from_integer(BigInt::from(dd)) * f_lead * &ge_pow;
    let mut coeffs = vec![BigRational::zero(); e + 1];
    coeffs[e] = ge.clone();
    for j in (0..e).rev() {
        let g = QPoly::new(coeffs.clone());
        let lhs = big_f.compose(&g);
        let rhs = g.compose(big_f);
        let k = (dd - 1) * e + j;
        coeffs[j] = (rhs.coeff(k) - lhs.coeff(k)) / &pivot;
    }
    let g = QPoly::new(coeffs);
    (big_f.compose(&g) == g.compose(big_f)).then_some(g)
}

/// An element a + b·sqrt(r) of a quadratic extension; r is a fixed
/// rational non-square (possibly negative — the arithmetic is purely
/// formal).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadExt {
    pub a: BigRational,
    pub b: BigRational,
    pub r: BigRational,
}

impl std::fmt::Display for QuadExt {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.b.is_zero() {
            return write!(f, "{}", self.a);
        }
        let radical = if self.b.is_one() {
            format!("sqrt({})", self.r)
        } else {
            format!("{}*sqrt({})", self.b, self.r)
        };
        if self.a.is_zero() {
            write!(f, "{radical}")
        } else {
            write!(f, "{} + {}", self.a, radical)
        }
    }
}

/// A coefficient of the conjugating map: rational, or genuinely quadratic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QuadVal {
    Rational(BigRational),
    Quadratic(QuadExt),
}

impl std::fmt::Display for QuadVal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            QuadVal::Rational(x) => write!(f, "{x}"),
            QuadVal::Quadratic(x) => write!(f, "{x}"),
        }
    }
}

/// The affine change of variable x ↦ alpha·x + beta.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineMap {
    pub alpha: QuadVal,
    pub beta: QuadVal,
}

impl AffineMap {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "alpha": self.alpha.to_string(),
            "beta": self.beta.to_string(),
        })
    }
}

impl std::fmt::Display for AffineMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({})*x + ({})", self.alpha, self.beta)
    }
}

/// The exceptional-map classification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Conjugacy {
    MonomialConjugate { sigma: AffineMap },
    ChebyshevConjugate { sigma: AffineMap, sign: i8 },
    Neither,
}

impl Conjugacy {
    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Conjugacy::MonomialConjugate { sigma } => serde_json::json!({
                "class": "monomial", "sigma": sigma.to_json(),
            }),
            Conjugacy::ChebyshevConjugate { sigma, sign } => serde_json::json!({
                "class": "chebyshev", "sigma": sigma.to_json(), "sign": sign,
            }),
            Conjugacy::Neither => serde_json::json!({ "class": "neither" }),
        }
    }
}

/// The degree-d Chebyshev-like polynomial normalized by T_2 = x² - 2
/// (T_d(z + 1/z) = z^d + 1/z^d): T_0 = 2, T_1 = x, T_{k+1} = x·T_k -
/// T_{k-1}.
pub fn chebyshev(d: usize) -> QPoly {
    let mut prev = QPoly::constant(BigRational::from_integer(2.into()));
    let mut cur = QPoly::x();
    if d == 0 {
        return prev;
    }
    for _ in 1..d {
        let next = QPoly::x().mul(&cur).sub(&prev);
        prev = cur;
        cur = next;
    }
    cur
}

// Internal quadratic-field arithmetic: (a, b) stands for a + b·sqrt(r)
// with the ambient r fixed by the caller.
type Quad = (BigRational, BigRational);

fn quad_add(x: &Quad, y: &Quad) -> Quad {
    (&x.0 + &y.0, &x.1 + &y.1)
}

fn quad_mul(x: &Quad, y: &Quad, r: &BigRational) -> Quad {
    (&x.0 * &y.0 + &x.1 * &y.1 * r, &x.0 * &y.1 + &x.1 * &y.0)
}

/// Decides whether f is affinely conjugate (over rational or quadratic
/// parameters) to x^d or to ±T_d, and produces the conjugating map: with
/// sigma = alpha·x + beta the identity sigma∘f = target∘sigma must hold
/// exactly; alpha satisfies alpha^(d-1) = f_d / lead(target), beta is then
/// forced to alpha·f_{d-1}/(d·f_d) because the target has no x^(d-1)
/// term.
pub fn chebyshev_or_monomial(f: &PolyMap) -> Conjugacy {
    let d = f.degree();
    let targets: Vec<(QPoly, bool, i8)> = vec![
        (QPoly::monomial(BigRational::one(), d), true, 0),
        (chebyshev(d), false, 1),
        (chebyshev(d).neg(), false, -1),
    ];
    for (target, is_monomial, sign) in targets {
        for (alpha, beta, r) in sigma_candidates(f, &target) {
            if verify_conjugacy(f, &target, &alpha, &beta, &r) {
                let sigma = AffineMap { alpha: to_quadval(alpha, &r), beta: to_quadval(beta, &r) };
                return if is_monomial {
                    Conjugacy::MonomialConjugate { sigma }
                } else {
                    Conjugacy::ChebyshevConjugate { sigma, sign }
                };
            }
        }
    }
    Conjugacy::Neither
}

fn to_quadval(x: Quad, r: &BigRational) -> QuadVal {
    if x.1.is_zero() {
        QuadVal::Rational(x.0)
    } else {
        QuadVal::Quadratic(QuadExt { a: x.0, b: x.1, r: r.clone() })
    }
}

/// Candidate (alpha, beta) pairs with the radicand of their quadratic
/// part. Rational alphas come from exact (d-1)-th roots; for even d-1,
/// alpha² itself can be any rational (d-1)/2-th root u, giving the
/// quadratic candidate alpha = sqrt(u) when u is not a perfect square.
fn sigma_candidates(f: &PolyMap, target: &QPoly) -> Vec<(Quad, Quad, BigRational)> {
    let d = f.degree();
    let fd = f.as_poly().coeff(d);
    let lead_t = target.leading().expect("targets are nonzero").clone();
    let s = fd.clone() / &lead_t;
    // beta = rho * alpha with rational rho, from the vanishing x^(d-1)
    // coefficient of the target
    let rho = f.as_poly().coeff(d - 1)
        / (BigRational::from_integer(BigInt::from(d)) * &fd);
    let dummy_r = BigRational::from_integer(2.into());
    let mut out: Vec<(Quad, Quad, BigRational)> = Vec::new();
    for alpha in rational_nth_roots(&s, (d - 1) as u32) {
        if alpha.is_zero() {
            continue;
        }
        let beta = &rho * &alpha;
        out.push((
            (alpha, BigRational::zero()),
            (beta, BigRational::zero()),
            dummy_r.clone(),
        ));
    }
    if (d - 1) % 2 == 0 {
        for u in rational_nth_roots(&s, ((d - 1) / 2) as u32) {
            if u.is_zero() || !rational_nth_roots(&u, 2).is_empty() {
                continue; // perfect squares already covered rationally
            }
            // alpha = sqrt(u): a=0, b=1, radicand u
            let alpha = (BigRational::zero(), BigRational::one());
            let beta = (BigRational::zero(), rho.clone());
            out.push((alpha, beta, u));
        }
    }
    out
}

/// Exact check of alpha·f(x) + beta = target(alpha·x + beta) with
/// coefficients in Q(sqrt(r)).
fn verify_conjugacy(
    f: &PolyMap,
    target: &QPoly,
    alpha: &Quad,
    beta: &Quad,
    r: &BigRational,
) -> bool {
    let zero: Quad = (BigRational::zero(), BigRational::zero());
    // left side: alpha * f + beta
    let mut lhs: Vec<Quad> = f
        .as_poly()
        .coeffs()
        .iter()
        .map(|c| quad_mul(alpha, &(c.clone(), BigRational::zero()), r))
        .collect();
    lhs[0] = quad_add(&lhs[0], beta);
    // right side: Horner evaluation of target at (alpha x + beta)
    let t_coeffs = target.coeffs();
    let top = t_coeffs.last().expect("targets are nonzero");
    let mut rhs: Vec<Quad> = vec![(top.clone(), BigRational::zero())];
    for c in t_coeffs.iter().rev().skip(1) {
        // rhs = rhs * (alpha x + beta) + c
        let mut next = vec![zero.clone(); rhs.len() + 1];
        for (i, q) in rhs.iter().enumerate() {
            next[i + 1] = quad_add(&next[i + 1], &quad_mul(q, alpha, r));
            next[i] = quad_add(&next[i], &quad_mul(q, beta, r));
        }
        next[0] = quad_add(&next[0], &(c.clone(), BigRational::zero()));
        rhs = next;
    }
    if lhs.len() != rhs.len() {
        return false;
    }
    lhs.iter().zip(rhs.iter()).all(|(x, y)| x == y)
}

/// An affine rational plane point with its height (max of the coordinate
/// heights).
#[derive(Debug, Clone, PartialEq)]
pub struct AffinePoint {
    pub x: BigRational,
    pub y: BigRational,
    pub height: f64,
}

impl AffinePoint {
    fn new(x: BigRational, y: BigRational) -> Self {
        let height = rational_height(&x).max(rational_height(&y));
        AffinePoint { x, y, height }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "x": self.x.to_string(),
            "y": self.y.to_string(),
            "height": fmt_sig(self.height, 12),
        })
    }
}

/// Outcome of intersecting the curve with one periodic graph y = g(x).
#[derive(Debug, Clone)]
pub enum GraphOutcome {
    /// The curve contains the whole graph. `identity` marks the g = x
    /// case, a degenerate hit rather than a genuinely periodic curve.
    Contained { identity: bool },
    Roots { points: Vec<AffinePoint>, residual: usize },
}

#[derive(Debug, Clone)]
pub struct GraphFamily {
    pub g: QPoly,
    pub outcome: GraphOutcome,
}

/// Full report of the periodic-curve intersection search.
#[derive(Debug, Clone)]
pub struct PeriodicIntersection {
    /// Rational values with f-periodic orbit (period within the degree
    /// bound), sorted.
    pub periodic_x: Vec<BigRational>,
    pub sup_periodic_height: f64,
    /// Vertical lines x = ζ entirely inside the curve.
    pub vertical_contained: Vec<BigRational>,
    pub graphs: Vec<GraphFamily>,
    /// Union of all intersection points found, first-seen order.
    pub points: Vec<AffinePoint>,
    pub max_point_height: f64,
    pub residual: usize,
}

impl PeriodicIntersection {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "periodic_x": self.periodic_x.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
            "sup_periodic_height": fmt_sig(self.sup_periodic_height, 12),
            "vertical_contained":
                self.vertical_contained.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
            "graphs": self.graphs.iter().map(|fam| {
                let outcome = match &fam.outcome {
                    GraphOutcome::Contained { identity } => serde_json::json!({
                        "contained": true, "identity": identity,
                    }),
                    GraphOutcome::Roots { points, residual } => serde_json::json!({
                        "points": points.iter().map(AffinePoint::to_json).collect::<Vec<_>>(),
                        "residual_degree": residual,
                    }),
                };
                serde_json::json!({ "g": fam.g.to_string(), "outcome": outcome })
            }).collect::<Vec<_>>(),
            "points": self.points.iter().map(AffinePoint::to_json).collect::<Vec<_>>(),
            "max_point_height": fmt_sig(self.max_point_height, 12),
            "residual_degree": self.residual,
        })
    }
}

/// Evaluates a polynomial Laurent equation at an affine rational pair.
fn affine_eval(eq: &LaurentPoly, x: &BigRational, y: &BigRational) -> Result<BigRational> {
    let mut total = BigRational::zero();
    for (exps, coeff) in eq.terms() {
        let mut term = coeff.clone();
        for (value, &e) in [x, y].iter().zip(exps.iter()) {
            if e < 0 {
                return Err(Error::UnsupportedShape(
                    "affine intersections need polynomial equations".into(),
                ));
            }
            for _ in 0..e {
                term *= *value;
            }
        }
        total += term;
    }
    Ok(total)
}

/// Substitutes y = g(x) (or a constant x = ζ, via `swap`) into a
/// polynomial Laurent equation, producing a univariate polynomial.
fn substitute_graph(eq: &LaurentPoly, g: &QPoly) -> Result<QPoly> {
    let mut total = QPoly::zero();
    for (exps, coeff) in eq.terms() {
        if exps.iter().any(|&e| e < 0) {
            return Err(Error::UnsupportedShape(
                "affine intersections need polynomial equations".into(),
            ));
        }
        let mut term = QPoly::monomial(coeff.clone(), exps[0] as usize);
        term = term.mul(&g.pow(exps[1] as u32));
        total = total.add(&term);
    }
    Ok(total)
}

fn substitute_vertical(eq: &LaurentPoly, zeta: &BigRational) -> Result<QPoly> {
    let mut total = QPoly::zero();
    for (exps, coeff) in eq.terms() {
        if exps.iter().any(|&e| e < 0) {
            return Err(Error::UnsupportedShape(
                "affine intersections need polynomial equations".into(),
            ));
        }
        let mut c = coeff.clone();
        for _ in 0..exps[0] {
            c *= zeta;
        }
        total = total.add(&QPoly::monomial(c, exps[1] as usize));
    }
    Ok(total)
}

/// Intersects an affine plane curve with the periodic curves of f:
/// vertical lines x = ζ at rational f-periodic ζ (periods up to
/// deg_bound), and graphs y = g(x) for g commuting with f or f². The map
/// must be classified neither Chebyshev- nor monomial-conjugate first;
/// otherwise its periodic curves are not constrained to these families
/// and the search errors out.
pub fn curve_periodic_intersection(
    x: &LaurentSystem,
    f: &PolyMap,
    deg_bound: usize,
) -> Result<PeriodicIntersection> {
    if x.ambient != 2 {
        return Err(Error::UnsupportedShape(
            "periodic-curve intersection works in the plane".into(),
        ));
    }
    if deg_bound < 1 {
        return Err(Error::InvalidArgument("degree bound must be at least 1".into()));
    }
    if !matches!(chebyshev_or_monomial(f), Conjugacy::Neither) {
        return Err(Error::ClassificationGate(
            "the map is conjugate to a monomial or Chebyshev polynomial",
        ));
    }

    // rational periodic x-values: rational fixed points of the iterates
    let mut periodic_set: BTreeSet<BigRational> = BTreeSet::new();
    for k in 1..=deg_bound {
        let fixed = f.iterate(k as u32).sub(&QPoly::x());
        for (root, _) in fixed.rational_roots()? {
            periodic_set.insert(root);
        }
    }
    let periodic_x: Vec<BigRational> = periodic_set.into_iter().collect();
    let sup_periodic_height =
        periodic_x.iter().map(rational_height).fold(0.0, f64::max);

    let mut all_points: Vec<AffinePoint> = Vec::new();
    let mut seen: BTreeSet<(BigRational, BigRational)> = BTreeSet::new();
    let mut residual = 0usize;
    let mut vertical_contained: Vec<BigRational> = Vec::new();

    let mut push_point = |pt: AffinePoint, all: &mut Vec<AffinePoint>| {
        if seen.insert((pt.x.clone(), pt.y.clone())) {
            all.push(pt);
        }
    };

    // vertical family
    for zeta in &periodic_x {
        let substituted: Vec<QPoly> = x
            .equations
            .iter()
            .map(|eq| substitute_vertical(eq, zeta))
            .collect::<Result<_>>()?;
        let Some(poly) = substituted.iter().find(|p| !p.is_zero()) else {
            vertical_contained.push(zeta.clone());
            continue;
        };
        let mut found = 0usize;
        for (y0, mult) in poly.rational_roots()? {
            let on_curve = x
                .equations
                .iter()
                .map(|eq| affine_eval(eq, zeta, &y0))
                .collect::<Result<Vec<_>>>()?
                .iter()
                .all(BigRational::is_zero);
            if on_curve {
                push_point(AffinePoint::new(zeta.clone(), y0), &mut all_points);
            }
            found += mult;
        }
        residual += poly.degree().unwrap_or(0) - found;
    }

    // graph family: g commuting with f or f^2
    let mut graphs: Vec<GraphFamily> = Vec::new();
    for g in commuting_polys(f, deg_bound, 2)? {
        let substituted: Vec<QPoly> = x
            .equations
            .iter()
            .map(|eq| substitute_graph(eq, &g))
            .collect::<Result<_>>()?;
        if substituted.iter().all(QPoly::is_zero) {
            let identity = g == QPoly::x();
            graphs.push(GraphFamily { g, outcome: GraphOutcome::Contained { identity } });
            continue;
        }
        let poly = substituted.iter().find(|p| !p.is_zero()).expect("checked nonzero");
        let mut points: Vec<AffinePoint> = Vec::new();
        let mut found = 0usize;
        for (x0, mult) in poly.rational_roots()? {
            let y0 = g.eval(&x0);
            let on_curve = x
                .equations
                .iter()
                .map(|eq| affine_eval(eq, &x0, &y0))
                .collect::<Result<Vec<_>>>()?
                .iter()
                .all(BigRational::is_zero);
            if on_curve {
                let pt = AffinePoint::new(x0, y0);
                points.push(pt.clone());
                push_point(pt, &mut all_points);
            }
            found += mult;
        }
        let graph_residual = poly.degree().unwrap_or(0) - found;
        residual += graph_residual;
        graphs.push(GraphFamily {
            g,
            outcome: GraphOutcome::Roots { points, residual: graph_residual },
        });
    }

    let max_point_height = all_points.iter().map(|p| p.height).fold(0.0, f64::max);
    Ok(PeriodicIntersection {
        periodic_x,
        sup_periodic_height,
        vertical_contained,
        graphs,
        points: all_points,
        max_point_height,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    fn qr(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn map(s: &str) -> PolyMap {
        PolyMap::parse(s).unwrap()
    }

    #[test]
    fn height_constant_square_minus_one() {
        // sum |A_i| = 2 on the upper side; t = 2, delta = 1/4, so the
        // lower side is log 4 and wins
        let f = map("x^2 - 1");
        assert!((f.height_constant() - 4f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn canonical_height_at_periodic_points() {
        let f = map("x^2 - 1");
        for a in [q(0), q(-1)] {
            let est = canonical_height(&f, &a, 1e-9).unwrap();
            assert!(est.value <= 1e-9, "periodic point has positive estimate");
            assert!(est.iterations <= 40, "needed {} iterations", est.iterations);
            assert!(est.error_bound <= 1e-9);
        }
    }

    #[test]
    fn canonical_height_growth_point() {
        let f = map("x^2 - 1");
        let coarse = canonical_height(&f, &q(2), 1e-4).unwrap();
        let fine = canonical_height(&f, &q(2), 1e-6).unwrap();
        assert!(coarse.value > 0.4);
        assert!(fine.iterations >= 15);
        assert!((coarse.value - fine.value).abs() <= coarse.error_bound + fine.error_bound);
    }

    #[test]
    fn functional_equation_residuals() {
        let f = map("x^2 - 1");
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..25 {
            let a = qr(rng.gen_range(-9..=9), rng.gen_range(1..=9));
            let fa = f.eval(&a);
            let ha = canonical_height(&f, &a, 1e-3).unwrap();
            let hfa = canonical_height(&f, &fa, 1e-3).unwrap();
            let residual = (hfa.value - 2.0 * ha.value).abs();
            assert!(
                residual <= hfa.error_bound + 2.0 * ha.error_bound + 1e-12,
                "functional equation fails at {a}: residual {residual}"
            );
        }
    }

    #[test]
    fn digit_cap_guards_runaway_orbits() {
        let f = map("x^2 - 1");
        match canonical_height_capped(&f, &q(3), 1e-9, 256) {
            Err(Error::IterationOverflow { cap_bits: 256 }) => {}
            other => panic!("expected overflow, got {other:?}"),
        }
    }

    #[test]
    fn periodicity_detection() {
        let f = map("x^2 - 1");
        assert_eq!(is_periodic(&f, &q(0), 10).unwrap(), Some((0, 2)));
        assert_eq!(is_periodic(&f, &q(1), 10).unwrap(), Some((1, 2)));
        assert_eq!(is_periodic(&f, &q(2), 12).unwrap(), None);
        match is_periodic_capped(&f, &q(2), 50, 64) {
            Err(Error::IterationOverflow { .. }) => {}
            other => panic!("expected overflow, got {other:?}"),
        }
    }

    #[test]
    fn chebyshev_construction() {
        assert_eq!(chebyshev(2), QPoly::from_i64(&[-2, 0, 1]));
        assert_eq!(chebyshev(3), QPoly::from_i64(&[0, -3, 0, 1]));
        // the defining semigroup property T_2 ∘ T_3 = T_3 ∘ T_2 = T_6
        assert_eq!(chebyshev(2).compose(&chebyshev(3)), chebyshev(6));
        assert_eq!(chebyshev(3).compose(&chebyshev(2)), chebyshev(6));
    }

    #[test]
    fn commuting_search_examples() {
        let t2 = map("x^2 - 2");
        let found = commuting_polys(&t2, 3, 1).unwrap();
        let display: Vec<String> = found.iter().map(|g| g.to_string()).collect();
        assert_eq!(display, vec!["x", "x^2 - 2", "x^3 - 3*x"]);
        for g in &found {
            assert_eq!(t2.as_poly().compose(g), g.compose(t2.as_poly()));
        }

        let generic = map("x^2 + 1");
        let found = commuting_polys(&generic, 2, 1).unwrap();
        let display: Vec<String> = found.iter().map(|g| g.to_string()).collect();
        assert_eq!(display, vec!["x", "x^2 + 1"]);

        // only the identity commutes with x^2 in degree 1
        let found = commuting_polys(&map("x^2"), 1, 1).unwrap();
        assert_eq!(found, vec![QPoly::x()]);
    }

    #[test]
    fn classification_triple() {
        match chebyshev_or_monomial(&map("x^3")) {
            Conjugacy::MonomialConjugate { sigma } => {
                assert_eq!(sigma.alpha, QuadVal::Rational(q(1)));
                assert_eq!(sigma.beta, QuadVal::Rational(q(0)));
            }
            other => panic!("x^3 misclassified: {other:?}"),
        }
        match chebyshev_or_monomial(&map("2x^2 - 1")) {
            Conjugacy::ChebyshevConjugate { sigma, sign } => {
                assert_eq!(sign, 1);
                assert_eq!(sigma.alpha, QuadVal::Rational(q(2)));
                assert_eq!(sigma.beta, QuadVal::Rational(q(0)));
            }
            other => panic!("2x^2-1 misclassified: {other:?}"),
        }
        assert_eq!(chebyshev_or_monomial(&map("x^2 + 1")), Conjugacy::Neither);
    }

    #[test]
    fn classification_roundtrip_and_quadratic_sigma() {
        // sigma-conjugates of x^d with rational alpha come back monomial
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..30 {
            let d = rng.gen_range(2..=4usize);
            let alpha = loop {
                let a = qr(rng.gen_range(-6..=6), rng.gen_range(1..=4));
                if !a.is_zero() {
                    break a;
                }
            };
            let beta = qr(rng.gen_range(-6..=6), rng.gen_range(1..=4));
            // f = sigma^{-1} ∘ x^d ∘ sigma, expanded rationally
            let sigma_x = QPoly::new(vec![beta.clone(), alpha.clone()]);
            let powered = QPoly::monomial(BigRational::one(), d).compose(&sigma_x);
            let f = powered
                .sub(&QPoly::constant(beta.clone()))
                .scale(&alpha.recip());
            match chebyshev_or_monomial(&PolyMap::new(f).unwrap()) {
                Conjugacy::MonomialConjugate { .. } => {}
                other => panic!("round-trip failed: {other:?}"),
            }
        }

        // 2x^3 - 3x = sigma^{-1} T_3 sigma with sigma = sqrt(2)x needs the
        // quadratic parameter
        match chebyshev_or_monomial(&map("2x^3 - 3x")) {
            Conjugacy::ChebyshevConjugate { sigma, sign } => {
                assert_eq!(sign, 1);
                match sigma.alpha {
                    QuadVal::Quadratic(ref ext) => {
                        assert!(ext.a.is_zero());
                        assert!(ext.b.is_one());
                        assert_eq!(ext.r, q(2));
                    }
                    ref other => panic!("expected quadratic alpha, got {other}"),
                }
            }
            other => panic!("2x^3-3x misclassified: {other:?}"),
        }
    }

    #[test]
    fn line_intersection_report() {
        let f = map("x^2 - 1");
        let x = LaurentSystem::parse("x + y - 1", 2).unwrap();
        let report = curve_periodic_intersection(&x, &f, 2).unwrap();
        assert_eq!(report.periodic_x, vec![q(-1), q(0)]);
        assert!(report.sup_periodic_height.abs() < 1e-12);
        let vertical: Vec<&AffinePoint> = report
            .points
            .iter()
            .filter(|p| report.periodic_x.contains(&p.x))
            .collect();
        let found: Vec<(String, String)> =
            vertical.iter().map(|p| (p.x.to_string(), p.y.to_string())).collect();
        assert!(found.contains(&("0".into(), "1".into())));
        assert!(found.contains(&("-1".into(), "2".into())));
        assert!(vertical.iter().all(|p| p.height <= 2f64.ln() + 1e-12));
    }

    #[test]
    fn graph_family_outcomes() {
        let f = map("x^2 - 1");

        // y = x: contained via the identity graph, irrational residual
        // from g = f
        let diag = LaurentSystem::parse("y - x", 2).unwrap();
        let report = curve_periodic_intersection(&diag, &f, 2).unwrap();
        let identity_contained = report.graphs.iter().any(|fam| {
            matches!(fam.outcome, GraphOutcome::Contained { identity: true })
        });
        assert!(identity_contained);
        let f_family = report
            .graphs
            .iter()
            .find(|fam| fam.g == *f.as_poly())
            .expect("f appears in its own commuting list");
        match &f_family.outcome {
            GraphOutcome::Roots { points, residual } => {
                assert!(points.is_empty());
                assert_eq!(*residual, 2);
            }
            other => panic!("unexpected {other:?}"),
        }

        // y = f(x): genuinely contained in a periodic curve
        let graph = LaurentSystem::parse("y - x^2 + 1", 2).unwrap();
        let report = curve_periodic_intersection(&graph, &f, 2).unwrap();
        assert!(report.graphs.iter().any(|fam| {
            matches!(fam.outcome, GraphOutcome::Contained { identity: false })
        }));
    }

    #[test]
    fn classification_gate() {
        let x = LaurentSystem::parse("x + y - 1", 2).unwrap();
        match curve_periodic_intersection(&x, &map("x^3"), 2) {
            Err(Error::ClassificationGate(_)) => {}
            other => panic!("expected gate failure, got {other:?}"),
        }
    }
}
