//! Desk-scale intersection of explicit plane curves with algebraic
//! subgroups of the two-torus: exact root extraction over the
//! torsion-times-rational model, the divisor-based character finders for
//! parametrized curves, and the bounded subgroup sieves (plain and
//! Γ-translated).

use crate::cyclo::{CycloRational, TorusPoint};
use crate::cyclotomic::{cyclotomic_poly, euler_phi, CycPoly, CycloField};
use crate::error::{Error, Result};
use crate::fmt_sig;
use crate::lattice::Lattice;
use crate::laurent::{LaurentSystem, ParamCurve};
use crate::matrix::IntMatrix;
use crate::poly::QPoly;
use crate::relations::{group_decomposition_mod_gamma, GammaGroup};
use crate::subgroup::{enumerate_all_subgroups, AlgebraicSubgroup};
use crate::witness::character_as_fraction;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use std::collections::BTreeSet;

/// Exact roots of a univariate polynomial that lie in the
/// torsion-times-rational model, with multiplicities, plus the degree left
/// over (roots that exist over the algebraic closure but are not captured
/// by the model search — never silently dropped).
#[derive(Debug, Clone)]
pub struct ModelRoots {
    pub roots: Vec<(CycloRational, usize)>,
    pub residual_degree: usize,
}

fn root_sort_key(c: &CycloRational) -> (u64, u64, BigRational) {
    (c.torsion_order(), c.torsion_exp(), c.free_rational())
}

/// The orders `m ≥ 3` whose primitive roots of unity could be roots of a
/// polynomial of the given degree: `phi(m) ≤ deg`.
fn candidate_torsion_orders(deg: usize) -> Vec<u64> {
    let deg = deg as u64;
    // phi(m) ≥ sqrt(m/2), so phi(m) ≤ d forces m ≤ 2d² (and m = 2d² only
    // for powers of two); the scan is cheap at desk scale
    (3..=2 * deg * deg + 2).filter(|&m| euler_phi(m) <= deg).collect()
}

/// Root search over the rationals: rational roots by the rational-root
/// theorem, roots of unity by testing divisibility by the cyclotomic
/// polynomial of every order that the degree allows. Orders 1 and 2 are
/// already covered by the rational search.
pub fn model_roots_rational(f: &QPoly, trial_bound: u64) -> Result<ModelRoots> {
    assert!(!f.is_zero(), "root search needs a nonzero polynomial");
    let mut found = 0usize;
    let mut roots: Vec<(CycloRational, usize)> = Vec::new();
    for (r, mult) in f.rational_roots()? {
        if r.is_zero() {
            // the substitution pipeline never passes polynomials with a
            // zero constant term; a zero root is outside the torus anyway
            continue;
        }
        roots.push((CycloRational::from_rational(&r, trial_bound)?, mult));
        found += mult;
    }
    let mut reduced = f.clone();
    for m in candidate_torsion_orders(f.degree().unwrap_or(0)) {
        let phi = cyclotomic_poly(m);
        let mut mult = 0usize;
        loop {
            let (quot, rem) = reduced.div_rem(&phi);
            if !rem.is_zero() {
                break;
            }
            reduced = quot;
            mult += 1;
        }
        if mult > 0 {
            for u in 1..m {
                if m.gcd(&u) == 1 {
                    roots.push((CycloRational::root_of_unity(m, u as i64)?, mult));
                    found += mult;
                }
            }
        }
    }
    roots.sort_by_key(|(c, _)| root_sort_key(c));
    let degree = f.degree().unwrap_or(0);
    Ok(ModelRoots { roots, residual_degree: degree.saturating_sub(found) })
}

/// The same search for a polynomial with cyclotomic coefficients: rational
/// candidates come from the rational roots of the Galois norm, roots of
/// unity from exact evaluation in the compositum field; multiplicities by
/// repeated division.
pub fn model_roots_cyclotomic(
    field: &CycloField,
    f: &CycPoly,
    trial_bound: u64,
) -> Result<ModelRoots> {
    assert!(!f.is_zero(), "root search needs a nonzero polynomial");
    let degree = f.degree().unwrap_or(0);
    let mut found = 0usize;
    let mut roots: Vec<(CycloRational, usize)> = Vec::new();

    let norm = f.norm_poly(field);
    for (r, _) in norm.rational_roots()? {
        if r.is_zero() {
            continue;
        }
        let candidate = field.rational(r.clone());
        let mult = root_multiplicity(field, f, &candidate)?;
        if mult > 0 {
            roots.push((CycloRational::from_rational(&r, trial_bound)?, mult));
            found += mult;
        }
    }

    for m in candidate_torsion_orders(degree) {
        let big_n = lcm_u64(field.n(), m);
        let big = CycloField::new(big_n);
        let lifted_coeffs: Vec<_> = f.coeffs.iter().map(|c| big.lift(c, field)).collect();
        let lifted = CycPoly::new(&big, lifted_coeffs);
        for u in 1..m {
            if m.gcd(&u) != 1 {
                continue;
            }
            let zeta = big.zeta_pow(((big_n / m) * u) as i64);
            let mult = root_multiplicity(&big, &lifted, &zeta)?;
            if mult > 0 {
                roots.push((CycloRational::root_of_unity(m, u as i64)?, mult));
                found += mult;
            }
        }
    }

    roots.sort_by_key(|(c, _)| root_sort_key(c));
    Ok(ModelRoots { roots, residual_degree: degree.saturating_sub(found) })
}

fn lcm_u64(a: u64, b: u64) -> u64 {
    a / a.gcd(&b) * b
}

/// Multiplicity of `x` as a root of `f`, by repeated exact division by the
/// linear factor.
fn root_multiplicity(field: &CycloField, f: &CycPoly, x: &crate::cyclotomic::CycElem) -> Result<usize> {
    if !field.is_zero(&f.eval(field, x)) {
        return Ok(0);
    }
    let linear = CycPoly::new(field, vec![field.neg(x), field.one()]);
    let mut mult = 0usize;
    let mut current = f.clone();
    loop {
        let (quot, rem) = current.div_rem(field, &linear)?;
        if !rem.is_zero() {
            break;
        }
        mult += 1;
        current = quot;
        if current.is_zero() {
            break;
        }
    }
    Ok(mult)
}

/// A place in the divisor support of a curve's coordinate functions: a
/// rational point of the line, a monic irreducible factor standing for its
/// conjugate orbit, or the point at infinity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DivisorAtom {
    Rational(BigRational),
    Irreducible(QPoly),
    Infinity,
}

impl DivisorAtom {
    /// Residue degree: how many geometric points the atom stands for.
    pub fn degree(&self) -> usize {
        match self {
            DivisorAtom::Rational(_) => 1,
            DivisorAtom::Irreducible(p) => p.degree().unwrap_or(0),
            DivisorAtom::Infinity => 1,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            DivisorAtom::Rational(r) => serde_json::json!({
                "type": "rational", "value": r.to_string(),
            }),
            DivisorAtom::Irreducible(p) => serde_json::json!({
                "type": "irreducible", "poly": p.to_string().replace('x', "t"),
            }),
            DivisorAtom::Infinity => serde_json::json!({ "type": "infinity" }),
        }
    }
}

impl std::fmt::Display for DivisorAtom {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DivisorAtom::Rational(r) => write!(f, "t = {r}"),
            DivisorAtom::Irreducible(p) => {
                write!(f, "{{{} = 0}}", p.to_string().replace('x', "t"))
            }
            DivisorAtom::Infinity => write!(f, "infinity"),
        }
    }
}

/// Zero/pole bookkeeping for the coordinate functions of a curve: one row
/// per support atom, one column per coordinate, entries the multiplicities.
/// Weighted by residue degree, every column sums to zero.
#[derive(Debug, Clone)]
pub struct DivisorTable {
    pub atoms: Vec<DivisorAtom>,
    pub multiplicities: IntMatrix,
}

impl DivisorTable {
    pub fn build(curve: &ParamCurve) -> Result<DivisorTable> {
        let n = curve.dim();
        let mut atoms: Vec<DivisorAtom> = Vec::new();
        let mut entries: Vec<Vec<(usize, i64)>> = Vec::new(); // per column
        for f in &curve.coords {
            let mut col: Vec<(usize, i64)> = Vec::new();
            for (atom, mult) in factor_into_atoms(f.num())? {
                col.push((atom_index(&mut atoms, atom), mult as i64));
            }
            for (atom, mult) in factor_into_atoms(f.den())? {
                col.push((atom_index(&mut atoms, atom), -(mult as i64)));
            }
            let at_infinity = f.order_at_infinity();
            if at_infinity != 0 {
                col.push((atom_index(&mut atoms, DivisorAtom::Infinity), at_infinity));
            }
            entries.push(col);
        }
        let mut m = IntMatrix::zero(atoms.len(), n);
        for (j, col) in entries.iter().enumerate() {
            for &(i, v) in col {
                m[(i, j)] = &m[(i, j)] + BigInt::from(v);
            }
        }
        let table = DivisorTable { atoms, multiplicities: m };
        debug_assert!(table.columns_balance());
        Ok(table)
    }

    /// Degree-weighted column sums are zero: a principal divisor has
    /// degree zero.
    pub fn columns_balance(&self) -> bool {
        let n = self.multiplicities.cols();
        (0..n).all(|j| {
            let sum: BigInt = self
                .atoms
                .iter()
                .enumerate()
                .map(|(i, a)| &self.multiplicities[(i, j)] * BigInt::from(a.degree()))
                .sum();
            sum.is_zero()
        })
    }

    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<serde_json::Value> = self
            .atoms
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let mults: Vec<String> = (0..self.multiplicities.cols())
                    .map(|j| self.multiplicities[(i, j)].to_string())
                    .collect();
                serde_json::json!({ "atom": a.to_json(), "multiplicities": mults })
            })
            .collect();
        serde_json::json!(rows)
    }
}

fn atom_index(atoms: &mut Vec<DivisorAtom>, atom: DivisorAtom) -> usize {
    if let Some(i) = atoms.iter().position(|a| *a == atom) {
        i
    } else {
        atoms.push(atom);
        atoms.len() - 1
    }
}

/// Factors a rational polynomial into divisor atoms with multiplicities:
/// square-free decomposition, then per square-free part rational roots,
/// cyclotomic factors, and a leftover cofactor that is certified
/// irreducible when its degree is at most three (no rational root
/// remains). Higher-degree non-cyclotomic cofactors are outside the exact
/// factoring this artifact supports.
fn factor_into_atoms(p: &QPoly) -> Result<Vec<(DivisorAtom, usize)>> {
    let mut out: Vec<(DivisorAtom, usize)> = Vec::new();
    if p.degree().unwrap_or(0) == 0 {
        return Ok(out);
    }
    for (part, mult) in p.square_free_decomposition() {
        let mut remaining = part.clone();
        for (r, root_mult) in part.rational_roots()? {
            debug_assert_eq!(root_mult, 1, "square-free part has simple roots");
            let linear = QPoly::new(vec![-r.clone(), BigRational::one()]);
            remaining = remaining.div_rem(&linear).0;
            out.push((DivisorAtom::Rational(r), mult));
        }
        for m in candidate_torsion_orders(remaining.degree().unwrap_or(0)) {
            let phi = cyclotomic_poly(m);
            let (quot, rem) = remaining.div_rem(&phi);
            if rem.is_zero() {
                remaining = quot;
                out.push((DivisorAtom::Irreducible(phi), mult));
            }
        }
        match remaining.degree().unwrap_or(0) {
            0 => {}
            1 => unreachable!("linear factors always have a rational root"),
            2 | 3 => out.push((DivisorAtom::Irreducible(remaining.monic()), mult)),
            d => {
                return Err(Error::UnsupportedShape(format!(
                    "cannot certify the factorization of a degree-{d} cofactor"
                )))
            }
        }
    }
    Ok(out)
}

/// A character that is constant along the curve: a nonzero integer vector
/// `a` with `prod f_i^(a_i)` constant, i.e. the coordinate divisors admit
/// an integer relation. Returns the first Hermite basis vector of the
/// relation kernel (content- and sign-normalized) with the constant value,
/// or None when the divisors are independent.
pub fn coset_containment(
    curve: &ParamCurve,
    trial_bound: u64,
) -> Result<Option<(Vec<BigInt>, CycloRational)>> {
    let table = DivisorTable::build(curve)?;
    let kernel = crate::lattice::left_kernel(&table.multiplicities.transpose());
    let Some(first) = kernel.first() else {
        return Ok(None);
    };
    let a = normalize_character(first);
    let (num, den) = character_as_fraction(curve, &a)?;
    let c0 = num.leading().expect("character numerator is nonzero")
        / den.leading().expect("character denominator is nonzero");
    debug_assert_eq!(num, den.scale(&c0), "character must be constant");
    let constant = CycloRational::from_rational(&c0, trial_bound)?;
    Ok(Some((a, constant)))
}

fn normalize_character(v: &[BigInt]) -> Vec<BigInt> {
    let mut content = BigInt::zero();
    for x in v {
        content = content.gcd(x);
    }
    let mut out: Vec<BigInt> = if content > BigInt::one() {
        v.iter().map(|x| x / &content).collect()
    } else {
        v.to_vec()
    };
    if let Some(first) = out.iter().find(|x| !x.is_zero()) {
        if first.is_negative() {
            out = out.iter().map(|x| -x).collect();
        }
    }
    out
}

/// One finding of the divisor-pair search.
#[derive(Debug, Clone)]
pub struct CharacterFinding {
    pub character: Vec<BigInt>,
    pub kind: CharacterKind,
}

#[derive(Debug, Clone)]
pub enum CharacterKind {
    /// Zero divisor: the character is constant along the curve, excluded
    /// from the point-pair list by the injectivity rule.
    Degenerate,
    /// The divisor is `m((zero) - (pole))` with `m ≥ 1`.
    PointPair { m: BigInt, zero: DivisorAtom, pole: DivisorAtom },
}

impl CharacterFinding {
    pub fn to_json(&self) -> serde_json::Value {
        let character: Vec<String> = self.character.iter().map(|x| x.to_string()).collect();
        match &self.kind {
            CharacterKind::Degenerate => serde_json::json!({
                "character": character, "kind": "degenerate",
            }),
            CharacterKind::PointPair { m, zero, pole } => serde_json::json!({
                "character": character,
                "kind": "point-pair",
                "m": m.to_string(),
                "zero": zero.to_json(),
                "pole": pole.to_json(),
            }),
        }
    }
}

/// Finds the primitive characters whose divisor along the curve is
/// supported on exactly two degree-one places, `m((Y) - (Z))`, plus the
/// degenerate (constant) characters. The pair search is exhaustive over
/// degree-one atoms of the divisor table (conjugate orbits of higher
/// degree cannot carry a single-point difference).
pub fn find_primitive_characters(curve: &ParamCurve) -> Result<Vec<CharacterFinding>> {
    let table = DivisorTable::build(curve)?;
    let n = curve.dim();
    let mut findings: Vec<CharacterFinding> = Vec::new();
    let mut seen: BTreeSet<String> = BTreeSet::new();

    for v in crate::lattice::left_kernel(&table.multiplicities.transpose()) {
        let a = normalize_character(&v);
        if seen.insert(format!("deg:{a:?}")) {
            findings.push(CharacterFinding { character: a, kind: CharacterKind::Degenerate });
        }
    }

    let degree_one: Vec<usize> = (0..table.atoms.len())
        .filter(|&i| table.atoms[i].degree() == 1)
        .collect();
    for (pos, &yi) in degree_one.iter().enumerate() {
        for &zi in &degree_one[pos + 1..] {
            // kernel of the table restricted to every *other* atom row
            let other_rows: Vec<Vec<BigInt>> = (0..table.atoms.len())
                .filter(|&i| i != yi && i != zi)
                .map(|i| {
                    (0..n).map(|j| table.multiplicities[(i, j)].clone()).collect()
                })
                .collect();
            let restricted = IntMatrix::from_rows_with_cols(&other_rows, n);
            for v in crate::lattice::left_kernel(&restricted.transpose()) {
                let a = normalize_character(&v);
                let mult_y: BigInt = (0..n)
                    .map(|j| &table.multiplicities[(yi, j)] * &a[j])
                    .sum();
                if mult_y.is_zero() {
                    continue; // degenerate direction, reported above
                }
                let (zero, pole, m) = if mult_y.is_positive() {
                    (table.atoms[yi].clone(), table.atoms[zi].clone(), mult_y.clone())
                } else {
                    (table.atoms[zi].clone(), table.atoms[yi].clone(), -&mult_y)
                };
                if seen.insert(format!("pair:{a:?}:{zero}:{pole}")) {
                    findings.push(CharacterFinding {
                        character: a,
                        kind: CharacterKind::PointPair { m, zero, pole },
                    });
                }
            }
        }
    }
    Ok(findings)
}

/// The outcome of intersecting a curve with one (possibly translated)
/// subgroup: finitely many model points with residual degree bookkeeping,
/// or the signal that a whole component translate lies inside the curve.
#[derive(Debug, Clone)]
pub enum IntersectOutcome {
    Finite { points: Vec<TorusPoint>, residual: usize },
    Contained { component: TorusPoint },
}

/// Intersects a curve system in the two-torus with an algebraic subgroup
/// of dimension zero or one, exactly. Dimension-one subgroups are handled
/// component by component through the monomial parametrization; an
/// identically vanishing substitution reports containment.
pub fn intersect_curve_subgroup(
    x: &LaurentSystem,
    h: &AlgebraicSubgroup,
    trial_bound: u64,
) -> Result<IntersectOutcome> {
    intersect_translated(x, h, None, trial_bound)
}

/// As `intersect_curve_subgroup`, with every component representative
/// multiplied by an extra translate (the Γ-coset version).
fn intersect_translated(
    x: &LaurentSystem,
    h: &AlgebraicSubgroup,
    gamma: Option<&TorusPoint>,
    trial_bound: u64,
) -> Result<IntersectOutcome> {
    if x.ambient != 2 || h.ambient_dim() != 2 {
        return Err(Error::UnsupportedShape(
            "curve-subgroup intersection works in the two-torus".into(),
        ));
    }
    if h.dimension() > 1 {
        return Err(Error::InvalidArgument(
            "intersection needs a subgroup of dimension 0 or 1".into(),
        ));
    }
    let reps = h.component_representatives()?;
    let translates: Vec<TorusPoint> = match gamma {
        None => reps,
        Some(g) => reps.iter().map(|r| g.mul(r)).collect::<Result<_>>()?,
    };

    if h.dimension() == 0 {
        let mut points = Vec::new();
        for t in translates {
            if x.vanishes_at(&t)? {
                points.push(t);
            }
        }
        return Ok(IntersectOutcome::Finite { points, residual: 0 });
    }

    let map = h.identity_component().parametrize();
    let exps: Vec<i64> = (0..2)
        .map(|i| {
            map.exponents[(i, 0)]
                .to_i64()
                .ok_or(Error::Overflow("parametrization exponent"))
        })
        .collect::<Result<_>>()?;

    let mut points = Vec::new();
    let mut residual = 0usize;
    for translate in translates {
        let mut substituted = Vec::with_capacity(x.equations.len());
        for eq in &x.equations {
            substituted.push(eq.substitute_line(&translate, &exps)?);
        }
        let Some((field, poly, _)) = substituted.iter().find(|(_, p, _)| !p.is_zero())
        else {
            return Ok(IntersectOutcome::Contained { component: translate });
        };
        let model = if field.n() <= 2 {
            // coefficients are rational: use the direct search
            let coeffs: Vec<BigRational> = poly
                .coeffs
                .iter()
                .map(|c| field.as_rational(c).expect("degree-one field"))
                .collect();
            model_roots_rational(&QPoly::new(coeffs), trial_bound)?
        } else {
            model_roots_cyclotomic(field, poly, trial_bound)?
        };
        residual += model.residual_degree;
        for (t0, _) in model.roots {
            let coords: Vec<CycloRational> = (0..2)
                .map(|i| {
                    let base = t0.pow(exps[i])?;
                    translate.coords[i].mul(&base)
                })
                .collect::<Result<_>>()?;
            let p = TorusPoint::new(coords);
            if x.vanishes_at(&p)? {
                points.push(p);
            }
        }
    }
    Ok(IntersectOutcome::Finite { points, residual })
}

/// Shared tuning knobs for the sieves.
#[derive(Debug, Clone)]
pub struct SieveConfig {
    pub trial_division_bound: u64,
    pub height_bound: Option<f64>,
    pub bogomolov_constant: Option<f64>,
}

impl Default for SieveConfig {
    fn default() -> Self {
        SieveConfig {
            trial_division_bound: crate::cyclo::DEFAULT_TRIAL_DIVISION_BOUND,
            height_bound: None,
            bogomolov_constant: None,
        }
    }
}

/// One sieve hit: the point, the subgroup whose (translated) coset it was
/// found on, and its height.
#[derive(Debug, Clone)]
pub struct SievePoint {
    pub point: TorusPoint,
    pub subgroup: Lattice,
    pub height: f64,
    /// Γ-sieve bookkeeping: largest |n_il| over the Γ-exponents and
    /// largest |m_ij| over the residual decomposition, when computed.
    pub gamma_exponent_bound: Option<i64>,
    pub residual_exponent_bound: Option<BigInt>,
}

impl SievePoint {
    pub fn to_json(&self) -> serde_json::Value {
        let mut v = serde_json::json!({
            "point": self.point.to_json(),
            "display": self.point.to_string(),
            "subgroup": self.subgroup.to_json(),
            "height": fmt_sig(self.height, 12),
        });
        if let Some(g) = self.gamma_exponent_bound {
            v["gamma_exponent_bound"] = g.into();
        }
        if let Some(m) = &self.residual_exponent_bound {
            v["residual_exponent_bound"] = m.to_string().into();
        }
        v
    }
}

/// A containment signal: the curve holds an entire component translate.
#[derive(Debug, Clone)]
pub struct ContainedCase {
    pub subgroup: Lattice,
    pub component: TorusPoint,
}

/// The sieve's full report.
#[derive(Debug, Clone)]
pub struct SieveReport {
    pub points: Vec<SievePoint>,
    pub contained: Vec<ContainedCase>,
    pub residual: usize,
    pub subgroups_scanned: usize,
    pub max_height: f64,
    pub height_bound: Option<f64>,
    pub height_bound_ok: Option<bool>,
    pub bogomolov_constant: Option<f64>,
    pub bogomolov_ok: Option<bool>,
    pub gamma_exponent_bound: Option<i64>,
    pub residual_exponent_bound: Option<BigInt>,
}

impl SieveReport {
    pub fn to_json(&self) -> serde_json::Value {
        let mut v = serde_json::json!({
            "points": self.points.iter().map(SievePoint::to_json).collect::<Vec<_>>(),
            "contained": self.contained.iter().map(|c| serde_json::json!({
                "subgroup": c.subgroup.to_json(),
                "component": c.component.to_string(),
            })).collect::<Vec<_>>(),
            "residual_degree": self.residual,
            "subgroups_scanned": self.subgroups_scanned,
            "max_height": fmt_sig(self.max_height, 12),
        });
        if let Some(b) = self.height_bound {
            v["height_bound"] = fmt_sig(b, 12).into();
            v["height_bound_ok"] = self.height_bound_ok.into();
        }
        if let Some(b) = self.bogomolov_constant {
            v["bogomolov_constant"] = fmt_sig(b, 12).into();
            v["bogomolov_ok"] = self.bogomolov_ok.into();
        }
        if let Some(g) = self.gamma_exponent_bound {
            v["gamma_exponent_bound"] = g.into();
        }
        if let Some(m) = &self.residual_exponent_bound {
            v["residual_exponent_bound"] = m.to_string().into();
        }
        v
    }
}

/// Sieves a plane curve against every algebraic subgroup of codimension at
/// least `s` whose canonical defining basis has entries bounded by
/// `bound`, collecting all model points of the intersections. Containment
/// signals are reported, not enumerated. Deduplication keeps the first hit
/// in enumeration order, so the report is deterministic and independent of
/// the worker count.
pub fn abelian_point_sieve(
    x: &LaurentSystem,
    s: usize,
    bound: i64,
    cfg: &SieveConfig,
) -> Result<SieveReport> {
    if x.ambient != 2 {
        return Err(Error::UnsupportedShape("the sieve works in the two-torus".into()));
    }
    if s < 1 || s > 2 {
        return Err(Error::InvalidArgument(
            "sieve codimension must be 1 or 2 in the two-torus".into(),
        ));
    }
    let subgroups = enumerate_all_subgroups(2, s, bound);
    let outcomes: Vec<(usize, Result<IntersectOutcome>)> = subgroups
        .par_iter()
        .enumerate()
        .map(|(i, h)| (i, intersect_curve_subgroup(x, h, cfg.trial_division_bound)))
        .collect();
    assemble_report(&subgroups, outcomes, None, cfg)
}

/// The Γ-enlarged sieve: every subgroup from the plain sieve, translated
/// by every Γ-element whose generator exponents are bounded by
/// `gamma_exp_bound`. Found points carry the boundedness data of their
/// decomposition relative to Γ.
pub fn gamma_enlarged_sieve(
    x: &LaurentSystem,
    s: usize,
    bound: i64,
    gamma: &GammaGroup,
    gamma_exp_bound: i64,
    cfg: &SieveConfig,
) -> Result<SieveReport> {
    if x.ambient != 2 {
        return Err(Error::UnsupportedShape("the sieve works in the two-torus".into()));
    }
    if gamma.coordinates() != 2 {
        return Err(Error::DimensionMismatch(
            "Γ must have one generator list per torus coordinate".into(),
        ));
    }
    if s < 1 || s > 2 {
        return Err(Error::InvalidArgument(
            "sieve codimension must be 1 or 2 in the two-torus".into(),
        ));
    }
    if gamma_exp_bound < 0 {
        return Err(Error::InvalidArgument("Γ exponent bound must be ≥ 0".into()));
    }
    let elements = gamma_elements(gamma, gamma_exp_bound)?;
    let subgroups = enumerate_all_subgroups(2, s, bound);
    let jobs: Vec<(usize, &AlgebraicSubgroup, &TorusPoint)> = subgroups
        .iter()
        .enumerate()
        .flat_map(|(i, h)| elements.iter().map(move |g| (i, h, g)))
        .collect();
    let outcomes: Vec<(usize, Result<IntersectOutcome>)> = jobs
        .par_iter()
        .map(|&(i, h, g)| {
            (i, intersect_translated(x, h, Some(g), cfg.trial_division_bound))
        })
        .collect();
    let mut report = assemble_report(&subgroups, outcomes, Some(gamma), cfg)?;
    report.gamma_exponent_bound =
        Some(report.points.iter().filter_map(|p| p.gamma_exponent_bound).max().unwrap_or(0));
    report.residual_exponent_bound = Some(
        report
            .points
            .iter()
            .filter_map(|p| p.residual_exponent_bound.clone())
            .max()
            .unwrap_or_else(BigInt::zero),
    );
    Ok(report)
}

/// All products of the Γ-generators with exponents in `[-bound, bound]`,
/// identity first, in odometer order.
fn gamma_elements(gamma: &GammaGroup, bound: i64) -> Result<Vec<TorusPoint>> {
    let n = gamma.coordinates();
    let gens: Vec<(usize, CycloRational)> = (0..n)
        .flat_map(|i| gamma.generators(i).iter().map(move |g| (i, g.clone())))
        .collect();
    let k = gens.len();
    let total = (2 * bound as u128 + 1).checked_pow(k as u32);
    if total.is_none_or(|t| t > 20_000) {
        return Err(Error::InvalidArgument(
            "Γ exponent box too large to enumerate".into(),
        ));
    }
    let mut exps = vec![-bound; k];
    let mut out = Vec::new();
    loop {
        let mut coords = vec![CycloRational::one(); n];
        for (j, &(i, ref g)) in gens.iter().enumerate() {
            coords[i] = coords[i].mul(&g.pow(exps[j])?)?;
        }
        out.push(TorusPoint::new(coords));
        let mut j = 0;
        loop {
            if j == k {
                break;
            }
            exps[j] += 1;
            if exps[j] <= bound {
                break;
            }
            exps[j] = -bound;
            j += 1;
        }
        if j == k {
            break;
        }
    }
    // identity first for readability of reports
    out.sort_by_key(|p| if p.is_identity() { 0 } else { 1 });
    Ok(out)
}

fn assemble_report(
    subgroups: &[AlgebraicSubgroup],
    outcomes: Vec<(usize, Result<IntersectOutcome>)>,
    gamma: Option<&GammaGroup>,
    cfg: &SieveConfig,
) -> Result<SieveReport> {
    let mut seen: BTreeSet<String> = BTreeSet::new();
    let mut points: Vec<SievePoint> = Vec::new();
    let mut contained: Vec<ContainedCase> = Vec::new();
    let mut residual = 0usize;
    for (i, outcome) in outcomes {
        match outcome? {
            IntersectOutcome::Contained { component } => contained.push(ContainedCase {
                subgroup: subgroups[i].defining_lattice().clone(),
                component,
            }),
            IntersectOutcome::Finite { points: found, residual: r } => {
                residual += r;
                for p in found {
                    if !seen.insert(p.to_string()) {
                        continue;
                    }
                    let height = p.height();
                    let (gamma_bound, residual_bound) = match gamma {
                        None => (None, None),
                        Some(g) => {
                            let dec = group_decomposition_mod_gamma(&p, g)?;
                            let nb = dec
                                .gamma_exponents
                                .iter()
                                .flatten()
                                .map(|x| x.abs())
                                .max()
                                .unwrap_or(0);
                            let mm = &dec.residual.exponent_matrix;
                            let mb = (0..mm.rows())
                                .flat_map(|r| (0..mm.cols()).map(move |c| (r, c)))
                                .map(|(r, c)| mm[(r, c)].abs())
                                .max()
                                .unwrap_or_else(BigInt::zero);
                            (Some(nb), Some(mb))
                        }
                    };
                    points.push(SievePoint {
                        point: p,
                        subgroup: subgroups[i].defining_lattice().clone(),
                        height,
                        gamma_exponent_bound: gamma_bound,
                        residual_exponent_bound: residual_bound,
                    });
                }
            }
        }
    }
    let max_height = points.iter().map(|p| p.height).fold(0.0, f64::max);
    let height_bound_ok = cfg.height_bound.map(|b| max_height <= b + 1e-12);
    let bogomolov_ok = cfg.bogomolov_constant.map(|c| {
        points.iter().all(|p| p.height == 0.0 || p.height >= c - 1e-12)
    });
    Ok(SieveReport {
        points,
        contained,
        residual,
        subgroups_scanned: subgroups.len(),
        max_height,
        height_bound: cfg.height_bound,
        height_bound_ok,
        bogomolov_constant: cfg.bogomolov_constant,
        bogomolov_ok,
        gamma_exponent_bound: None,
        residual_exponent_bound: None,
    })
}
