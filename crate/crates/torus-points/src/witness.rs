//! Witness construction: given a point and a target codimension `s`, find
//! a connected algebraic subgroup of codimension at least `s` that
//! contains the point exactly, certifying the squared-covolume chain
//! between the chosen defining lattice and the point's free-exponent
//! lattice. Absence comes in two flavors — a rank obstruction (a
//! mathematical certificate) or exhaustion of the search bound.

use crate::cyclo::TorusPoint;
use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::laurent::{LaurentSystem, ParamCurve};
use crate::poly::QPoly;
use crate::relations::{group_decomposition, relation_lattice};
use crate::subgroup::AlgebraicSubgroup;
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

/// The lattice spanned by the columns of the point's exponent matrix: with
/// coordinates written as torsion times products of the free generators,
/// column `j` collects each coordinate's exponent of generator `j`. Its
/// orthogonal in the ambient `Z^n` is exactly the free part of the
/// relation lattice.
pub fn free_exponent_lattice(p: &TorusPoint) -> Result<Lattice> {
    let dec = group_decomposition(p)?;
    let n = p.dim();
    let cols: Vec<Vec<BigInt>> = (0..dec.rank)
        .map(|j| (0..n).map(|i| dec.exponent_matrix[(i, j)].clone()).collect())
        .collect();
    Ok(Lattice::from_generators(n, &cols))
}

/// A successful witness: the subgroup, the largest absolute entry of its
/// canonical defining basis, and both squared covolumes of the chain.
#[derive(Debug, Clone)]
pub struct Witness {
    pub subgroup: AlgebraicSubgroup,
    pub basis_bound: BigInt,
    pub det_m: BigInt,
    pub det_l: BigInt,
}

impl Witness {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "subgroup": self.subgroup.to_json(),
            "codim": self.subgroup.codimension(),
            "basis_bound": self.basis_bound.to_string(),
            "det_m": self.det_m.to_string(),
            "det_l": self.det_l.to_string(),
        })
    }
}

/// Search outcome: a witness, a rank certificate that none can exist, or
/// exhaustion of the bounded search (which proves nothing beyond the
/// bound).
#[derive(Debug, Clone)]
pub enum WitnessOutcome {
    Found(Witness),
    RankObstruction { relation_rank: usize, required: usize },
    NoneUpToBound { bound: i64 },
}

impl WitnessOutcome {
    pub fn to_json(&self) -> serde_json::Value {
        match self {
            WitnessOutcome::Found(w) => {
                let mut v = w.to_json();
                v["outcome"] = "found".into();
                v
            }
            WitnessOutcome::RankObstruction { relation_rank, required } => serde_json::json!({
                "outcome": "rank-obstruction",
                "relation_rank": relation_rank,
                "required": required,
            }),
            WitnessOutcome::NoneUpToBound { bound } => serde_json::json!({
                "outcome": "none-up-to-bound",
                "bound": bound,
            }),
        }
    }
}

/// Searches for a connected subgroup of codimension ≥ `s` containing `p`.
///
/// The relation lattice `K` (exponent kernel intersected with the torsion
/// congruence) already encodes exact membership: a subgroup defined by a
/// sublattice of `K` contains `p`. The search looks for a rank-`s`
/// sublattice of `K` that is primitive in the ambient `Z^n` (so the
/// subgroup is connected): first among sub-bases of the reduced basis of
/// `K`, then among all rank-`s` spans of vectors of `K` with entries
/// bounded by `bound`, scanned in ascending max-norm and then
/// lexicographic order. Deterministic: the first hit wins.
pub fn witness_subgroup(p: &TorusPoint, s: usize, bound: i64) -> Result<WitnessOutcome> {
    let n = p.dim();
    if s > n {
        return Err(Error::InvalidArgument(format!(
            "codimension {s} exceeds ambient dimension {n}"
        )));
    }
    if bound < 1 {
        return Err(Error::InvalidArgument("search bound must be at least 1".into()));
    }
    let det_m = free_exponent_lattice(p)?.gram_det();
    if s == 0 {
        return Ok(WitnessOutcome::Found(make_witness(Lattice::zero(n), det_m)));
    }
    let k_lat = relation_lattice(p);
    if k_lat.rank() < s {
        return Ok(WitnessOutcome::RankObstruction {
            relation_rank: k_lat.rank(),
            required: s,
        });
    }

    // Phase 1: sub-bases of the reduced basis of K.
    let (reduced, _) = k_lat.reduced_basis();
    if let Some(l) = scan_subsets(&reduced, s, n) {
        return Ok(WitnessOutcome::Found(make_witness(l, det_m)));
    }

    // Phase 2: all vectors of K in the max-norm box, sign-normalized and
    // sorted by max-norm then lex; subsets scanned grouped by max-norm so
    // smaller boxes are exhausted first.
    let mut box_vectors = collect_box_vectors(&k_lat, bound)?;
    box_vectors.sort_by_key(|v| (max_abs(v), v.clone()));
    box_vectors.dedup();
    for m in 1..=bound {
        let prefix_prev = box_vectors.partition_point(|v| max_abs(v) < BigInt::from(m));
        let prefix = box_vectors.partition_point(|v| max_abs(v) <= BigInt::from(m));
        if prefix == prefix_prev {
            continue;
        }
        if let Some(l) =
            scan_subsets_with_floor(&box_vectors[..prefix], prefix_prev, s, n)
        {
            return Ok(WitnessOutcome::Found(make_witness(l, det_m)));
        }
    }
    Ok(WitnessOutcome::NoneUpToBound { bound })
}

fn make_witness(l: Lattice, det_m: BigInt) -> Witness {
    let det_l = l.gram_det();
    let basis_bound = l.max_basis_entry();
    Witness {
        subgroup: AlgebraicSubgroup::from_lattice(l),
        basis_bound,
        det_m,
        det_l,
    }
}

fn max_abs(v: &[BigInt]) -> BigInt {
    v.iter().map(|x| x.abs()).max().unwrap_or_else(BigInt::zero)
}

/// All nonzero vectors of `lat` with max-norm ≤ `bound`, sign-normalized
/// so the first nonzero entry is positive. Walks integer combinations of
/// the Hermite basis top-down: row `r`'s pivot column receives
/// contributions only from rows ≤ r, so once rows < r are fixed the
/// coefficient of row r is confined to an interval — the walk is complete
/// and visits at most (2·bound+1)^rank candidates.
fn collect_box_vectors(lat: &Lattice, bound: i64) -> Result<Vec<Vec<BigInt>>> {
    let rank = lat.rank();
    let mut out = Vec::new();
    if rank == 0 {
        return Ok(out);
    }
    let basis = lat.basis();
    let n = lat.ambient_dim();
    let pivots: Vec<usize> = (0..rank)
        .map(|r| (0..n).find(|&c| !basis[(r, c)].is_zero()).expect("nonzero row"))
        .collect();
    let bound_big = BigInt::from(bound);
    let mut budget: u64 = 4_000_000;
    let mut prefix = vec![BigInt::zero(); n];
    walk_rows(
        0,
        rank,
        basis,
        &pivots,
        &bound_big,
        &mut prefix,
        &mut out,
        &mut budget,
    )?;
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn walk_rows(
    r: usize,
    rank: usize,
    basis: &crate::matrix::IntMatrix,
    pivots: &[usize],
    bound: &BigInt,
    prefix: &mut Vec<BigInt>,
    out: &mut Vec<Vec<BigInt>>,
    budget: &mut u64,
) -> Result<()> {
    if *budget == 0 {
        return Err(Error::InvalidArgument(
            "witness search bound too large for exhaustive phase".into(),
        ));
    }
    *budget -= 1;
    let n = prefix.len();
    if r == rank {
        if prefix.iter().all(|x| x.abs() <= *bound) && prefix.iter().any(|x| !x.is_zero()) {
            let first = prefix.iter().find(|x| !x.is_zero()).expect("nonzero");
            let v: Vec<BigInt> = if first.is_negative() {
                prefix.iter().map(|x| -x).collect()
            } else {
                prefix.clone()
            };
            out.push(v);
        }
        return Ok(());
    }
    // rows below r keep a zero in r's pivot column, so the final entry
    // there is c_r * pivot + (already accumulated): an exact interval
    let pivot = basis[(r, pivots[r])].clone();
    let acc = prefix[pivots[r]].clone();
    let lo = ceil_div(&(-bound - &acc), &pivot);
    let hi = floor_div(&(bound - &acc), &pivot);
    let mut c = lo;
    while c <= hi {
        for j in 0..n {
            let t = &c * &basis[(r, j)];
            prefix[j] += t;
        }
        walk_rows(r + 1, rank, basis, pivots, bound, prefix, out, budget)?;
        for j in 0..n {
            let t = &c * &basis[(r, j)];
            prefix[j] -= t;
        }
        c += 1;
    }
    Ok(())
}

fn ceil_div(a: &BigInt, b: &BigInt) -> BigInt {
    // b > 0 in all call sites (Hermite pivots are positive)
    let (q, r) = num_integer::Integer::div_mod_floor(a, b);
    if r.is_zero() {
        q
    } else {
        q + 1
    }
}

fn floor_div(a: &BigInt, b: &BigInt) -> BigInt {
    num_integer::Integer::div_floor(a, b)
}

/// Scans `s`-subsets of `vectors` in index-lexicographic order and returns
/// the first primitive rank-`s` span.
fn scan_subsets(vectors: &[Vec<BigInt>], s: usize, n: usize) -> Option<Lattice> {
    scan_subsets_with_floor(vectors, 0, s, n)
}

/// As `scan_subsets`, but only subsets whose largest index reaches at
/// least `floor` (used to avoid rescanning a smaller prefix).
fn scan_subsets_with_floor(
    vectors: &[Vec<BigInt>],
    floor: usize,
    s: usize,
    n: usize,
) -> Option<Lattice> {
    if vectors.len() < s || s == 0 {
        return None;
    }
    let mut idx: Vec<usize> = (0..s).collect();
    loop {
        if idx[s - 1] >= floor {
            let rows: Vec<Vec<BigInt>> = idx.iter().map(|&i| vectors[i].clone()).collect();
            let l = Lattice::from_generators(n, &rows);
            if l.rank() == s && l.is_primitive() {
                return Some(l);
            }
        }
        // next combination in lexicographic order
        let mut i = s;
        loop {
            if i == 0 {
                return None;
            }
            i -= 1;
            if idx[i] != i + vectors.len() - s {
                break;
            }
        }
        idx[i] += 1;
        for j in i + 1..s {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Validates the uniqueness step of the witness argument: a primitive
/// sublattice of a primitive lattice with the same rank must be the whole
/// lattice. Preconditions (containment, primitivity, equal rank) are
/// errors when violated; the return value reports equality.
pub fn primitivity_promotion_check(l: &Lattice, ambient_primitive: &Lattice) -> Result<bool> {
    if !ambient_primitive.contains_lattice(l) {
        return Err(Error::InvalidArgument(
            "sublattice is not contained in the ambient lattice".into(),
        ));
    }
    if !l.is_primitive() || !ambient_primitive.is_primitive() {
        return Err(Error::InvalidArgument(
            "promotion check requires both lattices primitive".into(),
        ));
    }
    if l.rank() != ambient_primitive.rank() {
        return Err(Error::InvalidArgument(
            "promotion check requires equal ranks".into(),
        ));
    }
    Ok(l == ambient_primitive)
}

/// Whether an intersection with a candidate witness subgroup is
/// zero-dimensional, as the codimension count requires.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnomalyVerdict {
    ZeroDimensionalOk,
    AnomalousWitness,
}

impl AnomalyVerdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            AnomalyVerdict::ZeroDimensionalOk => "zero-dimensional-ok",
            AnomalyVerdict::AnomalousWitness => "anomalous-witness",
        }
    }
}

/// Decides whether `dim(X ∩ H) = 0` for a hypersurface `X` in the
/// two-torus. For a one-dimensional `H` this means no component translate
/// of `H` satisfies the equation identically; zero-dimensional `H` always
/// passes; the full torus never does (the intersection is `X` itself).
/// The codimension target `s` is echoed through to reports and does not
/// change the decision.
pub fn anomaly_gate(
    x: &LaurentSystem,
    h: &AlgebraicSubgroup,
    _s: usize,
) -> Result<AnomalyVerdict> {
    if x.ambient != 2 || h.ambient_dim() != 2 {
        return Err(Error::UnsupportedShape(
            "anomaly gate handles hypersurfaces in the two-torus".into(),
        ));
    }
    if x.equations.len() != 1 {
        return Err(Error::UnsupportedShape(
            "anomaly gate expects a single hypersurface equation".into(),
        ));
    }
    let eq = &x.equations[0];
    match h.dimension() {
        0 => Ok(AnomalyVerdict::ZeroDimensionalOk),
        1 => {
            let map = h.identity_component().parametrize();
            let exps: Vec<i64> = (0..2)
                .map(|i| {
                    map.exponents[(i, 0)]
                        .to_i64()
                        .ok_or(Error::Overflow("parametrization exponent"))
                })
                .collect::<Result<_>>()?;
            for rep in h.component_representatives()? {
                let (_, poly, _) = eq.substitute_line(&rep, &exps)?;
                if poly.is_zero() {
                    return Ok(AnomalyVerdict::AnomalousWitness);
                }
            }
            Ok(AnomalyVerdict::ZeroDimensionalOk)
        }
        _ => Ok(AnomalyVerdict::AnomalousWitness),
    }
}

/// The same gate for a parametrized curve: the intersection with `H` has
/// dimension one exactly when the curve lies inside `H`, i.e. every
/// defining character is identically 1 along the curve.
pub fn anomaly_gate_curve(c: &ParamCurve, h: &AlgebraicSubgroup) -> Result<AnomalyVerdict> {
    if c.dim() != h.ambient_dim() {
        return Err(Error::DimensionMismatch(format!(
            "curve in {} coordinates vs subgroup ambient {}",
            c.dim(),
            h.ambient_dim()
        )));
    }
    for row in h.defining_lattice().basis_rows() {
        if !character_identically_one(c, &row)? {
            return Ok(AnomalyVerdict::ZeroDimensionalOk);
        }
    }
    // every defining character is identically 1 — this includes the full
    // torus, whose empty equation list the curve satisfies vacuously
    Ok(AnomalyVerdict::AnomalousWitness)
}

/// Whether `prod f_i(t)^(a_i) = 1` identically along the curve.
pub(crate) fn character_identically_one(c: &ParamCurve, a: &[BigInt]) -> Result<bool> {
    let (num, den) = character_as_fraction(c, a)?;
    Ok(num == den)
}

/// The character `prod f_i^(a_i)` as an unreduced fraction of polynomials.
pub(crate) fn character_as_fraction(c: &ParamCurve, a: &[BigInt]) -> Result<(QPoly, QPoly)> {
    assert_eq!(c.dim(), a.len());
    let mut num = QPoly::from_i64(&[1]);
    let mut den = QPoly::from_i64(&[1]);
    for (f, e) in c.coords.iter().zip(a) {
        let k: i64 = e.to_i64().ok_or(Error::Overflow("character exponent"))?;
        let power = k.unsigned_abs() as u32;
        if power == 0 {
            continue;
        }
        if k > 0 {
            num = num.mul(&f.num().pow(power));
            den = den.mul(&f.den().pow(power));
        } else {
            num = num.mul(&f.den().pow(power));
            den = den.mul(&f.num().pow(power));
        }
    }
    Ok((num, den))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclo::{parse_point, CycloRational, DEFAULT_TRIAL_DIVISION_BOUND};
    use crate::subgroup::enumerate_connected_subgroups;
    use crate::subgroup::for_each_hnf_lattice;
    use rand::{Rng, SeedableRng};

    fn pt(s: &str) -> TorusPoint {
        parse_point(s, DEFAULT_TRIAL_DIVISION_BOUND).unwrap()
    }

    fn lat(rows: &[&[i64]], n: usize) -> Lattice {
        Lattice::from_i64_rows(n, rows)
    }

    #[test]
    fn free_exponent_lattice_examples() {
        let m = free_exponent_lattice(&pt("(2, 4, 8)")).unwrap();
        assert_eq!(m, lat(&[&[1, 2, 3]], 3));
        assert_eq!(m.orthogonal().rank(), 2);

        let torsion = free_exponent_lattice(&pt("(zeta(6,1), -1)")).unwrap();
        assert_eq!(torsion.rank(), 0);
        assert_eq!(torsion.orthogonal(), Lattice::full(2));

        let full = free_exponent_lattice(&pt("(2, 3)")).unwrap();
        assert_eq!(full.rank(), 2);
        assert_eq!(full.orthogonal().rank(), 0);
    }

    #[test]
    fn witness_examples() {
        let p = pt("(2, 3, 6)");
        match witness_subgroup(&p, 1, 3).unwrap() {
            WitnessOutcome::Found(w) => {
                assert_eq!(w.subgroup.defining_lattice(), &lat(&[&[1, 1, -1]], 3));
                assert!(w.subgroup.is_connected());
                assert!(w.subgroup.contains(&p).unwrap());
                assert_eq!(w.det_l, BigInt::from(3));
                assert_eq!(w.det_m, BigInt::from(3));
            }
            other => panic!("expected a witness, got {other:?}"),
        }
        match witness_subgroup(&p, 2, 3).unwrap() {
            WitnessOutcome::RankObstruction { relation_rank, required } => {
                assert_eq!((relation_rank, required), (1, 2));
            }
            other => panic!("expected a rank obstruction, got {other:?}"),
        }

        let p = pt("(2, 4, 8)");
        match witness_subgroup(&p, 2, 3).unwrap() {
            WitnessOutcome::Found(w) => {
                assert_eq!(w.subgroup.codimension(), 2);
                assert!(w.subgroup.is_connected());
                assert!(w.subgroup.contains(&p).unwrap());
                assert_eq!(w.det_m, BigInt::from(14));
                assert_eq!(w.det_l, BigInt::from(14));
                assert!(w.det_l <= w.det_m);
            }
            other => panic!("expected a witness, got {other:?}"),
        }
    }

    #[test]
    fn torsion_congruence_blocks_imprimitive_relations() {
        // relations of (zeta_6*8, 4) are spanned by (6, -9), which has
        // content 3: no connected subgroup of codimension 1 contains the
        // point, at any search bound
        let p = pt("(zeta(6,1)*8, 4)");
        match witness_subgroup(&p, 1, 9).unwrap() {
            WitnessOutcome::NoneUpToBound { bound } => assert_eq!(bound, 9),
            other => panic!("expected exhaustion, got {other:?}"),
        }
        // cross-check by exhausting all primitive rank-1 lattices with
        // entries ≤ 9: none is inside the relation lattice
        let k = crate::relations::relation_lattice(&p);
        let mut found = false;
        for_each_hnf_lattice(2, 1, 9, &mut |l| {
            if l.is_primitive() && k.contains_lattice(&l) {
                found = true;
            }
        });
        assert!(!found);
    }

    #[test]
    fn soundness_on_constructed_points() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2026);
        let primes = [2u64, 3, 5, 7, 11];
        for n in 2..=3usize {
            for s in 1..n {
                let pool: Vec<_> = enumerate_connected_subgroups(n, s, 2)
                    .into_iter()
                    .filter(|h| h.codimension() == s)
                    .collect();
                for _ in 0..25 {
                    let h = &pool[rng.gen_range(0..pool.len())];
                    let map = h.parametrize();
                    let params: Vec<CycloRational> = (0..map.parameters())
                        .map(|j| {
                            let e = loop {
                                let e = rng.gen_range(-3i64..=3);
                                if e != 0 {
                                    break e;
                                }
                            };
                            let mut m = std::collections::BTreeMap::new();
                            m.insert(primes[j], e);
                            let order = [1u64, 2, 3, 4, 6][rng.gen_range(0..5)];
                            let exp = rng.gen_range(0..order.max(1)) as i64;
                            CycloRational::from_prime_exponents(order, exp, m).unwrap()
                        })
                        .collect();
                    let p = map.apply(&params).unwrap();
                    match witness_subgroup(&p, s, 2).unwrap() {
                        WitnessOutcome::Found(w) => {
                            assert!(w.subgroup.codimension() >= s);
                            assert!(w.subgroup.is_connected());
                            assert!(w.subgroup.contains(&p).unwrap());
                            assert!(
                                w.det_l <= w.det_m,
                                "chain violated: {} > {}",
                                w.det_l,
                                w.det_m
                            );
                        }
                        other => panic!("no witness for constructed point {p}: {other:?}"),
                    }
                }
            }
        }
    }

    #[test]
    fn trivial_codimension_and_input_guards() {
        let p = pt("(2, 3)");
        match witness_subgroup(&p, 0, 1).unwrap() {
            WitnessOutcome::Found(w) => {
                assert_eq!(w.subgroup.codimension(), 0);
                assert!(w.subgroup.contains(&p).unwrap());
            }
            other => panic!("expected the full torus, got {other:?}"),
        }
        assert!(witness_subgroup(&p, 3, 1).is_err());
        assert!(witness_subgroup(&p, 1, 0).is_err());
    }

    #[test]
    fn promotion_check() {
        let ambient = lat(&[&[1, 1, -1], &[0, 3, -2]], 3);
        assert!(ambient.is_primitive());
        assert!(primitivity_promotion_check(&ambient, &ambient).unwrap());

        // imprimitive sublattice: precondition violation
        let doubled_rows: Vec<Vec<BigInt>> = ambient
            .basis_rows()
            .iter()
            .map(|r| r.iter().map(|x| x * 2).collect())
            .collect();
        let doubled = Lattice::from_generators(3, &doubled_rows);
        assert!(primitivity_promotion_check(&doubled, &ambient).is_err());

        // containment violation
        let other = lat(&[&[1, 0, 0], &[0, 1, 0]], 3);
        assert!(primitivity_promotion_check(&other, &ambient).is_err());

        // randomized instances of the uniqueness claim: a primitive
        // equal-rank sublattice of a primitive lattice is the lattice
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let n = rng.gen_range(2..=4usize);
            let r = rng.gen_range(1..=n);
            let rows: Vec<Vec<BigInt>> = (0..r)
                .map(|_| (0..n).map(|_| BigInt::from(rng.gen_range(-4i64..=4))).collect())
                .collect();
            let l = Lattice::from_generators(n, &rows).saturate();
            if l.rank() == 0 {
                continue;
            }
            assert!(primitivity_promotion_check(&l, &l).unwrap());
        }
    }

    #[test]
    fn anomaly_gates() {
        let x = LaurentSystem::parse("x + y - 1", 2).unwrap();
        let h_xy = AlgebraicSubgroup::from_lattice(lat(&[&[1, 1]], 2));
        assert_eq!(anomaly_gate(&x, &h_xy, 1).unwrap(), AnomalyVerdict::ZeroDimensionalOk);

        let diag_curve = LaurentSystem::parse("x - y", 2).unwrap();
        let h_diag = AlgebraicSubgroup::from_lattice(lat(&[&[1, -1]], 2));
        assert_eq!(
            anomaly_gate(&diag_curve, &h_diag, 1).unwrap(),
            AnomalyVerdict::AnomalousWitness
        );

        let trivial = AlgebraicSubgroup::from_lattice(Lattice::full(2));
        assert_eq!(anomaly_gate(&x, &trivial, 1).unwrap(), AnomalyVerdict::ZeroDimensionalOk);

        let full = AlgebraicSubgroup::full_torus(2);
        assert_eq!(anomaly_gate(&x, &full, 1).unwrap(), AnomalyVerdict::AnomalousWitness);

        // a disconnected subgroup is anomalous when one of its component
        // translates satisfies the equation identically: x^2 = y^2 cut by
        // the curve x - y vanishes on the identity component
        let h_sq = AlgebraicSubgroup::from_lattice(lat(&[&[2, -2]], 2));
        assert_eq!(
            anomaly_gate(&diag_curve, &h_sq, 1).unwrap(),
            AnomalyVerdict::AnomalousWitness
        );
    }

    #[test]
    fn curve_gate() {
        let h_diag = AlgebraicSubgroup::from_lattice(lat(&[&[1, -1]], 2));
        let line = ParamCurve::parse("t, 1 - t").unwrap();
        assert_eq!(
            anomaly_gate_curve(&line, &h_diag).unwrap(),
            AnomalyVerdict::ZeroDimensionalOk
        );
        let diagonal = ParamCurve::parse("t, t").unwrap();
        assert_eq!(
            anomaly_gate_curve(&diagonal, &h_diag).unwrap(),
            AnomalyVerdict::AnomalousWitness
        );
        // scaled diagonal lies in a proper coset, not in the subgroup
        let scaled = ParamCurve::parse("2t, 3t").unwrap();
        assert_eq!(
            anomaly_gate_curve(&scaled, &h_diag).unwrap(),
            AnomalyVerdict::ZeroDimensionalOk
        );
    }
}
