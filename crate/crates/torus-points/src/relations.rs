//! Multiplicative relations among torus-point coordinates: the full integer
//! lattice of exponent vectors k with prod xi_i^k_i = 1, dependence and
//! primitive-dependence decisions with certified witnesses, the
//! decomposition xi_i = zeta_i * prod_j g_j^m_ij into independent
//! generators, a sampled lower-bound ratio for heights of monomials in the
//! generators, and the same decomposition relative to a fixed finitely
//! generated enlargement group.

use crate::cyclo::{CycloRational, TorusPoint};
use crate::error::{Error, Result};
use crate::lattice::{left_kernel, Lattice};
use crate::matrix::IntMatrix;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use std::collections::BTreeSet;

/// Sorted union of the primes appearing in any of the given values.
pub fn prime_support(values: &[CycloRational]) -> Vec<u64> {
    let mut set = BTreeSet::new();
    for v in values {
        set.extend(v.prime_exponents().keys().copied());
    }
    set.into_iter().collect()
}

/// Rows = values, columns = primes of `support`, entries = exponents.
fn exponent_matrix(values: &[CycloRational], support: &[u64]) -> IntMatrix {
    let mut m = IntMatrix::zero(values.len(), support.len());
    for (i, v) in values.iter().enumerate() {
        for (j, p) in support.iter().enumerate() {
            if let Some(&e) = v.prime_exponents().get(p) {
                m[(i, j)] = BigInt::from(e);
            }
        }
    }
    m
}

/// The full relation lattice {k in Z^n : prod xi_i^k_i = 1 exactly}: the
/// kernel of the prime-exponent matrix intersected with the torsion
/// congruence sum k_i * angle_i = 0 mod 1.
pub fn relation_lattice(p: &TorusPoint) -> Lattice {
    let n = p.dim();
    let support = prime_support(&p.coords);
    let free_rows = left_kernel(&exponent_matrix(&p.coords, &support));
    let r = free_rows.len();
    if r == 0 {
        return Lattice::zero(n);
    }
    // torsion congruence modulo the lcm L of the coordinate orders:
    // sum k_i * c_i = 0 (mod L) with c_i = L/N_i * e_i
    let mut l: u64 = 1;
    for c in &p.coords {
        l = l.lcm(&c.torsion_order());
    }
    if l == 1 {
        return Lattice::from_generators(n, &free_rows);
    }
    let angles: Vec<BigInt> = p
        .coords
        .iter()
        .map(|c| BigInt::from((l / c.torsion_order()) * c.torsion_exp()))
        .collect();
    // restrict the congruence to the free kernel: unknowns x in Z^r with
    // sum_j x_j * (row_j . angles) + y*L = 0 for some integer y
    let mut lifted = IntMatrix::zero(r + 1, 1);
    for (j, row) in free_rows.iter().enumerate() {
        lifted[(j, 0)] = row.iter().zip(&angles).map(|(a, b)| a * b).sum();
    }
    lifted[(r, 0)] = BigInt::from(l);
    let solutions = left_kernel(&lifted);
    let mut gens = Vec::new();
    for x in &solutions {
        let mut v = vec![BigInt::zero(); n];
        for (j, row) in free_rows.iter().enumerate() {
            for (vi, ri) in v.iter_mut().zip(row) {
                *vi += &x[j] * ri;
            }
        }
        gens.push(v);
    }
    Lattice::from_generators(n, &gens)
}

pub fn is_multiplicatively_dependent(p: &TorusPoint) -> bool {
    relation_lattice(p).rank() >= 1
}

/// Outcome of the primitive-dependence decision, with certificates.
#[derive(Debug, Clone)]
pub struct DependenceReport {
    pub dependent: bool,
    pub primitive: bool,
    /// Some nonzero relation vector (reduced-basis representative).
    pub relation: Option<Vec<BigInt>>,
    /// A relation vector with coordinate gcd 1, when one exists.
    pub primitive_witness: Option<Vec<BigInt>>,
    pub lattice: Lattice,
}

/// Decides dependence and primitive dependence of the coordinates. A point
/// is primitively dependent iff its relation lattice contains a vector of
/// content 1, equivalently iff the first invariant factor of the lattice
/// basis is 1; the witness is read off the Smith transform.
pub fn dependence_report(p: &TorusPoint) -> DependenceReport {
    let lattice = relation_lattice(p);
    if lattice.rank() == 0 {
        return DependenceReport {
            dependent: false,
            primitive: false,
            relation: None,
            primitive_witness: None,
            lattice,
        };
    }
    let (rows, _) = lattice.reduced_basis();
    let relation = Some(rows[0].clone());
    let basis = lattice.basis().clone();
    let (u, d, _) = basis.snf();
    let primitive = d[(0, 0)].is_one();
    let primitive_witness = if primitive {
        // first row of u*basis has content d_1 = 1
        let w = u.mul(&basis).row_vec(0);
        debug_assert!(content(&w).is_one());
        debug_assert!(p.power(&w).map(|v| v.is_one()).unwrap_or(false));
        Some(w)
    } else {
        None
    };
    DependenceReport { dependent: true, primitive, relation, primitive_witness, lattice }
}

fn content(v: &[BigInt]) -> BigInt {
    v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x))
}

/// The decomposition xi_i = zeta_i * prod_j g_j^(m_ij) with multiplicatively
/// independent non-torsion generators g_j.
#[derive(Debug, Clone)]
pub struct GroupDecomposition {
    pub rank: usize,
    pub generators: Vec<CycloRational>,
    /// n x rank integer matrix of exponents m_ij.
    pub exponent_matrix: IntMatrix,
    pub torsion_parts: Vec<CycloRational>,
}

impl GroupDecomposition {
    /// Rebuilds coordinate i from the decomposition data.
    pub fn reconstruct(&self, i: usize) -> Result<CycloRational> {
        let mut acc = self.torsion_parts[i].clone();
        for (j, g) in self.generators.iter().enumerate() {
            acc = acc.mul(&g.pow_big(&self.exponent_matrix[(i, j)])?)?;
        }
        Ok(acc)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "rank": self.rank,
            "generators": self.generators.iter().map(|g| g.to_string()).collect::<Vec<_>>(),
            "exponents": (0..self.exponent_matrix.rows())
                .map(|i| {
                    (0..self.exponent_matrix.cols())
                        .map(|j| self.exponent_matrix[(i, j)].to_string())
                        .collect::<Vec<_>>()
                })
                .collect::<Vec<_>>(),
            "torsion": self.torsion_parts.iter().map(|z| z.to_string()).collect::<Vec<_>>(),
        })
    }
}

/// Integer coordinates of `v` in an arbitrary independent row basis (not
/// necessarily HNF). Works through the Hermite transform of the rows.
pub fn coords_in_rows(rows: &IntMatrix, v: &[BigInt]) -> Option<Vec<BigInt>> {
    let (h, u) = rows.hnf();
    let rank = h.rank();
    let nonzero: Vec<Vec<BigInt>> = (0..rank).map(|i| h.row_vec(i)).collect();
    let lat = Lattice::from_generators(h.cols(), &nonzero);
    let y = lat.member_coords(v)?;
    // v = y * H_top = y * (U * rows)_top, so coords = y * U_top
    let mut x = vec![BigInt::zero(); rows.rows()];
    for (j, yj) in y.iter().enumerate() {
        for k in 0..rows.rows() {
            x[k] += yj * &u[(j, k)];
        }
    }
    Some(x)
}

/// Decomposes the group generated by the coordinates: generators are the
/// sign-normalized reduced basis of the prime-exponent row lattice, mapped
/// back to positive rationals; torsion parts make the reconstruction exact.
pub fn group_decomposition(p: &TorusPoint) -> Result<GroupDecomposition> {
    let n = p.dim();
    let support = prime_support(&p.coords);
    let expo = exponent_matrix(&p.coords, &support);
    let rows: Vec<Vec<BigInt>> = (0..n).map(|i| expo.row_vec(i)).collect();
    let row_lattice = Lattice::from_generators(support.len(), &rows);
    let rank = row_lattice.rank();
    let basis_rows: Vec<Vec<BigInt>> = if rank == 0 {
        Vec::new()
    } else {
        let (mut reduced, _) = row_lattice.reduced_basis();
        for row in &mut reduced {
            if row.iter().find(|x| !x.is_zero()).map(|x| x.is_negative()).unwrap_or(false) {
                for x in row.iter_mut() {
                    *x = -x.clone();
                }
            }
        }
        reduced
    };
    let mut generators = Vec::with_capacity(rank);
    for row in &basis_rows {
        let mut primes = std::collections::BTreeMap::new();
        for (j, e) in row.iter().enumerate() {
            if !e.is_zero() {
                let e64 = e.to_i64().ok_or(Error::Overflow("generator exponent"))?;
                primes.insert(support[j], e64);
            }
        }
        generators.push(CycloRational::from_prime_exponents(1, 0, primes)?);
    }
    let basis_matrix = IntMatrix::from_rows_with_cols(&basis_rows, support.len());
    let mut exponent_matrix = IntMatrix::zero(n, rank);
    let mut torsion_parts = Vec::with_capacity(n);
    for (i, row) in rows.iter().enumerate() {
        let coords = if rank == 0 {
            Vec::new()
        } else {
            coords_in_rows(&basis_matrix, row)
                .expect("coordinate exponent row lies in its own row lattice")
        };
        let mut monomial = CycloRational::one();
        for (j, c) in coords.iter().enumerate() {
            exponent_matrix[(i, j)] = c.clone();
            monomial = monomial.mul(&generators[j].pow_big(c)?)?;
        }
        let zeta = p.coords[i].div(&monomial)?;
        debug_assert!(zeta.is_torsion());
        torsion_parts.push(zeta);
    }
    Ok(GroupDecomposition { rank, generators, exponent_matrix, torsion_parts })
}

/// Measured lower-bound constant for heights of monomials in the
/// generators: the minimum over `samples` random nonzero exponent vectors b
/// (entries in [-5, 5]) of h(prod g_j^b_j) / sum_j |b_j| h(g_j).
/// Deterministic for a fixed seed. Returns the minimum and its argmin.
pub fn schlickewei_ratio(
    d: &GroupDecomposition,
    samples: usize,
    seed: u64,
) -> Result<(f64, Vec<i64>)> {
    if d.rank == 0 {
        return Err(Error::InvalidArgument(
            "height ratio needs at least one generator".into(),
        ));
    }
    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed);
    let mut best: Option<(f64, Vec<i64>)> = None;
    for _ in 0..samples.max(1) {
        let mut b = vec![0i64; d.rank];
        while b.iter().all(|&x| x == 0) {
            for x in b.iter_mut() {
                *x = rng.gen_range(-5i64..=5);
            }
        }
        let mut value = CycloRational::one();
        let mut denom = 0.0;
        for (g, &k) in d.generators.iter().zip(&b) {
            value = value.mul(&g.pow(k)?)?;
            denom += k.unsigned_abs() as f64 * g.weil_height();
        }
        let ratio = value.weil_height() / denom;
        if best.as_ref().map(|(r, _)| ratio < *r).unwrap_or(true) {
            best = Some((ratio, b));
        }
    }
    Ok(best.unwrap())
}

/// A direct product of finitely generated multiplicative groups, one factor
/// per torus coordinate.
#[derive(Debug, Clone)]
pub struct GammaGroup {
    per_coordinate: Vec<Vec<CycloRational>>,
}

impl GammaGroup {
    /// Validates that every generator is non-torsion.
    pub fn new(per_coordinate: Vec<Vec<CycloRational>>) -> Result<Self> {
        for gens in &per_coordinate {
            for g in gens {
                if g.is_torsion() {
                    return Err(Error::InvalidArgument(format!(
                        "enlargement generator {g} is a root of unity"
                    )));
                }
            }
        }
        Ok(GammaGroup { per_coordinate })
    }

    pub fn trivial(n: usize) -> Self {
        GammaGroup { per_coordinate: vec![Vec::new(); n] }
    }

    pub fn coordinates(&self) -> usize {
        self.per_coordinate.len()
    }

    pub fn generators(&self, i: usize) -> &[CycloRational] {
        &self.per_coordinate[i]
    }

    pub fn all_generators(&self) -> Vec<CycloRational> {
        self.per_coordinate.iter().flatten().cloned().collect()
    }
}

/// The decomposition of a point relative to an enlargement group:
/// xi_i = prod_l gamma_il^(n_il) * (zeta_i * prod_j g_j^(m_ij)).
#[derive(Debug, Clone)]
pub struct GammaDecomposition {
    /// n_il, one vector per coordinate (length = generator count there).
    pub gamma_exponents: Vec<Vec<i64>>,
    pub residual_point: TorusPoint,
    pub residual: GroupDecomposition,
    /// Whether the residual generators are multiplicatively independent
    /// from the enlargement's generators (jointly, modulo torsion). This
    /// can be false: no choice of exponents makes the part of a coordinate
    /// lying in the rational span of the enlargement's exponent lattice
    /// disappear entirely.
    pub independent_from_gamma: bool,
}

/// Rounds to the nearest integer, ties toward the smaller integer.
fn round_half_down(q: &BigRational) -> BigInt {
    let shifted = q + BigRational::new(BigInt::one(), BigInt::from(2));
    if shifted.is_integer() {
        shifted.to_integer() - 1
    } else {
        shifted.floor().to_integer()
    }
}

/// Solves the square rational system a*x = b by Gaussian elimination;
/// `None` when singular.
fn solve_rational_system(
    mut a: Vec<Vec<BigRational>>,
    mut b: Vec<BigRational>,
) -> Option<Vec<BigRational>> {
    let n = a.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        let p = a[col][col].clone();
        for r in 0..n {
            if r == col {
                continue;
            }
            let factor = &a[r][col] / &p;
            if factor.is_zero() {
                continue;
            }
            for c in col..n {
                let t = &a[col][c] * &factor;
                a[r][c] -= t;
            }
            let t = &b[col] * &factor;
            b[r] -= t;
        }
    }
    Some((0..n).map(|i| &b[i] / &a[i][i]).collect())
}

/// Splits each coordinate into an enlargement part and a residual, choosing
/// the exponents n_il by closest-vector rounding in the reduced basis of
/// the enlargement's exponent lattice (ties toward the smaller integer).
pub fn group_decomposition_mod_gamma(
    p: &TorusPoint,
    gamma: &GammaGroup,
) -> Result<GammaDecomposition> {
    let n = p.dim();
    if gamma.coordinates() != n {
        return Err(Error::DimensionMismatch(format!(
            "point has {} coordinates, enlargement has {}",
            n,
            gamma.coordinates()
        )));
    }
    let mut all_values: Vec<CycloRational> = p.coords.clone();
    all_values.extend(gamma.all_generators());
    let support = prime_support(&all_values);
    let mut gamma_exponents = Vec::with_capacity(n);
    let mut residual_coords = Vec::with_capacity(n);
    for i in 0..n {
        let gens = gamma.generators(i);
        if gens.is_empty() {
            gamma_exponents.push(Vec::new());
            residual_coords.push(p.coords[i].clone());
            continue;
        }
        let g_matrix = exponent_matrix(gens, &support);
        let g_rows: Vec<Vec<BigInt>> = (0..gens.len()).map(|k| g_matrix.row_vec(k)).collect();
        let g_lattice = Lattice::from_generators(support.len(), &g_rows);
        let (reduced, _) = g_lattice.reduced_basis();
        let v = exponent_matrix(&p.coords[i..=i], &support).row_vec(0);
        // least-squares coefficients of v against the reduced basis rows
        let dim = reduced.len();
        let gram: Vec<Vec<BigRational>> = (0..dim)
            .map(|a| {
                (0..dim)
                    .map(|b| {
                        BigRational::from_integer(
                            reduced[a].iter().zip(&reduced[b]).map(|(x, y)| x * y).sum(),
                        )
                    })
                    .collect()
            })
            .collect();
        let rhs: Vec<BigRational> = (0..dim)
            .map(|a| {
                BigRational::from_integer(
                    reduced[a].iter().zip(&v).map(|(x, y)| x * y).sum(),
                )
            })
            .collect();
        let coeffs = solve_rational_system(gram, rhs)
            .expect("reduced basis rows are independent, Gram matrix invertible");
        // nearest lattice vector by rounding, then re-express in the
        // original generators
        let mut target = vec![BigInt::zero(); support.len()];
        for (c, row) in coeffs.iter().zip(&reduced) {
            let k = round_half_down(c);
            for (t, r) in target.iter_mut().zip(row) {
                *t += &k * r;
            }
        }
        let n_i = coords_in_rows(&g_matrix, &target)
            .expect("rounded vector lies in the enlargement exponent lattice");
        let n_i: Vec<i64> = n_i
            .iter()
            .map(|x| x.to_i64().ok_or(Error::Overflow("enlargement exponent")))
            .collect::<Result<_>>()?;
        let mut residual = p.coords[i].clone();
        for (g, &e) in gens.iter().zip(&n_i) {
            residual = residual.div(&g.pow(e)?)?;
        }
        gamma_exponents.push(n_i);
        residual_coords.push(residual);
    }
    let residual_point = TorusPoint::new(residual_coords);
    let residual = group_decomposition(&residual_point)?;
    // joint rank check: residual generators against all enlargement
    // generators, over the common prime support
    let mut joint: Vec<CycloRational> = residual.generators.clone();
    joint.extend(gamma.all_generators());
    let joint_support = prime_support(&joint);
    let joint_rows: Vec<Vec<BigInt>> = (0..joint.len())
        .map(|k| exponent_matrix(&joint[k..=k], &joint_support).row_vec(0))
        .collect();
    let joint_rank = Lattice::from_generators(joint_support.len(), &joint_rows).rank();
    let gamma_rank = {
        let gens = gamma.all_generators();
        let rows: Vec<Vec<BigInt>> = (0..gens.len())
            .map(|k| exponent_matrix(&gens[k..=k], &joint_support).row_vec(0))
            .collect();
        Lattice::from_generators(joint_support.len(), &rows).rank()
    };
    let independent_from_gamma = joint_rank == residual.rank + gamma_rank;
    Ok(GammaDecomposition { gamma_exponents, residual_point, residual, independent_from_gamma })
}
