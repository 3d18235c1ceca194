//! Algebraic subgroups of the n-torus and their defining exponent
//! lattices: a subgroup is cut out by the monomial equations x^a = 1 for a
//! ranging over an integer lattice. Connectedness corresponds to lattice
//! primitivity, the component group is read off the Smith normal form, and
//! the identity component is parametrized by the orthogonal lattice.

use crate::cyclo::{CycloRational, TorusPoint};
use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::matrix::{combinations, IntMatrix};
use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};

/// A subgroup {x : x^a = 1 for all a in the defining lattice}, with its
/// cached dimension, connectedness, and component count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraicSubgroup {
    ambient: usize,
    lattice: Lattice,
    connected: bool,
    component_count: BigInt,
}

impl AlgebraicSubgroup {
    pub fn from_lattice(lattice: Lattice) -> Self {
        let connected = lattice.is_primitive();
        let component_count = lattice
            .basis()
            .invariant_factors()
            .into_iter()
            .fold(BigInt::one(), |acc, d| acc * d);
        AlgebraicSubgroup { ambient: lattice.ambient_dim(), lattice, connected, component_count }
    }

    /// The full torus: empty defining lattice.
    pub fn full_torus(n: usize) -> Self {
        AlgebraicSubgroup::from_lattice(Lattice::zero(n))
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn defining_lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn dimension(&self) -> usize {
        self.ambient - self.lattice.rank()
    }

    pub fn codimension(&self) -> usize {
        self.lattice.rank()
    }

    pub fn is_connected(&self) -> bool {
        self.connected
    }

    pub fn component_count(&self) -> &BigInt {
        &self.component_count
    }

    /// The connected component of the identity: defined by the saturation.
    pub fn identity_component(&self) -> AlgebraicSubgroup {
        AlgebraicSubgroup::from_lattice(self.lattice.saturate())
    }

    /// Exact membership: every defining basis vector must annihilate p.
    pub fn contains(&self, p: &TorusPoint) -> Result<bool> {
        if p.dim() != self.ambient {
            return Err(Error::DimensionMismatch(format!(
                "point dimension {} vs subgroup ambient {}",
                p.dim(),
                self.ambient
            )));
        }
        for row in self.lattice.basis_rows() {
            if !p.power(&row)?.is_one() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Monomial parametrization of the identity component: the columns of
    /// the exponent matrix are a basis of the orthogonal lattice, so
    /// t |-> (prod_j t_j^(E_ij))_i surjects onto it.
    pub fn parametrize(&self) -> MonomialMap {
        let orth = self.lattice.orthogonal();
        let rows = IntMatrix::from_rows_with_cols(&orth.basis_rows(), self.ambient);
        MonomialMap { exponents: rows.transpose(), translate: None }
    }

    /// One representative point per connected component (the identity
    /// component's representative is the identity). Derived from the Smith
    /// chart of the defining basis: with u*m*v = diag(d_j), the component
    /// group is the product of the cyclic groups of the invariant factors,
    /// and a representative for the class (k_j) has coordinates
    /// prod_j zeta_{d_j}^(k_j * v_ij).
    pub fn component_representatives(&self) -> Result<Vec<TorusPoint>> {
        const CAP: u64 = 4096;
        let count = self.component_count.to_u64().filter(|&c| c <= CAP).ok_or(
            Error::InvalidArgument(format!(
                "component group of order {} exceeds the enumeration cap {CAP}",
                self.component_count
            )),
        )?;
        let d = self.lattice.rank();
        let n = self.ambient;
        if d == 0 || count == 1 {
            return Ok(vec![TorusPoint::new(vec![CycloRational::one(); n])]);
        }
        let (_, dmat, v) = self.lattice.basis().snf();
        let orders: Vec<u64> = (0..d)
            .map(|j| {
                dmat[(j, j)]
                    .to_u64()
                    .filter(|&x| x >= 1)
                    .ok_or(Error::Overflow("invariant factor"))
            })
            .collect::<Result<_>>()?;
        let mut reps = Vec::with_capacity(count as usize);
        let mut k = vec![0u64; d];
        loop {
            let mut coords = Vec::with_capacity(n);
            for i in 0..n {
                let mut c = CycloRational::one();
                for (j, &order) in orders.iter().enumerate() {
                    if order == 1 || k[j] == 0 {
                        continue;
                    }
                    let vij = v[(i, j)]
                        .to_i64()
                        .ok_or(Error::Overflow("component chart exponent"))?;
                    let e = (k[j] as i64).checked_mul(vij).ok_or(Error::Overflow(
                        "component chart exponent",
                    ))?;
                    c = c.mul(&CycloRational::root_of_unity(order, e)?)?;
                }
                coords.push(c);
            }
            reps.push(TorusPoint::new(coords));
            // odometer over the component classes
            let mut j = 0;
            loop {
                if j == d {
                    break;
                }
                k[j] += 1;
                if k[j] < orders[j] {
                    break;
                }
                k[j] = 0;
                j += 1;
            }
            if j == d {
                break;
            }
        }
        debug_assert_eq!(reps.len() as u64, count);
        Ok(reps)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "ambient": self.ambient,
            "lattice": self.lattice.to_json(),
        })
    }
}

/// A monomial map t |-> translate_i * prod_j t_j^(E_ij) into the n-torus.
#[derive(Debug, Clone)]
pub struct MonomialMap {
    /// n rows, one per target coordinate; k columns, one per parameter.
    pub exponents: IntMatrix,
    pub translate: Option<TorusPoint>,
}

impl MonomialMap {
    pub fn parameters(&self) -> usize {
        self.exponents.cols()
    }

    pub fn with_translate(mut self, t: TorusPoint) -> Self {
        assert_eq!(t.dim(), self.exponents.rows());
        self.translate = Some(t);
        self
    }

    /// Evaluates the map at a tuple of nonzero model values.
    pub fn apply(&self, params: &[CycloRational]) -> Result<TorusPoint> {
        if params.len() != self.exponents.cols() {
            return Err(Error::DimensionMismatch(format!(
                "map takes {} parameters, got {}",
                self.exponents.cols(),
                params.len()
            )));
        }
        let n = self.exponents.rows();
        let mut coords = Vec::with_capacity(n);
        for i in 0..n {
            let mut c = match &self.translate {
                Some(t) => t.coords[i].clone(),
                None => CycloRational::one(),
            };
            for (j, p) in params.iter().enumerate() {
                c = c.mul(&p.pow_big(&self.exponents[(i, j)])?)?;
            }
            coords.push(c);
        }
        Ok(TorusPoint::new(coords))
    }
}

/// Calls `f` with every rank-`rank` lattice in Z^n whose canonical Hermite
/// basis has all entries of absolute value at most `bound`, each exactly
/// once. Generation order is deterministic (pivot-column combinations in
/// lexicographic order, then entry odometers); it is not globally sorted.
pub fn for_each_hnf_lattice(
    n: usize,
    rank: usize,
    bound: i64,
    f: &mut dyn FnMut(Lattice),
) {
    assert!(bound >= 1);
    if rank == 0 {
        f(Lattice::zero(n));
        return;
    }
    if rank > n {
        return;
    }
    for pivot_cols in combinations(n, rank) {
        // pivot values first: they fix the ranges of the entries above
        let mut pivots = vec![1i64; rank];
        loop {
            emit_for_pivots(n, rank, bound, &pivot_cols, &pivots, f);
            let mut j = 0;
            loop {
                if j == rank {
                    break;
                }
                pivots[j] += 1;
                if pivots[j] <= bound {
                    break;
                }
                pivots[j] = 1;
                j += 1;
            }
            if j == rank {
                break;
            }
        }
    }
}

fn emit_for_pivots(
    n: usize,
    rank: usize,
    bound: i64,
    pivot_cols: &[usize],
    pivots: &[i64],
    f: &mut dyn FnMut(Lattice),
) {
    // collect the variable positions: above-pivot entries range over
    // [0, pivot), remaining right-of-pivot entries over [-bound, bound]
    let mut slots: Vec<(usize, usize, i64, i64)> = Vec::new();
    let is_pivot_col: Vec<Option<usize>> = (0..n)
        .map(|c| pivot_cols.iter().position(|&pc| pc == c))
        .collect();
    for r in 0..rank {
        for c in (pivot_cols[r] + 1)..n {
            match is_pivot_col[c] {
                Some(s) => {
                    // entry above the pivot of row s
                    debug_assert!(s > r);
                    slots.push((r, c, 0, pivots[s] - 1));
                }
                None => slots.push((r, c, -bound, bound)),
            }
        }
    }
    let mut values: Vec<i64> = slots.iter().map(|&(_, _, lo, _)| lo).collect();
    loop {
        let mut m = IntMatrix::zero(rank, n);
        for r in 0..rank {
            m[(r, pivot_cols[r])] = BigInt::from(pivots[r]);
        }
        for (slot, &v) in slots.iter().zip(&values) {
            m[(slot.0, slot.1)] = BigInt::from(v);
        }
        let rows: Vec<Vec<BigInt>> = (0..rank).map(|r| m.row_vec(r)).collect();
        let lattice = Lattice::from_generators(n, &rows);
        debug_assert_eq!(lattice.basis(), &m, "generated matrix must already be canonical");
        f(lattice);
        let mut j = 0;
        loop {
            if j == slots.len() {
                break;
            }
            values[j] += 1;
            if values[j] <= slots[j].3 {
                break;
            }
            values[j] = slots[j].2;
            j += 1;
        }
        if j == slots.len() {
            break;
        }
    }
}

/// All subgroups (connected or not) of codimension at least `min_codim`
/// whose canonical defining basis has entries bounded by `bound`, in
/// ascending rank and then lexicographic basis order.
pub fn enumerate_all_subgroups(n: usize, min_codim: usize, bound: i64) -> Vec<AlgebraicSubgroup> {
    let mut out = Vec::new();
    for rank in min_codim..=n {
        let mut batch: Vec<Lattice> = Vec::new();
        for_each_hnf_lattice(n, rank, bound.max(1), &mut |l| batch.push(l));
        batch.sort_by_key(|l| {
            let b = l.basis();
            (0..b.rows()).flat_map(|r| b.row_vec(r)).collect::<Vec<BigInt>>()
        });
        out.extend(batch.into_iter().map(AlgebraicSubgroup::from_lattice));
    }
    out
}

/// The connected members of `enumerate_all_subgroups`, same order.
pub fn enumerate_connected_subgroups(
    n: usize,
    min_codim: usize,
    bound: i64,
) -> Vec<AlgebraicSubgroup> {
    enumerate_all_subgroups(n, min_codim, bound)
        .into_iter()
        .filter(AlgebraicSubgroup::is_connected)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclo::{parse_cyclo, parse_point, DEFAULT_TRIAL_DIVISION_BOUND};
    use rand::{Rng, SeedableRng};

    fn sub(rows: &[&[i64]], n: usize) -> AlgebraicSubgroup {
        AlgebraicSubgroup::from_lattice(Lattice::from_i64_rows(n, rows))
    }

    fn pt(s: &str) -> TorusPoint {
        parse_point(s, DEFAULT_TRIAL_DIVISION_BOUND).unwrap()
    }

    #[test]
    fn construction_and_cached_fields() {
        let diag = sub(&[&[1, -1]], 2);
        assert_eq!(diag.dimension(), 1);
        assert!(diag.is_connected());
        assert_eq!(diag.component_count(), &BigInt::from(1));

        let squares = sub(&[&[2, 0]], 2);
        assert_eq!(squares.dimension(), 1);
        assert!(!squares.is_connected());
        assert_eq!(squares.component_count(), &BigInt::from(2));

        let finite = sub(&[&[2, 0], &[0, 3]], 2);
        assert_eq!(finite.dimension(), 0);
        assert_eq!(finite.component_count(), &BigInt::from(6));

        let full = AlgebraicSubgroup::full_torus(3);
        assert!(full.is_connected());
        assert_eq!(full.dimension(), 3);
        assert_eq!(full.component_count(), &BigInt::from(1));
    }

    #[test]
    fn identity_component_saturates() {
        assert_eq!(
            sub(&[&[2, 0]], 2).identity_component(),
            sub(&[&[1, 0]], 2)
        );
        assert_eq!(
            sub(&[&[2, 4]], 2).identity_component(),
            sub(&[&[1, 2]], 2)
        );
        let connected = sub(&[&[1, 2]], 2);
        assert_eq!(connected.identity_component(), connected);
    }

    #[test]
    fn membership_examples() {
        assert!(sub(&[&[1, -2]], 2).contains(&pt("(4, 2)")).unwrap());
        assert!(!sub(&[&[1, -1]], 2).contains(&pt("(2, 3)")).unwrap());
        assert!(sub(&[&[1, 1]], 2)
            .contains(&pt("(zeta(6,1), zeta(6,5))"))
            .unwrap());
    }

    #[test]
    fn parametrization() {
        let diag = sub(&[&[1, -1]], 2);
        let map = diag.parametrize();
        assert_eq!(map.parameters(), 1);
        let five = parse_cyclo("5", DEFAULT_TRIAL_DIVISION_BOUND).unwrap();
        let p = map.apply(&[five.clone()]).unwrap();
        assert_eq!(p, pt("(5, 5)"));
        assert!(diag.contains(&p).unwrap());

        let anti = sub(&[&[1, 1]], 2);
        let p = anti.parametrize().apply(&[five]).unwrap();
        assert_eq!(p, pt("(5, 1/5)"));

        // rank-1 lattice in the 3-torus: two free parameters, columns
        // orthogonal to the defining vector and jointly primitive
        let h = sub(&[&[1, 1, -1]], 3);
        let map = h.parametrize();
        assert_eq!(map.parameters(), 2);
        let orth_cols = map.exponents.transpose();
        let col_rows: Vec<Vec<BigInt>> =
            (0..2).map(|r| orth_cols.row_vec(r)).collect();
        let col_lattice = Lattice::from_generators(3, &col_rows);
        assert!(col_lattice.is_primitive());
        assert_eq!(col_lattice.rank(), 2);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(49);
        for _ in 0..50 {
            let params: Vec<CycloRational> = (0..2)
                .map(|_| {
                    let mut m = std::collections::BTreeMap::new();
                    m.insert(2u64, rng.gen_range(-2i64..=2));
                    m.insert(3u64, rng.gen_range(-2i64..=2));
                    CycloRational::from_prime_exponents(1, 0, m).unwrap()
                })
                .collect();
            let p = map.apply(&params).unwrap();
            assert!(h.contains(&p).unwrap());
        }
    }

    #[test]
    fn component_representatives_cover() {
        let squares = sub(&[&[0, 2]], 2);
        let reps = squares.component_representatives().unwrap();
        assert_eq!(reps.len(), 2);
        assert!(reps.contains(&pt("(1, 1)")));
        assert!(reps.contains(&pt("(1, -1)")));
        for r in &reps {
            assert!(squares.contains(r).unwrap());
        }

        let finite = sub(&[&[2, 0], &[0, 3]], 2);
        let reps = finite.component_representatives().unwrap();
        assert_eq!(reps.len(), 6);
        let mut seen = std::collections::BTreeSet::new();
        for r in &reps {
            assert!(finite.contains(r).unwrap());
            assert!(seen.insert(r.to_string()), "duplicate representative {r}");
        }

        let connected = sub(&[&[1, -1]], 2);
        let reps = connected.component_representatives().unwrap();
        assert_eq!(reps, vec![pt("(1, 1)")]);
    }

    #[test]
    fn enumeration_counts_and_order() {
        let five = enumerate_connected_subgroups(2, 1, 1);
        assert_eq!(five.len(), 5);
        let expect = [
            vec![vec![0i64, 1]],
            vec![vec![1, -1]],
            vec![vec![1, 0]],
            vec![vec![1, 1]],
            vec![vec![1, 0], vec![0, 1]],
        ];
        for (h, rows) in five.iter().zip(&expect) {
            let want = Lattice::from_i64_rows(
                2,
                &rows.iter().map(|r| r.as_slice()).collect::<Vec<_>>(),
            );
            assert_eq!(h.defining_lattice(), &want);
        }

        let all = enumerate_all_subgroups(2, 1, 2);
        assert_eq!(all.len(), 18);
        let connected = enumerate_connected_subgroups(2, 1, 2);
        assert_eq!(connected.len(), 9);
        // the filtered stream is exactly the connected sublist
        let filtered: Vec<_> =
            all.iter().filter(|h| h.is_connected()).cloned().collect();
        assert_eq!(filtered, connected);

        // canonical forms pairwise distinct
        let mut seen = std::collections::BTreeSet::new();
        for h in &all {
            assert!(seen.insert(format!("{:?}", h.defining_lattice())));
        }

        // ranks ascend, and within a rank the flattened bases ascend
        for w in all.windows(2) {
            let (a, b) = (&w[0], &w[1]);
            let ka = a.codimension();
            let kb = b.codimension();
            assert!(ka < kb || (ka == kb && {
                let fa: Vec<BigInt> = (0..ka).flat_map(|r| a.defining_lattice().basis().row_vec(r)).collect();
                let fb: Vec<BigInt> = (0..kb).flat_map(|r| b.defining_lattice().basis().row_vec(r)).collect();
                fa < fb
            }));
        }
    }

    #[test]
    fn enumeration_edge_cases() {
        let one_dim = enumerate_connected_subgroups(1, 1, 5);
        assert_eq!(one_dim.len(), 1);
        assert_eq!(one_dim[0].defining_lattice(), &Lattice::from_i64_rows(1, &[&[1]]));

        assert!(enumerate_connected_subgroups(2, 3, 2).is_empty());

        // min_codim 0 includes the full torus exactly once, first
        let with_full = enumerate_all_subgroups(2, 0, 1);
        assert_eq!(with_full[0].dimension(), 2);
        assert_eq!(with_full.len(), 1 + enumerate_all_subgroups(2, 1, 1).len());
    }
}
