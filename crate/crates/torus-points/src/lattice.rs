//! Sublattices of Z^n in canonical form.
//!
//! A lattice is stored as the row Hermite form of any generating set, with
//! zero rows dropped, so structural equality of the basis matrix is equality
//! of lattices. Rank 0 (the zero lattice) is a first-class value.

use crate::matrix::IntMatrix;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Lattice {
    ambient: usize,
    basis: IntMatrix,
}

impl Lattice {
    /// Lattice spanned by the given vectors inside Z^ambient. The generators
    /// may be dependent or zero; the stored basis is the canonical Hermite
    /// form with zero rows removed.
    pub fn from_generators(ambient: usize, generators: &[Vec<BigInt>]) -> Self {
        for g in generators {
            assert_eq!(g.len(), ambient, "generator length must equal ambient dimension");
        }
        if generators.is_empty() {
            return Lattice { ambient, basis: IntMatrix::zero(0, ambient) };
        }
        let (h, _) = IntMatrix::from_rows(generators).hnf();
        let rows: Vec<Vec<BigInt>> = (0..h.rows())
            .filter(|&i| h.row(i).iter().any(|x| !x.is_zero()))
            .map(|i| h.row_vec(i))
            .collect();
        Lattice { ambient, basis: IntMatrix::from_rows_with_cols(&rows, ambient) }
    }

    pub fn from_i64_rows(ambient: usize, rows: &[&[i64]]) -> Self {
        let v: Vec<Vec<BigInt>> =
            rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        Lattice::from_generators(ambient, &v)
    }

    /// The zero lattice in Z^ambient.
    pub fn zero(ambient: usize) -> Self {
        Lattice { ambient, basis: IntMatrix::zero(0, ambient) }
    }

    /// All of Z^ambient.
    pub fn full(ambient: usize) -> Self {
        Lattice { ambient, basis: IntMatrix::identity(ambient) }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn rank(&self) -> usize {
        self.basis.rows()
    }

    /// Canonical Hermite basis, one row per basis vector.
    pub fn basis(&self) -> &IntMatrix {
        &self.basis
    }

    pub fn basis_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rank()).map(|i| self.basis.row_vec(i)).collect()
    }

    /// Largest absolute value of any canonical basis entry (0 for rank 0).
    pub fn max_basis_entry(&self) -> BigInt {
        let mut m = BigInt::zero();
        for i in 0..self.rank() {
            for x in self.basis.row(i) {
                if x.abs() > m {
                    m = x.abs();
                }
            }
        }
        m
    }

    /// Saturation Q·L ∩ Z^n, computed through the Smith form: with
    /// `d = u·B·v` diagonal, the row space of B over Q meets Z^n exactly in
    /// the span of the first `rank` rows of `v⁻¹`.
    pub fn saturate(&self) -> Lattice {
        let r = self.rank();
        if r == 0 {
            return self.clone();
        }
        let (_, _, v) = self.basis.snf();
        let vinv = invert_unimodular(&v);
        let rows: Vec<Vec<BigInt>> = (0..r).map(|i| vinv.row_vec(i)).collect();
        Lattice::from_generators(self.ambient, &rows)
    }

    /// True when the gcd of all rank×rank minors of the basis is 1, i.e. the
    /// lattice is a direct summand of Z^n. Decided by direct minor
    /// enumeration, independently of [`Lattice::saturate`].
    pub fn is_primitive(&self) -> bool {
        let r = self.rank();
        self.basis.minors_gcd(r).is_one()
    }

    /// Orthogonal complement {u in Z^n : u·b = 0 for all b in L}, always
    /// primitive of rank `n - rank(L)`.
    pub fn orthogonal(&self) -> Lattice {
        if self.rank() == 0 {
            return Lattice::full(self.ambient);
        }
        let rows = left_kernel(&self.basis.transpose());
        Lattice::from_generators(self.ambient, &rows)
    }

    /// Exact squared covolume det(B·Bᵀ). Positive for rank ≥ 1; the empty
    /// Gram matrix gives 1 for the zero lattice.
    pub fn gram_det(&self) -> BigInt {
        self.basis.mul(&self.basis.transpose()).det()
    }

    /// Coefficients of `v` with respect to the canonical basis, if `v` lies
    /// in the lattice: returns `y` with `y · basis = v`.
    pub fn member_coords(&self, v: &[BigInt]) -> Option<Vec<BigInt>> {
        assert_eq!(v.len(), self.ambient, "vector length must equal ambient dimension");
        let mut rem: Vec<BigInt> = v.to_vec();
        let mut coords = vec![BigInt::zero(); self.rank()];
        for i in 0..self.rank() {
            let pivot_col = (0..self.ambient).find(|&j| !self.basis[(i, j)].is_zero())?;
            // Entries left of this pivot are zero in rows i.. of an echelon
            // basis, so rem must already be zero there.
            if rem[..pivot_col].iter().any(|x| !x.is_zero()) {
                return None;
            }
            let (q, r) = rem[pivot_col].div_rem(&self.basis[(i, pivot_col)]);
            if !r.is_zero() {
                return None;
            }
            for j in 0..self.ambient {
                let sub = &q * &self.basis[(i, j)];
                rem[j] -= sub;
            }
            coords[i] = q;
        }
        if rem.iter().all(|x| x.is_zero()) {
            Some(coords)
        } else {
            None
        }
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        self.member_coords(v).is_some()
    }

    pub fn contains_lattice(&self, other: &Lattice) -> bool {
        other.basis_rows().iter().all(|r| self.contains(r))
    }

    /// Intersection with another lattice in the same ambient space.
    pub fn intersect(&self, other: &Lattice) -> Lattice {
        assert_eq!(self.ambient, other.ambient, "ambient dimensions must agree");
        if self.rank() == 0 || other.rank() == 0 {
            return Lattice::zero(self.ambient);
        }
        // Solve a·B1 = b·B2: the left kernel of the stacked matrix
        // [B1; -B2] gives all such pairs (a, b).
        let r1 = self.rank();
        let mut stacked = Vec::new();
        for i in 0..r1 {
            stacked.push(self.basis.row_vec(i));
        }
        for i in 0..other.rank() {
            stacked.push(other.basis.row(i).iter().map(|x| -x.clone()).collect());
        }
        let kernel = left_kernel(&IntMatrix::from_rows(&stacked));
        let gens: Vec<Vec<BigInt>> = kernel
            .iter()
            .map(|k| {
                let mut v = vec![BigInt::zero(); self.ambient];
                for (i, ki) in k.iter().take(r1).enumerate() {
                    for j in 0..self.ambient {
                        let term = ki * &self.basis[(i, j)];
                        v[j] += term;
                    }
                }
                v
            })
            .collect();
        Lattice::from_generators(self.ambient, &gens)
    }

    /// LLL-reduced basis with δ = 0.99, plus the measured orthogonality
    /// defect `∏‖b_i‖ / covolume` (1.0 for an orthogonal basis).
    pub fn reduced_basis(&self) -> (Vec<Vec<BigInt>>, f64) {
        let r = self.rank();
        if r == 0 {
            return (Vec::new(), 1.0);
        }
        let mut b = self.basis_rows();
        lll_reduce(&mut b);
        let mut norm_sq_prod = BigRational::one();
        for v in &b {
            norm_sq_prod *= BigRational::from_integer(dot(v, v));
        }
        let ratio_sq = norm_sq_prod / BigRational::from_integer(self.gram_det());
        (b, ratio_to_f64(&ratio_sq).sqrt())
    }

    /// Serializes as `{"ambient": n, "basis": [["..", ".."], ..]}` with
    /// decimal-string entries.
    pub fn to_json(&self) -> serde_json::Value {
        let basis: Vec<Vec<String>> = (0..self.rank())
            .map(|i| self.basis.row(i).iter().map(|x| x.to_string()).collect())
            .collect();
        serde_json::json!({ "ambient": self.ambient, "basis": basis })
    }

    /// Reads the JSON shape produced by [`Lattice::to_json`]. Entries may be
    /// decimal strings or plain JSON integers.
    pub fn from_json(v: &serde_json::Value) -> crate::Result<Lattice> {
        let obj = v.as_object().ok_or_else(|| crate::Error::Parse("expected object".into()))?;
        let ambient = obj
            .get("ambient")
            .and_then(|a| a.as_u64())
            .ok_or_else(|| crate::Error::Parse("missing ambient".into()))? as usize;
        let basis_val = obj
            .get("basis")
            .and_then(|b| b.as_array())
            .ok_or_else(|| crate::Error::Parse("missing basis".into()))?;
        let mut rows = Vec::new();
        for row in basis_val {
            let row = row
                .as_array()
                .ok_or_else(|| crate::Error::Parse("basis row must be an array".into()))?;
            let mut out = Vec::new();
            for e in row {
                let x = match e {
                    serde_json::Value::String(s) => s
                        .parse::<BigInt>()
                        .map_err(|_| crate::Error::Parse(format!("bad integer {s:?}")))?,
                    serde_json::Value::Number(n) => BigInt::from(
                        n.as_i64()
                            .ok_or_else(|| crate::Error::Parse("non-integer entry".into()))?,
                    ),
                    _ => return Err(crate::Error::Parse("basis entry must be int/string".into())),
                };
                out.push(x);
            }
            if out.len() != ambient {
                return Err(crate::Error::DimensionMismatch(format!(
                    "basis row has {} entries, ambient is {ambient}",
                    out.len()
                )));
            }
            rows.push(out);
        }
        Ok(Lattice::from_generators(ambient, &rows))
    }
}

impl IntMatrix {
    /// `from_rows`, but with an explicit column count so a matrix with zero
    /// rows keeps its ambient width.
    pub fn from_rows_with_cols(rows: &[Vec<BigInt>], cols: usize) -> IntMatrix {
        if rows.is_empty() {
            return IntMatrix::zero(0, cols);
        }
        let m = IntMatrix::from_rows(rows);
        assert_eq!(m.cols(), cols);
        m
    }
}

/// Basis of {x : x·M = 0}, the left kernel of `M`. Read off the Hermite
/// transform: rows of `u` facing zero rows of `h` span the kernel, and the
/// result is automatically saturated.
pub fn left_kernel(m: &IntMatrix) -> Vec<Vec<BigInt>> {
    let (h, u) = m.hnf();
    (0..h.rows())
        .filter(|&i| h.row(i).iter().all(|x| x.is_zero()))
        .map(|i| u.row_vec(i))
        .collect()
}

/// Inverse of a unimodular matrix, via the Hermite transform (the Hermite
/// form of a unimodular matrix is the identity, so the transform is the
/// inverse). Panics when the argument is not unimodular.
pub fn invert_unimodular(m: &IntMatrix) -> IntMatrix {
    let (h, u) = m.hnf();
    assert_eq!(h, IntMatrix::identity(m.rows()), "matrix is not unimodular");
    u
}

pub fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// In-place LLL reduction with δ = 99/100 over exact rationals. The input
/// rows must be linearly independent; the rows are replaced by a reduced
/// basis of the same lattice.
pub fn lll_reduce(b: &mut Vec<Vec<BigInt>>) {
    let r = b.len();
    if r <= 1 {
        return;
    }
    let delta = BigRational::new(BigInt::from(99), BigInt::from(100));
    let half = BigRational::new(BigInt::one(), BigInt::from(2));

    // Full Gram-Schmidt recomputation each pass; fine at the ranks we use.
    let gso = |b: &Vec<Vec<BigInt>>| -> (Vec<Vec<BigRational>>, Vec<BigRational>) {
        let mut mu = vec![vec![BigRational::zero(); r]; r];
        let mut star: Vec<Vec<BigRational>> = Vec::with_capacity(r);
        let mut norms = Vec::with_capacity(r);
        for i in 0..r {
            let mut v: Vec<BigRational> =
                b[i].iter().map(|x| BigRational::from_integer(x.clone())).collect();
            for j in 0..i {
                let num = rational_dot_int(&star[j], &b[i]);
                let m = &num / &norms[j];
                for (vk, sk) in v.iter_mut().zip(&star[j]) {
                    *vk -= &m * sk;
                }
                mu[i][j] = m;
            }
            let n2: BigRational = v.iter().map(|x| x * x).sum();
            assert!(!n2.is_zero(), "lll input rows must be independent");
            star.push(v);
            norms.push(n2);
        }
        (mu, norms)
    };

    let mut k = 1usize;
    while k < r {
        let (mut mu, _) = gso(b);
        // Size-reduce b[k] against b[k-1], .., b[0].
        for j in (0..k).rev() {
            if mu[k][j].abs() > half {
                let q = round_rational(&mu[k][j]);
                for idx in 0..b[k].len() {
                    let sub = &q * &b[j][idx];
                    b[k][idx] -= sub;
                }
                let (mu2, _) = gso(b);
                mu = mu2;
            }
        }
        let (mu, norms) = gso(b);
        let lhs = &norms[k];
        let rhs = (&delta - &mu[k][k - 1] * &mu[k][k - 1]) * &norms[k - 1];
        if *lhs >= rhs {
            k += 1;
        } else {
            b.swap(k, k - 1);
            k = k.max(2) - 1;
        }
    }
}

fn rational_dot_int(a: &[BigRational], b: &[BigInt]) -> BigRational {
    a.iter().zip(b).map(|(x, y)| x * BigRational::from_integer(y.clone())).sum()
}

/// Nearest integer, ties rounded up.
pub fn round_rational(x: &BigRational) -> BigInt {
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    (x + half).floor().to_integer()
}

/// f64 value of a big rational, falling back to bit-length scaling when the
/// parts overflow f64 range.
pub fn ratio_to_f64(x: &BigRational) -> f64 {
    if let Some(v) = x.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    let num = x.numer();
    let den = x.denom();
    if num.is_zero() {
        return 0.0;
    }
    let shift = (num.bits() as i64 - den.bits() as i64 - 64).max(0) as u64;
    let n = (num >> shift).to_f64().unwrap_or(f64::MAX);
    let d = (den.clone()).to_f64().unwrap_or(f64::MAX);
    n / d * 2f64.powi(shift as i32)
}
