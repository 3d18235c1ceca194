//! Dense integer matrices with exact normal forms.
//!
//! Entries are arbitrary-precision integers. The two normal forms both come
//! with their transform matrices so callers can verify `h = u*m` and
//! `d = u*m*v` by multiplication; the unit tests do exactly that.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Row-major dense matrix over Z.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<BigInt>) -> Self {
        assert_eq!(data.len(), rows * cols, "data length must be rows*cols");
        IntMatrix { rows, cols, data }
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zero(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<BigInt>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend_from_slice(row);
        }
        IntMatrix { rows: r, cols: c, data }
    }

    /// Convenience constructor from machine integers, mostly for tests.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let converted: Vec<Vec<BigInt>> =
            rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        IntMatrix::from_rows(&converted)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vec(&self, i: usize) -> Vec<BigInt> {
        self.row(i).to_vec()
    }

    pub fn col_vec(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = IntMatrix::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "inner dimensions must agree");
        let mut out = IntMatrix::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let prod = a * &other[(k, j)];
                    out[(i, j)] += prod;
                }
            }
        }
        out
    }

    pub fn is_zero_matrix(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[a] -= q * row[b]
    fn row_sub_mul(&mut self, a: usize, b: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let sub = q * &self[(b, j)];
            self[(a, j)] -= sub;
        }
    }

    /// col[a] -= q * col[b]
    fn col_sub_mul(&mut self, a: usize, b: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let sub = q * &self[(i, b)];
            self[(i, a)] -= sub;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -self[(i, j)].clone();
            self[(i, j)] = v;
        }
    }

    /// Row-style Hermite normal form.
    ///
    /// Returns `(h, u)` with `h = u * self`, `u` unimodular. `h` is in the
    /// canonical shape used throughout: echelon rows, positive pivots, the
    /// entries above each pivot reduced into `[0, pivot)`, zero rows last.
    pub fn hnf(&self) -> (IntMatrix, IntMatrix) {
        let mut h = self.clone();
        let mut u = IntMatrix::identity(self.rows);
        let mut pivot_row = 0usize;
        let mut pivots: Vec<(usize, usize)> = Vec::new();

        for col in 0..self.cols {
            if pivot_row == self.rows {
                break;
            }
            // Gcd elimination in this column below pivot_row: repeatedly pull
            // the least nonzero up and reduce the others by it.
            loop {
                let mut best: Option<usize> = None;
                for r in pivot_row..self.rows {
                    if !h[(r, col)].is_zero() {
                        best = match best {
                            None => Some(r),
                            Some(b) if h[(r, col)].abs() < h[(b, col)].abs() => Some(r),
                            other => other,
                        };
                    }
                }
                let Some(best) = best else { break };
                h.swap_rows(pivot_row, best);
                u.swap_rows(pivot_row, best);
                let mut any_left = false;
                for r in pivot_row + 1..self.rows {
                    if h[(r, col)].is_zero() {
                        continue;
                    }
                    let q = h[(r, col)].div_floor(&h[(pivot_row, col)]);
                    h.row_sub_mul(r, pivot_row, &q);
                    u.row_sub_mul(r, pivot_row, &q);
                    if !h[(r, col)].is_zero() {
                        any_left = true;
                    }
                }
                if !any_left {
                    break;
                }
            }
            if h[(pivot_row, col)].is_zero() {
                continue; // no pivot in this column
            }
            if h[(pivot_row, col)].is_negative() {
                h.negate_row(pivot_row);
                u.negate_row(pivot_row);
            }
            // Reduce entries above the pivot into [0, pivot).
            for r in 0..pivot_row {
                let q = h[(r, col)].div_floor(&h[(pivot_row, col)]);
                h.row_sub_mul(r, pivot_row, &q);
                u.row_sub_mul(r, pivot_row, &q);
            }
            pivots.push((pivot_row, col));
            pivot_row += 1;
        }
        (h, u)
    }

    /// Rank over Q, read off the Hermite form.
    pub fn rank(&self) -> usize {
        let (h, _) = self.hnf();
        (0..h.rows).filter(|&i| h.row(i).iter().any(|x| !x.is_zero())).count()
    }

    /// Smith normal form. Returns `(u, d, v)` with `d = u * self * v`,
    /// `u`, `v` unimodular and `d` diagonal with `d[0] | d[1] | ...`,
    /// all diagonal entries non-negative.
    pub fn snf(&self) -> (IntMatrix, IntMatrix, IntMatrix) {
        let mut d = self.clone();
        let mut u = IntMatrix::identity(self.rows);
        let mut v = IntMatrix::identity(self.cols);
        let bound = self.rows.min(self.cols);

        let mut t = 0usize;
        while t < bound {
            // Locate a least-magnitude nonzero pivot in the trailing block.
            let mut pivot: Option<(usize, usize)> = None;
            for i in t..self.rows {
                for j in t..self.cols {
                    if !d[(i, j)].is_zero() {
                        pivot = match pivot {
                            None => Some((i, j)),
                            Some(p) if d[(i, j)].abs() < d[p].abs() => Some((i, j)),
                            other => other,
                        };
                    }
                }
            }
            let Some((pi, pj)) = pivot else { break };
            d.swap_rows(t, pi);
            u.swap_rows(t, pi);
            d.swap_cols(t, pj);
            v.swap_cols(t, pj);

            // Clear row and column t. Reductions can reintroduce entries, so
            // loop until both are clean.
            loop {
                let mut dirty = false;
                for i in t + 1..self.rows {
                    if d[(i, t)].is_zero() {
                        continue;
                    }
                    let q = d[(i, t)].div_floor(&d[(t, t)]);
                    d.row_sub_mul(i, t, &q);
                    u.row_sub_mul(i, t, &q);
                    if !d[(i, t)].is_zero() {
                        // Remainder is smaller than the pivot: promote it.
                        d.swap_rows(t, i);
                        u.swap_rows(t, i);
                        dirty = true;
                    }
                }
                for j in t + 1..self.cols {
                    if d[(t, j)].is_zero() {
                        continue;
                    }
                    let q = d[(t, j)].div_floor(&d[(t, t)]);
                    d.col_sub_mul(j, t, &q);
                    v.col_sub_mul(j, t, &q);
                    if !d[(t, j)].is_zero() {
                        d.swap_cols(t, j);
                        v.swap_cols(t, j);
                        dirty = true;
                    }
                }
                if !dirty {
                    break;
                }
            }

            // Divisibility pass: the pivot must divide the whole trailing
            // block, otherwise fold the offending column in and redo.
            let mut redo = false;
            'scan: for i in t + 1..self.rows {
                for j in t + 1..self.cols {
                    if !d[(i, j)].mod_floor(&d[(t, t)]).is_zero() {
                        // col t += col j, then restart the clearing loop
                        let minus_one = -BigInt::one();
                        d.col_sub_mul(t, j, &minus_one);
                        v.col_sub_mul(t, j, &minus_one);
                        redo = true;
                        break 'scan;
                    }
                }
            }
            if redo {
                continue;
            }
            if d[(t, t)].is_negative() {
                d.negate_row(t);
                u.negate_row(t);
            }
            t += 1;
        }
        (u, d, v)
    }

    /// The nonzero diagonal of the Smith form: `d1 | d2 | ...`.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        let (_, d, _) = self.snf();
        let mut out = Vec::new();
        for t in 0..self.rows.min(self.cols) {
            if d[(t, t)].is_zero() {
                break;
            }
            out.push(d[(t, t)].clone());
        }
        out
    }

    /// Determinant of a square matrix by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "det requires a square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[(k, k)].is_zero() {
                let swap = (k + 1..n).find(|&r| !a[(r, k)].is_zero());
                match swap {
                    Some(r) => {
                        a.swap_rows(k, r);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &a[(i, j)] * &a[(k, k)] - &a[(i, k)] * &a[(k, j)];
                    a[(i, j)] = num / &prev; // exact by Bareiss
                }
                a[(i, k)] = BigInt::zero();
            }
            prev = a[(k, k)].clone();
        }
        sign * a[(n - 1, n - 1)].clone()
    }

    /// Gcd of all r×r minors, computed by direct enumeration of row and
    /// column subsets. Returns 0 when every minor vanishes (in particular
    /// when `r` exceeds either dimension), and 1 for `r = 0`.
    pub fn minors_gcd(&self, r: usize) -> BigInt {
        if r == 0 {
            return BigInt::one();
        }
        if r > self.rows || r > self.cols {
            return BigInt::zero();
        }
        let row_sets = combinations(self.rows, r);
        let col_sets = combinations(self.cols, r);
        let mut g = BigInt::zero();
        for rs in &row_sets {
            for cs in &col_sets {
                let mut sub = IntMatrix::zero(r, r);
                for (si, &i) in rs.iter().enumerate() {
                    for (sj, &j) in cs.iter().enumerate() {
                        sub[(si, sj)] = self[(i, j)].clone();
                    }
                }
                let m = sub.det();
                g = g.gcd(&m);
                if g.is_one() {
                    return g;
                }
            }
        }
        g
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

impl std::fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// All size-k subsets of {0, .., n-1} in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        let remaining = k - cur.len();
        for i in start..=n.saturating_sub(remaining) {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    if k <= n {
        rec(0, n, k, &mut cur, &mut out);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn is_unimodular(m: &IntMatrix) -> bool {
        m.rows() == m.cols() && m.det().abs() == BigInt::one()
    }

    fn assert_canonical_hnf(h: &IntMatrix) {
        // echelon with positive pivots, reduced entries above, zero rows last
        let mut last_pivot_col: Option<usize> = None;
        let mut seen_zero_row = false;
        for i in 0..h.rows() {
            let pivot = (0..h.cols()).find(|&j| !h[(i, j)].is_zero());
            match pivot {
                None => seen_zero_row = true,
                Some(j) => {
                    assert!(!seen_zero_row, "zero row above a nonzero row");
                    if let Some(prev) = last_pivot_col {
                        assert!(j > prev, "pivot columns must strictly increase");
                    }
                    last_pivot_col = Some(j);
                    assert!(h[(i, j)].is_positive(), "pivot must be positive");
                    for r in 0..i {
                        assert!(
                            !h[(r, j)].is_negative() && h[(r, j)] < h[(i, j)],
                            "entry above pivot not reduced"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn hnf_reproduces_input_through_transform() {
        let m = IntMatrix::from_i64(&[&[4, 6], &[2, 2]]);
        let (h, u) = m.hnf();
        assert_eq!(u.mul(&m), h);
        assert!(is_unimodular(&u));
        assert_canonical_hnf(&h);
        assert_eq!(h, IntMatrix::from_i64(&[&[2, 0], &[0, 2]]));
    }

    #[test]
    fn hnf_randomized_transform_identity() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..300 {
            let rows = rng.gen_range(1..=5);
            let cols = rng.gen_range(1..=5);
            let data: Vec<BigInt> =
                (0..rows * cols).map(|_| BigInt::from(rng.gen_range(-30i64..=30))).collect();
            let m = IntMatrix::new(rows, cols, data);
            let (h, u) = m.hnf();
            assert_eq!(u.mul(&m), h);
            assert!(is_unimodular(&u));
            assert_canonical_hnf(&h);
        }
    }

    #[test]
    fn snf_of_diag_2_3_has_invariant_factors_1_6() {
        let m = IntMatrix::from_i64(&[&[2, 0], &[0, 3]]);
        let (u, d, v) = m.snf();
        assert_eq!(u.mul(&m).mul(&v), d);
        assert_eq!(m.invariant_factors(), vec![BigInt::from(1), BigInt::from(6)]);
        assert!(is_unimodular(&u));
        assert!(is_unimodular(&v));
        assert_eq!(d[(0, 0)], BigInt::from(1));
        assert_eq!(d[(1, 1)], BigInt::from(6));
    }

    #[test]
    fn snf_randomized_shape_and_divisibility() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..300 {
            let rows = rng.gen_range(1..=5);
            let cols = rng.gen_range(1..=5);
            let data: Vec<BigInt> =
                (0..rows * cols).map(|_| BigInt::from(rng.gen_range(-20i64..=20))).collect();
            let m = IntMatrix::new(rows, cols, data);
            let (u, d, v) = m.snf();
            assert_eq!(u.mul(&m).mul(&v), d, "d = u*m*v failed");
            assert!(is_unimodular(&u));
            assert!(is_unimodular(&v));
            // diagonal, non-negative, successive divisibility
            for i in 0..rows {
                for j in 0..cols {
                    if i != j {
                        assert!(d[(i, j)].is_zero(), "off-diagonal nonzero");
                    }
                }
            }
            let diag: Vec<BigInt> = (0..rows.min(cols)).map(|t| d[(t, t)].clone()).collect();
            for w in diag.windows(2) {
                if !w[1].is_zero() {
                    assert!(!w[0].is_zero(), "zero before nonzero on diagonal");
                }
                if !w[0].is_zero() && !w[1].is_zero() {
                    assert!(w[1].mod_floor(&w[0]).is_zero(), "divisibility chain broken");
                }
                assert!(!w[0].is_negative() && !w[1].is_negative());
            }
        }
    }

    #[test]
    fn minors_gcd_examples() {
        let m = IntMatrix::from_i64(&[&[1, 2, 3], &[0, 1, 1]]);
        assert_eq!(m.minors_gcd(2), BigInt::one());
        let m2 = IntMatrix::from_i64(&[&[2, 4]]);
        assert_eq!(m2.minors_gcd(1), BigInt::from(2));
        assert_eq!(m2.minors_gcd(2), BigInt::zero());
        assert_eq!(m2.minors_gcd(0), BigInt::one());
        // all 2x2 minors vanish for a rank-1 matrix
        let m3 = IntMatrix::from_i64(&[&[2, 4], &[3, 6]]);
        assert_eq!(m3.minors_gcd(2), BigInt::zero());
    }

    #[test]
    fn minors_gcd_equals_product_of_invariant_factors() {
        // classical: gcd of r-minors = d1*...*dr for the Smith form
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(13);
        for _ in 0..200 {
            let rows = rng.gen_range(1..=4);
            let cols = rng.gen_range(1..=4);
            let data: Vec<BigInt> =
                (0..rows * cols).map(|_| BigInt::from(rng.gen_range(-9i64..=9))).collect();
            let m = IntMatrix::new(rows, cols, data);
            let inv = m.invariant_factors();
            for r in 1..=rows.min(cols) {
                let expected = if r <= inv.len() {
                    inv[..r].iter().product::<BigInt>()
                } else {
                    BigInt::zero()
                };
                assert_eq!(m.minors_gcd(r), expected, "minor gcd vs smith mismatch");
            }
        }
    }

    #[test]
    fn det_agrees_with_cofactor_expansion_small() {
        fn cofactor_det(m: &IntMatrix) -> BigInt {
            let n = m.rows();
            if n == 0 {
                return BigInt::one();
            }
            if n == 1 {
                return m[(0, 0)].clone();
            }
            let mut acc = BigInt::zero();
            for j in 0..n {
                let mut sub = IntMatrix::zero(n - 1, n - 1);
                for i in 1..n {
                    let mut cj = 0;
                    for c in 0..n {
                        if c == j {
                            continue;
                        }
                        sub[(i - 1, cj)] = m[(i, c)].clone();
                        cj += 1;
                    }
                }
                let term = &m[(0, j)] * cofactor_det(&sub);
                if j % 2 == 0 {
                    acc += term;
                } else {
                    acc -= term;
                }
            }
            acc
        }
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for _ in 0..100 {
            let n = rng.gen_range(1..=4);
            let data: Vec<BigInt> =
                (0..n * n).map(|_| BigInt::from(rng.gen_range(-12i64..=12))).collect();
            let m = IntMatrix::new(n, n, data);
            assert_eq!(m.det(), cofactor_det(&m));
        }
    }

    #[test]
    fn combinations_order_and_count() {
        let c = combinations(4, 2);
        assert_eq!(c, vec![
            vec![0, 1],
            vec![0, 2],
            vec![0, 3],
            vec![1, 2],
            vec![1, 3],
            vec![2, 3]
        ]);
        assert_eq!(combinations(5, 0), vec![Vec::<usize>::new()]);
        assert!(combinations(2, 3).is_empty());
    }
}
