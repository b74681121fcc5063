//! Exact integer lattice algorithms: Hermite and Smith normal forms.
//!
//! Lattices are given by generator vectors. Written as the columns of a
//! matrix, the Hermite basis returned here is in column echelon form: basis
//! vector `j` has its first nonzero coordinate (the pivot, positive) at row
//! `p_j` with `p_0 < p_1 < ...`, and every other basis vector's entry in row
//! `p_j` lies in `[0, pivot_j)`. That form is unique for the lattice.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub type IntVec = Vec<BigInt>;

/// Canonical Hermite basis of the lattice spanned by `gens` (all of equal
/// dimension). The zero lattice has the empty basis.
pub fn hnf(gens: &[IntVec]) -> Vec<IntVec> {
    let Some(dim) = gens.first().map(Vec::len) else {
        return Vec::new();
    };
    let mut rows: Vec<IntVec> = gens.iter().filter(|g| g.iter().any(|x| !x.is_zero())).cloned().collect();
    assert!(rows.iter().all(|r| r.len() == dim), "generator dimensions differ");

    let mut pivot_row = 0;
    for col in 0..dim {
        if pivot_row == rows.len() {
            break;
        }
        loop {
            // smallest nonzero entry in this column becomes the pivot
            let best = (pivot_row..rows.len())
                .filter(|&i| !rows[i][col].is_zero())
                .min_by(|&i, &j| rows[i][col].abs().cmp(&rows[j][col].abs()));
            let Some(best) = best else { break };
            rows.swap(pivot_row, best);
            let mut done = true;
            for i in pivot_row + 1..rows.len() {
                if rows[i][col].is_zero() {
                    continue;
                }
                let q = rows[i][col].div_floor(&rows[pivot_row][col]);
                let (head, tail) = rows.split_at_mut(i);
                axpy(&mut tail[0], &q, &head[pivot_row]);
                if !tail[0][col].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if pivot_row == rows.len() || rows[pivot_row][col].is_zero() {
            continue;
        }
        if rows[pivot_row][col].is_negative() {
            for x in rows[pivot_row].iter_mut() {
                *x = -&*x;
            }
        }
        for i in 0..pivot_row {
            let q = rows[i][col].div_floor(&rows[pivot_row][col]);
            if !q.is_zero() {
                let (head, tail) = rows.split_at_mut(pivot_row);
                axpy(&mut head[i], &q, &tail[0]);
            }
        }
        pivot_row += 1;
    }
    rows.truncate(pivot_row);
    rows
}

/// `target -= q * source`
fn axpy(target: &mut IntVec, q: &BigInt, source: &IntVec) {
    for (t, s) in target.iter_mut().zip(source) {
        *t -= q * s;
    }
}

/// Smith normal form data for a matrix `M` (given as rows): unimodular `left`
/// with `left * M * V = diag(diagonal, 0...)` for some unimodular `V`.
#[derive(Debug, Clone)]
pub struct Smith {
    /// Nonzero invariant factors, each dividing the next.
    pub diagonal: Vec<BigInt>,
    pub left: Vec<IntVec>,
}

pub fn smith(matrix: &[IntVec]) -> Smith {
    let rows = matrix.len();
    let cols = matrix.first().map_or(0, Vec::len);
    let mut a: Vec<IntVec> = matrix.to_vec();
    let mut left: Vec<IntVec> = (0..rows)
        .map(|i| (0..rows).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect();
    let mut diagonal = Vec::new();

    for t in 0..rows.min(cols) {
        let Some((pi, pj)) = min_entry(&a, t) else { break };
        a.swap(t, pi);
        left.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let mut clean = true;
            for i in t + 1..rows {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = a[i][t].div_floor(&a[t][t]);
                let (head, tail) = a.split_at_mut(i);
                axpy(&mut tail[0], &q, &head[t]);
                let (lh, lt) = left.split_at_mut(i);
                axpy(&mut lt[0], &q, &lh[t]);
                if !a[i][t].is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..cols {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = a[t][j].div_floor(&a[t][t]);
                for row in a.iter_mut() {
                    let sub = &q * &row[t];
                    row[j] -= sub;
                }
                if !a[t][j].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                let (pi, pj) = min_entry_cross(&a, t);
                a.swap(t, pi);
                left.swap(t, pi);
                for row in a.iter_mut() {
                    row.swap(t, pj);
                }
                continue;
            }
            // divisibility: the pivot must divide everything below-right
            let offender = (t + 1..rows)
                .find(|&i| (t + 1..cols).any(|j| !a[i][j].is_multiple_of(&a[t][t])));
            match offender {
                Some(i) => {
                    let (head, tail) = a.split_at_mut(i);
                    let neg = -BigInt::one();
                    axpy(&mut head[t], &neg, &tail[0]);
                    let (lh, lt) = left.split_at_mut(i);
                    axpy(&mut lh[t], &neg, &lt[0]);
                }
                None => break,
            }
        }
        if a[t][t].is_negative() {
            for x in a[t].iter_mut() {
                *x = -&*x;
            }
            for x in left[t].iter_mut() {
                *x = -&*x;
            }
        }
        diagonal.push(a[t][t].clone());
    }
    Smith { diagonal, left }
}

/// Invariant factors `d_1 | d_2 | ...` of a matrix (nonzero ones only).
pub fn snf_diagonal(matrix: &[IntVec]) -> Vec<BigInt> {
    smith(matrix).diagonal
}

fn min_entry(a: &[IntVec], t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for (i, row) in a.iter().enumerate().skip(t) {
        for (j, x) in row.iter().enumerate().skip(t) {
            if x.is_zero() {
                continue;
            }
            if best.map_or(true, |(bi, bj)| x.abs() < a[bi][bj].abs()) {
                best = Some((i, j));
            }
        }
    }
    best
}

/// Smallest nonzero entry in row `t` or column `t` (pivot included).
fn min_entry_cross(a: &[IntVec], t: usize) -> (usize, usize) {
    let mut best = (t, t);
    for i in t..a.len() {
        if !a[i][t].is_zero() && (a[best.0][best.1].is_zero() || a[i][t].abs() < a[best.0][best.1].abs()) {
            best = (i, t);
        }
    }
    for j in t..a[t].len() {
        if !a[t][j].is_zero() && a[t][j].abs() < a[best.0][best.1].abs() {
            best = (t, j);
        }
    }
    best
}

pub fn int_vec<I: IntoIterator<Item = i64>>(xs: I) -> IntVec {
    xs.into_iter().map(BigInt::from).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[i64]) -> IntVec {
        int_vec(xs.iter().copied())
    }

    fn ints(xs: &[BigInt]) -> Vec<i64> {
        xs.iter().map(|x| i64::try_from(x).unwrap()).collect()
    }

    /// Every vector `sum c_i g_i` with `|c_i| <= bound`, restricted to a box.
    fn small_combinations(gens: &[IntVec], bound: i64, window: i64) -> std::collections::BTreeSet<Vec<i64>> {
        let dim = gens[0].len();
        let mut out = std::collections::BTreeSet::new();
        let k = gens.len();
        let width = (2 * bound + 1) as usize;
        for code in 0..width.pow(k as u32) {
            let mut c = code;
            let mut acc = vec![0i64; dim];
            for g in gens {
                let coeff = (c % width) as i64 - bound;
                c /= width;
                for (a, x) in acc.iter_mut().zip(g) {
                    *a += coeff * i64::try_from(x).unwrap();
                }
            }
            if acc.iter().all(|x| x.abs() <= window) {
                out.insert(acc);
            }
        }
        out
    }

    #[test]
    fn hnf_identity() {
        let id = vec![v(&[1, 0]), v(&[0, 1])];
        assert_eq!(hnf(&id), id);
    }

    #[test]
    fn hnf_drops_redundant_generator() {
        let gens = vec![v(&[2, 0]), v(&[0, 3]), v(&[4, 6])];
        let h = hnf(&gens);
        assert_eq!(h, vec![v(&[2, 0]), v(&[0, 3])]);
        // enumeration oracle: the small vectors of both lattices coincide
        assert_eq!(small_combinations(&gens, 4, 6), small_combinations(&h, 6, 6));
    }

    #[test]
    fn hnf_zero_matrix() {
        assert!(hnf(&[v(&[0, 0]), v(&[0, 0])]).is_empty());
        assert!(hnf(&[]).is_empty());
    }

    #[test]
    fn hnf_reduces_above_pivots() {
        let h = hnf(&[v(&[1, 5]), v(&[0, 2])]);
        assert_eq!(h, vec![v(&[1, 1]), v(&[0, 2])]);
        let h = hnf(&[v(&[-3, 0, 1]), v(&[0, 0, 2])]);
        assert_eq!(h, vec![v(&[3, 0, 1]), v(&[0, 0, 2])]);
    }

    #[test]
    fn snf_examples() {
        assert_eq!(ints(&snf_diagonal(&[v(&[2, 0]), v(&[0, 3])])), vec![1, 6]);
        assert_eq!(ints(&snf_diagonal(&[v(&[2, 0]), v(&[0, 4])])), vec![2, 4]);
        assert_eq!(
            ints(&snf_diagonal(&[v(&[1, 0, 0]), v(&[0, 1, 0]), v(&[0, 0, 1])])),
            vec![1, 1, 1]
        );
        assert!(snf_diagonal(&[v(&[0, 0])]).is_empty());
    }

    #[test]
    fn smith_left_transform_is_consistent() {
        let m = vec![v(&[4, 6, 2]), v(&[6, 9, 3]), v(&[2, 8, 0])];
        let s = smith(&m);
        // left * m has rows whose gcds are multiples of the diagonal entries
        for (i, d) in s.diagonal.iter().enumerate() {
            for j in 0..3 {
                let entry: BigInt = (0..3).map(|k| &s.left[i][k] * &m[k][j]).sum();
                assert!(entry.is_multiple_of(d));
            }
        }
        // the matrix is singular of rank 2
        assert_eq!(s.diagonal.len(), 2);
        assert!(s.diagonal[1].is_multiple_of(&s.diagonal[0]));
    }

    fn apply_ops(mut rows: Vec<IntVec>, ops: &[(usize, usize, i64, u8)]) -> Vec<IntVec> {
        let n = rows.len();
        for &(i, j, k, kind) in ops {
            let (i, j) = (i % n, j % n);
            match kind % 3 {
                0 if i != j => {
                    let src = rows[j].clone();
                    axpy(&mut rows[i], &BigInt::from(-k), &src);
                }
                1 => rows.swap(i, j),
                _ => {
                    for x in rows[i].iter_mut() {
                        *x = -&*x;
                    }
                }
            }
        }
        rows
    }

    proptest::proptest! {
        #[test]
        fn hnf_is_invariant_under_unimodular_changes(
            rows in proptest::collection::vec(proptest::collection::vec(-9i64..10, 3), 1..5),
            ops in proptest::collection::vec((0usize..5, 0usize..5, -3i64..4, 0u8..3), 0..12),
        ) {
            let gens: Vec<IntVec> = rows.iter().map(|r| v(r)).collect();
            let h = hnf(&gens);
            proptest::prop_assert_eq!(hnf(&apply_ops(gens.clone(), &ops)), h.clone());
            proptest::prop_assert_eq!(hnf(&h), h.clone());
            // pivots strictly increase and are positive
            let pivots: Vec<usize> = h.iter().map(|r| r.iter().position(|x| !x.is_zero()).unwrap()).collect();
            proptest::prop_assert!(pivots.windows(2).all(|w| w[0] < w[1]));
            for (r, &p) in h.iter().zip(&pivots) {
                proptest::prop_assert!(r[p].is_positive());
            }
        }
    }
}
