//! Integer row-lattice algorithms: Hermite and Smith normal forms.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::Z;

pub type Mat = Vec<Vec<Z>>;

pub fn identity(n: usize) -> Mat {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { Z::one() } else { Z::zero() }).collect())
        .collect()
}

pub fn mat_mul(a: &Mat, b: &Mat, inner: usize, cols: usize) -> Mat {
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).fold(Z::zero(), |s, k| s + &row[k] * &b[k][j]))
                .collect()
        })
        .collect()
}

fn row_sub(m: &mut Mat, target: usize, src: usize, f: &Z) {
    if f.is_zero() {
        return;
    }
    let (t, s) = if target < src {
        let (lo, hi) = m.split_at_mut(src);
        (&mut lo[target], &hi[0])
    } else {
        let (lo, hi) = m.split_at_mut(target);
        (&mut hi[0], &lo[src])
    };
    for (x, y) in t.iter_mut().zip(s.iter()) {
        *x -= f * y;
    }
}

fn col_sub(m: &mut Mat, target: usize, src: usize, f: &Z) {
    if f.is_zero() {
        return;
    }
    for row in m.iter_mut() {
        let d = f * &row[src];
        row[target] -= d;
    }
}

fn col_swap(m: &mut Mat, a: usize, b: usize) {
    for row in m.iter_mut() {
        row.swap(a, b);
    }
}

fn row_neg(m: &mut Mat, r: usize) {
    for x in m[r].iter_mut() {
        *x = -x.clone();
    }
}

/// Row Hermite normal form.
#[derive(Clone, Debug)]
pub struct Hnf {
    /// Nonzero rows in echelon form; pivots positive, entries above a pivot
    /// reduced into [0, pivot).
    pub basis: Mat,
    pub pivots: Vec<usize>,
    /// `transform * input = [basis; 0]`, unimodular.
    pub transform: Mat,
    /// Rows of `transform` spanning the left kernel of the input.
    pub kernel: Mat,
}

pub fn hnf(rows: &Mat, ncols: usize) -> Hnf {
    let m = rows.len();
    let mut a = rows.clone();
    let mut u = identity(m);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == m {
            break;
        }
        loop {
            let best = (r..m)
                .filter(|&i| !a[i][c].is_zero())
                .min_by(|&i, &j| a[i][c].abs().cmp(&a[j][c].abs()));
            let Some(b) = best else { break };
            a.swap(r, b);
            u.swap(r, b);
            let mut done = true;
            for i in r + 1..m {
                if a[i][c].is_zero() {
                    continue;
                }
                let f = a[i][c].div_floor(&a[r][c]);
                row_sub(&mut a, i, r, &f);
                row_sub(&mut u, i, r, &f);
                if !a[i][c].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if a[r][c].is_zero() {
            continue;
        }
        if a[r][c].is_negative() {
            row_neg(&mut a, r);
            row_neg(&mut u, r);
        }
        for i in 0..r {
            let f = a[i][c].div_floor(&a[r][c]);
            row_sub(&mut a, i, r, &f);
            row_sub(&mut u, i, r, &f);
        }
        pivots.push(c);
        r += 1;
    }
    let kernel = u[r..].to_vec();
    a.truncate(r);
    Hnf { basis: a, pivots, transform: u, kernel }
}

/// Integer coefficients `c` with `c * basis = v`, if `v` lies in the row span.
pub fn solve_in(h: &Hnf, v: &[Z]) -> Option<Vec<Z>> {
    let mut rest = v.to_vec();
    let mut c = vec![Z::zero(); h.basis.len()];
    for (i, &p) in h.pivots.iter().enumerate() {
        let (q, r) = rest[p].div_rem(&h.basis[i][p]);
        if !r.is_zero() {
            return None;
        }
        for (x, y) in rest.iter_mut().zip(h.basis[i].iter()) {
            *x -= &q * y;
        }
        c[i] = q;
    }
    rest.iter().all(Zero::is_zero).then_some(c)
}

/// Smith normal form `u * a * v = diag(d)`.
#[derive(Clone, Debug)]
pub struct Snf {
    /// Nonzero invariant factors, each dividing the next.
    pub diag: Vec<Z>,
    pub u: Mat,
    pub v: Mat,
}

pub fn snf(rows: &Mat, ncols: usize) -> Snf {
    let m = rows.len();
    let n = ncols;
    let mut a = rows.clone();
    let mut u = identity(m);
    let mut v = identity(n);
    let mut diag = Vec::new();
    let mut t = 0;
    while t < m.min(n) {
        let best = (t..m)
            .flat_map(|i| (t..n).map(move |j| (i, j)))
            .filter(|&(i, j)| !a[i][j].is_zero())
            .min_by(|&(i, j), &(k, l)| a[i][j].abs().cmp(&a[k][l].abs()));
        let Some((bi, bj)) = best else { break };
        a.swap(t, bi);
        u.swap(t, bi);
        col_swap(&mut a, t, bj);
        col_swap(&mut v, t, bj);
        loop {
            let mut clean = true;
            for i in t + 1..m {
                if a[i][t].is_zero() {
                    continue;
                }
                let f = a[i][t].div_floor(&a[t][t]);
                row_sub(&mut a, i, t, &f);
                row_sub(&mut u, i, t, &f);
                if !a[i][t].is_zero() {
                    clean = false;
                    if a[i][t].abs() < a[t][t].abs() {
                        a.swap(t, i);
                        u.swap(t, i);
                    }
                }
            }
            for j in t + 1..n {
                if a[t][j].is_zero() {
                    continue;
                }
                let f = a[t][j].div_floor(&a[t][t]);
                col_sub(&mut a, j, t, &f);
                col_sub(&mut v, j, t, &f);
                if !a[t][j].is_zero() {
                    clean = false;
                    if a[t][j].abs() < a[t][t].abs() {
                        col_swap(&mut a, t, j);
                        col_swap(&mut v, t, j);
                    }
                }
            }
            if !clean {
                continue;
            }
            let bad = (t + 1..m).find(|&i| (t + 1..n).any(|j| !a[i][j].is_multiple_of(&a[t][t])));
            match bad {
                Some(i) => {
                    let f = -Z::one();
                    row_sub(&mut a, t, i, &f);
                    row_sub(&mut u, t, i, &f);
                }
                None => break,
            }
        }
        if a[t][t].is_negative() {
            row_neg(&mut a, t);
            row_neg(&mut u, t);
        }
        diag.push(a[t][t].clone());
        t += 1;
    }
    Snf { diag, u, v }
}

/// |det| of a square matrix.
pub fn abs_det(rows: &Mat) -> Z {
    let n = rows.len();
    let h = hnf(rows, n);
    if h.basis.len() < n {
        return Z::zero();
    }
    (0..n).fold(Z::one(), |acc, i| acc * &h.basis[i][i])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::z;
    use proptest::prelude::*;

    fn m(rows: &[&[i64]]) -> Mat {
        rows.iter().map(|r| r.iter().map(|&x| z(x)).collect()).collect()
    }

    fn det_oracle(a: &[Vec<i64>]) -> i64 {
        // cofactor expansion
        let n = a.len();
        if n == 0 {
            return 1;
        }
        (0..n)
            .map(|j| {
                let minor: Vec<Vec<i64>> = a[1..]
                    .iter()
                    .map(|r| r.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, &x)| x).collect())
                    .collect();
                let s = if j % 2 == 0 { 1 } else { -1 };
                s * a[0][j] * det_oracle(&minor)
            })
            .sum()
    }

    #[test]
    fn hnf_small() {
        let h = hnf(&m(&[&[2, 4], &[3, 1]]), 2);
        assert_eq!(h.basis, m(&[&[1, 7], &[0, 10]]));
        assert_eq!(abs_det(&m(&[&[2, 0], &[0, 3]])), z(6));
        let k = hnf(&m(&[&[1, 2], &[2, 4]]), 2);
        assert_eq!(k.basis.len(), 1);
        assert_eq!(k.kernel.len(), 1);
    }

    #[test]
    fn snf_small() {
        let s = snf(&m(&[&[2, 0], &[0, 3]]), 2);
        assert_eq!(s.diag, vec![z(1), z(6)]);
        let s = snf(&m(&[&[4, 0], &[0, 6]]), 2);
        assert_eq!(s.diag, vec![z(2), z(12)]);
    }

    fn small_matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
        (1usize..4, 1usize..4).prop_flat_map(|(r, c)| {
            proptest::collection::vec(proptest::collection::vec(-6i64..7, c), r)
        })
    }

    proptest! {
        #[test]
        fn hnf_transform_is_consistent(a in small_matrix()) {
            let rows: Mat = a.iter().map(|r| r.iter().map(|&x| z(x)).collect()).collect();
            let n = a[0].len();
            let h = hnf(&rows, n);
            let prod = mat_mul(&h.transform, &rows, rows.len(), n);
            for (i, row) in prod.iter().enumerate() {
                if i < h.basis.len() {
                    prop_assert_eq!(row, &h.basis[i]);
                } else {
                    prop_assert!(row.iter().all(Zero::is_zero));
                }
            }
            for r in &rows {
                prop_assert!(solve_in(&h, r).is_some());
            }
        }

        #[test]
        fn snf_reproduces_diagonal(a in small_matrix()) {
            let rows: Mat = a.iter().map(|r| r.iter().map(|&x| z(x)).collect()).collect();
            let n = a[0].len();
            let s = snf(&rows, n);
            let d = mat_mul(&mat_mul(&s.u, &rows, rows.len(), n), &s.v, n, n);
            for (i, row) in d.iter().enumerate() {
                for (j, x) in row.iter().enumerate() {
                    let want = if i == j && i < s.diag.len() { s.diag[i].clone() } else { Z::zero() };
                    prop_assert_eq!(x, &want);
                }
            }
            for w in s.diag.windows(2) {
                prop_assert!(w[1].is_multiple_of(&w[0]));
            }
        }

        #[test]
        fn det_matches_cofactor_oracle(a in (1usize..4).prop_flat_map(|n| proptest::collection::vec(proptest::collection::vec(-5i64..6, n), n))) {
            let rows: Mat = a.iter().map(|r| r.iter().map(|&x| z(x)).collect()).collect();
            prop_assert_eq!(abs_det(&rows), z(det_oracle(&a).abs()));
        }
    }
}
