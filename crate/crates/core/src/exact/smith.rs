//! Smith normal form over the integers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::matrix::MatZ;

/// `u · a · v = d` with `u`, `v` unimodular and `d` diagonal, nonnegative,
/// each diagonal entry dividing the next.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithForm {
    pub u: MatZ,
    pub d: MatZ,
    pub v: MatZ,
}

impl SmithForm {
    /// Nonzero diagonal entries of `d`.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        self.d
            .diagonal()
            .into_iter()
            .filter(|x| !x.is_zero())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors().len()
    }
}

pub fn smith_normal_form(a: &MatZ) -> SmithForm {
    let (m, n) = (a.rows(), a.cols());
    let mut d = a.clone();
    let mut u = MatZ::identity(m);
    let mut v = MatZ::identity(n);

    for t in 0..m.min(n) {
        let Some((pi, pj)) = min_abs_entry(&d, t..m, t..n) else {
            break;
        };
        d.swap_rows(t, pi);
        u.swap_rows(t, pi);
        d.swap_cols(t, pj);
        v.swap_cols(t, pj);

        loop {
            // Clear column t below the pivot and row t right of it; any
            // remainder is smaller than the pivot and gets swapped in.
            let mut dirty = false;
            for i in t + 1..m {
                if d[(i, t)].is_zero() {
                    continue;
                }
                let q = d[(i, t)].div_floor(&d[(t, t)]);
                d.add_row_multiple(i, t, &-&q);
                u.add_row_multiple(i, t, &-&q);
                dirty |= !d[(i, t)].is_zero();
            }
            for j in t + 1..n {
                if d[(t, j)].is_zero() {
                    continue;
                }
                let q = d[(t, j)].div_floor(&d[(t, t)]);
                d.add_col_multiple(j, t, &-&q);
                v.add_col_multiple(j, t, &-&q);
                dirty |= !d[(t, j)].is_zero();
            }
            if dirty {
                let (i, j) = (t..m)
                    .map(|i| (i, t))
                    .chain((t + 1..n).map(|j| (t, j)))
                    .filter(|&(i, j)| !d[(i, j)].is_zero())
                    .min_by(|&a, &b| d[a].abs().cmp(&d[b].abs()))
                    .expect("a nonzero entry remains");
                if i != t {
                    d.swap_rows(t, i);
                    u.swap_rows(t, i);
                }
                if j != t {
                    d.swap_cols(t, j);
                    v.swap_cols(t, j);
                }
                continue;
            }
            // Divisibility: fold a row with a non-multiple into row t.
            let offender = (t + 1..m).find(|&i| {
                (t + 1..n).any(|j| !d[(i, j)].is_multiple_of(&d[(t, t)]))
            });
            match offender {
                Some(i) => {
                    d.add_row_multiple(t, i, &BigInt::one());
                    u.add_row_multiple(t, i, &BigInt::one());
                }
                None => break,
            }
        }
        if d[(t, t)].is_negative() {
            d.negate_row(t);
            u.negate_row(t);
        }
    }
    SmithForm { u, d, v }
}

fn min_abs_entry(
    d: &MatZ,
    rows: std::ops::Range<usize>,
    cols: std::ops::Range<usize>,
) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in rows {
        for j in cols.clone() {
            if d[(i, j)].is_zero() {
                continue;
            }
            if best.map_or(true, |b| d[(i, j)].abs() < d[b].abs()) {
                best = Some((i, j));
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(a: &MatZ) -> SmithForm {
        let s = smith_normal_form(a);
        assert_eq!(s.u.mul(a).mul(&s.v), s.d);
        assert!(s.d.is_diagonal());
        assert_eq!(s.u.determinant().abs(), BigInt::one());
        assert_eq!(s.v.determinant().abs(), BigInt::one());
        let diag = s.d.diagonal();
        for w in diag.windows(2) {
            assert!(!w[0].is_negative());
            if w[0].is_zero() {
                assert!(w[1].is_zero());
            } else {
                assert!(w[1].is_multiple_of(&w[0]));
            }
        }
        s
    }

    #[test]
    fn unimodular_input() {
        let s = check(&MatZ::from_i64_rows(&[vec![1, 0], vec![2, 1]]));
        assert_eq!(s.d, MatZ::identity(2));
    }

    #[test]
    fn already_diagonal() {
        let a = MatZ::from_i64_rows(&[vec![2, 0], vec![0, 4]]);
        assert_eq!(check(&a).d, a);
    }

    #[test]
    fn single_row_gcd() {
        let s = check(&MatZ::from_i64_rows(&[vec![2, 4, 4]]));
        assert_eq!(s.d, MatZ::from_i64_rows(&[vec![2, 0, 0]]));
    }

    #[test]
    fn divisibility_is_enforced() {
        let s = check(&MatZ::from_i64_rows(&[vec![2, 0], vec![0, 3]]));
        assert_eq!(s.invariant_factors(), vec![BigInt::from(1), BigInt::from(6)]);
    }

    #[test]
    fn zero_matrix() {
        let s = check(&MatZ::zeros(2, 3));
        assert_eq!(s.rank(), 0);
    }
}
