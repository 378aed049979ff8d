//! Incremental sparse elimination for the large, very sparse systems that
//! come out of Leibniz and centroid conditions and witness searches.
//!
//! Rows are pushed one at a time and reduced against a pivot set kept in
//! reduced row-echelon form, so the final kernel and particular solution
//! coincide with what [`MatQ::rref`](super::MatQ::rref) would give on the
//! stacked system.

use std::collections::BTreeMap;

use super::rat::Rat;

/// A sparse row: column index to nonzero coefficient.
pub type SparseRow = BTreeMap<usize, Rat>;

#[derive(Clone, Debug)]
struct PivotRow {
    coeffs: SparseRow,
    rhs: Rat,
}

/// Accumulates linear equations `row · x = rhs` over `ncols` unknowns.
#[derive(Clone, Debug)]
pub struct LinearSystem {
    ncols: usize,
    pivots: BTreeMap<usize, PivotRow>,
    inconsistent: bool,
}

impl LinearSystem {
    pub fn new(ncols: usize) -> Self {
        LinearSystem {
            ncols,
            pivots: BTreeMap::new(),
            inconsistent: false,
        }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn is_consistent(&self) -> bool {
        !self.inconsistent
    }

    pub fn pivot_columns(&self) -> Vec<usize> {
        self.pivots.keys().copied().collect()
    }

    /// Adds a homogeneous equation. Returns `true` if it raised the rank.
    pub fn push_homogeneous<I>(&mut self, terms: I) -> bool
    where
        I: IntoIterator<Item = (usize, Rat)>,
    {
        self.push(terms, Rat::zero())
    }

    /// Adds `Σ coeff·x[col] = rhs`. Duplicate columns are summed. Returns
    /// `true` if the equation raised the rank.
    pub fn push<I>(&mut self, terms: I, rhs: Rat) -> bool
    where
        I: IntoIterator<Item = (usize, Rat)>,
    {
        let mut row = SparseRow::new();
        for (c, v) in terms {
            assert!(c < self.ncols, "column {c} out of range");
            if v.is_zero() {
                continue;
            }
            let e = row.entry(c).or_insert_with(Rat::zero);
            *e += v;
            if e.is_zero() {
                row.remove(&c);
            }
        }
        self.push_row(row, rhs)
    }

    fn push_row(&mut self, mut row: SparseRow, mut rhs: Rat) -> bool {
        let hits: Vec<(usize, Rat)> = row
            .iter()
            .filter(|(c, _)| self.pivots.contains_key(c))
            .map(|(c, v)| (*c, v.clone()))
            .collect();
        for (c, factor) in hits {
            let p = &self.pivots[&c];
            axpy(&mut row, &-&factor, &p.coeffs);
            rhs -= &factor * &p.rhs;
        }
        let Some((&lead, lead_val)) = row.iter().next() else {
            if !rhs.is_zero() {
                self.inconsistent = true;
            }
            return false;
        };
        let inv = lead_val.recip();
        for v in row.values_mut() {
            *v *= &inv;
        }
        rhs *= &inv;
        for p in self.pivots.values_mut() {
            if let Some(f) = p.coeffs.get(&lead).cloned() {
                axpy(&mut p.coeffs, &-&f, &row);
                p.rhs -= &f * &rhs;
            }
        }
        self.pivots.insert(lead, PivotRow { coeffs: row, rhs });
        true
    }

    /// Null-space basis of the homogeneous part, one vector per free column
    /// in increasing order.
    pub fn kernel_basis(&self) -> Vec<Vec<Rat>> {
        (0..self.ncols)
            .filter(|c| !self.pivots.contains_key(c))
            .map(|f| {
                let mut v = vec![Rat::zero(); self.ncols];
                v[f] = Rat::one();
                for (&p, row) in &self.pivots {
                    if let Some(x) = row.coeffs.get(&f) {
                        v[p] = -x;
                    }
                }
                v
            })
            .collect()
    }

    /// The solution with all free variables zero, or `None` if inconsistent.
    pub fn particular_solution(&self) -> Option<Vec<Rat>> {
        if self.inconsistent {
            return None;
        }
        let mut x = vec![Rat::zero(); self.ncols];
        for (&p, row) in &self.pivots {
            x[p] = row.rhs.clone();
        }
        Some(x)
    }

    /// Whether `terms` is a linear combination of the rows pushed so far
    /// (ignoring right-hand sides).
    pub fn row_space_contains<I>(&self, terms: I) -> bool
    where
        I: IntoIterator<Item = (usize, Rat)>,
    {
        let mut probe = LinearSystem {
            ncols: self.ncols,
            pivots: self.pivots.clone(),
            inconsistent: false,
        };
        !probe.push_homogeneous(terms)
    }
}

/// `dst += factor * src`, dropping entries that cancel.
fn axpy(dst: &mut SparseRow, factor: &Rat, src: &SparseRow) {
    for (c, v) in src {
        let e = dst.entry(*c).or_insert_with(Rat::zero);
        *e += factor * v;
        if e.is_zero() {
            dst.remove(c);
        }
    }
}

/// Tracks the span of a growing family of dense vectors; used to pick
/// maximal independent subsets greedily in a fixed order.
#[derive(Clone, Debug)]
pub struct SpanTracker {
    system: LinearSystem,
}

impl SpanTracker {
    pub fn new(dim: usize) -> Self {
        SpanTracker {
            system: LinearSystem::new(dim),
        }
    }

    /// Adds `v` if it is independent of the vectors added so far.
    pub fn insert(&mut self, v: &[Rat]) -> bool {
        self.system.push_homogeneous(
            v.iter()
                .enumerate()
                .filter(|(_, x)| !x.is_zero())
                .map(|(i, x)| (i, x.clone())),
        )
    }

    pub fn contains(&self, v: &[Rat]) -> bool {
        self.system.row_space_contains(
            v.iter()
                .enumerate()
                .filter(|(_, x)| !x.is_zero())
                .map(|(i, x)| (i, x.clone())),
        )
    }

    pub fn dim(&self) -> usize {
        self.system.rank()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat::{rat, ratio};
    use crate::exact::MatQ;

    #[test]
    fn matches_dense_rref() {
        let m = MatQ::from_rows(vec![
            vec![rat(1), rat(2), rat(0), rat(3)],
            vec![rat(2), rat(4), rat(1), rat(1)],
            vec![rat(3), rat(6), rat(1), rat(4)],
        ]);
        let mut sys = LinearSystem::new(4);
        for i in 0..3 {
            sys.push_homogeneous(m.row(i).iter().cloned().enumerate());
        }
        assert_eq!(sys.rank(), m.rank());
        assert_eq!(sys.kernel_basis(), m.kernel_basis());
    }

    #[test]
    fn particular_solution_zeroes_free_variables() {
        let mut sys = LinearSystem::new(3);
        sys.push([(0, rat(1)), (2, rat(1))], rat(2));
        sys.push([(1, rat(2))], rat(1));
        assert_eq!(
            sys.particular_solution(),
            Some(vec![rat(2), ratio(1, 2), rat(0)])
        );
        sys.push([(0, rat(1)), (2, rat(1))], rat(3));
        assert!(!sys.is_consistent());
        assert_eq!(sys.particular_solution(), None);
    }

    #[test]
    fn span_tracker() {
        let mut t = SpanTracker::new(3);
        assert!(t.insert(&[rat(1), rat(0), rat(1)]));
        assert!(!t.insert(&[rat(2), rat(0), rat(2)]));
        assert!(t.contains(&[rat(-1), rat(0), rat(-1)]));
        assert!(!t.contains(&[rat(0), rat(1), rat(0)]));
        assert_eq!(t.dim(), 1);
    }
}
