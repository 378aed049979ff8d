//! Q-graded subalgebras: closure, lattice spanning, minimality, exhaustive
//! enumeration of the minimal ones, and the metabelian check.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chevalley::{extract_subalgebra, ChevalleyError, LieAlgebra};
pub use crate::chevalley::SubalgebraSpec;
use crate::exact::{smith_normal_form, MatZ, Rat, SpanTracker};
use crate::rootsys::{Family, RootSystem};

/// Default bound on `2^|Φ|` for exhaustive enumeration.
pub const DEFAULT_CAP: u64 = 1 << 24;

/// Largest `|Ψ|` for which exhaustive minimality search is attempted.
pub const MAX_MINIMALITY_SIZE: usize = 30;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QGradedError {
    #[error("Ψ is not closed under root addition: {0:?} + {1:?} = {2:?}")]
    NotClosed(Vec<i64>, Vec<i64>, Vec<i64>),
    #[error("Ψ does not span the root lattice over Z")]
    NotSpanning,
    #[error("2^{size} subsets exceed the enumeration cap {cap}; certify individual subsets instead")]
    CapExceeded { size: usize, cap: u64 },
    #[error("|Ψ| = {0} is too large for exhaustive minimality search (limit {MAX_MINIMALITY_SIZE})")]
    TooLarge(usize),
    #[error(transparent)]
    Chevalley(#[from] ChevalleyError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosureVerdict {
    pub closed: bool,
    /// `(α, β, α+β)` with `α+β ∈ Φ \ Ψ`.
    pub violation: Option<[Vec<i64>; 3]>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpanVerdict {
    pub spans: bool,
    pub rank: usize,
    pub invariant_factors: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinimalityVerdict {
    pub minimal: bool,
    /// Whether the exhaustive search ran (it requires closed and spanning).
    pub checked: bool,
    /// A proper closed spanning subset, smallest first in canonical order.
    pub counterexample: Option<Vec<Vec<i64>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetabelianVerdict {
    /// `[L,L]` is exactly the root part `⊕_{α∈Ψ} L_α`.
    pub derived_is_root_part: bool,
    pub abelian: bool,
    /// `(α, β)` with `[x_α, x_β] ≠ 0`.
    pub violation: Option<(Vec<i64>, Vec<i64>)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dims {
    pub torus: usize,
    pub derived: usize,
    pub total: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QGradedCertificate {
    pub family: Family,
    pub rank: usize,
    pub psi: Vec<Vec<i64>>,
    pub closed: ClosureVerdict,
    pub spans_q: SpanVerdict,
    pub minimal: MinimalityVerdict,
    pub metabelian: Option<MetabelianVerdict>,
    pub dims: Option<Dims>,
}

impl QGradedCertificate {
    /// Closed, spanning, minimal and metabelian.
    pub fn all_positive(&self) -> bool {
        self.closed.closed
            && self.spans_q.spans
            && self.minimal.minimal
            && self.metabelian.as_ref().is_some_and(|m| m.abelian && m.derived_is_root_part)
    }
}

pub fn is_closed(spec: &SubalgebraSpec) -> ClosureVerdict {
    let rs = spec.system();
    match spec.closure_violation() {
        None => ClosureVerdict {
            closed: true,
            violation: None,
        },
        Some((a, b, s)) => ClosureVerdict {
            closed: false,
            violation: Some([rs.root(a).0.clone(), rs.root(b).0.clone(), rs.root(s).0.clone()]),
        },
    }
}

/// Decides `span_Z Ψ = Q` from the Smith form of the `l × |Ψ|` coordinate
/// matrix: it spans iff there are `l` invariant factors, all equal to 1.
pub fn spans_q(spec: &SubalgebraSpec) -> SpanVerdict {
    let l = spec.system().rank();
    let coords = spec.coords();
    let rows: Vec<Vec<i64>> = (0..l).map(|i| coords.iter().map(|c| c[i]).collect()).collect();
    let m = if coords.is_empty() {
        MatZ::zeros(l, 0)
    } else {
        MatZ::from_i64_rows(&rows)
    };
    let snf = smith_normal_form(&m);
    let factors = snf.invariant_factors();
    let spans = factors.len() == l && factors.iter().all(|f| f == &1.into());
    SpanVerdict {
        spans,
        rank: factors.len(),
        invariant_factors: factors.iter().map(ToString::to_string).collect(),
    }
}

/// Fast lattice test: row-reduce over Z by Euclid steps; the lattice is all
/// of `Z^l` iff the echelon form has `l` pivots, all `±1`.
fn spans_lattice<'a>(vectors: impl Iterator<Item = &'a [i64]>, l: usize) -> bool {
    let mut rows: Vec<Vec<i64>> = vectors.map(<[i64]>::to_vec).collect();
    let mut top = 0;
    for c in 0..l {
        loop {
            let mut nz: Vec<usize> = (top..rows.len()).filter(|&r| rows[r][c] != 0).collect();
            if nz.is_empty() {
                return false;
            }
            nz.sort_by_key(|&r| rows[r][c].abs());
            let p = nz[0];
            if nz.len() == 1 {
                rows.swap(top, p);
                break;
            }
            for &r in &nz[1..] {
                let q = rows[r][c] / rows[p][c];
                let (pr, rr) = if p < r {
                    let (a, b) = rows.split_at_mut(r);
                    (&a[p], &mut b[0])
                } else {
                    let (a, b) = rows.split_at_mut(p);
                    (&b[0], &mut a[r])
                };
                for (x, y) in rr.iter_mut().zip(pr) {
                    *x -= q * y;
                }
            }
        }
        if rows[top][c].abs() != 1 {
            return false;
        }
        top += 1;
    }
    true
}

/// Exhaustive minimality: a closed spanning Ψ is minimal iff no proper subset
/// is closed and spanning. Subsets are searched by increasing size, then in
/// lexicographic order of canonical positions, so the counterexample is
/// deterministic.
pub fn is_minimal(spec: &SubalgebraSpec) -> Result<MinimalityVerdict, QGradedError> {
    let rs = spec.system();
    if let Some((a, b, s)) = spec.closure_violation() {
        return Err(QGradedError::NotClosed(
            rs.root(a).0.clone(),
            rs.root(b).0.clone(),
            rs.root(s).0.clone(),
        ));
    }
    if !spans_q(spec).spans {
        return Err(QGradedError::NotSpanning);
    }
    let n = spec.len();
    if n > MAX_MINIMALITY_SIZE {
        return Err(QGradedError::TooLarge(n));
    }
    let universe = Universe::new(rs, spec.indices());
    let l = rs.rank();
    for k in l..n {
        let mut combo: Vec<usize> = (0..k).collect();
        loop {
            let mask = combo.iter().fold(0u64, |m, &i| m | 1 << i);
            if universe.is_good(mask) {
                let sub: Vec<Vec<i64>> = combo
                    .iter()
                    .map(|&i| rs.root(universe.members[i]).0.clone())
                    .collect();
                return Ok(MinimalityVerdict {
                    minimal: false,
                    checked: true,
                    counterexample: Some(sub),
                });
            }
            if !next_combination(&mut combo, n) {
                break;
            }
        }
    }
    Ok(MinimalityVerdict {
        minimal: true,
        checked: true,
        counterexample: None,
    })
}

fn next_combination(combo: &mut [usize], n: usize) -> bool {
    let k = combo.len();
    for i in (0..k).rev() {
        if combo[i] < n - k + i {
            combo[i] += 1;
            for j in i + 1..k {
                combo[j] = combo[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Roots indexed by bit position, with the root-sum relations among them.
struct Universe<'a> {
    rs: &'a RootSystem,
    members: Vec<usize>,
    /// For each bit `i`: pairs `(j, sum)` with `members[i] + members[j] ∈ Φ`;
    /// `sum` is the bit of the sum, or `None` if it lies outside the universe.
    sums: Vec<Vec<(usize, Option<usize>)>>,
}

impl<'a> Universe<'a> {
    fn new(rs: &'a RootSystem, members: &[usize]) -> Self {
        let pos = |root: usize| members.iter().position(|&m| m == root);
        let sums = members
            .iter()
            .map(|&a| {
                members
                    .iter()
                    .enumerate()
                    .filter_map(|(j, &b)| rs.root_sum_index(a, b).map(|s| (j, pos(s))))
                    .collect()
            })
            .collect();
        Universe {
            rs,
            members: members.to_vec(),
            sums,
        }
    }

    fn is_closed(&self, mask: u64) -> bool {
        let mut rest = mask;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            for &(j, s) in &self.sums[i] {
                if mask >> j & 1 == 1 && s.map_or(true, |s| mask >> s & 1 == 0) {
                    return false;
                }
            }
        }
        true
    }

    fn is_good(&self, mask: u64) -> bool {
        let l = self.rs.rank();
        if (mask.count_ones() as usize) < l || !self.is_closed(mask) {
            return false;
        }
        let coords = (0..self.members.len())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| self.rs.root(self.members[i]).coords());
        spans_lattice(coords, l)
    }
}

/// All minimal Q-graded Ψ ⊆ Φ, sorted by size and then canonical positions.
pub fn enumerate_minimal(
    rs: &Arc<RootSystem>,
    cap: u64,
) -> Result<Vec<SubalgebraSpec>, QGradedError> {
    let n = rs.len();
    if n >= 64 || (1u64 << n) > cap {
        return Err(QGradedError::CapExceeded { size: n, cap });
    }
    let all: Vec<usize> = (0..n).collect();
    let universe = Universe::new(rs, &all);
    let total = 1usize << n;

    // good[mask]: closed and spanning. Indexed output keeps the result
    // independent of scheduling.
    let good: Vec<bool> = (0..total)
        .into_par_iter()
        .with_min_len(1 << 10)
        .map(|m| universe.is_good(m as u64))
        .collect();

    // below[mask]: some subset of mask (possibly mask itself) is good.
    let mut below = good.clone();
    for bit in 0..n {
        let b = 1usize << bit;
        for m in 0..total {
            if m & b != 0 && below[m ^ b] {
                below[m] = true;
            }
        }
    }

    let mut out: Vec<Vec<usize>> = (0..total)
        .into_par_iter()
        .with_min_len(1 << 10)
        .filter(|&m| good[m] && (0..n).all(|i| m >> i & 1 == 0 || !below[m ^ (1 << i)]))
        .map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect())
        .collect();
    out.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
    out.into_iter()
        .map(|psi| SubalgebraSpec::from_indices(rs.clone(), psi).map_err(Into::into))
        .collect()
}

/// Checks `[L,L] = ⊕_{α∈Ψ} L_α` and `[x_α, x_β] = 0` for all `α, β ∈ Ψ`.
pub fn verify_metabelian(
    g: &LieAlgebra,
    spec: &SubalgebraSpec,
) -> Result<(MetabelianVerdict, Dims), QGradedError> {
    if !spans_q(spec).spans {
        return Err(QGradedError::NotSpanning);
    }
    let (sub, _) = extract_subalgebra(g, spec)?;
    let l = spec.system().rank();
    let m = spec.len();
    let dim = sub.dim();

    let mut derived = SpanTracker::new(dim);
    for i in 0..dim {
        for j in i + 1..dim {
            let v = sub.bracket_basis(i, j);
            if !v.is_empty() {
                let mut dense = vec![Rat::zero(); dim];
                for (k, c) in v {
                    dense[*k] = c.clone();
                }
                derived.insert(&dense);
            }
        }
    }
    let root_part_inside = (0..m).all(|i| {
        let mut e = vec![Rat::zero(); dim];
        e[l + i] = Rat::one();
        derived.contains(&e)
    });
    let derived_is_root_part = root_part_inside && derived.dim() == m;

    let coords = spec.coords();
    let mut violation = None;
    'outer: for i in 0..m {
        for j in i + 1..m {
            if !sub.bracket_basis(l + i, l + j).is_empty() {
                violation = Some((coords[i].clone(), coords[j].clone()));
                break 'outer;
            }
        }
    }
    let dims = Dims {
        torus: l,
        derived: derived.dim(),
        total: dim,
    };
    Ok((
        MetabelianVerdict {
            derived_is_root_part,
            abelian: violation.is_none(),
            violation,
        },
        dims,
    ))
}

/// Runs every check that applies and records the outcomes.
pub fn certify(g: &LieAlgebra, spec: &SubalgebraSpec) -> Result<QGradedCertificate, QGradedError> {
    let rs = spec.system();
    let closed = is_closed(spec);
    let span = spans_q(spec);
    let minimal = if closed.closed && span.spans {
        is_minimal(spec)?
    } else {
        MinimalityVerdict {
            minimal: false,
            checked: false,
            counterexample: None,
        }
    };
    let (metabelian, dims) = if closed.closed && span.spans {
        let (v, d) = verify_metabelian(g, spec)?;
        (Some(v), Some(d))
    } else {
        (None, None)
    };
    Ok(QGradedCertificate {
        family: rs.family(),
        rank: rs.rank(),
        psi: spec.coords(),
        closed,
        spans_q: span,
        minimal,
        metabelian,
        dims,
    })
}
