//! Semisimple Lie algebras in a Chevalley basis, the Killing form, and
//! extraction of root subalgebras `L = H ⊕ ⊕_{α∈Ψ} L_α` with their
//! distinguished bases.
//!
//! Structure constants follow Carter's extraspecial-pair recipe: positive
//! roots are totally ordered by the canonical root order, every extraspecial
//! pair gets `N = +(p+1)`, and everything else is forced by the Jacobi
//! identity together with `N_{-r,-s} = -N_{r,s}`.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::exact::{MatQ, Rat};
use crate::rootsys::{Family, Root, RootSystem, RootSystemError};

/// Identifier of the sign convention used for `N_{α,β}`; stored in caches so
/// tables built under different conventions are never mixed.
pub const CONVENTION_ID: &str = "carter-extraspecial-v1";

pub const TOOLKIT_VERSION: &str = env!("CARGO_PKG_VERSION");

/// A sparse coordinate vector, sorted by index, without zero entries.
pub type SparseVec = Vec<(usize, Rat)>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ChevalleyError {
    #[error("Ψ is not closed: {0} + {1} = {2} is a root outside Ψ")]
    NotClosed(Root, Root, Root),
    #[error("duplicate root {0} in Ψ")]
    DuplicateRoot(Root),
    #[error(transparent)]
    RootSystem(#[from] RootSystemError),
    #[error("algebra of dimension {got} does not match root system {name} (expected {expected})")]
    DimensionMismatch {
        name: String,
        expected: usize,
        got: usize,
    },
    #[error("structure table index {0} out of range")]
    IndexOutOfRange(usize),
    #[error("structure table was built under convention {found:?}, expected {expected:?}")]
    ConventionMismatch { found: String, expected: String },
}

/// What a basis vector is: a torus element, a root vector, or an
/// unstructured generator of an algebra given by hand.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisLabel {
    Torus(usize),
    Root(Vec<i64>),
    Generic(usize),
}

impl BasisLabel {
    fn weight(&self) -> Option<&[i64]> {
        match self {
            BasisLabel::Root(r) => Some(r),
            _ => None,
        }
    }
}

/// A finite-dimensional Lie algebra over Q given by structure constants in a
/// fixed basis, with an optional invariant symmetric form.
#[derive(Clone, Debug)]
pub struct LieAlgebra {
    labels: Vec<BasisLabel>,
    /// `table[i * dim + j]` is `[b_i, b_j]`.
    table: Vec<SparseVec>,
    form: Option<MatQ>,
    /// Whether the labels define a grading respected by the bracket, which
    /// lets trace forms skip pairs of non-opposite weight.
    graded: bool,
}

impl LieAlgebra {
    /// Builds an algebra from the brackets `[b_i, b_j]` for `i < j`; the rest
    /// of the table follows by antisymmetry. Missing pairs bracket to zero.
    pub fn new<I>(labels: Vec<BasisLabel>, brackets: I) -> Result<Self, ChevalleyError>
    where
        I: IntoIterator<Item = (usize, usize, SparseVec)>,
    {
        let dim = labels.len();
        let mut table = vec![SparseVec::new(); dim * dim];
        for (i, j, v) in brackets {
            for idx in [i, j].into_iter().chain(v.iter().map(|(k, _)| *k)) {
                if idx >= dim {
                    return Err(ChevalleyError::IndexOutOfRange(idx));
                }
            }
            let v = normalize(v);
            if i == j {
                continue;
            }
            let neg: SparseVec = v.iter().map(|(k, c)| (*k, -c)).collect();
            let (a, b) = if i < j { (v, neg) } else { (neg, v) };
            let (lo, hi) = (i.min(j), i.max(j));
            table[lo * dim + hi] = a;
            table[hi * dim + lo] = b;
        }
        let mut g = LieAlgebra {
            labels,
            table,
            form: None,
            graded: false,
        };
        g.graded = g.check_grading();
        Ok(g)
    }

    pub fn with_form(mut self, form: MatQ) -> Self {
        assert_eq!(form.rows(), self.dim());
        assert_eq!(form.cols(), self.dim());
        self.form = Some(form);
        self
    }

    /// An abelian algebra of the given dimension.
    pub fn abelian(dim: usize) -> Self {
        LieAlgebra::new((0..dim).map(BasisLabel::Generic).collect(), [])
            .expect("empty bracket table is valid")
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[BasisLabel] {
        &self.labels
    }

    pub fn form(&self) -> Option<&MatQ> {
        self.form.as_ref()
    }

    pub fn is_graded(&self) -> bool {
        self.graded
    }

    /// `[b_i, b_j]` as a sparse vector.
    pub fn bracket_basis(&self, i: usize, j: usize) -> &[(usize, Rat)] {
        &self.table[i * self.dim() + j]
    }

    /// Nonzero brackets `[b_i, b_j]` with `i < j`, in index order.
    pub fn structure_entries(&self) -> impl Iterator<Item = (usize, usize, &SparseVec)> + '_ {
        let n = self.dim();
        (0..n).flat_map(move |i| {
            (i + 1..n).filter_map(move |j| {
                let v = &self.table[i * n + j];
                (!v.is_empty()).then_some((i, j, v))
            })
        })
    }

    /// Bracket of two dense coordinate vectors.
    pub fn bracket(&self, x: &[Rat], y: &[Rat]) -> Vec<Rat> {
        let n = self.dim();
        let mut out = vec![Rat::zero(); n];
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if yj.is_zero() {
                    continue;
                }
                let entry = &self.table[i * n + j];
                if entry.is_empty() {
                    continue;
                }
                let c = xi * yj;
                for (k, v) in entry {
                    out[*k] += &c * v;
                }
            }
        }
        out
    }

    /// Bracket of two sparse vectors.
    pub fn bracket_sparse(&self, x: &[(usize, Rat)], y: &[(usize, Rat)]) -> SparseVec {
        let n = self.dim();
        let mut acc: BTreeMap<usize, Rat> = BTreeMap::new();
        for (i, xi) in x {
            for (j, yj) in y {
                let entry = &self.table[i * n + j];
                if entry.is_empty() {
                    continue;
                }
                let c = xi * yj;
                for (k, v) in entry {
                    *acc.entry(*k).or_insert_with(Rat::zero) += &c * v;
                }
            }
        }
        acc.into_iter().filter(|(_, v)| !v.is_zero()).collect()
    }

    /// The matrix of `ad x`: column `j` holds `[x, b_j]`.
    pub fn ad(&self, x: &[Rat]) -> MatQ {
        let n = self.dim();
        let mut m = MatQ::zeros(n, n);
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for j in 0..n {
                for (k, v) in &self.table[i * n + j] {
                    m[(*k, j)] += xi * v;
                }
            }
        }
        m
    }

    pub fn ad_basis(&self, i: usize) -> MatQ {
        let mut e = vec![Rat::zero(); self.dim()];
        e[i] = Rat::one();
        self.ad(&e)
    }

    /// First basis triple `i < j < k` violating the Jacobi identity, if any.
    pub fn jacobi_violation(&self) -> Option<(usize, usize, usize)> {
        let n = self.dim();
        (0..n).into_par_iter().find_map_first(|i| {
            for j in i + 1..n {
                for k in j + 1..n {
                    if !self.jacobi_holds(i, j, k) {
                        return Some((i, j, k));
                    }
                }
            }
            None
        })
    }

    fn jacobi_holds(&self, i: usize, j: usize, k: usize) -> bool {
        let e = |a: usize| vec![(a, Rat::one())];
        let mut acc: BTreeMap<usize, Rat> = BTreeMap::new();
        for (a, b, c) in [(i, j, k), (j, k, i), (k, i, j)] {
            let ab = self.bracket_basis(a, b).to_vec();
            for (idx, v) in self.bracket_sparse(&ab, &e(c)) {
                *acc.entry(idx).or_insert_with(Rat::zero) += v;
            }
        }
        acc.values().all(Rat::is_zero)
    }

    /// First triple with `([b_i,b_j], b_k) ≠ (b_i, [b_j,b_k])`, if the form
    /// is present; `None` means invariant (or no form).
    pub fn invariance_violation(&self) -> Option<(usize, usize, usize)> {
        let form = self.form.as_ref()?;
        let n = self.dim();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let lhs: Rat = self
                        .bracket_basis(i, j)
                        .iter()
                        .map(|(a, v)| v * &form[(*a, k)])
                        .sum();
                    let rhs: Rat = self
                        .bracket_basis(j, k)
                        .iter()
                        .map(|(a, v)| v * &form[(i, *a)])
                        .sum();
                    if lhs != rhs {
                        return Some((i, j, k));
                    }
                }
            }
        }
        None
    }

    /// Dimension of the center, via the kernel of `x ↦ ad x`.
    pub fn center_dim(&self) -> usize {
        let n = self.dim();
        // Row (j, k): Σ_i x_i [b_i, b_j]_k = 0.
        let mut sys = crate::exact::LinearSystem::new(n);
        for j in 0..n {
            let mut rows: BTreeMap<usize, Vec<(usize, Rat)>> = BTreeMap::new();
            for i in 0..n {
                for (k, v) in self.bracket_basis(i, j) {
                    rows.entry(*k).or_default().push((i, v.clone()));
                }
            }
            for (_, r) in rows {
                sys.push_homogeneous(r);
            }
        }
        n - sys.rank()
    }

    fn check_grading(&self) -> bool {
        let n = self.dim();
        let weight = |i: usize| self.labels[i].weight();
        for i in 0..n {
            for j in 0..n {
                for (k, _) in &self.table[i * n + j] {
                    if !weights_add(weight(i), weight(j), weight(*k)) {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn weights_opposite(&self, i: usize, j: usize) -> bool {
        match (self.labels[i].weight(), self.labels[j].weight()) {
            (None, None) => true,
            (Some(a), Some(b)) => a.iter().zip(b).all(|(x, y)| x + y == 0),
            _ => false,
        }
    }
}

fn weights_add(a: Option<&[i64]>, b: Option<&[i64]>, c: Option<&[i64]>) -> bool {
    let len = [a, b, c].iter().flatten().map(|w| w.len()).next();
    let Some(len) = len else { return true };
    let get = |w: Option<&[i64]>, t: usize| w.map_or(0, |w| w[t]);
    (0..len).all(|t| get(a, t) + get(b, t) == get(c, t))
}

fn normalize(v: SparseVec) -> SparseVec {
    let mut acc: BTreeMap<usize, Rat> = BTreeMap::new();
    for (k, c) in v {
        *acc.entry(k).or_insert_with(Rat::zero) += c;
    }
    acc.into_iter().filter(|(_, c)| !c.is_zero()).collect()
}

/// The trace form `(x, y) = tr(ad x ∘ ad y)` on basis vectors. Uses the
/// grading, when there is one, to skip pairs whose weights do not cancel.
pub fn killing_form(g: &LieAlgebra) -> MatQ {
    let n = g.dim();
    let entries: Vec<(usize, usize, Rat)> = (0..n)
        .into_par_iter()
        .flat_map_iter(|i| {
            (i..n)
                .filter(move |&j| !g.graded || g.weights_opposite(i, j))
                .map(move |j| (i, j, trace_ad_ad(g, i, j)))
        })
        .collect();
    let mut m = MatQ::zeros(n, n);
    for (i, j, v) in entries {
        m[(j, i)] = v.clone();
        m[(i, j)] = v;
    }
    m
}

fn trace_ad_ad(g: &LieAlgebra, i: usize, j: usize) -> Rat {
    let mut tr = Rat::zero();
    for k in 0..g.dim() {
        for (a, v) in g.bracket_basis(j, k) {
            for (b, w) in g.bracket_basis(i, *a) {
                if *b == k {
                    tr += v * w;
                }
            }
        }
    }
    tr
}

/// The integers `N_{r,s}` with `[e_r, e_s] = N_{r,s} e_{r+s}`, indexed by
/// root positions in the canonical order.
#[derive(Clone, Debug)]
pub struct StructureConstants {
    values: HashMap<(usize, usize), i64>,
}

impl StructureConstants {
    pub fn compute(rs: &RootSystem) -> Self {
        let mut builder = CarterBuilder::new(rs);
        for r in 0..rs.len() {
            for s in 0..rs.len() {
                if rs.root_sum_index(r, s).is_some() {
                    builder.n(r, s);
                }
            }
        }
        StructureConstants {
            values: builder.memo,
        }
    }

    /// `N_{r,s}` when `r + s` is a root.
    pub fn get(&self, r: usize, s: usize) -> Option<i64> {
        self.values.get(&(r, s)).copied()
    }
}

struct CarterBuilder<'a> {
    rs: &'a RootSystem,
    /// Extraspecial pair `(α, β)` of each positive non-simple root.
    extraspecial: HashMap<usize, (usize, usize)>,
    memo: HashMap<(usize, usize), i64>,
}

impl<'a> CarterBuilder<'a> {
    fn new(rs: &'a RootSystem) -> Self {
        let positive = rs.positive_indices();
        let mut extraspecial = HashMap::new();
        for &xi in &positive {
            // Smallest α with ξ − α a positive root.
            let xi_root = rs.root(xi);
            for &a in &positive {
                let diff: Vec<i64> = xi_root
                    .coords()
                    .iter()
                    .zip(rs.root(a).coords())
                    .map(|(x, y)| x - y)
                    .collect();
                if let Some(b) = rs.index_of(&diff) {
                    if rs.root(b).is_positive() {
                        extraspecial.insert(xi, (a, b));
                        break;
                    }
                }
            }
        }
        CarterBuilder {
            rs,
            extraspecial,
            memo: HashMap::new(),
        }
    }

    fn norm(&self, r: usize) -> i64 {
        let c = self.rs.root(r).coords();
        self.rs.inner(c, c)
    }

    fn neg(&self, r: usize) -> usize {
        self.rs.negative_index(r)
    }

    fn pos(&self, r: usize) -> bool {
        self.rs.root(r).is_positive()
    }

    /// `N_{r,s}`; requires `r + s ∈ Φ`.
    fn n(&mut self, r: usize, s: usize) -> i64 {
        if let Some(&v) = self.memo.get(&(r, s)) {
            return v;
        }
        let t = self
            .rs
            .root_sum_index(r, s)
            .expect("N_{r,s} requested for a non-root sum");
        let v = match (self.pos(r), self.pos(s)) {
            (true, true) if r < s => self.special(r, s),
            (true, true) => -self.n(s, r),
            (false, false) => {
                let (nr, ns) = (self.neg(r), self.neg(s));
                -self.n(nr, ns)
            }
            _ => {
                // r + s + c = 0: rotate to the same-sign pair among {r, s, c}
                // using N_{r,s}/(c,c) = N_{s,c}/(r,r) = N_{c,r}/(s,s).
                let c = self.neg(t);
                let cc = self.norm(c);
                let same_sign_with_s = self.pos(c) == self.pos(s);
                let (num, den) = if same_sign_with_s {
                    (cc * self.n(s, c), self.norm(r))
                } else {
                    (cc * self.n(c, r), self.norm(s))
                };
                debug_assert_eq!(num % den, 0);
                num / den
            }
        };
        self.memo.insert((r, s), v);
        v
    }

    /// `N_{a,b}` for a special pair `0 ≺ a ≺ b`.
    fn special(&mut self, a: usize, b: usize) -> i64 {
        let rs = self.rs;
        let xi = rs.root_sum_index(a, b).unwrap();
        let (alpha, beta) = self.extraspecial[&xi];
        let n_ab = rs.string_below(rs.root(alpha), rs.root(beta)) + 1;
        if a == alpha {
            return n_ab;
        }
        // Four-root identity from Jacobi on (e_a, e_b, e_{-α}, e_{-β}):
        // N_{a,b}N_{-α,-β}/(ξ,ξ) + N_{b,-α}N_{a,-β}/(b-α,b-α)
        //   + N_{-α,a}N_{b,-β}/(a-α,a-α) = 0.
        let (na, nb) = (self.neg(alpha), self.neg(beta));
        let mut sum = Rat::zero();
        if let Some(ba) = rs.root_sum_index(b, na) {
            let term = self.n(b, na) * self.n(a, nb);
            sum += Rat::new(term, self.norm(ba));
        }
        if let Some(aa) = rs.root_sum_index(a, na) {
            let term = self.n(na, a) * self.n(b, nb);
            sum += Rat::new(term, self.norm(aa));
        }
        let v = Rat::from_int(self.norm(xi)) * sum / Rat::from_int(n_ab);
        v.to_i64().expect("structure constants are integral")
    }
}

/// The semisimple algebra with basis `(h_1..h_l, e_r for r ∈ Φ)`, the `e_r`
/// in canonical root order.
pub fn build_semisimple(rs: &RootSystem) -> LieAlgebra {
    let l = rs.rank();
    let consts = StructureConstants::compute(rs);
    let mut labels: Vec<BasisLabel> = (0..l).map(BasisLabel::Torus).collect();
    labels.extend(rs.roots().iter().map(|r| BasisLabel::Root(r.0.clone())));

    let mut brackets = Vec::new();
    for i in 0..l {
        for (s, root) in rs.roots().iter().enumerate() {
            let c: i64 = (0..l).map(|j| root.0[j] * rs.cartan()[i][j]).sum();
            if c != 0 {
                brackets.push((i, l + s, vec![(l + s, Rat::from_int(c))]));
            }
        }
    }
    for r in 0..rs.len() {
        for s in r + 1..rs.len() {
            let v: SparseVec = if let Some(t) = rs.root_sum_index(r, s) {
                vec![(l + t, Rat::from_int(consts.get(r, s).unwrap()))]
            } else if rs.negative_index(r) == s {
                rs.coroot_coords(&rs.root(r).0)
                    .into_iter()
                    .enumerate()
                    .filter(|(_, c)| *c != 0)
                    .map(|(i, c)| (i, Rat::from_int(c)))
                    .collect()
            } else {
                continue;
            };
            brackets.push((l + r, l + s, v));
        }
    }
    LieAlgebra::new(labels, brackets).expect("indices are in range by construction")
}

/// Serializable structure table, the on-disk cache format.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureTable {
    pub toolkit_version: String,
    pub convention: String,
    pub family: Family,
    pub rank: usize,
    pub dim: usize,
    pub labels: Vec<BasisLabel>,
    /// `(i, j, [b_i, b_j])` for `i < j`, nonzero entries only.
    pub brackets: Vec<(usize, usize, SparseVec)>,
}

impl StructureTable {
    pub fn from_algebra(rs: &RootSystem, g: &LieAlgebra) -> Self {
        StructureTable {
            toolkit_version: TOOLKIT_VERSION.to_string(),
            convention: CONVENTION_ID.to_string(),
            family: rs.family(),
            rank: rs.rank(),
            dim: g.dim(),
            labels: g.labels().to_vec(),
            brackets: g
                .structure_entries()
                .map(|(i, j, v)| (i, j, v.clone()))
                .collect(),
        }
    }

    pub fn to_algebra(&self) -> Result<LieAlgebra, ChevalleyError> {
        if self.convention != CONVENTION_ID {
            return Err(ChevalleyError::ConventionMismatch {
                found: self.convention.clone(),
                expected: CONVENTION_ID.to_string(),
            });
        }
        if self.labels.len() != self.dim {
            return Err(ChevalleyError::IndexOutOfRange(self.labels.len()));
        }
        LieAlgebra::new(self.labels.clone(), self.brackets.iter().cloned())
    }
}

/// A subset Ψ of Φ, stored as sorted root positions.
#[derive(Clone, Debug)]
pub struct SubalgebraSpec {
    system: Arc<RootSystem>,
    psi: Vec<usize>,
}

impl PartialEq for SubalgebraSpec {
    fn eq(&self, other: &Self) -> bool {
        self.system.family() == other.system.family()
            && self.system.rank() == other.system.rank()
            && self.psi == other.psi
    }
}

impl Eq for SubalgebraSpec {}

impl SubalgebraSpec {
    pub fn from_indices(system: Arc<RootSystem>, mut psi: Vec<usize>) -> Result<Self, ChevalleyError> {
        psi.sort_unstable();
        for w in psi.windows(2) {
            if w[0] == w[1] {
                return Err(ChevalleyError::DuplicateRoot(system.root(w[0]).clone()));
            }
        }
        if let Some(&bad) = psi.iter().find(|&&i| i >= system.len()) {
            return Err(ChevalleyError::IndexOutOfRange(bad));
        }
        Ok(SubalgebraSpec { system, psi })
    }

    pub fn from_coords(system: Arc<RootSystem>, coords: &[Vec<i64>]) -> Result<Self, ChevalleyError> {
        let idx = coords
            .iter()
            .map(|c| system.lookup(c))
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_indices(system, idx)
    }

    pub fn system(&self) -> &Arc<RootSystem> {
        &self.system
    }

    /// Root positions in canonical order.
    pub fn indices(&self) -> &[usize] {
        &self.psi
    }

    pub fn roots(&self) -> Vec<&Root> {
        self.psi.iter().map(|&i| self.system.root(i)).collect()
    }

    pub fn coords(&self) -> Vec<Vec<i64>> {
        self.roots().into_iter().map(|r| r.0.clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.psi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.psi.is_empty()
    }

    pub fn contains(&self, root_index: usize) -> bool {
        self.psi.binary_search(&root_index).is_ok()
    }

    /// A triple `(α, β, α+β)` with `α, β ∈ Ψ` and `α+β ∈ Φ \ Ψ`, if any.
    pub fn closure_violation(&self) -> Option<(usize, usize, usize)> {
        for (n, &a) in self.psi.iter().enumerate() {
            for &b in &self.psi[n..] {
                if let Some(s) = self.system.root_sum_index(a, b) {
                    if !self.contains(s) {
                        return Some((a, b, s));
                    }
                }
            }
        }
        None
    }

    /// `-Ψ`.
    pub fn negated(&self) -> Self {
        let psi = self.psi.iter().map(|&i| self.system.negative_index(i)).collect();
        Self::from_indices(self.system.clone(), psi).expect("negation is a bijection on Φ")
    }
}

/// The distinguished basis of `L = H ⊕ ⊕_{β∈Ψ} L_β` and its dual data.
#[derive(Clone, Debug, Serialize)]
pub struct DistinguishedBasis {
    /// The roots `β_1..β_m` in canonical order.
    pub roots: Vec<Vec<i64>>,
    /// Whether the torus basis is dual to Ψ (`β_i(h_j) = δ_ij`).
    pub dual_to_psi: bool,
    /// `h_1..h_l` in ambient coordinates.
    pub torus_basis: Vec<Vec<Rat>>,
    /// `x_1..x_m` in ambient coordinates.
    pub root_vectors: Vec<Vec<Rat>>,
    /// `h_1'..h_l'` in the subalgebra's coordinates, `(h_i, h_j') = δ_ij`.
    pub dual_torus: Vec<Vec<Rat>>,
    /// `root_values[(i, k)] = β_i(h_k)`.
    pub root_values: MatQ,
    /// `(h_i, h_j)` under the restricted Killing form.
    pub torus_gram: MatQ,
    /// `(β_i, β_j) = (t_{β_i}, t_{β_j})`.
    pub gram: MatQ,
}

impl DistinguishedBasis {
    pub fn rank(&self) -> usize {
        self.torus_basis.len()
    }

    pub fn num_roots(&self) -> usize {
        self.roots.len()
    }

    /// `β_i(h)` for `h` given by its coefficients over `h_1..h_l`.
    pub fn root_value(&self, i: usize, h: &[Rat]) -> Rat {
        (0..self.rank()).map(|k| &self.root_values[(i, k)] * &h[k]).sum()
    }
}

/// Extracts `L = H ⊕ ⊕_{β∈Ψ} L_β` from the ambient semisimple algebra.
///
/// The returned basis is `(h_1..h_l, x_1..x_m)`. When `|Ψ| = l` and Ψ is a
/// basis of `H*`, the `h_k` are dual to Ψ, so `[h_k, x_i] = δ_ki x_i`;
/// otherwise they are the simple coroots.
pub fn extract_subalgebra(
    g: &LieAlgebra,
    spec: &SubalgebraSpec,
) -> Result<(LieAlgebra, DistinguishedBasis), ChevalleyError> {
    let rs = spec.system();
    let l = rs.rank();
    let n_amb = l + rs.len();
    if g.dim() != n_amb {
        return Err(ChevalleyError::DimensionMismatch {
            name: rs.name(),
            expected: n_amb,
            got: g.dim(),
        });
    }
    if let Some((a, b, s)) = spec.closure_violation() {
        return Err(ChevalleyError::NotClosed(
            rs.root(a).clone(),
            rs.root(b).clone(),
            rs.root(s).clone(),
        ));
    }
    let m = spec.len();
    let psi = spec.indices();

    // coroot_values[(i, j)] = β_i(α_j^∨)
    let coroot_values = MatQ::from_rows(
        psi.iter()
            .map(|&p| {
                let r = &rs.root(p).0;
                (0..l)
                    .map(|j| Rat::from_int((0..l).map(|s| r[s] * rs.cartan()[j][s]).sum::<i64>()))
                    .collect()
            })
            .collect(),
    );
    // torus_coeffs[k] = coefficients of h_k over the simple coroots.
    let inverse = (m == l).then(|| coroot_values.inverse()).flatten();
    let dual_to_psi = inverse.is_some();
    let torus_coeffs: Vec<Vec<Rat>> = match &inverse {
        Some(inv) => (0..l).map(|k| inv.column(k)).collect(),
        None => (0..l)
            .map(|k| {
                let mut v = vec![Rat::zero(); l];
                v[k] = Rat::one();
                v
            })
            .collect(),
    };

    let mut embed: Vec<Vec<Rat>> = torus_coeffs
        .iter()
        .map(|c| {
            let mut v = vec![Rat::zero(); n_amb];
            v[..l].clone_from_slice(c);
            v
        })
        .collect();
    for &p in psi {
        let mut v = vec![Rat::zero(); n_amb];
        v[l + p] = Rat::one();
        embed.push(v);
    }

    let torus_change = MatQ::from_columns(l, &torus_coeffs);
    let root_values = coroot_values.mul(&torus_change);

    // Subalgebra brackets. Torus brackets vanish; [h_k, x_i] = β_i(h_k) x_i;
    // [x_i, x_j] is a root vector in Ψ or, for β_j = -β_i, a coroot.
    let local_root: HashMap<usize, usize> =
        psi.iter().enumerate().map(|(i, &p)| (p, l + i)).collect();
    let mut brackets = Vec::new();
    for k in 0..l {
        for i in 0..m {
            let v = root_values[(i, k)].clone();
            if !v.is_zero() {
                brackets.push((k, l + i, vec![(l + i, v)]));
            }
        }
    }
    for i in 0..m {
        for j in i + 1..m {
            let amb = g.bracket_basis(l + psi[i], l + psi[j]);
            if amb.is_empty() {
                continue;
            }
            let mut local = SparseVec::new();
            let mut torus_part = vec![Rat::zero(); l];
            for (idx, c) in amb {
                if *idx < l {
                    torus_part[*idx] = c.clone();
                } else {
                    local.push((local_root[&(idx - l)], c.clone()));
                }
            }
            if torus_part.iter().any(|c| !c.is_zero()) {
                let coeffs = torus_change
                    .solve(&torus_part)
                    .expect("torus basis spans H");
                for (k, c) in coeffs.into_iter().enumerate() {
                    if !c.is_zero() {
                        local.push((k, c));
                    }
                }
            }
            brackets.push((l + i, l + j, local));
        }
    }
    let mut labels: Vec<BasisLabel> = (0..l).map(BasisLabel::Torus).collect();
    labels.extend(psi.iter().map(|&p| BasisLabel::Root(rs.root(p).0.clone())));

    let kill = killing_form(g);
    let e = MatQ::from_columns(n_amb, &embed);
    let form = e.transpose().mul(&kill).mul(&e);
    let sub = LieAlgebra::new(labels, brackets)?.with_form(form.clone());

    let torus_gram = form.submatrix(&(0..l).collect::<Vec<_>>(), &(0..l).collect::<Vec<_>>());
    let torus_inv = torus_gram
        .inverse()
        .expect("the Killing form is nondegenerate on H");
    let dual_torus = (0..l)
        .map(|j| {
            let mut v = vec![Rat::zero(); l + m];
            for k in 0..l {
                v[k] = torus_inv[(k, j)].clone();
            }
            v
        })
        .collect();
    let gram = root_values.mul(&torus_inv).mul(&root_values.transpose());

    let basis = DistinguishedBasis {
        roots: spec.coords(),
        dual_to_psi,
        torus_basis: embed[..l].to_vec(),
        root_vectors: embed[l..].to_vec(),
        dual_torus,
        root_values,
        torus_gram,
        gram,
    };
    Ok((sub, basis))
}
