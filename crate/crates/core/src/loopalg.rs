//! Loop algebras `L ⊗ F[t, t⁻¹]` and affinizations `L̃ = L ⊗ S ⊕ F·K` of a
//! root subalgebra, with finitely supported elements and a closed family of
//! operators on them.
//!
//! The affine bracket is
//! `[x⊗t^m, y⊗t^n] = [x,y]⊗t^{m+n} + m·(x,y)·δ_{m+n,0}·K`,
//! where `(,)` is the ambient Killing form restricted to `L`. In the loop
//! algebra the central term is dropped.
//!
//! Operators are never compared in the abstract. Every claim about one is
//! checked on a generating probe family (`h_i⊗t^j`, `x_p⊗t^j`, `K`) and on
//! seeded random elements.
//!
//! Witness searches solve `D(X) = [X, Y]` for `Y` with support in a finite
//! degree window. Two exact certificates decide non-membership regardless
//! of the window:
//! * the target has a torus component, but `[L, L]` has none;
//! * the target has a `K` coefficient, but every nonzero-degree component of
//!   `X` is orthogonal to `L`, so no bracket `[X, Y]` has one.

use std::collections::BTreeMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::chevalley::{DistinguishedBasis, LieAlgebra};
use crate::dercalc::{aid_membership, leibniz_violation, AidVerdict, DerCalcError};
use crate::exact::{dot, is_zero_vec, zero_vec, LinearSystem, MatQ, Rat};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LoopError {
    #[error("coordinate vector of length {got} does not match dim L = {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("the algebra has no invariant form; affinization needs one")]
    MissingForm,
    #[error("j = 0 has no witness of this shape; use the obstruction check")]
    ZeroDegree,
    #[error("this operation needs |Ψ| = l with the torus basis dual to Ψ")]
    NotDualBasis,
    #[error("torus index {0} out of range")]
    IndexOutOfRange(usize),
    #[error("component D_{degree} of the decomposition is not a derivation of L (pair {pair:?})")]
    NotDerivation { degree: i64, pair: (usize, usize) },
    #[error("obstruction check supports only sums of D_ij and inner operators")]
    UnsupportedOperator,
    #[error(transparent)]
    DerCalc(#[from] DerCalcError),
}

/// A Laurent polynomial with rational coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LaurentPoly(BTreeMap<i64, Rat>);

impl LaurentPoly {
    pub fn zero() -> Self {
        LaurentPoly::default()
    }

    pub fn one() -> Self {
        Self::monomial(Rat::one(), 0)
    }

    pub fn monomial(c: Rat, degree: i64) -> Self {
        let mut p = LaurentPoly::zero();
        p.add_term(degree, c);
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (i64, Rat)>>(terms: I) -> Self {
        let mut p = LaurentPoly::zero();
        for (d, c) in terms {
            p.add_term(d, c);
        }
        p
    }

    pub fn add_term(&mut self, degree: i64, c: Rat) {
        if c.is_zero() {
            return;
        }
        let e = self.0.entry(degree).or_insert_with(Rat::zero);
        *e += c;
        if e.is_zero() {
            self.0.remove(&degree);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn coeff(&self, degree: i64) -> Rat {
        self.0.get(&degree).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &Rat)> {
        self.0.iter().map(|(d, c)| (*d, c))
    }

    pub fn min_degree(&self) -> Option<i64> {
        self.0.keys().next().copied()
    }

    pub fn max_degree(&self) -> Option<i64> {
        self.0.keys().next_back().copied()
    }

    pub fn add(&self, other: &LaurentPoly) -> LaurentPoly {
        let mut p = self.clone();
        for (d, c) in other.terms() {
            p.add_term(d, c.clone());
        }
        p
    }

    pub fn sub(&self, other: &LaurentPoly) -> LaurentPoly {
        self.add(&other.scale(&Rat::from_int(-1)))
    }

    pub fn scale(&self, c: &Rat) -> LaurentPoly {
        LaurentPoly::from_terms(self.terms().map(|(d, v)| (d, v * c)))
    }

    pub fn mul(&self, other: &LaurentPoly) -> LaurentPoly {
        let mut p = LaurentPoly::zero();
        for (a, x) in self.terms() {
            for (b, y) in other.terms() {
                p.add_term(a + b, x * y);
            }
        }
        p
    }

    /// Multiplication by `t^k`.
    pub fn shift(&self, k: i64) -> LaurentPoly {
        LaurentPoly(self.0.iter().map(|(d, c)| (d + k, c.clone())).collect())
    }

    /// `d/dt`.
    pub fn derivative(&self) -> LaurentPoly {
        LaurentPoly::from_terms(self.terms().map(|(d, c)| (d - 1, c * &Rat::from_int(d))))
    }

    /// `self / divisor` in `F[t, t⁻¹]` if the division is exact.
    pub fn div_exact(&self, divisor: &LaurentPoly) -> Option<LaurentPoly> {
        let (lo, hi) = (divisor.min_degree()?, divisor.max_degree()?);
        if self.is_zero() {
            return Some(LaurentPoly::zero());
        }
        // Long division from the top; units t^k make the quotient Laurent.
        let lead = divisor.coeff(hi);
        let mut rem = self.clone();
        let mut quot = LaurentPoly::zero();
        let floor = self.min_degree().unwrap() - lo;
        while let Some(top) = rem.max_degree() {
            let k = top - hi;
            if k < floor {
                return None;
            }
            let c = &rem.coeff(top) / &lead;
            quot.add_term(k, c.clone());
            rem = rem.sub(&divisor.shift(k).scale(&c));
        }
        Some(quot)
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self.terms().map(|(d, c)| format!("({c})t^{d}")).collect();
        f.write_str(&parts.join(" + "))
    }
}

/// A finitely supported element `Σ v_m ⊗ t^m + c·K`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AffineElement {
    pub central: Rat,
    pub support: BTreeMap<i64, Vec<Rat>>,
}

impl AffineElement {
    pub fn zero() -> Self {
        AffineElement::default()
    }

    pub fn central(c: Rat) -> Self {
        AffineElement {
            central: c,
            support: BTreeMap::new(),
        }
    }

    /// `v ⊗ t^degree`.
    pub fn term(v: Vec<Rat>, degree: i64) -> Self {
        let mut x = AffineElement::zero();
        x.add_vec(degree, &v, &Rat::one());
        x
    }

    /// `c · b_index ⊗ t^degree` in an algebra of dimension `dim`.
    pub fn basis(dim: usize, index: usize, degree: i64, c: Rat) -> Self {
        let mut v = zero_vec(dim);
        v[index] = c;
        AffineElement::term(v, degree)
    }

    pub fn is_zero(&self) -> bool {
        self.central.is_zero() && self.support.is_empty()
    }

    pub fn component(&self, degree: i64) -> Option<&Vec<Rat>> {
        self.support.get(&degree)
    }

    pub fn degrees(&self) -> impl Iterator<Item = i64> + '_ {
        self.support.keys().copied()
    }

    pub fn add_vec(&mut self, degree: i64, v: &[Rat], c: &Rat) {
        if c.is_zero() || is_zero_vec(v) {
            return;
        }
        let slot = self
            .support
            .entry(degree)
            .or_insert_with(|| zero_vec(v.len()));
        for (s, x) in slot.iter_mut().zip(v) {
            if !x.is_zero() {
                *s += c * x;
            }
        }
        if is_zero_vec(slot) {
            self.support.remove(&degree);
        }
    }

    pub fn add_scaled(&mut self, c: &Rat, other: &AffineElement) {
        self.central += c * &other.central;
        for (d, v) in &other.support {
            self.add_vec(*d, v, c);
        }
    }

    pub fn add(&self, other: &AffineElement) -> AffineElement {
        let mut x = self.clone();
        x.add_scaled(&Rat::one(), other);
        x
    }

    pub fn sub(&self, other: &AffineElement) -> AffineElement {
        let mut x = self.clone();
        x.add_scaled(&Rat::from_int(-1), other);
        x
    }

    pub fn scale(&self, c: &Rat) -> AffineElement {
        let mut x = AffineElement::zero();
        x.add_scaled(c, self);
        x
    }

    /// Drops the central part (the image in the loop algebra).
    pub fn without_central(&self) -> AffineElement {
        AffineElement {
            central: Rat::zero(),
            support: self.support.clone(),
        }
    }
}

/// The operator variants acting on `L ⊗ S` or `L̃`.
///
/// Indices are 0-based: torus index `i` refers to `h_i`, and in the
/// `|Ψ| = l` setting it pairs with the root vector `x_i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum LoopOperator {
    /// `X ↦ [y, X]`.
    Inner { y: AffineElement },
    /// `v ⊗ g ↦ D(v) ⊗ f·g`, `K ↦ 0`.
    TensorDer { d: MatQ, f: LaurentPoly },
    /// `σ(Σ λ_i·λ_i, f)`: `h_i⊗g ↦ λ_i h_i⊗f·g`, `x_i⊗g ↦ λ_i x_i⊗f·g`.
    CentroidMul { lambda: Vec<Rat>, f: LaurentPoly },
    /// `h_i⊗t^j ↦ h_i⊗j t^{j−1} f_i(t)`, and likewise on `x_i`.
    LTensorOneKiller { f: Vec<LaurentPoly> },
    /// `h_m⊗t^n ↦ δ_im δ_jn K`; kills `K` and `[L,L]⊗S`.
    Dij { i: usize, j: i64 },
    Sum { terms: Vec<(Rat, LoopOperator)> },
}

impl LoopOperator {
    pub fn zero() -> Self {
        LoopOperator::Sum { terms: Vec::new() }
    }

    pub fn sum(terms: Vec<(Rat, LoopOperator)>) -> Self {
        LoopOperator::Sum { terms }
    }

    /// Whether this is a finite combination of `D_ij` and inner operators.
    fn is_dij_inner_combination(&self) -> bool {
        match self {
            LoopOperator::Dij { .. } | LoopOperator::Inner { .. } => true,
            LoopOperator::Sum { terms } => terms.iter().all(|(_, t)| t.is_dij_inner_combination()),
            _ => false,
        }
    }
}

/// `L ⊗ S` (without `K`) or `L̃` (with `K`) over a root subalgebra in its
/// distinguished basis.
#[derive(Clone, Debug)]
pub struct LoopAlgebra {
    g: LieAlgebra,
    basis: DistinguishedBasis,
    form: MatQ,
    central: bool,
}

impl LoopAlgebra {
    pub fn loop_algebra(g: LieAlgebra, basis: DistinguishedBasis) -> Result<Self, LoopError> {
        Self::build(g, basis, false)
    }

    pub fn affinization(g: LieAlgebra, basis: DistinguishedBasis) -> Result<Self, LoopError> {
        Self::build(g, basis, true)
    }

    fn build(g: LieAlgebra, basis: DistinguishedBasis, central: bool) -> Result<Self, LoopError> {
        let form = g.form().cloned().ok_or(LoopError::MissingForm)?;
        Ok(LoopAlgebra {
            g,
            basis,
            form,
            central,
        })
    }

    pub fn algebra(&self) -> &LieAlgebra {
        &self.g
    }

    pub fn basis(&self) -> &DistinguishedBasis {
        &self.basis
    }

    pub fn has_central(&self) -> bool {
        self.central
    }

    pub fn dim(&self) -> usize {
        self.g.dim()
    }

    pub fn rank(&self) -> usize {
        self.basis.rank()
    }

    pub fn num_roots(&self) -> usize {
        self.basis.num_roots()
    }

    /// `h_i ⊗ t^j`.
    pub fn h(&self, i: usize, j: i64) -> AffineElement {
        AffineElement::basis(self.dim(), i, j, Rat::one())
    }

    /// `x_p ⊗ t^q`.
    pub fn x(&self, p: usize, q: i64) -> AffineElement {
        AffineElement::basis(self.dim(), self.rank() + p, q, Rat::one())
    }

    /// `h_i' ⊗ t^j`, the dual torus vector.
    pub fn h_dual(&self, i: usize, j: i64) -> AffineElement {
        AffineElement::term(self.basis.dual_torus[i].clone(), j)
    }

    pub fn k(&self) -> AffineElement {
        AffineElement::central(Rat::one())
    }

    /// `(x, y)` under the restricted Killing form.
    pub fn pairing(&self, x: &[Rat], y: &[Rat]) -> Rat {
        dot(x, &self.form.mul_vec(y))
    }

    fn check(&self, x: &AffineElement) -> Result<(), LoopError> {
        for v in x.support.values() {
            if v.len() != self.dim() {
                return Err(LoopError::DimensionMismatch {
                    expected: self.dim(),
                    got: v.len(),
                });
            }
        }
        Ok(())
    }

    /// The bracket of `L̃` (or of `L ⊗ S` when there is no `K`).
    pub fn bracket(&self, x: &AffineElement, y: &AffineElement) -> Result<AffineElement, LoopError> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.bracket_unchecked(x, y))
    }

    fn bracket_unchecked(&self, x: &AffineElement, y: &AffineElement) -> AffineElement {
        let mut out = AffineElement::zero();
        for (m, a) in &x.support {
            for (n, b) in &y.support {
                let v = self.g.bracket(a, b);
                out.add_vec(m + n, &v, &Rat::one());
                if self.central && m + n == 0 && *m != 0 {
                    out.central += Rat::from_int(*m) * self.pairing(a, b);
                }
            }
        }
        out
    }

    /// Root-vector partner of torus index `i`, requiring `|Ψ| = l`.
    fn paired_scalar(&self, lambda: &[Rat], idx: usize) -> Rat {
        let l = self.rank();
        let i = if idx < l { idx } else { idx - l };
        lambda.get(i).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn apply(&self, op: &LoopOperator, x: &AffineElement) -> Result<AffineElement, LoopError> {
        self.check(x)?;
        let l = self.rank();
        let needs_pairing = matches!(
            op,
            LoopOperator::CentroidMul { .. } | LoopOperator::LTensorOneKiller { .. }
        );
        if needs_pairing && self.num_roots() != l {
            return Err(LoopError::NotDualBasis);
        }
        let mut out = AffineElement::zero();
        match op {
            LoopOperator::Inner { y } => {
                self.check(y)?;
                out = self.bracket_unchecked(y, x);
            }
            LoopOperator::TensorDer { d, f } => {
                for (m, v) in &x.support {
                    let dv = d.mul_vec(v);
                    for (k, c) in f.terms() {
                        out.add_vec(m + k, &dv, c);
                    }
                }
            }
            LoopOperator::CentroidMul { lambda, f } => {
                for (m, v) in &x.support {
                    let sv: Vec<Rat> = v
                        .iter()
                        .enumerate()
                        .map(|(idx, c)| c * &self.paired_scalar(lambda, idx))
                        .collect();
                    for (k, c) in f.terms() {
                        out.add_vec(m + k, &sv, c);
                    }
                }
            }
            LoopOperator::LTensorOneKiller { f } => {
                if f.len() != l {
                    return Err(LoopError::IndexOutOfRange(f.len()));
                }
                for (m, v) in &x.support {
                    if *m == 0 {
                        continue;
                    }
                    for (idx, c) in v.iter().enumerate() {
                        if c.is_zero() {
                            continue;
                        }
                        let i = if idx < l { idx } else { idx - l };
                        let scaled = c * &Rat::from_int(*m);
                        for (k, fc) in f[i].terms() {
                            let mut e = zero_vec(self.dim());
                            e[idx] = &scaled * fc;
                            out.add_vec(m - 1 + k, &e, &Rat::one());
                        }
                    }
                }
            }
            LoopOperator::Dij { i, j } => {
                if *i >= l {
                    return Err(LoopError::IndexOutOfRange(*i));
                }
                if let Some(v) = x.component(*j) {
                    out.central = v[*i].clone();
                }
            }
            LoopOperator::Sum { terms } => {
                for (w, t) in terms {
                    let y = self.apply(t, x)?;
                    out.add_scaled(w, &y);
                }
            }
        }
        if !self.central {
            out.central = Rat::zero();
        }
        Ok(out)
    }

    /// `h_i⊗t^j`, `x_p⊗t^j` for `|j| ≤ 3`, and `K` when present.
    pub fn probe_family(&self) -> Vec<AffineElement> {
        let mut out = Vec::new();
        for j in -3..=3 {
            for idx in 0..self.dim() {
                out.push(AffineElement::basis(self.dim(), idx, j, Rat::one()));
            }
        }
        if self.central {
            out.push(self.k());
        }
        out
    }

    /// A random element with up to three homogeneous terms of degree in
    /// `[-3, 3]`, integer coordinates in `[-3, 3]`, and (in `L̃`) a random
    /// central part.
    pub fn random_element(&self, rng: &mut ChaCha8Rng) -> AffineElement {
        let mut x = AffineElement::zero();
        for _ in 0..rng.gen_range(1..=3) {
            let d = rng.gen_range(-3i64..=3);
            let v: Vec<Rat> = (0..self.dim())
                .map(|_| Rat::from_int(rng.gen_range(-3i64..=3)))
                .collect();
            x.add_vec(d, &v, &Rat::one());
        }
        if self.central {
            x.central = Rat::from_int(rng.gen_range(-3i64..=3));
        }
        x
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeibnizReport {
    pub passed: bool,
    pub pairs_checked: usize,
    pub counterexample: Option<(AffineElement, AffineElement)>,
}

/// `D[X,Y] = [DX,Y] + [X,DY]` on all probe pairs and on `samples` seeded
/// random pairs.
pub fn leibniz_check(
    alg: &LoopAlgebra,
    op: &LoopOperator,
    samples: usize,
    seed: u64,
) -> Result<LeibnizReport, LoopError> {
    let probes = alg.probe_family();
    let images: Vec<AffineElement> = probes
        .iter()
        .map(|p| alg.apply(op, p))
        .collect::<Result<_, _>>()?;
    let mut pairs = 0;
    let holds = |x: &AffineElement, dx: &AffineElement, y: &AffineElement, dy: &AffineElement| {
        let lhs = alg.apply(op, &alg.bracket_unchecked(x, y))?;
        let rhs = alg
            .bracket_unchecked(dx, y)
            .add(&alg.bracket_unchecked(x, dy));
        Ok::<bool, LoopError>(lhs == rhs)
    };
    for (a, x) in probes.iter().enumerate() {
        for (b, y) in probes.iter().enumerate().skip(a + 1) {
            pairs += 1;
            if !holds(x, &images[a], y, &images[b])? {
                return Ok(LeibnizReport {
                    passed: false,
                    pairs_checked: pairs,
                    counterexample: Some((x.clone(), y.clone())),
                });
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let x = alg.random_element(&mut rng);
        let y = alg.random_element(&mut rng);
        pairs += 1;
        let (dx, dy) = (alg.apply(op, &x)?, alg.apply(op, &y)?);
        if !holds(&x, &dx, &y, &dy)? {
            return Ok(LeibnizReport {
                passed: false,
                pairs_checked: pairs,
                counterexample: Some((x, y)),
            });
        }
    }
    Ok(LeibnizReport {
        passed: true,
        pairs_checked: pairs,
        counterexample: None,
    })
}

/// `σ(λ ⊗ f)`: the centroid element of `L ⊗ S` acting by `λ` on `L` and by
/// multiplication with `f` on `S`.
pub fn sigma(lambda: Vec<Rat>, f: LaurentPoly) -> LoopOperator {
    LoopOperator::CentroidMul { lambda, f }
}

/// `τ(d)` for the derivation `d` of `S` into `Cent(L) ⊗ S` with
/// `d(1⊗t) = Σ λ_i ⊗ f_i(t)`.
pub fn tau(f: Vec<LaurentPoly>) -> LoopOperator {
    LoopOperator::LTensorOneKiller { f }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decomposition {
    /// `D_i` by degree: `d(x ⊗ f) = Σ_i D_i(x) ⊗ t^i f`.
    pub components: Vec<(i64, MatQ)>,
    /// `d` as an operator.
    pub d: LoopOperator,
    /// `op − d`, which kills `L ⊗ 1`.
    pub r: LoopOperator,
}

/// Splits `op` into a `Der(L) ⊗ S` part read off from `op(L ⊗ 1)` and a
/// remainder vanishing on `L ⊗ 1`.
pub fn decompose_derivation(alg: &LoopAlgebra, op: &LoopOperator) -> Result<Decomposition, LoopError> {
    let n = alg.dim();
    let mut by_degree: BTreeMap<i64, MatQ> = BTreeMap::new();
    for k in 0..n {
        let image = alg.apply(op, &AffineElement::basis(n, k, 0, Rat::one()))?;
        for (deg, v) in &image.support {
            let m = by_degree.entry(*deg).or_insert_with(|| MatQ::zeros(n, n));
            for (row, c) in v.iter().enumerate() {
                m[(row, k)] = c.clone();
            }
        }
    }
    for (deg, m) in &by_degree {
        if let Some(pair) = leibniz_violation(alg.algebra(), m) {
            return Err(LoopError::NotDerivation { degree: *deg, pair });
        }
    }
    let components: Vec<(i64, MatQ)> = by_degree.into_iter().collect();
    let d = LoopOperator::sum(
        components
            .iter()
            .map(|(deg, m)| {
                (
                    Rat::one(),
                    LoopOperator::TensorDer {
                        d: m.clone(),
                        f: LaurentPoly::monomial(Rat::one(), *deg),
                    },
                )
            })
            .collect(),
    );
    let r = LoopOperator::sum(vec![(Rat::one(), op.clone()), (Rat::from_int(-1), d.clone())]);
    Ok(Decomposition { components, d, r })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum LoopAidOutcome {
    /// `d = Inner(witness)`, confirmed on the probe family.
    Inner { witness: AffineElement },
    /// Component `D_degree` is not almost inner, so neither is `d`.
    NotAid { degree: i64 },
}

/// Decides almost-innerness of `d = Σ D_i ⊗ t^i` component by component.
pub fn loop_aid_reduce(alg: &LoopAlgebra, components: &[(i64, MatQ)]) -> Result<LoopAidOutcome, LoopError> {
    let mut witness = AffineElement::zero();
    for (deg, m) in components {
        match aid_membership(alg.algebra(), alg.basis(), m)? {
            AidVerdict::Inner { witness: w, .. } => witness.add_vec(*deg, &w, &Rat::one()),
            AidVerdict::NotAid { .. } => return Ok(LoopAidOutcome::NotAid { degree: *deg }),
            AidVerdict::NotDerivation { pair } => {
                return Err(LoopError::NotDerivation { degree: *deg, pair })
            }
        }
    }
    let d = LoopOperator::sum(
        components
            .iter()
            .map(|(deg, m)| {
                (
                    Rat::one(),
                    LoopOperator::TensorDer {
                        d: m.clone(),
                        f: LaurentPoly::monomial(Rat::one(), *deg),
                    },
                )
            })
            .collect(),
    );
    let inner = LoopOperator::Inner { y: witness.clone() };
    for p in alg.probe_family() {
        assert_eq!(
            alg.apply(&d, &p)?.without_central(),
            alg.apply(&inner, &p)?.without_central(),
            "componentwise inner witnesses must assemble to a loop witness"
        );
    }
    Ok(LoopAidOutcome::Inner { witness })
}

/// An inclusive degree range for `Y` in witness searches.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub lo: i64,
    pub hi: i64,
}

impl Window {
    pub fn new(lo: i64, hi: i64) -> Self {
        Window { lo, hi }
    }

    /// `[lo − 2s, hi + 2s]` around the degrees of `X` and the extra degrees,
    /// with `s = max(1, hi − lo)`.
    pub fn around(x: &AffineElement, extra: &[i64]) -> Self {
        let degrees: Vec<i64> = x.degrees().chain(extra.iter().copied()).collect();
        let lo = degrees.iter().copied().min().unwrap_or(0);
        let hi = degrees.iter().copied().max().unwrap_or(0);
        let spread = (hi - lo).max(1);
        Window {
            lo: lo - 2 * spread,
            hi: hi + 2 * spread,
        }
    }

    pub fn degrees(&self) -> impl Iterator<Item = i64> {
        self.lo..=self.hi
    }

    pub fn width(&self) -> i64 {
        self.hi - self.lo
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NonMembership {
    /// The target has a torus component but `[L, L]` has none.
    TorusComponent,
    /// The target has a `K` coefficient but no `[X, Y]` can have one.
    CentralObstruction,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum Membership {
    Member { y: AffineElement },
    NotMember { certificate: NonMembership },
    NoWitnessInWindow { window: Window },
}

impl LoopAlgebra {
    fn derived_has_no_torus(&self) -> bool {
        let l = self.rank();
        let n = self.dim();
        (0..n).all(|a| (0..n).all(|b| self.g.bracket_basis(a, b).iter().all(|(k, _)| *k >= l)))
    }

    /// Whether `Y ↦ K-coefficient of [X, Y]` is identically zero.
    fn central_functional_vanishes(&self, x: &AffineElement) -> bool {
        x.support
            .iter()
            .all(|(m, v)| *m == 0 || is_zero_vec(&self.form.mul_vec(v)))
    }

    /// Decides `target ∈ [X, L̃]` (or `[X, L⊗S]`): exact certificates first,
    /// then a linear solve over `Y` supported in `window`. Free unknowns are
    /// set to zero, so the returned `Y` is deterministic.
    pub fn bracket_membership(
        &self,
        x: &AffineElement,
        target: &AffineElement,
        window: Window,
    ) -> Result<Membership, LoopError> {
        self.check(x)?;
        self.check(target)?;
        let l = self.rank();
        let target_has_torus = target.support.values().any(|v| v[..l].iter().any(|c| !c.is_zero()));
        if target_has_torus && self.derived_has_no_torus() {
            return Ok(Membership::NotMember {
                certificate: NonMembership::TorusComponent,
            });
        }
        if self.central && !target.central.is_zero() && self.central_functional_vanishes(x) {
            return Ok(Membership::NotMember {
                certificate: NonMembership::CentralObstruction,
            });
        }
        match self.solve_witness(&[(x.clone(), target.clone())], window) {
            Some(y) => Ok(Membership::Member { y }),
            None => Ok(Membership::NoWitnessInWindow { window }),
        }
    }

    /// One `Y` with `[X_k, Y] = T_k` for every pair, supported in `window`.
    fn solve_witness(&self, equations: &[(AffineElement, AffineElement)], window: Window) -> Option<AffineElement> {
        let n = self.dim();
        let unknowns: Vec<(usize, i64)> = window
            .degrees()
            .flat_map(|r| (0..n).map(move |s| (s, r)))
            .collect();
        // Row keys: (equation, Some((degree, coord))) or (equation, None) for K.
        let mut rows: BTreeMap<(usize, Option<(i64, usize)>), Vec<(usize, Rat)>> = BTreeMap::new();
        for (e, (x, _)) in equations.iter().enumerate() {
            for (u, (s, r)) in unknowns.iter().enumerate() {
                let col = self.bracket_unchecked(x, &AffineElement::basis(n, *s, *r, Rat::one()));
                for (deg, v) in &col.support {
                    for (c, val) in v.iter().enumerate() {
                        if !val.is_zero() {
                            rows.entry((e, Some((*deg, c)))).or_default().push((u, val.clone()));
                        }
                    }
                }
                if !col.central.is_zero() {
                    rows.entry((e, None)).or_default().push((u, col.central.clone()));
                }
            }
        }
        let mut rhs: BTreeMap<(usize, Option<(i64, usize)>), Rat> = BTreeMap::new();
        for (e, (_, t)) in equations.iter().enumerate() {
            for (deg, v) in &t.support {
                for (c, val) in v.iter().enumerate() {
                    if !val.is_zero() {
                        rhs.insert((e, Some((*deg, c))), val.clone());
                    }
                }
            }
            if self.central && !t.central.is_zero() {
                rhs.insert((e, None), t.central.clone());
            }
        }
        // A target coordinate that no unknown reaches makes the system
        // inconsistent on its own.
        if rhs.keys().any(|k| !rows.contains_key(k)) {
            return None;
        }
        let mut sys = LinearSystem::new(unknowns.len());
        for (key, terms) in rows {
            let b = rhs.get(&key).cloned().unwrap_or_else(Rat::zero);
            sys.push(terms, b);
            if !sys.is_consistent() {
                return None;
            }
        }
        let sol = sys.particular_solution()?;
        let mut y = AffineElement::zero();
        for ((s, r), c) in unknowns.iter().zip(sol) {
            if !c.is_zero() {
                y.add_vec(*r, &crate::exact::unit_vec(n, *s), &c);
            }
        }
        for (x, t) in equations {
            debug_assert_eq!(&self.bracket_unchecked(x, &y), t);
        }
        Some(y)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessPath {
    Fast,
    General,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DijWitness {
    pub y: AffineElement,
    pub path: WitnessPath,
    /// Why the paper-style ansatz was not used, when it was not.
    pub fast_path_failure: Option<String>,
    pub window: Window,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum DijWitnessOutcome {
    Found(DijWitness),
    NoWitnessInWindow { window: Window, fast_path_failure: String },
}

/// `β_k(h_m')` for the dual torus vectors.
fn root_on_dual(alg: &LoopAlgebra) -> MatQ {
    let l = alg.rank();
    let m = alg.num_roots();
    let mut p = MatQ::zeros(m, l);
    for k in 0..m {
        for mm in 0..l {
            p[(k, mm)] = alg.basis().root_value(k, &alg.basis().dual_torus[mm][..l]);
        }
    }
    p
}

/// The ansatz `Y = j⁻¹h_i'⊗t^{−j} − Σ_{k∈B} d_k h_k'⊗t^{−j} + Σ_{k∈A} x_k⊗e_k(t)`.
fn dij_fast_path(alg: &LoopAlgebra, i: usize, j: i64, x: &AffineElement) -> Result<AffineElement, String> {
    let l = alg.rank();
    let n = alg.dim();
    let jinv = Rat::new(1, j);
    let b_poly = |k: usize| LaurentPoly::from_terms(x.support.iter().map(|(d, v)| (*d, v[k].clone())));
    let c_poly = |k: usize| LaurentPoly::from_terms(x.support.iter().map(|(d, v)| (*d, v[l + k].clone())));
    let a_set: Vec<usize> = (0..l).filter(|&k| !b_poly(k).is_zero()).collect();
    let b_set: Vec<usize> = (0..l).filter(|k| !a_set.contains(k)).collect();
    let p = root_on_dual(alg);

    // Σ_{m∈B} β_k(h_m') d_m = β_k(h_i') j⁻¹ for k ∈ B.
    let d: Vec<Rat> = if b_set.is_empty() {
        Vec::new()
    } else {
        let sub = p.submatrix(&b_set, &b_set);
        let rhs: Vec<Rat> = b_set.iter().map(|&k| &p[(k, i)] * &jinv).collect();
        sub.solve(&rhs).ok_or("Gram submatrix on B is singular")?
    };

    let mut y = alg.h_dual(i, -j).scale(&jinv);
    for (pos, &k) in b_set.iter().enumerate() {
        y.add_scaled(&-&d[pos], &alg.h_dual(k, -j));
    }
    for &k in &a_set {
        let coeff = &p[(k, i)] * &jinv
            - b_set
                .iter()
                .enumerate()
                .map(|(pos, &m)| &p[(k, m)] * &d[pos])
                .sum::<Rat>();
        let rhs = c_poly(k).shift(-j).scale(&coeff);
        let e = rhs
            .div_exact(&b_poly(k))
            .ok_or_else(|| format!("b_{}(t) = {} does not divide {}", k + 1, b_poly(k), rhs))?;
        for (q, c) in e.terms() {
            y.add_vec(q, &crate::exact::unit_vec(n, l + k), c);
        }
    }
    Ok(y)
}

/// Finds `Y` with `D_ij(X) = [X, Y]`: the paper-style ansatz first, then a
/// general linear solve over `Y` in the window.
pub fn dij_witness(
    alg: &LoopAlgebra,
    i: usize,
    j: i64,
    x: &AffineElement,
    window: Option<Window>,
) -> Result<DijWitnessOutcome, LoopError> {
    if j == 0 {
        return Err(LoopError::ZeroDegree);
    }
    if !alg.basis().dual_to_psi {
        return Err(LoopError::NotDualBasis);
    }
    if i >= alg.rank() {
        return Err(LoopError::IndexOutOfRange(i));
    }
    alg.check(x)?;
    let x = x.without_central();
    let target = alg.apply(&LoopOperator::Dij { i, j }, &x)?;
    let window = window.unwrap_or_else(|| Window::around(&x, &[-j]));

    let failure = match dij_fast_path(alg, i, j, &x) {
        Ok(y) if alg.bracket_unchecked(&x, &y) == target => {
            return Ok(DijWitnessOutcome::Found(DijWitness {
                y,
                path: WitnessPath::Fast,
                fast_path_failure: None,
                window,
            }))
        }
        Ok(_) => "ansatz solution does not satisfy [X, Y] = D_ij(X)".to_string(),
        Err(e) => e,
    };
    match alg.bracket_membership(&x, &target, window)? {
        Membership::Member { y } => Ok(DijWitnessOutcome::Found(DijWitness {
            y,
            path: WitnessPath::General,
            fast_path_failure: Some(failure),
            window,
        })),
        _ => Ok(DijWitnessOutcome::NoWitnessInWindow {
            window,
            fast_path_failure: failure,
        }),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum ObstructionVerdict {
    Witnessed { y: AffineElement },
    /// `op(X)` has a `K` coefficient no bracket `[X, Y]` can produce.
    CentralObstruction,
    NoWitnessInWindow { window: Window },
}

/// Decides `op(X) ∈ [X, L̃]` for a finite combination of `D_ij` and inner
/// operators.
pub fn aid_obstruction_check(
    alg: &LoopAlgebra,
    op: &LoopOperator,
    x: &AffineElement,
    window: Option<Window>,
) -> Result<ObstructionVerdict, LoopError> {
    if !op.is_dij_inner_combination() {
        return Err(LoopError::UnsupportedOperator);
    }
    if let LoopOperator::Inner { y } = op {
        // [y, X] = [X, −y]
        return Ok(ObstructionVerdict::Witnessed {
            y: y.scale(&Rat::from_int(-1)),
        });
    }
    let target = alg.apply(op, x)?;
    let mut extra = Vec::new();
    collect_dij_degrees(op, &mut extra);
    let extra: Vec<i64> = extra.into_iter().map(|j| -j).collect();
    let window = window.unwrap_or_else(|| Window::around(x, &extra));
    Ok(match alg.bracket_membership(x, &target, window)? {
        Membership::Member { y } => ObstructionVerdict::Witnessed { y },
        Membership::NotMember {
            certificate: NonMembership::CentralObstruction,
        } => ObstructionVerdict::CentralObstruction,
        Membership::NotMember { .. } | Membership::NoWitnessInWindow { .. } => {
            ObstructionVerdict::NoWitnessInWindow { window }
        }
    })
}

fn collect_dij_degrees(op: &LoopOperator, out: &mut Vec<i64>) {
    match op {
        LoopOperator::Dij { j, .. } => out.push(*j),
        LoopOperator::Sum { terms } => terms.iter().for_each(|(_, t)| collect_dij_degrees(t, out)),
        _ => {}
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LTensorOneReport {
    /// All `f_i = 0`, i.e. the operator is zero and trivially almost inner.
    pub almost_inner: bool,
    /// `(i, X = h_i⊗t, certificate)` for the first nonzero `f_i`.
    pub falsified_at: Option<(usize, AffineElement, NonMembership)>,
}

/// An `L⊗1`-killing derivation of the loop algebra is almost inner only if
/// it is zero: `D(h_i⊗t) = h_i⊗f_i(t)` has a torus component, while
/// `[h_i⊗t, L⊗S] ⊆ [L,L]⊗S` has none.
pub fn ltensorone_aid_check(alg: &LoopAlgebra, f: &[LaurentPoly]) -> Result<LTensorOneReport, LoopError> {
    let op = tau(f.to_vec());
    for (i, fi) in f.iter().enumerate() {
        if fi.is_zero() {
            continue;
        }
        let x = alg.h(i, 1);
        let target = alg.apply(&op, &x)?;
        let window = Window::around(&x, &target.degrees().collect::<Vec<_>>());
        if let Membership::NotMember { certificate } = alg.bracket_membership(&x, &target, window)? {
            return Ok(LTensorOneReport {
                almost_inner: false,
                falsified_at: Some((i, x, certificate)),
            });
        }
        return Ok(LTensorOneReport {
            almost_inner: false,
            falsified_at: None,
        });
    }
    Ok(LTensorOneReport {
        almost_inner: true,
        falsified_at: None,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InnerMatch {
    pub y: Option<AffineElement>,
    pub window: Window,
    pub probes: usize,
    /// A negative answer only covers `Y` supported in the window.
    pub window_bounded: bool,
}

/// Looks for a single `Y` in the window with `op(X) = [X, Y]` on the probe
/// family `h_i⊗t^j`, `x_m⊗t^n`, `h_i⊗t^j + x_m⊗t^n` (`m ≠ i`), with all
/// degrees in the window.
pub fn global_inner_match(alg: &LoopAlgebra, op: &LoopOperator, window: Window) -> Result<InnerMatch, LoopError> {
    let l = alg.rank();
    let m = alg.num_roots();
    let mut probes = Vec::new();
    for j in window.degrees() {
        for i in 0..l {
            probes.push(alg.h(i, j));
        }
        for p in 0..m {
            probes.push(alg.x(p, j));
        }
    }
    for j in window.degrees() {
        for n in window.degrees() {
            for i in 0..l {
                for p in (0..m).filter(|&p| p != i) {
                    probes.push(alg.h(i, j).add(&alg.x(p, n)));
                }
            }
        }
    }
    let equations = probes
        .iter()
        .map(|x| Ok((x.clone(), alg.apply(op, x)?)))
        .collect::<Result<Vec<_>, LoopError>>()?;
    let y = alg.solve_witness(&equations, window);
    Ok(InnerMatch {
        y,
        window,
        probes: probes.len(),
        window_bounded: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chevalley::{build_semisimple, extract_subalgebra, SubalgebraSpec};
    use crate::dercalc::{centroid_space, derivation_space};
    use crate::exact::{rat, ratio};
    use crate::rootsys::{Family, RootSystem};
    use std::sync::Arc;

    fn b2_minimal(central: bool) -> LoopAlgebra {
        let rs = Arc::new(RootSystem::build(Family::B, 2).unwrap());
        let g = build_semisimple(&rs);
        let spec = SubalgebraSpec::from_coords(rs, &[vec![1, 0], vec![2, 1]]).unwrap();
        let (sub, basis) = extract_subalgebra(&g, &spec).unwrap();
        if central {
            LoopAlgebra::affinization(sub, basis).unwrap()
        } else {
            LoopAlgebra::loop_algebra(sub, basis).unwrap()
        }
    }

    fn poly(terms: &[(i64, i64)]) -> LaurentPoly {
        LaurentPoly::from_terms(terms.iter().map(|(d, c)| (*d, rat(*c))))
    }

    #[test]
    fn laurent_arithmetic_and_division() {
        let p = poly(&[(1, 1), (2, 1)]);
        let q = poly(&[(-3, 2), (0, 1)]);
        let pq = p.mul(&q);
        assert_eq!(pq.div_exact(&p), Some(q.clone()));
        assert_eq!(pq.div_exact(&q), Some(p.clone()));
        assert_eq!(poly(&[(-1, 1)]).div_exact(&p), None);
        assert_eq!(poly(&[(0, 1)]).div_exact(&poly(&[(5, 2)])), Some(LaurentPoly::monomial(ratio(1, 2), -5)));
        assert_eq!(poly(&[(3, 1), (-2, 4)]).derivative(), poly(&[(2, 3), (-3, -8)]));
        assert!(p.sub(&p).is_zero());
        let json = serde_json::to_string(&q).unwrap();
        assert_eq!(json, r#"{"-3":"2","0":"1"}"#);
        assert_eq!(serde_json::from_str::<LaurentPoly>(&json).unwrap(), q);
    }

    #[test]
    fn affine_bracket_examples() {
        let alg = b2_minimal(true);
        let z = alg.bracket(&alg.h(0, 1), &alg.h_dual(0, -1)).unwrap();
        assert_eq!(z, alg.k());
        let y = alg.random_element(&mut ChaCha8Rng::seed_from_u64(3));
        assert!(alg.bracket(&alg.k(), &y).unwrap().is_zero());
        assert!(alg.bracket(&y, &alg.k()).unwrap().is_zero());
        assert!(alg.bracket(&AffineElement::term(vec![rat(1)], 0), &y).is_err());
    }

    #[test]
    fn affine_bracket_is_a_lie_bracket() {
        let alg = b2_minimal(true);
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..30 {
            let (a, b, c) = (
                alg.random_element(&mut rng),
                alg.random_element(&mut rng),
                alg.random_element(&mut rng),
            );
            let ab = alg.bracket(&a, &b).unwrap();
            assert_eq!(ab, alg.bracket(&b, &a).unwrap().scale(&rat(-1)));
            let jac = alg
                .bracket(&ab, &c)
                .unwrap()
                .add(&alg.bracket(&alg.bracket(&b, &c).unwrap(), &a).unwrap())
                .add(&alg.bracket(&alg.bracket(&c, &a).unwrap(), &b).unwrap());
            assert!(jac.is_zero());
        }
    }

    #[test]
    fn operator_formulas() {
        let alg = b2_minimal(true);
        let d11 = LoopOperator::Dij { i: 0, j: 1 };
        assert_eq!(alg.apply(&d11, &alg.h(0, 1)).unwrap(), alg.k());
        assert!(alg.apply(&d11, &alg.x(1, 5)).unwrap().is_zero());
        assert!(alg.apply(&d11, &alg.k()).unwrap().is_zero());

        let loop_alg = b2_minimal(false);
        let f = vec![poly(&[(0, 1)]), poly(&[(0, 1)])];
        let t = tau(f.clone());
        assert!(loop_alg.apply(&t, &loop_alg.h(0, 0)).unwrap().is_zero());
        assert_eq!(loop_alg.apply(&t, &loop_alg.h(0, 2)).unwrap(), loop_alg.h(0, 1).scale(&rat(2)));
        let g = vec![poly(&[(2, 1), (-1, 3)]), poly(&[(0, 5)])];
        let x1 = loop_alg.apply(&tau(g.clone()), &loop_alg.x(0, 3)).unwrap();
        // x_1 ⊗ 3t² f_1(t)
        let mut want = AffineElement::zero();
        for (d, c) in g[0].shift(2).scale(&rat(3)).terms() {
            want.add_scaled(c, &loop_alg.x(0, d));
        }
        assert_eq!(x1, want);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let v: Vec<Rat> = (0..4).map(|_| rat(rng.gen_range(-3..=3))).collect();
            assert!(loop_alg.apply(&t, &AffineElement::term(v, 0)).unwrap().is_zero());
        }
    }

    #[test]
    fn sigma_examples() {
        let alg = b2_minimal(false);
        let id = sigma(vec![rat(1), rat(1)], LaurentPoly::one());
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..10 {
            let x = alg.random_element(&mut rng);
            assert_eq!(alg.apply(&id, &x).unwrap(), x);
        }
        let s = sigma(vec![rat(1), rat(0)], poly(&[(1, 1)]));
        for j in -2..=2 {
            assert_eq!(alg.apply(&s, &alg.h(0, j)).unwrap(), alg.h(0, j + 1));
            assert!(alg.apply(&s, &alg.h(1, j)).unwrap().is_zero());
        }
        // Centroid axiom and commutativity on random data.
        let a = sigma(vec![rat(2), rat(-1)], poly(&[(-1, 1), (2, 3)]));
        let b = sigma(vec![ratio(1, 2), rat(3)], poly(&[(0, 1), (1, -2)]));
        for _ in 0..20 {
            let (x, y) = (alg.random_element(&mut rng), alg.random_element(&mut rng));
            let lhs = alg.apply(&a, &alg.bracket(&x, &y).unwrap()).unwrap();
            let rhs = alg.bracket(&alg.apply(&a, &x).unwrap(), &y).unwrap();
            assert_eq!(lhs, rhs);
            let ab = alg.apply(&a, &alg.apply(&b, &x).unwrap()).unwrap();
            let ba = alg.apply(&b, &alg.apply(&a, &x).unwrap()).unwrap();
            assert_eq!(ab, ba);
        }
    }

    #[test]
    fn leibniz_examples() {
        let alg = b2_minimal(true);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let y = alg.random_element(&mut rng);
        assert!(leibniz_check(&alg, &LoopOperator::Inner { y }, 20, 2024).unwrap().passed);
        for (i, j) in [(0, 1), (1, -2), (0, 0)] {
            assert!(leibniz_check(&alg, &LoopOperator::Dij { i, j }, 20, 2024).unwrap().passed);
        }
        let loop_alg = b2_minimal(false);
        let mut bad = MatQ::zeros(4, 4);
        bad[(3, 0)] = rat(1);
        let op = LoopOperator::TensorDer { d: bad, f: poly(&[(1, 1)]) };
        let r = leibniz_check(&loop_alg, &op, 0, 2024).unwrap();
        assert!(!r.passed);
        assert!(r.counterexample.is_some());
    }

    #[test]
    fn decomposition_examples() {
        let alg = b2_minimal(false);
        let ders = derivation_space(alg.algebra());
        let d = ders.der_basis[1].clone();
        let op = LoopOperator::TensorDer { d: d.clone(), f: poly(&[(3, 1)]) };
        let dec = decompose_derivation(&alg, &op).unwrap();
        assert_eq!(dec.components, vec![(3, d)]);
        for p in alg.probe_family() {
            assert!(alg.apply(&dec.r, &p).unwrap().is_zero());
        }

        let y = vec![rat(1), rat(0), rat(-2), rat(1)];
        let inner = LoopOperator::Inner { y: AffineElement::term(y.clone(), 2) };
        let dec = decompose_derivation(&alg, &inner).unwrap();
        assert_eq!(dec.components, vec![(2, alg.algebra().ad(&y))]);
        for p in alg.probe_family() {
            assert!(alg.apply(&dec.r, &p).unwrap().is_zero());
        }

        let killer = tau(vec![poly(&[(1, 2)]), poly(&[(-1, 1)])]);
        let dec = decompose_derivation(&alg, &killer).unwrap();
        assert!(dec.components.is_empty());
        for p in alg.probe_family() {
            assert_eq!(alg.apply(&dec.r, &p).unwrap(), alg.apply(&killer, &p).unwrap());
        }
    }

    #[test]
    fn loop_aid_examples() {
        let alg = b2_minimal(false);
        let y0 = vec![rat(1), rat(2), rat(0), rat(-1)];
        let y1 = vec![rat(0), rat(1), rat(3), rat(0)];
        let comps = vec![(0, alg.algebra().ad(&y0)), (-2, alg.algebra().ad(&y1))];
        match loop_aid_reduce(&alg, &comps).unwrap() {
            LoopAidOutcome::Inner { witness } => {
                let mut want = AffineElement::term(y0, 0);
                want.add_vec(-2, &y1, &rat(1));
                assert_eq!(witness, want);
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(
            loop_aid_reduce(&alg, &[]).unwrap(),
            LoopAidOutcome::Inner { witness: AffineElement::zero() }
        );
    }

    #[test]
    fn loop_aid_detects_non_inner_component() {
        // Abelian non-minimal A3 subalgebra with four roots: a non-inner
        // diagonal derivation there is not almost inner.
        let rs = Arc::new(RootSystem::build(Family::A, 3).unwrap());
        let g = build_semisimple(&rs);
        let spec = SubalgebraSpec::from_coords(
            rs,
            &[vec![0, 1, 0], vec![1, 1, 0], vec![0, 1, 1], vec![1, 1, 1]],
        )
        .unwrap();
        let (sub, basis) = extract_subalgebra(&g, &spec).unwrap();
        let pos = basis.roots.iter().position(|r| r == &vec![0, 1, 0]).unwrap();
        let mut a = vec![rat(0); 4];
        a[pos] = rat(1);
        let d = crate::dercalc::diagonal_map(&basis, &a);
        let alg = LoopAlgebra::loop_algebra(sub, basis).unwrap();
        assert_eq!(
            loop_aid_reduce(&alg, &[(1, d)]).unwrap(),
            LoopAidOutcome::NotAid { degree: 1 }
        );
    }

    #[test]
    fn ltensorone_examples() {
        let alg = b2_minimal(false);
        let zero = vec![LaurentPoly::zero(), LaurentPoly::zero()];
        assert!(ltensorone_aid_check(&alg, &zero).unwrap().almost_inner);
        let r = ltensorone_aid_check(&alg, &[LaurentPoly::one(), LaurentPoly::zero()]).unwrap();
        assert!(!r.almost_inner);
        let (i, x, cert) = r.falsified_at.unwrap();
        assert_eq!((i, cert), (0, NonMembership::TorusComponent));
        assert_eq!(x, alg.h(0, 1));
        for k in [-2, 0, 3] {
            let f = vec![LaurentPoly::zero(), poly(&[(k, 1)])];
            assert!(!ltensorone_aid_check(&alg, &f).unwrap().almost_inner);
        }
    }

    #[test]
    fn dij_witness_examples() {
        let alg = b2_minimal(true);
        for (i, j) in [(0, 1), (1, -2), (0, 3)] {
            let x = alg.h(i, j);
            let DijWitnessOutcome::Found(w) = dij_witness(&alg, i, j, &x, None).unwrap() else {
                panic!("no witness");
            };
            assert_eq!(w.path, WitnessPath::Fast);
            assert_eq!(alg.bracket(&x, &w.y).unwrap(), alg.k());
        }
        let x = alg.x(1, 4);
        let DijWitnessOutcome::Found(w) = dij_witness(&alg, 0, 1, &x, None).unwrap() else {
            panic!("no witness");
        };
        assert!(w.y.is_zero());
        assert_eq!(dij_witness(&alg, 0, 0, &x, None), Err(LoopError::ZeroDegree));
    }

    #[test]
    fn dij_multi_degree_example_needs_general_path() {
        let alg = b2_minimal(true);
        let x = alg.h(0, 1).add(&alg.h(0, 2)).add(&alg.x(0, 0));
        let DijWitnessOutcome::Found(w) = dij_witness(&alg, 0, 1, &x, None).unwrap() else {
            panic!("no witness");
        };
        assert_eq!(w.path, WitnessPath::General);
        assert!(w.fast_path_failure.as_deref().unwrap().contains("does not divide"));
        assert_eq!(alg.bracket(&x, &w.y).unwrap(), alg.k());
        // The witness described alongside the example also works.
        let mut y = alg.h_dual(0, -1).add(&alg.h_dual(0, -2)).scale(&ratio(1, 3));
        let gram = &alg.basis().gram;
        y.add_scaled(&(&gram[(0, 0)] * &ratio(1, 3)), &alg.x(0, -3));
        assert_eq!(alg.bracket(&x, &y).unwrap(), alg.k());
    }

    #[test]
    fn dij_random_witnesses() {
        let alg = b2_minimal(true);
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for _ in 0..10 {
            let x = alg.random_element(&mut rng).without_central();
            for (i, j) in [(0, 1), (1, -1), (1, 2)] {
                let DijWitnessOutcome::Found(w) = dij_witness(&alg, i, j, &x, None).unwrap() else {
                    panic!("no witness for {x:?}");
                };
                let target = alg.apply(&LoopOperator::Dij { i, j }, &x).unwrap();
                assert_eq!(alg.bracket(&x, &w.y).unwrap(), target);
            }
        }
    }

    #[test]
    fn obstruction_examples() {
        let alg = b2_minimal(true);
        for i in 0..2 {
            let v = aid_obstruction_check(&alg, &LoopOperator::Dij { i, j: 0 }, &alg.h(i, 0), None).unwrap();
            assert_eq!(v, ObstructionVerdict::CentralObstruction);
        }
        let x = alg.h(0, 1).add(&alg.x(1, -1));
        match aid_obstruction_check(&alg, &LoopOperator::Dij { i: 0, j: 1 }, &x, None).unwrap() {
            ObstructionVerdict::Witnessed { y } => {
                assert_eq!(alg.bracket(&x, &y).unwrap(), alg.k());
            }
            other => panic!("{other:?}"),
        }
        let y = alg.x(0, 2).add(&alg.h(1, -1));
        match aid_obstruction_check(&alg, &LoopOperator::Inner { y: y.clone() }, &x, None).unwrap() {
            ObstructionVerdict::Witnessed { y: w } => {
                assert_eq!(alg.bracket(&x, &w).unwrap(), alg.bracket(&y, &x).unwrap());
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(
            aid_obstruction_check(&alg, &tau(vec![LaurentPoly::one(); 2]), &x, None),
            Err(LoopError::UnsupportedOperator)
        );
    }

    #[test]
    fn global_inner_match_examples() {
        let alg = b2_minimal(true);
        let w = Window::new(-2, 2);
        let r = global_inner_match(&alg, &LoopOperator::zero(), w).unwrap();
        assert_eq!(r.y, Some(AffineElement::zero()));
        let r = global_inner_match(&alg, &LoopOperator::Dij { i: 0, j: 1 }, w).unwrap();
        assert_eq!(r.y, None);
        let combo = LoopOperator::sum(vec![
            (rat(2), LoopOperator::Dij { i: 0, j: 1 }),
            (rat(-3), LoopOperator::Dij { i: 1, j: -1 }),
        ]);
        assert_eq!(global_inner_match(&alg, &combo, w).unwrap().y, None);
        // An honest inner operator is matched.
        let y = alg.x(0, 1).add(&alg.h(1, 0));
        let r = global_inner_match(&alg, &LoopOperator::Inner { y: y.clone() }, w).unwrap();
        let found = r.y.unwrap();
        for p in [alg.h(0, 1), alg.x(1, -1), alg.h(1, 2)] {
            assert_eq!(
                alg.bracket(&p, &found).unwrap(),
                alg.bracket(&y, &p).unwrap()
            );
        }
    }

    #[test]
    fn root_vectors_are_isotropic() {
        let alg = b2_minimal(true);
        let n = alg.dim();
        for p in 0..alg.num_roots() {
            for q in 0..alg.num_roots() {
                let a = crate::exact::unit_vec(n, alg.rank() + p);
                let b = crate::exact::unit_vec(n, alg.rank() + q);
                assert!(alg.pairing(&a, &b).is_zero());
            }
        }
    }

    #[test]
    fn centroid_basis_matches_sigma_family() {
        let alg = b2_minimal(false);
        let cent = centroid_space(alg.algebra());
        assert_eq!(cent.basis.len(), alg.rank());
    }

    #[test]
    fn affine_element_json_shape() {
        let mut x = AffineElement::term(vec![rat(1), ratio(-1, 2)], -1);
        x.central = ratio(3, 4);
        let json = serde_json::to_string(&x).unwrap();
        assert_eq!(json, r#"{"central":"3/4","support":{"-1":["1","-1/2"]}}"#);
        assert_eq!(serde_json::from_str::<AffineElement>(&json).unwrap(), x);
        let op = LoopOperator::sum(vec![(rat(2), LoopOperator::Dij { i: 0, j: 1 })]);
        let json = serde_json::to_string(&op).unwrap();
        assert_eq!(serde_json::from_str::<LoopOperator>(&json).unwrap(), op);
    }
}
