//! Root systems of the simple types A–G in simple-root coordinates.
//!
//! Numbering follows Bourbaki except for B and C, where the simple root at
//! index 0 is the one at the double bond's end (short for B, long for C).
//! This makes B2 read `α = (1,0)` short, `β = (0,1)` long, so
//! `2α+β = (2,1)` is a root.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::exact::MatZ;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Family::A => "A",
            Family::B => "B",
            Family::C => "C",
            Family::D => "D",
            Family::E => "E",
            Family::F => "F",
            Family::G => "G",
        };
        f.write_str(s)
    }
}

impl FromStr for Family {
    type Err = RootSystemError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "A" | "a" => Ok(Family::A),
            "B" | "b" => Ok(Family::B),
            "C" | "c" => Ok(Family::C),
            "D" | "d" => Ok(Family::D),
            "E" | "e" => Ok(Family::E),
            "F" | "f" => Ok(Family::F),
            "G" | "g" => Ok(Family::G),
            other => Err(RootSystemError::UnknownFamily(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RootSystemError {
    #[error("unknown root system family {0:?}")]
    UnknownFamily(String),
    #[error("{family}{rank} is not a simple type (valid: A_l l>=1, B_l l>=2, C_l l>=3, D_l l>=4, E6-E8, F4, G2)")]
    InvalidRank { family: Family, rank: usize },
    #[error("{0:?} is not a root")]
    NotARoot(Vec<i64>),
}

/// A root written as its integer coefficients over the simple roots.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Root(pub Vec<i64>);

impl Root {
    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    /// Coefficient sum. Negative roots get the negative of the height of
    /// their opposite, which is again the coefficient sum.
    pub fn height(&self) -> i64 {
        self.0.iter().sum()
    }

    pub fn is_positive(&self) -> bool {
        self.height() > 0
    }

    pub fn neg(&self) -> Root {
        Root(self.0.iter().map(|x| -x).collect())
    }

    pub fn add(&self, other: &Root) -> Root {
        Root(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Canonical sort key: height first, then coordinates.
    pub fn order_key(&self) -> (i64, &[i64]) {
        (self.height(), &self.0)
    }
}

impl fmt::Display for Root {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// A reduced irreducible root system.
#[derive(Clone, Debug)]
pub struct RootSystem {
    family: Family,
    rank: usize,
    /// `cartan[i][j] = <α_j, α_i^∨> = 2(α_i, α_j)/(α_i, α_i)`
    cartan: Vec<Vec<i64>>,
    /// Inner products of simple roots; short roots have squared length 2.
    gram: Vec<Vec<i64>>,
    roots: Vec<Root>,
    index: HashMap<Vec<i64>, usize>,
}

#[derive(Serialize)]
struct RootSystemJson<'a> {
    family: Family,
    rank: usize,
    roots: Vec<&'a [i64]>,
}

impl Serialize for RootSystem {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        RootSystemJson {
            family: self.family,
            rank: self.rank,
            roots: self.roots.iter().map(Root::coords).collect(),
        }
        .serialize(serializer)
    }
}

impl RootSystem {
    pub fn build(family: Family, rank: usize) -> Result<Self, RootSystemError> {
        let gram = simple_gram(family, rank)?;
        let l = rank;
        let cartan: Vec<Vec<i64>> = (0..l)
            .map(|i| (0..l).map(|j| 2 * gram[i][j] / gram[i][i]).collect())
            .collect();

        // Positive roots by increasing height; the α_i-string through r
        // starts p steps below r, and r + α_i is a root iff p - <r, α_i^∨> > 0.
        let mut positive: Vec<Vec<i64>> = (0..l).map(|i| unit(l, i)).collect();
        let mut seen: HashMap<Vec<i64>, ()> = positive.iter().map(|r| (r.clone(), ())).collect();
        let mut cursor = 0;
        while cursor < positive.len() {
            let r = positive[cursor].clone();
            cursor += 1;
            for i in 0..l {
                if r == unit(l, i) {
                    continue;
                }
                let mut p = 0;
                let mut down = r.clone();
                loop {
                    down[i] -= 1;
                    if seen.contains_key(&down) {
                        p += 1;
                    } else {
                        break;
                    }
                }
                let pairing: i64 = (0..l).map(|j| r[j] * cartan[i][j]).sum();
                if p - pairing > 0 {
                    let mut up = r.clone();
                    up[i] += 1;
                    if !seen.contains_key(&up) {
                        seen.insert(up.clone(), ());
                        positive.push(up);
                    }
                }
            }
        }

        let mut roots: Vec<Root> = positive
            .iter()
            .flat_map(|r| [Root(r.clone()), Root(r.iter().map(|x| -x).collect())])
            .collect();
        roots.sort_by(|a, b| a.order_key().cmp(&b.order_key()));
        let index = roots
            .iter()
            .enumerate()
            .map(|(i, r)| (r.0.clone(), i))
            .collect();
        Ok(RootSystem {
            family,
            rank,
            cartan,
            gram,
            roots,
            index,
        })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn name(&self) -> String {
        format!("{}{}", self.family, self.rank)
    }

    pub fn cartan(&self) -> &[Vec<i64>] {
        &self.cartan
    }

    pub fn cartan_matrix(&self) -> MatZ {
        MatZ::from_i64_rows(&self.cartan)
    }

    pub fn simple_gram(&self) -> &[Vec<i64>] {
        &self.gram
    }

    /// All roots in canonical order (height, then coordinates).
    pub fn roots(&self) -> &[Root] {
        &self.roots
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn root(&self, i: usize) -> &Root {
        &self.roots[i]
    }

    pub fn index_of(&self, coords: &[i64]) -> Option<usize> {
        self.index.get(coords).copied()
    }

    pub fn contains(&self, coords: &[i64]) -> bool {
        self.index.contains_key(coords)
    }

    pub fn lookup(&self, coords: &[i64]) -> Result<usize, RootSystemError> {
        self.index_of(coords)
            .ok_or_else(|| RootSystemError::NotARoot(coords.to_vec()))
    }

    pub fn simple_root_index(&self, i: usize) -> usize {
        self.index[&unit(self.rank, i)]
    }

    pub fn negative_index(&self, i: usize) -> usize {
        self.index[&self.roots[i].neg().0]
    }

    pub fn positive_indices(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.roots[i].is_positive()).collect()
    }

    pub fn height(&self, r: &Root) -> i64 {
        r.height()
    }

    /// `a + b` if it is a root; `None` otherwise, including `a + b = 0`.
    pub fn root_sum(&self, a: &Root, b: &Root) -> Option<Root> {
        let s = a.add(b);
        self.contains(&s.0).then_some(s)
    }

    pub fn root_sum_index(&self, a: usize, b: usize) -> Option<usize> {
        self.index_of(&self.roots[a].add(&self.roots[b]).0)
    }

    /// Invariant inner product, normalized so short roots have length 2.
    pub fn inner(&self, a: &[i64], b: &[i64]) -> i64 {
        let l = self.rank;
        let mut s = 0;
        for i in 0..l {
            if a[i] == 0 {
                continue;
            }
            for j in 0..l {
                s += a[i] * self.gram[i][j] * b[j];
            }
        }
        s
    }

    /// `<a, b^∨> = 2(a,b)/(b,b)`
    pub fn pairing(&self, a: &[i64], b: &[i64]) -> i64 {
        2 * self.inner(a, b) / self.inner(b, b)
    }

    /// Largest `p >= 0` with `s - p·r` a root (for `s` a root, `r ≠ ±s`).
    pub fn string_below(&self, r: &Root, s: &Root) -> i64 {
        let mut p = 0;
        let mut cur = s.clone();
        loop {
            cur = Root(cur.0.iter().zip(&r.0).map(|(x, y)| x - y).collect());
            if self.contains(&cur.0) {
                p += 1;
            } else {
                return p;
            }
        }
    }

    /// The simple reflection `s_i(v) = v - <v, α_i^∨> α_i`.
    pub fn reflect(&self, i: usize, v: &[i64]) -> Vec<i64> {
        let pairing: i64 = (0..self.rank).map(|j| v[j] * self.cartan[i][j]).sum();
        let mut out = v.to_vec();
        out[i] -= pairing;
        out
    }

    /// Coroot `h_r` in the basis of simple coroots: coefficient
    /// `k_i (α_i, α_i) / (r, r)` for `r = Σ k_i α_i`.
    pub fn coroot_coords(&self, r: &[i64]) -> Vec<i64> {
        let rr = self.inner(r, r);
        (0..self.rank)
            .map(|i| {
                let num = r[i] * self.gram[i][i];
                debug_assert_eq!(num % rr, 0);
                num / rr
            })
            .collect()
    }
}

fn unit(l: usize, i: usize) -> Vec<i64> {
    let mut v = vec![0; l];
    v[i] = 1;
    v
}

fn chain_gram(l: usize, diag: impl Fn(usize) -> i64, off: impl Fn(usize) -> i64) -> Vec<Vec<i64>> {
    let mut g = vec![vec![0; l]; l];
    for i in 0..l {
        g[i][i] = diag(i);
        if i + 1 < l {
            g[i][i + 1] = off(i);
            g[i + 1][i] = off(i);
        }
    }
    g
}

fn simply_laced(l: usize, edges: &[(usize, usize)]) -> Vec<Vec<i64>> {
    let mut g = vec![vec![0; l]; l];
    for (i, row) in g.iter_mut().enumerate() {
        row[i] = 2;
    }
    for &(a, b) in edges {
        g[a][b] = -1;
        g[b][a] = -1;
    }
    g
}

fn simple_gram(family: Family, l: usize) -> Result<Vec<Vec<i64>>, RootSystemError> {
    let invalid = Err(RootSystemError::InvalidRank { family, rank: l });
    let g = match family {
        Family::A if l >= 1 => chain_gram(l, |_| 2, |_| -1),
        Family::B if l >= 2 => chain_gram(l, |i| if i == 0 { 2 } else { 4 }, |_| -2),
        Family::C if l >= 3 => chain_gram(
            l,
            |i| if i == 0 { 4 } else { 2 },
            |i| if i == 0 { -2 } else { -1 },
        ),
        Family::D if l >= 4 => {
            let mut edges: Vec<(usize, usize)> = (0..l - 2).map(|i| (i, i + 1)).collect();
            edges.push((l - 3, l - 1));
            simply_laced(l, &edges)
        }
        Family::E if (6..=8).contains(&l) => {
            // Bourbaki: 1-3-4-5-6(-7-8), with 2 attached to 4.
            let mut edges = vec![(0, 2), (1, 3), (2, 3)];
            edges.extend((3..l - 1).map(|i| (i, i + 1)));
            simply_laced(l, &edges)
        }
        Family::F if l == 4 => chain_gram(
            4,
            |i| if i < 2 { 4 } else { 2 },
            |i| if i == 2 { -1 } else { -2 },
        ),
        Family::G if l == 2 => vec![vec![2, -3], vec![-3, 6]],
        _ => return invalid,
    };
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn expected_count(family: Family, l: usize) -> usize {
        match family {
            Family::A => l * (l + 1),
            Family::B | Family::C => 2 * l * l,
            Family::D => 2 * l * (l - 1),
            Family::E => [72, 126, 240][l - 6],
            Family::F => 48,
            Family::G => 12,
        }
    }

    fn all_types() -> Vec<(Family, usize)> {
        let mut v = vec![];
        for l in 1..=6 {
            v.push((Family::A, l));
        }
        for l in 2..=5 {
            v.push((Family::B, l));
        }
        for l in 3..=5 {
            v.push((Family::C, l));
        }
        for l in 4..=6 {
            v.push((Family::D, l));
        }
        v.extend([(Family::E, 6), (Family::E, 7), (Family::E, 8), (Family::F, 4), (Family::G, 2)]);
        v
    }

    /// Orbit of the simple roots under the simple reflections.
    fn weyl_orbit(rs: &RootSystem) -> BTreeSet<Vec<i64>> {
        let l = rs.rank();
        let mut orbit: BTreeSet<Vec<i64>> = (0..l).map(|i| unit(l, i)).collect();
        let mut frontier: Vec<Vec<i64>> = orbit.iter().cloned().collect();
        while let Some(v) = frontier.pop() {
            for i in 0..l {
                let w = rs.reflect(i, &v);
                if orbit.insert(w.clone()) {
                    frontier.push(w);
                }
            }
        }
        orbit
    }

    #[test]
    fn classical_counts_and_invariants() {
        for (f, l) in all_types() {
            let rs = RootSystem::build(f, l).unwrap();
            assert_eq!(rs.len(), expected_count(f, l), "{f}{l}");
            for r in rs.roots() {
                assert!(rs.contains(&r.neg().0));
                assert!(r.0.iter().all(|&x| x >= 0) || r.0.iter().all(|&x| x <= 0));
                for i in 0..l {
                    assert!(rs.contains(&rs.reflect(i, &r.0)), "{f}{l} not reflection closed");
                }
            }
            let simple = rs.roots().iter().filter(|r| r.height() == 1).count();
            assert_eq!(simple, l);
        }
    }

    #[test]
    fn matches_weyl_orbit_oracle() {
        for (f, l) in all_types() {
            let rs = RootSystem::build(f, l).unwrap();
            let ours: BTreeSet<Vec<i64>> = rs.roots().iter().map(|r| r.0.clone()).collect();
            assert_eq!(ours, weyl_orbit(&rs), "{f}{l}");
        }
    }

    #[test]
    fn b2_roots_match_listing() {
        let rs = RootSystem::build(Family::B, 2).unwrap();
        let got: BTreeSet<Vec<i64>> = rs.roots().iter().map(|r| r.0.clone()).collect();
        let mut want = BTreeSet::new();
        for r in [[1, 0], [0, 1], [1, 1], [2, 1]] {
            want.insert(r.to_vec());
            want.insert(r.iter().map(|x| -x).collect());
        }
        assert_eq!(got, want);
    }

    #[test]
    fn g2_has_twelve_roots() {
        let rs = RootSystem::build(Family::G, 2).unwrap();
        assert_eq!(rs.len(), 12);
        assert!(rs.contains(&[3, 2]));
        assert!(rs.contains(&[3, 1]));
    }

    #[test]
    fn heights_and_sums() {
        let rs = RootSystem::build(Family::B, 2).unwrap();
        assert_eq!(Root(vec![1, 0]).height(), 1);
        assert_eq!(Root(vec![2, 1]).height(), 3);
        assert_eq!(Root(vec![-1, -1]).height(), -2);
        let a = Root(vec![1, 0]);
        let b = Root(vec![0, 1]);
        assert_eq!(rs.root_sum(&a, &b), Some(Root(vec![1, 1])));
        assert_eq!(rs.root_sum(&a, &a), None);
        assert_eq!(rs.root_sum(&a, &a.neg()), None);
    }

    #[test]
    fn invalid_types_rejected() {
        for (f, l) in [(Family::A, 0), (Family::B, 1), (Family::C, 2), (Family::D, 3), (Family::E, 5), (Family::E, 9), (Family::F, 3), (Family::G, 3)] {
            assert!(RootSystem::build(f, l).is_err(), "{f}{l}");
        }
    }

    #[test]
    fn canonical_order_and_json() {
        let rs = RootSystem::build(Family::A, 2).unwrap();
        let keys: Vec<_> = rs.roots().iter().map(|r| (r.height(), r.0.clone())).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
        let json = serde_json::to_string(&rs).unwrap();
        assert_eq!(
            json,
            r#"{"family":"A","rank":2,"roots":[[-1,-1],[-1,0],[0,-1],[0,1],[1,0],[1,1]]}"#
        );
    }

    #[test]
    fn coroots_are_integral() {
        for (f, l) in all_types() {
            let rs = RootSystem::build(f, l).unwrap();
            for r in rs.roots() {
                let c = rs.coroot_coords(&r.0);
                let back: Vec<i64> = (0..l)
                    .map(|i| c[i] * rs.inner(&r.0, &r.0) / rs.simple_gram()[i][i])
                    .collect();
                assert_eq!(back, r.0);
            }
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn root_sum_is_symmetric_and_additive(a in 0usize..48, b in 0usize..48) {
                let rs = RootSystem::build(Family::F, 4).unwrap();
                let (ra, rb) = (rs.root(a), rs.root(b));
                let ab = rs.root_sum(ra, rb);
                prop_assert_eq!(ab.clone(), rs.root_sum(rb, ra));
                if let Some(s) = ab {
                    prop_assert_eq!(s.height(), ra.height() + rb.height());
                }
                prop_assert!((ra.height() > 0) != (ra.neg().height() > 0));
            }
        }
    }
}
