//! Abstract simplicial complexes over landmark indices.

mod io;

pub use io::{read_complex, read_complex_path, write_complex, write_complex_path};

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::{Result, TwdError};

/// A nonempty sorted set of distinct vertex indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Simplex(Vec<usize>);

impl Simplex {
    pub fn new(mut v: Vec<usize>) -> Result<Self> {
        if v.is_empty() {
            return Err(TwdError::Format("empty simplex".into()));
        }
        v.sort_unstable();
        if v.windows(2).any(|w| w[0] == w[1]) {
            return Err(TwdError::Format(format!("repeated vertex in {v:?}")));
        }
        Ok(Self(v))
    }

    /// From a slice already sorted and duplicate free.
    pub fn from_sorted(v: &[usize]) -> Self {
        debug_assert!(!v.is_empty() && v.windows(2).all(|w| w[0] < w[1]));
        Self(v.to_vec())
    }

    pub fn vertex(v: usize) -> Self {
        Self(vec![v])
    }

    pub fn vertices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn without(&self, v: usize) -> Option<Simplex> {
        let w: Vec<usize> = self.0.iter().copied().filter(|&x| x != v).collect();
        (!w.is_empty()).then_some(Simplex(w))
    }

    pub fn with(&self, v: usize) -> Simplex {
        let mut w = self.0.clone();
        if let Err(pos) = w.binary_search(&v) {
            w.insert(pos, v);
        }
        Simplex(w)
    }

    /// Codimension-one faces, dropping each vertex in turn.
    pub fn facets(&self) -> Vec<Simplex> {
        if self.0.len() == 1 {
            return Vec::new();
        }
        (0..self.0.len())
            .map(|i| {
                let mut w = self.0.clone();
                w.remove(i);
                Simplex(w)
            })
            .collect()
    }

    /// Every nonempty face, the simplex itself included.
    pub fn faces(&self) -> Vec<Simplex> {
        let n = self.0.len();
        (1..1usize << n)
            .map(|mask| Simplex((0..n).filter(|i| mask >> i & 1 == 1).map(|i| self.0[i]).collect()))
            .collect()
    }

    pub fn is_face_of(&self, other: &Simplex) -> bool {
        self.0.iter().all(|&v| other.contains(v))
    }
}

impl std::fmt::Display for Simplex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s: Vec<String> = self.0.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", s.join(" "))
    }
}

/// A set of simplices closed under taking faces, with a per-vertex incidence index.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SimplicialComplex {
    simplices: BTreeSet<Simplex>,
    incidence: BTreeMap<usize, BTreeSet<Simplex>>,
}

impl SimplicialComplex {
    pub fn new() -> Self {
        Self::default()
    }

    /// The closure of the given simplices.
    pub fn from_simplices<I: IntoIterator<Item = Simplex>>(it: I) -> Self {
        let mut k = Self::new();
        for s in it {
            k.insert_with_closure(&s);
        }
        k
    }

    fn insert_one(&mut self, s: Simplex) -> bool {
        if self.simplices.contains(&s) {
            return false;
        }
        for &v in s.vertices() {
            self.incidence.entry(v).or_default().insert(s.clone());
        }
        self.simplices.insert(s);
        true
    }

    /// Adds `s` and all its faces.
    pub fn insert_with_closure(&mut self, s: &Simplex) {
        if self.simplices.contains(s) {
            return;
        }
        for f in s.faces() {
            self.insert_one(f);
        }
    }

    /// Adds a simplex whose facets are already present.
    pub fn insert_unchecked(&mut self, s: Simplex) {
        debug_assert!(s.facets().iter().all(|f| self.simplices.contains(f)));
        self.insert_one(s);
    }

    /// A copy with `s` and its faces added.
    pub fn with_inserted(&self, s: &Simplex) -> Self {
        let mut k = self.clone();
        k.insert_with_closure(s);
        k
    }

    pub fn contains(&self, s: &Simplex) -> bool {
        self.simplices.contains(s)
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    /// Dimension of the largest simplex, `None` when empty.
    pub fn dim(&self) -> Option<usize> {
        self.simplices.iter().map(|s| s.dim()).max()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Simplex> {
        self.simplices.iter()
    }

    pub fn of_dim(&self, k: usize) -> impl Iterator<Item = &Simplex> {
        self.simplices.iter().filter(move |s| s.dim() == k)
    }

    pub fn count_dim(&self, k: usize) -> usize {
        self.of_dim(k).count()
    }

    pub fn vertices(&self) -> Vec<usize> {
        self.incidence.keys().copied().collect()
    }

    pub fn has_vertex(&self, v: usize) -> bool {
        self.incidence.contains_key(&v)
    }

    /// Simplices containing `v`.
    pub fn cofaces_of_vertex(&self, v: usize) -> impl Iterator<Item = &Simplex> {
        self.incidence.get(&v).into_iter().flatten()
    }

    /// Simplices not a proper face of another simplex.
    pub fn maximal_simplices(&self) -> Vec<Simplex> {
        self.simplices
            .iter()
            .filter(|s| {
                let v = s.vertices()[0];
                !self
                    .cofaces_of_vertex(v)
                    .any(|t| t.len() == s.len() + 1 && s.is_face_of(t))
            })
            .cloned()
            .collect()
    }

    /// Closure of the simplices containing `p`.
    pub fn star(&self, p: usize) -> Result<Self> {
        if !self.has_vertex(p) {
            return Err(TwdError::UnknownVertex(p));
        }
        Ok(Self::from_simplices(self.cofaces_of_vertex(p).cloned()))
    }

    /// Closure of the simplices with a vertex in `verts`.
    pub fn star_of_set(&self, verts: &[usize]) -> Self {
        let mut k = Self::new();
        for &v in verts {
            for s in self.cofaces_of_vertex(v) {
                k.insert_with_closure(s);
            }
        }
        k
    }

    /// Star of the star of `p`.
    pub fn star2(&self, p: usize) -> Result<Self> {
        let s = self.star(p)?;
        Ok(self.star_of_set(&s.vertices()))
    }

    /// Simplices `t` with `p` not in `t` and `t + p` in the complex.
    pub fn link(&self, p: usize) -> Result<Self> {
        if !self.has_vertex(p) {
            return Err(TwdError::UnknownVertex(p));
        }
        let mut k = Self::new();
        for s in self.cofaces_of_vertex(p) {
            if let Some(t) = s.without(p) {
                k.insert_one(t);
            }
        }
        Ok(k)
    }

    /// Pure of dimension `k` with every `(k-1)`-simplex in exactly two `k`-simplices.
    pub fn is_pseudomanifold(&self, k: usize) -> bool {
        if self.is_empty() || self.dim() != Some(k) {
            return false;
        }
        let mut facet_counts: BTreeMap<Simplex, usize> = BTreeMap::new();
        for s in self.of_dim(k) {
            for f in s.facets() {
                *facet_counts.entry(f).or_default() += 1;
            }
        }
        if k > 0 {
            for f in self.of_dim(k - 1) {
                if facet_counts.get(f).copied().unwrap_or(0) != 2 {
                    return false;
                }
            }
        }
        // Purity: every simplex lies in some k-simplex.
        self.simplices.iter().all(|s| {
            s.dim() == k
                || self
                    .cofaces_of_vertex(s.vertices()[0])
                    .any(|t| t.dim() == k && s.is_face_of(t))
        })
    }

    /// Whether the link of `p` is a `(d-1)`-pseudomanifold; false for absent vertices.
    pub fn has_good_link(&self, p: usize, d: usize) -> bool {
        match self.link(p) {
            Ok(l) => d >= 1 && l.is_pseudomanifold(d - 1),
            Err(_) => false,
        }
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.simplices
            .iter()
            .map(|s| if s.dim() % 2 == 0 { 1 } else { -1 })
            .sum()
    }

    /// Sub-complex of simplices all of whose vertices satisfy `keep`.
    pub fn induced(&self, keep: impl Fn(usize) -> bool) -> Self {
        let mut k = Self::new();
        for s in &self.simplices {
            if s.vertices().iter().all(|&v| keep(v)) {
                k.insert_one(s.clone());
            }
        }
        k
    }
}

/// Freudenthal triangulation of the `d`-torus on an `n^d` vertex lattice.
///
/// Vertex `(i_1, .., i_d)` has index `sum i_k n^(k-1)`; needs `n >= 3`.
pub fn lattice_triangulation(n: usize, d: usize) -> SimplicialComplex {
    assert!(n >= 3 && d >= 1);
    let total = n.pow(d as u32);
    let index = |c: &[usize]| c.iter().rev().fold(0usize, |a, &x| a * n + x % n);
    let mut perms: Vec<Vec<usize>> = vec![vec![]];
    for k in 0..d {
        let mut next = Vec::new();
        for p in &perms {
            for pos in 0..=p.len() {
                let mut q = p.clone();
                q.insert(pos, k);
                next.push(q);
            }
        }
        perms = next;
    }
    let mut k = SimplicialComplex::new();
    for b in 0..total {
        let mut base = vec![0usize; d];
        let mut r = b;
        for c in base.iter_mut() {
            *c = r % n;
            r /= n;
        }
        for p in &perms {
            let mut cur = base.clone();
            let mut verts = vec![index(&cur)];
            for &axis in p {
                cur[axis] += 1;
                verts.push(index(&cur));
            }
            k.insert_with_closure(&Simplex::new(verts).expect("distinct lattice vertices"));
        }
    }
    k
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &[usize]) -> Simplex {
        Simplex::new(v.to_vec()).unwrap()
    }

    #[test]
    fn closure_inserts_faces() {
        let k = SimplicialComplex::from_simplices([s(&[0, 1, 2])]);
        assert_eq!(k.len(), 7);
        assert_eq!(k.euler_characteristic(), 1);
        assert_eq!(k.maximal_simplices(), vec![s(&[0, 1, 2])]);
    }

    #[test]
    fn simplex_rejects_repeats() {
        assert!(Simplex::new(vec![1, 1]).is_err());
        assert!(Simplex::new(vec![]).is_err());
        assert_eq!(s(&[3, 1, 2]).vertices(), &[1, 2, 3]);
    }

    #[test]
    fn hexagon_wheel_has_good_center_link() {
        let tris: Vec<Simplex> = (0..6).map(|i| s(&[0, 1 + i, 1 + (i + 1) % 6])).collect();
        let k = SimplicialComplex::from_simplices(tris);
        let link = k.link(0).unwrap();
        assert_eq!(link.count_dim(1), 6);
        assert_eq!(link.count_dim(0), 6);
        assert!(k.has_good_link(0, 2));
        assert!(!k.has_good_link(1, 2));
        assert!(!k.has_good_link(99, 2));
        assert!(k.link(99).is_err());
        assert!(k.star(99).is_err());
        assert_eq!(k.star(0).unwrap(), k);
    }

    #[test]
    fn lattice_tori_are_closed_pseudomanifolds() {
        let k2 = lattice_triangulation(4, 2);
        assert_eq!(k2.count_dim(2), 32);
        assert_eq!(k2.euler_characteristic(), 0);
        assert!(k2.is_pseudomanifold(2));
        assert!((0..16).all(|p| k2.has_good_link(p, 2)));
        let k3 = lattice_triangulation(3, 3);
        assert_eq!(k3.count_dim(3), 6 * 27);
        assert_eq!(k3.euler_characteristic(), 0);
        assert!((0..27).all(|p| k3.has_good_link(p, 3)));
        let link = k3.link(0).unwrap();
        assert_eq!(link.euler_characteristic(), 2);
    }

    #[test]
    fn pinched_tori_are_pseudomanifold_but_pinch_link_is_not_a_sphere() {
        let a = lattice_triangulation(3, 2);
        let b = lattice_triangulation(3, 2);
        let mut k = a.clone();
        // Second torus on vertices 9..17, with its vertex 0 glued to vertex 0.
        for t in b.of_dim(2) {
            let v: Vec<usize> = t.vertices().iter().map(|&x| if x == 0 { 0 } else { x + 9 }).collect();
            k.insert_with_closure(&Simplex::new(v).unwrap());
        }
        assert!(k.is_pseudomanifold(2));
        let link = k.link(0).unwrap();
        assert!(link.is_pseudomanifold(1));
        assert_eq!(link.count_dim(0), 12);
        assert_eq!(k.euler_characteristic(), -1);
    }

    #[test]
    fn bowtie_is_not_a_pseudomanifold() {
        let k = SimplicialComplex::from_simplices([s(&[0, 1, 2]), s(&[0, 3, 4])]);
        assert!(!k.is_pseudomanifold(2));
        assert!(!SimplicialComplex::new().is_pseudomanifold(1));
        let mixed = SimplicialComplex::from_simplices([s(&[0, 1, 2]), s(&[2, 3])]);
        assert!(!mixed.is_pseudomanifold(2));
    }

    #[test]
    fn star2_grows_by_one_ring() {
        let k = lattice_triangulation(5, 2);
        let s1 = k.star(0).unwrap();
        let s2 = k.star2(0).unwrap();
        assert_eq!(s1.vertices().len(), 7);
        assert!(s2.vertices().len() > 7);
        assert!(s1.iter().all(|t| s2.contains(t)));
    }
}
