use std::collections::BTreeSet;

use crate::complex::{Simplex, SimplicialComplex};
use crate::torus::{LandmarkSet, TorusPoint};

/// Landmarks nearest to one witness, grouped into classes of equal distance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessRecord {
    pub witness: TorusPoint,
    /// `(squared distance, landmarks at that distance)` in increasing distance.
    pub groups: Vec<(i64, Vec<usize>)>,
}

impl WitnessRecord {
    /// The nearest `d + 2` landmarks plus everything tied with the last of them.
    pub fn new(ls: &LandmarkSet, w: &TorusPoint) -> Self {
        let near = ls.nearest_with_ties(&w.coords, ls.dim() + 2);
        let mut groups: Vec<(i64, Vec<usize>)> = Vec::new();
        for (s, i) in near {
            match groups.last_mut() {
                Some((t, g)) if *t == s => g.push(i),
                _ => groups.push((s, vec![i])),
            }
        }
        Self { witness: w.clone(), groups }
    }

    pub fn horizon(&self) -> usize {
        self.groups.iter().map(|g| g.1.len()).sum()
    }

    pub fn has_ties(&self) -> bool {
        self.groups.iter().any(|g| g.1.len() > 1)
    }
}

/// Simplices with at most `k_max + 1` vertices whose vertices are all no farther from
/// the witness than any other landmark: a prefix of whole groups plus any nonempty
/// subset of the next group.
pub fn witnessed_simplices(rec: &WitnessRecord, k_max: usize) -> Vec<Simplex> {
    let max_len = k_max + 1;
    let mut out = Vec::new();
    let mut prefix: Vec<usize> = Vec::new();
    for (_, group) in &rec.groups {
        if prefix.len() >= max_len {
            break;
        }
        let room = max_len - prefix.len();
        let g = group.len();
        for mask in 1usize..1 << g {
            if (mask.count_ones() as usize) > room {
                continue;
            }
            let mut v = prefix.clone();
            v.extend((0..g).filter(|i| mask >> i & 1 == 1).map(|i| group[i]));
            out.push(Simplex::new(v).expect("distinct landmarks"));
        }
        prefix.extend_from_slice(group);
    }
    out
}

/// Witness complex over an explicit witness list: a simplex is kept when it is
/// witnessed and all its facets are kept.
pub fn witness_complex_from_points<'a, I>(ls: &LandmarkSet, witnesses: I, k_max: usize) -> SimplicialComplex
where
    I: IntoIterator<Item = &'a TorusPoint>,
{
    let mut witnessed: BTreeSet<Simplex> = BTreeSet::new();
    for w in witnesses {
        let rec = WitnessRecord::new(ls, w);
        witnessed.extend(witnessed_simplices(&rec, k_max));
    }
    let mut k = SimplicialComplex::new();
    for dim in 0..=k_max {
        for s in witnessed.iter().filter(|s| s.dim() == dim) {
            if s.facets().iter().all(|f| k.contains(f)) {
                k.insert_unchecked(s.clone());
            }
        }
    }
    k
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::torus::{sq_dist, PrecisionConfig};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rec(groups: Vec<(i64, Vec<usize>)>) -> WitnessRecord {
        let cfg = PrecisionConfig::new(2, 10).unwrap();
        WitnessRecord { witness: TorusPoint::new(&cfg, vec![0, 0]), groups }
    }

    #[test]
    fn prefixes_without_ties() {
        let r = rec(vec![(1, vec![4]), (2, vec![2]), (3, vec![7]), (5, vec![1])]);
        let s = witnessed_simplices(&r, 2);
        assert_eq!(
            s,
            vec![
                Simplex::new(vec![4]).unwrap(),
                Simplex::new(vec![2, 4]).unwrap(),
                Simplex::new(vec![2, 4, 7]).unwrap()
            ]
        );
    }

    #[test]
    fn tie_group_expands() {
        // c = 0 nearest, a = 1 and b = 2 tied next.
        let r = rec(vec![(1, vec![0]), (4, vec![1, 2]), (9, vec![3])]);
        let s = witnessed_simplices(&r, 2);
        let edges: Vec<&Simplex> = s.iter().filter(|x| x.dim() == 1).collect();
        assert_eq!(edges, vec![&Simplex::new(vec![0, 1]).unwrap(), &Simplex::new(vec![0, 2]).unwrap()]);
        assert!(s.contains(&Simplex::new(vec![0, 1, 2]).unwrap()));
        assert_eq!(s.len(), 4);
    }

    #[test]
    fn matches_definition_by_subset_enumeration() {
        let cfg = PrecisionConfig::new(2, 6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            // Coarse coordinates make ties common.
            let mut pts: Vec<TorusPoint> = Vec::new();
            while pts.len() < 8 {
                let p = TorusPoint::new(&cfg, vec![rng.gen_range(0..8) * 8, rng.gen_range(0..8) * 8]);
                if !pts.contains(&p) {
                    pts.push(p);
                }
            }
            let ls = LandmarkSet::new(cfg, pts.clone(), 0.25, 0.1).unwrap();
            let w = TorusPoint::new(&cfg, vec![rng.gen_range(0..64), rng.gen_range(0..64)]);
            let got: BTreeSet<Simplex> = witnessed_simplices(&WitnessRecord::new(&ls, &w), 2).into_iter().collect();
            let mut want = BTreeSet::new();
            for mask in 1usize..1 << 8 {
                if mask.count_ones() > 3 {
                    continue;
                }
                let inside: Vec<usize> = (0..8).filter(|i| mask >> i & 1 == 1).collect();
                let far = inside.iter().map(|&i| sq_dist(&w, &pts[i], &cfg)).max().unwrap();
                let ok = (0..8)
                    .filter(|i| mask >> i & 1 == 0)
                    .all(|q| sq_dist(&w, &pts[q], &cfg) >= far);
                if ok {
                    want.insert(Simplex::new(inside).unwrap());
                }
            }
            assert_eq!(got, want);
        }
    }
}
