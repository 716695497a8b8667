use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::search::{search_witness, Cert, SearchStats};
use crate::complex::{Simplex, SimplicialComplex};
use crate::error::{Result, TwdError};
use crate::torus::{LandmarkSet, WitnessGrid};

/// Witness complex over a grid, kept up to date as landmarks move.
///
/// Every candidate simplex carries the certificate of its last search; a move only
/// re-searches the simplices whose certificate it touches.
#[derive(Clone, Debug)]
pub struct WitnessBuilder {
    pub grid: WitnessGrid,
    pub k_max: usize,
    margin: i64,
    edge_r2: i64,
    certs: HashMap<Simplex, Cert>,
    complex: SimplicialComplex,
    pub stats: SearchStats,
}

impl WitnessBuilder {
    pub fn new(ls: &LandmarkSet, grid: WitnessGrid, k_max: usize) -> Result<Self> {
        if k_max > ls.dim() {
            return Err(TwdError::Config(format!("k_max={k_max} exceeds d={}", ls.dim())));
        }
        if grid.cfg != ls.cfg {
            return Err(TwdError::Config("grid and landmarks use different precision".into()));
        }
        // Witnesses lie within the covering radius of their nearest vertex, and witnessed
        // edges are shorter than twice that radius.
        let cov = ls.covering_bound();
        let margin = ls.cfg.to_units_ceil(cov) + 1;
        let edge_r2 = (2 * margin) * (2 * margin);
        Ok(Self {
            grid,
            k_max,
            margin,
            edge_r2,
            certs: HashMap::new(),
            complex: SimplicialComplex::new(),
            stats: SearchStats::default(),
        })
    }

    pub fn complex(&self) -> &SimplicialComplex {
        &self.complex
    }

    /// Rebuilds from scratch.
    pub fn build(&mut self, ls: &LandmarkSet) -> Result<&SimplicialComplex> {
        self.certs.clear();
        self.assemble(ls)
    }

    /// Brings the complex up to date after the landmarks in `moved` changed position.
    pub fn update(&mut self, ls: &LandmarkSet, moved: &[usize]) -> Result<&SimplicialComplex> {
        if moved.is_empty() && !self.complex.is_empty() {
            return Ok(&self.complex);
        }
        self.certs.retain(|s, c| c.survives(s, ls, moved));
        self.assemble(ls)
    }

    /// Simplices of the complex witnessed only with distance ties.
    pub fn tie_only(&self) -> Vec<Simplex> {
        self.complex
            .iter()
            .filter(|s| matches!(self.certs.get(*s), Some(Cert::Witnessed { strict: false, .. })))
            .cloned()
            .collect()
    }

    fn witnessed(&mut self, ls: &LandmarkSet, s: &Simplex) -> Result<bool> {
        if let Some(c) = self.certs.get(s) {
            return Ok(c.witnessed());
        }
        let c = search_witness(ls, s, self.grid.side_units(), self.margin, &mut self.stats)?;
        let w = c.witnessed();
        self.certs.insert(s.clone(), c);
        Ok(w)
    }

    fn assemble(&mut self, ls: &LandmarkSet) -> Result<&SimplicialComplex> {
        let n = ls.len();
        let mut k = SimplicialComplex::new();
        let mut layer: BTreeSet<Simplex> = BTreeSet::new();
        for v in 0..n {
            let s = Simplex::vertex(v);
            if self.witnessed(ls, &s)? {
                k.insert_unchecked(s.clone());
                layer.insert(s);
            }
        }
        let mut adj: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
        if self.k_max >= 1 {
            let mut next = BTreeSet::new();
            for v in layer.iter().map(|s| s.vertices()[0]).collect::<Vec<_>>() {
                for u in ls.within_sq(&ls.point(v).coords, self.edge_r2) {
                    if u <= v || !k.contains(&Simplex::vertex(u)) {
                        continue;
                    }
                    let e = Simplex::from_sorted(&[v, u]);
                    if self.witnessed(ls, &e)? {
                        adj.entry(v).or_default().insert(u);
                        adj.entry(u).or_default().insert(v);
                        k.insert_unchecked(e.clone());
                        next.insert(e);
                    }
                }
            }
            layer = next;
        }
        for _dim in 2..=self.k_max {
            let mut next = BTreeSet::new();
            for s in &layer {
                let vs = s.vertices();
                let last = *vs.last().unwrap();
                let Some(cands) = adj.get(&vs[0]) else { continue };
                for &u in cands.range(last + 1..) {
                    if !vs[1..].iter().all(|v| adj.get(v).is_some_and(|a| a.contains(&u))) {
                        continue;
                    }
                    let t = s.with(u);
                    if !t.facets().iter().all(|f| layer.contains(f)) {
                        continue;
                    }
                    if self.witnessed(ls, &t)? {
                        next.insert(t);
                    }
                }
            }
            for t in &next {
                k.insert_unchecked(t.clone());
            }
            layer = next;
        }
        self.complex = k;
        Ok(&self.complex)
    }
}

/// Witness complex of the current landmark positions over all centers of `grid`.
pub fn build_witness_complex(ls: &LandmarkSet, grid: &WitnessGrid, k_max: usize) -> Result<SimplicialComplex> {
    let mut b = WitnessBuilder::new(ls, *grid, k_max)?;
    b.build(ls)?;
    Ok(b.complex)
}

/// Incremental form: updates `builder` for the landmarks in `moved` and returns the complex.
pub fn update_witness_complex(
    builder: &mut WitnessBuilder,
    ls: &LandmarkSet,
    moved: &[usize],
) -> Result<SimplicialComplex> {
    Ok(builder.update(ls, moved)?.clone())
}
