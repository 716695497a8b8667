use super::point::{PrecisionConfig, TorusPoint};
use super::predicates::sq_dist_raw;

/// Uniform bucket grid over the torus supporting exact squared-radius queries.
#[derive(Clone, Debug)]
pub struct BucketGrid {
    cfg: PrecisionConfig,
    per_axis: i64,
    buckets: Vec<Vec<usize>>,
    coords: Vec<Vec<i64>>,
}

impl BucketGrid {
    /// Buckets of side at least `cell` (real units), capped near a few points per bucket.
    pub fn new(cfg: PrecisionConfig, points: &[TorusPoint], cell: f64) -> Self {
        let d = cfg.dim as i32;
        let by_side = if cell > 0.0 { (1.0 / cell).floor() as i64 } else { 1 };
        let target = 4 * points.len().max(1) as i64;
        let mut by_count = 1i64;
        while (by_count + 1).pow(d as u32) <= target {
            by_count += 1;
        }
        let per_axis = by_side.min(by_count).clamp(1, 1 << 10);
        let total = (per_axis as usize).pow(d as u32);
        let mut g = Self {
            cfg,
            per_axis,
            buckets: vec![Vec::new(); total],
            coords: points.iter().map(|p| p.coords.clone()).collect(),
        };
        for i in 0..points.len() {
            let b = g.bucket_of(&g.coords[i].clone());
            g.buckets[b].push(i);
        }
        g
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    fn axis_cell(&self, c: i64) -> i64 {
        ((c.rem_euclid(self.cfg.modulus()) as i128 * self.per_axis as i128) >> self.cfg.q) as i64
    }

    fn bucket_of(&self, c: &[i64]) -> usize {
        let mut b = 0usize;
        for &x in c.iter().rev() {
            b = b * self.per_axis as usize + self.axis_cell(x) as usize;
        }
        b
    }

    /// Moves point `i` to a new position.
    pub fn update(&mut self, i: usize, p: &TorusPoint) {
        let old = self.bucket_of(&self.coords[i].clone());
        let bucket = &mut self.buckets[old];
        if let Some(pos) = bucket.iter().position(|&j| j == i) {
            bucket.swap_remove(pos);
        }
        self.coords[i] = p.coords.clone();
        let new = self.bucket_of(&p.coords);
        self.buckets[new].push(i);
    }

    /// Calls `f(index, sq_dist)` for every point with `sq_dist(center, p) <= r2`.
    pub fn for_each_within(&self, center: &[i64], r2: i64, mut f: impl FnMut(usize, i64)) {
        if r2 < 0 {
            return;
        }
        let d = self.cfg.dim;
        let r = (r2 as u64).isqrt() as i64 + 1;
        let mut ranges: Vec<(i64, i64)> = Vec::with_capacity(d);
        for &c in center.iter().take(d) {
            let a = ((c - r) as i128 * self.per_axis as i128).div_euclid(1i128 << self.cfg.q) as i64;
            let b = ((c + r) as i128 * self.per_axis as i128).div_euclid(1i128 << self.cfg.q) as i64;
            if b - a + 1 >= self.per_axis {
                ranges.push((0, self.per_axis - 1));
            } else {
                ranges.push((a, b));
            }
        }
        let mut idx: Vec<i64> = ranges.iter().map(|r| r.0).collect();
        loop {
            let mut b = 0usize;
            for k in (0..d).rev() {
                b = b * self.per_axis as usize + idx[k].rem_euclid(self.per_axis) as usize;
            }
            for &i in &self.buckets[b] {
                let s = sq_dist_raw(center, &self.coords[i], &self.cfg);
                if s <= r2 {
                    f(i, s);
                }
            }
            let mut k = 0;
            loop {
                if k == d {
                    return;
                }
                idx[k] += 1;
                if idx[k] <= ranges[k].1 {
                    break;
                }
                idx[k] = ranges[k].0;
                k += 1;
            }
        }
    }

    /// Sorted indices with `sq_dist(center, p) <= r2`.
    pub fn within(&self, center: &[i64], r2: i64) -> Vec<usize> {
        let mut out = Vec::new();
        self.for_each_within(center, r2, |i, _| out.push(i));
        out.sort_unstable();
        out
    }

    /// The `k` nearest points plus everything tied with the `k`-th, sorted by distance then index.
    pub fn nearest_with_ties(&self, center: &[i64], k: usize) -> Vec<(i64, usize)> {
        let k = k.min(self.len());
        if k == 0 {
            return Vec::new();
        }
        let m = self.cfg.modulus();
        let diam2 = self.cfg.dim as i64 * self.cfg.half() * self.cfg.half();
        let mut r = (m / self.per_axis).max(1);
        loop {
            let r2 = if r as i128 * r as i128 >= diam2 as i128 { diam2 } else { r * r };
            let mut found: Vec<(i64, usize)> = Vec::new();
            self.for_each_within(center, r2, |i, s| found.push((s, i)));
            if found.len() >= k || r2 == diam2 {
                found.sort_unstable();
                let t = found[k - 1].0;
                found.retain(|e| e.0 <= t);
                return found;
            }
            r *= 2;
        }
    }

    pub fn nearest(&self, center: &[i64]) -> Option<(i64, usize)> {
        self.nearest_with_ties(center, 1).into_iter().next()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn queries_agree_with_linear_scan() {
        let cfg = PrecisionConfig::new(2, 16).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let pts: Vec<TorusPoint> = (0..300)
            .map(|_| TorusPoint::new(&cfg, vec![rng.gen_range(0..1 << 16), rng.gen_range(0..1 << 16)]))
            .collect();
        let mut g = BucketGrid::new(cfg, &pts, 0.05);
        let mut pts = pts;
        for t in 0..200 {
            if t % 3 == 0 {
                let i = rng.gen_range(0..pts.len());
                let np = TorusPoint::new(&cfg, vec![rng.gen_range(0..1 << 16), rng.gen_range(0..1 << 16)]);
                g.update(i, &np);
                pts[i] = np;
            }
            let c = vec![rng.gen_range(0..1 << 16), rng.gen_range(0..1 << 16)];
            let r2: i64 = rng.gen_range(0..(1i64 << 30));
            let want: Vec<usize> = (0..pts.len())
                .filter(|&i| sq_dist_raw(&c, &pts[i].coords, &cfg) <= r2)
                .collect();
            assert_eq!(g.within(&c, r2), want);
            let near = g.nearest_with_ties(&c, 4);
            let mut all: Vec<(i64, usize)> = (0..pts.len())
                .map(|i| (sq_dist_raw(&c, &pts[i].coords, &cfg), i))
                .collect();
            all.sort();
            let t4 = all[3].0;
            all.retain(|e| e.0 <= t4);
            assert_eq!(near, all);
        }
    }
}
