use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::RegionError;
use crate::matkernel::C64;

pub const DEFAULT_RESOLUTION: usize = 800;

/// Axis-aligned box in the complex plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Rect {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Result<Self, RegionError> {
        let r = Self {
            re_min,
            re_max,
            im_min,
            im_max,
        };
        r.validate()?;
        Ok(r)
    }

    /// Box whose cell centres on an `nx × ny` grid include the real axis
    /// (`ny` odd) or straddle it symmetrically (`ny` even).
    pub fn symmetric(re_min: f64, re_max: f64, half_height: f64) -> Self {
        Self {
            re_min,
            re_max,
            im_min: -half_height,
            im_max: half_height,
        }
    }

    pub fn validate(&self) -> Result<(), RegionError> {
        let ok = [self.re_min, self.re_max, self.im_min, self.im_max]
            .iter()
            .all(|v| v.is_finite())
            && self.re_max > self.re_min
            && self.im_max > self.im_min;
        if ok {
            Ok(())
        } else {
            Err(RegionError::DegenerateBox(*self))
        }
    }

    pub fn contains(&self, z: C64) -> bool {
        z.re >= self.re_min && z.re <= self.re_max && z.im >= self.im_min && z.im <= self.im_max
    }

    pub fn width(&self) -> f64 {
        self.re_max - self.re_min
    }

    pub fn height(&self) -> f64 {
        self.im_max - self.im_min
    }
}

/// Rasterized subset of ℂ; each cell stores membership of its centre.
#[derive(Debug, Clone, PartialEq)]
pub struct Raster {
    rect: Rect,
    nx: usize,
    ny: usize,
    /// Row-major from `im_min` upward: index `iy·nx + ix`.
    mask: Vec<bool>,
}

#[derive(Serialize, Deserialize)]
struct RasterDoc {
    #[serde(rename = "box")]
    rect: Rect,
    nx: usize,
    ny: usize,
    /// Alternating run lengths, starting with a run of `false`.
    rle_mask: Vec<usize>,
}

impl Raster {
    pub fn empty(rect: Rect, nx: usize, ny: usize) -> Result<Self, RegionError> {
        rect.validate()?;
        if nx == 0 || ny == 0 {
            return Err(RegionError::ZeroResolution);
        }
        Ok(Self {
            rect,
            nx,
            ny,
            mask: vec![false; nx * ny],
        })
    }

    /// Evaluates `pred` at every cell centre, in parallel.
    pub fn from_predicate(
        rect: Rect,
        nx: usize,
        ny: usize,
        pred: impl Fn(C64) -> bool + Sync,
    ) -> Result<Self, RegionError> {
        let mut r = Self::empty(rect, nx, ny)?;
        let (dx, dy) = r.cell_size();
        r.mask.par_iter_mut().enumerate().for_each(|(idx, m)| {
            let (ix, iy) = (idx % nx, idx / nx);
            let z = C64::new(
                rect.re_min + (ix as f64 + 0.5) * dx,
                rect.im_min + (iy as f64 + 0.5) * dy,
            );
            *m = pred(z);
        });
        Ok(r)
    }

    pub fn from_mask(rect: Rect, nx: usize, ny: usize, mask: Vec<bool>) -> Result<Self, RegionError> {
        let mut r = Self::empty(rect, nx, ny)?;
        if mask.len() != nx * ny {
            return Err(RegionError::MaskLength {
                expected: nx * ny,
                got: mask.len(),
            });
        }
        r.mask = mask;
        Ok(r)
    }

    pub fn rect(&self) -> Rect {
        self.rect
    }

    pub fn resolution(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn cell_size(&self) -> (f64, f64) {
        (self.rect.width() / self.nx as f64, self.rect.height() / self.ny as f64)
    }

    pub fn cell_diagonal(&self) -> f64 {
        let (dx, dy) = self.cell_size();
        dx.hypot(dy)
    }

    pub fn center(&self, ix: usize, iy: usize) -> C64 {
        let (dx, dy) = self.cell_size();
        C64::new(
            self.rect.re_min + (ix as f64 + 0.5) * dx,
            self.rect.im_min + (iy as f64 + 0.5) * dy,
        )
    }

    pub fn get(&self, ix: usize, iy: usize) -> bool {
        self.mask[iy * self.nx + ix]
    }

    pub fn set(&mut self, ix: usize, iy: usize, value: bool) {
        self.mask[iy * self.nx + ix] = value;
    }

    /// Cell containing `z`, if inside the box.
    pub fn cell_of(&self, z: C64) -> Option<(usize, usize)> {
        if !self.rect.contains(z) {
            return None;
        }
        let (dx, dy) = self.cell_size();
        let ix = (((z.re - self.rect.re_min) / dx).floor() as usize).min(self.nx - 1);
        let iy = (((z.im - self.rect.im_min) / dy).floor() as usize).min(self.ny - 1);
        Some((ix, iy))
    }

    /// Membership of the cell containing `z`; false outside the box.
    pub fn contains(&self, z: C64) -> bool {
        self.cell_of(z).is_some_and(|(ix, iy)| self.get(ix, iy))
    }

    /// Is some member cell centre within `radius` of `z`?
    pub fn near(&self, z: C64, radius: f64) -> bool {
        let (dx, dy) = self.cell_size();
        let ix0 = ((z.re - radius - self.rect.re_min) / dx - 0.5).floor().max(0.0) as usize;
        let iy0 = ((z.im - radius - self.rect.im_min) / dy - 0.5).floor().max(0.0) as usize;
        let ix1 = ((z.re + radius - self.rect.re_min) / dx - 0.5).ceil();
        let iy1 = ((z.im + radius - self.rect.im_min) / dy - 0.5).ceil();
        if ix1 < 0.0 || iy1 < 0.0 {
            return false;
        }
        let ix1 = (ix1 as usize).min(self.nx - 1);
        let iy1 = (iy1 as usize).min(self.ny - 1);
        (iy0..=iy1).any(|iy| (ix0..=ix1).any(|ix| self.get(ix, iy) && (self.center(ix, iy) - z).norm() <= radius))
    }

    pub fn count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.mask.iter().any(|&m| m)
    }

    /// Centres of member cells.
    pub fn points(&self) -> Vec<C64> {
        (0..self.ny)
            .flat_map(|iy| (0..self.nx).map(move |ix| (ix, iy)))
            .filter(|&(ix, iy)| self.get(ix, iy))
            .map(|(ix, iy)| self.center(ix, iy))
            .collect()
    }

    fn check_grid(&self, other: &Raster) -> Result<(), RegionError> {
        if self.rect != other.rect || self.nx != other.nx || self.ny != other.ny {
            return Err(RegionError::GridMismatch);
        }
        Ok(())
    }

    fn zip_with(&self, other: &Raster, f: impl Fn(bool, bool) -> bool) -> Result<Raster, RegionError> {
        self.check_grid(other)?;
        Ok(Raster {
            mask: self.mask.iter().zip(&other.mask).map(|(&a, &b)| f(a, b)).collect(),
            ..self.clone()
        })
    }

    pub fn intersect(&self, other: &Raster) -> Result<Raster, RegionError> {
        self.zip_with(other, |a, b| a && b)
    }

    pub fn union(&self, other: &Raster) -> Result<Raster, RegionError> {
        self.zip_with(other, |a, b| a || b)
    }

    /// Cells of `self` not in `other`.
    pub fn difference(&self, other: &Raster) -> Result<Raster, RegionError> {
        self.zip_with(other, |a, b| a && !b)
    }

    pub fn complement(&self) -> Raster {
        Raster {
            mask: self.mask.iter().map(|&m| !m).collect(),
            ..self.clone()
        }
    }

    /// Morphological dilation by `cells` in the 8-neighbour (square) sense.
    pub fn dilate(&self, cells: usize) -> Raster {
        let mut out = self.clone();
        if cells == 0 {
            return out;
        }
        let (nx, ny) = (self.nx, self.ny);
        let mut rows = vec![false; nx * ny];
        for iy in 0..ny {
            for ix in 0..nx {
                let lo = ix.saturating_sub(cells);
                let hi = (ix + cells).min(nx - 1);
                rows[iy * nx + ix] = (lo..=hi).any(|j| self.mask[iy * nx + j]);
            }
        }
        for iy in 0..ny {
            for ix in 0..nx {
                let lo = iy.saturating_sub(cells);
                let hi = (iy + cells).min(ny - 1);
                out.mask[iy * nx + ix] = (lo..=hi).any(|j| rows[j * nx + ix]);
            }
        }
        out
    }

    /// Member cells with a non-member 4-neighbour or on the box edge.
    pub fn boundary(&self) -> Raster {
        let (nx, ny) = (self.nx, self.ny);
        let mut out = self.clone();
        for iy in 0..ny {
            for ix in 0..nx {
                if !self.get(ix, iy) {
                    continue;
                }
                let edge = ix == 0 || iy == 0 || ix + 1 == nx || iy + 1 == ny;
                let interior = !edge
                    && self.get(ix - 1, iy)
                    && self.get(ix + 1, iy)
                    && self.get(ix, iy - 1)
                    && self.get(ix, iy + 1);
                out.set(ix, iy, !interior);
            }
        }
        out
    }

    /// Squared Euclidean distance from every cell centre to the nearest
    /// member cell centre (exact, separable parabola envelopes).
    pub fn squared_distance_transform(&self) -> Vec<f64> {
        let (nx, ny) = (self.nx, self.ny);
        let (dx, dy) = self.cell_size();
        let mut grid: Vec<f64> = self.mask.iter().map(|&m| if m { 0.0 } else { f64::INFINITY }).collect();
        let mut buf = Vec::new();
        for iy in 0..ny {
            buf.clear();
            buf.extend_from_slice(&grid[iy * nx..(iy + 1) * nx]);
            let row = distance_1d(&buf, dx);
            grid[iy * nx..(iy + 1) * nx].copy_from_slice(&row);
        }
        for ix in 0..nx {
            buf.clear();
            buf.extend((0..ny).map(|iy| grid[iy * nx + ix]));
            let col = distance_1d(&buf, dy);
            for (iy, v) in col.into_iter().enumerate() {
                grid[iy * nx + ix] = v;
            }
        }
        grid
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut runs = Vec::new();
        let mut current = false;
        let mut len = 0usize;
        for &m in &self.mask {
            if m == current {
                len += 1;
            } else {
                runs.push(len);
                current = m;
                len = 1;
            }
        }
        runs.push(len);
        serde_json::to_value(RasterDoc {
            rect: self.rect,
            nx: self.nx,
            ny: self.ny,
            rle_mask: runs,
        })
        .expect("raster document serializes")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Raster, RegionError> {
        let doc: RasterDoc = serde_json::from_value(value.clone()).map_err(|e| RegionError::Parse(e.to_string()))?;
        let mut mask = Vec::with_capacity(doc.nx * doc.ny);
        let mut current = false;
        for run in doc.rle_mask {
            mask.extend(std::iter::repeat(current).take(run));
            current = !current;
        }
        Raster::from_mask(doc.rect, doc.nx, doc.ny, mask)
    }
}

/// `d(p) = min_q (w²(p−q)² + f(q))` over finite `f(q)`.
fn distance_1d(f: &[f64], w: f64) -> Vec<f64> {
    let n = f.len();
    let sites: Vec<usize> = (0..n).filter(|&q| f[q].is_finite()).collect();
    if sites.is_empty() {
        return vec![f64::INFINITY; n];
    }
    let w2 = w * w;
    let g = |q: usize| f[q] / w2;
    let mut v: Vec<usize> = Vec::with_capacity(sites.len());
    let mut z: Vec<f64> = Vec::with_capacity(sites.len() + 1);
    for &q in &sites {
        loop {
            match v.last() {
                None => {
                    v.push(q);
                    z.push(f64::NEG_INFINITY);
                    break;
                }
                Some(&p) => {
                    let (qf, pf) = (q as f64, p as f64);
                    let s = ((g(q) + qf * qf) - (g(p) + pf * pf)) / (2.0 * (qf - pf));
                    if s <= *z.last().unwrap() {
                        v.pop();
                        z.pop();
                    } else {
                        v.push(q);
                        z.push(s);
                        break;
                    }
                }
            }
        }
    }
    let mut out = vec![0.0; n];
    let mut k = 0;
    for (p, o) in out.iter_mut().enumerate() {
        while k + 1 < v.len() && z[k + 1] < p as f64 {
            k += 1;
        }
        let q = v[k];
        let d = p as f64 - q as f64;
        *o = w2 * (d * d + g(q));
    }
    out
}

/// Symmetric Hausdorff distance between the member cell centres of two
/// rasters on the same grid.
pub fn hausdorff(a: &Raster, b: &Raster) -> Result<f64, RegionError> {
    a.check_grid(b)?;
    if a.is_empty() || b.is_empty() {
        return Err(RegionError::EmptyRegion);
    }
    let da = a.squared_distance_transform();
    let db = b.squared_distance_transform();
    let directed = |from: &Raster, to: &[f64]| {
        from.mask
            .iter()
            .zip(to)
            .filter(|(&m, _)| m)
            .map(|(_, &d)| d)
            .fold(0.0, f64::max)
    };
    Ok(directed(a, &db).max(directed(b, &da)).sqrt())
}

/// Hausdorff distance between the member cells of a raster and a finite
/// point set.
pub fn hausdorff_to_points(a: &Raster, points: &[C64]) -> Result<f64, RegionError> {
    if a.is_empty() || points.is_empty() {
        return Err(RegionError::EmptyRegion);
    }
    let cells = a.points();
    let from_cells = cells
        .par_iter()
        .map(|c| super::geometry::point_set_distance(*c, points))
        .reduce(|| 0.0, f64::max);
    let from_points = points
        .iter()
        .map(|p| super::geometry::point_set_distance(*p, &cells))
        .fold(0.0, f64::max);
    Ok(from_cells.max(from_points))
}

/// Cellwise conjunction of two rasters on the same grid.
pub fn raster_intersect(a: &Raster, b: &Raster) -> Result<Raster, RegionError> {
    a.intersect(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn unit_box() -> Rect {
        Rect::new(-1.0, 1.0, -1.0, 1.0).unwrap()
    }

    fn brute_hausdorff(a: &Raster, b: &Raster) -> f64 {
        let pa = a.points();
        let pb = b.points();
        let d = |x: &[C64], y: &[C64]| {
            x.iter()
                .map(|p| y.iter().map(|q| (p - q).norm()).fold(f64::INFINITY, f64::min))
                .fold(0.0, f64::max)
        };
        d(&pa, &pb).max(d(&pb, &pa))
    }

    #[test]
    fn intersection_examples() {
        let x = Raster::from_predicate(unit_box(), 40, 30, |z| z.norm() < 0.7).unwrap();
        assert_eq!(x.intersect(&x).unwrap(), x);
        let empty = Raster::empty(unit_box(), 40, 30).unwrap();
        assert_eq!(x.intersect(&empty).unwrap(), empty);
        let left = Raster::from_predicate(unit_box(), 40, 30, |z| z.re < 0.0).unwrap();
        let upper = Raster::from_predicate(unit_box(), 40, 30, |z| z.im > 0.0).unwrap();
        let quadrant = Raster::from_predicate(unit_box(), 40, 30, |z| z.re < 0.0 && z.im > 0.0).unwrap();
        assert_eq!(left.intersect(&upper).unwrap(), quadrant);
        let other = Raster::empty(unit_box(), 41, 30).unwrap();
        assert!(matches!(x.intersect(&other), Err(RegionError::GridMismatch)));
    }

    #[test]
    fn hausdorff_examples() {
        let x = Raster::from_predicate(unit_box(), 20, 20, |z| z.re > 0.3).unwrap();
        assert_eq!(hausdorff(&x, &x).unwrap(), 0.0);

        let mut a = Raster::empty(unit_box(), 20, 20).unwrap();
        let mut b = a.clone();
        a.set(2, 3, true);
        b.set(7, 15, true);
        let d = (a.center(2, 3) - b.center(7, 15)).norm();
        assert!((hausdorff(&a, &b).unwrap() - d).abs() < 1e-12);

        // [0,1] vs [0,2] on the real axis, step 0.01
        let rect = Rect::new(-0.005, 2.005, -0.005, 0.005).unwrap();
        let i1 = Raster::from_predicate(rect, 201, 1, |z| z.re <= 1.0 + 1e-9).unwrap();
        let i2 = Raster::from_predicate(rect, 201, 1, |z| z.re <= 2.0 + 1e-9).unwrap();
        let h = hausdorff(&i1, &i2).unwrap();
        assert!((h - 1.0).abs() <= 0.01, "{h}");
        assert!((h - brute_hausdorff(&i1, &i2)).abs() < 1e-12);

        assert!(matches!(
            hausdorff(&x, &Raster::empty(unit_box(), 20, 20).unwrap()),
            Err(RegionError::EmptyRegion)
        ));
    }

    #[test]
    fn distance_transform_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let rect = Rect::new(0.0, 3.0, 0.0, 1.0).unwrap();
        for _ in 0..5 {
            let mask: Vec<bool> = (0..24 * 13).map(|_| rng.gen_bool(0.08)).collect();
            let a = Raster::from_mask(rect, 24, 13, mask).unwrap();
            let mask: Vec<bool> = (0..24 * 13).map(|_| rng.gen_bool(0.2)).collect();
            let b = Raster::from_mask(rect, 24, 13, mask).unwrap();
            if a.is_empty() || b.is_empty() {
                continue;
            }
            assert!((hausdorff(&a, &b).unwrap() - brute_hausdorff(&a, &b)).abs() < 1e-12);
        }
    }

    #[test]
    fn json_round_trip() {
        let x = Raster::from_predicate(unit_box(), 17, 9, |z| z.re * z.im > 0.1).unwrap();
        let back = Raster::from_json(&x.to_json()).unwrap();
        assert_eq!(back, x);
        let doc = x.to_json();
        assert!(doc.get("box").is_some() && doc.get("rle_mask").is_some());
    }

    #[test]
    fn dilation_and_neighbourhood() {
        let mut a = Raster::empty(unit_box(), 10, 10).unwrap();
        a.set(5, 5, true);
        assert_eq!(a.dilate(1).count(), 9);
        assert!(a.near(a.center(5, 5) + C64::new(0.05, 0.0), 0.06));
        assert!(!a.near(a.center(5, 5) + C64::new(0.5, 0.0), 0.2));
        assert_eq!(a.boundary().count(), 1);
    }
}
