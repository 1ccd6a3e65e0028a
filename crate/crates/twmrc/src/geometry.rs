//! Exact geometry for two-dimensional rate regions.
//!
//! Every region handled here is a finite union of axis-aligned "pentagons"
//! `{(R1, RM) >= 0 : R1 <= a, RM <= b, R1 + RM <= c}`. All boundary slopes
//! are `0` or `-1`, so frontiers are computed exactly as upper envelopes of
//! piecewise-linear height functions — no sampling, no approximation.

use crate::error::{Error, Result};

/// Tolerance used by default for geometric comparisons.
pub const DEFAULT_TOL: f64 = 1e-9;

/// One rate pentagon, described by its three caps. Any cap may be `+inf`
/// (absent constraint); caps are validated to be nonnegative and not NaN.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RatePentagon {
    cap_r1: f64,
    cap_rm: f64,
    cap_sum: f64,
}

impl RatePentagon {
    pub fn new(cap_r1: f64, cap_rm: f64, cap_sum: f64) -> Result<RatePentagon> {
        for cap in [cap_r1, cap_rm, cap_sum] {
            if cap.is_nan() || cap < 0.0 {
                return Err(Error::InvalidModel(format!(
                    "pentagon caps must be nonnegative, got ({cap_r1}, {cap_rm}, {cap_sum})"
                )));
            }
        }
        Ok(RatePentagon { cap_r1, cap_rm, cap_sum })
    }

    /// A pentagon with no constraints at all (used as the intersection seed).
    pub fn unbounded() -> RatePentagon {
        RatePentagon { cap_r1: f64::INFINITY, cap_rm: f64::INFINITY, cap_sum: f64::INFINITY }
    }

    pub fn cap_r1(&self) -> f64 {
        self.cap_r1
    }

    pub fn cap_rm(&self) -> f64 {
        self.cap_rm
    }

    pub fn cap_sum(&self) -> f64 {
        self.cap_sum
    }

    pub fn caps(&self) -> [f64; 3] {
        [self.cap_r1, self.cap_rm, self.cap_sum]
    }

    /// Componentwise minimum: exactly the intersection of the two regions.
    pub fn intersect(&self, other: &RatePentagon) -> RatePentagon {
        RatePentagon {
            cap_r1: self.cap_r1.min(other.cap_r1),
            cap_rm: self.cap_rm.min(other.cap_rm),
            cap_sum: self.cap_sum.min(other.cap_sum),
        }
    }

    pub fn contains(&self, r1: f64, rm: f64, tol: f64) -> bool {
        r1 >= -tol
            && rm >= -tol
            && r1 <= self.cap_r1 + tol
            && rm <= self.cap_rm + tol
            && r1 + rm <= self.cap_sum + tol
    }

    /// Largest achievable `R1` (the x-extent of the pentagon).
    pub fn max_r1(&self) -> f64 {
        self.cap_r1.min(self.cap_sum)
    }

    /// Largest achievable `RM`.
    pub fn max_rm(&self) -> f64 {
        self.cap_rm.min(self.cap_sum)
    }

    /// Height of the pentagon above `r1`, or `None` beyond its x-extent.
    pub fn rm_at(&self, r1: f64) -> Option<f64> {
        if r1 < 0.0 || r1 > self.max_r1() {
            return None;
        }
        Some(self.cap_rm.min(self.cap_sum - r1))
    }

    /// Exact area; errors when the pentagon is unbounded.
    pub fn area(&self) -> Result<f64> {
        let a = self.max_r1();
        let b = self.max_rm();
        if !a.is_finite() || !b.is_finite() {
            return Err(Error::DegenerateRegion);
        }
        let cut = if self.cap_sum.is_finite() { (a + b - self.cap_sum).max(0.0) } else { 0.0 };
        Ok(a * b - 0.5 * cut * cut)
    }

    /// Boundary vertices counterclockwise from the origin, duplicates merged.
    pub fn polygon_vertices(&self) -> Result<Vec<(f64, f64)>> {
        let a = self.max_r1();
        let b = self.max_rm();
        if !a.is_finite() || !b.is_finite() {
            return Err(Error::DegenerateRegion);
        }
        let mut verts = vec![(0.0, 0.0), (a, 0.0)];
        if self.cap_sum.is_finite() && a + b > self.cap_sum {
            verts.push((a, self.cap_sum - a));
            verts.push((self.cap_sum - b, b));
        } else {
            verts.push((a, b));
        }
        verts.push((0.0, b));
        verts.dedup_by(|p, q| p == q);
        if verts.len() > 1 && verts.first() == verts.last() {
            verts.pop();
        }
        Ok(verts)
    }

    /// The Pareto frontier of this pentagon alone.
    pub fn frontier(&self) -> Result<Frontier> {
        upper_envelope(std::slice::from_ref(self))
    }
}

/// A Pareto frontier: vertices with `r1` ascending and `rm` non-increasing.
/// A vertical drop appears as two vertices sharing the same `r1`.
pub type Frontier = Vec<(f64, f64)>;

/// Height of a frontier above `r1` (`None` beyond its extent). At a vertical
/// drop the upper value is returned.
pub fn frontier_value(frontier: &Frontier, r1: f64) -> Option<f64> {
    let last = frontier.last()?;
    if r1 < 0.0 || r1 > last.0 {
        return None;
    }
    if frontier.len() == 1 {
        return Some(frontier[0].1);
    }
    for w in frontier.windows(2) {
        let (x0, y0) = w[0];
        let (x1, y1) = w[1];
        if r1 >= x0 && r1 <= x1 {
            if x1 > x0 {
                return Some(y0 + (y1 - y0) * (r1 - x0) / (x1 - x0));
            }
            return Some(y0.max(y1));
        }
    }
    Some(last.1)
}

/// Area between a frontier and the axes (exact for piecewise-linear curves).
pub fn area_under(frontier: &Frontier) -> f64 {
    frontier
        .windows(2)
        .map(|w| (w[1].0 - w[0].0) * 0.5 * (w[0].1 + w[1].1))
        .sum()
}

/// Exact upper envelope of a set of pentagons.
///
/// Each pentagon contributes the non-increasing height `min(b, c - x)` on
/// `[0, min(a, c)]`. Candidate breakpoints are all domain ends, knees, and
/// pairwise flat/diagonal crossings; between consecutive candidates the
/// envelope coincides with a single pentagon's height line.
pub fn upper_envelope(pentagons: &[RatePentagon]) -> Result<Frontier> {
    if pentagons.is_empty() {
        return Err(Error::DegenerateRegion);
    }
    let extents: Vec<f64> = pentagons.iter().map(|p| p.max_r1()).collect();
    let heights: Vec<f64> = pentagons.iter().map(|p| p.max_rm()).collect();
    if extents.iter().chain(&heights).any(|v| !v.is_finite()) {
        return Err(Error::DegenerateRegion);
    }
    let xmax = extents.iter().copied().fold(0.0, f64::max);

    let mut candidates = vec![0.0, xmax];
    for (k, p) in pentagons.iter().enumerate() {
        candidates.push(extents[k]);
        if p.cap_sum.is_finite() {
            let knee = p.cap_sum - p.cap_rm;
            if knee > 0.0 && knee < extents[k] {
                candidates.push(knee);
            }
            // Crossings of this diagonal with every flat level.
            for &flat in &heights {
                let x = p.cap_sum - flat;
                if x > 0.0 && x < extents[k] {
                    candidates.push(x);
                }
            }
        }
    }
    candidates.retain(|&x| (0.0..=xmax).contains(&x));
    candidates.sort_by(|a, b| a.partial_cmp(b).unwrap());
    candidates.dedup();

    let height_at = |x: f64| -> f64 {
        pentagons
            .iter()
            .zip(&extents)
            .filter(|&(_, &e)| x <= e)
            .map(|(p, _)| p.cap_rm.min(p.cap_sum - x))
            .fold(f64::NEG_INFINITY, f64::max)
    };

    let mut verts: Frontier = vec![(0.0, height_at(0.0))];
    for w in candidates.windows(2) {
        let (xl, xr) = (w[0], w[1]);
        if xr <= xl {
            continue;
        }
        let mid = 0.5 * (xl + xr);
        // The winning pentagon in the open interval; ties are equal lines.
        let (best, _) = pentagons
            .iter()
            .zip(&extents)
            .filter(|&(_, &e)| mid <= e)
            .map(|(p, _)| (p, p.cap_rm.min(p.cap_sum - mid)))
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .expect("interval inside some pentagon");
        let vl = best.cap_rm.min(best.cap_sum - xl);
        let vr = best.cap_rm.min(best.cap_sum - xr);
        let last = *verts.last().unwrap();
        // Emit a vertical-drop vertex only for genuine discontinuities;
        // sub-1e-12 mismatches are handoff noise between equal lines.
        let scale = last.1.abs().max(vl.abs()).max(1.0);
        if (last.1 - vl).abs() > 1e-12 * scale {
            verts.push((xl, vl));
        }
        verts.push((xr, vr));
    }

    // Merge exact duplicates and collinear interior vertices.
    let mut merged: Frontier = Vec::with_capacity(verts.len());
    for v in verts {
        if merged.last() == Some(&v) {
            continue;
        }
        while merged.len() >= 2 {
            let a = merged[merged.len() - 2];
            let b = merged[merged.len() - 1];
            let cross = (b.0 - a.0) * (v.1 - a.1) - (b.1 - a.1) * (v.0 - a.0);
            let scale = (v.0 - a.0).abs().max((v.1 - a.1).abs()).max(1.0);
            if cross.abs() <= 1e-14 * scale {
                merged.pop();
            } else {
                break;
            }
        }
        merged.push(v);
    }
    Ok(merged)
}

/// A union of pentagons with its frontier precomputed.
#[derive(Clone, Debug, PartialEq)]
pub struct PentagonUnion {
    members: Vec<RatePentagon>,
    frontier: Frontier,
}

impl PentagonUnion {
    pub fn new(members: Vec<RatePentagon>) -> Result<PentagonUnion> {
        let frontier = upper_envelope(&members)?;
        Ok(PentagonUnion { members, frontier })
    }

    pub fn members(&self) -> &[RatePentagon] {
        &self.members
    }

    pub fn frontier(&self) -> &Frontier {
        &self.frontier
    }

    pub fn contains(&self, r1: f64, rm: f64, tol: f64) -> bool {
        self.members.iter().any(|p| p.contains(r1, rm, tol))
    }

    pub fn max_r1(&self) -> f64 {
        self.frontier.last().map_or(0.0, |v| v.0)
    }

    pub fn max_rm(&self) -> f64 {
        self.frontier.first().map_or(0.0, |v| v.1)
    }

    pub fn area(&self) -> f64 {
        area_under(&self.frontier)
    }

    pub fn height_at(&self, r1: f64) -> Option<f64> {
        frontier_value(&self.frontier, r1)
    }

    /// Frontier-level equality: identical extent and identical height at every
    /// breakpoint of either region, all within `tol`.
    pub fn equals(&self, other: &PentagonUnion, tol: f64) -> bool {
        if (self.max_r1() - other.max_r1()).abs() > tol {
            return false;
        }
        let limit = self.max_r1().min(other.max_r1());
        let xs = self
            .frontier
            .iter()
            .chain(other.frontier.iter())
            .map(|v| v.0.min(limit))
            .collect::<Vec<_>>();
        xs.iter().all(|&x| {
            match (frontier_value(&self.frontier, x), frontier_value(&other.frontier, x)) {
                (Some(a), Some(b)) => (a - b).abs() <= tol,
                _ => false,
            }
        })
    }
}

/// The least concave majorant of a frontier — the time-sharing hull of the
/// region beneath it. Purely a post-processing convenience.
pub fn concave_hull(frontier: &Frontier) -> Frontier {
    let mut hull: Frontier = Vec::with_capacity(frontier.len());
    for &v in frontier {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            // Drop b when it lies on or below the chord a -> v.
            let cross = (b.0 - a.0) * (v.1 - a.1) - (b.1 - a.1) * (v.0 - a.0);
            if cross >= -1e-15 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(v);
    }
    hull
}
