use super::{BinaryMask, Point2};
use crate::error::{Error, Result};

/// Boundary pixels of a mask, ordered by scanline discovery and then by
/// contour following within each traced chain.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgePointSet {
    points: Vec<Point2>,
    contour: Vec<u32>,
}

impl EdgePointSet {
    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    /// Traced chain index of every point.
    pub fn contour_ids(&self) -> &[u32] {
        &self.contour
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Points within `radius` of `c` (inclusive), in set order.
    pub fn within(&self, c: Point2, radius: f64) -> Vec<Point2> {
        let r2 = radius * radius;
        self.points
            .iter()
            .copied()
            .filter(|p| {
                let d = *p - c;
                d.dot(d) <= r2
            })
            .collect()
    }

    /// Nearest edge point to `p`, first in set order on ties.
    pub fn nearest(&self, p: Point2) -> Option<Point2> {
        let mut best: Option<(f64, Point2)> = None;
        for q in &self.points {
            let d = q.distance(p);
            if best.is_none_or(|(bd, _)| d < bd) {
                best = Some((d, *q));
            }
        }
        best.map(|(_, q)| q)
    }

    /// Builds a set from explicit points (used for filtered subsets).
    pub fn from_points(points: Vec<Point2>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptySelection);
        }
        let contour = vec![0; points.len()];
        Ok(Self { points, contour })
    }
}

// East first, then clockwise on screen; 4-neighbours before diagonals so the
// walk prefers thin steps along the boundary.
const WALK: [(i64, i64); 8] = [(1, 0), (0, 1), (-1, 0), (0, -1), (1, 1), (-1, 1), (-1, -1), (1, -1)];

/// Extracts every foreground pixel that has at least one background
/// 8-neighbour (pixels outside the mask count as background).
pub fn extract_edges(mask: &BinaryMask) -> Result<EdgePointSet> {
    if mask.is_empty() {
        return Err(Error::EmptyMask);
    }
    let (w, h) = (mask.width(), mask.height());
    let mut is_edge = vec![false; w * h];
    for (x, y) in mask.foreground() {
        is_edge[y * w + x] = mask.is_boundary(x as i64, y as i64);
    }
    let mut visited = vec![false; w * h];
    let mut points = Vec::new();
    let mut contour = Vec::new();
    let mut chain = 0u32;
    let mut stack: Vec<(i64, i64)> = Vec::new();
    for start in 0..w * h {
        if !is_edge[start] || visited[start] {
            continue;
        }
        visited[start] = true;
        stack.push(((start % w) as i64, (start / w) as i64));
        points.push(Point2::new((start % w) as f64, (start / w) as f64));
        contour.push(chain);
        // Depth-first contour following: step to the first unvisited edge
        // neighbour, backtrack when stuck.
        while let Some(&(x, y)) = stack.last() {
            let next = WALK.iter().map(|(dx, dy)| (x + dx, y + dy)).find(|&(nx, ny)| {
                nx >= 0 && ny >= 0 && (nx as usize) < w && (ny as usize) < h && {
                    let i = ny as usize * w + nx as usize;
                    is_edge[i] && !visited[i]
                }
            });
            match next {
                Some((nx, ny)) => {
                    visited[ny as usize * w + nx as usize] = true;
                    points.push(Point2::new(nx as f64, ny as f64));
                    contour.push(chain);
                    stack.push((nx, ny));
                }
                None => {
                    stack.pop();
                }
            }
        }
        chain += 1;
    }
    Ok(EdgePointSet { points, contour })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disk(n: usize, c: f64, r: f64) -> BinaryMask {
        BinaryMask::from_fn(n, n, |x, y| (x as f64 - c).hypot(y as f64 - c) <= r).unwrap()
    }

    #[test]
    fn isolated_pixel_is_its_own_boundary() {
        let m = BinaryMask::from_fn(8, 8, |x, y| (x, y) == (3, 3)).unwrap();
        let e = extract_edges(&m).unwrap();
        assert_eq!(e.points(), &[Point2::new(3.0, 3.0)]);
    }

    #[test]
    fn square_perimeter() {
        let m = BinaryMask::from_fn(10, 10, |_, _| true).unwrap();
        assert_eq!(extract_edges(&m).unwrap().len(), 36);
        let m = BinaryMask::from_fn(16, 16, |x, y| x < 10 && y < 10).unwrap();
        assert_eq!(extract_edges(&m).unwrap().len(), 36);
    }

    #[test]
    fn empty_mask_errors() {
        let m = BinaryMask::empty(8, 8).unwrap();
        assert!(matches!(extract_edges(&m), Err(Error::EmptyMask)));
    }

    #[test]
    fn disk_boundary_matches_brute_force_count() {
        // Oracle: count cells of the rasterized disk that touch background
        // in their 8-neighbourhood, by direct enumeration.
        let (n, c, r) = (64usize, 30.0, 20.0);
        let inside =
            |x: i64, y: i64| x >= 0 && y >= 0 && (x as usize) < n && (y as usize) < n && (x as f64 - c).hypot(y as f64 - c) <= r;
        let mut oracle = 0;
        for y in 0..n as i64 {
            for x in 0..n as i64 {
                if inside(x, y) && (-1..=1).any(|dy| (-1..=1).any(|dx| !inside(x + dx, y + dy))) {
                    oracle += 1;
                }
            }
        }
        assert_eq!(oracle, 156);
        let e = extract_edges(&disk(n, c, r)).unwrap();
        assert_eq!(e.len(), oracle);
        for p in e.points() {
            let d = p.distance(Point2::new(c, c));
            assert!((d - 19.5).abs() <= 1.0, "{d}");
        }
    }

    #[test]
    fn padding_only_translates() {
        let m = disk(40, 18.0, 9.0);
        let padded = m.padded(60, 55, 7, 11).unwrap();
        let a = extract_edges(&m).unwrap();
        let b = extract_edges(&padded).unwrap();
        let shifted: Vec<Point2> = a.points().iter().map(|p| *p + Point2::new(7.0, 11.0)).collect();
        assert_eq!(shifted, b.points());
    }

    #[test]
    fn every_point_satisfies_boundary_invariant() {
        let m = BinaryMask::from_fn(30, 30, |x, y| (x > 4 && x < 20 && y > 3 && y < 25) && !(x > 8 && x < 14 && y > 10)).unwrap();
        let e = extract_edges(&m).unwrap();
        assert!(!e.is_empty());
        for p in e.points() {
            assert!(m.is_boundary(p.x as i64, p.y as i64));
        }
    }
}
