//! Ordered, periodic, counterclockwise point clouds.

use crate::error::{Error, Result};
use crate::Point;

/// A closed planar curve sampled by an ordered point cloud.
///
/// Adjacency is periodic: the successor of the last point is the first.
/// Construction enforces at least five points, pairwise-distinct positions,
/// and a strictly positive shoelace area (counterclockwise orientation).
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryCurve {
    points: Vec<Point>,
}

pub const MIN_POINTS: usize = 5;

impl BoundaryCurve {
    pub fn new(points: Vec<Point>) -> Result<Self> {
        validate_common(&points)?;
        let area = signed_area(&points);
        if !(area > 0.0) {
            return Err(Error::InvalidCurve(format!(
                "signed area {area:.6e} is not positive (curve must be counterclockwise)"
            )));
        }
        Ok(BoundaryCurve { points })
    }

    /// Accepts an ordered closed curve of either orientation and reverses it
    /// (keeping the first point first) when it runs clockwise.
    pub fn from_ordered(mut points: Vec<Point>) -> Result<Self> {
        validate_common(&points)?;
        if signed_area(&points) < 0.0 {
            reverse_keep_first(&mut points);
        }
        BoundaryCurve::new(points)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn into_points(self) -> Vec<Point> {
        self.points
    }

    pub fn point(&self, i: usize) -> Point {
        self.points[i]
    }

    pub fn next(&self, i: usize) -> usize {
        (i + 1) % self.points.len()
    }

    pub fn prev(&self, i: usize) -> usize {
        (i + self.points.len() - 1) % self.points.len()
    }

    /// Index shifted by `offset` with periodic wrap-around.
    pub fn wrap(&self, i: usize, offset: isize) -> usize {
        let n = self.points.len() as isize;
        (i as isize + offset).rem_euclid(n) as usize
    }

    pub fn signed_area(&self) -> f64 {
        signed_area(&self.points)
    }

    /// Applies `f` to every point, re-validating the result.
    pub fn map_points(&self, f: impl Fn(Point) -> Point) -> Result<Self> {
        BoundaryCurve::new(self.points.iter().copied().map(f).collect())
    }
}

fn validate_common(points: &[Point]) -> Result<()> {
    if points.len() < MIN_POINTS {
        return Err(Error::InvalidCurve(format!(
            "{} points given, at least {MIN_POINTS} required",
            points.len()
        )));
    }
    if let Some(i) = points.iter().position(|p| !(p.x.is_finite() && p.y.is_finite())) {
        return Err(Error::InvalidCurve(format!("point {i} is not finite")));
    }
    if let Some((i, j)) = first_duplicate(points) {
        return Err(Error::InvalidCurve(format!("points {i} and {j} coincide")));
    }
    Ok(())
}

fn first_duplicate(points: &[Point]) -> Option<(usize, usize)> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| {
        points[a]
            .x
            .total_cmp(&points[b].x)
            .then(points[a].y.total_cmp(&points[b].y))
    });
    order
        .windows(2)
        .find(|w| points[w[0]] == points[w[1]])
        .map(|w| (w[0].min(w[1]), w[0].max(w[1])))
}

/// Shoelace area; positive for counterclockwise polygons.
pub fn signed_area(points: &[Point]) -> f64 {
    let n = points.len();
    let mut twice = 0.0;
    for i in 0..n {
        let a = points[i];
        let b = points[(i + 1) % n];
        twice += a.x * b.y - b.x * a.y;
    }
    0.5 * twice
}

fn reverse_keep_first(points: &mut [Point]) {
    if points.len() > 1 {
        points[1..].reverse();
    }
}

/// Chains an unordered point cloud into a counterclockwise closed curve by
/// greedy nearest-neighbour traversal from the first input point.
///
/// Ties between equidistant candidates go to the lower input index. The chain
/// is rejected when any link (including the closing one) is longer than ten
/// times the median link.
pub fn order_and_orient(points: &[Point]) -> Result<BoundaryCurve> {
    validate_common(points)?;
    let n = points.len();
    let mut visited = vec![false; n];
    let mut chain = Vec::with_capacity(n);
    let mut current = 0;
    visited[0] = true;
    chain.push(0);
    for _ in 1..n {
        let p = points[current];
        let mut best: Option<(f64, usize)> = None;
        for (j, q) in points.iter().enumerate() {
            if visited[j] {
                continue;
            }
            let d = (q - p).norm_squared();
            if best.is_none_or(|(bd, _)| d < bd) {
                best = Some((d, j));
            }
        }
        let (_, j) = best.expect("unvisited point remains");
        visited[j] = true;
        chain.push(j);
        current = j;
    }

    let gaps: Vec<f64> = (0..n)
        .map(|k| (points[chain[(k + 1) % n]] - points[chain[k]]).norm())
        .collect();
    let mut sorted = gaps.clone();
    sorted.sort_by(f64::total_cmp);
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    };
    if let Some((k, &gap)) = gaps.iter().enumerate().find(|(_, &g)| g > 10.0 * median) {
        return Err(Error::Chaining {
            index: chain[k],
            gap,
            median,
        });
    }

    let ordered: Vec<Point> = chain.iter().map(|&j| points[j]).collect();
    BoundaryCurve::from_ordered(ordered)
}
