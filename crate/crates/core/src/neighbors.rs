use crate::Point;

/// Indices of the `k` points nearest to `points[center]` (the center itself
/// included), ordered by distance. Equal distances go to the lower index.
pub fn k_nearest(points: &[Point], center: usize, k: usize) -> Vec<usize> {
    let k = k.min(points.len());
    let c = points[center];
    let mut cand: Vec<(f64, usize)> = points
        .iter()
        .enumerate()
        .map(|(j, p)| ((p - c).norm_squared(), j))
        .collect();
    let cmp = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
    if k < cand.len() && k > 0 {
        cand.select_nth_unstable_by(k - 1, cmp);
    }
    cand.truncate(k);
    cand.sort_unstable_by(cmp);
    cand.into_iter().map(|(_, j)| j).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nearest_on_a_line_with_ties() {
        let pts: Vec<Point> = (0..9).map(|i| Point::new(i as f64, 0.0)).collect();
        assert_eq!(k_nearest(&pts, 4, 3), vec![4, 3, 5]);
        assert_eq!(k_nearest(&pts, 4, 4), vec![4, 3, 5, 2]);
        assert_eq!(k_nearest(&pts, 0, 2), vec![0, 1]);
    }

    #[test]
    fn k_larger_than_cloud_returns_all() {
        let pts: Vec<Point> = (0..3).map(|i| Point::new(0.0, i as f64)).collect();
        assert_eq!(k_nearest(&pts, 2, 10), vec![2, 1, 0]);
    }
}
