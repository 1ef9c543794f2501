//! Input-dimensionality analysis: area of the convex hull spanned by the
//! first two principal components of resized spectrograms.

use super::{resize_spectrogram, Spectrogram};
use crate::error::{Error, Result};
use crate::learn::fit_pca;

/// Convex hull by Andrew's monotone chain, counter-clockwise, collinear points dropped.
pub fn convex_hull(points: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: [f64; 2], a: [f64; 2], b: [f64; 2]| (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    let mut hull: Vec<[f64; 2]> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &[f64; 2]>> =
            if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
        for &p in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

/// Shoelace area of a simple polygon.
pub fn polygon_area(poly: &[[f64; 2]]) -> f64 {
    if poly.len() < 3 {
        return 0.0;
    }
    let twice: f64 = (0..poly.len())
        .map(|i| {
            let (a, b) = (poly[i], poly[(i + 1) % poly.len()]);
            a[0] * b[1] - b[0] * a[1]
        })
        .sum();
    twice.abs() / 2.0
}

/// Hull area of the PCA projection for each candidate input size.
///
/// Only two components are supported; the area of a higher-dimensional hull
/// is not defined here.
pub fn pca_hull_area(
    specs: &[Spectrogram],
    candidate_dims: &[(usize, usize)],
    n_components: usize,
) -> Result<Vec<((usize, usize), f64)>> {
    if n_components != 2 {
        return Err(Error::domain(format!("hull area needs exactly 2 components, got {n_components}")));
    }
    if specs.len() < n_components + 1 {
        return Err(Error::domain(format!(
            "{} samples cannot span a {n_components}-D hull",
            specs.len()
        )));
    }
    candidate_dims
        .iter()
        .map(|&(rows, cols)| {
            let flat = specs
                .iter()
                .map(|s| resize_spectrogram(s, rows, cols).map(|r| r.values))
                .collect::<Result<Vec<_>>>()?;
            let pca = fit_pca(&flat, n_components)?;
            if pca.n_components() < 2 {
                return Ok(((rows, cols), 0.0));
            }
            let pts: Vec<[f64; 2]> = pca.transform_all(&flat).iter().map(|p| [p[0], p[1]]).collect();
            Ok(((rows, cols), polygon_area(&convex_hull(&pts))))
        })
        .collect()
}

/// Relative change of hull area between the two largest candidate sizes.
pub fn saturation_ratio(curve: &[((usize, usize), f64)]) -> Option<f64> {
    let mut sorted = curve.to_vec();
    sorted.sort_by_key(|((r, c), _)| r * c);
    match sorted.as_slice() {
        [.., (_, prev), (_, last)] if *prev > 0.0 => Some((last - prev).abs() / prev),
        _ => None,
    }
}
