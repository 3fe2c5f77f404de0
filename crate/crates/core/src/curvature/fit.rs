use crate::error::{Error, Result};
use crate::geometry::Point2;

/// Least-squares fit of `y' = a·x'²` to points already in the local frame.
/// Returns `a = Σx'²y' / Σx'⁴` and the mean squared residual.
pub fn fit_parabola(local_points: &[Point2]) -> Result<(f64, f64)> {
    if local_points.len() < 5 {
        return Err(Error::InsufficientSupport { found: local_points.len() });
    }
    let (mut sxy, mut sx4) = (0.0, 0.0);
    for p in local_points {
        let x2 = p.x * p.x;
        sxy += x2 * p.y;
        sx4 += x2 * x2;
    }
    if sx4 < 1e-12 {
        return Err(Error::DegenerateFit);
    }
    let a = sxy / sx4;
    let residual = local_points.iter().map(|p| (p.y - a * p.x * p.x).powi(2)).sum::<f64>() / local_points.len() as f64;
    Ok((a, residual))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn pts(v: &[(f64, f64)]) -> Vec<Point2> {
        v.iter().map(|(x, y)| Point2::new(*x, *y)).collect()
    }

    #[test]
    fn exact_quadratic() {
        let (a, res) = fit_parabola(&pts(&[(-1.0, 0.05), (0.0, 0.0), (1.0, 0.05), (-2.0, 0.2), (2.0, 0.2)])).unwrap();
        assert!((a - 0.05).abs() < 1e-12);
        assert!(res <= 1e-12);
    }

    #[test]
    fn flat_line() {
        let (a, _) = fit_parabola(&pts(&[(-2.0, 0.0), (-1.0, 0.0), (0.5, 0.0), (1.0, 0.0), (3.0, 0.0)])).unwrap();
        assert_eq!(a, 0.0);
    }

    #[test]
    fn noisy_samples() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let p: Vec<Point2> = (0..50)
            .map(|_| {
                let x = rng.random_range(-5.0..5.0);
                Point2::new(x, 0.2 * x * x + rng.random_range(-0.01..0.01))
            })
            .collect();
        let (a, _) = fit_parabola(&p).unwrap();
        // Closed form evaluated independently.
        let num: f64 = p.iter().map(|q| q.x.powi(2) * q.y).sum();
        let den: f64 = p.iter().map(|q| q.x.powi(4)).sum();
        assert!((a - num / den).abs() <= 1e-12);
        assert!((a - 0.2).abs() <= 0.01);
    }

    #[test]
    fn degenerate_and_insufficient() {
        assert!(matches!(fit_parabola(&pts(&[(0.0, 1.0); 6])), Err(Error::DegenerateFit)));
        assert!(matches!(fit_parabola(&pts(&[(1.0, 1.0); 4])), Err(Error::InsufficientSupport { found: 4 })));
    }
}
