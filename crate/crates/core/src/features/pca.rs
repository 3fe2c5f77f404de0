use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::fmap::FeatureMap;
use crate::error::{Error, Result};

/// Principal axes of a pooled set of descriptors.
#[derive(Debug, Clone, PartialEq)]
pub struct PcaBasis {
    pub mean: Vec<f64>,
    /// `dim × d_out`, orthonormal columns in order of decreasing variance.
    pub components: DMatrix<f64>,
    /// Sample-covariance eigenvalues (denominator `N - 1`), descending.
    pub explained_variance: Vec<f64>,
    /// Trace of the sample covariance.
    pub total_variance: f64,
}

impl PcaBasis {
    pub fn input_dim(&self) -> usize {
        self.mean.len()
    }

    pub fn output_dim(&self) -> usize {
        self.components.ncols()
    }

    /// `(v - mean) · components`
    pub fn project(&self, v: &[f32]) -> Vec<f64> {
        let centered = DVector::from_iterator(v.len(), v.iter().zip(&self.mean).map(|(x, m)| *x as f64 - m));
        (self.components.transpose() * centered).iter().copied().collect()
    }

    pub fn project_map(&self, map: &FeatureMap) -> Result<FeatureMap> {
        let mut values = Vec::with_capacity(map.rows() * map.cols() * self.output_dim());
        for row in 0..map.rows() {
            for col in 0..map.cols() {
                values.extend(self.project(map.cell(row, col)).into_iter().map(|x| x as f32));
            }
        }
        FeatureMap::new(map.rows(), map.cols(), self.output_dim(), map.cell_size() as f32, values)
    }
}

/// Fits a PCA basis on every cell of every map (pooled) and projects each
/// map onto the leading `d_out` components.
pub fn pca_reduce(maps: &[FeatureMap], d_out: usize) -> Result<(PcaBasis, Vec<FeatureMap>)> {
    let dim = maps.first().ok_or_else(|| Error::DegenerateData("no feature maps".into()))?.dim();
    if let Some(m) = maps.iter().find(|m| m.dim() != dim) {
        return Err(Error::DegenerateData(format!("descriptor dimensions differ ({dim} vs {})", m.dim())));
    }
    if d_out == 0 || d_out > dim {
        return Err(Error::Validation(format!("PCA output dimension {d_out} not in 1..={dim}")));
    }
    let n: usize = maps.iter().map(|m| m.rows() * m.cols()).sum();
    if n < d_out || n < 2 {
        return Err(Error::DegenerateData(format!("{n} cells cannot span {d_out} components")));
    }

    let mut mean = vec![0.0; dim];
    for m in maps {
        for chunk in m.values().chunks_exact(dim) {
            for (acc, v) in mean.iter_mut().zip(chunk) {
                *acc += *v as f64;
            }
        }
    }
    mean.iter_mut().for_each(|x| *x /= n as f64);

    let mut cov = DMatrix::<f64>::zeros(dim, dim);
    let mut centered = vec![0.0; dim];
    for m in maps {
        for chunk in m.values().chunks_exact(dim) {
            for ((c, v), mu) in centered.iter_mut().zip(chunk).zip(&mean) {
                *c = *v as f64 - mu;
            }
            for i in 0..dim {
                let ci = centered[i];
                if ci == 0.0 {
                    continue;
                }
                for j in i..dim {
                    cov[(i, j)] += ci * centered[j];
                }
            }
        }
    }
    for i in 0..dim {
        for j in i..dim {
            let v = cov[(i, j)] / (n - 1) as f64;
            cov[(i, j)] = v;
            cov[(j, i)] = v;
        }
    }
    let total_variance = cov.trace();

    let eig = SymmetricEigen::new(cov);
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|a, b| eig.eigenvalues[*b].total_cmp(&eig.eigenvalues[*a]).then(a.cmp(b)));
    let mut components = DMatrix::<f64>::zeros(dim, d_out);
    let mut explained_variance = Vec::with_capacity(d_out);
    for (out, &idx) in order.iter().take(d_out).enumerate() {
        let mut col = eig.eigenvectors.column(idx).into_owned();
        // Fix the sign so the largest-magnitude entry is positive.
        let pivot = col.iter().copied().fold(0.0f64, |acc, x| if x.abs() > acc.abs() { x } else { acc });
        if pivot < 0.0 {
            col.neg_mut();
        }
        components.set_column(out, &col);
        explained_variance.push(eig.eigenvalues[idx].max(0.0));
    }

    let basis = PcaBasis { mean, components, explained_variance, total_variance };
    let projected = maps.iter().map(|m| basis.project_map(m)).collect::<Result<Vec<_>>>()?;
    Ok((basis, projected))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn map_from_rows(rows: &[Vec<f64>]) -> FeatureMap {
        // Lay the samples out on a grid with as many cells as samples.
        let dim = rows[0].len();
        let values = rows.iter().flatten().map(|x| *x as f32).collect();
        FeatureMap::new(rows.len() / 4, 4, dim, 1.0, values).unwrap()
    }

    #[test]
    fn planar_data_is_captured_by_two_components() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let u: Vec<f64> = (0..8).map(|_| rng.random_range(-1.0..1.0)).collect();
        let v: Vec<f64> = (0..8).map(|_| rng.random_range(-1.0..1.0)).collect();
        let rows: Vec<Vec<f64>> = (0..64)
            .map(|_| {
                let (a, b) = (rng.random_range(-4.0..4.0), rng.random_range(-4.0..4.0));
                (0..8).map(|i| 0.5 + a * u[i] + b * v[i]).collect()
            })
            .collect();
        let (basis, projected) = pca_reduce(&[map_from_rows(&rows)], 2).unwrap();
        let captured: f64 = basis.explained_variance.iter().sum();
        assert!((basis.total_variance - captured).abs() <= 1e-9 * basis.total_variance.max(1.0) + 1e-6);
        assert_eq!(projected[0].dim(), 2);
    }

    #[test]
    fn complete_basis_keeps_total_variance_and_is_orthonormal() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let rows: Vec<Vec<f64>> = (0..40).map(|_| (0..5).map(|_| rng.random_range(-2.0..2.0)).collect()).collect();
        let (basis, _) = pca_reduce(&[map_from_rows(&rows)], 5).unwrap();
        let sum: f64 = basis.explained_variance.iter().sum();
        assert!((sum - basis.total_variance).abs() <= 1e-6);
        let gram = basis.components.transpose() * &basis.components;
        assert!((gram - DMatrix::identity(5, 5)).abs().max() <= 1e-6);
        assert!(basis.explained_variance.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn errors() {
        let m = FeatureMap::new(4, 4, 3, 1.0, vec![0.0; 48]).unwrap();
        assert!(pca_reduce(&[], 1).is_err());
        assert!(pca_reduce(std::slice::from_ref(&m), 4).is_err());
        let other = FeatureMap::new(4, 4, 2, 1.0, vec![0.0; 32]).unwrap();
        assert!(matches!(pca_reduce(&[m, other], 1), Err(Error::DegenerateData(_))));
    }
}
