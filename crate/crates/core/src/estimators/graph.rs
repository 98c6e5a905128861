//! Similarity-graph baselines: SumEigv, Deg and Eccen over the normalized
//! graph Laplacian L = I − D^{-1/2} W D^{-1/2}.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::matrix::SquareMatrix;
use crate::similarity::SimilarityMatrix;

/// Symmetric affinity W built from a similarity matrix: directed matrices are
/// averaged with their transpose, entries clipped to [0,1], diagonal set to 1.
pub fn affinity(sim: &SimilarityMatrix) -> SquareMatrix {
    let v = sim.values();
    SquareMatrix::from_fn(sim.n(), |i, j| {
        if i == j {
            1.0
        } else {
            (0.5 * (v[(i, j)] + v[(j, i)])).clamp(0.0, 1.0)
        }
    })
}

/// Normalized Laplacian of a symmetric nonnegative W.
///
/// A node whose row sums to zero is isolated: it keeps degree 1, which makes
/// its Laplacian row the identity row. Returns L and the isolated count.
pub fn normalized_laplacian(w: &SquareMatrix) -> (SquareMatrix, usize) {
    let n = w.n();
    let mut isolated = 0;
    let inv_sqrt_deg: Vec<f64> = w
        .rows()
        .map(|row| {
            let d: f64 = row.iter().sum();
            if d > 0.0 {
                1.0 / d.sqrt()
            } else {
                isolated += 1;
                1.0
            }
        })
        .collect();
    let l = SquareMatrix::from_fn(n, |i, j| {
        let identity = if i == j { 1.0 } else { 0.0 };
        identity - inv_sqrt_deg[i] * w[(i, j)] * inv_sqrt_deg[j]
    });
    (l, isolated)
}

/// Eigen-decomposition of a graph Laplacian, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    /// eigenvectors[k] pairs with eigenvalues[k]; first nonzero component positive.
    pub eigenvectors: Vec<Vec<f64>>,
    pub isolated: usize,
}

impl Spectrum {
    pub fn of(sim: &SimilarityMatrix) -> Self {
        let (l, isolated) = normalized_laplacian(&affinity(sim));
        let mut spectrum = Self::of_symmetric(&l);
        spectrum.isolated = isolated;
        spectrum
    }

    pub fn of_symmetric(m: &SquareMatrix) -> Self {
        let n = m.n();
        if n == 0 {
            return Self {
                eigenvalues: vec![],
                eigenvectors: vec![],
                isolated: 0,
            };
        }
        let dm = DMatrix::from_row_slice(n, n, m.values());
        let eig = SymmetricEigen::new(dm);
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let eigenvectors = order
            .iter()
            .map(|&k| {
                let mut v: Vec<f64> = eig.eigenvectors.column(k).iter().copied().collect();
                if let Some(first) = v.iter().find(|x| x.abs() > 1e-12) {
                    if *first < 0.0 {
                        v.iter_mut().for_each(|x| *x = -*x);
                    }
                }
                v
            })
            .collect();
        Self {
            eigenvalues,
            eigenvectors,
            isolated: 0,
        }
    }
}

/// Σₖ max(0, 1 − λₖ) over Laplacian eigenvalues.
pub fn sum_eigv_from(spectrum: &Spectrum) -> f64 {
    spectrum
        .eigenvalues
        .iter()
        .map(|l| (1.0 - l).max(0.0))
        .sum()
}

pub fn sum_eigv(sim: &SimilarityMatrix) -> f64 {
    sum_eigv_from(&Spectrum::of(sim))
}

/// 1 − mean affinity (diagonal included).
pub fn deg(sim: &SimilarityMatrix) -> f64 {
    let w = affinity(sim);
    let n = w.n() as f64;
    1.0 - w.values().iter().sum::<f64>() / (n * n)
}

/// Spread of answers in the space of the k smallest Laplacian eigenvectors:
/// the Euclidean norm of all row offsets from the mean row.
pub fn eccen_from(spectrum: &Spectrum, k: usize) -> Result<f64> {
    let n = spectrum.eigenvalues.len();
    if k == 0 || k > n {
        return Err(Error::InvalidInput(format!(
            "eccentricity needs 1 ≤ k ≤ n, got k = {k}, n = {n}"
        )));
    }
    let vectors = &spectrum.eigenvectors[..k];
    let mut total = 0.0;
    for v in vectors {
        let mean = v.iter().sum::<f64>() / n as f64;
        total += v.iter().map(|x| (x - mean).powi(2)).sum::<f64>();
    }
    Ok(total.sqrt())
}

pub fn eccen(sim: &SimilarityMatrix, k: usize) -> Result<f64> {
    eccen_from(&Spectrum::of(sim), k)
}
