#![allow(dead_code)]

use std::path::PathBuf;

use snne_core::metrics::LabeledScore;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

/// Full (n+1)×(m+1) LCS table.
pub fn lcs_oracle<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let mut t = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            t[i][j] = if a[i - 1] == b[j - 1] {
                t[i - 1][j - 1] + 1
            } else {
                t[i - 1][j].max(t[i][j - 1])
            };
        }
    }
    t[a.len()][b.len()]
}

pub fn rouge_oracle<T: PartialEq>(a: &[T], b: &[T]) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    let l = lcs_oracle(a, b) as f64;
    if l == 0.0 {
        return 0.0;
    }
    let p = l / b.len() as f64;
    let r = l / a.len() as f64;
    2.0 * p * r / (p + r)
}

/// Pairs (incorrect, correct) where the incorrect one is more uncertain,
/// ties counted ½.
pub fn auroc_oracle(scores: &[LabeledScore]) -> f64 {
    let mut wins = 0.0;
    let mut pairs = 0.0;
    for pos in scores.iter().filter(|s| !s.correct) {
        for neg in scores.iter().filter(|s| s.correct) {
            pairs += 1.0;
            if pos.uncertainty > neg.uncertainty {
                wins += 1.0;
            } else if pos.uncertainty == neg.uncertainty {
                wins += 0.5;
            }
        }
    }
    wins / pairs
}

fn retention_order(scores: &[LabeledScore]) -> Vec<&LabeledScore> {
    let mut order: Vec<&LabeledScore> = scores.iter().collect();
    order.sort_by(|a, b| {
        a.uncertainty
            .partial_cmp(&b.uncertainty)
            .unwrap()
            .then(a.record_id.cmp(&b.record_id))
    });
    order
}

/// For every retention count m, recount the correct answers among the m kept.
pub fn auarc_oracle(scores: &[LabeledScore]) -> f64 {
    let order = retention_order(scores);
    let n = order.len();
    let mut total = 0.0;
    for m in 1..=n {
        let correct = order[..m].iter().filter(|s| s.correct).count();
        total += correct as f64 / m as f64;
    }
    total / n as f64
}

fn rejection_area(qualities: &[f64]) -> f64 {
    let n = qualities.len();
    let mean = qualities.iter().sum::<f64>() / n as f64;
    let retained = |rejected: usize| {
        let kept = n - rejected;
        if kept == 0 {
            mean
        } else {
            qualities[..kept].iter().sum::<f64>() / kept as f64
        }
    };
    let mut total = 0.0;
    for j in 0..n {
        total += (retained(j) - mean) + (retained(j + 1) - mean);
    }
    0.5 * total / n as f64
}

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Method area over the best area found by trying every ordering.
pub fn prr_oracle(scores: &[LabeledScore]) -> f64 {
    let method: Vec<f64> = retention_order(scores).iter().map(|s| s.quality).collect();
    let best = permutations(method.len())
        .into_iter()
        .map(|p| rejection_area(&p.iter().map(|&i| method[i]).collect::<Vec<_>>()))
        .fold(f64::NEG_INFINITY, f64::max);
    rejection_area(&method) / best
}

/// Cyclic Jacobi eigenvalue iteration for a symmetric matrix. Returns
/// eigenvalues ascending with eigenvectors as columns of the same order.
pub fn jacobi_eigen(a: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut a = a.to_vec();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let (vkp, vkq) = (row[p], row[q]);
                    row[p] = c * vkp - s * vkq;
                    row[q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a[x][x].partial_cmp(&a[y][y]).unwrap());
    let values = order.iter().map(|&k| a[k][k]).collect();
    let vectors = order
        .iter()
        .map(|&k| (0..n).map(|i| v[i][k]).collect())
        .collect();
    (values, vectors)
}

/// Normalized Laplacian of a symmetric affinity with unit diagonal.
pub fn laplacian_oracle(w: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = w.len();
    let d: Vec<f64> = w.iter().map(|r| r.iter().sum()).collect();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let id = if i == j { 1.0 } else { 0.0 };
                    id - w[i][j] / (d[i] * d[j]).sqrt()
                })
                .collect()
        })
        .collect()
}

pub fn sum_eigv_oracle(w: &[Vec<f64>]) -> f64 {
    let (values, _) = jacobi_eigen(&laplacian_oracle(w));
    values.iter().map(|l| (1.0 - l).max(0.0)).sum()
}

/// Embed answers as rows of the k smallest eigenvectors, then take the norm
/// of the stacked offsets from the centroid.
pub fn eccen_oracle(w: &[Vec<f64>], k: usize) -> f64 {
    let n = w.len();
    let (_, vectors) = jacobi_eigen(&laplacian_oracle(w));
    let points: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..k).map(|c| vectors[c][i]).collect())
        .collect();
    let centroid: Vec<f64> = (0..k)
        .map(|c| points.iter().map(|p| p[c]).sum::<f64>() / n as f64)
        .collect();
    points
        .iter()
        .map(|p| {
            p.iter()
                .zip(&centroid)
                .map(|(x, m)| (x - m).powi(2))
                .sum::<f64>()
        })
        .sum::<f64>()
        .sqrt()
}
