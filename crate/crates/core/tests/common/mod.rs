//! Independent reference implementations used as test oracles. None of these
//! call into the library's numerical code; they favour plain loops over speed.

#![allow(dead_code)]

use distill_core::{derive_stream, RngStream};

pub fn gaussian_rows(rng: &mut RngStream, n: usize, d: usize, scale: f64) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| (0..d).map(|_| scale * rng.normal()).collect())
        .collect()
}

pub fn rows_for(seed: u64, stream: u64, n: usize, d: usize) -> Vec<Vec<f64>> {
    gaussian_rows(&mut derive_stream(seed, stream), n, d, 1.0)
}

fn cos(a: &[f64], b: &[f64]) -> f64 {
    let mut ab = 0.0;
    let mut aa = 0.0;
    let mut bb = 0.0;
    for k in 0..a.len() {
        ab += a[k] * b[k];
        aa += a[k] * a[k];
        bb += b[k] * b[k];
    }
    (ab / (aa.sqrt() * bb.sqrt())).clamp(-1.0, 1.0)
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for k in 0..a.len() {
        s += (a[k] - b[k]) * (a[k] - b[k]);
    }
    s.sqrt()
}

/// Mean cosine similarity over all ordered pairs `i != j`.
pub fn brute_diversity(sel: &[Vec<f64>]) -> f64 {
    let n = sel.len();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += cos(&sel[i], &sel[j]);
            }
        }
    }
    s / (n * (n - 1)) as f64
}

/// `exp(-mean_i min_{s in S} |x_i - x_s|)`.
pub fn brute_representativeness(items: &[Vec<f64>], sel: &[usize]) -> f64 {
    let mut total = 0.0;
    for x in items {
        let mut best = f64::INFINITY;
        for &s in sel {
            let d = euclid(x, &items[s]);
            if d < best {
                best = d;
            }
        }
        total += best;
    }
    (-total / items.len() as f64).exp()
}

pub fn brute_combined(items: &[Vec<f64>], sel: &[usize], lambda_d: f64, lambda_r: f64) -> f64 {
    let div = if sel.len() >= 2 {
        let chosen: Vec<Vec<f64>> = sel.iter().map(|&i| items[i].clone()).collect();
        brute_diversity(&chosen)
    } else {
        0.0
    };
    lambda_d * div - lambda_r * brute_representativeness(items, sel)
}

fn rbf(a: &[f64], b: &[f64], gamma: f64) -> f64 {
    let mut s = 0.0;
    for k in 0..a.len() {
        s += (a[k] - b[k]) * (a[k] - b[k]);
    }
    (-gamma * s).exp()
}

/// Unbiased MMD² written term by term over the three kernel sums.
pub fn brute_mmd2(xs: &[Vec<f64>], ys: &[Vec<f64>], gamma: f64) -> f64 {
    let (m, n) = (xs.len() as f64, ys.len() as f64);
    let mut kxx = 0.0;
    for (i, a) in xs.iter().enumerate() {
        for (j, b) in xs.iter().enumerate() {
            if i != j {
                kxx += rbf(a, b, gamma);
            }
        }
    }
    let mut kyy = 0.0;
    for (i, a) in ys.iter().enumerate() {
        for (j, b) in ys.iter().enumerate() {
            if i != j {
                kyy += rbf(a, b, gamma);
            }
        }
    }
    let mut kxy = 0.0;
    for a in xs {
        for b in ys {
            kxy += rbf(a, b, gamma);
        }
    }
    kxx / (m * (m - 1.0)) + kyy / (n * (n - 1.0)) - 2.0 * kxy / (m * n)
}

/// Sample covariance (divisor `n - 1`).
pub fn covariance(rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = rows.len();
    let d = rows[0].len();
    let mut mu = vec![0.0; d];
    for r in rows {
        for k in 0..d {
            mu[k] += r[k] / n as f64;
        }
    }
    let mut c = vec![vec![0.0; d]; d];
    for r in rows {
        for i in 0..d {
            for j in 0..d {
                c[i][j] += (r[i] - mu[i]) * (r[j] - mu[j]) / (n - 1) as f64;
            }
        }
    }
    c
}

/// Leading `k` eigenpairs of a symmetric PSD matrix by power iteration with
/// Hotelling deflation. Eigenvectors are unit length, sign unspecified.
pub fn power_eigen(a: &[Vec<f64>], k: usize) -> Vec<(f64, Vec<f64>)> {
    let d = a.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    let mut out = Vec::new();
    for comp in 0..k {
        let mut v: Vec<f64> = (0..d)
            .map(|i| 1.0 + 0.1 * ((i * 7 + comp * 3) % 5) as f64)
            .collect();
        let mut lambda = 0.0;
        for _ in 0..200_000 {
            let mut w = vec![0.0; d];
            for i in 0..d {
                for j in 0..d {
                    w[i] += m[i][j] * v[j];
                }
            }
            let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm == 0.0 {
                break;
            }
            for x in w.iter_mut() {
                *x /= norm;
            }
            let delta = v
                .iter()
                .zip(&w)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            v = w;
            lambda = norm;
            if delta < 1e-15 {
                break;
            }
        }
        for i in 0..d {
            for j in 0..d {
                m[i][j] -= lambda * v[i] * v[j];
            }
        }
        out.push((lambda, v));
    }
    out
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Exhaustive minimum of the combined objective over all `k`-subsets.
pub fn exhaustive_min(
    items: &[Vec<f64>],
    k: usize,
    lambda_d: f64,
    lambda_r: f64,
) -> (f64, Vec<usize>) {
    let mut best = (f64::INFINITY, Vec::new());
    for s in combinations(items.len(), k) {
        let v = brute_combined(items, &s, lambda_d, lambda_r);
        if v < best.0 {
            best = (v, s);
        }
    }
    best
}

/// 0/1 knapsack by enumerating all `2^n` subsets. Maximises total score,
/// then item count; remaining ties go to the set whose highest differing
/// index is smaller. Returns ascending indices.
pub fn brute_knapsack(scores: &[f64], costs: &[u64], capacity: u64) -> Vec<usize> {
    let n = scores.len();
    let mut best: Option<(f64, u32, u64)> = None;
    for mask in 0u64..(1 << n) {
        let mut cost = 0;
        let mut value = 0.0;
        for i in 0..n {
            if mask >> i & 1 == 1 {
                cost += costs[i];
                value += scores[i];
            }
        }
        if cost > capacity {
            continue;
        }
        let count = mask.count_ones();
        let better = match best {
            None => true,
            Some((bv, bc, bm)) => {
                let tol = 1e-12 * value.abs().max(bv.abs()).max(1.0);
                if value > bv + tol {
                    true
                } else if value < bv - tol {
                    false
                } else if count != bc {
                    count > bc
                } else {
                    // As integers, a smaller mask is colex-smaller.
                    mask < bm
                }
            }
        };
        if better {
            best = Some((value, count, mask));
        }
    }
    let mask = best.expect("the empty set is feasible").2;
    (0..n).filter(|i| mask >> i & 1 == 1).collect()
}

/// ROC-AUC as the fraction of (positive, negative) pairs ordered correctly,
/// ties counting one half.
pub fn brute_auc(scores: &[f64], positive: &[bool]) -> Option<f64> {
    let mut num = 0.0;
    let mut pairs = 0usize;
    for i in 0..scores.len() {
        for j in 0..scores.len() {
            if positive[i] && !positive[j] {
                pairs += 1;
                if scores[i] > scores[j] {
                    num += 1.0;
                } else if scores[i] == scores[j] {
                    num += 0.5;
                }
            }
        }
    }
    (pairs > 0).then(|| num / pairs as f64)
}

/// Brute-force CF of a point set: `(n, linear sum, sum of squared norms)`.
pub fn brute_cf(points: &[&[f64]]) -> (usize, Vec<f64>, f64) {
    let d = points[0].len();
    let mut ls = vec![0.0; d];
    let mut ss = 0.0;
    for p in points {
        for k in 0..d {
            ls[k] += p[k];
            ss += p[k] * p[k];
        }
    }
    (points.len(), ls, ss)
}

/// Root-mean-square distance to the centroid, two-pass.
pub fn brute_radius(points: &[&[f64]]) -> f64 {
    let d = points[0].len();
    let n = points.len() as f64;
    let mut c = vec![0.0; d];
    for p in points {
        for k in 0..d {
            c[k] += p[k] / n;
        }
    }
    let mut s = 0.0;
    for p in points {
        for k in 0..d {
            s += (p[k] - c[k]) * (p[k] - c[k]);
        }
    }
    (s / n).sqrt()
}
