//! Library results against independent reference implementations written
//! from the definitions with plain `Vec<f64>` arithmetic.

#![allow(clippy::needless_range_loop)]

use glab_core::dictionary::gen_gaussian;
use glab_core::greedy::{run_pga, run_womp, GreedyConfig};
use glab_core::oracle::best_n_term;
use glab_core::rip::rip_exact;
use glab_core::{rng, SelectionMode};
use nalgebra::DVector;
use rand::Rng as _;
use rand_distr::StandardNormal;

/// Cyclic Jacobi eigenvalues of a symmetric matrix.
fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
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
            }
        }
    }
    (0..n).map(|i| a[i][i]).collect()
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(n, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, k, 0, &mut Vec::new(), &mut out);
    out
}

fn columns(d: &glab_core::Dictionary) -> Vec<Vec<f64>> {
    (0..d.num_atoms())
        .map(|j| d.atom(j).iter().copied().collect())
        .collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[test]
fn rip_exact_matches_jacobi_enumeration() {
    let d = gen_gaussian::<f64>(10, 15, 2).unwrap();
    let cols = columns(&d);
    for n in 1..=4 {
        let mut best = (f64::NEG_INFINITY, Vec::new());
        for s in subsets(15, n) {
            let g: Vec<Vec<f64>> = s
                .iter()
                .map(|&i| s.iter().map(|&j| dot(&cols[i], &cols[j])).collect())
                .collect();
            let ev = jacobi_eigenvalues(g);
            let hi = ev.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let lo = ev.iter().copied().fold(f64::INFINITY, f64::min);
            let delta = (hi - 1.0).max(1.0 - lo);
            if delta > best.0 + 1e-12 {
                best = (delta, s);
            }
        }
        let lib = rip_exact(&d, n).unwrap();
        assert!(
            (lib.value - best.0).abs() < 1e-12,
            "n={n}: {} vs {}",
            lib.value,
            best.0
        );
        assert_eq!(lib.witness_support.unwrap(), best.1, "n={n}");
        assert_eq!(lib.subsets_examined as usize, subsets(15, n).len());
    }
}

/// Least squares through the normal equations and Cholesky.
fn project(cols: &[Vec<f64>], support: &[usize], f: &[f64]) -> Vec<f64> {
    let k = support.len();
    let mut g: Vec<Vec<f64>> = support
        .iter()
        .map(|&i| support.iter().map(|&j| dot(&cols[i], &cols[j])).collect())
        .collect();
    let b: Vec<f64> = support.iter().map(|&i| dot(&cols[i], f)).collect();
    for j in 0..k {
        for p in 0..j {
            let l = g[j][p];
            for i in j..k {
                g[i][j] -= g[i][p] * l;
            }
        }
        let d = g[j][j].sqrt();
        for i in j..k {
            g[i][j] /= d;
        }
    }
    let mut y = vec![0.0; k];
    for i in 0..k {
        y[i] = (b[i] - (0..i).map(|p| g[i][p] * y[p]).sum::<f64>()) / g[i][i];
    }
    let mut x = vec![0.0; k];
    for i in (0..k).rev() {
        x[i] = (y[i] - (i + 1..k).map(|p| g[p][i] * x[p]).sum::<f64>()) / g[i][i];
    }
    let mut r = f.to_vec();
    for (&j, &c) in support.iter().zip(&x) {
        for (ri, aj) in r.iter_mut().zip(&cols[j]) {
            *ri -= c * aj;
        }
    }
    r
}

/// OMP written directly from its definition: pick the largest `|<r, φ>|`,
/// re-project onto everything picked so far.
fn reference_omp(cols: &[Vec<f64>], f: &[f64], steps: usize) -> (Vec<usize>, Vec<f64>) {
    let mut support = Vec::new();
    let mut r = f.to_vec();
    let mut norms = vec![dot(&r, &r).sqrt()];
    for _ in 0..steps {
        let mut best = (0, -1.0);
        for (j, c) in cols.iter().enumerate() {
            let v = dot(&r, c).abs();
            if !support.contains(&j) && v > best.1 {
                best = (j, v);
            }
        }
        support.push(best.0);
        r = project(cols, &support, f);
        norms.push(dot(&r, &r).sqrt());
    }
    (support, norms)
}

#[test]
fn omp_matches_reference_implementation() {
    for seed in 0..10u64 {
        let d = gen_gaussian::<f64>(12, 20, 50 + seed).unwrap();
        let cols = columns(&d);
        let mut rng = rng::seeded(seed);
        let f: Vec<f64> = (0..12).map(|_| rng.sample(StandardNormal)).collect();
        let (support, norms) = reference_omp(&cols, &f, 8);
        let trace = run_womp(
            &d,
            &DVector::from_vec(f.clone()),
            &GreedyConfig::womp(1.0, 8, SelectionMode::Argmax),
        )
        .unwrap();
        assert_eq!(trace.selected, support, "seed {seed}");
        for (a, b) in trace.residual_norms.iter().zip(&norms) {
            assert!((a - b).abs() < 1e-10, "seed {seed}: {a} vs {b}");
        }
    }
}

#[test]
fn pga_matches_reference_implementation() {
    let d = gen_gaussian::<f64>(6, 9, 4).unwrap();
    let cols = columns(&d);
    let f = vec![1.0, -2.0, 0.5, 3.0, 0.0, 1.5];
    let mut r = f.clone();
    let trace = run_pga(&d, &DVector::from_vec(f), 25).unwrap();
    for k in 0..25 {
        let (j, ip) =
            cols.iter()
                .enumerate()
                .map(|(j, c)| (j, dot(&r, c)))
                .fold((0, 0.0), |best, (j, v)| {
                    if v.abs() > f64::abs(best.1) {
                        (j, v)
                    } else {
                        best
                    }
                });
        assert_eq!(trace.selected[k], j, "step {k}");
        for (ri, aj) in r.iter_mut().zip(&cols[j]) {
            *ri -= ip * aj;
        }
        assert!((trace.residual_norms[k + 1] - dot(&r, &r).sqrt()).abs() < 1e-10);
    }
}

#[test]
fn oracle_matches_cholesky_enumeration() {
    for seed in 0..8u64 {
        let d = gen_gaussian::<f64>(7, 11, 80 + seed).unwrap();
        let cols = columns(&d);
        let mut rng = rng::seeded(100 + seed);
        let f: Vec<f64> = (0..7).map(|_| rng.sample(StandardNormal)).collect();
        for n in 1..=3 {
            let (sigma, support) = subsets(11, n)
                .into_iter()
                .map(|s| {
                    let r = project(&cols, &s, &f);
                    (dot(&r, &r).sqrt(), s)
                })
                .fold((f64::INFINITY, Vec::new()), |b, c| {
                    if c.0 < b.0 - 1e-13 {
                        c
                    } else {
                        b
                    }
                });
            let lib = best_n_term(&d, &DVector::from_vec(f.clone()), n).unwrap();
            assert!((lib.sigma_n - sigma).abs() < 1e-10);
            assert_eq!(lib.best_support, support);
        }
    }
}
