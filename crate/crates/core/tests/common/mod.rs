//! Brute-force references shared by the integration tests.

use nalgebra::{DMatrix, DVector};
use vecopt::Halfspace;

pub const TOL: f64 = 1e-7;

pub fn subsets(m: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, m: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..m {
            cur.push(i);
            go(i + 1, m, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, m, k, &mut Vec::new(), &mut out);
    out
}

fn feasible(hs: &[Halfspace], y: &[f64]) -> bool {
    hs.iter().all(|h| h.slack(y) >= -1e-9)
}

fn push_unique(set: &mut Vec<Vec<f64>>, y: Vec<f64>) {
    if !set.iter().any(|s| s.iter().zip(&y).all(|(a, b)| (a - b).abs() <= 1e-9)) {
        set.push(y);
    }
}

/// Vertices: every nonsingular q-subset of rows solved as equalities.
/// Rays: unit null directions of rank-(q−1) subsets that stay feasible.
pub fn brute_force(hs: &[Halfspace], q: usize) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let rows = |idx: &[usize]| DMatrix::from_fn(idx.len(), q, |i, j| hs[idx[i]].normal()[j]);
    let mut vertices = Vec::new();
    for idx in subsets(hs.len(), q) {
        let a = rows(&idx);
        let b = DVector::from_iterator(q, idx.iter().map(|&i| hs[i].offset()));
        if a.clone().svd(false, false).singular_values.min() < 1e-9 {
            continue;
        }
        if let Some(y) = a.lu().solve(&b) {
            let y: Vec<f64> = y.iter().copied().collect();
            if feasible(hs, &y) {
                push_unique(&mut vertices, y);
            }
        }
    }
    let mut rays = Vec::new();
    for idx in subsets(hs.len(), q - 1) {
        let mut a = rows(&idx).insert_row(q - 1, 0.0);
        a.row_mut(q - 1).fill(0.0);
        let svd = a.svd(false, true);
        let sv = &svd.singular_values;
        let mut order: Vec<usize> = (0..q).collect();
        order.sort_by(|&i, &j| sv[i].total_cmp(&sv[j]));
        if q >= 2 && sv[order[1]] < 1e-9 {
            continue;
        }
        let vt = svd.v_t.unwrap();
        let d: Vec<f64> = vt.row(order[0]).iter().copied().collect();
        for sign in [1.0, -1.0] {
            let r: Vec<f64> = d.iter().map(|x| sign * x).collect();
            if hs.iter().all(|h| h.normal().iter().zip(&r).map(|(a, b)| a * b).sum::<f64>() >= -1e-9) {
                push_unique(&mut rays, r);
            }
        }
    }
    (vertices, rays)
}

pub fn same_sets(a: &[Vec<f64>], b: &[Vec<f64>]) -> bool {
    let covered = |x: &[Vec<f64>], y: &[Vec<f64>]| {
        x.iter().all(|p| y.iter().any(|s| p.iter().zip(s).all(|(u, v)| (u - v).abs() <= TOL * (1.0 + u.abs()))))
    };
    a.len() == b.len() && covered(a, b) && covered(b, a)
}
