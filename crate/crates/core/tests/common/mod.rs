#![allow(dead_code)]

use yo_core::TspInstance;

/// Exhaustive optimum over all `(n - 1)! / 2` distinct tours (city 0 fixed,
/// one direction per reflection pair).
pub fn brute_force_optimum(inst: &TspInstance) -> f64 {
    let n = inst.len();
    let mut rest: Vec<usize> = (1..n).collect();
    let mut best = f64::INFINITY;
    permute(&mut rest, 0, &mut |p| {
        if p[0] < p[p.len() - 1] {
            let mut len = inst.distance(0, p[0]) + inst.distance(p[p.len() - 1], 0);
            for w in p.windows(2) {
                len += inst.distance(w[0], w[1]);
            }
            best = best.min(len);
        }
    });
    best
}

fn permute(xs: &mut Vec<usize>, k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == xs.len() {
        visit(xs);
        return;
    }
    for i in k..xs.len() {
        xs.swap(k, i);
        permute(xs, k + 1, visit);
        xs.swap(k, i);
    }
}

pub fn same_length(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * b.abs().max(1.0)
}
