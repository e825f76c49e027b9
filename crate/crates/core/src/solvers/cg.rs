//! Preconditioned conjugate gradient for the energy-space Riesz map.

use crate::graph::WeightedGraph;
use crate::numeric::dot;

/// The operator `-mu Δ + mu (a + 1)` restricted to interior vertices; boundary
/// rows act as the identity on a zero right-hand side.
pub(crate) struct HOperator<'a> {
    graph: &'a WeightedGraph,
    mass: Vec<f64>,
    inv_diag: Vec<f64>,
}

impl<'a> HOperator<'a> {
    pub(crate) fn new(graph: &'a WeightedGraph, a: &[f64]) -> Self {
        let mass: Vec<f64> = (0..graph.len()).map(|x| graph.mu(x) * (a[x] + 1.0)).collect();
        let inv_diag = (0..graph.len())
            .map(|x| {
                if graph.is_boundary(x) {
                    1.0
                } else {
                    1.0 / (graph.weighted_degree(x) + mass[x])
                }
            })
            .collect();
        Self {
            graph,
            mass,
            inv_diag,
        }
    }

    pub(crate) fn apply(&self, z: &[f64], out: &mut [f64]) {
        self.graph.stiffness_apply(z, out);
        for x in 0..z.len() {
            if self.graph.is_boundary(x) {
                out[x] = z[x];
            } else {
                out[x] += self.mass[x] * z[x];
            }
        }
    }

    /// Solves `K g = b` to relative residual `rel_tol`, starting from `guess`.
    /// `b` must vanish at boundary vertices. Returns the iteration count.
    pub(crate) fn solve(&self, b: &[f64], guess: &mut Vec<f64>, rel_tol: f64) -> usize {
        let n = b.len();
        let b_norm = dot(b, b).sqrt();
        if guess.len() != n {
            *guess = vec![0.0; n];
        }
        if b_norm == 0.0 {
            guess.iter_mut().for_each(|g| *g = 0.0);
            return 0;
        }
        let x = guess;
        let mut r = vec![0.0; n];
        self.apply(x, &mut r);
        for i in 0..n {
            r[i] = b[i] - r[i];
        }
        let mut z: Vec<f64> = r.iter().zip(&self.inv_diag).map(|(r, d)| r * d).collect();
        let mut p = z.clone();
        let mut rz = dot(&r, &z);
        let mut kp = vec![0.0; n];
        let max_iter = 10 * n + 10;
        for it in 0..max_iter {
            if dot(&r, &r).sqrt() <= rel_tol * b_norm {
                return it;
            }
            self.apply(&p, &mut kp);
            let pkp = dot(&p, &kp);
            if !(pkp > 0.0) {
                return it;
            }
            let alpha = rz / pkp;
            for i in 0..n {
                x[i] += alpha * p[i];
                r[i] -= alpha * kp[i];
            }
            for i in 0..n {
                z[i] = r[i] * self.inv_diag[i];
            }
            let rz_new = dot(&r, &z);
            let beta = rz_new / rz;
            rz = rz_new;
            for i in 0..n {
                p[i] = z[i] + beta * p[i];
            }
        }
        max_iter
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphFamilySpec;

    #[test]
    fn solves_against_dense_elimination() {
        let g = "random_tree:15,2,w=0.5..3,mu=0.5..2"
            .parse::<GraphFamilySpec>()
            .unwrap()
            .generate()
            .unwrap();
        let a: Vec<f64> = (0..15).map(|x| 0.1 * x as f64 - 0.6).collect();
        let op = HOperator::new(&g, &a);
        let b: Vec<f64> = (0..15).map(|x| (x as f64).cos()).collect();
        let mut sol = Vec::new();
        op.solve(&b, &mut sol, 1e-13);

        // dense oracle: assemble K column by column, Gaussian elimination
        let n = 15;
        let mut k = vec![vec![0.0; n + 1]; n];
        let mut col = vec![0.0; n];
        for j in 0..n {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            op.apply(&e, &mut col);
            for i in 0..n {
                k[i][j] = col[i];
            }
        }
        for i in 0..n {
            k[i][n] = b[i];
        }
        for c in 0..n {
            let piv = (c..n).max_by(|&p, &q| k[p][c].abs().total_cmp(&k[q][c].abs())).unwrap();
            k.swap(c, piv);
            for r in 0..n {
                if r != c {
                    let f = k[r][c] / k[c][c];
                    for j in c..=n {
                        k[r][j] -= f * k[c][j];
                    }
                }
            }
        }
        for i in 0..n {
            assert!((sol[i] - k[i][n] / k[i][i]).abs() < 1e-10);
        }
    }
}
