//! Jacobi-preconditioned conjugate gradients for the symmetric positive
//! definite systems produced by the implicit step.

/// Symmetric matrix with a diagonal plus a list of off-diagonal couplings
/// `(i, j, w)` contributing `+w` on the diagonals of `i` and `j` and `-w`
/// off the diagonal. This is exactly `diag + L` for a weighted graph
/// Laplacian `L`.
pub(crate) struct LaplacianSystem {
    pub diag: Vec<f64>,
    pub edges: Vec<(usize, usize, f64)>,
}

impl LaplacianSystem {
    pub fn new(n: usize) -> Self {
        LaplacianSystem {
            diag: vec![0.0; n],
            edges: Vec::new(),
        }
    }

    fn full_diag(&self) -> Vec<f64> {
        let mut d = self.diag.clone();
        for &(i, j, w) in &self.edges {
            d[i] += w;
            d[j] += w;
        }
        d
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for ((yi, di), xi) in y.iter_mut().zip(&self.diag).zip(x) {
            *yi = di * xi;
        }
        for &(i, j, w) in &self.edges {
            let diff = w * (x[i] - x[j]);
            y[i] += diff;
            y[j] -= diff;
        }
    }

    /// Solves `A x = b` to relative residual `rel_tol`. Returns the iteration
    /// count, or `None` if the budget ran out.
    pub fn solve(&self, b: &[f64], x: &mut [f64], rel_tol: f64, max_iter: usize) -> Option<usize> {
        let n = b.len();
        let inv_diag: Vec<f64> = self.full_diag().iter().map(|d| 1.0 / d).collect();
        let b_norm = norm(b);
        x.iter_mut().for_each(|v| *v = 0.0);
        if b_norm == 0.0 {
            return Some(0);
        }
        let mut r = b.to_vec();
        let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(r, d)| r * d).collect();
        let mut dir = z.clone();
        let mut ad = vec![0.0; n];
        let mut rz = dot(&r, &z);
        for it in 0..max_iter {
            if norm(&r) <= rel_tol * b_norm {
                return Some(it);
            }
            self.apply(&dir, &mut ad);
            let alpha = rz / dot(&dir, &ad);
            for i in 0..n {
                x[i] += alpha * dir[i];
                r[i] -= alpha * ad[i];
            }
            for i in 0..n {
                z[i] = r[i] * inv_diag[i];
            }
            let rz_new = dot(&r, &z);
            let beta = rz_new / rz;
            rz = rz_new;
            for i in 0..n {
                dir[i] = z[i] + beta * dir[i];
            }
        }
        (norm(&r) <= rel_tol * b_norm).then_some(max_iter)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
