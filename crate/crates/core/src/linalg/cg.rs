use super::{CsrMatrix, LinalgError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preconditioner {
    None,
    Jacobi,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CgOptions {
    /// Relative tolerance on `‖b − Ax‖₂ / ‖b‖₂`.
    pub tol: f64,
    /// Defaults to `20 n` when `None`.
    pub max_iter: Option<usize>,
    pub preconditioner: Preconditioner,
}

impl Default for CgOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: None,
            preconditioner: Preconditioner::Jacobi,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CgSolution {
    pub x: Vec<f64>,
    pub iterations: usize,
    /// Final true residual `‖b − Ax‖₂`.
    pub residual: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn true_residual(a: &CsrMatrix, b: &[f64], x: &[f64]) -> f64 {
    let ax = a.spmv(x).expect("dimensions checked");
    ax.iter().zip(b).map(|(p, q)| (q - p) * (q - p)).sum::<f64>().sqrt()
}

/// Preconditioned conjugate gradients for a symmetric positive definite `a`.
pub fn conjugate_gradient(
    a: &CsrMatrix,
    b: &[f64],
    x0: Option<&[f64]>,
    options: &CgOptions,
) -> Result<CgSolution, LinalgError> {
    conjugate_gradient_monitored(a, b, x0, options, |_, _| {})
}

/// As [`conjugate_gradient`], calling `monitor(iteration, x)` after every
/// update of the iterate.
pub fn conjugate_gradient_monitored<M>(
    a: &CsrMatrix,
    b: &[f64],
    x0: Option<&[f64]>,
    options: &CgOptions,
    mut monitor: M,
) -> Result<CgSolution, LinalgError>
where
    M: FnMut(usize, &[f64]),
{
    let n = a.dim();
    if b.len() != n {
        return Err(LinalgError::DimensionMismatch { expected: n, got: b.len() });
    }
    if !(options.tol > 0.0) {
        return Err(LinalgError::InvalidTolerance(options.tol));
    }
    let max_iter = options.max_iter.unwrap_or(20 * n);

    let inv_diag: Vec<f64> = match options.preconditioner {
        Preconditioner::None => vec![1.0; n],
        Preconditioner::Jacobi => a
            .diagonal()
            .iter()
            .map(|&d| if d > 0.0 { 1.0 / d } else { 1.0 })
            .collect(),
    };

    let mut x = match x0 {
        Some(x0) if x0.len() != n => return Err(LinalgError::DimensionMismatch { expected: n, got: x0.len() }),
        Some(x0) => x0.to_vec(),
        None => vec![0.0; n],
    };
    let b_norm = dot(b, b).sqrt();
    if b_norm == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return Ok(CgSolution { x, iterations: 0, residual: 0.0 });
    }
    let target = options.tol * b_norm;

    let mut r: Vec<f64> = {
        let ax = a.spmv(&x)?;
        b.iter().zip(&ax).map(|(p, q)| p - q).collect()
    };
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(p, q)| p * q).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];

    let mut best = x.clone();
    let mut best_res = dot(&r, &r).sqrt();
    if best_res <= target {
        return Ok(CgSolution { x, iterations: 0, residual: best_res });
    }

    for it in 1..=max_iter {
        a.spmv_into(&p, &mut ap)?;
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            return Err(LinalgError::IndefiniteMatrix { iteration: it, curvature: pap });
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        monitor(it, &x);
        let res = dot(&r, &r).sqrt();
        if res < best_res {
            best_res = res;
            best.copy_from_slice(&x);
        }
        if res <= target {
            // guard against drift of the recursive residual
            let actual = true_residual(a, b, &x);
            if actual <= target {
                return Ok(CgSolution { x, iterations: it, residual: actual });
            }
            r = {
                let ax = a.spmv(&x)?;
                b.iter().zip(&ax).map(|(p, q)| p - q).collect()
            };
        }
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_next = dot(&r, &z);
        let beta = rz_next / rz;
        rz = rz_next;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }

    let residual = true_residual(a, b, &best);
    Err(LinalgError::MaxIterationsExceeded {
        best: Box::new(CgSolution {
            x: best,
            iterations: max_iter,
            residual,
        }),
    })
}
