//! Second-smallest Laplacian eigenvalue (Fiedler value).
//!
//! For a connected component the constant vector spans the kernel of
//! `L = D - A`, so `lambda_2` is the smallest eigenvalue of `L` restricted
//! to the orthogonal complement of the constant vector. We run Lanczos with
//! full reorthogonalisation in that complement and stop once the Ritz
//! residual of the smallest Ritz pair drops below the tolerance.

use rand::Rng;

use super::{NodeId, SocialGraph};
use crate::{rng, Error, Result};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Default)]
pub enum ConnectivityScope {
    /// Exact definition: zero whenever the graph is disconnected.
    #[default]
    WholeGraph,
    /// Fiedler value of the largest connected component.
    LargestComponent,
}

pub fn algebraic_connectivity(graph: &SocialGraph, tolerance: f64) -> Result<f64> {
    algebraic_connectivity_in(graph, tolerance, ConnectivityScope::WholeGraph)
}

pub fn algebraic_connectivity_in(
    graph: &SocialGraph,
    tolerance: f64,
    scope: ConnectivityScope,
) -> Result<f64> {
    if tolerance.is_nan() || tolerance <= 0.0 {
        return Err(Error::InvalidInput("tolerance must be positive".into()));
    }
    let components = graph.components();
    let component = match scope {
        ConnectivityScope::WholeGraph => {
            if graph.node_count() < 2 {
                return Err(Error::InvalidInput(
                    "algebraic connectivity needs at least 2 nodes".into(),
                ));
            }
            if components.len() > 1 {
                return Ok(0.0);
            }
            &components[0]
        }
        ConnectivityScope::LargestComponent => {
            // ties resolved toward the component with the smallest member
            match components.iter().rev().max_by_key(|c| c.len()) {
                Some(c) if c.len() >= 2 => c,
                _ => return Ok(0.0),
            }
        }
    };
    Ok(fiedler_of_component(graph, component, tolerance))
}

struct Laplacian {
    degree: Vec<f64>,
    offsets: Vec<usize>,
    targets: Vec<usize>,
}

impl Laplacian {
    fn of_component(graph: &SocialGraph, component: &[NodeId]) -> Self {
        let mut local = vec![usize::MAX; graph.node_count()];
        for (i, v) in component.iter().enumerate() {
            local[v.index()] = i;
        }
        let mut offsets = Vec::with_capacity(component.len() + 1);
        let mut targets = Vec::new();
        let mut degree = Vec::with_capacity(component.len());
        offsets.push(0);
        for &v in component {
            let row = graph.neighbor_csr().row(v);
            degree.push(row.len() as f64);
            targets.extend(row.iter().map(|w| local[w.index()]));
            offsets.push(targets.len());
        }
        Laplacian {
            degree,
            offsets,
            targets,
        }
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        for i in 0..x.len() {
            let mut s = self.degree[i] * x[i];
            for &j in &self.targets[self.offsets[i]..self.offsets[i + 1]] {
                s -= x[j];
            }
            out[i] = s;
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn remove_mean(x: &mut [f64]) {
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    x.iter_mut().for_each(|v| *v -= mean);
}

fn fiedler_of_component(graph: &SocialGraph, component: &[NodeId], tolerance: f64) -> f64 {
    let n = component.len();
    if n == 2 {
        return 2.0;
    }
    let lap = Laplacian::of_component(graph, component);
    let mut rng = rng::seeded(0x5eed_f1ed);
    let mut q: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
    remove_mean(&mut q);
    let s = norm(&q);
    q.iter_mut().for_each(|v| *v /= s);

    let max_steps = n - 1;
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut w = vec![0.0; n];
    let mut estimate = f64::NAN;

    for step in 0..max_steps {
        lap.apply(&q, &mut w);
        let a = dot(&q, &w);
        alpha.push(a);
        basis.push(q.clone());
        // two passes of classical Gram-Schmidt against the whole basis
        for _ in 0..2 {
            remove_mean(&mut w);
            for b in &basis {
                let c = dot(b, &w);
                w.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
            }
        }
        let b = norm(&w);

        let (theta, last) = smallest_ritz(&alpha, &beta);
        estimate = theta;
        let residual = b * last.abs();
        let exhausted = step + 1 == max_steps || b <= 1e-12 * (1.0 + a.abs());
        if residual < tolerance * 0.5 || exhausted {
            break;
        }
        beta.push(b);
        q.iter_mut().zip(&w).for_each(|(x, y)| *x = y / b);
    }
    estimate.max(0.0)
}

/// Smallest eigenvalue of the symmetric tridiagonal matrix with diagonal
/// `alpha` and off-diagonal `beta`, and the last component of its unit
/// eigenvector.
fn smallest_ritz(alpha: &[f64], beta: &[f64]) -> (f64, f64) {
    let k = alpha.len();
    if k == 1 {
        return (alpha[0], 1.0);
    }
    let theta = smallest_tridiagonal_eigenvalue(alpha, beta);
    let v = tridiagonal_eigenvector(alpha, beta, theta);
    (theta, v[k - 1])
}

/// Number of eigenvalues strictly below `x` (Sturm sequence).
fn count_below(alpha: &[f64], beta: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut d = 1.0f64;
    for i in 0..alpha.len() {
        let off = if i == 0 { 0.0 } else { beta[i - 1] * beta[i - 1] };
        d = alpha[i] - x - if i == 0 { 0.0 } else { off / d };
        if d == 0.0 {
            d = -f64::EPSILON * (1.0 + x.abs());
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

fn smallest_tridiagonal_eigenvalue(alpha: &[f64], beta: &[f64]) -> f64 {
    let k = alpha.len();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..k {
        let r = if i > 0 { beta[i - 1].abs() } else { 0.0 } + if i + 1 < k { beta[i].abs() } else { 0.0 };
        lo = lo.min(alpha[i] - r);
        hi = hi.max(alpha[i] + r);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if count_below(alpha, beta, mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Inverse iteration on `T - theta I` with an LU factorisation with
/// partial pivoting.
fn tridiagonal_eigenvector(alpha: &[f64], beta: &[f64], theta: f64) -> Vec<f64> {
    let k = alpha.len();
    let scale = alpha.iter().map(|a| a.abs()).fold(1.0, f64::max);
    let shift = theta - 1e-10 * scale;
    let mut x = vec![1.0; k];
    for _ in 0..3 {
        x = solve_tridiagonal(alpha, beta, shift, &x);
        let s = norm(&x);
        if !s.is_finite() || s == 0.0 {
            break;
        }
        x.iter_mut().for_each(|v| *v /= s);
    }
    x
}

fn solve_tridiagonal(alpha: &[f64], beta: &[f64], shift: f64, rhs: &[f64]) -> Vec<f64> {
    // Gaussian elimination with partial pivoting (the dgtsv scheme);
    // `du2` holds the fill-in on the second superdiagonal.
    let k = alpha.len();
    let tiny = 1e-300;
    let mut d: Vec<f64> = alpha.iter().map(|a| a - shift).collect();
    let mut du: Vec<f64> = beta.to_vec();
    let mut dl: Vec<f64> = beta.to_vec();
    let mut du2 = vec![0.0; k];
    let mut b = rhs.to_vec();
    for i in 0..k - 1 {
        if d[i].abs() >= dl[i].abs() {
            if d[i].abs() < tiny {
                d[i] = tiny;
            }
            let fact = dl[i] / d[i];
            d[i + 1] -= fact * du[i];
            b[i + 1] -= fact * b[i];
        } else {
            let fact = d[i] / dl[i];
            d[i] = dl[i];
            let temp = d[i + 1];
            d[i + 1] = du[i] - fact * temp;
            if i + 2 < k {
                du2[i] = du[i + 1];
                du[i + 1] = -fact * du2[i];
            }
            du[i] = temp;
            let tb = b[i];
            b[i] = b[i + 1];
            b[i + 1] = tb - fact * b[i + 1];
        }
        dl[i] = 0.0;
    }
    if d[k - 1].abs() < tiny {
        d[k - 1] = tiny;
    }
    let mut x = vec![0.0; k];
    for i in (0..k).rev() {
        let mut s = b[i];
        if i + 1 < k {
            s -= du[i] * x[i + 1];
        }
        if i + 2 < k {
            s -= du2[i] * x[i + 2];
        }
        x[i] = s / d[i];
    }
    x
}
