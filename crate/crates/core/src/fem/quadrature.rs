//! Quadrature on the reference triangle `T̂ = {ξ, η ≥ 0, ξ + η ≤ 1}` and the
//! unit edge `[0, 1]`.

use std::f64::consts::PI;

/// Points and weights on a reference cell of dimension `D` with the
/// polynomial degree the rule integrates exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule<const D: usize> {
    points: Vec<[f64; D]>,
    weights: Vec<f64>,
    exactness_degree: usize,
}

pub type TriangleRule = QuadratureRule<2>;
pub type EdgeRule = QuadratureRule<1>;

impl<const D: usize> QuadratureRule<D> {
    pub fn points(&self) -> &[[f64; D]] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn exactness_degree(&self) -> usize {
        self.exactness_degree
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[f64; D], f64)> {
        self.points.iter().zip(self.weights.iter().copied())
    }
}

/// Legendre polynomial P_n and P_{n-1} at `x`.
fn legendre_pair(n: usize, x: f64) -> (f64, f64) {
    let (mut prev, mut cur) = (1.0, x);
    for k in 2..=n {
        let next = ((2 * k - 1) as f64 * x * cur - (k - 1) as f64 * prev) / k as f64;
        prev = cur;
        cur = next;
    }
    (cur, prev)
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, `n ≥ 2`, by Newton
/// iteration on P_n from the Chebyshev-like initial guesses.
fn gauss_legendre_symmetric(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let derivative = |x: f64| {
        let (p, q) = legendre_pair(n, x);
        (p, n as f64 * (x * p - q) / (x * x - 1.0))
    };
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = derivative(x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = derivative(x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

impl EdgeRule {
    /// `n`-point Gauss–Legendre rule on `[0, 1]`, exact to degree `2n − 1`.
    pub fn gauss(n: usize) -> Self {
        assert!(n >= 1, "Gauss rule needs at least one point");
        if n == 1 {
            return Self {
                points: vec![[0.5]],
                weights: vec![1.0],
                exactness_degree: 1,
            };
        }
        let (nodes, weights) = gauss_legendre_symmetric(n);
        Self {
            points: nodes.iter().map(|&x| [0.5 * (x + 1.0)]).collect(),
            weights: weights.iter().map(|&w| 0.5 * w).collect(),
            exactness_degree: 2 * n - 1,
        }
    }

    /// Trapezoidal rule: evaluates at the two endpoints only.
    pub fn endpoints() -> Self {
        Self {
            points: vec![[0.0], [1.0]],
            weights: vec![0.5, 0.5],
            exactness_degree: 1,
        }
    }
}

impl TriangleRule {
    /// A rule on `T̂` exact to at least `degree`.
    ///
    /// Degrees up to 5 use the classical symmetric rules (1, 3 and 7 points);
    /// higher degrees use a collapsed Gauss product rule.
    pub fn triangle(degree: usize) -> Self {
        match degree {
            0 | 1 => Self {
                points: vec![[1.0 / 3.0, 1.0 / 3.0]],
                weights: vec![0.5],
                exactness_degree: 1,
            },
            2 => {
                let w = 1.0 / 6.0;
                Self {
                    points: vec![[1.0 / 6.0, 1.0 / 6.0], [2.0 / 3.0, 1.0 / 6.0], [1.0 / 6.0, 2.0 / 3.0]],
                    weights: vec![w, w, w],
                    exactness_degree: 2,
                }
            }
            3..=5 => Self::seven_point(),
            _ => Self::collapsed(degree),
        }
    }

    /// Seven-point degree-5 rule (Radon).
    fn seven_point() -> Self {
        let s15 = 15f64.sqrt();
        let a1 = (6.0 - s15) / 21.0;
        let b1 = (9.0 + 2.0 * s15) / 21.0;
        let a2 = (6.0 + s15) / 21.0;
        let b2 = (9.0 - 2.0 * s15) / 21.0;
        let w0 = 9.0 / 80.0;
        let w1 = (155.0 - s15) / 2400.0;
        let w2 = (155.0 + s15) / 2400.0;
        Self {
            points: vec![
                [1.0 / 3.0, 1.0 / 3.0],
                [a1, a1],
                [b1, a1],
                [a1, b1],
                [a2, a2],
                [b2, a2],
                [a2, b2],
            ],
            weights: vec![w0, w1, w1, w1, w2, w2, w2],
            exactness_degree: 5,
        }
    }

    /// Gauss product rule on the square collapsed onto `T̂` via
    /// `ξ = u, η = v (1 − u)`.
    fn collapsed(degree: usize) -> Self {
        let nu = (degree + 2).div_ceil(2);
        let nv = (degree + 1).div_ceil(2);
        let gu = EdgeRule::gauss(nu);
        let gv = EdgeRule::gauss(nv);
        let mut points = Vec::with_capacity(nu * nv);
        let mut weights = Vec::with_capacity(nu * nv);
        for (u, wu) in gu.iter() {
            for (v, wv) in gv.iter() {
                points.push([u[0], v[0] * (1.0 - u[0])]);
                weights.push(wu * wv * (1.0 - u[0]));
            }
        }
        Self {
            points,
            weights,
            exactness_degree: degree,
        }
    }
}
