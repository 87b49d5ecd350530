use crate::Vec2;

use super::HarnessError;

/// Exact solution `u` with `∇u`, `f̃ = −Δu` and an extension `τ̃` of the
/// Robin data, valid near the unit circle.
#[derive(Clone, Copy)]
pub struct ManufacturedSolution {
    pub name: &'static str,
    pub u: fn(&Vec2) -> f64,
    pub grad_u: fn(&Vec2) -> Vec2,
    pub f: fn(&Vec2) -> f64,
    pub tau: fn(&Vec2) -> f64,
}

impl std::fmt::Debug for ManufacturedSolution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ManufacturedSolution").field("name", &self.name).finish()
    }
}

const CONSTANT: ManufacturedSolution = ManufacturedSolution {
    name: "constant",
    u: |_| 1.0,
    grad_u: |_| Vec2::zeros(),
    f: |_| 0.0,
    tau: |_| 1.0,
};

/// `u = 10x²y`; on the circle `τ(θ) = ∂_r u + u − u''(θ) = 110cos²θ sinθ − 20sin³θ`,
/// extended constant along rays.
const CUBIC10: ManufacturedSolution = ManufacturedSolution {
    name: "cubic10",
    u: |p| 10.0 * p.x * p.x * p.y,
    grad_u: |p| Vec2::new(20.0 * p.x * p.y, 10.0 * p.x * p.x),
    f: |p| -20.0 * p.y,
    tau: |p| {
        let (s, c) = p.y.atan2(p.x).sin_cos();
        110.0 * c * c * s - 20.0 * s * s * s
    },
};

const REGISTRY: [ManufacturedSolution; 2] = [CONSTANT, CUBIC10];

pub fn names() -> impl Iterator<Item = &'static str> {
    REGISTRY.iter().map(|s| s.name)
}

pub fn lookup(name: &str) -> Result<ManufacturedSolution, HarnessError> {
    REGISTRY
        .iter()
        .find(|s| s.name == name)
        .copied()
        .ok_or_else(|| HarnessError::UnknownSolution(name.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    /// `∂_n u + u − d²u/ds²` on the unit circle, with the arc derivative taken
    /// by a 5-point stencil.
    fn robin_oracle(sol: &ManufacturedSolution, theta: f64) -> f64 {
        let at = |t: f64| (sol.u)(&Vec2::new(t.cos(), t.sin()));
        let h = 1e-3;
        let d2 = (-at(theta + 2.0 * h) + 16.0 * at(theta + h) - 30.0 * at(theta) + 16.0 * at(theta - h) - at(theta - 2.0 * h))
            / (12.0 * h * h);
        let x = Vec2::new(theta.cos(), theta.sin());
        (sol.grad_u)(&x).dot(&x) + at(theta) - d2
    }

    #[test]
    fn constant_entry() {
        let s = lookup("constant").unwrap();
        let p = Vec2::new(0.3, 0.4);
        assert_eq!(((s.u)(&p), (s.f)(&p), (s.tau)(&p)), (1.0, 0.0, 1.0));
    }

    #[test]
    fn cubic10_source_matches_fd_laplacian() {
        let s = lookup("cubic10").unwrap();
        let p = Vec2::new(0.2, 0.5);
        assert!(((s.f)(&p) + 10.0).abs() < 1e-14);
        let h = 1e-3;
        let u = |x: f64, y: f64| (s.u)(&Vec2::new(x, y));
        let lap = (u(p.x + h, p.y) + u(p.x - h, p.y) + u(p.x, p.y + h) + u(p.x, p.y - h) - 4.0 * u(p.x, p.y)) / (h * h);
        assert!(((s.f)(&p) + lap).abs() < 1e-6);
    }

    #[test]
    fn cubic10_gradient_matches_fd() {
        let s = lookup("cubic10").unwrap();
        let p = Vec2::new(-0.4, 0.7);
        let h = 1e-6;
        let gx = ((s.u)(&Vec2::new(p.x + h, p.y)) - (s.u)(&Vec2::new(p.x - h, p.y))) / (2.0 * h);
        let gy = ((s.u)(&Vec2::new(p.x, p.y + h)) - (s.u)(&Vec2::new(p.x, p.y - h))) / (2.0 * h);
        assert!(((s.grad_u)(&p) - Vec2::new(gx, gy)).norm() < 1e-7);
    }

    #[test]
    fn robin_data_matches_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for sol in REGISTRY {
            for _ in 0..100 {
                let theta: f64 = rng.random_range(-PI..PI);
                let x = Vec2::new(theta.cos(), theta.sin());
                assert!(((sol.tau)(&x) - robin_oracle(&sol, theta)).abs() < 1e-6, "{}", sol.name);
            }
        }
        let s = lookup("cubic10").unwrap();
        let top = (s.tau)(&Vec2::new(0.0, 1.0));
        assert!((top - robin_oracle(&s, PI / 2.0)).abs() < 1e-6);
        assert!((top + 20.0).abs() < 1e-12);
    }

    #[test]
    fn tau_is_constant_along_rays() {
        let s = lookup("cubic10").unwrap();
        let p = Vec2::new(0.6, -0.8);
        assert!(((s.tau)(&p) - (s.tau)(&(p * 1.07))).abs() < 1e-13);
    }

    #[test]
    fn unknown_name() {
        assert!(matches!(lookup("quartic"), Err(HarnessError::UnknownSolution(n)) if n == "quartic"));
        assert_eq!(names().collect::<Vec<_>>(), ["constant", "cubic10"]);
    }
}
