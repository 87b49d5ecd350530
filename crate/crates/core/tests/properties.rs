use proptest::prelude::*;

use robinfem::fem::{Order, TriangleRule};
use robinfem::linalg::{conjugate_gradient, csr_from_triplets, CgOptions};
use robinfem::mesh::{generate_disk_mesh, parse_mesh, write_mesh};
use robinfem::{DomainGeometry, Vec2};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn projection_decomposes_tube_points(
        semi_x in 0.6f64..1.4,
        semi_y in 0.6f64..1.4,
        t in -3.1f64..3.1,
        frac in -0.95f64..0.95,
    ) {
        let domain = DomainGeometry::ellipse(semi_x, semi_y).unwrap();
        let b = domain.boundary_sample(t);
        let x = b.point + b.normal * (frac * domain.tube_halfwidth());
        let p = domain.closest_point(&x).unwrap();
        let d = domain.signed_distance(&x).unwrap();
        prop_assert!(d.exact);
        prop_assert!((p - b.point).norm() < 1e-9);
        prop_assert!((p + domain.unit_normal(&p).unwrap() * d.value - x).norm() < 1e-9);
    }

    #[test]
    fn seven_point_rule_integrates_quintics(coeffs in prop::collection::vec(-5.0f64..5.0, 21)) {
        // Σ c_ab x^a y^b over a + b ≤ 5, against a! b! / (a + b + 2)!
        let factorial = |n: u32| (1..=n).map(f64::from).product::<f64>();
        let rule = TriangleRule::triangle(5);
        let mut exact = 0.0;
        let mut approx = 0.0;
        let mut k = 0;
        for a in 0..=5u32 {
            for b in 0..=(5 - a) {
                let c = coeffs[k];
                k += 1;
                exact += c * factorial(a) * factorial(b) / factorial(a + b + 2);
                approx += c * rule.iter().map(|(p, w)| w * p[0].powi(a as i32) * p[1].powi(b as i32)).sum::<f64>();
            }
        }
        prop_assert!((exact - approx).abs() < 1e-12);
    }

    #[test]
    fn cg_solves_diagonally_dominant_systems(
        entries in prop::collection::vec((0usize..12, 0usize..12, -1.0f64..1.0), 0..40),
        rhs in prop::collection::vec(-1.0f64..1.0, 12),
    ) {
        let mut triplets = Vec::new();
        for &(r, c, v) in &entries {
            if r != c {
                triplets.push((r, c, v));
                triplets.push((c, r, v));
            }
        }
        let mut row_sums = [0.0f64; 12];
        for &(r, _, v) in &triplets {
            row_sums[r] += v.abs();
        }
        for (i, s) in row_sums.iter().enumerate() {
            triplets.push((i, i, s + 1.0));
        }
        let a = csr_from_triplets(12, &triplets).unwrap();
        let sol = conjugate_gradient(&a, &rhs, None, &CgOptions::default()).unwrap();
        let ax = a.spmv(&sol.x).unwrap();
        let res: f64 = ax.iter().zip(&rhs).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt();
        let norm: f64 = rhs.iter().map(|q| q * q).sum::<f64>().sqrt();
        prop_assert!(res <= 1e-9 * norm.max(1e-300));
    }

    #[test]
    fn mesh_files_round_trip(n in 8usize..80, quadratic in any::<bool>()) {
        let order = if quadratic { Order::Quadratic } else { Order::Linear };
        let mesh = generate_disk_mesh(n, order).unwrap();
        let back = parse_mesh(&write_mesh(&mesh)).unwrap();
        prop_assert_eq!(back, mesh);
    }

    #[test]
    fn generated_meshes_put_boundary_nodes_on_the_circle(n in 8usize..120) {
        let mesh = generate_disk_mesh(n, Order::Quadratic).unwrap();
        prop_assert_eq!(mesh.num_boundary_vertices(), n);
        mesh.check_boundary_on(&DomainGeometry::unit_disk()).unwrap();
        for (id, p) in mesh.nodes().iter().enumerate() {
            if mesh.is_boundary_node(id) {
                prop_assert!((p.norm() - 1.0).abs() < 1e-12);
            } else {
                prop_assert!(p.norm() < 1.0 - 1e-3 || p == &Vec2::zeros());
            }
        }
    }
}
