use robinfem::error_norms::consistency_residual;
use robinfem::fem::{EdgeRule, Order, TriangleRule};
use robinfem::harness::{
    emit_report, lookup, parse_config, quick_config, run_convergence_study, ReportFormat, CSV_HEADER,
};
use robinfem::mesh::generate_disk_mesh;

#[test]
fn identical_configs_give_identical_csv() {
    let mut config = quick_config("cubic10", Order::Linear, &[32, 64]);
    config.exact_domain = true;
    config.diagnostics = true;
    let a = run_convergence_study(&config).unwrap().to_csv();
    let b = run_convergence_study(&config).unwrap().to_csv();
    assert_eq!(a.as_bytes(), b.as_bytes());
}

#[test]
fn errors_decrease_with_refinement() {
    for (order, levels) in [(Order::Linear, &[32, 64, 128][..]), (Order::Quadratic, &[32, 64, 128][..])] {
        let mut config = quick_config("cubic10", order, levels);
        config.exact_domain = true;
        let report = run_convergence_study(&config).unwrap();
        for pair in report.rows.windows(2) {
            for (a, b) in pair[0].discrete.as_array().iter().zip(pair[1].discrete.as_array()) {
                assert!(b < *a, "{order}: {a} -> {b}");
            }
            for (a, b) in pair[0].exact.unwrap().as_array().iter().zip(pair[1].exact.unwrap().as_array()) {
                assert!(b < *a);
            }
        }
    }
}

#[test]
fn boundary_errors_agree_on_both_domains() {
    for order in [Order::Linear, Order::Quadratic] {
        let mut config = quick_config("cubic10", order, &[32, 64, 128]);
        config.exact_domain = true;
        for row in run_convergence_study(&config).unwrap().rows {
            let discrete = row.discrete.l2_gamma;
            let exact = row.exact.unwrap().l2_gamma;
            assert!(exact <= 3.0 * discrete && discrete <= 3.0 * exact, "N={} {discrete} {exact}", row.n);
        }
    }
}

#[test]
fn report_files() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("study.cfg");
    std::fs::write(&config_path, "# coarse run\norder = 1\nlevels = 16, 32, 64\nexact_domain = true\n").unwrap();
    let config = parse_config(&config_path).unwrap();
    let report = run_convergence_study(&config).unwrap();

    let csv_path = dir.path().join("out.csv");
    emit_report(&report, ReportFormat::Csv, &csv_path).unwrap();
    let text = std::fs::read_to_string(&csv_path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with(CSV_HEADER));
    assert!(header.ends_with("eoc_L2_Gamma_exact"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[0][6..10], ["-", "-", "-", "-"]);
    for (row, parsed) in report.rows.iter().zip(&rows) {
        let err: f64 = parsed[2].parse().unwrap();
        assert!((err - row.discrete.grad_omega).abs() <= 5e-6 * err);
    }

    let md_path = dir.path().join("out.md");
    emit_report(&report, ReportFormat::Markdown, &md_path).unwrap();
    let md = std::fs::read_to_string(&md_path).unwrap();
    assert_eq!(md.lines().count(), 5);
}

#[test]
fn residual_of_inconsistent_data_decays_at_first_order() {
    // a shifted Robin datum leaves an O(h) residual; consistent data decay faster
    let sol = lookup("cubic10").unwrap();
    let (qt, qe) = (TriangleRule::triangle(7), EdgeRule::gauss(7));
    let mut consistent = Vec::new();
    let mut shifted = Vec::new();
    for n in [32, 64, 128] {
        let mesh = generate_disk_mesh(n, Order::Linear).unwrap();
        consistent.push(consistency_residual(&mesh, sol.u, sol.grad_u, sol.f, sol.tau, &qt, &qe).unwrap());
        shifted.push(consistency_residual(&mesh, sol.u, sol.grad_u, sol.f, |p| (sol.tau)(p) + 0.1, &qt, &qe).unwrap());
    }
    assert!(shifted[2] > 10.0 * consistent[2]);
    for i in 0..2 {
        let ratio = shifted[i + 1] / shifted[i];
        assert!((0.4..=0.6).contains(&ratio), "{ratio}");
        assert!(consistent[i + 1] / consistent[i] < ratio);
    }
}
