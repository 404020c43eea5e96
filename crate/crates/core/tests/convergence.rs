//! Short convergence studies through the public API.

use maxwell_dg::convergence::{export, parse_csv, ExportFormat, FitAgainst};
use maxwell_dg::{run_study, FluxScheme, MeshProtocol, StudyConfig, TestCase};

fn short(scheme: FluxScheme<f64>, k: usize) -> maxwell_dg::ConvergenceStudy {
    let protocol = MeshProtocol::UniformRefinement { n0: 2, refinements: 3 };
    run_study(&StudyConfig::new(TestCase::PlaneWave, scheme, k, protocol)).unwrap()
}

#[test]
fn refinement_reduces_errors_at_the_expected_rate() {
    let st = short(FluxScheme::upwind(), 1);
    assert_eq!(st.records.len(), 4);
    assert!(st.failures.is_empty());
    for w in st.records.windows(2) {
        assert!((w[0].h / w[1].h - 2.0).abs() < 1e-12);
        assert_eq!(w[1].ndof, 4 * w[0].ndof);
        assert!(w[1].err_e < w[0].err_e && w[1].err_h < w[0].err_h);
    }
    let fit = st.fit.unwrap();
    assert!(fit.beta > 1.5 && fit.gamma > 1.5, "{fit:?}");
}

#[test]
fn fits_against_h_and_ndof_agree_under_uniform_refinement() {
    let st = short(FluxScheme::penalized(), 1);
    let window = &st.records[1..];
    let by_h = maxwell_dg::convergence::estimate_order(window, FitAgainst::MeshSize).unwrap();
    let by_n = maxwell_dg::convergence::estimate_order(window, FitAgainst::SqrtNdof).unwrap();
    assert!((by_h.beta - by_n.beta).abs() < 1e-9);
    assert!((by_h.gamma - by_n.gamma).abs() < 1e-9);
    // The E field converges one order faster than H for this flux.
    assert!(by_h.beta - by_h.gamma > 0.5, "{by_h:?}");
}

#[test]
fn exported_study_reloads() {
    let st = short(FluxScheme::Centered, 0);
    let text = export(&st, ExportFormat::Csv);
    assert_eq!(parse_csv(&text).unwrap(), st.records);
    assert!(text.lines().last().unwrap().starts_with("# fit beta="));
}
