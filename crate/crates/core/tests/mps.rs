use std::path::Path;

use oro_core::lp::parse_mps;

fn fixture(name: &str) -> String {
    std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)).unwrap()
}

fn row<'a>(lp: &'a oro_core::NominalLp, name: &str) -> &'a oro_core::LinearRow {
    lp.ineq.iter().find(|r| r.name == name).unwrap_or_else(|| panic!("no row {name}"))
}

#[test]
fn ranges_and_free_bounds() {
    let lp = parse_mps(&fixture("free_format.mps")).unwrap();
    assert_eq!(lp.objective, vec![1.0, -2.0, 0.5, 0.0]);
    // G row with range 3: 1 ≤ x1 + 2x4 ≤ 4.
    assert_eq!((row(&lp, "floor").coeffs[0], row(&lp, "floor").rhs), (-1.0, -1.0));
    assert_eq!((row(&lp, "floor_rng").coeffs[3], row(&lp, "floor_rng").rhs), (2.0, 4.0));
    // E row with positive range: 2.5 ≤ x3 + x4 ≤ 4.
    assert_eq!(row(&lp, "link").rhs, -2.5);
    assert_eq!(row(&lp, "link_rng").rhs, 4.0);
    assert!(lp.eq.is_empty());
    assert_eq!(lp.lower, vec![f64::NEG_INFINITY, f64::NEG_INFINITY, 1.25, 0.0]);
    assert_eq!(lp.upper, vec![f64::INFINITY, 8.0, 1.25, f64::INFINITY]);
}

#[test]
fn integer_markers_keep_bounds() {
    let lp = parse_mps(&fixture("integer_markers.mps")).unwrap();
    assert_eq!(lp.col_names, vec!["ITEM1", "ITEM2", "SLACK"]);
    assert_eq!(lp.lower, vec![0.0, 1.0, 0.0]);
    assert_eq!(lp.upper, vec![1.0, 3.0, f64::INFINITY]);
    assert_eq!(row(&lp, "WEIGHT").rhs, 9.0);
}
