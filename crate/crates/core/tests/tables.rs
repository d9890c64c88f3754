use struve_bounds::table::{TableArtifact, TableKind, TABLE_NU, TABLE_X};

#[test]
fn corollary_tables_shape_and_entries() {
    let t1 = TableArtifact::generate(TableKind::Table1).unwrap();
    let t2 = TableArtifact::generate(TableKind::Table2).unwrap();
    for t in [&t1, &t2] {
        assert_eq!(t.rows.len(), TABLE_NU.len());
        assert!(t.rows.iter().all(|r| r.len() == TABLE_X.len()));
        assert_eq!(t.row_labels, ["1", "2.5", "5", "7.5", "10"]);
        assert_eq!(t.col_labels, ["0.5", "5", "10", "25", "50", "100", "250"]);
    }
    assert_eq!(t1.entry("5", "25"), Some(0.3130));
    assert_eq!(t1.entry("1", "0.5"), Some(0.4959));
    assert_eq!(t2.entry("10", "25"), Some(4.5028));
    assert_eq!(t2.entry("1", "0.5"), Some(0.0041));
    assert_eq!(t2.entry("1", "5"), Some(0.1939));
}

#[test]
fn relative_errors_shrink_with_x_for_the_lower_bound() {
    let t1 = TableArtifact::generate(TableKind::Table1).unwrap();
    for row in &t1.rows {
        assert!(row.windows(2).all(|w| w[1] < w[0]), "{row:?}");
    }
}

#[test]
fn csv_and_json_round_trip_exactly() {
    for kind in [TableKind::Table1, TableKind::Table2, TableKind::Dconstants] {
        let t = TableArtifact::generate(kind).unwrap();
        let from_csv = TableArtifact::from_csv(kind, &t.to_csv().unwrap()).unwrap();
        assert_eq!(from_csv.rows, t.rows);
        assert_eq!(from_csv.row_labels, t.row_labels);
        assert_eq!(from_csv.col_labels, t.col_labels);
        assert_eq!(TableArtifact::from_json(&t.to_json().unwrap()).unwrap(), t);
    }
}

#[test]
fn output_is_deterministic() {
    for kind in [TableKind::Table2, TableKind::Dconstants] {
        let a = TableArtifact::generate(kind).unwrap();
        let b = TableArtifact::generate(kind).unwrap();
        assert_eq!(a.to_csv().unwrap(), b.to_csv().unwrap());
        assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
    }
}

#[test]
fn dconstant_table() {
    let t = TableArtifact::generate(TableKind::Dconstants).unwrap();
    assert_eq!(t.col_labels, ["D", "argmax_x", "upper_limit"]);
    let targets = [1.109, 1.331, 1.693, 1.990, 2.584];
    for (row, p) in t.rows.iter().zip(targets) {
        assert!((row[0] - p).abs() <= 1e-3, "{row:?}");
        assert!(row[0] < row[2]);
    }
    assert!(t.meta.tolerances.contains_key("golden_section_x_tol"));
}
