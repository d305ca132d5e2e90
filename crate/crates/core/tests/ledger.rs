use msl_core::ledger::{ledger_cases, ledger_verify, Wrapper};

#[test]
fn built_in_ledger_passes() {
    let report = ledger_verify(4000, 2024).unwrap();
    for row in &report.rows {
        println!("{row}");
    }
    assert!(report.passed());
    assert!(report.rows.iter().all(|r| r.violations == 0));
}

#[test]
fn pass_through_lifts_select_identically() {
    let cases = ledger_cases(1).unwrap();
    let pass_through: Vec<_> = cases.iter().filter(|c| c.identical).collect();
    assert!(pass_through.len() >= 2);
    for case in pass_through {
        assert_eq!(case.wrapper, Wrapper::Lift);
        let row = case.evaluate(500, 9).unwrap();
        assert_eq!(row.expected_weight, row.inner_expected_weight);
        assert!(row.passed);
    }
}

#[test]
fn every_wrapper_kind_is_covered() {
    let cases = ledger_cases(3).unwrap();
    let has = |f: fn(&Wrapper) -> bool| cases.iter().any(|c| f(&c.wrapper));
    assert!(has(|w| *w == Wrapper::Lift));
    assert!(has(|w| *w == Wrapper::Project));
    assert!(has(|w| matches!(w, Wrapper::Perturb { steps: 2 })));
    assert!(has(|w| matches!(w, Wrapper::MultiProject { .. })));
    assert!(has(|w| matches!(w, Wrapper::Tree { thickness: 0 })));
    assert!(has(|w| matches!(w, Wrapper::Tree { thickness: 2 })));
}
