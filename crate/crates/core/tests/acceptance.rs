//! Runs the ten acceptance checks and prints one PASS/FAIL line per check.
//!
//! Checks 4 and 6 compare against printed formulas that contain misprints; they are
//! reported as FAIL, and this target asserts that the disagreements are exactly the
//! documented ones and nothing else.

use std::collections::BTreeSet;

use mvop_core::verify::{self, CheckResult};

fn report(r: &CheckResult) {
    println!("{}", r.line());
    for d in &r.details {
        println!("        {d}");
    }
}

fn documented_table_misprints() -> BTreeSet<(usize, String, String)> {
    let mut s = BTreeSet::new();
    for d in ["[1, 0]", "[2, 0]", "[1, 1]", "[3, 0]", "[2, 1]", "[1, 2]"] {
        s.insert((2, "Gamma-".to_string(), format!("d={d} row 1")));
    }
    let n3 = [
        ("G22", "(1,1)"),
        ("L2", "(2,2)"),
        ("L2", "(3,3)"),
        ("L2", "(4,4)"),
        ("C3", "(1,2)"),
        ("Upsilon1", "(1,1)"),
        ("Upsilon1", "(2,2)"),
        ("Upsilon1", "(3,3)"),
        ("Upsilon1", "(4,4)"),
        ("Upsilon3", "(1,1)"),
        ("Upsilon3", "(1,2)"),
        ("Upsilon3", "(2,2)"),
        ("Upsilon3", "(3,2)"),
        ("Upsilon3", "(3,3)"),
        ("Upsilon3", "(4,4)"),
    ];
    for (t, e) in n3 {
        s.insert((3, t.to_string(), e.to_string()));
    }
    s
}

fn main() {
    let results = verify::run_all(0);
    println!();
    for r in &results {
        report(r);
    }
    println!();
    for r in &results {
        println!("criterion {:>2}: {}", r.id, if r.passed { "PASS" } else { "FAIL" });
    }

    let failed: Vec<u8> = results.iter().filter(|r| !r.passed).map(|r| r.id).collect();
    assert_eq!(failed, vec![4, 6], "unexpected set of failing criteria");

    let scalar = &results[3];
    let failing: Vec<&String> = scalar.details.iter().filter(|d| d.starts_with("FAIL")).collect();
    assert_eq!(failing.len(), 1);
    assert!(failing[0].contains("n=2: printed quartic"));
    assert!(scalar.details.iter().any(|d| d.contains("phi_i -> 3 phi_i the quartic matches with constant -1")));
    assert!(scalar.details.iter().any(|d| d.contains("n=3: printed sextic, matching constant 1")));

    let found: BTreeSet<(usize, String, String)> = verify::operator_mismatches(3)
        .unwrap()
        .into_iter()
        .map(|(n, m)| (n, m.table, m.entry))
        .collect();
    assert_eq!(found, documented_table_misprints());

    for r in &results {
        assert!(r.seconds < 300.0, "criterion {} took {:.1}s", r.id, r.seconds);
    }
    println!("\nacceptance: only the documented reference discrepancies fail");
}
