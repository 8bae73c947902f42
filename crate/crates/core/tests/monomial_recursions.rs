use std::collections::BTreeMap;

use pcf_calculus::monomial::{
    build_monomial_table, compare_golden, golden_table, load_errata, ratio_column, render_tables,
    table_csv, table_json, verify_neighbor_identity, ErratumKind, MonomialTable,
};
use pcf_calculus::{FractalDescriptor, Rational};

fn table(name: &str, degree: usize) -> MonomialTable {
    build_monomial_table(&FractalDescriptor::builtin(name).unwrap(), degree).unwrap()
}

fn columns(t: &MonomialTable) -> BTreeMap<String, Vec<Option<Rational>>> {
    let col = |s: &pcf_calculus::SemiCirculantSeq| {
        s.entries().iter().cloned().map(Some).collect::<Vec<_>>()
    };
    BTreeMap::from([
        ("alpha".to_string(), col(&t.alpha)),
        ("beta".to_string(), col(&t.beta)),
        ("gamma".to_string(), col(&t.gamma)),
    ])
}

#[test]
fn printed_tables_agree_except_listed_errata() {
    let errata = load_errata().unwrap();
    let mut listed = 0;
    for name in ["sg3", "hg", "sg4"] {
        let t = table(name, 20);
        let cmp = compare_golden(&golden_table(name).unwrap(), &columns(&t), &errata).unwrap();
        assert!(cmp.total() >= 40);
        let bad: Vec<_> = cmp
            .unexplained()
            .map(|c| (c.j, c.column.clone(), c.printed.clone()))
            .collect();
        assert!(bad.is_empty(), "{name}: {bad:?}");
        listed += cmp.mismatches().count();
    }
    assert_eq!(listed, 3);
}

#[test]
fn ratio_table_and_final_ratios() {
    let sg3 = table("sg3", 20);
    let hg = table("hg", 20);
    let sg4 = table("sg4", 20);
    let computed = BTreeMap::from([
        ("sg3_alpha".to_string(), ratio_column(&sg3.alpha)),
        ("sg3_beta".to_string(), ratio_column(&sg3.beta)),
        ("hg_alpha".to_string(), ratio_column(&hg.alpha)),
        ("hg_beta".to_string(), ratio_column(&hg.beta)),
        ("sg4_beta".to_string(), ratio_column(&sg4.beta)),
    ]);
    let cmp = compare_golden(
        &golden_table("ratios").unwrap(),
        &computed,
        &load_errata().unwrap(),
    )
    .unwrap();
    assert_eq!(cmp.unexplained().count(), 0);
    let kinds: Vec<_> = cmp.mismatches().map(|c| c.erratum.unwrap().0).collect();
    assert_eq!(kinds, vec![ErratumKind::Magnitude, ErratumKind::LastDigit]);
    for (col, printed) in [
        ("sg3_alpha", "-124.6844211"),
        ("hg_alpha", "-46.72891784"),
        ("hg_beta", "-46.72891784"),
        ("sg4_beta", "-338.8101259"),
    ] {
        let cell = cmp
            .cells
            .iter()
            .find(|c| c.j == 19 && c.column == col)
            .unwrap();
        assert_eq!(cell.printed, printed);
        assert!(cell.matches, "{col}");
    }
}

#[test]
fn neighbor_identity_on_v1() {
    for name in ["sg", "sg3", "hg", "sg4"] {
        let t = table(name, 5);
        for j in 0..=5 {
            let r = verify_neighbor_identity(&t, j).unwrap();
            assert!(r.holds(), "{name} j={j}: {r:?}");
        }
    }
}

#[test]
fn sg_residual_at_first_degree() {
    let t = table("sg", 2);
    let r = verify_neighbor_identity(&t, 1).unwrap();
    assert!(r.residuals.is_empty());
    assert_eq!(r.ranks.len(), 3);
}

#[test]
fn exports_carry_exact_values() {
    let t = table("sg", 3);
    let csv = table_csv(&t, 10).unwrap();
    assert!(csv.lines().nth(3).unwrap().starts_with("2,1/180,"));
    let json: serde_json::Value = serde_json::from_str(&table_json(&t, 10).unwrap()).unwrap();
    assert_eq!(json["alpha"][1]["exact"], "1/6");
    assert_eq!(json["auxiliary"]["1"]["a"][0]["exact"], "1");
    let text = render_tables(&t, 10);
    assert!(text.contains("0.5555555556e-2"));
}
