use std::collections::BTreeMap;

use pcf_calculus::monomial::{
    compare_golden, golden_table, load_errata, ratio_column, render_tables, table_csv, table_json,
    GoldenComparison,
};
use pcf_calculus::{build_monomial_table, MonomialTable, Rational, SemiCirculantSeq};
use serde_json::json;

use crate::config::{Format, RunConfig};
use crate::error::CliError;
use crate::output::Emitter;

/// Fractals with printed reference tables.
const PRINTED: [&str; 3] = ["sg3", "hg", "sg4"];

fn columns(t: &MonomialTable) -> BTreeMap<String, Vec<Option<Rational>>> {
    let col = |s: &SemiCirculantSeq| s.entries().iter().cloned().map(Some).collect::<Vec<_>>();
    BTreeMap::from([
        ("alpha".to_string(), col(&t.alpha)),
        ("beta".to_string(), col(&t.beta)),
        ("gamma".to_string(), col(&t.gamma)),
    ])
}

fn render_ratios(
    cols: &BTreeMap<String, Vec<Option<Rational>>>,
    degree: usize,
    digits: usize,
    format: Format,
) -> String {
    let cell = |n: &str, j: usize| cols[n].get(j).cloned().flatten();
    let decimal = |x: Option<Rational>| x.map_or("/".to_string(), |x| x.to_decimal_string(digits));
    let names: Vec<&str> = cols.keys().map(String::as_str).collect();
    match format {
        Format::Csv => {
            let mut out = format!("j,{}\n", names.join(","));
            for j in 0..=degree {
                let row: Vec<String> = names.iter().map(|n| decimal(cell(n, j))).collect();
                out.push_str(&format!("{j},{}\n", row.join(",")));
            }
            out
        }
        Format::Text => {
            let w = digits + 8;
            let head: Vec<String> = names.iter().map(|n| format!("{n:>w$}")).collect();
            let mut out = format!("{:>3}  {}\n", "j", head.join("  "));
            for j in 0..=degree {
                let row: Vec<String> = names
                    .iter()
                    .map(|n| format!("{:>w$}", decimal(cell(n, j))))
                    .collect();
                out.push_str(&format!("{j:>3}  {}\n", row.join("  ")));
            }
            out
        }
        Format::Json => {
            let v: BTreeMap<&str, Vec<serde_json::Value>> = names
                .iter()
                .map(|&n| {
                    let entries = (0..=degree)
                        .map(|j| match cell(n, j) {
                            Some(x) => json!({ "exact": x.to_string(), "decimal": x.to_decimal_string(digits) }),
                            None => serde_json::Value::Null,
                        })
                        .collect();
                    (n, entries)
                })
                .collect();
            serde_json::to_string_pretty(
                &json!({ "table": "ratios", "degree": degree, "columns": v }),
            )
            .expect("ratio table serializes")
        }
    }
}

/// Tally of one golden comparison; returns the first unexplained cell.
fn summarize(cmp: &GoldenComparison, strict: bool) -> Option<String> {
    eprintln!(
        "{}: {}/{} printed cells match",
        cmp.table,
        cmp.matched(),
        cmp.total()
    );
    for c in cmp.mismatches() {
        if let Some((kind, true)) = c.erratum {
            eprintln!(
                "  listed misprint ({kind:?}) {}[{}]: printed {}, exact value {}",
                c.column,
                c.j,
                c.printed,
                c.computed.to_decimal_string(12)
            );
        }
    }
    let first = if strict {
        cmp.mismatches().next()
    } else {
        cmp.unexplained().next()
    };
    first.map(|c| {
        format!(
            "{} {}[{}]: printed {}, computed {}",
            cmp.table,
            c.column,
            c.j,
            c.printed,
            c.computed.to_decimal_string(12)
        )
    })
}

/// Emit the monomial tables and compare them with the printed reference digits.
pub fn run(cfg: &RunConfig, strict: bool) -> Result<(), CliError> {
    let fractals = cfg.require_fractals()?;
    let degree = cfg.degree.unwrap_or(20);
    let format = cfg.format_or(Format::Text);
    let printed: Vec<&str> = fractals
        .iter()
        .map(|f| f.name.as_str())
        .filter(|n| PRINTED.contains(n))
        .collect();
    let with_ratios = !printed.is_empty() && degree >= 1;
    let mut out = Emitter::new(
        cfg.output.clone(),
        format,
        fractals.len() + usize::from(with_ratios) > 1,
    )?;
    let errata = load_errata()?;
    let mut failures = Vec::new();
    let mut ratio_cols = BTreeMap::new();

    for f in fractals {
        let t = build_monomial_table(f, degree)?;
        let body = match format {
            Format::Text => render_tables(&t, cfg.digits),
            Format::Csv => table_csv(&t, cfg.digits)?,
            Format::Json => table_json(&t, cfg.digits)?,
        };
        out.emit(&f.name, &body)?;

        if PRINTED.contains(&f.name.as_str()) {
            let mut golden = golden_table(&f.name)?;
            golden.rows.retain(|(j, _)| *j <= degree);
            failures.extend(summarize(
                &compare_golden(&golden, &columns(&t), &errata)?,
                strict,
            ));
            for (k, s) in [("alpha", &t.alpha), ("beta", &t.beta)] {
                ratio_cols.insert(format!("{}_{k}", f.name), ratio_column(s));
            }
        }
        if f.name == "sg4" {
            match t.gamma_alpha_defect() {
                None => eprintln!("sg4: gamma_j = 4 alpha_(j+1) holds for j < {degree}"),
                Some(j) => failures.push(format!("sg4: gamma_{j} differs from 4 alpha_{}", j + 1)),
            }
        }
    }

    if with_ratios {
        let mut golden = golden_table("ratios")?;
        let keep: Vec<usize> = (0..golden.columns.len())
            .filter(|&k| ratio_cols.contains_key(&golden.columns[k]))
            .collect();
        golden.columns = keep.iter().map(|&k| golden.columns[k].clone()).collect();
        for (_, row) in golden.rows.iter_mut() {
            *row = keep.iter().map(|&k| row[k].clone()).collect();
        }
        golden.rows.retain(|(j, _)| *j <= degree);
        ratio_cols.retain(|k, _| golden.columns.contains(k));
        out.emit(
            "ratios",
            &render_ratios(&ratio_cols, degree, cfg.digits, format),
        )?;
        failures.extend(summarize(
            &compare_golden(&golden, &ratio_cols, &errata)?,
            strict,
        ));
    }

    match failures.into_iter().next() {
        Some(first) => Err(CliError::Verification(first)),
        None => Ok(()),
    }
}
