//! Decimal tables, printed reference values, and CSV/JSON output.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Signed;
use serde::Deserialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::monomial::MonomialTable;
use crate::rational::{Rational, Rounding};
use crate::seq::SemiCirculantSeq;

const GOLDEN_SG3: &str = include_str!("../../data/golden/sg3.csv");
const GOLDEN_HG: &str = include_str!("../../data/golden/hg.csv");
const GOLDEN_SG4: &str = include_str!("../../data/golden/sg4.csv");
const GOLDEN_RATIOS: &str = include_str!("../../data/golden/ratios.csv");
const ERRATA: &str = include_str!("../../data/golden/errata.toml");

/// `a_{j-1} / a_j` for `j >= 1`.
pub fn ratio_column(s: &SemiCirculantSeq) -> Vec<Option<Rational>> {
    let e = s.entries();
    (0..e.len())
        .map(|j| {
            if j == 0 {
                None
            } else {
                e[j - 1].checked_div(&e[j]).ok()
            }
        })
        .collect()
}

/// Mantissa-first scientific form, without the exponent when it is zero.
fn sci(x: &Rational, digits: usize) -> String {
    let s = x.to_scientific(digits, Rounding::Nearest);
    let sign = if s.negative { "-" } else { "" };
    if s.exponent == 0 {
        format!("{sign}0.{}", s.digits)
    } else {
        format!("{sign}0.{}e{}", s.digits, s.exponent)
    }
}

/// Plain decimal with `digits` significant digits.
fn plain(x: &Rational, digits: usize) -> String {
    if x.is_zero() {
        return "0".into();
    }
    let e = x.to_scientific(digits, Rounding::Nearest).exponent;
    let places = (digits as i64 - e).max(0) as usize;
    x.to_fixed(places, Rounding::Nearest)
}

/// Text table of `α_j, β_j, γ_j` and the ratios `α_{j-1}/α_j`, `β_{j-1}/β_j`.
pub fn render_tables(table: &MonomialTable, digits: usize) -> String {
    let ra = ratio_column(&table.alpha);
    let rb = ratio_column(&table.beta);
    let w = digits + 9;
    let mut out = format!(
        "{} ({}), J = {}\n",
        table.fractal.title, table.fractal.name, table.degree
    );
    out += &format!(
        "{:>3}  {:>w$}  {:>w$}  {:>w$}  {:>w$}  {:>w$}\n",
        "j", "alpha_j", "beta_j", "gamma_j", "alpha_{j-1}/alpha_j", "beta_{j-1}/beta_j"
    );
    for j in 0..=table.degree {
        let r = |c: &Vec<Option<Rational>>| {
            c[j].as_ref()
                .map_or_else(|| "/".to_string(), |x| plain(x, digits))
        };
        out += &format!(
            "{:>3}  {:>w$}  {:>w$}  {:>w$}  {:>w$}  {:>w$}\n",
            j,
            sci(table.alpha.get(j), digits),
            sci(table.beta.get(j), digits),
            sci(table.gamma.get(j), digits),
            r(&ra),
            r(&rb),
        );
    }
    out
}

/// One row per degree: exact `p/q` strings and decimals.
pub fn table_csv(table: &MonomialTable, digits: usize) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let ser = |e: csv::Error| Error::Serialize(e.to_string());
    w.write_record([
        "j",
        "alpha",
        "beta",
        "gamma",
        "alpha_decimal",
        "beta_decimal",
        "gamma_decimal",
    ])
    .map_err(ser)?;
    for j in 0..=table.degree {
        let (a, b, g) = (table.alpha.get(j), table.beta.get(j), table.gamma.get(j));
        w.write_record([
            j.to_string(),
            a.to_string(),
            b.to_string(),
            g.to_string(),
            a.to_decimal_string(digits),
            b.to_decimal_string(digits),
            g.to_decimal_string(digits),
        ])
        .map_err(ser)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::Serialize(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Serialize(e.to_string()))
}

/// All sequences, including auxiliary ones, as JSON.
pub fn table_json(table: &MonomialTable, digits: usize) -> Result<String> {
    let seq = |s: &SemiCirculantSeq| {
        s.entries()
            .iter()
            .map(|x| json!({ "exact": x.to_string(), "decimal": x.to_decimal_string(digits) }))
            .collect::<Vec<_>>()
    };
    let aux: BTreeMap<String, BTreeMap<&String, Vec<_>>> = table
        .aux
        .iter()
        .map(|(k, m)| (k.to_string(), m.iter().map(|(n, s)| (n, seq(s))).collect()))
        .collect();
    let v = json!({
        "fractal": table.fractal.name,
        "degree": table.degree,
        "rho": table.fractal.rho.to_string(),
        "alpha": seq(&table.alpha),
        "beta": seq(&table.beta),
        "gamma": seq(&table.gamma),
        "auxiliary": aux,
    });
    serde_json::to_string_pretty(&v).map_err(|e| Error::Serialize(e.to_string()))
}

/// A printed decimal `digits * 10^-scale`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrintedCell {
    pub text: String,
    digits: BigInt,
    scale: i64,
}

impl PrintedCell {
    /// Accepts `-0.1234`, `12.5`, `0.5332440874e-2`.
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        let (mant, exp) = match t.split_once(['e', 'E']) {
            Some((m, e)) => (
                m,
                e.parse::<i64>()
                    .map_err(|_| Error::Parse(format!("bad exponent in {t:?}")))?,
            ),
            None => (t, 0),
        };
        let frac_len = mant.split_once('.').map_or(0, |(_, f)| f.len()) as i64;
        let digits: String = mant.chars().filter(|c| *c != '.').collect();
        let digits: BigInt = digits
            .parse()
            .map_err(|_| Error::Parse(format!("bad decimal {t:?}")))?;
        Ok(PrintedCell {
            text: t.to_string(),
            digits,
            scale: frac_len - exp,
        })
    }

    /// `x * 10^scale` rounded to nearest and truncated.
    fn candidates(x: &Rational, scale: i64) -> (BigInt, BigInt) {
        let y = x * &Rational::from_integer(10).pow(scale as i32);
        let (n, d) = (y.numer(), y.denom());
        let trunc = n / d;
        let two = BigInt::from(2);
        let mut round = (n.abs() * &two + d) / (d * &two);
        if n.is_negative() {
            round = -round;
        }
        (round, trunc)
    }

    fn matches_at(&self, x: &Rational, scale: i64) -> bool {
        let (r, t) = Self::candidates(x, scale);
        self.digits == r || self.digits == t
    }

    /// Agreement at every printed digit, under rounding or truncation.
    pub fn matches(&self, x: &Rational) -> bool {
        self.matches_at(x, self.scale)
    }

    /// Digits agree once the power of ten is shifted.
    pub fn matches_shifted(&self, x: &Rational) -> Option<i64> {
        (-4..=4)
            .filter(|&e| e != 0)
            .find(|&e| self.matches_at(x, self.scale + e))
    }

    /// Off by exactly one unit in the last printed place.
    pub fn off_by_last_digit(&self, x: &Rational) -> bool {
        let (r, t) = Self::candidates(x, self.scale);
        let one = BigInt::from(1);
        (&self.digits - r).abs() == one || (&self.digits - t).abs() == one
    }
}

/// A reference table: columns of printed cells, `None` where nothing is printed.
#[derive(Clone, Debug)]
pub struct GoldenTable {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<(usize, Vec<Option<PrintedCell>>)>,
}

impl GoldenTable {
    pub fn from_csv(name: &str, text: &str) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(text.as_bytes());
        let headers = rdr
            .headers()
            .map_err(|e| Error::Parse(e.to_string()))?
            .clone();
        let columns: Vec<String> = headers.iter().skip(1).map(str::to_string).collect();
        let mut rows = Vec::new();
        for rec in rdr.records() {
            let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
            let j: usize = rec[0]
                .parse()
                .map_err(|_| Error::Parse(format!("bad degree {:?}", &rec[0])))?;
            let cells = rec
                .iter()
                .skip(1)
                .map(|c| {
                    if c.trim() == "/" {
                        Ok(None)
                    } else {
                        PrintedCell::parse(c).map(Some)
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push((j, cells));
        }
        Ok(GoldenTable {
            name: name.to_string(),
            columns,
            rows,
        })
    }
}

/// Built-in reference tables: `sg3`, `hg`, `sg4`, `ratios`.
pub fn golden_table(name: &str) -> Result<GoldenTable> {
    let text = match name {
        "sg3" => GOLDEN_SG3,
        "hg" => GOLDEN_HG,
        "sg4" => GOLDEN_SG4,
        "ratios" => GOLDEN_RATIOS,
        _ => return Err(Error::Config(format!("no reference table {name:?}"))),
    };
    GoldenTable::from_csv(name, text)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ErratumKind {
    /// right digits, wrong power of ten
    Magnitude,
    /// last printed digit off by one
    LastDigit,
}

/// A printed cell known to disagree with the exact value.
#[derive(Clone, Debug, Deserialize)]
pub struct Erratum {
    pub table: String,
    pub j: usize,
    pub column: String,
    pub kind: ErratumKind,
}

#[derive(Deserialize)]
struct ErrataFile {
    erratum: Vec<Erratum>,
}

pub fn load_errata() -> Result<Vec<Erratum>> {
    let f: ErrataFile = toml::from_str(ERRATA).map_err(|e| Error::Config(e.to_string()))?;
    Ok(f.erratum)
}

/// Outcome for one printed cell.
#[derive(Clone, Debug)]
pub struct CellCheck {
    pub j: usize,
    pub column: String,
    pub printed: String,
    pub computed: Rational,
    pub matches: bool,
    /// listed erratum, and whether its kind accounts for the difference
    pub erratum: Option<(ErratumKind, bool)>,
}

impl CellCheck {
    /// A mismatch with no listed explanation, or a listed erratum that does not behave as described.
    pub fn is_unexplained(&self) -> bool {
        match self.erratum {
            None => !self.matches,
            Some((_, explained)) => self.matches || !explained,
        }
    }
}

#[derive(Clone, Debug)]
pub struct GoldenComparison {
    pub table: String,
    pub cells: Vec<CellCheck>,
}

impl GoldenComparison {
    pub fn total(&self) -> usize {
        self.cells.len()
    }

    pub fn matched(&self) -> usize {
        self.cells.iter().filter(|c| c.matches).count()
    }

    pub fn mismatches(&self) -> impl Iterator<Item = &CellCheck> {
        self.cells.iter().filter(|c| !c.matches)
    }

    pub fn unexplained(&self) -> impl Iterator<Item = &CellCheck> {
        self.cells.iter().filter(|c| c.is_unexplained())
    }
}

/// Compare computed columns (keyed like the table header) with every printed cell.
pub fn compare_golden(
    golden: &GoldenTable,
    computed: &BTreeMap<String, Vec<Option<Rational>>>,
    errata: &[Erratum],
) -> Result<GoldenComparison> {
    let mut cells = Vec::new();
    for (j, row) in &golden.rows {
        for (col, cell) in golden.columns.iter().zip(row) {
            let Some(cell) = cell else { continue };
            let x = computed
                .get(col)
                .and_then(|c| c.get(*j).cloned().flatten())
                .ok_or_else(|| {
                    Error::Precondition(format!("no computed value for {col} at j = {j}"))
                })?;
            let matches = cell.matches(&x);
            let erratum = errata
                .iter()
                .find(|e| e.table == golden.name && e.j == *j && &e.column == col)
                .map(|e| {
                    let explained = !matches
                        && match e.kind {
                            ErratumKind::Magnitude => cell.matches_shifted(&x).is_some(),
                            ErratumKind::LastDigit => cell.off_by_last_digit(&x),
                        };
                    (e.kind, explained)
                });
            cells.push(CellCheck {
                j: *j,
                column: col.clone(),
                printed: cell.text.clone(),
                computed: x,
                matches,
                erratum,
            });
        }
    }
    Ok(GoldenComparison {
        table: golden.name.clone(),
        cells,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> Rational {
        Rational::new(p, d)
    }

    #[test]
    fn printed_cells_compare_by_round_or_truncate() {
        let c = PrintedCell::parse("0.1666666667").unwrap();
        assert!(c.matches(&q(1, 6)));
        let c = PrintedCell::parse("0.1666666666").unwrap();
        assert!(c.matches(&q(1, 6)));
        let c = PrintedCell::parse("0.1666666668").unwrap();
        assert!(!c.matches(&q(1, 6)));
        assert!(c.off_by_last_digit(&q(1, 6)));
        let c = PrintedCell::parse("0.1388888889e-2").unwrap();
        assert!(c.matches(&q(1, 720)));
        let c = PrintedCell::parse("0.1388888889e-1").unwrap();
        assert_eq!(c.matches_shifted(&q(1, 720)), Some(1));
        assert!(PrintedCell::parse("-6").unwrap().matches(&q(-6, 1)));
    }

    #[test]
    fn reference_tables_load() {
        for name in ["sg3", "hg", "sg4", "ratios"] {
            let t = golden_table(name).unwrap();
            assert_eq!(t.rows.len(), 20, "{name}");
        }
        assert_eq!(load_errata().unwrap().len(), 5);
    }

    #[test]
    fn plain_significant_digits() {
        assert_eq!(plain(&q(-1246844211, 10_000_000), 10), "-124.6844211");
        assert_eq!(plain(&q(6, 1), 10), "6.000000000");
    }
}
