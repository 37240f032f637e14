//! Sweep tables as CSV. Columns a row does not use are left empty; reals are
//! written with 6 significant digits.

use std::io::{Read, Write};

use anyhow::{bail, Context, Result};
use structstab::montecarlo::{ModelKind, SweepRow};

pub const HEADER: [&str; 16] = [
    "model", "n", "trials", "seed", "c", "p", "q", "N", "M", "mu", "p_stable", "p_L", "p_H",
    "ci_low", "ci_high", "asymptote",
];

/// Shortest decimal rendering of `x` rounded to 6 significant digits.
pub fn sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{x:.5e}").parse().expect("float formatting round-trips");
    let exponent = rounded.abs().log10().floor() as i32;
    let decimals = (5 - exponent).max(0) as usize;
    let mut s = format!("{rounded:.decimals$}");
    if s.contains('.') {
        s.truncate(s.trim_end_matches('0').trim_end_matches('.').len());
    }
    s
}

fn real(x: Option<f64>) -> String {
    x.map(sig6).unwrap_or_default()
}

fn count(x: Option<usize>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn record(row: &SweepRow) -> [String; 16] {
    [
        row.model.label().to_string(),
        row.n.to_string(),
        row.trials.to_string(),
        row.seed.to_string(),
        real(row.c),
        real(row.p),
        real(row.q),
        count(row.edges),
        count(row.loops),
        real(row.mu),
        sig6(row.p_stable),
        sig6(row.p_l),
        sig6(row.p_h),
        sig6(row.ci_low),
        sig6(row.ci_high),
        real(row.asymptote),
    ]
}

pub fn write_rows<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for row in rows {
        w.write_record(record(row))?;
    }
    w.flush()?;
    Ok(())
}

pub fn rows_to_string(rows: &[SweepRow]) -> Result<String> {
    let mut buf = Vec::new();
    write_rows(rows, &mut buf)?;
    Ok(String::from_utf8(buf)?)
}

fn opt<T: std::str::FromStr>(field: &str, name: &str) -> Result<Option<T>> {
    if field.is_empty() {
        return Ok(None);
    }
    match field.parse() {
        Ok(v) => Ok(Some(v)),
        Err(_) => bail!("column {name}: malformed value '{field}'"),
    }
}

fn req<T: std::str::FromStr>(field: &str, name: &str) -> Result<T> {
    opt(field, name)?.with_context(|| format!("column {name} is empty"))
}

pub fn read_rows<R: Read>(input: R) -> Result<Vec<SweepRow>> {
    let mut r = csv::Reader::from_reader(input);
    if r.headers()?.iter().ne(HEADER) {
        bail!("unexpected CSV header");
    }
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let f = |j: usize| rec.get(j).unwrap_or("");
        let row = (|| -> Result<SweepRow> {
            Ok(SweepRow {
                model: match f(0) {
                    "a" => ModelKind::A,
                    "b" => ModelKind::B,
                    other => bail!("column model: unknown model '{other}'"),
                },
                n: req(f(1), "n")?,
                trials: req(f(2), "trials")?,
                seed: req(f(3), "seed")?,
                c: opt(f(4), "c")?,
                p: opt(f(5), "p")?,
                q: opt(f(6), "q")?,
                edges: opt(f(7), "N")?,
                loops: opt(f(8), "M")?,
                mu: opt(f(9), "mu")?,
                p_stable: req(f(10), "p_stable")?,
                p_l: req(f(11), "p_L")?,
                p_h: req(f(12), "p_H")?,
                ci_low: req(f(13), "ci_low")?,
                ci_high: req(f(14), "ci_high")?,
                asymptote: opt(f(15), "asymptote")?,
            })
        })()
        .with_context(|| format!("CSV row {}", i + 1))?;
        rows.push(row);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(sig6(0.6065306597), "0.606531");
        assert_eq!(sig6(1.0), "1");
        assert_eq!(sig6(0.0), "0");
        assert_eq!(sig6(1000f64.ln() / 1000.0), "0.00690776");
        assert_eq!(sig6(123456789.0), "123457000");
        assert_eq!(sig6(-0.25), "-0.25");
        assert_eq!(sig6(9.9999996), "10");
        assert_eq!(sig6(1e-12), "0.000000000001");
    }

    fn row() -> SweepRow {
        SweepRow {
            model: ModelKind::A,
            n: 1000,
            trials: 2000,
            seed: 7,
            c: Some(0.0),
            p: Some(1000f64.ln() / 1000.0),
            q: Some(0.5),
            edges: None,
            loops: None,
            mu: Some(0.5),
            p_stable: 0.6065,
            p_l: 0.609,
            p_h: 0.6065,
            ci_low: 0.584891234,
            ci_high: 0.62765,
            asymptote: Some((-0.5f64).exp()),
        }
    }

    #[test]
    fn header_and_empty_columns() {
        let text = rows_to_string(&[row()]).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), HEADER.join(","));
        assert_eq!(
            lines.next().unwrap(),
            "a,1000,2000,7,0,0.00690776,0.5,,,0.5,0.6065,0.609,0.6065,0.584891,0.62765,0.606531"
        );
    }

    #[test]
    fn round_trip() {
        let b = SweepRow {
            model: ModelKind::B,
            c: None,
            p: None,
            q: None,
            edges: Some(3454),
            loops: Some(2),
            mu: None,
            asymptote: None,
            ci_low: 0.584891,
            ..row()
        };
        let text = rows_to_string(&[row(), b.clone()]).unwrap();
        let back = read_rows(text.as_bytes()).unwrap();
        assert_eq!(back.len(), 2);
        assert_eq!(back[1], b);
        assert_eq!(rows_to_string(&back).unwrap(), text);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(read_rows("x,y\n1,2\n".as_bytes()).is_err());
        let text = rows_to_string(&[row()]).unwrap().replace(",1000,", ",ten,");
        assert!(read_rows(text.as_bytes()).is_err());
    }
}
