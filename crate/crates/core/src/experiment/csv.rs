//! CSV persistence of sweep results.

use std::io::{self, Write};

use super::SweepRecord;

pub const HEADER: &str = "experiment,scheme,grid,x,metric,mean,stderr,trials";

/// `printf("%.9g")`: nine significant digits, trailing zeros removed,
/// exponent form outside `[1e-4, 1e9)`.
pub fn format_sig9(value: f64) -> String {
    if value == 0.0 {
        return "0".into();
    }
    if !value.is_finite() {
        return if value.is_nan() { "nan".into() } else if value > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{value:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..9).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{mantissa}e{sign}{:02}", exp.abs());
    }
    let decimals = (8 - exp).max(0) as usize;
    trim_zeros(&format!("{value:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn write_csv<W: Write>(records: &[SweepRecord], mut out: W) -> io::Result<()> {
    writeln!(out, "{HEADER}")?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.experiment,
            r.scheme,
            r.grid,
            format_sig9(r.x),
            r.metric,
            format_sig9(r.mean),
            format_sig9(r.stderr),
            r.trials
        )?;
    }
    Ok(())
}

pub fn to_csv_string(records: &[SweepRecord]) -> String {
    let mut buf = Vec::new();
    write_csv(records, &mut buf).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("CSV output is UTF-8")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_c_percent_g() {
        let cases = [
            (1.0, "1"),
            (0.1, "0.1"),
            (12.5, "12.5"),
            (1.0 / 3.0, "0.333333333"),
            (123456789.0, "123456789"),
            (1234567890.0, "1.23456789e+09"),
            (0.00012345, "0.00012345"),
            (0.000012345678912, "1.23456789e-05"),
            (-2.5e-7, "-2.5e-07"),
            (0.0001, "0.0001"),
            (0.00009999999999, "0.0001"),
            (0.000099999, "9.9999e-05"),
            (9.999999999, "10"),
            (0.99870, "0.9987"),
            (15.0, "15"),
        ];
        for (v, s) in cases {
            assert_eq!(format_sig9(v), s, "{v}");
        }
    }
}
