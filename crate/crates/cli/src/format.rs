use std::fmt::Write;

use dephase::linalg::{Complex64, ComplexMatrix};

/// `x` rounded to six significant digits, printed like C's `%g`.
pub fn sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { x.to_string() };
    }
    let exp = x.abs().log10().floor() as i32;
    let rounded: f64 = format!("{x:.5e}").parse().expect("float literal");
    let exp = if rounded.abs() >= 10f64.powi(exp + 1) {
        exp + 1
    } else {
        exp
    };
    if (-5..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        trim(format!("{rounded:.decimals$}"))
    } else {
        let text = format!("{rounded:.5e}");
        let (mantissa, power) = text.split_once('e').expect("exponent");
        format!("{}e{power}", trim(mantissa.to_string()))
    }
}

fn trim(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

pub fn complex(z: Complex64) -> String {
    match (z.re == 0.0, z.im == 0.0) {
        (_, true) => sig6(z.re),
        (true, false) => format!("{}i", sig6(z.im)),
        _ => {
            let sign = if z.im < 0.0 { '-' } else { '+' };
            format!("{}{sign}{}i", sig6(z.re), sig6(z.im.abs()))
        }
    }
}

/// Entries cleaned of round-off below `1e-15` and right-aligned.
pub fn matrix(m: &ComplexMatrix, indent: &str) -> String {
    let clean = |x: f64| if x.abs() < 1e-15 { 0.0 } else { x };
    let cells: Vec<Vec<String>> = (0..m.rows())
        .map(|r| {
            m.row(r)
                .iter()
                .map(|z| complex(Complex64::new(clean(z.re), clean(z.im))))
                .collect()
        })
        .collect();
    let width = cells.iter().flatten().map(String::len).max().unwrap_or(1);
    let mut out = String::new();
    for row in cells {
        out.push_str(indent);
        for cell in row {
            let _ = write!(out, "{cell:>width$}  ");
        }
        out.truncate(out.trim_end().len());
        out.push('\n');
    }
    out
}

pub fn list(values: &[f64]) -> String {
    values
        .iter()
        .map(|&x| sig6(x))
        .collect::<Vec<_>>()
        .join(", ")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(sig6(1.0 / 3.0), "0.333333");
        assert_eq!(sig6(-1.0 / 6.0), "-0.166667");
        assert_eq!(sig6(2.0 * 2f64.sqrt()), "2.82843");
        assert_eq!(sig6(123456.7), "123457");
        assert_eq!(sig6(1234567.0), "1.23457e6");
        assert_eq!(sig6(999999.7), "1e6");
        assert_eq!(sig6(1.5e-9), "1.5e-9");
        assert_eq!(sig6(0.00012345678), "0.000123457");
        assert_eq!(sig6(1.0), "1");
        assert_eq!(sig6(0.0), "0");
    }

    #[test]
    fn complex_entries() {
        assert_eq!(complex(Complex64::new(0.0, -1.0 / 6.0)), "-0.166667i");
        assert_eq!(complex(Complex64::new(0.5, -0.25)), "0.5-0.25i");
    }
}
