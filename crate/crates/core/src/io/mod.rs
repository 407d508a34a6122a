//! File formats: scenario files, trajectory CSVs and SVG plots.

pub mod csv;
pub mod scenario;
pub mod svg;

/// Formats like C's `%.9g`: nine significant digits, trailing zeros
/// removed, scientific notation outside `1e-4 <= |x| < 1e9`.
pub fn fmt_sig9(x: f64) -> String {
    const PRECISION: i32 = 9;
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", (PRECISION - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..PRECISION).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (PRECISION - 1 - exp) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::fmt_sig9;

    #[test]
    fn sig9_formatting() {
        assert_eq!(fmt_sig9(0.25), "0.25");
        assert_eq!(fmt_sig9(1.0), "1");
        assert_eq!(fmt_sig9(-2.5), "-2.5");
        assert_eq!(fmt_sig9(0.0), "0");
        assert_eq!(fmt_sig9(1.0 / 3.0), "0.333333333");
        assert_eq!(fmt_sig9(2.0 * 5f64.sqrt() - 3.0), "1.47213595");
        assert_eq!(fmt_sig9(9.375e-4), "0.0009375");
        assert_eq!(fmt_sig9(7.653061224489796e-5), "7.65306122e-05");
        assert_eq!(fmt_sig9(123456789.0), "123456789");
        assert_eq!(fmt_sig9(1234567890.0), "1.23456789e+09");
        assert_eq!(fmt_sig9(999999999.6), "1e+09");
        assert_eq!(fmt_sig9(f64::NAN), "nan");
        assert_eq!(fmt_sig9(f64::NEG_INFINITY), "-inf");
    }

    #[test]
    fn sig9_parses_back() {
        for &x in &[
            0.1234567891234,
            -5.5e-12,
            3.0e20,
            1.0 / 7.0,
            1e-4,
            99999.99999,
        ] {
            let y: f64 = fmt_sig9(x).parse().unwrap();
            assert!(((y - x) / x).abs() < 1e-9, "{x} -> {y}");
        }
    }
}
