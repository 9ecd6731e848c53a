//! Fixed-precision decimal formatting shared by every text output.

/// Formats `x` with `digits` significant digits, in the style of C's `%.*g`:
/// fixed notation when the decimal exponent lies in `[-5, digits)`,
/// scientific otherwise, trailing zeros trimmed.
pub fn format_sig(x: f64, digits: usize) -> String {
    let digits = digits.max(1);
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    if x == 0.0 {
        return "0".to_string();
    }
    // Round once in scientific form so the exponent reflects the rounded value.
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format has exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= digits as i32 {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
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
    use super::format_sig;

    #[test]
    fn matches_printf_g() {
        assert_eq!(format_sig(0.0, 10), "0");
        assert_eq!(format_sig(1.0, 10), "1");
        assert_eq!(format_sig(-2.5, 10), "-2.5");
        assert_eq!(format_sig(1.0 / 3.0, 10), "0.3333333333");
        assert_eq!(format_sig(123456.0, 3), "1.23e+05");
        assert_eq!(format_sig(0.0001234, 3), "0.000123");
        assert_eq!(format_sig(1.234e-7, 3), "1.23e-07");
        assert_eq!(format_sig(9.9999999999, 3), "10");
        assert_eq!(format_sig(f64::NAN, 3), "nan");
    }

    #[test]
    fn seventeen_digits_round_trip() {
        for &x in &[0.1, 1.0 / 3.0, -std::f64::consts::PI, 1e-300, 6.02214076e23] {
            let s = format_sig(x, 17);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
    }
}
