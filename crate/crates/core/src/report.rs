//! Number formatting shared by text reports and CSV output.

/// `x` rounded to `digits` significant digits, trailing zeros trimmed.
/// Fixed notation is used for magnitudes in `[1e-4, 1e9)`.
pub fn sig(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let digits = digits.max(1);
    let mag = x.abs().log10().floor() as i32;
    if (-4..9).contains(&mag) {
        let decimals = (digits as i32 - 1 - mag).max(0) as usize;
        let s = format!("{x:.decimals$}");
        // rounding may have bumped the magnitude (9.9999 -> 10.000); harmless
        trim_zeros(&s)
    } else {
        let s = format!("{:.*e}", digits - 1, x);
        match s.split_once('e') {
            Some((m, e)) => format!("{}e{}", trim_zeros(m), e),
            None => s,
        }
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        let t = s.trim_end_matches('0').trim_end_matches('.');
        if t == "-0" {
            "0".into()
        } else {
            t.into()
        }
    } else {
        s.into()
    }
}

/// 17 significant digits in scientific notation: reads back bit-exactly.
pub fn csv_number(x: f64) -> String {
    format!("{x:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(sig(0.053874696829998936, 9), "0.0538746968");
        assert_eq!(sig(2.0, 9), "2");
        assert_eq!(sig(-0.5, 9), "-0.5");
        assert_eq!(sig(-1.4715177646857693, 9), "-1.47151776");
        assert_eq!(sig(1.23456789012e-7, 9), "1.23456789e-7");
        assert_eq!(sig(0.0, 9), "0");
        assert_eq!(sig(-1e-30, 3), "-1e-30");
    }

    #[test]
    fn csv_numbers_round_trip() {
        for x in [0.1, -1.0 / 3.0, 1e-300, 6.02214076e23, std::f64::consts::PI] {
            let s = csv_number(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
    }
}
