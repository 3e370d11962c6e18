//! Text formatting of reals for the CSV outputs.

/// `%.17g`-style formatting: 17 significant digits, trailing zeros trimmed,
/// exponent form outside `[1e-5, 1e17)`. Parses back to the identical `f64`.
pub fn g17(v: f64) -> String {
    if !v.is_finite() {
        return if v.is_nan() {
            "nan".to_string()
        } else if v > 0.0 {
            "inf".to_string()
        } else {
            "-inf".to_string()
        };
    }
    if v == 0.0 {
        return if v.is_sign_negative() { "-0" } else { "0" }.to_string();
    }
    let sci = format!("{v:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..17).contains(&exp) {
        let decimals = (16 - exp) as usize;
        trim_zeros(format!("{v:.decimals$}"))
    } else {
        let m = trim_zeros(mantissa.to_string());
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    }
}

/// Fixed-point seconds with at least 9 fractional digits, extended until the
/// text parses back to the same `f64`.
pub fn timestamp(t: f64) -> String {
    for decimals in 9..=40usize {
        let s = format!("{t:.decimals$}");
        if s.parse::<f64>().ok() == Some(t) {
            return s;
        }
    }
    format!("{t:.40}")
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    let t = s.trim_end_matches('0').trim_end_matches('.');
    t.to_string()
}
