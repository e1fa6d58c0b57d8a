//! Numeric formatting for stable text output.
//!
//! All printed numbers carry 9 significant digits so golden files stay
//! byte-identical across platforms; JSON additionally carries full-precision
//! decimal strings in paired `*_full` fields.

/// Format with (at most) 9 significant digits, `%.9g`-style.
pub fn g9(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let s = format!("{:.8e}", x);
    let (mant, exp) = s.split_once('e').expect("e-format");
    let exp: i32 = exp.parse().expect("exponent");
    let neg = mant.starts_with('-');
    let digits: Vec<u8> = mant.bytes().filter(|b| b.is_ascii_digit()).collect();
    debug_assert_eq!(digits.len(), 9);
    let sign = if neg { "-" } else { "" };
    if (-4..9).contains(&exp) {
        let body = if exp >= 0 {
            let k = (exp + 1) as usize;
            let int_part = String::from_utf8_lossy(&digits[..k]).to_string();
            let frac = String::from_utf8_lossy(&digits[k..])
                .trim_end_matches('0')
                .to_string();
            if frac.is_empty() {
                int_part
            } else {
                format!("{int_part}.{frac}")
            }
        } else {
            let zeros = "0".repeat((-exp - 1) as usize);
            let frac = format!("{zeros}{}", String::from_utf8_lossy(&digits));
            let frac = frac.trim_end_matches('0');
            format!("0.{frac}")
        };
        format!("{sign}{body}")
    } else {
        let head = digits[0] as char;
        let tail = String::from_utf8_lossy(&digits[1..])
            .trim_end_matches('0')
            .to_string();
        if tail.is_empty() {
            format!("{sign}{head}e{exp}")
        } else {
            format!("{sign}{head}.{tail}e{exp}")
        }
    }
}

/// Round to 9 significant digits (the value `g9` prints).
pub fn round_sig9(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    format!("{:.8e}", x).parse().expect("roundtrip")
}

/// Full-precision shortest-roundtrip decimal string.
pub fn full(x: f64) -> String {
    format!("{x}")
}

/// JSON number rounded to 9 significant digits.
pub fn json_f64(x: f64) -> serde_json::Value {
    serde_json::Number::from_f64(round_sig9(x))
        .map(serde_json::Value::Number)
        .unwrap_or_else(|| serde_json::Value::String(full(x)))
}
