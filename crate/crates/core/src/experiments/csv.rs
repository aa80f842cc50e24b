use std::io::{self, Write};

use super::sweeps::SweepResult;
use super::VERSION;

pub const CSV_COLUMNS: &str = "sweep_value,ct,pair_a,pair_b,N,nu_min";

/// `printf("%.12g")`: 12 significant digits, trailing zeros removed,
/// exponent form outside `[1e-5, 1e12)`.
pub fn format_g12(x: f64) -> String {
    const DIGITS: i32 = 12;
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..DIGITS).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (DIGITS - 1 - exp) as usize;
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

/// Writes the version line, the column header and every row, LF-terminated.
pub fn write_csv<W: Write>(result: &SweepResult, mut out: W) -> io::Result<()> {
    writeln!(out, "# oscnet v{VERSION}")?;
    writeln!(out, "{CSV_COLUMNS}")?;
    for section in &result.sections {
        if let Some(comment) = &section.comment {
            writeln!(out, "# {comment}")?;
        }
        for row in &section.rows {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                format_g12(row.sweep_value),
                format_g12(row.ct),
                row.pair_labels.0,
                row.pair_labels.1,
                format_g12(row.negativity),
                format_g12(row.nu_min),
            )?;
        }
    }
    out.flush()
}
