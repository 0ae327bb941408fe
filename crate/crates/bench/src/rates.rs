//! Serial-rate files: one `<class> <gflops>` pair per line, `#` comments.

use crate::error::CliError;

pub fn parse_rates(text: &str) -> Result<Vec<(String, f64)>, CliError> {
    let mut out: Vec<(String, f64)> = Vec::new();
    for (lno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = |msg: &str| CliError::Usage(format!("rates line {}: {msg}", lno + 1));
        let mut toks = line.split_whitespace();
        let (Some(name), Some(rate), None) = (toks.next(), toks.next(), toks.next()) else {
            return Err(bad("expected '<class> <gflops>'"));
        };
        let rate: f64 = rate.parse().map_err(|_| bad(&format!("bad rate '{rate}'")))?;
        if !rate.is_finite() || rate <= 0.0 {
            return Err(bad("rate must be positive"));
        }
        if out.iter().any(|(n, _)| n == name) {
            return Err(bad(&format!("duplicate class '{name}'")));
        }
        out.push((name.to_string(), rate));
    }
    Ok(out)
}
