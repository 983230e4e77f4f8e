//! Number formatting and table rendering.

/// Shortest representation that parses back to the same `f64`.
pub fn full(v: f64) -> String {
    format!("{v:e}")
}

/// Scientific notation with 6 significant digits and a signed two-digit
/// exponent, e.g. `-1.23457e-02`.
pub fn sci6(v: f64) -> String {
    if !v.is_finite() {
        return format!("{v}");
    }
    let s = format!("{v:.5e}");
    let (mantissa, exp) = s.split_once('e').expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

/// Significance codes: `***` below 0.001, `**` below 0.01, `*` below 0.05,
/// otherwise `NS`.
pub fn stars(p: f64) -> &'static str {
    if p < 0.001 {
        "***"
    } else if p < 0.01 {
        "**"
    } else if p < 0.05 {
        "*"
    } else {
        "NS"
    }
}

/// Tab-separated text with a header row and LF line endings.
pub struct Tsv {
    text: String,
    width: usize,
}

impl Tsv {
    pub fn new<S: AsRef<str>>(header: &[S]) -> Self {
        let mut t = Tsv {
            text: String::new(),
            width: header.len(),
        };
        t.push_line(header);
        t
    }

    pub fn row<S: AsRef<str>>(&mut self, cells: &[S]) {
        assert_eq!(cells.len(), self.width, "row width differs from header");
        self.push_line(cells);
    }

    /// Free-form trailing line.
    pub fn footer(&mut self, line: &str) {
        self.text.push_str(line);
        self.text.push('\n');
    }

    fn push_line<S: AsRef<str>>(&mut self, cells: &[S]) {
        let joined: Vec<&str> = cells.iter().map(|c| c.as_ref()).collect();
        self.text.push_str(&joined.join("\t"));
        self.text.push('\n');
    }

    pub fn into_string(self) -> String {
        self.text
    }
}

/// Space-aligned plain text table; the first column is left aligned, the
/// rest right aligned.
pub fn aligned(header: &[String], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, c) in widths.iter_mut().zip(row) {
            *w = (*w).max(c.chars().count());
        }
    }
    let line = |cells: &[String]| -> String {
        let parts: Vec<String> = cells
            .iter()
            .zip(&widths)
            .enumerate()
            .map(|(i, (c, &w))| {
                if i == 0 {
                    format!("{c:<w$}")
                } else {
                    format!("{c:>w$}")
                }
            })
            .collect();
        parts.join("  ").trim_end().to_string()
    };
    let mut out = line(header);
    out.push('\n');
    for row in rows {
        out.push_str(&line(row));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sci6_examples() {
        assert_eq!(sci6(0.033), "3.30000e-02");
        assert_eq!(sci6(-123456.789), "-1.23457e+05");
        assert_eq!(sci6(0.0), "0.00000e+00");
        assert_eq!(sci6(1e-120), "1.00000e-120");
    }

    #[test]
    fn full_round_trips() {
        for v in [0.1, -1.0 / 3.0, 1e-300, 6.02214076e23, f64::MIN_POSITIVE] {
            assert_eq!(full(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn star_codes() {
        assert_eq!(stars(0.0005), "***");
        assert_eq!(stars(0.005), "**");
        assert_eq!(stars(0.03), "*");
        assert_eq!(stars(0.2), "NS");
        assert_eq!(stars(0.001), "**");
        assert_eq!(stars(0.05), "NS");
    }

    #[test]
    fn tsv_layout() {
        let mut t = Tsv::new(&["a", "b"]);
        t.row(&["1", "2"]);
        t.footer("end");
        assert_eq!(t.into_string(), "a\tb\n1\t2\nend\n");
    }

    #[test]
    fn aligned_pads_columns() {
        let s = aligned(
            &["name".into(), "v".into()],
            &[vec!["x".into(), "10".into()], vec!["long".into(), "2".into()]],
        );
        assert_eq!(s, "name   v\nx     10\nlong   2\n");
    }
}
